use nalgebra::{DMatrix, DVector};

/// Online mean and co-moment accumulator (Welford, with Chan's merge).
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    count: u64,
    mean: DVector<f64>,
    comoment: DMatrix<f64>,
}

impl Moments {
    pub fn new(dim: usize) -> Self {
        Self {
            count: 0,
            mean: DVector::zeros(dim),
            comoment: DMatrix::zeros(dim, dim),
        }
    }

    pub fn push(&mut self, x: &[f64]) {
        debug_assert_eq!(x.len(), self.mean.len());
        self.count += 1;
        let n = self.count as f64;
        let delta = DVector::from_column_slice(x) - &self.mean;
        self.mean += &delta / n;
        let after = DVector::from_column_slice(x) - &self.mean;
        self.comoment.ger(1.0, &delta, &after, 1.0);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let delta = &other.mean - &self.mean;
        self.mean += &delta * (nb / n);
        self.comoment += &other.comoment;
        self.comoment.ger(na * nb / n, &delta, &delta, 1.0);
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    /// Sample covariance with the `n − 1` divisor.
    pub fn covariance(&self) -> DMatrix<f64> {
        if self.count < 2 {
            return DMatrix::from_element(self.mean.len(), self.mean.len(), f64::NAN);
        }
        let mut c = &self.comoment / (self.count - 1) as f64;
        // Symmetrize away rounding.
        c = (&c + c.transpose()) * 0.5;
        c
    }
}
