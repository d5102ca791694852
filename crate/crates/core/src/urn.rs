//! The `2d`-colour Pólya-type urn equivalent in law to the walk.
//!
//! A ball is drawn uniformly and replaced; then one ball is added, of the
//! same colour with probability `p` and otherwise of one of the other
//! `2d − 1` colours uniformly. The added colour is sampled from the drawn
//! colour's column of the mean replacement matrix.

use nalgebra::{DMatrix, DVector};
use num_rational::Rational64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::serialize_matrix;
use crate::params::ModelParams;
use crate::walk::{check_snapshot_times, PathSnapshot};

/// Colour counts `X_n`; the urn holds `n` balls at time `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UrnState {
    n: u64,
    counts: Vec<u64>,
}

impl UrnState {
    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() || !counts.len().is_multiple_of(2) {
            return Err(Error::Config(format!(
                "urn needs an even positive number of colours, got {}",
                counts.len()
            )));
        }
        Ok(Self {
            n: counts.iter().sum(),
            counts,
        })
    }

    #[inline]
    pub fn n(&self) -> u64 {
        self.n
    }

    #[inline]
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn colours(&self) -> usize {
        self.counts.len()
    }
}

/// Per-colour cumulative replacement law, one column of `A` per drawn colour.
#[derive(Debug, Clone)]
pub(crate) struct Replacement {
    colours: usize,
    // cdf[drawn * colours + added]
    cdf: Vec<f64>,
    first_cdf: Vec<f64>,
}

impl Replacement {
    pub(crate) fn new(params: &ModelParams) -> Self {
        let colours = params.colours();
        let a = replacement_matrix(params);
        let mut cdf = Vec::with_capacity(colours * colours);
        for drawn in 0..colours {
            let mut acc = 0.0;
            for added in 0..colours {
                acc += a[(added, drawn)];
                cdf.push(acc);
            }
        }
        let designated = params.designated().colour();
        let rest = (1.0 - params.q()) / (colours - 1) as f64;
        let mut acc = 0.0;
        let first_cdf = (0..colours)
            .map(|c| {
                acc += if c == designated { params.q() } else { rest };
                acc
            })
            .collect();
        Self {
            colours,
            cdf,
            first_cdf,
        }
    }

    #[inline]
    fn invert(cdf: &[f64], u: f64) -> usize {
        cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1)
    }

    #[inline]
    pub(crate) fn initial_colour<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        Self::invert(&self.first_cdf, rng.random::<f64>())
    }

    /// Draws a ball and returns the colour of the ball to add.
    #[inline]
    pub(crate) fn added_colour<R: Rng + ?Sized>(&self, counts: &[u64], n: u64, rng: &mut R) -> usize {
        let ball = rng.random_range(0..n);
        let mut seen = 0u64;
        let mut drawn = self.colours - 1;
        for (c, &k) in counts.iter().enumerate() {
            seen += k;
            if ball < seen {
                drawn = c;
                break;
            }
        }
        let column = &self.cdf[drawn * self.colours..(drawn + 1) * self.colours];
        Self::invert(column, rng.random::<f64>())
    }
}

/// A one-ball urn whose colour follows the first-step law.
pub fn init_urn<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> UrnState {
    let colour = Replacement::new(params).initial_colour(rng);
    let mut counts = vec![0; params.colours()];
    counts[colour] = 1;
    UrnState { n: 1, counts }
}

/// One draw-and-add step.
pub fn urn_step<R: Rng + ?Sized>(
    state: &UrnState,
    params: &ModelParams,
    rng: &mut R,
) -> Result<UrnState> {
    check_colours(state, params)?;
    if state.n == 0 {
        return Err(Error::Precondition(
            "urn_step needs a non-empty urn; start from init_urn".into(),
        ));
    }
    let added = Replacement::new(params).added_colour(&state.counts, state.n, rng);
    let mut next = state.clone();
    next.counts[added] += 1;
    next.n += 1;
    Ok(next)
}

fn check_colours(state: &UrnState, params: &ModelParams) -> Result<()> {
    if state.colours() != params.colours() {
        return Err(Error::Precondition(format!(
            "urn has {} colours but parameters need {}",
            state.colours(),
            params.colours()
        )));
    }
    Ok(())
}

/// Law of the added colour: `A · (X_n / n)`.
pub fn added_colour_law(counts: &[u64], params: &ModelParams) -> Result<Vec<f64>> {
    if counts.len() != params.colours() {
        return Err(Error::Precondition("count vector has the wrong number of colours".into()));
    }
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Err(Error::Precondition("added-colour law needs a non-empty urn".into()));
    }
    let composition = DVector::from_iterator(counts.len(), counts.iter().map(|&c| c as f64 / n as f64));
    Ok((replacement_matrix(params) * composition).iter().copied().collect())
}

/// `(X¹ − X²) e_1 + ⋯ + (X^{2d−1} − X^{2d}) e_d`.
pub fn project_to_walk(state: &UrnState) -> Vec<i64> {
    project_counts(&state.counts)
}

pub(crate) fn project_counts(counts: &[u64]) -> Vec<i64> {
    counts
        .chunks_exact(2)
        .map(|pair| pair[0] as i64 - pair[1] as i64)
        .collect()
}

/// Runs the urn to `n_max`, recording the projected position at each time.
pub fn simulate_urn_path<R: Rng + ?Sized>(
    params: &ModelParams,
    n_max: u64,
    snapshot_times: &[u64],
    rng: &mut R,
) -> Result<PathSnapshot> {
    check_snapshot_times(n_max, snapshot_times)?;
    let mut snap = PathSnapshot {
        times: snapshot_times.to_vec(),
        positions: Vec::with_capacity(snapshot_times.len()),
    };
    let Some(&last) = snapshot_times.last() else {
        return Ok(snap);
    };
    let mut pending = snapshot_times.iter().peekable();
    while pending.next_if_eq(&&0).is_some() {
        snap.positions.push(vec![0; params.dim()]);
    }
    let law = Replacement::new(params);
    let mut counts = vec![0u64; params.colours()];
    let mut n = 0u64;
    while n < last {
        let colour = if n == 0 {
            law.initial_colour(rng)
        } else {
            law.added_colour(&counts, n, rng)
        };
        counts[colour] += 1;
        n += 1;
        if pending.next_if_eq(&&n).is_some() {
            snap.positions.push(project_counts(&counts));
        }
    }
    Ok(snap)
}

/// `A = ((1 − p)/(2d − 1)) J + ((2dp − 1)/(2d − 1)) I`.
pub fn replacement_matrix(params: &ModelParams) -> DMatrix<f64> {
    let colours = params.colours();
    let p = params.p();
    let off = (1.0 - p) / (colours - 1) as f64;
    DMatrix::from_fn(colours, colours, |i, j| if i == j { p } else { off })
}

/// The mean replacement matrix with its closed-form spectral data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralData {
    #[serde(serialize_with = "serialize_matrix")]
    pub matrix: DMatrix<f64>,
    pub lambda1: f64,
    pub lambda2: f64,
    /// `λ₂` as `"a/b"` when `p` is exact.
    pub lambda2_exact: Option<String>,
    pub lambda2_multiplicity: usize,
    /// Right eigenvector of `λ₁`, `(1/2d)(1, …, 1)`.
    pub v1: Vec<f64>,
    /// Left eigenvector of `λ₁`, `(1, …, 1)`.
    pub u1: Vec<f64>,
}

impl SpectralData {
    pub fn colours(&self) -> usize {
        self.v1.len()
    }

    /// A basis of the `λ₂` eigenspace `{x : Σ xᵢ = 0}`: `e_i − e_{i+1}`.
    pub fn lambda2_basis(&self) -> Vec<DVector<f64>> {
        let c = self.colours();
        (0..c - 1)
            .map(|i| {
                let mut x = DVector::zeros(c);
                x[i] = 1.0;
                x[i + 1] = -1.0;
                x
            })
            .collect()
    }

    /// Projection onto the `λ₁` eigenline, `J / 2d`.
    pub fn leading_projection(&self) -> DMatrix<f64> {
        let c = self.colours();
        DMatrix::from_element(c, c, 1.0 / c as f64)
    }

    /// `exp(τ A) = e^τ P₁ + e^{τ λ₂} (I − P₁)`.
    pub fn exp(&self, tau: f64) -> DMatrix<f64> {
        let c = self.colours();
        let p1 = self.leading_projection();
        let rest = DMatrix::identity(c, c) - &p1;
        p1 * (tau * self.lambda1).exp() + rest * (tau * self.lambda2).exp()
    }
}

/// Builds `A` and its analytic eigenstructure; no numerical eigensolver.
pub fn mean_replacement_matrix(params: &ModelParams) -> SpectralData {
    let colours = params.colours();
    let lambda2_exact = params.memory().exact().map(|p| {
        let d = params.dim() as i64;
        let l2 = (Rational64::from_integer(2 * d) * p - 1) / Rational64::from_integer(2 * d - 1);
        format!("{}/{}", l2.numer(), l2.denom())
    });
    SpectralData {
        matrix: replacement_matrix(params),
        lambda1: 1.0,
        lambda2: params.alpha(),
        lambda2_exact,
        lambda2_multiplicity: colours - 1,
        v1: vec![1.0 / colours as f64; colours],
        u1: vec![1.0; colours],
    }
}
