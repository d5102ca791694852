//! Reference computations that do not go through the library's own
//! enumeration or closed forms.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Unit step of direction index `c`: `2k` is `+e_{k+1}`, `2k+1` is `−e_{k+1}`.
fn unit(c: usize, d: usize) -> Vec<i64> {
    let mut v = vec![0; d];
    v[c / 2] = if c.is_multiple_of(2) { 1 } else { -1 };
    v
}

/// Law of `S_n` by summing over every sequence of `n` directions, weighting
/// each step by its conditional probability given the full history.
pub fn brute_force_walk_pmf(
    d: usize,
    p: &BigRational,
    q: &BigRational,
    designated: usize,
    n: usize,
) -> BTreeMap<Vec<i64>, BigRational> {
    let m = 2 * d;
    let others = BigRational::from_integer(BigInt::from(m as i64 - 1));
    let one = BigRational::one();
    let mut out = BTreeMap::new();
    let mut seq = vec![0usize; n];
    let total = (m as u64).pow(n as u32);
    for code in 0..total {
        let mut c = code;
        for slot in seq.iter_mut() {
            *slot = (c % m as u64) as usize;
            c /= m as u64;
        }
        let mut prob = if seq[0] == designated {
            q.clone()
        } else {
            (&one - q) / &others
        };
        for k in 1..n {
            // P(X_{k+1} = e | X_1..X_k) = (1/k) Σ_j [p·1{e = X_j} + (1−p)/(2d−1)·1{e ≠ X_j}]
            let same = seq[..k].iter().filter(|&&x| x == seq[k]).count() as i64;
            let diff = k as i64 - same;
            let num = p * BigRational::from_integer(same.into())
                + (&one - p) / &others * BigRational::from_integer(diff.into());
            prob *= num / BigRational::from_integer(BigInt::from(k as i64));
            if prob.is_zero() {
                break;
            }
        }
        if prob.is_zero() {
            continue;
        }
        let mut pos = vec![0i64; d];
        for &s in &seq {
            for (x, u) in pos.iter_mut().zip(unit(s, d)) {
                *x += u;
            }
        }
        *out.entry(pos).or_insert_with(BigRational::zero) += prob;
    }
    out
}

/// Composite Simpson rule with `2m` panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let n = 2 * m;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// `2 ∫₀¹ ∫₀ᵗ k(s, t) ds dt` with `s = t w⁴` to tame the `s^{1−α}` corner.
pub fn double_integral_lower_triangle(k: impl Fn(f64, f64) -> f64, m: usize) -> f64 {
    let inner = |t: f64| {
        if t == 0.0 {
            return 0.0;
        }
        simpson(|w| k(t * w.powi(4), t) * 4.0 * t * w.powi(3), 0.0, 1.0, m)
    };
    2.0 * simpson(inner, 0.0, 1.0, m)
}

/// `e_i − e_m` for `i < m`: a basis of the zero-sum hyperplane in `R^m`.
pub fn zero_sum_basis(m: usize) -> Vec<Vec<f64>> {
    (0..m - 1)
        .map(|i| {
            let mut v = vec![0.0; m];
            v[i] = 1.0;
            v[m - 1] = -1.0;
            v
        })
        .collect()
}

/// The replacement matrix written out entry by entry.
pub fn replacement_entries(d: usize, p: f64) -> Vec<Vec<f64>> {
    let m = 2 * d;
    let off = (1.0 - p) / (m as f64 - 1.0);
    (0..m)
        .map(|i| (0..m).map(|j| if i == j { p } else { off }).collect())
        .collect()
}

pub fn mat_vec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum()).collect()
}

pub fn vec_mat(x: &[f64], a: &[Vec<f64>]) -> Vec<f64> {
    (0..a[0].len()).map(|j| x.iter().zip(a).map(|(v, row)| v * row[j]).sum()).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
