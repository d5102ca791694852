//! Closed-form limit predictions: regime classification, covariance
//! kernels of the limiting Gaussian processes, and the urn-level matrices
//! they are projected from.

use std::fmt;

use nalgebra::DMatrix;
use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::serialize_matrix;
use crate::params::{critical_memory_exact, ModelParams};
use crate::urn::mean_replacement_matrix;

/// Half-width of the band in which a float `p` counts as critical.
pub const CRITICAL_BAND: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Diffusive,
    Critical,
    Superdiffusive,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Diffusive => "diffusive",
            Regime::Critical => "critical",
            Regime::Superdiffusive => "superdiffusive",
        })
    }
}

/// How the regime was decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    /// `p` was an exact rational and compared exactly with `p_c`.
    Exact,
    /// `p` was a float and compared with `p_c` using [`CRITICAL_BAND`].
    FloatBand,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    pub dim: usize,
    pub p_c: f64,
    pub p_c_exact: String,
    pub regime: Regime,
    pub alpha: f64,
    pub alpha_exact: Option<String>,
    pub classification: Classification,
    /// Set when a float `p` fell inside the critical band without being exact.
    pub numerically_critical: bool,
}

fn fmt_ratio(r: Rational64) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Exact `α = (2dp − 1)/(2d − 1)` when `p` is exact.
pub fn alpha_exact(params: &ModelParams) -> Option<Rational64> {
    let d = params.dim() as i64;
    params
        .memory()
        .exact()
        .map(|p| (Rational64::from_integer(2 * d) * p - 1) / Rational64::from_integer(2 * d - 1))
}

pub fn classify_regime(params: &ModelParams) -> RegimeReport {
    let pc = critical_memory_exact(params.dim());
    let pc_f = *pc.numer() as f64 / *pc.denom() as f64;
    let (regime, classification, numerically_critical) = match params.memory().exact() {
        Some(p) => {
            let regime = match p.cmp(&pc) {
                std::cmp::Ordering::Less => Regime::Diffusive,
                std::cmp::Ordering::Equal => Regime::Critical,
                std::cmp::Ordering::Greater => Regime::Superdiffusive,
            };
            (regime, Classification::Exact, false)
        }
        None => {
            let p = params.p();
            if (p - pc_f).abs() < CRITICAL_BAND {
                (Regime::Critical, Classification::FloatBand, true)
            } else if p < pc_f {
                (Regime::Diffusive, Classification::FloatBand, false)
            } else {
                (Regime::Superdiffusive, Classification::FloatBand, false)
            }
        }
    };
    RegimeReport {
        dim: params.dim(),
        p_c: pc_f,
        p_c_exact: fmt_ratio(pc),
        regime,
        alpha: params.alpha(),
        alpha_exact: alpha_exact(params).map(fmt_ratio),
        classification,
        numerically_critical,
    }
}

fn require(params: &ModelParams, wanted: Regime, what: &str) -> Result<()> {
    let report = classify_regime(params);
    if report.regime == wanted {
        return Ok(());
    }
    let relation = match report.regime {
        Regime::Diffusive => "<",
        Regime::Critical => "=",
        Regime::Superdiffusive => ">",
    };
    let reason = match wanted {
        Regime::Diffusive => "undefined at/above criticality",
        Regime::Critical => "only defined at p = p_c",
        Regime::Superdiffusive => "only defined above criticality",
    };
    Err(Error::Domain(format!(
        "p {relation} p_c = {}: {what} {reason}",
        report.p_c_exact
    )))
}

/// Orders `(s, t)` so that `s ≤ t` and rejects negative times.
fn ordered(s: f64, t: f64) -> Result<(f64, f64)> {
    if !(s >= 0.0 && t >= 0.0) || !s.is_finite() || !t.is_finite() {
        return Err(Error::Domain(format!("kernel times must be finite and >= 0, got ({s}, {t})")));
    }
    Ok(if s <= t { (s, t) } else { (t, s) })
}

/// `(2d − 1) / (d (1 + 2d − 4dp))`.
pub fn diffusive_prefactor(params: &ModelParams) -> Result<f64> {
    require(params, Regime::Diffusive, "diffusive kernel")?;
    let d = params.dim() as f64;
    Ok((2.0 * d - 1.0) / (d * (1.0 + 2.0 * d - 4.0 * d * params.p())))
}

/// Kernel of the diffusive limit: `prefactor · s · (t/s)^{λ₂} · I_d` for `s ≤ t`.
pub fn diffusive_covariance(params: &ModelParams, s: f64, t: f64) -> Result<DMatrix<f64>> {
    let c = diffusive_prefactor(params)?;
    let (s, t) = ordered(s, t)?;
    let d = params.dim();
    if s == 0.0 {
        return Ok(DMatrix::zeros(d, d));
    }
    let v = c * s * (t / s).powf(params.alpha());
    Ok(DMatrix::identity(d, d) * v)
}

/// `((2d − 1)/(4d² (1 + 2d − 4dp))) · (2d·I − J)`.
pub fn sigma_i(params: &ModelParams) -> Result<DMatrix<f64>> {
    require(params, Regime::Diffusive, "urn covariance Σ_I")?;
    let d = params.dim() as f64;
    let scale = (2.0 * d - 1.0) / (4.0 * d * d * (1.0 + 2.0 * d - 4.0 * d * params.p()));
    Ok(centred_gram(params.colours()) * scale)
}

/// `2d·I − J`: diagonal `2d − 1`, off-diagonal `−1`.
fn centred_gram(colours: usize) -> DMatrix<f64> {
    DMatrix::from_fn(colours, colours, |i, j| {
        if i == j {
            colours as f64 - 1.0
        } else {
            -1.0
        }
    })
}

/// Urn-level diffusive kernel `s · Σ_I · exp(log(t/s) A)`.
pub fn urn_diffusive_covariance(params: &ModelParams, s: f64, t: f64) -> Result<DMatrix<f64>> {
    let sigma = sigma_i(params)?;
    let (s, t) = ordered(s, t)?;
    if s == 0.0 {
        let c = params.colours();
        return Ok(DMatrix::zeros(c, c));
    }
    let expm = mean_replacement_matrix(params).exp((t / s).ln());
    Ok(sigma * expm * s)
}

/// Urn-level critical kernel `(s / 4d²) · (2d·I − J)`.
pub fn urn_critical_covariance(params: &ModelParams, s: f64, t: f64) -> Result<DMatrix<f64>> {
    require(params, Regime::Critical, "critical kernel")?;
    let (s, _) = ordered(s, t)?;
    let d = params.dim() as f64;
    Ok(centred_gram(params.colours()) * (s / (4.0 * d * d)))
}

/// Kernel of the critical limit, `(1/d) · s · I_d` for `s ≤ t`.
pub fn critical_covariance(params: &ModelParams, s: f64, t: f64) -> Result<DMatrix<f64>> {
    require(params, Regime::Critical, "critical kernel")?;
    let (s, _) = ordered(s, t)?;
    let d = params.dim();
    Ok(DMatrix::identity(d, d) * (s / d as f64))
}

/// Limit covariance of `G_n / √n`, `2 / (3 (1 − 2a)(2 − a) d) · I_d`.
pub fn cm_covariance(params: &ModelParams) -> Result<DMatrix<f64>> {
    require(params, Regime::Diffusive, "center-of-mass covariance")?;
    let a = params.alpha();
    let d = params.dim();
    let v = 2.0 / (3.0 * (1.0 - 2.0 * a) * (2.0 - a) * d as f64);
    Ok(DMatrix::identity(d, d) * v)
}

/// The `d × 2d` map sending colour counts to walk coordinates.
pub fn pairing_matrix(dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(dim, 2 * dim, |k, c| {
        if c == 2 * k {
            1.0
        } else if c == 2 * k + 1 {
            -1.0
        } else {
            0.0
        }
    })
}

/// `P M Pᵀ` for the pairing map `P`.
pub fn project_covariance(urn_cov: &DMatrix<f64>) -> DMatrix<f64> {
    let p = pairing_matrix(urn_cov.nrows() / 2);
    &p * urn_cov * p.transpose()
}

/// Exact finite-horizon mean `E[S_n]`.
///
/// The conditional drift of a step is `α S_n / n`, so
/// `E[S_n] = E[S_1] Π_{k<n} (1 + α/k)` with `E[S_1] = ((2dq − 1)/(2d − 1)) e`
/// along the designated direction `e`.
pub fn mean_position(params: &ModelParams, n: u64) -> Vec<f64> {
    let mut out = vec![0.0; params.dim()];
    if n == 0 {
        return out;
    }
    let alpha = params.alpha();
    let growth: f64 = (1..n).map(|k| (alpha / k as f64).ln_1p()).sum::<f64>().exp();
    let dir = params.designated();
    out[dir.axis()] = dir.sign() as f64 * first_step_drift(params) * growth;
    out
}

/// Exact `E[G_n]` with `G_n = (1/n) Σ_{k=1}^n S_k`.
pub fn mean_center_of_mass(params: &ModelParams, n: u64) -> Vec<f64> {
    let mut out = vec![0.0; params.dim()];
    if n == 0 {
        return out;
    }
    let alpha = params.alpha();
    let mut growth = 1.0;
    let mut total = 0.0;
    for k in 1..=n {
        total += growth;
        growth *= 1.0 + alpha / k as f64;
    }
    let dir = params.designated();
    out[dir.axis()] = dir.sign() as f64 * first_step_drift(params) * total / n as f64;
    out
}

fn first_step_drift(params: &ModelParams) -> f64 {
    let c = params.colours() as f64;
    (c * params.q() - 1.0) / (c - 1.0)
}

/// The limit covariance structure for a parameter set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovarianceSpec {
    pub regime: Regime,
    pub scaling: &'static str,
    #[serde(skip)]
    params: ModelParams,
    #[serde(serialize_with = "serialize_opt_matrix")]
    pub sigma_i: Option<DMatrix<f64>>,
}

fn serialize_opt_matrix<S: serde::Serializer>(
    m: &Option<DMatrix<f64>>,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    match m {
        Some(m) => serialize_matrix(m, serializer),
        None => serializer.serialize_none(),
    }
}

impl CovarianceSpec {
    pub fn new(params: &ModelParams) -> Result<Self> {
        match classify_regime(params).regime {
            Regime::Diffusive => Ok(Self {
                regime: Regime::Diffusive,
                scaling: "S_floor(t n) / sqrt(n)",
                params: *params,
                sigma_i: Some(sigma_i(params)?),
            }),
            Regime::Critical => Ok(Self {
                regime: Regime::Critical,
                scaling: "S_floor(n^t) / (sqrt(log n) n^(t/2))",
                params: *params,
                sigma_i: None,
            }),
            Regime::Superdiffusive => Err(Error::Domain(
                "superdiffusive limit is not Gaussian; no covariance kernel is available".into(),
            )),
        }
    }

    pub fn kernel(&self, s: f64, t: f64) -> Result<DMatrix<f64>> {
        match self.regime {
            Regime::Diffusive => diffusive_covariance(&self.params, s, t),
            _ => critical_covariance(&self.params, s, t),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::min_eigenvalue;

    fn exact(d: usize, p: &str) -> ModelParams {
        ModelParams::parse(d, p, "1/2").unwrap()
    }

    fn float(d: usize, p: f64) -> ModelParams {
        ModelParams::from_f64(d, p, 0.5).unwrap()
    }

    #[test]
    fn critical_parameter_values() {
        let r = classify_regime(&exact(1, "3/4"));
        assert_eq!(r.p_c_exact, "3/4");
        assert_eq!(r.regime, Regime::Critical);
        assert_eq!(r.alpha_exact.as_deref(), Some("1/2"));
        assert_eq!(classify_regime(&exact(2, "1/2")).p_c_exact, "5/8");
        assert_eq!(classify_regime(&exact(2, "1/2")).regime, Regime::Diffusive);
        let mut prev = 1.0;
        for d in 1..100 {
            let pc = classify_regime(&float(d, 0.3)).p_c;
            assert!(pc < prev && pc > 0.5);
            prev = pc;
        }
    }

    #[test]
    fn alpha_is_one_half_at_criticality() {
        for d in 1..50 {
            let pc = critical_memory_exact(d);
            let pr = ModelParams::new(d, crate::Probability::from_rational(pc), "1/2".parse().unwrap())
                .unwrap();
            assert_eq!(alpha_exact(&pr), Some(Rational64::new(1, 2)));
        }
    }

    #[test]
    fn float_band_classification() {
        let r = classify_regime(&float(2, 0.625));
        assert_eq!(r.regime, Regime::Critical);
        assert!(r.numerically_critical);
        assert_eq!(r.classification, Classification::FloatBand);
        assert_eq!(classify_regime(&float(2, 0.625 - 1e-9)).regime, Regime::Diffusive);
        assert_eq!(classify_regime(&float(2, 0.625 + 1e-9)).regime, Regime::Superdiffusive);
    }

    #[test]
    fn diffusive_kernel_examples() {
        let k = diffusive_covariance(&float(1, 0.5), 1.0, 1.0).unwrap();
        assert!((k[(0, 0)] - 1.0).abs() < 1e-15);
        let k = diffusive_covariance(&float(2, 0.5), 1.0, 1.0).unwrap();
        assert!((k[(0, 0)] - 1.5).abs() < 1e-15 && (k[(1, 1)] - 1.5).abs() < 1e-15);
        assert_eq!(k[(0, 1)], 0.0);
        let k = diffusive_covariance(&float(2, 0.5), 0.5, 1.0).unwrap();
        assert!((k[(0, 0)] - 0.75 * 2f64.powf(1.0 / 3.0)).abs() < 1e-14);
        assert_eq!(k, diffusive_covariance(&float(2, 0.5), 1.0, 0.5).unwrap());
        // s = t: exponent factor is one.
        let pr = float(3, 0.3);
        let c = diffusive_prefactor(&pr).unwrap();
        let k = diffusive_covariance(&pr, 0.4, 0.4).unwrap();
        assert!((k[(2, 2)] - c * 0.4).abs() < 1e-15);
    }

    #[test]
    fn diffusive_formulas_reject_other_regimes() {
        for p in ["3/4", "0.9"] {
            let pr = exact(1, p);
            let err = diffusive_covariance(&pr, 1.0, 1.0).unwrap_err();
            assert!(err.to_string().contains("p_c = 3/4"), "{err}");
            assert!(sigma_i(&pr).is_err());
            assert!(cm_covariance(&pr).is_err());
        }
        assert!(critical_covariance(&exact(1, "1/2"), 1.0, 1.0).is_err());
        assert!(diffusive_covariance(&exact(1, "1/2"), -1.0, 1.0).is_err());
    }

    #[test]
    fn sigma_i_examples() {
        let s = sigma_i(&float(1, 0.5)).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[0.25, -0.25, -0.25, 0.25]);
        assert!((s.clone() - expected).amax() < 1e-15);
        assert!((project_covariance(&s)[(0, 0)] - 1.0).abs() < 1e-15);
        for d in 1..=4 {
            for p in [0.1, 0.3, 0.5] {
                let s = sigma_i(&float(d, p)).unwrap();
                for row in s.row_iter() {
                    assert!(row.sum().abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn critical_kernel_examples() {
        let k = critical_covariance(&exact(1, "3/4"), 1.0, 1.0).unwrap();
        assert_eq!(k[(0, 0)], 1.0);
        let k = critical_covariance(&exact(3, "7/12"), 0.0, 1.0).unwrap();
        assert_eq!(k.amax(), 0.0);
        for d in 1..=4 {
            let pr = ModelParams::new(
                d,
                crate::Probability::from_rational(critical_memory_exact(d)),
                "1/2".parse().unwrap(),
            )
            .unwrap();
            let urn = urn_critical_covariance(&pr, 0.7, 0.9).unwrap();
            let walk = critical_covariance(&pr, 0.7, 0.9).unwrap();
            assert!((project_covariance(&urn) - walk).amax() < 1e-14);
        }
    }

    #[test]
    fn cm_covariance_examples() {
        assert!((cm_covariance(&float(1, 0.5)).unwrap()[(0, 0)] - 1.0 / 3.0).abs() < 1e-15);
        assert!((cm_covariance(&float(2, 0.5)).unwrap()[(1, 1)] - 0.6).abs() < 1e-14);
    }

    #[test]
    fn kernels_are_psd_on_grids() {
        let grid = [0.05, 0.1, 0.2, 0.35, 0.5, 0.7, 0.85, 1.0];
        let gram = |spec: &CovarianceSpec, d: usize| {
            let m = grid.len() * d;
            let mut g = DMatrix::zeros(m, m);
            for (i, &s) in grid.iter().enumerate() {
                for (j, &t) in grid.iter().enumerate() {
                    let k = spec.kernel(s, t).unwrap();
                    for a in 0..d {
                        for b in 0..d {
                            g[(i * d + a, j * d + b)] = k[(a, b)];
                        }
                    }
                }
            }
            g
        };
        for d in 1..=3 {
            for p in [0.1, 0.2, 0.5] {
                let spec = CovarianceSpec::new(&float(d, p)).unwrap();
                let g = gram(&spec, d);
                assert!(g.clone().cholesky().is_some());
                assert!(min_eigenvalue(&g) >= -1e-10);
            }
            let pc = critical_memory_exact(d);
            let pr = ModelParams::new(d, crate::Probability::from_rational(pc), "1/2".parse().unwrap())
                .unwrap();
            let g = gram(&CovarianceSpec::new(&pr).unwrap(), d);
            assert!(g.clone().cholesky().is_some());
        }
        assert!(CovarianceSpec::new(&float(1, 0.9)).is_err());
    }

    #[test]
    fn urn_kernel_projects_to_walk_kernel() {
        let times = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
        for d in 1..=3 {
            for p in [0.2, 0.5] {
                let pr = float(d, p);
                for &s in &times {
                    for &t in &times {
                        let urn = urn_diffusive_covariance(&pr, s, t).unwrap();
                        let walk = diffusive_covariance(&pr, s, t).unwrap();
                        assert!((project_covariance(&urn) - walk).amax() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn mean_position_recursion() {
        // Exact drift: E[S_{n+1}] = (1 + α/n) E[S_n].
        let pr = float(2, 0.5);
        let m1 = mean_position(&pr, 1);
        assert!((m1[0] - 1.0 / 3.0).abs() < 1e-15 && m1[1] == 0.0);
        let m2 = mean_position(&pr, 2);
        assert!((m2[0] - (1.0 / 3.0) * (4.0 / 3.0)).abs() < 1e-15);
        assert_eq!(mean_position(&float(1, 0.9), 1000)[0], 0.0);
        let g = mean_center_of_mass(&pr, 2);
        assert!((g[0] - (m1[0] + m2[0]) / 2.0).abs() < 1e-15);
    }
}
