use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use super::moments::Moments;
use super::rng::replica_rng;
use super::stats::covariance_se;
use super::Engine;
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::theory::{classify_regime, Regime};
use crate::urn::{project_counts, Replacement};
use crate::walk::Stepper;

/// Default cap on `replicas × horizon`.
pub const DEFAULT_STEP_BUDGET: u64 = 1_000_000_000;

/// Replicas per work item; fixed so the reduction order never depends on
/// the thread pool.
const CHUNK: usize = 64;

/// When snapshots are taken.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "values")]
pub enum Schedule {
    /// Times `⌊s n⌋` for fractions `s ∈ (0, 1]`.
    Fractions(Vec<f64>),
    /// Times `⌊n^t⌋` for exponents `t ∈ (0, 1]`.
    Exponents(Vec<f64>),
    /// Explicit times.
    Times(Vec<u64>),
}

/// How snapshot positions are rescaled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "exponent")]
pub enum Normalization {
    /// `S / √n`.
    Sqrt,
    /// `S_{⌊n^t⌋} / (√(log n) · n^{t/2})`; needs an exponent schedule.
    Critical,
    /// `S / n^β`.
    Power(f64),
    None,
}

impl Normalization {
    /// The regime's natural scaling.
    pub fn for_params(params: &ModelParams) -> Self {
        match classify_regime(params).regime {
            Regime::Diffusive => Normalization::Sqrt,
            Regime::Critical => Normalization::Critical,
            Regime::Superdiffusive => Normalization::Power(params.alpha()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleConfig {
    pub params: ModelParams,
    pub replicas: usize,
    pub master_seed: u64,
    pub horizon: u64,
    pub schedule: Schedule,
    pub normalization: Normalization,
    pub engine: Engine,
    pub step_budget: u64,
    /// Also accumulate `G_n = (1/n) Σ S_k`, normalized like time `n`.
    pub center_of_mass: bool,
    /// Keep every replica's normalized values.
    pub retain: bool,
}

impl EnsembleConfig {
    pub fn new(params: ModelParams, replicas: usize, master_seed: u64, horizon: u64) -> Self {
        Self {
            params,
            replicas,
            master_seed,
            horizon,
            schedule: Schedule::Fractions(vec![1.0]),
            normalization: Normalization::for_params(&params),
            engine: Engine::Walk,
            step_budget: DEFAULT_STEP_BUDGET,
            center_of_mass: false,
            retain: false,
        }
    }

    /// Snapshot times and their normalizers.
    pub fn plan(&self) -> Result<(Vec<u64>, Vec<f64>)> {
        let n = self.horizon;
        let nf = n as f64;
        let check_unit = |xs: &[f64], what: &str| -> Result<()> {
            if xs.iter().any(|&x| !(x > 0.0 && x <= 1.0)) {
                return Err(Error::Config(format!("{what} must lie in (0, 1]")));
            }
            if xs.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Config(format!("{what} must be strictly increasing")));
            }
            Ok(())
        };
        let (times, exponents): (Vec<u64>, Option<&[f64]>) = match &self.schedule {
            Schedule::Fractions(fr) => {
                check_unit(fr, "snapshot fractions")?;
                (fr.iter().map(|s| (s * nf).floor() as u64).collect(), None)
            }
            Schedule::Exponents(ex) => {
                check_unit(ex, "snapshot exponents")?;
                (ex.iter().map(|&t| floor_power(nf, t)).collect(), Some(ex))
            }
            Schedule::Times(ts) => {
                if ts.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Config("snapshot times must be strictly increasing".into()));
                }
                if ts.last().is_some_and(|&t| t > n) {
                    return Err(Error::Config("snapshot time beyond the horizon".into()));
                }
                (ts.clone(), None)
            }
        };
        let norms = match self.normalization {
            Normalization::Sqrt => vec![nf.sqrt(); times.len()],
            Normalization::Power(b) => vec![nf.powf(b); times.len()],
            Normalization::None => vec![1.0; times.len()],
            Normalization::Critical => {
                let ex = exponents.ok_or_else(|| {
                    Error::Config("critical normalization needs an exponent schedule".into())
                })?;
                if n < 2 {
                    return Err(Error::Config("critical normalization needs n >= 2".into()));
                }
                ex.iter().map(|t| (nf.ln() * nf.powf(*t)).sqrt()).collect()
            }
        };
        Ok((times, norms))
    }

    /// Normalizer applied to `G_n`.
    fn cm_norm(&self) -> f64 {
        let nf = self.horizon as f64;
        match self.normalization {
            Normalization::Sqrt => nf.sqrt(),
            Normalization::Power(b) => nf.powf(b),
            Normalization::None => 1.0,
            Normalization::Critical => (nf.ln() * nf).sqrt(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.replicas < 2 {
            return Err(Error::Config("an ensemble needs at least two replicas".into()));
        }
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be positive".into()));
        }
        let requested = self.replicas as u128 * self.horizon as u128;
        if requested > self.step_budget as u128 {
            return Err(Error::BudgetExceeded {
                requested,
                budget: self.step_budget,
            });
        }
        Ok(())
    }
}

/// `⌊n^t⌋`, snapping values within rounding of an integer.
fn floor_power(n: f64, t: f64) -> u64 {
    let x = n.powf(t);
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.max(1.0) {
        r as u64
    } else {
        x.floor() as u64
    }
}

/// Moments of the normalized snapshots across replicas.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub dim: usize,
    pub replicas: u64,
    pub snapshot_times: Vec<u64>,
    pub normalizers: Vec<f64>,
    /// `[snapshot][axis]`.
    pub mean: Vec<Vec<f64>>,
    pub mean_se: Vec<Vec<f64>>,
    pub center_of_mass_mean: Option<Vec<f64>>,
    /// Covariance over all channels: snapshot-major, then the centre of mass.
    #[serde(skip)]
    pub channel_covariance: DMatrix<f64>,
    /// `[replica][channel]`, present when retained.
    #[serde(skip)]
    pub values: Option<Vec<Vec<f64>>>,
}

impl EnsembleSummary {
    fn channel(&self, snapshot: usize, axis: usize) -> usize {
        snapshot * self.dim + axis
    }

    fn cm_channel(&self, axis: usize) -> usize {
        self.snapshot_times.len() * self.dim + axis
    }

    /// `d × d` matrix with entries `Cov(X_i^a, X_j^b)`.
    pub fn cross_covariance(&self, i: usize, j: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |a, b| {
            self.channel_covariance[(self.channel(i, a), self.channel(j, b))]
        })
    }

    pub fn center_of_mass_covariance(&self) -> Option<DMatrix<f64>> {
        self.center_of_mass_mean.as_ref()?;
        Some(DMatrix::from_fn(self.dim, self.dim, |a, b| {
            self.channel_covariance[(self.cm_channel(a), self.cm_channel(b))]
        }))
    }

    /// Normal-theory SE of `Cov(X_i^a, X_j^b)`.
    pub fn covariance_se(&self, (i, a): (usize, usize), (j, b): (usize, usize)) -> f64 {
        let (ci, cj) = (self.channel(i, a), self.channel(j, b));
        self.channel_se(ci, cj)
    }

    pub fn center_of_mass_covariance_se(&self, a: usize, b: usize) -> f64 {
        self.channel_se(self.cm_channel(a), self.cm_channel(b))
    }

    fn channel_se(&self, ci: usize, cj: usize) -> f64 {
        let c = &self.channel_covariance;
        covariance_se(c[(ci, ci)], c[(cj, cj)], c[(ci, cj)], self.replicas)
    }

    /// Normalized position of one replica at one snapshot.
    pub fn replica_position(&self, replica: usize, snapshot: usize) -> Option<&[f64]> {
        let row = self.values.as_ref()?.get(replica)?;
        let start = self.channel(snapshot, 0);
        Some(&row[start..start + self.dim])
    }

    pub fn replica_center_of_mass(&self, replica: usize) -> Option<&[f64]> {
        self.center_of_mass_mean.as_ref()?;
        let row = self.values.as_ref()?.get(replica)?;
        let start = self.cm_channel(0);
        Some(&row[start..start + self.dim])
    }
}

enum Sampler {
    Walk(Stepper),
    Urn(Replacement),
}

struct Plan<'a> {
    dim: usize,
    horizon: u64,
    times: &'a [u64],
    norms: &'a [f64],
    cm_norm: Option<f64>,
}

impl Plan<'_> {
    fn channels(&self) -> usize {
        self.dim * (self.times.len() + usize::from(self.cm_norm.is_some()))
    }
}

fn run_replica(sampler: &Sampler, plan: &Plan<'_>, seed: u64, replica: u64, out: &mut Vec<f64>) {
    let mut rng = replica_rng(seed, replica);
    let d = plan.dim;
    let mut counts = vec![0u64; 2 * d];
    let mut position = vec![0i64; d];
    let mut cm_sum = vec![0i128; d];
    let track_cm = plan.cm_norm.is_some();
    out.clear();
    let mut next = 0usize;
    let record = |n: u64, pos: &[i64], out: &mut Vec<f64>, next: &mut usize| {
        while *next < plan.times.len() && plan.times[*next] == n {
            let norm = plan.norms[*next];
            out.extend(pos.iter().map(|&x| x as f64 / norm));
            *next += 1;
        }
    };
    record(0, &position, out, &mut next);
    match sampler {
        Sampler::Walk(stepper) => {
            for n in 0..plan.horizon {
                let colour = if n == 0 {
                    stepper.first(&mut rng)
                } else {
                    stepper.next(&counts, n, &mut rng)
                };
                counts[colour] += 1;
                position[colour / 2] += if colour % 2 == 0 { 1 } else { -1 };
                if track_cm {
                    for (acc, &x) in cm_sum.iter_mut().zip(&position) {
                        *acc += x as i128;
                    }
                }
                record(n + 1, &position, out, &mut next);
            }
        }
        Sampler::Urn(law) => {
            for n in 0..plan.horizon {
                let colour = if n == 0 {
                    law.initial_colour(&mut rng)
                } else {
                    law.added_colour(&counts, n, &mut rng)
                };
                counts[colour] += 1;
                let needs_position = track_cm
                    || (next < plan.times.len() && plan.times[next] == n + 1);
                if needs_position {
                    position = project_counts(&counts);
                    if track_cm {
                        for (acc, &x) in cm_sum.iter_mut().zip(&position) {
                            *acc += x as i128;
                        }
                    }
                    record(n + 1, &position, out, &mut next);
                }
            }
        }
    }
    if let Some(norm) = plan.cm_norm {
        let n = plan.horizon as f64;
        out.extend(cm_sum.iter().map(|&s| s as f64 / n / norm));
    }
}

/// Runs `R` independent replicas on substreams of the master seed.
///
/// Chunks of replicas run in parallel and their moments merge in replica
/// order, so the summary is bit-identical for any thread count.
pub fn run_ensemble(cfg: &EnsembleConfig) -> Result<EnsembleSummary> {
    cfg.validate()?;
    let (times, norms) = cfg.plan()?;
    let plan = Plan {
        dim: cfg.params.dim(),
        horizon: cfg.horizon,
        times: &times,
        norms: &norms,
        cm_norm: cfg.center_of_mass.then(|| cfg.cm_norm()),
    };
    let sampler = match cfg.engine {
        Engine::Walk => Sampler::Walk(Stepper::new(&cfg.params)),
        Engine::Urn => Sampler::Urn(Replacement::new(&cfg.params)),
    };
    let channels = plan.channels();
    let chunks = cfg.replicas.div_ceil(CHUNK);
    let partials: Vec<(Moments, Vec<Vec<f64>>)> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut moments = Moments::new(channels);
            let mut kept = Vec::new();
            let mut buf = Vec::with_capacity(channels);
            let end = ((chunk + 1) * CHUNK).min(cfg.replicas);
            for replica in chunk * CHUNK..end {
                run_replica(&sampler, &plan, cfg.master_seed, replica as u64, &mut buf);
                moments.push(&buf);
                if cfg.retain {
                    kept.push(buf.clone());
                }
            }
            (moments, kept)
        })
        .collect();

    let mut total = Moments::new(channels);
    let mut values = cfg.retain.then(|| Vec::with_capacity(cfg.replicas));
    for (m, kept) in partials {
        total.merge(&m);
        if let Some(v) = values.as_mut() {
            v.extend(kept);
        }
    }

    let d = plan.dim;
    let cov = total.covariance();
    let mean: &DVector<f64> = total.mean();
    let r = total.count() as f64;
    let m = times.len();
    let per_snapshot = |k: usize, f: &dyn Fn(usize) -> f64| -> Vec<f64> { (0..d).map(|a| f(k * d + a)).collect() };
    Ok(EnsembleSummary {
        dim: d,
        replicas: total.count(),
        snapshot_times: times.clone(),
        normalizers: norms.clone(),
        mean: (0..m).map(|k| per_snapshot(k, &|c| mean[c])).collect(),
        mean_se: (0..m)
            .map(|k| per_snapshot(k, &|c| (cov[(c, c)] / r).sqrt()))
            .collect(),
        center_of_mass_mean: cfg
            .center_of_mass
            .then(|| per_snapshot(m, &|c| mean[c])),
        channel_covariance: cov,
        values,
    })
}
