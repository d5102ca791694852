//! Direct simulation of the elephant walk.
//!
//! Choosing a uniformly random past time and reading off its step is the
//! same as choosing a direction with probability proportional to how many
//! past steps went that way, so the state only keeps the `2d` direction
//! counts next to the position.

use rand::distr::{Bernoulli, Distribution};
use rand::Rng;
use serde::Serialize;

use crate::direction::StepDirection;
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Position `S_n` together with the per-direction step counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkState {
    n: u64,
    position: Vec<i64>,
    counts: Vec<u64>,
}

impl WalkState {
    /// The walk at time zero, sitting at the origin.
    pub fn new(dim: usize) -> Self {
        Self {
            n: 0,
            position: vec![0; dim],
            counts: vec![0; 2 * dim],
        }
    }

    /// Rebuild a state from direction counts (colour order).
    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() || !counts.len().is_multiple_of(2) {
            return Err(Error::Config(format!(
                "direction counts must have even positive length, got {}",
                counts.len()
            )));
        }
        let n = counts.iter().sum();
        let position = counts
            .chunks_exact(2)
            .map(|pair| pair[0] as i64 - pair[1] as i64)
            .collect();
        Ok(Self {
            n,
            position,
            counts,
        })
    }

    #[inline]
    pub fn apply(&mut self, dir: StepDirection) {
        self.counts[dir.colour()] += 1;
        self.position[dir.axis()] += dir.sign();
        self.n += 1;
    }

    #[inline]
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.position.len()
    }

    #[inline]
    pub fn position(&self) -> &[i64] {
        &self.position
    }

    #[inline]
    pub fn direction_counts(&self) -> &[u64] {
        &self.counts
    }
}

/// Pre-built sampling distributions for one parameter set.
#[derive(Debug, Clone)]
pub(crate) struct Stepper {
    colours: usize,
    designated: usize,
    repeat: Bernoulli,
    first: Bernoulli,
}

impl Stepper {
    pub(crate) fn new(params: &ModelParams) -> Self {
        Self {
            colours: params.colours(),
            designated: params.designated().colour(),
            // p and q are validated to lie in (0,1).
            repeat: Bernoulli::new(params.p()).expect("p in (0,1)"),
            first: Bernoulli::new(params.q()).expect("q in (0,1)"),
        }
    }

    /// Uniform colour among the `colours - 1` colours other than `excluded`.
    #[inline]
    fn other_than<R: Rng + ?Sized>(&self, excluded: usize, rng: &mut R) -> usize {
        if self.colours == 2 {
            return 1 - excluded;
        }
        let j = rng.random_range(0..self.colours - 1);
        if j >= excluded {
            j + 1
        } else {
            j
        }
    }

    #[inline]
    pub(crate) fn first<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if self.first.sample(rng) {
            self.designated
        } else {
            self.other_than(self.designated, rng)
        }
    }

    /// Next colour given the current counts; `n` must equal their sum and be positive.
    #[inline]
    pub(crate) fn next<R: Rng + ?Sized>(&self, counts: &[u64], n: u64, rng: &mut R) -> usize {
        let mut ticket = rng.random_range(0..n);
        let mut remembered = counts.len() - 1;
        for (c, &k) in counts.iter().enumerate() {
            if ticket < k {
                remembered = c;
                break;
            }
            ticket -= k;
        }
        if self.repeat.sample(rng) {
            remembered
        } else {
            self.other_than(remembered, rng)
        }
    }
}

/// Draws `σ_1`: the designated direction with probability `q`, every other
/// direction with probability `(1 − q)/(2d − 1)`.
pub fn sample_first_step<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> StepDirection {
    StepDirection::from_colour(Stepper::new(params).first(rng))
}

/// Draws `σ_{n+1}` for a walk that has already taken `n ≥ 1` steps.
pub fn sample_step<R: Rng + ?Sized>(
    state: &WalkState,
    params: &ModelParams,
    rng: &mut R,
) -> Result<StepDirection> {
    check_state(state, params)?;
    if state.n == 0 {
        return Err(Error::Precondition(
            "sample_step needs n >= 1; draw the first step with sample_first_step".into(),
        ));
    }
    let colour = Stepper::new(params).next(&state.counts, state.n, rng);
    Ok(StepDirection::from_colour(colour))
}

fn check_state(state: &WalkState, params: &ModelParams) -> Result<()> {
    if state.dim() != params.dim() {
        return Err(Error::Precondition(format!(
            "walk state has dimension {} but parameters have d = {}",
            state.dim(),
            params.dim()
        )));
    }
    Ok(())
}

/// Law of the next step given past direction counts, in colour order.
///
/// `P(τ) = Σ_σ (count_σ / n) · [p·1{τ = σ} + (1 − p)/(2d − 1)·1{τ ≠ σ}]`
pub fn next_step_law(counts: &[u64], p: f64) -> Result<Vec<f64>> {
    let colours = counts.len();
    if colours < 2 || !colours.is_multiple_of(2) {
        return Err(Error::Config("direction counts must have even length >= 2".into()));
    }
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Err(Error::Precondition("next-step law needs at least one past step".into()));
    }
    let other = (1.0 - p) / (colours - 1) as f64;
    let law = (0..colours)
        .map(|tau| {
            counts
                .iter()
                .enumerate()
                .map(|(sigma, &c)| {
                    let w = c as f64 / n as f64;
                    if sigma == tau {
                        w * p
                    } else {
                        w * other
                    }
                })
                .sum()
        })
        .collect();
    Ok(law)
}

/// Positions recorded at a list of times.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathSnapshot {
    pub times: Vec<u64>,
    pub positions: Vec<Vec<i64>>,
}

impl PathSnapshot {
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Checks ordering and nearest-neighbour reachability between snapshots.
    pub fn validate(&self) -> Result<()> {
        if self.times.len() != self.positions.len() {
            return Err(Error::Config("snapshot times and positions differ in length".into()));
        }
        let mut prev_t = 0u64;
        let mut prev_pos: Option<&Vec<i64>> = None;
        for (i, (&t, pos)) in self.times.iter().zip(&self.positions).enumerate() {
            if i > 0 && t <= prev_t {
                return Err(Error::Config("snapshot times must be strictly increasing".into()));
            }
            let reach = match prev_pos {
                Some(prev) => l1_distance(prev, pos) <= t - prev_t,
                None => pos.iter().map(|x| x.unsigned_abs()).sum::<u64>() <= t,
            };
            if !reach {
                return Err(Error::Config(format!("position at time {t} is not reachable")));
            }
            prev_t = t;
            prev_pos = Some(pos);
        }
        Ok(())
    }
}

fn l1_distance(a: &[i64], b: &[i64]) -> u64 {
    a.iter().zip(b).map(|(x, y)| (x - y).unsigned_abs()).sum()
}

pub(crate) fn check_snapshot_times(n_max: u64, times: &[u64]) -> Result<()> {
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("snapshot times must be strictly increasing".into()));
    }
    if let Some(&last) = times.last() {
        if last > n_max {
            return Err(Error::Precondition(format!(
                "snapshot time {last} exceeds the horizon {n_max}"
            )));
        }
    }
    Ok(())
}

/// Runs the walk up to `n_max` and records `S_t` at each requested time.
///
/// Time `0` records the origin. Memory use is `O(d)` regardless of `n_max`.
pub fn simulate_path<R: Rng + ?Sized>(
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
    let stepper = Stepper::new(params);
    let mut state = WalkState::new(params.dim());
    let mut pending = snapshot_times.iter().peekable();
    while pending.next_if_eq(&&0).is_some() {
        snap.positions.push(state.position.clone());
    }
    while state.n < last {
        let colour = if state.n == 0 {
            stepper.first(rng)
        } else {
            stepper.next(&state.counts, state.n, rng)
        };
        state.apply(StepDirection::from_colour(colour));
        if pending.next_if_eq(&&state.n).is_some() {
            snap.positions.push(state.position.clone());
        }
    }
    Ok(snap)
}
