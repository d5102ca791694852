//! Exact laws at small `n` by exhaustive enumeration in rational arithmetic.
//!
//! The walk is enumerated over full step histories (every remembered time,
//! every repeat-or-switch outcome); the urn over colour compositions. The
//! two routes share nothing but the model parameters.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::Engine;
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::urn::project_counts;

/// Lattice point → exact probability.
pub type ExactPmf = BTreeMap<Vec<i64>, BigRational>;

/// Largest `n` enumerated without an explicit budget.
pub fn default_enumeration_max_n(dim: usize) -> u64 {
    match dim {
        1 => 6,
        2 => 4,
        _ => 3,
    }
}

struct Weights {
    colours: usize,
    designated: usize,
    p: BigRational,
    switch: BigRational,
    q: BigRational,
    q_rest: BigRational,
}

impl Weights {
    fn new(params: &ModelParams) -> Self {
        let colours = params.colours();
        let others = BigRational::from_integer(BigInt::from(colours - 1));
        let one = BigRational::one();
        let p = params.memory().to_big_rational();
        let q = params.first_step().to_big_rational();
        Self {
            colours,
            designated: params.designated().colour(),
            switch: (&one - &p) / &others,
            q_rest: (&one - &q) / &others,
            p,
            q,
        }
    }

    fn first(&self, colour: usize) -> &BigRational {
        if colour == self.designated {
            &self.q
        } else {
            &self.q_rest
        }
    }

    fn follow(&self, remembered: usize, next: usize) -> &BigRational {
        if remembered == next {
            &self.p
        } else {
            &self.switch
        }
    }
}

fn check_budget(params: &ModelParams, n: u64, max_n: u64) -> Result<()> {
    if n > max_n {
        return Err(Error::EnumerationBudget {
            n,
            dim: params.dim(),
            max_n,
        });
    }
    Ok(())
}

/// Exact law of `S_n` (walk) or of the projected urn composition (urn).
pub fn exact_small_n_pmf(params: &ModelParams, n: u64, engine: Engine) -> Result<ExactPmf> {
    exact_small_n_pmf_with_budget(params, n, engine, default_enumeration_max_n(params.dim()))
}

pub fn exact_small_n_pmf_with_budget(
    params: &ModelParams,
    n: u64,
    engine: Engine,
    max_n: u64,
) -> Result<ExactPmf> {
    check_budget(params, n, max_n)?;
    match engine {
        Engine::Walk => Ok(walk_histories(params, n)),
        Engine::Urn => {
            let mut pmf = ExactPmf::new();
            for (counts, pr) in urn_compositions(params, n) {
                *pmf.entry(project_counts(&counts)).or_insert_with(BigRational::zero) += pr;
            }
            Ok(pmf)
        }
    }
}

/// Exact law of the urn composition `X_n`.
pub fn exact_urn_composition_pmf(
    params: &ModelParams,
    n: u64,
) -> Result<BTreeMap<Vec<u64>, BigRational>> {
    check_budget(params, n, default_enumeration_max_n(params.dim()))?;
    Ok(urn_compositions(params, n))
}

fn walk_histories(params: &ModelParams, n: u64) -> ExactPmf {
    let w = Weights::new(params);
    let mut pmf = ExactPmf::new();
    if n == 0 {
        pmf.insert(vec![0; params.dim()], BigRational::one());
        return pmf;
    }
    let mut history = Vec::with_capacity(n as usize);
    for first in 0..w.colours {
        history.push(first);
        extend_history(&w, n as usize, &mut history, w.first(first).clone(), &mut pmf);
        history.pop();
    }
    pmf
}

fn extend_history(
    w: &Weights,
    n: usize,
    history: &mut Vec<usize>,
    prob: BigRational,
    pmf: &mut ExactPmf,
) {
    if history.len() == n {
        let mut pos = vec![0i64; w.colours / 2];
        for &c in history.iter() {
            pos[c / 2] += if c % 2 == 0 { 1 } else { -1 };
        }
        *pmf.entry(pos).or_insert_with(BigRational::zero) += prob;
        return;
    }
    let m = history.len();
    let uniform = BigRational::new(BigInt::one(), BigInt::from(m));
    for remembered_time in 0..m {
        let remembered = history[remembered_time];
        for next in 0..w.colours {
            let branch = &prob * &uniform * w.follow(remembered, next);
            history.push(next);
            extend_history(w, n, history, branch, pmf);
            history.pop();
        }
    }
}

fn urn_compositions(params: &ModelParams, n: u64) -> BTreeMap<Vec<u64>, BigRational> {
    let w = Weights::new(params);
    let mut layer: BTreeMap<Vec<u64>, BigRational> = BTreeMap::new();
    if n == 0 {
        layer.insert(vec![0; w.colours], BigRational::one());
        return layer;
    }
    for c in 0..w.colours {
        let mut counts = vec![0; w.colours];
        counts[c] = 1;
        layer.insert(counts, w.first(c).clone());
    }
    for m in 1..n {
        let total = BigInt::from(m);
        let mut next: BTreeMap<Vec<u64>, BigRational> = BTreeMap::new();
        for (counts, pr) in &layer {
            for (drawn, &k) in counts.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let draw = pr * BigRational::new(BigInt::from(k), total.clone());
                for added in 0..w.colours {
                    let mut after = counts.clone();
                    after[added] += 1;
                    let branch = &draw * w.follow(drawn, added);
                    *next.entry(after).or_insert_with(BigRational::zero) += branch;
                }
            }
        }
        layer = next;
    }
    layer
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn two_step_law_d1() {
        let pr = ModelParams::parse(1, "0.75", "0.5").unwrap();
        let pmf = exact_small_n_pmf(&pr, 2, Engine::Walk).unwrap();
        assert_eq!(pmf.len(), 3);
        assert_eq!(pmf[&vec![2]], rat(3, 8));
        assert_eq!(pmf[&vec![0]], rat(1, 4));
        assert_eq!(pmf[&vec![-2]], rat(3, 8));
    }

    #[test]
    fn first_step_law() {
        let pr = ModelParams::parse(2, "1/4", "0.7").unwrap();
        let pmf = exact_small_n_pmf(&pr, 1, Engine::Walk).unwrap();
        assert_eq!(pmf[&vec![1, 0]], rat(7, 10));
        assert_eq!(pmf[&vec![-1, 0]], rat(1, 10));
        assert_eq!(pmf[&vec![0, 1]], rat(1, 10));
        assert_eq!(pmf[&vec![0, -1]], rat(1, 10));
        assert_eq!(pmf, exact_small_n_pmf(&pr, 1, Engine::Urn).unwrap());
    }

    #[test]
    fn sums_to_one_and_symmetric() {
        for p in ["1/4", "1/2", "3/4"] {
            let pr = ModelParams::parse(1, p, "1/2").unwrap();
            for n in 0..=6 {
                let pmf = exact_small_n_pmf(&pr, n, Engine::Walk).unwrap();
                let total: BigRational = pmf.values().cloned().sum();
                assert!(total.is_one());
                for (x, pr) in &pmf {
                    assert_eq!(&pmf[&vec![-x[0]]], pr);
                }
            }
        }
    }

    #[test]
    fn urn_compositions_sum_to_one() {
        let pr = ModelParams::parse(2, "1/2", "0.7").unwrap();
        let pmf = exact_urn_composition_pmf(&pr, 4).unwrap();
        let total: BigRational = pmf.values().cloned().sum();
        assert!(total.is_one());
        assert!(pmf.keys().all(|c| c.iter().sum::<u64>() == 4));
    }

    #[test]
    fn budget_is_enforced() {
        let pr = ModelParams::parse(2, "1/2", "1/2").unwrap();
        assert!(matches!(
            exact_small_n_pmf(&pr, 5, Engine::Walk),
            Err(Error::EnumerationBudget { max_n: 4, .. })
        ));
        assert!(exact_small_n_pmf_with_budget(&pr, 5, Engine::Urn, 5).is_ok());
    }
}
