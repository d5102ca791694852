mod common;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

use merw::montecarlo::stats::chi_square_gof;
use merw::montecarlo::{
    exact_small_n_pmf, replica_rng, run_ensemble, Engine, EnsembleConfig, Schedule,
};
use merw::theory::{cm_covariance, diffusive_covariance, mean_position, CovarianceSpec};
use merw::urn::simulate_urn_path;
use merw::walk::simulate_path;
use merw::{ModelParams, Probability, StepDirection};

use common::*;

#[test]
fn enumeration_matches_history_brute_force() {
    let cases = [(1, 5), (2, 3), (3, 2)];
    for (d, n_max) in cases {
        for (p, q) in [((1, 4), (1, 2)), ((2, 3), (7, 10)), ((9, 10), (1, 3))] {
            for designated in [StepDirection::positive(0), StepDirection::negative(d - 1)] {
                let params = ModelParams::new(
                    d,
                    Probability::from_ratio(p.0, p.1).unwrap(),
                    Probability::from_ratio(q.0, q.1).unwrap(),
                )
                .unwrap()
                .with_designated(designated)
                .unwrap();
                for n in 1..=n_max {
                    let oracle = brute_force_walk_pmf(d, &rat(p.0, p.1), &rat(q.0, q.1), designated.colour(), n);
                    let walk = exact_small_n_pmf(&params, n as u64, Engine::Walk).unwrap();
                    let urn = exact_small_n_pmf(&params, n as u64, Engine::Urn).unwrap();
                    assert_eq!(walk, oracle, "walk d={d} n={n} p={p:?} q={q:?}");
                    assert_eq!(urn, oracle, "urn d={d} n={n} p={p:?} q={q:?}");
                }
            }
        }
    }
}

#[test]
fn exact_mean_matches_drift_formula() {
    for (d, n) in [(1, 6), (2, 4), (3, 3)] {
        let params = ModelParams::parse(d, "3/5", "4/5").unwrap();
        let pmf = exact_small_n_pmf(&params, n, Engine::Walk).unwrap();
        let drift = mean_position(&params, n);
        for a in 0..d {
            let m: BigRational = pmf
                .iter()
                .map(|(x, pr)| pr * BigRational::from_integer(x[a].into()))
                .fold(BigRational::zero(), |acc, v| acc + v);
            assert!((m.to_f64().unwrap() - drift[a]).abs() < 1e-12, "d={d} axis {a}");
        }
    }
}

#[test]
fn center_of_mass_variance_is_double_integral_of_kernel() {
    for (d, p) in [(1, 0.5), (1, 0.1), (2, 0.5), (3, 0.55), (4, 0.2)] {
        let params = ModelParams::from_f64(d, p, 0.5).unwrap();
        let closed = cm_covariance(&params).unwrap()[(0, 0)];
        let quad = double_integral_lower_triangle(
            |s, t| diffusive_covariance(&params, s, t).unwrap()[(0, 0)],
            200,
        );
        assert!(((quad - closed) / closed).abs() < 1e-6, "d={d} p={p}: {quad} vs {closed}");
    }
}

fn sampled_law_fits(engine: Engine, seed: u64) {
    let params = ModelParams::parse(1, "2/3", "7/10").unwrap();
    let n = 4u64;
    let pmf = exact_small_n_pmf(&params, n, Engine::Walk).unwrap();
    let support: Vec<i64> = (-(n as i64)..=n as i64).step_by(2).collect();
    let probs: Vec<f64> = support
        .iter()
        .map(|&x| pmf.get(&vec![x]).map_or(0.0, |p| p.to_f64().unwrap()))
        .collect();
    let mut observed = vec![0u64; support.len()];
    for r in 0..100_000u64 {
        let mut rng = replica_rng(seed, r);
        let snap = match engine {
            Engine::Walk => simulate_path(&params, n, &[n], &mut rng),
            Engine::Urn => simulate_urn_path(&params, n, &[n], &mut rng),
        }
        .unwrap();
        let x = snap.positions[0][0];
        observed[support.iter().position(|&s| s == x).unwrap()] += 1;
    }
    let fit = chi_square_gof(&observed, &probs).unwrap();
    assert!(fit.p_value > 1e-3, "{engine}: {fit:?}");
}

#[test]
fn sampled_walk_law_matches_exact_pmf() {
    sampled_law_fits(Engine::Walk, 2024);
}

#[test]
fn sampled_urn_law_matches_exact_pmf() {
    sampled_law_fits(Engine::Urn, 2025);
}

#[test]
fn engines_agree_on_ensemble_moments() {
    let params = ModelParams::parse(2, "0.3", "1/2").unwrap();
    let run = |engine| {
        let mut cfg = EnsembleConfig::new(params, 4_000, 99, 400);
        cfg.schedule = Schedule::Fractions(vec![0.5, 1.0]);
        cfg.engine = engine;
        run_ensemble(&cfg).unwrap()
    };
    let (w, u) = (run(Engine::Walk), run(Engine::Urn));
    for i in 0..2 {
        let (cw, cu) = (w.cross_covariance(i, i), u.cross_covariance(i, i));
        for a in 0..2 {
            let se = w.covariance_se((i, a), (i, a)).hypot(u.covariance_se((i, a), (i, a)));
            assert!((cw[(a, a)] - cu[(a, a)]).abs() < 4.0 * se, "snapshot {i} axis {a}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn simulated_paths_respect_lattice_constraints(
        d in 1usize..5, p in 0.01f64..0.99, q in 0.01f64..0.99, seed: u64, urn: bool,
    ) {
        let params = ModelParams::from_f64(d, p, q).unwrap();
        let times = [1u64, 2, 7, 30];
        let mut rng = replica_rng(seed, 0);
        let snap = if urn {
            simulate_urn_path(&params, 30, &times, &mut rng)
        } else {
            simulate_path(&params, 30, &times, &mut rng)
        }
        .unwrap();
        for (t, x) in snap.times.iter().zip(&snap.positions) {
            let l1: i64 = x.iter().map(|v| v.abs()).sum();
            prop_assert!(l1 <= *t as i64);
            prop_assert_eq!((l1 - *t as i64).rem_euclid(2), 0);
        }
    }

    #[test]
    fn exact_pmf_is_a_symmetric_probability_law_for_half_q(
        d in 1usize..3, num in 1i64..20, n in 1u64..4,
    ) {
        let params = ModelParams::new(d, Probability::from_ratio(num, 20).unwrap(), Probability::from_ratio(1, 2).unwrap())
            .unwrap();
        let pmf = exact_small_n_pmf(&params, n, Engine::Walk).unwrap();
        let total = pmf.values().fold(BigRational::zero(), |a, v| a + v);
        prop_assert_eq!(total, rat(1, 1));
        // q = 1/2 only matters for the designated direction; the law on the
        // other axes is sign symmetric regardless.
        if d == 2 {
            for (x, pr) in &pmf {
                let mirrored = vec![x[0], -x[1]];
                prop_assert_eq!(pmf.get(&mirrored), Some(pr));
            }
        }
    }

    #[test]
    fn rational_input_round_trips(num in 1i64..1000, extra in 1i64..1000) {
        let den = num + extra;
        let p: Probability = format!("{num}/{den}").parse().unwrap();
        let exact = p.exact().unwrap();
        prop_assert_eq!(*exact.numer() * den, num * *exact.denom());
        prop_assert!((p.value() - num as f64 / den as f64).abs() < 1e-15);
    }

    #[test]
    fn limit_kernels_are_symmetric_and_psd(d in 1usize..5, p in 0.01f64..0.99) {
        let params = ModelParams::from_f64(d, p, 0.5).unwrap();
        let spec = match CovarianceSpec::new(&params) {
            Ok(s) => s,
            Err(_) => return Ok(()),
        };
        let grid = [0.1, 0.35, 0.6, 1.0];
        let m = grid.len();
        let mut gram = nalgebra::DMatrix::zeros(m, m);
        for (i, &s) in grid.iter().enumerate() {
            for (j, &t) in grid.iter().enumerate() {
                let k = spec.kernel(s, t).unwrap();
                prop_assert_eq!(k.clone(), spec.kernel(t, s).unwrap());
                gram[(i, j)] = k[(0, 0)];
            }
        }
        let min = gram.symmetric_eigen().eigenvalues.min();
        prop_assert!(min > -1e-10, "min eigenvalue {}", min);
    }
}

#[test]
fn verdicts_agree_across_engines() {
    use merw::montecarlo::{
        verify_center_of_mass, verify_diffusive_clt, verify_superdiffusive, CenterOfMassConfig, CltConfig,
        RunConfig, SuperdiffusiveConfig,
    };
    let run = |d, p: &str, r, seed, engine| {
        let mut cfg = RunConfig::new(ModelParams::parse(d, p, "1/2").unwrap(), r, seed);
        cfg.engine = engine;
        cfg
    };
    for (engine, seed) in [(Engine::Walk, 5), (Engine::Urn, 6)] {
        let clt = verify_diffusive_clt(&CltConfig::new(run(2, "1/2", 2_000, seed, engine), 2_000)).unwrap();
        let cm = verify_center_of_mass(&CenterOfMassConfig { run: run(1, "1/2", 2_000, seed, engine), horizon: 2_000 }).unwrap();
        let sup = verify_superdiffusive(&SuperdiffusiveConfig::new(run(1, "0.9", 300, seed, engine), 200, 5)).unwrap();
        for r in [&clt, &cm, &sup] {
            let failed: Vec<_> = r.checks.iter().filter(|c| c.gating && !c.passed).map(|c| &c.name).collect();
            assert!(r.passed(), "{engine} {:?}: {failed:?}", r.theorem);
        }
    }
}
