//! Monte Carlo against the closed forms and against itself: moment checks
//! for the samplers, oracle agreement for the dephasing curves, substep
//! robustness for the filtered processes, and schedule-independence of the
//! parallel reduction.

use dephasim::analytic::{d_ou, d_rtn, d_y};
use dephasim::{
    sample, simulate_curve, DephasingCurve, NoiseSpec, TimeGrid,
};

/// Fraction of grid points where |MC - oracle| ≤ k standard errors.
fn coverage(curve: &DephasingCurve, oracle: impl Fn(f64) -> f64, k: f64) -> f64 {
    let times = curve.grid().times();
    let se = curve.std_err().expect("MC curve carries standard errors");
    let n = times.len();
    let hits = times
        .iter()
        .zip(curve.d_values())
        .zip(se)
        .filter(|((&t, &d), &s)| (d - oracle(t)).abs() <= k * s.max(1e-12))
        .count();
    hits as f64 / n as f64
}

#[test]
fn ou_curve_matches_the_closed_form() {
    let spec = NoiseSpec::Ou {
        gamma: 0.1,
        sigma: 0.63,
    };
    let grid = TimeGrid::new(2.5, 51, 4).unwrap();
    let curve = simulate_curve(&spec, &grid, 1.0, 20_000, 20_202).unwrap();
    let c = coverage(&curve, |t| d_ou(t, 0.1, 0.63, 1.0).unwrap(), 4.0);
    assert!(c >= 0.98, "4-sigma coverage only {c}");
}

#[test]
fn rtn_curve_matches_the_closed_form() {
    let spec = NoiseSpec::Rtn { gamma: 0.1 };
    let grid = TimeGrid::new(20.0, 101, 1).unwrap();
    let curve = simulate_curve(&spec, &grid, 1.0, 20_000, 77).unwrap();
    let c = coverage(&curve, |t| d_rtn(t, 0.1, 1.0).unwrap(), 4.0);
    assert!(c >= 0.98, "4-sigma coverage only {c}");
}

#[test]
fn y_curve_matches_the_closed_form() {
    let spec = NoiseSpec::FilteredOu {
        gamma: 0.1,
        sigma: 0.63,
        kappa: 1.0,
    };
    let grid = TimeGrid::new(10.0, 51, 16).unwrap();
    let curve = simulate_curve(&spec, &grid, 1.0, 10_000, 4242).unwrap();
    let c = coverage(&curve, |t| d_y(t, 0.1, 0.63, 1.0, 1.0).unwrap(), 4.0);
    assert!(c >= 0.98, "4-sigma coverage only {c}");
}

#[test]
fn ou_sampler_reproduces_stationary_moments() {
    let (gamma, sigma) = (0.5, 0.8);
    let grid = TimeGrid::new(60.0, 601, 1).unwrap();
    let n = 4000;
    let e = sample(&NoiseSpec::Ou { gamma, sigma }, &grid, 11, n).unwrap();
    // variance at late times (individual points are past ~15 relaxation
    // times, so X(0) = 0 is forgotten)
    let k_late = 500;
    let vals: Vec<f64> = (0..n).map(|i| e.row(i)[k_late]).collect();
    let var = vals.iter().map(|x| x * x).sum::<f64>() / n as f64;
    let target = sigma * sigma / (2.0 * gamma);
    let se_var = target * (2.0 / n as f64).sqrt();
    assert!(
        (var - target).abs() < 3.0 * se_var,
        "variance {var} vs {target} (se {se_var})"
    );
    // lagged correlation over 10 output steps = e^{-γ·1}
    let lag = 10;
    let mut num = 0.0;
    for i in 0..n {
        num += e.row(i)[k_late] * e.row(i)[k_late - lag];
    }
    let rho = num / n as f64 / target;
    let target_rho = (-gamma * 1.0f64).exp();
    assert!(
        (rho - target_rho).abs() < 4.0 / (n as f64).sqrt(),
        "lag correlation {rho} vs {target_rho}"
    );
    // fourth moment of a Gaussian: 3·var²
    let m4 = vals.iter().map(|x| x.powi(4)).sum::<f64>() / n as f64;
    let kurt = m4 / (var * var);
    assert!((kurt - 3.0).abs() < 0.4, "kurtosis {kurt}");
}

#[test]
fn telegraph_switch_count_matches_the_rate() {
    let gamma = 0.3;
    let grid = TimeGrid::new(50.0, 5001, 1).unwrap();
    let n = 400;
    let e = sample(&NoiseSpec::Rtn { gamma }, &grid, 1234, n).unwrap();
    let mut switches = 0usize;
    let mut plus = 0usize;
    for i in 0..n {
        let row = e.row(i);
        switches += row.windows(2).filter(|w| w[0] != w[1]).count();
        plus += row.iter().filter(|&&v| v > 0.0).count();
    }
    let mean_switches = switches as f64 / n as f64;
    let expected = gamma * 50.0;
    // per-path count is Poisson(γT) minus a tiny double-flip deficit
    let se = (expected / n as f64).sqrt();
    assert!(
        (mean_switches - expected).abs() < 4.0 * se + 0.1,
        "switches {mean_switches} vs {expected}"
    );
    // occupation of +1 is a half by symmetry
    let frac = plus as f64 / (n * 5001) as f64;
    assert!((frac - 0.5).abs() < 0.05, "occupation {frac}");
}

#[test]
fn frozen_telegraph_integrates_to_a_straight_line() {
    let grid = TimeGrid::new(8.0, 33, 3).unwrap();
    let e = sample(&NoiseSpec::Rtn { gamma: 0.0 }, &grid, 99, 32).unwrap();
    let integrated = dephasim::integrate_paths(&e).unwrap();
    for i in 0..e.n() {
        let sign = e.row(i)[0];
        for (k, &t) in grid.times().iter().enumerate() {
            let got = integrated.row(i)[k];
            assert!(
                (got - sign * t).abs() < 1e-12,
                "path {i} at t={t}: {got} vs {}",
                sign * t
            );
        }
    }
}

#[test]
fn substep_refinement_is_within_monte_carlo_noise() {
    // the filtered update is O(h)-biased; at these substep counts the bias
    // change must already be smaller than the statistical error
    let spec = NoiseSpec::FilteredOu {
        gamma: 0.1,
        sigma: 0.63,
        kappa: 1.0,
    };
    let n = 2000;
    let coarse = simulate_curve(
        &spec,
        &TimeGrid::new(10.0, 51, 16).unwrap(),
        1.0,
        n,
        31_415,
    )
    .unwrap();
    let fine = simulate_curve(
        &spec,
        &TimeGrid::new(10.0, 51, 32).unwrap(),
        1.0,
        n,
        31_415,
    )
    .unwrap();
    let se_c = coarse.std_err().unwrap();
    let se_f = fine.std_err().unwrap();
    let mut worst = 0.0f64;
    for k in 1..51 {
        let diff = (coarse.d_values()[k] - fine.d_values()[k]).abs();
        let se = se_c[k].hypot(se_f[k]).max(1e-12);
        worst = worst.max(diff / se);
    }
    // the two runs share no RNG structure at the substep level, so the
    // difference is two independent MC errors wide; 4 combined se is ample
    assert!(worst < 4.0, "worst substep-refinement gap: {worst} se");
}

#[test]
fn results_are_identical_for_any_thread_pool_size() {
    let spec = NoiseSpec::FilteredRtn {
        gamma: 0.1,
        mu: 0.5,
    };
    let grid = TimeGrid::new(20.0, 101, 8).unwrap();
    let run = || {
        let e = sample(&spec, &grid, 777, 600).unwrap();
        let curve = simulate_curve(&spec, &grid, 1.0, 600, 777).unwrap();
        let spectrum =
            dephasim::periodogram(&e, 2.0, dephasim::Window::Rectangular).unwrap();
        (
            e.values().to_vec(),
            curve.d_values().to_vec(),
            curve.std_err().unwrap().to_vec(),
            spectrum.s_values().to_vec(),
        )
    };
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(run);
    let quad = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(run);
    assert_eq!(single.0, quad.0);
    assert_eq!(single.1, quad.1);
    assert_eq!(single.2, quad.2);
    assert_eq!(single.3, quad.3);
}

#[test]
fn growing_the_ensemble_keeps_early_paths_and_tightens_errors() {
    let spec = NoiseSpec::Ou {
        gamma: 0.4,
        sigma: 1.0,
    };
    let grid = TimeGrid::new(5.0, 21, 2).unwrap();
    let small = sample(&spec, &grid, 5150, 300).unwrap();
    let large = sample(&spec, &grid, 5150, 1200).unwrap();
    assert_eq!(
        &large.values()[..small.values().len()],
        small.values(),
        "prefix realizations changed when the ensemble grew"
    );
    let c_small = simulate_curve(&spec, &grid, 1.0, 300, 5150).unwrap();
    let c_large = simulate_curve(&spec, &grid, 1.0, 1200, 5150).unwrap();
    let mid = 10;
    let ratio = c_small.std_err().unwrap()[mid] / c_large.std_err().unwrap()[mid];
    assert!(
        (ratio - 2.0).abs() < 0.35,
        "quadrupling N should halve the standard error, ratio {ratio}"
    );
}
