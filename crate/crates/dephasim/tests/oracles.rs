//! Cross-checks of the closed forms against independently computed values
//! and against each other: high-precision goldens, branch seams, limiting
//! regimes, and the Wiener-Khinchin relation between the stationary
//! correlation function and the spectral density.

#![allow(clippy::excessive_precision)]

use dephasim::analytic::{
    corr_ou, corr_y, corr_y_stationary, d_ou, d_rtn, d_y, spectrum_y,
};
use dephasim::{detect_revivals, DephasingCurve, TimeGrid, Verdict};

#[test]
fn goldens_hold_through_the_public_api() {
    let cases = [
        (d_ou(1.0, 1.0, 1.0, 1.0).unwrap(), 0.7144927122536721738897971),
        (d_ou(2.0, 0.1, 0.63, 1.0).unwrap(), 0.1609088352495080262644986),
        (d_rtn(1.0, 0.1, 1.0).unwrap(), 0.3332489860805094117222218),
        (d_rtn(1.0, 3.0, 1.0).unwrap(), 0.5444956660098628783592489),
        (d_y(1.0, 0.1, 0.63, 1.0, 1.0).unwrap(), 0.8840845391021184855497052),
        (d_y(3.0, 0.3, 1.0, 0.9, 1.0).unwrap(), 0.166138773121428629553529),
        (corr_y(3.0, 7.0, 0.3, 0.9, 1.0), -0.06096013365799630268075022),
        (spectrum_y(0.7, 0.3, 0.9, 1.0), 0.1034296049270937858445001),
    ];
    for (i, (got, want)) in cases.into_iter().enumerate() {
        assert!(
            (got - want).abs() <= 1e-13 * want.abs(),
            "case {i}: {got} vs {want}"
        );
    }
}

#[test]
fn ou_small_time_expansion_is_cancellation_safe() {
    // -ln D ~ pref·((2/3)x³ - (1/2)x⁴ + (7/30)x⁵) for x = γt → 0; a naive
    // evaluation of 2γt - 3 + 4e^{-γt} - e^{-2γt} is ~1e-6 off in this range
    // while the safe form is limited only by the quantization of D near 1
    for &(gamma, sigma, omega0) in &[(1.0, 1.0, 1.0), (0.3, 0.63, 2.0)] {
        for &t in &[1e-2, 1e-3] {
            let x: f64 = gamma * t;
            let pref = omega0 * omega0 * sigma * sigma / gamma.powi(3);
            let series =
                pref * (2.0 / 3.0 * x.powi(3) - 0.5 * x.powi(4) + 7.0 / 30.0 * x.powi(5));
            let exponent = -d_ou(t, gamma, sigma, omega0).unwrap().ln();
            assert!(
                (exponent - series).abs() <= 5e-7 * series,
                "gamma={gamma} t={t}: -ln D = {exponent:e} vs series {series:e}"
            );
        }
    }
}

#[test]
fn rtn_zero_rate_limit_is_the_folded_cosine() {
    let omega0 = 1.0;
    for k in 0..=200 {
        let t = 0.05 * k as f64;
        let d = d_rtn(t, 1e-14, omega0).unwrap();
        let limit = (2.0 * omega0 * t).cos().abs();
        assert!(
            (d - limit).abs() < 1e-10,
            "t={t}: {d} vs folded cosine {limit}"
        );
    }
}

#[test]
fn rtn_is_lipschitz_across_the_degenerate_rate() {
    // crossing gamma = 2·omega0 switches between the series, overdamped, and
    // underdamped evaluations; any branch mismatch would show up as a jump
    // far larger than the parameter perturbation
    let omega0 = 1.0;
    for &t in &[0.3, 1.0, 5.0] {
        for &eps in &[1e-4, 1e-6, 1e-8] {
            for sign in [-1.0, 1.0] {
                let g0 = 2.0 * omega0;
                let g1 = g0 * (1.0 + sign * eps);
                let a = d_rtn(t, g0, omega0).unwrap();
                let b = d_rtn(t, g1, omega0).unwrap();
                // |∂D/∂γ| is bounded by ~t for this family
                let allowed = 4.0 * (1.0 + t) * g0 * eps + 1e-12;
                assert!(
                    (a - b).abs() <= allowed,
                    "t={t} eps={sign}{eps}: |{a} - {b}| > {allowed:e}"
                );
            }
        }
    }
}

#[test]
fn rtn_first_zero_location_is_reproduced() {
    // root of cos(ν̃t) + (γ/ν̃)sin(ν̃t) for γ=0.1, ω₀=1, computed with
    // 50-digit arithmetic
    let first_zero = 0.8114235059009695863607227;
    let (gamma, omega0) = (0.1, 1.0);
    assert!(d_rtn(first_zero, gamma, omega0).unwrap() < 1e-12);
    // it is a genuine zero crossing of the undamped factor, not a tangency
    let nu = (4.0 * omega0 * omega0 - gamma * gamma).sqrt();
    let f = |t: f64| (nu * t).cos() + gamma / nu * (nu * t).sin();
    assert!(f(first_zero - 1e-3) > 0.0);
    assert!(f(first_zero + 1e-3) < 0.0);
    assert!(d_rtn(first_zero - 0.01, gamma, omega0).unwrap() > 1e-4);
    assert!(d_rtn(first_zero + 0.01, gamma, omega0).unwrap() > 1e-4);
}

fn rtn_measure_on_grid(n_out: usize) -> f64 {
    let grid = TimeGrid::new(30.0, n_out, 1).unwrap();
    let d = grid
        .times()
        .iter()
        .map(|&t| d_rtn(t, 0.1, 1.0).unwrap())
        .collect();
    let curve = DephasingCurve::from_d_values(grid, 1.0, d).unwrap();
    let report = detect_revivals(&curve, 3.0).unwrap();
    assert_eq!(report.verdict, Verdict::NonMarkovian);
    assert_eq!(report.revivals.len(), 19);
    report.nm_measure
}

#[test]
fn nm_measure_converges_to_the_continuum_value() {
    // Σ over the 19 maxima of e^{-γ kπ/ν̃}, ν̃ = sqrt(4-γ²), γ = 0.1:
    let continuum = 5.575564574711678102119869;
    let e1 = (rtn_measure_on_grid(300_001) - continuum).abs();
    let e2 = (rtn_measure_on_grid(600_001) - continuum).abs();
    assert!(e1 < 5e-3, "error at dt=1e-4: {e1:e}");
    assert!(e2 < 3e-3, "error at dt=5e-5: {e2:e}");
    // first-order convergence: halving the step should roughly halve the
    // grid-folding error
    assert!(e2 < 0.7 * e1, "refinement barely helped: {e1:e} -> {e2:e}");
}

/// Composite Simpson rule with n (even) intervals.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn wiener_khinchin_holds_for_the_ou_correlation() {
    let (gamma, sigma) = (0.7, 1.3);
    for &omega in &[0.0, 0.2, 1.0, 3.0] {
        let transform = simpson(
            |tau: f64| corr_ou(tau, gamma, sigma) * (omega * tau).cos(),
            0.0,
            60.0,
            120_000,
        ) / std::f64::consts::PI;
        let lorentzian =
            sigma * sigma / (2.0 * std::f64::consts::PI * (gamma * gamma + omega * omega));
        assert!(
            (transform - lorentzian).abs() < 1e-8 * lorentzian,
            "omega={omega}: {transform} vs {lorentzian}"
        );
    }
}

#[test]
fn wiener_khinchin_links_corr_y_to_spectrum_y() {
    for &(gamma, kappa, sigma) in &[(0.3f64, 0.9, 1.0), (0.1, 1.0, 0.63)] {
        let t_cut = 45.0 / gamma.min(kappa);
        let n = 2 * ((t_cut / 5e-4) as usize / 2);
        for &omega in &[0.05, 0.3, (gamma * kappa).sqrt(), 1.7, 4.0] {
            let transform = simpson(
                |tau: f64| corr_y_stationary(tau, gamma, kappa, sigma) * (omega * tau).cos(),
                0.0,
                t_cut,
                n,
            ) / std::f64::consts::PI;
            let direct = spectrum_y(omega, gamma, kappa, sigma);
            assert!(
                (transform - direct).abs() < 1e-5 * direct,
                "gamma={gamma} kappa={kappa} omega={omega}: {transform} vs {direct}"
            );
        }
    }
}

#[test]
fn corr_y_relaxes_to_its_stationary_form() {
    let (gamma, kappa, sigma) = (0.4, 1.1, 0.8);
    for lag in [0.0, 0.5, 2.0] {
        let late = 80.0;
        let two_time = corr_y(late, late + lag, gamma, kappa, sigma);
        let stationary = corr_y_stationary(lag, gamma, kappa, sigma);
        assert!(
            (two_time - stationary).abs() < 1e-12,
            "lag={lag}: {two_time} vs {stationary}"
        );
    }
}

#[test]
fn spectrum_y_peaks_at_the_geometric_mean_of_the_rates() {
    for &(gamma, kappa) in &[(0.1f64, 1.0), (0.3, 0.9), (2.0, 0.05)] {
        let sigma = 0.63;
        // golden-section search on [lo, hi] bracketing the peak
        let (mut lo, mut hi) = (0.1 * (gamma * kappa).sqrt(), 10.0 * (gamma * kappa).sqrt());
        let phi = (5.0f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let a = hi - phi * (hi - lo);
            let b = lo + phi * (hi - lo);
            if spectrum_y(a, gamma, kappa, sigma) < spectrum_y(b, gamma, kappa, sigma) {
                lo = a;
            } else {
                hi = b;
            }
        }
        let peak = 0.5 * (lo + hi);
        let expected = (gamma * kappa).sqrt();
        // comparison-based search can place a flat quadratic maximum only to
        // about sqrt(machine epsilon) in relative terms
        assert!(
            (peak - expected).abs() < 1e-6 * expected,
            "gamma={gamma} kappa={kappa}: peak {peak} vs {expected}"
        );
    }
}

#[test]
fn spectrum_y_has_the_documented_asymptotics() {
    let (gamma, kappa, sigma) = (0.3, 0.9, 1.1);
    let amp = sigma * sigma / (2.0 * std::f64::consts::PI);
    // ∝ ω² at the origin
    let low = spectrum_y(1e-6, gamma, kappa, sigma);
    let low_ref = amp * 1e-12 / (gamma * gamma * kappa * kappa);
    assert!((low - low_ref).abs() < 1e-6 * low_ref);
    // ∝ ω⁻² far above both rates
    let high = spectrum_y(1e4, gamma, kappa, sigma);
    let high_ref = amp / 1e8;
    assert!((high - high_ref).abs() < 1e-6 * high_ref);
}
