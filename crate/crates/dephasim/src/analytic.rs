//! Closed-form dephasing factors, correlation functions and the Y power
//! spectrum.
//!
//! The textbook expressions are riddled with removable singularities (γ = κ,
//! γ = 2ω₀) and overflowing hyperbolics. Everything here is rewritten around
//! `sinhc(x) = sinh(x)/x` and half-sum/half-difference rates so that a single
//! code path stays finite and accurate across the parameter space; the few
//! genuinely degenerate spots switch to short series with overlap-region
//! accuracy at machine precision.

use crate::error::{check_finite, check_non_negative, check_positive, invalid, Result};
use crate::noise::NoiseSpec;

/// Parameter bag for the closed forms; each formula uses the subset it
/// needs. `omega0` is always required.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AnalyticParams {
    pub gamma: Option<f64>,
    pub sigma: Option<f64>,
    pub kappa: Option<f64>,
    pub mu: Option<f64>,
    pub omega0: f64,
}

impl AnalyticParams {
    pub fn from_spec(spec: &NoiseSpec, omega0: f64) -> Self {
        let mut p = AnalyticParams {
            omega0,
            ..Default::default()
        };
        match *spec {
            NoiseSpec::Ou { gamma, sigma } => {
                p.gamma = Some(gamma);
                p.sigma = Some(sigma);
            }
            NoiseSpec::Rtn { gamma } => p.gamma = Some(gamma),
            NoiseSpec::FilteredOu {
                gamma,
                sigma,
                kappa,
            } => {
                p.gamma = Some(gamma);
                p.sigma = Some(sigma);
                p.kappa = Some(kappa);
            }
            NoiseSpec::FilteredRtn { gamma, mu } => {
                p.gamma = Some(gamma);
                p.mu = Some(mu);
            }
        }
        p
    }
}

/// sinh(x)/x, exact at 0.
fn sinhc(x: f64) -> f64 {
    let x2 = x * x;
    if x.abs() < 1e-4 {
        1.0 + x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sinh() / x
    }
}

fn check_time(name: &'static str, t: f64) -> Result<()> {
    check_finite(name, t)?;
    if t < 0.0 {
        return Err(invalid(name, format!("must be >= 0, got {t}")));
    }
    Ok(())
}

/// Dephasing factor under OU noise:
/// D(t) = exp(−(ω₀²σ²/γ³)(2γt − 3 + 4e^{−γt} − e^{−2γt})).
///
/// The bracket is O((γt)³) at short times, so it is assembled from `expm1`
/// terms to dodge the 3-digit cancellation of the naive form.
pub fn d_ou(t: f64, gamma: f64, sigma: f64, omega0: f64) -> Result<f64> {
    check_time("t", t)?;
    check_positive("gamma", gamma)?;
    check_non_negative("sigma", sigma)?;
    check_positive("omega0", omega0)?;
    let x = gamma * t;
    let bracket = 2.0 * x + 4.0 * (-x).exp_m1() - (-2.0 * x).exp_m1();
    let pref = omega0 * omega0 * sigma * sigma / (gamma * gamma * gamma);
    Ok((-pref * bracket).exp())
}

/// Dephasing factor under telegraph noise:
/// D(t) = e^{−γt}|cosh(νt) + (γ/ν)sinh(νt)|, ν = sqrt(γ² − 4ω₀²).
///
/// Three regimes share one series seam: for ν²t² near zero a short series in
/// w = ν²t² (exact at the γ = 2ω₀ boundary, where D = e^{−γt}(1 + γt));
/// otherwise the real branch uses half-exponentials that cannot overflow, and
/// the oscillatory branch uses plain trigonometrics with ν = i·ν̃.
pub fn d_rtn(t: f64, gamma: f64, omega0: f64) -> Result<f64> {
    check_time("t", t)?;
    check_positive("gamma", gamma)?;
    check_positive("omega0", omega0)?;
    // ν² in factored form: (γ − 2ω₀)(γ + 2ω₀) keeps full precision near the
    // critical damping point
    let s = (gamma - 2.0 * omega0) * (gamma + 2.0 * omega0);
    let w = s * t * t;
    let gt = gamma * t;
    let value = if w.abs() < 1e-3 {
        // cosh(νt) = Σ w^k/(2k)!, (γ/ν)sinh(νt) = γt·Σ w^k/(2k+1)!
        let mut even = 0.0;
        let mut odd = 0.0;
        let mut wk = 1.0;
        let mut fact = 1.0f64; // (2k)!
        for k in 0..9 {
            even += wk / fact;
            odd += wk / (fact * (2 * k + 1) as f64);
            wk *= w;
            fact *= ((2 * k + 1) * (2 * k + 2)) as f64;
        }
        (-gt).exp() * (even + gt * odd)
    } else if s > 0.0 {
        // overdamped: both exponents are negative because ν < γ
        let nu = s.sqrt();
        let r = gamma / nu;
        0.5 * (1.0 + r) * (-(gamma - nu) * t).exp() + 0.5 * (1.0 - r) * (-(gamma + nu) * t).exp()
    } else {
        let nu = (-s).sqrt();
        let x = nu * t;
        (-gt).exp() * (x.cos() + (gamma / nu) * x.sin()).abs()
    };
    Ok(value.min(1.0))
}

/// Shared core of the Y variance bracket: returns
/// e^{−2mt}[(mt·sinhc(x) + cosh(x))² + γκ·t²·sinhc²(x)] with m = (γ+κ)/2 and
/// x = (γ−κ)t/2, switching to explicit exponentials when cosh would overflow.
fn y_bracket(t: f64, gamma: f64, kappa: f64) -> f64 {
    let m = 0.5 * (gamma + kappa);
    let x = 0.5 * (gamma - kappa) * t;
    if x.abs() < 250.0 {
        let s = sinhc(x);
        let c = x.cosh();
        let a = m * t * s + c;
        let e = (-2.0 * m * t).exp();
        e * (a * a + gamma * kappa * t * t * s * s)
    } else {
        // rates so far apart that e^{−mt}cosh(x) must be assembled from
        // e^{−γt} and e^{−κt} directly; no cancellation, the terms differ by
        // hundreds of orders of magnitude here
        let eg = (-gamma * t).exp();
        let ek = (-kappa * t).exp();
        let sbar = (ek - eg) / (2.0 * x); // e^{−mt}·sinhc(x)
        let cbar = 0.5 * (ek + eg); // e^{−mt}·cosh(x)
        let a = m * t * sbar + cbar;
        a * a + gamma * kappa * t * t * sbar * sbar
    }
}

/// Dephasing factor under OU noise passed through a high-pass filter of rate
/// κ (the process Y). Monotone decaying, saturating at a finite plateau.
pub fn d_y(t: f64, gamma: f64, sigma: f64, kappa: f64, omega0: f64) -> Result<f64> {
    check_time("t", t)?;
    check_positive("gamma", gamma)?;
    check_non_negative("sigma", sigma)?;
    check_positive("kappa", kappa)?;
    check_positive("omega0", omega0)?;
    let pref = omega0 * omega0 * sigma * sigma / (gamma * kappa * (gamma + kappa));
    let exponent = pref * (1.0 - y_bracket(t, gamma, kappa));
    Ok((-exponent).exp())
}

/// Stationary autocorrelation of OU noise: (σ²/2γ)e^{−γ|τ|}.
pub fn corr_ou(tau: f64, gamma: f64, sigma: f64) -> f64 {
    sigma * sigma / (2.0 * gamma) * (-gamma * tau.abs()).exp()
}

/// Stationary autocorrelation of telegraph noise: e^{−2γ|τ|}.
pub fn corr_rtn(tau: f64, gamma: f64) -> f64 {
    (-2.0 * gamma * tau.abs()).exp()
}

/// Two-time correlation of Y started from Y(0) = 0. Only asymptotically
/// stationary: for fixed lag it converges to [`corr_y_stationary`] as both
/// times grow.
pub fn corr_y(t: f64, s: f64, gamma: f64, kappa: f64, sigma: f64) -> f64 {
    let m = 0.5 * (gamma + kappa);
    let eps = gamma - kappa;
    let tau = (t - s).abs();
    let q = t + s;
    let u = 0.5 * eps * t;
    let v = 0.5 * eps * s;
    let xt = 0.5 * eps * tau;
    let stationary = (-m * tau).exp() * (xt.cosh() - m * tau * sinhc(xt)) / (4.0 * m);
    let transient = (-m * q).exp()
        * (-(0.5 * m * t * s) * sinhc(u) * sinhc(v)
            + 0.25 * t * sinhc(u) * v.cosh()
            + 0.25 * s * u.cosh() * sinhc(v)
            - (u - v).cosh() / (4.0 * m));
    sigma * sigma * (stationary + transient)
}

/// Large-time limit of [`corr_y`] at lag τ; its Fourier transform is the Y
/// spectrum.
pub fn corr_y_stationary(tau: f64, gamma: f64, kappa: f64, sigma: f64) -> f64 {
    let m = 0.5 * (gamma + kappa);
    let xt = 0.5 * (gamma - kappa) * tau.abs();
    sigma * sigma * (-m * tau.abs()).exp() * (xt.cosh() - m * tau.abs() * sinhc(xt)) / (4.0 * m)
}

/// Power spectral density of Y: S(ω) = (σ²/2π)·ω²/((γ²+ω²)(κ²+ω²)).
/// Even in ω, zero at DC, peaked at ω = sqrt(γκ).
pub fn spectrum_y(omega: f64, gamma: f64, kappa: f64, sigma: f64) -> f64 {
    let w2 = omega * omega;
    sigma * sigma / (2.0 * std::f64::consts::PI) * w2
        / ((gamma * gamma + w2) * (kappa * kappa + w2))
}

/// Closed-form dephasing factor for a noise spec, if the model has one.
/// Filtered telegraph noise does not: its curve exists only numerically.
pub fn d_for_spec(spec: &NoiseSpec, omega0: f64, t: f64) -> Result<Option<f64>> {
    match *spec {
        NoiseSpec::Ou { gamma, sigma } => d_ou(t, gamma, sigma, omega0).map(Some),
        NoiseSpec::Rtn { gamma } => d_rtn(t, gamma, omega0).map(Some),
        NoiseSpec::FilteredOu {
            gamma,
            sigma,
            kappa,
        } => d_y(t, gamma, sigma, kappa, omega0).map(Some),
        NoiseSpec::FilteredRtn { .. } => Ok(None),
    }
}
