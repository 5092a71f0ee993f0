//! From noise ensembles to dephasing curves.
//!
//! The decohering object is the integrated process 𝒳(t) = ∫₀ᵗ X(τ)dτ; the
//! qubit coherence decays by D(t) = |E[exp(−2i ω₀ 𝒳(t))]|. Everything here
//! is a deterministic function of (spec, grid, master seed, N): phasor sums
//! are accumulated in fixed chunks merged in index order, so thread count
//! never changes a single bit of the output.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{check_positive, invalid, Error, Result};
use crate::grid::TimeGrid;
use crate::noise::{path_rng, NoiseSpec, PathStepper, TrajectoryEnsemble};
use crate::stats::{pointwise_mean_sd, PhasorSums, CHUNK};

/// Integrated realizations 𝒳(t_k), row-major `[N × n_out]`.
#[derive(Debug, Clone)]
pub struct IntegratedEnsemble {
    grid: TimeGrid,
    n: usize,
    values: Vec<f64>,
}

impl IntegratedEnsemble {
    /// Wrap externally computed integrated paths. The first column must be
    /// exactly zero: every integral starts at 𝒳(0) = 0.
    pub fn from_values(grid: TimeGrid, n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyEnsemble);
        }
        if values.len() != n * grid.n_out() {
            return Err(invalid(
                "values",
                "length must equal n × n_out".to_string(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("integrated values"));
        }
        for i in 0..n {
            if values[i * grid.n_out()] != 0.0 {
                return Err(invalid(
                    "values",
                    format!("row {i} does not start at 0"),
                ));
            }
        }
        Ok(IntegratedEnsemble { grid, n, values })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.grid.n_out();
        &self.values[i * w..(i + 1) * w]
    }
}

/// Extract the integrated process from a sampled ensemble.
///
/// The quadrature already happened inside the sampler at substep resolution
/// (trapezoidal for the diffusive kinds, exact piecewise for the telegraph
/// kinds), so this is a repackaging step, not a second integration pass.
pub fn integrate_paths(ensemble: &TrajectoryEnsemble) -> Result<IntegratedEnsemble> {
    IntegratedEnsemble::from_values(
        *ensemble.grid(),
        ensemble.n(),
        ensemble.integrals().to_vec(),
    )
}

/// 1σ/2σ envelopes of a curve ensemble, clamped to the physical range [0,1].
#[derive(Debug, Clone)]
pub struct CurveBands {
    mean: Vec<f64>,
    lo1: Vec<f64>,
    hi1: Vec<f64>,
    lo2: Vec<f64>,
    hi2: Vec<f64>,
}

impl CurveBands {
    fn from_curves(curves: &[Vec<f64>]) -> Self {
        let (mean, sd) = pointwise_mean_sd(curves);
        let clamp = |v: f64| v.clamp(0.0, 1.0);
        let lo1 = mean.iter().zip(&sd).map(|(m, s)| clamp(m - s)).collect();
        let hi1 = mean.iter().zip(&sd).map(|(m, s)| clamp(m + s)).collect();
        let lo2 = mean
            .iter()
            .zip(&sd)
            .map(|(m, s)| clamp(m - 2.0 * s))
            .collect();
        let hi2 = mean
            .iter()
            .zip(&sd)
            .map(|(m, s)| clamp(m + 2.0 * s))
            .collect();
        CurveBands {
            mean,
            lo1,
            hi1,
            lo2,
            hi2,
        }
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn lo1(&self) -> &[f64] {
        &self.lo1
    }

    pub fn hi1(&self) -> &[f64] {
        &self.hi1
    }

    pub fn lo2(&self) -> &[f64] {
        &self.lo2
    }

    pub fn hi2(&self) -> &[f64] {
        &self.hi2
    }
}

/// Monte Carlo dephasing curve D(t_k) with its per-point standard error.
///
/// The complex mean phasor is retained because the qubit map multiplies the
/// coherence by the phasor itself; D is only its modulus.
#[derive(Debug, Clone)]
pub struct DephasingCurve {
    grid: TimeGrid,
    omega0: f64,
    d_values: Vec<f64>,
    std_err: Option<Vec<f64>>,
    phasors: Vec<Complex64>,
    bands: Option<CurveBands>,
}

impl DephasingCurve {
    fn from_sums(grid: TimeGrid, omega0: f64, sums: &PhasorSums) -> Self {
        let (phasors, se) = sums.finalize();
        let d_values = phasors.iter().map(|p| p.norm().min(1.0)).collect();
        DephasingCurve {
            grid,
            omega0,
            d_values,
            std_err: Some(se),
            phasors,
            bands: None,
        }
    }

    /// Build a noiseless curve from explicit D values (e.g. a closed form
    /// evaluated on a grid). No error bars, real non-negative phasors.
    pub fn from_d_values(grid: TimeGrid, omega0: f64, d_values: Vec<f64>) -> Result<Self> {
        check_positive("omega0", omega0)?;
        if d_values.len() != grid.n_out() {
            return Err(invalid("d_values", "length must equal n_out".to_string()));
        }
        if d_values.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0 + 1e-9) {
            return Err(invalid(
                "d_values",
                "entries must be finite and lie in [0, 1]".to_string(),
            ));
        }
        if (d_values[0] - 1.0).abs() > 1e-9 {
            return Err(invalid("d_values", "D(0) must be 1".to_string()));
        }
        let d_values: Vec<f64> = d_values.into_iter().map(|v| v.min(1.0)).collect();
        let phasors = d_values.iter().map(|&d| Complex64::new(d, 0.0)).collect();
        Ok(DephasingCurve {
            grid,
            omega0,
            d_values,
            std_err: None,
            phasors,
            bands: None,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn d_values(&self) -> &[f64] {
        &self.d_values
    }

    pub fn std_err(&self) -> Option<&[f64]> {
        self.std_err.as_deref()
    }

    /// Retained complex mean phasor at grid point `k`.
    pub fn phasor(&self, k: usize) -> Complex64 {
        self.phasors[k]
    }

    pub fn bands(&self) -> Option<&CurveBands> {
        self.bands.as_ref()
    }
}

/// How to estimate the standard error of |mean phasor|.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorBars {
    /// First-order propagation through the modulus; the default.
    Delta,
    /// Path bootstrap; slower, used to validate the delta method.
    Bootstrap { resamples: usize, seed: u64 },
}

/// Ensemble average of exp(−2i ω₀ 𝒳) with delta-method error bars.
pub fn dephasing_factor(integrated: &IntegratedEnsemble, omega0: f64) -> Result<DephasingCurve> {
    dephasing_factor_with(integrated, omega0, ErrorBars::Delta)
}

pub fn dephasing_factor_with(
    integrated: &IntegratedEnsemble,
    omega0: f64,
    bars: ErrorBars,
) -> Result<DephasingCurve> {
    check_positive("omega0", omega0)?;
    let n_out = integrated.grid.n_out();
    let scale = -2.0 * omega0;
    let sums = integrated
        .values
        .par_chunks(CHUNK * n_out)
        .map(|chunk| {
            let mut s = PhasorSums::new(n_out);
            for row in chunk.chunks_exact(n_out) {
                s.add_path(row, scale);
            }
            s
        })
        .collect::<Vec<_>>();
    let mut total = PhasorSums::new(n_out);
    for s in &sums {
        total.merge(s);
    }
    let mut curve = DephasingCurve::from_sums(integrated.grid, omega0, &total);
    if let ErrorBars::Bootstrap { resamples, seed } = bars {
        if resamples < 2 {
            return Err(invalid("resamples", "need at least 2".to_string()));
        }
        curve.std_err = Some(bootstrap_std_err(integrated, scale, resamples, seed));
    }
    Ok(curve)
}

/// Standard error of |mean phasor| by resampling whole paths.
fn bootstrap_std_err(
    integrated: &IntegratedEnsemble,
    scale: f64,
    resamples: usize,
    seed: u64,
) -> Vec<f64> {
    let n = integrated.n;
    let n_out = integrated.grid.n_out();
    // precompute per-path phasors once; resamples only re-add rows
    let mut cos = vec![0.0; n * n_out];
    let mut sin = vec![0.0; n * n_out];
    cos.par_chunks_mut(n_out)
        .zip(sin.par_chunks_mut(n_out))
        .zip(integrated.values.par_chunks(n_out))
        .for_each(|((crow, srow), xrow)| {
            for k in 0..n_out {
                let (s, c) = (scale * xrow[k]).sin_cos();
                crow[k] = c;
                srow[k] = s;
            }
        });
    let moduli: Vec<Vec<f64>> = (0..resamples)
        .into_par_iter()
        .map(|r| {
            let mut rng = path_rng(seed, r as u64);
            let mut re = vec![0.0; n_out];
            let mut im = vec![0.0; n_out];
            for _ in 0..n {
                let i = rng.random_range(0..n);
                for k in 0..n_out {
                    re[k] += cos[i * n_out + k];
                    im[k] += sin[i * n_out + k];
                }
            }
            re.iter()
                .zip(&im)
                .map(|(a, b)| a.hypot(*b) / n as f64)
                .collect()
        })
        .collect();
    let (_, sd) = pointwise_mean_sd(&moduli);
    sd
}

/// Sample-integrate-average in one fused pass, never materializing the whole
/// ensemble. Bit-identical to the composed
/// `sample → integrate_paths → dephasing_factor` pipeline.
pub fn simulate_curve(
    spec: &NoiseSpec,
    grid: &TimeGrid,
    omega0: f64,
    n: usize,
    master_seed: u64,
) -> Result<DephasingCurve> {
    check_positive("omega0", omega0)?;
    spec.validate()?;
    if n == 0 {
        return Err(Error::EmptyEnsemble);
    }
    let n_out = grid.n_out();
    let scale = -2.0 * omega0;
    let stepper = PathStepper::new(spec, grid);
    let n_chunks = n.div_ceil(CHUNK);
    let sums = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let start = ci * CHUNK;
            let end = (start + CHUNK).min(n);
            let mut s = PhasorSums::new(n_out);
            let mut buf = vec![0.0; n_out];
            for i in start..end {
                let mut rng = path_rng(master_seed, i as u64);
                let mut state = stepper.init(&mut rng);
                buf[0] = 0.0;
                let mut acc = 0.0;
                for slot in buf.iter_mut().skip(1) {
                    let (_, di) = stepper.step(&mut state, &mut rng);
                    acc += di;
                    *slot = acc;
                }
                if !acc.is_finite() {
                    return Err(Error::NonFinite("sampled trajectories"));
                }
                s.add_path(&buf, scale);
            }
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = PhasorSums::new(n_out);
    for s in &sums {
        total.merge(s);
    }
    Ok(DephasingCurve::from_sums(*grid, omega0, &total))
}

/// The 100-curves protocol: many small independent ensembles, exposing the
/// curve-to-curve scatter a repeated experiment would see.
///
/// Returns the pooled curve over all `n_curves × n_real_per_curve` paths,
/// with `bands` holding the mean and the 1σ/2σ envelopes of the individual
/// curves (σ = sample standard deviation across curves).
pub fn curve_ensemble_stats(
    spec: &NoiseSpec,
    grid: &TimeGrid,
    omega0: f64,
    n_curves: usize,
    n_real_per_curve: usize,
    master_seed: u64,
) -> Result<DephasingCurve> {
    check_positive("omega0", omega0)?;
    spec.validate()?;
    if n_curves < 2 {
        return Err(invalid("n_curves", "need at least 2 curves".to_string()));
    }
    if n_real_per_curve == 0 {
        return Err(Error::EmptyEnsemble);
    }
    let n_out = grid.n_out();
    let scale = -2.0 * omega0;
    let stepper = PathStepper::new(spec, grid);
    let per_curve = (0..n_curves)
        .into_par_iter()
        .map(|c| {
            let mut s = PhasorSums::new(n_out);
            let mut buf = vec![0.0; n_out];
            for j in 0..n_real_per_curve {
                let index = (c * n_real_per_curve + j) as u64;
                let mut rng = path_rng(master_seed, index);
                let mut state = stepper.init(&mut rng);
                buf[0] = 0.0;
                let mut acc = 0.0;
                for slot in buf.iter_mut().skip(1) {
                    let (_, di) = stepper.step(&mut state, &mut rng);
                    acc += di;
                    *slot = acc;
                }
                if !acc.is_finite() {
                    return Err(Error::NonFinite("sampled trajectories"));
                }
                s.add_path(&buf, scale);
            }
            let (phasors, _) = s.finalize();
            let d: Vec<f64> = phasors.iter().map(|p| p.norm().min(1.0)).collect();
            Ok((s, d))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = PhasorSums::new(n_out);
    let mut curves = Vec::with_capacity(n_curves);
    for (s, d) in per_curve {
        total.merge(&s);
        curves.push(d);
    }
    let mut curve = DephasingCurve::from_sums(*grid, omega0, &total);
    curve.bands = Some(CurveBands::from_curves(&curves));
    Ok(curve)
}
