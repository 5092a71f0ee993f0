//! The four classical noise processes.
//!
//! * `Ou`: Ornstein-Uhlenbeck, friction `gamma`, diffusion `sigma`,
//!   started at X(0) = 0 and advanced by the exact one-step transition.
//! * `Rtn`: random telegraph noise, values exactly ±1, equiprobable start,
//!   switching as a Poisson process of rate `gamma` (event-driven, no
//!   per-step flip bias).
//! * `FilteredOu`: dY = -kappa·Y dt + dX_ou, integrated pathwise with the
//!   exponential-Euler update Y(t+h) = Y(t)·e^{-kappa h} + ΔX.
//! * `FilteredRtn`: dZ = -mu·Z dt + dX_rtn, same update with the exact
//!   telegraph increments.
//!
//! Sampling is reproducible: realization `i` of master seed `s` always uses
//! ChaCha8 stream `i` of seed `s`, so results are bit-identical no matter how
//! work is scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_non_negative, check_positive, Error, Result};
use crate::grid::TimeGrid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseSpec {
    Ou { gamma: f64, sigma: f64 },
    Rtn { gamma: f64 },
    FilteredOu { gamma: f64, sigma: f64, kappa: f64 },
    FilteredRtn { gamma: f64, mu: f64 },
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseSpec::Ou { gamma, sigma } => {
                check_positive("noise.gamma", gamma)?;
                check_non_negative("noise.sigma", sigma)
            }
            // gamma = 0 is allowed for the telegraph process: it degenerates
            // to a frozen ±1 value, which is a useful exact limit.
            NoiseSpec::Rtn { gamma } => check_non_negative("noise.gamma", gamma),
            NoiseSpec::FilteredOu {
                gamma,
                sigma,
                kappa,
            } => {
                check_positive("noise.gamma", gamma)?;
                check_non_negative("noise.sigma", sigma)?;
                check_positive("noise.kappa", kappa)
            }
            NoiseSpec::FilteredRtn { gamma, mu } => {
                check_non_negative("noise.gamma", gamma)?;
                check_positive("noise.mu", mu)
            }
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            NoiseSpec::Ou { .. } => "ou",
            NoiseSpec::Rtn { .. } => "rtn",
            NoiseSpec::FilteredOu { .. } => "filtered_ou",
            NoiseSpec::FilteredRtn { .. } => "filtered_rtn",
        }
    }

    /// Fastest rate in the spec; used by the substep policy and the
    /// coarse-grid warning.
    pub fn max_rate(&self) -> f64 {
        match *self {
            NoiseSpec::Ou { gamma, .. } => gamma,
            NoiseSpec::Rtn { gamma } => gamma,
            NoiseSpec::FilteredOu { gamma, kappa, .. } => gamma.max(kappa),
            NoiseSpec::FilteredRtn { gamma, mu } => gamma.max(mu),
        }
    }

    pub fn is_filtered(&self) -> bool {
        matches!(
            self,
            NoiseSpec::FilteredOu { .. } | NoiseSpec::FilteredRtn { .. }
        )
    }
}

/// RNG for realization `index` under `master_seed`. ChaCha8 streams act as a
/// counter-based split: any realization can be regenerated in isolation.
pub(crate) fn path_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Exact OU one-step quantities for step size `h`: X' = a·X + sd·ξ.
fn ou_step_consts(gamma: f64, sigma: f64, h: f64) -> (f64, f64) {
    let a = (-gamma * h).exp();
    let mut sd = sigma * ((1.0 - a * a) / (2.0 * gamma)).sqrt();
    // Treat diffusion whose variance underflows as exactly zero, so the
    // zero-noise limit produces identically-zero paths.
    if sd * sd == 0.0 {
        sd = 0.0;
    }
    (a, sd)
}

#[derive(Debug, Clone)]
pub(crate) enum PathStepper {
    Ou {
        a: f64,
        sd: f64,
        h: f64,
        substeps: usize,
    },
    Rtn {
        exp: Option<Exp<f64>>,
        dt: f64,
    },
    FilteredOu {
        a: f64,
        sd: f64,
        decay: f64,
        h: f64,
        substeps: usize,
    },
    FilteredRtn {
        exp: Option<Exp<f64>>,
        decay: f64,
        h: f64,
        substeps: usize,
    },
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum PathState {
    Ou { x: f64 },
    Rtn { sign: f64, rem: f64 },
    FilteredOu { x: f64, y: f64 },
    FilteredRtn { sign: f64, rem: f64, z: f64 },
}

impl PathState {
    pub(crate) fn value(&self) -> f64 {
        match *self {
            PathState::Ou { x } => x,
            PathState::Rtn { sign, .. } => sign,
            PathState::FilteredOu { y, .. } => y,
            PathState::FilteredRtn { z, .. } => z,
        }
    }
}

fn exp_waiting_time<R: Rng>(exp: &Option<Exp<f64>>, rng: &mut R) -> f64 {
    match exp {
        Some(d) => d.sample(rng),
        None => f64::INFINITY,
    }
}

impl PathStepper {
    pub(crate) fn new(spec: &NoiseSpec, grid: &TimeGrid) -> Self {
        let h = grid.h();
        let substeps = grid.substeps();
        match *spec {
            NoiseSpec::Ou { gamma, sigma } => {
                let (a, sd) = ou_step_consts(gamma, sigma, h);
                PathStepper::Ou { a, sd, h, substeps }
            }
            NoiseSpec::Rtn { gamma } => PathStepper::Rtn {
                exp: (gamma > 0.0).then(|| Exp::new(gamma).expect("validated rate")),
                dt: grid.dt(),
            },
            NoiseSpec::FilteredOu {
                gamma,
                sigma,
                kappa,
            } => {
                let (a, sd) = ou_step_consts(gamma, sigma, h);
                PathStepper::FilteredOu {
                    a,
                    sd,
                    decay: (-kappa * h).exp(),
                    h,
                    substeps,
                }
            }
            NoiseSpec::FilteredRtn { gamma, mu } => PathStepper::FilteredRtn {
                exp: (gamma > 0.0).then(|| Exp::new(gamma).expect("validated rate")),
                decay: (-mu * h).exp(),
                h,
                substeps,
            },
        }
    }

    pub(crate) fn init<R: Rng>(&self, rng: &mut R) -> PathState {
        match self {
            PathStepper::Ou { .. } => PathState::Ou { x: 0.0 },
            PathStepper::Rtn { exp, .. } => PathState::Rtn {
                sign: if rng.random_bool(0.5) { 1.0 } else { -1.0 },
                rem: exp_waiting_time(exp, rng),
            },
            PathStepper::FilteredOu { .. } => PathState::FilteredOu { x: 0.0, y: 0.0 },
            PathStepper::FilteredRtn { exp, .. } => PathState::FilteredRtn {
                sign: if rng.random_bool(0.5) { 1.0 } else { -1.0 },
                rem: exp_waiting_time(exp, rng),
                z: 0.0,
            },
        }
    }

    /// Advance one output step. Returns the process value at the end of the
    /// step and the integral of the process over the step.
    ///
    /// Telegraph integrals are exact piecewise sums over the switch events;
    /// the diffusive kinds use trapezoidal quadrature at substep resolution.
    pub(crate) fn step<R: Rng>(&self, state: &mut PathState, rng: &mut R) -> (f64, f64) {
        match (self, state) {
            (PathStepper::Ou { a, sd, h, substeps }, PathState::Ou { x }) => {
                let mut integral = 0.0;
                for _ in 0..*substeps {
                    let xi: f64 = StandardNormal.sample(rng);
                    let xn = *x * a + sd * xi;
                    integral += 0.5 * h * (*x + xn);
                    *x = xn;
                }
                (*x, integral)
            }
            (PathStepper::Rtn { exp, dt }, PathState::Rtn { sign, rem }) => {
                let integral = advance_telegraph(sign, rem, *dt, exp, rng);
                (*sign, integral)
            }
            (
                PathStepper::FilteredOu {
                    a,
                    sd,
                    decay,
                    h,
                    substeps,
                },
                PathState::FilteredOu { x, y },
            ) => {
                let mut integral = 0.0;
                for _ in 0..*substeps {
                    let xi: f64 = StandardNormal.sample(rng);
                    let xn = *x * a + sd * xi;
                    let yn = *y * decay + (xn - *x);
                    integral += 0.5 * h * (*y + yn);
                    *x = xn;
                    *y = yn;
                }
                (*y, integral)
            }
            (
                PathStepper::FilteredRtn {
                    exp,
                    decay,
                    h,
                    substeps,
                },
                PathState::FilteredRtn { sign, rem, z },
            ) => {
                let mut integral = 0.0;
                for _ in 0..*substeps {
                    let before = *sign;
                    advance_telegraph(sign, rem, *h, exp, rng);
                    let zn = *z * decay + (*sign - before);
                    integral += 0.5 * h * (*z + zn);
                    *z = zn;
                }
                (*z, integral)
            }
            _ => unreachable!("state kind always matches stepper kind"),
        }
    }
}

/// Walk the telegraph process over a window of length `len`, flipping at the
/// stored event times. Returns the exact integral of the ±1 value.
fn advance_telegraph<R: Rng>(
    sign: &mut f64,
    rem: &mut f64,
    len: f64,
    exp: &Option<Exp<f64>>,
    rng: &mut R,
) -> f64 {
    let mut left = len;
    let mut integral = 0.0;
    while *rem <= left {
        integral += *sign * *rem;
        left -= *rem;
        *sign = -*sign;
        *rem = exp_waiting_time(exp, rng);
    }
    integral += *sign * left;
    *rem -= left;
    integral
}

/// N realizations of a process on a grid, with the integrated process
/// accumulated at substep resolution during sampling.
#[derive(Debug, Clone)]
pub struct TrajectoryEnsemble {
    spec: NoiseSpec,
    grid: TimeGrid,
    master_seed: u64,
    n: usize,
    values: Vec<f64>,
    integrals: Vec<f64>,
    warning: Option<String>,
}

impl TrajectoryEnsemble {
    pub fn spec(&self) -> &NoiseSpec {
        &self.spec
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Row-major `[n × n_out]` process values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.grid.n_out();
        &self.values[i * w..(i + 1) * w]
    }

    pub(crate) fn integrals(&self) -> &[f64] {
        &self.integrals
    }

    pub fn warning(&self) -> Option<&str> {
        self.warning.as_deref()
    }
}

/// Sample any of the four processes. The per-kind wrappers below just check
/// the spec kind first.
pub fn sample(
    spec: &NoiseSpec,
    grid: &TimeGrid,
    master_seed: u64,
    n: usize,
) -> Result<TrajectoryEnsemble> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::EmptyEnsemble);
    }
    let n_out = grid.n_out();
    let stepper = PathStepper::new(spec, grid);
    let mut values = vec![0.0; n * n_out];
    let mut integrals = vec![0.0; n * n_out];

    values
        .par_chunks_mut(n_out)
        .zip(integrals.par_chunks_mut(n_out))
        .enumerate()
        .for_each(|(i, (vrow, irow))| {
            let mut rng = path_rng(master_seed, i as u64);
            let mut state = stepper.init(&mut rng);
            vrow[0] = state.value();
            irow[0] = 0.0;
            let mut acc = 0.0;
            for k in 1..n_out {
                let (v, di) = stepper.step(&mut state, &mut rng);
                acc += di;
                vrow[k] = v;
                irow[k] = acc;
            }
        });

    if values.iter().chain(integrals.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("sampled trajectories"));
    }

    let warning = (spec.is_filtered() && grid.h() * spec.max_rate() > 0.1).then(|| {
        format!(
            "grid.substeps: h·max_rate = {:.3} > 0.1; the filtered-process update may be visibly biased",
            grid.h() * spec.max_rate()
        )
    });

    Ok(TrajectoryEnsemble {
        spec: *spec,
        grid: *grid,
        master_seed,
        n,
        values,
        integrals,
        warning,
    })
}

pub fn sample_ou(
    spec: &NoiseSpec,
    grid: &TimeGrid,
    master_seed: u64,
    n: usize,
) -> Result<TrajectoryEnsemble> {
    expect_kind(spec, "ou")?;
    sample(spec, grid, master_seed, n)
}

pub fn sample_rtn(
    spec: &NoiseSpec,
    grid: &TimeGrid,
    master_seed: u64,
    n: usize,
) -> Result<TrajectoryEnsemble> {
    expect_kind(spec, "rtn")?;
    sample(spec, grid, master_seed, n)
}

pub fn sample_filtered(
    spec: &NoiseSpec,
    grid: &TimeGrid,
    master_seed: u64,
    n: usize,
) -> Result<TrajectoryEnsemble> {
    if !spec.is_filtered() {
        return Err(Error::KindMismatch {
            expected: "filtered_ou or filtered_rtn",
            got: spec.kind_name(),
        });
    }
    sample(spec, grid, master_seed, n)
}

fn expect_kind(spec: &NoiseSpec, expected: &'static str) -> Result<()> {
    if spec.kind_name() == expected {
        Ok(())
    } else {
        Err(Error::KindMismatch {
            expected,
            got: spec.kind_name(),
        })
    }
}
