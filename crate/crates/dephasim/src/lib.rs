//! Qubit pure dephasing driven by classical stochastic noise.
//!
//! Four noise processes (Ornstein-Uhlenbeck, random telegraph, and their
//! high-pass-filtered versions) drive the phase of a two-level system; the
//! ensemble-averaged coherence D(t) is estimated by Monte Carlo, compared
//! against closed forms where they exist, and analyzed for trace-distance
//! revivals, the operational witness of quantum non-Markovianity.

pub mod analytic;
pub mod dephasing;
mod error;
pub mod export;
pub mod grid;
pub mod nm;
pub mod noise;
pub mod qubit;
pub mod spectral;
mod stats;

pub use dephasing::{
    curve_ensemble_stats, dephasing_factor, dephasing_factor_with, integrate_paths,
    simulate_curve, CurveBands, DephasingCurve, ErrorBars, IntegratedEnsemble,
};
pub use error::{Error, Result};
pub use export::Meta;
pub use grid::TimeGrid;
pub use nm::{detect_revivals, nm_measure, Revival, RevivalReport, ThresholdPolicy, Verdict};
pub use noise::{sample, sample_filtered, sample_ou, sample_rtn, NoiseSpec, TrajectoryEnsemble};
pub use qubit::{evolve_state, trace_distance, QubitState};
pub use spectral::{
    autocorr_estimate, fit_peak_frequency, periodogram, prominent_peak_count, SpectrumEstimate,
    Window,
};
