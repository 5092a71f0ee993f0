use serde::Serialize;

use crate::error::{check_non_negative, check_positive, invalid, Result};

/// Uniform output grid on `[0, t_max]` with `n_out` points (including t = 0)
/// and `substeps` integration substeps per output step.
///
/// Output step `dt = t_max / (n_out - 1)`; integration step `h = dt / substeps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    t_max: f64,
    n_out: usize,
    substeps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, n_out: usize, substeps: usize) -> Result<Self> {
        check_positive("grid.t_max", t_max)?;
        if n_out < 2 {
            return Err(invalid("grid.n_out", format!("must be >= 2, got {n_out}")));
        }
        if substeps < 1 {
            return Err(invalid(
                "grid.substeps",
                format!("must be >= 1, got {substeps}"),
            ));
        }
        Ok(TimeGrid {
            t_max,
            n_out,
            substeps,
        })
    }

    /// Picks the substep count so that `h <= 0.05 / max_rate`: fine enough that
    /// the fastest rate in the model is well resolved by the integrator. A
    /// zero rate (a frozen process) needs no refinement.
    pub fn with_auto_substeps(t_max: f64, n_out: usize, max_rate: f64) -> Result<Self> {
        check_non_negative("max_rate", max_rate)?;
        let grid = TimeGrid::new(t_max, n_out, 1)?;
        let substeps = (grid.dt() * max_rate / 0.05).ceil().max(1.0) as usize;
        TimeGrid::new(t_max, n_out, substeps)
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn substeps(&self) -> usize {
        self.substeps
    }

    pub fn dt(&self) -> f64 {
        self.t_max / (self.n_out - 1) as f64
    }

    pub fn h(&self) -> f64 {
        self.dt() / self.substeps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_out).map(|k| self.time(k)).collect()
    }
}
