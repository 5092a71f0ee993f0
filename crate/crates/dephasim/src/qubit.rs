//! Qubit density matrices under pure dephasing, and the trace distance used
//! to witness information backflow.

use num_complex::Complex64;

use crate::dephasing::DephasingCurve;
use crate::error::{invalid, Error, Result};

const TOL: f64 = 1e-12;

/// 2×2 density matrix in the σ_z eigenbasis {|0⟩, |1⟩}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    m: [[Complex64; 2]; 2],
}

impl QubitState {
    /// Validates hermiticity, unit trace and positivity (eigenvalues allowed
    /// down to −1e−12 for floating-point slack).
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self> {
        if m.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite matrix entry".to_string()));
        }
        if m[0][0].im.abs() > TOL || m[1][1].im.abs() > TOL {
            return Err(Error::InvalidState("diagonal must be real".to_string()));
        }
        if (m[0][1] - m[1][0].conj()).norm() > TOL {
            return Err(Error::InvalidState("matrix is not Hermitian".to_string()));
        }
        if (m[0][0].re + m[1][1].re - 1.0).abs() > TOL {
            return Err(Error::InvalidState("trace must be 1".to_string()));
        }
        let (lo, _) = hermitian_eigenvalues(m[0][0].re, m[1][1].re, m[0][1]);
        if lo < -TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {lo:e}")));
        }
        Ok(QubitState { m })
    }

    /// |+⟩⟨+|, the coherence-maximizing state.
    pub fn plus() -> Self {
        let h = Complex64::new(0.5, 0.0);
        QubitState {
            m: [[h, h], [h, h]],
        }
    }

    /// |−⟩⟨−|.
    pub fn minus() -> Self {
        let h = Complex64::new(0.5, 0.0);
        QubitState {
            m: [[h, -h], [-h, h]],
        }
    }

    pub fn ground() -> Self {
        let mut m = [[Complex64::ZERO; 2]; 2];
        m[0][0] = Complex64::ONE;
        QubitState { m }
    }

    pub fn excited() -> Self {
        let mut m = [[Complex64::ZERO; 2]; 2];
        m[1][1] = Complex64::ONE;
        QubitState { m }
    }

    pub fn matrix(&self) -> &[[Complex64; 2]; 2] {
        &self.m
    }

    pub fn element(&self, i: usize, j: usize) -> Complex64 {
        self.m[i][j]
    }
}

/// Eigenvalues (low, high) of a Hermitian 2×2 with real diagonal (p, r) and
/// off-diagonal q.
fn hermitian_eigenvalues(p: f64, r: f64, q: Complex64) -> (f64, f64) {
    let mid = 0.5 * (p + r);
    let rad = (0.5 * (p - r)).hypot(q.norm());
    (mid - rad, mid + rad)
}

/// Apply the dephasing map at grid point `k`: populations are untouched, the
/// coherence ρ¹⁰ picks up the retained complex mean phasor c(t_k) and ρ⁰¹ its
/// conjugate.
pub fn evolve_state(rho0: &QubitState, curve: &DephasingCurve, k: usize) -> Result<QubitState> {
    if k >= curve.grid().n_out() {
        return Err(invalid(
            "k",
            format!("index {k} outside grid of {} points", curve.grid().n_out()),
        ));
    }
    let c = curve.phasor(k);
    let mut m = rho0.m;
    m[1][0] *= c;
    m[0][1] *= c.conj();
    QubitState::new(m)
}

/// Half the trace norm of (a − b); lies in [0, 1] for density matrices.
pub fn trace_distance(a: &QubitState, b: &QubitState) -> f64 {
    let p = a.m[0][0].re - b.m[0][0].re;
    let r = a.m[1][1].re - b.m[1][1].re;
    let q = a.m[0][1] - b.m[0][1];
    let (lo, hi) = hermitian_eigenvalues(p, r, q);
    0.5 * (lo.abs() + hi.abs())
}
