//! Streaming statistics of complex unit phasors.
//!
//! Ensemble averages are accumulated in fixed-size path chunks and the chunk
//! partial sums are merged in chunk order. Floating-point addition order is
//! therefore a pure function of (seed, N), never of the thread schedule.

use num_complex::Complex64;

/// Paths per accumulation chunk. Chosen so a chunk of trajectories stays a
/// few MB even on long grids.
pub(crate) const CHUNK: usize = 1024;

/// Per-point sums of cos θ, sin θ and their second moments across paths.
#[derive(Debug, Clone)]
pub(crate) struct PhasorSums {
    pub(crate) n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
    re2: Vec<f64>,
    im2: Vec<f64>,
    reim: Vec<f64>,
}

impl PhasorSums {
    pub(crate) fn new(n_out: usize) -> Self {
        PhasorSums {
            n: 0,
            re: vec![0.0; n_out],
            im: vec![0.0; n_out],
            re2: vec![0.0; n_out],
            im2: vec![0.0; n_out],
            reim: vec![0.0; n_out],
        }
    }

    /// Fold in one path of integrated-process values; the phase at point `k`
    /// is `scale * integrated[k]`.
    pub(crate) fn add_path(&mut self, integrated: &[f64], scale: f64) {
        debug_assert_eq!(integrated.len(), self.re.len());
        for (k, &x) in integrated.iter().enumerate() {
            let (s, c) = (scale * x).sin_cos();
            self.re[k] += c;
            self.im[k] += s;
            self.re2[k] += c * c;
            self.im2[k] += s * s;
            self.reim[k] += c * s;
        }
        self.n += 1;
    }

    pub(crate) fn merge(&mut self, other: &PhasorSums) {
        self.n += other.n;
        for (a, b) in [
            (&mut self.re, &other.re),
            (&mut self.im, &other.im),
            (&mut self.re2, &other.re2),
            (&mut self.im2, &other.im2),
            (&mut self.reim, &other.reim),
        ] {
            for (x, y) in a.iter_mut().zip(b) {
                *x += *y;
            }
        }
    }

    /// Mean phasor per point and the delta-method standard error of its
    /// modulus. For |c| ≈ 0 the gradient of the modulus degenerates and we
    /// fall back to the Rayleigh-floor scale 1/sqrt(2N).
    pub(crate) fn finalize(&self) -> (Vec<Complex64>, Vec<f64>) {
        let n = self.n as f64;
        let mut phasors = Vec::with_capacity(self.re.len());
        let mut se = Vec::with_capacity(self.re.len());
        for k in 0..self.re.len() {
            let ma = self.re[k] / n;
            let mb = self.im[k] / n;
            phasors.push(Complex64::new(ma, mb));
            if self.n < 2 {
                se.push(0.0);
                continue;
            }
            // sample covariance of (cos θ, sin θ)
            let saa = (self.re2[k] - n * ma * ma) / (n - 1.0);
            let sbb = (self.im2[k] - n * mb * mb) / (n - 1.0);
            let sab = (self.reim[k] - n * ma * mb) / (n - 1.0);
            let c = ma.hypot(mb);
            let e = if c < 1e-12 {
                (2.0 * n).sqrt().recip()
            } else {
                let var = (ma * ma * saa + mb * mb * sbb + 2.0 * ma * mb * sab) / n;
                var.max(0.0).sqrt() / c
            };
            se.push(e);
        }
        (phasors, se)
    }
}

/// Pointwise mean and sample standard deviation across equal-length curves.
pub(crate) fn pointwise_mean_sd(curves: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let m = curves.len();
    let n_out = curves[0].len();
    let mut mean = vec![0.0; n_out];
    for c in curves {
        for (acc, v) in mean.iter_mut().zip(c) {
            *acc += v;
        }
    }
    for v in &mut mean {
        *v /= m as f64;
    }
    let mut sd = vec![0.0; n_out];
    if m > 1 {
        for c in curves {
            for (acc, (v, mu)) in sd.iter_mut().zip(c.iter().zip(&mean)) {
                let d = v - mu;
                *acc += d * d;
            }
        }
        for v in &mut sd {
            *v = (*v / (m as f64 - 1.0)).sqrt();
        }
    }
    (mean, sd)
}
