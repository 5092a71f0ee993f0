//! Self-check suites behind `dephasim validate`: closed-form identities and
//! limits (`oracles`), spectral-estimator calibration against exact spectra
//! (`spectra`), and error rates of the revival detector (`statistics`).
//! Each check prints one `ok`/`FAIL` line; the process exits 0 iff all pass.

use dephasim::analytic::{d_ou, d_rtn, d_y, spectrum_y};
use dephasim::{
    detect_revivals, fit_peak_frequency, periodogram, prominent_peak_count, sample,
    simulate_curve, NoiseSpec, SpectrumEstimate, TimeGrid, Verdict, Window,
};

use crate::runner::RunError;

pub const SUITE_NAMES: &[&str] = &["oracles", "spectra", "statistics", "all"];

#[derive(Default)]
struct Checker {
    passed: usize,
    failed: usize,
}

impl Checker {
    fn run(&mut self, name: &str, outcome: Result<(), String>) {
        match outcome {
            Ok(()) => {
                println!("ok {name}");
                self.passed += 1;
            }
            Err(detail) => {
                println!("FAIL {name}: {detail}");
                self.failed += 1;
            }
        }
    }
}

fn rel(label: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    let err = (got - want).abs() / want.abs().max(f64::MIN_POSITIVE);
    if err <= tol {
        Ok(())
    } else {
        Err(format!(
            "{label}: got {got:.9e}, want {want:.9e} (rel err {err:.2e} > {tol:.0e})"
        ))
    }
}

fn abs_close(label: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    let err = (got - want).abs();
    if err <= tol {
        Ok(())
    } else {
        Err(format!(
            "{label}: got {got:.9e}, want {want:.9e} (abs err {err:.2e} > {tol:.0e})"
        ))
    }
}

fn lib<T>(r: dephasim::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c1 = b - phi * (b - a);
        let c2 = a + phi * (b - a);
        if f(c1) < f(c2) {
            a = c1;
        } else {
            b = c2;
        }
    }
    0.5 * (a + b)
}

fn oracles(c: &mut Checker) {
    c.run("d_at_zero_is_one", {
        (|| {
            for (name, d) in [
                ("ou", lib(d_ou(0.0, 0.3, 0.8, 1.2))?),
                ("rtn", lib(d_rtn(0.0, 0.3, 1.2))?),
                ("y", lib(d_y(0.0, 0.3, 0.8, 0.9, 1.2))?),
            ] {
                if d != 1.0 {
                    return Err(format!("{name}: D(0) = {d}, want exactly 1"));
                }
            }
            Ok(())
        })()
    });

    c.run("ou_short_time_series", {
        (|| {
            // -ln D = pref * (2x - 3 + 4e^{-x} - e^{-2x}) with x = gamma t;
            // compare against the Taylor expansion of the bracket at x = 1e-2.
            let (gamma, sigma, omega0) = (0.7f64, 0.9, 1.3);
            let x = 1e-2f64;
            let d = lib(d_ou(x / gamma, gamma, sigma, omega0))?;
            let pref = omega0 * omega0 * sigma * sigma / gamma.powi(3);
            let bracket =
                x.powi(3) * (2.0 / 3.0 - x / 2.0 + 7.0 * x * x / 30.0 - x.powi(3) / 12.0);
            rel("-ln D", -d.ln(), pref * bracket, 1e-8)
        })()
    });

    c.run("rtn_branch_continuity", {
        (|| {
            // The formula changes branch at gamma = 2 omega0; the value there
            // must equal the degenerate limit and be continuous from both sides.
            let (omega0, t) = (1.0f64, 3.7);
            let g0 = 2.0 * omega0;
            let mid = lib(d_rtn(t, g0, omega0))?;
            rel("degenerate point", mid, (-g0 * t).exp() * (1.0 + g0 * t), 1e-12)?;
            for eps in [-1e-9, 1e-9] {
                let near = lib(d_rtn(t, g0 * (1.0 + eps), omega0))?;
                abs_close("one-sided limit", near, mid, 1e-8)?;
            }
            Ok(())
        })()
    });

    c.run("rtn_zero_rate_limit", {
        (|| {
            for &t in &[0.3, 0.7, 1.1, 1.9, 2.7] {
                let d = lib(d_rtn(t, 1e-12, 1.0))?;
                abs_close("frozen-telegraph limit", d, (2.0 * t).cos().abs(), 1e-10)?;
            }
            Ok(())
        })()
    });

    c.run("y_equal_rates_continuity", {
        (|| {
            // gamma = kappa is a removable singularity of the closed form.
            let (g, s, w, t) = (0.5f64, 0.8, 1.2, 3.0);
            let mid = lib(d_y(t, g, s, g, w))?;
            for eps in [-1e-9, 1e-9] {
                let near = lib(d_y(t, g, s, g * (1.0 + eps), w))?;
                abs_close("one-sided limit", near, mid, 1e-8)?;
            }
            Ok(())
        })()
    });

    c.run("y_long_time_plateau", {
        (|| {
            let (g, s, k, w) = (0.3f64, 0.8, 1.1, 1.2);
            let d = lib(d_y(300.0, g, s, k, w))?;
            let pref = w * w * s * s / (g * k * (g + k));
            rel("plateau", d, (-pref).exp(), 1e-12)
        })()
    });

    c.run("spectrum_y_peak_location", {
        let (g, k, s) = (0.3f64, 1.7, 0.9);
        let peak = golden_max(|w| spectrum_y(w, g, k, s), 1e-2, 10.0);
        rel("argmax of S_Y", peak, (g * k).sqrt(), 1e-5)
    });

    c.run("spectrum_y_asymptotics", {
        (|| {
            let (g, k, s) = (0.3f64, 1.7, 0.9);
            let pref = s * s / (2.0 * std::f64::consts::PI);
            let lo = 1e-5;
            rel(
                "omega^2 rise",
                spectrum_y(lo, g, k, s),
                pref * lo * lo / (g * g * k * k),
                1e-6,
            )?;
            let hi = 1e6;
            rel(
                "omega^-2 tail",
                spectrum_y(hi, g, k, s),
                pref / (hi * hi),
                1e-6,
            )
        })()
    });
}

fn spectra(c: &mut Checker, seed: u64) {
    c.run("parseval_rectangular", {
        (|| {
            // Discrete Parseval identity of the estimator: the one-sided
            // integral of the averaged periodogram equals the mean square of
            // the data, bit-tight for the rectangular window and odd M.
            let grid = lib(TimeGrid::new(50.0, 501, 4))?;
            let spec = NoiseSpec::FilteredRtn {
                gamma: 0.5,
                mu: 1.0,
            };
            let e = lib(sample(&spec, &grid, seed, 100))?;
            let est = lib(periodogram(&e, 0.0, Window::Rectangular))?;
            let s = est.s_values();
            let total = est.delta_omega() * (s[0] + 2.0 * s[1..].iter().sum::<f64>());
            let vals = e.values();
            let ms = vals.iter().map(|x| x * x).sum::<f64>() / vals.len() as f64;
            rel("integrated spectrum vs mean square", total, ms, 1e-10)
        })()
    });

    let filtered_ou: Result<SpectrumEstimate, String> = (|| {
        let grid = lib(TimeGrid::new(400.0, 4001, 8))?;
        let spec = NoiseSpec::FilteredOu {
            gamma: 0.1,
            sigma: 0.63,
            kappa: 1.0,
        };
        let e = lib(sample(&spec, &grid, seed.wrapping_add(1), 1200))?;
        lib(periodogram(&e, 40.0, Window::Rectangular))
    })();
    match filtered_ou {
        Err(e) => {
            c.run("filtered_ou_band_calibration", Err(e.clone()));
            c.run("filtered_ou_peak_location", Err(e));
        }
        Ok(est) => {
            c.run("filtered_ou_band_calibration", {
                (|| {
                    let (mut worst, mut worst_w, mut n) = (0.0f64, 0.0f64, 0usize);
                    for (&w, &s) in est.omegas().iter().zip(est.s_values()) {
                        if !(0.05..=5.0).contains(&w) {
                            continue;
                        }
                        n += 1;
                        let truth = spectrum_y(w, 0.1, 1.0, 0.63);
                        let err = (s - truth).abs() / truth;
                        if err > worst {
                            (worst, worst_w) = (err, w);
                        }
                    }
                    if n < 100 {
                        return Err(format!("only {n} bins fell in [0.05, 5]"));
                    }
                    if worst <= 0.15 {
                        Ok(())
                    } else {
                        Err(format!(
                            "worst rel err {worst:.3} at omega = {worst_w:.3} (limit 0.15 across {n} bins)"
                        ))
                    }
                })()
            });
            c.run("filtered_ou_peak_location", {
                (|| {
                    let peak = lib(fit_peak_frequency(&est))?;
                    rel("fitted peak vs sqrt(gamma kappa)", peak, 0.1f64.sqrt(), 0.15)
                })()
            });
        }
    }

    c.run("ou_lorentzian_monotone", {
        (|| {
            let grid = lib(TimeGrid::new(60.0, 601, 4))?;
            let spec = NoiseSpec::Ou {
                gamma: 0.5,
                sigma: 1.0,
            };
            let e = lib(sample(&spec, &grid, seed.wrapping_add(2), 300))?;
            let est = lib(periodogram(&e, 20.0, Window::Rectangular))?;
            let s = est.s_values();
            let blocks = [1..6, 6..16, 16..40, 40..100, 100..201];
            let means: Vec<f64> = blocks
                .iter()
                .map(|r| s[r.clone()].iter().sum::<f64>() / r.len() as f64)
                .collect();
            for pair in means.windows(2) {
                if pair[1] >= pair[0] {
                    return Err(format!(
                        "block means not decreasing: {:?}",
                        means.iter().map(|m| format!("{m:.3e}")).collect::<Vec<_>>()
                    ));
                }
            }
            Ok(())
        })()
    });

    let filtered_rtn: Result<SpectrumEstimate, String> = (|| {
        let grid = lib(TimeGrid::new(400.0, 4001, 8))?;
        let spec = NoiseSpec::FilteredRtn {
            gamma: 0.5,
            mu: 0.5,
        };
        let e = lib(sample(&spec, &grid, seed.wrapping_add(3), 400))?;
        lib(periodogram(&e, 40.0, Window::Rectangular))
    })();
    match filtered_rtn {
        Err(e) => {
            c.run("filtered_rtn_zero_dip", Err(e.clone()));
            c.run("filtered_rtn_single_peak", Err(e.clone()));
            c.run("filtered_rtn_peak_location", Err(e));
        }
        Ok(est) => {
            c.run("filtered_rtn_zero_dip", {
                let s = est.s_values();
                let max = s.iter().cloned().fold(f64::MIN, f64::max);
                if s[0] < 0.2 * max {
                    Ok(())
                } else {
                    Err(format!(
                        "S(0) = {:.3e} is not a dip against the peak {max:.3e}",
                        s[0]
                    ))
                }
            });
            c.run("filtered_rtn_single_peak", {
                let count = prominent_peak_count(&est, 0.2);
                if count == 1 {
                    Ok(())
                } else {
                    Err(format!("found {count} prominent peaks, want exactly 1"))
                }
            });
            c.run("filtered_rtn_peak_location", {
                (|| {
                    let peak = lib(fit_peak_frequency(&est))?;
                    rel("fitted peak vs sqrt(2 gamma mu)", peak, 0.5f64.sqrt(), 0.15)
                })()
            });
        }
    }
}

/// Unrelated master seed per curve (splitmix-style spread).
fn curve_seed(seed: u64, tag: u64, i: usize) -> u64 {
    let z = (seed ^ (tag << 32) ^ i as u64).wrapping_mul(0x9E3779B97F4A7C15);
    z ^ (z >> 31)
}

fn statistics(c: &mut Checker, seed: u64) {
    const N_CURVES: usize = 100;
    const N: usize = 10_000;

    c.run("ou_false_positive_rate", {
        (|| {
            let grid = lib(TimeGrid::new(2.5, 101, 2))?;
            let spec = NoiseSpec::Ou {
                gamma: 0.1,
                sigma: 0.63,
            };
            let mut fp = 0;
            for i in 0..N_CURVES {
                let curve = lib(simulate_curve(&spec, &grid, 1.0, N, curve_seed(seed, 0, i)))?;
                if lib(detect_revivals(&curve, 3.0))?.verdict == Verdict::NonMarkovian {
                    fp += 1;
                }
            }
            if fp <= 5 {
                Ok(())
            } else {
                Err(format!(
                    "{fp} of {N_CURVES} monotone OU curves flagged non-Markovian (limit 5)"
                ))
            }
        })()
    });

    c.run("rtn_true_positive_rate", {
        (|| {
            let grid = lib(TimeGrid::new(40.0, 201, 1))?;
            let spec = NoiseSpec::Rtn { gamma: 0.1 };
            let mut tp = 0;
            for i in 0..N_CURVES {
                let curve = lib(simulate_curve(&spec, &grid, 1.0, N, curve_seed(seed, 1, i)))?;
                if lib(detect_revivals(&curve, 3.0))?.verdict == Verdict::NonMarkovian {
                    tp += 1;
                }
            }
            if tp >= 95 {
                Ok(())
            } else {
                Err(format!(
                    "only {tp} of {N_CURVES} RTN curves flagged non-Markovian (need 95)"
                ))
            }
        })()
    });
}

pub fn run_suite(suite: &str, seed: u64) -> Result<String, RunError> {
    let mut c = Checker::default();
    match suite {
        "oracles" => oracles(&mut c),
        "spectra" => spectra(&mut c, seed),
        "statistics" => statistics(&mut c, seed),
        "all" => {
            oracles(&mut c);
            spectra(&mut c, seed);
            statistics(&mut c, seed);
        }
        other => {
            return Err(RunError::Usage(format!(
                "unknown suite `{other}`; valid suites: {}",
                SUITE_NAMES.join(", ")
            )))
        }
    }
    let total = c.passed + c.failed;
    if c.failed == 0 {
        Ok(format!("validate {suite}: {total} checks passed"))
    } else {
        Err(RunError::Check(format!(
            "validate {suite}: {} of {total} checks failed",
            c.failed
        )))
    }
}
