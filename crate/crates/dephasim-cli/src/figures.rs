//! Preconfigured parameter sets for the named figures, produced as data
//! files: Monte Carlo curve with 1/2-sigma bands from the 100x100 protocol,
//! an analytic overlay where a closed form exists, a revival report, and an
//! SVG rendering. `fig1` produces the two filtered-telegraph spectra.

use std::path::Path;

use dephasim::analytic::d_for_spec;
use dephasim::export::{report_json, spectrum_csv, spectrum_json, xy_csv};
use dephasim::{
    curve_ensemble_stats, detect_revivals, periodogram, sample, Meta, NoiseSpec, TimeGrid,
    Window,
};

use crate::config::{Format, RunConfig};
use crate::runner::{curve_svg, summary_line, write_file, RunError};
use crate::svg::{render, Series};

pub const FIGURE_NAMES: &[&str] = &["fig1", "fig3a", "fig3b", "fig4a", "fig4b", "fig4c"];

struct CurveFigure {
    name: &'static str,
    title: &'static str,
    noise: NoiseSpec,
    t_max: f64,
    n_out: usize,
    substeps: usize,
}

/// Figure presets. All use omega0 = 1 and the 100x100 band protocol; the
/// grids span several relaxation times of each regime (the OU curve at these
/// couplings is numerically dead past t of a few, hence the short grid).
fn curve_figure(name: &str) -> Option<CurveFigure> {
    let fig = match name {
        "fig3a" => CurveFigure {
            name: "fig3a",
            title: "OU dephasing, gamma=0.1 sigma=0.63",
            noise: NoiseSpec::Ou {
                gamma: 0.1,
                sigma: 0.63,
            },
            t_max: 2.5,
            n_out: 101,
            substeps: 2,
        },
        "fig3b" => CurveFigure {
            name: "fig3b",
            title: "RTN dephasing, gamma=0.1",
            noise: NoiseSpec::Rtn { gamma: 0.1 },
            t_max: 40.0,
            n_out: 201,
            substeps: 1,
        },
        "fig4a" => CurveFigure {
            name: "fig4a",
            title: "filtered-OU dephasing, gamma=0.1 sigma=0.63 kappa=1",
            noise: NoiseSpec::FilteredOu {
                gamma: 0.1,
                sigma: 0.63,
                kappa: 1.0,
            },
            t_max: 40.0,
            n_out: 201,
            substeps: 32,
        },
        "fig4b" => CurveFigure {
            name: "fig4b",
            title: "filtered-RTN dephasing, gamma=0.1 mu=1",
            noise: NoiseSpec::FilteredRtn {
                gamma: 0.1,
                mu: 1.0,
            },
            t_max: 40.0,
            n_out: 201,
            substeps: 16,
        },
        "fig4c" => CurveFigure {
            name: "fig4c",
            title: "filtered-RTN dephasing, gamma=0.1 mu=0.5",
            noise: NoiseSpec::FilteredRtn {
                gamma: 0.1,
                mu: 0.5,
            },
            t_max: 40.0,
            n_out: 201,
            substeps: 16,
        },
        _ => return None,
    };
    Some(fig)
}

const N_CURVES: usize = 100;
const N_PER_CURVE: usize = 100;

fn run_curve_figure(
    fig: &CurveFigure,
    seed: u64,
    out: &Path,
    format: Format,
    significance: f64,
) -> Result<String, RunError> {
    let grid = TimeGrid::new(fig.t_max, fig.n_out, fig.substeps)?;
    let cfg = RunConfig {
        noise: fig.noise,
        grid,
        omega0: 1.0,
        n_realizations: N_CURVES * N_PER_CURVE,
        n_curves: Some(N_CURVES),
        seed,
        significance,
        outputs: vec![crate::config::Artifact::Bands, crate::config::Artifact::Report],
        output_dir: out.to_path_buf(),
        format,
        window: Window::Rectangular,
        transient_cut: 0.0,
        max_lag: 0.0,
    };
    let meta = cfg.meta(&format!("figure {}", fig.name));

    let curve = curve_ensemble_stats(&fig.noise, &grid, 1.0, N_CURVES, N_PER_CURVE, seed)?;
    let report = detect_revivals(&curve, significance)?;

    match format {
        Format::Csv => write_file(
            out,
            &format!("{}_curve.csv", fig.name),
            &dephasim::export::curve_csv(&curve, &meta),
        )?,
        Format::Json => write_file(
            out,
            &format!("{}_curve.json", fig.name),
            &dephasim::export::curve_json(&curve, &meta),
        )?,
    }
    write_file(
        out,
        &format!("{}_report.json", fig.name),
        &report_json(&report, &meta),
    )?;

    let mut analytic_pts = Some(Vec::with_capacity(grid.n_out()));
    for t in grid.times() {
        match d_for_spec(&fig.noise, 1.0, t)? {
            Some(v) => analytic_pts.as_mut().expect("still building").push((t, v)),
            None => {
                analytic_pts = None;
                break;
            }
        }
    }
    if let Some(ref pts) = analytic_pts {
        let mut ameta = Meta::new();
        for (k, v) in meta.entries() {
            ameta.push(k, v);
        }
        ameta.push("content", "closed-form dephasing factor on the figure grid");
        write_file(
            out,
            &format!("{}_analytic.csv", fig.name),
            &xy_csv("t", "value", pts, &ameta),
        )?;
    }

    let label = format!("MC mean ({N_CURVES}x{N_PER_CURVE})");
    write_file(
        out,
        &format!("{}.svg", fig.name),
        &curve_svg(fig.title, &curve, analytic_pts.as_deref(), &label),
    )?;

    Ok(summary_line(fig.name, &report, seed, out))
}

const FIG1_GAMMA: f64 = 0.5;
const FIG1_T_MAX: f64 = 400.0;
const FIG1_N_OUT: usize = 4001;
const FIG1_SUBSTEPS: usize = 8;
const FIG1_CUT: f64 = 40.0;
const FIG1_N: usize = 2000;

fn fig1_meta(mu: f64, seed: u64) -> Meta {
    let mut m = Meta::new();
    m.push("tool", format!("dephasim {}", env!("CARGO_PKG_VERSION")));
    m.push("command", "figure fig1");
    m.push("noise.kind", "filtered_rtn");
    m.push("noise.gamma", FIG1_GAMMA);
    m.push("noise.mu", mu);
    m.push("grid.t_max", FIG1_T_MAX);
    m.push("grid.n_out", FIG1_N_OUT);
    m.push("grid.substeps", FIG1_SUBSTEPS);
    m.push("run.n_realizations", FIG1_N);
    m.push("run.seed", seed);
    m.push("spectral.window", "rectangular");
    m.push("spectral.transient_cut", FIG1_CUT);
    m
}

fn run_fig1(seed: u64, out: &Path, format: Format) -> Result<String, RunError> {
    let grid = TimeGrid::new(FIG1_T_MAX, FIG1_N_OUT, FIG1_SUBSTEPS)?;
    let mut plotted = Vec::new();
    for (mu, stem) in [(1.0, "fig1_spectrum_mu1"), (0.5, "fig1_spectrum_mu05")] {
        let spec = NoiseSpec::FilteredRtn {
            gamma: FIG1_GAMMA,
            mu,
        };
        let ensemble = sample(&spec, &grid, seed, FIG1_N)?;
        let est = periodogram(&ensemble, FIG1_CUT, Window::Rectangular)?;
        let meta = fig1_meta(mu, seed);
        match format {
            Format::Csv => write_file(out, &format!("{stem}.csv"), &spectrum_csv(&est, &meta))?,
            Format::Json => write_file(out, &format!("{stem}.json"), &spectrum_json(&est, &meta))?,
        }
        let band = est.band(3.0)?;
        plotted.push((
            mu,
            band.omegas()
                .iter()
                .copied()
                .zip(band.s_values().iter().copied())
                .collect::<Vec<_>>(),
        ));
    }
    let series: Vec<Series> = plotted
        .iter()
        .map(|(mu, pts)| Series {
            label: if *mu == 1.0 { "mu = 1" } else { "mu = 0.5" },
            color: if *mu == 1.0 { "#1f77b4" } else { "#d62728" },
            dashed: false,
            points: pts,
        })
        .collect();
    write_file(
        out,
        "fig1.svg",
        &render(
            "filtered-RTN noise spectra, gamma=0.5",
            "omega",
            "S(omega)",
            &[],
            &series,
        ),
    )?;
    Ok(format!(
        "fig1: spectra for mu=1 and mu=0.5 (N={FIG1_N} each) seed={seed} out={}",
        out.display()
    ))
}

pub fn run_figure(
    name: &str,
    seed: u64,
    out: &Path,
    format: Format,
    significance: f64,
) -> Result<String, RunError> {
    if name == "fig1" {
        return run_fig1(seed, out, format);
    }
    match curve_figure(name) {
        Some(fig) => run_curve_figure(&fig, seed, out, format, significance),
        None => Err(RunError::Usage(format!(
            "unknown figure `{name}`; valid names: {}",
            FIGURE_NAMES.join(", ")
        ))),
    }
}
