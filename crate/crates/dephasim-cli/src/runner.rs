//! Shared execution path: run a configured simulation, write the selected
//! artifacts, and produce the one-line summary.

use std::fmt;
use std::fs;
use std::path::Path;

use dephasim::export::{
    curve_csv, curve_json, fmt17, report_json, spectrum_csv, spectrum_json, xy_csv,
};
use dephasim::{
    autocorr_estimate, curve_ensemble_stats, detect_revivals, periodogram, sample,
    simulate_curve, DephasingCurve, Error, Meta, RevivalReport, Verdict,
};

use crate::config::{Artifact, ConfigError, Format, RunConfig};
use crate::svg::{render, Band, Series};

#[derive(Debug)]
pub enum RunError {
    /// Bad configuration: exit 2, message names the offending key.
    Config(ConfigError),
    /// Bad command usage (unknown figure/suite): exit 2.
    Usage(String),
    /// Numerical failure during computation: exit 3.
    Numerical(String),
    /// Filesystem trouble writing artifacts: exit 1.
    Io(String),
    /// One or more validation checks failed: exit 1.
    Check(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Usage(m) => write!(f, "{m}"),
            RunError::Numerical(m) => write!(f, "numerical failure: {m}"),
            RunError::Io(m) => write!(f, "{m}"),
            RunError::Check(m) => write!(f, "{m}"),
        }
    }
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) | RunError::Usage(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::Io(_) | RunError::Check(_) => 1,
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

/// Library errors left after config validation are numerical by exclusion.
impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Numerical(e.to_string())
    }
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), RunError> {
    fs::create_dir_all(dir)
        .map_err(|e| RunError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| RunError::Io(format!("cannot write {}: {e}", path.display())))
}

fn curve_points(curve: &DephasingCurve) -> Vec<(f64, f64)> {
    curve
        .grid()
        .times()
        .iter()
        .copied()
        .zip(curve.d_values().iter().copied())
        .collect()
}

/// SVG of a dephasing curve: 2-sigma and 1-sigma bands when present, the MC
/// mean, and an optional analytic overlay.
pub fn curve_svg(
    title: &str,
    curve: &DephasingCurve,
    analytic: Option<&[(f64, f64)]>,
    mc_label: &str,
) -> String {
    let times = curve.grid().times();
    let zip = |vals: &[f64]| -> Vec<(f64, f64)> {
        times.iter().copied().zip(vals.iter().copied()).collect()
    };
    let mut bands_data = Vec::new();
    if let Some(b) = curve.bands() {
        bands_data.push((zip(b.lo2()), zip(b.hi2()), "#dbe9f6", "2-sigma band"));
        bands_data.push((zip(b.lo1()), zip(b.hi1()), "#b3d1ec", "1-sigma band"));
    }
    let bands: Vec<Band> = bands_data
        .iter()
        .map(|(lo, hi, fill, label)| Band {
            label,
            fill,
            lo,
            hi,
        })
        .collect();
    let mc = curve_points(curve);
    let mut series = vec![Series {
        label: mc_label,
        color: "#1f77b4",
        dashed: false,
        points: &mc,
    }];
    if let Some(a) = analytic {
        series.push(Series {
            label: "analytic",
            color: "#d62728",
            dashed: true,
            points: a,
        });
    }
    render(title, "t", "D(t)", &bands, &series)
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Markovian => "markovian",
        Verdict::NonMarkovian => "non_markovian",
    }
}

pub fn summary_line(label: &str, report: &RevivalReport, seed: u64, out: &Path) -> String {
    format!(
        "{label}: verdict={} nm_measure={} revivals={} seed={seed} out={}",
        verdict_name(report.verdict),
        fmt17(report.nm_measure),
        report.revivals.len(),
        out.display()
    )
}

/// Run `cmd simulate`: compute what the selected artifacts need, write them,
/// and return the summary line.
pub fn simulate(cfg: &RunConfig, meta: &Meta) -> Result<String, RunError> {
    if cfg.grid.n_out() < 3 {
        return Err(RunError::Config(ConfigError {
            key: "grid.n_out".to_string(),
            message: "revival detection needs at least 3 grid points".to_string(),
        }));
    }
    if cfg.noise.is_filtered() && cfg.grid.h() * cfg.noise.max_rate() > 0.1 {
        eprintln!(
            "warning: grid.substeps: h*max_rate = {:.3} > 0.1; the filtered-process update may be visibly biased",
            cfg.grid.h() * cfg.noise.max_rate()
        );
    }

    let curve = match cfg.n_curves {
        Some(n_curves) => {
            let per = cfg.n_realizations / n_curves;
            if per == 0 || per * n_curves != cfg.n_realizations {
                return Err(RunError::Config(ConfigError {
                    key: "run.n_curves".to_string(),
                    message: format!(
                        "run.n_realizations = {} is not a positive multiple of run.n_curves = {n_curves}",
                        cfg.n_realizations
                    ),
                }));
            }
            curve_ensemble_stats(&cfg.noise, &cfg.grid, cfg.omega0, n_curves, per, cfg.seed)?
        }
        None => simulate_curve(&cfg.noise, &cfg.grid, cfg.omega0, cfg.n_realizations, cfg.seed)?,
    };
    let report = detect_revivals(&curve, cfg.significance)?;

    let dir = &cfg.output_dir;
    let wants = |a: Artifact| cfg.outputs.contains(&a);

    if wants(Artifact::Curve) || wants(Artifact::Bands) {
        match cfg.format {
            Format::Csv => write_file(dir, "curve.csv", &curve_csv(&curve, meta))?,
            Format::Json => write_file(dir, "curve.json", &curve_json(&curve, meta))?,
        }
        let label = format!("MC mean (N={})", cfg.n_realizations);
        let title = format!("dephasing factor, {} noise", cfg.noise.kind_name());
        write_file(dir, "curve.svg", &curve_svg(&title, &curve, None, &label))?;
    }
    if wants(Artifact::Report) {
        write_file(dir, "report.json", &report_json(&report, meta))?;
    }
    if wants(Artifact::Spectrum) || wants(Artifact::Autocorr) {
        let ensemble = sample(&cfg.noise, &cfg.grid, cfg.seed, cfg.n_realizations)?;
        if wants(Artifact::Spectrum) {
            let est = periodogram(&ensemble, cfg.transient_cut, cfg.window)?;
            match cfg.format {
                Format::Csv => write_file(dir, "spectrum.csv", &spectrum_csv(&est, meta))?,
                Format::Json => write_file(dir, "spectrum.json", &spectrum_json(&est, meta))?,
            }
        }
        if wants(Artifact::Autocorr) {
            let ac = autocorr_estimate(&ensemble, cfg.max_lag, cfg.transient_cut)?;
            match cfg.format {
                Format::Csv => write_file(dir, "autocorr.csv", &xy_csv("tau", "C", &ac, meta))?,
                Format::Json => {
                    let (taus, cs): (Vec<f64>, Vec<f64>) = ac.into_iter().unzip();
                    let v = serde_json::json!({
                        "metadata": meta_json(meta),
                        "tau": taus,
                        "c": cs,
                    });
                    let mut s = serde_json::to_string_pretty(&v).expect("in-memory");
                    s.push('\n');
                    write_file(dir, "autocorr.json", &s)?;
                }
            }
        }
    }

    Ok(summary_line("simulate", &report, cfg.seed, dir))
}

fn meta_json(meta: &Meta) -> serde_json::Value {
    let map: serde_json::Map<String, serde_json::Value> = meta
        .entries()
        .iter()
        .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
        .collect();
    serde_json::Value::Object(map)
}
