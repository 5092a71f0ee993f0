//! Plain-text run configuration: `section.key = value` lines, merged with
//! built-in defaults and command-line overrides, validated before any
//! computation starts.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use dephasim::{Error, Meta, NoiseSpec, TimeGrid, Window};

#[derive(Debug)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error at `{}`: {}", self.key, self.message)
    }
}

fn bad(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        key: key.to_string(),
        message: message.into(),
    }
}

/// Turn a library validation error into a config error pointing at the
/// config key; library parameter names already use the config spelling.
fn lift(e: Error) -> ConfigError {
    match e {
        Error::InvalidParam { name, reason } => bad(name, reason),
        other => bad("config", other.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Artifact {
    Curve,
    Bands,
    Spectrum,
    Autocorr,
    Report,
}

impl Artifact {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "curve" => Artifact::Curve,
            "bands" => Artifact::Bands,
            "spectrum" => Artifact::Spectrum,
            "autocorr" => Artifact::Autocorr,
            "report" => Artifact::Report,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub significance: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub noise: NoiseSpec,
    pub grid: TimeGrid,
    pub omega0: f64,
    pub n_realizations: usize,
    pub n_curves: Option<usize>,
    pub seed: u64,
    pub significance: f64,
    pub outputs: Vec<Artifact>,
    pub output_dir: PathBuf,
    pub format: Format,
    pub window: Window,
    pub transient_cut: f64,
    pub max_lag: f64,
}

/// Slowest rate in the process, setting correlation/transient time scales.
pub fn min_rate(spec: &NoiseSpec) -> f64 {
    match *spec {
        NoiseSpec::Ou { gamma, .. } | NoiseSpec::Rtn { gamma } => gamma,
        NoiseSpec::FilteredOu { gamma, kappa, .. } => gamma.min(kappa),
        NoiseSpec::FilteredRtn { gamma, mu } => gamma.min(mu),
    }
}

const KNOWN_KEYS: &[&str] = &[
    "noise.kind",
    "noise.gamma",
    "noise.sigma",
    "noise.kappa",
    "noise.mu",
    "grid.t_max",
    "grid.n_out",
    "grid.substeps",
    "run.omega0",
    "run.n_realizations",
    "run.n_curves",
    "run.seed",
    "run.significance",
    "run.outputs",
    "run.output_dir",
    "run.format",
    "spectral.window",
    "spectral.transient_cut",
    "spectral.max_lag",
];

/// Parse the line-oriented config text. `#` starts a comment; blank lines
/// are skipped; keys may appear once.
fn parse_entries(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(line, format!("line {}: expected `section.key = value`", idx + 1)))?;
        let key = key.trim();
        let value = value.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(bad(key, format!("line {}: unknown key", idx + 1)));
        }
        if map.insert(key.to_string(), value.to_string()).is_some() {
            return Err(bad(key, format!("line {}: duplicate key", idx + 1)));
        }
    }
    Ok(map)
}

struct Reader {
    map: BTreeMap<String, String>,
}

impl Reader {
    fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    fn f64(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| bad(key, format!("expected a number, got `{v}`"))),
        }
    }

    fn usize(&mut self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| bad(key, format!("expected a non-negative integer, got `{v}`"))),
        }
    }
}

impl RunConfig {
    /// Merge defaults, the optional config file text, and flag overrides.
    pub fn build(file_text: Option<&str>, over: &Overrides) -> Result<RunConfig, ConfigError> {
        let entries = match file_text {
            Some(t) => parse_entries(t)?,
            None => BTreeMap::new(),
        };
        let mut r = Reader { map: entries };

        let kind = r.take("noise.kind").unwrap_or_else(|| "ou".to_string());
        let gamma = r.f64("noise.gamma", 0.1)?;
        let sigma = r.take("noise.sigma");
        let kappa = r.take("noise.kappa");
        let mu = r.take("noise.mu");
        let parse_or = |key: &str, v: Option<String>, default: f64| -> Result<f64, ConfigError> {
            match v {
                None => Ok(default),
                Some(v) => v
                    .parse()
                    .map_err(|_| bad(key, format!("expected a number, got `{v}`"))),
            }
        };
        let reject_extra = |key: &str, v: &Option<String>, kind: &str| -> Result<(), ConfigError> {
            if v.is_some() {
                Err(bad(key, format!("not a parameter of noise.kind = {kind}")))
            } else {
                Ok(())
            }
        };
        let noise = match kind.as_str() {
            "ou" => {
                reject_extra("noise.kappa", &kappa, "ou")?;
                reject_extra("noise.mu", &mu, "ou")?;
                NoiseSpec::Ou {
                    gamma,
                    sigma: parse_or("noise.sigma", sigma, 0.63)?,
                }
            }
            "rtn" => {
                reject_extra("noise.sigma", &sigma, "rtn")?;
                reject_extra("noise.kappa", &kappa, "rtn")?;
                reject_extra("noise.mu", &mu, "rtn")?;
                NoiseSpec::Rtn { gamma }
            }
            "filtered_ou" => {
                reject_extra("noise.mu", &mu, "filtered_ou")?;
                NoiseSpec::FilteredOu {
                    gamma,
                    sigma: parse_or("noise.sigma", sigma, 0.63)?,
                    kappa: parse_or("noise.kappa", kappa, 1.0)?,
                }
            }
            "filtered_rtn" => {
                reject_extra("noise.sigma", &sigma, "filtered_rtn")?;
                reject_extra("noise.kappa", &kappa, "filtered_rtn")?;
                NoiseSpec::FilteredRtn {
                    gamma,
                    mu: parse_or("noise.mu", mu, 1.0)?,
                }
            }
            other => {
                return Err(bad(
                    "noise.kind",
                    format!("unknown kind `{other}` (ou, rtn, filtered_ou, filtered_rtn)"),
                ))
            }
        };
        noise.validate().map_err(lift)?;

        let t_max = r.f64("grid.t_max", 40.0)?;
        let n_out = r.usize("grid.n_out", 201)?;
        let substeps = r.take("grid.substeps");
        let grid = match substeps.as_deref() {
            None | Some("auto") => {
                TimeGrid::with_auto_substeps(t_max, n_out, noise.max_rate()).map_err(lift)?
            }
            Some(v) => {
                let s: usize = v
                    .parse()
                    .map_err(|_| bad("grid.substeps", format!("expected an integer or `auto`, got `{v}`")))?;
                TimeGrid::new(t_max, n_out, s).map_err(lift)?
            }
        };

        let omega0 = r.f64("run.omega0", 1.0)?;
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(bad("run.omega0", format!("must be > 0, got {omega0}")));
        }
        let n_realizations = r.usize("run.n_realizations", 10_000)?;
        if n_realizations == 0 {
            return Err(bad("run.n_realizations", "must be at least 1"));
        }
        let n_curves = match r.take("run.n_curves") {
            None => None,
            Some(v) => {
                let n: usize = v
                    .parse()
                    .map_err(|_| bad("run.n_curves", format!("expected an integer, got `{v}`")))?;
                if n < 2 {
                    return Err(bad("run.n_curves", "band statistics need at least 2 curves"));
                }
                Some(n)
            }
        };
        let mut seed = match r.take("run.seed") {
            None => 42,
            Some(v) => v
                .parse()
                .map_err(|_| bad("run.seed", format!("expected a u64, got `{v}`")))?,
        };
        let mut significance = r.f64("run.significance", 3.0)?;

        let outputs_raw = r
            .take("run.outputs")
            .unwrap_or_else(|| "curve, report".to_string());
        let mut outputs = Vec::new();
        for part in outputs_raw.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let a = Artifact::parse(part).ok_or_else(|| {
                bad(
                    "run.outputs",
                    format!("unknown artifact `{part}` (curve, bands, spectrum, autocorr, report)"),
                )
            })?;
            if !outputs.contains(&a) {
                outputs.push(a);
            }
        }
        if outputs.is_empty() {
            return Err(bad("run.outputs", "select at least one artifact"));
        }
        if outputs.contains(&Artifact::Bands) && n_curves.is_none() {
            return Err(bad(
                "run.n_curves",
                "the bands artifact needs run.n_curves (the 100x100 protocol splits realizations into that many curves)",
            ));
        }
        let mut output_dir = PathBuf::from(r.take("run.output_dir").unwrap_or_else(|| "out".into()));
        let mut format = match r.take("run.format").as_deref() {
            None | Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(v) => return Err(bad("run.format", format!("expected csv or json, got `{v}`"))),
        };

        let window = match r.take("spectral.window").as_deref() {
            None | Some("rectangular") => Window::Rectangular,
            Some("hann") => Window::Hann,
            Some(v) => {
                return Err(bad(
                    "spectral.window",
                    format!("expected rectangular or hann, got `{v}`"),
                ))
            }
        };
        let default_cut = (10.0 / min_rate(&noise)).min(0.5 * grid.t_max());
        let transient_cut = r.f64("spectral.transient_cut", default_cut)?;
        if !(0.0..grid.t_max()).contains(&transient_cut) {
            return Err(bad(
                "spectral.transient_cut",
                format!("must lie in [0, t_max), got {transient_cut}"),
            ));
        }
        let spectral_wanted = outputs.contains(&Artifact::Spectrum);
        if spectral_wanted {
            let post = grid.t_max() - transient_cut;
            if post / grid.dt() + 1.0 < 64.0 {
                return Err(bad(
                    "spectral.transient_cut",
                    format!(
                        "only {:.0} post-cut samples remain but the periodogram needs 64; raise grid.t_max or grid.n_out, or lower the cut",
                        (post / grid.dt()).floor() + 1.0
                    ),
                ));
            }
        }
        let default_lag = (10.0 / min_rate(&noise)).min(0.5 * (grid.t_max() - transient_cut));
        let max_lag = r.f64("spectral.max_lag", default_lag)?;
        if outputs.contains(&Artifact::Autocorr)
            && !(grid.dt()..grid.t_max() - transient_cut).contains(&max_lag)
        {
            return Err(bad(
                "spectral.max_lag",
                format!(
                    "must lie in [dt, t_max - transient_cut) = [{}, {}), got {max_lag}",
                    grid.dt(),
                    grid.t_max() - transient_cut
                ),
            ));
        }

        if let Some((key, _)) = r.map.into_iter().next() {
            return Err(bad(&key, "unknown key"));
        }

        if let Some(s) = over.seed {
            seed = s;
        }
        if let Some(ref o) = over.out {
            output_dir = o.clone();
        }
        if let Some(f) = over.format {
            format = f;
        }
        if let Some(s) = over.significance {
            significance = s;
        }
        if !(significance.is_finite() && significance > 0.0) {
            return Err(bad(
                "run.significance",
                format!("must be > 0, got {significance}"),
            ));
        }

        Ok(RunConfig {
            noise,
            grid,
            omega0,
            n_realizations,
            n_curves,
            seed,
            significance,
            outputs,
            output_dir,
            format,
            window,
            transient_cut,
            max_lag,
        })
    }

    /// The fully resolved configuration, embedded into every artifact.
    pub fn meta(&self, command: &str) -> Meta {
        let mut m = Meta::new();
        m.push("tool", format!("dephasim {}", env!("CARGO_PKG_VERSION")));
        m.push("command", command);
        m.push("noise.kind", self.noise.kind_name());
        match self.noise {
            NoiseSpec::Ou { gamma, sigma } => {
                m.push("noise.gamma", gamma);
                m.push("noise.sigma", sigma);
            }
            NoiseSpec::Rtn { gamma } => {
                m.push("noise.gamma", gamma);
            }
            NoiseSpec::FilteredOu {
                gamma,
                sigma,
                kappa,
            } => {
                m.push("noise.gamma", gamma);
                m.push("noise.sigma", sigma);
                m.push("noise.kappa", kappa);
            }
            NoiseSpec::FilteredRtn { gamma, mu } => {
                m.push("noise.gamma", gamma);
                m.push("noise.mu", mu);
            }
        }
        m.push("grid.t_max", self.grid.t_max());
        m.push("grid.n_out", self.grid.n_out());
        m.push("grid.substeps", self.grid.substeps());
        m.push("run.omega0", self.omega0);
        m.push("run.n_realizations", self.n_realizations);
        if let Some(c) = self.n_curves {
            m.push("run.n_curves", c);
        }
        m.push("run.seed", self.seed);
        m.push("run.significance", self.significance);
        if self.outputs.contains(&Artifact::Spectrum) || self.outputs.contains(&Artifact::Autocorr)
        {
            m.push(
                "spectral.window",
                match self.window {
                    Window::Rectangular => "rectangular",
                    Window::Hann => "hann",
                },
            );
            m.push("spectral.transient_cut", self.transient_cut);
            if self.outputs.contains(&Artifact::Autocorr) {
                m.push("spectral.max_lag", self.max_lag);
            }
        }
        m
    }
}
