//! Artifact serialization: CSV with 17-significant-digit decimals, and JSON
//! variants that embed the same data next to a metadata object.
//!
//! Every artifact carries the resolved run description (config keys, master
//! seed) so it can be regenerated exactly: as `# key = value` comment lines
//! ahead of the CSV header, or under `"metadata"` in JSON. All numbers are
//! formatted deterministically, so identical inputs give identical bytes.

use serde::Serialize;
use serde_json::{json, Value};

use crate::dephasing::DephasingCurve;
use crate::nm::RevivalReport;
use crate::noise::TrajectoryEnsemble;
use crate::spectral::SpectrumEstimate;

/// Ordered key/value pairs recording how an artifact was produced.
#[derive(Debug, Clone, Default)]
pub struct Meta {
    entries: Vec<(String, String)>,
}

impl Meta {
    pub fn new() -> Self {
        Meta::default()
    }

    pub fn push(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    fn comments(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("# {k} = {v}\n"))
            .collect()
    }

    fn json(&self) -> Value {
        let map: serde_json::Map<String, Value> = self
            .entries
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        Value::Object(map)
    }
}

/// 17-significant-digit decimal, enough to round-trip any f64.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn finish_json(value: Value) -> String {
    let mut s = serde_json::to_string_pretty(&value).expect("in-memory serialization");
    s.push('\n');
    s
}

/// CSV columns `t, D, stderr, band_mean, band_lo1, band_hi1, band_lo2,
/// band_hi2`; stderr and band columns are left empty when the curve does not
/// carry them.
pub fn curve_csv(curve: &DephasingCurve, meta: &Meta) -> String {
    let mut out = meta.comments();
    out.push_str("t, D, stderr, band_mean, band_lo1, band_hi1, band_lo2, band_hi2\n");
    let times = curve.grid().times();
    for (k, (&t, &d)) in times.iter().zip(curve.d_values()).enumerate() {
        let se = curve
            .std_err()
            .map(|se| fmt17(se[k]))
            .unwrap_or_default();
        let bands = match curve.bands() {
            Some(b) => [
                fmt17(b.mean()[k]),
                fmt17(b.lo1()[k]),
                fmt17(b.hi1()[k]),
                fmt17(b.lo2()[k]),
                fmt17(b.hi2()[k]),
            ]
            .join(", "),
            None => ", , , , ".to_string(),
        };
        out.push_str(&format!("{}, {}, {}, {}\n", fmt17(t), fmt17(d), se, bands));
    }
    out
}

/// JSON variant of the curve artifact with the same fields as the CSV.
pub fn curve_json(curve: &DephasingCurve, meta: &Meta) -> String {
    let times = curve.grid().times();
    let mut obj = json!({
        "metadata": meta.json(),
        "omega0": curve.omega0(),
        "t": times,
        "d": curve.d_values(),
        "stderr": curve.std_err(),
    });
    let map = obj.as_object_mut().expect("object literal");
    if let Some(b) = curve.bands() {
        map.insert("band_mean".into(), json!(b.mean()));
        map.insert("band_lo1".into(), json!(b.lo1()));
        map.insert("band_hi1".into(), json!(b.hi1()));
        map.insert("band_lo2".into(), json!(b.lo2()));
        map.insert("band_hi2".into(), json!(b.hi2()));
    }
    finish_json(obj)
}

/// CSV with header `t, x_1, ..., x_N`: one row per grid time, one column per
/// realization.
pub fn ensemble_csv(ensemble: &TrajectoryEnsemble, meta: &Meta) -> String {
    let n = ensemble.n();
    let n_out = ensemble.grid().n_out();
    let mut out = meta.comments();
    out.push('t');
    for i in 1..=n {
        out.push_str(&format!(", x_{i}"));
    }
    out.push('\n');
    for (k, &t) in ensemble.grid().times().iter().enumerate() {
        out.push_str(&fmt17(t));
        for i in 0..n {
            out.push_str(", ");
            out.push_str(&fmt17(ensemble.values()[i * n_out + k]));
        }
        out.push('\n');
    }
    out
}

/// JSON metadata sidecar for an ensemble export: spec, seed, and grid,
/// sufficient to regenerate the CSV exactly.
pub fn ensemble_sidecar(ensemble: &TrajectoryEnsemble, meta: &Meta) -> String {
    finish_json(json!({
        "metadata": meta.json(),
        "spec": ensemble.spec(),
        "seed": ensemble.master_seed(),
        "grid": ensemble.grid(),
        "n_realizations": ensemble.n(),
        "warning": ensemble.warning(),
    }))
}

/// CSV columns `omega, S, stderr`.
pub fn spectrum_csv(est: &SpectrumEstimate, meta: &Meta) -> String {
    let mut out = meta.comments();
    out.push_str("omega, S, stderr\n");
    for ((&w, &s), &se) in est
        .omegas()
        .iter()
        .zip(est.s_values())
        .zip(est.std_err())
    {
        out.push_str(&format!("{}, {}, {}\n", fmt17(w), fmt17(s), fmt17(se)));
    }
    out
}

/// JSON variant of the spectrum artifact with the estimator settings
/// (window, transient cut, segment count) recorded alongside the bins.
pub fn spectrum_json(est: &SpectrumEstimate, meta: &Meta) -> String {
    #[derive(Serialize)]
    struct Wrapper<'a> {
        metadata: Value,
        #[serde(flatten)]
        estimate: &'a SpectrumEstimate,
    }
    let value = serde_json::to_value(Wrapper {
        metadata: meta.json(),
        estimate: est,
    })
    .expect("in-memory serialization");
    finish_json(value)
}

/// Two-column CSV for tabulations: `t, value`, `omega, S`, `tau, C`, ...
pub fn xy_csv(x_name: &str, y_name: &str, rows: &[(f64, f64)], meta: &Meta) -> String {
    let mut out = meta.comments();
    out.push_str(&format!("{x_name}, {y_name}\n"));
    for &(x, y) in rows {
        out.push_str(&format!("{}, {}\n", fmt17(x), fmt17(y)));
    }
    out
}

/// Revival report as JSON: intervals, depths, measure, verdict, policy.
pub fn report_json(report: &RevivalReport, meta: &Meta) -> String {
    #[derive(Serialize)]
    struct Wrapper<'a> {
        metadata: Value,
        #[serde(flatten)]
        report: &'a RevivalReport,
    }
    let value = serde_json::to_value(Wrapper {
        metadata: meta.json(),
        report,
    })
    .expect("in-memory serialization");
    finish_json(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dephasing::simulate_curve;
    use crate::grid::TimeGrid;
    use crate::nm::detect_revivals;
    use crate::noise::{sample, NoiseSpec};
    use crate::spectral::{periodogram, Window};

    fn meta() -> Meta {
        let mut m = Meta::new();
        m.push("seed", 42).push("noise.kind", "ou");
        m
    }

    #[test]
    fn fmt17_round_trips_doubles() {
        for &x in &[
            0.0,
            1.0,
            -1.0 / 3.0,
            std::f64::consts::PI,
            6.02e23,
            -2.2250738585072014e-308,
        ] {
            let back: f64 = fmt17(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x} -> {}", fmt17(x));
        }
    }

    #[test]
    fn curve_csv_has_the_documented_columns() {
        let grid = TimeGrid::new(2.0, 5, 1).unwrap();
        let spec = NoiseSpec::Ou {
            gamma: 1.0,
            sigma: 1.0,
        };
        let curve = simulate_curve(&spec, &grid, 1.0, 50, 7).unwrap();
        let csv = curve_csv(&curve, &meta());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# seed = 42");
        assert_eq!(lines[1], "# noise.kind = ou");
        assert_eq!(
            lines[2],
            "t, D, stderr, band_mean, band_lo1, band_hi1, band_lo2, band_hi2"
        );
        assert_eq!(lines.len(), 3 + 5);
        for row in &lines[3..] {
            assert_eq!(row.split(',').count(), 8, "row {row:?}");
        }
        let first: Vec<&str> = lines[3].split(", ").collect();
        assert_eq!(first[0].parse::<f64>().unwrap(), 0.0);
        assert_eq!(first[1].parse::<f64>().unwrap(), 1.0);
        assert_eq!(first[2].parse::<f64>().unwrap(), 0.0);
        // band columns empty when the curve has no bands
        assert!(lines[3].ends_with(", , , , "));
    }

    #[test]
    fn curve_json_parses_and_matches_the_curve() {
        let grid = TimeGrid::new(2.0, 5, 1).unwrap();
        let spec = NoiseSpec::Rtn { gamma: 0.3 };
        let curve = simulate_curve(&spec, &grid, 1.0, 40, 7).unwrap();
        let v: serde_json::Value = serde_json::from_str(&curve_json(&curve, &meta())).unwrap();
        assert_eq!(v["metadata"]["seed"], "42");
        assert_eq!(v["d"].as_array().unwrap().len(), 5);
        assert_eq!(v["d"][0], 1.0);
        assert_eq!(v["stderr"].as_array().unwrap().len(), 5);
        assert!(v.get("band_mean").is_none());
    }

    #[test]
    fn ensemble_export_round_trips_values_and_sidecar() {
        let grid = TimeGrid::new(1.0, 3, 2).unwrap();
        let spec = NoiseSpec::Ou {
            gamma: 0.5,
            sigma: 1.3,
        };
        let e = sample(&spec, &grid, 99, 4).unwrap();
        let csv = ensemble_csv(&e, &Meta::new());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t, x_1, x_2, x_3, x_4");
        assert_eq!(lines.len(), 1 + 3);
        let cell: f64 = lines[2].split(", ").nth(2).unwrap().parse().unwrap();
        assert_eq!(cell.to_bits(), e.row(1)[1].to_bits());

        let side: serde_json::Value =
            serde_json::from_str(&ensemble_sidecar(&e, &Meta::new())).unwrap();
        assert_eq!(side["spec"]["kind"], "ou");
        assert_eq!(side["spec"]["sigma"], 1.3);
        assert_eq!(side["seed"], 99);
        assert_eq!(side["grid"]["n_out"], 3);
        assert_eq!(side["n_realizations"], 4);
        assert_eq!(side["warning"], serde_json::Value::Null);
    }

    #[test]
    fn spectrum_artifacts_record_estimator_settings() {
        let e = sample(
            &NoiseSpec::Rtn { gamma: 0.5 },
            &TimeGrid::new(50.0, 501, 1).unwrap(),
            3,
            8,
        )
        .unwrap();
        let est = periodogram(&e, 5.0, Window::Hann).unwrap();
        let csv = spectrum_csv(&est, &meta());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[2], "omega, S, stderr");
        assert_eq!(lines.len(), 3 + est.omegas().len());

        let v: serde_json::Value = serde_json::from_str(&spectrum_json(&est, &meta())).unwrap();
        assert_eq!(v["window"], "hann");
        assert_eq!(v["transient_cut"], 5.0);
        assert_eq!(v["n_segments"], 8);
        assert_eq!(
            v["omegas"].as_array().unwrap().len(),
            v["s_values"].as_array().unwrap().len()
        );
    }

    #[test]
    fn report_json_carries_policy_and_verdict() {
        let curve = {
            let grid = TimeGrid::new(3.0, 1001, 1).unwrap();
            let d = grid
                .times()
                .iter()
                .map(|&t| (2.0 * t).cos().abs())
                .collect();
            crate::dephasing::DephasingCurve::from_d_values(grid, 1.0, d).unwrap()
        };
        let report = detect_revivals(&curve, 3.0).unwrap();
        let v: serde_json::Value = serde_json::from_str(&report_json(&report, &meta())).unwrap();
        assert_eq!(v["verdict"], "non_markovian");
        assert_eq!(v["threshold_policy"]["kind"], "absolute");
        assert!(v["nm_measure"].as_f64().unwrap() > 0.0);
        let revs = v["revivals"].as_array().unwrap();
        assert!(!revs.is_empty());
        assert!(revs[0]["depth"].as_f64().unwrap() > 0.0);
        assert_eq!(v["metadata"]["noise.kind"], "ou");
    }

    #[test]
    fn xy_csv_is_plain_two_columns() {
        let rows = vec![(0.0, 1.0), (0.5, 0.25)];
        let csv = xy_csv("t", "value", &rows, &Meta::new());
        assert_eq!(csv, format!(
            "t, value\n{}, {}\n{}, {}\n",
            fmt17(0.0), fmt17(1.0), fmt17(0.5), fmt17(0.25)
        ));
    }
}
