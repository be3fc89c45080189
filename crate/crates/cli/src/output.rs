//! Data files, provenance sidecars and gnuplot scripts.
//!
//! CSV layout: a mandatory header row, axis columns first, then `g2`,
//! `mean_number`, `cutoff_used`, `status`, `solver_metric`. Reals are written
//! with 17 significant digits. Failed points leave the observable cells
//! empty; NaN is never written.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use magnon_core::sweep::{PointResult, SweepResult};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Ndjson,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Ndjson => "ndjson",
        }
    }
}

pub const OBSERVABLE_COLUMNS: [&str; 5] = ["g2", "mean_number", "cutoff_used", "status", "solver_metric"];

/// Full-precision scientific notation.
pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn cells(p: &PointResult) -> [String; 5] {
    let opt = |v: Option<f64>| v.map(real).unwrap_or_default();
    [
        opt(p.g2),
        opt(p.mean_number),
        p.cutoff_used.map(|n| n.to_string()).unwrap_or_default(),
        p.status.as_str().to_string(),
        opt(p.solver_metric),
    ]
}

pub fn render_csv(r: &SweepResult) -> String {
    let mut out = String::new();
    let header: Vec<&str> = r.column_names().into_iter().chain(OBSERVABLE_COLUMNS).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for p in &r.points {
        let row: Vec<String> = p.coords.iter().map(|&c| real(c)).chain(cells(p)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn json_number(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => serde_json::to_string(&x).expect("finite float"),
        _ => "null".into(),
    }
}

pub fn render_ndjson(r: &SweepResult) -> String {
    let names = r.column_names();
    let mut out = String::new();
    for p in &r.points {
        out.push('{');
        for (name, &c) in names.iter().zip(&p.coords) {
            let _ = write!(out, "\"{name}\":{},", json_number(Some(c)));
        }
        let cutoff = p.cutoff_used.map(|n| n.to_string()).unwrap_or_else(|| "null".into());
        let _ = write!(
            out,
            "\"g2\":{},\"mean_number\":{},\"cutoff_used\":{},\"status\":\"{}\",\"solver_metric\":{}}}",
            json_number(p.g2),
            json_number(p.mean_number),
            cutoff,
            p.status.as_str(),
            json_number(p.solver_metric)
        );
        out.push('\n');
    }
    out
}

pub fn render(r: &SweepResult, format: Format) -> String {
    match format {
        Format::Csv => render_csv(r),
        Format::Ndjson => render_ndjson(r),
    }
}

#[derive(Serialize)]
struct Sidecar<'a> {
    data_file: &'a str,
    format: &'a str,
    columns: Vec<&'a str>,
    shape: &'a [usize],
    provenance: &'a magnon_core::sweep::Provenance,
    spec: &'a magnon_core::SweepSpec,
}

pub fn render_provenance(r: &SweepResult, data_file: &str, format: Format) -> String {
    let sidecar = Sidecar {
        data_file,
        format: format.extension(),
        columns: r.column_names().into_iter().chain(OBSERVABLE_COLUMNS).collect(),
        shape: &r.shape,
        provenance: &r.provenance,
        spec: &r.spec,
    };
    let mut s = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    s.push('\n');
    s
}

/// Writes data file and sidecar into `dir`, returning the data path.
pub fn write_result(dir: &Path, r: &SweepResult, format: Format) -> Result<PathBuf, CliError> {
    let name = format!("{}.{}", r.spec.label, format.extension());
    let data = dir.join(&name);
    write_file(&data, &render(r, format))?;
    let side = dir.join(format!("{}.provenance.json", r.spec.label));
    write_file(&side, &render_provenance(r, &name, format))?;
    Ok(data)
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

/// gnuplot script plotting every result of one figure from its CSV files.
/// NDJSON output has no script.
pub fn gnuplot_script(figure: &str, results: &[SweepResult]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# gnuplot script for {figure}; run from the data directory");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key autotitle columnhead");
    let _ = writeln!(s, "set terminal pngcairo size 900,640");
    let _ = writeln!(s, "set output '{figure}.png'");
    let Some(first) = results.first() else {
        return s;
    };
    let log_axis = |r: &SweepResult, i: usize| r.spec.axes[i].spacing == magnon_core::sweep::Spacing::Log;
    let g2_col = first.spec.axes.len() + 1;
    if first.spec.axes.len() == 2 {
        let _ = writeln!(s, "set xlabel '{}'", first.spec.axes[1].param.column());
        let _ = writeln!(s, "set ylabel '{}'", first.spec.axes[0].param.column());
        let _ = writeln!(s, "set cblabel 'log10 g2'");
        if log_axis(first, 1) {
            let _ = writeln!(s, "set logscale x");
        }
        if log_axis(first, 0) {
            let _ = writeln!(s, "set logscale y");
        }
        let _ = writeln!(s, "set view map");
        let _ = writeln!(
            s,
            "splot '{}.csv' using 2:1:(log10(${g2_col})) with points pointtype 5 pointsize 0.4 palette notitle",
            first.spec.label
        );
        return s;
    }
    let _ = writeln!(s, "set xlabel '{}'", first.spec.axes[0].param.column());
    let _ = writeln!(s, "set ylabel 'g2(0)'");
    let _ = writeln!(s, "set logscale y");
    if log_axis(first, 0) {
        let _ = writeln!(s, "set logscale x");
    }
    let curves: Vec<String> = results
        .iter()
        .map(|r| {
            format!(
                "'{}.csv' using 1:{g2_col} with lines title '{}'",
                r.spec.label, r.spec.label
            )
        })
        .collect();
    let _ = writeln!(s, "plot {}", curves.join(", \\\n     "));
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use magnon_core::sweep::{Axis, AxisParam, CutoffPolicy, SolverChoice};
    use magnon_core::{run_sweep, SweepSpec, SystemParams};

    fn small() -> SweepResult {
        let spec = SweepSpec {
            label: "t".into(),
            base: SystemParams::blockade_defaults(),
            axes: vec![Axis::linear(AxisParam::OmegaDrive, 0.0, 0.5, 3)],
            solver: SolverChoice::Deterministic,
            cutoff: CutoffPolicy::Fixed(3),
            notes: vec![],
        };
        run_sweep(&spec).unwrap()
    }

    #[test]
    fn csv_layout() {
        let mut r = small();
        r.points[0].g2 = None;
        r.points[0].mean_number = None;
        r.points[0].cutoff_used = None;
        r.points[0].solver_metric = None;
        r.points[0].status = magnon_core::PointStatus::NoExcitation;
        let text = render_csv(&r);
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "omega_over_gamma,g2,mean_number,cutoff_used,status,solver_metric"
        );
        assert_eq!(lines.next().unwrap(), "0.0000000000000000e0,,,,no-excitation,");
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[0], "2.5000000000000000e-1");
        assert_eq!(row[3], "3");
        assert_eq!(row[4], "ok");
        assert_eq!(row[1].parse::<f64>().unwrap(), r.points[1].g2.unwrap());
        assert!(!text.contains("NaN"));
    }

    #[test]
    fn ndjson_round_trips() {
        let r = small();
        let text = render_ndjson(&r);
        assert_eq!(text.lines().count(), 3);
        for (line, p) in text.lines().zip(&r.points) {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert_eq!(v["g2"].as_f64(), p.g2);
            assert_eq!(v["status"], "ok");
            assert_eq!(v["omega_over_gamma"].as_f64(), Some(p.coords[0]));
        }
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, 2.0f64.sqrt() * 1e-17, 123456.789e10] {
            assert_eq!(real(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn provenance_names_data_file() {
        let r = small();
        let s = render_provenance(&r, "t.csv", Format::Csv);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["data_file"], "t.csv");
        assert_eq!(v["provenance"]["spec_hash"].as_str().unwrap().len(), 64);
        let spec: SweepSpec = serde_json::from_value(v["spec"].clone()).unwrap();
        assert_eq!(spec, r.spec);
    }

    #[test]
    fn script_mentions_each_curve() {
        let specs = magnon_core::figure_preset("fig4a").unwrap();
        let results: Vec<SweepResult> = specs
            .into_iter()
            .map(|mut s| {
                s.axes[0] = Axis::linear(AxisParam::Delta, -1.0, 1.0, 2);
                s.cutoff = CutoffPolicy::Fixed(2);
                run_sweep(&s).unwrap()
            })
            .collect();
        let script = gnuplot_script("fig4a", &results);
        for r in &results {
            assert!(script.contains(&format!("'{}.csv'", r.spec.label)));
        }
    }
}
