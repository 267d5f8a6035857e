//! Output assembly: provenance header, per-window tables, stability summary.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::args::Format;

/// Run metadata printed ahead of every CSV.
#[derive(Clone, Debug, Default)]
pub struct Provenance {
    pub command: String,
    pub inputs: String,
    pub grids: Vec<(String, String)>,
    pub windows: String,
}

impl Provenance {
    pub fn line(&self) -> String {
        let grids: Vec<String> = self.grids.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!(
            "# coarsekit {} command={} inputs={} grids={} windows={}",
            env!("CARGO_PKG_VERSION"),
            self.command,
            if self.inputs.is_empty() { "-" } else { &self.inputs },
            if grids.is_empty() { "-".into() } else { grids.join(";") },
            self.windows,
        )
    }
}

/// One window's rows. `values` holds one comparable number per row for the
/// stability summary (`∞` for unbounded cells).
#[derive(Clone, Debug, Default)]
pub struct Section {
    pub window: String,
    pub rows: Vec<Vec<String>>,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub provenance: Provenance,
    pub columns: Vec<String>,
    pub sections: Vec<Section>,
    /// JSON artifact emitted instead of the table under `--format json`.
    pub artifact: Option<Value>,
    /// Whether a stability summary applies.
    pub stability: bool,
}

/// Largest ratio `later / earlier` over matching cells; equal cells count 1.
pub fn max_ratio(earlier: &[f64], later: &[f64]) -> f64 {
    earlier
        .iter()
        .zip(later)
        .map(|(&a, &b)| {
            if a == b {
                1.0
            } else if a == 0.0 {
                f64::INFINITY
            } else {
                b / a
            }
        })
        .fold(if earlier.is_empty() { 1.0 } else { 0.0 }, f64::max)
}

fn render_ratio(r: f64) -> String {
    if r.is_infinite() {
        "inf".into()
    } else {
        format!("{r}")
    }
}

impl Report {
    pub fn stability_pairs(&self) -> Vec<(String, String, f64)> {
        if !self.stability {
            return Vec::new();
        }
        self.sections
            .windows(2)
            .map(|p| (p[0].window.clone(), p[1].window.clone(), max_ratio(&p[0].values, &p[1].values)))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.provenance.line());
        let _ = writeln!(out, "window,{}", self.columns.join(","));
        for section in &self.sections {
            for row in &section.rows {
                let _ = writeln!(out, "{},{}", section.window, row.join(","));
            }
        }
        for (a, b, r) in self.stability_pairs() {
            let _ = writeln!(out, "# stability {a}->{b} max_ratio={}", render_ratio(r));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        if let Some(artifact) = &self.artifact {
            return artifact.clone();
        }
        let windows: Vec<Value> = self
            .sections
            .iter()
            .map(|s| json!({ "window": s.window, "rows": s.rows }))
            .collect();
        let stability: Vec<Value> = self
            .stability_pairs()
            .into_iter()
            .map(|(a, b, r)| json!({ "from": a, "to": b, "max_ratio": render_ratio(r) }))
            .collect();
        json!({
            "provenance": self.provenance.line().trim_start_matches("# "),
            "columns": self.columns,
            "windows": windows,
            "stability": stability,
        })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut text = serde_json::to_string(&self.to_json()).expect("serializable");
                text.push('\n');
                text
            }
        }
    }
}
