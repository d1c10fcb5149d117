//! Deterministic CSV and JSON rendering.
//!
//! CSV carries `#`-prefixed metadata (tool version, command, scenario hash,
//! units), a stable header row, then rows with floats at 12 significant
//! digits. JSON wraps every command in the same envelope:
//! `{ scenario, results, diagnostics }`.

use serde::Serialize;
use serde_json::json;

use crate::scenario::Scenario;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// 12 significant digits, scientific; the CSV float convention.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

/// Column-oriented numeric table (curvature and profile commands).
#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GaugeOutcome {
    pub max_div: f64,
    pub rms_div: f64,
    pub worst_point: PointOut,
    pub passed: bool,
    pub grid: GridOut,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumOutcome {
    pub eigenvalues: Vec<f64>,
    pub imaginary_parts: Vec<f64>,
    pub residuals: Vec<f64>,
    pub hermiticity_deviation: f64,
    /// Frobenius norm of the dropped anti-Hermitian part (internal units);
    /// absent unless the solve was symmetrized.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discarded_antihermitian_norm: Option<f64>,
    pub grid: GridOut,
    pub k: usize,
    pub with_thickness: bool,
    pub symmetrize: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyOutcome {
    pub q3: f64,
    pub sample_count: usize,
    pub blocks: Vec<BlockOut>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockOut {
    pub block: String,
    pub max_abs_discrepancy: f64,
    pub relative_discrepancy: f64,
    pub reference_scale: f64,
    pub at_point: PointOut,
    pub general_value: ComplexOut,
    pub closed_form_value: ComplexOut,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointOut {
    pub q1: f64,
    pub q2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridOut {
    pub n1: usize,
    pub n2: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexOut {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Everything a command produced, ready for either format.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum CommandOutput {
    Table(Table),
    Gauge(GaugeOutcome),
    Spectrum(SpectrumOutcome),
    Consistency(ConsistencyOutcome),
}

impl CommandOutput {
    fn csv_body(&self) -> String {
        let mut out = String::new();
        match self {
            CommandOutput::Table(t) => {
                out.push_str(&t.columns.join(","));
                out.push('\n');
                for row in &t.rows {
                    let cells: Vec<String> = row.iter().map(|&x| fmt_float(x)).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
            }
            CommandOutput::Gauge(g) => {
                out.push_str("max_div,rms_div,worst_q1,worst_q2,passed\n");
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    fmt_float(g.max_div),
                    fmt_float(g.rms_div),
                    fmt_float(g.worst_point.q1),
                    fmt_float(g.worst_point.q2),
                    g.passed
                ));
            }
            CommandOutput::Spectrum(s) => {
                out.push_str(&format!(
                    "# hermiticity_deviation: {}\n",
                    fmt_float(s.hermiticity_deviation)
                ));
                if let Some(d) = s.discarded_antihermitian_norm {
                    out.push_str(&format!("# discarded_antihermitian_norm: {}\n", fmt_float(d)));
                }
                out.push_str("index,eigenvalue,imaginary_part,residual\n");
                for i in 0..s.eigenvalues.len() {
                    out.push_str(&format!(
                        "{i},{},{},{}\n",
                        fmt_float(s.eigenvalues[i]),
                        fmt_float(s.imaginary_parts[i]),
                        fmt_float(s.residuals[i])
                    ));
                }
            }
            CommandOutput::Consistency(c) => {
                out.push_str(
                    "block,max_abs_discrepancy,relative_discrepancy,reference_scale,at_q1,at_q2,general_re,general_im,closed_form_re,closed_form_im\n",
                );
                for b in &c.blocks {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{},{}\n",
                        b.block,
                        fmt_float(b.max_abs_discrepancy),
                        fmt_float(b.relative_discrepancy),
                        fmt_float(b.reference_scale),
                        fmt_float(b.at_point.q1),
                        fmt_float(b.at_point.q2),
                        fmt_float(b.general_value.re),
                        fmt_float(b.general_value.im),
                        fmt_float(b.closed_form_value.re),
                        fmt_float(b.closed_form_value.im)
                    ));
                }
            }
        }
        out
    }
}

/// Renders the command output in the requested format, with the scenario
/// echo that makes the run reproducible.
pub fn render(
    scenario: &Scenario,
    command: &str,
    units_label: &str,
    output: &CommandOutput,
    format: OutputFormat,
) -> String {
    match format {
        OutputFormat::Csv => {
            let mut text = String::new();
            text.push_str(&format!("# thinlayer {TOOL_VERSION}\n"));
            text.push_str(&format!("# command: {command}\n"));
            text.push_str(&format!("# scenario sha256: {}\n", scenario.hash()));
            text.push_str(&format!("# units: {units_label}\n"));
            text.push_str(&output.csv_body());
            text
        }
        OutputFormat::Json => {
            let envelope = json!({
                "scenario": serde_json::to_value(scenario).expect("scenario serializes"),
                "results": serde_json::to_value(output).expect("output serializes"),
                "diagnostics": {
                    "tool_version": TOOL_VERSION,
                    "command": command,
                    "scenario_hash": scenario.hash(),
                    "units": units_label,
                },
            });
            let mut text =
                serde_json::to_string_pretty(&envelope).expect("envelope serializes");
            text.push('\n');
            text
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_carries_12_significant_digits() {
        assert_eq!(fmt_float(1.0), "1.00000000000e0");
        assert_eq!(fmt_float(-0.0123456789012345), "-1.23456789012e-2");
    }

    #[test]
    fn csv_rendering_is_stable() {
        let scenario = crate::scenario::Scenario::from_json(
            r#"{ "surface": { "sphere": { "radius": 2.0 } } }"#,
        )
        .unwrap();
        let table = CommandOutput::Table(Table {
            columns: vec!["theta".into(), "vg".into()],
            rows: vec![vec![0.5, -1.25]],
        });
        let a = render(&scenario, "curvature", "internal", &table, OutputFormat::Csv);
        let b = render(&scenario, "curvature", "internal", &table, OutputFormat::Csv);
        assert_eq!(a, b);
        assert!(a.starts_with(&format!("# thinlayer {TOOL_VERSION}\n# command: curvature\n")));
        assert!(a.ends_with("theta,vg\n5.00000000000e-1,-1.25000000000e0\n"));
    }

    #[test]
    fn json_envelope_has_the_three_sections() {
        let scenario = crate::scenario::Scenario::from_json(
            r#"{ "surface": { "sphere": { "radius": 2.0 } } }"#,
        )
        .unwrap();
        let out = CommandOutput::Gauge(GaugeOutcome {
            max_div: 1e-12,
            rms_div: 1e-13,
            worst_point: PointOut { q1: 0.0, q2: 0.0 },
            passed: true,
            grid: GridOut { n1: 16, n2: 16 },
        });
        let text = render(&scenario, "gauge-check", "internal", &out, OutputFormat::Json);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(value.get("scenario").is_some());
        assert!(value["results"]["passed"].as_bool().unwrap());
        assert_eq!(value["diagnostics"]["command"], "gauge-check");
    }
}
