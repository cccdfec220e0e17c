//! Result tables in JSON and aligned-text form.

use std::fmt::Write;

use heston_gof_core::density::ModelKind;
use heston_gof_core::gof::GofResult;
use heston_gof_core::TimeLag;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofRow {
    pub lag: TimeLag,
    pub paths: usize,
    pub mean_path_len: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub result: Option<GofResult>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelTable {
    pub model: ModelKind,
    pub param_count: usize,
    pub rows: Vec<GofRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub test: String,
    pub per_bin: usize,
    pub tables: Vec<ModelTable>,
}

fn sci(p: f64) -> String {
    format!("{p:.2e}")
}

pub fn render_test(report: &TestReport) -> String {
    let chi2 = report.test == "chi2";
    let stat = if chi2 { "chi2" } else { "Z" };
    let mut out = String::new();
    for table in &report.tables {
        let _ = writeln!(out, "{} test, {} model (m = {})", report.test.to_uppercase(), table.model.name(), table.param_count);
        let mut header = format!("{:>6} {:>6} {:>8} {:>12} {:>10}", "lag", "paths", "N", stat, "sigma");
        if chi2 {
            header.push_str(&format!(" {:>6}", "df"));
        }
        header.push_str(&format!(" {:>10} {:>10} {:>10}", "p(+sigma)", "p(mean)", "p(-sigma)"));
        let _ = writeln!(out, "{header}");
        for row in &table.rows {
            let mut line = format!("{:>6} {:>6} {:>8.1}", row.lag.days(), row.paths, row.mean_path_len);
            match (&row.result, &row.skipped) {
                (Some(r), _) => {
                    let prec = if chi2 { 2 } else { 4 };
                    line.push_str(&format!(" {:>12.prec$}", r.mean));
                    line.push_str(&match r.std {
                        Some(s) => format!(" {s:>10.prec$}"),
                        None => format!(" {:>10}", ""),
                    });
                    if chi2 {
                        line.push_str(&format!(" {:>6}", r.df.map_or(String::new(), |d| d.to_string())));
                    }
                    match r.p_triple {
                        Some(t) => line.push_str(&format!(" {:>10} {:>10} {:>10}", sci(t.upper), sci(t.mean), sci(t.lower))),
                        None => line.push_str(&format!(" {:>10} {:>10} {:>10}", "", sci(r.p_value), "")),
                    }
                }
                (None, reason) => {
                    line.push_str(&format!("  SKIPPED: {}", reason.as_deref().unwrap_or("not computable")));
                }
            }
            let _ = writeln!(out, "{}", line.trim_end());
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KurtosisRow {
    pub lag: TimeLag,
    pub untrimmed: f64,
    pub trimmed: Option<f64>,
}

pub fn render_kurtosis(rows: &[KurtosisRow]) -> String {
    let mut out = format!("{:>6} {:>12} {:>12}\n", "lag", "untrimmed", "trimmed");
    for r in rows {
        let trimmed = r.trimmed.map_or("n/a".to_string(), |k| format!("{k:.2}"));
        let _ = writeln!(out, "{:>6} {:>12.2} {:>12}", r.lag.days(), r.untrimmed, trimmed);
    }
    out
}
