//! Plot-ready CSV tables aggregated per `(N, M)` setting.
//!
//! | kind      | columns                                      |
//! |-----------|----------------------------------------------|
//! | `runtime` | `N,M,mean_runtime_s,mean_bruteforce_runtime_s` |
//! | `ratio`   | `N,M,mean_ratio,bound_ratio`                 |
//! | `cost`    | `N,M,mean_normalized_cost`                   |
//! | `gain`    | `N,M,mean_value_gain_pct`                    |
//!
//! Settings without any oracle ratio are left out of `ratio`. Empty input
//! yields only the header.

use std::path::Path;
use std::str::FromStr;

use crate::bench::{pooled, read_rows_csv, BenchResults, BenchRow, SummaryRow};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PlotKind {
    Runtime,
    Ratio,
    Cost,
    Gain,
}

impl FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "runtime" => Ok(PlotKind::Runtime),
            "ratio" => Ok(PlotKind::Ratio),
            "cost" => Ok(PlotKind::Cost),
            "gain" => Ok(PlotKind::Gain),
            other => Err(Error::Invalid(format!(
                "unknown plot kind `{other}` (expected runtime, ratio, cost or gain)"
            ))),
        }
    }
}

impl PlotKind {
    pub fn header(self) -> &'static [&'static str] {
        match self {
            PlotKind::Runtime => &["N", "M", "mean_runtime_s", "mean_bruteforce_runtime_s"],
            PlotKind::Ratio => &["N", "M", "mean_ratio", "bound_ratio"],
            PlotKind::Cost => &["N", "M", "mean_normalized_cost"],
            PlotKind::Gain => &["N", "M", "mean_value_gain_pct"],
        }
    }

    fn record(self, s: &SummaryRow) -> Option<Vec<String>> {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut rec = vec![s.n.to_string(), s.m.to_string()];
        match self {
            PlotKind::Runtime => {
                rec.push(opt(s.mean_runtime_s));
                rec.push(opt(s.mean_bruteforce_runtime_s));
            }
            PlotKind::Ratio => {
                rec.push(s.mean_ratio?.to_string());
                rec.push(s.bound_ratio.to_string());
            }
            PlotKind::Cost => rec.push(opt(s.mean_normalized_cost)),
            PlotKind::Gain => rec.push(opt(s.mean_value_gain_pct)),
        }
        Some(rec)
    }
}

pub fn plot_data(rows: &[BenchRow], kind: PlotKind) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(kind.header())?;
    for s in pooled(rows) {
        if let Some(rec) = kind.record(&s) {
            w.write_record(&rec)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Loads bench runs from a `runs.csv` or a JSON results file.
pub fn read_runs(path: &Path) -> Result<Vec<BenchRow>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if path.extension().is_some_and(|e| e == "json") {
        let results: BenchResults = serde_json::from_str(&text)?;
        Ok(results.runs)
    } else {
        read_rows_csv(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_parse() {
        assert_eq!("ratio".parse::<PlotKind>().unwrap(), PlotKind::Ratio);
        assert!("value".parse::<PlotKind>().is_err());
    }

    #[test]
    fn empty_is_header_only() {
        for kind in [PlotKind::Runtime, PlotKind::Ratio, PlotKind::Cost, PlotKind::Gain] {
            let text = plot_data(&[], kind).unwrap();
            assert_eq!(text, format!("{}\n", kind.header().join(",")));
        }
    }
}
