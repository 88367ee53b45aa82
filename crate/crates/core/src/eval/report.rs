use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{CurvePoint, ZeroShotReport};
use crate::align::Perplexity;

/// One row of a mapping-accuracy table: a method and its accuracy per `K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopKTable {
    pub method: String,
    pub accuracies: BTreeMap<usize, f64>,
}

/// Everything an evaluation run produced, with the resolved configuration.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: serde_json::Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub topk: Vec<TopKTable>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub learning_curve: Vec<CurvePoint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub zero_shot: Vec<ZeroShotReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perplexity: Option<Perplexity>,
    /// wall-clock seconds per stage
    #[serde(default)]
    pub timings: BTreeMap<String, f64>,
}

impl EvalReport {
    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}

/// CSV `method,top1,...,topK`, one row per method.
pub fn write_topk_csv<W: Write + ?Sized>(out: &mut W, rows: &[TopKTable]) -> std::io::Result<()> {
    let ks: Vec<usize> = rows
        .first()
        .map(|r| r.accuracies.keys().copied().collect())
        .unwrap_or_default();
    write!(out, "method")?;
    for k in &ks {
        write!(out, ",top{k}")?;
    }
    writeln!(out)?;
    for r in rows {
        write!(out, "{}", r.method)?;
        for k in &ks {
            write!(out, ",{:.2}", r.accuracies.get(k).copied().unwrap_or(f64::NAN))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_column_table() {
        let rows = vec![TopKTable {
            method: "product".into(),
            accuracies: (1..=5).map(|k| (k, 50.0 + k as f64)).collect(),
        }];
        let mut csv = Vec::new();
        write_topk_csv(&mut csv, &rows).unwrap();
        assert_eq!(
            String::from_utf8(csv).unwrap(),
            "method,top1,top2,top3,top4,top5\nproduct,51.00,52.00,53.00,54.00,55.00\n"
        );
    }

    #[test]
    fn json_round_trip() {
        let mut report = EvalReport {
            config: serde_json::json!({"window": 10}),
            ..EvalReport::default()
        };
        report.timings.insert("ingest".into(), 0.5);
        let back: EvalReport = serde_json::from_str(&report.to_json().unwrap()).unwrap();
        assert_eq!(back, report);
    }
}
