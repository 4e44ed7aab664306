use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::ClassMetrics;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub distance_thresholds: Vec<f64>,
    pub classes: BTreeMap<String, ClassMetrics>,
    #[serde(rename = "mAP")]
    pub m_ap: f64,
    #[serde(rename = "mATE")]
    pub m_ate: f64,
    #[serde(rename = "mASE")]
    pub m_ase: f64,
    #[serde(rename = "mAOE")]
    pub m_aoe: f64,
}

impl EvalReport {
    pub fn new(distance_thresholds: Vec<f64>, classes: BTreeMap<String, ClassMetrics>) -> Self {
        let mean = |f: fn(&ClassMetrics) -> f64| {
            if classes.is_empty() {
                0.0
            } else {
                classes.values().map(f).sum::<f64>() / classes.len() as f64
            }
        };
        EvalReport {
            m_ap: mean(|c| c.mean_ap),
            m_ate: mean(|c| c.ate),
            m_ase: mean(|c| c.ase),
            m_aoe: mean(|c| c.aoe),
            distance_thresholds,
            classes,
        }
    }

    pub fn summary_line(&self) -> String {
        format!(
            "mAP {:.4}  mATE {:.4}  mASE {:.4}  mAOE {:.4}",
            self.m_ap, self.m_ate, self.m_ase, self.m_aoe
        )
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut v = serde_json::to_vec_pretty(self).expect("report serializes");
        v.push(b'\n');
        v
    }
}

/// `method,mAP,mATE,mASE,mAOE`, one row per report. mAP is in percent.
pub fn csv_table(rows: &[(&str, &EvalReport)]) -> String {
    let mut out = String::from("method,mAP,mATE,mASE,mAOE\n");
    for (name, r) in rows {
        writeln!(
            out,
            "{name},{:.2},{:.4},{:.4},{:.4}",
            100.0 * r.m_ap,
            r.m_ate,
            r.m_ase,
            r.m_aoe
        )
        .unwrap();
    }
    out
}
