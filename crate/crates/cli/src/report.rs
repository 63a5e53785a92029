use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

/// JSON report. Every gated residual has a threshold under the same key;
/// `info` carries ungated measurements.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub check: String,
    pub config: RunConfig,
    pub residuals: BTreeMap<String, f64>,
    pub thresholds: BTreeMap<String, f64>,
    pub info: BTreeMap<String, serde_json::Value>,
    pub pass: bool,
}

impl Report {
    pub fn new(check: &str, config: &RunConfig) -> Self {
        Report {
            check: check.into(),
            config: config.clone(),
            residuals: BTreeMap::new(),
            thresholds: BTreeMap::new(),
            info: BTreeMap::new(),
            pass: true,
        }
    }

    /// Records a gated residual; NaN fails.
    pub fn gate(&mut self, key: &str, value: f64, threshold: f64) -> &mut Self {
        self.residuals.insert(key.into(), value);
        self.thresholds.insert(key.into(), threshold);
        self.pass &= value <= threshold;
        self
    }

    pub fn info(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.info.insert(key.into(), v);
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json()).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    /// One line per gated residual.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.residuals {
            let t = self.thresholds[k];
            let tag = if *v <= t { "ok  " } else { "FAIL" };
            s.push_str(&format!("{tag} {k:<28} {v:.3e} (<= {t:.0e})\n"));
        }
        s
    }
}
