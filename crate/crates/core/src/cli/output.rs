//! CSV rows.
//!
//! Floats are written in scientific notation with 17 significant digits so
//! that every value parses back to the identical `f64`.

use std::io::Write;

use super::plan::RhoUnit;

pub const HEADER: &str = "scheme,M,K,c,rho,rho_unit,omega,trials,seed,metric,value,std_error,extrapolated";

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub scheme: String,
    pub m: Option<usize>,
    pub k: Option<usize>,
    pub c: f64,
    pub rho: f64,
    pub rho_unit: RhoUnit,
    pub omega: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub metric: &'static str,
    pub value: f64,
    pub std_error: Option<f64>,
    pub extrapolated: bool,
}

pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl Row {
    pub fn to_csv(&self) -> String {
        [
            self.scheme.clone(),
            opt(self.m),
            opt(self.k),
            float(self.c),
            float(self.rho),
            self.rho_unit.to_string(),
            self.omega.map(float).unwrap_or_default(),
            opt(self.trials),
            opt(self.seed),
            self.metric.to_string(),
            float(self.value),
            self.std_error.map(float).unwrap_or_default(),
            self.extrapolated.to_string(),
        ]
        .join(",")
    }
}

/// Writes the optional `# generated` line, the header and every row.
pub fn write_csv<W: Write>(mut w: W, rows: &[Row], timestamp: bool) -> std::io::Result<()> {
    if timestamp {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        writeln!(w, "# generated at unix time {secs}")?;
    }
    writeln!(w, "{HEADER}")?;
    for row in rows {
        writeln!(w, "{}", row.to_csv())?;
    }
    w.flush()
}
