use std::time::Instant;

use serde::Serialize;

use super::{build_omega_full, derive_params, EncodeError};
use crate::fo::{length_natural, length_noidx};
use crate::tm::{Program, Symbol};

#[derive(Clone, Debug, Serialize)]
pub struct AuditRow {
    pub x_len: usize,
    pub p_len: usize,
    pub omega_len: usize,
    pub omega_len_noidx: usize,
    pub build_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub rows: Vec<AuditRow>,
    /// Least-squares slope of `ln omega_len` against `ln x_len`.
    pub slope: f64,
    pub lengths_exceed_input: bool,
}

impl AuditReport {
    pub const CSV_HEADER: &'static str = "x_len,p_len,omega_len,omega_len_noidx,build_ms";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{:.3}\n",
                r.x_len, r.p_len, r.omega_len, r.omega_len_noidx, r.build_ms
            ));
        }
        out
    }
}

/// Builds the full sentence for each input with `m = |x|` and records its size.
pub fn length_audit(p: &Program, inputs: &[Vec<Symbol>]) -> Result<AuditReport, EncodeError> {
    let mut rows = Vec::with_capacity(inputs.len());
    for x in inputs {
        let start = Instant::now();
        let params = derive_params(p, x, None)?;
        let omega = build_omega_full(&params)?;
        let build_ms = start.elapsed().as_secs_f64() * 1e3;
        rows.push(AuditRow {
            x_len: x.len(),
            p_len: params.program.natural_length(),
            omega_len: length_natural(&omega),
            omega_len_noidx: length_noidx(&omega),
            build_ms,
        });
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.x_len as f64, r.omega_len as f64)).collect();
    let slope = fit_slope(&pts);
    let lengths_exceed_input = rows.iter().all(|r| r.x_len <= r.omega_len);
    Ok(AuditReport { rows, slope, lengths_exceed_input })
}

/// Log-log least-squares slope; NaN with fewer than two distinct abscissae.
pub fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [2.0f64, 4.0, 8.0].iter().map(|&x| (x, 3.0 * x * x)).collect();
        assert!((fit_slope(&pts) - 2.0).abs() < 1e-9);
        assert!(fit_slope(&[(1.0, 1.0)]).is_nan());
    }
}
