use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::record::{format_g, RunRecord};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub command: String,
    pub n: usize,
    pub count: usize,
    pub mean: f64,
    /// `None` for a single observation.
    pub se: Option<f64>,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
    /// Log-log slope of mean against `n` per command; `None` with fewer
    /// than two distinct `n` or a nonpositive mean.
    pub slopes: BTreeMap<String, Option<f64>>,
}

/// The value a row contributes: its cost, or its lower bound for rows
/// without a cost (`bounds`). Incomplete solutions are skipped.
fn value(r: &RunRecord) -> Option<f64> {
    if !r.status.is_complete() {
        return None;
    }
    r.cost.or(r.lower_bound)
}

/// Least-squares slope of `y` on `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Some(sxy / sxx)
}

/// Slope of `ln(mean)` against `ln(n)`.
pub fn log_log_slope(points: &[(usize, f64)]) -> Option<f64> {
    if points
        .iter()
        .any(|&(n, m)| n == 0 || m.is_nan() || m <= 0.0)
    {
        return None;
    }
    let x: Vec<f64> = points.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let y: Vec<f64> = points.iter().map(|&(_, m)| m.ln()).collect();
    fit_slope(&x, &y)
}

pub fn summarize(records: &[RunRecord]) -> Summary {
    let mut groups: BTreeMap<(String, usize), Vec<f64>> = BTreeMap::new();
    for r in records {
        if let Some(v) = value(r) {
            groups.entry((r.command.clone(), r.n)).or_default().push(v);
        }
    }
    let rows: Vec<SummaryRow> = groups
        .into_iter()
        .map(|((command, n), vs)| {
            let count = vs.len();
            let mean = vs.iter().sum::<f64>() / count as f64;
            let se = (count > 1).then(|| {
                let var = vs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
                (var / count as f64).sqrt()
            });
            SummaryRow {
                command,
                n,
                count,
                mean,
                se,
                min: vs.iter().copied().fold(f64::INFINITY, f64::min),
                max: vs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect();
    let mut per_command: BTreeMap<String, Vec<(usize, f64)>> = BTreeMap::new();
    for r in &rows {
        per_command
            .entry(r.command.clone())
            .or_default()
            .push((r.n, r.mean));
    }
    let slopes = per_command
        .into_iter()
        .map(|(c, pts)| (c, log_log_slope(&pts)))
        .collect();
    Summary { rows, slopes }
}

impl Summary {
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["command", "n", "count", "mean", "se", "min", "max", "slope"])?;
        for r in &self.rows {
            let slope = self.slopes.get(&r.command).copied().flatten();
            w.write_record([
                r.command.clone(),
                r.n.to_string(),
                r.count.to_string(),
                format_g(r.mean),
                r.se.map(format_g).unwrap_or_default(),
                format_g(r.min),
                format_g(r.max),
                slope.map(format_g).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Human-readable table.
    pub fn render(&self) -> String {
        let mut s = format!(
            "{:<16} {:>6} {:>6} {:>14} {:>12} {:>14} {:>14}\n",
            "command", "n", "count", "mean", "se", "min", "max"
        );
        for r in &self.rows {
            s += &format!(
                "{:<16} {:>6} {:>6} {:>14.6e} {:>12} {:>14.6e} {:>14.6e}\n",
                r.command,
                r.n,
                r.count,
                r.mean,
                r.se.map_or("-".into(), |v| format!("{v:.3e}")),
                r.min,
                r.max
            );
        }
        for (c, slope) in &self.slopes {
            match slope {
                Some(v) => s += &format!("slope {c}: {v:.4}\n"),
                None => s += &format!("slope {c}: n/a (needs two or more n)\n"),
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_fits() {
        assert_eq!(log_log_slope(&[(10, 2.0), (40, 2.0)]), Some(0.0));
        let s = log_log_slope(&[(10, 0.1), (20, 0.05), (80, 0.0125)]).unwrap();
        assert!((s + 1.0).abs() < 1e-12);
        assert_eq!(log_log_slope(&[(10, 1.0)]), None);
        assert_eq!(log_log_slope(&[(10, 1.0), (10, 2.0)]), None);
        assert_eq!(log_log_slope(&[(10, 0.0), (20, 2.0)]), None);
    }
}
