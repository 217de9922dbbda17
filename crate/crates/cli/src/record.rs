use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

pub const HEADER: [&str; 16] = [
    "command",
    "n",
    "d",
    "k",
    "seed",
    "mode",
    "cost",
    "lower_bound",
    "reference_bound",
    "escalations",
    "converged",
    "status",
    "runtime_ms",
    "phase_cost_1",
    "phase_cost_2",
    "phase_cost_3",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    /// The planar instance was below the schedule size and solved exactly.
    Exact,
    /// Escalations were exhausted; the assignment is valid but incomplete.
    Degraded,
    Timeout,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Exact => "exact",
            Status::Degraded => "degraded",
            Status::Timeout => "timeout",
        }
    }

    /// The reported cost is that of a complete solution.
    pub fn is_complete(self) -> bool {
        matches!(self, Status::Ok | Status::Exact)
    }
}

impl std::str::FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ok" => Ok(Status::Ok),
            "exact" => Ok(Status::Exact),
            "degraded" => Ok(Status::Degraded),
            "timeout" => Ok(Status::Timeout),
            other => Err(format!("unknown status {other:?}")),
        }
    }
}

/// One CSV row. Fields that do not apply to a command are `None` and written
/// as empty cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub n: usize,
    pub d: usize,
    pub k: Option<u32>,
    pub seed: u64,
    pub mode: Option<String>,
    pub cost: Option<f64>,
    pub lower_bound: Option<f64>,
    pub reference_bound: Option<f64>,
    pub escalations: Option<u32>,
    pub converged: Option<bool>,
    pub status: Status,
    pub runtime_ms: u64,
    pub phase_costs: Option<[f64; 3]>,
}

/// `%.12g`: twelve significant digits, trailing zeros dropped, exponent
/// form outside `[1e-4, 1e12)`.
pub fn format_g(x: f64) -> String {
    const DIGITS: usize = 12;
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{:.*e}", DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= DIGITS as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

impl RunRecord {
    pub fn to_fields(&self) -> Vec<String> {
        let phases = match self.phase_costs {
            Some(p) => p.iter().map(|&c| format_g(c)).collect(),
            None => vec![String::new(); 3],
        };
        let mut out = vec![
            self.command.clone(),
            self.n.to_string(),
            self.d.to_string(),
            opt(self.k, |k| k.to_string()),
            self.seed.to_string(),
            self.mode.clone().unwrap_or_default(),
            opt(self.cost, format_g),
            opt(self.lower_bound, format_g),
            opt(self.reference_bound, format_g),
            opt(self.escalations, |e| e.to_string()),
            opt(self.converged, |c| c.to_string()),
            self.status.as_str().to_string(),
            self.runtime_ms.to_string(),
        ];
        out.extend(phases);
        out
    }
}

pub fn write_csv<W: Write>(out: W, records: &[RunRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in records {
        w.write_record(r.to_fields())?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: u64,
    pub message: String,
}

fn parse_opt<T: std::str::FromStr>(s: &str, name: &str) -> Result<Option<T>, String>
where
    T::Err: std::fmt::Display,
{
    if s.is_empty() {
        Ok(None)
    } else {
        s.parse()
            .map(Some)
            .map_err(|e| format!("bad {name} {s:?}: {e}"))
    }
}

fn parse_req<T: std::str::FromStr>(s: &str, name: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    parse_opt(s, name)?.ok_or_else(|| format!("missing {name}"))
}

fn parse_row(rec: &csv::StringRecord) -> Result<RunRecord, String> {
    if rec.len() != HEADER.len() {
        return Err(format!(
            "expected {} fields, found {}",
            HEADER.len(),
            rec.len()
        ));
    }
    let f = |i: usize| &rec[i];
    let phases: Vec<Option<f64>> = (13..16)
        .map(|i| parse_opt(f(i), HEADER[i]))
        .collect::<Result<_, _>>()?;
    let phase_costs = match phases[..] {
        [Some(a), Some(b), Some(c)] => Some([a, b, c]),
        [None, None, None] => None,
        _ => return Err("phase costs must be all present or all empty".into()),
    };
    Ok(RunRecord {
        command: parse_req(f(0), "command")?,
        n: parse_req(f(1), "n")?,
        d: parse_req(f(2), "d")?,
        k: parse_opt(f(3), "k")?,
        seed: parse_req(f(4), "seed")?,
        mode: parse_opt(f(5), "mode")?,
        cost: parse_opt(f(6), "cost")?,
        lower_bound: parse_opt(f(7), "lower_bound")?,
        reference_bound: parse_opt(f(8), "reference_bound")?,
        escalations: parse_opt(f(9), "escalations")?,
        converged: parse_opt(f(10), "converged")?,
        status: parse_req(f(11), "status")?,
        runtime_ms: parse_req(f(12), "runtime_ms")?,
        phase_costs,
    })
}

/// Reads a CSV written by [`write_csv`]. Errors carry the 1-based line number.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<RunRecord>, ParseError> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut rows = Vec::new();
    for (idx, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| ParseError {
            line: e.position().map_or(idx as u64 + 1, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(idx as u64 + 1, |p| p.line());
        if idx == 0 {
            if rec.iter().ne(HEADER.iter().copied()) {
                return Err(ParseError {
                    line,
                    message: format!("header must be {}", HEADER.join(",")),
                });
            }
            continue;
        }
        rows.push(parse_row(&rec).map_err(|message| ParseError { line, message })?);
    }
    if rows.is_empty() && r.position().line() <= 1 {
        return Err(ParseError {
            line: 1,
            message: "empty file, header expected".into(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_format() {
        assert_eq!(format_g(0.0), "0");
        assert_eq!(format_g(1.0), "1");
        assert_eq!(format_g(1.5), "1.5");
        assert_eq!(format_g(-2.25), "-2.25");
        assert_eq!(format_g(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_g(342.2823), "342.2823");
        assert_eq!(format_g(123456789012.0), "123456789012");
        assert_eq!(format_g(1234567890123.0), "1.23456789012e+12");
        assert_eq!(format_g(0.0001), "0.0001");
        assert_eq!(format_g(0.00001234), "1.234e-05");
        assert_eq!(format_g(9.9999999999999), "10");
    }

    #[test]
    fn round_trip() {
        let rec = RunRecord {
            command: "solve-planar".into(),
            n: 30,
            d: 3,
            k: Some(1),
            seed: 7,
            mode: Some("empirical".into()),
            cost: Some(0.25),
            lower_bound: Some(0.03125),
            reference_bound: None,
            escalations: Some(0),
            converged: None,
            status: Status::Ok,
            runtime_ms: 12,
            phase_costs: Some([0.5, 0.125, 0.0625]),
        };
        let mut buf = Vec::new();
        write_csv(&mut buf, std::slice::from_ref(&rec)).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("command,n,d,k,seed,mode,cost,lower_bound,reference_bound,"));
        assert_eq!(read_csv(&buf[..]).unwrap(), vec![rec]);
    }

    #[test]
    fn errors_name_the_line() {
        let text = format!(
            "{}\nsolve-axial,4,3,,0,,1,0.5,2,,,ok,1,,,\nsolve-axial,x,3,,1,,1,0.5,2,,,ok,1,,,\n",
            HEADER.join(",")
        );
        let err = read_csv(text.as_bytes()).unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("bad n"));
        assert_eq!(read_csv("a,b\n".as_bytes()).unwrap_err().line, 1);
        assert!(read_csv("".as_bytes()).is_err());
    }
}
