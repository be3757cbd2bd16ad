//! CSV and JSON-lines renderings of scan reports and Wall–Sun–Sun records.

use std::fmt::Write as _;

use serde::Serialize;

use crate::scanner::{MPolicy, Row, ScanRequest, WssOptions, WssRecord};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const CSV_HEADER: &str = "check_id,p,a,m,exponent,lhs,rhs,defect_valuation,status";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn as_str(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// One report line; CSV and JSON carry exactly these fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecordLine {
    pub check_id: String,
    pub p: u64,
    pub a: u32,
    pub m: String,
    pub exponent: u32,
    pub lhs: Option<u64>,
    pub rhs: Option<u64>,
    pub defect_valuation: Option<u32>,
    pub status: String,
}

impl From<&Row> for RecordLine {
    fn from(row: &Row) -> Self {
        RecordLine {
            check_id: row.check_id.to_string(),
            p: row.p,
            a: row.a,
            m: row.param.to_string(),
            exponent: row.exponent,
            lhs: row.lhs,
            rhs: row.rhs,
            defect_valuation: row.defect_valuation,
            status: row.status.as_str().to_string(),
        }
    }
}

impl RecordLine {
    pub fn to_csv(&self) -> String {
        fn opt<T: ToString>(v: Option<T>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.check_id,
            self.p,
            self.a,
            self.m,
            self.exponent,
            opt(self.lhs),
            opt(self.rhs),
            opt(self.defect_valuation),
            self.status
        )
    }

    pub fn from_csv(line: &str) -> Option<RecordLine> {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return None;
        }
        fn opt<T: std::str::FromStr>(s: &str) -> Option<Option<T>> {
            if s.is_empty() {
                Some(None)
            } else {
                s.parse().ok().map(Some)
            }
        }
        Some(RecordLine {
            check_id: f[0].to_string(),
            p: f[1].parse().ok()?,
            a: f[2].parse().ok()?,
            m: f[3].to_string(),
            exponent: f[4].parse().ok()?,
            lhs: opt(f[5])?,
            rhs: opt(f[6])?,
            defect_valuation: opt(f[7])?,
            status: f[8].to_string(),
        })
    }
}

#[derive(Serialize)]
struct Meta<'a> {
    version: &'a str,
    request: &'a ScanRequest,
    seed: Option<u64>,
}

fn seed_of(request: &ScanRequest) -> Option<u64> {
    match request.m_policy {
        MPolicy::Sample { seed, .. } => Some(seed),
        _ => None,
    }
}

/// Rows preceded by `#` comments naming the version, the request and the sampling seed.
/// The worker count is left out so that reports do not depend on it.
pub fn render_csv(request: &ScanRequest, rows: &[Row]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# fibcong {VERSION}");
    let _ = writeln!(
        out,
        "# request: {}",
        serde_json::to_string(request).expect("request serializes")
    );
    match seed_of(request) {
        Some(seed) => {
            let _ = writeln!(out, "# seed: {seed}");
        }
        None => out.push_str("# seed: none\n"),
    }
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&RecordLine::from(row).to_csv());
        out.push('\n');
    }
    out
}

/// One JSON object per line; the first holds the same metadata as the CSV comments.
pub fn render_json(request: &ScanRequest, rows: &[Row]) -> String {
    let meta = Meta {
        version: VERSION,
        request,
        seed: seed_of(request),
    };
    let mut out = serde_json::json!({ "meta": meta }).to_string();
    out.push('\n');
    for row in rows {
        out.push_str(&serde_json::to_string(&RecordLine::from(row)).expect("row serializes"));
        out.push('\n');
    }
    out
}

pub fn render_rows(format: Format, request: &ScanRequest, rows: &[Row]) -> String {
    match format {
        Format::Csv => render_csv(request, rows),
        Format::Json => render_json(request, rows),
    }
}

/// Parses the data lines of a CSV report, skipping comments and the header.
pub fn parse_csv(text: &str) -> Option<Vec<RecordLine>> {
    text.lines()
        .filter(|l| !l.starts_with('#') && *l != CSV_HEADER)
        .map(RecordLine::from_csv)
        .collect()
}

/// Parses the data lines of a JSON-lines report, skipping the metadata line.
pub fn parse_json(text: &str) -> Option<Vec<RecordLine>> {
    let mut out = Vec::new();
    for line in text.lines() {
        let value: serde_json::Value = serde_json::from_str(line).ok()?;
        if value.get("meta").is_some() {
            continue;
        }
        let get_u = |k: &str| value.get(k).and_then(|v| v.as_u64());
        let get_s = |k: &str| value.get(k).and_then(|v| v.as_str()).map(str::to_string);
        out.push(RecordLine {
            check_id: get_s("check_id")?,
            p: get_u("p")?,
            a: get_u("a")? as u32,
            m: get_s("m")?,
            exponent: get_u("exponent")? as u32,
            lhs: get_u("lhs"),
            rhs: get_u("rhs"),
            defect_valuation: get_u("defect_valuation").map(|v| v as u32),
            status: get_s("status")?,
        });
    }
    Some(out)
}

pub fn render_wss(format: Format, options: &WssOptions, records: &[WssRecord]) -> String {
    let near = options
        .near
        .map_or_else(|| "all".to_string(), |t| t.to_string());
    let mut out = String::new();
    match format {
        Format::Csv => {
            let _ = writeln!(out, "# fibcong {VERSION}");
            let _ = writeln!(out, "# wss limit={} near={near}", options.limit);
            out.push_str("p,quotient\n");
            for r in records {
                let _ = writeln!(out, "{},{}", r.p, r.quotient);
            }
        }
        Format::Json => {
            let meta = serde_json::json!({
                "meta": { "version": VERSION, "limit": options.limit, "near": near }
            });
            let _ = writeln!(out, "{meta}");
            for r in records {
                let _ = writeln!(
                    out,
                    "{}",
                    serde_json::to_string(r).expect("record serializes")
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scanner::scan;

    #[test]
    fn csv_and_json_carry_the_same_rows() {
        let mut request = ScanRequest::new(["T1_1", "T2_MAIN", "L2_1"], 3, 23);
        request.m_policy = MPolicy::Sample { count: 3, seed: 11 };
        let report = scan(&request).unwrap();
        let csv = render_csv(&request, &report.rows);
        let json = render_json(&request, &report.rows);
        assert!(csv.contains("\ncheck_id,p,a,m,exponent,lhs,rhs,defect_valuation,status\n"));
        assert!(csv.contains("# seed: 11\n"));
        let from_csv = parse_csv(&csv).unwrap();
        assert_eq!(from_csv, parse_json(&json).unwrap());
        assert_eq!(from_csv.len(), report.rows.len());
        assert!(from_csv
            .iter()
            .any(|r| r.status == "SKIP" && r.lhs.is_none()));
    }

    #[test]
    fn negative_m_is_rendered_signed() {
        let mut request = ScanRequest::new(["T2_MAIN"], 7, 7);
        request.m_policy = MPolicy::List(vec![-16, 3]);
        let report = scan(&request).unwrap();
        let csv = render_csv(&request, &report.rows);
        assert!(csv.contains("\nT2_MAIN,7,1,-16,2,"));
    }
}
