//! Batch execution of checks over ranges of primes, and the Wall–Sun–Sun search.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::checks::{find_check, run_check, CheckKind, CheckParams, CheckSpec, ParamKind};
use crate::error::{Error, Result};
use crate::sequences::fibonacci_quotient;

/// Lucas checks are scanned over `(A, B)` in `[-LUCAS_GRID, LUCAS_GRID]^2`.
pub const LUCAS_GRID: i64 = 10;

pub const DEFAULT_N_MAX: u64 = 100;

pub const WSS_CHECKPOINT_INTERVAL: u64 = 10_000;

const SEGMENT: u64 = 1 << 16;

/// All primes in `[lo, hi]`, ascending, by a segmented sieve.
pub fn sieve_primes(lo: u64, hi: u64) -> Vec<u64> {
    let lo = lo.max(2);
    if hi < lo {
        return Vec::new();
    }
    let root = hi.isqrt();
    let base = simple_sieve(root);
    let mut out = Vec::new();
    let mut start = lo;
    while start <= hi {
        let end = hi.min(start.saturating_add(SEGMENT - 1));
        let mut composite = vec![false; (end - start + 1) as usize];
        for &q in &base {
            let first = (q * q).max(start.div_ceil(q) * q);
            let mut j = first;
            while j <= end {
                composite[(j - start) as usize] = true;
                j += q;
            }
        }
        out.extend(
            composite
                .iter()
                .enumerate()
                .filter(|(_, &c)| !c)
                .map(|(i, _)| start + i as u64),
        );
        if end == u64::MAX {
            break;
        }
        start = end + 1;
    }
    out
}

fn simple_sieve(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MPolicy {
    /// `m` in `1..=p-1`.
    All,
    /// `1..=p-1` plus `count` draws from `[p, p^2)` prime to `p`.
    Sample {
        count: u32,
        seed: u64,
    },
    List(Vec<i64>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanRequest {
    pub check_ids: Vec<String>,
    pub p_min: u64,
    pub p_max: u64,
    pub a_max: u32,
    pub m_policy: MPolicy,
    #[serde(skip)]
    pub jobs: usize,
    pub budget: u64,
    pub force: bool,
    /// Largest index for index-parameterised checks.
    pub n_max: u64,
}

impl ScanRequest {
    pub fn new<S: Into<String>>(ids: impl IntoIterator<Item = S>, p_min: u64, p_max: u64) -> Self {
        ScanRequest {
            check_ids: ids.into_iter().map(Into::into).collect(),
            p_min,
            p_max,
            a_max: 1,
            m_policy: MPolicy::All,
            jobs: 1,
            budget: crate::checks::DEFAULT_BUDGET,
            force: false,
            n_max: DEFAULT_N_MAX,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        }
    }
}

/// The extra parameter of a row, ordered so rows sort by it numerically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RowParam {
    None,
    M(i64),
    Lucas(i64, i64),
    N(u64),
    K(u64),
}

impl std::fmt::Display for RowParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RowParam::None => Ok(()),
            RowParam::M(m) => write!(f, "{m}"),
            RowParam::Lucas(a, b) => write!(f, "{a}:{b}"),
            RowParam::N(n) => write!(f, "n={n}"),
            RowParam::K(k) => write!(f, "k={k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub check_id: &'static str,
    pub kind: CheckKind,
    pub p: u64,
    pub a: u32,
    pub param: RowParam,
    pub exponent: u32,
    pub lhs: Option<u64>,
    pub rhs: Option<u64>,
    pub defect_valuation: Option<u32>,
    pub status: Status,
    /// Why the row was skipped or errored.
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub pass: u64,
    pub fail: u64,
    pub skip: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanReport {
    pub request: ScanRequest,
    pub rows: Vec<Row>,
    pub summary: BTreeMap<&'static str, Counts>,
}

impl ScanReport {
    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.status == Status::Fail)
    }

    /// Failures of anything other than a conjecture.
    pub fn regressions(&self) -> impl Iterator<Item = &Row> {
        self.failures().filter(|r| r.kind != CheckKind::Conjecture)
    }
}

pub fn scan(request: &ScanRequest) -> Result<ScanReport> {
    let mut specs: Vec<&'static CheckSpec> = request
        .check_ids
        .iter()
        .map(|id| find_check(id))
        .collect::<Result<_>>()?;
    specs.sort_by_key(|s| s.id);
    specs.dedup_by_key(|s| s.id);

    let primes: Vec<u64> = sieve_primes(request.p_min.max(3), request.p_max);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(request.jobs.max(1))
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    let groups: Vec<Vec<Row>> = pool.install(|| {
        primes
            .par_iter()
            .map(|&p| rows_for_prime(request, &specs, p))
            .collect()
    });

    let rows: Vec<Row> = groups.into_iter().flatten().collect();
    let mut summary: BTreeMap<&'static str, Counts> =
        specs.iter().map(|s| (s.id, Counts::default())).collect();
    for row in &rows {
        let c = summary.get_mut(row.check_id).expect("registered id");
        match row.status {
            Status::Pass => c.pass += 1,
            Status::Fail => c.fail += 1,
            Status::Skip => c.skip += 1,
        }
    }
    Ok(ScanReport {
        request: request.clone(),
        rows,
        summary,
    })
}

fn sampled_m(p: u64, count: u32, seed: u64) -> Vec<i64> {
    let Some(p2) = p.checked_mul(p).filter(|&q| q <= i64::MAX as u64) else {
        return Vec::new();
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(p);
    let mut out = Vec::with_capacity(count as usize);
    while out.len() < count as usize {
        let m = rng.gen_range(p..p2);
        if m % p != 0 {
            out.push(m as i64);
        }
    }
    out
}

fn m_values(policy: &MPolicy, p: u64) -> Vec<i64> {
    let small = || (1..p as i64).collect::<Vec<_>>();
    let mut values = match policy {
        MPolicy::All => small(),
        MPolicy::Sample { count, seed } => {
            let mut v = small();
            v.extend(sampled_m(p, *count, *seed));
            v
        }
        MPolicy::List(list) => list.clone(),
    };
    values.sort_unstable();
    values.dedup();
    values
}

fn rows_for_prime(request: &ScanRequest, specs: &[&'static CheckSpec], p: u64) -> Vec<Row> {
    let mut rows = Vec::new();
    for spec in specs {
        let a_range = if spec.uses_a {
            1..=request.a_max
        } else {
            1..=1
        };
        for a in a_range {
            let mut base = CheckParams::new(p, a);
            base.force = request.force;
            base.budget = request.budget;
            let variants: Vec<CheckParams> = match spec.param {
                ParamKind::Plain | ParamKind::OptionalIndex => vec![base],
                ParamKind::M => m_values(&request.m_policy, p)
                    .into_iter()
                    .map(|m| base.with_m(m))
                    .collect(),
                ParamKind::Lucas => (-LUCAS_GRID..=LUCAS_GRID)
                    .flat_map(|x| (-LUCAS_GRID..=LUCAS_GRID).map(move |y| base.with_lucas(x, y)))
                    .collect(),
                ParamKind::Index if p == 3 => (0..=request.n_max).map(|n| base.with_n(n)).collect(),
                ParamKind::Index => vec![base],
            };
            rows.extend(variants.iter().map(|params| run_row(spec, params)));
        }
    }
    rows.sort_by(|x, y| (x.check_id, x.a, x.param).cmp(&(y.check_id, y.a, y.param)));
    rows
}

fn row_param(spec: &CheckSpec, params: &CheckParams) -> RowParam {
    match spec.param {
        ParamKind::Plain => RowParam::None,
        ParamKind::M => params.m.map_or(RowParam::None, RowParam::M),
        ParamKind::Lucas => params
            .lucas
            .map_or(RowParam::None, |(a, b)| RowParam::Lucas(a, b)),
        ParamKind::Index => params.n.map_or(RowParam::None, RowParam::N),
        ParamKind::OptionalIndex => params.n.map_or(RowParam::None, RowParam::K),
    }
}

/// Runs one check and turns its verdict into a report row.
pub fn check_row(id: &str, params: &CheckParams) -> Result<Row> {
    let spec = find_check(id)?;
    let v = run_check(id, params)?;
    Ok(Row {
        check_id: spec.id,
        kind: spec.kind,
        p: v.params.p,
        a: v.params.a,
        param: row_param(spec, &v.params),
        exponent: v.modulus.exponent(),
        lhs: Some(v.lhs.value()),
        rhs: Some(v.rhs.value()),
        defect_valuation: Some(v.defect_valuation),
        status: if v.pass { Status::Pass } else { Status::Fail },
        note: None,
    })
}

fn run_row(spec: &'static CheckSpec, params: &CheckParams) -> Row {
    let note = match check_row(spec.id, params) {
        Ok(row) => return row,
        Err(err) => err,
    };
    let status = match note {
        Error::Domain { .. }
        | Error::BudgetExceeded { .. }
        | Error::ModulusTooLarge { .. }
        | Error::NotInvertible { .. } => Status::Skip,
        _ => Status::Fail,
    };
    Row {
        check_id: spec.id,
        kind: spec.kind,
        p: params.p,
        a: params.a,
        param: row_param(spec, params),
        exponent: spec.exponent_for(params.a),
        lhs: None,
        rhs: None,
        defect_valuation: None,
        status,
        note: Some(note.to_string()),
    }
}

/// A prime with its Fibonacci quotient `F_{p-(p/5)}/p mod p`, as the representative in
/// `(-p/2, p/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct WssRecord {
    pub p: u64,
    pub quotient: i64,
}

impl WssRecord {
    pub fn for_prime(p: u64) -> Result<WssRecord> {
        let q = fibonacci_quotient(p, 1)?;
        Ok(WssRecord {
            p,
            quotient: q.signed() as i64,
        })
    }

    pub fn is_wall_sun_sun(&self) -> bool {
        self.quotient == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WssOptions {
    pub limit: u64,
    /// Keep records with `|quotient| <= near`; `None` keeps every prime.
    pub near: Option<u64>,
    /// Resume from and periodically write this file. Resuming assumes the same `near`.
    pub checkpoint: Option<PathBuf>,
    /// Primes processed between checkpoint writes.
    pub interval: u64,
    /// Stop (after checkpointing) once this prime has been processed.
    pub stop_after: Option<u64>,
}

impl WssOptions {
    pub fn new(limit: u64, near: Option<u64>) -> Self {
        WssOptions {
            limit,
            near,
            checkpoint: None,
            interval: WSS_CHECKPOINT_INTERVAL,
            stop_after: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WssOutcome {
    pub records: Vec<WssRecord>,
    pub last_prime: u64,
    /// False when the run stopped early at `stop_after`.
    pub complete: bool,
}

pub fn wss_search(
    limit: u64,
    near: Option<u64>,
    checkpoint: Option<&Path>,
) -> Result<Vec<WssRecord>> {
    let mut options = WssOptions::new(limit, near);
    options.checkpoint = checkpoint.map(Path::to_path_buf);
    Ok(wss_search_with(&options)?.records)
}

pub fn wss_search_with(options: &WssOptions) -> Result<WssOutcome> {
    if options.limit < 7 {
        return Err(crate::error::domain("wss", "limit must be at least 7"));
    }
    let (mut records, mut last_prime) = match &options.checkpoint {
        Some(path) if path.exists() => read_checkpoint(path)?,
        _ => (Vec::new(), 6),
    };
    records.retain(|r| r.p <= options.limit);

    let keep = |r: &WssRecord| options.near.is_none_or(|t| r.quotient.unsigned_abs() <= t);
    let primes = sieve_primes(last_prime + 1, options.limit);
    let stop_at = options
        .stop_after
        .map(|s| primes.partition_point(|&p| p < s) + 1)
        .unwrap_or(primes.len())
        .min(primes.len());
    let complete = stop_at == primes.len();

    for chunk in primes[..stop_at].chunks(options.interval.max(1) as usize) {
        let found: Vec<WssRecord> = chunk
            .par_iter()
            .map(|&p| WssRecord::for_prime(p))
            .collect::<Result<_>>()?;
        records.extend(found.into_iter().filter(keep));
        last_prime = *chunk.last().expect("chunks are nonempty");
        if let Some(path) = &options.checkpoint {
            write_checkpoint(path, last_prime, &records)?;
        }
    }
    Ok(WssOutcome {
        records,
        last_prime,
        complete,
    })
}

const CHECKPOINT_MAGIC: &str = "wss-checkpoint v1";

pub fn write_checkpoint(path: &Path, last_prime: u64, records: &[WssRecord]) -> Result<()> {
    let mut text = format!("{CHECKPOINT_MAGIC}\nlast_prime={last_prime}\n");
    for r in records {
        text.push_str(&format!("{},{}\n", r.p, r.quotient));
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<(Vec<WssRecord>, u64)> {
    let text = fs::read_to_string(path)?;
    parse_checkpoint(&text)
}

pub fn parse_checkpoint(text: &str) -> Result<(Vec<WssRecord>, u64)> {
    let corrupt = |msg: String| Error::CheckpointCorrupt(msg);
    if !text.ends_with('\n') {
        return Err(corrupt("truncated final line".into()));
    }
    let mut lines = text.lines();
    if lines.next() != Some(CHECKPOINT_MAGIC) {
        return Err(corrupt("missing header".into()));
    }
    let last_prime: u64 = lines
        .next()
        .and_then(|l| l.strip_prefix("last_prime="))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| corrupt("missing last_prime line".into()))?;
    let mut records = Vec::new();
    let mut previous = 0;
    for (i, line) in lines.enumerate() {
        let parsed = line
            .split_once(',')
            .and_then(|(p, q)| Some((p.parse::<u64>().ok()?, q.parse::<i64>().ok()?)));
        let Some((p, quotient)) = parsed else {
            return Err(corrupt(format!("record {} is malformed: {line:?}", i + 1)));
        };
        if p <= previous || p > last_prime || quotient.unsigned_abs() > p / 2 {
            return Err(corrupt(format!(
                "record {} is out of order or range",
                i + 1
            )));
        }
        previous = p;
        records.push(WssRecord { p, quotient });
    }
    Ok((records, last_prime))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modarith::is_prime;

    #[test]
    fn sieve_examples() {
        assert_eq!(sieve_primes(1, 20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(sieve_primes(90, 100), vec![97]);
        assert!(sieve_primes(14, 16).is_empty());
        assert!(sieve_primes(20, 10).is_empty());
    }

    #[test]
    fn sieve_across_segments() {
        let lo = SEGMENT - 500;
        let hi = 3 * SEGMENT + 77;
        let expected: Vec<u64> = (lo..=hi).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieve_primes(lo, hi), expected);
    }

    #[test]
    fn scan_t1_1_small() {
        let report = scan(&ScanRequest::new(["T1_1"], 3, 13)).unwrap();
        let statuses: Vec<_> = report.rows.iter().map(|r| (r.p, r.status)).collect();
        assert_eq!(
            statuses,
            vec![
                (3, Status::Pass),
                (5, Status::Skip),
                (7, Status::Pass),
                (11, Status::Pass),
                (13, Status::Pass)
            ]
        );
        let seven = &report.rows[2];
        assert_eq!((seven.lhs, seven.rhs), (Some(160), Some(160)));
        assert_eq!(
            report.summary["T1_1"],
            Counts {
                pass: 4,
                fail: 0,
                skip: 1
            }
        );
    }

    #[test]
    fn scan_morley_and_anomaly() {
        let report = scan(&ScanRequest::new(["MORLEY"], 5, 5)).unwrap();
        let row = &report.rows[0];
        assert_eq!(
            (row.status, row.lhs, row.rhs, row.exponent),
            (Status::Pass, Some(6), Some(6), 3)
        );

        let mut request = ScanRequest::new(["L2_3A"], 3, 3);
        request.force = true;
        let report = scan(&request).unwrap();
        let row = &report.rows[0];
        assert_eq!((row.status, row.defect_valuation), (Status::Fail, Some(0)));
        assert_eq!(report.regressions().count(), 1);
    }

    #[test]
    fn unknown_id_is_an_error() {
        assert!(matches!(
            scan(&ScanRequest::new(["NOPE"], 3, 13)),
            Err(Error::UnknownCheckId(_))
        ));
    }

    #[test]
    fn sampling_is_seeded_and_prime_to_p() {
        let a = sampled_m(101, 50, 7);
        assert_eq!(a, sampled_m(101, 50, 7));
        assert_ne!(a, sampled_m(101, 50, 8));
        assert!(a
            .iter()
            .all(|&m| (101..101 * 101).contains(&m) && m % 101 != 0));
    }

    #[test]
    fn wss_examples() {
        let all = wss_search(100, None, None).unwrap();
        assert_eq!(all.iter().find(|r| r.p == 7).unwrap().quotient, 3);
        assert_eq!(all.iter().find(|r| r.p == 11).unwrap().quotient, 5);
        assert_eq!(all.first().unwrap().p, 7);
        assert!(wss_search(100, Some(0), None).unwrap().is_empty());
    }

    #[test]
    fn checkpoint_rejects_garbage() {
        assert!(parse_checkpoint("nope\n").is_err());
        assert!(parse_checkpoint("wss-checkpoint v1\nlast_prime=100\n7,3").is_err());
        assert!(parse_checkpoint("wss-checkpoint v1\nlast_prime=100\n7,x\n").is_err());
        assert!(parse_checkpoint("wss-checkpoint v1\nlast_prime=10\n11,5\n").is_err());
        let (records, last) =
            parse_checkpoint("wss-checkpoint v1\nlast_prime=11\n7,3\n11,5\n").unwrap();
        assert_eq!(last, 11);
        assert_eq!(records.len(), 2);
    }
}
