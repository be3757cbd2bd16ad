//! Command-line parsing and execution.
//!
//! Exit codes: 0 when every non-conjecture verdict passes (conjecture failures only print a
//! warning), 1 when a theorem, lemma or auxiliary check fails or a run errors, 2 on usage errors.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::checks::{find_check, list_checks, CheckKind, CheckParams, DEFAULT_BUDGET};
use crate::error::Error;
use crate::modarith::{is_prime, Modulus};
use crate::report::{self, Format, RecordLine, CSV_HEADER};
use crate::scanner::{
    check_row, scan, wss_search_with, MPolicy, Row, ScanRequest, Status, WssOptions, DEFAULT_N_MAX,
    WSS_CHECKPOINT_INTERVAL,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Largest prime accepted on the command line; keeps `p^2` inside the residue range.
pub const P_LIMIT: u64 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Check {
        id: String,
        params: CheckParams,
        format: Format,
    },
    Scan {
        request: ScanRequest,
        out: Option<PathBuf>,
        format: Format,
    },
    Wss {
        limit: u64,
        near: Option<u64>,
        checkpoint: Option<PathBuf>,
        out: Option<PathBuf>,
        format: Format,
    },
    ListChecks,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "fibcong",
    version,
    about = "Verify central binomial congruences modulo prime powers"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Run one check at one parameter point.
    Check {
        #[arg(long)]
        id: String,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        a: u32,
        #[arg(long, allow_negative_numbers = true)]
        m: Option<i64>,
        /// Index for index-parameterised checks.
        #[arg(long)]
        n: Option<u64>,
        /// Lucas parameters as `A,B`.
        #[arg(long, value_parser = parse_lucas, allow_hyphen_values = true)]
        lucas: Option<(i64, i64)>,
        #[arg(long)]
        force: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Run checks over a range of primes.
    Scan {
        /// Comma-separated check ids, or `all`.
        #[arg(long, value_delimiter = ',', required = true)]
        ids: Vec<String>,
        #[arg(long, default_value_t = 3)]
        pmin: u64,
        #[arg(long)]
        pmax: u64,
        #[arg(long, default_value_t = 1)]
        amax: u32,
        /// `all`, `sample:<count>:<seed>` or `list:<v1,v2,...>`.
        #[arg(long = "m-policy", default_value = "all", value_parser = parse_policy, allow_hyphen_values = true)]
        m_policy: MPolicy,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[arg(long)]
        force: bool,
        /// Largest index for index-parameterised checks.
        #[arg(long, default_value_t = DEFAULT_N_MAX)]
        nmax: u64,
    },
    /// Search for Wall–Sun–Sun primes and near misses.
    Wss {
        #[arg(long)]
        limit: u64,
        /// Report primes whose quotient is at most this in absolute value; all primes if absent.
        #[arg(long)]
        near: Option<u64>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// List the registered checks.
    ListChecks,
}

fn parse_lucas(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(',').ok_or("expected A,B")?;
    let parse = |x: &str| x.trim().parse::<i64>().map_err(|e| format!("{x:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn parse_policy(s: &str) -> Result<MPolicy, String> {
    if s == "all" {
        return Ok(MPolicy::All);
    }
    if let Some(rest) = s.strip_prefix("sample:") {
        let (count, seed) = rest
            .split_once(':')
            .ok_or("expected sample:<count>:<seed>")?;
        return Ok(MPolicy::Sample {
            count: count.parse().map_err(|e| format!("sample count: {e}"))?,
            seed: seed.parse().map_err(|e| format!("sample seed: {e}"))?,
        });
    }
    if let Some(rest) = s.strip_prefix("list:") {
        let values = rest
            .split(',')
            .map(|v| v.trim().parse::<i64>().map_err(|e| format!("{v:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        if values.is_empty() {
            return Err("empty list".into());
        }
        return Ok(MPolicy::List(values));
    }
    Err(format!("unknown m policy {s:?}"))
}

fn render_policy(policy: &MPolicy) -> String {
    match policy {
        MPolicy::All => "all".into(),
        MPolicy::Sample { count, seed } => format!("sample:{count}:{seed}"),
        MPolicy::List(values) => {
            let v: Vec<String> = values.iter().map(i64::to_string).collect();
            format!("list:{}", v.join(","))
        }
    }
}

enum ParseFailure {
    Clap(clap::Error),
    Invalid(String),
}

fn usage(msg: impl Into<String>) -> ParseFailure {
    ParseFailure::Invalid(msg.into())
}

fn check_prime(p: u64, flag: &str) -> Result<(), ParseFailure> {
    if p >= P_LIMIT {
        return Err(usage(format!("{flag} {p} exceeds {P_LIMIT}")));
    }
    if p < 3 || !is_prime(p) {
        return Err(usage(format!("{flag} {p} is not an odd prime")));
    }
    Ok(())
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, usize::from)
}

fn parse_inner<S: AsRef<str>>(argv: &[S]) -> Result<Command, ParseFailure> {
    let args = std::iter::once("fibcong").chain(argv.iter().map(AsRef::as_ref));
    let cli = Cli::try_parse_from(args).map_err(ParseFailure::Clap)?;
    Ok(match cli.command {
        Sub::Check {
            id,
            p,
            a,
            m,
            n,
            lucas,
            force,
            budget,
            format,
        } => {
            let spec = find_check(&id).map_err(|e| usage(e.to_string()))?;
            check_prime(p, "--p")?;
            if a == 0 {
                return Err(usage("--a must be at least 1"));
            }
            if Modulus::new(p, spec.exponent_for(a)).is_err() {
                return Err(usage(format!(
                    "{id} at p = {p}, a = {a} needs a modulus above 2^62"
                )));
            }
            let params = CheckParams {
                p,
                a,
                m,
                n,
                lucas,
                force,
                budget,
            };
            Command::Check {
                id: spec.id.to_string(),
                params,
                format: format.into(),
            }
        }
        Sub::Scan {
            ids,
            pmin,
            pmax,
            amax,
            m_policy,
            jobs,
            budget,
            out,
            format,
            force,
            nmax,
        } => {
            let ids: Vec<String> = if ids.iter().any(|i| i == "all") {
                list_checks().iter().map(|c| c.id.to_string()).collect()
            } else {
                ids
            };
            for id in &ids {
                find_check(id).map_err(|e| usage(e.to_string()))?;
            }
            if pmin > pmax {
                return Err(usage("--pmin must not exceed --pmax"));
            }
            if pmax >= P_LIMIT {
                return Err(usage(format!("--pmax {pmax} exceeds {P_LIMIT}")));
            }
            if amax == 0 || amax > 61 {
                return Err(usage("--amax must be in 1..=61"));
            }
            let jobs = jobs.unwrap_or_else(default_jobs);
            if jobs == 0 {
                return Err(usage("--jobs must be at least 1"));
            }
            Command::Scan {
                request: ScanRequest {
                    check_ids: ids,
                    p_min: pmin,
                    p_max: pmax,
                    a_max: amax,
                    m_policy,
                    jobs,
                    budget,
                    force,
                    n_max: nmax,
                },
                out,
                format: format.into(),
            }
        }
        Sub::Wss {
            limit,
            near,
            checkpoint,
            out,
            format,
        } => {
            if !(7..P_LIMIT).contains(&limit) {
                return Err(usage(format!("--limit must be in 7..{P_LIMIT}")));
            }
            Command::Wss {
                limit,
                near,
                checkpoint,
                out,
                format: format.into(),
            }
        }
        Sub::ListChecks => Command::ListChecks,
    })
}

/// Parses arguments (without the program name).
pub fn parse_args<S: AsRef<str>>(argv: &[S]) -> Result<Command, UsageError> {
    parse_inner(argv).map_err(|f| match f {
        ParseFailure::Clap(e) => UsageError(e.to_string()),
        ParseFailure::Invalid(msg) => UsageError(msg),
    })
}

impl Command {
    /// Renders the command back into arguments that parse to the same command.
    pub fn to_args(&self) -> Vec<String> {
        let mut args: Vec<String> = Vec::new();
        let mut push = |flag: &str, value: String| {
            args.push(flag.to_string());
            args.push(value);
        };
        match self {
            Command::Check { id, params, format } => {
                push("check", String::new());
                push("--id", id.clone());
                push("--p", params.p.to_string());
                push("--a", params.a.to_string());
                if let Some(m) = params.m {
                    push("--m", m.to_string());
                }
                if let Some(n) = params.n {
                    push("--n", n.to_string());
                }
                if let Some((a, b)) = params.lucas {
                    push("--lucas", format!("{a},{b}"));
                }
                push("--budget", params.budget.to_string());
                push("--format", format.as_str().to_string());
                if params.force {
                    push("--force", String::new());
                }
            }
            Command::Scan {
                request,
                out,
                format,
            } => {
                push("scan", String::new());
                push("--ids", request.check_ids.join(","));
                push("--pmin", request.p_min.to_string());
                push("--pmax", request.p_max.to_string());
                push("--amax", request.a_max.to_string());
                push("--m-policy", render_policy(&request.m_policy));
                push("--jobs", request.jobs.to_string());
                push("--budget", request.budget.to_string());
                push("--nmax", request.n_max.to_string());
                if let Some(out) = out {
                    push("--out", out.display().to_string());
                }
                push("--format", format.as_str().to_string());
                if request.force {
                    push("--force", String::new());
                }
            }
            Command::Wss {
                limit,
                near,
                checkpoint,
                out,
                format,
            } => {
                push("wss", String::new());
                push("--limit", limit.to_string());
                if let Some(near) = near {
                    push("--near", near.to_string());
                }
                if let Some(c) = checkpoint {
                    push("--checkpoint", c.display().to_string());
                }
                if let Some(out) = out {
                    push("--out", out.display().to_string());
                }
                push("--format", format.as_str().to_string());
            }
            Command::ListChecks => push("list-checks", String::new()),
        }
        args.retain(|a| !a.is_empty());
        args
    }
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => stdout.write_all(text.as_bytes()),
    }
}

/// Exit code for a set of rows, printing the conjecture banner when needed.
fn verdict_exit(rows: &[Row], stderr: &mut dyn Write) -> i32 {
    let failed = rows.iter().filter(|r| r.status == Status::Fail);
    let (conjectures, regressions): (Vec<&Row>, Vec<&Row>) =
        failed.partition(|r| r.kind == CheckKind::Conjecture);
    if !regressions.is_empty() {
        let _ = writeln!(
            stderr,
            "error: {} non-conjecture verdict(s) failed",
            regressions.len()
        );
        for r in regressions.iter().take(20) {
            let note = r.note.as_deref().unwrap_or("");
            let _ = writeln!(
                stderr,
                "  {} p={} a={} {} {note}",
                r.check_id, r.p, r.a, r.param
            );
        }
        return EXIT_FAILURE;
    }
    if !conjectures.is_empty() {
        let _ = writeln!(
            stderr,
            "warning: {} conjecture candidate(s) failed; these are findings, not regressions",
            conjectures.len()
        );
    }
    EXIT_OK
}

fn is_usage_error(err: &Error) -> bool {
    matches!(
        err,
        Error::Domain { .. }
            | Error::MissingParameter { .. }
            | Error::BudgetExceeded { .. }
            | Error::NotOddPrime(_)
            | Error::ModulusTooLarge { .. }
            | Error::NotInvertible { .. }
            | Error::UnknownCheckId(_)
    )
}

pub fn execute(cmd: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match cmd {
        Command::Check { id, params, format } => match check_row(id, params) {
            Ok(row) => {
                let line = RecordLine::from(&row);
                let text = match format {
                    Format::Csv => format!("{CSV_HEADER}\n{}\n", line.to_csv()),
                    Format::Json => format!(
                        "{}\n",
                        serde_json::to_string(&line).expect("row serializes")
                    ),
                };
                let _ = stdout.write_all(text.as_bytes());
                verdict_exit(&[row], stderr)
            }
            Err(err) => {
                let _ = writeln!(stderr, "error: {err}");
                if matches!(err, Error::Domain { .. }) {
                    let _ = writeln!(
                        stderr,
                        "hint: --force evaluates outside the declared domain"
                    );
                }
                if is_usage_error(&err) {
                    EXIT_USAGE
                } else {
                    EXIT_FAILURE
                }
            }
        },
        Command::Scan {
            request,
            out,
            format,
        } => {
            let report = match scan(request) {
                Ok(r) => r,
                Err(err) => {
                    let _ = writeln!(stderr, "error: {err}");
                    return if is_usage_error(&err) {
                        EXIT_USAGE
                    } else {
                        EXIT_FAILURE
                    };
                }
            };
            let text = report::render_rows(*format, request, &report.rows);
            if let Err(err) = emit(out, &text, stdout) {
                let _ = writeln!(stderr, "error: writing report: {err}");
                return EXIT_FAILURE;
            }
            for (id, c) in &report.summary {
                let _ = writeln!(
                    stderr,
                    "{id}: pass={} fail={} skip={}",
                    c.pass, c.fail, c.skip
                );
            }
            verdict_exit(&report.rows, stderr)
        }
        Command::Wss {
            limit,
            near,
            checkpoint,
            out,
            format,
        } => {
            let options = WssOptions {
                limit: *limit,
                near: *near,
                checkpoint: checkpoint.clone(),
                interval: WSS_CHECKPOINT_INTERVAL,
                stop_after: None,
            };
            let outcome = match wss_search_with(&options) {
                Ok(o) => o,
                Err(err) => {
                    let _ = writeln!(stderr, "error: {err}");
                    return EXIT_FAILURE;
                }
            };
            let text = report::render_wss(*format, &options, &outcome.records);
            if let Err(err) = emit(out, &text, stdout) {
                let _ = writeln!(stderr, "error: writing report: {err}");
                return EXIT_FAILURE;
            }
            let hits = outcome
                .records
                .iter()
                .filter(|r| r.is_wall_sun_sun())
                .count();
            let _ = writeln!(
                stderr,
                "searched primes 7..={limit}: {} record(s), {hits} Wall-Sun-Sun prime(s)",
                outcome.records.len()
            );
            EXIT_OK
        }
        Command::ListChecks => {
            let _ = writeln!(stdout, "id\tkind\texponent\tdomain\tstatement");
            for c in list_checks() {
                let _ = writeln!(
                    stdout,
                    "{}\t{}\t{}\t{}\t{}",
                    c.id,
                    c.kind,
                    c.exponent,
                    c.domain_text(),
                    c.statement
                );
            }
            EXIT_OK
        }
    }
}

/// Parses and executes, returning the process exit code.
pub fn run<S: AsRef<str>>(argv: &[S], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match parse_inner(argv) {
        Ok(cmd) => execute(&cmd, stdout, stderr),
        Err(ParseFailure::Clap(e)) => {
            let text = e.render().to_string();
            match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            }
        }
        Err(ParseFailure::Invalid(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
    }
}
