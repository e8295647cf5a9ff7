//! The `qinv` command-line front end.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::invariants::{jones_closed, jones_hat, jones_rosso_oracle, TorusKnot};
use crate::verify::{self, CheckReport, Status};
use crate::wchars::{conjecture_rhs, limit_rhs, wchar_shifted, WCharParams};
use crate::{Coeff, QSeries, WeightVector, Q};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qinv", version, about = "Exact q-series for coloured torus-knot invariants and W-algebra characters")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// Include wall-clock fields (timestamp, runtime_ms).
    #[arg(long, global = true)]
    pub timestamps: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum JonesPath {
    Closed,
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    Desk,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coloured invariant of the torus knot T(p, p') at colour n Lambda_1.
    Jones {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        pp: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_order)]
        order: Q,
        /// Divide by the trailing monomial.
        #[arg(long)]
        hat: bool,
        #[arg(long, value_enum, default_value_t = JonesPath::Closed)]
        path: JonesPath,
    },
    /// Shifted character; weights are fundamental-weight coordinates such as "1,0".
    Wchar {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        pp: u64,
        #[arg(long)]
        mu: Option<String>,
        #[arg(long)]
        xi: Option<String>,
        #[arg(long)]
        zeta: Option<String>,
        #[arg(long, value_parser = parse_order)]
        order: Q,
    },
    /// Limit of the invariants along colours (j + kr) Lambda_1.
    Limit {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        pp: u64,
        #[arg(long)]
        j: usize,
        #[arg(long, value_parser = parse_order)]
        order: Q,
    },
    /// Conjectured limit of the normalized invariants for p < r.
    Conjecture {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        pp: u64,
        #[arg(long, value_parser = parse_order)]
        order: Q,
    },
    /// Run one check from the catalog.
    Verify {
        #[arg(long)]
        check: String,
        /// JSON parameter file.
        #[arg(long, value_name = "FILE")]
        params: Option<PathBuf>,
        /// Overrides the check's `order` parameter.
        #[arg(long)]
        order: Option<i64>,
    },
    /// Run every acceptance instance.
    Suite {
        #[arg(long, value_enum, default_value_t = Profile::Desk)]
        profile: Profile,
    },
}

fn parse_order(s: &str) -> std::result::Result<Q, String> {
    let q = match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.parse().map_err(|_| format!("invalid order `{s}`"))?;
            let d: i64 = d.parse().map_err(|_| format!("invalid order `{s}`"))?;
            if d <= 0 {
                return Err(format!("invalid order `{s}`"));
            }
            Q::new(n, d)
        }
        None => Q::from_integer(s.parse().map_err(|_| format!("invalid order `{s}`"))?),
    };
    Ok(q)
}

/// Parses a fundamental-weight coordinate list such as `"1,0"`.
pub fn parse_weight(r: usize, s: &str) -> Result<WeightVector> {
    let coords: std::result::Result<Vec<i64>, _> = s.split(',').map(|x| x.trim().parse::<i64>()).collect();
    let coords =
        coords.map_err(|_| Error::MalformedParams(format!("weight `{s}` is not a comma-separated integer list")))?;
    if coords.len() + 1 != r {
        return Err(Error::MalformedParams(format!("weight `{s}` needs {} coordinates at rank {r}", r - 1)));
    }
    WeightVector::from_fundamental(r, &coords)
}

/// A series as `sum_i c_i q^{e_i / grid}`, modulo `q^{trunc[0] / trunc[1]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub grid: i64,
    pub trunc: Option<[i64; 2]>,
    /// `[exponent numerator, coefficient numerator, coefficient denominator]`.
    pub terms: Vec<(i64, String, String)>,
}

impl SeriesRecord {
    pub fn from_series(series: &QSeries) -> Self {
        let grid = match series.trunc() {
            Some(t) => num_integer::lcm(series.grid(), *t.denom()),
            None => series.grid(),
        };
        let terms = series
            .terms()
            .map(|(e, c)| ((e * Q::from_integer(grid)).to_integer(), c.numer().to_string(), c.denom().to_string()))
            .collect();
        SeriesRecord { grid, trunc: series.trunc().map(|t| [*t.numer(), *t.denom()]), terms }
    }

    pub fn to_series(&self) -> Result<QSeries> {
        if self.grid <= 0 {
            return Err(Error::MalformedParams(format!("grid must be positive, got {}", self.grid)));
        }
        let trunc = match self.trunc {
            Some([_, 0]) => return Err(Error::MalformedParams("zero truncation denominator".into())),
            Some([n, d]) => Some(Q::new(n, d)),
            None => None,
        };
        let mut terms = Vec::with_capacity(self.terms.len());
        for (e, n, d) in &self.terms {
            let parse = |s: &str| s.parse::<BigInt>().map_err(|_| Error::MalformedParams(format!("bad integer `{s}`")));
            let (n, d) = (parse(n)?, parse(d)?);
            if d == BigInt::from(0) {
                return Err(Error::MalformedParams("zero coefficient denominator".into()));
            }
            terms.push((Q::new(*e, self.grid), Coeff::new(n, d)));
        }
        Ok(QSeries::from_terms(terms, trunc))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    Series,
    Report,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub parameters: Value,
    pub truncation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub kind: RecordKind,
    pub meta: Meta,
    pub payload: Value,
}

impl OutputRecord {
    pub fn series(&self) -> Result<Option<QSeries>> {
        if self.kind != RecordKind::Series {
            return Ok(None);
        }
        let record: SeriesRecord = serde_json::from_value(self.payload["series"].clone())
            .map_err(|e| Error::MalformedParams(e.to_string()))?;
        record.to_series().map(Some)
    }

    pub fn report(&self) -> Result<Option<CheckReport>> {
        if self.kind != RecordKind::Report {
            return Ok(None);
        }
        serde_json::from_value(self.payload.clone()).map(Some).map_err(|e| Error::MalformedParams(e.to_string()))
    }
}

struct Emitter {
    timestamps: bool,
}

impl Emitter {
    fn meta(&self, command: &str, parameters: Value, truncation: Option<Q>) -> Meta {
        Meta {
            tool: "qinv".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            parameters,
            truncation: truncation.map(|t| t.to_string()),
            timestamp: self
                .timestamps
                .then(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)),
        }
    }

    fn series(
        &self,
        command: &str,
        parameters: Value,
        trunc: Q,
        series: &QSeries,
        extra: Option<Value>,
    ) -> OutputRecord {
        let mut payload = json!({ "series": SeriesRecord::from_series(series) });
        if let Some(Value::Object(map)) = extra {
            payload.as_object_mut().expect("object").extend(map);
        }
        OutputRecord { kind: RecordKind::Series, meta: self.meta(command, parameters, Some(trunc)), payload }
    }

    fn report(&self, mut report: CheckReport) -> OutputRecord {
        if !self.timestamps {
            report.runtime_ms = 0;
        }
        let truncation = report.params.get("order").and_then(Value::as_i64).map(Q::from_integer);
        let meta = self.meta("verify", report.params.clone(), truncation);
        OutputRecord {
            kind: RecordKind::Report,
            meta,
            payload: serde_json::to_value(report).expect("reports serialize"),
        }
    }
}

fn render(records: &[OutputRecord], format: Format) -> Result<String> {
    let mut out = String::new();
    match format {
        Format::Json => {
            let value =
                if records.len() == 1 { serde_json::to_value(&records[0]) } else { serde_json::to_value(records) }
                    .expect("records serialize");
            out.push_str(&serde_json::to_string_pretty(&value).expect("json"));
            out.push('\n');
        }
        Format::Csv => {
            for record in records {
                if let Some(series) = record.series()? {
                    out.push_str("exponent,coeff_num,coeff_den\n");
                    for (e, c) in series.terms() {
                        out.push_str(&format!("{e},{},{}\n", c.numer(), c.denom()));
                    }
                } else if let Some(report) = record.report()? {
                    if out.is_empty() {
                        out.push_str("check_id,status,instance,order\n");
                    }
                    for o in &report.agreement_orders {
                        out.push_str(&format!(
                            "{},{},\"{}\",{}\n",
                            report.check_id, report.status, o.instance, o.order
                        ));
                    }
                }
            }
        }
        Format::Plain => {
            for record in records {
                if let Some(series) = record.series()? {
                    out.push_str(&format!("{series}\n"));
                    for key in ["trailing_exponent", "trailing_sign"] {
                        if let Some(v) = record.payload.get(key) {
                            out.push_str(&format!("{key}: {v}\n"));
                        }
                    }
                } else if let Some(report) = record.report()? {
                    out.push_str(&format!("{}: {}\n", report.check_id, report.status));
                    for o in &report.agreement_orders {
                        out.push_str(&format!("  {}: {}\n", o.instance, o.order));
                    }
                    for w in &report.witnesses {
                        out.push_str(&format!("  witness {}: {}", w.instance, w.detail));
                        if let Some(e) = &w.exponent {
                            out.push_str(&format!(" at q^{e}"));
                        }
                        out.push('\n');
                    }
                    for n in &report.notes {
                        out.push_str(&format!("  note: {n}\n"));
                    }
                }
            }
        }
    }
    Ok(out)
}

fn is_usage_error(e: &Error) -> bool {
    !matches!(e, Error::DivisionByNonUnit | Error::InexactDivision | Error::NoTrailingTerm)
}

fn execute(cli: &Cli) -> Result<(Vec<OutputRecord>, i32)> {
    let emit = Emitter { timestamps: cli.timestamps };
    match &cli.command {
        Command::Jones { r, p, pp, n, order, hat, path } => {
            let knot = TorusKnot::new(*p, *pp)?;
            let params = json!({ "r": r, "p": p, "pp": pp, "n": n, "hat": hat, "path": path });
            let record = if *hat {
                if *path == JonesPath::Oracle {
                    return Err(Error::MalformedParams("--hat is computed on the closed path only".into()));
                }
                let h = jones_hat(*r, knot, *n, *order)?;
                let extra = json!({ "trailing_exponent": h.exponent.to_string(), "trailing_sign": h.sign });
                emit.series("jones", params, *order, &h.series, Some(extra))
            } else {
                let series = match path {
                    JonesPath::Closed => jones_closed(*r, knot, *n, *order)?,
                    JonesPath::Oracle => jones_rosso_oracle(*r, knot, *n, *order)?,
                };
                emit.series("jones", params, *order, &series, None)
            };
            Ok((vec![record], EXIT_OK))
        }
        Command::Wchar { r, p, pp, mu, xi, zeta, order } => {
            let weight = |s: &Option<String>| match s {
                Some(s) => parse_weight(*r, s),
                None => Ok(WeightVector::zero(*r)),
            };
            let (mu_w, xi_w, zeta_w) = (weight(mu)?, weight(xi)?, weight(zeta)?);
            let params = json!({
                "r": r, "p": p, "pp": pp,
                "mu": mu_w.fundamental_coords().iter().map(ToString::to_string).collect::<Vec<_>>(),
                "xi": xi_w.fundamental_coords().iter().map(ToString::to_string).collect::<Vec<_>>(),
                "zeta": zeta_w.fundamental_coords().iter().map(ToString::to_string).collect::<Vec<_>>(),
            });
            let w = WCharParams::new(*r, *p, *pp, xi_w, zeta_w, mu_w)?;
            let series = wchar_shifted(&w, *order)?;
            Ok((vec![emit.series("wchar", params, *order, &series, None)], EXIT_OK))
        }
        Command::Limit { r, p, pp, j, order } => {
            let series = limit_rhs(*r, *p, *pp, *j, *order)?;
            let params = json!({ "r": r, "p": p, "pp": pp, "j": j });
            Ok((vec![emit.series("limit", params, *order, &series, None)], EXIT_OK))
        }
        Command::Conjecture { r, p, pp, order } => {
            let series = conjecture_rhs(*r, *p, *pp, *order)?;
            let params = json!({ "r": r, "p": p, "pp": pp });
            Ok((vec![emit.series("conjecture", params, *order, &series, None)], EXIT_OK))
        }
        Command::Verify { check, params, order } => {
            let id: verify::CheckId = check.parse()?;
            let mut value = match params {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .map_err(|e| Error::MalformedParams(format!("{}: {e}", path.display())))?;
                    serde_json::from_str(&text)
                        .map_err(|e| Error::MalformedParams(format!("{}: {e}", path.display())))?
                }
                None => json!({}),
            };
            if let Some(t) = order {
                match value.as_object_mut() {
                    Some(map) => {
                        map.insert("order".into(), json!(t));
                    }
                    None => return Err(Error::MalformedParams("parameters must be a JSON object".into())),
                }
            }
            let report = verify::check(id, &value)?;
            let code = if report.status == Status::Fail { EXIT_CHECK_FAILED } else { EXIT_OK };
            Ok((vec![emit.report(report)], code))
        }
        Command::Suite { profile: Profile::Desk } => {
            let mut records = Vec::new();
            let mut code = EXIT_OK;
            for criterion in verify::desk_profile() {
                let outcome = verify::run_criterion(&criterion)?;
                if outcome.status == Status::Fail {
                    code = EXIT_CHECK_FAILED;
                }
                records.extend(outcome.reports.into_iter().map(|r| emit.report(r)));
            }
            Ok((records, code))
        }
    }
}

/// Applies `QINV_THREADS` to the global worker pool, once per process.
pub fn configure_threads() {
    if let Some(n) = std::env::var("QINV_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Runs the CLI on `argv`, writing records to `stdout` (or `--out`) and
/// diagnostics to `stderr`. Returns the process exit code.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let (records, code) = match execute(&cli) {
        Ok(done) => done,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return if is_usage_error(&e) { EXIT_USAGE } else { EXIT_CHECK_FAILED };
        }
    };
    let text = match render(&records, cli.format) {
        Ok(text) => text,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_CHECK_FAILED;
        }
    };
    let written = match &cli.out {
        Some(path) => fs::write(path, text),
        None => stdout.write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_CHECK_FAILED;
    }
    code
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    configure_threads();
    run_with(argv, &mut io::stdout().lock(), &mut io::stderr().lock())
}
