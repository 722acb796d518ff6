//! Command-line surface for `inacc`: argument parsing, input decoding and
//! report rendering (JSON, table, CSV).

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use inacc_core::tolerance::DEFAULT_MAX_N;
use inacc_core::{
    achievable_degrees, appendix_certificate, check_monotonicity, construct_inaccessible_decision, in_blind_spot,
    jeffrey_posterior, posterior_equals_target, proper_partition_count, radon_nikodym, realize_from_spectrum, sweep,
    validate_context, verify_inaccessibility, ConstructOptions, DecisionContext, ProbabilityVector, ScanOptions,
    SetPartition, SpectrumOptions, SweepConfig, ValidatedContext, VerifyOptions, ZeroPolicy,
};
use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Debug, Parser)]
#[command(
    name = "inacc",
    version,
    about = "Conditionally inaccessible decisions over finite outcome spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads for partition scans.
    #[arg(long, global = true, value_name = "N")]
    pub parallel: Option<usize>,
    /// Largest outcome count an exhaustive scan will accept.
    #[arg(long, global = true, value_name = "N")]
    pub max_n: Option<usize>,
    /// Required with --max-n above the default guard.
    #[arg(long, global = true)]
    pub accept_long_runtime: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Objective distribution: comma-separated weights or `uniform:n`.
    #[arg(long, value_name = "WEIGHTS")]
    pub pstar: Option<String>,
    /// Prior: comma-separated weights or `uniform:n`.
    #[arg(long, value_name = "WEIGHTS")]
    pub p: Option<String>,
    /// JSON file with keys n, p_star, p and either d or f1 and f2.
    #[arg(long, value_name = "FILE")]
    pub context: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecisionArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Decision gap f1 - f2.
    #[arg(long, allow_hyphen_values = true, value_name = "VALUES")]
    pub d: Option<String>,
    #[arg(long, allow_hyphen_values = true, value_name = "VALUES")]
    pub f1: Option<String>,
    #[arg(long, allow_hyphen_values = true, value_name = "VALUES")]
    pub f2: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate or count proper non-trivial partitions of {1..n}.
    Partitions {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count: bool,
    },
    /// Jeffrey posterior of p on one partition.
    Posterior {
        #[command(flatten)]
        pair: PairArgs,
        /// `0,0,1` or `{1,2}|{3}`.
        #[arg(long)]
        partition: String,
    },
    /// Whether p* lies in the blind spot of p.
    Blindspot {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Build a strongly inaccessible decision.
    Construct {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 0.5)]
        eps_frac: f64,
        /// Clamp ln(0) to a finite floor instead of rejecting p* with zeros.
        #[arg(long)]
        clamp: bool,
        /// Include every partition's posterior expectation.
        #[arg(long)]
        detail: bool,
    },
    /// Scan every partition for one decision.
    Verify {
        #[command(flatten)]
        decision: DecisionArgs,
        #[arg(long)]
        detail: bool,
    },
    /// Degree of inaccessibility of one decision.
    Degree {
        #[command(flatten)]
        decision: DecisionArgs,
        #[arg(long)]
        detail: bool,
    },
    /// Posterior classes and the achievable degrees.
    Spectrum {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, env = "INACC_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        eta_frac: f64,
    },
    /// Build a decision with a prescribed degree.
    Realize {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        k: u64,
        #[arg(long, env = "INACC_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        eta_frac: f64,
        #[arg(long)]
        detail: bool,
    },
    /// Check that informed updates never overturn a decision p gets right.
    Monotonicity {
        #[command(flatten)]
        decision: DecisionArgs,
    },
    /// Adjacent-pair decomposition of p - p*.
    Certificate {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Monte-Carlo sweep over Dirichlet-sampled pairs.
    Sweep {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, env = "INACC_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        eps_frac: f64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Partitions { .. } => "partitions",
            Command::Posterior { .. } => "posterior",
            Command::Blindspot { .. } => "blindspot",
            Command::Construct { .. } => "construct",
            Command::Verify { .. } => "verify",
            Command::Degree { .. } => "degree",
            Command::Spectrum { .. } => "spectrum",
            Command::Realize { .. } => "realize",
            Command::Monotonicity { .. } => "monotonicity",
            Command::Certificate { .. } => "certificate",
            Command::Sweep { .. } => "sweep",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flag value or flag combination; exit code 2.
    Usage { flag: &'static str, message: String },
    /// The inputs parsed but the operation rejected them; exit code 1.
    Domain(inacc_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage { .. } => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage { flag, message } => write!(f, "invalid value for {flag}: {message}"),
            CliError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl From<inacc_core::Error> for CliError {
    fn from(e: inacc_core::Error) -> Self {
        CliError::Domain(e)
    }
}

fn usage(flag: &'static str, message: impl Into<String>) -> CliError {
    CliError::Usage {
        flag,
        message: message.into(),
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Comma-separated decimals.
pub fn parse_values(flag: &'static str, text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| usage(flag, format!("`{}` is not a number", t.trim())))
        })
        .collect()
}

/// Comma-separated decimals or `uniform:n`.
pub fn parse_weights(flag: &'static str, text: &str) -> CliResult<Vec<f64>> {
    match text.trim().strip_prefix("uniform:") {
        Some(n) => {
            let n: usize = n
                .parse()
                .map_err(|_| usage(flag, format!("`{text}` needs an integer after uniform:")))?;
            if n == 0 {
                return Err(usage(flag, "uniform:0 has no outcomes"));
            }
            Ok(vec![1.0 / n as f64; n])
        }
        None => parse_values(flag, text),
    }
}

fn read_context(path: &PathBuf) -> CliResult<DecisionContext> {
    let text = std::fs::read_to_string(path).map_err(|e| usage("--context", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage("--context", format!("{}: {e}", path.display())))
}

impl PairArgs {
    fn load(&self) -> CliResult<(ProbabilityVector, ProbabilityVector, Option<DecisionContext>)> {
        let ctx = self.context.as_ref().map(read_context).transpose()?;
        let p_star = match (&self.pstar, &ctx) {
            (Some(t), _) => parse_weights("--pstar", t)?,
            (None, Some(c)) => c.p_star.clone(),
            (None, None) => return Err(usage("--pstar", "required (or pass --context)")),
        };
        let p = match (&self.p, &ctx) {
            (Some(t), _) => parse_weights("--p", t)?,
            (None, Some(c)) => c.p.clone(),
            (None, None) => return Err(usage("--p", "required (or pass --context)")),
        };
        if let Some(n) = ctx.as_ref().and_then(|c| c.n) {
            if n != p_star.len() || n != p.len() {
                return Err(inacc_core::Error::DimensionMismatch {
                    expected: n,
                    found: if n != p_star.len() { p_star.len() } else { p.len() },
                }
                .into());
            }
        }
        Ok((ProbabilityVector::new(p_star)?, ProbabilityVector::new(p)?, ctx))
    }
}

impl DecisionArgs {
    fn load(&self) -> CliResult<ValidatedContext> {
        let (p_star, p, ctx) = self.pair.load()?;
        if self.d.is_some() && (self.f1.is_some() || self.f2.is_some()) {
            return Err(usage("--d", "give either --d or --f1 and --f2, not both"));
        }
        let (f1, f2, d) = match (&self.d, &self.f1, &self.f2) {
            (Some(d), _, _) => (None, None, Some(parse_values("--d", d)?)),
            (None, Some(f1), Some(f2)) => (Some(parse_values("--f1", f1)?), Some(parse_values("--f2", f2)?), None),
            (None, Some(_), None) => return Err(usage("--f2", "required with --f1")),
            (None, None, Some(_)) => return Err(usage("--f1", "required with --f2")),
            (None, None, None) => match ctx {
                Some(c) if c.d.is_some() || (c.f1.is_some() && c.f2.is_some()) => (c.f1, c.f2, c.d),
                _ => {
                    return Err(usage(
                        "--d",
                        "required (or --f1 and --f2, or a --context with d or f1 and f2)",
                    ))
                }
            },
        };
        let ctx = DecisionContext {
            n: None,
            p_star: p_star.weights().to_vec(),
            p: p.weights().to_vec(),
            f1,
            f2,
            d,
        };
        Ok(validate_context(&ctx)?)
    }
}

fn scan_options(cli: &Cli) -> CliResult<ScanOptions> {
    let threads = cli.parallel.unwrap_or(1);
    if threads == 0 {
        return Err(usage("--parallel", "needs at least one thread"));
    }
    let max_n = cli.max_n.unwrap_or(DEFAULT_MAX_N);
    if max_n > DEFAULT_MAX_N && !cli.accept_long_runtime {
        return Err(usage(
            "--max-n",
            format!("{max_n} exceeds the default guard {DEFAULT_MAX_N}; add --accept-long-runtime"),
        ));
    }
    Ok(ScanOptions::parallel(threads).with_max_n(max_n))
}

/// Result of one command: a flat JSON object plus optional per-partition rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub json: Value,
    pub rows: Option<Vec<Row>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub rgs: String,
    pub block_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expectation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub in_inaccessible_set: Option<bool>,
}

/// Serialize `value` to an object, lift a nested `report` into the top level
/// and prepend the command name.
fn flat(command: &str, value: impl Serialize) -> Value {
    let mut out = Map::new();
    out.insert("command".into(), json!(command));
    let Value::Object(fields) = serde_json::to_value(value).expect("reports serialize") else {
        unreachable!("reports are structs");
    };
    for (k, v) in fields {
        match (k.as_str(), v) {
            ("report", Value::Object(inner)) => {
                for (k, v) in inner {
                    insert_field(&mut out, k, v);
                }
            }
            (_, v) => insert_field(&mut out, k, v),
        }
    }
    Value::Object(out)
}

fn insert_field(out: &mut Map<String, Value>, key: String, value: Value) {
    match key.as_str() {
        "per_partition" => {
            if value.as_array().is_some_and(|a| !a.is_empty()) {
                out.insert("partitions".into(), value);
            }
        }
        _ => {
            out.insert(key, value);
        }
    }
}

fn score_rows(report: &inacc_core::InaccessibilityReport) -> Vec<Row> {
    report
        .per_partition
        .iter()
        .map(|s| Row {
            rgs: s.partition.rgs_string(),
            block_count: s.partition.block_count(),
            expectation: Some(s.expectation),
            in_inaccessible_set: Some(s.inaccessible),
        })
        .collect()
}

pub fn run(cli: &Cli) -> CliResult<Report> {
    let scan = scan_options(cli)?;
    let name = cli.command.name();
    let wants_rows = cli.format == Format::Csv;
    let detail_or_csv = |detail: bool| detail || wants_rows;
    let report = match &cli.command {
        Command::Partitions { n, count } => {
            let total = proper_partition_count(*n)?;
            if *count {
                Report {
                    json: json!({ "command": name, "n": n, "count": total }),
                    rows: None,
                }
            } else {
                if *n > scan.max_n {
                    return Err(inacc_core::Error::RefusedTooLarge { n: *n, max: scan.max_n }.into());
                }
                let parts: Vec<SetPartition> = inacc_core::enumerate_proper_nontrivial(*n)?.collect();
                let rows = parts
                    .iter()
                    .map(|p| Row {
                        rgs: p.rgs_string(),
                        block_count: p.block_count(),
                        expectation: None,
                        in_inaccessible_set: None,
                    })
                    .collect();
                Report {
                    json: json!({ "command": name, "n": n, "count": total, "partitions": parts }),
                    rows: Some(rows),
                }
            }
        }
        Command::Posterior { pair, partition } => {
            let (p_star, p, _) = pair.load()?;
            let part: SetPartition = partition
                .parse()
                .map_err(|e: inacc_core::Error| usage("--partition", e.to_string()))?;
            let q = jeffrey_posterior(&p_star, &p, &part)?;
            Report {
                json: json!({
                    "command": name,
                    "n": p.len(),
                    "partition": part,
                    "posterior": q,
                    "equals_target": posterior_equals_target(&p_star, &p, &part)?,
                }),
                rows: None,
            }
        }
        Command::Blindspot { pair } => {
            let (p_star, p, _) = pair.load()?;
            let ratio = radon_nikodym(&p_star, &p)?;
            let b = in_blind_spot(&p_star, &p)?;
            Report {
                json: json!({
                    "command": name,
                    "n": p.len(),
                    "member": b.member,
                    "injective": ratio.injective,
                    "ratio": ratio.values,
                    "witness": b.witness,
                }),
                rows: None,
            }
        }
        Command::Construct {
            pair,
            eps_frac,
            clamp,
            detail,
        } => {
            let (p_star, p, _) = pair.load()?;
            let opts = ConstructOptions {
                policy: if *clamp { ZeroPolicy::Clamp } else { ZeroPolicy::Strict },
                scan,
            };
            let mut c = construct_inaccessible_decision(&p_star, &p, *eps_frac, &opts)?;
            if detail_or_csv(*detail) {
                c.report = verify_inaccessibility(
                    &p_star,
                    &p,
                    &c.d,
                    &VerifyOptions {
                        scan,
                        keep_partitions: true,
                    },
                )?;
            }
            let rows = wants_rows.then(|| score_rows(&c.report));
            let mut json = flat(name, &c);
            if let Value::Object(map) = &mut json {
                let m = map.remove("m").expect("construction has m");
                map.insert("M".into(), m);
            }
            Report { json, rows }
        }
        Command::Verify { decision, detail } | Command::Degree { decision, detail } => {
            let ctx = decision.load()?;
            let r = verify_inaccessibility(
                &ctx.p_star,
                &ctx.p,
                &ctx.d,
                &VerifyOptions {
                    scan,
                    keep_partitions: detail_or_csv(*detail),
                },
            )?;
            let rows = wants_rows.then(|| score_rows(&r));
            let json = if name == "degree" {
                let mut out = json!({
                    "command": name,
                    "n": r.n,
                    "degree": r.degree,
                    "partition_count": r.partition_count,
                    "tolerance": r.tolerance,
                    "tolerance_deterministic": r.tolerance_deterministic,
                });
                if *detail {
                    out["inaccessible_set"] = json!(r.inaccessible_set().map(|p| p.rgs_string()).collect::<Vec<_>>());
                }
                out
            } else {
                flat(name, &r)
            };
            Report { json, rows }
        }
        Command::Spectrum { pair, seed, eta_frac } => {
            let (p_star, p, _) = pair.load()?;
            let s = achievable_degrees(
                &p_star,
                &p,
                &SpectrumOptions {
                    seed: *seed,
                    eta_fraction: *eta_frac,
                    scan,
                },
            )?;
            let mut json = flat(name, &s);
            json["all_multiplicities_one"] = json!(s.all_multiplicities_one());
            json["partition_count"] = json!(s.partition_count());
            Report { json, rows: None }
        }
        Command::Realize {
            pair,
            k,
            seed,
            eta_frac,
            detail,
        } => {
            let (p_star, p, _) = pair.load()?;
            let s = achievable_degrees(
                &p_star,
                &p,
                &SpectrumOptions {
                    seed: *seed,
                    eta_fraction: *eta_frac,
                    scan,
                },
            )?;
            let mut r = realize_from_spectrum(&p_star, &p, &s, *k, &scan)?;
            if detail_or_csv(*detail) {
                r.report = verify_inaccessibility(
                    &p_star,
                    &p,
                    &r.d,
                    &VerifyOptions {
                        scan,
                        keep_partitions: true,
                    },
                )?;
            }
            let rows = wants_rows.then(|| score_rows(&r.report));
            let mut json = flat(name, &r);
            json["achievable"] = json!(s.achievable);
            json["seed"] = json!(seed);
            json["eta"] = json!(s.eta);
            Report { json, rows }
        }
        Command::Monotonicity { decision } => {
            let ctx = decision.load()?;
            let m = check_monotonicity(&ctx.p_star, &ctx.p, &ctx.d, &scan)?;
            let mut json = flat(name, m);
            json["n"] = json!(ctx.p.len());
            Report { json, rows: None }
        }
        Command::Certificate { pair } => {
            let (p_star, p, _) = pair.load()?;
            let c = appendix_certificate(&p_star, &p)?;
            let mut json = flat(name, &c);
            json["n"] = json!(p.len());
            json["violations"] = json!(c.violations());
            Report { json, rows: None }
        }
        Command::Sweep {
            n,
            samples,
            seed,
            alpha,
            eps_frac,
        } => {
            let config = SweepConfig {
                alpha: *alpha,
                eps_fraction: *eps_frac,
                scan,
                ..SweepConfig::new(*n, *samples, *seed)
            };
            Report {
                json: flat(name, sweep(&config)?),
                rows: None,
            }
        }
    };
    if wants_rows && report.rows.is_none() {
        return Err(usage(
            "--format",
            format!("csv is only available for per-partition reports, not `{name}`"),
        ));
    }
    Ok(report)
}

/// Render a report in the requested format.
pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json).expect("json values serialize");
            s.push('\n');
            s
        }
        Format::Table => table(&report.json),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in report.rows.as_deref().unwrap_or_default() {
                w.serialize(row).expect("rows serialize");
            }
            String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            a.iter().map(scalar).collect::<Vec<_>>().join(", ")
        }
        Value::Object(o) if o.contains_key("blocks") => scalar(&o["blocks"]),
        other => other.to_string(),
    }
}

fn table(v: &Value) -> String {
    let Value::Object(map) = v else {
        return scalar(v);
    };
    let width = map.keys().map(String::len).max().unwrap_or(0);
    let mut out = String::new();
    let mut nested = Vec::new();
    for (k, v) in map {
        match v {
            Value::Array(items) if items.iter().any(Value::is_object) => nested.push((k, items)),
            _ => writeln!(out, "{k:<width$}  {}", scalar(v)).unwrap(),
        }
    }
    for (k, items) in nested {
        writeln!(out, "\n{k}:").unwrap();
        let Some(Value::Object(first)) = items.first() else {
            continue;
        };
        let cols: Vec<&String> = first.keys().collect();
        let cells: Vec<Vec<String>> = items
            .iter()
            .map(|row| {
                cols.iter()
                    .map(|c| scalar(row.get(c.as_str()).unwrap_or(&Value::Null)))
                    .collect()
            })
            .collect();
        let widths: Vec<usize> = cols
            .iter()
            .enumerate()
            .map(|(i, c)| cells.iter().map(|r| r[i].len()).max().unwrap_or(0).max(c.len()))
            .collect();
        let line = |vals: Vec<&str>| {
            vals.iter()
                .zip(&widths)
                .map(|(v, w)| format!("{v:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        writeln!(out, "{}", line(cols.iter().map(|c| c.as_str()).collect())).unwrap();
        for r in &cells {
            writeln!(out, "{}", line(r.iter().map(String::as_str).collect())).unwrap();
        }
    }
    out
}

/// Parse, run and render; returns the exit code and what to print on
/// stdout and stderr.
pub fn main_with_args<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                (0, text, String::new())
            } else {
                (2, String::new(), text)
            };
        }
    };
    match run(&cli) {
        Ok(report) => (0, render(&report, cli.format), String::new()),
        Err(e) => (e.exit_code(), String::new(), format!("error: {e}\n")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, Value) {
        let (code, out, err) = main_with_args(std::iter::once("inacc").chain(args.iter().copied()));
        let v = if code == 0 {
            serde_json::from_str(&out).unwrap()
        } else {
            json!({ "stderr": err })
        };
        (code, v)
    }

    #[test]
    fn weights_parse() {
        assert_eq!(parse_weights("--p", "uniform:4").unwrap(), vec![0.25; 4]);
        assert_eq!(parse_weights("--p", "0.5, 0.5").unwrap(), vec![0.5, 0.5]);
        assert!(matches!(
            parse_weights("--p", "0.5,x"),
            Err(CliError::Usage { flag: "--p", .. })
        ));
        assert!(matches!(parse_weights("--p", "uniform:a"), Err(CliError::Usage { .. })));
    }

    #[test]
    fn documented_examples() {
        let (code, v) = run_args(&[
            "blindspot",
            "--pstar",
            "0.5,0.3,0.2",
            "--p",
            "0.333333,0.333333,0.333334",
        ]);
        assert_eq!(code, 0);
        assert_eq!(v["member"], json!(true));

        let (_, v) = run_args(&["partitions", "--n", "4", "--count"]);
        assert_eq!(v["count"], json!(13));

        let (_, v) = run_args(&[
            "construct",
            "--pstar",
            "0.5,0.3,0.2",
            "--p",
            "uniform:3",
            "--eps-frac",
            "0.5",
        ]);
        assert!((v["M"].as_f64().unwrap() - 0.048686).abs() < 1e-6);
        assert_eq!(v["degree"], json!(3));
        assert_eq!(v["strong"], json!(true));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            run_args(&["blindspot", "--pstar", "0.5,0.3,0.2", "--p", "uniform:3"]).0,
            0
        );
        assert_eq!(run_args(&["blindspot", "--pstar", "0.5,0.3,0.2"]).0, 2);
        assert_eq!(run_args(&["nonsense"]).0, 2);
        assert_eq!(
            run_args(&["construct", "--pstar", "0.5,0.3,0.2", "--p", "0.5,0.3,0.2"]).0,
            1
        );
        assert_eq!(run_args(&["partitions", "--n", "14"]).0, 1);
        assert_eq!(run_args(&["partitions", "--n", "4", "--max-n", "20"]).0, 2);
        assert_eq!(
            run_args(&["partitions", "--n", "4", "--max-n", "20", "--accept-long-runtime"]).0,
            0
        );
        let (code, v) = run_args(&["verify", "--pstar", "0.5,0.3,0.2", "--p", "uniform:3", "--d", "1,-1"]);
        assert_eq!(code, 1, "{v}");
    }
}
