//! Command-line front end for the SRLNC probability engine and simulator:
//! exact decoding probabilities (symbolic or at a point), dependency
//! probabilities with their classical bound, rank distributions in two
//! closed forms, parameter sweeps, brute-force oracle verdicts, and Monte
//! Carlo codec runs. Emits human tables, CSV, or JSON.

use std::fmt;
use std::fs;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;

use srlnc_core::analysis::{
    full_rank_prob, full_rank_prob_at, p_in, rank_dist_nested, rank_dist_partial_fraction,
    rlnc_full, AnalysisError, BkwBound, FormulaTag,
};
use srlnc_core::field::{FieldError, FieldSpec};
use srlnc_core::linalg::{LinalgError, DEFAULT_ENUM_BUDGET};
use srlnc_core::oracle::{oracle_full_rank_poly, OracleError, DEFAULT_ORACLE_BUDGET};
use srlnc_core::sim::{run_trials, ReceptionMode, SimConfig, SimError, SimReport};
use srlnc_core::symbolic::{parse_rational, RationalFn, SymbolicError};

/// Exit codes: 0 success, 2 usage error (also clap's own), 3 enumeration
/// budget exceeded, 4 degenerate input (pole or coincident values).
#[derive(Debug)]
enum CliError {
    Usage(String),
    Budget(String),
    Degenerate(String),
    Other(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Degenerate(_) => 4,
            CliError::Other(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m)
            | CliError::Budget(m)
            | CliError::Degenerate(m)
            | CliError::Other(m) => f.write_str(m),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match &e {
            AnalysisError::BudgetExceeded { .. }
            | AnalysisError::Linalg(LinalgError::BudgetExceeded { .. }) => {
                CliError::Budget(e.to_string())
            }
            AnalysisError::CoincidentValues(_)
            | AnalysisError::Symbolic(SymbolicError::PoleAtPoint { .. }) => {
                CliError::Degenerate(e.to_string())
            }
            AnalysisError::InvalidParameters(_) => CliError::Usage(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match &e {
            OracleError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match &e {
            SimError::InvalidConfig(_) | SimError::DimensionMismatch(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        match &e {
            FieldError::UnsupportedOrder(_) | FieldError::InvalidSparsity(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<SymbolicError> for CliError {
    fn from(e: SymbolicError) -> Self {
        match &e {
            SymbolicError::ParseRational(_) => CliError::Usage(e.to_string()),
            SymbolicError::PoleAtPoint { .. } => CliError::Degenerate(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RankForm {
    /// Nested-sum closed form (works at every point).
    Nested,
    /// Partial-fraction closed form (requires distinct step probabilities).
    Pf,
}

#[derive(Parser)]
#[command(
    name = "srlnc",
    version,
    about = "Exact decoding probabilities and a packet-level codec simulator for sparse random linear network coding"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact full-rank (decoding success) probability of an m x n matrix.
    Exact(ExactArgs),
    /// Dependency probability p(i,n) of a fresh vector against i
    /// independent rows, optionally next to its classical upper bound.
    Pni(PniArgs),
    /// Rank distribution of an m x n matrix at a sparsity point.
    Rankdist(RankdistArgs),
    /// Sweep the exact probability over m and a p0 grid, emitting CSV.
    Sweep(SweepArgs),
    /// Monte Carlo run of the packet-level codec, with a z-score against
    /// the exact value when available.
    Simulate(SimulateArgs),
    /// Brute-force weight census and MATCH/MISMATCH verdict against the
    /// formula engine.
    Oracle(OracleArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("eval_mode").required(true).args(["p0", "symbolic"])))]
struct ExactArgs {
    /// Field order (prime, or 4/8/16/32/64/128/256).
    #[arg(long)]
    q: u64,
    /// Generation size (columns of the decoding matrix).
    #[arg(long)]
    n: usize,
    /// Received packets (rows of the decoding matrix), m >= n.
    #[arg(long)]
    m: usize,
    /// Sparsity, an exact rational like 7/10 or a decimal like 0.7.
    #[arg(long)]
    p0: Option<String>,
    /// Print the full polynomial instead of a point value.
    #[arg(long)]
    symbolic: bool,
    /// Cap on q^(i*m), the candidate matrices scanned per factor.
    #[arg(long, default_value_t = DEFAULT_ENUM_BUDGET)]
    budget: u128,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
#[command(group(ArgGroup::new("eval_mode").required(true).args(["p0", "symbolic"])))]
struct PniArgs {
    #[arg(long)]
    q: u64,
    /// Ambient vector dimension.
    #[arg(long)]
    n: usize,
    /// Number of independent rows already held, 0 <= i <= n-1.
    #[arg(long)]
    i: usize,
    #[arg(long)]
    p0: Option<String>,
    #[arg(long)]
    symbolic: bool,
    /// Also print the max(p0, (1-p0)/(q-1))^(n-i) upper bound.
    #[arg(long)]
    bound: bool,
    #[arg(long, default_value_t = DEFAULT_ENUM_BUDGET)]
    budget: u128,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct RankdistArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    p0: String,
    #[arg(long, value_enum, default_value_t = RankForm::Nested)]
    form: RankForm,
    #[arg(long, default_value_t = DEFAULT_ENUM_BUDGET)]
    budget: u128,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    n: usize,
    /// Smallest m in the sweep (defaults to n).
    #[arg(long)]
    m_min: Option<usize>,
    /// Largest m in the sweep.
    #[arg(long)]
    m_max: usize,
    /// Comma-separated exact sparsities, e.g. "1/4,1/2,3/4".
    #[arg(long, default_value = "1/4,1/2,3/4")]
    p0_grid: String,
    #[arg(long, default_value_t = DEFAULT_ENUM_BUDGET)]
    budget: u128,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Load the scenario from a JSON or TOML file instead of flags.
    #[arg(long, conflicts_with_all = ["q", "n", "l", "p0", "m", "packets", "eps", "trials", "seed", "no_zero_vectors"])]
    config: Option<std::path::PathBuf>,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    /// Payload length in field symbols.
    #[arg(long, default_value_t = 8)]
    l: usize,
    #[arg(long)]
    p0: Option<String>,
    /// Fixed-m mode: the destination holds exactly m packets.
    #[arg(long)]
    m: Option<usize>,
    /// Stream mode: the source sends this many packets.
    #[arg(long, conflicts_with = "m")]
    packets: Option<u64>,
    /// Stream mode: per-packet erasure probability.
    #[arg(long, requires = "packets")]
    eps: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Never transmit the zero coding vector.
    #[arg(long)]
    no_zero_vectors: bool,
    /// Size of the worker pool for trials (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    /// Cap on q^(m*n), the matrices the census scans.
    #[arg(long, default_value_t = DEFAULT_ORACLE_BUDGET)]
    budget: u128,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Exact(args) => cmd_exact(args),
        Command::Pni(args) => cmd_pni(args),
        Command::Rankdist(args) => cmd_rankdist(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Oracle(args) => cmd_oracle(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn field(q: u64) -> Result<Arc<FieldSpec>, CliError> {
    Ok(FieldSpec::new(q)?)
}

fn float_of(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

fn expr_json(expr: &RationalFn) -> serde_json::Value {
    expr.to_json()
}

fn cmd_exact(args: ExactArgs) -> Result<(), CliError> {
    let field = field(args.q)?;
    if args.symbolic {
        let prob = full_rank_prob(args.m, args.n, &field, args.budget)?;
        match args.format {
            Format::Table => {
                println!(
                    "P[{}x{} sparse random matrix over F_{} has full column rank]",
                    args.m, args.n, args.q
                );
                println!("  = {}", prob.expr.render());
                println!("json: {}", expr_json(&prob.expr));
            }
            Format::Json => {
                let doc = serde_json::json!({
                    "q": args.q,
                    "n": args.n,
                    "m": args.m,
                    "formula": FormulaTag::Eq3,
                    "rendered": prob.expr.render(),
                    "expr": expr_json(&prob.expr),
                });
                println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
            }
            Format::Csv => {
                return Err(CliError::Usage(
                    "symbolic output has no CSV form; use --format table or json".into(),
                ))
            }
        }
        return Ok(());
    }
    let p0 = parse_rational(args.p0.as_deref().expect("clap group"))?;
    let value = full_rank_prob_at(args.m, args.n, &field, args.budget, &p0)?;
    match args.format {
        Format::Table => {
            println!(
                "P[{}x{} over F_{}, p0 = {}] = {} = {}",
                args.m,
                args.n,
                args.q,
                p0,
                value,
                float_of(&value)
            );
        }
        Format::Csv => {
            println!("{}", srlnc_core::analysis::CSV_HEADER);
            let record = srlnc_core::analysis::EvalRecord {
                q: field.q(),
                n: args.n,
                m: Some(args.m),
                i_or_r: None,
                p0: p0.clone(),
                value: value.clone(),
                formula: FormulaTag::Eq3,
            };
            println!("{}", record.to_csv_row());
        }
        Format::Json => {
            let doc = serde_json::json!({
                "q": args.q,
                "n": args.n,
                "m": args.m,
                "formula": FormulaTag::Eq3,
                "p0": p0.to_string(),
                "value": value.to_string(),
                "value_float": float_of(&value),
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
        }
    }
    Ok(())
}

fn cmd_pni(args: PniArgs) -> Result<(), CliError> {
    let field = field(args.q)?;
    let prob = p_in(args.i, args.n, &field, args.budget)?;
    if args.symbolic {
        match args.format {
            Format::Table => {
                println!("p({},{}) over F_{}", args.i, args.n, args.q);
                println!("  = {}", prob.expr.render());
                println!("json: {}", expr_json(&prob.expr));
            }
            Format::Json => {
                let doc = serde_json::json!({
                    "q": args.q,
                    "n": args.n,
                    "i": args.i,
                    "formula": FormulaTag::Eq2,
                    "rendered": prob.expr.render(),
                    "expr": expr_json(&prob.expr),
                });
                println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
            }
            Format::Csv => {
                return Err(CliError::Usage(
                    "symbolic output has no CSV form; use --format table or json".into(),
                ))
            }
        }
        return Ok(());
    }
    let p0 = parse_rational(args.p0.as_deref().expect("clap group"))?;
    let value = prob.eval(&p0)?;
    let bound = if args.bound {
        Some(BkwBound::new(field.q(), args.i, args.n)?.eval(&p0))
    } else {
        None
    };
    match args.format {
        Format::Table => {
            println!(
                "p({},{}) over F_{} at p0 = {} = {} = {}",
                args.i,
                args.n,
                args.q,
                p0,
                value,
                float_of(&value)
            );
            if let Some(bound) = &bound {
                println!("bound = {} = {}", bound, float_of(bound));
            }
        }
        Format::Csv => {
            println!("{}", srlnc_core::analysis::CSV_HEADER);
            let record = srlnc_core::analysis::EvalRecord {
                q: field.q(),
                n: args.n,
                m: None,
                i_or_r: Some(args.i),
                p0: p0.clone(),
                value: value.clone(),
                formula: FormulaTag::Eq2,
            };
            println!("{}", record.to_csv_row());
            if let Some(bound) = &bound {
                let record = srlnc_core::analysis::EvalRecord {
                    q: field.q(),
                    n: args.n,
                    m: None,
                    i_or_r: Some(args.i),
                    p0: p0.clone(),
                    value: bound.clone(),
                    formula: FormulaTag::Bkw,
                };
                println!("{}", record.to_csv_row());
            }
        }
        Format::Json => {
            let mut doc = serde_json::json!({
                "q": args.q,
                "n": args.n,
                "i": args.i,
                "formula": FormulaTag::Eq2,
                "p0": p0.to_string(),
                "value": value.to_string(),
                "value_float": float_of(&value),
            });
            if let Some(bound) = &bound {
                doc["bound"] = serde_json::json!(bound.to_string());
                doc["bound_float"] = serde_json::json!(float_of(bound));
            }
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
        }
    }
    Ok(())
}

fn cmd_rankdist(args: RankdistArgs) -> Result<(), CliError> {
    let field = field(args.q)?;
    let p0 = parse_rational(&args.p0)?;
    let (probs, tag) = match args.form {
        RankForm::Nested => {
            let dist = rank_dist_nested(args.m, args.n, &field, args.budget)?;
            (dist.eval(&p0)?, FormulaTag::NestedSum)
        }
        RankForm::Pf => {
            let dist = rank_dist_partial_fraction(args.m, args.n, &field, args.budget, &p0)?;
            (dist.probs, FormulaTag::PartialFraction)
        }
    };
    let total: BigRational = probs.iter().cloned().sum();
    if !total.is_integer() || total.to_i64() != Some(1) {
        return Err(CliError::Other(format!(
            "rank distribution does not sum to 1 (got {total})"
        )));
    }
    match args.format {
        Format::Table => {
            println!(
                "rank distribution of a {}x{} matrix over F_{} at p0 = {} ({})",
                args.m, args.n, args.q, p0, tag
            );
            for (r, value) in probs.iter().enumerate() {
                println!("  rank {r}: {} = {}", value, float_of(value));
            }
        }
        Format::Csv => {
            println!("{}", srlnc_core::analysis::CSV_HEADER);
            for (r, value) in probs.iter().enumerate() {
                let record = srlnc_core::analysis::EvalRecord {
                    q: field.q(),
                    n: args.n,
                    m: Some(args.m),
                    i_or_r: Some(r),
                    p0: p0.clone(),
                    value: value.clone(),
                    formula: tag,
                };
                println!("{}", record.to_csv_row());
            }
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = probs
                .iter()
                .enumerate()
                .map(|(r, value)| {
                    serde_json::json!({
                        "r": r,
                        "value": value.to_string(),
                        "value_float": float_of(value),
                    })
                })
                .collect();
            let doc = serde_json::json!({
                "q": args.q,
                "n": args.n,
                "m": args.m,
                "p0": p0.to_string(),
                "form": tag,
                "probs": rows,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
        }
    }
    Ok(())
}

const SWEEP_HEADER: &str = "q,n,m,p0,p_exact,p_exact_float,bkw_product_lower,rlnc_reference";

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let field = field(args.q)?;
    let m_min = args.m_min.unwrap_or(args.n);
    if m_min < args.n || args.m_max < m_min {
        return Err(CliError::Usage(format!(
            "need n <= m_min <= m_max, got n={}, m_min={m_min}, m_max={}",
            args.n, args.m_max
        )));
    }
    let grid: Vec<BigRational> = args
        .p0_grid
        .split(',')
        .map(|s| parse_rational(s).map_err(CliError::from))
        .collect::<Result<_, _>>()?;
    let mut lines = vec![SWEEP_HEADER.to_string()];
    for m in m_min..=args.m_max {
        let exact = full_rank_prob(m, args.n, &field, args.budget)?;
        let rlnc = rlnc_full(field.q(), m, args.n);
        for p0 in &grid {
            let value = exact.eval(p0)?;
            let mut bkw_product = BigRational::from_integer(1.into());
            for i in 0..args.n {
                let bound = BkwBound::new(field.q(), i, m)?.eval(p0);
                bkw_product *= BigRational::from_integer(1.into()) - bound;
            }
            lines.push(format!(
                "{},{},{},{},{},{},{},{}",
                args.q,
                args.n,
                m,
                p0,
                value,
                float_of(&value),
                bkw_product,
                rlnc
            ));
        }
    }
    let body = lines.join("\n") + "\n";
    match &args.out {
        Some(path) => fs::write(path, body)?,
        None => print!("{body}"),
    }
    Ok(())
}

fn load_sim_config(args: &SimulateArgs) -> Result<SimConfig, CliError> {
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path)?;
        let parsed: SimConfig = if path.extension().is_some_and(|e| e == "toml") {
            toml::from_str(&text).map_err(|e| CliError::Usage(format!("bad config: {e}")))?
        } else {
            serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("bad config: {e}")))?
        };
        return Ok(parsed);
    }
    let q = args
        .q
        .ok_or_else(|| CliError::Usage("--q is required without --config".into()))?;
    let n = args
        .n
        .ok_or_else(|| CliError::Usage("--n is required without --config".into()))?;
    let p0 = parse_rational(
        args.p0
            .as_deref()
            .ok_or_else(|| CliError::Usage("--p0 is required without --config".into()))?,
    )?;
    let mode = match (args.m, args.packets) {
        (Some(m), None) => ReceptionMode::FixedM { m },
        (None, Some(packets)) => ReceptionMode::Stream {
            packets,
            erasure: args.eps.unwrap_or(0.0),
        },
        (None, None) => {
            return Err(CliError::Usage(
                "pick a mode: --m for fixed-m or --packets [--eps] for stream".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    Ok(SimConfig {
        q,
        n,
        l: args.l,
        p0,
        mode,
        trials: args.trials,
        seed: args.seed,
        include_zero_vectors: !args.no_zero_vectors,
    })
}

/// Exact reference and z-score for a fixed-m report, when the enumeration
/// budget admits it and zero vectors are transmitted (the formulas model
/// them as received rows).
fn simulate_comparison(cfg: &SimConfig, report: &SimReport) -> Option<serde_json::Value> {
    let ReceptionMode::FixedM { m } = cfg.mode else {
        return None;
    };
    if !cfg.include_zero_vectors {
        return None;
    }
    let field = FieldSpec::new(cfg.q).ok()?;
    let exact = full_rank_prob_at(m, cfg.n, &field, DEFAULT_ENUM_BUDGET, &cfg.p0).ok()?;
    let exact_float = float_of(&exact);
    let se = (exact_float * (1.0 - exact_float) / cfg.trials as f64).sqrt();
    let z = if se > 0.0 {
        Some((report.empirical_success_rate - exact_float) / se)
    } else {
        None
    };
    Some(serde_json::json!({
        "exact": exact.to_string(),
        "exact_float": exact_float,
        "z_score": z,
    }))
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let cfg = load_sim_config(&args)?;
    let report = match args.threads {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| CliError::Other(e.to_string()))?;
            pool.install(|| run_trials(&cfg))?
        }
        None => run_trials(&cfg)?,
    };
    let comparison = simulate_comparison(&cfg, &report);
    match args.format {
        Format::Table => {
            println!(
                "{} trials of {} over F_{} (seed {}): {} successes, rate {} (stderr {})",
                report.trials,
                match cfg.mode {
                    ReceptionMode::FixedM { m } => format!("fixed-m m={m}"),
                    ReceptionMode::Stream { packets, erasure } =>
                        format!("stream packets={packets} eps={erasure}"),
                },
                cfg.q,
                cfg.seed,
                report.successes,
                report.empirical_success_rate,
                report.standard_error
            );
            if let Some(stats) = &report.transmissions {
                println!(
                    "transmissions to decode: mean {} min {} p50 {} p90 {} max {}",
                    stats.mean, stats.min, stats.p50, stats.p90, stats.max
                );
            }
            if let Some(cmp) = &comparison {
                println!(
                    "exact = {} = {}, z = {}",
                    cmp["exact"].as_str().unwrap_or("?"),
                    cmp["exact_float"],
                    cmp["z_score"]
                );
            }
        }
        Format::Csv => {
            println!("{}", SimReport::csv_header());
            println!("{}", report.to_csv_row());
        }
        Format::Json => {
            let doc = serde_json::json!({
                "report": report,
                "comparison": comparison,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
        }
    }
    Ok(())
}

fn cmd_oracle(args: OracleArgs) -> Result<(), CliError> {
    let field = field(args.q)?;
    let census = oracle_full_rank_poly(&field, args.m, args.n, args.budget)?;
    let formula = full_rank_prob(args.m, args.n, &field, DEFAULT_ENUM_BUDGET)?;
    let oracle_fn = RationalFn::from_poly(census.poly.clone());
    let verdict = if formula.expr == oracle_fn {
        "MATCH"
    } else {
        "MISMATCH"
    };
    match args.format {
        Format::Table => {
            println!(
                "full-rank weight census for {}x{} matrices over F_{}:",
                args.m, args.n, args.q
            );
            println!("  weight  count");
            for (w, count) in census.census.iter().enumerate() {
                println!("  {w:>6}  {count}");
            }
            println!("oracle  : {}", census.poly.render());
            println!("formula : {}", formula.expr.render());
            println!("verdict : {verdict}");
        }
        Format::Csv => {
            println!("weight,count");
            for (w, count) in census.census.iter().enumerate() {
                println!("{w},{count}");
            }
        }
        Format::Json => {
            let doc = serde_json::json!({
                "q": args.q,
                "n": args.n,
                "m": args.m,
                "census": census.census,
                "oracle_rendered": census.poly.render(),
                "formula_rendered": formula.expr.render(),
                "oracle_expr": oracle_fn.to_json(),
                "formula_expr": formula.expr.to_json(),
                "match": verdict == "MATCH",
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
        }
    }
    if verdict == "MISMATCH" {
        return Err(CliError::Other(
            "formula does not match the brute-force oracle".into(),
        ));
    }
    Ok(())
}
