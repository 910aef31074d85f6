use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;

use repdigit_prover::baker::{bound_chain, ChainMode};
use repdigit_prover::prover::{emit_report, prove, ProveError, ProveOptions, ReportFormat};
use repdigit_prover::reduction::{
    run_round, theta_expansion, theta_terms, ConvergentPolicy, Lambda3Sign, ReductionError, RoundConfig,
};
use repdigit_prover::search::search;
use repdigit_prover::sequence::RecurrenceDef;
use repdigit_prover::{PrecisionError, PrecisionPolicy};

const EXIT_INCOMPLETE: u8 = 2;
const EXIT_PRECISION: u8 = 3;

#[derive(Parser)]
#[command(
    version,
    about = "Certified proof that exactly 12 Padovan numbers are concatenations of three repdigits"
)]
struct Cli {
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true, env = "REPDIGIT_PROVER_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the whole proof and write the certificate.
    Prove(ProveArgs),
    /// Exhaustive search over an index range.
    Search(SearchArgs),
    /// The bound chain with every intermediate constant.
    Bounds(BoundsArgs),
    /// Certified convergents of ln α / ln 10.
    Cf(CfArgs),
    /// One reduction round.
    Reduce(ReduceArgs),
}

#[derive(Args)]
struct Precision {
    /// Upper limit of the working precision in bits.
    #[arg(long, default_value_t = 16384)]
    precision_bits: u32,
}

impl Precision {
    fn policy(&self) -> Result<PrecisionPolicy, PrecisionError> {
        PrecisionPolicy::new(self.precision_bits.min(256), self.precision_bits, 2.0)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    PublishedFirst,
    Increasing,
}

impl From<PolicyArg> for ConvergentPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::PublishedFirst => ConvergentPolicy::PublishedFirst,
            PolicyArg::Increasing => ConvergentPolicy::Increasing,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    Minus,
    Plus,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Args)]
struct ProveArgs {
    #[arg(long, default_value_t = 560)]
    search_ceiling: u64,
    #[command(flatten)]
    precision: Precision,
    /// Run round 3 under both signs of the (b−c) term.
    #[arg(long)]
    paper_faithful: bool,
    /// Also report the bound chain with recomputed heights.
    #[arg(long)]
    tight: bool,
    #[arg(long, value_enum, default_value_t = PolicyArg::PublishedFirst)]
    policy: PolicyArg,
    #[arg(long, default_value_t = RoundConfig::DEFAULT_MARGIN)]
    margin: usize,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 1)]
    nmin: u64,
    #[arg(long)]
    nmax: u64,
    /// Initial terms of the recurrence.
    #[arg(long, value_parser = parse_initial, default_value = "1,1,1")]
    initial: [u64; 3],
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    tight: bool,
    #[command(flatten)]
    precision: Precision,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct CfArgs {
    #[arg(long)]
    terms: usize,
    #[command(flatten)]
    precision: Precision,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    round: u8,
    /// Absolute bound on n, as an integer or in the form `2e56`.
    #[arg(long, value_parser = parse_x0)]
    x0: BigUint,
    /// Bound on l; computed by running round 1 when omitted.
    #[arg(long)]
    l_max: Option<u64>,
    /// Bound on m; computed by running round 2 when omitted.
    #[arg(long)]
    m_max: Option<u64>,
    #[arg(long, value_enum, default_value_t = PolicyArg::PublishedFirst)]
    policy: PolicyArg,
    #[arg(long, value_enum, default_value_t = SignArg::Minus)]
    sign: SignArg,
    #[arg(long, default_value_t = RoundConfig::DEFAULT_MARGIN)]
    margin: usize,
    #[command(flatten)]
    precision: Precision,
    #[arg(long)]
    output: PathBuf,
}

fn parse_initial(s: &str) -> Result<[u64; 3], String> {
    let terms: Vec<u64> = s
        .split(',')
        .map(|t| t.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("{e}"))?;
    terms
        .try_into()
        .map_err(|_| "expected three comma-separated terms".to_string())
}

fn parse_x0(s: &str) -> Result<BigUint, String> {
    let bad = || format!("{s:?} is not a positive integer");
    let (mant, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<u32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let m: BigUint = mant.parse().map_err(|_| bad())?;
    Ok(m * BigUint::from(10u32).pow(exp))
}

#[derive(Debug)]
enum CliError {
    Incomplete(String),
    Precision(String),
    Other(String),
}

impl From<ProveError> for CliError {
    fn from(e: ProveError) -> Self {
        match e {
            ProveError::ProofIncomplete { .. } => CliError::Incomplete(e.to_string()),
            ProveError::PrecisionExhausted { .. } => CliError::Precision(e.to_string()),
            ProveError::InvalidOptions(_) => CliError::Other(e.to_string()),
        }
    }
}

impl From<PrecisionError> for CliError {
    fn from(e: PrecisionError) -> Self {
        match e {
            PrecisionError::PrecisionExhausted { .. } => CliError::Precision(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<ReductionError> for CliError {
    fn from(e: ReductionError) -> Self {
        match e {
            ReductionError::Precision(p) => p.into(),
            ReductionError::RoundFailed { .. } => CliError::Incomplete(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

fn other(e: impl std::fmt::Display) -> CliError {
    CliError::Other(e.to_string())
}

fn write_json<T: Serialize>(path: &PathBuf, value: &T) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(other)?;
    s.push('\n');
    write_text(path, &s)
}

fn write_text(path: &PathBuf, s: &str) -> Result<(), CliError> {
    std::fs::write(path, s).map_err(|e| other(format!("{}: {e}", path.display())))
}

fn run_prove(args: ProveArgs) -> Result<(), CliError> {
    let options = ProveOptions {
        search_ceiling: args.search_ceiling,
        precision: args.precision.policy()?,
        paper_faithful: args.paper_faithful,
        tight: args.tight,
        policy: args.policy.into(),
        margin: args.margin,
        ..ProveOptions::default()
    };
    let format = match args.format {
        FormatArg::Json => ReportFormat::Json,
        FormatArg::Text => ReportFormat::Text,
    };
    match prove(&options) {
        Ok(cert) => {
            write_text(&args.output, &emit_report(&cert, format))?;
            eprintln!("proof complete: n <= {}", cert.final_bound);
            Ok(())
        }
        Err(e) => {
            // an incomplete proof still writes what was certified
            if let ProveError::ProofIncomplete {
                certificate: Some(cert),
                ..
            } = &e
            {
                write_text(&args.output, &emit_report(cert, format))?;
            }
            Err(e.into())
        }
    }
}

fn run_search(args: SearchArgs) -> Result<(), CliError> {
    let recurrence = RecurrenceDef {
        initial_terms: args.initial,
    };
    let solutions = search(args.nmin, args.nmax, &recurrence).map_err(other)?;
    eprintln!("{} solutions", solutions.len());
    write_json(&args.output, &solutions)
}

fn run_bounds(args: BoundsArgs) -> Result<(), CliError> {
    let mode = if args.tight {
        ChainMode::Tight
    } else {
        ChainMode::Published
    };
    let chain = bound_chain(mode, &args.precision.policy()?).map_err(other)?;
    write_json(&args.output, &chain.report())?;
    if chain.all_hold() {
        Ok(())
    } else {
        Err(CliError::Incomplete(format!(
            "{} checks failed",
            chain.failed_checks().len()
        )))
    }
}

fn run_cf(args: CfArgs) -> Result<(), CliError> {
    let e = theta_terms(args.terms, &args.precision.policy()?)?;
    write_json(&args.output, &e.report(80))
}

fn run_reduce(args: ReduceArgs) -> Result<(), CliError> {
    let policy = args.precision.policy()?;
    let expansion = theta_expansion(&args.x0, args.margin, &policy)?;
    let base = RoundConfig {
        policy: args.policy.into(),
        margin: args.margin,
        max_bits: policy.max_bits,
        ..RoundConfig::new(1, args.x0.clone())
    };
    let mut l_max = args.l_max;
    let mut m_max = args.m_max;
    if args.round >= 2 && l_max.is_none() {
        l_max = Some(run_round(&base, &expansion)?.max_y);
    }
    if args.round == 3 && m_max.is_none() {
        let cfg = RoundConfig {
            round: 2,
            ..base.clone().with_bounds(l_max.unwrap_or(0), 0)
        };
        m_max = Some(run_round(&cfg, &expansion)?.max_y);
    }
    let cfg = RoundConfig {
        round: args.round,
        sign: match args.sign {
            SignArg::Minus => Lambda3Sign::Minus,
            SignArg::Plus => Lambda3Sign::Plus,
        },
        ..base.with_bounds(l_max.unwrap_or(0), m_max.unwrap_or(0))
    };
    let result = run_round(&cfg, &expansion)?;
    eprintln!("round {}: bound {}", result.round, result.max_y);
    write_json(&args.output, &result)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    let result = match cli.command {
        Command::Prove(a) => run_prove(a),
        Command::Search(a) => run_search(a),
        Command::Bounds(a) => run_bounds(a),
        Command::Cf(a) => run_cf(a),
        Command::Reduce(a) => run_reduce(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Incomplete(m)) => {
            eprintln!("incomplete: {m}");
            ExitCode::from(EXIT_INCOMPLETE)
        }
        Err(CliError::Precision(m)) => {
            eprintln!("precision exhausted: {m}");
            ExitCode::from(EXIT_PRECISION)
        }
        Err(CliError::Other(m)) => {
            eprintln!("error: {m}");
            ExitCode::FAILURE
        }
    }
}
