mod expr;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use alrep_core::algebraic::{bound_n_a0, initial_chain};
use alrep_core::arith::parse_decimal;
use alrep_core::contfrac::{CfCache, CfSource};
use alrep_core::pipeline::large_k::large_k_analysis;
use alrep_core::pipeline::verify_theorem;
use alrep_core::pipeline::VerifyConfig;
use alrep_core::reduction::{dp_reduce, ReductionContext, ReductionInstance};
use alrep_core::digits::digit_count;
use alrep_core::{decompose, lucas_stream, Precision, PrecisionPolicy};
use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_integer::Integer;

use output::Format;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Expr(#[from] expr::ExprError),
    #[error(transparent)]
    Core(#[from] alrep_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use alrep_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Expr(_) => 2,
            CliError::Core(E::InvalidInput(_) | E::InvalidOrder(_) | E::InvalidPrecision(_) | E::Parse(_))
            | CliError::Core(E::IndexOutOfRange { .. }) => 2,
            _ => 3,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "alrep", version, about = "Certified search for almost-repdigit k-generalized Lucas numbers")]
struct Cli {
    /// Directory for cached continued-fraction expansions.
    #[arg(long, global = true, env = "ALREP_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Starting working precision in bits.
    #[arg(long, global = true, default_value_t = 256)]
    precision_start: u64,
    /// Largest working precision in bits.
    #[arg(long, global = true, env = "ALREP_PRECISION_CAP", default_value_t = 1 << 20)]
    precision_cap: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Print L_1..L_{n-max} of the k-generalized Lucas sequence.
    Seq {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n_max: u64,
    },
    /// Classify an integer and list its almost-repdigit forms.
    Digits { n: BigInt },
    /// One reduction: |u·gamma − v + mu| < A·B^(−w) with |u| ≤ M.
    Reduce {
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        /// Decimal or scientific literal, rounded up.
        #[arg(long)]
        m: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Certified continued-fraction expansion.
    Cf {
        #[arg(long, allow_hyphen_values = true)]
        value: String,
        #[arg(long, default_value_t = 20)]
        terms: usize,
    },
    /// Initial bounds on n and d1 − d2 for one k.
    Bounds {
        #[arg(long)]
        k: u32,
    },
    /// Check the complete list of solutions for a range of k.
    Verify {
        #[arg(long, default_value_t = 2)]
        k_min: u32,
        #[arg(long, default_value_t = 100)]
        k_max: u32,
        /// Largest n searched per k.
        #[arg(long, default_value_t = 1000)]
        budget: u64,
        /// Worker threads (default: logical CPUs).
        #[arg(long)]
        jobs: Option<usize>,
        /// Write the full JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        quiet: bool,
    },
    /// The bound chain ruling out k > 470.
    LargeK {
        /// Print the chain even if it fails to close.
        #[arg(long)]
        report_only: bool,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

/// Settings shared by every command.
#[derive(Clone, Debug)]
struct RunConfig {
    policy: PrecisionPolicy,
    cache_dir: Option<PathBuf>,
    format: Format,
}

impl RunConfig {
    fn from_cli(cli: &Cli) -> CliResult<Self> {
        let start = Precision::new(cli.precision_start)?;
        let cap = Precision::new(cli.precision_cap)?;
        if start > cap {
            return Err(CliError::Usage(format!(
                "--precision-start {} exceeds --precision-cap {}",
                cli.precision_start, cli.precision_cap
            )));
        }
        Ok(RunConfig {
            policy: PrecisionPolicy::new(start, cap)?,
            cache_dir: cli.cache_dir.clone(),
            format: cli.format,
        })
    }

    fn context(&self) -> CliResult<ReductionContext> {
        let disk = match &self.cache_dir {
            Some(d) => Some(CfCache::new(d)?),
            None => None,
        };
        Ok(ReductionContext::with_source(CfSource::new(self.policy, disk)))
    }
}

fn parse_m(s: &str) -> CliResult<BigInt> {
    let (p, q) = parse_decimal(s).map_err(|e| CliError::Usage(format!("--m: {e}")))?;
    let m = p.div_ceil(&q);
    if m < BigInt::from(1) {
        return Err(CliError::Usage("--m must be at least 1".into()));
    }
    Ok(m)
}

fn run(cli: Cli) -> CliResult<u8> {
    let cfg = RunConfig::from_cli(&cli)?;
    let fmt = cfg.format;
    match cli.cmd {
        Cmd::Seq { k, n_max } => {
            let terms = lucas_stream(k, n_max)?;
            output::seq(fmt, k, &terms)?;
        }
        Cmd::Digits { n } => {
            if n < BigInt::from(0) {
                return Err(CliError::Usage("digits expects a nonnegative integer".into()));
            }
            output::digits(fmt, &n, digit_count(&n), &decompose(&n))?;
        }
        Cmd::Reduce { gamma, mu, m, a, b } => {
            let inst = ReductionInstance::new(
                expr::lazy(&gamma)?,
                expr::lazy(&mu)?,
                expr::lazy(&a)?,
                expr::lazy(&b)?,
                parse_m(&m)?,
            )?;
            let res = dp_reduce(&inst, &cfg.context()?)?;
            output::reduction(fmt, &res.summary())?;
        }
        Cmd::Cf { value, terms } => {
            let x = expr::lazy(&value)?;
            let ctx = cfg.context()?;
            let exp = ctx.cf.expand(&x, terms)?;
            output::cf(fmt, &exp, terms)?;
        }
        Cmd::Bounds { k } => {
            let mut chain = initial_chain(k)?;
            let a0 = bound_n_a0(&BigInt::from(k))?;
            chain.push("n_a0", "2.1e17*k^4*log(k)^4", &a0, true);
            output::chain(fmt, &chain)?;
        }
        Cmd::Verify {
            k_min,
            k_max,
            budget,
            jobs,
            report,
            quiet,
        } => {
            if k_min < 2 || k_min > k_max {
                return Err(CliError::Usage(format!("need 2 <= k-min <= k-max, got {k_min}..={k_max}")));
            }
            let cancel = Arc::new(AtomicBool::new(false));
            let c = cancel.clone();
            if let Err(e) = ctrlc::set_handler(move || c.store(true, Ordering::SeqCst)) {
                eprintln!("warning: no interrupt handler: {e}");
            }
            let mut vc = VerifyConfig::new(k_min, k_max, budget);
            vc.jobs = jobs;
            vc.context = cfg.context()?;
            let progress = |r: &alrep_core::KReport| {
                if !quiet {
                    eprintln!("{}", output::progress_line(r));
                }
            };
            let rep = verify_theorem(&vc, &cancel, &progress)?;
            if let Some(path) = report {
                std::fs::write(path, serde_json::to_string_pretty(&rep)?)?;
            }
            output::theorem(fmt, &rep)?;
            return Ok(rep.overall.exit_code() as u8);
        }
        Cmd::LargeK { report_only, report } => {
            let rep = large_k_analysis(true, &cfg.context()?)?;
            if let Some(path) = report {
                std::fs::write(path, serde_json::to_string_pretty(&rep)?)?;
            }
            output::large_k(fmt, &rep)?;
            if !rep.contradiction && !report_only {
                return Ok(3);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
