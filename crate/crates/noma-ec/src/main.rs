//! `noma-ec`: effective-capacity calculator for a two-user uplink NOMA
//! network under statistical delay constraints.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use noma_ec::analysis::GapTarget;
use noma_ec::cli::{
    exit_code, parse_grid, resolve_out_path, run_crossover, run_figures, run_lemmas, run_sweep,
    sweep_csv, switching_rule, CliError, MethodKind, PointReport, SweepConfig, SweepConfigFile,
};

#[derive(Parser)]
#[command(
    name = "noma-ec",
    version,
    about = "Effective capacities of a two-user uplink NOMA network and its OMA baseline",
    after_help = "Exit codes: 0 success, 1 failed checks, 2 usage error, 3 domain error, \
                  4 accuracy failure, 5 I/O error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report all six EC quantities at a single operating point.
    Ec(EcArgs),
    /// Evaluate a parameter grid and emit one CSV row per point.
    Sweep(SweepArgs),
    /// Run the asymptotic-behaviour checks and print their reports.
    Lemmas(LemmasArgs),
    /// Locate the SNR where NOMA and OMA trade places.
    Crossover(CrossoverArgs),
    /// Regenerate the standard figure datasets (fig2.csv ... fig9.csv).
    Figures(FiguresArgs),
}

#[derive(Args)]
struct EcArgs {
    /// Transmit SNR in dB.
    #[arg(long, default_value_t = 10.0)]
    rho_db: f64,
    /// Weak-user normalized delay exponent (negative).
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    beta1: f64,
    /// Strong-user normalized delay exponent (negative).
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    beta2: f64,
    /// Weak-user power coefficient in (0, 1).
    #[arg(long, default_value_t = 0.2)]
    p1: f64,
    /// closed_form | quadrature | monte_carlo.
    #[arg(long, default_value = "quadrature")]
    method: String,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// Monte Carlo seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct SweepArgs {
    /// SNR grid in dB: list and/or start:stop:step ranges
    /// [default: -20:40:2].
    #[arg(long, allow_hyphen_values = true)]
    rho_db: Option<String>,
    /// Weak-user delay-exponent grid [default: -1].
    #[arg(long, allow_hyphen_values = true)]
    beta1: Option<String>,
    /// Strong-user delay-exponent grid [default: -1].
    #[arg(long, allow_hyphen_values = true)]
    beta2: Option<String>,
    /// Weak-user power-coefficient grid [default: 0.2].
    #[arg(long)]
    p1: Option<String>,
    /// closed_form | quadrature | monte_carlo [default: quadrature].
    #[arg(long)]
    method: Option<String>,
    /// Monte Carlo samples per grid point [default: 1000000].
    #[arg(long)]
    samples: Option<u64>,
    /// Monte Carlo seed [default: 1].
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path (stdout when omitted). Relative paths land in
    /// $NOMA_EC_OUT_DIR when that is set.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Configuration file (JSON or key=value); explicit flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct LemmasArgs {
    /// Weak-user power coefficient.
    #[arg(long, default_value_t = 0.2)]
    p1: f64,
    /// Weak-user delay exponent.
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    beta1: f64,
    /// Strong-user delay exponent.
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    beta2: f64,
    /// Also write the reports as JSON to this path.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct CrossoverArgs {
    /// Which gap to probe: 1 (weak user), 2 (strong user) or sum.
    #[arg(long)]
    user: String,
    /// Weak-user power coefficient.
    #[arg(long, default_value_t = 0.2)]
    p1: f64,
    /// Weak-user delay exponent.
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    beta1: f64,
    /// Strong-user delay exponent.
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    beta2: f64,
    /// Search bracket in dB as lo:hi.
    #[arg(long, default_value = "0:40", allow_hyphen_values = true)]
    bracket_db: String,
}

#[derive(Args)]
struct FiguresArgs {
    /// Output directory; defaults to $NOMA_EC_OUT_DIR or the current dir.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// When positive, add Monte Carlo confirmation columns to fig2.csv.
    #[arg(long, default_value_t = 0)]
    mc_samples: u64,
    /// Seed for the confirmation columns.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Ec(a) => {
            let method = MethodKind::parse(&a.method)?;
            let report =
                PointReport::compute(a.rho_db, a.p1, a.beta1, a.beta2, method, a.samples, a.seed)?;
            println!("{report}");
            Ok(0)
        }
        Command::Sweep(a) => {
            // precedence: built-in defaults < config file < explicit flags
            let mut cfg = SweepConfig::default();
            if let Some(path) = &a.config {
                let text = fs::read_to_string(path)?;
                cfg = SweepConfigFile::parse(&text)?.apply(cfg)?;
            }
            if let Some(g) = &a.rho_db {
                cfg.rho_db_grid = parse_grid(g)?;
            }
            if let Some(g) = &a.beta1 {
                cfg.beta1_grid = parse_grid(g)?;
            }
            if let Some(g) = &a.beta2 {
                cfg.beta2_grid = parse_grid(g)?;
            }
            if let Some(g) = &a.p1 {
                cfg.p1_grid = parse_grid(g)?;
            }
            if let Some(m) = &a.method {
                cfg.method = MethodKind::parse(m)?;
            }
            if let Some(n) = a.samples {
                cfg.mc_samples = n;
            }
            if let Some(s) = a.seed {
                cfg.seed = s;
            }
            if a.output.is_some() {
                cfg.output_path = a.output.clone();
            }

            let rows = run_sweep(&cfg)?;
            let csv = sweep_csv(&rows);
            match &cfg.output_path {
                Some(path) => {
                    let path = resolve_out_path(path);
                    fs::write(&path, csv.as_bytes())?;
                    eprintln!("wrote {} rows to {}", rows.len(), path.display());
                }
                None => {
                    print!("{csv}");
                    std::io::stdout().flush()?;
                }
            }
            Ok(0)
        }
        Command::Lemmas(a) => {
            let run = run_lemmas(a.p1, a.beta1, a.beta2)?;
            for r in &run.reports {
                println!("{r}");
            }
            if let Some(path) = &a.json {
                let path = resolve_out_path(path);
                fs::write(&path, serde_json::to_string_pretty(&run.reports).unwrap())?;
                eprintln!("wrote JSON report to {}", path.display());
            }
            if run.all_pass {
                println!("all checks passed");
                Ok(0)
            } else {
                println!("some checks FAILED");
                Ok(exit_code::CHECKS_FAILED)
            }
        }
        Command::Crossover(a) => {
            let target = match a.user.trim().to_ascii_lowercase().as_str() {
                "1" | "weak" => GapTarget::Weak,
                "2" | "strong" => GapTarget::Strong,
                "sum" => GapTarget::Sum,
                other => {
                    return Err(CliError::Usage(format!(
                        "--user must be 1, 2 or sum, got '{other}'"
                    )))
                }
            };
            let bracket = parse_bracket(&a.bracket_db)?;
            let result = run_crossover(target, a.p1, a.beta1, a.beta2, bracket)?;
            println!("{result}");
            println!("{}", switching_rule(&result));
            Ok(0)
        }
        Command::Figures(a) => {
            let out_dir = a
                .out_dir
                .map(|p| resolve_out_path(&p))
                .unwrap_or_else(|| resolve_out_path(&PathBuf::from(".")));
            let written = run_figures(&out_dir, a.mc_samples, a.seed)?;
            for p in written {
                println!("{}", p.display());
            }
            Ok(0)
        }
    }
}

fn parse_bracket(text: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = text.split([':', ',']).collect();
    if parts.len() != 2 {
        return Err(CliError::Usage(format!(
            "bracket must be lo:hi in dB, got '{text}'"
        )));
    }
    let lo = parts[0]
        .trim()
        .parse::<f64>()
        .map_err(|_| CliError::Usage(format!("bad bracket endpoint '{}'", parts[0])))?;
    let hi = parts[1]
        .trim()
        .parse::<f64>()
        .map_err(|_| CliError::Usage(format!("bad bracket endpoint '{}'", parts[1])))?;
    Ok((lo, hi))
}
