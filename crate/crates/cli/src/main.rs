//! `cfem`: refinement studies and single solves from the command line.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use compact_fem::{
    catalog_poisson, catalog_variable, refinement_study, solve, FemError, Method, NormOptions, ProblemSpec,
    SolveOptions, StudyOptions,
};

#[derive(Parser, Debug)]
#[command(name = "cfem", version, about = "1D Sturm-Liouville finite element solver (P1, posterior, compact)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Grid refinement study: errors and convergence orders per level.
    Study(StudyArgs),
    /// Solve once and sample the discrete solution.
    Solve(SolveArgs),
    /// List the catalog problems.
    List,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ProblemName {
    Poisson,
    Variable,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MethodArg {
    P1,
    Posterior,
    Compact,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::P1 => Method::P1,
            MethodArg::Posterior => Method::PosteriorCorrected,
            MethodArg::Compact => Method::Compact,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Format {
    Csv,
    Md,
}

#[derive(Args, Debug)]
struct ProblemArgs {
    #[arg(long, value_enum)]
    problem: ProblemName,
    /// First wave number as a multiple of pi (poisson: k).
    #[arg(long, conflicts_with = "k1", default_value_t = 5.0)]
    k1_pi: f64,
    /// Second wave number as a multiple of pi (variable only).
    #[arg(long, conflicts_with = "k2", default_value_t = 0.0)]
    k2_pi: f64,
    /// First wave number, raw value.
    #[arg(long)]
    k1: Option<f64>,
    /// Second wave number, raw value.
    #[arg(long)]
    k2: Option<f64>,
    #[arg(long, value_enum, default_value = "compact")]
    method: MethodArg,
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StudyArgs {
    #[command(flatten)]
    common: ProblemArgs,
    /// Comma-separated, strictly increasing element counts.
    #[arg(long, value_delimiter = ',', required = true)]
    levels: Vec<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Gauss points per sub-interval in the error norms.
    #[arg(long, default_value_t = 7)]
    norm_order: usize,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    common: ProblemArgs,
    /// Number of elements.
    #[arg(long, default_value_t = 32)]
    n: usize,
    /// Number of uniformly spaced sample points (endpoints included).
    #[arg(long, default_value_t = 101)]
    samples: usize,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Fem(FemError),
}

impl From<FemError> for CliError {
    fn from(e: FemError) -> Self {
        CliError::Fem(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Fem(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Fem(e) => write!(f, "{e}"),
        }
    }
}

fn build_problem(args: &ProblemArgs) -> Result<ProblemSpec, CliError> {
    let k1 = args.k1.unwrap_or(args.k1_pi * PI);
    let k2 = args.k2.unwrap_or(args.k2_pi * PI);
    Ok(match args.problem {
        ProblemName::Poisson => catalog_poisson(k1)?,
        ProblemName::Variable => catalog_variable(k1, k2)?,
    })
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_study(args: &StudyArgs) -> Result<(), CliError> {
    let problem = build_problem(&args.common)?;
    let options = StudyOptions {
        solve: SolveOptions::default(),
        norm: NormOptions {
            order: args.norm_order,
            ..NormOptions::default()
        },
    };
    let report = refinement_study(&problem, args.common.method.into(), &args.levels, &options)?;
    let text = match args.format {
        Format::Csv => report.to_csv(),
        Format::Md => report.to_markdown(),
    };
    if args.common.out.is_some() {
        emit(&args.common.out, &text)?;
    }
    print!("{text}");
    Ok(())
}

fn cmd_solve(args: &SolveArgs) -> Result<(), CliError> {
    if args.samples < 2 {
        return Err(CliError::Usage(format!("--samples must be at least 2, got {}", args.samples)));
    }
    let problem = build_problem(&args.common)?;
    let sol = solve(&problem, args.n, args.common.method.into(), &SolveOptions::default())?;
    let (x_l, x_r) = problem.domain();
    let mut text = String::from("x,uh,duh,u,du\n");
    for j in 0..args.samples {
        let x = if j + 1 == args.samples {
            x_r
        } else {
            x_l + (x_r - x_l) * j as f64 / (args.samples - 1) as f64
        };
        let (uh, duh) = sol.evaluate(x)?;
        let _ = write!(text, "{x:.15e},{uh:.15e},{duh:.15e}");
        match problem.exact() {
            Some(u) => {
                let du = u.deriv(x)?;
                let _ = writeln!(text, ",{:.15e},{du:.15e}", u.eval(x));
            }
            None => text.push_str(",,\n"),
        }
    }
    emit(&args.common.out, &text)
}

fn cmd_list() {
    print!(
        "\
poisson   -u'' = f on [0,1], u = sin(k x), beta = 1, q = 0
          parameters: --k1-pi (k = k1_pi * pi); Tables 1-2 use k1_pi = 5, 50
variable  -(e^x u')' + x^2 u = f on [0,1], u = sin(k1 x) cos(k2 x)
          parameters: --k1-pi, --k2-pi; Tables 3-6 use (5,0), (50,0), (5,5), (50,50)
"
    );
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Study(args) => cmd_study(args),
        Command::Solve(args) => cmd_solve(args),
        Command::List => {
            cmd_list();
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
