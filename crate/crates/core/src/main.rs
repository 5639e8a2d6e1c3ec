use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hsie::cli::{self, CliError, SolveOptions};
use hsie::Method;

#[derive(Parser)]
#[command(name = "hsie", version, about = "Exact solvers for second-kind hypersingular integral equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Pm,
    Mpm,
    Wmpm,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Pm => Method::Pm,
            MethodArg::Mpm => Method::Mpm,
            MethodArg::Wmpm => Method::Wmpm,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file and write a solution report.
    Solve {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "wmpm")]
        method: MethodArg,
        /// Where to write the JSON solution report.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Series length for pm/mpm (overrides the problem file; default 25).
        #[arg(long)]
        max_terms: Option<usize>,
        /// Relative tail tolerance for pm/mpm (overrides the problem file; default 1e-10).
        #[arg(long)]
        tail_tol: Option<f64>,
        #[arg(long, default_value_t = cli::DEFAULT_GRID)]
        grid: usize,
        #[arg(long, default_value_t = cli::DEFAULT_PRECISION_BITS)]
        precision_bits: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Also check the solution against the quadrature oracle.
        #[arg(long)]
        oracle: bool,
    },
    /// Check a solution report against a problem with the quadrature oracle.
    Verify {
        input: PathBuf,
        solution: PathBuf,
        #[arg(long, default_value_t = cli::DEFAULT_GRID)]
        grid: usize,
        #[arg(long, default_value_t = cli::DEFAULT_PRECISION_BITS)]
        precision_bits: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Solve {
            input,
            method,
            output,
            max_terms,
            tail_tol,
            grid,
            precision_bits,
            format,
            oracle,
        } => {
            let opts = SolveOptions {
                method: method.into(),
                max_terms,
                tail_tol,
                grid,
                precision_bits: precision_bits.max(53),
                oracle,
            };
            let (report, code) = cli::run_solve(&input, &opts)?;
            if let Some(path) = output {
                cli::write_json_atomic(&path, &report)?;
            }
            match format {
                Format::Text => print!("{}", cli::render_solution_text(&report)),
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
            }
            Ok(code)
        }
        Command::Verify {
            input,
            solution,
            grid,
            precision_bits,
            format,
        } => {
            let (outcome, code) = cli::run_verify(&input, &solution, grid, precision_bits.max(53))?;
            match format {
                Format::Text => print!("{}", cli::render_verify_text(&outcome)),
                Format::Json => println!("{}", serde_json::to_string_pretty(&outcome).unwrap()),
            }
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(cli::EXIT_INPUT as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
