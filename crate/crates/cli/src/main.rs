use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use greenbc::oracle::suite::{Mutation, Suite, TableFormat};
use greenbc_cli::config::MethodChoice;
use greenbc_cli::run::{cmd_green, cmd_solve, cmd_verify, load_config, CliError, RunOptions};

#[derive(Parser, Debug)]
#[command(name = "greenbc", version, about = "Green functions and boundary value problems from fundamental solutions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct ProblemArgs {
    /// Problem file (TOML)
    config: PathBuf,
    /// Construction path, overriding `method` in the config
    #[arg(long, value_enum)]
    method: Option<MethodChoice>,
    /// CSV destination, overriding `output.path` (stdout when neither is set)
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write the boundary-response matrix as row-major "re,im" CSV
    #[arg(long, value_name = "PATH")]
    dump_g: Option<PathBuf>,
    /// Do not print the run report
    #[arg(short, long)]
    quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample G(x, x') on the `green` grid
    Green(ProblemArgs),
    /// Solve the boundary value problem and sample u on `output.grid`
    Solve(ProblemArgs),
    /// Run the verification suites against the reference solutions
    Verify {
        #[arg(value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        /// Write the table here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, hide = true)]
        inject_mutation: Option<MutationArg>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    All,
    Assembly,
    Recursive,
    Bvp,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MutationArg {
    FlipDensitySign,
}

fn run_problem(args: ProblemArgs, solve: bool) -> Result<(), CliError> {
    let cfg = load_config(&args.config)?;
    let opts = RunOptions {
        method: args.method.map(Into::into),
        output: args.output,
        dump_g: args.dump_g,
    };
    let outcome = if solve { cmd_solve(&cfg, &opts)? } else { cmd_green(&cfg, &opts)? };
    let report = outcome.emit()?;
    if !args.quiet {
        eprint!("{report}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Green(args) => run_problem(args, false),
        Command::Solve(args) => run_problem(args, true),
        Command::Verify {
            suite,
            format,
            output,
            inject_mutation,
        } => {
            let suite = match suite {
                SuiteArg::All => Suite::All,
                SuiteArg::Assembly => Suite::Assembly,
                SuiteArg::Recursive => Suite::Recursive,
                SuiteArg::Bvp => Suite::Bvp,
            };
            let format = match format {
                FormatArg::Text => TableFormat::Text,
                FormatArg::Csv => TableFormat::Csv,
            };
            let mutation = match inject_mutation {
                Some(MutationArg::FlipDensitySign) => Mutation::FlipDensitySign,
                None => Mutation::None,
            };
            let (table, passed) = cmd_verify(suite, format, mutation);
            let written = match &output {
                Some(p) => std::fs::write(p, &table).map_err(|source| CliError::Io { path: p.clone(), source }),
                None => {
                    print!("{table}");
                    Ok(())
                }
            };
            match written {
                Ok(()) if passed => Ok(()),
                Ok(()) => {
                    eprintln!("verification failed");
                    return ExitCode::from(1);
                }
                Err(e) => Err(e),
            }
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
