use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qcfold_cli::commands::{execute, CmdError, Command};
use qcfold_cli::config::{load, reference_markdown};
use qcfold_cli::{EXIT_CHECK, EXIT_OK, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "qcfold", version, about = "Verification suites, construction pipeline and renderer for the quasiregular folding model.")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dilatation bound, radius inequality, support and FD checks for the disk maps.
    VerifyDiskMaps(RunArgs),
    /// Solve a Beltrami equation and compare with its closed form when there is one.
    SolveBeltrami(RunArgs),
    /// Koebe budget table for the inverse branches.
    Budget(RunArgs),
    /// Build the levels of the construction and print the per-level table.
    Construct(RunArgs),
    /// Escape-time image with the graph skeleton drawn on top.
    Render(RunArgs),
    /// Construction followed by the univalence audit.
    Audit(RunArgs),
    /// Print the configuration reference page.
    ConfigReference,
}

#[derive(Args)]
struct RunArgs {
    /// TOML config; defaults apply to anything it leaves out.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Override one key, e.g. `--set construct.mode=strict`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("QCFOLD_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| format!("QCFOLD_THREADS = `{v}` is not a positive integer"))?;
    if n == 0 {
        return Err("QCFOLD_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn init_log(out: &Path) -> Result<(), String> {
    let file = std::fs::File::create(out.join("log.txt")).map_err(|e| format!("log.txt: {e}"))?;
    env_logger::Builder::new()
        .filter_level(log::LevelFilter::Info)
        .target(env_logger::Target::Pipe(Box::new(file)))
        .format(|buf, r| writeln!(buf, "{} {}: {}", r.level(), r.target(), r.args()))
        .try_init()
        .map_err(|e| e.to_string())
}

fn run(cmd: Command, args: RunArgs) -> i32 {
    let cfg = match load(args.config.as_deref(), &args.set) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    if let Err(e) = std::fs::create_dir_all(&args.out) {
        eprintln!("error: {}: {e}", args.out.display());
        return EXIT_USAGE;
    }
    if let Err(e) = init_log(&args.out) {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    match execute(cmd, &cfg, &args.out) {
        Ok(o) => {
            println!("{}", o.summary.trim_end());
            if o.failures.is_empty() {
                println!("{}: all checks passed", cmd.name());
                EXIT_OK
            } else {
                for f in &o.failures {
                    println!("FAIL {f}");
                    log::error!("{f}");
                }
                EXIT_CHECK
            }
        }
        Err(CmdError::Config(e)) => {
            eprintln!("error: {e}");
            log::error!("{e}");
            EXIT_USAGE
        }
        Err(CmdError::Run(e)) => {
            eprintln!("error: {e}");
            log::error!("{e}");
            EXIT_CHECK
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match cli.command {
        Cmd::VerifyDiskMaps(a) => run(Command::VerifyDiskMaps, a),
        Cmd::SolveBeltrami(a) => run(Command::SolveBeltrami, a),
        Cmd::Budget(a) => run(Command::Budget, a),
        Cmd::Construct(a) => run(Command::Construct, a),
        Cmd::Render(a) => run(Command::Render, a),
        Cmd::Audit(a) => run(Command::Audit, a),
        Cmd::ConfigReference => {
            print!("{}", reference_markdown());
            EXIT_OK
        }
    };
    ExitCode::from(code as u8)
}
