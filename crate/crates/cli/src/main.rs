use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use qplate_cli::config::{load_config, RunConfig};
use qplate_cli::runner::{run_scan, run_single, RunError};
use qplate_cli::verify::run_verify;
use qplate_cli::write_scan_csv;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Propagate vector beams through space-variant-axis phase plates and track
/// the spin/orbital angular-momentum exchange.
#[derive(Parser)]
#[command(name = "qplate", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config field, e.g. --set medium.d=3.5 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory for artifacts.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// One propagation: prints the angular-momentum budget, dumps fields.
    Single(CommonArgs),
    /// Parameter scan: writes scan.csv with one row per point.
    Scan(CommonArgs),
    /// Run the verification suite: one line per named invariant.
    Verify(CommonArgs),
}

const EXIT_INVARIANT_FAILURE: u8 = 1;
const EXIT_CONFIG_ERROR: u8 = 2;

fn load(args: &CommonArgs) -> anyhow::Result<RunConfig> {
    let text = match &args.config {
        Some(path) => Some(
            std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?,
        ),
        None => None,
    };
    Ok(load_config(text.as_deref(), &args.set)?)
}

fn ensure_out_dir(dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn cmd_single(args: &CommonArgs) -> anyhow::Result<u8> {
    let cfg = load(args)?;
    let outcome = run_single(&cfg)?;
    for warning in &outcome.warnings {
        eprintln!("warning: {warning}");
    }
    ensure_out_dir(&args.out)?;
    for (name, field) in [
        ("field_in.qpsf", &outcome.field_in),
        ("field_out.qpsf", &outcome.field_out),
    ] {
        let path = args.out.join(name);
        let mut file = std::io::BufWriter::new(
            std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?,
        );
        qplate_core::io::write_qpsf(field, &mut file)?;
    }
    let b = &outcome.budget;
    println!("input:  w_lz={} w_sz={} w_jz={} energy={}", b.input.w_lz, b.input.w_sz, b.input.w_jz, b.input.energy);
    println!("output: w_lz={} w_sz={} w_jz={} energy={}", b.output.w_lz, b.output.w_sz, b.output.w_jz, b.output.energy);
    println!("delta:  w_lz={} w_sz={} w_jz={}", b.delta_w_lz, b.delta_w_sz, b.delta_w_jz);
    println!("closed: d_w_lz={} d_w_sz={} bracket={}", outcome.closed.d_w_lz, outcome.closed.d_w_sz, outcome.closed.bracket);
    println!("fields: {} , {}", args.out.join("field_in.qpsf").display(), args.out.join("field_out.qpsf").display());
    Ok(0)
}

fn cmd_scan(args: &CommonArgs) -> anyhow::Result<u8> {
    let cfg = load(args)?;
    for warning in cfg.warnings() {
        eprintln!("warning: {warning}");
    }
    let rows = run_scan(&cfg)?;
    ensure_out_dir(&args.out)?;
    let path = args.out.join("scan.csv");
    std::fs::write(&path, write_scan_csv(&rows))
        .with_context(|| format!("writing {}", path.display()))?;
    println!("{} rows -> {}", rows.len(), path.display());
    Ok(0)
}

fn cmd_verify(args: &CommonArgs) -> anyhow::Result<u8> {
    let cfg = load(args)?;
    let report = run_verify(&cfg)?;
    let rendered = report.render();
    print!("{rendered}");
    ensure_out_dir(&args.out)?;
    let path = args.out.join("verify.txt");
    std::fs::write(&path, &rendered).with_context(|| format!("writing {}", path.display()))?;
    Ok(if report.overall_pass() { 0 } else { EXIT_INVARIANT_FAILURE })
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(run) = cause.downcast_ref::<RunError>() {
            // unwrap scan-point wrappers
            let mut inner = run;
            while let RunError::ScanPoint { source, .. } = inner {
                inner = source;
            }
            return match inner {
                RunError::Config(_) | RunError::Core(_) => EXIT_CONFIG_ERROR,
                RunError::ScanPoint { .. } => unreachable!("unwrapped above"),
            };
        }
        if cause.downcast_ref::<qplate_cli::ConfigError>().is_some() {
            return EXIT_CONFIG_ERROR;
        }
    }
    EXIT_INVARIANT_FAILURE
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Single(args) => cmd_single(args),
        Command::Scan(args) => cmd_scan(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
