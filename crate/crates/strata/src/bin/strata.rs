//! Thin command-line front end over the library: JSON config in, CSV/JSON
//! artifacts out.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand as ClapSubcommand, ValueEnum};

use strata::config::{parse_config, ConfigContext, OutputFormat, RunConfig};
use strata::runner::{run, Subcommand};

#[derive(Parser)]
#[command(name = "strata", version, about = "Dipole emission in planar multilayers: Purcell factors, far fields, collection, design sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(ClapSubcommand)]
enum Command {
    /// Effective-medium permittivity and hyperbolicity scan
    Emt(CommonArgs),
    /// Decay-rate enhancement at one wavelength or across a band
    Purcell(CommonArgs),
    /// Wavevector-resolved dissipation spectrum at one wavelength
    Spectrum(CommonArgs),
    /// Far-field angular power patterns in the claddings
    Farfield(CommonArgs),
    /// Collected-photon-rate spectrum (fp, qe, ce, cpr per wavelength)
    Cpr(CommonArgs),
    /// Full-factorial parameter sweep from the config's `sweep` block
    Sweep(CommonArgs),
    /// Near-field validation against the quasi-static image-dipole oracle
    Validate(ValidateArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args)]
struct ValidateArgs {
    /// Optional config (only its output settings are used)
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args)]
struct IoArgs {
    /// Output directory (overrides the config)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (overrides the config)
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Worker thread cap; results are identical for any value
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (sub, config_path, io) = match cli.command {
        Command::Emt(a) => (Subcommand::Emt, Some(a.config), a.io),
        Command::Purcell(a) => (Subcommand::Purcell, Some(a.config), a.io),
        Command::Spectrum(a) => (Subcommand::Spectrum, Some(a.config), a.io),
        Command::Farfield(a) => (Subcommand::Farfield, Some(a.config), a.io),
        Command::Cpr(a) => (Subcommand::Cpr, Some(a.config), a.io),
        Command::Sweep(a) => (Subcommand::Sweep, Some(a.config), a.io),
        Command::Validate(a) => (Subcommand::Validate, a.config, a.io),
    };

    if let Some(threads) = io.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            return fail(3, "numeric", &format!("thread pool: {e}"));
        }
    }

    match execute(sub, config_path, &io) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(e.exit_code(), e.kind(), &e.to_string()),
    }
}

fn execute(
    sub: Subcommand,
    config_path: Option<PathBuf>,
    io: &IoArgs,
) -> strata::Result<String> {
    let (config, ctx) = match &config_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let ctx = ConfigContext {
                base_dir: path
                    .parent()
                    .filter(|p| !p.as_os_str().is_empty())
                    .map(|p| p.to_path_buf())
                    .unwrap_or_else(|| PathBuf::from(".")),
            };
            (parse_config(&text, &ctx)?, ctx)
        }
        None => {
            // `validate` runs a fixed scenario; a default config supplies
            // only the output settings.
            let ctx = ConfigContext::default();
            let config: RunConfig = parse_config(
                r#"{"stack": {"preset": "au-zns"}, "dipole": {"wavelength_nm": 900.0}}"#,
                &ctx,
            )?;
            (config, ctx)
        }
    };
    let out_dir = io
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&config.output.dir));
    let format = io
        .format
        .map(OutputFormat::from)
        .unwrap_or(config.output.format);
    let outcome = run(sub, &config, &ctx, &out_dir, format)?;
    let files: Vec<String> = outcome
        .files
        .iter()
        .map(|f| f.display().to_string())
        .collect();
    Ok(format!("{} -> {}", outcome.summary, files.join(", ")))
}

fn fail(code: i32, kind: &str, message: &str) -> ExitCode {
    let doc = serde_json::json!({
        "error": { "code": code, "kind": kind, "message": message }
    });
    eprintln!("{doc}");
    ExitCode::from(code as u8)
}
