//! Command-line front end: `basis`, `density`, `translate`, `cocycle` and `verify`.
//!
//! Every command writes its data files and a `manifest.json` into `--out-dir`.
//! Exit status is 0 on success, 1 when a check fails and 2 for usage errors.

mod commands;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{OutputFormat, Settings, Units};
use crate::error::Error;
use crate::tolerances;
use crate::verify::Fault;

pub use output::{Check, OutputSet, RunManifest, MANIFEST_NAME};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const DEFAULT_OUT_DIR: &str = "landau-torus-out";

#[derive(Debug, Parser)]
#[command(name = "landau-torus", version, about = "Landau levels, magnetic translations and flux quantization on a torus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,

    /// key = value settings file; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Print every numerical tolerance and exit.
    #[arg(long, global = true)]
    pub show_tolerances: bool,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Flux quanta; `density` accepts a list such as 1,3,6,10.
    #[arg(long = "N", global = true, value_name = "N[,N..]", value_delimiter = ',')]
    pub n: Option<Vec<u32>>,
    /// First side (natural units, or cm with --units physical).
    #[arg(long = "L1", global = true)]
    pub l1: Option<f64>,
    /// Second side.
    #[arg(long = "L2", global = true)]
    pub l2: Option<f64>,
    /// Field strength in gauss (physical units only).
    #[arg(long = "B", global = true)]
    pub field: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub units: Option<Units>,
    /// Ground-state index.
    #[arg(long, global = true)]
    pub nu: Option<usize>,
    /// Landau level index.
    #[arg(long, global = true)]
    pub level: Option<usize>,
    /// Grid points per side.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Displacement: `lattice:n1,n2`, `half:m1,m2` or `x,y`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Mesh subdivisions per side.
    #[arg(long = "mesh-n", global = true)]
    pub mesh_n: Option<usize>,
    /// Total flux through the mesh, e.g. `6pi`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub flux: Option<String>,
    #[arg(long = "out-dir", global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Seed for randomized checks.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

impl CommonArgs {
    pub fn to_settings(&self) -> Settings {
        Settings {
            units: self.units,
            field: self.field,
            l1: self.l1,
            l2: self.l2,
            flux_quanta: self.n.clone(),
            nu: self.nu,
            level: self.level,
            grid: self.grid,
            a: self.a.clone(),
            mesh_n: self.mesh_n,
            flux: self.flux.clone(),
            out_dir: self.out_dir.clone(),
            format: self.format,
            seed: self.seed,
            ..Default::default()
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Grids and checks for one ground-state basis function.
    Basis,
    /// Deviation-from-uniformity maps of a level and the decay table d(N).
    Density,
    /// Translation matrix report for one displacement.
    Translate,
    /// Cocycles, triangle identity and flux theorem on a triangulated torus.
    Cocycle(CocycleArgs),
    /// Runs the whole check suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CocycleArgs {
    /// Read the mesh from a JSON file instead of building a uniform one.
    #[arg(long, value_name = "FILE")]
    pub mesh: Option<PathBuf>,
    /// Also write the per-triangle table.
    #[arg(long)]
    pub triangles: bool,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Largest flux quantum count in the suite.
    #[arg(long = "n-max", default_value_t = 6)]
    pub n_max: u32,
    /// Deliberately break a check to see the suite fail.
    #[arg(long = "inject-fault", value_enum, hide = true)]
    pub inject_fault: Option<Fault>,
}

/// Result of one command.
#[derive(Debug)]
pub struct Outcome {
    pub manifest: RunManifest,
    pub summary: String,
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NotConstant { .. } | Error::ZeroNorm | Error::Io(_) => EXIT_CHECK_FAILED,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if cli.show_tolerances {
        print!("{}", tolerances::render());
        return EXIT_OK;
    }
    let Some(command) = cli.command else {
        eprintln!("error: no command given (basis, density, translate, cocycle, verify); see --help");
        return EXIT_USAGE;
    };
    let settings = match &cli.config {
        Some(path) => match Settings::load(path) {
            Ok(file) => file.merged(cli.common.to_settings()),
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return EXIT_USAGE;
            }
        },
        None => cli.common.to_settings(),
    };
    match execute(&command, &settings) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            let dir = settings.out_dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
            println!("{} files written to {}", outcome.manifest.outputs.len(), dir.display());
            if outcome.manifest.passed {
                EXIT_OK
            } else {
                for c in outcome.manifest.checks.iter().filter(|c| !c.passed) {
                    eprintln!("check failed: {} ({})", c.name, c.detail);
                }
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs one command with fully merged settings.
pub fn execute(command: &Command, settings: &Settings) -> crate::Result<Outcome> {
    match command {
        Command::Basis => commands::basis(settings),
        Command::Density => commands::density(settings),
        Command::Translate => commands::translate(settings),
        Command::Cocycle(args) => commands::cocycle(settings, args),
        Command::Verify(args) => commands::verify(settings, args),
    }
}
