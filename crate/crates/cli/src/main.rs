use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use thinlayer_cli::commands;
use thinlayer_cli::output::{render, CommandOutput, OutputFormat};
use thinlayer_cli::scenario::{Scenario, UnitSystem};
use thinlayer_cli::CliError;

/// Thin-layer quantization toolkit: curvature tables, thickness-corrected
/// potential profiles, Coulomb-gauge checks, surface spectra and the
/// general-vs-torus consistency report.
///
/// Exit codes: 0 ok, 1 check failed, 2 validation error, 3 solver failure.
#[derive(Parser)]
#[command(name = "thinlayer", version)]
struct Cli {
    /// Scenario JSON file (see the README for the schema)
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,

    /// Write the output to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Unit system for energy-valued outputs (default: v0 for curvature and
    /// profile, internal otherwise)
    #[arg(long, global = true, value_enum)]
    units: Option<UnitArg>,

    /// Output format (default: csv for curvature and profile, json
    /// otherwise)
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

/// Scenario-field overrides; flags win over the file.
#[derive(Args)]
struct Overrides {
    /// Layer thickness q3 in nm
    #[arg(long, global = true)]
    q3: Option<f64>,

    /// Uniform field component normal to the torus plane
    #[arg(long, global = true)]
    b0: Option<f64>,

    /// Uniform in-plane field component
    #[arg(long, global = true)]
    b1: Option<f64>,

    /// Grid as N1xN2 (for example 64x64)
    #[arg(long, global = true)]
    grid: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitArg {
    Internal,
    V0,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Table of mean/Gaussian curvature and the geometric potential
    Curvature {
        /// Number of samples along the first coordinate
        #[arg(long, default_value_t = 181)]
        samples: usize,
    },
    /// Profiles of the thickness-corrected geometric potential, one column
    /// per offset
    Profile {
        /// Comma-separated offsets q3 in nm
        #[arg(long, value_delimiter = ',', default_values_t = [-0.5, 0.0, 0.5])]
        q3_list: Vec<f64>,
        #[arg(long, default_value_t = 181)]
        samples: usize,
    },
    /// Surface Coulomb-gauge diagnostics of the scenario field (exit 1 on
    /// violation)
    GaugeCheck {
        /// Replace the field with a deliberately non-solenoidal one
        #[arg(long)]
        debug_non_gauge_field: bool,
    },
    /// Lowest eigenvalues of the surface Hamiltonian
    Spectrum {
        /// Number of eigenpairs
        #[arg(short, long, default_value_t = 4)]
        k: usize,
        /// Include the first-order surface-thickness correction
        #[arg(long)]
        with_thickness: bool,
        /// Solve the measure-Hermitian part and report the discarded norm
        #[arg(long)]
        symmetrize: bool,
    },
    /// Compare the general thickness correction with the torus closed form
    Consistency {
        /// Number of sample points
        #[arg(long, default_value_t = 256)]
        points: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Curvature { .. } => "curvature",
            Command::Profile { .. } => "profile",
            Command::GaugeCheck { .. } => "gauge-check",
            Command::Spectrum { .. } => "spectrum",
            Command::Consistency { .. } => "consistency",
        }
    }

    fn default_units(&self) -> UnitSystem {
        match self {
            Command::Curvature { .. } | Command::Profile { .. } => UnitSystem::V0,
            _ => UnitSystem::Internal,
        }
    }

    fn default_format(&self) -> OutputFormat {
        match self {
            Command::Curvature { .. } | Command::Profile { .. } => OutputFormat::Csv,
            _ => OutputFormat::Json,
        }
    }
}

fn load_scenario(cli: &Cli) -> Result<Scenario, CliError> {
    let path = cli.scenario.as_ref().ok_or_else(|| {
        CliError::Validation("no scenario file given; pass --scenario <file>".into())
    })?;
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Validation(format!("cannot read scenario {}: {e}", path.display()))
    })?;
    let mut scenario = Scenario::from_json(&text)?;

    if let Some(q3) = cli.overrides.q3 {
        scenario.thickness = q3;
    }
    if let Some(b0) = cli.overrides.b0 {
        scenario.field.b0 = b0;
    }
    if let Some(b1) = cli.overrides.b1 {
        scenario.field.b1 = b1;
    }
    if let Some(spec) = &cli.overrides.grid {
        let (n1, n2) = spec
            .split_once(['x', 'X'])
            .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
            .ok_or_else(|| {
                CliError::Validation(format!("grid: expected N1xN2, got {spec:?}"))
            })?;
        scenario.grid.n1 = n1;
        scenario.grid.n2 = n2;
    }
    Ok(scenario)
}

fn run(cli: &Cli) -> Result<(String, i32), CliError> {
    let scenario = load_scenario(cli)?;
    let units = match cli.units {
        Some(UnitArg::Internal) => UnitSystem::Internal,
        Some(UnitArg::V0) => UnitSystem::V0,
        None => scenario.units.unwrap_or_else(|| cli.command.default_units()),
    };
    let format = match cli.format {
        Some(FormatArg::Csv) => OutputFormat::Csv,
        Some(FormatArg::Json) => OutputFormat::Json,
        None => cli.command.default_format(),
    };

    let prep = scenario.prepare()?;
    let output = match &cli.command {
        Command::Curvature { samples } => commands::cmd_curvature(&prep, *samples, units)?,
        Command::Profile { q3_list, samples } => {
            commands::cmd_profile(&prep, q3_list, *samples, units)?
        }
        Command::GaugeCheck { debug_non_gauge_field } => {
            commands::cmd_gauge_check(&prep, *debug_non_gauge_field)?
        }
        Command::Spectrum { k, with_thickness, symmetrize } => {
            commands::cmd_spectrum(&prep, *k, *with_thickness, *symmetrize, units)?
        }
        Command::Consistency { points } => commands::cmd_consistency(&prep, *points)?,
    };

    let exit_code = match &output {
        CommandOutput::Gauge(g) if !g.passed => 1,
        _ => 0,
    };
    let units_label = match units {
        UnitSystem::Internal => "internal",
        UnitSystem::V0 => "v0",
    };
    let text = render(&prep.scenario, cli.command.name(), units_label, &output, format);
    Ok((text, exit_code))
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, code)) => {
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    std::process::exit(2);
                }
            } else {
                print!("{text}");
            }
            std::process::exit(code);
        }
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}
