use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use magnon_cli::commands;
use magnon_cli::config::{CutoffSetting, Overrides, ParamsSection, RunConfig};
use magnon_cli::output::{real, write_file, Format};
use magnon_cli::{worker_count, CliError, EXIT_ERROR, WORKERS_ENV};
use magnon_core::SystemParams;

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  usage, configuration, validation or I/O error
  2  steady state carries no magnon excitation (g2 undefined)
  3  no Fock cutoff up to the cap passed the convergence test

Environment:
  MAGBLOCK_MAX_WORKERS  upper bound on the worker count";

/// Magnon blockade in a driven qubit-magnon system: steady states, g2(0)
/// maps and quantum-jump cross-checks. Rates are in units of gamma.
#[derive(Parser, Debug)]
#[command(name = "magblock", version, after_help = EXIT_CODES)]
struct Cli {
    /// TOML run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Worker threads (default: available parallelism)
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Seed of the trajectory random streams
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Fock cutoff: `auto` or a fixed n_max
    #[arg(long, global = true)]
    cutoff: Option<CutoffSetting>,
    /// Also write a gnuplot script over the CSV files
    #[arg(long, global = true)]
    plot_script: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Steady-state g2(0) at one parameter point
    G2(ParamArgs),
    /// Dressed levels of the undriven system
    Spectrum(ParamArgs),
    /// Reproduce the data of a figure preset
    Figure {
        /// fig2a, fig2b, fig4a, fig4b, fig4c, fig4d, fig5 or fig5_inset
        name: String,
    },
    /// Run the [sweep] section of the configuration
    Sweep,
    /// Quantum-jump ensemble estimate of g2(0)
    Trajectory {
        #[command(flatten)]
        params: ParamArgs,
        /// Number of trajectories
        #[arg(long)]
        trajectories: Option<usize>,
    },
    /// Thermal magnon occupation
    Nth {
        /// Magnon frequency in GHz
        omega_ghz: f64,
        /// Bath temperature in mK
        temperature_mk: f64,
    },
}

#[derive(Args, Debug, Default)]
struct ParamArgs {
    /// Common detuning, sets delta_q and delta_m
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta_q: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta_m: Option<f64>,
    #[arg(long)]
    g_qm: Option<f64>,
    /// Qubit drive strength
    #[arg(long)]
    omega: Option<f64>,
    /// Magnon probe strength
    #[arg(long)]
    xi: Option<f64>,
    #[arg(long)]
    kappa_m: Option<f64>,
    #[arg(long)]
    kappa_q: Option<f64>,
    #[arg(long)]
    n_th: Option<f64>,
}

impl ParamArgs {
    fn section(&self) -> ParamsSection {
        ParamsSection {
            delta: self.delta,
            delta_q: self.delta_q,
            delta_m: self.delta_m,
            g_qm: self.g_qm,
            omega_drive: self.omega,
            xi_probe: self.xi,
            kappa_m: self.kappa_m,
            kappa_q: self.kappa_q,
            n_th: self.n_th,
            n_max: None,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(EXIT_ERROR as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let env_cap = std::env::var(WORKERS_ENV).ok();
    let workers = worker_count(cli.workers.or(config.workers), env_cap.as_deref())?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;

    let mut ov = Overrides {
        cutoff: cli.cutoff,
        seed: cli.seed,
        ..Default::default()
    };
    let out_dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));

    match &cli.command {
        Command::G2(args) => {
            ov.params = args.section();
            let p = config.params(SystemParams::blockade_defaults(), &ov)?;
            let report = commands::g2(&p, config.cutoff_policy(&ov)?)?;
            let line = serde_json::to_string(&report).expect("report serializes");
            println!("{line}");
            if let Some(dir) = &cli.out {
                std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("creating {}: {e}", dir.display())))?;
                write_file(&dir.join("g2.json"), &format!("{line}\n"))?;
            }
        }
        Command::Spectrum(args) => {
            ov.params = args.section();
            let defaults = SystemParams::blockade_defaults().without_drives();
            let p = config.params(defaults, &ov)?;
            let table = commands::spectrum(&p)?;
            print!("{table}");
            if let Some(dir) = &cli.out {
                std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("creating {}: {e}", dir.display())))?;
                write_file(&dir.join("spectrum.csv"), &table)?;
            }
        }
        Command::Figure { name } => {
            let specs = commands::figure_specs(name)?
                .into_iter()
                .map(|s| config.adjust_spec(s, &ov))
                .collect::<Result<Vec<_>, _>>()?;
            for path in commands::write_sweeps(name, &specs, &out_dir, cli.format, cli.plot_script)? {
                println!("{}", path.display());
            }
        }
        Command::Sweep => {
            let spec = config.sweep_spec(&ov)?;
            let label = spec.label.clone();
            for path in commands::write_sweeps(&label, &[spec], &out_dir, cli.format, cli.plot_script)? {
                println!("{}", path.display());
            }
        }
        Command::Trajectory { params, trajectories } => {
            ov.params = params.section();
            ov.n_trajectories = *trajectories;
            let p = config.params(SystemParams::blockade_defaults(), &ov)?;
            let cfg = config.trajectory(&p, &ov)?;
            let report = commands::trajectory(&p, &cfg, config.cutoff_policy(&ov)?)?;
            let line = serde_json::to_string(&report).expect("report serializes");
            println!("{line}");
            if let Some(dir) = &cli.out {
                std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("creating {}: {e}", dir.display())))?;
                write_file(&dir.join("trajectory.json"), &format!("{line}\n"))?;
            }
        }
        Command::Nth {
            omega_ghz,
            temperature_mk,
        } => {
            println!("{}", real(commands::nth(*omega_ghz, *temperature_mk)?));
        }
    }
    Ok(())
}
