//! Command-line front end: single points, sweeps, dark-condition reports,
//! cutoff convergence, engine comparison and the built-in figure sweeps.
//!
//! Exit codes: 0 success, 2 configuration or parameter error, 3 numerical
//! failure (degenerate steady state, failed integration), 1 output I/O error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use chiraldark::config::{Config, ConfigFile, Engine};
use chiraldark::dark_state::{analytic_dark_rho, dark_conditions_double, dfs_requirements_double};
use chiraldark::fock::FockCutoff;
use chiraldark::presets::figure;
use chiraldark::sweep::{
    describe_point, evaluate, run_convergence, run_oracle_compare, run_point, run_sweep, Table,
};

#[derive(Parser, Debug)]
#[command(name = "chiraldark", version, about = "Driven atom and parametric cavity coupled through a chiral waveguide")]
struct Cli {
    /// TOML configuration with [system], [engine], [sweep] and [output] sections
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Write CSV output to this file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Fock-space cutoff n_max (overrides the config)
    #[arg(long, global = true, value_name = "N_MAX")]
    cutoff: Option<usize>,

    /// Master-equation engine (overrides the config)
    #[arg(long, global = true, value_name = "full|truncated")]
    engine: Option<Engine>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Steady-state observables and dark-condition diagnostics at one point
    Point,
    /// Sweep one parameter over the grid given in the [sweep] section
    Sweep,
    /// Dark-state conditions, required pump and analytic dark state
    Darkcheck,
    /// Five-state truncated steady state against the full one
    OracleCompare,
    /// Observables against the Fock cutoff
    Converge {
        /// Cutoffs to compare (overrides [engine] cutoffs)
        #[arg(long, value_delimiter = ',', value_name = "N,N,...")]
        cutoffs: Option<Vec<usize>>,
    },
    /// Built-in figure sweep (figure3 … figure7)
    Figure {
        /// Figure id, e.g. `figure4` or `4`
        id: String,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Model(#[from] chiraldark::Error),
    #[error("cannot read config {path}: {source}")]
    ReadConfig { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Model(e) if e.is_numerical() => 3,
            CliError::Model(_) | CliError::ReadConfig { .. } => 2,
            CliError::Write { .. } => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn load_config(cli: &Cli) -> Result<Config> {
    let mut file = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::ReadConfig { path: path.clone(), source })?;
            ConfigFile::from_toml_str(&text)?
        }
        None => ConfigFile::default(),
    };
    if let Some(n) = cli.cutoff {
        file.engine.cutoff = Some(n);
    }
    if let Some(engine) = cli.engine {
        file.engine.kind = engine;
    }
    Ok(file.resolve()?)
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn print_stdout(text: &str) -> Result<()> {
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(CliError::Write { path: "<stdout>".into(), source: e }),
        _ => Ok(()),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Write { path: path.to_path_buf(), source }),
        None => print_stdout(text),
    }
}

fn point_table(cfg: &Config) -> Result<Table> {
    let eval = evaluate(&cfg.point)?;
    let row = cfg.outputs.iter().map(|&o| eval.observable(o)).collect::<chiraldark::Result<Vec<_>>>()?;
    Ok(Table {
        comments: describe_point(&cfg.point)?,
        columns: cfg.outputs.iter().map(|o| o.to_string()).collect(),
        rows: vec![row],
    })
}

fn darkcheck(cfg: &Config) -> Result<String> {
    let params = cfg.point.system_params()?;
    let report = dark_conditions_double(&params)?;
    let flags = &report.flags;
    let mut out = format!(
        "equal_drives        {}\nequal_damping       {}\nsymmetric_detuning  {}\npump_matched        {}\n",
        flags.equal_drives, flags.equal_damping, flags.symmetric_detuning, flags.pump_matched
    );
    out += &format!(
        "residuals           jump={:.3e} dark={:.3e} dfs={:.3e}\n",
        report.jump_residual, report.dark_residual, report.dfs_residual
    );
    match dfs_requirements_double(&params) {
        Ok(r) => {
            out += &format!("E_required          |E|={:.16e} arg={:.16e}\n", r.required_e.norm(), r.required_e.arg());
            out += &format!("c_phi/c_1           {:.6e} {:+.6e}i\n", r.c_phi_over_c1.re, r.c_phi_over_c1.im);
        }
        Err(e) => out += &format!("E_required          n/a: {e}\n"),
    }
    match analytic_dark_rho(&params) {
        Ok(rho) => {
            out += &format!("rho_11              {:.16e}\n", rho.rho_11);
            out += &format!("rho_phiphi          {:.16e}\n", rho.rho_phiphi);
            out += &format!("rho_1phi            {:.16e} {:+.16e}i\n", rho.rho_1phi.re, rho.rho_1phi.im);
        }
        Err(e) => out += &format!("analytic dark state n/a: {e}\n"),
    }
    Ok(out)
}

fn run(cli: &Cli) -> Result<()> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Point => {
            let cfg = load_config(cli)?;
            print_stdout(&format!("{}\n", run_point(&cfg.point)?))?;
            if out.is_some() {
                emit(&point_table(&cfg)?.to_csv(), out)?;
            }
        }
        Command::Sweep => {
            let cfg = load_config(cli)?;
            let spec = cfg.sweep.ok_or_else(|| chiraldark::Error::Config("config has no [sweep] section".into()))?;
            emit(&run_sweep(&spec)?.to_csv(), out)?;
        }
        Command::Darkcheck => {
            let cfg = load_config(cli)?;
            print_stdout(&darkcheck(&cfg)?)?;
        }
        Command::OracleCompare => {
            let cfg = load_config(cli)?;
            print_stdout(&format!("{}\n", run_oracle_compare(&cfg.point)?))?;
        }
        Command::Converge { cutoffs } => {
            let cfg = load_config(cli)?;
            let cutoffs = cutoffs.as_ref().unwrap_or(&cfg.cutoffs);
            emit(&run_convergence(&cfg.point, cutoffs)?.to_csv(), out)?;
        }
        Command::Figure { id } => {
            let mut preset = figure(id)?;
            if let Some(n) = cli.cutoff {
                preset = preset.with_cutoff(FockCutoff::new(n)?);
            }
            emit(&preset.run()?.to_csv(), out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn numerical_errors_map_to_exit_3() {
        let e = CliError::Model(chiraldark::Error::NonUniqueSteadyState { discrepancy: 1.0 });
        assert_eq!(e.exit_code(), 3);
        let e = CliError::Model(chiraldark::Error::Config("x".into()));
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn undefined_sentinel_is_textual() {
        assert!(chiraldark::sweep::UNDEFINED.parse::<f64>().is_err());
    }
}
