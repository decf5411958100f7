//! Command-line surface for the `wavepole` solver.
//!
//! Every command resolves a [`Scenario`] from an optional scenario file plus
//! flags, runs one computation and writes a CSV table.

pub mod commands;
pub mod output;
pub mod scenario;

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use output::{Cell, Table};
pub use scenario::{Scenario, ScenarioError};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Io { path: PathBuf, source: std::io::Error },
    Empty(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 1,
            CliError::Empty(_) => 2,
            CliError::Input(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "bad input: {m}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Empty(m) => write!(f, "empty result: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<wavepole::Error> for CliError {
    fn from(e: wavepole::Error) -> Self {
        use wavepole::Error as E;
        match e {
            E::InvalidParameter(_) | E::Configuration(_) | E::Table(_) | E::Unsupported(_) => {
                CliError::Input(e.to_string())
            }
            E::Io(source) => CliError::Io {
                path: PathBuf::from("<input>"),
                source,
            },
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "wavepole", version, about = "Bound-state pole dominance in radial scattering")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// Scenario file with [potential], [grid] and [sweep] sections.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Radial grid spacing.
    #[arg(long)]
    pub step: Option<f64>,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also render an SVG line plot.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Default, Args)]
pub struct ModelArgs {
    /// well, bargmann, gaussian, tabulated or yamaguchi.
    #[arg(long)]
    pub potential: Option<String>,
    /// Well depth.
    #[arg(long = "U0")]
    pub u0: Option<f64>,
    /// Well radius.
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Binding wavenumber of the Bargmann or Yamaguchi state.
    #[arg(long)]
    pub alphab: Option<f64>,
    /// Gaussian height (negative is attractive).
    #[arg(long)]
    pub height: Option<f64>,
    /// Gaussian width.
    #[arg(long)]
    pub width: Option<f64>,
    /// Two-column (r, U) CSV for a tabulated potential.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bound (and optionally virtual) states.
    Bind {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Also search for virtual states.
        #[arg(long = "virtual")]
        virtual_states: bool,
    },
    /// Phase shifts.
    Scatter {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_delimiter = ',')]
        k: Vec<f64>,
    },
    /// Series coefficients of the scattering-to-bound ratio.
    Ratio {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Wavenumbers used in the fit.
        #[arg(long, value_delimiter = ',')]
        k: Vec<f64>,
        /// Radii at which the coefficients are fitted.
        #[arg(long, value_delimiter = ',')]
        r: Vec<f64>,
    },
    /// Radius where the scaled scattering function meets the bound state.
    Crossover {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_delimiter = ',')]
        k: Vec<f64>,
    },
    /// Bound and modified scattering functions of the three well cases.
    Fig1 {
        #[command(flatten)]
        common: CommonArgs,
        /// 1: single level, 2: excited level, 3: virtual level.
        #[arg(long)]
        case: Option<u8>,
    },
    /// Gamow factor against its series and pole decomposition.
    Coulomb {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        eta: Vec<f64>,
        /// Coulomb scale; switches to the pole decomposition over `--k`.
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        k: Vec<f64>,
        #[arg(long)]
        terms: Option<usize>,
    },
    /// First-order perturbation against exact re-solves.
    Perturb {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        eps: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        k: Vec<f64>,
        /// Radius of the unit attractive step used as the perturbation profile.
        #[arg(long)]
        profile_radius: Option<f64>,
    },
    /// Run the acceptance checks.
    Validate {
        #[arg(long)]
        step: Option<f64>,
        /// Write the three figure tables into this directory.
        #[arg(long)]
        fig_dir: Option<PathBuf>,
    },
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    commands::dispatch(cli.command)
}
