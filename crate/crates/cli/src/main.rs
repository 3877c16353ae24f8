//! `pompeiu-lab`: every laboratory operation as a subcommand, with seeded
//! runs and versioned JSON reports.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Failure;

#[derive(Parser, Debug)]
#[command(name = "pompeiu-lab", version, about = "Numerical laboratory for the Pompeiu problem")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,

    /// Run the acceptance suite and print a summary table.
    #[arg(long)]
    pub check: bool,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Domain as inline JSON or a path to a JSON file.
    #[arg(long, global = true)]
    pub domain: Option<String>,

    #[arg(long, global = true, default_value_t = pompeiu_core::acceptance::DEFAULT_SEED)]
    pub seed: u64,

    /// Tolerance; the default depends on the subcommand.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub tol: Option<f64>,

    #[arg(long, global = true, allow_negative_numbers = true)]
    pub kmax: Option<f64>,

    #[arg(long, global = true)]
    pub ksteps: Option<usize>,

    /// Direction-mesh size.
    #[arg(long, global = true)]
    pub dirs: Option<usize>,

    /// Quadrature resolution (grid nodes per axis, or contour nodes).
    #[arg(long, global = true)]
    pub budget: Option<usize>,

    /// Report path; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate the indicator transform at one frequency.
    Ft {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        xi: Vec<f64>,
    },
    /// Search for spherical zero sets of the transform.
    Scan,
    /// Build a counterexample field and evaluate it at points.
    Counterexample(FieldArgs),
    /// Integrate a counterexample field over seeded rigid motions of the domain.
    Verify {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 100)]
        motions: usize,
        /// Translation bound for the random motions.
        #[arg(long, default_value_t = 5.0)]
        bound: f64,
    },
    /// Solve the overdetermined Helmholtz problem on a ball.
    Overdet(BallArgs),
    /// The same solution shifted to the homogeneous Helmholtz form.
    Conj5(BallArgs),
    /// Decide whether the domain boundary is a sphere.
    SphereTest {
        /// Chart nodes as `p,q` (surfaces) or `t` (curves).
        #[arg(long, value_delimiter = ',')]
        nodes: Vec<usize>,
    },
    /// Test a pair of radii against ratios of J_1 zeros.
    TwoRadii {
        #[arg(long)]
        r1: f64,
        #[arg(long)]
        r2: f64,
        #[arg(long, default_value_t = 200)]
        zeros: usize,
    },
    /// Contour integral over a moved disc or polygon and the Wirtinger residual.
    Morera {
        #[arg(long, value_enum, default_value_t = PlanarPreset::Conj)]
        field: PlanarPreset,
        /// Lattice step of the sampled field.
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        /// Translation bound for the seeded motion.
        #[arg(long, default_value_t = 1.0)]
        bound: f64,
    },
    /// Integral of exp(i k z.x) for a complex null direction z.
    Conj6 {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta: f64,
        #[arg(long)]
        k: f64,
    },
    /// Probe chi / (xi.xi - k*^2) on both sides of a shell.
    Factor {
        #[arg(long)]
        kstar: f64,
        #[arg(long, default_value_t = 16)]
        probes: usize,
    },
    /// Run the acceptance suite (same as --check).
    Check,
}

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    /// Shell radius of the density.
    #[arg(long)]
    pub b: f64,
    /// Field dimension; defaults to the domain's.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Density coefficients; radial when absent.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub coeffs: Vec<f64>,
    /// Evaluation point `x,y[,z]`, repeatable.
    #[arg(long = "at", allow_hyphen_values = true)]
    pub at: Vec<String>,
}

#[derive(Args, Debug, Clone)]
pub struct BallArgs {
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Index of the J_{n/2} zero.
    #[arg(long, default_value_t = 1)]
    pub j: usize,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanarPreset {
    /// conj(z): not analytic, dbar f = 1.
    Conj,
    /// exp(z): analytic.
    Exp,
    /// |z|^2: dbar f = z.
    Abs2,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
