use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "ltl", version, about = "Mesh operators and surface PDE runs by local tangential lifting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate, inspect and convert meshes.
    #[command(subcommand)]
    Mesh(MeshCommand),
    /// Evaluate the gradient or Laplacian of a field.
    Ops(OpsArgs),
    /// Run the heat or Turing solver.
    #[command(subcommand)]
    Solve(SolveCommand),
    /// Compare an operator with its exact value on refined meshes.
    Convergence(ConvergenceArgs),
    /// Run a recipe file.
    Run(RunArgs),
}

#[derive(Debug, Subcommand)]
pub enum MeshCommand {
    #[command(subcommand)]
    Gen(GenCommand),
    /// Print validity diagnostics.
    Info {
        /// Mesh file or generator spec (`sphere:N`, `torus:A,R,NU,NV`).
        mesh: String,
    },
    /// Rewrite a mesh in the format implied by the output extension.
    Convert {
        input: String,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Unit icosphere.
    Sphere {
        #[arg(long, default_value_t = 3)]
        subdiv: u32,
        #[arg(short, long, default_value = "sphere.off")]
        output: PathBuf,
    },
    /// Torus `((a + r cos u) cos v, (a + r cos u) sin v, r sin u)` on an `nu × nv` grid.
    Torus {
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        r: f64,
        #[arg(long, default_value_t = 15)]
        nu: usize,
        #[arg(long, default_value_t = 31)]
        nv: usize,
        #[arg(short, long, default_value = "torus.off")]
        output: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Operator {
    Grad,
    Laplacian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SnapshotFormat {
    Ply,
    Csv,
}

impl SnapshotFormat {
    pub fn extension(self) -> &'static str {
        match self {
            SnapshotFormat::Ply => "ply",
            SnapshotFormat::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Criterion {
    Strict,
    Profile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Sphere,
    Torus,
}

/// Flags shared by every command that writes a run directory.
#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = SnapshotFormat::Ply)]
    pub format: SnapshotFormat,
    /// Repeat the run in a scratch directory and compare output hashes.
    #[arg(long)]
    pub verify: bool,
    /// Flat `key = value` file of flags; flags on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct OpsArgs {
    #[arg(value_enum)]
    pub operator: Operator,
    /// Mesh file or generator spec.
    pub mesh: String,
    #[arg(long, default_value = "x1")]
    pub field: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Subcommand)]
pub enum SolveCommand {
    /// `u_t = Δu + g`.
    Heat(HeatArgs),
    /// Two-species Turing reaction-diffusion.
    Turing(TuringArgs),
}

/// Time stepping flags shared by both solvers.
#[derive(Debug, Clone, Args)]
pub struct StepArgs {
    /// Mesh file or generator spec.
    #[arg(long)]
    pub mesh: String,
    /// Time step, or `auto` for `c·h_min²`.
    #[arg(long, default_value = "auto")]
    pub dt: String,
    /// The constant `c` used by `--dt auto`.
    #[arg(long, default_value_t = 0.2)]
    pub stability_c: f64,
    #[arg(long, default_value_t = 200_000)]
    pub max_steps: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub steady_tol: f64,
    #[arg(long, value_enum, default_value_t = Criterion::Strict)]
    pub criterion: Criterion,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct HeatArgs {
    #[command(flatten)]
    pub step: StepArgs,
    /// Source term.
    #[arg(long, default_value = "0")]
    pub g: String,
    /// Initial state.
    #[arg(long, default_value = "0")]
    pub u0: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct TuringArgs {
    #[command(flatten)]
    pub step: StepArgs,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub s: f64,
    #[arg(long, default_value_t = 0.0)]
    pub gamma_amp: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "1")]
    pub u10: String,
    #[arg(long, default_value = "1")]
    pub u20: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct ConvergenceArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Refinement levels, as a list (`2,3,4`) or range (`2..4`). Sphere level
    /// `k` is subdivision `k`; torus level `k` is the `(2^(k+2) - 1) × (2^(k+3) - 1)` grid.
    #[arg(long, default_value = "2..4")]
    pub levels: String,
    #[arg(long, default_value = "x1")]
    pub field: String,
    #[arg(long, value_enum, default_value_t = Operator::Laplacian)]
    pub operator: Operator,
    #[arg(long, default_value_t = 2.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    /// CSV report path; standard output when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Recipe file: a config file with a `command` key.
    pub recipe: PathBuf,
    /// Overrides the recipe's output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub verify: bool,
}
