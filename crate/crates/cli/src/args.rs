use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
pub const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "+parallel");
#[cfg(not(feature = "parallel"))]
pub const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "+sequential");

/// Multi-body coupler gadgets, circuit couplings, tolerance analysis and
/// parity embedding.
#[derive(Parser, Debug)]
#[command(name = "coupler", version = VERSION)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enumerate a gadget and compare its logical spectrum with the target
    GadgetVerify(GadgetCmd),
    /// Emit the two-body gadget Hamiltonian
    GadgetBuild(GadgetCmd),
    /// Extract effective couplings from the coupler circuit
    CircuitCouplings(CircuitCmd),
    /// Largest spurious three-body strength the gadget tolerates
    ThreeBodyTolerance(ThreeBodyCmd),
    /// Yield versus relative mutual-inductance mismatch
    YieldSim(YieldCmd),
    /// Critical mismatch for each sampled fabrication error
    CriticalSigma(CriticalCmd),
    /// Worst-case correctable mismatch
    Bound(GadgetCmd),
    /// Compile a logical problem into the parity layout
    LhzCompile(LhzCompileCmd),
    /// Check the parity embedding against the logical problem by enumeration
    LhzValidate(LhzValidateCmd),
    /// Simulated annealing on a Hamiltonian file
    Anneal(AnnealCmd),
    /// Enumerate the spectrum of a Hamiltonian file or gadget
    Spectrum(SpectrumCmd),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::GadgetVerify(_) => "gadget-verify",
            Command::GadgetBuild(_) => "gadget-build",
            Command::CircuitCouplings(_) => "circuit-couplings",
            Command::ThreeBodyTolerance(_) => "three-body-tolerance",
            Command::YieldSim(_) => "yield-sim",
            Command::CriticalSigma(_) => "critical-sigma",
            Command::Bound(_) => "bound",
            Command::LhzCompile(_) => "lhz-compile",
            Command::LhzValidate(_) => "lhz-validate",
            Command::Anneal(_) => "anneal",
            Command::Spectrum(_) => "spectrum",
        }
    }
}

#[derive(Args, Serialize, Deserialize, Default, Clone, Debug)]
#[serde(default)]
pub struct Common {
    /// JSON config file or run report; flags override its values
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Output file; format from the extension (.csv, .json, .txt)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads
    #[arg(long, env = "COUPLER_THREADS")]
    pub threads: Option<usize>,
}

#[derive(ValueEnum, Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    NLocal,
    ThreeLocal,
    Symmetric,
}

#[derive(Args, Serialize, Deserialize, Default, Clone, Debug)]
#[serde(default)]
pub struct GadgetArgs {
    /// Gadget construction
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    /// Logical spin count
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    /// Ancilla coupling J_a
    #[arg(long = "Ja")]
    #[serde(rename = "Ja")]
    pub j_a: Option<f64>,
    /// Neutral ancilla bias q_0
    #[arg(long = "q0")]
    #[serde(rename = "q0")]
    pub q_0: Option<f64>,
    /// Target N-body coupling J_N
    #[arg(long = "JN", allow_hyphen_values = true)]
    #[serde(rename = "JN")]
    pub j_n: Option<f64>,
    /// Logical coupling J of the three-local gadget
    #[arg(long = "J")]
    #[serde(rename = "J")]
    pub j: Option<f64>,
    /// Symmetric target f(0..=N), comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub f: Option<Vec<f64>>,
}

#[derive(Args, Serialize, Deserialize, Default, Clone, Debug)]
#[serde(default)]
pub struct GadgetCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub gadget: GadgetArgs,
}

#[derive(Args, Serialize, Deserialize, Default, Clone, Debug)]
#[serde(default)]
pub struct CircuitCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Circuit parameter file (L_c, L, M, E_c, E, phi_cx)
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    /// Number of attached qubit loops
    #[arg(long)]
    pub n: Option<usize>,
    /// Coupler inductance
    #[arg(long = "Lc")]
    #[serde(rename = "Lc")]
    pub l_c: Option<f64>,
    /// Qubit loop inductances, one value or one per loop
    #[arg(long = "L", value_delimiter = ',')]
    #[serde(rename = "L")]
    pub l: Option<Vec<f64>>,
    /// Mutual inductances, one value or one per loop
    #[arg(long = "M", value_delimiter = ',')]
    #[serde(rename = "M")]
    pub m: Option<Vec<f64>>,
    /// Coupler Josephson energy
    #[arg(long = "Ec")]
    #[serde(rename = "Ec")]
    pub e_c: Option<f64>,
    /// Qubit Josephson energies, one value or one per loop
    #[arg(long = "E", value_delimiter = ',')]
    #[serde(rename = "E")]
    pub e: Option<Vec<f64>>,
    /// External coupler flux
    #[arg(long = "phi-cx", allow_hyphen_values = true)]
    #[serde(rename = "phi-cx")]
    pub phi_cx: Option<f64>,
    /// Finite-difference step
    #[arg(long)]
    pub delta: Option<f64>,
    /// Also report the spurious three-body scale
    #[arg(long = "three-body", num_args = 0..=1, default_missing_value = "true")]
    #[serde(rename = "three-body")]
    pub three_body: Option<bool>,
}

#[derive(ValueEnum, Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Sign {
    Same,
    Opposite,
    Both,
}

#[derive(ValueEnum, Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum TripleSetArg {
    All,
    NoAncillaTriples,
    LogicalOnly,
}

#[derive(Args, Serialize, Deserialize, Default, Clone, Debug)]
#[serde(default)]
pub struct ThreeBodyCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub gadget: GadgetArgs,
    /// Sign of the spurious term relative to the two-body couplings
    #[arg(long, value_enum)]
    pub sign: Option<Sign>,
    /// Triples carrying the spurious term
    #[arg(long, value_enum)]
    pub triples: Option<TripleSetArg>,
}

#[derive(ValueEnum, Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Corrected,
    Raw,
}

#[derive(Args, Serialize, Deserialize, Default, Clone, Debug)]
#[serde(default)]
pub struct Sampling {
    /// Random seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of sampled fabrication errors
    #[arg(long)]
    pub samples: Option<usize>,
    /// Ancilla-field correction
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
}

#[derive(Args, Serialize, Deserialize, Default, Clone, Debug)]
#[serde(default)]
pub struct YieldCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub gadget: GadgetArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub sampling: Sampling,
    /// Explicit σ grid, comma separated
    #[arg(long, value_delimiter = ',')]
    pub sigma: Option<Vec<f64>>,
    /// Largest σ of the uniform grid
    #[arg(long = "sigma-max")]
    #[serde(rename = "sigma-max")]
    pub sigma_max: Option<f64>,
    /// Intervals of the uniform grid
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Default, Clone, Debug)]
#[serde(default)]
pub struct CriticalCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub gadget: GadgetArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub sampling: Sampling,
}

#[derive(Args, Serialize, Deserialize, Default, Clone, Debug)]
#[serde(default)]
pub struct LhzCompileCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Logical problem file {M, couplings: [[i, j, J], ...]}
    #[arg(long)]
    pub problem: Option<PathBuf>,
    /// Constraint strength (default 1 + Σ|J|)
    #[arg(long = "C")]
    #[serde(rename = "C")]
    pub c: Option<f64>,
}

#[derive(Args, Serialize, Deserialize, Default, Clone, Debug)]
#[serde(default)]
pub struct LhzValidateCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Logical problem file
    #[arg(long)]
    pub problem: Option<PathBuf>,
    /// Constraint strength (default 1 + Σ|J| per instance)
    #[arg(long = "C")]
    #[serde(rename = "C")]
    pub c: Option<f64>,
    /// Logical size of random instances, instead of --problem
    #[arg(long = "random-M")]
    #[serde(rename = "random-M")]
    pub random_m: Option<usize>,
    /// Number of random instances
    #[arg(long)]
    pub instances: Option<usize>,
    /// Random seed
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Serialize, Deserialize, Default, Clone, Debug)]
#[serde(default)]
pub struct AnnealCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Hamiltonian in the text format
    #[arg(long)]
    pub hamiltonian: Option<PathBuf>,
    /// Random seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Starting temperature (default 2 max|weight|)
    #[arg(long = "t-hot")]
    #[serde(rename = "t-hot")]
    pub t_hot: Option<f64>,
    /// Final temperature (default 0.01 max|weight|)
    #[arg(long = "t-cold")]
    #[serde(rename = "t-cold")]
    pub t_cold: Option<f64>,
    /// Temperatures in the geometric ladder
    #[arg(long)]
    pub steps: Option<usize>,
    /// Sweeps per temperature
    #[arg(long)]
    pub sweeps: Option<usize>,
    /// Independent runs; the best is kept
    #[arg(long)]
    pub restarts: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Default, Clone, Debug)]
#[serde(default)]
pub struct SpectrumCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Hamiltonian in the text format; otherwise the gadget flags are used
    #[arg(long)]
    pub hamiltonian: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub gadget: GadgetArgs,
    /// Lowest levels to list (default all)
    #[arg(long)]
    pub levels: Option<usize>,
}
