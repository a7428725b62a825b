use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use dqc::dense::DEFAULT_DENSE_LIMIT;
use dqc::measure::MeterMode;
use dqc::spectroscopy::Window;

/// Every flag can also be set through a `DQC_`-prefixed environment variable.
#[derive(Debug, Parser)]
#[command(name = "dqc", version, about = "One-clean-qubit estimators on a dense simulator")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Root seed; every random stream is derived from it.
    #[arg(long, global = true, env = "DQC_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Target accuracy of each estimate.
    #[arg(long, global = true, env = "DQC_EPSILON", default_value_t = 0.05)]
    pub epsilon: f64,
    /// Probability that an estimate misses by more than epsilon.
    #[arg(long = "fail-prob", global = true, env = "DQC_FAIL_PROB", default_value_t = 0.01)]
    pub fail_prob: f64,
    /// Repetitions per estimate; overrides --epsilon.
    #[arg(long, global = true, env = "DQC_SHOTS")]
    pub shots: Option<u64>,
    /// Readout model: projective or gaussian.
    #[arg(long, global = true, env = "DQC_METER", default_value = "projective", value_parser = parse_meter)]
    pub meter: MeterMode,
    /// Variance of the Gaussian meter.
    #[arg(long = "noise-variance", global = true, env = "DQC_NOISE_VARIANCE", default_value_t = 1.0)]
    pub noise_variance: f64,
    /// Largest register simulated densely.
    #[arg(long = "dense-limit", global = true, env = "DQC_DENSE_LIMIT", default_value_t = DEFAULT_DENSE_LIMIT)]
    pub dense_limit: usize,
    /// Run even when the time step aliases the spectrum.
    #[arg(long, global = true, env = "DQC_FORCE")]
    pub force: bool,
    /// Output file; stdout when absent.
    #[arg(long, short, global = true, env = "DQC_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CircuitArgs {
    /// Circuit file (`rot`, `crot` and `phase` lines).
    #[arg(long)]
    pub circuit: PathBuf,
    /// Register size, needed when the file has no gates.
    #[arg(long)]
    pub qubits: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[arg(long, default_value_t = 256)]
    pub npoints: usize,
    #[arg(long, default_value = "hann", value_parser = parse_window)]
    pub window: Window,
    /// Sidecar JSON path; defaults to the CSV path with a `.json` extension.
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate tr(sigma_a U sigma_b U^dagger) / 2^n with one clean qubit.
    TracePair {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Estimate the coefficient of sigma_b in the Pauli expansion of U.
    PauliCoeff {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[arg(long)]
        b: String,
    },
    /// Estimate <a|U|b> for basis labels such as 0110.
    MatrixElement {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Read the answer bit of U through a pseudo-pure state.
    PseudoPure {
        #[command(flatten)]
        circuit: CircuitArgs,
    },
    /// Broadened spectrum of a Hamiltonian (CSV plus sidecar JSON).
    Spectrum {
        /// Hamiltonian file (`<coefficient> <pauli-string>` lines).
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        dt: f64,
        /// Trotter steps per time step.
        #[arg(long = "trotter-steps", default_value_t = 1)]
        trotter_steps: usize,
        #[command(flatten)]
        spectrum: SpectrumArgs,
    },
    /// Broadened eigenphase spectrum of the powers of a circuit.
    UnitarySpectrum {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[command(flatten)]
        spectrum: SpectrumArgs,
    },
    /// Sweep |v(U') - v(U)| against 4r/2^n (CSV).
    Separation {
        /// Oracle sizes, as `a..b` (inclusive), a list or one value.
        #[arg(long, default_value = "2..6", value_parser = parse_range)]
        n: IndexList,
        #[arg(long, default_value = "0..4", value_parser = parse_range)]
        r: IndexList,
        /// Ancilla counts m - n.
        #[arg(long, default_value = "0..2", value_parser = parse_range)]
        ancillas: IndexList,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long = "layer-gates", default_value_t = dqc::oracle_lab::DEFAULT_LAYER_GATES)]
        layer_gates: usize,
    },
    /// Operator-norm Trotter error and f(t) error for a list of step counts.
    TrotterCheck {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value = "1,2,4,8,16", value_parser = parse_range)]
        steps: IndexList,
    },
    /// Run a circuit and read Pauli expectations.
    Simulate {
        #[command(flatten)]
        circuit: CircuitArgs,
        /// Initial state: dqc1 or dqcp.
        #[arg(long, default_value = "dqc1")]
        init: String,
        /// Comma-separated Pauli strings; defaults to Z on qubit 1.
        #[arg(long, value_delimiter = ',')]
        observables: Vec<String>,
        /// Also write the final density matrix as CSV.
        #[arg(long = "dump-state")]
        dump_state: Option<PathBuf>,
    },
}

fn parse_meter(s: &str) -> Result<MeterMode, String> {
    s.parse().map_err(|e: dqc::Error| e.to_string())
}

fn parse_window(s: &str) -> Result<Window, String> {
    s.parse().map_err(|e: dqc::Error| e.to_string())
}

/// A list of sizes given as `a..b` (inclusive), `a,b,c` or a single value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexList(pub Vec<usize>);

fn parse_range(s: &str) -> Result<IndexList, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("'{t}' is not a non-negative integer"))
    };
    if let Some((lo, hi)) = s.split_once("..") {
        let (lo, hi) = (num(lo)?, num(hi.trim_start_matches('='))?);
        if lo > hi {
            return Err(format!("empty range {s}"));
        }
        return Ok(IndexList((lo..=hi).collect()));
    }
    s.split(',').map(num).collect::<Result<_, _>>().map(IndexList)
}
