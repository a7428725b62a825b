//! The `dqc` command-line tool: each subcommand runs one estimator and
//! writes JSON (or CSV for spectra and sweeps), always next to the dense
//! value it approximates.

pub mod args;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use dqc::circuit::{
    network_unitary, parse_circuit, parse_hamiltonian, trotter_error, GateNetwork, PauliSum,
};
use dqc::dense::{dense_limit, set_dense_limit, C64};
use dqc::measure::{EstimationBudget, MeterMode, NoisyMeter};
use dqc::oracle_lab::{separation_sweep, SweepConfig};
use dqc::pauli::PauliString;
use dqc::protocols::{
    dqc1_pauli_pair, dqcp_matrix_element, estimate_expectation, estimate_pauli_coefficient,
    parse_basis, pauli_coefficient_exact, pauli_pair_exact, pseudo_pure_answer,
};
use dqc::spectroscopy::{
    eigenphases, f_exact, nyquist_dt, sample_f, sample_f_grid, sample_f_unitary_grid,
    spectrum_fft, SpectrumEstimate, TimeSample,
};
use dqc::state::{eigen_spectrum, DensityState};

pub use args::{Cli, Command, CommonArgs};

pub const FORMAT_VERSION: u32 = 1;

/// Substream of the root seed used by the estimation commands.
const ESTIMATION_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad flags or input files.
    Input(String),
    /// A simulator invariant failed.
    Invariant(String),
    /// Writing output failed.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Invariant(m) => write!(f, "invariant violated: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<dqc::Error> for CliError {
    fn from(e: dqc::Error) -> Self {
        match e {
            dqc::Error::Invariant(_) | dqc::Error::NotUnitary(_) | dqc::Error::NotDeterministic(_) => {
                CliError::Invariant(e.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

/// Library errors on a file, with parse locations as `path:line:column`.
fn in_file(path: &Path, e: dqc::Error) -> CliError {
    match e {
        dqc::Error::Parse {
            line,
            column,
            message,
        } => input(format!("{}:{line}:{column}: {message}", path.display())),
        other => other.into(),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_circuit(args: &args::CircuitArgs) -> CliResult<GateNetwork> {
    let src = read(&args.circuit)?;
    let net = parse_circuit(&src, args.qubits).map_err(|e| in_file(&args.circuit, e))?;
    check_size(net.num_qubits() + 1)?;
    Ok(net)
}

fn load_hamiltonian(path: &Path) -> CliResult<PauliSum> {
    let h = parse_hamiltonian(&read(path)?).map_err(|e| in_file(path, e))?;
    check_size(h.num_qubits() + 1)?;
    Ok(h)
}

fn check_size(m: usize) -> CliResult<()> {
    if m > dense_limit() {
        return Err(input(format!(
            "the protocol needs {m} qubits, above the dense limit {} (raise --dense-limit)",
            dense_limit()
        )));
    }
    Ok(())
}

fn pauli_arg(s: &str, n: usize, flag: &str) -> CliResult<PauliString> {
    let p: PauliString = s
        .parse()
        .map_err(|e: dqc::Error| input(format!("--{flag}: {e}")))?;
    if p.num_qubits() != n {
        return Err(input(format!(
            "--{flag} has {} qubits, the circuit has {n}",
            p.num_qubits()
        )));
    }
    Ok(p)
}

fn basis_arg(s: &str, n: usize, flag: &str) -> CliResult<usize> {
    let (len, index) = parse_basis(s).map_err(|e| input(format!("--{flag}: {e}")))?;
    if len != n {
        return Err(input(format!("--{flag} has {len} bits, the circuit has {n}")));
    }
    Ok(index)
}

struct Context {
    common: CommonArgs,
}

impl Context {
    fn meter(&self) -> CliResult<NoisyMeter> {
        Ok(NoisyMeter::new(self.common.meter, self.common.noise_variance, self.common.seed)?
            .substream(ESTIMATION_STREAM))
    }

    /// With `--shots` the block size is `shots / blocks` and epsilon follows from it.
    fn budget(&self, meter: &NoisyMeter) -> CliResult<EstimationBudget> {
        let c = &self.common;
        let Some(shots) = c.shots else {
            return Ok(EstimationBudget::new(c.epsilon, c.fail_prob)?);
        };
        let blocks = EstimationBudget::new(0.5, c.fail_prob)?.blocks();
        let size = (shots / blocks).max(1);
        let eps = (4.0 * meter.variance_bound() / size as f64).sqrt() * (1.0 + 1e-12);
        EstimationBudget::new(eps, c.fail_prob).map_err(|_| {
            input(format!(
                "--shots {shots} is too few for {blocks} median-of-means blocks"
            ))
        })
    }

    fn header(&self, command: &'static str, budget: Option<&EstimationBudget>) -> Header {
        let c = &self.common;
        Header {
            format_version: FORMAT_VERSION,
            command,
            seed: c.seed,
            meter: c.meter,
            noise_variance: (c.meter == MeterMode::Gaussian).then_some(c.noise_variance),
            epsilon: budget.map(|b| b.epsilon),
            fail_prob: budget.map(|b| b.p),
        }
    }
}

#[derive(Debug, Serialize)]
struct Header {
    format_version: u32,
    command: &'static str,
    seed: u64,
    meter: MeterMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    noise_variance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fail_prob: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
struct Complex {
    re: f64,
    im: f64,
}

impl From<C64> for Complex {
    fn from(z: C64) -> Self {
        Complex { re: z.re, im: z.im }
    }
}

impl From<f64> for Complex {
    fn from(re: f64) -> Self {
        Complex { re, im: 0.0 }
    }
}

#[derive(Debug, Serialize)]
struct EstimateOut {
    estimate_re: f64,
    estimate_im: f64,
    stderr: f64,
    shots: u64,
    dense_oracle: Complex,
}

#[derive(Debug, Serialize)]
struct Report<T: Serialize> {
    #[serde(flatten)]
    header: Header,
    #[serde(flatten)]
    body: T,
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Files written by one run, in order; `None` is stdout.
pub type Artifacts = Vec<(Option<PathBuf>, String)>;

/// Parses nothing and touches no files: runs `cli` and returns what it would write.
pub fn execute(cli: &Cli) -> Result<Artifacts, CliError> {
    if cli.common.dense_limit == 0 {
        return Err(input("--dense-limit must be positive"));
    }
    set_dense_limit(cli.common.dense_limit);
    let ctx = Context {
        common: cli.common.clone(),
    };
    let out = cli.common.out.clone();
    let single = |body: String| Ok(vec![(out.clone(), body)]);
    match &cli.command {
        Command::TracePair { circuit, a, b } => single(trace_pair(&ctx, circuit, a, b)?),
        Command::PauliCoeff { circuit, b } => single(pauli_coeff(&ctx, circuit, b)?),
        Command::MatrixElement { circuit, a, b } => single(matrix_element(&ctx, circuit, a, b)?),
        Command::PseudoPure { circuit } => single(pseudo_pure(&ctx, circuit)?),
        Command::Spectrum {
            hamiltonian,
            dt,
            trotter_steps,
            spectrum,
        } => spectrum_cmd(&ctx, hamiltonian, *dt, *trotter_steps, spectrum),
        Command::UnitarySpectrum { circuit, spectrum } => unitary_spectrum(&ctx, circuit, spectrum),
        Command::Separation {
            n,
            r,
            ancillas,
            trials,
            layer_gates,
        } => single(separation(&ctx, &n.0, &r.0, &ancillas.0, *trials, *layer_gates)?),
        Command::TrotterCheck { hamiltonian, t, steps } => {
            single(trotter_check(&ctx, hamiltonian, *t, &steps.0)?)
        }
        Command::Simulate {
            circuit,
            init,
            observables,
            dump_state,
        } => simulate(&ctx, circuit, init, observables, dump_state.as_deref()),
    }
}

/// Runs `cli` and writes its artifacts.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    use std::io::Write as _;
    for (path, body) in execute(cli)? {
        match path {
            Some(p) => fs::write(&p, body).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
            None => std::io::stdout()
                .write_all(body.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))?,
        }
    }
    Ok(())
}

fn trace_pair(ctx: &Context, c: &args::CircuitArgs, a: &str, b: &str) -> CliResult<String> {
    #[derive(Serialize)]
    struct Body {
        n: usize,
        a: String,
        b: String,
        #[serde(flatten)]
        estimate: EstimateOut,
    }
    let u = load_circuit(c)?;
    let n = u.num_qubits();
    let (pa, pb) = (pauli_arg(a, n, "a")?, pauli_arg(b, n, "b")?);
    let mut meter = ctx.meter()?;
    let budget = ctx.budget(&meter)?;
    let e = dqc1_pauli_pair(&u, &pa, &pb, &mut meter, &budget)?;
    to_json(&Report {
        header: ctx.header("trace-pair", Some(&budget)),
        body: Body {
            n,
            a: pa.to_string(),
            b: pb.to_string(),
            estimate: EstimateOut {
                estimate_re: e.value,
                estimate_im: 0.0,
                stderr: e.stderr,
                shots: e.shots,
                dense_oracle: pauli_pair_exact(&u, &pa, &pb)?.into(),
            },
        },
    })
}

fn pauli_coeff(ctx: &Context, c: &args::CircuitArgs, b: &str) -> CliResult<String> {
    #[derive(Serialize)]
    struct Body {
        n: usize,
        b: String,
        #[serde(flatten)]
        estimate: EstimateOut,
    }
    let u = load_circuit(c)?;
    let n = u.num_qubits();
    let pb = pauli_arg(b, n, "b")?;
    let mut meter = ctx.meter()?;
    let budget = ctx.budget(&meter)?;
    let e = estimate_pauli_coefficient(&u, &pb, &mut meter, &budget)?;
    to_json(&Report {
        header: ctx.header("pauli-coeff", Some(&budget)),
        body: Body {
            n,
            b: pb.to_string(),
            estimate: EstimateOut {
                estimate_re: e.value.re,
                estimate_im: e.value.im,
                stderr: e.stderr,
                shots: e.shots,
                dense_oracle: pauli_coefficient_exact(&u, &pb)?.into(),
            },
        },
    })
}

fn matrix_element(ctx: &Context, c: &args::CircuitArgs, a: &str, b: &str) -> CliResult<String> {
    #[derive(Serialize)]
    struct Body {
        n: usize,
        a: String,
        b: String,
        stderr_re: f64,
        stderr_im: f64,
        #[serde(flatten)]
        estimate: EstimateOut,
    }
    let u = load_circuit(c)?;
    let n = u.num_qubits();
    let (ia, ib) = (basis_arg(a, n, "a")?, basis_arg(b, n, "b")?);
    let mut meter = ctx.meter()?;
    let budget = ctx.budget(&meter)?;
    let e = dqcp_matrix_element(&u, ia, ib, &mut meter, &budget)?;
    let exact = network_unitary(&u)?[(ia, ib)];
    to_json(&Report {
        header: ctx.header("matrix-element", Some(&budget)),
        body: Body {
            n,
            a: a.to_string(),
            b: b.to_string(),
            stderr_re: e.stderr_re,
            stderr_im: e.stderr_im,
            estimate: EstimateOut {
                estimate_re: e.value.re,
                estimate_im: e.value.im,
                stderr: e.stderr(),
                shots: e.shots,
                dense_oracle: exact.into(),
            },
        },
    })
}

fn pseudo_pure(ctx: &Context, c: &args::CircuitArgs) -> CliResult<String> {
    #[derive(Serialize)]
    struct Body {
        n: usize,
        signal: f64,
        signal_stderr: f64,
        signal_exact: f64,
        scale: f64,
        sign_shots: u64,
        #[serde(flatten)]
        estimate: EstimateOut,
    }
    let u = load_circuit(c)?;
    let mut meter = ctx.meter()?;
    let budget = ctx.budget(&meter)?;
    let r = pseudo_pure_answer(&u, &mut meter, &budget)?;
    to_json(&Report {
        header: ctx.header("pseudo-pure", Some(&budget)),
        body: Body {
            n: r.n,
            signal: r.signal.value,
            signal_stderr: r.signal.stderr,
            signal_exact: r.signal_exact,
            scale: r.scale,
            sign_shots: r.sign_shots,
            estimate: EstimateOut {
                estimate_re: r.alpha,
                estimate_im: 0.0,
                stderr: r.alpha_stderr,
                shots: r.signal.shots,
                dense_oracle: r.alpha_exact.into(),
            },
        },
    })
}

#[derive(Debug, Serialize)]
struct PeakOut {
    frequency: f64,
    height: f64,
    intensity: f64,
}

fn spectrum_csv(s: &SpectrumEstimate) -> String {
    let mut csv = String::from("frequency,intensity,stderr\n");
    for (f, d) in s.frequencies.iter().zip(&s.density) {
        let _ = writeln!(csv, "{f},{d},{}", s.density_stderr);
    }
    csv
}

fn peaks_of(s: &SpectrumEstimate) -> Vec<PeakOut> {
    s.peaks()
        .into_iter()
        .map(|p| PeakOut {
            frequency: p.frequency,
            height: p.height,
            intensity: p.intensity,
        })
        .collect()
}

fn sidecar_path(common: &CommonArgs, args: &args::SpectrumArgs) -> Option<PathBuf> {
    args.sidecar
        .clone()
        .or_else(|| common.out.as_ref().map(|p| p.with_extension("json")))
}

fn check_npoints(npoints: usize) -> CliResult<()> {
    if npoints < 2 {
        return Err(input("--npoints must be at least 2"));
    }
    Ok(())
}

fn spectrum_cmd(
    ctx: &Context,
    path: &Path,
    dt: f64,
    steps: usize,
    args: &args::SpectrumArgs,
) -> CliResult<Artifacts> {
    #[derive(Serialize)]
    struct Body {
        n: usize,
        dt: f64,
        npoints: usize,
        trotter_steps: usize,
        window: &'static str,
        resolution: f64,
        nyquist_dt: f64,
        density_stderr: f64,
        peaks: Vec<PeakOut>,
        oracle_eigenvalues: Vec<f64>,
    }
    let h = load_hamiltonian(path)?;
    check_npoints(args.npoints)?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(input("--dt must be positive"));
    }
    if steps == 0 {
        return Err(input("--trotter-steps must be at least 1"));
    }
    let limit = nyquist_dt(&h);
    if dt >= limit && !ctx.common.force {
        return Err(input(format!(
            "--dt {dt} aliases the spectrum (needs dt < {limit}); pass --force to run anyway"
        )));
    }
    let mut meter = ctx.meter()?;
    let budget = ctx.budget(&meter)?;
    let samples = sample_f_grid(&h, dt, args.npoints, steps, &mut meter, &budget)?;
    let s = spectrum_fft(&samples, args.window)?;
    let body = Body {
        n: h.num_qubits(),
        dt,
        npoints: args.npoints,
        trotter_steps: steps,
        window: args.window.name(),
        resolution: s.resolution,
        nyquist_dt: limit,
        density_stderr: s.density_stderr,
        peaks: peaks_of(&s),
        oracle_eigenvalues: eigen_spectrum(&h)?,
    };
    let mut out = vec![(ctx.common.out.clone(), spectrum_csv(&s))];
    if let Some(p) = sidecar_path(&ctx.common, args) {
        out.push((
            Some(p),
            to_json(&Report {
                header: ctx.header("spectrum", Some(&budget)),
                body,
            })?,
        ));
    }
    Ok(out)
}

fn unitary_spectrum(ctx: &Context, c: &args::CircuitArgs, args: &args::SpectrumArgs) -> CliResult<Artifacts> {
    #[derive(Serialize)]
    struct Body {
        n: usize,
        npoints: usize,
        window: &'static str,
        resolution: f64,
        density_stderr: f64,
        peaks: Vec<PeakOut>,
        oracle_eigenphases: Vec<f64>,
    }
    let w = load_circuit(c)?;
    check_npoints(args.npoints)?;
    let mut meter = ctx.meter()?;
    let budget = ctx.budget(&meter)?;
    let samples: Vec<TimeSample> = sample_f_unitary_grid(&w, args.npoints, &mut meter, &budget)?;
    let s = spectrum_fft(&samples, args.window)?;
    let body = Body {
        n: w.num_qubits(),
        npoints: args.npoints,
        window: args.window.name(),
        resolution: s.resolution,
        density_stderr: s.density_stderr,
        peaks: peaks_of(&s),
        oracle_eigenphases: eigenphases(&w)?,
    };
    let mut out = vec![(ctx.common.out.clone(), spectrum_csv(&s))];
    if let Some(p) = sidecar_path(&ctx.common, args) {
        out.push((
            Some(p),
            to_json(&Report {
                header: ctx.header("unitary-spectrum", Some(&budget)),
                body,
            })?,
        ));
    }
    Ok(out)
}

fn separation(
    ctx: &Context,
    ns: &[usize],
    rs: &[usize],
    ancillas: &[usize],
    trials: usize,
    layer_gates: usize,
) -> CliResult<String> {
    if trials == 0 {
        return Err(input("--trials must be at least 1"));
    }
    if let Some(&n) = ns.iter().find(|&&n| n == 0) {
        return Err(input(format!("--n {n}: the oracle needs at least one qubit")));
    }
    let cfg = SweepConfig {
        ns: ns.to_vec(),
        rs: rs.to_vec(),
        ancillas: ancillas.to_vec(),
        trials,
        seed: ctx.common.seed,
        layer_gates,
    };
    let rows = separation_sweep(&cfg)?;
    let mut csv = String::from("n,r,m,bound,observed_max,violations,trials,method\n");
    for row in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},exact",
            row.n, row.r, row.m, row.bound, row.observed_max, row.violations, row.trials
        );
    }
    if let Some(row) = rows.iter().find(|row| row.violations > 0) {
        return Err(CliError::Invariant(format!(
            "bound 4r/2^n violated in {} of {} trials at n={}, r={}, m={}:\n{csv}",
            row.violations, row.trials, row.n, row.r, row.m
        )));
    }
    Ok(csv)
}

fn trotter_check(ctx: &Context, path: &Path, t: f64, steps: &[usize]) -> CliResult<String> {
    #[derive(Serialize)]
    struct Row {
        steps: usize,
        operator_error: f64,
        f_error: f64,
    }
    #[derive(Serialize)]
    struct Body {
        n: usize,
        t: f64,
        method: &'static str,
        rows: Vec<Row>,
        /// Least-squares slope of log error against log steps.
        slope: Option<f64>,
    }
    let h = load_hamiltonian(path)?;
    if !t.is_finite() {
        return Err(input("--t must be finite"));
    }
    if steps.contains(&0) {
        return Err(input("--steps entries must be at least 1"));
    }
    let eig = eigen_spectrum(&h)?;
    let mut exact_meter = NoisyMeter::gaussian(0.0, ctx.common.seed)?;
    let budget = EstimationBudget::new(0.5, 0.5)?;
    let mut rows = Vec::new();
    for &s in steps {
        let f = sample_f(&h, t, s, &mut exact_meter, &budget)?;
        rows.push(Row {
            steps: s,
            operator_error: trotter_error(&h, t, s)?,
            f_error: (f.value - f_exact(&eig, t)).norm(),
        });
    }
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.operator_error > 1e-13)
        .map(|r| ((r.steps as f64).ln(), r.operator_error.ln()))
        .collect();
    let slope = (points.len() >= 2).then(|| {
        let k = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
        let my = points.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    to_json(&Report {
        header: ctx.header("trotter-check", None),
        body: Body {
            n: h.num_qubits(),
            t,
            method: "exact",
            rows,
            slope: slope.filter(|s| s.is_finite()),
        },
    })
}

fn simulate(
    ctx: &Context,
    c: &args::CircuitArgs,
    init: &str,
    observables: &[String],
    dump: Option<&Path>,
) -> CliResult<Artifacts> {
    #[derive(Serialize)]
    struct Reading {
        observable: String,
        estimate: f64,
        stderr: f64,
        shots: u64,
        dense_oracle: f64,
    }
    #[derive(Serialize)]
    struct Body {
        n: usize,
        init: String,
        readings: Vec<Reading>,
    }
    let u = load_circuit(c)?;
    let n = u.num_qubits();
    let start = match init {
        "dqc1" => DensityState::init_dqc1(n)?,
        "dqcp" => DensityState::init_dqcp(n)?,
        other => return Err(input(format!("--init '{other}': expected dqc1 or dqcp"))),
    };
    let state = start.apply_network(&u)?;
    let ops: Vec<PauliString> = if observables.is_empty() {
        vec![PauliString::single(n, 1, dqc::pauli::Pauli::Z)?]
    } else {
        observables
            .iter()
            .map(|s| pauli_arg(s, n, "observables"))
            .collect::<CliResult<_>>()?
    };
    let mut meter = ctx.meter()?;
    let budget = ctx.budget(&meter)?;
    let mut readings = Vec::new();
    for op in &ops {
        let exact = state.expectation(op)?;
        let (estimate, stderr, shots) = if op.is_identity() {
            (1.0, 0.0, 0)
        } else {
            let e = estimate_expectation(&state, op, &mut meter, &budget)?;
            (e.value, e.stderr, e.shots)
        };
        readings.push(Reading {
            observable: op.to_string(),
            estimate,
            stderr,
            shots,
            dense_oracle: exact,
        });
    }
    let mut out = vec![(
        ctx.common.out.clone(),
        to_json(&Report {
            header: ctx.header("simulate", Some(&budget)),
            body: Body {
                n,
                init: init.to_string(),
                readings,
            },
        })?,
    )];
    if let Some(p) = dump {
        out.push((Some(p.to_path_buf()), state.to_csv()));
    }
    Ok(out)
}
