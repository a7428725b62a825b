//! Sampling `f(t) = 2^{-(n+1)} sum_i e^{-i lambda_i t}` with one clean qubit and
//! Fourier transforming a time grid into a broadened spectrum.
//!
//! After rotating the clean qubit to `X_1` and applying `V(t)`, the readouts
//! satisfy `<X_1> = Re tr U(t) / 2^n` and `<Y_1> = -Im tr U(t) / 2^n`, so
//! `f(t) = (<X_1> - i <Y_1>) / 2`.

use std::f64::consts::{PI, TAU};

use rustfft::FftPlanner;
use serde::Serialize;

use crate::circuit::{
    conditional_half_evolutions, conditional_u, network_unitary, GateNetwork, PauliSum,
};
use crate::dense::C64;
use crate::error::{Error, Result};
use crate::measure::{EstimationBudget, NoisyMeter};
use crate::pauli::{Pauli, PauliString};
use crate::protocols::{estimate_expectation, synthesize_conjugation};
use crate::state::DensityState;

/// Decay constant of the exponential window over the full record.
pub const EXP_WINDOW_DECAY: f64 = 4.0;
/// Peaks must exceed this multiple of the median absolute bin density.
pub const PEAK_FLOOR_FACTOR: f64 = 4.0;
/// Peaks must also exceed this many standard errors of the density.
pub const PEAK_SIGMA: f64 = 5.0;
/// Half-width, in bins, of the region summed into a peak's intensity.
pub const PEAK_HALF_WIDTH: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeSample {
    pub t: f64,
    #[serde(skip)]
    pub value: C64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    /// Falling half of a Hann window, `cos^2(pi k / 2N)`.
    Hann,
    /// `exp(-4 k / N)`, Lorentzian broadening.
    #[serde(rename = "exp")]
    Exponential,
}

impl Window {
    pub fn weights(self, n: usize) -> Vec<f64> {
        let len = n as f64;
        (0..n)
            .map(|k| {
                let k = k as f64;
                match self {
                    Window::Hann => (PI * k / (2.0 * len)).cos().powi(2),
                    Window::Exponential => (-EXP_WINDOW_DECAY * k / len).exp(),
                }
            })
            .collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            Window::Hann => "hann",
            Window::Exponential => "exp",
        }
    }
}

impl std::str::FromStr for Window {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hann" => Ok(Window::Hann),
            "exp" | "exponential" => Ok(Window::Exponential),
            other => Err(Error::InvalidArgument(format!("unknown window '{other}'"))),
        }
    }
}

/// A broadened spectral density on the grid `2 pi j / (N dt)`, `j` spanning
/// `(-pi/dt, pi/dt]` in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumEstimate {
    pub frequencies: Vec<f64>,
    pub density: Vec<f64>,
    pub resolution: f64,
    pub window: Window,
    pub dt: f64,
    /// Standard error of every density value, propagated from the sample errors.
    pub density_stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub frequency: f64,
    pub height: f64,
    /// Density summed over the peak's neighbourhood, times the bin width.
    pub intensity: f64,
}

impl SpectrumEstimate {
    pub fn bin_width(&self) -> f64 {
        self.resolution
    }

    /// `sum density * bin width`, equal to `Re f(0)` of the input record.
    pub fn total_weight(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.resolution
    }

    /// Index of the bin whose frequency is closest to `omega`, modulo `2 pi / dt`.
    pub fn bin_of(&self, omega: f64) -> usize {
        let n = self.frequencies.len() as f64;
        let span = TAU / self.dt;
        let wrapped = omega - span * ((omega - self.frequencies[0]) / span).floor();
        (((wrapped - self.frequencies[0]) / self.resolution)
            .round()
            .rem_euclid(n)) as usize
    }

    /// Local maxima above [`PEAK_FLOOR_FACTOR`] times the median absolute
    /// density and [`PEAK_SIGMA`] standard errors.
    pub fn peaks(&self) -> Vec<Peak> {
        let n = self.density.len();
        let mut abs: Vec<f64> = self.density.iter().map(|d| d.abs()).collect();
        abs.sort_by(f64::total_cmp);
        let floor = (PEAK_FLOOR_FACTOR * abs[n / 2]).max(PEAK_SIGMA * self.density_stderr);
        let at = |i: isize| self.density[i.rem_euclid(n as isize) as usize];
        (0..n)
            .filter(|&i| {
                let (d, ii) = (self.density[i], i as isize);
                d > floor && d > at(ii - 1) && d >= at(ii + 1)
            })
            .map(|i| self.peak_at(i))
            .collect()
    }

    pub fn peak_at(&self, bin: usize) -> Peak {
        let n = self.density.len() as isize;
        let h = PEAK_HALF_WIDTH as isize;
        let sum: f64 = (-h..=h)
            .map(|o| self.density[(bin as isize + o).rem_euclid(n) as usize])
            .sum();
        Peak {
            frequency: self.frequencies[bin],
            height: self.density[bin],
            intensity: sum * self.resolution,
        }
    }
}

/// The largest time step that keeps every eigenvalue of `H` below the
/// Nyquist frequency, `pi / sum_j |c_j|`.
pub fn nyquist_dt(h: &PauliSum) -> f64 {
    PI / h.norm_bound()
}

/// Phases `theta_i` in `(-pi, pi]` with eigenvalues `e^{-i theta_i}` of the
/// network's unitary, ascending.
pub fn eigenphases(w: &GateNetwork) -> Result<Vec<f64>> {
    let schur = network_unitary(w)?.schur();
    let t = schur.unpack().1;
    let mut phases: Vec<f64> = t
        .diagonal()
        .iter()
        .map(|z| {
            let theta = -z.arg();
            if theta <= -PI {
                theta + TAU
            } else {
                theta
            }
        })
        .collect();
    phases.sort_by(f64::total_cmp);
    Ok(phases)
}

/// Closed form `f(t)` from a list of eigenvalues (or eigenphases).
pub fn f_exact(eigenvalues: &[f64], t: f64) -> C64 {
    let sum: C64 = eigenvalues
        .iter()
        .map(|l| C64::from_polar(1.0, -l * t))
        .sum();
    sum / (2.0 * eigenvalues.len() as f64)
}

fn x1_prep(m: usize) -> Result<(GateNetwork, f64)> {
    let c = synthesize_conjugation(
        &PauliString::single(m, 1, Pauli::Z)?,
        &PauliString::single(m, 1, Pauli::X)?,
    )?;
    Ok((c.network.clone(), c.sign_f64()))
}

/// Reads `f` from a state whose clean qubit started at `sign * X_1`.
fn read_f(
    state: &DensityState,
    t: f64,
    sign: f64,
    meter: &mut NoisyMeter,
    budget: &EstimationBudget,
) -> Result<TimeSample> {
    let m = state.num_qubits();
    let x = estimate_expectation(state, &PauliString::single(m, 1, Pauli::X)?, meter, budget)?;
    let y = estimate_expectation(state, &PauliString::single(m, 1, Pauli::Y)?, meter, budget)?;
    Ok(TimeSample {
        t,
        value: C64::new(sign * x.value, -sign * y.value) / 2.0,
        stderr: x.stderr.hypot(y.stderr) / 2.0,
    })
}

fn clean_x_state(m: usize) -> Result<(DensityState, f64)> {
    let (prep, sign) = x1_prep(m)?;
    Ok((DensityState::init_dqc1(m)?.apply_network(&prep)?, sign))
}

/// One sample of `f(t)` with `V(t)` compiled from `steps` Trotter steps per branch.
pub fn sample_f(
    h: &PauliSum,
    t: f64,
    steps: usize,
    meter: &mut NoisyMeter,
    budget: &EstimationBudget,
) -> Result<TimeSample> {
    let (mut state, sign) = clean_x_state(h.num_qubits() + 1)?;
    state.apply_network_mut(&conditional_half_evolutions(h, t, steps)?)?;
    read_f(&state, t, sign, meter, budget)
}

fn check_grid(dt: f64, npoints: usize) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "time step {dt} must be positive"
        )));
    }
    if npoints < 2 {
        return Err(Error::InvalidArgument(
            "need at least two time points".into(),
        ));
    }
    Ok(())
}

fn sample_powers(
    step: &GateNetwork,
    dt: f64,
    npoints: usize,
    meter: &mut NoisyMeter,
    budget: &EstimationBudget,
) -> Result<Vec<TimeSample>> {
    let (mut state, sign) = clean_x_state(step.num_qubits())?;
    let w = step.unitary()?;
    let mut out = Vec::with_capacity(npoints);
    for k in 0..npoints {
        if k > 0 {
            state = state.apply_unitary(&w)?;
        }
        out.push(read_f(&state, k as f64 * dt, sign, meter, budget)?);
    }
    Ok(out)
}

/// `f(k dt)` for `k = 0..npoints`, using `V(k dt) = V(dt)^k` with `V(dt)`
/// compiled from `steps_per_point` Trotter steps.
pub fn sample_f_grid(
    h: &PauliSum,
    dt: f64,
    npoints: usize,
    steps_per_point: usize,
    meter: &mut NoisyMeter,
    budget: &EstimationBudget,
) -> Result<Vec<TimeSample>> {
    check_grid(dt, npoints)?;
    sample_powers(
        &conditional_half_evolutions(h, dt, steps_per_point)?,
        dt,
        npoints,
        meter,
        budget,
    )
}

/// One sample of `2^{-(n+1)} tr W^k`, with `W^k` run on the control's 0
/// branch and the identity on its 1 branch.
pub fn sample_f_unitary(
    w: &GateNetwork,
    k: usize,
    meter: &mut NoisyMeter,
    budget: &EstimationBudget,
) -> Result<TimeSample> {
    let (mut state, sign) = clean_x_state(w.num_qubits() + 1)?;
    state.apply_network_mut(&conditional_u(&w.power(k), false))?;
    read_f(&state, k as f64, sign, meter, budget)
}

/// Samples for `k = 0..npoints`, on the time grid `t = k`.
pub fn sample_f_unitary_grid(
    w: &GateNetwork,
    npoints: usize,
    meter: &mut NoisyMeter,
    budget: &EstimationBudget,
) -> Result<Vec<TimeSample>> {
    check_grid(1.0, npoints)?;
    sample_powers(&conditional_u(w, false), 1.0, npoints, meter, budget)
}

/// Windowed discrete Fourier transform of samples on `t_k = k dt`.
///
/// The density is `Re F(omega)` with `F(omega) = sum_k c_k w_k f(t_k) e^{i omega t_k}`,
/// where `c_0 = 1/2` and `c_k = 1` otherwise, scaled by `2 / (N dw)` so that
/// the density sums to `Re f(0)`. Eigenvalues are recovered modulo `2 pi / dt`.
pub fn spectrum_fft(samples: &[TimeSample], window: Window) -> Result<SpectrumEstimate> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "need at least two time samples".into(),
        ));
    }
    let dt = samples[1].t - samples[0].t;
    check_grid(dt, n)?;
    for (k, s) in samples.iter().enumerate() {
        let want = k as f64 * dt;
        if (s.t - want).abs() > 1e-9 * want.abs().max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "sample {k} at t = {} is off the uniform grid",
                s.t
            )));
        }
    }
    let weights = window.weights(n);
    let mut buf: Vec<C64> = samples
        .iter()
        .zip(&weights)
        .map(|(s, w)| s.value * *w)
        .collect();
    buf[0] *= 0.5;
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let resolution = TAU / (n as f64 * dt);
    let scale = 2.0 / (n as f64 * resolution);
    let variance: f64 = samples
        .iter()
        .zip(&weights)
        .enumerate()
        .map(|(k, (s, w))| {
            let c = if k == 0 { 0.5 } else { 1.0 };
            (c * w * s.stderr).powi(2)
        })
        .sum();
    let half = n / 2;
    let order = (half + 1..n).chain(0..=half);
    let (frequencies, density) = order
        .map(|j| {
            let signed = if j > half {
                j as f64 - n as f64
            } else {
                j as f64
            };
            (signed * resolution, buf[j].re * scale)
        })
        .unzip();
    Ok(SpectrumEstimate {
        frequencies,
        density,
        resolution,
        window,
        dt,
        density_stderr: scale * variance.sqrt(),
    })
}
