//! Noisy readout of `<Z_1>` and the repetition schedule that turns it into an
//! `(epsilon, p)` estimate.
//!
//! Randomness comes from ChaCha20 keyed by the meter seed, with the meter's
//! stream id as the ChaCha stream. Every draw or block of draws owns a
//! 2^32-word window of that stream (its "slot"), addressed by a counter, so a
//! sample stream depends only on `(seed, stream, slot)` and never on the order
//! in which parallel work completes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};
use crate::state::DensityState;

/// Constant in the block count `ceil(C1 * ln(1/p))`.
pub const BLOCK_FACTOR: f64 = 8.0;
/// Constant in the block size `ceil(C2 * max(1, s) / epsilon^2)`.
pub const BLOCK_SIZE_FACTOR: f64 = 4.0;

const SLOT_BITS: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeterMode {
    /// Two-outcome readout: `+1` with probability `(1 + mu) / 2`.
    Projective,
    /// `mu` plus centred Gaussian noise of variance `s`.
    Gaussian,
}

impl std::str::FromStr for MeterMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "projective" => Ok(MeterMode::Projective),
            "gaussian" => Ok(MeterMode::Gaussian),
            other => Err(Error::InvalidArgument(format!(
                "unknown meter mode '{other}'"
            ))),
        }
    }
}

/// A bounded-variance process whose samples have mean `tr(Z_1 rho)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyMeter {
    mode: MeterMode,
    variance: f64,
    seed: u64,
    stream: u64,
    next_slot: u64,
}

impl NoisyMeter {
    pub fn projective(seed: u64) -> Self {
        NoisyMeter {
            mode: MeterMode::Projective,
            variance: 1.0,
            seed,
            stream: 0,
            next_slot: 0,
        }
    }

    pub fn gaussian(variance: f64, seed: u64) -> Result<Self> {
        if !(variance >= 0.0 && variance.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "noise variance {variance} must be finite and >= 0"
            )));
        }
        Ok(NoisyMeter {
            mode: MeterMode::Gaussian,
            variance,
            seed,
            stream: 0,
            next_slot: 0,
        })
    }

    pub fn new(mode: MeterMode, variance: f64, seed: u64) -> Result<Self> {
        match mode {
            MeterMode::Projective => Ok(Self::projective(seed)),
            MeterMode::Gaussian => Self::gaussian(variance, seed),
        }
    }

    /// Same configuration on an independent stream.
    pub fn substream(&self, stream: u64) -> Self {
        NoisyMeter {
            stream,
            next_slot: 0,
            ..self.clone()
        }
    }

    pub fn mode(&self) -> MeterMode {
        self.mode
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Variance bound `max(1, s)` that the repetition schedule uses.
    pub fn variance_bound(&self) -> f64 {
        match self.mode {
            MeterMode::Projective => 1.0,
            MeterMode::Gaussian => self.variance.max(1.0),
        }
    }

    fn take_slots(&mut self, count: u64) -> u64 {
        let first = self.next_slot;
        self.next_slot += count;
        first
    }

    fn rng_for(&self, slot: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng.set_word_pos((slot as u128) << SLOT_BITS);
        rng
    }

    fn draw<R: Rng>(&self, mean: f64, rng: &mut R) -> f64 {
        match self.mode {
            MeterMode::Projective => {
                let up = ((1.0 + mean) / 2.0).clamp(0.0, 1.0);
                if rng.random::<f64>() < up {
                    1.0
                } else {
                    -1.0
                }
            }
            MeterMode::Gaussian => {
                if self.variance == 0.0 {
                    mean
                } else {
                    let z: f64 = rng.sample(StandardNormal);
                    mean + self.variance.sqrt() * z
                }
            }
        }
    }

    /// One sample from a process with the given mean.
    pub fn sample_mean(&mut self, mean: f64) -> f64 {
        let slot = self.take_slots(1);
        let mut rng = self.rng_for(slot);
        self.draw(mean, &mut rng)
    }

    /// One readout of `<Z_1>` on `state`.
    pub fn sample(&mut self, state: &DensityState) -> Result<f64> {
        Ok(self.sample_mean(z1_expectation(state)?))
    }

    /// `count` raw samples drawn from one slot.
    pub fn sample_many(&mut self, mean: f64, count: usize) -> Vec<f64> {
        let slot = self.take_slots(1);
        let mut rng = self.rng_for(slot);
        (0..count).map(|_| self.draw(mean, &mut rng)).collect()
    }

    /// Mean of `size` samples, drawn from its own slot.
    ///
    /// For projective readout the count of `+1` outcomes is drawn directly
    /// from its binomial law, and for Gaussian readout the block mean is
    /// drawn from its normal law; both match the distribution of the
    /// explicit per-shot average.
    fn block_mean(&self, mean: f64, size: u64, slot: u64) -> f64 {
        let mut rng = self.rng_for(slot);
        match self.mode {
            MeterMode::Projective => {
                let up = ((1.0 + mean) / 2.0).clamp(0.0, 1.0);
                let ups = Binomial::new(size, up)
                    .expect("probability in [0, 1]")
                    .sample(&mut rng) as f64;
                (2.0 * ups - size as f64) / size as f64
            }
            MeterMode::Gaussian => {
                if self.variance == 0.0 {
                    mean
                } else {
                    let z: f64 = rng.sample(StandardNormal);
                    mean + (self.variance / size as f64).sqrt() * z
                }
            }
        }
    }
}

fn z1_expectation(state: &DensityState) -> Result<f64> {
    let z1 = PauliString::single(state.num_qubits(), 1, Pauli::Z)?;
    state.expectation(&z1)
}

/// Target accuracy `epsilon` and failure probability `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimationBudget {
    pub epsilon: f64,
    pub p: f64,
}

impl EstimationBudget {
    pub fn new(epsilon: f64, p: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon {epsilon} not in (0, 1)"
            )));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "failure probability {p} not in (0, 1)"
            )));
        }
        Ok(EstimationBudget { epsilon, p })
    }

    /// Number of median-of-means blocks, `ceil(8 ln(1/p))`.
    pub fn blocks(&self) -> u64 {
        ((BLOCK_FACTOR * (1.0 / self.p).ln()).ceil() as u64).max(1)
    }

    /// Samples per block, `ceil(4 max(1, s) / epsilon^2)`.
    pub fn block_size(&self, variance_bound: f64) -> u64 {
        ((BLOCK_SIZE_FACTOR * variance_bound.max(1.0) / (self.epsilon * self.epsilon)).ceil()
            as u64)
            .max(1)
    }

    /// Total repetitions `R`.
    pub fn repetitions(&self, variance_bound: f64) -> u64 {
        self.blocks() * self.block_size(variance_bound)
    }
}

/// A sampled value with its standard error and the number of shots spent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub shots: u64,
}

/// Median-of-means estimate of the readout mean `mean`.
///
/// Each block mean misses by more than `epsilon` with probability at most
/// 1/4 (Chebyshev), so the median of `ceil(8 ln(1/p))` blocks misses with
/// probability at most `exp(-blocks/8) <= p`.
pub fn estimate_mean_value(
    mean: f64,
    meter: &mut NoisyMeter,
    budget: &EstimationBudget,
) -> Estimate {
    let blocks = budget.blocks();
    let size = budget.block_size(meter.variance_bound());
    let first = meter.take_slots(blocks);
    let m = &*meter;
    let mut means: Vec<f64> = (0..blocks)
        .into_par_iter()
        .map(|b| m.block_mean(mean, size, first + b))
        .collect();
    let avg = means.iter().sum::<f64>() / blocks as f64;
    let stderr = if blocks > 1 {
        let var = means.iter().map(|x| (x - avg).powi(2)).sum::<f64>() / (blocks - 1) as f64;
        // asymptotic standard error of a median of normal block means
        (FRAC_PI_2 * var / blocks as f64).sqrt()
    } else {
        (meter.variance_bound() / size as f64).sqrt()
    };
    means.sort_by(f64::total_cmp);
    let mid = means.len() / 2;
    let value = if means.len() % 2 == 1 {
        means[mid]
    } else {
        0.5 * (means[mid - 1] + means[mid])
    };
    Estimate {
        value,
        stderr,
        shots: blocks * size,
    }
}

/// Runs `run` once to obtain the final state (the exact simulator is
/// deterministic, so every repetition yields the same state) and estimates
/// `<Z_1>` on it.
pub fn estimate_mean<F>(
    run: F,
    meter: &mut NoisyMeter,
    budget: &EstimationBudget,
) -> Result<Estimate>
where
    F: FnOnce() -> Result<DensityState>,
{
    let state = run()?;
    Ok(estimate_mean_value(z1_expectation(&state)?, meter, budget))
}
