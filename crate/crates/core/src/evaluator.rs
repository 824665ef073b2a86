//! Success probability of multiplexed parity codes.
//!
//! Three routes are provided: the closed form for balanced codes with one
//! qubit per photon, exact enumeration of every survivor pattern (which also
//! yields the per-loss-count failure classes), and a seeded Monte-Carlo
//! estimate that serves as an independent stochastic check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{MultiplexConfig, Outcome, SuccessMasks};

/// Default cap on photons for exhaustive enumeration (2^26 patterns).
pub const DEFAULT_ENUMERATION_LIMIT: usize = 26;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    ClosedForm,
    ExactEnumeration,
    MonteCarlo { trials: u64, std_err: f64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityResult {
    pub value: f64,
    pub method: Method,
}

impl ProbabilityResult {
    pub fn std_err(&self) -> Option<f64> {
        match self.method {
            Method::MonteCarlo { std_err, .. } => Some(std_err),
            _ => None,
        }
    }
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::contract(format!("{name} must lie in [0, 1], got {p}")));
    }
    Ok(())
}

/// `[1-(1-p)^m]^n - [1-p^m-(1-p)^m]^n` for `n` blocks of `m` single-qubit
/// photons.
pub fn parity_closed_form(n: usize, m: usize, p_t: f64) -> Result<f64> {
    if n == 0 || m == 0 {
        return Err(Error::contract("block count and block size must be at least 1"));
    }
    check_probability("p_t", p_t)?;
    let lost_all = (1.0 - p_t).powi(m as i32);
    let arrived_all = p_t.powi(m as i32);
    let nonempty = (1.0 - lost_all).powi(n as i32);
    let nonempty_damaged = (1.0 - arrived_all - lost_all).max(0.0).powi(n as i32);
    Ok((nonempty - nonempty_damaged).clamp(0.0, 1.0))
}

/// Loss events with exactly `i` photons lost, split by outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LossClassCounts {
    pub successes: u64,
    /// No block empty, but none intact.
    pub no_intact: u64,
    /// At least one block empty.
    pub empty: u64,
}

impl LossClassCounts {
    pub fn total(&self) -> u64 {
        self.successes + self.no_intact + self.empty
    }
}

/// Success and failure counts for every number of lost photons.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuccessPolynomial {
    total_photons: usize,
    per_loss: Vec<LossClassCounts>,
}

impl SuccessPolynomial {
    /// Builds from raw counts, checking that each loss count partitions
    /// `C(total_photons, i)` events.
    pub fn from_counts(total_photons: usize, per_loss: Vec<LossClassCounts>) -> Result<Self> {
        if per_loss.len() != total_photons + 1 {
            return Err(Error::contract(format!(
                "expected {} loss classes, got {}",
                total_photons + 1,
                per_loss.len()
            )));
        }
        for (i, c) in per_loss.iter().enumerate() {
            let expect = binomial(total_photons, i)?;
            if c.total() != expect {
                return Err(Error::contract(format!(
                    "loss count {i}: classes sum to {}, expected C({total_photons},{i}) = {expect}",
                    c.total()
                )));
            }
        }
        Ok(Self {
            total_photons,
            per_loss,
        })
    }

    pub fn total_photons(&self) -> usize {
        self.total_photons
    }

    /// Entry `i` counts the events that lose exactly `i` photons.
    pub fn per_loss_counts(&self) -> &[LossClassCounts] {
        &self.per_loss
    }

    /// Largest loss count with at least one successful event.
    pub fn max_tolerated_losses(&self) -> Option<usize> {
        self.per_loss.iter().rposition(|c| c.successes > 0)
    }

    /// `sum_i successes_i p^(n-i) (1-p)^i`, summed with Neumaier compensation.
    pub fn evaluate(&self, p_t: f64) -> Result<f64> {
        check_probability("p_t", p_t)?;
        let successes: Vec<u64> = self.per_loss.iter().map(|c| c.successes).collect();
        Ok(weighted_successes(&successes, p_t))
    }
}

/// Probability mass of the successful events, given their counts indexed by
/// number of lost photons. Every exact route goes through here so that equal
/// counts give bit-identical probabilities.
pub(crate) fn weighted_successes(successes_by_loss: &[u64], p_t: f64) -> f64 {
    let n = successes_by_loss.len() - 1;
    let mut sum = CompensatedSum::default();
    for (i, &c) in successes_by_loss.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let w = p_t.powi((n - i) as i32) * (1.0 - p_t).powi(i as i32);
        sum.add(c as f64 * w);
    }
    sum.value().clamp(0.0, 1.0)
}

#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Binomial coefficient in 64-bit arithmetic; overflow is an error.
pub fn binomial(n: usize, k: usize) -> Result<u64> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return Err(Error::Capacity {
                what: "binomial coefficient bits",
                actual: 65,
                limit: 64,
            });
        }
    }
    Ok(acc as u64)
}

fn check_enumerable(config: &MultiplexConfig, limit: usize) -> Result<()> {
    if config.total_photons() > limit {
        return Err(Error::Capacity {
            what: "photon count for exact enumeration",
            actual: config.total_photons(),
            limit,
        });
    }
    Ok(())
}

pub fn success_polynomial(config: &MultiplexConfig) -> Result<SuccessPolynomial> {
    success_polynomial_with_limit(config, DEFAULT_ENUMERATION_LIMIT)
}

/// Classifies all `2^n` survivor patterns. Large instances are split into
/// chunks evaluated in parallel; integer sums keep the result independent of
/// scheduling.
pub fn success_polynomial_with_limit(
    config: &MultiplexConfig,
    limit: usize,
) -> Result<SuccessPolynomial> {
    check_enumerable(config, limit)?;
    let masks = SuccessMasks::from_config(config)?;
    let n = config.total_photons();
    let patterns = 1u64 << n;
    const CHUNK: u64 = 1 << 14;
    let tally = |lo: u64, hi: u64| {
        let mut acc = vec![LossClassCounts::default(); n + 1];
        for s in lo..hi {
            let lost = n - s.count_ones() as usize;
            let c = &mut acc[lost];
            match masks.classify(s) {
                Outcome::Success => c.successes += 1,
                Outcome::NoIntactBlock => c.no_intact += 1,
                Outcome::EmptyBlock => c.empty += 1,
            }
        }
        acc
    };
    let merge = |mut a: Vec<LossClassCounts>, b: Vec<LossClassCounts>| {
        for (x, y) in a.iter_mut().zip(b) {
            x.successes += y.successes;
            x.no_intact += y.no_intact;
            x.empty += y.empty;
        }
        a
    };
    let per_loss = if patterns <= CHUNK {
        tally(0, patterns)
    } else {
        (0..patterns / CHUNK)
            .into_par_iter()
            .map(|c| tally(c * CHUNK, (c + 1) * CHUNK))
            .reduce(|| vec![LossClassCounts::default(); n + 1], merge)
    };
    SuccessPolynomial::from_counts(n, per_loss)
}

pub fn exact_success_probability(config: &MultiplexConfig, p_t: f64) -> Result<ProbabilityResult> {
    check_probability("p_t", p_t)?;
    let value = success_polynomial(config)?.evaluate(p_t)?;
    Ok(ProbabilityResult {
        value,
        method: Method::ExactEnumeration,
    })
}

/// Success probability straight from block masks, without building the
/// polynomial. Used by the searches, where only one `p_t` matters.
pub(crate) fn masks_success_probability(masks: &SuccessMasks, p_t: f64) -> f64 {
    let n = masks.width();
    let mut by_loss = vec![0u64; n + 1];
    for s in 0..1u64 << n {
        if masks.classify(s) == Outcome::Success {
            by_loss[n - s.count_ones() as usize] += 1;
        }
    }
    weighted_successes(&by_loss, p_t)
}

/// Seeded Monte-Carlo estimate.
///
/// Trial `t` draws photon survivals from a ChaCha8 stream keyed by
/// `(seed, stream = t)`; photon `j` consumes the `j`-th 64-bit word. Each
/// trial is therefore a pure function of `(seed, t)`, and the success count
/// is the same however the trials are split across threads.
pub fn mc_success_probability(
    config: &MultiplexConfig,
    p_t: f64,
    trials: u64,
    seed: u64,
) -> Result<ProbabilityResult> {
    check_probability("p_t", p_t)?;
    if trials == 0 {
        return Err(Error::contract("trials must be at least 1"));
    }
    let masks = SuccessMasks::from_config(config)?;
    let n = config.total_photons();
    let successes: u64 = (0..trials)
        .into_par_iter()
        .map_init(
            || ChaCha8Rng::seed_from_u64(seed),
            |rng, t| {
                rng.set_stream(t);
                rng.set_word_pos(0);
                let mut survivors = 0u64;
                for j in 0..n {
                    if rng.gen::<f64>() < p_t {
                        survivors |= 1 << j;
                    }
                }
                u64::from(masks.classify(survivors) == Outcome::Success)
            },
        )
        .sum();
    let value = successes as f64 / trials as f64;
    let std_err = (value * (1.0 - value) / trials as f64).sqrt();
    Ok(ProbabilityResult {
        value,
        method: Method::MonteCarlo {
            trials,
            std_err,
            seed,
        },
    })
}
