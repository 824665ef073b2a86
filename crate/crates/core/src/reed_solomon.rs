//! Loss tolerance of the quantum Reed-Solomon code `[[d, 2k-d, d-k+1]]_d`
//! when each qudit is spread over multiplexed photons.
//!
//! A qudit of dimension `d` needs `ceil(log2 d)` qubits. With `q` qubits per
//! photon it occupies `L = ceil(log2(d) / q)` photons and survives only if
//! all of them arrive, so qudits are lost independently with probability
//! `1 - p_t^L`. The code fails once more than `d - k` qudits are lost.
//!
//! Existence of a genuine Reed-Solomon code needs `d` to be a prime power;
//! the counting here treats every `d >= 2` alike.

use crate::error::{Error, Result};
use crate::evaluator::CompensatedSum;
use crate::search::{ResourcePoint, Witness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RSCodeParams {
    d: usize,
    k: usize,
    q: usize,
}

impl RSCodeParams {
    pub fn new(d: usize, k: usize, q: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::contract(format!("qudit count d must be at least 2, got {d}")));
        }
        if q == 0 {
            return Err(Error::contract("multiplexing degree q must be at least 1"));
        }
        if k > d || 2 * k <= d {
            return Err(Error::contract(format!(
                "k must satisfy ceil((d+1)/2) <= k <= d, got d={d}, k={k}"
            )));
        }
        Ok(Self { d, k, q })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Logical qudits carried, `2k - d`.
    pub fn payload(&self) -> usize {
        2 * self.k - self.d
    }

    /// Qudit losses the code corrects, `d - k`.
    pub fn tolerated_losses(&self) -> usize {
        self.d - self.k
    }

    pub fn resources(&self) -> RSResources {
        resources_unchecked(self.d, self.q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RSResources {
    pub qubits_total: usize,
    pub photons_total: usize,
    pub photons_per_qudit: usize,
}

/// `ceil(log2 n)` for `n >= 1`.
pub fn ceil_log2(n: usize) -> usize {
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

fn resources_unchecked(d: usize, q: usize) -> RSResources {
    let bits = ceil_log2(d);
    let per_qudit = bits.div_ceil(q);
    RSResources {
        qubits_total: d * bits,
        photons_total: d * per_qudit,
        photons_per_qudit: per_qudit,
    }
}

pub fn rs_resources(d: usize, q: usize) -> Result<RSResources> {
    if d < 2 || q == 0 {
        return Err(Error::contract(format!(
            "need d >= 2 and q >= 1, got d={d}, q={q}"
        )));
    }
    Ok(resources_unchecked(d, q))
}

fn check_p(p_t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p_t) {
        return Err(Error::contract(format!("p_t must lie in [0, 1], got {p_t}")));
    }
    Ok(())
}

/// Binomial terms `C(d,j) (1-s)^j s^(d-j)` for `j = 0..=d`, `s` the qudit
/// survival probability.
fn qudit_loss_terms(d: usize, survive: f64) -> Vec<f64> {
    let lost = 1.0 - survive;
    let mut choose = 1.0f64;
    (0..=d)
        .map(|j| {
            if j > 0 {
                choose = choose * (d - j + 1) as f64 / j as f64;
            }
            choose * lost.powi(j as i32) * survive.powi((d - j) as i32)
        })
        .collect()
}

/// Probability that more than `d - k` of the `d` qudits are lost.
pub fn rs_failure_probability(params: &RSCodeParams, p_t: f64) -> Result<f64> {
    check_p(p_t)?;
    let survive = p_t.powi(params.resources().photons_per_qudit as i32);
    let terms = qudit_loss_terms(params.d, survive);
    let mut sum = CompensatedSum::default();
    for &t in &terms[params.tolerated_losses() + 1..] {
        sum.add(t);
    }
    Ok(sum.value().clamp(0.0, 1.0))
}

/// `1 - P(at most d-k qudits lost)`: the same quantity from the other tail.
pub fn rs_failure_probability_complement(params: &RSCodeParams, p_t: f64) -> Result<f64> {
    check_p(p_t)?;
    let survive = p_t.powi(params.resources().photons_per_qudit as i32);
    let terms = qudit_loss_terms(params.d, survive);
    let mut sum = CompensatedSum::default();
    for &t in &terms[..=params.tolerated_losses()] {
        sum.add(t);
    }
    Ok((1.0 - sum.value()).clamp(0.0, 1.0))
}

/// Cheapest code reaching `1 - P_fail >= threshold` with `d <= d_max`.
///
/// Candidates are ranked by total qubits, then photons, then `d`; for a given
/// `d` the largest qualifying `k` (largest payload) is reported.
pub fn rs_min_resources(
    p_t: f64,
    q: usize,
    threshold: f64,
    d_max: usize,
) -> Result<Option<ResourcePoint>> {
    check_p(p_t)?;
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::contract(format!("threshold must lie in (0, 1), got {threshold}")));
    }
    if q == 0 || d_max < 2 {
        return Err(Error::contract("need q >= 1 and d_max >= 2"));
    }
    let mut best: Option<(usize, usize, usize, RSCodeParams, f64)> = None;
    for d in 2..=d_max {
        let res = resources_unchecked(d, q);
        let rank = (res.qubits_total, res.photons_total, d);
        if best.as_ref().is_some_and(|b| (b.0, b.1, b.2) <= rank) {
            continue;
        }
        // P_fail grows with k, so scan downwards from the largest payload.
        for k in (d / 2 + 1..=d).rev() {
            let params = RSCodeParams::new(d, k, q)?;
            let success = 1.0 - rs_failure_probability(&params, p_t)?;
            if success >= threshold {
                best = Some((rank.0, rank.1, rank.2, params, success));
                break;
            }
        }
    }
    Ok(best.map(|(qubits, photons, _, params, success)| ResourcePoint {
        p_t,
        threshold,
        qubits_min: qubits,
        photons_min: photons,
        witness: Witness::ReedSolomon(params),
        achieved_probability: success,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn params_validation() {
        assert!(RSCodeParams::new(1, 1, 1).is_err());
        assert!(RSCodeParams::new(4, 2, 1).is_err());
        assert!(RSCodeParams::new(4, 5, 1).is_err());
        assert!(RSCodeParams::new(4, 3, 0).is_err());
        let p = RSCodeParams::new(11, 6, 4).unwrap();
        assert_eq!((p.payload(), p.tolerated_losses()), (1, 5));
    }

    #[test]
    fn ceil_log2_values() {
        let got: Vec<usize> = [1, 2, 3, 4, 5, 8, 9, 11, 16, 17].iter().map(|&n| ceil_log2(n)).collect();
        assert_eq!(got, vec![0, 1, 2, 2, 3, 3, 4, 4, 4, 5]);
    }

    #[test]
    fn resources_examples() {
        let r = rs_resources(2, 1).unwrap();
        assert_eq!((r.qubits_total, r.photons_total), (2, 2));
        let r = rs_resources(11, 4).unwrap();
        assert_eq!((r.qubits_total, r.photons_total, r.photons_per_qudit), (44, 11, 1));
        let r = rs_resources(16, 2).unwrap();
        assert_eq!((r.qubits_total, r.photons_total), (64, 32));
        assert!(rs_resources(1, 1).is_err());
        assert!(rs_resources(4, 0).is_err());
    }

    #[test]
    fn two_qudit_code_fails_unless_both_arrive() {
        let params = RSCodeParams::new(2, 2, 1).unwrap();
        for p in [0.0, 0.3, 0.85, 0.99, 1.0] {
            let f = rs_failure_probability(&params, p).unwrap();
            assert!((f - (1.0 - p * p)).abs() < 1e-15, "p={p}");
        }
    }

    #[test]
    fn lossless_channel_never_fails() {
        for (d, k, q) in [(2, 2, 1), (11, 6, 4), (64, 40, 3)] {
            let params = RSCodeParams::new(d, k, q).unwrap();
            assert_eq!(rs_failure_probability(&params, 1.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn eleven_qudit_point() {
        let params = RSCodeParams::new(11, 6, 4).unwrap();
        let f = rs_failure_probability(&params, 0.85).unwrap();
        assert!((f - 0.002_656_863_580).abs() < 1e-12, "{f}");
    }

    #[test]
    fn eleven_qudit_point_against_sampling() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let trials = 2_000_000u32;
        let failures = (0..trials)
            .filter(|_| (0..11).filter(|_| rng.gen::<f64>() >= 0.85).count() > 5)
            .count() as f64;
        let est = failures / trials as f64;
        let se = (est * (1.0 - est) / trials as f64).sqrt();
        let exact = rs_failure_probability(&RSCodeParams::new(11, 6, 4).unwrap(), 0.85).unwrap();
        assert!((est - exact).abs() <= 4.0 * se, "{est} vs {exact} (se {se})");
    }

    #[test]
    fn min_resources_examples() {
        let lossless = rs_min_resources(1.0, 1, 0.995, 64).unwrap().unwrap();
        assert_eq!((lossless.qubits_min, lossless.photons_min), (2, 2));
        assert_eq!(lossless.witness, Witness::ReedSolomon(RSCodeParams::new(2, 2, 1).unwrap()));

        let q4 = rs_min_resources(0.85, 4, 0.995, 64).unwrap().unwrap();
        assert_eq!((q4.qubits_min, q4.photons_min), (44, 11));
        assert_eq!(q4.witness, Witness::ReedSolomon(RSCodeParams::new(11, 6, 4).unwrap()));
        assert!(q4.achieved_probability >= 0.995);

        assert!(rs_min_resources(0.85, 1, 0.995, 64).unwrap().is_none());
    }

    #[test]
    fn min_resources_rejects_bad_arguments() {
        assert!(rs_min_resources(0.9, 1, 1.0, 64).is_err());
        assert!(rs_min_resources(0.9, 1, 0.0, 64).is_err());
        assert!(rs_min_resources(0.9, 0, 0.5, 64).is_err());
        assert!(rs_min_resources(0.9, 1, 0.5, 1).is_err());
        assert!(rs_min_resources(1.2, 1, 0.5, 8).is_err());
    }

    fn arb_params() -> impl Strategy<Value = RSCodeParams> {
        (2usize..=40, 1usize..=6).prop_flat_map(|(d, q)| {
            (d / 2 + 1..=d).prop_map(move |k| RSCodeParams::new(d, k, q).unwrap())
        })
    }

    proptest! {
        #[test]
        fn failure_nonincreasing_in_transmission(params in arb_params()) {
            let mut last = 1.0;
            for i in 0..=200 {
                let f = rs_failure_probability(&params, i as f64 / 200.0).unwrap();
                prop_assert!(f <= last + 1e-12);
                last = f;
            }
        }

        #[test]
        fn failure_nondecreasing_in_k(d in 2usize..=40, q in 1usize..=6, p in 0.0f64..=1.0) {
            let mut last = 0.0;
            for k in d / 2 + 1..=d {
                let f = rs_failure_probability(&RSCodeParams::new(d, k, q).unwrap(), p).unwrap();
                prop_assert!(f >= last - 1e-12);
                last = f;
            }
        }

        #[test]
        fn multiplexing_plateau(params in arb_params(), extra in 0usize..4, p in 0.0f64..=1.0) {
            let bits = ceil_log2(params.d());
            let at = RSCodeParams::new(params.d(), params.k(), bits).unwrap();
            let beyond = RSCodeParams::new(params.d(), params.k(), bits + extra).unwrap();
            prop_assert_eq!(
                rs_failure_probability(&at, p).unwrap(),
                rs_failure_probability(&beyond, p).unwrap()
            );
        }

        #[test]
        fn both_tails_agree(params in arb_params(), p in 0.0f64..=1.0) {
            let a = rs_failure_probability(&params, p).unwrap();
            let b = rs_failure_probability_complement(&params, p).unwrap();
            prop_assert!((a - b).abs() <= 1e-12, "{} vs {}", a, b);
        }
    }
}
