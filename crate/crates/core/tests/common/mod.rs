//! Naive oracles shared by the integration tests.
//!
//! A configuration with `N` qubits is the same thing as two labellings of
//! the qubits: which photon carries each qubit and which block it belongs
//! to. Running both labellings over all set partitions of `N` items
//! produces every configuration (many times over), with no cleverness that
//! could hide a gap in the orderly generator.

#![allow(dead_code)]

use std::collections::HashMap;

use qmux::model::{canonical_form, CanonicalKey, MultiplexConfig};
use qmux::search::{Strategy, StrategyKind};

/// All set partitions of `n` items as restricted growth strings.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(pos: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        let limit = if pos == 0 { 0 } else { max + 1 };
        for v in 0..=limit {
            cur[pos] = v;
            rec(pos + 1, max.max(v), cur, out);
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    rec(0, 0, &mut vec![0; n], &mut out);
    out
}

fn part_sizes(rgs: &[usize]) -> Vec<usize> {
    let parts = rgs.iter().max().map_or(0, |m| m + 1);
    let mut sizes = vec![0; parts];
    for &x in rgs {
        sizes[x] += 1;
    }
    sizes
}

fn degrees_allowed(strategy: &Strategy, degrees: &[usize], qubits: usize) -> bool {
    if degrees.len() == 1 && qubits == 1 {
        return true;
    }
    match strategy.kind {
        StrategyKind::NonMultiplexed => degrees.iter().all(|&d| d == 1),
        StrategyKind::Pure { q } => degrees.iter().all(|&d| d == q),
        StrategyKind::Mixed { q_max } => {
            degrees.iter().all(|&d| d <= q_max)
                && degrees.iter().min() != degrees.iter().max()
        }
    }
}

/// Every configuration with `qubits` qubits admitted by `strategy`, one per
/// isomorphism class, keyed by canonical form.
pub fn naive_classes(
    qubits: usize,
    strategy: &Strategy,
    max_blocks: usize,
) -> HashMap<CanonicalKey, MultiplexConfig> {
    let partitions = set_partitions(qubits);
    let photon_labellings: Vec<&Vec<usize>> = partitions
        .iter()
        .filter(|rgs| degrees_allowed(strategy, &part_sizes(rgs), qubits))
        .collect();
    let mut classes = HashMap::new();
    for ph in &photon_labellings {
        let photons = ph.iter().max().unwrap() + 1;
        for bl in &partitions {
            let blocks = bl.iter().max().unwrap() + 1;
            if blocks > max_blocks {
                continue;
            }
            let mut matrix = vec![vec![0u8; blocks]; photons];
            for i in 0..qubits {
                matrix[ph[i]][bl[i]] += 1;
            }
            if !strategy.allow_same_block_duplicates && matrix.iter().flatten().any(|&m| m > 1) {
                continue;
            }
            if !strategy.allow_shared_block_pairs && has_shared_pair(&matrix) {
                continue;
            }
            let slots = matrix
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .flat_map(|(b, &m)| std::iter::repeat_n(b, m as usize))
                        .collect()
                })
                .collect();
            let config = MultiplexConfig::new(blocks, slots).unwrap();
            classes.entry(canonical_form(&config)).or_insert(config);
        }
    }
    classes
}

fn has_shared_pair(matrix: &[Vec<u8>]) -> bool {
    for a in 0..matrix.len() {
        for b in a + 1..matrix.len() {
            let shared = matrix[a]
                .iter()
                .zip(&matrix[b])
                .filter(|(x, y)| **x > 0 && **y > 0)
                .count();
            if shared >= 2 {
                return true;
            }
        }
    }
    false
}

/// Success probability straight from the definition: some block has every
/// qubit's photon, and no block has lost all of its photons.
pub fn brute_probability(config: &MultiplexConfig, p: f64) -> f64 {
    let n = config.total_photons();
    let blocks = config.num_blocks();
    let mut members = vec![Vec::new(); blocks];
    for (j, slots) in config.photon_slots().iter().enumerate() {
        for &b in slots {
            members[b].push(j);
        }
    }
    let mut total = 0.0;
    for s in 0u64..1 << n {
        let alive = |j: usize| s >> j & 1 == 1;
        let intact = members.iter().any(|m| m.iter().all(|&j| alive(j)));
        let empty = members.iter().any(|m| m.iter().all(|&j| !alive(j)));
        if intact && !empty {
            let k = s.count_ones() as i32;
            total += p.powi(k) * (1.0 - p).powi(n as i32 - k);
        }
    }
    total
}

/// Lexicographic cost of a configuration under a strategy's objective.
pub fn rank(strategy: &Strategy, photons: usize, qubits: usize) -> (usize, usize) {
    strategy.objective().rank(photons, qubits)
}
