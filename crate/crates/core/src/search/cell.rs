//! Exhaustive scan of one `(photons, qubits)` cell of the design space.

use std::collections::HashSet;
use std::ops::ControlFlow;

use rayon::prelude::*;

use super::incidence::{for_each_incidence, partitions_up_to, Shape};
use crate::evaluator::masks_success_probability;
use crate::model::canonical::canonical_from_incidence;
use crate::model::{CanonicalKey, SuccessMasks};

/// Which incidence matrices belong to the family being searched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Family {
    pub max_blocks: usize,
    pub max_entry: u8,
    pub rectangle_free: bool,
    /// Smallest admissible block size, in qubits.
    pub min_block: usize,
}

/// A degree sequence rule for the photons of one cell.
pub(crate) trait DegreeRule: Sync {
    fn sequences(&self, photons: usize, qubits: usize) -> Vec<Vec<usize>>;
}

/// Outcome of scanning one cell against a threshold.
#[derive(Debug, Clone)]
pub(crate) struct CellScan {
    /// Highest success probability seen, if the cell is non-empty.
    pub best_probability: Option<f64>,
    /// Among configurations meeting the threshold, the one with the smallest
    /// canonical key.
    pub witness: Option<CellWitness>,
}

#[derive(Debug, Clone)]
pub(crate) struct CellWitness {
    pub probability: f64,
    pub key: CanonicalKey,
    pub matrix: Vec<Vec<u8>>,
}

/// Visits every representative matrix of the cell. Order is deterministic.
pub(crate) fn for_each_in_cell<F>(
    photons: usize,
    qubits: usize,
    degrees: &dyn DegreeRule,
    family: &Family,
    mut visit: F,
) -> ControlFlow<()>
where
    F: FnMut(&[Vec<u8>]) -> ControlFlow<()>,
{
    let max_part = qubits.min(photons * family.max_entry as usize);
    for sizes in partitions_up_to(qubits, family.max_blocks, family.min_block.max(1), max_part) {
        for degs in degrees.sequences(photons, qubits) {
            let shape = Shape {
                sizes: sizes.clone(),
                degrees: degs,
                max_entry: family.max_entry,
                rectangle_free: family.rectangle_free,
            };
            for_each_incidence(&shape, &mut visit)?;
        }
    }
    ControlFlow::Continue(())
}

/// Scores every configuration of the cell in parallel batches.
pub(crate) fn scan_cell(
    photons: usize,
    qubits: usize,
    degrees: &dyn DegreeRule,
    family: &Family,
    p_t: f64,
    threshold: f64,
) -> CellScan {
    let mut scan = CellScan {
        best_probability: None,
        witness: None,
    };
    let mut batch: Vec<Vec<Vec<u8>>> = Vec::new();
    const BATCH: usize = 1 << 14;
    let flush = |batch: &mut Vec<Vec<Vec<u8>>>, scan: &mut CellScan| {
        let scored: Vec<f64> = batch
            .par_iter()
            .map(|m| masks_success_probability(&masks_of(m), p_t))
            .collect();
        for (m, p) in batch.drain(..).zip(scored) {
            if scan.best_probability.is_none_or(|b| p > b) {
                scan.best_probability = Some(p);
            }
            if p >= threshold {
                let key = canonical_from_incidence(&m, m[0].len());
                if scan.witness.as_ref().is_none_or(|w| key < w.key) {
                    scan.witness = Some(CellWitness {
                        probability: p,
                        key,
                        matrix: m,
                    });
                }
            }
        }
    };
    let _ = for_each_in_cell(photons, qubits, degrees, family, |m| {
        batch.push(m.to_vec());
        if batch.len() >= BATCH {
            flush(&mut batch, &mut scan);
        }
        ControlFlow::Continue(())
    });
    flush(&mut batch, &mut scan);
    scan
}

/// Distinct canonical classes of the cell, in first-seen order.
pub(crate) fn classes_in_cell(
    photons: usize,
    qubits: usize,
    degrees: &dyn DegreeRule,
    family: &Family,
) -> Vec<Vec<Vec<u8>>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let _ = for_each_in_cell(photons, qubits, degrees, family, |m| {
        if seen.insert(canonical_from_incidence(m, m[0].len())) {
            out.push(m.to_vec());
        }
        ControlFlow::Continue(())
    });
    out
}

pub(crate) fn masks_of(matrix: &[Vec<u8>]) -> SuccessMasks {
    let blocks = matrix.first().map_or(0, Vec::len);
    let mut masks = vec![0u64; blocks];
    for (j, row) in matrix.iter().enumerate() {
        for (b, &m) in row.iter().enumerate() {
            if m > 0 {
                masks[b] |= 1 << j;
            }
        }
    }
    SuccessMasks::from_parts(matrix.len(), masks)
}
