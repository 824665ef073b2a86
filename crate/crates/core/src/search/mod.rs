//! Minimum-resource search over multiplexed parity-code configurations.
//!
//! The design space is organised in cells of fixed photon and qubit totals.
//! Each cell is scanned exhaustively: block sizes run over integer
//! partitions of the qubit total, photon degrees over the partitions the
//! strategy allows, and incidence matrices are generated in doubly lexical
//! order (see [`incidence`]). Cells are visited in objective order, so the
//! first cell holding a configuration that meets the threshold is optimal.
//!
//! One exact prune is applied: a block touching `s` photons is emptied with
//! probability `(1-p_t)^s`, which bounds the success probability from above.
//! Block sizes too small to clear the threshold are never generated.

pub(crate) mod cell;
pub(crate) mod incidence;

use std::collections::HashSet;
use std::fmt;

use cell::{classes_in_cell, scan_cell, DegreeRule, Family};

use crate::error::{Error, Result};
use crate::evaluator::DEFAULT_ENUMERATION_LIMIT;
use crate::model::canonical::canonical_from_incidence;
use crate::model::{MultiplexConfig, MAX_PATTERN_WIDTH};
use crate::reed_solomon::RSCodeParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    /// One qubit per photon.
    NonMultiplexed,
    /// Every photon carries exactly `q` qubits.
    Pure { q: usize },
    /// Photons carry between 1 and `q_max` qubits, with at least two
    /// different degrees in use.
    Mixed { q_max: usize },
}

/// A family of configurations to search.
///
/// Every strategy also admits the single bare photon (one photon, one qubit,
/// one block), which is what "no code at all" looks like.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Strategy {
    pub kind: StrategyKind,
    /// Let one photon carry two qubits of the same block.
    pub allow_same_block_duplicates: bool,
    /// Let two photons both carry qubits of the same two blocks. Off by
    /// default, so any two photons overlap in at most one block. Allowing it
    /// can lower optima: pure `q = 2` at `p_t = 0.916` drops from 11 to 10
    /// photons.
    pub allow_shared_block_pairs: bool,
    /// For `Pure { q }` with a qubit total that is not a multiple of `q`,
    /// admit one photon carrying the remainder.
    pub allow_pure_remainder: bool,
}

impl Strategy {
    fn with_kind(kind: StrategyKind) -> Self {
        Self {
            kind,
            allow_same_block_duplicates: false,
            allow_shared_block_pairs: false,
            allow_pure_remainder: false,
        }
    }

    pub fn non_multiplexed() -> Self {
        Self::with_kind(StrategyKind::NonMultiplexed)
    }

    pub fn pure(q: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::contract(format!("pure strategy needs q >= 2, got {q}")));
        }
        Ok(Self::with_kind(StrategyKind::Pure { q }))
    }

    pub fn mixed(q_max: usize) -> Result<Self> {
        if q_max < 2 {
            return Err(Error::contract(format!("mixed strategy needs q_max >= 2, got {q_max}")));
        }
        Ok(Self::with_kind(StrategyKind::Mixed { q_max }))
    }

    /// `1` for non-multiplexed, otherwise `pure(q)`.
    pub fn from_q(q: usize) -> Result<Self> {
        if q == 1 {
            Ok(Self::non_multiplexed())
        } else {
            Self::pure(q)
        }
    }

    pub fn duplicates(mut self, allow: bool) -> Self {
        self.allow_same_block_duplicates = allow;
        self
    }

    pub fn shared_block_pairs(mut self, allow: bool) -> Self {
        self.allow_shared_block_pairs = allow;
        self
    }

    pub fn pure_remainder(mut self, allow: bool) -> Self {
        self.allow_pure_remainder = allow;
        self
    }

    pub fn objective(&self) -> Objective {
        match self.kind {
            StrategyKind::NonMultiplexed => Objective::QubitsThenPhotons,
            _ => Objective::PhotonsThenQubits,
        }
    }

    pub fn max_degree(&self) -> usize {
        match self.kind {
            StrategyKind::NonMultiplexed => 1,
            StrategyKind::Pure { q } => q,
            StrategyKind::Mixed { q_max } => q_max,
        }
    }

    /// Short label used in tables and CSV output, e.g. `1q/p`, `3q/p`, `mixed<=4`.
    pub fn label(&self) -> String {
        match self.kind {
            StrategyKind::NonMultiplexed => "1q/p".into(),
            StrategyKind::Pure { q } => format!("{q}q/p"),
            StrategyKind::Mixed { q_max } => format!("mixed<={q_max}"),
        }
    }

    /// Qubit totals this strategy can realise with `photons` photons.
    fn qubit_range(&self, photons: usize) -> std::ops::RangeInclusive<usize> {
        match self.kind {
            StrategyKind::NonMultiplexed => photons..=photons,
            StrategyKind::Pure { q } if self.allow_pure_remainder => {
                (q * photons).saturating_sub(q - 1).max(photons)..=q * photons
            }
            StrategyKind::Pure { q } => q * photons..=q * photons,
            StrategyKind::Mixed { q_max } => photons..=q_max * photons,
        }
    }

    fn degree_sequences(&self, photons: usize, qubits: usize) -> Vec<Vec<usize>> {
        if photons == 1 && qubits == 1 {
            return vec![vec![1]];
        }
        match self.kind {
            StrategyKind::NonMultiplexed => {
                if photons == qubits {
                    vec![vec![1; photons]]
                } else {
                    vec![]
                }
            }
            StrategyKind::Pure { q } => {
                if photons == 0 {
                    return vec![];
                }
                let rem = qubits.checked_sub(q * (photons - 1));
                match rem {
                    Some(r) if r == q => vec![vec![q; photons]],
                    Some(r) if self.allow_pure_remainder && (1..q).contains(&r) => {
                        let mut d = vec![q; photons - 1];
                        d.push(r);
                        vec![d]
                    }
                    _ => vec![],
                }
            }
            StrategyKind::Mixed { q_max } => {
                incidence::partitions_exact(qubits, photons, 1, q_max)
                    .into_iter()
                    .filter(|d| d.first() != d.last())
                    .collect()
            }
        }
    }
}

impl DegreeRule for Strategy {
    fn sequences(&self, photons: usize, qubits: usize) -> Vec<Vec<usize>> {
        self.degree_sequences(photons, qubits)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Lexicographic order in which candidate resources are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    QubitsThenPhotons,
    PhotonsThenQubits,
}

impl Objective {
    pub fn rank(&self, photons: usize, qubits: usize) -> (usize, usize) {
        match self {
            Objective::QubitsThenPhotons => (qubits, photons),
            Objective::PhotonsThenQubits => (photons, qubits),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SearchBounds {
    pub max_qubits: usize,
    pub max_photons: usize,
    pub max_blocks: usize,
    /// Largest photon count any exact evaluation may enumerate.
    pub enumeration_limit: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        Self {
            max_qubits: 24,
            max_photons: 16,
            max_blocks: 8,
            enumeration_limit: DEFAULT_ENUMERATION_LIMIT,
        }
    }
}

impl SearchBounds {
    pub fn new(max_qubits: usize, max_photons: usize, max_blocks: usize) -> Result<Self> {
        let b = Self {
            max_qubits,
            max_photons,
            max_blocks,
            ..Self::default()
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_qubits == 0 || self.max_photons == 0 || self.max_blocks == 0 {
            return Err(Error::contract("search bounds must all be at least 1"));
        }
        if self.enumeration_limit > MAX_PATTERN_WIDTH {
            return Err(Error::Capacity {
                what: "enumeration limit",
                actual: self.enumeration_limit,
                limit: MAX_PATTERN_WIDTH,
            });
        }
        if self.max_photons > self.enumeration_limit {
            return Err(Error::Capacity {
                what: "max photons",
                actual: self.max_photons,
                limit: self.enumeration_limit,
            });
        }
        Ok(())
    }
}

impl fmt::Display for SearchBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "max_qubits={} max_photons={} max_blocks={}",
            self.max_qubits, self.max_photons, self.max_blocks
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Parity(MultiplexConfig),
    ReedSolomon(RSCodeParams),
}

/// One point of a resource frontier.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourcePoint {
    pub p_t: f64,
    pub threshold: f64,
    pub qubits_min: usize,
    pub photons_min: usize,
    pub witness: Witness,
    pub achieved_probability: f64,
}

/// Result of a parity-code search. Infeasibility is a normal outcome and
/// records the bounds that were exhausted.
#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    Found(ResourcePoint),
    Infeasible {
        p_t: f64,
        threshold: f64,
        bounds: SearchBounds,
    },
}

impl SearchOutcome {
    pub fn point(&self) -> Option<&ResourcePoint> {
        match self {
            SearchOutcome::Found(p) => Some(p),
            SearchOutcome::Infeasible { .. } => None,
        }
    }

    /// `(photons, qubits)` of the optimum, if any.
    pub fn resources(&self) -> Option<(usize, usize)> {
        self.point().map(|p| (p.photons_min, p.qubits_min))
    }
}

fn check_search_args(p_t: f64, threshold: f64, bounds: &SearchBounds) -> Result<()> {
    if !(0.0..=1.0).contains(&p_t) {
        return Err(Error::contract(format!("p_t must lie in [0, 1], got {p_t}")));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::contract(format!("threshold must lie in (0, 1), got {threshold}")));
    }
    bounds.validate()
}

/// Smallest block (in distinct photons, hence also in qubits) whose chance
/// of surviving non-empty reaches the threshold.
pub fn min_useful_block(p_t: f64, threshold: f64) -> usize {
    let lost = 1.0 - p_t;
    (1..=MAX_PATTERN_WIDTH)
        .find(|&s| 1.0 - lost.powi(s as i32) >= threshold - 1e-12)
        .unwrap_or(MAX_PATTERN_WIDTH + 1)
}

fn family(strategy: &Strategy, bounds: &SearchBounds, min_block: usize) -> Family {
    Family {
        max_blocks: bounds.max_blocks,
        max_entry: if strategy.allow_same_block_duplicates {
            strategy.max_degree() as u8
        } else {
            1
        },
        rectangle_free: !strategy.allow_shared_block_pairs,
        min_block,
    }
}

fn matrix_to_config(matrix: &[Vec<u8>]) -> MultiplexConfig {
    let slots = matrix
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .flat_map(|(b, &m)| std::iter::repeat_n(b, m as usize))
                .collect()
        })
        .collect();
    MultiplexConfig::new(matrix[0].len(), slots).expect("generated matrices are valid")
}

/// One representative per isomorphism class of configurations with exactly
/// `n_qubits` qubits, in deterministic order.
pub fn enumerate_configs(
    n_qubits: usize,
    strategy: &Strategy,
    bounds: &SearchBounds,
) -> Result<impl Iterator<Item = MultiplexConfig>> {
    bounds.validate()?;
    if n_qubits > bounds.max_qubits {
        return Err(Error::Capacity {
            what: "qubit total",
            actual: n_qubits,
            limit: bounds.max_qubits,
        });
    }
    let fam = family(strategy, bounds, 1);
    let mut out = Vec::new();
    for photons in 1..=n_qubits.min(bounds.max_photons) {
        out.extend(
            classes_in_cell(photons, n_qubits, strategy, &fam)
                .iter()
                .map(|m| matrix_to_config(m)),
        );
    }
    Ok(out.into_iter())
}

/// Cells `(photons, qubits)` in objective order.
fn cells_in_order(strategy: &Strategy, bounds: &SearchBounds) -> Vec<(usize, usize)> {
    let mut cells: Vec<(usize, usize)> = (1..=bounds.max_photons)
        .flat_map(|n| {
            let mut range: Vec<usize> = strategy.qubit_range(n).collect();
            if n == 1 {
                range.push(1);
            }
            range
                .into_iter()
                .filter(|&q| q <= bounds.max_qubits)
                .map(move |q| (n, q))
        })
        .collect();
    let objective = strategy.objective();
    cells.sort_by_key(|&(n, q)| objective.rank(n, q));
    cells.dedup();
    cells
}

/// The strategy's cheapest configuration reaching `threshold` at `p_t`.
///
/// Witness ties inside the optimal cell go to the smallest canonical key.
pub fn min_resources_parity(
    p_t: f64,
    threshold: f64,
    strategy: &Strategy,
    bounds: &SearchBounds,
) -> Result<SearchOutcome> {
    check_search_args(p_t, threshold, bounds)?;
    let fam = family(strategy, bounds, min_useful_block(p_t, threshold));
    for (photons, qubits) in cells_in_order(strategy, bounds) {
        if let Some(point) = feasible_point(photons, qubits, strategy, &fam, p_t, threshold) {
            return Ok(SearchOutcome::Found(point));
        }
    }
    Ok(SearchOutcome::Infeasible {
        p_t,
        threshold,
        bounds: *bounds,
    })
}

fn feasible_point(
    photons: usize,
    qubits: usize,
    strategy: &Strategy,
    fam: &Family,
    p_t: f64,
    threshold: f64,
) -> Option<ResourcePoint> {
    let scan = scan_cell(photons, qubits, strategy, fam, p_t, threshold);
    scan.witness.map(|w| ResourcePoint {
        p_t,
        threshold,
        qubits_min: qubits,
        photons_min: photons,
        witness: Witness::Parity(matrix_to_config(&w.matrix)),
        achieved_probability: w.probability,
    })
}

/// One row of the photons-versus-qubits trade-off for mixed multiplexing.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffRow {
    pub qubits: usize,
    pub photons: usize,
    pub probability: f64,
    pub witness: MultiplexConfig,
    /// Fewest photons at the non-multiplexed optimum's qubit count.
    pub optimal: bool,
}

/// Minimum photon count for each qubit total under mixed multiplexing.
///
/// Rows form the Pareto front: a qubit total is listed only when it needs
/// strictly fewer photons than every smaller total. The row at the qubit
/// count of the non-multiplexed optimum is always listed and is marked
/// `optimal`.
pub fn mixed_tradeoff_table(
    p_t: f64,
    threshold: f64,
    q_max: usize,
    bounds: &SearchBounds,
) -> Result<Vec<TradeoffRow>> {
    mixed_tradeoff_table_with(p_t, threshold, &Strategy::mixed(q_max)?, bounds)
}

/// [`mixed_tradeoff_table`] for an explicit mixed strategy (family flags).
pub fn mixed_tradeoff_table_with(
    p_t: f64,
    threshold: f64,
    strategy: &Strategy,
    bounds: &SearchBounds,
) -> Result<Vec<TradeoffRow>> {
    check_search_args(p_t, threshold, bounds)?;
    if !matches!(strategy.kind, StrategyKind::Mixed { .. }) {
        return Err(Error::contract("trade-off table needs a mixed strategy"));
    }
    let reference = Strategy {
        kind: StrategyKind::NonMultiplexed,
        ..*strategy
    };
    let star_qubits = min_resources_parity(p_t, threshold, &reference, bounds)?
        .point()
        .map(|p| p.qubits_min);
    let fam = family(strategy, bounds, min_useful_block(p_t, threshold));
    let mut rows = Vec::new();
    let mut best_photons = usize::MAX;
    for qubits in 1..=bounds.max_qubits {
        let photon_floor = qubits.div_ceil(strategy.max_degree());
        let found = (photon_floor..=qubits.min(bounds.max_photons))
            .find_map(|n| feasible_point(n, qubits, strategy, &fam, p_t, threshold));
        let Some(point) = found else { continue };
        let starred = star_qubits == Some(qubits);
        if point.photons_min < best_photons || starred {
            best_photons = best_photons.min(point.photons_min);
            let Witness::Parity(witness) = point.witness else {
                unreachable!("parity search yields parity witnesses")
            };
            rows.push(TradeoffRow {
                qubits,
                photons: point.photons_min,
                probability: point.achieved_probability,
                witness,
                optimal: starred,
            });
        }
    }
    Ok(rows)
}

/// [`min_resources_parity`] at every grid point.
pub fn frontier_sweep(
    p_t_grid: &[f64],
    threshold: f64,
    strategy: &Strategy,
    bounds: &SearchBounds,
) -> Result<Vec<SearchOutcome>> {
    if let Some(&bad) = p_t_grid.iter().find(|&&p| !(p > 0.0 && p <= 1.0)) {
        return Err(Error::contract(format!("grid values must lie in (0, 1], got {bad}")));
    }
    p_t_grid
        .iter()
        .map(|&p| min_resources_parity(p, threshold, strategy, bounds))
        .collect()
}

/// Canonical keys of a list of configurations, rejecting repeats. Used by
/// tests and audits to check that a stream is isomorph-free.
pub fn distinct_classes<'a>(configs: impl IntoIterator<Item = &'a MultiplexConfig>) -> usize {
    configs
        .into_iter()
        .map(|c| canonical_from_incidence(&c.incidence(), c.num_blocks()))
        .collect::<HashSet<_>>()
        .len()
}
