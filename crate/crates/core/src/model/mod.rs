//! Multiplexed encodings of a parity code onto photons.
//!
//! A [`MultiplexConfig`] records, for every photon, which code block each of
//! its qubits belongs to. Losing a photon loses all of its qubits at once, so
//! the loss behaviour of a block is determined by the set of photons it
//! touches. The code survives a loss event when at least one block arrives
//! intact and no block is left empty.

pub(crate) mod canonical;
mod cfg_format;

pub use canonical::{canonical_form, CanonicalKey};
pub use cfg_format::{format_config, parse_config, read_config_file, CFG_MAGIC};

use crate::error::{Error, Result};

/// Largest number of photons a [`LossPattern`] can describe.
pub const MAX_PATTERN_WIDTH: usize = 64;

/// Photons mapped onto code blocks.
///
/// `photon_slots[j]` lists one block index per qubit carried by photon `j`.
/// Block sizes are implied by the incidence, so unbalanced codes need no
/// special handling.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiplexConfig {
    num_blocks: usize,
    photon_slots: Vec<Vec<usize>>,
}

impl MultiplexConfig {
    pub fn new(num_blocks: usize, photon_slots: Vec<Vec<usize>>) -> Result<Self> {
        if num_blocks == 0 {
            return Err(Error::contract("a configuration needs at least one block"));
        }
        if photon_slots.is_empty() {
            return Err(Error::contract("a configuration needs at least one photon"));
        }
        let mut used = vec![false; num_blocks];
        for (j, slots) in photon_slots.iter().enumerate() {
            if slots.is_empty() {
                return Err(Error::contract(format!("photon {j} carries no qubit")));
            }
            if slots.len() > u8::MAX as usize {
                return Err(Error::contract(format!(
                    "photon {j} carries {} qubits, at most {} are supported",
                    slots.len(),
                    u8::MAX
                )));
            }
            for &b in slots {
                if b >= num_blocks {
                    return Err(Error::contract(format!(
                        "photon {j} references block {b}, but only {num_blocks} blocks exist"
                    )));
                }
                used[b] = true;
            }
        }
        if let Some(b) = used.iter().position(|u| !u) {
            return Err(Error::contract(format!("block {b} holds no qubit")));
        }
        Ok(Self {
            num_blocks,
            photon_slots,
        })
    }

    /// One photon per qubit, blocks of the given sizes. `&[m; n]` is the
    /// balanced `(n, m)` parity code.
    pub fn non_multiplexed(block_sizes: &[usize]) -> Result<Self> {
        let slots = block_sizes
            .iter()
            .enumerate()
            .flat_map(|(b, &size)| std::iter::repeat_n(vec![b], size))
            .collect();
        Self::new(block_sizes.len(), slots)
    }

    /// Builds a configuration from per-block photon bitmasks: bit `j` of
    /// `masks[b]` means photon `j` carries one qubit of block `b`.
    pub fn from_block_masks(num_photons: usize, masks: &[u64]) -> Result<Self> {
        if num_photons > MAX_PATTERN_WIDTH {
            return Err(Error::Capacity {
                what: "photon count",
                actual: num_photons,
                limit: MAX_PATTERN_WIDTH,
            });
        }
        let mut slots = vec![Vec::new(); num_photons];
        for (b, &mask) in masks.iter().enumerate() {
            let mut m = mask;
            while m != 0 {
                let j = m.trailing_zeros() as usize;
                if j >= num_photons {
                    return Err(Error::contract(format!(
                        "block {b} references photon {j} of {num_photons}"
                    )));
                }
                slots[j].push(b);
                m &= m - 1;
            }
        }
        Self::new(masks.len(), slots)
    }

    pub fn num_blocks(&self) -> usize {
        self.num_blocks
    }

    pub fn photon_slots(&self) -> &[Vec<usize>] {
        &self.photon_slots
    }

    pub fn total_photons(&self) -> usize {
        self.photon_slots.len()
    }

    pub fn total_qubits(&self) -> usize {
        self.photon_slots.iter().map(Vec::len).sum()
    }

    /// Qubits carried by each photon.
    pub fn photon_degrees(&self) -> Vec<usize> {
        self.photon_slots.iter().map(Vec::len).collect()
    }

    /// Qubits held by each block.
    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_blocks];
        for &b in self.photon_slots.iter().flatten() {
            sizes[b] += 1;
        }
        sizes
    }

    /// True when some photon carries two qubits of the same block.
    pub fn has_duplicate_slots(&self) -> bool {
        self.photon_slots.iter().any(|slots| {
            let mut s = slots.clone();
            s.sort_unstable();
            s.windows(2).any(|w| w[0] == w[1])
        })
    }

    /// Multiplicity matrix: `m[j][b]` qubits of block `b` ride on photon `j`.
    pub fn incidence(&self) -> Vec<Vec<u8>> {
        let mut m = vec![vec![0u8; self.num_blocks]; self.photon_slots.len()];
        for (j, slots) in self.photon_slots.iter().enumerate() {
            for &b in slots {
                m[j][b] += 1;
            }
        }
        m
    }

    /// Photon bitmask of every block. Fails above [`MAX_PATTERN_WIDTH`] photons.
    pub fn block_masks(&self) -> Result<Vec<u64>> {
        self.check_width_limit()?;
        let mut masks = vec![0u64; self.num_blocks];
        for (j, slots) in self.photon_slots.iter().enumerate() {
            for &b in slots {
                masks[b] |= 1u64 << j;
            }
        }
        Ok(masks)
    }

    /// Applies `photon_perm[j]` as the new label of photon `j` and
    /// `block_perm[b]` as the new label of block `b`.
    pub fn relabel(&self, photon_perm: &[usize], block_perm: &[usize]) -> Result<Self> {
        if !is_permutation(photon_perm, self.total_photons())
            || !is_permutation(block_perm, self.num_blocks)
        {
            return Err(Error::contract("relabelling must be a permutation"));
        }
        let mut slots = vec![Vec::new(); self.total_photons()];
        for (j, s) in self.photon_slots.iter().enumerate() {
            slots[photon_perm[j]] = s.iter().map(|&b| block_perm[b]).collect();
        }
        Self::new(self.num_blocks, slots)
    }

    fn check_width_limit(&self) -> Result<()> {
        if self.total_photons() > MAX_PATTERN_WIDTH {
            return Err(Error::Capacity {
                what: "photon count",
                actual: self.total_photons(),
                limit: MAX_PATTERN_WIDTH,
            });
        }
        Ok(())
    }
}

fn is_permutation(perm: &[usize], n: usize) -> bool {
    if perm.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    perm.iter().all(|&p| p < n && !std::mem::replace(&mut seen[p], true))
}

/// Which photons survived the channel. Bit `j` set means photon `j` arrived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LossPattern {
    width: usize,
    survivors: u64,
}

impl LossPattern {
    pub fn new(width: usize, survivors: u64) -> Result<Self> {
        if width > MAX_PATTERN_WIDTH {
            return Err(Error::Capacity {
                what: "pattern width",
                actual: width,
                limit: MAX_PATTERN_WIDTH,
            });
        }
        if width < MAX_PATTERN_WIDTH && survivors >> width != 0 {
            return Err(Error::contract(format!(
                "survivor bits set beyond width {width}"
            )));
        }
        Ok(Self { width, survivors })
    }

    pub fn all_survive(width: usize) -> Result<Self> {
        Self::new(width, full_mask(width))
    }

    /// Every photon arrives except those listed.
    pub fn with_lost(width: usize, lost: &[usize]) -> Result<Self> {
        let mut bits = full_mask(width);
        for &j in lost {
            if j >= width {
                return Err(Error::contract(format!("photon {j} outside width {width}")));
            }
            bits &= !(1u64 << j);
        }
        Self::new(width, bits)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn survivors(&self) -> u64 {
        self.survivors
    }

    pub fn survived(&self, photon: usize) -> bool {
        photon < self.width && self.survivors >> photon & 1 == 1
    }

    pub fn lost_count(&self) -> usize {
        self.width - self.survivors.count_ones() as usize
    }
}

pub(crate) fn full_mask(width: usize) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockCount {
    pub surviving_qubits: usize,
    pub total_qubits: usize,
}

impl BlockCount {
    pub fn is_intact(&self) -> bool {
        self.surviving_qubits == self.total_qubits
    }

    pub fn is_empty(&self) -> bool {
        self.surviving_qubits == 0
    }
}

/// Per-block qubit survival after a loss event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSurvival {
    pub blocks: Vec<BlockCount>,
}

impl BlockSurvival {
    pub fn any_intact(&self) -> bool {
        self.blocks.iter().any(BlockCount::is_intact)
    }

    pub fn any_empty(&self) -> bool {
        self.blocks.iter().any(BlockCount::is_empty)
    }

    pub fn is_success(&self) -> bool {
        self.any_intact() && !self.any_empty()
    }
}

fn check_width(config: &MultiplexConfig, pattern: &LossPattern) -> Result<()> {
    if pattern.width() != config.total_photons() {
        return Err(Error::contract(format!(
            "loss pattern width {} does not match {} photons",
            pattern.width(),
            config.total_photons()
        )));
    }
    Ok(())
}

pub fn block_survival(config: &MultiplexConfig, pattern: &LossPattern) -> Result<BlockSurvival> {
    check_width(config, pattern)?;
    let mut blocks = vec![
        BlockCount {
            surviving_qubits: 0,
            total_qubits: 0
        };
        config.num_blocks()
    ];
    for (j, slots) in config.photon_slots().iter().enumerate() {
        let alive = pattern.survived(j);
        for &b in slots {
            blocks[b].total_qubits += 1;
            if alive {
                blocks[b].surviving_qubits += 1;
            }
        }
    }
    Ok(BlockSurvival { blocks })
}

/// Success predicate: some block is intact and no block is empty.
pub fn is_success(config: &MultiplexConfig, pattern: &LossPattern) -> Result<bool> {
    Ok(block_survival(config, pattern)?.is_success())
}

/// Bitmask form of the success predicate, used on hot paths.
///
/// A block is intact exactly when its photon set is a subset of the
/// survivors, and empty exactly when the two are disjoint; duplicate slots do
/// not change either test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuccessMasks {
    width: usize,
    masks: Vec<u64>,
}

impl SuccessMasks {
    pub fn from_config(config: &MultiplexConfig) -> Result<Self> {
        Ok(Self {
            width: config.total_photons(),
            masks: config.block_masks()?,
        })
    }

    pub(crate) fn from_parts(width: usize, masks: Vec<u64>) -> Self {
        Self { width, masks }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    /// Classifies a survivor set.
    #[inline]
    pub fn classify(&self, survivors: u64) -> Outcome {
        let mut intact = false;
        for &m in &self.masks {
            let hit = survivors & m;
            if hit == 0 {
                return Outcome::EmptyBlock;
            }
            intact |= hit == m;
        }
        if intact {
            Outcome::Success
        } else {
            Outcome::NoIntactBlock
        }
    }
}

/// The three mutually exclusive fates of a loss event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Success,
    /// Every block kept a qubit but none arrived whole.
    NoIntactBlock,
    /// At least one block lost every qubit.
    EmptyBlock,
}
