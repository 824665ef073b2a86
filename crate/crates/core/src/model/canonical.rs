//! Canonical labelling of photon/block incidence structures.
//!
//! Colour refinement runs on the bipartite multigraph (photons on one side,
//! blocks on the other, edge weight = number of shared slots) until the
//! ordered partition is equitable. Non-discrete partitions are resolved by
//! individualising every member of the first non-singleton cell in turn and
//! keeping the smallest resulting matrix. Members that are twins of an
//! already tried vertex (identical incidence row or column) are skipped:
//! swapping twins is an automorphism, so their subtrees yield the same keys.

use super::MultiplexConfig;

/// Relabelling-invariant identity of a configuration.
///
/// Byte layout: photon count (u16 LE), block count (u16 LE), then the
/// multiplicity matrix in canonical photon-major order, one byte per entry.
/// The lone bare photon `[[0]]` therefore has key `[1, 0, 1, 0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn canonical_form(config: &MultiplexConfig) -> CanonicalKey {
    canonical_from_incidence(&config.incidence(), config.num_blocks())
}

/// Canonical key straight from a photon-major multiplicity matrix.
pub(crate) fn canonical_from_incidence(matrix: &[Vec<u8>], num_blocks: usize) -> CanonicalKey {
    let g = Bipartite::new(matrix, num_blocks);
    let mut best: Option<Vec<u8>> = None;
    g.search(
        vec![0; g.photons],
        vec![0; g.blocks],
        &mut best,
    );
    CanonicalKey(best.expect("search visits at least one leaf"))
}

struct Bipartite<'a> {
    photons: usize,
    blocks: usize,
    matrix: &'a [Vec<u8>],
    rows: Vec<Vec<(usize, u8)>>,
    cols: Vec<Vec<(usize, u8)>>,
    photon_twin: Vec<usize>,
    block_twin: Vec<usize>,
}

impl<'a> Bipartite<'a> {
    fn new(matrix: &'a [Vec<u8>], blocks: usize) -> Self {
        let photons = matrix.len();
        let mut rows = vec![Vec::new(); photons];
        let mut cols = vec![Vec::new(); blocks];
        for (j, row) in matrix.iter().enumerate() {
            for (b, &m) in row.iter().enumerate() {
                if m > 0 {
                    rows[j].push((b, m));
                    cols[b].push((j, m));
                }
            }
        }
        let photon_twin = twin_classes(photons, |a, b| matrix[a] == matrix[b]);
        let block_twin = twin_classes(blocks, |a, b| {
            matrix.iter().all(|row| row[a] == row[b])
        });
        Self {
            photons,
            blocks,
            matrix,
            rows,
            cols,
            photon_twin,
            block_twin,
        }
    }

    fn search(&self, mut pc: Vec<u32>, mut bc: Vec<u32>, best: &mut Option<Vec<u8>>) {
        self.refine(&mut pc, &mut bc);
        let (photon_side, cell) = match first_nontrivial_cell(&pc) {
            Some(c) => (true, c),
            None => match first_nontrivial_cell(&bc) {
                Some(c) => (false, c),
                None => {
                    let key = self.leaf_key(&pc, &bc);
                    if best.as_ref().is_none_or(|b| key < *b) {
                        *best = Some(key);
                    }
                    return;
                }
            },
        };
        let (colours, twins) = if photon_side {
            (&pc, &self.photon_twin)
        } else {
            (&bc, &self.block_twin)
        };
        let mut tried = Vec::new();
        for v in 0..colours.len() {
            if colours[v] != cell || tried.contains(&twins[v]) {
                continue;
            }
            tried.push(twins[v]);
            let split = |c: &[u32]| -> Vec<u32> {
                c.iter()
                    .enumerate()
                    .map(|(x, &col)| 2 * col + u32::from(col == cell && x != v))
                    .collect()
            };
            let double = |c: &[u32]| -> Vec<u32> { c.iter().map(|&col| 2 * col).collect() };
            if photon_side {
                self.search(split(&pc), double(&bc), best);
            } else {
                self.search(double(&pc), split(&bc), best);
            }
        }
    }

    fn refine(&self, pc: &mut Vec<u32>, bc: &mut Vec<u32>) {
        let mut cells = (count_cells(pc), count_cells(bc));
        loop {
            *pc = recolour(pc, &self.rows, bc);
            *bc = recolour(bc, &self.cols, pc);
            let now = (count_cells(pc), count_cells(bc));
            if now == cells {
                return;
            }
            cells = now;
        }
    }

    fn leaf_key(&self, pc: &[u32], bc: &[u32]) -> Vec<u8> {
        let mut porder: Vec<usize> = (0..self.photons).collect();
        porder.sort_by_key(|&j| pc[j]);
        let mut border: Vec<usize> = (0..self.blocks).collect();
        border.sort_by_key(|&b| bc[b]);
        let mut key = Vec::with_capacity(4 + self.photons * self.blocks);
        key.extend_from_slice(&(self.photons as u16).to_le_bytes());
        key.extend_from_slice(&(self.blocks as u16).to_le_bytes());
        for &j in &porder {
            for &b in &border {
                key.push(self.matrix[j][b]);
            }
        }
        key
    }
}

/// New dense colours ordered by (old colour, sorted neighbour signature).
fn recolour(own: &[u32], adj: &[Vec<(usize, u8)>], other: &[u32]) -> Vec<u32> {
    let sigs: Vec<(u32, Vec<(u32, u8)>)> = own
        .iter()
        .zip(adj)
        .map(|(&c, nbrs)| {
            let mut s: Vec<(u32, u8)> = nbrs.iter().map(|&(x, m)| (other[x], m)).collect();
            s.sort_unstable();
            (c, s)
        })
        .collect();
    let mut uniq: Vec<&(u32, Vec<(u32, u8)>)> = sigs.iter().collect();
    uniq.sort();
    uniq.dedup();
    sigs.iter()
        .map(|s| uniq.binary_search(&s).expect("signature present") as u32)
        .collect()
}

fn count_cells(c: &[u32]) -> usize {
    let mut v = c.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

fn first_nontrivial_cell(c: &[u32]) -> Option<u32> {
    let mut v = c.to_vec();
    v.sort_unstable();
    v.windows(2).find(|w| w[0] == w[1]).map(|w| w[0])
}

fn twin_classes(n: usize, same: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let mut class = vec![usize::MAX; n];
    for a in 0..n {
        if class[a] != usize::MAX {
            continue;
        }
        class[a] = a;
        for b in a + 1..n {
            if class[b] == usize::MAX && same(a, b) {
                class[b] = a;
            }
        }
    }
    class
}
