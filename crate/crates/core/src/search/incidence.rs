//! Orderly generation of photon-by-block multiplicity matrices.
//!
//! For fixed block sizes (column sums) and photon degrees (row sums), both
//! sorted nonincreasing, every isomorphism class has a representative whose
//! rows are nonincreasing in `(degree, row)` lexicographic order and whose
//! columns are nonincreasing in `(size, column)` order: a doubly lexical
//! ordering of the matrix bordered by its margins. Generating only such
//! matrices removes most relabelled copies; the caller removes the rest by
//! canonical key.

use std::ops::ControlFlow;

/// Margins and entry rules for one family of matrices.
#[derive(Debug, Clone)]
pub(crate) struct Shape {
    /// Column sums, nonincreasing.
    pub sizes: Vec<usize>,
    /// Row sums, nonincreasing.
    pub degrees: Vec<usize>,
    /// Largest multiplicity of one photon in one block (1 forbids duplicates).
    pub max_entry: u8,
    /// Forbid two photons sharing two or more blocks.
    pub rectangle_free: bool,
}

struct Walk<'s, F> {
    shape: &'s Shape,
    rows: Vec<Vec<u8>>,
    support: Vec<u64>,
    col_rem: Vec<usize>,
    tie: Vec<bool>,
    visit: F,
}

/// Calls `visit` on every matrix of `shape` in doubly lexical order.
pub(crate) fn for_each_incidence<F>(shape: &Shape, visit: F) -> ControlFlow<()>
where
    F: FnMut(&[Vec<u8>]) -> ControlFlow<()>,
{
    let blocks = shape.sizes.len();
    let photons = shape.degrees.len();
    if blocks == 0 || photons == 0 || blocks > 64 {
        return ControlFlow::Continue(());
    }
    if shape.sizes.iter().sum::<usize>() != shape.degrees.iter().sum::<usize>() {
        return ControlFlow::Continue(());
    }
    let mut walk = Walk {
        shape,
        rows: vec![vec![0; blocks]; photons],
        support: vec![0; photons],
        col_rem: shape.sizes.clone(),
        tie: shape.sizes.windows(2).map(|w| w[0] == w[1]).collect(),
        visit,
    };
    walk.row(0)
}

impl<F> Walk<'_, F>
where
    F: FnMut(&[Vec<u8>]) -> ControlFlow<()>,
{
    fn row(&mut self, r: usize) -> ControlFlow<()> {
        if r == self.rows.len() {
            return (self.visit)(&self.rows);
        }
        let max = self.shape.max_entry as usize;
        let blocks = self.col_rem.len();
        let mut suffix_cap = vec![0usize; blocks + 1];
        for c in (0..blocks).rev() {
            suffix_cap[c] = suffix_cap[c + 1] + self.col_rem[c].min(max);
        }
        let degree = self.shape.degrees[r];
        if degree > suffix_cap[0] {
            return ControlFlow::Continue(());
        }
        let follows_equal = r > 0 && self.shape.degrees[r - 1] == degree;
        self.cell(r, 0, degree, follows_equal, &suffix_cap)
    }

    fn cell(
        &mut self,
        r: usize,
        c: usize,
        rem: usize,
        eq_prev: bool,
        suffix_cap: &[usize],
    ) -> ControlFlow<()> {
        let blocks = self.col_rem.len();
        if c == blocks {
            return if rem == 0 { self.finish_row(r) } else { ControlFlow::Continue(()) };
        }
        let max = self.shape.max_entry as usize;
        let mut hi = max.min(self.col_rem[c]).min(rem);
        if eq_prev {
            hi = hi.min(self.rows[r - 1][c] as usize);
        }
        if c > 0 && self.tie[c - 1] {
            hi = hi.min(self.rows[r][c - 1] as usize);
        }
        let lo = rem.saturating_sub(suffix_cap[c + 1]);
        if lo > hi {
            return ControlFlow::Continue(());
        }
        for v in (lo..=hi).rev() {
            if v > 0 && self.shape.rectangle_free && self.would_close_rectangle(r, c) {
                continue;
            }
            self.rows[r][c] = v as u8;
            if v > 0 {
                self.support[r] |= 1 << c;
            }
            let still_eq = eq_prev && v == self.rows[r - 1][c] as usize;
            let flow = self.cell(r, c + 1, rem - v, still_eq, suffix_cap);
            self.support[r] &= !(1u64 << c);
            self.rows[r][c] = 0;
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn would_close_rectangle(&self, r: usize, c: usize) -> bool {
        let mine = self.support[r];
        if mine == 0 {
            return false;
        }
        self.support[..r]
            .iter()
            .any(|&other| other >> c & 1 == 1 && other & mine != 0)
    }

    fn finish_row(&mut self, r: usize) -> ControlFlow<()> {
        let remaining_rows = self.rows.len() - r - 1;
        let max = self.shape.max_entry as usize;
        for c in 0..self.col_rem.len() {
            self.col_rem[c] -= self.rows[r][c] as usize;
        }
        let feasible = self
            .col_rem
            .iter()
            .all(|&need| need <= remaining_rows * max);
        let saved_tie = self.tie.clone();
        for c in 0..self.tie.len() {
            self.tie[c] &= self.rows[r][c] == self.rows[r][c + 1];
        }
        let flow = if feasible {
            self.row(r + 1)
        } else {
            ControlFlow::Continue(())
        };
        self.tie = saved_tie;
        for c in 0..self.col_rem.len() {
            self.col_rem[c] += self.rows[r][c] as usize;
        }
        flow
    }
}

/// Nonincreasing integer partitions of `total` into exactly `parts` parts,
/// each within `[min_part, max_part]`, in reverse lexicographic order.
pub(crate) fn partitions_exact(
    total: usize,
    parts: usize,
    min_part: usize,
    max_part: usize,
) -> Vec<Vec<usize>> {
    fn rec(
        total: usize,
        parts: usize,
        min_part: usize,
        max_part: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if parts == 0 {
            if total == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if total < parts * min_part || total > parts * max_part {
            return;
        }
        let hi = max_part.min(total - (parts - 1) * min_part);
        for v in (min_part..=hi).rev() {
            cur.push(v);
            rec(total - v, parts - 1, min_part, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if min_part == 0 || min_part > max_part {
        return out;
    }
    rec(total, parts, min_part, max_part, &mut Vec::new(), &mut out);
    out
}

/// All nonincreasing partitions of `total` with parts in `[min_part, max_part]`
/// and at most `max_parts` parts, fewest parts first.
pub(crate) fn partitions_up_to(
    total: usize,
    max_parts: usize,
    min_part: usize,
    max_part: usize,
) -> Vec<Vec<usize>> {
    (1..=max_parts)
        .flat_map(|k| partitions_exact(total, k, min_part, max_part))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn collect(shape: &Shape) -> Vec<Vec<Vec<u8>>> {
        let mut out = Vec::new();
        let _ = for_each_incidence(shape, |m| {
            out.push(m.to_vec());
            ControlFlow::Continue(())
        });
        out
    }

    #[test]
    fn partitions_of_six_into_three() {
        assert_eq!(
            partitions_exact(6, 3, 1, 6),
            vec![vec![4, 1, 1], vec![3, 2, 1], vec![2, 2, 2]]
        );
        assert_eq!(partitions_up_to(4, 4, 1, 4).len(), 5);
        assert_eq!(partitions_up_to(4, 2, 2, 4), vec![vec![4], vec![2, 2]]);
        assert!(partitions_exact(5, 2, 3, 4).is_empty());
    }

    #[test]
    fn margins_are_respected() {
        let shape = Shape {
            sizes: vec![3, 2, 2],
            degrees: vec![3, 2, 1, 1],
            max_entry: 1,
            rectangle_free: false,
        };
        let all = collect(&shape);
        assert!(!all.is_empty());
        for m in &all {
            for (r, row) in m.iter().enumerate() {
                assert_eq!(row.iter().map(|&x| x as usize).sum::<usize>(), shape.degrees[r]);
            }
            for c in 0..3 {
                assert_eq!(m.iter().map(|row| row[c] as usize).sum::<usize>(), shape.sizes[c]);
            }
        }
    }

    #[test]
    fn triangle_of_pairs_is_unique() {
        // Three blocks of two, three photons of two: only the cycle survives
        // without duplicates.
        let shape = Shape {
            sizes: vec![2, 2, 2],
            degrees: vec![2, 2, 2],
            max_entry: 1,
            rectangle_free: false,
        };
        assert_eq!(collect(&shape), vec![vec![vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]]);
    }

    #[test]
    fn rectangle_rule_drops_parallel_photons() {
        let shape = Shape {
            sizes: vec![2, 2],
            degrees: vec![2, 2],
            max_entry: 1,
            rectangle_free: false,
        };
        assert_eq!(collect(&shape).len(), 1);
        let strict = Shape {
            rectangle_free: true,
            ..shape
        };
        assert!(collect(&strict).is_empty());
    }

    #[test]
    fn early_break_stops_the_walk() {
        let shape = Shape {
            sizes: vec![1; 4],
            degrees: vec![1; 4],
            max_entry: 1,
            rectangle_free: false,
        };
        let mut seen = 0;
        let flow = for_each_incidence(&shape, |_| {
            seen += 1;
            ControlFlow::Break(())
        });
        assert!(flow.is_break());
        assert_eq!(seen, 1);
    }
}
