//! Online sparse row echelon form over `F_p`, used for relation matrices of
//! large-index subgroups where dense elimination is wasteful.

use super::fp::{inv_mod, FpMatrix};

pub type SparseRow = Vec<(usize, u32)>;

/// Build a sparse row from signed integer coefficients.
pub fn sparse_from_counts(counts: impl IntoIterator<Item = (usize, i64)>, p: u32) -> SparseRow {
    let mut v: Vec<(usize, i64)> = counts.into_iter().collect();
    v.sort_unstable_by_key(|e| e.0);
    let mut out: SparseRow = Vec::with_capacity(v.len());
    for (c, x) in v {
        let r = x.rem_euclid(p as i64) as u32;
        match out.last_mut() {
            Some(last) if last.0 == c => last.1 = (last.1 + r) % p,
            _ => out.push((c, r)),
        }
    }
    out.retain(|e| e.1 != 0);
    out
}

#[derive(Clone, Debug)]
pub struct SparseEchelon {
    p: u32,
    ncols: usize,
    /// pivot column -> row with leading entry 1 at that column
    pivot_row: Vec<Option<SparseRow>>,
    rank: usize,
}

impl SparseEchelon {
    pub fn new(p: u32, ncols: usize) -> Self {
        SparseEchelon {
            p,
            ncols,
            pivot_row: vec![None; ncols],
            rank: 0,
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn ncols(&self) -> usize {
        self.ncols
    }
    pub fn rank(&self) -> usize {
        self.rank
    }

    fn axpy(p: u32, v: &SparseRow, f: u32, w: &SparseRow) -> SparseRow {
        // v + f*w
        let p64 = p as u64;
        let mut out = Vec::with_capacity(v.len() + w.len());
        let (mut i, mut j) = (0, 0);
        while i < v.len() || j < w.len() {
            let take_v = j == w.len() || (i < v.len() && v[i].0 < w[j].0);
            let take_w = i == v.len() || (j < w.len() && w[j].0 < v[i].0);
            if take_v {
                out.push(v[i]);
                i += 1;
            } else if take_w {
                out.push((w[j].0, (f as u64 * w[j].1 as u64 % p64) as u32));
                j += 1;
            } else {
                let x = ((v[i].1 as u64 + f as u64 * w[j].1 as u64) % p64) as u32;
                if x != 0 {
                    out.push((v[i].0, x));
                }
                i += 1;
                j += 1;
            }
        }
        out
    }

    /// Fully reduce `v`: the result has no entries on pivot columns.
    pub fn reduce(&self, mut v: SparseRow) -> SparseRow {
        let mut pos = 0;
        while pos < v.len() {
            let (c, x) = v[pos];
            if let Some(row) = &self.pivot_row[c] {
                let f = self.p - x;
                v = Self::axpy(self.p, &v, f, row);
                // entries before `pos` are untouched since row starts at c
            } else {
                pos += 1;
            }
        }
        v
    }

    /// Insert a row; returns true if the rank grew.
    pub fn insert(&mut self, v: SparseRow) -> bool {
        let v = self.reduce(v);
        let Some(&(lead, x)) = v.first() else {
            return false;
        };
        let inv = inv_mod(x, self.p) as u64;
        let v: SparseRow = v
            .into_iter()
            .map(|(c, y)| (c, (y as u64 * inv % self.p as u64) as u32))
            .collect();
        self.pivot_row[lead] = Some(v);
        self.rank += 1;
        true
    }

    pub fn is_pivot(&self, c: usize) -> bool {
        self.pivot_row[c].is_some()
    }

    /// Non-pivot columns in increasing order; they index the quotient `F_p^n / rowspace`.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|&c| self.pivot_row[c].is_none()).collect()
    }

    /// Dense quotient coordinates of `v` modulo the row space.
    pub fn quotient_coords(&self, v: SparseRow, free_index: &[Option<usize>], dim: usize) -> Vec<u32> {
        let r = self.reduce(v);
        let mut out = vec![0u32; dim];
        for (c, x) in r {
            let k = free_index[c].expect("reduced vector supported on free columns");
            out[k] = x;
        }
        out
    }

    pub fn to_dense(&self) -> FpMatrix {
        let mut m = FpMatrix::zeros(self.p, self.rank, self.ncols);
        for (i, row) in self.pivot_row.iter().flatten().enumerate() {
            for &(c, x) in row {
                m.set(i, c, x);
            }
        }
        m
    }
}
