use serde::{Deserialize, Serialize};

use super::presentation::Presentation;
use super::word::{column_of, Letter, Word};
use crate::error::{Error, Result};

const UNDEF: usize = usize::MAX;

/// A complete, closed coset table. Coset 0 is the subgroup itself; columns are
/// `2i` for `x_i` and `2i+1` for `x_i^-1`, cosets act on the right.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetTable {
    presentation: Presentation,
    sub_gens: Vec<Word>,
    table: Vec<Vec<usize>>,
}

impl CosetTable {
    /// Build from an explicit right action; checks completeness, inverse
    /// consistency and that every relator and subgroup generator closes up.
    pub fn from_action(presentation: Presentation, sub_gens: Vec<Word>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        let cols = 2 * presentation.n_gens();
        for (c, row) in table.iter().enumerate() {
            if row.len() != cols || row.iter().any(|&d| d >= n) {
                return Err(Error::Input(format!("coset table row {c} incomplete")));
            }
            for g in 0..presentation.n_gens() {
                if table[row[2 * g]][2 * g + 1] != c {
                    return Err(Error::Input(format!("coset table not a permutation at row {c}")));
                }
            }
        }
        let t = CosetTable {
            presentation,
            sub_gens,
            table,
        };
        for c in 0..n {
            for r in t.presentation.relators() {
                if t.trace(c, r) != c {
                    return Err(Error::Input(format!("relator does not close at coset {c}")));
                }
            }
        }
        for w in &t.sub_gens {
            if t.trace(0, w) != 0 {
                return Err(Error::Input("subgroup generator does not fix coset 0".into()));
            }
        }
        Ok(t)
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }
    pub fn sub_gens(&self) -> &[Word] {
        &self.sub_gens
    }
    pub fn index(&self) -> usize {
        self.table.len()
    }
    pub fn rows(&self) -> &[Vec<usize>] {
        &self.table
    }

    #[inline]
    pub fn act(&self, coset: usize, l: Letter) -> usize {
        self.table[coset][column_of(l)]
    }

    #[inline]
    pub fn act_gen(&self, coset: usize, gen: usize) -> usize {
        self.table[coset][2 * gen]
    }

    pub fn trace(&self, coset: usize, w: &Word) -> usize {
        w.letters().iter().fold(coset, |c, &l| self.act(c, l))
    }

    pub(crate) fn set_sub_gens(&mut self, gens: Vec<Word>) {
        self.sub_gens = gens;
    }
}

/// Haselgrove–Leech–Trotter enumeration state.
struct Enumerator<'a> {
    cols: usize,
    rels: Vec<Vec<usize>>,
    table: Vec<Vec<usize>>,
    forward: Vec<usize>,
    live: usize,
    max_cosets: usize,
    queue: Vec<usize>,
    _pres: &'a Presentation,
}

#[inline]
fn inv_col(x: usize) -> usize {
    x ^ 1
}

impl<'a> Enumerator<'a> {
    fn new(pres: &'a Presentation, max_cosets: usize) -> Self {
        let cols = 2 * pres.n_gens();
        Enumerator {
            cols,
            rels: pres
                .relators()
                .iter()
                .map(|r| r.letters().iter().map(|&l| column_of(l)).collect())
                .collect(),
            table: vec![vec![UNDEF; cols]],
            forward: vec![0],
            live: 1,
            max_cosets,
            queue: Vec::new(),
            _pres: pres,
        }
    }

    fn is_live(&self, c: usize) -> bool {
        self.forward[c] == c
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut r = c;
        while self.forward[r] != r {
            r = self.forward[r];
        }
        let mut x = c;
        while self.forward[x] != r {
            let next = self.forward[x];
            self.forward[x] = r;
            x = next;
        }
        r
    }

    fn define(&mut self, c: usize, x: usize) -> Result<()> {
        if self.live >= self.max_cosets || self.table.len() >= self.max_cosets.saturating_mul(16).max(64) {
            return Err(Error::BudgetExceeded(self.max_cosets));
        }
        let d = self.table.len();
        self.table.push(vec![UNDEF; self.cols]);
        self.forward.push(d);
        self.live += 1;
        self.table[c][x] = d;
        self.table[d][inv_col(x)] = c;
        Ok(())
    }

    fn merge(&mut self, a: usize, b: usize) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (keep, drop) = (a.min(b), a.max(b));
        self.forward[drop] = keep;
        self.live -= 1;
        self.queue.push(drop);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let e = self.queue[i];
            i += 1;
            for x in 0..self.cols {
                let f = self.table[e][x];
                if f == UNDEF {
                    continue;
                }
                if self.table[f][inv_col(x)] == e {
                    self.table[f][inv_col(x)] = UNDEF;
                }
                let e1 = self.rep(e);
                let f1 = self.rep(f);
                if self.table[e1][x] != UNDEF {
                    let t = self.table[e1][x];
                    self.merge(f1, t);
                } else if self.table[f1][inv_col(x)] != UNDEF {
                    let t = self.table[f1][inv_col(x)];
                    self.merge(e1, t);
                } else {
                    self.table[e1][x] = f1;
                    self.table[f1][inv_col(x)] = e1;
                }
            }
        }
    }

    fn scan_and_fill(&mut self, c: usize, w: &[usize]) -> Result<()> {
        if w.is_empty() {
            return Ok(());
        }
        let mut f = c;
        let mut b = c;
        let mut i: isize = 0;
        let mut j: isize = w.len() as isize - 1;
        loop {
            while i <= j && self.table[f][w[i as usize]] != UNDEF {
                f = self.table[f][w[i as usize]];
                i += 1;
            }
            if i > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i && self.table[b][inv_col(w[j as usize])] != UNDEF {
                b = self.table[b][inv_col(w[j as usize])];
                j -= 1;
            }
            if j < i {
                self.coincidence(f, b);
                return Ok(());
            }
            if i == j {
                let x = w[i as usize];
                self.table[f][x] = b;
                self.table[b][inv_col(x)] = f;
                return Ok(());
            }
            self.define(f, w[i as usize])?;
        }
    }
}

/// Enumerate the cosets of `<sub_gens>` in the group presented by `pres`.
pub fn coset_enumerate(pres: &Presentation, sub_gens: &[Word], max_cosets: usize) -> Result<CosetTable> {
    if max_cosets == 0 {
        return Err(Error::Config("max_cosets must be at least 1".into()));
    }
    let mut en = Enumerator::new(pres, max_cosets);
    let subs: Vec<Vec<usize>> = sub_gens
        .iter()
        .map(|w| w.letters().iter().map(|&l| column_of(l)).collect())
        .collect();
    for w in &subs {
        let c = en.rep(0);
        en.scan_and_fill(c, w)?;
    }
    let mut c = 0;
    while c < en.table.len() {
        if en.is_live(c) {
            let rels = en.rels.clone();
            for r in &rels {
                en.scan_and_fill(c, r)?;
                if !en.is_live(c) {
                    break;
                }
            }
            if en.is_live(c) {
                for x in 0..en.cols {
                    if en.table[c][x] == UNDEF {
                        en.define(c, x)?;
                    }
                }
            }
        }
        c += 1;
    }
    // compact live cosets in creation order
    let mut new_index = vec![UNDEF; en.table.len()];
    let mut k = 0;
    for c in 0..en.table.len() {
        if en.is_live(c) {
            new_index[c] = k;
            k += 1;
        }
    }
    let table: Vec<Vec<usize>> = (0..en.table.len())
        .filter(|&c| en.is_live(c))
        .map(|c| en.table[c].iter().map(|&d| new_index[d]).collect())
        .collect();
    CosetTable::from_action(pres.clone(), sub_gens.to_vec(), table)
}

/// Cosets of the kernel of `x_i -> images[i]` into `F_p^k`, built directly from the action
/// on the image subgroup. Subgroup generators are left empty; callers fill in Schreier words.
pub fn kernel_table(pres: &Presentation, images: &[Vec<u32>], p: u32) -> Result<CosetTable> {
    if images.len() != pres.n_gens() {
        return Err(Error::Input("one image per generator required".into()));
    }
    let k = images.first().map_or(0, |v| v.len());
    for r in pres.relators() {
        let sums = r.exponent_sums(pres.n_gens());
        for coord in 0..k {
            let s: i64 = sums.iter().zip(images).map(|(e, v)| e * v[coord] as i64).sum();
            if s.rem_euclid(p as i64) != 0 {
                return Err(Error::Input("kernel map does not respect a relator".into()));
            }
        }
    }
    let mut elems: Vec<Vec<u32>> = vec![vec![0; k]];
    let mut index = std::collections::HashMap::new();
    index.insert(vec![0u32; k], 0usize);
    let mut table: Vec<Vec<usize>> = Vec::new();
    let mut c = 0;
    while c < elems.len() {
        let mut row = vec![UNDEF; 2 * pres.n_gens()];
        for (g, img) in images.iter().enumerate() {
            for (col, sign) in [(2 * g, 1u32), (2 * g + 1, p - 1)] {
                let next: Vec<u32> = elems[c].iter().zip(img).map(|(&a, &b)| (a + sign * b) % p).collect();
                let id = *index.entry(next.clone()).or_insert_with(|| {
                    elems.push(next);
                    elems.len() - 1
                });
                row[col] = id;
            }
        }
        table.push(row);
        c += 1;
    }
    CosetTable::from_action(pres.clone(), vec![], table)
}

/// Cosets of the kernel of `U -> F_p^k` given by the images of `U`'s Schreier generators.
/// Points are pairs `(a, c)` with `a` in the image and `c` a coset of `U`; a generator `x`
/// sends `(a, c)` to `(a + phi(s(c, x)), c x)` where `s(c, x)` is the Schreier generator on
/// that edge (zero on tree edges). The point `(0, 0)` has stabilizer `ker phi`.
pub fn sub_kernel_table(
    table: &CosetTable,
    tree: &super::schreier::SchreierTree,
    images: &[Vec<u32>],
    p: u32,
    max_cosets: usize,
) -> Result<CosetTable> {
    if images.len() != tree.n_gens() {
        return Err(Error::Input("one image per Schreier generator required".into()));
    }
    let k = images.first().map_or(0, |v| v.len());
    let ng = table.presentation().n_gens();
    let zero = vec![0u32; k];
    let mut points: Vec<(Vec<u32>, usize)> = vec![(zero.clone(), 0)];
    let mut index = std::collections::HashMap::new();
    index.insert((zero.clone(), 0usize), 0usize);
    let mut rows: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < points.len() {
        let (a, c) = points[i].clone();
        let mut row = vec![UNDEF; 2 * ng];
        for g in 0..ng {
            for inverse in [false, true] {
                let (d, s, sign) = if inverse {
                    let d = table.act(c, super::word::letter(g, true));
                    (d, tree.edge_gen(d, g), p - 1)
                } else {
                    (table.act_gen(c, g), tree.edge_gen(c, g), 1)
                };
                let b: Vec<u32> = match s {
                    Some(s) => a.iter().zip(&images[s]).map(|(&x, &y)| (x + sign * y) % p).collect(),
                    None => a.clone(),
                };
                let key = (b, d);
                let id = match index.get(&key) {
                    Some(&id) => id,
                    None => {
                        if points.len() >= max_cosets {
                            return Err(Error::BudgetExceeded(max_cosets));
                        }
                        index.insert(key.clone(), points.len());
                        points.push(key);
                        points.len() - 1
                    }
                };
                row[2 * g + usize::from(inverse)] = id;
            }
        }
        rows.push(row);
        i += 1;
    }
    CosetTable::from_action(table.presentation().clone(), vec![], rows)
}

/// Whether the stabilizer of coset 0 is normal: every coset admits a graph automorphism
/// of the coset table sending 0 to it.
pub fn is_normal(table: &CosetTable) -> bool {
    let n = table.index();
    let cols = 2 * table.presentation().n_gens();
    // breadth-first order with (parent, column)
    let mut order = vec![0usize];
    let mut parent = vec![(UNDEF, 0usize); n];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut i = 0;
    while i < order.len() {
        let c = order[i];
        for col in 0..cols {
            let d = table.rows()[c][col];
            if !seen[d] {
                seen[d] = true;
                parent[d] = (c, col);
                order.push(d);
            }
        }
        i += 1;
    }
    let mut f = vec![UNDEF; n];
    for target in 1..n {
        f[0] = target;
        for &c in &order[1..] {
            let (par, col) = parent[c];
            f[c] = table.rows()[f[par]][col];
        }
        for c in 0..n {
            for col in 0..cols {
                if f[table.rows()[c][col]] != table.rows()[f[c]][col] {
                    return false;
                }
            }
        }
    }
    true
}

/// Letter for a column.
pub fn letter_of_column(col: usize) -> Letter {
    super::word::letter(col / 2, col % 2 == 1)
}
