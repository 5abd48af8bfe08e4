use std::sync::Arc;

use super::group::{FiniteGroup, Subgroup};
use crate::error::{Error, Result};
use crate::exactlin::{nullspace, nullspace_basis, rref, solve_matrix, FpMatrix, Subspace};

pub const DEFAULT_MAX_DIM: usize = 512;

/// A finite-dimensional left `F_p[G]`-module given by one matrix per generator of `G`.
#[derive(Clone, Debug)]
pub struct GModule {
    group: Arc<FiniteGroup>,
    dim: usize,
    action: Vec<FpMatrix>,
}

impl GModule {
    pub fn new(group: Arc<FiniteGroup>, dim: usize, action: Vec<FpMatrix>) -> Result<Self> {
        Self::with_dim_cap(group, dim, action, DEFAULT_MAX_DIM)
    }

    pub fn with_dim_cap(group: Arc<FiniteGroup>, dim: usize, action: Vec<FpMatrix>, max_dim: usize) -> Result<Self> {
        if action.len() != group.n_gens() {
            return Err(Error::ActionInvalid(format!(
                "{} matrices for {} generators",
                action.len(),
                group.n_gens()
            )));
        }
        if dim > max_dim {
            return Err(Error::BudgetExceeded(max_dim));
        }
        let p = group.p();
        for a in &action {
            if a.rows() != dim || a.cols() != dim || a.p() != p {
                return Err(Error::ActionInvalid("action matrices of inconsistent shape".into()));
            }
            if !a.is_invertible() {
                return Err(Error::ActionInvalid("singular action matrix".into()));
            }
        }
        let m = GModule { group, dim, action };
        let elems = m.element_matrices();
        for r in m.group.presentation().relators() {
            if !m.word_matrix_from(&elems, r).is_identity() {
                return Err(Error::ActionInvalid(format!(
                    "relator {} does not act trivially",
                    r.format(m.group.presentation().names())
                )));
            }
        }
        Ok(m)
    }

    fn word_matrix_from(&self, elems: &[FpMatrix], w: &crate::fpgroup::Word) -> FpMatrix {
        let mut out = FpMatrix::identity(self.p(), self.dim);
        for &l in w.letters() {
            let g = self.group.gen_elements()[crate::fpgroup::word::gen_of(l)];
            let e = if l > 0 { g } else { self.group.inverse(g) };
            out = out.mul(&elems[e]);
        }
        out
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn p(&self) -> u32 {
        self.group.p()
    }
    pub fn action(&self) -> &[FpMatrix] {
        &self.action
    }

    /// `D(g)` for every element, indexed like the group's Cayley table.
    pub fn element_matrices(&self) -> Vec<FpMatrix> {
        let g = &self.group;
        let p = self.p();
        let mut out = vec![FpMatrix::zeros(p, 0, 0); g.order()];
        out[0] = FpMatrix::identity(p, self.dim);
        let inverses: Vec<FpMatrix> = self
            .action
            .iter()
            .map(|a| a.inverse().expect("invertible action"))
            .collect();
        for &e in &g.bfs_order()[1..] {
            let (par, l) = g.tree_parent(e).unwrap();
            let x = crate::fpgroup::word::gen_of(l);
            out[e] = out[par].mul(if l > 0 { &self.action[x] } else { &inverses[x] });
        }
        out
    }

    pub fn element_matrix(&self, e: usize) -> FpMatrix {
        let w = self.group.word(e).clone();
        let inverses: Vec<FpMatrix> = self.action.iter().map(|a| a.inverse().unwrap()).collect();
        crate::fpgroup::fox::word_action(&w, &self.action, &inverses)
    }

    fn check_same_group(&self, other: &GModule) -> Result<()> {
        if self.group == other.group {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    pub fn trivial(group: Arc<FiniteGroup>, dim: usize) -> Self {
        let p = group.p();
        let action = vec![FpMatrix::identity(p, dim); group.n_gens()];
        GModule { group, dim, action }
    }

    /// `F_p[G]` with `x . e_g = e_{xg}`.
    pub fn regular(group: Arc<FiniteGroup>) -> Self {
        let n = group.order();
        let p = group.p();
        let action = group
            .gen_elements()
            .iter()
            .map(|&x| {
                let mut m = FpMatrix::zeros(p, n, n);
                for g in 0..n {
                    m.set(group.mul(x, g), g, 1);
                }
                m
            })
            .collect();
        GModule { group, dim: n, action }
    }

    /// The augmentation ideal with basis `g - 1` (`g != 1`) and its embedding into the regular module.
    pub fn augmentation_ideal(group: Arc<FiniteGroup>) -> (Self, FpMatrix) {
        let n = group.order();
        let p = group.p();
        let mut emb = FpMatrix::zeros(p, n, n - 1);
        for g in 1..n {
            emb.set(g, g - 1, 1);
            emb.set(0, g - 1, p - 1);
        }
        let reg = GModule::regular(group);
        let m = reg.submodule(&emb).expect("augmentation ideal is a submodule");
        (m, emb)
    }

    /// Restriction of the action to the span of the columns of `basis`, which must be
    /// linearly independent and invariant; the submodule is written in that basis.
    pub fn submodule(&self, basis: &FpMatrix) -> Result<GModule> {
        let k = basis.cols();
        if basis.rows() != self.dim || basis.rank() != k {
            return Err(Error::Shape("submodule basis must have independent columns".into()));
        }
        if k == 0 {
            return self.power(0);
        }
        let mut action = Vec::with_capacity(self.action.len());
        for a in &self.action {
            let img = a.mul(basis);
            let c =
                solve_matrix(basis, &img).ok_or_else(|| Error::ActionInvalid("subspace is not invariant".into()))?;
            action.push(c);
        }
        Ok(GModule {
            group: Arc::clone(&self.group),
            dim: k,
            action,
        })
    }

    /// Same module in a new basis: columns of `change` are the new basis vectors.
    pub fn change_basis(&self, change: &FpMatrix) -> Result<GModule> {
        if change.rows() != self.dim || change.cols() != self.dim || !change.is_invertible() {
            return Err(Error::Shape("change of basis must be invertible".into()));
        }
        self.submodule(change)
    }

    pub fn direct_sum(parts: &[&GModule]) -> Result<GModule> {
        let first = parts.first().ok_or_else(|| Error::Input("empty direct sum".into()))?;
        for m in parts {
            first.check_same_group(m)?;
        }
        let ng = first.group.n_gens();
        let p = first.p();
        let action = (0..ng)
            .map(|x| {
                parts
                    .iter()
                    .fold(FpMatrix::zeros(p, 0, 0), |acc, m| acc.direct_sum(&m.action[x]))
            })
            .collect();
        Ok(GModule {
            group: Arc::clone(&first.group),
            dim: parts.iter().map(|m| m.dim).sum(),
            action,
        })
    }

    /// Sum of `n` copies.
    pub fn power(&self, n: usize) -> Result<GModule> {
        if n == 0 {
            return Ok(GModule {
                group: Arc::clone(&self.group),
                dim: 0,
                action: vec![FpMatrix::zeros(self.p(), 0, 0); self.action.len()],
            });
        }
        GModule::direct_sum(&vec![self; n])
    }

    /// `M^G = cap_x ker(A_x - 1)`.
    pub fn invariants(&self) -> Subspace {
        if self.dim == 0 || self.action.is_empty() {
            return Subspace::full(self.p(), self.dim);
        }
        let id = FpMatrix::identity(self.p(), self.dim);
        let stacked = self
            .action
            .iter()
            .fold(FpMatrix::zeros(self.p(), 0, self.dim), |acc, a| acc.vstack(&a.sub(&id)));
        nullspace(&stacked)
    }

    /// `dim M_G = dim M - dim sum_x (A_x - 1) M`.
    pub fn coinvariants_dim(&self) -> usize {
        if self.dim == 0 || self.action.is_empty() {
            return self.dim;
        }
        let id = FpMatrix::identity(self.p(), self.dim);
        let spans = self
            .action
            .iter()
            .fold(FpMatrix::zeros(self.p(), self.dim, 0), |acc, a| acc.hstack(&a.sub(&id)));
        self.dim - spans.rank()
    }

    /// Module generators and a spanning basis `b_j = D(g_j) v_{r_j}`.
    fn spin(&self) -> Spin {
        let p = self.p();
        let n = self.dim;
        let g = &self.group;
        let mut span = VecEchelon::new(p, n);
        let mut roots = Vec::new();
        let mut info: Vec<(usize, usize, Option<(usize, usize)>)> = Vec::new();
        let mut vectors: Vec<Vec<u32>> = Vec::new();
        for i in 0..n {
            let mut e = vec![0u32; n];
            e[i] = 1;
            if !span.insert(&e) {
                continue;
            }
            let r = roots.len();
            roots.push(e.clone());
            let start = vectors.len();
            vectors.push(e);
            info.push((r, 0, None));
            let mut k = start;
            while k < vectors.len() {
                for (x, a) in self.action.iter().enumerate() {
                    let w = a.mul_vec(&vectors[k]);
                    if span.insert(&w) {
                        let elem = g.mul(g.gen_elements()[x], info[k].1);
                        vectors.push(w);
                        info.push((r, elem, Some((k, x))));
                    }
                }
                k += 1;
            }
            if vectors.len() == n {
                break;
            }
        }
        let basis = FpMatrix::from_columns(p, n, &vectors);
        Spin {
            n_roots: roots.len(),
            info,
            basis_inv: basis.inverse().expect("spun basis is a basis"),
            basis,
        }
    }

    /// Basis of `Hom_G(self, other)` by solving for the images of module generators.
    pub fn hom_space(&self, other: &GModule) -> Result<HomSpace> {
        self.check_same_group(other)?;
        let p = self.p();
        let (dm, dn) = (self.dim, other.dim);
        if dm == 0 || dn == 0 {
            return Ok(HomSpace {
                basis: Vec::new(),
                rows: dn,
                cols: dm,
            });
        }
        let spin = self.spin();
        // D_N(g_j) along the spin tree
        let mut dmat: Vec<FpMatrix> = Vec::with_capacity(dm);
        for (j, &(_, _, par)) in spin.info.iter().enumerate() {
            let m = match par {
                None => FpMatrix::identity(p, dn),
                Some((k, x)) => other.action[x].mul(&dmat[k]),
            };
            debug_assert_eq!(dmat.len(), j);
            dmat.push(m);
        }
        let nv = spin.n_roots * dn;
        let mut span = RowSpan::new(p, nv);
        for x in 0..self.action.len() {
            // coordinates of A_x b_j in the spun basis
            let c = spin.basis_inv.mul(&self.action[x]).mul(&spin.basis);
            for j in 0..dm {
                let lhs = other.action[x].mul(&dmat[j]);
                let mut block = FpMatrix::zeros(p, dn, nv);
                let r = spin.info[j].0;
                for a in 0..dn {
                    for b in 0..dn {
                        block.add_at(a, r * dn + b, lhs.get(a, b));
                    }
                }
                for l in 0..dm {
                    let coef = c.get(l, j);
                    if coef == 0 {
                        continue;
                    }
                    let rl = spin.info[l].0;
                    let neg = p - coef;
                    for a in 0..dn {
                        for b in 0..dn {
                            let v = dmat[l].get(a, b);
                            if v != 0 {
                                block.add_at(a, rl * dn + b, (v as u64 * neg as u64 % p as u64) as u32);
                            }
                        }
                    }
                }
                span.insert_matrix(&block);
            }
            if span.rank() == nv {
                break;
            }
        }
        let sols = span.nullspace_basis();
        let mut basis = Vec::with_capacity(sols.len());
        for u in sols {
            let cols: Vec<Vec<u32>> = (0..dm)
                .map(|j| {
                    let r = spin.info[j].0;
                    dmat[j].mul_vec(&u[r * dn..(r + 1) * dn])
                })
                .collect();
            let f = FpMatrix::from_columns(p, dn, &cols);
            basis.push(f.mul(&spin.basis_inv));
        }
        Ok(HomSpace {
            basis,
            rows: dn,
            cols: dm,
        })
    }

    pub fn is_intertwiner(&self, other: &GModule, h: &FpMatrix) -> bool {
        self.action.iter().zip(&other.action).all(|(a, b)| b.mul(h) == h.mul(a))
    }

    /// Restriction to a subgroup: the action of the subgroup's generator words.
    pub fn restrict(&self, sub: &Subgroup) -> Result<GModule> {
        if *sub.parent != *self.group {
            return Err(Error::GroupMismatch);
        }
        let elems = self.element_matrices();
        let action = (0..sub.group.n_gens())
            .map(|i| elems[sub.embedding[sub.group.gen_elements()[i]]].clone())
            .collect();
        Ok(GModule {
            group: Arc::clone(&sub.group),
            dim: self.dim,
            action,
        })
    }

    /// `F_p[G] (x)_{F_p[H]} M` with basis `t_i (x) m_j` over a fixed left transversal.
    pub fn induce(sub: &Subgroup, m: &GModule) -> Result<GModule> {
        if *m.group != *sub.group {
            return Err(Error::GroupMismatch);
        }
        let g = &sub.parent;
        let n = g.order();
        let mut coset_of = vec![usize::MAX; n];
        let mut hpart = vec![0usize; n];
        let mut transversal = Vec::new();
        for e in 0..n {
            if coset_of[e] != usize::MAX {
                continue;
            }
            let i = transversal.len();
            transversal.push(e);
            for (h, &he) in sub.embedding.iter().enumerate() {
                let x = g.mul(e, he);
                coset_of[x] = i;
                hpart[x] = h;
            }
        }
        let k = transversal.len();
        let d = m.dim;
        let elems = m.element_matrices();
        let p = g.p();
        let action = g
            .gen_elements()
            .iter()
            .map(|&x| {
                let mut a = FpMatrix::zeros(p, k * d, k * d);
                for (i, &t) in transversal.iter().enumerate() {
                    let y = g.mul(x, t);
                    let (i2, h) = (coset_of[y], hpart[y]);
                    for r in 0..d {
                        for c in 0..d {
                            a.set(i2 * d + r, i * d + c, elems[h].get(r, c));
                        }
                    }
                }
                a
            })
            .collect();
        GModule::new(Arc::clone(g), k * d, action)
    }

    /// `J_H = F_p[G] I_H` inside the regular module, in an echelon basis.
    pub fn j_ideal(sub: &Subgroup) -> Result<GModule> {
        let (_, basis) = j_ideal_basis(sub);
        GModule::regular(Arc::clone(&sub.parent)).submodule(&basis)
    }
}

/// Spanning vectors `g h - g` of `F_p[G] I_H`, reduced to a basis; returns `(dim, basis columns)`.
pub fn j_ideal_basis(sub: &Subgroup) -> (usize, FpMatrix) {
    let g = &sub.parent;
    let n = g.order();
    let p = g.p();
    let mut vecs = Vec::new();
    for x in 0..n {
        for &h in &sub.embedding[1..] {
            let mut v = vec![0u32; n];
            v[g.mul(x, h)] = 1;
            v[x] = p - 1;
            vecs.push(v);
        }
    }
    let s = Subspace::from_vectors(p, n, &vecs);
    (s.dim(), s.basis_columns())
}

struct Spin {
    n_roots: usize,
    /// (root, group element, (spin parent, generator))
    info: Vec<(usize, usize, Option<(usize, usize)>)>,
    basis: FpMatrix,
    basis_inv: FpMatrix,
}

/// Span of vectors in reduced echelon form, grown one vector at a time.
struct VecEchelon {
    p: u32,
    rows: Vec<(usize, Vec<u32>)>,
}

impl VecEchelon {
    fn new(p: u32, _ncols: usize) -> Self {
        VecEchelon { p, rows: Vec::new() }
    }

    fn insert(&mut self, v: &[u32]) -> bool {
        let p = self.p as u64;
        let mut v = v.to_vec();
        for (c, row) in &self.rows {
            let f = v[*c] as u64;
            if f != 0 {
                for (x, y) in v.iter_mut().zip(row) {
                    *x = ((*x as u64 + (p - f) * *y as u64) % p) as u32;
                }
            }
        }
        let Some(c) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = crate::exactlin::fp::inv_mod(v[c], self.p) as u64;
        for x in v.iter_mut() {
            *x = (*x as u64 * inv % p) as u32;
        }
        for (_, row) in self.rows.iter_mut() {
            let f = row[c] as u64;
            if f != 0 {
                for (x, y) in row.iter_mut().zip(&v) {
                    *x = ((*x as u64 + (p - f) * *y as u64) % p) as u32;
                }
            }
        }
        self.rows.push((c, v));
        true
    }
}

/// Row space kept in reduced echelon form, grown by batches.
struct RowSpan {
    ncols: usize,
    rows: FpMatrix,
    pending: FpMatrix,
}

impl RowSpan {
    fn new(p: u32, ncols: usize) -> Self {
        RowSpan {
            ncols,
            rows: FpMatrix::zeros(p, 0, ncols),
            pending: FpMatrix::zeros(p, 0, ncols),
        }
    }

    /// Rank of the rows flushed so far.
    fn rank(&self) -> usize {
        self.rows.rows()
    }

    fn flush(&mut self) {
        if self.pending.rows() == 0 {
            return;
        }
        let stacked = self.rows.vstack(&self.pending);
        let (r, rank, _) = rref(&stacked);
        self.rows = r.submatrix(0..rank, 0..self.ncols);
        self.pending = FpMatrix::zeros(self.rows.p(), 0, self.ncols);
    }

    fn insert_matrix(&mut self, m: &FpMatrix) {
        self.pending = self.pending.vstack(m);
        if self.pending.rows() >= self.ncols.max(64) {
            self.flush();
        }
    }

    fn nullspace_basis(&mut self) -> Vec<Vec<u32>> {
        self.flush();
        if self.rank() == 0 {
            return (0..self.ncols)
                .map(|i| {
                    let mut e = vec![0; self.ncols];
                    e[i] = 1;
                    e
                })
                .collect();
        }
        nullspace_basis(&self.rows)
    }
}

/// Basis of a space of module homomorphisms, each a `dim(codomain) x dim(domain)` matrix.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub basis: Vec<FpMatrix>,
    pub rows: usize,
    pub cols: usize,
}

impl HomSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn combination(&self, coeffs: &[u32], p: u32) -> FpMatrix {
        let mut out = FpMatrix::zeros(p, self.rows, self.cols);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if *c != 0 {
                out.add_scaled(b, *c);
            }
        }
        out
    }
}
