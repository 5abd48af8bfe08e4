use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[inline]
pub fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

#[inline]
pub fn pow_mod(a: u32, mut e: u32, p: u32) -> u32 {
    let p64 = p as u64;
    let mut base = a as u64 % p64;
    let mut acc = 1u64 % p64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p64;
        }
        base = base * base % p64;
        e >>= 1;
    }
    acc as u32
}

/// Reduce a signed integer into `[0, p)`.
#[inline]
pub fn reduce_i64(x: i64, p: u32) -> u32 {
    x.rem_euclid(p as i64) as u32
}

/// Dense matrix over the prime field `F_p`. Vectors are columns; matrices act on the left.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpMatrix {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FpMatrix(p={}, {}x{})", self.p, self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

impl FpMatrix {
    pub fn try_zeros(p: u32, rows: usize, cols: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FpMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        })
    }

    /// Panics if `p` is not prime.
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Self {
        Self::try_zeros(p, rows, cols).expect("modulus must be prime")
    }

    pub fn identity(p: u32, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % p;
        }
        m
    }

    /// Build from rows of residues; entries are reduced mod `p`.
    pub fn from_rows(p: u32, rows: &[Vec<u32>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::try_zeros(p, rows.len(), cols)?;
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Shape("ragged rows".into()));
            }
            for (j, &x) in r.iter().enumerate() {
                m.data[i * cols + j] = x % p;
            }
        }
        Ok(m)
    }

    pub fn from_i64_rows(p: u32, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::try_zeros(p, rows.len(), cols)?;
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Shape("ragged rows".into()));
            }
            for (j, &x) in r.iter().enumerate() {
                m.data[i * cols + j] = reduce_i64(x, p);
            }
        }
        Ok(m)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(p: u32, dim: usize, cols: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(p, dim, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), dim);
            for i in 0..dim {
                m.data[i * m.cols + j] = c[i] % p;
            }
        }
        m
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.p;
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, v: u32) {
        let k = i * self.cols + j;
        self.data[k] = ((self.data[k] as u64 + v as u64) % self.p as u64) as u32;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == u32::from(i == j)))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(self.p, other.p, "field mismatch");
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same(other);
        let p = self.p;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| ((a as u64 + b as u64) % p as u64) as u32)
            .collect();
        FpMatrix { data, ..*self }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_same(other);
        let p = self.p;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| ((a as u64 + p as u64 - b as u64) % p as u64) as u32)
            .collect();
        FpMatrix { data, ..*self }
    }

    pub fn scale(&self, c: u32) -> Self {
        let p = self.p as u64;
        let c = c as u64 % p;
        let data = self.data.iter().map(|&a| (a as u64 * c % p) as u32).collect();
        FpMatrix { data, ..*self }
    }

    /// `self + c * other`
    pub fn add_scaled(&mut self, other: &Self, c: u32) {
        self.check_same(other);
        let p = self.p as u64;
        let c = c as u64 % p;
        if c == 0 {
            return;
        }
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = ((*a as u64 + c * b as u64) % p) as u32;
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "field mismatch");
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        if self.p == 2 {
            return bits::mul(self, other);
        }
        let p = self.p as u64;
        let (n, m, k) = (self.rows, other.cols, self.cols);
        let mut out = vec![0u64; n * m];
        for i in 0..n {
            let orow = &mut out[i * m..(i + 1) * m];
            for l in 0..k {
                let a = self.data[i * k + l] as u64;
                if a == 0 {
                    continue;
                }
                let brow = &other.data[l * m..(l + 1) * m];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b as u64;
                }
                // keep accumulators bounded
                if l % 4096 == 4095 {
                    for o in orow.iter_mut() {
                        *o %= p;
                    }
                }
            }
        }
        FpMatrix {
            p: self.p,
            rows: n,
            cols: m,
            data: out.into_iter().map(|x| (x % p) as u32).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let p = self.p as u64;
        (0..self.rows)
            .map(|i| {
                let s: u64 = self.row(i).iter().zip(v).map(|(&a, &b)| a as u64 * b as u64 % p).sum();
                (s % p) as u32
            })
            .collect()
    }

    pub fn pow(&self, mut e: u64) -> Self {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Self::identity(self.p, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut m = Self::zeros(self.p, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            m.data[i * m.cols..i * m.cols + self.cols].copy_from_slice(self.row(i));
            m.data[i * m.cols + self.cols..(i + 1) * m.cols].copy_from_slice(other.row(i));
        }
        m
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        FpMatrix {
            p: self.p,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let mut m = Self::zeros(self.p, rows.len(), cols.len());
        for (a, i) in rows.clone().enumerate() {
            for (b, j) in cols.clone().enumerate() {
                m.data[a * m.cols + b] = self.get(i, j);
            }
        }
        m
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(self.p, self.rows, idx.len());
        for i in 0..self.rows {
            for (b, &j) in idx.iter().enumerate() {
                m.data[i * m.cols + b] = self.get(i, j);
            }
        }
        m
    }

    /// Block diagonal sum.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut m = Self::zeros(self.p, self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j));
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m.set(self.rows + i, self.cols + j, other.get(i, j));
            }
        }
        m
    }

    pub fn rank(&self) -> usize {
        rref(self).1
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&Self::identity(self.p, n));
        let (r, rank, piv) = rref(&aug);
        if rank < n || piv.iter().take(n).enumerate().any(|(i, &c)| c != i) {
            return None;
        }
        Some(r.submatrix(0..n, n..2 * n))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn is_nilpotent(&self) -> bool {
        assert!(self.is_square());
        let mut a = self.clone();
        let mut k = 1usize;
        while k < self.rows.max(1) {
            a = a.mul(&a);
            k *= 2;
        }
        a.is_zero()
    }
}

/// Reduced row-echelon form: `(rref, rank, pivot columns)`.
pub fn rref(m: &FpMatrix) -> (FpMatrix, usize, Vec<usize>) {
    if m.p == 2 {
        return bits::rref(m);
    }
    let p = m.p as u64;
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| a.data[i * cols + c] != 0) else {
            continue;
        };
        if piv != r {
            for j in 0..cols {
                a.data.swap(piv * cols + j, r * cols + j);
            }
        }
        let inv = inv_mod(a.data[r * cols + c], m.p) as u64;
        for j in c..cols {
            let k = r * cols + j;
            a.data[k] = (a.data[k] as u64 * inv % p) as u32;
        }
        let (head, tail) = a.data.split_at_mut(r * cols);
        let (prow, tail) = tail.split_at_mut(cols);
        let elim = |row: &mut [u32]| {
            let f = row[c] as u64;
            if f == 0 {
                return;
            }
            let nf = p - f;
            for j in c..cols {
                row[j] = ((row[j] as u64 + nf * prow[j] as u64) % p) as u32;
            }
        };
        for row in head.chunks_mut(cols) {
            elim(row);
        }
        for row in tail.chunks_mut(cols) {
            elim(row);
        }
        pivots.push(c);
        r += 1;
    }
    (a, r, pivots)
}

/// Basis (as columns) of `{v : m v = 0}`.
pub fn nullspace_basis(m: &FpMatrix) -> Vec<Vec<u32>> {
    let (r, rank, pivots) = rref(m);
    let p = m.p;
    let n = m.cols;
    let mut is_pivot = vec![false; n];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut out = Vec::new();
    for f in (0..n).filter(|&j| !is_pivot[j]) {
        let mut v = vec![0u32; n];
        v[f] = 1;
        for (i, &c) in pivots.iter().enumerate().take(rank) {
            let x = r.get(i, f);
            v[c] = (p - x) % p;
        }
        out.push(v);
    }
    out
}

pub fn nullspace(m: &FpMatrix) -> Subspace {
    let basis = nullspace_basis(m);
    Subspace::from_vectors(m.p, m.cols, &basis)
}

/// Some `x` with `a x = b`, or `None` if the system is inconsistent.
pub fn solve(a: &FpMatrix, b: &[u32]) -> Option<Vec<u32>> {
    assert_eq!(a.rows, b.len(), "shape mismatch in solve");
    let bm = FpMatrix::from_columns(a.p, a.rows, &[b.to_vec()]);
    let aug = a.hstack(&bm);
    let (r, rank, pivots) = rref(&aug);
    if pivots.last() == Some(&a.cols) {
        return None;
    }
    let mut x = vec![0u32; a.cols];
    for (i, &c) in pivots.iter().enumerate().take(rank) {
        x[c] = r.get(i, a.cols);
    }
    Some(x)
}

/// Solve `a X = b` column by column; `None` if any column is inconsistent.
pub fn solve_matrix(a: &FpMatrix, b: &FpMatrix) -> Option<FpMatrix> {
    assert_eq!(a.rows, b.rows);
    let aug = a.hstack(b);
    let (r, rank, pivots) = rref(&aug);
    if pivots.iter().any(|&c| c >= a.cols) {
        return None;
    }
    let mut x = FpMatrix::zeros(a.p, a.cols, b.cols);
    for (i, &c) in pivots.iter().enumerate().take(rank) {
        for j in 0..b.cols {
            x.set(c, j, r.get(i, a.cols + j));
        }
    }
    Some(x)
}

/// A subspace of `F_p^n`, stored canonically by an RREF basis (rows are basis vectors).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Subspace {
    ambient_dim: usize,
    basis: FpMatrix,
}

impl Subspace {
    pub fn from_vectors(p: u32, ambient_dim: usize, vectors: &[Vec<u32>]) -> Self {
        let rows: Vec<Vec<u32>> = vectors.to_vec();
        let m = if rows.is_empty() {
            FpMatrix::zeros(p, 0, ambient_dim)
        } else {
            FpMatrix::from_rows(p, &rows).expect("prime modulus")
        };
        Self::from_row_matrix(&m)
    }

    pub fn from_row_matrix(m: &FpMatrix) -> Self {
        let (r, rank, _) = rref(m);
        Subspace {
            ambient_dim: m.cols,
            basis: r.submatrix(0..rank, 0..m.cols),
        }
    }

    /// Column space of `m`.
    pub fn column_space(m: &FpMatrix) -> Self {
        Self::from_row_matrix(&m.transpose())
    }

    pub fn zero(p: u32, n: usize) -> Self {
        Subspace {
            ambient_dim: n,
            basis: FpMatrix::zeros(p, 0, n),
        }
    }

    pub fn full(p: u32, n: usize) -> Self {
        Subspace {
            ambient_dim: n,
            basis: FpMatrix::identity(p, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }
    pub fn p(&self) -> u32 {
        self.basis.p()
    }
    pub fn basis(&self) -> &FpMatrix {
        &self.basis
    }

    pub fn vectors(&self) -> Vec<Vec<u32>> {
        self.basis.to_rows()
    }

    /// Basis vectors as the columns of an `ambient x dim` matrix.
    pub fn basis_columns(&self) -> FpMatrix {
        self.basis.transpose()
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let row = FpMatrix::from_rows(self.p(), &[v.to_vec()]).expect("prime");
        let stacked = self.basis.vstack(&row);
        rref(&stacked).1 == self.dim()
    }

    pub fn sum(&self, other: &Self) -> Self {
        Self::from_row_matrix(&self.basis.vstack(&other.basis))
    }

    pub fn intersect(&self, other: &Self) -> Self {
        // v = A x = B y  <=>  [A^T | -B^T] (x; y) = 0
        let a = self.basis.transpose();
        let b = other.basis.transpose().scale(self.p() - 1);
        let sys = a.hstack(&b);
        let null = nullspace_basis(&sys);
        let vecs: Vec<Vec<u32>> = null.iter().map(|xy| a.mul_vec(&xy[..self.dim()])).collect();
        Self::from_vectors(self.p(), self.ambient_dim, &vecs)
    }
}

mod bits {
    //! Bit-packed kernels for `p = 2`.
    use super::FpMatrix;

    struct Bits {
        words: usize,
        rows: usize,
        data: Vec<u64>,
    }

    impl Bits {
        fn from(m: &FpMatrix) -> Self {
            let words = m.cols.div_ceil(64).max(1);
            let mut data = vec![0u64; words * m.rows];
            for i in 0..m.rows {
                for j in 0..m.cols {
                    if m.data[i * m.cols + j] & 1 == 1 {
                        data[i * words + j / 64] |= 1 << (j % 64);
                    }
                }
            }
            Bits {
                words,
                rows: m.rows,
                data,
            }
        }

        fn to_matrix(&self, cols: usize) -> FpMatrix {
            let mut m = FpMatrix::zeros(2, self.rows, cols);
            for i in 0..self.rows {
                for j in 0..cols {
                    m.data[i * cols + j] = ((self.data[i * self.words + j / 64] >> (j % 64)) & 1) as u32;
                }
            }
            m
        }

        #[inline]
        fn bit(&self, i: usize, j: usize) -> bool {
            (self.data[i * self.words + j / 64] >> (j % 64)) & 1 == 1
        }

        fn xor_row_into(&mut self, src: usize, dst: usize, from_word: usize) {
            let w = self.words;
            for k in from_word..w {
                let v = self.data[src * w + k];
                self.data[dst * w + k] ^= v;
            }
        }
    }

    pub(super) fn rref(m: &FpMatrix) -> (FpMatrix, usize, Vec<usize>) {
        let mut b = Bits::from(m);
        let w = b.words;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == b.rows {
                break;
            }
            let Some(piv) = (r..b.rows).find(|&i| b.bit(i, c)) else {
                continue;
            };
            if piv != r {
                for k in 0..w {
                    b.data.swap(piv * w + k, r * w + k);
                }
            }
            for i in 0..b.rows {
                if i != r && b.bit(i, c) {
                    b.xor_row_into(r, i, c / 64);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (b.to_matrix(m.cols), r, pivots)
    }

    pub(super) fn mul(a: &FpMatrix, bm: &FpMatrix) -> FpMatrix {
        let b = Bits::from(bm);
        let w = b.words;
        let mut out = Bits {
            words: w,
            rows: a.rows,
            data: vec![0u64; w * a.rows],
        };
        for i in 0..a.rows {
            for l in 0..a.cols {
                if a.data[i * a.cols + l] & 1 == 1 {
                    for k in 0..w {
                        out.data[i * w + k] ^= b.data[l * w + k];
                    }
                }
            }
        }
        out.to_matrix(bm.cols)
    }
}
