use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::fp::FpMatrix;

/// Dense matrix of arbitrary-precision integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_i64_rows_with_cols(rows, rows.first().map_or(0, |r| r.len()))
    }

    pub fn from_i64_rows_with_cols(rows: &[Vec<i64>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, &x) in r.iter().enumerate() {
                m.data[i * cols + j] = BigInt::from(x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        use num_traits::ToPrimitive;
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_i64()).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(l, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        IntMatrix { data, ..*self }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        IntMatrix { data, ..*self }
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::identity(self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.rows)
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn from_columns(rows: usize, cols: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..rows {
                m.set(i, j, c[i].clone());
            }
        }
        m
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let cols: Vec<Vec<BigInt>> = idx.iter().map(|&j| self.column(j)).collect();
        Self::from_columns(self.rows, &cols)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(idx.len(), self.cols);
        for (a, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                m.set(a, j, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut m = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        m
    }

    pub fn to_fp(&self, p: u32) -> FpMatrix {
        let pb = BigInt::from(p);
        let mut m = FpMatrix::zeros(p, self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let r = self.get(i, j).mod_floor(&pb);
                let r: u32 = r.try_into().expect("residue fits");
                m.set(i, j, r);
            }
        }
        m
    }

    /// Fraction-free (Bareiss) determinant.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                let Some(s) = (k + 1..n).find(|&i| !a.get(i, k).is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, s);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row_dst += f * row_src
    fn row_axpy(&mut self, dst: usize, f: &BigInt, src: usize) {
        for j in 0..self.cols {
            let v = self.get(src, j) * f;
            if !v.is_zero() {
                self.data[dst * self.cols + j] += v;
            }
        }
    }

    /// col_dst += f * col_src
    fn col_axpy(&mut self, dst: usize, f: &BigInt, src: usize) {
        for i in 0..self.rows {
            let v = self.get(i, src) * f;
            if !v.is_zero() {
                self.data[i * self.cols + dst] += v;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let k = i * self.cols + j;
            self.data[k] = -&self.data[k];
        }
    }
}

/// Smith normal form `U A V = D` with unimodular `U`, `V`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SmithForm {
    /// Nonzero invariant factors `d_1 | d_2 | ... | d_rank`, all positive.
    pub diag: Vec<BigInt>,
    pub rank: usize,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

impl SmithForm {
    /// The `rows x cols` diagonal matrix `D`.
    pub fn diagonal_matrix(&self, rows: usize, cols: usize) -> IntMatrix {
        let mut d = IntMatrix::zeros(rows, cols);
        for (i, x) in self.diag.iter().enumerate() {
            d.set(i, i, x.clone());
        }
        d
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut t = 0;
    while t < m.min(n) {
        // smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                let x = d.get(i, j);
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < d.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        d.swap_rows(t, bi);
        u.swap_rows(t, bi);
        d.swap_cols(t, bj);
        v.swap_cols(t, bj);
        loop {
            let piv = d.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..m {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = -d.get(i, t).div_floor(&piv);
                d.row_axpy(i, &q, t);
                u.row_axpy(i, &q, t);
                if !d.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = -d.get(t, j).div_floor(&piv);
                d.col_axpy(j, &q, t);
                v.col_axpy(j, &q, t);
                if !d.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if clean {
                // divisibility of the rest of the block
                let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d.get(i, j).is_multiple_of(&piv)));
                match bad {
                    None => break,
                    Some(i) => {
                        let one = BigInt::one();
                        d.row_axpy(t, &one, i);
                        u.row_axpy(t, &one, i);
                    }
                }
            }
            // bring the smallest entry of row/column t to the pivot
            let mut best = (t, t);
            for i in t + 1..m {
                let x = d.get(i, t);
                if !x.is_zero() && x.abs() < d.get(best.0, best.1).abs() {
                    best = (i, t);
                }
            }
            for j in t + 1..n {
                let x = d.get(t, j);
                if !x.is_zero() && x.abs() < d.get(best.0, best.1).abs() {
                    best = (t, j);
                }
            }
            if best.0 != t {
                d.swap_rows(t, best.0);
                u.swap_rows(t, best.0);
            }
            if best.1 != t {
                d.swap_cols(t, best.1);
                v.swap_cols(t, best.1);
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    let diag: Vec<BigInt> = (0..t).map(|i| d.get(i, i).clone()).collect();
    SmithForm {
        rank: diag.len(),
        diag,
        left: u,
        right: v,
    }
}

/// Basis (columns) of the integer kernel `{x in Z^n : A x = 0}`; saturated.
pub fn integer_kernel(a: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(a);
    let idx: Vec<usize> = (snf.rank..a.cols).collect();
    snf.right.select_columns(&idx)
}

/// Integer solution of `A x = b` if one exists.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let snf = smith_normal_form(a);
    // D y = U b, x = V y
    let ub = snf.left.mul_vec(b);
    let mut y = vec![BigInt::zero(); a.cols];
    for (i, c) in ub.iter().enumerate() {
        if i < snf.rank {
            let (q, r) = c.div_rem(&snf.diag[i]);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !c.is_zero() {
            return None;
        }
    }
    Some(snf.right.mul_vec(&y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check(a: &IntMatrix) -> SmithForm {
        let s = smith_normal_form(a);
        let recon = s.left.mul(a).mul(&s.right);
        assert_eq!(recon, s.diagonal_matrix(a.rows(), a.cols()));
        assert_eq!(s.left.det().abs(), BigInt::one());
        assert_eq!(s.right.det().abs(), BigInt::one());
        for w in s.diag.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        assert!(s.diag.iter().all(|x| x.is_positive()));
        s
    }

    #[test]
    fn cyclic_relation() {
        let s = check(&IntMatrix::from_i64_rows(&[vec![5]]));
        assert_eq!(s.diag, vec![BigInt::from(5)]);
    }

    #[test]
    fn two_three_becomes_one_six() {
        let s = check(&IntMatrix::from_i64_rows(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.diag, vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn empty_relations_give_free_rank() {
        let a = IntMatrix::zeros(0, 2);
        let s = check(&a);
        assert_eq!(s.rank, 0);
        assert_eq!(a.cols() - s.rank, 2);
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..40 {
            let r = rng.gen_range(1..6);
            let c = rng.gen_range(1..6);
            let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(-6..7)).collect()).collect();
            check(&IntMatrix::from_i64_rows(&rows));
        }
    }

    #[test]
    fn kernel_and_solve() {
        let a = IntMatrix::from_i64_rows(&[vec![1, 1, 1]]);
        let k = integer_kernel(&a);
        assert_eq!(k.cols(), 2);
        assert!(a.mul(&k).is_zero());
        let b = vec![BigInt::from(4)];
        let x = solve_integer(&a, &b).unwrap();
        assert_eq!(a.mul_vec(&x), b);
        let two = IntMatrix::from_i64_rows(&[vec![2]]);
        assert!(solve_integer(&two, &[BigInt::from(3)]).is_none());
    }

    #[test]
    fn determinant() {
        let a = IntMatrix::from_i64_rows(&[vec![2, 1], vec![7, 4]]);
        assert_eq!(a.det(), BigInt::one());
        let b = IntMatrix::from_i64_rows(&[vec![0, 1, 2], vec![1, 0, 3], vec![4, -3, 8]]);
        assert_eq!(b.det(), BigInt::from(-2));
    }
}
