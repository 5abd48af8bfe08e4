//! Integral representations of `C_p` of the form `Z^a ⊕ I^b ⊕ Z[C_p]^c` up to conjugacy data.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::int::{integer_kernel, solve_integer};
use crate::exactlin::{smith_normal_form, IntMatrix};
use crate::fpgroup::{kernel_table, Presentation, SubgroupData, Word};

/// A lattice `Z^R` with a generator `σ` of `C_p` acting by an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeData {
    pub p: u32,
    pub sigma: IntMatrix,
}

/// Multiplicities of `Z[C_p]`, `I_{C_p}` and `Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CpLatticeClass {
    pub p: u32,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub rank: usize,
    pub fixed_rank: usize,
}

impl CpLatticeClass {
    pub fn triple(&self) -> (usize, usize, usize) {
        (self.a, self.b, self.c)
    }

    /// `R = pa + (p-1)b + c` and `F = a + c`.
    pub fn invariants_hold(&self) -> bool {
        let p = self.p as usize;
        self.rank == p * self.a + (p - 1) * self.b + self.c && self.fixed_rank == self.a + self.c
    }
}

impl LatticeData {
    pub fn new(p: u32, sigma: IntMatrix) -> Result<Self> {
        if !crate::exactlin::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if sigma.rows() != sigma.cols() {
            return Err(Error::Shape(format!("σ is {}x{}", sigma.rows(), sigma.cols())));
        }
        if sigma.rows() > 0 && sigma.det().abs() != BigInt::one() {
            return Err(Error::NotClassifiable("σ is not unimodular".into()));
        }
        if !sigma.pow(p).is_identity() {
            return Err(Error::NotClassifiable(format!("σ^{p} is not the identity")));
        }
        Ok(LatticeData { p, sigma })
    }

    pub fn rank(&self) -> usize {
        self.sigma.rows()
    }

    /// `Z^a ⊕ I^b ⊕ Z[C_p]^c` in block form, blocks in that order.
    pub fn standard(p: u32, a: usize, b: usize, c: usize) -> Result<Self> {
        let mut sigma = IntMatrix::zeros(0, 0);
        for _ in 0..a {
            sigma = sigma.direct_sum(&regular_block(p));
        }
        for _ in 0..b {
            sigma = sigma.direct_sum(&augmentation_block(p));
        }
        for _ in 0..c {
            sigma = sigma.direct_sum(&IntMatrix::identity(1));
        }
        LatticeData::new(p, sigma)
    }

    /// `U σ U^{-1}`.
    pub fn conjugate(&self, u: &IntMatrix, u_inv: &IntMatrix) -> LatticeData {
        LatticeData {
            p: self.p,
            sigma: u.mul(&self.sigma).mul(u_inv),
        }
    }
}

/// Cyclic permutation of `p` basis vectors.
pub fn regular_block(p: u32) -> IntMatrix {
    let n = p as usize;
    let mut m = IntMatrix::zeros(n, n);
    for i in 0..n {
        m.set((i + 1) % n, i, BigInt::one());
    }
    m
}

/// Companion matrix of `1 + x + ... + x^{p-1}`, i.e. `σ` on `Z[x]/(Φ_p)`.
pub fn augmentation_block(p: u32) -> IntMatrix {
    let n = p as usize - 1;
    let mut m = IntMatrix::zeros(n, n);
    for i in 0..n {
        if i + 1 < n {
            m.set(i + 1, i, BigInt::one());
        }
        m.set(i, n - 1, -BigInt::one());
    }
    m
}

/// A random unimodular matrix and its inverse, built from `steps` elementary operations.
pub fn random_unimodular<R: Rng>(n: usize, steps: usize, rng: &mut R) -> (IntMatrix, IntMatrix) {
    let mut u = IntMatrix::identity(n);
    let mut v = IntMatrix::identity(n);
    if n < 2 {
        if n == 1 && rng.gen_bool(0.5) {
            u.set(0, 0, -BigInt::one());
            v.set(0, 0, -BigInt::one());
        }
        return (u, v);
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let k = BigInt::from(if rng.gen_bool(0.5) { 1 } else { -1 });
        // u <- E u with E = 1 + k e_ij; v <- v E^{-1}
        for col in 0..n {
            let x = u.get(i, col) + &k * u.get(j, col);
            u.set(i, col, x);
        }
        for row in 0..n {
            let x = v.get(row, j) - &k * v.get(row, i);
            v.set(row, j, x);
        }
    }
    (u, v)
}

/// `b` is the `F_p`-dimension of `Ĥ^1 = ker N / im(σ-1)`, `F` the rank of the fixed lattice,
/// `a = (R - (p-1)b - F)/(p-1)`, `c = F - a`.
pub fn cp_lattice_classify(m: &LatticeData) -> Result<CpLatticeClass> {
    let p = m.p;
    let r = m.rank();
    if r == 0 {
        return Ok(CpLatticeClass {
            p,
            a: 0,
            b: 0,
            c: 0,
            rank: 0,
            fixed_rank: 0,
        });
    }
    let id = IntMatrix::identity(r);
    let s1 = m.sigma.sub(&id);
    let f = r - smith_normal_form(&s1).rank;
    let mut norm = IntMatrix::zeros(r, r);
    let mut pw = IntMatrix::identity(r);
    for _ in 0..p {
        norm = norm.add(&pw);
        pw = pw.mul(&m.sigma);
    }
    let k = integer_kernel(&norm);
    let kdim = k.cols();
    let b = if kdim == 0 {
        0
    } else {
        let mut coords = Vec::with_capacity(r);
        for j in 0..r {
            let x = solve_integer(&k, &s1.column(j))
                .ok_or_else(|| Error::NotClassifiable("im(σ-1) not inside ker N".into()))?;
            coords.push(x);
        }
        let x = IntMatrix::from_columns(kdim, &coords);
        let snf = smith_normal_form(&x);
        if snf.rank < kdim {
            return Err(Error::NotClassifiable("ker N / im(σ-1) is infinite".into()));
        }
        let pb = BigInt::from(p);
        snf.diag.iter().filter(|d| d.is_multiple_of(&pb)).count()
    };
    let num = r as i64 - (p as i64 - 1) * b as i64 - f as i64;
    if num < 0 || num % (p as i64 - 1) != 0 {
        return Err(Error::NotClassifiable(format!(
            "R = {r}, b = {b}, F = {f} give non-integral a"
        )));
    }
    let a = (num / (p as i64 - 1)) as usize;
    if a > f {
        return Err(Error::NotClassifiable(format!("a = {a} exceeds fixed rank {f}")));
    }
    Ok(CpLatticeClass {
        p,
        a,
        b,
        c: f - a,
        rank: r,
        fixed_rank: f,
    })
}

/// The action of conjugation `h ↦ t h t^{-1}` on `H^{ab}` for a normal subgroup `H`,
/// in a basis of the free part. Fails if `H^{ab}` has torsion.
pub fn conjugation_lattice(sd: &SubgroupData, t: &Word, p: u32) -> Result<LatticeData> {
    let s = sd.n_schreier_gens();
    let rel_cols: Vec<Vec<BigInt>> = sd
        .raw_relators()
        .iter()
        .map(|w| w.exponent_sums(s).into_iter().map(BigInt::from).collect())
        .collect();
    let rel = IntMatrix::from_columns(s, &rel_cols);
    let (u, rank) = if rel_cols.is_empty() {
        (IntMatrix::identity(s), 0)
    } else {
        let snf = smith_normal_form(&rel);
        if snf.diag.iter().any(|d| !d.is_one()) {
            return Err(Error::NotClassifiable("subgroup abelianization has torsion".into()));
        }
        (snf.left, snf.rank)
    };
    let free = s - rank;
    let words = sd.schreier_gen_words();
    let mut sigma_s = Vec::with_capacity(s);
    for w in &words {
        let img = sd.rewrite_raw(&w.conjugate_by(t))?;
        sigma_s.push(img.exponent_sums(s).into_iter().map(BigInt::from).collect::<Vec<_>>());
    }
    let sigma_s = IntMatrix::from_columns(s, &sigma_s);
    let mut cols = Vec::with_capacity(free);
    for j in 0..free {
        let mut e = vec![BigInt::zero(); s];
        e[rank + j] = BigInt::one();
        let lift = solve_integer(&u, &e).expect("unimodular");
        let y = u.mul_vec(&sigma_s.mul_vec(&lift));
        cols.push(y[rank..].to_vec());
    }
    LatticeData::new(p, IntMatrix::from_columns(free, &cols))
}

/// `H^{ab}` for `H` the kernel of `free(r) → Z/p`, `τ_1 ↦ 1`, `τ_i ↦ 0`, with `τ_1` acting.
pub fn hab_module_structure(r: usize, p: u32) -> Result<CpLatticeClass> {
    if r == 0 {
        return Err(Error::Input("rank must be at least 1".into()));
    }
    let g = Presentation::free(r);
    let images: Vec<Vec<u32>> = (0..r).map(|i| vec![u32::from(i == 0)]).collect();
    let sd = SubgroupData::from_table(kernel_table(&g, &images, p)?);
    cp_lattice_classify(&conjugation_lattice(&sd, &Word::gen(0), p)?)
}

/// `H^{ab}` for `H` the kernel of `C_p * ... * C_p → Z/p` sending every generator to 1.
pub fn fbar_structure(n: usize, p: u32) -> Result<CpLatticeClass> {
    if n == 0 {
        return Err(Error::Input("need at least one factor".into()));
    }
    if !crate::exactlin::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let rels = (0..n).map(|i| Word::gen(i).pow(p as i64)).collect();
    let g = Presentation::with_default_names(n, rels, format!("*{n} C{p}"));
    let sd = SubgroupData::from_table(kernel_table(&g, &vec![vec![1]; n], p)?);
    cp_lattice_classify(&conjugation_lattice(&sd, &Word::gen(0), p)?)
}
