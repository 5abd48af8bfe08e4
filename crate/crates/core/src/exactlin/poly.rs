use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fp::{inv_mod, is_prime, nullspace, rref, FpMatrix, Subspace};
use crate::error::{Error, Result};

/// Univariate polynomial over `F_p`, coefficients low to high, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpPoly {
    p: u32,
    coeffs: Vec<u32>,
}

impl fmt::Debug for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, c) => write!(f, "{c}x")?,
                (i, 1) => write!(f, "x^{i}")?,
                (i, c) => write!(f, "{c}x^{i}")?,
            }
        }
        Ok(())
    }
}

impl FpPoly {
    pub fn new(p: u32, coeffs: Vec<u32>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self::from_coeffs(p, coeffs))
    }

    fn from_coeffs(p: u32, mut coeffs: Vec<u32>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FpPoly { p, coeffs }
    }

    pub fn zero(p: u32) -> Self {
        FpPoly { p, coeffs: vec![] }
    }
    pub fn one(p: u32) -> Self {
        Self::from_coeffs(p, vec![1])
    }
    pub fn x(p: u32) -> Self {
        Self::from_coeffs(p, vec![0, 1])
    }
    /// `x - a`
    pub fn linear(p: u32, a: u32) -> Self {
        Self::from_coeffs(p, vec![(p - a % p) % p, 1])
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }
    pub fn lead(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.lead(), self.p);
        self.scale(inv)
    }

    pub fn scale(&self, c: u32) -> Self {
        let p = self.p as u64;
        Self::from_coeffs(
            self.p,
            self.coeffs.iter().map(|&a| (a as u64 * c as u64 % p) as u32).collect(),
        )
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = o.coeffs.get(i).copied().unwrap_or(0);
                (a + b) % self.p
            })
            .collect();
        Self::from_coeffs(self.p, c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(self.p - 1))
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p);
        }
        let p = self.p as u64;
        let mut c = vec![0u64; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in o.coeffs.iter().enumerate() {
                c[i + j] = (c[i + j] + a as u64 * b as u64) % p;
            }
        }
        Self::from_coeffs(self.p, c.into_iter().map(|x| x as u32).collect())
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one(self.p);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let p = self.p as u64;
        let mut r = self.coeffs.clone();
        let dd = d.coeffs.len() - 1;
        let inv = inv_mod(d.lead(), self.p) as u64;
        if r.len() < d.coeffs.len() {
            return (Self::zero(self.p), self.clone());
        }
        let mut q = vec![0u32; r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r[k + dd] as u64 * inv % p;
            q[k] = c as u32;
            if c == 0 {
                continue;
            }
            for (j, &b) in d.coeffs.iter().enumerate() {
                r[k + j] = ((r[k + j] as u64 + (p - c) * b as u64) % p) as u32;
            }
        }
        (Self::from_coeffs(self.p, q), Self::from_coeffs(self.p, r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let p = self.p as u64;
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &a)| (a as u64 * (i as u64 % p) % p) as u32)
            .collect();
        Self::from_coeffs(self.p, c)
    }

    pub fn eval(&self, x: u32) -> u32 {
        let p = self.p as u64;
        self.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| (acc * x as u64 + c as u64) % p) as u32
    }

    /// `self^e mod m`
    fn pow_mod(&self, mut e: u128, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = Self::one(self.p).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    /// Evaluate at a square matrix (Horner).
    pub fn eval_matrix(&self, m: &FpMatrix) -> FpMatrix {
        let n = m.rows();
        let mut acc = FpMatrix::zeros(self.p, n, n);
        let id = FpMatrix::identity(self.p, n);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(m);
            acc.add_scaled(&id, c);
        }
        acc
    }

    /// p-th root of a polynomial in `x^p` (Frobenius is the identity on `F_p`).
    fn pth_root(&self) -> Self {
        let p = self.p as usize;
        let c = self.coeffs.iter().step_by(p).copied().collect();
        Self::from_coeffs(self.p, c)
    }

    pub fn is_irreducible(&self) -> bool {
        match self.degree() {
            None | Some(0) => false,
            Some(1) => true,
            Some(_) => {
                let f = factor_poly(self).expect("nonzero");
                f.len() == 1 && f[0].1 == 1
            }
        }
    }
}

/// Characteristic polynomial `det(x I - m)`, via reduction to Hessenberg form.
pub fn charpoly(m: &FpMatrix) -> FpPoly {
    assert!(m.is_square(), "charpoly of non-square matrix");
    let p = m.p();
    let p64 = p as u64;
    let n = m.rows();
    let mut h = m.clone();
    for c in 0..n.saturating_sub(2) {
        let Some(i) = (c + 1..n).find(|&i| h.get(i, c) != 0) else {
            continue;
        };
        let r = c + 1;
        if i != r {
            for j in 0..n {
                let (a, b) = (h.get(i, j), h.get(r, j));
                h.set(i, j, b);
                h.set(r, j, a);
            }
            for k in 0..n {
                let (a, b) = (h.get(k, i), h.get(k, r));
                h.set(k, i, b);
                h.set(k, r, a);
            }
        }
        let t = inv_mod(h.get(r, c), p) as u64;
        for i in r + 1..n {
            let u = h.get(i, c) as u64 * t % p64;
            if u == 0 {
                continue;
            }
            // row_i -= u row_r ; col_r += u col_i
            for j in 0..n {
                let v = (h.get(i, j) as u64 + (p64 - u) * h.get(r, j) as u64) % p64;
                h.set(i, j, v as u32);
            }
            for k in 0..n {
                let v = (h.get(k, r) as u64 + u * h.get(k, i) as u64) % p64;
                h.set(k, r, v as u32);
            }
        }
    }
    // recurrence on leading principal minors
    let mut polys: Vec<FpPoly> = vec![FpPoly::one(p)];
    for k in 0..n {
        let mut next = FpPoly::linear(p, h.get(k, k)).mul(&polys[k]);
        let mut prod = 1u64;
        for i in (0..k).rev() {
            prod = prod * h.get(i + 1, i) as u64 % p64;
            if prod == 0 {
                break;
            }
            let coef = prod * h.get(i, k) as u64 % p64;
            next = next.sub(&polys[i].scale(coef as u32));
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

/// Square-free factorization of a monic polynomial: `[(g, e)]` with `f = prod g^e`.
fn square_free(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let p = f.p() as usize;
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let d = f.derivative();
    if d.is_zero() {
        for (g, e) in square_free(&f.pth_root()) {
            out.push((g, e * p));
        }
        return out;
    }
    let mut c = f.gcd(&d);
    let mut w = f.div_rem(&c).0;
    let mut i = 1;
    while w.degree().unwrap_or(0) > 0 {
        let y = w.gcd(&c);
        let fac = w.div_rem(&y).0;
        if fac.degree().unwrap_or(0) > 0 {
            out.push((fac.monic(), i));
        }
        w = y;
        c = c.div_rem(&w).0;
        i += 1;
    }
    if c.degree().unwrap_or(0) > 0 {
        for (g, e) in square_free(&c.pth_root()) {
            out.push((g, e * p));
        }
    }
    out
}

/// Distinct-degree factorization of a square-free monic polynomial.
fn distinct_degree(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let p = f.p();
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = FpPoly::x(p);
    let mut h = x.clone();
    let mut d = 1;
    while let Some(deg) = rest.degree() {
        if deg < 2 * d {
            if deg > 0 {
                out.push((rest.monic(), deg));
            }
            break;
        }
        h = h.pow_mod(p as u128, &rest);
        let g = h.sub(&x).gcd(&rest);
        if g.degree().unwrap_or(0) > 0 {
            out.push((g.clone(), d));
            rest = rest.div_rem(&g).0;
            h = h.rem(&rest);
        }
        d += 1;
    }
    out
}

/// Equal-degree splitting (Cantor–Zassenhaus) with a fixed-seed generator.
fn equal_degree(f: &FpPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    let n = f.degree().unwrap();
    if n == d {
        return vec![f.monic()];
    }
    if n <= 3 {
        return split_by_roots(f);
    }
    let p = f.p();
    loop {
        let a = FpPoly::from_coeffs(p, (0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let g = if p == 2 {
            // trace map a + a^2 + ... + a^(2^(d-1))
            let mut t = a.rem(f);
            let mut s = t.clone();
            for _ in 1..d {
                t = t.mul(&t).rem(f);
                s = s.add(&t);
            }
            s.gcd(f)
        } else {
            let e = ((p as u128).pow(d as u32) - 1) / 2;
            a.pow_mod(e, f).sub(&FpPoly::one(p)).gcd(f)
        };
        let gd = g.degree().unwrap_or(0);
        if gd > 0 && gd < n {
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&f.div_rem(&g).0, d, rng));
            return out;
        }
    }
}

/// Split a square-free polynomial of degree at most 3 by root enumeration.
fn split_by_roots(f: &FpPoly) -> Vec<FpPoly> {
    let p = f.p();
    let mut rest = f.monic();
    let mut out = Vec::new();
    for a in 0..p {
        if rest.degree().unwrap_or(0) == 0 {
            break;
        }
        if rest.eval(a) == 0 {
            let l = FpPoly::linear(p, a);
            out.push(l.clone());
            rest = rest.div_rem(&l).0;
        }
    }
    if rest.degree().unwrap_or(0) > 0 {
        out.push(rest);
    }
    out
}

/// Factor into monic irreducibles with multiplicities, sorted by (degree, coefficients).
pub fn factor_poly(f: &FpPoly) -> Result<Vec<(FpPoly, usize)>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut out: Vec<(FpPoly, usize)> = Vec::new();
    for (g, e) in square_free(&f.monic()) {
        for (h, d) in distinct_degree(&g) {
            for irr in equal_degree(&h, d, &mut rng) {
                match out.iter_mut().find(|(q, _)| *q == irr) {
                    Some(slot) => slot.1 += e,
                    None => out.push((irr, e)),
                }
            }
        }
    }
    out.sort_by(|a, b| (a.0.degree(), &a.0.coeffs).cmp(&(b.0.degree(), &b.0.coeffs)));
    Ok(out)
}

/// `ker f(m)^n` with `n` the dimension; an `m`-invariant subspace.
pub fn generalized_kernel(m: &FpMatrix, f: &FpPoly) -> Subspace {
    assert!(m.is_square());
    let n = m.rows();
    let mut a = f.eval_matrix(m);
    let mut r = rref(&a).1;
    let mut k = 1;
    while k < n {
        let sq = a.mul(&a);
        let r2 = rref(&sq).1;
        a = sq;
        k *= 2;
        if r2 == r {
            break;
        }
        r = r2;
    }
    nullspace(&a)
}
