use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::presentation::Presentation;
use super::word::Word;
use crate::exactlin::int::{smith_normal_form, IntMatrix, SmithForm};
use crate::exactlin::sparse::{sparse_from_counts, SparseEchelon, SparseRow};

/// Invariant factors of `G^ab` and its mod-p dimension `d = dim G/G^*`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AbelianizationData {
    pub p: u32,
    pub n_gens: usize,
    pub free_rank: usize,
    /// invariant factors greater than one
    pub torsion: Vec<BigInt>,
    pub mod_p_dim: usize,
    snf: SmithForm,
}

impl AbelianizationData {
    /// Exponent-sum vector of a word (a homomorphism `F -> Z^n`).
    pub fn exponent_vector(&self, w: &Word) -> Vec<i64> {
        w.exponent_sums(self.n_gens)
    }

    /// Coordinates in `Z^free_rank x prod Z/d_i`: torsion coordinates first (reduced), then free ones.
    pub fn coordinates(&self, w: &Word) -> Vec<BigInt> {
        let x: Vec<BigInt> = self.exponent_vector(w).into_iter().map(BigInt::from).collect();
        // columns of the relation matrix are relators; y = U x
        let y = self.snf.left.mul_vec(&x);
        let k = self.snf.rank;
        let mut out = Vec::new();
        for (i, d) in self.snf.diag.iter().enumerate() {
            if !d.is_one() {
                out.push(y[i].mod_floor(d));
            }
        }
        out.extend(y[k..].iter().cloned());
        out
    }
}

pub fn abelianization(pres: &Presentation, p: u32) -> AbelianizationData {
    let n = pres.n_gens();
    // relation matrix with relators as columns
    let mut rel = IntMatrix::zeros(n, pres.relators().len());
    for (j, r) in pres.relators().iter().enumerate() {
        for (i, e) in r.exponent_sums(n).into_iter().enumerate() {
            rel.set(i, j, BigInt::from(e));
        }
    }
    let snf = smith_normal_form(&rel);
    let free_rank = n - snf.rank;
    let torsion: Vec<BigInt> = snf.diag.iter().filter(|d| !d.is_one()).cloned().collect();
    let pb = BigInt::from(p);
    let mod_p_dim = free_rank + torsion.iter().filter(|d| (*d % &pb).is_zero()).count();
    AbelianizationData {
        p,
        n_gens: n,
        free_rank,
        torsion,
        mod_p_dim,
        snf,
    }
}

/// `F_p^n / span(relator exponent vectors)` with coordinates on the free columns
/// of a sparse echelon form.
#[derive(Clone, Debug)]
pub struct ModPAbelianization {
    echelon: SparseEchelon,
    free_index: Vec<Option<usize>>,
    dim: usize,
}

impl ModPAbelianization {
    pub fn new(p: u32, n_gens: usize, relators: &[Word]) -> Self {
        let mut echelon = SparseEchelon::new(p, n_gens);
        for r in relators {
            let counts = r.letters().iter().map(|&l| (super::word::gen_of(l), l.signum() as i64));
            echelon.insert(sparse_from_counts(counts, p));
        }
        Self::from_echelon(echelon)
    }

    pub fn from_echelon(echelon: SparseEchelon) -> Self {
        let mut free_index = vec![None; echelon.ncols()];
        let free = echelon.free_columns();
        for (k, &c) in free.iter().enumerate() {
            free_index[c] = Some(k);
        }
        ModPAbelianization {
            dim: free.len(),
            echelon,
            free_index,
        }
    }

    pub fn p(&self) -> u32 {
        self.echelon.p()
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn n_gens(&self) -> usize {
        self.echelon.ncols()
    }

    /// Generators whose classes form the quotient basis.
    pub fn basis_generators(&self) -> Vec<usize> {
        self.echelon.free_columns()
    }

    pub fn project(&self, v: SparseRow) -> Vec<u32> {
        self.echelon.quotient_coords(v, &self.free_index, self.dim)
    }

    pub fn project_counts(&self, counts: impl IntoIterator<Item = (usize, i64)>) -> Vec<u32> {
        self.project(sparse_from_counts(counts, self.p()))
    }
}
