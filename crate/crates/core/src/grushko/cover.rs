use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fpgroup::{kernel_table, same_subgroup, Presentation, StallingsGraph, SubgroupData, Word};

/// Explicit basis of the index-`p` kernel of `τ_1 ↦ 1`, `τ_i ↦ 0` in the free group of rank `r`,
/// with its checks against Reidemeister–Schreier.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverBasis {
    pub r: usize,
    pub p: u32,
    pub words: Vec<Word>,
    pub rs_words: Vec<Word>,
    pub count_ok: bool,
    pub kernel_ok: bool,
    /// both generating sets fold to the same subgroup
    pub same_subgroup: bool,
    /// rank of the folded graph of `words`
    pub folded_rank: usize,
}

impl CoverBasis {
    pub fn verified(&self) -> bool {
        self.count_ok && self.kernel_ok && self.same_subgroup && self.folded_rank == self.words.len()
    }
}

/// `τ_1^p` followed by `τ_1^k τ_i τ_1^{-k}` for `i = 2..r`, `k = 0..p-1`.
pub fn cover_words(r: usize, p: u32) -> Vec<Word> {
    let t1 = Word::gen(0);
    let mut out = vec![t1.pow(p as i64)];
    for i in 1..r {
        for k in 0..p as i64 {
            out.push(Word::gen(i).conjugate_by(&t1.pow(k)));
        }
    }
    out
}

pub fn schreier_basis_cyclic_cover(r: usize, p: u32) -> Result<CoverBasis> {
    if r == 0 {
        return Err(Error::Input("rank must be at least 1".into()));
    }
    if !crate::exactlin::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let words = cover_words(r, p);
    let count_ok = words.len() == p as usize * (r - 1) + 1;
    let kernel_ok = words.iter().all(|w| w.exponent_sums(r)[0].rem_euclid(p as i64) == 0);
    let images: Vec<Vec<u32>> = (0..r).map(|i| vec![u32::from(i == 0)]).collect();
    let sd = SubgroupData::from_table(kernel_table(&Presentation::free(r), &images, p)?);
    let rs_words = sd.schreier_gen_words();
    Ok(CoverBasis {
        r,
        p,
        same_subgroup: same_subgroup(&words, &rs_words),
        folded_rank: StallingsGraph::new(&words).rank(),
        words,
        rs_words,
        count_ok,
        kernel_ok,
    })
}
