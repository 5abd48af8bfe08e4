use std::collections::VecDeque;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fpgroup::word::{gen_of, letter, Letter, Word};
use crate::fpgroup::{coset_enumerate, Presentation};

pub const DEFAULT_MAX_ORDER: usize = 256;

/// A finite p-group realized by its Cayley table, built from the regular coset table.
#[derive(Debug)]
pub struct FiniteGroup {
    p: u32,
    presentation: Presentation,
    /// mult[a][b] = a b
    mult: Vec<Vec<usize>>,
    inv: Vec<usize>,
    /// element of each generator
    gens: Vec<usize>,
    /// shortest words, with (parent, letter) such that e = parent * letter
    words: Vec<Word>,
    tree: Vec<Option<(usize, Letter)>>,
    bfs: Vec<usize>,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.presentation == other.presentation
    }
}

impl Eq for FiniteGroup {}

fn is_power_of(n: usize, p: u32) -> bool {
    let mut n = n;
    while n.is_multiple_of(p as usize) {
        n /= p as usize;
    }
    n == 1
}

impl FiniteGroup {
    pub fn from_presentation(pres: &Presentation, p: u32, max_order: usize) -> Result<Arc<Self>> {
        if !crate::exactlin::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let table = coset_enumerate(pres, &[], max_order)?;
        let n = table.index();
        if !is_power_of(n, p) {
            return Err(Error::NonPGroup(format!(
                "{} has order {n}, not a power of {p}",
                pres.label()
            )));
        }
        let ng = pres.n_gens();
        // right multiplication by letters comes straight from the table
        let right = |e: usize, l: Letter| table.act(e, l);
        let mut tree = vec![None; n];
        let mut seen = vec![false; n];
        let mut bfs = vec![0];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(e) = queue.pop_front() {
            for g in 0..ng {
                for inverse in [false, true] {
                    let l = letter(g, inverse);
                    let f = right(e, l);
                    if !seen[f] {
                        seen[f] = true;
                        tree[f] = Some((e, l));
                        bfs.push(f);
                        queue.push_back(f);
                    }
                }
            }
        }
        let mut words = vec![Word::empty(); n];
        for &e in &bfs[1..] {
            let (par, l) = tree[e].unwrap();
            words[e] = words[par].mul(&Word::new(&[l]));
        }
        let mut mult = vec![vec![0usize; n]; n];
        for (a, row) in mult.iter_mut().enumerate() {
            row[0] = a;
            for &b in &bfs[1..] {
                let (par, l) = tree[b].unwrap();
                row[b] = right(row[par], l);
            }
        }
        let mut inv = vec![0; n];
        for a in 0..n {
            inv[a] = (0..n).find(|&b| mult[a][b] == 0).expect("group inverse");
        }
        let gens = (0..ng).map(|g| right(0, letter(g, false))).collect();
        Ok(Arc::new(FiniteGroup {
            p,
            presentation: pres.clone(),
            mult,
            inv,
            gens,
            words,
            tree,
            bfs,
        }))
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn order(&self) -> usize {
        self.mult.len()
    }
    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }
    pub fn n_gens(&self) -> usize {
        self.gens.len()
    }
    pub fn gen_elements(&self) -> &[usize] {
        &self.gens
    }
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a][b]
    }
    pub fn inverse(&self, a: usize) -> usize {
        self.inv[a]
    }
    pub fn word(&self, e: usize) -> &Word {
        &self.words[e]
    }
    /// Breadth-first order of elements; each non-identity element follows its tree parent.
    pub fn bfs_order(&self) -> &[usize] {
        &self.bfs
    }
    /// `(parent, letter)` with `e = parent * letter`.
    pub fn tree_parent(&self, e: usize) -> Option<(usize, Letter)> {
        self.tree[e]
    }

    pub fn element_of(&self, w: &Word) -> usize {
        w.letters().iter().fold(0, |e, &l| {
            let g = self.gens[gen_of(l)];
            self.mult[e][if l > 0 { g } else { self.inv[g] }]
        })
    }

    /// Subgroup generated by words in the generators, optionally checked against a claimed order.
    pub fn subgroup(self: &Arc<Self>, words: &[Word], claimed_order: Option<usize>) -> Result<Subgroup> {
        if let Some(w) = words.iter().find(|w| w.max_gen().is_some_and(|g| g >= self.n_gens())) {
            return Err(Error::SubgroupInvalid(format!("word {w:?} uses an unknown generator")));
        }
        let gen_elems: Vec<usize> = words.iter().map(|w| self.element_of(w)).collect();
        let k = words.len();
        // closure under right multiplication, with a spanning tree for the Cayley-graph presentation
        let mut index = vec![usize::MAX; self.order()];
        let mut elems = vec![0usize];
        let mut tword = vec![Word::empty()];
        index[0] = 0;
        let mut relators = Vec::new();
        let mut i = 0;
        while i < elems.len() {
            let e = elems[i];
            for (j, &g) in gen_elems.iter().enumerate() {
                let f = self.mult[e][g];
                let yj = Word::gen(j);
                if index[f] == usize::MAX {
                    index[f] = elems.len();
                    elems.push(f);
                    tword.push(tword[i].mul(&yj));
                } else {
                    relators.push(tword[i].mul(&yj).mul(&tword[index[f]].inverse()));
                }
            }
            i += 1;
        }
        if let Some(c) = claimed_order {
            if c != elems.len() {
                return Err(Error::SubgroupInvalid(format!(
                    "words generate a subgroup of order {}, not {c}",
                    elems.len()
                )));
            }
        }
        let label = format!("sub({})", self.presentation.label());
        let pres = Presentation::with_default_names(k, relators, label);
        // coset enumeration can overshoot the final order before it collapses
        let group = FiniteGroup::from_presentation(&pres, self.p, 64 * self.order() + 1024)?;
        let embedding: Vec<usize> = (0..group.order())
            .map(|e| {
                group.word(e).letters().iter().fold(0, |acc, &l| {
                    let g = gen_elems[gen_of(l)];
                    self.mult[acc][if l > 0 { g } else { self.inv[g] }]
                })
            })
            .collect();
        let mut restriction = vec![None; self.order()];
        for (h, &g) in embedding.iter().enumerate() {
            restriction[g] = Some(h);
        }
        Ok(Subgroup {
            group,
            parent: Arc::clone(self),
            words: words.to_vec(),
            embedding,
            restriction,
        })
    }

    /// Exhaustive check of the group axioms on the Cayley table.
    pub fn check_axioms(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| self.mult[0][a] == a && self.mult[a][0] == a && self.mult[a][self.inv[a]] == 0)
            && (0..n)
                .all(|a| (0..n).all(|b| (0..n).all(|c| self.mult[self.mult[a][b]][c] == self.mult[a][self.mult[b][c]])))
    }
}

/// `H <= G` given by generator words, with its own Cayley table.
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub group: Arc<FiniteGroup>,
    pub parent: Arc<FiniteGroup>,
    pub words: Vec<Word>,
    /// element of H -> element of G
    pub embedding: Vec<usize>,
    /// element of G -> element of H, if it lies in H
    pub restriction: Vec<Option<usize>>,
}

impl Subgroup {
    pub fn index(&self) -> usize {
        self.parent.order() / self.group.order()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn d4() -> Presentation {
        let a = Word::gen(0);
        let b = Word::gen(1);
        Presentation::with_default_names(2, vec![a.pow(4), b.pow(2), b.mul(&a).mul(&b.inverse()).mul(&a)], "D4")
    }

    #[test]
    fn cayley_tables() {
        let g = FiniteGroup::from_presentation(&d4(), 2, 256).unwrap();
        assert_eq!(g.order(), 8);
        assert!(g.check_axioms());
        let a = g.gen_elements()[0];
        let b = g.gen_elements()[1];
        assert_ne!(g.mul(a, b), g.mul(b, a));
        for e in 0..8 {
            assert_eq!(g.element_of(g.word(e)), e);
        }
    }

    #[test]
    fn subgroups_from_redundant_generators() {
        let c49 = Presentation::with_default_names(1, vec![Word::gen(0).pow(49)], "C49");
        let g = FiniteGroup::from_presentation(&c49, 7, 256).unwrap();
        let mut pairs = Vec::new();
        for e in 0..g.order() {
            for f in [3, 10, 31] {
                pairs.push(vec![g.word(e).clone(), g.word((e * f) % 49).clone()]);
            }
        }
        for words in pairs {
            let h = g.subgroup(&words, None).unwrap();
            assert!(h.group.check_axioms());
            assert_eq!(g.order() % h.group.order(), 0);
        }
    }

    #[test]
    fn non_p_groups_rejected() {
        let c6 = Presentation::with_default_names(1, vec![Word::gen(0).pow(6)], "C6");
        assert!(matches!(
            FiniteGroup::from_presentation(&c6, 2, 256),
            Err(Error::NonPGroup(_))
        ));
        assert!(matches!(
            FiniteGroup::from_presentation(&Presentation::free(1), 2, 256),
            Err(Error::BudgetExceeded(_))
        ));
        let triv = Presentation::with_default_names(0, vec![], "1");
        assert_eq!(FiniteGroup::from_presentation(&triv, 3, 256).unwrap().order(), 1);
    }

    #[test]
    fn subgroups() {
        let g = FiniteGroup::from_presentation(&d4(), 2, 256).unwrap();
        let a = Word::gen(0);
        let h = g.subgroup(std::slice::from_ref(&a), Some(4)).unwrap();
        assert_eq!(h.index(), 2);
        assert!(h.group.check_axioms());
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(h.embedding[h.group.mul(x, y)], g.mul(h.embedding[x], h.embedding[y]));
            }
        }
        assert!(matches!(
            g.subgroup(std::slice::from_ref(&a), Some(2)),
            Err(Error::SubgroupInvalid(_))
        ));
        let triv = g.subgroup(&[], None).unwrap();
        assert_eq!(triv.group.order(), 1);
        let whole = g.subgroup(&[a, Word::gen(1)], Some(8)).unwrap();
        assert_eq!(whole.index(), 1);
    }
}
