use std::collections::VecDeque;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::coset::{letter_of_column, CosetTable};
use super::presentation::Presentation;
use super::word::{gen_of, letter, Letter, Word};
use crate::error::{Error, Result};

/// Spanning tree of the coset graph rooted at coset 0.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SchreierTree {
    /// (parent coset, column used to reach this coset) for every non-root coset
    parent: Vec<Option<(usize, usize)>>,
    transversal: Vec<Word>,
    /// positive edge (coset, gen) -> Schreier generator index, `None` on tree edges
    edge_gen: Vec<Vec<Option<usize>>>,
    /// Schreier generators as (coset, gen)
    gens: Vec<(usize, usize)>,
}

/// Traversal order for the spanning tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeOrder {
    BreadthFirst,
    DepthFirst,
}

impl SchreierTree {
    pub fn build(table: &CosetTable, order: TreeOrder) -> Self {
        let n = table.index();
        let ng = table.presentation().n_gens();
        let cols = 2 * ng;
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut transversal = vec![Word::empty(); n];
        let mut tree_edge = vec![vec![false; ng]; n];
        seen[0] = true;
        let mut work: VecDeque<usize> = VecDeque::from([0]);
        while let Some(c) = match order {
            TreeOrder::BreadthFirst => work.pop_front(),
            TreeOrder::DepthFirst => work.pop_back(),
        } {
            for col in 0..cols {
                let d = table.rows()[c][col];
                if seen[d] {
                    continue;
                }
                seen[d] = true;
                parent[d] = Some((c, col));
                transversal[d] = transversal[c].mul(&Word::new(&[letter_of_column(col)]));
                let g = col / 2;
                if col % 2 == 0 {
                    tree_edge[c][g] = true;
                } else {
                    tree_edge[d][g] = true;
                }
                work.push_back(d);
            }
        }
        let mut edge_gen = vec![vec![None; ng]; n];
        let mut gens = Vec::new();
        for c in 0..n {
            for g in 0..ng {
                if !tree_edge[c][g] {
                    edge_gen[c][g] = Some(gens.len());
                    gens.push((c, g));
                }
            }
        }
        SchreierTree {
            parent,
            transversal,
            edge_gen,
            gens,
        }
    }

    pub fn transversal(&self) -> &[Word] {
        &self.transversal
    }

    pub fn n_gens(&self) -> usize {
        self.gens.len()
    }

    pub fn gen_edges(&self) -> &[(usize, usize)] {
        &self.gens
    }

    pub fn edge_gen(&self, coset: usize, gen: usize) -> Option<usize> {
        self.edge_gen[coset][gen]
    }

    pub fn parent(&self, coset: usize) -> Option<(usize, usize)> {
        self.parent[coset]
    }

    /// Parent-group word `t_c x t_{cx}^-1` of a Schreier generator.
    pub fn gen_word(&self, table: &CosetTable, s: usize) -> Word {
        let (c, g) = self.gens[s];
        let d = table.act_gen(c, g);
        self.transversal[c]
            .mul(&Word::gen(g))
            .mul(&self.transversal[d].inverse())
    }

    /// Trace `w` from `coset`, calling `emit(schreier_gen, sign)` on every non-tree edge.
    pub fn trace_edges(
        &self,
        table: &CosetTable,
        coset: usize,
        w: &[Letter],
        mut emit: impl FnMut(usize, i32),
    ) -> usize {
        let mut c = coset;
        for &l in w {
            let g = gen_of(l);
            if l > 0 {
                if let Some(s) = self.edge_gen[c][g] {
                    emit(s, 1);
                }
                c = table.act_gen(c, g);
            } else {
                let d = table.act(c, l);
                if let Some(s) = self.edge_gen[d][g] {
                    emit(s, -1);
                }
                c = d;
            }
        }
        c
    }

    /// Word in Schreier generators read along `w` from `coset`, and the end coset.
    pub fn trace_word(&self, table: &CosetTable, coset: usize, w: &Word) -> (Word, usize) {
        let mut out: Vec<Letter> = Vec::new();
        let end = self.trace_edges(table, coset, w.letters(), |s, sign| out.push(letter(s, sign < 0)));
        (Word::new(&out), end)
    }
}

/// Tietze-reduced subgroup presentation with its substitution map.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReducedPresentation {
    pub presentation: Presentation,
    /// Schreier generator index -> word in the surviving generators
    pub substitution: Vec<Word>,
    /// surviving generator -> Schreier generator index it came from
    pub survivors: Vec<usize>,
}

/// A finite-index subgroup with its coset table, transversal and
/// Reidemeister–Schreier presentation.
#[derive(Debug, Serialize, Deserialize)]
pub struct SubgroupData {
    table: CosetTable,
    tree: SchreierTree,
    raw_relators: Vec<Word>,
    #[serde(skip)]
    reduced: OnceLock<ReducedPresentation>,
}

impl Clone for SubgroupData {
    fn clone(&self) -> Self {
        let reduced = OnceLock::new();
        if let Some(r) = self.reduced.get() {
            let _ = reduced.set(r.clone());
        }
        SubgroupData {
            table: self.table.clone(),
            tree: self.tree.clone(),
            raw_relators: self.raw_relators.clone(),
            reduced,
        }
    }
}

impl SubgroupData {
    pub fn from_table(table: CosetTable) -> Self {
        Self::with_order(table, TreeOrder::BreadthFirst)
    }

    pub fn with_order(mut table: CosetTable, order: TreeOrder) -> Self {
        let tree = SchreierTree::build(&table, order);
        let mut raw_relators = Vec::new();
        for c in 0..table.index() {
            for r in table.presentation().relators() {
                let (w, end) = tree.trace_word(&table, c, r);
                debug_assert_eq!(end, c);
                let w = w.cyclically_reduce();
                if !w.is_empty() {
                    raw_relators.push(w);
                }
            }
        }
        if table.sub_gens().is_empty() && table.index() > 0 {
            let gens = (0..tree.n_gens()).map(|s| tree.gen_word(&table, s)).collect();
            table.set_sub_gens(gens);
        }
        SubgroupData {
            table,
            tree,
            raw_relators,
            reduced: OnceLock::new(),
        }
    }

    pub fn table(&self) -> &CosetTable {
        &self.table
    }
    pub fn tree(&self) -> &SchreierTree {
        &self.tree
    }
    pub fn parent(&self) -> &Presentation {
        self.table.presentation()
    }
    pub fn index(&self) -> usize {
        self.table.index()
    }
    pub fn transversal(&self) -> &[Word] {
        self.tree.transversal()
    }
    /// Number of Schreier generators before Tietze reduction.
    pub fn n_schreier_gens(&self) -> usize {
        self.tree.n_gens()
    }
    pub fn raw_relators(&self) -> &[Word] {
        &self.raw_relators
    }

    /// Parent-group words of the Schreier generators.
    pub fn schreier_gen_words(&self) -> Vec<Word> {
        (0..self.tree.n_gens())
            .map(|s| self.tree.gen_word(&self.table, s))
            .collect()
    }

    /// Rewrite a parent word lying in the subgroup as a word in Schreier generators.
    pub fn rewrite_raw(&self, w: &Word) -> Result<Word> {
        let (out, end) = self.tree.trace_word(&self.table, 0, w);
        if end != 0 {
            return Err(Error::Membership(format!("word {:?} ends at coset {end}", w.letters())));
        }
        Ok(out)
    }

    /// Rewrite into the generators of the reduced presentation.
    pub fn rewrite(&self, w: &Word) -> Result<Word> {
        let raw = self.rewrite_raw(w)?;
        Ok(raw.substitute(&self.reduced().substitution))
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.table.trace(0, w) == 0
    }

    pub fn reduced(&self) -> &ReducedPresentation {
        self.reduced
            .get_or_init(|| tietze(self.tree.n_gens(), &self.raw_relators, &self.table))
    }

    pub fn presentation(&self) -> &Presentation {
        &self.reduced().presentation
    }

    /// Parent-group words of the reduced presentation's generators.
    pub fn generator_words(&self) -> Vec<Word> {
        let red = self.reduced();
        red.survivors
            .iter()
            .map(|&s| self.tree.gen_word(&self.table, s))
            .collect()
    }
}

pub fn reidemeister_schreier(table: &CosetTable) -> SubgroupData {
    let data = SubgroupData::from_table(table.clone());
    data.reduced();
    data
}

/// Eliminate generators using relators of length one and two only.
fn tietze(n: usize, relators: &[Word], table: &CosetTable) -> ReducedPresentation {
    let mut subst: Vec<Word> = (0..n).map(Word::gen).collect();
    let mut alive = vec![true; n];
    let mut rels: Vec<Word> = relators.to_vec();
    loop {
        let found = rels
            .iter()
            .position(|r| r.len() == 1 || (r.len() == 2 && gen_of(r.letters()[0]) != gen_of(r.letters()[1])));
        let Some(k) = found else { break };
        let r = rels.swap_remove(k);
        let ls = r.letters();
        // eliminate x = gen_of(ls[0]) with x^e y^f = 1 (or x^e = 1)
        let x = gen_of(ls[0]);
        let image = if ls.len() == 1 {
            Word::empty()
        } else {
            // x^e = y^-f  =>  x = (y^-f)^e
            let yf = Word::new(&[ls[1]]).inverse();
            if ls[0] > 0 {
                yf
            } else {
                yf.inverse()
            }
        };
        let mut step: Vec<Word> = (0..n).map(Word::gen).collect();
        step[x] = image;
        alive[x] = false;
        for s in subst.iter_mut() {
            *s = s.substitute(&step);
        }
        rels = rels
            .iter()
            .map(|w| w.substitute(&step).cyclically_reduce())
            .filter(|w| !w.is_empty())
            .collect();
    }
    let survivors: Vec<usize> = (0..n).filter(|&i| alive[i]).collect();
    let mut renumber = vec![Word::empty(); n];
    for (k, &s) in survivors.iter().enumerate() {
        renumber[s] = Word::gen(k);
    }
    let substitution: Vec<Word> = subst.iter().map(|w| w.substitute(&renumber)).collect();
    let rels: Vec<Word> = rels.iter().map(|w| w.substitute(&renumber)).collect();
    let parent = table.presentation();
    let names = (0..survivors.len()).map(|k| format!("y{}", k + 1)).collect();
    let presentation = Presentation::new(
        names,
        rels,
        format!("subgroup of index {} in {}", table.index(), parent.label()),
    );
    ReducedPresentation {
        presentation,
        substitution,
        survivors,
    }
}
