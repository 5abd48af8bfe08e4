//! Free products: Kurosh data for finite-index subgroups, Grushko counts, cyclic covers and
//! `Z[C_p]`-lattices.

pub mod cover;
pub mod lattice;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

pub use cover::{cover_words, schreier_basis_cyclic_cover, CoverBasis};
pub use lattice::{
    conjugation_lattice, cp_lattice_classify, fbar_structure, hab_module_structure, random_unimodular, CpLatticeClass,
    LatticeData,
};

use crate::ends::{Descriptor, ProPDescriptor};
use crate::error::{Error, Result};
use crate::fpgroup::word::default_names;
use crate::fpgroup::{coset_enumerate, kernel_table, CosetTable, Presentation, SubgroupData, Word};

/// Where a free-indecomposability tag came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TagSource {
    /// finite groups, `Z_p`, and direct products with a nontrivial finite factor
    Catalog,
    User,
    Untagged,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub expr: Descriptor,
    pub freely_indecomposable: bool,
    pub is_zp: bool,
    pub source: TagSource,
}

impl Factor {
    pub fn catalog(expr: Descriptor) -> Factor {
        let (ind, zp, source) = match &expr {
            Descriptor::Zp => (true, true, TagSource::Catalog),
            Descriptor::Cyclic(_) | Descriptor::Finite(_) | Descriptor::DirectProduct(..) => {
                (true, false, TagSource::Catalog)
            }
            Descriptor::FreeProP(1) => (true, true, TagSource::Catalog),
            _ => (false, false, TagSource::Untagged),
        };
        Factor {
            expr,
            freely_indecomposable: ind,
            is_zp: zp,
            source,
        }
    }

    /// A factor asserted freely indecomposable by the caller.
    pub fn tagged(expr: Descriptor) -> Factor {
        Factor {
            is_zp: matches!(expr, Descriptor::Zp),
            expr,
            freely_indecomposable: true,
            source: TagSource::User,
        }
    }

    fn n_gens(&self) -> usize {
        ProPDescriptor {
            p: 2,
            expr: self.expr.clone(),
        }
        .compile()
        .map_or(0, |g| g.n_gens())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeProductDescriptor {
    pub p: u32,
    pub factors: Vec<Factor>,
    /// rank of the explicit free part
    pub free_rank: usize,
}

impl FreeProductDescriptor {
    pub fn new(p: u32, factors: Vec<Factor>, free_rank: usize) -> Result<Self> {
        if !crate::exactlin::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if factors.is_empty() && free_rank == 0 {
            return Err(Error::Input("free product with no factors".into()));
        }
        Ok(FreeProductDescriptor { p, factors, free_rank })
    }

    /// Splits the top-level free product; `free(r)` nodes go to the free part.
    pub fn from_descriptor(desc: &ProPDescriptor) -> Result<Self> {
        let parts = match &desc.expr {
            Descriptor::FreeProduct(fs) => fs.clone(),
            e => vec![e.clone()],
        };
        let mut factors = Vec::new();
        let mut free_rank = 0;
        for e in parts {
            match e {
                Descriptor::FreeProP(r) => free_rank += r,
                Descriptor::FreeProduct(inner) => {
                    let sub = FreeProductDescriptor::from_descriptor(&ProPDescriptor::new(
                        desc.p,
                        Descriptor::FreeProduct(inner),
                    )?)?;
                    factors.extend(sub.factors);
                    free_rank += sub.free_rank;
                }
                e => factors.push(Factor::catalog(e)),
            }
        }
        FreeProductDescriptor::new(desc.p, factors, free_rank)
    }

    /// Factors with the free part expanded into copies of `Z_p`.
    pub fn kurosh_factors(&self) -> Vec<Factor> {
        let mut out = self.factors.clone();
        out.extend((0..self.free_rank).map(|_| Factor::catalog(Descriptor::Zp)));
        out
    }

    pub fn descriptor(&self) -> ProPDescriptor {
        let exprs: Vec<Descriptor> = self.kurosh_factors().into_iter().map(|f| f.expr).collect();
        let expr = if exprs.len() == 1 {
            exprs[0].clone()
        } else {
            Descriptor::FreeProduct(exprs)
        };
        ProPDescriptor { p: self.p, expr }
    }

    pub fn compile(&self) -> Result<Presentation> {
        self.descriptor().compile()
    }

    /// Every factor is `Z_p`.
    pub fn is_free(&self) -> bool {
        self.factors.iter().all(|f| f.is_zp)
    }

    pub fn has_torsion(&self) -> bool {
        self.factors.iter().any(|f| f.expr.has_torsion())
    }

    /// Number of freely indecomposable factors, the free part counted by rank.
    pub fn s(&self) -> usize {
        self.factors.len() + self.free_rank
    }

    pub fn f(&self) -> usize {
        if self.is_free() {
            self.s()
        } else {
            self.s() - 1
        }
    }

    pub fn untagged(&self) -> bool {
        self.factors.iter().any(|f| !f.freely_indecomposable)
    }

    pub fn tag_lines(&self) -> Vec<String> {
        self.kurosh_factors()
            .iter()
            .map(|f| {
                format!(
                    "{}: indecomposable={} zp={} source={:?}",
                    f.expr, f.freely_indecomposable, f.is_zp, f.source
                )
            })
            .collect()
    }
}

impl std::fmt::Display for FreeProductDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.descriptor().expr)
    }
}

/// How the finite-index subgroup is given.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubgroupSpec {
    Generators(Vec<Word>),
    /// kernel of the map to `(Z/modulus)^k` with one image vector per generator
    Kernel {
        modulus: u32,
        images: Vec<Vec<u32>>,
    },
}

impl SubgroupSpec {
    pub fn table(&self, g: &Presentation, budget: usize) -> Result<CosetTable> {
        match self {
            SubgroupSpec::Generators(ws) => coset_enumerate(g, ws, budget),
            SubgroupSpec::Kernel { modulus, images } => {
                if *modulus < 2 {
                    return Err(Error::Input("kernel modulus must be at least 2".into()));
                }
                let k = images.first().map_or(0, |v| v.len());
                let size = (*modulus as usize).checked_pow(k as u32).unwrap_or(usize::MAX);
                if size > budget {
                    return Err(Error::BudgetExceeded(budget));
                }
                kernel_table(g, images, *modulus)
            }
        }
    }

    pub fn label(&self, g: &Presentation) -> String {
        match self {
            SubgroupSpec::Generators(ws) => {
                let parts: Vec<String> = ws.iter().map(|w| w.format(g.names())).collect();
                format!("<{}>", parts.join(", "))
            }
            SubgroupSpec::Kernel { modulus, images } => {
                let parts: Vec<String> = images
                    .iter()
                    .zip(g.names())
                    .map(|(v, n)| {
                        let v: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                        format!("{n}->{}", v.join(":"))
                    })
                    .collect();
                format!("ker mod {modulus} [{}]", parts.join(","))
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DoubleCoset {
    /// transversal word `s` with `H s G_i` this double coset
    pub representative: Word,
    /// first coset of the orbit reached
    pub coset: usize,
    pub orbit_size: usize,
    /// generators of `s G_i s^{-1} ∩ H`
    pub intersection_gens: Vec<Word>,
    pub intersection_trivial: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorKurosh {
    pub factor: String,
    /// `None` when the factor is infinite
    pub factor_order: Option<usize>,
    pub double_cosets: Vec<DoubleCoset>,
}

impl FactorKurosh {
    pub fn count(&self) -> usize {
        self.double_cosets.len()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KuroshReport {
    pub group: String,
    pub subgroup: String,
    pub index: usize,
    pub factors: Vec<FactorKurosh>,
    /// rank of the free part `F_r`
    pub r: i64,
    pub nontrivial_intersections: usize,
    /// `s(H)` = nontrivial intersections + r
    pub s_h: i64,
    /// `(G:H)(s(G)-1)+1`
    pub s_h_formula: i64,
    /// rank of `H` from the Kurosh data when `G` is free
    pub kurosh_rank: Option<i64>,
    /// rank of the Reidemeister–Schreier presentation when `G` is free
    pub rs_rank: Option<usize>,
    pub torsion_caveat: bool,
    pub tags: Vec<String>,
    pub notes: Vec<String>,
}

impl KuroshReport {
    pub fn rank_agrees(&self) -> Option<bool> {
        match (self.kurosh_rank, self.rs_rank) {
            (Some(k), Some(rs)) => Some(k == rs as i64),
            _ => None,
        }
    }
}

pub fn kurosh(g: &FreeProductDescriptor, h: &SubgroupSpec, budget: usize) -> Result<KuroshReport> {
    let pres = g.compile()?;
    let table = h.table(&pres, budget)?;
    let index = table.index();
    let sd = SubgroupData::from_table(table);
    let factors = g.kurosh_factors();
    let mut out = Vec::with_capacity(factors.len());
    let mut offset = 0;
    let mut notes = Vec::new();
    for f in &factors {
        let n = f.n_gens();
        let gens: Vec<usize> = (offset..offset + n).collect();
        offset += n;
        let factor_table = finite_factor(f, g.p, budget)?;
        out.push(factor_orbits(&sd, &gens, f, factor_table.as_ref()));
    }
    let r = out.iter().map(|f| index as i64 - f.count() as i64).sum::<i64>() - index as i64 + 1;
    let mut nontrivial = 0;
    let mut caveat = g.has_torsion();
    for (fk, f) in out.iter().zip(&factors) {
        for dc in &fk.double_cosets {
            if !dc.intersection_trivial {
                nontrivial += 1;
                if !f.freely_indecomposable {
                    caveat = true;
                }
            }
        }
    }
    if g.has_torsion() {
        notes.push("torsion factors present; s(H) formula is only asserted for torsion-free groups".into());
    }
    if g.untagged() {
        notes.push("some factors carry no free-indecomposability tag".into());
    }
    let free = g.is_free();
    let s_g = g.s() as i64;
    Ok(KuroshReport {
        group: g.to_string(),
        subgroup: h.label(&pres),
        index,
        r,
        nontrivial_intersections: nontrivial,
        s_h: nontrivial as i64 + r,
        s_h_formula: index as i64 * (s_g - 1) + 1,
        kurosh_rank: free.then(|| out.iter().map(|f| f.count() as i64).sum::<i64>() + r),
        rs_rank: free.then(|| sd.n_schreier_gens()),
        factors: out,
        torsion_caveat: caveat,
        tags: g.tag_lines(),
        notes,
    })
}

/// Regular coset table of a finite factor; `None` for infinite factors.
fn finite_factor(f: &Factor, p: u32, budget: usize) -> Result<Option<CosetTable>> {
    match &f.expr {
        Descriptor::Zp | Descriptor::FreeProP(_) => Ok(None),
        e => {
            let pres = ProPDescriptor { p, expr: e.clone() }.compile()?;
            let pres = Presentation::new(default_names(pres.n_gens()), pres.relators().to_vec(), pres.label());
            match coset_enumerate(&pres, &[], budget) {
                Ok(t) => Ok(Some(t)),
                Err(Error::BudgetExceeded(_)) => Ok(None),
                Err(e) => Err(e),
            }
        }
    }
}

/// Orbits of `<gens>` on `H\G`, breadth first from the lowest unvisited coset.
fn factor_orbits(sd: &SubgroupData, gens: &[usize], f: &Factor, factor_table: Option<&CosetTable>) -> FactorKurosh {
    let table = sd.table();
    let n = table.index();
    let base = gens.first().copied().unwrap_or(0);
    let mut seen = vec![false; n];
    let mut dcs = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        // words in the factor generators from `start`
        let mut path: Vec<Option<Word>> = vec![None; n];
        path[start] = Some(Word::empty());
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut members = Vec::new();
        while let Some(c) = queue.pop_front() {
            members.push(c);
            for &g in gens {
                for inv in [false, true] {
                    let l = crate::fpgroup::word::letter(g, inv);
                    let d = table.act(c, l);
                    if !seen[d] {
                        seen[d] = true;
                        path[d] = Some(path[c].as_ref().unwrap().mul(&Word::new(&[l])));
                        queue.push_back(d);
                    }
                }
            }
        }
        let mut stab = Vec::new();
        for &c in &members {
            for &g in gens {
                let d = table.act_gen(c, g);
                let u = path[c]
                    .as_ref()
                    .unwrap()
                    .mul(&Word::gen(g))
                    .mul(&path[d].as_ref().unwrap().inverse());
                if u.is_empty() || stab.contains(&u) {
                    continue;
                }
                let trivial_in_factor = factor_table.is_some_and(|ft| {
                    let shifted: Vec<i32> = u
                        .letters()
                        .iter()
                        .map(|&l| l.signum() * (l.abs() - base as i32))
                        .collect();
                    ft.trace(0, &Word::new(&shifted)) == 0
                });
                if !trivial_in_factor {
                    stab.push(u);
                }
            }
        }
        let rep = sd.transversal()[start].clone();
        let intersection_gens: Vec<Word> = stab.iter().map(|u| u.conjugate_by(&rep)).collect();
        debug_assert!(intersection_gens.iter().all(|w| sd.contains(w)));
        let order = factor_table.map(|t| t.index());
        dcs.push(DoubleCoset {
            representative: rep,
            coset: start,
            orbit_size: members.len(),
            intersection_trivial: order.is_some_and(|o| o == members.len()),
            intersection_gens,
        });
    }
    FactorKurosh {
        factor: f.expr.to_string(),
        factor_order: factor_table.map(|t| t.index()),
        double_cosets: dcs,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IndexCheck {
    pub subgroup: String,
    pub index: usize,
    pub s_h: i64,
    pub s_h_formula: i64,
    pub agrees: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GrushkoRecord {
    pub group: String,
    pub s: usize,
    pub f: usize,
    pub free: bool,
    pub tags: Vec<String>,
    pub checks: Vec<IndexCheck>,
    pub discrepancies: Vec<String>,
}

/// `s(G)` and `f(G)` from the tags, and `s(H)` against `(G:H)(s(G)-1)+1` for each subgroup.
pub fn grushko_bookkeeping(
    g: &FreeProductDescriptor,
    subgroups: &[SubgroupSpec],
    budget: usize,
) -> Result<GrushkoRecord> {
    let mut checks = Vec::new();
    let mut discrepancies = Vec::new();
    if g.untagged() {
        discrepancies.push("untagged factor: s(G) counts it as one indecomposable factor".into());
    }
    for h in subgroups {
        let k = kurosh(g, h, budget)?;
        let agrees = k.s_h == k.s_h_formula;
        if !agrees {
            discrepancies.push(format!(
                "{}: s(H) = {} from Kurosh but {} from the index formula{}",
                k.subgroup,
                k.s_h,
                k.s_h_formula,
                if k.torsion_caveat { " (torsion caveat)" } else { "" }
            ));
        }
        if k.rank_agrees() == Some(false) {
            discrepancies.push(format!(
                "{}: Kurosh rank {:?} differs from Reidemeister–Schreier rank {:?}",
                k.subgroup, k.kurosh_rank, k.rs_rank
            ));
        }
        checks.push(IndexCheck {
            subgroup: k.subgroup,
            index: k.index,
            s_h: k.s_h,
            s_h_formula: k.s_h_formula,
            agrees,
        });
    }
    Ok(GrushkoRecord {
        group: g.to_string(),
        s: g.s(),
        f: g.f(),
        free: g.is_free(),
        tags: g.tag_lines(),
        checks,
        discrepancies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free(r: usize, p: u32) -> FreeProductDescriptor {
        FreeProductDescriptor::new(p, vec![], r).unwrap()
    }

    #[test]
    fn zp_free_product_index_p() {
        for p in [2u32, 3, 5] {
            let g = FreeProductDescriptor::new(
                p,
                vec![Factor::catalog(Descriptor::Zp), Factor::catalog(Descriptor::Zp)],
                0,
            )
            .unwrap();
            let h = SubgroupSpec::Kernel {
                modulus: p,
                images: vec![vec![1], vec![1]],
            };
            let k = kurosh(&g, &h, 10000).unwrap();
            assert_eq!(k.index, p as usize);
            assert_eq!(k.factors.iter().map(|f| f.count()).collect::<Vec<_>>(), vec![1, 1]);
            assert_eq!(k.r, p as i64 - 1);
            assert_eq!((k.s_h, k.s_h_formula), (p as i64 + 1, p as i64 + 1));
            assert_eq!(k.rank_agrees(), Some(true));
        }
    }

    #[test]
    fn infinite_dihedral_kernel() {
        let g = FreeProductDescriptor::new(
            2,
            vec![
                Factor::catalog(Descriptor::Cyclic(2)),
                Factor::catalog(Descriptor::Cyclic(2)),
            ],
            0,
        )
        .unwrap();
        let h = SubgroupSpec::Kernel {
            modulus: 2,
            images: vec![vec![1], vec![1]],
        };
        let k = kurosh(&g, &h, 10000).unwrap();
        assert_eq!(k.factors.iter().map(|f| f.count()).collect::<Vec<_>>(), vec![1, 1]);
        assert_eq!(k.r, 1);
        assert_eq!(k.nontrivial_intersections, 0);
        assert!(k
            .factors
            .iter()
            .all(|f| f.double_cosets.iter().all(|d| d.intersection_gens.is_empty())));
        assert!(k.torsion_caveat);
        assert_eq!(k.rs_rank, None);
    }

    #[test]
    fn frattini_kernel_of_free_two() {
        let g = free(2, 2);
        let h = SubgroupSpec::Kernel {
            modulus: 2,
            images: vec![vec![1, 0], vec![0, 1]],
        };
        let k = kurosh(&g, &h, 10000).unwrap();
        assert_eq!(k.index, 4);
        assert_eq!(k.kurosh_rank, Some(5));
        assert_eq!(k.rs_rank, Some(5));
        assert_eq!(k.s_h, 5);
        for f in &k.factors {
            for d in &f.double_cosets {
                assert_eq!(d.intersection_gens.len(), 1);
            }
        }
    }

    #[test]
    fn representatives_are_distinct_orbits() {
        let g = free(2, 3);
        let gens = cover_words(2, 3);
        let k = kurosh(&g, &SubgroupSpec::Generators(gens.clone()), 10000).unwrap();
        let t = coset_enumerate(&g.compile().unwrap(), &gens, 10000).unwrap();
        assert_eq!(k.index, t.index());
        for f in &k.factors {
            let ends: Vec<usize> = f.double_cosets.iter().map(|d| t.trace(0, &d.representative)).collect();
            let mut uniq = ends.clone();
            uniq.sort();
            uniq.dedup();
            assert_eq!(ends.len(), uniq.len());
        }
        assert_eq!(k.rank_agrees(), Some(true));
    }

    #[test]
    fn bookkeeping() {
        let rec = grushko_bookkeeping(&free(3, 2), &[], 1000).unwrap();
        assert_eq!((rec.s, rec.f), (3, 3));
        let z2 = Presentation::with_default_names(2, vec![Word::commutator(&Word::gen(0), &Word::gen(1))], "Z_p^2");
        let g = FreeProductDescriptor::new(
            3,
            vec![
                Factor::tagged(Descriptor::Presented(z2)),
                Factor::catalog(Descriptor::Zp),
            ],
            0,
        )
        .unwrap();
        let h = SubgroupSpec::Kernel {
            modulus: 3,
            images: vec![vec![1], vec![0], vec![1]],
        };
        let rec = grushko_bookkeeping(&g, &[h], 10000).unwrap();
        assert_eq!((rec.s, rec.f), (2, 1));
        assert!(rec.discrepancies.is_empty(), "{:?}", rec.discrepancies);
        let rec = grushko_bookkeeping(
            &free(2, 2),
            &[SubgroupSpec::Kernel {
                modulus: 2,
                images: vec![vec![1, 0], vec![0, 1]],
            }],
            1000,
        )
        .unwrap();
        assert_eq!(rec.checks[0].s_h, 5);
        assert!(rec.checks[0].agrees);
    }

    #[test]
    fn dihedral_discrepancy_is_recorded() {
        let g = FreeProductDescriptor::from_descriptor(
            &ProPDescriptor::new(
                2,
                Descriptor::FreeProduct(vec![Descriptor::Cyclic(2), Descriptor::Cyclic(2)]),
            )
            .unwrap(),
        )
        .unwrap();
        let rec = grushko_bookkeeping(
            &g,
            &[SubgroupSpec::Kernel {
                modulus: 2,
                images: vec![vec![1], vec![1]],
            }],
            100,
        )
        .unwrap();
        // s(H) = 1 but 2(2-1)+1 = 3: the formula needs torsion-freeness
        assert!(!rec.checks[0].agrees);
        assert!(rec.discrepancies[0].contains("torsion caveat"));
    }
}
