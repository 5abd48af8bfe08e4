use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::group::{FiniteGroup, Subgroup};
use super::module::{GModule, HomSpace};
use crate::error::{Error, Result};
use crate::exactlin::{charpoly, factor_poly, generalized_kernel, FpMatrix, Subspace};
use crate::fpgroup::fox_h1_dim;

/// How a summand was certified indecomposable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    /// `dim M^G = 1`, so the socle is simple
    SocleSimple,
    /// no nontrivial idempotent in an exhaustive scan of `End(M)`
    ExhaustiveIdempotent,
    /// no split found in this many random Fitting trials
    Probabilistic { trials: usize },
}

impl Certificate {
    pub fn is_exact(&self) -> bool {
        !matches!(self, Certificate::Probabilistic { .. })
    }

    pub fn label(&self) -> String {
        match self {
            Certificate::SocleSimple => "SocleSimple".into(),
            Certificate::ExhaustiveIdempotent => "ExhaustiveIdempotent".into(),
            Certificate::Probabilistic { trials } => format!("Probabilistic({trials})"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct KsOptions {
    pub trials: usize,
    /// exhaustive scans run only when `p^dim <= enum_budget`
    pub enum_budget: u64,
    pub seed: u64,
}

impl Default for KsOptions {
    fn default() -> Self {
        KsOptions {
            trials: 64,
            enum_budget: 1 << 22,
            seed: 0,
        }
    }
}

fn space_size(p: u32, dim: usize, budget: u64) -> Option<u64> {
    let mut n = 1u64;
    for _ in 0..dim {
        n = n.checked_mul(p as u64)?;
        if n > budget {
            return None;
        }
    }
    Some(n)
}

/// Calls `visit` on every linear combination of the basis, stopping early when it returns true.
fn scan_combinations(h: &HomSpace, p: u32, mut visit: impl FnMut(&FpMatrix) -> bool) -> bool {
    let d = h.dim();
    let mut digits = vec![0u32; d];
    let mut cur = FpMatrix::zeros(p, h.rows, h.cols);
    loop {
        if visit(&cur) {
            return true;
        }
        // odometer step: every digit that changes moves by +1 mod p
        let mut i = 0;
        loop {
            if i == d {
                return false;
            }
            cur.add_scaled(&h.basis[i], 1);
            digits[i] = (digits[i] + 1) % p;
            if digits[i] != 0 {
                break;
            }
            i += 1;
        }
    }
}

/// Three-valued isomorphism test.
#[derive(Clone, Debug)]
pub enum Isomorphism {
    Yes(FpMatrix),
    No(String),
    Unknown,
}

impl Isomorphism {
    pub fn is_yes(&self) -> bool {
        matches!(self, Isomorphism::Yes(_))
    }
    pub fn is_no(&self) -> bool {
        matches!(self, Isomorphism::No(_))
    }
}

pub fn is_isomorphic(m: &GModule, n: &GModule, opts: &KsOptions) -> Result<Isomorphism> {
    if m.group() != n.group() {
        return Err(Error::GroupMismatch);
    }
    let p = m.p();
    if m.dim() != n.dim() {
        return Ok(Isomorphism::No("dimensions differ".into()));
    }
    if m.invariants().dim() != n.invariants().dim() || m.coinvariants_dim() != n.coinvariants_dim() {
        return Ok(Isomorphism::No("invariants or coinvariants differ".into()));
    }
    let hom = m.hom_space(n)?;
    let end = m.hom_space(m)?;
    if hom.dim() != end.dim() {
        return Ok(Isomorphism::No("dim Hom(M, N) differs from dim End(M)".into()));
    }
    if m.dim() == 0 {
        return Ok(Isomorphism::Yes(FpMatrix::zeros(p, 0, 0)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.trials.max(1) {
        let c: Vec<u32> = (0..hom.dim()).map(|_| rng.gen_range(0..p)).collect();
        let f = hom.combination(&c, p);
        if f.is_invertible() {
            return Ok(Isomorphism::Yes(f));
        }
    }
    if space_size(p, hom.dim(), opts.enum_budget).is_some() {
        let mut found = None;
        scan_combinations(&hom, p, |f| {
            if f.is_invertible() {
                found = Some(f.clone());
                true
            } else {
                false
            }
        });
        return Ok(match found {
            Some(f) => Isomorphism::Yes(f),
            None => Isomorphism::No("exhaustive scan of Hom(M, N) found no isomorphism".into()),
        });
    }
    Ok(Isomorphism::Unknown)
}

/// For indecomposable `m`, `n`: an isomorphism exists iff some `g_j f_i` is not nilpotent,
/// since the non-units of the local ring `End(m)` form an ideal.
pub fn indecomposables_isomorphic(m: &GModule, n: &GModule) -> Result<Option<FpMatrix>> {
    if m.group() != n.group() {
        return Err(Error::GroupMismatch);
    }
    if m.dim() != n.dim() {
        return Ok(None);
    }
    let fs = m.hom_space(n)?;
    let gs = n.hom_space(m)?;
    for f in &fs.basis {
        for g in &gs.basis {
            if !g.mul(f).is_nilpotent() {
                return Ok(Some(f.clone()));
            }
        }
    }
    Ok(None)
}

/// One indecomposable piece, with its basis in the coordinates of the input module.
#[derive(Clone, Debug)]
pub struct Component {
    pub module: GModule,
    pub basis: FpMatrix,
    pub certificate: Certificate,
    /// index into `DecompositionReport::summands`
    pub class: usize,
}

#[derive(Clone, Debug)]
pub struct Summand {
    pub module: GModule,
    pub multiplicity: usize,
    pub certificate: Certificate,
}

#[derive(Clone, Debug)]
pub struct DecompositionReport {
    pub summands: Vec<Summand>,
    pub components: Vec<Component>,
    /// columns: the component bases side by side
    pub change_of_basis: FpMatrix,
}

impl DecompositionReport {
    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn is_indecomposable(&self) -> bool {
        self.components.len() == 1
    }

    pub fn all_exact(&self) -> bool {
        self.components.iter().all(|c| c.certificate.is_exact())
    }

    /// Checks that the change of basis block-diagonalizes the input action.
    pub fn verify(&self, m: &GModule) -> bool {
        let Some(inv) = self.change_of_basis.inverse() else {
            return m.dim() == 0;
        };
        let blocks = self.components.iter().map(|c| &c.module).collect::<Vec<_>>();
        if blocks.is_empty() {
            return m.dim() == 0;
        }
        let sum = GModule::direct_sum(&blocks).expect("same group");
        m.action()
            .iter()
            .zip(sum.action())
            .all(|(a, b)| inv.mul(a).mul(&self.change_of_basis) == *b)
    }
}

enum Split {
    Parts(Vec<Subspace>),
    Leaf(Certificate),
}

fn random_fitting_split(
    m: &GModule,
    end: &HomSpace,
    rng: &mut ChaCha8Rng,
    trials: usize,
) -> Result<Option<Vec<Subspace>>> {
    let p = m.p();
    for _ in 0..trials {
        let c: Vec<u32> = (0..end.dim()).map(|_| rng.gen_range(0..p)).collect();
        let phi = end.combination(&c, p);
        let factors = factor_poly(&charpoly(&phi))?;
        if factors.len() > 1 {
            return Ok(Some(factors.iter().map(|(f, _)| generalized_kernel(&phi, f)).collect()));
        }
    }
    Ok(None)
}

fn idempotent_split(m: &GModule, end: &HomSpace) -> Option<Vec<Subspace>> {
    let p = m.p();
    let n = m.dim();
    let probe: Vec<u32> = (0..n).map(|i| ((i * 7 + 3) % p as usize) as u32).collect();
    let mut found = None;
    scan_combinations(end, p, |e| {
        let ev = e.mul_vec(&probe);
        if e.mul_vec(&ev) != ev {
            return false;
        }
        if e.is_zero() || e.is_identity() || e.mul(e) != *e {
            return false;
        }
        found = Some(e.clone());
        true
    });
    let e = found?;
    let id = FpMatrix::identity(p, n);
    Some(vec![Subspace::column_space(&e), Subspace::column_space(&id.sub(&e))])
}

fn split(m: &GModule, opts: &KsOptions, rng: &mut ChaCha8Rng) -> Result<Split> {
    if m.invariants().dim() == 1 {
        return Ok(Split::Leaf(Certificate::SocleSimple));
    }
    let end = m.hom_space(m)?;
    if let Some(parts) = random_fitting_split(m, &end, rng, opts.trials)? {
        return Ok(Split::Parts(parts));
    }
    if space_size(m.p(), end.dim(), opts.enum_budget).is_some() {
        return Ok(match idempotent_split(m, &end) {
            Some(parts) => Split::Parts(parts),
            None => Split::Leaf(Certificate::ExhaustiveIdempotent),
        });
    }
    Ok(Split::Leaf(Certificate::Probabilistic { trials: opts.trials }))
}

/// Krull–Schmidt decomposition with per-summand certificates.
pub fn krull_schmidt(m: &GModule, opts: &KsOptions) -> Result<DecompositionReport> {
    let p = m.p();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut leaves: Vec<(GModule, FpMatrix, Certificate)> = Vec::new();
    let mut stack = vec![(m.clone(), FpMatrix::identity(p, m.dim()))];
    if m.dim() == 0 {
        stack.clear();
    }
    while let Some((cur, basis)) = stack.pop() {
        match split(&cur, opts, &mut rng)? {
            Split::Leaf(cert) => leaves.push((cur, basis, cert)),
            Split::Parts(parts) => {
                // keep input order stable: push in reverse
                for s in parts.into_iter().rev() {
                    let b = s.basis_columns();
                    let sub = cur.submodule(&b)?;
                    stack.push((sub, basis.mul(&b)));
                }
            }
        }
    }
    let mut summands: Vec<Summand> = Vec::new();
    let mut components = Vec::with_capacity(leaves.len());
    for (module, basis, certificate) in leaves {
        let mut class = None;
        for (k, s) in summands.iter().enumerate() {
            if indecomposables_isomorphic(&s.module, &module)?.is_some() {
                class = Some(k);
                break;
            }
        }
        let class = match class {
            Some(k) => {
                summands[k].multiplicity += 1;
                if !certificate.is_exact() {
                    summands[k].certificate = certificate;
                }
                k
            }
            None => {
                summands.push(Summand {
                    module: module.clone(),
                    multiplicity: 1,
                    certificate,
                });
                summands.len() - 1
            }
        };
        components.push(Component {
            module,
            basis,
            certificate,
            class,
        });
    }
    let change_of_basis = components
        .iter()
        .fold(FpMatrix::zeros(p, m.dim(), 0), |acc, c| acc.hstack(&c.basis));
    Ok(DecompositionReport {
        summands,
        components,
        change_of_basis,
    })
}

/// Multiplicity of each reference module among the summands; `None` if some summand
/// matches no reference.
pub fn match_summands(report: &DecompositionReport, refs: &[&GModule]) -> Result<Option<Vec<usize>>> {
    let mut counts = vec![0; refs.len()];
    for s in &report.summands {
        let mut hit = false;
        for (i, r) in refs.iter().enumerate() {
            if r.dim() > 0 && indecomposables_isomorphic(r, &s.module)?.is_some() {
                counts[i] += s.multiplicity;
                hit = true;
                break;
            }
        }
        if !hit {
            return Ok(None);
        }
    }
    Ok(Some(counts))
}

/// `Res_U I_G = I_U + (G:U - 1) copies of F_p[U]`.
pub fn restricted_augmentation_check(sub: &Subgroup, opts: &KsOptions) -> Result<bool> {
    let (ig, _) = GModule::augmentation_ideal(Arc::clone(&sub.parent));
    let res = ig.restrict(sub)?;
    let report = krull_schmidt(&res, opts)?;
    let (iu, _) = GModule::augmentation_ideal(Arc::clone(&sub.group));
    let lu = GModule::regular(Arc::clone(&sub.group));
    let expected_iu = usize::from(sub.group.order() > 1);
    Ok(match match_summands(&report, &[&iu, &lu])? {
        Some(c) => c == vec![expected_iu, sub.index() - 1],
        None => false,
    })
}

/// `dim Hom(I_G, F_p[G]) = |G| - 1` and `H^1(G, F_p[G]) = 0`.
pub fn star_sequence_check(g: &Arc<FiniteGroup>) -> Result<bool> {
    if g.order() == 1 {
        return Err(Error::Input("group must be nontrivial".into()));
    }
    let (ig, _) = GModule::augmentation_ideal(Arc::clone(g));
    let reg = GModule::regular(Arc::clone(g));
    let hom = ig.hom_space(&reg)?.dim();
    let h1 = fox_h1_dim(g.presentation(), reg.action())?;
    Ok(hom == g.order() - 1 && h1 == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpgroup::{Presentation, Word};

    fn group(pres: &Presentation, p: u32) -> Arc<FiniteGroup> {
        FiniteGroup::from_presentation(pres, p, 256).unwrap()
    }

    fn cyclic(n: i64) -> Presentation {
        Presentation::with_default_names(1, vec![Word::gen(0).pow(n)], format!("C{n}"))
    }

    fn klein() -> Presentation {
        let a = Word::gen(0);
        let b = Word::gen(1);
        Presentation::with_default_names(2, vec![a.pow(2), b.pow(2), Word::commutator(&a, &b)], "V4")
    }

    fn d4() -> Presentation {
        let a = Word::gen(0);
        let b = Word::gen(1);
        Presentation::with_default_names(2, vec![a.pow(4), b.pow(2), b.mul(&a).mul(&b.inverse()).mul(&a)], "D4")
    }

    #[test]
    fn regular_and_augmentation_indecomposable() {
        for (pres, p) in [
            (cyclic(2), 2u32),
            (cyclic(3), 3),
            (cyclic(4), 2),
            (klein(), 2),
            (d4(), 2),
        ] {
            let g = group(&pres, p);
            let r = krull_schmidt(&GModule::regular(Arc::clone(&g)), &KsOptions::default()).unwrap();
            assert!(r.is_indecomposable());
            assert_eq!(r.components[0].certificate, Certificate::SocleSimple);
            let (i, _) = GModule::augmentation_ideal(g);
            let r = krull_schmidt(&i, &KsOptions::default()).unwrap();
            assert!(r.is_indecomposable());
            assert_eq!(r.components[0].certificate, Certificate::SocleSimple);
        }
    }

    #[test]
    fn constructed_sum_decomposes() {
        let g = group(&klein(), 2);
        let reg = GModule::regular(Arc::clone(&g));
        let (i, _) = GModule::augmentation_ideal(Arc::clone(&g));
        let m = GModule::direct_sum(&[&reg, &i, &i]).unwrap();
        // scramble the basis so the blocks are not visible
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let change = loop {
            let rows: Vec<Vec<u32>> = (0..m.dim())
                .map(|_| (0..m.dim()).map(|_| rng.gen_range(0..2)).collect())
                .collect();
            let c = FpMatrix::from_rows(2, &rows).unwrap();
            if c.is_invertible() {
                break c;
            }
        };
        let scrambled = m.change_basis(&change).unwrap();
        let r = krull_schmidt(&scrambled, &KsOptions::default()).unwrap();
        assert!(r.verify(&scrambled));
        let counts = match_summands(&r, &[&reg, &i]).unwrap().unwrap();
        assert_eq!(counts, vec![1, 2]);
        assert!(r.all_exact());
    }

    #[test]
    fn trivial_modules_split_completely() {
        let g = group(&cyclic(3), 3);
        let t = GModule::trivial(Arc::clone(&g), 4);
        let r = krull_schmidt(&t, &KsOptions::default()).unwrap();
        assert_eq!(r.n_components(), 4);
        assert_eq!(r.summands.len(), 1);
        assert_eq!(r.summands[0].multiplicity, 4);
        assert!(r.verify(&t));
    }

    #[test]
    fn isomorphism_tests() {
        let g = group(&cyclic(2), 2);
        let reg = GModule::regular(Arc::clone(&g));
        let tt = GModule::trivial(Arc::clone(&g), 2);
        assert!(is_isomorphic(&reg, &tt, &KsOptions::default()).unwrap().is_no());
        match is_isomorphic(&reg, &reg, &KsOptions::default()).unwrap() {
            Isomorphism::Yes(w) => assert!(reg.is_intertwiner(&reg, &w)),
            other => panic!("{other:?}"),
        }
        let d = group(&d4(), 2);
        let m =
            GModule::direct_sum(&[&GModule::regular(Arc::clone(&d)), &GModule::trivial(Arc::clone(&d), 1)]).unwrap();
        let perm: Vec<usize> = (0..m.dim()).rev().collect();
        let mut pm = FpMatrix::zeros(2, m.dim(), m.dim());
        for (i, &j) in perm.iter().enumerate() {
            pm.set(j, i, 1);
        }
        let copy = m.change_basis(&pm).unwrap();
        match is_isomorphic(&m, &copy, &KsOptions::default()).unwrap() {
            Isomorphism::Yes(w) => assert!(m.is_intertwiner(&copy, &w) && w.is_invertible()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn restriction_of_augmentation_ideal() {
        let opts = KsOptions::default();
        let z4 = group(&cyclic(4), 2);
        let sub = z4.subgroup(&[Word::gen(0).pow(2)], Some(2)).unwrap();
        assert!(restricted_augmentation_check(&sub, &opts).unwrap());
        let v = group(&klein(), 2);
        for w in [Word::gen(0), Word::gen(1)] {
            assert!(restricted_augmentation_check(&v.subgroup(&[w], Some(2)).unwrap(), &opts).unwrap());
        }
        let whole = v.subgroup(&[Word::gen(0), Word::gen(1)], Some(4)).unwrap();
        assert!(restricted_augmentation_check(&whole, &opts).unwrap());
        let d = group(&d4(), 2);
        for w in [Word::gen(0), Word::gen(1), Word::gen(0).pow(2)] {
            assert!(restricted_augmentation_check(&d.subgroup(&[w], None).unwrap(), &opts).unwrap());
        }
    }

    #[test]
    fn star_sequence() {
        for (pres, p) in [(cyclic(2), 2u32), (klein(), 2), (d4(), 2), (cyclic(3), 3)] {
            assert!(star_sequence_check(&group(&pres, p)).unwrap());
        }
        let g = group(&cyclic(2), 2);
        let (i, _) = GModule::augmentation_ideal(Arc::clone(&g));
        assert_eq!(i.hom_space(&GModule::regular(g)).unwrap().dim(), 1);
    }

    #[test]
    fn j_ideal_is_induced_augmentation_ideal() {
        let g = group(&d4(), 2);
        for w in [Word::gen(0), Word::gen(1), Word::gen(0).pow(2)] {
            let sub = g.subgroup(&[w], None).unwrap();
            let j = GModule::j_ideal(&sub).unwrap();
            let (ih, _) = GModule::augmentation_ideal(Arc::clone(&sub.group));
            let ind = GModule::induce(&sub, &ih).unwrap();
            assert_eq!(j.dim(), sub.index() * (sub.group.order() - 1));
            assert!(is_isomorphic(&j, &ind, &KsOptions::default()).unwrap().is_yes());
        }
    }
}
