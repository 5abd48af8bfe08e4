use super::abelian::ModPAbelianization;
use super::schreier::SubgroupData;
use crate::error::{Error, Result};
use crate::exactlin::FpMatrix;

/// For `V <= U` given by coset tables over the same parent, the `U`-coset
/// containing each `V`-coset. Fails if `V` is not contained in `U`.
pub fn coset_projection(u: &SubgroupData, v: &SubgroupData) -> Result<Vec<usize>> {
    if u.parent() != v.parent() {
        return Err(Error::Membership(
            "subgroups over different parent presentations".into(),
        ));
    }
    let ut = u.table();
    let vt = v.table();
    let proj: Vec<usize> = v.transversal().iter().map(|t| ut.trace(0, t)).collect();
    let ng = u.parent().n_gens();
    for c in 0..vt.index() {
        for g in 0..ng {
            if proj[vt.act_gen(c, g)] != ut.act_gen(proj[c], g) {
                return Err(Error::Membership(format!(
                    "cosets of the smaller subgroup do not refine the larger one (coset {c})"
                )));
            }
        }
    }
    Ok(proj)
}

/// Matrix of the transfer `U/U^* -> V/V^*` in the coordinates of the two mod-p
/// abelianizations: column `k` is the image of the `k`-th quotient basis generator of `U`.
///
/// For `u in U`, `Ver(u) = prod_t t u t'^-1` over the transversal of `V` in `U` taken from
/// `V`'s Schreier tree; since transversal words only use tree edges, the rewritten product
/// is the sum of the edge labels met while reading `u` from each `V`-coset inside `U`.
pub fn transfer_matrix(
    u: &SubgroupData,
    u_ab: &ModPAbelianization,
    v: &SubgroupData,
    v_ab: &ModPAbelianization,
) -> Result<FpMatrix> {
    let proj = coset_projection(u, v)?;
    let inside: Vec<usize> = (0..proj.len()).filter(|&c| proj[c] == 0).collect();
    let basis = u_ab.basis_generators();
    let mut cols = Vec::with_capacity(basis.len());
    for &s in &basis {
        let w = u.tree().gen_word(u.table(), s);
        let mut counts: Vec<(usize, i64)> = Vec::new();
        for &c in &inside {
            let end = v
                .tree()
                .trace_edges(v.table(), c, w.letters(), |g, sign| counts.push((g, sign as i64)));
            debug_assert_eq!(proj[end], 0);
        }
        cols.push(v_ab.project_counts(counts));
    }
    Ok(FpMatrix::from_columns(v_ab.p(), v_ab.dim(), &cols))
}

/// Mod-p abelianization of a subgroup from its Reidemeister–Schreier relators.
pub fn subgroup_mod_p(sd: &SubgroupData, p: u32) -> ModPAbelianization {
    ModPAbelianization::new(p, sd.n_schreier_gens(), sd.raw_relators())
}

/// Transfer between two subgroups of the same parent.
pub fn transfer(u: &SubgroupData, v: &SubgroupData, p: u32) -> Result<FpMatrix> {
    let ua = subgroup_mod_p(u, p);
    let va = subgroup_mod_p(v, p);
    transfer_matrix(u, &ua, v, &va)
}
