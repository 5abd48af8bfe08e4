use super::coset::CosetTable;
use super::presentation::Presentation;
use super::word::{gen_of, Word};
use crate::error::{Error, Result};
use crate::exactlin::sparse::{sparse_from_counts, SparseEchelon};
use crate::exactlin::{FpMatrix, Subspace};

/// Matrix of a word under a left action: `D(x_1 x_2 ...) = D(x_1) D(x_2) ...`.
pub fn word_action(w: &Word, action: &[FpMatrix], inverses: &[FpMatrix]) -> FpMatrix {
    let p = action[0].p();
    let mut m = FpMatrix::identity(p, action[0].rows());
    for &l in w.letters() {
        let g = gen_of(l);
        m = m.mul(if l > 0 { &action[g] } else { &inverses[g] });
    }
    m
}

fn check_action(pres: &Presentation, action: &[FpMatrix]) -> Result<Vec<FpMatrix>> {
    if action.len() != pres.n_gens() || action.is_empty() {
        return Err(Error::ActionInvalid(format!(
            "expected {} generator matrices, got {}",
            pres.n_gens(),
            action.len()
        )));
    }
    let n = action[0].rows();
    let p = action[0].p();
    let mut inverses = Vec::with_capacity(action.len());
    for (i, a) in action.iter().enumerate() {
        if a.rows() != n || a.cols() != n || a.p() != p {
            return Err(Error::ActionInvalid(format!(
                "matrix of generator {i} has the wrong shape"
            )));
        }
        inverses.push(
            a.inverse()
                .ok_or_else(|| Error::ActionInvalid(format!("matrix of generator {i} is singular")))?,
        );
    }
    for r in pres.relators() {
        if !word_action(r, action, &inverses).is_identity() {
            return Err(Error::ActionInvalid(format!(
                "relator {} does not act trivially",
                r.format(pres.names())
            )));
        }
    }
    Ok(inverses)
}

/// Stacked left Fox derivatives of the relators evaluated through the action;
/// its kernel is the space of 1-cocycles `(a_x)_x`.
pub fn fox_matrix(pres: &Presentation, action: &[FpMatrix]) -> Result<FpMatrix> {
    let inverses = check_action(pres, action)?;
    let n = action[0].rows();
    let p = action[0].p();
    let ng = pres.n_gens();
    let mut out = FpMatrix::zeros(p, n * pres.relators().len(), n * ng);
    for (k, r) in pres.relators().iter().enumerate() {
        let mut prefix = FpMatrix::identity(p, n);
        let mut blocks = vec![FpMatrix::zeros(p, n, n); ng];
        for &l in r.letters() {
            let g = gen_of(l);
            if l > 0 {
                blocks[g] = blocks[g].add(&prefix);
                prefix = prefix.mul(&action[g]);
            } else {
                prefix = prefix.mul(&inverses[g]);
                blocks[g] = blocks[g].sub(&prefix);
            }
        }
        for (g, b) in blocks.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    out.set(k * n + i, g * n + j, b.get(i, j));
                }
            }
        }
    }
    Ok(out)
}

/// Fixed points `M^G`.
pub fn invariants(action: &[FpMatrix]) -> Subspace {
    let n = action[0].rows();
    let p = action[0].p();
    let id = FpMatrix::identity(p, n);
    let stacked = action
        .iter()
        .fold(FpMatrix::zeros(p, 0, n), |acc, a| acc.vstack(&a.sub(&id)));
    crate::exactlin::nullspace(&stacked)
}

/// `dim H^1(G, M) = dim Z^1 - dim B^1` for a left module given by generator matrices.
pub fn fox_h1_dim(pres: &Presentation, action: &[FpMatrix]) -> Result<usize> {
    let fox = fox_matrix(pres, action)?;
    let n = action[0].rows();
    let z1 = n * pres.n_gens() - fox.rank();
    let b1 = n - invariants(action).dim();
    Ok(z1 - b1)
}

/// Generator matrices of `F_p[G/U]` as a left module: `x . e_c = e_{c x^-1}`.
pub fn permutation_module(table: &CosetTable, p: u32) -> Vec<FpMatrix> {
    let n = table.index();
    (0..table.presentation().n_gens())
        .map(|g| {
            let mut m = FpMatrix::zeros(p, n, n);
            for c in 0..n {
                m.set(table.act(c, -(g as i32 + 1)), c, 1);
            }
            m
        })
        .collect()
}

/// `dim H^1(G, F_p[G/U])` using the sparse shape of the Fox matrix of a permutation module:
/// row `(r, i)` is the signed edge chain of the loop `r` read from coset `i`.
pub fn fox_h1_dim_permutation(table: &CosetTable, p: u32) -> usize {
    let pres = table.presentation();
    let n = table.index();
    let ng = pres.n_gens();
    let mut ech = SparseEchelon::new(p, n * ng);
    let mut counts = Vec::new();
    for r in pres.relators() {
        for i in 0..n {
            counts.clear();
            let mut c = i;
            for &l in r.letters() {
                let g = gen_of(l);
                if l > 0 {
                    counts.push((g * n + c, 1));
                    c = table.act_gen(c, g);
                } else {
                    c = table.act(c, l);
                    counts.push((g * n + c, -1));
                }
            }
            ech.insert(sparse_from_counts(counts.iter().copied(), p));
        }
    }
    // the action on cosets is transitive, so M^G is one-dimensional
    n * ng - ech.rank() - (n - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpgroup::abelian::abelianization;
    use crate::fpgroup::coset::coset_enumerate;
    use crate::fpgroup::schreier::SubgroupData;
    use crate::fpgroup::transfer::subgroup_mod_p;

    fn cyclic(p: u32) -> Presentation {
        Presentation::with_default_names(1, vec![Word::gen(0).pow(p as i64)], "C")
    }

    fn log_p(x: u64, p: u32) -> usize {
        let mut k = 0;
        let mut y = 1u64;
        while y < x {
            y *= p as u64;
            k += 1;
        }
        k
    }

    #[test]
    fn free_group_trivial_module() {
        for r in 1..4 {
            let pres = Presentation::free(r);
            let triv = vec![FpMatrix::identity(3, 1); r];
            assert_eq!(fox_h1_dim(&pres, &triv).unwrap(), r);
        }
    }

    #[test]
    fn cyclic_trivial_and_regular_against_brute_force() {
        for p in [2u32, 3] {
            let pres = cyclic(p);
            let triv = vec![FpMatrix::identity(p, 1)];
            let h = fox_h1_dim(&pres, &triv).unwrap();
            assert_eq!(h, 1);
            let reg = coset_enumerate(&pres, &[], 100).unwrap();
            let m = permutation_module(&reg, p);
            let h_reg = fox_h1_dim(&pres, &m).unwrap();
            assert_eq!(h_reg, 0);
            for a in [&triv[0], &m[0]] {
                let brute = brute_count(p, a);
                assert_eq!(brute, fox_h1_dim(&pres, std::slice::from_ref(a)).unwrap());
            }
        }
    }

    /// Brute force over all `m = a(x)`: cocycle iff `(1 + x + ... + x^{p-1}) m = 0`.
    fn brute_count(p: u32, action: &FpMatrix) -> usize {
        let n = action.rows();
        let total = (p as u64).pow(n as u32);
        let mut norm = FpMatrix::zeros(p, n, n);
        let mut pw = FpMatrix::identity(p, n);
        for _ in 0..p {
            norm = norm.add(&pw);
            pw = pw.mul(action);
        }
        let mut cocycles = 0u64;
        let mut cobs = std::collections::BTreeSet::new();
        for code in 0..total {
            let mut m = Vec::with_capacity(n);
            let mut c = code;
            for _ in 0..n {
                m.push((c % p as u64) as u32);
                c /= p as u64;
            }
            if norm.mul_vec(&m).iter().all(|&x| x == 0) {
                cocycles += 1;
            }
            let xm = action.mul_vec(&m);
            cobs.insert(xm.iter().zip(&m).map(|(a, b)| (a + p - b) % p).collect::<Vec<u32>>());
        }
        log_p(cocycles / cobs.len() as u64, p)
    }

    #[test]
    fn trivial_module_matches_abelianization() {
        let a = Word::gen(0);
        let b = Word::gen(1);
        let cases = [
            Presentation::with_default_names(2, vec![a.pow(4), b.pow(2), b.mul(&a).mul(&b.inverse()).mul(&a)], "D4"),
            Presentation::with_default_names(2, vec![Word::commutator(&a, &b)], "Z2"),
            Presentation::with_default_names(2, vec![a.pow(2), b.pow(2)], "Dinf"),
        ];
        for pres in &cases {
            for p in [2u32, 3] {
                let triv = vec![FpMatrix::identity(p, 1); 2];
                assert_eq!(
                    fox_h1_dim(pres, &triv).unwrap(),
                    abelianization(pres, p).mod_p_dim,
                    "{}",
                    pres.label()
                );
            }
        }
    }

    #[test]
    fn shapiro_on_finite_quotients() {
        let a = Word::gen(0);
        let b = Word::gen(1);
        let d4 =
            Presentation::with_default_names(2, vec![a.pow(4), b.pow(2), b.mul(&a).mul(&b.inverse()).mul(&a)], "D4");
        for sub in [
            vec![],
            vec![a.clone()],
            vec![b.clone()],
            vec![a.pow(2)],
            vec![a.pow(2), b.clone()],
        ] {
            let t = coset_enumerate(&d4, &sub, 100).unwrap();
            let m = permutation_module(&t, 2);
            let dense = fox_h1_dim(&d4, &m).unwrap();
            assert_eq!(dense, fox_h1_dim_permutation(&t, 2));
            let sd = SubgroupData::from_table(t);
            assert_eq!(dense, subgroup_mod_p(&sd, 2).dim());
        }
    }

    #[test]
    fn invalid_action_rejected() {
        let pres = cyclic(2);
        let bad = vec![FpMatrix::from_rows(5, &[vec![2]]).unwrap()];
        assert!(matches!(fox_h1_dim(&pres, &bad), Err(Error::ActionInvalid(_))));
    }
}
