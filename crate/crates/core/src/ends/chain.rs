use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::FpMatrix;
use crate::fpgroup::abelian::ModPAbelianization;
use crate::fpgroup::transfer::{subgroup_mod_p, transfer_matrix};
use crate::fpgroup::{is_normal, kernel_table, sub_kernel_table, Presentation, SubgroupData};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    /// `U_{n+1} = U_n^*`, the kernel onto `U_n/U_n^*`
    Frattini,
    /// kernel onto `Z/p` through coordinate `n mod d(U_n)` of `U_n/U_n^*`, so that
    /// successive steps cycle through the generator directions
    IndexP,
    /// Frattini steps while they fit the coset budget, then index-p steps
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepKind {
    Base,
    Frattini,
    IndexP,
}

#[derive(Clone, Debug)]
pub struct ChainLevel {
    pub data: SubgroupData,
    pub ab: ModPAbelianization,
    pub index: usize,
    pub d: usize,
    pub normal: bool,
    pub kind: StepKind,
}

#[derive(Clone, Debug)]
pub struct SubgroupChain {
    pub presentation: Presentation,
    pub p: u32,
    pub strategy: Strategy,
    pub levels: Vec<ChainLevel>,
    /// why the chain stopped before the requested depth
    pub stopped: Option<String>,
    /// the last step was refused by the coset budget
    pub budget_hit: bool,
}

impl SubgroupChain {
    pub fn dims(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.d).collect()
    }
    pub fn indices(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.index).collect()
    }
}

fn level(data: SubgroupData, p: u32, normal: bool, kind: StepKind) -> ChainLevel {
    let ab = subgroup_mod_p(&data, p);
    ChainLevel {
        index: data.index(),
        d: ab.dim(),
        data,
        ab,
        normal,
        kind,
    }
}

fn checked_index(index: usize, p: u32, k: usize, budget: usize) -> Option<usize> {
    let mut n = index;
    for _ in 0..k {
        n = n.checked_mul(p as usize)?;
        if n > budget {
            return None;
        }
    }
    Some(n)
}

/// `U_0 = G` followed by up to `depth` proper steps.
pub fn build_chain(
    pres: &Presentation,
    p: u32,
    strategy: Strategy,
    depth: usize,
    coset_budget: usize,
) -> Result<SubgroupChain> {
    if depth == 0 {
        return Err(Error::Config("chain depth must be at least 1".into()));
    }
    if !crate::exactlin::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let whole = kernel_table(pres, &vec![vec![]; pres.n_gens()], p)?;
    let mut levels = vec![level(SubgroupData::from_table(whole), p, true, StepKind::Base)];
    let mut stopped = None;
    let mut budget_hit = false;
    for n in 0..depth {
        let cur = levels.last().unwrap();
        let k = cur.d;
        if k == 0 {
            stopped = Some(format!("U_{n} has trivial mod-{p} abelianization"));
            break;
        }
        let frattini_fits = checked_index(cur.index, p, k, coset_budget).is_some();
        let index_p_fits = checked_index(cur.index, p, 1, coset_budget).is_some();
        let kind = match strategy {
            Strategy::Frattini if frattini_fits => StepKind::Frattini,
            Strategy::IndexP if index_p_fits => StepKind::IndexP,
            Strategy::Mixed if frattini_fits => StepKind::Frattini,
            Strategy::Mixed if index_p_fits => StepKind::IndexP,
            _ => {
                stopped = Some(format!("step to U_{} exceeds the coset budget {coset_budget}", n + 1));
                budget_hit = true;
                break;
            }
        };
        let basis = cur.ab.basis_generators();
        let images: Vec<Vec<u32>> = (0..cur.data.n_schreier_gens())
            .map(|s| {
                let v = cur.ab.project_counts([(s, 1)]);
                match kind {
                    StepKind::IndexP => vec![v[n % k]],
                    _ => v,
                }
            })
            .collect();
        debug_assert_eq!(basis.len(), k);
        let table = match sub_kernel_table(cur.data.table(), cur.data.tree(), &images, p, coset_budget) {
            Ok(t) => t,
            Err(Error::BudgetExceeded(_)) => {
                stopped = Some(format!("step to U_{} exceeds the coset budget {coset_budget}", n + 1));
                budget_hit = true;
                break;
            }
            Err(e) => return Err(e),
        };
        let normal = match kind {
            StepKind::Frattini => cur.normal,
            _ => is_normal(&table),
        };
        levels.push(level(SubgroupData::from_table(table), p, normal, kind));
    }
    Ok(SubgroupChain {
        presentation: pres.clone(),
        p,
        strategy,
        levels,
        stopped,
        budget_hit,
    })
}

/// Transfer maps between consecutive levels with composite and stable ranks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ColimitTrace {
    pub dims: Vec<usize>,
    pub matrices: Vec<FpMatrix>,
    /// ranks[n][j] = rank of V_{n+j} ... V_n, i.e. r_{n, n+j+1}
    pub ranks: Vec<Vec<usize>>,
    /// s_n = min over computed m > n of r_{n,m}
    pub stable: Vec<usize>,
}

impl ColimitTrace {
    /// `r_{n,m}` non-increasing in `m` and `s_n` non-decreasing in `n`.
    pub fn is_monotone(&self) -> bool {
        self.ranks.iter().all(|row| row.windows(2).all(|w| w[0] >= w[1]))
            && self.stable.windows(2).all(|w| w[0] <= w[1])
    }

    /// The trace of the chain started at level `k`.
    pub fn shifted(&self, k: usize) -> ColimitTrace {
        ColimitTrace {
            dims: self.dims[k.min(self.dims.len())..].to_vec(),
            matrices: self.matrices[k.min(self.matrices.len())..].to_vec(),
            ranks: self.ranks[k.min(self.ranks.len())..].to_vec(),
            stable: self.stable[k.min(self.stable.len())..].to_vec(),
        }
    }
}

pub fn transfer_colimit(chain: &SubgroupChain) -> Result<ColimitTrace> {
    let levels = &chain.levels;
    if levels.len() < 2 {
        return Err(Error::Config("transfer colimit needs at least two levels".into()));
    }
    let mut matrices = Vec::with_capacity(levels.len() - 1);
    for w in levels.windows(2) {
        matrices.push(transfer_matrix(&w[0].data, &w[0].ab, &w[1].data, &w[1].ab)?);
    }
    let mut ranks = Vec::with_capacity(matrices.len());
    for n in 0..matrices.len() {
        let mut row = Vec::new();
        // basis of the image pushed forward one level at a time
        let mut img = column_basis(&matrices[n]);
        row.push(img.cols());
        for m in &matrices[n + 1..] {
            if img.cols() == 0 {
                row.push(0);
                continue;
            }
            img = column_basis(&m.mul(&img));
            row.push(img.cols());
        }
        ranks.push(row);
    }
    let stable = ranks.iter().map(|r| *r.iter().min().unwrap()).collect();
    Ok(ColimitTrace {
        dims: chain.dims(),
        matrices,
        ranks,
        stable,
    })
}

fn column_basis(m: &FpMatrix) -> FpMatrix {
    crate::exactlin::Subspace::column_space(m).basis_columns()
}

/// `dim H^1(G, F_p[G/U_n])` for each level, computed from the permutation module.
pub fn quotient_side_h1(chain: &SubgroupChain) -> Vec<usize> {
    chain
        .levels
        .iter()
        .map(|l| crate::fpgroup::fox_h1_dim_permutation(l.data.table(), chain.p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpgroup::Word;

    #[test]
    fn cyclic_chain_of_zp() {
        for p in [2u32, 3] {
            let z = Presentation::free(1);
            let c = build_chain(&z, p, Strategy::IndexP, 4, 20000).unwrap();
            let pp = p as usize;
            assert_eq!(c.indices(), vec![1, pp, pp * pp, pp.pow(3), pp.pow(4)]);
            assert_eq!(c.dims(), vec![1; 5]);
            let t = transfer_colimit(&c).unwrap();
            assert!(t.matrices.iter().all(|m| *m == FpMatrix::identity(p, 1)));
            assert_eq!(t.stable, vec![1; 4]);
            assert_eq!(quotient_side_h1(&c), vec![1; 5]);
        }
    }

    #[test]
    fn free_rank_two_frattini_chain() {
        let c = build_chain(&Presentation::free(2), 2, Strategy::Frattini, 6, 20000).unwrap();
        assert_eq!(c.dims(), vec![2, 5, 129]);
        assert!(c.budget_hit);
        assert!(c.levels.iter().all(|l| l.normal));
    }

    #[test]
    fn abelian_rank_two_collapses() {
        let g = Presentation::with_default_names(2, vec![Word::commutator(&Word::gen(0), &Word::gen(1))], "Z2");
        let c = build_chain(&g, 2, Strategy::IndexP, 4, 20000).unwrap();
        let t = transfer_colimit(&c).unwrap();
        assert!(t.is_monotone());
        assert!(t.ranks.iter().all(|r| r.len() < 2 || r[1] == 0));
        let c = build_chain(&g, 3, Strategy::Frattini, 3, 20000).unwrap();
        let t = transfer_colimit(&c).unwrap();
        assert!(t.stable.iter().all(|&s| s == 0));
        assert_eq!(quotient_side_h1(&c), c.dims());
    }

    #[test]
    fn finite_group_reaches_trivial_subgroup() {
        let g = Presentation::with_default_names(1, vec![Word::gen(0).pow(4)], "C4");
        let c = build_chain(&g, 2, Strategy::Frattini, 6, 20000).unwrap();
        assert_eq!(c.dims(), vec![1, 1, 0]);
        assert_eq!(c.indices(), vec![1, 2, 4]);
        assert!(c.stopped.is_some() && !c.budget_hit);
        let t = transfer_colimit(&c).unwrap();
        assert_eq!(*t.stable.last().unwrap(), 0);
        assert_eq!(quotient_side_h1(&c), vec![1, 1, 0]);
    }
}
