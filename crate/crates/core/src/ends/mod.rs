//! Number of ends of a pro-p group from the transfer colimit of its mod-p abelianizations.

pub mod chain;
pub mod descriptor;

use serde::{Deserialize, Serialize};

pub use chain::{
    build_chain, quotient_side_h1, transfer_colimit, ChainLevel, ColimitTrace, StepKind, Strategy, SubgroupChain,
};
pub use descriptor::{Descriptor, ProPDescriptor};

use crate::error::{Error, Result};
use crate::fpgroup::coset_enumerate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EndsEstimate {
    Zero,
    One,
    Two,
    InfinityEvidence,
    Inconclusive,
}

impl EndsEstimate {
    pub fn label(&self) -> &'static str {
        match self {
            EndsEstimate::Zero => "0",
            EndsEstimate::One => "1",
            EndsEstimate::Two => "2",
            EndsEstimate::InfinityEvidence => "infinity-evidence",
            EndsEstimate::Inconclusive => "inconclusive",
        }
    }

    pub fn is_settled(&self) -> bool {
        !matches!(self, EndsEstimate::Inconclusive)
    }
}

/// What the computation says about `h^1 = dim H^1(G, F_p[[G]])`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum H1Evidence {
    Settled(usize),
    /// stable ranks of the colimit, still moving
    Growth(Vec<usize>),
    Unknown(Vec<usize>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndsParams {
    pub depth: usize,
    pub coset_budget: usize,
    pub strategy: Strategy,
}

impl Default for EndsParams {
    fn default() -> Self {
        EndsParams {
            depth: 6,
            coset_budget: 20000,
            strategy: Strategy::Mixed,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelSummary {
    pub index: usize,
    pub d: usize,
    pub normal: bool,
    pub kind: StepKind,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EndsReport {
    pub group: String,
    pub p: u32,
    pub e: EndsEstimate,
    pub h0: u8,
    pub h1: H1Evidence,
    pub levels: Vec<LevelSummary>,
    pub ranks: Vec<Vec<usize>>,
    /// `r_{n,m}` non-increasing in `m` and `s_n` non-decreasing in `n`
    pub monotone: bool,
    pub stable_ranks: Vec<usize>,
    pub depth_reached: usize,
    pub budget_hit: bool,
    pub torsion: bool,
    pub catalog_unverified: bool,
    /// classification of the chain started at `U_1`
    pub shifted_e: Option<EndsEstimate>,
    pub notes: Vec<String>,
}

impl EndsReport {
    /// `e = 1 - h0 + h1` whenever `h1` is settled.
    pub fn arithmetic_holds(&self) -> bool {
        match (&self.h1, self.e) {
            (H1Evidence::Settled(h1), e) => {
                let v = 1 - self.h0 as i64 + *h1 as i64;
                matches!(
                    (v, e),
                    (0, EndsEstimate::Zero) | (1, EndsEstimate::One) | (2, EndsEstimate::Two)
                )
            }
            _ => true,
        }
    }
}

/// Classify from dimensions `d(U_n)` and composite ranks `r_{n,m}` (rows as in [`ColimitTrace`]).
///
/// Stable ranks come from rows with at least two composites when there are two such rows;
/// a single transfer cannot see a kernel that only opens after the next step.
/// `s` settled at 0 or 1 over the last two of those gives `h^1`; strict growth of `d`
/// over at least three levels together with growing or large stable ranks is evidence
/// for infinitely many ends.
pub fn classify(dims: &[usize], ranks: &[Vec<usize>]) -> (EndsEstimate, H1Evidence) {
    let long = ranks.iter().filter(|r| r.len() >= 2).count();
    let rows = if long >= 2 { &ranks[..long] } else { ranks };
    let stable: Vec<usize> = rows.iter().map(|r| r.iter().copied().min().unwrap_or(0)).collect();
    let n = stable.len();
    if n >= 2 && stable[n - 1] == stable[n - 2] {
        match stable[n - 1] {
            0 => return (EndsEstimate::One, H1Evidence::Settled(0)),
            1 => return (EndsEstimate::Two, H1Evidence::Settled(1)),
            _ => {}
        }
    }
    let growing_d = dims.len() >= 3 && dims.windows(2).rev().take(2).all(|w| w[1] > w[0]);
    let last = stable.last().copied().unwrap_or(0);
    let first = stable.first().copied().unwrap_or(0);
    if growing_d && n >= 2 && (last > first || last >= 2) {
        return (EndsEstimate::InfinityEvidence, H1Evidence::Growth(stable));
    }
    (EndsEstimate::Inconclusive, H1Evidence::Unknown(stable))
}

pub fn ends(desc: &ProPDescriptor, params: &EndsParams) -> Result<EndsReport> {
    let pres = desc.compile()?;
    let p = desc.p;
    let mut notes = Vec::new();
    let torsion = desc.has_torsion();
    let catalog_unverified = desc.catalog_unverified();
    if catalog_unverified {
        notes.push("catalog-unverified: raw presentation, pro-p invariance of finite-level data not guaranteed".into());
    }
    if torsion {
        notes.push(
            "descriptor has torsion; infinite-ends evidence is not backed by the torsion-free equivalence".into(),
        );
    }
    let finite = match coset_enumerate(&pres, &[], params.coset_budget) {
        Ok(t) => Some(t.index()),
        Err(Error::BudgetExceeded(_)) => None,
        Err(e) => return Err(e),
    };
    if let Some(order) = finite {
        notes.push(format!("whole-group enumeration closed: order {order}"));
        return Ok(EndsReport {
            group: desc.expr.to_string(),
            p,
            e: EndsEstimate::Zero,
            h0: 1,
            h1: H1Evidence::Settled(0),
            levels: vec![LevelSummary {
                index: 1,
                d: crate::fpgroup::abelianization(&pres, p).mod_p_dim,
                normal: true,
                kind: StepKind::Base,
            }],
            ranks: vec![],
            monotone: true,
            stable_ranks: vec![],
            depth_reached: 0,
            budget_hit: false,
            torsion,
            catalog_unverified,
            shifted_e: None,
            notes,
        });
    }
    notes.push(format!(
        "whole-group enumeration exceeded {} cosets; treated as infinite",
        params.coset_budget
    ));
    let chain = build_chain(&pres, p, params.strategy, params.depth, params.coset_budget)?;
    if let Some(why) = &chain.stopped {
        notes.push(why.clone());
    }
    let levels: Vec<LevelSummary> = chain
        .levels
        .iter()
        .map(|l| LevelSummary {
            index: l.index,
            d: l.d,
            normal: l.normal,
            kind: l.kind,
        })
        .collect();
    if chain.levels.len() < 2 {
        notes.push("chain too short for a colimit".into());
        return Ok(EndsReport {
            group: desc.expr.to_string(),
            p,
            e: EndsEstimate::Inconclusive,
            h0: 0,
            h1: H1Evidence::Unknown(vec![]),
            depth_reached: 0,
            levels,
            ranks: vec![],
            monotone: true,
            stable_ranks: vec![],
            budget_hit: chain.budget_hit,
            torsion,
            catalog_unverified,
            shifted_e: None,
            notes,
        });
    }
    let trace = transfer_colimit(&chain)?;
    let monotone = trace.is_monotone();
    if !monotone {
        notes.push("colimit ranks are not monotone".into());
    }
    let (e, h1) = classify(&trace.dims, &trace.ranks);
    let shifted = trace.shifted(1);
    let shifted_e = (shifted.stable.len() >= 2).then(|| classify(&shifted.dims, &shifted.ranks).0);
    if shifted_e.is_some_and(|s| s != e) {
        notes.push("classification of the chain from U_1 differs".into());
    }
    Ok(EndsReport {
        group: desc.expr.to_string(),
        p,
        e,
        h0: 0,
        h1,
        depth_reached: chain.levels.len() - 1,
        levels,
        ranks: trace.ranks,
        monotone,
        stable_ranks: trace.stable,
        budget_hit: chain.budget_hit,
        torsion,
        catalog_unverified,
        shifted_e,
        notes,
    })
}

/// Shapiro cross-check along the Frattini chain: `dim H^1(G, F_p[G/U_n])` for the first `depth` levels.
pub fn quotient_side_h1_dims(
    desc: &ProPDescriptor,
    depth: usize,
    coset_budget: usize,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if depth == 0 {
        return Err(Error::Config("depth must be at least 1".into()));
    }
    let pres = desc.compile()?;
    let chain = build_chain(&pres, desc.p, Strategy::Frattini, depth.max(2) - 1, coset_budget)?;
    if chain.levels.len() < depth && chain.budget_hit {
        return Err(Error::BudgetExceeded(coset_budget));
    }
    let mut h1 = quotient_side_h1(&chain);
    let mut d = chain.dims();
    h1.truncate(depth);
    d.truncate(depth);
    Ok((h1, d))
}
