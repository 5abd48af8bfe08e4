use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fpgroup::word::default_names;
use crate::fpgroup::{coset_enumerate, Presentation, Word};

/// Constructor algebra for the pro-p groups handled here.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Descriptor {
    Zp,
    FreeProP(usize),
    /// cyclic group of the given order, a power of p
    Cyclic(u64),
    Finite(Presentation),
    /// arbitrary presentation outside the constructor catalog, never checked for finiteness
    Presented(Presentation),
    FreeProduct(Vec<Descriptor>),
    /// finite factor first
    DirectProduct(Box<Descriptor>, Box<Descriptor>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProPDescriptor {
    pub p: u32,
    pub expr: Descriptor,
}

/// Cap on coset enumeration when checking `Finite` nodes.
pub const FINITE_CHECK_BUDGET: usize = 4096;

impl Descriptor {
    pub fn is_finite_node(&self) -> bool {
        matches!(self, Descriptor::Cyclic(_) | Descriptor::Finite(_))
    }

    /// Any finite factor anywhere in the tree.
    pub fn has_torsion(&self) -> bool {
        match self {
            Descriptor::Zp | Descriptor::FreeProP(_) => false,
            Descriptor::Cyclic(n) => *n > 1,
            Descriptor::Finite(_) => true,
            // unknown; reported through the catalog-unverified flag instead
            Descriptor::Presented(_) => false,
            Descriptor::FreeProduct(fs) => fs.iter().any(|f| f.has_torsion()),
            Descriptor::DirectProduct(a, b) => a.has_torsion() || b.has_torsion(),
        }
    }

    fn n_gens(&self) -> usize {
        match self {
            Descriptor::Zp | Descriptor::Cyclic(_) => 1,
            Descriptor::FreeProP(r) => *r,
            Descriptor::Finite(pres) | Descriptor::Presented(pres) => pres.n_gens(),
            Descriptor::FreeProduct(fs) => fs.iter().map(|f| f.n_gens()).sum(),
            Descriptor::DirectProduct(a, b) => a.n_gens() + b.n_gens(),
        }
    }

    /// Relators on generators `offset..offset + n_gens`.
    fn relators(&self, p: u32, offset: usize, out: &mut Vec<Word>) -> Result<()> {
        match self {
            Descriptor::Zp => {}
            Descriptor::FreeProP(r) => {
                if *r == 0 {
                    return Err(Error::Input("free pro-p group needs rank at least 1".into()));
                }
            }
            Descriptor::Cyclic(n) => {
                if *n < p as u64 || !is_power(*n, p) {
                    return Err(Error::NonPGroup(format!(
                        "cyclic group of order {n} is not a nontrivial {p}-group"
                    )));
                }
                out.push(Word::gen(offset).pow(*n as i64));
            }
            Descriptor::Finite(pres) => {
                let t = coset_enumerate(pres, &[], FINITE_CHECK_BUDGET).map_err(|e| match e {
                    Error::BudgetExceeded(_) => Error::NonPGroup(format!(
                        "{} is not finite within {FINITE_CHECK_BUDGET} cosets",
                        pres.label()
                    )),
                    other => other,
                })?;
                if !is_power(t.index() as u64, p) {
                    return Err(Error::NonPGroup(format!("{} has order {}", pres.label(), t.index())));
                }
                let images: Vec<Word> = (0..pres.n_gens()).map(|i| Word::gen(offset + i)).collect();
                out.extend(pres.relators().iter().map(|r| r.substitute(&images)));
            }
            Descriptor::Presented(pres) => {
                let images: Vec<Word> = (0..pres.n_gens()).map(|i| Word::gen(offset + i)).collect();
                out.extend(pres.relators().iter().map(|r| r.substitute(&images)));
            }
            Descriptor::FreeProduct(fs) => {
                if fs.is_empty() {
                    return Err(Error::Input("empty free product".into()));
                }
                let mut o = offset;
                for f in fs {
                    f.relators(p, o, out)?;
                    o += f.n_gens();
                }
            }
            Descriptor::DirectProduct(a, b) => {
                if !a.is_finite_node() {
                    return Err(Error::Input(
                        "the first factor of a direct product must be finite".into(),
                    ));
                }
                a.relators(p, offset, out)?;
                let na = a.n_gens();
                b.relators(p, offset + na, out)?;
                for i in 0..na {
                    for j in 0..b.n_gens() {
                        out.push(Word::commutator(&Word::gen(offset + i), &Word::gen(offset + na + j)));
                    }
                }
            }
        }
        Ok(())
    }
}

fn is_power(mut n: u64, p: u32) -> bool {
    if n == 0 {
        return false;
    }
    while n.is_multiple_of(p as u64) {
        n /= p as u64;
    }
    n == 1
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Descriptor::Zp => write!(f, "Zp"),
            Descriptor::FreeProP(r) => write!(f, "free({r})"),
            Descriptor::Cyclic(n) => write!(f, "cyclic({n})"),
            Descriptor::Finite(pres) => write!(f, "finite{}", braces(pres)),
            Descriptor::Presented(pres) => write!(f, "pres{}", braces(pres)),
            Descriptor::FreeProduct(fs) => {
                let parts: Vec<String> = fs.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(" * "))
            }
            Descriptor::DirectProduct(a, b) => write!(f, "direct({a}, {b})"),
        }
    }
}

fn braces(pres: &Presentation) -> String {
    let rels: Vec<String> = pres.relators().iter().map(|r| r.format(pres.names())).collect();
    format!("{{{}; {}}}", pres.names().join(", "), rels.join(", "))
}

impl ProPDescriptor {
    pub fn new(p: u32, expr: Descriptor) -> Result<Self> {
        if !crate::exactlin::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(ProPDescriptor { p, expr })
    }

    /// Free products become disjoint unions of presentations; a direct product with a finite
    /// factor adds the commutators of the two generating sets. Generators are renamed
    /// `a, b, c, ...` unless the whole expression is a single presentation.
    pub fn compile(&self) -> Result<Presentation> {
        let mut rels = Vec::new();
        self.expr.relators(self.p, 0, &mut rels)?;
        let names = match &self.expr {
            Descriptor::Finite(pres) | Descriptor::Presented(pres) => pres.names().to_vec(),
            e => default_names(e.n_gens()),
        };
        Ok(Presentation::new(names, rels, self.expr.to_string()))
    }

    pub fn has_torsion(&self) -> bool {
        self.expr.has_torsion()
    }

    /// Contains a raw presentation, so finite-level results carry no pro-p guarantee.
    pub fn catalog_unverified(&self) -> bool {
        fn walk(d: &Descriptor) -> bool {
            match d {
                Descriptor::Presented(_) => true,
                Descriptor::FreeProduct(fs) => fs.iter().any(walk),
                Descriptor::DirectProduct(a, b) => walk(a) || walk(b),
                _ => false,
            }
        }
        walk(&self.expr)
    }
}
