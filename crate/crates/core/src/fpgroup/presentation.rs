use serde::{Deserialize, Serialize};

use super::word::{default_names, Word};

/// A finitely presented group `<x_0, ..., x_{n-1} | relators>`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Presentation {
    n_gens: usize,
    names: Vec<String>,
    relators: Vec<Word>,
    label: String,
}

impl Presentation {
    /// Relators are cyclically reduced and empty ones dropped.
    pub fn new(names: Vec<String>, relators: Vec<Word>, label: impl Into<String>) -> Self {
        let n_gens = names.len();
        let relators = relators
            .into_iter()
            .map(|r| r.cyclically_reduce())
            .filter(|r| !r.is_empty())
            .collect::<Vec<_>>();
        for r in &relators {
            assert!(r.max_gen().is_none_or(|g| g < n_gens), "relator uses unknown generator");
        }
        Presentation {
            n_gens,
            names,
            relators,
            label: label.into(),
        }
    }

    pub fn with_default_names(n_gens: usize, relators: Vec<Word>, label: impl Into<String>) -> Self {
        Self::new(default_names(n_gens), relators, label)
    }

    pub fn free(rank: usize) -> Self {
        Self::with_default_names(rank, vec![], format!("free({rank})"))
    }

    pub fn n_gens(&self) -> usize {
        self.n_gens
    }
    pub fn names(&self) -> &[String] {
        &self.names
    }
    pub fn relators(&self) -> &[Word] {
        &self.relators
    }
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn format(&self) -> String {
        let rels: Vec<String> = self.relators.iter().map(|r| r.format(&self.names)).collect();
        format!("< {} | {} >", self.names.join(", "), rels.join(", "))
    }
}
