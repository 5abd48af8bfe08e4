//! Finitely presented groups: words, coset enumeration, Reidemeister–Schreier,
//! abelianizations, transfer, Stallings folding and Fox calculus.

pub mod abelian;
pub mod coset;
pub mod fox;
pub mod presentation;
pub mod schreier;
pub mod stallings;
pub mod transfer;
pub mod word;

pub use abelian::{abelianization, AbelianizationData, ModPAbelianization};
pub use coset::{coset_enumerate, is_normal, kernel_table, sub_kernel_table, CosetTable};
pub use fox::{fox_h1_dim, fox_h1_dim_permutation, permutation_module};
pub use presentation::Presentation;
pub use schreier::{reidemeister_schreier, SchreierTree, SubgroupData, TreeOrder};
pub use stallings::{same_subgroup, stallings_membership, StallingsGraph};
pub use transfer::{transfer, transfer_matrix};
pub use word::{Letter, Word};
