//! Modules over group algebras `F_p[G]` of finite p-groups.

pub mod group;
pub mod krull;
pub mod module;

pub use group::{FiniteGroup, Subgroup, DEFAULT_MAX_ORDER};
pub use krull::{
    indecomposables_isomorphic, is_isomorphic, krull_schmidt, match_summands, restricted_augmentation_check,
    star_sequence_check, Certificate, Component, DecompositionReport, Isomorphism, KsOptions, Summand,
};
pub use module::{GModule, HomSpace, DEFAULT_MAX_DIM};
