//! Desk-scale computations around the ends of pro-p groups.
//!
//! The crate is organised bottom-up:
//!
//! * [`exactlin`]: exact linear algebra over prime fields and the integers,
//!   polynomial factorization over prime fields.
//! * [`fpgroup`]: finitely presented groups, coset enumeration,
//!   Reidemeister–Schreier, abelianizations, transfer maps, foldings and Fox calculus.
//! * [`modrep`]: modules over group algebras of finite p-groups and their
//!   Krull–Schmidt decompositions.
//! * [`ends`]: group descriptors, subgroup chains and the transfer colimit.
//! * [`grushko`]: Kurosh data for free products and `Z_p[C_p]`-lattices.
//! * [`cli`]: the group-expression language, run configuration, reports and cache.

pub mod cli;
pub mod ends;
pub mod error;
pub mod exactlin;
pub mod fpgroup;
pub mod grushko;
pub mod modrep;

pub use error::{Error, Result};
