//! Front end shared by the command-line binary and the Python bindings: the group-expression
//! language, run configuration, reports and the result cache.

pub mod cache;
pub mod commands;
pub mod dsl;
pub mod report;

pub use cache::Cache;
pub use commands::{
    build_module, parse_int_matrix, parse_kernel_spec, run_classify_lattice, run_decompose, run_ends, run_kurosh,
    run_schreier, run_selftest, LatticeArg, SubgroupArg,
};
pub use dsl::{normalize, parse_group_expr, parse_words, ExprKind, GroupExpr, Span};
pub use report::{exit_code, Check, Format, Payload, Report, RunConfig, EXIT_CHECK_FAILED};
