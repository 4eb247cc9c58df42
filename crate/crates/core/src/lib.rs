//! Exact spectral analysis of p-ary functions f: F_q → F_p.
//!
//! Everything is integer-exact: Walsh coefficients live in the cyclotomic
//! ring Z[ζ_p] ([`cyclo`]), fields are table- or polynomial-backed
//! ([`gf`]), and the higher layers decide bentness and weak regularity
//! ([`bent`]), recognize when level-set partitions carry association
//! schemes ([`scheme`]), build two-weight trace codes ([`codes`]), and
//! predict class counts for the cyclotomic monomial families
//! ([`families`]) without materializing astronomically large fields.

#![forbid(unsafe_code)]

pub mod bent;
pub mod codes;
pub mod cyclo;
pub mod error;
pub mod families;
pub mod func;
pub mod gf;
pub mod numth;
pub mod scheme;
pub mod walsh;

pub use bent::{
    classify_regularity, decompose, is_bent, mu_level_sums, scheme_regularity_agreement,
    BentProfile, RegularityAgreement, Unit,
};
pub use codes::{
    build_code, table_check, two_weight_flag, weight_of, weight_of_checked, CellCheck,
    TableReport, TraceCode,
};
pub use cyclo::Cyc;
pub use error::{Error, Result};
pub use families::{
    end_to_end, family_new, full_order_family, half_order_family, materialize, predict_classes,
    product_family, FamilyKind, FamilyParams, FamilySpec,
};
pub use func::{parse_expr, PFunc, TraceExpr};
pub use gf::{FElt, FieldCtx};
pub use scheme::{
    criterion_check, dual_partition, level_partition, reflexivity_check,
    verify_scheme_bruteforce, BlockLabel, DualPartition, Partition, SchemeReport,
};
pub use walsh::{walsh_fast, walsh_naive, WalshSpectrum, WalshVector};
