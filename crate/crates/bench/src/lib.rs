//! Shared setup for the criterion benchmarks: deterministic functions on
//! fields of increasing size, built once per benchmark.

use std::sync::Arc;

use pary_core::{parse_expr, FieldCtx, PFunc};

/// Builds `expr` over F_{p^m} with the default modulus.
pub fn function(p: u64, m: u32, expr: &str) -> PFunc {
    let ctx = Arc::new(FieldCtx::from_spec(&format!("{p}^{m}")).expect("valid field"));
    parse_expr(expr, &ctx).expect("valid expression").evaluate(&ctx)
}
