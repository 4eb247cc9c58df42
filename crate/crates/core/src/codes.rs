//! Linear trace codes from defining sets, exact weight distributions, and
//! closed-form distribution checks for the full-order cyclotomic family.
//!
//! For D = {α_1, …, α_n} ⊆ F_q* the code C_D = {c_D(β) : β ∈ F_q} with
//! c_D(β) = (Tr(βα_1), …, Tr(βα_n)) is F_p-linear of length n and dimension
//! k = dim⟨D⟩. Weight distributions are computed by full enumeration (the
//! map β ↦ c_D(β) has kernel of size p^{m−k}, so raw frequencies divide
//! exactly), and cross-checked against the spectral form
//!
//!   wt(c_{D*_{f,i}}(β)) = ((p−1)/p)|D*_{f,i}| − ((p−1)/p²)·Σ_y σ_y(ζ^{−i} W_f(β))
//!
//! valid for β ≠ 0 whenever f is F_p*-invariant and D is one of its
//! punctured level sets.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::cyclo::Cyc;
use crate::error::{Error, Result};
use crate::families::{materialize, FamilyKind, FamilySpec};
use crate::func::PFunc;
use crate::gf::{FElt, FieldCtx};
use crate::numth;
use crate::walsh::{walsh_fast, WalshSpectrum};

/// Largest field for which codewords are enumerated.
pub const CODE_ENUM_CAP: u64 = 1 << 20;
/// Budget on q·n trace evaluations for direct enumeration.
pub const CODE_WORK_BUDGET: u128 = 1 << 26;

// ---------------------------------------------------------------------------
// F_p linear algebra
// ---------------------------------------------------------------------------

/// Reduced row-echelon form mod p; returns the nonzero rows.
fn row_reduce(p: u64, mut rows: Vec<Vec<u64>>) -> Vec<Vec<u64>> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivot_row = 0;
    for c in 0..cols {
        let Some(r) = (pivot_row..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(pivot_row, r);
        let inv = numth::mod_inv(rows[pivot_row][c], p).expect("pivot is a unit");
        for x in rows[pivot_row].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..rows.len() {
            if r != pivot_row && rows[r][c] != 0 {
                let factor = rows[r][c];
                for x in 0..cols {
                    let sub = factor * rows[pivot_row][x] % p;
                    rows[r][x] = (rows[r][x] + p - sub) % p;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    rows.truncate(pivot_row);
    rows
}

/// Rank of the F_p-span of a set of field elements (coordinate rank).
fn span_rank(ctx: &FieldCtx, elements: &[FElt]) -> u32 {
    let rows: Vec<Vec<u64>> = elements.iter().map(|&a| ctx.coords(a)).collect();
    row_reduce(ctx.p(), rows).len() as u32
}

// ---------------------------------------------------------------------------
// TraceCode
// ---------------------------------------------------------------------------

/// A trace code C_D with its exact weight distribution.
#[derive(Clone, Debug)]
pub struct TraceCode {
    ctx: Arc<FieldCtx>,
    defining_set: Vec<FElt>,
    n: u64,
    k: u32,
    weight_distribution: BTreeMap<u64, u64>,
}

impl TraceCode {
    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn defining_set(&self) -> &[FElt] {
        &self.defining_set
    }

    /// Length n = |D|.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Dimension k = dim⟨D⟩.
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Weight → frequency, including A_0 = 1.
    pub fn weight_distribution(&self) -> &BTreeMap<u64, u64> {
        &self.weight_distribution
    }

    /// The codeword c_D(β) = (Tr(βα))_{α∈D}.
    pub fn codeword(&self, beta: FElt) -> Vec<u64> {
        self.defining_set
            .iter()
            .map(|&a| self.ctx.trace(self.ctx.mul(beta, a)))
            .collect()
    }

    /// A k×n generator matrix in reduced row-echelon form.
    pub fn generator_matrix(&self) -> Vec<Vec<u64>> {
        let m = self.ctx.m();
        let rows: Vec<Vec<u64>> = (0..m)
            .map(|i| self.codeword(FElt(self.ctx.p().pow(i))))
            .collect();
        let reduced = row_reduce(self.ctx.p(), rows);
        debug_assert_eq!(reduced.len(), self.k as usize);
        reduced
    }

    /// Generator matrix as plain text: one row per line, digits separated
    /// by spaces.
    pub fn generator_matrix_text(&self) -> String {
        self.generator_matrix()
            .iter()
            .map(|row| {
                row.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl Serialize for TraceCode {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("TraceCode", 5)?;
        st.serialize_field("field", &self.ctx.spec_string())?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("weights", &self.weight_distribution)?;
        st.serialize_field("two_weight", &two_weight_flag(self))?;
        st.end()
    }
}

/// Builds C_D by full enumeration. D must be nonempty, inside F_q*, and
/// duplicate-free; q and q·|D| must stay under the enumeration budgets.
pub fn build_code(ctx: &Arc<FieldCtx>, defining_set: &[FElt]) -> Result<TraceCode> {
    if defining_set.is_empty() {
        return Err(Error::EmptyDefiningSet);
    }
    let q = ctx.q();
    if q > CODE_ENUM_CAP {
        return Err(Error::BudgetExceeded {
            what: "codeword enumeration",
            size: q,
            budget: CODE_ENUM_CAP,
        });
    }
    let n = defining_set.len() as u64;
    if u128::from(q) * u128::from(n) > CODE_WORK_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "codeword enumeration work (q·n)",
            size: (u128::from(q) * u128::from(n)).min(u64::MAX as u128) as u64,
            budget: CODE_WORK_BUDGET as u64,
        });
    }
    let mut seen = vec![false; q as usize];
    for &a in defining_set {
        if a.0 >= q || a == FElt::ZERO {
            return Err(Error::InvalidArgument {
                reason: format!("defining set element {} is not in F_q*", a.0),
            });
        }
        if seen[a.0 as usize] {
            return Err(Error::DuplicateElements { element: a.0 });
        }
        seen[a.0 as usize] = true;
    }

    let k = span_rank(ctx, defining_set);
    let tr: Vec<u32> = (0..q).map(|x| ctx.trace(FElt(x)) as u32).collect();
    let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
    for b in 0..q {
        let beta = FElt(b);
        let mut wt = 0u64;
        for &a in defining_set {
            if tr[ctx.mul(beta, a).0 as usize] != 0 {
                wt += 1;
            }
        }
        *hist.entry(wt).or_insert(0) += 1;
    }
    let kernel = ctx.p().pow(ctx.m() - k);
    for (w, c) in hist.iter_mut() {
        if *c % kernel != 0 {
            return Err(Error::InternalMismatch {
                what: format!("raw frequency of weight {w} is not a multiple of the kernel size"),
            });
        }
        *c /= kernel;
    }
    Ok(TraceCode {
        ctx: Arc::clone(ctx),
        defining_set: defining_set.to_vec(),
        n,
        k,
        weight_distribution: hist,
    })
}

/// Hamming weight of c_D(β) by direct count.
pub fn weight_of(code: &TraceCode, beta: FElt) -> u64 {
    code.codeword(beta).iter().filter(|&&t| t != 0).count() as u64
}

/// Spectral weight of c_{D*_{f,level}}(β) for F_p*-invariant f, β ≠ 0.
///
/// At level 0 each character sum over the punctured set carries a −1 for
/// the removed origin, which lifts the weight by (p−1)/p.
fn walsh_weight(w: &Cyc, p: u64, n: u64, level: u64) -> Result<u64> {
    let shifted = w.mul_root((p - level % p) % p);
    let mut s = Cyc::zero(p);
    for y in 1..p {
        s = &s + &shifted.galois(y)?;
    }
    let s_int = s.as_integer().ok_or_else(|| Error::InternalMismatch {
        what: "level character sum is not a rational integer".to_string(),
    })?;
    let s_i = i128::try_from(&s_int).map_err(|_| Error::InternalMismatch {
        what: "level character sum overflows".to_string(),
    })?;
    let puncture = if level == 0 { p as i128 } else { 0 };
    let num = (p - 1) as i128 * (p as i128 * n as i128 - s_i + puncture);
    let p2 = (p * p) as i128;
    if num < 0 || num % p2 != 0 {
        return Err(Error::InternalMismatch {
            what: format!("spectral weight {num}/{p2} is not a nonnegative integer"),
        });
    }
    Ok((num / p2) as u64)
}

/// Weight of c_D(β) computed both by direct count and by the spectral
/// formula, which must agree exactly.
///
/// Requires D to equal the punctured level set of f at `level` and f to be
/// F_p*-invariant; at β = 0 the codeword is identically zero and the direct
/// answer is returned (the spectral form holds off the origin only).
pub fn weight_of_checked(
    code: &TraceCode,
    spec: &WalshSpectrum,
    f: &PFunc,
    level: u64,
    beta: FElt,
) -> Result<u64> {
    if spec.f_hash() != f.hash_hex() {
        return Err(Error::InternalMismatch {
            what: "spectrum does not belong to the supplied function table".to_string(),
        });
    }
    if !f.is_fp_star_invariant() {
        return Err(Error::InvalidArgument {
            reason: "spectral weights require an F_p*-invariant function".to_string(),
        });
    }
    let mut sorted = code.defining_set.clone();
    sorted.sort_unstable_by_key(|e| e.0);
    if sorted != f.level_set_star(level) {
        return Err(Error::InvalidArgument {
            reason: format!("defining set is not the punctured level set at {level}"),
        });
    }
    let direct = weight_of(code, beta);
    if beta == FElt::ZERO {
        return Ok(direct);
    }
    let spectral = walsh_weight(spec.value_at(beta), f.ctx().p(), code.n, level)?;
    if direct != spectral {
        return Err(Error::InternalMismatch {
            what: format!(
                "direct weight {direct} and spectral weight {spectral} disagree at β = {}",
                beta.0
            ),
        });
    }
    Ok(direct)
}

/// True iff exactly two distinct nonzero weights occur.
pub fn two_weight_flag(code: &TraceCode) -> bool {
    code.weight_distribution.keys().filter(|&&w| w != 0).count() == 2
}

// ---------------------------------------------------------------------------
// Closed-form table checks
// ---------------------------------------------------------------------------

/// Exact rational arithmetic for the closed-form cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Frac {
    num: i128,
    den: i128,
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Frac {
    fn new(num: i128, den: i128) -> Frac {
        assert!(den != 0, "zero denominator");
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd_i128(num, den).max(1);
        Frac { num: sign * num / g, den: sign * den / g }
    }

    fn int(v: i128) -> Frac {
        Frac { num: v, den: 1 }
    }

    fn add(self, o: Frac) -> Frac {
        Frac::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }

    fn sub(self, o: Frac) -> Frac {
        self.add(Frac { num: -o.num, den: o.den })
    }

    fn mul(self, o: Frac) -> Frac {
        Frac::new(self.num * o.num, self.den * o.den)
    }

    fn as_integer(self) -> Option<i128> {
        (self.den == 1).then_some(self.num)
    }
}

impl fmt::Display for Frac {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(out, "{}", self.num)
        } else {
            write!(out, "{}/{}", self.num, self.den)
        }
    }
}

/// One compared cell of a closed-form table check.
#[derive(Clone, Debug, Serialize)]
pub struct CellCheck {
    pub name: String,
    pub predicted: String,
    pub actual: String,
    pub matches: bool,
}

/// Result of comparing a closed-form weight-distribution table against the
/// actually built code.
#[derive(Clone, Debug, Serialize)]
pub struct TableReport {
    pub table: u8,
    pub field: String,
    /// The value of f whose level set defines the code.
    pub level: u64,
    pub n: u64,
    pub k: u32,
    /// Actual weight → frequency, including A_0 = 1.
    pub weights: BTreeMap<u64, u64>,
    pub cells: Vec<CellCheck>,
    pub all_match: bool,
}

fn cell(name: &str, predicted: impl fmt::Display, actual: impl fmt::Display, matches: bool) -> CellCheck {
    CellCheck {
        name: name.to_string(),
        predicted: predicted.to_string(),
        actual: actual.to_string(),
        matches,
    }
}

fn frac_cell(name: &str, predicted: Frac, actual: u64) -> CellCheck {
    cell(
        name,
        predicted,
        actual,
        predicted.as_integer() == Some(actual as i128),
    )
}

fn refuse(reason: &str) -> Error {
    Error::TableNotApplicable { reason: reason.to_string() }
}

/// The four closed-form rows: (n, k, w_low, freq_low, w_high, freq_high).
fn table_forms(which: u8, p: i128, q: i128, r: i128, m: u32) -> (i128, i128, Frac, i128, Frac, i128) {
    let rm = r.pow(m);
    let rm1 = r.pow(m - 1);
    let sq = {
        // q = p^e with e even; √q = p^{e/2}.
        let mut root = 1i128;
        let mut e = 0;
        let mut acc = 1i128;
        while acc < q {
            acc *= p;
            e += 1;
        }
        debug_assert!(acc == q && e % 2 == 0);
        for _ in 0..e / 2 {
            root *= p;
        }
        root
    };
    let k = {
        // φ(r^m)
        rm1 * (r - 1)
    };
    let step = Frac::new((p - 1) * sq, p);
    match which {
        1 => {
            let n = (q - 1) / rm1 - (q - 1) / rm;
            let w_hi = Frac::new((p - 1) * (q + sq) * (r - 1), p * rm);
            let w_lo = w_hi.sub(step);
            (n, k, w_lo, n, w_hi, q - 1 - (q - 1) / rm1 + (q - 1) / rm)
        }
        2 => {
            let n = (q - 1) / rm;
            let w_hi = Frac::new((p - 1) * (q + sq), p * rm);
            let w_lo = w_hi.sub(step);
            (n, k, w_lo, n, w_hi, q - 1 - (q - 1) / rm)
        }
        3 => {
            let n = q - 1 - (q - 1) / rm1 + (q - 1) / rm;
            let base = Frac::new((p - 1) * (q - 1), p * rm);
            let tail = Frac::new(p - 1, p)
                .mul(Frac::int(q - 1).sub(Frac::new(q + sq, rm1)));
            let w_lo = base.add(tail);
            let w_hi = w_lo.add(step);
            (n, k, w_lo, n, w_hi, (q - 1) / rm1 - (q - 1) / rm)
        }
        4 => {
            let n = q - 1 - (q - 1) / rm1;
            let w_lo = Frac::new(p - 1, p)
                .mul(Frac::int(q - 1).sub(Frac::new(q + sq, rm1)));
            let w_hi = w_lo.add(step);
            (n, k, w_lo, n, w_hi, (q - 1) / rm1)
        }
        _ => unreachable!("table id validated by caller"),
    }
}

/// Weight distribution over β ∈ F_q* via the spectral formula, merged with
/// the zero word and reduced by the kernel.
fn spectral_distribution(
    f: &PFunc,
    spec: &WalshSpectrum,
    level: u64,
    n: u64,
    k: u32,
) -> Result<BTreeMap<u64, u64>> {
    let ctx = f.ctx();
    let p = ctx.p();
    let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
    hist.insert(0, 1);
    for b in 1..ctx.q() {
        let wt = walsh_weight(spec.value_at(FElt(b)), p, n, level)?;
        *hist.entry(wt).or_insert(0) += 1;
    }
    let kernel = p.pow(ctx.m() - k);
    // β = 0 is one of the p^{m−k} kernel elements.
    let extra_zero = kernel - 1;
    if let Some(c) = hist.get_mut(&0) {
        if *c <= extra_zero || (*c - extra_zero - 1) % kernel != 0 {
            return Err(Error::InternalMismatch {
                what: "spectral zero-weight frequency is inconsistent with the kernel".to_string(),
            });
        }
        *c = 1 + (*c - extra_zero - 1) / kernel;
    }
    for (w, c) in hist.iter_mut() {
        if *w == 0 {
            continue;
        }
        if *c % kernel != 0 {
            return Err(Error::InternalMismatch {
                what: format!("spectral frequency of weight {w} is not a multiple of the kernel"),
            });
        }
        *c /= kernel;
    }
    Ok(hist)
}

/// Substitutes the family parameters into one of the four closed-form
/// weight-distribution tables, builds the actual code, and compares every
/// cell exactly.
///
/// Applicability: only the full-order prime-power family is covered; table
/// 2 requires r ≢ 1 (mod p); tables 3 and 4 require r ≡ 1 and r ≢ 1 (mod p)
/// respectively and m ≥ 2 (at m = 1 the zero level set is empty or the
/// stated dimension is unattainable).
pub fn table_check(fam: &FamilySpec, which: u8) -> Result<TableReport> {
    if !(1..=4).contains(&which) {
        return Err(Error::InvalidArgument {
            reason: format!("no such table: {which}"),
        });
    }
    if fam.kind != FamilyKind::FullOrderPrimePower {
        return Err(refuse(
            "closed-form distributions are stated for the full-order prime-power family",
        ));
    }
    let (p, r, m) = (fam.p, fam.r1, fam.m1);
    let r_is_1 = r % p == 1;
    match which {
        2 if r_is_1 => return Err(refuse("table 2 requires r ≢ 1 (mod p)")),
        3 if !r_is_1 => return Err(refuse("table 3 requires r ≡ 1 (mod p)")),
        4 if r_is_1 => return Err(refuse("table 4 requires r ≢ 1 (mod p)")),
        3 | 4 if m == 1 => {
            return Err(refuse(
                "tables 3 and 4 degenerate at m = 1 (the zero level cannot reach the stated dimension)",
            ))
        }
        _ => {}
    }

    let f = materialize(fam)?;
    let ctx = f.ctx();
    let rm1 = numth::mod_pow(r, u64::from(m) - 1, p);
    let level = match which {
        1 => (p - rm1) % p,
        2 => rm1 * ((r - 1) % p) % p,
        _ => 0,
    };
    let defining_set = f.level_set_star(level);
    let n_actual = defining_set.len() as u64;
    let k_actual = span_rank(ctx, &defining_set);

    // Actual distribution: direct enumeration when affordable, spectral
    // otherwise; when both run they must agree.
    let spec_w = walsh_fast(&f)?;
    let spectral = spectral_distribution(&f, &spec_w, level, n_actual, k_actual)?;
    let weights = if ctx.q() <= CODE_ENUM_CAP
        && u128::from(ctx.q()) * u128::from(n_actual) <= CODE_WORK_BUDGET
    {
        let code = build_code(ctx, &defining_set)?;
        if *code.weight_distribution() != spectral {
            return Err(Error::InternalMismatch {
                what: "direct and spectral weight distributions disagree".to_string(),
            });
        }
        code.weight_distribution
    } else {
        spectral
    };

    let (n_pred, k_pred, w_lo, freq_lo, w_hi, freq_hi) =
        table_forms(which, p as i128, ctx.q() as i128, r as i128, m);

    let mut cells = vec![
        cell("n", n_pred, n_actual, n_pred == n_actual as i128),
        cell("k", k_pred, k_actual, k_pred == i128::from(k_actual)),
    ];
    let nonzero: Vec<(u64, u64)> = weights
        .iter()
        .filter(|(&w, _)| w != 0)
        .map(|(&w, &c)| (w, c))
        .collect();
    if nonzero.len() == 2 {
        cells.push(frac_cell("weight_low", w_lo, nonzero[0].0));
        cells.push(cell("freq_low", freq_lo, nonzero[0].1, freq_lo == nonzero[0].1 as i128));
        cells.push(frac_cell("weight_high", w_hi, nonzero[1].0));
        cells.push(cell("freq_high", freq_hi, nonzero[1].1, freq_hi == nonzero[1].1 as i128));
    } else {
        cells.push(cell(
            "two_weight",
            "true",
            format!("{} distinct nonzero weights", nonzero.len()),
            false,
        ));
    }
    let all_match = cells.iter().all(|c| c.matches);
    Ok(TableReport {
        table: which,
        field: ctx.spec_string(),
        level,
        n: n_actual,
        k: k_actual,
        weights,
        cells,
        all_match,
    })
}

// ===========================================================================
// tests
// ===========================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{full_order_family, half_order_family};
    use crate::func::parse_expr;

    fn field(p: u64, m: u32) -> Arc<FieldCtx> {
        Arc::new(FieldCtx::new(p, m, None).unwrap())
    }

    fn func(ctx: &Arc<FieldCtx>, text: &str) -> PFunc {
        parse_expr(text, ctx).unwrap().evaluate(ctx)
    }

    fn macwilliams_ok(code: &TraceCode) {
        let p = code.ctx().p();
        let total: u64 = code.weight_distribution().values().sum();
        assert_eq!(total, p.pow(code.k()));
        assert_eq!(code.weight_distribution().get(&0), Some(&1));
        let weighted: u128 = code
            .weight_distribution()
            .iter()
            .map(|(&w, &c)| u128::from(w) * u128::from(c))
            .sum();
        let expect = u128::from(code.n())
            * u128::from(p.pow(code.k() - 1))
            * u128::from(p - 1);
        assert_eq!(weighted, expect);
    }

    // ==== construction ======================================================

    #[test]
    fn singleton_defining_set() {
        let ctx = field(3, 2);
        let code = build_code(&ctx, &[FElt(1)]).unwrap();
        assert_eq!(code.n(), 1);
        assert_eq!(code.k(), 1);
        assert_eq!(
            code.weight_distribution(),
            &BTreeMap::from([(0, 1), (1, 2)])
        );
        assert!(!two_weight_flag(&code));
        macwilliams_ok(&code);
    }

    #[test]
    fn full_multiplicative_group_is_one_weight() {
        let ctx = field(3, 2);
        let d: Vec<FElt> = (1..9).map(FElt).collect();
        let code = build_code(&ctx, &d).unwrap();
        assert_eq!((code.n(), code.k()), (8, 2));
        assert_eq!(
            code.weight_distribution(),
            &BTreeMap::from([(0, 1), (6, 8)])
        );
        assert!(!two_weight_flag(&code));
        macwilliams_ok(&code);
    }

    #[test]
    fn input_validation() {
        let ctx = field(3, 2);
        assert!(matches!(build_code(&ctx, &[]), Err(Error::EmptyDefiningSet)));
        assert!(matches!(
            build_code(&ctx, &[FElt(2), FElt(2)]),
            Err(Error::DuplicateElements { element: 2 })
        ));
        assert!(matches!(
            build_code(&ctx, &[FElt(0)]),
            Err(Error::InvalidArgument { .. })
        ));
        assert!(matches!(
            build_code(&ctx, &[FElt(9)]),
            Err(Error::InvalidArgument { .. })
        ));
    }

    #[test]
    fn enumeration_budget() {
        let ctx = field(2, 21);
        assert!(matches!(
            build_code(&ctx, &[FElt(1)]),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    // ==== the q = 81 level codes ===========================================

    #[test]
    fn gauss_period_level_two_code() {
        let ctx = field(3, 4);
        let f = func(&ctx, "Tr(x^16)");
        let code = build_code(&ctx, &f.level_set_star(2)).unwrap();
        assert_eq!((code.n(), code.k()), (64, 4));
        assert_eq!(
            code.weight_distribution(),
            &BTreeMap::from([(0, 1), (42, 64), (48, 16)])
        );
        assert!(two_weight_flag(&code));
        macwilliams_ok(&code);
        // Weight by membership: 42 on the defining level, 48 elsewhere.
        // (The punctured zero level of this function is empty.)
        assert!(f.level_set_star(0).is_empty());
        let in_level = f.level_set_star(2)[0];
        let out_level = f.level_set_star(1)[0];
        assert_eq!(weight_of(&code, in_level), 42);
        assert_eq!(weight_of(&code, out_level), 48);
        assert_eq!(weight_of(&code, FElt::ZERO), 0);
    }

    #[test]
    fn gauss_period_level_one_code() {
        let ctx = field(3, 4);
        let f = func(&ctx, "Tr(x^16)");
        let code = build_code(&ctx, &f.level_set_star(1)).unwrap();
        assert_eq!((code.n(), code.k()), (16, 4));
        assert_eq!(
            code.weight_distribution(),
            &BTreeMap::from([(0, 1), (6, 16), (12, 64)])
        );
        assert!(two_weight_flag(&code));
        macwilliams_ok(&code);
    }

    // ==== spectral weights ==================================================

    #[test]
    fn spectral_and_direct_weights_agree_everywhere() {
        // Covers empty levels (skipped), nonzero levels, and the punctured
        // zero level at p = 2 and p = 3.
        let ctx81 = field(3, 4);
        let ctx256 = field(2, 8);
        let cases = [
            (&ctx81, "Tr(x^16)"),
            (&ctx81, "Tr(x^2)"),
            (&ctx256, "Tr(x^15)"),
        ];
        for (ctx, text) in cases {
            let f = func(ctx, text);
            let spec = walsh_fast(&f).unwrap();
            for level in 0..ctx.p() {
                let d = f.level_set_star(level);
                if d.is_empty() {
                    continue;
                }
                let code = build_code(ctx, &d).unwrap();
                for b in 0..ctx.q() {
                    let beta = FElt(b);
                    let w = weight_of_checked(&code, &spec, &f, level, beta).unwrap();
                    assert_eq!(w, weight_of(&code, beta));
                }
            }
        }
    }

    #[test]
    fn spectral_weights_reject_non_invariant_functions() {
        let ctx = field(3, 3);
        let f = func(&ctx, "Tr(x)");
        let spec = walsh_fast(&f).unwrap();
        let code = build_code(&ctx, &f.level_set_star(1)).unwrap();
        assert!(matches!(
            weight_of_checked(&code, &spec, &f, 1, FElt(1)),
            Err(Error::InvalidArgument { .. })
        ));
    }

    #[test]
    fn spectral_weights_reject_wrong_defining_set() {
        let ctx = field(3, 4);
        let f = func(&ctx, "Tr(x^16)");
        let spec = walsh_fast(&f).unwrap();
        let code = build_code(&ctx, &f.level_set_star(1)).unwrap();
        assert!(matches!(
            weight_of_checked(&code, &spec, &f, 2, FElt(1)),
            Err(Error::InvalidArgument { .. })
        ));
    }

    // ==== MacWilliams identities across assorted codes ======================

    #[test]
    fn macwilliams_identities_hold_for_level_codes() {
        let ctx27 = field(3, 3);
        let quintic = func(&ctx27, "Tr(2*x - x^5)");
        let ctx256 = field(2, 8);
        let half = func(&ctx256, "Tr(x^15)");
        for (ctx, f, level) in [
            (&ctx27, &quintic, 0),
            (&ctx27, &quintic, 1),
            (&ctx27, &quintic, 2),
            (&ctx256, &half, 0),
            (&ctx256, &half, 1),
        ] {
            let d = f.level_set_star(level);
            let code = build_code(ctx, &d).unwrap();
            macwilliams_ok(&code);
            // Kernel consistency: distinct codewords × p^{m−k} = q.
            let distinct: u64 = code.weight_distribution().values().sum();
            assert_eq!(
                distinct * ctx.p().pow(ctx.m() - code.k()),
                ctx.q()
            );
        }
    }

    // ==== generator matrices ================================================

    #[test]
    fn generator_matrix_shape_and_rank() {
        let ctx = field(3, 4);
        let f = func(&ctx, "Tr(x^16)");
        let code = build_code(&ctx, &f.level_set_star(1)).unwrap();
        let g = code.generator_matrix();
        assert_eq!(g.len(), 4);
        assert!(g.iter().all(|row| row.len() == 16));
        assert_eq!(row_reduce(3, g.clone()).len(), 4);
        let text = code.generator_matrix_text();
        assert_eq!(text.lines().count(), 4);
    }

    // ==== closed-form tables ================================================

    #[test]
    fn table_one_matches_at_q81() {
        let fam = full_order_family(3, 5, 1).unwrap();
        let report = table_check(&fam, 1).unwrap();
        assert!(report.all_match, "{:#?}", report.cells);
        assert_eq!((report.n, report.k, report.level), (64, 4, 2));
        assert_eq!(
            report.weights,
            BTreeMap::from([(0, 1), (42, 64), (48, 16)])
        );
    }

    #[test]
    fn table_two_matches_at_q81() {
        let fam = full_order_family(3, 5, 1).unwrap();
        let report = table_check(&fam, 2).unwrap();
        assert!(report.all_match, "{:#?}", report.cells);
        assert_eq!((report.n, report.k, report.level), (16, 4, 1));
        assert_eq!(
            report.weights,
            BTreeMap::from([(0, 1), (6, 16), (12, 64)])
        );
    }

    #[test]
    fn table_one_matches_at_q4() {
        let fam = full_order_family(2, 3, 1).unwrap();
        let report = table_check(&fam, 1).unwrap();
        assert!(report.all_match, "{:#?}", report.cells);
        assert_eq!((report.n, report.k, report.level), (2, 2, 1));
        assert_eq!(report.weights, BTreeMap::from([(0, 1), (1, 2), (2, 1)]));
    }

    #[test]
    fn table_one_matches_at_q64() {
        let fam = full_order_family(2, 3, 2).unwrap();
        let report = table_check(&fam, 1).unwrap();
        assert!(report.all_match, "{:#?}", report.cells);
        assert_eq!((report.n, report.k, report.level), (14, 6, 1));
        assert_eq!(report.weights, BTreeMap::from([(0, 1), (4, 14), (8, 49)]));
    }

    #[test]
    fn table_three_weights_are_off_by_a_constant_at_q64() {
        // The n, k, and frequency cells agree, but each closed-form weight
        // sits below the true value (the printed forms violate the exact
        // average-weight identity Σ w·A_w = n·q(p−1)/p).
        let fam = full_order_family(2, 3, 2).unwrap();
        let report = table_check(&fam, 3).unwrap();
        assert!(!report.all_match);
        assert_eq!((report.n, report.k, report.level), (49, 6, 0));
        assert_eq!(report.weights, BTreeMap::from([(0, 1), (24, 49), (28, 14)]));
        let by_name: BTreeMap<&str, &CellCheck> =
            report.cells.iter().map(|c| (c.name.as_str(), c)).collect();
        assert!(by_name["n"].matches);
        assert!(by_name["k"].matches);
        assert!(by_name["freq_low"].matches);
        assert!(by_name["freq_high"].matches);
        assert!(!by_name["weight_low"].matches);
        assert_eq!(by_name["weight_low"].predicted, "23");
        assert!(!by_name["weight_high"].matches);
        assert_eq!(by_name["weight_high"].predicted, "27");
    }

    #[test]
    fn table_four_weights_are_off_by_a_constant_at_q15625() {
        // Forces the spectral route (q·n exceeds the direct budget). The
        // printed weights are short by (p−1)/p and are not even integers
        // here.
        let fam = full_order_family(5, 3, 2).unwrap();
        let report = table_check(&fam, 4).unwrap();
        assert!(!report.all_match);
        assert_eq!((report.n, report.k, report.level), (10416, 6, 0));
        assert_eq!(
            report.weights,
            BTreeMap::from([(0, 1), (8300, 10416), (8400, 5208)])
        );
        let by_name: BTreeMap<&str, &CellCheck> =
            report.cells.iter().map(|c| (c.name.as_str(), c)).collect();
        assert!(by_name["n"].matches);
        assert!(by_name["k"].matches);
        assert!(by_name["freq_low"].matches);
        assert!(by_name["freq_high"].matches);
        assert!(!by_name["weight_low"].matches);
        assert_eq!(by_name["weight_low"].predicted, "41496/5");
        assert!(!by_name["weight_high"].matches);
    }

    #[test]
    fn tables_one_and_two_match_at_q15625() {
        let fam = full_order_family(5, 3, 2).unwrap();
        let t1 = table_check(&fam, 1).unwrap();
        assert!(t1.all_match, "{:#?}", t1.cells);
        assert_eq!(
            t1.weights,
            BTreeMap::from([(0, 1), (2700, 3472), (2800, 12152)])
        );
        let t2 = table_check(&fam, 2).unwrap();
        assert!(t2.all_match, "{:#?}", t2.cells);
        assert_eq!(
            t2.weights,
            BTreeMap::from([(0, 1), (1300, 1736), (1400, 13888)])
        );
    }

    #[test]
    fn table_applicability() {
        let fam = full_order_family(3, 5, 1).unwrap();
        // r = 5 ≢ 1 (mod 3): table 3 needs r ≡ 1.
        assert!(matches!(table_check(&fam, 3), Err(Error::TableNotApplicable { .. })));
        // Table 4 fits the congruence but m = 1 leaves the zero level empty.
        assert!(matches!(table_check(&fam, 4), Err(Error::TableNotApplicable { .. })));
        assert!(matches!(table_check(&fam, 0), Err(Error::InvalidArgument { .. })));
        assert!(matches!(table_check(&fam, 5), Err(Error::InvalidArgument { .. })));
        let fam2 = full_order_family(2, 3, 2).unwrap();
        // r = 3 ≡ 1 (mod 2): tables 2 and 4 need r ≢ 1.
        assert!(matches!(table_check(&fam2, 2), Err(Error::TableNotApplicable { .. })));
        assert!(matches!(table_check(&fam2, 4), Err(Error::TableNotApplicable { .. })));
        // Other families are out of scope for the closed forms.
        let half = half_order_family(2, 17, 1).unwrap();
        assert!(matches!(table_check(&half, 1), Err(Error::TableNotApplicable { .. })));
        // Too large to materialize.
        let big = full_order_family(3, 7, 2).unwrap();
        assert!(matches!(table_check(&big, 1), Err(Error::FieldTooLarge { .. })));
    }

    #[test]
    fn half_order_level_code_has_its_own_shape() {
        // The level-one code of the half-order q = 256 instance: the
        // full-order closed forms do not transfer (they would predict
        // n = 240 and k = 16 here), but the code itself is a clean
        // two-weight code.
        let ctx = field(2, 8);
        let f = func(&ctx, "Tr(x^15)");
        let code = build_code(&ctx, &f.level_set_star(1)).unwrap();
        assert_eq!((code.n(), code.k()), (120, 8));
        assert_eq!(
            code.weight_distribution(),
            &BTreeMap::from([(0, 1), (56, 120), (64, 135)])
        );
        assert!(two_weight_flag(&code));
        macwilliams_ok(&code);
    }

    // ==== serialization =====================================================

    #[test]
    fn code_serializes_with_weights_and_flag() {
        let ctx = field(3, 4);
        let f = func(&ctx, "Tr(x^16)");
        let code = build_code(&ctx, &f.level_set_star(1)).unwrap();
        let json: serde_json::Value = serde_json::to_value(&code).unwrap();
        assert_eq!(json["n"], 16);
        assert_eq!(json["k"], 4);
        assert_eq!(json["two_weight"], true);
        assert_eq!(json["weights"]["6"], 16);
    }
}
