//! p-ary functions f: F_q → F_p as dense value tables, plus the small
//! expression language `Tr(c₁*x^d₁ ± c₂*x^d₂ ± …)` used to enter them.
//!
//! A function is stored as a length-q array of prime-field digits indexed
//! by element encoding. Level sets D_{f,i} = {x ∈ F_q : f(x) = i}, the
//! image I = f(F_q*), the scaling symmetry f(ax) = f(x) for a ∈ F_p*, and
//! the evenness test f(−x) = f(x) are all read straight off the table.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gf::{FElt, FieldCtx};

// ---------------------------------------------------------------------------
// PFunc: dense value table
// ---------------------------------------------------------------------------

/// A p-ary function f: F_q → F_p, materialized as a dense table of
/// prime-field digits indexed by element encoding.
#[derive(Clone, Debug)]
pub struct PFunc {
    ctx: Arc<FieldCtx>,
    values: Vec<u32>,
    provenance: String,
}

impl PFunc {
    /// Builds a function from an explicit value table.
    ///
    /// The table must have exactly q entries, each in [0, p).
    pub fn from_values(
        ctx: Arc<FieldCtx>,
        values: Vec<u32>,
        provenance: impl Into<String>,
    ) -> Result<PFunc> {
        if values.len() as u64 != ctx.q() {
            return Err(Error::InvalidArgument {
                reason: format!(
                    "value table has {} entries, field has {}",
                    values.len(),
                    ctx.q()
                ),
            });
        }
        if let Some(bad) = values.iter().find(|&&v| u64::from(v) >= ctx.p()) {
            return Err(Error::InvalidArgument {
                reason: format!("table entry {} is not a digit mod {}", bad, ctx.p()),
            });
        }
        Ok(PFunc { ctx, values, provenance: provenance.into() })
    }

    /// The field the function lives on.
    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    /// The raw value table, indexed by element encoding.
    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// Source text the function was built from ("table" for file loads).
    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// f(x).
    pub fn value(&self, x: FElt) -> u64 {
        u64::from(self.values[x.0 as usize])
    }

    /// Level set D_{f,i} = {x ∈ F_q : f(x) = i}, sorted by encoding.
    /// Note D_{f,f(0)} contains the origin.
    pub fn level_set(&self, i: u64) -> Vec<FElt> {
        assert!(i < self.ctx.p(), "level {} out of range mod {}", i, self.ctx.p());
        self.values
            .iter()
            .enumerate()
            .filter(|&(_, &v)| u64::from(v) == i)
            .map(|(e, _)| FElt(e as u64))
            .collect()
    }

    /// Punctured level set D*_{f,i} = D_{f,i} \ {0}, sorted by encoding.
    pub fn level_set_star(&self, i: u64) -> Vec<FElt> {
        let mut d = self.level_set(i);
        if let Some(0) = d.first().map(|e| e.0) {
            d.remove(0);
        }
        d
    }

    /// Sizes |D_{f,i}| for every value i that occurs (origin included).
    pub fn level_sizes(&self) -> BTreeMap<u64, u64> {
        let mut sizes = BTreeMap::new();
        for &v in &self.values {
            *sizes.entry(u64::from(v)).or_insert(0) += 1;
        }
        sizes
    }

    /// f(F_q), the full image including f(0).
    pub fn image(&self) -> BTreeSet<u64> {
        self.values.iter().map(|&v| u64::from(v)).collect()
    }

    /// I = f(F_q*), the image with the origin removed.
    pub fn image_star(&self) -> BTreeSet<u64> {
        self.values[1..].iter().map(|&v| u64::from(v)).collect()
    }

    /// Whether f(ax) = f(x) for every a ∈ F_p* and x ∈ F_q.
    ///
    /// Checked against a single generator h of F_p* (h-invariance implies
    /// invariance under all of ⟨h⟩ = F_p*), so the test is O(q).
    pub fn is_fp_star_invariant(&self) -> bool {
        let ctx = &self.ctx;
        if ctx.p() == 2 {
            return true;
        }
        let e = (ctx.q() - 1) / (ctx.p() - 1);
        let h = ctx.pow(ctx.generator(), e);
        self.values
            .iter()
            .enumerate()
            .all(|(enc, &v)| self.values[ctx.mul(h, FElt(enc as u64)).0 as usize] == v)
    }

    /// Whether f(−x) = f(x) for every x (equivalently −D_{f,i} = D_{f,i}).
    pub fn is_even(&self) -> bool {
        self.values
            .iter()
            .enumerate()
            .all(|(enc, &v)| self.values[self.ctx.neg(FElt(enc as u64)).0 as usize] == v)
    }

    /// SHA-256 digest of (p, m, modulus, values), as lowercase hex.
    ///
    /// This is the cache key component and spectrum fingerprint: two
    /// functions collide only if they agree on the same field.
    pub fn hash_hex(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.ctx.p().to_le_bytes());
        h.update(self.ctx.m().to_le_bytes());
        for &c in self.ctx.modulus() {
            h.update(c.to_le_bytes());
        }
        for &v in &self.values {
            h.update(v.to_le_bytes());
        }
        hex::encode(h.finalize())
    }

    /// Renders the table in the interchange format: a header line
    /// `p m q`, then the q digits in encoding order.
    pub fn to_table_string(&self) -> String {
        let mut s = format!("{} {} {}\n", self.ctx.p(), self.ctx.m(), self.ctx.q());
        for chunk in self.values.chunks(32) {
            let line: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    /// Parses the interchange format produced by [`to_table_string`].
    ///
    /// The header must match the supplied field exactly.
    ///
    /// [`to_table_string`]: PFunc::to_table_string
    pub fn from_table_str(ctx: Arc<FieldCtx>, text: &str) -> Result<PFunc> {
        let mut tokens = text.split_whitespace();
        let mut header = |what: &str| -> Result<u64> {
            tokens
                .next()
                .ok_or_else(|| Error::InvalidArgument {
                    reason: format!("table header missing {what}"),
                })?
                .parse::<u64>()
                .map_err(|_| Error::InvalidArgument {
                    reason: format!("table header {what} is not an integer"),
                })
        };
        let (p, m, q) = (header("p")?, header("m")?, header("q")?);
        if p != ctx.p() || m != u64::from(ctx.m()) || q != ctx.q() {
            return Err(Error::InvalidArgument {
                reason: format!(
                    "table header {} {} {} does not match field {}",
                    p,
                    m,
                    q,
                    ctx.spec_string()
                ),
            });
        }
        let mut values = Vec::with_capacity(q as usize);
        for tok in tokens {
            let v: u64 = tok.parse().map_err(|_| Error::InvalidArgument {
                reason: format!("table entry {tok:?} is not an integer"),
            })?;
            if v >= p {
                return Err(Error::InvalidArgument {
                    reason: format!("table entry {v} is not a digit mod {p}"),
                });
            }
            values.push(v as u32);
        }
        if values.len() as u64 != q {
            return Err(Error::InvalidArgument {
                reason: format!("table has {} entries, header says {}", values.len(), q),
            });
        }
        PFunc::from_values(ctx, values, "table")
    }
}

// ---------------------------------------------------------------------------
// TraceExpr: the input language Tr(c*x^d ± …)
// ---------------------------------------------------------------------------

/// Coefficient of one monomial: an integer reduced into the prime subfield,
/// or a power `g^k` of the field generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coef {
    Int(u64),
    GenPow(u64),
}

/// One monomial c·x^d inside the trace, with its leading sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub neg: bool,
    pub coef: Coef,
    pub exp: u64,
}

/// A trace polynomial f(x) = Tr(Σᵢ ±cᵢ·x^{dᵢ}) with all dᵢ ≥ 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceExpr {
    terms: Vec<Term>,
}

impl TraceExpr {
    /// The parsed terms in source order.
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Evaluates the expression to a dense table over the given field.
    ///
    /// All monomials vanish at the origin (exponents are ≥ 1), so f(0) = 0.
    /// Nonzero points are swept as the generator's power sequence, with one
    /// running product per term; the whole table costs O(q · #terms)
    /// multiplications.
    pub fn evaluate(&self, ctx: &Arc<FieldCtx>) -> PFunc {
        let q = ctx.q() as usize;
        let mut values = vec![0u32; q];
        let g = ctx.generator();
        // Per-term state: current value cᵢ·x^{dᵢ} and the step gᵈⁱ.
        let mut running: Vec<FElt> = Vec::with_capacity(self.terms.len());
        let mut steps: Vec<FElt> = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let mut c = match t.coef {
                Coef::Int(n) => FElt(n % ctx.p()),
                Coef::GenPow(k) => ctx.pow(g, k),
            };
            if t.neg {
                c = ctx.neg(c);
            }
            running.push(c);
            steps.push(ctx.pow(g, t.exp));
        }
        let mut x = FElt::ONE;
        for _ in 0..ctx.q() - 1 {
            let mut s = FElt::ZERO;
            for r in &running {
                s = ctx.add(s, *r);
            }
            values[x.0 as usize] = ctx.trace(s) as u32;
            for (r, st) in running.iter_mut().zip(&steps) {
                *r = ctx.mul(*r, *st);
            }
            x = ctx.mul(x, g);
        }
        PFunc { ctx: Arc::clone(ctx), values, provenance: self.to_string() }
    }
}

impl fmt::Display for TraceExpr {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "Tr(")?;
        for (i, t) in self.terms.iter().enumerate() {
            if i == 0 {
                if t.neg {
                    write!(out, "-")?;
                }
            } else {
                write!(out, " {} ", if t.neg { '-' } else { '+' })?;
            }
            match t.coef {
                Coef::Int(1) => {}
                Coef::Int(c) => write!(out, "{c}*")?,
                Coef::GenPow(k) => write!(out, "g^{k}*")?,
            }
            write!(out, "x")?;
            if t.exp != 1 {
                write!(out, "^{}", t.exp)?;
            }
        }
        write!(out, ")")
    }
}

/// Parses `Tr(` term (`+`|`-` term)* `)` where
/// term := [coef `*`] `x` [`^` exp] and coef is a decimal literal (reduced
/// mod p) or `g^k`. Whitespace between tokens is ignored; exponents must
/// be ≥ 1.
pub fn parse_expr(text: &str, ctx: &FieldCtx) -> Result<TraceExpr> {
    let mut p = Parser { bytes: text.as_bytes(), pos: 0, modulus: ctx.p() };
    p.skip_ws();
    p.expect_str("Tr")?;
    p.skip_ws();
    p.expect_byte(b'(')?;
    p.skip_ws();
    let mut terms = Vec::new();
    // Optional sign on the first term.
    let mut neg = p.eat_sign().unwrap_or(false);
    loop {
        terms.push(p.term(neg)?);
        p.skip_ws();
        match p.eat_sign() {
            Some(s) => neg = s,
            None => break,
        }
    }
    p.expect_byte(b')')?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("trailing input after ')'"));
    }
    Ok(TraceExpr { terms })
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    modulus: u64,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::SyntaxError { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.bytes.get(self.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn expect_str(&mut self, s: &str) -> Result<()> {
        if self.bytes[self.pos..].starts_with(s.as_bytes()) {
            self.pos += s.len();
            Ok(())
        } else {
            Err(self.err(&format!("expected {s:?}")))
        }
    }

    fn expect_byte(&mut self, b: u8) -> Result<()> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected {:?}", char::from(b))))
        }
    }

    /// Consumes `+` or `-` (ASCII or U+2212) and returns whether it negates.
    fn eat_sign(&mut self) -> Option<bool> {
        match self.peek() {
            Some(b'+') => {
                self.pos += 1;
                Some(false)
            }
            Some(b'-') => {
                self.pos += 1;
                Some(true)
            }
            _ if self.bytes[self.pos..].starts_with("\u{2212}".as_bytes()) => {
                self.pos += '\u{2212}'.len_utf8();
                Some(true)
            }
            _ => None,
        }
    }

    fn literal(&mut self) -> Result<u64> {
        let start = self.pos;
        let mut n: u64 = 0;
        while let Some(b @ b'0'..=b'9') = self.peek() {
            n = n
                .checked_mul(10)
                .and_then(|n| n.checked_add(u64::from(b - b'0')))
                .ok_or(Error::ExponentOverflow { pos: start })?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected an integer literal"));
        }
        Ok(n)
    }

    fn term(&mut self, neg: bool) -> Result<Term> {
        self.skip_ws();
        let coef = match self.peek() {
            Some(b'x') => Coef::Int(1),
            Some(b'g') => {
                self.pos += 1;
                self.skip_ws();
                let k = if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.skip_ws();
                    self.literal()?
                } else {
                    1
                };
                self.skip_ws();
                self.expect_byte(b'*')?;
                Coef::GenPow(k)
            }
            Some(b'0'..=b'9') => {
                let c = self.literal()? % self.modulus;
                self.skip_ws();
                self.expect_byte(b'*')?;
                Coef::Int(c)
            }
            _ => return Err(self.err("expected a term")),
        };
        self.skip_ws();
        self.expect_byte(b'x')?;
        self.skip_ws();
        let exp = if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let pos = self.pos;
            let e = self.literal()?;
            if e == 0 {
                return Err(Error::SyntaxError {
                    pos,
                    msg: "exponent must be ≥ 1".to_string(),
                });
            }
            e
        } else {
            1
        };
        Ok(Term { neg, coef, exp })
    }
}

// ===========================================================================
// tests
// ===========================================================================

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: u64, m: u32, modulus: Option<Vec<u64>>) -> Arc<FieldCtx> {
        Arc::new(FieldCtx::new(p, m, modulus).unwrap())
    }

    // ==== parsing ==========================================================

    #[test]
    fn parses_the_two_term_quintic() {
        let ctx = field(3, 3, None);
        let e = parse_expr("Tr(2*x - x^5)", &ctx).unwrap();
        assert_eq!(
            e.terms(),
            &[
                Term { neg: false, coef: Coef::Int(2), exp: 1 },
                Term { neg: true, coef: Coef::Int(1), exp: 5 },
            ]
        );
        assert_eq!(e.to_string(), "Tr(2*x - x^5)");
    }

    #[test]
    fn parses_a_monomial() {
        let ctx = field(3, 4, None);
        let e = parse_expr("Tr(x^16)", &ctx).unwrap();
        assert_eq!(e.terms(), &[Term { neg: false, coef: Coef::Int(1), exp: 16 }]);
        assert_eq!(e.to_string(), "Tr(x^16)");
    }

    #[test]
    fn whitespace_and_unicode_minus_are_tolerated() {
        let ctx = field(3, 3, None);
        let a = parse_expr("Tr( 2 * x\t-\tx ^ 5 )", &ctx).unwrap();
        let b = parse_expr("Tr(2*x \u{2212} x^5)", &ctx).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "Tr(2*x - x^5)");
    }

    #[test]
    fn generator_coefficients_parse() {
        let ctx = field(3, 2, None);
        let e = parse_expr("Tr(g^3*x^2 + g*x)", &ctx).unwrap();
        assert_eq!(
            e.terms(),
            &[
                Term { neg: false, coef: Coef::GenPow(3), exp: 2 },
                Term { neg: false, coef: Coef::GenPow(1), exp: 1 },
            ]
        );
        assert_eq!(e.to_string(), "Tr(g^3*x^2 + g^1*x)");
        // The normalized form reparses to the same expression.
        assert_eq!(parse_expr(&e.to_string(), &ctx).unwrap(), e);
    }

    #[test]
    fn coefficients_reduce_into_the_prime_subfield() {
        let ctx = field(3, 2, None);
        let e = parse_expr("Tr(5*x)", &ctx).unwrap();
        assert_eq!(e.terms(), &[Term { neg: false, coef: Coef::Int(2), exp: 1 }]);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let ctx = field(3, 2, None);
        match parse_expr("Tr()", &ctx) {
            Err(Error::SyntaxError { pos, .. }) => assert_eq!(pos, 3),
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(matches!(parse_expr("tr(x)", &ctx), Err(Error::SyntaxError { pos: 0, .. })));
        assert!(matches!(parse_expr("Tr(x^0)", &ctx), Err(Error::SyntaxError { pos: 5, .. })));
        assert!(matches!(parse_expr("Tr(2x)", &ctx), Err(Error::SyntaxError { .. })));
        assert!(matches!(parse_expr("Tr(x) junk", &ctx), Err(Error::SyntaxError { .. })));
        assert!(matches!(parse_expr("Tr(x", &ctx), Err(Error::SyntaxError { .. })));
    }

    #[test]
    fn huge_literals_overflow() {
        let ctx = field(3, 2, None);
        assert!(matches!(
            parse_expr("Tr(x^99999999999999999999)", &ctx),
            Err(Error::ExponentOverflow { .. })
        ));
        assert!(matches!(
            parse_expr("Tr(99999999999999999999*x)", &ctx),
            Err(Error::ExponentOverflow { .. })
        ));
    }

    // ==== evaluation =======================================================

    #[test]
    fn traces_of_basis_powers_match_the_field() {
        // F_27 with modulus x³ − x − 1: Tr(x) = 0 and Tr(x²) = 2.
        let ctx = field(3, 3, Some(vec![2, 2, 0, 1]));
        let xelt = FElt(3); // digits (0,1,0) = the residue class of x
        let f1 = parse_expr("Tr(x)", &ctx).unwrap().evaluate(&ctx);
        let f2 = parse_expr("Tr(x^2)", &ctx).unwrap().evaluate(&ctx);
        assert_eq!(f1.value(xelt), 0);
        assert_eq!(f2.value(xelt), 2);
        // Spot-check the whole table against per-point field arithmetic.
        for x in ctx.elements() {
            assert_eq!(f2.value(x), ctx.trace(ctx.mul(x, x)));
        }
    }

    #[test]
    fn zero_coefficient_gives_the_zero_table() {
        let ctx = field(3, 2, None);
        let f = parse_expr("Tr(0*x)", &ctx).unwrap().evaluate(&ctx);
        assert!(f.values().iter().all(|&v| v == 0));
        assert_eq!(f.image_star(), BTreeSet::from([0]));
        assert_eq!(f.level_set(0).len(), 9);
    }

    #[test]
    fn monomials_vanish_at_the_origin() {
        let ctx = field(3, 3, None);
        let f = parse_expr("Tr(2*x - x^5)", &ctx).unwrap().evaluate(&ctx);
        assert_eq!(f.value(FElt::ZERO), 0);
        // Tr(1) = m·1 = 3 ≡ 0, so f(1) = Tr(2·1 − 1) = Tr(1) = 0.
        assert_eq!(f.value(FElt::ONE), 0);
    }

    #[test]
    fn evaluation_is_deterministic() {
        let ctx = field(3, 3, None);
        let a = parse_expr("Tr(2*x - x^5)", &ctx).unwrap().evaluate(&ctx);
        let b = parse_expr("Tr(2*x - x^5)", &ctx).unwrap().evaluate(&ctx);
        assert_eq!(a.values(), b.values());
        assert_eq!(a.hash_hex(), b.hash_hex());
    }

    #[test]
    fn generator_coefficient_evaluates_to_the_generator() {
        let ctx = field(3, 2, None);
        let f = parse_expr("Tr(g^1*x)", &ctx).unwrap().evaluate(&ctx);
        let g = ctx.generator();
        for x in ctx.elements() {
            assert_eq!(f.value(x), ctx.trace(ctx.mul(g, x)));
        }
    }

    // ==== level sets, images, symmetries ===================================

    #[test]
    fn quartic_gauss_period_image_over_f81() {
        let ctx = field(3, 4, None);
        let f = parse_expr("Tr(x^16)", &ctx).unwrap().evaluate(&ctx);
        assert_eq!(f.image_star(), BTreeSet::from([1, 2]));
        assert_eq!(f.level_sizes(), BTreeMap::from([(0, 1), (1, 16), (2, 64)]));
        assert_eq!(f.level_set(0), vec![FElt::ZERO]);
        assert!(f.is_fp_star_invariant());
        assert!(f.is_even());
    }

    #[test]
    fn binary_gauss_period_image_over_f256() {
        let ctx = field(2, 8, None);
        let f = parse_expr("Tr(x^15)", &ctx).unwrap().evaluate(&ctx);
        assert_eq!(f.image_star(), BTreeSet::from([0, 1]));
        assert_eq!(f.level_set_star(0).len(), 135);
        assert_eq!(f.level_set(1).len(), 120);
        assert!(f.is_fp_star_invariant());
    }

    #[test]
    fn linear_trace_is_not_scaling_invariant_for_odd_p() {
        let ctx = field(3, 2, None);
        let f = parse_expr("Tr(x)", &ctx).unwrap().evaluate(&ctx);
        assert!(!f.is_fp_star_invariant());
        assert!(!f.is_even());
        // p = 2: F_p* = {1}, so any function is invariant.
        let ctx2 = field(2, 3, None);
        let f2 = parse_expr("Tr(x)", &ctx2).unwrap().evaluate(&ctx2);
        assert!(f2.is_fp_star_invariant());
        assert!(f2.is_even());
    }

    #[test]
    fn shifted_quadratic_is_not_even() {
        let ctx = field(3, 2, None);
        let f = parse_expr("Tr(x^2 + x)", &ctx).unwrap().evaluate(&ctx);
        assert!(!f.is_even());
        assert!(parse_expr("Tr(x^2)", &ctx).unwrap().evaluate(&ctx).is_even());
    }

    #[test]
    fn level_sets_partition_the_field() {
        let ctx = field(5, 2, None);
        let f = parse_expr("Tr(x^3 + 2*x)", &ctx).unwrap().evaluate(&ctx);
        let total: usize = (0..5).map(|i| f.level_set(i).len()).sum();
        assert_eq!(total, 25);
        for i in 0..5 {
            let d = f.level_set(i);
            assert!(d.windows(2).all(|w| w[0] < w[1]), "level set must be sorted");
            assert!(d.iter().all(|&x| f.value(x) == i));
        }
    }

    // ==== tables, hashing ==================================================

    #[test]
    fn table_round_trip() {
        let ctx = field(3, 3, None);
        let f = parse_expr("Tr(2*x - x^5)", &ctx).unwrap().evaluate(&ctx);
        let text = f.to_table_string();
        assert!(text.starts_with("3 3 27\n"));
        let g = PFunc::from_table_str(Arc::clone(&ctx), &text).unwrap();
        assert_eq!(f.values(), g.values());
        assert_eq!(g.provenance(), "table");
    }

    #[test]
    fn table_header_must_match_the_field() {
        let ctx = field(3, 2, None);
        let bad = "3 3 27\n0 0 0 0 0 0 0 0 0";
        assert!(matches!(
            PFunc::from_table_str(Arc::clone(&ctx), bad),
            Err(Error::InvalidArgument { .. })
        ));
        let short = "3 2 9\n0 0 0";
        assert!(matches!(
            PFunc::from_table_str(Arc::clone(&ctx), short),
            Err(Error::InvalidArgument { .. })
        ));
        let out_of_range = "3 2 9\n0 0 0 0 0 0 0 0 7";
        assert!(matches!(
            PFunc::from_table_str(Arc::clone(&ctx), out_of_range),
            Err(Error::InvalidArgument { .. })
        ));
    }

    #[test]
    fn from_values_validates() {
        let ctx = field(3, 2, None);
        assert!(PFunc::from_values(Arc::clone(&ctx), vec![0; 8], "t").is_err());
        assert!(PFunc::from_values(Arc::clone(&ctx), vec![3; 9], "t").is_err());
        assert!(PFunc::from_values(Arc::clone(&ctx), vec![2; 9], "t").is_ok());
    }

    #[test]
    fn distinct_functions_have_distinct_hashes() {
        let ctx = field(3, 2, None);
        let a = parse_expr("Tr(x)", &ctx).unwrap().evaluate(&ctx);
        let b = parse_expr("Tr(x^2)", &ctx).unwrap().evaluate(&ctx);
        assert_ne!(a.hash_hex(), b.hash_hex());
        assert_eq!(a.hash_hex().len(), 64);
    }
}
