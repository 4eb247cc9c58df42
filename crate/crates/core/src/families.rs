//! Monomial trace-function families f(x) = Tr(x^{(q−1)/N}) built from
//! cyclotomic classes, with exact symbolic prediction of the value
//! distribution of f on F_q*.
//!
//! Three constructions are supported, each pinning N and the field size
//! q = p^e through a multiplicative-order hypothesis:
//!
//! * full-order prime power — N = r^m with p a primitive root mod r^m,
//!   e = φ(r^m);
//! * half-order prime power — N = r^m with r ≡ 1 (mod 4) and
//!   ord_{r^m}(p) = φ(r^m)/2, e = φ(r^m)/2;
//! * common-root product — N = p₁^m p₂^n with p₁ ≡ p₂ ≡ 3 (mod 4),
//!   gcd(p₁(p₁−1), p₂(p₂−1)) = 2, and p a common primitive root mod both
//!   prime powers, e = φ(N)/2.
//!
//! In each case the value multiset of f on F_q* is known in closed form:
//! a handful of rational constants (involving √r or √(p₁p₂) mod p) with
//! explicit frequencies. Predictions reduce those constants mod p and merge
//! equal residues, which also yields the class count of the induced level
//! partition; they are exact even when q is far beyond anything that can be
//! materialized, with frequencies kept as big integers.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::func::{parse_expr, PFunc};
use crate::gf::{FieldCtx, FIELD_CAP};
use crate::numth;
use crate::scheme::{criterion_check, level_partition, verify_scheme_bruteforce, SchemeReport};
use crate::walsh::walsh_fast;

/// Largest field exponent e (q = p^e) for which symbolic prediction runs.
pub const PREDICTION_DEGREE_CAP: u64 = 1 << 20;

/// Which of the three monomial constructions a [`FamilySpec`] instantiates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    FullOrderPrimePower,
    HalfOrderPrimePower,
    CommonRootProduct,
}

impl std::fmt::Display for FamilyKind {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FamilyKind::FullOrderPrimePower => "full-order-prime-power",
            FamilyKind::HalfOrderPrimePower => "half-order-prime-power",
            FamilyKind::CommonRootProduct => "common-root-product",
        };
        write!(out, "{s}")
    }
}

impl Serialize for FamilyKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parameters accepted by [`family_new`]; the prime-power kinds use
/// (p, r1, m1) and the product kind additionally requires (r2, m2).
#[derive(Clone, Copy, Debug)]
pub struct FamilyParams {
    pub p: u64,
    pub r1: u64,
    pub m1: u32,
    pub r2: Option<u64>,
    pub m2: Option<u32>,
}

/// A validated family instance with its derived quantities.
#[derive(Clone, Debug)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub p: u64,
    pub r1: u64,
    pub m1: u32,
    pub r2: Option<u64>,
    pub m2: Option<u32>,
    /// N, the divisor defining the monomial exponent d = (q−1)/N.
    pub n_divisor: u64,
    /// e with q = p^e.
    pub degree: u64,
    pub q: BigUint,
    pub d: BigUint,
    /// Predicted value → frequency of f on F_q*, values reduced mod p.
    pub image: BTreeMap<u64, BigUint>,
    /// Number of distinct predicted values (= classes of the level
    /// partition).
    pub class_count: u64,
    /// q fits under the field cap, so the function can be built.
    pub materializable: bool,
}

impl Serialize for FamilySpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("FamilySpec", 11)?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("r1", &self.r1)?;
        st.serialize_field("m1", &self.m1)?;
        st.serialize_field("r2", &self.r2)?;
        st.serialize_field("m2", &self.m2)?;
        st.serialize_field("n_divisor", &self.n_divisor)?;
        st.serialize_field("degree", &self.degree)?;
        st.serialize_field("q", &self.q.to_string())?;
        st.serialize_field("d", &self.d.to_string())?;
        let image: BTreeMap<String, String> = self
            .image
            .iter()
            .map(|(v, c)| (v.to_string(), c.to_string()))
            .collect();
        st.serialize_field("image", &image)?;
        st.serialize_field("class_count", &self.class_count)?;
        st.serialize_field("materializable", &self.materializable)?;
        st.end()
    }
}

fn violated(clause: &str) -> Error {
    Error::HypothesisViolated { clause: clause.to_string() }
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(p)) as u64
}

/// (−a) mod p for a already reduced.
fn negmod(a: u64, p: u64) -> u64 {
    (p - a % p) % p
}

fn checked_prime_power(r: u64, m: u32) -> Result<u64> {
    r.checked_pow(m).ok_or(Error::InvalidArgument {
        reason: format!("{r}^{m} does not fit in 64 bits"),
    })
}

/// ±√a mod p as an ordered pair, or a hypothesis error if a is a
/// non-residue; p must be odd here.
fn sqrt_pair(a: u64, p: u64, what: &str) -> Result<(u64, u64)> {
    let s = numth::sqrt_mod(a % p, p)?
        .ok_or_else(|| violated(&format!("{what} must be a quadratic residue mod p")))?;
    Ok((s, negmod(s, p)))
}

/// One symbolic value of f with its exact frequency on F_q*.
struct ValueClass {
    value: u64,
    freq: BigUint,
}

fn merge(classes: Vec<ValueClass>) -> BTreeMap<u64, BigUint> {
    let mut map: BTreeMap<u64, BigUint> = BTreeMap::new();
    for c in classes {
        if !c.freq.is_zero() {
            *map.entry(c.value).or_default() += c.freq;
        }
    }
    map
}

fn common_checks(p: u64, r: u64) -> Result<()> {
    if !numth::is_prime(p) {
        return Err(violated("p must be prime"));
    }
    if !numth::is_prime(r) {
        return Err(violated("r must be prime"));
    }
    if r == 2 {
        return Err(violated("r must be odd"));
    }
    if r == p {
        return Err(violated("p and r must be distinct"));
    }
    Ok(())
}

fn checked_degree(e: u64) -> Result<u64> {
    if e > PREDICTION_DEGREE_CAP {
        return Err(Error::BudgetExceeded {
            what: "field exponent for symbolic prediction",
            size: e,
            budget: PREDICTION_DEGREE_CAP,
        });
    }
    Ok(e)
}

fn finish(
    kind: FamilyKind,
    p: u64,
    r1: u64,
    m1: u32,
    r2: Option<u64>,
    m2: Option<u32>,
    n_divisor: u64,
    degree: u64,
    classes: Vec<ValueClass>,
) -> FamilySpec {
    let q = BigUint::from(p).pow(degree as u32);
    let d = (&q - BigUint::one()) / BigUint::from(n_divisor);
    let image = merge(classes);
    let class_count = image.len() as u64;
    let materializable = q <= BigUint::from(FIELD_CAP);
    FamilySpec {
        kind,
        p,
        r1,
        m1,
        r2,
        m2,
        n_divisor,
        degree,
        q,
        d,
        image,
        class_count,
        materializable,
    }
}

/// N = r^m with p a primitive root mod r^m; q = p^{φ(r^m)}.
///
/// f takes the value φ(r^m) with frequency (q−1)/r^m, the value −r^{m−1}
/// with frequency (q−1)/r^{m−1} − (q−1)/r^m, and 0 on the rest of F_q*
/// (empty exactly when m = 1); everything is then reduced mod p.
pub fn full_order_family(p: u64, r: u64, m: u32) -> Result<FamilySpec> {
    common_checks(p, r)?;
    if m == 0 {
        return Err(violated("m must be positive"));
    }
    let n = checked_prime_power(r, m)?;
    let phi = numth::euler_phi(n)?;
    if numth::mult_order(p, n)? != phi {
        return Err(violated("p must be a primitive root mod r^m"));
    }
    let degree = checked_degree(phi)?;

    let q = BigUint::from(p).pow(degree as u32);
    let t = (&q - BigUint::one()) / BigUint::from(n); // (q−1)/r^m
    let r_less = BigUint::from(r - 1);
    let v_phi = mulmod(numth::mod_pow(r, u64::from(m) - 1, p), (r - 1) % p, p);
    let v_neg = negmod(numth::mod_pow(r, u64::from(m) - 1, p), p);
    let classes = vec![
        ValueClass { value: v_phi, freq: t.clone() },
        ValueClass { value: v_neg, freq: &t * &r_less },
        ValueClass {
            value: 0,
            freq: &q - BigUint::one() - &t * BigUint::from(r),
        },
    ];
    Ok(finish(
        FamilyKind::FullOrderPrimePower,
        p,
        r,
        m,
        None,
        None,
        n,
        degree,
        classes,
    ))
}

/// N = r^m with r ≡ 1 (mod 4) and ord_{r^m}(p) = φ(r^m)/2; q = p^{φ(r^m)/2}.
///
/// f takes the value φ(r^m)/2 with frequency (q−1)/r^m, the pair
/// (±√r − 1)·r^{m−1}/2 with frequency (q−1)(r−1)/(2r^m) each (the pair
/// reads {0, 1} when p = 2), and 0 on the rest of F_q*.
pub fn half_order_family(p: u64, r: u64, m: u32) -> Result<FamilySpec> {
    common_checks(p, r)?;
    if m == 0 {
        return Err(violated("m must be positive"));
    }
    if r % 4 != 1 {
        return Err(violated("r must be ≡ 1 (mod 4)"));
    }
    let n = checked_prime_power(r, m)?;
    let phi = numth::euler_phi(n)?;
    if numth::mult_order(p, n)? != phi / 2 {
        return Err(violated("p must have order φ(r^m)/2 mod r^m"));
    }
    let degree = checked_degree(phi / 2)?;

    let q = BigUint::from(p).pow(degree as u32);
    let t = (&q - BigUint::one()) / BigUint::from(n); // (q−1)/r^m
    let pair_freq = &t * BigUint::from((r - 1) / 2);
    // v_half = φ(r^m)/2 = r^{m−1}·(r−1)/2 is an integer over Z.
    let v_half = mulmod(numth::mod_pow(r, u64::from(m) - 1, p), ((r - 1) / 2) % p, p);
    let (v_plus, v_minus) = if p == 2 {
        // (±√r − 1)·r^{m−1}/2 sum to the odd integer −r^{m−1}: one even,
        // one odd.
        (0, 1)
    } else {
        let (s, s_neg) = sqrt_pair(r, p, "r")?;
        let inv2 = numth::mod_inv(2, p)?;
        let scale = mulmod(numth::mod_pow(r, u64::from(m) - 1, p), inv2, p);
        (
            mulmod((s + p - 1) % p, scale, p),
            mulmod((s_neg + p - 1) % p, scale, p),
        )
    };
    let classes = vec![
        ValueClass { value: v_half, freq: t.clone() },
        ValueClass { value: v_plus, freq: pair_freq.clone() },
        ValueClass { value: v_minus, freq: pair_freq },
        ValueClass {
            value: 0,
            freq: &q - BigUint::one() - &t * BigUint::from(r),
        },
    ];
    Ok(finish(
        FamilyKind::HalfOrderPrimePower,
        p,
        r,
        m,
        None,
        None,
        n,
        degree,
        classes,
    ))
}

/// N = p₁^m p₂^n with p₁ ≡ p₂ ≡ 3 (mod 4), gcd(p₁(p₁−1), p₂(p₂−1)) = 2,
/// and p a common primitive root mod p₁^m and p₂^n; q = p^{φ(N)/2}.
///
/// f takes the value φ(N)/2 with frequency (q−1)/N, the values
/// −φ(N)/(2(pᵢ−1)) with frequency (q−1)(pᵢ−1)/N, the pair
/// (1 ± √(p₁p₂))·N/(2p₁p₂) with frequency (q−1)(p₁−1)(p₂−1)/(2N) each
/// ({0, 1} when p = 2), and 0 on the rest of F_q*.
pub fn product_family(p: u64, p1: u64, p2: u64, m: u32, n_exp: u32) -> Result<FamilySpec> {
    common_checks(p, p1)?;
    common_checks(p, p2)?;
    if m == 0 || n_exp == 0 {
        return Err(violated("m and n must be positive"));
    }
    if p1 == p2 {
        return Err(violated("p1 and p2 must be distinct"));
    }
    if p1 % 4 != 3 || p2 % 4 != 3 {
        return Err(violated("p1 and p2 must be ≡ 3 (mod 4)"));
    }
    if numth::gcd(p1 * (p1 - 1), p2 * (p2 - 1)) != 2 {
        return Err(violated("gcd(p1(p1−1), p2(p2−1)) must be 2"));
    }
    let n1 = checked_prime_power(p1, m)?;
    let n2 = checked_prime_power(p2, n_exp)?;
    if !numth::is_primitive_root(p, n1)? || !numth::is_primitive_root(p, n2)? {
        return Err(violated("p must be a common primitive root mod p1^m and p2^n"));
    }
    let big_n = n1.checked_mul(n2).ok_or(Error::InvalidArgument {
        reason: "p1^m · p2^n does not fit in 64 bits".to_string(),
    })?;
    let phi1 = numth::euler_phi(n1)?;
    let phi2 = numth::euler_phi(n2)?;
    // φ(N)/2 = (φ(p1^m)/2)·φ(p2^n); φ(p1^m) ≡ 2 (mod 4) so the half is exact.
    let degree = checked_degree((phi1 / 2).checked_mul(phi2).ok_or(
        Error::InvalidArgument { reason: "φ(N)/2 does not fit in 64 bits".to_string() },
    )?)?;

    let q = BigUint::from(p).pow(degree as u32);
    let t = (&q - BigUint::one()) / BigUint::from(big_n); // (q−1)/N
    // All four nonzero constants are integers over Z except the ± pair,
    // whose members are handled mod p.
    // φ(N)/2 = φ(p1^m)·φ(p2^n)/2 with φ(p2^n)/2 an integer.
    let v_phi = mulmod(phi1 % p, (phi2 / 2) % p, p);
    // −φ(N)/(2(p1−1)) = −p1^{m−1}·φ(p2^n)/2, and symmetrically.
    let v_1 = negmod(
        mulmod(numth::mod_pow(p1, u64::from(m) - 1, p), (phi2 / 2) % p, p),
        p,
    );
    let v_2 = negmod(
        mulmod(numth::mod_pow(p2, u64::from(n_exp) - 1, p), (phi1 / 2) % p, p),
        p,
    );
    let (v_plus, v_minus) = if p == 2 {
        // The pair sums to N/(p1p2), an odd integer.
        (0, 1)
    } else {
        let (s, s_neg) = sqrt_pair(mulmod(p1 % p, p2 % p, p), p, "p1·p2")?;
        let inv2 = numth::mod_inv(2, p)?;
        let scale = mulmod((big_n / (p1 * p2)) % p, inv2, p);
        (
            mulmod((1 + s) % p, scale, p),
            mulmod((1 + s_neg) % p, scale, p),
        )
    };
    let pair_freq = &t * BigUint::from((p1 - 1) * (p2 - 1) / 2);
    let zero_stride = big_n / (p1 * p2); // p1^{m−1} p2^{n−1}
    let classes = vec![
        ValueClass { value: v_phi, freq: t.clone() },
        ValueClass { value: v_1, freq: &t * BigUint::from(p1 - 1) },
        ValueClass { value: v_2, freq: &t * BigUint::from(p2 - 1) },
        ValueClass { value: v_plus, freq: pair_freq.clone() },
        ValueClass { value: v_minus, freq: pair_freq },
        ValueClass {
            value: 0,
            freq: &q - BigUint::one()
                - (&q - BigUint::one()) / BigUint::from(zero_stride),
        },
    ];
    Ok(finish(
        FamilyKind::CommonRootProduct,
        p,
        p1,
        m,
        Some(p2),
        Some(n_exp),
        big_n,
        degree,
        classes,
    ))
}

/// Dispatching constructor over [`FamilyKind`].
pub fn family_new(kind: FamilyKind, params: FamilyParams) -> Result<FamilySpec> {
    match kind {
        FamilyKind::FullOrderPrimePower => full_order_family(params.p, params.r1, params.m1),
        FamilyKind::HalfOrderPrimePower => half_order_family(params.p, params.r1, params.m1),
        FamilyKind::CommonRootProduct => {
            let r2 = params.r2.ok_or(Error::InvalidArgument {
                reason: "product family requires a second prime".to_string(),
            })?;
            let m2 = params.m2.ok_or(Error::InvalidArgument {
                reason: "product family requires a second exponent".to_string(),
            })?;
            product_family(params.p, params.r1, r2, params.m1, m2)
        }
    }
}

/// The predicted class count and value distribution (recomputed from the
/// validated parameters).
pub fn predict_classes(spec: &FamilySpec) -> (u64, BTreeMap<u64, BigUint>) {
    (spec.class_count, spec.image.clone())
}

/// Builds f = Tr(x^{(q−1)/N}) on the actual field and verifies the
/// predicted value distribution against the observed one.
pub fn materialize(spec: &FamilySpec) -> Result<PFunc> {
    if !spec.materializable {
        return Err(Error::FieldTooLarge {
            q: u128::try_from(&spec.q).unwrap_or(u128::MAX),
            cap: FIELD_CAP,
        });
    }
    let ctx = Arc::new(FieldCtx::new(spec.p, spec.degree as u32, None)?);
    let d: u64 = spec.d.clone().try_into().expect("materializable implies d < q < 2^64");
    let f = parse_expr(&format!("Tr(x^{d})"), &ctx)?.evaluate(&ctx);
    if !f.is_fp_star_invariant() {
        return Err(Error::PredictionMismatch {
            what: "materialized function is not F_p*-invariant".to_string(),
        });
    }
    // Observed value → frequency on F_q* (the origin contributes f(0) = 0
    // to the level sizes and is excluded here).
    let mut observed = f.level_sizes();
    if let Some(c) = observed.get_mut(&0) {
        *c -= 1;
        if *c == 0 {
            observed.remove(&0);
        }
    }
    let predicted: BTreeMap<u64, u64> = spec
        .image
        .iter()
        .map(|(v, c)| (*v, u64::try_from(c).expect("frequency below q")))
        .collect();
    if observed != predicted {
        return Err(Error::PredictionMismatch {
            what: format!(
                "observed value distribution {observed:?} differs from predicted {predicted:?}"
            ),
        });
    }
    Ok(f)
}

/// Materializes the family, runs the spectral scheme criterion, and (when
/// q ≤ 4096) the brute-force verifier, checking everything against the
/// prediction; returns the combined report.
pub fn end_to_end(spec: &FamilySpec) -> Result<SchemeReport> {
    let f = materialize(spec)?;
    let w = walsh_fast(&f)?;
    let mut report = criterion_check(&f, &w)?;
    if !report.is_scheme {
        return Err(Error::PredictionMismatch {
            what: format!(
                "level partition failed the scheme criterion for {}",
                spec.kind
            ),
        });
    }
    if report.class_count != spec.class_count {
        return Err(Error::PredictionMismatch {
            what: format!(
                "criterion found {} classes, prediction says {}",
                report.class_count, spec.class_count
            ),
        });
    }
    if f.ctx().q() <= crate::scheme::BRUTEFORCE_CAP {
        let brute = verify_scheme_bruteforce(&level_partition(&f)?)?;
        if !brute.is_scheme {
            return Err(Error::PredictionMismatch {
                what: "brute-force verification contradicts the criterion".to_string(),
            });
        }
        report.intersection_numbers = brute.intersection_numbers;
        report.symmetry_ok = brute.symmetry_ok;
    }
    Ok(report)
}

// ===========================================================================
// tests
// ===========================================================================
