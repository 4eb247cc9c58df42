//! Exact bentness detection and weak-regularity classification.
//!
//! A function f on F_q (q = p^m, p odd) is bent when every Walsh value has
//! norm q. Each value of a bent function factors exactly as
//!
//!   W_f(β) = μ(β) · Γ · ζ_p^{g(β)},    Γ = (p*)^{⌊m/2⌋} · G^{m mod 2},
//!
//! where p* = (−1)^{(p−1)/2} p, G = Σ_x ζ_p^{x²} is the quadratic Gauss sum
//! (G² = p*), μ(β) = ±1, and g is the associated function. f is weakly
//! regular when μ is constant; the constant ε and the parity of (p, m)
//! determine the unit u in W_f(β) = u·p^{m/2}·ζ^{f̃(β)}, and f is regular
//! when u = 1 (possible only when u is real, i.e. m even or p ≡ 1 mod 4).

use std::sync::Arc;

use num_bigint::BigInt;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::cyclo::Cyc;
use crate::error::{Error, Result};
use crate::func::PFunc;
use crate::gf::FElt;
use crate::numth::ResidueTags;
use crate::scheme::criterion_check;
use crate::walsh::WalshSpectrum;

/// The unit u of a weakly regular bent function, one of ±1, ±i.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Unit {
    PlusOne,
    MinusOne,
    PlusI,
    MinusI,
}

impl std::fmt::Display for Unit {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Unit::PlusOne => "+1",
            Unit::MinusOne => "-1",
            Unit::PlusI => "+i",
            Unit::MinusI => "-i",
        };
        write!(out, "{s}")
    }
}

impl Serialize for Unit {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Decomposition and regularity data for a bent function.
#[derive(Clone, Debug)]
pub struct BentProfile {
    /// Always true for profiles produced by [`decompose`].
    pub is_bent: bool,
    /// μ(β) ∈ {+1, −1}, indexed by element encoding.
    pub mu: Vec<i8>,
    /// The associated function g with W_f(β) = μ(β)·Γ·ζ^{g(β)}.
    pub g: PFunc,
    /// μ is constant (set by [`classify_regularity`]).
    pub weakly_regular: bool,
    /// The constant value of μ when weakly regular.
    pub epsilon: Option<i8>,
    /// The unit u with W_f(β) = u·p^{m/2}·ζ^{f̃(β)} when weakly regular.
    pub unit: Option<Unit>,
    /// The dual f̃ = g when weakly regular.
    pub dual: Option<PFunc>,
    /// u = +1.
    pub regular: bool,
}

fn digit_string(f: &PFunc) -> String {
    let sep = if f.ctx().p() <= 9 { "" } else { "," };
    f.values()
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

impl Serialize for BentProfile {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("BentProfile", 9)?;
        st.serialize_field("field", &self.g.ctx().spec_string())?;
        st.serialize_field("is_bent", &self.is_bent)?;
        st.serialize_field("weakly_regular", &self.weakly_regular)?;
        st.serialize_field("regular", &self.regular)?;
        st.serialize_field("epsilon", &self.epsilon)?;
        st.serialize_field("unit", &self.unit)?;
        st.serialize_field("mu", &self.mu)?;
        st.serialize_field("g", &digit_string(&self.g))?;
        st.serialize_field("dual", &self.dual.as_ref().map(digit_string))?;
        st.end()
    }
}

/// Whether every Walsh value has exact norm q.
pub fn is_bent(spec: &WalshSpectrum) -> bool {
    let q = BigInt::from(spec.ctx().q());
    spec.values()
        .iter()
        .all(|w| w.norm_sq().as_integer().map_or(false, |n| n == q))
}

/// Sign of (p*)^e = ((−1)^{(p−1)/2} p)^e: −1 iff p ≡ 3 (mod 4) and e is odd.
fn p_star_sign(p: u64, e: u32) -> i64 {
    if p % 4 == 3 && e % 2 == 1 {
        -1
    } else {
        1
    }
}

/// Factors every Walsh value of a bent function.
///
/// Matches W_f(β) against the 2p exact candidates ±Γ·ζ^j and records
/// μ(β) = ±1 and g(β) = j; linear independence of 1, ζ, …, ζ^{p−1} over the
/// relations of Z[ζ_p] makes the match unique. Regularity fields are left
/// unset; see [`classify_regularity`]. Requires p odd, f(0) = 0, and a bent
/// spectrum.
pub fn decompose(spec: &WalshSpectrum, f: &PFunc) -> Result<BentProfile> {
    let ctx = f.ctx();
    let (p, m, q) = (ctx.p(), ctx.m(), ctx.q());
    if p == 2 {
        return Err(Error::EvenCharacteristic);
    }
    if spec.f_hash() != f.hash_hex() {
        return Err(Error::InternalMismatch {
            what: "spectrum does not belong to the supplied function table".to_string(),
        });
    }
    if f.values()[0] != 0 {
        return Err(Error::NonzeroAtOrigin { value: u64::from(f.values()[0]) });
    }
    if !is_bent(spec) {
        return Err(Error::NotBent);
    }

    let half = m / 2;
    let mut gamma = Cyc::from_int(p, BigInt::from(p_star_sign(p, half)) * BigInt::from(p).pow(half));
    if m % 2 == 1 {
        gamma = &gamma * &Cyc::gauss_sum(p)?;
    }
    let plus: Vec<Cyc> = (0..p).map(|j| gamma.mul_root(j)).collect();
    let minus: Vec<Cyc> = plus.iter().map(|c| -c).collect();

    let mut mu = vec![0i8; q as usize];
    let mut g_values = vec![0u32; q as usize];
    for b in 0..q {
        let w = spec.value_at(FElt(b));
        let hit = plus
            .iter()
            .position(|c| c == w)
            .map(|j| (1i8, j))
            .or_else(|| minus.iter().position(|c| c == w).map(|j| (-1i8, j)));
        let (sign, j) = hit.ok_or(Error::NoCandidateMatch { beta: b })?;
        mu[b as usize] = sign;
        g_values[b as usize] = j as u32;
    }
    let g = PFunc::from_values(
        Arc::clone(ctx),
        g_values,
        format!("walsh-exponent({})", f.provenance()),
    )?;
    Ok(BentProfile {
        is_bent: true,
        mu,
        g,
        weakly_regular: false,
        epsilon: None,
        unit: None,
        dual: None,
        regular: false,
    })
}

/// Completes a profile with the weak-regularity verdict, ε, the unit u, the
/// dual f̃, and the regularity flag.
pub fn classify_regularity(mut profile: BentProfile) -> Result<BentProfile> {
    if !profile.is_bent {
        return Err(Error::NotBent);
    }
    let first = profile.mu[0];
    profile.weakly_regular = profile.mu.iter().all(|&s| s == first);
    if !profile.weakly_regular {
        profile.epsilon = None;
        profile.unit = None;
        profile.dual = None;
        profile.regular = false;
        return Ok(profile);
    }
    let ctx = profile.g.ctx();
    let (p, m) = (ctx.p(), ctx.m());
    let eps = i64::from(first);
    let unit = if m % 2 == 0 {
        // Γ = ±p^{m/2} is real: u = ε · sign((p*)^{m/2}).
        if eps * p_star_sign(p, m / 2) == 1 {
            Unit::PlusOne
        } else {
            Unit::MinusOne
        }
    } else if p % 4 == 1 {
        // G = √p: Γ = p^{m/2} exactly.
        if eps == 1 {
            Unit::PlusOne
        } else {
            Unit::MinusOne
        }
    } else {
        // G = i√p: u = ε · (−1)^{(m−1)/2} · i.
        if eps * p_star_sign(p, (m - 1) / 2) == 1 {
            Unit::PlusI
        } else {
            Unit::MinusI
        }
    };
    profile.epsilon = Some(first);
    profile.regular = unit == Unit::PlusOne;
    profile.unit = Some(unit);
    profile.dual = Some(profile.g.clone());
    Ok(profile)
}

/// One checked identity of [`mu_level_sums`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LevelSumCheck {
    /// The nonzero level i of g.
    pub i: u64,
    /// Adjusted μ-mass difference Σ_{D_{g,i}} μ′ − Σ_{D_{g,0}} μ′.
    pub lhs: i64,
    /// The closed form: −p^{m/2} (m even) or ±p^{(m−1)/2} by the quadratic
    /// character of i (m odd).
    pub rhs: i64,
    pub pass: bool,
}

/// Evaluates the exact μ-mass identities across the level sets of g.
///
/// With μ′ = σ·μ, where σ is the sign relating Γ to the principal branch of
/// (p*)^{m/2} (σ = sign((p*)^{⌈m/2⌉})), the differences
/// Σ_{β ∈ D_{g,i}} μ′(β) − Σ_{β ∈ D_{g,0}} μ′(β) equal −p^{m/2} for every
/// i ∈ F_p* when m is even, and ±p^{(m−1)/2} according to whether i is a
/// square mod p when m is odd.
pub fn mu_level_sums(profile: &BentProfile) -> Result<Vec<LevelSumCheck>> {
    if !profile.is_bent {
        return Err(Error::NotBent);
    }
    let ctx = profile.g.ctx();
    let (p, m) = (ctx.p(), ctx.m());
    if p == 2 {
        return Err(Error::EvenCharacteristic);
    }
    let adj = p_star_sign(p, m.div_ceil(2));
    let mut sums = vec![0i64; p as usize];
    for (enc, &gv) in profile.g.values().iter().enumerate() {
        sums[gv as usize] += i64::from(profile.mu[enc]);
    }
    let mag = (p as i64).pow(m / 2);
    let tags = ResidueTags::new(p)?;
    Ok((1..p)
        .map(|i| {
            let lhs = adj * (sums[i as usize] - sums[0]);
            let rhs = if m % 2 == 0 {
                -mag
            } else if tags.is_square(i) {
                mag
            } else {
                -mag
            };
            LevelSumCheck { i, lhs, rhs, pass: lhs == rhs }
        })
        .collect())
}

/// Agreement between the scheme criterion and the regularity classifier.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RegularityAgreement {
    /// Verdict of [`criterion_check`] on the level partition.
    pub scheme_positive: bool,
    pub weakly_regular: bool,
    /// f(−x) = f(x); with weak regularity this is exactly what scheme
    /// positivity requires of a bent function.
    pub even: bool,
    /// scheme_positive == (weakly_regular ∧ even).
    pub agree: bool,
}

/// Cross-checks, for a bent f with f(0) = 0, that the level partition is a
/// symmetric association scheme exactly when f is weakly regular *and*
/// even. (Weak regularity alone does not suffice: Tr(x² + x) on F_9 is
/// regular bent but its level sets are not symmetric.)
pub fn scheme_regularity_agreement(f: &PFunc, spec: &WalshSpectrum) -> Result<RegularityAgreement> {
    let profile = classify_regularity(decompose(spec, f)?)?;
    let report = criterion_check(f, spec)?;
    let even = f.is_even();
    Ok(RegularityAgreement {
        scheme_positive: report.is_scheme,
        weakly_regular: profile.weakly_regular,
        even,
        agree: report.is_scheme == (profile.weakly_regular && even),
    })
}

// ===========================================================================
// tests
// ===========================================================================
