//! Exact arithmetic in the cyclotomic ring Z[ζ_p], ζ_p = e^{2πi/p}.
//!
//! Elements are stored on the integral basis {ζ, ζ², …, ζ^{p−1}} (the power
//! basis with the relation 1 + ζ + ⋯ + ζ^{p−1} = 0 folded in), so equality
//! of ring elements is equality of coefficient vectors — no normalization
//! ambiguity, no floating point anywhere. Coefficients are arbitrary-
//! precision integers: character sums over fields of order up to 2²⁶ stay
//! exact by construction.
//!
//! The quadratic Gauss sum G(p) = Σ_{x∈F_p} ζ^{x²} satisfies G(p)² = p* where
//! p* = (−1)^{(p−1)/2} p; it is the scale factor of bent spectra in odd
//! dimension and is provided here as a constructor.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numth;

/// An element of Z[ζ_p] on the basis {ζ, …, ζ^{p−1}}.
///
/// `coeffs[i]` is the coefficient of ζ^{i+1}; the vector always has length
/// p − 1. The rational integer n is represented as (−n, …, −n) since
/// 1 = −(ζ + ⋯ + ζ^{p−1}).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cyc {
    p: u64,
    coeffs: Vec<BigInt>,
}

impl Cyc {
    /// The zero element of Z[ζ_p]. p must be prime.
    pub fn zero(p: u64) -> Self {
        debug_assert!(numth::is_prime(p));
        Cyc {
            p,
            coeffs: vec![BigInt::zero(); (p - 1) as usize],
        }
    }

    /// The multiplicative identity.
    pub fn one(p: u64) -> Self {
        Self::from_int(p, 1)
    }

    /// Embed a rational integer: n ↦ (−n, …, −n) on the power basis.
    pub fn from_int(p: u64, n: impl Into<BigInt>) -> Self {
        debug_assert!(numth::is_prime(p));
        let neg = -n.into();
        Cyc {
            p,
            coeffs: vec![neg; (p - 1) as usize],
        }
    }

    /// The root of unity ζ^k (k reduced mod p).
    pub fn root_power(p: u64, k: u64) -> Self {
        let k = k % p;
        if k == 0 {
            return Self::one(p);
        }
        let mut z = Self::zero(p);
        z.coeffs[(k - 1) as usize] = BigInt::from(1);
        z
    }

    /// Build Σ_k raw[k] ζ^k from a length-p coefficient vector on
    /// {1, ζ, …, ζ^{p−1}}, folding in the vanishing relation.
    pub fn from_raw(p: u64, raw: &[BigInt]) -> Self {
        debug_assert!(numth::is_prime(p));
        assert_eq!(raw.len(), p as usize, "raw vector must have length p");
        let coeffs = raw[1..].iter().map(|c| c - &raw[0]).collect();
        Cyc { p, coeffs }
    }

    /// `from_raw` for machine-integer counts (the hot path of the Walsh
    /// transforms).
    pub fn from_raw_i64(p: u64, raw: &[i64]) -> Self {
        debug_assert!(numth::is_prime(p));
        assert_eq!(raw.len(), p as usize, "raw vector must have length p");
        let coeffs = raw[1..].iter().map(|&c| BigInt::from(c - raw[0])).collect();
        Cyc { p, coeffs }
    }

    /// The quadratic Gauss sum G(p) = Σ_{x∈F_p} ζ^{x²}; G(p)² = p*.
    pub fn gauss_sum(p: u64) -> Result<Self> {
        if !numth::is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        let mut raw = vec![BigInt::zero(); p as usize];
        for x in 0..p {
            raw[(x * x % p) as usize] += 1;
        }
        Ok(Self::from_raw(p, &raw))
    }

    /// The prime p of the ambient ring.
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Basis coefficients (of ζ, ζ², …, ζ^{p−1}).
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Is this the zero element?
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// If this element is a rational integer, return it.
    ///
    /// On this basis that means all coefficients are equal (to minus the
    /// integer). 1, ζ, …, ζ^{p−1} are linearly dependent only through the
    /// all-ones relation, so the test is exact.
    pub fn as_integer(&self) -> Option<BigInt> {
        let first = &self.coeffs[0];
        if self.coeffs.iter().all(|c| c == first) {
            Some(-first)
        } else {
            None
        }
    }

    /// If this element is n·ζ^k (n ∈ Z, 0 ≤ k < p), return (n, k),
    /// preferring the k = 0 form when the element is rational.
    pub fn as_integer_times_root(&self) -> Option<(BigInt, u64)> {
        if let Some(n) = self.as_integer() {
            return Some((n, 0));
        }
        let mut hit = None;
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                if hit.is_some() {
                    return None;
                }
                hit = Some((c.clone(), i as u64 + 1));
            }
        }
        hit
    }

    /// Multiply by ζ^k: a pure index rotation, O(p).
    pub fn mul_root(&self, k: u64) -> Self {
        let p = self.p;
        let k = k % p;
        let mut raw = vec![BigInt::zero(); p as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            raw[((i as u64 + 1 + k) % p) as usize] = c.clone();
        }
        Self::from_raw(p, &raw)
    }

    /// The Galois automorphism σ_t: ζ ↦ ζ^t, for t ∤ p.
    pub fn galois(&self, t: u64) -> Result<Self> {
        let p = self.p;
        let t = t % p;
        if t == 0 {
            return Err(Error::NotAUnit { n: 0, modulus: p });
        }
        let mut raw = vec![BigInt::zero(); p as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            raw[((i as u64 + 1) * t % p) as usize] = c.clone();
        }
        Ok(Self::from_raw(p, &raw))
    }

    /// Complex conjugation σ_{p−1}: ζ ↦ ζ^{−1}.
    pub fn conj(&self) -> Self {
        self.galois(self.p - 1).expect("p − 1 is a unit mod p")
    }

    /// |z|² = z·z̄ as a ring element (rational iff the element has constant
    /// absolute value under all complex embeddings, e.g. for n·ζ^k).
    pub fn norm_sq(&self) -> Self {
        self * &self.conj()
    }

    /// Scale by a rational integer.
    pub fn scale(&self, n: &BigInt) -> Self {
        Cyc {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| c * n).collect(),
        }
    }

    /// Divide every coefficient by d, failing if any division is inexact.
    /// Inexactness means the element is not divisible by d in Z[ζ_p] with a
    /// quotient in the same basis — for this crate's callers that is always
    /// an internal defect, never an input property.
    pub fn div_exact(&self, d: &BigInt) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let (q, r) = num_integer::Integer::div_rem(c, d);
            if !r.is_zero() {
                return Err(Error::InternalMismatch {
                    what: format!("inexact division of coefficient {c} by {d}"),
                });
            }
            coeffs.push(q);
        }
        Ok(Cyc { p: self.p, coeffs })
    }

    /// Largest absolute value among basis coefficients (useful for bounds).
    pub fn coeff_linf(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

impl std::ops::Add for &Cyc {
    type Output = Cyc;
    fn add(self, rhs: &Cyc) -> Cyc {
        assert_eq!(self.p, rhs.p, "mixed cyclotomic orders");
        Cyc {
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl std::ops::Sub for &Cyc {
    type Output = Cyc;
    fn sub(self, rhs: &Cyc) -> Cyc {
        assert_eq!(self.p, rhs.p, "mixed cyclotomic orders");
        Cyc {
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl std::ops::Neg for &Cyc {
    type Output = Cyc;
    fn neg(self) -> Cyc {
        Cyc {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl std::ops::Mul for &Cyc {
    type Output = Cyc;
    /// Cyclic convolution of exponents mod p, O(p²) coefficient products.
    fn mul(self, rhs: &Cyc) -> Cyc {
        assert_eq!(self.p, rhs.p, "mixed cyclotomic orders");
        let p = self.p as usize;
        let mut raw = vec![BigInt::zero(); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                raw[(i + j + 2) % p] += a * b;
            }
        }
        Cyc::from_raw(self.p, &raw)
    }
}

impl std::ops::AddAssign<&Cyc> for Cyc {
    fn add_assign(&mut self, rhs: &Cyc) {
        assert_eq!(self.p, rhs.p, "mixed cyclotomic orders");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl std::fmt::Display for Cyc {
    /// Renders as a polynomial in ζ, e.g. `3ζ - ζ^2`, or a bare integer.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if let Some(n) = self.as_integer() {
            return write!(f, "{n}");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = i + 1;
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            if mag != BigInt::from(1) {
                write!(f, "{mag}")?;
            }
            if k == 1 {
                write!(f, "ζ")?;
            } else {
                write!(f, "ζ^{k}")?;
            }
        }
        Ok(())
    }
}

/// JSON shadow: coefficients that fit i64 serialize as numbers, larger ones
/// as decimal strings.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoeffRepr {
    Small(i64),
    Big(String),
}

impl Serialize for Cyc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let coeffs: Vec<CoeffRepr> = self
            .coeffs
            .iter()
            .map(|c| match i64::try_from(c) {
                Ok(v) => CoeffRepr::Small(v),
                Err(_) => CoeffRepr::Big(c.to_string()),
            })
            .collect();
        let mut st = s.serialize_struct("Cyc", 2)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("coeffs", &coeffs)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Cyc {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Shadow {
            p: u64,
            coeffs: Vec<CoeffRepr>,
        }
        let shadow = Shadow::deserialize(d)?;
        if !numth::is_prime(shadow.p) {
            return Err(serde::de::Error::custom(format!("{} is not prime", shadow.p)));
        }
        if shadow.coeffs.len() as u64 != shadow.p - 1 {
            return Err(serde::de::Error::custom("coefficient vector must have length p - 1"));
        }
        let coeffs = shadow
            .coeffs
            .into_iter()
            .map(|c| match c {
                CoeffRepr::Small(v) => Ok(BigInt::from(v)),
                CoeffRepr::Big(s) => s
                    .parse::<BigInt>()
                    .map_err(|e| serde::de::Error::custom(format!("bad coefficient: {e}"))),
            })
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        Ok(Cyc { p: shadow.p, coeffs })
    }
}
