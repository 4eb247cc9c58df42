//! Finite fields F_q, q = p^m, with exact machine-integer encodings.
//!
//! An element Σ cᵢ·xⁱ (cᵢ ∈ F_p, x the residue class of the modulus
//! variable) is encoded as the base-p integer Σ cᵢ·pⁱ, so encodings
//! 0, 1, …, q−1 enumerate the field and scalars encode as themselves.
//!
//! The default modulus for degree m is the first monic irreducible
//! polynomial in ascending encoding order of its lower coefficients
//! (F_9 → x² + 1, F_27 → x³ + 2x + 1, F_16 → x⁴ + x + 1, …), and the
//! distinguished generator is the primitive element with the least
//! encoding. Both choices are deterministic so that element encodings are
//! stable across runs and machines.
//!
//! Fields up to order 2²⁶ are supported; discrete-log tables are built
//! eagerly for q ≤ 2²⁰ and multiplication falls back to polynomial
//! arithmetic above that.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numth;

/// Hard cap on field order.
pub const FIELD_CAP: u64 = 1 << 26;

/// Largest q for which eager log/exp tables are built.
pub const LOG_TABLE_BUDGET: u64 = 1 << 20;

/// A field element, stored as its base-p digit encoding in 0..q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FElt(pub u64);

impl FElt {
    /// The additive identity.
    pub const ZERO: FElt = FElt(0);
    /// The multiplicative identity.
    pub const ONE: FElt = FElt(1);
}

/// An immutable field context: modulus, generator, trace data and
/// (for small fields) discrete-log tables.
#[derive(Debug)]
pub struct FieldCtx {
    p: u64,
    m: u32,
    q: u64,
    /// Monic modulus, ascending coefficients [c₀, …, c_{m−1}, 1].
    modulus: Vec<u64>,
    generator: FElt,
    /// Tr(xⁱ) for i = 0..m; traces of arbitrary elements follow by linearity.
    tr_basis: Vec<u64>,
    /// exp[k] = gᵏ for k in 0..q−1 (present iff q ≤ LOG_TABLE_BUDGET).
    exp: Option<Vec<u32>>,
    /// log[e] = discrete log of e base g; log[0] is a sentinel.
    log: Option<Vec<u32>>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}
impl Eq for FieldCtx {}

// ---------------------------------------------------------------------------
// Polynomial arithmetic over F_p (ascending coefficient vectors)
// ---------------------------------------------------------------------------

fn poly_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// a·b reduced modulo the monic polynomial f (deg f = f.len() − 1 ≥ 1).
fn poly_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let m = f.len() - 1;
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut v = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            v[i + j] = (v[i + j] + ai * bj) % p;
        }
    }
    for i in (m..v.len()).rev() {
        let c = v[i];
        if c == 0 {
            continue;
        }
        v[i] = 0;
        for j in 0..m {
            // x^m ≡ −(c₀ + ⋯ + c_{m−1} x^{m−1})
            v[i - m + j] = (v[i - m + j] + c * (p - f[j] % p) % p) % p;
        }
    }
    v.truncate(m);
    poly_trim(&mut v);
    v
}

/// a^e mod f.
fn poly_powmod(a: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut base = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &base, f, p);
        }
        base = poly_mulmod(&base, &base, f, p);
        e >>= 1;
    }
    acc
}

/// Remainder of a modulo b (b nonzero), coefficients in F_p.
fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let mut b = b.to_vec();
    poly_trim(&mut b);
    let db = b.len() - 1;
    let lead_inv = numth::mod_inv(b[db], p).expect("leading coefficient is a unit");
    while r.len() > db {
        let c = r[r.len() - 1] * lead_inv % p;
        let shift = r.len() - 1 - db;
        if c != 0 {
            for j in 0..=db {
                r[shift + j] = (r[shift + j] + c * (p - b[j]) % p) % p;
            }
        }
        r.pop();
        poly_trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Rabin's irreducibility test for a monic polynomial of degree ≥ 1 over F_p:
/// f is irreducible iff x^{p^m} ≡ x (mod f) and gcd(x^{p^{m/r}} − x, f) = 1
/// for every prime divisor r of m.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let m = (f.len() - 1) as u32;
    if m == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    // frob[k] = x^{p^k} mod f, built by iterated p-th powering.
    let mut frob = x.clone();
    let frob_at = |k: u32, frob: &mut Vec<u64>, cur: &mut u32| {
        while *cur < k {
            *frob = poly_powmod(frob, p, f, p);
            *cur += 1;
        }
        frob.clone()
    };
    let mut cur = 0u32;
    let divisors: Vec<u32> = numth::factorize(m as u64)
        .expect("m is tiny")
        .into_iter()
        .map(|(r, _)| r as u32)
        .collect();
    let mut checkpoints: Vec<u32> = divisors.iter().map(|&r| m / r).collect();
    checkpoints.sort_unstable();
    for k in checkpoints {
        let h = frob_at(k, &mut frob, &mut cur);
        // gcd(f, h − x) must be constant.
        let mut diff = h;
        if diff.len() < 2 {
            diff.resize(2, 0);
        }
        diff[1] = (diff[1] + p - 1) % p;
        poly_trim(&mut diff);
        let g = poly_gcd(f, &diff, p);
        if g.len() != 1 {
            return false;
        }
    }
    let h = frob_at(m, &mut frob, &mut cur);
    h == x
}

// ---------------------------------------------------------------------------
// Field context
// ---------------------------------------------------------------------------

impl FieldCtx {
    /// Build F_{p^m} with the given monic modulus (ascending coefficients,
    /// length m + 1) or, if `None`, the canonical default modulus.
    pub fn new(p: u64, m: u32, modulus: Option<Vec<u64>>) -> Result<Self> {
        if !numth::is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if m == 0 {
            return Err(Error::InvalidArgument {
                reason: "extension degree must be at least 1".into(),
            });
        }
        let mut q128: u128 = 1;
        for _ in 0..m {
            q128 *= p as u128;
            if q128 > FIELD_CAP as u128 {
                return Err(Error::FieldTooLarge {
                    q: q128,
                    cap: FIELD_CAP,
                });
            }
        }
        let q = q128 as u64;

        let modulus = match modulus {
            Some(f) => {
                if f.len() != m as usize + 1 {
                    return Err(Error::InvalidModulus {
                        reason: format!("expected {} coefficients, got {}", m + 1, f.len()),
                    });
                }
                if f[m as usize] != 1 {
                    return Err(Error::InvalidModulus {
                        reason: "modulus must be monic".into(),
                    });
                }
                if let Some(&c) = f.iter().find(|&&c| c >= p) {
                    return Err(Error::InvalidModulus {
                        reason: format!("coefficient {c} is not reduced mod {p}"),
                    });
                }
                if !is_irreducible(&f, p) {
                    return Err(Error::ReducibleModulus { p });
                }
                f
            }
            None => Self::default_modulus(p, m, q),
        };

        let mut ctx = FieldCtx {
            p,
            m,
            q,
            modulus,
            generator: FElt(0),
            tr_basis: Vec::new(),
            exp: None,
            log: None,
        };
        ctx.generator = ctx.find_generator()?;
        if q <= LOG_TABLE_BUDGET {
            ctx.build_tables();
        }
        ctx.tr_basis = ctx.build_tr_basis();
        Ok(ctx)
    }

    /// First monic irreducible of degree m by ascending encoding of the
    /// lower coefficients.
    fn default_modulus(p: u64, m: u32, q: u64) -> Vec<u64> {
        if m == 1 {
            return vec![0, 1]; // the polynomial x
        }
        for low in 0..q {
            let mut f = Vec::with_capacity(m as usize + 1);
            let mut v = low;
            for _ in 0..m {
                f.push(v % p);
                v /= p;
            }
            f.push(1);
            if is_irreducible(&f, p) {
                return f;
            }
        }
        unreachable!("irreducible polynomials of every degree exist over F_p")
    }

    /// Least-encoded primitive element.
    fn find_generator(&self) -> Result<FElt> {
        if self.q == 2 {
            return Ok(FElt(1));
        }
        let prime_divs: Vec<u64> = numth::factorize(self.q - 1)?
            .into_iter()
            .map(|(r, _)| r)
            .collect();
        'cand: for enc in 2..self.q {
            let g = FElt(enc);
            for &r in &prime_divs {
                if self.pow_nocache(g, (self.q - 1) / r) == FElt::ONE {
                    continue 'cand;
                }
            }
            return Ok(g);
        }
        Err(Error::InternalMismatch {
            what: "no primitive element found (multiplicative group is cyclic)".into(),
        })
    }

    fn build_tables(&mut self) {
        let n = (self.q - 1) as usize;
        let mut exp = Vec::with_capacity(n);
        let mut log = vec![u32::MAX; self.q as usize];
        let mut cur = FElt::ONE;
        for k in 0..n {
            exp.push(cur.0 as u32);
            log[cur.0 as usize] = k as u32;
            cur = self.mul_poly(cur, self.generator);
        }
        debug_assert_eq!(self.mul_poly(cur, FElt::ONE), FElt::ONE);
        self.exp = Some(exp);
        self.log = Some(log);
    }

    fn build_tr_basis(&self) -> Vec<u64> {
        (0..self.m)
            .map(|i| {
                let b = FElt(self.p.pow(i));
                let mut acc = b;
                let mut t = b;
                for _ in 1..self.m {
                    t = self.pow_nocache(t, self.p);
                    acc = self.add(acc, t);
                }
                debug_assert!(acc.0 < self.p, "trace must be a scalar");
                acc.0
            })
            .collect()
    }

    // -- accessors ----------------------------------------------------------

    /// The characteristic p.
    pub fn p(&self) -> u64 {
        self.p
    }

    /// The extension degree m.
    pub fn m(&self) -> u32 {
        self.m
    }

    /// The field order q = p^m.
    pub fn q(&self) -> u64 {
        self.q
    }

    /// The modulus, ascending coefficients [c₀, …, 1].
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// The distinguished (least-encoded) primitive element.
    pub fn generator(&self) -> FElt {
        self.generator
    }

    /// All q elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = FElt> {
        (0..self.q).map(FElt)
    }

    /// Canonical spec string, e.g. `3^3/[2,2,0,1]`.
    pub fn spec_string(&self) -> String {
        let coeffs: Vec<String> = self.modulus.iter().map(|c| c.to_string()).collect();
        format!("{}^{}/[{}]", self.p, self.m, coeffs.join(","))
    }

    // -- element codec ------------------------------------------------------

    /// Base-p digits (length m) of an element.
    pub fn coords(&self, e: FElt) -> Vec<u64> {
        let mut v = e.0;
        (0..self.m)
            .map(|_| {
                let d = v % self.p;
                v /= self.p;
                d
            })
            .collect()
    }

    /// Reassemble an element from base-p digits (length ≤ m, each < p).
    pub fn from_coords(&self, digits: &[u64]) -> FElt {
        assert!(digits.len() <= self.m as usize);
        let mut enc = 0u64;
        for &d in digits.iter().rev() {
            debug_assert!(d < self.p);
            enc = enc * self.p + d;
        }
        FElt(enc)
    }

    // -- arithmetic ---------------------------------------------------------

    /// a + b (digit-wise mod p).
    pub fn add(&self, a: FElt, b: FElt) -> FElt {
        let (mut a, mut b) = (a.0, b.0);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.m {
            out += (a % self.p + b % self.p) % self.p * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        FElt(out)
    }

    /// −a.
    pub fn neg(&self, a: FElt) -> FElt {
        let mut a = a.0;
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.m {
            out += (self.p - a % self.p) % self.p * place;
            a /= self.p;
            place *= self.p;
        }
        FElt(out)
    }

    /// a − b.
    pub fn sub(&self, a: FElt, b: FElt) -> FElt {
        self.add(a, self.neg(b))
    }

    /// c·a for a prime-field scalar c.
    pub fn scalar_mul(&self, c: u64, a: FElt) -> FElt {
        let c = c % self.p;
        let mut a = a.0;
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.m {
            out += a % self.p * c % self.p * place;
            a /= self.p;
            place *= self.p;
        }
        FElt(out)
    }

    fn mul_poly(&self, a: FElt, b: FElt) -> FElt {
        let pa = self.coords(a);
        let pb = self.coords(b);
        let prod = poly_mulmod(&pa, &pb, &self.modulus, self.p);
        self.from_coords(&prod)
    }

    /// a·b.
    pub fn mul(&self, a: FElt, b: FElt) -> FElt {
        if a.0 == 0 || b.0 == 0 {
            return FElt::ZERO;
        }
        match (&self.exp, &self.log) {
            (Some(exp), Some(log)) => {
                let s = (log[a.0 as usize] as u64 + log[b.0 as usize] as u64) % (self.q - 1);
                FElt(exp[s as usize] as u64)
            }
            _ => self.mul_poly(a, b),
        }
    }

    fn pow_nocache(&self, a: FElt, mut e: u64) -> FElt {
        if a.0 == 0 {
            return if e == 0 { FElt::ONE } else { FElt::ZERO };
        }
        let mut acc = FElt::ONE;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_poly(acc, base);
            }
            base = self.mul_poly(base, base);
            e >>= 1;
        }
        acc
    }

    /// a^e (with a⁰ = 1, including 0⁰ = 1).
    pub fn pow(&self, a: FElt, e: u64) -> FElt {
        if a.0 == 0 {
            return if e == 0 { FElt::ONE } else { FElt::ZERO };
        }
        match (&self.exp, &self.log) {
            (Some(exp), Some(log)) => {
                let l = log[a.0 as usize] as u64;
                FElt(exp[(l * (e % (self.q - 1)) % (self.q - 1)) as usize] as u64)
            }
            _ => self.pow_nocache(a, e),
        }
    }

    /// a⁻¹; `DivisionByZero` for a = 0.
    pub fn inv(&self, a: FElt) -> Result<FElt> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(match (&self.exp, &self.log) {
            (Some(exp), Some(log)) => {
                let l = log[a.0 as usize] as u64;
                FElt(exp[((self.q - 1 - l) % (self.q - 1)) as usize] as u64)
            }
            _ => self.pow_nocache(a, self.q - 2),
        })
    }

    /// Discrete log base the distinguished generator (tables required).
    /// Returns None for 0 or when tables are absent (q > 2²⁰).
    pub fn discrete_log(&self, a: FElt) -> Option<u64> {
        if a.0 == 0 {
            return None;
        }
        self.log.as_ref().map(|log| log[a.0 as usize] as u64)
    }

    /// The absolute trace Tr(a) = a + a^p + ⋯ + a^{p^{m−1}} ∈ F_p,
    /// evaluated by linearity from the cached basis traces. O(m).
    pub fn trace(&self, a: FElt) -> u64 {
        let mut v = a.0;
        let mut acc = 0u64;
        for i in 0..self.m as usize {
            acc += v % self.p * self.tr_basis[i];
            v /= self.p;
        }
        acc % self.p
    }

    /// The Frobenius a ↦ a^p.
    pub fn frobenius(&self, a: FElt) -> FElt {
        self.pow(a, self.p)
    }

    /// The basis dual to {1, x, …, x^{m−1}} under the trace form:
    /// Tr(dual[i]·xʲ) = δᵢⱼ. Computed by inverting the Gram matrix
    /// Gᵢⱼ = Tr(x^{i+j}) over F_p.
    pub fn dual_basis(&self) -> Vec<FElt> {
        let m = self.m as usize;
        // Powers x⁰, …, x^{2m−2}.
        let mut xs = Vec::with_capacity(2 * m - 1);
        xs.push(FElt::ONE);
        for k in 1..=2 * m - 2 {
            let prev = xs[k - 1];
            xs.push(self.mul(prev, FElt(self.p)));
        }
        // Augmented [G | I] elimination over F_p.
        let mut a = vec![vec![0u64; 2 * m]; m];
        for i in 0..m {
            for j in 0..m {
                a[i][j] = self.trace(xs[i + j]);
            }
            a[i][m + i] = 1;
        }
        for col in 0..m {
            let piv = (col..m)
                .find(|&r| a[r][col] != 0)
                .expect("trace form is nondegenerate");
            a.swap(col, piv);
            let inv = numth::mod_inv(a[col][col], self.p).expect("pivot is a unit");
            for x in a[col].iter_mut() {
                *x = *x * inv % self.p;
            }
            for r in 0..m {
                if r == col || a[r][col] == 0 {
                    continue;
                }
                let f = a[r][col];
                for c in 0..2 * m {
                    let sub = a[col][c] * f % self.p;
                    a[r][c] = (a[r][c] + self.p - sub) % self.p;
                }
            }
        }
        (0..m)
            .map(|i| {
                let digits: Vec<u64> = (0..m).map(|j| a[i][m + j]).collect();
                self.from_coords(&digits)
            })
            .collect()
    }

    // -- spec strings -------------------------------------------------------

    /// Parse `p`, `p^m`, or `p^m/[c0,c1,…,cm]` and build the field.
    pub fn from_spec(s: &str) -> Result<FieldCtx> {
        let (p, m, modulus) = parse_spec(s)?;
        FieldCtx::new(p, m, modulus)
    }
}

/// Parse a field spec string into (p, m, optional modulus coefficients).
pub fn parse_spec(s: &str) -> Result<(u64, u32, Option<Vec<u64>>)> {
    let bytes = s.as_bytes();
    let mut pos = 0usize;

    let err = |pos: usize, msg: &str| Error::SyntaxError {
        pos,
        msg: msg.into(),
    };
    let parse_u64 = |pos: &mut usize| -> Result<u64> {
        let start = *pos;
        let mut v: u64 = 0;
        let mut any = false;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            v = v
                .checked_mul(10)
                .and_then(|v| v.checked_add((bytes[*pos] - b'0') as u64))
                .ok_or_else(|| err(start, "integer literal overflows u64"))?;
            *pos += 1;
            any = true;
        }
        if !any {
            return Err(err(*pos, "expected an integer"));
        }
        Ok(v)
    };

    let p = parse_u64(&mut pos)?;
    let mut m = 1u32;
    if pos < bytes.len() && bytes[pos] == b'^' {
        pos += 1;
        let mv = parse_u64(&mut pos)?;
        m = u32::try_from(mv).map_err(|_| err(pos, "exponent too large"))?;
    }
    let mut modulus = None;
    if pos < bytes.len() && bytes[pos] == b'/' {
        pos += 1;
        if pos >= bytes.len() || bytes[pos] != b'[' {
            return Err(err(pos, "expected '[' to open the modulus"));
        }
        pos += 1;
        let mut coeffs = Vec::new();
        loop {
            coeffs.push(parse_u64(&mut pos)?);
            if pos < bytes.len() && bytes[pos] == b',' {
                pos += 1;
                continue;
            }
            break;
        }
        if pos >= bytes.len() || bytes[pos] != b']' {
            return Err(err(pos, "expected ',' or ']' in the modulus"));
        }
        pos += 1;
        modulus = Some(coeffs);
    }
    if pos != bytes.len() {
        return Err(err(pos, "trailing characters after field spec"));
    }
    Ok((p, m, modulus))
}
