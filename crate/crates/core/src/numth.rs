//! Elementary number theory over machine integers.
//!
//! Deterministic primality for all of `u64`, trial-division factorization
//! (budgeted at n ≤ 10¹²), Euler's φ, modular exponentiation/inversion,
//! multiplicative orders, primitive-root tests, square roots mod p, and a
//! quadratic-residue table. Everything here is exact; routines that could
//! silently take superlinear time on large inputs are budgeted instead.

use crate::error::{Error, Result};

/// Largest n accepted by [`factorize`] / [`euler_phi`].
pub const FACTOR_BUDGET: u64 = 1_000_000_000_000;

/// Multiply–reduce in u128 to avoid overflow: a·b mod m.
#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// b^e mod m, with mod_pow(_, 0, m) = 1 % m.
pub fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Greatest common divisor.
pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// Deterministic Miller–Rabin, valid for all `u64`.
///
/// The witness set {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37} is known to
/// be sound for every n < 3.3·10²⁴, which covers `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization as (prime, exponent) pairs in ascending prime order.
///
/// Trial division; refuses n > [`FACTOR_BUDGET`] with `BudgetExceeded` and
/// n = 0 with `InvalidArgument`. factorize(1) = [].
pub fn factorize(mut n: u64) -> Result<Vec<(u64, u32)>> {
    if n == 0 {
        return Err(Error::InvalidArgument {
            reason: "cannot factor 0".into(),
        });
    }
    if n > FACTOR_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "factorize",
            size: n,
            budget: FACTOR_BUDGET,
        });
    }
    let mut out = Vec::new();
    let mut push = |p: u64, n: &mut u64| {
        let mut e = 0u32;
        while *n % p == 0 {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut n);
    let mut d = 3u64;
    while d * d <= n {
        push(d, &mut n);
        d += 2;
    }
    if n > 1 {
        out.push((n, 1));
    }
    Ok(out)
}

/// Euler's totient φ(n); same domain/budget as [`factorize`].
pub fn euler_phi(n: u64) -> Result<u64> {
    let mut phi = n;
    for (p, _) in factorize(n)? {
        phi = phi / p * (p - 1);
    }
    Ok(phi)
}

/// Inverse of a modulo m, via extended Euclid. `NotAUnit` if gcd(a, m) ≠ 1.
pub fn mod_inv(a: u64, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::InvalidArgument {
            reason: "zero modulus".into(),
        });
    }
    if m == 1 {
        return Ok(0);
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return Err(Error::NotAUnit { n: a % m, modulus: m });
    }
    Ok(t0.rem_euclid(m as i128) as u64)
}

/// Multiplicative order of n in (Z/modulus)*.
///
/// Computes φ(modulus), then strips prime factors from the exponent while
/// n^e ≡ 1 still holds. `NotAUnit` if gcd(n, modulus) ≠ 1.
pub fn mult_order(n: u64, modulus: u64) -> Result<u64> {
    if modulus == 0 {
        return Err(Error::InvalidArgument {
            reason: "zero modulus".into(),
        });
    }
    if modulus == 1 {
        return Ok(1);
    }
    let n = n % modulus;
    if gcd(n, modulus) != 1 {
        return Err(Error::NotAUnit { n, modulus });
    }
    let mut e = euler_phi(modulus)?;
    for (p, _) in factorize(e)? {
        while e % p == 0 && mod_pow(n, e / p, modulus) == 1 {
            e /= p;
        }
    }
    debug_assert_eq!(mod_pow(n, e, modulus), 1);
    Ok(e)
}

/// Does g generate (Z/modulus)*? Assumes the group is cyclic (modulus is
/// 1, 2, 4, an odd prime power, or twice one); otherwise always false.
pub fn is_primitive_root(g: u64, modulus: u64) -> Result<bool> {
    Ok(mult_order(g, modulus)? == euler_phi(modulus)?)
}

/// Is p a primitive root modulo both m1 and m2 simultaneously?
pub fn is_common_primitive_root(p: u64, m1: u64, m2: u64) -> Result<bool> {
    Ok(is_primitive_root(p, m1)? && is_primitive_root(p, m2)?)
}

/// Legendre symbol (a/p) ∈ {−1, 0, 1} for odd prime p.
pub fn legendre(a: u64, p: u64) -> Result<i32> {
    if !is_prime(p) {
        return Err(Error::NonPrime(p));
    }
    if p == 2 {
        return Err(Error::EvenCharacteristic);
    }
    let a = a % p;
    if a == 0 {
        return Ok(0);
    }
    Ok(if mod_pow(a, (p - 1) / 2, p) == 1 { 1 } else { -1 })
}

/// Square root of a modulo prime p, if one exists.
///
/// Returns the representative in [0, p/2] (so the answer is unique), with
/// sqrt_mod(0, p) = Some(0). Tonelli–Shanks for p ≡ 1 (mod 4).
pub fn sqrt_mod(a: u64, p: u64) -> Result<Option<u64>> {
    if !is_prime(p) {
        return Err(Error::NonPrime(p));
    }
    let a = a % p;
    if a == 0 {
        return Ok(Some(0));
    }
    if p == 2 {
        return Ok(Some(1));
    }
    if mod_pow(a, (p - 1) / 2, p) != 1 {
        return Ok(None);
    }
    let r = if p % 4 == 3 {
        mod_pow(a, (p + 1) / 4, p)
    } else {
        // Tonelli–Shanks: write p − 1 = q·2^e with q odd.
        let mut q = p - 1;
        let mut e = 0u32;
        while q & 1 == 0 {
            q >>= 1;
            e += 1;
        }
        let mut z = 2u64;
        while mod_pow(z, (p - 1) / 2, p) != p - 1 {
            z += 1;
        }
        let mut m = e;
        let mut c = mod_pow(z, q, p);
        let mut t = mod_pow(a, q, p);
        let mut r = mod_pow(a, (q + 1) / 2, p);
        while t != 1 {
            let mut i = 0u32;
            let mut t2 = t;
            while t2 != 1 {
                t2 = mul_mod(t2, t2, p);
                i += 1;
            }
            let b = mod_pow(c, 1u64 << (m - i - 1), p);
            m = i;
            c = mul_mod(b, b, p);
            t = mul_mod(t, c, p);
            r = mul_mod(r, b, p);
        }
        r
    };
    debug_assert_eq!(mul_mod(r, r, p), a);
    Ok(Some(r.min(p - r)))
}

/// Table of nonzero quadratic residues of F_p.
#[derive(Debug, Clone)]
pub struct ResidueTags {
    p: u64,
    sq: Vec<bool>,
}

impl ResidueTags {
    /// Build the residue table for odd prime p (O(p) time and space).
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        let mut sq = vec![false; p as usize];
        for k in 1..p {
            sq[mul_mod(k, k, p) as usize] = true;
        }
        Ok(ResidueTags { p, sq })
    }

    /// The prime this table was built for.
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Is i (reduced mod p) a nonzero square? `is_square(0)` is false.
    pub fn is_square(&self, i: u64) -> bool {
        self.sq[(i % self.p) as usize]
    }
}
