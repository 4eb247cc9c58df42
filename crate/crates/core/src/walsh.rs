//! Exact Walsh–Hadamard spectra W_f(β) = Σ_{x∈F_q} ζ_p^{f(x)−Tr(βx)}.
//!
//! Two engines produce identical `Cyc`-valued spectra: a direct O(q²)
//! reference ([`walsh_naive`]) and an O(q·m·p) multidimensional transform
//! ([`walsh_fast`]). On top of the spectrum sit the exact counting
//! quantities N^f_{i,j}(β) = #{x : f(x) = i, Tr(βx) = j} and the level-set
//! character sums χ_β(D_{f,i}) = Σ_{α∈D_{f,i}} ζ^{Tr(βα)}, each computed
//! both by direct enumeration and by its closed form in the spectrum —
//! any disagreement is surfaced as an error rather than smoothed over.

pub mod cache;

use std::sync::Arc;

use num_bigint::BigInt;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::cyclo::Cyc;
use crate::error::{Error, Result};
use crate::func::PFunc;
use crate::gf::{FElt, FieldCtx};

/// Default ceiling on q for the O(q²) reference transform.
pub const NAIVE_BUDGET: u64 = 1 << 14;

/// Ceiling on q·p scratch cells (one i64 each) for the fast transform.
const FAST_CELL_BUDGET: u64 = 1 << 27;

// ---------------------------------------------------------------------------
// WalshSpectrum
// ---------------------------------------------------------------------------

/// The full spectrum of one function: values[enc(β)] = W_f(β).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalshSpectrum {
    ctx: Arc<FieldCtx>,
    values: Vec<Cyc>,
    f_hash: String,
}

impl WalshSpectrum {
    pub(crate) fn from_parts(ctx: Arc<FieldCtx>, values: Vec<Cyc>, f_hash: String) -> Self {
        assert_eq!(values.len() as u64, ctx.q(), "spectrum length must be q");
        assert!(values.iter().all(|c| c.p() == ctx.p()), "spectrum entries must live in Z[ζ_p]");
        WalshSpectrum { ctx, values, f_hash }
    }

    /// The field the spectrum lives over.
    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    /// All q values in encoding order.
    pub fn values(&self) -> &[Cyc] {
        &self.values
    }

    /// W_f(β).
    pub fn value_at(&self, beta: FElt) -> &Cyc {
        &self.values[beta.0 as usize]
    }

    /// Digest of the source function table (see `PFunc::hash_hex`).
    pub fn f_hash(&self) -> &str {
        &self.f_hash
    }

    /// Σ_β |W_f(β)|² = q², which holds for every genuine spectrum.
    pub fn parseval_check(&self) -> bool {
        let mut total = Cyc::zero(self.ctx.p());
        for w in &self.values {
            total += &w.norm_sq();
        }
        let q = BigInt::from(self.ctx.q());
        total == Cyc::from_int(self.ctx.p(), &q * &q)
    }
}

impl Serialize for WalshSpectrum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("WalshSpectrum", 3)?;
        st.serialize_field("field", &self.ctx.spec_string())?;
        st.serialize_field("f_hash", &self.f_hash)?;
        st.serialize_field("values", &self.values)?;
        st.end()
    }
}

/// V(β) = (W_f(β), W_f(2β), …, W_f((p−1)β)); length 1 when p = 2.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct WalshVector {
    components: Vec<Cyc>,
}

impl WalshVector {
    /// The p−1 components in multiplier order 1, 2, …, p−1.
    pub fn components(&self) -> &[Cyc] {
        &self.components
    }
}

// ---------------------------------------------------------------------------
// Transforms
// ---------------------------------------------------------------------------

/// Reference transform by direct summation, refused above [`NAIVE_BUDGET`].
pub fn walsh_naive(f: &PFunc) -> Result<WalshSpectrum> {
    walsh_naive_with_budget(f, NAIVE_BUDGET)
}

/// Reference transform with an explicit q ceiling.
///
/// Runs on the generator's exponent walk: with β = g^B and x = g^L the
/// inner exponent is f(g^L) − Tr(g^{B+L}), so each of the q−1 rows is a
/// table walk with no field multiplications.
pub fn walsh_naive_with_budget(f: &PFunc, budget: u64) -> Result<WalshSpectrum> {
    let ctx = f.ctx();
    let (p, q) = (ctx.p(), ctx.q());
    if q > budget {
        return Err(Error::BudgetExceeded { what: "naive Walsh transform", size: q, budget });
    }
    let n = (q - 1) as usize;
    let pu = p as usize;
    let g = ctx.generator();
    let mut enc_of_exp = vec![0u32; n];
    let mut tr_of_exp = vec![0u32; n];
    let mut x = FElt::ONE;
    for t in 0..n {
        enc_of_exp[t] = x.0 as u32;
        tr_of_exp[t] = ctx.trace(x) as u32;
        x = ctx.mul(x, g);
    }
    let f_of_exp: Vec<u32> = enc_of_exp.iter().map(|&e| f.values()[e as usize]).collect();
    let f0 = f.values()[0] as usize;

    let mut values = vec![Cyc::zero(p); q as usize];
    let mut counts = vec![0i64; pu];
    for &v in f.values() {
        counts[v as usize] += 1;
    }
    values[0] = Cyc::from_raw_i64(p, &counts);

    let p32 = p as u32;
    for bexp in 0..n {
        counts.fill(0);
        counts[f0] += 1; // the x = 0 term contributes ζ^{f(0)}
        let mut idx = bexp;
        for t in 0..n {
            let mut k = f_of_exp[t] + p32 - tr_of_exp[idx];
            if k >= p32 {
                k -= p32;
            }
            counts[k as usize] += 1;
            idx += 1;
            if idx == n {
                idx = 0;
            }
        }
        values[enc_of_exp[bexp] as usize] = Cyc::from_raw_i64(p, &counts);
    }
    Ok(WalshSpectrum { ctx: Arc::clone(ctx), values, f_hash: f.hash_hex() })
}

/// Fast transform: an m-dimensional p-point Fourier transform over Z[ζ_p].
///
/// Each cell keeps the p raw coefficients of one value as i64 (every
/// intermediate coefficient is bounded by q, far inside i64). Writing
/// Tr(βx) = Σᵢ xᵢcᵢ with x in the polynomial basis and β = Σᵢ cᵢbᵢ* in the
/// trace-dual basis turns the kernel ζ^{−Tr(βx)} into a separable product,
/// one p-point pass per axis; a final permutation puts W_f(β) at β's
/// standard encoding.
pub fn walsh_fast(f: &PFunc) -> Result<WalshSpectrum> {
    let ctx = f.ctx();
    let (p, q) = (ctx.p(), ctx.q());
    if q.saturating_mul(p) > FAST_CELL_BUDGET {
        return Err(Error::FieldTooLarge { q: u128::from(q), cap: FAST_CELL_BUDGET / p });
    }
    let pu = p as usize;
    let mut scratch = vec![0i64; (q * p) as usize];
    for (enc, &v) in f.values().iter().enumerate() {
        scratch[enc * pu + v as usize] = 1;
    }
    dft_axes(&mut scratch, pu, ctx.m() as usize);
    let perm = dual_perm(ctx);
    let mut values = vec![Cyc::zero(p); q as usize];
    for ell in 0..q as usize {
        values[perm[ell] as usize] = Cyc::from_raw_i64(p, &scratch[ell * pu..(ell + 1) * pu]);
    }
    Ok(WalshSpectrum { ctx: Arc::clone(ctx), values, f_hash: f.hash_hex() })
}

/// In-place p-point Fourier pass along each of the m axes.
///
/// Cells are length-p raw coefficient vectors; multiplying by ζ^{−jc} is an
/// index rotation, so one output cell is out_c[ℓ] = Σ_j u_j[(ℓ + jc) mod p].
fn dft_axes(scratch: &mut [i64], p: usize, m: usize) {
    let q = scratch.len() / p;
    let mut line = vec![0i64; p * p];
    let mut stride = 1usize;
    for _axis in 0..m {
        let block = stride * p;
        let mut base = 0usize;
        while base < q {
            for start in base..base + stride {
                for j in 0..p {
                    let cell = (start + j * stride) * p;
                    line[j * p..(j + 1) * p].copy_from_slice(&scratch[cell..cell + p]);
                }
                for c in 0..p {
                    let cell = (start + c * stride) * p;
                    let out = &mut scratch[cell..cell + p];
                    out.fill(0);
                    let mut off = 0usize; // (j·c) mod p
                    for j in 0..p {
                        let row = &line[j * p..(j + 1) * p];
                        let split = p - off;
                        for (l, o) in out.iter_mut().take(split).enumerate() {
                            *o += row[l + off];
                        }
                        for (l, o) in out.iter_mut().enumerate().skip(split) {
                            *o += row[l + off - p];
                        }
                        off += c;
                        if off >= p {
                            off -= p;
                        }
                    }
                }
            }
            base += block;
        }
        stride *= p;
    }
}

/// perm[ℓ] = encoding of Σᵢ cᵢbᵢ* where (c₀, …, c_{m−1}) are ℓ's base-p
/// digits: the map from dual-coordinate order to standard encoding.
fn dual_perm(ctx: &FieldCtx) -> Vec<u32> {
    let duals = ctx.dual_basis();
    let (p, q) = (ctx.p(), ctx.q() as usize);
    let m = ctx.m() as usize;
    let mut perm = vec![0u32; q];
    let mut digits = vec![0u64; m];
    let mut beta = FElt::ZERO;
    for (ell, slot) in perm.iter_mut().enumerate() {
        *slot = beta.0 as u32;
        if ell + 1 == q {
            break;
        }
        // Odometer step: adding bᵢ* per increment is self-correcting on
        // rollover because p·bᵢ* = 0.
        for i in 0..m {
            digits[i] += 1;
            beta = ctx.add(beta, duals[i]);
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
        }
    }
    perm
}

// ---------------------------------------------------------------------------
// Derived quantities
// ---------------------------------------------------------------------------

/// V(β) = (W_f(β), …, W_f((p−1)β)).
///
/// β = 0 is allowed and yields the constant tuple.
pub fn walsh_vector(spec: &WalshSpectrum, beta: FElt) -> WalshVector {
    let ctx = spec.ctx();
    let components = (1..ctx.p())
        .map(|a| spec.value_at(ctx.scalar_mul(a, beta)).clone())
        .collect();
    WalshVector { components }
}

fn check_same_function(spec: &WalshSpectrum, f: &PFunc) -> Result<()> {
    if spec.f_hash != f.hash_hex() {
        return Err(Error::InternalMismatch {
            what: "spectrum does not belong to the supplied function table".to_string(),
        });
    }
    Ok(())
}

/// N^f_{i,j}(β) = #{x ∈ F_q : f(x) = i, Tr(βx) = j}.
///
/// Computed twice — by direct enumeration and by the closed form
/// p²N = −q + p|D_{f,i}| + pΣ_x δ_{j,Tr(βx)} + Σ_{y∈F_p*} σ_y(ζ^{−i} Σ_{z∈F_p*} ζ^{jz} W_f(zβ)),
/// where the δ-sum is q·[j=0] at β = 0 and q/p otherwise — and the two
/// must agree exactly.
pub fn count_level_trace(
    spec: &WalshSpectrum,
    f: &PFunc,
    i: u64,
    j: u64,
    beta: FElt,
) -> Result<u64> {
    let ctx = f.ctx();
    let (p, q) = (ctx.p(), ctx.q());
    assert!(i < p && j < p, "levels must be digits mod p");
    check_same_function(spec, f)?;

    let mut direct = 0u64;
    let mut d_i = 0u64;
    for x in ctx.elements() {
        if f.value(x) == i {
            d_i += 1;
            if ctx.trace(ctx.mul(beta, x)) == j {
                direct += 1;
            }
        }
    }

    let delta_sum = if beta == FElt::ZERO {
        if j == 0 {
            q
        } else {
            0
        }
    } else {
        q / p
    };
    let mut s = Cyc::zero(p);
    for z in 1..p {
        s += &spec.value_at(ctx.scalar_mul(z, beta)).mul_root(j * z % p);
    }
    let t = s.mul_root((p - i) % p);
    let mut galois_sum = Cyc::zero(p);
    for y in 1..p {
        galois_sum += &t.galois(y)?;
    }
    let scalar = BigInt::from(p) * (BigInt::from(d_i) + BigInt::from(delta_sum)) - BigInt::from(q);
    let total = &Cyc::from_int(p, scalar) + &galois_sum;
    let counted = total
        .div_exact(&BigInt::from(p * p))?
        .as_integer()
        .ok_or_else(|| Error::InternalMismatch {
            what: format!("closed form for N_{{{i},{j}}} is not a rational integer"),
        })?;
    if counted != BigInt::from(direct) {
        return Err(Error::InternalMismatch {
            what: format!(
                "N_{{{i},{j}}}(β) closed form gives {counted}, direct count gives {direct}"
            ),
        });
    }
    Ok(direct)
}

/// χ_β(D_{f,i}) = Σ_{α∈D_{f,i}} ζ^{Tr(βα)}.
///
/// Computed by direct summation and by the spectral closed form
/// p²χ = pq·[β=0] + Σ_{j∈F_p} ζ^j Σ_{y∈F_p*} σ_y(ζ^{−i} Σ_{z∈F_p*} ζ^{jz} W_f(zβ));
/// the two must agree and the division by p² must be exact.
pub fn char_sum_level(spec: &WalshSpectrum, f: &PFunc, i: u64, beta: FElt) -> Result<Cyc> {
    let ctx = f.ctx();
    let (p, q) = (ctx.p(), ctx.q());
    assert!(i < p, "level must be a digit mod p");
    check_same_function(spec, f)?;

    let mut counts = vec![0i64; p as usize];
    for x in ctx.elements() {
        if f.value(x) == i {
            counts[ctx.trace(ctx.mul(beta, x)) as usize] += 1;
        }
    }
    let direct = Cyc::from_raw_i64(p, &counts);

    let mut acc = if beta == FElt::ZERO {
        Cyc::from_int(p, BigInt::from(p) * BigInt::from(q))
    } else {
        Cyc::zero(p)
    };
    for j in 0..p {
        let mut s = Cyc::zero(p);
        for z in 1..p {
            s += &spec.value_at(ctx.scalar_mul(z, beta)).mul_root(j * z % p);
        }
        let t = s.mul_root((p - i) % p);
        let mut galois_sum = Cyc::zero(p);
        for y in 1..p {
            galois_sum += &t.galois(y)?;
        }
        acc += &galois_sum.mul_root(j);
    }
    let formula = acc.div_exact(&BigInt::from(p * p))?;
    if formula != direct {
        return Err(Error::InternalMismatch {
            what: format!("χ_β(D_{{f,{i}}}) closed form {formula} ≠ direct sum {direct}"),
        });
    }
    Ok(direct)
}

/// Verifies the inversion identity Σ_x W_f(x) ζ^{Tr(βx)} = q·ζ^{f(β)} at
/// every β; false means the spectrum and the table do not match.
pub fn inverse_check(spec: &WalshSpectrum, f: &PFunc) -> bool {
    if spec.f_hash != f.hash_hex() {
        return false;
    }
    let ctx = f.ctx();
    let (p, q) = (ctx.p(), ctx.q());
    let pu = p as usize;

    // The left side is itself a multidimensional transform of the spectrum:
    // with T(β) = Σ_x W_f(x) ζ^{−Tr(βx)} the identity reads
    // T(β) = q·ζ^{f(−β)}. Reuse the i64 engine when every coefficient is
    // small enough that q-term sums cannot overflow.
    let bound = i64::MAX / (q as i64 + 1);
    let small: Option<Vec<i64>> = (|| {
        let mut scratch = vec![0i64; (q * p) as usize];
        for (enc, w) in spec.values.iter().enumerate() {
            for (k, c) in w.coeffs().iter().enumerate() {
                let v = i64::try_from(c).ok()?;
                if v.checked_abs()? > bound {
                    return None;
                }
                scratch[enc * pu + k + 1] = v; // canonical basis starts at ζ¹
            }
        }
        Some(scratch)
    })();

    match small {
        Some(mut scratch) if q * p <= FAST_CELL_BUDGET => {
            dft_axes(&mut scratch, pu, ctx.m() as usize);
            let perm = dual_perm(ctx);
            (0..q as usize).all(|ell| {
                let beta = FElt(u64::from(perm[ell]));
                let got = Cyc::from_raw_i64(p, &scratch[ell * pu..(ell + 1) * pu]);
                let expect =
                    Cyc::root_power(p, f.value(ctx.neg(beta))).scale(&BigInt::from(q));
                got == expect
            })
        }
        _ => (0..q).all(|b| {
            let beta = FElt(b);
            let mut sum = Cyc::zero(p);
            for x in ctx.elements() {
                sum += &spec.value_at(x).mul_root(ctx.trace(ctx.mul(beta, x)));
            }
            sum == Cyc::root_power(p, f.value(beta)).scale(&BigInt::from(q))
        }),
    }
}

// ===========================================================================
// tests
// ===========================================================================
