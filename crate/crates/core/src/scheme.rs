//! Level-set partitions of F_q, their Fourier duals, and association-scheme
//! verdicts.
//!
//! Three independent routes decide whether the punctured level sets
//! {0} ∪ {D*_{f,i}} of a function with f(0) = 0 carry a symmetric
//! association scheme under translation:
//!
//! 1. [`criterion_check`] — spectral: compare |f(F_q*)| with the number of
//!    distinct vectors V(β) = (W_f(β), …, W_f((p−1)β)) over β ≠ 0, and
//!    require the blocks to be symmetric (−D*_i = D*_i, i.e. f even).
//!    The symmetry conjunct is not optional: f = Tr(x) on F_27 has
//!    matching sizes and yields a *commutative* translation scheme whose
//!    classes are not symmetric.
//! 2. [`reflexivity_check`] — Fourier: |P| = |P̂| for the dual partition
//!    grouping β by the fingerprint (χ_β(P_0), …, χ_β(P_d)).
//! 3. [`verify_scheme_bruteforce`] — definitional: block symmetry plus
//!    constancy of the additive convolution counts
//!    p^k_{ij} = #{(a,b) ∈ P_i×P_j : a+b = δ} over δ ∈ P_k.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::cyclo::Cyc;
use crate::error::{Error, Result};
use crate::func::PFunc;
use crate::gf::{FElt, FieldCtx};
use crate::walsh::{walsh_vector, WalshSpectrum};

/// Largest q for which the definitional verifier will run.
pub const BRUTEFORCE_CAP: u64 = 4096;

// ---------------------------------------------------------------------------
// Partitions
// ---------------------------------------------------------------------------

/// Tag attached to one block of a partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BlockLabel {
    /// The singleton {0} (the deleted diagonal class).
    Origin,
    /// A punctured level set D*_{f,i}.
    Level(u64),
    /// A block identified only by position (e.g. in a dual partition).
    Index(u64),
}

impl fmt::Display for BlockLabel {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockLabel::Origin => write!(out, "diag-origin"),
            BlockLabel::Level(i) => write!(out, "level-{i}"),
            BlockLabel::Index(i) => write!(out, "dual-{i}"),
        }
    }
}

impl Serialize for BlockLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A partition of F_q into labeled, disjoint, nonempty blocks.
#[derive(Clone, Debug)]
pub struct Partition {
    ctx: Arc<FieldCtx>,
    blocks: Vec<Vec<FElt>>,
    labels: Vec<BlockLabel>,
    /// block index by element encoding
    index: Vec<u32>,
}

impl Partition {
    /// Builds a partition after checking the blocks are disjoint, nonempty,
    /// and cover F_q.
    pub fn from_blocks(
        ctx: Arc<FieldCtx>,
        blocks: Vec<Vec<FElt>>,
        labels: Vec<BlockLabel>,
    ) -> Result<Partition> {
        if blocks.len() != labels.len() {
            return Err(Error::InvalidArgument {
                reason: "one label per block required".to_string(),
            });
        }
        let q = ctx.q() as usize;
        let mut index = vec![u32::MAX; q];
        for (b, blk) in blocks.iter().enumerate() {
            if blk.is_empty() {
                return Err(Error::InvalidArgument {
                    reason: format!("block {} is empty", labels[b]),
                });
            }
            for &e in blk {
                let slot = index.get_mut(e.0 as usize).ok_or(Error::InvalidArgument {
                    reason: format!("element {} outside the field", e.0),
                })?;
                if *slot != u32::MAX {
                    return Err(Error::InvalidArgument {
                        reason: format!("element {} appears in two blocks", e.0),
                    });
                }
                *slot = b as u32;
            }
        }
        if index.iter().any(|&s| s == u32::MAX) {
            return Err(Error::InvalidArgument {
                reason: "blocks do not cover the field".to_string(),
            });
        }
        Ok(Partition { ctx, blocks, labels, index })
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn blocks(&self) -> &[Vec<FElt>] {
        &self.blocks
    }

    pub fn labels(&self) -> &[BlockLabel] {
        &self.labels
    }

    /// Index of the block containing x.
    pub fn block_of(&self, x: FElt) -> usize {
        self.index[x.0 as usize] as usize
    }

    /// Number of blocks, the diagonal {0} included.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct BlockOut<'a> {
            label: &'a BlockLabel,
            elements: Vec<u64>,
        }
        let mut st = s.serialize_struct("Partition", 2)?;
        st.serialize_field("field", &self.ctx.spec_string())?;
        let blocks: Vec<BlockOut> = self
            .blocks
            .iter()
            .zip(&self.labels)
            .map(|(blk, label)| BlockOut { label, elements: blk.iter().map(|e| e.0).collect() })
            .collect();
        st.serialize_field("blocks", &blocks)?;
        st.end()
    }
}

/// The level partition {0} ∪ {D*_{f,i} : i ∈ f(F_q*)}; empty levels are
/// absent. Requires f(0) = 0.
pub fn level_partition(f: &PFunc) -> Result<Partition> {
    if f.values()[0] != 0 {
        return Err(Error::NonzeroAtOrigin { value: u64::from(f.values()[0]) });
    }
    let ctx = f.ctx();
    let mut blocks = vec![vec![FElt::ZERO]];
    let mut labels = vec![BlockLabel::Origin];
    for i in f.image_star() {
        blocks.push(f.level_set_star(i));
        labels.push(BlockLabel::Level(i));
    }
    Partition::from_blocks(Arc::clone(ctx), blocks, labels)
}

// ---------------------------------------------------------------------------
// Dual partition
// ---------------------------------------------------------------------------

/// The Fourier dual: β ∼ β′ iff χ_β(P_i) = χ_{β′}(P_i) for every block.
#[derive(Clone, Debug)]
pub struct DualPartition {
    ctx: Arc<FieldCtx>,
    blocks: Vec<Vec<FElt>>,
    fingerprints: Vec<Vec<Cyc>>,
}

impl DualPartition {
    pub fn blocks(&self) -> &[Vec<FElt>] {
        &self.blocks
    }

    /// fingerprints[b][i] = χ_β(P_i) for any β in block b.
    pub fn fingerprints(&self) -> &[Vec<Cyc>] {
        &self.fingerprints
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Reinterprets the dual as a partition (blocks labeled by position),
    /// e.g. to take the dual of the dual.
    pub fn to_partition(&self) -> Partition {
        let labels = (0..self.blocks.len() as u64).map(BlockLabel::Index).collect();
        Partition::from_blocks(Arc::clone(&self.ctx), self.blocks.clone(), labels)
            .expect("a dual partition is always a valid partition")
    }
}

impl Serialize for DualPartition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("DualPartition", 3)?;
        st.serialize_field("field", &self.ctx.spec_string())?;
        let blocks: Vec<Vec<u64>> =
            self.blocks.iter().map(|blk| blk.iter().map(|e| e.0).collect()).collect();
        st.serialize_field("blocks", &blocks)?;
        st.serialize_field("fingerprints", &self.fingerprints)?;
        st.end()
    }
}

/// Groups every β ∈ F_q by its exact fingerprint (χ_β(P_0), …, χ_β(P_d));
/// blocks are ordered by least element encoding.
pub fn dual_partition(part: &Partition) -> DualPartition {
    let ctx = part.ctx();
    let p = ctx.p();
    let mut groups: BTreeMap<Vec<Cyc>, Vec<FElt>> = BTreeMap::new();
    let mut counts = vec![0i64; p as usize];
    for b in 0..ctx.q() {
        let beta = FElt(b);
        let fp: Vec<Cyc> = part
            .blocks()
            .iter()
            .map(|blk| {
                counts.fill(0);
                for &a in blk {
                    counts[ctx.trace(ctx.mul(beta, a)) as usize] += 1;
                }
                Cyc::from_raw_i64(p, &counts)
            })
            .collect();
        groups.entry(fp).or_default().push(beta);
    }
    let mut pairs: Vec<(Vec<Cyc>, Vec<FElt>)> = groups.into_iter().collect();
    pairs.sort_by_key(|(_, blk)| blk[0].0);
    let (fingerprints, blocks) = pairs.into_iter().map(|(fp, blk)| (fp, blk)).unzip();
    DualPartition { ctx: Arc::clone(ctx), blocks, fingerprints }
}

/// |P| = |P̂| — Fourier reflexivity of the partition.
pub fn reflexivity_check(part: &Partition) -> bool {
    part.len() == dual_partition(part).len()
}

// ---------------------------------------------------------------------------
// Scheme reports
// ---------------------------------------------------------------------------

/// Sizes compared by the spectral criterion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionDetail {
    /// |I| = |f(F_q*)|.
    pub image_size: u64,
    /// Number of distinct V(β) over β ∈ F_q* (distinct W_f(β) when the
    /// scalar route applies).
    pub vset_size: u64,
    /// Whether the single-value shortcut for F_p*-invariant f was used.
    pub scalar_route: bool,
}

/// First defect found by the definitional verifier.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SchemeViolation {
    /// Block `label` is not closed under negation; `witness` is the least
    /// element whose negative lands in a different block.
    Asymmetry { label: BlockLabel, witness: u64 },
    /// The convolution count for (P_i, P_j) is not constant on the block
    /// containing `delta` (its least element) — `delta_prime` disagrees.
    NonConstant {
        i: BlockLabel,
        j: BlockLabel,
        delta: u64,
        delta_prime: u64,
        count_delta: u64,
        count_delta_prime: u64,
    },
}

/// Verdict of one of the scheme checks.
#[derive(Clone, Debug, Serialize)]
pub struct SchemeReport {
    /// Number of non-diagonal classes (d in "d-class").
    pub class_count: u64,
    /// Whether the partition carries a symmetric association scheme.
    pub is_scheme: bool,
    /// Sizes compared by the spectral criterion (criterion route only).
    pub criterion: Option<CriterionDetail>,
    /// Whether every block satisfies −P_i = P_i (when checked).
    pub symmetry_ok: Option<bool>,
    /// intersection_numbers[k][i][j] = p^k_{ij}, indexed like
    /// `block_labels`, present when the convolution counts were constant.
    pub intersection_numbers: Option<Vec<Vec<Vec<u64>>>>,
    /// First defect found, if any.
    pub violation: Option<SchemeViolation>,
    /// Labels indexing the intersection tensor (diagonal class first).
    pub block_labels: Vec<BlockLabel>,
}

/// Spectral scheme criterion.
///
/// is_scheme ⟺ |f(F_q*)| equals the number of distinct Walsh vectors over
/// β ∈ F_q* *and* the level sets are symmetric (f even). For
/// F_p*-invariant f the vector collapses to the single value W_f(β), and
/// symmetry is automatic (−1 ∈ F_p*); for p = 2 symmetry is vacuous.
pub fn criterion_check(f: &PFunc, spec: &WalshSpectrum) -> Result<SchemeReport> {
    if f.values()[0] != 0 {
        return Err(Error::NonzeroAtOrigin { value: u64::from(f.values()[0]) });
    }
    if spec.f_hash() != f.hash_hex() {
        return Err(Error::InternalMismatch {
            what: "spectrum does not belong to the supplied function table".to_string(),
        });
    }
    let ctx = f.ctx();
    let image = f.image_star();
    let scalar_route = f.is_fp_star_invariant();
    let vset_size = if scalar_route {
        let distinct: std::collections::BTreeSet<&Cyc> =
            (1..ctx.q()).map(|b| spec.value_at(FElt(b))).collect();
        distinct.len() as u64
    } else {
        let distinct: std::collections::BTreeSet<_> =
            (1..ctx.q()).map(|b| walsh_vector(spec, FElt(b))).collect();
        distinct.len() as u64
    };
    let image_size = image.len() as u64;
    let symmetric = f.is_even();
    let mut labels = vec![BlockLabel::Origin];
    labels.extend(image.iter().map(|&i| BlockLabel::Level(i)));
    Ok(SchemeReport {
        class_count: image_size,
        is_scheme: image_size == vset_size && symmetric,
        criterion: Some(CriterionDetail { image_size, vset_size, scalar_route }),
        symmetry_ok: Some(symmetric),
        intersection_numbers: None,
        violation: None,
        block_labels: labels,
    })
}

/// Definitional verifier over the translation relations
/// (u,v) ∈ R_k ⟺ u − v ∈ P_k.
///
/// Checks block symmetry and constancy of
/// p^k_{ij} = #{(a,b) ∈ P_i × P_j : a + b = δ} over δ ∈ P_k, filling the
/// full intersection tensor when the counts are constant. Scheme failures
/// are reported in the result, not raised; the partition itself must be
/// scheme-shaped ({0} a block) and q must stay under [`BRUTEFORCE_CAP`].
pub fn verify_scheme_bruteforce(part: &Partition) -> Result<SchemeReport> {
    let ctx = part.ctx();
    let q = ctx.q();
    if q > BRUTEFORCE_CAP {
        return Err(Error::BudgetExceeded {
            what: "brute-force scheme verification",
            size: q,
            budget: BRUTEFORCE_CAP,
        });
    }
    if !part.blocks().iter().any(|blk| blk.len() == 1 && blk[0] == FElt::ZERO) {
        return Err(Error::InvalidArgument {
            reason: "partition has no singleton {0} block".to_string(),
        });
    }
    let d = part.len();

    // (a) symmetry: −P_i = P_i for every block.
    let mut symmetry_ok = true;
    let mut violation = None;
    'sym: for (b, blk) in part.blocks().iter().enumerate() {
        for &x in blk {
            if part.block_of(ctx.neg(x)) != b {
                symmetry_ok = false;
                violation = Some(SchemeViolation::Asymmetry {
                    label: part.labels()[b],
                    witness: x.0,
                });
                break 'sym;
            }
        }
    }

    // (b) constancy of the convolution counts on every block.
    let mut constant = true;
    let mut tensor = vec![vec![vec![0u64; d]; d]; d];
    let mut counts = vec![0u64; q as usize];
    'pairs: for i in 0..d {
        for j in 0..d {
            counts.fill(0);
            for &a in &part.blocks()[i] {
                for &b in &part.blocks()[j] {
                    counts[ctx.add(a, b).0 as usize] += 1;
                }
            }
            for (k, blk) in part.blocks().iter().enumerate() {
                let expect = counts[blk[0].0 as usize];
                for &delta in blk.iter().skip(1) {
                    let got = counts[delta.0 as usize];
                    if got != expect {
                        constant = false;
                        if violation.is_none() {
                            violation = Some(SchemeViolation::NonConstant {
                                i: part.labels()[i],
                                j: part.labels()[j],
                                delta: blk[0].0,
                                delta_prime: delta.0,
                                count_delta: expect,
                                count_delta_prime: got,
                            });
                        }
                        break 'pairs;
                    }
                }
                tensor[k][i][j] = expect;
            }
        }
    }

    Ok(SchemeReport {
        class_count: (d - 1) as u64,
        is_scheme: symmetry_ok && constant,
        criterion: None,
        symmetry_ok: Some(symmetry_ok),
        intersection_numbers: if constant { Some(tensor) } else { None },
        violation,
        block_labels: part.labels().to_vec(),
    })
}

// ---------------------------------------------------------------------------

impl SchemeReport {
    /// p^k_{ij} accessor into the intersection tensor.
    pub fn intersection(&self, k: usize, i: usize, j: usize) -> Option<u64> {
        self.intersection_numbers.as_ref().map(|t| t[k][i][j])
    }
}

// ===========================================================================
// tests
// ===========================================================================
