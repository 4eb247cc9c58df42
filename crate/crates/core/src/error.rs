//! Workspace-wide error type.
//!
//! Every fallible operation in this crate returns [`Result`]. Variants are
//! grouped by flavor: input validation, resource budgets, and internal
//! consistency defects (which indicate a bug, not bad input).

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All error conditions raised by this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter that must be prime is not.
    #[error("{0} is not prime")]
    NonPrime(u64),

    /// A supplied field modulus is not irreducible over F_p.
    #[error("polynomial is reducible over F_{p}")]
    ReducibleModulus { p: u64 },

    /// A supplied field modulus is malformed (wrong degree, non-monic, or
    /// coefficients out of range).
    #[error("invalid modulus: {reason}")]
    InvalidModulus { reason: String },

    /// The requested field order exceeds the hard cap.
    #[error("field order {q} exceeds cap {cap}")]
    FieldTooLarge { q: u128, cap: u64 },

    /// Division by zero in a field or ring.
    #[error("division by zero")]
    DivisionByZero,

    /// An element is not a unit modulo the given modulus.
    #[error("{n} is not a unit modulo {modulus}")]
    NotAUnit { n: u64, modulus: u64 },

    /// An operation specific to odd characteristic was invoked at p = 2.
    #[error("operation requires odd characteristic")]
    EvenCharacteristic,

    /// An exact-computation budget was exceeded; use a cheaper routine or a
    /// smaller instance.
    #[error("{what}: size {size} exceeds budget {budget}")]
    BudgetExceeded {
        what: &'static str,
        size: u64,
        budget: u64,
    },

    /// Two independent computations of the same quantity disagree. This is a
    /// defect in the crate, never a property of the input.
    #[error("internal cross-check failed: {what}")]
    InternalMismatch { what: String },

    /// Level-set partitions require f(0) = 0.
    #[error("function does not vanish at 0 (f(0) = {value})")]
    NonzeroAtOrigin { value: u64 },

    /// The function is not bent, so no spectral decomposition exists.
    #[error("function is not bent")]
    NotBent,

    /// A bent spectrum value matched none of the admissible closed forms.
    /// Indicates a defect: every bent value has exactly one such form.
    #[error("bent Walsh value at beta = {beta} matched no candidate form")]
    NoCandidateMatch { beta: u64 },

    /// A linear code needs a nonempty defining set.
    #[error("defining set is empty")]
    EmptyDefiningSet,

    /// A defining set may not contain repeated elements.
    #[error("defining set contains duplicate element {element}")]
    DuplicateElements { element: u64 },

    /// The requested weight-table check does not apply to these parameters.
    #[error("table not applicable: {reason}")]
    TableNotApplicable { reason: String },

    /// A family's arithmetic hypotheses fail for the given parameters.
    #[error("family hypothesis violated: {clause}")]
    HypothesisViolated { clause: String },

    /// A materialized family instance disagrees with its prediction.
    /// Indicates a defect in the predictor or the field arithmetic.
    #[error("family prediction mismatch: {what}")]
    PredictionMismatch { what: String },

    /// A parse error in a function expression or field spec, with the byte
    /// offset of the offending input.
    #[error("syntax error at byte {pos}: {msg}")]
    SyntaxError { pos: usize, msg: String },

    /// A numeric literal in a function expression does not fit in 64 bits.
    #[error("numeric literal at byte {pos} does not fit in 64 bits")]
    ExponentOverflow { pos: usize },

    /// An argument is outside an operation's domain (e.g. factoring 0).
    #[error("invalid argument: {reason}")]
    InvalidArgument { reason: String },

    /// A cached spectrum file is malformed or fails its self-checks.
    #[error("cache entry corrupt: {reason}")]
    CacheCorrupt { reason: String },

    /// Underlying I/O failure (cache, table import/export).
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
