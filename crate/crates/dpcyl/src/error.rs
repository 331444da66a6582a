use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("rank {0} outside 0..=8")]
    RankOutOfRange(usize),
    #[error("unsupported invariant pair (D^2, D.K) = ({0}, {1})")]
    UnsupportedInvariants(i64, i64),
    #[error("degree {0} outside the supported range")]
    DegreeOutOfRange(i64),
    #[error("invalid root {0}: {1}")]
    InvalidRoot(String, String),
    #[error("roots {0} and {1} meet with multiplicity {2}")]
    BadRootIntersection(String, String, String),
    #[error("unsupported root configuration: {0}")]
    UnsupportedShape(String),
    #[error("class {0} is not orthogonal to every root")]
    NotRootOrthogonal(String),
    #[error("dynkin label mismatch: expected {expected}, computed {computed}")]
    DynkinMismatch { expected: String, computed: String },
    #[error("fibration candidate rejected: {0}")]
    NotAFibration(String),
    #[error("no fibration satisfying the section condition: {0}")]
    NoFibration(String),
    #[error("hypotheses not met: {0}")]
    Hypothesis(String),
    #[error("class is not ample")]
    NotAmple,
    #[error("surface out of scope: {0}")]
    OutOfScope(String),
    #[error("unknown catalog entry: {0}")]
    UnknownEntry(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
