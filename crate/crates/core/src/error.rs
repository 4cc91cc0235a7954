use thiserror::Error;

use crate::algebra::IndexSeq;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("variable context mismatch: expected {expected} variables, found {found}")]
    Context { expected: usize, found: usize },

    #[error("invalid variable context: {0}")]
    InvalidContext(String),

    #[error("form degree mismatch: expected {expected}, found {found}")]
    Degree { expected: usize, found: usize },

    #[error("degree {q} out of range (complex has top degree {top})")]
    DegreeOutOfRange { q: usize, top: usize },

    #[error("operation undefined on the zero element")]
    ZeroElement,

    #[error("index {index} out of range 1..={len}")]
    Index { index: usize, len: usize },

    #[error("invalid index sequence {0:?}: entries must be strictly increasing and at least 1")]
    InvalidIndexSeq(Vec<usize>),

    #[error("the generating set is empty")]
    EmptyInput,

    #[error("duplicate monomial at positions {first} and {second}")]
    Duplicate { first: usize, second: usize },

    #[error("{r} generators exceed the enumeration cap {cap} (2^r Taylor generators)")]
    Capacity { r: usize, cap: usize },

    #[error("label {0} is not a generator of the complex")]
    Label(IndexSeq),

    #[error("not a Groebner basis: {0}")]
    NotGroebner(String),

    #[error("kept labels are not closed under the differential: {label} references {missing}")]
    NotASubcomplex { label: IndexSeq, missing: IndexSeq },

    #[error("strong deformation retract invariant violated: {0}")]
    SdrInvariant(String),

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("malformed complex: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
