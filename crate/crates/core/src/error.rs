use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TritError {
    #[error("requested {requested} symbols from a string of length {length}")]
    OutOfRange { requested: usize, length: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("strings are not compatible with overlap {overlap}")]
    NotCompatible { overlap: usize },
    #[error("merging suffix of length {overlap} is fully erased")]
    ErasedSuffix { overlap: usize },
    #[error("a merge needs a positive overlap")]
    ZeroOverlap,
    #[error("invalid symbol {ch:?} at index {index}")]
    BadSymbol { ch: char, index: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("invalid channel parameters: {0}")]
    InvalidParams(String),
    #[error("codebook of 2^{exponent:.3} words exceeds the cap of {cap}")]
    CodebookTooLarge { exponent: f64, cap: usize },
    #[error("message index {index} outside codebook of {size} words")]
    BadMessage { index: usize, size: usize },
    #[error("codeword length {got} does not match n = {expected}")]
    CodewordLength { got: usize, expected: usize },
}

/// A required merge could not be carried out.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MergeFailure {
    #[error("order position {position}: {source}")]
    Incompatible {
        position: usize,
        #[source]
        source: TritError,
    },
    #[error("order position {position}: suffix of length {overlap} has size {actual}, expected {expected}")]
    SizeMismatch {
        position: usize,
        overlap: usize,
        expected: usize,
        actual: usize,
    },
    #[error("order position {position}: overlap {overlap} outside [1, {read_len}]")]
    BadOverlap {
        position: usize,
        overlap: usize,
        read_len: usize,
    },
    #[error("ordering is not a permutation of {reads} reads")]
    BadOrdering { reads: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RateError {
    #[error("domain error: {0}")]
    Domain(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecodeError {
    #[error("K = {reads} exceeds the search cap of {cap} reads (K! x (L+1)^K orderings)")]
    TooManyReads { reads: usize, cap: usize },
    #[error("invalid decoder configuration: {0}")]
    Config(String),
}
