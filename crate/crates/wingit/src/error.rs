use thiserror::Error;

/// Errors surfaced by chain construction, estimation, tuning and ingest.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid probability {value}: must lie in {range}")]
    InvalidProbability { value: f64, range: &'static str },

    #[error("invalid distribution: {reason}")]
    InvalidDistribution { reason: String },

    #[error("exact mixing time unavailable at alphabet size {size} (cap {cap})")]
    AlphabetTooLarge { size: usize, cap: usize },

    #[error("mixing time did not converge within {0} steps")]
    MixingDidNotConverge(usize),

    #[error("invalid window size {tau}: must lie in [1, {n}]")]
    InvalidWindow { tau: usize, n: usize },

    #[error("sequence length {n} is not divisible by 2*tau = {two_tau}")]
    NotDivisible { n: usize, two_tau: usize },

    #[error("invalid skip offset {ell}: must lie in [0, {max}]")]
    InvalidSkipOffset { ell: usize, max: usize },

    #[error("sequence too short: n = {n}, need n >= {min}")]
    SequenceTooShort { n: usize, min: usize },

    #[error("invalid trial count: must be at least 1")]
    NoTrials,

    #[error("empty corpus: no tokens remain after cleaning")]
    EmptyCorpus,

    #[error("trajectory length {n} exceeds corpus length {total}")]
    WindowTooLong { n: usize, total: usize },

    #[error("invalid experiment spec: field `{field}`: {reason}")]
    InvalidSpec { field: &'static str, reason: String },

    #[error("invalid collocation rule on line {line}: {reason}")]
    InvalidRule { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
