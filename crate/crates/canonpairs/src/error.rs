use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain parameter: {0}")]
    InvalidDomain(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state is not normalized: |<psi|psi>| = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("momentum cutoff {cutoff} aliases on a {n_points}-point grid (need 4*cutoff < n_points)")]
    AliasedCutoff { cutoff: usize, n_points: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("measurement family is invalid: {0}")]
    InvalidFamily(String),

    #[error("outcome probability {probability:.3e} below threshold; outcome impossible")]
    OutcomeImpossible { probability: f64 },

    #[error("state norm collapsed below 1e-14 during trajectory at step {step}")]
    StateCollapse { step: usize },

    #[error("Fock truncation exceeded: <n> = {mean_n:.2} at step {step} (limit {limit:.2})")]
    TruncationExceeded { mean_n: f64, step: usize, limit: f64 },

    #[error("eigenstate {index} is not bound at well depth {depth}")]
    NotBound { index: usize, depth: f64 },

    #[error("lattice extent {extent} does not cover the tested block (need coverage margin {needed:.1})")]
    InsufficientCoverage { extent: usize, needed: f64 },

    #[error("unknown scenario: {0}")]
    UnknownScenario(String),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
