use crate::domain::Domain;
use thiserror::Error;

/// Errors produced by basis evaluation, quadrature, series truncation and
/// the operator engine.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("point {value} lies outside the {domain} domain")]
    OutOfDomain { domain: Domain, value: f64 },

    #[error("operator order must satisfy n >= 1, got {0}")]
    InvalidOrder(u32),

    #[error("spectral factor is singular at the origin for k >= 2 (k = {k}); use the fused product instead")]
    SingularAtOrigin { k: i64 },

    #[error("series tail cannot be brought below {tol:.3e} within {cap} terms (n = {n}, point = {point})")]
    TruncationFailure {
        n: u32,
        point: f64,
        tol: f64,
        cap: usize,
    },

    #[error("quadrature did not reach relative tolerance {rel_tol:.3e}: {detail}")]
    QuadratureFailure { rel_tol: f64, detail: String },

    #[error("integrand appears divergent: {0}")]
    DivergentIntegrand(String),

    #[error("operator expects a {expected} function, got a {got} function")]
    DomainMismatch { expected: Domain, got: Domain },

    #[error("finite differences would sample outside the domain near {x}")]
    EndpointDerivative { x: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
