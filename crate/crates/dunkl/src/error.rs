use thiserror::Error;

/// Failure modes surfaced by the numerical routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Parameter or argument outside the valid domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A series did not converge within the configured term budget.
    #[error("series did not converge within {max_terms} terms (last term {last_term:.3e})")]
    SeriesTruncation { max_terms: usize, last_term: f64 },

    /// An adaptive quadrature could not certify the requested tolerance.
    #[error("quadrature tolerance not met: requested {requested:.3e}, achieved {achieved:.3e}")]
    QuadratureTolerance { requested: f64, achieved: f64 },

    /// The requested norm or integral does not exist for this input.
    #[error("not integrable: {0}")]
    NotIntegrable(String),

    /// A numeric-fallback derivative step underflowed at this argument.
    #[error("finite-difference step underflow at x = {0}")]
    StepUnderflow(f64),

    /// An antiderivative evaluation hit a divergent term (should not occur
    /// for integrable kernel data; indicates inconsistent input).
    #[error("divergent term in antiderivative limit: coeff {coeff:.3e}, exponent {exponent}, log power {log_power}")]
    DivergentTerm {
        coeff: f64,
        exponent: f64,
        log_power: u32,
    },

    /// A parse failure for a catalog or configuration string.
    #[error("parse error: {0}")]
    Parse(String),
}
