use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mismatched operands: {0}")]
    Mismatch(String),
    #[error("degree-0 part is not invertible")]
    SingularLeadingTerm,
    #[error("exponential argument has a nonzero degree-0 part")]
    NonNilpotentArgument,
    #[error("leading term is not 1 (or a scalar with an exact square root)")]
    BadLeadingTerm,
    #[error("degree-0 part is not the expected generator Q_{0}")]
    BadDecomposition(usize),
    #[error("relation violated: {relation} (residual {residual:e})")]
    RelationViolation { relation: String, residual: f64 },
    #[error("matrix is singular")]
    Singular,
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("spectral condition violated (margin {0:e})")]
    SpectralConditionViolated(f64),
    #[error("quadrature integrand singular at t = {0}")]
    NodeSingular(f64),
    #[error("element does not square to a signed unit")]
    NotInvolution,
    #[error("weights must be strictly positive")]
    NonPositiveWeight,
    #[error("eta must be symmetric positive definite")]
    EtaNotSpd,
    #[error("polarization undefined at stage {0}")]
    PolarizationDomain(usize),
    #[error("input is not tangent (residual {0:e})")]
    NotTangent(f64),
    #[error("path leaves the system variety at t = {t} (residual {residual:e})")]
    SystemViolation { t: f64, residual: f64 },
    #[error("cost guard: {0}")]
    CostGuard(String),
    #[error("inadmissible index tuple: {0}")]
    InadmissibleIndex(String),
    #[error("residual did not decrease for {0} consecutive iterations")]
    NoContraction(usize),
    #[error("series terms stopped decreasing at order {0}")]
    DivergenceDetected(usize),
    #[error("method undefined for sample {0}: {1}")]
    MethodUndefined(usize, String),
    #[error("invalid input: {0}")]
    Parse(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoConvergence(_) | Error::NoContraction(_) | Error::DivergenceDetected(_) => 3,
            Error::Parse(_) | Error::Mismatch(_) => 1,
            _ => 2,
        }
    }
}
