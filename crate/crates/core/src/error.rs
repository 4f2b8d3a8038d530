use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("generator count {0} outside 1..=9")]
    GeneratorCount(usize),

    #[error("generator index {index} outside 1..={n}")]
    GeneratorIndex { index: usize, n: usize },

    #[error("degree {degree} outside 0..={max}")]
    Degree { degree: usize, max: usize },

    #[error("invalid word {0:?}")]
    InvalidWord(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix of {rows}x{cols} exceeds the size limit ({limit} rows)")]
    SizeLimit { rows: usize, cols: usize, limit: usize },

    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is singular to working tolerance")]
    Singular,

    #[error("row norm {0} is not strictly below 1")]
    NotStrictContraction(f64),

    #[error("row norm {0} exceeds 1")]
    NotContraction(f64),

    #[error("series has a nonzero constant term")]
    NonzeroConstant,

    #[error("evaluation outside the convergence region: {0}")]
    Divergence(String),

    #[error("operator is not multi-analytic: {0}")]
    NotMultiAnalytic(String),

    #[error("input is not selfadjoint (defect {0:.3e})")]
    NotSelfadjoint(f64),

    #[error("exactness zone violated: {0}")]
    ExactnessZone(String),

    #[error("moment functional carries no vector-state realization")]
    NoRealization,

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("infeasible data: min eigenvalue {0:.6e}")]
    Infeasible(f64),

    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by malformed data rather than numerical scope.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::GeneratorCount(_)
                | Error::GeneratorIndex { .. }
                | Error::Degree { .. }
                | Error::InvalidWord(_)
                | Error::Shape(_)
                | Error::NotHermitian(_)
                | Error::NotSelfadjoint(_)
                | Error::NonzeroConstant
                | Error::Input(_)
                | Error::Json(_)
                | Error::Unsupported(_)
                | Error::ExactnessZone(_)
                | Error::NoRealization
        )
    }
}
