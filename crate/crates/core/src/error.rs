use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("cannot parse {0:?} as a complex number")]
    Parse(String),

    #[error("invalid family parameters: {0}")]
    InvalidParams(String),

    /// Two eigenvalues coincide, `h_i = h_j`; some `h`-difference denominator vanishes.
    #[error("eigenvalue collision h_{i} = h_{j}")]
    EigenvalueCollision { i: usize, j: usize },

    /// Two lattice nodes coincide, `x_i = x_j`.
    #[error("node collision x_{i} = x_{j}")]
    NodeCollision { i: usize, j: usize },

    /// The family violates the convergence condition of its case; raised
    /// before any summation is attempted.
    #[error("convergence condition violated ({case}): {condition}")]
    ConvergenceCondition { case: String, condition: String },

    #[error("no root of the canonical cubic reproduces f_0 (coefficient residuals {residuals:?})")]
    NoRootCertifies { residuals: Vec<f64> },

    #[error("prefactor pole at k = {k}: {detail}")]
    PrefactorPole { k: usize, detail: String },

    #[error("undefined hypergeometric series: {0}")]
    UndefinedSeries(String),

    #[error("series did not converge: {0}")]
    NotConverged(String),

    #[error("unknown family {0:?}")]
    UnknownFamily(String),

    #[error("unknown weight method {0:?}")]
    UnknownMethod(String),

    #[error("{family}: missing argument {arg:?}")]
    MissingArgument { family: String, arg: String },

    #[error("{family}: invalid argument {arg:?}: {reason}")]
    InvalidArgument {
        family: String,
        arg: String,
        reason: String,
    },

    #[error("{0}")]
    Unsupported(String),
}

impl Error {
    /// Stable machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::InvalidParams(_) => "invalid_params",
            Error::EigenvalueCollision { .. } => "eigenvalue_collision",
            Error::NodeCollision { .. } => "node_collision",
            Error::ConvergenceCondition { .. } => "convergence_condition",
            Error::NoRootCertifies { .. } => "no_root_certifies",
            Error::PrefactorPole { .. } => "prefactor_pole",
            Error::UndefinedSeries(_) => "undefined_series",
            Error::NotConverged(_) => "not_converged",
            Error::UnknownFamily(_) => "unknown_family",
            Error::UnknownMethod(_) => "unknown_method",
            Error::MissingArgument { .. } => "missing_argument",
            Error::InvalidArgument { .. } => "invalid_argument",
            Error::Unsupported(_) => "unsupported",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
