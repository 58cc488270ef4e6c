use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable lists differ: {left:?} vs {right:?}")]
    VariableMismatch {
        left: Vec<String>,
        right: Vec<String>,
    },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator vanishes at the base point")]
    DenominatorVanishes,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("point does not satisfy the chart: {0}")]
    PointNotOnChart(String),
    #[error("point does not lie on the subvariety: {0}")]
    PointNotOnVariety(String),
    #[error("requested order {requested} exceeds jet order {available}")]
    OrderTooLarge { requested: usize, available: usize },
    #[error("scale guard: {0}")]
    ScaleGuard(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn mismatch(left: &[String], right: &[String]) -> Self {
        Error::VariableMismatch {
            left: left.to_vec(),
            right: right.to_vec(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
