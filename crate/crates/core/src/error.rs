use thiserror::Error;

/// Broad classes of failure, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Parse,
    Precondition,
    Hypothesis,
    Sanity,
    Verification,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("relation `{relation}` is not homogeneous: term weights {weights:?}")]
    InhomogeneousRelation { relation: String, weights: Vec<u32> },
    #[error("generator `{0}` has weight 0; the grading must be connected")]
    ZeroWeightGenerator(String),
    #[error("relation `{0}` is not killed by the proposed homomorphism")]
    RelationNotKilled(String),
    #[error("image of `{generator}` has weight {found}, expected {expected}")]
    WeightMismatch {
        generator: String,
        expected: u32,
        found: u32,
    },
    #[error("composite of consecutive differentials is nonzero ({0})")]
    CompositionNonzero(String),
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("Eulerian idempotent table failed validation in degree {degree}: {detail}")]
    IdempotentSanityFail { degree: usize, detail: String },
    #[error("Kunneth mismatch in {kind} at n={n}, w={w}, j={j}: computed {computed}, predicted {predicted}")]
    Mismatch {
        kind: String,
        n: usize,
        w: u32,
        j: u32,
        computed: usize,
        predicted: usize,
    },
    #[error("resolution square is invalid: {0}")]
    SquareInvalid(String),
    #[error("cdh cohomology in degree {0} is not supported for curve squares")]
    UnsupportedDimension(usize),
    #[error("twisting class has degree {0}, which is not ample")]
    NotAmple(i64),
    #[error("point has finite order {0}; the difference P - Q must be non-torsion")]
    TorsionPoint(u32),
    #[error("smoothness verdict is indeterminate: {0}")]
    Indeterminate(String),
    #[error("independent oracles disagree: {0}")]
    OracleDisagreement(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("cutoff inconsistency: {0}")]
    Cutoff(String),
    #[error("point ({0}) is not on the curve")]
    NotOnCurve(String),
    #[error("singular Weierstrass equation (discriminant 0)")]
    SingularCurve,
    #[error("{0}")]
    Io(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            Parse { .. } | InhomogeneousRelation { .. } | ZeroWeightGenerator(_) => {
                ErrorClass::Parse
            }
            RelationNotKilled(_)
            | WeightMismatch { .. }
            | NotSquare { .. }
            | SquareInvalid(_)
            | UnsupportedDimension(_)
            | NotAmple(_)
            | Unsupported(_)
            | Cutoff(_)
            | NotOnCurve(_)
            | SingularCurve
            | Indeterminate(_)
            | Io(_) => ErrorClass::Precondition,
            TorsionPoint(_) => ErrorClass::Hypothesis,
            CompositionNonzero(_) | IdempotentSanityFail { .. } | OracleDisagreement(_) => {
                ErrorClass::Sanity
            }
            Mismatch { .. } => ErrorClass::Verification,
        }
    }

    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
