use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("operands live on different manifolds ({0} vs {1})")]
    ManifoldMismatch(String, String),
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("unknown manifold `{0}`")]
    UnknownManifold(String),
    #[error("point is off the unit sphere (|y|^2 - 1 = {0:e})")]
    OffSphere(f64),
    #[error("point has {got} coordinates, expected {expected}")]
    PointDimension { expected: usize, got: usize },
    #[error("frame has {got} vectors, form has degree {expected}")]
    FrameMismatch { expected: usize, got: usize },
    #[error("frame vector {0} is not tangent to the manifold")]
    FrameNotTangent(usize),
    #[error("form of degree {form} cannot be integrated over a {cycle}-dimensional cycle")]
    DegreeMismatch { form: usize, cycle: usize },
    #[error("interior product of a 0-form")]
    InteriorOfFunction,
    #[error("form is not closed (residual {0:e})")]
    NotClosed(f64),
    #[error("vector field is not tangent to the sphere factors")]
    NotTangent,
    #[error("function is not basic (Reeb derivative does not vanish)")]
    NotBasic,
    #[error("field is not symplectic (L_X omega does not vanish)")]
    NotSymplectic,
    #[error("linear system is singular (condition number {0:e})")]
    SingularSystem(f64),
    #[error("linear system is not symbolically triangular: {0}")]
    NotTriangularizable(String),
    #[error("imaginary residue {0:e} in a real-valued field")]
    NotReal(f64),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("integration produced a non-finite state")]
    NonFinite,
    #[error("flow did not close up within time {0}")]
    NonPeriodic(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
