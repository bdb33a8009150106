use thiserror::Error;

/// Errors raised while building, solving or measuring a boundary value problem.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FemError {
    #[error("degenerate domain: x_l = {x_l} must be smaller than x_r = {x_r}")]
    DegenerateDomain { x_l: f64, x_r: f64 },

    #[error("mesh needs at least 2 elements, got {0}")]
    TooFewElements(usize),

    #[error("mesh nodes must be strictly increasing (violated at node {index})")]
    NonMonotoneMesh { index: usize },

    #[error("mesh does not span the problem domain [{x_l}, {x_r}]")]
    MeshDomainMismatch { x_l: f64, x_r: f64 },

    #[error("unsupported Gauss-Legendre order {0} (supported: 1..=16)")]
    UnsupportedQuadratureOrder(usize),

    #[error("node index {index} out of range for a mesh with {nodes} nodes")]
    NodeIndexOutOfRange { index: usize, nodes: usize },

    #[error("element index {index} out of range for a mesh with {elements} elements")]
    ElementIndexOutOfRange { index: usize, elements: usize },

    #[error("x = {x} lies outside element {element} = [{a}, {b}]")]
    PointOutsideElement { x: f64, element: usize, a: f64, b: f64 },

    #[error("x = {x} lies outside the domain [{lo}, {hi}]")]
    PointOutsideDomain { x: f64, lo: f64, hi: f64 },

    #[error("coercivity violated: beta({x}) = {beta} is not positive")]
    CoercivityViolation { x: f64, beta: f64 },

    #[error("reaction coefficient must be non-negative: q({x}) = {q}")]
    NegativeReaction { x: f64, q: f64 },

    #[error("ConstantCoefficientRequired: {0}")]
    ConstantCoefficientRequired(String),

    #[error("singular tridiagonal system: zero pivot at row {row}")]
    SingularSystem { row: usize },

    #[error("malformed tridiagonal system: {0}")]
    MalformedSystem(String),

    #[error("problem has no exact solution attached")]
    MissingExactSolution,

    #[error("exact solution has no analytic derivative attached")]
    MissingExactDerivative,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl FemError {
    /// True for failures of the numerics (as opposed to malformed input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            FemError::CoercivityViolation { .. }
                | FemError::NegativeReaction { .. }
                | FemError::ConstantCoefficientRequired(_)
                | FemError::SingularSystem { .. }
                | FemError::MalformedSystem(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, FemError>;
