use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid stubbornness: {0}")]
    InvalidStubbornness(String),

    #[error("noise variance must be positive, got sigma2 = {0}")]
    NonPositiveNoise(f64),

    #[error("personality density does not integrate to 1 (got {0}, tolerance 1e-6)")]
    UnnormalizedRho0(f64),

    #[error("influence is not in product form: {0}")]
    ProductFormMismatch(String),

    #[error("operation requires belief-independent influence zeta(p, p')")]
    BeliefDependentZeta,

    #[error("degenerate influence: {0}")]
    DegenerateInfluence(String),

    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),

    #[error("empty domain: {0}")]
    DomainEmpty(String),

    #[error("grid too coarse: need at least 3 nodes per axis, got np = {np}, nx = {nx}")]
    GridTooCoarse { np: usize, nx: usize },

    #[error("singular matrix: pivot {pivot:e} at column {col} below threshold")]
    SingularMatrix { col: usize, pivot: f64 },

    #[error("interaction exponent spread {spread:.1} exceeds overflow guard of 700")]
    OverflowGuard { spread: f64 },

    #[error("fixed point iteration did not converge in {iterations} iterations (last L1 delta {last_delta:e})")]
    NotConverged { iterations: usize, last_delta: f64 },

    #[error("Neumann series diverges: discrete L2 kernel norm {norm} >= 1")]
    SeriesDiverges { norm: f64 },

    #[error("product-form denominator vanishes ({0:e} <= 1e-12)")]
    DenominatorVanishes(f64),

    #[error("time {t} outside the solved range [0, {t_max}]")]
    TimeOutOfRange { t: f64, t_max: f64 },

    #[error("time step too large: {0}")]
    StepTooLarge(String),

    #[error("phi path too short: {0}")]
    PathTooShort(String),

    #[error("pole on integration path: s + w(p) = {0:e} at a node")]
    PoleOnPath(f64),

    #[error("config error: {0}")]
    Config(String),

    #[error("csv error: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
