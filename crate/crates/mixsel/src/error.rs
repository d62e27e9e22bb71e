use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A collection kind string that is none of `histogram`, `fourier`, `wavelet-haar`.
    #[error("unknown collection kind `{0}`")]
    UnknownKind(String),

    /// Sample size too small for the requested construction.
    #[error("sample size n = {n} is below the minimum {min} for {what}")]
    SampleTooSmall { n: usize, what: &'static str, min: usize },

    /// A basis label that does not belong to the model it was used with.
    #[error("basis label {label} is not a member of model {model}")]
    LabelNotInModel { model: usize, label: String },

    /// Requested block length leaves fewer than two odd blocks.
    #[error("block length q = {q} leaves fewer than two blocks for n = {n} (need q < n/4)")]
    BlockLengthTooLarge { q: usize, n: usize },

    /// A block layout that does not satisfy 2pq <= n with p >= 2, q >= 1.
    #[error("invalid block layout: n = {n}, p = {p}, q = {q}")]
    InvalidBlockLayout { n: usize, p: usize, q: usize },

    /// An observation outside the estimation domain [0, 1).
    #[error("observation #{index} = {value} lies outside [0, 1)")]
    DataOutOfDomain { index: usize, value: f64 },

    /// Weight law with zero variance; the resampling constant is undefined.
    #[error("degenerate weight law: Var(W_1 - mean W) = 0")]
    DegenerateWeights,

    /// A weight-law parameter outside its admissible range.
    #[error("invalid weight-law parameter: {0}")]
    InvalidWeightParameter(String),

    /// Weight law built for a different number of blocks than the sample has.
    #[error("weight law has p = {law_p} but the block scheme has p = {scheme_p}")]
    WeightCountMismatch { law_p: usize, scheme_p: usize },

    /// A selection criterion that evaluated to NaN.
    #[error("criterion for model {model} is not finite")]
    NonFiniteCriterion { model: usize },

    /// Selection over an empty model list.
    #[error("cannot select from an empty model list")]
    EmptySelection,

    /// A slope-heuristic grid that is empty or not strictly increasing.
    #[error("invalid K grid: {0}")]
    InvalidGrid(String),

    /// A complexity measure that is not strictly positive for some model.
    #[error("complexity of model {model} is {value}; the slope path needs strictly positive complexities")]
    NonPositiveComplexity { model: usize, value: f64 },

    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge on [{a}, {b}]")]
    QuadratureDidNotConverge { a: f64, b: f64 },

    /// A density descriptor that is not a probability density on [0, 1).
    #[error("invalid density: {0}")]
    InvalidDensity(String),

    /// An autoregression coefficient with |a| >= 1.
    #[error("autoregression coefficient a = {0} must satisfy |a| < 1")]
    InvalidArCoefficient(f64),

    /// A burn-in below the documented minimum.
    #[error("burn-in {given} is below the minimum {min}")]
    BurnInTooShort { given: usize, min: usize },

    /// Too few replications for a Monte-Carlo routine.
    #[error("{what} needs at least {min} replications, got {given}")]
    TooFewReplications { what: &'static str, given: usize, min: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
