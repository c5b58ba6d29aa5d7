use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("period must contain at least one class")]
    EmptyPeriod,
    #[error("b_{k} evaluates to zero")]
    ZeroB { k: usize },
    #[error("limit q_{index} is zero")]
    ZeroQ { index: usize },
    #[error("a_classes has {a} entries but b_classes has {b}")]
    PeriodMismatch { a: usize, b: usize },
    #[error("periodic specs take no perturbations or overrides")]
    NotPeriodic,
    #[error("override index must be >= 1")]
    ZeroIndex,
    #[error("non-finite coefficient")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("singular pivot: a_{k} - lambda is below the pivot floor")]
    SingularPivot { k: usize },
    #[error("a_{n} repeats the value a_{j}")]
    RepeatedValue { j: usize, n: usize },
    #[error("operation requires period 2, spec has period {m}")]
    WrongPeriod { m: usize },
    #[error("lambda is within match tolerance of limit p_{index} but matches no a_k")]
    NearLimitAmbiguous { index: usize },
    #[error("exponent p = {0} is outside (1, inf)")]
    BadExponent(f64),
}
