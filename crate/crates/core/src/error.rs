use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("distance r{pair} must be positive and finite, got {value}")]
    NonPositiveDistance { pair: &'static str, value: f64 },

    #[error("masses must be positive (m{index} = {value})")]
    NonPositiveMass { index: usize, value: f64 },

    #[error("point lies on the boundary: p{pair} = {value}")]
    Boundary { pair: &'static str, value: f64 },

    #[error("chart point outside region E: p{pair} = {value}")]
    RegionViolation { pair: &'static str, value: f64 },

    #[error("stationarity system is rank deficient (singular values {0:e}, {1:e})")]
    RankDeficient(f64, f64),

    #[error("indeterminate: {0}")]
    Indeterminate(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("distance vector is not realizable: {0}")]
    NotRealizable(String),

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("rejection sampler found no interior point in {0} draws")]
    SamplerExhausted(usize),

    #[error("no start point produced a usable iterate")]
    NoValidStart,

    #[error("{0}")]
    InvalidInput(String),
}
