use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument {value} outside the domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("value {value} outside the invertible range [{lo}, {hi}]")]
    Range { value: f64, lo: f64, hi: f64 },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("outcome {label:?} has p = {p} but q = 0")]
    Support { label: String, p: f64 },

    #[error("length {length} outside the support [0, {bound}) of the Boltzmann factor")]
    OutsideSupport { length: f64, bound: f64 },

    #[error("quadrature did not reach the requested tolerance (estimate {estimate}, error {error_estimate})")]
    Convergence { estimate: f64, error_estimate: f64 },

    #[error("integrand denominator vanishes inside the integration range")]
    Singularity,

    #[error("averaged cost {value} leaves the range of the inverse cost function")]
    Inversion { value: f64 },

    #[error("step budget of {budget} exhausted")]
    Budget { budget: u64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
