use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid background: {0}")]
    InvalidBackground(String),

    #[error("xi = {xi} outside admissible window [{lo}, {hi}]")]
    XiOutOfRange { xi: f64, lo: f64, hi: f64 },

    #[error("quadrature for {what} did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    Quadrature {
        what: &'static str,
        achieved: f64,
        requested: f64,
    },

    #[error("root bracketing failed: {0}")]
    Bracket(String),

    #[error("branch or orientation bug: {0}")]
    Branch(String),

    #[error("inconsistent data: {0}")]
    Data(String),

    #[error("instability at n = {n}, t = {t}, dt = {dt}: a(n) <= 0")]
    Instability { n: i64, t: f64, dt: f64 },

    #[error("domain of {sites} sites exceeds the {limit}-site limit")]
    DomainTooLarge { sites: usize, limit: usize },

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
