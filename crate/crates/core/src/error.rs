use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("enumeration budget: horizon {requested} exceeds cap {cap} for {context}")]
    EnumerationBudget {
        requested: usize,
        cap: usize,
        context: &'static str,
    },

    #[error("reducible chain, stationary distribution not unique")]
    ReducibleChain,

    #[error("integration step {dt} exceeds stability bound {bound} for the fastest rate")]
    UnstableStep { dt: f64, bound: f64 },
}

impl Error {
    pub fn invalid(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Checks that `value` is a probability in `[0, 1]`.
pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) || value.is_nan() {
        return Err(Error::invalid(name, format!("{value} is not in [0, 1]")));
    }
    Ok(())
}
