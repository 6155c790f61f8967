use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SrtError {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Exhaustive subset enumeration would exceed the configured cap.
    #[error("{n} relays requires enumerating 2^{n} = {cost} decoding sets, above the cap of {cap} relays")]
    Capacity { n: usize, cap: usize, cost: u128 },

    /// The closed form does not cover this parameter configuration.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// A `SystemParams` invariant was violated.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },
}

pub type Result<T> = std::result::Result<T, SrtError>;
