use thiserror::Error;

use crate::scenario::ParseError;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid wiring: {0}")]
    InvalidWiring(String),

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("{name} = {value} is out of range ({expected})")]
    Range {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("numerical integrity violated: {0}")]
    NumericalIntegrity(String),

    #[error("size limit exceeded: {0}")]
    Size(String),

    #[error("infeasible protocol: {0}")]
    InfeasibleProtocol(String),

    #[error("channel infeasible: no conclusive outcome after {attempts} attempts for bit {bit_index}")]
    ChannelInfeasible { bit_index: usize, attempts: u64 },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("format error: {0}")]
    Format(String),

    #[error("event stream not time-sorted at index {0}")]
    Ordering(usize),

    #[error("visibility undefined when both intensities are zero")]
    UndefinedVisibility,

    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Checks `lo <= value <= hi` (and finiteness).
pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64, expected: &'static str) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::Range { name, value, expected })
    }
}
