//! Exact complex-amplitude state over labeled optical modes and the
//! elementary linear-optical transforms acting on it.

mod jones;
mod mode;
mod state;

pub use jones::{JonesMatrix, UNITARY_TOL};
pub use mode::{ModeId, Polarization};
pub use state::{ModeState, NORM_TOL};
