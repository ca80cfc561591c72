//! Scenario description language: a line-oriented text format describing
//! an interferometer network, protocol parameters and noise settings.
//!
//! ```text
//! format_version = 1          # must come first
//! name = slaz_m4n2
//! M = 4                       # outer beam splitters, angle pi/2M
//! N = 2                       # inner beam splitters, angle pi/2N
//! half_mirror_R = 0.5
//! blocking_model = FullBreak  # or ChannelOnly
//! seed = 2017
//! path r3 channel             # `channel` marks the Alice-Bob link
//! input = in.H
//! loop                        # optional half-mirror cavity
//!   entry = in
//!   cavity = cavity
//!   exit = out
//! end
//! detector D0 = d0.V
//! stage pass bs               # sections: pass | readout
//!   a = cavity.H
//!   b = cavity.V
//!   angle = outer
//! end
//! noise
//!   visibility_outer = 0.98
//! end
//! ```
//!
//! See `docs/scenario-format.md` for the element reference.

mod builtin;
mod parse;
mod serialize;
mod types;
mod validate;

pub use builtin::{
    builtin_scenario, builtin_scenarios, plain_mz, slaz_ideal, slaz_m4n2, slaz_m4n2_channelonly, PLAIN_MZ_SOURCE,
    SLAZ_M4N2_CHANNELONLY_SOURCE, SLAZ_M4N2_SOURCE,
};
pub use parse::{parse_scenario, parse_scenario_bytes, ParseError, ParseErrorKind};
pub use serialize::serialize_scenario;
pub use types::*;
pub use validate::{validate, validate_static, Invalid, Location};
