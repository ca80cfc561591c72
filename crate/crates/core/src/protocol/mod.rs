//! Bit-by-bit transfer between Bob (pass/block) and Alice (detectors), with
//! repeat-until-conclusive feedback, plus bitmap I/O.

mod image;
mod transmit;

pub use image::{decode_pbm, encode_pbm, MonoImage, PbmFormat};
pub use transmit::{
    summarize, transmit_bit, transmit_bits, transmit_image, BitTrial, Detector, ImageStats, Link, Sender, TraceEntry,
    DEFAULT_ATTEMPT_CAP,
};
