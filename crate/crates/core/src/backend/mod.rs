//! Reversible stages between the word transform and the entropy coder:
//! block sorting, move-to-front and run-length coding.

pub mod bwt;
pub mod mtf;
pub mod rle;

pub use bwt::{bwt_forward, bwt_inverse, BwtBlock};
pub use mtf::{mtf_decode, mtf_encode};
pub use rle::{rle_decode, rle_encode};
