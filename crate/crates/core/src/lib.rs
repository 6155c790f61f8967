//! Security-reliability trade-off of decode-and-forward relaying.
//!
//! Intercept probability (the eavesdropper decodes) and outage probability
//! (the destination fails) of direct transmission, single-relay selection and
//! multi-relay selection with matched beamforming, over independent Rayleigh
//! fading links. Closed forms live in [`analytic`]; [`montecarlo`] simulates
//! the protocol end to end and checks them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod channel;
pub mod error;
pub mod montecarlo;
pub mod special;
pub mod sweep;

pub use analytic::{Method, Scheme, SrtPoint};
pub use channel::{ChannelRealization, SystemParams};
pub use error::{Result, SrtError};
pub use montecarlo::McEstimate;
pub use special::RelayIndexSet;
pub use sweep::{MethodSelection, SrtLocus, SweepRow, SweepSpec};
