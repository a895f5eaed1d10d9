//! Exact and time-averaged dynamics of first-order memristors driven by
//! periodic trains of alternating-polarity pulses.
//!
//! * [`models`]: the pulse train, the Biolek-window model and the threshold
//!   memristor in series with a resistor.
//! * [`exact_sim`]: pulse-by-pulse RK4 integration and one-period averaging.
//! * [`averaged`]: the averaged evolution equation, its closed-form
//!   solutions, fixed points and relaxation times.
//! * [`analysis`]: exact-versus-averaged comparison and relaxation-time fits.
//! * [`batch`]: ordered data-parallel maps over independent runs.
//! * [`cli`]: scenario files, CSV output and figure data generation.

// `!(a > b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod averaged;
pub mod batch;
pub mod cli;
pub mod error;
pub mod exact_sim;
pub mod models;

pub use error::{Error, Result};
