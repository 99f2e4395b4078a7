//! Straggler-tolerant distributed DFT.
//!
//! An input of length `s` is split into `m` interleaved parts, the parts are
//! MDS-encoded into one share per worker, and each worker transforms its
//! share locally. Any `m` worker results determine the full transform.

pub mod coded;
pub mod demo;
pub mod error;
pub mod fft;
pub mod field;
pub mod interleave;
pub mod io;
pub mod mds;
pub mod sim;
pub mod verify;

pub use error::{Error, Result};
