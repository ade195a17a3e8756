#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

//! Kernel k-sample testing built on the generalized maximum mean discrepancy
//! (GMMD): pairwise unbiased MMD² estimates combined with sample-proportion
//! weights into a single statistic, calibrated by permutation resampling,
//! subsampling, or Monte Carlo simulation of the asymptotic null law from an
//! estimated kernel spectrum. Classical rank baselines (Kruskal–Wallis and the
//! k-sample Anderson–Darling test) and seeded samplers for simulation studies
//! round out the toolkit.
//!
//! The crate is `no_std`-compatible (requires `alloc`); disable the default
//! `std` feature for embedded or wasm targets. All randomness flows through
//! explicitly seeded ChaCha12 streams, so every result is reproducible
//! bit-for-bit.

extern crate alloc;

pub mod baselines;
pub mod calibration;
pub mod estimator;
pub mod kernel;
pub mod samplers;

mod accum;
mod error;

pub use error::{Error, ErrorKind};

/// Re-exported so downstream crates can name the matrix types used in public
/// signatures without pinning their own nalgebra version.
pub use nalgebra;
