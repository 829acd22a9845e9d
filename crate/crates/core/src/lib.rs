//! Floquet stability of periodic limit cycles in systems with linear memory.
//!
//! The crate is `no_std` with `alloc`; enable the `std` feature for
//! `std::error::Error` integration through `thiserror`.
//!
//! Pipeline: find a cycle with [`cycle::solve_cycle`], linearize it with
//! [`cycle::linearize`], and compute its exponent classes with
//! [`floquet::solve_spectrum`].

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod cycle;
pub mod error;
pub mod floquet;
pub mod hb;
pub mod kernels;
pub mod linalg;
pub mod models;

pub use cycle::{hb_residual, linearize, solve_cycle, LimitCycle, SystemModel};
pub use error::{Error, Result};
pub use floquet::{solve_spectrum, FloquetEigenpair, FloquetProblem, FloquetSpectrum, Stability};
pub use hb::{HarmonicVector, ToeplitzMatrix};
pub use kernels::{KernelSpec, MemoryTransfer};
pub use num_complex::Complex64;
