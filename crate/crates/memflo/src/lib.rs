//! Parameter sweeps, bifurcation-boundary bisection and result files for
//! `memflo-core`: the library half of the `memflo` binary.
//!
//! ```no_run
//! use memflo::config::{Encoding, SweepConfig};
//! use memflo::run::{run, RunOptions};
//!
//! let cfg = SweepConfig::parse(
//!     r#"
//!     model = "memory1d"
//!     mode = "sweep"
//!     [parameters]
//!     a = [-2.0, 2.0, 41]
//!     "#,
//!     Encoding::Toml,
//! )?;
//! let result = run(&cfg, &RunOptions::default());
//! print!("{}", memflo::emit::to_csv(&result));
//! # Ok::<(), memflo::config::ConfigError>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod emit;
pub mod eval;
pub mod run;
pub mod selfcheck;

pub use config::{ConfigError, SweepConfig};
pub use run::{run, RunOptions, SweepResult};
