//! Configuration, file formats and command-line driver for the coupled
//! local/nonlocal diffusion solver in `locnl-core`.

#![allow(clippy::needless_range_loop)]

pub mod config;
pub mod error;
pub mod expr;
pub mod output;
pub mod presets;
pub mod run;
