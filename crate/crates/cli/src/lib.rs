//! Experiment runner on top of `teichlab-core`.

pub mod config;
pub mod run;
pub mod selftest;
