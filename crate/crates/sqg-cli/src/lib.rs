//! Command-line front end for the SQG spectral toolkit: run
//! configurations, experiment orchestration (E1–E6) and the on-disk
//! formats (time series, spectra, check results, manifest).

pub mod config;
pub mod experiments;
pub mod io;
