//! File formats, reports, simulation and the command-line front end for
//! `twostage-core`.

pub mod app;
pub mod error;
pub mod io;
pub mod report;
pub mod simulate;
