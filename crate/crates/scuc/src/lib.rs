//! File formats, solver back ends, study sweeps and the command-line front
//! end built on [`scuc_core`].

pub mod case_file;
pub mod cli;
pub mod config;
pub mod mps;
pub mod oracle;
pub mod report;
pub mod solver;
pub mod sweep;
