//! Batch front end for the HDG shallow water solver: configuration, the
//! four pipelines and their CSV / VTK output.

pub mod commands;
pub mod config;
pub mod output;
pub mod pipeline;
