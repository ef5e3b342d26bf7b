//! Configuration, synthetic data and experiment pipelines behind the
//! `twophoton` command.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod pipeline;

pub use config::{Algorithm, ExperimentConfig, FieldSpec, Inclusion, Phantom, Shape, SourceSpec, Targets};
pub use error::{CliError, CliResult};
pub use pipeline::{
    gradient_check, run_experiment, run_forward, run_reconstruction, synthesize, ErrorTable, Experiment,
};
