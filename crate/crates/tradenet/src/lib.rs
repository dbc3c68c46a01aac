//! File formats, synthetic data and the command-line front end for
//! [`tradenet_core`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dataio;
pub mod files;
pub mod synthetic;

pub use dataio::{load_dataset, load_dir, reduced_sample, save_dataset, DataError, DatasetPaths};
pub use synthetic::{gen_sellers, gen_synthetic, PlantedTruth, SyntheticConfig};
