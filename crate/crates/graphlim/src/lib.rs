//! Toolkit for dense graph limits at desk scale: step-function graphons and
//! k-colored digraphons, cut norms and their partition-localized variants,
//! weak and cut-P regularity decompositions, W-random sampling, subgraph
//! densities, (k,m)-colorings, ground-state energies, and an experiment
//! harness measuring how well graph parameters survive uniform sampling.

pub mod error;
pub mod io;
pub mod model;
pub mod cli;
pub mod colorings;
pub mod densities;
pub mod energies;
pub mod norms;
pub mod regularity;
pub mod rng;
pub mod witness;

pub use error::{Error, Result};
