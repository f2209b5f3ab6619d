//! Degree-corrected and standard stochastic block models, the four
//! community-detection criteria built on block statistics (Erdős–Rényi
//! modularity, Newman–Girvan modularity, block-model and degree-corrected
//! profile likelihoods), a tabu-search optimizer and spectral bisection,
//! population-version oracles for the consistency conditions, partition
//! agreement metrics, and an experiment harness that emits CSV.

pub mod criteria;
pub mod error;
pub mod eval;
pub mod graph;
pub mod harness;
pub mod models;
pub mod optim;
pub mod population;
pub mod rng;

pub use criteria::CriterionKind;
pub use error::{Error, Result};
pub use graph::{BlockStats, Graph, Labeling, StatsDelta};
