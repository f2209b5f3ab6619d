//! Maximizers for the community-detection criteria: tabu search over
//! labelings for any criterion, and spectral bisection for the modularities.

mod spectral;
mod tabu;

pub use spectral::{modularity_matrix_apply, spectral_bisect, SpectralResult};
pub use tabu::{tabu_search, SearchResult, TabuConfig};
