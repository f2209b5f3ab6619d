//! The political blogs network: two hand-labeled communities, heavy-tailed
//! degrees.

use std::path::Path;

use crate::criteria::CriterionKind;
use crate::error::{Error, Result};
use crate::eval::adjusted_rand;
use crate::graph::{largest_connected_component, load_gml_subset, Graph, Labeling};
use crate::optim::spectral_bisect;
use crate::rng::derive_seed;

use super::experiment::{detect, Method, DEFAULT_SPECTRAL_ITERS, DEFAULT_SPECTRAL_TOL};

/// Environment variable naming the GML file.
pub const POLBLOGS_ENV: &str = "POLBLOGS_GML";
pub const DEFAULT_POLBLOGS_PATH: &str = "data/polblogs.gml";

/// Path from `POLBLOGS_GML`, falling back to `data/polblogs.gml`.
pub fn polblogs_path() -> std::path::PathBuf {
    std::env::var_os(POLBLOGS_ENV)
        .map(Into::into)
        .unwrap_or_else(|| DEFAULT_POLBLOGS_PATH.into())
}

/// Five-number summary plus mean. Quartiles interpolate linearly between
/// order statistics at position `(n − 1) p` (the common "type 7" rule).
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeSummary {
    pub mean: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn degree_summary(degrees: &[usize]) -> Result<DegreeSummary> {
    if degrees.is_empty() {
        return Err(Error::EmptyInput("no degrees to summarize"));
    }
    let mut d: Vec<f64> = degrees.iter().map(|&v| v as f64).collect();
    d.sort_by(f64::total_cmp);
    Ok(DegreeSummary {
        mean: d.iter().sum::<f64>() / d.len() as f64,
        min: d[0],
        q1: quantile_sorted(&d, 0.25),
        median: quantile_sorted(&d, 0.5),
        q3: quantile_sorted(&d, 0.75),
        max: d[d.len() - 1],
    })
}

#[derive(Clone, Debug)]
pub struct PolblogsConfig {
    pub tabu: Method,
    pub spectral_tol: f64,
    pub spectral_max_iters: usize,
    pub seed: u64,
}

impl Default for PolblogsConfig {
    fn default() -> Self {
        Self {
            tabu: Method::tabu(),
            spectral_tol: DEFAULT_SPECTRAL_TOL,
            spectral_max_iters: DEFAULT_SPECTRAL_ITERS,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PolblogsFit {
    pub method: &'static str,
    pub criterion: CriterionKind,
    pub ari: f64,
    /// Spectral runs only.
    pub converged: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct PolblogsReport {
    pub nodes: usize,
    pub edges: usize,
    pub loops_removed: usize,
    pub degrees: DegreeSummary,
    pub fits: Vec<PolblogsFit>,
}

impl PolblogsReport {
    pub fn ari(&self, method: &str, criterion: CriterionKind) -> Option<f64> {
        self.fits
            .iter()
            .find(|f| f.method == method && f.criterion == criterion)
            .map(|f| f.ari)
    }
}

/// Loads the GML file, keeping the largest connected component of the
/// simplified undirected graph. Every node must carry a `value` label.
pub fn load_polblogs(path: &Path) -> Result<(Graph, Labeling, usize)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let gml = load_gml_subset(&text)?;
    let labels = gml.labels.ok_or_else(|| {
        Error::validation("every node needs a `value` attribute with its community")
    })?;
    let loops = gml.graph.loop_count();
    let (graph, nodes) = largest_connected_component(&gml.graph.without_loops());
    Ok((graph, labels.restrict(&nodes), loops))
}

/// Fits two communities with all four criteria by tabu search and with both
/// modularities by spectral bisection, scoring each against the labels.
pub fn run_polblogs(path: &Path, cfg: &PolblogsConfig) -> Result<PolblogsReport> {
    let (graph, labels, loops_removed) = load_polblogs(path)?;
    let degrees = degree_summary(&graph.degrees())?;
    let mut fits = Vec::new();
    for (ci, kind) in CriterionKind::ALL.into_iter().enumerate() {
        let found = detect(
            &graph,
            2,
            kind,
            &cfg.tabu,
            derive_seed(cfg.seed, &[ci as u64]),
        )?;
        fits.push(PolblogsFit {
            method: "tabu",
            criterion: kind,
            ari: adjusted_rand(found.as_slice(), labels.as_slice())?,
            converged: None,
        });
    }
    for (ci, kind) in [CriterionKind::Erm, CriterionKind::Ngm]
        .into_iter()
        .enumerate()
    {
        let res = spectral_bisect(
            &graph,
            kind,
            cfg.spectral_tol,
            cfg.spectral_max_iters,
            derive_seed(cfg.seed, &[10 + ci as u64]),
        )?;
        fits.push(PolblogsFit {
            method: "spectral",
            criterion: kind,
            ari: adjusted_rand(res.labeling.as_slice(), labels.as_slice())?,
            converged: Some(res.converged),
        });
    }
    Ok(PolblogsReport {
        nodes: graph.n(),
        edges: graph.edge_count(),
        loops_removed,
        degrees,
        fits,
    })
}
