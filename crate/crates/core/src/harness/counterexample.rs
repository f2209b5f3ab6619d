//! The two-community model on which Erdős–Rényi modularity and the block
//! model likelihood prefer grouping nodes by degree over the true communities.

use crate::criteria::CriterionKind;
use crate::error::Result;
use crate::eval::adjusted_rand;
use crate::graph::Labeling;
use crate::models::sample_network;
use crate::optim::{tabu_search, TabuConfig};
use crate::population::{
    brute_force_population_max, counterexample_params, population_criterion, PopulationAssignment,
    PopulationMax, DEFAULT_GRID_BUDGET,
};
use crate::rng::derive_seed;

/// Settings for the finite-sample part of the check.
#[derive(Clone, Debug)]
pub struct CounterexampleConfig {
    pub n: usize,
    pub seeds: usize,
    /// Tabu restarts per network; the networks are dense, so a few suffice.
    pub restarts: usize,
    pub grid_resolution: usize,
    pub seed: u64,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        Self {
            n: 2000,
            seeds: 10,
            restarts: 2,
            grid_resolution: 10,
            seed: 0,
        }
    }
}

/// Agreement of a detected partition with the communities and with the
/// degree grouping.
#[derive(Clone, Debug)]
pub struct FiniteSampleOutcome {
    pub seed: u64,
    pub criterion: CriterionKind,
    pub ari_truth: f64,
    pub ari_theta: f64,
}

#[derive(Clone, Debug)]
pub struct CounterexampleReport {
    /// `(criterion, value at the truth, value at the degree grouping)`.
    pub population: Vec<(CriterionKind, f64, f64)>,
    pub grid: Vec<(CriterionKind, PopulationMax)>,
    pub finite: Vec<FiniteSampleOutcome>,
}

impl CounterexampleReport {
    pub fn population_value(&self, kind: CriterionKind) -> Option<(f64, f64)> {
        self.population
            .iter()
            .find(|(k, _, _)| *k == kind)
            .map(|&(_, truth, grouped)| (truth, grouped))
    }

    pub fn grid_result(&self, kind: CriterionKind) -> Option<&PopulationMax> {
        self.grid.iter().find(|(k, _)| *k == kind).map(|(_, r)| r)
    }

    /// Fraction of networks on which `kind` agrees more with the degree
    /// grouping than with the communities.
    pub fn theta_preference(&self, kind: CriterionKind) -> f64 {
        let runs: Vec<_> = self.finite.iter().filter(|o| o.criterion == kind).collect();
        if runs.is_empty() {
            return 0.0;
        }
        runs.iter().filter(|o| o.ari_theta > o.ari_truth).count() as f64 / runs.len() as f64
    }

    pub fn median_ari_truth(&self, kind: CriterionKind) -> Option<f64> {
        let v: Vec<f64> = self
            .finite
            .iter()
            .filter(|o| o.criterion == kind)
            .map(|o| o.ari_truth)
            .collect();
        super::experiment::median(&v)
    }
}

/// Population values at the truth and at the degree grouping for every
/// criterion, the grid oracle for every criterion, and ERM and BM fits to
/// sampled networks.
pub fn run_counterexample(cfg: &CounterexampleConfig) -> Result<CounterexampleReport> {
    let params = counterexample_params()?;
    let truth = PopulationAssignment::diagonal(&params)?;
    let grouped = PopulationAssignment::theta_grouped(&params)?;
    let (x, _) = params.joint_law()?;

    let mut population = Vec::new();
    let mut grid = Vec::new();
    for kind in CriterionKind::ALL {
        population.push((
            kind,
            population_criterion(kind, &truth, &params)?,
            population_criterion(kind, &grouped, &params)?,
        ));
        grid.push((
            kind,
            brute_force_population_max(kind, &params, cfg.grid_resolution, DEFAULT_GRID_BUDGET)?,
        ));
    }

    let mut finite = Vec::new();
    for s in 0..cfg.seeds {
        let seed = derive_seed(cfg.seed, &[s as u64]);
        let net = sample_network(&params, cfg.n, seed)?;
        let by_theta: Vec<usize> = net
            .theta
            .iter()
            .map(|&t| {
                x.iter()
                    .position(|&v| v == t)
                    .expect("theta drawn from its support")
            })
            .collect();
        let by_theta = Labeling::new(by_theta, 2)?;
        for (ci, kind) in [CriterionKind::Erm, CriterionKind::Bm]
            .into_iter()
            .enumerate()
        {
            let tabu = TabuConfig {
                restarts: cfg.restarts,
                ..TabuConfig::for_nodes(cfg.n, derive_seed(seed, &[1 + ci as u64]))
            };
            let found = tabu_search(&net.graph, 2, kind, &tabu)?.labeling;
            finite.push(FiniteSampleOutcome {
                seed,
                criterion: kind,
                ari_truth: adjusted_rand(found.as_slice(), net.labels.as_slice())?,
                ari_theta: adjusted_rand(found.as_slice(), by_theta.as_slice())?,
            });
        }
    }

    Ok(CounterexampleReport {
        population,
        grid,
        finite,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_reproduces_population_values() {
        let cfg = CounterexampleConfig {
            n: 200,
            seeds: 1,
            restarts: 1,
            ..Default::default()
        };
        let report = run_counterexample(&cfg).unwrap();
        let (truth, grouped) = report.population_value(CriterionKind::Erm).unwrap();
        assert!((truth - 0.0125).abs() <= 1e-12 && (grouped - 0.0135).abs() <= 1e-12);
        let (truth, grouped) = report.population_value(CriterionKind::Ngm).unwrap();
        assert!(truth > grouped);
        assert!(!report.grid_result(CriterionKind::Erm).unwrap().is_diagonal);
        assert_eq!(report.finite.len(), 2);
    }
}
