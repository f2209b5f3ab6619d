use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;

use crate::criteria::{evaluate, switch_gain, CriterionKind, LogTable};
use crate::error::{Error, Result};
use crate::graph::{block_stats, BlockStats, Graph, Labeling};
use crate::rng::{derive_seed, rng_from_seed};

/// Tabu search parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TabuConfig {
    /// Iterations a moved node stays tabu.
    pub tenure: usize,
    /// Moves per restart.
    pub max_iters: usize,
    /// Consecutive moves without a new best before a restart stops.
    pub max_stall: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl TabuConfig {
    /// Defaults for a graph with `n` nodes: tenure `max(10, n/100)`, 20
    /// restarts, `100n` iterations, stall limit `5n`.
    pub fn for_nodes(n: usize, seed: u64) -> Self {
        Self {
            tenure: (n / 100).max(10),
            max_iters: (100 * n).max(1),
            max_stall: (5 * n).max(1),
            restarts: 20,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tenure < 1 {
            return Err(Error::validation("tabu tenure must be at least 1"));
        }
        if self.restarts < 1 {
            return Err(Error::validation("at least one restart is required"));
        }
        if self.max_stall > self.max_iters {
            return Err(Error::validation(format!(
                "max_stall ({}) exceeds max_iters ({})",
                self.max_stall, self.max_iters
            )));
        }
        Ok(())
    }
}

/// Outcome of a search.
#[derive(Clone, Debug)]
pub struct SearchResult {
    pub labeling: Labeling,
    /// Criterion value of `labeling`, recomputed from scratch.
    pub score: f64,
    /// Best score seen after each iteration of the winning restart.
    pub trace: Vec<f64>,
    pub best_restart: usize,
}

/// Maximizes `kind` over labelings into `k` communities by tabu search.
/// Graphs without edges are rejected for every criterion.
///
/// Each restart draws uniform random labels and a random node order. Every
/// iteration evaluates all single-node relabelings and applies the best one,
/// even when it lowers the score. A moved node is tabu for `tenure`
/// iterations unless moving it would beat the best score so far. Restarts are
/// independent; the best one wins, ties going to the lowest restart index.
pub fn tabu_search(
    g: &Graph,
    k: usize,
    kind: CriterionKind,
    cfg: &TabuConfig,
) -> Result<SearchResult> {
    cfg.validate()?;
    let n = g.n();
    if k == 0 {
        return Err(Error::validation("K must be at least 1"));
    }
    if k > n {
        return Err(Error::validation(format!(
            "K = {k} exceeds the node count n = {n}"
        )));
    }
    // without edges every labeling ties, so there is nothing to detect
    if g.total_degree() == 0 {
        return Err(Error::EmptyGraph);
    }

    let runs: Vec<Result<(Labeling, f64, Vec<f64>)>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_restart(g, k, kind, cfg, r))
        .collect();

    let mut best: Option<SearchResult> = None;
    for (r, run) in runs.into_iter().enumerate() {
        let (labeling, score, trace) = run?;
        if best.as_ref().map_or(true, |b| score > b.score) {
            best = Some(SearchResult {
                labeling,
                score,
                trace,
                best_restart: r,
            });
        }
    }
    Ok(best.expect("at least one restart"))
}

struct SearchState<'g> {
    g: &'g Graph,
    k: usize,
    labels: Vec<usize>,
    /// Row-major `n × k`: neighbors of each node per community, loops excluded.
    neighbor_counts: Vec<i64>,
    loops: Vec<i64>,
    stats: BlockStats,
    logs: LogTable,
}

impl<'g> SearchState<'g> {
    fn new(g: &'g Graph, k: usize, labels: Vec<usize>) -> Result<Self> {
        let n = g.n();
        let mut neighbor_counts = vec![0i64; n * k];
        let mut loops = vec![0i64; n];
        for i in 0..n {
            for &j in g.neighbors(i) {
                if j == i {
                    loops[i] = 1;
                } else {
                    neighbor_counts[i * k + labels[j]] += 1;
                }
            }
        }
        let stats = block_stats(g, &Labeling::new(labels.clone(), k)?)?;
        Ok(Self {
            g,
            k,
            labels,
            neighbor_counts,
            loops,
            stats,
            logs: LogTable::new(g.total_degree(), n),
        })
    }

    fn gain(&self, kind: CriterionKind, node: usize, to: usize) -> f64 {
        let k = self.k;
        switch_gain(
            kind,
            &self.stats,
            self.labels[node],
            to,
            &self.neighbor_counts[node * k..(node + 1) * k],
            self.loops[node],
            self.g.degree(node) as i64,
            &self.logs,
        )
    }

    fn relabel(&mut self, node: usize, to: usize) {
        let k = self.k;
        let from = self.labels[node];
        self.stats.move_node(
            from,
            to,
            &self.neighbor_counts[node * k..(node + 1) * k],
            self.loops[node],
            self.g.degree(node) as i64,
        );
        self.labels[node] = to;
        for &j in self.g.neighbors(node) {
            if j != node {
                self.neighbor_counts[j * k + from] -= 1;
                self.neighbor_counts[j * k + to] += 1;
            }
        }
    }
}

fn run_restart(
    g: &Graph,
    k: usize,
    kind: CriterionKind,
    cfg: &TabuConfig,
    restart: usize,
) -> Result<(Labeling, f64, Vec<f64>)> {
    let n = g.n();
    let mut rng = rng_from_seed(derive_seed(cfg.seed, &[restart as u64]));
    let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);

    let mut state = SearchState::new(g, k, labels)?;
    let mut score = evaluate(kind, &state.stats)?;
    let mut best = score;
    let mut best_labels = state.labels.clone();
    let mut tabu_until = vec![0usize; n];
    let mut trace = Vec::new();
    let mut stall = 0usize;

    if k > 1 {
        for iter in 1..=cfg.max_iters {
            let mut choice: Option<(usize, usize, f64)> = None;
            for &node in &order {
                let tabu = tabu_until[node] > iter;
                let from = state.labels[node];
                for to in (0..k).filter(|&to| to != from) {
                    let gain = state.gain(kind, node, to);
                    if tabu && !(score + gain > best) {
                        continue;
                    }
                    if choice.map_or(true, |(_, _, g)| gain > g) {
                        choice = Some((node, to, gain));
                    }
                }
            }
            match choice {
                Some((node, to, _)) => {
                    state.relabel(node, to);
                    tabu_until[node] = iter + cfg.tenure + 1;
                    // rescoring from the integer statistics keeps the score free of drift
                    score = evaluate(kind, &state.stats)?;
                    if score > best {
                        best = score;
                        best_labels.copy_from_slice(&state.labels);
                        stall = 0;
                    } else {
                        stall += 1;
                    }
                }
                // every node is tabu; wait for the oldest to be released
                None => stall += 1,
            }
            trace.push(best);
            if stall >= cfg.max_stall {
                break;
            }
        }
    }

    let labeling = Labeling::new(best_labels, k)?;
    let score = evaluate(kind, &block_stats(g, &labeling)?)?;
    Ok((labeling, score, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> Graph {
        Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()
    }

    #[test]
    fn default_config() {
        let cfg = TabuConfig::for_nodes(2000, 0);
        assert_eq!(
            (cfg.tenure, cfg.restarts, cfg.max_iters, cfg.max_stall),
            (20, 20, 200_000, 10_000)
        );
        assert_eq!(TabuConfig::for_nodes(300, 0).tenure, 10);
    }

    #[test]
    fn config_validation() {
        let mut cfg = TabuConfig::for_nodes(10, 0);
        cfg.max_stall = cfg.max_iters + 1;
        assert!(cfg.validate().is_err());
        let cfg = TabuConfig {
            restarts: 0,
            ..TabuConfig::for_nodes(10, 0)
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn splits_two_triangles() {
        let g = two_triangles();
        let res = tabu_search(&g, 2, CriterionKind::Ngm, &TabuConfig::for_nodes(6, 5)).unwrap();
        assert!((res.score - 6.0).abs() < 1e-12);
        let l = res.labeling.as_slice();
        assert!(l[0] == l[1] && l[1] == l[2] && l[3] == l[4] && l[4] == l[5] && l[0] != l[3]);
    }

    #[test]
    fn single_community() {
        let g = two_triangles();
        let res = tabu_search(&g, 1, CriterionKind::Erm, &TabuConfig::for_nodes(6, 1)).unwrap();
        assert_eq!(res.score, 0.0);
        assert!(res.labeling.as_slice().iter().all(|&l| l == 0));
    }

    #[test]
    fn too_many_communities() {
        let g = two_triangles();
        assert!(tabu_search(&g, 7, CriterionKind::Bm, &TabuConfig::for_nodes(6, 1)).is_err());
        for kind in CriterionKind::ALL {
            assert!(matches!(
                tabu_search(&Graph::empty(4), 2, kind, &TabuConfig::for_nodes(4, 1)),
                Err(Error::EmptyGraph)
            ));
        }
    }

    #[test]
    fn trace_is_monotone_and_seeded() {
        let g = Graph::from_edges(
            10,
            [
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 0),
                (5, 6),
                (6, 7),
                (7, 8),
                (8, 9),
                (9, 5),
                (0, 5),
                (2, 2),
            ],
        )
        .unwrap();
        let cfg = TabuConfig::for_nodes(10, 42);
        let a = tabu_search(&g, 2, CriterionKind::Dcbm, &cfg).unwrap();
        assert!(a.trace.windows(2).all(|w| w[1] >= w[0]));
        let b = tabu_search(&g, 2, CriterionKind::Dcbm, &cfg).unwrap();
        assert_eq!(a.labeling, b.labeling);
        assert_eq!(a.score, b.score);
        assert_eq!(a.trace, b.trace);
    }
}
