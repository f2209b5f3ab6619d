#![allow(dead_code)]

use dcsbm::criteria::{evaluate, CriterionKind};
use dcsbm::graph::{block_stats, Graph, Labeling};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Erdős–Rényi graph with independent loops, for test inputs.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i..n {
            let q = if i == j { p / 4.0 } else { p };
            if rng.gen::<f64>() < q {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

pub fn random_labels(n: usize, k: usize, seed: u64) -> Labeling {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Labeling::new((0..n).map(|_| rng.gen_range(0..k)).collect(), k).unwrap()
}

/// Best score over all `k^n` labelings, recomputing the statistics from
/// scratch for each one.
pub fn exhaustive_max(g: &Graph, k: usize, kind: CriterionKind) -> f64 {
    let n = g.n();
    let total = (k as u64).pow(n as u32);
    let mut best = f64::NEG_INFINITY;
    let mut labels = vec![0usize; n];
    for code in 0..total {
        let mut c = code;
        for l in labels.iter_mut() {
            *l = (c % k as u64) as usize;
            c /= k as u64;
        }
        let e = Labeling::new(labels.clone(), k).unwrap();
        let v = evaluate(kind, &block_stats(g, &e).unwrap()).unwrap();
        if v > best {
            best = v;
        }
    }
    best
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}
