//! Sparse undirected binary graphs, node labelings, and block statistics.
//!
//! Adjacency is stored as sorted neighbor lists in a single CSR buffer. A
//! self-loop appears once in its node's list, so it contributes 1 to the
//! node degree and 1 to the total degree `L = Σ_ij A_ij`.

mod io;
mod stats;

pub use io::{load_edge_list, load_gml_subset, load_indexed_edge_list, write_edge_list, GmlGraph};
pub use stats::{apply_switch, block_stats, BlockStats, StatsDelta};

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// An immutable undirected graph with binary adjacency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    total_degree: usize,
}

impl Graph {
    /// Builds a graph on `n` nodes. Edges are symmetrized and duplicates collapse.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut lists: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (u, v) in edges {
            for node in [u, v] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { node, n });
                }
            }
            lists[u].push(v);
            if u != v {
                lists[v].push(u);
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::new();
        offsets.push(0);
        for mut list in lists {
            list.sort_unstable();
            list.dedup();
            neighbors.extend_from_slice(&list);
            offsets.push(neighbors.len());
        }
        let total_degree = neighbors.len();
        Ok(Self {
            offsets,
            neighbors,
            total_degree,
        })
    }

    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Self {
            offsets: vec![0; n + 1],
            neighbors: Vec::new(),
            total_degree: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Sorted neighbors of `node`, including `node` itself when it has a loop.
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.neighbors[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|i| self.degree(i)).collect()
    }

    /// `L`, the sum of all degrees.
    pub fn total_degree(&self) -> usize {
        self.total_degree
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn has_loop(&self, node: usize) -> bool {
        self.has_edge(node, node)
    }

    pub fn loop_count(&self) -> usize {
        (0..self.n()).filter(|&i| self.has_loop(i)).count()
    }

    /// Number of undirected edges, loops included.
    pub fn edge_count(&self) -> usize {
        let loops = self.loop_count();
        (self.total_degree - loops) / 2 + loops
    }

    /// Each undirected edge once, as `(u, v)` with `u <= v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v >= u)
                .map(move |v| (u, v))
        })
    }

    /// The same graph with every self-loop removed.
    pub fn without_loops(&self) -> Graph {
        let edges: Vec<_> = self.edges().filter(|&(u, v)| u != v).collect();
        Graph::from_edges(self.n(), edges).expect("indices are in range by construction")
    }

    /// Connected component id per node, numbered in order of smallest member.
    pub fn connected_components(&self) -> Vec<usize> {
        let n = self.n();
        let mut comp = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        let mut next = 0;
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = next;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &v in self.neighbors(u) {
                    if comp[v] == usize::MAX {
                        comp[v] = next;
                        queue.push_back(v);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// Subgraph induced by `nodes` (given in the order they should be reindexed).
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n()];
        for (new, &old) in nodes.iter().enumerate() {
            index[old] = new;
        }
        let edges: Vec<(usize, usize)> = nodes
            .iter()
            .enumerate()
            .flat_map(|(new_u, &old_u)| {
                let index = &index;
                self.neighbors(old_u).iter().filter_map(move |&old_v| {
                    let new_v = index[old_v];
                    (new_v != usize::MAX && new_v >= new_u).then_some((new_u, new_v))
                })
            })
            .collect();
        Graph::from_edges(nodes.len(), edges).expect("indices are in range by construction")
    }
}

/// Induced subgraph on the largest connected component, plus the map from new
/// node index to original node index. Ties go to the component containing the
/// smallest original index.
pub fn largest_connected_component(g: &Graph) -> (Graph, Vec<usize>) {
    let comp = g.connected_components();
    let count = comp.iter().copied().max().map_or(0, |c| c + 1);
    let mut sizes = vec![0usize; count];
    for &c in &comp {
        sizes[c] += 1;
    }
    // components are numbered by smallest member, so the first maximum wins ties
    let best = sizes
        .iter()
        .enumerate()
        .fold(None, |acc: Option<(usize, usize)>, (c, &s)| match acc {
            Some((_, bs)) if bs >= s => acc,
            _ => Some((c, s)),
        })
        .map(|(c, _)| c);
    let Some(best) = best else {
        return (Graph::empty(0), Vec::new());
    };
    let nodes: Vec<usize> = (0..g.n()).filter(|&i| comp[i] == best).collect();
    (g.induced_subgraph(&nodes), nodes)
}

/// Assignment of nodes to communities `0..k`.
///
/// Community indices are 0-based in memory; label files and the CLI use `1..=K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Labeling {
    labels: Vec<usize>,
    k: usize,
}

impl Labeling {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&label) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::LabelOutOfRange { label, k });
        }
        Ok(Self { labels, k })
    }

    /// Uses `max label + 1` as `k`.
    pub fn from_labels(labels: Vec<usize>) -> Self {
        let k = labels.iter().copied().max().map_or(1, |m| m + 1);
        Self { labels, k }
    }

    /// Every node in community 0.
    pub fn constant(n: usize, k: usize) -> Self {
        Self {
            labels: vec![0; n],
            k: k.max(1),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.labels
    }

    pub fn get(&self, node: usize) -> usize {
        self.labels[node]
    }

    pub fn set(&mut self, node: usize, label: usize) -> Result<()> {
        if label >= self.k {
            return Err(Error::LabelOutOfRange { label, k: self.k });
        }
        self.labels[node] = label;
        Ok(())
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.labels
    }

    /// Community sizes `n_k`.
    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.k];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Labels of the listed nodes, e.g. with the map from [`largest_connected_component`].
    pub fn restrict(&self, nodes: &[usize]) -> Labeling {
        Labeling {
            labels: nodes.iter().map(|&i| self.labels[i]).collect(),
            k: self.k,
        }
    }

    /// Applies `perm[old] = new` to every label.
    pub fn permuted(&self, perm: &[usize]) -> Result<Labeling> {
        if perm.len() != self.k {
            return Err(Error::LengthMismatch {
                expected: self.k,
                actual: perm.len(),
            });
        }
        Labeling::new(self.labels.iter().map(|&l| perm[l]).collect(), self.k)
    }

    /// Parses one 1-based integer label per line; blank and `#` lines are skipped.
    pub fn parse(text: &str) -> Result<Labeling> {
        let mut labels = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let value: usize = line.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("expected a positive integer label, found {line:?}"),
            })?;
            if value == 0 {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: "labels are 1-based".into(),
                });
            }
            labels.push(value - 1);
        }
        if labels.is_empty() {
            return Err(Error::EmptyInput("label file"));
        }
        Ok(Labeling::from_labels(labels))
    }

    /// One 1-based label per line.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.labels.len() * 2);
        for &l in &self.labels {
            out.push_str(&(l + 1).to_string());
            out.push('\n');
        }
        out
    }
}
