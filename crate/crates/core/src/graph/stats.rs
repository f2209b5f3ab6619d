use super::{Graph, Labeling};
use crate::error::{Error, Result};

/// Sufficient statistics of a labeled graph: `O`, `O_k`, `n_k`, `L` and `n`.
///
/// `O_kl = Σ_ij A_ij I(e_i = k, e_j = l)` over ordered pairs, so each non-loop
/// edge inside community `k` adds 2 to `O_kk` and each cross edge adds 1 to
/// both `O_kl` and `O_lk`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockStats {
    k: usize,
    n: usize,
    total: i64,
    o: Vec<i64>,
    o_row: Vec<i64>,
    counts: Vec<i64>,
}

/// Change to [`BlockStats`] caused by moving one node between communities.
///
/// Stores the node's neighbor counts per community (loop excluded), its loop
/// indicator and its degree; every affected entry of `O` follows from these.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatsDelta {
    pub node: usize,
    pub from_label: usize,
    pub to_label: usize,
    pub neighbor_counts: Vec<i64>,
    pub self_loop: i64,
    pub degree: i64,
}

impl StatsDelta {
    /// The delta that undoes this one.
    pub fn inverse(&self) -> StatsDelta {
        StatsDelta {
            from_label: self.to_label,
            to_label: self.from_label,
            ..self.clone()
        }
    }
}

/// Computes `O(e)`, `O_k(e)`, `n_k(e)`, `L` and `n`.
pub fn block_stats(g: &Graph, e: &Labeling) -> Result<BlockStats> {
    if e.len() != g.n() {
        return Err(Error::LengthMismatch {
            expected: g.n(),
            actual: e.len(),
        });
    }
    let k = e.k();
    let mut stats = BlockStats::zeros(k, g.n());
    stats.total = g.total_degree() as i64;
    for i in 0..g.n() {
        let a = e.get(i);
        stats.counts[a] += 1;
        stats.o_row[a] += g.degree(i) as i64;
        for &j in g.neighbors(i) {
            stats.o[a * k + e.get(j)] += 1;
        }
    }
    Ok(stats)
}

/// Delta for relabeling `node` to `to_label`; costs `O(d_node + K)`.
pub fn apply_switch(
    stats: &BlockStats,
    g: &Graph,
    e: &Labeling,
    node: usize,
    to_label: usize,
) -> Result<StatsDelta> {
    if to_label >= stats.k {
        return Err(Error::LabelOutOfRange {
            label: to_label,
            k: stats.k,
        });
    }
    if node >= g.n() {
        return Err(Error::NodeOutOfRange { node, n: g.n() });
    }
    if e.k() != stats.k || e.len() != stats.n {
        return Err(Error::MismatchedDelta(
            "labeling does not match block statistics".into(),
        ));
    }
    let from_label = e.get(node);
    if from_label == to_label {
        return Err(Error::MismatchedDelta(format!(
            "node {node} already has label {to_label}"
        )));
    }
    let mut neighbor_counts = vec![0i64; stats.k];
    let mut self_loop = 0;
    for &j in g.neighbors(node) {
        if j == node {
            self_loop = 1;
        } else {
            neighbor_counts[e.get(j)] += 1;
        }
    }
    Ok(StatsDelta {
        node,
        from_label,
        to_label,
        neighbor_counts,
        self_loop,
        degree: g.degree(node) as i64,
    })
}

impl BlockStats {
    pub(crate) fn zeros(k: usize, n: usize) -> Self {
        Self {
            k,
            n,
            total: 0,
            o: vec![0; k * k],
            o_row: vec![0; k],
            counts: vec![0; k],
        }
    }

    /// Builds stats from raw parts, checking the invariants.
    pub fn from_parts(o: Vec<i64>, counts: Vec<i64>, n: usize) -> Result<Self> {
        let k = counts.len();
        if o.len() != k * k {
            return Err(Error::LengthMismatch {
                expected: k * k,
                actual: o.len(),
            });
        }
        if o.iter().chain(&counts).any(|&v| v < 0) {
            return Err(Error::validation("block statistics must be nonnegative"));
        }
        for a in 0..k {
            for b in 0..a {
                if o[a * k + b] != o[b * k + a] {
                    return Err(Error::validation("O must be symmetric"));
                }
            }
        }
        if counts.iter().sum::<i64>() != n as i64 {
            return Err(Error::validation("community sizes must sum to n"));
        }
        let o_row: Vec<i64> = (0..k).map(|a| o[a * k..(a + 1) * k].iter().sum()).collect();
        let total = o_row.iter().sum();
        Ok(Self {
            k,
            n,
            total,
            o,
            o_row,
            counts,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `L`.
    pub fn total_degree(&self) -> i64 {
        self.total
    }

    pub fn o(&self, a: usize, b: usize) -> i64 {
        self.o[a * self.k + b]
    }

    /// `O` in row-major order.
    pub fn o_matrix(&self) -> &[i64] {
        &self.o
    }

    /// `O_k = Σ_l O_kl`, the total degree of community `k`.
    pub fn o_row(&self) -> &[i64] {
        &self.o_row
    }

    /// `n_k`.
    pub fn counts(&self) -> &[i64] {
        &self.counts
    }

    /// `f(e) = n_k / n`.
    pub fn fractions(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.n as f64)
            .collect()
    }

    /// Stats after relabeling communities with `perm[old] = new`.
    pub fn permuted(&self, perm: &[usize]) -> BlockStats {
        let k = self.k;
        let mut out = BlockStats::zeros(k, self.n);
        out.total = self.total;
        for a in 0..k {
            out.o_row[perm[a]] = self.o_row[a];
            out.counts[perm[a]] = self.counts[a];
            for b in 0..k {
                out.o[perm[a] * k + perm[b]] = self.o[a * k + b];
            }
        }
        out
    }

    pub fn apply(&mut self, delta: &StatsDelta) -> Result<()> {
        self.check_delta(delta)?;
        self.shift(delta, 1);
        Ok(())
    }

    pub fn revert(&mut self, delta: &StatsDelta) -> Result<()> {
        self.check_delta(delta)?;
        self.shift(delta, -1);
        Ok(())
    }

    fn check_delta(&self, delta: &StatsDelta) -> Result<()> {
        if delta.neighbor_counts.len() != self.k
            || delta.from_label >= self.k
            || delta.to_label >= self.k
        {
            return Err(Error::MismatchedDelta(format!(
                "delta built for a different K (stats have K={})",
                self.k
            )));
        }
        Ok(())
    }

    fn shift(&mut self, delta: &StatsDelta, sign: i64) {
        let (from, to) = if sign > 0 {
            (delta.from_label, delta.to_label)
        } else {
            (delta.to_label, delta.from_label)
        };
        self.move_node(
            from,
            to,
            &delta.neighbor_counts,
            delta.self_loop,
            delta.degree,
        );
    }

    /// Moves one node from `from` to `to` given its per-community neighbor counts.
    pub(crate) fn move_node(
        &mut self,
        from: usize,
        to: usize,
        neighbor_counts: &[i64],
        self_loop: i64,
        degree: i64,
    ) {
        let k = self.k;
        for (c, &m) in neighbor_counts.iter().enumerate() {
            if m == 0 {
                continue;
            }
            self.o[from * k + c] -= m;
            self.o[c * k + from] -= m;
            self.o[to * k + c] += m;
            self.o[c * k + to] += m;
        }
        self.o[from * k + from] -= self_loop;
        self.o[to * k + to] += self_loop;
        self.o_row[from] -= degree;
        self.o_row[to] += degree;
        self.counts[from] -= 1;
        self.counts[to] += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn path_block_stats_by_hand() {
        let e = Labeling::new(vec![0, 0, 1], 2).unwrap();
        let s = block_stats(&path3(), &e).unwrap();
        assert_eq!(s.o_matrix(), &[2, 1, 1, 0]);
        assert_eq!(s.o_row(), &[3, 1]);
        assert_eq!(s.counts(), &[2, 1]);
        assert_eq!(s.total_degree(), 4);
        assert_eq!(s.n(), 3);
    }

    #[test]
    fn single_community_gives_total_degree() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 2), (0, 3)]).unwrap();
        let s = block_stats(&g, &Labeling::constant(4, 1)).unwrap();
        assert_eq!(s.o_matrix(), &[g.total_degree() as i64]);
    }

    #[test]
    fn empty_graph_has_zero_o() {
        let s = block_stats(&Graph::empty(2), &Labeling::new(vec![0, 1], 2).unwrap()).unwrap();
        assert_eq!(s.o_matrix(), &[0, 0, 0, 0]);
        assert_eq!(s.counts(), &[1, 1]);
    }

    #[test]
    fn switch_matches_recompute() {
        let g = path3();
        let mut e = Labeling::new(vec![0, 0, 1], 2).unwrap();
        let mut s = block_stats(&g, &e).unwrap();
        let d = apply_switch(&s, &g, &e, 2, 0).unwrap();
        s.apply(&d).unwrap();
        e.set(2, 0).unwrap();
        assert_eq!(s.o_matrix(), &[4, 0, 0, 0]);
        assert_eq!(s, block_stats(&g, &e).unwrap());
    }

    #[test]
    fn switch_then_revert_is_identity() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 2), (2, 3)]).unwrap();
        let e = Labeling::new(vec![0, 1, 1, 2], 3).unwrap();
        let s0 = block_stats(&g, &e).unwrap();
        let mut s = s0.clone();
        let d = apply_switch(&s, &g, &e, 2, 0).unwrap();
        s.apply(&d).unwrap();
        assert_ne!(s, s0);
        s.revert(&d).unwrap();
        assert_eq!(s, s0);
        s.apply(&d).unwrap();
        s.apply(&d.inverse()).unwrap();
        assert_eq!(s, s0);
    }

    #[test]
    fn isolated_switch_only_moves_counts() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let e = Labeling::new(vec![0, 0, 1], 2).unwrap();
        let mut s = block_stats(&g, &e).unwrap();
        let before = s.o_matrix().to_vec();
        let d = apply_switch(&s, &g, &e, 2, 0).unwrap();
        s.apply(&d).unwrap();
        assert_eq!(s.o_matrix(), &before[..]);
        assert_eq!(s.counts(), &[3, 0]);
    }

    #[test]
    fn switch_errors() {
        let g = path3();
        let e = Labeling::new(vec![0, 0, 1], 2).unwrap();
        let s = block_stats(&g, &e).unwrap();
        assert!(matches!(
            apply_switch(&s, &g, &e, 0, 2),
            Err(Error::LabelOutOfRange { .. })
        ));
        assert!(apply_switch(&s, &g, &e, 0, 0).is_err());
        let wrong_k = BlockStats::zeros(3, 3);
        let d = apply_switch(&s, &g, &e, 0, 1).unwrap();
        assert!(wrong_k.clone().apply(&d).is_err());
    }

    #[test]
    fn from_parts_validates() {
        assert!(BlockStats::from_parts(vec![2, 1, 1, 0], vec![2, 1], 3).is_ok());
        assert!(BlockStats::from_parts(vec![2, 1, 0, 0], vec![2, 1], 3).is_err());
        assert!(BlockStats::from_parts(vec![2, 1, 1, 0], vec![2, 2], 3).is_err());
    }
}
