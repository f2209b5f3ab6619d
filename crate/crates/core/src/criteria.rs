//! The four community-detection criteria, evaluated from [`BlockStats`].
//!
//! | | block model | degree-corrected |
//! |---|---|---|
//! | modularity | ERM: `Σ_k (O_kk − (n_k/n)² L)` | NGM: `Σ_k (O_kk − O_k²/L)` |
//! | likelihood | BM: `Σ_kl O_kl ln(O_kl/(n_k n_l))` | DCBM: `Σ_kl O_kl ln(O_kl/(O_k O_l))` |
//!
//! Degree correction replaces the community weight `n_k` by `O_k` (and `n` by
//! `L`), so each pair shares one evaluator parameterized by the weights.
//! Terms with `O_kl = 0` contribute 0. Scores are not normalized by `L`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{BlockStats, StatsDelta};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CriterionKind {
    /// Erdős–Rényi modularity.
    Erm,
    /// Newman–Girvan modularity.
    Ngm,
    /// Block-model profile likelihood.
    Bm,
    /// Degree-corrected block-model profile likelihood.
    Dcbm,
}

impl CriterionKind {
    pub const ALL: [CriterionKind; 4] = [
        CriterionKind::Erm,
        CriterionKind::Ngm,
        CriterionKind::Bm,
        CriterionKind::Dcbm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CriterionKind::Erm => "erm",
            CriterionKind::Ngm => "ngm",
            CriterionKind::Bm => "bm",
            CriterionKind::Dcbm => "dcbm",
        }
    }

    pub fn is_modularity(self) -> bool {
        matches!(self, CriterionKind::Erm | CriterionKind::Ngm)
    }

    /// Whether the criterion divides by `L`.
    pub fn requires_edges(self) -> bool {
        matches!(self, CriterionKind::Ngm | CriterionKind::Dcbm)
    }
}

impl fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CriterionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "erm" => Ok(CriterionKind::Erm),
            "ngm" => Ok(CriterionKind::Ngm),
            "bm" => Ok(CriterionKind::Bm),
            "dcbm" => Ok(CriterionKind::Dcbm),
            other => Err(Error::validation(format!(
                "unknown criterion {other:?} (expected erm, ngm, bm or dcbm)"
            ))),
        }
    }
}

/// `x ln x` with `0 ln 0 = 0`.
#[inline]
pub(crate) fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// Source of `x ln x` and `ln x` at nonnegative integers.
pub(crate) trait IntLogs {
    fn xlogx(&self, x: i64) -> f64;
    fn ln(&self, x: i64) -> f64;
}

/// Computes logarithms on demand.
pub(crate) struct DirectLogs;

impl IntLogs for DirectLogs {
    #[inline]
    fn xlogx(&self, x: i64) -> f64 {
        xlogx(x as f64)
    }

    #[inline]
    fn ln(&self, x: i64) -> f64 {
        (x as f64).ln()
    }
}

/// Precomputed `x ln x` for `0..=max_total` and `ln x` for `0..=max_count`.
/// Block totals never exceed `L` and community sizes never exceed `n`, so
/// gains during a search on a fixed graph need no transcendental calls.
pub(crate) struct LogTable {
    xlogx: Vec<f64>,
    ln: Vec<f64>,
}

impl LogTable {
    pub(crate) fn new(max_total: usize, max_count: usize) -> Self {
        Self {
            xlogx: (0..=max_total).map(|x| xlogx(x as f64)).collect(),
            ln: (0..=max_count).map(|x| (x as f64).ln()).collect(),
        }
    }
}

impl IntLogs for LogTable {
    #[inline]
    fn xlogx(&self, x: i64) -> f64 {
        self.xlogx[x as usize]
    }

    #[inline]
    fn ln(&self, x: i64) -> f64 {
        self.ln[x as usize]
    }
}

/// `Σ_k (O_kk − (w_k / W)² L)`.
pub fn modularity_with_weights(stats: &BlockStats, weights: &[f64], total_weight: f64) -> f64 {
    let l = stats.total_degree() as f64;
    (0..stats.k())
        .map(|k| {
            let share = weights[k] / total_weight;
            stats.o(k, k) as f64 - share * share * l
        })
        .sum()
}

/// `Σ_kl O_kl ln(O_kl / (w_k w_l))`.
pub fn likelihood_with_weights(stats: &BlockStats, weights: &[f64]) -> f64 {
    let k = stats.k();
    let mut total = 0.0;
    for a in 0..k {
        for b in 0..k {
            let o = stats.o(a, b) as f64;
            if o > 0.0 {
                total += o * (o / (weights[a] * weights[b])).ln();
            }
        }
    }
    total
}

/// Score of `kind` on `stats`.
pub fn evaluate(kind: CriterionKind, stats: &BlockStats) -> Result<f64> {
    if kind.requires_edges() && stats.total_degree() == 0 {
        return Err(Error::EmptyGraph);
    }
    let counts: Vec<f64> = stats.counts().iter().map(|&c| c as f64).collect();
    let o_row: Vec<f64> = stats.o_row().iter().map(|&c| c as f64).collect();
    Ok(match kind {
        CriterionKind::Erm => modularity_with_weights(stats, &counts, stats.n() as f64),
        CriterionKind::Ngm => {
            let l = stats.total_degree() as f64;
            (0..stats.k())
                .map(|k| stats.o(k, k) as f64 - o_row[k] * o_row[k] / l)
                .sum()
        }
        CriterionKind::Bm => likelihood_with_weights(stats, &counts),
        CriterionKind::Dcbm => likelihood_with_weights(stats, &o_row),
    })
}

/// `evaluate(kind, stats + delta) − evaluate(kind, stats)`, touching only the
/// two affected communities.
pub fn evaluate_delta(kind: CriterionKind, stats: &BlockStats, delta: &StatsDelta) -> Result<f64> {
    let k = stats.k();
    if delta.neighbor_counts.len() != k || delta.from_label >= k || delta.to_label >= k {
        return Err(Error::MismatchedDelta(format!(
            "delta does not match stats with K={k}"
        )));
    }
    if delta.from_label == delta.to_label {
        return Ok(0.0);
    }
    let from = delta.from_label;
    let neighbors: i64 = delta.neighbor_counts.iter().sum();
    if stats.counts()[from] < 1
        || stats.o_row()[from] < delta.degree
        || neighbors + delta.self_loop != delta.degree
    {
        return Err(Error::MismatchedDelta(
            "delta is inconsistent with the block statistics".into(),
        ));
    }
    if kind.requires_edges() && stats.total_degree() == 0 {
        return Err(Error::EmptyGraph);
    }
    Ok(switch_gain(
        kind,
        stats,
        from,
        delta.to_label,
        &delta.neighbor_counts,
        delta.self_loop,
        delta.degree,
        &DirectLogs,
    ))
}

/// Score change from moving a node with the given neighbor counts, loop
/// indicator and degree from `from` to `to`. Inputs are trusted.
#[inline]
pub(crate) fn switch_gain(
    kind: CriterionKind,
    stats: &BlockStats,
    from: usize,
    to: usize,
    neighbor_counts: &[i64],
    self_loop: i64,
    degree: i64,
    logs: &impl IntLogs,
) -> f64 {
    let (a, b) = (from, to);
    let (ma, mb) = (neighbor_counts[a], neighbor_counts[b]);
    match kind {
        CriterionKind::Erm => {
            let n = stats.n() as f64;
            let l = stats.total_degree() as f64;
            let counts = stats.counts();
            let within = 2 * (mb - ma);
            let sizes = 2 * (counts[b] - counts[a] + 1);
            within as f64 - l / (n * n) * sizes as f64
        }
        CriterionKind::Ngm => {
            let l = stats.total_degree() as f64;
            let o_row = stats.o_row();
            let within = 2 * (mb - ma);
            let squares = 2 * degree * (o_row[b] - o_row[a]) + 2 * degree * degree;
            within as f64 - squares as f64 / l
        }
        CriterionKind::Bm | CriterionKind::Dcbm => {
            let phi = |x: i64| logs.xlogx(x);
            let mut entropy = 0.0;
            for (c, &m) in neighbor_counts.iter().enumerate() {
                if c == a || c == b || m == 0 {
                    continue;
                }
                let (oac, obc) = (stats.o(a, c), stats.o(b, c));
                entropy += 2.0 * (phi(oac - m) - phi(oac) + phi(obc + m) - phi(obc));
            }
            let (oaa, obb, oab) = (stats.o(a, a), stats.o(b, b), stats.o(a, b));
            entropy += phi(oaa - 2 * ma - self_loop) - phi(oaa);
            entropy += phi(obb + 2 * mb + self_loop) - phi(obb);
            entropy += 2.0 * (phi(oab + ma - mb) - phi(oab));

            let o_row = stats.o_row();
            let (oa, ob) = (o_row[a], o_row[b]);
            let weights = if kind == CriterionKind::Dcbm {
                phi(oa - degree) + phi(ob + degree) - phi(oa) - phi(ob)
            } else {
                let counts = stats.counts();
                let (na, nb) = (counts[a], counts[b]);
                let xlogn = |x: i64, n: i64| if x > 0 { x as f64 * logs.ln(n) } else { 0.0 };
                xlogn(oa - degree, na - 1) + xlogn(ob + degree, nb + 1)
                    - xlogn(oa, na)
                    - xlogn(ob, nb)
            };
            entropy - 2.0 * weights
        }
    }
}
