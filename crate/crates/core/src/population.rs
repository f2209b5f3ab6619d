//! Population versions of the criteria.
//!
//! A labeling `e` enters the block statistics only through the array
//! `R_kau(e) = (1/n) #{i : e_i = k, c_i = a, θ_i = x_u}`. Replacing the random
//! statistics by their expectations gives `O_kl / μ ≈ H_kl(R)` and
//! `n_k / n = h_k(R)`, with `μ = n² ρ`. Every criterion then becomes a function
//! `F(H(S), h(S))` over nonnegative arrays `S` whose column sums over `k` match
//! the joint law `Π` of `(c, θ)`. A criterion is consistent when that function
//! is uniquely maximized at the true assignment `𝔻_kau = I(k = a) Π_au`.

use rayon::prelude::*;

use crate::criteria::{xlogx, CriterionKind};
use crate::error::{Error, Result};
use crate::graph::{block_stats, Labeling};
use crate::models::{sample_graph_given, sample_latent, DcbmParams, ThetaSpec};
use crate::rng::{derive_seed, rng_from_seed};

const COLUMN_TOL: f64 = 1e-9;

/// A `K × B × M` array `S_kau` over labels `k`, true communities `a` and
/// degree values `x_u`, with `Σ_k S_kau = Π_au`.
#[derive(Clone, Debug, PartialEq)]
pub struct PopulationAssignment {
    k: usize,
    blocks: usize,
    m: usize,
    s: Vec<f64>,
    x: Vec<f64>,
    joint: Vec<f64>,
}

impl PopulationAssignment {
    /// `s` is indexed `(k, a, u)` in row-major order, `joint` is `B × M`.
    pub fn new(k: usize, s: Vec<f64>, x: Vec<f64>, joint: Vec<f64>) -> Result<Self> {
        let m = x.len();
        if k == 0 || m == 0 {
            return Err(Error::validation(
                "assignment needs at least one label and one degree value",
            ));
        }
        if joint.len() % m != 0 || joint.is_empty() {
            return Err(Error::validation("joint law must be a B x M matrix"));
        }
        let blocks = joint.len() / m;
        if s.len() != k * blocks * m {
            return Err(Error::LengthMismatch {
                expected: k * blocks * m,
                actual: s.len(),
            });
        }
        if s.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::validation("assignment entries must be nonnegative"));
        }
        let out = Self {
            k,
            blocks,
            m,
            s,
            x,
            joint,
        };
        for a in 0..blocks {
            for u in 0..m {
                let col: f64 = (0..k).map(|l| out.get(l, a, u)).sum();
                if (col - out.joint[a * m + u]).abs() > COLUMN_TOL {
                    return Err(Error::validation(format!(
                        "column ({a}, {u}) sums to {col}, expected {}",
                        out.joint[a * m + u]
                    )));
                }
            }
        }
        Ok(out)
    }

    /// The true assignment `𝔻`: label `k` holds exactly community `k`.
    pub fn diagonal(params: &DcbmParams) -> Result<Self> {
        let (x, joint) = params.joint_law()?;
        let (k, m) = (params.k, x.len());
        let mut s = vec![0.0; k * k * m];
        for a in 0..k {
            for u in 0..m {
                s[(a * k + a) * m + u] = joint[a * m + u];
            }
        }
        Self::new(k, s, x, joint)
    }

    /// Groups nodes by degree value instead of community: label `u` holds
    /// every node with `θ = x_u`. Needs as many labels as degree values.
    pub fn theta_grouped(params: &DcbmParams) -> Result<Self> {
        let (x, joint) = params.joint_law()?;
        let (k, m) = (params.k, x.len());
        if k != m {
            return Err(Error::validation(format!(
                "theta grouping needs K = M, got K={k}, M={m}"
            )));
        }
        let mut s = vec![0.0; k * k * m];
        for a in 0..k {
            for u in 0..m {
                s[(u * k + a) * m + u] = joint[a * m + u];
            }
        }
        Self::new(k, s, x, joint)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, k: usize, a: usize, u: usize) -> f64 {
        self.s[(k * self.blocks + a) * self.m + u]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.s
    }

    pub fn support(&self) -> &[f64] {
        &self.x
    }

    /// `Π`, row-major `B × M`.
    pub fn joint(&self) -> &[f64] {
        &self.joint
    }

    /// Relabels: label `k` becomes `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.k)?;
        let mut s = vec![0.0; self.s.len()];
        let stride = self.blocks * self.m;
        for (k, &to) in perm.iter().enumerate() {
            s[to * stride..(to + 1) * stride]
                .copy_from_slice(&self.s[k * stride..(k + 1) * stride]);
        }
        Ok(Self { s, ..self.clone() })
    }

    /// Whether some relabeling of `self` is within `tol` of `𝔻` entrywise.
    pub fn is_diagonal(&self, tol: f64) -> bool {
        if self.k != self.blocks {
            return false;
        }
        let stride = self.blocks * self.m;
        permutations(self.k).iter().any(|perm| {
            (0..self.k).all(|k| {
                let row = &self.s[k * stride..(k + 1) * stride];
                let target = perm[k];
                (0..self.blocks).all(|a| {
                    (0..self.m).all(|u| {
                        let want = if a == target {
                            self.joint[a * self.m + u]
                        } else {
                            0.0
                        };
                        (row[a * self.m + u] - want).abs() <= tol
                    })
                })
            })
        })
    }
}

fn check_permutation(perm: &[usize], k: usize) -> Result<()> {
    let mut seen = vec![false; k];
    if perm.len() != k {
        return Err(Error::LengthMismatch {
            expected: k,
            actual: perm.len(),
        });
    }
    for &p in perm {
        if p >= k || std::mem::replace(&mut seen[p], true) {
            return Err(Error::validation("not a permutation"));
        }
    }
    Ok(())
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(k - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, k - 1);
            out.push(p);
        }
    }
    out
}

/// `H_kl(S) = Σ_abuv x_u x_v P_ab S_kau S_lbv`, row-major `K × K`.
/// `p` is the row-major `B × B` connectivity.
pub fn h_matrix(s: &PopulationAssignment, p: &[f64]) -> Result<Vec<f64>> {
    let (k, b, m) = (s.k, s.blocks, s.m);
    if p.len() != b * b {
        return Err(Error::LengthMismatch {
            expected: b * b,
            actual: p.len(),
        });
    }
    // y_ka = Σ_u x_u S_kau factors the quadruple sum
    let y: Vec<f64> = (0..k)
        .flat_map(|l| (0..b).map(move |a| (l, a)))
        .map(|(l, a)| (0..m).map(|u| s.x[u] * s.get(l, a, u)).sum())
        .collect();
    let mut h = vec![0.0; k * k];
    for r in 0..k {
        for c in 0..k {
            let mut acc = 0.0;
            for a in 0..b {
                for bb in 0..b {
                    acc += p[a * b + bb] * y[r * b + a] * y[c * b + bb];
                }
            }
            h[r * k + c] = acc;
        }
    }
    Ok(h)
}

/// `h_k(S) = Σ_au S_kau`.
pub fn h_vector(s: &PopulationAssignment) -> Vec<f64> {
    let stride = s.blocks * s.m;
    s.s.chunks(stride).map(|row| row.iter().sum()).collect()
}

fn support_index(x: &[f64], value: f64) -> Option<usize> {
    x.iter()
        .position(|&v| (v - value).abs() <= 1e-12 * v.abs().max(1.0))
}

/// The empirical array `R(e)` for labels `e`, communities `c` and degree
/// parameters `theta` taking values in `x`. Its joint law is the empirical
/// frequency of `(c, θ)`.
pub fn empirical_r(
    e: &Labeling,
    c: &Labeling,
    theta: &[f64],
    x: &[f64],
) -> Result<PopulationAssignment> {
    let n = e.len();
    if c.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: c.len(),
        });
    }
    if theta.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: theta.len(),
        });
    }
    if n == 0 {
        return Err(Error::EmptyInput("labeling"));
    }
    let (k, b, m) = (e.k(), c.k(), x.len());
    let mut s = vec![0.0; k * b * m];
    let mut joint = vec![0.0; b * m];
    let unit = 1.0 / n as f64;
    for i in 0..n {
        let u = support_index(x, theta[i]).ok_or_else(|| {
            Error::validation(format!(
                "theta_{i} = {} is not in the support {x:?}",
                theta[i]
            ))
        })?;
        let (ki, ai) = (e.get(i), c.get(i));
        s[(ki * b + ai) * m + u] += unit;
        joint[ai * m + u] += unit;
    }
    PopulationAssignment::new(k, s, x.to_vec(), joint)
}

/// `F(H(S), h(S))` for the population version of `kind`:
///
/// - ERM: `Σ_k (H_kk − h_k² P_0)`
/// - NGM: `Σ_k (H_kk / P̃_0 − (H_k / P̃_0)²)` with `H_k = Σ_l H_kl`
/// - BM: `Σ_kl (H_kl ln(H_kl / (h_k h_l)) − H_kl)`
/// - DCBM: `Σ_kl (H_kl ln(H_kl / (H_k H_l)) − H_kl)`
pub fn population_criterion(
    kind: CriterionKind,
    s: &PopulationAssignment,
    params: &DcbmParams,
) -> Result<f64> {
    let ctx = Context::new(params, s.blocks, s.m)?;
    let h = h_matrix(s, &params.p)?;
    Ok(ctx.evaluate(kind, s.k, &h, &h_vector(s)))
}

struct Context {
    p0: f64,
    p0_tilde: f64,
}

impl Context {
    fn new(params: &DcbmParams, blocks: usize, m: usize) -> Result<Self> {
        if blocks != params.k {
            return Err(Error::validation(format!(
                "assignment has {blocks} communities, model has {}",
                params.k
            )));
        }
        let (x, _) = params.joint_law()?;
        if x.len() != m {
            return Err(Error::validation(format!(
                "assignment has {m} degree values, model has {}",
                x.len()
            )));
        }
        let q = params.population_quantities()?;
        if !(q.p0_tilde > 0.0) {
            return Err(Error::EmptyGraph);
        }
        Ok(Self {
            p0: q.p0,
            p0_tilde: q.p0_tilde,
        })
    }

    fn evaluate(&self, kind: CriterionKind, k: usize, h: &[f64], hv: &[f64]) -> f64 {
        let row: Vec<f64> = (0..k).map(|r| h[r * k..(r + 1) * k].iter().sum()).collect();
        match kind {
            CriterionKind::Erm => (0..k).map(|r| h[r * k + r] - hv[r] * hv[r] * self.p0).sum(),
            CriterionKind::Ngm => (0..k)
                .map(|r| {
                    let share = row[r] / self.p0_tilde;
                    h[r * k + r] / self.p0_tilde - share * share
                })
                .sum(),
            CriterionKind::Bm => likelihood(k, h, hv),
            CriterionKind::Dcbm => likelihood(k, h, &row),
        }
    }
}

fn likelihood(k: usize, h: &[f64], w: &[f64]) -> f64 {
    let mut total = 0.0;
    for r in 0..k {
        for c in 0..k {
            let v = h[r * k + c];
            if v > 0.0 {
                total += xlogx(v) - v * (w[r] * w[c]).ln() - v;
            }
        }
    }
    total
}

/// Sign test of `Ẽ_aa > 0`, `Ẽ_ab < 0` (`a ≠ b`).
#[derive(Clone, Debug, PartialEq)]
pub struct NgmCondition {
    pub pass: bool,
    /// Row-major `K × K`.
    pub e_tilde: Vec<f64>,
}

pub fn check_ngm_condition(params: &DcbmParams) -> Result<NgmCondition> {
    let q = params.population_quantities()?;
    let k = params.k;
    let pass = (0..k).all(|a| {
        (0..k).all(|b| {
            let v = q.e_tilde[a * k + b];
            if a == b {
                v > 0.0
            } else {
                v < 0.0
            }
        })
    });
    Ok(NgmCondition {
        pass,
        e_tilde: q.e_tilde,
    })
}

/// Test of `P_aa > P_0`, `P_ab < P_0` (`a ≠ b`) for a standard block model.
#[derive(Clone, Debug, PartialEq)]
pub struct ErmCondition {
    pub pass: bool,
    pub p0: f64,
}

pub fn check_erm_condition(params: &DcbmParams) -> Result<ErmCondition> {
    let constant = match &params.theta {
        ThetaSpec::ConstantOne => true,
        theta => theta.discrete().is_some_and(|(x, _)| x == [1.0]),
    };
    if !constant {
        return Err(Error::Unsupported(
            "condition defined for standard block model (theta = 1)".into(),
        ));
    }
    let q = params.population_quantities()?;
    let k = params.k;
    let pass = (0..k).all(|a| {
        (0..k).all(|b| {
            let v = params.p_at(a, b);
            if a == b {
                v > q.p0
            } else {
                v < q.p0
            }
        })
    });
    Ok(ErmCondition { pass, p0: q.p0 })
}

/// Grid limits for [`brute_force_population_max`].
pub const MAX_GRID_K: usize = 3;
pub const MAX_GRID_M: usize = 2;
pub const MAX_GRID_RESOLUTION: usize = 20;
pub const DEFAULT_GRID_BUDGET: u128 = 20_000_000;

#[derive(Clone, Debug)]
pub struct PopulationMax {
    pub argmax: PopulationAssignment,
    pub value: f64,
    /// The argmax matches `𝔻` up to relabeling.
    pub is_diagonal: bool,
    /// Criterion value at `𝔻`.
    pub diagonal_value: f64,
    pub points: u128,
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn binomial(n: u128, r: u128) -> u128 {
    (0..r).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Exhaustively maximizes the population criterion over the grid where every
/// column `(a, u)` is split across the `K` labels in multiples of `Π_au / g`.
///
/// The grid has `C(g + K − 1, K − 1)^(K·M)` points. Ties are broken toward the
/// lexicographically smallest `S`, so the result does not depend on thread
/// scheduling. A diagonal argmax certifies only that no grid point beats `𝔻`.
pub fn brute_force_population_max(
    kind: CriterionKind,
    params: &DcbmParams,
    resolution: usize,
    budget: u128,
) -> Result<PopulationMax> {
    let diagonal = PopulationAssignment::diagonal(params)?;
    let (k, m) = (params.k, diagonal.m);
    if k > MAX_GRID_K || m > MAX_GRID_M || resolution > MAX_GRID_RESOLUTION {
        return Err(Error::Unsupported(format!(
            "grid search supports K <= {MAX_GRID_K}, M <= {MAX_GRID_M}, g <= {MAX_GRID_RESOLUTION}; \
             got K={k}, M={m}, g={resolution}"
        )));
    }
    if resolution == 0 {
        return Err(Error::validation("grid resolution must be positive"));
    }
    let columns = k * m;
    let per_column = binomial((resolution + k - 1) as u128, (k - 1) as u128);
    let points = per_column.checked_pow(columns as u32).unwrap_or(u128::MAX);
    if points > budget {
        return Err(Error::BudgetExceeded {
            points,
            limit: budget,
        });
    }

    let ctx = Context::new(params, k, m)?;
    let comps = compositions(resolution, k);
    let step = 1.0 / resolution as f64;
    let joint = diagonal.joint.clone();
    let x = diagonal.x.clone();

    // column c = a * m + u; entry for label l is comps[idx][l] * Π_au / g
    let fill = |s: &mut [f64], col: usize, comp: &[usize]| {
        let (a, u) = (col / m, col % m);
        for (l, &q) in comp.iter().enumerate() {
            s[(l * k + a) * m + u] = q as f64 * step * joint[col];
        }
    };
    let score = |s: &[f64]| -> f64 {
        let a = PopulationAssignment {
            k,
            blocks: k,
            m,
            s: s.to_vec(),
            x: x.clone(),
            joint: joint.clone(),
        };
        let h = h_matrix(&a, &params.p).expect("shape checked");
        let v = ctx.evaluate(kind, k, &h, &h_vector(&a));
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let better = |(v1, s1): &(f64, Vec<f64>), (v2, s2): &(f64, Vec<f64>)| -> bool {
        v1 > v2 || (v1 == v2 && s1.partial_cmp(s2) == Some(std::cmp::Ordering::Less))
    };

    let best = comps
        .par_iter()
        .map(|first| {
            let mut s = vec![0.0; k * k * m];
            fill(&mut s, 0, first);
            let mut idx = vec![0usize; columns];
            for col in 1..columns {
                fill(&mut s, col, &comps[0]);
            }
            let mut best = (score(&s), s.clone());
            // odometer over the remaining columns
            'outer: loop {
                let mut col = columns - 1;
                loop {
                    if col == 0 {
                        break 'outer;
                    }
                    idx[col] += 1;
                    if idx[col] < comps.len() {
                        fill(&mut s, col, &comps[idx[col]]);
                        break;
                    }
                    idx[col] = 0;
                    fill(&mut s, col, &comps[0]);
                    col -= 1;
                }
                let cand = (score(&s), s.clone());
                if better(&cand, &best) {
                    best = cand;
                }
            }
            best
        })
        .reduce_with(|a, b| if better(&b, &a) { b } else { a })
        .expect("grid is non-empty");

    let argmax = PopulationAssignment {
        k,
        blocks: k,
        m,
        s: best.1,
        x,
        joint,
    };
    let diagonal_value = population_criterion(kind, &diagonal, params)?;
    Ok(PopulationMax {
        is_diagonal: argmax.is_diagonal(1e-9),
        argmax,
        value: best.0,
        diagonal_value,
        points,
    })
}

/// Result of comparing block statistics with their population counterparts.
#[derive(Clone, Debug)]
pub struct BlockCountReport {
    /// Largest `|z|` over labelings and entries `(k, l)`.
    pub max_abs_z: f64,
    /// Largest `|n_k / n − h_k(R(e))|`.
    pub max_fraction_error: f64,
    pub labelings: usize,
    pub reps: usize,
}

impl BlockCountReport {
    pub fn passes(&self, z_limit: f64) -> bool {
        self.max_abs_z <= z_limit && self.max_fraction_error <= 1e-12
    }
}

/// Monte Carlo check that `E[O_kl(e)] / μ = H_kl(R(e))` and `n_k/n = h_k(R(e))`.
///
/// Draws `(c, θ)` once, then `reps` graphs given them, and for five fixed
/// labelings (the truth, the grouping by θ, three uniform random ones)
/// computes `z = (mean − H) / (sd / √reps)` for every entry of `O / μ`
/// (evaluated as `O / n²` against `ρ H`, which has the same z-scores).
/// Self-loops count once on the diagonal, which makes the identity exact.
pub fn verify_block_counts(
    params: &DcbmParams,
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<BlockCountReport> {
    let (x, _) = params.joint_law()?;
    if n == 0 || reps < 2 {
        return Err(Error::validation(
            "need n >= 1 and at least two replications",
        ));
    }
    let k = params.k;
    let mut rng = rng_from_seed(derive_seed(seed, &[0]));
    let (c, theta) = sample_latent(params, n, &mut rng)?;

    let mut labelings = vec![c.clone()];
    let grouped: Vec<usize> = theta
        .iter()
        .map(|&t| support_index(&x, t).expect("sampled from support") % k)
        .collect();
    labelings.push(Labeling::new(grouped, k)?);
    let mut label_rng = rng_from_seed(derive_seed(seed, &[1]));
    for _ in 0..3 {
        labelings.push(Labeling::new(
            (0..n)
                .map(|_| rand::Rng::gen_range(&mut label_rng, 0..k))
                .collect(),
            k,
        )?);
    }

    let mut targets = Vec::new();
    let mut max_fraction_error: f64 = 0.0;
    for e in &labelings {
        let r = empirical_r(e, &c, &theta, &x)?;
        let hv = h_vector(&r);
        for (l, &count) in e.counts().iter().enumerate() {
            max_fraction_error = max_fraction_error.max((count as f64 / n as f64 - hv[l]).abs());
        }
        // compared on the O / n² scale so that ρ = 0 stays well defined
        targets.push(
            h_matrix(&r, &params.p)?
                .into_iter()
                .map(|h| params.rho * h)
                .collect::<Vec<_>>(),
        );
    }

    let n2 = (n as f64).powi(2);
    let cells = k * k;
    let mut sum = vec![0.0; labelings.len() * cells];
    let mut sum_sq = vec![0.0; labelings.len() * cells];
    for rep in 0..reps {
        let mut g_rng = rng_from_seed(derive_seed(seed, &[2, rep as u64]));
        let (g, _) = sample_graph_given(params, &c, &theta, &mut g_rng)?;
        for (li, e) in labelings.iter().enumerate() {
            let stats = block_stats(&g, e)?;
            for a in 0..k {
                for b in 0..k {
                    let v = stats.o(a, b) as f64 / n2;
                    sum[li * cells + a * k + b] += v;
                    sum_sq[li * cells + a * k + b] += v * v;
                }
            }
        }
    }

    let r = reps as f64;
    let mut max_abs_z: f64 = 0.0;
    for (li, target) in targets.iter().enumerate() {
        for cell in 0..cells {
            let mean = sum[li * cells + cell] / r;
            let var = ((sum_sq[li * cells + cell] - r * mean * mean) / (r - 1.0)).max(0.0);
            let want = target[cell];
            let diff = mean - want;
            let z = if var > 0.0 {
                diff / (var / r).sqrt()
            } else if diff.abs() <= 1e-12 {
                0.0
            } else {
                f64::INFINITY
            };
            max_abs_z = max_abs_z.max(z.abs());
        }
    }
    Ok(BlockCountReport {
        max_abs_z,
        max_fraction_error,
        labelings: labelings.len(),
        reps,
    })
}

/// The two-community model in which grouping by degree beats the true
/// communities under Erdős–Rényi modularity: `θ ∈ {0.4, 1.6}` with equal
/// probability, `π = (½, ½)`, `P = [[0.1, 0.05], [0.05, 0.1]]`, `ρ = 1`.
pub fn counterexample_params() -> Result<DcbmParams> {
    DcbmParams::new(
        vec![0.5, 0.5],
        vec![0.1, 0.05, 0.05, 0.1],
        1.0,
        ThetaSpec::TwoPoint { m: 4.0 },
    )
    .validate()
}
