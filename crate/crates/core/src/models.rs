//! Standard and degree-corrected stochastic block models.
//!
//! Each node draws a pair `(c_i, θ_i)`; given those, `A_ij` for `i <= j`
//! (loops included) is Bernoulli with mean `θ_i θ_j ρ P_{c_i c_j}`. The
//! standard block model is the `θ ≡ 1` case.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng as _;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Labeling};
use crate::rng::{rng_from_seed, Rng};

const SUM_TOL: f64 = 1e-9;

/// Distribution of the degree parameter θ. Every kind has mean 1.
#[derive(Clone, Debug, PartialEq)]
pub enum ThetaSpec {
    /// θ ≡ 1 (standard block model).
    ConstantOne,
    /// `2/(m+1)` and `2m/(m+1)` with probability 1/2 each.
    TwoPoint { m: f64 },
    /// Uniform on `[0, 2]` with probability `alpha`, otherwise the two-point law.
    Mixture { m: f64, alpha: f64 },
}

impl ThetaSpec {
    /// The low and high values of the two-point law with ratio `m`.
    pub fn two_point_values(m: f64) -> (f64, f64) {
        let x = 2.0 / (m + 1.0);
        (x, m * x)
    }

    fn two_point_support(m: f64) -> (Vec<f64>, Vec<f64>) {
        if m == 1.0 {
            (vec![1.0], vec![1.0])
        } else {
            let (lo, hi) = Self::two_point_values(m);
            (vec![lo, hi], vec![0.5, 0.5])
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check_m = |m: f64| {
            if m.is_finite() && m >= 1.0 {
                Ok(())
            } else {
                Err(Error::validation(format!(
                    "theta ratio m must be >= 1, got {m}"
                )))
            }
        };
        match *self {
            ThetaSpec::ConstantOne => Ok(()),
            ThetaSpec::TwoPoint { m } => check_m(m),
            ThetaSpec::Mixture { m, alpha } => {
                check_m(m)?;
                if (0.0..=1.0).contains(&alpha) {
                    Ok(())
                } else {
                    Err(Error::validation(format!(
                        "mixture weight alpha must lie in [0, 1], got {alpha}"
                    )))
                }
            }
        }
    }

    /// Discrete support `x_1 < ... < x_M` with probabilities, or `None` when θ
    /// has a continuous component.
    pub fn discrete(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match *self {
            ThetaSpec::ConstantOne => Some((vec![1.0], vec![1.0])),
            ThetaSpec::TwoPoint { m } => Some(Self::two_point_support(m)),
            ThetaSpec::Mixture { m, alpha } if alpha == 0.0 => Some(Self::two_point_support(m)),
            ThetaSpec::Mixture { .. } => None,
        }
    }

    /// Essential supremum `x_M`.
    pub fn sup(&self) -> f64 {
        match *self {
            ThetaSpec::ConstantOne => 1.0,
            ThetaSpec::TwoPoint { m } => Self::two_point_values(m).1,
            ThetaSpec::Mixture { m, alpha } => {
                let hi = Self::two_point_values(m).1;
                if alpha > 0.0 {
                    hi.max(2.0)
                } else {
                    hi
                }
            }
        }
    }

    pub fn mean(&self) -> f64 {
        1.0
    }

    pub fn variance(&self) -> f64 {
        let two_point = |m: f64| ((m - 1.0) / (m + 1.0)).powi(2);
        match *self {
            ThetaSpec::ConstantOne => 0.0,
            ThetaSpec::TwoPoint { m } => two_point(m),
            ThetaSpec::Mixture { m, alpha } => alpha / 3.0 + (1.0 - alpha) * two_point(m),
        }
    }

    pub fn sample(&self, rng: &mut Rng) -> f64 {
        match *self {
            ThetaSpec::ConstantOne => 1.0,
            ThetaSpec::TwoPoint { m } => {
                let (lo, hi) = Self::two_point_values(m);
                if rng.gen::<bool>() {
                    hi
                } else {
                    lo
                }
            }
            ThetaSpec::Mixture { m, alpha } => {
                if rng.gen::<f64>() < alpha {
                    rng.gen_range(0.0..=2.0)
                } else {
                    let (lo, hi) = Self::two_point_values(m);
                    if rng.gen::<bool>() {
                        hi
                    } else {
                        lo
                    }
                }
            }
        }
    }

    /// Name used in parameter files.
    pub fn kind_name(&self) -> &'static str {
        match self {
            ThetaSpec::ConstantOne => "constant",
            ThetaSpec::TwoPoint { .. } => "two-point",
            ThetaSpec::Mixture { .. } => "mixture",
        }
    }
}

/// Parameters of a degree-corrected block model.
#[derive(Clone, Debug, PartialEq)]
pub struct DcbmParams {
    pub k: usize,
    /// Community probabilities `π`.
    pub pi: Vec<f64>,
    /// Row-major `K × K` connectivity `P`.
    pub p: Vec<f64>,
    /// Scale `ρ`; edge probabilities are `θ_i θ_j ρ P_ab`.
    pub rho: f64,
    pub theta: ThetaSpec,
    /// Optional row-major `K × M` joint law `Π_au = P(c = a, θ = x_u)` over the
    /// discrete support of `theta`. `None` means `c` and `θ` are independent.
    pub joint: Option<Vec<f64>>,
}

/// Derived population quantities.
#[derive(Clone, Debug, PartialEq)]
pub struct PopulationQuantities {
    /// `π̃_a = Σ_u x_u Π_au`.
    pub pi_tilde: Vec<f64>,
    /// `P_0 = Σ_ab π_a π_b P_ab`.
    pub p0: f64,
    /// `P̃_0 = Σ_ab π̃_a π̃_b P_ab`.
    pub p0_tilde: f64,
    /// `W̃_ab = π̃_a π̃_b P_ab / P̃_0`, row-major.
    pub w_tilde: Vec<f64>,
    /// `Ẽ = W̃ − (W̃1)(W̃1)ᵀ`, row-major.
    pub e_tilde: Vec<f64>,
}

impl DcbmParams {
    /// Independent `c` and `θ`.
    pub fn new(pi: Vec<f64>, p: Vec<f64>, rho: f64, theta: ThetaSpec) -> Self {
        Self {
            k: pi.len(),
            pi,
            p,
            rho,
            theta,
            joint: None,
        }
    }

    /// The two-community design used throughout the simulations:
    /// `π = (π_1, 1 − π_1)`, `P = [[4, 1], [1, 4]]`.
    pub fn two_block(pi1: f64, rho: f64, theta: ThetaSpec) -> Self {
        Self::new(vec![pi1, 1.0 - pi1], vec![4.0, 1.0, 1.0, 4.0], rho, theta)
    }

    pub fn p_at(&self, a: usize, b: usize) -> f64 {
        self.p[a * self.k + b]
    }

    /// Checks every parameter constraint, including `x_M² max_ab ρP_ab <= 1`.
    pub fn validate(self) -> Result<Self> {
        let k = self.k;
        if k == 0 {
            return Err(Error::validation("K must be at least 1"));
        }
        if self.pi.len() != k {
            return Err(Error::validation(format!(
                "pi has {} entries, expected K={k}",
                self.pi.len()
            )));
        }
        if self.pi.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::validation("pi entries must be positive"));
        }
        let pi_sum: f64 = self.pi.iter().sum();
        if (pi_sum - 1.0).abs() > SUM_TOL {
            return Err(Error::validation(format!(
                "pi is not a distribution: entries sum to {pi_sum}"
            )));
        }
        if self.p.len() != k * k {
            return Err(Error::validation(format!(
                "P has {} entries, expected K*K={}",
                self.p.len(),
                k * k
            )));
        }
        if self.p.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::validation(
                "P entries must be finite and nonnegative",
            ));
        }
        for a in 0..k {
            for b in 0..a {
                if self.p_at(a, b) != self.p_at(b, a) {
                    return Err(Error::validation("P must be symmetric"));
                }
            }
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::validation(format!(
                "rho must lie in [0, 1], got {}",
                self.rho
            )));
        }
        self.theta.validate()?;
        if let Some(joint) = &self.joint {
            let (x, _) = self.theta.discrete().ok_or_else(|| {
                Error::validation("a joint (c, theta) law requires a discrete theta")
            })?;
            let m = x.len();
            if joint.len() != k * m {
                return Err(Error::validation(format!(
                    "joint has {} entries, expected K*M={}",
                    joint.len(),
                    k * m
                )));
            }
            if joint.iter().any(|&v| !(v >= 0.0)) {
                return Err(Error::validation("joint entries must be nonnegative"));
            }
            for a in 0..k {
                let row: f64 = joint[a * m..(a + 1) * m].iter().sum();
                if (row - self.pi[a]).abs() > SUM_TOL {
                    return Err(Error::validation(format!(
                        "joint row {a} sums to {row}, but pi_{a} = {}",
                        self.pi[a]
                    )));
                }
            }
            let mean: f64 = (0..k)
                .flat_map(|a| (0..m).map(move |u| (a, u)))
                .map(|(a, u)| x[u] * joint[a * m + u])
                .sum();
            if (mean - 1.0).abs() > SUM_TOL {
                return Err(Error::validation(format!(
                    "joint law gives E[theta] = {mean}, expected 1"
                )));
            }
        }
        check_feasible(&self.theta, self.rho, &self.p)?;
        Ok(self)
    }

    /// Support `x` and row-major joint `Π` (`K × M`).
    pub fn joint_law(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let (x, probs) = self.theta.discrete().ok_or_else(|| {
            Error::Unsupported(
                "population quantities need a discrete theta; the uniform mixture component is continuous"
                    .into(),
            )
        })?;
        let joint = match &self.joint {
            Some(joint) => joint.clone(),
            None => self
                .pi
                .iter()
                .flat_map(|&pa| probs.iter().map(move |&pu| pa * pu))
                .collect(),
        };
        Ok((x, joint))
    }

    /// `π̃`; equals `π` whenever `c` and `θ` are independent.
    pub fn pi_tilde(&self) -> Vec<f64> {
        match (&self.joint, self.theta.discrete()) {
            (Some(joint), Some((x, _))) => {
                let m = x.len();
                (0..self.k)
                    .map(|a| (0..m).map(|u| x[u] * joint[a * m + u]).sum())
                    .collect()
            }
            _ => self.pi.clone(),
        }
    }

    fn quadratic(&self, w: &[f64]) -> f64 {
        let k = self.k;
        (0..k)
            .flat_map(|a| (0..k).map(move |b| (a, b)))
            .map(|(a, b)| w[a] * w[b] * self.p_at(a, b))
            .sum()
    }

    pub fn population_quantities(&self) -> Result<PopulationQuantities> {
        self.joint_law()?;
        let k = self.k;
        let pi_tilde = self.pi_tilde();
        let p0 = self.quadratic(&self.pi);
        let p0_tilde = self.quadratic(&pi_tilde);
        let mut w_tilde = vec![0.0; k * k];
        if p0_tilde > 0.0 {
            for a in 0..k {
                for b in 0..k {
                    w_tilde[a * k + b] = pi_tilde[a] * pi_tilde[b] * self.p_at(a, b) / p0_tilde;
                }
            }
        }
        let row: Vec<f64> = (0..k)
            .map(|a| w_tilde[a * k..(a + 1) * k].iter().sum())
            .collect();
        let mut e_tilde = vec![0.0; k * k];
        for a in 0..k {
            for b in 0..k {
                e_tilde[a * k + b] = w_tilde[a * k + b] - row[a] * row[b];
            }
        }
        Ok(PopulationQuantities {
            pi_tilde,
            p0,
            p0_tilde,
            w_tilde,
            e_tilde,
        })
    }
}

fn check_feasible(theta: &ThetaSpec, rho: f64, p: &[f64]) -> Result<()> {
    let p_max = p.iter().copied().fold(0.0, f64::max);
    let x_max = theta.sup();
    let bound = x_max * x_max * rho * p_max;
    if bound > 1.0 + 1e-12 {
        return Err(Error::validation(format!(
            "infeasible: x_M^2 * max(rho*P) = {x_max:.4}^2 * {:.4} = {bound:.4} exceeds 1",
            rho * p_max
        )));
    }
    Ok(())
}

/// `ρ = λ / (n Σ_ab π̃_a π̃_b P_ab)`, so the expected degree is `λ`.
/// The `rho` already stored in `params` is ignored.
pub fn rho_for_expected_degree(lambda: f64, n: usize, params: &DcbmParams) -> Result<f64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::validation(format!(
            "expected degree must be >= 0, got {lambda}"
        )));
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    if n == 0 {
        return Err(Error::validation("n must be positive"));
    }
    let mass = params.quadratic(&params.pi_tilde());
    if !(mass > 0.0) {
        return Err(Error::validation(
            "P has no mass; no rho reaches a positive degree",
        ));
    }
    let rho = lambda / (n as f64 * mass);
    if rho > 1.0 {
        return Err(Error::validation(format!(
            "infeasible expected degree {lambda}: needs rho = {rho:.4} > 1"
        )));
    }
    check_feasible(&params.theta, rho, &params.p).map_err(|e| {
        let reason = match e {
            Error::Validation(msg) => msg,
            other => other.to_string(),
        };
        Error::validation(format!("expected degree {lambda} at n={n}: {reason}"))
    })?;
    Ok(rho)
}

/// A sampled network with its latent variables.
#[derive(Clone, Debug)]
pub struct SampledNetwork {
    pub graph: Graph,
    pub labels: Labeling,
    pub theta: Vec<f64>,
    /// Edge probabilities above 1 that were clamped (mixture θ only).
    pub clamped: usize,
}

/// Draws `(c_i, θ_i)` for `n` nodes.
pub fn sample_latent(params: &DcbmParams, n: usize, rng: &mut Rng) -> Result<(Labeling, Vec<f64>)> {
    let mut labels = Vec::with_capacity(n);
    let mut theta = Vec::with_capacity(n);
    match &params.joint {
        Some(joint) => {
            let (x, _) = params.joint_law()?;
            let m = x.len();
            let dist = WeightedIndex::new(joint)
                .map_err(|e| Error::validation(format!("joint law: {e}")))?;
            for _ in 0..n {
                let cell = dist.sample(rng);
                labels.push(cell / m);
                theta.push(x[cell % m]);
            }
        }
        None => {
            let dist = WeightedIndex::new(&params.pi)
                .map_err(|e| Error::validation(format!("pi: {e}")))?;
            for _ in 0..n {
                labels.push(dist.sample(rng));
                theta.push(params.theta.sample(rng));
            }
        }
    }
    Ok((Labeling::new(labels, params.k)?, theta))
}

/// Draws the adjacency given latent labels and degree parameters. Returns the
/// graph and the number of clamped probabilities.
pub fn sample_graph_given(
    params: &DcbmParams,
    labels: &Labeling,
    theta: &[f64],
    rng: &mut Rng,
) -> Result<(Graph, usize)> {
    let n = labels.len();
    if theta.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: theta.len(),
        });
    }
    let clamp_allowed = matches!(params.theta, ThetaSpec::Mixture { .. });
    let mut clamped = 0;
    let mut edges = Vec::new();
    if params.rho > 0.0 {
        for i in 0..n {
            let ci = labels.get(i);
            let scale_i = theta[i] * params.rho;
            for j in i..n {
                let mut prob = scale_i * theta[j] * params.p_at(ci, labels.get(j));
                if prob > 1.0 {
                    if !clamp_allowed && prob > 1.0 + 1e-12 {
                        return Err(Error::validation(format!(
                            "edge probability {prob} exceeds 1 for pair ({i}, {j})"
                        )));
                    }
                    clamped += usize::from(prob > 1.0 + 1e-12);
                    prob = 1.0;
                }
                if prob > 0.0 && rng.gen::<f64>() < prob {
                    edges.push((i, j));
                }
            }
        }
    }
    Ok((Graph::from_edges(n, edges)?, clamped))
}

/// Samples a network of `n` nodes, deterministically in `seed`.
pub fn sample_network(params: &DcbmParams, n: usize, seed: u64) -> Result<SampledNetwork> {
    let mut rng = rng_from_seed(seed);
    let (labels, theta) = sample_latent(params, n, &mut rng)?;
    let (graph, clamped) = sample_graph_given(params, &labels, &theta, &mut rng)?;
    Ok(SampledNetwork {
        graph,
        labels,
        theta,
        clamped,
    })
}

/// Model parameter file (TOML).
///
/// ```toml
/// K = 2
/// pi = [0.5, 0.5]
/// P = [4, 1, 1, 4]     # row-major
/// theta = "two-point"  # "constant" | "two-point" | "mixture"
/// m = 10               # two-point ratio
/// alpha = 0.5          # mixture weight of the uniform component
/// lambda = 40          # expected degree (needs n), or give `rho`
/// joint = [...]        # optional row-major K x M law of (c, theta)
/// ```
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(rename = "K")]
    pub k: Option<usize>,
    pub pi: Vec<f64>,
    #[serde(rename = "P")]
    pub p: Vec<f64>,
    #[serde(default = "default_theta")]
    pub theta: String,
    pub m: Option<f64>,
    pub alpha: Option<f64>,
    pub rho: Option<f64>,
    pub lambda: Option<f64>,
    pub n: Option<usize>,
    pub joint: Option<Vec<f64>>,
}

fn default_theta() -> String {
    "constant".into()
}

impl ModelSpec {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            line: e
                .span()
                .map(|s| text[..s.start.min(text.len())].lines().count().max(1))
                .unwrap_or(0),
            message: e.message().to_string(),
        })
    }

    pub fn theta_spec(&self) -> Result<ThetaSpec> {
        parse_theta(&self.theta, self.m, self.alpha)
    }

    /// Validated parameters; `n` overrides the file's `n` when `lambda` is used.
    pub fn resolve(&self, n: Option<usize>) -> Result<DcbmParams> {
        if let Some(k) = self.k {
            if k != self.pi.len() {
                return Err(Error::validation(format!(
                    "K = {k} but pi has {} entries",
                    self.pi.len()
                )));
            }
        }
        let mut params = DcbmParams::new(self.pi.clone(), self.p.clone(), 0.0, self.theta_spec()?);
        params.joint = self.joint.clone();
        params.rho = match (self.rho, self.lambda) {
            (Some(rho), None) => rho,
            (None, Some(lambda)) => {
                let n = n.or(self.n).ok_or_else(|| {
                    Error::validation("lambda needs the node count n to determine rho")
                })?;
                rho_for_expected_degree(lambda, n, &params)?
            }
            (Some(_), Some(_)) => {
                return Err(Error::validation("give either rho or lambda, not both"))
            }
            (None, None) => return Err(Error::validation("one of rho or lambda is required")),
        };
        params.validate()
    }
}

pub fn parse_theta(kind: &str, m: Option<f64>, alpha: Option<f64>) -> Result<ThetaSpec> {
    let need_m = || m.ok_or_else(|| Error::validation(format!("theta = {kind:?} needs m")));
    let spec = match kind {
        "constant" | "constant-one" | "one" => ThetaSpec::ConstantOne,
        "two-point" => ThetaSpec::TwoPoint { m: need_m()? },
        "mixture" => ThetaSpec::Mixture {
            m: need_m()?,
            alpha: alpha.ok_or_else(|| Error::validation("theta = \"mixture\" needs alpha"))?,
        },
        other => {
            return Err(Error::validation(format!(
                "unknown theta kind {other:?} (expected constant, two-point or mixture)"
            )))
        }
    };
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn standard(rho: f64) -> DcbmParams {
        DcbmParams::two_block(0.5, rho, ThetaSpec::ConstantOne)
    }

    #[test]
    fn simulation_design_validates() {
        assert!(standard(0.05).validate().is_ok());
    }

    #[test]
    fn pi_must_be_distribution() {
        let p = DcbmParams::new(
            vec![0.6, 0.6],
            vec![4.0, 1.0, 1.0, 4.0],
            0.05,
            ThetaSpec::ConstantOne,
        );
        let err = p.validate().unwrap_err().to_string();
        assert!(err.contains("not a distribution"), "{err}");
    }

    #[test]
    fn feasibility_bound_is_enforced() {
        // (20/11)² · ρ · 4 > 1 at ρ = 0.1
        let p = DcbmParams::two_block(0.5, 0.1, ThetaSpec::TwoPoint { m: 10.0 });
        let err = p.validate().unwrap_err().to_string();
        assert!(err.contains("infeasible"), "{err}");
        let ok = DcbmParams::two_block(0.5, 0.07, ThetaSpec::TwoPoint { m: 10.0 });
        assert!(ok.validate().is_ok());
    }

    #[test]
    fn asymmetric_p_rejected() {
        let p = DcbmParams::new(
            vec![0.5, 0.5],
            vec![4.0, 1.0, 2.0, 4.0],
            0.05,
            ThetaSpec::ConstantOne,
        );
        assert!(p.validate().is_err());
    }

    #[test]
    fn rho_from_lambda() {
        let rho = rho_for_expected_degree(125.0, 1000, &standard(0.0)).unwrap();
        assert!((rho - 0.05).abs() < 1e-15);
        assert_eq!(
            rho_for_expected_degree(0.0, 1000, &standard(0.0)).unwrap(),
            0.0
        );
        let er = DcbmParams::new(vec![1.0], vec![1.0], 0.0, ThetaSpec::ConstantOne);
        assert!((rho_for_expected_degree(30.0, 100, &er).unwrap() - 0.3).abs() < 1e-15);
        assert!(rho_for_expected_degree(1000.0, 100, &er).is_err());
    }

    #[test]
    fn zero_rho_gives_empty_graph() {
        let net = sample_network(&standard(0.0), 50, 1).unwrap();
        assert_eq!(net.graph.total_degree(), 0);
    }

    #[test]
    fn certain_edges_give_complete_graph_with_loops() {
        let p = DcbmParams::new(vec![1.0], vec![1.0], 1.0, ThetaSpec::ConstantOne)
            .validate()
            .unwrap();
        let net = sample_network(&p, 7, 3).unwrap();
        assert_eq!(net.graph.edge_count(), 7 * 8 / 2);
        assert_eq!(net.graph.loop_count(), 7);
        assert_eq!(net.graph.total_degree(), 49);
    }

    #[test]
    fn same_seed_same_network() {
        let p = DcbmParams::two_block(0.5, 0.05, ThetaSpec::TwoPoint { m: 3.0 });
        let a = sample_network(&p, 200, 11).unwrap();
        let b = sample_network(&p, 200, 11).unwrap();
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.theta, b.theta);
        let c = sample_network(&p, 200, 12).unwrap();
        assert_ne!(a.graph, c.graph);
    }

    #[test]
    fn independent_pi_tilde_equals_pi() {
        let p = DcbmParams::two_block(0.3, 0.05, ThetaSpec::TwoPoint { m: 4.0 });
        assert_eq!(p.pi_tilde(), p.pi);
        let q = p.population_quantities().unwrap();
        assert!((q.p0 - q.p0_tilde).abs() < 1e-15);
    }

    #[test]
    fn constant_theta_population_quantities() {
        let q = standard(0.05).population_quantities().unwrap();
        assert_eq!(q.pi_tilde, vec![0.5, 0.5]);
        assert!((q.p0 - 2.5).abs() < 1e-15);
        assert!((q.w_tilde.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(q.e_tilde.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn counterexample_population_quantities() {
        let p = DcbmParams::new(
            vec![0.5, 0.5],
            vec![0.1, 0.05, 0.05, 0.1],
            1.0,
            ThetaSpec::TwoPoint { m: 4.0 },
        );
        let (x, joint) = p.joint_law().unwrap();
        assert!((x[0] - 0.4).abs() < 1e-15 && (x[1] - 1.6).abs() < 1e-15);
        assert_eq!(joint, vec![0.25; 4]);
        let q = p.population_quantities().unwrap();
        assert_eq!(q.pi_tilde, vec![0.5, 0.5]);
        assert!((q.p0 - 0.075).abs() < 1e-15);
    }

    #[test]
    fn joint_concentrated_on_one_community() {
        // all mass of community 0 at theta = 1
        let p = DcbmParams {
            joint: Some(vec![1.0]),
            ..DcbmParams::new(vec![1.0], vec![1.0], 0.1, ThetaSpec::ConstantOne)
        };
        assert!(p.clone().validate().is_ok());
        assert_eq!(p.pi_tilde(), vec![1.0]);

        // community 0 carries all high-theta nodes, community 1 all low-theta nodes
        let (lo, hi) = ThetaSpec::two_point_values(3.0);
        let q = DcbmParams {
            joint: Some(vec![0.0, 0.5, 0.5, 0.0]),
            ..DcbmParams::two_block(0.5, 0.05, ThetaSpec::TwoPoint { m: 3.0 })
        };
        let q = q.validate().unwrap();
        let pt = q.pi_tilde();
        assert!((pt[0] - 0.5 * hi).abs() < 1e-15 && (pt[1] - 0.5 * lo).abs() < 1e-15);
    }

    #[test]
    fn joint_must_match_marginals() {
        let q = DcbmParams {
            joint: Some(vec![0.5, 0.0, 0.5, 0.0]),
            ..DcbmParams::two_block(0.5, 0.05, ThetaSpec::TwoPoint { m: 3.0 })
        };
        // E[theta] = 2/(m+1) != 1
        assert!(q.validate().is_err());
    }

    #[test]
    fn mixture_has_no_population_quantities() {
        let p = DcbmParams::two_block(
            0.5,
            0.05,
            ThetaSpec::Mixture {
                m: 10.0,
                alpha: 0.5,
            },
        );
        assert!(matches!(
            p.population_quantities(),
            Err(Error::Unsupported(_))
        ));
        let p0 = DcbmParams::two_block(
            0.5,
            0.05,
            ThetaSpec::Mixture {
                m: 10.0,
                alpha: 0.0,
            },
        );
        assert!(p0.population_quantities().is_ok());
    }

    #[test]
    fn variance_closed_forms() {
        assert!((ThetaSpec::TwoPoint { m: 3.0 }.variance() - 0.25).abs() < 1e-15);
        let mix = ThetaSpec::Mixture {
            m: 10.0,
            alpha: 0.5,
        };
        assert!((mix.variance() - (0.5 / 3.0 + 0.5 * 81.0 / 121.0)).abs() < 1e-15);
    }

    #[test]
    fn parameter_file_with_lambda() {
        let text = "K = 2\npi = [0.5, 0.5]\nP = [4, 1, 1, 4]\ntheta = \"two-point\"\nm = 2\nlambda = 125\n";
        let spec = ModelSpec::parse(text).unwrap();
        let params = spec.resolve(Some(1000)).unwrap();
        assert!((params.rho - 0.05).abs() < 1e-15);
        assert_eq!(params.theta, ThetaSpec::TwoPoint { m: 2.0 });
        assert!(spec.resolve(None).is_err());
    }

    #[test]
    fn parameter_file_errors() {
        assert!(ModelSpec::parse("pi = [1.0]\nP = [1]\nbogus = 3\n").is_err());
        let both = ModelSpec::parse("pi = [1.0]\nP = [1]\nrho = 0.1\nlambda = 3\n").unwrap();
        assert!(both.resolve(Some(10)).is_err());
        let bad_theta =
            ModelSpec::parse("pi = [1.0]\nP = [1]\nrho = 0.1\ntheta = \"mixture\"\n").unwrap();
        assert!(bad_theta.resolve(None).is_err());
    }
}
