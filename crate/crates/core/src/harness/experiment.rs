use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::CriterionKind;
use crate::error::{Error, Result};
use crate::eval::{adjusted_rand, nmi};
use crate::graph::{Graph, Labeling};
use crate::models::{parse_theta, rho_for_expected_degree, sample_network, DcbmParams};
use crate::optim::{spectral_bisect, tabu_search, TabuConfig};
use crate::rng::derive_seed;

/// Parameter varied across sweep points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    /// Two-point degree ratio.
    M,
    /// Mixture weight of the uniform component.
    Alpha,
    /// Size of the first of two communities.
    Pi,
    /// Expected degree.
    Lambda,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::M => "m",
            SweepParam::Alpha => "alpha",
            SweepParam::Pi => "pi",
            SweepParam::Lambda => "lambda",
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "m" => Ok(SweepParam::M),
            "alpha" => Ok(SweepParam::Alpha),
            "pi" => Ok(SweepParam::Pi),
            "lambda" => Ok(SweepParam::Lambda),
            other => Err(Error::validation(format!(
                "unknown sweep parameter {other:?} (expected m, alpha, pi or lambda)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Ari,
    Nmi,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Ari => "ari",
            Metric::Nmi => "nmi",
        }
    }

    pub fn compute(self, detected: &Labeling, truth: &Labeling) -> Result<f64> {
        match self {
            Metric::Ari => adjusted_rand(detected.as_slice(), truth.as_slice()),
            Metric::Nmi => nmi(detected.as_slice(), truth.as_slice()),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ari" => Ok(Metric::Ari),
            "nmi" => Ok(Metric::Nmi),
            other => Err(Error::validation(format!(
                "unknown metric {other:?} (expected ari or nmi)"
            ))),
        }
    }
}

/// Optimizer and its settings. Unset tabu fields take the size-based defaults
/// of [`TabuConfig::for_nodes`].
#[derive(Clone, Debug, PartialEq)]
pub enum Method {
    Tabu {
        tenure: Option<usize>,
        restarts: Option<usize>,
        max_iters: Option<usize>,
        max_stall: Option<usize>,
    },
    Spectral {
        tol: f64,
        max_iters: usize,
    },
}

pub const DEFAULT_SPECTRAL_TOL: f64 = 1e-8;
pub const DEFAULT_SPECTRAL_ITERS: usize = 20_000;

impl Method {
    pub fn tabu() -> Self {
        Method::Tabu {
            tenure: None,
            restarts: None,
            max_iters: None,
            max_stall: None,
        }
    }

    pub fn spectral() -> Self {
        Method::Spectral {
            tol: DEFAULT_SPECTRAL_TOL,
            max_iters: DEFAULT_SPECTRAL_ITERS,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::Tabu { .. } => "tabu",
            Method::Spectral { .. } => "spectral",
        }
    }

    /// Full tabu settings for a graph with `n` nodes.
    pub fn tabu_config(&self, n: usize, seed: u64) -> Option<TabuConfig> {
        match *self {
            Method::Tabu {
                tenure,
                restarts,
                max_iters,
                max_stall,
            } => {
                let mut cfg = TabuConfig::for_nodes(n, seed);
                cfg.tenure = tenure.unwrap_or(cfg.tenure);
                cfg.restarts = restarts.unwrap_or(cfg.restarts);
                cfg.max_iters = max_iters.unwrap_or(cfg.max_iters);
                cfg.max_stall = max_stall.unwrap_or(cfg.max_stall.min(cfg.max_iters));
                Some(cfg)
            }
            Method::Spectral { .. } => None,
        }
    }
}

/// Finds `k` communities in `g` by maximizing `kind` with `method`.
pub fn detect(
    g: &Graph,
    k: usize,
    kind: CriterionKind,
    method: &Method,
    seed: u64,
) -> Result<Labeling> {
    match method {
        Method::Tabu { .. } => {
            let cfg = method.tabu_config(g.n(), seed).expect("tabu method");
            Ok(tabu_search(g, k, kind, &cfg)?.labeling)
        }
        &Method::Spectral { tol, max_iters } => {
            if k != 2 {
                return Err(Error::Unsupported(format!(
                    "spectral bisection finds 2 communities, not {k}"
                )));
            }
            Ok(spectral_bisect(g, kind, tol, max_iters, seed)?.labeling)
        }
    }
}

/// A replicated simulation: networks from a block model at each sweep point,
/// every criterion maximized on every network, agreement with the truth
/// recorded.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub n: usize,
    pub pi: Vec<f64>,
    /// Row-major `K × K` connectivity before scaling by `ρ`.
    pub p: Vec<f64>,
    /// `constant`, `two-point` or `mixture`.
    pub theta: String,
    pub m: f64,
    pub alpha: f64,
    /// Expected degree; determines `ρ`.
    pub lambda: f64,
    pub sweep: SweepParam,
    pub values: Vec<f64>,
    pub criteria: Vec<CriterionKind>,
    pub method: Method,
    pub replications: usize,
    pub metric: Metric,
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn k(&self) -> usize {
        self.pi.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications < 1 {
            return Err(Error::validation("replications must be at least 1"));
        }
        if self.values.is_empty() {
            return Err(Error::validation("sweep values must be non-empty"));
        }
        if self.criteria.is_empty() {
            return Err(Error::validation("at least one criterion is required"));
        }
        if self.k() == 0 || self.n < self.k() {
            return Err(Error::validation(format!(
                "need 1 <= K <= n, got K={}, n={}",
                self.k(),
                self.n
            )));
        }
        if self.sweep == SweepParam::Pi && self.k() != 2 {
            return Err(Error::validation("a pi sweep needs K = 2"));
        }
        if let Method::Spectral { tol, .. } = self.method {
            if !(tol > 0.0) {
                return Err(Error::validation("spectral tolerance must be positive"));
            }
        }
        Ok(())
    }

    /// Model parameters at one sweep value, with `ρ` set from `λ`.
    pub fn params_at(&self, value: f64) -> Result<DcbmParams> {
        let (mut pi, mut m, mut alpha, mut lambda) =
            (self.pi.clone(), self.m, self.alpha, self.lambda);
        match self.sweep {
            SweepParam::M => m = value,
            SweepParam::Alpha => alpha = value,
            SweepParam::Pi => pi = vec![value, 1.0 - value],
            SweepParam::Lambda => lambda = value,
        }
        let theta = parse_theta(&self.theta, Some(m), Some(alpha))?;
        let mut params = DcbmParams::new(pi, self.p.clone(), 0.0, theta);
        params.rho = rho_for_expected_degree(lambda, self.n, &params)?;
        params.validate()
    }

    /// Reads a flat TOML spec file; see the crate README for the keys.
    pub fn parse(text: &str) -> Result<Self> {
        let file: SpecFile = toml::from_str(text).map_err(|e| Error::Parse {
            line: e
                .span()
                .map(|s| text[..s.start.min(text.len())].lines().count().max(1))
                .unwrap_or(0),
            message: e.message().to_string(),
        })?;
        file.into_spec()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    #[serde(default = "default_name")]
    name: String,
    n: usize,
    #[serde(default = "default_pi")]
    pi: Vec<f64>,
    #[serde(rename = "P", default = "default_p")]
    p: Vec<f64>,
    #[serde(default = "default_theta")]
    theta: String,
    #[serde(default = "one")]
    m: f64,
    #[serde(default)]
    alpha: f64,
    lambda: f64,
    sweep: String,
    values: Vec<f64>,
    #[serde(default = "default_criteria")]
    criteria: Vec<String>,
    #[serde(default = "default_method")]
    method: String,
    tenure: Option<usize>,
    restarts: Option<usize>,
    max_iters: Option<usize>,
    max_stall: Option<usize>,
    spectral_tol: Option<f64>,
    spectral_max_iters: Option<usize>,
    replications: usize,
    #[serde(default = "default_metric")]
    metric: String,
    #[serde(default)]
    seed: u64,
}

fn default_name() -> String {
    "custom".into()
}
fn default_pi() -> Vec<f64> {
    vec![0.5, 0.5]
}
fn default_p() -> Vec<f64> {
    vec![4.0, 1.0, 1.0, 4.0]
}
fn default_theta() -> String {
    "two-point".into()
}
fn one() -> f64 {
    1.0
}
fn default_criteria() -> Vec<String> {
    CriterionKind::ALL
        .iter()
        .map(|c| c.name().to_string())
        .collect()
}
fn default_method() -> String {
    "tabu".into()
}
fn default_metric() -> String {
    "ari".into()
}

impl SpecFile {
    fn into_spec(self) -> Result<ExperimentSpec> {
        let method = match self.method.as_str() {
            "tabu" => Method::Tabu {
                tenure: self.tenure,
                restarts: self.restarts,
                max_iters: self.max_iters,
                max_stall: self.max_stall,
            },
            "spectral" => Method::Spectral {
                tol: self.spectral_tol.unwrap_or(DEFAULT_SPECTRAL_TOL),
                max_iters: self.spectral_max_iters.unwrap_or(DEFAULT_SPECTRAL_ITERS),
            },
            other => {
                return Err(Error::validation(format!(
                    "unknown method {other:?} (expected tabu or spectral)"
                )))
            }
        };
        let spec = ExperimentSpec {
            name: self.name,
            n: self.n,
            pi: self.pi,
            p: self.p,
            theta: self.theta,
            m: self.m,
            alpha: self.alpha,
            lambda: self.lambda,
            sweep: self.sweep.parse()?,
            values: self.values,
            criteria: self
                .criteria
                .iter()
                .map(|c| c.parse())
                .collect::<Result<_>>()?,
            method,
            replications: self.replications,
            metric: self.metric.parse()?,
            seed: self.seed,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// One CSV record. `replication` is an index, `median` for summary rows or
/// `error` for failures, whose `value` holds the message.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub sweep_param: String,
    pub sweep_value: f64,
    pub criterion: String,
    pub method: String,
    pub replication: String,
    pub metric: String,
    pub value: String,
    pub seed: u64,
}

impl Row {
    pub fn is_summary(&self) -> bool {
        self.replication == "median"
    }

    pub fn is_error(&self) -> bool {
        self.replication == "error"
    }

    /// The numeric value of a replication or summary row.
    pub fn number(&self) -> Option<f64> {
        if self.is_error() {
            None
        } else {
            self.value.parse().ok()
        }
    }
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    })
}

/// Runs every sweep point and replication.
///
/// Replication `r` at sweep index `s` samples its network from seed
/// `derive_seed(seed, [s, r])`; all criteria are scored on that same network.
/// Output order is (sweep value, criterion, replication), with each
/// criterion's median row after its replications. Failures become error rows
/// and the run continues.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<Row>> {
    spec.validate()?;
    let row = |value: f64, kind: CriterionKind, replication: String, out: String, seed: u64| Row {
        sweep_param: spec.sweep.name().into(),
        sweep_value: value,
        criterion: kind.name().into(),
        method: spec.method.name().into(),
        replication,
        metric: spec.metric.name().into(),
        value: out,
        seed,
    };

    let mut rows = Vec::new();
    for (si, &value) in spec.values.iter().enumerate() {
        let params = match spec.params_at(value) {
            Ok(p) => p,
            Err(e) => {
                for &kind in &spec.criteria {
                    rows.push(row(value, kind, "error".into(), e.to_string(), spec.seed));
                }
                continue;
            }
        };
        let reps: Vec<(u64, Vec<Result<f64>>)> = (0..spec.replications)
            .into_par_iter()
            .map(|r| {
                let seed = derive_seed(spec.seed, &[si as u64, r as u64]);
                (seed, run_replication(spec, &params, seed))
            })
            .collect();
        for (ci, &kind) in spec.criteria.iter().enumerate() {
            let mut ok = Vec::new();
            for (r, (seed, results)) in reps.iter().enumerate() {
                match &results[ci] {
                    Ok(v) => {
                        ok.push(*v);
                        rows.push(row(value, kind, r.to_string(), v.to_string(), *seed));
                    }
                    Err(e) => rows.push(row(value, kind, "error".into(), e.to_string(), *seed)),
                }
            }
            if let Some(med) = median(&ok) {
                rows.push(row(
                    value,
                    kind,
                    "median".into(),
                    med.to_string(),
                    spec.seed,
                ));
            }
        }
    }
    Ok(rows)
}

fn run_replication(spec: &ExperimentSpec, params: &DcbmParams, seed: u64) -> Vec<Result<f64>> {
    let net = match sample_network(params, spec.n, seed) {
        Ok(net) => net,
        Err(e) => {
            let msg = e.to_string();
            return spec
                .criteria
                .iter()
                .map(|_| Err(Error::validation(msg.clone())))
                .collect();
        }
    };
    spec.criteria
        .iter()
        .enumerate()
        .map(|(ci, &kind)| {
            let found = detect(
                &net.graph,
                spec.k(),
                kind,
                &spec.method,
                derive_seed(seed, &[1 + ci as u64]),
            )?;
            spec.metric.compute(&found, &net.labels)
        })
        .collect()
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

/// Median rows keyed by `(sweep value, criterion)`.
pub fn medians(rows: &[Row]) -> Vec<(f64, String, f64)> {
    rows.iter()
        .filter(|r| r.is_summary())
        .filter_map(|r| Some((r.sweep_value, r.criterion.clone(), r.number()?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> ExperimentSpec {
        ExperimentSpec {
            name: "small".into(),
            n: 60,
            pi: vec![0.5, 0.5],
            p: vec![4.0, 1.0, 1.0, 4.0],
            theta: "two-point".into(),
            m: 1.0,
            alpha: 0.0,
            lambda: 15.0,
            sweep: SweepParam::M,
            values: vec![1.0, 3.0],
            criteria: CriterionKind::ALL.to_vec(),
            method: Method::Tabu {
                tenure: None,
                restarts: Some(3),
                max_iters: Some(2000),
                max_stall: Some(200),
            },
            replications: 2,
            metric: Metric::Ari,
            seed: 9,
        }
    }

    fn to_csv(rows: &[Row]) -> Vec<u8> {
        let mut buf = Vec::new();
        write_csv(rows, &mut buf).unwrap();
        buf
    }

    #[test]
    fn rows_and_order() {
        let rows = run_experiment(&small_spec()).unwrap();
        // 2 sweep values x 4 criteria x (2 reps + median)
        assert_eq!(rows.len(), 24);
        assert_eq!(rows[0].replication, "0");
        assert_eq!(rows[2].replication, "median");
        assert_eq!(rows[3].criterion, "ngm");
        assert!(rows.iter().all(|r| !r.is_error()));
    }

    #[test]
    fn csv_header_and_determinism() {
        let spec = ExperimentSpec {
            replications: 1,
            values: vec![2.0],
            ..small_spec()
        };
        let a = to_csv(&run_experiment(&spec).unwrap());
        let b = to_csv(&run_experiment(&spec).unwrap());
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with(
            "sweep_param,sweep_value,criterion,method,replication,metric,value,seed\n"
        ));
    }

    #[test]
    fn zero_degree_gives_error_rows() {
        let spec = ExperimentSpec {
            lambda: 0.0,
            values: vec![1.0],
            replications: 1,
            ..small_spec()
        };
        let rows = run_experiment(&spec).unwrap();
        assert!(!rows.is_empty());
        assert!(rows.iter().all(|r| r.is_error()), "{rows:?}");
    }

    #[test]
    fn infeasible_point_is_reported() {
        let spec = ExperimentSpec {
            lambda: 50.0,
            values: vec![10.0],
            ..small_spec()
        };
        let rows = run_experiment(&spec).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows
            .iter()
            .all(|r| r.is_error() && r.value.contains("infeasible")));
    }

    #[test]
    fn spec_validation() {
        assert!(ExperimentSpec {
            replications: 0,
            ..small_spec()
        }
        .validate()
        .is_err());
        assert!(ExperimentSpec {
            values: vec![],
            ..small_spec()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn parses_spec_file() {
        let spec = ExperimentSpec::parse(
            "n = 100\nlambda = 20\nsweep = \"alpha\"\nvalues = [0, 0.5]\ntheta = \"mixture\"\nm = 10\n\
             replications = 3\ncriteria = [\"ngm\", \"erm\"]\nmethod = \"spectral\"\nseed = 4\n",
        )
        .unwrap();
        assert_eq!(spec.sweep, SweepParam::Alpha);
        assert_eq!(spec.criteria, vec![CriterionKind::Ngm, CriterionKind::Erm]);
        assert_eq!(spec.method, Method::spectral());
        assert!(ExperimentSpec::parse("n = 100\nbogus = 1\n").is_err());
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }
}
