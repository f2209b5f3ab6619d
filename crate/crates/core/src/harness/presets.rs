//! The simulation designs, one preset per design and expected degree.
//!
//! Desk scale uses `n = 300` and 20 replications; `full` restores `n = 1000`
//! and 100 replications. The expected degrees 12 and 125 come from the
//! published design; 40 is our choice for the intermediate regime.

use crate::criteria::CriterionKind;

use super::experiment::{ExperimentSpec, Method, Metric, SweepParam};

pub const LAMBDAS: [f64; 3] = [12.0, 40.0, 125.0];
pub const DESK_N: usize = 300;
pub const DESK_REPS: usize = 20;
pub const FULL_N: usize = 1000;
pub const FULL_REPS: usize = 100;

const DESIGNS: [&str; 4] = ["degree-ratio", "balance", "unbalanced-degree", "mixture"];

/// All preset names, e.g. `degree-ratio-lambda40`.
pub fn preset_names() -> Vec<String> {
    DESIGNS
        .iter()
        .flat_map(|d| LAMBDAS.iter().map(move |l| format!("{d}-lambda{l}")))
        .collect()
}

fn grid(start: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| ((start + step * i as f64) * 1e6).round() / 1e6)
        .collect()
}

/// The preset called `name`, or `None`.
///
/// - `degree-ratio`: two-point θ, `m = 1..10`, balanced communities
/// - `balance`: standard block model, `π = 0.10, 0.15, …, 0.50`
/// - `unbalanced-degree`: two-point θ, `m = 1..10`, `π = 0.3`
/// - `mixture`: mixture θ with `m = 10`, `α = 0, 0.1, …, 1`, balanced communities
pub fn preset(name: &str, full: bool) -> Option<ExperimentSpec> {
    let (design, lambda) = name.split_once("-lambda")?;
    let lambda: f64 = lambda.parse().ok()?;
    if !LAMBDAS.contains(&lambda) {
        return None;
    }
    let (n, replications) = if full {
        (FULL_N, FULL_REPS)
    } else {
        (DESK_N, DESK_REPS)
    };
    let base = ExperimentSpec {
        name: name.to_string(),
        n,
        pi: vec![0.5, 0.5],
        p: vec![4.0, 1.0, 1.0, 4.0],
        theta: "two-point".into(),
        m: 1.0,
        alpha: 0.0,
        lambda,
        sweep: SweepParam::M,
        values: grid(1.0, 1.0, 10),
        criteria: CriterionKind::ALL.to_vec(),
        method: Method::tabu(),
        replications,
        metric: Metric::Ari,
        seed: 0,
    };
    Some(match design {
        "degree-ratio" => base,
        "balance" => ExperimentSpec {
            theta: "constant".into(),
            sweep: SweepParam::Pi,
            values: grid(0.1, 0.05, 9),
            ..base
        },
        "unbalanced-degree" => ExperimentSpec {
            pi: vec![0.3, 0.7],
            ..base
        },
        "mixture" => ExperimentSpec {
            theta: "mixture".into(),
            m: 10.0,
            sweep: SweepParam::Alpha,
            values: grid(0.0, 0.1, 11),
            ..base
        },
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves_and_validates() {
        let names = preset_names();
        assert_eq!(names.len(), 12);
        for name in names {
            let spec = preset(&name, false).unwrap();
            spec.validate().unwrap();
            assert_eq!((spec.n, spec.replications), (DESK_N, DESK_REPS));
        }
        assert_eq!(preset("degree-ratio-lambda40", true).unwrap().n, FULL_N);
        assert!(preset("bogus-lambda40", false).is_none());
        assert!(preset("degree-ratio-lambda41", false).is_none());
    }

    #[test]
    fn sweep_grids() {
        assert_eq!(
            preset("balance-lambda12", false).unwrap().values.last(),
            Some(&0.5)
        );
        let alphas = preset("mixture-lambda40", false).unwrap().values;
        assert_eq!((alphas[0], alphas[10], alphas[3]), (0.0, 1.0, 0.3));
    }

    #[test]
    fn desk_points_are_feasible_at_moderate_degree() {
        for name in [
            "degree-ratio-lambda40",
            "unbalanced-degree-lambda40",
            "mixture-lambda40",
        ] {
            let spec = preset(name, false).unwrap();
            for &v in &spec.values {
                spec.params_at(v).unwrap();
            }
        }
    }
}
