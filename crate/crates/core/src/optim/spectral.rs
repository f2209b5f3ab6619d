use rand::Rng as _;

use crate::criteria::CriterionKind;
use crate::error::{Error, Result};
use crate::graph::{Graph, Labeling};
use crate::rng::rng_from_seed;

/// Leading-eigenvector bisection of a modularity matrix.
#[derive(Clone, Debug)]
pub struct SpectralResult {
    /// Label 0 for nonnegative eigenvector entries, 1 for negative ones.
    pub labeling: Labeling,
    /// Unit-norm leading eigenvector estimate.
    pub eigenvector: Vec<f64>,
    /// Rayleigh quotient of `eigenvector`.
    pub eigenvalue: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Computes `B v` without forming `B`.
///
/// NGM uses `B = A − d dᵀ / L`, ERM uses `B = A − (L / n²) 1 1ᵀ`, where a
/// self-loop contributes 1 to the diagonal of `A`.
pub fn modularity_matrix_apply(g: &Graph, kind: CriterionKind, v: &[f64]) -> Result<Vec<f64>> {
    let n = g.n();
    if v.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: v.len(),
        });
    }
    let total = g.total_degree() as f64;
    if total == 0.0 {
        return Err(Error::EmptyGraph);
    }
    let mut out: Vec<f64> = (0..n)
        .map(|i| g.neighbors(i).iter().map(|&j| v[j]).sum())
        .collect();
    match kind {
        CriterionKind::Ngm => {
            let dv: f64 = (0..n).map(|i| g.degree(i) as f64 * v[i]).sum();
            let scale = dv / total;
            for (i, o) in out.iter_mut().enumerate() {
                *o -= g.degree(i) as f64 * scale;
            }
        }
        CriterionKind::Erm => {
            let shift = total / (n as f64 * n as f64) * v.iter().sum::<f64>();
            for o in out.iter_mut() {
                *o -= shift;
            }
        }
        other => {
            return Err(Error::Unsupported(format!(
                "spectral bisection is defined for modularities, not {other}"
            )))
        }
    }
    Ok(out)
}

/// Splits the graph in two by the signs of the leading eigenvector of the
/// modularity matrix, found by power iteration on `B + cI`.
///
/// The shift `c` is a Gershgorin bound on `−λ_min(B)`, so the iteration
/// targets the algebraically largest eigenvalue. Convergence is declared once
/// successive normalized iterates differ by less than `tol` in max-norm; the
/// result reports whether that happened within `max_iters`.
pub fn spectral_bisect(
    g: &Graph,
    kind: CriterionKind,
    tol: f64,
    max_iters: usize,
    seed: u64,
) -> Result<SpectralResult> {
    if !kind.is_modularity() {
        return Err(Error::Unsupported(format!(
            "spectral bisection is defined for modularities, not {kind}"
        )));
    }
    let n = g.n();
    if n < 2 {
        return Err(Error::validation(
            "spectral bisection needs at least two nodes",
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::validation("tolerance must be positive"));
    }
    let total = g.total_degree() as f64;
    if total == 0.0 {
        return Err(Error::EmptyGraph);
    }
    let d_max = (0..n).map(|i| g.degree(i)).max().unwrap_or(0) as f64;
    let shift = match kind {
        CriterionKind::Ngm => 2.0 * d_max,
        _ => d_max + total / n as f64,
    };

    let mut rng = rng_from_seed(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    normalize(&mut v);

    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iters {
        iterations += 1;
        let mut w = modularity_matrix_apply(g, kind, &v)?;
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi += shift * vi;
        }
        if normalize(&mut w) == 0.0 {
            // v lies in the kernel of B + cI; restart from a fresh direction
            w = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            normalize(&mut w);
        }
        let diff = w
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = w;
        if diff < tol {
            converged = true;
            break;
        }
    }

    let bv = modularity_matrix_apply(g, kind, &v)?;
    let eigenvalue = bv.iter().zip(&v).map(|(a, b)| a * b).sum();
    let labels = v.iter().map(|&x| usize::from(x < 0.0)).collect();
    Ok(SpectralResult {
        labeling: Labeling::new(labels, 2)?,
        eigenvector: v,
        eigenvalue,
        iterations,
        converged,
    })
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}
