//! Recovery metrics, the penalized objective, and an exhaustive
//! maximum-likelihood oracle for small graphs.

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::SignedGraph;
use crate::ssbm::GroundTruth;

/// Largest node count `brute_force_mle` will enumerate.
pub const BRUTE_FORCE_MAX_N: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("label vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("xi must be finite, got {0}")]
    InvalidXi(f64),
    #[error("label {0} is not +1 or -1")]
    BadLabel(i8),
    #[error("exhaustive search needs an even node count, got {0}")]
    OddNodeCount(usize),
    #[error("exhaustive search is capped at {max} nodes, got {n}")]
    TooLarge { n: usize, max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryMetrics {
    /// Labels equal the truth up to a global sign flip.
    pub exact: bool,
    pub misclassified: usize,
    pub error_rate: f64,
}

/// Hamming distance to the truth, minimized over the global sign.
pub fn compare(labels: &[i8], truth: &GroundTruth) -> Result<RecoveryMetrics, EvalError> {
    let t = truth.labels();
    if labels.len() != t.len() {
        return Err(EvalError::LengthMismatch {
            expected: t.len(),
            got: labels.len(),
        });
    }
    let differ = labels.iter().zip(t).filter(|(a, b)| a != b).count();
    let misclassified = differ.min(t.len() - differ);
    Ok(RecoveryMetrics {
        exact: misclassified == 0,
        misclassified,
        error_rate: if t.is_empty() {
            0.0
        } else {
            misclassified as f64 / t.len() as f64
        },
    })
}

fn check_labels(graph: &SignedGraph, labels: &[i8]) -> Result<(), EvalError> {
    if labels.len() != graph.n() {
        return Err(EvalError::LengthMismatch {
            expected: graph.n(),
            got: labels.len(),
        });
    }
    if let Some(&bad) = labels.iter().find(|&&x| x != 1 && x != -1) {
        return Err(EvalError::BadLabel(bad));
    }
    Ok(())
}

/// `(x^T A+ x, x^T A- x)` for a sign vector.
pub fn signed_quadratic_forms(graph: &SignedGraph, labels: &[i8]) -> (i64, i64) {
    let mut pos = 0i64;
    let mut neg = 0i64;
    for (i, &xi) in labels.iter().enumerate() {
        let xi = xi as i64;
        pos += graph
            .pos_neighbors(i)
            .iter()
            .map(|&j| xi * labels[j as usize] as i64)
            .sum::<i64>();
        neg += graph
            .neg_neighbors(i)
            .iter()
            .map(|&j| xi * labels[j as usize] as i64)
            .sum::<i64>();
    }
    (pos, neg)
}

/// `x^T (A+ - xi A- - rho E) x` with `rho` computed from `xi`.
pub fn objective(graph: &SignedGraph, xi: f64, labels: &[i8]) -> Result<f64, EvalError> {
    if !xi.is_finite() {
        return Err(EvalError::InvalidXi(xi));
    }
    check_labels(graph, labels)?;
    let (pos, neg) = signed_quadratic_forms(graph, labels);
    let rho = crate::solver::penalty(graph, xi);
    let sum: i64 = labels.iter().map(|&x| x as i64).sum();
    Ok(pos as f64 - xi * neg as f64 - rho * (sum * sum) as f64)
}

/// `x^T (mu A+ - nu A-) x`, the maximum-likelihood objective.
pub fn mle_objective(graph: &SignedGraph, mu: f64, nu: f64, labels: &[i8]) -> f64 {
    let (pos, neg) = signed_quadratic_forms(graph, labels);
    mu * pos as f64 - nu * neg as f64
}

/// Exhaustive maximizer of `x^T (mu A+ - nu A-) x` over balanced sign
/// vectors. The result has `x[0] = +1`; ties go to the lexicographically
/// smallest vector (ordering `-1 < +1`).
pub fn brute_force_mle(graph: &SignedGraph, mu: f64, nu: f64) -> Result<Vec<i8>, EvalError> {
    let n = graph.n();
    if !n.is_multiple_of(2) {
        return Err(EvalError::OddNodeCount(n));
    }
    if n > BRUTE_FORCE_MAX_N {
        return Err(EvalError::TooLarge {
            n,
            max: BRUTE_FORCE_MAX_N,
        });
    }
    // Bit k of `mask` (k = 0..n-1) is set iff node n-1-k is +1, so that
    // comparing masks numerically is the lexicographic order on vectors.
    let top = 1u32 << (n - 1);
    let to_labels = |mask: u32| -> Vec<i8> {
        (0..n)
            .map(|i| if mask >> (n - 1 - i) & 1 == 1 { 1 } else { -1 })
            .collect()
    };
    let best = (0..top)
        .into_par_iter()
        .map(|low| low | top)
        .filter(|m| m.count_ones() as usize == n / 2)
        .map(|m| (mle_objective(graph, mu, nu, &to_labels(m)), m))
        .reduce(
            || (f64::NEG_INFINITY, u32::MAX),
            |a, b| {
                if a.0 > b.0 || (a.0 == b.0 && a.1 < b.1) {
                    a
                } else {
                    b
                }
            },
        );
    Ok(to_labels(best.1))
}

/// Flips `labels` so the first entry is `+1`.
pub fn canonical_sign(labels: &[i8]) -> Vec<i8> {
    match labels.first() {
        Some(&-1) => labels.iter().map(|x| -x).collect(),
        _ => labels.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ssbm::sample_raw;

    fn fixture() -> SignedGraph {
        sample_raw(4, 1.0, 0.0, 0.0, 1.0, 0).unwrap().0
    }

    #[test]
    fn compare_cases() {
        let t = GroundTruth::planted(10);
        let x: Vec<i8> = t.labels().to_vec();
        let m = compare(&x, &t).unwrap();
        assert!(m.exact && m.misclassified == 0);
        let neg: Vec<i8> = x.iter().map(|v| -v).collect();
        assert!(compare(&neg, &t).unwrap().exact);
        let mut three = x.clone();
        for k in [0, 4, 7] {
            three[k] = -three[k];
        }
        let m = compare(&three, &t).unwrap();
        assert_eq!((m.exact, m.misclassified), (false, 3));
        assert!((m.error_rate - 0.3).abs() < 1e-15);
        assert!(compare(&x[..9], &t).is_err());
    }

    #[test]
    fn objective_cases() {
        let g = fixture();
        assert_eq!(objective(&g, 1.0, &[1, 1, -1, -1]).unwrap(), 12.0);
        assert_eq!(objective(&g, 1.0, &[-1, -1, 1, 1]).unwrap(), 12.0);
        assert_eq!(objective(&g, 2.5, &[1; 4]).unwrap(), 0.0);
        assert_eq!(objective(&g, -0.5, &[1; 4]).unwrap(), 0.0);
        assert!(matches!(objective(&g, f64::NAN, &[1; 4]), Err(EvalError::InvalidXi(_))));
        assert_eq!(objective(&g, 1.0, &[1, 0, 1, 1]), Err(EvalError::BadLabel(0)));
    }

    #[test]
    fn brute_force_fixture() {
        let g = fixture();
        assert_eq!(brute_force_mle(&g, 1.0, 1.0).unwrap(), vec![1, 1, -1, -1]);
    }

    #[test]
    fn brute_force_empty_graph_tie_break() {
        let g = sample_raw(4, 0.0, 0.0, 0.0, 0.0, 0).unwrap().0;
        // Balanced vectors with x0 = +1: (+,-,-,+), (+,-,+,-), (+,+,-,-).
        assert_eq!(brute_force_mle(&g, 1.0, 1.0).unwrap(), vec![1, -1, -1, 1]);
    }

    #[test]
    fn brute_force_limits() {
        let g = sample_raw(22, 0.1, 0.1, 0.1, 0.1, 0).unwrap().0;
        assert!(matches!(
            brute_force_mle(&g, 1.0, 1.0),
            Err(EvalError::TooLarge { n: 22, .. })
        ));
        let odd = SignedGraph::from_edges(3, [(0, 1, crate::graph::Sign::Positive)]).unwrap();
        assert_eq!(brute_force_mle(&odd, 1.0, 1.0), Err(EvalError::OddNodeCount(3)));
    }
}
