//! Two-stage solver for `max { x^T W x : x in {1,-1}^n }` with
//! `W = A+ - xi A- - rho E` and `rho = 1^T (A+ - xi A-) 1 / n^2`.
//!
//! Stage one runs power iterations from a uniformly random unit vector to
//! approximate the leading eigenvector of `W`. Stage two rounds it to signs
//! and runs generalized power iterations `x <- sign(W x)` until a fixed
//! point. `W` is never formed: `W v = A+ v - xi A- v - rho (1^T v) 1`.

use std::ops::{Add, Mul, Sub};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::eval;
use crate::graph::{GraphError, SignedGraph};

/// Tolerance on `min(|y_t - y_{t-1}|, |y_t + y_{t-1}|)` for stopping the
/// power stage early.
pub const PI_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("xi must be finite, got {0}")]
    InvalidXi(f64),
    #[error("iteration caps must be at least 1")]
    ZeroIterationCap,
    #[error("W y vanished at power iteration {0}")]
    DegenerateOperator(usize),
    #[error("start vector has zero norm")]
    ZeroStart,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Eval(#[from] crate::eval::EvalError),
}

/// Arithmetic used by the operator kernel. Generic so tests can count
/// floating-point operations.
pub(crate) trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
    fn zero() -> Self;
    fn from_f64(x: f64) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
}

/// Implicit `W = A+ - xi A- - rho E` over a borrowed graph.
#[derive(Debug, Clone, Copy)]
pub struct WOperator<'g> {
    graph: &'g SignedGraph,
    xi: f64,
    rho: f64,
}

impl<'g> WOperator<'g> {
    pub fn new(graph: &'g SignedGraph, xi: f64) -> Result<Self, SolverError> {
        if !xi.is_finite() {
            return Err(SolverError::InvalidXi(xi));
        }
        Ok(WOperator {
            graph,
            xi,
            rho: penalty(graph, xi),
        })
    }

    pub fn graph(&self) -> &'g SignedGraph {
        self.graph
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>, SolverError> {
        let mut out = vec![0.0; v.len()];
        self.apply_into(v, &mut out)?;
        Ok(out)
    }

    pub fn apply_into(&self, v: &[f64], out: &mut [f64]) -> Result<(), SolverError> {
        self.graph.check_len(v.len())?;
        self.graph.check_len(out.len())?;
        self.kernel(v, out);
        Ok(())
    }

    /// `W x` for a sign vector.
    pub fn apply_signs(&self, x: &[i8]) -> Result<Vec<f64>, SolverError> {
        let v: Vec<f64> = x.iter().map(|&s| s as f64).collect();
        self.apply(&v)
    }

    pub(crate) fn kernel<T: Scalar>(&self, v: &[T], out: &mut [T]) {
        let g = self.graph;
        let xi = T::from_f64(self.xi);
        let mut total = T::zero();
        for &x in v {
            total = total + x;
        }
        let shift = T::from_f64(self.rho) * total;
        for (i, o) in out.iter_mut().enumerate() {
            let mut sp = T::zero();
            for &j in g.pos_neighbors(i) {
                sp = sp + v[j as usize];
            }
            let mut sn = T::zero();
            for &j in g.neg_neighbors(i) {
                sn = sn + v[j as usize];
            }
            *o = sp - xi * sn - shift;
        }
    }
}

/// `rho = (2 N+ - 2 xi N-) / n^2`.
pub fn penalty(graph: &SignedGraph, xi: f64) -> f64 {
    let n = graph.n() as f64;
    (2.0 * graph.n_pos() as f64 - 2.0 * xi * graph.n_neg() as f64) / (n * n)
}

pub fn build_w(graph: &SignedGraph, xi: f64) -> Result<WOperator<'_>, SolverError> {
    WOperator::new(graph, xi)
}

/// Default cap for both stages: `max(10, ceil(3 ln n / max(1, ln ln n)))`.
pub fn default_iteration_cap(n: usize) -> usize {
    let l = (n.max(2) as f64).ln();
    let ll = l.ln().max(1.0);
    ((3.0 * l / ll).ceil() as usize).max(10)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub xi: f64,
    pub t1_max: usize,
    pub t2_max: usize,
    pub seed: u64,
}

impl SolverConfig {
    /// Default iteration caps for a graph with `n` nodes.
    pub fn new(xi: f64, n: usize, seed: u64) -> Self {
        let cap = default_iteration_cap(n);
        SolverConfig {
            xi,
            t1_max: cap,
            t2_max: cap,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !self.xi.is_finite() {
            return Err(SolverError::InvalidXi(self.xi));
        }
        if self.t1_max == 0 || self.t2_max == 0 {
            return Err(SolverError::ZeroIterationCap);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    pub labels: Vec<i8>,
    pub pi_iters: usize,
    pub gpi_iters: usize,
    /// The sign iteration reached a fixed point within `t2_max` steps.
    pub converged: bool,
    pub objective: f64,
}

/// Gaussian draw normalized to the unit sphere.
pub fn random_unit_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut y: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = l2(&y);
        if norm > 0.0 {
            y.iter_mut().for_each(|v| *v /= norm);
            return y;
        }
    }
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Power iterations from a random unit start. Returns the final unit vector
/// and the number of steps taken.
pub fn power_stage(
    w: &WOperator<'_>,
    t1_max: usize,
    seed: u64,
) -> Result<(Vec<f64>, usize), SolverError> {
    let y0 = random_unit_vector(w.n(), seed);
    power_stage_from(w, y0, t1_max)
}

/// Power iterations from a given start vector (normalized first).
pub fn power_stage_from(
    w: &WOperator<'_>,
    mut y: Vec<f64>,
    t1_max: usize,
) -> Result<(Vec<f64>, usize), SolverError> {
    if t1_max == 0 {
        return Err(SolverError::ZeroIterationCap);
    }
    w.graph.check_len(y.len())?;
    let norm = l2(&y);
    if norm == 0.0 {
        return Err(SolverError::ZeroStart);
    }
    y.iter_mut().for_each(|v| *v /= norm);
    let mut next = vec![0.0; y.len()];
    for t in 1..=t1_max {
        w.kernel(&y, &mut next);
        let norm = l2(&next);
        if norm == 0.0 {
            return Err(SolverError::DegenerateOperator(t));
        }
        let (mut diff, mut sum) = (0.0, 0.0);
        for (a, b) in next.iter_mut().zip(&y) {
            *a /= norm;
            diff += (*a - b) * (*a - b);
            sum += (*a + b) * (*a + b);
        }
        std::mem::swap(&mut y, &mut next);
        if diff.min(sum).sqrt() <= PI_TOLERANCE {
            return Ok((y, t));
        }
    }
    Ok((y, t1_max))
}

/// Entrywise sign with zeros mapped to `+1`.
pub fn sign_project(v: &[f64]) -> Vec<i8> {
    v.iter().map(|&x| if x >= 0.0 { 1 } else { -1 }).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GpiOutcome {
    pub labels: Vec<i8>,
    pub iters: usize,
    pub converged: bool,
}

/// Iterates `x <- sign(W x)` until a fixed point or `t2_max` steps.
pub fn gpi_stage(
    w: &WOperator<'_>,
    x0: &[i8],
    t2_max: usize,
) -> Result<GpiOutcome, SolverError> {
    if t2_max == 0 {
        return Err(SolverError::ZeroIterationCap);
    }
    w.graph.check_len(x0.len())?;
    let mut x: Vec<f64> = x0.iter().map(|&s| s as f64).collect();
    let mut wx = vec![0.0; x.len()];
    for t in 1..=t2_max {
        w.kernel(&x, &mut wx);
        let mut changed = false;
        for (xi, &v) in x.iter_mut().zip(&wx) {
            let s = if v >= 0.0 { 1.0 } else { -1.0 };
            if s != *xi {
                changed = true;
                *xi = s;
            }
        }
        if !changed {
            return Ok(GpiOutcome {
                labels: to_signs(&x),
                iters: t,
                converged: true,
            });
        }
    }
    Ok(GpiOutcome {
        labels: to_signs(&x),
        iters: t2_max,
        converged: false,
    })
}

fn to_signs(x: &[f64]) -> Vec<i8> {
    x.iter().map(|&v| if v > 0.0 { 1 } else { -1 }).collect()
}

/// Runs both stages and scores the output labeling.
pub fn solve(graph: &SignedGraph, config: &SolverConfig) -> Result<RecoveryResult, SolverError> {
    config.validate()?;
    let w = build_w(graph, config.xi)?;
    let (y, pi_iters) = power_stage(&w, config.t1_max, config.seed)?;
    let x0 = sign_project(&y);
    let gpi = gpi_stage(&w, &x0, config.t2_max)?;
    let objective = eval::objective(graph, config.xi, &gpi.labels)?;
    Ok(RecoveryResult {
        labels: gpi.labels,
        pi_iters,
        gpi_iters: gpi.iters,
        converged: gpi.converged,
        objective,
    })
}
