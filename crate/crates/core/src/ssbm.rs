//! Sampling from the signed stochastic block model with two equal planted
//! communities.
//!
//! Every unordered pair `{i, j}` with `i < j` consumes exactly one uniform
//! draw, thresholded against the cumulative probabilities in the order
//! positive, negative, absent. Row `i` draws from its own ChaCha8 stream
//! (`seed_from_u64(seed)` with stream id `i`), so the output depends only on
//! `(params, seed)` and never on how rows are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::SignedGraph;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("node count must be even and at least 4, got {0}")]
    BadNodeCount(usize),
    #[error("rate {name} = {value} must be strictly positive and finite")]
    NonPositiveRate { name: &'static str, value: f64 },
    #[error("probability {name} = {value} outside [0, 1]")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },
    #[error("{name} = {value} exceeds 1")]
    ProbabilitySumTooLarge { name: &'static str, value: f64 },
}

/// Rates `(alpha+, beta+, alpha-, beta-)` of the logarithmic regime, with
/// `p = alpha log(n)/n` within communities and `q = beta log(n)/n` across.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsbmParams {
    pub n: usize,
    pub alpha_plus: f64,
    pub beta_plus: f64,
    pub alpha_minus: f64,
    pub beta_minus: f64,
}

/// Connection probabilities of one model instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probabilities {
    pub p_plus: f64,
    pub p_minus: f64,
    pub q_plus: f64,
    pub q_minus: f64,
}

impl SsbmParams {
    pub fn new(
        n: usize,
        alpha_plus: f64,
        beta_plus: f64,
        alpha_minus: f64,
        beta_minus: f64,
    ) -> Result<Self, ModelError> {
        let p = SsbmParams {
            n,
            alpha_plus,
            beta_plus,
            alpha_minus,
            beta_minus,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n < 4 || !self.n.is_multiple_of(2) {
            return Err(ModelError::BadNodeCount(self.n));
        }
        for (name, value) in self.named_rates() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ModelError::NonPositiveRate { name, value });
            }
        }
        self.probabilities().validate()
    }

    fn named_rates(&self) -> [(&'static str, f64); 4] {
        [
            ("alpha_plus", self.alpha_plus),
            ("beta_plus", self.beta_plus),
            ("alpha_minus", self.alpha_minus),
            ("beta_minus", self.beta_minus),
        ]
    }

    pub fn probabilities(&self) -> Probabilities {
        let scale = (self.n as f64).ln() / self.n as f64;
        Probabilities {
            p_plus: self.alpha_plus * scale,
            p_minus: self.alpha_minus * scale,
            q_plus: self.beta_plus * scale,
            q_minus: self.beta_minus * scale,
        }
    }

    /// Same rates at a different node count.
    pub fn with_n(&self, n: usize) -> Self {
        SsbmParams { n, ..*self }
    }

    /// Whether `alpha+ > beta+` and `beta- > alpha-` hold.
    pub fn standard_ordering(&self) -> bool {
        self.alpha_plus > self.beta_plus && self.beta_minus > self.alpha_minus
    }
}

impl Probabilities {
    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, value) in [
            ("p_plus", self.p_plus),
            ("p_minus", self.p_minus),
            ("q_plus", self.q_plus),
            ("q_minus", self.q_minus),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ModelError::ProbabilityOutOfRange { name, value });
            }
        }
        for (name, value) in [
            ("p_plus + p_minus", self.p_plus + self.p_minus),
            ("q_plus + q_minus", self.q_plus + self.q_minus),
        ] {
            if value > 1.0 {
                return Err(ModelError::ProbabilitySumTooLarge { name, value });
            }
        }
        Ok(())
    }
}

/// Planted labels: nodes `0..n/2` are `+1`, the rest `-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    labels: Vec<i8>,
}

impl GroundTruth {
    pub fn planted(n: usize) -> Self {
        let half = n / 2;
        GroundTruth {
            labels: (0..n).map(|i| if i < half { 1 } else { -1 }).collect(),
        }
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.labels.iter().map(|&x| x as f64).collect()
    }
}

/// Draws a graph from the model defined by `params`.
pub fn sample(params: &SsbmParams, seed: u64) -> Result<(SignedGraph, GroundTruth), ModelError> {
    warn_ordering(params);
    sample_quiet(params, seed)
}

pub(crate) fn warn_ordering(params: &SsbmParams) {
    if !params.standard_ordering() {
        log::warn!(
            "rates ({}, {}, {}, {}) do not satisfy alpha+ > beta+ and beta- > alpha-",
            params.alpha_plus,
            params.beta_plus,
            params.alpha_minus,
            params.beta_minus
        );
    }
}

/// [`sample`] without the ordering warning, for callers that already issued it.
pub(crate) fn sample_quiet(
    params: &SsbmParams,
    seed: u64,
) -> Result<(SignedGraph, GroundTruth), ModelError> {
    params.validate()?;
    Ok(draw(params.n, params.probabilities(), seed))
}

/// Draws a graph with the four probabilities given directly. Boundary values
/// 0 and 1 are allowed.
pub fn sample_raw(
    n: usize,
    p_plus: f64,
    p_minus: f64,
    q_plus: f64,
    q_minus: f64,
    seed: u64,
) -> Result<(SignedGraph, GroundTruth), ModelError> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(ModelError::BadNodeCount(n));
    }
    let pr = Probabilities {
        p_plus,
        p_minus,
        q_plus,
        q_minus,
    };
    pr.validate()?;
    Ok(draw(n, pr, seed))
}

/// Positive and negative `(i, j)` pairs with `j > i` drawn for one row.
type RowEdges = (Vec<(u32, u32)>, Vec<(u32, u32)>);

fn draw(n: usize, pr: Probabilities, seed: u64) -> (SignedGraph, GroundTruth) {
    let half = n / 2;
    let rows: Vec<RowEdges> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            for j in i + 1..n {
                let (pp, pm) = if (i < half) == (j < half) {
                    (pr.p_plus, pr.p_minus)
                } else {
                    (pr.q_plus, pr.q_minus)
                };
                let u: f64 = rng.random();
                if u < pp {
                    pos.push((i as u32, j as u32));
                } else if u < pp + pm {
                    neg.push((i as u32, j as u32));
                }
            }
            (pos, neg)
        })
        .collect();
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (p, q) in rows {
        pos.extend(p);
        neg.extend(q);
    }
    (
        SignedGraph::from_sorted_unique(n, &pos, &neg),
        GroundTruth::planted(n),
    )
}

/// `(sqrt(a+) - sqrt(b+))^2 + (sqrt(a-) - sqrt(b-))^2 - 2`; exact recovery is
/// information-theoretically possible iff this is non-negative.
pub fn it_gap(params: &SsbmParams) -> f64 {
    let d_pos = params.alpha_plus.sqrt() - params.beta_plus.sqrt();
    let d_neg = params.alpha_minus.sqrt() - params.beta_minus.sqrt();
    d_pos * d_pos + d_neg * d_neg - 2.0
}
