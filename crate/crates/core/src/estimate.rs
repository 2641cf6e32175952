//! Moment estimator for the model rates and the negative-edge weight.
//!
//! For each signed subgraph the expected edge and triangle counts are
//! `a (alpha + beta)` and `b (alpha^3 + 3 alpha beta^2)` with
//! `a = n ln(n) / 4` and `b = ln(n)^3 / 24`. Matching them to the observed
//! counts gives a cubic with a single real root,
//! `(x ln n - 2C/n)^3 = 6D - 8C^3/n^3`, solved here in closed form.

use thiserror::Error;

use crate::graph::{GraphMoments, SignedGraph};
use crate::ssbm::SsbmParams;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("need at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("alpha+ == beta+: the weight xi is undefined")]
    EqualPositiveRates,
    #[error("rates must be positive: {0}")]
    NonPositiveRate(&'static str),
    #[error("n = {n} too small: logarithm argument {arg} is not positive")]
    NonPositiveLogArgument { n: usize, arg: f64 },
}

/// Scale constants `(a, b) = (n ln n / 4, ln^3 n / 24)`.
pub fn scale_constants(n: usize) -> (f64, f64) {
    let l = (n as f64).ln();
    (n as f64 * l / 4.0, l * l * l / 24.0)
}

/// Solves `a x + a y = C`, `b x^3 + 3 b x y^2 = D` for its real root.
///
/// Uses the signed real cube root, which matters for the negative subgraph
/// where the within-community rate is the smaller one and the radicand is
/// negative.
pub fn solve_cubic_system(c: f64, d: f64, n: usize) -> Result<(f64, f64), EstimateError> {
    if n < 2 {
        return Err(EstimateError::TooFewNodes(n));
    }
    let nf = n as f64;
    let l = nf.ln();
    let c_over_n = c / nf;
    let radicand = 6.0 * d - 8.0 * c_over_n * c_over_n * c_over_n;
    let x = (2.0 * c_over_n + radicand.cbrt()) / l;
    let y = 4.0 * c_over_n / l - x;
    Ok((x, y))
}

/// Estimated rates and weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatedParams {
    pub alpha_hat_plus: f64,
    pub beta_hat_plus: f64,
    pub alpha_hat_minus: f64,
    pub beta_hat_minus: f64,
    /// `None` unless all four estimates are positive and `alpha+ != beta+`.
    pub xi_hat: Option<f64>,
    /// All estimates positive, `alpha+ > beta+` and `beta- > alpha-`.
    pub plausible: bool,
}

impl EstimatedParams {
    /// `xi_hat` when defined, otherwise `fallback` (with a warning).
    pub fn xi_or(&self, fallback: f64) -> f64 {
        match self.xi_hat {
            Some(xi) if xi.is_finite() => xi,
            other => {
                log::warn!("estimated xi is {other:?}; falling back to xi = {fallback}");
                fallback
            }
        }
    }

    /// `key=value` lines, one per field.
    pub fn to_key_values(&self) -> String {
        let xi = self
            .xi_hat
            .map_or_else(|| "undefined".to_string(), |x| x.to_string());
        format!(
            "alpha_plus={}\nbeta_plus={}\nalpha_minus={}\nbeta_minus={}\nxi={}\nplausible={}\n",
            self.alpha_hat_plus,
            self.beta_hat_plus,
            self.alpha_hat_minus,
            self.beta_hat_minus,
            xi,
            self.plausible
        )
    }
}

pub fn estimate_params(m: &GraphMoments, n: usize) -> Result<EstimatedParams, EstimateError> {
    let (ap, bp) = solve_cubic_system(m.n_pos as f64, m.t_pos as f64, n)?;
    let (am, bm) = solve_cubic_system(m.n_neg as f64, m.t_neg as f64, n)?;
    let positive = [ap, bp, am, bm].iter().all(|&v| v > 0.0);
    let xi_hat = (positive && ap != bp).then(|| (bm / am).ln() / (ap / bp).ln());
    Ok(EstimatedParams {
        alpha_hat_plus: ap,
        beta_hat_plus: bp,
        alpha_hat_minus: am,
        beta_hat_minus: bm,
        xi_hat,
        plausible: positive && ap > bp && bm > am,
    })
}

/// Counts moments of `g` and estimates from them.
pub fn estimate_graph(g: &SignedGraph) -> EstimatedParams {
    // n >= 2 is a graph invariant.
    estimate_params(&g.moments(), g.n()).expect("graph has at least 2 nodes")
}

/// `ln(beta-/alpha-) / ln(alpha+/beta+)`.
pub fn xi_exact(params: &SsbmParams) -> Result<f64, EstimateError> {
    if params.alpha_plus == params.beta_plus {
        return Err(EstimateError::EqualPositiveRates);
    }
    if !(params.alpha_minus > 0.0) {
        return Err(EstimateError::NonPositiveRate("alpha_minus"));
    }
    if !(params.beta_minus > 0.0) {
        return Err(EstimateError::NonPositiveRate("beta_minus"));
    }
    Ok((params.beta_minus / params.alpha_minus).ln() / (params.alpha_plus / params.beta_plus).ln())
}

/// Finite-n weights of the maximum-likelihood objective
/// `x^T (mu A+ - nu A-) x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleWeights {
    pub mu_n: f64,
    pub nu_n: f64,
}

/// Weights at `params.n`.
pub fn mle_weights(params: &SsbmParams) -> Result<MleWeights, EstimateError> {
    let n = params.n;
    let nf = n as f64;
    let l = nf.ln();
    let within = nf - (params.alpha_plus + params.alpha_minus) * l;
    let across = nf - (params.beta_plus + params.beta_minus) * l;
    for arg in [within, across] {
        if !(arg > 0.0) {
            return Err(EstimateError::NonPositiveLogArgument { n, arg });
        }
    }
    for (name, v) in [
        ("alpha_plus", params.alpha_plus),
        ("beta_plus", params.beta_plus),
        ("alpha_minus", params.alpha_minus),
        ("beta_minus", params.beta_minus),
    ] {
        if !(v > 0.0) {
            return Err(EstimateError::NonPositiveRate(name));
        }
    }
    Ok(MleWeights {
        mu_n: (params.alpha_plus / params.beta_plus).ln() + (across / within).ln(),
        nu_n: (params.beta_minus / params.alpha_minus).ln() + (within / across).ln(),
    })
}
