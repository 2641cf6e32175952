//! WebAssembly bindings for the browser demo.
//!
//! The `*_inner` functions carry the logic and run natively in tests; the
//! exported wrappers only convert errors.

use ssbm_core::experiments::{resolve_xi, solver_seed, trial_seed, XiMode};
use ssbm_core::{compare, it_gap, sample, solve, SolverConfig, SsbmParams};
use wasm_bindgen::prelude::*;

/// Summary of one sample-estimate-solve run.
#[wasm_bindgen]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simulation {
    pub nodes: u32,
    pub positive_edges: u32,
    pub negative_edges: u32,
    pub it_gap: f64,
    pub xi: f64,
    pub exact: bool,
    pub misclassified: u32,
    pub error_rate: f64,
    pub pi_iters: u32,
    pub gpi_iters: u32,
    pub converged: bool,
    pub objective: f64,
}

fn params(n: usize, ap: f64, bp: f64, am: f64, bm: f64) -> Result<SsbmParams, String> {
    let p = SsbmParams { n, alpha_plus: ap, beta_plus: bp, alpha_minus: am, beta_minus: bm };
    p.validate().map_err(|e| e.to_string())?;
    Ok(p)
}

pub fn simulate_inner(
    n: usize,
    rates: [f64; 4],
    xi_mode: &str,
    seed: u64,
) -> Result<Simulation, String> {
    let p = params(n, rates[0], rates[1], rates[2], rates[3])?;
    let mode: XiMode = xi_mode.parse()?;
    let (graph, truth) = sample(&p, seed).map_err(|e| e.to_string())?;
    let (xi, _) = resolve_xi(mode, Some(&p), &graph);
    let r = solve(&graph, &SolverConfig::new(xi, n, solver_seed(seed))).map_err(|e| e.to_string())?;
    let m = compare(&r.labels, &truth).map_err(|e| e.to_string())?;
    Ok(Simulation {
        nodes: n as u32,
        positive_edges: graph.n_pos() as u32,
        negative_edges: graph.n_neg() as u32,
        it_gap: it_gap(&p),
        xi,
        exact: m.exact,
        misclassified: m.misclassified as u32,
        error_rate: m.error_rate,
        pi_iters: r.pi_iters as u32,
        gpi_iters: r.gpi_iters as u32,
        converged: r.converged,
        objective: r.objective,
    })
}

/// Exact-recovery ratios over an `steps x steps` grid of `(alpha-, beta-)`
/// values from `lo` to `hi`, row-major with `alpha-` as the row. Uses the
/// exact `xi` and the same per-trial seeds as the command-line sweep, so
/// results match `ssbm sweep` for the same base seed. Invalid grid points are
/// `NaN`.
#[allow(clippy::too_many_arguments)]
pub fn phase_grid_inner(
    n: usize,
    alpha_plus: f64,
    beta_plus: f64,
    lo: f64,
    hi: f64,
    steps: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>, String> {
    if steps < 2 || trials == 0 {
        return Err("need at least 2 steps and 1 trial".into());
    }
    if !(lo > 0.0 && hi > lo) {
        return Err(format!("bad range [{lo}, {hi}]"));
    }
    let step = (hi - lo) / (steps - 1) as f64;
    let mut out = Vec::with_capacity(steps * steps);
    for i in 0..steps {
        for j in 0..steps {
            let grid = (i * steps + j) as u64;
            let Ok(p) = params(n, alpha_plus, beta_plus, lo + i as f64 * step, lo + j as f64 * step)
            else {
                out.push(f64::NAN);
                continue;
            };
            let mut hits = 0;
            for t in 0..trials {
                let s = trial_seed(seed, grid, t as u64);
                let (graph, truth) = sample(&p, s).map_err(|e| e.to_string())?;
                let (xi, _) = resolve_xi(XiMode::Exact, Some(&p), &graph);
                let r = solve(&graph, &SolverConfig::new(xi, n, solver_seed(s)))
                    .map_err(|e| e.to_string())?;
                hits += compare(&r.labels, &truth).map_err(|e| e.to_string())?.exact as usize;
            }
            out.push(hits as f64 / trials as f64);
        }
    }
    Ok(out)
}

#[wasm_bindgen(js_name = itGap)]
pub fn it_gap_js(alpha_plus: f64, beta_plus: f64, alpha_minus: f64, beta_minus: f64) -> f64 {
    it_gap(&SsbmParams { n: 4, alpha_plus, beta_plus, alpha_minus, beta_minus })
}

#[wasm_bindgen]
pub fn simulate(
    n: u32,
    alpha_plus: f64,
    beta_plus: f64,
    alpha_minus: f64,
    beta_minus: f64,
    xi_mode: &str,
    seed: u32,
) -> Result<Simulation, JsError> {
    simulate_inner(
        n as usize,
        [alpha_plus, beta_plus, alpha_minus, beta_minus],
        xi_mode,
        seed as u64,
    )
    .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = phaseGrid)]
#[allow(clippy::too_many_arguments)]
pub fn phase_grid(
    n: u32,
    alpha_plus: f64,
    beta_plus: f64,
    lo: f64,
    hi: f64,
    steps: u32,
    trials: u32,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    phase_grid_inner(
        n as usize,
        alpha_plus,
        beta_plus,
        lo,
        hi,
        steps as usize,
        trials as usize,
        seed as u64,
    )
    .map_err(|e| JsError::new(&e))
}
