//! Experiment harness: single trials, parameter-grid sweeps, timing
//! benchmarks and file-based solving, with CSV output.

use std::fmt;
use std::io;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::estimate::{estimate_graph, xi_exact, EstimatedParams};
use crate::eval::compare;
use crate::graph::{parse_edge_list, ParseError, SignedGraph};
use crate::solver::{solve, RecoveryResult, SolverConfig, SolverError};
use crate::ssbm::{it_gap, sample_quiet, warn_ordering, ModelError, SsbmParams};

/// Weight used when `xi` cannot be determined.
pub const FALLBACK_XI: f64 = 1.0;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("invalid sweep: {0}")]
    InvalidSpec(String),
    #[error("trials must be at least 1")]
    ZeroTrials,
}

/// How the solver's weight `xi` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XiMode {
    /// `ln(beta-/alpha-) / ln(alpha+/beta+)` from the generating rates.
    Exact,
    /// Moment estimate from the observed graph.
    Estimated,
    Fixed(f64),
}

impl FromStr for XiMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(XiMode::Exact),
            "estimated" => Ok(XiMode::Estimated),
            other => match other.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(XiMode::Fixed(v)),
                _ => Err(format!("expected exact, estimated or a number, got {other:?}")),
            },
        }
    }
}

impl fmt::Display for XiMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XiMode::Exact => f.write_str("exact"),
            XiMode::Estimated => f.write_str("estimated"),
            XiMode::Fixed(v) => write!(f, "{v}"),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for one trial, a fixed hash of `(base, grid index, trial index)`.
pub fn trial_seed(base: u64, grid: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ grid) ^ trial)
}

/// Seed for the solver's random start, derived from the graph seed.
pub fn solver_seed(graph_seed: u64) -> u64 {
    splitmix64(graph_seed ^ 0x5eed_5eed_5eed_5eed)
}

/// Resolves `xi` for one graph. Returns the weight and, when estimation ran,
/// the estimates.
pub fn resolve_xi(
    mode: XiMode,
    params: Option<&SsbmParams>,
    graph: &SignedGraph,
) -> (f64, Option<EstimatedParams>) {
    match mode {
        XiMode::Fixed(v) => (v, None),
        XiMode::Estimated => {
            let est = estimate_graph(graph);
            (est.xi_or(FALLBACK_XI), Some(est))
        }
        XiMode::Exact => match params.map(xi_exact) {
            Some(Ok(xi)) => (xi, None),
            other => {
                log::warn!("exact xi unavailable ({other:?}); using xi = {FALLBACK_XI}");
                (FALLBACK_XI, None)
            }
        },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub exact: bool,
    pub misclassified: usize,
    pub error_rate: f64,
    pub xi: f64,
    pub pi_iters: usize,
    pub gpi_iters: usize,
    pub converged: bool,
    pub objective: f64,
    pub generate_ms: f64,
    pub estimate_ms: f64,
    pub solve_ms: f64,
}

/// Samples one graph and recovers its communities.
pub fn run_trial(
    params: &SsbmParams,
    xi_mode: XiMode,
    seed: u64,
) -> Result<TrialOutcome, ExperimentError> {
    warn_ordering(params);
    trial(params, xi_mode, seed)
}

fn trial(params: &SsbmParams, xi_mode: XiMode, seed: u64) -> Result<TrialOutcome, ExperimentError> {
    let t0 = Instant::now();
    let (graph, truth) = sample_quiet(params, seed)?;
    let generate_ms = ms(t0);
    let t1 = Instant::now();
    let (xi, _) = resolve_xi(xi_mode, Some(params), &graph);
    let estimate_ms = ms(t1);
    let t2 = Instant::now();
    let result = solve(&graph, &SolverConfig::new(xi, graph.n(), solver_seed(seed)))?;
    let solve_ms = ms(t2);
    let m = compare(&result.labels, &truth).expect("labels match graph size");
    Ok(TrialOutcome {
        exact: m.exact,
        misclassified: m.misclassified,
        error_rate: m.error_rate,
        xi,
        pi_iters: result.pi_iters,
        gpi_iters: result.gpi_iters,
        converged: result.converged,
        objective: result.objective,
        generate_ms,
        estimate_ms,
        solve_ms,
    })
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// One of the four model rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rate {
    AlphaPlus,
    BetaPlus,
    AlphaMinus,
    BetaMinus,
}

impl FromStr for Rate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('_', "-").as_str() {
            "alpha-plus" => Ok(Rate::AlphaPlus),
            "beta-plus" => Ok(Rate::BetaPlus),
            "alpha-minus" => Ok(Rate::AlphaMinus),
            "beta-minus" => Ok(Rate::BetaMinus),
            _ => Err(format!("unknown rate {s:?}")),
        }
    }
}

/// Swept range `start, start + step, ...` up to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub rate: Rate,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|k| self.start + k as f64 * self.step)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub n: usize,
    pub trials: usize,
    /// Rates not covered by an axis.
    pub fixed: SsbmParams,
    pub x: Axis,
    pub y: Axis,
    pub base_seed: u64,
    pub xi_mode: XiMode,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.trials == 0 {
            return Err(ExperimentError::ZeroTrials);
        }
        if self.x.rate == self.y.rate {
            return Err(ExperimentError::InvalidSpec("axes sweep the same rate".into()));
        }
        for axis in [&self.x, &self.y] {
            if !(axis.step > 0.0) || !axis.step.is_finite() {
                return Err(ExperimentError::InvalidSpec(format!(
                    "step must be positive, got {}",
                    axis.step
                )));
            }
            if !(axis.stop >= axis.start) {
                return Err(ExperimentError::InvalidSpec(format!(
                    "empty range [{}, {}]",
                    axis.start, axis.stop
                )));
            }
        }
        Ok(())
    }

    /// Grid points in row order: `x` outer, `y` inner.
    pub fn grid(&self) -> Vec<SsbmParams> {
        let mut out = Vec::new();
        for &xv in &self.x.values() {
            for &yv in &self.y.values() {
                let mut p = self.fixed.with_n(self.n);
                set_rate(&mut p, self.x.rate, xv);
                set_rate(&mut p, self.y.rate, yv);
                out.push(p);
            }
        }
        out
    }
}

fn set_rate(p: &mut SsbmParams, rate: Rate, v: f64) {
    match rate {
        Rate::AlphaPlus => p.alpha_plus = v,
        Rate::BetaPlus => p.beta_plus = v,
        Rate::AlphaMinus => p.alpha_minus = v,
        Rate::BetaMinus => p.beta_minus = v,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub params: SsbmParams,
    pub trials: usize,
    pub recovery_ratio: f64,
    pub mean_error_rate: f64,
    pub mean_pi_iters: f64,
    pub mean_gpi_iters: f64,
    pub mean_runtime_ms: f64,
    pub it_gap: f64,
    /// `"ok"` or `"invalid: <reason>"`.
    pub status: String,
}

/// Runs every `(grid point, trial)` pair in parallel and aggregates per grid
/// point. Invalid grid points produce a row with an `invalid` status.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, ExperimentError> {
    spec.validate()?;
    let grid = spec.grid();
    let unordered = grid.iter().filter(|p| !p.standard_ordering()).count();
    if unordered > 0 {
        log::warn!(
            "{unordered} of {} grid points do not satisfy alpha+ > beta+ and beta- > alpha-",
            grid.len()
        );
    }
    let tasks: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|g| (0..spec.trials).map(move |t| (g, t)))
        .collect();
    let outcomes: Vec<Result<TrialOutcome, String>> = tasks
        .par_iter()
        .map(|&(g, t)| {
            let seed = trial_seed(spec.base_seed, g as u64, t as u64);
            trial(&grid[g], spec.xi_mode, seed).map_err(|e| e.to_string())
        })
        .collect();
    let rows = grid
        .iter()
        .zip(outcomes.chunks(spec.trials))
        .map(|(params, chunk)| aggregate(params, chunk))
        .collect();
    Ok(rows)
}

fn aggregate(params: &SsbmParams, chunk: &[Result<TrialOutcome, String>]) -> SweepRow {
    let trials = chunk.len();
    let ok: Vec<&TrialOutcome> = chunk.iter().filter_map(|r| r.as_ref().ok()).collect();
    let status = match chunk.iter().find_map(|r| r.as_ref().err()) {
        Some(e) => format!("invalid: {e}"),
        None => "ok".to_string(),
    };
    let mean = |f: &dyn Fn(&TrialOutcome) -> f64| -> f64 {
        if ok.is_empty() {
            f64::NAN
        } else {
            ok.iter().map(|o| f(o)).sum::<f64>() / ok.len() as f64
        }
    };
    SweepRow {
        params: *params,
        trials,
        recovery_ratio: mean(&|o| o.exact as u8 as f64),
        mean_error_rate: mean(&|o| o.error_rate),
        mean_pi_iters: mean(&|o| o.pi_iters as f64),
        mean_gpi_iters: mean(&|o| o.gpi_iters as f64),
        mean_runtime_ms: mean(&|o| o.estimate_ms + o.solve_ms),
        it_gap: it_gap(params),
        status,
    }
}

fn fmt_f(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}

/// Writes sweep rows as CSV. With `timing = false` the runtime column is
/// left out so the output is byte-deterministic.
pub fn write_sweep_csv<W: io::Write>(
    rows: &[SweepRow],
    out: W,
    timing: bool,
) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![
        "alpha_plus",
        "beta_plus",
        "alpha_minus",
        "beta_minus",
        "n",
        "trials",
        "recovery_ratio",
        "mean_error_rate",
        "mean_pi_iters",
        "mean_gpi_iters",
    ];
    if timing {
        header.push("mean_runtime_ms");
    }
    header.extend(["it_gap", "status"]);
    w.write_record(&header)?;
    for r in rows {
        let p = &r.params;
        let mut rec = vec![
            fmt_f(p.alpha_plus),
            fmt_f(p.beta_plus),
            fmt_f(p.alpha_minus),
            fmt_f(p.beta_minus),
            p.n.to_string(),
            r.trials.to_string(),
            fmt_f(r.recovery_ratio),
            fmt_f(r.mean_error_rate),
            fmt_f(r.mean_pi_iters),
            fmt_f(r.mean_gpi_iters),
        ];
        if timing {
            rec.push(format!("{:.3}", r.mean_runtime_ms));
        }
        rec.push(fmt_f(r.it_gap));
        rec.push(r.status.clone());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub trials: usize,
    pub total_solve_ms: f64,
    pub total_estimate_ms: f64,
    /// Estimation plus solving plus graph generation.
    pub total_with_generation_ms: f64,
    pub mean_pi_iters: f64,
    pub mean_gpi_iters: f64,
    pub recovery_ratio: f64,
}

impl BenchRow {
    /// Estimation plus solving, generation excluded.
    pub fn algorithm_ms(&self) -> f64 {
        self.total_solve_ms + self.total_estimate_ms
    }
}

/// Times estimation and solving at each size. Trials run sequentially so
/// timings do not compete for cores.
pub fn run_bench(
    n_list: &[usize],
    rates: &SsbmParams,
    trials: usize,
    seed: u64,
    xi_mode: XiMode,
) -> Result<Vec<BenchRow>, ExperimentError> {
    if trials == 0 {
        return Err(ExperimentError::ZeroTrials);
    }
    for &n in n_list {
        rates.with_n(n).validate()?;
    }
    warn_ordering(rates);
    let mut rows = Vec::with_capacity(n_list.len());
    for (k, &n) in n_list.iter().enumerate() {
        let params = rates.with_n(n);
        let mut row = BenchRow {
            n,
            trials,
            total_solve_ms: 0.0,
            total_estimate_ms: 0.0,
            total_with_generation_ms: 0.0,
            mean_pi_iters: 0.0,
            mean_gpi_iters: 0.0,
            recovery_ratio: 0.0,
        };
        for t in 0..trials {
            let o = trial(&params, xi_mode, trial_seed(seed, k as u64, t as u64))?;
            row.total_solve_ms += o.solve_ms;
            row.total_estimate_ms += o.estimate_ms;
            row.total_with_generation_ms += o.solve_ms + o.estimate_ms + o.generate_ms;
            row.mean_pi_iters += o.pi_iters as f64;
            row.mean_gpi_iters += o.gpi_iters as f64;
            row.recovery_ratio += o.exact as u8 as f64;
        }
        let tf = trials as f64;
        row.mean_pi_iters /= tf;
        row.mean_gpi_iters /= tf;
        row.recovery_ratio /= tf;
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_bench_csv<W: io::Write>(rows: &[BenchRow], out: W) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "trials",
        "total_solve_ms",
        "total_estimate_ms",
        "total_with_generation_ms",
        "mean_pi_iters",
        "mean_gpi_iters",
        "recovery_ratio",
    ])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.trials.to_string(),
            format!("{:.3}", r.total_solve_ms),
            format!("{:.3}", r.total_estimate_ms),
            format!("{:.3}", r.total_with_generation_ms),
            fmt_f(r.mean_pi_iters),
            fmt_f(r.mean_gpi_iters),
            fmt_f(r.recovery_ratio),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Outcome of solving a graph read from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub n: usize,
    pub n_pos: u64,
    pub n_neg: u64,
    pub estimated: Option<EstimatedParams>,
    pub xi: f64,
    pub result: RecoveryResult,
}

impl SolveReport {
    /// Sizes of the `+1` and `-1` communities.
    pub fn community_sizes(&self) -> (usize, usize) {
        let plus = self.result.labels.iter().filter(|&&x| x == 1).count();
        (plus, self.n - plus)
    }

    pub fn render(&self, dump_labels: bool) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "nodes={}\npositive_edges={}\nnegative_edges={}\n",
            self.n, self.n_pos, self.n_neg
        ));
        if let Some(est) = &self.estimated {
            s.push_str(&est.to_key_values());
        }
        let (a, b) = self.community_sizes();
        s.push_str(&format!(
            "xi_used={}\ncommunity_plus={}\ncommunity_minus={}\npi_iters={}\ngpi_iters={}\nconverged={}\nobjective={}\n",
            self.xi,
            a,
            b,
            self.result.pi_iters,
            self.result.gpi_iters,
            self.result.converged,
            self.result.objective
        ));
        if dump_labels {
            for (i, l) in self.result.labels.iter().enumerate() {
                s.push_str(&format!("{i} {l}\n"));
            }
        }
        s
    }
}

/// Solves an already parsed graph. `Exact` mode has no generating rates here
/// and falls back like an undefined estimate.
pub fn solve_graph(graph: &SignedGraph, xi_mode: XiMode, seed: u64) -> Result<SolveReport, ExperimentError> {
    let (xi, estimated) = resolve_xi(xi_mode, None, graph);
    let result = solve(graph, &SolverConfig::new(xi, graph.n(), seed))?;
    Ok(SolveReport {
        n: graph.n(),
        n_pos: graph.n_pos(),
        n_neg: graph.n_neg(),
        estimated,
        xi,
        result,
    })
}

pub fn run_solve_file(
    path: &Path,
    xi_mode: XiMode,
    one_based: bool,
    seed: u64,
) -> Result<SolveReport, ExperimentError> {
    let text = std::fs::read_to_string(path)?;
    let graph = parse_edge_list(&text, one_based)?;
    solve_graph(&graph, xi_mode, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1_spec(trials: usize) -> SweepSpec {
        SweepSpec {
            n: 300,
            trials,
            fixed: SsbmParams {
                n: 300,
                alpha_plus: 16.0,
                beta_plus: 9.0,
                alpha_minus: 1.0,
                beta_minus: 1.0,
            },
            x: Axis {
                rate: Rate::AlphaMinus,
                start: 1.0,
                stop: 2.0,
                step: 0.5,
            },
            y: Axis {
                rate: Rate::BetaMinus,
                start: 9.0,
                stop: 9.0,
                step: 1.0,
            },
            base_seed: 7,
            xi_mode: XiMode::Exact,
        }
    }

    #[test]
    fn axis_values_inclusive() {
        let a = Axis {
            rate: Rate::AlphaMinus,
            start: 1.0,
            stop: 10.0,
            step: 0.5,
        };
        let v = a.values();
        assert_eq!(v.len(), 19);
        assert_eq!((v[0], v[18]), (1.0, 10.0));
    }

    #[test]
    fn xi_mode_parsing() {
        assert_eq!("exact".parse::<XiMode>().unwrap(), XiMode::Exact);
        assert_eq!("estimated".parse::<XiMode>().unwrap(), XiMode::Estimated);
        assert_eq!("0.75".parse::<XiMode>().unwrap(), XiMode::Fixed(0.75));
        assert!("nan".parse::<XiMode>().is_err());
        assert!("bogus".parse::<XiMode>().is_err());
    }

    #[test]
    fn seeds_differ_per_task() {
        let mut seen = std::collections::HashSet::new();
        for g in 0..20 {
            for t in 0..20 {
                assert!(seen.insert(trial_seed(1, g, t)));
            }
        }
        assert_eq!(trial_seed(5, 3, 2), trial_seed(5, 3, 2));
    }

    #[test]
    fn sweep_rows_in_grid_order() {
        let rows = run_sweep(&fig1_spec(2)).unwrap();
        let am: Vec<f64> = rows.iter().map(|r| r.params.alpha_minus).collect();
        assert_eq!(am, vec![1.0, 1.5, 2.0]);
        for r in &rows {
            assert_eq!(r.status, "ok");
            assert_eq!(r.it_gap, it_gap(&r.params));
        }
    }

    #[test]
    fn sweep_flags_invalid_points() {
        let mut spec = fig1_spec(1);
        spec.n = 10;
        let rows = run_sweep(&spec).unwrap();
        assert!(rows.iter().all(|r| r.status.starts_with("invalid")));
        assert!(rows.iter().all(|r| r.recovery_ratio.is_nan()));
    }

    #[test]
    fn sweep_spec_validation() {
        let mut spec = fig1_spec(0);
        assert!(matches!(run_sweep(&spec), Err(ExperimentError::ZeroTrials)));
        spec.trials = 1;
        spec.x.step = 0.0;
        assert!(matches!(run_sweep(&spec), Err(ExperimentError::InvalidSpec(_))));
        spec.x.step = 1.0;
        spec.x.stop = 0.0;
        assert!(matches!(run_sweep(&spec), Err(ExperimentError::InvalidSpec(_))));
        spec.x.stop = 2.0;
        spec.y.rate = Rate::AlphaMinus;
        assert!(matches!(run_sweep(&spec), Err(ExperimentError::InvalidSpec(_))));
    }

    #[test]
    fn bench_rejects_zero_trials() {
        let p = SsbmParams::new(500, 16.0, 9.0, 9.0, 16.0).unwrap();
        assert!(matches!(
            run_bench(&[500], &p, 0, 1, XiMode::Estimated),
            Err(ExperimentError::ZeroTrials)
        ));
    }

    #[test]
    fn fixture_file_report() {
        let g = parse_edge_list("0 1 1\n2 3 1\n0 2 -1\n0 3 -1\n1 2 -1\n1 3 -1\n", false).unwrap();
        let r = solve_graph(&g, XiMode::Fixed(1.0), 3).unwrap();
        assert_eq!(r.result.objective, 12.0);
        assert_eq!(r.community_sizes(), (2, 2));
        let l = &r.result.labels;
        assert!(l[0] == l[1] && l[2] == l[3] && l[0] != l[2]);
        let text = r.render(true);
        assert!(text.contains("objective=12\n"));
        assert!(text.contains("0 "));
    }
}
