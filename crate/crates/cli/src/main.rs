use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ssbm_core::experiments::{
    run_bench, run_solve_file, run_sweep, write_bench_csv, write_sweep_csv, Axis,
    ExperimentError, Rate, SweepSpec, XiMode,
};
use ssbm_core::{estimate_graph, parse_edge_list, sample, SsbmParams};

/// Two-community recovery in signed stochastic block models.
#[derive(Parser)]
#[command(name = "ssbm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a graph and write its edge list and planted labels.
    Generate {
        #[command(flatten)]
        model: Model,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Edge-list path ("u v w" per line).
        #[arg(long)]
        out: PathBuf,
        /// Label file path; defaults to `<out>.truth`.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Write node ids starting at 1.
        #[arg(long)]
        one_based: bool,
    },
    /// Estimate model rates and xi from an edge list.
    Estimate {
        file: PathBuf,
        #[arg(long)]
        one_based: bool,
        /// Print a CSV header and row instead of key=value lines.
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover two communities from an edge list.
    Solve {
        file: PathBuf,
        /// exact, estimated or a number. Files carry no generating rates, so
        /// `exact` falls back to xi = 1.
        #[arg(long, default_value = "estimated")]
        xi: XiMode,
        #[arg(long)]
        one_based: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Append one "node label" line per node.
        #[arg(long)]
        labels: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recovery ratios over a two-rate grid, as CSV.
    Sweep {
        #[command(flatten)]
        model: Model,
        #[arg(long, default_value_t = 40)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "exact")]
        xi: XiMode,
        #[arg(long, default_value = "alpha-minus")]
        x_rate: Rate,
        #[arg(long, default_value_t = 1.0)]
        x_start: f64,
        #[arg(long, default_value_t = 10.0)]
        x_stop: f64,
        #[arg(long, default_value_t = 1.0)]
        x_step: f64,
        #[arg(long, default_value = "beta-minus")]
        y_rate: Rate,
        #[arg(long, default_value_t = 1.0)]
        y_start: f64,
        #[arg(long, default_value_t = 10.0)]
        y_stop: f64,
        #[arg(long, default_value_t = 1.0)]
        y_step: f64,
        /// Drop the runtime column so output is byte-reproducible.
        #[arg(long)]
        no_timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time estimation and solving across graph sizes, as CSV.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "500,1000,2000")]
        n_list: Vec<usize>,
        #[command(flatten)]
        rates: Rates,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "estimated")]
        xi: XiMode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Model {
    #[arg(long, default_value_t = 300)]
    n: usize,
    #[command(flatten)]
    rates: Rates,
}

#[derive(Args)]
struct Rates {
    #[arg(long, default_value_t = 16.0)]
    alpha_plus: f64,
    #[arg(long, default_value_t = 9.0)]
    beta_plus: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha_minus: f64,
    #[arg(long, default_value_t = 9.0)]
    beta_minus: f64,
}

impl Rates {
    fn at(&self, n: usize) -> SsbmParams {
        SsbmParams {
            n,
            alpha_plus: self.alpha_plus,
            beta_plus: self.beta_plus,
            alpha_minus: self.alpha_minus,
            beta_minus: self.beta_minus,
        }
    }
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Model(_)
            | ExperimentError::InvalidSpec(_)
            | ExperimentError::ZeroTrials => Failure::Usage(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_graph(path: &Path, one_based: bool) -> Result<ssbm_core::SignedGraph, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    parse_edge_list(&text, one_based).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Generate { model, seed, out, truth, one_based } => {
            let params = model.rates.at(model.n);
            params.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            let (graph, labels) = sample(&params, seed).map_err(|e| Failure::Usage(e.to_string()))?;
            let shift = one_based as usize;
            let mut w = output(Some(&out))?;
            for (u, v, sign) in graph.edges() {
                writeln!(w, "{} {} {}", u + shift, v + shift, sign.as_i8())?;
            }
            w.flush()?;
            let truth = truth.unwrap_or_else(|| {
                let mut p = out.into_os_string();
                p.push(".truth");
                p.into()
            });
            let mut w = output(Some(&truth))?;
            for (i, l) in labels.labels().iter().enumerate() {
                writeln!(w, "{} {l}", i + shift)?;
            }
            w.flush()?;
        }
        Command::Estimate { file, one_based, csv, out } => {
            let graph = read_graph(&file, one_based)?;
            let est = estimate_graph(&graph);
            let mut w = output(out.as_deref())?;
            if csv {
                let xi = est.xi_hat.map_or(String::new(), |x| x.to_string());
                writeln!(w, "n,alpha_plus,beta_plus,alpha_minus,beta_minus,xi,plausible")?;
                writeln!(
                    w,
                    "{},{},{},{},{},{},{}",
                    graph.n(),
                    est.alpha_hat_plus,
                    est.beta_hat_plus,
                    est.alpha_hat_minus,
                    est.beta_hat_minus,
                    xi,
                    est.plausible
                )?;
            } else {
                write!(w, "nodes={}\n{}", graph.n(), est.to_key_values())?;
            }
            w.flush()?;
        }
        Command::Solve { file, xi, one_based, seed, labels, out } => {
            let report = run_solve_file(&file, xi, one_based, seed)?;
            let mut w = output(out.as_deref())?;
            w.write_all(report.render(labels).as_bytes())?;
            w.flush()?;
        }
        Command::Sweep {
            model,
            trials,
            seed,
            xi,
            x_rate,
            x_start,
            x_stop,
            x_step,
            y_rate,
            y_start,
            y_stop,
            y_step,
            no_timing,
            out,
        } => {
            let spec = SweepSpec {
                n: model.n,
                trials,
                fixed: model.rates.at(model.n),
                x: Axis { rate: x_rate, start: x_start, stop: x_stop, step: x_step },
                y: Axis { rate: y_rate, start: y_start, stop: y_stop, step: y_step },
                base_seed: seed,
                xi_mode: xi,
            };
            let rows = run_sweep(&spec)?;
            write_sweep_csv(&rows, output(out.as_deref())?, !no_timing)?;
        }
        Command::Bench { n_list, rates, trials, seed, xi, out } => {
            if n_list.is_empty() {
                return Err(Failure::Usage("--n-list is empty".into()));
            }
            let rows = run_bench(&n_list, &rates.at(n_list[0]), trials, seed, xi)?;
            write_bench_csv(&rows, output(out.as_deref())?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
