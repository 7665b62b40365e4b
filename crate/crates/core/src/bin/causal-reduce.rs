use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use causal_reduce::bn::{Dataset, DiscreteBn};
use causal_reduce::criteria::check_all;
use causal_reduce::equivalence::compare;
use causal_reduce::error::{Error, Result};
use causal_reduce::formula::{derive_gformula, Format};
use causal_reduce::functionals::{
    adjustment_exact, eif_variance, front_door_exact, g_functional_exact, plugin_adjustment, plugin_g,
    EstimateReport,
};
use causal_reduce::reduction::reduce;
use causal_reduce::sim::{run_simulation, EmptyCellPolicy, Setting, SimConfig};
use causal_reduce::taxonomy::classify;
use causal_reduce::{parse_graph, Dag, VertexSet};

#[derive(Parser)]
#[command(name = "causal-reduce", version, about = "Reduce causal graphs to their informative variables")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reduce a graph and print it in graph-file format.
    Reduce {
        #[arg(long)]
        graph: PathBuf,
        /// Write the reduction report (JSON) here.
        #[arg(long, alias = "json")]
        report: Option<PathBuf>,
    },
    /// Print the N, I, W, M, O and O_min sets.
    Taxonomy {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Evaluate the W- and M-criteria for every candidate vertex.
    Check {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Compare two graphs for (causal) Markov equivalence.
    Equiv {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Print the g-formula of a graph.
    Gformula {
        #[arg(long)]
        graph: PathBuf,
        /// Reduce the graph first.
        #[arg(long)]
        reduce: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Evaluate a functional exactly (--bn) or estimate it from data (--data).
    Estimate {
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, conflicts_with = "data", required_unless_present = "data")]
        bn: Option<PathBuf>,
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long, value_enum, default_value = "g")]
        estimator: EstimatorArg,
        /// Comma-separated covariates for `adjustment` (default: O) or
        /// mediators for `front-door`.
        #[arg(long, value_delimiter = ',')]
        set: Option<Vec<String>>,
        /// Additive smoothing for the plugin g-formula.
        #[arg(long, default_value_t = 0.0)]
        laplace: f64,
        /// Required lower bound on P(A = a | Pa(A)) for --bn.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Monte-Carlo comparison of the plugin and adjustment estimators.
    Simulate {
        #[arg(long, value_enum, default_value = "a")]
        setting: SettingArg,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// Sample sizes, comma-separated.
        #[arg(long, value_delimiter = ',', default_value = "10000")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "redraw")]
        on_empty: PolicyArg,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Latex,
    Json,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum EstimatorArg {
    G,
    Adjustment,
    FrontDoor,
    EifVariance,
}

#[derive(Clone, Copy, ValueEnum)]
enum SettingArg {
    A,
    B,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Error,
    Redraw,
}

fn load_graph(path: &Path) -> Result<Dag> {
    parse_graph(&std::fs::read_to_string(path)?)
}

// A closed pipe is not an error worth reporting.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, to_json(value) + "\n")?;
    }
    Ok(())
}

fn print_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    emit(&(to_json(value) + "\n"));
    write_json(path, value)
}

fn estimate(
    graph: Option<&Path>,
    bn: Option<&Path>,
    data: Option<&Path>,
    level: usize,
    estimator: EstimatorArg,
    set: Option<Vec<String>>,
    laplace: f64,
    epsilon: Option<f64>,
) -> Result<EstimateReport> {
    let graph = graph.map(load_graph).transpose()?;
    let set = set.map(VertexSet::from_iter);
    let report = |name: &str, value: f64, n: usize| EstimateReport {
        estimator: name.into(),
        level,
        value,
        n,
        replication: None,
    };
    if let Some(path) = bn {
        let mut bn = DiscreteBn::load(path)?;
        bn.validate(epsilon.map(|e| (level, e)))?;
        if let Some(g) = &graph {
            bn = bn.marginalize(g)?;
        }
        let o = || classify(bn.graph()).map(|t| t.o);
        let value = match estimator {
            EstimatorArg::G => g_functional_exact(&bn, level)?,
            EstimatorArg::Adjustment => adjustment_exact(&bn, &set.map_or_else(o, Ok)?, level)?,
            EstimatorArg::FrontDoor => {
                let m = set.ok_or_else(|| Error::Precondition("front-door needs --set".into()))?;
                front_door_exact(&bn, &m, level)?
            }
            EstimatorArg::EifVariance => eif_variance(&bn, level)?,
        };
        let name = match estimator {
            EstimatorArg::G => "g_exact",
            EstimatorArg::Adjustment => "adjustment_exact",
            EstimatorArg::FrontDoor => "front_door_exact",
            EstimatorArg::EifVariance => "eif_variance",
        };
        return Ok(report(name, value, 0));
    }
    let data = Dataset::load(data.expect("clap requires --bn or --data"))?;
    let g = graph.ok_or_else(|| Error::Precondition("--data needs --graph".into()))?;
    match estimator {
        EstimatorArg::G => plugin_g(&data, &g, level, laplace),
        EstimatorArg::Adjustment => {
            let l = match set {
                Some(l) => l,
                None => classify(&g)?.o,
            };
            plugin_adjustment(&data, &g, &l, level)
        }
        _ => Err(Error::Precondition("only g and adjustment can be estimated from data".into())),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Reduce { graph, report } => {
            let r = reduce(&load_graph(&graph)?)?;
            emit(&r.output.to_graph_text());
            write_json(report.as_deref(), &r)
        }
        Cmd::Taxonomy { graph, json } => print_json(json.as_deref(), &classify(&load_graph(&graph)?)?),
        Cmd::Check { graph, json } => print_json(json.as_deref(), &check_all(&load_graph(&graph)?)?),
        Cmd::Equiv { first, second, json } => {
            print_json(json.as_deref(), &compare(&load_graph(&first)?, &load_graph(&second)?)?)
        }
        Cmd::Gformula { graph, reduce: first, format, json } => {
            let mut g = load_graph(&graph)?;
            if first {
                g = reduce(&g)?.output;
            }
            let f = derive_gformula(&g)?;
            let format = match format {
                FormatArg::Text => Format::Text,
                FormatArg::Latex => Format::Latex,
                FormatArg::Json => Format::Json,
            };
            emit(&(f.render(format) + "\n"));
            write_json(json.as_deref(), &f)
        }
        Cmd::Estimate { graph, bn, data, level, estimator, set, laplace, epsilon, json } => {
            let r = estimate(
                graph.as_deref(),
                bn.as_deref(),
                data.as_deref(),
                level,
                estimator,
                set,
                laplace,
                epsilon,
            )?;
            print_json(json.as_deref(), &r)
        }
        Cmd::Simulate { setting, m, k, n, reps, seed, on_empty, json } => {
            let setting = match setting {
                SettingArg::A => Setting::A,
                SettingArg::B => Setting::B,
            };
            let mut tables = Vec::with_capacity(n.len());
            for n in n {
                let mut cfg = SimConfig::new(setting, n, reps, seed);
                cfg.m = m.unwrap_or(cfg.m);
                cfg.k = k.unwrap_or(cfg.k);
                cfg.on_empty = match on_empty {
                    PolicyArg::Error => EmptyCellPolicy::Error,
                    PolicyArg::Redraw => EmptyCellPolicy::Redraw,
                };
                let t = run_simulation(&cfg)?;
                emit(&t.to_text());
                tables.push(t);
            }
            write_json(json.as_deref(), &tables)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
