//! Command-line front end for the mixedcausal pipeline.
//!
//! Machine-readable JSON goes to stdout; human-readable summaries go to
//! stderr. Exit codes: 0 success, 1 domain negative (not identified, not
//! converged), 2 usage or format error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use mixedcausal::binary;
use mixedcausal::effect::{
    bootstrap_ci, classify_fixability, estimate, suggest_strategy, EffectQuery,
    NuisanceSpec, Strategy,
};
use mixedcausal::linear;
use mixedcausal::{
    m_separated, one_line_id, BinaryCounts, Dataset, Error, GraphClass, MixedGraph, RankDir,
    SeparationQuery, VertexSet,
};

const EXIT_DOMAIN: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "mixedcausal",
    version,
    about = "Causal inference with mixed graphs: validation, m-separation, identification, fitting, and effect estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Dag,
    Ug,
    Bg,
    Admg,
    Cg,
    Sg,
    Generic,
}

impl From<ClassArg> for GraphClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Dag => GraphClass::Dag,
            ClassArg::Ug => GraphClass::Ug,
            ClassArg::Bg => GraphClass::Bg,
            ClassArg::Admg => GraphClass::Admg,
            ClassArg::Cg => GraphClass::Cg,
            ClassArg::Sg => GraphClass::Sg,
            ClassArg::Generic => GraphClass::Generic,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Tb,
    Lr,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    LinearSem,
    BinaryNested,
}

#[derive(Args)]
struct SeedArg {
    /// RNG seed; may also be set through MIXEDCAUSAL_SEED.
    #[arg(long, env = "MIXEDCAUSAL_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph file against a graph class.
    Validate {
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "generic")]
        class: ClassArg,
    },
    /// Test m-separation of --x and --y given --z.
    Msep {
        graph: PathBuf,
        #[arg(long, required = true)]
        x: Vec<String>,
        #[arg(long, required = true)]
        y: Vec<String>,
        #[arg(long)]
        z: Vec<String>,
    },
    /// Identify p(outcome(treatment)) and print the functional.
    Id {
        graph: PathBuf,
        #[arg(long, required = true)]
        treatment: Vec<String>,
        #[arg(long, required = true)]
        outcome: Vec<String>,
    },
    /// Fit a model to data.
    Fit {
        graph: PathBuf,
        data: PathBuf,
        #[arg(long, value_enum)]
        engine: EngineArg,
        /// Convergence tolerance (default: 1e-6 linear-sem, 1e-12 binary-nested).
        #[arg(long)]
        tol: Option<f64>,
        /// Iteration cap (default: 200 linear-sem, 500 binary-nested).
        #[arg(long)]
        max_iter: Option<usize>,
        /// With --outcome, also report the effect of this treatment.
        #[arg(long)]
        treatment: Option<String>,
        #[arg(long)]
        outcome: Option<String>,
    },
    /// Estimate the average causal effect of a binary treatment.
    Estimate {
        graph: PathBuf,
        data: PathBuf,
        #[arg(long)]
        treatment: String,
        #[arg(long)]
        outcome: String,
        /// auto | ipw | gformula | aipw | p-ipw | d-ipw | n-ipw
        #[arg(long, default_value = "auto")]
        strategy: String,
        /// Number of bootstrap replicates for a confidence interval.
        #[arg(long)]
        bootstrap: Option<usize>,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Render a graph to DOT.
    Draw {
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "tb")]
        direction: DirectionArg,
        /// Output path; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::NotIdentified(_) => EXIT_DOMAIN,
        _ => EXIT_USAGE,
    }
}

fn load_graph(path: &PathBuf) -> Result<MixedGraph, Error> {
    let text = std::fs::read_to_string(path)?;
    MixedGraph::from_json(&text)
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Validate { graph, class } => {
            let g = load_graph(&graph)?;
            let class: GraphClass = class.into();
            let violations = g.class_violations(class);
            let valid = violations.is_empty();
            println!(
                "{}",
                json!({"valid": valid, "class": class.name(), "violations": violations})
            );
            eprintln!(
                "{} is {} {}",
                graph.display(),
                if valid { "a valid" } else { "not a valid" },
                class.name()
            );
            Ok(if valid { ExitCode::SUCCESS } else { ExitCode::from(EXIT_DOMAIN) })
        }
        Command::Msep { graph, x, y, z } => {
            let g = load_graph(&graph)?;
            let query = SeparationQuery::new(to_set(x), to_set(y), to_set(z))?;
            let separated = m_separated(&g, &query)?;
            println!("{separated}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Id { graph, treatment, outcome } => {
            let g = load_graph(&graph)?;
            let result = one_line_id(&g, &to_set(treatment), &to_set(outcome))?;
            println!("{}", result.to_report_json());
            if result.identified {
                eprintln!("identified; functional: {}", result.render_functional()?);
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("not identified");
                Ok(ExitCode::from(EXIT_DOMAIN))
            }
        }
        Command::Fit { graph, data, engine, tol, max_iter, treatment, outcome } => {
            let g = load_graph(&graph)?;
            let d = Dataset::from_csv_path(&data)?;
            match engine {
                EngineArg::LinearSem => fit_linear(&g, &d, tol, max_iter, treatment, outcome),
                EngineArg::BinaryNested => fit_binary(&g, &d, tol, max_iter, treatment, outcome),
            }
        }
        Command::Estimate { graph, data, treatment, outcome, strategy, bootstrap, level, seed } => {
            let g = load_graph(&graph)?;
            let d = Dataset::from_csv_path(&data)?;
            let query = EffectQuery::new(g, &treatment, &outcome)?;
            let strategy = if strategy == "auto" {
                suggest_strategy(&query)?
            } else {
                Strategy::from_str(&strategy)?
            };
            let nuisance = NuisanceSpec::default();
            let est = estimate(&query, &d, strategy, &nuisance, seed.seed)?;
            let ci = match bootstrap {
                Some(replicates) => {
                    let interval =
                        bootstrap_ci(&query, &d, strategy, &nuisance, replicates, level, seed.seed)?;
                    json!([interval.lower, interval.upper])
                }
                None => serde_json::Value::Null,
            };
            println!(
                "{}",
                json!({
                    "strategy": strategy.name(),
                    "fixability": format!("{:?}", classify_fixability(&query)?),
                    "ace": est.ace,
                    "point_t1": est.point_t1,
                    "point_t0": est.point_t0,
                    "ci": ci,
                    "order": query.order(),
                    "warnings": est.warnings,
                })
            );
            eprintln!("ACE ({}) = {:.6}", strategy.name(), est.ace);
            Ok(ExitCode::SUCCESS)
        }
        Command::Draw { graph, direction, output } => {
            let g = load_graph(&graph)?;
            let dot = g.to_dot(match direction {
                DirectionArg::Tb => RankDir::TopBottom,
                DirectionArg::Lr => RankDir::LeftRight,
            });
            match output {
                Some(path) => std::fs::write(path, dot)?,
                None => print!("{dot}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn to_set(items: Vec<String>) -> VertexSet {
    items.into_iter().collect()
}

fn fit_linear(
    g: &MixedGraph,
    d: &Dataset,
    tol: Option<f64>,
    max_iter: Option<usize>,
    treatment: Option<String>,
    outcome: Option<String>,
) -> Result<ExitCode, Error> {
    let tol = tol.unwrap_or(linear::DEFAULT_TOL);
    let max_iter = max_iter.unwrap_or(linear::DEFAULT_MAX_ITER);
    let fit = linear::ricf_fit(g, d, tol, max_iter)?;
    let p = g.vertex_count();
    let b: Vec<Vec<f64>> =
        (0..p).map(|i| (0..p).map(|j| fit.params.b()[(i, j)]).collect()).collect();
    let omega: Vec<Vec<f64>> =
        (0..p).map(|i| (0..p).map(|j| fit.params.omega()[(i, j)]).collect()).collect();
    let total_effect = match (&treatment, &outcome) {
        (Some(t), Some(y)) => {
            let te = fit.params.total_effect(
                &VertexSet::from([t.clone()]),
                &VertexSet::from([y.clone()]),
            )?;
            json!(te)
        }
        _ => serde_json::Value::Null,
    };
    let nll = linear::neg_log_likelihood(&fit.params, d)?;
    println!(
        "{}",
        json!({
            "engine": "linear-sem",
            "vertices": g.vertices(),
            "b": b,
            "omega": omega,
            "converged": fit.converged,
            "iterations": fit.iterations,
            "neg_log_likelihood": nll,
            "total_effect": total_effect,
        })
    );
    eprintln!(
        "RICF {} after {} sweep(s)",
        if fit.converged { "converged" } else { "did not converge" },
        fit.iterations
    );
    Ok(if fit.converged { ExitCode::SUCCESS } else { ExitCode::from(EXIT_DOMAIN) })
}

fn fit_binary(
    g: &MixedGraph,
    d: &Dataset,
    tol: Option<f64>,
    max_iter: Option<usize>,
    treatment: Option<String>,
    outcome: Option<String>,
) -> Result<ExitCode, Error> {
    let tol = tol.unwrap_or(binary::DEFAULT_TOL);
    let max_iter = max_iter.unwrap_or(binary::DEFAULT_MAX_ITER);
    let counts = BinaryCounts::from_dataset(d, g.vertices())?;
    let fit = binary::fit_mle(g, &counts, tol, max_iter)?;
    let ace = match (&treatment, &outcome) {
        (Some(t), Some(y)) => {
            let t1 = fit.model.estimate_counterfactual(
                &BTreeMap::from([(t.clone(), 1u8)]),
                &BTreeMap::from([(y.clone(), 1u8)]),
            )?;
            let t0 = fit.model.estimate_counterfactual(
                &BTreeMap::from([(t.clone(), 0u8)]),
                &BTreeMap::from([(y.clone(), 1u8)]),
            )?;
            json!({"ace": t1 - t0, "point_t1": t1, "point_t0": t0})
        }
        _ => serde_json::Value::Null,
    };
    println!(
        "{}",
        json!({
            "engine": "binary-nested",
            "parameters": fit.model.parameter_report(),
            "log_likelihood": fit.log_likelihood,
            "iterations": fit.cycles,
            "converged": fit.converged,
            "empty_cells": fit.empty_cells,
            "effect": ace,
        })
    );
    eprintln!(
        "coordinate descent {} after {} cycle(s)",
        if fit.converged { "converged" } else { "did not converge" },
        fit.cycles
    );
    Ok(if fit.converged { ExitCode::SUCCESS } else { ExitCode::from(EXIT_DOMAIN) })
}
