use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use mcda::baselines::{solve_nlda, TraceRatioReport};
use mcda::eval::{
    default_k, evaluate_method, fit_tuned, split_folds, sweep_dimensions, EvalReport, Method, MethodConfig,
};
use mcda::generate::{generate_nullspace_toy, ToyGenSpec};
use mcda::io::{dump_projection, read_matrix, write_matrix, write_report};
use mcda::{analyze, projected_separation, solve_mcda, Dataset, Error, ProjectedSeparation, SolverConfig, SolverReport};
use serde::Serialize;

use crate::{BenchmarkArgs, DemoArgs, EvaluateArgs, FitArgs, MethodArgs, TransformArgs};

/// A failed run: the exit code plus the message for standard error.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: crate::exit_code(&e),
            message: e.to_string(),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

fn out_dir(dir: &Path) -> mcda::Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn write_text(path: PathBuf, text: &str) -> mcda::Result<()> {
    fs::write(&path, text).map_err(|source| Error::Io { path, source })
}

fn method_config(method: Method, params: &MethodArgs, seed: u64) -> MethodConfig {
    let mut config = MethodConfig::new(method)
        .with_gamma(params.gamma.clone())
        .with_mu(params.mu.clone());
    config.tune_seed = seed;
    config
}

#[derive(Debug, Serialize)]
struct FitReport {
    method: String,
    k: usize,
    gamma: Option<f64>,
    mu: Option<f64>,
    separation: ProjectedSeparation,
    solver: Option<SolverReport>,
    trace_ratio: Option<TraceRatioReport>,
}

pub fn fit(a: FitArgs) -> Outcome {
    let dataset = a.data.source()?.load(a.data.seed)?;
    let k = a.k.unwrap_or_else(|| default_k(&dataset));
    let config = method_config(a.method, &a.params, a.data.seed);
    let fitted = fit_tuned(&dataset, k, &config, a.params.knn)?;
    let (stats, scatter) = analyze(&dataset);
    let report = FitReport {
        method: a.method.name().to_string(),
        k,
        gamma: fitted.gamma,
        mu: fitted.mu,
        separation: projected_separation(fitted.map.matrix(), &stats, &scatter),
        solver: fitted.solver,
        trace_ratio: fitted.trace_ratio,
    };
    if let Some(s) = &report.solver {
        log::info!(
            "{}: {} iterations, converged = {}, J = {:.6e}",
            report.method,
            s.iterations,
            s.converged,
            s.final_objective
        );
    }
    out_dir(&a.out)?;
    write_matrix(fitted.map.matrix(), &a.out.join("projection.csv"))?;
    write_report(&report, &a.out.join("report.json"))?;
    Ok(())
}

pub fn transform(a: TransformArgs) -> Outcome {
    let dataset = a.data.source()?.load(a.data.seed)?;
    let map = read_matrix(&a.projection)?;
    out_dir(&a.out)?;
    dump_projection(&dataset, &map, &a.out.join("projected.csv"))?;
    Ok(())
}

fn infeasible_failure(reports: &[EvalReport]) -> Outcome {
    match reports.iter().find_map(|r| r.infeasible.as_ref()) {
        Some(message) => Err(Failure {
            code: 4,
            message: message.clone(),
        }),
        None => Ok(()),
    }
}

pub fn evaluate(a: EvaluateArgs) -> Outcome {
    let dataset = a.data.source()?.load(a.data.seed)?;
    let plan = split_folds(&dataset, a.folds, a.data.seed)?;
    let configs: Vec<MethodConfig> = a
        .method
        .iter()
        .map(|&m| method_config(m, &a.params, a.data.seed))
        .collect();
    out_dir(&a.out)?;

    if let Some(dims) = a.dims {
        let rows = sweep_dimensions(&dataset, &configs, dims, &plan, a.params.knn)?;
        let mut text = String::from("k,method,accuracy,macro_f1,micro_f1\n");
        for r in &rows {
            writeln!(text, "{},{},{},{},{}", r.k, r.method, r.accuracy, r.macro_f1, r.micro_f1).unwrap();
            println!("k={:<3} {:<12} accuracy {:.4}", r.k, r.method, r.accuracy);
        }
        write_text(a.out.join("sweep.csv"), &text)?;
        return Ok(());
    }

    let k = a.k.unwrap_or_else(|| default_k(&dataset));
    let mut reports = Vec::new();
    for config in &configs {
        let report = evaluate_method(&dataset, config, k, &plan, a.params.knn)?;
        write_report(&report, &a.out.join(format!("{}.json", report.method)))?;
        match report.mean_accuracy() {
            Some(acc) => println!("{:<12} accuracy {:.4}", report.method, acc),
            None => println!("{:<12} infeasible", report.method),
        }
        reports.push(report);
    }
    infeasible_failure(&reports)
}

#[derive(Debug, Default)]
struct Tally {
    runs: usize,
    infeasible: usize,
    accuracy: f64,
    macro_f1: f64,
    micro_f1: f64,
}

pub fn benchmark(a: BenchmarkArgs) -> Outcome {
    let source = a.data.source()?;
    let methods = if a.method.is_empty() {
        Method::ALL.to_vec()
    } else {
        a.method.clone()
    };
    out_dir(&a.out)?;

    let mut detail = String::from("seed,method,k,accuracy,macro_f1,micro_f1,infeasible\n");
    let mut tallies: Vec<Tally> = methods.iter().map(|_| Tally::default()).collect();
    for seed in a.data.seed..a.data.seed + a.repeats {
        let dataset: Dataset = source.load(seed)?;
        let plan = split_folds(&dataset, a.folds, seed)?;
        let k = a.k.unwrap_or_else(|| default_k(&dataset));
        for (method, tally) in methods.iter().zip(&mut tallies) {
            let config = method_config(*method, &a.params, seed);
            let report = evaluate_method(&dataset, &config, k, &plan, a.params.knn)?;
            tally.runs += 1;
            match &report.mean {
                Some(m) => {
                    tally.accuracy += m.accuracy;
                    tally.macro_f1 += m.macro_f1;
                    tally.micro_f1 += m.micro_f1;
                    writeln!(detail, "{seed},{method},{k},{},{},{},false", m.accuracy, m.macro_f1, m.micro_f1)
                        .unwrap();
                }
                None => {
                    tally.infeasible += 1;
                    writeln!(detail, "{seed},{method},{k},,,,true").unwrap();
                }
            }
            log::info!("seed {seed} {method}: {:?}", report.mean_accuracy());
        }
    }

    let mut summary = String::from("method,runs,infeasible,mean_accuracy,mean_macro_f1,mean_micro_f1\n");
    for (method, t) in methods.iter().zip(&tallies) {
        let ok = (t.runs - t.infeasible) as f64;
        if ok > 0.0 {
            writeln!(
                summary,
                "{method},{},{},{},{},{}",
                t.runs,
                t.infeasible,
                t.accuracy / ok,
                t.macro_f1 / ok,
                t.micro_f1 / ok
            )
            .unwrap();
            println!("{method:<12} accuracy {:.4} over {} runs", t.accuracy / ok, ok);
        } else {
            writeln!(summary, "{method},{},{},,,", t.runs, t.infeasible).unwrap();
            println!("{method:<12} infeasible");
        }
    }
    write_text(a.out.join("benchmark.csv"), &detail)?;
    write_text(a.out.join("summary.csv"), &summary)?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct DemoSummary {
    seed: u64,
    noise: f64,
    nlda: ProjectedSeparation,
    mcda: ProjectedSeparation,
    mcda_solver: SolverReport,
}

pub fn demo_toy(a: DemoArgs) -> Outcome {
    let spec = ToyGenSpec {
        seed: a.seed,
        noise_scale: a.noise,
        ..ToyGenSpec::default()
    };
    let dataset: Dataset = generate_nullspace_toy(&spec)?.into();
    let (stats, scatter) = analyze(&dataset);
    let nlda = solve_nlda(&dataset, 2)?;
    let (mcda, solver) = solve_mcda(&dataset, 2, &SolverConfig::default())?;

    out_dir(&a.out)?;
    dump_projection(&dataset, nlda.matrix(), &a.out.join("nlda.csv"))?;
    dump_projection(&dataset, mcda.matrix(), &a.out.join("mcda.csv"))?;
    let summary = DemoSummary {
        seed: a.seed,
        noise: a.noise,
        nlda: projected_separation(nlda.matrix(), &stats, &scatter),
        mcda: projected_separation(mcda.matrix(), &stats, &scatter),
        mcda_solver: solver,
    };
    write_report(&summary, &a.out.join("summary.json"))?;
    println!("{:<6} {:>14} {:>14} {:>14}", "", "Tr(G'SbG)", "Tr(G'SwG)", "min pair");
    for (name, s) in [("nlda", &summary.nlda), ("mcda", &summary.mcda)] {
        println!(
            "{name:<6} {:>14.6e} {:>14.6e} {:>14.6e}",
            s.between_trace, s.within_trace, s.min_pair_distance
        );
    }
    Ok(())
}
