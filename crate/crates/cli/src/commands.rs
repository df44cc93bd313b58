use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use log::{info, warn};
use serde::Serialize;
use serde_json::json;
use wtail::quantile::{self, EstimatorKind, KChoice, QuantileEstimate, ReturnLevelQuery};
use wtail::selection::{self, KGrid, SelectOptions, SelectionResult};
use wtail::simulation::{self, Execution, SimPlan};
use wtail::{io, tail, OrderedSample};

use crate::args::*;
use crate::Failure;

type Outcome = std::result::Result<(), Failure>;

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Estimate(a) => estimate(cli, a),
        Command::SelectK(a) => select_k(cli, a),
        Command::Simulate(a) => simulate(cli, a),
        Command::Boxplot(a) => boxplot(cli, a),
        Command::ReturnLevel(a) => return_level(cli, a),
        Command::Limits(a) => limits(cli, a),
    }
}

fn emit(out: Option<&Path>, value: &serde_json::Value) -> Outcome {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            serde_json::to_writer_pretty(&mut w, value).map_err(wtail::Error::from)?;
            w.write_all(b"\n")?;
            w.flush()?;
            info!("wrote {}", path.display());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            serde_json::to_writer_pretty(&mut stdout, value).map_err(wtail::Error::from)?;
            stdout.write_all(b"\n")?;
        }
    }
    Ok(())
}

fn load(path: &Path) -> std::result::Result<OrderedSample, Failure> {
    let values = io::read_sample_file(path).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })?;
    Ok(OrderedSample::new(values)?)
}

fn resolve_p(t: &TargetArgs, n: usize) -> std::result::Result<f64, Failure> {
    match (t.p, t.tau) {
        (Some(p), _) => Ok(p),
        (None, Some(tau)) if tau > 0.0 && tau.is_finite() => Ok((-tau * (n as f64).ln()).exp()),
        (None, Some(tau)) => Err(Failure::usage(format!("--tau must be positive and finite, got {tau}"))),
        (None, None) => Err(Failure::usage("one of --p or --tau is required")),
    }
}

fn k_choice(k: &KArgs, n: usize) -> std::result::Result<KChoice, Failure> {
    if let Some(k) = k.k {
        return Ok(KChoice::Fixed(k));
    }
    let def = KGrid::default_for(n);
    Ok(KChoice::Auto(KGrid::new(k.kmin.unwrap_or(def.k_min), k.kmax.unwrap_or(def.k_max), n)?))
}

/// Selection outcome without the full curve.
#[derive(Serialize)]
struct SelectionSummary {
    k_min: usize,
    k_max: usize,
    k_hat: usize,
    amse: f64,
    tie_policy_applied: bool,
}

impl SelectionSummary {
    fn new(grid: KGrid, sel: &SelectionResult) -> Self {
        let amse = sel
            .curve
            .k_values
            .iter()
            .zip(&sel.curve.amse)
            .find(|(k, _)| **k == sel.k_hat)
            .map_or(f64::NAN, |(_, a)| *a);
        SelectionSummary {
            k_min: grid.k_min,
            k_max: grid.k_max,
            k_hat: sel.k_hat,
            amse,
            tie_policy_applied: sel.tie_policy_applied,
        }
    }
}

fn pick_k(
    s: &OrderedSample,
    p: f64,
    choice: &KChoice,
) -> std::result::Result<(usize, Option<SelectionSummary>), Failure> {
    match choice {
        KChoice::Fixed(k) => Ok((*k, None)),
        KChoice::Auto(grid) => {
            let sel = selection::select_k(s, p, grid.k_min, grid.k_max)?;
            if sel.tie_policy_applied {
                warn!("AMSE minimum is attained at several k; using the smallest");
            }
            Ok((sel.k_hat, Some(SelectionSummary::new(*grid, &sel))))
        }
    }
}

fn kinds(choice: EstimatorChoice) -> &'static [EstimatorKind] {
    match choice {
        EstimatorChoice::Classic => &[EstimatorKind::Classic],
        EstimatorChoice::Reduced => &[EstimatorKind::Reduced],
        EstimatorChoice::Both => &[EstimatorKind::Classic, EstimatorKind::Reduced],
    }
}

fn warnings_for(estimates: &[QuantileEstimate], sel: Option<&SelectionSummary>) -> Vec<String> {
    let mut w = Vec::new();
    if let Some(e) = estimates.first().filter(|e| e.no_extrapolation) {
        w.push(format!("tau = {} <= 1: the target lies inside the sample range", e.tau));
    }
    if sel.is_some_and(|s| s.tie_policy_applied) {
        w.push("AMSE minimum attained at several k; the smallest was used".into());
    }
    w
}

fn estimate(cli: &Cli, a: &EstimateArgs) -> Outcome {
    let s = load(&a.file)?;
    let n = s.len();
    let p = resolve_p(&a.target, n)?;
    let (k, sel) = pick_k(&s, p, &k_choice(&a.k, n)?)?;
    let fit = tail::ls_fit(&s, k)?;
    let estimates = kinds(a.estimator)
        .iter()
        .map(|kind| match kind {
            EstimatorKind::Classic => quantile::quantile_classic(&s, k, p, fit.theta_tilde),
            EstimatorKind::Reduced => quantile::quantile_reduced_from_fit(&s, &fit, p, a.rho),
        })
        .collect::<wtail::Result<Vec<_>>>()?;
    let warnings = warnings_for(&estimates, sel.as_ref());
    emit(
        a.out.as_deref(),
        &json!({
            "tool": "wtail",
            "version": env!("CARGO_PKG_VERSION"),
            "config": cli,
            "n": n,
            "p": p,
            "k": k,
            "tau": estimates[0].tau,
            "selection": sel,
            "fit": fit,
            "estimates": estimates,
            "warnings": warnings,
        }),
    )
}

fn select_k(cli: &Cli, a: &SelectArgs) -> Outcome {
    let s = load(&a.file)?;
    let n = s.len();
    let p = resolve_p(&a.target, n)?;
    let def = KGrid::default_for(n);
    let grid = KGrid::new(a.kmin.unwrap_or(def.k_min), a.kmax.unwrap_or(def.k_max), n)?;
    let sel = selection::select_k_with(&s, p, grid.k_min, grid.k_max, SelectOptions { smoothing: a.smooth })?;
    if let Some(path) = &a.curve {
        let w = BufWriter::new(File::create(path)?);
        io::write_amse_csv(w, &sel.curve.k_values, &sel.curve.amse)?;
        info!("wrote {}", path.display());
    }
    let terms = if a.terms {
        Some(grid.iter().map(|k| selection::amse_terms(&s, k, p)).collect::<wtail::Result<Vec<_>>>()?)
    } else {
        None
    };
    let fit = tail::ls_fit(&s, sel.k_hat)?;
    emit(
        a.out.as_deref(),
        &json!({
            "tool": "wtail",
            "version": env!("CARGO_PKG_VERSION"),
            "config": cli,
            "n": n,
            "p": p,
            "selection": SelectionSummary::new(grid, &sel),
            "fit": fit,
            "terms": terms,
        }),
    )
}

fn exec(serial: bool) -> Execution {
    if serial {
        Execution::Serial
    } else {
        Execution::Parallel
    }
}

fn finish_sim(cli: &Cli, dir: &Path, plan: &SimPlan, written: Vec<std::path::PathBuf>) -> Outcome {
    for path in &written {
        info!("wrote {}", path.display());
    }
    let files: Vec<String> = written.iter().map(|p| p.display().to_string()).collect();
    emit(
        None,
        &json!({
            "tool": "wtail",
            "version": env!("CARGO_PKG_VERSION"),
            "config": cli,
            "seed": plan.seed,
            "out": dir,
            "files": files,
        }),
    )
}

fn simulate(cli: &Cli, a: &SimulateArgs) -> Outcome {
    let c = &a.common;
    let k_max = a.kmax.unwrap_or(360.min(c.n.saturating_sub(1)));
    let plan = SimPlan {
        spec: c.dist,
        n: c.n,
        replicates: c.replicates,
        taus: c.taus.clone(),
        k_grid: (a.kmin..=k_max).collect(),
        rho_plugin: a.rho_plugin,
        seed: c.seed,
    };
    let curves = simulation::run_curves_with(&plan, exec(c.serial))?;
    let boxplots = if a.boxplots { Some(simulation::run_boxplots_with(&plan, exec(c.serial))?) } else { None };
    let written = io::write_output_dir(&c.out, "simulate", &plan, Some(&curves), boxplots.as_deref())?;
    finish_sim(cli, &c.out, &plan, written)
}

fn boxplot(cli: &Cli, a: &BoxplotArgs) -> Outcome {
    let c = &a.common;
    let plan = SimPlan {
        spec: c.dist,
        n: c.n,
        replicates: c.replicates,
        taus: c.taus.clone(),
        k_grid: Vec::new(),
        rho_plugin: quantile::DEFAULT_RHO,
        seed: c.seed,
    };
    let boxplots = simulation::run_boxplots_with(&plan, exec(c.serial))?;
    let written = io::write_output_dir(&c.out, "boxplot", &plan, None, Some(&boxplots))?;
    finish_sim(cli, &c.out, &plan, written)
}

fn return_level(cli: &Cli, a: &ReturnLevelArgs) -> Outcome {
    let s = load(&a.file)?;
    let n = s.len();
    let count = a.count.unwrap_or(n);
    if count != n {
        warn!("{count} exceedances declared but the file holds {n} values");
    }
    let choice = k_choice(&a.k, n)?;
    let mut levels = Vec::with_capacity(a.horizons.len());
    for &horizon in &a.horizons {
        let q = ReturnLevelQuery { years_observed: a.years, n_exceedances: count, horizon_years: horizon, threshold: a.threshold };
        let p = q.tail_probability()?;
        let (k, sel) = pick_k(&s, p, &choice)?;
        let fit = tail::ls_fit(&s, k)?;
        let estimates = kinds(a.estimator)
            .iter()
            .map(|&kind| Ok(quantile::return_level(&s, &q, &KChoice::Fixed(k), kind, a.rho)?.estimate))
            .collect::<std::result::Result<Vec<_>, Failure>>()?;
        let warnings = warnings_for(&estimates, sel.as_ref());
        levels.push(json!({
            "horizon_years": horizon,
            "p": p,
            "k": k,
            "level": estimates[0].value,
            "selection": sel,
            "fit": fit,
            "estimates": estimates,
            "warnings": warnings,
        }));
    }
    emit(
        a.out.as_deref(),
        &json!({
            "tool": "wtail",
            "version": env!("CARGO_PKG_VERSION"),
            "config": cli,
            "n": n,
            "years": a.years,
            "count": count,
            "threshold": a.threshold,
            "levels": levels,
        }),
    )
}

fn limits(cli: &Cli, a: &LimitsArgs) -> Outcome {
    let params = simulation::limit_params(a.tau, a.rho, a.rho_plugin)?;
    emit(
        a.out.as_deref(),
        &json!({
            "tool": "wtail",
            "version": env!("CARGO_PKG_VERSION"),
            "config": cli,
            "limits": params,
        }),
    )
}
