use meanfield_core::diluted::{
    h_matching, limit_f, q_from_lambda, sweep_row, total_diluted_cost, DilutedMatchingModel,
};
use meanfield_core::export::{
    curve_csv, distribution_csv, distribution_header, ensemble_csv, generic_csv, h_curve_csv, histogram_csv,
    participation_csv, sweep_csv, trace_csv,
};
use meanfield_core::oracle::ensemble_stats;
use meanfield_core::popdyn::{ks_report, run_population, survival_table};
use meanfield_core::recursion::{conserved_profile, cost_from_f, run_iteration_with, IterationOptions, Side};
use meanfield_core::{
    cavity::constants_record, curve_area, solve_order_parameter, tsp_constant_from_lambda, GridDistribution, Kernel,
    Mode,
};
use serde_json::{json, Value};

use crate::config::*;
use crate::CliError;

/// Rows in the popdyn survival table.
const SURVIVAL_ROWS: usize = 201;

pub enum Body {
    Csv(String),
    Json(Value),
}

pub struct Artifact {
    pub name: &'static str,
    pub body: Body,
}

fn csv(name: &'static str, s: String) -> Artifact {
    Artifact {
        name,
        body: Body::Csv(s),
    }
}

fn json(name: &'static str, v: Value) -> Artifact {
    Artifact {
        name,
        body: Body::Json(v),
    }
}

pub fn dispatch(config: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    config.validate()?;
    match config {
        RunConfig::Constants(a) => constants(a),
        RunConfig::Curve(a) => curve(a),
        RunConfig::FiniteLambda(a) => finite_lambda(a),
        RunConfig::Iterate(a) => iterate(a),
        RunConfig::Popdyn(a) => popdyn(a),
        RunConfig::Simulate(a) => simulate(a),
        RunConfig::TspC(a) => tsp_c(a),
    }
}

fn constants(a: &ConstantsArgs) -> Result<Vec<Artifact>, CliError> {
    let record = constants_record(a.kernel, a.x_limit, a.grid)?;
    Ok(vec![json("constants.json", serde_json::to_value(record)?)])
}

fn curve(a: &CurveArgs) -> Result<Vec<Artifact>, CliError> {
    let c = match (a.kernel, a.lambda) {
        (k, None) => k.c_star(),
        (Kernel::Matching, Some(l)) => 1.0 + q_from_lambda(l)?,
        (Kernel::Tsp, Some(l)) => tsp_constant_from_lambda(l)?.c,
    };
    let curve = solve_order_parameter(a.kernel, c, a.x_limit, a.grid)?;
    Ok(vec![csv("curve.csv", curve_csv(&curve))])
}

fn finite_lambda(a: &FiniteLambdaArgs) -> Result<Vec<Artifact>, CliError> {
    let rows = (1..=a.sweep)
        .map(|i| sweep_row(a.lambda * i as f64 / a.sweep as f64))
        .collect::<Result<Vec<_>, _>>()?;
    let model = DilutedMatchingModel::from_lambda(a.lambda)?;
    let f = GridDistribution::from_fn(a.lambda, a.grid.max(16), |x| limit_f(&model, x).unwrap_or(f64::NAN))?;
    let h = (0..=a.grid)
        .map(|i| {
            let x = a.lambda * i as f64 / a.grid as f64;
            h_matching(x, model.q).map(|h| (x, model.q, h))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(vec![
        json("summary.json", serde_json::to_value(sweep_row(a.lambda)?)?),
        csv("sweep.csv", sweep_csv(&rows)),
        csv("f.csv", distribution_csv(&f)),
        csv("h.csv", h_curve_csv(&h)),
    ])
}

fn iterate(a: &IterateArgs) -> Result<Vec<Artifact>, CliError> {
    let opts = IterationOptions {
        k_max: a.k,
        stop_gap: a.stop_gap,
    };
    let run = run_iteration_with(a.mode, a.lambda, a.grid, opts)?;
    let cost = if run.trace.converged {
        Some(cost_from_f(&run.b, a.mode)?)
    } else {
        None
    };
    let (constant, deviation) = conserved_profile(&run.b, a.mode);
    let summary = json!({
        "converged": run.trace.converged,
        "last": run.trace.last(),
        "side_a": distribution_header(&run.a, a.mode),
        "side_b": distribution_header(&run.b, a.mode),
        "cost": cost,
        "conserved_constant": constant,
        "conserved_deviation": deviation,
    });
    Ok(vec![
        json("summary.json", summary),
        csv("trace.csv", trace_csv(&run.trace)),
        csv("side_a.csv", distribution_csv(&run.a)),
        csv("side_b.csv", distribution_csv(&run.b)),
    ])
}

fn reference_distribution(mode: Mode, lambda: f64, cells: usize) -> Result<GridDistribution, CliError> {
    Ok(match mode {
        Mode::Min => {
            let m = DilutedMatchingModel::from_lambda(lambda)?;
            GridDistribution::from_fn(lambda, cells, |x| limit_f(&m, x).unwrap_or(f64::NAN))?
        }
        Mode::Min2 => run_iteration_with(mode, lambda, cells, IterationOptions::default())?.b,
    })
}

fn popdyn(a: &PopdynArgs) -> Result<Vec<Artifact>, CliError> {
    let pop = run_population(a.lambda, a.mode, a.k, a.pop, a.seed, Side::B)?;
    let reference = reference_distribution(a.mode, a.lambda, a.grid)?;
    let report = ks_report(&pop, &reference)?;
    let table = survival_table(&pop, &reference, SURVIVAL_ROWS)?;
    let summary = json!({
        "generation": pop.generation,
        "size": pop.len(),
        "mean": pop.mean(),
        "std_error": pop.std_error(),
        "ks": report.ks,
        "atom_empirical": report.atom_empirical,
        "atom_reference": report.atom_reference,
    });
    Ok(vec![
        json("summary.json", summary),
        csv("survival.csv", histogram_csv(&table)),
    ])
}

fn simulate(a: &SimulateArgs) -> Result<Vec<Artifact>, CliError> {
    let s = ensemble_stats(a.n, a.lambda, a.replicas, a.seed)?;
    let mut summary = serde_json::to_value(&s)?;
    if let Value::Object(map) = &mut summary {
        map.remove("records");
        map.remove("participation");
        map.insert("q_limit".into(), q_from_lambda(a.lambda)?.into());
        map.insert("cost_limit".into(), total_diluted_cost(a.lambda)?.into());
    }
    Ok(vec![
        json("summary.json", summary),
        csv("ensemble.csv", ensemble_csv(&s.records)),
        csv("participation.csv", participation_csv(&s.participation)),
    ])
}

fn tsp_c(a: &TspCArgs) -> Result<Vec<Artifact>, CliError> {
    let opts = IterationOptions {
        k_max: a.k,
        stop_gap: a.stop_gap,
    };
    let mut rows = Vec::with_capacity(a.lambda.len());
    for &lambda in &a.lambda {
        let k = tsp_constant_from_lambda(lambda)?;
        let half_area = 0.5 * curve_area(Kernel::Tsp, k.c)?;
        let run = run_iteration_with(Mode::Min2, lambda, a.grid, opts)?;
        let cost = cost_from_f(&run.b, Mode::Min2)?;
        rows.push(vec![
            lambda,
            k.c,
            k.g0,
            k.domain_length,
            half_area,
            cost,
            cost - half_area,
        ]);
    }
    let header = [
        "lambda",
        "c",
        "g0",
        "domain_length",
        "half_area",
        "cost_from_f",
        "cost_gap",
    ];
    Ok(vec![csv("tsp_c.csv", generic_csv(&header, &rows))])
}
