//! CSV and JSON renderings shared by the command line and the bindings.
//!
//! Reals are written with 17 significant digits in scientific notation and
//! `.` as the decimal separator, so every value round-trips exactly.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::cavity::OrderParameterCurve;
use crate::diluted::SweepRow;
use crate::oracle::{ParticipationBin, ReplicaRecord};
use crate::recursion::{GridDistribution, IterationTrace, Mode};

/// Rendering used for every real in a CSV.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn table<I>(header: &str, rows: I) -> String
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// `x,G,W_residual` where the residual is the conservation defect at `x`.
pub fn curve_csv(curve: &OrderParameterCurve) -> String {
    table(
        "x,G,W_residual",
        curve
            .points
            .iter()
            .map(|p| vec![num(p.x), num(p.g), num(curve.residual(p))]),
    )
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    table(
        "lambda,q,edge_cost,penalty_cost,total_cost,longest_edge",
        rows.iter().map(|r| {
            vec![
                num(r.lambda),
                num(r.q),
                num(r.edge_cost),
                num(r.penalty_cost),
                num(r.total_cost),
                num(r.longest_edge),
            ]
        }),
    )
}

/// Rows are `(x, q, h)`.
pub fn h_curve_csv(rows: &[(f64, f64, f64)]) -> String {
    table("x,q,h", rows.iter().map(|&(x, q, h)| vec![num(x), num(q), num(h)]))
}

pub fn trace_csv(trace: &IterationTrace) -> String {
    table(
        "k,sup_gap,terminal_gap,expectation_gap,bound",
        trace.records.iter().map(|r| {
            vec![
                r.k.to_string(),
                num(r.sup_gap),
                num(r.terminal_gap),
                num(r.expectation_gap),
                num(r.bound),
            ]
        }),
    )
}

pub fn distribution_csv(dist: &GridDistribution) -> String {
    table(
        "x,survival",
        (0..=dist.n_cells).map(|i| vec![num(dist.x(i)), num(dist.values[i])]),
    )
}

pub fn distribution_header(dist: &GridDistribution, mode: Mode) -> Value {
    json!({
        "lambda": dist.lambda,
        "mode": mode,
        "n_cells": dist.n_cells,
        "atom": dist.atom,
    })
}

/// Rows are `(x, empirical, reference)`.
pub fn histogram_csv(rows: &[(f64, f64, f64)]) -> String {
    table(
        "x,empirical_survival,reference_survival",
        rows.iter().map(|&(x, e, r)| vec![num(x), num(e), num(r)]),
    )
}

pub fn ensemble_csv(records: &[ReplicaRecord]) -> String {
    table(
        "replica,cost,unmatched,longest_edge",
        records.iter().map(|r| {
            vec![
                r.replica.to_string(),
                num(r.cost),
                r.unmatched.to_string(),
                num(r.longest_edge),
            ]
        }),
    )
}

/// `length_bin` is the bin centre.
pub fn participation_csv(bins: &[ParticipationBin]) -> String {
    table(
        "length_bin,participated,total,h_predicted",
        bins.iter().map(|b| {
            vec![
                num(b.center()),
                b.participated.to_string(),
                b.total.to_string(),
                num(b.h_predicted),
            ]
        }),
    )
}

/// Free-form table helper for ad hoc exports.
pub fn generic_csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            first = false;
            let _ = write!(out, "{}", num(*v));
        }
        out.push('\n');
    }
    out
}
