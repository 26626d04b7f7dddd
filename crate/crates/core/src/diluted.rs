//! Closed-form theory of the diluted matching problem at finite penalty `λ`.
//!
//! Edge lengths live on the rescaled model (uniform on `[0, n]`), a vertex
//! left unmatched costs `λ/2`, and `q` is the limiting density of unmatched
//! vertices: `q = e^{−(1+q)λ/2}`, equivalently `λ = −2 log q / (1 + q)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};
use crate::roots::bisect;

/// Below this distance of `α = e^{(1+q)x}` from 1 the closed forms lose
/// precision and the integral form is used instead.
pub const ALPHA_SWITCH: f64 = 1e-4;

/// Penalty `λ` together with its unmatched density `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DilutedMatchingModel {
    pub lambda: f64,
    pub q: f64,
}

impl DilutedMatchingModel {
    pub fn from_lambda(lambda: f64) -> Result<Self> {
        Ok(Self {
            lambda,
            q: q_from_lambda(lambda)?,
        })
    }

    pub fn from_q(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::domain(format!("q = {q} must lie in (0, 1)")));
        }
        Ok(Self {
            lambda: lambda_from_q(q),
            q,
        })
    }

    pub fn half_width(&self) -> f64 {
        0.5 * self.lambda
    }

    /// Survival function `F(x) = P(f ≥ x)` of the limiting valuation.
    pub fn survival(&self, x: f64) -> Result<f64> {
        limit_f(self, x)
    }
}

/// Unique `q ∈ (0, 1)` with `q = e^{−(1+q)λ/2}`.
///
/// Runs the (contractive) fixed-point map with mild damping and falls back
/// to bisection on `log q + (1+q)λ/2` if it stalls.
pub fn q_from_lambda(lambda: f64) -> Result<f64> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::domain(format!("lambda = {lambda} must be positive and finite")));
    }
    let half = 0.5 * lambda;
    let map = |q: f64| (-(1.0 + q) * half).exp();
    let mut q = map(0.0);
    for _ in 0..500 {
        let next = 0.9 * map(q) + 0.1 * q;
        if (next - q).abs() <= 1e-15 * next {
            q = next;
            let resid = (q - map(q)).abs();
            if resid <= 1e-13 * q.max(1e-300) {
                return finish_q(q, lambda);
            }
            break;
        }
        q = next;
    }
    let q = bisect(|q| q.ln() + (1.0 + q) * half, f64::MIN_POSITIVE, 1.0, 0.0, 1e-15)?;
    finish_q(q, lambda)
}

fn finish_q(q: f64, lambda: f64) -> Result<f64> {
    if q <= 0.0 {
        return Err(Error::numeric(format!("q underflows for lambda = {lambda}"), 0.0));
    }
    Ok(q)
}

/// `λ = −2 log q / (1 + q)`.
pub fn lambda_from_q(q: f64) -> f64 {
    -2.0 * q.ln() / (1.0 + q)
}

/// Limit of the valuation survival function,
/// `F(x) = (1+q) / (1 + e^{(1+q)x})` on `[−λ/2, λ/2]`, with the atom
/// `F(λ/2) = q`.
pub fn limit_f(model: &DilutedMatchingModel, x: f64) -> Result<f64> {
    let half = model.half_width();
    let slack = 1e-12 * half.max(1.0);
    if !(x >= -half - slack && x <= half + slack) {
        return Err(Error::domain(format!(
            "x = {x} outside [−λ/2, λ/2] = [{}, {half}]",
            -half
        )));
    }
    let q = model.q;
    Ok((1.0 + q) / (1.0 + ((1.0 + q) * x).exp()))
}

fn check_h_args(x: f64, q: f64) -> Result<()> {
    if !(0.0..1.0).contains(&q) {
        return Err(Error::domain(format!("q = {q} must lie in [0, 1)")));
    }
    let lambda = if q == 0.0 { f64::INFINITY } else { lambda_from_q(q) };
    if !(x >= 0.0 && x <= lambda * (1.0 + 1e-12)) {
        return Err(Error::domain(format!(
            "edge length x = {x} outside [0, λ(q)] = [0, {lambda}]"
        )));
    }
    Ok(())
}

/// `∫ t / ((1+t)^2 (t+α)) dt` over `t ∈ [lo, hi]` (`hi` may be infinite),
/// via `u = t/(1+t)` which turns the integrand into `u / (u + α(1−u))`.
fn participation_integral(alpha: f64, lo: f64, hi: f64) -> Result<f64> {
    let u_lo = lo / (1.0 + lo);
    let u_hi = if hi.is_infinite() { 1.0 } else { hi / (1.0 + hi) };
    let opts = QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-14,
        max_intervals: 2000,
    };
    Ok(integrate(|u| u / (u + alpha * (1.0 - u)), u_lo, u_hi, &opts)?.value)
}

/// Primitive of `t / ((1+t)^2 (t+α))` for `α ≠ 1`, with `am1 = α − 1`.
fn participation_primitive(am1: f64, t: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let alpha = 1.0 + am1;
    // log((t+1)/(t+α)) = −log1p((α−1)/(t+1))
    -alpha / (am1 * am1) * (am1 / (t + 1.0)).ln_1p() + 1.0 / (am1 * (t + 1.0))
}

/// Participation function `h(x) = P(f₁ + f₂ ≥ x)` for two independent
/// valuations from the limit law (logistic part on `[−λ/2, λ/2]` plus the
/// atom `q` at `λ/2`): the limiting chance that an edge of length
/// `0 ≤ x ≤ λ(q)` belongs to the optimum diluted matching.
///
/// With `α = e^{(1+q)x}` and `t = e^{(1+q)u}`,
/// `h = q(1+q)/(1+αq) + (1+q)^2 ∫_{αq}^{1/q} t / ((1+t)^2 (t+α)) dt`,
/// evaluated through the primitive
/// `α/(α−1)^2 · log((t+1)/(t+α)) + 1/((α−1)(t+1))`; within
/// [`ALPHA_SWITCH`] of `α = 1` the integral is evaluated directly.
/// `h(0) = 1/2 + q − q²/2`, and at `q = 0` this is
/// `(1 − e^x + x e^x)/(e^x − 1)^2`. Its first moment reproduces
/// [`matching_edge_cost`].
pub fn h_matching(x: f64, q: f64) -> Result<f64> {
    check_h_args(x, q)?;
    let alpha = ((1.0 + q) * x).exp();
    let scale = (1.0 + q) * (1.0 + q);
    // f₁ at the atom needs f₂ ≥ x − λ/2, whose survival is (1+q)/(1+αq).
    let atom_term = q * (1.0 + q) / (1.0 + alpha * q);
    let hi = if q == 0.0 { f64::INFINITY } else { 1.0 / q };
    let lo = alpha * q;
    if lo >= hi {
        return Ok(atom_term);
    }
    let am1 = ((1.0 + q) * x).exp_m1();
    let integral = if am1.abs() < ALPHA_SWITCH {
        participation_integral(alpha, lo, hi)?
    } else {
        participation_primitive(am1, hi) - participation_primitive(am1, lo)
    };
    Ok(atom_term + scale * integral)
}

/// `q + ∫ (−F'(u)) F(x−u) du` over `u ∈ [−λ/2, λ/2]` with `F` the
/// logistic law *not* truncated at `λ/2` and the atom counted as always
/// participating:
/// `q + (1+q)^2 α/(α−1)^2 · log((α+q)/(1+αq)) − (1+q)(1−q)/(α−1)`.
///
/// Agrees with [`h_matching`] only at `x = 0` or `q = 0`; kept for comparison.
pub fn h_untruncated(x: f64, q: f64) -> Result<f64> {
    check_h_args(x, q)?;
    let alpha = ((1.0 + q) * x).exp();
    let scale = (1.0 + q) * (1.0 + q);
    let hi = if q == 0.0 { f64::INFINITY } else { 1.0 / q };
    let am1 = ((1.0 + q) * x).exp_m1();
    if am1.abs() < ALPHA_SWITCH {
        return Ok(q + scale * participation_integral(alpha, q, hi)?);
    }
    // log((α+q)/(1+αq)) = log1p((α−1)(1−q)/(1+αq))
    let log_ratio = (am1 * (1.0 - q) / (1.0 + alpha * q)).ln_1p();
    Ok(q + scale * alpha / (am1 * am1) * log_ratio - (1.0 + q) * (1.0 - q) / am1)
}

/// Edge-length cost per vertex, `(1/2)∫_q^1 −2 log t / (1+t) dt`.
pub fn matching_edge_cost(q: f64) -> Result<f64> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::domain(format!("q = {q} must lie in (0, 1]")));
    }
    if q == 1.0 {
        return Ok(0.0);
    }
    // t = e^{−s}: ∫_0^{−log q} s e^{−s} / (1 + e^{−s}) ds
    let s_end = (-q.ln()).min(80.0);
    let opts = QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-14,
        max_intervals: 2000,
    };
    Ok(integrate(|s| s * (-s).exp() / (1.0 + (-s).exp()), 0.0, s_end, &opts)?.value)
}

/// Total cost per vertex including penalties,
/// `(1/2)∫_0^1 min(λ, −2 log t/(1+t)) dt = matching_edge_cost(q) + λq/2`.
pub fn total_diluted_cost(lambda: f64) -> Result<f64> {
    let q = q_from_lambda(lambda)?;
    Ok(matching_edge_cost(q)? + 0.5 * lambda * q)
}

/// Limit in probability of the longest edge of the minimum partial matching
/// leaving a fraction `q` of vertices out: `−2 log q / (1+q)`.
pub fn longest_edge_limit(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::domain(format!("q = {q} must lie strictly inside (0, 1)")));
    }
    Ok(lambda_from_q(q))
}

/// One row of a penalty sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub q: f64,
    pub edge_cost: f64,
    pub penalty_cost: f64,
    pub total_cost: f64,
    pub longest_edge: f64,
}

pub fn sweep_row(lambda: f64) -> Result<SweepRow> {
    let q = q_from_lambda(lambda)?;
    let edge_cost = matching_edge_cost(q)?;
    let penalty_cost = 0.5 * lambda * q;
    Ok(SweepRow {
        lambda,
        q,
        edge_cost,
        penalty_cost,
        total_cost: edge_cost + penalty_cost,
        longest_edge: longest_edge_limit(q)?,
    })
}
