//! Order-parameter equations of the cavity method, solved through the
//! conservation law `P(G(x)) + P(G(−x)) = c`.
//!
//! The conserved constant `c` is written in the tail form used throughout
//! the crate (`P = c* − W`): `e^{-G(x)} + e^{-G(-x)} = c` for matching and
//! `(2+G(x))e^{-G(x)} + (2+G(-x))e^{-G(-x)} = c` for the TSP. The full
//! problem has `c = c*`; a finite penalty raises it into `(c*, 2c*]`
//! (`1+q` for diluted matching, `C ∈ (2, 4)` for the diluted TSP).
//!
//! Internally most routines work with `excess = c − c*` so that constants
//! very close to `c*` keep their precision.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::quad::{integrate, QuadOptions};
use crate::roots::{bisect, newton_bracketed};

/// Numerical settings for the cavity solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative tolerance of the conjugate-map root solve (absolute error
    /// ends up well below 1e-12).
    pub root_rel: f64,
    pub quad: QuadOptions,
    /// Integrands below this value are treated as exhausted tails.
    pub tail_cutoff: f64,
    /// Largest accepted conservation residual on a solved curve.
    pub conservation: f64,
    /// Target accuracy of the domain-length match in [`tsp_constant_from_lambda`].
    pub lambda_match: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            root_rel: 1e-15,
            quad: QuadOptions::default(),
            tail_cutoff: 1e-12,
            conservation: 1e-8,
            lambda_match: 1e-10,
        }
    }
}

fn check_constant(kernel: Kernel, c: f64) -> Result<f64> {
    let c_star = kernel.c_star();
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::domain(format!("constant c = {c} must be positive and finite")));
    }
    if c > 2.0 * c_star {
        return Err(Error::domain(format!(
            "constant c = {c} exceeds the upper bound 2·c* = {} for {kernel}",
            2.0 * c_star
        )));
    }
    Ok(c - c_star)
}

fn check_excess(kernel: Kernel, excess: f64) -> Result<()> {
    let c_star = kernel.c_star();
    if !(0.0..=c_star).contains(&excess) {
        return Err(Error::domain(format!(
            "constant c = {} must lie in [c*, 2·c*] = [{c_star}, {}] for {kernel}",
            c_star + excess,
            2.0 * c_star
        )));
    }
    Ok(())
}

/// Solves `P(t) + P(y) = c* + excess` for `y ≥ 0`.
///
/// Returns `+∞` when `P(y)` would have to vanish, which happens at `t = 0`
/// for the full problem.
pub(crate) fn conjugate(kernel: Kernel, t: f64, excess: f64, tol: &Tolerances) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::domain(format!("argument t = {t} must be non-negative")));
    }
    let c_star = kernel.c_star();
    // W(y) and P(y) targets, each formed without cancellation in its own regime.
    let w_target = kernel.tail(t) - excess;
    let p_target = kernel.w(t) + excess;
    if w_target < 0.0 {
        return Err(Error::domain(format!(
            "t = {t} lies beyond the curve end: P(t) = {} < c − c* = {excess}",
            kernel.tail(t)
        )));
    }
    if w_target == 0.0 {
        return Ok(0.0);
    }
    if p_target <= 0.0 {
        if p_target == 0.0 {
            return Ok(f64::INFINITY);
        }
        return Err(Error::domain(format!(
            "no conjugate for t = {t}: W(t) = {} < c* − c = {}",
            kernel.w(t),
            -excess
        )));
    }
    if kernel == Kernel::Matching && excess == 0.0 {
        // −log(1 − e^{−t}), each form exact on its own side of log 2.
        return Ok(if t < LN_2 {
            -(-(-t).exp_m1()).ln()
        } else {
            -(-(-t).exp()).ln_1p()
        });
    }
    if w_target <= 0.5 * c_star {
        let mut hi = 1.0;
        while kernel.w(hi) < w_target {
            hi *= 2.0;
        }
        newton_bracketed(
            |y| (kernel.w(y) - w_target, kernel.t(y)),
            0.0,
            hi,
            w_target,
            tol.root_rel,
        )
    } else {
        let mut hi = 1.0;
        while kernel.tail(hi) > p_target {
            hi *= 2.0;
        }
        newton_bracketed(
            |y| (p_target - kernel.tail(y), kernel.t(y)),
            0.0,
            hi,
            0.75 * hi,
            tol.root_rel,
        )
    }
}

/// The conjugate map `Λ`: the `y ≥ 0` with `W(t) + W(y) = 2c* − c`, i.e.
/// `P(t) + P(y) = c`.
///
/// For the full problem (`c = c*`) this is the involution pairing
/// `G(x)` with `G(−x)`; for matching it is `−log(1 − e^{−t})`. At `t = 0`
/// with `c = c*` the result is `f64::INFINITY`.
pub fn lambda_map(kernel: Kernel, t: f64, c: f64) -> Result<f64> {
    let excess = check_constant(kernel, c)?;
    conjugate(kernel, t, excess, &Tolerances::default())
}

/// Symmetric value `G(0)`, the root of `2·P(g0) = c`.
pub fn fixed_point_g0(kernel: Kernel, c: f64) -> Result<f64> {
    let c_star = kernel.c_star();
    if !(c > 0.0 && c < 2.0 * c_star) {
        return Err(Error::domain(format!(
            "constant c = {c} must lie in (0, {}) for {kernel}",
            2.0 * c_star
        )));
    }
    tail_inverse(kernel, 0.5 * c)
}

/// The `g ≥ 0` with `P(g) = p` for `0 < p ≤ c*`.
fn tail_inverse(kernel: Kernel, p: f64) -> Result<f64> {
    let c_star = kernel.c_star();
    if !(p > 0.0 && p <= c_star) {
        return Err(Error::domain(format!("tail value {p} outside (0, {c_star}]")));
    }
    if p == c_star {
        return Ok(0.0);
    }
    match kernel {
        Kernel::Matching => Ok(-p.ln()),
        Kernel::Tsp => {
            let mut hi = 1.0;
            while kernel.tail(hi) > p {
                hi *= 2.0;
            }
            newton_bracketed(|g| (p - kernel.tail(g), kernel.t(g)), 0.0, hi, 0.75 * hi, 1e-15)
        }
    }
}

/// Largest value of `G` on a curve with the given excess (`+∞` for the full problem).
pub(crate) fn curve_end(kernel: Kernel, excess: f64) -> Result<f64> {
    if excess == 0.0 {
        Ok(f64::INFINITY)
    } else {
        tail_inverse(kernel, excess)
    }
}

fn inverse_slope(kernel: Kernel, excess: f64, tol: &Tolerances) -> impl Fn(f64) -> f64 + '_ {
    move |t| match conjugate(kernel, t, excess, tol) {
        Ok(y) => 1.0 / kernel.t(y),
        Err(_) => f64::NAN,
    }
}

/// `x(g) = ∫_{a}^{b} dt / T(Λ(t))`, the distance in `x` between the points
/// where the curve takes the values `a` and `b`.
fn x_between(kernel: Kernel, excess: f64, a: f64, b: f64, tol: &Tolerances) -> Result<f64> {
    Ok(integrate(inverse_slope(kernel, excess, tol), a, b, &tol.quad)?.value)
}

fn domain_length_excess(kernel: Kernel, excess: f64, tol: &Tolerances) -> Result<f64> {
    check_excess(kernel, excess)?;
    if excess == 0.0 {
        return Ok(f64::INFINITY);
    }
    let end = curve_end(kernel, excess)?;
    x_between(kernel, excess, 0.0, end, tol)
}

/// Width of the `x`-interval carried by a finite-penalty curve,
/// `∫_0^{g_max} dt / T(Λ(t))`; infinite for `c = c*`.
///
/// For diluted matching with `c = 1 + q` this is the penalty
/// `λ = −2 log q / (1 + q)`.
pub fn domain_length(kernel: Kernel, c: f64) -> Result<f64> {
    let excess = check_constant(kernel, c)?;
    domain_length_excess(kernel, excess, &Tolerances::default())
}

/// One tabulated point of an order-parameter curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    /// `G(x)`
    pub g: f64,
    /// `G(−x)`
    pub mirror: f64,
}

/// Tabulated solution `G` of the order-parameter equation.
///
/// Points are uniform in `G` on the half `x ≥ 0` and mirrored through
/// `G(−x) = Λ(G(x))`, so `points` is symmetric about `x = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderParameterCurve {
    pub kernel: Kernel,
    pub c: f64,
    pub excess: f64,
    pub g0: f64,
    /// Largest tabulated value of `G`.
    pub g_max: f64,
    /// `λ/2` for finite-penalty curves, `+∞` otherwise.
    pub x_half_width: f64,
    pub points: Vec<CurvePoint>,
    /// Worst conservation residual `|P(G(x)) + P(G(−x)) − c|` over the table.
    pub max_residual: f64,
}

impl OrderParameterCurve {
    /// `(x, G(x))` pairs in increasing `x`.
    pub fn grid(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().map(|p| (p.x, p.g))
    }

    /// Points with `x ≥ 0`, starting at `x = 0`.
    pub fn positive_half(&self) -> &[CurvePoint] {
        &self.points[self.points.len() / 2..]
    }

    /// Conservation residual `P(G(x)) + P(G(−x)) − c` at a tabulated point.
    pub fn residual(&self, point: &CurvePoint) -> f64 {
        residual(self.kernel, self.excess, point.g, point.mirror)
    }

    /// Cubic Hermite interpolation of `G` using `G'(x) = T(G(−x))` at the nodes.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        let first = self.points.first()?;
        let last = self.points.last()?;
        if !(x >= first.x && x <= last.x) {
            return None;
        }
        let idx = self.points.partition_point(|p| p.x <= x);
        if idx == self.points.len() {
            return Some(last.g);
        }
        let (p0, p1) = (&self.points[idx - 1], &self.points[idx]);
        let h = p1.x - p0.x;
        let s = (x - p0.x) / h;
        let d0 = self.kernel.t(p0.mirror) * h;
        let d1 = self.kernel.t(p1.mirror) * h;
        let s2 = s * s;
        let s3 = s2 * s;
        Some(
            (2.0 * s3 - 3.0 * s2 + 1.0) * p0.g
                + (s3 - 2.0 * s2 + s) * d0
                + (-2.0 * s3 + 3.0 * s2) * p1.g
                + (s3 - s2) * d1,
        )
    }
}

fn residual(kernel: Kernel, excess: f64, g: f64, mirror: f64) -> f64 {
    // P(g) + P(m) − c* − excess, arranged as (P(g) − excess) − W(m).
    (kernel.tail(g) - excess) - kernel.w(mirror)
}

/// Tabulates `G` on `[−x_limit, x_limit]` (clipped to the curve's own
/// half-width for finite penalties) with `n_points` nodes on each half.
pub fn solve_order_parameter(kernel: Kernel, c: f64, x_limit: f64, n_points: usize) -> Result<OrderParameterCurve> {
    solve_order_parameter_with(kernel, c, x_limit, n_points, &Tolerances::default())
}

pub fn solve_order_parameter_with(
    kernel: Kernel,
    c: f64,
    x_limit: f64,
    n_points: usize,
    tol: &Tolerances,
) -> Result<OrderParameterCurve> {
    if n_points < 2 {
        return Err(Error::domain(format!("n_points = {n_points} must be at least 2")));
    }
    if !(x_limit > 0.0 && x_limit.is_finite()) {
        return Err(Error::domain(format!(
            "x_limit = {x_limit} must be positive and finite"
        )));
    }
    let excess = check_constant(kernel, c)?;
    check_excess(kernel, excess)?;
    if excess == kernel.c_star() {
        return Err(Error::domain(format!("c = {c} gives an empty curve")));
    }
    let g0 = tail_inverse(kernel, 0.5 * (kernel.c_star() + excess))?;
    let end = curve_end(kernel, excess)?;
    let half_width = if excess == 0.0 {
        f64::INFINITY
    } else {
        x_between(kernel, excess, g0, end, tol)?
    };

    let g_top = if x_limit >= half_width {
        end
    } else {
        // 1/T(Λ) ≥ 1, so x(g) ≥ g − g0 and the top value is at most g0 + x_limit.
        let hi = end.min(g0 + x_limit);
        let mut failure = None;
        let top = bisect(
            |g| match x_between(kernel, excess, g0, g, tol) {
                Ok(x) => x - x_limit,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            },
            g0,
            hi,
            1e-13,
            1e-15,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        top?
    };

    let step = (g_top - g0) / (n_points - 1) as f64;
    let mut half = Vec::with_capacity(n_points);
    let mut x = 0.0;
    let mut worst_err: f64 = 0.0;
    let mut prev_g = g0;
    for i in 0..n_points {
        let g = if i + 1 == n_points { g_top } else { g0 + step * i as f64 };
        if i > 0 {
            let r = integrate(inverse_slope(kernel, excess, tol), prev_g, g, &tol.quad)?;
            worst_err = worst_err.max(r.abs_error);
            x += r.value;
        }
        let mirror = if i == 0 {
            g0
        } else if g == end {
            0.0
        } else {
            conjugate(kernel, g, excess, tol)?
        };
        half.push(CurvePoint { x, g, mirror });
        prev_g = g;
    }
    // Pin the end exactly on the known half-width or requested limit; the
    // accumulated value differs only by the quadrature error.
    if let Some(last) = half.last_mut() {
        last.x = x_limit.min(half_width);
    }

    let mut points = Vec::with_capacity(2 * n_points - 1);
    points.extend(half.iter().skip(1).rev().map(|p| CurvePoint {
        x: -p.x,
        g: p.mirror,
        mirror: p.g,
    }));
    points.extend(half.iter().copied());

    let max_residual = points
        .iter()
        .map(|p| residual(kernel, excess, p.g, p.mirror).abs())
        .fold(0.0, f64::max);
    if max_residual > tol.conservation {
        return Err(Error::numeric(
            "conservation law violated on solved curve",
            max_residual,
        ));
    }
    for w in points.windows(2) {
        if !(w[1].x > w[0].x && w[1].g > w[0].g) {
            return Err(Error::numeric(
                format!("curve not strictly increasing near x = {}", w[0].x),
                worst_err,
            ));
        }
    }
    Ok(OrderParameterCurve {
        kernel,
        c,
        excess,
        g0,
        g_max: g_top,
        x_half_width: half_width,
        points,
        max_residual,
    })
}

/// `∫_0^{x_max} Λ(x) dx`, the area under the curve `P(x) + P(y) = c` in the
/// positive quadrant.
///
/// With `c = 1 + q` for matching this is `∫_0^{−log q} −log(1+q−e^{−x}) dx`;
/// at `c = c*` it is twice the ground-state energy.
pub fn curve_area(kernel: Kernel, c: f64) -> Result<f64> {
    curve_area_with(kernel, c, &Tolerances::default())
}

pub fn curve_area_with(kernel: Kernel, c: f64, tol: &Tolerances) -> Result<f64> {
    let excess = check_constant(kernel, c)?;
    curve_area_excess(kernel, excess, tol)
}

pub(crate) fn curve_area_excess(kernel: Kernel, excess: f64, tol: &Tolerances) -> Result<f64> {
    check_excess(kernel, excess)?;
    if excess == kernel.c_star() {
        return Ok(0.0);
    }
    let x_max = curve_end(kernel, excess)?;
    let lam = |t: f64| conjugate(kernel, t, excess, tol).unwrap_or(f64::NAN);

    // Near t = 0 the integrand grows like log(1/t); substitute t = e^{−s}.
    let split = x_max.min(1.0);
    let s0 = -split.ln();
    let near = |s: f64| {
        let t = (-s).exp();
        lam(t) * t
    };
    let mut s_end = s0 + 4.0;
    while near(s_end) > tol.tail_cutoff * 1e-2 {
        s_end += 4.0;
    }
    let mut area = integrate(near, s0, s_end, &tol.quad)?.value;

    if split < x_max {
        let mut t_end = x_max;
        if x_max.is_infinite() {
            t_end = split + 4.0;
            while lam(t_end) > tol.tail_cutoff * 1e-2 {
                t_end += 4.0;
            }
        }
        area += integrate(lam, split, t_end, &tol.quad)?.value;
    }
    Ok(area)
}

/// Limit optimum per vertex, `(1/2) ∫_0^∞ Λ(t) dt` with `c = c*`:
/// `π²/12` for matching, about `2.0415` for the TSP.
pub fn ground_state_energy(kernel: Kernel) -> Result<f64> {
    Ok(0.5 * curve_area_excess(kernel, 0.0, &Tolerances::default())?)
}

/// Evaluates `(1/2)∫ G(x) T(G(x)) dx` on a solved full-problem curve.
///
/// The integral is taken in the curve's own parametrisation: on the
/// tabulated half `x ≥ 0` the nodes are uniform in `g`, `dx/dg = 1/T(G(−x))`,
/// and the mirrored half contributes `G(−x)` per unit of `g`. Composite
/// Simpson over the table; no tail beyond the table is added.
pub fn energy_on_curve(curve: &OrderParameterCurve) -> Result<f64> {
    if curve.excess != 0.0 {
        return Err(Error::domain(format!(
            "energy integral needs a full-problem curve (c = c*), got c = {}",
            curve.c
        )));
    }
    let kernel = curve.kernel;
    let half = curve.positive_half();
    if half.len() < 2 {
        return Err(Error::contract("curve has fewer than two points on x ≥ 0"));
    }
    let values: Vec<f64> = half
        .iter()
        .map(|p| p.g * kernel.t(p.g) / kernel.t(p.mirror) + p.mirror)
        .collect();
    let step = (half[half.len() - 1].g - half[0].g) / (half.len() - 1) as f64;
    Ok(0.5 * composite_simpson(&values, step))
}

fn composite_simpson(v: &[f64], h: f64) -> f64 {
    let m = v.len() - 1;
    match m {
        0 => 0.0,
        1 => 0.5 * h * (v[0] + v[1]),
        2 => h / 3.0 * (v[0] + 4.0 * v[1] + v[2]),
        _ => {
            let even_end = if m.is_multiple_of(2) { m } else { m - 3 };
            let mut s = 0.0;
            for i in (0..even_end).step_by(2) {
                s += h / 3.0 * (v[i] + 4.0 * v[i + 1] + v[i + 2]);
            }
            if even_end < m {
                let i = even_end;
                s += 3.0 * h / 8.0 * (v[i] + 3.0 * v[i + 1] + 3.0 * v[i + 2] + v[i + 3]);
            }
            s
        }
    }
}

/// `|energy_on_curve(curve) − ground_state_energy(kernel)|`.
///
/// Curves cut off too early (e.g. `x_limit = 1`) simply report a large residual.
pub fn verify_consistency(kernel: Kernel, curve: &OrderParameterCurve) -> Result<f64> {
    if curve.kernel != kernel {
        return Err(Error::domain(format!(
            "curve was solved for {} but checked against {kernel}",
            curve.kernel
        )));
    }
    Ok((energy_on_curve(curve)? - ground_state_energy(kernel)?).abs())
}

/// The conserved constant `C` of the diluted TSP at penalty `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TspConstant {
    pub lambda: f64,
    /// `C = 2 + excess`, in `(2, 4)`.
    pub c: f64,
    /// `C − 2`, kept separately because `C` itself rounds it away for large `λ`.
    pub excess: f64,
    pub g0: f64,
    /// `G(λ/2)`, the root of `(2+g)e^{−g} = C − 2`.
    pub g_max: f64,
    /// Domain length reproduced at the returned constant.
    pub domain_length: f64,
    /// Set when `C − 2` is no longer resolved by `C` in double precision or
    /// the search hit its floor.
    pub precision_warning: bool,
}

const MIN_LOG_EXCESS: f64 = -690.0;

/// Finds `C ∈ (2, 4)` whose curve `(2+G(x))e^{−G(x)} + (2+G(−x))e^{−G(−x)} = C`
/// spans exactly `x ∈ [−λ/2, λ/2]` with `G(−λ/2) = 0`.
///
/// The domain length decreases in `C`; the search runs over `log(C − 2)`
/// with a bracketed Illinois iteration.
pub fn tsp_constant_from_lambda(lambda: f64) -> Result<TspConstant> {
    tsp_constant_from_lambda_with(lambda, &Tolerances::default())
}

pub fn tsp_constant_from_lambda_with(lambda: f64, tol: &Tolerances) -> Result<TspConstant> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain(format!("lambda = {lambda} must be positive and finite")));
    }
    let kernel = Kernel::Tsp;
    let length = |s: f64| domain_length_excess(kernel, s.exp(), tol);
    // h(s) = D(e^s) − λ is decreasing in s.
    let (mut lo, mut hi) = (MIN_LOG_EXCESS, 2f64.ln());
    let mut h_lo = length(lo)? - lambda;
    let mut h_hi = -lambda;
    let finish = |s: f64, d: f64, floor_hit: bool| -> Result<TspConstant> {
        let excess = s.exp();
        let c = 2.0 + excess;
        Ok(TspConstant {
            lambda,
            c,
            excess,
            g0: tail_inverse(kernel, 1.0 + 0.5 * excess)?,
            g_max: tail_inverse(kernel, excess)?,
            domain_length: d,
            precision_warning: floor_hit || ((c - 2.0) - excess).abs() > 1e-6 * excess,
        })
    };
    if h_lo <= 0.0 {
        return finish(lo, h_lo + lambda, true);
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let s = (lo * h_hi - hi * h_lo) / (h_hi - h_lo);
        let s = if s > lo && s < hi { s } else { 0.5 * (lo + hi) };
        let h = length(s)? - lambda;
        if h.abs() <= tol.lambda_match || hi - lo <= 1e-15 * s.abs().max(1.0) {
            return finish(s, h + lambda, false);
        }
        if h > 0.0 {
            lo = s;
            h_lo = h;
            if side == 1 {
                h_hi *= 0.5;
            }
            side = 1;
        } else {
            hi = s;
            h_hi = h;
            if side == -1 {
                h_lo *= 0.5;
            }
            side = -1;
        }
    }
    Err(Error::numeric(
        format!("no constant found for lambda = {lambda}"),
        h_lo.abs().min(h_hi.abs()),
    ))
}

/// Conserved record exported by the `constants` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsRecord {
    pub kernel: Kernel,
    pub c: f64,
    pub g0: f64,
    pub ground_state: f64,
    pub consistency_residual: f64,
}

/// Ground state, `G(0)` and the consistency residual on a curve solved to
/// `x_limit` with `n_points` per half.
pub fn constants_record(kernel: Kernel, x_limit: f64, n_points: usize) -> Result<ConstantsRecord> {
    let c = kernel.c_star();
    let curve = solve_order_parameter(kernel, c, x_limit, n_points)?;
    Ok(ConstantsRecord {
        kernel,
        c,
        g0: curve.g0,
        ground_state: ground_state_energy(kernel)?,
        consistency_residual: verify_consistency(kernel, &curve)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    #[test]
    fn matching_closed_form_conjugate() {
        assert!((lambda_map(Kernel::Matching, LN_2, 1.0).unwrap() - LN_2).abs() < 1e-15);
        let t = 0.37;
        let y = lambda_map(Kernel::Matching, t, 1.0).unwrap();
        assert!((y + (1.0 - (-t).exp()).ln()).abs() < 1e-14);
    }

    #[test]
    fn singular_point_is_infinite() {
        assert_eq!(lambda_map(Kernel::Tsp, 0.0, 2.0).unwrap(), f64::INFINITY);
        assert_eq!(lambda_map(Kernel::Matching, 0.0, 1.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn out_of_range_constant_names_bound() {
        match lambda_map(Kernel::Tsp, 1.0, 4.5) {
            Err(Error::Domain(m)) => assert!(m.contains("2·c*"), "{m}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(lambda_map(Kernel::Tsp, -1.0, 2.0), Err(Error::Domain(_))));
        // P(5) < c − c* so 5 lies past the curve end at c = 3.
        assert!(matches!(lambda_map(Kernel::Tsp, 5.0, 3.0), Err(Error::Domain(_))));
    }

    #[test]
    fn tsp_symmetry_fixed_point() {
        let g0 = fixed_point_g0(Kernel::Tsp, 2.0).unwrap();
        assert!(((2.0 + g0) * (-g0).exp() - 1.0).abs() < 1e-14);
        assert!((g0 - 1.146).abs() < 1e-3);
        assert!((lambda_map(Kernel::Tsp, g0, 2.0).unwrap() - g0).abs() < 1e-12);
    }

    #[test]
    fn g0_for_other_constants() {
        assert!((fixed_point_g0(Kernel::Matching, 1.0).unwrap() - LN_2).abs() < 1e-15);
        let g = fixed_point_g0(Kernel::Tsp, 3.0).unwrap();
        assert!(((2.0 + g) * (-g).exp() - 1.5).abs() < 1e-13);
        assert!(matches!(fixed_point_g0(Kernel::Tsp, 4.0), Err(Error::Domain(_))));
        assert!(matches!(fixed_point_g0(Kernel::Matching, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn tiny_conjugates_keep_relative_precision() {
        // Λ(40) ≈ e^{-40} for matching; a W-form solve must not lose it.
        let y = conjugate(Kernel::Tsp, 40.0, 0.0, &Tolerances::default()).unwrap();
        let expected = Kernel::Tsp.tail(40.0); // W(y) ≈ y for tiny y
        assert!((y / expected - 1.0).abs() < 1e-12, "{y} vs {expected}");
    }

    #[test]
    fn matching_area_q_formula() {
        let q: f64 = 0.3;
        let area = curve_area(Kernel::Matching, 1.0 + q).unwrap();
        let direct = integrate(|x| -(1.0 + q - (-x).exp()).ln(), 0.0, -q.ln(), &QuadOptions::default())
            .unwrap()
            .value;
        assert!((area - direct).abs() < 1e-10, "{area} vs {direct}");
    }

    #[test]
    fn empty_curve_has_zero_area() {
        assert_eq!(curve_area(Kernel::Matching, 2.0).unwrap(), 0.0);
        assert_eq!(curve_area(Kernel::Tsp, 4.0).unwrap(), 0.0);
    }

    #[test]
    fn matching_ground_state() {
        let e = ground_state_energy(Kernel::Matching).unwrap();
        assert!((e - PI * PI / 12.0).abs() < 1e-9, "{e}");
    }

    #[test]
    fn matching_domain_length_is_penalty() {
        let q: f64 = 0.25;
        let d = domain_length(Kernel::Matching, 1.0 + q).unwrap();
        assert!((d + 2.0 * q.ln() / (1.0 + q)).abs() < 1e-10);
        assert_eq!(domain_length(Kernel::Tsp, 2.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn simpson_handles_odd_interval_counts() {
        for n in 2..9 {
            let h = 1.0 / n as f64;
            let v: Vec<f64> = (0..=n).map(|i| (i as f64 * h).powi(3)).collect();
            assert!((composite_simpson(&v, h) - 0.25).abs() < 1e-14 || n == 1);
        }
    }

    #[test]
    fn inconsistent_curve_kernel_rejected() {
        let curve = solve_order_parameter(Kernel::Matching, 1.0, 2.0, 50).unwrap();
        assert!(matches!(verify_consistency(Kernel::Tsp, &curve), Err(Error::Domain(_))));
    }

    #[test]
    fn finite_curve_spans_half_width() {
        let k = tsp_constant_from_lambda(3.0).unwrap();
        let curve = solve_order_parameter(Kernel::Tsp, k.c, 10.0, 200).unwrap();
        assert!((curve.x_half_width - 1.5).abs() < 1e-8);
        let first = curve.points.first().unwrap();
        assert!(first.g.abs() < 1e-12 && (first.x + 1.5).abs() < 1e-8);
        assert!((curve.g_max - k.g_max).abs() < 1e-10);
    }
}
