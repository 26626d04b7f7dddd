//! Deterministic grid iteration of the distributional recursions
//! `A_{k+1}(x) = Φ(∫_{−x}^{λ/2} B_k)`, `B_{k+1}(x) = Φ(∫_{−x}^{λ/2} A_k)`
//! with `Φ(s) = e^{−s}` (minimum rule, matching) or `Φ(s) = (1+s)e^{−s}`
//! (second-minimum rule, TSP).
//!
//! State is the survival function `P(f ≥ x)` sampled on a uniform grid over
//! `[−λ/2, λ/2]`. Integrals use the trapezoid rule with exact prefix sums,
//! which keeps the monotone sandwich `A_k ≤ A_{k+1} ≤ B_{k+1} ≤ B_k` exact on
//! the grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::Kernel;

const GRID_TOL: f64 = 1e-12;

/// Valuation rule at a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `min(λ/2, min_i(l_i − f_i))`: matching.
    Min,
    /// `min(λ/2, second-smallest_i(l_i − f_i))`: TSP / 2-factor.
    Min2,
}

impl Mode {
    /// The kernel whose `T` is this mode's survival map `Φ`.
    pub fn kernel(self) -> Kernel {
        match self {
            Mode::Min => Kernel::Matching,
            Mode::Min2 => Kernel::Tsp,
        }
    }

    pub fn phi(self, s: f64) -> f64 {
        self.kernel().survival_map(s)
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Min => "min",
            Mode::Min2 => "min2",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "min" => Ok(Mode::Min),
            "min2" => Ok(Mode::Min2),
            other => Err(format!("unknown mode '{other}' (expected min or min2)")),
        }
    }
}

/// Which player the boundary values at depth `k` favour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// All valuations start at `−λ/2`.
    A,
    /// All valuations start at `+λ/2`.
    B,
}

/// Survival function `S(x) = P(f ≥ x)` of a valuation on `[−λ/2, λ/2]`.
///
/// `values[i]` is `S` at `x_i = −λ/2 + i·λ/n_cells`; `values[n_cells]` is
/// the atom at `λ/2`. A point mass at `−λ/2` (only present in the `A`
/// boundary start) is stored in `lower_atom` and excluded from integrals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDistribution {
    pub lambda: f64,
    pub n_cells: usize,
    pub values: Vec<f64>,
    pub atom: f64,
    pub lower_atom: f64,
}

impl GridDistribution {
    /// Samples a survival function at the grid nodes. The atom is `f(λ/2)`.
    pub fn from_fn(lambda: f64, n_cells: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        check_grid(lambda, n_cells)?;
        let h = lambda / n_cells as f64;
        let mut values: Vec<f64> = (0..=n_cells).map(|i| f(-0.5 * lambda + h * i as f64)).collect();
        values[0] = 1.0;
        let atom = values[n_cells];
        let dist = Self {
            lambda,
            n_cells,
            values,
            atom,
            lower_atom: 0.0,
        };
        dist.validate()?;
        Ok(dist)
    }

    pub fn step(&self) -> f64 {
        self.lambda / self.n_cells as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i == self.n_cells {
            0.5 * self.lambda
        } else {
            -0.5 * self.lambda + self.step() * i as f64
        }
    }

    /// Right limit of `S` at node `i`.
    pub fn right_limit(&self, i: usize) -> f64 {
        if i == 0 {
            self.values[0] - self.lower_atom
        } else {
            self.values[i]
        }
    }

    /// `tails[j] = ∫_{x_j}^{λ/2} S(t) dt`.
    pub fn tail_integrals(&self) -> Vec<f64> {
        let n = self.n_cells;
        let half_h = 0.5 * self.step();
        let mut tails = vec![0.0; n + 1];
        for j in (0..n).rev() {
            tails[j] = tails[j + 1] + half_h * (self.right_limit(j) + self.values[j + 1]);
        }
        tails
    }

    /// Linear interpolation of `S`; `None` outside `[−λ/2, λ/2]`.
    pub fn survival_at(&self, x: f64) -> Option<f64> {
        let half = 0.5 * self.lambda;
        if !(x >= -half && x <= half) {
            return None;
        }
        if x == -half {
            return Some(self.values[0]);
        }
        let pos = (x + half) / self.step();
        let i = (pos.floor() as usize).min(self.n_cells - 1);
        let frac = pos - i as f64;
        Some((1.0 - frac) * self.right_limit(i) + frac * self.values[i + 1])
    }

    /// Checks the survival-function invariants.
    pub fn validate(&self) -> Result<()> {
        check_grid(self.lambda, self.n_cells)?;
        if self.values.len() != self.n_cells + 1 {
            return Err(Error::contract(format!(
                "{} values for {} cells",
                self.values.len(),
                self.n_cells
            )));
        }
        if (self.values[0] - 1.0).abs() > GRID_TOL {
            return Err(Error::contract(format!(
                "survival at −λ/2 is {}, expected 1",
                self.values[0]
            )));
        }
        if (self.atom - self.values[self.n_cells]).abs() > GRID_TOL {
            return Err(Error::contract("atom differs from the terminal survival value"));
        }
        if !(0.0..=1.0).contains(&self.lower_atom) {
            return Err(Error::contract(format!(
                "lower atom {} outside [0, 1]",
                self.lower_atom
            )));
        }
        let mut prev = self.right_limit(0);
        for (i, &v) in self.values.iter().enumerate() {
            if !(-GRID_TOL..=1.0 + GRID_TOL).contains(&v) {
                return Err(Error::contract(format!(
                    "survival value {v} outside [0, 1] at node {i}"
                )));
            }
            if i > 0 && v > prev + GRID_TOL {
                return Err(Error::contract(format!(
                    "survival increases at node {i} (x = {})",
                    self.x(i)
                )));
            }
            prev = v;
        }
        Ok(())
    }
}

fn check_grid(lambda: f64, n_cells: usize) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain(format!("lambda = {lambda} must be positive and finite")));
    }
    if n_cells < 16 {
        return Err(Error::domain(format!("n_cells = {n_cells} below the minimum of 16")));
    }
    Ok(())
}

/// Boundary start: `A₀` jumps at `−λ/2` (all mass there), `B₀` is the point
/// mass at `λ/2`. The rule does not affect the start.
pub fn init_boundary(_mode: Mode, lambda: f64, n_cells: usize, side: Side) -> Result<GridDistribution> {
    check_grid(lambda, n_cells)?;
    let (fill, lower_atom) = match side {
        Side::A => (0.0, 1.0),
        Side::B => (1.0, 0.0),
    };
    let mut values = vec![fill; n_cells + 1];
    values[0] = 1.0;
    Ok(GridDistribution {
        lambda,
        n_cells,
        values,
        atom: fill,
        lower_atom,
    })
}

/// One application of the recursion: `out(x_i) = Φ(∫_{−x_i}^{λ/2} input)`.
pub fn iterate_step(mode: Mode, input: &GridDistribution) -> Result<GridDistribution> {
    input.validate()?;
    Ok(step_unchecked(mode, input))
}

fn step_unchecked(mode: Mode, input: &GridDistribution) -> GridDistribution {
    let n = input.n_cells;
    let tails = input.tail_integrals();
    // −x_i is the node n − i.
    let values: Vec<f64> = (0..=n).map(|i| mode.phi(tails[n - i])).collect();
    let atom = values[n];
    GridDistribution {
        lambda: input.lambda,
        n_cells: n,
        values,
        atom,
        lower_atom: 0.0,
    }
}

/// Mean valuation `E[f] = −λ/2 + ∫_{−λ/2}^{λ/2} S(t) dt`.
pub fn expectation(dist: &GridDistribution) -> f64 {
    -0.5 * dist.lambda + dist.tail_integrals()[0]
}

/// One row of an [`IterationTrace`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub k: usize,
    /// `max_x (B_k − A_k)`
    pub sup_gap: f64,
    /// `B_k(λ/2) − A_k(λ/2)`
    pub terminal_gap: f64,
    /// `E[f_B] − E[f_A]`
    pub expectation_gap: f64,
    /// Convergence bound of the mode's headline diagnostic: `λ/(k+1)` on the
    /// terminal gap for `min`, `e^λ/(k+1)` on the expectation gap for `min2`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub mode: Mode,
    pub lambda: f64,
    pub records: Vec<TraceRecord>,
    /// Whether the stopping tolerance was met before `k_max`.
    pub converged: bool,
}

impl IterationTrace {
    /// Bound on the expectation gap at depth `k`: `λe^λ/(k+1)` for the
    /// minimum rule, `e^λ/(k+1)` for the second minimum.
    pub fn expectation_bound(&self, k: usize) -> f64 {
        expectation_bound(self.mode, self.lambda, k)
    }

    /// Bound `λ/k` on the terminal gap at depth `k ≥ 1` (minimum rule only).
    pub fn terminal_bound(&self, k: usize) -> Option<f64> {
        (self.mode == Mode::Min && k >= 1).then(|| self.lambda / k as f64)
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }
}

fn expectation_bound(mode: Mode, lambda: f64, k: usize) -> f64 {
    let base = match mode {
        Mode::Min => lambda * lambda.exp(),
        Mode::Min2 => lambda.exp(),
    };
    base / (k + 1) as f64
}

/// Options for [`run_iteration`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationOptions {
    pub k_max: usize,
    /// Stop once the sup gap (and hence the terminal gap) is below this.
    pub stop_gap: f64,
}

impl Default for IterationOptions {
    fn default() -> Self {
        Self {
            k_max: 10_000,
            stop_gap: 1e-6,
        }
    }
}

/// Final `A_K`, `B_K` and the full trace of an alternating run.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRun {
    pub a: GridDistribution,
    pub b: GridDistribution,
    pub trace: IterationTrace,
}

pub fn run_iteration(mode: Mode, lambda: f64, n_cells: usize, k_max: usize) -> Result<IterationRun> {
    run_iteration_with(
        mode,
        lambda,
        n_cells,
        IterationOptions {
            k_max,
            ..Default::default()
        },
    )
}

/// Alternates the recursion from the two boundary starts, checking the
/// sandwich `A_k ≤ A_{k+1} ≤ B_{k+1} ≤ B_k` at every step.
pub fn run_iteration_with(mode: Mode, lambda: f64, n_cells: usize, opts: IterationOptions) -> Result<IterationRun> {
    if opts.k_max < 1 {
        return Err(Error::domain("k_max must be at least 1"));
    }
    let mut a = init_boundary(mode, lambda, n_cells, Side::A)?;
    let mut b = init_boundary(mode, lambda, n_cells, Side::B)?;
    let mut records = Vec::new();
    let record = |k: usize, a: &GridDistribution, b: &GridDistribution| {
        let sup_gap = a
            .values
            .iter()
            .zip(&b.values)
            .skip(1)
            .map(|(x, y)| y - x)
            .fold(b.values[0] - a.right_limit(0), f64::max);
        TraceRecord {
            k,
            sup_gap,
            terminal_gap: b.atom - a.atom,
            expectation_gap: expectation(b) - expectation(a),
            bound: match mode {
                Mode::Min => lambda / (k + 1) as f64,
                Mode::Min2 => expectation_bound(mode, lambda, k),
            },
        }
    };
    records.push(record(0, &a, &b));
    let mut converged = false;
    for k in 0..opts.k_max {
        let next_a = step_unchecked(mode, &b);
        let next_b = step_unchecked(mode, &a);
        check_sandwich(k + 1, &a, &next_a, &next_b, &b)?;
        a = next_a;
        b = next_b;
        let rec = record(k + 1, &a, &b);
        records.push(rec);
        if rec.sup_gap < opts.stop_gap {
            converged = true;
            break;
        }
    }
    Ok(IterationRun {
        a,
        b,
        trace: IterationTrace {
            mode,
            lambda,
            records,
            converged,
        },
    })
}

fn check_sandwich(
    k: usize,
    a: &GridDistribution,
    next_a: &GridDistribution,
    next_b: &GridDistribution,
    b: &GridDistribution,
) -> Result<()> {
    for i in 0..=a.n_cells {
        let chain = [
            a.right_limit(i),
            next_a.right_limit(i),
            next_b.right_limit(i),
            b.right_limit(i),
        ];
        if chain.windows(2).any(|w| w[0] > w[1] + GRID_TOL) {
            return Err(Error::numeric(
                format!("sandwich violated at k = {k}, x = {} (values {chain:?})", a.x(i)),
                chain.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max),
            ));
        }
    }
    Ok(())
}

/// Sup-norm change under one more application of the recursion.
pub fn fixed_point_residual(mode: Mode, dist: &GridDistribution) -> Result<f64> {
    let next = iterate_step(mode, dist)?;
    Ok(next
        .values
        .iter()
        .zip(&dist.values)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Largest one-step change accepted as "converged" by [`cost_from_f`].
pub const CONVERGED_RESIDUAL: f64 = 1e-5;

/// Per-vertex edge cost `(1/2)∫ F(u) G(u) du` with `G(u) = ∫_{−u}^{λ/2} F`,
/// both by the trapezoid rule on the grid. `dist` must be a fixed point of
/// the recursion for `mode`.
pub fn cost_from_f(dist: &GridDistribution, mode: Mode) -> Result<f64> {
    let residual = fixed_point_residual(mode, dist)?;
    if residual > CONVERGED_RESIDUAL {
        return Err(Error::contract(format!(
            "distribution is not a fixed point of the {mode} recursion (one-step change {residual:.3e})"
        )));
    }
    let n = dist.n_cells;
    let tails = dist.tail_integrals();
    let h = dist.step();
    let integrand = |i: usize| dist.right_limit(i) * tails[n - i];
    let inner: f64 = (1..n).map(integrand).sum();
    Ok(0.5 * h * (inner + 0.5 * (integrand(0) + integrand(n))))
}

/// Profile of `P(G(x)) + P(G(−x))` across the grid, `G(x) = ∫_{−x}^{λ/2} F`
/// and `P` the tail of the mode's kernel. Returns `(mean, max deviation)`.
pub fn conserved_profile(dist: &GridDistribution, mode: Mode) -> (f64, f64) {
    let kernel = mode.kernel();
    let n = dist.n_cells;
    let tails = dist.tail_integrals();
    let sums: Vec<f64> = (0..=n)
        .map(|i| kernel.tail(tails[n - i]) + kernel.tail(tails[i]))
        .collect();
    let mean = sums.iter().sum::<f64>() / sums.len() as f64;
    let dev = sums.iter().map(|s| (s - mean).abs()).fold(0.0, f64::max);
    (mean, dev)
}
