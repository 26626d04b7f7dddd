//! Population dynamics for the valuation recursions on the Poisson weighted
//! infinite tree.
//!
//! A child with edge length `l > λ` can never be the minimiser: its value
//! satisfies `l − f > λ/2` because `f ≤ λ/2`, and the quit option `λ/2`
//! already beats it. Sampling only the `Poisson(λ)` children with
//! `l ≤ λ` is therefore exact.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recursion::{GridDistribution, Mode, Side};
use crate::rng::stream_rng;

/// Samples per RNG stream. Fixed so the output is independent of the
/// number of worker threads.
const CHUNK: usize = 4096;

/// Minimum population size accepted by [`run_alternating`].
pub const MIN_ALTERNATING_POP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub lambda: f64,
    pub mode: Mode,
    pub generation: usize,
    pub seed: u64,
    /// Stream index; chains sharing a seed but not a stream are independent.
    pub stream: u64,
    pub samples: Vec<f64>,
}

impl Population {
    /// All samples at `−λ/2` (side A) or `+λ/2` (side B).
    pub fn boundary(lambda: f64, mode: Mode, size: usize, side: Side, seed: u64, stream: u64) -> Result<Self> {
        check_lambda(lambda)?;
        if size == 0 {
            return Err(Error::domain("population size must be positive"));
        }
        let v = match side {
            Side::A => -0.5 * lambda,
            Side::B => 0.5 * lambda,
        };
        Ok(Self {
            lambda,
            mode,
            generation: 0,
            seed,
            stream,
            samples: vec![v; size],
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.len() as f64
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        let n = self.len() as f64;
        self.samples.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0).max(1.0)
    }

    pub fn std_error(&self) -> f64 {
        (self.variance() / self.len() as f64).sqrt()
    }

    /// Fraction of samples equal to the quit value `λ/2`.
    pub fn atom_fraction(&self) -> f64 {
        let top = 0.5 * self.lambda;
        self.samples.iter().filter(|&&x| x >= top).count() as f64 / self.len() as f64
    }

    /// Fraction of samples `≥ x`.
    pub fn empirical_survival(&self, x: f64) -> f64 {
        self.samples.iter().filter(|&&s| s >= x).count() as f64 / self.len() as f64
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain(format!("lambda = {lambda} must be positive and finite")));
    }
    Ok(())
}

/// Value at a root whose children carry `(l_i, f_i)`: the smallest (or
/// second smallest) `l_i − f_i`, capped at the quit value.
fn root_value<R: Rng>(rng: &mut R, poisson: &Poisson<f64>, lambda: f64, mode: Mode, source: &[f64]) -> f64 {
    let half = 0.5 * lambda;
    let children = poisson.sample(rng) as usize;
    let (mut best, mut second) = (half, half);
    for _ in 0..children {
        let l = rng.random::<f64>() * lambda;
        let f = source[rng.random_range(0..source.len())];
        let v = l - f;
        if v < best {
            second = best;
            best = v;
        } else if v < second {
            second = v;
        }
    }
    match mode {
        Mode::Min => best,
        Mode::Min2 => second,
    }
}

/// One synchronous generation: every sample of the result is a fresh root
/// value with children drawn from `source`. The new population keeps the
/// source's size, seed and stream and advances the generation counter.
pub fn popdyn_step(source: &Population) -> Result<Population> {
    popdyn_step_from(source, source)
}

/// Like [`popdyn_step`] but with children drawn from `children` while the
/// lineage (size, seed, stream, generation) follows `target`.
fn popdyn_step_from(target: &Population, children: &Population) -> Result<Population> {
    if children.is_empty() {
        return Err(Error::contract("cannot update from an empty population"));
    }
    let lambda = target.lambda;
    let mode = target.mode;
    let generation = target.generation + 1;
    let poisson = Poisson::new(lambda).map_err(|e| Error::domain(format!("Poisson({lambda}): {e}")))?;
    let mut samples = vec![0.0; target.len()];
    samples.par_chunks_mut(CHUNK).enumerate().for_each(|(c, out)| {
        let mut rng = stream_rng(target.seed, &[target.stream, generation as u64, c as u64]);
        for s in out.iter_mut() {
            *s = root_value(&mut rng, &poisson, lambda, mode, &children.samples);
        }
    });
    Ok(Population {
        samples,
        generation,
        ..target.clone()
    })
}

/// Runs a single chain for `generations` steps from a boundary start.
pub fn run_population(
    lambda: f64,
    mode: Mode,
    generations: usize,
    pop_size: usize,
    seed: u64,
    start: Side,
) -> Result<Population> {
    let mut pop = Population::boundary(lambda, mode, pop_size, start, seed, 0)?;
    for _ in 0..generations {
        pop = popdyn_step(&pop)?;
    }
    Ok(pop)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternatingRun {
    pub a: Population,
    pub b: Population,
    /// `mean(b) − mean(a)`
    pub gap: f64,
    /// Standard error of `gap`, treating the two populations as independent.
    pub gap_std_error: f64,
}

/// Two populations started at the `A₀` and `B₀` boundaries, each updated from
/// the other: `A_{k+1}` from `B_k` and `B_{k+1}` from `A_k`.
pub fn run_alternating(lambda: f64, mode: Mode, k: usize, pop_size: usize, seed: u64) -> Result<AlternatingRun> {
    if pop_size < MIN_ALTERNATING_POP {
        return Err(Error::domain(format!(
            "pop_size = {pop_size} below the minimum of {MIN_ALTERNATING_POP}"
        )));
    }
    let mut a = Population::boundary(lambda, mode, pop_size, Side::A, seed, 0)?;
    let mut b = Population::boundary(lambda, mode, pop_size, Side::B, seed, 1)?;
    for _ in 0..k {
        let next_a = popdyn_step_from(&a, &b)?;
        let next_b = popdyn_step_from(&b, &a)?;
        a = next_a;
        b = next_b;
    }
    let gap = b.mean() - a.mean();
    let gap_std_error = (a.std_error().powi(2) + b.std_error().powi(2)).sqrt();
    Ok(AlternatingRun {
        a,
        b,
        gap,
        gap_std_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    /// Sup distance between the survival functions on `(−λ/2, λ/2)`.
    pub ks: f64,
    pub atom_empirical: f64,
    pub atom_reference: f64,
}

/// Kolmogorov–Smirnov distance on the open interval; the atom at `λ/2` is
/// reported separately by [`ks_report`].
pub fn ks_distance(pop: &Population, reference: &GridDistribution) -> Result<f64> {
    Ok(ks_report(pop, reference)?.ks)
}

pub fn ks_report(pop: &Population, reference: &GridDistribution) -> Result<KsReport> {
    if (pop.lambda - reference.lambda).abs() > 1e-12 * pop.lambda.max(1.0) {
        return Err(Error::domain(format!(
            "population lambda {} differs from reference lambda {}",
            pop.lambda, reference.lambda
        )));
    }
    if pop.is_empty() {
        return Err(Error::contract("empty population"));
    }
    let half = 0.5 * pop.lambda;
    let n = pop.len() as f64;
    let mut sorted = pop.samples.clone();
    sorted.sort_by(f64::total_cmp);
    let reference_at = |x: f64| reference.survival_at(x).unwrap_or(0.0);
    let ref_low = reference.right_limit(0);
    let ref_top = reference.values[reference.n_cells];

    // Between consecutive distinct samples S_emp is constant and the
    // reference is monotone, so the sup is attained at sample points or at
    // the open ends of the interval.
    let mut ks: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let x = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == x {
            j += 1;
        }
        let at = (sorted.len() - i) as f64 / n;
        let above = (sorted.len() - j) as f64 / n;
        if x > -half && x < half {
            let r = reference_at(x);
            ks = ks.max((at - r).abs()).max((above - r).abs());
        }
        i = j;
    }
    let first_above_low = sorted.partition_point(|&s| s <= -half);
    ks = ks.max(((sorted.len() - first_above_low) as f64 / n - ref_low).abs());
    let top_count = sorted.len() - sorted.partition_point(|&s| s < half);
    ks = ks.max((top_count as f64 / n - ref_top).abs());

    Ok(KsReport {
        ks,
        atom_empirical: pop.atom_fraction(),
        atom_reference: reference.atom,
    })
}

/// Empirical and reference survival sampled at `n_points` equispaced
/// abscissae over `[−λ/2, λ/2]`.
pub fn survival_table(pop: &Population, reference: &GridDistribution, n_points: usize) -> Result<Vec<(f64, f64, f64)>> {
    if (pop.lambda - reference.lambda).abs() > 1e-12 * pop.lambda.max(1.0) {
        return Err(Error::domain("population and reference lambda differ"));
    }
    if n_points < 2 {
        return Err(Error::domain("need at least two table points"));
    }
    let half = 0.5 * pop.lambda;
    let mut sorted = pop.samples.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok((0..n_points)
        .map(|i| {
            let x = -half + pop.lambda * i as f64 / (n_points - 1) as f64;
            let below = sorted.partition_point(|&s| s < x);
            let emp = (sorted.len() - below) as f64 / n;
            (x, emp, reference.survival_at(x).unwrap_or(0.0))
        })
        .collect())
}
