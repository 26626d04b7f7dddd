//! Exact solvers on small random complete graphs with edge lengths uniform
//! on `[0, n]`.
//!
//! Reported costs are always recomputed from the sorted edge list, so two
//! solvers that find the same edge set report bit-identical costs.

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diluted::{h_matching, q_from_lambda};
use crate::error::{Error, Result};
use crate::rng::stream_rng;

pub const MAX_MATCHING_N: usize = 22;
pub const MAX_TSP_N: usize = 17;
pub const MAX_TWO_FACTOR_N: usize = 7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedCompleteGraph {
    pub n: usize,
    /// Row-major `n × n`, symmetric; the diagonal is zero and unused.
    pub weights: Vec<f64>,
    pub seed: Option<u64>,
}

impl WeightedCompleteGraph {
    /// Builds a graph from the strict upper triangle, listed row by row:
    /// `(0,1), (0,2), …, (0,n−1), (1,2), …`.
    pub fn from_upper(n: usize, upper: &[f64]) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("n = {n} must be at least 2")));
        }
        if upper.len() != n * (n - 1) / 2 {
            return Err(Error::domain(format!("{} weights for n = {n}", upper.len())));
        }
        let mut weights = vec![0.0; n * n];
        let mut it = upper.iter();
        for i in 0..n {
            for j in i + 1..n {
                let w = *it.next().unwrap();
                if !(0.0..=n as f64).contains(&w) {
                    return Err(Error::domain(format!("weight {w} of edge ({i},{j}) outside [0, {n}]")));
                }
                weights[i * n + j] = w;
                weights[j * n + i] = w;
            }
        }
        Ok(Self { n, weights, seed: None })
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    /// Copy with vertices renamed: new vertex `k` is old vertex `perm[k]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::domain("relabeling is not a permutation"));
        }
        let mut weights = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                weights[i * n + j] = self.weight(perm[i], perm[j]);
            }
        }
        Ok(Self {
            n,
            weights,
            seed: self.seed,
        })
    }
}

/// Seeded instance; the same `(n, seed)` always gives the same matrix.
pub fn sample_instance(n: usize, seed: u64) -> Result<WeightedCompleteGraph> {
    if n < 2 {
        return Err(Error::domain(format!("n = {n} must be at least 2")));
    }
    let mut rng = stream_rng(seed, &[n as u64]);
    let scale = n as f64;
    let upper: Vec<f64> = (0..n * (n - 1) / 2).map(|_| rng.random::<f64>() * scale).collect();
    let mut g = WeightedCompleteGraph::from_upper(n, &upper)?;
    g.seed = Some(seed);
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    DilutedMatching,
    HeldKarp,
    TwoFactor,
    Enumeration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub cost: f64,
    /// Sorted pairs `(i, j)` with `i < j`.
    pub edges: Vec<(usize, usize)>,
    /// Vertices whose degree is below the solver's target degree.
    pub unmatched_count: usize,
    pub longest_edge: f64,
    pub solver: Solver,
}

/// Canonical record: edges sorted, cost summed in that order plus
/// `penalty_per_missing_slot` for every missing unit of degree.
pub fn record_from_edges(
    graph: &WeightedCompleteGraph,
    edges: &[(usize, usize)],
    target_degree: usize,
    penalty_per_missing_slot: f64,
    solver: Solver,
) -> SolutionRecord {
    let mut edges: Vec<(usize, usize)> = edges.iter().map(|&(i, j)| (i.min(j), i.max(j))).collect();
    edges.sort_unstable();
    let mut degree = vec![0usize; graph.n];
    let mut length = 0.0;
    let mut longest_edge: f64 = 0.0;
    for &(i, j) in &edges {
        degree[i] += 1;
        degree[j] += 1;
        let w = graph.weight(i, j);
        length += w;
        longest_edge = longest_edge.max(w);
    }
    let missing: usize = degree.iter().map(|&d| target_degree.saturating_sub(d)).sum();
    let unmatched_count = degree.iter().filter(|&&d| d < target_degree).count();
    let cost = if missing == 0 {
        length
    } else {
        length + penalty_per_missing_slot * missing as f64
    };
    SolutionRecord {
        cost,
        edges,
        unmatched_count,
        longest_edge,
        solver,
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::domain(format!(
            "lambda = {lambda} must be finite and nonnegative"
        )));
    }
    Ok(())
}

/// Minimum of matched length plus `λ/2` per unmatched vertex, by a DP over
/// vertex subsets: the lowest vertex of a subset is either left unmatched or
/// paired with another vertex of the subset. Ties keep the earlier option
/// (unmatched first, then partners in increasing index).
pub fn min_diluted_matching(graph: &WeightedCompleteGraph, lambda: f64) -> Result<SolutionRecord> {
    check_lambda(lambda)?;
    let n = graph.n;
    if n > MAX_MATCHING_N {
        return Err(Error::Capacity(format!(
            "diluted matching DP supports n ≤ {MAX_MATCHING_N}, got {n}"
        )));
    }
    let half = 0.5 * lambda;
    let size = 1usize << n;
    let mut best = vec![0.0f64; size];
    // 0 = lowest vertex unmatched, j + 1 = paired with j.
    let mut choice = vec![0u8; size];
    for mask in 1..size {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut b = half + best[rest];
        let mut c = 0u8;
        let mut others = rest;
        while others != 0 {
            let j = others.trailing_zeros() as usize;
            others &= others - 1;
            let v = graph.weight(i, j) + best[rest & !(1 << j)];
            if v < b {
                b = v;
                c = (j + 1) as u8;
            }
        }
        best[mask] = b;
        choice[mask] = c;
    }
    let mut edges = Vec::new();
    let mut mask = size - 1;
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        mask &= !(1 << i);
        let c = choice[mask | (1 << i)];
        if c > 0 {
            let j = (c - 1) as usize;
            edges.push((i, j));
            mask &= !(1 << j);
        }
    }
    Ok(record_from_edges(graph, &edges, 1, half, Solver::DilutedMatching))
}

/// Shortest Hamiltonian cycle by the Held–Karp subset DP.
pub fn held_karp_tsp(graph: &WeightedCompleteGraph) -> Result<SolutionRecord> {
    let n = graph.n;
    if n < 3 {
        return Err(Error::domain(format!("a Hamiltonian cycle needs n ≥ 3, got {n}")));
    }
    if n > MAX_TSP_N {
        return Err(Error::Capacity(format!("Held-Karp supports n ≤ {MAX_TSP_N}, got {n}")));
    }
    // Vertex 0 is the fixed start; subsets range over vertices 1..n.
    let m = n - 1;
    let size = 1usize << m;
    let mut dp = vec![f64::INFINITY; size * m];
    let mut parent = vec![u8::MAX; size * m];
    for j in 0..m {
        dp[(1 << j) * m + j] = graph.weight(0, j + 1);
    }
    for mask in 1..size {
        for j in 0..m {
            if mask & (1 << j) == 0 {
                continue;
            }
            let cur = dp[mask * m + j];
            if !cur.is_finite() {
                continue;
            }
            let mut free = (size - 1) & !mask;
            while free != 0 {
                let k = free.trailing_zeros() as usize;
                free &= free - 1;
                let next = mask | (1 << k);
                let v = cur + graph.weight(j + 1, k + 1);
                if v < dp[next * m + k] {
                    dp[next * m + k] = v;
                    parent[next * m + k] = j as u8;
                }
            }
        }
    }
    let full = size - 1;
    let mut last = 0;
    let mut best = f64::INFINITY;
    for j in 0..m {
        let v = dp[full * m + j] + graph.weight(j + 1, 0);
        if v < best {
            best = v;
            last = j;
        }
    }
    let mut edges = vec![(0, last + 1)];
    let mut mask = full;
    let mut j = last;
    while mask.count_ones() > 1 {
        let p = parent[mask * m + j] as usize;
        edges.push((p + 1, j + 1));
        mask &= !(1 << j);
        j = p;
    }
    edges.push((0, j + 1));
    Ok(record_from_edges(graph, &edges, 2, 0.0, Solver::HeldKarp))
}

/// Optimum over edge sets with every degree at most 2 of
/// `length + λ·(n − #edges)`, by exhaustive search over edges in
/// lexicographic order. Equivalently `λ/2` per missing unit of degree.
pub fn min_diluted_two_factor(graph: &WeightedCompleteGraph, lambda: f64) -> Result<SolutionRecord> {
    check_lambda(lambda)?;
    let n = graph.n;
    if n > MAX_TWO_FACTOR_N {
        return Err(Error::Capacity(format!(
            "two-factor search supports n ≤ {MAX_TWO_FACTOR_N}, got {n}"
        )));
    }
    let all: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    struct Search<'a> {
        graph: &'a WeightedCompleteGraph,
        all: &'a [(usize, usize)],
        lambda: f64,
        degree: Vec<usize>,
        chosen: Vec<(usize, usize)>,
        best_cost: f64,
        best: Vec<(usize, usize)>,
    }
    impl Search<'_> {
        fn run(&mut self, next: usize, length: f64) {
            let cost = length + self.lambda * (self.graph.n - self.chosen.len()) as f64;
            if cost < self.best_cost {
                self.best_cost = cost;
                self.best = self.chosen.clone();
            }
            for e in next..self.all.len() {
                let (i, j) = self.all[e];
                if self.degree[i] < 2 && self.degree[j] < 2 {
                    self.degree[i] += 1;
                    self.degree[j] += 1;
                    self.chosen.push((i, j));
                    self.run(e + 1, length + self.graph.weight(i, j));
                    self.chosen.pop();
                    self.degree[i] -= 1;
                    self.degree[j] -= 1;
                }
            }
        }
    }
    let mut s = Search {
        graph,
        all: &all,
        lambda,
        degree: vec![0; n],
        chosen: Vec::new(),
        best_cost: f64::INFINITY,
        best: Vec::new(),
    };
    s.run(0, 0.0);
    Ok(record_from_edges(graph, &s.best, 2, 0.5 * lambda, Solver::TwoFactor))
}

/// Seed of replica `r` in an ensemble rooted at `seed`.
pub fn replica_seed(seed: u64, replica: usize) -> u64 {
    stream_rng(seed, &[0x656e_7365_6d62_6c65, replica as u64]).next_u64()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicaRecord {
    pub replica: usize,
    pub seed: u64,
    /// Per-vertex cost, penalties included.
    pub cost: f64,
    pub unmatched: usize,
    pub longest_edge: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticipationBin {
    pub lo: f64,
    pub hi: f64,
    pub participated: u64,
    pub total: u64,
    /// Bin average of the limiting participation probability.
    pub h_predicted: f64,
}

impl ParticipationBin {
    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn frequency(&self) -> Option<f64> {
        (self.total > 0).then(|| self.participated as f64 / self.total as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub n: usize,
    pub lambda: f64,
    pub replicas: usize,
    pub seed: u64,
    pub mean_unmatched_fraction: f64,
    pub unmatched_std_error: f64,
    pub mean_cost_per_vertex: f64,
    pub cost_std_error: f64,
    pub mean_longest_edge: f64,
    pub longest_edge_histogram: Vec<HistogramBin>,
    pub participation: Vec<ParticipationBin>,
    pub records: Vec<ReplicaRecord>,
}

/// Number of equal-width bins over `[0, λ]` used for the participation and
/// longest-edge histograms.
pub const ENSEMBLE_BINS: usize = 12;

fn mean_and_se(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    let var = if n > 1.0 {
        xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, (var / n).sqrt())
}

/// Diluted matching over `replicas` seeded instances.
pub fn ensemble_stats(n: usize, lambda: f64, replicas: usize, seed: u64) -> Result<EnsembleSummary> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain(format!("lambda = {lambda} must be positive and finite")));
    }
    if replicas == 0 {
        return Err(Error::domain("need at least one replica"));
    }
    if n > MAX_MATCHING_N {
        return Err(Error::Capacity(format!(
            "diluted matching DP supports n ≤ {MAX_MATCHING_N}, got {n}"
        )));
    }
    let width = lambda / ENSEMBLE_BINS as f64;
    let bin_of = |w: f64| ((w / width) as usize).min(ENSEMBLE_BINS - 1);

    let per_replica: Vec<(ReplicaRecord, Vec<(u64, u64)>)> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let s = replica_seed(seed, r);
            let g = sample_instance(n, s)?;
            let sol = min_diluted_matching(&g, lambda)?;
            let mut counts = vec![(0u64, 0u64); ENSEMBLE_BINS];
            for i in 0..n {
                for j in i + 1..n {
                    let w = g.weight(i, j);
                    if w <= lambda {
                        counts[bin_of(w)].1 += 1;
                    }
                }
            }
            for &(i, j) in &sol.edges {
                counts[bin_of(g.weight(i, j))].0 += 1;
            }
            let rec = ReplicaRecord {
                replica: r,
                seed: s,
                cost: sol.cost / n as f64,
                unmatched: sol.unmatched_count,
                longest_edge: sol.longest_edge,
            };
            Ok((rec, counts))
        })
        .collect::<Result<_>>()?;

    let q = q_from_lambda(lambda)?;
    let mut participation = Vec::with_capacity(ENSEMBLE_BINS);
    for b in 0..ENSEMBLE_BINS {
        let lo = width * b as f64;
        let hi = lo + width;
        // Edge lengths are uniform within a bin, so average h over it.
        const SUB: usize = 16;
        let mut h = 0.0;
        for s in 0..SUB {
            h += h_matching(lo + width * (s as f64 + 0.5) / SUB as f64, q)?;
        }
        let (participated, total) = per_replica
            .iter()
            .fold((0, 0), |(p, t), (_, c)| (p + c[b].0, t + c[b].1));
        participation.push(ParticipationBin {
            lo,
            hi,
            participated,
            total,
            h_predicted: h / SUB as f64,
        });
    }

    let records: Vec<ReplicaRecord> = per_replica.into_iter().map(|(r, _)| r).collect();
    let mut longest_edge_histogram: Vec<HistogramBin> = (0..ENSEMBLE_BINS)
        .map(|b| HistogramBin {
            lo: width * b as f64,
            hi: width * (b + 1) as f64,
            count: 0,
        })
        .collect();
    for r in &records {
        longest_edge_histogram[bin_of(r.longest_edge)].count += 1;
    }
    let (mean_unmatched_fraction, unmatched_std_error) =
        mean_and_se(records.iter().map(|r| r.unmatched as f64 / n as f64));
    let (mean_cost_per_vertex, cost_std_error) = mean_and_se(records.iter().map(|r| r.cost));
    let (mean_longest_edge, _) = mean_and_se(records.iter().map(|r| r.longest_edge));
    Ok(EnsembleSummary {
        n,
        lambda,
        replicas,
        seed,
        mean_unmatched_fraction,
        unmatched_std_error,
        mean_cost_per_vertex,
        cost_std_error,
        mean_longest_edge,
        longest_edge_histogram,
        participation,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_vertices() {
        let g = WeightedCompleteGraph::from_upper(2, &[1.3]).unwrap();
        assert_eq!(min_diluted_matching(&g, 2.0).unwrap().cost, 1.3);
        let r = min_diluted_matching(&g, 1.0).unwrap();
        assert_eq!(r.cost, 1.0);
        assert_eq!(r.unmatched_count, 2);
        assert!(r.edges.is_empty());
    }

    #[test]
    fn zero_penalty_leaves_everything_unmatched() {
        let g = sample_instance(6, 4).unwrap();
        let r = min_diluted_matching(&g, 0.0).unwrap();
        assert_eq!(r.cost, 0.0);
        assert_eq!(r.unmatched_count, 6);
        let t = min_diluted_two_factor(&g, 0.0).unwrap();
        assert_eq!(t.cost, 0.0);
        assert!(t.edges.is_empty());
    }

    #[test]
    fn triangle_tour() {
        let g = WeightedCompleteGraph::from_upper(3, &[0.5, 1.0, 2.0]).unwrap();
        let r = held_karp_tsp(&g).unwrap();
        assert_eq!(r.cost, 3.5);
        assert_eq!(r.edges, vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn capacities() {
        let g = sample_instance(23, 0).unwrap();
        assert!(matches!(min_diluted_matching(&g, 1.0), Err(Error::Capacity(_))));
        let g = sample_instance(18, 0).unwrap();
        assert!(matches!(held_karp_tsp(&g), Err(Error::Capacity(_))));
        let g = sample_instance(8, 0).unwrap();
        assert!(matches!(min_diluted_two_factor(&g, 1.0), Err(Error::Capacity(_))));
        assert!(matches!(sample_instance(1, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn instances_are_reproducible_and_in_range() {
        let a = sample_instance(9, 77).unwrap();
        assert_eq!(a, sample_instance(9, 77).unwrap());
        assert_ne!(a, sample_instance(9, 78).unwrap());
        for i in 0..9 {
            for j in 0..9 {
                assert_eq!(a.weight(i, j), a.weight(j, i));
                assert!((0.0..=9.0).contains(&a.weight(i, j)));
            }
        }
    }
}
