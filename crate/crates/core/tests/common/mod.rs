//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use meanfield_core::diluted::lambda_from_q;
use meanfield_core::oracle::{record_from_edges, Solver, WeightedCompleteGraph};

/// Composite Simpson rule with `n` (rounded up to even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// `P(f₁ + f₂ ≥ x)` for two draws of the truncated logistic law, by
/// direct quadrature of the density against the survival function.
pub fn h_by_convolution(x: f64, q: f64) -> f64 {
    let lambda = lambda_from_q(q);
    let half = 0.5 * lambda;
    let a = 1.0 + q;
    // Only evaluated at arguments inside [−λ/2, λ/2] (up to rounding).
    let surv = |y: f64| a / (1.0 + (a * y).exp());
    let dens = |u: f64| {
        let e = (a * u).exp();
        a * a * e / ((1.0 + e) * (1.0 + e))
    };
    // f₁ continuous on (−λ/2, λ/2); f₂ must exceed x − f₁, which needs
    // f₁ ≥ x − λ/2. f₁ at the atom λ/2 needs f₂ ≥ x − λ/2.
    let lo = (x - half).max(-half);
    let continuous = simpson(|u| dens(u) * surv(x - u), lo, half, 40_000);
    continuous + q * surv(x - half)
}

/// Every partial matching, by recursion on the lowest free vertex.
pub fn enumerate_matchings(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(free: Vec<usize>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        let Some((&i, rest)) = free.split_first() else {
            out.push(cur.clone());
            return;
        };
        go(rest.to_vec(), cur, out);
        for (k, &j) in rest.iter().enumerate() {
            let mut remaining = rest.to_vec();
            remaining.remove(k);
            cur.push((i, j));
            go(remaining, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go((0..n).collect(), &mut Vec::new(), &mut out);
    out
}

pub fn brute_force_matching(g: &WeightedCompleteGraph, lambda: f64) -> f64 {
    enumerate_matchings(g.n)
        .iter()
        .map(|m| record_from_edges(g, m, 1, 0.5 * lambda, Solver::Enumeration).cost)
        .fold(f64::INFINITY, f64::min)
}

pub fn permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

pub fn brute_force_tour(g: &WeightedCompleteGraph) -> f64 {
    let mut perms = Vec::new();
    permutations(&mut (1..g.n).collect(), 0, &mut perms);
    perms
        .iter()
        .map(|p| {
            let mut edges = vec![(0, p[0]), (p[p.len() - 1], 0)];
            edges.extend(p.windows(2).map(|w| (w[0], w[1])));
            record_from_edges(g, &edges, 2, 0.0, Solver::Enumeration).cost
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn brute_force_two_factor(g: &WeightedCompleteGraph, lambda: f64) -> f64 {
    let all: Vec<(usize, usize)> = (0..g.n).flat_map(|i| (i + 1..g.n).map(move |j| (i, j))).collect();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << all.len()) {
        let edges: Vec<_> = (0..all.len())
            .filter(|&e| mask & (1 << e) != 0)
            .map(|e| all[e])
            .collect();
        let mut deg = vec![0; g.n];
        for &(i, j) in &edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        if deg.iter().all(|&d| d <= 2) {
            let len: f64 = edges.iter().map(|&(i, j)| g.weight(i, j)).sum();
            best = best.min(len + lambda * (g.n - edges.len()) as f64);
        }
    }
    best
}
