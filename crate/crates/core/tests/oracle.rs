mod common;

use common::{brute_force_matching, brute_force_tour, brute_force_two_factor, enumerate_matchings};
use meanfield_core::oracle::{
    ensemble_stats, held_karp_tsp, min_diluted_matching, min_diluted_two_factor, sample_instance, WeightedCompleteGraph,
};
use proptest::prelude::*;

/// Edges (0,1) .. (2,3) in row order.
fn four_vertex_instance() -> WeightedCompleteGraph {
    WeightedCompleteGraph::from_upper(4, &[0.9, 2.5, 0.4, 0.3, 3.2, 1.1]).unwrap()
}

#[test]
fn explicit_four_vertex_matchings() {
    let g = four_vertex_instance();
    // Perfect matchings cost 2.0, 5.7 and 0.7; {(0,3),(1,2)} wins.
    let r = min_diluted_matching(&g, 2.0).unwrap();
    assert!((r.cost - 0.7).abs() < 1e-15);
    assert_eq!(r.edges, vec![(0, 3), (1, 2)]);
    assert_eq!(r.unmatched_count, 0);
    assert_eq!(r.longest_edge, 0.4);
    // At λ = 0.2 leaving all four vertices out costs 0.4.
    let r = min_diluted_matching(&g, 0.2).unwrap();
    assert!((r.cost - 0.4).abs() < 1e-15);
    assert_eq!(r.unmatched_count, 4);
    assert_eq!(enumerate_matchings(4).len(), 10);
}

#[test]
fn explicit_four_vertex_two_factor_and_tour() {
    let g = four_vertex_instance();
    // Path 3-0-1-2 (0.4 + 0.9 + 0.3) plus one missing edge at λ = 1.
    let r = min_diluted_two_factor(&g, 1.0).unwrap();
    assert!((r.cost - 2.6).abs() < 1e-12);
    assert_eq!(r.edges, vec![(0, 1), (0, 3), (1, 2)]);
    assert!((brute_force_two_factor(&g, 1.0) - 2.6).abs() < 1e-12);
    let t = held_karp_tsp(&g).unwrap();
    assert!((t.cost - 2.7).abs() < 1e-12);
}

#[test]
fn matching_dp_equals_enumeration() {
    for s in 0..50u64 {
        let n = 2 + (s as usize % 7);
        let g = sample_instance(n, 1000 + s).unwrap();
        let lambda = 0.5 + 0.25 * (s % 13) as f64;
        let dp = min_diluted_matching(&g, lambda).unwrap();
        assert_eq!(dp.cost, brute_force_matching(&g, lambda), "n = {n}, seed = {s}");
    }
}

#[test]
fn held_karp_equals_permutations() {
    for s in 0..20u64 {
        let n = 3 + (s as usize % 6);
        let g = sample_instance(n, 2000 + s).unwrap();
        let hk = held_karp_tsp(&g).unwrap();
        assert_eq!(hk.cost, brute_force_tour(&g), "n = {n}, seed = {s}");
        assert_eq!(hk.edges.len(), n);
        assert_eq!(hk.unmatched_count, 0);
    }
}

#[test]
fn two_factor_equals_subset_enumeration() {
    for s in 0..12u64 {
        let n = 3 + (s as usize % 4);
        let g = sample_instance(n, 3000 + s).unwrap();
        let lambda = 0.3 * (s + 1) as f64;
        let r = min_diluted_two_factor(&g, lambda).unwrap();
        assert!((r.cost - brute_force_two_factor(&g, lambda)).abs() < 1e-12);
    }
}

#[test]
fn large_penalty_two_factor_is_a_tour() {
    for s in 0..5u64 {
        let g = sample_instance(5, 4000 + s).unwrap();
        let r = min_diluted_two_factor(&g, 1e3).unwrap();
        assert_eq!(r.edges.len(), 5);
        assert!((r.cost - brute_force_tour(&g)).abs() < 1e-12);
    }
    for s in 0..5u64 {
        let g = sample_instance(7, 5000 + s).unwrap();
        let two = min_diluted_two_factor(&g, 1e3).unwrap();
        let tour = held_karp_tsp(&g).unwrap();
        assert!(two.cost <= tour.cost + 1e-12);
    }
}

#[test]
fn tour_is_invariant_under_relabeling() {
    let g = sample_instance(9, 77).unwrap();
    let perm = [4, 7, 0, 2, 8, 1, 6, 3, 5];
    let h = g.relabel(&perm).unwrap();
    let a = held_karp_tsp(&g).unwrap().cost;
    let b = held_karp_tsp(&h).unwrap().cost;
    assert!((a - b).abs() < 1e-12);
    assert!(g.relabel(&[0, 0, 1, 2, 3, 4, 5, 6, 7]).is_err());
}

#[test]
fn two_vertex_instance() {
    let g = sample_instance(2, 8).unwrap();
    let w = g.weight(0, 1);
    assert!((0.0..=2.0).contains(&w));
    for lambda in [0.1, 1.0, 5.0] {
        assert_eq!(min_diluted_matching(&g, lambda).unwrap().cost, w.min(lambda));
    }
}

#[test]
fn weight_mean_is_half_n() {
    let n = 10;
    let mut sum = 0.0;
    let mut count = 0usize;
    for s in 0..2223u64 {
        let g = sample_instance(n, s).unwrap();
        for i in 0..n {
            for j in i + 1..n {
                sum += g.weight(i, j);
                count += 1;
            }
        }
    }
    let mean = sum / count as f64;
    let sigma = n as f64 / 12f64.sqrt() / (count as f64).sqrt();
    assert!(count >= 100_000);
    assert!((mean - 0.5 * n as f64).abs() < 3.0 * sigma, "{mean}");
}

#[test]
fn ensemble_is_reproducible() {
    let a = ensemble_stats(8, 2.0, 20, 99).unwrap();
    let b = ensemble_stats(8, 2.0, 20, 99).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.records.len(), 20);
    let total: u64 = a.longest_edge_histogram.iter().map(|b| b.count).sum();
    assert_eq!(total, 20);
    for bin in &a.participation {
        assert!(bin.participated <= bin.total);
        assert!(bin.h_predicted > 0.0 && bin.h_predicted < 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]
    #[test]
    fn matching_monotone_in_penalty(seed in 0u64..10_000, n in 2usize..10, a in 0.0f64..6.0, b in 0.0f64..6.0) {
        let g = sample_instance(n, seed).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let r_lo = min_diluted_matching(&g, lo).unwrap();
        let r_hi = min_diluted_matching(&g, hi).unwrap();
        prop_assert!(r_lo.cost <= r_hi.cost + 1e-12);
        prop_assert!(r_lo.unmatched_count >= r_hi.unmatched_count);
        prop_assert!(r_hi.edges.iter().all(|&(i, j)| g.weight(i, j) <= hi));
    }
}
