use graphlab::generators::{gnp, ring_lattice, GnpParams};
use graphlab::statistics::{
    char_path_length, clustering_counts, clustering_global, clustering_local, degree_histogram,
    powerlaw_fit, ws_curves, DegreeHistogram,
};
use graphlab::{Graph, ParseMode, Seed};
use proptest::prelude::*;

const KARATE: &str = include_str!("../data/karate.edges");

fn triangles_by_enumeration(g: &Graph) -> u64 {
    let n = g.vertex_count();
    let mut t = 0;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c) {
                    t += 1;
                }
            }
        }
    }
    t
}

/// Floyd-Warshall distances; `None` marks unreachable pairs.
fn all_distances(g: &Graph) -> Vec<Vec<Option<u32>>> {
    let n = g.vertex_count();
    let mut d = vec![vec![None; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = Some(0);
    }
    for &(u, v) in g.edges() {
        d[u][v] = Some(1);
        d[v][u] = Some(1);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// Sum and count of finite distances over unordered pairs.
fn reachable_totals(d: &[Vec<Option<u32>>]) -> (u64, u64) {
    let (mut sum, mut count) = (0u64, 0u64);
    for (i, row) in d.iter().enumerate() {
        for x in row.iter().skip(i + 1).flatten() {
            sum += *x as u64;
            count += 1;
        }
    }
    (sum, count)
}

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2usize..max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..(3 * n))
            .prop_map(move |pairs| Graph::from_edge_list(n, &pairs, ParseMode::Lenient).unwrap())
    })
}

#[test]
fn karate_triangles_and_transitivity() {
    let g = Graph::parse_edge_list(KARATE, ParseMode::Strict).unwrap();
    assert_eq!(triangles_by_enumeration(&g), 45);
    assert_eq!(clustering_counts(&g).total_triangles(), 45);
    // Three closed triples per triangle over all connected triples.
    let triples: u64 = g.degree_sequence().iter().map(|&d| (d * d.saturating_sub(1) / 2) as u64).sum();
    let expected = 3.0 * 45.0 / triples as f64;
    assert!((clustering_global(&g) - expected).abs() < 1e-15);
    assert!((clustering_global(&g) - 0.2556818181818182).abs() < 1e-12);
}

#[test]
fn karate_path_length_matches_floyd_warshall() {
    let g = Graph::parse_edge_list(KARATE, ParseMode::Strict).unwrap();
    let (sum, count) = reachable_totals(&all_distances(&g));
    assert_eq!(count, 34 * 33 / 2);
    let pl = char_path_length(&g).unwrap();
    assert!((pl.mean - sum as f64 / count as f64).abs() < 1e-12);
    assert!((pl.mean - 2.408199643493761).abs() < 1e-12);
    assert_eq!(pl.reachable_fraction, 1.0);
}

#[test]
fn ring_lattice_path_length() {
    // Ring distance r needs ceil(r / (k/2)) hops.
    let (n, k) = (1000usize, 10usize);
    let half = k / 2;
    let sum: usize = (1..n).map(|s| s.min(n - s).div_ceil(half)).sum();
    let expected = sum as f64 / (n - 1) as f64;
    let pl = char_path_length(&ring_lattice(n, k).unwrap()).unwrap();
    assert!((pl.mean - expected).abs() < 1e-9);
}

#[test]
fn complete_and_empty_graphs() {
    let k = Graph::complete(9);
    assert_eq!(clustering_global(&k), 1.0);
    assert_eq!(char_path_length(&k).unwrap().mean, 1.0);
    assert_eq!(clustering_global(&Graph::empty(9)), 0.0);
    assert!(char_path_length(&Graph::empty(9)).is_err());
}

#[test]
fn ws_curves_start_at_one() {
    let pts = ws_curves(200, 6, &[0.0, 1.0], 3, Seed::new(1)).unwrap();
    assert!((pts[0].l_ratio - 1.0).abs() < 1e-12);
    assert!((pts[0].c_ratio - 1.0).abs() < 1e-12);
    assert!(pts[1].l_ratio < 0.5 && pts[1].c_ratio < 0.2);
}

#[test]
fn gnp_clustering_near_p() {
    let g = gnp(&GnpParams { n: 400, p: 0.1 }, Seed::new(6)).unwrap();
    assert!((clustering_global(&g) - 0.1).abs() < 0.01);
}

#[test]
fn powerlaw_recovers_exponent() {
    let h = DegreeHistogram::from_counts((2..2000).map(|k| (k, (1e12 * (k as f64).powf(-2.5)) as u64)));
    let fit = powerlaw_fit(&h, 2).unwrap();
    assert!((fit.gamma - 2.5).abs() < 0.01, "gamma {}", fit.gamma);
    assert!(fit.r2 > 0.99);
}

#[test]
fn degree_histogram_totals() {
    let g = Graph::parse_edge_list(KARATE, ParseMode::Strict).unwrap();
    let h = degree_histogram(&g);
    assert_eq!(h.total(), 34);
    assert_eq!(h.max_degree(), Some(17));
    assert_eq!(h.iter().map(|(k, c)| k as u64 * c).sum::<u64>(), 2 * 78);
}

proptest! {
    #[test]
    fn local_clustering_bounds(g in arb_graph(30)) {
        let counts = clustering_counts(&g);
        for v in 0..g.vertex_count() {
            let d = g.degree(v) as u64;
            prop_assert_eq!(counts.triples[v], d * d.saturating_sub(1) / 2);
            prop_assert!(counts.triangles[v] <= counts.triples[v]);
            let c = clustering_local(&g, v).unwrap();
            prop_assert!((0.0..=1.0).contains(&c));
        }
        let sum: u64 = counts.triangles.iter().sum();
        prop_assert_eq!(sum, 3 * triangles_by_enumeration(&g));
        prop_assert!((0.0..=1.0).contains(&clustering_global(&g)));
    }

    #[test]
    fn adding_an_edge_never_lengthens_paths(g in arb_graph(20), a in 0usize..20, b in 0usize..20) {
        let n = g.vertex_count();
        let (a, b) = (a % n, b % n);
        prop_assume!(a != b && !g.has_edge(a, b));
        let mut pairs = g.edges().to_vec();
        pairs.push((a.min(b), a.max(b)));
        let bigger = Graph::from_edge_list(n, &pairs, ParseMode::Strict).unwrap();
        let before = all_distances(&g);
        let after = all_distances(&bigger);
        for i in 0..n {
            for j in 0..n {
                match (before[i][j], after[i][j]) {
                    (Some(x), Some(y)) => prop_assert!(y <= x),
                    (Some(_), None) => prop_assert!(false, "pair became unreachable"),
                    _ => {}
                }
            }
        }
    }

    #[test]
    fn path_length_agrees_with_floyd_warshall(g in arb_graph(20)) {
        let (sum, count) = reachable_totals(&all_distances(&g));
        match char_path_length(&g) {
            Ok(pl) => {
                prop_assert_eq!(pl.reachable_pairs, count);
                prop_assert!((pl.mean - sum as f64 / count as f64).abs() < 1e-12);
            }
            Err(_) => prop_assert_eq!(count, 0),
        }
    }
}
