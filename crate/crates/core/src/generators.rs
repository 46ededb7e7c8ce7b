//! Seeded random graph models.
//!
//! Every generator is a pure function of its parameters and a [`Seed`]:
//! the same inputs give the same [`Graph`] on every run and platform.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rand::Rng;

use crate::error::{GraphError, Result};
use crate::graph::{pair_count, Graph};
use crate::seed::{below, bernoulli, Seed};

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(GraphError::invalid(format!("{name} = {p} is not in [0, 1]")))
    }
}

/// Uniform graph with exactly `m` edges on `n` vertices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GnmParams {
    pub n: usize,
    pub m: usize,
}

impl GnmParams {
    pub fn validate(&self) -> Result<()> {
        let max = pair_count(self.n);
        if self.m > max {
            return Err(GraphError::invalid(format!(
                "edge count {} exceeds {} vertex pairs",
                self.m, max
            )));
        }
        Ok(())
    }
}

/// Each pair independently present with probability `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GnpParams {
    pub n: usize,
    pub p: f64,
}

impl GnpParams {
    /// The sparse regime `p = c / n`.
    pub fn sparse(n: usize, c: f64) -> Self {
        GnpParams { n, p: c / n as f64 }
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("p", self.p)
    }
}

/// Ring lattice of even degree `k` with each lattice edge rewired with
/// probability `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WsParams {
    pub n: usize,
    pub k: usize,
    pub beta: f64,
}

impl WsParams {
    pub fn validate(&self) -> Result<()> {
        if !self.k.is_multiple_of(2) || self.k < 2 || self.k >= self.n {
            return Err(GraphError::invalid(format!(
                "lattice degree k = {} must be even with 2 <= k < n = {}",
                self.k, self.n
            )));
        }
        check_probability("beta", self.beta)
    }
}

/// Growth from a ring of `m0` vertices, `t` steps, `m` edges per new vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaParams {
    pub m0: usize,
    pub m: usize,
    pub t: usize,
}

impl BaParams {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.m > self.m0 {
            return Err(GraphError::invalid(format!(
                "edges per step m = {} must satisfy 1 <= m <= m0 = {}",
                self.m, self.m0
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrPairParams {
    pub n: usize,
    pub p: f64,
    pub rho: f64,
}

impl CorrPairParams {
    pub fn validate(&self) -> Result<()> {
        check_probability("p", self.p)?;
        check_probability("rho", self.rho)
    }
}

/// Symmetric matrix of per-pair edge probabilities with zero diagonal,
/// stored as the upper triangle in lexicographic pair order.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliMatrix {
    order: usize,
    upper: Vec<f64>,
}

impl BernoulliMatrix {
    pub fn constant(n: usize, p: f64) -> Result<Self> {
        Self::from_fn(n, |_, _| p)
    }

    /// `f(i, j)` is called once per pair with `i < j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut upper = Vec::with_capacity(pair_count(n));
        for i in 0..n {
            for j in i + 1..n {
                let p = f(i, j);
                check_probability(&format!("p[{i},{j}]"), p)?;
                upper.push(p);
            }
        }
        Ok(BernoulliMatrix { order: n, upper })
    }

    /// Vertices `0..n/2` and `n/2..n` form two blocks; pairs inside a block
    /// get `within`, pairs across get `across`.
    pub fn two_block(n: usize, within: f64, across: f64) -> Result<Self> {
        let half = n / 2;
        Self::from_fn(n, |i, j| {
            if (i < half) == (j < half) {
                within
            } else {
                across
            }
        })
    }

    /// Validates symmetry, zero diagonal and range of a dense matrix.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(GraphError::invalid(format!("row {i} has length {}", row.len())));
            }
            if row[i] != 0.0 {
                return Err(GraphError::invalid(format!("diagonal entry {i} is nonzero")));
            }
            for j in i + 1..n {
                if row[j] != rows[j][i] {
                    return Err(GraphError::invalid(format!("entry ({i},{j}) is not symmetric")));
                }
            }
        }
        Self::from_fn(n, |i, j| rows[i][j])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (a, b) = (i.min(j), i.max(j));
        // offset of row a in the packed upper triangle
        let row_start = a * (2 * self.order - a - 1) / 2;
        self.upper[row_start + (b - a - 1)]
    }

    /// Upper-triangle entries in lexicographic pair order.
    pub fn upper_entries(&self) -> &[f64] {
        &self.upper
    }
}

pub fn gnm(params: &GnmParams, seed: Seed) -> Result<Graph> {
    params.validate()?;
    let total = pair_count(params.n);
    let mut rng = seed.rng();
    // Floyd's subset sampling over pair indices
    let mut chosen = HashSet::with_capacity(params.m);
    for j in total - params.m..total {
        let t = below(&mut rng, j + 1);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    let mut indices: Vec<usize> = chosen.into_iter().collect();
    indices.sort_unstable();
    Ok(Graph::from_canonical(
        params.n,
        pairs_at_sorted_indices(params.n, &indices),
    ))
}

/// Maps sorted lexicographic pair indices to `(u, v)` pairs.
fn pairs_at_sorted_indices(n: usize, indices: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(indices.len());
    let (mut u, mut row_start) = (0usize, 0usize);
    for &idx in indices {
        while idx >= row_start + (n - u - 1) {
            row_start += n - u - 1;
            u += 1;
        }
        out.push((u, u + 1 + idx - row_start));
    }
    out
}

pub fn gnp(params: &GnpParams, seed: Seed) -> Result<Graph> {
    params.validate()?;
    let mut rng = seed.rng();
    let n = params.n;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if bernoulli(&mut rng, params.p) {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::from_canonical(n, edges))
}

/// Circulant graph joining each vertex to its `k/2` nearest neighbours on
/// each side.
pub fn ring_lattice(n: usize, k: usize) -> Result<Graph> {
    WsParams { n, k, beta: 0.0 }.validate()?;
    let mut edges = Vec::with_capacity(n * k / 2);
    for i in 0..n {
        for j in 1..=k / 2 {
            let w = (i + j) % n;
            edges.push((i.min(w), i.max(w)));
        }
    }
    Ok(Graph::from_canonical(n, edges))
}

/// Watts-Strogatz rewiring. Laps run over distance `j = 1..=k/2`, and within
/// a lap over `i = 0..n`; each lattice edge `{i, i+j}` is replaced with
/// probability `beta` by `{i, w}`, `w` uniform over vertices that are not `i`
/// and not currently adjacent to `i`. If no such `w` exists the edge stays.
pub fn watts_strogatz(params: &WsParams, seed: Seed) -> Result<Graph> {
    params.validate()?;
    let WsParams { n, k, beta } = *params;
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for i in 0..n {
        for j in 1..=k / 2 {
            let w = (i + j) % n;
            adj[i].insert(w);
            adj[w].insert(i);
        }
    }
    let mut rng = seed.rng();
    for j in 1..=k / 2 {
        for i in 0..n {
            let old = (i + j) % n;
            if !bernoulli(&mut rng, beta) || !adj[i].contains(&old) {
                continue;
            }
            let free = n - 1 - adj[i].len();
            if free == 0 {
                continue;
            }
            let w = nth_non_neighbor(&adj[i], i, below(&mut rng, free));
            adj[i].remove(&old);
            adj[old].remove(&i);
            adj[i].insert(w);
            adj[w].insert(i);
        }
    }
    let edges = adj
        .iter()
        .enumerate()
        .flat_map(|(u, nbrs)| nbrs.range(u + 1..).map(move |&v| (u, v)))
        .collect();
    Ok(Graph::from_canonical(n, edges))
}

/// The `r`-th vertex (0-based, ascending) outside `nbrs ∪ {me}`.
fn nth_non_neighbor(nbrs: &BTreeSet<usize>, me: usize, r: usize) -> usize {
    let mut excluded: Vec<usize> = nbrs.iter().copied().collect();
    let pos = excluded.binary_search(&me).unwrap_or_else(|e| e);
    excluded.insert(pos, me);
    // The answer is r + (number of excluded values <= answer); walk the
    // sorted exclusions to find it.
    let mut candidate = r;
    for &x in &excluded {
        if x <= candidate {
            candidate += 1;
        } else {
            break;
        }
    }
    candidate
}

/// Ring seed on `m0` vertices (a single edge for `m0 = 2`, no edges for
/// `m0 = 1`).
fn ba_seed_edges(m0: usize) -> Vec<(usize, usize)> {
    match m0 {
        0 | 1 => Vec::new(),
        2 => vec![(0, 1)],
        _ => (0..m0)
            .map(|i| {
                let w = (i + 1) % m0;
                (i.min(w), i.max(w))
            })
            .collect(),
    }
}

/// Barabási-Albert growth. Each step adds one vertex joined to `m`
/// distinct existing vertices, each drawn with probability proportional to
/// its degree before the step; repeats are rejected and redrawn. While every
/// degree is zero (only possible for `m0 = 1`) targets are uniform.
pub fn barabasi_albert(params: &BaParams, seed: Seed) -> Result<Graph> {
    params.validate()?;
    let BaParams { m0, m, t } = *params;
    let mut edges = ba_seed_edges(m0);
    edges.reserve(m * t);
    // each vertex appears once per incident edge
    let mut endpoints: Vec<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    endpoints.reserve(2 * m * t);
    let mut rng = seed.rng();
    let mut targets = Vec::with_capacity(m);
    for step in 0..t {
        let newcomer = m0 + step;
        targets.clear();
        while targets.len() < m {
            let pick = if endpoints.is_empty() {
                below(&mut rng, newcomer)
            } else {
                endpoints[below(&mut rng, endpoints.len())]
            };
            if !targets.contains(&pick) {
                targets.push(pick);
            }
        }
        for &target in &targets {
            edges.push((target, newcomer));
            endpoints.push(target);
            endpoints.push(newcomer);
        }
    }
    Ok(Graph::from_canonical(m0 + t, edges))
}

fn correlated_bernoulli<F: Fn(usize, usize) -> f64>(
    n: usize,
    prob: F,
    rho: f64,
    seed: Seed,
) -> (Graph, Graph) {
    let mut rng = seed.rng();
    let (mut first, mut second) = (Vec::new(), Vec::new());
    for u in 0..n {
        for v in u + 1..n {
            let p = prob(u, v);
            let (a, b) = correlated_indicators(&mut rng, p, rho);
            if a {
                first.push((u, v));
            }
            if b {
                second.push((u, v));
            }
        }
    }
    (
        Graph::from_canonical(n, first),
        Graph::from_canonical(n, second),
    )
}

/// `X1 ~ Bernoulli(p)`, then `X2 ~ Bernoulli(p + rho(1-p))` if `X1 = 1`
/// else `Bernoulli(p(1-rho))`. Both marginals are Bernoulli(p) and the
/// Pearson correlation is `rho`.
fn correlated_indicators<R: Rng + ?Sized>(rng: &mut R, p: f64, rho: f64) -> (bool, bool) {
    let first = bernoulli(rng, p);
    let q = if first {
        p + rho * (1.0 - p)
    } else {
        p * (1.0 - rho)
    };
    (first, bernoulli(rng, q))
}

/// Two graphs on a shared vertex set with per-pair indicators correlated at
/// `rho`. The latent alignment between them is the identity.
pub fn correlated_pair(params: &CorrPairParams, seed: Seed) -> Result<(Graph, Graph)> {
    params.validate()?;
    Ok(correlated_bernoulli(params.n, |_, _| params.p, params.rho, seed))
}

/// Inhomogeneous version of [`correlated_pair`] with pair probabilities
/// taken from `probs`.
pub fn bernoulli_matrix_pair(
    probs: &BernoulliMatrix,
    rho: f64,
    seed: Seed,
) -> Result<(Graph, Graph)> {
    check_probability("rho", rho)?;
    Ok(correlated_bernoulli(
        probs.order(),
        |i, j| probs.get(i, j),
        rho,
        seed,
    ))
}

/// A single-graph model, as used by ensembles and the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    Gnm(GnmParams),
    Gnp(GnpParams),
    WattsStrogatz(WsParams),
    BarabasiAlbert(BaParams),
}

impl Model {
    pub fn validate(&self) -> Result<()> {
        match self {
            Model::Gnm(p) => p.validate(),
            Model::Gnp(p) => p.validate(),
            Model::WattsStrogatz(p) => p.validate(),
            Model::BarabasiAlbert(p) => p.validate(),
        }
    }

    pub fn generate(&self, seed: Seed) -> Result<Graph> {
        match self {
            Model::Gnm(p) => gnm(p, seed),
            Model::Gnp(p) => gnp(p, seed),
            Model::WattsStrogatz(p) => watts_strogatz(p, seed),
            Model::BarabasiAlbert(p) => barabasi_albert(p, seed),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Gnm(p) => write!(f, "er-gnm(n={}, m={})", p.n, p.m),
            Model::Gnp(p) => write!(f, "er-gnp(n={}, p={})", p.n, p.p),
            Model::WattsStrogatz(p) => write!(f, "ws(n={}, k={}, beta={})", p.n, p.k, p.beta),
            Model::BarabasiAlbert(p) => write!(f, "ba(m0={}, m={}, t={})", p.m0, p.m, p.t),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(master: u64) -> Seed {
        Seed::new(master)
    }

    #[test]
    fn gnm_forced_cases() {
        let full = gnm(&GnmParams { n: 4, m: 6 }, s(1)).unwrap();
        assert_eq!(full, Graph::complete(4));
        let none = gnm(&GnmParams { n: 4, m: 0 }, s(1)).unwrap();
        assert_eq!(none, Graph::empty(4));
        assert!(gnm(&GnmParams { n: 4, m: 7 }, s(1)).is_err());
    }

    #[test]
    fn pair_index_decoding_is_lexicographic() {
        let all: Vec<usize> = (0..10).collect();
        assert_eq!(
            pairs_at_sorted_indices(5, &all),
            vec![
                (0, 1), (0, 2), (0, 3), (0, 4), (1, 2),
                (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)
            ]
        );
    }

    #[test]
    fn gnp_extremes() {
        assert_eq!(gnp(&GnpParams { n: 10, p: 0.0 }, s(3)).unwrap(), Graph::empty(10));
        assert_eq!(gnp(&GnpParams { n: 10, p: 1.0 }, s(3)).unwrap(), Graph::complete(10));
        assert!(gnp(&GnpParams { n: 10, p: 1.5 }, s(3)).is_err());
        assert!(gnp(&GnpParams { n: 10, p: f64::NAN }, s(3)).is_err());
    }

    #[test]
    fn ws_lattice_and_rewired_counts() {
        let lattice = watts_strogatz(&WsParams { n: 10, k: 4, beta: 0.0 }, s(0)).unwrap();
        assert!(lattice.degree_sequence().iter().all(|&d| d == 4));
        assert_eq!(lattice, ring_lattice(10, 4).unwrap());
        let rewired = watts_strogatz(&WsParams { n: 10, k: 4, beta: 1.0 }, s(0)).unwrap();
        assert_eq!(rewired.edge_count(), 20);
        assert_ne!(rewired, lattice);
    }

    #[test]
    fn ws_rejects_bad_k() {
        for k in [0, 3, 10, 12] {
            assert!(watts_strogatz(&WsParams { n: 10, k, beta: 0.1 }, s(0)).is_err(), "k={k}");
        }
    }

    #[test]
    fn ws_dense_lattice_skips_when_nothing_free() {
        // k = n - 2 leaves each vertex exactly one non-neighbour
        let g = watts_strogatz(&WsParams { n: 6, k: 4, beta: 1.0 }, s(9)).unwrap();
        assert_eq!(g.edge_count(), 12);
    }

    #[test]
    fn non_neighbor_selection() {
        let nbrs: BTreeSet<usize> = [1, 2, 5].into_iter().collect();
        // vertex 3 excluded too: free = 0, 4, 6, 7
        let picks: Vec<usize> = (0..4).map(|r| nth_non_neighbor(&nbrs, 3, r)).collect();
        assert_eq!(picks, vec![0, 4, 6, 7]);
    }

    #[test]
    fn ba_sizes() {
        let g = barabasi_albert(&BaParams { m0: 3, m: 2, t: 100 }, s(5)).unwrap();
        assert_eq!(g.vertex_count(), 103);
        assert_eq!(g.edge_count(), 3 + 200);
        let seed_only = barabasi_albert(&BaParams { m0: 3, m: 2, t: 0 }, s(5)).unwrap();
        assert_eq!(seed_only.edges(), &[(0, 1), (0, 2), (1, 2)]);
        assert!(barabasi_albert(&BaParams { m0: 2, m: 3, t: 5 }, s(5)).is_err());
        assert!(barabasi_albert(&BaParams { m0: 2, m: 0, t: 5 }, s(5)).is_err());
    }

    #[test]
    fn ba_single_seed_vertex_falls_back_to_uniform() {
        let g = barabasi_albert(&BaParams { m0: 1, m: 1, t: 10 }, s(2)).unwrap();
        assert_eq!(g.vertex_count(), 11);
        assert_eq!(g.edge_count(), 10);
    }

    #[test]
    fn ba_newcomers_keep_their_edges() {
        let g = barabasi_albert(&BaParams { m0: 5, m: 2, t: 1000 }, s(11)).unwrap();
        assert!((5..g.vertex_count()).all(|v| g.degree(v) >= 2));
    }

    #[test]
    fn correlated_pair_extremes() {
        let (a, b) = correlated_pair(&CorrPairParams { n: 40, p: 0.3, rho: 1.0 }, s(4)).unwrap();
        assert_eq!(a, b);
        let (a, b) = correlated_pair(&CorrPairParams { n: 40, p: 0.0, rho: 0.5 }, s(4)).unwrap();
        assert_eq!((a.edge_count(), b.edge_count()), (0, 0));
        assert!(correlated_pair(&CorrPairParams { n: 4, p: 0.3, rho: -0.1 }, s(4)).is_err());
    }

    #[test]
    fn bernoulli_matrix_layout() {
        let m = BernoulliMatrix::from_fn(4, |i, j| (10 * i + j) as f64 / 100.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j {
                    0.0
                } else {
                    (10 * i.min(j) + i.max(j)) as f64 / 100.0
                };
                assert_eq!(m.get(i, j), want, "({i},{j})");
            }
        }
        let blocks = BernoulliMatrix::two_block(4, 0.2, 0.6).unwrap();
        assert_eq!(blocks.upper_entries(), &[0.2, 0.6, 0.6, 0.6, 0.6, 0.2]);
        assert!(BernoulliMatrix::constant(3, 1.2).is_err());
        assert!(BernoulliMatrix::from_dense(&[vec![0.0, 0.1], vec![0.2, 0.0]]).is_err());
        assert!(BernoulliMatrix::from_dense(&[vec![0.5, 0.1], vec![0.1, 0.0]]).is_err());
        let dense = BernoulliMatrix::from_dense(&[vec![0.0, 0.1], vec![0.1, 0.0]]).unwrap();
        assert_eq!(dense.get(1, 0), 0.1);
    }

    #[test]
    fn bernoulli_matrix_extremes() {
        let zeros = BernoulliMatrix::constant(12, 0.0).unwrap();
        let (a, b) = bernoulli_matrix_pair(&zeros, 0.3, s(1)).unwrap();
        assert_eq!((a.edge_count(), b.edge_count()), (0, 0));
        let ones = BernoulliMatrix::constant(12, 1.0).unwrap();
        let (a, b) = bernoulli_matrix_pair(&ones, 0.0, s(1)).unwrap();
        assert_eq!(a, Graph::complete(12));
        assert_eq!(b, Graph::complete(12));
    }

    #[test]
    fn determinism_per_seed() {
        let models = [
            Model::Gnm(GnmParams { n: 30, m: 40 }),
            Model::Gnp(GnpParams { n: 30, p: 0.2 }),
            Model::WattsStrogatz(WsParams { n: 30, k: 4, beta: 0.3 }),
            Model::BarabasiAlbert(BaParams { m0: 3, m: 2, t: 30 }),
        ];
        for model in models {
            let seed = Seed { master: 77, stream: 3 };
            assert_eq!(model.generate(seed).unwrap(), model.generate(seed).unwrap(), "{model}");
            assert_ne!(
                model.generate(seed).unwrap(),
                model.generate(seed.with_stream(4)).unwrap(),
                "{model}"
            );
        }
    }
}
