//! The graph matching problem on equal-order graphs: edge disagreements
//! under a bijection, exact and heuristic minimizers, alignment strength,
//! and the heterogeneity / total correlation measures.
//!
//! Correlated pairs from [`crate::generators`] share one vertex set, so the
//! latent alignment is the identity bijection throughout.

use std::fmt::Write as _;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{GraphError, Result};
use crate::generators::{bernoulli_matrix_pair, correlated_pair, BernoulliMatrix, CorrPairParams};
use crate::graph::Graph;
use crate::seed::{below, Seed};

/// Default cap on the order accepted by the exhaustive solver (10! leaves).
pub const EXHAUSTIVE_LIMIT: usize = 10;

/// A permutation of `0..n`; entry `v` is the image of vertex `v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bijection(Vec<usize>);

impl Bijection {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &t in &mapping {
            if t >= n || std::mem::replace(&mut seen[t], true) {
                return Err(GraphError::InvalidPermutation(format!(
                    "image {t} is out of range or repeated in a mapping of length {n}"
                )));
            }
        }
        Ok(Bijection(mapping))
    }

    pub fn identity(n: usize) -> Self {
        Bijection((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(v, &t)| v == t)
    }

    pub fn apply(&self, v: usize) -> usize {
        self.0[v]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (v, &t) in self.0.iter().enumerate() {
            inv[t] = v;
        }
        Bijection(inv)
    }

    /// The same mapping with the images of `a` and `b` exchanged.
    pub fn swapped(&self, a: usize, b: usize) -> Self {
        let mut m = self.0.clone();
        m.swap(a, b);
        Bijection(m)
    }

    /// A uniformly random permutation.
    pub fn random(n: usize, seed: Seed) -> Self {
        let mut rng = seed.rng();
        Self::shuffled(n, &mut rng)
    }

    fn shuffled<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut m: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            m.swap(i, below(rng, i + 1));
        }
        Bijection(m)
    }
}

fn same_order(g1: &Graph, g2: &Graph) -> Result<usize> {
    if g1.vertex_count() != g2.vertex_count() {
        return Err(GraphError::SizeMismatch(g1.vertex_count(), g2.vertex_count()));
    }
    Ok(g1.vertex_count())
}

fn check_bijection(psi: &Bijection, n: usize) -> Result<()> {
    if psi.len() != n {
        return Err(GraphError::InvalidPermutation(format!(
            "bijection has length {} but graphs have {n} vertices",
            psi.len()
        )));
    }
    Ok(())
}

/// Number of pairs `{v, w}` whose adjacency in `g1` differs from the
/// adjacency of `{psi(v), psi(w)}` in `g2`.
pub fn disagreements(g1: &Graph, g2: &Graph, psi: &Bijection) -> Result<u64> {
    let n = same_order(g1, g2)?;
    check_bijection(psi, n)?;
    let shared = g1
        .edges()
        .iter()
        .filter(|&&(u, v)| g2.has_edge(psi.apply(u), psi.apply(v)))
        .count() as u64;
    Ok((g1.edge_count() + g2.edge_count()) as u64 - 2 * shared)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchResult {
    pub best: Bijection,
    pub disagreements: u64,
    /// True when `best` is a proven global minimizer.
    pub optimal: bool,
    /// Vertices mapped differently from the latent alignment, once known.
    pub mismatches: Option<usize>,
}

impl MatchResult {
    /// Records the mismatch count against the latent alignment `phi`.
    pub fn against(mut self, phi: &Bijection) -> Result<Self> {
        self.mismatches = Some(mismatch_count(&self.best, phi)?);
        Ok(self)
    }
}

/// Every bijection attaining the minimum disagreement count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Minimizers {
    pub disagreements: u64,
    /// Lexicographically ascending.
    pub bijections: Vec<Bijection>,
}

impl Minimizers {
    /// True when the identity is the unique minimizer.
    pub fn is_unique_identity(&self) -> bool {
        self.bijections.len() == 1 && self.bijections[0].is_identity()
    }

    pub fn contains_identity(&self) -> bool {
        self.bijections.iter().any(Bijection::is_identity)
    }
}

/// Row-major 0/1 adjacency, for inner loops that probe arbitrary pairs.
struct Dense {
    n: usize,
    bits: Vec<bool>,
}

impl Dense {
    fn new(g: &Graph) -> Self {
        let n = g.vertex_count();
        let mut bits = vec![false; n * n];
        for &(u, v) in g.edges() {
            bits[u * n + v] = true;
            bits[v * n + u] = true;
        }
        Dense { n, bits }
    }

    #[inline]
    fn at(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.n + v]
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Collect {
    /// Keep the lexicographically first minimizer, pruning ties.
    First,
    /// Keep every minimizer.
    All,
}

struct BranchAndBound<'a> {
    a1: &'a Dense,
    a2: &'a Dense,
    mode: Collect,
    image: Vec<usize>,
    used: Vec<bool>,
    best: u64,
    found: Vec<Vec<usize>>,
}

impl BranchAndBound<'_> {
    fn prune(&self, partial: u64) -> bool {
        match self.mode {
            Collect::First => partial >= self.best,
            Collect::All => partial > self.best,
        }
    }

    fn descend(&mut self, depth: usize, partial: u64) {
        let n = self.a1.n;
        if depth == n {
            if partial < self.best {
                self.best = partial;
                self.found.clear();
            }
            self.found.push(self.image.clone());
            return;
        }
        for target in 0..n {
            if self.used[target] {
                continue;
            }
            // pairs {u, depth} with u already placed
            let added = (0..depth)
                .filter(|&u| self.a1.at(u, depth) != self.a2.at(self.image[u], target))
                .count() as u64;
            let cost = partial + added;
            if self.prune(cost) {
                continue;
            }
            self.used[target] = true;
            self.image.push(target);
            self.descend(depth + 1, cost);
            self.image.pop();
            self.used[target] = false;
        }
    }
}

fn search(g1: &Graph, g2: &Graph, limit: usize, mode: Collect) -> Result<(u64, Vec<Vec<usize>>)> {
    let n = same_order(g1, g2)?;
    if n > limit {
        return Err(GraphError::SizeLimit { n, limit });
    }
    let (a1, a2) = (Dense::new(g1), Dense::new(g2));
    let mut bb = BranchAndBound {
        a1: &a1,
        a2: &a2,
        mode,
        image: Vec::with_capacity(n),
        used: vec![false; n],
        best: u64::MAX,
        found: Vec::new(),
    };
    bb.descend(0, 0);
    Ok((bb.best, bb.found))
}

/// Exact minimizer of [`disagreements`] by exhaustive branch and bound,
/// returning the lexicographically smallest optimal bijection.
pub fn exact_gmp(g1: &Graph, g2: &Graph) -> Result<MatchResult> {
    exact_gmp_with_limit(g1, g2, EXHAUSTIVE_LIMIT)
}

pub fn exact_gmp_with_limit(g1: &Graph, g2: &Graph, limit: usize) -> Result<MatchResult> {
    let (best, mut found) = search(g1, g2, limit, Collect::First)?;
    Ok(MatchResult {
        best: Bijection(found.swap_remove(0)),
        disagreements: best,
        optimal: true,
        mismatches: None,
    })
}

/// The full minimizer set of the graph matching problem.
pub fn all_minimizers(g1: &Graph, g2: &Graph) -> Result<Minimizers> {
    all_minimizers_with_limit(g1, g2, EXHAUSTIVE_LIMIT)
}

pub fn all_minimizers_with_limit(g1: &Graph, g2: &Graph, limit: usize) -> Result<Minimizers> {
    let (best, found) = search(g1, g2, limit, Collect::All)?;
    Ok(Minimizers {
        disagreements: best,
        bijections: found.into_iter().map(Bijection).collect(),
    })
}

/// Change in disagreements if the images of `a` and `b` are exchanged.
/// The pair `{a, b}` itself maps to the same target pair either way.
fn swap_gain(a1: &Dense, a2: &Dense, psi: &[usize], a: usize, b: usize) -> i64 {
    let (pa, pb) = (psi[a], psi[b]);
    let mut delta = 0i64;
    for (x, &px) in psi.iter().enumerate() {
        if x == a || x == b {
            continue;
        }
        let (ax, bx) = (a1.at(a, x), a1.at(b, x));
        delta += i64::from(ax != a2.at(pb, px)) + i64::from(bx != a2.at(pa, px))
            - i64::from(ax != a2.at(pa, px))
            - i64::from(bx != a2.at(pb, px));
    }
    delta
}

/// Pairs the `i`-th vertex of `g1` with the `i`-th vertex of `g2` after
/// sorting both by degree and then by the sorted degrees of their neighbours.
fn signature_start(g1: &Graph, g2: &Graph) -> Vec<usize> {
    let order = |g: &Graph| {
        let deg = g.degree_sequence();
        let mut keyed: Vec<(usize, Vec<usize>, usize)> = (0..g.vertex_count())
            .map(|v| {
                let mut nd: Vec<usize> = g.neighbors(v).iter().map(|&w| deg[w]).collect();
                nd.sort_unstable();
                (deg[v], nd, v)
            })
            .collect();
        keyed.sort();
        keyed.into_iter().map(|k| k.2).collect::<Vec<_>>()
    };
    let (o1, o2) = (order(g1), order(g2));
    let mut psi = vec![0; o1.len()];
    for (&v, &w) in o1.iter().zip(&o2) {
        psi[v] = w;
    }
    psi
}

/// Multi-restart steepest descent over transpositions. The first restart
/// begins at the degree-signature assignment, the others at random
/// permutations; each applies the most improving swap until no swap lowers
/// the disagreement count. Not guaranteed optimal.
pub fn local_search_gmp(g1: &Graph, g2: &Graph, restarts: usize, seed: Seed) -> Result<MatchResult> {
    let n = same_order(g1, g2)?;
    if restarts == 0 {
        return Err(GraphError::invalid("local search needs at least one restart"));
    }
    let (a1, a2) = (Dense::new(g1), Dense::new(g2));
    let mut rng = seed.rng();
    let mut best: Option<(u64, Vec<usize>)> = None;
    for r in 0..restarts {
        let mut psi = if r == 0 {
            signature_start(g1, g2)
        } else {
            Bijection::shuffled(n, &mut rng).0
        };
        loop {
            let mut step = (0i64, 0, 0);
            for a in 0..n {
                for b in a + 1..n {
                    let gain = swap_gain(&a1, &a2, &psi, a, b);
                    if gain < step.0 {
                        step = (gain, a, b);
                    }
                }
            }
            if step.0 == 0 {
                break;
            }
            psi.swap(step.1, step.2);
        }
        let cost = disagreements(g1, g2, &Bijection(psi.clone()))?;
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, psi));
        }
    }
    let (cost, psi) = best.expect("at least one restart");
    Ok(MatchResult {
        best: Bijection(psi),
        disagreements: cost,
        optimal: false,
        mismatches: None,
    })
}

/// Number of vertices `v` with `psi(v) != phi(v)`.
pub fn mismatch_count(psi: &Bijection, phi: &Bijection) -> Result<usize> {
    if psi.len() != phi.len() {
        return Err(GraphError::SizeMismatch(psi.len(), phi.len()));
    }
    Ok(psi.0.iter().zip(&phi.0).filter(|(a, b)| a != b).count())
}

/// Mean of [`disagreements`] over all `n!` bijections, exactly.
///
/// A uniform random bijection sends a fixed pair to a uniform random pair,
/// so the mean is `|E1| + |E2| - 2 |E1| |E2| / (n choose 2)`.
pub fn mean_random_disagreements(g1: &Graph, g2: &Graph) -> Result<Ratio<u128>> {
    let n = same_order(g1, g2)?;
    if n < 2 {
        return Err(GraphError::Degenerate(format!(
            "mean disagreement needs at least 2 vertices, got {n}"
        )));
    }
    let c = g1.pair_count() as u128;
    let (m1, m2) = (g1.edge_count() as u128, g2.edge_count() as u128);
    // m1 (C - m2) + m2 (C - m1) >= 0
    Ok(Ratio::new(m1 * (c - m2) + m2 * (c - m1), c))
}

/// `1 - Δ(psi) / mean Δ`, the alignment strength of `psi`.
pub fn alignment_strength(g1: &Graph, g2: &Graph, psi: &Bijection) -> Result<f64> {
    let mean = mean_random_disagreements(g1, g2)?;
    if *mean.numer() == 0 {
        return Err(GraphError::Degenerate(
            "every bijection has zero disagreements (both graphs empty or both complete)".into(),
        ));
    }
    let delta = disagreements(g1, g2, psi)? as f64;
    Ok(1.0 - delta * *mean.denom() as f64 / *mean.numer() as f64)
}

/// Mean, population variance and heterogeneity coefficient of the pair
/// probabilities of a Bernoulli matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Heterogeneity {
    pub mu: f64,
    pub sigma2: f64,
    /// `sigma2 / (mu (1 - mu))`.
    pub rho_h: f64,
}

pub fn heterogeneity(probs: &BernoulliMatrix) -> Result<Heterogeneity> {
    let entries = probs.upper_entries();
    if entries.is_empty() {
        return Err(GraphError::Degenerate("matrix has no vertex pairs".into()));
    }
    let count = entries.len() as f64;
    let mu = entries.iter().sum::<f64>() / count;
    let sigma2 = entries.iter().map(|p| (p - mu).powi(2)).sum::<f64>() / count;
    if mu <= 0.0 || mu >= 1.0 {
        return Err(GraphError::Degenerate(format!(
            "heterogeneity coefficient is undefined for mean {mu}"
        )));
    }
    Ok(Heterogeneity {
        mu,
        sigma2,
        rho_h: sigma2 / (mu * (1.0 - mu)),
    })
}

/// `rho_T` with `1 - rho_T = (1 - rho_e)(1 - rho_h)`.
pub fn total_correlation(rho_e: f64, rho_h: f64) -> Result<f64> {
    for (name, x) in [("rho_e", rho_e), ("rho_h", rho_h)] {
        if !(0.0..=1.0).contains(&x) {
            return Err(GraphError::invalid(format!("{name} = {x} is not in [0, 1]")));
        }
    }
    Ok(1.0 - (1.0 - rho_e) * (1.0 - rho_h))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationReport {
    pub mu: f64,
    pub sigma2: f64,
    pub rho_h: f64,
    pub rho_e: f64,
    pub rho_t: f64,
}

pub fn correlation_report(probs: &BernoulliMatrix, rho_e: f64) -> Result<CorrelationReport> {
    let h = heterogeneity(probs)?;
    Ok(CorrelationReport {
        mu: h.mu,
        sigma2: h.sigma2,
        rho_h: h.rho_h,
        rho_e,
        rho_t: total_correlation(rho_e, h.rho_h)?,
    })
}

/// Pearson correlation of the paired edge indicators over all vertex pairs,
/// with the two graphs aligned by the identity.
pub fn empirical_edge_correlation(g1: &Graph, g2: &Graph) -> Result<f64> {
    same_order(g1, g2)?;
    let c = g1.pair_count() as i128;
    let (m1, m2) = (g1.edge_count() as i128, g2.edge_count() as i128);
    let both = g1
        .edges()
        .iter()
        .filter(|&&(u, v)| g2.has_edge(u, v))
        .count() as i128;
    let var1 = c * m1 - m1 * m1;
    let var2 = c * m2 - m2 * m2;
    if var1 == 0 || var2 == 0 {
        return Err(GraphError::Degenerate(
            "edge indicators have zero variance (a graph is empty or complete)".into(),
        ));
    }
    Ok((c * both - m1 * m2) as f64 / ((var1 as f64) * (var2 as f64)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryRow {
    pub rho: f64,
    pub trials: usize,
    /// Fraction of trials whose minimizer set is exactly `{identity}`.
    pub recovery_fraction: f64,
    /// Fraction of trials in which the identity is among the minimizers.
    pub identity_optimal_fraction: f64,
}

/// For each `rho`, samples correlated pairs `G(n, p)` and solves the
/// matching problem exhaustively. Trial `i` of grid row `r` uses stream
/// `r * trials + i`.
pub fn recovery_experiment(
    n: usize,
    p: f64,
    rho_grid: &[f64],
    trials: usize,
    seed: Seed,
) -> Result<Vec<RecoveryRow>> {
    if n > EXHAUSTIVE_LIMIT {
        return Err(GraphError::SizeLimit {
            n,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    if trials == 0 {
        return Err(GraphError::invalid("recovery experiment needs at least one trial"));
    }
    let mut rows = Vec::with_capacity(rho_grid.len());
    for (r, &rho) in rho_grid.iter().enumerate() {
        let params = CorrPairParams { n, p, rho };
        params.validate()?;
        let outcomes: Vec<(bool, bool)> = (0..trials)
            .into_par_iter()
            .map(|i| {
                let (g1, g2) = correlated_pair(&params, seed.with_stream((r * trials + i) as u64))?;
                let set = all_minimizers(&g1, &g2)?;
                Ok((set.is_unique_identity(), set.contains_identity()))
            })
            .collect::<Result<_>>()?;
        let frac = |pick: fn(&(bool, bool)) -> bool| {
            outcomes.iter().filter(|o| pick(o)).count() as f64 / trials as f64
        };
        rows.push(RecoveryRow {
            rho,
            trials,
            recovery_fraction: frac(|o| o.0),
            identity_optimal_fraction: frac(|o| o.1),
        });
    }
    Ok(rows)
}

pub fn recovery_csv(rows: &[RecoveryRow]) -> String {
    let mut out = String::from("rho,trials,recovery_fraction\n");
    for r in rows {
        writeln!(out, "{},{},{}", r.rho, r.trials, r.recovery_fraction).unwrap();
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrengthRow {
    pub trial: usize,
    pub strength: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrengthTable {
    pub report: CorrelationReport,
    pub rows: Vec<StrengthRow>,
}

impl StrengthTable {
    pub fn mean_strength(&self) -> f64 {
        self.rows.iter().map(|r| r.strength).sum::<f64>() / self.rows.len() as f64
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,str,rho_T,abs_error\n");
        for r in &self.rows {
            writeln!(out, "{},{},{},{}", r.trial, r.strength, self.report.rho_t, r.abs_error).unwrap();
        }
        out
    }
}

/// Alignment strength at the identity for `trials` correlated samples from
/// `probs`, next to the closed-form total correlation. `rho_e` is the
/// generator's correlation parameter. Trial `i` uses stream `i`.
pub fn strength_convergence_experiment(
    probs: &BernoulliMatrix,
    rho_e: f64,
    trials: usize,
    seed: Seed,
) -> Result<StrengthTable> {
    if trials == 0 {
        return Err(GraphError::invalid("strength experiment needs at least one trial"));
    }
    let report = correlation_report(probs, rho_e)?;
    let identity = Bijection::identity(probs.order());
    let rows = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let (g1, g2) = bernoulli_matrix_pair(probs, rho_e, seed.with_stream(trial as u64))?;
            let strength = alignment_strength(&g1, &g2, &identity)?;
            Ok(StrengthRow {
                trial,
                strength,
                abs_error: (strength - report.rho_t).abs(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(StrengthTable { report, rows })
}
