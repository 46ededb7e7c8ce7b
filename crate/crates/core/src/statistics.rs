//! Network statistics: triangles and connected triples, clustering,
//! characteristic path length, degree histograms with Poisson and power-law
//! comparisons, and the Watts-Strogatz `L(beta)`, `C(beta)` curves.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{GraphError, Result};
use crate::generators::{ring_lattice, watts_strogatz, WsParams};
use crate::graph::Graph;
use crate::seed::Seed;

/// Per-vertex triangle counts `λ(v)` and connected-triple counts `τ(v)`,
/// where a triple is a pair of edges meeting at `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusteringCounts {
    pub triangles: Vec<u64>,
    pub triples: Vec<u64>,
}

impl ClusteringCounts {
    pub fn total_triangles(&self) -> u64 {
        self.triangles.iter().sum::<u64>() / 3
    }
}

pub fn clustering_counts(g: &Graph) -> ClusteringCounts {
    let n = g.vertex_count();
    let mut triangles = vec![0u64; n];
    for &(u, v) in g.edges() {
        // each triangle u < v < w is found once, from its lowest edge
        let (nu, nv) = (g.neighbors(u), g.neighbors(v));
        let (mut a, mut b) = (nu.partition_point(|&x| x <= v), nv.partition_point(|&x| x <= v));
        while a < nu.len() && b < nv.len() {
            match nu[a].cmp(&nv[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    let w = nu[a];
                    triangles[u] += 1;
                    triangles[v] += 1;
                    triangles[w] += 1;
                    a += 1;
                    b += 1;
                }
            }
        }
    }
    let triples = (0..n)
        .map(|v| {
            let d = g.degree(v) as u64;
            d * d.saturating_sub(1) / 2
        })
        .collect();
    ClusteringCounts { triangles, triples }
}

/// `λ(v) / τ(v)`, or zero when `v` has fewer than two neighbours.
pub fn clustering_local(g: &Graph, v: usize) -> Result<f64> {
    if v >= g.vertex_count() {
        return Err(GraphError::VertexOutOfRange {
            index: v,
            n: g.vertex_count(),
        });
    }
    let counts = clustering_counts(g);
    Ok(ratio_or_zero(counts.triangles[v], counts.triples[v]))
}

/// Transitivity `Σλ / Στ`; zero when the graph has no connected triples.
pub fn clustering_global(g: &Graph) -> f64 {
    let counts = clustering_counts(g);
    ratio_or_zero(counts.triangles.iter().sum(), counts.triples.iter().sum())
}

fn ratio_or_zero(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLength {
    /// Mean distance over unordered pairs joined by some path.
    pub mean: f64,
    pub reachable_pairs: u64,
    /// `reachable_pairs / (n choose 2)`.
    pub reachable_fraction: f64,
}

/// Characteristic path length by breadth-first search from every vertex.
/// Pairs in different components are left out of the mean.
pub fn char_path_length(g: &Graph) -> Result<PathLength> {
    let n = g.vertex_count();
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::with_capacity(n);
    let (mut total, mut pairs) = (0u64, 0u64);
    for source in 0..n {
        dist.fill(usize::MAX);
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u];
            if u > source {
                total += du as u64;
                pairs += 1;
            }
            for &w in g.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = du + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    if pairs == 0 {
        return Err(GraphError::Degenerate(
            "characteristic path length is undefined without reachable pairs".into(),
        ));
    }
    Ok(PathLength {
        mean: total as f64 / pairs as f64,
        reachable_pairs: pairs,
        reachable_fraction: pairs as f64 / g.pair_count() as f64,
    })
}

/// Number of vertices of each degree, `ν_r`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DegreeHistogram {
    counts: BTreeMap<usize, u64>,
}

impl DegreeHistogram {
    pub fn from_counts(counts: impl IntoIterator<Item = (usize, u64)>) -> Self {
        let mut h = DegreeHistogram::default();
        for (degree, count) in counts {
            h.add(degree, count);
        }
        h
    }

    pub fn add(&mut self, degree: usize, count: u64) {
        if count > 0 {
            *self.counts.entry(degree).or_insert(0) += count;
        }
    }

    /// Pools another histogram into this one.
    pub fn merge(&mut self, other: &DegreeHistogram) {
        for (&d, &c) in &other.counts {
            self.add(d, c);
        }
    }

    pub fn get(&self, degree: usize) -> u64 {
        self.counts.get(&degree).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.counts.keys().next_back().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// `(degree, count)` in ascending degree order, nonzero counts only.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().map(|(&d, &c)| (d, c))
    }
}

pub fn degree_histogram(g: &Graph) -> DegreeHistogram {
    DegreeHistogram::from_counts((0..g.vertex_count()).map(|v| (g.degree(v), 1)))
}

fn poisson_log_pmf(lambda: f64, upto: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(upto + 1);
    let ln_lambda = lambda.ln();
    let mut acc = -lambda;
    out.push(acc);
    for r in 1..=upto {
        acc += ln_lambda - (r as f64).ln();
        out.push(acc);
    }
    out
}

/// Poisson(`lambda`) probabilities for `0..=upto`.
pub fn poisson_pmf(lambda: f64, upto: usize) -> Vec<f64> {
    poisson_log_pmf(lambda, upto).into_iter().map(f64::exp).collect()
}

/// Total-variation distance between the normalized histogram and
/// Poisson(`lambda`). Degrees above the largest observed one contribute the
/// Poisson tail mass.
pub fn poisson_tv_distance(h: &DegreeHistogram, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(GraphError::invalid(format!("Poisson mean {lambda} must be positive")));
    }
    let top = h
        .max_degree()
        .ok_or_else(|| GraphError::invalid("empty degree histogram"))?;
    let total = h.total() as f64;
    let pmf = poisson_pmf(lambda, top);
    let covered: f64 = pmf.iter().sum();
    let body: f64 = pmf
        .iter()
        .enumerate()
        .map(|(r, q)| (h.get(r) as f64 / total - q).abs())
        .sum();
    let tail = (1.0 - covered).max(0.0);
    Ok((0.5 * (body + tail)).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerLawFit {
    /// Negative slope of the log-log regression.
    pub gamma: f64,
    pub k_min: usize,
    /// Coefficient of determination of the final regression.
    pub r2: f64,
    /// `(center, density)` of each non-empty bin used in the fit.
    pub bins: Vec<(f64, f64)>,
}

struct LogBin {
    lo: usize,
    hi: usize,
    count: u64,
}

/// Fits `P(k) ~ k^-gamma` on degrees `>= k_min` by least squares on a
/// base-2 logarithmic binning. Bin `b` covers `[k_min 2^b, k_min 2^(b+1))`,
/// truncated after the largest degree; its density is the normalized count
/// divided by the bin width.
///
/// Each bin is placed at the abscissa `x` where `x^-gamma` equals the bin's
/// mean of `k^-gamma`; since that depends on `gamma`, centers and slope are
/// iterated to a fixed point. On exact power-law input this recovers the
/// exponent without the bias of geometric bin centers.
pub fn powerlaw_fit(h: &DegreeHistogram, k_min: usize) -> Result<PowerLawFit> {
    if k_min == 0 {
        return Err(GraphError::invalid("k_min must be at least 1 for a log-log fit"));
    }
    let support = h.iter().filter(|&(d, _)| d >= k_min).count();
    if support < 3 {
        return Err(GraphError::Degenerate(format!(
            "power-law fit needs at least 3 distinct degrees >= {k_min}, found {support}"
        )));
    }
    let total = h.total() as f64;
    let k_max = h.max_degree().expect("non-empty");

    let mut bins = Vec::new();
    let mut lo = k_min;
    while lo <= k_max {
        let hi = (2 * lo).min(k_max + 1);
        let count: u64 = (lo..hi).map(|k| h.get(k)).sum();
        if count > 0 {
            bins.push(LogBin { lo, hi, count });
        }
        lo *= 2;
    }
    if bins.len() < 2 {
        return Err(GraphError::Degenerate(
            "power-law fit needs at least 2 non-empty logarithmic bins".into(),
        ));
    }

    let log_density: Vec<f64> = bins
        .iter()
        .map(|b| (b.count as f64 / total / (b.hi - b.lo) as f64).ln())
        .collect();
    let geometric: Vec<f64> = bins
        .iter()
        .map(|b| 0.5 * ((b.lo as f64).ln() + ((b.hi - 1) as f64).ln()))
        .collect();
    let mut line = least_squares(&geometric, &log_density);
    let mut centers = geometric;
    for _ in 0..200 {
        let gamma = -line.slope;
        centers = bins.iter().map(|b| log_center(b.lo, b.hi, gamma)).collect();
        let next = least_squares(&centers, &log_density);
        let done = (next.slope - line.slope).abs() < 1e-13;
        line = next;
        if done {
            break;
        }
    }
    Ok(PowerLawFit {
        gamma: -line.slope,
        k_min,
        r2: line.r2,
        bins: centers
            .iter()
            .zip(&log_density)
            .map(|(x, y)| (x.exp(), y.exp()))
            .collect(),
    })
}

/// `ln x` where `x^-gamma = mean_{k in [lo, hi)} k^-gamma`; the geometric
/// mean of the bin in the `gamma -> 0` limit.
fn log_center(lo: usize, hi: usize, gamma: f64) -> f64 {
    let width = (hi - lo) as f64;
    if gamma.abs() < 1e-9 {
        return (lo..hi).map(|k| (k as f64).ln()).sum::<f64>() / width;
    }
    let mean = (lo..hi).map(|k| (-gamma * (k as f64).ln()).exp()).sum::<f64>() / width;
    -mean.ln() / gamma
}

struct Line {
    slope: f64,
    r2: f64,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> Line {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    Line { slope, r2 }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WsCurvePoint {
    pub beta: f64,
    /// Mean of `L(beta) / L(0)` over trials.
    pub l_ratio: f64,
    /// Mean of `C(beta) / C(0)` over trials.
    pub c_ratio: f64,
    pub trials: usize,
}

/// Mean normalized path length and clustering of Watts-Strogatz samples for
/// each `beta`. `L(0)` and `C(0)` come from the unrewired lattice. Trial `i`
/// at grid index `b` uses stream `b * trials + i`.
pub fn ws_curves(
    n: usize,
    k: usize,
    beta_grid: &[f64],
    trials: usize,
    seed: Seed,
) -> Result<Vec<WsCurvePoint>> {
    if trials == 0 {
        return Err(GraphError::invalid("ws_curves needs at least one trial"));
    }
    for &beta in beta_grid {
        WsParams { n, k, beta }.validate()?;
    }
    let lattice = ring_lattice(n, k)?;
    let l0 = char_path_length(&lattice)?.mean;
    let c0 = clustering_global(&lattice);
    if c0 == 0.0 {
        return Err(GraphError::Degenerate(format!(
            "lattice with k = {k} has no triangles; C(beta)/C(0) is undefined"
        )));
    }

    let jobs: Vec<(usize, usize)> = (0..beta_grid.len())
        .flat_map(|b| (0..trials).map(move |i| (b, i)))
        .collect();
    let samples: Vec<(f64, f64)> = jobs
        .par_iter()
        .map(|&(b, i)| {
            let params = WsParams { n, k, beta: beta_grid[b] };
            let g = watts_strogatz(&params, seed.with_stream((b * trials + i) as u64))?;
            Ok((char_path_length(&g)?.mean / l0, clustering_global(&g) / c0))
        })
        .collect::<Result<_>>()?;

    Ok(beta_grid
        .iter()
        .zip(samples.chunks(trials))
        .map(|(&beta, chunk)| WsCurvePoint {
            beta,
            l_ratio: chunk.iter().map(|s| s.0).sum::<f64>() / trials as f64,
            c_ratio: chunk.iter().map(|s| s.1).sum::<f64>() / trials as f64,
            trials,
        })
        .collect())
}

pub fn ws_curves_csv(points: &[WsCurvePoint]) -> String {
    let mut out = String::from("beta,L_ratio,C_ratio,trials\n");
    for p in points {
        writeln!(out, "{},{},{},{}", p.beta, p.l_ratio, p.c_ratio, p.trials).unwrap();
    }
    out
}
