//! Reference ensembles for a graph characteristic and the empirical tail
//! probabilities used to judge how extreme an observed graph is.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{GraphError, Result};
use crate::generators::Model;
use crate::graph::Graph;
use crate::seed::Seed;
use crate::statistics::{char_path_length, clustering_global};

type Evaluator = dyn Fn(&Graph) -> Result<f64> + Send + Sync;

/// A named, deterministic graph statistic `η`.
#[derive(Clone)]
pub struct Characteristic {
    name: String,
    eval: Arc<Evaluator>,
}

impl Characteristic {
    pub fn new<F>(name: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&Graph) -> Result<f64> + Send + Sync + 'static,
    {
        Characteristic {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn edge_count() -> Self {
        Self::new("edges", |g| Ok(g.edge_count() as f64))
    }

    pub fn clustering() -> Self {
        Self::new("clustering", |g| Ok(clustering_global(g)))
    }

    pub fn path_length() -> Self {
        Self::new("path-length", |g| Ok(char_path_length(g)?.mean))
    }

    pub fn max_degree() -> Self {
        Self::new("max-degree", |g| Ok(g.max_degree() as f64))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn evaluate(&self, g: &Graph) -> Result<f64> {
        (self.eval)(g)
    }
}

impl fmt::Debug for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Characteristic").field(&self.name).finish()
    }
}

/// Characteristics addressable by name.
#[derive(Debug, Clone)]
pub struct Registry {
    entries: BTreeMap<String, Characteristic>,
}

impl Default for Registry {
    fn default() -> Self {
        let mut r = Registry {
            entries: BTreeMap::new(),
        };
        for c in [
            Characteristic::edge_count(),
            Characteristic::clustering(),
            Characteristic::path_length(),
            Characteristic::max_degree(),
        ] {
            r.register(c);
        }
        r
    }
}

impl Registry {
    /// Adds or replaces the characteristic under its own name.
    pub fn register(&mut self, c: Characteristic) {
        self.entries.insert(c.name.clone(), c);
    }

    pub fn get(&self, name: &str) -> Result<Characteristic> {
        self.entries.get(name).cloned().ok_or_else(|| {
            GraphError::invalid(format!(
                "unknown statistic {name:?}; known: {}",
                self.names().collect::<Vec<_>>().join(", ")
            ))
        })
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

#[derive(Debug, Clone)]
pub struct EnsembleSummary {
    pub model: Model,
    pub characteristic: Characteristic,
    /// `η(G_i)` for every member, ascending.
    pub values: Vec<f64>,
}

impl EnsembleSummary {
    pub fn count(&self) -> usize {
        self.values.len()
    }
}

/// Samples `count` graphs from `model`, member `i` on stream `i`, and records
/// the sorted characteristic values.
pub fn build_ensemble(
    model: &Model,
    count: usize,
    eta: &Characteristic,
    seed: Seed,
) -> Result<EnsembleSummary> {
    if count == 0 {
        return Err(GraphError::EmptyEnsemble);
    }
    model.validate()?;
    let mut values: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|i| eta.evaluate(&model.generate(seed.with_stream(i as u64))?))
        .collect::<Result<_>>()?;
    values.sort_by(f64::total_cmp);
    Ok(EnsembleSummary {
        model: *model,
        characteristic: eta.clone(),
        values,
    })
}

/// Fraction of ensemble values `<= t`.
pub fn tail_probability(summary: &EnsembleSummary, t: f64) -> Result<f64> {
    if summary.values.is_empty() {
        return Err(GraphError::EmptyEnsemble);
    }
    Ok(count_at_most(&summary.values, t) as f64 / summary.count() as f64)
}

fn count_at_most(sorted: &[f64], t: f64) -> usize {
    sorted.partition_point(|&v| v <= t)
}

fn count_at_least(sorted: &[f64], t: f64) -> usize {
    sorted.len() - sorted.partition_point(|&v| v < t)
}

/// Add-one empirical p-values of an observed value against an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct Significance {
    pub statistic: String,
    pub observed: f64,
    pub ensemble_count: usize,
    /// `(1 + #{values <= observed}) / (count + 1)`.
    pub p_lower: f64,
    /// `(1 + #{values >= observed}) / (count + 1)`.
    pub p_upper: f64,
    /// `min(1, 2 min(p_lower, p_upper))`.
    pub p_two_sided: f64,
}

impl Significance {
    pub const CSV_HEADER: &'static str =
        "statistic,observed,ensemble_count,p_lower,p_upper,p_two_sided";

    pub fn to_csv(&self) -> String {
        format!(
            "{}\n{},{},{},{},{},{}\n",
            Self::CSV_HEADER,
            self.statistic,
            self.observed,
            self.ensemble_count,
            self.p_lower,
            self.p_upper,
            self.p_two_sided
        )
    }
}

pub fn significance(summary: &EnsembleSummary, observed: &Graph) -> Result<Significance> {
    let value = summary.characteristic.evaluate(observed)?;
    significance_of_value(summary, value)
}

pub fn significance_of_value(summary: &EnsembleSummary, observed: f64) -> Result<Significance> {
    if summary.values.is_empty() {
        return Err(GraphError::EmptyEnsemble);
    }
    let denom = (summary.count() + 1) as f64;
    let p_lower = (1 + count_at_most(&summary.values, observed)) as f64 / denom;
    let p_upper = (1 + count_at_least(&summary.values, observed)) as f64 / denom;
    Ok(Significance {
        statistic: summary.characteristic.name().to_owned(),
        observed,
        ensemble_count: summary.count(),
        p_lower,
        p_upper,
        p_two_sided: (2.0 * p_lower.min(p_upper)).min(1.0),
    })
}
