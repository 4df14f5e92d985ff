//! Serde-backed experiment descriptions: matroids, value distributions,
//! mechanism choices, and arrival-order strategies, with builders that
//! translate them into live objects.

use serde::Deserialize;

use crate::composition;
use crate::decomposition::{BagClass, SeymourNode, SeymourTree};
use crate::delta::SumKind;
use crate::dist::Dist;
use crate::error::Error;
use crate::exante::estimate_ex_ante;
use crate::gf::GfMatrix;
use crate::graph::Graph;
use crate::harness::OrderStrategy;
use crate::matroid::Matroid;
use crate::mechanisms::{self, PreparedMechanism};

/// A matroid instance description.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MatroidSpec {
    Graphic { vertices: usize, edges: Vec<(usize, usize)> },
    Cographic { vertices: usize, edges: Vec<(usize, usize)> },
    Uniform { n: usize, k: usize },
    Vector { p: u32, columns: Vec<Vec<u32>> },
    Explicit { n: usize, bases: Vec<Vec<usize>> },
}

impl MatroidSpec {
    pub fn build(&self) -> Result<Matroid, Error> {
        match self {
            MatroidSpec::Graphic { vertices, edges } => {
                Ok(Matroid::graphic(Graph::new(*vertices, edges.clone())?))
            }
            MatroidSpec::Cographic { vertices, edges } => {
                Ok(Matroid::cographic(Graph::new(*vertices, edges.clone())?))
            }
            MatroidSpec::Uniform { n, k } => Matroid::uniform(*n, *k),
            MatroidSpec::Vector { p, columns } => Matroid::vector_from_columns(*p, columns),
            MatroidSpec::Explicit { n, bases } => {
                let mut sets = Vec::with_capacity(bases.len());
                for b in bases {
                    let mut s = crate::set::ItemSet::new();
                    for &i in b {
                        if i >= *n {
                            return Err(Error::input(format!(
                                "basis element {i} outside the {n}-element ground set"
                            )));
                        }
                        s.insert(i);
                    }
                    sets.push(s);
                }
                Matroid::from_bases(*n, sets)
            }
        }
    }
}

/// A per-item value distribution description.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum DistSpec {
    Point { value: f64 },
    Discrete { values: Vec<f64>, probs: Vec<f64> },
    Uniform { lo: f64, hi: f64 },
    Exponential { rate: f64 },
    Pareto { shape: f64, cap: f64 },
}

impl DistSpec {
    pub fn build(&self) -> Result<Dist, Error> {
        match self {
            DistSpec::Point { value } => Dist::point(*value),
            DistSpec::Discrete { values, probs } => Dist::discrete(values, probs),
            DistSpec::Uniform { lo, hi } => Dist::uniform(*lo, *hi),
            DistSpec::Exponential { rate } => Dist::exponential(*rate),
            DistSpec::Pareto { shape, cap } => Dist::pareto(*shape, *cap),
        }
    }
}

fn default_relax_trials() -> usize {
    10_000
}

/// Which threshold mechanism to prepare.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "mechanism", rename_all = "lowercase", deny_unknown_fields)]
pub enum MechanismSpec {
    Single,
    Graphic {
        #[serde(default = "default_relax_trials")]
        relax_trials: usize,
    },
    KSparse {
        k: usize,
        #[serde(default = "default_relax_trials")]
        relax_trials: usize,
    },
    Cographic,
    Cographic3ec,
    Gamma { gamma: usize },
    Composed {
        tree: SeymourTreeSpec,
        #[serde(default = "default_relax_trials")]
        relax_trials: usize,
    },
}

impl MechanismSpec {
    pub fn build(
        &self,
        m: &Matroid,
        dists: &[Dist],
        seed: u64,
    ) -> Result<PreparedMechanism, Error> {
        match self {
            MechanismSpec::Single => mechanisms::single_item(dists),
            MechanismSpec::Graphic { relax_trials } => {
                let g = m
                    .graph()
                    .ok_or_else(|| Error::input("the graphic mechanism needs a graph instance"))?;
                let relax = estimate_ex_ante(m, dists, *relax_trials, seed)?;
                mechanisms::graphic(g, &relax)
            }
            MechanismSpec::KSparse { k, relax_trials } => {
                let relax = estimate_ex_ante(m, dists, *relax_trials, seed)?;
                mechanisms::k_sparse(m, *k, &relax)
            }
            MechanismSpec::Cographic => mechanisms::bond_mechanism(m, dists),
            MechanismSpec::Cographic3ec => {
                let g = m.graph().ok_or_else(|| {
                    Error::input("the bond complement mechanism needs a graph instance")
                })?;
                mechanisms::cographic_3ec(g)
            }
            MechanismSpec::Gamma { gamma } => mechanisms::gamma_sparse(m, *gamma),
            MechanismSpec::Composed { tree, relax_trials } => {
                let st = tree.build()?;
                composition::regular_mechanism(m, &st, dists, *relax_trials, seed)
            }
        }
    }
}

/// Arrival-order strategy description.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum OrderSpec {
    Fixed { permutation: Vec<usize> },
    Uniform,
    Adversarial,
    Exhaustive,
}

impl OrderSpec {
    pub fn build(&self) -> OrderStrategy {
        match self {
            OrderSpec::Fixed { permutation } => OrderStrategy::Fixed(permutation.clone()),
            OrderSpec::Uniform => OrderStrategy::UniformRandom,
            OrderSpec::Adversarial => OrderStrategy::AdversarialPool,
            OrderSpec::Exhaustive => OrderStrategy::Exhaustive,
        }
    }
}

/// A node of a sum-decomposition tree: a class tag, the global item ids in
/// representation column order, and the binary representation columns.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeymourNodeSpec {
    pub id: usize,
    pub class: String,
    pub bag: Vec<usize>,
    pub columns: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeymourEdgeSpec {
    pub u: usize,
    pub v: usize,
    pub sum: u8,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeymourTreeSpec {
    pub nodes: Vec<SeymourNodeSpec>,
    pub edges: Vec<SeymourEdgeSpec>,
}

fn parse_bag_class(s: &str) -> Result<BagClass, Error> {
    match s {
        "graphic" => Ok(BagClass::Graphic),
        "cographic" => Ok(BagClass::Cographic),
        "r10x" => Ok(BagClass::R10Extension),
        other => Err(Error::input(format!("unknown bag class \"{other}\""))),
    }
}

impl SeymourTreeSpec {
    pub fn build(&self) -> Result<SeymourTree, Error> {
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            nodes.push(SeymourNode {
                id: n.id,
                class: parse_bag_class(&n.class)?,
                bag: n.bag.clone(),
                rep: GfMatrix::from_columns(2, &n.columns)?,
            });
        }
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let kind = match e.sum {
                1 => SumKind::One,
                2 => SumKind::Two,
                3 => SumKind::Three,
                other => {
                    return Err(Error::input(format!(
                        "sum label must be 1, 2, or 3, got {other}"
                    )))
                }
            };
            edges.push((e.u, e.v, kind));
        }
        Ok(SeymourTree { nodes, edges })
    }
}

fn default_trials() -> usize {
    10_000
}

fn default_order() -> OrderSpec {
    OrderSpec::Adversarial
}

/// A complete experiment: instance, values, mechanism, orders, and run
/// parameters.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub matroid: MatroidSpec,
    pub distributions: Vec<DistSpec>,
    pub mechanism: MechanismSpec,
    #[serde(default = "default_order")]
    pub order: OrderSpec,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Output stem: writes `<out>.json` and `<out>.csv` when set.
    #[serde(default)]
    pub out: Option<String>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|e| Error::input(format!("config: {e}")))
    }

    pub fn build_instance(&self) -> Result<(Matroid, Vec<Dist>), Error> {
        let m = self.matroid.build()?;
        if self.distributions.len() != m.size() {
            return Err(Error::input(format!(
                "matroid has {} elements but {} distributions were given",
                m.size(),
                self.distributions.len()
            )));
        }
        let dists = self
            .distributions
            .iter()
            .map(DistSpec::build)
            .collect::<Result<Vec<_>, _>>()?;
        Ok((m, dists))
    }

    pub fn build_mechanism(
        &self,
        m: &Matroid,
        dists: &[Dist],
    ) -> Result<PreparedMechanism, Error> {
        self.mechanism.build(m, dists, self.seed)
    }
}
