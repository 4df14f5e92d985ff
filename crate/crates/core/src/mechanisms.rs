//! Static-threshold mechanisms for specific matroid classes.
//!
//! A `PreparedMechanism` is everything that can be computed before any value
//! arrives: orientations, partitions, per-class thresholds, claimed
//! competitive ratio.  Drawing from it materializes one `ThresholdVector`
//! (thresholds are the only thing the gambler ever sees), together with the
//! random choices made, so that any draw can be replayed exactly.  The draw
//! space of every mechanism here is finite, which lets small instances be
//! evaluated by exhaustive enumeration instead of sampling.

use rand_chacha::ChaCha8Rng;

use crate::dist::Dist;
use crate::error::Error;
use crate::exante::ExAnteRelaxation;
use crate::graph::{DisjointSet, Graph};
use crate::matroid::Matroid;
use crate::orient::{orient_graph, orient_hypergraph};
use crate::partition::{partition_into, Partition, PartitionOutcome};
use crate::set::ItemSet;
use crate::thresholds::{single_item_thresholds, Threshold, ThresholdVector};

/// Vertex-count cap for the edge-connectivity precheck; larger graphs are
/// trusted and rely on partition feasibility instead.
const CONNECTIVITY_CHECK_LIMIT: usize = 64;

/// Density-hypothesis sweep cap (subset enumeration).
const DENSITY_CHECK_LIMIT: usize = 12;

/// The random choices behind one materialized threshold vector.
#[derive(Clone, Debug, PartialEq)]
pub enum DrawChoices {
    /// Deterministic mechanism.
    None,
    /// Per-item keep coins plus a uniform vertex (or coordinate) cut.
    CoinsAndCut { kept: ItemSet, cut: ItemSet },
    /// One branch of a finite uniform or weighted choice.
    Part { index: usize },
    /// A weighted branch that itself drew.
    Branch { index: usize, inner: Box<DrawChoices> },
    /// Independent per-stage draws of a composite mechanism.
    Stages(Vec<DrawChoices>),
}

/// One materialized run of a mechanism: the seed context and the choices.
#[derive(Clone, Debug)]
pub struct MechanismDraw {
    pub seed: u64,
    pub trial: u64,
    pub choices: DrawChoices,
}

/// A mechanism after all value-independent preprocessing.
#[derive(Clone, Debug)]
pub enum PreparedMechanism {
    /// A single fixed threshold vector.
    Fixed { thresholds: ThresholdVector, ratio: f64 },
    /// Oriented simple graph with per-edge keep coins and a uniform vertex
    /// cut; surviving edges expose their activation rules.
    Graphic {
        edges: Vec<(usize, usize)>,
        vertex_count: usize,
        head: Vec<usize>,
        rules: Vec<Threshold>,
        ratio: f64,
    },
    /// Oriented hypergraph of representation-column supports with keep
    /// probability 1/(2k) and a uniform coordinate cut.
    KSparse {
        supports: Vec<Option<Vec<usize>>>,
        vertex_count: usize,
        head: Vec<usize>,
        k: usize,
        rules: Vec<Threshold>,
        ratio: f64,
    },
    /// A finite weighted choice among explicit threshold vectors.
    Finite {
        branches: Vec<(f64, ThresholdVector)>,
        ratio: f64,
    },
    /// A weighted mixture of sub-mechanisms.
    Mixture {
        branches: Vec<(f64, PreparedMechanism)>,
        ratio: f64,
    },
    /// Independent stages over disjoint item sets; threshold vectors merge.
    Composite {
        stages: Vec<PreparedMechanism>,
        n: usize,
        ratio: f64,
    },
    /// A mechanism over a smaller ground set embedded into a larger one;
    /// unmapped items never accept.
    Remapped {
        inner: Box<PreparedMechanism>,
        map: Vec<usize>,
        n: usize,
    },
    /// A mechanism with some items pinned shut: everything outside `kept`
    /// never accepts, whatever the inner mechanism says.
    Restricted {
        inner: Box<PreparedMechanism>,
        kept: ItemSet,
    },
}

impl PreparedMechanism {
    pub fn ground_size(&self) -> usize {
        match self {
            PreparedMechanism::Fixed { thresholds, .. } => thresholds.len(),
            PreparedMechanism::Graphic { rules, .. } => rules.len(),
            PreparedMechanism::KSparse { rules, .. } => rules.len(),
            PreparedMechanism::Finite { branches, .. } => branches[0].1.len(),
            PreparedMechanism::Mixture { branches, .. } => branches[0].1.ground_size(),
            PreparedMechanism::Composite { n, .. } => *n,
            PreparedMechanism::Remapped { n, .. } => *n,
            PreparedMechanism::Restricted { inner, .. } => inner.ground_size(),
        }
    }

    pub fn claimed_ratio(&self) -> f64 {
        match self {
            PreparedMechanism::Fixed { ratio, .. }
            | PreparedMechanism::Graphic { ratio, .. }
            | PreparedMechanism::KSparse { ratio, .. }
            | PreparedMechanism::Finite { ratio, .. }
            | PreparedMechanism::Mixture { ratio, .. }
            | PreparedMechanism::Composite { ratio, .. } => *ratio,
            PreparedMechanism::Remapped { inner, .. }
            | PreparedMechanism::Restricted { inner, .. } => inner.claimed_ratio(),
        }
    }

    /// Weakens the recorded competitive ratio.  A mechanism that is
    /// α-competitive is also β-competitive for any β ≥ α, so only a larger
    /// value is accepted.
    pub fn relax_ratio(&mut self, new_ratio: f64) {
        match self {
            PreparedMechanism::Fixed { ratio, .. }
            | PreparedMechanism::Graphic { ratio, .. }
            | PreparedMechanism::KSparse { ratio, .. }
            | PreparedMechanism::Finite { ratio, .. }
            | PreparedMechanism::Mixture { ratio, .. }
            | PreparedMechanism::Composite { ratio, .. } => {
                assert!(new_ratio >= *ratio, "a ratio claim can only be weakened");
                *ratio = new_ratio;
            }
            PreparedMechanism::Remapped { inner, .. }
            | PreparedMechanism::Restricted { inner, .. } => inner.relax_ratio(new_ratio),
        }
    }

    /// Embeds this mechanism into a ground set of `n` items, item `j` of the
    /// inner mechanism becoming item `map[j]`; all other items never accept.
    pub fn lift_to(self, n: usize, map: &[usize]) -> PreparedMechanism {
        assert_eq!(map.len(), self.ground_size());
        assert!(map.iter().all(|&i| i < n));
        PreparedMechanism::Remapped {
            inner: Box::new(self),
            map: map.to_vec(),
            n,
        }
    }

    /// Samples one threshold vector, recording the choices for replay.
    pub fn draw(&self, rng: &mut ChaCha8Rng) -> (ThresholdVector, DrawChoices) {
        use rand::Rng;
        match self {
            PreparedMechanism::Fixed { thresholds, .. } => {
                (thresholds.clone(), DrawChoices::None)
            }
            PreparedMechanism::Graphic { edges, vertex_count, .. } => {
                let mut kept = ItemSet::new();
                for e in 0..edges.len() {
                    if rng.gen::<f64>() < 0.5 {
                        kept.insert(e);
                    }
                }
                let mut cut = ItemSet::new();
                for v in 0..*vertex_count {
                    if rng.gen::<f64>() < 0.5 {
                        cut.insert(v);
                    }
                }
                let choices = DrawChoices::CoinsAndCut { kept, cut };
                (self.thresholds_for(&choices).unwrap(), choices)
            }
            PreparedMechanism::KSparse { supports, vertex_count, k, .. } => {
                let keep_prob = 1.0 / (2.0 * *k as f64);
                let mut kept = ItemSet::new();
                for (t, support) in supports.iter().enumerate() {
                    if support.is_some() && rng.gen::<f64>() < keep_prob {
                        kept.insert(t);
                    }
                }
                let mut cut = ItemSet::new();
                for v in 0..*vertex_count {
                    if rng.gen::<f64>() < 0.5 {
                        cut.insert(v);
                    }
                }
                let choices = DrawChoices::CoinsAndCut { kept, cut };
                (self.thresholds_for(&choices).unwrap(), choices)
            }
            PreparedMechanism::Finite { branches, .. } => {
                let index = weighted_pick(rng, branches.iter().map(|(w, _)| *w));
                (branches[index].1.clone(), DrawChoices::Part { index })
            }
            PreparedMechanism::Mixture { branches, .. } => {
                let index = weighted_pick(rng, branches.iter().map(|(w, _)| *w));
                let (tv, inner) = branches[index].1.draw(rng);
                (tv, DrawChoices::Branch { index, inner: Box::new(inner) })
            }
            PreparedMechanism::Composite { stages, n, .. } => {
                let mut tv = ThresholdVector::all_never(*n, "composite");
                let mut all = Vec::with_capacity(stages.len());
                for stage in stages {
                    let (stage_tv, choices) = stage.draw(rng);
                    merge_into(&mut tv, &stage_tv);
                    all.push(choices);
                }
                (tv, DrawChoices::Stages(all))
            }
            PreparedMechanism::Remapped { inner, map, n } => {
                let (inner_tv, choices) = inner.draw(rng);
                (remap(&inner_tv, map, *n), choices)
            }
            PreparedMechanism::Restricted { inner, kept } => {
                let (inner_tv, choices) = inner.draw(rng);
                (mask(&inner_tv, kept), choices)
            }
        }
    }

    /// Deterministically rebuilds the threshold vector a draw produced.
    pub fn thresholds_for(&self, choices: &DrawChoices) -> Result<ThresholdVector, Error> {
        match (self, choices) {
            (PreparedMechanism::Fixed { thresholds, .. }, DrawChoices::None) => {
                Ok(thresholds.clone())
            }
            (
                PreparedMechanism::Graphic { edges, head, rules, .. },
                DrawChoices::CoinsAndCut { kept, cut },
            ) => {
                let items = edges
                    .iter()
                    .enumerate()
                    .map(|(e, &(u, v))| {
                        let h = head[e];
                        let tail = u + v - h;
                        if kept.contains(e) && cut.contains(tail) && !cut.contains(h) {
                            rules[e]
                        } else {
                            Threshold::never()
                        }
                    })
                    .collect();
                Ok(ThresholdVector { items, source: "graphic".into() })
            }
            (
                PreparedMechanism::KSparse { supports, head, rules, .. },
                DrawChoices::CoinsAndCut { kept, cut },
            ) => {
                let items = supports
                    .iter()
                    .enumerate()
                    .map(|(t, support)| match support {
                        Some(vs) => {
                            let h = head[t];
                            let survives = kept.contains(t)
                                && !cut.contains(h)
                                && vs.iter().all(|&v| v == h || cut.contains(v));
                            if survives {
                                rules[t]
                            } else {
                                Threshold::never()
                            }
                        }
                        None => Threshold::never(),
                    })
                    .collect();
                Ok(ThresholdVector { items, source: "k-sparse".into() })
            }
            (PreparedMechanism::Finite { branches, .. }, DrawChoices::Part { index }) => branches
                .get(*index)
                .map(|(_, tv)| tv.clone())
                .ok_or_else(|| Error::input("draw names a missing branch")),
            (PreparedMechanism::Mixture { branches, .. }, DrawChoices::Branch { index, inner }) => {
                branches
                    .get(*index)
                    .ok_or_else(|| Error::input("draw names a missing branch"))?
                    .1
                    .thresholds_for(inner)
            }
            (PreparedMechanism::Composite { stages, n, .. }, DrawChoices::Stages(all)) => {
                if all.len() != stages.len() {
                    return Err(Error::input("draw stage count mismatch"));
                }
                let mut tv = ThresholdVector::all_never(*n, "composite");
                for (stage, choices) in stages.iter().zip(all) {
                    merge_into(&mut tv, &stage.thresholds_for(choices)?);
                }
                Ok(tv)
            }
            (PreparedMechanism::Remapped { inner, map, n }, _) => {
                Ok(remap(&inner.thresholds_for(choices)?, map, *n))
            }
            (PreparedMechanism::Restricted { inner, kept }, _) => {
                Ok(mask(&inner.thresholds_for(choices)?, kept))
            }
            _ => Err(Error::input("draw does not match the mechanism's shape")),
        }
    }

    /// Number of distinct draws, when it fits in a u128.
    pub fn count_draws(&self) -> Option<u128> {
        match self {
            PreparedMechanism::Fixed { .. } => Some(1),
            PreparedMechanism::Graphic { edges, vertex_count, .. } => {
                let bits = edges.len() + *vertex_count;
                (bits < 128).then(|| 1u128 << bits)
            }
            PreparedMechanism::KSparse { supports, vertex_count, .. } => {
                let coins = supports.iter().filter(|s| s.is_some()).count();
                let bits = coins + *vertex_count;
                (bits < 128).then(|| 1u128 << bits)
            }
            PreparedMechanism::Finite { branches, .. } => Some(branches.len() as u128),
            PreparedMechanism::Mixture { branches, .. } => {
                let mut total: u128 = 0;
                for (_, b) in branches {
                    total = total.checked_add(b.count_draws()?)?;
                }
                Some(total)
            }
            PreparedMechanism::Composite { stages, .. } => {
                let mut total: u128 = 1;
                for s in stages {
                    total = total.checked_mul(s.count_draws()?)?;
                }
                Some(total)
            }
            PreparedMechanism::Remapped { inner, .. }
            | PreparedMechanism::Restricted { inner, .. } => inner.count_draws(),
        }
    }

    /// Visits every possible draw with its probability.  Callers are expected
    /// to have checked `count_draws` against their budget.
    pub fn for_each_draw(&self, f: &mut dyn FnMut(f64, &ThresholdVector)) {
        match self {
            PreparedMechanism::Fixed { thresholds, .. } => f(1.0, thresholds),
            PreparedMechanism::Graphic { edges, vertex_count, .. } => {
                let m = edges.len();
                let nv = *vertex_count;
                let prob = 0.5f64.powi((m + nv) as i32);
                for kept_mask in 0u64..(1 << m) {
                    let kept = ItemSet::from_bits(kept_mask, m);
                    for cut_mask in 0u64..(1 << nv) {
                        let cut = ItemSet::from_bits(cut_mask, nv);
                        let choices = DrawChoices::CoinsAndCut { kept: kept.clone(), cut };
                        let tv = self.thresholds_for(&choices).unwrap();
                        f(prob, &tv);
                    }
                }
            }
            PreparedMechanism::KSparse { supports, vertex_count, k, .. } => {
                let coins: Vec<usize> = supports
                    .iter()
                    .enumerate()
                    .filter_map(|(t, s)| s.as_ref().map(|_| t))
                    .collect();
                let keep = 1.0 / (2.0 * *k as f64);
                let nv = *vertex_count;
                let cut_prob = 0.5f64.powi(nv as i32);
                for kept_mask in 0u64..(1 << coins.len()) {
                    let mut kept = ItemSet::new();
                    let mut coin_prob = 1.0;
                    for (bit, &t) in coins.iter().enumerate() {
                        if kept_mask >> bit & 1 == 1 {
                            kept.insert(t);
                            coin_prob *= keep;
                        } else {
                            coin_prob *= 1.0 - keep;
                        }
                    }
                    for cut_mask in 0u64..(1 << nv) {
                        let cut = ItemSet::from_bits(cut_mask, nv);
                        let choices = DrawChoices::CoinsAndCut { kept: kept.clone(), cut };
                        let tv = self.thresholds_for(&choices).unwrap();
                        f(coin_prob * cut_prob, &tv);
                    }
                }
            }
            PreparedMechanism::Finite { branches, .. } => {
                for (w, tv) in branches {
                    f(*w, tv);
                }
            }
            PreparedMechanism::Mixture { branches, .. } => {
                for (w, b) in branches {
                    b.for_each_draw(&mut |p, tv| f(w * p, tv));
                }
            }
            PreparedMechanism::Composite { stages, n, .. } => {
                let base = ThresholdVector::all_never(*n, "composite");
                fn rec(
                    stages: &[PreparedMechanism],
                    acc_prob: f64,
                    acc_tv: &ThresholdVector,
                    f: &mut dyn FnMut(f64, &ThresholdVector),
                ) {
                    match stages.split_first() {
                        None => f(acc_prob, acc_tv),
                        Some((stage, rest)) => {
                            stage.for_each_draw(&mut |p, tv| {
                                let mut merged = acc_tv.clone();
                                merge_into(&mut merged, tv);
                                rec(rest, acc_prob * p, &merged, f);
                            });
                        }
                    }
                }
                rec(stages, 1.0, &base, f);
            }
            PreparedMechanism::Remapped { inner, map, n } => {
                inner.for_each_draw(&mut |p, tv| f(p, &remap(tv, map, *n)));
            }
            PreparedMechanism::Restricted { inner, kept } => {
                inner.for_each_draw(&mut |p, tv| f(p, &mask(tv, kept)));
            }
        }
    }
}

fn weighted_pick(rng: &mut ChaCha8Rng, weights: impl Iterator<Item = f64>) -> usize {
    use rand::Rng;
    let r = rng.gen::<f64>();
    let mut cum = 0.0;
    let mut last = 0;
    for (i, w) in weights.enumerate() {
        cum += w;
        last = i;
        if r < cum {
            return i;
        }
    }
    last
}

/// Overwrites entries of `out` with the non-never entries of `tv`.  Stages of
/// a composite own disjoint item sets, so no live entry is ever clobbered.
fn merge_into(out: &mut ThresholdVector, tv: &ThresholdVector) {
    debug_assert_eq!(out.len(), tv.len());
    for (slot, t) in out.items.iter_mut().zip(&tv.items) {
        if !t.is_never() {
            debug_assert!(slot.is_never());
            *slot = *t;
        }
    }
}

fn remap(tv: &ThresholdVector, map: &[usize], n: usize) -> ThresholdVector {
    let mut out = ThresholdVector::all_never(n, tv.source.clone());
    for (j, t) in tv.items.iter().enumerate() {
        out.items[map[j]] = *t;
    }
    out
}

fn mask(tv: &ThresholdVector, kept: &ItemSet) -> ThresholdVector {
    let items = tv
        .items
        .iter()
        .enumerate()
        .map(|(i, t)| if kept.contains(i) { *t } else { Threshold::never() })
        .collect();
    ThresholdVector { items, source: tv.source.clone() }
}

/// The rank-1 mechanism: one shared median-of-maximum threshold.
pub fn single_item(dists: &[Dist]) -> Result<PreparedMechanism, Error> {
    if dists.is_empty() {
        return Err(Error::input("at least one item required"));
    }
    Ok(PreparedMechanism::Fixed {
        thresholds: single_item_thresholds(dists),
        ratio: 2.0,
    })
}

/// A caller-supplied threshold vector with its claimed ratio.
pub fn fixed(thresholds: ThresholdVector, ratio: f64) -> PreparedMechanism {
    PreparedMechanism::Fixed { thresholds, ratio }
}

/// The forest-matroid mechanism on a simple graph: orient edges with
/// fractional indegree ≤ 2, keep each edge with probability 1/2, draw a
/// uniform vertex cut, and threshold the survivors (tail inside the cut,
/// head outside) with their activation rules.  Each edge survives with
/// probability exactly 1/8.
pub fn graphic(g: &Graph, relax: &ExAnteRelaxation) -> Result<PreparedMechanism, Error> {
    if !g.is_simple() {
        return Err(Error::input(
            "graph has parallel edges or self-loops; use the 2-column-sparse mechanism (k = 2)",
        ));
    }
    if relax.len() != g.edge_count() {
        return Err(Error::input("relaxation length must match the edge count"));
    }
    let head = orient_graph(g, &relax.p)?;
    Ok(PreparedMechanism::Graphic {
        edges: g.edges().to_vec(),
        vertex_count: g.vertex_count(),
        head,
        rules: relax.activation_rules(),
        ratio: 16.0,
    })
}

/// The k-column-sparse mechanism: hyperedges are the supports of the
/// representation columns, oriented with load ≤ k; keep coin 1/(2k) and a
/// uniform coordinate cut (head outside, tails inside).  Survival probability
/// of column t is (1/(2k))·(1/2)^|e_t|.
pub fn k_sparse(m: &Matroid, k: usize, relax: &ExAnteRelaxation) -> Result<PreparedMechanism, Error> {
    if k == 0 {
        return Err(Error::input("sparsity bound must be positive"));
    }
    let rep = m
        .representation()
        .ok_or_else(|| Error::input("the k-sparse mechanism needs a vector representation"))?;
    if relax.len() != rep.cols() {
        return Err(Error::input("relaxation length must match the column count"));
    }
    let mut supports: Vec<Option<Vec<usize>>> = Vec::with_capacity(rep.cols());
    for t in 0..rep.cols() {
        let vs: Vec<usize> = (0..rep.rows()).filter(|&i| rep.get(i, t) != 0).collect();
        if vs.len() > k {
            return Err(Error::input(format!(
                "column {t} has {} nonzero entries, more than the sparsity bound {k}",
                vs.len()
            )));
        }
        supports.push(if vs.is_empty() { None } else { Some(vs) });
    }
    let live: Vec<usize> = (0..rep.cols()).filter(|&t| supports[t].is_some()).collect();
    let live_edges: Vec<Vec<usize>> = live
        .iter()
        .map(|&t| supports[t].clone().unwrap())
        .collect();
    let live_p: Vec<f64> = live.iter().map(|&t| relax.p[t]).collect();
    let live_head = orient_hypergraph(&live_edges, rep.rows(), &live_p, k)?;
    let mut head = vec![usize::MAX; rep.cols()];
    for (j, &t) in live.iter().enumerate() {
        head[t] = live_head[j];
    }
    let mut rules = relax.activation_rules();
    for t in 0..rep.cols() {
        if supports[t].is_none() {
            rules[t] = Threshold::never();
        }
    }
    let ratio = ((1usize << (k + 2)) * k) as f64;
    Ok(PreparedMechanism::KSparse {
        supports,
        vertex_count: rep.rows(),
        head,
        k,
        rules,
        ratio,
    })
}

/// Splits `g` into connected components and returns, for each, the sorted
/// vertex list and the global edge ids inside it.
fn component_pieces(g: &Graph) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut ds = DisjointSet::new(g.vertex_count());
    for &(u, v) in g.edges() {
        ds.union(u, v);
    }
    let mut roots: Vec<usize> = Vec::new();
    let mut verts: Vec<Vec<usize>> = Vec::new();
    let mut comp_of = vec![usize::MAX; g.vertex_count()];
    for v in 0..g.vertex_count() {
        let r = ds.find(v);
        let idx = match roots.iter().position(|&x| x == r) {
            Some(i) => i,
            None => {
                roots.push(r);
                verts.push(Vec::new());
                roots.len() - 1
            }
        };
        comp_of[v] = idx;
        verts[idx].push(v);
    }
    let mut edges: Vec<Vec<usize>> = vec![Vec::new(); roots.len()];
    for (e, &(u, _)) in g.edges().iter().enumerate() {
        edges[comp_of[u]].push(e);
    }
    verts.into_iter().zip(edges).collect()
}

/// Verifies every component of `g` is 3-edge-connected (desk-scale graphs
/// only) and returns a violating cut when one exists.
fn check_three_edge_connected(g: &Graph) -> Result<(), Error> {
    if g.vertex_count() > CONNECTIVITY_CHECK_LIMIT {
        return Ok(());
    }
    for (verts, edge_ids) in component_pieces(g) {
        if verts.len() < 2 {
            continue;
        }
        let local_of: std::collections::HashMap<usize, usize> =
            verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let local_edges: Vec<(usize, usize)> = edge_ids
            .iter()
            .map(|&e| {
                let (u, v) = g.edge(e);
                (local_of[&u], local_of[&v])
            })
            .collect();
        let sub = Graph::new(verts.len(), local_edges).expect("component subgraph");
        let (lambda, cut) = sub.edge_connectivity()?;
        if lambda < 3 {
            let global_cut: ItemSet = cut.iter().map(|le| edge_ids[le]).collect();
            return Err(Error::precondition(format!(
                "graph is not 3-edge-connected: cut {global_cut:?} has {lambda} edges"
            )));
        }
    }
    Ok(())
}

fn feasible_partition(m: &Matroid, k: usize) -> Result<Partition, Error> {
    match partition_into(m, k)? {
        PartitionOutcome::Feasible(p) => Ok(p),
        PartitionOutcome::Infeasible { witness } => Err(Error::infeasible(match witness {
            Some(s) => format!("no cover by {k} independent sets: witness {s:?}"),
            None => format!("no cover by {k} independent sets"),
        })),
    }
}

/// The 3-edge-connected bond-matroid mechanism: partition the edges into
/// three sets whose complements each stay connected, pick one uniformly, and
/// accept everything in it.  The accepted set is always feasible, so the
/// gambler banks exactly one third of the total edge value in expectation.
pub fn cographic_3ec(g: &Graph) -> Result<PreparedMechanism, Error> {
    check_three_edge_connected(g)?;
    let m = Matroid::cographic(g.clone());
    let partition = feasible_partition(&m, 3)?;
    let n = g.edge_count();
    let branches = partition
        .parts
        .iter()
        .map(|part| {
            let items = (0..n)
                .map(|e| {
                    if part.contains(e) {
                        Threshold::at_least(0.0)
                    } else {
                        Threshold::never()
                    }
                })
                .collect();
            (1.0 / 3.0, ThresholdVector { items, source: "cographic-3ec".into() })
        })
        .collect();
    Ok(PreparedMechanism::Finite { branches, ratio: 3.0 })
}

/// The general bond-matroid mechanism: drop bridges, group the remaining
/// edges into parallel classes of the bond matroid (2-cut classes), cosimplify
/// down to the 3-edge-connected quotient, partition that quotient into three
/// feasible sets, pick one uniformly, and run the rank-1 rule inside each
/// selected class.
pub fn cographic(g: &Graph, dists: &[Dist]) -> Result<PreparedMechanism, Error> {
    bond_mechanism(&Matroid::cographic(g.clone()), dists)
}

/// Rank-oracle form of the bond mechanism, usable on any representation of a
/// cographic matroid (for example a binary minor inside a larger host).  The
/// partition into three feasible sets is what the cographic structure
/// guarantees; on other inputs it may simply be infeasible.
pub fn bond_mechanism(m: &Matroid, dists: &[Dist]) -> Result<PreparedMechanism, Error> {
    let n = m.size();
    if dists.len() != n {
        return Err(Error::input("one distribution per element"));
    }
    let classes = m.parallel_classes();
    let simp = m.simplify()?;
    let partition = feasible_partition(&simp.matroid, 3)?;
    // Class lookup by its representative (minimum) element.
    let class_rules: Vec<(ItemSet, Threshold)> = classes
        .iter()
        .map(|class| {
            let class_dists: Vec<Dist> = class.iter().map(|e| dists[e].clone()).collect();
            let tv = single_item_thresholds(&class_dists);
            (class.clone(), tv.items[0])
        })
        .collect();
    let branches = partition
        .parts
        .iter()
        .map(|part| {
            let mut items = vec![Threshold::never(); n];
            for j in part.iter() {
                let rep = simp.back[j];
                let (class, rule) = class_rules
                    .iter()
                    .find(|(c, _)| c.contains(rep))
                    .expect("representative belongs to a class");
                for e in class.iter() {
                    items[e] = *rule;
                }
            }
            (1.0 / 3.0, ThresholdVector { items, source: "cographic".into() })
        })
        .collect();
    Ok(PreparedMechanism::Finite { branches, ratio: 6.0 })
}

/// The density-γ mechanism: partition the ground set into γ independent sets,
/// pick one uniformly, accept everything in it.
pub fn gamma_sparse(m: &Matroid, gamma: usize) -> Result<PreparedMechanism, Error> {
    if gamma == 0 {
        return Err(Error::input("gamma must be positive"));
    }
    if m.size() <= DENSITY_CHECK_LIMIT {
        for mask in 1u64..(1 << m.size()) {
            let s = ItemSet::from_bits(mask, m.size());
            if s.len() > gamma * m.rank_set(&s) {
                return Err(Error::precondition(format!(
                    "density hypothesis fails: {s:?} has {} elements but rank {}",
                    s.len(),
                    m.rank_set(&s)
                )));
            }
        }
    }
    let partition = feasible_partition(m, gamma)?;
    if !partition.uncoverable.is_empty() {
        return Err(Error::infeasible(format!(
            "loops {:?} violate the density hypothesis",
            partition.uncoverable
        )));
    }
    let n = m.size();
    let branches = partition
        .parts
        .iter()
        .map(|part| {
            let items = (0..n)
                .map(|e| {
                    if part.contains(e) {
                        Threshold::at_least(0.0)
                    } else {
                        Threshold::never()
                    }
                })
                .collect();
            (
                1.0 / gamma as f64,
                ThresholdVector { items, source: "gamma-sparse".into() },
            )
        })
        .collect();
    Ok(PreparedMechanism::Finite { branches, ratio: gamma as f64 })
}

/// Picks one parallel class uniformly and runs the rank-1 rule on it; with c
/// classes this is 2c-competitive.  Used for small dense matroids such as
/// parallel extensions of a fixed base.
pub fn class_uniform(m: &Matroid, dists: &[Dist]) -> Result<PreparedMechanism, Error> {
    if dists.len() != m.size() {
        return Err(Error::input("one distribution per element"));
    }
    let classes = m.parallel_classes();
    if classes.is_empty() {
        return Err(Error::input("matroid has no parallel classes (all loops)"));
    }
    let n = m.size();
    let weight = 1.0 / classes.len() as f64;
    let branches = classes
        .iter()
        .map(|class| {
            let class_dists: Vec<Dist> = class.iter().map(|e| dists[e].clone()).collect();
            let rule = single_item_thresholds(&class_dists).items[0];
            let mut items = vec![Threshold::never(); n];
            for e in class.iter() {
                items[e] = rule;
            }
            (weight, ThresholdVector { items, source: "class-uniform".into() })
        })
        .collect();
    Ok(PreparedMechanism::Finite {
        branches,
        ratio: 2.0 * classes.len() as f64,
    })
}
