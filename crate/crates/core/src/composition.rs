//! Guarantee transfers: restriction, contraction onto a well-structured
//! subset, composition along a tree decomposition, lift/projection chains,
//! and the binary-sum pipeline built from all of them.
//!
//! Each transfer takes a mechanism with a recorded competitive ratio and
//! produces one for a related matroid, with the new ratio computed by a fixed
//! formula: a lift costs 2α+2, a projection 3α, a depth-t chain 3^t·α, and a
//! tree composition over F_p with thickness bound k costs α·p^(k+1).

use std::collections::BTreeMap;

use crate::decomposition::{BagClass, DecompositionTree, SeymourTree};
use crate::dist::Dist;
use crate::error::Error;
use crate::exante::estimate_ex_ante;
use crate::gf::{intersect_spans, Echelon, GfMatrix};
use crate::matroid::Matroid;
use crate::mechanisms::{self, PreparedMechanism};
use crate::rng::stream;
use crate::set::ItemSet;
use crate::thresholds::{single_item_thresholds, Threshold, ThresholdVector};

/// Joint-outcome budget under which the evaluator enumerates exactly.
pub const EVAL_EXACT_LIMIT: u128 = 1_000_000;

/// Ground-size cap for the exhaustive independence-transfer audit.
const TRANSFER_CHECK_LIMIT: usize = 10;

/// Candidate budget for the functional search in `contraction_subset`.
const FUNCTIONAL_LIMIT: u128 = 4096;

/// Pins every item outside `kept` to the never-accept threshold; kept items
/// keep their rules.  Competitive guarantees survive restriction unchanged.
pub fn restrict_thresholds(tv: &ThresholdVector, kept: &ItemSet) -> ThresholdVector {
    let items = tv
        .items
        .iter()
        .enumerate()
        .map(|(i, t)| if kept.contains(i) { *t } else { Threshold::never() })
        .collect();
    ThresholdVector { items, source: tv.source.clone() }
}

/// Estimates the expected value a prophet extracts from restrictions of one
/// instance: exact enumeration when the joint support is small enough,
/// common-random-number Monte Carlo otherwise.
pub struct Evaluator<'a> {
    m: &'a Matroid,
    dists: &'a [Dist],
    trials: usize,
    seed: u64,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        m: &'a Matroid,
        dists: &'a [Dist],
        trials: usize,
        seed: u64,
    ) -> Result<Self, Error> {
        if dists.len() != m.size() {
            return Err(Error::input("one distribution per element"));
        }
        if trials == 0 {
            return Err(Error::input("evaluator needs a positive trial budget"));
        }
        Ok(Self { m, dists, trials, seed })
    }

    /// Expected maximum-weight independent set value when only items in
    /// `keep` carry their values and everything else is fixed at zero.
    pub fn restricted_prophet(&self, keep: &ItemSet) -> f64 {
        match self.exact(keep) {
            Some(v) => v,
            None => self.monte_carlo(keep),
        }
    }

    fn exact(&self, keep: &ItemSet) -> Option<f64> {
        let mut supports: Vec<(usize, Vec<(f64, f64)>)> = Vec::new();
        let mut joint: u128 = 1;
        for i in keep.iter() {
            let outcomes = self.dists[i].finite_outcomes()?;
            joint = joint.checked_mul(outcomes.len() as u128)?;
            if joint > EVAL_EXACT_LIMIT {
                return None;
            }
            supports.push((i, outcomes));
        }
        let mut weights = vec![0.0; self.m.size()];
        let mut slot = vec![0usize; supports.len()];
        let mut expectation = 0.0;
        loop {
            let mut prob = 1.0;
            for (s, (i, outcomes)) in slot.iter().zip(&supports) {
                let (value, weight) = outcomes[*s];
                weights[*i] = value;
                prob *= weight;
            }
            let best = self
                .m
                .greedy_max_weight(&weights)
                .expect("weights are finite and non-negative");
            expectation += prob * best.iter().map(|i| weights[i]).sum::<f64>();
            // Advance the odometer over joint outcomes.
            let mut pos = 0;
            loop {
                if pos == supports.len() {
                    return Some(expectation);
                }
                slot[pos] += 1;
                if slot[pos] < supports[pos].1.len() {
                    break;
                }
                slot[pos] = 0;
                pos += 1;
            }
        }
    }

    fn monte_carlo(&self, keep: &ItemSet) -> f64 {
        let n = self.m.size();
        let mut total = 0.0;
        for trial in 0..self.trials {
            let mut rng = stream(self.seed, "eval", trial as u64);
            let mut weights = vec![0.0; n];
            // Every item is sampled each trial so that different `keep` sets
            // see the same realizations (common random numbers).
            for i in 0..n {
                let x = self.dists[i].sample(&mut rng);
                if keep.contains(i) {
                    weights[i] = x;
                }
            }
            let best = self
                .m
                .greedy_max_weight(&weights)
                .expect("weights are finite and non-negative");
            total += best.iter().map(|i| weights[i]).sum::<f64>();
        }
        total / self.trials as f64
    }
}

/// A named mechanism family with a recorded competitive ratio and a builder
/// that prepares it for a concrete instance.  The builder receives the
/// matroid, the value distributions, the host-level ids of the items (useful
/// when an auxiliary structure is keyed by those ids), and a seed.
pub struct GuaranteedMechanism {
    pub name: String,
    pub ratio: f64,
    #[allow(clippy::type_complexity)]
    build: Box<
        dyn Fn(&Matroid, &[Dist], &[usize], u64) -> Result<PreparedMechanism, Error>
            + Send
            + Sync,
    >,
}

impl std::fmt::Debug for GuaranteedMechanism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GuaranteedMechanism")
            .field("name", &self.name)
            .field("ratio", &self.ratio)
            .finish_non_exhaustive()
    }
}

impl GuaranteedMechanism {
    pub fn new(
        name: impl Into<String>,
        ratio: f64,
        build: impl Fn(&Matroid, &[Dist], &[usize], u64) -> Result<PreparedMechanism, Error>
            + Send
            + Sync
            + 'static,
    ) -> Self {
        assert!(ratio >= 1.0);
        Self { name: name.into(), ratio, build: Box::new(build) }
    }

    /// Prepares the mechanism with item ids defaulting to positions.
    pub fn prepare(
        &self,
        m: &Matroid,
        dists: &[Dist],
        seed: u64,
    ) -> Result<PreparedMechanism, Error> {
        let ids: Vec<usize> = (0..m.size()).collect();
        self.prepare_with(m, dists, &ids, seed)
    }

    pub fn prepare_with(
        &self,
        m: &Matroid,
        dists: &[Dist],
        ids: &[usize],
        seed: u64,
    ) -> Result<PreparedMechanism, Error> {
        (self.build)(m, dists, ids, seed)
    }
}

fn derive_seed(seed: u64, label: &str, index: usize) -> u64 {
    use rand::Rng;
    stream(seed, label, index as u64).gen::<u64>()
}

/// All non-zero coordinate vectors of F_p^dim in ascending odometer order.
fn nonzero_vectors(p: u32, dim: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut v = vec![0u32; dim];
    loop {
        let mut pos = 0;
        loop {
            if pos == dim {
                return out;
            }
            v[pos] += 1;
            if v[pos] < p {
                break;
            }
            v[pos] = 0;
            pos += 1;
        }
        out.push(v.clone());
    }
}

fn dot_mod(p: u32, x: &[u32], y: &[u32]) -> u32 {
    x.iter()
        .zip(y)
        .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % p as u64) as u32
}

/// Selects a subset S of `t_set` such that every independent set of the
/// restriction to S stays independent after contracting the complement of
/// `t_set`, while S retains at least a 1/p^(k+1) share of the contraction's
/// prophet value.  Requires the separation connectivity of `t_set` to be at
/// most `k`.
///
/// The selection splits the span of the chosen columns into the part L shared
/// with the complement's span and a complementary part C, groups items by
/// their L-component, keeps the best group, and then keeps the best fiber of
/// a linear functional on the C-coordinates.
pub fn contraction_subset(
    m: &Matroid,
    t_set: &ItemSet,
    k: usize,
    evaluator: &Evaluator,
) -> Result<ItemSet, Error> {
    let rep = m
        .representation()
        .ok_or_else(|| Error::input("contraction selection needs a vector representation"))?;
    let lambda = m.connectivity(t_set);
    if lambda > k {
        return Err(Error::precondition(format!(
            "separation has connectivity {lambda}, above the bound {k}"
        )));
    }
    let p = rep.p();
    let ambient = rep.rows();
    let co = t_set.complement(m.size());
    let t_cols: Vec<Vec<u32>> = t_set.iter().map(|i| rep.column(i)).collect();
    let co_cols: Vec<Vec<u32>> = co.iter().map(|i| rep.column(i)).collect();

    // L is the intersection of the two sides' spans; C extends it to a basis
    // of the chosen side's span.
    let l_basis = intersect_spans(p, ambient, &t_cols, &co_cols);
    let mut ech = Echelon::new(p, ambient);
    for v in &l_basis {
        ech.try_add(v);
    }
    let mut c_basis: Vec<Vec<u32>> = Vec::new();
    for v in &t_cols {
        if ech.try_add(v) {
            c_basis.push(v.clone());
        }
    }
    if c_basis.is_empty() {
        // Every chosen column lies in the shared span: all of them become
        // loops under the contraction, and nothing is worth keeping.
        return Ok(ItemSet::new());
    }
    let dim_l = l_basis.len();
    let dim_c = c_basis.len();
    let combined_cols: Vec<Vec<u32>> = l_basis.iter().chain(&c_basis).cloned().collect();
    let combined = GfMatrix::from_columns(p, &combined_cols)?;

    // Coordinates of each chosen column in the L ⊕ C basis; items whose C
    // part vanishes are dropped (they are loops after contraction).
    let mut live: Vec<(usize, Vec<u32>, Vec<u32>)> = Vec::new();
    for i in t_set.iter() {
        let coords = combined
            .solve(&rep.column(i))
            .expect("chosen columns lie in the decomposed span");
        let (a, c) = coords.split_at(dim_l);
        if c.iter().all(|&x| x == 0) {
            continue;
        }
        live.push((i, a.to_vec(), c.to_vec()));
    }
    if live.is_empty() {
        return Ok(ItemSet::new());
    }

    // Best group by shared L-component.
    let mut groups: BTreeMap<Vec<u32>, ItemSet> = BTreeMap::new();
    for (i, a, _) in &live {
        groups.entry(a.clone()).or_insert_with(ItemSet::new).insert(*i);
    }
    let mut best_group: Option<(&Vec<u32>, f64)> = None;
    for (a, items) in &groups {
        let value = evaluator.restricted_prophet(items);
        if best_group.map_or(true, |(_, bv)| value > bv) {
            best_group = Some((a, value));
        }
    }
    let (a_star, _) = best_group.expect("at least one non-empty group");

    // Best fiber of a linear functional over the C-coordinates.
    let candidates = match (p as u128).checked_pow(dim_c as u32) {
        Some(total) if total <= FUNCTIONAL_LIMIT => nonzero_vectors(p, dim_c),
        _ => {
            use rand::Rng;
            let mut rng = stream(evaluator.seed, "functional", 0);
            (0..FUNCTIONAL_LIMIT as usize)
                .map(|_| loop {
                    let v: Vec<u32> = (0..dim_c).map(|_| rng.gen_range(0..p)).collect();
                    if v.iter().any(|&x| x != 0) {
                        break v;
                    }
                })
                .collect()
        }
    };
    let mut best: Option<(ItemSet, f64)> = None;
    for c in &candidates {
        let fiber: ItemSet = live
            .iter()
            .filter(|(_, a, cc)| a == a_star && dot_mod(p, cc, c) == 1)
            .map(|(i, _, _)| *i)
            .collect();
        let value = evaluator.restricted_prophet(&fiber);
        if best.as_ref().map_or(true, |(_, bv)| value > *bv) {
            best = Some((fiber, value));
        }
    }
    let selected = best.expect("at least one functional candidate").0;

    // Small instances: audit that independence really transfers to the
    // contraction by the complement.
    if m.size() <= TRANSFER_CHECK_LIMIT {
        let co_rank = m.rank_set(&co);
        let items: Vec<usize> = selected.iter().collect();
        for mask in 0u64..(1 << items.len()) {
            let sub: ItemSet = items
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> *b & 1 == 1)
                .map(|(_, &i)| i)
                .collect();
            if m.rank_set(&sub) == sub.len() {
                let joined = sub.union(&co);
                assert_eq!(
                    m.rank_set(&joined) - co_rank,
                    sub.len(),
                    "independent sets inside the selected subset must survive the contraction"
                );
            }
        }
    }
    Ok(selected)
}

/// Class-indexed library of bag mechanisms for tree composition.
#[derive(Default)]
pub struct BagMechanisms {
    entries: Vec<(BagClass, GuaranteedMechanism)>,
}

impl BagMechanisms {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, class: BagClass, gm: GuaranteedMechanism) {
        self.entries.retain(|(c, _)| *c != class);
        self.entries.push((class, gm));
    }

    pub fn get(&self, class: BagClass) -> Option<&GuaranteedMechanism> {
        self.entries
            .iter()
            .find(|(c, _)| *c == class)
            .map(|(_, gm)| gm)
    }
}

/// Composes bag mechanisms along a tree decomposition of thickness at most
/// `k`.  Leaves are peeled one at a time: each contributes the thresholds of
/// its bag mechanism on the subset chosen by `contraction_subset`, with
/// everything else in the bag pinned shut, and the recursion continues on the
/// matroid with the bag deleted.  The final node runs its bag mechanism on
/// whatever remains.  The composite ratio is α·p^(k+1) for the largest bag
/// ratio α, or just α for a single-node tree.
pub fn tree_compose(
    m: &Matroid,
    dists: &[Dist],
    td: &DecompositionTree,
    bags: &BagMechanisms,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<PreparedMechanism, Error> {
    if dists.len() != m.size() {
        return Err(Error::input("one distribution per element"));
    }
    let rep = m
        .representation()
        .ok_or_else(|| Error::input("tree composition needs a vector representation"))?;
    let p = rep.p();
    for cut in td.edge_cuts(m)? {
        if cut.lambda > k {
            return Err(Error::precondition(format!(
                "tree edge ({}, {}) has connectivity {}, above the bound {}",
                cut.u, cut.v, cut.lambda, k
            )));
        }
    }
    let order = td.leaf_order();
    let n_global = m.size();
    let mut current = m.clone();
    let mut to_global: Vec<usize> = (0..n_global).collect();
    let mut stages: Vec<PreparedMechanism> = Vec::new();
    let mut alpha_max: f64 = 1.0;
    for (si, &leaf) in order.iter().enumerate() {
        let node = td.node(leaf);
        let gm = bags.get(node.class).ok_or_else(|| {
            Error::input(format!("no mechanism registered for {:?} bags", node.class))
        })?;
        alpha_max = alpha_max.max(gm.ratio);
        let last = si + 1 == order.len();
        let bag_local: ItemSet = to_global
            .iter()
            .enumerate()
            .filter(|(_, g)| node.bag.contains(**g))
            .map(|(l, _)| l)
            .collect();
        let selected = if last {
            bag_local.clone()
        } else {
            let local_dists: Vec<Dist> =
                to_global.iter().map(|&g| dists[g].clone()).collect();
            let evaluator =
                Evaluator::new(&current, &local_dists, trials, derive_seed(seed, "eval", si))?;
            contraction_subset(&current, &bag_local, k, &evaluator)?
        };
        if !selected.is_empty() {
            let sub = current.restrict(&selected)?;
            let global_ids: Vec<usize> =
                sub.back.iter().map(|&l| to_global[l]).collect();
            let sub_dists: Vec<Dist> =
                global_ids.iter().map(|&g| dists[g].clone()).collect();
            let pm = gm.prepare_with(
                &sub.matroid,
                &sub_dists,
                &global_ids,
                derive_seed(seed, "stage", si),
            )?;
            stages.push(pm.lift_to(n_global, &global_ids));
        }
        if !last {
            let keep: ItemSet =
                (0..current.size()).filter(|l| !bag_local.contains(*l)).collect();
            let next = current.restrict(&keep)?;
            to_global = next.back.iter().map(|&l| to_global[l]).collect();
            current = next.matroid;
        }
    }
    if order.len() == 1 {
        return Ok(match stages.pop() {
            Some(stage) => stage,
            None => mechanisms::fixed(
                ThresholdVector::all_never(n_global, "composite"),
                alpha_max,
            ),
        });
    }
    let ratio = alpha_max * (p as f64).powi(k as i32 + 1);
    Ok(PreparedMechanism::Composite { stages, n: n_global, ratio })
}

/// Transfers a guarantee across a lift.  `lifted` is the larger matroid L,
/// `x` the lifted element; the inner mechanism covers L with x contracted,
/// and the result covers L with x deleted (both live on the same items).  A
/// coin plays the inner mechanism with probability α/(α+1) and otherwise the
/// rank-1 rule on the parallel class of x; the recorded ratio is 2α+2.
pub fn lift_transfer(
    lifted: &Matroid,
    x: usize,
    inner: &GuaranteedMechanism,
    dists: &[Dist],
    seed: u64,
) -> Result<PreparedMechanism, Error> {
    let contracted = transfer_minor(lifted, x, dists)?;
    let inner_pm =
        inner.prepare(&contracted.0, dists, derive_seed(seed, "inner", 0))?;
    let n = dists.len();
    // Parallel copies of x, renamed to the common ground.
    let class = lifted
        .parallel_classes()
        .into_iter()
        .find(|c| c.contains(x));
    let mut members = ItemSet::new();
    if let Some(class) = class {
        for (local, &orig) in contracted.1.iter().enumerate() {
            if class.contains(orig) && orig != x {
                members.insert(local);
            }
        }
    }
    let fallback = scattered_rank_one(&members, dists, n);
    let alpha = inner.ratio;
    let inner_weight = alpha / (alpha + 1.0);
    Ok(PreparedMechanism::Mixture {
        branches: vec![(inner_weight, inner_pm), (1.0 - inner_weight, fallback)],
        ratio: 2.0 * alpha + 2.0,
    })
}

/// Transfers a guarantee across a projection.  `projected` is the larger
/// matroid P, `x` the projected element; the inner mechanism covers P with x
/// deleted, and the result covers P with x contracted.  Elements made loops
/// by the contraction are pinned shut; with probability 1/3 the inner
/// mechanism plays (restricted accordingly), otherwise the rank-1 rule over
/// the surviving elements.  The recorded ratio is 3α.
pub fn projection_transfer(
    projected: &Matroid,
    x: usize,
    inner: &GuaranteedMechanism,
    dists: &[Dist],
    seed: u64,
) -> Result<PreparedMechanism, Error> {
    let contracted = transfer_minor(projected, x, dists)?;
    let n = dists.len();
    let loops = contracted.0.loops();
    let keep = loops.complement(n);
    let deleted = projected
        .restrict(&ItemSet::singleton(x).complement(projected.size()))?;
    let inner_pm =
        inner.prepare(&deleted.matroid, dists, derive_seed(seed, "inner", 0))?;
    let pinned = PreparedMechanism::Restricted {
        inner: Box::new(inner_pm),
        kept: keep.clone(),
    };
    let fallback = scattered_rank_one(&keep, dists, n);
    let alpha = inner.ratio;
    Ok(PreparedMechanism::Mixture {
        branches: vec![(1.0 / 3.0, pinned), (2.0 / 3.0, fallback)],
        ratio: 3.0 * alpha,
    })
}

/// Shared precondition handling for the two transfers: `x` must be neither a
/// loop nor a free element, and the distribution count must match the common
/// ground.  Returns the contraction minor (matroid, back map).
fn transfer_minor(
    host: &Matroid,
    x: usize,
    dists: &[Dist],
) -> Result<(Matroid, Vec<usize>), Error> {
    if x >= host.size() {
        return Err(Error::input(format!("element {x} is out of range")));
    }
    if host.is_loop(x) || host.is_coloop(x) {
        return Err(Error::precondition(format!(
            "element {x} must be neither a loop nor a free element"
        )));
    }
    if dists.len() + 1 != host.size() {
        return Err(Error::input("one distribution per surviving element"));
    }
    let minor = host.contract(&ItemSet::singleton(x))?;
    Ok((minor.matroid, minor.back))
}

/// The rank-1 rule scattered over `members`: one shared threshold for the
/// members, never elsewhere.  All-never when the member set is empty.
fn scattered_rank_one(members: &ItemSet, dists: &[Dist], n: usize) -> PreparedMechanism {
    if members.is_empty() {
        return mechanisms::fixed(ThresholdVector::all_never(n, "parallel-class"), 2.0);
    }
    let member_dists: Vec<Dist> = members.iter().map(|i| dists[i].clone()).collect();
    let rule = single_item_thresholds(&member_dists).items[0];
    let mut tv = ThresholdVector::all_never(n, "parallel-class");
    for i in members.iter() {
        tv.items[i] = rule;
    }
    mechanisms::fixed(tv, 2.0)
}

/// One step of a lift/projection chain.  The matroid is the larger
/// intermediate; the current matroid is its contraction (lift) or deletion
/// (projection) by `x`, and the next one is the other minor.
pub enum ChainStep {
    Lift { matroid: Matroid, x: usize },
    Projection { matroid: Matroid, x: usize },
}

/// Folds lift and projection transfers along a chain, starting from a
/// mechanism with ratio α ≥ 2.  Every step multiplies the recorded ratio by
/// 3 (a lift's 2α+2 is within 3α once α ≥ 2), so a depth-t chain records
/// 3^t·α.
pub fn distance_transfer(
    chain: Vec<ChainStep>,
    inner: GuaranteedMechanism,
) -> Result<GuaranteedMechanism, Error> {
    if inner.ratio < 2.0 {
        return Err(Error::precondition(format!(
            "chain transfer needs a starting ratio of at least 2, got {}",
            inner.ratio
        )));
    }
    let mut gm = inner;
    for step in chain {
        let target = 3.0 * gm.ratio;
        let prev = gm;
        gm = match step {
            ChainStep::Lift { matroid, x } => GuaranteedMechanism::new(
                format!("lift({})", prev.name),
                target,
                move |m: &Matroid, dists: &[Dist], _ids: &[usize], seed: u64| {
                    debug_assert_eq!(m.size() + 1, matroid.size());
                    let mut pm = lift_transfer(&matroid, x, &prev, dists, seed)?;
                    pm.relax_ratio(target);
                    Ok(pm)
                },
            ),
            ChainStep::Projection { matroid, x } => GuaranteedMechanism::new(
                format!("projection({})", prev.name),
                target,
                move |m: &Matroid, dists: &[Dist], _ids: &[usize], seed: u64| {
                    debug_assert_eq!(m.size() + 1, matroid.size());
                    projection_transfer(&matroid, x, &prev, dists, seed)
                },
            ),
        };
    }
    Ok(gm)
}

/// The bag library for binary-sum decompositions: sparse-column thresholds
/// for graphic bags (using the decomposition's own bag representations, which
/// are two-sparse), the bond mechanism for cographic bags, and the per-class
/// uniform rule for parallel extensions of the fixed ten-element bag.
fn binary_sum_bags(st: &SeymourTree, relax_trials: usize) -> BagMechanisms {
    let mut lib = BagMechanisms::new();
    let nodes = st.nodes.clone();
    lib.insert(
        BagClass::Graphic,
        GuaranteedMechanism::new(
            "sparse-graphic",
            32.0,
            move |_m: &Matroid, dists: &[Dist], ids: &[usize], seed: u64| {
                let node = nodes
                    .iter()
                    .find(|nd| ids.iter().all(|i| nd.bag.contains(i)))
                    .ok_or_else(|| {
                        Error::input("items do not sit inside a single decomposition bag")
                    })?;
                let cols: Vec<Vec<u32>> = ids
                    .iter()
                    .map(|i| {
                        let pos = node
                            .bag
                            .iter()
                            .position(|b| b == i)
                            .expect("id is in the bag");
                        node.rep.column(pos)
                    })
                    .collect();
                let bagged = Matroid::vector_from_columns(2, &cols)?;
                let relax = estimate_ex_ante(&bagged, dists, relax_trials, seed)?;
                mechanisms::k_sparse(&bagged, 2, &relax)
            },
        ),
    );
    lib.insert(
        BagClass::Cographic,
        GuaranteedMechanism::new(
            "bond",
            6.0,
            |m: &Matroid, dists: &[Dist], _ids: &[usize], _seed: u64| {
                mechanisms::bond_mechanism(m, dists)
            },
        ),
    );
    lib.insert(
        BagClass::R10Extension,
        GuaranteedMechanism::new(
            "class-uniform",
            20.0,
            |m: &Matroid, dists: &[Dist], _ids: &[usize], _seed: u64| {
                mechanisms::class_uniform(m, dists)
            },
        ),
    );
    lib
}

/// Builds the composed mechanism for a binary matroid given through a
/// validated sum decomposition into graphic, cographic, and extended
/// ten-element bags.  Delegates to `tree_compose` over F_2 with thickness
/// bound 2; with a graphic bag present the recorded ratio is 32·2³ = 256.
pub fn regular_mechanism(
    m: &Matroid,
    st: &SeymourTree,
    dists: &[Dist],
    relax_trials: usize,
    seed: u64,
) -> Result<PreparedMechanism, Error> {
    let rep = m
        .representation()
        .ok_or_else(|| Error::input("the sum decomposition pipeline needs a vector representation"))?;
    if rep.p() != 2 {
        return Err(Error::input(
            "the sum decomposition pipeline works over the two-element field",
        ));
    }
    st.validate(m)?;
    let td = st.decomposition()?;
    let lib = binary_sum_bags(st, relax_trials);
    tree_compose(m, dists, &td, &lib, 2, relax_trials, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::DecompositionNode;
    use crate::graph::Graph;

    fn point_dists(values: &[f64]) -> Vec<Dist> {
        values.iter().map(|&v| Dist::point(v).unwrap()).collect()
    }

    fn incidence_matroid(g: &Graph) -> Matroid {
        Matroid::vector_from_columns(2, &g.incidence_columns_f2()).unwrap()
    }

    #[test]
    fn restriction_keeps_and_pins() {
        let tv = ThresholdVector {
            items: vec![Threshold::at_least(1.0), Threshold::at_least(2.0)],
            source: "test".into(),
        };
        let all: ItemSet = (0..2).collect();
        assert_eq!(restrict_thresholds(&tv, &all), tv);
        let none = restrict_thresholds(&tv, &ItemSet::new());
        assert!(none.items.iter().all(|t| t.is_never()));
    }

    #[test]
    fn exact_evaluation_matches_hand_computation() {
        let g = Graph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        let m = Matroid::graphic(g);
        let dists = point_dists(&[3.0, 2.0, 1.0]);
        let eval = Evaluator::new(&m, &dists, 10, 7).unwrap();
        let all: ItemSet = (0..3).collect();
        // Best forest in a triangle takes the two heaviest edges.
        assert_eq!(eval.restricted_prophet(&all), 5.0);
        assert_eq!(eval.restricted_prophet(&ItemSet::singleton(2)), 1.0);
        assert_eq!(eval.restricted_prophet(&ItemSet::new()), 0.0);
    }

    #[test]
    fn monte_carlo_evaluation_is_deterministic_per_seed() {
        let m = Matroid::uniform(2, 1).unwrap();
        let dists = vec![
            Dist::uniform(0.0, 1.0).unwrap(),
            Dist::uniform(0.0, 2.0).unwrap(),
        ];
        let keep: ItemSet = (0..2).collect();
        let a = Evaluator::new(&m, &dists, 400, 11).unwrap().restricted_prophet(&keep);
        let b = Evaluator::new(&m, &dists, 400, 11).unwrap().restricted_prophet(&keep);
        assert_eq!(a, b);
        // E[max(U(0,1), U(0,2))] = 13/12; a 400-trial estimate lands nearby.
        assert!((a - 13.0 / 12.0).abs() < 0.15, "estimate {a}");
    }

    #[test]
    fn degenerate_selection_keeps_half_the_value() {
        // Whole ground chosen: the fiber search alone costs at most a factor
        // of p = 2.
        let g = Graph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        let m = incidence_matroid(&g);
        let dists = point_dists(&[3.0, 2.0, 1.0]);
        let eval = Evaluator::new(&m, &dists, 10, 3).unwrap();
        let all: ItemSet = (0..3).collect();
        let s = contraction_subset(&m, &all, 0, &eval).unwrap();
        let whole = eval.restricted_prophet(&all);
        let kept = eval.restricted_prophet(&s);
        assert!(kept >= whole / 2.0, "kept {kept} of {whole}");
        assert_eq!(s, [0usize, 1].into_iter().collect::<ItemSet>());
    }

    #[test]
    fn split_selection_meets_the_quarter_bound() {
        // Four-cycle, one side of a connectivity-1 split.
        let g = Graph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let m = incidence_matroid(&g);
        let dists = point_dists(&[4.0, 3.0, 2.0, 1.0]);
        let eval = Evaluator::new(&m, &dists, 10, 3).unwrap();
        let t_set: ItemSet = [0usize, 1].into_iter().collect();
        let s = contraction_subset(&m, &t_set, 1, &eval).unwrap();
        assert!(s.is_subset_of(&t_set));
        // Contracting the other side leaves items 0 and 1 parallel, so the
        // prophet there takes the single best, worth 4.
        let contracted = m.contract(&t_set.complement(4)).unwrap();
        let c_dists: Vec<Dist> =
            contracted.back.iter().map(|&i| dists[i].clone()).collect();
        let c_eval = Evaluator::new(&contracted.matroid, &c_dists, 10, 3).unwrap();
        let c_all: ItemSet = (0..contracted.matroid.size()).collect();
        let reference = c_eval.restricted_prophet(&c_all);
        assert_eq!(reference, 4.0);
        let kept = eval.restricted_prophet(&s);
        assert!(kept >= reference / 4.0, "kept {kept} of {reference}");
    }

    #[test]
    fn tight_separations_are_refused() {
        // A star of three edges in the complete graph on four vertices has
        // connectivity 2 against the opposite triangle.
        let g = Graph::new(
            4,
            vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        )
        .unwrap();
        let m = incidence_matroid(&g);
        let dists = point_dists(&[1.0; 6]);
        let eval = Evaluator::new(&m, &dists, 10, 3).unwrap();
        let star: ItemSet = (0..3).collect();
        let err = contraction_subset(&m, &star, 1, &eval).unwrap_err();
        assert!(err.to_string().contains("connectivity 2"));
    }

    fn accept_all_bag(ratio: f64) -> GuaranteedMechanism {
        GuaranteedMechanism::new(
            "accept-all",
            ratio,
            move |m: &Matroid, _d: &[Dist], _ids: &[usize], _s: u64| {
                let items = vec![Threshold::at_least(0.0); m.size()];
                Ok(mechanisms::fixed(
                    ThresholdVector { items, source: "accept-all".into() },
                    ratio,
                ))
            },
        )
    }

    #[test]
    fn single_node_composition_is_the_bag_mechanism() {
        let g = Graph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        let m = incidence_matroid(&g);
        let dists = point_dists(&[3.0, 2.0, 1.0]);
        let td = DecompositionTree::new(
            vec![DecompositionNode {
                id: 0,
                class: BagClass::Graphic,
                bag: (0..3).collect(),
            }],
            vec![],
        )
        .unwrap();
        let mut bags = BagMechanisms::new();
        bags.insert(BagClass::Graphic, accept_all_bag(16.0));
        let pm = tree_compose(&m, &dists, &td, &bags, 1, 10, 5).unwrap();
        assert_eq!(pm.claimed_ratio(), 16.0);
        let tv = pm.thresholds_for(&crate::mechanisms::DrawChoices::None).unwrap();
        assert!(tv.items.iter().all(|t| *t == Threshold::at_least(0.0)));
    }

    #[test]
    fn two_node_composition_peels_and_multiplies_the_ratio() {
        let g = Graph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let m = incidence_matroid(&g);
        let dists = point_dists(&[4.0, 3.0, 2.0, 1.0]);
        let node = |id: usize, bag: ItemSet| DecompositionNode {
            id,
            class: BagClass::Graphic,
            bag,
        };
        let td = DecompositionTree::new(
            vec![
                node(0, [0usize, 1].into_iter().collect()),
                node(1, [2usize, 3].into_iter().collect()),
            ],
            vec![(0, 1)],
        )
        .unwrap();
        let mut bags = BagMechanisms::new();
        bags.insert(BagClass::Graphic, accept_all_bag(16.0));
        let pm = tree_compose(&m, &dists, &td, &bags, 1, 10, 5).unwrap();
        // 16 · 2^(1+1) = 64.
        assert_eq!(pm.claimed_ratio(), 64.0);
        // The peeled stage keeps a strict subset of its bag; the final stage
        // covers its whole bag.  Together they never overlap.
        let (tv, _) = pm.draw(&mut stream(9, "mech", 0));
        assert_eq!(tv.len(), 4);
        let live: Vec<usize> = (0..4).filter(|&i| !tv.items[i].is_never()).collect();
        assert!(live.contains(&2) && live.contains(&3));

        // Thickness bound violation names the offending edge.
        let err = tree_compose(&m, &dists, &td, &bags, 0, 10, 5).unwrap_err();
        assert!(err.to_string().contains("tree edge (0, 1)"));
    }

    fn rank_one_bag() -> GuaranteedMechanism {
        GuaranteedMechanism::new(
            "rank-one",
            2.0,
            |_m: &Matroid, dists: &[Dist], _ids: &[usize], _s: u64| {
                mechanisms::single_item(dists)
            },
        )
    }

    #[test]
    fn lift_mixes_inner_with_the_parallel_class_rule() {
        // Three parallel edges; contracting one makes the others loops, and
        // deleting it leaves a rank-one pair.
        let g = Graph::new(2, vec![(0, 1), (0, 1), (0, 1)]).unwrap();
        let l = Matroid::graphic(g);
        let dists = point_dists(&[5.0, 3.0]);
        let pm = lift_transfer(&l, 2, &rank_one_bag(), &dists, 4).unwrap();
        assert_eq!(pm.claimed_ratio(), 6.0);
        match &pm {
            PreparedMechanism::Mixture { branches, .. } => {
                assert_eq!(branches.len(), 2);
                assert!((branches[0].0 - 2.0 / 3.0).abs() < 1e-12);
                assert!((branches[1].0 - 1.0 / 3.0).abs() < 1e-12);
                // The fallback covers both remaining parallel copies with one
                // shared rule.
                match &branches[1].1 {
                    PreparedMechanism::Fixed { thresholds, .. } => {
                        assert_eq!(thresholds.items[0], thresholds.items[1]);
                        assert!(!thresholds.items[0].is_never());
                    }
                    other => panic!("unexpected fallback {other:?}"),
                }
            }
            other => panic!("unexpected shape {other:?}"),
        }

        // A triangle's edge has no parallel copies: the fallback goes silent
        // but the mixture still stands.
        let tri = Matroid::graphic(Graph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap());
        let pm = lift_transfer(&tri, 2, &rank_one_bag(), &dists, 4).unwrap();
        match &pm {
            PreparedMechanism::Mixture { branches, .. } => match &branches[1].1 {
                PreparedMechanism::Fixed { thresholds, .. } => {
                    assert!(thresholds.items.iter().all(|t| t.is_never()));
                }
                other => panic!("unexpected fallback {other:?}"),
            },
            other => panic!("unexpected shape {other:?}"),
        }

        // Loops and free elements are refused.
        let loopy = Matroid::graphic(
            Graph::new(2, vec![(0, 0), (0, 1), (0, 1)]).unwrap(),
        );
        let err = lift_transfer(&loopy, 0, &rank_one_bag(), &dists, 4).unwrap_err();
        assert!(err.to_string().contains("neither a loop nor a free element"));
        let pendant = Matroid::graphic(
            Graph::new(3, vec![(0, 1), (0, 1), (1, 2)]).unwrap(),
        );
        let err = lift_transfer(&pendant, 2, &rank_one_bag(), &dists, 4).unwrap_err();
        assert!(err.to_string().contains("neither a loop nor a free element"));
    }

    #[test]
    fn projection_pins_new_loops_in_every_branch() {
        // A doubled edge in a triangle: contracting one copy turns the other
        // into a loop.
        let g = Graph::new(3, vec![(0, 1), (0, 1), (1, 2), (2, 0)]).unwrap();
        let p_matroid = Matroid::graphic(g);
        let dists = point_dists(&[9.0, 4.0, 1.0]);
        let pm = projection_transfer(&p_matroid, 0, &rank_one_bag(), &dists, 4).unwrap();
        assert_eq!(pm.claimed_ratio(), 6.0);
        // Local item 0 is the surviving parallel copy, a loop after the
        // contraction: it must never accept, whatever the draw.
        pm.for_each_draw(&mut |_prob, tv| {
            assert!(tv.items[0].is_never());
        });
        match &pm {
            PreparedMechanism::Mixture { branches, .. } => {
                assert!((branches[0].0 - 1.0 / 3.0).abs() < 1e-12);
                assert!((branches[1].0 - 2.0 / 3.0).abs() < 1e-12);
            }
            other => panic!("unexpected shape {other:?}"),
        }
    }

    #[test]
    fn chains_multiply_by_three_per_step() {
        let tri = || Graph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        let chain = vec![
            ChainStep::Lift { matroid: Matroid::graphic(tri()), x: 2 },
            ChainStep::Projection { matroid: Matroid::graphic(tri()), x: 2 },
        ];
        let gm = distance_transfer(chain, rank_one_bag()).unwrap();
        assert_eq!(gm.ratio, 18.0);
        // Final matroid: a pair of parallel edges (the triangle with one edge
        // contracted).
        let final_m = Matroid::graphic(Graph::new(2, vec![(0, 1), (0, 1)]).unwrap());
        let dists = point_dists(&[5.0, 3.0]);
        let pm = gm.prepare(&final_m, &dists, 12).unwrap();
        assert_eq!(pm.claimed_ratio(), 18.0);
        assert_eq!(pm.ground_size(), 2);

        // The empty chain changes nothing.
        let id = distance_transfer(vec![], rank_one_bag()).unwrap();
        assert_eq!(id.ratio, 2.0);
        assert_eq!(id.name, "rank-one");

        // A starting ratio below 2 violates the hypothesis.
        let weak = GuaranteedMechanism::new(
            "weak",
            1.5,
            |_m: &Matroid, d: &[Dist], _ids: &[usize], _s: u64| {
                mechanisms::single_item(d)
            },
        );
        let err = distance_transfer(vec![], weak).unwrap_err();
        assert!(err.to_string().contains("at least 2"));
    }

    #[test]
    fn single_graphic_bag_runs_the_sparse_mechanism() {
        use crate::decomposition::SeymourNode;
        let g = Graph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        let m = incidence_matroid(&g);
        let st = SeymourTree {
            nodes: vec![SeymourNode {
                id: 0,
                class: BagClass::Graphic,
                bag: vec![0, 1, 2],
                rep: GfMatrix::from_columns(2, &g.incidence_columns_f2()).unwrap(),
            }],
            edges: vec![],
        };
        let dists = point_dists(&[3.0, 2.0, 1.0]);
        let pm = regular_mechanism(&m, &st, &dists, 50, 21).unwrap();
        // One bag: the sparse-column mechanism itself, 2^(2+2)·2 = 32.
        assert_eq!(pm.claimed_ratio(), 32.0);
        assert_eq!(pm.ground_size(), 3);
    }
}
