//! Tree decompositions of a matroid ground set, and the labeled binary-sum
//! trees used to drive the regular-matroid mechanism.
//!
//! A decomposition tree partitions the ground set into bags, one per tree
//! node.  Removing a tree edge splits the bags into two sides; the
//! connectivity λ of one side, measured in the host matroid, is the edge's
//! thickness.  All composition guarantees are parameterized by the maximum
//! thickness.

use crate::delta::SumKind;
use crate::error::Error;
use crate::gf::GfMatrix;
use crate::matroid::Matroid;
use crate::set::ItemSet;

/// Exhaustive bag-versus-representation agreement check cap.
const BAG_CHECK_LIMIT: usize = 12;

/// The structural family a bag is claimed to belong to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BagClass {
    Graphic,
    Cographic,
    /// Parallel extension of the fixed 10-element base matroid.
    R10Extension,
    TwoColumnSparse,
    GammaSparse,
}

#[derive(Clone, Debug)]
pub struct DecompositionNode {
    pub id: usize,
    pub class: BagClass,
    pub bag: ItemSet,
}

/// A tree over bags that partition the ground set of a host matroid.
#[derive(Clone, Debug)]
pub struct DecompositionTree {
    nodes: Vec<DecompositionNode>,
    edges: Vec<(usize, usize)>,
}

/// One tree edge with its measured split connectivity.
#[derive(Clone, Debug)]
pub struct TreeEdgeCut {
    pub u: usize,
    pub v: usize,
    pub lambda: usize,
    /// The bag union on `u`'s side of the removed edge.
    pub side: ItemSet,
}

impl DecompositionTree {
    /// Builds and structurally validates the tree: unique node ids, edges
    /// over known ids, connected, acyclic, disjoint bags.
    pub fn new(
        nodes: Vec<DecompositionNode>,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self, Error> {
        if nodes.is_empty() {
            return Err(Error::input("decomposition tree needs at least one node"));
        }
        for (i, a) in nodes.iter().enumerate() {
            for b in &nodes[i + 1..] {
                if a.id == b.id {
                    return Err(Error::input(format!("duplicate node id {}", a.id)));
                }
                if !a.bag.is_disjoint_from(&b.bag) {
                    return Err(Error::input(format!(
                        "bags of nodes {} and {} overlap",
                        a.id, b.id
                    )));
                }
            }
        }
        let tree = Self { nodes, edges };
        for &(u, v) in &tree.edges {
            if tree.index_of(u).is_none() || tree.index_of(v).is_none() || u == v {
                return Err(Error::input(format!("bad tree edge ({u}, {v})")));
            }
        }
        if tree.edges.len() + 1 != tree.nodes.len() || tree.reachable_from(tree.nodes[0].id).len() != tree.nodes.len() {
            return Err(Error::input("decomposition tree must be connected and acyclic"));
        }
        Ok(tree)
    }

    pub fn nodes(&self) -> &[DecompositionNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn node(&self, id: usize) -> &DecompositionNode {
        &self.nodes[self.index_of(id).expect("known node id")]
    }

    fn index_of(&self, id: usize) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Union of all bags.
    pub fn ground(&self) -> ItemSet {
        let mut out = ItemSet::new();
        for n in &self.nodes {
            out = out.union(&n.bag);
        }
        out
    }

    /// Node ids reachable from `start`, optionally treating one edge as
    /// removed.
    fn component(&self, start: usize, skip: Option<usize>) -> Vec<usize> {
        let mut seen = vec![start];
        let mut queue = vec![start];
        while let Some(x) = queue.pop() {
            for (i, &(u, v)) in self.edges.iter().enumerate() {
                if Some(i) == skip {
                    continue;
                }
                let next = if u == x {
                    v
                } else if v == x {
                    u
                } else {
                    continue;
                };
                if !seen.contains(&next) {
                    seen.push(next);
                    queue.push(next);
                }
            }
        }
        seen
    }

    fn reachable_from(&self, start: usize) -> Vec<usize> {
        self.component(start, None)
    }

    /// λ for every tree edge: the host-matroid connectivity of the bag union
    /// on one side of the removed edge.
    pub fn edge_cuts(&self, m: &Matroid) -> Result<Vec<TreeEdgeCut>, Error> {
        let ground = self.ground();
        if ground != m.ground() {
            return Err(Error::input(
                "bags must partition the host matroid's ground set",
            ));
        }
        let mut out = Vec::with_capacity(self.edges.len());
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            let side_ids = self.component(u, Some(i));
            let mut side = ItemSet::new();
            for id in side_ids {
                side = side.union(&self.node(id).bag);
            }
            out.push(TreeEdgeCut {
                u,
                v,
                lambda: m.connectivity(&side),
                side,
            });
        }
        Ok(out)
    }

    /// Maximum λ over tree edges; 0 for a single node.
    pub fn thickness(&self, m: &Matroid) -> Result<usize, Error> {
        Ok(self
            .edge_cuts(m)?
            .iter()
            .map(|c| c.lambda)
            .max()
            .unwrap_or(0))
    }

    /// Order in which nodes get peeled: always the smallest-id current leaf,
    /// ending with the last remaining node.
    pub fn leaf_order(&self) -> Vec<usize> {
        let mut live: Vec<usize> = self.nodes.iter().map(|n| n.id).collect();
        let mut gone: Vec<usize> = Vec::new();
        let mut order = Vec::with_capacity(live.len());
        while live.len() > 1 {
            let leaf = live
                .iter()
                .copied()
                .filter(|&id| {
                    let degree = self
                        .edges
                        .iter()
                        .filter(|&&(u, v)| {
                            (u == id || v == id)
                                && !gone.contains(&u)
                                && !gone.contains(&v)
                        })
                        .count();
                    degree <= 1
                })
                .min()
                .expect("a tree always has a leaf");
            order.push(leaf);
            gone.push(leaf);
            live.retain(|&id| id != leaf);
        }
        order.push(live[0]);
        order
    }
}

/// A decomposition tree whose nodes carry explicit binary representations of
/// their bag restrictions and whose edges are labeled by sum type.
#[derive(Clone, Debug)]
pub struct SeymourNode {
    pub id: usize,
    pub class: BagClass,
    /// Global item ids, in the column order of `rep`.
    pub bag: Vec<usize>,
    pub rep: GfMatrix,
}

#[derive(Clone, Debug)]
pub struct SeymourTree {
    pub nodes: Vec<SeymourNode>,
    pub edges: Vec<(usize, usize, SumKind)>,
}

impl SeymourTree {
    /// The underlying bag tree, with ordering information dropped.
    pub fn decomposition(&self) -> Result<DecompositionTree, Error> {
        let nodes = self
            .nodes
            .iter()
            .map(|n| {
                let mut bag = ItemSet::new();
                for &e in &n.bag {
                    if bag.contains(e) {
                        return Err(Error::input(format!(
                            "node {} repeats item {e} in its bag",
                            n.id
                        )));
                    }
                    bag.insert(e);
                }
                Ok(DecompositionNode {
                    id: n.id,
                    class: n.class,
                    bag,
                })
            })
            .collect::<Result<Vec<_>, Error>>()?;
        DecompositionTree::new(nodes, self.edges.iter().map(|&(u, v, _)| (u, v)).collect())
    }

    /// Full structural validation against the host matroid: tree shape, bag
    /// partition, sum labels matching the measured split connectivity
    /// (1-sum ↔ λ = 0, 2-sum ↔ 1, 3-sum ↔ 2), allowed class tags, and
    /// exhaustive rank agreement between each bag's representation and the
    /// host restriction for desk-scale bags.
    pub fn validate(&self, m: &Matroid) -> Result<(), Error> {
        let td = self.decomposition()?;
        let cuts = td.edge_cuts(m)?;
        for (cut, &(u, v, kind)) in cuts.iter().zip(&self.edges) {
            let want = match kind {
                SumKind::One => 0,
                SumKind::Two => 1,
                SumKind::Three => 2,
            };
            if cut.lambda != want {
                return Err(Error::input(format!(
                    "tree edge ({u}, {v}) is labeled a {}-sum but its split has connectivity {}",
                    want + 1,
                    cut.lambda
                )));
            }
        }
        for node in &self.nodes {
            if !matches!(
                node.class,
                BagClass::Graphic | BagClass::Cographic | BagClass::R10Extension
            ) {
                return Err(Error::input(format!(
                    "node {} carries a class tag outside the regular-decomposition set",
                    node.id
                )));
            }
            if node.rep.p() != 2 {
                return Err(Error::input(format!(
                    "node {} must carry a binary representation",
                    node.id
                )));
            }
            if node.rep.cols() != node.bag.len() {
                return Err(Error::input(format!(
                    "node {}: representation has {} columns for {} bag items",
                    node.id,
                    node.rep.cols(),
                    node.bag.len()
                )));
            }
            if node.bag.len() <= BAG_CHECK_LIMIT {
                let local = Matroid::vector(node.rep.clone());
                for mask in 0u64..(1 << node.bag.len()) {
                    let local_set = ItemSet::from_bits(mask, node.bag.len());
                    let global_set: ItemSet =
                        local_set.iter().map(|j| node.bag[j]).collect();
                    if local.rank_set(&local_set) != m.rank_set(&global_set) {
                        return Err(Error::input(format!(
                            "node {}: representation disagrees with the host matroid on {global_set:?}",
                            node.id
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}
