//! Matroid representations and their rank oracles.
//!
//! Five representations share one interface: graphic and cographic matroids
//! of a multigraph, uniform matroids, vector matroids over a prime field, and
//! explicit basis lists. Minors, duals, parallel-class analysis, and the
//! connectivity function are implemented per representation so that every
//! derived object carries a concrete representation of the same flavor
//! (a graphic minor is again a graph, a vector minor is again a matrix).

use crate::error::Error;
use crate::gf::{Echelon, GfMatrix};
use crate::graph::Graph;
use crate::set::ItemSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatroidKind {
    Graphic,
    Cographic,
    Uniform,
    Vector,
    Explicit,
}

#[derive(Clone, Debug)]
enum Repr {
    Graphic(Graph),
    Cographic(Graph),
    Uniform { n: usize, k: usize },
    Vector(GfMatrix),
    Explicit { n: usize, bases: Vec<ItemSet> },
}

/// A matroid on ground set `0..n` with a concrete representation.
#[derive(Clone, Debug)]
pub struct Matroid {
    repr: Repr,
}

/// A minor together with the renumbering it induced: element `i` of the minor
/// is element `back[i]` of the parent, and `back` is strictly increasing.
#[derive(Clone, Debug)]
pub struct Minor {
    pub matroid: Matroid,
    pub back: Vec<usize>,
}

const EXPLICIT_LIMIT: usize = 16;

impl Matroid {
    pub fn graphic(g: Graph) -> Self {
        Self { repr: Repr::Graphic(g) }
    }

    pub fn cographic(g: Graph) -> Self {
        Self { repr: Repr::Cographic(g) }
    }

    pub fn uniform(n: usize, k: usize) -> Result<Self, Error> {
        if k > n {
            return Err(Error::input(format!("uniform rank {k} exceeds ground size {n}")));
        }
        Ok(Self { repr: Repr::Uniform { n, k } })
    }

    pub fn vector(rep: GfMatrix) -> Self {
        Self { repr: Repr::Vector(rep) }
    }

    pub fn vector_from_columns(p: u32, columns: &[Vec<u32>]) -> Result<Self, Error> {
        Ok(Self::vector(GfMatrix::from_columns(p, columns)?))
    }

    /// Builds a matroid from an exhaustive list of its bases, validating the
    /// basis-exchange axiom outright.
    pub fn from_bases(n: usize, bases: Vec<ItemSet>) -> Result<Self, Error> {
        if n > EXPLICIT_LIMIT {
            return Err(Error::too_large(format!(
                "explicit basis lists are limited to {EXPLICIT_LIMIT} elements, got {n}"
            )));
        }
        if bases.is_empty() {
            return Err(Error::input("a matroid has at least one basis (possibly empty)"));
        }
        let size = bases[0].len();
        let mut uniq = std::collections::HashSet::new();
        for b in &bases {
            if b.len() != size {
                return Err(Error::input("all bases must have the same size"));
            }
            if !b.iter().all(|e| e < n) {
                return Err(Error::input("basis contains an element outside the ground set"));
            }
            if !uniq.insert(b.clone()) {
                return Err(Error::input("duplicate basis in list"));
            }
        }
        // Exchange: for each pair and each x ∈ B1∖B2 there is y ∈ B2∖B1 with
        // B1 − x + y again in the list.
        for b1 in &bases {
            for b2 in &bases {
                for x in b1.minus(b2).iter() {
                    let ok = b2.minus(b1).iter().any(|y| {
                        let mut cand = b1.clone();
                        cand.remove(x);
                        cand.insert(y);
                        uniq.contains(&cand)
                    });
                    if !ok {
                        return Err(Error::input(format!(
                            "basis exchange fails: no replacement for {x} between {:?} and {:?}",
                            b1, b2
                        )));
                    }
                }
            }
        }
        Ok(Self { repr: Repr::Explicit { n, bases } })
    }

    pub fn kind(&self) -> MatroidKind {
        match &self.repr {
            Repr::Graphic(_) => MatroidKind::Graphic,
            Repr::Cographic(_) => MatroidKind::Cographic,
            Repr::Uniform { .. } => MatroidKind::Uniform,
            Repr::Vector(_) => MatroidKind::Vector,
            Repr::Explicit { .. } => MatroidKind::Explicit,
        }
    }

    /// Ground-set size.
    pub fn size(&self) -> usize {
        match &self.repr {
            Repr::Graphic(g) | Repr::Cographic(g) => g.edge_count(),
            Repr::Uniform { n, .. } | Repr::Explicit { n, .. } => *n,
            Repr::Vector(m) => m.cols(),
        }
    }

    pub fn ground(&self) -> ItemSet {
        ItemSet::full(self.size())
    }

    /// The underlying graph, for the graphic and cographic representations.
    pub fn graph(&self) -> Option<&Graph> {
        match &self.repr {
            Repr::Graphic(g) | Repr::Cographic(g) => Some(g),
            _ => None,
        }
    }

    /// The underlying matrix, for the vector representation.
    pub fn representation(&self) -> Option<&GfMatrix> {
        match &self.repr {
            Repr::Vector(m) => Some(m),
            _ => None,
        }
    }

    pub fn uniform_params(&self) -> Option<(usize, usize)> {
        match self.repr {
            Repr::Uniform { n, k } => Some((n, k)),
            _ => None,
        }
    }

    pub fn basis_list(&self) -> Option<&[ItemSet]> {
        match &self.repr {
            Repr::Explicit { bases, .. } => Some(bases),
            _ => None,
        }
    }

    pub fn rank_set(&self, s: &ItemSet) -> usize {
        debug_assert!(s.iter().all(|e| e < self.size()));
        match &self.repr {
            Repr::Graphic(g) => g.forest_rank(s),
            Repr::Cographic(g) => {
                // Corank of the complement: |S| minus the number of extra
                // components that removing S creates.
                s.len() - (g.components_excluding(s) - g.components())
            }
            Repr::Uniform { k, .. } => s.len().min(*k),
            Repr::Vector(m) => m.rank_of_columns(s.iter()),
            Repr::Explicit { bases, .. } => {
                bases.iter().map(|b| b.intersection(s).len()).max().unwrap()
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rank_set(&self.ground())
    }

    pub fn is_independent(&self, s: &ItemSet) -> bool {
        self.rank_set(s) == s.len()
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.rank_set(&ItemSet::singleton(e)) == 0
    }

    pub fn is_coloop(&self, e: usize) -> bool {
        let mut rest = self.ground();
        rest.remove(e);
        self.rank_set(&rest) < self.rank()
    }

    pub fn loops(&self) -> ItemSet {
        (0..self.size()).filter(|&e| self.is_loop(e)).collect()
    }

    /// Dual matroid, represented concretely: the graph swaps roles, the
    /// uniform rank flips, the matrix becomes a null-space basis, explicit
    /// bases complement.
    pub fn dual(&self) -> Matroid {
        match &self.repr {
            Repr::Graphic(g) => Matroid::cographic(g.clone()),
            Repr::Cographic(g) => Matroid::graphic(g.clone()),
            Repr::Uniform { n, k } => Matroid { repr: Repr::Uniform { n: *n, k: n - k } },
            Repr::Vector(m) => {
                let ns = m.null_space();
                let mut rep = GfMatrix::zero(m.p(), ns.len(), m.cols());
                for (r, v) in ns.iter().enumerate() {
                    for (c, &x) in v.iter().enumerate() {
                        rep.set(r, c, x);
                    }
                }
                Matroid::vector(rep)
            }
            Repr::Explicit { n, bases } => {
                let full = ItemSet::full(*n);
                let co = bases.iter().map(|b| full.minus(b)).collect();
                Matroid { repr: Repr::Explicit { n: *n, bases: co } }
            }
        }
    }

    /// The minor M / `contract` ∖ `delete`, with remaining elements renumbered
    /// in ascending original order. Contracting a dependent set is allowed
    /// (its closure's extra elements just become loops first).
    pub fn minor(&self, delete: &ItemSet, contract: &ItemSet) -> Result<Minor, Error> {
        let n = self.size();
        if !delete.iter().chain(contract.iter()).all(|e| e < n) {
            return Err(Error::input("minor references elements outside the ground set"));
        }
        if !delete.is_disjoint_from(contract) {
            return Err(Error::input("delete and contract sets overlap"));
        }
        match &self.repr {
            Repr::Graphic(g) => {
                let (mid, back1) = g.contract_edges(contract);
                let (fin, back2) = mid.delete_edges(&translate(&back1, delete));
                Ok(Minor { matroid: Matroid::graphic(fin), back: compose(&back1, &back2) })
            }
            Repr::Cographic(g) => {
                // Duality: contraction deletes graph edges, deletion contracts them.
                let (mid, back1) = g.delete_edges(contract);
                let (fin, back2) = mid.contract_edges(&translate(&back1, delete));
                Ok(Minor { matroid: Matroid::cographic(fin), back: compose(&back1, &back2) })
            }
            Repr::Uniform { n, k } => {
                let a = contract.len();
                let k2 = k.saturating_sub(a);
                let n2 = n - a - delete.len();
                let back = remaining(*n, delete, contract);
                Ok(Minor { matroid: Matroid::uniform(n2, k2.min(n2))?, back })
            }
            Repr::Vector(m) => {
                let back = remaining(m.cols(), delete, contract);
                let quotient = vector_contract(m, contract);
                let cols: Vec<Vec<u32>> = back.iter().map(|&e| quotient.column(e)).collect();
                let mut rep = GfMatrix::zero(m.p(), quotient.rows(), cols.len());
                for (c, col) in cols.iter().enumerate() {
                    for (r, &x) in col.iter().enumerate() {
                        rep.set(r, c, x);
                    }
                }
                Ok(Minor { matroid: Matroid::vector(rep), back })
            }
            Repr::Explicit { n, .. } => {
                let back = remaining(*n, delete, contract);
                let r_contract = self.rank_set(contract);
                let minor_rank_of = |s_new: &ItemSet| {
                    let mut s_old: ItemSet = s_new.iter().map(|i| back[i]).collect();
                    s_old.insert_all(contract);
                    self.rank_set(&s_old) - r_contract
                };
                let new_n = back.len();
                let new_rank = minor_rank_of(&ItemSet::full(new_n));
                let mut bases = Vec::new();
                for_each_subset(new_n, new_rank, &mut |s| {
                    if minor_rank_of(s) == new_rank {
                        bases.push(s.clone());
                    }
                });
                Ok(Minor { matroid: Matroid { repr: Repr::Explicit { n: new_n, bases } }, back })
            }
        }
    }

    pub fn restrict(&self, keep: &ItemSet) -> Result<Minor, Error> {
        self.minor(&self.ground().minus(keep), &ItemSet::new())
    }

    pub fn contract(&self, contract: &ItemSet) -> Result<Minor, Error> {
        self.minor(&ItemSet::new(), contract)
    }

    /// Groups the non-loop elements into parallel classes, ascending by their
    /// smallest member. Singleton classes are included.
    pub fn parallel_classes(&self) -> Vec<ItemSet> {
        let mut classes: Vec<ItemSet> = Vec::new();
        for e in 0..self.size() {
            if self.is_loop(e) {
                continue;
            }
            let joined = classes.iter_mut().find(|c| {
                let mut pair = ItemSet::singleton(c.min_item().unwrap());
                pair.insert(e);
                self.rank_set(&pair) == 1
            });
            match joined {
                Some(c) => c.insert(e),
                None => classes.push(ItemSet::singleton(e)),
            }
        }
        classes
    }

    /// Deletes loops and all but the smallest element of every parallel class.
    pub fn simplify(&self) -> Result<Minor, Error> {
        let mut gone = self.loops();
        for class in self.parallel_classes() {
            let keep = class.min_item().unwrap();
            for e in class.iter().filter(|&e| e != keep) {
                gone.insert(e);
            }
        }
        self.minor(&gone, &ItemSet::new())
    }

    /// Scans the given order and keeps every element whose arrival grows the
    /// rank. When the order is sorted by descending weight, this is the
    /// matroid greedy and the result is a maximum-weight independent set.
    pub fn greedy_in_order(&self, order: &[usize]) -> ItemSet {
        let mut picked = ItemSet::new();
        let mut rank = 0;
        for &e in order {
            picked.insert(e);
            let grown = self.rank_set(&picked);
            if grown > rank {
                rank = grown;
            } else {
                picked.remove(e);
            }
        }
        picked
    }

    /// Maximum-weight independent set; ties in weight are broken by ascending
    /// element id so that equal inputs give equal outputs.
    pub fn greedy_max_weight(&self, weights: &[f64]) -> Result<ItemSet, Error> {
        if weights.len() != self.size() {
            return Err(Error::input("one weight per element"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::input("weights must be finite and nonnegative"));
        }
        let mut order: Vec<usize> = (0..self.size()).collect();
        order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
        Ok(self.greedy_in_order(&order))
    }

    /// Connectivity function λ(S) = r(S) + r(E∖S) − r(E).
    pub fn connectivity(&self, s: &ItemSet) -> usize {
        self.rank_set(s) + self.rank_set(&s.complement(self.size())) - self.rank()
    }

    /// Closure of `a`: every element whose addition does not raise the rank.
    pub fn closure(&self, a: &ItemSet) -> ItemSet {
        let base = self.rank_set(a);
        let mut out = ItemSet::new();
        for c in 0..self.size() {
            if a.contains(c) {
                out.insert(c);
                continue;
            }
            let mut grown = a.clone();
            grown.insert(c);
            if self.rank_set(&grown) == base {
                out.insert(c);
            }
        }
        out
    }

    /// Local connectivity r(X) + r(Y) − r(X∪Y) between two (not necessarily
    /// disjoint) subsets.
    pub fn local_connectivity(&self, x: &ItemSet, y: &ItemSet) -> usize {
        self.rank_set(x) + self.rank_set(y) - self.rank_set(&x.union(y))
    }

    /// Whether `c` is a circuit: minimally dependent.
    pub fn is_circuit(&self, c: &ItemSet) -> bool {
        if c.is_empty() || self.rank_set(c) != c.len() - 1 {
            return false;
        }
        c.iter().all(|e| {
            let mut sub = c.clone();
            sub.remove(e);
            self.is_independent(&sub)
        })
    }
}

/// New ids of `old_ids` after a renumbering described by `back` (new → old).
fn translate(back: &[usize], old_ids: &ItemSet) -> ItemSet {
    let mut fwd = std::collections::HashMap::new();
    for (new, &old) in back.iter().enumerate() {
        fwd.insert(old, new);
    }
    old_ids.iter().map(|e| fwd[&e]).collect()
}

fn compose(back1: &[usize], back2: &[usize]) -> Vec<usize> {
    back2.iter().map(|&mid| back1[mid]).collect()
}

fn remaining(n: usize, delete: &ItemSet, contract: &ItemSet) -> Vec<usize> {
    (0..n).filter(|&e| !delete.contains(e) && !contract.contains(e)).collect()
}

/// Quotient representation by span of the contracted columns: change basis so
/// that span lands on the first coordinates, then drop them.
fn vector_contract(m: &GfMatrix, contract: &ItemSet) -> GfMatrix {
    let d = m.rows();
    let p = m.p();
    let mut ech = Echelon::new(p, d);
    let mut basis = Vec::new();
    for e in contract.iter() {
        let col = m.column(e);
        if ech.try_add(&col) {
            basis.push(col);
        }
    }
    let r_a = basis.len();
    for i in 0..d {
        let mut e_i = vec![0u32; d];
        e_i[i] = 1;
        if ech.try_add(&e_i) {
            basis.push(e_i);
        }
    }
    assert_eq!(basis.len(), d);
    let change = GfMatrix::from_columns(p, &basis)
        .expect("basis columns are well-formed")
        .invert()
        .expect("a completed basis is invertible");
    let mut out = GfMatrix::zero(p, d - r_a, m.cols());
    for c in 0..m.cols() {
        let y = change.apply(&m.column(c));
        for (r, &x) in y[r_a..].iter().enumerate() {
            out.set(r, c, x);
        }
    }
    out
}

fn for_each_subset(n: usize, size: usize, f: &mut impl FnMut(&ItemSet)) {
    fn rec(start: usize, n: usize, left: usize, cur: &mut ItemSet, f: &mut impl FnMut(&ItemSet)) {
        if left == 0 {
            f(cur);
            return;
        }
        for e in start..=(n - left) {
            cur.insert(e);
            rec(e + 1, n, left - 1, cur, f);
            cur.remove(e);
        }
    }
    if size <= n {
        rec(0, n, size, &mut ItemSet::new(), f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> Graph {
        Graph::new(4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    fn all_subsets(n: usize) -> Vec<ItemSet> {
        (0..1u64 << n).map(|mask| ItemSet::from_bits(mask, n)).collect()
    }

    #[test]
    fn uniform_rank_formula() {
        let m = Matroid::uniform(5, 3).unwrap();
        for s in all_subsets(5) {
            assert_eq!(m.rank_set(&s), s.len().min(3));
        }
        assert!(Matroid::uniform(2, 3).is_err());
    }

    #[test]
    fn cographic_rank_agrees_with_dual_formula() {
        let g = Graph::new(4, vec![(0, 1), (0, 1), (1, 2), (2, 3), (3, 1), (0, 0)]).unwrap();
        let m = Matroid::graphic(g.clone());
        let star = Matroid::cographic(g);
        let full_rank = m.rank();
        for s in all_subsets(6) {
            let dual_rank = s.len() + m.rank_set(&s.complement(6)) - full_rank;
            assert_eq!(star.rank_set(&s), dual_rank);
        }
    }

    #[test]
    fn duals_are_involutive_in_rank() {
        let cases = vec![
            Matroid::graphic(k4()),
            Matroid::uniform(5, 2).unwrap(),
            Matroid::vector_from_columns(
                3,
                &[vec![1, 0], vec![0, 1], vec![1, 1], vec![1, 2], vec![0, 0]],
            )
            .unwrap(),
        ];
        for m in cases {
            let dd = m.dual().dual();
            for s in all_subsets(m.size()) {
                assert_eq!(m.rank_set(&s), dd.rank_set(&s));
            }
        }
    }

    #[test]
    fn dual_rank_identity_holds_for_vector_matroids() {
        let m = Matroid::vector_from_columns(
            2,
            &[vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 0], vec![0, 0, 1], vec![1, 1, 1]],
        )
        .unwrap();
        let star = m.dual();
        let full = m.rank();
        for s in all_subsets(5) {
            assert_eq!(star.rank_set(&s), s.len() + m.rank_set(&s.complement(5)) - full);
        }
    }

    #[test]
    fn explicit_bases_match_uniform() {
        let mut bases = Vec::new();
        for_each_subset(4, 2, &mut |s| bases.push(s.clone()));
        let m = Matroid::from_bases(4, bases).unwrap();
        let u = Matroid::uniform(4, 2).unwrap();
        for s in all_subsets(4) {
            assert_eq!(m.rank_set(&s), u.rank_set(&s));
        }
    }

    #[test]
    fn exchange_axiom_rejects_non_matroids() {
        let bases = vec![
            [0, 1].into_iter().collect::<ItemSet>(),
            [2, 3].into_iter().collect::<ItemSet>(),
        ];
        assert!(matches!(Matroid::from_bases(4, bases), Err(Error::Input(_))));
    }

    #[test]
    fn minors_satisfy_rank_quotient_identity() {
        // r_{M/C∖D}(S) = r(S ∪ C) − r(C), checked exhaustively per kind.
        let cases = vec![
            Matroid::graphic(k4()),
            Matroid::cographic(k4()),
            Matroid::uniform(6, 3).unwrap(),
            Matroid::vector_from_columns(
                2,
                &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 0], vec![1, 1, 1], vec![0, 1, 1]],
            )
            .unwrap(),
            Matroid::from_bases(
                4,
                vec![[0, 1].into_iter().collect(), [0, 2].into_iter().collect(), [1, 2].into_iter().collect(), [1, 3].into_iter().collect(), [0, 3].into_iter().collect(), [2, 3].into_iter().collect()],
            )
            .unwrap(),
        ];
        for m in cases {
            let n = m.size();
            let delete: ItemSet = ItemSet::singleton(1);
            let contract: ItemSet = [0, n - 1].into_iter().collect();
            let minor = m.minor(&delete, &contract).unwrap();
            assert_eq!(minor.back.len(), n - 3);
            let rc = m.rank_set(&contract);
            for s in all_subsets(minor.back.len()) {
                let mut s_old: ItemSet = s.iter().map(|i| minor.back[i]).collect();
                s_old.insert_all(&contract);
                assert_eq!(
                    minor.matroid.rank_set(&s),
                    m.rank_set(&s_old) - rc,
                    "kind {:?}, subset {:?}",
                    m.kind(),
                    s
                );
            }
        }
    }

    #[test]
    fn contracting_a_cycle_makes_loops() {
        let m = Matroid::graphic(k4());
        // Edges 0,1,3 form the triangle 0-1-2; contracting it loops nothing else
        // but leaves rank 1.
        let minor = m.contract(&[0, 1, 3].into_iter().collect()).unwrap();
        assert_eq!(minor.matroid.rank(), 1);
        assert_eq!(minor.matroid.size(), 3);
    }

    #[test]
    fn parallel_classes_and_simplify() {
        // Triangle with a doubled edge and a self-loop.
        let g = Graph::new(3, vec![(0, 1), (0, 1), (1, 2), (0, 2), (2, 2)]).unwrap();
        let m = Matroid::graphic(g);
        assert_eq!(m.loops(), ItemSet::singleton(4));
        let classes = m.parallel_classes();
        assert_eq!(classes.len(), 3);
        assert_eq!(classes[0], [0, 1].into_iter().collect());
        let simple = m.simplify().unwrap();
        assert_eq!(simple.back, vec![0, 2, 3]);
        assert!(simple.matroid.graph().unwrap().is_simple());
    }

    #[test]
    fn connectivity_of_a_k4_edge() {
        let m = Matroid::graphic(k4());
        assert_eq!(m.connectivity(&ItemSet::singleton(0)), 1);
        // A triangle against the rest.
        assert_eq!(m.connectivity(&[0, 1, 3].into_iter().collect()), 2);
        assert_eq!(m.connectivity(&ItemSet::new()), 0);
    }

    #[test]
    fn circuits_are_recognized() {
        let m = Matroid::graphic(k4());
        assert!(m.is_circuit(&[0, 1, 3].into_iter().collect())); // triangle
        assert!(!m.is_circuit(&[0, 1].into_iter().collect())); // independent
        assert!(!m.is_circuit(&ItemSet::full(6))); // dependent but not minimal
    }

    #[test]
    fn greedy_matches_exhaustive_maximum() {
        // Spot values, then a sweep against brute force over all subsets.
        let u = Matroid::uniform(3, 1).unwrap();
        assert_eq!(u.greedy_max_weight(&[5.0, 2.0, 7.0]).unwrap(), ItemSet::singleton(2));
        let tri = Matroid::graphic(Graph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap());
        let picked = tri.greedy_max_weight(&[3.0, 2.0, 1.0]).unwrap();
        assert_eq!(picked, [0, 1].into_iter().collect());
        let m = Matroid::graphic(k4());
        let weights = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0];
        let greedy_total: f64 = m
            .greedy_max_weight(&weights)
            .unwrap()
            .iter()
            .map(|e| weights[e])
            .sum();
        let best = all_subsets(6)
            .into_iter()
            .filter(|s| m.is_independent(s))
            .map(|s| s.iter().map(|e| weights[e]).sum::<f64>())
            .fold(0.0, f64::max);
        assert_eq!(greedy_total, best);
        assert!(m.greedy_max_weight(&[1.0; 5]).is_err());
        assert!(m.greedy_max_weight(&[1.0, 1.0, 1.0, 1.0, 1.0, -1.0]).is_err());
    }

    #[test]
    fn closure_and_local_connectivity() {
        // Triangle plus a pendant edge: two triangle edges span the third,
        // but never the pendant.
        let g = Graph::new(4, vec![(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        let m = Matroid::graphic(g);
        let two: ItemSet = [0usize, 1].into_iter().collect();
        assert_eq!(m.closure(&two), [0usize, 1, 2].into_iter().collect());
        assert_eq!(m.closure(&ItemSet::new()), ItemSet::new());
        assert_eq!(m.closure(&m.ground()), m.ground());

        // Closure of anything contains every loop.
        let loopy = Matroid::graphic(Graph::new(2, vec![(0, 0), (0, 1)]).unwrap());
        assert_eq!(loopy.closure(&ItemSet::new()), ItemSet::singleton(0));

        // λ(S) is the local connectivity between S and its complement, and
        // overlapping arguments count their shared span.
        for s in all_subsets(4) {
            let co = s.complement(4);
            assert_eq!(m.connectivity(&s), m.local_connectivity(&s, &co));
        }
        let left: ItemSet = [0usize, 1].into_iter().collect();
        let right: ItemSet = [1usize, 2].into_iter().collect();
        assert_eq!(m.local_connectivity(&left, &right), 2);
    }

    #[test]
    fn coloops_and_restriction() {
        // A triangle plus a pendant edge: the pendant is a coloop.
        let g = Graph::new(4, vec![(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        let m = Matroid::graphic(g);
        assert!(m.is_coloop(3) && !m.is_coloop(0));
        let r = m.restrict(&[1, 3].into_iter().collect()).unwrap();
        assert_eq!(r.back, vec![1, 3]);
        assert_eq!(r.matroid.rank(), 2);
    }
}
