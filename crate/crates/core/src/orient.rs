//! Bounded fractional-indegree orientations via vertex peeling.
//!
//! Both the graph and the hypergraph variant repeatedly find a vertex whose
//! remaining fractional degree is at most the bound, orient all surviving
//! edges incident to it into it, and delete it.  When the weight vector lies
//! in the relevant matroid polytope such a vertex always exists (the average
//! degree argument), so a stuck peel certifies an out-of-polytope input.

use crate::error::Error;
use crate::graph::Graph;
use crate::matroid::Matroid;
use crate::set::ItemSet;

const LOAD_TOL: f64 = 1e-9;

/// Subset-enumeration cap for the optional polytope membership check.
const POLYTOPE_CHECK_LIMIT: usize = 12;

/// Orients every edge of `g` so that each vertex's incoming fractional load
/// Σ p_e is at most 2.  Returns the head vertex per edge.
pub fn orient_graph(g: &Graph, p: &[f64]) -> Result<Vec<usize>, Error> {
    if p.len() != g.edge_count() {
        return Err(Error::input("one weight per edge"));
    }
    validate_weights(p)?;
    if g.edge_count() <= POLYTOPE_CHECK_LIMIT {
        check_forest_polytope(g, p)?;
    }
    let hyperedges: Vec<Vec<usize>> = g
        .edges()
        .iter()
        .map(|&(u, v)| if u == v { vec![u] } else { vec![u, v] })
        .collect();
    peel(&hyperedges, g.vertex_count(), p, 2.0)
}

/// Nonzero coordinate sets of a vector matroid's representation columns.
pub fn build_hypergraph(m: &Matroid) -> Result<Vec<Vec<usize>>, Error> {
    let rep = m
        .representation()
        .ok_or_else(|| Error::input("hypergraph construction needs a vector representation"))?;
    let mut hyperedges = Vec::with_capacity(rep.cols());
    for t in 0..rep.cols() {
        let support: Vec<usize> = (0..rep.rows()).filter(|&i| rep.get(i, t) != 0).collect();
        if support.is_empty() {
            return Err(Error::input(format!(
                "column {t} is zero (a loop); delete loops before orienting"
            )));
        }
        hyperedges.push(support);
    }
    Ok(hyperedges)
}

/// Orients hyperedges over vertex set 0..vertex_count with per-vertex load
/// bound `k`.  Each hyperedge must touch at most `k` vertices.
pub fn orient_hypergraph(
    hyperedges: &[Vec<usize>],
    vertex_count: usize,
    p: &[f64],
    k: usize,
) -> Result<Vec<usize>, Error> {
    if p.len() != hyperedges.len() {
        return Err(Error::input("one weight per hyperedge"));
    }
    validate_weights(p)?;
    for (t, e) in hyperedges.iter().enumerate() {
        if e.is_empty() {
            return Err(Error::input(format!("hyperedge {t} is empty")));
        }
        if e.len() > k {
            return Err(Error::input(format!(
                "hyperedge {t} touches {} vertices, more than the sparsity bound {k}",
                e.len()
            )));
        }
        if e.iter().any(|&v| v >= vertex_count) {
            return Err(Error::input(format!("hyperedge {t} names a missing vertex")));
        }
        let mut seen = ItemSet::new();
        for &v in e {
            if seen.contains(v) {
                return Err(Error::input(format!("hyperedge {t} repeats a vertex")));
            }
            seen.insert(v);
        }
    }
    peel(hyperedges, vertex_count, p, k as f64)
}

/// Per-vertex incoming fractional load of an orientation.
pub fn indegree_loads(
    hyperedges: &[Vec<usize>],
    vertex_count: usize,
    head: &[usize],
    p: &[f64],
) -> Vec<f64> {
    let mut load = vec![0.0; vertex_count];
    for (e, &h) in head.iter().enumerate() {
        debug_assert!(hyperedges[e].contains(&h));
        load[h] += p[e];
    }
    load
}

fn validate_weights(p: &[f64]) -> Result<(), Error> {
    if p.iter().any(|w| !w.is_finite() || *w < 0.0 || *w > 1.0) {
        return Err(Error::input("weights must lie in [0, 1]"));
    }
    Ok(())
}

/// Exhaustive forest-polytope membership: Σ_{e∈S} p_e ≤ forest_rank(S) for
/// every edge subset.  Only called for small edge counts.
fn check_forest_polytope(g: &Graph, p: &[f64]) -> Result<(), Error> {
    let m = g.edge_count();
    for mask in 1u64..(1 << m) {
        let s = ItemSet::from_bits(mask, m);
        let total: f64 = s.iter().map(|e| p[e]).sum();
        let rank = g.forest_rank(&s);
        if total > rank as f64 + LOAD_TOL {
            return Err(Error::precondition(format!(
                "weights sum to {total:.6} on {s:?} with forest rank {rank}: outside the polytope"
            )));
        }
    }
    Ok(())
}

fn peel(
    hyperedges: &[Vec<usize>],
    vertex_count: usize,
    p: &[f64],
    bound: f64,
) -> Result<Vec<usize>, Error> {
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); vertex_count];
    let mut load = vec![0.0; vertex_count];
    for (e, vs) in hyperedges.iter().enumerate() {
        for &v in vs {
            incident[v].push(e);
            load[v] += p[e];
        }
    }
    let mut head = vec![usize::MAX; hyperedges.len()];
    let mut removed = vec![false; vertex_count];
    let mut alive = vec![true; hyperedges.len()];
    for _ in 0..vertex_count {
        let pick = (0..vertex_count)
            .find(|&v| !removed[v] && load[v] <= bound + LOAD_TOL)
            .ok_or_else(|| {
                Error::precondition(format!(
                    "no remaining vertex has fractional degree at most {bound}: \
                     the weight vector lies outside the polytope"
                ))
            })?;
        for &e in &incident[pick] {
            if alive[e] {
                head[e] = pick;
                alive[e] = false;
                for &v in &hyperedges[e] {
                    load[v] -= p[e];
                }
            }
        }
        removed[pick] = true;
    }
    assert!(alive.iter().all(|a| !a));
    let loads = indegree_loads(hyperedges, vertex_count, &head, p);
    assert!(loads.iter().all(|&l| l <= bound + LOAD_TOL));
    Ok(head)
}
