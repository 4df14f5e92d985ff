#![allow(dead_code)]

use mprophet_core::gf::GfMatrix;
use mprophet_core::graph::Graph;
use mprophet_core::matroid::Matroid;
use mprophet_core::ItemSet;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Exhaustive maximum-weight independent set, the reference for greedy.
pub fn brute_max_weight(m: &Matroid, w: &[f64]) -> f64 {
    let n = m.size();
    assert!(n <= 16, "exhaustive oracle is exponential");
    let mut best = 0.0f64;
    for mask in 0u32..(1 << n) {
        let set: ItemSet = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        if m.is_independent(&set) {
            let total: f64 = set.iter().map(|i| w[i]).sum();
            if total > best {
                best = total;
            }
        }
    }
    best
}

/// Exhaustive rank: the largest independent subset of `s`.
pub fn brute_rank(m: &Matroid, s: &ItemSet) -> usize {
    let items: Vec<usize> = s.iter().collect();
    assert!(items.len() <= 16);
    let mut best = 0;
    for mask in 0u32..(1 << items.len()) {
        let sub: ItemSet = items
            .iter()
            .enumerate()
            .filter(|(j, _)| mask >> j & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        if sub.len() > best && m.is_independent(&sub) {
            best = sub.len();
        }
    }
    best
}

/// All subsets of 0..n as ItemSets.
pub fn all_subsets(n: usize) -> impl Iterator<Item = ItemSet> {
    assert!(n <= 16);
    (0u32..(1 << n)).map(move |mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
}

/// A connected random simple graph: a random spanning tree plus extra
/// distinct edges.
pub fn random_connected_graph(rng: &mut ChaCha8Rng, vertices: usize, extra: usize) -> Graph {
    assert!(vertices >= 2);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for v in 1..vertices {
        edges.push((rng.gen_range(0..v), v));
    }
    let mut guard = 0;
    while edges.len() < vertices - 1 + extra && guard < 1000 {
        guard += 1;
        let a = rng.gen_range(0..vertices);
        let b = rng.gen_range(0..vertices);
        if a == b {
            continue;
        }
        let e = (a.min(b), a.max(b));
        if !edges.iter().any(|&(x, y)| (x, y) == e) {
            edges.push(e);
        }
    }
    Graph::new(vertices, edges).unwrap()
}

/// A random binary vector matroid with no zero columns.
pub fn random_binary_matroid(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matroid {
    let mut rep = GfMatrix::zero(2, rows, cols);
    for c in 0..cols {
        loop {
            let mut any = false;
            for r in 0..rows {
                let bit = u32::from(rng.gen_bool(0.5));
                rep.set(r, c, bit);
                any |= bit == 1;
            }
            if any {
                break;
            }
        }
    }
    Matroid::vector(rep)
}

/// Adaptive Simpson quadrature; the tolerance is plenty for 1e-6 oracles.
pub fn integrate<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, m: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
    }
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, depth: usize) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson(f, a, 0.5 * (a + m), m);
        let right = simpson(f, m, 0.5 * (m + b), b);
        if depth == 0 || (left + right - whole).abs() < 1e-9 {
            left + right
        } else {
            rec(f, a, m, left, depth - 1) + rec(f, m, b, right, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    rec(&f, a, b, simpson(&f, a, m, b), 24)
}
