//! Instance builders shared by the benchmark suite.

use mprophet_core::dist::Dist;
use mprophet_core::graph::Graph;
use mprophet_core::matroid::Matroid;
use mprophet_core::rng::stream;
use rand::Rng;

pub fn complete_graph(v: usize) -> Graph {
    let mut edges = Vec::new();
    for a in 0..v {
        for b in (a + 1)..v {
            edges.push((a, b));
        }
    }
    Graph::new(v, edges).expect("complete graphs are well formed")
}

/// Half-half coin distributions with staggered payoffs: finite supports keep
/// exact paths cheap while still separating the items.
pub fn coin_dists(n: usize) -> Vec<Dist> {
    (0..n)
        .map(|i| {
            Dist::discrete(&[0.0, 1.0 + 0.1 * i as f64], &[0.5, 0.5])
                .expect("coin distributions are well formed")
        })
        .collect()
}

/// A seeded binary matrix matroid with no zero columns.
pub fn random_binary(rows: usize, cols: usize, seed: u64) -> Matroid {
    let mut rng = stream(seed, "bench", 0);
    let columns: Vec<Vec<u32>> = (0..cols)
        .map(|_| loop {
            let col: Vec<u32> = (0..rows).map(|_| rng.gen_range(0..2)).collect();
            if col.iter().any(|&b| b != 0) {
                break col;
            }
        })
        .collect();
    Matroid::vector_from_columns(2, &columns).expect("sampled columns are well formed")
}
