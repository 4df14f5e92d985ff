use criterion::{black_box, criterion_group, criterion_main, Criterion};
use mprophet_bench::{coin_dists, complete_graph, random_binary};
use mprophet_core::exante::estimate_ex_ante;
use mprophet_core::harness::{simulate, OrderStrategy, SimOptions};
use mprophet_core::matroid::Matroid;
use mprophet_core::mechanisms;
use mprophet_core::partition::partition_into;
use mprophet_core::rng::stream;
use mprophet_core::ItemSet;
use rand::Rng;

fn rank_oracles(c: &mut Criterion) {
    let graphic = Matroid::graphic(complete_graph(8));
    let binary = random_binary(8, 20, 11);
    let n = graphic.size() as u32;
    let mut rng = stream(42, "bench-rank", 0);
    let masks: Vec<u64> = (0..256).map(|_| rng.gen::<u64>() & ((1 << n) - 1)).collect();
    c.bench_function("rank/graphic-k8", |b| {
        b.iter(|| {
            let mut total = 0usize;
            for &mask in &masks {
                total += graphic.rank_set(&ItemSet::from_bits(mask, n as usize));
            }
            black_box(total)
        })
    });
    let bn = binary.size();
    c.bench_function("rank/binary-8x20", |b| {
        b.iter(|| {
            let mut total = 0usize;
            for &mask in &masks {
                total += binary.rank_set(&ItemSet::from_bits(mask & ((1 << bn) - 1), bn));
            }
            black_box(total)
        })
    });
}

fn greedy(c: &mut Criterion) {
    let m = Matroid::graphic(complete_graph(8));
    let mut rng = stream(42, "bench-greedy", 0);
    let weights: Vec<f64> = (0..m.size()).map(|_| rng.gen::<f64>()).collect();
    c.bench_function("greedy/max-weight-k8", |b| {
        b.iter(|| black_box(m.greedy_max_weight(black_box(&weights)).unwrap()))
    });
}

fn partition(c: &mut Criterion) {
    let m = Matroid::graphic(complete_graph(8));
    c.bench_function("partition/k8-into-4", |b| {
        b.iter(|| black_box(partition_into(&m, 4).unwrap()))
    });
}

fn mechanism_draw(c: &mut Criterion) {
    let g = complete_graph(6);
    let m = Matroid::graphic(g.clone());
    let dists = coin_dists(m.size());
    let relax = estimate_ex_ante(&m, &dists, 2_000, 7).unwrap();
    let mech = mechanisms::graphic(&g, &relax).unwrap();
    c.bench_function("mechanism/graphic-draw-k6", |b| {
        let mut rng = stream(9, "bench-draw", 0);
        b.iter(|| black_box(mech.draw(&mut rng)))
    });
}

fn small_simulation(c: &mut Criterion) {
    let g = complete_graph(5);
    let m = Matroid::graphic(g.clone());
    let dists = coin_dists(m.size());
    let relax = estimate_ex_ante(&m, &dists, 1_000, 7).unwrap();
    let mech = mechanisms::graphic(&g, &relax).unwrap();
    let opts = SimOptions {
        trials: 200,
        seed: 1,
        threads: Some(1),
        activation_probs: None,
    };
    c.bench_function("simulate/k5-200-trials", |b| {
        b.iter(|| {
            black_box(
                simulate(&m, &dists, &mech, &OrderStrategy::UniformRandom, &opts).unwrap(),
            )
        })
    });
}

criterion_group!(
    benches,
    rank_oracles,
    greedy,
    partition,
    mechanism_draw,
    small_simulation
);
criterion_main!(benches);
