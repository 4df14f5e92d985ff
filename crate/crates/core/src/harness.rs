//! Runs threshold mechanisms against sampled or exhaustively enumerated
//! instances, computes prophet baselines, and aggregates verdicts.
//!
//! The gambler scans items in an arrival order and accepts an item when it
//! beats its threshold and extends the current independent set.  The prophet
//! sees the whole realization and takes a maximum-weight independent set.
//! Simulation charges the gambler the worst order from a candidate pool;
//! exact evaluation enumerates every (mechanism draw, realization, order)
//! state with its probability.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dist::Dist;
use crate::error::Error;
use crate::matroid::Matroid;
use crate::mechanisms::PreparedMechanism;
use crate::rng::stream;
use crate::set::ItemSet;
use crate::thresholds::{Threshold, ThresholdVector};

/// State budget for exact enumeration.
pub const EXACT_STATE_LIMIT: u128 = 10_000_000;

/// Ground-size cap for enumerating all arrival orders.
pub const EXHAUSTIVE_ORDER_LIMIT: usize = 7;

/// Number of random candidates in the adversarial order pool.
const POOL_RANDOM_ORDERS: usize = 32;

/// How arrival orders are chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderStrategy {
    /// One fixed permutation of the ground set.
    Fixed(Vec<usize>),
    /// A fresh uniformly random permutation per trial.
    UniformRandom,
    /// Worst order out of a heuristic candidate pool built from thresholds
    /// and activation probabilities (never from realized values).
    AdversarialPool,
    /// All n! orders; the gambler is charged the minimum.
    Exhaustive,
}

impl OrderStrategy {
    fn label(&self) -> &'static str {
        match self {
            OrderStrategy::Fixed(_) => "fixed",
            OrderStrategy::UniformRandom => "uniform",
            OrderStrategy::AdversarialPool => "adversarial",
            OrderStrategy::Exhaustive => "exhaustive",
        }
    }
}

/// Plays the thresholds against one realization along one order.  Item `i`
/// is accepted when it passes its threshold (ties broken by `aux[i]`) and
/// extends the accepted set's rank.  Returns the accepted set and its value.
pub fn run_gambler(
    m: &Matroid,
    tv: &ThresholdVector,
    order: &[usize],
    values: &[f64],
    aux: &[f64],
) -> (ItemSet, f64) {
    debug_assert_eq!(tv.len(), m.size());
    debug_assert_eq!(values.len(), m.size());
    debug_assert_eq!(aux.len(), m.size());
    let passing: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| tv.items[i].passes(values[i], aux[i]))
        .collect();
    let accepted = m.greedy_in_order(&passing);
    let total = accepted.iter().map(|i| values[i]).sum();
    (accepted, total)
}

/// The prophet's value: a maximum-weight independent set for the realization.
pub fn prophet_value(m: &Matroid, values: &[f64]) -> f64 {
    let best = m
        .greedy_max_weight(values)
        .expect("realized values are finite and non-negative");
    best.iter().map(|i| values[i]).sum()
}

/// Options shared by simulation runs.
#[derive(Clone, Debug)]
pub struct SimOptions {
    pub trials: usize,
    pub seed: u64,
    /// Thread count for the trial loop; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Per-item activation probabilities used to bias the adversarial pool.
    pub activation_probs: Option<Vec<f64>>,
}

impl SimOptions {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self { trials, seed, threads: None, activation_probs: None }
    }
}

/// Aggregated outcome of a simulation run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationReport {
    pub trials: usize,
    pub seed: u64,
    pub order_strategy: String,
    /// Per-item acceptance frequency.
    pub acceptance: Vec<f64>,
    pub gambler_mean: f64,
    pub gambler_stderr: f64,
    pub prophet_mean: f64,
    pub prophet_stderr: f64,
    /// Empirical gambler/prophet ratio.
    pub ratio: f64,
    pub claimed_alpha: f64,
    /// Whether the gambler meets prophet/α within three combined standard
    /// errors.
    pub verdict: bool,
    /// Description of the worst candidate order, when the strategy tracks
    /// one.
    pub worst_order: Option<String>,
}

fn mean_stderr(sum: f64, sumsq: f64, count: usize) -> (f64, f64) {
    let n = count as f64;
    let mean = sum / n;
    if count < 2 {
        return (mean, 0.0);
    }
    let var = ((sumsq - sum * sum / n) / (n - 1.0)).max(0.0);
    (mean, (var / n).sqrt())
}

fn verdict_at_three_sigma(
    gambler_mean: f64,
    gambler_se: f64,
    prophet_mean: f64,
    prophet_se: f64,
    alpha: f64,
) -> bool {
    let target = prophet_mean / alpha;
    let combined = (gambler_se * gambler_se
        + (prophet_se / alpha) * (prophet_se / alpha))
        .sqrt();
    gambler_mean >= target - 3.0 * combined
}

/// Candidate orders for the adversarial pool: items by ascending and
/// descending threshold, optionally by descending activation probability,
/// plus random permutations.  Realized values are deliberately not an input:
/// the adversary commits to an order knowing distributions and thresholds
/// only.
pub fn adversarial_candidates(
    tv: &ThresholdVector,
    probs: Option<&[f64]>,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Vec<Vec<usize>> {
    let n = tv.len();
    let mut orders = Vec::with_capacity(2 + usize::from(probs.is_some()) + POOL_RANDOM_ORDERS);
    let key = |i: usize| {
        let t = &tv.items[i];
        if t.is_never() {
            f64::INFINITY
        } else {
            t.value
        }
    };
    let mut asc: Vec<usize> = (0..n).collect();
    asc.sort_by(|&a, &b| key(a).partial_cmp(&key(b)).unwrap().then(a.cmp(&b)));
    let mut desc: Vec<usize> = (0..n).collect();
    desc.sort_by(|&a, &b| key(b).partial_cmp(&key(a)).unwrap().then(a.cmp(&b)));
    orders.push(asc);
    orders.push(desc);
    if let Some(p) = probs {
        let mut by_p: Vec<usize> = (0..n).collect();
        by_p.sort_by(|&a, &b| p[b].partial_cmp(&p[a]).unwrap().then(a.cmp(&b)));
        orders.push(by_p);
    }
    for _ in 0..POOL_RANDOM_ORDERS {
        let mut o: Vec<usize> = (0..n).collect();
        o.shuffle(rng);
        orders.push(o);
    }
    orders
}

fn pool_candidate_label(index: usize, has_probs: bool) -> String {
    match (index, has_probs) {
        (0, _) => "ascending-threshold".into(),
        (1, _) => "descending-threshold".into(),
        (2, true) => "descending-activation".into(),
        _ => "random".into(),
    }
}

/// All permutations of 0..n in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(rest: &mut Vec<usize>, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(acc.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            acc.push(x);
            rec(rest, acc, out);
            acc.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut (0..n).collect(), &mut Vec::new(), &mut out);
    out
}

struct TrialOutcome {
    gambler: f64,
    prophet: f64,
    accepted: ItemSet,
    /// Gambler value per candidate order (length 1 for single-order
    /// strategies).
    per_candidate: Vec<f64>,
    charged: usize,
}

/// Runs `opts.trials` independent trials of the mechanism and aggregates a
/// report.  All randomness is derived from labeled substreams of the seed,
/// and trials fold in index order, so reports are identical across thread
/// counts.
pub fn simulate(
    m: &Matroid,
    dists: &[Dist],
    mech: &PreparedMechanism,
    strategy: &OrderStrategy,
    opts: &SimOptions,
) -> Result<SimulationReport, Error> {
    let n = m.size();
    if dists.len() != n {
        return Err(Error::input("one distribution per element"));
    }
    if mech.ground_size() != n {
        return Err(Error::input("mechanism covers a different ground set"));
    }
    if opts.trials == 0 {
        return Err(Error::input("at least one trial"));
    }
    if let OrderStrategy::Fixed(perm) = strategy {
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::input("order must be a permutation of the ground set"));
        }
    }
    let exhaustive_orders = match strategy {
        OrderStrategy::Exhaustive => {
            if n > EXHAUSTIVE_ORDER_LIMIT {
                return Err(Error::too_large(format!(
                    "exhaustive orders need at most {EXHAUSTIVE_ORDER_LIMIT} items, got {n}"
                )));
            }
            Some(permutations(n))
        }
        _ => None,
    };
    if let Some(p) = &opts.activation_probs {
        if p.len() != n {
            return Err(Error::input("one activation probability per element"));
        }
    }
    let seed = opts.seed;
    let probs = opts.activation_probs.as_deref();

    let trial = |t: usize| -> TrialOutcome {
        let mut mech_rng = stream(seed, "mech", t as u64);
        let (tv, _) = mech.draw(&mut mech_rng);
        let mut value_rng = stream(seed, "values", t as u64);
        let values: Vec<f64> = dists.iter().map(|d| d.sample(&mut value_rng)).collect();
        let mut aux_rng = stream(seed, "aux", t as u64);
        let aux: Vec<f64> = (0..n).map(|_| aux_rng.gen::<f64>()).collect();
        let own_orders: Vec<Vec<usize>>;
        let orders: &[Vec<usize>] = match strategy {
            OrderStrategy::Fixed(perm) => std::slice::from_ref(perm),
            OrderStrategy::UniformRandom => {
                let mut o: Vec<usize> = (0..n).collect();
                o.shuffle(&mut stream(seed, "order", t as u64));
                own_orders = vec![o];
                &own_orders
            }
            OrderStrategy::AdversarialPool => {
                own_orders =
                    adversarial_candidates(&tv, probs, &mut stream(seed, "pool", t as u64));
                &own_orders
            }
            OrderStrategy::Exhaustive => exhaustive_orders.as_ref().unwrap(),
        };
        let mut per_candidate = Vec::with_capacity(orders.len());
        let mut charged = 0usize;
        let mut worst: Option<(f64, ItemSet)> = None;
        for (ci, order) in orders.iter().enumerate() {
            let (accepted, g) = run_gambler(m, &tv, order, &values, &aux);
            if worst.as_ref().map_or(true, |(wg, _)| g < *wg) {
                worst = Some((g, accepted.clone()));
                charged = ci;
            }
            per_candidate.push(g);
        }
        let (gambler, accepted) = worst.expect("at least one order");
        TrialOutcome {
            gambler,
            prophet: prophet_value(m, &values),
            accepted,
            per_candidate,
            charged,
        }
    };

    let run = || -> Vec<TrialOutcome> {
        (0..opts.trials).into_par_iter().map(trial).collect()
    };
    let outcomes = match opts.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::input(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };

    let mut sum_g = 0.0;
    let mut sumsq_g = 0.0;
    let mut sum_p = 0.0;
    let mut sumsq_p = 0.0;
    let mut accept_counts = vec![0usize; n];
    let candidates = outcomes[0].per_candidate.len();
    let mut candidate_sums = vec![0.0; candidates];
    let mut charged_counts = vec![0usize; candidates];
    for o in &outcomes {
        sum_g += o.gambler;
        sumsq_g += o.gambler * o.gambler;
        sum_p += o.prophet;
        sumsq_p += o.prophet * o.prophet;
        for i in o.accepted.iter() {
            accept_counts[i] += 1;
        }
        for (s, g) in candidate_sums.iter_mut().zip(&o.per_candidate) {
            *s += g;
        }
        charged_counts[o.charged] += 1;
    }
    let (gambler_mean, gambler_stderr) = mean_stderr(sum_g, sumsq_g, opts.trials);
    let (prophet_mean, prophet_stderr) = mean_stderr(sum_p, sumsq_p, opts.trials);
    let worst_index = candidate_sums
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.partial_cmp(b).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0);
    let worst_order = match strategy {
        OrderStrategy::Fixed(perm) => Some(format!("{perm:?}")),
        OrderStrategy::UniformRandom => None,
        OrderStrategy::AdversarialPool => {
            Some(pool_candidate_label(worst_index, probs.is_some()))
        }
        OrderStrategy::Exhaustive => exhaustive_orders
            .as_ref()
            .map(|perms| format!("{:?}", perms[worst_index])),
    };
    let alpha = mech.claimed_ratio();
    Ok(SimulationReport {
        trials: opts.trials,
        seed,
        order_strategy: strategy.label().to_string(),
        acceptance: accept_counts
            .iter()
            .map(|&c| c as f64 / opts.trials as f64)
            .collect(),
        gambler_mean,
        gambler_stderr,
        prophet_mean,
        prophet_stderr,
        ratio: if prophet_mean > 0.0 { gambler_mean / prophet_mean } else { 1.0 },
        claimed_alpha: alpha,
        verdict: verdict_at_three_sigma(
            gambler_mean,
            gambler_stderr,
            prophet_mean,
            prophet_stderr,
            alpha,
        ),
        worst_order,
    })
}

/// Outcome of exact enumeration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactReport {
    pub gambler: f64,
    pub prophet: f64,
    pub ratio: f64,
    pub claimed_alpha: f64,
    /// Whether gambler ≥ prophet/α up to float slack.
    pub verdict: bool,
    /// Number of (draw, realization, order) states enumerated.
    pub states: u128,
    pub worst_order: Option<Vec<usize>>,
}

/// Per-item outcome list under a fixed threshold: value, whether it passes,
/// probability.  An atom sitting exactly on the threshold splits into a
/// passing and a failing branch weighted by the tie-acceptance coin.
fn split_outcomes(d: &Dist, t: &Threshold) -> Option<Vec<(f64, bool, f64)>> {
    let outcomes = d.finite_outcomes()?;
    let mut out = Vec::with_capacity(outcomes.len() + 1);
    for (x, p) in outcomes {
        if x > t.value {
            out.push((x, true, p));
        } else if x < t.value {
            out.push((x, false, p));
        } else {
            if t.tie_accept > 0.0 {
                out.push((x, true, p * t.tie_accept));
            }
            if t.tie_accept < 1.0 {
                out.push((x, false, p * (1.0 - t.tie_accept)));
            }
        }
    }
    Some(out)
}

/// Exhausts every (mechanism draw, realization, order) state and returns
/// exact expectations.  Under the adversarial and exhaustive policies the
/// gambler is charged the order minimizing the per-order expectation — the
/// order is fixed from distribution knowledge before any realization.
pub fn exact_evaluate(
    m: &Matroid,
    dists: &[Dist],
    mech: &PreparedMechanism,
    strategy: &OrderStrategy,
) -> Result<ExactReport, Error> {
    let n = m.size();
    if dists.len() != n {
        return Err(Error::input("one distribution per element"));
    }
    if mech.ground_size() != n {
        return Err(Error::input("mechanism covers a different ground set"));
    }
    let mut joint: u128 = 1;
    let mut supports: Vec<Vec<(f64, f64)>> = Vec::with_capacity(n);
    for d in dists {
        let outcomes = d
            .finite_outcomes()
            .ok_or_else(|| Error::input("exact evaluation needs finite supports"))?;
        joint = joint
            .checked_mul(outcomes.len() as u128)
            .ok_or_else(|| Error::too_large("joint outcome space overflows"))?;
        supports.push(outcomes);
    }
    let draws = mech
        .count_draws()
        .ok_or_else(|| Error::too_large("mechanism draw space overflows"))?;
    let orders: Vec<Vec<usize>> = match strategy {
        OrderStrategy::Fixed(perm) => {
            let mut seen = vec![false; n];
            if perm.len() != n
                || perm.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true))
            {
                return Err(Error::input("order must be a permutation of the ground set"));
            }
            vec![perm.clone()]
        }
        _ => {
            if n > EXHAUSTIVE_ORDER_LIMIT {
                return Err(Error::too_large(format!(
                    "order enumeration needs at most {EXHAUSTIVE_ORDER_LIMIT} items, got {n}"
                )));
            }
            permutations(n)
        }
    };
    let states = joint
        .checked_mul(draws)
        .and_then(|s| s.checked_mul(orders.len() as u128))
        .ok_or_else(|| Error::too_large("state space overflows"))?;
    if states > EXACT_STATE_LIMIT {
        return Err(Error::too_large(format!(
            "state space has {states} states, budget {EXACT_STATE_LIMIT}"
        )));
    }

    // Prophet expectation over the plain joint outcomes.
    let mut prophet = 0.0;
    let mut weights = vec![0.0; n];
    let mut slot = vec![0usize; n];
    loop {
        let mut prob = 1.0;
        for i in 0..n {
            let (v, p) = supports[i][slot[i]];
            weights[i] = v;
            prob *= p;
        }
        prophet += prob * prophet_value(m, &weights);
        let mut pos = 0;
        loop {
            if pos == n {
                break;
            }
            slot[pos] += 1;
            if slot[pos] < supports[pos].len() {
                break;
            }
            slot[pos] = 0;
            pos += 1;
        }
        if pos == n {
            break;
        }
    }

    // Gambler expectation per order, accumulated across draws and split
    // realizations.
    let mut per_order = vec![0.0; orders.len()];
    mech.for_each_draw(&mut |draw_prob, tv| {
        let split: Vec<Vec<(f64, bool, f64)>> = dists
            .iter()
            .zip(&tv.items)
            .map(|(d, t)| split_outcomes(d, t).expect("supports checked finite"))
            .collect();
        let mut slot = vec![0usize; n];
        let mut values = vec![0.0; n];
        let mut passes = vec![false; n];
        loop {
            let mut prob = draw_prob;
            for i in 0..n {
                let (v, pass, p) = split[i][slot[i]];
                values[i] = v;
                passes[i] = pass;
                prob *= p;
            }
            if prob > 0.0 {
                for (oi, order) in orders.iter().enumerate() {
                    let arriving: Vec<usize> = order
                        .iter()
                        .copied()
                        .filter(|&i| passes[i])
                        .collect();
                    let accepted = m.greedy_in_order(&arriving);
                    per_order[oi] += prob * accepted.iter().map(|i| values[i]).sum::<f64>();
                }
            }
            let mut pos = 0;
            loop {
                if pos == n {
                    break;
                }
                slot[pos] += 1;
                if slot[pos] < split[pos].len() {
                    break;
                }
                slot[pos] = 0;
                pos += 1;
            }
            if pos == n {
                break;
            }
        }
    });

    let (gambler, worst_order) = match strategy {
        OrderStrategy::Fixed(_) => (per_order[0], Some(orders[0].clone())),
        OrderStrategy::UniformRandom => (
            per_order.iter().sum::<f64>() / per_order.len() as f64,
            None,
        ),
        OrderStrategy::AdversarialPool | OrderStrategy::Exhaustive => {
            let (oi, &value) = per_order
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| a.partial_cmp(b).unwrap())
                .expect("at least one order");
            (value, Some(orders[oi].clone()))
        }
    };
    let alpha = mech.claimed_ratio();
    Ok(ExactReport {
        gambler,
        prophet,
        ratio: if prophet > 0.0 { gambler / prophet } else { 1.0 },
        claimed_alpha: alpha,
        verdict: gambler + 1e-9 >= prophet / alpha,
        states,
        worst_order,
    })
}
