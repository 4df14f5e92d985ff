//! Ex-ante relaxation: per-item activation probabilities with tail values.
//!
//! The relaxation replaces each item by a Bernoulli surrogate that is "active"
//! with probability `p_i` and, when active, worth the conditional expectation
//! of its top `p_i` probability mass.  The activation event is coupled to the
//! real value through the threshold `τ_i = F_i⁻¹(1−p_i)` plus a calibrated
//! tie coin so that the activation probability is exactly `p_i` even for
//! discrete laws.

use rayon::prelude::*;

use crate::dist::Dist;
use crate::error::Error;
use crate::matroid::Matroid;
use crate::rng::stream;
use crate::set::ItemSet;
use crate::thresholds::Threshold;

/// Largest joint support size enumerated exactly; bigger instances fall back
/// to Monte Carlo estimation.
pub const EXACT_OUTCOME_LIMIT: usize = 1_000_000;

/// The vector p together with its tail thresholds and tail expectations.
#[derive(Clone, Debug)]
pub struct ExAnteRelaxation {
    /// Per-item probability of being in the maximum-weight independent set.
    pub p: Vec<f64>,
    /// Tail thresholds τ_i = F_i⁻¹(1−p_i); +∞ when p_i = 0.
    pub tau: Vec<f64>,
    /// Tail expectations t_i = E[X_i | top p_i mass]; 0 when p_i = 0.
    pub t: Vec<f64>,
    /// Tie-coin biases completing the activation coupling at X = τ.
    pub tie: Vec<f64>,
    /// Per-item standard errors of p (all zero on the exact path).
    pub stderr: Vec<f64>,
    /// Trials used, or the number of joint outcomes when enumerated exactly.
    pub sample_count: usize,
    /// Whether p was computed by exhaustive enumeration.
    pub exact: bool,
}

impl ExAnteRelaxation {
    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// The relaxation's upper bound on the prophet value: Σ p_i t_i.
    pub fn bound(&self) -> f64 {
        self.p.iter().zip(&self.t).map(|(p, t)| p * t).sum()
    }

    /// Per-item activation rules: active iff the value beats τ_i, with the
    /// tie coin deciding exact hits.
    pub fn activation_rules(&self) -> Vec<Threshold> {
        self.tau
            .iter()
            .zip(&self.tie)
            .map(|(&value, &tie_accept)| Threshold { value, tie_accept })
            .collect()
    }
}

/// The Bernoulli surrogate instance: item i is worth `value[i]` with
/// probability `prob[i]`, activation coupled to the original value by `rule`.
#[derive(Clone, Debug)]
pub struct BernoulliInstance {
    pub value: Vec<f64>,
    pub prob: Vec<f64>,
    pub rule: Vec<Threshold>,
}

/// The activation rule for one item: pass above τ = F⁻¹(1−p), and on an exact
/// hit accept with the bias that makes the overall rate exactly p.
pub fn activation_rule(d: &Dist, p: f64) -> Threshold {
    assert!((0.0..=1.0).contains(&p));
    if p == 0.0 {
        return Threshold::never();
    }
    let tau = d.quantile(1.0 - p);
    let above = 1.0 - d.cdf(tau);
    let atom = d.atom(tau);
    let tie_accept = if atom > 0.0 {
        ((p - above) / atom).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Threshold {
        value: tau,
        tie_accept,
    }
}

/// Estimates p by running the prophet's greedy on sampled (or, for small
/// finite-support instances, all) realizations, then derives τ, t and the tie
/// coins from the marginals.
pub fn estimate_ex_ante(
    m: &Matroid,
    dists: &[Dist],
    trials: usize,
    seed: u64,
) -> Result<ExAnteRelaxation, Error> {
    if dists.len() != m.size() {
        return Err(Error::input("one distribution per matroid element"));
    }
    if trials == 0 {
        return Err(Error::input("trials must be at least 1"));
    }
    let n = m.size();
    let (p, stderr, sample_count, exact) = match exact_support(dists) {
        Some(support) => {
            let p = enumerate_exact(m, &support);
            let count = support.iter().map(|s| s.len()).product();
            (p, vec![0.0; n], count, true)
        }
        None => {
            let counts = (0..trials)
                .into_par_iter()
                .fold(
                    || vec![0u64; n],
                    |mut acc, trial| {
                        let picked = sample_trial(m, dists, seed, trial as u64);
                        for i in picked.iter() {
                            acc[i] += 1;
                        }
                        acc
                    },
                )
                .reduce(
                    || vec![0u64; n],
                    |mut a, b| {
                        for (x, y) in a.iter_mut().zip(b) {
                            *x += y;
                        }
                        a
                    },
                );
            let p: Vec<f64> = counts.iter().map(|&c| c as f64 / trials as f64).collect();
            let stderr = p
                .iter()
                .map(|&q| (q * (1.0 - q) / trials as f64).sqrt())
                .collect();
            (p, stderr, trials, false)
        }
    };

    let mut tau = Vec::with_capacity(n);
    let mut t = Vec::with_capacity(n);
    let mut tie = Vec::with_capacity(n);
    for (d, &pi) in dists.iter().zip(&p) {
        if pi == 0.0 {
            tau.push(f64::INFINITY);
            t.push(0.0);
            tie.push(0.0);
        } else {
            let rule = activation_rule(d, pi);
            tau.push(rule.value);
            tie.push(rule.tie_accept);
            t.push(d.tail_expectation(pi).expect("positive tail mass"));
        }
    }
    Ok(ExAnteRelaxation {
        p,
        tau,
        t,
        tie,
        stderr,
        sample_count,
        exact,
    })
}

/// Packages the relaxation as its Bernoulli surrogate.
pub fn reduce_to_bernoulli(relax: &ExAnteRelaxation) -> BernoulliInstance {
    BernoulliInstance {
        value: relax.t.clone(),
        prob: relax.p.clone(),
        rule: relax.activation_rules(),
    }
}

/// Finite supports as (value, prob) lists when every law is discrete and the
/// joint outcome count fits the enumeration budget.
fn exact_support(dists: &[Dist]) -> Option<Vec<Vec<(f64, f64)>>> {
    let mut support = Vec::with_capacity(dists.len());
    let mut total: usize = 1;
    for d in dists {
        let outcomes = d.finite_outcomes()?;
        total = total.checked_mul(outcomes.len())?;
        if total > EXACT_OUTCOME_LIMIT {
            return None;
        }
        support.push(outcomes);
    }
    Some(support)
}

/// Walks every joint outcome with an odometer, accumulating the exact
/// probability that each item sits in the maximum-weight independent set
/// (ties broken by ascending id) with a strictly positive value.
fn enumerate_exact(m: &Matroid, support: &[Vec<(f64, f64)>]) -> Vec<f64> {
    let n = support.len();
    let mut p = vec![0.0; n];
    let mut index = vec![0usize; n];
    let mut weights = vec![0.0; n];
    loop {
        let mut prob = 1.0;
        for i in 0..n {
            let (value, mass) = support[i][index[i]];
            weights[i] = value;
            prob *= mass;
        }
        if prob > 0.0 {
            let picked = m.greedy_max_weight(&weights).expect("valid weights");
            for i in picked.iter() {
                if weights[i] > 0.0 {
                    p[i] += prob;
                }
            }
        }
        let mut pos = 0;
        loop {
            if pos == n {
                for q in &mut p {
                    *q = q.min(1.0);
                }
                return p;
            }
            index[pos] += 1;
            if index[pos] < support[pos].len() {
                break;
            }
            index[pos] = 0;
            pos += 1;
        }
    }
}

/// One Monte Carlo trial: sample values, then run the prophet's greedy with a
/// uniformly random tie order so that identically distributed items are
/// treated symmetrically.
fn sample_trial(m: &Matroid, dists: &[Dist], seed: u64, trial: u64) -> ItemSet {
    let mut rng = stream(seed, "exante", trial);
    let values: Vec<f64> = dists.iter().map(|d| d.sample(&mut rng)).collect();
    let priority: Vec<f64> = (0..dists.len())
        .map(|_| rand::Rng::gen::<f64>(&mut rng))
        .collect();
    let mut order: Vec<usize> = (0..dists.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .total_cmp(&values[a])
            .then(priority[a].total_cmp(&priority[b]))
    });
    let picked = m.greedy_in_order(&order);
    picked.iter().filter(|&i| values[i] > 0.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn point_masses_take_the_exact_path() {
        let m = Matroid::uniform(2, 1).unwrap();
        let dists = vec![Dist::point(5.0).unwrap(), Dist::point(3.0).unwrap()];
        let relax = estimate_ex_ante(&m, &dists, 10, 7).unwrap();
        assert!(relax.exact);
        assert_eq!(relax.p, vec![1.0, 0.0]);
        assert_eq!(relax.t[0], 5.0);
        assert_eq!(relax.bound(), 5.0);
        assert!(relax.tau[1].is_infinite());
        assert_eq!(relax.stderr, vec![0.0, 0.0]);
        // p = 1 with no mass at the threshold: the rule accepts everything.
        let rules = relax.activation_rules();
        assert!(rules[0].passes(5.0, 0.99));
    }

    #[test]
    fn exact_rank_one_pair_reproduces_hand_computation() {
        // X_0 ∈ {1, 3} evens, X_1 ≡ 2: the prophet takes item 0 exactly when
        // it shows 3, so p = (1/2, 1/2), t = (3, 2), and the bound ties the
        // true prophet value 2.5.
        let m = Matroid::uniform(2, 1).unwrap();
        let dists = vec![
            Dist::discrete(&[1.0, 3.0], &[0.5, 0.5]).unwrap(),
            Dist::point(2.0).unwrap(),
        ];
        let relax = estimate_ex_ante(&m, &dists, 10, 7).unwrap();
        assert!(relax.exact);
        assert_eq!(relax.sample_count, 2);
        assert_eq!(relax.p, vec![0.5, 0.5]);
        // τ_0 is the lower atom with a zero coin: active means strictly above,
        // which happens with probability exactly 1/2.
        assert_eq!(relax.tau, vec![1.0, 2.0]);
        assert_eq!(relax.t, vec![3.0, 2.0]);
        assert_eq!(relax.tie, vec![0.0, 0.5]);
        assert_eq!(relax.bound(), 2.5);
        let bern = reduce_to_bernoulli(&relax);
        assert_eq!(bern.value, vec![3.0, 2.0]);
        assert!(bern.rule[0].passes(3.0, 0.9));
        assert!(!bern.rule[0].passes(1.0, 0.0));
    }

    #[test]
    fn graphic_point_masses_stay_inside_the_polytope() {
        let g = Graph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        let m = Matroid::graphic(g);
        let dists = vec![
            Dist::point(3.0).unwrap(),
            Dist::point(2.0).unwrap(),
            Dist::point(1.0).unwrap(),
        ];
        let relax = estimate_ex_ante(&m, &dists, 10, 7).unwrap();
        assert_eq!(relax.p, vec![1.0, 1.0, 0.0]);
        assert_eq!(relax.bound(), 5.0);
        assert!(relax.p.iter().sum::<f64>() <= m.rank() as f64);
    }

    #[test]
    fn monte_carlo_splits_iid_items_evenly() {
        let m = Matroid::uniform(2, 1).unwrap();
        let dists = vec![
            Dist::uniform(0.0, 1.0).unwrap(),
            Dist::uniform(0.0, 1.0).unwrap(),
        ];
        let trials = 20_000;
        let relax = estimate_ex_ante(&m, &dists, trials, 11).unwrap();
        assert!(!relax.exact);
        // Exactly one item wins each trial, so p sums to 1 exactly and each
        // half sits within five standard errors of 1/2.
        assert!((relax.p[0] + relax.p[1] - 1.0).abs() < 1e-12);
        let sigma = (0.25f64 / trials as f64).sqrt();
        assert!((relax.p[0] - 0.5).abs() < 5.0 * sigma);
        // τ is the (1−p)-quantile of uniform[0,1], i.e. ≈ 1/2.
        assert!((relax.tau[0] - (1.0 - relax.p[0])).abs() < 1e-12);
        assert!(relax.t[0] >= relax.tau[0]);
    }

    #[test]
    fn single_unbounded_item_is_always_active() {
        let m = Matroid::uniform(1, 1).unwrap();
        let dists = vec![Dist::exponential(1.0).unwrap()];
        let relax = estimate_ex_ante(&m, &dists, 4_000, 3).unwrap();
        assert_eq!(relax.p, vec![1.0]);
        assert_eq!(relax.tau, vec![0.0]);
        assert!((relax.bound() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tie_coin_makes_the_activation_rate_exact() {
        let d = Dist::discrete(&[1.0, 2.0], &[0.5, 0.5]).unwrap();
        let rule = activation_rule(&d, 0.25);
        assert_eq!(rule.value, 2.0);
        assert_eq!(rule.tie_accept, 0.5);
        let mut rng = stream(5, "aux", 0);
        let trials = 40_000;
        let mut active = 0u32;
        for _ in 0..trials {
            let x = d.sample(&mut rng);
            let aux = rand::Rng::gen::<f64>(&mut rng);
            if rule.passes(x, aux) {
                active += 1;
            }
        }
        let rate = active as f64 / trials as f64;
        let sigma = (0.25f64 * 0.75 / trials as f64).sqrt();
        assert!((rate - 0.25).abs() < 5.0 * sigma);
    }
}
