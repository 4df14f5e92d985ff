//! Acceptance thresholds and the rank-1 construction.
//!
//! A threshold carries a value plus a tie coin: an item passes when its value
//! clears the bar outright, or equals it and an auxiliary uniform draw falls
//! under `tie_accept`. The coin is what keeps the probability calculations
//! exact for laws with atoms; continuous-only constructions set it to 1, which
//! reproduces the plain ≥ rule.

use crate::dist::Dist;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Threshold {
    pub value: f64,
    pub tie_accept: f64,
}

impl Threshold {
    /// Accepts nothing.
    pub fn never() -> Self {
        Threshold { value: f64::INFINITY, tie_accept: 0.0 }
    }

    /// Plain x ≥ v rule.
    pub fn at_least(v: f64) -> Self {
        Threshold { value: v, tie_accept: 1.0 }
    }

    pub fn is_never(&self) -> bool {
        self.value.is_infinite()
    }

    /// Whether value `x` clears this threshold, given the item's auxiliary
    /// uniform draw `aux` ∈ [0, 1).
    pub fn passes(&self, x: f64, aux: f64) -> bool {
        x > self.value || (x == self.value && aux < self.tie_accept)
    }
}

/// Per-item thresholds plus a note on which construction produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdVector {
    pub items: Vec<Threshold>,
    pub source: String,
}

impl ThresholdVector {
    pub fn all_never(n: usize, source: impl Into<String>) -> Self {
        ThresholdVector { items: vec![Threshold::never(); n], source: source.into() }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

fn max_cdf(dists: &[Dist], x: f64) -> f64 {
    dists.iter().map(|d| d.cdf(x)).product()
}

fn max_cdf_left(dists: &[Dist], x: f64) -> f64 {
    dists.iter().map(|d| d.cdf_left(x)).product()
}

/// The shared threshold of the rank-1 mechanism: the smallest value T with
/// P[max ≤ T] ≥ ½, together with a tie coin q calibrated so that a pass
/// happens with probability exactly ½ — P[every item stays under (T, q)] = ½.
pub fn median_of_max(dists: &[Dist]) -> Threshold {
    assert!(!dists.is_empty());
    // An atom where the product CDF jumps over ½ is the threshold exactly.
    let mut atom_values: Vec<f64> = dists
        .iter()
        .flat_map(|d| d.finite_outcomes().unwrap_or_default())
        .map(|(v, _)| v)
        .collect();
    atom_values.sort_by(f64::total_cmp);
    atom_values.dedup();
    let mut t = None;
    for &v in &atom_values {
        if max_cdf(dists, v) >= 0.5 && max_cdf_left(dists, v) < 0.5 {
            t = Some(v);
            break;
        }
    }
    let t = t.unwrap_or_else(|| {
        // Continuous crossing: bisect down to adjacent floats. If the true
        // boundary is a jump whose left limit is exactly ½, this lands on the
        // atom itself, and the coin below still calibrates correctly.
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        while max_cdf(dists, hi) < 0.5 {
            hi *= 2.0;
        }
        if max_cdf(dists, lo) >= 0.5 {
            return lo;
        }
        loop {
            let mid = lo / 2.0 + hi / 2.0;
            if mid <= lo || mid >= hi {
                return hi;
            }
            if max_cdf(dists, mid) >= 0.5 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    });

    let atoms: Vec<f64> = dists.iter().map(|d| d.atom(t)).collect();
    if atoms.iter().all(|&a| a == 0.0) {
        return Threshold::at_least(t);
    }
    // P[no item passes] as a function of the coin: every item independently
    // stays under by being strictly below or by losing the coin flip at T.
    let stay_prob = |q: f64| -> f64 {
        dists
            .iter()
            .zip(&atoms)
            .map(|(d, a)| d.cdf_left(t) + (1.0 - q) * a)
            .product()
    };
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    debug_assert!(stay_prob(0.0) >= 0.5 - 1e-12 && stay_prob(1.0) <= 0.5 + 1e-12);
    for _ in 0..200 {
        let mid = (lo + hi) / 2.0;
        if stay_prob(mid) >= 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON {
            break;
        }
    }
    Threshold { value: t, tie_accept: (lo + hi) / 2.0 }
}

/// Thresholds of the rank-1 mechanism: every item gets the same calibrated
/// median-of-max bar; the first item to clear it is taken.
pub fn single_item_thresholds(dists: &[Dist]) -> ThresholdVector {
    let shared = median_of_max(dists);
    ThresholdVector { items: vec![shared; dists.len()], source: "single-item".into() }
}
