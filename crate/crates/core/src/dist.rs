//! Nonnegative value distributions: five laws behind one quantile/tail API.
//!
//! Quantiles follow the right-continuous convention inf{x : F(x) ≥ q}, and
//! the tail expectation at mass p is the mean of the top-p slice of the law,
//! (1/p)∫_{1−p}^1 F⁻¹(u) du — for discrete laws this splits the boundary atom
//! fractionally, which is exactly what the downstream tie-breaking expects.

use crate::error::Error;
use rand::Rng;

const PROB_SUM_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
enum Law {
    Point { value: f64 },
    /// Ascending distinct values with their probabilities and running totals.
    Discrete { values: Vec<f64>, probs: Vec<f64>, cum: Vec<f64> },
    Uniform { lo: f64, hi: f64 },
    Exponential { rate: f64 },
    /// Density ∝ x^(−shape−1) on [1, cap].
    Pareto { shape: f64, cap: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dist(Law);

impl Dist {
    pub fn point(value: f64) -> Result<Self, Error> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::input(format!("point mass must be finite and nonnegative, got {value}")));
        }
        Ok(Dist(Law::Point { value }))
    }

    pub fn discrete(values: &[f64], probs: &[f64]) -> Result<Self, Error> {
        if values.len() != probs.len() || values.is_empty() {
            return Err(Error::input("discrete law needs matching nonempty values and probs"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::input("discrete values must be finite and nonnegative"));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::input("discrete probabilities must be nonnegative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::input(format!("discrete probabilities sum to {total}, not 1")));
        }
        let mut pairs: Vec<(f64, f64)> = values.iter().copied().zip(probs.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut vs: Vec<f64> = Vec::new();
        let mut ps: Vec<f64> = Vec::new();
        for (v, p) in pairs {
            if p == 0.0 {
                continue;
            }
            if vs.last() == Some(&v) {
                *ps.last_mut().unwrap() += p;
            } else {
                vs.push(v);
                ps.push(p);
            }
        }
        if vs.is_empty() {
            return Err(Error::input("discrete law has no positive-probability outcome"));
        }
        let mut cum = Vec::with_capacity(ps.len());
        let mut acc = 0.0;
        for &p in &ps {
            acc += p;
            cum.push(acc);
        }
        *cum.last_mut().unwrap() = 1.0;
        Ok(Dist(Law::Discrete { values: vs, probs: ps, cum }))
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self, Error> {
        if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || lo >= hi {
            return Err(Error::input(format!("uniform interval [{lo}, {hi}] must be nonnegative with lo < hi")));
        }
        Ok(Dist(Law::Uniform { lo, hi }))
    }

    pub fn exponential(rate: f64) -> Result<Self, Error> {
        if !rate.is_finite() || rate <= 0.0 {
            return Err(Error::input(format!("exponential rate must be positive, got {rate}")));
        }
        Ok(Dist(Law::Exponential { rate }))
    }

    pub fn pareto(shape: f64, cap: f64) -> Result<Self, Error> {
        if !shape.is_finite() || shape <= 0.0 {
            return Err(Error::input(format!("pareto shape must be positive, got {shape}")));
        }
        if !cap.is_finite() || cap <= 1.0 {
            return Err(Error::input(format!("pareto cap must exceed the scale 1, got {cap}")));
        }
        Ok(Dist(Law::Pareto { shape, cap }))
    }

    /// P[X ≤ x].
    pub fn cdf(&self, x: f64) -> f64 {
        match &self.0 {
            Law::Point { value } => {
                if x >= *value {
                    1.0
                } else {
                    0.0
                }
            }
            Law::Discrete { values, cum, .. } => {
                let idx = values.partition_point(|v| *v <= x);
                if idx == 0 {
                    0.0
                } else {
                    cum[idx - 1]
                }
            }
            Law::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Law::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    1.0 - (-rate * x).exp()
                }
            }
            Law::Pareto { shape, cap } => {
                if x < 1.0 {
                    0.0
                } else if x >= *cap {
                    1.0
                } else {
                    (1.0 - x.powf(-shape)) / (1.0 - cap.powf(-shape))
                }
            }
        }
    }

    /// P[X < x].
    pub fn cdf_left(&self, x: f64) -> f64 {
        match &self.0 {
            Law::Point { value } => {
                if x > *value {
                    1.0
                } else {
                    0.0
                }
            }
            Law::Discrete { values, cum, .. } => {
                let idx = values.partition_point(|v| *v < x);
                if idx == 0 {
                    0.0
                } else {
                    cum[idx - 1]
                }
            }
            _ => self.cdf(x),
        }
    }

    /// P[X = x], nonzero only at atoms.
    pub fn atom(&self, x: f64) -> f64 {
        self.cdf(x) - self.cdf_left(x)
    }

    /// inf{x : F(x) ≥ q}, right-continuous; by convention quantile(0) = 0.
    pub fn quantile(&self, q: f64) -> f64 {
        assert!((0.0..=1.0).contains(&q), "quantile needs q in [0,1], got {q}");
        if q == 0.0 {
            return 0.0;
        }
        match &self.0 {
            Law::Point { value } => *value,
            Law::Discrete { values, cum, .. } => {
                let idx = cum.partition_point(|c| *c < q);
                values[idx.min(values.len() - 1)]
            }
            Law::Uniform { lo, hi } => lo + q * (hi - lo),
            Law::Exponential { rate } => {
                if q >= 1.0 {
                    f64::INFINITY
                } else {
                    -(1.0 - q).ln() / rate
                }
            }
            Law::Pareto { shape, cap } => {
                let scaled = 1.0 - q * (1.0 - cap.powf(-shape));
                scaled.powf(-1.0 / shape).min(*cap)
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match &self.0 {
            Law::Point { value } => *value,
            Law::Discrete { values, probs, .. } => {
                values.iter().zip(probs).map(|(v, p)| v * p).sum()
            }
            Law::Uniform { lo, hi } => (lo + hi) / 2.0,
            Law::Exponential { rate } => 1.0 / rate,
            Law::Pareto { shape, cap } => {
                let norm = 1.0 - cap.powf(-shape);
                if (shape - 1.0).abs() < 1e-12 {
                    cap.ln() / norm
                } else {
                    shape / (1.0 - shape) * (cap.powf(1.0 - shape) - 1.0) / norm
                }
            }
        }
    }

    /// Supremum of the support, None when unbounded.
    pub fn ess_sup(&self) -> Option<f64> {
        match &self.0 {
            Law::Point { value } => Some(*value),
            Law::Discrete { values, .. } => Some(*values.last().unwrap()),
            Law::Uniform { hi, .. } => Some(*hi),
            Law::Exponential { .. } => None,
            Law::Pareto { cap, .. } => Some(*cap),
        }
    }

    /// Mean of the top-p probability slice: E[X | X in its own top p], with
    /// boundary atoms split fractionally. p = 0 degenerates to the essential
    /// supremum and fails on unbounded laws.
    pub fn tail_expectation(&self, p: f64) -> Result<f64, Error> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::input(format!("tail mass must lie in [0,1], got {p}")));
        }
        if p == 0.0 {
            return self
                .ess_sup()
                .ok_or_else(|| Error::input("unbounded tail: p = 0 on a law without an essential supremum"));
        }
        if p == 1.0 {
            return Ok(self.mean());
        }
        Ok(match &self.0 {
            Law::Point { value } => *value,
            Law::Discrete { values, probs, .. } => {
                let mut remaining = p;
                let mut total = 0.0;
                for (v, pr) in values.iter().zip(probs).rev() {
                    let take = pr.min(remaining);
                    total += take * v;
                    remaining -= take;
                    if remaining <= 0.0 {
                        break;
                    }
                }
                total / p
            }
            Law::Uniform { hi, .. } => {
                let tau = self.quantile(1.0 - p);
                (tau + hi) / 2.0
            }
            Law::Exponential { rate } => -p.ln() / rate + 1.0 / rate,
            Law::Pareto { shape, cap } => {
                let tau = self.quantile(1.0 - p);
                let norm = 1.0 - cap.powf(-shape);
                let integral = if (shape - 1.0).abs() < 1e-12 {
                    (cap.ln() - tau.ln()) / norm
                } else {
                    shape / (1.0 - shape) * (cap.powf(1.0 - shape) - tau.powf(1.0 - shape)) / norm
                };
                integral / p
            }
        })
    }

    /// Inverse-transform sampling.
    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        // 1 − g lies in (0, 1]; nudge the astronomically rare rounding to 1.0
        // back inside so unbounded quantiles stay finite.
        let g: f64 = rng.gen();
        let mut u = 1.0 - g;
        if u >= 1.0 {
            u = 1.0 - f64::EPSILON / 2.0;
        }
        match &self.0 {
            Law::Discrete { values, cum, .. } => {
                let idx = cum.partition_point(|c| *c < u);
                values[idx.min(values.len() - 1)]
            }
            _ => self.quantile(u),
        }
    }

    /// The full outcome list for finitely supported laws, None otherwise.
    pub fn finite_outcomes(&self) -> Option<Vec<(f64, f64)>> {
        match &self.0 {
            Law::Point { value } => Some(vec![(*value, 1.0)]),
            Law::Discrete { values, probs, .. } => {
                Some(values.iter().copied().zip(probs.iter().copied()).collect())
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_match_known_points() {
        assert_eq!(Dist::uniform(0.0, 1.0).unwrap().quantile(0.75), 0.75);
        let pm = Dist::point(5.0).unwrap();
        for q in [0.001, 0.5, 1.0] {
            assert_eq!(pm.quantile(q), 5.0);
        }
        let ex = Dist::exponential(1.0).unwrap();
        assert!((ex.quantile(0.5) - std::f64::consts::LN_2).abs() < 1e-12);
        // Right-continuity on atoms: the quantile jumps to the atom exactly.
        let d = Dist::discrete(&[1.0, 2.0], &[0.5, 0.5]).unwrap();
        assert_eq!(d.quantile(0.5), 1.0);
        assert_eq!(d.quantile(0.5 + 1e-9), 2.0);
        assert_eq!(d.quantile(1.0), 2.0);
    }

    #[test]
    fn tail_expectations_match_closed_forms() {
        let u = Dist::uniform(0.0, 1.0).unwrap();
        assert!((u.tail_expectation(0.5).unwrap() - 0.75).abs() < 1e-12);
        assert!((u.tail_expectation(1.0).unwrap() - 0.5).abs() < 1e-12);
        let ex = Dist::exponential(1.0).unwrap();
        assert!((ex.tail_expectation(0.5).unwrap() - (1.0 + std::f64::consts::LN_2)).abs() < 1e-12);
        // Discrete atom splitting: top quarter of {1: 0.9, 10: 0.1} is all of
        // the 10-atom plus 0.15 of the 1-atom.
        let d = Dist::discrete(&[1.0, 10.0], &[0.9, 0.1]).unwrap();
        assert!((d.tail_expectation(0.25).unwrap() - 4.6).abs() < 1e-12);
    }

    #[test]
    fn tail_expectation_at_zero_is_the_sup_or_an_error() {
        assert_eq!(Dist::uniform(2.0, 3.0).unwrap().tail_expectation(0.0).unwrap(), 3.0);
        assert!(Dist::exponential(2.0).unwrap().tail_expectation(0.0).is_err());
    }

    #[test]
    fn tail_expectation_is_nonincreasing_in_p() {
        let laws = [
            Dist::uniform(1.0, 4.0).unwrap(),
            Dist::exponential(0.7).unwrap(),
            Dist::pareto(1.5, 20.0).unwrap(),
            Dist::pareto(1.0, 8.0).unwrap(),
            Dist::discrete(&[0.0, 2.0, 7.0], &[0.3, 0.5, 0.2]).unwrap(),
        ];
        for law in &laws {
            let mut prev = f64::INFINITY;
            for k in 1..=40 {
                let t = law.tail_expectation(k as f64 / 40.0).unwrap();
                assert!(t <= prev + 1e-9, "{law:?} at p={}", k as f64 / 40.0);
                prev = t;
            }
            assert!((law.tail_expectation(1.0).unwrap() - law.mean()).abs() < 1e-9);
        }
    }

    #[test]
    fn cdf_and_quantile_are_consistent() {
        let laws = [
            Dist::uniform(0.5, 2.5).unwrap(),
            Dist::exponential(2.0).unwrap(),
            Dist::pareto(2.0, 10.0).unwrap(),
            Dist::discrete(&[1.0, 3.0, 4.5], &[0.2, 0.5, 0.3]).unwrap(),
            Dist::point(2.0).unwrap(),
        ];
        for law in &laws {
            for k in 1..1000 {
                let q = k as f64 / 1000.0;
                let x = law.quantile(q);
                assert!(law.cdf(x) >= q - 1e-12, "{law:?} q={q}");
            }
            let top = law.ess_sup().unwrap_or_else(|| law.quantile(0.9999));
            for k in 0..1000 {
                let x = top * k as f64 / 1000.0;
                let back = law.quantile(law.cdf(x));
                assert!(back <= x + 1e-12, "{law:?} x={x}");
            }
        }
    }

    #[test]
    fn discrete_constructor_sorts_merges_and_validates() {
        let d = Dist::discrete(&[3.0, 1.0, 3.0], &[0.25, 0.5, 0.25]).unwrap();
        assert_eq!(d.finite_outcomes().unwrap(), vec![(1.0, 0.5), (3.0, 0.5)]);
        assert_eq!(d.atom(3.0), 0.5);
        assert_eq!(d.atom(2.0), 0.0);
        assert!(Dist::discrete(&[1.0], &[0.9]).is_err());
        assert!(Dist::discrete(&[-1.0, 2.0], &[0.5, 0.5]).is_err());
        assert!(Dist::uniform(3.0, 2.0).is_err());
        assert!(Dist::pareto(2.0, 0.5).is_err());
    }

    #[test]
    fn sampling_tracks_the_law() {
        let mut rng = crate::rng::stream(11, "dist-test", 0);
        let d = Dist::discrete(&[1.0, 2.0, 5.0], &[0.2, 0.3, 0.5]).unwrap();
        let n = 20_000;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            match d.sample(&mut rng) {
                x if x == 1.0 => counts[0] += 1,
                x if x == 2.0 => counts[1] += 1,
                _ => counts[2] += 1,
            }
        }
        for (c, p) in counts.iter().zip([0.2, 0.3, 0.5]) {
            let freq = *c as f64 / n as f64;
            // 5σ band for a Bernoulli(p) frequency estimate.
            assert!((freq - p).abs() < 5.0 * (p * (1.0 - p) / n as f64).sqrt());
        }
        let u = Dist::uniform(1.0, 2.0).unwrap();
        let mean: f64 = (0..n).map(|_| u.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 1.5).abs() < 0.02);
    }

    #[test]
    fn pareto_cdf_forms() {
        let p = Dist::pareto(1.0, 8.0).unwrap();
        assert_eq!(p.cdf(0.5), 0.0);
        assert_eq!(p.cdf(8.0), 1.0);
        // Midpoint check against the direct formula at shape 1.
        let x = 2.0;
        let expect = (1.0 - 1.0 / x) / (1.0 - 1.0 / 8.0);
        assert!((p.cdf(x) - expect).abs() < 1e-12);
        assert!((p.quantile(p.cdf(x)) - x).abs() < 1e-9);
    }
}
