//! Strategy-revision rate rules.
//!
//! A rule turns the local payoff vector and the sampled-neighbor weights
//! into the rate at which an agent currently playing `i` switches to `k`.
//! *Innovative* rules can introduce strategies absent from the
//! neighborhood; *non-innovative* (imitative) rules carry a factor
//! `w(k)` — the probability of sampling a `k`-neighbor — and therefore
//! never resurrect an extinct strategy. *Comparing* rules act on the
//! payoff difference, *targeting* rules on the new strategy's payoff
//! alone.

use crate::game::Game;
use crate::response::ResponseFunction;
use crate::rng::Rng;

/// Catalog of rate families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateRule {
    /// `c = F(payoff(k))`.
    TargetingInnovative(ResponseFunction),
    /// `c = F(payoff(k) - payoff(i))`.
    ComparingInnovative(ResponseFunction),
    /// `c = w(k) F(payoff(k))`.
    TargetingNonInnovative(ResponseFunction),
    /// `c = w(k) F(payoff(k) - payoff(i))`; the imitative family whose
    /// mean-field limit is the replicator dynamics whenever
    /// `F(s) - F(-s) = s`.
    ComparingNonInnovative(ResponseFunction),
    /// `c = exp(payoff(k)) / sum_l exp(payoff(l))`, the logit choice rule.
    LogitChoice,
}

impl RateRule {
    /// Limiting rate `c(i -> k)` given the payoff vector and neighbor
    /// weights induced by the local strategy field.
    ///
    /// `payoff[j]` must equal `sum_l a(j, l) m(l)` for the local field `m`,
    /// and `neighbor_weights` must be `m` itself (entries in `[0, 1]`,
    /// summing to at most 1). Logit rates are computed with log-sum-exp
    /// stabilization.
    pub fn mean_rate(&self, i: usize, k: usize, payoff: &[f64], neighbor_weights: &[f64]) -> f64 {
        match *self {
            RateRule::TargetingInnovative(f) => f.eval(payoff[k]),
            RateRule::ComparingInnovative(f) => f.eval(payoff[k] - payoff[i]),
            RateRule::TargetingNonInnovative(f) => neighbor_weights[k] * f.eval(payoff[k]),
            RateRule::ComparingNonInnovative(f) => {
                neighbor_weights[k] * f.eval(payoff[k] - payoff[i])
            }
            RateRule::LogitChoice => softmax_component(payoff, k),
        }
    }

    /// True for the families with a sampled-neighbor factor `w(k)`.
    pub fn is_non_innovative(&self) -> bool {
        matches!(
            self,
            RateRule::TargetingNonInnovative(_) | RateRule::ComparingNonInnovative(_)
        )
    }

    /// Uniform rate bound `M` over the payoff polytope of `game`.
    ///
    /// Payoffs against mixed profiles range over the row intervals of the
    /// payoff matrix, and every response function attains its supremum on
    /// an interval at an endpoint, so the supremum is evaluated exactly;
    /// a 1.05 safety factor covers rounding. Logit rates are probabilities
    /// and `M = 1` is exact.
    pub fn rate_bound(&self, game: &Game) -> f64 {
        let n = game.num_strategies();
        let row_min = |j: usize| (0..n).map(|l| game.payoff(j, l)).fold(f64::INFINITY, f64::min);
        let row_max = |j: usize| {
            (0..n).map(|l| game.payoff(j, l)).fold(f64::NEG_INFINITY, f64::max)
        };
        match *self {
            RateRule::LogitChoice => 1.0,
            RateRule::TargetingInnovative(f) | RateRule::TargetingNonInnovative(f) => {
                1.05 * (0..n).map(|k| f.sup_on(row_min(k), row_max(k))).fold(0.0, f64::max)
            }
            RateRule::ComparingInnovative(f) | RateRule::ComparingNonInnovative(f) => {
                let mut sup: f64 = 0.0;
                for k in 0..n {
                    for i in 0..n {
                        sup = sup.max(f.sup_on(row_min(k) - row_max(i), row_max(k) - row_min(i)));
                    }
                }
                1.05 * sup
            }
        }
    }

    /// Empirical Lipschitz constant of `m -> mean_rate` in the L1 norm of
    /// the local field, measured over random field pairs and small
    /// perturbations. Recorded in run manifests; the theory guarantees
    /// existence but not a value.
    pub fn measure_lipschitz(&self, game: &Game, samples: usize, rng: &mut Rng) -> f64 {
        let n = game.num_strategies();
        let mut p1 = vec![0.0; n];
        let mut p2 = vec![0.0; n];
        let mut sup: f64 = 0.0;
        for _ in 0..samples {
            let m1 = sample_simplex(rng, n);
            // One far pair and one near pair per iteration.
            for m2 in [sample_simplex(rng, n), perturb_simplex(&m1, 1e-4, rng)] {
                let l1: f64 = m1.iter().zip(&m2).map(|(a, b)| (a - b).abs()).sum();
                if l1 < 1e-12 {
                    continue;
                }
                game.payoff_vector(&m1, &mut p1);
                game.payoff_vector(&m2, &mut p2);
                for i in 0..n {
                    for k in 0..n {
                        let d = (self.mean_rate(i, k, &p1, &m1)
                            - self.mean_rate(i, k, &p2, &m2))
                        .abs();
                        sup = sup.max(d / l1);
                    }
                }
            }
        }
        sup
    }
}

/// `exp(payoff[k]) / sum_l exp(payoff[l])`, stabilized by subtracting the
/// maximum before exponentiating.
#[inline]
pub fn softmax_component(payoff: &[f64], k: usize) -> f64 {
    let m = payoff.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let denom: f64 = payoff.iter().map(|p| (p - m).exp()).sum();
    (payoff[k] - m).exp() / denom
}

/// Fill `out` with the full logit probability vector.
pub fn softmax(payoff: &[f64], out: &mut [f64]) {
    let m = payoff.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut denom = 0.0;
    for (o, p) in out.iter_mut().zip(payoff) {
        *o = (p - m).exp();
        denom += *o;
    }
    for o in out.iter_mut() {
        *o /= denom;
    }
}

/// Uniform draw from the probability simplex (Dirichlet(1, .., 1)).
pub fn sample_simplex(rng: &mut Rng, n: usize) -> Vec<f64> {
    use rand::Rng as _;
    let mut v: Vec<f64> = (0..n)
        .map(|_| -(rng.random::<f64>().max(1e-300)).ln())
        .collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

fn perturb_simplex(m: &[f64], eps: f64, rng: &mut Rng) -> Vec<f64> {
    use rand::Rng as _;
    let mut v: Vec<f64> = m
        .iter()
        .map(|&x| (x + eps * (rng.random::<f64>() - 0.5)).clamp(0.0, 1.0))
        .collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}
