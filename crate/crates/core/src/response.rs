//! Response functions `F` appearing in strategy-revision rates.
//!
//! A response function maps a (signed) payoff or payoff difference to a
//! nonnegative propensity. The regularized positive part
//! `F_k(s) = log(exp(k s) + 1) / k` is the workhorse: it is smooth,
//! satisfies `F(s) - F(-s) = s` exactly, and converges uniformly to
//! `max(s, 0)` as `k -> infinity`.

/// Catalog of response functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResponseFunction {
    /// `F(s) = max(s, 0)`; the kappa = infinity limit of `Regularized`.
    PositivePart,
    /// `F(s) = log(exp(kappa s) + 1) / kappa`.
    Regularized { kappa: f64 },
    /// `F(s) = exp(s)`.
    Exponential,
    /// `F(s) = min(1, exp(s))`, the Metropolis acceptance rule.
    MetropolisMin,
    /// `F(s) = max(offset + slope * s, 0)`, truncated to stay nonnegative.
    IdentityAffine { offset: f64, slope: f64 },
}

impl ResponseFunction {
    /// Evaluate `F(s)`.
    ///
    /// All exponentials are overflow-safe: `Regularized` uses
    /// `max(s, 0) + log1p(exp(-kappa |s|)) / kappa`, which equals the
    /// defining expression but never exponentiates a large argument, and
    /// makes `F(s) - F(-s) = s` hold to the last bit.
    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        match *self {
            ResponseFunction::PositivePart => s.max(0.0),
            ResponseFunction::Regularized { kappa } => {
                s.max(0.0) + (-kappa * s.abs()).exp().ln_1p() / kappa
            }
            ResponseFunction::Exponential => s.exp(),
            ResponseFunction::MetropolisMin => {
                if s >= 0.0 {
                    1.0
                } else {
                    s.exp()
                }
            }
            ResponseFunction::IdentityAffine { offset, slope } => (offset + slope * s).max(0.0),
        }
    }

    /// Derivative `F'(s)`.
    ///
    /// At kink points the symmetric (midpoint) value is used, consistent
    /// with the kappa -> infinity limit of the regularized family.
    #[inline]
    pub fn derivative(&self, s: f64) -> f64 {
        match *self {
            ResponseFunction::PositivePart => {
                if s > 0.0 {
                    1.0
                } else if s < 0.0 {
                    0.0
                } else {
                    0.5
                }
            }
            // F_k'(s) = 1 / (1 + exp(-kappa s)), the logistic function.
            ResponseFunction::Regularized { kappa } => logistic(kappa * s),
            ResponseFunction::Exponential => s.exp(),
            ResponseFunction::MetropolisMin => {
                if s > 0.0 {
                    0.0
                } else if s < 0.0 {
                    s.exp()
                } else {
                    0.5
                }
            }
            ResponseFunction::IdentityAffine { offset, slope } => {
                if offset + slope * s > 0.0 {
                    slope
                } else {
                    0.0
                }
            }
        }
    }

    /// Upper bound of `F` over the closed interval `[lo, hi]`.
    ///
    /// Every catalog member is monotone on each side of its kink, so the
    /// supremum is attained at an endpoint (or at the kink for the affine
    /// family, where the value is zero anyway).
    pub fn sup_on(&self, lo: f64, hi: f64) -> f64 {
        self.eval(lo).max(self.eval(hi))
    }
}

/// Logistic function `l(t) = 1 / (1 + exp(-t))`, overflow-safe.
#[inline]
pub fn logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// Public alias for evaluating a response function; `F.eval(s)` in method form.
pub fn eval_response(f: ResponseFunction, s: f64) -> f64 {
    f.eval(s)
}
