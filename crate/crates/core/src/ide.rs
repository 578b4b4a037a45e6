//! Mesoscopic integro-differential equations.
//!
//! The density field obeys the input-output equation
//!
//! ```text
//! d/dt f(u,i) = sum_k c(u,k,i,f) f(u,k) - f(u,i) sum_k c(u,i,k,f)
//! ```
//!
//! with rates built from the convolutions `J * f(u, l)`. Two-strategy
//! coordination games admit scalar reductions: writing `r` for `J * p`
//! and `s` for `p`, the replicator form is
//! `F_R(r,s) = (1-s) r F_k(beta (r - zeta)) - s (1-r) F_k(beta (zeta - r))`
//! and the logit form is `F_L(r,s) = l(beta (r - zeta)) - s`.
//!
//! Time integration is classical RK4 with a fixed step; on periodic grids
//! the convolution goes through FFT, on fixed-boundary grids through
//! direct quadrature over the frozen collar, and boundary nodes keep a
//! zero tendency.

use crate::fft::Convolver;
use crate::field::DensityField;
use crate::game::{coordination_params, CoordinationParams, Game};
use crate::grid::SpatialGrid;
use crate::kernel::DiscreteKernel;
use crate::rates::{softmax, RateRule};
use crate::response::{logistic, ResponseFunction};
use crate::{Error, Result};

/// Regularization parameter of the replicator response, including the
/// sharp `kappa = infinity` limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kappa {
    Finite(f64),
    Infinite,
}

impl Kappa {
    /// The response function `F_kappa`.
    pub fn response(self) -> ResponseFunction {
        match self {
            Kappa::Finite(kappa) => ResponseFunction::Regularized { kappa },
            Kappa::Infinite => ResponseFunction::PositivePart,
        }
    }

    /// `F_kappa(s)`.
    #[inline]
    pub fn f(self, s: f64) -> f64 {
        self.response().eval(s)
    }

    /// `F_kappa'(s)`; the symmetric value `1/2` at the kink when sharp.
    #[inline]
    pub fn df(self, s: f64) -> f64 {
        self.response().derivative(s)
    }

    /// `F_kappa(0) = log(2) / kappa`.
    pub fn f_zero(self) -> f64 {
        match self {
            Kappa::Finite(kappa) => std::f64::consts::LN_2 / kappa,
            Kappa::Infinite => 0.0,
        }
    }
}

/// Which scalar reduction a two-strategy dynamic uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReducedFamily {
    Replicator,
    Logit,
}

/// The right-hand-side families solvable by [`IdeSystem`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dynamic {
    /// General input-output dynamics for an arbitrary rate rule.
    InputOutput(RateRule),
    /// Logit choice (perturbed best response); `InputOutput(LogitChoice)`.
    Logit,
    /// Imitative rule with response `F_kappa`; the spatial replicator.
    ImitativeReplicator(Kappa),
    /// Growth proportional to fitness minus average fitness.
    BiologicalReplicator,
    /// Scalar two-strategy replicator reduction `F_R`.
    ReducedReplicator(Kappa),
    /// Scalar two-strategy logit reduction `F_L`.
    ReducedLogit,
}

impl Dynamic {
    /// The rate rule realizing an input-output dynamic, if it is one.
    pub fn rate_rule(&self) -> Option<RateRule> {
        match *self {
            Dynamic::InputOutput(rule) => Some(rule),
            Dynamic::Logit => Some(RateRule::LogitChoice),
            Dynamic::ImitativeReplicator(kappa) => {
                Some(RateRule::ComparingNonInnovative(kappa.response()))
            }
            _ => None,
        }
    }

    fn needs_reduction(&self) -> bool {
        matches!(self, Dynamic::ReducedReplicator(_) | Dynamic::ReducedLogit)
    }
}

/// Scalar reduced right-hand side `F_R` / `F_L` with `r` standing for
/// `J * p` and `s` for `p`.
pub fn reduced_f(
    family: ReducedFamily,
    kappa: Kappa,
    params: &CoordinationParams,
    r: f64,
    s: f64,
) -> f64 {
    match family {
        ReducedFamily::Replicator => {
            let gap = params.payoff_gap(r);
            (1.0 - s) * r * kappa.f(gap) - s * (1.0 - r) * kappa.f(-gap)
        }
        ReducedFamily::Logit => logistic(params.payoff_gap(r)) - s,
    }
}

/// Result of a time integration.
pub struct Integration {
    /// Fields at the requested snapshot times.
    pub snapshots: Vec<(f64, DensityField)>,
    /// State at `t_end`.
    pub final_field: DensityField,
    pub steps: usize,
    /// Steps on which a simplex projection was applied.
    pub projections: usize,
    /// Largest node-wise mass drift observed before projection.
    pub max_drift: f64,
}

/// A configured IDE: game, kernel, dynamic and grid, with FFT plans and
/// scratch buffers. `rhs` is pure in the field; one integration owns the
/// system.
pub struct IdeSystem {
    game: Game,
    params: Option<CoordinationParams>,
    dynamic: Dynamic,
    grid: SpatialGrid,
    conv: Convolver,
    n: usize,
    chan: Vec<f64>,
    conv_out: Vec<Vec<f64>>,
}

impl IdeSystem {
    pub fn new(
        game: Game,
        dynamic: Dynamic,
        grid: SpatialGrid,
        kernel: DiscreteKernel,
    ) -> Result<Self> {
        let params = coordination_params(&game).ok();
        if dynamic.needs_reduction() && params.is_none() {
            return Err(Error::DynamicMismatch(
                "two-strategy reduced dynamics require a normalized coordination game".into(),
            ));
        }
        let n = game.num_strategies();
        let nodes = grid.len();
        let conv = Convolver::new(&grid, &kernel);
        Ok(Self {
            game,
            params,
            dynamic,
            grid,
            conv,
            n,
            chan: vec![0.0; nodes],
            conv_out: vec![vec![0.0; nodes]; n],
        })
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn dynamic(&self) -> Dynamic {
        self.dynamic
    }

    /// Tendency `df/dt` for the current field, written into `out`
    /// (node-major, same layout as the field values). Frozen nodes get 0.
    pub fn rhs(&mut self, f: &DensityField, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.grid.len() * self.n);
        self.convolve_channels(f);
        match self.dynamic {
            Dynamic::ReducedReplicator(kappa) => {
                self.reduced_rhs(f, out, ReducedFamily::Replicator, kappa)
            }
            Dynamic::ReducedLogit => self.reduced_rhs(f, out, ReducedFamily::Logit, Kappa::Infinite),
            Dynamic::BiologicalReplicator => self.biological_rhs(f, out),
            Dynamic::Logit => self.logit_rhs(f, out),
            Dynamic::InputOutput(rule) => match rule {
                RateRule::LogitChoice => self.logit_rhs(f, out),
                _ => self.input_output_rhs(f, out, rule),
            },
            Dynamic::ImitativeReplicator(kappa) => self.input_output_rhs(
                f,
                out,
                RateRule::ComparingNonInnovative(kappa.response()),
            ),
        }
        if !self.grid.is_periodic() {
            for node in 0..self.grid.len() {
                if !self.grid.is_active(node) {
                    out[node * self.n..(node + 1) * self.n].fill(0.0);
                }
            }
        }
    }

    fn convolve_channels(&mut self, f: &DensityField) {
        for l in 0..self.n {
            f.channel(l, &mut self.chan);
            self.conv.convolve(&self.chan, &mut self.conv_out[l]);
        }
    }

    fn input_output_rhs(&mut self, f: &DensityField, out: &mut [f64], rule: RateRule) {
        let n = self.n;
        let mut weights = vec![0.0; n];
        let mut payoff = vec![0.0; n];
        let mut rate = vec![0.0; n * n];
        for node in 0..self.grid.len() {
            for l in 0..n {
                weights[l] = self.conv_out[l][node];
            }
            self.game.payoff_vector(&weights, &mut payoff);
            for i in 0..n {
                for k in 0..n {
                    rate[i * n + k] = rule.mean_rate(i, k, &payoff, &weights);
                }
            }
            let fu = f.node(node);
            let o = &mut out[node * n..(node + 1) * n];
            for i in 0..n {
                let inflow: f64 = (0..n).map(|k| rate[k * n + i] * fu[k]).sum();
                let outflow: f64 = (0..n).map(|k| rate[i * n + k]).sum();
                o[i] = inflow - fu[i] * outflow;
            }
        }
    }

    // Logit rates do not depend on the current strategy, so the
    // input-output sum collapses to softmax(payoff) - f.
    fn logit_rhs(&mut self, f: &DensityField, out: &mut [f64]) {
        let n = self.n;
        let mut weights = vec![0.0; n];
        let mut payoff = vec![0.0; n];
        let mut soft = vec![0.0; n];
        for node in 0..self.grid.len() {
            for l in 0..n {
                weights[l] = self.conv_out[l][node];
            }
            self.game.payoff_vector(&weights, &mut payoff);
            softmax(&payoff, &mut soft);
            let fu = f.node(node);
            let o = &mut out[node * n..(node + 1) * n];
            for i in 0..n {
                o[i] = soft[i] - fu[i];
            }
        }
    }

    fn biological_rhs(&mut self, f: &DensityField, out: &mut [f64]) {
        let n = self.n;
        let mut weights = vec![0.0; n];
        let mut payoff = vec![0.0; n];
        for node in 0..self.grid.len() {
            for l in 0..n {
                weights[l] = self.conv_out[l][node];
            }
            self.game.payoff_vector(&weights, &mut payoff);
            let fu = f.node(node);
            let avg: f64 = (0..n).map(|k| fu[k] * payoff[k]).sum();
            let o = &mut out[node * n..(node + 1) * n];
            for i in 0..n {
                o[i] = fu[i] * (payoff[i] - avg);
            }
        }
    }

    fn reduced_rhs(&mut self, f: &DensityField, out: &mut [f64], family: ReducedFamily, kappa: Kappa) {
        let params = self.params.expect("validated at construction");
        for node in 0..self.grid.len() {
            let r = self.conv_out[0][node];
            let s = f.get(node, 0);
            let dp = reduced_f(family, kappa, &params, r, s);
            out[node * 2] = dp;
            out[node * 2 + 1] = -dp;
        }
    }

    /// Conservative stable step for the fixed-step RK4 integrator,
    /// `0.5 / L` with `L` estimated from the uniform rate bound and the
    /// payoff scale.
    pub fn suggest_dt(&self) -> f64 {
        let m = self
            .dynamic
            .rate_rule()
            .map(|r| r.rate_bound(&self.game))
            .unwrap_or(1.0)
            .max(1.0);
        let l_est = 2.0 * self.n as f64 * (m + self.game.max_abs_payoff());
        0.5 / l_est
    }

    /// Integrate from `f0` to `t_end`, recording the field at each of
    /// `snapshot_times` (clamped to `[0, t_end]`). Steps land exactly on
    /// snapshot times, so requested times are exact, not interpolated.
    pub fn integrate(
        &mut self,
        f0: &DensityField,
        t_end: f64,
        dt: f64,
        snapshot_times: &[f64],
    ) -> Result<Integration> {
        if t_end < 0.0 {
            return Err(Error::NegativeTime(t_end));
        }
        f0.validate_simplex(1e-9)?;
        let mut snaps: Vec<f64> = snapshot_times
            .iter()
            .copied()
            .filter(|&t| (0.0..=t_end).contains(&t))
            .collect();
        snaps.sort_by(f64::total_cmp);
        snaps.dedup();

        let mut field = f0.clone();
        let mut snapshots = Vec::with_capacity(snaps.len());
        let mut next_snap = snaps.iter().copied().peekable();
        let mut t = 0.0;
        let mut steps = 0usize;
        let mut projections = 0usize;
        let mut max_drift: f64 = 0.0;

        let len = field.values().len();
        let mut k1 = vec![0.0; len];
        let mut k2 = vec![0.0; len];
        let mut k3 = vec![0.0; len];
        let mut k4 = vec![0.0; len];
        let mut stage = field.clone();

        while let Some(&ts) = next_snap.peek() {
            if ts <= t + 1e-14 {
                snapshots.push((ts, field.clone()));
                next_snap.next();
            } else {
                break;
            }
        }

        while t < t_end - 1e-12 {
            let mut step = dt.min(t_end - t);
            if let Some(&ts) = next_snap.peek() {
                step = step.min(ts - t);
            }

            self.rhs(&field, &mut k1);
            axpy(&mut stage, &field, &k1, 0.5 * step);
            self.rhs(&stage, &mut k2);
            axpy(&mut stage, &field, &k2, 0.5 * step);
            self.rhs(&stage, &mut k3);
            axpy(&mut stage, &field, &k3, step);
            self.rhs(&stage, &mut k4);

            let v = field.values_mut();
            for i in 0..len {
                v[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            t += step;
            steps += 1;

            let drift = worst_node_violation(&field);
            max_drift = max_drift.max(drift);
            if drift > 1e-6 {
                return Err(Error::SimplexViolation { step: steps, time: t, drift });
            }
            if drift > 1e-12 {
                field.project_simplex();
                projections += 1;
            }

            while let Some(&ts) = next_snap.peek() {
                if ts <= t + 1e-12 {
                    snapshots.push((ts, field.clone()));
                    next_snap.next();
                } else {
                    break;
                }
            }
        }

        Ok(Integration { snapshots, final_field: field, steps, projections, max_drift })
    }
}

/// `stage = base + scale * k`.
fn axpy(stage: &mut DensityField, base: &DensityField, k: &[f64], scale: f64) {
    let s = stage.values_mut();
    let b = base.values();
    for i in 0..k.len() {
        s[i] = b[i] + scale * k[i];
    }
}

/// Largest per-node violation of simplex membership: mass drift or
/// excursion outside `[0, 1]`.
fn worst_node_violation(f: &DensityField) -> f64 {
    let n = f.num_strategies();
    let mut worst: f64 = 0.0;
    for node in 0..f.grid().len() {
        let v = &f.values()[node * n..(node + 1) * n];
        let sum: f64 = v.iter().sum();
        worst = worst.max((sum - 1.0).abs());
        for &x in v {
            if x < 0.0 {
                worst = worst.max(-x);
            } else if x > 1.0 {
                worst = worst.max(x - 1.0);
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Kernel;
    use crate::rng::rng_from_seed;
    use rand::Rng as _;

    const PI: f64 = std::f64::consts::PI;

    fn fig2_payoffs() -> Game {
        Game::coordination(2.0 / 3.0, 1.0 / 3.0).unwrap()
    }

    fn system_1d(game: Game, dynamic: Dynamic, n: usize, b: f64) -> IdeSystem {
        let grid = SpatialGrid::periodic_1d(n, -PI, PI).unwrap();
        let kernel = Kernel::gaussian(b, 1, 2.0 * PI).unwrap().grid_discretize(&grid).unwrap();
        IdeSystem::new(game, dynamic, grid, kernel).unwrap()
    }

    #[test]
    fn constant_field_rhs_is_mean_field_rhs() {
        // J * f = f for constant fields, so every node must equal the
        // mean-field input-output value computed by hand.
        let game = fig2_payoffs();
        let mut sys = system_1d(game.clone(), Dynamic::Logit, 64, 2.0);
        let probs = [0.4, 0.6];
        let f = DensityField::constant(sys.grid().clone(), &probs).unwrap();
        let mut out = vec![0.0; f.values().len()];
        sys.rhs(&f, &mut out);

        let mut payoff = [0.0; 2];
        game.payoff_vector(&probs, &mut payoff);
        let l1 = crate::rates::softmax_component(&payoff, 0);
        let expect = l1 - probs[0];
        for node in 0..64 {
            assert!((out[node * 2] - expect).abs() < 1e-13);
            assert!((out[node * 2] + out[node * 2 + 1]).abs() < 1e-15);
        }
    }

    #[test]
    fn replicator_stationary_at_zeta() {
        let game = fig2_payoffs();
        let zeta = 1.0 / 3.0;
        let mut sys = system_1d(game, Dynamic::ReducedReplicator(Kappa::Finite(20.0)), 64, 2.0);
        let f = DensityField::constant(sys.grid().clone(), &[zeta, 1.0 - zeta]).unwrap();
        let mut out = vec![0.0; f.values().len()];
        sys.rhs(&f, &mut out);
        for v in out {
            // FFT roundoff perturbs J*p at the last bits.
            assert!(v.abs() < 1e-14, "tendency {v} at p = zeta");
        }
    }

    #[test]
    fn reduced_logit_stationary_at_half_when_symmetric() {
        // F_L(1/2, 1/2) = l(0) - 1/2 = 0 for zeta = 1/2.
        let game = Game::coordination(5.0, 5.0).unwrap();
        let mut sys = system_1d(game, Dynamic::ReducedLogit, 64, 2.0);
        let f = DensityField::constant(sys.grid().clone(), &[0.5, 0.5]).unwrap();
        let mut out = vec![0.0; f.values().len()];
        sys.rhs(&f, &mut out);
        for v in out {
            assert!(v.abs() < 1e-15);
        }
    }

    #[test]
    fn reduced_f_values() {
        let params = CoordinationParams::new(1.0 / 3.0, 10.0).unwrap();
        let kappa = Kappa::Finite(20.0);
        // F_R(zeta, zeta) = 0.
        let z = params.zeta;
        assert_eq!(reduced_f(ReducedFamily::Replicator, kappa, &params, z, z), 0.0);
        // F_L(r, l(beta (r - zeta))) = 0 for any r.
        for &r in &[0.1, 0.4, 0.9] {
            let s = logistic(params.payoff_gap(r));
            assert_eq!(reduced_f(ReducedFamily::Logit, kappa, &params, r, s), 0.0);
        }
        // F_R(0.6, 0.4) by independent evaluation of the formula.
        let (r, s) = (0.6, 0.4);
        let f20 = |t: f64| ((20.0 * t).exp() + 1.0).ln() / 20.0;
        let expect = (1.0 - s) * r * f20(10.0 * (r - 1.0 / 3.0)) - s * (1.0 - r) * f20(10.0 * (1.0 / 3.0 - r));
        let got = reduced_f(ReducedFamily::Replicator, kappa, &params, r, s);
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn reduced_matches_general_imitative() {
        let game = fig2_payoffs();
        let kappa = Kappa::Finite(20.0);
        let mut general = system_1d(game.clone(), Dynamic::ImitativeReplicator(kappa), 64, 2.0);
        let mut reduced = system_1d(game, Dynamic::ReducedReplicator(kappa), 64, 2.0);
        let mut rng = rng_from_seed(5);
        let f = DensityField::from_scalar(general.grid().clone(), |_| {
            0.2 + 0.6 * rng.random::<f64>()
        })
        .unwrap();
        let mut a = vec![0.0; f.values().len()];
        let mut b = vec![0.0; f.values().len()];
        general.rhs(&f, &mut a);
        reduced.rhs(&f, &mut b);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12, "general {x} vs reduced {y}");
        }
    }

    #[test]
    fn reduced_logit_matches_general_logit() {
        let game = Game::coordination(20.0 / 3.0, 10.0 / 3.0).unwrap();
        let mut general = system_1d(game.clone(), Dynamic::Logit, 64, 2.0);
        let mut reduced = system_1d(game, Dynamic::ReducedLogit, 64, 2.0);
        let mut rng = rng_from_seed(6);
        let f = DensityField::from_scalar(general.grid().clone(), |_| {
            0.1 + 0.8 * rng.random::<f64>()
        })
        .unwrap();
        let mut a = vec![0.0; f.values().len()];
        let mut b = vec![0.0; f.values().len()];
        general.rhs(&f, &mut a);
        reduced.rhs(&f, &mut b);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn mass_conserved_along_integration() {
        let game = fig2_payoffs();
        let mut sys = system_1d(game, Dynamic::ImitativeReplicator(Kappa::Finite(20.0)), 64, 2.0);
        let mut rng = rng_from_seed(7);
        let f0 = DensityField::from_scalar(sys.grid().clone(), |_| {
            0.2 + 0.5 * rng.random::<f64>()
        })
        .unwrap();
        let dt = sys.suggest_dt();
        let res = sys.integrate(&f0, 5.0, dt, &[]).unwrap();
        assert!(res.max_drift < 1e-9 * 5.0, "drift {}", res.max_drift);
        assert!(res.final_field.max_mass_drift() < 1e-9);
    }

    #[test]
    fn biological_replicator_conserves_mass() {
        let game = Game::new(3, vec![1.0, 0.2, 0.0, 0.0, 1.0, 0.3, 0.4, 0.0, 1.0]).unwrap();
        let grid = SpatialGrid::periodic_1d(32, -PI, PI).unwrap();
        let kernel = Kernel::gaussian(2.0, 1, 2.0 * PI).unwrap().grid_discretize(&grid).unwrap();
        let mut sys = IdeSystem::new(game, Dynamic::BiologicalReplicator, grid.clone(), kernel).unwrap();
        let mut rng = rng_from_seed(8);
        let f0 = DensityField::from_fn(grid, 3, |_| {
            crate::rates::sample_simplex(&mut rng, 3)
        })
        .unwrap();
        let res = sys.integrate(&f0, 2.0, 0.01, &[]).unwrap();
        assert!(res.final_field.max_mass_drift() < 1e-9);
    }

    #[test]
    fn translation_equivariance() {
        let game = fig2_payoffs();
        let mut sys = system_1d(game.clone(), Dynamic::ReducedReplicator(Kappa::Finite(20.0)), 64, 5.0);
        let grid = sys.grid().clone();
        let profile = |x: f64| 0.4 + 0.2 * x.cos() + 0.1 * (2.0 * x).sin();
        let f0 = DensityField::from_scalar(grid.clone(), |p| profile(p[0])).unwrap();
        let h = grid.spacing();
        let f0_shift = DensityField::from_scalar(grid.clone(), |p| profile(p[0] - h)).unwrap();

        let r = sys.integrate(&f0, 1.0, 0.01, &[]).unwrap();
        let mut sys2 = system_1d(game, Dynamic::ReducedReplicator(Kappa::Finite(20.0)), 64, 5.0);
        let r_shift = sys2.integrate(&f0_shift, 1.0, 0.01, &[]).unwrap();
        for node in 0..64usize {
            let shifted = (node + 1) % 64;
            let a = r.final_field.get(node, 0);
            let b = r_shift.final_field.get(shifted, 0);
            assert!((a - b).abs() < 1e-11, "node {node}: {a} vs {b}");
        }
    }

    #[test]
    fn comparison_principle_reduced_logit() {
        let game = Game::coordination(20.0 / 3.0, 10.0 / 3.0).unwrap();
        let mk = || system_1d(game.clone(), Dynamic::ReducedLogit, 64, 2.0);
        let lo = DensityField::from_scalar(mk().grid().clone(), |p| 0.2 + 0.1 * p[0].cos()).unwrap();
        let hi = DensityField::from_scalar(mk().grid().clone(), |p| 0.5 + 0.2 * p[0].cos()).unwrap();
        let snaps = [1.0, 2.5, 5.0];
        let a = mk().integrate(&lo, 5.0, 0.01, &snaps).unwrap();
        let b = mk().integrate(&hi, 5.0, 0.01, &snaps).unwrap();
        for ((_, fa), (_, fb)) in a.snapshots.iter().zip(&b.snapshots) {
            for node in 0..64 {
                assert!(fa.get(node, 0) <= fb.get(node, 0) + 1e-12);
            }
        }
    }

    #[test]
    fn glauber_form_equivalent_to_reduced_logit() {
        // With zeta = 1/2 the substitution u = 2p - 1 turns the logit IDE
        // into du/dt = -u + tanh(beta/4 J*u). Integrate both forms with
        // the same kernel and RK4 step; they must agree to 1e-8.
        let beta = 6.0;
        let game = Game::coordination(beta / 2.0, beta / 2.0).unwrap();
        let n = 64;
        let mut sys = system_1d(game, Dynamic::ReducedLogit, n, 2.0);
        let grid = sys.grid().clone();
        let f0 = DensityField::from_scalar(grid.clone(), |p| 0.5 + 0.3 * p[0].cos()).unwrap();

        let dt = 0.005;
        let t_end = 3.0;
        let res = sys.integrate(&f0, t_end, dt, &[]).unwrap();

        // Independent integration of the Glauber form.
        let kernel = Kernel::gaussian(2.0, 1, 2.0 * PI).unwrap().grid_discretize(&grid).unwrap();
        let mut conv = Convolver::new(&grid, &kernel);
        let mut u: Vec<f64> = (0..n).map(|i| 2.0 * f0.get(i, 0) - 1.0).collect();
        let rhs_u = |conv: &mut Convolver, u: &[f64], out: &mut [f64]| {
            let mut ju = vec![0.0; u.len()];
            conv.convolve(u, &mut ju);
            for i in 0..u.len() {
                out[i] = -u[i] + (beta / 4.0 * ju[i]).tanh();
            }
        };
        let steps = (t_end / dt).round() as usize;
        let mut k1 = vec![0.0; n];
        let mut k2 = vec![0.0; n];
        let mut k3 = vec![0.0; n];
        let mut k4 = vec![0.0; n];
        let mut tmp = vec![0.0; n];
        for _ in 0..steps {
            rhs_u(&mut conv, &u, &mut k1);
            for i in 0..n {
                tmp[i] = u[i] + 0.5 * dt * k1[i];
            }
            rhs_u(&mut conv, &tmp, &mut k2);
            for i in 0..n {
                tmp[i] = u[i] + 0.5 * dt * k2[i];
            }
            rhs_u(&mut conv, &tmp, &mut k3);
            for i in 0..n {
                tmp[i] = u[i] + dt * k3[i];
            }
            rhs_u(&mut conv, &tmp, &mut k4);
            for i in 0..n {
                u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        for i in 0..n {
            let p_from_u = (u[i] + 1.0) / 2.0;
            assert!(
                (p_from_u - res.final_field.get(i, 0)).abs() < 1e-8,
                "node {i}: {} vs {}",
                p_from_u,
                res.final_field.get(i, 0)
            );
        }
    }

    #[test]
    fn fixed_boundary_nodes_never_change() {
        let grid = SpatialGrid::fixed_1d(120, -3.0, 3.0, -1.0, 1.0).unwrap();
        let kernel = Kernel::gaussian(2.0, 1, 6.0).unwrap().grid_discretize(&grid).unwrap();
        let game = Game::coordination(20.0 / 3.0, 10.0 / 3.0).unwrap();
        let mut sys = IdeSystem::new(game, Dynamic::ReducedLogit, grid.clone(), kernel).unwrap();
        let f0 = DensityField::from_scalar(grid.clone(), |p| {
            if p[0] >= 0.0 { 1.0 } else { 0.0 }
        })
        .unwrap();
        let res = sys.integrate(&f0, 1.0, 0.01, &[]).unwrap();
        for node in 0..grid.len() {
            if !grid.is_active(node) {
                assert_eq!(res.final_field.get(node, 0), f0.get(node, 0), "frozen node {node}");
            }
        }
    }

    #[test]
    fn rejects_negative_time() {
        let game = fig2_payoffs();
        let mut sys = system_1d(game, Dynamic::Logit, 16, 2.0);
        let f0 = DensityField::constant(sys.grid().clone(), &[0.5, 0.5]).unwrap();
        assert!(matches!(sys.integrate(&f0, -1.0, 0.01, &[]), Err(Error::NegativeTime(_))));
    }
}
