//! Mean-field tier: the lumped aggregate Markov chain and the classical
//! ODEs it converges to.
//!
//! Under uniform interactions the strategy histogram `eta` is itself a
//! Markov chain: a pair `(j, k)` fires at rate `n^d eta(j) c(j, k, eta)`
//! and moves `1/n^d` of mass from `j` to `k`. As `n^d -> infinity` the
//! chain tracks the mean-field ODE; the deviation harness measures how
//! fast the exceedance probability of a sup-norm tube decays with
//! population size.

use crate::field::DensityField;
use crate::game::Game;
use crate::grid::SpatialGrid;
use crate::ide::{Dynamic, IdeSystem};
use crate::kernel::DiscreteKernel;
use crate::rates::RateRule;
use crate::rng::{child_seed, rng_from_seed, Rng};
use crate::Result;
use rand::Rng as _;

/// Point of the discrete simplex: integer strategy counts over `sites`
/// agents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregateState {
    counts: Vec<u64>,
    sites: u64,
}

impl AggregateState {
    pub fn from_counts(counts: Vec<u64>) -> Self {
        let sites = counts.iter().sum();
        Self { counts, sites }
    }

    /// Deterministic state nearest to `rho` (largest-remainder rounding).
    pub fn rounded(rho: &[f64], sites: u64) -> Self {
        let mut counts: Vec<u64> = rho.iter().map(|&p| (p * sites as f64).floor() as u64).collect();
        let mut rem: Vec<(f64, usize)> = rho
            .iter()
            .enumerate()
            .map(|(i, &p)| (p * sites as f64 - counts[i] as f64, i))
            .collect();
        rem.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut missing = sites - counts.iter().sum::<u64>();
        for (_, i) in rem {
            if missing == 0 {
                break;
            }
            counts[i] += 1;
            missing -= 1;
        }
        Self { counts, sites }
    }

    /// Sample from the product measure: `sites` i.i.d. draws from `rho`.
    pub fn sample_product(rho: &[f64], sites: u64, rng: &mut Rng) -> Self {
        let mut counts = vec![0u64; rho.len()];
        for _ in 0..sites {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut chosen = rho.len() - 1;
            for (i, &p) in rho.iter().enumerate() {
                acc += p;
                if u < acc {
                    chosen = i;
                    break;
                }
            }
            counts[chosen] += 1;
        }
        Self { counts, sites }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn sites(&self) -> u64 {
        self.sites
    }

    /// Histogram `eta`; sums to 1 exactly.
    pub fn eta(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.sites as f64).collect()
    }
}

/// A jump of the lumped chain: one agent switches `from -> to`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LumpedEvent {
    pub time: f64,
    pub from: usize,
    pub to: usize,
}

/// The aggregate Markov chain of Gillespie type.
pub struct LumpedChain {
    game: Game,
    rule: RateRule,
    state: AggregateState,
    time: f64,
}

impl LumpedChain {
    pub fn new(game: Game, rule: RateRule, state: AggregateState) -> Self {
        Self { game, rule, state, time: 0.0 }
    }

    pub fn state(&self) -> &AggregateState {
        &self.state
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Sample the next jump: pair `(j, k)` at rate
    /// `sites * eta(j) * c(j, k, eta)`. Returns `None` from absorbing
    /// states (total rate zero).
    pub fn step(&mut self, rng: &mut Rng) -> Option<LumpedEvent> {
        let n = self.game.num_strategies();
        let eta = self.state.eta();
        let mut payoff = vec![0.0; n];
        self.game.payoff_vector(&eta, &mut payoff);

        let mut rates = Vec::with_capacity(n * (n - 1));
        let mut total = 0.0;
        for j in 0..n {
            if self.state.counts[j] == 0 {
                continue;
            }
            let nj = self.state.counts[j] as f64;
            for k in 0..n {
                if k == j {
                    continue;
                }
                let r = nj * self.rule.mean_rate(j, k, &payoff, &eta);
                if r > 0.0 {
                    rates.push((j, k, r));
                    total += r;
                }
            }
        }
        if total <= 0.0 {
            return None;
        }
        let u: f64 = rng.random();
        self.time += -(1.0 - u).ln() / total;
        let mut pick: f64 = rng.random::<f64>() * total;
        let mut chosen = rates[rates.len() - 1];
        for r in &rates {
            pick -= r.2;
            if pick < 0.0 {
                chosen = *r;
                break;
            }
        }
        self.state.counts[chosen.0] -= 1;
        self.state.counts[chosen.1] += 1;
        Some(LumpedEvent { time: self.time, from: chosen.0, to: chosen.1 })
    }

    /// Run the chain to `t_end`; the state is left at the last jump
    /// before `t_end`.
    pub fn run_until(&mut self, t_end: f64, rng: &mut Rng) -> Vec<LumpedEvent> {
        let mut events = Vec::new();
        loop {
            let before = (self.state.clone(), self.time);
            match self.step(rng) {
                None => break,
                Some(e) if e.time > t_end => {
                    // The jump lands beyond the horizon: roll it back.
                    self.state = before.0;
                    self.time = t_end;
                    break;
                }
                Some(e) => events.push(e),
            }
        }
        self.time = self.time.min(t_end);
        events
    }
}

/// Mean-field tendency `d rho_i / dt` of the input-output ODE.
pub fn ode_rhs(rho: &[f64], rule: RateRule, game: &Game, out: &mut [f64]) {
    let n = game.num_strategies();
    let mut payoff = vec![0.0; n];
    game.payoff_vector(rho, &mut payoff);
    let mut rate = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            rate[i * n + k] = rule.mean_rate(i, k, &payoff, rho);
        }
    }
    for i in 0..n {
        let inflow: f64 = (0..n).map(|k| rate[k * n + i] * rho[k]).sum();
        let outflow: f64 = (0..n).map(|k| rate[i * n + k]).sum();
        out[i] = inflow - rho[i] * outflow;
    }
}

/// Dense mean-field ODE solution, stored at every integrator step.
pub struct OdeSolution {
    times: Vec<f64>,
    values: Vec<f64>,
    n: usize,
}

impl OdeSolution {
    /// Linear interpolation at `t` (clamped to the solved range).
    pub fn at(&self, t: f64) -> Vec<f64> {
        let last = self.times.len() - 1;
        if t <= self.times[0] {
            return self.values[..self.n].to_vec();
        }
        if t >= self.times[last] {
            return self.values[last * self.n..].to_vec();
        }
        let hi = self.times.partition_point(|&x| x < t).max(1);
        let (t0, t1) = (self.times[hi - 1], self.times[hi]);
        let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
        (0..self.n)
            .map(|i| {
                let a = self.values[(hi - 1) * self.n + i];
                let b = self.values[hi * self.n + i];
                a + w * (b - a)
            })
            .collect()
    }

    pub fn final_state(&self) -> Vec<f64> {
        self.values[(self.times.len() - 1) * self.n..].to_vec()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
}

/// Solve the mean-field ODE by reusing the IDE integrator on a one-node
/// grid (where `J * f = f` identically).
pub fn solve_mean_ode(
    rule: RateRule,
    game: &Game,
    rho0: &[f64],
    t_end: f64,
    dt: f64,
) -> Result<OdeSolution> {
    let grid = SpatialGrid::periodic_1d(1, 0.0, 1.0)?;
    let n = game.num_strategies();
    let f0 = DensityField::constant(grid.clone(), rho0)?;
    let mut sys = IdeSystem::new(game.clone(), Dynamic::InputOutput(rule), grid, DiscreteKernel::identity())?;
    let steps = (t_end / dt).ceil() as usize;
    let snap_times: Vec<f64> = (0..=steps).map(|i| (i as f64 * dt).min(t_end)).collect();
    let res = sys.integrate(&f0, t_end, dt, &snap_times)?;
    let mut times = Vec::with_capacity(res.snapshots.len());
    let mut values = Vec::with_capacity(res.snapshots.len() * n);
    for (t, f) in &res.snapshots {
        times.push(*t);
        values.extend_from_slice(f.values());
    }
    Ok(OdeSolution { times, values, n })
}

/// Exceedance statistics of the lumped chain against the ODE.
#[derive(Debug, Clone)]
pub struct DeviationReport {
    pub sites: Vec<u64>,
    /// Fraction of replicas with `sup_t ||eta - rho||_inf >= eps`.
    pub exceed_fraction: Vec<f64>,
    pub mean_sup_dev: Vec<f64>,
    /// Least-squares slope of `log(fraction)` against `sites`, fitted
    /// over the entries with nonzero exceedance.
    pub log_slope: Option<f64>,
}

/// For each population size, run `replicas` lumped chains from the
/// rounded initial state and compare against the dense ODE solution at
/// jump times (the sup over `t` of the piecewise-constant path is
/// attained at jumps).
#[allow(clippy::too_many_arguments)]
pub fn deviation_harness(
    rule: RateRule,
    game: &Game,
    rho0: &[f64],
    sites_list: &[u64],
    t_end: f64,
    eps: f64,
    replicas: usize,
    seed: u64,
) -> Result<DeviationReport> {
    let ode = solve_mean_ode(rule, game, rho0, t_end, 1e-3)?;
    let mut exceed_fraction = Vec::with_capacity(sites_list.len());
    let mut mean_sup_dev = Vec::with_capacity(sites_list.len());
    for (si, &sites) in sites_list.iter().enumerate() {
        let mut exceed = 0usize;
        let mut sup_sum = 0.0;
        for rep in 0..replicas {
            let mut rng = rng_from_seed(child_seed(seed, (si * replicas + rep) as u64));
            let mut chain =
                LumpedChain::new(game.clone(), rule, AggregateState::rounded(rho0, sites));
            let mut sup: f64 = sup_norm_dev(&chain.state().eta(), &ode.at(0.0));
            loop {
                let eta_before = chain.state().eta();
                match chain.step(&mut rng) {
                    None => break,
                    Some(e) => {
                        let t = e.time.min(t_end);
                        let rho = ode.at(t);
                        sup = sup.max(sup_norm_dev(&eta_before, &rho));
                        if e.time > t_end {
                            break;
                        }
                        sup = sup.max(sup_norm_dev(&chain.state().eta(), &rho));
                    }
                }
            }
            sup = sup.max(sup_norm_dev(&chain.state().eta(), &ode.at(t_end)));
            if sup >= eps {
                exceed += 1;
            }
            sup_sum += sup;
        }
        exceed_fraction.push(exceed as f64 / replicas as f64);
        mean_sup_dev.push(sup_sum / replicas as f64);
    }

    // ln(fraction) vs sites over the strictly positive entries.
    let pts: Vec<(f64, f64)> = sites_list
        .iter()
        .zip(&exceed_fraction)
        .filter(|(_, &f)| f > 0.0)
        .map(|(&n, &f)| (n as f64, f.ln()))
        .collect();
    let log_slope = if pts.len() >= 2 {
        let nx = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        Some((nx * sxy - sx * sy) / (nx * sxx - sx * sx))
    } else {
        None
    };

    Ok(DeviationReport { sites: sites_list.to_vec(), exceed_fraction, mean_sup_dev, log_slope })
}

fn sup_norm_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
