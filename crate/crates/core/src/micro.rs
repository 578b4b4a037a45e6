//! Exact event-driven simulation of the microscopic strategy-revision
//! process.
//!
//! Agents sit on a lattice with spacing `gamma` (so `gamma^-1` sites per
//! unit length) and interact through the Kac weights
//! `W(z) = gamma^d J(gamma z)`. The continuous-time Markov chain is
//! simulated exactly by uniformization: candidate events arrive at rate
//! `|active sites| * |S| * M`, a candidate `(x, k)` is drawn uniformly and
//! accepted with probability `c(x, sigma, k) / M`, where `M` bounds every
//! rate. Each accepted flip updates the cached local strategy fields of
//! the sites within kernel support of the flipped site.

use crate::field::DensityField;
use crate::game::Game;
use crate::grid::SpatialGrid;
use crate::kernel::{DiscreteKernel, Kernel};
use crate::rates::RateRule;
use crate::rng::{rng_from_seed, Rng};
use crate::{Error, Result};
use rand::Rng as _;

/// The lattice a configuration lives on: a spatial grid with spacing
/// `gamma`, periodic or with a frozen boundary collar.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeDomain {
    grid: SpatialGrid,
}

impl LatticeDomain {
    // Site spacing is exactly gamma; the extent rounds to a whole number
    // of sites, so `n * gamma` may differ from `max - min` by up to
    // half a site.
    pub fn periodic_1d(gamma: f64, min: f64, max: f64) -> Result<Self> {
        let n = ((max - min) / gamma).round() as usize;
        Ok(Self { grid: SpatialGrid::periodic_1d_h(n, min, gamma)? })
    }

    pub fn periodic_2d(gamma: f64, min: f64, max: f64) -> Result<Self> {
        let n = ((max - min) / gamma).round() as usize;
        Ok(Self { grid: SpatialGrid::periodic_2d_h(n, min, gamma)? })
    }

    /// 1-D region `[min, max]` whose sites outside `(active_min,
    /// active_max)` never revise.
    pub fn fixed_1d(gamma: f64, min: f64, max: f64, active_min: f64, active_max: f64) -> Result<Self> {
        let n = ((max - min) / gamma).round() as usize;
        Ok(Self { grid: SpatialGrid::fixed_1d_h(n, min, gamma, active_min, active_max)? })
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn gamma(&self) -> f64 {
        self.grid.spacing()
    }

    pub fn num_sites(&self) -> usize {
        self.grid.len()
    }

    /// Kac-discretize an interaction profile for this lattice: periodic
    /// domains cap soft kernels at half the torus, fixed domains at the
    /// frozen collar so active sites never see past the boundary region.
    pub fn kac_kernel(&self, j: &Kernel) -> Result<DiscreteKernel> {
        if self.grid.is_periodic() {
            j.kac_discretize(self.gamma(), self.grid.dims())
        } else {
            let collar = self.grid.collar_nodes().unwrap_or(0);
            j.kac_discretize_collared(self.gamma(), collar)
        }
    }
}

/// A single strategy-revision event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub site: usize,
    pub new_strategy: u8,
}

/// Summary of an exact simulation run.
#[derive(Debug, Clone)]
pub struct RunStats {
    pub events: Vec<Event>,
    /// Candidate events proposed by the thinning loop.
    pub proposals: u64,
    /// Candidates accepted (equals `events.len()` plus self-moves).
    pub accepted: u64,
    /// Rate bound `M` used for thinning.
    pub rate_bound: f64,
}

/// Microscopic configuration with cached local strategy fields
/// `w(x, l) = sum_y W(x - y) delta(sigma(y), l)`.
#[derive(Debug, Clone)]
pub struct LatticeState {
    domain: LatticeDomain,
    kernel: DiscreteKernel,
    n_strategies: usize,
    sigma: Vec<u8>,
    local_field: Vec<f64>,
    active: Vec<u32>,
}

impl LatticeState {
    /// Draw an initial configuration from the product measure with
    /// slowly varying parameter: site `x` plays `i` with probability
    /// `profile(gamma x, i)`.
    pub fn sample_initial(
        profile: &DensityField,
        domain: LatticeDomain,
        kernel: DiscreteKernel,
        seed: u64,
    ) -> Result<Self> {
        profile.validate_simplex(1e-9)?;
        let n = profile.num_strategies();
        let grid = profile.grid().clone();
        Self::sample_from_fn(domain, kernel, n, seed, |pos| {
            profile.node(grid.cell_of(pos)).to_vec()
        })
    }

    /// Draw an initial configuration with per-site probabilities given by
    /// a function of mesoscopic position.
    pub fn sample_from_fn<F>(
        domain: LatticeDomain,
        kernel: DiscreteKernel,
        n_strategies: usize,
        seed: u64,
        mut probs: F,
    ) -> Result<Self>
    where
        F: FnMut([f64; 2]) -> Vec<f64>,
    {
        let sites = domain.num_sites();
        let mut rng = rng_from_seed(seed);
        let mut sigma = Vec::with_capacity(sites);
        for site in 0..sites {
            let p = probs(domain.grid().position(site));
            let sum: f64 = p.iter().sum();
            if (sum - 1.0).abs() > 1e-9 || p.iter().any(|&x| x < -1e-12) {
                return Err(Error::ProfileNotSimplex { node: site, sum });
            }
            sigma.push(sample_categorical(&p, &mut rng));
        }
        let active = (0..sites)
            .filter(|&s| domain.grid().is_active(s))
            .map(|s| s as u32)
            .collect();
        let mut state = Self {
            domain,
            kernel,
            n_strategies,
            sigma,
            local_field: Vec::new(),
            active,
        };
        state.local_field = state.recomputed_field();
        Ok(state)
    }

    pub fn domain(&self) -> &LatticeDomain {
        &self.domain
    }

    pub fn num_strategies(&self) -> usize {
        self.n_strategies
    }

    pub fn sigma(&self) -> &[u8] {
        &self.sigma
    }

    pub fn active_sites(&self) -> usize {
        self.active.len()
    }

    /// Cached neighbor-sampling weights `w(x, .)` at a site.
    #[inline]
    pub fn local_field(&self, site: usize) -> &[f64] {
        &self.local_field[site * self.n_strategies..(site + 1) * self.n_strategies]
    }

    /// Full recomputation of the local fields (the incremental cache must
    /// match this to 1e-9).
    pub fn recomputed_field(&self) -> Vec<f64> {
        let sites = self.domain.num_sites();
        let n = self.n_strategies;
        let mut field = vec![0.0; sites * n];
        for site in 0..sites {
            for (z, w) in self.kernel.support() {
                if let Some(y) = self.domain.grid().offset_index(site, z) {
                    field[site * n + self.sigma[y] as usize] += w;
                }
            }
        }
        field
    }

    /// Revision rate `c(x, sigma, k)` from the cached local field.
    pub fn site_rate(&self, site: usize, k: usize, rule: RateRule, game: &Game) -> f64 {
        let w = self.local_field(site);
        let i = self.sigma[site] as usize;
        let n = self.n_strategies;
        let mut stack = [0.0f64; 8];
        if n <= 8 {
            let payoff = &mut stack[..n];
            game.payoff_vector(w, payoff);
            rule.mean_rate(i, k, payoff, w)
        } else {
            let mut payoff = vec![0.0; n];
            game.payoff_vector(w, &mut payoff);
            rule.mean_rate(i, k, &payoff, w)
        }
    }

    /// Apply one strategy flip and update the local fields of every site
    /// within kernel support of `site`.
    pub fn flip(&mut self, site: usize, k: u8) {
        let old = self.sigma[site];
        if old == k {
            return;
        }
        self.sigma[site] = k;
        let n = self.n_strategies;
        for (z, w) in self.kernel.support() {
            if let Some(y) = self.domain.grid().offset_index(site, z) {
                self.local_field[y * n + old as usize] -= w;
                self.local_field[y * n + k as usize] += w;
            }
        }
    }

    /// Global strategy histogram; sums to 1 exactly (integer counts).
    pub fn eta(&self) -> Vec<f64> {
        let mut counts = vec![0u64; self.n_strategies];
        for &s in &self.sigma {
            counts[s as usize] += 1;
        }
        let total = self.sigma.len() as f64;
        counts.iter().map(|&c| c as f64 / total).collect()
    }

    /// Block-averaged empirical densities on a mesoscopic grid, plus the
    /// global histogram. Grid cells must each contain at least one site.
    pub fn empirical(&self, grid: &SpatialGrid) -> Result<EmpiricalMeasure> {
        let n = self.n_strategies;
        let mut counts = vec![0u64; grid.len() * n];
        let mut per_cell = vec![0u64; grid.len()];
        for site in 0..self.domain.num_sites() {
            let cell = grid.cell_of(self.domain.grid().position(site));
            counts[cell * n + self.sigma[site] as usize] += 1;
            per_cell[cell] += 1;
        }
        if let Some(empty) = per_cell.iter().position(|&c| c == 0) {
            return Err(Error::Config(format!(
                "coarse-graining cell {empty} contains no lattice sites"
            )));
        }
        let values: Vec<f64> = counts
            .iter()
            .enumerate()
            .map(|(idx, &c)| c as f64 / per_cell[idx / n] as f64)
            .collect();
        let field = DensityField::from_raw(grid.clone(), n, values)?;
        Ok(EmpiricalMeasure { field, eta: self.eta() })
    }
}

/// Coarse-grained view of a configuration.
#[derive(Debug, Clone)]
pub struct EmpiricalMeasure {
    /// Per-cell strategy densities (each cell a point in the simplex).
    pub field: DensityField,
    /// Global histogram.
    pub eta: Vec<f64>,
}

fn sample_categorical(p: &[f64], rng: &mut Rng) -> u8 {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        acc += pi;
        if u < acc {
            return i as u8;
        }
    }
    (p.len() - 1) as u8
}

/// Statistically exact realization of the revision process up to `t_end`,
/// by uniformization against the rate bound `M = rule.rate_bound(game)`.
/// Candidates proposing the current strategy are accepted as no-ops and
/// not recorded. Deterministic for a given `(state, seed)`.
pub fn run(
    state: &mut LatticeState,
    rule: RateRule,
    game: &Game,
    t_end: f64,
    seed: u64,
) -> Result<RunStats> {
    if t_end < 0.0 {
        return Err(Error::NegativeTime(t_end));
    }
    let m = rule.rate_bound(game);
    let n_s = state.n_strategies;
    let total_rate = state.active.len() as f64 * n_s as f64 * m;
    let mut stats = RunStats { events: Vec::new(), proposals: 0, accepted: 0, rate_bound: m };
    if total_rate <= 0.0 || state.active.is_empty() {
        return Ok(stats);
    }
    let mut rng = rng_from_seed(seed);
    let mut t = 0.0;
    loop {
        let u: f64 = rng.random();
        t += -(1.0 - u).ln() / total_rate;
        if t > t_end {
            break;
        }
        stats.proposals += 1;
        let site = state.active[rng.random_range(0..state.active.len())] as usize;
        let k = rng.random_range(0..n_s) as u8;
        let accept: f64 = rng.random();
        if k == state.sigma[site] {
            // Self-moves carry positive rate under innovative rules but
            // leave the configuration unchanged.
            let rate = state.site_rate(site, k as usize, rule, game);
            if accept * m < rate {
                stats.accepted += 1;
            }
            continue;
        }
        let rate = state.site_rate(site, k as usize, rule, game);
        if accept * m < rate {
            stats.accepted += 1;
            state.flip(site, k);
            stats.events.push(Event { time: t, site, new_strategy: k });
        }
    }
    Ok(stats)
}

/// Report of the rate-convergence check: for decreasing `gamma`, the
/// worst-case gap between the microscopic rate and the limiting rate
/// functional evaluated on the empirical measure.
#[derive(Debug, Clone)]
pub struct RateLimitReport {
    pub gammas: Vec<f64>,
    pub discrepancies: Vec<f64>,
}

impl RateLimitReport {
    /// Whether the discrepancy sequence decreases monotonically.
    pub fn is_decreasing(&self) -> bool {
        self.discrepancies.windows(2).all(|w| w[1] <= w[0] + 1e-15)
    }
}

/// Builds lattices at each `gamma`, samples configurations from `profile`,
/// and measures `sup |c^gamma(x, sigma, k) - c(gamma x, sigma(x), k, pi)|`
/// over `sample_sites` random sites and all target strategies. The
/// limiting rate is evaluated on the block-averaged empirical density
/// (`cells` cells across the domain), quadrating `J * pi` with the
/// continuous kernel profile; the gap is then the within-kernel sampling
/// fluctuation, which shrinks as `gamma -> 0`.
#[allow(clippy::too_many_arguments)]
pub fn rate_limit_check<F>(
    rule: RateRule,
    game: &Game,
    j: &Kernel,
    extent: (f64, f64),
    active: Option<(f64, f64)>,
    gammas: &[f64],
    cells: usize,
    sample_sites: usize,
    seed: u64,
    profile: F,
) -> Result<RateLimitReport>
where
    F: Fn([f64; 2]) -> Vec<f64>,
{
    let n = game.num_strategies();
    let coarse = match active {
        None => SpatialGrid::periodic_1d(cells, extent.0, extent.1)?,
        Some((a, b)) => SpatialGrid::fixed_1d(cells, extent.0, extent.1, a, b)?,
    };
    let length = extent.1 - extent.0;
    let h_c = coarse.spacing();
    let mut discrepancies = Vec::with_capacity(gammas.len());
    for (gi, &gamma) in gammas.iter().enumerate() {
        let domain = match active {
            None => LatticeDomain::periodic_1d(gamma, extent.0, extent.1)?,
            Some((a, b)) => LatticeDomain::fixed_1d(gamma, extent.0, extent.1, a, b)?,
        };
        let kernel = domain.kac_kernel(j)?;
        let state = LatticeState::sample_from_fn(
            domain,
            kernel,
            n,
            crate::rng::child_seed(seed, gi as u64),
            &profile,
        )?;
        let coarse_density = state.empirical(&coarse)?.field;
        let grid = state.domain().grid().clone();
        let sites = state.domain().num_sites();
        let mut rng = rng_from_seed(crate::rng::child_seed(seed, 1000 + gi as u64));
        let mut worst: f64 = 0.0;
        let mut payoff = vec![0.0; n];
        for _ in 0..sample_sites {
            let site = loop {
                let s = rng.random_range(0..sites);
                if grid.is_active(s) {
                    break s;
                }
            };
            // J * pi at the site, quadratured over the coarse cells.
            let mut v = vec![0.0; n];
            let x = grid.position(site)[0];
            for cell in 0..coarse.len() {
                let mut d = (coarse.position(cell)[0] - x).abs();
                if coarse.is_periodic() {
                    d = d.min(length - d);
                }
                let jw = h_c * j.value(d);
                for (l, vl) in v.iter_mut().enumerate() {
                    *vl += jw * coarse_density.get(cell, l);
                }
            }
            game.payoff_vector(&v, &mut payoff);
            let i = state.sigma()[site] as usize;
            for k in 0..n {
                let limit = rule.mean_rate(i, k, &payoff, &v);
                let micro = state.site_rate(site, k, rule, game);
                worst = worst.max((micro - limit).abs());
            }
        }
        discrepancies.push(worst);
    }
    Ok(RateLimitReport { gammas: gammas.to_vec(), discrepancies })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ide::Kappa;
    use crate::response::ResponseFunction;

    const PI: f64 = std::f64::consts::PI;

    fn fig2_game() -> Game {
        Game::coordination(2.0 / 3.0, 1.0 / 3.0).unwrap()
    }

    fn small_setup(gamma: f64, b: f64) -> (LatticeDomain, DiscreteKernel) {
        let domain = LatticeDomain::periodic_1d(gamma, -PI, PI).unwrap();
        let j = Kernel::gaussian(b, 1, 2.0 * PI).unwrap();
        let kernel = domain.kac_kernel(&j).unwrap();
        (domain, kernel)
    }

    #[test]
    fn pure_profile_gives_monomorphic_state() {
        let (domain, kernel) = small_setup(1.0 / 16.0, 2.0);
        let grid = SpatialGrid::periodic_1d(16, -PI, PI).unwrap();
        let profile = DensityField::constant(grid, &[1.0, 0.0]).unwrap();
        let state = LatticeState::sample_initial(&profile, domain, kernel, 1).unwrap();
        assert!(state.sigma().iter().all(|&s| s == 0));
    }

    #[test]
    fn sampled_fraction_within_binomial_band() {
        let domain = LatticeDomain::periodic_1d(1e-6, 0.0, 1.0).unwrap();
        let kernel = DiscreteKernel::identity();
        let state = LatticeState::sample_from_fn(domain, kernel, 2, 7, |_| {
            vec![1.0 / 3.0, 2.0 / 3.0]
        })
        .unwrap();
        let n = state.sigma().len() as f64;
        assert_eq!(n, 1e6);
        let eta = state.eta();
        let sigma3 = 3.0 * ((1.0 / 3.0) * (2.0 / 3.0) / n).sqrt();
        assert!(
            (eta[0] - 1.0 / 3.0).abs() < sigma3,
            "eta = {} outside 3-sigma band {sigma3}",
            eta[0]
        );
    }

    #[test]
    fn island_profile_confines_strategy_one() {
        let (domain, kernel) = small_setup(1.0 / 64.0, 2.0);
        let state = LatticeState::sample_from_fn(domain, kernel, 2, 3, |pos| {
            if pos[0] > -PI / 6.0 && pos[0] < PI / 6.0 {
                vec![1.0, 0.0]
            } else {
                vec![0.0, 1.0]
            }
        })
        .unwrap();
        for site in 0..state.domain().num_sites() {
            let x = state.domain().grid().position(site)[0];
            let inside = x > -PI / 6.0 && x < PI / 6.0;
            assert_eq!(state.sigma()[site] == 0, inside);
        }
    }

    #[test]
    fn uniform_kernel_rate_independent_of_site() {
        let domain = LatticeDomain::periodic_1d(1.0 / 65.0, 0.0, 1.0).unwrap();
        let j = Kernel::uniform(1, 1.0).unwrap();
        let kernel = domain.kac_kernel(&j).unwrap();
        let state = LatticeState::sample_from_fn(domain, kernel, 2, 11, |_| vec![0.4, 0.6]).unwrap();
        let game = fig2_game();
        let r0 = state.site_rate(0, 0, RateRule::LogitChoice, &game);
        for site in 1..state.domain().num_sites() {
            let r = state.site_rate(site, 0, RateRule::LogitChoice, &game);
            assert!((r - r0).abs() < 1e-14);
        }
    }

    #[test]
    fn logit_rate_monomorphic_value() {
        // All neighbors play strategy 1: rate to 1 = e^{2/3}/(e^{2/3} + 1).
        let (domain, kernel) = small_setup(1.0 / 32.0, 2.0);
        let grid = SpatialGrid::periodic_1d(32, -PI, PI).unwrap();
        let profile = DensityField::constant(grid, &[1.0, 0.0]).unwrap();
        let state = LatticeState::sample_initial(&profile, domain, kernel, 1).unwrap();
        let r = state.site_rate(5, 0, RateRule::LogitChoice, &fig2_game());
        let expect = (2.0f64 / 3.0).exp() / ((2.0f64 / 3.0).exp() + 1.0);
        assert!((r - expect).abs() < 1e-12);
        assert!((expect - 0.66076).abs() < 1e-5);
    }

    #[test]
    fn non_innovative_rate_zero_for_absent_strategy() {
        let (domain, kernel) = small_setup(1.0 / 32.0, 2.0);
        let grid = SpatialGrid::periodic_1d(32, -PI, PI).unwrap();
        let profile = DensityField::constant(grid, &[0.0, 1.0]).unwrap();
        let state = LatticeState::sample_initial(&profile, domain, kernel, 1).unwrap();
        let rule = RateRule::ComparingNonInnovative(ResponseFunction::PositivePart);
        assert_eq!(state.site_rate(3, 0, rule, &fig2_game()), 0.0);
    }

    #[test]
    fn absorbing_state_under_non_innovative_rule() {
        let (domain, kernel) = small_setup(1.0 / 32.0, 2.0);
        let grid = SpatialGrid::periodic_1d(32, -PI, PI).unwrap();
        let profile = DensityField::constant(grid, &[0.0, 1.0]).unwrap();
        let mut state = LatticeState::sample_initial(&profile, domain, kernel, 1).unwrap();
        let rule = RateRule::ComparingNonInnovative(ResponseFunction::Regularized { kappa: 20.0 });
        let before = state.sigma().to_vec();
        let stats = run(&mut state, rule, &fig2_game(), 5.0, 99).unwrap();
        assert!(stats.events.is_empty());
        assert_eq!(state.sigma(), &before[..]);
    }

    #[test]
    fn incremental_field_matches_recomputation() {
        let (domain, kernel) = small_setup(1.0 / 64.0, 5.0);
        let mut state =
            LatticeState::sample_from_fn(domain, kernel, 2, 17, |_| vec![0.5, 0.5]).unwrap();
        let mut rng = rng_from_seed(21);
        for _ in 0..10_000 {
            let site = rng.random_range(0..state.domain().num_sites());
            let k = rng.random_range(0..2) as u8;
            state.flip(site, k);
        }
        let fresh = state.recomputed_field();
        for (a, b) in state.local_field.iter().zip(&fresh) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn local_field_rows_sum_to_one() {
        let (domain, kernel) = small_setup(1.0 / 48.0, 5.0);
        let state =
            LatticeState::sample_from_fn(domain, kernel, 2, 23, |_| vec![0.3, 0.7]).unwrap();
        for site in 0..state.domain().num_sites() {
            let sum: f64 = state.local_field(site).iter().sum();
            assert!((sum - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn eta_sums_to_one_after_every_event() {
        let (domain, kernel) = small_setup(1.0 / 32.0, 2.0);
        let mut state =
            LatticeState::sample_from_fn(domain, kernel, 2, 31, |_| vec![0.5, 0.5]).unwrap();
        let stats = run(&mut state, RateRule::LogitChoice, &fig2_game(), 1.0, 41).unwrap();
        assert!(!stats.events.is_empty());
        let eta = state.eta();
        assert_eq!(eta.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn frozen_sites_never_flip() {
        let gamma = 1.0 / 32.0;
        let domain = LatticeDomain::fixed_1d(gamma, -3.0, 3.0, -1.0, 1.0).unwrap();
        let j = Kernel::gaussian(2.0, 1, 6.0).unwrap();
        let kernel = domain.kac_kernel(&j).unwrap();
        let mut state = LatticeState::sample_from_fn(domain, kernel, 2, 5, |pos| {
            if pos[0] >= 0.0 {
                vec![1.0, 0.0]
            } else {
                vec![0.0, 1.0]
            }
        })
        .unwrap();
        let frozen_before: Vec<(usize, u8)> = (0..state.domain().num_sites())
            .filter(|&s| !state.domain().grid().is_active(s))
            .map(|s| (s, state.sigma()[s]))
            .collect();
        run(&mut state, RateRule::LogitChoice, &fig2_game(), 2.0, 77).unwrap();
        for (site, before) in frozen_before {
            assert_eq!(state.sigma()[site], before);
        }
    }

    #[test]
    fn identical_seeds_identical_trajectories() {
        let make = || {
            let (domain, kernel) = small_setup(1.0 / 32.0, 2.0);
            LatticeState::sample_from_fn(domain, kernel, 2, 13, |_| vec![0.5, 0.5]).unwrap()
        };
        let mut a = make();
        let mut b = make();
        let sa = run(&mut a, RateRule::LogitChoice, &fig2_game(), 1.0, 55).unwrap();
        let sb = run(&mut b, RateRule::LogitChoice, &fig2_game(), 1.0, 55).unwrap();
        assert_eq!(sa.events, sb.events);
        assert_eq!(a.sigma(), b.sigma());
        let mut c = make();
        let sc = run(&mut c, RateRule::LogitChoice, &fig2_game(), 1.0, 56).unwrap();
        assert_ne!(sa.events, sc.events);
    }

    #[test]
    fn thinning_matches_generator_on_two_sites() {
        // 2-site torus, uniform kernel, logit rule: conditional on the
        // configuration, event types must follow the generator's jump
        // distribution. Check 3-sigma multinomial bands per configuration.
        let game = fig2_game();
        let domain = LatticeDomain::periodic_1d(0.5, 0.0, 1.0).unwrap();
        let j = Kernel::uniform(1, 1.0).unwrap();
        let kernel = domain.kac_kernel(&j).unwrap();
        let mut state = LatticeState::sample_from_fn(domain, kernel, 2, 2, |p| {
            if p[0] < 0.5 {
                vec![1.0, 0.0]
            } else {
                vec![0.0, 1.0]
            }
        })
        .unwrap();
        let sigma0 = state.sigma().to_vec();
        let stats = run(&mut state, RateRule::LogitChoice, &game, 120_000.0, 3).unwrap();
        assert!(stats.events.len() > 100_000);

        // Replay events, tallying (config, site, k) and per-config totals.
        let mut sigma = sigma0;
        let mut counts = std::collections::HashMap::<(u8, u8, usize, u8), u64>::new();
        let mut config_totals = std::collections::HashMap::<(u8, u8), u64>::new();
        for e in &stats.events {
            let cfg = (sigma[0], sigma[1]);
            *counts.entry((cfg.0, cfg.1, e.site, e.new_strategy)).or_default() += 1;
            *config_totals.entry(cfg).or_default() += 1;
            sigma[e.site] = e.new_strategy;
        }

        for (&cfg, &total) in &config_totals {
            if total < 5000 {
                continue;
            }
            // Generator rates for strategy *changes* out of this config.
            let mk_state = |cfg: (u8, u8)| {
                let domain = LatticeDomain::periodic_1d(0.5, 0.0, 1.0).unwrap();
                let j = Kernel::uniform(1, 1.0).unwrap();
                let kernel = domain.kac_kernel(&j).unwrap();
                LatticeState::sample_from_fn(domain, kernel, 2, 0, |p| {
                    let s = if p[0] < 0.5 { cfg.0 } else { cfg.1 };
                    let mut v = vec![0.0, 0.0];
                    v[s as usize] = 1.0;
                    v
                })
                .unwrap()
            };
            let probe = mk_state(cfg);
            let mut rates = Vec::new();
            for site in 0..2usize {
                for k in 0..2u8 {
                    if k == probe.sigma()[site] {
                        continue;
                    }
                    rates.push((site, k, probe.site_rate(site, k as usize, RateRule::LogitChoice, &game)));
                }
            }
            let total_rate: f64 = rates.iter().map(|r| r.2).sum();
            for (site, k, rate) in rates {
                let p = rate / total_rate;
                let observed = *counts.get(&(cfg.0, cfg.1, site, k)).unwrap_or(&0) as f64;
                let mean = total as f64 * p;
                let sd = (total as f64 * p * (1.0 - p)).sqrt();
                assert!(
                    (observed - mean).abs() <= 3.0 * sd + 1.0,
                    "cfg {cfg:?} event ({site},{k}): observed {observed}, expected {mean} +- {sd}"
                );
            }
        }
    }

    #[test]
    fn empirical_monomorphic_and_checkerboard() {
        let (domain, kernel) = small_setup(1.0 / 64.0, 2.0);
        let grid = SpatialGrid::periodic_1d(16, -PI, PI).unwrap();
        let mono = LatticeState::sample_from_fn(domain.clone(), kernel.clone(), 2, 1, |_| {
            vec![1.0, 0.0]
        })
        .unwrap();
        let em = mono.empirical(&grid).unwrap();
        for node in 0..grid.len() {
            assert_eq!(em.field.get(node, 0), 1.0);
        }

        // Alternating strategies, 2-site cells -> density 1/2 everywhere.
        let domain2 = LatticeDomain::periodic_1d(1.0 / 16.0, 0.0, 1.0).unwrap();
        let j = Kernel::uniform(1, 1.0).unwrap();
        let kern2 = domain2.kac_kernel(&j).unwrap();
        let mut alt = LatticeState::sample_from_fn(domain2, kern2, 2, 1, |_| vec![1.0, 0.0]).unwrap();
        for site in 0..16 {
            if site % 2 == 1 {
                alt.flip(site, 1);
            }
        }
        let grid8 = SpatialGrid::periodic_1d(8, 0.0, 1.0).unwrap();
        let em = alt.empirical(&grid8).unwrap();
        for node in 0..8 {
            assert_eq!(em.field.get(node, 0), 0.5);
        }
    }

    #[test]
    fn rate_limit_discrepancy_uniform_is_tiny() {
        // Mean-field case: both sides are the same functional of eta, up
        // to rounding, when the coarse cells tile the lattice evenly.
        let game = fig2_game();
        let j = Kernel::uniform(1, 1.0).unwrap();
        let report = rate_limit_check(
            RateRule::LogitChoice,
            &game,
            &j,
            (0.0, 1.0),
            None,
            &[1.0 / 32.0, 1.0 / 64.0],
            16,
            50,
            5,
            |_| vec![0.4, 0.6],
        )
        .unwrap();
        for d in &report.discrepancies {
            assert!(*d < 1e-10, "uniform-kernel discrepancy {d}");
        }
    }

    #[test]
    fn rate_limit_decreases_for_gaussian() {
        let game = fig2_game();
        let j = Kernel::gaussian(15.0, 1, 2.0 * PI).unwrap();
        let rule = RateRule::ComparingNonInnovative(Kappa::Finite(20.0).response());
        let report = rate_limit_check(
            rule,
            &game,
            &j,
            (-PI, PI),
            None,
            &[1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0],
            128,
            100,
            9,
            |p| {
                let v = 0.5 + 0.3 * p[0].cos();
                vec![v, 1.0 - v]
            },
        )
        .unwrap();
        assert!(
            report.is_decreasing(),
            "discrepancies {:?} not decreasing",
            report.discrepancies
        );
    }

    #[test]
    fn rate_limit_decreases_with_fixed_boundary() {
        // Kernel chosen to fit inside the frozen collar (cutoff < 2).
        let game = fig2_game();
        let j = Kernel::gaussian(8.0, 1, 6.0).unwrap();
        let report = rate_limit_check(
            RateRule::LogitChoice,
            &game,
            &j,
            (-3.0, 3.0),
            Some((-1.0, 1.0)),
            &[1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0],
            48,
            100,
            13,
            |p| {
                let v = 0.5 + 0.4 * (std::f64::consts::PI * p[0] / 3.0).sin();
                vec![v, 1.0 - v]
            },
        )
        .unwrap();
        assert!(
            report.is_decreasing(),
            "fixed-boundary discrepancies {:?}",
            report.discrepancies
        );
    }
}
