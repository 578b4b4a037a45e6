//! Normal-form games and coordination-game parameters.

use crate::{Error, Result};

/// A symmetric normal-form game: a finite strategy set and a payoff matrix.
///
/// `payoff(i, j)` is the payoff flow to a player using strategy `i` against
/// strategy `j`. Strategies are indexed `0..n` internally; 1-based labels
/// appear only in configuration files and reports.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    n: usize,
    payoff: Vec<f64>,
}

impl Game {
    /// Build a game from a row-major `n x n` payoff matrix.
    pub fn new(n: usize, payoff: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGame(format!("need at least 2 strategies, got {n}")));
        }
        if payoff.len() != n * n {
            return Err(Error::InvalidGame(format!(
                "payoff matrix has {} entries, expected {}",
                payoff.len(),
                n * n
            )));
        }
        if let Some(bad) = payoff.iter().find(|a| !a.is_finite()) {
            return Err(Error::InvalidGame(format!("non-finite payoff entry {bad}")));
        }
        Ok(Self { n, payoff })
    }

    /// Two-strategy game with diagonal payoffs `a11`, `a22` and zero
    /// off-diagonal entries.
    pub fn coordination(a11: f64, a22: f64) -> Result<Self> {
        Self::new(2, vec![a11, 0.0, 0.0, a22])
    }

    /// Number of strategies.
    pub fn num_strategies(&self) -> usize {
        self.n
    }

    /// Payoff `a(i, j)`.
    #[inline]
    pub fn payoff(&self, i: usize, j: usize) -> f64 {
        self.payoff[i * self.n + j]
    }

    /// Expected payoff of strategy `i` against the mixed profile `m`:
    /// `sum_l a(i, l) m(l)`.
    #[inline]
    pub fn payoff_against(&self, i: usize, m: &[f64]) -> f64 {
        let row = &self.payoff[i * self.n..(i + 1) * self.n];
        row.iter().zip(m).map(|(a, w)| a * w).sum()
    }

    /// Fill `out[i] = sum_l a(i, l) m(l)` for every strategy `i`.
    pub fn payoff_vector(&self, m: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            out[i] = self.payoff_against(i, m);
        }
    }

    /// Largest absolute row sum of the payoff matrix; a bound on `|payoff|`
    /// against any mixed profile.
    pub fn max_abs_payoff(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.payoff(i, j).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }
}

/// Derived parameters of a normalized two-strategy coordination game.
///
/// With `a(1,2) = a(2,1) = 0` and positive diagonal payoffs, the mixed
/// Nash equilibrium is `zeta = a22 / (a11 + a22)` and `beta = a11 + a22`
/// sets the payoff scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordinationParams {
    pub zeta: f64,
    pub beta: f64,
}

impl CoordinationParams {
    pub fn new(zeta: f64, beta: f64) -> Result<Self> {
        if !(zeta > 0.0 && zeta < 1.0) {
            return Err(Error::NotACoordinationGame(format!("zeta = {zeta} not in (0, 1)")));
        }
        if !(beta > 0.0) {
            return Err(Error::NotACoordinationGame(format!("beta = {beta} not positive")));
        }
        Ok(Self { zeta, beta })
    }

    /// Payoff of strategy 1 minus payoff of strategy 2 when the opponent
    /// plays strategy 1 with probability `r`: `beta * (r - zeta)`.
    #[inline]
    pub fn payoff_gap(&self, r: f64) -> f64 {
        self.beta * (r - self.zeta)
    }

    /// The game realizing these parameters: `a11 = beta (1 - zeta)`,
    /// `a22 = beta zeta`.
    pub fn game(&self) -> Game {
        Game::coordination(self.beta * (1.0 - self.zeta), self.beta * self.zeta)
            .expect("valid by construction")
    }
}

/// Extract `(zeta, beta)` from a normalized two-strategy coordination game.
pub fn coordination_params(g: &Game) -> Result<CoordinationParams> {
    if g.num_strategies() != 2 {
        return Err(Error::NotACoordinationGame(format!(
            "{} strategies, expected 2",
            g.num_strategies()
        )));
    }
    if g.payoff(0, 1) != 0.0 || g.payoff(1, 0) != 0.0 {
        return Err(Error::NotACoordinationGame(format!(
            "off-diagonal payoffs must vanish, got a12 = {}, a21 = {}",
            g.payoff(0, 1),
            g.payoff(1, 0)
        )));
    }
    let (a11, a22) = (g.payoff(0, 0), g.payoff(1, 1));
    if a11 <= 0.0 || a22 <= 0.0 {
        return Err(Error::NotACoordinationGame(format!(
            "diagonal payoffs must be positive, got a11 = {a11}, a22 = {a22}"
        )));
    }
    CoordinationParams::new(a22 / (a11 + a22), a11 + a22)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_games() {
        assert!(Game::new(1, vec![1.0]).is_err());
        assert!(Game::new(2, vec![1.0, f64::NAN, 0.0, 1.0]).is_err());
        assert!(Game::new(2, vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn coordination_params_fig2() {
        let g = Game::coordination(2.0 / 3.0, 1.0 / 3.0).unwrap();
        let p = coordination_params(&g).unwrap();
        assert!((p.zeta - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.beta - 1.0).abs() < 1e-15);
    }

    #[test]
    fn coordination_params_fig7() {
        let g = Game::coordination(5.0, 5.0).unwrap();
        let p = coordination_params(&g).unwrap();
        assert_eq!(p.zeta, 0.5);
        assert_eq!(p.beta, 10.0);
    }

    #[test]
    fn coordination_params_fig5() {
        let g = Game::coordination(20.0 / 3.0, 10.0 / 3.0).unwrap();
        let p = coordination_params(&g).unwrap();
        assert!((p.zeta - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.beta - 10.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_coordination() {
        let g = Game::new(2, vec![1.0, 0.5, 0.0, 1.0]).unwrap();
        assert!(coordination_params(&g).is_err());
        let g = Game::coordination(-1.0, 1.0).unwrap();
        assert!(coordination_params(&g).is_err());
    }

    #[test]
    fn params_round_trip_through_game() {
        let p = CoordinationParams::new(1.0 / 3.0, 10.0).unwrap();
        let q = coordination_params(&p.game()).unwrap();
        assert!((p.zeta - q.zeta).abs() < 1e-15);
        assert!((p.beta - q.beta).abs() < 1e-12);
    }

    #[test]
    fn payoff_vector_matches_manual_sum() {
        let g = Game::new(3, vec![1.0, 2.0, 0.0, 0.5, 1.5, 1.0, 0.0, 0.0, 3.0]).unwrap();
        let m = [0.2, 0.3, 0.5];
        let mut out = [0.0; 3];
        g.payoff_vector(&m, &mut out);
        assert!((out[0] - (0.2 + 0.6)).abs() < 1e-15);
        assert!((out[2] - 1.5).abs() < 1e-15);
    }
}
