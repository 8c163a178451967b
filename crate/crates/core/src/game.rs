//! Finite strategic-form games, mixed strategies and expected payoffs.
//!
//! Pure profiles are addressed by a mixed-radix index in which player 0 is the
//! most significant digit. The payoff table stores, for every profile in that
//! order, one payoff per player.

use crate::error::{Error, Result};

/// Absolute tolerance shared by every payoff comparison in the crate.
pub const TOLERANCE: f64 = 1e-9;

pub type Player = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    players: Vec<String>,
    strategies: Vec<Vec<String>>,
    /// `payoffs[profile * n + player]`
    payoffs: Vec<f64>,
    strides: Vec<usize>,
}

impl Game {
    /// Builds a game from player names, per-player strategy names and a flat
    /// payoff table (profile-major, players consecutive).
    pub fn new(
        players: Vec<String>,
        strategies: Vec<Vec<String>>,
        payoffs: Vec<f64>,
    ) -> Result<Self> {
        if players.is_empty() {
            return Err(Error::invalid("a game needs at least one player"));
        }
        if strategies.len() != players.len() {
            return Err(Error::invalid(format!(
                "{} players but {} strategy lists",
                players.len(),
                strategies.len()
            )));
        }
        if let Some(i) = strategies.iter().position(|s| s.is_empty()) {
            return Err(Error::invalid(format!("player {i} has no pure strategies")));
        }
        let n = players.len();
        let mut strides = vec![1; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * strategies[i + 1].len();
        }
        let profiles = strides[0] * strategies[0].len();
        if payoffs.len() != profiles * n {
            return Err(Error::invalid(format!(
                "payoff table has {} entries, expected {}",
                payoffs.len(),
                profiles * n
            )));
        }
        if let Some(k) = payoffs.iter().position(|u| !u.is_finite()) {
            return Err(Error::invalid(format!("payoff entry {k} is not finite")));
        }
        Ok(Game {
            players,
            strategies,
            payoffs,
            strides,
        })
    }

    /// Convenience constructor with generated names (`P1`, `s1`, ...).
    pub fn from_shape(strategy_counts: &[usize], payoffs: Vec<f64>) -> Result<Self> {
        let players = (1..=strategy_counts.len())
            .map(|i| format!("P{i}"))
            .collect();
        let strategies = strategy_counts
            .iter()
            .map(|&l| (1..=l).map(|j| format!("s{j}")).collect())
            .collect();
        Game::new(players, strategies, payoffs)
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn player_names(&self) -> &[String] {
        &self.players
    }

    pub fn strategy_names(&self, player: Player) -> &[String] {
        &self.strategies[player]
    }

    pub fn num_strategies(&self, player: Player) -> usize {
        self.strategies[player].len()
    }

    pub fn strategy_counts(&self) -> Vec<usize> {
        self.strategies.iter().map(Vec::len).collect()
    }

    pub fn num_profiles(&self) -> usize {
        self.payoffs.len() / self.num_players()
    }

    pub fn payoff_table(&self) -> &[f64] {
        &self.payoffs
    }

    pub fn profile_index(&self, profile: &[usize]) -> usize {
        profile
            .iter()
            .zip(&self.strides)
            .map(|(s, st)| s * st)
            .sum()
    }

    pub fn profile_at(&self, index: usize) -> Vec<usize> {
        self.strides
            .iter()
            .zip(&self.strategies)
            .map(|(st, s)| (index / st) % s.len())
            .collect()
    }

    /// Payoff u_i(s) of a pure profile.
    pub fn payoff(&self, profile: &[usize], player: Player) -> f64 {
        self.payoffs[self.profile_index(profile) * self.num_players() + player]
    }

    fn payoff_by_index(&self, index: usize, player: Player) -> f64 {
        self.payoffs[index * self.num_players() + player]
    }

    /// Returns a copy of the game with `u_i` replaced by `scale * u_i + shift`.
    pub fn transformed(&self, player: Player, scale: f64, shift: f64) -> Game {
        let n = self.num_players();
        let mut out = self.clone();
        for (k, u) in out.payoffs.iter_mut().enumerate() {
            if k % n == player {
                *u = scale * *u + shift;
            }
        }
        out
    }

    /// Weight difference `u_i(s) - u_i(s~)` for profiles that differ only in
    /// player `i`'s coordinate; zero for every other pair.
    pub fn payoff_difference(
        &self,
        profile: &[usize],
        other: &[usize],
        player: Player,
    ) -> Result<f64> {
        self.check_profile(profile)?;
        self.check_profile(other)?;
        if player >= self.num_players() {
            return Err(Error::invalid(format!("player {player} out of range")));
        }
        let comparable = profile
            .iter()
            .zip(other)
            .enumerate()
            .all(|(j, (a, b))| j == player || a == b);
        if !comparable || profile[player] == other[player] {
            return Ok(0.0);
        }
        Ok(self.payoff(profile, player) - self.payoff(other, player))
    }

    fn check_profile(&self, profile: &[usize]) -> Result<()> {
        if profile.len() != self.num_players() {
            return Err(Error::invalid(format!(
                "profile has {} coordinates, game has {} players",
                profile.len(),
                self.num_players()
            )));
        }
        for (i, &s) in profile.iter().enumerate() {
            if s >= self.num_strategies(i) {
                return Err(Error::invalid(format!(
                    "strategy {s} out of range for player {i}"
                )));
            }
        }
        Ok(())
    }

    /// Expected payoff of `player` under a profile of mixed strategies.
    pub fn expected_payoff(&self, profile: &SituationProfile, player: Player) -> Result<f64> {
        self.check_situation(profile)?;
        if player >= self.num_players() {
            return Err(Error::invalid(format!("player {player} out of range")));
        }
        let dists: Vec<Option<&[f64]>> = profile
            .components
            .iter()
            .map(|x| Some(x.weights()))
            .collect();
        Ok(self.expected_payoffs_of(&dists)[player])
    }

    /// All players' expected payoffs for a tuple of distributions, where a
    /// `None` entry stands for the zero function (used to extend faces to
    /// full profiles). A zero entry makes every product vanish.
    pub fn expected_payoffs_of(&self, dists: &[Option<&[f64]>]) -> Vec<f64> {
        let n = self.num_players();
        let mut out = vec![0.0; n];
        if dists.iter().any(Option::is_none) {
            return out;
        }
        for index in 0..self.num_profiles() {
            let profile = self.profile_at(index);
            let prob: f64 = dists
                .iter()
                .zip(&profile)
                .map(|(x, &s)| x.map_or(0.0, |x| x[s]))
                .product();
            if prob == 0.0 {
                continue;
            }
            for (i, e) in out.iter_mut().enumerate() {
                *e += prob * self.payoff_by_index(index, i);
            }
        }
        out
    }

    pub(crate) fn check_situation(&self, profile: &SituationProfile) -> Result<()> {
        if profile.components.len() != self.num_players() {
            return Err(Error::invalid(format!(
                "situation has {} components, game has {} players",
                profile.components.len(),
                self.num_players()
            )));
        }
        for (i, x) in profile.components.iter().enumerate() {
            if x.player != i {
                return Err(Error::invalid(format!(
                    "component {i} belongs to player {}",
                    x.player
                )));
            }
            if x.weights.len() != self.num_strategies(i) {
                return Err(Error::invalid(format!(
                    "mixed strategy of player {i} has {} weights, expected {}",
                    x.weights.len(),
                    self.num_strategies(i)
                )));
            }
        }
        Ok(())
    }

    /// Brute-force Nash test: keeps the candidates where no player gains more
    /// than `tol` by a unilateral pure deviation.
    pub fn nash_oracle(
        &self,
        candidates: &[SituationProfile],
        tol: f64,
    ) -> Result<Vec<SituationProfile>> {
        let mut out = Vec::new();
        for x in candidates {
            if self.is_nash(x, tol)? {
                out.push(x.clone());
            }
        }
        Ok(out)
    }

    pub fn is_nash(&self, x: &SituationProfile, tol: f64) -> Result<bool> {
        self.check_situation(x)?;
        for i in 0..self.num_players() {
            let current = self.expected_payoff(x, i)?;
            for s in 0..self.num_strategies(i) {
                let deviation = x.with_component(MixedStrategy::pure(i, s, self.num_strategies(i)));
                if self.expected_payoff(&deviation, i)? > current + tol {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// A probability distribution over one player's pure strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedStrategy {
    player: Player,
    weights: Vec<f64>,
}

impl MixedStrategy {
    /// Validates a distribution. Sums within [`TOLERANCE`] of one are
    /// renormalised; anything further off is rejected.
    pub fn new(player: Player, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid(format!(
                "empty distribution for player {player}"
            )));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::invalid(format!(
                "distribution for player {player} has invalid weight {w}"
            )));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > TOLERANCE {
            return Err(Error::invalid(format!(
                "distribution for player {player} sums to {sum}, not 1"
            )));
        }
        let weights = weights.into_iter().map(|w| (w / sum).min(1.0)).collect();
        Ok(MixedStrategy { player, weights })
    }

    /// Delta distribution on pure strategy `strategy` out of `count`.
    pub fn pure(player: Player, strategy: usize, count: usize) -> Self {
        let mut weights = vec![0.0; count];
        weights[strategy] = 1.0;
        MixedStrategy { player, weights }
    }

    pub fn uniform(player: Player, count: usize) -> Self {
        MixedStrategy {
            player,
            weights: vec![1.0 / count as f64; count],
        }
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The pure strategy this distribution is concentrated on, if any.
    pub fn as_pure(&self) -> Option<usize> {
        let mut support = self.weights.iter().enumerate().filter(|(_, w)| **w > 0.0);
        match (support.next(), support.next()) {
            (Some((j, _)), None) => Some(j),
            _ => None,
        }
    }
}

/// One mixed strategy per player.
#[derive(Debug, Clone, PartialEq)]
pub struct SituationProfile {
    components: Vec<MixedStrategy>,
}

impl SituationProfile {
    pub fn new(components: Vec<MixedStrategy>) -> Result<Self> {
        if let Some((i, x)) = components.iter().enumerate().find(|(i, x)| x.player != *i) {
            return Err(Error::invalid(format!(
                "component {i} belongs to player {}",
                x.player
            )));
        }
        Ok(SituationProfile { components })
    }

    /// All-delta profile at a pure profile of `game`.
    pub fn pure(game: &Game, profile: &[usize]) -> Self {
        SituationProfile {
            components: profile
                .iter()
                .enumerate()
                .map(|(i, &s)| MixedStrategy::pure(i, s, game.num_strategies(i)))
                .collect(),
        }
    }

    pub fn components(&self) -> &[MixedStrategy] {
        &self.components
    }

    /// Replaces the component of `x.player()`.
    pub fn with_component(&self, x: MixedStrategy) -> Self {
        let mut components = self.components.clone();
        let i = x.player;
        components[i] = x;
        SituationProfile { components }
    }
}
