//! Domain types shared by every other module: action spaces, joint
//! strategies, Markov game skeletons, policies, rewards and value tables.
//!
//! Joint actions are stored densely and indexed in row-major order of the
//! per-player action indices (player 0 is the most significant digit).
//! Opponent profiles `a_{-i}` use the same row-major order over the
//! remaining players. Stages are 0-indexed: `h = 0` is the first decision
//! stage and `h = horizon` is the terminal stage of a value table.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Sum-to-one tolerance for probability vectors.
pub const PROB_TOL: f64 = 1e-9;
/// Negative entries down to `-NEG_CLAMP` are treated as float noise and zeroed.
pub const NEG_CLAMP: f64 = 1e-12;
/// L∞ tolerance used when deciding whether two conditionals coincide.
pub const COND_TOL: f64 = 1e-9;

/// Solution concept of a strict equilibrium.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Concept {
    /// Strict Nash equilibrium (product strategies only).
    Ne,
    /// Strict correlated equilibrium.
    Ce,
    /// Strict coarse-correlated equilibrium.
    Cce,
}

impl Concept {
    pub const ALL: [Concept; 3] = [Concept::Ne, Concept::Ce, Concept::Cce];

    pub fn as_str(self) -> &'static str {
        match self {
            Concept::Ne => "ne",
            Concept::Ce => "ce",
            Concept::Cce => "cce",
        }
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Concept::Ne => "sNE",
            Concept::Ce => "sCE",
            Concept::Cce => "sCCE",
        };
        f.write_str(s)
    }
}

impl FromStr for Concept {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ne" | "sne" | "nash" => Ok(Concept::Ne),
            "ce" | "sce" => Ok(Concept::Ce),
            "cce" | "scce" => Ok(Concept::Cce),
            other => Err(Error::InvalidValue(format!("unknown concept '{other}'"))),
        }
    }
}

/// Which deviations a boundedly rational player is assumed to consider.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum DeviationClass {
    /// Deviations never play the target action `a*_i` (defined at stages
    /// where the player's target marginal is a point mass).
    NeverTarget,
    /// CE deviations never keep the recommended action. For NE/CCE, where
    /// no recommendation is observed, this coincides with `NeverTarget`.
    NeverRecommended,
    #[default]
    Unrestricted,
}

impl DeviationClass {
    pub fn as_str(self) -> &'static str {
        match self {
            DeviationClass::NeverTarget => "never-target",
            DeviationClass::NeverRecommended => "never-recommended",
            DeviationClass::Unrestricted => "unrestricted",
        }
    }
}

impl fmt::Display for DeviationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DeviationClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "never-target" => Ok(DeviationClass::NeverTarget),
            "never-recommended" => Ok(DeviationClass::NeverRecommended),
            "unrestricted" => Ok(DeviationClass::Unrestricted),
            other => Err(Error::InvalidValue(format!(
                "unknown deviation class '{other}'"
            ))),
        }
    }
}

/// Per-player action counts of a finite joint action space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ActionShape {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl ActionShape {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::shape("a game needs at least one player"));
        }
        if let Some(i) = sizes.iter().position(|&k| k == 0) {
            return Err(Error::shape(format!("player {i} has no actions")));
        }
        let mut strides = vec![1usize; sizes.len()];
        for i in (0..sizes.len() - 1).rev() {
            strides[i] = strides[i + 1]
                .checked_mul(sizes[i + 1])
                .ok_or_else(|| Error::shape("joint action space overflows usize"))?;
        }
        let total = strides[0]
            .checked_mul(sizes[0])
            .ok_or_else(|| Error::shape("joint action space overflows usize"))?;
        Ok(ActionShape {
            sizes,
            strides,
            total,
        })
    }

    pub fn num_players(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn num_actions(&self, player: usize) -> usize {
        self.sizes[player]
    }

    /// `|A|`.
    pub fn num_joint(&self) -> usize {
        self.total
    }

    /// `|A_{-i}|`.
    pub fn num_opponent_profiles(&self, player: usize) -> usize {
        self.total / self.sizes[player]
    }

    pub fn stride(&self, player: usize) -> usize {
        self.strides[player]
    }

    pub fn check_player(&self, player: usize) -> Result<()> {
        if player >= self.num_players() {
            return Err(Error::shape(format!(
                "player {player} out of range for {} players",
                self.num_players()
            )));
        }
        Ok(())
    }

    pub fn check_action(&self, player: usize, action: usize) -> Result<()> {
        self.check_player(player)?;
        if action >= self.sizes[player] {
            return Err(Error::shape(format!(
                "action {action} out of range for player {player} with {} actions",
                self.sizes[player]
            )));
        }
        Ok(())
    }

    /// Player `i`'s action in joint action `joint`.
    #[inline]
    pub fn action_of(&self, joint: usize, player: usize) -> usize {
        (joint / self.strides[player]) % self.sizes[player]
    }

    pub fn decode(&self, joint: usize) -> Vec<usize> {
        (0..self.num_players())
            .map(|i| self.action_of(joint, i))
            .collect()
    }

    pub fn encode(&self, actions: &[usize]) -> Result<usize> {
        if actions.len() != self.num_players() {
            return Err(Error::shape(format!(
                "joint action has {} components, expected {}",
                actions.len(),
                self.num_players()
            )));
        }
        let mut idx = 0;
        for (i, &a) in actions.iter().enumerate() {
            self.check_action(i, a)?;
            idx += a * self.strides[i];
        }
        Ok(idx)
    }

    /// Replace player `i`'s component of `joint` by `action`.
    #[inline]
    pub fn with_action(&self, joint: usize, player: usize, action: usize) -> usize {
        let s = self.strides[player];
        joint - self.action_of(joint, player) * s + action * s
    }

    /// Row-major index of the opponent profile `a_{-i}` inside `joint`.
    #[inline]
    pub fn opponent_index(&self, joint: usize, player: usize) -> usize {
        let s = self.strides[player];
        let high = joint / (s * self.sizes[player]);
        high * s + joint % s
    }

    /// Joint action `(j, a_{-i})` from player `i`'s action and an opponent index.
    #[inline]
    pub fn join(&self, player: usize, action: usize, opponent: usize) -> usize {
        let s = self.strides[player];
        (opponent / s) * s * self.sizes[player] + action * s + opponent % s
    }
}

/// Validate a probability vector in place: reject entries below `-NEG_CLAMP`,
/// clamp the remaining negatives to zero, check the sum against `PROB_TOL`,
/// then renormalize.
pub fn sanitize_distribution(values: &mut [f64], context: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::distribution(context, "empty distribution"));
    }
    for (k, v) in values.iter_mut().enumerate() {
        if !v.is_finite() {
            return Err(Error::distribution(
                context,
                format!("entry {k} is not finite"),
            ));
        }
        if *v < -NEG_CLAMP {
            return Err(Error::distribution(
                context,
                format!("entry {k} is negative ({v})"),
            ));
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > PROB_TOL {
        return Err(Error::distribution(
            context,
            format!("entries sum to {sum}, expected 1"),
        ));
    }
    if sum != 1.0 {
        for v in values.iter_mut() {
            *v /= sum;
        }
    }
    Ok(())
}

/// A normal-form game: action sets plus one utility per player and joint action.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalFormGame {
    shape: ActionShape,
    utility: Vec<Vec<f64>>,
}

impl NormalFormGame {
    pub fn new(shape: ActionShape, utility: Vec<Vec<f64>>) -> Result<Self> {
        if utility.len() != shape.num_players() {
            return Err(Error::shape(format!(
                "utility has {} players, shape has {}",
                utility.len(),
                shape.num_players()
            )));
        }
        for (i, row) in utility.iter().enumerate() {
            if row.len() != shape.num_joint() {
                return Err(Error::shape(format!(
                    "utility of player {i} has {} entries, expected {}",
                    row.len(),
                    shape.num_joint()
                )));
            }
            if let Some(a) = row.iter().position(|u| !u.is_finite()) {
                return Err(Error::InvalidValue(format!(
                    "utility of player {i} at joint action {a} is not finite"
                )));
            }
        }
        Ok(NormalFormGame { shape, utility })
    }

    pub fn zeros(shape: ActionShape) -> Self {
        let utility = vec![vec![0.0; shape.num_joint()]; shape.num_players()];
        NormalFormGame { shape, utility }
    }

    pub fn shape(&self) -> &ActionShape {
        &self.shape
    }

    #[inline]
    pub fn utility(&self, player: usize, joint: usize) -> f64 {
        self.utility[player][joint]
    }

    pub fn utilities(&self, player: usize) -> &[f64] {
        &self.utility[player]
    }

    pub fn set(&mut self, player: usize, joint: usize, value: f64) {
        self.utility[player][joint] = value;
    }

    pub fn max_abs(&self) -> f64 {
        self.utility
            .iter()
            .flatten()
            .fold(0.0_f64, |m, u| m.max(u.abs()))
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let utility = self
            .utility
            .iter()
            .map(|row| row.iter().map(|u| u * alpha).collect())
            .collect();
        NormalFormGame {
            shape: self.shape.clone(),
            utility,
        }
    }

    /// View as a one-stage, one-state reward table.
    pub fn to_reward_table(&self) -> RewardTable {
        let n = self.shape.num_players();
        let mut table = RewardTable::zeros(n, 1, 1, self.shape.num_joint());
        for i in 0..n {
            for a in 0..self.shape.num_joint() {
                table.set(i, 0, 0, a, self.utility[i][a]);
            }
        }
        table
    }

    /// Inverse of [`NormalFormGame::to_reward_table`] for `H = 1`, `|S| = 1` tables.
    pub fn from_reward_table(shape: ActionShape, table: &RewardTable) -> Result<Self> {
        if table.horizon() != 1 || table.num_states() != 1 {
            return Err(Error::shape(
                "only one-stage, one-state reward tables describe a normal-form game",
            ));
        }
        if table.num_players() != shape.num_players() || table.num_joint() != shape.num_joint() {
            return Err(Error::shape("reward table does not match the action shape"));
        }
        let utility = (0..shape.num_players())
            .map(|i| (0..shape.num_joint()).map(|a| table.get(i, 0, 0, a)).collect())
            .collect();
        NormalFormGame::new(shape, utility)
    }
}

/// The conditional distribution over `A_{-i}` given that player `i` plays `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Conditional {
    pub player: usize,
    pub action: usize,
    /// `p_ij`, the marginal probability of `j`.
    pub mass: f64,
    /// `σ_ij`; the all-zero vector when `mass == 0`.
    pub dist: Vec<f64>,
}

impl Conditional {
    pub fn is_zero(&self) -> bool {
        self.mass == 0.0
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.dist)
    }

    /// L∞ comparison of the two conditional distributions.
    pub fn approx_eq(&self, other: &Conditional, tol: f64) -> bool {
        self.dist.len() == other.dist.len()
            && self
                .dist
                .iter()
                .zip(&other.dist)
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

pub(crate) fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `‖c1‖₂ (1 − cos θ)` where `θ` is the angle between the two conditionals.
///
/// When `c2` is the all-zero vector the cosine is taken as 0, matching the
/// zero utility rows assigned to unsupported actions.
pub fn cosine_gap(c1: &Conditional, c2: &Conditional) -> Result<f64> {
    if c1.dist.len() != c2.dist.len() {
        return Err(Error::shape(format!(
            "conditionals over {} and {} opponent profiles",
            c1.dist.len(),
            c2.dist.len()
        )));
    }
    let n1 = c1.norm();
    if c1.is_zero() || n1 == 0.0 {
        return Err(Error::Domain(format!(
            "conditional of player {} action {} has zero mass",
            c1.player, c1.action
        )));
    }
    if c1.dist == c2.dist {
        return Ok(0.0);
    }
    let n2 = c2.norm();
    if n2 == 0.0 {
        return Ok(n1);
    }
    let cos = (dot(&c1.dist, &c2.dist) / (n1 * n2)).clamp(-1.0, 1.0);
    Ok(n1 * (1.0 - cos))
}

/// A distribution over joint actions.
#[derive(Clone, Debug, PartialEq)]
pub struct JointMixedStrategy {
    shape: ActionShape,
    probs: Vec<f64>,
}

impl JointMixedStrategy {
    /// Validates (and lightly sanitizes) `probs`; see [`sanitize_distribution`].
    pub fn new(shape: ActionShape, mut probs: Vec<f64>) -> Result<Self> {
        if probs.len() != shape.num_joint() {
            return Err(Error::shape(format!(
                "strategy has {} entries, expected {}",
                probs.len(),
                shape.num_joint()
            )));
        }
        sanitize_distribution(&mut probs, "joint strategy")?;
        Ok(JointMixedStrategy { shape, probs })
    }

    pub fn pure(shape: ActionShape, actions: &[usize]) -> Result<Self> {
        let idx = shape.encode(actions)?;
        let mut probs = vec![0.0; shape.num_joint()];
        probs[idx] = 1.0;
        Ok(JointMixedStrategy { shape, probs })
    }

    pub fn uniform(shape: ActionShape) -> Self {
        let n = shape.num_joint();
        JointMixedStrategy {
            probs: vec![1.0 / n as f64; n],
            shape,
        }
    }

    /// Outer product of per-player marginals.
    pub fn product(shape: ActionShape, marginals: &[Vec<f64>]) -> Result<Self> {
        if marginals.len() != shape.num_players() {
            return Err(Error::shape("one marginal per player required"));
        }
        let mut clean = Vec::with_capacity(marginals.len());
        for (i, m) in marginals.iter().enumerate() {
            if m.len() != shape.num_actions(i) {
                return Err(Error::shape(format!(
                    "marginal of player {i} has {} entries, expected {}",
                    m.len(),
                    shape.num_actions(i)
                )));
            }
            let mut m = m.clone();
            sanitize_distribution(&mut m, &format!("marginal of player {i}"))?;
            clean.push(m);
        }
        let probs = (0..shape.num_joint())
            .map(|a| {
                clean
                    .iter()
                    .enumerate()
                    .map(|(i, m)| m[shape.action_of(a, i)])
                    .product()
            })
            .collect();
        Ok(JointMixedStrategy { shape, probs })
    }

    pub fn shape(&self) -> &ActionShape {
        &self.shape
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn prob(&self, joint: usize) -> f64 {
        self.probs[joint]
    }

    /// `p_ij` for every action `j` of player `i`.
    pub fn marginal(&self, player: usize) -> Vec<f64> {
        let mut m = vec![0.0; self.shape.num_actions(player)];
        for (a, &p) in self.probs.iter().enumerate() {
            m[self.shape.action_of(a, player)] += p;
        }
        m
    }

    /// Marginal of the opponents' joint action `a_{-i}`.
    pub fn opponent_marginal(&self, player: usize) -> Vec<f64> {
        let mut m = vec![0.0; self.shape.num_opponent_profiles(player)];
        for (a, &p) in self.probs.iter().enumerate() {
            m[self.shape.opponent_index(a, player)] += p;
        }
        m
    }

    /// Action `j` if player `i` plays `j` with probability one.
    pub fn pure_action(&self, player: usize) -> Option<usize> {
        let support = self.support_unchecked(player);
        match support.as_slice() {
            [j] => Some(*j),
            _ => None,
        }
    }

    /// Whether the strategy factorizes over players within `tol`.
    pub fn is_product(&self, tol: f64) -> bool {
        let marginals: Vec<Vec<f64>> = (0..self.shape.num_players())
            .map(|i| self.marginal(i))
            .collect();
        self.probs.iter().enumerate().all(|(a, &p)| {
            let q: f64 = marginals
                .iter()
                .enumerate()
                .map(|(i, m)| m[self.shape.action_of(a, i)])
                .product();
            (p - q).abs() <= tol
        })
    }

    pub fn conditional(&self, player: usize, action: usize) -> Result<Conditional> {
        self.shape.check_action(player, action)?;
        let k = self.shape.num_opponent_profiles(player);
        let mut dist: Vec<f64> = (0..k)
            .map(|o| self.probs[self.shape.join(player, action, o)])
            .collect();
        let mass: f64 = dist.iter().sum();
        if mass > 0.0 {
            for d in dist.iter_mut() {
                *d /= mass;
            }
        } else {
            dist.iter_mut().for_each(|d| *d = 0.0);
        }
        Ok(Conditional {
            player,
            action,
            mass,
            dist,
        })
    }

    /// All conditionals of player `i` in one pass over the joint tensor.
    pub fn conditionals(&self, player: usize) -> Result<Vec<Conditional>> {
        self.shape.check_player(player)?;
        let na = self.shape.num_actions(player);
        let k = self.shape.num_opponent_profiles(player);
        let mut dists = vec![vec![0.0; k]; na];
        for (a, &p) in self.probs.iter().enumerate() {
            dists[self.shape.action_of(a, player)][self.shape.opponent_index(a, player)] = p;
        }
        Ok(dists
            .into_iter()
            .enumerate()
            .map(|(j, mut dist)| {
                let mass: f64 = dist.iter().sum();
                if mass > 0.0 {
                    dist.iter_mut().for_each(|d| *d /= mass);
                }
                Conditional {
                    player,
                    action: j,
                    mass,
                    dist,
                }
            })
            .collect())
    }

    /// Actions `j` of player `i` with `p_ij > 0` (exact comparison).
    pub fn support(&self, player: usize) -> Result<Vec<usize>> {
        self.shape.check_player(player)?;
        Ok(self.support_unchecked(player))
    }

    fn support_unchecked(&self, player: usize) -> Vec<usize> {
        let na = self.shape.num_actions(player);
        let mut supported = vec![false; na];
        for (a, &p) in self.probs.iter().enumerate() {
            if p > 0.0 {
                supported[self.shape.action_of(a, player)] = true;
            }
        }
        (0..na).filter(|&j| supported[j]).collect()
    }
}

/// Dense reward tensor `r_{i,h}(s, a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RewardTable {
    num_players: usize,
    horizon: usize,
    num_states: usize,
    num_joint: usize,
    values: Vec<f64>,
}

impl RewardTable {
    pub fn zeros(num_players: usize, horizon: usize, num_states: usize, num_joint: usize) -> Self {
        RewardTable {
            num_players,
            horizon,
            num_states,
            num_joint,
            values: vec![0.0; num_players * horizon * num_states * num_joint],
        }
    }

    /// Build from a flat vector in `(player, stage, state, joint)` order.
    pub fn from_flat(
        num_players: usize,
        horizon: usize,
        num_states: usize,
        num_joint: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        let expected = num_players * horizon * num_states * num_joint;
        if values.len() != expected {
            return Err(Error::shape(format!(
                "reward table has {} entries, expected {expected}",
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidValue(format!("reward entry {k} is not finite")));
        }
        Ok(RewardTable {
            num_players,
            horizon,
            num_states,
            num_joint,
            values,
        })
    }

    pub fn num_players(&self) -> usize {
        self.num_players
    }
    pub fn horizon(&self) -> usize {
        self.horizon
    }
    pub fn num_states(&self) -> usize {
        self.num_states
    }
    pub fn num_joint(&self) -> usize {
        self.num_joint
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn index(&self, player: usize, stage: usize, state: usize, joint: usize) -> usize {
        ((player * self.horizon + stage) * self.num_states + state) * self.num_joint + joint
    }

    #[inline]
    pub fn get(&self, player: usize, stage: usize, state: usize, joint: usize) -> f64 {
        self.values[self.index(player, stage, state, joint)]
    }

    #[inline]
    pub fn set(&mut self, player: usize, stage: usize, state: usize, joint: usize, value: f64) {
        let k = self.index(player, stage, state, joint);
        self.values[k] = value;
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn has_dims(&self, num_players: usize, horizon: usize, num_states: usize, num_joint: usize) -> bool {
        self.num_players == num_players
            && self.horizon == horizon
            && self.num_states == num_states
            && self.num_joint == num_joint
    }
}

/// A reward table whose entries all lie in `[-bound, bound]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RewardFunction {
    table: RewardTable,
    bound: f64,
}

impl RewardFunction {
    /// Slack allowed on the box constraint to absorb float noise.
    pub const BOUND_SLACK: f64 = 1e-9;

    pub fn new(table: RewardTable, bound: f64) -> Result<Self> {
        if !(bound > 0.0) || !bound.is_finite() {
            return Err(Error::InvalidValue(format!("reward bound {bound} must be positive")));
        }
        let worst = table.max_abs();
        if worst > bound + Self::BOUND_SLACK {
            return Err(Error::InvalidValue(format!(
                "reward entry of magnitude {worst} exceeds bound {bound}"
            )));
        }
        Ok(RewardFunction { table, bound })
    }

    pub fn table(&self) -> &RewardTable {
        &self.table
    }

    pub fn into_table(self) -> RewardTable {
        self.table
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    #[inline]
    pub fn get(&self, player: usize, stage: usize, state: usize, joint: usize) -> f64 {
        self.table.get(player, stage, state, joint)
    }
}

/// States, joint actions, horizon and transition kernel of a finite-horizon
/// Markov game, without the reward.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovGameSkeleton {
    shape: ActionShape,
    num_states: usize,
    horizon: usize,
    /// `P_h(s' | s, a)` flattened in `(h, s, a, s')` order.
    transitions: Vec<f64>,
    initial_dist: Vec<f64>,
    baseline: Option<RewardTable>,
}

impl MarkovGameSkeleton {
    pub fn new(
        shape: ActionShape,
        num_states: usize,
        horizon: usize,
        mut transitions: Vec<f64>,
        mut initial_dist: Vec<f64>,
    ) -> Result<Self> {
        if num_states == 0 {
            return Err(Error::shape("a Markov game needs at least one state"));
        }
        if horizon == 0 {
            return Err(Error::shape("horizon must be at least 1"));
        }
        let na = shape.num_joint();
        let expected = horizon * num_states * na * num_states;
        if transitions.len() != expected {
            return Err(Error::shape(format!(
                "transition kernel has {} entries, expected {expected}",
                transitions.len()
            )));
        }
        for h in 0..horizon {
            for s in 0..num_states {
                for a in 0..na {
                    let start = ((h * num_states + s) * na + a) * num_states;
                    sanitize_distribution(
                        &mut transitions[start..start + num_states],
                        &format!("transitions[{h}][{s}][{a}]"),
                    )?;
                }
            }
        }
        if initial_dist.len() != num_states {
            return Err(Error::shape(format!(
                "initial distribution has {} entries, expected {num_states}",
                initial_dist.len()
            )));
        }
        sanitize_distribution(&mut initial_dist, "initial_dist")?;
        Ok(MarkovGameSkeleton {
            shape,
            num_states,
            horizon,
            transitions,
            initial_dist,
            baseline: None,
        })
    }

    /// The `H = 1`, `|S| = 1` embedding of a normal-form game.
    pub fn single_stage(shape: ActionShape) -> Self {
        let na = shape.num_joint();
        MarkovGameSkeleton {
            shape,
            num_states: 1,
            horizon: 1,
            transitions: vec![1.0; na],
            initial_dist: vec![1.0],
            baseline: None,
        }
    }

    pub fn with_baseline(mut self, baseline: RewardTable) -> Result<Self> {
        if !baseline.has_dims(
            self.shape.num_players(),
            self.horizon,
            self.num_states,
            self.shape.num_joint(),
        ) {
            return Err(Error::shape("baseline reward does not match the game"));
        }
        self.baseline = Some(baseline);
        Ok(self)
    }

    pub fn shape(&self) -> &ActionShape {
        &self.shape
    }
    pub fn num_players(&self) -> usize {
        self.shape.num_players()
    }
    pub fn num_states(&self) -> usize {
        self.num_states
    }
    pub fn horizon(&self) -> usize {
        self.horizon
    }
    pub fn num_joint(&self) -> usize {
        self.shape.num_joint()
    }
    pub fn initial_dist(&self) -> &[f64] {
        &self.initial_dist
    }
    pub fn baseline(&self) -> Option<&RewardTable> {
        self.baseline.as_ref()
    }
    pub fn transitions(&self) -> &[f64] {
        &self.transitions
    }

    /// `P_h(· | s, a)`.
    #[inline]
    pub fn transition_row(&self, stage: usize, state: usize, joint: usize) -> &[f64] {
        let ns = self.num_states;
        let start = ((stage * ns + state) * self.shape.num_joint() + joint) * ns;
        &self.transitions[start..start + ns]
    }

    /// `Σ_{s'} P_h(s'|s,a) f(s')`.
    #[inline]
    pub fn expect_next(&self, stage: usize, state: usize, joint: usize, f: &[f64]) -> f64 {
        dot(self.transition_row(stage, state, joint), f)
    }

    pub fn empty_rewards(&self) -> RewardTable {
        RewardTable::zeros(self.num_players(), self.horizon, self.num_states, self.num_joint())
    }

    pub(crate) fn check_rewards(&self, r: &RewardTable) -> Result<()> {
        if !r.has_dims(self.num_players(), self.horizon, self.num_states, self.num_joint()) {
            return Err(Error::shape("reward table does not match the game"));
        }
        Ok(())
    }
}

/// A Markov joint policy: one joint strategy per `(h, s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovPolicy {
    shape: ActionShape,
    horizon: usize,
    num_states: usize,
    stages: Vec<JointMixedStrategy>,
    product: bool,
}

impl MarkovPolicy {
    /// `stages` is indexed by `h * num_states + s`.
    pub fn new(
        horizon: usize,
        num_states: usize,
        stages: Vec<JointMixedStrategy>,
        product: bool,
    ) -> Result<Self> {
        if horizon == 0 || num_states == 0 {
            return Err(Error::shape("policy needs at least one stage and one state"));
        }
        if stages.len() != horizon * num_states {
            return Err(Error::shape(format!(
                "policy has {} stage distributions, expected {}",
                stages.len(),
                horizon * num_states
            )));
        }
        let shape = stages[0].shape().clone();
        for (k, st) in stages.iter().enumerate() {
            if st.shape() != &shape {
                return Err(Error::shape(format!(
                    "stage (h={}, s={}) has a different action shape",
                    k / num_states,
                    k % num_states
                )));
            }
            if product && !st.is_product(PROB_TOL) {
                return Err(Error::Precondition(format!(
                    "policy is flagged as product but stage (h={}, s={}) does not factorize",
                    k / num_states,
                    k % num_states
                )));
            }
        }
        Ok(MarkovPolicy {
            shape,
            horizon,
            num_states,
            stages,
            product,
        })
    }

    /// The same strategy at every stage and state.
    pub fn stationary(horizon: usize, num_states: usize, sigma: JointMixedStrategy) -> Result<Self> {
        let product = sigma.is_product(PROB_TOL);
        MarkovPolicy::new(horizon, num_states, vec![sigma; horizon * num_states], product)
    }

    /// One-stage, one-state policy playing `sigma`.
    pub fn from_strategy(sigma: JointMixedStrategy) -> Self {
        let product = sigma.is_product(PROB_TOL);
        MarkovPolicy {
            shape: sigma.shape().clone(),
            horizon: 1,
            num_states: 1,
            stages: vec![sigma],
            product,
        }
    }

    pub fn shape(&self) -> &ActionShape {
        &self.shape
    }
    pub fn horizon(&self) -> usize {
        self.horizon
    }
    pub fn num_states(&self) -> usize {
        self.num_states
    }
    pub fn is_product(&self) -> bool {
        self.product
    }
    pub fn stages(&self) -> &[JointMixedStrategy] {
        &self.stages
    }

    #[inline]
    pub fn stage(&self, stage: usize, state: usize) -> &JointMixedStrategy {
        &self.stages[stage * self.num_states + state]
    }

    pub fn check_game(&self, game: &MarkovGameSkeleton) -> Result<()> {
        if self.shape != *game.shape() {
            return Err(Error::shape("policy and game have different action shapes"));
        }
        if self.horizon != game.horizon() || self.num_states != game.num_states() {
            return Err(Error::shape(format!(
                "policy covers H={} |S|={}, game has H={} |S|={}",
                self.horizon,
                self.num_states,
                game.horizon(),
                game.num_states()
            )));
        }
        Ok(())
    }
}

/// `V_{i,h}(s)` for `h = 0..=H` and `Q_{i,h}(s, a)` for `h = 0..H`.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueTables {
    num_players: usize,
    horizon: usize,
    num_states: usize,
    num_joint: usize,
    v: Vec<f64>,
    q: Vec<f64>,
}

impl ValueTables {
    pub(crate) fn zeros(num_players: usize, horizon: usize, num_states: usize, num_joint: usize) -> Self {
        ValueTables {
            num_players,
            horizon,
            num_states,
            num_joint,
            v: vec![0.0; num_players * (horizon + 1) * num_states],
            q: vec![0.0; num_players * horizon * num_states * num_joint],
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    #[inline]
    fn v_index(&self, player: usize, stage: usize, state: usize) -> usize {
        (player * (self.horizon + 1) + stage) * self.num_states + state
    }

    #[inline]
    fn q_index(&self, player: usize, stage: usize, state: usize, joint: usize) -> usize {
        ((player * self.horizon + stage) * self.num_states + state) * self.num_joint + joint
    }

    #[inline]
    pub fn v(&self, player: usize, stage: usize, state: usize) -> f64 {
        self.v[self.v_index(player, stage, state)]
    }

    #[inline]
    pub fn q(&self, player: usize, stage: usize, state: usize, joint: usize) -> f64 {
        self.q[self.q_index(player, stage, state, joint)]
    }

    /// `V_{i,h}(·)` as a slice over states.
    pub fn v_stage(&self, player: usize, stage: usize) -> &[f64] {
        let start = self.v_index(player, stage, 0);
        &self.v[start..start + self.num_states]
    }

    pub(crate) fn set_v(&mut self, player: usize, stage: usize, state: usize, value: f64) {
        let k = self.v_index(player, stage, state);
        self.v[k] = value;
    }

    pub(crate) fn set_q(&mut self, player: usize, stage: usize, state: usize, joint: usize, value: f64) {
        let k = self.q_index(player, stage, state, joint);
        self.q[k] = value;
    }

    pub fn max_abs_v(&self) -> f64 {
        self.v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}
