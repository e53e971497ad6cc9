//! LP-free ground truth for designed rewards.
//!
//! Everything here is exact expectation arithmetic over finite tables:
//! backward policy evaluation, forward visitation, single-agent best
//! responses against the opponents' stage marginals, and the strictness
//! gaps of every solution concept.
//!
//! Gap conventions at stage `(h, s)` for player `i`:
//!
//! * NE / CCE: `V_{i,h}(s)` minus the value of deviating to pure action `b`
//!   at this stage and best-responding afterwards. The deviation that
//!   replays the target (the unique action of a point-mass marginal) is
//!   not a deviation and is skipped.
//! * CE: for supported recommendation `j` and played action `k != j`,
//!   `Σ_{a_{-i}} σ_ij(a_{-i}) [Q(j, a_{-i}) − Q(k, a_{-i})]`, using the
//!   conditional `σ_ij` of the stage strategy and continuation values of
//!   the target policy (Markov-perfect stage decomposition). Strategy
//!   modifications are Markov: they see `(h, s, a_i)` only.

use crate::design::{CostKind, CostSpec};
use crate::error::{Error, Result};
use crate::game::{
    Concept, DeviationClass, JointMixedStrategy, MarkovGameSkeleton, MarkovPolicy,
    NormalFormGame, RewardTable, ValueTables,
};

/// Backward induction of `V^π` and `Q^π`; `V_{i,H} = 0`.
pub fn policy_eval(
    game: &MarkovGameSkeleton,
    rewards: &RewardTable,
    policy: &MarkovPolicy,
) -> Result<ValueTables> {
    policy.check_game(game)?;
    game.check_rewards(rewards)?;
    let n = game.num_players();
    let (horizon, ns, na) = (game.horizon(), game.num_states(), game.num_joint());
    let mut vt = ValueTables::zeros(n, horizon, ns, na);
    for i in 0..n {
        for h in (0..horizon).rev() {
            let next = vt.v_stage(i, h + 1).to_vec();
            for s in 0..ns {
                let stage = policy.stage(h, s);
                let mut v = 0.0;
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for a in 0..na {
                    let q = rewards.get(i, h, s, a) + game.expect_next(h, s, a, &next);
                    vt.set_q(i, h, s, a, q);
                    let p = stage.prob(a);
                    v += p * q;
                    if p > 0.0 {
                        lo = lo.min(q);
                        hi = hi.max(q);
                    }
                }
                // a mixture cannot leave the range of its support
                vt.set_v(i, h, s, v.clamp(lo, hi));
            }
        }
    }
    Ok(vt)
}

/// State-action visitation measure `μ_h(s, a)` under a policy.
#[derive(Clone, Debug, PartialEq)]
pub struct Occupancy {
    horizon: usize,
    num_states: usize,
    num_joint: usize,
    mu: Vec<f64>,
}

impl Occupancy {
    #[inline]
    pub fn get(&self, stage: usize, state: usize, joint: usize) -> f64 {
        self.mu[(stage * self.num_states + state) * self.num_joint + joint]
    }

    /// Total mass at stage `h` (1 up to rounding).
    pub fn stage_total(&self, stage: usize) -> f64 {
        let w = self.num_states * self.num_joint;
        self.mu[stage * w..(stage + 1) * w].iter().sum()
    }

    /// State distribution at stage `h`.
    pub fn state_dist(&self, stage: usize) -> Vec<f64> {
        (0..self.num_states)
            .map(|s| (0..self.num_joint).map(|a| self.get(stage, s, a)).sum())
            .collect()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }
}

pub fn visitation(game: &MarkovGameSkeleton, policy: &MarkovPolicy) -> Result<Occupancy> {
    policy.check_game(game)?;
    let (horizon, ns, na) = (game.horizon(), game.num_states(), game.num_joint());
    let mut mu = vec![0.0; horizon * ns * na];
    let mut state_mass = game.initial_dist().to_vec();
    for h in 0..horizon {
        let mut next = vec![0.0; ns];
        for s in 0..ns {
            let stage = policy.stage(h, s);
            for a in 0..na {
                let m = state_mass[s] * stage.prob(a);
                mu[(h * ns + s) * na + a] = m;
                if m != 0.0 && h + 1 < horizon {
                    for (sp, p) in game.transition_row(h, s, a).iter().enumerate() {
                        next[sp] += m * p;
                    }
                }
            }
        }
        state_mass = next;
    }
    Ok(Occupancy {
        horizon,
        num_states: ns,
        num_joint: na,
        mu,
    })
}

/// Optimal single-agent deviation values for one player.
#[derive(Clone, Debug, PartialEq)]
pub struct BestResponse {
    pub player: usize,
    horizon: usize,
    num_states: usize,
    values: Vec<f64>,
    actions: Vec<usize>,
}

impl BestResponse {
    /// `max_{π'_i} V^{π'_i, π_{-i}}_{i,h}(s)`; zero at `h = H`.
    pub fn value(&self, stage: usize, state: usize) -> f64 {
        self.values[stage * self.num_states + state]
    }

    /// A maximizing deterministic action at `(h, s)`.
    pub fn action(&self, stage: usize, state: usize) -> usize {
        self.actions[stage * self.num_states + state]
    }

    pub fn stage_values(&self, stage: usize) -> &[f64] {
        let start = stage * self.num_states;
        &self.values[start..start + self.num_states]
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }
}

/// Actions the deviator may use at a stage under `class`.
fn class_allowed(
    stage: &JointMixedStrategy,
    player: usize,
    class: DeviationClass,
) -> Vec<usize> {
    let na = stage.shape().num_actions(player);
    match class {
        DeviationClass::Unrestricted => (0..na).collect(),
        DeviationClass::NeverTarget | DeviationClass::NeverRecommended => {
            let target = stage.pure_action(player);
            (0..na).filter(|&b| Some(b) != target).collect()
        }
    }
}

/// Expected one-stage value of playing `b` against the opponents' marginal,
/// followed by continuation `cont` over next states.
fn deviation_value(
    game: &MarkovGameSkeleton,
    rewards: &RewardTable,
    player: usize,
    stage_idx: usize,
    state: usize,
    opp_marginal: &[f64],
    b: usize,
    cont: &[f64],
) -> f64 {
    let shape = game.shape();
    let mut total = 0.0;
    for (o, &m) in opp_marginal.iter().enumerate() {
        if m == 0.0 {
            continue;
        }
        let a = shape.join(player, b, o);
        total += m
            * (rewards.get(player, stage_idx, state, a)
                + game.expect_next(stage_idx, state, a, cont));
    }
    total
}

/// Best response of `player` when opponents draw `a_{-i}` from the
/// marginal of `π_h(s)` and the deviator sees no recommendation.
///
/// Deterministic Markov deviations attain the maximum, so a per-stage
/// argmax over allowed pure actions is exact.
pub fn best_response(
    game: &MarkovGameSkeleton,
    rewards: &RewardTable,
    policy: &MarkovPolicy,
    player: usize,
    class: DeviationClass,
) -> Result<BestResponse> {
    policy.check_game(game)?;
    game.check_rewards(rewards)?;
    game.shape().check_player(player)?;
    let (horizon, ns) = (game.horizon(), game.num_states());
    let mut values = vec![0.0; (horizon + 1) * ns];
    let mut actions = vec![0; horizon * ns];
    for h in (0..horizon).rev() {
        let cont = values[(h + 1) * ns..(h + 2) * ns].to_vec();
        for s in 0..ns {
            let stage = policy.stage(h, s);
            let allowed = class_allowed(stage, player, class);
            if allowed.is_empty() {
                return Err(Error::EmptyDeviationSet {
                    player,
                    stage: h,
                    state: s,
                });
            }
            let marg = stage.opponent_marginal(player);
            let mut best = (allowed[0], f64::NEG_INFINITY);
            for &b in &allowed {
                let v = deviation_value(game, rewards, player, h, s, &marg, b, &cont);
                if v > best.1 {
                    best = (b, v);
                }
            }
            values[h * ns + s] = best.1;
            actions[h * ns + s] = best.0;
        }
    }
    Ok(BestResponse {
        player,
        horizon,
        num_states: ns,
        values,
        actions,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Deviation {
    /// Play pure action `action` at this stage (NE / CCE).
    Play { action: usize },
    /// Play `played` whenever `recommended` is recommended (CE).
    Swap { recommended: usize, played: usize },
    /// Stochastic deviations that keep most mass on the target (or on the
    /// recommended action for CE); their gap tends to zero, which only
    /// matters for `ε > 0` under the unrestricted class.
    MixtureTowardTarget,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapEntry {
    pub player: usize,
    pub stage: usize,
    pub state: usize,
    pub deviation: Deviation,
    pub gap: f64,
}

/// Strictness gaps of a policy under a reward.
#[derive(Clone, Debug, PartialEq)]
pub struct GapReport {
    pub concept: Concept,
    pub class: DeviationClass,
    pub epsilon: f64,
    /// `+∞` when no deviation exists at all.
    pub min_gap: f64,
    pub argmin: Option<GapEntry>,
    pub per_constraint: Vec<GapEntry>,
    /// `min_gap > epsilon`.
    pub strict: bool,
}

impl GapReport {
    fn from_entries(
        concept: Concept,
        class: DeviationClass,
        epsilon: f64,
        per_constraint: Vec<GapEntry>,
    ) -> Self {
        let mut argmin: Option<GapEntry> = None;
        for e in &per_constraint {
            if argmin.is_none_or(|m| e.gap < m.gap) {
                argmin = Some(*e);
            }
        }
        let min_gap = argmin.map_or(f64::INFINITY, |e| e.gap);
        GapReport {
            concept,
            class,
            epsilon,
            min_gap,
            argmin,
            per_constraint,
            strict: min_gap > epsilon,
        }
    }

    /// Smallest gap at one `(i, h, s)`.
    pub fn stage_min(&self, player: usize, stage: usize, state: usize) -> f64 {
        self.per_constraint
            .iter()
            .filter(|e| e.player == player && e.stage == stage && e.state == state)
            .fold(f64::INFINITY, |m, e| m.min(e.gap))
    }
}

/// Measure every strictness constraint of `concept` for `policy` in `G[r]`.
pub fn check_strict(
    game: &MarkovGameSkeleton,
    rewards: &RewardTable,
    policy: &MarkovPolicy,
    concept: Concept,
    class: DeviationClass,
    epsilon: f64,
) -> Result<GapReport> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidValue(format!("epsilon {epsilon} must be >= 0")));
    }
    if concept == Concept::Ne && !policy.is_product() {
        return Err(Error::Precondition(
            "strict NE verification requires a product policy".into(),
        ));
    }
    let values = policy_eval(game, rewards, policy)?;
    let n = game.num_players();
    let (horizon, ns) = (game.horizon(), game.num_states());
    let shape = game.shape();
    let mut entries = Vec::new();
    match concept {
        Concept::Ce => {
            for i in 0..n {
                for h in 0..horizon {
                    for s in 0..ns {
                        let conds = policy.stage(h, s).conditionals(i)?;
                        for cj in conds.iter().filter(|c| !c.is_zero()) {
                            for k in 0..shape.num_actions(i) {
                                if k == cj.action {
                                    continue;
                                }
                                let gap: f64 = cj
                                    .dist
                                    .iter()
                                    .enumerate()
                                    .filter(|(_, &p)| p != 0.0)
                                    .map(|(o, &p)| {
                                        p * (values.q(i, h, s, shape.join(i, cj.action, o))
                                            - values.q(i, h, s, shape.join(i, k, o)))
                                    })
                                    .sum();
                                entries.push(GapEntry {
                                    player: i,
                                    stage: h,
                                    state: s,
                                    deviation: Deviation::Swap {
                                        recommended: cj.action,
                                        played: k,
                                    },
                                    gap,
                                });
                            }
                            if epsilon > 0.0
                                && class == DeviationClass::Unrestricted
                                && shape.num_actions(i) > 1
                            {
                                entries.push(GapEntry {
                                    player: i,
                                    stage: h,
                                    state: s,
                                    deviation: Deviation::MixtureTowardTarget,
                                    gap: 0.0,
                                });
                            }
                        }
                    }
                }
            }
        }
        Concept::Ne | Concept::Cce => {
            for i in 0..n {
                let br = best_response(game, rewards, policy, i, class)?;
                for h in 0..horizon {
                    let cont = br.stage_values(h + 1);
                    for s in 0..ns {
                        let stage = policy.stage(h, s);
                        let target = stage.pure_action(i);
                        let marg = stage.opponent_marginal(i);
                        let v = values.v(i, h, s);
                        for b in class_allowed(stage, i, class) {
                            if Some(b) == target {
                                continue;
                            }
                            let d = deviation_value(game, rewards, i, h, s, &marg, b, cont);
                            entries.push(GapEntry {
                                player: i,
                                stage: h,
                                state: s,
                                deviation: Deviation::Play { action: b },
                                gap: v - d,
                            });
                        }
                        if epsilon > 0.0
                            && class == DeviationClass::Unrestricted
                            && target.is_some()
                            && shape.num_actions(i) > 1
                        {
                            entries.push(GapEntry {
                                player: i,
                                stage: h,
                                state: s,
                                deviation: Deviation::MixtureTowardTarget,
                                gap: 0.0,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(GapReport::from_entries(concept, class, epsilon, entries))
}

/// Direct normal-form strictness sums, with no value-iteration machinery.
///
/// Uses the same deviation set as [`check_strict`] with the unrestricted
/// class and `ε = 0`, so the two agree constraint by constraint on the
/// one-stage embedding.
pub fn nfg_oracle(
    game: &NormalFormGame,
    sigma: &JointMixedStrategy,
    concept: Concept,
) -> Result<GapReport> {
    let shape = game.shape();
    if sigma.shape() != shape {
        return Err(Error::shape("strategy and game have different action shapes"));
    }
    if concept == Concept::Ne && !sigma.is_product(crate::game::PROB_TOL) {
        return Err(Error::Precondition(
            "strict NE verification requires a product strategy".into(),
        ));
    }
    let mut entries = Vec::new();
    for i in 0..shape.num_players() {
        let u = game.utilities(i);
        match concept {
            Concept::Ce => {
                for cj in sigma.conditionals(i)?.iter().filter(|c| !c.is_zero()) {
                    for k in (0..shape.num_actions(i)).filter(|&k| k != cj.action) {
                        let mut gap = 0.0;
                        for (o, &p) in cj.dist.iter().enumerate() {
                            gap += p * (u[shape.join(i, cj.action, o)] - u[shape.join(i, k, o)]);
                        }
                        entries.push(GapEntry {
                            player: i,
                            stage: 0,
                            state: 0,
                            deviation: Deviation::Swap {
                                recommended: cj.action,
                                played: k,
                            },
                            gap,
                        });
                    }
                }
            }
            Concept::Ne | Concept::Cce => {
                let target = sigma.pure_action(i);
                for b in (0..shape.num_actions(i)).filter(|&b| Some(b) != target) {
                    let mut gap = 0.0;
                    for (a, &p) in sigma.probs().iter().enumerate() {
                        gap += p * (u[a] - u[shape.with_action(a, i, b)]);
                    }
                    entries.push(GapEntry {
                        player: i,
                        stage: 0,
                        state: 0,
                        deviation: Deviation::Play { action: b },
                        gap,
                    });
                }
            }
        }
    }
    Ok(GapReport::from_entries(
        concept,
        DeviationClass::Unrestricted,
        0.0,
        entries,
    ))
}

/// Values of player `i` when it follows the stochastic Markov policy
/// `deviation[h * |S| + s]` (a distribution over `A_i`) and the opponents
/// draw from the marginals of `π_h(s)`. Returns `V'_{i,h}(s)` in
/// `(h, s)` order including the terminal stage.
pub fn deviation_policy_values(
    game: &MarkovGameSkeleton,
    rewards: &RewardTable,
    policy: &MarkovPolicy,
    player: usize,
    deviation: &[Vec<f64>],
) -> Result<Vec<f64>> {
    policy.check_game(game)?;
    game.check_rewards(rewards)?;
    let (horizon, ns) = (game.horizon(), game.num_states());
    if deviation.len() != horizon * ns {
        return Err(Error::shape("one deviation distribution per (h, s) required"));
    }
    let mut values = vec![0.0; (horizon + 1) * ns];
    for h in (0..horizon).rev() {
        let cont = values[(h + 1) * ns..(h + 2) * ns].to_vec();
        for s in 0..ns {
            let marg = policy.stage(h, s).opponent_marginal(player);
            let dist = &deviation[h * ns + s];
            if dist.len() != game.shape().num_actions(player) {
                return Err(Error::shape("deviation distribution has wrong length"));
            }
            values[h * ns + s] = dist
                .iter()
                .enumerate()
                .filter(|(_, &w)| w != 0.0)
                .map(|(b, &w)| w * deviation_value(game, rewards, player, h, s, &marg, b, &cont))
                .sum();
        }
    }
    Ok(values)
}

/// Values of `φ ∘ π` for player `i`, where `modification[h * |S| + s][j]`
/// is the action played when `j` is recommended at `(h, s)`.
pub fn modification_values(
    game: &MarkovGameSkeleton,
    rewards: &RewardTable,
    policy: &MarkovPolicy,
    player: usize,
    modification: &[Vec<usize>],
) -> Result<Vec<f64>> {
    policy.check_game(game)?;
    game.check_rewards(rewards)?;
    let (horizon, ns, na) = (game.horizon(), game.num_states(), game.num_joint());
    let shape = game.shape();
    if modification.len() != horizon * ns {
        return Err(Error::shape("one strategy modification per (h, s) required"));
    }
    let mut values = vec![0.0; (horizon + 1) * ns];
    for h in (0..horizon).rev() {
        let cont = values[(h + 1) * ns..(h + 2) * ns].to_vec();
        for s in 0..ns {
            let phi = &modification[h * ns + s];
            if phi.len() != shape.num_actions(player)
                || phi.iter().any(|&k| k >= shape.num_actions(player))
            {
                return Err(Error::shape("strategy modification has wrong shape"));
            }
            let stage = policy.stage(h, s);
            let mut v = 0.0;
            for a in 0..na {
                let p = stage.prob(a);
                if p == 0.0 {
                    continue;
                }
                let played = shape.with_action(a, player, phi[shape.action_of(a, player)]);
                v += p * (rewards.get(player, h, s, played) + game.expect_next(h, s, played, &cont));
            }
            values[h * ns + s] = v;
        }
    }
    Ok(values)
}

/// Recompute `C^π(r)` directly from the reward, independent of any LP
/// auxiliaries. Player terms are summed for the L1 costs; welfare costs
/// evaluate `V_{i,0}` under the initial state distribution.
pub fn evaluate_cost(
    game: &MarkovGameSkeleton,
    policy: &MarkovPolicy,
    rewards: &RewardTable,
    cost: &CostSpec,
) -> Result<f64> {
    game.check_rewards(rewards)?;
    policy.check_game(game)?;
    let n = game.num_players();
    let (horizon, ns, na) = (game.horizon(), game.num_states(), game.num_joint());
    match cost.kind {
        CostKind::Online | CostKind::Offline => {
            let baseline = cost.baseline_for(game)?;
            let occ = if cost.kind == CostKind::Online {
                Some(visitation(game, policy)?)
            } else {
                None
            };
            let mut total = 0.0;
            for i in 0..n {
                for h in 0..horizon {
                    for s in 0..ns {
                        for a in 0..na {
                            let w = occ.as_ref().map_or(1.0, |o| o.get(h, s, a));
                            total += w * (rewards.get(i, h, s, a) - baseline.get(i, h, s, a)).abs();
                        }
                    }
                }
            }
            Ok(total)
        }
        CostKind::SocialWelfare | CostKind::Egalitarian => {
            let vt = policy_eval(game, rewards, policy)?;
            let welfare: Vec<f64> = (0..n)
                .map(|i| {
                    game.initial_dist()
                        .iter()
                        .enumerate()
                        .map(|(s, d)| d * vt.v(i, 0, s))
                        .sum()
                })
                .collect();
            Ok(if cost.kind == CostKind::SocialWelfare {
                -welfare.iter().sum::<f64>()
            } else {
                -welfare.iter().cloned().fold(f64::INFINITY, f64::min)
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::ActionShape;

    fn shape(sizes: &[usize]) -> ActionShape {
        ActionShape::new(sizes.to_vec()).unwrap()
    }

    fn sigma_corr() -> JointMixedStrategy {
        JointMixedStrategy::new(shape(&[2, 2]), vec![0.5, 0.0, 0.0, 0.5]).unwrap()
    }

    /// Witness utility of `sigma_corr`: identity payoffs.
    fn corr_witness() -> RewardTable {
        RewardTable::from_flat(2, 1, 1, 4, vec![1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn zero_rewards_give_zero_values() {
        let g = MarkovGameSkeleton::new(shape(&[2, 2]), 1, 3, vec![1.0; 12], vec![1.0]).unwrap();
        let pol = MarkovPolicy::stationary(3, 1, sigma_corr()).unwrap();
        let vt = policy_eval(&g, &g.empty_rewards(), &pol).unwrap();
        assert_eq!(vt.max_abs_v(), 0.0);
    }

    #[test]
    fn one_stage_value_is_expected_reward() {
        let g = MarkovGameSkeleton::single_stage(shape(&[2, 2]));
        let pol = MarkovPolicy::from_strategy(sigma_corr());
        let mut r = corr_witness();
        r.set(0, 0, 0, 0, 0.25);
        let vt = policy_eval(&g, &r, &pol).unwrap();
        assert!((vt.v(0, 0, 0) - (0.5 * 0.25 + 0.5 * 1.0)).abs() < 1e-15);
        assert_eq!(vt.v(0, 1, 0), 0.0);
    }

    #[test]
    fn best_response_on_corr_witness() {
        let g = MarkovGameSkeleton::single_stage(shape(&[2, 2]));
        let pol = MarkovPolicy::from_strategy(sigma_corr());
        let r = corr_witness();
        let vt = policy_eval(&g, &r, &pol).unwrap();
        assert_eq!(vt.v(0, 0, 0), 1.0);
        let br = best_response(&g, &r, &pol, 0, DeviationClass::Unrestricted).unwrap();
        assert_eq!(br.value(0, 0), 0.5);

        let ce = check_strict(&g, &r, &pol, Concept::Ce, DeviationClass::Unrestricted, 0.0).unwrap();
        assert_eq!(ce.min_gap, 1.0);
        let cce =
            check_strict(&g, &r, &pol, Concept::Cce, DeviationClass::Unrestricted, 0.0).unwrap();
        assert_eq!(cce.min_gap, 0.5);
        assert!(cce.strict);
    }

    #[test]
    fn weak_equilibrium_has_zero_gap() {
        // reward 1 on (0,0) for player 0 only when player 1 plays 0; player 1
        // indifferent
        let sh = shape(&[2, 2]);
        let g = MarkovGameSkeleton::single_stage(sh.clone());
        let pol = MarkovPolicy::from_strategy(JointMixedStrategy::pure(sh, &[0, 0]).unwrap());
        let mut r = g.empty_rewards();
        r.set(0, 0, 0, 0, 1.0);
        let rep = check_strict(&g, &r, &pol, Concept::Ne, DeviationClass::Unrestricted, 0.0).unwrap();
        assert_eq!(rep.min_gap, 0.0);
        assert!(!rep.strict);
        let argmin = rep.argmin.unwrap();
        assert_eq!(argmin.player, 1);
        let br = best_response(&g, &r, &pol, 0, DeviationClass::Unrestricted).unwrap();
        assert_eq!(br.action(0, 0), 0);
        assert_eq!(br.value(0, 0), 1.0);
    }

    #[test]
    fn constant_utilities_give_zero_gaps() {
        let sh = shape(&[2, 3]);
        let u = NormalFormGame::new(sh.clone(), vec![vec![0.7; 6], vec![-2.0; 6]]).unwrap();
        let s = JointMixedStrategy::new(sh, vec![0.1, 0.2, 0.1, 0.3, 0.2, 0.1]).unwrap();
        for c in [Concept::Ce, Concept::Cce] {
            let rep = nfg_oracle(&u, &s, c).unwrap();
            assert!(rep.per_constraint.iter().all(|e| e.gap.abs() < 1e-15));
        }
    }

    #[test]
    fn empty_class_is_an_error() {
        let sh = shape(&[1, 2]);
        let g = MarkovGameSkeleton::single_stage(sh.clone());
        let pol = MarkovPolicy::from_strategy(JointMixedStrategy::pure(sh, &[0, 0]).unwrap());
        let r = g.empty_rewards();
        assert!(matches!(
            best_response(&g, &r, &pol, 0, DeviationClass::NeverTarget),
            Err(Error::EmptyDeviationSet { player: 0, .. })
        ));
        // unrestricted: the single-action player simply has no deviations
        let rep = check_strict(&g, &r, &pol, Concept::Ne, DeviationClass::Unrestricted, 0.0).unwrap();
        assert!(rep.per_constraint.iter().all(|e| e.player == 1));
    }

    #[test]
    fn visitation_on_deterministic_chain() {
        // two states, s0 -> s1 always
        let sh = shape(&[1]);
        let trans = vec![0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0];
        let g = MarkovGameSkeleton::new(sh.clone(), 2, 2, trans, vec![1.0, 0.0]).unwrap();
        let pol = MarkovPolicy::stationary(2, 2, JointMixedStrategy::pure(sh, &[0]).unwrap()).unwrap();
        let occ = visitation(&g, &pol).unwrap();
        assert_eq!(occ.get(0, 0, 0), 1.0);
        assert_eq!(occ.get(1, 1, 0), 1.0);
        assert_eq!(occ.get(1, 0, 0), 0.0);
    }

    #[test]
    fn mixture_entry_only_for_positive_epsilon() {
        let sh = shape(&[2, 2]);
        let g = MarkovGameSkeleton::single_stage(sh.clone());
        let pol = MarkovPolicy::from_strategy(JointMixedStrategy::pure(sh, &[0, 0]).unwrap());
        let mut r = g.empty_rewards();
        for i in 0..2 {
            for a in 0..4 {
                r.set(i, 0, 0, a, if a == 0 { 1.0 } else { -1.0 });
            }
        }
        let strict = check_strict(&g, &r, &pol, Concept::Ne, DeviationClass::Unrestricted, 0.0).unwrap();
        assert_eq!(strict.min_gap, 2.0);
        let eps = check_strict(&g, &r, &pol, Concept::Ne, DeviationClass::Unrestricted, 0.5).unwrap();
        assert_eq!(eps.min_gap, 0.0);
        assert!(!eps.strict);
        let restricted =
            check_strict(&g, &r, &pol, Concept::Ne, DeviationClass::NeverTarget, 0.5).unwrap();
        assert_eq!(restricted.min_gap, 2.0);
        assert!(restricted.strict);
    }
}
