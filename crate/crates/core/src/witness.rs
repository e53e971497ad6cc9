//! Explicit rewards certifying installability.
//!
//! The normal-form witness gives player `i` the utility
//! `u_i(j, a_{-i}) = σ_ij(a_{-i}) / ‖σ_ij‖₂` for supported `j` and zero
//! otherwise, so every supported row is a unit vector pointing at its own
//! conditional. Its CE and CCE gaps are the cosine gaps collected by
//! [`gamma_ce`] and [`gamma_cce`].

use crate::error::{Error, Result};
use crate::game::{
    cosine_gap, Concept, Conditional, DeviationClass, JointMixedStrategy, MarkovGameSkeleton,
    MarkovPolicy, NormalFormGame, RewardFunction, RewardTable,
};
use crate::installability::{check_markov, check_sce, check_scce, check_sne};

fn all_conditionals(sigma: &JointMixedStrategy) -> Vec<Vec<Conditional>> {
    (0..sigma.shape().num_players())
        .map(|i| sigma.conditionals(i).expect("player index in range"))
        .collect()
}

fn witness_rows(sigma: &JointMixedStrategy, normalize: bool) -> NormalFormGame {
    let shape = sigma.shape().clone();
    let mut u = NormalFormGame::zeros(shape.clone());
    for (i, conds) in all_conditionals(sigma).into_iter().enumerate() {
        for c in conds.iter().filter(|c| !c.is_zero()) {
            let scale = if normalize { 1.0 / c.norm() } else { 1.0 };
            for (o, &p) in c.dist.iter().enumerate() {
                u.set(i, shape.join(i, c.action, o), p * scale);
            }
        }
    }
    u
}

/// Normalized-conditional witness utility; entries lie in `[0, 1]`.
pub fn witness_utility(sigma: &JointMixedStrategy) -> NormalFormGame {
    witness_rows(sigma, true)
}

/// A dominance gap together with whether the strategy is installable at all.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gamma {
    /// `0` when not installable; `+∞` when no player has a deviation.
    pub value: f64,
    pub installable: bool,
}

/// `min_{i, supported j, k ≠ j} ‖σ_ij‖₂ (1 − cos θ_ijk)`.
pub fn gamma_ce(sigma: &JointMixedStrategy) -> Gamma {
    if !check_sce(sigma).is_installable() {
        return Gamma {
            value: 0.0,
            installable: false,
        };
    }
    let mut value = f64::INFINITY;
    for conds in all_conditionals(sigma) {
        for cj in conds.iter().filter(|c| !c.is_zero()) {
            for ck in conds.iter().filter(|c| c.action != cj.action) {
                value = value.min(cosine_gap(cj, ck).expect("supported conditional"));
            }
        }
    }
    Gamma {
        value,
        installable: true,
    }
}

/// Per-deviation CCE gap of the witness, optionally weighted by `p_iℓ`.
/// A deviation that replays a point-mass marginal is skipped.
fn cce_gap_min(sigma: &JointMixedStrategy, weighted: bool) -> f64 {
    let mut value = f64::INFINITY;
    for (i, conds) in all_conditionals(sigma).into_iter().enumerate() {
        let target = sigma.pure_action(i);
        for cm in conds.iter().filter(|c| Some(c.action) != target) {
            let mut total = 0.0;
            for cl in conds.iter().filter(|c| !c.is_zero()) {
                let w = if weighted { cl.mass } else { 1.0 };
                total += w * cosine_gap(cl, cm).expect("supported conditional");
            }
            value = value.min(total);
        }
    }
    value
}

/// `min_{i, m} Σ_ℓ p_iℓ ‖σ_iℓ‖₂ (1 − cos θ_iℓm)`: the exact minimum CCE
/// gap of [`witness_utility`].
pub fn gamma_cce(sigma: &JointMixedStrategy) -> Gamma {
    if !check_scce(sigma).is_installable() {
        return Gamma {
            value: 0.0,
            installable: false,
        };
    }
    Gamma {
        value: cce_gap_min(sigma, true),
        installable: true,
    }
}

/// The same minimum without the `p_iℓ` weights. Diagnostic only; the
/// witness does not achieve it in general.
pub fn gamma_cce_unweighted(sigma: &JointMixedStrategy) -> Gamma {
    if !check_scce(sigma).is_installable() {
        return Gamma {
            value: 0.0,
            installable: false,
        };
    }
    Gamma {
        value: cce_gap_min(sigma, false),
        installable: true,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsilonConfig {
    pub epsilon: f64,
    pub bound: f64,
    pub deviation_class: DeviationClass,
}

impl EpsilonConfig {
    pub fn new(epsilon: f64, bound: f64, deviation_class: DeviationClass) -> Result<Self> {
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(Error::InvalidValue(format!("epsilon {epsilon} must be finite and >= 0")));
        }
        if !bound.is_finite() || bound <= 0.0 {
            return Err(Error::InvalidValue(format!("bound {bound} must be finite and > 0")));
        }
        Ok(EpsilonConfig {
            epsilon,
            bound,
            deviation_class,
        })
    }

    fn validate(&self) -> Result<()> {
        EpsilonConfig::new(self.epsilon, self.bound, self.deviation_class).map(|_| ())
    }
}

/// Largest gap `epsilon_witness` can guarantee for `sigma` within `bound`.
///
/// For sNE the supremum `2B` is not attained; every `ε < 2B` is.
pub fn max_installable_gap(sigma: &JointMixedStrategy, bound: f64, concept: Concept) -> Result<f64> {
    Ok(match concept {
        Concept::Ne => {
            if check_sne(sigma)?.is_installable() {
                2.0 * bound
            } else {
                0.0
            }
        }
        Concept::Ce => bound * gamma_ce(sigma).value,
        Concept::Cce => bound * gamma_cce(sigma).value,
    })
}

/// A utility whose measured gap under `cfg.deviation_class` is at least
/// `cfg.epsilon`, with every entry in `[−B, B]`.
///
/// sNE: `B` on the target profile and `−B` elsewhere. sCE / sCCE: the
/// witness utility scaled by `ε / γ` (by `B` when `ε = 0`).
pub fn epsilon_witness(
    sigma: &JointMixedStrategy,
    cfg: &EpsilonConfig,
    concept: Concept,
) -> Result<NormalFormGame> {
    cfg.validate()?;
    let (eps, bound) = (cfg.epsilon, cfg.bound);
    let positive = eps > 0.0;
    let shape = sigma.shape();
    match concept {
        Concept::Ne => {
            let report = check_sne(sigma)?;
            if !report.is_installable() {
                return Err(Error::Precondition(
                    "strict NE needs every player to play one action with probability one".into(),
                ));
            }
            if positive && cfg.deviation_class == DeviationClass::Unrestricted {
                return Err(Error::Precondition(
                    "an ε-strict NE cannot hold against deviations that keep mass on the target; \
                     use the never-target class"
                        .into(),
                ));
            }
            if eps >= 2.0 * bound {
                return Err(Error::EpsilonTooLarge {
                    epsilon: eps,
                    max_gap: 2.0 * bound,
                });
            }
            let acts: Vec<usize> = (0..shape.num_players())
                .map(|i| sigma.pure_action(i).expect("installable target is pure"))
                .collect();
            let target = shape.encode(&acts)?;
            let mut u = NormalFormGame::zeros(shape.clone());
            for i in 0..shape.num_players() {
                for a in 0..shape.num_joint() {
                    u.set(i, a, if a == target { bound } else { -bound });
                }
            }
            Ok(u)
        }
        Concept::Ce | Concept::Cce => {
            let gamma = if concept == Concept::Ce {
                gamma_ce(sigma)
            } else {
                gamma_cce(sigma)
            };
            if !gamma.installable {
                return Err(Error::Precondition(format!(
                    "strategy is not {concept}-installable"
                )));
            }
            if positive {
                match (concept, cfg.deviation_class) {
                    (Concept::Ce, DeviationClass::NeverRecommended) => {}
                    (Concept::Ce, _) => {
                        return Err(Error::Precondition(
                            "an ε-strict CE needs the never-recommended deviation class".into(),
                        ))
                    }
                    (_, DeviationClass::Unrestricted) => {
                        if let Some(i) =
                            (0..shape.num_players()).find(|&i| sigma.pure_action(i).is_some())
                        {
                            return Err(Error::Precondition(format!(
                                "player {i} has a single supported action; an ε-strict CCE \
                                 against unrestricted deviations needs at least two"
                            )));
                        }
                    }
                    _ => {}
                }
            }
            let max_gap = bound * gamma.value;
            if eps > max_gap {
                return Err(Error::EpsilonTooLarge {
                    epsilon: eps,
                    max_gap,
                });
            }
            let alpha = if positive && gamma.value.is_finite() {
                eps / gamma.value
            } else {
                bound
            };
            Ok(witness_utility(sigma).scaled(alpha.min(bound)))
        }
    }
}

/// Which per-stage rows [`markov_witness_with_rows`] uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum StageRows {
    /// `σ_ij / ‖σ_ij‖₂`; stage gaps are `B/2` times the normal-form witness gaps.
    #[default]
    Normalized,
    /// The raw conditional `σ_ij`. Satisfies the same bounds but a stage gap
    /// can vanish or turn negative.
    Conditional,
}

fn first_failing_stage(
    policy: &MarkovPolicy,
    game: &MarkovGameSkeleton,
    concept: Concept,
) -> Result<()> {
    let report = check_markov(policy, game, concept)?;
    if let Some(st) = report.stages.iter().find(|r| !r.report.is_installable()) {
        return Err(Error::StageNotInstallable {
            concept,
            stage: st.stage,
            state: st.state,
            reason: st.report.note().to_string(),
        });
    }
    Ok(())
}

/// Backward induction: `r_h(s, a) = u^{hs}(a) − Σ_{s'} P_h(s'|s,a) V_{h+1}(s')`,
/// so `Q_h = u^{hs}` and `V_h(s) = E_{π_h(s)} u^{hs}`.
/// `u − c`, nudged by an ulp where needed so that `r + c` evaluates back to
/// exactly `u`.
fn reconstructing_difference(u: f64, c: f64) -> f64 {
    let r = u - c;
    if r + c == u {
        return r;
    }
    [r.next_up(), r.next_down()]
        .into_iter()
        .find(|&x| x + c == u)
        .unwrap_or(r)
}

fn backward_rewards<F>(
    policy: &MarkovPolicy,
    game: &MarkovGameSkeleton,
    mut stage_utility: F,
) -> Result<RewardTable>
where
    F: FnMut(usize, usize, &JointMixedStrategy) -> Result<NormalFormGame>,
{
    policy.check_game(game)?;
    let n = game.num_players();
    let (horizon, ns, na) = (game.horizon(), game.num_states(), game.num_joint());
    let mut r = game.empty_rewards();
    let mut next_v = vec![vec![0.0; ns]; n];
    for h in (0..horizon).rev() {
        let mut cur_v = vec![vec![0.0; ns]; n];
        for s in 0..ns {
            let stage = policy.stage(h, s);
            let u = stage_utility(h, s, stage)?;
            for i in 0..n {
                let mut v = 0.0;
                for a in 0..na {
                    let ua = u.utility(i, a);
                    let cont = game.expect_next(h, s, a, &next_v[i]);
                    r.set(i, h, s, a, reconstructing_difference(ua, cont));
                    v += stage.prob(a) * ua;
                }
                cur_v[i][s] = v;
            }
        }
        next_v = cur_v;
    }
    Ok(r)
}

/// Markov witness with normalized stage rows scaled by `B/2`.
///
/// Guarantees `|r| ≤ B`, `|V| ≤ B/2` and a positive stage gap at every
/// `(i, h, s)` when every stage passes the installability check.
pub fn markov_witness(
    policy: &MarkovPolicy,
    game: &MarkovGameSkeleton,
    bound: f64,
    concept: Concept,
) -> Result<RewardFunction> {
    markov_witness_with_rows(policy, game, bound, concept, StageRows::Normalized)
}

pub fn markov_witness_with_rows(
    policy: &MarkovPolicy,
    game: &MarkovGameSkeleton,
    bound: f64,
    concept: Concept,
    rows: StageRows,
) -> Result<RewardFunction> {
    if !bound.is_finite() || bound <= 0.0 {
        return Err(Error::InvalidValue(format!("bound {bound} must be finite and > 0")));
    }
    first_failing_stage(policy, game, concept)?;
    let normalize = rows == StageRows::Normalized;
    let r = backward_rewards(policy, game, |_, _, stage| {
        Ok(witness_rows(stage, normalize).scaled(bound / 2.0))
    })?;
    RewardFunction::new(r, bound)
}

/// Markov reward whose stage gaps are all at least `ε`: each stage uses
/// [`epsilon_witness`] with bound `B/H`, so `ε` may not exceed the
/// normal-form maximum divided by `H`.
pub fn markov_epsilon_witness(
    policy: &MarkovPolicy,
    game: &MarkovGameSkeleton,
    cfg: &EpsilonConfig,
    concept: Concept,
) -> Result<RewardFunction> {
    cfg.validate()?;
    first_failing_stage(policy, game, concept)?;
    let stage_cfg = EpsilonConfig {
        bound: cfg.bound / game.horizon() as f64,
        ..*cfg
    };
    let r = backward_rewards(policy, game, |h, s, stage| {
        epsilon_witness(stage, &stage_cfg, concept).map_err(|e| match e {
            Error::EpsilonTooLarge { epsilon, max_gap } => Error::StageNotInstallable {
                concept,
                stage: h,
                state: s,
                reason: format!(
                    "ε = {epsilon} exceeds the per-stage maximum {max_gap} (bound B/H)"
                ),
            },
            other => other,
        })
    })?;
    // Stage utilities lie in [−B/H, B/H]; continuation values do too, so
    // |r| ≤ 2B/H ≤ B for H ≥ 2 and |r| ≤ B for H = 1.
    RewardFunction::new(r, cfg.bound)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::ActionShape;
    use crate::verify::{check_strict, nfg_oracle, policy_eval};

    fn shape(sizes: &[usize]) -> ActionShape {
        ActionShape::new(sizes.to_vec()).unwrap()
    }

    fn sigma_corr() -> JointMixedStrategy {
        JointMixedStrategy::new(shape(&[2, 2]), vec![0.5, 0.0, 0.0, 0.5]).unwrap()
    }

    fn sigma_ex() -> JointMixedStrategy {
        JointMixedStrategy::new(shape(&[3, 2]), vec![0.2, 0.2, 0.2, 0.2, 0.2, 0.0]).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn witness_utility_examples() {
        let u = witness_utility(&sigma_corr());
        assert_eq!(u.utilities(0), &[1.0, 0.0, 0.0, 1.0]);
        assert_eq!(u.utilities(1), &[1.0, 0.0, 0.0, 1.0]);

        let u = witness_utility(&JointMixedStrategy::uniform(shape(&[2, 2])));
        let r = 1.0 / 2f64.sqrt();
        for i in 0..2 {
            assert!(u.utilities(i).iter().all(|&x| close(x, r)));
        }

        let u = witness_utility(&JointMixedStrategy::pure(shape(&[2, 2]), &[0, 0]).unwrap());
        assert_eq!(u.utilities(0), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_ce(&sigma_corr()).value, 1.0);
        assert_eq!(gamma_cce(&sigma_corr()).value, 0.5);
        let uni = JointMixedStrategy::uniform(shape(&[2, 2]));
        assert_eq!(gamma_ce(&uni), Gamma { value: 0.0, installable: false });
        assert_eq!(gamma_cce(&uni), Gamma { value: 0.0, installable: false });

        let pure = JointMixedStrategy::pure(shape(&[2, 2]), &[0, 0]).unwrap();
        assert_eq!(gamma_cce(&pure).value, 1.0);

        // player 0 conditionals (1,0) and (0.5,0.5); mass (0.25, 0.5) keeps the
        // second player's conditionals distinct as well
        let s = JointMixedStrategy::new(shape(&[2, 2]), vec![0.5, 0.0, 0.25, 0.25]).unwrap();
        let c = s.conditionals(0).unwrap();
        assert_eq!(c[0].dist, vec![1.0, 0.0]);
        assert_eq!(c[1].dist, vec![0.5, 0.5]);
        let g = gamma_ce(&s).value;
        // player 0 pair (0 -> 1) gives 1 − 1/√2; check it is the minimum
        let pair = 1.0 - 1.0 / 2f64.sqrt();
        assert!(g <= pair + 1e-15);
        let direct = cosine_gap(&c[0], &c[1]).unwrap();
        assert!(close(direct, pair));
    }

    #[test]
    fn witness_gaps_match_gammas() {
        for sigma in [sigma_corr(), sigma_ex()] {
            let u = witness_utility(&sigma);
            if check_sce(&sigma).is_installable() {
                let rep = nfg_oracle(&u, &sigma, Concept::Ce).unwrap();
                assert!((rep.min_gap - gamma_ce(&sigma).value).abs() < 1e-9);
            }
            let rep = nfg_oracle(&u, &sigma, Concept::Cce).unwrap();
            assert!((rep.min_gap - gamma_cce(&sigma).value).abs() < 1e-9);
            assert!(rep.min_gap > 0.0);
        }
    }

    #[test]
    fn sigma_ex_has_zero_ce_gap_on_coinciding_pair() {
        let u = witness_utility(&sigma_ex());
        let rep = nfg_oracle(&u, &sigma_ex(), Concept::Ce).unwrap();
        let e = rep
            .per_constraint
            .iter()
            .find(|e| {
                e.player == 0
                    && e.deviation
                        == crate::verify::Deviation::Swap {
                            recommended: 0,
                            played: 1,
                        }
            })
            .unwrap();
        assert!(e.gap <= 1e-12);
    }

    #[test]
    fn epsilon_witness_examples() {
        let sh = shape(&[2, 2]);
        let pure = JointMixedStrategy::pure(sh.clone(), &[0, 0]).unwrap();
        let cfg = EpsilonConfig::new(1.5, 1.0, DeviationClass::NeverTarget).unwrap();
        let u = epsilon_witness(&pure, &cfg, Concept::Ne).unwrap();
        assert_eq!(u.utilities(0), &[1.0, -1.0, -1.0, -1.0]);
        let g = MarkovGameSkeleton::single_stage(sh.clone());
        let pol = MarkovPolicy::from_strategy(pure.clone());
        let rep = check_strict(&g, &u.to_reward_table(), &pol, Concept::Ne, DeviationClass::NeverTarget, 1.5)
            .unwrap();
        assert_eq!(rep.min_gap, 2.0);
        assert!(rep.strict);

        let unrestricted = EpsilonConfig::new(1.5, 1.0, DeviationClass::Unrestricted).unwrap();
        assert!(matches!(
            epsilon_witness(&pure, &unrestricted, Concept::Ne),
            Err(Error::Precondition(_))
        ));
        let too_big = EpsilonConfig::new(2.0, 1.0, DeviationClass::NeverTarget).unwrap();
        assert!(matches!(
            epsilon_witness(&pure, &too_big, Concept::Ne),
            Err(Error::EpsilonTooLarge { max_gap, .. }) if max_gap == 2.0
        ));

        let cfg = EpsilonConfig::new(1.0, 2.0, DeviationClass::Unrestricted).unwrap();
        let u = epsilon_witness(&sigma_corr(), &cfg, Concept::Cce).unwrap();
        assert_eq!(u.utilities(0), &[2.0, 0.0, 0.0, 2.0]);
        let rep = nfg_oracle(&u, &sigma_corr(), Concept::Cce).unwrap();
        assert_eq!(rep.min_gap, 1.0);

        let cfg = EpsilonConfig::new(0.75, 1.0, DeviationClass::Unrestricted).unwrap();
        assert_eq!(
            epsilon_witness(&sigma_corr(), &cfg, Concept::Cce),
            Err(Error::EpsilonTooLarge {
                epsilon: 0.75,
                max_gap: 0.5
            })
        );
    }

    #[test]
    fn epsilon_class_requirements() {
        let cfg = EpsilonConfig::new(0.5, 1.0, DeviationClass::Unrestricted).unwrap();
        assert!(matches!(
            epsilon_witness(&sigma_corr(), &cfg, Concept::Ce),
            Err(Error::Precondition(_))
        ));
        let pure = JointMixedStrategy::pure(shape(&[2, 2]), &[1, 0]).unwrap();
        assert!(matches!(
            epsilon_witness(&pure, &cfg, Concept::Cce),
            Err(Error::Precondition(_))
        ));
        let nt = EpsilonConfig::new(0.5, 1.0, DeviationClass::NeverTarget).unwrap();
        let u = epsilon_witness(&pure, &nt, Concept::Cce).unwrap();
        assert!(u.max_abs() <= 1.0);
        assert!(EpsilonConfig::new(-0.1, 1.0, DeviationClass::Unrestricted).is_err());
        assert!(EpsilonConfig::new(0.1, 0.0, DeviationClass::Unrestricted).is_err());
    }

    fn corr_chain(horizon: usize) -> (MarkovGameSkeleton, MarkovPolicy) {
        let sh = shape(&[2, 2]);
        let g = MarkovGameSkeleton::new(sh, 1, horizon, vec![1.0; 4 * horizon], vec![1.0]).unwrap();
        let pol = MarkovPolicy::stationary(horizon, 1, sigma_corr()).unwrap();
        (g, pol)
    }

    #[test]
    fn markov_witness_two_stage_example() {
        let (g, pol) = corr_chain(2);
        for rows in [StageRows::Normalized, StageRows::Conditional] {
            let r = markov_witness_with_rows(&pol, &g, 1.0, Concept::Ce, rows).unwrap();
            assert_eq!(r.get(0, 1, 0, 0), 0.5);
            assert_eq!(r.get(0, 1, 0, 1), 0.0);
            assert_eq!(r.get(0, 0, 0, 0), 0.0);
            assert_eq!(r.get(0, 0, 0, 1), -0.5);
            let vt = policy_eval(&g, r.table(), &pol).unwrap();
            assert_eq!(vt.v(0, 1, 0), 0.5);
            assert_eq!(vt.v(0, 0, 0), 0.5);
        }
    }

    #[test]
    fn markov_witness_one_stage_is_half_bound_conditional() {
        let s = JointMixedStrategy::new(shape(&[2, 2]), vec![0.3, 0.2, 0.1, 0.4]).unwrap();
        let g = MarkovGameSkeleton::single_stage(shape(&[2, 2]));
        let pol = MarkovPolicy::from_strategy(s.clone());
        let r = markov_witness_with_rows(&pol, &g, 2.0, Concept::Cce, StageRows::Conditional).unwrap();
        let c = s.conditionals(0).unwrap();
        for j in 0..2 {
            for o in 0..2 {
                assert!(close(r.get(0, 0, 0, s.shape().join(0, j, o)), c[j].dist[o]));
            }
        }
    }

    #[test]
    fn raw_conditional_rows_can_lose_ce_strictness() {
        // player 0: σ_00 = (0.6, 0.4), σ_01 = (0.9, 0.1)
        let sh = shape(&[2, 2]);
        let s = JointMixedStrategy::new(sh.clone(), vec![0.3, 0.2, 0.45, 0.05]).unwrap();
        assert!(check_sce(&s).is_installable());
        let g = MarkovGameSkeleton::single_stage(sh);
        let pol = MarkovPolicy::from_strategy(s);
        let raw = markov_witness_with_rows(&pol, &g, 1.0, Concept::Ce, StageRows::Conditional).unwrap();
        let rep = check_strict(&g, raw.table(), &pol, Concept::Ce, DeviationClass::Unrestricted, 0.0)
            .unwrap();
        assert!(rep.min_gap < 0.0);
        let norm = markov_witness(&pol, &g, 1.0, Concept::Ce).unwrap();
        let rep = check_strict(&g, norm.table(), &pol, Concept::Ce, DeviationClass::Unrestricted, 0.0)
            .unwrap();
        assert!(rep.min_gap > 0.0);
    }

    #[test]
    fn markov_witness_rejects_failing_stage() {
        let sh = shape(&[2, 2]);
        let g = MarkovGameSkeleton::new(sh.clone(), 1, 2, vec![1.0; 8], vec![1.0]).unwrap();
        let pol = MarkovPolicy::new(
            2,
            1,
            vec![sigma_corr(), JointMixedStrategy::uniform(sh)],
            false,
        )
        .unwrap();
        assert!(matches!(
            markov_witness(&pol, &g, 1.0, Concept::Cce),
            Err(Error::StageNotInstallable { stage: 1, state: 0, .. })
        ));
    }

    #[test]
    fn markov_epsilon_witness_gap() {
        let (g, pol) = corr_chain(2);
        let cfg = EpsilonConfig::new(0.25, 1.0, DeviationClass::Unrestricted).unwrap();
        let r = markov_epsilon_witness(&pol, &g, &cfg, Concept::Cce).unwrap();
        assert!(r.table().max_abs() <= 1.0);
        let rep = check_strict(&g, r.table(), &pol, Concept::Cce, DeviationClass::Unrestricted, 0.25)
            .unwrap();
        assert!(rep.min_gap >= 0.25 - 1e-9);

        let cfg = EpsilonConfig::new(0.3, 1.0, DeviationClass::Unrestricted).unwrap();
        assert!(matches!(
            markov_epsilon_witness(&pol, &g, &cfg, Concept::Cce),
            Err(Error::StageNotInstallable { .. })
        ));
    }
}
