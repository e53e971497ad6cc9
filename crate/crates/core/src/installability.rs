//! Decide whether a target behavior can be installed as a strict
//! equilibrium by choosing utilities alone.
//!
//! * sNE: every player must play a single action with probability one.
//! * sCE: no player may have two supported actions with equal conditionals.
//! * sCCE: every player either has a single supported action or at least
//!   one pair of supported actions with different conditionals.
//!
//! Conditionals are compared in L∞ with tolerance [`COND_TOL`]. The sCCE
//! negative verdict rests on the necessity argument (all supported
//! conditionals equal gives contradictory strictness demands); the LP
//! cross-checks in the test suite confirm it.

use crate::error::{Error, Result};
use crate::game::{
    Concept, Conditional, JointMixedStrategy, MarkovGameSkeleton, MarkovPolicy, COND_TOL,
    PROB_TOL,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Installable,
    NotInstallable,
}

/// Why a single player passes the sCCE test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlayerWitness {
    SingleSupport { action: usize },
    DistinguishingPair { j: usize, k: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// sNE success: the unit-mass action of every player.
    PureProfile(Vec<usize>),
    /// sCE success: all supported pairs were compared and differ.
    DistinctConditionals,
    /// sCCE success, one entry per player.
    PlayerWitnesses(Vec<PlayerWitness>),
    /// sNE failure.
    NoUnitMassAction { player: usize },
    /// sCE / sCCE failure: supported actions `j != k` with equal conditionals.
    CoincidingConditionals { player: usize, j: usize, k: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstallabilityReport {
    pub concept: Concept,
    pub verdict: Verdict,
    pub certificate: Certificate,
}

impl InstallabilityReport {
    pub fn is_installable(&self) -> bool {
        self.verdict == Verdict::Installable
    }

    /// Human-readable qualifier for the verdict.
    pub fn note(&self) -> &'static str {
        match (self.concept, self.verdict) {
            (Concept::Cce, Verdict::NotInstallable) => {
                "not installable per necessity argument (all supported conditionals coincide)"
            }
            (_, Verdict::NotInstallable) => "not installable",
            (_, Verdict::Installable) => "installable",
        }
    }

    /// Re-check the certificate against `sigma`; a valid report always passes.
    pub fn certificate_holds(&self, sigma: &JointMixedStrategy) -> bool {
        let n = sigma.shape().num_players();
        match &self.certificate {
            Certificate::PureProfile(actions) => {
                actions.len() == n
                    && actions
                        .iter()
                        .enumerate()
                        .all(|(i, &a)| sigma.pure_action(i) == Some(a))
            }
            Certificate::DistinctConditionals => check_sce(sigma).is_installable(),
            Certificate::PlayerWitnesses(ws) => {
                ws.len() == n
                    && ws.iter().enumerate().all(|(i, w)| {
                        let conds = sigma.conditionals(i).expect("valid player");
                        match *w {
                            PlayerWitness::SingleSupport { action } => {
                                sigma.pure_action(i) == Some(action)
                            }
                            PlayerWitness::DistinguishingPair { j, k } => {
                                j != k
                                    && !conds[j].is_zero()
                                    && !conds[k].is_zero()
                                    && !conds[j].approx_eq(&conds[k], COND_TOL)
                            }
                        }
                    })
            }
            Certificate::NoUnitMassAction { player } => {
                *player < n && sigma.pure_action(*player).is_none()
            }
            Certificate::CoincidingConditionals { player, j, k } => {
                if *player >= n || j == k {
                    return false;
                }
                let conds = match sigma.conditionals(*player) {
                    Ok(c) => c,
                    Err(_) => return false,
                };
                if *j >= conds.len() || *k >= conds.len() {
                    return false;
                }
                let pair_equal = !conds[*j].is_zero()
                    && !conds[*k].is_zero()
                    && conds[*j].approx_eq(&conds[*k], COND_TOL);
                match self.concept {
                    Concept::Cce => pair_equal && first_differing_pair(&conds).is_none(),
                    _ => pair_equal,
                }
            }
        }
    }
}

/// First supported action whose conditional differs from the lowest
/// supported one, or `None` if all supported conditionals coincide.
fn first_differing_pair(conds: &[Conditional]) -> Option<(usize, usize)> {
    let k = conds.iter().position(|c| !c.is_zero())?;
    conds
        .iter()
        .enumerate()
        .skip(k + 1)
        .find(|(_, c)| !c.is_zero() && !c.approx_eq(&conds[k], COND_TOL))
        .map(|(j, _)| (k, j))
}

/// sNE installability of a product strategy.
pub fn check_sne(sigma: &JointMixedStrategy) -> Result<InstallabilityReport> {
    if !sigma.is_product(PROB_TOL) {
        return Err(Error::Precondition(
            "sNE installability is defined for product strategies only".into(),
        ));
    }
    let mut profile = Vec::with_capacity(sigma.shape().num_players());
    for i in 0..sigma.shape().num_players() {
        match sigma.pure_action(i) {
            Some(a) => profile.push(a),
            None => {
                return Ok(InstallabilityReport {
                    concept: Concept::Ne,
                    verdict: Verdict::NotInstallable,
                    certificate: Certificate::NoUnitMassAction { player: i },
                })
            }
        }
    }
    Ok(InstallabilityReport {
        concept: Concept::Ne,
        verdict: Verdict::Installable,
        certificate: Certificate::PureProfile(profile),
    })
}

/// sCE installability. Scans players, then `j`, then `k` in ascending order
/// and reports the first supported pair with coinciding conditionals.
pub fn check_sce(sigma: &JointMixedStrategy) -> InstallabilityReport {
    let shape = sigma.shape();
    for i in 0..shape.num_players() {
        let conds = sigma.conditionals(i).expect("player index in range");
        for j in 0..conds.len() {
            if conds[j].is_zero() {
                continue;
            }
            for k in 0..conds.len() {
                if j != k && !conds[k].is_zero() && conds[j].approx_eq(&conds[k], COND_TOL) {
                    return InstallabilityReport {
                        concept: Concept::Ce,
                        verdict: Verdict::NotInstallable,
                        certificate: Certificate::CoincidingConditionals { player: i, j, k },
                    };
                }
            }
        }
    }
    InstallabilityReport {
        concept: Concept::Ce,
        verdict: Verdict::Installable,
        certificate: Certificate::DistinctConditionals,
    }
}

/// sCCE installability in `O(n |A|)`.
pub fn check_scce(sigma: &JointMixedStrategy) -> InstallabilityReport {
    let shape = sigma.shape();
    let mut witnesses = Vec::with_capacity(shape.num_players());
    for i in 0..shape.num_players() {
        let conds = sigma.conditionals(i).expect("player index in range");
        let supported: Vec<usize> = (0..conds.len()).filter(|&j| !conds[j].is_zero()).collect();
        if let Some((k, j)) = first_differing_pair(&conds) {
            witnesses.push(PlayerWitness::DistinguishingPair { j: k, k: j });
        } else if supported.len() == 1 {
            witnesses.push(PlayerWitness::SingleSupport {
                action: supported[0],
            });
        } else {
            return InstallabilityReport {
                concept: Concept::Cce,
                verdict: Verdict::NotInstallable,
                certificate: Certificate::CoincidingConditionals {
                    player: i,
                    j: supported[0],
                    k: supported[1],
                },
            };
        }
    }
    InstallabilityReport {
        concept: Concept::Cce,
        verdict: Verdict::Installable,
        certificate: Certificate::PlayerWitnesses(witnesses),
    }
}

/// Dispatch on the solution concept.
pub fn check(sigma: &JointMixedStrategy, concept: Concept) -> Result<InstallabilityReport> {
    match concept {
        Concept::Ne => check_sne(sigma),
        Concept::Ce => Ok(check_sce(sigma)),
        Concept::Cce => Ok(check_scce(sigma)),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageReport {
    pub stage: usize,
    pub state: usize,
    pub report: InstallabilityReport,
}

/// Stage-wise installability of a Markov policy.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovInstallability {
    pub concept: Concept,
    pub verdict: Verdict,
    /// One entry per `(h, s)` in stage-major order.
    pub stages: Vec<StageReport>,
}

impl MarkovInstallability {
    pub fn is_installable(&self) -> bool {
        self.verdict == Verdict::Installable
    }

    /// Stages whose stage game fails the check.
    pub fn failing_stages(&self) -> Vec<(usize, usize)> {
        self.stages
            .iter()
            .filter(|r| !r.report.is_installable())
            .map(|r| (r.stage, r.state))
            .collect()
    }
}

/// Run the normal-form check on every stage distribution `π_h(s)`.
pub fn check_markov(
    policy: &MarkovPolicy,
    game: &MarkovGameSkeleton,
    concept: Concept,
) -> Result<MarkovInstallability> {
    policy.check_game(game)?;
    if concept == Concept::Ne && !policy.is_product() {
        return Err(Error::Precondition(
            "strict Markov-perfect NE requires a product policy".into(),
        ));
    }
    let mut stages = Vec::with_capacity(policy.horizon() * policy.num_states());
    let mut all_ok = true;
    for h in 0..policy.horizon() {
        for s in 0..policy.num_states() {
            let report = check(policy.stage(h, s), concept)?;
            all_ok &= report.is_installable();
            stages.push(StageReport {
                stage: h,
                state: s,
                report,
            });
        }
    }
    Ok(MarkovInstallability {
        concept,
        verdict: if all_ok {
            Verdict::Installable
        } else {
            Verdict::NotInstallable
        },
        stages,
    })
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

    fn sigma_ex() -> JointMixedStrategy {
        JointMixedStrategy::new(shape(&[3, 2]), vec![0.2, 0.2, 0.2, 0.2, 0.2, 0.0]).unwrap()
    }

    #[test]
    fn sne_examples() {
        let sh = shape(&[2, 2]);
        let r = check_sne(&JointMixedStrategy::pure(sh.clone(), &[0, 0]).unwrap()).unwrap();
        assert!(r.is_installable());

        let mixed =
            JointMixedStrategy::product(sh.clone(), &[vec![0.5, 0.5], vec![1.0, 0.0]]).unwrap();
        let r = check_sne(&mixed).unwrap();
        assert_eq!(r.verdict, Verdict::NotInstallable);
        assert_eq!(r.certificate, Certificate::NoUnitMassAction { player: 0 });
        assert!(r.certificate_holds(&mixed));

        let r = check_sne(&JointMixedStrategy::pure(sh, &[0, 1]).unwrap()).unwrap();
        assert_eq!(r.certificate, Certificate::PureProfile(vec![0, 1]));

        assert!(matches!(check_sne(&sigma_corr()), Err(Error::Precondition(_))));
    }

    #[test]
    fn sce_examples() {
        assert!(check_sce(&sigma_corr()).is_installable());

        let u = JointMixedStrategy::uniform(shape(&[2, 2]));
        let r = check_sce(&u);
        assert_eq!(
            r.certificate,
            Certificate::CoincidingConditionals { player: 0, j: 0, k: 1 }
        );
        assert!(r.certificate_holds(&u));

        let r = check_sce(&sigma_ex());
        assert_eq!(
            r.certificate,
            Certificate::CoincidingConditionals { player: 0, j: 0, k: 1 }
        );
    }

    #[test]
    fn scce_examples() {
        let ex = sigma_ex();
        let r = check_scce(&ex);
        assert!(r.is_installable());
        assert_eq!(
            r.certificate,
            Certificate::PlayerWitnesses(vec![
                PlayerWitness::DistinguishingPair { j: 0, k: 2 },
                PlayerWitness::DistinguishingPair { j: 0, k: 1 },
            ])
        );
        assert!(r.certificate_holds(&ex));

        let u = JointMixedStrategy::uniform(shape(&[2, 2]));
        let r = check_scce(&u);
        assert_eq!(r.verdict, Verdict::NotInstallable);
        assert!(r.note().contains("necessity"));
        assert!(r.certificate_holds(&u));

        let p = JointMixedStrategy::pure(shape(&[2, 2]), &[0, 0]).unwrap();
        let r = check_scce(&p);
        assert_eq!(
            r.certificate,
            Certificate::PlayerWitnesses(vec![
                PlayerWitness::SingleSupport { action: 0 },
                PlayerWitness::SingleSupport { action: 0 },
            ])
        );
    }

    #[test]
    fn scce_single_support_with_mixing_opponents() {
        // Player 0 always plays 0 while players 1 and 2 correlate perfectly.
        // Player 0's only conditional is (0.5, 0, 0, 0.5): no unit entry, but
        // a single supported action, which is enough.
        let mut probs = vec![0.0; 8];
        probs[0] = 0.5; // (0, 0, 0)
        probs[3] = 0.5; // (0, 1, 1)
        let s = JointMixedStrategy::new(shape(&[2, 2, 2]), probs).unwrap();
        let r = check_scce(&s);
        assert!(r.is_installable());
        assert_eq!(
            r.certificate,
            Certificate::PlayerWitnesses(vec![
                PlayerWitness::SingleSupport { action: 0 },
                PlayerWitness::DistinguishingPair { j: 0, k: 1 },
                PlayerWitness::DistinguishingPair { j: 0, k: 1 },
            ])
        );
    }

    #[test]
    fn scce_rejects_mixed_product_player() {
        let s = JointMixedStrategy::new(shape(&[2, 2]), vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        let r = check_scce(&s);
        assert_eq!(
            r.certificate,
            Certificate::CoincidingConditionals { player: 1, j: 0, k: 1 }
        );
        assert!(r.certificate_holds(&s));
    }

    #[test]
    fn markov_examples() {
        let sh = shape(&[2, 2]);
        let g = MarkovGameSkeleton::new(sh.clone(), 1, 2, vec![1.0; 8], vec![1.0]).unwrap();
        let pol = MarkovPolicy::stationary(2, 1, sigma_corr()).unwrap();
        let r = check_markov(&pol, &g, Concept::Ce).unwrap();
        assert!(r.is_installable());
        assert_eq!(r.stages.len(), 2);

        let mixed = MarkovPolicy::new(
            2,
            1,
            vec![sigma_corr(), JointMixedStrategy::uniform(sh.clone())],
            false,
        )
        .unwrap();
        let r = check_markov(&mixed, &g, Concept::Ce).unwrap();
        assert!(!r.is_installable());
        assert_eq!(r.failing_stages(), vec![(1, 0)]);

        assert!(matches!(
            check_markov(&pol, &g, Concept::Ne),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn one_stage_markov_matches_normal_form() {
        let sh = shape(&[3, 2]);
        let g = MarkovGameSkeleton::single_stage(sh);
        for c in [Concept::Ce, Concept::Cce] {
            let pol = MarkovPolicy::from_strategy(sigma_ex());
            let r = check_markov(&pol, &g, c).unwrap();
            assert_eq!(r.stages[0].report, check(&sigma_ex(), c).unwrap());
        }
    }
}
