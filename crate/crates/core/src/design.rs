//! Cost-optimal reward design as a linear program.
//!
//! Normal-form LP variables are the utilities `u_i(a)`; Markov LP variables
//! are `r_{i,h}(s,a)`, `Q_{i,h}(s,a)`, `V_{i,h}(s)` (including the terminal
//! `V_{i,H}`). Both add cost auxiliaries. Strictness rows per player and
//! stage, with `Q = u` in the normal-form case:
//!
//! * CCE / NE, deviation `b`: `Σ_a σ(a) [Q(a) − Q(b, a_{-i})] ≥ ι`, skipping
//!   `b` when the player's marginal is a point mass on `b`.
//! * CE, supported `j`, `k != j`: `Σ_{a_{-i}} σ_ij(a_{-i}) [Q(j, a_{-i}) − Q(k, a_{-i})] ≥ ι`.
//!
//! The NE rows are the CCE rows of a product strategy.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::game::{
    Concept, JointMixedStrategy, MarkovGameSkeleton, MarkovPolicy, RewardFunction, RewardTable,
    PROB_TOL,
};
use crate::lp::{solve, LinearProgram, LpStatus, Relation};
use crate::verify::{policy_eval, visitation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CostKind {
    /// `Σ μ_h(s,a) |r − r⁰|` with the visitation measure of the target.
    Online,
    /// `Σ |r − r⁰|`.
    Offline,
    /// Minus the sum of player values.
    SocialWelfare,
    /// Minus the smallest player value.
    Egalitarian,
}

impl CostKind {
    pub const ALL: [CostKind; 4] = [
        CostKind::Online,
        CostKind::Offline,
        CostKind::SocialWelfare,
        CostKind::Egalitarian,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CostKind::Online => "online",
            CostKind::Offline => "offline",
            CostKind::SocialWelfare => "social-welfare",
            CostKind::Egalitarian => "egalitarian",
        }
    }

    pub fn needs_baseline(self) -> bool {
        matches!(self, CostKind::Online | CostKind::Offline)
    }
}

impl fmt::Display for CostKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CostKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "online" => Ok(CostKind::Online),
            "offline" => Ok(CostKind::Offline),
            "social-welfare" | "welfare" => Ok(CostKind::SocialWelfare),
            "egalitarian" => Ok(CostKind::Egalitarian),
            other => Err(Error::InvalidValue(format!("unknown cost kind '{other}'"))),
        }
    }
}

/// A cost objective with its optional reference reward `r⁰`.
///
/// When `baseline` is `None` the game's own baseline is used.
#[derive(Clone, Debug, PartialEq)]
pub struct CostSpec {
    pub kind: CostKind,
    pub baseline: Option<RewardTable>,
}

impl CostSpec {
    pub fn new(kind: CostKind) -> Self {
        CostSpec {
            kind,
            baseline: None,
        }
    }

    pub fn with_baseline(kind: CostKind, baseline: RewardTable) -> Self {
        CostSpec {
            kind,
            baseline: Some(baseline),
        }
    }

    /// The reference reward for L1 costs, checked against the game.
    pub fn baseline_for<'a>(&'a self, game: &'a MarkovGameSkeleton) -> Result<&'a RewardTable> {
        let b = self
            .baseline
            .as_ref()
            .or(game.baseline())
            .ok_or_else(|| {
                Error::Precondition(format!("{} cost needs a baseline reward", self.kind))
            })?;
        game.check_rewards(b)?;
        Ok(b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DesignConfig {
    pub slack: f64,
    pub bound: f64,
    pub concept: Concept,
}

impl DesignConfig {
    pub fn new(slack: f64, bound: f64, concept: Concept) -> Result<Self> {
        if !slack.is_finite() || slack <= 0.0 {
            return Err(Error::InvalidValue(format!("slack {slack} must be finite and > 0")));
        }
        if !bound.is_finite() || bound <= 0.0 {
            return Err(Error::InvalidValue(format!("bound {bound} must be finite and > 0")));
        }
        Ok(DesignConfig {
            slack,
            bound,
            concept,
        })
    }

    fn validate(&self) -> Result<()> {
        DesignConfig::new(self.slack, self.bound, self.concept).map(|_| ())
    }
}

/// A design target: a normal-form strategy or a Markov policy in a game.
#[derive(Clone, Copy, Debug)]
pub enum Problem<'a> {
    NormalForm(&'a JointMixedStrategy),
    Markov {
        game: &'a MarkovGameSkeleton,
        policy: &'a MarkovPolicy,
    },
}

/// Dense per-joint-action coefficients `c` of one strictness row
/// `Σ_a c[a] Q(a) ≥ ι`.
pub(crate) fn stage_gap_rows(
    sigma: &JointMixedStrategy,
    player: usize,
    concept: Concept,
) -> Vec<Vec<f64>> {
    let shape = sigma.shape();
    let na = shape.num_joint();
    let mut rows = Vec::new();
    match concept {
        Concept::Ne | Concept::Cce => {
            let target = sigma.pure_action(player);
            for b in (0..shape.num_actions(player)).filter(|&b| Some(b) != target) {
                let mut c = vec![0.0; na];
                for (a, &p) in sigma.probs().iter().enumerate() {
                    if p == 0.0 {
                        continue;
                    }
                    c[a] += p;
                    c[shape.with_action(a, player, b)] -= p;
                }
                rows.push(c);
            }
        }
        Concept::Ce => {
            let conds = sigma.conditionals(player).expect("player index in range");
            for cj in conds.iter().filter(|c| !c.is_zero()) {
                for k in (0..shape.num_actions(player)).filter(|&k| k != cj.action) {
                    let mut c = vec![0.0; na];
                    for (o, &p) in cj.dist.iter().enumerate() {
                        if p == 0.0 {
                            continue;
                        }
                        c[shape.join(player, cj.action, o)] += p;
                        c[shape.join(player, k, o)] -= p;
                    }
                    rows.push(c);
                }
            }
        }
    }
    rows
}

/// How the slack enters the LP.
#[derive(Clone, Copy, Debug, PartialEq)]
enum SlackMode {
    Fixed(f64),
    /// Maximize a slack variable bounded by `±cap`.
    Maximize { cap: f64 },
}

/// Variable indices of an assembled design LP.
#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    pub num_players: usize,
    pub horizon: usize,
    pub num_states: usize,
    pub num_joint: usize,
    /// Reward (or utility) variable per `(i, h, s, a)` in [`RewardTable`] order.
    pub reward_start: usize,
    /// `Q` variables in the same order (Markov LPs only).
    pub q_start: Option<usize>,
    /// `V` variables per `(i, h, s)`, `h = 0..=H` (Markov LPs only).
    pub v_start: Option<usize>,
    pub aux_start: usize,
    pub slack_var: Option<usize>,
    pub num_gap_rows: usize,
}

impl Layout {
    fn reward_count(&self) -> usize {
        self.num_players * self.horizon * self.num_states * self.num_joint
    }

    pub fn reward_var(&self, player: usize, stage: usize, state: usize, joint: usize) -> usize {
        self.reward_start
            + ((player * self.horizon + stage) * self.num_states + state) * self.num_joint
            + joint
    }

    pub fn q_var(&self, player: usize, stage: usize, state: usize, joint: usize) -> Option<usize> {
        self.q_start.map(|q| q + self.reward_var(player, stage, state, joint) - self.reward_start)
    }

    pub fn v_var(&self, player: usize, stage: usize, state: usize) -> Option<usize> {
        self.v_start
            .map(|v| v + (player * (self.horizon + 1) + stage) * self.num_states + state)
    }

    /// Read the reward block out of an LP point.
    pub fn extract_reward(&self, x: &[f64]) -> RewardTable {
        let n = self.reward_count();
        RewardTable::from_flat(
            self.num_players,
            self.horizon,
            self.num_states,
            self.num_joint,
            x[self.reward_start..self.reward_start + n].to_vec(),
        )
        .expect("layout matches reward dimensions")
    }
}

/// An assembled LP and where its variables live.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignLp {
    pub lp: LinearProgram,
    pub layout: Layout,
}

/// Welfare of each player as `(var, coeff)` terms.
type WelfareTerms = Vec<Vec<(usize, f64)>>;

struct Builder<'a> {
    game: &'a MarkovGameSkeleton,
    policy: &'a MarkovPolicy,
    markov: bool,
    concept: Concept,
    bound: f64,
}

impl Builder<'_> {
    fn build(&self, cost: &CostSpec, slack: SlackMode) -> Result<DesignLp> {
        let (game, policy) = (self.game, self.policy);
        policy.check_game(game)?;
        if self.concept == Concept::Ne && !policy.is_product() {
            return Err(Error::Precondition(
                "strict NE design requires a product target".into(),
            ));
        }
        let n = game.num_players();
        let (horizon, ns, na) = (game.horizon(), game.num_states(), game.num_joint());
        let nr = n * horizon * ns * na;
        let nv = n * (horizon + 1) * ns;

        let baseline = if cost.kind.needs_baseline() {
            Some(cost.baseline_for(game)?)
        } else {
            None
        };
        let weights: Option<Vec<f64>> = match cost.kind {
            CostKind::Online => {
                let occ = visitation(game, policy)?;
                let mut w = Vec::with_capacity(nr);
                for _ in 0..n {
                    for h in 0..horizon {
                        for s in 0..ns {
                            for a in 0..na {
                                w.push(occ.get(h, s, a));
                            }
                        }
                    }
                }
                Some(w)
            }
            CostKind::Offline => Some(vec![1.0; nr]),
            _ => None,
        };
        let num_abs = weights.as_ref().map_or(0, |w| w.iter().filter(|&&x| x > 0.0).count());
        let num_z = usize::from(cost.kind == CostKind::Egalitarian);
        let num_slack = usize::from(matches!(slack, SlackMode::Maximize { .. }));

        let (q_start, v_start, aux_start) = if self.markov {
            (Some(nr), Some(2 * nr), 2 * nr + nv)
        } else {
            (None, None, nr)
        };
        let num_vars = aux_start + num_abs + num_z + num_slack;
        let layout = Layout {
            num_players: n,
            horizon,
            num_states: ns,
            num_joint: na,
            reward_start: 0,
            q_start,
            v_start,
            aux_start,
            slack_var: (num_slack == 1).then_some(num_vars - 1),
            num_gap_rows: 0,
        };
        let mut lp = LinearProgram::new(num_vars);
        let b = self.bound;
        let prefix = if self.markov { "r" } else { "u" };
        for i in 0..n {
            for h in 0..horizon {
                for s in 0..ns {
                    for a in 0..na {
                        let rv = layout.reward_var(i, h, s, a);
                        lp.set_bounds(rv, -b, b);
                        if self.markov {
                            lp.set_name(rv, format!("r_{i}_{h}_{s}_{a}"));
                            let qv = layout.q_var(i, h, s, a).expect("markov layout");
                            lp.set_bounds(qv, f64::NEG_INFINITY, f64::INFINITY);
                            lp.set_name(qv, format!("q_{i}_{h}_{s}_{a}"));
                        } else {
                            lp.set_name(rv, format!("{prefix}_{i}_{a}"));
                        }
                    }
                }
            }
            if self.markov {
                for h in 0..=horizon {
                    for s in 0..ns {
                        let vv = layout.v_var(i, h, s).expect("markov layout");
                        lp.set_bounds(vv, f64::NEG_INFINITY, f64::INFINITY);
                        lp.set_name(vv, format!("v_{i}_{h}_{s}"));
                    }
                }
            }
        }

        if self.markov {
            for i in 0..n {
                for h in 0..horizon {
                    for s in 0..ns {
                        let stage = policy.stage(h, s);
                        for a in 0..na {
                            // Q − r − Σ P V' = 0
                            let mut terms = vec![
                                (layout.q_var(i, h, s, a).expect("markov layout"), 1.0),
                                (layout.reward_var(i, h, s, a), -1.0),
                            ];
                            for (sp, &p) in game.transition_row(h, s, a).iter().enumerate() {
                                if p != 0.0 {
                                    terms.push((layout.v_var(i, h + 1, sp).expect("markov"), -p));
                                }
                            }
                            lp.add_sparse(&terms, Relation::Eq, 0.0);
                        }
                        // V − Σ π Q = 0
                        let mut terms = vec![(layout.v_var(i, h, s).expect("markov"), 1.0)];
                        for a in 0..na {
                            let p = stage.prob(a);
                            if p != 0.0 {
                                terms.push((layout.q_var(i, h, s, a).expect("markov"), -p));
                            }
                        }
                        lp.add_sparse(&terms, Relation::Eq, 0.0);
                    }
                }
                for s in 0..ns {
                    lp.add_sparse(
                        &[(layout.v_var(i, horizon, s).expect("markov"), 1.0)],
                        Relation::Eq,
                        0.0,
                    );
                }
            }
        }

        let mut num_gap_rows = 0;
        for i in 0..n {
            for h in 0..horizon {
                for s in 0..ns {
                    for c in stage_gap_rows(policy.stage(h, s), i, self.concept) {
                        let mut terms: Vec<(usize, f64)> = c
                            .iter()
                            .enumerate()
                            .filter(|(_, &x)| x != 0.0)
                            .map(|(a, &x)| {
                                let var = if self.markov {
                                    layout.q_var(i, h, s, a).expect("markov")
                                } else {
                                    layout.reward_var(i, h, s, a)
                                };
                                (var, x)
                            })
                            .collect();
                        let rhs = match slack {
                            SlackMode::Fixed(iota) => iota,
                            SlackMode::Maximize { .. } => {
                                terms.push((layout.slack_var.expect("slack var"), -1.0));
                                0.0
                            }
                        };
                        lp.add_sparse(&terms, Relation::Ge, rhs);
                        num_gap_rows += 1;
                    }
                }
            }
        }

        match slack {
            SlackMode::Fixed(_) => {
                let mut next_aux = aux_start;
                if let (Some(w), Some(r0)) = (&weights, baseline) {
                    for k in 0..nr {
                        if w[k] <= 0.0 {
                            continue;
                        }
                        let t = next_aux;
                        next_aux += 1;
                        lp.set_name(t, format!("t_{k}"));
                        lp.set_objective_coeff(t, w[k]);
                        let r = layout.reward_start + k;
                        let r0k = r0.values()[k];
                        // t ≥ r − r⁰ and t ≥ r⁰ − r
                        lp.add_sparse(&[(t, 1.0), (r, -1.0)], Relation::Ge, -r0k);
                        lp.add_sparse(&[(t, 1.0), (r, 1.0)], Relation::Ge, r0k);
                    }
                }
                let welfare = self.welfare_terms(&layout);
                match cost.kind {
                    CostKind::SocialWelfare => {
                        for terms in &welfare {
                            for &(var, c) in terms {
                                lp.add_objective_coeff(var, -c);
                            }
                        }
                    }
                    CostKind::Egalitarian => {
                        let z = next_aux;
                        lp.set_bounds(z, f64::NEG_INFINITY, f64::INFINITY);
                        lp.set_name(z, "z");
                        lp.set_objective_coeff(z, -1.0);
                        for terms in &welfare {
                            // z − W_i ≤ 0
                            let mut row = vec![(z, 1.0)];
                            row.extend(terms.iter().map(|&(v, c)| (v, -c)));
                            lp.add_sparse(&row, Relation::Le, 0.0);
                        }
                    }
                    CostKind::Online | CostKind::Offline => {}
                }
            }
            SlackMode::Maximize { cap } => {
                let iota = layout.slack_var.expect("slack var");
                lp.set_bounds(iota, -cap, cap);
                lp.set_name(iota, "iota");
                lp.set_objective_coeff(iota, -1.0);
            }
        }
        Ok(DesignLp {
            lp,
            layout: Layout {
                num_gap_rows,
                ..layout
            },
        })
    }

    /// Per-player welfare `Σ_s d(s) V_{i,0}(s)`, or `Σ_a σ(a) u_i(a)` for
    /// normal-form games.
    fn welfare_terms(&self, layout: &Layout) -> WelfareTerms {
        let n = self.game.num_players();
        (0..n)
            .map(|i| {
                if self.markov {
                    self.game
                        .initial_dist()
                        .iter()
                        .enumerate()
                        .filter(|(_, &d)| d != 0.0)
                        .map(|(s, &d)| (layout.v_var(i, 0, s).expect("markov"), d))
                        .collect()
                } else {
                    self.policy
                        .stage(0, 0)
                        .probs()
                        .iter()
                        .enumerate()
                        .filter(|(_, &p)| p != 0.0)
                        .map(|(a, &p)| (layout.reward_var(i, 0, 0, a), p))
                        .collect()
                }
            })
            .collect()
    }
}

/// Owned single-stage embedding of a normal-form target.
fn embed(sigma: &JointMixedStrategy) -> (MarkovGameSkeleton, MarkovPolicy) {
    (
        MarkovGameSkeleton::single_stage(sigma.shape().clone()),
        MarkovPolicy::from_strategy(sigma.clone()),
    )
}

/// Normal-form design LP over utilities `u_i(a) ∈ [−B, B]`.
///
/// For L1 costs the baseline is a one-stage, one-state reward table.
pub fn build_nfg_lp(
    sigma: &JointMixedStrategy,
    cost: &CostSpec,
    cfg: &DesignConfig,
) -> Result<DesignLp> {
    cfg.validate()?;
    if cfg.concept == Concept::Ne && !sigma.is_product(PROB_TOL) {
        return Err(Error::Precondition(
            "strict NE design requires a product strategy".into(),
        ));
    }
    let (game, policy) = embed(sigma);
    Builder {
        game: &game,
        policy: &policy,
        markov: false,
        concept: cfg.concept,
        bound: cfg.bound,
    }
    .build(cost, SlackMode::Fixed(cfg.slack))
}

/// Markov design LP over `r`, `Q` and `V` with `|r| ≤ B`.
pub fn build_mg_lp(
    game: &MarkovGameSkeleton,
    policy: &MarkovPolicy,
    cost: &CostSpec,
    cfg: &DesignConfig,
) -> Result<DesignLp> {
    cfg.validate()?;
    Builder {
        game,
        policy,
        markov: true,
        concept: cfg.concept,
        bound: cfg.bound,
    }
    .build(cost, SlackMode::Fixed(cfg.slack))
}

fn build_problem(problem: Problem<'_>, cost: &CostSpec, cfg: &DesignConfig) -> Result<DesignLp> {
    match problem {
        Problem::NormalForm(sigma) => build_nfg_lp(sigma, cost, cfg),
        Problem::Markov { game, policy } => build_mg_lp(game, policy, cost, cfg),
    }
}

/// A solved design.
#[derive(Clone, Debug, PartialEq)]
pub struct Design {
    pub reward: RewardFunction,
    /// Cost value, or the achieved slack in max-gap mode.
    pub objective: f64,
    /// The slack the design guarantees.
    pub slack: f64,
    pub num_vars: usize,
    pub num_constraints: usize,
}

fn finish(dlp: &DesignLp, bound: f64, slack: Option<f64>) -> Result<Option<Design>> {
    let sol = solve(&dlp.lp)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Ok(None),
        LpStatus::Unbounded => {
            return Err(Error::Internal("design LP reported unbounded".into()));
        }
    }
    let x = sol.point.expect("optimal point");
    let mut table = dlp.layout.extract_reward(&x);
    // Solver residuals can push a boxed entry just past ±B.
    for i in 0..table.num_players() {
        for h in 0..table.horizon() {
            for s in 0..table.num_states() {
                for a in 0..table.num_joint() {
                    let v = table.get(i, h, s, a).clamp(-bound, bound);
                    table.set(i, h, s, a, v);
                }
            }
        }
    }
    let objective = sol.objective_value.expect("optimal objective");
    let achieved = dlp.layout.slack_var.map(|k| x[k]);
    Ok(Some(Design {
        reward: RewardFunction::new(table, bound)?,
        objective: achieved.map_or(objective, |_| -objective),
        slack: slack.or(achieved).unwrap_or(0.0),
        num_vars: dlp.lp.num_vars(),
        num_constraints: dlp.lp.constraints().len(),
    }))
}

/// Solve the design LP; infeasibility means the target is not
/// `ι`-installable within bound `B`.
pub fn design(problem: Problem<'_>, cost: &CostSpec, cfg: &DesignConfig) -> Result<Design> {
    let dlp = build_problem(problem, cost, cfg)?;
    finish(&dlp, cfg.bound, Some(cfg.slack))?.ok_or(Error::Infeasible {
        slack: cfg.slack,
        bound: cfg.bound,
    })
}

/// Largest uniform slack achievable within bound `B`, with a reward
/// attaining it. A non-positive slack means the target is not installable.
pub fn design_max_gap(problem: Problem<'_>, bound: f64, concept: Concept) -> Result<Design> {
    let cfg = DesignConfig::new(1.0, bound, concept)?;
    let embedded;
    let (g, p, markov) = match problem {
        Problem::NormalForm(sigma) => {
            if concept == Concept::Ne && !sigma.is_product(PROB_TOL) {
                return Err(Error::Precondition(
                    "strict NE design requires a product strategy".into(),
                ));
            }
            embedded = embed(sigma);
            (&embedded.0, &embedded.1, false)
        }
        Problem::Markov { game, policy } => (game, policy, true),
    };
    // every gap is a difference of two values in [−HB, HB]
    let cap = 2.0 * bound * g.horizon() as f64;
    let dlp = Builder {
        game: g,
        policy: p,
        markov,
        concept: cfg.concept,
        bound,
    }
    .build(&CostSpec::new(CostKind::SocialWelfare), SlackMode::Maximize { cap })?;
    finish(&dlp, bound, None)?
        .ok_or_else(|| Error::Internal("max-gap LP is always feasible".into()))
}

/// Greedy baseline: fix rewards stage by stage from the last stage down,
/// each stage solving its own LP against the already fixed continuation.
///
/// Each stage minimizes the stage-local part of the cost (the stage's L1
/// terms, or the visitation-weighted stage rewards for welfare costs).
/// Returns `Error::Infeasible` naming no stage when some stage LP fails.
pub fn design_stagewise(
    game: &MarkovGameSkeleton,
    policy: &MarkovPolicy,
    cost: &CostSpec,
    cfg: &DesignConfig,
) -> Result<Design> {
    cfg.validate()?;
    policy.check_game(game)?;
    if cfg.concept == Concept::Ne && !policy.is_product() {
        return Err(Error::Precondition(
            "strict NE design requires a product target".into(),
        ));
    }
    let n = game.num_players();
    let (horizon, ns, na) = (game.horizon(), game.num_states(), game.num_joint());
    let baseline = if cost.kind.needs_baseline() {
        Some(cost.baseline_for(game)?)
    } else {
        None
    };
    let occ = visitation(game, policy)?;
    let mut table = game.empty_rewards();
    let mut next_v = vec![vec![0.0; ns]; n];
    let mut total_vars = 0;
    let mut total_rows = 0;
    for h in (0..horizon).rev() {
        let nr = n * ns * na;
        let rvar = |i: usize, s: usize, a: usize| (i * ns + s) * na + a;
        let weights: Option<Vec<f64>> = match cost.kind {
            CostKind::Online => Some(
                (0..n)
                    .flat_map(|_| (0..ns).flat_map(|s| (0..na).map(move |a| (s, a))))
                    .map(|(s, a)| occ.get(h, s, a))
                    .collect(),
            ),
            CostKind::Offline => Some(vec![1.0; nr]),
            _ => None,
        };
        let num_abs = weights.as_ref().map_or(0, |w| w.iter().filter(|&&x| x > 0.0).count());
        let num_z = usize::from(cost.kind == CostKind::Egalitarian);
        let mut lp = LinearProgram::new(nr + num_abs + num_z);
        for k in 0..nr {
            lp.set_bounds(k, -cfg.bound, cfg.bound);
        }
        for i in 0..n {
            for s in 0..ns {
                let stage = policy.stage(h, s);
                let cont: Vec<f64> = (0..na)
                    .map(|a| game.expect_next(h, s, a, &next_v[i]))
                    .collect();
                for c in stage_gap_rows(stage, i, cfg.concept) {
                    let terms: Vec<(usize, f64)> = c
                        .iter()
                        .enumerate()
                        .filter(|(_, &x)| x != 0.0)
                        .map(|(a, &x)| (rvar(i, s, a), x))
                        .collect();
                    let shift: f64 = c.iter().zip(&cont).map(|(x, v)| x * v).sum();
                    lp.add_sparse(&terms, Relation::Ge, cfg.slack - shift);
                }
            }
        }
        let mut next_aux = nr;
        if let (Some(w), Some(r0)) = (&weights, baseline) {
            for i in 0..n {
                for s in 0..ns {
                    for a in 0..na {
                        let k = rvar(i, s, a);
                        if w[k] <= 0.0 {
                            continue;
                        }
                        let t = next_aux;
                        next_aux += 1;
                        lp.set_objective_coeff(t, w[k]);
                        let r0k = r0.get(i, h, s, a);
                        lp.add_sparse(&[(t, 1.0), (k, -1.0)], Relation::Ge, -r0k);
                        lp.add_sparse(&[(t, 1.0), (k, 1.0)], Relation::Ge, r0k);
                    }
                }
            }
        }
        if matches!(cost.kind, CostKind::SocialWelfare | CostKind::Egalitarian) {
            let stage_welfare: Vec<Vec<(usize, f64)>> = (0..n)
                .map(|i| {
                    (0..ns)
                        .flat_map(|s| (0..na).map(move |a| (s, a)))
                        .filter(|&(s, a)| occ.get(h, s, a) != 0.0)
                        .map(|(s, a)| (rvar(i, s, a), occ.get(h, s, a)))
                        .collect()
                })
                .collect();
            if cost.kind == CostKind::SocialWelfare {
                for terms in &stage_welfare {
                    for &(v, c) in terms {
                        lp.add_objective_coeff(v, -c);
                    }
                }
            } else {
                let z = next_aux;
                lp.set_bounds(z, f64::NEG_INFINITY, f64::INFINITY);
                lp.set_objective_coeff(z, -1.0);
                for terms in &stage_welfare {
                    let mut row = vec![(z, 1.0)];
                    row.extend(terms.iter().map(|&(v, c)| (v, -c)));
                    lp.add_sparse(&row, Relation::Le, 0.0);
                }
            }
        }
        total_vars += lp.num_vars();
        total_rows += lp.constraints().len();
        let sol = solve(&lp)?;
        match sol.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => {
                return Err(Error::Infeasible {
                    slack: cfg.slack,
                    bound: cfg.bound,
                })
            }
            LpStatus::Unbounded => {
                return Err(Error::Internal("stage design LP reported unbounded".into()))
            }
        }
        let x = sol.point.expect("optimal point");
        let mut cur_v = vec![vec![0.0; ns]; n];
        for i in 0..n {
            for s in 0..ns {
                let stage = policy.stage(h, s);
                let mut v = 0.0;
                for a in 0..na {
                    let r = x[rvar(i, s, a)].clamp(-cfg.bound, cfg.bound);
                    table.set(i, h, s, a, r);
                    v += stage.prob(a) * (r + game.expect_next(h, s, a, &next_v[i]));
                }
                cur_v[i][s] = v;
            }
        }
        next_v = cur_v;
    }
    let objective = crate::verify::evaluate_cost(game, policy, &table, cost)?;
    Ok(Design {
        reward: RewardFunction::new(table, cfg.bound)?,
        objective,
        slack: cfg.slack,
        num_vars: total_vars,
        num_constraints: total_rows,
    })
}

/// Values of the designed reward, for reports.
pub fn design_values(
    game: &MarkovGameSkeleton,
    policy: &MarkovPolicy,
    reward: &RewardTable,
) -> Result<Vec<f64>> {
    let vt = policy_eval(game, reward, policy)?;
    Ok((0..game.num_players())
        .map(|i| {
            game.initial_dist()
                .iter()
                .enumerate()
                .map(|(s, d)| d * vt.v(i, 0, s))
                .sum()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{ActionShape, DeviationClass};
    use crate::verify::{check_strict, evaluate_cost};
    use crate::witness::{markov_witness, witness_utility};

    fn shape(sizes: &[usize]) -> ActionShape {
        ActionShape::new(sizes.to_vec()).unwrap()
    }

    fn sigma_corr() -> JointMixedStrategy {
        JointMixedStrategy::new(shape(&[2, 2]), vec![0.5, 0.0, 0.0, 0.5]).unwrap()
    }

    fn zero_baseline(sh: &ActionShape) -> RewardTable {
        RewardTable::zeros(sh.num_players(), 1, 1, sh.num_joint())
    }

    #[test]
    fn nfg_lp_shape_for_corr() {
        let sh = shape(&[2, 2]);
        let cfg = DesignConfig::new(0.1, 1.0, Concept::Cce).unwrap();
        let dlp = build_nfg_lp(&sigma_corr(), &CostSpec::new(CostKind::SocialWelfare), &cfg).unwrap();
        assert_eq!(dlp.layout.num_gap_rows, 4);
        assert_eq!(dlp.lp.num_vars(), 8);
        assert!(dlp.lp.bounds().iter().all(|&b| b == (-1.0, 1.0)));
        let offline = build_nfg_lp(
            &sigma_corr(),
            &CostSpec::with_baseline(CostKind::Offline, zero_baseline(&sh)),
            &cfg,
        )
        .unwrap();
        assert_eq!(offline.lp.num_vars(), 16);
    }

    #[test]
    fn uniform_is_infeasible() {
        let uni = JointMixedStrategy::uniform(shape(&[2, 2]));
        for concept in [Concept::Ce, Concept::Cce] {
            let cfg = DesignConfig::new(1e-6, 1e3, concept).unwrap();
            let r = design(Problem::NormalForm(&uni), &CostSpec::new(CostKind::SocialWelfare), &cfg);
            assert!(matches!(r, Err(Error::Infeasible { .. })), "{concept}");
        }
    }

    #[test]
    fn pure_target_sne_near_max_slack() {
        let sh = shape(&[2, 2]);
        let pure = JointMixedStrategy::pure(sh.clone(), &[0, 0]).unwrap();
        let cfg = DesignConfig::new(1.9, 1.0, Concept::Ne).unwrap();
        let d = design(
            Problem::NormalForm(&pure),
            &CostSpec::with_baseline(CostKind::Offline, zero_baseline(&sh)),
            &cfg,
        )
        .unwrap();
        let g = MarkovGameSkeleton::single_stage(sh);
        let pol = MarkovPolicy::from_strategy(pure);
        let rep = check_strict(&g, d.reward.table(), &pol, Concept::Ne, DeviationClass::Unrestricted, 0.0)
            .unwrap();
        assert!(rep.min_gap >= 1.9 - 1e-6);
    }

    #[test]
    fn welfare_design_on_corr() {
        let cfg = DesignConfig::new(0.25, 1.0, Concept::Cce).unwrap();
        let cost = CostSpec::new(CostKind::SocialWelfare);
        let d = design(Problem::NormalForm(&sigma_corr()), &cost, &cfg).unwrap();
        // on-path entries can sit at B: u(0,0) = u(1,1) = 1 for both players,
        // gaps 0.5 (1 − u(0,1)) ≥ 0.25 with off-path −1
        assert!((d.objective + 2.0).abs() < 1e-7);
        let (g, pol) = embed(&sigma_corr());
        let recomputed = evaluate_cost(&g, &pol, d.reward.table(), &cost).unwrap();
        assert!((recomputed - d.objective).abs() < 1e-6);
    }

    #[test]
    fn markov_lp_accepts_scaled_witness() {
        let sh = shape(&[2, 2]);
        let g = MarkovGameSkeleton::new(sh, 1, 2, vec![1.0; 8], vec![1.0]).unwrap();
        let pol = MarkovPolicy::stationary(2, 1, sigma_corr()).unwrap();
        let cfg = DesignConfig::new(0.1, 1.0, Concept::Cce).unwrap();
        let dlp = build_mg_lp(&g, &pol, &CostSpec::new(CostKind::SocialWelfare), &cfg).unwrap();
        let w = markov_witness(&pol, &g, 1.0, Concept::Cce).unwrap();
        let vt = policy_eval(&g, w.table(), &pol).unwrap();
        let mut x = vec![0.0; dlp.lp.num_vars()];
        let l = &dlp.layout;
        for i in 0..2 {
            for h in 0..2 {
                for a in 0..4 {
                    x[l.reward_var(i, h, 0, a)] = w.get(i, h, 0, a);
                    x[l.q_var(i, h, 0, a).unwrap()] = vt.q(i, h, 0, a);
                }
            }
            for h in 0..=2 {
                x[l.v_var(i, h, 0).unwrap()] = vt.v(i, h, 0);
            }
        }
        assert!(dlp.lp.is_feasible_point(&x, 1e-9));
        let d = design(
            Problem::Markov {
                game: &g,
                policy: &pol,
            },
            &CostSpec::new(CostKind::SocialWelfare),
            &cfg,
        )
        .unwrap();
        let rep = check_strict(&g, d.reward.table(), &pol, Concept::Cce, DeviationClass::Unrestricted, 0.0)
            .unwrap();
        assert!(rep.min_gap >= 0.1 - 1e-6);
    }

    #[test]
    fn one_stage_markov_matches_normal_form() {
        let s = JointMixedStrategy::new(shape(&[2, 2]), vec![0.4, 0.1, 0.2, 0.3]).unwrap();
        let (g, pol) = embed(&s);
        for concept in [Concept::Ce, Concept::Cce] {
            let cfg = DesignConfig::new(0.05, 1.0, concept).unwrap();
            let cost = CostSpec::new(CostKind::Egalitarian);
            let a = design(Problem::NormalForm(&s), &cost, &cfg).unwrap();
            let b = design(
                Problem::Markov {
                    game: &g,
                    policy: &pol,
                },
                &cost,
                &cfg,
            )
            .unwrap();
            assert!((a.objective - b.objective).abs() < 1e-7);
        }
    }

    #[test]
    fn max_gap_matches_witness_scale() {
        let d = design_max_gap(Problem::NormalForm(&sigma_corr()), 1.0, Concept::Cce).unwrap();
        // 0.5 (u(1,1) − u(0,1)) ≤ 1 and that is attained
        assert!((d.slack - 1.0).abs() < 1e-7);
        let d = design_max_gap(
            Problem::NormalForm(&JointMixedStrategy::uniform(shape(&[2, 2]))),
            1.0,
            Concept::Cce,
        )
        .unwrap();
        assert!(d.slack <= 1e-9);
        let u = witness_utility(&sigma_corr());
        assert_eq!(u.max_abs(), 1.0);
    }

    /// Stage 0 plays σ_corr at s0; diagonal profiles lead to s1, off-diagonal
    /// to s2; stage 1 targets the pure profile (0, 0) in both states.
    fn two_stage_fixture() -> (MarkovGameSkeleton, MarkovPolicy) {
        let sh = shape(&[2, 2]);
        let ns = 3;
        let mut trans = vec![0.0; 2 * ns * 4 * ns];
        for h in 0..2 {
            for s in 0..ns {
                for a in 0..4 {
                    let next = if h == 0 && s == 0 {
                        if a == 0 || a == 3 { 1 } else { 2 }
                    } else {
                        s
                    };
                    trans[((h * ns + s) * 4 + a) * ns + next] = 1.0;
                }
            }
        }
        let g = MarkovGameSkeleton::new(sh.clone(), ns, 2, trans, vec![1.0, 0.0, 0.0]).unwrap();
        let pure = JointMixedStrategy::pure(sh, &[0, 0]).unwrap();
        let mut stages = vec![pure; 2 * ns];
        stages[0] = sigma_corr();
        (g, MarkovPolicy::new(2, ns, stages, false).unwrap())
    }

    #[test]
    fn joint_design_beats_stagewise_greedy() {
        let (g, pol) = two_stage_fixture();
        let cfg = DesignConfig::new(1.2, 1.0, Concept::Cce).unwrap();
        let cost = CostSpec::with_baseline(CostKind::Offline, g.empty_rewards());
        assert!(matches!(
            design_stagewise(&g, &pol, &cost, &cfg),
            Err(Error::Infeasible { .. })
        ));
        let d = design(
            Problem::Markov {
                game: &g,
                policy: &pol,
            },
            &cost,
            &cfg,
        )
        .unwrap();
        let rep = check_strict(&g, d.reward.table(), &pol, Concept::Cce, DeviationClass::Unrestricted, 0.0)
            .unwrap();
        assert!(rep.min_gap >= 1.2 - 1e-6);
    }

    #[test]
    fn l1_costs_need_a_baseline() {
        let cfg = DesignConfig::new(0.1, 1.0, Concept::Cce).unwrap();
        assert!(matches!(
            build_nfg_lp(&sigma_corr(), &CostSpec::new(CostKind::Online), &cfg),
            Err(Error::Precondition(_))
        ));
        assert!(DesignConfig::new(0.0, 1.0, Concept::Cce).is_err());
        assert!("social_welfare".parse::<CostKind>().unwrap() == CostKind::SocialWelfare);
    }
}
