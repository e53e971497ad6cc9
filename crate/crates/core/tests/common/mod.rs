#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use strict_install::lp::{LinearProgram, Relation};
use strict_install::{
    ActionShape, Concept, JointMixedStrategy, MarkovGameSkeleton, MarkovPolicy, RewardTable,
};

pub fn shape(sizes: &[usize]) -> ActionShape {
    ActionShape::new(sizes.to_vec()).unwrap()
}

pub fn sigma_corr() -> JointMixedStrategy {
    JointMixedStrategy::new(shape(&[2, 2]), vec![0.5, 0.0, 0.0, 0.5]).unwrap()
}

pub fn sigma_ex() -> JointMixedStrategy {
    JointMixedStrategy::new(shape(&[3, 2]), vec![0.2, 0.2, 0.2, 0.2, 0.2, 0.0]).unwrap()
}

/// All ways to write `total` as an ordered sum of `parts` non-negative integers.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// The strategy grid: every `k/6` distribution on 2×2 and every `k/4`
/// distribution on 3×2, boundary supports included.
pub fn strategy_grid() -> Vec<JointMixedStrategy> {
    let mut grid = Vec::new();
    for (sizes, total) in [(vec![2, 2], 6usize), (vec![3, 2], 4usize)] {
        let sh = shape(&sizes);
        for c in compositions(total, sh.num_joint()) {
            let probs = c.iter().map(|&k| k as f64 / total as f64).collect();
            grid.push(JointMixedStrategy::new(sh.clone(), probs).unwrap());
        }
    }
    grid
}

/// Random distribution of length `n`; each entry is dropped to zero with
/// probability `zero_prob` (at least one entry stays positive).
pub fn random_dist(rng: &mut ChaCha8Rng, n: usize, zero_prob: f64) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n)
            .map(|_| {
                if rng.gen::<f64>() < zero_prob {
                    0.0
                } else {
                    rng.gen_range(0.05..1.0)
                }
            })
            .collect();
        let total: f64 = v.iter().sum();
        if total > 0.0 {
            v.iter_mut().for_each(|x| *x /= total);
            let fix: f64 = v.iter().sum();
            let k = v.iter().position(|&x| x > 0.0).unwrap();
            v[k] += 1.0 - fix;
            return v;
        }
    }
}

pub fn random_shape(rng: &mut ChaCha8Rng, players: usize, max_actions: usize) -> ActionShape {
    shape(
        &(0..players)
            .map(|_| rng.gen_range(2..=max_actions))
            .collect::<Vec<_>>(),
    )
}

pub fn random_strategy(rng: &mut ChaCha8Rng, sh: &ActionShape, zero_prob: f64) -> JointMixedStrategy {
    JointMixedStrategy::new(sh.clone(), random_dist(rng, sh.num_joint(), zero_prob)).unwrap()
}

pub fn random_pure(rng: &mut ChaCha8Rng, sh: &ActionShape) -> JointMixedStrategy {
    let acts: Vec<usize> = sh.sizes().iter().map(|&k| rng.gen_range(0..k)).collect();
    JointMixedStrategy::pure(sh.clone(), &acts).unwrap()
}

/// A random stage strategy that passes the installability check for `concept`.
pub fn random_installable(
    rng: &mut ChaCha8Rng,
    sh: &ActionShape,
    concept: Concept,
) -> JointMixedStrategy {
    if concept == Concept::Ne {
        return random_pure(rng, sh);
    }
    loop {
        let s = if rng.gen::<f64>() < 0.15 {
            random_pure(rng, sh)
        } else {
            random_strategy(rng, sh, 0.3)
        };
        if strict_install::installability::check(&s, concept)
            .unwrap()
            .is_installable()
        {
            return s;
        }
    }
}

pub fn random_game(
    rng: &mut ChaCha8Rng,
    sh: &ActionShape,
    num_states: usize,
    horizon: usize,
) -> MarkovGameSkeleton {
    let na = sh.num_joint();
    let mut trans = Vec::with_capacity(horizon * num_states * na * num_states);
    for _ in 0..horizon * num_states * na {
        trans.extend(random_dist(rng, num_states, 0.4));
    }
    let init = random_dist(rng, num_states, 0.3);
    MarkovGameSkeleton::new(sh.clone(), num_states, horizon, trans, init).unwrap()
}

pub fn random_policy(
    rng: &mut ChaCha8Rng,
    game: &MarkovGameSkeleton,
    concept: Concept,
) -> MarkovPolicy {
    let stages: Vec<JointMixedStrategy> = (0..game.horizon() * game.num_states())
        .map(|_| random_installable(rng, game.shape(), concept))
        .collect();
    MarkovPolicy::new(game.horizon(), game.num_states(), stages, concept == Concept::Ne).unwrap()
}

/// Arbitrary (not necessarily installable) Markov policy.
pub fn random_any_policy(rng: &mut ChaCha8Rng, game: &MarkovGameSkeleton) -> MarkovPolicy {
    let stages: Vec<JointMixedStrategy> = (0..game.horizon() * game.num_states())
        .map(|_| random_strategy(rng, game.shape(), 0.3))
        .collect();
    MarkovPolicy::new(game.horizon(), game.num_states(), stages, false).unwrap()
}

pub fn random_rewards(rng: &mut ChaCha8Rng, game: &MarkovGameSkeleton, scale: f64) -> RewardTable {
    let mut r = game.empty_rewards();
    for i in 0..game.num_players() {
        for h in 0..game.horizon() {
            for s in 0..game.num_states() {
                for a in 0..game.num_joint() {
                    r.set(i, h, s, a, rng.gen_range(-scale..=scale));
                }
            }
        }
    }
    r
}

/// Outcome of brute-force vertex enumeration.
#[derive(Clone, Debug, PartialEq)]
pub enum VertexResult {
    Infeasible,
    Optimal(f64),
}

/// Solve `A x = b` for square `A` by Gaussian elimination with partial
/// pivoting; `None` when singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Minimize over all basic feasible points of a bounded LP.
pub fn vertex_enumeration(lp: &LinearProgram) -> VertexResult {
    let n = lp.num_vars();
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for c in lp.constraints() {
        planes.push((c.coeffs.clone(), c.rhs));
    }
    for (j, &(lo, hi)) in lp.bounds().iter().enumerate() {
        for v in [lo, hi] {
            if v.is_finite() {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                planes.push((e, v));
            }
        }
    }
    if planes.len() < n {
        return VertexResult::Infeasible;
    }
    let mut best: Option<f64> = None;
    let mut combo: Vec<usize> = (0..n).collect();
    loop {
        let a = combo.iter().map(|&k| planes[k].0.clone()).collect();
        let b = combo.iter().map(|&k| planes[k].1).collect();
        if let Some(x) = solve_square(a, b) {
            if lp.is_feasible_point(&x, 1e-9) {
                let v = lp.objective_value(&x);
                best = Some(best.map_or(v, |m: f64| m.min(v)));
            }
        }
        if !next_combination(&mut combo, planes.len()) {
            break;
        }
    }
    best.map_or(VertexResult::Infeasible, VertexResult::Optimal)
}

/// Random LP with a bounded feasible region: every variable is boxed, some
/// through bound pairs and the rest (declared free) through explicit rows.
pub fn random_bounded_lp(rng: &mut ChaCha8Rng) -> LinearProgram {
    let n = rng.gen_range(1..=6);
    let m = rng.gen_range(0..=8);
    let mut lp = LinearProgram::new(n);
    lp.set_objective((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
    for j in 0..n {
        let lo = rng.gen_range(-2.0..0.5);
        let hi = lo + rng.gen_range(0.5..3.0);
        match rng.gen_range(0..4) {
            0 => {
                lp.set_bounds(j, f64::NEG_INFINITY, f64::INFINITY);
                lp.add_sparse(&[(j, 1.0)], Relation::Le, hi);
                lp.add_sparse(&[(j, 1.0)], Relation::Ge, lo);
            }
            _ => lp.set_bounds(j, lo, hi),
        }
    }
    for _ in 0..m {
        let coeffs: Vec<f64> = (0..n)
            .map(|_| {
                if rng.gen::<f64>() < 0.25 {
                    0.0
                } else {
                    rng.gen_range(-1.0..1.0)
                }
            })
            .collect();
        let rel = match rng.gen_range(0..10) {
            0 | 1 => Relation::Eq,
            2..=5 => Relation::Ge,
            _ => Relation::Le,
        };
        let rhs = rng.gen_range(-1.0..1.0);
        lp.add_constraint(coeffs, rel, rhs);
    }
    lp
}
