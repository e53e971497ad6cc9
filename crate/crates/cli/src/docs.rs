//! Document schemas and loaders.
//!
//! Joint actions are indexed row-major over per-player action indices, player
//! 0 most significant. Nested arrays follow the same order as the library
//! tables: `transitions[h][s][a][s']`, `stages[h][s][a]`,
//! `rewards[i][h][s][a]`.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use strict_install::game::sanitize_distribution;
use strict_install::{
    ActionShape, Error, JointMixedStrategy, MarkovGameSkeleton, MarkovPolicy, RewardFunction,
    RewardTable,
};

type Tensor3 = Vec<Vec<Vec<f64>>>;
type Tensor4 = Vec<Vec<Vec<Vec<f64>>>>;

/// A load or run failure with a stable code and, where known, the document
/// field it concerns.
#[derive(Clone, Debug, PartialEq)]
pub struct CliError {
    pub code: &'static str,
    pub path: Option<String>,
    pub message: String,
}

impl CliError {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        CliError {
            code,
            path: None,
            message: message.into(),
        }
    }

    pub fn at(code: &'static str, path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError {
            code,
            path: Some(path.into()),
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        CliError::new("E_USAGE", message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let path = match &e {
            Error::Distribution { context, .. } => Some(context.clone()),
            Error::StageNotInstallable { stage, state, .. } => Some(format!("stages[{stage}][{state}]")),
            _ => None,
        };
        CliError {
            code: e.code(),
            path,
            message: e.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.path {
            Some(p) => write!(f, "error[{}] at {p}: {}", self.code, self.message),
            None => write!(f, "error[{}]: {}", self.code, self.message),
        }
    }
}

impl std::error::Error for CliError {}

fn prefixed(file: &str, e: CliError) -> CliError {
    CliError {
        path: Some(match e.path {
            Some(p) => format!("{file}:{p}"),
            None => file.to_string(),
        }),
        ..e
    }
}

/// Read and parse a JSON document; malformed input reports the JSON path.
pub fn read_doc<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let file = path.display().to_string();
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::at("E_IO", &file, format!("cannot read file: {e}")))?;
    parse_doc(&text).map_err(|e| prefixed(&file, e))
}

pub fn parse_doc<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::at("E_PARSE", path, inner.to_string())
    })
}

fn check_len(path: &str, len: usize, expected: usize) -> Result<(), CliError> {
    if len != expected {
        return Err(CliError::at(
            "E_SHAPE",
            path,
            format!("has {len} entries, expected {expected}"),
        ));
    }
    Ok(())
}

/// Flatten `t[i][h][s][a]` after checking every dimension.
fn flatten4(name: &str, t: &Tensor4, dims: [usize; 4]) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::with_capacity(dims.iter().product());
    check_len(name, t.len(), dims[0])?;
    for (i, a) in t.iter().enumerate() {
        check_len(&format!("{name}[{i}]"), a.len(), dims[1])?;
        for (h, b) in a.iter().enumerate() {
            check_len(&format!("{name}[{i}][{h}]"), b.len(), dims[2])?;
            for (s, c) in b.iter().enumerate() {
                check_len(&format!("{name}[{i}][{h}][{s}]"), c.len(), dims[3])?;
                out.extend_from_slice(c);
            }
        }
    }
    Ok(out)
}

fn nest4(table: &RewardTable) -> Tensor4 {
    (0..table.num_players())
        .map(|i| {
            (0..table.horizon())
                .map(|h| {
                    (0..table.num_states())
                        .map(|s| (0..table.num_joint()).map(|a| table.get(i, h, s, a)).collect())
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Game document. Omitting `states`, `horizon`, `transitions` and
/// `initial_dist` together gives the normal-form shorthand (one state, one
/// stage).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameDoc {
    pub players: usize,
    pub actions: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transitions: Option<Tensor4>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_dist: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline_reward: Option<Tensor4>,
}

/// A validated game with its action names.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadedGame {
    pub game: MarkovGameSkeleton,
    pub action_names: Vec<Vec<String>>,
}

impl GameDoc {
    pub fn load(&self) -> Result<LoadedGame, CliError> {
        check_len("actions", self.actions.len(), self.players)?;
        for (i, names) in self.actions.iter().enumerate() {
            if names.is_empty() {
                return Err(CliError::at("E_SHAPE", format!("actions[{i}]"), "player has no actions"));
            }
        }
        let shape = ActionShape::new(self.actions.iter().map(Vec::len).collect())
            .map_err(|e| CliError::at(e.code(), "actions", e.to_string()))?;
        let na = shape.num_joint();
        let game = match (&self.states, &self.horizon, &self.transitions, &self.initial_dist) {
            (None, None, None, None) => MarkovGameSkeleton::single_stage(shape),
            (Some(ns), Some(horizon), Some(trans), Some(init)) => {
                let (ns, horizon) = (*ns, *horizon);
                let flat = flatten4("transitions", trans, [horizon, ns, na, ns])?;
                MarkovGameSkeleton::new(shape, ns, horizon, flat, init.clone())?
            }
            _ => {
                return Err(CliError::at(
                    "E_SHAPE",
                    "states",
                    "states, horizon, transitions and initial_dist must be given together",
                ))
            }
        };
        let game = match &self.baseline_reward {
            None => game,
            Some(r) => {
                let dims = [game.num_players(), game.horizon(), game.num_states(), na];
                let flat = flatten4("baseline_reward", r, dims)?;
                let table = RewardTable::from_flat(dims[0], dims[1], dims[2], dims[3], flat)
                    .map_err(|e| CliError::at(e.code(), "baseline_reward", e.to_string()))?;
                game.with_baseline(table)?
            }
        };
        Ok(LoadedGame {
            game,
            action_names: self.actions.clone(),
        })
    }

    /// Full (non-shorthand) document for a loaded game.
    pub fn from_game(loaded: &LoadedGame) -> Self {
        let g = &loaded.game;
        let (ns, horizon, na) = (g.num_states(), g.horizon(), g.num_joint());
        let transitions = (0..horizon)
            .map(|h| {
                (0..ns)
                    .map(|s| (0..na).map(|a| g.transition_row(h, s, a).to_vec()).collect())
                    .collect()
            })
            .collect();
        GameDoc {
            players: g.num_players(),
            actions: loaded.action_names.clone(),
            states: Some(ns),
            horizon: Some(horizon),
            transitions: Some(transitions),
            initial_dist: Some(g.initial_dist().to_vec()),
            baseline_reward: g.baseline().map(nest4),
        }
    }
}

/// Policy document: either per-stage distributions or a single `strategy`
/// used at every stage and state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stages: Option<Tensor3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<Vec<f64>>,
    #[serde(default)]
    pub product: bool,
}

fn stage_strategy(shape: &ActionShape, probs: &[f64], path: &str) -> Result<JointMixedStrategy, CliError> {
    check_len(path, probs.len(), shape.num_joint())?;
    let mut probs = probs.to_vec();
    sanitize_distribution(&mut probs, path)?;
    Ok(JointMixedStrategy::new(shape.clone(), probs)?)
}

impl PolicyDoc {
    pub fn load(&self, game: &MarkovGameSkeleton) -> Result<MarkovPolicy, CliError> {
        let (ns, horizon) = (game.num_states(), game.horizon());
        let stages = match (&self.stages, &self.strategy) {
            (Some(pi), None) => {
                check_len("stages", pi.len(), horizon)?;
                let mut out = Vec::with_capacity(horizon * ns);
                for (h, row) in pi.iter().enumerate() {
                    check_len(&format!("stages[{h}]"), row.len(), ns)?;
                    for (s, probs) in row.iter().enumerate() {
                        out.push(stage_strategy(game.shape(), probs, &format!("stages[{h}][{s}]"))?);
                    }
                }
                out
            }
            (None, Some(probs)) => {
                let sigma = stage_strategy(game.shape(), probs, "strategy")?;
                vec![sigma; horizon * ns]
            }
            _ => {
                return Err(CliError::at(
                    "E_SHAPE",
                    "stages",
                    "exactly one of stages and strategy must be given",
                ))
            }
        };
        MarkovPolicy::new(horizon, ns, stages, self.product).map_err(|e| {
            let path = if self.stages.is_some() { "stages" } else { "strategy" };
            CliError::at(e.code(), path, e.to_string())
        })
    }

    pub fn from_policy(policy: &MarkovPolicy) -> Self {
        let stages = (0..policy.horizon())
            .map(|h| {
                (0..policy.num_states())
                    .map(|s| policy.stage(h, s).probs().to_vec())
                    .collect()
            })
            .collect();
        PolicyDoc {
            stages: Some(stages),
            strategy: None,
            product: policy.is_product(),
        }
    }
}

/// Reward document `rewards[i][h][s][a]` with its bound `B`. The bound may be
/// omitted for baselines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    pub rewards: Tensor4,
}

impl RewardDoc {
    pub fn load_table(&self, game: &MarkovGameSkeleton) -> Result<RewardTable, CliError> {
        let dims = [game.num_players(), game.horizon(), game.num_states(), game.num_joint()];
        let flat = flatten4("rewards", &self.rewards, dims)?;
        RewardTable::from_flat(dims[0], dims[1], dims[2], dims[3], flat)
            .map_err(|e| CliError::at(e.code(), "rewards", e.to_string()))
    }

    pub fn load(&self, game: &MarkovGameSkeleton) -> Result<RewardFunction, CliError> {
        let bound = self
            .bound
            .ok_or_else(|| CliError::at("E_PARSE", "bound", "missing field `bound`"))?;
        RewardFunction::new(self.load_table(game)?, bound)
            .map_err(|e| CliError::at(e.code(), "rewards", e.to_string()))
    }

    pub fn from_reward(reward: &RewardFunction) -> Self {
        RewardDoc {
            bound: Some(reward.bound()),
            rewards: nest4(reward.table()),
        }
    }
}
