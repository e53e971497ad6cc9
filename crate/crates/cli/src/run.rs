//! Job execution and report documents.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use strict_install::design::{build_mg_lp, design, design_max_gap, CostKind, CostSpec, DesignConfig, Problem};
use strict_install::installability::{check_markov, Certificate, PlayerWitness};
use strict_install::verify::{check_strict, evaluate_cost, Deviation, GapEntry, GapReport};
use strict_install::witness::{markov_epsilon_witness, markov_witness, EpsilonConfig};
use strict_install::{Concept, DeviationClass, Error, MarkovGameSkeleton, MarkovPolicy, RewardFunction};

use crate::docs::{read_doc, CliError, GameDoc, LoadedGame, PolicyDoc, RewardDoc};

/// Tolerance for the design-then-verify round trip.
pub const VERIFY_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Check,
    Witness,
    Design,
    Verify,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Witness => "witness",
            Command::Design => "design",
            Command::Verify => "verify",
        }
    }
}

/// One fully resolved invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct JobSpec {
    pub command: Command,
    pub game_path: PathBuf,
    pub policy_path: PathBuf,
    pub reward_path: Option<PathBuf>,
    pub baseline_path: Option<PathBuf>,
    pub concept: Concept,
    pub cost: CostKind,
    pub slack: Option<f64>,
    pub bound: f64,
    pub epsilon: f64,
    pub deviation_class: DeviationClass,
    pub max_gap: bool,
    pub lp_dump: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl JobSpec {
    pub fn new(command: Command, game_path: PathBuf, policy_path: PathBuf, concept: Concept) -> Self {
        JobSpec {
            command,
            game_path,
            policy_path,
            reward_path: None,
            baseline_path: None,
            concept,
            cost: CostKind::SocialWelfare,
            slack: None,
            bound: 1.0,
            epsilon: 0.0,
            deviation_class: DeviationClass::Unrestricted,
            max_gap: false,
            lp_dump: None,
            out: None,
        }
    }

    /// Per-command required fields and numeric ranges.
    pub fn validate(&self) -> Result<(), CliError> {
        if !self.bound.is_finite() || self.bound <= 0.0 {
            return Err(CliError::usage(format!("--bound must be finite and > 0, got {}", self.bound)));
        }
        if !self.epsilon.is_finite() || self.epsilon < 0.0 {
            return Err(CliError::usage(format!("--epsilon must be finite and >= 0, got {}", self.epsilon)));
        }
        if let Some(s) = self.slack {
            if !s.is_finite() || s <= 0.0 {
                return Err(CliError::usage(format!("--slack must be finite and > 0, got {s}")));
            }
        }
        match self.command {
            Command::Verify if self.reward_path.is_none() => {
                Err(CliError::usage("verify needs --reward"))
            }
            Command::Design if self.max_gap && self.slack.is_some() => {
                Err(CliError::usage("--max-gap and --slack are mutually exclusive"))
            }
            Command::Design if self.max_gap && self.lp_dump.is_some() => {
                Err(CliError::usage("--lp-dump needs a fixed --slack"))
            }
            Command::Design if !self.max_gap && self.slack.is_none() => {
                Err(CliError::usage("design needs --slack or --max-gap"))
            }
            _ => Ok(()),
        }
    }

    fn config(&self) -> Value {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        json!({
            "command": self.command.as_str(),
            "game": self.game_path.display().to_string(),
            "policy": self.policy_path.display().to_string(),
            "reward": path(&self.reward_path),
            "baseline": path(&self.baseline_path),
            "concept": self.concept.as_str(),
            "cost": self.cost.as_str(),
            "slack": self.slack,
            "bound": self.bound,
            "epsilon": self.epsilon,
            "deviation_class": self.deviation_class.as_str(),
            "max_gap": self.max_gap,
            "lp_dump": path(&self.lp_dump),
        })
    }
}

/// Verdict of a completed job; maps to exit codes 0 and 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Positive,
    Negative,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Positive => 0,
            Outcome::Negative => 1,
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Positive
        } else {
            Outcome::Negative
        }
    }
}

/// Exit code for errors that stop a job before any verdict.
pub const INPUT_ERROR_EXIT: i32 = 2;

#[derive(Serialize)]
struct Report<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: Value,
    verdict: &'a str,
    exit_code: i32,
    result: Value,
}

fn f64_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn deviation_json(d: &Deviation) -> Value {
    match d {
        Deviation::Play { action } => json!({"kind": "play", "action": action}),
        Deviation::Swap { recommended, played } => {
            json!({"kind": "swap", "recommended": recommended, "played": played})
        }
        Deviation::MixtureTowardTarget => json!({"kind": "mixture-toward-target"}),
    }
}

fn entry_json(e: &GapEntry) -> Value {
    json!({
        "player": e.player,
        "stage": e.stage,
        "state": e.state,
        "deviation": deviation_json(&e.deviation),
        "gap": e.gap,
    })
}

/// JSON form of a gap report; an infinite minimum (no deviations) is `null`.
pub fn gap_report_json(r: &GapReport) -> Value {
    json!({
        "concept": r.concept.as_str(),
        "deviation_class": r.class.as_str(),
        "epsilon": r.epsilon,
        "min_gap": f64_or_null(r.min_gap),
        "strict": r.strict,
        "argmin": r.argmin.as_ref().map(entry_json),
        "per_constraint": r.per_constraint.iter().map(entry_json).collect::<Vec<_>>(),
    })
}

fn certificate_json(c: &Certificate) -> Value {
    match c {
        Certificate::PureProfile(actions) => json!({"kind": "pure-profile", "actions": actions}),
        Certificate::DistinctConditionals => json!({"kind": "distinct-conditionals"}),
        Certificate::PlayerWitnesses(ws) => {
            let players: Vec<Value> = ws
                .iter()
                .map(|w| match w {
                    PlayerWitness::SingleSupport { action } => {
                        json!({"kind": "single-support", "action": action})
                    }
                    PlayerWitness::DistinguishingPair { j, k } => {
                        json!({"kind": "distinguishing-pair", "j": j, "k": k})
                    }
                })
                .collect();
            json!({"kind": "player-witnesses", "players": players})
        }
        Certificate::NoUnitMassAction { player } => {
            json!({"kind": "no-unit-mass-action", "player": player})
        }
        Certificate::CoincidingConditionals { player, j, k } => {
            json!({"kind": "coinciding-conditionals", "player": player, "j": j, "k": k})
        }
    }
}

fn error_json(e: &CliError) -> Value {
    json!({"code": e.code, "path": e.path, "message": e.message})
}

/// Errors that are a negative answer rather than bad input.
fn is_verdict_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Infeasible { .. } | Error::StageNotInstallable { .. } | Error::EpsilonTooLarge { .. }
    )
}

struct Inputs {
    loaded: LoadedGame,
    policy: MarkovPolicy,
}

fn load_inputs(job: &JobSpec) -> Result<Inputs, CliError> {
    let game_doc: GameDoc = read_doc(&job.game_path)?;
    let loaded = game_doc.load().map_err(|e| in_file(&job.game_path, e))?;
    let policy_doc: PolicyDoc = read_doc(&job.policy_path)?;
    let policy = policy_doc
        .load(&loaded.game)
        .map_err(|e| in_file(&job.policy_path, e))?;
    Ok(Inputs { loaded, policy })
}

fn load_reward_doc(path: &Path) -> Result<RewardDoc, CliError> {
    read_doc(path)
}

fn in_file(path: &Path, e: CliError) -> CliError {
    let file = path.display().to_string();
    CliError {
        path: Some(match e.path {
            Some(p) => format!("{file}:{p}"),
            None => file,
        }),
        ..e
    }
}

/// Run a job, returning the report document and its verdict. Input and
/// usage problems come back as `Err` (exit code 2).
pub fn run(job: &JobSpec) -> Result<(Value, Outcome), CliError> {
    job.validate()?;
    let inputs = load_inputs(job)?;
    let game = &inputs.loaded.game;
    let policy = &inputs.policy;
    let (result, outcome) = match job.command {
        Command::Check => run_check(job, game, policy)?,
        Command::Witness => run_witness(job, game, policy)?,
        Command::Design => run_design(job, game, policy)?,
        Command::Verify => run_verify(job, game, policy)?,
    };
    let verdict = match (job.command, outcome) {
        (Command::Check | Command::Witness, Outcome::Positive) => "installable",
        (Command::Check | Command::Witness, Outcome::Negative) => "not-installable",
        (Command::Design, Outcome::Positive) => "feasible",
        (Command::Design, Outcome::Negative) => "infeasible",
        (Command::Verify, Outcome::Positive) => "strict",
        (Command::Verify, Outcome::Negative) => "not-strict",
    };
    let report = Report {
        tool: "strict-install",
        version: env!("CARGO_PKG_VERSION"),
        command: job.command.as_str(),
        config: job.config(),
        verdict,
        exit_code: outcome.exit_code(),
        result,
    };
    let value = serde_json::to_value(&report)
        .map_err(|e| CliError::new("E_INTERNAL", format!("report serialization failed: {e}")))?;
    Ok((value, outcome))
}

type Step = Result<(Value, Outcome), CliError>;

fn negative_or_input_error(e: Error) -> Step {
    if is_verdict_error(&e) {
        let err = CliError::from(e);
        Ok((json!({"error": error_json(&err)}), Outcome::Negative))
    } else {
        Err(e.into())
    }
}

fn run_check(job: &JobSpec, game: &MarkovGameSkeleton, policy: &MarkovPolicy) -> Step {
    let rep = check_markov(policy, game, job.concept)?;
    let stages: Vec<Value> = rep
        .stages
        .iter()
        .map(|s| {
            json!({
                "stage": s.stage,
                "state": s.state,
                "installable": s.report.is_installable(),
                "note": s.report.note(),
                "certificate": certificate_json(&s.report.certificate),
            })
        })
        .collect();
    let failing: Vec<Value> = rep
        .failing_stages()
        .iter()
        .map(|&(h, s)| json!({"stage": h, "state": s}))
        .collect();
    let result = json!({
        "concept": rep.concept.as_str(),
        "installable": rep.is_installable(),
        "failing_stages": failing,
        "stages": stages,
    });
    Ok((result, Outcome::from_bool(rep.is_installable())))
}

fn run_witness(job: &JobSpec, game: &MarkovGameSkeleton, policy: &MarkovPolicy) -> Step {
    let built = if job.epsilon > 0.0 || job.deviation_class != DeviationClass::Unrestricted {
        EpsilonConfig::new(job.epsilon, job.bound, job.deviation_class)
            .and_then(|cfg| markov_epsilon_witness(policy, game, &cfg, job.concept))
    } else {
        markov_witness(policy, game, job.bound, job.concept)
    };
    let reward = match built {
        Ok(r) => r,
        Err(e) => return negative_or_input_error(e),
    };
    let gaps = check_strict(game, reward.table(), policy, job.concept, job.deviation_class, job.epsilon)?;
    let result = json!({
        "reward": RewardDoc::from_reward(&reward),
        "gap_report": gap_report_json(&gaps),
    });
    Ok((result, Outcome::from_bool(gaps.strict)))
}

fn run_design(job: &JobSpec, game: &MarkovGameSkeleton, policy: &MarkovPolicy) -> Step {
    let mut cost = CostSpec::new(job.cost);
    if let Some(path) = &job.baseline_path {
        let doc = load_reward_doc(path)?;
        let table = doc.load_table(game).map_err(|e| in_file(path, e))?;
        cost = CostSpec::with_baseline(job.cost, table);
    }
    let problem = Problem::Markov { game, policy };
    let built = match job.slack {
        Some(slack) => {
            let cfg = DesignConfig::new(slack, job.bound, job.concept)?;
            if let Some(dump) = &job.lp_dump {
                let dlp = build_mg_lp(game, policy, &cost, &cfg)?;
                fs::write(dump, dlp.lp.to_lp_format()).map_err(|e| {
                    CliError::at("E_IO", dump.display().to_string(), format!("cannot write LP dump: {e}"))
                })?;
            }
            design(problem, &cost, &cfg)
        }
        None => design_max_gap(problem, job.bound, job.concept),
    };
    let d = match built {
        Ok(d) => d,
        Err(e) => return negative_or_input_error(e),
    };
    let gaps = check_strict(game, d.reward.table(), policy, job.concept, DeviationClass::Unrestricted, 0.0)?;
    let verified = gaps.min_gap >= d.slack - VERIFY_TOL;
    let cost_value = if job.max_gap {
        Value::Null
    } else {
        json!(evaluate_cost(game, policy, d.reward.table(), &cost)?)
    };
    let result = json!({
        "reward": RewardDoc::from_reward(&d.reward),
        "objective": d.objective,
        "recomputed_cost": cost_value,
        "slack": d.slack,
        "lp_size": {"variables": d.num_vars, "constraints": d.num_constraints},
        "verified": verified,
        "gap_report": gap_report_json(&gaps),
    });
    let ok = verified && d.slack > 0.0;
    Ok((result, Outcome::from_bool(ok)))
}

fn run_verify(job: &JobSpec, game: &MarkovGameSkeleton, policy: &MarkovPolicy) -> Step {
    let path = job.reward_path.as_ref().expect("validated");
    let doc = load_reward_doc(path)?;
    let table = match doc.bound {
        Some(_) => doc.load(game).map(RewardFunction::into_table),
        None => doc.load_table(game),
    }
    .map_err(|e| in_file(path, e))?;
    let gaps = check_strict(game, &table, policy, job.concept, job.deviation_class, job.epsilon)?;
    Ok((json!({"gap_report": gap_report_json(&gaps)}), Outcome::from_bool(gaps.strict)))
}

/// Render a report as deterministic pretty-printed JSON with a trailing
/// newline.
pub fn render(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Run a job end to end: write the report to `--out` or stdout and return
/// the process exit code. Input errors go to stderr.
pub fn execute(job: &JobSpec) -> i32 {
    match run(job) {
        Ok((report, outcome)) => {
            let text = render(&report);
            let written = match &job.out {
                Some(p) => fs::write(p, &text).map_err(|e| {
                    CliError::at("E_IO", p.display().to_string(), format!("cannot write report: {e}"))
                }),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match written {
                Ok(()) => outcome.exit_code(),
                Err(e) => {
                    eprintln!("{e}");
                    INPUT_ERROR_EXIT
                }
            }
        }
        Err(e) => {
            eprintln!("{e}");
            INPUT_ERROR_EXIT
        }
    }
}
