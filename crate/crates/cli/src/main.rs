use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use strict_install::design::CostKind;
use strict_install::{Concept, DeviationClass};
use strict_install_cli::run::{execute, Command, JobSpec};

/// Decide, construct and verify reward functions that install a target
/// behavior as a strict equilibrium.
#[derive(Parser)]
#[command(name = "strict-install", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Stage-wise installability verdict with certificates.
    Check(Common),
    /// Explicit witness reward (ε-scaled when --epsilon or a restricted class is given).
    Witness(Common),
    /// Cost-optimal reward from the design LP, re-checked by the verifier.
    Design(Common),
    /// Strictness gaps of the policy under a given reward.
    Verify(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum ConceptArg {
    Ne,
    Ce,
    Cce,
}

#[derive(Clone, Copy, ValueEnum)]
enum CostArg {
    Online,
    Offline,
    #[value(alias = "social-welfare")]
    Social,
    Egalitarian,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Unrestricted,
    NeverTarget,
    NeverRecommended,
}

#[derive(Args)]
struct Common {
    /// Game document (JSON).
    #[arg(long)]
    game: PathBuf,
    /// Policy document (JSON).
    #[arg(long)]
    policy: PathBuf,
    /// Reward document to verify.
    #[arg(long)]
    reward: Option<PathBuf>,
    #[arg(long, value_enum)]
    concept: ConceptArg,
    /// Uniform margin ι of the design LP.
    #[arg(long)]
    slack: Option<f64>,
    /// Reward bound B.
    #[arg(long, default_value_t = 1.0)]
    bound: f64,
    /// Required dominance gap ε.
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    #[arg(long, value_enum, default_value = "unrestricted")]
    deviation_class: ClassArg,
    #[arg(long, value_enum, default_value = "social")]
    cost: CostArg,
    /// Reference reward for the online and offline costs.
    #[arg(long)]
    baseline: Option<PathBuf>,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Maximize the achievable slack instead of fixing it.
    #[arg(long)]
    max_gap: bool,
    /// Write the design LP in CPLEX LP format to this path.
    #[arg(long)]
    lp_dump: Option<PathBuf>,
}

fn job(command: Command, c: Common) -> JobSpec {
    let concept = match c.concept {
        ConceptArg::Ne => Concept::Ne,
        ConceptArg::Ce => Concept::Ce,
        ConceptArg::Cce => Concept::Cce,
    };
    let mut job = JobSpec::new(command, c.game, c.policy, concept);
    job.reward_path = c.reward;
    job.baseline_path = c.baseline;
    job.cost = match c.cost {
        CostArg::Online => CostKind::Online,
        CostArg::Offline => CostKind::Offline,
        CostArg::Social => CostKind::SocialWelfare,
        CostArg::Egalitarian => CostKind::Egalitarian,
    };
    job.slack = c.slack;
    job.bound = c.bound;
    job.epsilon = c.epsilon;
    job.deviation_class = match c.deviation_class {
        ClassArg::Unrestricted => DeviationClass::Unrestricted,
        ClassArg::NeverTarget => DeviationClass::NeverTarget,
        ClassArg::NeverRecommended => DeviationClass::NeverRecommended,
    };
    job.max_gap = c.max_gap;
    job.lp_dump = c.lp_dump;
    job.out = c.out;
    job
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let job = match cli.command {
        Cmd::Check(c) => job(Command::Check, c),
        Cmd::Witness(c) => job(Command::Witness, c),
        Cmd::Design(c) => job(Command::Design, c),
        Cmd::Verify(c) => job(Command::Verify, c),
    };
    ExitCode::from(execute(&job) as u8)
}
