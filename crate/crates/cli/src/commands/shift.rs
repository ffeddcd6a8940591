//! `shift`: weighted backward shifts through their composition-operator model.

use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use lindyn::io::system_to_json;
use lindyn::shift_bridge::{classify_shift, shift_to_system, system_to_shift, ShiftMode, ShiftWeights};
use lindyn::weight_profile::BaseSequence;
use serde_json::json;

use super::{rat_json, rational, report_status, Ctx};
use crate::error::CliError;
use crate::output::{Outcome, Status};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    /// On ℓ_p(N).
    Unilateral,
    /// On ℓ_p(Z).
    Bilateral,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Const,
    Periodic,
    Split,
}

#[derive(Debug, Args)]
pub struct WeightArgs {
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Constant weight (family const).
    #[arg(long)]
    pub value: Option<String>,
    /// Comma-separated period (family periodic).
    #[arg(long, value_delimiter = ',')]
    pub values: Vec<String>,
    /// Comma-separated weights w_0, w_1, ... (family split).
    #[arg(long, value_delimiter = ',')]
    pub head: Vec<String>,
    /// Weight beyond the head (family split).
    #[arg(long)]
    pub tail: Option<String>,
    /// Weight at negative indices (family split).
    #[arg(long)]
    pub negative: Option<String>,
    /// Exponent p >= 1.
    #[arg(long, default_value = "1")]
    pub p: String,
}

impl WeightArgs {
    fn weights(&self) -> Result<ShiftWeights, CliError> {
        let need = |v: &Option<String>, flag: &str| -> Result<lindyn::Rational, CliError> {
            rational(v.as_deref().ok_or_else(|| CliError::Usage(format!("this family needs --{flag}")))?)
        };
        let list = |v: &[String], flag: &str| -> Result<Vec<lindyn::Rational>, CliError> {
            if v.is_empty() && flag == "values" {
                return Err(CliError::Usage("family periodic needs --values".into()));
            }
            v.iter().map(|s| rational(s)).collect()
        };
        let base = match self.family {
            FamilyArg::Const => BaseSequence::Const(need(&self.value, "value")?),
            FamilyArg::Periodic => BaseSequence::Periodic(list(&self.values, "values")?),
            FamilyArg::Split => BaseSequence::Split {
                head: list(&self.head, "head")?,
                tail: need(&self.tail, "tail")?,
                negative: match self.mode {
                    ModeArg::Bilateral => need(&self.negative, "negative")?,
                    ModeArg::Unilateral => self.negative.as_deref().map(rational).transpose()?.unwrap_or_else(|| lindyn::Rational::from_integer(1.into())),
                },
            },
        };
        let mode = match self.mode {
            ModeArg::Unilateral => ShiftMode::Unilateral,
            ModeArg::Bilateral => ShiftMode::Bilateral,
        };
        Ok(ShiftWeights::new(mode, base)?)
    }
}

#[derive(Debug, Subcommand)]
pub enum ShiftCmd {
    /// Chaos and frequent hypercyclicity of the shift.
    Classify(WeightArgs),
    /// The equivalent system description.
    System(WeightArgs),
    /// Shift weights of a single-orbit system.
    FromSystem {
        #[arg(long, value_name = "FILE")]
        system: PathBuf,
    },
}

pub fn run(ctx: &mut Ctx, cmd: &ShiftCmd) -> Result<Outcome, CliError> {
    match cmd {
        ShiftCmd::Classify(args) => {
            let report = classify_shift(&args.weights()?, &rational(&args.p)?)?;
            let status = report_status(&report.classification);
            Ok(Outcome::new(status, serde_json::to_value(&report).expect("report serializes")))
        }
        ShiftCmd::System(args) => {
            let system = shift_to_system(&args.weights()?, &rational(&args.p)?)?;
            Ok(Outcome::new(Status::Decided, json!({"system": system_to_json(&system)?})))
        }
        ShiftCmd::FromSystem { system } => {
            let system = ctx.system(system)?;
            let w = system_to_shift(&system)?;
            let from = if w.mode == ShiftMode::Bilateral { -4 } else { 0 };
            let weights: Vec<_> = (from..8).map(|i| json!({"i": i, "w": rat_json(&w.at(i))})).collect();
            Ok(Outcome::new(Status::Decided, json!({"mode": w.mode, "weights": weights})))
        }
    }
}
