//! Commands on an atomic system file: classification and the individual conditions.

use std::path::PathBuf;

use clap::Args;
use lindyn::classifier::{classify_inverse_pair, classify_with, default_wandering_set, ClassifyOptions};
use lindyn::conditions::{
    check_bounded_distortion, check_necessary_fh, check_sc, compute_dn, dn_ratio_violations, Distortion, NecessaryFh,
    ScFailure, ScVerdict,
};
use serde_json::{json, Value};

use super::{creal_json, line_bases, report_status, summability_json, Ctx};
use crate::error::CliError;
use crate::output::{Outcome, Status};
use crate::svg::{Chart, Series};

#[derive(Debug, Args)]
pub struct SystemArg {
    /// System description (JSON).
    #[arg(long, value_name = "FILE")]
    pub system: PathBuf,
}

#[derive(Debug, Args)]
pub struct WindowArgs {
    #[command(flatten)]
    pub system: SystemArg,
    /// Checked index window [-N, N]; defaults to the configured window.
    #[arg(long, value_name = "N")]
    pub window: Option<u64>,
    /// Wandering set as a JSON atom list (inline or file), e.g. '[{"orbit":0,"index":0}]'.
    #[arg(long, value_name = "ATOMS")]
    pub wandering: Option<String>,
}

pub fn classify(ctx: &mut Ctx, args: &WindowArgs) -> Result<Outcome, CliError> {
    let system = ctx.system(&args.system.system)?;
    let window = args.window.unwrap_or(ctx.defaults.classify_window);
    ctx.manifest.horizon("window", window);
    let wandering_set = args.wandering.as_deref().map(|w| ctx.atoms(w)).transpose()?;
    let report = classify_with(&system, &ClassifyOptions { wandering_set, window: Some(window) })?;
    let status = report_status(&report);
    Ok(Outcome::new(status, serde_json::to_value(&report).expect("report serializes")))
}

pub fn classify_pair(ctx: &mut Ctx, args: &SystemArg) -> Result<Outcome, CliError> {
    let system = ctx.system(&args.system)?;
    let pair = classify_inverse_pair(&system)?;
    let status = report_status(&pair.forward).max(report_status(&pair.inverse));
    let mut result = serde_json::to_value(&pair).expect("report serializes");
    let agree = |f: fn(&lindyn::classifier::ClassificationReport) -> &lindyn::classifier::Finding| {
        f(&pair.forward).verdict == f(&pair.inverse).verdict
    };
    result["frequently_hypercyclic_agree"] = json!(agree(|r| &r.frequently_hypercyclic));
    result["chaotic_agree"] = json!(agree(|r| &r.chaotic));
    Ok(Outcome::new(status, result))
}

pub fn sc(ctx: &mut Ctx, args: &SystemArg) -> Result<Outcome, CliError> {
    let system = ctx.system(&args.system)?;
    Ok(match check_sc(&system)? {
        ScVerdict::Holds { orbit_sums } => Outcome::new(
            Status::Decided,
            json!({"verdict": "holds", "orbit_sums": orbit_sums.iter().map(creal_json).collect::<Vec<_>>()}),
        ),
        ScVerdict::Fails { atom, reason } => {
            let reason = match reason {
                ScFailure::Conservative => "the atom lies on a cycle".to_string(),
                ScFailure::Divergent(w) => w.to_string(),
            };
            Outcome::new(Status::Decided, json!({"verdict": "fails", "atom": atom, "reason": reason}))
        }
        ScVerdict::Undecided(why) => Outcome::new(Status::Undecided, json!({"verdict": "undecided", "reason": why})),
    })
}

pub fn distortion(ctx: &mut Ctx, args: &WindowArgs) -> Result<Outcome, CliError> {
    let system = ctx.system(&args.system.system)?;
    let window = args.window.unwrap_or(ctx.defaults.window);
    ctx.manifest.horizon("window", window);
    let w = match &args.wandering {
        Some(a) => ctx.atoms(a)?,
        None => line_bases(&system),
    };
    let cert = check_bounded_distortion(&system, &w, window)?;
    let (status, verdict) = match cert.verdict {
        Distortion::Bounded { k, exact } => {
            (Status::Decided, json!({"verdict": "bounded", "k": creal_json(&k), "supremum_exact": exact}))
        }
        Distortion::Unbounded { witness_n, lower_bound } => (
            Status::Decided,
            json!({"verdict": "unbounded", "witness_n": witness_n, "lower_bound": creal_json(&lower_bound)}),
        ),
        Distortion::Undecided(why) => (Status::Undecided, json!({"verdict": "undecided", "reason": why})),
    };
    let mut result = verdict;
    result["wandering_set"] = json!(cert.w);
    Ok(Outcome::new(status, result))
}

pub fn dn(ctx: &mut Ctx, args: &WindowArgs) -> Result<Outcome, CliError> {
    let system = ctx.system(&args.system.system)?;
    let window = args.window.unwrap_or(ctx.defaults.window);
    ctx.manifest.horizon("window", window);
    let w = match &args.wandering {
        Some(a) => ctx.atoms(a)?,
        None => default_wandering_set(&system)
            .ok_or_else(|| CliError::Usage("the system has no line, so no wandering set; pass --wandering".into()))?,
    };
    let seq = compute_dn(&system, &w, window)?;
    let (status, necessary) = match check_necessary_fh(&seq) {
        NecessaryFh::Passes { total } => (Status::Decided, json!({"verdict": "passes", "total": creal_json(&total)})),
        NecessaryFh::FailsNecessary(witness) => {
            (Status::Decided, json!({"verdict": "fails_necessary", "witness": witness.to_string()}))
        }
        NecessaryFh::Undecided(why) => (Status::Undecided, json!({"verdict": "undecided", "reason": why})),
    };
    let result = json!({
        "wandering_set": seq.wandering_set,
        "window": seq.window,
        "forward_only": seq.forward_only,
        "star_constant": seq.star_c.as_ref().map(creal_json).unwrap_or(Value::Null),
        "d_0": seq.get(0).map(creal_json).unwrap_or(Value::Null),
        "tail_above_window": summability_json(&seq.tails[0]),
        "tail_below_window": summability_json(&seq.tails[1]),
        "ratio_violations": dn_ratio_violations(&seq),
        "necessary_condition": necessary,
    });
    let points = seq.values.iter().map(|(n, d)| (*n as f64, d.to_f64().log10())).collect();
    let chart = Chart {
        title: "d_n(W)".into(),
        x_label: "n".into(),
        y_label: "log10 d_n".into(),
        series: vec![Series { label: "d_n".into(), points }],
    };
    Ok(Outcome::new(status, result).with_csv(seq.to_csv()).with_svg(chart.render()))
}
