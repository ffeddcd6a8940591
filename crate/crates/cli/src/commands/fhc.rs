//! `construct-fhc` and `density`: frequently hypercyclic vector candidates
//! and hitting statistics.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use lindyn::certified::{rational_from_f64, rational_to_f64};
use lindyn::classifier::default_wandering_set;
use lindyn::fhc::{
    construct_fh_vector, converse_status, empirical_fh_check, schedule_frequencies, with_designed, ConverseStatus,
    DenseFamily,
};
use lindyn::io::vector_to_json;
use lindyn::operator::{hitting_density_auto, DensityMode};
use serde_json::json;

use super::{rat_json, rational, Ctx};
use crate::error::CliError;
use crate::output::{Outcome, Status};
use crate::svg::{Chart, Series};

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// System description (JSON).
    #[arg(long, value_name = "FILE")]
    pub system: PathBuf,
    /// Number of dense-family targets.
    #[arg(long, value_name = "K")]
    pub slots: Option<u32>,
    /// Horizon N: the series is truncated past N and statistics run to N.
    #[arg(long, value_name = "N")]
    pub horizon: Option<u64>,
    /// Threshold for the per-slot hitting densities.
    #[arg(long, value_name = "EPS")]
    pub eps: Option<String>,
    /// Skip the empirical density check.
    #[arg(long)]
    pub no_check: bool,
}

pub fn construct(ctx: &mut Ctx, args: &ConstructArgs) -> Result<Outcome, CliError> {
    let system = ctx.system(&args.system)?;
    let slots = args.slots.unwrap_or(ctx.defaults.fhc_slots);
    if slots == 0 {
        return Err(CliError::Usage("--slots must be at least 1".into()));
    }
    let horizon = args.horizon.unwrap_or(ctx.defaults.horizon);
    let eps = match &args.eps {
        Some(e) => rational_to_f64(&rational(e)?),
        None => ctx.defaults.fhc_eps,
    };
    let window = ctx.defaults.density_window;
    ctx.manifest.horizon("horizon", horizon);
    ctx.manifest.horizon("truncation", horizon + window);
    ctx.manifest.tolerance("eps", eps);

    let schedule = schedule_frequencies(slots);
    let schedule_check = schedule.verify(horizon);
    let family = DenseFamily::new(&system)?;
    let x = construct_fh_vector(&system, &family, &schedule, horizon + window)?;
    let designed: Vec<_> = (1..=slots).map(|k| rat_json(&schedule.density(k))).collect();
    let converse = match converse_status(&system) {
        ConverseStatus::Proven => "proven",
        ConverseStatus::Open => "open for 1 <= p < 2",
    };
    let mut result = json!({
        "slots": slots,
        "stretch": schedule.stretch,
        "designed_densities": designed,
        "schedule_check": schedule_check,
        "truncation": x.truncation,
        "support": x.vector.len(),
        "tail_bound": rat_json(&x.tail_bound),
        "collisions": x.collisions,
        "predicted_collisions": x.predicted_collisions,
        "converse": converse,
        "targets": x.targets.iter().map(vector_to_json).collect::<Vec<_>>(),
    });
    let mut csv = String::from("slot,designed,lower_estimate,final_density\n");
    if !args.no_check {
        let w = default_wandering_set(&system).ok_or_else(|| CliError::Usage("the system has no line".into()))?;
        let report = with_designed(
            empirical_fh_check(&system, &x, &w, eps, horizon, ctx.defaults.samples, window)?,
            &schedule,
        );
        for s in &report.slots {
            csv.push_str(&format!("{},{:.9},{:.9},{:.9}\n", s.slot, s.designed, s.lower_estimate, s.final_density));
        }
        result["empirical"] = serde_json::to_value(&report).expect("report serializes");
    }
    result["vector"] = vector_to_json(&x.vector);
    Ok(Outcome::new(Status::Decided, result).with_csv(csv))
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Fast,
    Exact,
    Auto,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    /// System description (JSON).
    #[arg(long, value_name = "FILE")]
    pub system: PathBuf,
    /// Starting vector: JSON literal, file, or a construct-fhc report.
    #[arg(long, value_name = "VECTOR")]
    pub vector: String,
    /// Target vector: JSON literal or file.
    #[arg(long, value_name = "VECTOR")]
    pub target: String,
    /// Thresholds (repeatable); defaults to the configured ladder.
    #[arg(long, value_name = "EPS")]
    pub eps: Vec<String>,
    #[arg(long, value_name = "N")]
    pub horizon: Option<u64>,
    #[arg(long, value_enum, default_value = "auto")]
    pub mode: ModeArg,
    /// CSV row spacing in M.
    #[arg(long, value_name = "M")]
    pub step: Option<u64>,
}

pub fn density(ctx: &mut Ctx, args: &DensityArgs) -> Result<Outcome, CliError> {
    let system = ctx.system(&args.system)?;
    let phi = ctx.vector(&args.vector)?;
    let target = ctx.vector(&args.target)?;
    let horizon = args.horizon.unwrap_or(ctx.defaults.horizon);
    let step = args.step.unwrap_or(ctx.defaults.csv_step);
    let ladder = if args.eps.is_empty() {
        ctx.defaults
            .eps_ladder
            .iter()
            .map(|e| rational_from_f64(*e).ok_or_else(|| CliError::Config(format!("eps {e} is not finite"))))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        args.eps.iter().map(|e| rational(e)).collect::<Result<Vec<_>, _>>()?
    };
    if ladder.iter().any(|e| *e <= lindyn::Rational::from_integer(0.into())) {
        return Err(CliError::Usage("--eps must be positive".into()));
    }
    let mode = match args.mode {
        ModeArg::Fast => DensityMode::Fast,
        ModeArg::Exact => DensityMode::Exact,
        ModeArg::Auto => DensityMode::Auto,
    };
    ctx.manifest.horizon("horizon", horizon);
    ctx.manifest.tolerance("eps", ladder.iter().map(lindyn::certified::format_rational).collect::<Vec<_>>().join(","));
    ctx.manifest.tolerance("mode", format!("{:?}", args.mode).to_lowercase());

    let mut curves = Vec::new();
    let mut csv = String::from("eps,M,count,density\n");
    let mut series = Vec::new();
    let mut status = Status::Decided;
    for eps in &ladder {
        let curve = hitting_density_auto(&system, &phi, &target, eps, horizon, mode)?;
        if curve.ambiguous > 0 {
            status = Status::Undecided;
        }
        let label = lindyn::certified::format_rational(eps);
        for row in curve.to_csv(step).lines().skip(1) {
            csv.push_str(&format!("{label},{row}\n"));
        }
        let points = curve
            .to_csv(step)
            .lines()
            .skip(1)
            .filter_map(|r| {
                let mut f = r.split(',');
                let m: f64 = f.next()?.parse().ok()?;
                let d: f64 = f.nth(1)?.parse().ok()?;
                Some((m, d))
            })
            .collect();
        series.push(Series { label: format!("eps = {label}"), points });
        curves.push(json!({
            "eps": label,
            "hits": curve.hits.len(),
            "density": curve.density(horizon),
            "lower_density_estimate": curve.lower_density_estimate(),
            "ambiguous": curve.ambiguous,
            "exact": curve.exact,
        }));
    }
    let chart = Chart { title: "hitting density".into(), x_label: "M".into(), y_label: "density".into(), series };
    Ok(Outcome::new(status, json!({"horizon": horizon, "curves": curves})).with_csv(csv).with_svg(chart.render()))
}
