//! `affine`: the map x ↦ ax + b under the measure ½e^{-|t|}dt.

use clap::{Args, Subcommand};
use lindyn::affine::{recurrent_set, sc_witness, star_bound_check, AffineMap, IntervalSet, RecurrentSet};
use serde_json::json;

use super::{creal_json, rat_json, rational, Ctx};
use crate::error::CliError;
use crate::output::{Outcome, Status};
use crate::svg::{Chart, Series};

#[derive(Debug, Args)]
pub struct AffineArgs {
    /// Slope, 0 < |a| <= 1.
    #[arg(long, allow_hyphen_values = true, value_name = "RATIONAL")]
    pub a: String,
    /// Offset.
    #[arg(long, allow_hyphen_values = true, value_name = "RATIONAL")]
    pub b: String,
    #[command(subcommand)]
    pub cmd: AffineCmd,
}

#[derive(Debug, Subcommand)]
pub enum AffineCmd {
    /// Certify μ(f(J)) >= |a|e^{-|b|} μ(J) on random rational intervals.
    VerifyStar {
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Inner approximation of a bounded set with a finite orbit sum.
    ScWitness {
        /// Bounded set, e.g. "[0,1]" or "[0,1] u [2,3]".
        #[arg(long = "B", value_name = "SET", allow_hyphen_values = true)]
        set: String,
        /// Allowed removed mass.
        #[arg(long)]
        eps: String,
        #[arg(long, value_name = "N")]
        head_terms: Option<u64>,
    },
    /// Points whose orbits return: empty, the fixed point, or everything.
    Recurrence,
}

pub fn run(ctx: &mut Ctx, args: &AffineArgs) -> Result<Outcome, CliError> {
    let map = AffineMap::new(rational(&args.a)?, rational(&args.b)?)?;
    match &args.cmd {
        AffineCmd::VerifyStar { trials, seed } => {
            let trials = trials.unwrap_or(ctx.defaults.star_trials);
            let seed = seed.unwrap_or(ctx.defaults.seed);
            ctx.manifest.seed("intervals", seed);
            ctx.manifest.horizon("trials", trials as u64);
            let report = star_bound_check(&map, trials, seed);
            let status = if report.uncertified > 0 { Status::Undecided } else { Status::Decided };
            let mut result = serde_json::to_value(&report).expect("report serializes");
            result["holds"] = json!(report.violations == 0 && report.uncertified == 0);
            result["bound"] = creal_json(&map.star_bound());
            Ok(Outcome::new(status, result))
        }
        AffineCmd::ScWitness { set, eps, head_terms } => {
            let b: IntervalSet = set.parse()?;
            let eps = rational(eps)?;
            let head_terms = head_terms.unwrap_or(ctx.defaults.head_terms);
            ctx.manifest.tolerance("eps", lindyn::certified::format_rational(&eps));
            ctx.manifest.horizon("head_terms", head_terms);
            let w = sc_witness(&map, &b, &eps, head_terms)?;
            let points = w.head.iter().map(|(n, s)| (*n as f64, s.to_f64())).collect();
            let chart = Chart {
                title: "orbit sum of B'".into(),
                x_label: "N".into(),
                y_label: "partial sum".into(),
                series: vec![Series { label: "|n| <= N".into(), points }],
            };
            let result = json!({
                "b": b.to_string(),
                "b_prime": w.b_prime.to_string(),
                "delta": w.delta.as_ref().map(rat_json),
                "removed": creal_json(&w.removed),
                "head_terms": w.head.last().map(|(n, _)| *n).unwrap_or(0),
                "head_sum": w.head.last().map(|(_, s)| creal_json(s)),
                "tail_bound": creal_json(&w.tail),
                "total": creal_json(&w.total()),
            });
            Ok(Outcome::new(Status::Decided, result).with_csv(w.to_csv()).with_svg(chart.render()))
        }
        AffineCmd::Recurrence => {
            let set = match recurrent_set(&map) {
                RecurrentSet::Empty => json!({"kind": "empty"}),
                RecurrentSet::FixedPoint(x) => json!({"kind": "fixed_point", "point": rat_json(&x)}),
                RecurrentSet::Everything => json!({"kind": "everything"}),
            };
            Ok(Outcome::new(Status::Decided, json!({"recurrent_set": set, "star_bound": creal_json(&map.star_bound())})))
        }
    }
}
