//! `odometer`: exact cylinder computations for the +1-with-carry map.

use clap::{Args, Subcommand};
use lindyn::odometer::{conservativity_evidence, depth_check, periodic_point_cylinder, Cylinder, CylinderSet};
use serde_json::json;

use super::{rat_json, Ctx};
use crate::error::CliError;
use crate::output::{Outcome, Status};

#[derive(Debug, Args)]
pub struct CylinderArgs {
    /// Cylinder literal "[a1,...,ai]"; repeat for a union. "[]" is the whole space.
    #[arg(long = "cylinder", value_name = "DIGITS", required = true)]
    pub cylinders: Vec<String>,
}

impl CylinderArgs {
    fn set(&self) -> Result<CylinderSet, CliError> {
        let cs = self.cylinders.iter().map(|c| c.parse::<Cylinder>()).collect::<lindyn::Result<Vec<_>>>()?;
        Ok(CylinderSet::from_cylinders(cs))
    }
}

#[derive(Debug, Subcommand)]
pub enum OdometerCmd {
    /// Least N with T^N χ_s = χ_s.
    Period(CylinderArgs),
    /// Exact measure of a union of cylinders.
    Measure(CylinderArgs),
    /// Image of the set under the n-th iterate.
    Image {
        #[command(flatten)]
        set: CylinderArgs,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
    /// First return time with its exact overlap measure.
    Returns {
        #[command(flatten)]
        set: CylinderArgs,
        #[arg(long, value_name = "N")]
        max_n: Option<u64>,
    },
    /// Total measure and extreme measure ratios at one depth.
    DepthCheck {
        #[arg(long)]
        depth: usize,
    },
}

pub fn run(ctx: &mut Ctx, cmd: &OdometerCmd) -> Result<Outcome, CliError> {
    let result = match cmd {
        OdometerCmd::Period(args) => {
            let p = periodic_point_cylinder(&args.set()?);
            json!({"set": p.set.to_string(), "period": p.period, "depth_period": p.depth_period})
        }
        OdometerCmd::Measure(args) => {
            let s = args.set()?;
            json!({"set": s.to_string(), "measure": rat_json(&s.measure())})
        }
        OdometerCmd::Image { set, n } => {
            let s = set.set()?;
            let image = s.image(*n);
            json!({"set": s.to_string(), "n": n, "image": image.to_string(), "measure": rat_json(&image.measure())})
        }
        OdometerCmd::Returns { set, max_n } => {
            let max_n = max_n.unwrap_or(ctx.defaults.return_bound);
            ctx.manifest.horizon("max_n", max_n);
            let s = set.set()?;
            let e = conservativity_evidence(&s, max_n)?;
            json!({"set": s.to_string(), "n": e.n, "overlap_measure": rat_json(&e.measure)})
        }
        OdometerCmd::DepthCheck { depth } => {
            let c = depth_check(*depth)?;
            json!({
                "depth": c.depth,
                "total": rat_json(&c.total),
                "min_ratio": rat_json(&c.min_ratio),
                "max_ratio": rat_json(&c.max_ratio),
            })
        }
    };
    Ok(Outcome::new(Status::Decided, result))
}
