//! `br-lemma`: sweeps of β_n = Σ_{m∈A} α_{m-n} over growing horizons.

use clap::Args;
use lindyn::conditions::{br_sweep, IntegerSet};
use lindyn::io::profile_from_json;
use serde_json::json;

use super::Ctx;
use crate::error::CliError;
use crate::output::{Outcome, Status};
use crate::svg::{Chart, Series};

#[derive(Debug, Args)]
pub struct BrArgs {
    /// Profile descriptor for α (inline JSON or file), e.g. '{"family":"geometric","a":"1","r":"1/2"}'.
    #[arg(long, value_name = "PROFILE")]
    pub alpha: String,
    /// Index set A: naturals, multiples:D, residues:M:R1,R2,... or explicit:N1,N2,...
    #[arg(long, default_value = "naturals")]
    pub set: String,
    /// Comma-separated horizons.
    #[arg(long, value_delimiter = ',')]
    pub horizons: Vec<u64>,
}

pub fn parse_set(s: &str) -> Result<IntegerSet, CliError> {
    let bad = || CliError::Usage(format!("cannot parse index set {s:?}"));
    let nums = |t: &str| t.split(',').map(|x| x.trim().parse::<u64>().map_err(|_| bad())).collect::<Result<Vec<_>, _>>();
    let mut parts = s.splitn(3, ':');
    match (parts.next(), parts.next(), parts.next()) {
        (Some("naturals"), None, None) => Ok(IntegerSet::Naturals),
        (Some("multiples"), Some(d), None) => Ok(IntegerSet::Multiples(d.trim().parse().map_err(|_| bad())?)),
        (Some("residues"), Some(m), Some(r)) => {
            Ok(IntegerSet::Residues { modulus: m.trim().parse().map_err(|_| bad())?, residues: nums(r)? })
        }
        (Some("explicit"), Some(v), None) => Ok(IntegerSet::Explicit(nums(v)?)),
        _ => Err(bad()),
    }
}

pub fn run(ctx: &mut Ctx, args: &BrArgs) -> Result<Outcome, CliError> {
    let alpha = profile_from_json(&ctx.json_arg(&args.alpha)?)?;
    let set = parse_set(&args.set)?;
    let horizons = if args.horizons.is_empty() { ctx.defaults.br_horizons.clone() } else { args.horizons.clone() };
    for (i, h) in horizons.iter().enumerate() {
        ctx.manifest.horizon(&format!("horizon_{i}"), *h);
    }
    let reports = br_sweep(&alpha, &set, &horizons)?;
    let mut csv = String::from("horizon,max_beta,argmax,alpha_head_sum,density\n");
    for r in &reports {
        csv.push_str(&format!("{},{:.12},{},{:.12},{:.9}\n", r.horizon, r.max_beta, r.argmax, r.alpha_head_sum, r.density));
    }
    let points = reports.iter().map(|r| ((r.horizon as f64).log10(), r.max_beta)).collect();
    let chart = Chart {
        title: "max β_n".into(),
        x_label: "log10 horizon".into(),
        y_label: "max β".into(),
        series: vec![Series { label: "max β".into(), points }],
    };
    let result = json!({"set": set, "sweep": reports});
    Ok(Outcome::new(Status::Decided, result).with_csv(csv).with_svg(chart.render()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_literals() {
        assert_eq!(parse_set("naturals").unwrap(), IntegerSet::Naturals);
        assert_eq!(parse_set("multiples:3").unwrap(), IntegerSet::Multiples(3));
        assert_eq!(
            parse_set("residues:5:0,2").unwrap(),
            IntegerSet::Residues { modulus: 5, residues: vec![0, 2] }
        );
        assert_eq!(parse_set("explicit:1,4,9").unwrap(), IntegerSet::Explicit(vec![1, 4, 9]));
        assert!(parse_set("primes").is_err());
        assert!(parse_set("multiples:x").is_err());
    }
}
