//! Decision procedure combining the structural checks into a per-system
//! report. Every yes/no carries the implication that produced it; fields no
//! implication reaches stay `unknown`.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::atomic_system::{Atom, AtomicSystem, Copies, MeasureTotal, Mode, OrbitKind};
use crate::conditions::{
    check_bounded_distortion, check_necessary_fh, check_sc, compute_dn, Distortion, NecessaryFh, ScVerdict,
    DEFAULT_WINDOW,
};

/// Explicit head of `d_n` used for verdicts; tails are certified in closed form.
pub const CLASSIFY_WINDOW: u64 = 64;
use crate::error::{Error, Result};

/// Justification tags.
pub mod tag {
    pub const SC_GENERAL: &str = "summability condition ⇒ chaotic, mixing and frequently hypercyclic";
    pub const FINITE_MEASURE: &str = "finite measure: summability condition ⇔ dissipative";
    pub const DISSIPATIVE_CHAOS: &str = "dissipative: chaotic ⇔ summability condition";
    pub const NECESSARY: &str = "frequently hypercyclic ⇒ Σ_{n∈Z} d_n(W) < ∞";
    pub const NECESSARY_FORWARD: &str = "non-invertible: frequently hypercyclic ⇒ Σ_{n∈N} d_n(W) < ∞";
    pub const BOUNDED_DISTORTION: &str =
        "dissipative with bounded distortion: frequently hypercyclic ⇔ chaotic ⇔ summability condition";
    pub const ERGODIC_ATOMIC: &str =
        "ergodic dissipative atomic: frequently hypercyclic ⇔ chaotic ⇔ finite measure";
    pub const INVERSE: &str = "bounded distortion: f and f⁻¹ share frequent hypercyclicity and chaos";
    pub const CYCLE: &str = "cycle: T^L = identity, no dense orbit";
    pub const SC_DISSIPATIVE: &str = "summability condition ⇒ dissipative";
    pub const HOPF: &str = "Hopf decomposition: cycles are conservative, lines wander";
    pub const NO_THEOREM: &str = "no implemented implication applies";
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
    Holds,
    Fails,
    Bounded,
    Unbounded,
    Unknown,
    Undecided,
    #[serde(rename = "n/a")]
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub verdict: Verdict,
    pub justification: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub value: Option<String>,
}

impl Finding {
    pub fn new(verdict: Verdict, justification: impl Into<String>) -> Self {
        Finding { verdict, justification: justification.into(), value: None }
    }

    pub fn with_value(mut self, value: String) -> Self {
        self.value = Some(value);
        self
    }

    pub fn unknown() -> Self {
        Finding::new(Verdict::Unknown, tag::NO_THEOREM)
    }

    pub fn is(&self, v: Verdict) -> bool {
        self.verdict == v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub dissipative: Finding,
    pub sc: Finding,
    pub mu_finite: Finding,
    pub bounded_distortion: Finding,
    pub ergodic_dissipative: Finding,
    pub necessary_condition: Finding,
    pub chaotic: Finding,
    pub frequently_hypercyclic: Finding,
    pub topologically_mixing: Finding,
    pub star_constant: String,
    /// Wandering set used for the necessary condition.
    pub wandering_set: Vec<Atom>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub inverse_consistency: Option<InverseConsistency>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InverseConsistency {
    pub frequently_hypercyclic_agree: bool,
    pub chaotic_agree: bool,
    /// Agreement is required when bounded distortion holds.
    pub required: bool,
}

impl InverseConsistency {
    pub fn consistent(&self) -> bool {
        !self.required || (self.frequently_hypercyclic_agree && self.chaotic_agree)
    }
}

impl ClassificationReport {
    fn fields(&self) -> [&Finding; 9] {
        [
            &self.dissipative,
            &self.sc,
            &self.mu_finite,
            &self.bounded_distortion,
            &self.ergodic_dissipative,
            &self.necessary_condition,
            &self.chaotic,
            &self.frequently_hypercyclic,
            &self.topologically_mixing,
        ]
    }

    pub fn has_unknowns(&self) -> bool {
        [&self.chaotic, &self.frequently_hypercyclic, &self.topologically_mixing]
            .iter()
            .any(|f| f.is(Verdict::Unknown))
    }

    pub fn has_undecided(&self) -> bool {
        self.fields().iter().any(|f| f.is(Verdict::Undecided))
    }

    /// Combinations the implications forbid; empty on every correct report.
    pub fn violations(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let yes = |f: &Finding| f.is(Verdict::Yes);
        let no = |f: &Finding| f.is(Verdict::No);
        if self.sc.is(Verdict::Holds) {
            if !yes(&self.chaotic) || !yes(&self.frequently_hypercyclic) || !yes(&self.topologically_mixing) {
                out.push("summability holds but a dynamical verdict is not yes");
            }
            if no(&self.dissipative) {
                out.push("summability holds on a non-dissipative system");
            }
        }
        if yes(&self.dissipative) && yes(&self.chaotic) && !self.sc.is(Verdict::Holds) {
            out.push("dissipative and chaotic without summability");
        }
        if yes(&self.mu_finite) && yes(&self.dissipative) && !self.sc.is(Verdict::Holds) {
            out.push("finite dissipative system without summability");
        }
        if yes(&self.dissipative) && self.bounded_distortion.is(Verdict::Bounded) {
            let sc = self.sc.is(Verdict::Holds);
            let decided = |f: &Finding| yes(f) || no(f);
            if decided(&self.frequently_hypercyclic) && yes(&self.frequently_hypercyclic) != sc {
                out.push("bounded distortion: frequent hypercyclicity disagrees with summability");
            }
            if decided(&self.chaotic) && yes(&self.chaotic) != sc {
                out.push("bounded distortion: chaos disagrees with summability");
            }
        }
        if yes(&self.ergodic_dissipative) && (yes(&self.mu_finite) || no(&self.mu_finite)) {
            let finite = yes(&self.mu_finite);
            for f in [&self.frequently_hypercyclic, &self.chaotic] {
                if (yes(f) || no(f)) && yes(f) != finite {
                    out.push("ergodic atomic: verdict disagrees with finiteness of the measure");
                }
            }
        }
        if self.necessary_condition.is(Verdict::Fails) && !no(&self.frequently_hypercyclic) {
            out.push("necessary condition fails but frequent hypercyclicity is not ruled out");
        }
        if yes(&self.frequently_hypercyclic) && self.necessary_condition.is(Verdict::Fails) {
            out.push("frequently hypercyclic with divergent d_n sum");
        }
        out
    }
}

/// Base atom of the line with the largest base mass (first on ties).
pub fn default_wandering_set(system: &AtomicSystem) -> Option<Vec<Atom>> {
    let mut best: Option<(usize, f64)> = None;
    for (i, o) in system.orbits().iter().enumerate() {
        if o.is_cycle() {
            continue;
        }
        let m = system.measure_f64(&Atom::base(i)).unwrap_or(0.0);
        if best.is_none_or(|(_, b)| m > b) {
            best = Some((i, m));
        }
    }
    best.map(|(i, _)| vec![Atom::base(i)])
}

#[derive(Debug, Clone, Default)]
pub struct ClassifyOptions {
    /// Wandering set for the necessary condition; default tries each line's base atom.
    pub wandering_set: Option<Vec<Atom>>,
    pub window: Option<u64>,
}

pub fn classify(system: &AtomicSystem) -> Result<ClassificationReport> {
    classify_with(system, &ClassifyOptions::default())
}

pub fn classify_with(system: &AtomicSystem, opts: &ClassifyOptions) -> Result<ClassificationReport> {
    let star = system.star_constant()?;
    let window = opts.window.unwrap_or(CLASSIFY_WINDOW);
    if system.mode() == Mode::Forward {
        return classify_forward(system, opts, window, star.value.to_string());
    }
    let hopf = system.hopf_decompose();
    let dissipative = hopf.conservative.is_empty();
    let dissipative_f = Finding::new(if dissipative { Verdict::Yes } else { Verdict::No }, tag::HOPF);

    let mu_finite = match system.total_measure() {
        MeasureTotal::Finite(t) => Finding::new(Verdict::Yes, "certified total").with_value(t.to_string()),
        MeasureTotal::Infinite(why) => Finding::new(Verdict::No, why),
        MeasureTotal::Undecided(why) => Finding::new(Verdict::Undecided, why),
    };

    let sc = match check_sc(system)? {
        ScVerdict::Holds { .. } => Finding::new(Verdict::Holds, "every orbit sum is finite"),
        ScVerdict::Fails { atom, .. } if !dissipative => {
            Finding::new(Verdict::Fails, tag::SC_DISSIPATIVE).with_value(atom.to_string())
        }
        ScVerdict::Fails { atom, reason } => {
            Finding::new(Verdict::Fails, format!("orbit sum diverges: {reason:?}")).with_value(atom.to_string())
        }
        ScVerdict::Undecided(why) => Finding::new(Verdict::Undecided, why),
    };

    let (ergodic, distortion) = if dissipative {
        let ergodic = system.is_ergodic_dissipative()?;
        let e = Finding::new(
            if ergodic { Verdict::Yes } else { Verdict::No },
            "ergodic iff a single line with one copy",
        );
        (e, distortion_finding(system)?)
    } else {
        (
            Finding::new(Verdict::NotApplicable, "not dissipative"),
            Finding::new(Verdict::NotApplicable, "not dissipative"),
        )
    };

    let (necessary, w_used) = necessary_finding(system, opts, window, tag::NECESSARY)?;

    let mut report = ClassificationReport {
        dissipative: dissipative_f,
        sc,
        mu_finite,
        bounded_distortion: distortion,
        ergodic_dissipative: ergodic,
        necessary_condition: necessary,
        chaotic: Finding::unknown(),
        frequently_hypercyclic: Finding::unknown(),
        topologically_mixing: Finding::unknown(),
        star_constant: star.value.to_string(),
        wandering_set: w_used,
        inverse_consistency: None,
    };
    decide_dynamics(system, &mut report);
    Ok(report)
}

fn decide_dynamics(system: &AtomicSystem, r: &mut ClassificationReport) {
    let set = |f: &mut Finding, v: Verdict, t: &str| *f = Finding::new(v, t);
    if r.dissipative.is(Verdict::No) {
        // The cycle part is a T-invariant summand on which T^L is the identity,
        // so no vector has a dense orbit.
        let l = system
            .orbits()
            .iter()
            .filter_map(|o| if let OrbitKind::Cycle(len) = o.kind { Some(len) } else { None })
            .fold(1u64, |acc, len| acc.lcm(&len));
        let t = format!("{} (L = {l})", tag::CYCLE);
        for f in [&mut r.chaotic, &mut r.frequently_hypercyclic, &mut r.topologically_mixing] {
            set(f, Verdict::No, &t);
        }
        return;
    }
    if r.sc.is(Verdict::Holds) {
        for f in [&mut r.chaotic, &mut r.frequently_hypercyclic, &mut r.topologically_mixing] {
            set(f, Verdict::Yes, tag::SC_GENERAL);
        }
        return;
    }
    if r.mu_finite.is(Verdict::Yes) {
        // Finite and dissipative forces summability even when the per-orbit
        // certificate is undecided.
        for f in [&mut r.chaotic, &mut r.frequently_hypercyclic, &mut r.topologically_mixing] {
            set(f, Verdict::Yes, tag::FINITE_MEASURE);
        }
        return;
    }
    if r.sc.is(Verdict::Fails) {
        set(&mut r.chaotic, Verdict::No, tag::DISSIPATIVE_CHAOS);
    }
    if r.ergodic_dissipative.is(Verdict::Yes) && r.mu_finite.is(Verdict::No) {
        set(&mut r.frequently_hypercyclic, Verdict::No, tag::ERGODIC_ATOMIC);
        set(&mut r.chaotic, Verdict::No, tag::ERGODIC_ATOMIC);
        return;
    }
    if r.sc.is(Verdict::Fails) && r.bounded_distortion.is(Verdict::Bounded) {
        set(&mut r.frequently_hypercyclic, Verdict::No, tag::BOUNDED_DISTORTION);
        return;
    }
    if r.necessary_condition.is(Verdict::Fails) {
        set(&mut r.frequently_hypercyclic, Verdict::No, tag::NECESSARY);
    }
}

fn distortion_finding(system: &AtomicSystem) -> Result<Finding> {
    let mut w = Vec::new();
    for (i, o) in system.orbits().iter().enumerate() {
        match o.copies {
            Copies::Finite(n) => w.extend((0..n as i64).map(|c| Atom::new(i, c, 0))),
            Copies::Countable => {
                return Ok(Finding::new(Verdict::Undecided, "countably many copies: distortion not analysed"))
            }
        }
    }
    let cert = check_bounded_distortion(system, &w, DEFAULT_WINDOW)?;
    Ok(match cert.verdict {
        Distortion::Bounded { k, exact } => Finding::new(
            Verdict::Bounded,
            if exact { "exact supremum over a full period" } else { "certified upper bound" },
        )
        .with_value(k.to_string()),
        Distortion::Unbounded { witness_n, lower_bound } => {
            Finding::new(Verdict::Unbounded, format!("ratio {lower_bound} at n = {witness_n}"))
        }
        Distortion::Undecided(why) => Finding::new(Verdict::Undecided, why),
    })
}

fn necessary_finding(
    system: &AtomicSystem,
    opts: &ClassifyOptions,
    window: u64,
    tag: &str,
) -> Result<(Finding, Vec<Atom>)> {
    let candidates: Vec<Vec<Atom>> = match &opts.wandering_set {
        Some(w) => vec![w.clone()],
        None => {
            let mut c: Vec<Vec<Atom>> = default_wandering_set(system).into_iter().collect();
            for (i, o) in system.orbits().iter().enumerate() {
                if !o.is_cycle() && c.first().is_none_or(|w| w[0].orbit != i) {
                    c.push(vec![Atom::base(i)]);
                }
            }
            c
        }
    };
    let Some(first) = candidates.first().cloned() else {
        return Ok((Finding::new(Verdict::NotApplicable, "no wandering atom"), Vec::new()));
    };
    let mut fallback = None;
    for w in candidates {
        let seq = compute_dn(system, &w, window)?;
        match check_necessary_fh(&seq) {
            NecessaryFh::FailsNecessary(witness) => {
                return Ok((Finding::new(Verdict::Fails, tag).with_value(witness.to_string()), w))
            }
            NecessaryFh::Passes { total } => {
                fallback.get_or_insert((Finding::new(Verdict::Holds, tag).with_value(total.to_string()), w));
            }
            NecessaryFh::Undecided(why) => {
                fallback.get_or_insert((Finding::new(Verdict::Undecided, why), w));
            }
        }
    }
    Ok(fallback.unwrap_or((Finding::unknown(), first)))
}

fn classify_forward(
    system: &AtomicSystem,
    opts: &ClassifyOptions,
    window: u64,
    star: String,
) -> Result<ClassificationReport> {
    let na = |why: &str| Finding::new(Verdict::NotApplicable, why);
    let (necessary, w) = necessary_finding(system, opts, window, tag::NECESSARY_FORWARD)?;
    let mut report = ClassificationReport {
        dissipative: Finding::new(Verdict::Yes, "forward lines never return"),
        sc: na("the summability condition is stated for bijective maps"),
        mu_finite: match system.total_measure() {
            MeasureTotal::Finite(t) => Finding::new(Verdict::Yes, "certified total").with_value(t.to_string()),
            MeasureTotal::Infinite(why) => Finding::new(Verdict::No, why),
            MeasureTotal::Undecided(why) => Finding::new(Verdict::Undecided, why),
        },
        bounded_distortion: na("bijective only"),
        ergodic_dissipative: na("bijective only"),
        necessary_condition: necessary,
        chaotic: Finding::unknown(),
        frequently_hypercyclic: Finding::unknown(),
        topologically_mixing: Finding::unknown(),
        star_constant: star,
        wandering_set: w,
        inverse_consistency: None,
    };
    if report.necessary_condition.is(Verdict::Fails) {
        report.frequently_hypercyclic = Finding::new(Verdict::No, tag::NECESSARY_FORWARD);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairedReport {
    pub forward: ClassificationReport,
    pub inverse: ClassificationReport,
}

/// Classifies `f` and `f⁻¹`; agreement of the two dynamical verdicts is
/// recorded and required under bounded distortion.
pub fn classify_inverse_pair(system: &AtomicSystem) -> Result<PairedReport> {
    if system.mode() == Mode::Forward {
        return Err(Error::BijectiveOnly);
    }
    if let Err(e) = system.inverse_star_constant() {
        return Err(match e {
            Error::UnboundedRatio { witness } => {
                Error::NotInvertibleSystem(format!("witness {witness:?}"))
            }
            other => other,
        });
    }
    let reversed = system.reversed()?;
    let mut forward = classify(system)?;
    let mut inverse = classify(&reversed)?;
    let decided = |f: &Finding| f.is(Verdict::Yes) || f.is(Verdict::No);
    let agree = |a: &Finding, b: &Finding| !(decided(a) && decided(b)) || a.verdict == b.verdict;
    let required = forward.dissipative.is(Verdict::Yes)
        && forward.bounded_distortion.is(Verdict::Bounded)
        && inverse.bounded_distortion.is(Verdict::Bounded);
    let consistency = InverseConsistency {
        frequently_hypercyclic_agree: agree(&forward.frequently_hypercyclic, &inverse.frequently_hypercyclic),
        chaotic_agree: agree(&forward.chaotic, &inverse.chaotic),
        required,
    };
    forward.inverse_consistency = Some(consistency.clone());
    inverse.inverse_consistency = Some(consistency);
    Ok(PairedReport { forward, inverse })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic_system::OrbitSpec;
    use crate::certified::q;
    use crate::weight_profile::{BaseSequence, WeightProfile};

    fn halving_line() -> AtomicSystem {
        let w = WeightProfile::two_sided(q(1, 1), q(1, 2), q(1, 1), q(1, 2));
        AtomicSystem::bijective(vec![OrbitSpec::z_line(w).with_copies(Copies::Countable)], q(2, 1)).unwrap()
    }

    fn flat_line() -> AtomicSystem {
        AtomicSystem::bijective(vec![OrbitSpec::z_line(WeightProfile::constant(q(1, 1)))], q(1, 1)).unwrap()
    }

    #[test]
    fn halving_line_all_yes() {
        let r = classify(&halving_line()).unwrap();
        assert!(r.dissipative.is(Verdict::Yes));
        assert!(r.sc.is(Verdict::Holds));
        assert!(r.mu_finite.is(Verdict::No));
        for f in [&r.chaotic, &r.frequently_hypercyclic, &r.topologically_mixing] {
            assert!(f.is(Verdict::Yes));
            assert_eq!(f.justification, tag::SC_GENERAL);
        }
        assert!(r.violations().is_empty());
    }

    #[test]
    fn flat_line_not_frequently_hypercyclic() {
        let r = classify(&flat_line()).unwrap();
        assert!(r.ergodic_dissipative.is(Verdict::Yes));
        assert!(r.necessary_condition.is(Verdict::Fails));
        assert!(r.frequently_hypercyclic.is(Verdict::No));
        assert_eq!(r.frequently_hypercyclic.justification, tag::ERGODIC_ATOMIC);
        assert!(r.chaotic.is(Verdict::No));
        assert!(r.violations().is_empty());
    }

    #[test]
    fn cycles_are_never_hypercyclic() {
        let s = AtomicSystem::bijective(
            vec![OrbitSpec::cycle(3, WeightProfile::table((0..3).map(|k| (k, q(1, 3)))))],
            q(1, 1),
        )
        .unwrap();
        let r = classify(&s).unwrap();
        assert!(r.dissipative.is(Verdict::No));
        assert!(r.sc.is(Verdict::Fails));
        assert!(r.chaotic.is(Verdict::No));
        assert!(r.chaotic.justification.starts_with(tag::CYCLE));
        assert!(r.violations().is_empty());
    }

    #[test]
    fn chaotic_bilateral_shift() {
        // Weights 2 on a bilateral shift: μ(n) = 2^{-|n|} up to the head term.
        let base = BaseSequence::Split { head: vec![q(1, 2)], tail: q(2, 1), negative: q(1, 2) };
        let s = AtomicSystem::bijective(
            vec![OrbitSpec::z_line(WeightProfile::product_form(base, q(1, 1), true))],
            q(1, 1),
        )
        .unwrap();
        let r = classify(&s).unwrap();
        assert!(r.frequently_hypercyclic.is(Verdict::Yes));
        assert!(r.chaotic.is(Verdict::Yes));
    }

    #[test]
    fn mixed_lines_use_every_base_atom() {
        let s = AtomicSystem::bijective(
            vec![
                OrbitSpec::z_line(WeightProfile::geometric(q(4, 1), q(1, 2))),
                OrbitSpec::z_line(WeightProfile::constant(q(1, 1))),
            ],
            q(1, 1),
        )
        .unwrap();
        let r = classify(&s).unwrap();
        assert!(r.chaotic.is(Verdict::No));
        assert!(r.frequently_hypercyclic.is(Verdict::No));
        assert_eq!(r.wandering_set, vec![Atom::base(1)]);
        assert!(r.violations().is_empty());
    }

    #[test]
    fn inverse_pairs() {
        let p = classify_inverse_pair(&halving_line()).unwrap();
        assert_eq!(p.forward.frequently_hypercyclic, p.inverse.frequently_hypercyclic);
        let flat = classify_inverse_pair(&flat_line()).unwrap();
        assert!(flat.forward.frequently_hypercyclic.is(Verdict::No));
        assert!(flat.inverse.frequently_hypercyclic.is(Verdict::No));
        let asym = AtomicSystem::bijective(
            vec![OrbitSpec::z_line(WeightProfile::two_sided(q(1, 1), q(1, 3), q(1, 2), q(3, 4)))],
            q(1, 1),
        )
        .unwrap();
        let p = classify_inverse_pair(&asym).unwrap();
        assert!(p.forward.inverse_consistency.as_ref().unwrap().consistent());
        assert_eq!(p.forward.chaotic.verdict, p.inverse.chaotic.verdict);
    }

    #[test]
    fn forward_pair_is_refused() {
        let s = AtomicSystem::new(
            vec![OrbitSpec::n_line(WeightProfile::product_form(BaseSequence::Const(q(2, 1)), q(1, 1), false))],
            q(1, 1),
            Mode::Forward,
        )
        .unwrap();
        assert!(matches!(classify_inverse_pair(&s), Err(Error::BijectiveOnly)));
    }

    #[test]
    fn forward_mode_uses_forward_condition() {
        let s = AtomicSystem::new(
            vec![OrbitSpec::n_line(WeightProfile::product_form(BaseSequence::Const(q(1, 1)), q(1, 1), false))],
            q(1, 1),
            Mode::Forward,
        )
        .unwrap();
        let r = classify(&s).unwrap();
        assert!(r.frequently_hypercyclic.is(Verdict::No));
        assert_eq!(r.frequently_hypercyclic.justification, tag::NECESSARY_FORWARD);
    }

    #[test]
    fn report_serializes_with_verdict_and_justification() {
        let r = classify(&flat_line()).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["frequently_hypercyclic"]["verdict"], "no");
        assert_eq!(v["bounded_distortion"]["verdict"], "bounded");
        assert!(v["chaotic"]["justification"].is_string());
    }
}
