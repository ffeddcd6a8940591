//! Backward weighted shifts as composition operators. The shift `B_w` on
//! `ℓ_p(N)` corresponds to `i ↦ i + 1` on `N` with `μ({i}) = (w_0⋯w_i)^{-p}`;
//! on `ℓ_p(Z)` the same ratios `μ({i-1})/μ({i}) = w_i^p` are used with
//! `μ({0}) = 1`.

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::atomic_system::{AtomicSystem, Copies, Mode, OrbitKind, OrbitSpec};
use crate::certified::pow_enclosure;
use crate::certified::DEFAULT_PREC;
use crate::classifier::{classify, tag, ClassificationReport, Finding, Verdict};
use crate::error::{Error, Result};
use crate::weight_profile::{BaseSequence, WeightFamily, WeightProfile};
use crate::Rational;

/// Tag for the standard characterization of chaotic shifts on `ℓ_p(N)`.
pub const UNILATERAL_CHAOS: &str = "shift on ℓ_p(N): chaotic ⇔ Σ_i μ({i}) < ∞ (standard characterization)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftMode {
    /// On `ℓ_p(N)`.
    Unilateral,
    /// On `ℓ_p(Z)`.
    Bilateral,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftWeights {
    pub mode: ShiftMode,
    pub weights: BaseSequence,
}

impl ShiftWeights {
    pub fn new(mode: ShiftMode, weights: BaseSequence) -> Result<Self> {
        weights.validate()?;
        Ok(ShiftWeights { mode, weights })
    }

    pub fn constant(mode: ShiftMode, w: Rational) -> Result<Self> {
        Self::new(mode, BaseSequence::Const(w))
    }

    pub fn at(&self, i: i64) -> Rational {
        self.weights.at(i)
    }
}

/// The composition-operator system conjugate to `B_w` on `ℓ_p`.
pub fn shift_to_system(w: &ShiftWeights, p: &Rational) -> Result<AtomicSystem> {
    let bilateral = w.mode == ShiftMode::Bilateral;
    let profile = WeightProfile::product_form(w.weights.clone(), p.clone(), bilateral);
    if bilateral {
        AtomicSystem::bijective(vec![OrbitSpec::z_line(profile)], p.clone())
    } else {
        AtomicSystem::new(vec![OrbitSpec::n_line(profile)], p.clone(), Mode::Forward)
    }
}

/// Exact `x^{1/p}`, when it is rational.
fn exact_root(x: &Rational, p: &Rational) -> Result<Rational> {
    pow_enclosure(x, &p.recip(), DEFAULT_PREC)
        .as_exact()
        .cloned()
        .ok_or_else(|| Error::InvalidSystem(format!("weight {x}^(1/{p}) is irrational")))
}

/// Recovers the shift weights of a single-orbit system.
///
/// Product-form profiles return their base sequence unchanged; geometric
/// profiles are converted through `w_i^p = μ({i-1})/μ({i})` when the roots
/// are rational.
pub fn system_to_shift(system: &AtomicSystem) -> Result<ShiftWeights> {
    let [orbit] = system.orbits() else {
        return Err(Error::InvalidSystem("only single-orbit systems correspond to a shift".into()));
    };
    if orbit.copies != Copies::Finite(1) {
        return Err(Error::InvalidSystem("the orbit must have a single copy".into()));
    }
    let mode = match (orbit.kind, system.mode()) {
        (OrbitKind::ZLine, Mode::Bijective) => ShiftMode::Bilateral,
        (OrbitKind::NLine, Mode::Forward) => ShiftMode::Unilateral,
        _ => return Err(Error::InvalidSystem("a cycle is not a weighted shift".into())),
    };
    let p = system.p();
    let root = |x: Rational| exact_root(&x, p);
    let weights = match &orbit.weights.family {
        WeightFamily::ProductForm { base, p: q, bilateral } if *bilateral == (mode == ShiftMode::Bilateral) => {
            if q == p {
                base.clone()
            } else {
                rescale(base, &(q / p))?
            }
        }
        WeightFamily::Geometric { a, r } => geometric_weights(mode, a, r, a, r, &root)?,
        WeightFamily::TwoSided { a_pos, r_pos, a_neg, r_neg } => {
            geometric_weights(mode, a_pos, r_pos, a_neg, r_neg, &root)?
        }
        _ => return Err(Error::InvalidSystem("weights have no closed-form shift counterpart".into())),
    };
    ShiftWeights::new(mode, weights)
}

/// `v^e` termwise, exact or refused.
fn rescale(base: &BaseSequence, e: &Rational) -> Result<BaseSequence> {
    let f = |x: &Rational| {
        pow_enclosure(x, e, DEFAULT_PREC)
            .as_exact()
            .cloned()
            .ok_or_else(|| Error::InvalidSystem(format!("weight {x}^{e} is irrational")))
    };
    Ok(match base {
        BaseSequence::Const(c) => BaseSequence::Const(f(c)?),
        BaseSequence::Periodic(v) => BaseSequence::Periodic(v.iter().map(f).collect::<Result<_>>()?),
        BaseSequence::Split { head, tail, negative } => BaseSequence::Split {
            head: head.iter().map(f).collect::<Result<_>>()?,
            tail: f(tail)?,
            negative: f(negative)?,
        },
    })
}

/// Weights for `μ(n) = a_pos r_pos^n` (`n >= 0`), `a_neg r_neg^{-n}` (`n < 0`).
fn geometric_weights(
    mode: ShiftMode,
    a_pos: &Rational,
    r_pos: &Rational,
    a_neg: &Rational,
    r_neg: &Rational,
    root: &dyn Fn(Rational) -> Result<Rational>,
) -> Result<BaseSequence> {
    let tail = root(r_pos.recip())?;
    Ok(match mode {
        ShiftMode::Unilateral => {
            // w_0^p = 1/μ(0).
            BaseSequence::Split { head: vec![root(a_pos.recip())?], tail: tail.clone(), negative: tail }
        }
        ShiftMode::Bilateral => {
            // μ normalized so μ(0) = 1: the common factor a_pos drops out.
            let w0 = root(a_neg * r_neg / a_pos)?;
            BaseSequence::Split { head: vec![w0], tail, negative: root(r_neg.clone())? }
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftReport {
    pub mode: ShiftMode,
    pub p: String,
    pub classification: ClassificationReport,
    /// Whether the frequent hypercyclicity and chaos verdicts agree with the
    /// equivalence (bilateral) or the implication FH ⇒ chaos (unilateral).
    pub equivalence: Finding,
}

pub fn classify_shift(w: &ShiftWeights, p: &Rational) -> Result<ShiftReport> {
    let system = shift_to_system(w, p)?;
    let mut report = classify(&system)?;
    let fh = report.frequently_hypercyclic.verdict;
    let equivalence = match w.mode {
        ShiftMode::Bilateral => {
            let chaotic = report.chaotic.verdict;
            let agree = fh == chaotic;
            Finding::new(if agree { Verdict::Holds } else { Verdict::Fails }, tag::ERGODIC_ATOMIC)
                .with_value(format!("frequently_hypercyclic={fh:?}, chaotic={chaotic:?}"))
        }
        ShiftMode::Unilateral => {
            report.chaotic = match report.mu_finite.verdict {
                Verdict::Yes => Finding::new(Verdict::Yes, UNILATERAL_CHAOS),
                Verdict::No => Finding::new(Verdict::No, UNILATERAL_CHAOS),
                _ => report.chaotic.clone(),
            };
            let chaotic = report.chaotic.verdict;
            let broken = fh == Verdict::Yes && chaotic == Verdict::No;
            Finding::new(if broken { Verdict::Fails } else { Verdict::Holds }, tag::NECESSARY_FORWARD)
                .with_value(format!("frequently_hypercyclic={fh:?}, chaotic={chaotic:?}"))
        }
    };
    Ok(ShiftReport { mode: w.mode, p: p.to_string(), classification: report, equivalence })
}

/// `μ({i})` of the conjugate system, for display and cross-checks.
pub fn shift_measure(w: &ShiftWeights, p: &Rational, i: i64) -> Result<crate::certified::CReal> {
    let system = shift_to_system(w, p)?;
    Ok(system.orbit(0).weights.weight_at(i)?)
}

/// True when every listed weight is one, i.e. `B_w` is an isometry on its range.
pub fn is_unweighted(w: &ShiftWeights) -> bool {
    w.weights.distinct_values().iter().all(One::is_one)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certified::{q, CReal};

    #[test]
    fn unilateral_measures_follow_the_product_formula() {
        let w = ShiftWeights::constant(ShiftMode::Unilateral, q(2, 1)).unwrap();
        for i in 0..20 {
            let expect = Rational::new(1.into(), num_bigint::BigInt::from(2).pow(i as u32 + 1));
            assert_eq!(shift_measure(&w, &q(1, 1), i).unwrap(), CReal::exact(expect));
        }
        let ones = ShiftWeights::constant(ShiftMode::Bilateral, q(1, 1)).unwrap();
        assert!(is_unweighted(&ones));
        for i in -10..10 {
            assert_eq!(shift_measure(&ones, &q(1, 1), i).unwrap(), CReal::one());
        }
    }

    #[test]
    fn bilateral_ratios() {
        let w = ShiftWeights::new(
            ShiftMode::Bilateral,
            BaseSequence::Split { head: vec![q(3, 1)], tail: q(2, 1), negative: q(1, 2) },
        )
        .unwrap();
        let p = q(2, 1);
        assert_eq!(shift_measure(&w, &p, 0).unwrap(), CReal::one());
        for i in -8i64..8 {
            let prev = shift_measure(&w, &p, i - 1).unwrap();
            let cur = shift_measure(&w, &p, i).unwrap();
            let wi = w.at(i);
            assert_eq!(&prev / &cur, CReal::exact(&wi * &wi), "i = {i}");
        }
    }

    #[test]
    fn round_trips() {
        let bases = [
            BaseSequence::Const(q(2, 1)),
            BaseSequence::Periodic(vec![q(1, 2), q(3, 1)]),
            BaseSequence::Split { head: vec![q(5, 4), q(1, 3)], tail: q(2, 1), negative: q(1, 2) },
        ];
        for mode in [ShiftMode::Unilateral, ShiftMode::Bilateral] {
            for b in &bases {
                let w = ShiftWeights::new(mode, b.clone()).unwrap();
                let back = system_to_shift(&shift_to_system(&w, &q(3, 2)).unwrap()).unwrap();
                assert_eq!(back, w);
            }
        }
    }

    #[test]
    fn geometric_systems_become_shifts() {
        // μ(n) = 2^{-|n|} on Z, p = 1: w_i = 2 for i >= 1, 1/2 for i <= 0.
        let sys = AtomicSystem::bijective(
            vec![OrbitSpec::z_line(WeightProfile::geometric(q(1, 1), q(1, 2)))],
            q(1, 1),
        )
        .unwrap();
        let w = system_to_shift(&sys).unwrap();
        for i in -5..5 {
            assert_eq!(w.at(i), if i >= 1 { q(2, 1) } else { q(1, 2) });
        }
        let again = shift_to_system(&w, &q(1, 1)).unwrap();
        for i in -6..6 {
            assert_eq!(
                again.orbit(0).weights.weight_at(i).unwrap(),
                sys.orbit(0).weights.weight_at(i).unwrap()
            );
        }
        // p = 2 with r = 1/2 needs √2.
        let irrational = AtomicSystem::bijective(
            vec![OrbitSpec::z_line(WeightProfile::geometric(q(1, 1), q(1, 2)))],
            q(2, 1),
        )
        .unwrap();
        assert!(matches!(system_to_shift(&irrational), Err(Error::InvalidSystem(_))));
    }

    #[test]
    fn bilateral_verdicts() {
        let one = q(1, 1);
        let flat = classify_shift(&ShiftWeights::constant(ShiftMode::Bilateral, one.clone()).unwrap(), &one).unwrap();
        assert!(flat.classification.frequently_hypercyclic.is(Verdict::No));
        assert!(flat.classification.chaotic.is(Verdict::No));
        assert!(flat.equivalence.is(Verdict::Holds));
        // Growing forwards and shrinking backwards: μ is summable on Z.
        let chaotic = ShiftWeights::new(
            ShiftMode::Bilateral,
            BaseSequence::Split { head: vec![q(1, 2)], tail: q(2, 1), negative: q(1, 2) },
        )
        .unwrap();
        let r = classify_shift(&chaotic, &one).unwrap();
        assert!(r.classification.frequently_hypercyclic.is(Verdict::Yes));
        assert!(r.classification.chaotic.is(Verdict::Yes));
        assert!(r.equivalence.is(Verdict::Holds));
        // Constant 2 on Z: μ({-k}) = 2^k, so μ(Z) = ∞.
        let doubling = classify_shift(&ShiftWeights::constant(ShiftMode::Bilateral, q(2, 1)).unwrap(), &one).unwrap();
        assert!(doubling.classification.mu_finite.is(Verdict::No));
        assert!(doubling.classification.frequently_hypercyclic.is(Verdict::No));
        assert!(doubling.equivalence.is(Verdict::Holds));
    }

    #[test]
    fn unilateral_verdicts() {
        let one = q(1, 1);
        let small = classify_shift(&ShiftWeights::constant(ShiftMode::Unilateral, q(1, 2)).unwrap(), &one).unwrap();
        assert!(small.classification.necessary_condition.is(Verdict::Fails));
        assert!(small.classification.frequently_hypercyclic.is(Verdict::No));
        assert!(small.classification.chaotic.is(Verdict::No));
        let big = classify_shift(&ShiftWeights::constant(ShiftMode::Unilateral, q(2, 1)).unwrap(), &one).unwrap();
        assert!(big.classification.necessary_condition.is(Verdict::Holds));
        assert!(big.classification.chaotic.is(Verdict::Yes));
        assert!(big.equivalence.is(Verdict::Holds));
    }

    #[test]
    fn scaled_families_share_verdicts() {
        // Changing finitely many weights leaves every verdict unchanged.
        let one = q(1, 1);
        for (mode, tail, negative) in [
            (ShiftMode::Bilateral, q(2, 1), q(1, 2)),
            (ShiftMode::Bilateral, q(1, 1), q(1, 1)),
            (ShiftMode::Unilateral, q(3, 2), q(1, 1)),
            (ShiftMode::Unilateral, q(2, 3), q(1, 1)),
        ] {
            let plain = ShiftWeights::new(mode, BaseSequence::Split { head: vec![], tail: tail.clone(), negative: negative.clone() }).unwrap();
            let bumped = ShiftWeights::new(mode, BaseSequence::Split { head: vec![q(5, 1), q(1, 7), q(3, 1)], tail, negative }).unwrap();
            let a = classify_shift(&plain, &one).unwrap().classification;
            let b = classify_shift(&bumped, &one).unwrap().classification;
            assert_eq!(a.frequently_hypercyclic.verdict, b.frequently_hypercyclic.verdict);
            assert_eq!(a.chaotic.verdict, b.chaotic.verdict);
        }
    }
}
