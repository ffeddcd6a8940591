//! Orbit-level conditions on atomic systems.
//!
//! On atoms the summability condition reduces to a per-atom test: a set of
//! finite measure is a countable union of atoms, so it is approximated from
//! inside by finite atom sets, whose orbit sums are finite exactly when every
//! atom's is; conversely an atom `{x}` with divergent orbit sum cannot be
//! trimmed by less than its own mass, so it defeats the condition alone.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::atomic_system::{Atom, AtomicSystem, Copies, Mode, OrbitKind};
use crate::certified::{format_rational, pow_enclosure, CReal, DEFAULT_PREC};
use crate::error::{Error, Result};
use crate::weight_profile::{
    DivergenceWitness, RatioSup, Side, SideLaw, Summability, WeightFamily, WeightProfile,
};
use crate::Rational;

/// Default half-width of the explicitly checked index window.
pub const DEFAULT_WINDOW: u64 = 1000;

#[derive(Debug, Clone, PartialEq)]
pub enum ScFailure {
    /// The atom lies on a cycle, so its orbit sum counts it infinitely often.
    Conservative,
    Divergent(DivergenceWitness),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScVerdict {
    /// Every orbit sum is finite; one certified total per orbit specification.
    Holds { orbit_sums: Vec<CReal> },
    Fails { atom: Atom, reason: ScFailure },
    Undecided(String),
}

impl ScVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, ScVerdict::Holds { .. })
    }

    pub fn fails(&self) -> bool {
        matches!(self, ScVerdict::Fails { .. })
    }
}

pub fn check_sc(system: &AtomicSystem) -> Result<ScVerdict> {
    if system.mode() == Mode::Forward {
        return Err(Error::BijectiveOnly);
    }
    let mut sums = Vec::new();
    let mut undecided = None;
    for (i, o) in system.orbits().iter().enumerate() {
        let atom = Atom::base(i);
        if o.is_cycle() {
            return Ok(ScVerdict::Fails { atom, reason: ScFailure::Conservative });
        }
        match o.orbit_sum() {
            Summability::Summable { total } => sums.push(total),
            Summability::Divergent(w) => return Ok(ScVerdict::Fails { atom, reason: ScFailure::Divergent(w) }),
            Summability::Undecided(why) => {
                undecided.get_or_insert(format!("orbit {i}: {why}"));
            }
        }
    }
    Ok(match undecided {
        Some(why) => ScVerdict::Undecided(why),
        None => ScVerdict::Holds { orbit_sums: sums },
    })
}

/// `d_n(W) = min_{x∈W} μ(fⁿ x)/μ(x)` on a checked window plus tail data.
#[derive(Debug, Clone, PartialEq)]
pub struct DnSequence {
    pub wandering_set: Vec<Atom>,
    pub window: u64,
    /// `n ↦ d_n` for `n ∈ [-window, window]` (`[0, window]` in forward mode).
    pub values: BTreeMap<i64, CReal>,
    pub star_c: Option<CReal>,
    pub forward_only: bool,
    /// `Σ_{n>window} d_n` and `Σ_{n<-window} d_n`, per side.
    pub tails: [Summability; 2],
}

fn side_slot(side: Side) -> usize {
    match side {
        Side::Positive => 0,
        Side::Negative => 1,
    }
}

pub fn check_wandering(system: &AtomicSystem, w: &[Atom]) -> Result<()> {
    if w.is_empty() {
        return Err(Error::InvalidSystem("the wandering set is empty".into()));
    }
    for (i, x) in w.iter().enumerate() {
        if !system.contains(x) {
            return Err(Error::UnknownAtom(*x));
        }
        if system.orbit(x.orbit).is_cycle() {
            return Err(Error::NotWandering(*x, *x));
        }
        for y in &w[..i] {
            if x.same_orbit(y) {
                return Err(Error::NotWandering(*y, *x));
            }
        }
    }
    Ok(())
}

/// `Σ_{k>=1} μ(f^{±k} x)/μ(x)` beyond `skip` steps, from the orbit profile.
fn atom_tail(system: &AtomicSystem, x: &Atom, side: Side, skip: u64) -> Result<Summability> {
    let o = system.orbit(x.orbit);
    let mu = system.measure(x)?;
    let raw = match side {
        Side::Positive => o.weights.sum_above(x.index + skip as i64 + 1),
        Side::Negative => {
            if o.kind == OrbitKind::NLine {
                return Ok(Summability::Summable { total: CReal::zero() });
            }
            o.weights.sum_below(x.index - skip as i64 - 1)
        }
    };
    Ok(match raw {
        Summability::Summable { total } => Summability::Summable { total: &total / &mu },
        Summability::Divergent(DivergenceWitness::LowerBound { from, c, s, .. }) => {
            // Re-anchor the profile bound at the atom: with m the profile index,
            // 1 + m <= (1 + |index|)(1 + k), so terms stay >= c' (1 + k)^{-s}.
            let shift = Rational::from_integer((1 + x.index.unsigned_abs()).into());
            let scale = if s.is_zero() { CReal::one() } else { pow_enclosure(&shift, &-s.clone(), DEFAULT_PREC) };
            let c_atom = (&(&CReal::exact(c) * &scale) / &mu).lo();
            let from = (from as i64 + x.index.abs()).max(1) as u64;
            Summability::Divergent(DivergenceWitness::LowerBound { side, from, c: c_atom, s })
        }
        other => other,
    })
}

pub fn compute_dn(system: &AtomicSystem, w: &[Atom], window: u64) -> Result<DnSequence> {
    check_wandering(system, w)?;
    let forward_only = system.mode() == Mode::Forward;
    let lo = if forward_only { 0 } else { -(window as i64) };
    let mut values = BTreeMap::new();
    for n in lo..=window as i64 {
        let mut best: Option<CReal> = None;
        for x in w {
            let Some(y) = system.iterate(x, n) else { continue };
            let r = &system.measure(&y)? / &system.measure(x)?;
            best = Some(match best {
                None => r,
                Some(b) => {
                    if r.definitely_lt(&b) {
                        r
                    } else if b.definitely_le(&r) {
                        b
                    } else {
                        b.min(&r)
                    }
                }
            });
        }
        if let Some(b) = best {
            values.insert(n, b);
        }
    }
    let mut tails = [Summability::Undecided(String::new()), Summability::Undecided(String::new())];
    for side in [Side::Positive, Side::Negative] {
        tails[side_slot(side)] = if forward_only && side == Side::Negative {
            Summability::Summable { total: CReal::zero() }
        } else {
            min_tail(system, w, side, window)?
        };
    }
    let star_c = system.star_constant().ok().map(|s| s.value);
    Ok(DnSequence { wandering_set: w.to_vec(), window, values, star_c, forward_only, tails })
}

/// The tail of a minimum: bounded above by any atom's convergent tail, and
/// divergent when every atom's tail carries a comparison witness.
fn min_tail(system: &AtomicSystem, w: &[Atom], side: Side, window: u64) -> Result<Summability> {
    let mut best: Option<CReal> = None;
    let mut witnesses = Vec::new();
    let mut undecided = None;
    for x in w {
        match atom_tail(system, x, side, window)? {
            Summability::Summable { total } => {
                let hi = total.hi();
                if best.as_ref().is_none_or(|b| hi < b.hi()) {
                    best = Some(CReal::from_bounds(Rational::zero(), hi));
                }
            }
            Summability::Divergent(w) => witnesses.push(w),
            Summability::Undecided(why) => undecided = Some(why),
        }
    }
    if let Some(b) = best {
        return Ok(Summability::Summable { total: b });
    }
    if let Some(why) = undecided {
        return Ok(Summability::Undecided(why));
    }
    // min_x c_x (1+k)^{-s_x} >= (min c)(1+k)^{-max s} for k >= max from.
    let mut c = None::<Rational>;
    let mut s = Rational::zero();
    let mut from = window + 1;
    for DivergenceWitness::LowerBound { c: cx, s: sx, from: fx, .. } in witnesses {
        c = Some(c.map_or(cx.clone(), |c| std::cmp::min(c, cx)));
        s = std::cmp::max(s, sx);
        from = from.max(fx);
    }
    Ok(Summability::Divergent(DivergenceWitness::LowerBound {
        side,
        from,
        c: c.expect("nonempty wandering set"),
        s,
    }))
}

impl DnSequence {
    pub fn get(&self, n: i64) -> Option<&CReal> {
        self.values.get(&n)
    }

    /// CSV rows `n,d_n,d_n_exact` (decimal of the midpoint, then `num/den`).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,d_n,d_n_exact\n");
        for (n, d) in &self.values {
            out.push_str(&format!("{n},{:.12e},{}\n", d.to_f64(), format_rational(d.mid())));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NecessaryFh {
    /// `Σ d_n` certified finite; enclosure of the total.
    Passes { total: CReal },
    /// `Σ d_n = ∞`, so the operator is not frequently hypercyclic.
    FailsNecessary(DivergenceWitness),
    Undecided(String),
}

pub fn check_necessary_fh(seq: &DnSequence) -> NecessaryFh {
    let head: CReal = seq.values.values().sum();
    match (&seq.tails[0], &seq.tails[1]) {
        (Summability::Divergent(w), _) | (_, Summability::Divergent(w)) => NecessaryFh::FailsNecessary(w.clone()),
        (Summability::Undecided(why), _) | (_, Summability::Undecided(why)) => NecessaryFh::Undecided(why.clone()),
        (Summability::Summable { total: a }, Summability::Summable { total: b }) => {
            NecessaryFh::Passes { total: &(&head + a) + b }
        }
    }
}

/// Indices `n` in the window where `d_{n+1} >= d_n / c` is certifiably violated.
pub fn dn_ratio_violations(seq: &DnSequence) -> Vec<i64> {
    let Some(c) = &seq.star_c else { return Vec::new() };
    seq.values
        .iter()
        .filter_map(|(n, d)| {
            let next = seq.values.get(&(n + 1))?;
            (c * next).definitely_lt(d).then_some(*n)
        })
        .collect()
}

/// True when no window index violates `d_{n+1} >= c⁻¹ d_n`. Beyond the window
/// the inequality follows from `(★)` itself, which the star constant certifies.
pub fn check_dn_ratio(seq: &DnSequence) -> bool {
    dn_ratio_violations(seq).is_empty()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Distortion {
    /// `exact` is false when `k` is a certified upper bound rather than the supremum.
    Bounded { k: CReal, exact: bool },
    /// Ratios grow without bound; `lower_bound` is attained at `witness_n`.
    Unbounded { witness_n: i64, lower_bound: CReal },
    Undecided(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistortionCertificate {
    pub w: Vec<Atom>,
    pub verdict: Distortion,
}

/// One side's eventual behaviour of `n ↦ μ(fⁿ x)` in per-step terms.
#[derive(Debug, Clone, PartialEq)]
enum Growth {
    /// Block ratio `ratio` per `period` steps from profile index `start`.
    Geometric { start: u64, period: u64, ratio: CReal },
    Power { s: Rational },
    Unknown,
}

fn growth(profile: &WeightProfile, side: Side) -> Growth {
    match profile.side_law(side) {
        SideLaw::Geometric { start, period, ratio } => Growth::Geometric { start, period, ratio },
        SideLaw::Power { s, .. } if s.is_zero() => Growth::Geometric { start: 1, period: 1, ratio: CReal::one() },
        SideLaw::Power { s, .. } => Growth::Power { s },
        _ => Growth::Unknown,
    }
}

/// Compares per-step rates `ρ₁^{1/P₁}` and `ρ₂^{1/P₂}` via `ρ₁^{P₂}` vs `ρ₂^{P₁}`.
fn same_rate(a: (&CReal, u64), b: (&CReal, u64)) -> Option<bool> {
    let lhs = a.0.powi(b.1 as u32);
    let rhs = b.0.powi(a.1 as u32);
    if lhs == rhs && lhs.is_exact() {
        Some(true)
    } else if lhs.definitely_lt(&rhs) || rhs.definitely_lt(&lhs) {
        Some(false)
    } else {
        None
    }
}

fn distortion_ratio(system: &AtomicSystem, w: &[Atom], n: i64, mu_w: &CReal) -> Result<(CReal, CReal)> {
    let mut ratios = Vec::with_capacity(w.len());
    let mut image = CReal::zero();
    for x in w {
        let y = system.iterate(x, n).expect("lines are bi-infinite");
        let my = system.measure(&y)?;
        ratios.push(&my / &system.measure(x)?);
        image = &image + &my;
    }
    let big = &image / mu_w;
    let mut worst = CReal::one();
    for r in &ratios {
        for q in [r / &big, &big / r] {
            if worst.definitely_lt(&q) {
                worst = q;
            } else if !q.definitely_le(&worst) {
                worst = worst.max(&q);
            }
        }
    }
    Ok((worst, big))
}

pub fn check_bounded_distortion(system: &AtomicSystem, w: &[Atom], window: u64) -> Result<DistortionCertificate> {
    if !system.is_dissipative() {
        return Err(Error::NotDissipative);
    }
    if system.mode() == Mode::Forward {
        return Err(Error::BijectiveOnly);
    }
    check_wandering(system, w)?;
    for (i, o) in system.orbits().iter().enumerate() {
        match o.copies {
            Copies::Countable => {
                return Ok(DistortionCertificate {
                    w: w.to_vec(),
                    verdict: Distortion::Undecided(format!(
                        "orbit {i} has countably many copies; a finite-measure generating set needs copy-dependent base indices"
                    )),
                })
            }
            Copies::Finite(n) => {
                for copy in 0..n as i64 {
                    if !w.iter().any(|a| a.orbit == i && a.copy == copy) {
                        return Err(Error::NotGenerating(i));
                    }
                }
            }
        }
    }
    let cert = |verdict| Ok(DistortionCertificate { w: w.to_vec(), verdict });
    if w.len() == 1 {
        return cert(Distortion::Bounded { k: CReal::one(), exact: true });
    }
    let mu_w = system.set_measure(w)?;
    let mut exact = true;
    let mut horizon = 0u64;
    let mut lcm = 1u64;
    for side in [Side::Positive, Side::Negative] {
        let laws: Vec<Growth> = w.iter().map(|x| growth(&system.orbit(x.orbit).weights, side)).collect();
        if laws.contains(&Growth::Unknown) {
            return cert(Distortion::Undecided("a profile has no closed-form law on this side".into()));
        }
        let reference = &laws[0];
        for g in &laws[1..] {
            let agree = match (reference, g) {
                (Growth::Geometric { period: p1, ratio: r1, .. }, Growth::Geometric { period: p2, ratio: r2, .. }) => {
                    same_rate((r1, *p1), (r2, *p2))
                }
                (Growth::Power { s: s1 }, Growth::Power { s: s2 }) => Some(s1 == s2),
                _ => Some(false),
            };
            match agree {
                Some(true) => {}
                Some(false) => {
                    let n = side.index(window);
                    let (lower_bound, _) = distortion_ratio(system, w, n, &mu_w)?;
                    return cert(Distortion::Unbounded { witness_n: n, lower_bound });
                }
                None => return cert(Distortion::Undecided("growth rates indistinguishable at working precision".into())),
            }
        }
        for g in &laws {
            match g {
                Growth::Geometric { start, period, .. } => {
                    horizon = horizon.max(*start);
                    lcm = lcm.lcm(period);
                }
                Growth::Power { .. } => exact = false,
                Growth::Unknown => unreachable!(),
            }
        }
    }
    if !exact {
        // Equal power exponents: (1+|i+n|)/(1+|j+n|) <= 1 + |i - j| gives
        // r_n(x)/r_n(y) <= (1 + |i - j|)^{2s}, and the average R_n lies between.
        // Amplitudes cancel in r_n, so only the shape has to agree.
        let shape = |x: &Atom| match &system.orbit(x.orbit).weights.family {
            WeightFamily::Power { s, .. } => Some(s.clone()),
            _ => None,
        };
        let s = match shape(&w[0]) {
            Some(s) if w.iter().all(|x| shape(x).as_ref() == Some(&s)) => s,
            _ => return cert(Distortion::Undecided("power-law sides on profiles of different shapes".into())),
        };
        let span = w.iter().map(|x| x.index).max().unwrap() - w.iter().map(|x| x.index).min().unwrap();
        let k = if span > 0 {
            let base = Rational::from_integer((1 + span).into());
            pow_enclosure(&base, &(s * Rational::from_integer(2.into())), DEFAULT_PREC).hi()
        } else {
            Rational::one()
        };
        return cert(Distortion::Bounded { k: CReal::from_bounds(Rational::one(), k), exact: span == 0 });
    }
    // Beyond index offsets and law starts, every ratio repeats with period lcm.
    let offset = w.iter().map(|x| x.index.unsigned_abs()).max().unwrap_or(0);
    let reach = (offset + horizon + 2 * lcm + 1) as i64;
    let mut best = CReal::one();
    for n in -reach..=reach {
        let (r, _) = distortion_ratio(system, w, n, &mu_w)?;
        if best.definitely_lt(&r) {
            best = r;
        } else if !r.definitely_le(&best) {
            best = best.max(&r);
        }
    }
    cert(Distortion::Bounded { k: best, exact: true })
}

/// Subsets of `N` used as index sets in the Bayart–Ruzsa check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntegerSet {
    Naturals,
    Multiples(u64),
    Residues { modulus: u64, residues: Vec<u64> },
    Explicit(Vec<u64>),
}

impl IntegerSet {
    pub fn contains(&self, n: u64) -> bool {
        match self {
            IntegerSet::Naturals => true,
            IntegerSet::Multiples(d) => n.is_multiple_of(*d),
            IntegerSet::Residues { modulus, residues } => residues.contains(&(n % modulus)),
            IntegerSet::Explicit(v) => v.binary_search(&n).is_ok(),
        }
    }

    pub fn up_to(&self, horizon: u64) -> Vec<u64> {
        match self {
            IntegerSet::Explicit(v) => v.iter().copied().filter(|&n| n <= horizon).collect(),
            _ => (0..=horizon).filter(|&n| self.contains(n)).collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            IntegerSet::Multiples(0) => Err(Error::InvalidSystem("multiples of 0".into())),
            IntegerSet::Residues { modulus: 0, .. } => Err(Error::InvalidSystem("modulus 0".into())),
            IntegerSet::Explicit(v) if v.windows(2).any(|p| p[0] >= p[1]) => {
                Err(Error::InvalidSystem("explicit set must be strictly increasing".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrReport {
    pub horizon: u64,
    /// `max_{n ∈ A ∩ [0, horizon]} β_n`.
    pub max_beta: f64,
    pub argmax: u64,
    /// `Σ_{|k| <= horizon} α_k`.
    pub alpha_head_sum: f64,
    /// Density of `A` up to the horizon.
    pub density: f64,
}

/// `β_n = Σ_{m ∈ A, m <= horizon} α_{m-n}` for `n ∈ A ∩ [0, horizon]`.
pub fn check_br_lemma(alpha: &WeightProfile, set: &IntegerSet, horizon: u64) -> Result<BrReport> {
    set.validate()?;
    let ratio_ok = |r: RatioSup| matches!(r, RatioSup::Finite { .. });
    if !ratio_ok(alpha.backward_ratio_sup()) && !ratio_ok(alpha.forward_ratio_sup()) {
        let n = match alpha.backward_ratio_sup() {
            RatioSup::Unbounded { witness } => witness.first().copied().unwrap_or(0),
            _ => 0,
        };
        return Err(Error::RatioHypothesisViolated { n });
    }
    let h = horizon as i64;
    let alpha_at = |k: i64| alpha.weight_f64(k).ok_or(Error::Profile(crate::weight_profile::ProfileError::OutOfDomain(k)));
    let values: Vec<f64> = (-h..=h).map(alpha_at).collect::<Result<_>>()?;
    let at = |k: i64| values[(k + h) as usize];
    let members = set.up_to(horizon);
    let head: f64 = values.iter().sum();
    let (max_beta, argmax) = match set {
        IntegerSet::Naturals | IntegerSet::Multiples(_) | IntegerSet::Residues { .. } => {
            let (modulus, residues) = match set {
                IntegerSet::Naturals => (1, vec![0]),
                IntegerSet::Multiples(d) => (*d, vec![0]),
                IntegerSet::Residues { modulus, residues } => (*modulus, residues.clone()),
                IntegerSet::Explicit(_) => unreachable!(),
            };
            // prefix[r][j]: sum of α over indices in [-h, h] congruent to r, up to the j-th.
            let m = modulus as i64;
            let mut prefix: Vec<Vec<f64>> = vec![vec![0.0]; modulus as usize];
            let mut starts = vec![0i64; modulus as usize];
            for k in -h..=h {
                let r = k.rem_euclid(m) as usize;
                if prefix[r].len() == 1 {
                    starts[r] = k;
                }
                let last = *prefix[r].last().unwrap();
                prefix[r].push(last + at(k));
            }
            let range_sum = |r: usize, lo: i64, hi: i64| -> f64 {
                // indices k ≡ r in [lo, hi]
                if lo > hi || prefix[r].len() == 1 {
                    return 0.0;
                }
                let first = starts[r];
                let idx = |k: i64| (k - first).div_euclid(m);
                let a = idx(lo + (r as i64 - lo).rem_euclid(m));
                let b = idx(hi - (hi - r as i64).rem_euclid(m));
                if b < a {
                    return 0.0;
                }
                prefix[r][(b + 1) as usize] - prefix[r][a as usize]
            };
            let mut best = (f64::NEG_INFINITY, 0u64);
            for &n in &members {
                let n_i = n as i64;
                let beta: f64 = residues
                    .iter()
                    .map(|&res| {
                        let r = (res as i64 - n_i).rem_euclid(m) as usize;
                        range_sum(r, -n_i, h - n_i)
                    })
                    .sum();
                if beta > best.0 {
                    best = (beta, n);
                }
            }
            best
        }
        IntegerSet::Explicit(_) => {
            let mut best = (f64::NEG_INFINITY, 0u64);
            for &n in &members {
                let beta: f64 = members.iter().map(|&m| at(m as i64 - n as i64)).sum();
                if beta > best.0 {
                    best = (beta, n);
                }
            }
            best
        }
    };
    Ok(BrReport {
        horizon,
        max_beta: if max_beta.is_finite() { max_beta } else { 0.0 },
        argmax,
        alpha_head_sum: head,
        density: members.len() as f64 / (horizon + 1) as f64,
    })
}

/// Runs the check at each horizon.
pub fn br_sweep(alpha: &WeightProfile, set: &IntegerSet, horizons: &[u64]) -> Result<Vec<BrReport>> {
    horizons.iter().map(|&h| check_br_lemma(alpha, set, h)).collect()
}
