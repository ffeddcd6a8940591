//! Finitely supported `L^p` vectors on atoms and the action of `T φ = φ∘f`
//! and of its right inverse `S`.
//!
//! `T` moves the amplitude sitting on an atom `a` to `f⁻¹(a)`; `S` moves it
//! to `f(a)`. Exact vectors use [`Rational`] amplitudes with certified norms;
//! the hitting-density loop runs on any [`FloatScalar`].

use std::collections::{BTreeMap, HashMap};

use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atomic_system::{Atom, AtomicSystem, Mode, OrbitKind};
use crate::certified::{creal_pow, rational_to_f64, CReal, DEFAULT_PREC};
use crate::error::{Error, Result};
use crate::scalar::{FloatScalar, Scalar};
use crate::weight_profile::Summability;
use crate::Rational;

/// Work threshold (`horizon × support`) below which `Auto` density runs exactly.
pub const EXACT_DENSITY_WORK: u64 = 20_000;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LpVector<S> {
    entries: BTreeMap<Atom, S>,
}

impl<S: Scalar> LpVector<S> {
    pub fn zero() -> Self {
        LpVector { entries: BTreeMap::new() }
    }

    pub fn indicator(atom: Atom) -> Self {
        let mut v = Self::zero();
        v.entries.insert(atom, S::one());
        v
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (Atom, S)>) -> Self {
        let mut v = Self::zero();
        for (a, s) in entries {
            v.add_to(a, s);
        }
        v
    }

    /// Adds `amp` at `atom`, dropping the entry if it cancels to zero.
    pub fn add_to(&mut self, atom: Atom, amp: S) {
        let slot = self.entries.entry(atom).or_insert_with(S::zero);
        *slot = slot.clone() + amp;
        if slot.is_zero() {
            self.entries.remove(&atom);
        }
    }

    pub fn get(&self, atom: &Atom) -> Option<&S> {
        self.entries.get(atom)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Atom, &S)> {
        self.entries.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Atom> {
        self.entries.keys()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scaled(&self, c: &S) -> Self {
        Self::from_entries(self.entries.iter().map(|(a, s)| (*a, s.clone() * c.clone())))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, s) in &other.entries {
            out.add_to(*a, s.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(&-S::one()))
    }

    /// Converts amplitudes through their exact rational value.
    pub fn cast<T: Scalar>(&self) -> LpVector<T> {
        LpVector::from_entries(self.entries.iter().map(|(a, s)| {
            let v = match s.to_rational() {
                Some(q) => T::from_rational(&q),
                None => T::from_rational(&Rational::zero()),
            };
            (*a, v)
        }))
    }

    /// `‖φ‖_p^p` in double precision.
    pub fn norm_pow_f64(&self, system: &AtomicSystem) -> f64 {
        let p = rational_to_f64(system.p());
        self.entries
            .iter()
            .map(|(a, s)| s.abs_powf(p) * system.measure_f64(a).unwrap_or(f64::NAN))
            .sum()
    }
}

impl LpVector<Rational> {
    /// `‖φ‖_p^p = Σ |a_x|^p μ(x)`, certified.
    pub fn norm_pow(&self, system: &AtomicSystem) -> Result<CReal> {
        let mut acc = CReal::zero();
        for (a, s) in &self.entries {
            let amp = creal_pow(&CReal::exact(s.abs()), system.p(), DEFAULT_PREC);
            acc = (&acc + &(&amp * &system.measure(a)?)).round_outward(DEFAULT_PREC + 32);
        }
        Ok(acc)
    }

    /// `‖φ‖_p`, certified.
    pub fn norm(&self, system: &AtomicSystem) -> Result<CReal> {
        let pow = self.norm_pow(system)?;
        Ok(creal_pow(&pow, &system.p().recip(), DEFAULT_PREC))
    }
}

fn move_atoms<S: Scalar>(
    system: &AtomicSystem,
    phi: &LpVector<S>,
    shift: i64,
) -> Result<LpVector<S>> {
    let mut out = LpVector::zero();
    for (a, s) in phi.iter() {
        if !system.contains(a) {
            return Err(Error::UnknownAtom(*a));
        }
        // Mass pulled back past the start of an N-line is not in the range of fⁿ.
        if let Some(b) = system.iterate(a, shift) {
            out.add_to(b, s.clone());
        }
    }
    Ok(out)
}

/// `Tⁿ φ`: the amplitude at `a` moves to `f⁻ⁿ(a)`. In forward mode the mass on
/// atoms outside `fⁿ(X)` is dropped, since `φ∘fⁿ` never reads it.
pub fn apply_t<S: Scalar>(system: &AtomicSystem, phi: &LpVector<S>, n: u64) -> Result<LpVector<S>> {
    move_atoms(system, phi, -(n as i64))
}

/// `Sⁿ φ`: the amplitude at `a` moves to `fⁿ(a)`; `Tⁿ Sⁿ = id`.
pub fn apply_s<S: Scalar>(system: &AtomicSystem, phi: &LpVector<S>, n: u64) -> Result<LpVector<S>> {
    move_atoms(system, phi, n as i64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DensityMode {
    Fast,
    Exact,
    Auto,
}

/// Hit times of `‖Tⁿ φ - target‖_p < ε` for `1 <= n <= horizon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve {
    pub eps: f64,
    pub horizon: u64,
    pub hits: Vec<u64>,
    /// Steps where a certified comparison could not separate the distance from ε (exact mode).
    pub ambiguous: u64,
    pub exact: bool,
}

impl DensityCurve {
    pub fn count_up_to(&self, m: u64) -> usize {
        self.hits.partition_point(|&n| n <= m)
    }

    /// `#{1 <= n <= m : hit} / m`.
    pub fn density(&self, m: u64) -> f64 {
        if m == 0 {
            return 0.0;
        }
        self.count_up_to(m) as f64 / m as f64
    }

    /// `min_{M ∈ [N/2, N]} density(M)`.
    pub fn lower_density_estimate(&self) -> f64 {
        let lo = self.horizon.div_ceil(2).max(1);
        let mut count = self.count_up_to(lo - 1);
        let mut best = f64::INFINITY;
        let mut next = self.hits.partition_point(|&n| n < lo);
        for m in lo..=self.horizon {
            while next < self.hits.len() && self.hits[next] == m {
                count += 1;
                next += 1;
            }
            best = best.min(count as f64 / m as f64);
        }
        if best.is_finite() {
            best
        } else {
            0.0
        }
    }

    /// CSV rows `M,count,density` every `step` values of `M`.
    pub fn to_csv(&self, step: u64) -> String {
        let mut out = String::from("M,count,density\n");
        let step = step.max(1);
        let mut m = step.min(self.horizon);
        while m <= self.horizon && m > 0 {
            out.push_str(&format!("{m},{},{:.9}\n", self.count_up_to(m), self.density(m)));
            if m == self.horizon {
                break;
            }
            m = (m + step).min(self.horizon);
        }
        out
    }
}

/// Per-orbit dense weight tables covering every index a run can touch.
struct WeightTables<F> {
    tables: HashMap<usize, (i64, Vec<F>)>,
}

impl<F: FloatScalar> WeightTables<F> {
    fn build(system: &AtomicSystem, indices: &HashMap<usize, (i64, i64)>) -> Result<Self> {
        let mut tables = HashMap::new();
        for (&orbit, &(lo, hi)) in indices {
            let spec = system.orbit(orbit);
            let (lo, hi) = match spec.kind {
                OrbitKind::Cycle(len) => (0, len as i64 - 1),
                OrbitKind::NLine => (lo.max(0), hi),
                OrbitKind::ZLine => (lo, hi),
            };
            let table = (lo..=hi)
                .map(|k| {
                    spec.weights
                        .weight_f64(k)
                        .map(|w| F::from(w).expect("float conversion"))
                        .ok_or(Error::Profile(crate::weight_profile::ProfileError::OutOfDomain(k)))
                })
                .collect::<Result<Vec<F>>>()?;
            tables.insert(orbit, (lo, table));
        }
        Ok(WeightTables { tables })
    }

    fn get(&self, orbit: usize, index: i64) -> F {
        let (lo, t) = &self.tables[&orbit];
        t[(index - lo) as usize]
    }
}

/// Hitting statistics in floating point, parallel over `n`.
pub fn hitting_density<F: FloatScalar>(
    system: &AtomicSystem,
    phi: &LpVector<F>,
    target: &LpVector<F>,
    eps: f64,
    horizon: u64,
) -> Result<DensityCurve> {
    let p = F::from(rational_to_f64(system.p())).expect("float conversion");
    let h = horizon as i64;
    let mut ranges: HashMap<usize, (i64, i64)> = HashMap::new();
    let mut widen = |a: &Atom, lo: i64, hi: i64| {
        let r = ranges.entry(a.orbit).or_insert((lo, hi));
        r.0 = r.0.min(lo);
        r.1 = r.1.max(hi);
    };
    for a in phi.support() {
        if !system.contains(a) {
            return Err(Error::UnknownAtom(*a));
        }
        widen(a, a.index - h, a.index);
    }
    for a in target.support() {
        if !system.contains(a) {
            return Err(Error::UnknownAtom(*a));
        }
        widen(a, a.index, a.index);
    }
    let tables = WeightTables::<F>::build(system, &ranges)?;
    let entries: Vec<(Atom, F)> = phi.iter().map(|(a, s)| (*a, s.abs().powf(p))).collect();
    let targets: Vec<(Atom, F, F)> =
        target.iter().map(|(a, s)| (*a, *s, tables.get(a.orbit, a.index))).collect();
    let eps_p = F::from(eps).expect("float conversion").powf(p);
    // ‖Tⁿφ‖^p for n = 1..=horizon, one block of consecutive n per task. On
    // lines the weights read by an atom over a block form a contiguous slice.
    const BLOCK: usize = 4096;
    let mut norms = vec![F::zero(); horizon as usize];
    norms.par_chunks_mut(BLOCK).enumerate().for_each(|(b, chunk)| {
        let n0 = (b * BLOCK) as i64 + 1;
        for (a, amp_p) in &entries {
            match system.orbit(a.orbit).kind {
                OrbitKind::Cycle(_) => {
                    for (k, slot) in chunk.iter_mut().enumerate() {
                        let y = system.iterate(a, -(n0 + k as i64)).expect("cycles are bijective");
                        *slot = *slot + *amp_p * tables.get(y.orbit, y.index);
                    }
                }
                _ => {
                    let (lo, table) = &tables.tables[&a.orbit];
                    for (k, slot) in chunk.iter_mut().enumerate() {
                        // Index a - n; below `lo` only happens past the start of an N-line.
                        let j = a.index - n0 - k as i64 - lo;
                        if j < 0 {
                            break;
                        }
                        *slot = *slot + *amp_p * table[j as usize];
                    }
                }
            }
        }
    });
    let hits: Vec<u64> = (1..=horizon)
        .into_par_iter()
        .filter(|&n| {
            // ‖Tⁿφ - t‖^p = ‖Tⁿφ‖^p + Σ_{x ∈ supp t} (|Tⁿφ(x) - t_x|^p - |Tⁿφ(x)|^p) μ(x).
            let mut total = norms[n as usize - 1];
            for (x, t, mu) in &targets {
                let v = system
                    .iterate(x, n as i64)
                    .and_then(|y| phi.get(&y).copied())
                    .unwrap_or_else(F::zero);
                total = total + ((v - *t).abs().powf(p) - v.abs().powf(p)) * *mu;
            }
            total.max(F::zero()) < eps_p
        })
        .collect();
    Ok(DensityCurve { eps, horizon, hits, ambiguous: 0, exact: false })
}

/// Hitting statistics with certified comparisons against `ε`.
pub fn hitting_density_exact(
    system: &AtomicSystem,
    phi: &LpVector<Rational>,
    target: &LpVector<Rational>,
    eps: &Rational,
    horizon: u64,
) -> Result<DensityCurve> {
    let eps_p = creal_pow(&CReal::exact(eps.clone()), system.p(), DEFAULT_PREC);
    let outcomes: Vec<Result<Option<bool>>> = (1..=horizon)
        .into_par_iter()
        .map(|n| {
            let d = apply_t(system, phi, n)?.sub(target).norm_pow(system)?;
            Ok(if d.definitely_lt(&eps_p) {
                Some(true)
            } else if eps_p.definitely_le(&d) {
                Some(false)
            } else {
                None
            })
        })
        .collect();
    let mut hits = Vec::new();
    let mut ambiguous = 0;
    for (n, o) in (1..=horizon).zip(outcomes) {
        match o? {
            Some(true) => hits.push(n),
            Some(false) => {}
            None => ambiguous += 1,
        }
    }
    Ok(DensityCurve { eps: rational_to_f64(eps), horizon, hits, ambiguous, exact: true })
}

/// Chooses the exact path for small workloads.
pub fn hitting_density_auto(
    system: &AtomicSystem,
    phi: &LpVector<Rational>,
    target: &LpVector<Rational>,
    eps: &Rational,
    horizon: u64,
    mode: DensityMode,
) -> Result<DensityCurve> {
    let small = horizon.saturating_mul((phi.len() + target.len()) as u64) <= EXACT_DENSITY_WORK;
    match mode {
        DensityMode::Exact => hitting_density_exact(system, phi, target, eps, horizon),
        DensityMode::Auto if small => hitting_density_exact(system, phi, target, eps, horizon),
        _ => hitting_density(system, &phi.cast::<f64>(), &target.cast::<f64>(), rational_to_f64(eps), horizon),
    }
}

/// A vector with `Tᴺ π = π`, stored by residues: line atoms are kept with
/// index in `0..period` and stand for every index congruent to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicVector {
    pub period: u64,
    residues: BTreeMap<Atom, Rational>,
}

impl PeriodicVector {
    fn reduce(system: &AtomicSystem, period: u64, a: Atom) -> Atom {
        let m = match system.orbit(a.orbit).kind {
            OrbitKind::Cycle(len) => len as i64,
            _ => period as i64,
        };
        Atom { index: a.index.mod_floor(&m), ..a }
    }

    /// `Tⁿ π`, again in residue form.
    pub fn apply_t(&self, system: &AtomicSystem, n: u64) -> PeriodicVector {
        let residues = self
            .residues
            .iter()
            .map(|(a, s)| (Self::reduce(system, self.period, Atom { index: a.index - n as i64, ..*a }), s.clone()))
            .collect();
        PeriodicVector { period: self.period, residues }
    }

    pub fn value_at(&self, system: &AtomicSystem, a: &Atom) -> Rational {
        self.residues.get(&Self::reduce(system, self.period, *a)).cloned().unwrap_or_else(Rational::zero)
    }

    /// The restriction of `π` to line indices in `[-m, m]` (cycles in full).
    pub fn truncate(&self, system: &AtomicSystem, m: i64) -> LpVector<Rational> {
        let mut out = LpVector::zero();
        for (a, s) in &self.residues {
            match system.orbit(a.orbit).kind {
                OrbitKind::Cycle(_) => out.add_to(*a, s.clone()),
                kind => {
                    let n = self.period as i64;
                    let lo = if kind == OrbitKind::NLine { 0 } else { -m };
                    let mut k = lo + (a.index - lo).mod_floor(&n);
                    while k <= m {
                        out.add_to(Atom { index: k, ..*a }, s.clone());
                        k += n;
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicApprox {
    pub vector: PeriodicVector,
    pub period: u64,
    /// Certified upper bound on `‖π - target‖_p`.
    pub distance: CReal,
}

fn lcm_of_cycles(system: &AtomicSystem, target: &LpVector<Rational>) -> u64 {
    target
        .support()
        .filter_map(|a| match system.orbit(a.orbit).kind {
            OrbitKind::Cycle(len) => Some(len),
            _ => None,
        })
        .fold(1u64, |acc, l| acc.lcm(&l))
}

/// A periodic vector within `ε` of each target. Cycle parts are periodic
/// already; line parts are repeated with a period `N` wider than their
/// window, the copies being summable along the orbit.
pub fn periodic_points_dense_check(
    system: &AtomicSystem,
    targets: &[LpVector<Rational>],
    eps: &Rational,
) -> Result<Vec<PeriodicApprox>> {
    targets.iter().map(|t| periodic_approximation(system, t, eps)).collect()
}

pub fn periodic_approximation(
    system: &AtomicSystem,
    target: &LpVector<Rational>,
    eps: &Rational,
) -> Result<PeriodicApprox> {
    let eps_c = CReal::exact(eps.clone());
    let mut window = 0i64;
    let mut line_orbits = Vec::new();
    for a in target.support() {
        if !system.contains(a) {
            return Err(Error::UnknownAtom(*a));
        }
        let spec = system.orbit(a.orbit);
        if spec.is_cycle() {
            continue;
        }
        window = window.max(a.index.abs());
        if !line_orbits.contains(&a.orbit) {
            if !spec.orbit_sum().is_summable() {
                return Err(Error::CannotApproximate(format!(
                    "orbit {} has no certified finite orbit sum",
                    a.orbit
                )));
            }
            line_orbits.push(a.orbit);
        }
    }
    let base = lcm_of_cycles(system, target);
    let min_period = (2 * window + 1) as u64;
    let mut period = base * min_period.div_ceil(base);
    let mut attempts = 0;
    loop {
        // Copies k ≠ 0 of a line atom sit at |index| >= N - window.
        let mut err_pow = CReal::zero();
        for (a, s) in target.iter() {
            let spec = system.orbit(a.orbit);
            if spec.is_cycle() {
                continue;
            }
            let reach = (period as i64 - window - 1).max(0) as u64;
            let tail = spec
                .weights
                .tail_mass_upper(reach)
                .ok_or_else(|| Error::CannotApproximate(format!("orbit {} has no tail bound", a.orbit)))?;
            let amp = creal_pow(&CReal::exact(s.abs()), system.p(), DEFAULT_PREC);
            err_pow = &err_pow + &(&amp * &CReal::exact(tail));
        }
        let distance = if err_pow.hi().is_zero() {
            CReal::zero()
        } else {
            CReal::from_bounds(Rational::zero(), creal_pow(&err_pow, &system.p().recip(), DEFAULT_PREC).hi())
        };
        if distance.definitely_lt(&eps_c) {
            let residues: BTreeMap<Atom, Rational> = target
                .iter()
                .map(|(a, s)| (PeriodicVector::reduce(system, period, *a), s.clone()))
                .collect();
            return Ok(PeriodicApprox { vector: PeriodicVector { period, residues }, period, distance });
        }
        attempts += 1;
        if attempts > 40 {
            return Err(Error::CannotApproximate("tail bounds never fell below ε".into()));
        }
        period *= 2;
    }
}

/// Orbit-based evidence for topological mixing between `B(u, ε)` and `B(v, ε)`:
/// at step `k`, `x = u + Sᵏ v` lies within `‖Sᵏ v‖` of `u` and `Tᵏ x` lies
/// within `‖Tᵏ u‖` of `v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingEvidence {
    pub k_max: u64,
    /// Steps where one of the two norms is not certified below `ε`.
    pub failures: Vec<u64>,
    /// Least `k₀` with every `k ∈ [k₀, k_max]` certified.
    pub settled_from: Option<u64>,
}

pub fn mixing_evidence(
    system: &AtomicSystem,
    u: &LpVector<Rational>,
    v: &LpVector<Rational>,
    eps: &Rational,
    k_max: u64,
) -> Result<MixingEvidence> {
    if system.mode() == Mode::Forward {
        return Err(Error::BijectiveOnly);
    }
    let eps_p = creal_pow(&CReal::exact(eps.clone()), system.p(), DEFAULT_PREC);
    let ok: Vec<Result<bool>> = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let a = apply_s(system, v, k)?.norm_pow(system)?;
            let b = apply_t(system, u, k)?.norm_pow(system)?;
            Ok(a.definitely_lt(&eps_p) && b.definitely_lt(&eps_p))
        })
        .collect();
    let mut failures = Vec::new();
    for (k, r) in (1..=k_max).zip(ok) {
        if !r? {
            failures.push(k);
        }
    }
    let settled_from = match failures.last() {
        None => Some(1),
        Some(&k) if k < k_max => Some(k + 1),
        _ => None,
    };
    Ok(MixingEvidence { k_max, failures, settled_from })
}

/// `Σ_{n>=1} ‖Tⁿ φ‖_p^p` and `Σ_{n>=1} ‖Sⁿ φ‖_p^p` from orbit summability.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCertificate {
    pub forward: CReal,
    pub backward: CReal,
}

/// Certifies the two norm series of a finitely supported vector: each atom
/// contributes `|a|^p` times the weight mass strictly before (for `T`) or
/// strictly after (for `S`) its index.
pub fn norm_series(system: &AtomicSystem, phi: &LpVector<Rational>) -> Result<SeriesCertificate> {
    let mut forward = CReal::zero();
    let mut backward = CReal::zero();
    for (a, s) in phi.iter() {
        let spec = system.orbit(a.orbit);
        if spec.is_cycle() {
            return Err(Error::TailNotCertified(format!("atom {a} lies on a cycle; the series diverge")));
        }
        let amp = creal_pow(&CReal::exact(s.abs()), system.p(), DEFAULT_PREC);
        let below = if spec.kind == OrbitKind::NLine {
            Summability::Summable { total: spec.weights.partial_sum(0, a.index - 1)? }
        } else {
            spec.weights.sum_below(a.index - 1)
        };
        let above = spec.weights.sum_above(a.index + 1);
        match (below, above) {
            (Summability::Summable { total: b }, Summability::Summable { total: f }) => {
                forward = &forward + &(&amp * &b);
                backward = &backward + &(&amp * &f);
            }
            (b, f) => {
                return Err(Error::TailNotCertified(format!(
                    "atom {a}: {}",
                    if b.is_summable() { describe(&f) } else { describe(&b) }
                )))
            }
        }
    }
    Ok(SeriesCertificate { forward, backward })
}

fn describe(s: &Summability) -> String {
    match s {
        Summability::Summable { total } => format!("summable ({total})"),
        Summability::Divergent(w) => format!("divergent: {w}"),
        Summability::Undecided(why) => format!("undecided: {why}"),
    }
}

/// Largest `|index|` in the support.
pub fn support_radius<S: Scalar>(phi: &LpVector<S>) -> i64 {
    phi.support().map(|a| a.index.abs()).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic_system::{Copies, OrbitSpec};
    use crate::certified::q;
    use crate::weight_profile::WeightProfile;

    fn halving_line() -> AtomicSystem {
        let w = WeightProfile::two_sided(q(1, 1), q(1, 2), q(1, 1), q(1, 2));
        AtomicSystem::bijective(vec![OrbitSpec::z_line(w).with_copies(Copies::Countable)], q(2, 1)).unwrap()
    }

    fn cycle3() -> AtomicSystem {
        let w = WeightProfile::table((0..3).map(|k| (k, q(1, 3))));
        AtomicSystem::bijective(vec![OrbitSpec::cycle(3, w)], q(1, 1)).unwrap()
    }

    #[test]
    fn shifts_move_indicators() {
        let s = halving_line();
        let chi = LpVector::<Rational>::indicator(Atom::new(0, 0, 0));
        assert_eq!(apply_t(&s, &chi, 1).unwrap(), LpVector::indicator(Atom::new(0, 0, -1)));
        assert_eq!(apply_t(&s, &chi, 0).unwrap(), chi);
        assert_eq!(apply_s(&s, &chi, 1).unwrap(), LpVector::indicator(Atom::new(0, 0, 1)));
        let c = cycle3();
        let chi = LpVector::<Rational>::indicator(Atom::new(0, 0, 0));
        assert_eq!(apply_t(&c, &chi, 3).unwrap(), chi);
        assert_eq!(apply_s(&c, &chi, 3).unwrap(), chi);
    }

    #[test]
    fn norms() {
        let s = AtomicSystem::bijective(vec![OrbitSpec::z_line(WeightProfile::constant(q(1, 4)))], q(2, 1)).unwrap();
        let chi = LpVector::<Rational>::indicator(Atom::base(0));
        assert_eq!(chi.norm(&s).unwrap(), CReal::exact(q(1, 2)));
        assert_eq!(LpVector::<Rational>::zero().norm(&s).unwrap(), CReal::zero());
    }

    #[test]
    fn forward_mode_drops_mass_before_the_start() {
        let s = AtomicSystem::new(
            vec![OrbitSpec::n_line(WeightProfile::constant(q(1, 1)))],
            q(1, 1),
            Mode::Forward,
        )
        .unwrap();
        let phi = LpVector::from_entries([(Atom::new(0, 0, 0), q(1, 1)), (Atom::new(0, 0, 2), q(3, 1))]);
        assert_eq!(apply_t(&s, &phi, 1).unwrap(), LpVector::indicator(Atom::new(0, 0, 1)).scaled(&q(3, 1)));
    }

    #[test]
    fn density_on_a_cycle_is_periodic() {
        let c = cycle3();
        let chi = LpVector::<Rational>::indicator(Atom::new(0, 0, 1));
        let d = hitting_density_exact(&c, &chi, &chi, &q(1, 10), 30).unwrap();
        assert_eq!(d.hits, vec![3, 6, 9, 12, 15, 18, 21, 24, 27, 30]);
        for n in (3..=30).step_by(3) {
            assert_eq!(d.density(n), 1.0 / 3.0);
        }
        let f = hitting_density(&c, &chi.cast::<f64>(), &chi.cast::<f64>(), 0.1, 30).unwrap();
        assert_eq!(f.hits, d.hits);
        let g = hitting_density(&c, &chi.cast::<f32>(), &chi.cast::<f32>(), 0.1, 30).unwrap();
        assert_eq!(g.hits, d.hits);
    }

    #[test]
    fn disjoint_orbits_never_hit() {
        let s = halving_line();
        let phi = LpVector::<Rational>::indicator(Atom::new(0, 1, 0));
        let target = LpVector::<Rational>::indicator(Atom::new(0, 0, 0)).scaled(&q(2, 1));
        let d = hitting_density_auto(&s, &phi, &target, &q(1, 2), 200, DensityMode::Auto).unwrap();
        assert!(d.hits.is_empty());
        assert_eq!(d.lower_density_estimate(), 0.0);
    }

    #[test]
    fn periodic_point_near_base_atom() {
        let s = halving_line();
        let t = LpVector::<Rational>::indicator(Atom::base(0));
        let a = periodic_approximation(&s, &t, &q(1, 10)).unwrap();
        assert!(a.distance.definitely_less_than(&q(1, 10)));
        assert_eq!(a.vector.apply_t(&s, a.period), a.vector);
        // The distance bound dominates the exact distance of a large truncation.
        let trunc = a.vector.truncate(&s, 5 * a.period as i64);
        let d = trunc.sub(&t).norm(&s).unwrap();
        assert!(d.hi() <= a.distance.hi());
        let zero = periodic_approximation(&s, &LpVector::zero(), &q(1, 10)).unwrap();
        assert_eq!(zero.distance, CReal::zero());
        let c = cycle3();
        let on_cycle = periodic_approximation(&c, &LpVector::indicator(Atom::new(0, 0, 2)), &q(1, 100)).unwrap();
        assert_eq!((on_cycle.period, on_cycle.distance), (3, CReal::zero()));
    }

    #[test]
    fn periodic_points_need_summable_orbits() {
        let s = AtomicSystem::bijective(vec![OrbitSpec::z_line(WeightProfile::constant(q(1, 1)))], q(1, 1)).unwrap();
        let t = LpVector::<Rational>::indicator(Atom::base(0));
        assert!(matches!(periodic_approximation(&s, &t, &q(1, 2)), Err(Error::CannotApproximate(_))));
    }

    #[test]
    fn norm_series_example() {
        let s = halving_line();
        let chi = LpVector::<Rational>::indicator(Atom::base(0));
        let c = norm_series(&s, &chi).unwrap();
        assert_eq!(c.forward, CReal::one());
        assert_eq!(c.backward, CReal::one());
        assert_eq!(norm_series(&s, &LpVector::zero()).unwrap().forward, CReal::zero());
        assert!(norm_series(&cycle3(), &LpVector::indicator(Atom::base(0))).is_err());
    }

    #[test]
    fn mixing_evidence_on_summable_line() {
        let s = halving_line();
        let u = LpVector::<Rational>::indicator(Atom::base(0));
        let e = mixing_evidence(&s, &u, &u, &q(1, 10), 20).unwrap();
        // 2^{-k/2} < 1/10 once k >= 7.
        assert_eq!(e.settled_from, Some(7));
    }

    #[test]
    fn density_csv() {
        let d = DensityCurve { eps: 0.1, horizon: 4, hits: vec![2, 4], ambiguous: 0, exact: true };
        assert_eq!(d.to_csv(2), "M,count,density\n2,1,0.500000000\n4,2,0.500000000\n");
        assert_eq!(d.lower_density_estimate(), 0.0f64.max(1.0 / 3.0));
    }
}
