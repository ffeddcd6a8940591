//! Constructive side of the frequent hypercyclicity criterion on atomic
//! systems: a dense family of simple functions, separated frequency slots,
//! and the series `Σ_k Σ_{n ∈ A_k} Sⁿ y_k` whose orbit revisits each `y_k`
//! along a set of positive lower density.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::atomic_system::{Atom, AtomicSystem, Copies, OrbitKind};
use crate::certified::{creal_pow, rational_to_f64, CReal, DEFAULT_PREC};
use crate::conditions::{check_sc, compute_dn, ScVerdict};
use crate::error::{Error, Result};
use crate::operator::{apply_s, apply_t, hitting_density, norm_series, LpVector};
use crate::weight_profile::Summability;
use crate::Rational;

/// Valuation step between consecutive slots; gives densities `∝ 4^{-k}`.
pub const VALUATION_STEP: u32 = 2;

/// Separated subsets `A_1, …, A_K` of `N`:
/// `A_k = {stretch·m : m >= 1, v₂(m) = VALUATION_STEP·(k - 1)}`.
///
/// Distinct 2-adic valuations make the slots disjoint, and every element is
/// a multiple of `stretch >= K`, so distinct elements are at least
/// `max(k, l)` apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencySchedule {
    pub slots: u32,
    pub stretch: u64,
}

impl FrequencySchedule {
    /// `stretch` is raised to `slots` when smaller.
    pub fn new(slots: u32, stretch: u64) -> Self {
        FrequencySchedule { slots, stretch: stretch.max(slots as u64).max(1) }
    }

    /// Slot of `n`, if any.
    pub fn slot_of(&self, n: u64) -> Option<u32> {
        if n == 0 || !n.is_multiple_of(self.stretch) {
            return None;
        }
        let v = (n / self.stretch).trailing_zeros();
        (v.is_multiple_of(VALUATION_STEP) && v / VALUATION_STEP < self.slots).then(|| v / VALUATION_STEP + 1)
    }

    pub fn contains(&self, k: u32, n: u64) -> bool {
        self.slot_of(n) == Some(k)
    }

    /// Elements of `A_k ∩ [1, horizon]` in increasing order.
    pub fn elements(&self, k: u32, horizon: u64) -> Vec<u64> {
        if k == 0 || k > self.slots {
            return Vec::new();
        }
        let unit = self.stretch << (VALUATION_STEP * (k - 1));
        (1..)
            .step_by(2)
            .map(|odd: u64| odd * unit)
            .take_while(|&n| n <= horizon)
            .collect()
    }

    /// Designed density `δ_k = 2^{-(VALUATION_STEP (k-1) + 1)} / stretch`.
    pub fn density(&self, k: u32) -> Rational {
        let denom = num_bigint::BigInt::from(self.stretch) << (VALUATION_STEP * (k - 1) + 1) as usize;
        Rational::new(1.into(), denom)
    }

    /// Every element of every slot up to `horizon`, tagged by slot.
    pub fn merged(&self, horizon: u64) -> Vec<(u64, u32)> {
        let mut all: Vec<(u64, u32)> =
            (1..=self.slots).flat_map(|k| self.elements(k, horizon).into_iter().map(move |n| (n, k))).collect();
        all.sort_unstable();
        all
    }

    /// Exhaustive check of disjointness, separation and designed density.
    pub fn verify(&self, horizon: u64) -> ScheduleCheck {
        let merged = self.merged(horizon);
        let collisions = merged.windows(2).filter(|w| w[0].0 == w[1].0).count() as u64;
        let mut separation_violations = 0u64;
        let mut min_gap = u64::MAX;
        let reach = self.slots as u64;
        for (i, &(n, k)) in merged.iter().enumerate() {
            for &(m, l) in merged[i + 1..].iter().take_while(|(m, _)| m - n < reach.max(1)) {
                if m != n && m - n < k.max(l) as u64 {
                    separation_violations += 1;
                }
            }
            if let Some(&(m, _)) = merged.get(i + 1) {
                min_gap = min_gap.min(m - n);
            }
        }
        let density_ratios = (1..=self.slots)
            .map(|k| {
                let count = self.elements(k, horizon).len() as f64;
                count / (rational_to_f64(&self.density(k)) * horizon as f64)
            })
            .collect();
        ScheduleCheck { horizon, collisions, separation_violations, min_gap, density_ratios }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleCheck {
    pub horizon: u64,
    /// Elements claimed by two slots.
    pub collisions: u64,
    /// Pairs closer than `max(k, l)`.
    pub separation_violations: u64,
    pub min_gap: u64,
    /// `#(A_k ∩ [1, horizon]) / (δ_k · horizon)`, per slot.
    pub density_ratios: Vec<f64>,
}

impl ScheduleCheck {
    pub fn passes(&self, density_floor: f64) -> bool {
        self.collisions == 0 && self.separation_violations == 0 && self.density_ratios.iter().all(|&r| r >= density_floor)
    }
}

/// Slots with `K` entries and the default stretch `max(K, 16)`.
pub fn schedule_frequencies(slots: u32) -> FrequencySchedule {
    FrequencySchedule::new(slots, 16)
}

/// Rational simple functions on atoms of summable lines, enumerated by level.
///
/// Level `ℓ` covers the window of copies `|c| < ℓ` and indices `|i| < ℓ` on
/// every summable line, with amplitudes `a/ℓ`, `|a| <= ℓ²`. Within a level the
/// window atoms are ordered as `Atom` and each carries one mixed-radix digit
/// `d ∈ [0, 2ℓ²]`, read as `0, 1/ℓ, -1/ℓ, 2/ℓ, -2/ℓ, …`. The all-zero code is
/// skipped, so member 1 is the indicator of the first line's base atom.
#[derive(Debug, Clone)]
pub struct DenseFamily {
    lines: Vec<usize>,
    copies: Vec<Copies>,
}

impl DenseFamily {
    /// Lines with certified summable orbit sums; needs at least one.
    pub fn new(system: &AtomicSystem) -> Result<Self> {
        let mut lines = Vec::new();
        let mut copies = Vec::new();
        for (i, o) in system.orbits().iter().enumerate() {
            if o.kind == OrbitKind::ZLine && o.orbit_sum().is_summable() {
                lines.push(i);
                copies.push(o.copies);
            }
        }
        if lines.is_empty() {
            return Err(Error::TailNotCertified("no line carries a summable orbit certificate".into()));
        }
        Ok(DenseFamily { lines, copies })
    }

    pub fn lines(&self) -> &[usize] {
        &self.lines
    }

    fn window(&self, level: u64) -> Vec<Atom> {
        let r = level as i64 - 1;
        let mut atoms = Vec::new();
        for (&orbit, copies) in self.lines.iter().zip(&self.copies) {
            for copy in -r..=r {
                if copies.contains(copy) {
                    atoms.extend((-r..=r).map(|index| Atom::new(orbit, copy, index)));
                }
            }
        }
        atoms.sort();
        atoms
    }

    /// Number of nonzero members at `level`, if it fits.
    fn level_size(&self, level: u64) -> Option<u128> {
        let radix = 2 * (level as u128).pow(2) + 1;
        let atoms = self.window(level).len() as u32;
        radix.checked_pow(atoms).map(|n| n - 1)
    }

    /// The `index`-th member, counting from 1.
    pub fn member(&self, index: u128) -> Option<LpVector<Rational>> {
        if index == 0 {
            return None;
        }
        let mut rest = index;
        for level in 1.. {
            let size = self.level_size(level)?;
            if rest <= size {
                return Some(self.decode(level, rest));
            }
            rest -= size;
        }
        unreachable!()
    }

    fn decode(&self, level: u64, mut code: u128) -> LpVector<Rational> {
        let radix = 2 * (level as u128).pow(2) + 1;
        let mut v = LpVector::zero();
        for atom in self.window(level) {
            let d = (code % radix) as i64;
            code /= radix;
            let k = (d + 1) / 2;
            let num = if d % 2 == 1 { k } else { -k };
            v.add_to(atom, Rational::new(num.into(), (level as i64).into()));
        }
        v
    }

    /// Index of `target` in the enumeration, if its support lies on the family's
    /// lines and the index fits in `u128`.
    pub fn locate(&self, target: &LpVector<Rational>) -> Option<u128> {
        if target.is_empty() {
            return None;
        }
        let mut base = 1u64;
        let mut need = 1u64;
        for (a, amp) in target.iter() {
            if !self.lines.contains(&a.orbit) {
                return None;
            }
            need = need.max(a.copy.unsigned_abs().max(a.index.unsigned_abs()) + 1);
            base = num_integer::Integer::lcm(&base, &u64::try_from(amp.denom()).ok()?);
        }
        // Smallest multiple of the common denominator that covers the support
        // window and keeps every amplitude within `ℓ`.
        let mut level = need.div_ceil(base) * base;
        while target.iter().any(|(_, amp)| amp.abs() > Rational::from_integer(level.into())) {
            level += base;
        }
        let scale = Rational::from_integer(level.into());
        let radix = 2 * (level as u128).pow(2) + 1;
        let mut code = 0u128;
        for atom in self.window(level).iter().rev() {
            let k: i64 = target.get(atom).map_or(Rational::zero(), |a| a * &scale).to_integer().try_into().ok()?;
            let d = if k > 0 { 2 * k - 1 } else { -2 * k } as u128;
            code = code.checked_mul(radix)?.checked_add(d)?;
        }
        let mut offset = 0u128;
        for l in 1..level {
            offset = offset.checked_add(self.level_size(l)?)?;
        }
        offset.checked_add(code)
    }
}

/// `x_N` with its certified truncation error.
#[derive(Debug, Clone, PartialEq)]
pub struct FhVector {
    pub vector: LpVector<Rational>,
    pub truncation: u64,
    /// The targets `y_1, …, y_K`.
    pub targets: Vec<LpVector<Rational>>,
    /// Upper bound on `‖x - x_N‖_p`.
    pub tail_bound: Rational,
    /// Atoms receiving amplitude from more than one series term.
    pub collisions: u64,
    /// Bound on `collisions` predicted from the schedule's separation.
    pub predicted_collisions: u64,
}

/// Builds `x_N`: every term `Sⁿ y_k`, `n ∈ A_k ∩ [1, N]`, restricted to
/// indices in `[-N, N]`.
pub fn construct_fh_vector(
    system: &AtomicSystem,
    family: &DenseFamily,
    schedule: &FrequencySchedule,
    truncation: u64,
) -> Result<FhVector> {
    match check_sc(system)? {
        ScVerdict::Holds { .. } => {}
        ScVerdict::Fails { atom, .. } => return Err(Error::ScRequired(format!("summability fails at {atom}"))),
        ScVerdict::Undecided(why) => return Err(Error::ScRequired(format!("summability undecided: {why}"))),
    }
    let n_max = truncation as i64;
    let mut targets = Vec::new();
    let mut vector = LpVector::zero();
    let mut incidences: BTreeMap<Atom, u32> = BTreeMap::new();
    let mut tail_bound = Rational::zero();
    let mut terms: Vec<(u64, u32)> = Vec::new();
    for k in 1..=schedule.slots {
        let y = family.member(k as u128).ok_or_else(|| Error::TailNotCertified(format!("family member {k} out of range")))?;
        for (a, amp) in y.iter() {
            let spec = system.orbit(a.orbit);
            if !matches!(spec.orbit_sum(), Summability::Summable { .. }) {
                return Err(Error::TailNotCertified(format!("atom {a} has no summable orbit certificate")));
            }
            // Terms of this atom outside the window sit at indices > N.
            let mass = match spec.weights.sum_above(n_max + 1) {
                Summability::Summable { total } => total.hi(),
                _ => return Err(Error::TailNotCertified(format!("orbit {} has no tail bound", a.orbit))),
            };
            let root = creal_pow(&CReal::exact(mass), &(Rational::one() / system.p()), DEFAULT_PREC).hi();
            tail_bound += amp.abs() * root;
        }
        for n in schedule.elements(k, truncation) {
            terms.push((n, k));
            for (a, amp) in apply_s(system, &y, n)?.iter() {
                if a.index.abs() <= n_max {
                    vector.add_to(*a, amp.clone());
                    *incidences.entry(*a).or_default() += 1;
                }
            }
        }
        targets.push(y);
    }
    let collisions = incidences.values().filter(|&&c| c > 1).count() as u64;
    let predicted_collisions = predicted_collisions(&targets, &mut terms);
    Ok(FhVector { vector, truncation, targets, tail_bound, collisions, predicted_collisions })
}

/// Terms `Sⁿ y_k` and `Sᵐ y_l` can share an atom only if
/// `|n - m| <= spread(y_k) + spread(y_l)`, and then share at most
/// `min(|supp y_k|, |supp y_l|)` atoms.
fn predicted_collisions(targets: &[LpVector<Rational>], terms: &mut [(u64, u32)]) -> u64 {
    terms.sort_unstable();
    let spread = |y: &LpVector<Rational>| {
        let lo = y.support().map(|a| a.index).min().unwrap_or(0);
        let hi = y.support().map(|a| a.index).max().unwrap_or(0);
        (hi - lo) as u64
    };
    let spreads: Vec<u64> = targets.iter().map(spread).collect();
    let max_spread = spreads.iter().copied().max().unwrap_or(0);
    let mut total = 0u64;
    for (i, &(n, k)) in terms.iter().enumerate() {
        for &(m, l) in terms[i + 1..].iter().take_while(|(m, _)| m - n <= 2 * max_spread) {
            if m - n <= spreads[k as usize - 1] + spreads[l as usize - 1] {
                total += targets[k as usize - 1].len().min(targets[l as usize - 1].len()) as u64;
            }
        }
    }
    total
}

/// Series `Σ_{n>=1} ‖Tⁿ φ‖_p^p` and `Σ_{n>=1} ‖Sⁿ φ‖_p^p`: exact heads up to
/// `head_terms` and certified totals.
#[derive(Debug, Clone, PartialEq)]
pub struct UnconditionalCertificate {
    pub head_terms: u64,
    pub head_forward: Rational,
    pub head_backward: Rational,
    pub forward: CReal,
    pub backward: CReal,
}

impl UnconditionalCertificate {
    pub fn tail_forward(&self) -> CReal {
        &self.forward - &CReal::exact(self.head_forward.clone())
    }

    pub fn tail_backward(&self) -> CReal {
        &self.backward - &CReal::exact(self.head_backward.clone())
    }
}

/// Disjoint translates make unconditional convergence of both series
/// equivalent to finiteness of the two norm-power sums.
pub fn verify_unconditional(
    system: &AtomicSystem,
    phi: &LpVector<Rational>,
    head_terms: u64,
) -> Result<UnconditionalCertificate> {
    let totals = norm_series(system, phi)?;
    let mut head_forward = Rational::zero();
    let mut head_backward = Rational::zero();
    let exact_pow = |v: &LpVector<Rational>| -> Result<Rational> {
        let n = v.norm_pow(system)?;
        n.as_exact().cloned().ok_or_else(|| Error::Undecided("irrational norm power".into()))
    };
    if system.p().is_integer() {
        for n in 1..=head_terms {
            head_forward += exact_pow(&apply_t(system, phi, n)?)?;
            head_backward += exact_pow(&apply_s(system, phi, n)?)?;
        }
    }
    Ok(UnconditionalCertificate {
        head_terms: if system.p().is_integer() { head_terms } else { 0 },
        head_forward,
        head_backward,
        forward: totals.forward,
        backward: totals.backward,
    })
}

/// Whether the converse direction (criterion ⇒ summability) is available.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConverseStatus {
    Proven,
    /// Below `p = 2` the norm-summability step is unavailable; the question is open.
    Open,
}

pub fn converse_status(system: &AtomicSystem) -> ConverseStatus {
    if *system.p() >= Rational::from_integer(2.into()) {
        ConverseStatus::Proven
    } else {
        ConverseStatus::Open
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotDensity {
    pub slot: u32,
    pub designed: f64,
    pub lower_estimate: f64,
    pub final_density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FhDensityReport {
    pub eps: f64,
    pub horizon: u64,
    pub slots: Vec<SlotDensity>,
    /// Hits of `χ_W` at threshold `μ(W)^{1/p}/2`.
    pub hit_count: u64,
    /// `(n, Σ_{m ∈ A, |m-n| <= window} d_{m-n}(W))` for sampled `n ∈ A`.
    pub density_set_sums: Vec<(u64, f64)>,
    pub density_set_window: u64,
    /// True when every sampled sum stays below 2. Evidence only.
    pub density_set_bound_holds: bool,
}

/// Runs the hitting statistics of `x` against each slot target, then checks
/// the `Σ_{m∈A} d_{m-n}(W) < 2` bound on the empirical hit set of `χ_W`.
pub fn empirical_fh_check(
    system: &AtomicSystem,
    x: &FhVector,
    w: &[Atom],
    eps: f64,
    horizon: u64,
    samples: usize,
    window: u64,
) -> Result<FhDensityReport> {
    let xf = x.vector.cast::<f64>();
    let schedule_slots = x.targets.len() as u32;
    let mut slots = Vec::new();
    for (k, y) in (1..=schedule_slots).zip(&x.targets) {
        let curve = hitting_density(system, &xf, &y.cast::<f64>(), eps, horizon)?;
        slots.push(SlotDensity {
            slot: k,
            designed: 0.0,
            lower_estimate: curve.lower_density_estimate(),
            final_density: curve.density(horizon),
        });
    }
    let indicator = LpVector::from_entries(w.iter().map(|a| (*a, 1.0f64)));
    let p = rational_to_f64(system.p());
    let mu_w = system.set_measure(w)?.to_f64();
    let threshold = mu_w.powf(1.0 / p) / 2.0;
    let hits = hitting_density(system, &xf, &indicator, threshold, horizon)?.hits;
    let dn = compute_dn(system, w, window)?;
    let d: BTreeMap<i64, f64> = dn.values.iter().map(|(n, v)| (*n, v.to_f64())).collect();
    let step = (hits.len() / samples.max(1)).max(1);
    let mut sums = Vec::new();
    for &n in hits.iter().step_by(step).take(samples) {
        let lo = hits.partition_point(|&m| m + window < n);
        let total: f64 = hits[lo..]
            .iter()
            .take_while(|&&m| m <= n + window)
            .map(|&m| d[&(m as i64 - n as i64)])
            .sum();
        sums.push((n, total));
    }
    let holds = sums.iter().all(|(_, s)| *s < 2.0);
    Ok(FhDensityReport {
        eps,
        horizon,
        slots,
        hit_count: hits.len() as u64,
        density_set_sums: sums,
        density_set_window: window,
        density_set_bound_holds: holds,
    })
}

/// Fills `designed` densities from the schedule used for `x`.
pub fn with_designed(mut report: FhDensityReport, schedule: &FrequencySchedule) -> FhDensityReport {
    for s in &mut report.slots {
        s.designed = rational_to_f64(&schedule.density(s.slot));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic_system::OrbitSpec;
    use crate::certified::q;
    use crate::weight_profile::WeightProfile;

    fn geometric_line() -> AtomicSystem {
        AtomicSystem::bijective(vec![OrbitSpec::z_line(WeightProfile::geometric(q(1, 1), q(1, 2)))], q(1, 1)).unwrap()
    }

    fn halving_line() -> AtomicSystem {
        let w = WeightProfile::two_sided(q(1, 1), q(1, 2), q(1, 1), q(1, 2));
        AtomicSystem::bijective(vec![OrbitSpec::z_line(w).with_copies(Copies::Countable)], q(2, 1)).unwrap()
    }

    #[test]
    fn schedule_membership_matches_elements() {
        let s = FrequencySchedule::new(3, 4);
        for k in 1..=3 {
            let listed = s.elements(k, 5000);
            let scanned: Vec<u64> = (1..=5000).filter(|&n| s.contains(k, n)).collect();
            assert_eq!(listed, scanned);
        }
        assert_eq!(s.elements(1, 40), vec![4, 12, 20, 28, 36]);
        assert_eq!(s.elements(2, 100), vec![16, 48, 80]);
        assert_eq!(s.density(1), q(1, 8));
        assert_eq!(s.density(2), q(1, 32));
    }

    #[test]
    fn schedule_properties_small() {
        let s = schedule_frequencies(3);
        let check = s.verify(100_000);
        assert!(check.passes(0.9), "{check:?}");
        assert!(check.min_gap >= 16);
        assert!(FrequencySchedule::new(1, 1).verify(1000).passes(0.99));
    }

    #[test]
    fn family_enumeration() {
        let s = geometric_line();
        let f = DenseFamily::new(&s).unwrap();
        assert_eq!(f.member(1).unwrap(), LpVector::indicator(Atom::base(0)));
        assert_eq!(f.member(2).unwrap(), LpVector::from_entries([(Atom::base(0), q(-1, 1))]));
        // Level 1 has 2 nonzero members; level 2 starts at index 3.
        assert_eq!(f.member(3).unwrap(), LpVector::from_entries([(Atom::new(0, 0, -1), q(1, 2))]));
        let target = LpVector::from_entries([(Atom::new(0, 0, 1), q(3, 2)), (Atom::new(0, 0, -2), q(-1, 3))]);
        let i = f.locate(&target).unwrap();
        assert_eq!(f.member(i).unwrap(), target);
        for i in 1..200u128 {
            let m = f.member(i).unwrap();
            assert_eq!(f.locate(&m).map(|j| f.member(j).unwrap()), Some(m));
        }
    }

    #[test]
    fn family_requires_summable_line() {
        let s = AtomicSystem::bijective(vec![OrbitSpec::z_line(WeightProfile::constant(q(1, 1)))], q(1, 1)).unwrap();
        assert!(matches!(DenseFamily::new(&s), Err(Error::TailNotCertified(_))));
    }

    #[test]
    fn construction_single_slot() {
        let s = geometric_line();
        let f = DenseFamily::new(&s).unwrap();
        let sched = FrequencySchedule::new(1, 4);
        let x = construct_fh_vector(&s, &f, &sched, 100).unwrap();
        let expected: Vec<i64> = sched.elements(1, 100).into_iter().map(|n| n as i64).collect();
        let got: Vec<i64> = x.vector.support().map(|a| a.index).collect();
        assert_eq!(got, expected);
        assert!(x.vector.iter().all(|(_, a)| a == &q(1, 1)));
        assert_eq!(x.collisions, 0);
        // Tail beyond 100: Σ_{n>100} 2^{-n} = 2^{-100}.
        assert_eq!(x.tail_bound, crate::certified::pow_rational(&q(1, 2), 100));
        let bigger = construct_fh_vector(&s, &f, &sched, 200).unwrap();
        assert!(bigger.tail_bound < x.tail_bound);
        let empty = construct_fh_vector(&s, &f, &FrequencySchedule::new(0, 4), 100).unwrap();
        assert!(empty.vector.is_empty());
    }

    #[test]
    fn construction_requires_sc() {
        let s = AtomicSystem::bijective(
            vec![
                OrbitSpec::z_line(WeightProfile::geometric(q(1, 1), q(1, 2))),
                OrbitSpec::z_line(WeightProfile::constant(q(1, 1))),
            ],
            q(1, 1),
        )
        .unwrap();
        let f = DenseFamily::new(&s).unwrap();
        assert!(matches!(construct_fh_vector(&s, &f, &schedule_frequencies(1), 10), Err(Error::ScRequired(_))));
    }

    #[test]
    fn collisions_within_prediction() {
        let s = geometric_line();
        let f = DenseFamily::new(&s).unwrap();
        // Members with wide support and a tight stretch force overlaps.
        let sched = FrequencySchedule::new(3, 3);
        let x = construct_fh_vector(&s, &f, &sched, 300).unwrap();
        assert!(x.collisions <= x.predicted_collisions, "{} > {}", x.collisions, x.predicted_collisions);
    }

    #[test]
    fn unconditional_halving_line() {
        let s = halving_line();
        let c = verify_unconditional(&s, &LpVector::indicator(Atom::base(0)), 30).unwrap();
        assert_eq!(c.forward, CReal::one());
        assert_eq!(c.backward, CReal::one());
        assert_eq!(c.head_forward, q(1, 1) - crate::certified::pow_rational(&q(1, 2), 30));
        assert!(c.tail_forward().contains(&crate::certified::pow_rational(&q(1, 2), 30)));
        let zero = verify_unconditional(&s, &LpVector::zero(), 5).unwrap();
        assert_eq!(zero.forward, CReal::zero());
        let cyc = AtomicSystem::bijective(
            vec![OrbitSpec::cycle(2, WeightProfile::table([(0, q(1, 1)), (1, q(1, 1))]))],
            q(2, 1),
        )
        .unwrap();
        assert!(matches!(
            verify_unconditional(&cyc, &LpVector::indicator(Atom::base(0)), 5),
            Err(Error::TailNotCertified(_))
        ));
    }

    #[test]
    fn converse_gated_by_exponent() {
        assert_eq!(converse_status(&halving_line()), ConverseStatus::Proven);
        assert_eq!(converse_status(&geometric_line()), ConverseStatus::Open);
    }

    #[test]
    fn empirical_density_small() {
        let s = geometric_line();
        let f = DenseFamily::new(&s).unwrap();
        let sched = FrequencySchedule::new(1, 8);
        let x = construct_fh_vector(&s, &f, &sched, 4000).unwrap();
        let r = with_designed(empirical_fh_check(&s, &x, &[Atom::base(0)], 0.1, 2000, 16, 64).unwrap(), &sched);
        assert!(r.slots[0].lower_estimate >= r.slots[0].designed / 2.0);
        assert!(r.density_set_bound_holds);
        let huge = empirical_fh_check(&s, &x, &[Atom::base(0)], 1e6, 100, 4, 8).unwrap();
        assert_eq!(huge.slots[0].final_density, 1.0);
    }
}
