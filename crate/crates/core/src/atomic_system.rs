//! Countable atomic systems presented orbit by orbit.
//!
//! A system is a list of orbit specifications. Each orbit is a `Z`-line
//! (bijective mode), an `N`-line (injective forward mode) or a finite cycle,
//! and may be replicated into finitely or countably many copies sharing one
//! weight profile. The map is the successor on indices, so the Hopf
//! decomposition is read off the orbit kinds.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::certified::CReal;
use crate::error::{Error, Result};
use crate::weight_profile::{
    DivergenceWitness, IndexDomain, RatioSup, Side, Summability, WeightProfile,
};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Atom {
    /// Position of the orbit specification in the system.
    pub orbit: usize,
    /// Which copy of that orbit.
    pub copy: i64,
    /// Position along the orbit.
    pub index: i64,
}

impl Atom {
    pub fn new(orbit: usize, copy: i64, index: i64) -> Self {
        Atom { orbit, copy, index }
    }

    pub fn base(orbit: usize) -> Self {
        Atom { orbit, copy: 0, index: 0 }
    }

    pub fn same_orbit(&self, other: &Atom) -> bool {
        self.orbit == other.orbit && self.copy == other.copy
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}:{}, {})", self.orbit, self.copy, self.index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitKind {
    /// Indices in `Z`; the base atom is a wandering set.
    ZLine,
    /// Indices `0..len`, with `f(len - 1) = 0`.
    Cycle(u64),
    /// Indices in `N`; only forward iterates exist.
    NLine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Copies {
    /// Copies `0..n`.
    Finite(u64),
    /// One copy for every integer.
    Countable,
}

impl Copies {
    pub fn contains(&self, copy: i64) -> bool {
        match self {
            Copies::Finite(n) => copy >= 0 && (copy as u64) < *n,
            Copies::Countable => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitSpec {
    pub kind: OrbitKind,
    pub weights: WeightProfile,
    pub copies: Copies,
}

impl OrbitSpec {
    pub fn z_line(weights: WeightProfile) -> Self {
        OrbitSpec { kind: OrbitKind::ZLine, weights, copies: Copies::Finite(1) }
    }

    pub fn n_line(weights: WeightProfile) -> Self {
        OrbitSpec { kind: OrbitKind::NLine, weights, copies: Copies::Finite(1) }
    }

    pub fn cycle(len: u64, weights: WeightProfile) -> Self {
        OrbitSpec { kind: OrbitKind::Cycle(len), weights, copies: Copies::Finite(1) }
    }

    pub fn with_copies(mut self, copies: Copies) -> Self {
        self.copies = copies;
        self
    }

    pub fn is_cycle(&self) -> bool {
        matches!(self.kind, OrbitKind::Cycle(_))
    }

    /// `Σ_n μ(fⁿ x)` over every iterate defined for an atom of this orbit
    /// (all of `Z` on lines and cycles, `n >= -index` on `N`-lines).
    pub fn orbit_sum(&self) -> Summability {
        match self.kind {
            OrbitKind::ZLine => self.weights.certify_summability(),
            OrbitKind::NLine => self.weights.sum_above(0),
            OrbitKind::Cycle(len) => {
                // Every cycle atom is visited once per period, forever.
                let lo = (0..len as i64)
                    .filter_map(|k| self.weights.weight_at(k).ok())
                    .map(|w| w.lo())
                    .min()
                    .unwrap_or_else(Rational::zero);
                Summability::Divergent(DivergenceWitness::LowerBound {
                    side: Side::Positive,
                    from: 0,
                    c: lo,
                    s: Rational::zero(),
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Bijective,
    /// Injective forward maps on `N`-lines (weighted shifts on `ℓ_p(N)`).
    Forward,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomicSystem {
    orbits: Vec<OrbitSpec>,
    p: Rational,
    mode: Mode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HopfDecomposition {
    pub conservative: Vec<usize>,
    pub dissipative: Vec<usize>,
}

/// The least `c` with `μ(f⁻¹ A) <= c μ(A)` for all atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct StarConstant {
    pub value: CReal,
    /// An atom realizing the supremum, when it is attained.
    pub attained_at: Option<Atom>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureTotal {
    Finite(CReal),
    Infinite(String),
    Undecided(String),
}

impl AtomicSystem {
    pub fn new(orbits: Vec<OrbitSpec>, p: Rational, mode: Mode) -> Result<Self> {
        let system = AtomicSystem { orbits, p, mode };
        system.validate()?;
        Ok(system)
    }

    pub fn bijective(orbits: Vec<OrbitSpec>, p: Rational) -> Result<Self> {
        Self::new(orbits, p, Mode::Bijective)
    }

    /// Converts a permutation of `0..n` into cycles, one orbit per cycle.
    /// Returns the system and the atom of each point.
    pub fn from_permutation(perm: &[usize], weights: &[Rational], p: Rational) -> Result<(Self, Vec<Atom>)> {
        let n = perm.len();
        if weights.len() != n {
            return Err(Error::InvalidSystem("one weight per point is required".into()));
        }
        let mut seen = vec![false; n];
        if perm.iter().any(|&j| j >= n) || {
            let mut hit = vec![false; n];
            perm.iter().any(|&j| std::mem::replace(&mut hit[j], true))
        } {
            return Err(Error::InvalidSystem("not a permutation".into()));
        }
        let mut orbits = Vec::new();
        let mut atoms = vec![Atom::base(0); n];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut table = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                atoms[x] = Atom::new(orbits.len(), 0, table.len() as i64);
                table.push((table.len() as i64, weights[x].clone()));
                x = perm[x];
            }
            orbits.push(OrbitSpec::cycle(table.len() as u64, WeightProfile::table(table)));
        }
        Ok((Self::bijective(orbits, p)?, atoms))
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < Rational::one() {
            return Err(Error::InvalidSystem("p must be >= 1".into()));
        }
        if self.orbits.is_empty() {
            return Err(Error::InvalidSystem("a system needs at least one orbit".into()));
        }
        for (i, o) in self.orbits.iter().enumerate() {
            o.weights.validate()?;
            if o.copies == Copies::Finite(0) {
                return Err(Error::InvalidSystem(format!("orbit {i} has zero copies")));
            }
            match (self.mode, o.kind) {
                (Mode::Forward, OrbitKind::NLine) => {}
                (Mode::Forward, _) => {
                    return Err(Error::InvalidSystem("forward mode admits only n_line orbits".into()))
                }
                (Mode::Bijective, OrbitKind::NLine) => {
                    return Err(Error::InvalidSystem("n_line orbits need forward mode".into()))
                }
                (Mode::Bijective, OrbitKind::Cycle(len)) => {
                    if len == 0 {
                        return Err(Error::InvalidSystem("cycle length must be >= 1".into()));
                    }
                    for k in 0..len as i64 {
                        o.weights.weight_at(k)?;
                    }
                }
                (Mode::Bijective, OrbitKind::ZLine) => {
                    if o.weights.domain() == IndexDomain::Naturals {
                        return Err(Error::InvalidSystem(format!("orbit {i}: z_line needs weights on Z")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn orbits(&self) -> &[OrbitSpec] {
        &self.orbits
    }

    pub fn orbit(&self, i: usize) -> &OrbitSpec {
        &self.orbits[i]
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn contains(&self, a: &Atom) -> bool {
        let Some(o) = self.orbits.get(a.orbit) else { return false };
        o.copies.contains(a.copy)
            && match o.kind {
                OrbitKind::ZLine => true,
                OrbitKind::NLine => a.index >= 0,
                OrbitKind::Cycle(len) => a.index >= 0 && (a.index as u64) < len,
            }
    }

    fn check(&self, a: &Atom) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::UnknownAtom(*a))
        }
    }

    /// `fⁿ(a)` for `n ∈ Z`; `None` when a backward iterate leaves an `N`-line.
    pub fn iterate(&self, a: &Atom, n: i64) -> Option<Atom> {
        let o = &self.orbits[a.orbit];
        let index = match o.kind {
            OrbitKind::ZLine => a.index + n,
            OrbitKind::Cycle(len) => (a.index + n).rem_euclid(len as i64),
            OrbitKind::NLine => {
                let i = a.index + n;
                if i < 0 {
                    return None;
                }
                i
            }
        };
        Some(Atom { index, ..*a })
    }

    pub fn succ(&self, a: &Atom) -> Atom {
        self.iterate(a, 1).expect("successor always exists")
    }

    pub fn pred(&self, a: &Atom) -> Option<Atom> {
        self.iterate(a, -1)
    }

    pub fn measure(&self, a: &Atom) -> Result<CReal> {
        self.check(a)?;
        Ok(self.orbits[a.orbit].weights.weight_at(a.index)?)
    }

    pub fn measure_f64(&self, a: &Atom) -> Option<f64> {
        self.orbits[a.orbit].weights.weight_f64(a.index)
    }

    pub fn set_measure<'a>(&self, atoms: impl IntoIterator<Item = &'a Atom>) -> Result<CReal> {
        let mut acc = CReal::zero();
        for a in atoms {
            acc = &acc + &self.measure(a)?;
        }
        Ok(acc)
    }

    pub fn hopf_decompose(&self) -> HopfDecomposition {
        let (conservative, dissipative) = (0..self.orbits.len()).partition(|&i| self.orbits[i].is_cycle());
        HopfDecomposition { conservative, dissipative }
    }

    pub fn is_dissipative(&self) -> bool {
        !self.orbits.iter().any(OrbitSpec::is_cycle)
    }

    pub fn star_constant(&self) -> Result<StarConstant> {
        let mut best: Option<StarConstant> = None;
        for (i, o) in self.orbits.iter().enumerate() {
            let candidate = match o.kind {
                OrbitKind::Cycle(len) => {
                    let len = len as i64;
                    let mut local: Option<StarConstant> = None;
                    for k in 0..len {
                        let r = &o.weights.weight_at((k - 1).rem_euclid(len))? / &o.weights.weight_at(k)?;
                        if local.as_ref().is_none_or(|l| l.value.definitely_lt(&r)) {
                            local = Some(StarConstant { value: r, attained_at: Some(Atom::new(i, 0, k)) });
                        }
                    }
                    local.expect("cycles are nonempty")
                }
                OrbitKind::ZLine | OrbitKind::NLine => {
                    let sup = if o.kind == OrbitKind::ZLine {
                        o.weights.backward_ratio_sup()
                    } else {
                        o.weights.backward_ratio_sup_on_naturals()
                    };
                    match sup {
                        RatioSup::Finite { value, attained_at } => StarConstant {
                            value,
                            attained_at: attained_at.map(|n| Atom::new(i, 0, n)),
                        },
                        RatioSup::Unbounded { witness } => {
                            return Err(Error::UnboundedRatio {
                                witness: witness.into_iter().map(|n| Atom::new(i, 0, n)).collect(),
                            })
                        }
                        RatioSup::Undecided(why) => return Err(Error::Undecided(format!("orbit {i}: {why}"))),
                    }
                }
            };
            best = Some(match best {
                None => candidate,
                Some(b) => {
                    if b.value.definitely_lt(&candidate.value) {
                        candidate
                    } else if candidate.value.definitely_lt(&b.value) || b.value == candidate.value {
                        b
                    } else {
                        StarConstant { value: b.value.max(&candidate.value), attained_at: None }
                    }
                }
            });
        }
        Ok(best.expect("validated systems are nonempty"))
    }

    /// The (★) constant of the inverse map, `sup μ(f a)/μ(a)`.
    pub fn inverse_star_constant(&self) -> Result<StarConstant> {
        if self.mode == Mode::Forward {
            return Err(Error::ForwardOnly);
        }
        self.reversed()?.star_constant()
    }

    /// The system of `f⁻¹`: every orbit traversed backwards.
    pub fn reversed(&self) -> Result<AtomicSystem> {
        if self.mode == Mode::Forward {
            return Err(Error::ForwardOnly);
        }
        let orbits = self
            .orbits
            .iter()
            .map(|o| {
                let weights = match o.kind {
                    OrbitKind::Cycle(len) => {
                        let len = len as i64;
                        let table = (0..len).map(|k| Ok((k, o.weights.weight_at((-k).rem_euclid(len))?.mid().clone())));
                        let table: Result<Vec<_>> = table.collect();
                        WeightProfile::table(table?)
                    }
                    _ => o.weights.reversed(),
                };
                Ok(OrbitSpec { kind: o.kind, weights, copies: o.copies })
            })
            .collect::<Result<Vec<_>>>()?;
        AtomicSystem::new(orbits, self.p.clone(), self.mode)
    }

    pub fn total_measure(&self) -> MeasureTotal {
        let mut total = CReal::zero();
        let mut undecided = None;
        for (i, o) in self.orbits.iter().enumerate() {
            let sum = match o.kind {
                OrbitKind::Cycle(len) => match o.weights.partial_sum(0, len as i64 - 1) {
                    Ok(s) => Summability::Summable { total: s },
                    Err(e) => Summability::Undecided(e.to_string()),
                },
                OrbitKind::ZLine => o.weights.certify_summability(),
                OrbitKind::NLine => o.weights.sum_above(0),
            };
            if o.copies == Copies::Countable {
                return MeasureTotal::Infinite(format!("orbit {i} has countably many copies of positive mass"));
            }
            match sum {
                Summability::Summable { total: s } => {
                    let Copies::Finite(n) = o.copies else { unreachable!() };
                    total = &total + &(&CReal::from_int(n as i64) * &s);
                }
                Summability::Divergent(w) => return MeasureTotal::Infinite(format!("orbit {i}: {w}")),
                Summability::Undecided(why) => undecided = Some(format!("orbit {i}: {why}")),
            }
        }
        match undecided {
            Some(why) => MeasureTotal::Undecided(why),
            None => MeasureTotal::Finite(total),
        }
    }

    /// True iff the system is a single `Z`-line (the only dissipative ergodic
    /// atomic case).
    pub fn is_ergodic_dissipative(&self) -> Result<bool> {
        if !self.is_dissipative() {
            return Err(Error::NotDissipative);
        }
        Ok(self.orbits.len() == 1 && self.orbits[0].copies == Copies::Finite(1))
    }

    /// `Σ_{n∈Z} μ(fⁿ x)` for one atom.
    pub fn orbit_sum(&self, a: &Atom) -> Result<Summability> {
        self.check(a)?;
        let o = &self.orbits[a.orbit];
        if o.kind == OrbitKind::NLine {
            return Ok(o.weights.sum_above(a.index).shift(&CReal::zero()));
        }
        Ok(o.orbit_sum())
    }

    /// `Σ_{n∈Z} μ(fⁿ B)` for a finite atom set `B`, where `μ(fⁿ B) = Σ_{x∈B} μ(fⁿ x)`.
    pub fn set_orbit_sum(&self, atoms: &[Atom]) -> Result<Summability> {
        let mut acc = Summability::Summable { total: CReal::zero() };
        for a in atoms {
            acc = acc.combine(self.orbit_sum(a)?);
        }
        Ok(acc)
    }

    /// Atoms `(copy, index)` in the box `[-l, l]²` of the first orbit, the
    /// finite sets used to approximate finite-measure sets from inside.
    pub fn box_window(&self, orbit: usize, l: i64) -> Vec<Atom> {
        let o = &self.orbits[orbit];
        let mut out = Vec::new();
        for copy in -l..=l {
            if !o.copies.contains(copy) {
                continue;
            }
            for index in -l..=l {
                let a = Atom::new(orbit, copy, index);
                if self.contains(&a) {
                    out.push(a);
                }
            }
        }
        out
    }
}

/// The bound `3·(2L+1)²` on `Σ_n μ(fⁿ B')` for `B'` in the `[-L, L]²` box of a
/// system whose atoms each have orbit sum 3.
pub fn box_orbit_bound(orbit_sum: &Rational, l: u64) -> Rational {
    let side = Rational::from_integer((2 * l + 1).into());
    orbit_sum * &side * &side
}

impl MeasureTotal {
    pub fn is_finite(&self) -> Option<bool> {
        match self {
            MeasureTotal::Finite(_) => Some(true),
            MeasureTotal::Infinite(_) => Some(false),
            MeasureTotal::Undecided(_) => None,
        }
    }
}

impl StarConstant {
    pub fn is_positive(&self) -> bool {
        self.value.mid().is_positive()
    }
}
