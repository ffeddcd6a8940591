//! The odometer `X = Π_{j>=1} A_j` with `A_j = Z_2` for even `j` and
//! `A_j = Z_{2j}` for odd `j`, the `+1`-with-carry map, and the product
//! measure whose odd factors put mass `(1 - 2^{-j})/j` on each of the first
//! `j` digits and `2^{-j}/j` on each of the last `j`.
//!
//! Every depth-`d` cylinder is mapped by `fⁿ` onto a depth-`d` cylinder: the
//! first `d` digits form a mixed-radix counter modulo `N_d = |A_1|⋯|A_d|` and
//! the carry out of that counter only permutes the free tail.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certified::{creal_pow, CReal, DEFAULT_PREC};
use crate::error::{Error, Result};
use crate::Rational;

/// Depth beyond which exhaustive operations are refused by default.
pub const DEFAULT_DEPTH_CAP: usize = 8;

/// `|A_j|` for the 1-based position `j`.
pub fn alphabet_size(j: usize) -> u64 {
    if j.is_multiple_of(2) {
        2
    } else {
        2 * j as u64
    }
}

/// `N_d = Π_{j<=d} |A_j|`.
pub fn period_of_depth(depth: usize) -> u64 {
    (1..=depth).map(alphabet_size).product()
}

/// `μ_j(a)`.
pub fn digit_measure(j: usize, a: u64) -> Rational {
    if j.is_multiple_of(2) {
        return Rational::new(1.into(), 2.into());
    }
    let two_pow = Rational::from_integer(num_bigint::BigInt::one() << j);
    let jq = Rational::from_integer((j as u64).into());
    if a < j as u64 {
        (Rational::one() - two_pow.recip()) / jq
    } else {
        two_pow.recip() / jq
    }
}

/// A basic cylinder `[a_1, …, a_d]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cylinder {
    digits: Vec<u64>,
}

impl Cylinder {
    pub fn new(digits: Vec<u64>) -> Result<Self> {
        for (i, &a) in digits.iter().enumerate() {
            let size = alphabet_size(i + 1);
            if a >= size {
                return Err(Error::InvalidDigit { position: i + 1, digit: a, size });
            }
        }
        Ok(Cylinder { digits })
    }

    /// The whole space.
    pub fn root() -> Self {
        Cylinder { digits: Vec::new() }
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    pub fn measure(&self) -> Rational {
        self.digits.iter().enumerate().map(|(i, &a)| digit_measure(i + 1, a)).product()
    }

    /// Counter value `Σ a_j N_{j-1}` (first digit least significant).
    pub fn counter(&self) -> u64 {
        let mut v = 0;
        let mut place = 1;
        for (i, &a) in self.digits.iter().enumerate() {
            v += a * place;
            place *= alphabet_size(i + 1);
        }
        v
    }

    pub fn from_counter(mut v: u64, depth: usize) -> Self {
        let digits = (1..=depth)
            .map(|j| {
                let s = alphabet_size(j);
                let a = v % s;
                v /= s;
                a
            })
            .collect();
        Cylinder { digits }
    }

    /// `fⁿ` of this cylinder.
    pub fn shifted(&self, n: i64) -> Cylinder {
        let modulus = period_of_depth(self.depth()) as i128;
        let v = (self.counter() as i128 + n as i128).rem_euclid(modulus);
        Cylinder::from_counter(v as u64, self.depth())
    }

    /// The depth-`depth` sub-cylinders, in counter-independent lexicographic order.
    pub fn refine(&self, depth: usize) -> Vec<Cylinder> {
        let mut out = vec![self.clone()];
        for j in self.depth() + 1..=depth {
            out = out
                .into_iter()
                .flat_map(|c| {
                    (0..alphabet_size(j)).map(move |a| {
                        let mut d = c.digits.clone();
                        d.push(a);
                        Cylinder { digits: d }
                    })
                })
                .collect();
        }
        out
    }

    pub fn contains(&self, other: &Cylinder) -> bool {
        other.digits.starts_with(&self.digits)
    }
}

impl fmt::Display for Cylinder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.digits.iter().map(u64::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl FromStr for Cylinder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("cylinder literal must look like [a1,a2,...]: {s}")))?;
        let digits = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(|t| t.trim().parse::<u64>().map_err(|e| Error::Parse(format!("{t}: {e}"))))
                .collect::<Result<Vec<_>>>()?
        };
        Cylinder::new(digits)
    }
}

/// A finite disjoint union of cylinders in canonical form: no member contains
/// another, and no complete family of siblings remains unmerged. Two sets are
/// equal exactly when their canonical forms are.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct CylinderSet {
    members: BTreeSet<Cylinder>,
}

impl CylinderSet {
    pub fn empty() -> Self {
        CylinderSet::default()
    }

    pub fn whole() -> Self {
        CylinderSet::from_cylinders([Cylinder::root()])
    }

    pub fn from_cylinders(cs: impl IntoIterator<Item = Cylinder>) -> Self {
        let cs: Vec<Cylinder> = cs.into_iter().collect();
        let depth = cs.iter().map(Cylinder::depth).max().unwrap_or(0);
        let fine: BTreeSet<Cylinder> = cs.iter().flat_map(|c| c.refine(depth)).collect();
        CylinderSet::canonical(fine, depth)
    }

    fn canonical(mut fine: BTreeSet<Cylinder>, depth: usize) -> Self {
        let mut done: BTreeSet<Cylinder> = BTreeSet::new();
        for d in (1..=depth).rev() {
            let size = alphabet_size(d) as usize;
            let mut groups: BTreeMap<Vec<u64>, Vec<Cylinder>> = BTreeMap::new();
            for c in std::mem::take(&mut fine) {
                if c.depth() == d {
                    groups.entry(c.digits[..d - 1].to_vec()).or_default().push(c);
                } else {
                    done.insert(c);
                }
            }
            for (prefix, kids) in groups {
                if kids.len() == size {
                    fine.insert(Cylinder { digits: prefix });
                } else {
                    done.extend(kids);
                }
            }
        }
        done.extend(fine);
        CylinderSet { members: done }
    }

    pub fn members(&self) -> impl Iterator<Item = &Cylinder> {
        self.members.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.members.iter().map(Cylinder::depth).max().unwrap_or(0)
    }

    pub fn refine(&self, depth: usize) -> BTreeSet<Cylinder> {
        self.members.iter().flat_map(|c| c.refine(depth)).collect()
    }

    pub fn measure(&self) -> Rational {
        self.members.iter().map(Cylinder::measure).sum()
    }

    pub fn union(&self, other: &CylinderSet) -> CylinderSet {
        let d = self.depth().max(other.depth());
        let mut all = self.refine(d);
        all.extend(other.refine(d));
        CylinderSet::canonical(all, d)
    }

    pub fn intersection(&self, other: &CylinderSet) -> CylinderSet {
        let d = self.depth().max(other.depth());
        let a = self.refine(d);
        let b = other.refine(d);
        CylinderSet::canonical(a.intersection(&b).cloned().collect(), d)
    }

    /// `fⁿ(s)` for any `n ∈ Z`.
    pub fn image(&self, n: i64) -> CylinderSet {
        let d = self.depth();
        CylinderSet::canonical(self.refine(d).into_iter().map(|c| c.shifted(n)).collect(), d)
    }
}

impl fmt::Display for CylinderSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members.iter().map(Cylinder::to_string).collect();
        write!(f, "{{{}}}", parts.join(" ∪ "))
    }
}

pub fn cylinder_measure(c: &Cylinder) -> Rational {
    c.measure()
}

pub fn plus_one_image(s: &CylinderSet, n: i64) -> CylinderSet {
    s.image(n)
}

/// `χ_s` with the least `N >= 1` such that `f^{-N}(s) = s`, which also gives
/// `T^N χ_s = χ_s`. The least period divides `N_depth`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicIndicator {
    pub set: CylinderSet,
    pub period: u64,
    /// `N_depth`, the period guaranteed by the carry structure.
    pub depth_period: u64,
}

pub fn periodic_point_cylinder(s: &CylinderSet) -> PeriodicIndicator {
    let depth_period = period_of_depth(s.depth());
    let period = divisors(depth_period)
        .into_iter()
        .find(|&n| s.image(-(n as i64)) == *s)
        .expect("N_depth always returns the set");
    PeriodicIndicator { set: s.clone(), period, depth_period }
}

fn divisors(n: u64) -> Vec<u64> {
    let mut d: Vec<u64> = (1..=n).take_while(|k| k * k <= n).filter(|k| n.is_multiple_of(*k)).flat_map(|k| [k, n / k]).collect();
    d.sort_unstable();
    d.dedup();
    d
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReturnEvidence {
    pub n: u64,
    /// `μ(s ∩ f^{-n}(s))`.
    pub measure: Rational,
}

/// First `n >= 1` with `μ(s ∩ f^{-n}(s)) > 0`.
pub fn conservativity_evidence(s: &CylinderSet, max_n: u64) -> Result<ReturnEvidence> {
    if s.is_empty() {
        return Err(Error::InvalidSystem("conservativity evidence needs a set of positive measure".into()));
    }
    for n in 1..=max_n {
        let meet = s.intersection(&s.image(-(n as i64)));
        if !meet.is_empty() {
            return Ok(ReturnEvidence { n, measure: meet.measure() });
        }
    }
    Err(Error::NotFoundWithinBound(max_n))
}

/// Rational combination of cylinder indicators, stored on disjoint
/// cylinders of a common depth.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StepFunction {
    depth: usize,
    values: BTreeMap<Cylinder, Rational>,
}

impl StepFunction {
    pub fn zero() -> Self {
        StepFunction::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Rational, CylinderSet)>) -> Self {
        let terms: Vec<(Rational, CylinderSet)> = terms.into_iter().collect();
        let depth = terms.iter().map(|(_, s)| s.depth()).max().unwrap_or(0);
        let mut values: BTreeMap<Cylinder, Rational> = BTreeMap::new();
        for (a, s) in terms {
            for c in s.refine(depth) {
                *values.entry(c).or_insert_with(Rational::zero) += &a;
            }
        }
        values.retain(|_, v| !v.is_zero());
        StepFunction { depth, values }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn values(&self) -> &BTreeMap<Cylinder, Rational> {
        &self.values
    }

    /// Value on a cylinder at least as deep as the function.
    pub fn value_on(&self, c: &Cylinder) -> Rational {
        let key = Cylinder { digits: c.digits[..self.depth.min(c.depth())].to_vec() };
        self.values.get(&key).cloned().unwrap_or_else(Rational::zero)
    }

    /// `(Tⁿ φ)(x) = φ(fⁿ x)`: the value on `C` moves to `f^{-n}(C)`.
    pub fn apply_t(&self, n: i64) -> StepFunction {
        let values = self.values.iter().map(|(c, v)| (c.shifted(-n), v.clone())).collect();
        StepFunction { depth: self.depth, values }
    }

    pub fn sub(&self, other: &StepFunction) -> StepFunction {
        let d = self.depth.max(other.depth);
        let mut values: BTreeMap<Cylinder, Rational> = BTreeMap::new();
        for (c, v) in &self.values {
            for k in c.refine(d) {
                *values.entry(k).or_insert_with(Rational::zero) += v;
            }
        }
        for (c, v) in &other.values {
            for k in c.refine(d) {
                *values.entry(k).or_insert_with(Rational::zero) -= v;
            }
        }
        values.retain(|_, v| !v.is_zero());
        StepFunction { depth: d, values }
    }

    /// `‖φ‖_p^p`.
    pub fn norm_pow(&self, p: &Rational) -> CReal {
        self.values
            .iter()
            .map(|(c, v)| &creal_pow(&CReal::exact(v.abs()), p, DEFAULT_PREC) * &CReal::exact(c.measure()))
            .sum()
    }

    /// Conditional expectation onto depth-`depth` cylinders.
    pub fn truncate(&self, depth: usize) -> StepFunction {
        if depth >= self.depth {
            return self.clone();
        }
        let mut mass: BTreeMap<Cylinder, Rational> = BTreeMap::new();
        for (c, v) in &self.values {
            let coarse = Cylinder { digits: c.digits[..depth].to_vec() };
            *mass.entry(coarse).or_insert_with(Rational::zero) += v * c.measure();
        }
        let values = mass
            .into_iter()
            .map(|(c, m)| {
                let avg = m / c.measure();
                (c, avg)
            })
            .filter(|(_, v)| !v.is_zero())
            .collect();
        StepFunction { depth, values }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepApprox {
    pub function: StepFunction,
    pub period: u64,
    /// `‖target - function‖_p`.
    pub distance: CReal,
}

/// Depth-`depth` periodic approximation: the conditional expectation, whose
/// period divides `N_depth`. At or beyond the target's depth it is the
/// target itself.
pub fn simple_function_approx(target: &StepFunction, depth: usize, p: &Rational) -> StepApprox {
    let function = target.truncate(depth);
    let diff_pow = target.sub(&function).norm_pow(p);
    let distance = if diff_pow.is_exact() && diff_pow.mid().is_zero() {
        CReal::zero()
    } else {
        creal_pow(&diff_pow, &(Rational::one() / p), DEFAULT_PREC)
    };
    let period = step_period(&function);
    StepApprox { function, period, distance }
}

/// Least `N` with `T^N φ = φ`.
pub fn step_period(phi: &StepFunction) -> u64 {
    let d = phi.depth();
    divisors(period_of_depth(d))
        .into_iter()
        .find(|&n| phi.apply_t(n as i64) == *phi)
        .expect("N_depth is always a period")
}

/// Checks at depth `d`: the cylinder measures sum to one, and the extreme
/// ratios `μ(f C)/μ(C)` over depth-`d` cylinders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthCheck {
    pub depth: usize,
    pub total: Rational,
    pub min_ratio: Rational,
    pub max_ratio: Rational,
}

pub fn depth_check(depth: usize) -> Result<DepthCheck> {
    if depth > DEFAULT_DEPTH_CAP {
        return Err(Error::InvalidSystem(format!("depth {depth} exceeds the cap {DEFAULT_DEPTH_CAP}")));
    }
    let all = Cylinder::root().refine(depth);
    let parts: Vec<(Rational, Rational)> = all
        .par_iter()
        .map(|c| {
            let m = c.measure();
            let r = c.shifted(1).measure() / &m;
            (m, r)
        })
        .collect();
    let total = parts.iter().map(|(m, _)| m).sum();
    let min_ratio = parts.iter().map(|(_, r)| r).min().cloned().expect("nonempty");
    let max_ratio = parts.iter().map(|(_, r)| r).max().cloned().expect("nonempty");
    Ok(DepthCheck { depth, total, min_ratio, max_ratio })
}

/// Exploratory hitting statistics of `Tⁿ φ` near a target; the operator's
/// frequent hypercyclicity is an open question, so this is evidence only.
pub fn exploratory_hits(phi: &StepFunction, target: &StepFunction, eps: &Rational, p: &Rational, horizon: u64) -> Vec<u64> {
    let eps_p = creal_pow(&CReal::exact(eps.clone()), p, DEFAULT_PREC);
    (1..=horizon)
        .into_par_iter()
        .filter(|&n| phi.apply_t(n as i64).sub(target).norm_pow(p).definitely_lt(&eps_p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certified::q;

    fn cyl(d: &[u64]) -> Cylinder {
        Cylinder::new(d.to_vec()).unwrap()
    }

    fn set(cs: &[&[u64]]) -> CylinderSet {
        CylinderSet::from_cylinders(cs.iter().map(|d| cyl(d)))
    }

    #[test]
    fn alphabets() {
        let sizes: Vec<u64> = (1..=6).map(alphabet_size).collect();
        assert_eq!(sizes, vec![2, 2, 6, 2, 10, 2]);
        assert_eq!(period_of_depth(3), 24);
        assert!(matches!(Cylinder::new(vec![2]), Err(Error::InvalidDigit { position: 1, digit: 2, size: 2 })));
    }

    #[test]
    fn measures() {
        assert_eq!(cyl(&[0]).measure(), q(1, 2));
        assert_eq!(cyl(&[1]).measure(), q(1, 2));
        assert_eq!(cyl(&[0, 0, 0]).measure(), q(7, 96));
        assert_eq!(digit_measure(3, 3), q(1, 24));
        assert_eq!(digit_measure(5, 4), q(31, 160));
        assert_eq!(digit_measure(5, 5), q(1, 160));
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(set(&[&[0], &[1]]), CylinderSet::whole());
        assert_eq!(set(&[&[0, 0], &[0, 1]]), set(&[&[0]]));
        assert_eq!(set(&[&[0, 1], &[0]]), set(&[&[0]]));
        assert_eq!(set(&[&[0, 0, 1]]).depth(), 3);
    }

    #[test]
    fn images() {
        assert_eq!(plus_one_image(&set(&[&[0]]), 1), set(&[&[1]]));
        assert_eq!(plus_one_image(&set(&[&[1]]), 1), set(&[&[0]]));
        assert_eq!(plus_one_image(&set(&[&[1, 0]]), 1), set(&[&[0, 1]]));
        assert_eq!(plus_one_image(&set(&[&[1, 1, 5]]), 1), set(&[&[0, 0, 0]]));
        assert_eq!(plus_one_image(&set(&[&[0, 0, 0]]), -1), set(&[&[1, 1, 5]]));
        let s = set(&[&[0, 1, 2], &[1, 0, 4]]);
        for (a, b) in [(3, 5), (-7, 2), (11, -11)] {
            assert_eq!(s.image(a).image(b), s.image(a + b));
        }
    }

    #[test]
    fn periodic_points() {
        assert_eq!(periodic_point_cylinder(&set(&[&[0]])).period, 2);
        assert_eq!(periodic_point_cylinder(&set(&[&[0, 1]])).period, 4);
        assert_eq!(periodic_point_cylinder(&CylinderSet::whole()).period, 1);
        // Counter values {0, 12} mod 24 have period 12.
        let s = CylinderSet::from_cylinders([Cylinder::from_counter(0, 3), Cylinder::from_counter(12, 3)]);
        let p = periodic_point_cylinder(&s);
        assert_eq!((p.period, p.depth_period), (12, 24));
    }

    #[test]
    fn returns() {
        let e = conservativity_evidence(&set(&[&[0]]), 10).unwrap();
        assert_eq!((e.n, e.measure), (2, q(1, 2)));
        let e = conservativity_evidence(&set(&[&[0, 0, 0]]), 100).unwrap();
        assert_eq!((e.n, e.measure), (24, q(7, 96)));
        let e = conservativity_evidence(&CylinderSet::whole(), 1).unwrap();
        assert_eq!((e.n, e.measure), (1, q(1, 1)));
        assert!(matches!(conservativity_evidence(&set(&[&[0, 0, 0]]), 23), Err(Error::NotFoundWithinBound(23))));
    }

    #[test]
    fn step_functions() {
        let phi = StepFunction::from_terms([(q(3, 1), set(&[&[0]])), (q(-1, 1), set(&[&[1]]))]);
        assert_eq!(step_period(&phi), 2);
        let a = simple_function_approx(&phi, 1, &q(2, 1));
        assert_eq!(a.distance, CReal::zero());
        assert_eq!(a.function, phi);
        // Truncating to depth 0 gives the mean 1; distance² = (4·1/2 + 4·1/2) = 4.
        let a0 = simple_function_approx(&phi, 0, &q(2, 1));
        assert_eq!(a0.function.values().values().next().unwrap(), &q(1, 1));
        assert!(a0.distance.contains(&q(2, 1)));
        let deep = StepFunction::from_terms([(q(1, 1), set(&[&[0, 1, 2, 1, 7]]))]);
        for d in 5..=7 {
            assert_eq!(simple_function_approx(&deep, d, &q(1, 1)).distance, CReal::zero());
        }
        assert!(simple_function_approx(&deep, 4, &q(1, 1)).distance.definitely_positive());
    }

    #[test]
    fn depth_sums_and_ratios() {
        for d in 0..=6 {
            let c = depth_check(d).unwrap();
            assert_eq!(c.total, q(1, 1));
            assert!(c.min_ratio > q(0, 1));
        }
        // Depth 1: f swaps [0] and [1], both of mass 1/2.
        let c = depth_check(1).unwrap();
        assert_eq!((c.min_ratio, c.max_ratio), (q(1, 1), q(1, 1)));
        assert_eq!("[0,1,2]".parse::<Cylinder>().unwrap(), cyl(&[0, 1, 2]));
        assert_eq!(cyl(&[0, 1, 2]).to_string(), "[0,1,2]");
    }
}
