//! Affine maps `x ↦ ax + b` of the line, `0 < |a| <= 1`, under the Laplace
//! probability measure `μ(J) = ½∫_J e^{-|t|} dt`. Measures are evaluated in
//! closed form through the distribution function with certified exponentials.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certified::{exp_neg, format_rational, parse_rational, rational_from_f64, CReal, DEFAULT_PREC};
use crate::float_interval::FloatInterval;
use crate::error::{Error, Result};
use crate::Rational;

/// A point of the extended line.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Ext {
    NegInf,
    Fin(Rational),
    PosInf,
}

impl Ext {
    pub fn fin(q: Rational) -> Ext {
        Ext::Fin(q)
    }

    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            Ext::Fin(q) => Some(q),
            _ => None,
        }
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::NegInf => write!(f, "-inf"),
            Ext::PosInf => write!(f, "inf"),
            Ext::Fin(q) => write!(f, "{}", format_rational(q)),
        }
    }
}

fn half() -> Rational {
    Rational::new(1.into(), 2.into())
}

/// Enclosure of `e^x`.
pub fn exp_q(x: &Rational) -> CReal {
    if x.is_positive() {
        exp_neg(x, DEFAULT_PREC).recip().expect("e^{-x} > 0")
    } else {
        exp_neg(&-x, DEFAULT_PREC)
    }
}

/// `F(t) = μ((-∞, t])`.
pub fn distribution(t: &Ext) -> CReal {
    match t {
        Ext::NegInf => CReal::zero(),
        Ext::PosInf => CReal::one(),
        Ext::Fin(t) if !t.is_positive() => &CReal::exact(half()) * &exp_q(t),
        Ext::Fin(t) => &CReal::one() - &(&CReal::exact(half()) * &exp_q(&-t)),
    }
}

/// `½∫_lo^hi e^{-|t|} dt`, computed on each side of 0 to keep relative accuracy.
fn segment_measure(lo: &Ext, hi: &Ext) -> CReal {
    let zero = Ext::Fin(Rational::zero());
    if *hi <= zero || *lo >= zero {
        return match (lo, hi) {
            (Ext::Fin(l), Ext::Fin(h)) if !l.is_negative() => {
                &CReal::exact(half()) * &(&exp_q(&-l) - &exp_q(&-h.clone()))
            }
            (Ext::Fin(l), Ext::Fin(h)) => &CReal::exact(half()) * &(&exp_q(h) - &exp_q(l)),
            _ => &distribution(hi) - &distribution(lo),
        };
    }
    &segment_measure(lo, &zero) + &segment_measure(&zero, hi)
}

/// Finite union of closed intervals in sorted, disjoint, merged form.
/// Endpoints carry no mass, so open and closed ends are not distinguished.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct IntervalSet {
    parts: Vec<(Ext, Ext)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    pub fn whole() -> Self {
        IntervalSet { parts: vec![(Ext::NegInf, Ext::PosInf)] }
    }

    pub fn interval(lo: Rational, hi: Rational) -> Self {
        IntervalSet::new([(Ext::Fin(lo), Ext::Fin(hi))])
    }

    pub fn new(parts: impl IntoIterator<Item = (Ext, Ext)>) -> Self {
        let mut v: Vec<(Ext, Ext)> = parts.into_iter().filter(|(l, h)| l < h).collect();
        v.sort();
        let mut out: Vec<(Ext, Ext)> = Vec::new();
        for (l, h) in v {
            match out.last_mut() {
                Some((_, ph)) if l <= *ph => {
                    if h > *ph {
                        *ph = h;
                    }
                }
                _ => out.push((l, h)),
            }
        }
        IntervalSet { parts: out }
    }

    pub fn parts(&self) -> &[(Ext, Ext)] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        self.parts.iter().all(|(l, h)| l.as_finite().is_some() && h.as_finite().is_some())
    }

    pub fn measure(&self) -> CReal {
        self.parts.iter().map(|(l, h)| segment_measure(l, h)).sum()
    }

    /// Lebesgue length of a bounded set.
    pub fn length(&self) -> Option<Rational> {
        self.parts
            .iter()
            .map(|(l, h)| Some(h.as_finite()? - l.as_finite()?))
            .sum()
    }

    pub fn hull(&self) -> Option<(Ext, Ext)> {
        Some((self.parts.first()?.0.clone(), self.parts.last()?.1.clone()))
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for (a, b) in &self.parts {
            for (c, d) in &other.parts {
                let lo = std::cmp::max(a, c).clone();
                let hi = std::cmp::min(b, d).clone();
                if lo < hi {
                    out.push((lo, hi));
                }
            }
        }
        IntervalSet::new(out)
    }

    /// Removes the open interval `(lo, hi)`.
    pub fn remove(&self, lo: &Rational, hi: &Rational) -> IntervalSet {
        let (lo, hi) = (Ext::Fin(lo.clone()), Ext::Fin(hi.clone()));
        let mut out = Vec::new();
        for (a, b) in &self.parts {
            if *b <= lo || *a >= hi {
                out.push((a.clone(), b.clone()));
                continue;
            }
            if *a < lo {
                out.push((a.clone(), lo.clone()));
            }
            if *b > hi {
                out.push((hi.clone(), b.clone()));
            }
        }
        IntervalSet::new(out)
    }

    /// Closed-set distance from a point (zero when the point is inside).
    pub fn distance_to(&self, x: &Rational) -> Option<Rational> {
        let p = Ext::Fin(x.clone());
        self.parts
            .iter()
            .map(|(l, h)| {
                if *l <= p && p <= *h {
                    Rational::zero()
                } else if p < *l {
                    l.as_finite().expect("finite when above the point") - x
                } else {
                    x - h.as_finite().expect("finite when below the point")
                }
            })
            .min()
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self.parts.iter().map(|(l, h)| format!("[{l},{h}]")).collect();
        write!(f, "{}", parts.join(" ∪ "))
    }
}

impl FromStr for IntervalSet {
    type Err = Error;

    /// `"[lo,hi]"` or several joined by `u`/`∪`; `inf`/`-inf` allowed.
    fn from_str(s: &str) -> Result<Self> {
        let endpoint = |t: &str| -> Result<Ext> {
            match t.trim() {
                "-inf" => Ok(Ext::NegInf),
                "inf" | "+inf" => Ok(Ext::PosInf),
                other => parse_rational(other).map(Ext::Fin).ok_or_else(|| Error::Parse(format!("bad endpoint {other}"))),
            }
        };
        let mut parts = Vec::new();
        for piece in s.split(['u', '∪']) {
            let inner = piece
                .trim()
                .strip_prefix('[')
                .and_then(|t| t.strip_suffix(']'))
                .ok_or_else(|| Error::Parse(format!("interval literal must look like [lo,hi]: {piece}")))?;
            let (l, h) = inner.split_once(',').ok_or_else(|| Error::Parse(format!("missing comma in {piece}")))?;
            let (l, h) = (endpoint(l)?, endpoint(h)?);
            if l > h {
                return Err(Error::Parse(format!("empty interval {piece}")));
            }
            parts.push((l, h));
        }
        Ok(IntervalSet::new(parts))
    }
}

pub fn interval_measure(s: &IntervalSet) -> CReal {
    s.measure()
}

/// `x ↦ ax + b` with `0 < |a| <= 1`, not the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineMap {
    a: Rational,
    b: Rational,
}

impl AffineMap {
    pub fn new(a: Rational, b: Rational) -> Result<Self> {
        if a.is_zero() || a.abs() > Rational::one() {
            return Err(Error::InvalidMap(format!("slope {a} must satisfy 0 < |a| <= 1")));
        }
        if a.is_one() && b.is_zero() {
            return Err(Error::InvalidMap("the identity is excluded".into()));
        }
        Ok(AffineMap { a, b })
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn is_involution(&self) -> bool {
        self.a == -Rational::one()
    }

    pub fn fixed_point(&self) -> Option<Rational> {
        (!self.a.is_one()).then(|| &self.b / (Rational::one() - &self.a))
    }

    fn apply_ext(&self, x: &Ext) -> Ext {
        match x {
            Ext::Fin(t) => Ext::Fin(&self.a * t + &self.b),
            Ext::NegInf if self.a.is_positive() => Ext::NegInf,
            Ext::NegInf => Ext::PosInf,
            Ext::PosInf if self.a.is_positive() => Ext::PosInf,
            Ext::PosInf => Ext::NegInf,
        }
    }

    pub fn image(&self, s: &IntervalSet) -> IntervalSet {
        IntervalSet::new(s.parts().iter().map(|(l, h)| {
            let (x, y) = (self.apply_ext(l), self.apply_ext(h));
            if x <= y {
                (x, y)
            } else {
                (y, x)
            }
        }))
    }

    /// `fⁿ(s)` for `n ∈ Z`; the inverse is `x ↦ (x - b)/a`.
    pub fn iterate(&self, s: &IntervalSet, n: i64) -> IntervalSet {
        let step = if n >= 0 {
            self.clone()
        } else {
            AffineMap { a: self.a.recip(), b: -&self.b / &self.a }
        };
        (0..n.unsigned_abs()).fold(s.clone(), |acc, _| step.image(&acc))
    }

    /// `|a| e^{-|b|}`.
    pub fn star_bound(&self) -> CReal {
        &CReal::exact(self.a.abs()) * &exp_q(&-self.b.abs())
    }

    /// `μ(f(J))` by change of variables: `|a|·½∫_J e^{-|at+b|} dt`.
    pub fn pushforward_measure(&self, s: &IntervalSet) -> Result<CReal> {
        let mut total = CReal::zero();
        for (l, h) in s.parts() {
            let (Some(l), Some(h)) = (l.as_finite(), h.as_finite()) else {
                return Err(Error::InvalidMap("change of variables needs bounded intervals".into()));
            };
            for (u, v) in self.pieces(l, h) {
                let mid = (&u + &v) / Rational::from_integer(2.into());
                let s1 = sign(&(&self.a * &mid + &self.b));
                // -|at + b| = (-s1 a) t - s1 b on the piece.
                total = &total + &integral_exp(&(-&self.a * &s1), &(-&self.b * &s1), &u, &v);
            }
        }
        Ok(&CReal::exact(self.a.abs() * half()) * &total)
    }

    /// Splits `[l, h]` at `0` and at `-b/a`, where both absolute values are linear.
    fn pieces(&self, l: &Rational, h: &Rational) -> Vec<(Rational, Rational)> {
        let mut cuts = vec![l.clone(), h.clone()];
        for c in [Rational::zero(), -&self.b / &self.a] {
            if c > *l && c < *h {
                cuts.push(c);
            }
        }
        cuts.sort();
        cuts.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect()
    }
}

fn sign(x: &Rational) -> Rational {
    if x.is_negative() {
        -Rational::one()
    } else {
        Rational::one()
    }
}

/// `∫_u^v e^{κt + c} dt`.
fn integral_exp(kappa: &Rational, c: &Rational, u: &Rational, v: &Rational) -> CReal {
    if kappa.is_zero() {
        return &CReal::exact(v - u) * &exp_q(c);
    }
    let hi = exp_q(&(kappa * v + c));
    let lo = exp_q(&(kappa * u + c));
    &(&hi - &lo) / &CReal::exact(kappa.clone())
}

/// `μ(f J) - |a|e^{-|b|} μ(J) = ½|a|e^{-|b|} ∫_J (e^{|b|-|at+b|} - e^{-|t|}) dt`,
/// whose integrand is pointwise nonnegative because `|at + b| <= |t| + |b|`.
/// Pieces where both exponents coincide contribute exactly zero.
pub fn certified_margin(map: &AffineMap, l: &Rational, h: &Rational) -> CReal {
    let b_abs = map.b.abs();
    let mut g = CReal::zero();
    for (u, v) in map.pieces(l, h) {
        let mid = (&u + &v) / Rational::from_integer(2.into());
        let s1 = sign(&(&map.a * &mid + &map.b));
        let s2 = sign(&mid);
        let (k1, c1) = (-&map.a * &s1, &b_abs - &map.b * &s1);
        let k2 = -s2;
        if k1 == k2 && c1.is_zero() {
            continue;
        }
        let first = integral_exp(&k1, &c1, &u, &v);
        let second = integral_exp(&k2, &Rational::zero(), &u, &v);
        let mut piece = &first - &second;
        if k1 == k2 {
            // Same slope with a nonnegative shift: the integrand is (e^{c1} - 1)e^{κt} >= 0.
            piece = CReal::from_bounds(std::cmp::max(piece.lo(), Rational::zero()), std::cmp::max(piece.hi(), Rational::zero()));
        }
        g = &g + &piece;
    }
    &(&CReal::exact(map.a.abs() * half()) * &exp_q(&-b_abs)) * &g
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarReport {
    pub trials: usize,
    /// Intervals where the ratio is certifiably below the bound.
    pub violations: usize,
    /// Intervals where the margin could not be certified either way.
    pub uncertified: usize,
    pub bound: f64,
    pub min_ratio: f64,
    /// Smallest certified lower end of `μ(f J) - |a|e^{-|b|} μ(J)`.
    pub min_margin_lower: String,
}

/// Random rational interval with endpoints in `[-8, 8]`.
pub fn random_interval(rng: &mut impl Rng) -> (Rational, Rational) {
    loop {
        let mut point = || {
            let den: i64 = rng.gen_range(1..=64);
            Rational::new(rng.gen_range(-8 * den..=8 * den).into(), den.into())
        };
        let (x, y) = (point(), point());
        match x.cmp(&y) {
            Ordering::Less => return (x, y),
            Ordering::Greater => return (y, x),
            Ordering::Equal => continue,
        }
    }
}

/// Float-interval version of [`certified_margin`]; same pieces, same exact zeros.
fn margin_fast(map: &AffineMap, l: &Rational, h: &Rational) -> FloatInterval {
    let fi = FloatInterval::from_rational;
    let zero = Rational::zero();
    let b_abs = map.b.abs();
    let cut = -&map.b / &map.a;
    let mut g = FloatInterval::point(0.0);
    for (u, v) in map.pieces(l, h) {
        // On each piece `at + b` and `t` keep one sign; read it off the cut points.
        let above_cut = u >= cut && v > cut;
        let s1_pos = above_cut == map.a.is_positive();
        let s2_pos = u >= zero && v > zero;
        let (k1, c1) = if s1_pos { (-map.a.clone(), &b_abs - &map.b) } else { (map.a.clone(), &b_abs + &map.b) };
        let k2 = if s2_pos { -Rational::one() } else { Rational::one() };
        if k1 == k2 && c1.is_zero() {
            continue;
        }
        let (uf, vf) = (fi(&u), fi(&v));
        let second = integral_exp_fast(&k2, &FloatInterval::point(0.0), uf, vf);
        let piece = if k1 == k2 {
            // (e^{c1} - 1) ∫ e^{κt} dt with c1 >= 0.
            ((fi(&c1).exp() - FloatInterval::point(1.0)).clamp_nonnegative() * second).clamp_nonnegative()
        } else {
            integral_exp_fast(&k1, &fi(&c1), uf, vf) - second
        };
        g = g + piece;
    }
    fi(&(map.a.abs() * half())) * (-fi(&b_abs)).exp() * g
}

/// `∫_u^v e^{κt + c} dt` in float intervals.
fn integral_exp_fast(kappa: &Rational, c: &FloatInterval, u: FloatInterval, v: FloatInterval) -> FloatInterval {
    if kappa.is_zero() {
        return (v - u) * c.exp();
    }
    let k = FloatInterval::from_rational(kappa);
    ((k * v + *c).exp() - (k * u + *c).exp()) / k
}

fn segment_measure_fast(lo: &Rational, hi: &Rational) -> FloatInterval {
    let fi = FloatInterval::from_rational;
    let half = FloatInterval::point(0.5);
    let zero = Rational::zero();
    if *lo >= zero {
        half * ((-fi(lo)).exp() - (-fi(hi)).exp())
    } else if *hi <= zero {
        half * (fi(hi).exp() - fi(lo).exp())
    } else {
        segment_measure_fast(lo, &zero) + segment_measure_fast(&zero, hi)
    }
}

fn bounded_measure_fast(s: &IntervalSet) -> FloatInterval {
    s.parts().iter().fold(FloatInterval::point(0.0), |acc, (l, h)| {
        let (l, h) = (l.as_finite().expect("bounded"), h.as_finite().expect("bounded"));
        acc + segment_measure_fast(l, h)
    })
}

/// Checks the ratio bound on each given bounded interval. Margins are
/// certified in float intervals first and recomputed with rational
/// enclosures only when that is inconclusive.
pub fn star_bound_check_on(map: &AffineMap, intervals: &[(Rational, Rational)]) -> StarReport {
    let bound = map.star_bound();
    let mut report = StarReport {
        trials: intervals.len(),
        violations: 0,
        uncertified: 0,
        bound: bound.to_f64(),
        min_ratio: f64::INFINITY,
        min_margin_lower: String::new(),
    };
    let mut min_margin: Option<Rational> = None;
    for (l, h) in intervals {
        let j = IntervalSet::interval(l.clone(), h.clone());
        let ratio = bounded_measure_fast(&map.image(&j)) / bounded_measure_fast(&j);
        report.min_ratio = report.min_ratio.min(ratio.mid());
        let fast = margin_fast(map, l, h);
        let lo = if fast.lo() >= 0.0 {
            rational_from_f64(fast.lo()).expect("finite")
        } else if fast.hi() < 0.0 {
            report.violations += 1;
            rational_from_f64(fast.lo()).expect("finite")
        } else {
            let margin = certified_margin(map, l, h);
            if margin.hi().is_negative() {
                report.violations += 1;
            } else if margin.lo().is_negative() {
                report.uncertified += 1;
            }
            margin.lo()
        };
        if min_margin.as_ref().is_none_or(|m| lo < *m) {
            min_margin = Some(lo);
        }
    }
    report.min_margin_lower = min_margin.map(|m| format_rational(&m)).unwrap_or_default();
    report
}

/// Checks `μ(f J)/μ(J) >= |a| e^{-|b|}` on `trials` random intervals.
pub fn star_bound_check(map: &AffineMap, trials: usize, seed: u64) -> StarReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let intervals: Vec<_> = (0..trials).map(|_| random_interval(&mut rng)).collect();
    star_bound_check_on(map, &intervals)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum RecurrentSet {
    Empty,
    FixedPoint(Rational),
    /// `a = -1`: `f² = id`, so every point is recurrent.
    Everything,
}

pub fn recurrent_set(map: &AffineMap) -> RecurrentSet {
    if map.is_involution() {
        RecurrentSet::Everything
    } else {
        match map.fixed_point() {
            None => RecurrentSet::Empty,
            Some(x) => RecurrentSet::FixedPoint(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScWitness {
    pub b_prime: IntervalSet,
    /// Half-width of the removed neighbourhood of the fixed point.
    pub delta: Option<Rational>,
    /// `μ(B \ B')`.
    pub removed: CReal,
    /// `(N, Σ_{|n|<=N} μ(fⁿ B'))`.
    pub head: Vec<(u64, CReal)>,
    /// Upper bound on `Σ_{|n|>N} μ(fⁿ B')` for the last head entry.
    pub tail: CReal,
}

impl ScWitness {
    pub fn total(&self) -> CReal {
        let head = self.head.last().map(|(_, s)| s.clone()).unwrap_or_else(CReal::zero);
        &head + &self.tail
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,partial_sum,radius\n");
        for (n, s) in &self.head {
            out.push_str(&format!("{n},{:.15e},{:.3e}\n", s.to_f64(), s.radius_f64()));
        }
        out
    }
}

/// Inner approximation `B'` of `B` with a finite orbit sum.
///
/// For `0 < |a| < 1` a neighbourhood `(x* - δ, x* + δ)` of the fixed point is
/// removed, with `δ` the largest power of two whose removed mass is below
/// `ε/2`; iterates then contract onto `x*` forwards and escape to infinity
/// backwards. For translations nothing is removed.
pub fn sc_witness(map: &AffineMap, b: &IntervalSet, eps: &Rational, head_terms: u64) -> Result<ScWitness> {
    if map.is_involution() {
        return Err(Error::InvalidMap("a = -1 is an involution: every point is recurrent".into()));
    }
    if !b.is_bounded() {
        return Err(Error::InvalidMap("the witness is built for bounded sets".into()));
    }
    if b.is_empty() {
        return Ok(ScWitness {
            b_prime: IntervalSet::empty(),
            delta: None,
            removed: CReal::zero(),
            head: vec![(0, CReal::zero())],
            tail: CReal::zero(),
        });
    }
    let (b_prime, delta, removed) = match map.fixed_point() {
        None => (b.clone(), None, CReal::zero()),
        Some(x) => {
            let dist = b.distance_to(&x).expect("nonempty");
            if dist.is_positive() {
                (b.clone(), Some(dist), CReal::zero())
            } else {
                let target = CReal::exact(eps / Rational::from_integer(2.into()));
                let mut found = None;
                for k in 0..=256u32 {
                    let d = Rational::new(1.into(), num_bigint::BigInt::one() << k as usize);
                    let cut = b.intersect(&IntervalSet::interval(&x - &d, &x + &d));
                    let m = cut.measure();
                    if m.definitely_lt(&target) {
                        found = Some((b.remove(&(&x - &d), &(&x + &d)), d, m));
                        break;
                    }
                }
                let (bp, d, m) = found.ok_or(Error::FixedPointCoversB)?;
                if bp.is_empty() {
                    return Err(Error::FixedPointCoversB);
                }
                (bp, Some(d), m)
            }
        }
    };
    let (start, tail_of) = tail_law(map, &b_prime, delta.as_ref())?;
    let n_max = head_terms.max(start);
    let mut head = Vec::new();
    let mut acc = b_prime.measure();
    head.push((0, acc.clone()));
    let mut fwd = b_prime.clone();
    let mut bwd = b_prime.clone();
    for n in 1..=n_max {
        fwd = map.iterate(&fwd, 1);
        bwd = map.iterate(&bwd, -1);
        acc = &(&acc + &fwd.measure()) + &bwd.measure();
        head.push((n, acc.clone()));
    }
    let tail = tail_of(n_max);
    Ok(ScWitness { b_prime, delta, removed, head, tail })
}

type TailFn = Box<dyn Fn(u64) -> CReal>;

/// Smallest head length from which the tail bound applies, and the bound.
fn tail_law(map: &AffineMap, bp: &IntervalSet, delta: Option<&Rational>) -> Result<(u64, TailFn)> {
    let parts: Vec<(Rational, Rational)> = bp
        .parts()
        .iter()
        .map(|(l, h)| (l.as_finite().cloned().unwrap(), h.as_finite().cloned().unwrap()))
        .collect();
    if map.a.is_one() {
        // Translation by b: each piece [l, h] moves by kβ one way and -kβ the
        // other. Once on one side of 0 its mass is exact:
        // ½(e^{-l} - e^{-h})e^{-kβ} to the right, ½(e^h - e^l)e^{-kβ} to the left.
        let beta = map.b.abs();
        let (left_end, right_end) = (parts.first().unwrap().0.clone(), parts.last().unwrap().1.clone());
        let needed = std::cmp::max(-&left_end / &beta, &right_end / &beta);
        let start = needed.ceil().to_integer().try_into().unwrap_or(0u64);
        let law = move |n: u64| {
            let ratio = exp_q(&-beta.clone());
            let first = exp_q(&-(&beta * Rational::from_integer((n + 1).into())));
            let geo = &first / &(&CReal::one() - &ratio);
            let mut per_step = CReal::zero();
            for (l, h) in &parts {
                let right = &exp_q(&-l.clone()) - &exp_q(&-h.clone());
                let left = &exp_q(h) - &exp_q(l);
                per_step = &per_step + &(&right + &left);
            }
            &(&CReal::exact(half()) * &per_step) * &geo
        };
        return Ok((start, Box::new(law)));
    }
    // Contraction toward x*: forward images have length |a|ⁿ len(B') and
    // density at most ½. Backward images lie at distance >= |a|^{-n}δ from x*,
    // where the mass beyond distance D is at most e^{|x*| - D} once D >= |x*|.
    let x = map.fixed_point().expect("a != 1");
    let r = map.a.abs();
    let len = bp.length().expect("bounded");
    let delta = delta.cloned().ok_or_else(|| Error::InvalidMap("no separation from the fixed point".into()))?;
    let mut start = 0u64;
    let mut reach = delta.clone();
    while reach < x.abs() {
        reach /= &r;
        start += 1;
    }
    let law = move |n: u64| {
        let rn1 = crate::certified::pow_rational(&r, n as i64 + 1);
        let forward = CReal::exact(&len * half() * &rn1 / (Rational::one() - &r));
        // Bernoulli: |a|^{-(n+1+m)} >= |a|^{-(n+1)} (1 + m(1/|a| - 1)).
        let d = &delta / &rn1;
        let step = &d * (r.recip() - Rational::one());
        let backward = &exp_q(&(x.abs() - &d)) / &(&CReal::one() - &exp_q(&-step));
        let total = &forward + &backward;
        CReal::from_bounds(Rational::zero(), total.hi())
    };
    Ok((start, Box::new(law)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certified::q;

    fn e_inv() -> f64 {
        (-1.0f64).exp()
    }

    #[test]
    fn measures_in_closed_form() {
        assert_eq!(IntervalSet::whole().measure(), CReal::one());
        let half_line = IntervalSet::new([(Ext::Fin(q(0, 1)), Ext::PosInf)]);
        assert_eq!(half_line.measure(), CReal::exact(q(1, 2)));
        let unit = IntervalSet::interval(q(0, 1), q(1, 1)).measure();
        assert!((unit.to_f64() - 0.5 * (1.0 - e_inv())).abs() < 1e-15);
        assert!(unit.radius_f64() < 1e-30);
        // Simpson quadrature cross-check.
        let n = 2000;
        let h = 1.0 / n as f64;
        let f = |t: f64| 0.5 * (-t.abs()).exp();
        let simpson: f64 = (0..n)
            .map(|i| {
                let a = i as f64 * h;
                h / 6.0 * (f(a) + 4.0 * f(a + h / 2.0) + f(a + h))
            })
            .sum();
        assert!((unit.to_f64() - simpson).abs() < 1e-12);
    }

    #[test]
    fn additivity_and_parsing() {
        let a = IntervalSet::interval(q(-3, 2), q(1, 3)).measure();
        let b = IntervalSet::interval(q(1, 3), q(5, 1)).measure();
        let ab = IntervalSet::interval(q(-3, 2), q(5, 1)).measure();
        assert!((&(&a + &b) - &ab).contains(&q(0, 1)));
        let s: IntervalSet = "[0,1] u [1/2,2] u [3,4]".parse().unwrap();
        assert_eq!(s.parts().len(), 2);
        assert_eq!(s.to_string(), "[0,2] ∪ [3,4]");
        assert!("[-inf,0]".parse::<IntervalSet>().unwrap().measure() == CReal::exact(q(1, 2)));
    }

    #[test]
    fn maps_and_images() {
        assert!(AffineMap::new(q(1, 1), q(0, 1)).is_err());
        assert!(AffineMap::new(q(3, 2), q(0, 1)).is_err());
        let f = AffineMap::new(q(-1, 2), q(1, 1)).unwrap();
        let j = IntervalSet::interval(q(0, 1), q(2, 1));
        assert_eq!(f.image(&j), IntervalSet::interval(q(0, 1), q(1, 1)));
        assert_eq!(f.iterate(&f.iterate(&j, 3), -3), j);
        assert_eq!(f.fixed_point(), Some(q(2, 3)));
    }

    #[test]
    fn pushforward_two_ways() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (a, b) in [(q(1, 1), q(1, 1)), (q(-1, 3), q(2, 1)), (q(1, 2), q(-5, 4)), (q(-1, 1), q(1, 2))] {
            let f = AffineMap::new(a, b).unwrap();
            for _ in 0..50 {
                let (l, h) = random_interval(&mut rng);
                let j = IntervalSet::interval(l, h);
                let direct = f.image(&j).measure();
                let cov = f.pushforward_measure(&j).unwrap();
                assert!(!(direct.definitely_lt(&cov) || cov.definitely_lt(&direct)));
            }
        }
    }

    #[test]
    fn star_examples() {
        let f = AffineMap::new(q(1, 1), q(1, 1)).unwrap();
        let j = IntervalSet::interval(q(0, 1), q(1, 1));
        let ratio = &f.image(&j).measure() / &j.measure();
        assert!(!ratio.definitely_lt(&f.star_bound()));
        // Translation on [0, ∞): ratio equals the bound and the margin is exactly 0.
        assert_eq!(certified_margin(&f, &q(0, 1), &q(1, 1)), CReal::zero());
        let g = AffineMap::new(q(1, 2), q(0, 1)).unwrap();
        let r = star_bound_check_on(&g, &[(q(-1, 1), q(1, 1)), (q(-3, 1), q(3, 1))]);
        assert_eq!((r.violations, r.uncertified), (0, 0));
        assert!(r.min_ratio >= 0.5);
        for (i, (a, b)) in [(q(1, 1), q(3, 2)), (q(-2, 3), q(-1, 1)), (q(-1, 1), q(1, 3))].into_iter().enumerate() {
            let r = star_bound_check(&AffineMap::new(a, b).unwrap(), 200, i as u64);
            assert_eq!((r.violations, r.uncertified), (0, 0), "{r:?}");
        }
    }

    #[test]
    fn fast_margin_agrees_with_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (a, b) in [(q(1, 1), q(1, 1)), (q(-1, 3), q(2, 1)), (q(1, 2), q(-5, 4)), (q(-1, 1), q(1, 2)), (q(3, 8), q(0, 1))] {
            let f = AffineMap::new(a, b).unwrap();
            for _ in 0..40 {
                let (l, h) = random_interval(&mut rng);
                let fast = margin_fast(&f, &l, &h);
                let exact = certified_margin(&f, &l, &h);
                let (flo, fhi) = (rational_from_f64(fast.lo()).unwrap(), rational_from_f64(fast.hi()).unwrap());
                assert!(flo <= exact.hi() && exact.lo() <= fhi, "{l} {h}: {fast:?} vs {exact}");
                assert!(fast.lo() >= 0.0, "{l} {h}: {fast:?}");
            }
        }
    }

    #[test]
    fn recurrence() {
        assert_eq!(recurrent_set(&AffineMap::new(q(1, 1), q(2, 1)).unwrap()), RecurrentSet::Empty);
        assert_eq!(recurrent_set(&AffineMap::new(q(1, 2), q(1, 1)).unwrap()), RecurrentSet::FixedPoint(q(2, 1)));
        assert_eq!(recurrent_set(&AffineMap::new(q(-1, 1), q(0, 1)).unwrap()), RecurrentSet::Everything);
    }

    #[test]
    fn witness_translation_matches_total() {
        // Integer translates of [0, 1] tile the line: the orbit sum is μ(R) = 1.
        let f = AffineMap::new(q(1, 1), q(1, 1)).unwrap();
        let w = sc_witness(&f, &IntervalSet::interval(q(0, 1), q(1, 1)), &q(1, 10), 30).unwrap();
        assert_eq!(w.b_prime, IntervalSet::interval(q(0, 1), q(1, 1)));
        let total = w.total();
        assert!((total.to_f64() - 1.0).abs() < 1e-9 && total.radius_f64() < 1e-9);
        assert!(total.contains(&q(1, 1)) || (total.to_f64() - 1.0).abs() < 1e-30);
        for pair in w.head.windows(2) {
            assert!(!pair[1].1.definitely_lt(&pair[0].1));
        }
    }

    #[test]
    fn witness_contraction() {
        let f = AffineMap::new(q(1, 2), q(0, 1)).unwrap();
        let w = sc_witness(&f, &IntervalSet::interval(q(1, 1), q(2, 1)), &q(1, 100), 20).unwrap();
        assert_eq!(w.b_prime, IntervalSet::interval(q(1, 1), q(2, 1)));
        assert!(w.total().hi() < q(2, 1));
        let around = sc_witness(&f, &IntervalSet::interval(q(-1, 1), q(1, 1)), &q(1, 100), 20).unwrap();
        let d = around.delta.clone().unwrap();
        assert!(around.removed.definitely_lt(&CReal::exact(q(1, 200))));
        // 1 - e^{-1/128} > 1/200 > 1 - e^{-1/256}.
        assert_eq!(d, q(1, 256));
        assert!(around.b_prime.distance_to(&q(0, 1)).unwrap() >= d);
        assert!(around.head.last().unwrap().1.hi() <= around.total().hi());
        assert!(matches!(
            sc_witness(&AffineMap::new(q(-1, 1), q(0, 1)).unwrap(), &IntervalSet::interval(q(0, 1), q(1, 1)), &q(1, 2), 5),
            Err(Error::InvalidMap(_))
        ));
    }
}
