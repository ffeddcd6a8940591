//! Orbit weight sequences `n ↦ μ(fⁿ(x))` in closed form.
//!
//! Every family exposes, per side of the orbit, an asymptotic law (eventually
//! block-geometric, or an exact power law). Summability verdicts and ratio
//! suprema are read off those laws, never off a numeric truncation; the
//! explicit-table and custom families have no law and only become decidable
//! through a [`TailCertificate`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certified::{pow_enclosure, pow_rational, rational_to_f64, CReal, DEFAULT_PREC};
use crate::Rational;

/// Number of exact head terms used before the integral bounds of a power law.
const POWER_HEAD_TERMS: u64 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("index {0} is outside the profile's domain")]
    OutOfDomain(i64),
    #[error("weight at index {0} is not strictly positive")]
    NonPositive(i64),
    #[error("invalid profile: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    /// Indices `n >= 1`.
    Positive,
    /// Indices `n <= -1`.
    Negative,
}

impl Side {
    pub fn index(self, k: u64) -> i64 {
        match self {
            Side::Positive => k as i64,
            Side::Negative => -(k as i64),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndexDomain {
    Integers,
    Naturals,
    /// Only the listed indices of an explicit table.
    Finite,
}

/// A positive base sequence `v: Z → Q_{>0}` (shift weights).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseSequence {
    Const(Rational),
    /// `v_i = values[i mod len]` for every `i ∈ Z`.
    Periodic(Vec<Rational>),
    /// `v_i = head[i]` for `0 <= i < head.len()`, `tail` beyond, `negative` for `i < 0`.
    Split { head: Vec<Rational>, tail: Rational, negative: Rational },
}

impl BaseSequence {
    pub fn validate(&self) -> Result<(), ProfileError> {
        let bad = |q: &Rational| !q.is_positive();
        let ok = match self {
            BaseSequence::Const(c) => !bad(c),
            BaseSequence::Periodic(v) => !v.is_empty() && !v.iter().any(bad),
            BaseSequence::Split { head, tail, negative } => {
                !head.iter().any(bad) && !bad(tail) && !bad(negative)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(ProfileError::Invalid("base sequence must be nonempty and strictly positive".into()))
        }
    }

    pub fn at(&self, i: i64) -> Rational {
        match self {
            BaseSequence::Const(c) => c.clone(),
            BaseSequence::Periodic(v) => v[i.rem_euclid(v.len() as i64) as usize].clone(),
            BaseSequence::Split { head, tail, negative } => {
                if i < 0 {
                    negative.clone()
                } else if (i as usize) < head.len() {
                    head[i as usize].clone()
                } else {
                    tail.clone()
                }
            }
        }
    }

    /// `Π_{i=lo}^{hi} v_i`; the empty product is 1.
    pub fn product(&self, lo: i64, hi: i64) -> Rational {
        if lo > hi {
            return Rational::one();
        }
        let n = (hi - lo + 1) as u64;
        match self {
            BaseSequence::Const(c) => pow_rational(c, n as i64),
            BaseSequence::Periodic(v) => {
                let len = v.len() as u64;
                let full: Rational = v.iter().product();
                let mut acc = pow_rational(&full, (n / len) as i64);
                for j in 0..(n % len) {
                    acc *= self.at(lo + j as i64);
                }
                acc
            }
            BaseSequence::Split { head, tail, negative } => {
                let mut acc = Rational::one();
                if lo < 0 {
                    acc *= pow_rational(negative, hi.min(-1) - lo + 1);
                }
                let h = head.len() as i64;
                for i in lo.max(0)..=hi.min(h - 1) {
                    acc *= &head[i as usize];
                }
                if hi >= h {
                    acc *= pow_rational(tail, hi - lo.max(h) + 1);
                }
                acc
            }
        }
    }

    /// `Σ_{i=lo}^{hi} ln v_i` in double precision.
    pub fn ln_product_f64(&self, lo: i64, hi: i64) -> f64 {
        if lo > hi {
            return 0.0;
        }
        let n = (hi - lo + 1) as u64;
        let ln = |q: &Rational| rational_to_f64(q).ln();
        match self {
            BaseSequence::Const(c) => n as f64 * ln(c),
            BaseSequence::Periodic(v) => {
                let len = v.len() as u64;
                let full: f64 = v.iter().map(ln).sum();
                let mut acc = (n / len) as f64 * full;
                for j in 0..(n % len) {
                    acc += ln(&self.at(lo + j as i64));
                }
                acc
            }
            BaseSequence::Split { head, tail, negative } => {
                let mut acc = 0.0;
                if lo < 0 {
                    acc += (hi.min(-1) - lo + 1) as f64 * ln(negative);
                }
                let h = head.len() as i64;
                for i in lo.max(0)..=hi.min(h - 1) {
                    acc += ln(&head[i as usize]);
                }
                if hi >= h {
                    acc += (hi - lo.max(h) + 1) as f64 * ln(tail);
                }
                acc
            }
        }
    }

    /// The finitely many distinct values taken by the sequence.
    pub fn distinct_values(&self) -> Vec<Rational> {
        let mut v: Vec<Rational> = match self {
            BaseSequence::Const(c) => vec![c.clone()],
            BaseSequence::Periodic(v) => v.clone(),
            BaseSequence::Split { head, tail, negative } => {
                let mut v = head.clone();
                v.push(tail.clone());
                v.push(negative.clone());
                v
            }
        };
        v.sort();
        v.dedup();
        v
    }

    pub fn sup(&self) -> Rational {
        self.distinct_values().pop().expect("nonempty")
    }

    pub fn inf(&self) -> Rational {
        self.distinct_values().swap_remove(0)
    }
}

/// User-supplied weights. Simulation may use them; verdicts need a tail
/// certificate (and star constants are refused).
#[derive(Clone)]
pub struct CustomWeights {
    pub label: String,
    pub f: Arc<dyn Fn(i64) -> Option<Rational> + Send + Sync>,
}

impl fmt::Debug for CustomWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CustomWeights({})", self.label)
    }
}

impl PartialEq for CustomWeights {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.f, &other.f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightFamily {
    ExplicitTable(BTreeMap<i64, Rational>),
    /// `a · r^{|n|}`.
    Geometric { a: Rational, r: Rational },
    /// `a_pos · r_pos^n` for `n >= 0`, `a_neg · r_neg^{|n|}` for `n < 0`.
    TwoSided { a_pos: Rational, r_pos: Rational, a_neg: Rational, r_neg: Rational },
    /// `a · (1 + |n|)^{-s}`.
    Power { a: Rational, s: Rational },
    /// Shift measures. Unilateral: `(v_0⋯v_n)^{-p}` on `N`. Bilateral:
    /// `μ(0) = 1`, `μ(n)/μ(n-1) = v_n^{-p}` on `Z`.
    ProductForm { base: BaseSequence, p: Rational, bilateral: bool },
    /// `n ↦ inner(-n)`.
    Reversed(Box<WeightProfile>),
    Custom(CustomWeights),
}

/// Claim `w_n <= C · r^{|n|}` for `|n| >= n0`, with `0 < r < 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailCertificate {
    pub n0: u64,
    pub c: Rational,
    pub r: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightProfile {
    pub family: WeightFamily,
    pub tail: Option<TailCertificate>,
}

/// How a side of the sequence behaves for large `|n|`.
#[derive(Debug, Clone, PartialEq)]
pub enum SideLaw {
    /// No indices on this side.
    Empty,
    /// For `k >= start`: `w(±(k + period)) = ratio · w(±k)`.
    Geometric { start: u64, period: u64, ratio: CReal },
    /// `w(±k) = a (1 + k)^{-s}` for every `k >= 1`.
    Power { a: Rational, s: Rational },
    Unknown,
}

/// Why a series diverges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DivergenceWitness {
    /// `w(±k) >= c · (1 + k)^{-s}` for all `k >= from`, with `s <= 1`.
    LowerBound { side: Side, from: u64, c: Rational, s: Rational },
}

impl fmt::Display for DivergenceWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivergenceWitness::LowerBound { side, from, c, s } => write!(
                f,
                "{side:?} side: terms >= {c}·(1+k)^(-{s}) for k >= {from}, not summable since exponent <= 1"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Summability {
    Summable { total: CReal },
    Divergent(DivergenceWitness),
    Undecided(String),
}

impl Summability {
    pub fn total(&self) -> Option<&CReal> {
        match self {
            Summability::Summable { total } => Some(total),
            _ => None,
        }
    }

    pub fn is_summable(&self) -> bool {
        matches!(self, Summability::Summable { .. })
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, Summability::Divergent(_))
    }

    /// Sum of two independent series (e.g. the two sides of an orbit).
    pub fn combine(self, other: Summability) -> Summability {
        match (self, other) {
            (Summability::Divergent(w), _) | (_, Summability::Divergent(w)) => Summability::Divergent(w),
            (Summability::Undecided(r), _) | (_, Summability::Undecided(r)) => Summability::Undecided(r),
            (Summability::Summable { total: a }, Summability::Summable { total: b }) => {
                Summability::Summable { total: &a + &b }
            }
        }
    }

    pub fn shift(self, by: &CReal) -> Summability {
        match self {
            Summability::Summable { total } => Summability::Summable { total: &total + by },
            other => other,
        }
    }
}

/// Supremum of consecutive weight ratios along a profile.
#[derive(Debug, Clone, PartialEq)]
pub enum RatioSup {
    /// `value` is the supremum; `attained_at` is an index realizing it when it is a maximum.
    Finite { value: CReal, attained_at: Option<i64> },
    /// Ratios along `witness` grow without bound.
    Unbounded { witness: Vec<i64> },
    Undecided(String),
}

fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl WeightProfile {
    pub fn new(family: WeightFamily) -> Self {
        WeightProfile { family, tail: None }
    }

    pub fn with_tail(mut self, cert: TailCertificate) -> Self {
        self.tail = Some(cert);
        self
    }

    pub fn geometric(a: Rational, r: Rational) -> Self {
        Self::new(WeightFamily::Geometric { a, r })
    }

    pub fn two_sided(a_pos: Rational, r_pos: Rational, a_neg: Rational, r_neg: Rational) -> Self {
        Self::new(WeightFamily::TwoSided { a_pos, r_pos, a_neg, r_neg })
    }

    pub fn power(a: Rational, s: Rational) -> Self {
        Self::new(WeightFamily::Power { a, s })
    }

    pub fn constant(c: Rational) -> Self {
        Self::geometric(c, Rational::one())
    }

    pub fn table<I: IntoIterator<Item = (i64, Rational)>>(entries: I) -> Self {
        Self::new(WeightFamily::ExplicitTable(entries.into_iter().collect()))
    }

    pub fn product_form(base: BaseSequence, p: Rational, bilateral: bool) -> Self {
        Self::new(WeightFamily::ProductForm { base, p, bilateral })
    }

    pub fn custom(label: &str, f: impl Fn(i64) -> Option<Rational> + Send + Sync + 'static) -> Self {
        Self::new(WeightFamily::Custom(CustomWeights { label: label.to_string(), f: Arc::new(f) }))
    }

    pub fn validate(&self) -> Result<(), ProfileError> {
        let pos = |q: &Rational, what: &str| {
            if q.is_positive() {
                Ok(())
            } else {
                Err(ProfileError::Invalid(format!("{what} must be > 0")))
            }
        };
        match &self.family {
            WeightFamily::ExplicitTable(t) => {
                if t.is_empty() {
                    return Err(ProfileError::Invalid("empty table".into()));
                }
                for (n, v) in t {
                    if !v.is_positive() {
                        return Err(ProfileError::NonPositive(*n));
                    }
                }
            }
            WeightFamily::Geometric { a, r } => {
                pos(a, "a")?;
                pos(r, "r")?;
            }
            WeightFamily::TwoSided { a_pos, r_pos, a_neg, r_neg } => {
                pos(a_pos, "a_pos")?;
                pos(r_pos, "r_pos")?;
                pos(a_neg, "a_neg")?;
                pos(r_neg, "r_neg")?;
            }
            WeightFamily::Power { a, s } => {
                pos(a, "a")?;
                if s.is_negative() {
                    return Err(ProfileError::Invalid("s must be >= 0".into()));
                }
                if s.denom().to_u32().is_none() || s.numer().to_i64().is_none() {
                    return Err(ProfileError::Invalid("s too large".into()));
                }
            }
            WeightFamily::ProductForm { base, p, .. } => {
                base.validate()?;
                pos(p, "p")?;
            }
            WeightFamily::Reversed(inner) => {
                inner.validate()?;
                if inner.domain() != IndexDomain::Integers {
                    return Err(ProfileError::Invalid("only profiles on Z can be reversed".into()));
                }
            }
            WeightFamily::Custom(_) => {}
        }
        if let Some(t) = &self.tail {
            pos(&t.c, "tail C")?;
            if !(t.r.is_positive() && t.r < Rational::one()) {
                return Err(ProfileError::Invalid("tail ratio must lie in (0, 1)".into()));
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> IndexDomain {
        match &self.family {
            WeightFamily::ExplicitTable(_) => IndexDomain::Finite,
            WeightFamily::ProductForm { bilateral: false, .. } => IndexDomain::Naturals,
            _ => IndexDomain::Integers,
        }
    }

    pub fn in_domain(&self, n: i64) -> bool {
        match &self.family {
            WeightFamily::ExplicitTable(t) => t.contains_key(&n),
            WeightFamily::ProductForm { bilateral: false, .. } => n >= 0,
            _ => true,
        }
    }

    /// The profile `n ↦ w_{-n}`.
    pub fn reversed(&self) -> WeightProfile {
        let family = match &self.family {
            WeightFamily::Geometric { .. } | WeightFamily::Power { .. } => self.family.clone(),
            // Expressible in-family only when both branches share the amplitude.
            WeightFamily::TwoSided { a_pos, r_pos, a_neg, r_neg } if a_pos == a_neg => WeightFamily::TwoSided {
                a_pos: a_pos.clone(),
                r_pos: r_neg.clone(),
                a_neg: a_pos.clone(),
                r_neg: r_pos.clone(),
            },
            WeightFamily::ExplicitTable(t) => {
                WeightFamily::ExplicitTable(t.iter().map(|(k, v)| (-k, v.clone())).collect())
            }
            WeightFamily::Reversed(inner) => return (**inner).clone(),
            _ => WeightFamily::Reversed(Box::new(self.clone())),
        };
        WeightProfile { family, tail: self.tail.clone() }
    }

    pub fn weight_at(&self, n: i64) -> Result<CReal, ProfileError> {
        match &self.family {
            WeightFamily::ExplicitTable(t) => {
                t.get(&n).cloned().map(CReal::exact).ok_or(ProfileError::OutOfDomain(n))
            }
            WeightFamily::Geometric { a, r } => Ok(CReal::exact(a * pow_rational(r, n.abs()))),
            WeightFamily::TwoSided { a_pos, r_pos, a_neg, r_neg } => Ok(CReal::exact(if n >= 0 {
                a_pos * pow_rational(r_pos, n)
            } else {
                a_neg * pow_rational(r_neg, -n)
            })),
            WeightFamily::Power { a, s } => {
                let base = int(1 + n.abs());
                let v = pow_enclosure(&base, &-s.clone(), DEFAULT_PREC);
                Ok(&CReal::exact(a.clone()) * &v)
            }
            WeightFamily::ProductForm { base, p, bilateral } => {
                let (prod, sign) = if !bilateral {
                    if n < 0 {
                        return Err(ProfileError::OutOfDomain(n));
                    }
                    (base.product(0, n), -1)
                } else if n >= 0 {
                    (base.product(1, n), -1)
                } else {
                    (base.product(n + 1, 0), 1)
                };
                let e = if sign < 0 { -p.clone() } else { p.clone() };
                Ok(pow_enclosure(&prod, &e, DEFAULT_PREC))
            }
            WeightFamily::Reversed(inner) => inner.weight_at(-n),
            WeightFamily::Custom(c) => match (c.f)(n) {
                Some(v) if v.is_positive() => Ok(CReal::exact(v)),
                Some(_) => Err(ProfileError::NonPositive(n)),
                None => Err(ProfileError::OutOfDomain(n)),
            },
        }
    }

    /// Double-precision weight, `None` outside the domain.
    pub fn weight_f64(&self, n: i64) -> Option<f64> {
        let f = rational_to_f64;
        match &self.family {
            WeightFamily::ExplicitTable(t) => t.get(&n).map(f),
            WeightFamily::Geometric { a, r } => Some(f(a) * (n.unsigned_abs() as f64 * f(r).ln()).exp()),
            WeightFamily::TwoSided { a_pos, r_pos, a_neg, r_neg } => Some(if n >= 0 {
                f(a_pos) * (n as f64 * f(r_pos).ln()).exp()
            } else {
                f(a_neg) * ((-n) as f64 * f(r_neg).ln()).exp()
            }),
            WeightFamily::Power { a, s } => Some(f(a) * (1.0 + n.unsigned_abs() as f64).powf(-f(s))),
            WeightFamily::ProductForm { base, p, bilateral } => {
                let p = f(p);
                if !bilateral {
                    (n >= 0).then(|| (-p * base.ln_product_f64(0, n)).exp())
                } else if n >= 0 {
                    Some((-p * base.ln_product_f64(1, n)).exp())
                } else {
                    Some((p * base.ln_product_f64(n + 1, 0)).exp())
                }
            }
            WeightFamily::Reversed(inner) => inner.weight_f64(-n),
            WeightFamily::Custom(c) => (c.f)(n).map(|v| f(&v)),
        }
    }

    /// `Σ_{n=lo}^{hi} w_n`.
    pub fn partial_sum(&self, lo: i64, hi: i64) -> Result<CReal, ProfileError> {
        if lo > hi {
            return Ok(CReal::zero());
        }
        let mut acc = CReal::zero();
        for n in lo..=hi {
            acc = &acc + &self.weight_at(n)?;
        }
        Ok(acc)
    }

    pub fn side_law(&self, side: Side) -> SideLaw {
        match &self.family {
            WeightFamily::ExplicitTable(_) | WeightFamily::Custom(_) => SideLaw::Unknown,
            WeightFamily::Geometric { r, .. } => {
                SideLaw::Geometric { start: 1, period: 1, ratio: CReal::exact(r.clone()) }
            }
            WeightFamily::TwoSided { r_pos, r_neg, .. } => {
                let r = if side == Side::Positive { r_pos } else { r_neg };
                SideLaw::Geometric { start: 1, period: 1, ratio: CReal::exact(r.clone()) }
            }
            WeightFamily::Power { a, s } => SideLaw::Power { a: a.clone(), s: s.clone() },
            WeightFamily::ProductForm { base, p, bilateral } => {
                if side == Side::Negative && !bilateral {
                    return SideLaw::Empty;
                }
                // Positive side: w(k+1)/w(k) = v_{k+1}^{-p}. Negative side
                // (bilateral): w(-k-1)/w(-k) = v_{-k}^{p}.
                let exponent = if side == Side::Positive { -p.clone() } else { p.clone() };
                let (start, period, block) = match base {
                    BaseSequence::Const(c) => (1, 1, c.clone()),
                    BaseSequence::Periodic(v) => (1, v.len() as u64, v.iter().product()),
                    BaseSequence::Split { head, tail, negative } => {
                        if side == Side::Positive {
                            ((head.len() as u64).max(1), 1, tail.clone())
                        } else {
                            (1, 1, negative.clone())
                        }
                    }
                };
                SideLaw::Geometric { start, period, ratio: pow_enclosure(&block, &exponent, DEFAULT_PREC) }
            }
            WeightFamily::Reversed(inner) => {
                let flipped = if side == Side::Positive { Side::Negative } else { Side::Positive };
                inner.side_law(flipped)
            }
        }
    }

    fn side_weight(&self, side: Side, k: u64) -> Result<CReal, ProfileError> {
        self.weight_at(side.index(k))
    }

    /// `Σ_{k>=1} w(±k)` on one side.
    pub fn side_sum(&self, side: Side) -> Summability {
        match self.side_law(side) {
            SideLaw::Empty => Summability::Summable { total: CReal::zero() },
            SideLaw::Geometric { start, period, ratio } => {
                let head = match (1..start).map(|k| self.side_weight(side, k)).collect::<Result<Vec<_>, _>>() {
                    Ok(v) => v.into_iter().sum::<CReal>(),
                    Err(e) => return Summability::Undecided(e.to_string()),
                };
                let block = match (start..start + period)
                    .map(|k| self.side_weight(side, k))
                    .collect::<Result<Vec<_>, _>>()
                {
                    Ok(v) => v,
                    Err(e) => return Summability::Undecided(e.to_string()),
                };
                if ratio.definitely_less_than(&Rational::one()) {
                    let block_sum: CReal = block.iter().sum();
                    let denom = &CReal::one() - &ratio;
                    let total = &head + &(&block_sum / &denom);
                    Summability::Summable { total }
                } else if ratio.lo() >= Rational::one() {
                    let c = block.iter().map(|w| w.lo()).min().expect("nonempty block");
                    Summability::Divergent(DivergenceWitness::LowerBound { side, from: start, c, s: Rational::zero() })
                } else {
                    Summability::Undecided("block ratio indistinguishable from 1".into())
                }
            }
            SideLaw::Power { a, s } => {
                if s <= Rational::one() {
                    return Summability::Divergent(DivergenceWitness::LowerBound { side, from: 1, c: a, s });
                }
                // Σ_{k>=1} a(1+k)^{-s} = a Σ_{m>=2} m^{-s}; exact head to M, then
                // ∫_{M+2}^∞ x^{-s} <= Σ_{m>M+1} m^{-s} <= ∫_{M+1}^∞ x^{-s}.
                let m = POWER_HEAD_TERMS;
                let mut head = CReal::zero();
                for k in 1..=m {
                    head = (&head + &pow_enclosure(&int(1 + k as i64), &-s.clone(), DEFAULT_PREC))
                        .round_outward(DEFAULT_PREC + 16);
                }
                let sm1 = &s - Rational::one();
                let lower = &pow_enclosure(&int(m as i64 + 2), &-sm1.clone(), DEFAULT_PREC) / &CReal::exact(sm1.clone());
                let upper = &pow_enclosure(&int(m as i64 + 1), &-sm1.clone(), DEFAULT_PREC) / &CReal::exact(sm1);
                let tail = CReal::from_bounds(lower.lo(), upper.hi());
                let total = &CReal::exact(a) * &(&head + &tail);
                Summability::Summable { total }
            }
            SideLaw::Unknown => self.side_sum_from_certificate(side),
        }
    }

    fn side_sum_from_certificate(&self, side: Side) -> Summability {
        let Some(cert) = &self.tail else {
            return Summability::Undecided("no closed-form law and no tail certificate".into());
        };
        let mut head = CReal::zero();
        for k in 1..cert.n0 {
            match self.side_weight(side, k) {
                Ok(w) => head = &head + &w,
                Err(e) => return Summability::Undecided(format!("tail certificate head incomplete: {e}")),
            }
        }
        let start = cert.n0.max(1);
        let bound = &cert.c * pow_rational(&cert.r, start as i64) / (Rational::one() - &cert.r);
        let tail = CReal::from_bounds(Rational::zero(), bound);
        Summability::Summable { total: &head + &tail }
    }

    /// Decide `Σ_n w_n` over the profile's natural domain.
    pub fn certify_summability(&self) -> Summability {
        if let Err(e) = self.validate() {
            return Summability::Undecided(e.to_string());
        }
        if let WeightFamily::ExplicitTable(_) = self.family {
            if self.tail.is_none() {
                return Summability::Undecided("explicit table without a tail certificate".into());
            }
        }
        let w0 = match self.weight_at(0) {
            Ok(w) => w,
            Err(e) => return Summability::Undecided(e.to_string()),
        };
        let neg = if self.domain() == IndexDomain::Naturals {
            Summability::Summable { total: CReal::zero() }
        } else {
            self.side_sum(Side::Negative)
        };
        self.side_sum(Side::Positive).combine(neg).shift(&w0)
    }

    /// `Σ_{n >= m} w_n`.
    pub fn sum_above(&self, m: i64) -> Summability {
        if m >= 1 {
            if let Some(tail) = self.geometric_tail(Side::Positive, m as u64) {
                return tail;
            }
        }
        let pos = self.side_sum(Side::Positive);
        if m >= 1 {
            return match self.partial_sum(1, m - 1) {
                Ok(head) => pos.shift(&-head),
                Err(e) => Summability::Undecided(e.to_string()),
            };
        }
        match self.partial_sum(m, 0) {
            Ok(head) => pos.shift(&head),
            Err(e) => Summability::Undecided(e.to_string()),
        }
    }

    /// `Σ_{n <= m} w_n`.
    pub fn sum_below(&self, m: i64) -> Summability {
        let neg = if self.domain() == IndexDomain::Naturals {
            Summability::Summable { total: CReal::zero() }
        } else {
            self.side_sum(Side::Negative)
        };
        if m <= -1 && self.domain() != IndexDomain::Naturals {
            if let Some(tail) = self.geometric_tail(Side::Negative, m.unsigned_abs()) {
                return tail;
            }
        }
        if m <= -1 {
            return match self.partial_sum(m + 1, -1) {
                Ok(head) => neg.shift(&-head),
                Err(e) => Summability::Undecided(e.to_string()),
            };
        }
        let lo = 0;
        match self.partial_sum(lo, m) {
            Ok(head) => neg.shift(&head),
            Err(e) => Summability::Undecided(e.to_string()),
        }
    }

    /// `Σ_{k>=from} w(±k)` in closed form when the side is eventually
    /// geometric with ratio below one and `from` lies in that regime.
    fn geometric_tail(&self, side: Side, from: u64) -> Option<Summability> {
        let SideLaw::Geometric { start, period, ratio } = self.side_law(side) else {
            return None;
        };
        if from < start || !ratio.definitely_less_than(&Rational::one()) {
            return None;
        }
        let block = (from..from + period).map(|k| self.side_weight(side, k)).collect::<Result<Vec<_>, _>>().ok()?;
        let block_sum: CReal = block.iter().sum();
        Some(Summability::Summable { total: &block_sum / &(&CReal::one() - &ratio) })
    }

    /// Upper bound for `Σ_{|n| > m} w_n`.
    pub fn tail_mass_upper(&self, m: u64) -> Option<Rational> {
        let upper = |s: Summability, side: Side| -> Option<Rational> {
            let total = s.total()?.clone();
            let head = (1..=m).map(|k| self.side_weight(side, k)).collect::<Result<Vec<_>, _>>().ok()?;
            let head: CReal = head.iter().sum();
            Some(std::cmp::max((&total - &head).hi(), Rational::zero()))
        };
        let pos = upper(self.side_sum(Side::Positive), Side::Positive)?;
        let neg = if self.domain() == IndexDomain::Naturals {
            Rational::zero()
        } else {
            upper(self.side_sum(Side::Negative), Side::Negative)?
        };
        Some(pos + neg)
    }

    /// `sup_n w_{n-1} / w_n` over the domain (the per-orbit (★) constant).
    pub fn backward_ratio_sup(&self) -> RatioSup {
        self.ratio_sup(false, false)
    }

    /// Backward ratio supremum over indices `n >= 0` only (forward-mode lines,
    /// where the base point has no predecessor).
    pub fn backward_ratio_sup_on_naturals(&self) -> RatioSup {
        self.ratio_sup(false, true)
    }

    /// `sup_n w_{n+1} / w_n`, i.e. the (★) constant of the inverse map.
    pub fn forward_ratio_sup(&self) -> RatioSup {
        self.ratio_sup(true, false)
    }

    fn ratio_sup(&self, forward: bool, nonneg_only: bool) -> RatioSup {
        if let WeightFamily::Reversed(inner) = &self.family {
            if !nonneg_only {
                return negate_witness(inner.ratio_sup(!forward, false));
            }
        }
        // ratio at n: w_{n-1}/w_n (backward) or w_{n+1}/w_n (forward).
        let ratio_at = |n: i64| -> Result<CReal, ProfileError> {
            let other = if forward { n + 1 } else { n - 1 };
            let num = self.weight_at(other)?;
            let den = self.weight_at(n)?;
            Ok(&num / &den)
        };
        let naturals = nonneg_only || self.domain() == IndexDomain::Naturals;
        // Index ranges on which ratios are periodic repetitions of a finite block.
        let window = |law: &SideLaw| -> Option<u64> {
            match law {
                SideLaw::Geometric { start, period, .. } => Some(start + period + 1),
                SideLaw::Empty => Some(0),
                _ => None,
            }
        };
        let pos_law = self.side_law(Side::Positive);
        let neg_law = if naturals { SideLaw::Empty } else { self.side_law(Side::Negative) };
        match (&pos_law, &neg_law) {
            (SideLaw::Unknown, _) | (_, SideLaw::Unknown) => {
                return RatioSup::Undecided("ratios beyond the table are not determined".into())
            }
            _ => {}
        }
        let mut candidates: Vec<(CReal, Option<i64>)> = Vec::new();
        let mut indices: Vec<i64> = Vec::new();
        match window(&pos_law) {
            Some(w) => indices.extend(0..=(w as i64)),
            None => {
                // Power law on the positive side.
                if let SideLaw::Power { s, .. } = &pos_law {
                    if forward {
                        // w_{n+1}/w_n = ((1+n)/(2+n))^s < 1, sup 1 (limit).
                        candidates.push((CReal::one(), None));
                    } else {
                        let v = pow_enclosure(&int(2), s, DEFAULT_PREC);
                        candidates.push((v, Some(1)));
                    }
                    indices.push(0);
                }
            }
        }
        match window(&neg_law) {
            Some(w) => indices.extend((-(w as i64))..=0),
            None => {
                if let SideLaw::Power { s, .. } = &neg_law {
                    if forward {
                        let v = pow_enclosure(&int(2), s, DEFAULT_PREC);
                        candidates.push((v, Some(-1)));
                    } else {
                        candidates.push((CReal::one(), None));
                    }
                    indices.push(0);
                }
            }
        }
        indices.sort_unstable();
        indices.dedup();
        for n in indices {
            let other = if forward { n + 1 } else { n - 1 };
            if !self.in_domain(n) {
                continue;
            }
            if naturals && other < 0 {
                // no predecessor of the base point: contributes ratio 0.
                continue;
            }
            match ratio_at(n) {
                Ok(r) => candidates.push((r, Some(n))),
                Err(e) => return RatioSup::Undecided(e.to_string()),
            }
        }
        let mut best: Option<(CReal, Option<i64>)> = None;
        for (v, at) in candidates {
            best = match best {
                None => Some((v, at)),
                Some((b, bat)) => {
                    if v.try_cmp(&b) == Some(std::cmp::Ordering::Greater) {
                        Some((v, at))
                    } else if b.try_cmp(&v) == Some(std::cmp::Ordering::Greater) || b == v {
                        Some((b, bat))
                    } else {
                        Some((b.max(&v), bat.or(at)))
                    }
                }
            };
        }
        match best {
            Some((value, attained_at)) => RatioSup::Finite { value, attained_at },
            None => RatioSup::Finite { value: CReal::zero(), attained_at: None },
        }
    }

    /// Checks a tail certificate against the closed form where a law exists.
    /// Families without a law accept the certificate as an assumption.
    pub fn verify_tail_certificate(&self) -> Result<bool, ProfileError> {
        let Some(cert) = &self.tail else { return Ok(true) };
        let bound = |k: u64| CReal::exact(&cert.c * pow_rational(&cert.r, k as i64));
        let sides: &[Side] =
            if self.domain() == IndexDomain::Naturals { &[Side::Positive] } else { &[Side::Positive, Side::Negative] };
        for &side in sides {
            match self.side_law(side) {
                SideLaw::Empty => {}
                SideLaw::Geometric { start, period, ratio } => {
                    let rp = CReal::exact(pow_rational(&cert.r, period as i64));
                    if !ratio.definitely_le(&rp) {
                        return Ok(false);
                    }
                    let from = start.max(cert.n0);
                    for k in from..from + period {
                        if !self.side_weight(side, k)?.definitely_le(&bound(k)) {
                            return Ok(false);
                        }
                    }
                    for k in cert.n0..from {
                        if !self.side_weight(side, k)?.definitely_le(&bound(k)) {
                            return Ok(false);
                        }
                    }
                }
                SideLaw::Power { .. } => return Ok(false),
                SideLaw::Unknown => {
                    for k in cert.n0.max(1)..cert.n0.max(1) + 64 {
                        if let Ok(w) = self.side_weight(side, k) {
                            if !w.definitely_le(&bound(k)) {
                                return Ok(false);
                            }
                        }
                    }
                }
            }
        }
        if cert.n0 == 0 && !self.weight_at(0)?.definitely_le(&bound(0)) {
            return Ok(false);
        }
        Ok(true)
    }
}

fn negate_witness(r: RatioSup) -> RatioSup {
    match r {
        RatioSup::Finite { value, attained_at } => RatioSup::Finite { value, attained_at: attained_at.map(|n| -n) },
        RatioSup::Unbounded { witness } => RatioSup::Unbounded { witness: witness.into_iter().map(|n| -n).collect() },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certified::q;

    fn half_geometric() -> WeightProfile {
        WeightProfile::geometric(q(1, 1), q(1, 2))
    }

    #[test]
    fn weight_at_examples() {
        assert_eq!(half_geometric().weight_at(-3).unwrap(), CReal::exact(q(1, 8)));
        let table = WeightProfile::table([(0, q(7, 24))]);
        assert_eq!(table.weight_at(0).unwrap(), CReal::exact(q(7, 24)));
        assert_eq!(table.weight_at(1), Err(ProfileError::OutOfDomain(1)));
        let power = WeightProfile::power(q(1, 1), q(2, 1));
        assert_eq!(power.weight_at(3).unwrap(), CReal::exact(q(1, 16)));
        let uni = WeightProfile::product_form(BaseSequence::Const(q(2, 1)), q(1, 1), false);
        assert_eq!(uni.weight_at(-1), Err(ProfileError::OutOfDomain(-1)));
    }

    #[test]
    fn partial_sum_examples() {
        assert_eq!(half_geometric().partial_sum(0, 2).unwrap(), CReal::exact(q(7, 4)));
        // Odometer digit distribution at i = 3 is a probability.
        let mu3 = WeightProfile::table((0..6).map(|j| (j, if j < 3 { q(7, 24) } else { q(1, 24) })));
        assert_eq!(mu3.partial_sum(0, 5).unwrap(), CReal::exact(q(1, 1)));
        let p = WeightProfile::power(q(1, 1), q(2, 1));
        assert_eq!(p.partial_sum(4, 4).unwrap(), p.weight_at(4).unwrap());
    }

    #[test]
    fn closed_form_tails_match_head_subtraction() {
        let profiles = [
            half_geometric(),
            WeightProfile::two_sided(q(3, 2), q(2, 3), q(1, 4), q(1, 3)),
            WeightProfile::product_form(BaseSequence::Split { head: vec![q(3, 2)], tail: q(2, 1), negative: q(1, 2) }, q(1, 1), true),
        ];
        for w in &profiles {
            for m in [1i64, 2, 5, 9] {
                let total = w.side_sum(Side::Positive).total().unwrap().clone();
                let slow = &total - &w.partial_sum(1, m - 1).unwrap();
                let fast = w.sum_above(m).total().unwrap().clone();
                assert!(fast.lo() <= slow.hi() && slow.lo() <= fast.hi(), "above {m}: {fast:?} vs {slow:?}");
                let total = w.side_sum(Side::Negative).total().unwrap().clone();
                let slow = &total - &w.partial_sum(-m + 1, -1).unwrap();
                let fast = w.sum_below(-m).total().unwrap().clone();
                assert!(fast.lo() <= slow.hi() && slow.lo() <= fast.hi(), "below {m}: {fast:?} vs {slow:?}");
            }
        }
        // Σ_{n >= 10} 2^{-n} = 2^{-9}.
        assert_eq!(half_geometric().sum_above(10).total().unwrap(), &CReal::exact(q(1, 512)));
    }

    #[test]
    fn summability_examples() {
        let halving = WeightProfile::two_sided(q(1, 1), q(1, 2), q(1, 1), q(1, 2));
        assert_eq!(halving.certify_summability(), Summability::Summable { total: CReal::exact(q(3, 1)) });
        assert_eq!(half_geometric().certify_summability().total().unwrap(), &CReal::exact(q(3, 1)));
        assert!(WeightProfile::constant(q(1, 1)).certify_summability().is_divergent());
        assert!(WeightProfile::power(q(1, 1), q(1, 2)).certify_summability().is_divergent());
        let p2 = WeightProfile::power(q(1, 1), q(2, 1)).certify_summability();
        // 2ζ(2) - 1 = π²/3 - 1.
        let expect = std::f64::consts::PI.powi(2) / 3.0 - 1.0;
        let t = p2.total().unwrap();
        assert!(t.lo() <= crate::certified::rational_from_f64(expect + 1e-12).unwrap());
        assert!(t.hi() >= crate::certified::rational_from_f64(expect - 1e-12).unwrap());
        assert!(t.radius_f64() < 1e-4);
    }

    #[test]
    fn power_half_partial_sums_grow_without_bound() {
        // Numeric sanity check for the comparison rule: Σ_{|n|<=N} (1+|n|)^{-1/2} ~ 4√N.
        let p = WeightProfile::power(q(1, 1), q(1, 2));
        let s: f64 = (-1_000_000i64..=1_000_000).map(|n| p.weight_f64(n).unwrap()).sum();
        assert!(s > 3900.0, "{s}");
    }

    #[test]
    fn table_with_certificate_is_summable() {
        let t = WeightProfile::table((-3..=3).map(|n| (n, q(1, 1 << n.abs()))))
            .with_tail(TailCertificate { n0: 4, c: q(1, 1), r: q(1, 2) });
        let s = t.certify_summability();
        let total = s.total().unwrap();
        assert!(total.contains(&q(3, 1)));
        assert!(WeightProfile::table([(0, q(1, 1))]).certify_summability() != Summability::Summable { total: CReal::one() });
    }

    #[test]
    fn ratio_suprema() {
        let halving = WeightProfile::two_sided(q(1, 1), q(1, 2), q(1, 1), q(1, 2));
        match halving.backward_ratio_sup() {
            RatioSup::Finite { value, .. } => assert_eq!(value, CReal::exact(q(2, 1))),
            other => panic!("{other:?}"),
        }
        let one_sided = WeightProfile::two_sided(q(1, 1), q(1, 2), q(1, 1), q(1, 1));
        match one_sided.backward_ratio_sup() {
            RatioSup::Finite { value, .. } => assert_eq!(value, CReal::exact(q(2, 1))),
            other => panic!("{other:?}"),
        }
        match WeightProfile::power(q(1, 1), q(2, 1)).backward_ratio_sup() {
            RatioSup::Finite { value, attained_at } => {
                assert_eq!(value, CReal::exact(q(4, 1)));
                assert_eq!(attained_at, Some(1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reversal_is_an_involution_on_values() {
        let profiles = [
            WeightProfile::two_sided(q(3, 1), q(1, 2), q(1, 5), q(1, 3)),
            WeightProfile::product_form(
                BaseSequence::Split { head: vec![q(3, 1)], tail: q(2, 1), negative: q(1, 2) },
                q(1, 1),
                true,
            ),
        ];
        for p in profiles {
            let r = p.reversed();
            for n in -6..=6 {
                assert_eq!(r.weight_at(n).unwrap(), p.weight_at(-n).unwrap(), "n={n}");
                assert_eq!(r.reversed().weight_at(n).unwrap(), p.weight_at(n).unwrap());
            }
            assert_eq!(
                r.certify_summability().total().cloned(),
                p.certify_summability().total().cloned()
            );
        }
    }

    #[test]
    fn product_form_values() {
        let uni = WeightProfile::product_form(BaseSequence::Const(q(2, 1)), q(1, 1), false);
        for i in 0..5 {
            assert_eq!(uni.weight_at(i).unwrap(), CReal::exact(q(1, 1 << (i + 1))));
        }
        let bi = WeightProfile::product_form(BaseSequence::Const(q(2, 1)), q(1, 1), true);
        assert_eq!(bi.weight_at(0).unwrap(), CReal::one());
        assert_eq!(bi.weight_at(3).unwrap(), CReal::exact(q(1, 8)));
        assert_eq!(bi.weight_at(-3).unwrap(), CReal::exact(q(8, 1)));
        assert!(bi.certify_summability().is_divergent());
        let chaotic = WeightProfile::product_form(
            BaseSequence::Split { head: vec![q(1, 2)], tail: q(2, 1), negative: q(1, 2) },
            q(1, 1),
            true,
        );
        assert_eq!(chaotic.certify_summability().total().unwrap(), &CReal::exact(q(3, 1)));
        let periodic = BaseSequence::Periodic(vec![q(1, 2), q(3, 1), q(5, 4)]);
        for lo in -5..5 {
            for hi in lo - 1..lo + 8 {
                let direct: Rational = (lo..=hi).map(|i| periodic.at(i)).product();
                assert_eq!(periodic.product(lo, hi), direct);
            }
        }
    }

    #[test]
    fn tail_certificates_are_checked() {
        let good = half_geometric().with_tail(TailCertificate { n0: 0, c: q(1, 1), r: q(1, 2) });
        assert!(good.verify_tail_certificate().unwrap());
        let bad = half_geometric().with_tail(TailCertificate { n0: 0, c: q(1, 1), r: q(1, 3) });
        assert!(!bad.verify_tail_certificate().unwrap());
    }
}
