//! Certified reals: rational midpoint/radius intervals plus rigorous
//! enclosures for the few transcendental operations the engines need
//! (rational powers, `e^{-u}`).
//!
//! All interval arithmetic is performed on exact rationals, so outward
//! rounding is only needed where an enclosure is produced (roots and
//! exponentials) or where [`CReal::round_outward`] is called to keep
//! denominators small.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::Rational;

/// Working precision (bits) for enclosures.
pub const DEFAULT_PREC: u32 = 128;

/// Closed interval `[mid - rad, mid + rad]` with rational data.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CReal {
    mid: Rational,
    rad: Rational,
}

impl CReal {
    pub fn exact(q: Rational) -> Self {
        CReal { mid: q, rad: Rational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::exact(Rational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Self::exact(Rational::zero())
    }

    pub fn one() -> Self {
        Self::exact(Rational::one())
    }

    /// Interval `[lo, hi]`; the bounds are swapped if given out of order.
    pub fn from_bounds(lo: Rational, hi: Rational) -> Self {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let two = Rational::from_integer(BigInt::from(2));
        let mid = (&lo + &hi) / &two;
        let rad = (&hi - &lo) / two;
        CReal { mid, rad }
    }

    pub fn mid(&self) -> &Rational {
        &self.mid
    }

    pub fn radius(&self) -> &Rational {
        &self.rad
    }

    pub fn lo(&self) -> Rational {
        &self.mid - &self.rad
    }

    pub fn hi(&self) -> Rational {
        &self.mid + &self.rad
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// The exact value, if the radius is zero.
    pub fn as_exact(&self) -> Option<&Rational> {
        self.is_exact().then_some(&self.mid)
    }

    pub fn contains(&self, q: &Rational) -> bool {
        self.lo() <= *q && *q <= self.hi()
    }

    pub fn definitely_lt(&self, other: &CReal) -> bool {
        self.hi() < other.lo()
    }

    pub fn definitely_le(&self, other: &CReal) -> bool {
        self.hi() <= other.lo()
    }

    pub fn definitely_positive(&self) -> bool {
        self.lo() > Rational::zero()
    }

    pub fn definitely_less_than(&self, q: &Rational) -> bool {
        self.hi() < *q
    }

    pub fn definitely_greater_than(&self, q: &Rational) -> bool {
        self.lo() > *q
    }

    /// Certified comparison; `None` when the intervals overlap (and are not
    /// the same exact value).
    pub fn try_cmp(&self, other: &CReal) -> Option<Ordering> {
        if self.is_exact() && other.is_exact() {
            return Some(self.mid.cmp(&other.mid));
        }
        if self.hi() < other.lo() {
            Some(Ordering::Less)
        } else if self.lo() > other.hi() {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    pub fn abs(&self) -> CReal {
        let lo = self.lo();
        let hi = self.hi();
        if lo >= Rational::zero() {
            self.clone()
        } else if hi <= Rational::zero() {
            -self.clone()
        } else {
            let m = if -lo.clone() > hi { -lo } else { hi };
            CReal::from_bounds(Rational::zero(), m)
        }
    }

    /// Interval maximum (pointwise max of the bounds).
    pub fn max(&self, other: &CReal) -> CReal {
        let lo = std::cmp::max(self.lo(), other.lo());
        let hi = std::cmp::max(self.hi(), other.hi());
        CReal::from_bounds(lo, hi)
    }

    pub fn min(&self, other: &CReal) -> CReal {
        let lo = std::cmp::min(self.lo(), other.lo());
        let hi = std::cmp::min(self.hi(), other.hi());
        CReal::from_bounds(lo, hi)
    }

    pub fn hull(&self, other: &CReal) -> CReal {
        let lo = std::cmp::min(self.lo(), other.lo());
        let hi = std::cmp::max(self.hi(), other.hi());
        CReal::from_bounds(lo, hi)
    }

    /// Reciprocal; `None` if the interval contains zero.
    pub fn recip(&self) -> Option<CReal> {
        let lo = self.lo();
        let hi = self.hi();
        if lo <= Rational::zero() && hi >= Rational::zero() {
            return None;
        }
        if self.is_exact() {
            return Some(CReal::exact(self.mid.recip()));
        }
        Some(CReal::from_bounds(hi.recip(), lo.recip()))
    }

    pub fn checked_div(&self, other: &CReal) -> Option<CReal> {
        other.recip().map(|r| self * &r)
    }

    /// Integer power of a nonnegative-or-exact interval.
    pub fn powi(&self, e: u32) -> CReal {
        if self.is_exact() {
            return CReal::exact(pow_rational(&self.mid, e as i64));
        }
        let lo = self.lo();
        let hi = self.hi();
        if lo >= Rational::zero() {
            CReal::from_bounds(pow_rational(&lo, e as i64), pow_rational(&hi, e as i64))
        } else {
            let mut acc = CReal::one();
            for _ in 0..e {
                acc = &acc * self;
            }
            acc
        }
    }

    /// Widen to dyadic endpoints with `bits` fractional bits. Exact values
    /// that are already dyadic at that precision are kept exact.
    pub fn round_outward(&self, bits: u32) -> CReal {
        let lo = floor_dyadic(&self.lo(), bits);
        let hi = ceil_dyadic(&self.hi(), bits);
        if lo == hi {
            return CReal::exact(lo);
        }
        CReal::from_bounds(lo, hi)
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.mid)
    }

    pub fn radius_f64(&self) -> f64 {
        rational_to_f64(&self.rad)
    }
}

impl fmt::Display for CReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.mid)
        } else {
            write!(f, "{:.12e} ± {:.3e}", self.to_f64(), self.radius_f64())
        }
    }
}

impl From<Rational> for CReal {
    fn from(q: Rational) -> Self {
        CReal::exact(q)
    }
}

impl<'a> Add<&'a CReal> for &'a CReal {
    type Output = CReal;
    fn add(self, rhs: &CReal) -> CReal {
        CReal { mid: &self.mid + &rhs.mid, rad: &self.rad + &rhs.rad }
    }
}

impl Add for CReal {
    type Output = CReal;
    fn add(self, rhs: CReal) -> CReal {
        &self + &rhs
    }
}

impl<'a> Sub<&'a CReal> for &'a CReal {
    type Output = CReal;
    fn sub(self, rhs: &CReal) -> CReal {
        CReal { mid: &self.mid - &rhs.mid, rad: &self.rad + &rhs.rad }
    }
}

impl Sub for CReal {
    type Output = CReal;
    fn sub(self, rhs: CReal) -> CReal {
        &self - &rhs
    }
}

impl<'a> Mul<&'a CReal> for &'a CReal {
    type Output = CReal;
    fn mul(self, rhs: &CReal) -> CReal {
        let mid = &self.mid * &rhs.mid;
        let rad = self.mid.abs() * &rhs.rad + rhs.mid.abs() * &self.rad + &self.rad * &rhs.rad;
        CReal { mid, rad }
    }
}

impl Mul for CReal {
    type Output = CReal;
    fn mul(self, rhs: CReal) -> CReal {
        &self * &rhs
    }
}

impl<'a> Div<&'a CReal> for &'a CReal {
    type Output = CReal;
    /// Panics if the divisor contains zero; use [`CReal::checked_div`]
    /// where that can happen.
    fn div(self, rhs: &CReal) -> CReal {
        self.checked_div(rhs).expect("division by an interval containing zero")
    }
}

impl Div for CReal {
    type Output = CReal;
    fn div(self, rhs: CReal) -> CReal {
        &self / &rhs
    }
}

impl Neg for CReal {
    type Output = CReal;
    fn neg(self) -> CReal {
        CReal { mid: -self.mid, rad: self.rad }
    }
}

impl Sum for CReal {
    fn sum<I: Iterator<Item = CReal>>(iter: I) -> CReal {
        iter.fold(CReal::zero(), |acc, x| &acc + &x)
    }
}

impl<'a> Sum<&'a CReal> for CReal {
    fn sum<I: Iterator<Item = &'a CReal>>(iter: I) -> CReal {
        iter.fold(CReal::zero(), |acc, x| &acc + x)
    }
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() && (v != 0.0 || q.is_zero()) {
            return v;
        }
    }
    // Very large or very small magnitudes: go through the bit lengths.
    let n = q.numer();
    let d = q.denom();
    let shift = n.bits() as i64 - d.bits() as i64;
    let scaled = if shift >= 0 {
        Rational::new(n.clone(), d.clone() << (shift as usize))
    } else {
        Rational::new(n.clone() << ((-shift) as usize), d.clone())
    };
    scaled.to_f64().unwrap_or(0.0) * 2f64.powi(shift.clamp(-2000, 2000) as i32)
}

/// Exact rational from an `f64` (every finite double is dyadic).
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn pow_rational(q: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(q.clone(), e as usize)
    } else {
        num_traits::pow(q.recip(), (-e) as usize)
    }
}

pub fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

pub fn floor_dyadic(q: &Rational, bits: u32) -> Rational {
    let scaled = q.numer() * pow2(bits);
    let f = scaled.div_floor(q.denom());
    Rational::new(f, pow2(bits))
}

pub fn ceil_dyadic(q: &Rational, bits: u32) -> Rational {
    let scaled = q.numer() * pow2(bits);
    let c = -((-scaled).div_floor(q.denom()));
    Rational::new(c, pow2(bits))
}

pub fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

/// Enclosure of `q^(1/n)` for `q >= 0`; exact when `q` is a perfect power.
pub fn nth_root(q: &Rational, n: u32, bits: u32) -> CReal {
    assert!(!q.is_negative(), "root of a negative rational");
    if n == 1 || q.is_zero() || q.is_one() {
        return CReal::exact(q.clone());
    }
    let a = q.numer();
    let b = q.denom();
    let ra = a.nth_root(n);
    let rb = b.nth_root(n);
    if ra.pow(n) == *a && rb.pow(n) == *b {
        return CReal::exact(Rational::new(ra, rb));
    }
    // q^(1/n) = (a b^(n-1))^(1/n) / b, scaled by 2^bits for precision.
    let x: BigInt = (a * b.pow(n - 1)) << (bits as usize * n as usize);
    let r = x.nth_root(n);
    let den = b * pow2(bits);
    let lo = Rational::new(r.clone(), den.clone());
    let hi = Rational::new(r + 1, den);
    CReal::from_bounds(lo, hi)
}

/// Enclosure of `base^exponent` for `base > 0` and rational exponent.
pub fn pow_enclosure(base: &Rational, exponent: &Rational, bits: u32) -> CReal {
    assert!(base.is_positive(), "rational power needs a positive base");
    if is_integer(exponent) {
        let e = exponent.to_integer().to_i64().expect("exponent too large");
        return CReal::exact(pow_rational(base, e));
    }
    let num = exponent.numer().to_i64().expect("exponent too large");
    let den = exponent.denom().to_u32().expect("exponent denominator too large");
    let raised = pow_rational(base, num.abs());
    let root = nth_root(&raised, den, bits + 16);
    let out = if num < 0 { root.recip().expect("positive root") } else { root };
    out.round_outward(bits + 8)
}

/// Enclosure of `x^e` for a nonnegative interval `x` and `e > 0`.
pub fn creal_pow(x: &CReal, e: &Rational, bits: u32) -> CReal {
    assert!(e.is_positive(), "creal_pow needs a positive exponent");
    let lo = std::cmp::max(x.lo(), Rational::zero());
    let hi = std::cmp::max(x.hi(), Rational::zero());
    let at = |v: &Rational| {
        if v.is_zero() {
            CReal::zero()
        } else {
            pow_enclosure(v, e, bits)
        }
    };
    if x.is_exact() {
        return at(&hi);
    }
    CReal::from_bounds(at(&lo).lo(), at(&hi).hi())
}

/// Enclosure of `e^{-u}` for `u >= 0`.
pub fn exp_neg(u: &Rational, bits: u32) -> CReal {
    assert!(!u.is_negative(), "exp_neg expects a nonnegative argument");
    if u.is_zero() {
        return CReal::one();
    }
    let cap = Rational::from_integer(BigInt::from(4096));
    if *u > cap {
        // e^{-u} < e^{-4096} < 2^{-bits} for any sensible precision.
        return CReal::from_bounds(Rational::zero(), Rational::new(BigInt::one(), pow2(bits)));
    }
    // Halve until the argument is at most 2^-10.
    let mut s: u32 = 0;
    let limit = Rational::new(BigInt::one(), pow2(10));
    let mut y = u.clone();
    while y > limit {
        y /= Rational::from_integer(BigInt::from(2));
        s += 1;
    }
    let p = bits + s + 8;
    let terms = p / 10 + 3;
    let scale = pow2(p);
    // e^{-y} is decreasing: the lower bound uses the larger argument.
    let y_lo = floor_dyadic(&y, p).numer() * (&scale / floor_dyadic(&y, p).denom());
    let y_hi = ceil_dyadic(&y, p).numer() * (&scale / ceil_dyadic(&y, p).denom());
    let (mut lo_fixed, _) = taylor_fixed(&y_hi, terms, p);
    let (_, mut hi_fixed) = taylor_fixed(&y_lo, terms, p);
    if lo_fixed.sign() == Sign::Minus {
        lo_fixed = BigInt::zero();
    }
    for _ in 0..s {
        lo_fixed = (&lo_fixed * &lo_fixed) >> p as usize;
        let sq = &hi_fixed * &hi_fixed;
        let (q, r) = sq.div_rem(&scale);
        hi_fixed = if r.is_zero() { q } else { q + 1 };
    }
    let lo = Rational::new(lo_fixed, scale.clone());
    let hi = Rational::new(hi_fixed, scale);
    CReal::from_bounds(lo, hi).round_outward(bits)
}

/// Fixed-point bounds `(lo, hi)` on `2^p e^{-y/2^p}` from `terms` Taylor terms
/// plus the alternating remainder, with every rounding directed outward.
fn taylor_fixed(y: &BigInt, terms: u32, p: u32) -> (BigInt, BigInt) {
    let scale = pow2(p);
    let (mut t_lo, mut t_hi) = (scale.clone(), scale.clone());
    let (mut lo, mut hi) = (BigInt::zero(), BigInt::zero());
    for i in 0..=terms {
        if i == terms {
            // Remainder of an alternating series with decreasing terms.
            lo -= &t_hi;
            hi += &t_hi;
            break;
        }
        if i % 2 == 0 {
            lo += &t_lo;
            hi += &t_hi;
        } else {
            lo -= &t_hi;
            hi -= &t_lo;
        }
        let d = &scale * BigInt::from(i + 1);
        t_lo = (&t_lo * y).div_floor(&d);
        let (q, r) = (&t_hi * y).div_rem(&d);
        t_hi = if r.is_zero() { q } else { q + 1 };
    }
    (lo, hi)
}

/// Parse `"num/den"`, an integer, or a decimal literal into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" { BigInt::zero() } else { int.parse().ok()? };
        if !frac.chars().all(|c| c.is_ascii_digit()) || frac.is_empty() {
            return None;
        }
        let frac_num: BigInt = frac.parse().ok()?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let frac_q = Rational::new(frac_num, den);
        let int_q = Rational::from_integer(int_part.abs());
        let v = int_q + frac_q;
        return Some(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().ok()?;
    Some(Rational::from_integer(n))
}

/// `"num/den"` rendering (integers without denominator).
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}
