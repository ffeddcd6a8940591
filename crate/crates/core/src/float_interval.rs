//! Closed `f64` intervals with outward rounding. Every operation widens its
//! round-to-nearest result by one ulp on each side, so the true value of the
//! exact operation on any points of the inputs stays enclosed. Used as a fast
//! path before falling back to rational enclosures.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::ToPrimitive;

use crate::certified::rational_from_f64;
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloatInterval {
    lo: f64,
    hi: f64,
}

/// Number of Taylor terms for `e^r`, `|r| <= 0.35`: the remainder is below `1e-25`.
const EXP_TERMS: i32 = 22;

impl FloatInterval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "empty float interval [{lo}, {hi}]");
        FloatInterval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        FloatInterval { lo: x, hi: x }
    }

    /// The smallest float interval found around `q`.
    pub fn from_rational(q: &Rational) -> Self {
        if let (Some(n), Some(d)) = (q.numer().to_i64(), q.denom().to_i64()) {
            const EXACT: i64 = 1 << 53;
            if n.abs() <= EXACT && d <= EXACT {
                // Both operands are exact, so the quotient is within half an ulp.
                let v = n as f64 / d as f64;
                if v == 0.0 || v.fract() == 0.0 && d == 1 {
                    return Self::point(v);
                }
                return FloatInterval { lo: v.next_down(), hi: v.next_up() };
            }
        }
        let v = crate::certified::rational_to_f64(q);
        let mut lo = v;
        while rational_from_f64(lo).is_some_and(|r| r > *q) {
            lo = lo.next_down();
        }
        let mut hi = v;
        while rational_from_f64(hi).is_some_and(|r| r < *q) {
            hi = hi.next_up();
        }
        FloatInterval { lo, hi }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.lo == 0.0 && self.hi == 0.0
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0.0 && 0.0 <= self.hi
    }

    /// Replaces a negative lower end by zero; valid when the value is known to be nonnegative.
    pub fn clamp_nonnegative(self) -> Self {
        FloatInterval { lo: self.lo.max(0.0), hi: self.hi.max(0.0) }
    }

    fn widen(lo: f64, hi: f64) -> Self {
        FloatInterval { lo: lo.next_down(), hi: hi.next_up() }
    }

    pub fn exp(self) -> Self {
        FloatInterval { lo: exp_bounds(self.lo).0, hi: exp_bounds(self.hi).1 }
    }
}

/// Rigorous `(lo, hi)` with `lo <= e^x <= hi`.
fn exp_bounds(x: f64) -> (f64, f64) {
    if x.is_nan() {
        return (0.0, f64::INFINITY);
    }
    if x < -700.0 {
        return (0.0, f64::MIN_POSITIVE);
    }
    if x > 700.0 {
        return (f64::MAX, f64::INFINITY);
    }
    // e^x = 2^k e^r with r = x - k ln 2 and |r| <= 0.35.
    let ln2 = FloatInterval::widen(std::f64::consts::LN_2, std::f64::consts::LN_2);
    let k = (x / std::f64::consts::LN_2).round();
    let r = FloatInterval::point(x) - ln2 * FloatInterval::point(k);
    let mut sum = FloatInterval::point(1.0);
    for i in (1..EXP_TERMS).rev() {
        sum = FloatInterval::point(1.0) + r * sum / FloatInterval::point(i as f64);
    }
    // |remainder| <= |r|^N / N! · e^{|r|}, with e^{|r|} < 2.
    let mag = r.lo.abs().max(r.hi.abs());
    let mut rem = 2.0f64;
    for i in 1..=EXP_TERMS {
        rem = (rem * mag / i as f64).next_up();
    }
    let e_r = sum + FloatInterval::new(-rem, rem);
    let scale = FloatInterval::point(2f64.powi(k as i32));
    let out = e_r * scale;
    (out.lo.max(0.0), out.hi)
}

impl Add for FloatInterval {
    type Output = FloatInterval;
    fn add(self, o: FloatInterval) -> FloatInterval {
        // Adding an exact zero is exact.
        if self.is_exact_zero() {
            return o;
        }
        if o.is_exact_zero() {
            return self;
        }
        FloatInterval::widen(self.lo + o.lo, self.hi + o.hi)
    }
}

impl Sub for FloatInterval {
    type Output = FloatInterval;
    fn sub(self, o: FloatInterval) -> FloatInterval {
        FloatInterval::widen(self.lo - o.hi, self.hi - o.lo)
    }
}

impl Neg for FloatInterval {
    type Output = FloatInterval;
    fn neg(self) -> FloatInterval {
        FloatInterval { lo: -self.hi, hi: -self.lo }
    }
}

impl Mul for FloatInterval {
    type Output = FloatInterval;
    fn mul(self, o: FloatInterval) -> FloatInterval {
        if self.is_exact_zero() || o.is_exact_zero() {
            return FloatInterval::point(0.0);
        }
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        FloatInterval::widen(lo, hi)
    }
}

impl Div for FloatInterval {
    type Output = FloatInterval;
    /// Panics if the divisor contains zero.
    fn div(self, o: FloatInterval) -> FloatInterval {
        assert!(!o.contains_zero(), "division by an interval containing zero");
        let c = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        FloatInterval::widen(lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certified::{exp_neg, q, CReal};

    fn encloses(f: FloatInterval, c: &CReal) -> bool {
        rational_from_f64(f.lo()).unwrap() <= c.lo() && c.hi() <= rational_from_f64(f.hi()).unwrap()
    }

    #[test]
    fn exp_matches_rational_enclosure() {
        for (n, d) in [(0, 1), (1, 1), (-1, 1), (37, 64), (-513, 64), (9, 1), (-12, 7), (1, 3)] {
            let x = q(n, d);
            let f = FloatInterval::from_rational(&x).exp();
            let exact = if n >= 0 { exp_neg(&x, 128).recip().unwrap() } else { exp_neg(&-x.clone(), 128) };
            assert!(encloses(f, &exact), "{x}: {f:?}");
            assert!(f.hi() - f.lo() <= 1e-14 * f.hi().max(1.0), "{x}: too wide {f:?}");
        }
    }

    #[test]
    fn conversions_enclose() {
        for x in [q(1, 3), q(-22, 7), q(10, 1), q(0, 1), Rational::new(1.into(), num_bigint::BigInt::from(3).pow(60))] {
            let f = FloatInterval::from_rational(&x);
            assert!(rational_from_f64(f.lo()).unwrap() <= x && x <= rational_from_f64(f.hi()).unwrap());
        }
        let third = FloatInterval::from_rational(&q(1, 3));
        let one = third + third + third;
        assert!(one.lo() <= 1.0 && 1.0 <= one.hi());
        assert!((third * FloatInterval::point(3.0) - FloatInterval::point(1.0)).contains_zero());
    }
}
