//! Amplitude scalars for [`crate::LpVector`].
//!
//! The operator layer is written once over [`Scalar`]; exact rationals back
//! every verdict-adjacent computation while `f32`/`f64` serve the fast
//! statistics loops.

use std::fmt::Debug;

use num_traits::{Float, Num, Signed};

use crate::certified::{rational_from_f64, rational_to_f64};
use crate::Rational;

pub trait Scalar: Num + Signed + Clone + PartialOrd + Debug + Send + Sync + 'static {
    fn from_rational(q: &Rational) -> Self;

    /// Exact rational value, when one exists (`None` for NaN/infinite floats).
    fn to_rational(&self) -> Option<Rational>;

    fn to_f64(&self) -> f64;

    /// `|self|^p` in double precision.
    fn abs_powf(&self, p: f64) -> f64 {
        self.to_f64().abs().powf(p)
    }
}

impl Scalar for Rational {
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
}

impl Scalar for f64 {
    fn from_rational(q: &Rational) -> Self {
        rational_to_f64(q)
    }

    fn to_rational(&self) -> Option<Rational> {
        rational_from_f64(*self)
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_rational(q: &Rational) -> Self {
        rational_to_f64(q) as f32
    }

    fn to_rational(&self) -> Option<Rational> {
        rational_from_f64(*self as f64)
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }
}

/// Float scalars usable in the density inner loop.
pub trait FloatScalar: Scalar + Float {}

impl<T: Scalar + Float> FloatScalar for T {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certified::q;

    #[test]
    fn conversions_round_trip_dyadics() {
        let x = q(3, 8);
        assert_eq!(<f64 as Scalar>::from_rational(&x), 0.375);
        assert_eq!(0.375f64.to_rational(), Some(x.clone()));
        assert_eq!(<f32 as Scalar>::from_rational(&x).to_rational(), Some(x));
        assert_eq!(f64::NAN.to_rational(), None);
    }
}
