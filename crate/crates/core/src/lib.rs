//! Composition operators `φ ↦ φ∘f` on `L^p` of measurable systems.
//!
//! The crate models three concrete families of systems: countable atomic
//! systems presented orbit by orbit, the odometer on a product of cyclic
//! groups, and affine maps of the line under a Laplace-type measure. Verdicts
//! (dissipativity, summability of orbit measures, bounded distortion, chaos,
//! frequent hypercyclicity) are computed with exact rationals or certified
//! intervals; floating point is confined to statistics loops.

pub mod affine;
pub mod atomic_system;
pub mod certified;
pub mod classifier;
pub mod conditions;
pub mod error;
pub mod fhc;
pub mod float_interval;
pub mod io;
pub mod odometer;
pub mod operator;
pub mod random;
pub mod scalar;
pub mod shift_bridge;
pub mod weight_profile;

pub use atomic_system::{Atom, AtomicSystem, Copies, Mode, OrbitKind, OrbitSpec};
pub use certified::CReal;
pub use error::{Error, Result};
pub use operator::LpVector;
pub use scalar::{FloatScalar, Scalar};
pub use weight_profile::{Summability, WeightProfile};

/// Exact rational scalar used on every verdict path.
pub type Rational = num_rational::BigRational;

/// Sparse vector with exact rational amplitudes.
pub type ExactVector = LpVector<Rational>;
/// Sparse vector with double-precision amplitudes.
pub type FloatVector = LpVector<f64>;
/// Sparse vector with single-precision amplitudes.
pub type Float32Vector = LpVector<f32>;
