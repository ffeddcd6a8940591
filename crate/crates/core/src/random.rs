//! Seeded generators of atomic systems for property tests and sweeps.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::atomic_system::{AtomicSystem, Copies, OrbitSpec};
use crate::certified::q;
use crate::weight_profile::{BaseSequence, WeightProfile};
use crate::Rational;

/// A rational `n/d` with `1 <= n <= max_num`, `1 <= d <= max_den`.
pub fn positive_rational(rng: &mut impl Rng, max_num: i64, max_den: i64) -> Rational {
    q(rng.gen_range(1..=max_num), rng.gen_range(1..=max_den))
}

fn ratio(rng: &mut impl Rng) -> Rational {
    [q(1, 2), q(1, 3), q(2, 3), q(3, 4), q(1, 1), q(3, 2), q(2, 1)].choose(rng).cloned().expect("nonempty")
}

fn shift_weight(rng: &mut impl Rng) -> Rational {
    [q(1, 2), q(2, 3), q(1, 1), q(3, 2), q(2, 1), q(3, 1)].choose(rng).cloned().expect("nonempty")
}

fn base_sequence(rng: &mut impl Rng) -> BaseSequence {
    let w = shift_weight;
    match rng.gen_range(0..3) {
        0 => BaseSequence::Const(w(rng)),
        1 => BaseSequence::Periodic((0..rng.gen_range(1..=3)).map(|_| w(rng)).collect()),
        _ => BaseSequence::Split {
            head: (0..rng.gen_range(0..=2)).map(|_| w(rng)).collect(),
            tail: w(rng),
            negative: w(rng),
        },
    }
}

/// A weight profile on `Z` with rational values from one of the closed-form families.
pub fn line_profile(rng: &mut impl Rng) -> WeightProfile {
    match rng.gen_range(0..4) {
        0 => WeightProfile::geometric(positive_rational(rng, 4, 4), ratio(rng)),
        1 => WeightProfile::two_sided(positive_rational(rng, 4, 4), ratio(rng), positive_rational(rng, 4, 4), ratio(rng)),
        2 => WeightProfile::power(positive_rational(rng, 4, 4), q(rng.gen_range(0..=3), 1)),
        _ => WeightProfile::product_form(base_sequence(rng), q(rng.gen_range(1..=2), 1), true),
    }
}

fn cycle(rng: &mut impl Rng) -> OrbitSpec {
    let len = rng.gen_range(1..=4u64);
    let table = (0..len as i64).map(|k| (k, positive_rational(rng, 5, 5)));
    OrbitSpec::cycle(len, WeightProfile::table(table))
}

fn copies(rng: &mut impl Rng, allow_countable: bool) -> Copies {
    if allow_countable && rng.gen_bool(0.15) {
        Copies::Countable
    } else {
        Copies::Finite(rng.gen_range(1..=3))
    }
}

/// A bijective system mixing lines from every family with occasional cycles.
pub fn mixed_system(rng: &mut impl Rng) -> AtomicSystem {
    let mut orbits = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        orbits.push(OrbitSpec::z_line(line_profile(rng)).with_copies(copies(rng, true)));
    }
    if rng.gen_bool(0.3) {
        orbits.push(cycle(rng).with_copies(copies(rng, false)));
    }
    orbits.shuffle(rng);
    let p = q(rng.gen_range(1..=3), 1);
    AtomicSystem::bijective(orbits, p).expect("generated systems are valid")
}

/// A dissipative bijective system with bounded distortion: one line profile,
/// repeated over finitely many copies and optionally a rescaled second line.
pub fn bounded_distortion_system(rng: &mut impl Rng) -> AtomicSystem {
    let profile = line_profile(rng);
    let mut orbits = vec![OrbitSpec::z_line(profile.clone()).with_copies(copies(rng, false))];
    if rng.gen_bool(0.5) {
        orbits.push(OrbitSpec::z_line(scaled(&profile, positive_rational(rng, 3, 3))).with_copies(copies(rng, false)));
    }
    let p = q(rng.gen_range(1..=3), 1);
    AtomicSystem::bijective(orbits, p).expect("generated systems are valid")
}

/// `c · profile` for the families with an explicit amplitude.
fn scaled(profile: &WeightProfile, c: Rational) -> WeightProfile {
    use crate::weight_profile::WeightFamily as F;
    match &profile.family {
        F::Geometric { a, r } => WeightProfile::geometric(a * &c, r.clone()),
        F::TwoSided { a_pos, r_pos, a_neg, r_neg } => {
            WeightProfile::two_sided(a_pos * &c, r_pos.clone(), a_neg * &c, r_neg.clone())
        }
        F::Power { a, s } => WeightProfile::power(a * &c, s.clone()),
        _ => profile.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_are_seeded_and_valid() {
        let mut a = ChaCha8Rng::seed_from_u64(3);
        let mut b = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let s = mixed_system(&mut a);
            assert_eq!(s, mixed_system(&mut b));
            s.validate().unwrap();
            bounded_distortion_system(&mut a).validate().unwrap();
            let _ = bounded_distortion_system(&mut b);
        }
    }
}
