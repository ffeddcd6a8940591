//! Acceptance suite: one PASS/FAIL line per criterion. Every criterion runs
//! even when an earlier one fails; the process exits non-zero on any FAIL.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use lindyn::affine::{random_interval, sc_witness, star_bound_check_on, AffineMap, IntervalSet};
use lindyn::atomic_system::{box_orbit_bound, Atom, AtomicSystem, Copies, OrbitKind, OrbitSpec};
use lindyn::certified::{q, CReal};
use lindyn::classifier::{classify, classify_inverse_pair, tag, Verdict};
use lindyn::conditions::{
    check_br_lemma, check_dn_ratio, check_necessary_fh, compute_dn, IntegerSet, NecessaryFh,
};
use lindyn::fhc::{construct_fh_vector, empirical_fh_check, schedule_frequencies, with_designed, DenseFamily};
use lindyn::odometer::{
    conservativity_evidence, depth_check, period_of_depth, Cylinder, CylinderSet, StepFunction,
};
use lindyn::operator::{apply_s, apply_t, LpVector};
use lindyn::random::{bounded_distortion_system, mixed_system, positive_rational};
use lindyn::shift_bridge::{classify_shift, ShiftMode, ShiftWeights};
use lindyn::weight_profile::{Summability, WeightProfile};
use lindyn::Rational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("runtime {t:.2?} exceeds {limit:?}"))
}

fn halving_line() -> AtomicSystem {
    let w = WeightProfile::two_sided(q(1, 1), q(1, 2), q(1, 1), q(1, 2));
    AtomicSystem::bijective(vec![OrbitSpec::z_line(w).with_copies(Copies::Countable)], q(2, 1)).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let sys = halving_line();
    let three = CReal::exact(q(3, 1));
    for (copy, index) in [(0, 0), (-4, 7), (9, -3)] {
        match sys.orbit_sum(&Atom::new(0, copy, index)).map_err(|e| e.to_string())? {
            Summability::Summable { total } if total == three => {}
            other => return Err(format!("orbit sum at ({copy},{index}) is {other:?}")),
        }
    }
    for l in 1..=10u64 {
        let window = sys.box_window(0, l as i64);
        let bound = box_orbit_bound(&q(3, 1), l);
        match sys.set_orbit_sum(&window).map_err(|e| e.to_string())? {
            Summability::Summable { total } if total.hi() <= bound => {}
            other => return Err(format!("box L={l}: {other:?} vs bound {bound}")),
        }
    }
    let r = classify(&sys).map_err(|e| e.to_string())?;
    for (name, f, want) in [
        ("dissipative", &r.dissipative, Verdict::Yes),
        ("sc", &r.sc, Verdict::Holds),
        ("chaotic", &r.chaotic, Verdict::Yes),
        ("frequently_hypercyclic", &r.frequently_hypercyclic, Verdict::Yes),
        ("topologically_mixing", &r.topologically_mixing, Verdict::Yes),
    ] {
        ensure(f.is(want), || format!("{name} = {:?}", f.verdict))?;
    }
    within(start, Duration::from_secs(1))?;
    Ok(format!("orbit sum 3, boxes L<=10 within 3(2L+1)^2, all verdicts yes in {:.2?}", start.elapsed()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    for (d, n) in [(1, 2), (2, 4), (3, 24)] {
        ensure(period_of_depth(d) == n, || format!("N_{d} = {}", period_of_depth(d)))?;
    }
    let mut cylinders = 0;
    for depth in 1..=5 {
        let n = period_of_depth(depth) as i64;
        for c in Cylinder::root().refine(depth) {
            let chi = StepFunction::from_terms([(Rational::one(), CylinderSet::from_cylinders([c.clone()]))]);
            ensure(chi.apply_t(n) == chi, || format!("T^{n} moves {c}"))?;
            cylinders += 1;
        }
    }
    for depth in 1..=6 {
        let check = depth_check(depth).map_err(|e| e.to_string())?;
        ensure(check.total.is_one(), || format!("depth {depth} measures sum to {}", check.total))?;
    }
    for depth in 1..=4 {
        let n = period_of_depth(depth);
        for c in Cylinder::root().refine(depth) {
            let ev = conservativity_evidence(&CylinderSet::from_cylinders([c.clone()]), n)
                .map_err(|e| format!("{c}: {e}"))?;
            ensure(ev.n <= n && ev.measure > q(0, 1), || format!("{c}: {ev:?}"))?;
        }
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("{cylinders} cylinders periodic, measures exact to depth 6, returns to depth 4 in {:.2?}", start.elapsed()))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let intervals: Vec<_> = (0..1000).map(|_| random_interval(&mut rng)).collect();
    let mut maps = Vec::new();
    while maps.len() < 20 {
        let a = q(rng.gen_range(1..=8), 8) * if rng.gen_bool(0.5) { q(1, 1) } else { q(-1, 1) };
        let b = q(rng.gen_range(-8..=8), rng.gen_range(1..=4));
        if let Ok(m) = AffineMap::new(a, b) {
            maps.push(m);
        }
    }
    let mut worst = f64::INFINITY;
    for m in &maps {
        let r = star_bound_check_on(m, &intervals);
        ensure(r.violations == 0 && r.uncertified == 0, || {
            format!("a={} b={}: {} violations, {} uncertified", m.a(), m.b(), r.violations, r.uncertified)
        })?;
        worst = worst.min(r.min_ratio / r.bound);
    }
    let f = AffineMap::new(q(1, 1), q(1, 1)).unwrap();
    let w = sc_witness(&f, &IntervalSet::interval(q(0, 1), q(1, 1)), &q(1, 10), 40).map_err(|e| e.to_string())?;
    let total = w.total();
    let head = &w.head.last().unwrap().1;
    // Integer translates of [0, 1] tile the line, so the orbit sum is μ(R) = 1.
    ensure(head.hi() <= total.hi(), || "head exceeds head + tail".into())?;
    ensure(total.lo() <= q(1, 1) + q(1, 1_000_000_000), || format!("head + tail = {total}"))?;
    ensure((total.to_f64() - 1.0).abs() <= 1e-9 && total.radius_f64() <= 1e-9, || format!("head + tail = {total}"))?;
    within(start, Duration::from_secs(5))?;
    Ok(format!(
        "20000 certified margins >= 0 (min ratio/bound {worst:.4}); (1,1) witness total {:.12} in {:.2?}",
        total.to_f64(),
        start.elapsed()
    ))
}

fn criterion_4() -> Outcome {
    let flat = AtomicSystem::bijective(vec![OrbitSpec::z_line(WeightProfile::constant(q(1, 1)))], q(1, 1)).unwrap();
    let dn = compute_dn(&flat, &[Atom::base(0)], 200).map_err(|e| e.to_string())?;
    ensure(dn.values.values().all(|v| *v == CReal::one()), || "d_n is not identically 1".into())?;
    ensure(matches!(check_necessary_fh(&dn), NecessaryFh::FailsNecessary(_)), || "necessary condition not failed".into())?;
    let r = classify(&flat).map_err(|e| e.to_string())?;
    ensure(r.frequently_hypercyclic.is(Verdict::No), || format!("flat FH = {:?}", r.frequently_hypercyclic.verdict))?;
    ensure(r.frequently_hypercyclic.justification == tag::ERGODIC_ATOMIC, || {
        format!("flat FH justified by {:?}", r.frequently_hypercyclic.justification)
    })?;
    let doubling = ShiftWeights::constant(ShiftMode::Bilateral, q(2, 1)).unwrap();
    let s = classify_shift(&doubling, &q(1, 1)).map_err(|e| e.to_string())?;
    let (fh, ch) = (s.classification.frequently_hypercyclic.verdict, s.classification.chaotic.verdict);
    ensure(fh == Verdict::Yes && ch == Verdict::Yes, || {
        format!(
            "flat line passes (d_n = 1, FH = no); bilateral w = 2 gives FH = {fh:?}, chaotic = {ch:?} (finite μ(X): {:?}, {})",
            s.classification.mu_finite.verdict, s.classification.mu_finite.justification
        )
    })?;
    Ok("flat line d_n = 1 and FH = no; bilateral w = 2 FH = chaotic = yes".into())
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut dn_checked = 0;
    for i in 0..1000 {
        let sys = mixed_system(&mut rng);
        let hopf = sys.hopf_decompose();
        let cons: BTreeSet<usize> = hopf.conservative.iter().copied().collect();
        let diss: BTreeSet<usize> = hopf.dissipative.iter().copied().collect();
        ensure(cons.is_disjoint(&diss) && cons.len() + diss.len() == sys.orbits().len(), || format!("system {i}: Hopf parts overlap or miss orbits"))?;
        for (k, o) in sys.orbits().iter().enumerate() {
            ensure(cons.contains(&k) == matches!(o.kind, OrbitKind::Cycle(_)), || format!("system {i}: orbit {k} misplaced"))?;
        }
        let lines: Vec<Atom> = diss.iter().map(|&k| Atom::base(k)).collect();
        if !lines.is_empty() {
            let dn = compute_dn(&sys, &lines, 12).map_err(|e| format!("system {i}: {e}"))?;
            ensure(dn.get(0) == Some(&CReal::one()), || format!("system {i}: d_0 = {:?}", dn.get(0)))?;
            ensure(check_dn_ratio(&dn), || format!("system {i}: d_(n+1) >= d_n / c violated"))?;
            dn_checked += 1;
        }
        let r = classify(&sys).map_err(|e| format!("system {i}: {e}"))?;
        let v = r.violations();
        ensure(v.is_empty(), || format!("system {i}: forbidden combination {v:?}"))?;
    }
    Ok(format!("1000 systems: Hopf exact, d_0 = 1 and ratio bound on {dn_checked}, no forbidden verdicts"))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let sys = AtomicSystem::bijective(vec![OrbitSpec::z_line(WeightProfile::geometric(q(1, 1), q(1, 2)))], q(1, 1)).unwrap();
    let schedule = schedule_frequencies(3);
    let check = schedule.verify(1_000_000);
    ensure(check.passes(0.9), || format!("schedule check {check:?}"))?;
    let family = DenseFamily::new(&sys).map_err(|e| e.to_string())?;
    let horizon = 100_000;
    let x = construct_fh_vector(&sys, &family, &schedule, horizon + 64).map_err(|e| e.to_string())?;
    let report = empirical_fh_check(&sys, &x, &[Atom::base(0)], 0.1, horizon, 50, 64).map_err(|e| e.to_string())?;
    let report = with_designed(report, &schedule);
    let slot = &report.slots[0];
    ensure(slot.lower_estimate >= slot.designed / 2.0, || {
        format!("slot 1 lower density {:.5} < designed {:.5} / 2", slot.lower_estimate, slot.designed)
    })?;
    within(start, Duration::from_secs(60))?;
    Ok(format!(
        "schedule verified to 10^6 (min gap {}), slot 1 lower density {:.5} vs designed {:.5}, in {:.2?}",
        check.min_gap,
        slot.lower_estimate,
        slot.designed,
        start.elapsed()
    ))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..1000 {
        let sys = mixed_system(&mut rng);
        let mut phi = LpVector::zero();
        for _ in 0..rng.gen_range(1..=6) {
            let orbit = rng.gen_range(0..sys.orbits().len());
            let copy = if sys.orbit(orbit).copies.contains(1) { rng.gen_range(0..=1) } else { 0 };
            let index = match sys.orbit(orbit).kind {
                OrbitKind::Cycle(len) => rng.gen_range(0..len as i64),
                _ => rng.gen_range(-50..=50),
            };
            let sign = if rng.gen_bool(0.5) { q(1, 1) } else { q(-1, 1) };
            phi.add_to(Atom::new(orbit, copy, index), positive_rational(&mut rng, 9, 9) * sign);
        }
        let n = rng.gen_range(0..=100u64);
        let back = apply_t(&sys, &apply_s(&sys, &phi, n).map_err(|e| e.to_string())?, n).map_err(|e| e.to_string())?;
        ensure(back == phi, || format!("case {i}: T^{n} S^{n} φ != φ"))?;
    }
    Ok("1000 random (φ, n <= 100): T^n S^n φ = φ exactly".into())
}

fn criterion_8() -> Outcome {
    let geometric = WeightProfile::geometric(q(1, 1), q(1, 2));
    let mut worst: f64 = 0.0;
    for h in [1_000, 10_000, 100_000, 1_000_000] {
        let r = check_br_lemma(&geometric, &IntegerSet::Naturals, h).map_err(|e| e.to_string())?;
        ensure(r.max_beta <= 3.0 + 1e-9, || format!("β = {} at horizon {h}", r.max_beta))?;
        worst = worst.max(r.max_beta);
    }
    let flat = WeightProfile::constant(q(1, 1));
    let mut previous = 0.0;
    for h in [100, 1_000, 10_000] {
        let r = check_br_lemma(&flat, &IntegerSet::Naturals, h).map_err(|e| e.to_string())?;
        ensure(r.max_beta > previous, || format!("β stalls at horizon {h}"))?;
        previous = r.max_beta;
    }
    ensure(previous > 1000.0, || format!("divergent β only reached {previous} by 10^4"))?;
    Ok(format!("geometric max β {worst:.9} <= 3 to 10^6; constant α reaches β = {previous} by 10^4"))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..100 {
        let sys = bounded_distortion_system(&mut rng);
        let pair = classify_inverse_pair(&sys).map_err(|e| format!("system {i}: {e}"))?;
        ensure(pair.forward.bounded_distortion.is(Verdict::Bounded), || {
            format!("system {i}: distortion {:?}", pair.forward.bounded_distortion.verdict)
        })?;
        let (f, b) = (&pair.forward, &pair.inverse);
        ensure(f.frequently_hypercyclic.verdict == b.frequently_hypercyclic.verdict, || {
            format!("system {i}: FH {:?} vs {:?}", f.frequently_hypercyclic.verdict, b.frequently_hypercyclic.verdict)
        })?;
        ensure(f.chaotic.verdict == b.chaotic.verdict, || {
            format!("system {i}: chaotic {:?} vs {:?}", f.chaotic.verdict, b.chaotic.verdict)
        })?;
    }
    Ok("100 bounded-distortion systems: identical FH and chaotic verdicts for f and f^-1".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("halving line reproduction", criterion_1),
        ("odometer periodicity and measures", criterion_2),
        ("affine star bound and witness", criterion_3),
        ("necessary condition contrapositive", criterion_4),
        ("lemma invariants on random systems", criterion_5),
        ("frequent hypercyclicity construction", criterion_6),
        ("T S = identity", criterion_7),
        ("density-set lemma desk check", criterion_8),
        ("inverse duality", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
