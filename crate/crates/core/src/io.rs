//! JSON descriptors for profiles, systems and sparse vectors.
//!
//! Rationals are written as `"num/den"` strings; plain JSON numbers and
//! decimal strings are accepted on input.

use serde_json::{json, Map, Value};

use crate::atomic_system::{Atom, AtomicSystem, Copies, Mode, OrbitKind, OrbitSpec};
use crate::certified::{format_rational, parse_rational};
use crate::error::{Error, Result};
use crate::operator::LpVector;
use crate::weight_profile::{BaseSequence, TailCertificate, WeightFamily, WeightProfile};
use crate::Rational;

fn err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn rational_from_json(v: &Value) -> Result<Rational> {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => return Err(err(format!("expected a rational, got {other}"))),
    };
    parse_rational(&s).ok_or_else(|| err(format!("cannot parse rational {s:?}")))
}

pub fn rational_to_json(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| err(format!("missing field {key:?}")))
}

fn rat_field(obj: &Map<String, Value>, key: &str) -> Result<Rational> {
    rational_from_json(field(obj, key)?)
}

fn as_object(v: &Value) -> Result<&Map<String, Value>> {
    v.as_object().ok_or_else(|| err("expected a JSON object"))
}

fn rat_list(v: &Value) -> Result<Vec<Rational>> {
    v.as_array().ok_or_else(|| err("expected an array"))?.iter().map(rational_from_json).collect()
}

fn base_from_json(v: &Value) -> Result<BaseSequence> {
    let obj = as_object(v)?;
    let kind = field(obj, "kind")?.as_str().ok_or_else(|| err("base kind must be a string"))?;
    match kind {
        "const" => Ok(BaseSequence::Const(rat_field(obj, "value")?)),
        "periodic" => Ok(BaseSequence::Periodic(rat_list(field(obj, "values")?)?)),
        "split" => Ok(BaseSequence::Split {
            head: obj.get("head").map(rat_list).transpose()?.unwrap_or_default(),
            tail: rat_field(obj, "tail")?,
            negative: rat_field(obj, "negative")?,
        }),
        other => Err(err(format!("unknown base kind {other:?}"))),
    }
}

fn base_to_json(b: &BaseSequence) -> Value {
    let list = |v: &[Rational]| Value::Array(v.iter().map(rational_to_json).collect());
    match b {
        BaseSequence::Const(c) => json!({"kind": "const", "value": rational_to_json(c)}),
        BaseSequence::Periodic(v) => json!({"kind": "periodic", "values": list(v)}),
        BaseSequence::Split { head, tail, negative } => json!({
            "kind": "split",
            "head": list(head),
            "tail": rational_to_json(tail),
            "negative": rational_to_json(negative),
        }),
    }
}

pub fn profile_from_json(v: &Value) -> Result<WeightProfile> {
    let obj = as_object(v)?;
    let family = field(obj, "family")?.as_str().ok_or_else(|| err("family must be a string"))?;
    let family = match family {
        "explicit_table" => {
            let values = as_object(field(obj, "values")?)?;
            let mut table = std::collections::BTreeMap::new();
            for (k, val) in values {
                let n: i64 = k.trim().parse().map_err(|_| err(format!("table key {k:?} is not an integer")))?;
                table.insert(n, rational_from_json(val)?);
            }
            WeightFamily::ExplicitTable(table)
        }
        "geometric" => WeightFamily::Geometric { a: rat_field(obj, "a")?, r: rat_field(obj, "r")? },
        "constant" => WeightFamily::Geometric { a: rat_field(obj, "a")?, r: Rational::from_integer(1.into()) },
        "two_sided" => WeightFamily::TwoSided {
            a_pos: rat_field(obj, "a_pos")?,
            r_pos: rat_field(obj, "r_pos")?,
            a_neg: rat_field(obj, "a_neg")?,
            r_neg: rat_field(obj, "r_neg")?,
        },
        "power" => WeightFamily::Power { a: rat_field(obj, "a")?, s: rat_field(obj, "s")? },
        "product_form" => WeightFamily::ProductForm {
            base: base_from_json(field(obj, "base")?)?,
            p: rat_field(obj, "p")?,
            bilateral: obj.get("bilateral").and_then(Value::as_bool).unwrap_or(false),
        },
        "reversed" => WeightFamily::Reversed(Box::new(profile_from_json(field(obj, "inner")?)?)),
        other => return Err(err(format!("unknown profile family {other:?}"))),
    };
    let tail = match obj.get("tail") {
        None | Some(Value::Null) => None,
        Some(t) => {
            let t = as_object(t)?;
            let n0 = field(t, "N0")?.as_u64().ok_or_else(|| err("N0 must be a nonnegative integer"))?;
            Some(TailCertificate { n0, c: rat_field(t, "C")?, r: rat_field(t, "r")? })
        }
    };
    let profile = WeightProfile { family, tail };
    profile.validate()?;
    Ok(profile)
}

pub fn profile_to_json(p: &WeightProfile) -> Result<Value> {
    let r = rational_to_json;
    let mut v = match &p.family {
        WeightFamily::ExplicitTable(t) => {
            let values: Map<String, Value> = t.iter().map(|(k, v)| (k.to_string(), r(v))).collect();
            json!({"family": "explicit_table", "values": values})
        }
        WeightFamily::Geometric { a, r: ratio } => json!({"family": "geometric", "a": r(a), "r": r(ratio)}),
        WeightFamily::TwoSided { a_pos, r_pos, a_neg, r_neg } => json!({
            "family": "two_sided",
            "a_pos": r(a_pos), "r_pos": r(r_pos), "a_neg": r(a_neg), "r_neg": r(r_neg),
        }),
        WeightFamily::Power { a, s } => json!({"family": "power", "a": r(a), "s": r(s)}),
        WeightFamily::ProductForm { base, p, bilateral } => json!({
            "family": "product_form", "base": base_to_json(base), "p": r(p), "bilateral": bilateral,
        }),
        WeightFamily::Reversed(inner) => json!({"family": "reversed", "inner": profile_to_json(inner)?}),
        WeightFamily::Custom(c) => return Err(err(format!("custom profile {:?} has no descriptor", c.label))),
    };
    if let Some(t) = &p.tail {
        v["tail"] = json!({"N0": t.n0, "C": r(&t.c), "r": r(&t.r)});
    }
    Ok(v)
}

pub fn system_from_json(v: &Value) -> Result<AtomicSystem> {
    let obj = as_object(v)?;
    let p = rat_field(obj, "p")?;
    let mode = match obj.get("mode").and_then(Value::as_str).unwrap_or("bijective") {
        "bijective" => Mode::Bijective,
        "forward" => Mode::Forward,
        other => return Err(err(format!("unknown mode {other:?}"))),
    };
    let orbits = field(obj, "orbits")?.as_array().ok_or_else(|| err("orbits must be an array"))?;
    let orbits = orbits
        .iter()
        .map(|o| {
            let o = as_object(o)?;
            let kind = match field(o, "kind")?.as_str() {
                Some("z_line") => OrbitKind::ZLine,
                Some("n_line") => OrbitKind::NLine,
                Some("cycle") => OrbitKind::Cycle(
                    field(o, "length")?.as_u64().ok_or_else(|| err("cycle length must be an integer"))?,
                ),
                _ => return Err(err("orbit kind must be z_line, cycle or n_line")),
            };
            let copies = match o.get("copies") {
                None => Copies::Finite(1),
                Some(Value::String(s)) if s == "countable" => Copies::Countable,
                Some(c) => Copies::Finite(c.as_u64().ok_or_else(|| err("copies must be an integer or \"countable\""))?),
            };
            Ok(OrbitSpec { kind, weights: profile_from_json(field(o, "weights")?)?, copies })
        })
        .collect::<Result<Vec<_>>>()?;
    AtomicSystem::new(orbits, p, mode)
}

pub fn system_to_json(s: &AtomicSystem) -> Result<Value> {
    let orbits = s
        .orbits()
        .iter()
        .map(|o| {
            let mut v = json!({"weights": profile_to_json(&o.weights)?});
            match o.kind {
                OrbitKind::ZLine => v["kind"] = json!("z_line"),
                OrbitKind::NLine => v["kind"] = json!("n_line"),
                OrbitKind::Cycle(len) => {
                    v["kind"] = json!("cycle");
                    v["length"] = json!(len);
                }
            }
            match o.copies {
                Copies::Finite(1) => {}
                Copies::Finite(n) => v["copies"] = json!(n),
                Copies::Countable => v["copies"] = json!("countable"),
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    let mode = match s.mode() {
        Mode::Bijective => "bijective",
        Mode::Forward => "forward",
    };
    Ok(json!({"p": rational_to_json(s.p()), "mode": mode, "orbits": orbits}))
}

pub fn atom_from_json(v: &Value) -> Result<Atom> {
    let o = as_object(v)?;
    let int = |key: &str, default: Option<i64>| -> Result<i64> {
        match o.get(key) {
            Some(x) => x.as_i64().ok_or_else(|| err(format!("{key} must be an integer"))),
            None => default.ok_or_else(|| err(format!("missing field {key:?}"))),
        }
    };
    Ok(Atom { orbit: int("orbit", None)? as usize, copy: int("copy", Some(0))?, index: int("index", None)? })
}

pub fn vector_from_json(v: &Value) -> Result<LpVector<Rational>> {
    let entries = v.as_array().ok_or_else(|| err("a vector literal is an array of entries"))?;
    let mut out = LpVector::zero();
    for e in entries {
        let atom = atom_from_json(e)?;
        let amp = rat_field(as_object(e)?, "amp")?;
        out.add_to(atom, amp);
    }
    Ok(out)
}

pub fn vector_to_json(v: &LpVector<Rational>) -> Value {
    Value::Array(
        v.iter()
            .map(|(a, amp)| json!({"orbit": a.orbit, "copy": a.copy, "index": a.index, "amp": rational_to_json(amp)}))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certified::q;

    fn fixture(text: &str) -> AtomicSystem {
        system_from_json(&serde_json::from_str(text).unwrap()).unwrap()
    }

    #[test]
    fn fixtures_load_round_trip_and_classify() {
        use crate::classifier::{classify, Verdict};
        let cases = [
            (include_str!("../fixtures/halving_line.json"), Verdict::Yes),
            (include_str!("../fixtures/flat_line.json"), Verdict::No),
            // μ(i) = 2^{-|i|} off the origin pair: total 3.
            (include_str!("../fixtures/chaotic_shift.json"), Verdict::Yes),
            // A cycle: T^3 fixes that part, so no dense orbit.
            (include_str!("../fixtures/mixed.json"), Verdict::No),
            // Σ (1 + |n|)^{-2} < ∞ on both copies.
            (include_str!("../fixtures/power_line.json"), Verdict::Yes),
        ];
        for (text, chaotic) in cases {
            let s = fixture(text);
            assert_eq!(system_from_json(&system_to_json(&s).unwrap()).unwrap(), s);
            let r = classify(&s).unwrap();
            assert_eq!(r.chaotic.verdict, chaotic, "{text}");
            assert!(r.violations().is_empty());
        }
        // Forward shift with w ≡ 1/2: μ({i}) = 2^{i+1} is not summable. The
        // generic classifier leaves chaos open on forward lines; the shift view decides it.
        let s = fixture(include_str!("../fixtures/unilateral_shift.json"));
        assert_eq!(classify(&s).unwrap().mu_finite.verdict, Verdict::No);
        let w = crate::shift_bridge::system_to_shift(&s).unwrap();
        let r = crate::shift_bridge::classify_shift(&w, s.p()).unwrap();
        assert_eq!(r.classification.chaotic.verdict, Verdict::No);
        assert!(r.equivalence.is(Verdict::Holds));
    }

    #[test]
    fn profile_round_trip() {
        let profiles = [
            WeightProfile::two_sided(q(1, 1), q(1, 2), q(1, 1), q(1, 2)),
            WeightProfile::power(q(3, 2), q(5, 2)),
            WeightProfile::table([(0, q(7, 24)), (1, q(1, 24))]).with_tail(TailCertificate {
                n0: 2,
                c: q(1, 1),
                r: q(1, 2),
            }),
            WeightProfile::product_form(
                BaseSequence::Split { head: vec![q(1, 2)], tail: q(2, 1), negative: q(1, 2) },
                q(1, 1),
                true,
            ),
            WeightProfile::product_form(BaseSequence::Periodic(vec![q(2, 1), q(1, 3)]), q(2, 1), false),
        ];
        for p in profiles {
            let v = profile_to_json(&p).unwrap();
            assert_eq!(profile_from_json(&v).unwrap(), p, "{v}");
        }
    }

    #[test]
    fn system_parses_spec_format() {
        let v: Value = serde_json::from_str(
            r#"{"p": 2, "mode": "bijective", "orbits": [
                {"kind": "z_line", "copies": "countable",
                 "weights": {"family": "two_sided", "a_pos": "1", "r_pos": "1/2", "a_neg": "1", "r_neg": "1/2"}},
                {"kind": "cycle", "length": 2,
                 "weights": {"family": "explicit_table", "values": {"0": "1/2", "1": 0.25}}}]}"#,
        )
        .unwrap();
        let s = system_from_json(&v).unwrap();
        assert_eq!(s.orbits().len(), 2);
        assert_eq!(s.orbit(1).weights.weight_at(1).unwrap().mid(), &q(1, 4));
        assert_eq!(system_from_json(&system_to_json(&s).unwrap()).unwrap(), s);
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        for bad in [
            r#"{"p": 2, "orbits": []}"#,
            r#"{"p": "x", "orbits": [{"kind": "z_line", "weights": {"family": "geometric", "a": 1, "r": 1}}]}"#,
            r#"{"p": 1, "orbits": [{"kind": "z_line", "weights": {"family": "geometric", "a": -1, "r": 1}}]}"#,
            r#"{"p": 1, "orbits": [{"kind": "cycle", "weights": {"family": "geometric", "a": 1, "r": 1}}]}"#,
        ] {
            let v: Value = serde_json::from_str(bad).unwrap();
            assert!(system_from_json(&v).is_err(), "{bad}");
        }
    }

    #[test]
    fn vector_literals() {
        let v: Value = serde_json::from_str(r#"[{"orbit": 0, "index": -1, "amp": "3/2"}, {"orbit": 0, "copy": 2, "index": 0, "amp": 1}]"#).unwrap();
        let x = vector_from_json(&v).unwrap();
        assert_eq!(x.get(&Atom::new(0, 0, -1)), Some(&q(3, 2)));
        assert_eq!(vector_from_json(&vector_to_json(&x)).unwrap(), x);
    }
}
