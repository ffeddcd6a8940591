//! One module per command family. Commands return an [`Outcome`]; the
//! dispatcher wraps it with the manifest and writes the artifacts.

pub mod affine;
pub mod br;
pub mod fhc;
pub mod odometer;
pub mod shift;
pub mod system;

use std::path::Path;

use lindyn::certified::{format_rational, parse_rational};
use lindyn::classifier::{ClassificationReport, Verdict};
use lindyn::io::{atom_from_json, system_from_json, vector_from_json};
use lindyn::{Atom, AtomicSystem, CReal, ExactVector, Rational, Summability};
use serde_json::{json, Value};

use crate::config::Defaults;
use crate::error::CliError;
use crate::manifest::{sha256_hex, RunManifest};
use crate::output::Status;

/// Per-run state shared by the commands.
pub struct Ctx {
    pub defaults: Defaults,
    pub manifest: RunManifest,
}

impl Ctx {
    /// Reads a JSON file and records its hash.
    pub fn read_json(&mut self, path: &Path) -> Result<Value, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        self.manifest.input(path.display().to_string(), sha256_hex(&bytes));
        serde_json::from_slice(&bytes).map_err(|source| CliError::Json { path: path.display().to_string(), source })
    }

    /// An argument holding either a path to a JSON file or an inline JSON literal.
    pub fn json_arg(&mut self, arg: &str) -> Result<Value, CliError> {
        let path = Path::new(arg);
        if path.is_file() {
            return self.read_json(path);
        }
        serde_json::from_str(arg).map_err(|source| CliError::Json { path: format!("inline argument {arg:?}"), source })
    }

    pub fn system(&mut self, path: &Path) -> Result<AtomicSystem, CliError> {
        let v = self.read_json(path)?;
        Ok(system_from_json(&v)?)
    }

    /// A vector file: a bare literal, or a report whose result holds `vector`.
    pub fn vector(&mut self, arg: &str) -> Result<ExactVector, CliError> {
        let v = self.json_arg(arg)?;
        let literal = v.pointer("/result/vector").or_else(|| v.get("vector")).unwrap_or(&v);
        Ok(vector_from_json(literal)?)
    }

    pub fn atoms(&mut self, arg: &str) -> Result<Vec<Atom>, CliError> {
        let v = self.json_arg(arg)?;
        let list = v.as_array().ok_or_else(|| CliError::Usage("an atom list is a JSON array of {orbit, copy?, index}".into()))?;
        Ok(list.iter().map(atom_from_json).collect::<lindyn::Result<Vec<_>>>()?)
    }
}

pub fn rational(s: &str) -> Result<Rational, CliError> {
    parse_rational(s).ok_or_else(|| CliError::Usage(format!("cannot parse {s:?} as a rational (use num/den or a decimal)")))
}

pub fn rat_json(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

/// A certified real: exact value when known, otherwise midpoint and radius.
pub fn creal_json(c: &CReal) -> Value {
    match c.as_exact() {
        Some(q) => json!({"approx": c.to_f64(), "exact": rat_json(q)}),
        None => json!({"approx": c.to_f64(), "radius": c.radius_f64()}),
    }
}

pub fn summability_json(s: &Summability) -> Value {
    match s {
        Summability::Summable { total } => json!({"kind": "summable", "total": creal_json(total)}),
        Summability::Divergent(w) => json!({"kind": "divergent", "witness": w.to_string()}),
        Summability::Undecided(why) => json!({"kind": "undecided", "reason": why}),
    }
}

/// Decided when chaos, frequent hypercyclicity and mixing all have a yes/no
/// answer; otherwise undecided if some input condition could not be settled,
/// else unknown.
pub fn report_status(r: &ClassificationReport) -> Status {
    let decided = |f: &lindyn::classifier::Finding| f.is(Verdict::Yes) || f.is(Verdict::No);
    if [&r.chaotic, &r.frequently_hypercyclic, &r.topologically_mixing].into_iter().all(decided) {
        Status::Decided
    } else if r.has_undecided() {
        Status::Undecided
    } else {
        Status::Unknowns
    }
}

/// Base atom of every copy of every line: a generating wandering set when
/// the system is dissipative with finitely many copies.
pub fn line_bases(system: &AtomicSystem) -> Vec<Atom> {
    let mut w = Vec::new();
    for (i, o) in system.orbits().iter().enumerate() {
        if o.is_cycle() {
            continue;
        }
        let copies = match o.copies {
            lindyn::Copies::Finite(n) => n as i64,
            lindyn::Copies::Countable => 1,
        };
        w.extend((0..copies).map(|c| Atom::new(i, c, 0)));
    }
    w
}
