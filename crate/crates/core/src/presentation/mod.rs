//! Streamed atomic diagrams of a differential field with a unary predicate.
//!
//! A stream is a sequence of facts over element indices. Indices are
//! introduced before use, operation tables are functional, and distinct
//! indices denote distinct elements. On disk a stream is one JSON object per
//! line with fields in the fixed order `k, a, b, r, i, v, name`:
//!
//! ```text
//! {"k":"intro","i":0}
//! {"k":"const","i":0,"name":"zero"}
//! {"k":"cflag","a":0,"v":true}
//! {"k":"add","a":2,"b":3,"r":4}
//! {"k":"delta","a":2,"r":5}
//! ```

mod closure;

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::check_bijection;

pub use closure::{run_closure, Closure, ClosureConfig, SeedEvent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstName {
    Zero,
    One,
}

impl ConstName {
    fn as_str(self) -> &'static str {
        match self {
            ConstName::Zero => "zero",
            ConstName::One => "one",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Add,
    Mul,
    Neg,
    Inv,
    Delta,
}

impl Op {
    pub fn is_binary(self) -> bool {
        matches!(self, Op::Add | Op::Mul)
    }

    fn as_str(self) -> &'static str {
        match self {
            Op::Add => "add",
            Op::Mul => "mul",
            Op::Neg => "neg",
            Op::Inv => "inv",
            Op::Delta => "delta",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fact {
    Intro(u32),
    Const(ConstName, u32),
    Add(u32, u32, u32),
    Mul(u32, u32, u32),
    Neg(u32, u32),
    Inv(u32, u32),
    Delta(u32, u32),
    CFlag(u32, bool),
}

/// Table key of an operation fact; operands of binary ops are sorted.
pub type OpKey = (Op, u32, u32);

pub fn op_key(op: Op, a: u32, b: Option<u32>) -> OpKey {
    match b {
        Some(b) => (op, a.min(b), a.max(b)),
        None => (op, a, u32::MAX),
    }
}

impl Fact {
    pub fn op(op: Op, a: u32, b: Option<u32>, r: u32) -> Fact {
        match (op, b) {
            (Op::Add, Some(b)) => Fact::Add(a, b, r),
            (Op::Mul, Some(b)) => Fact::Mul(a, b, r),
            (Op::Neg, _) => Fact::Neg(a, r),
            (Op::Inv, _) => Fact::Inv(a, r),
            (Op::Delta, _) => Fact::Delta(a, r),
            _ => panic!("binary op without second operand"),
        }
    }

    /// `(op, a, b, r)` for operation facts.
    pub fn as_op(&self) -> Option<(Op, u32, Option<u32>, u32)> {
        match *self {
            Fact::Add(a, b, r) => Some((Op::Add, a, Some(b), r)),
            Fact::Mul(a, b, r) => Some((Op::Mul, a, Some(b), r)),
            Fact::Neg(a, r) => Some((Op::Neg, a, None, r)),
            Fact::Inv(a, r) => Some((Op::Inv, a, None, r)),
            Fact::Delta(a, r) => Some((Op::Delta, a, None, r)),
            _ => None,
        }
    }

    pub fn indices(&self) -> Vec<u32> {
        match *self {
            Fact::Intro(i) | Fact::Const(_, i) | Fact::CFlag(i, _) => vec![i],
            Fact::Add(a, b, r) | Fact::Mul(a, b, r) => vec![a, b, r],
            Fact::Neg(a, r) | Fact::Inv(a, r) | Fact::Delta(a, r) => vec![a, r],
        }
    }

    pub fn map_indices(&self, f: impl Fn(u32) -> u32) -> Fact {
        match *self {
            Fact::Intro(i) => Fact::Intro(f(i)),
            Fact::Const(n, i) => Fact::Const(n, f(i)),
            Fact::CFlag(i, v) => Fact::CFlag(f(i), v),
            Fact::Add(a, b, r) => Fact::Add(f(a), f(b), f(r)),
            Fact::Mul(a, b, r) => Fact::Mul(f(a), f(b), f(r)),
            Fact::Neg(a, r) => Fact::Neg(f(a), f(r)),
            Fact::Inv(a, r) => Fact::Inv(f(a), f(r)),
            Fact::Delta(a, r) => Fact::Delta(f(a), f(r)),
        }
    }

    fn to_record(self) -> Record {
        let mut rec = Record::default();
        match self {
            Fact::Intro(i) => {
                rec.k = "intro".into();
                rec.i = Some(i);
            }
            Fact::Const(n, i) => {
                rec.k = "const".into();
                rec.i = Some(i);
                rec.name = Some(n.as_str().into());
            }
            Fact::CFlag(a, v) => {
                rec.k = "cflag".into();
                rec.a = Some(a);
                rec.v = Some(v);
            }
            _ => {
                let (op, a, b, r) = self.as_op().unwrap();
                rec.k = op.as_str().into();
                rec.a = Some(a);
                rec.b = b;
                rec.r = Some(r);
            }
        }
        rec
    }

    fn from_record(rec: Record) -> Result<Fact, String> {
        let need = |x: Option<u32>, f: &str| x.ok_or_else(|| format!("`{}` needs field `{f}`", rec.k));
        let allowed: &[&str] = match rec.k.as_str() {
            "intro" => &["i"],
            "const" => &["i", "name"],
            "cflag" => &["a", "v"],
            "add" | "mul" => &["a", "b", "r"],
            "neg" | "inv" | "delta" => &["a", "r"],
            other => return Err(format!("unknown fact kind `{other}`")),
        };
        for (name, present) in [
            ("a", rec.a.is_some()),
            ("b", rec.b.is_some()),
            ("r", rec.r.is_some()),
            ("i", rec.i.is_some()),
            ("v", rec.v.is_some()),
            ("name", rec.name.is_some()),
        ] {
            if present && !allowed.contains(&name) {
                return Err(format!("`{}` does not take field `{name}`", rec.k));
            }
        }
        Ok(match rec.k.as_str() {
            "intro" => Fact::Intro(need(rec.i, "i")?),
            "const" => {
                let name = match rec.name.as_deref() {
                    Some("zero") => ConstName::Zero,
                    Some("one") => ConstName::One,
                    Some(other) => return Err(format!("unknown constant `{other}`")),
                    None => return Err("`const` needs field `name`".into()),
                };
                Fact::Const(name, need(rec.i, "i")?)
            }
            "cflag" => Fact::CFlag(
                need(rec.a, "a")?,
                rec.v.ok_or("`cflag` needs field `v`")?,
            ),
            k => {
                let op = match k {
                    "add" => Op::Add,
                    "mul" => Op::Mul,
                    "neg" => Op::Neg,
                    "inv" => Op::Inv,
                    _ => Op::Delta,
                };
                let b = if op.is_binary() { Some(need(rec.b, "b")?) } else { None };
                Fact::op(op, need(rec.a, "a")?, b, need(rec.r, "r")?)
            }
        })
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serde_json::to_string(&self.to_record()).expect("serializable"))
    }
}

#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct Record {
    k: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    i: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    v: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

/// Error tied to a 1-based stream line.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct StreamError {
    pub line: usize,
    pub message: String,
}

impl StreamError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        StreamError {
            line,
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FactStream {
    facts: Vec<Fact>,
}

impl FactStream {
    /// Wraps `facts` after checking well-formedness.
    pub fn new(facts: Vec<Fact>) -> Result<Self, StreamError> {
        let s = FactStream { facts };
        s.validate()?;
        Ok(s)
    }

    pub(crate) fn from_trusted(facts: Vec<Fact>) -> Self {
        FactStream { facts }
    }

    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn prefix(&self, stages: usize) -> FactStream {
        FactStream {
            facts: self.facts[..stages.min(self.facts.len())].to_vec(),
        }
    }

    /// Introduced indices in introduction order.
    pub fn introduced(&self) -> Vec<u32> {
        self.facts
            .iter()
            .filter_map(|f| match f {
                Fact::Intro(i) => Some(*i),
                _ => None,
            })
            .collect()
    }

    pub fn constant(&self, name: ConstName) -> Option<u32> {
        self.facts.iter().find_map(|f| match *f {
            Fact::Const(n, i) if n == name => Some(i),
            _ => None,
        })
    }

    /// Functional operation table.
    pub fn table(&self) -> HashMap<OpKey, u32> {
        self.facts
            .iter()
            .filter_map(Fact::as_op)
            .map(|(op, a, b, r)| (op_key(op, a, b), r))
            .collect()
    }

    pub fn cflags(&self) -> HashMap<u32, bool> {
        self.facts
            .iter()
            .filter_map(|f| match *f {
                Fact::CFlag(i, v) => Some((i, v)),
                _ => None,
            })
            .collect()
    }

    pub fn validate(&self) -> Result<(), StreamError> {
        let mut seen = HashSet::new();
        let mut consts: HashMap<ConstName, u32> = HashMap::new();
        let mut table: HashMap<OpKey, u32> = HashMap::new();
        let mut flags: HashMap<u32, bool> = HashMap::new();
        for (pos, fact) in self.facts.iter().enumerate() {
            let line = pos + 1;
            if let Fact::Intro(i) = fact {
                if !seen.insert(*i) {
                    return Err(StreamError::new(line, format!("index {i} introduced twice")));
                }
                continue;
            }
            if let Some(i) = fact.indices().into_iter().find(|i| !seen.contains(i)) {
                return Err(StreamError::new(line, format!("index {i} is used before it is introduced")));
            }
            match *fact {
                Fact::Const(n, i) => {
                    if consts.insert(n, i).is_some_and(|old| old != i) {
                        return Err(StreamError::new(line, format!("second `{}` constant", n.as_str())));
                    }
                }
                Fact::CFlag(i, v) => {
                    if flags.insert(i, v).is_some_and(|old| old != v) {
                        return Err(StreamError::new(line, format!("conflicting C flags for index {i}")));
                    }
                }
                _ => {
                    let (op, a, b, r) = fact.as_op().unwrap();
                    let key = op_key(op, a, b);
                    if let Some(&old) = table.get(&key) {
                        if old != r {
                            return Err(StreamError::new(
                                line,
                                format!("non-functional `{}` table: result {r}, earlier {old}", op.as_str()),
                            ));
                        }
                    }
                    table.insert(key, r);
                }
            }
        }
        Ok(())
    }

    pub fn write(&self) -> String {
        let mut out = String::new();
        for f in &self.facts {
            out.push_str(&f.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses and validates a stream. Blank lines are ignored but counted.
    pub fn read(text: &str) -> Result<Self, StreamError> {
        let mut facts = Vec::new();
        let mut lines = Vec::new();
        for (pos, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            let rec: Record = serde_json::from_str(raw).map_err(|e| {
                StreamError::new(pos + 1, format!("column {}: {e}", e.column()))
            })?;
            facts.push(Fact::from_record(rec).map_err(|m| StreamError::new(pos + 1, m))?);
            lines.push(pos + 1);
        }
        let s = FactStream { facts };
        // report against physical lines
        s.validate().map_err(|e| StreamError::new(lines[e.line - 1], e.message))?;
        Ok(s)
    }
}

/// Renames every index by `pi` (`pi[i]` is the new name of `i`).
///
/// Fact order is kept, so introduce-before-use still holds; the stable
/// re-sort this would otherwise need is the identity.
pub fn apply_permutation(s: &FactStream, pi: &[u32]) -> Result<FactStream, StreamError> {
    let n = s.introduced().len() as u32;
    if let Some(bad) = s.introduced().into_iter().find(|&i| i >= n) {
        return Err(StreamError::new(0, format!("indices are not 0..{n}: found {bad}")));
    }
    check_bijection(pi, n).map_err(|e| StreamError::new(0, e.to_string()))?;
    Ok(FactStream {
        facts: s.facts.iter().map(|f| f.map_indices(|i| pi[i as usize])).collect(),
    })
}

/// Partial injective map between index sets, with the stage up to which
/// it is meant to be defined.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IndexMap {
    map: Vec<Option<u32>>,
    preimage: HashMap<u32, u32>,
    pub stage: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IndexMapFile {
    stage: usize,
    map: Vec<Option<u32>>,
}

impl IndexMap {
    pub fn new(stage: usize) -> Self {
        IndexMap {
            map: Vec::new(),
            preimage: HashMap::new(),
            stage,
        }
    }

    pub fn get(&self, i: u32) -> Option<u32> {
        self.map.get(i as usize).copied().flatten()
    }

    /// Inserts `i -> j`, refusing to break functionality or injectivity.
    pub fn insert(&mut self, i: u32, j: u32) -> Result<(), String> {
        if let Some(old) = self.get(i) {
            return if old == j {
                Ok(())
            } else {
                Err(format!("index {i} already maps to {old}"))
            };
        }
        if let Some(k) = self.preimage.get(&j) {
            return Err(format!("indices {k} and {i} both map to {j}"));
        }
        self.preimage.insert(j, i);
        if self.map.len() <= i as usize {
            self.map.resize(i as usize + 1, None);
        }
        self.map[i as usize] = Some(j);
        Ok(())
    }

    pub fn inverse_of(&self, j: u32) -> Option<u32> {
        self.preimage.get(&j).copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.map
            .iter()
            .enumerate()
            .filter_map(|(i, j)| j.map(|j| (i as u32, j)))
    }

    pub fn defined_count(&self) -> usize {
        self.map.iter().flatten().count()
    }

    pub fn is_empty(&self) -> bool {
        self.defined_count() == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&IndexMapFile {
            stage: self.stage,
            map: self.map.clone(),
        })
        .expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<IndexMap, String> {
        let f: IndexMapFile = serde_json::from_str(s).map_err(|e| e.to_string())?;
        let mut m = IndexMap::new(f.stage);
        for (i, j) in f.map.into_iter().enumerate() {
            if let Some(j) = j {
                m.insert(i as u32, j)?;
            }
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FactStream {
        FactStream::new(vec![
            Fact::Intro(0),
            Fact::Const(ConstName::Zero, 0),
            Fact::CFlag(0, true),
            Fact::Intro(1),
            Fact::Const(ConstName::One, 1),
            Fact::CFlag(1, true),
            Fact::Intro(2),
            Fact::Add(1, 1, 2),
            Fact::CFlag(2, true),
            Fact::Delta(2, 0),
        ])
        .unwrap()
    }

    #[test]
    fn write_read_round_trip() {
        let s = sample();
        let text = s.write();
        assert!(text.starts_with("{\"k\":\"intro\",\"i\":0}\n{\"k\":\"const\",\"i\":0,\"name\":\"zero\"}\n"));
        assert!(text.contains("{\"k\":\"add\",\"a\":1,\"b\":1,\"r\":2}"));
        assert_eq!(FactStream::read(&text).unwrap(), s);
        assert!(FactStream::read("").unwrap().is_empty());
    }

    #[test]
    fn diagnostics_name_the_line() {
        let e = FactStream::read("{\"k\":\"intro\",\"i\":0}\n{\"k\":\"neg\",\"a\":0,\"r\":5}\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("before it is introduced"));

        let e = FactStream::read("{\"k\":\"intro\",\"i\":0}\n\n{\"k\":\"mul\",\"a\":0}\n").unwrap_err();
        assert_eq!(e.line, 3);

        let e = FactStream::read("{\"k\":\"intro\",\"i\":0,\"v\":true}").unwrap_err();
        assert!(e.message.contains("does not take"), "{e}");

        let mut facts = sample().facts().to_vec();
        facts.push(Fact::Add(1, 1, 0));
        assert!(FactStream::new(facts).unwrap_err().message.contains("non-functional"));
    }

    #[test]
    fn permutation_renames() {
        let s = sample();
        assert_eq!(apply_permutation(&s, &[0, 1, 2]).unwrap(), s);
        let p = apply_permutation(&s, &[2, 0, 1]).unwrap();
        p.validate().unwrap();
        assert_eq!(p.constant(ConstName::One), Some(0));
        let back = apply_permutation(&p, &crate::graph::invert(&[2, 0, 1])).unwrap();
        assert_eq!(back, s);
        assert!(apply_permutation(&s, &[0, 0, 1]).is_err());
    }

    #[test]
    fn index_map_is_injective() {
        let mut m = IndexMap::new(3);
        m.insert(0, 4).unwrap();
        m.insert(2, 1).unwrap();
        assert!(m.insert(1, 4).is_err());
        assert!(m.insert(0, 5).is_err());
        let j = m.to_json();
        assert_eq!(j, r#"{"stage":3,"map":[4,null,1]}"#);
        assert_eq!(IndexMap::from_json(&j).unwrap(), m);
    }
}
