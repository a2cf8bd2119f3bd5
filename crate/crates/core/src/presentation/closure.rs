//! Deterministic fair closure of a seeded set of generators.
//!
//! The run is a sequence of ticks. Each tick performs one *directed* step
//! (the oldest queued priority task, or else the next seed event) and then
//! works through generic tasks until one of them emits a fact.
//!
//! Generic tasks are visited in the fixed order
//! `Neg(j), Inv(j), Delta(j), Add(0,j), Mul(0,j), ..., Add(j,j), Mul(j,j)`
//! for `j = 0, 1, ...`; a task waits until index `j` exists. A task whose
//! table entry already exists is skipped, as is `Inv` of zero.
//!
//! Seed events introduce generators. Each seeds priority tasks that build
//! the witnesses a decoder looks for:
//!
//! * `A(n)`: `a^2`, `a^3`, `-(a^2)`, `a^3 + -(a^2)`, `Delta(a)`;
//! * `Edge(m, n)` with `s = a_m + a_n`: `s`, `-s`, `u + -1`, `u + -s`,
//!   `u * (u + -1)`, that times `u + -s`, `v * v`, the `Delta` chain of `u`
//!   to the configured depth, and `Delta(v)`.
//!
//! A tick emits at most 7 facts (4 for an edge event or 3 for a task, plus
//! 3 for the generic result), so every witness is present by stage
//! `7 * (events + priority tasks)`. `Add(i, j)` and `Mul(i, j)` for indices
//! introduced by stage `s` appear by stage `s + 7 * (s + 1) * (s + 5)`.

use std::collections::{HashMap, VecDeque};

use super::{op_key, ConstName, Fact, FactStream, Op, OpKey};
use crate::exact::{EdgeId, FieldElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedEvent {
    /// Introduce `a_n`; events must introduce `a_0, a_1, ...` in order.
    A(u32),
    /// Introduce `u_e, v_e` for the edge between `a_m` and `a_n`.
    Edge(u32, u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClosureConfig {
    /// Length of the emitted `Delta` chain of each `u_e`.
    pub depth: u32,
}

impl Default for ClosureConfig {
    fn default() -> Self {
        ClosureConfig { depth: 2 }
    }
}

impl ClosureConfig {
    /// Priority tasks seeded by each event kind.
    pub fn tasks_per_a(&self) -> usize {
        5
    }

    pub fn tasks_per_edge(&self) -> usize {
        8 + self.depth as usize
    }
}

/// A finished run: the stream plus the element behind each index.
#[derive(Clone, Debug)]
pub struct Closure {
    pub stream: FactStream,
    pub values: Vec<FieldElement>,
}

impl Closure {
    pub fn index_of(&self, x: &FieldElement) -> Option<u32> {
        self.values.iter().position(|y| y == x).map(|i| i as u32)
    }

    /// Value-to-index table.
    pub fn lookup(&self) -> HashMap<&FieldElement, u32> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, x)| (x, i as u32))
            .collect()
    }
}

struct Task {
    op: Op,
    x: FieldElement,
    y: Option<FieldElement>,
}

impl Task {
    fn unary(op: Op, x: FieldElement) -> Task {
        Task { op, x, y: None }
    }

    fn binary(op: Op, x: FieldElement, y: FieldElement) -> Task {
        Task { op, x, y: Some(y) }
    }
}

struct Engine {
    facts: Vec<Fact>,
    values: Vec<FieldElement>,
    lookup: HashMap<FieldElement, u32>,
    table: HashMap<OpKey, u32>,
    priority: VecDeque<Task>,
    cursor_j: u32,
    cursor_phase: u32,
    budget: usize,
}

impl Engine {
    fn full(&self) -> bool {
        self.facts.len() >= self.budget
    }

    fn intro(&mut self, x: FieldElement) -> u32 {
        let i = self.values.len() as u32;
        self.facts.push(Fact::Intro(i));
        self.lookup.insert(x.clone(), i);
        self.values.push(x);
        i
    }

    fn flag(&mut self, i: u32) {
        let c = self.values[i as usize].is_c();
        self.facts.push(Fact::CFlag(i, c));
    }

    fn generator(&mut self, x: FieldElement) -> u32 {
        let i = self.intro(x);
        self.flag(i);
        i
    }

    /// Performs one operation; returns whether anything was emitted.
    fn apply(&mut self, op: Op, a: u32, b: Option<u32>) -> bool {
        let key = op_key(op, a, b);
        if self.table.contains_key(&key) {
            return false;
        }
        let x = &self.values[a as usize];
        let value = match op {
            Op::Add => x.add(&self.values[b.unwrap() as usize]),
            Op::Mul => x.mul(&self.values[b.unwrap() as usize]),
            Op::Neg => x.neg(),
            Op::Delta => x.delta(),
            Op::Inv => match x.inv() {
                Ok(y) => y,
                Err(_) => return false,
            },
        };
        let (r, fresh) = match self.lookup.get(&value) {
            Some(&r) => (r, false),
            None => (self.intro(value), true),
        };
        self.table.insert(key, r);
        self.facts.push(Fact::op(op, a, b, r));
        if fresh {
            self.flag(r);
        }
        true
    }

    fn run_task(&mut self, t: Task) {
        let a = self.lookup[&t.x];
        let b = t.y.map(|y| self.lookup[&y]);
        self.apply(t.op, a, b);
    }

    /// Generic tasks until one emits or none is ready.
    fn generic(&mut self) {
        loop {
            let j = self.cursor_j;
            if j as usize >= self.values.len() {
                return;
            }
            let phase = self.cursor_phase;
            let last = 3 + 2 * (j + 1);
            self.cursor_phase += 1;
            if self.cursor_phase == last {
                self.cursor_phase = 0;
                self.cursor_j += 1;
            }
            let emitted = match phase {
                0 => self.apply(Op::Neg, j, None),
                1 => !self.values[j as usize].is_zero() && self.apply(Op::Inv, j, None),
                2 => self.apply(Op::Delta, j, None),
                p => {
                    let i = (p - 3) / 2;
                    let op = if (p - 3) % 2 == 0 { Op::Add } else { Op::Mul };
                    self.apply(op, i, Some(j))
                }
            };
            if emitted {
                return;
            }
        }
    }

    fn seed(&mut self, ev: SeedEvent, cfg: &ClosureConfig) {
        match ev {
            SeedEvent::A(n) => {
                let a = FieldElement::a(n);
                self.generator(a.clone());
                let a2 = a.mul(&a);
                let a3 = a2.mul(&a);
                let na2 = a2.neg();
                self.priority.extend([
                    Task::binary(Op::Mul, a.clone(), a.clone()),
                    Task::binary(Op::Mul, a2.clone(), a.clone()),
                    Task::unary(Op::Neg, a2),
                    Task::binary(Op::Add, a3, na2),
                    Task::unary(Op::Delta, a),
                ]);
            }
            SeedEvent::Edge(m, n) => {
                let e = EdgeId::new(m, n).expect("edge endpoints differ");
                let u = FieldElement::u(e);
                let v = FieldElement::v(e);
                self.generator(u.clone());
                self.generator(v.clone());
                let s = FieldElement::lambda(e);
                let ns = s.neg();
                let t1 = u.sub(&FieldElement::one());
                let t2 = u.add(&ns);
                let p = u.mul(&t1);
                self.priority.extend([
                    Task::binary(Op::Add, FieldElement::a(e.lo()), FieldElement::a(e.hi())),
                    Task::unary(Op::Neg, s),
                    Task::binary(Op::Add, u.clone(), FieldElement::from_int(-1)),
                    Task::binary(Op::Add, u.clone(), ns),
                    Task::binary(Op::Mul, u.clone(), t1),
                    Task::binary(Op::Mul, p, t2),
                    Task::binary(Op::Mul, v.clone(), v.clone()),
                ]);
                for k in 0..cfg.depth {
                    self.priority
                        .push_back(Task::unary(Op::Delta, FieldElement::u_derivative(e, k)));
                }
                self.priority.push_back(Task::unary(Op::Delta, v));
            }
        }
    }
}

/// Runs the closure over `events` until `budget` facts have been emitted
/// (or nothing is left to do, which only happens for tiny seeds).
pub fn run_closure(events: &[SeedEvent], budget: usize, cfg: &ClosureConfig) -> Closure {
    let mut eng = Engine {
        facts: Vec::new(),
        values: Vec::new(),
        lookup: HashMap::new(),
        table: HashMap::new(),
        priority: VecDeque::new(),
        cursor_j: 0,
        cursor_phase: 0,
        budget,
    };
    if budget > 0 {
        for (name, x) in [
            (ConstName::Zero, FieldElement::zero()),
            (ConstName::One, FieldElement::one()),
        ] {
            let i = eng.intro(x);
            eng.facts.push(Fact::Const(name, i));
            eng.flag(i);
        }
        eng.priority
            .push_back(Task::unary(Op::Neg, FieldElement::one()));
    }
    let mut events = events.iter();
    while !eng.full() {
        let before = eng.facts.len();
        if let Some(t) = eng.priority.pop_front() {
            eng.run_task(t);
        } else if let Some(&ev) = events.next() {
            eng.seed(ev, cfg);
        }
        if eng.full() {
            break;
        }
        eng.generic();
        if eng.facts.len() == before && eng.priority.is_empty() && events.len() == 0 {
            break;
        }
    }
    eng.facts.truncate(budget);
    let live = eng
        .facts
        .iter()
        .filter(|f| matches!(f, Fact::Intro(_)))
        .count();
    eng.values.truncate(live);
    Closure {
        stream: FactStream::from_trusted(eng.facts),
        values: eng.values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_budget_is_empty() {
        let c = run_closure(&[SeedEvent::A(0)], 0, &ClosureConfig::default());
        assert!(c.stream.is_empty());
    }

    #[test]
    fn rosenlicht_witness_appears() {
        let c = run_closure(&[SeedEvent::A(0)], 60, &ClosureConfig::default());
        c.stream.validate().unwrap();
        let a = c.index_of(&FieldElement::a(0)).unwrap();
        let target = FieldElement::a(0).pow(3).unwrap().sub(&FieldElement::a(0).pow(2).unwrap());
        let r = c.index_of(&target).unwrap();
        assert!(c.stream.facts().contains(&Fact::Delta(a, r)));
        assert!(c.stream.facts().contains(&Fact::CFlag(a, true)));
    }

    #[test]
    fn deterministic_and_injective() {
        let ev = [SeedEvent::A(0), SeedEvent::A(1), SeedEvent::Edge(0, 1)];
        let x = run_closure(&ev, 300, &ClosureConfig::default());
        let y = run_closure(&ev, 300, &ClosureConfig::default());
        assert_eq!(x.stream.write(), y.stream.write());
        assert_eq!(x.stream.len(), 300);
        assert_eq!(x.lookup().len(), x.values.len());
        let u = x.index_of(&FieldElement::u(EdgeId::new(0, 1).unwrap())).unwrap();
        assert!(x.stream.facts().contains(&Fact::CFlag(u, false)));
    }
}
