use std::fmt;

/// An unordered pair of coding-graph nodes `m < n`; identifies the
/// generators `u_mn`, `v_mn` adjoined for that edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId {
    lo: u32,
    hi: u32,
}

impl EdgeId {
    /// Returns `None` for a loop `m == n`.
    pub fn new(m: u32, n: u32) -> Option<Self> {
        match m.cmp(&n) {
            std::cmp::Ordering::Less => Some(EdgeId { lo: m, hi: n }),
            std::cmp::Ordering::Greater => Some(EdgeId { lo: n, hi: m }),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn lo(self) -> u32 {
        self.lo
    }

    pub fn hi(self) -> u32 {
        self.hi
    }

    /// Image of the edge under a node relabeling.
    pub fn map(self, f: impl Fn(u32) -> u32) -> Option<Self> {
        EdgeId::new(f(self.lo), f(self.hi))
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.lo, self.hi)
    }
}

/// A transcendental generator of the field tower.
///
/// The derived order is the documented symbol order: every `A` precedes
/// every `U`, `A` symbols are ordered by node index, `U` symbols by edge
/// and then by derivative order. `Aux` symbols are scratch indeterminates
/// used internally (polynomial factoring) and never appear in field
/// elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    /// Rosenlicht generator `a_n`, with `a_n' = a_n^3 - a_n^2`.
    A(u32),
    /// The `order`-th derivative of `u_e`.
    U { edge: EdgeId, order: u32 },
    Aux(u32),
}

impl Symbol {
    pub fn u(edge: EdgeId) -> Self {
        Symbol::U { edge, order: 0 }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::A(n) => write!(f, "a{n}"),
            Symbol::U { edge, order: 0 } => write!(f, "u[{edge}]"),
            Symbol::U { edge, order } => write!(f, "u[{edge};{order}]"),
            Symbol::Aux(k) => write!(f, "X{k}"),
        }
    }
}
