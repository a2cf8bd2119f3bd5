//! Graph to streamed field presentation.
//!
//! The graph is first coded by the cycle gadgets. Coded node `k` becomes the
//! generator `a_k` (with `a' = a^3 - a^2`); coded edge `(m, n)` adjoins a
//! point `(u, v)` on `y^2 = x(x-1)(x - a_m - a_n)`. The closure enumerator
//! then builds the field around these generators.

use crate::gadgets::encode_h;
use crate::graph::Graph;
use crate::presentation::{run_closure, Closure, ClosureConfig, FactStream, SeedEvent};

/// Seed events for `G`: coded edges in gadget emission order, each
/// preceded by any not yet introduced `a_k` up to its larger endpoint.
pub fn schedule(g: &Graph) -> Vec<SeedEvent> {
    let mut out = Vec::new();
    let mut next_a = 0;
    for (x, y) in encode_h(g) {
        let hi = x.max(y);
        while next_a <= hi {
            out.push(SeedEvent::A(next_a));
            next_a += 1;
        }
        out.push(SeedEvent::Edge(x.min(y), hi));
    }
    out
}

/// Stage by which every generator and decoder witness of `G` is present.
pub fn stage_bound(g: &Graph, cfg: &ClosureConfig) -> usize {
    let ev = schedule(g);
    let tasks: usize = ev
        .iter()
        .map(|e| match e {
            SeedEvent::A(_) => cfg.tasks_per_a(),
            SeedEvent::Edge(..) => cfg.tasks_per_edge(),
        })
        .sum();
    // constants plus the Neg(1) task
    7 * (ev.len() + tasks + 1) + 6
}

pub fn encode_d0_closure(g: &Graph, budget: usize, cfg: &ClosureConfig) -> Closure {
    run_closure(&schedule(g), budget, cfg)
}

pub fn encode_d0(g: &Graph, budget: usize, cfg: &ClosureConfig) -> FactStream {
    encode_d0_closure(g, budget, cfg).stream
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{EdgeId, FieldElement};
    use crate::presentation::Fact;

    #[test]
    fn schedule_introduces_a_in_order() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let ev = schedule(&g);
        assert_eq!(&ev[..3], &[SeedEvent::A(0), SeedEvent::A(1), SeedEvent::Edge(0, 1)]);
        let a_order: Vec<u32> = ev
            .iter()
            .filter_map(|e| match e {
                SeedEvent::A(n) => Some(*n),
                _ => None,
            })
            .collect();
        assert_eq!(a_order, (0..a_order.len() as u32).collect::<Vec<_>>());
    }

    #[test]
    fn single_node_stream() {
        let g = Graph::empty(1);
        let cfg = ClosureConfig::default();
        let c = encode_d0_closure(&g, stage_bound(&g, &cfg), &cfg);
        let a0 = c.index_of(&FieldElement::a(0)).unwrap();
        assert!(c.stream.facts().contains(&Fact::CFlag(a0, true)));
        for (m, n) in [(0, 1), (1, 2), (2, 3), (1, 3)] {
            let e = EdgeId::new(m, n).unwrap();
            for x in [FieldElement::u(e), FieldElement::v(e)] {
                let i = c.index_of(&x).unwrap();
                assert!(c.stream.facts().contains(&Fact::CFlag(i, false)));
            }
        }
    }
}
