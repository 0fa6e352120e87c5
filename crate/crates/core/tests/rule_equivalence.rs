//! With unit capacities the capacity-free rules agree with the capacity
//! rules on every variable and every group.

mod common;

use fdg_core::{build_fdg, Fdg, Mode, Network, ReductionTrace, Var};

/// The graph after every prefix of the reduction trace.
fn along(fdg: &Fdg, trace: &ReductionTrace) -> Vec<Fdg> {
    let mut out = vec![fdg.clone()];
    for k in 1..=trace.steps.len() {
        let prefix = ReductionTrace::from_steps(trace.steps[..k].to_vec(), fdg).unwrap();
        out.push(prefix.replay(fdg).unwrap());
    }
    out
}

fn check(g: &Fdg) -> usize {
    let edges: Vec<Var> = g.edge_positions().iter().map(|&p| g.var(p).clone()).collect();
    for v in &edges {
        assert_eq!(g.cor1(v).unwrap(), g.cor3(v).unwrap(), "{v:?}");
    }
    let mut fired = 0;
    for mask in 1u64..1 << edges.len() {
        let group: Vec<Var> = (0..edges.len()).filter(|i| mask >> i & 1 == 1).map(|i| edges[i].clone()).collect();
        let c2 = g.cor2(&group).unwrap();
        assert_eq!(c2, g.cor4(&group).unwrap(), "{group:?}");
        fired += c2 as usize;
    }
    fired
}

fn exhaust(net: &Network) {
    let fdg = build_fdg(net).unwrap().fdg;
    assert!(fdg.unit_capacities());
    let mut fired = 0;
    for mode in [Mode::Shannon, Mode::Linear] {
        let (_, trace) = fdg.reduce(mode).unwrap();
        for g in along(&fdg, &trace) {
            fired += check(&g);
        }
    }
    assert!(fired > 0, "no group rule ever fired");
}

#[test]
fn butterfly() {
    exhaust(&common::butterfly());
}

#[test]
fn song11() {
    exhaust(&common::song11());
}

#[test]
fn kamath11() {
    exhaust(&common::kamath11());
}

#[test]
fn char2() {
    exhaust(&common::char2());
}
