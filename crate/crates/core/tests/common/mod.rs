#![allow(dead_code)]

use fdg_core::{Edge, Network, Rational, Sink, Source};

pub fn net(edges: &[(&str, &str, &str)], sources: &[(u32, &str)], sinks: &[(&str, &[u32])]) -> Network {
    let mut nodes: Vec<String> = Vec::new();
    for (_, t, h) in edges {
        for n in [t, h] {
            if !nodes.iter().any(|x| x == n) {
                nodes.push(n.to_string());
            }
        }
    }
    Network {
        nodes,
        edges: edges
            .iter()
            .map(|(id, t, h)| Edge {
                id: id.to_string(),
                tail: t.to_string(),
                head: h.to_string(),
                capacity: Rational::one(),
            })
            .collect(),
        sources: sources.iter().map(|(i, at)| Source { index: *i, at: at.to_string() }).collect(),
        sinks: sinks
            .iter()
            .map(|(at, d)| Sink { at: at.to_string(), demands: d.iter().copied().collect() })
            .collect(),
    }
}

pub fn single_edge() -> Network {
    net(&[("e", "s", "t")], &[(1, "s")], &[("t", &[1])])
}

pub fn butterfly() -> Network {
    net(
        &[
            ("e_a", "s1", "m"),
            ("e_b", "s2", "m"),
            ("e_c", "m", "n"),
            ("e_d", "n", "t1"),
            ("e_e", "n", "t2"),
            ("e_f", "s1", "t2"),
            ("e_g", "s2", "t1"),
        ],
        &[(1, "s1"), (2, "s2")],
        &[("t1", &[1]), ("t2", &[2])],
    )
}

/// Two sources sharing a bottleneck through a pair of parallel edges.
pub fn song11() -> Network {
    net(
        &[
            ("e1", "s1", "a"),
            ("e2", "s2", "a"),
            ("e3", "a", "b"),
            ("e4", "a", "b"),
            ("e5", "b", "c"),
            ("e6", "c", "t1"),
            ("e7", "c", "t2"),
        ],
        &[(1, "s1"), (2, "s2")],
        &[("t1", &[1]), ("t2", &[2])],
    )
}

/// Two-unicast network with one shared path and a side link.
pub fn kamath11() -> Network {
    net(
        &[
            ("e1", "s1", "a"),
            ("e2", "s2", "b"),
            ("e3", "a", "c"),
            ("e4", "b", "c"),
            ("e5", "c", "d"),
            ("e6", "d", "t1"),
            ("e7", "d", "t2"),
            ("e8", "b", "t1"),
        ],
        &[(1, "s1"), (2, "s2")],
        &[("t1", &[1]), ("t2", &[2])],
    )
}

/// Three-unicast network solvable by scalar linear coding only in
/// characteristic 2.
pub fn char2() -> Network {
    net(
        &[
            ("e1", "S1", "T3"),
            ("e2", "S1", "P"),
            ("e3", "S2", "P"),
            ("e4", "P", "V2"),
            ("e5", "V2", "R"),
            ("e6", "V2", "W"),
            ("e7", "S2", "Q"),
            ("e8", "S3", "Q"),
            ("e9", "Q", "V3"),
            ("e10", "V3", "R"),
            ("e11", "V3", "T1"),
            ("e12", "R", "V4"),
            ("e13", "V4", "T2"),
            ("e14", "V4", "T3"),
            ("e15", "S3", "W"),
            ("e16", "W", "V5"),
            ("e17", "V5", "T1"),
            ("e18", "V5", "T2"),
        ],
        &[(1, "S1"), (2, "S2"), (3, "S3")],
        &[("T1", &[1]), ("T2", &[2]), ("T3", &[3])],
    )
}

pub fn weight_grid() -> Vec<[i64; 2]> {
    vec![[1, 0], [0, 1], [1, 1], [1, 2], [2, 1]]
}
