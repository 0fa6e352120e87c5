//! LP bound behaviour on the fixture networks.

mod common;

use fdg_core::lpbound::{build_lp, elemental_inequalities, lp_solve, Elemental, lp_stats, SolveOptions, Status, DEFAULT_ELEMENTAL_CAP};
use fdg_core::{build_fdg, Fdg, Mode, Network, Rational, Weights};
use proptest::prelude::*;

fn weights(w: &[i64]) -> Weights {
    Weights::positional(w.iter().map(|&x| Rational::from_integer(x)).collect()).unwrap()
}

fn bound(g: &Fdg, w: &Weights, presolve: bool) -> Rational {
    let p = build_lp(g, w).unwrap();
    let sol = lp_solve(&p, SolveOptions { presolve, ..SolveOptions::default() }).unwrap();
    assert_eq!(sol.status, Status::Optimal);
    sol.value.unwrap()
}

/// Cut-set bound: for every sink and every set `S` of sources it demands,
/// the rates in `S` sum to at most the cheapest node cut separating the
/// nodes of `S` from the sink. The weighted optimum over that region is
/// found by enumerating the vertices of the two-source polygon.
fn cut_set_bound(net: &Network, w: [i64; 2]) -> Rational {
    let n = net.nodes.len();
    let idx = |s: &str| net.nodes.iter().position(|x| x == s).unwrap();
    let at = |s: u32| idx(&net.sources.iter().find(|x| x.index == s).unwrap().at);
    let min_cut = |from: &[usize], to: usize| -> Rational {
        (0u32..1 << n)
            .filter(|m| from.iter().all(|&f| m >> f & 1 == 1) && m >> to & 1 == 0)
            .map(|m| {
                net.edges
                    .iter()
                    .filter(|e| m >> idx(&e.tail) & 1 == 1 && m >> idx(&e.head) & 1 == 0)
                    .map(|e| e.capacity.clone())
                    .sum::<Rational>()
            })
            .min()
            .unwrap()
    };
    // constraints a1*R1 + a2*R2 <= c
    let mut cons: Vec<([i64; 2], Rational)> = vec![([-1, 0], Rational::zero()), ([0, -1], Rational::zero())];
    for sink in &net.sinks {
        let d: Vec<u32> = sink.demands.iter().copied().collect();
        for mask in 1..1u32 << d.len() {
            let set: Vec<u32> = (0..d.len()).filter(|i| mask >> i & 1 == 1).map(|i| d[i]).collect();
            let nodes: Vec<usize> = set.iter().map(|&s| at(s)).collect();
            let a = [set.contains(&1) as i64, set.contains(&2) as i64];
            cons.push((a, min_cut(&nodes, idx(&sink.at))));
        }
    }
    let r = |x: i64| Rational::from_integer(x);
    let mut best: Option<Rational> = None;
    for (i, (a, c)) in cons.iter().enumerate() {
        for (b, d) in &cons[i + 1..] {
            let det = a[0] * b[1] - a[1] * b[0];
            if det == 0 {
                continue;
            }
            let x = (c.clone() * r(b[1]) - d.clone() * r(a[1])) / r(det);
            let y = (d.clone() * r(a[0]) - c.clone() * r(b[0])) / r(det);
            if cons.iter().all(|(e, f)| r(e[0]) * x.clone() + r(e[1]) * y.clone() <= *f) {
                let v = r(w[0]) * x + r(w[1]) * y;
                best = Some(best.map_or(v.clone(), |b| b.max(v)));
            }
        }
    }
    best.unwrap()
}

#[test]
fn reduction_preserves_the_bound() {
    for net in [common::butterfly(), common::song11(), common::kamath11()] {
        let fdg = build_fdg(&net).unwrap().fdg;
        let shannon = fdg.reduce(Mode::Shannon).unwrap().0;
        let linear = fdg.reduce(Mode::Linear).unwrap().0;
        for w in common::weight_grid() {
            let wt = weights(&w);
            let v = bound(&fdg, &wt, true);
            assert_eq!(bound(&shannon, &wt, true), v, "{w:?}");
            assert_eq!(bound(&linear, &wt, true), v, "{w:?}");
            assert!(v <= cut_set_bound(&net, w), "{w:?}");
        }
    }
}

#[test]
fn butterfly_meets_the_cut_set_bound() {
    let net = common::butterfly();
    let fdg = build_fdg(&net).unwrap().fdg;
    let got: Vec<Rational> = common::weight_grid().iter().map(|w| bound(&fdg, &weights(w), true)).collect();
    let oracle: Vec<Rational> = common::weight_grid().iter().map(|&w| cut_set_bound(&net, w)).collect();
    assert_eq!(got, oracle);
    assert_eq!(oracle, [1, 1, 2, 3, 3].map(Rational::from_integer));
}

#[test]
fn song_and_kamath_values() {
    for net in [common::song11(), common::kamath11()] {
        let fdg = build_fdg(&net).unwrap().fdg;
        let got: Vec<Rational> = common::weight_grid().iter().map(|w| bound(&fdg, &weights(w), true)).collect();
        assert_eq!(got, [1, 1, 1, 2, 2].map(Rational::from_integer));
    }
}

#[test]
fn bound_scales_with_capacity() {
    let base = common::butterfly();
    let w = weights(&[1, 2]);
    let unit = bound(&build_fdg(&base).unwrap().fdg, &w, true);
    for k in [Rational::new(1, 2), Rational::from_integer(3), Rational::new(5, 3)] {
        let mut net = base.clone();
        for e in &mut net.edges {
            e.capacity = e.capacity.clone() * k.clone();
        }
        let fdg = build_fdg(&net).unwrap().fdg;
        assert_eq!(bound(&fdg, &w, true), unit.clone() * k.clone());
        let shannon = fdg.reduce(Mode::Shannon).unwrap().0;
        assert_eq!(bound(&shannon, &w, true), unit.clone() * k);
    }
}

#[test]
fn elemental_count_formula() {
    for n in 1..=12usize {
        let expected = n + n * (n - 1) / 2 * (1usize << n) / 4;
        let it = elemental_inequalities(n, DEFAULT_ELEMENTAL_CAP).unwrap();
        let (mut one, mut two) = (0, 0);
        for e in it {
            match e {
                Elemental::Conditional { .. } => one += 1,
                Elemental::MutualInfo { .. } => two += 1,
            }
        }
        assert_eq!(one + two, expected, "n = {n}");
        assert_eq!(one, n);
    }
}

#[test]
fn stats_match_closed_form() {
    for net in [common::butterfly(), common::song11(), common::kamath11()] {
        let fdg = build_fdg(&net).unwrap().fdg;
        for g in [fdg.clone(), fdg.reduce(Mode::Linear).unwrap().0] {
            let p = build_lp(&g, &weights(&[1, 1])).unwrap();
            let st = lp_stats(&p);
            assert_eq!(st.total, st.closed_form_total());
            assert_eq!(st.total, p.rows().count());
        }
    }
}

fn small_fdgs() -> Vec<Fdg> {
    [common::butterfly(), common::song11(), common::kamath11()]
        .iter()
        .map(|n| build_fdg(n).unwrap().fdg.reduce(Mode::Linear).unwrap().0)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn presolve_agrees_with_full_lp(which in 0usize..3, w1 in 0i64..4, w2 in 0i64..4) {
        let g = &small_fdgs()[which];
        let w = weights(&[w1, w2]);
        prop_assert_eq!(bound(g, &w, true), bound(g, &w, false));
    }

    #[test]
    fn monotone_and_homogeneous_in_weights(which in 0usize..3, w1 in 0i64..4, w2 in 0i64..4, d1 in 0i64..3, d2 in 0i64..3, k in 1i64..4) {
        let g = &small_fdgs()[which];
        let v = bound(g, &weights(&[w1, w2]), true);
        prop_assert!(bound(g, &weights(&[w1 + d1, w2 + d2]), true) >= v.clone());
        prop_assert_eq!(bound(g, &weights(&[k * w1, k * w2]), true), v * Rational::from_integer(k));
    }
}
