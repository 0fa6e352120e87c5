mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use fdg_core::algebra::{
    build_transfer_system, reduction_stats, solvability_search, transfer_matrix, Poly, PolyMatrix, SearchOptions,
    SearchOutcome, TransferSystem,
};
use fdg_core::{build_fdg, Mode};

fn char2_systems() -> (TransferSystem, TransferSystem) {
    let fdg = build_fdg(&common::char2()).unwrap().fdg;
    let (reduced, _) = fdg.reduce(Mode::Linear).unwrap();
    (build_transfer_system(&fdg).unwrap(), build_transfer_system(&reduced).unwrap())
}

/// The labels of the published transfer matrix, keyed to indeterminate names.
fn labels() -> BTreeMap<&'static str, &'static str> {
    BTreeMap::from([
        ("a1", "eps_Y1_e1"),
        ("a2", "eps_Y1_e4"),
        ("a3", "eps_Y2_e4"),
        ("a4", "eps_Y2_e9"),
        ("a5", "eps_Y3_e9"),
        ("a6", "eps_Y3_e16"),
        ("b1", "eps_e4_e12"),
        ("b2", "eps_e4_e16"),
        ("b3", "eps_e9_e12"),
        ("g1", "eps_e1_T3.Y3"),
        ("g2", "eps_e12_T3.Y3"),
        ("g3", "eps_e12_T2.Y2"),
        ("g4", "eps_e16_T2.Y2"),
        ("g5", "eps_e16_T1.Y1"),
        ("g6", "eps_e9_T1.Y1"),
    ])
}

/// Parses a sum of products such as `a2*b1*g3 + a2*b2*g4`.
fn expr(ts: &TransferSystem, s: &str) -> Poly {
    let labels = labels();
    s.split('+')
        .map(|term| {
            term.trim().split('*').fold(Poly::one(), |acc, l| {
                let x = ts.find(labels[l.trim()]).unwrap_or_else(|| panic!("no indeterminate for {l}"));
                &acc * &Poly::var(x)
            })
        })
        .fold(Poly::zero(), |acc, t| &acc + &t)
}

#[test]
fn char2_system_sizes() {
    let (orig, red) = char2_systems();
    assert_eq!(orig.indet_count(), 28);
    assert_eq!((orig.f().rows(), orig.f().cols()), (18, 18));
    assert_eq!(red.indet_count(), 15);
    assert_eq!((red.f().rows(), red.f().cols()), (5, 5));
    assert_eq!(red.edges(), ["e1", "e4", "e9", "e12", "e16"]);
    let stats = reduction_stats(&orig, &red);
    assert_eq!(stats.var_reduction_pct, 46);
    assert_eq!(stats.complexity_pct(), 92);
}

#[test]
fn char2_matrix_matches_published_entries() {
    let (_, ts) = char2_systems();
    let m = transfer_matrix(&ts).unwrap();
    let expected = [
        ["a2*b2*g5", "a2*b1*g3 + a2*b2*g4", "a1*g1 + a2*b1*g2"],
        ["a4*g6 + a3*b2*g5", "a3*b1*g3 + a4*b3*g3 + a3*b2*g4", "a3*b1*g2 + a4*b3*g2"],
        ["a5*g6 + a6*g5", "a5*b3*g3 + a6*g4", "a5*b3*g2"],
    ];
    for (i, row) in expected.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            assert_eq!(m.get(i, j), &expr(&ts, e), "entry ({}, {})", i + 1, j + 1);
        }
    }
}

#[test]
fn char2_series_inverts() {
    let (orig, red) = char2_systems();
    for ts in [orig, red] {
        let (series, _) = ts.series().unwrap();
        let i = PolyMatrix::identity(ts.edges().len());
        assert_eq!(i.sub(ts.f()).mul(&series), i);
    }
}

#[test]
fn char2_solvable_only_in_characteristic_two() {
    let (_, ts) = char2_systems();
    let m = transfer_matrix(&ts).unwrap();
    let pins = BTreeMap::new();
    let t = Instant::now();
    let gf2 = solvability_search(&m, &ts.demand(), ts.indet_count(), 2, &pins, SearchOptions::default()).unwrap();
    assert!(t.elapsed() < Duration::from_secs(1));
    let SearchOutcome::Found { assignment, .. } = gf2 else { panic!("GF(2) search failed") };
    let value = |x: u32| assignment[x as usize];
    for (i, row) in ts.demand().iter().enumerate() {
        for (j, &want) in row.iter().enumerate() {
            assert_eq!(m.get(i, j).eval_mod(2, value), want as u64);
        }
    }
    let gf3 = solvability_search(&m, &ts.demand(), ts.indet_count(), 3, &pins, SearchOptions::default()).unwrap();
    assert!(matches!(gf3, SearchOutcome::Exhausted { .. }));
}
