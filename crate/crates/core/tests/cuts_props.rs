mod common;

use qfern::cuts::{
    check_cheeger_inequality_scaled, cheeger_exact, evaluate_cut, fiedler_bipartition,
    fiedler_sweep, Normalization,
};
use qfern::graph::{families, WeightedGraph};
use qfern::spectral::decompose;
use qfern::Error;
use qfern_testkit::brute_cheeger;

use common::{from_matrix, random_graph, to_matrix};

#[test]
fn exact_matches_brute_force_oracle() {
    for seed in 0..12 {
        let g = random_graph(seed, 12, 12);
        let w = to_matrix(&g);
        for (norm, min_side) in [
            (Normalization::MinSide, true),
            (Normalization::SizeOnly, false),
        ] {
            let exact = cheeger_exact(&g, norm).unwrap();
            let oracle = brute_cheeger(&w, min_side);
            assert!(
                (exact.ratio - oracle).abs() <= 1e-12,
                "seed {seed}: {} vs {oracle}",
                exact.ratio
            );
            let recheck = evaluate_cut(&g, &exact.side_a, norm).unwrap();
            assert!((recheck.ratio - exact.ratio).abs() <= 1e-12);
        }
    }
}

#[test]
fn sweep_never_beats_exact() {
    for seed in 0..100 {
        let g = random_graph(100 + seed, 3, 11);
        let d = decompose(&g).unwrap();
        for norm in [Normalization::MinSide, Normalization::SizeOnly] {
            let exact = cheeger_exact(&g, norm).unwrap();
            let sweep = fiedler_sweep(&g, &d, norm).unwrap();
            assert!(sweep.ratio >= exact.ratio - 1e-12);
        }
        // The sweep is bounded by sqrt(2 lambda_2 d_max).
        let sweep = fiedler_sweep(&g, &d, Normalization::MinSide).unwrap();
        assert!(sweep.ratio <= (2.0 * d.lambda2() * g.max_degree()).sqrt() + 1e-9);
    }
}

#[test]
fn exact_is_below_every_evaluated_cut() {
    let g = random_graph(7, 9, 9);
    let exact = cheeger_exact(&g, Normalization::MinSide).unwrap();
    for mask in 1u32..(1 << 8) {
        let side: Vec<usize> = std::iter::once(0)
            .chain((1..9).filter(|i| mask >> (i - 1) & 1 == 1))
            .collect();
        if side.len() == 9 {
            continue;
        }
        let cut = evaluate_cut(&g, &side, Normalization::MinSide).unwrap();
        assert!(exact.ratio <= cut.ratio + 1e-12);
    }
}

#[test]
fn barbell_bridge_cut() {
    let g = families::barbell(5, 5);
    let exact = cheeger_exact(&g, Normalization::MinSide).unwrap();
    assert!((exact.ratio - 0.2).abs() < 1e-15);
    assert_eq!(exact.side_a, vec![0, 1, 2, 3, 4]);
    let sweep = fiedler_sweep(&g, &decompose(&g).unwrap(), Normalization::MinSide).unwrap();
    assert_eq!(sweep.side_a, exact.side_a);
    assert!((sweep.ratio - exact.ratio).abs() < 1e-15);
}

#[test]
fn barbell_bipartition_recovers_cliques() {
    let (a, b) = fiedler_bipartition(&decompose(&families::barbell(4, 4)).unwrap());
    let mut sides = [a, b];
    sides.sort();
    assert_eq!(sides, [vec![0, 1, 2, 3], vec![4, 5, 6, 7]]);
}

#[test]
fn removing_bridge_disconnects() {
    let mut g = families::barbell(4, 3);
    g.set_weight(3, 4, 0.0).unwrap();
    assert!(matches!(
        cheeger_exact(&g, Normalization::MinSide),
        Err(Error::DisconnectedGraph { components: 2 })
    ));
}

#[test]
fn degree_scaled_inequality_always_holds() {
    for seed in 0..60 {
        let w = qfern_testkit::random_connected(4 + seed as usize % 8, 0.6, seed, false);
        let g: WeightedGraph = from_matrix(&w);
        let h = cheeger_exact(&g, Normalization::MinSide).unwrap().ratio;
        let l2 = decompose(&g).unwrap().lambda2();
        assert!(check_cheeger_inequality_scaled(h, l2, g.max_degree()).holds);
    }
}

#[test]
fn larger_exact_enumeration_runs() {
    let g = families::barbell(9, 9);
    let start = std::time::Instant::now();
    let exact = cheeger_exact(&g, Normalization::MinSide).unwrap();
    assert!((exact.ratio - 1.0 / 9.0).abs() < 1e-15);
    assert!(start.elapsed().as_secs_f64() < 5.0);
}
