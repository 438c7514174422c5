mod common;

use std::collections::HashSet;

use fsplit::factor::{CoreGraph, FreeFactorSystem};
use fsplit::fixtures::{filling_reducible, sigma_word};
use fsplit::graph::Graph;
use fsplit::whitehead::{fills, free_factor_support, whitehead_minimize, Budget, FillsVerdict};
use fsplit::word::{CyclicWord, Dir};

fn words(g: &Graph, ws: &[&str]) -> Vec<Vec<Dir>> {
    ws.iter().map(|w| g.parse_word(w).unwrap()).collect()
}

fn class(g: &Graph, w: &str) -> CyclicWord {
    CyclicWord::new(&g.parse_word(w).unwrap())
}

fn xy() -> Graph {
    Graph::rose(&["x", "y"])
}

fn xyz() -> Graph {
    Graph::rose(&["x", "y", "z"])
}

#[test]
fn folding() {
    let g = xy();
    let c = CoreGraph::fold(2, &words(&g, &["x"])).unwrap();
    assert_eq!((c.num_vertices(), c.num_edges(), c.rank()), (1, 1, 1));
    // x² and x y x̄ fold to two vertices joined by two x-edges, plus a y-loop.
    let c = CoreGraph::fold(2, &words(&g, &["x x", "x y x'"])).unwrap();
    assert_eq!((c.num_vertices(), c.num_edges(), c.rank()), (2, 3, 2));
    assert!(c.carries(&class(&g, "y")));
    assert!(c.carries(&class(&g, "x x")));
    assert!(!c.carries(&class(&g, "x")));
    let c = CoreGraph::fold(2, &words(&g, &["x", "y"])).unwrap();
    assert_eq!((c.num_vertices(), c.num_edges(), c.rank()), (1, 2, 2));
    assert!(!FreeFactorSystem::new(2, vec![c]).is_proper());
}

#[test]
fn carrying() {
    let g = xy();
    let x = FreeFactorSystem::letters(2, &[vec![0]]);
    assert!(x.carries(&class(&g, "x x x")));
    assert!(!x.carries(&class(&g, "x y")));
    let ex = filling_reducible(3).unwrap();
    let rg = &ex.graph.graph;
    let g1 = FreeFactorSystem::letters(5, &[vec![0, 1, 2]]);
    assert!(g1.carries(&class(rg, &sigma_word(3))));
    assert!(!g1.carries(&class(rg, "A")));
}

#[test]
fn meets() {
    let x = FreeFactorSystem::letters(3, &[vec![0]]);
    let y = FreeFactorSystem::letters(3, &[vec![1]]);
    assert_eq!(x.meet(&x), x);
    assert!(x.meet(&y).comps.is_empty());
    let a = FreeFactorSystem::letters(3, &[vec![0, 1]]);
    let b = FreeFactorSystem::letters(3, &[vec![1, 2]]);
    assert_eq!(a.meet(&b), y);
    // conjugating one side does not change the meet up to conjugacy
    let g = xyz();
    let bc = FreeFactorSystem::from_generators(3, &[words(&g, &["x y x'", "x z x'"])]).unwrap();
    assert_eq!(a.meet(&bc), y);
}

#[test]
fn co_edge_numbers() {
    let sys = |n: usize, groups: &[Vec<usize>]| FreeFactorSystem::letters(n, groups).co_edge_number().unwrap();
    assert_eq!(sys(5, &[vec![0, 1, 2]]), 2);
    assert_eq!(sys(3, &[vec![0], vec![1], vec![2]]), 2);
    assert_eq!(sys(2, &[vec![0]]), 1);
    assert!(FreeFactorSystem::whole(3).co_edge_number().is_err());
}

/// Least total length over the joint transvection orbit, through sets whose
/// total stays at most `cap`.
fn min_total(n: usize, set: &[CyclicWord], cap: usize) -> usize {
    let moves = common::transvections(n);
    let total = |s: &[CyclicWord]| s.iter().map(CyclicWord::len).sum::<usize>();
    let mut best = total(set);
    let mut seen = HashSet::from([set.to_vec()]);
    let mut stack = vec![set.to_vec()];
    while let Some(s) = stack.pop() {
        best = best.min(total(&s));
        for m in &moves {
            let mut t: Vec<CyclicWord> = s.iter().map(|c| CyclicWord::new(&common::apply(m, c.letters()))).collect();
            t.sort();
            if total(&t) <= cap && seen.insert(t.clone()) {
                stack.push(t);
            }
        }
    }
    best
}

#[test]
fn minimization() {
    let g = xy();
    let m = whitehead_minimize(2, &[class(&g, "x")], Budget::default()).unwrap();
    assert_eq!(m.total, 1);
    let comm = [class(&g, "x y x' y'")];
    let m = whitehead_minimize(2, &comm, Budget::default()).unwrap();
    assert_eq!((m.total, min_total(2, &comm, 10)), (4, 4));
    let pair = [class(&g, "x y"), class(&g, "x y'")];
    let m = whitehead_minimize(2, &pair, Budget::default()).unwrap();
    assert_eq!((m.total, min_total(2, &pair, 10)), (4, 4));
}

#[test]
fn fills_examples() {
    let g = xy();
    match fills(2, &[class(&g, "x")], Budget::default()) {
        FillsVerdict::ProperFactor { witness, .. } => assert_eq!(witness, FreeFactorSystem::letters(2, &[vec![0]])),
        v => panic!("{v:?}"),
    }
    let comm = class(&g, "x y x' y'");
    assert!(fills(2, std::slice::from_ref(&comm), Budget::default()).is_fills());
    assert!(common::in_proper_factor(2, &comm).is_none());
    let sigma = class(&Graph::rose(&["X", "Y", "Z"]), &sigma_word(3));
    assert!(fills(3, std::slice::from_ref(&sigma), Budget::default()).is_fills());
    assert!(common::in_proper_factor(3, &sigma).is_none());
}

#[test]
fn supports() {
    let g = xy();
    let b = Budget::default();
    assert_eq!(free_factor_support(2, &[class(&g, "x")], b).unwrap(), FreeFactorSystem::letters(2, &[vec![0]]));
    assert_eq!(
        free_factor_support(2, &[class(&g, "x"), class(&g, "y")], b).unwrap(),
        FreeFactorSystem::letters(2, &[vec![0], vec![1]])
    );
    assert_eq!(free_factor_support(2, &[class(&g, "x y x' y'")], b).unwrap(), FreeFactorSystem::whole(2));
}

#[test]
fn rank_two_oracle_sweep() {
    let b = Budget::default();
    let all = common::canonical_words(2, 6);
    assert!(all.len() > 50);
    for c in &all {
        let brute = common::in_proper_factor(2, c);
        match fills(2, std::slice::from_ref(c), b) {
            FillsVerdict::Fills { .. } => assert!(brute.is_none(), "{c:?} fills but {brute:?} misses a letter"),
            FillsVerdict::ProperFactor { witness, .. } => {
                assert!(brute.is_some(), "{c:?}: no proper factor found by brute force");
                assert!(witness.is_proper() && witness.carries(c));
            }
            v => panic!("{c:?}: {v:?}"),
        }
    }
}

fn word_strategy(n: u32, len: usize) -> impl proptest::strategy::Strategy<Value = Vec<Dir>> {
    use proptest::prelude::*;
    prop::collection::vec(0..2 * n, 1..=len).prop_map(|v| fsplit::word::reduce(&v.into_iter().map(Dir).collect::<Vec<_>>()))
}

proptest::proptest! {
    #[test]
    fn core_graphs_carry_their_generators(gens in proptest::collection::vec(word_strategy(3, 6), 1..4)) {
        let gens: Vec<Vec<Dir>> = gens.into_iter().filter(|g| !g.is_empty()).collect();
        proptest::prop_assume!(!gens.is_empty());
        let c = CoreGraph::fold(3, &gens).unwrap();
        for g in &gens {
            proptest::prop_assert!(c.carries(&CyclicWord::new(g)), "{:?}", g);
        }
        proptest::prop_assert!(c.rank() <= gens.len());
    }

    #[test]
    fn fills_is_automorphism_invariant(w in word_strategy(3, 7), pick in 0usize..1000) {
        let c = CyclicWord::new(&w);
        proptest::prop_assume!(!c.is_empty());
        let moves = common::whitehead_automorphisms(3);
        let m = &moves[pick % moves.len()];
        let d = CyclicWord::new(&common::apply(m, c.letters()));
        let (a, b) = (fills(3, std::slice::from_ref(&c), Budget::default()), fills(3, &[d], Budget::default()));
        proptest::prop_assert_eq!(a.kind(), b.kind());
        if let FillsVerdict::ProperFactor { witness, .. } = a {
            proptest::prop_assert!(witness.carries(&c));
        }
    }
}
