use fsplit::dynamics::{strata, Filtration};
use fsplit::error::Error;
use fsplit::factor::FreeFactorSystem;
use fsplit::fixtures::{bdd_no_periodic, filling_reducible, linear_example, sigma_word, Example};
use fsplit::graph::GraphMap;
use fsplit::lamination::*;
use fsplit::whitehead::Budget;
use fsplit::word::{contains_subword, inverse, CyclicWord};

fn approxes(ex: &Example) -> (Filtration, Vec<LaminationApprox>) {
    let filt = strata(&ex.map).unwrap();
    let lams = filt
        .eg_strata()
        .into_iter()
        .map(|s| LaminationApprox::build(&ex.map, &filt, s, &AttractionParams::default(), FILLS_MIN_DEPTH).unwrap())
        .collect();
    (filt, lams)
}

#[test]
fn leaf_segments() {
    let ex = filling_reducible(3).unwrap();
    let g = &ex.graph.graph;
    let b = g.edge_index("B").unwrap();
    let s = sigma_word(3);
    let want = g.parse_word(&format!("B {s} A {s} B' {s} B")).unwrap();
    assert_eq!(leaf_segment(&ex.map, b, 1, usize::MAX).unwrap(), want);
    assert_eq!(leaf_segment(&ex.map, b, 0, usize::MAX).unwrap(), g.parse_word("B").unwrap());
    for k in 1..4 {
        let short = leaf_segment(&ex.map, b, k, usize::MAX).unwrap();
        assert!(leaf_segment(&ex.map, b, k + 1, usize::MAX).unwrap().starts_with(&short));
    }
}

#[test]
fn approximations() {
    let ex = filling_reducible(3).unwrap();
    let (filt, lams) = approxes(&ex);
    assert_eq!(lams.len(), 1);
    let g = &ex.graph.graph;
    let mut edges = lams[0].stratum_edges.clone();
    edges.sort();
    assert_eq!(edges, [g.edge_index("A").unwrap(), g.edge_index("B").unwrap()]);
    assert!(lams[0].depth() >= FILLS_MIN_DEPTH);
    assert_eq!(lams[0].defining.len(), AttractionParams::default().seg_len);
    let err = LaminationApprox::build(&ex.map, &filt, 0, &AttractionParams::default(), 1).unwrap_err();
    assert!(matches!(err, Error::InvalidInput(_)), "{err:?}");
    let bdd = bdd_no_periodic(3).unwrap();
    assert_eq!(approxes(&bdd).1.len(), 2);
}

#[test]
fn attraction() {
    let ex = filling_reducible(3).unwrap();
    let (_, lams) = approxes(&ex);
    let lam = &lams[0];
    let g = &ex.graph.graph;
    let params = AttractionParams::default();
    let a = CyclicWord::new(&g.parse_word("A").unwrap());
    let Attraction::Attracted(i) = weakly_attracted(&ex.map, &a, lam, &params).unwrap() else { panic!() };
    // direct iteration: the first iterate whose periodic line shows the defining segment
    let mut cur = a.clone();
    let mut first = None;
    for j in 0..=params.horizon {
        let doubled = [cur.letters(), cur.letters(), cur.letters()].concat();
        if contains_subword(&doubled, &lam.defining) || contains_subword(&doubled, &inverse(&lam.defining)) {
            first = Some(j);
            break;
        }
        cur = ex.map.map_circuit(&cur).unwrap();
    }
    assert_eq!(Some(i), first);
    let sigma = CyclicWord::new(&g.parse_word(&sigma_word(3)).unwrap());
    assert_eq!(weakly_attracted(&ex.map, &sigma, lam, &params).unwrap(), Attraction::NotWithinHorizon);
    let own = CyclicWord::new(&lam.defining);
    assert_eq!(weakly_attracted(&ex.map, &own, lam, &params).unwrap(), Attraction::Attracted(0));
}

#[test]
fn single_laminations() {
    let ex = filling_reducible(3).unwrap();
    let (_, lams) = approxes(&ex);
    let v = lamination_fills(&ex.graph, &lams[0], Budget::default());
    assert!(v.verdict.is_fills(), "{v:?}");
    assert!(v.depth.unwrap() <= 6);
    let bdd = bdd_no_periodic(3).unwrap();
    let (_, lams) = approxes(&bdd);
    let want = [FreeFactorSystem::letters(7, &[vec![0, 1, 2, 3, 4]]), FreeFactorSystem::letters(7, &[vec![0, 1, 2, 5, 6]])];
    for (l, w) in lams.iter().zip(&want) {
        let v = lamination_fills(&bdd.graph, l, Budget::default());
        assert!(v.verdict.is_proper(), "{v:?}");
        assert_eq!(v.support.as_ref(), Some(w));
    }
    let mut shallow = lams[0].clone();
    shallow.segments.truncate(1);
    assert_eq!(lamination_fills(&bdd.graph, &shallow, Budget::default()).verdict.kind(), "Unknown");
}

#[test]
fn joint_filling() {
    let bdd = bdd_no_periodic(3).unwrap();
    let (_, lams) = approxes(&bdd);
    assert!(laminations_jointly_fill(&bdd.graph, &lams, Budget::default()).verdict.is_fills());
    let twice = [lams[0].clone(), lams[0].clone()];
    let one = lamination_fills(&bdd.graph, &lams[0], Budget::default());
    let two = laminations_jointly_fill(&bdd.graph, &twice, Budget::default());
    assert_eq!((two.verdict.kind(), two.support), (one.verdict.kind(), one.support));
    let ex = filling_reducible(3).unwrap();
    let (_, fl) = approxes(&ex);
    assert!(laminations_jointly_fill(&ex.graph, &fl, Budget::default()).verdict.is_fills());
}

#[test]
fn expansion_estimates() {
    let ex = filling_reducible(3).unwrap();
    let (_, lams) = approxes(&ex);
    let lam = &lams[0];
    let id = GraphMap::identity(ex.map.source.clone());
    let log_lambda = (2.0 + 3f64.sqrt()).ln();
    let mut errs = Vec::new();
    for d in 0..=lam.depth() {
        assert_eq!(pf_estimate(&id, lam, d).unwrap(), 0.0);
        errs.push((pf_estimate(&ex.map, lam, d).unwrap() - log_lambda).abs());
    }
    assert!(errs.windows(2).skip(1).all(|w| w[1] <= w[0] + 1e-12), "{errs:?}");
    assert!(*errs.last().unwrap() < 1e-3, "{errs:?}");
    let lin = linear_example(1, 0).unwrap();
    for name in ["theta_1_0", "theta_0_1"] {
        let th = lin.extra(name).unwrap();
        for d in 0..=lam.depth() {
            assert_eq!(pf_estimate(th, lam, d).unwrap(), 0.0);
        }
    }
}
