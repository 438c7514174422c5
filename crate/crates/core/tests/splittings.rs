use fsplit::factor::FreeFactorSystem;
use fsplit::fixtures::{bdd_no_periodic, filling_reducible, theta_symmetry};
use fsplit::graph::{GraphMap, MarkedGraph};
use fsplit::splitting::*;
use fsplit::word::Dir;

fn rose(names: &[&str]) -> MarkedGraph {
    MarkedGraph::rose(names)
}

fn conjugation(g: &MarkedGraph, by: &str) -> GraphMap {
    let r = g.rose.clone();
    let c = r.parse_dir(by).unwrap();
    let images = (0..r.num_edges()).map(|i| vec![c, Dir::fwd(i), c.inv()]).collect();
    GraphMap::endo_unchecked(r, images)
}

#[test]
fn rose_pair_co_edge() {
    let g = rose(&["x", "y", "z"]);
    let p = MarkedGraphPair::from_names(&g, &["x"]).unwrap();
    assert_eq!(p.co_edge, 2);
    assert_eq!(MarkedGraphPair::from_names(&g, &[]).unwrap().co_edge, 3);
    assert!(MarkedGraphPair::from_names(&g, &["x", "y", "z"]).is_err());
}

#[test]
fn contractible_subgraph_is_rejected() {
    let ex = theta_symmetry(3).unwrap();
    let err = MarkedGraphPair::from_names(&ex.graph, &["a"]).unwrap_err();
    assert!(err.to_string().contains("contractible"), "{err}");
    let p = MarkedGraphPair::from_names(&ex.graph, &["a", "b"]).unwrap();
    assert_eq!(p.co_edge, 1);
}

#[test]
fn bdd_pair_and_faces() {
    let ex = bdd_no_periodic(3).unwrap();
    let d = ex.decomposition.as_ref().unwrap();
    let p = validate_pair(&ex.graph, &d.j3).unwrap();
    assert_eq!(p.co_edge, 4);
    let faces = p.faces().unwrap();
    assert_eq!(faces.len(), 14);
    assert!(faces.iter().any(|f| f.h == d.k1));
    assert!(faces.iter().any(|f| f.h == d.k2));
    for f in &faces {
        assert!(validate_pair(&f.graph, &f.h).is_ok());
        if f.co_edge >= 2 {
            for ff in f.faces().unwrap() {
                assert!(faces.iter().any(|x| x.h == ff.h));
            }
        }
    }
}

#[test]
fn co_edge_two_has_two_faces_and_co_edge_one_none() {
    let g = rose(&["x", "y", "z"]);
    let p = MarkedGraphPair::from_names(&g, &["x"]).unwrap();
    let faces = p.faces().unwrap();
    assert_eq!(faces.len(), 2);
    let q = MarkedGraphPair::from_names(&g, &["x", "y"]).unwrap();
    assert!(q.faces().is_err());
}

#[test]
fn elliptic_systems() {
    let g = rose(&["x", "y"]);
    let s = OneEdgeSplitting::from_names(&g, &["y"]).unwrap();
    assert_eq!(s.key(), FreeFactorSystem::letters(2, &[vec![1]]).canonical_forms());

    let ex = filling_reducible(3).unwrap();
    let s = OneEdgeSplitting::from_names(&ex.graph, &["X", "Y", "Z", "A"]).unwrap();
    assert_eq!(s.key(), FreeFactorSystem::letters(5, &[vec![0, 1, 2, 3]]).canonical_forms());

    let ex = bdd_no_periodic(3).unwrap();
    let p = MarkedGraphPair::from_names(&ex.graph, &["X", "Y", "Z", "A2", "B2"]).unwrap();
    let sys = p.elliptic_system();
    assert_eq!(sys.ranks(), vec![5]);
    assert!(sys.is_proper());
    assert_eq!(sys.rank_n, 7);
}

#[test]
fn elliptic_system_on_a_theta_graph() {
    // x = a b', y = b c': the loop a b' carries x
    let ex = theta_symmetry(3).unwrap();
    let s = OneEdgeSplitting::from_names(&ex.graph, &["a", "b"]).unwrap();
    assert_eq!(s.key(), FreeFactorSystem::letters(2, &[vec![0]]).canonical_forms());
    let t = OneEdgeSplitting::from_names(&ex.graph, &["b", "c"]).unwrap();
    assert_eq!(t.key(), FreeFactorSystem::letters(2, &[vec![1]]).canonical_forms());
}

#[test]
fn equivalence_of_one_edge_splittings() {
    let g = rose(&["x", "y"]);
    let sx = OneEdgeSplitting::from_names(&g, &["x"]).unwrap();
    let sy = OneEdgeSplitting::from_names(&g, &["y"]).unwrap();
    assert!(equivalent_one_edge(&sx, &sx));
    assert!(!equivalent_one_edge(&sx, &sy));
    // re-based by an inner automorphism
    let moved = sx.remark(&conjugation(&g, "y")).unwrap();
    assert_ne!(moved.pair.graph.marking, g.marking);
    assert!(equivalent_one_edge(&sx, &moved));
}

#[test]
fn equivalence_is_an_equivalence_on_small_splittings() {
    let g = rose(&["x", "y", "z"]);
    let theta = theta_symmetry(3).unwrap().graph;
    let mut all = Vec::new();
    for names in [vec!["x"], vec!["y"], vec!["x", "y"], vec!["y", "z"], vec!["x", "z"]] {
        if let Ok(s) = OneEdgeSplitting::from_names(&g, &names) {
            all.push(s.clone());
            all.push(s.remark(&conjugation(&g, "x")).unwrap());
            all.push(s.remark(&conjugation(&g, "z'")).unwrap());
        }
    }
    for names in [["a", "b"], ["b", "c"], ["a", "c"]] {
        all.push(OneEdgeSplitting::from_names(&theta, &names).unwrap());
    }
    for a in &all {
        assert!(equivalent_one_edge(a, a));
        for b in &all {
            assert_eq!(equivalent_one_edge(a, b), equivalent_one_edge(b, a));
            for c in &all {
                if equivalent_one_edge(a, b) && equivalent_one_edge(b, c) {
                    assert!(equivalent_one_edge(a, c));
                }
            }
        }
    }
}

#[test]
fn identity_relates_a_pair_to_itself() {
    let ex = bdd_no_periodic(3).unwrap();
    let d = ex.decomposition.as_ref().unwrap();
    let p = validate_pair(&ex.graph, &d.j3).unwrap();
    let id = GraphMap::identity(ex.graph.graph.clone());
    match pair_relation_check(&id, &p, &p, 8).unwrap() {
        PairRelation::Holds(w) => {
            assert_eq!(w.edges.len(), 4);
            assert!(w.edges.iter().all(|e| e.mu.is_empty() && e.nu.is_empty()));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn f1_power_fixes_the_k1_pair() {
    let ex = bdd_no_periodic(3).unwrap();
    let d = ex.decomposition.as_ref().unwrap();
    let f1 = ex.extra("f1").unwrap();
    let p = validate_pair(&ex.graph, &d.k1).unwrap();
    for k in 1..=2 {
        let h = f1.power(k).unwrap();
        let q = p.remark(&h).unwrap();
        assert!(pair_relation_check(&h, &p, &q, 8).unwrap().holds(), "k = {k}");
    }
}

#[test]
fn image_of_b_crosses_a() {
    let ex = filling_reducible(3).unwrap();
    let p = MarkedGraphPair::from_names(&ex.graph, &["X", "Y", "Z", "A"]).unwrap();
    let q = p.remark(&ex.map).unwrap();
    match pair_relation_check(&ex.map, &p, &q, 8).unwrap() {
        PairRelation::FailsClause(3, _) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn wrong_marking_fails_clause_one() {
    let g = rose(&["x", "y"]);
    let p = MarkedGraphPair::from_names(&g, &["x"]).unwrap();
    let swap = GraphMap::endo_unchecked(g.graph.clone(), vec![vec![Dir::fwd(1)], vec![Dir::fwd(0)]]);
    match pair_relation_check(&swap, &p, &p, 8).unwrap() {
        PairRelation::FailsClause(1, _) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn remark_transforms_elliptic_systems() {
    let ex = filling_reducible(3).unwrap();
    let s = OneEdgeSplitting::from_names(&ex.graph, &["X", "Y", "Z", "A"]).unwrap();
    let t = s.remark(&ex.map).unwrap();
    let inv = fsplit::auto::invert_automorphism(&ex.map).unwrap();
    assert_eq!(t.key(), s.system.apply(&inv.images).unwrap().canonical_forms());
    let id = GraphMap::identity(ex.graph.graph.clone());
    assert!(equivalent_one_edge(&s.remark(&id).unwrap(), &s));
}

#[test]
fn remark_is_a_right_action() {
    let ex = bdd_no_periodic(3).unwrap();
    let d = ex.decomposition.as_ref().unwrap();
    let p = validate_pair(&ex.graph, &d.j3).unwrap();
    let (f, g) = (ex.extra("f1").unwrap(), ex.extra("f2").unwrap());
    let twice = p.remark(f).unwrap().remark(g).unwrap();
    let once = p.remark(&g.compose(f).unwrap()).unwrap();
    let id = GraphMap::identity(ex.graph.graph.clone());
    assert!(pair_relation_check(&id, &twice, &once, 8).unwrap().holds());
    assert_eq!(twice.simplex_key(), once.simplex_key());
    let ff = p.remark(f).unwrap().remark(f).unwrap();
    assert!(pair_relation_check(&id, &ff, &p.remark(&f.power(2).unwrap()).unwrap(), 8).unwrap().holds());
}

#[test]
fn faces_of_one_pair_are_adjacent() {
    let g = rose(&["x", "y", "z"]);
    let p = MarkedGraphPair::from_names(&g, &["x"]).unwrap();
    let faces: Vec<OneEdgeSplitting> = p.faces().unwrap().into_iter().map(|f| OneEdgeSplitting::new(f).unwrap()).collect();
    match adjacent(&faces[0], &faces[1], 10_000).unwrap() {
        Adjacency::Adjacent(w) => {
            let keys: Vec<_> = w.vertices().iter().map(|s| s.key()).collect();
            assert!(keys.contains(&faces[0].key()) && keys.contains(&faces[1].key()));
            assert_eq!(w.co_edge, 2);
        }
        other => panic!("{other:?}"),
    }
    assert!(adjacent(&faces[0], &faces[0], 10).is_err());
}

#[test]
fn rank_two_loops_are_adjacent_through_the_rose() {
    let g = rose(&["x", "y"]);
    let sx = OneEdgeSplitting::from_names(&g, &["x"]).unwrap();
    let sy = OneEdgeSplitting::from_names(&g, &["y"]).unwrap();
    match adjacent(&sx, &sy, 10_000).unwrap() {
        Adjacency::Adjacent(w) => assert!(w.h.iter().all(|x| !x)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn blow_up_keeps_the_marking() {
    let g = rose(&["x", "y", "z"]);
    let r = g.graph.clone();
    let side = [r.parse_dir("y").unwrap(), r.parse_dir("y'").unwrap(), r.parse_dir("z").unwrap(), r.parse_dir("z'").unwrap()];
    let b = blow_up(&g, 0, &side).unwrap();
    assert_eq!(b.graph.num_vertices(), 2);
    assert_eq!(b.graph.num_edges(), 4);
    // collapsing the new edge gives back the rose
    let h_all: Vec<&str> = vec!["x", "y", "z", "n0"];
    let sep = OneEdgeSplitting::from_names(&b, &h_all[..3]).unwrap();
    assert_eq!(sep.system.ranks(), vec![1, 2]);
    let back = MarkedGraphPair::from_names(&b, &["x", "y", "n0"]).unwrap();
    let orig = OneEdgeSplitting::from_names(&g, &["x", "y"]).unwrap();
    assert!(equivalent_one_edge(&OneEdgeSplitting::new(back).unwrap(), &orig));
    assert!(blow_ups(&g, 100).len() >= 3);
}

#[test]
fn adjacency_through_a_blow_up() {
    // ⟨x,y⟩ and the separating splitting ⟨x⟩ * ⟨y,z⟩ share the barbell refinement
    let g = rose(&["x", "y", "z"]);
    let r = g.graph.clone();
    let side = [r.parse_dir("y").unwrap(), r.parse_dir("y'").unwrap(), r.parse_dir("z").unwrap(), r.parse_dir("z'").unwrap()];
    let b = blow_up(&g, 0, &side).unwrap();
    let s1 = OneEdgeSplitting::from_names(&g, &["x", "y"]).unwrap();
    let s2 = OneEdgeSplitting::from_names(&b, &["x", "y", "z"]).unwrap();
    match adjacent(&s1, &s2, 100_000).unwrap() {
        Adjacency::Adjacent(w) => {
            let keys: Vec<_> = w.vertices().iter().map(|s| s.key()).collect();
            assert!(keys.contains(&s1.key()) && keys.contains(&s2.key()));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn distance_zero_and_two() {
    let g = rose(&["x", "y", "z"]);
    let p = MarkedGraphPair::from_names(&g, &["x"]).unwrap();
    assert_eq!(fs_distance_upper(&p, &p, &[], 10_000).unwrap().len(), 0);
    let faces = p.faces().unwrap();
    let path = fs_distance_upper(&faces[0], &faces[1], &[], 10_000).unwrap();
    assert!(path.len() <= 2, "{path:?}");
}

#[test]
fn bounded_orbit_chain_has_length_at_most_four() {
    let ex = bdd_no_periodic(3).unwrap();
    let d = ex.decomposition.as_ref().unwrap();
    let f1 = ex.extra("f1").unwrap();
    let j3 = validate_pair(&ex.graph, &d.j3).unwrap();
    for k in 1..=2 {
        let fk = ex.map.power(k).unwrap();
        let f1k = f1.power(k).unwrap();
        let target = j3.remark(&fk).unwrap();
        let mid = ex.graph.remark(&f1k, None).unwrap();
        let path = fs_distance_upper(&j3, &target, &[mid], 100_000).unwrap();
        assert!(path.len() <= 4, "k = {k}: {path:?}");
        assert!(!path.is_empty());
    }
}
