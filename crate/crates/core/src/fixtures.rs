//! Catalog of worked examples: the filling reducible map, the bounded-orbit
//! map without periodic vertices, the linear stabilizer generators, a rank-2
//! battery, and a divergence pair.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dynamics::{strata, StratumKind};
use crate::error::{Error, Result};
use crate::graph::{Edge, EdgePath, Graph, GraphMap, MarkedGraph};
use crate::whitehead::{fills, Budget};
use crate::word::{CyclicWord, Dir};

const G1_NAMES: [&str; 6] = ["X", "Y", "Z", "W", "V", "U"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expected {
    Loxodromic,
    BoundedOrbits,
    PeriodicVertex,
}

/// Edge sets `K₁, K₂, J₂, J₃` for the bounded-orbit chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub k1: Vec<bool>,
    pub k2: Vec<bool>,
    pub j2: Vec<bool>,
    pub j3: Vec<bool>,
}

#[derive(Debug, Clone)]
pub struct Example {
    pub name: String,
    pub graph: MarkedGraph,
    pub map: GraphMap,
    /// Other maps of the same graph, by name.
    pub extra: Vec<(String, GraphMap)>,
    pub decomposition: Option<Decomposition>,
    pub expected: Option<Expected>,
    /// Abelianization of the represented automorphism, for rank-2 examples.
    pub matrix: Option<[[i64; 2]; 2]>,
    pub notes: Vec<String>,
}

impl Example {
    pub fn extra(&self, name: &str) -> Option<&GraphMap> {
        self.extra.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    pub fn edges(&self, names: &[&str]) -> Vec<bool> {
        mask(&self.graph.graph, names)
    }
}

pub fn mask(g: &Graph, names: &[&str]) -> Vec<bool> {
    let mut m = vec![false; g.num_edges()];
    for n in names {
        m[g.edge_index(n).unwrap_or_else(|| panic!("no edge {n}"))] = true;
    }
    m
}

pub struct CatalogEntry {
    pub name: &'static str,
    pub params: &'static str,
    pub about: &'static str,
}

pub fn catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry { name: "filling_reducible", params: "m in 2..=6 (default 3)", about: "reducible map whose EG lamination fills" },
        CatalogEntry { name: "bdd_no_periodic", params: "m in 2..=6 (default 3)", about: "two EG strata, neither lamination fills, both together do" },
        CatalogEntry { name: "linear_example", params: "i, j (default 1, 0)", about: "linear maps fixing <X, YX'Y', ZwZ'> with w = X" },
        CatalogEntry { name: "twist", params: "", about: "x -> xy, y -> y" },
        CatalogEntry { name: "divergence_pair", params: "", about: "Fibonacci map and its conjugate by x -> xy" },
        CatalogEntry { name: "rank2", params: "matrix a,b,c,d", about: "rank-2 map with the given abelianization" },
        CatalogEntry { name: "theta_order3", params: "", about: "order-3 symmetry of the theta graph" },
        CatalogEntry { name: "theta_order6", params: "", about: "order-6 symmetry of the theta graph" },
        CatalogEntry { name: "surface_example", params: "", about: "stub, not constructed" },
    ]
}

fn rose_graph(names: &[&str]) -> (Arc<Graph>, MarkedGraph) {
    let mg = MarkedGraph::rose(names);
    (mg.graph.clone(), mg)
}

fn word(g: &Graph, s: &str) -> EdgePath {
    g.parse_word(s).expect("fixture word")
}

/// `X X · Π g X X ḡ` over the other letters of `G₁`.
pub fn sigma_word(m: usize) -> String {
    let mut parts = vec!["X X".to_string()];
    for g in &G1_NAMES[1..m] {
        parts.push(format!("{g} X X {g}'"));
    }
    parts.join(" ")
}

fn check_sigma(m: usize, sigma: &str) -> Result<()> {
    let names = &G1_NAMES[..m];
    let g = Graph::rose(names);
    let w = g.parse_word(sigma)?;
    if !fills(m, &[CyclicWord::new(&w)], Budget::default()).is_fills() {
        return Err(Error::FixtureInvalid(format!("sigma = {sigma} does not fill F_{m}")));
    }
    Ok(())
}

fn check_m(m: usize) -> Result<()> {
    if !(2..=6).contains(&m) {
        return Err(Error::InvalidInput(format!("m = {m} outside 2..=6")));
    }
    Ok(())
}

fn eg_map(g: &Graph, a: &str, b: &str, sigma: &str) -> (EdgePath, EdgePath) {
    (
        word(g, &format!("{a} {sigma} {b}' {sigma} {b}")),
        word(g, &format!("{b} {sigma} {a} {sigma} {b}' {sigma} {b}")),
    )
}

pub fn filling_reducible(m: usize) -> Result<Example> {
    check_m(m)?;
    let sigma = sigma_word(m);
    check_sigma(m, &sigma)?;
    let mut names: Vec<&str> = G1_NAMES[..m].to_vec();
    names.extend(["A", "B"]);
    let (g, mg) = rose_graph(&names);
    let mut images: Vec<EdgePath> = (0..m).map(|e| vec![Dir::fwd(e)]).collect();
    let (ia, ib) = eg_map(&g, "A", "B", &sigma);
    images.push(ia);
    images.push(ib);
    let f = GraphMap::endo_unchecked(g, images);
    let ex = Example {
        name: "filling_reducible".into(),
        graph: mg,
        map: f,
        extra: Vec::new(),
        decomposition: None,
        expected: Some(Expected::Loxodromic),
        matrix: None,
        notes: vec![format!("sigma = {sigma}")],
    };
    validate(&ex)?;
    Ok(ex)
}

pub fn bdd_no_periodic(m: usize) -> Result<Example> {
    check_m(m)?;
    let sigma = sigma_word(m);
    check_sigma(m, &sigma)?;
    let mut names: Vec<&str> = G1_NAMES[..m].to_vec();
    names.extend(["A", "B", "A2", "B2"]);
    let (g, mg) = rose_graph(&names);
    let id = |e: usize| vec![Dir::fwd(e)];
    let mut images: Vec<EdgePath> = (0..m).map(id).collect();
    let (ia, ib) = eg_map(&g, "A", "B", &sigma);
    let (ia2, ib2) = eg_map(&g, "A2", "B2", &sigma);
    images.extend([ia.clone(), ib.clone(), ia2.clone(), ib2.clone()]);
    let f = GraphMap::endo_unchecked(g.clone(), images);
    let mut f1 = (0..m + 4).map(id).collect::<Vec<_>>();
    f1[m] = ia;
    f1[m + 1] = ib;
    let mut f2 = (0..m + 4).map(id).collect::<Vec<_>>();
    f2[m + 2] = ia2;
    f2[m + 3] = ib2;
    let g1: Vec<&str> = G1_NAMES[..m].to_vec();
    let with = |extra: &[&str]| {
        let mut v = g1.clone();
        v.extend_from_slice(extra);
        mask(&g, &v)
    };
    let decomposition = Decomposition {
        k1: with(&["A", "B"]),
        k2: with(&["A2", "B2"]),
        j2: with(&["A2", "B2"]),
        j3: with(&[]),
    };
    let ex = Example {
        name: "bdd_no_periodic".into(),
        graph: mg,
        map: f,
        extra: vec![
            ("f1".into(), GraphMap::endo_unchecked(g.clone(), f1)),
            ("f2".into(), GraphMap::endo_unchecked(g, f2)),
        ],
        decomposition: Some(decomposition),
        expected: Some(Expected::BoundedOrbits),
        matrix: None,
        notes: vec![
            format!("sigma = {sigma}"),
            "K1 = G1 + {A,B}, K2 = J2 = G1 + {A2,B2}, J3 = G1".into(),
        ],
    };
    validate(&ex)?;
    Ok(ex)
}

/// `θ_{i,j}`: `Y ↦ Y X^{3i}`, `Z ↦ Z X^{3j}`, everything else fixed.
pub fn theta(g: Arc<Graph>, i: i64, j: i64) -> GraphMap {
    let x = g.edge_index("X").unwrap();
    let pow = |k: i64| vec![Dir::new(x, k < 0); (3 * k.unsigned_abs()) as usize];
    let mut images: Vec<EdgePath> = (0..g.num_edges()).map(|e| vec![Dir::fwd(e)]).collect();
    let y = g.edge_index("Y").unwrap();
    let z = g.edge_index("Z").unwrap();
    images[y].extend(pow(i));
    images[z].extend(pow(j));
    GraphMap::endo_unchecked(g, images)
}

pub fn linear_example(i: i64, j: i64) -> Result<Example> {
    let mut ex = filling_reducible(3)?;
    let g = ex.graph.graph.clone();
    ex.name = "linear_example".into();
    ex.extra = vec![
        ("theta".into(), theta(g.clone(), i, j)),
        ("theta_1_0".into(), theta(g.clone(), 1, 0)),
        ("theta_0_1".into(), theta(g, 0, 1)),
    ];
    ex.notes.push(format!("theta = theta_{{{i},{j}}} with w = X"));
    Ok(ex)
}

fn rank2_rose() -> (Arc<Graph>, MarkedGraph) {
    rose_graph(&["x", "y"])
}

pub fn twist() -> Result<Example> {
    let (g, mg) = rank2_rose();
    let f = GraphMap::endo_unchecked(g.clone(), vec![word(&g, "x y"), word(&g, "y")]);
    let ex = Example {
        name: "twist".into(),
        graph: mg,
        matrix: Some(abelianization(&f)),
        map: f,
        extra: Vec::new(),
        decomposition: None,
        expected: Some(Expected::PeriodicVertex),
        notes: Vec::new(),
    };
    validate(&ex)?;
    Ok(ex)
}

/// Column `j` is the abelianized image of basis letter `j`.
pub fn abelianization(f: &GraphMap) -> [[i64; 2]; 2] {
    let mut m = [[0i64; 2]; 2];
    for (j, img) in f.images.iter().enumerate().take(2) {
        for d in img {
            m[d.edge()][j] += if d.is_rev() { -1 } else { 1 };
        }
    }
    m
}

/// A rose automorphism with abelianization `m`; positive when `m` is
/// nonnegative.
pub fn realize_gl2(m: [[i64; 2]; 2]) -> Result<GraphMap> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.abs() != 1 {
        return Err(Error::InvalidInput(format!("determinant {det} is not ±1")));
    }
    let (g, _) = rank2_rose();
    let mut cur = m;
    // column operations col_i -= s col_j, recorded
    let mut ops: Vec<(usize, usize, i64)> = Vec::new();
    let l1 = |c: &[[i64; 2]; 2], i: usize| c[0][i].abs() + c[1][i].abs();
    let is_signed_perm = |c: &[[i64; 2]; 2]| l1(c, 0) == 1 && l1(c, 1) == 1;
    let mut guard = 0;
    while !is_signed_perm(&cur) {
        guard += 1;
        if guard > 10_000 {
            return Err(Error::BudgetExhausted("GL2 reduction".into()));
        }
        let mut best: Option<(i64, usize, usize, i64)> = None;
        for i in 0..2 {
            let j = 1 - i;
            for s in [1i64, -1] {
                let mut t = cur;
                t[0][i] -= s * t[0][j];
                t[1][i] -= s * t[1][j];
                let gain = l1(&cur, i) - l1(&t, i);
                let nonneg_ok = !(m.iter().flatten().all(|&x| x >= 0) && t.iter().flatten().any(|&x| x < 0));
                if gain > 0 && nonneg_ok && best.is_none_or(|b| gain > b.0) {
                    best = Some((gain, i, j, s));
                }
            }
        }
        let (_, i, j, s) = best.ok_or_else(|| Error::InvalidInput("matrix reduction stalled".into()))?;
        cur[0][i] -= s * cur[0][j];
        cur[1][i] -= s * cur[1][j];
        ops.push((i, j, s));
    }
    // cur is a signed permutation: realize it
    let mut perm: Vec<EdgePath> = vec![Vec::new(); 2];
    for j in 0..2 {
        for r in 0..2 {
            if cur[r][j] != 0 {
                perm[j] = vec![Dir::new(r, cur[r][j] < 0)];
            }
        }
    }
    let mut phi = GraphMap::endo_unchecked(g.clone(), perm);
    // M = P · T_k⁻¹ ⋯ T_1⁻¹, and T⁻¹ for col_i -= s col_j is x_i ↦ x_i x_j^s
    for &(i, j, s) in ops.iter().rev() {
        let mut images: Vec<EdgePath> = vec![vec![Dir::fwd(0)], vec![Dir::fwd(1)]];
        images[i].push(Dir::new(j, s < 0));
        let t = GraphMap::endo_unchecked(g.clone(), images);
        phi = phi.compose(&t)?;
    }
    debug_assert_eq!(abelianization(&phi), m);
    Ok(phi)
}

pub fn rank2(mtx: [[i64; 2]; 2]) -> Result<Example> {
    let (_, mg) = rank2_rose();
    let f = realize_gl2(mtx)?;
    let ex = Example {
        name: format!("rank2_{}_{}_{}_{}", mtx[0][0], mtx[0][1], mtx[1][0], mtx[1][1]),
        graph: mg,
        map: f,
        extra: Vec::new(),
        decomposition: None,
        expected: None,
        matrix: Some(mtx),
        notes: Vec::new(),
    };
    validate(&ex)?;
    Ok(ex)
}

/// Theta graph with edges `a, b, c` from `p` to `q`, marked by `x = a b̄`,
/// `y = b c̄`, and the order-3 (rotation) or order-6 (rotation composed with
/// the flip) symmetry.
pub fn theta_symmetry(order: usize) -> Result<Example> {
    let graph = Graph::new(
        vec!["p".into(), "q".into()],
        ["a", "b", "c"].iter().map(|n| Edge { name: n.to_string(), tail: 0, head: 1 }).collect(),
    )?;
    let rose = Graph::rose(&["x", "y"]);
    let mk = vec![graph.parse_word("a b'")?, graph.parse_word("b c'")?];
    let mg = MarkedGraph::new(graph, rose, 0, mk)?;
    let g = mg.graph.clone();
    let f = match order {
        3 => GraphMap::endo(g.clone(), vec![0, 1], vec![word(&g, "b"), word(&g, "c"), word(&g, "a")])?,
        6 => GraphMap::endo(g.clone(), vec![1, 0], vec![word(&g, "b'"), word(&g, "c'"), word(&g, "a'")])?,
        _ => return Err(Error::InvalidInput("theta symmetry order must be 3 or 6".into())),
    };
    let phi = mg.outer_of(&f)?;
    let ex = Example {
        name: format!("theta_order{order}"),
        graph: mg,
        matrix: Some(abelianization(&phi)),
        map: f,
        extra: Vec::new(),
        decomposition: None,
        expected: Some(Expected::PeriodicVertex),
        notes: Vec::new(),
    };
    validate(&ex)?;
    Ok(ex)
}

/// The rank-2 battery: `(abelianization, loxodromic by the trace rule)`.
pub fn rank2_battery() -> Result<Vec<Example>> {
    let mats: [[[i64; 2]; 2]; 12] = [
        [[2, 1], [1, 1]],
        [[1, 1], [0, 1]],
        [[0, -1], [1, 0]],
        [[1, 1], [1, 0]],
        [[3, 1], [2, 1]],
        [[1, 0], [0, 1]],
        [[-1, 0], [0, -1]],
        [[1, 0], [0, -1]],
        [[2, 1], [1, 0]],
        [[0, 1], [1, 0]],
        [[-1, -1], [0, -1]],
        [[3, 2], [1, 1]],
    ];
    let mut out = mats.iter().map(|&m| rank2(m)).collect::<Result<Vec<_>>>()?;
    out.push(theta_symmetry(3)?);
    out.push(theta_symmetry(6)?);
    Ok(out)
}

/// `φ: x ↦ y, y ↦ xy` and `ψ = g φ g⁻¹` with `g: x ↦ xy`.
pub fn divergence_pair() -> Result<Example> {
    let (g, mg) = rank2_rose();
    let phi = GraphMap::endo_unchecked(g.clone(), vec![word(&g, "y"), word(&g, "x y")]);
    let gm = GraphMap::endo_unchecked(g.clone(), vec![word(&g, "x y"), word(&g, "y")]);
    let ginv = GraphMap::endo_unchecked(g.clone(), vec![word(&g, "x y'"), word(&g, "y")]);
    let psi = gm.compose(&phi)?.compose(&ginv)?;
    let ex = Example {
        name: "divergence_pair".into(),
        graph: mg,
        matrix: Some(abelianization(&phi)),
        map: phi,
        extra: vec![("psi".into(), psi)],
        decomposition: None,
        expected: Some(Expected::Loxodromic),
        notes: vec!["psi = g phi g^-1 with g: x -> xy".into()],
    };
    validate(&ex)?;
    Ok(ex)
}

/// Load-time checks: the map is an endomorphism of the marked graph and any
/// supplied decomposition consists of invariant subgraphs.
pub fn validate(ex: &Example) -> Result<()> {
    let f = &ex.map;
    if *f.source != *ex.graph.graph {
        return Err(Error::FixtureInvalid(format!("{}: map does not live on the marked graph", ex.name)));
    }
    crate::auto::invert_automorphism(&ex.graph.outer_of(f)?)
        .map_err(|e| Error::FixtureInvalid(format!("{}: map is not a homotopy equivalence ({e})", ex.name)))?;
    if let Some(d) = &ex.decomposition {
        for (name, h) in [("K1", &d.k1), ("K2", &d.k2), ("J2", &d.j2), ("J3", &d.j3)] {
            if !f.is_invariant_subgraph(h) {
                return Err(Error::FixtureInvalid(format!("{}: {name} is not invariant", ex.name)));
            }
        }
    }
    if ex.name == "filling_reducible" || ex.name == "bdd_no_periodic" {
        let filt = strata(f)?;
        let want_eg = if ex.name == "filling_reducible" { 1 } else { 2 };
        if filt.eg_strata().len() != want_eg || filt.strata[0].kind != StratumKind::Fixed {
            return Err(Error::FixtureInvalid(format!("{}: unexpected strata {:?}", ex.name, filt.kinds())));
        }
    }
    Ok(())
}

/// Looks up a fixture by name with `key=value` parameters.
pub fn fixture(name: &str, params: &[(String, String)]) -> Result<Example> {
    let get = |k: &str| params.iter().find(|(p, _)| p == k).map(|(_, v)| v.as_str());
    let int = |k: &str, d: i64| -> Result<i64> {
        match get(k) {
            None => Ok(d),
            Some(v) => v.parse().map_err(|_| Error::InvalidInput(format!("parameter {k}={v} is not an integer"))),
        }
    };
    match name {
        "filling_reducible" => filling_reducible(int("m", 3)? as usize),
        "bdd_no_periodic" => bdd_no_periodic(int("m", 3)? as usize),
        "linear_example" => linear_example(int("i", 1)?, int("j", 0)?),
        "twist" => twist(),
        "divergence_pair" => divergence_pair(),
        "rank2" => {
            let raw = get("matrix").ok_or_else(|| Error::InvalidInput("rank2 needs matrix=a,b,c,d".into()))?;
            let v: Vec<i64> = raw
                .split(',')
                .map(|t| t.trim().parse().map_err(|_| Error::InvalidInput(format!("bad matrix entry {t}"))))
                .collect::<Result<_>>()?;
            if v.len() != 4 {
                return Err(Error::InvalidInput("matrix needs four entries".into()));
            }
            rank2([[v[0], v[1]], [v[2], v[3]]])
        }
        "theta_order3" => theta_symmetry(3),
        "theta_order6" => theta_symmetry(6),
        "surface_example" => Err(Error::NotApplicable("surface_example is a stub and is not constructed".into())),
        _ => Err(Error::InvalidInput(format!("unknown fixture {name}"))),
    }
}
