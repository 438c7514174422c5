//! Marked graph pairs, their faces, one-edge splittings, and the relation
//! witnessed by maps between pairs.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::auto::{outer_equal, OuterEq};
use crate::error::{invalid, Error, Result};
use crate::factor::FreeFactorSystem;
use crate::graph::{Edge, EdgePath, Graph, GraphMap, MarkedGraph};
use crate::word::{push_reduced, Dir};

/// Maximal paths whose interior vertices have valence two, each starting at
/// a natural vertex. A circle is one natural edge.
pub fn natural_edges(g: &Graph) -> Vec<EdgePath> {
    let mut seen = vec![false; g.num_edges()];
    let mut out = Vec::new();
    let through = |v: usize| g.valence(v) == 2;
    for e in 0..g.num_edges() {
        if seen[e] {
            continue;
        }
        // walk back to a natural vertex, or around a circle
        let mut start = Dir::fwd(e);
        loop {
            let v = g.origin(start);
            if !through(v) {
                break;
            }
            let prev = other_half(g, v, start).inv();
            if prev.edge() == e {
                break;
            }
            start = prev;
        }
        let mut path = vec![start];
        seen[start.edge()] = true;
        loop {
            let last = *path.last().unwrap();
            let v = g.terminus(last);
            if !through(v) {
                break;
            }
            let next = other_half(g, v, last.inv());
            if seen[next.edge()] {
                break;
            }
            seen[next.edge()] = true;
            path.push(next);
        }
        out.push(path);
    }
    out
}

/// The other half-edge at a valence-two vertex `v`, given one leaving it.
fn other_half(g: &Graph, v: usize, d: Dir) -> Dir {
    (0..2 * g.num_edges())
        .map(|i| Dir::new(i / 2, i % 2 == 1))
        .find(|&o| g.origin(o) == v && o != d)
        .unwrap_or(d)
}

pub fn natural_vertices(g: &Graph) -> Vec<usize> {
    (0..g.num_vertices()).filter(|&v| g.valence(v) != 2).collect()
}

/// A marked graph with a subgraph `h` all of whose components contain a
/// cycle; `co_edge` counts natural edges outside `h`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedGraphPair {
    pub graph: MarkedGraph,
    pub h: Vec<bool>,
    pub co_edge: usize,
}

pub fn validate_pair(graph: &MarkedGraph, h: &[bool]) -> Result<MarkedGraphPair> {
    let g = &graph.graph;
    if h.len() != g.num_edges() {
        return invalid(format!("subgraph has {} entries for {} edges", h.len(), g.num_edges()));
    }
    let naturals = natural_edges(g);
    let mut co_edge = 0;
    for p in &naturals {
        let inside = p.iter().filter(|d| h[d.edge()]).count();
        if inside != 0 && inside != p.len() {
            return invalid(format!("subgraph is not natural: it splits the natural edge {}", g.word_string(p)));
        }
        co_edge += (inside == 0) as usize;
    }
    for (verts, edges) in g.components(h) {
        if edges.len() < verts.len() {
            let names: Vec<&str> = edges.iter().map(|&e| g.edges[e].name.as_str()).collect();
            return invalid(format!("subgraph component {{{}}} is contractible", names.join(",")));
        }
    }
    if co_edge == 0 {
        return invalid("co-edge number is zero: the subgraph is the whole graph");
    }
    Ok(MarkedGraphPair { graph: graph.clone(), h: h.to_vec(), co_edge })
}

impl MarkedGraphPair {
    pub fn from_names(graph: &MarkedGraph, names: &[&str]) -> Result<MarkedGraphPair> {
        let mut h = vec![false; graph.graph.num_edges()];
        for n in names {
            let e = graph.graph.edge_index(n).ok_or_else(|| Error::InvalidInput(format!("unknown edge {n}")))?;
            h[e] = true;
        }
        validate_pair(graph, &h)
    }

    pub fn h_names(&self) -> Vec<String> {
        (0..self.h.len()).filter(|&e| self.h[e]).map(|e| self.graph.graph.edges[e].name.clone()).collect()
    }

    /// Natural edges outside `h`.
    pub fn co_edges(&self) -> Vec<EdgePath> {
        natural_edges(&self.graph.graph).into_iter().filter(|p| !self.h[p[0].edge()]).collect()
    }

    /// The conjugacy classes of the fundamental groups of the components of
    /// `h`, read in the rose.
    pub fn elliptic_system(&self) -> FreeFactorSystem {
        let mg = &self.graph;
        let g = &mg.graph;
        let all = vec![true; g.num_edges()];
        let to_v = g.tree_paths(mg.base, &all);
        let mut groups = Vec::new();
        for (verts, edges) in g.components(&self.h) {
            let root = verts[0];
            let mut mask = vec![false; g.num_edges()];
            for &e in &edges {
                mask[e] = true;
            }
            let tree = g.tree_paths(root, &mask);
            let tree_edges: BTreeSet<usize> =
                verts.iter().filter_map(|&v| tree[v].as_ref().and_then(|p| p.last()).map(|d| d.edge())).collect();
            let lead = to_v[root].clone().expect("graph is connected");
            let mut gens = Vec::new();
            for &e in edges.iter().filter(|e| !tree_edges.contains(e)) {
                let d = Dir::fwd(e);
                let mut l = lead.clone();
                for &x in tree[g.origin(d)].as_ref().unwrap() {
                    push_reduced(&mut l, x);
                }
                push_reduced(&mut l, d);
                for &x in tree[g.terminus(d)].as_ref().unwrap().iter().rev() {
                    push_reduced(&mut l, x.inv());
                }
                for &x in lead.iter().rev() {
                    push_reduced(&mut l, x.inv());
                }
                gens.push(mg.to_rose(&l));
            }
            groups.push(gens);
        }
        FreeFactorSystem::from_generators(mg.rank(), &groups).expect("component loops are nontrivial")
    }

    /// Pairs `(G, H′)` with `H ⊊ H′ ⊊ G` natural and valid.
    pub fn faces(&self) -> Result<Vec<MarkedGraphPair>> {
        if self.co_edge < 2 {
            return invalid("a co-edge-1 pair has no proper faces");
        }
        let co = self.co_edges();
        let k = co.len();
        let mut out = Vec::new();
        for mask in 1u64..(1u64 << k) - 1 {
            let mut h = self.h.clone();
            for (i, p) in co.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    for d in p {
                        h[d.edge()] = true;
                    }
                }
            }
            if let Ok(p) = validate_pair(&self.graph, &h) {
                out.push(p);
            }
        }
        Ok(out)
    }

    /// The one-edge collapses `(G, G ∖ E)` that are valid.
    pub fn vertices(&self) -> Vec<OneEdgeSplitting> {
        let all = vec![true; self.h.len()];
        self.co_edges()
            .iter()
            .filter_map(|p| {
                let mut h = all.clone();
                for d in p {
                    h[d.edge()] = false;
                }
                validate_pair(&self.graph, &h).ok().and_then(|q| OneEdgeSplitting::new(q).ok())
            })
            .collect()
    }

    /// Identifies the simplex: the sorted elliptic systems of its vertices.
    pub fn simplex_key(&self) -> Vec<Vec<Vec<u32>>> {
        let mut keys: Vec<Vec<Vec<u32>>> = self.vertices().iter().map(|s| s.key()).collect();
        keys.sort();
        keys.dedup();
        keys
    }

    /// `(G^f, H)`: same graph and subgraph, marking `f ∘ ρ`.
    pub fn remark(&self, f: &GraphMap) -> Result<MarkedGraphPair> {
        let graph = self.graph.remark(f, None)?;
        Ok(MarkedGraphPair { graph, h: self.h.clone(), co_edge: self.co_edge })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneEdgeSplitting {
    pub pair: MarkedGraphPair,
    pub system: FreeFactorSystem,
}

impl OneEdgeSplitting {
    pub fn new(pair: MarkedGraphPair) -> Result<OneEdgeSplitting> {
        if pair.co_edge != 1 {
            return invalid(format!("one-edge splitting needs co-edge 1, got {}", pair.co_edge));
        }
        let system = pair.elliptic_system();
        if !system.is_proper() {
            return invalid("elliptic system is not proper");
        }
        Ok(OneEdgeSplitting { pair, system })
    }

    pub fn from_names(graph: &MarkedGraph, names: &[&str]) -> Result<OneEdgeSplitting> {
        OneEdgeSplitting::new(MarkedGraphPair::from_names(graph, names)?)
    }

    pub fn key(&self) -> Vec<Vec<u32>> {
        self.system.canonical_forms()
    }

    pub fn remark(&self, f: &GraphMap) -> Result<OneEdgeSplitting> {
        OneEdgeSplitting::new(self.pair.remark(f)?)
    }
}

pub fn equivalent_one_edge(s1: &OneEdgeSplitting, s2: &OneEdgeSplitting) -> bool {
    s1.system.rank_n == s2.system.rank_n && s1.key() == s2.key()
}

/// How one natural edge outside `H` maps: `h(E) = μ E′ ν` with `μ, ν` in `H′`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeImage {
    pub edge: EdgePath,
    pub image: EdgePath,
    pub mu: EdgePath,
    pub nu: EdgePath,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRelationWitness {
    pub map: GraphMap,
    pub conjugator: EdgePath,
    pub vertices: Vec<(usize, usize)>,
    pub edges: Vec<EdgeImage>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairRelation {
    Holds(PairRelationWitness),
    /// The clause (1, 2 or 3) that fails, with a reason.
    FailsClause(u8, String),
    Unknown(String),
}

impl PairRelation {
    pub fn holds(&self) -> bool {
        matches!(self, PairRelation::Holds(_))
    }
}

fn vertices_outside(p: &MarkedGraphPair) -> BTreeSet<usize> {
    let g = &p.graph.graph;
    let mut touched = vec![false; g.num_vertices()];
    for (e, edge) in g.edges.iter().enumerate() {
        if p.h[e] {
            touched[edge.tail] = true;
            touched[edge.head] = true;
        }
    }
    natural_vertices(g).into_iter().filter(|&v| !touched[v]).collect()
}

/// The rose map `ρ₂⁻¹ ∘ h ∘ ρ₁`.
pub fn induced_rose_map(h: &GraphMap, g1: &MarkedGraph, g2: &MarkedGraph) -> Result<GraphMap> {
    if *h.source != *g1.graph || *h.target != *g2.graph {
        return invalid("map does not run between the given graphs");
    }
    if g1.rank() != g2.rank() {
        return invalid("marked graphs have different ranks");
    }
    let all = vec![true; g2.graph.num_edges()];
    let conn = g2.graph.tree_paths(g2.base, &all)[h.vmap[g1.base]]
        .clone()
        .ok_or_else(|| Error::InvalidInput("target graph is not connected".into()))?;
    let mut images = Vec::with_capacity(g1.rank());
    for p in &g1.marking {
        let mut l = conn.clone();
        for d in h.map_path(p)? {
            push_reduced(&mut l, d);
        }
        for &d in conn.iter().rev() {
            push_reduced(&mut l, d.inv());
        }
        images.push(g2.to_rose(&l));
    }
    Ok(GraphMap::endo_unchecked(g1.rose.clone(), images))
}

/// Checks that `h: G₁ → G₂` witnesses `(G₁, H₁) ~ (G₂, H₂)`: it preserves
/// markings, is a bijection on natural vertices off `H`, and sends each
/// natural edge off `H₁` to `μ′E′ν′` for a distinct natural edge `E′` off
/// `H₂` with `μ′, ν′` in `H₂`.
pub fn pair_relation_check(h: &GraphMap, p1: &MarkedGraphPair, p2: &MarkedGraphPair, budget: usize) -> Result<PairRelation> {
    let rose_map = induced_rose_map(h, &p1.graph, &p2.graph)?;
    let conjugator = match outer_equal(&rose_map, &GraphMap::identity(p1.graph.rose.clone()), budget) {
        OuterEq::Equal { conjugator } => conjugator,
        OuterEq::Distinct { reason } => return Ok(PairRelation::FailsClause(1, reason)),
        OuterEq::Unknown => return Ok(PairRelation::Unknown("marking comparison exceeded its budget".into())),
    };
    let g2 = &p2.graph.graph;
    let (src, dst) = (vertices_outside(p1), vertices_outside(p2));
    let mut vertices = Vec::new();
    let mut hit = BTreeSet::new();
    for &v in &src {
        let w = h.vmap[v];
        if !dst.contains(&w) || !hit.insert(w) {
            return Ok(PairRelation::FailsClause(2, format!("vertex {} does not map bijectively", p1.graph.graph.vertices[v])));
        }
        vertices.push((v, w));
    }
    if hit.len() != dst.len() {
        return Ok(PairRelation::FailsClause(2, "natural vertex map is not onto".into()));
    }
    let targets = p2.co_edges();
    let mut used = vec![false; targets.len()];
    let mut edges = Vec::new();
    for e in p1.co_edges() {
        let img = h.map_path(&e)?;
        let off: Vec<usize> = (0..img.len()).filter(|&i| !p2.h[img[i].edge()]).collect();
        let name = p1.graph.graph.word_string(&e);
        let (Some(&a), Some(&b)) = (off.first(), off.last()) else {
            return Ok(PairRelation::FailsClause(3, format!("image of {name} lies in H")));
        };
        if b + 1 - a != off.len() {
            return Ok(PairRelation::FailsClause(3, format!("image of {name} leaves H more than once")));
        }
        let middle = &img[a..=b];
        let found = targets.iter().enumerate().find(|(_, t)| {
            t.as_slice() == middle || t.iter().rev().map(|d| d.inv()).eq(middle.iter().copied())
        });
        let Some((i, _)) = found else {
            return Ok(PairRelation::FailsClause(3, format!("image of {name} crosses {} off H", g2.word_string(middle))));
        };
        if std::mem::replace(&mut used[i], true) {
            return Ok(PairRelation::FailsClause(3, format!("two edges map over {}", g2.word_string(middle))));
        }
        edges.push(EdgeImage { edge: e, image: middle.to_vec(), mu: img[..a].to_vec(), nu: img[b + 1..].to_vec() });
    }
    if used.iter().any(|u| !u) {
        return Ok(PairRelation::FailsClause(3, "edge map is not onto".into()));
    }
    Ok(PairRelation::Holds(PairRelationWitness { map: h.clone(), conjugator, vertices, edges }))
}

/// Splits vertex `v` into `v` and a new vertex joined by a new edge, moving
/// the half-edges in `side` (all leaving `v`) to the new vertex. The marking
/// is carried along by inserting the new edge where paths change side.
pub fn blow_up(mg: &MarkedGraph, v: usize, side: &[Dir]) -> Result<MarkedGraph> {
    let g = &mg.graph;
    let halves: Vec<Dir> = (0..2 * g.num_edges()).map(|i| Dir::new(i / 2, i % 2 == 1)).filter(|&d| g.origin(d) == v).collect();
    if side.iter().any(|d| !halves.contains(d)) {
        return invalid("blow-up side must consist of half-edges at the vertex");
    }
    if side.len() < 2 || halves.len() - side.len() < 2 {
        return invalid("each side of a blow-up needs at least two half-edges");
    }
    let fresh = g.num_vertices();
    let mut vertices = g.vertices.clone();
    let mut vname = format!("{}~", g.vertices[v]);
    while vertices.contains(&vname) {
        vname.push('~');
    }
    vertices.push(vname);
    let mut edges = g.edges.clone();
    for &d in side {
        let e = &mut edges[d.edge()];
        if d.is_rev() {
            e.head = fresh;
        } else {
            e.tail = fresh;
        }
    }
    let name = (0..).map(|i| format!("n{i}")).find(|n| g.edge_index(n).is_none()).unwrap();
    let link = edges.len();
    edges.push(Edge { name, tail: v, head: fresh });
    let graph = Graph::new(vertices, edges)?;
    let on_new = |d: Dir| side.contains(&d);
    let marking = mg
        .marking
        .iter()
        .map(|p| {
            let mut out = Vec::new();
            let mut at_new = false;
            for &d in p {
                if g.origin(d) == v && on_new(d) != at_new {
                    push_reduced(&mut out, Dir::new(link, at_new));
                }
                push_reduced(&mut out, d);
                at_new = g.terminus(d) == v && on_new(d.inv());
            }
            if at_new {
                push_reduced(&mut out, Dir::rev(link));
            }
            out
        })
        .collect();
    MarkedGraph::new(graph, (*mg.rose).clone(), mg.base, marking)
}

/// Every blow-up of every vertex of valence at least four, up to swapping
/// sides, while there are at most `cap` of them.
pub fn blow_ups(mg: &MarkedGraph, cap: usize) -> Vec<MarkedGraph> {
    let g = &mg.graph;
    let mut out = Vec::new();
    for v in 0..g.num_vertices() {
        let halves: Vec<Dir> = (0..2 * g.num_edges()).map(|i| Dir::new(i / 2, i % 2 == 1)).filter(|&d| g.origin(d) == v).collect();
        let k = halves.len();
        if !(4..=16).contains(&k) {
            continue;
        }
        // the first half-edge always stays behind
        for mask in 0u32..(1 << (k - 1)) {
            if out.len() >= cap {
                return out;
            }
            let side: Vec<Dir> = (1..k).filter(|i| mask >> (i - 1) & 1 == 1).map(|i| halves[i]).collect();
            if side.len() >= 2 && k - side.len() >= 2 {
                if let Ok(b) = blow_up(mg, v, &side) {
                    out.push(b);
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Adjacency {
    /// A co-edge-2 pair whose two one-edge collapses are the inputs.
    Adjacent(MarkedGraphPair),
    NotFoundWithinBudget,
}

/// One-edge collapse keys per natural edge: `keys[i]` belongs to `(G, G ∖ Eᵢ)`.
fn collapse_keys(mg: &MarkedGraph) -> (Vec<EdgePath>, Vec<Option<Vec<Vec<u32>>>>) {
    let naturals = natural_edges(&mg.graph);
    let keys = naturals
        .iter()
        .map(|p| {
            let mut h = vec![true; mg.graph.num_edges()];
            for d in p {
                h[d.edge()] = false;
            }
            validate_pair(mg, &h).ok().and_then(|q| OneEdgeSplitting::new(q).ok()).map(|s| s.key())
        })
        .collect();
    (naturals, keys)
}

fn co_edge_two(mg: &MarkedGraph, want: &[Vec<Vec<u32>>; 2], budget: &mut usize) -> Option<MarkedGraphPair> {
    let (naturals, keys) = collapse_keys(mg);
    for i in 0..naturals.len() {
        for j in i + 1..naturals.len() {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            let (Some(a), Some(b)) = (&keys[i], &keys[j]) else { continue };
            if !((a == &want[0] && b == &want[1]) || (a == &want[1] && b == &want[0])) {
                continue;
            }
            let mut h = vec![true; mg.graph.num_edges()];
            for d in naturals[i].iter().chain(&naturals[j]) {
                h[d.edge()] = false;
            }
            if let Ok(p) = validate_pair(mg, &h) {
                return Some(p);
            }
        }
    }
    None
}

/// Looks for a common two-edge refinement on the frames of `s1` and `s2`
/// and on their single-vertex blow-ups. `budget` bounds the number of
/// candidate pairs examined.
pub fn adjacent(s1: &OneEdgeSplitting, s2: &OneEdgeSplitting, budget: usize) -> Result<Adjacency> {
    if equivalent_one_edge(s1, s2) {
        return invalid("splittings are equivalent");
    }
    let want = [s1.key(), s2.key()];
    let mut left = budget;
    for s in [s1, s2] {
        if let Some(p) = co_edge_two(&s.pair.graph, &want, &mut left) {
            return Ok(Adjacency::Adjacent(p));
        }
    }
    for s in [s1, s2] {
        for b in blow_ups(&s.pair.graph, budget) {
            if left == 0 {
                return Ok(Adjacency::NotFoundWithinBudget);
            }
            if let Some(p) = co_edge_two(&b, &want, &mut left) {
                return Ok(Adjacency::Adjacent(p));
            }
        }
    }
    Ok(Adjacency::NotFoundWithinBudget)
}

/// Adjacent one-edge splittings: the two faces of every co-edge-2 pair
/// `(G, G ∖ (E₁ ∪ E₂))` over natural edges `E₁, E₂`, on `mg` and on up to
/// `cap` of its blow-ups, without repeats.
pub fn adjacent_pairs(mg: &MarkedGraph, cap: usize) -> Vec<(OneEdgeSplitting, OneEdgeSplitting)> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for frame in std::iter::once(mg.clone()).chain(blow_ups(mg, cap)) {
        let naturals = natural_edges(&frame.graph);
        for i in 0..naturals.len() {
            for j in i + 1..naturals.len() {
                let mut h = vec![true; frame.graph.num_edges()];
                for d in naturals[i].iter().chain(&naturals[j]) {
                    h[d.edge()] = false;
                }
                let Ok(pair) = validate_pair(&frame, &h) else { continue };
                if pair.co_edge != 2 {
                    continue;
                }
                let Ok(faces) = pair.faces() else { continue };
                let Ok(sides) = faces.into_iter().map(OneEdgeSplitting::new).collect::<Result<Vec<_>>>() else { continue };
                let Ok([a, b]) = <[OneEdgeSplitting; 2]>::try_from(sides) else { continue };
                if equivalent_one_edge(&a, &b) {
                    continue;
                }
                let key = if a.key() <= b.key() { (a.key(), b.key()) } else { (b.key(), a.key()) };
                if seen.insert(key) {
                    out.push((a, b));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Move {
    Start,
    Collapse,
    Expand,
    /// Same simplex realized on another frame.
    Equal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FsStep {
    pub frame: usize,
    pub h: Vec<String>,
    #[serde(rename = "move")]
    pub mv: Move,
}

/// A path in the first barycentric subdivision. Its length counts collapse
/// and expand steps only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FsPath {
    pub steps: Vec<FsStep>,
}

impl FsPath {
    pub fn len(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s.mv, Move::Collapse | Move::Expand)).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

type SimplexKey = Vec<Vec<Vec<u32>>>;

/// All valid pairs on a frame with their simplex keys.
fn realizations(mg: &MarkedGraph, budget: &mut usize) -> Vec<(Vec<bool>, SimplexKey)> {
    let (naturals, keys) = collapse_keys(mg);
    let k = naturals.len();
    let mut out = Vec::new();
    if k > 20 {
        return out;
    }
    for mask in 0u32..(1u32 << k) - 1 {
        if *budget == 0 {
            break;
        }
        *budget -= 1;
        let mut h = vec![false; mg.graph.num_edges()];
        for (i, p) in naturals.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for d in p {
                    h[d.edge()] = true;
                }
            }
        }
        if validate_pair(mg, &h).is_err() {
            continue;
        }
        let mut key: SimplexKey = (0..k).filter(|i| mask >> i & 1 == 0).filter_map(|i| keys[i].clone()).collect();
        key.sort();
        key.dedup();
        out.push((h, key));
    }
    out
}

/// Upper bound on the distance in FS′ from `a` to `b`, searching pairs on
/// the frames of `a`, `b`, and `extra`. Two pairs with the same simplex key
/// are the same vertex of FS′. `None` when no path was found within budget.
pub fn fs_distance_upper(a: &MarkedGraphPair, b: &MarkedGraphPair, extra: &[MarkedGraph], budget: usize) -> Option<FsPath> {
    let mut frames: Vec<&MarkedGraph> = vec![&a.graph, &b.graph];
    frames.extend(extra);
    let mut left = budget;
    let reals: Vec<Vec<(Vec<bool>, SimplexKey)>> = frames.iter().map(|f| realizations(f, &mut left)).collect();
    let mut by_key: HashMap<&SimplexKey, Vec<(usize, usize)>> = HashMap::new();
    for (fi, rs) in reals.iter().enumerate() {
        for (ri, (_, key)) in rs.iter().enumerate() {
            by_key.entry(key).or_default().push((fi, ri));
        }
    }
    let start = a.simplex_key();
    let goal = b.simplex_key();
    let names = |fi: usize, h: &[bool]| -> Vec<String> {
        (0..h.len()).filter(|&e| h[e]).map(|e| frames[fi].graph.edges[e].name.clone()).collect()
    };
    let start_steps = vec![FsStep { frame: 0, h: names(0, &a.h), mv: Move::Start }];
    if start == goal {
        return Some(FsPath { steps: start_steps });
    }
    // BFS over keys; each entry remembers the path that reached it
    let mut seen: BTreeSet<&SimplexKey> = BTreeSet::new();
    let start_ref = by_key.keys().find(|k| ***k == start).copied()?;
    seen.insert(start_ref);
    let mut queue: VecDeque<(&SimplexKey, (usize, usize), Vec<FsStep>)> = VecDeque::new();
    let first = by_key[start_ref].iter().find(|&&(fi, ri)| fi == 0 && reals[fi][ri].0 == a.h).copied()?;
    queue.push_back((start_ref, first, start_steps));
    while let Some((key, arrived, steps)) = queue.pop_front() {
        for &(fi, ri) in &by_key[key] {
            let mut base_steps = steps.clone();
            if (fi, ri) != arrived {
                base_steps.push(FsStep { frame: fi, h: names(fi, &reals[fi][ri].0), mv: Move::Equal });
            }
            let h = &reals[fi][ri].0;
            for (h2, k2) in &reals[fi] {
                let sub = h2.iter().zip(h).all(|(x, y)| !*x || *y);
                let sup = h.iter().zip(h2).all(|(x, y)| !*x || *y);
                if h2 == h || !(sub || sup) || seen.contains(k2) {
                    continue;
                }
                seen.insert(k2);
                let mut s = base_steps.clone();
                // a larger subgraph is a face: moving to it collapses
                s.push(FsStep { frame: fi, h: names(fi, h2), mv: if sup { Move::Collapse } else { Move::Expand } });
                if *k2 == goal {
                    return Some(FsPath { steps: s });
                }
                let ri2 = reals[fi].iter().position(|(x, _)| x == h2).unwrap();
                queue.push_back((k2, (fi, ri2), s));
            }
        }
    }
    None
}
