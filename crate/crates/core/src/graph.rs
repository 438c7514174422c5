//! Finite graphs, marked graphs, and graph maps given by edge-path images.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::word::{push_reduced, reduce, CyclicWord, Dir};

pub type EdgePath = Vec<Dir>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub name: String,
    pub tail: usize,
    pub head: usize,
}

/// A finite graph with oriented edges. Edge `e` runs `tail -> head`;
/// `Dir::rev(e)` runs the other way.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
}

impl Graph {
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>) -> Result<Graph> {
        for e in &edges {
            if e.tail >= vertices.len() || e.head >= vertices.len() {
                return invalid(format!("edge {} has an unknown endpoint", e.name));
            }
            if e.name.is_empty() || e.name.contains('\'') || e.name.contains(char::is_whitespace) {
                return invalid(format!("bad edge name {:?}", e.name));
            }
        }
        for (i, e) in edges.iter().enumerate() {
            if edges[..i].iter().any(|o| o.name == e.name) {
                return invalid(format!("duplicate edge name {}", e.name));
            }
        }
        Ok(Graph { vertices, edges })
    }

    /// The rose with one vertex `v` and a loop per name.
    pub fn rose<S: AsRef<str>>(names: &[S]) -> Graph {
        Graph {
            vertices: vec!["v".to_string()],
            edges: names
                .iter()
                .map(|n| Edge { name: n.as_ref().to_string(), tail: 0, head: 0 })
                .collect(),
        }
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_rose(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn rank(&self) -> usize {
        // connected graphs only
        self.edges.len() + 1 - self.vertices.len()
    }

    #[inline]
    pub fn origin(&self, d: Dir) -> usize {
        let e = &self.edges[d.edge()];
        if d.is_rev() {
            e.head
        } else {
            e.tail
        }
    }

    #[inline]
    pub fn terminus(&self, d: Dir) -> usize {
        self.origin(d.inv())
    }

    pub fn valence(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| (e.tail == v) as usize + (e.head == v) as usize)
            .sum()
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.name == name)
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    /// Parses `A` or `A'` (reversed).
    pub fn parse_dir(&self, tok: &str) -> Result<Dir> {
        let (name, rev) = match tok.strip_suffix('\'') {
            Some(n) => (n, true),
            None => (tok, false),
        };
        match self.edge_index(name) {
            Some(e) => Ok(Dir::new(e, rev)),
            None => invalid(format!("unknown edge {tok}")),
        }
    }

    pub fn parse_word(&self, s: &str) -> Result<EdgePath> {
        s.split_whitespace().map(|t| self.parse_dir(t)).collect()
    }

    pub fn dir_name(&self, d: Dir) -> String {
        let n = &self.edges[d.edge()].name;
        if d.is_rev() {
            format!("{n}'")
        } else {
            n.clone()
        }
    }

    pub fn word_string(&self, w: &[Dir]) -> String {
        w.iter().map(|&d| self.dir_name(d)).collect::<Vec<_>>().join(" ")
    }

    pub fn check_path(&self, p: &[Dir]) -> Result<()> {
        for d in p {
            if d.edge() >= self.edges.len() {
                return invalid(format!("edge id {} out of range", d.edge()));
            }
        }
        for w in p.windows(2) {
            if self.terminus(w[0]) != self.origin(w[1]) {
                return invalid(format!(
                    "path not endpoint-compatible at {} {}",
                    self.dir_name(w[0]),
                    self.dir_name(w[1])
                ));
            }
        }
        Ok(())
    }

    pub fn is_closed(&self, p: &[Dir]) -> bool {
        p.is_empty() || self.origin(p[0]) == self.terminus(*p.last().unwrap())
    }

    /// Reduced path homotopic rel endpoints to `p`.
    pub fn tighten(&self, p: &[Dir]) -> Result<EdgePath> {
        self.check_path(p)?;
        Ok(reduce(p))
    }

    pub fn cyclic(&self, p: &[Dir]) -> Result<CyclicWord> {
        self.check_path(p)?;
        if !self.is_closed(p) {
            return invalid("path is not closed");
        }
        Ok(CyclicWord::new(p))
    }

    /// Paths from `root` to every vertex inside the subgraph `edges`, along a
    /// BFS spanning tree. `None` for vertices not reached.
    pub fn tree_paths(&self, root: usize, edges: &[bool]) -> Vec<Option<EdgePath>> {
        let mut paths: Vec<Option<EdgePath>> = vec![None; self.vertices.len()];
        paths[root] = Some(Vec::new());
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for (e, edge) in self.edges.iter().enumerate() {
                if !edges[e] {
                    continue;
                }
                for d in [Dir::fwd(e), Dir::rev(e)] {
                    if self.origin(d) == v && paths[self.terminus(d)].is_none() {
                        let mut p = paths[v].clone().unwrap();
                        p.push(d);
                        paths[self.terminus(d)] = Some(p);
                        queue.push_back(self.terminus(d));
                    }
                }
                let _ = edge;
            }
        }
        paths
    }

    /// Connected components of the subgraph `edges`, as (vertex set, edge set).
    /// Isolated vertices not touched by `edges` are omitted.
    /// The core of a subgraph: prunes edges at vertices of valence one in
    /// the subgraph until none remain.
    pub fn core_of(&self, edges: &[bool]) -> Vec<bool> {
        let mut keep = edges.to_vec();
        loop {
            let mut deg = vec![0usize; self.vertices.len()];
            for (e, ed) in self.edges.iter().enumerate() {
                if keep[e] {
                    deg[ed.tail] += 1;
                    deg[ed.head] += 1;
                }
            }
            let mut changed = false;
            for (e, ed) in self.edges.iter().enumerate() {
                if keep[e] && (deg[ed.tail] == 1 || deg[ed.head] == 1) {
                    keep[e] = false;
                    changed = true;
                }
            }
            if !changed {
                return keep;
            }
        }
    }

    pub fn components(&self, edges: &[bool]) -> Vec<(Vec<usize>, Vec<usize>)> {
        let mut comp = vec![usize::MAX; self.vertices.len()];
        let mut out = Vec::new();
        for e in 0..self.edges.len() {
            if !edges[e] || comp[self.edges[e].tail] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut verts = Vec::new();
            let mut stack = vec![self.edges[e].tail];
            comp[self.edges[e].tail] = id;
            while let Some(v) = stack.pop() {
                verts.push(v);
                for (f, ed) in self.edges.iter().enumerate() {
                    if !edges[f] {
                        continue;
                    }
                    for (a, b) in [(ed.tail, ed.head), (ed.head, ed.tail)] {
                        if a == v && comp[b] == usize::MAX {
                            comp[b] = id;
                            stack.push(b);
                        }
                    }
                }
            }
            verts.sort_unstable();
            out.push((verts, Vec::new()));
        }
        for e in 0..self.edges.len() {
            if edges[e] {
                out[comp[self.edges[e].tail]].1.push(e);
            }
        }
        out
    }
}

/// A graph with a marking from the rose: `marking[i]` is the closed path at
/// `base` that basis letter `i` maps to, and `marking_inv[e]` is the rose word
/// that edge `e` maps to under a homotopy inverse (all vertices go to the rose
/// vertex).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedGraph {
    pub graph: Arc<Graph>,
    pub rose: Arc<Graph>,
    pub base: usize,
    pub marking: Vec<EdgePath>,
    pub marking_inv: Vec<EdgePath>,
}

impl MarkedGraph {
    /// The rose marked by the identity.
    pub fn rose<S: AsRef<str>>(names: &[S]) -> MarkedGraph {
        let g = Arc::new(Graph::rose(names));
        let id: Vec<EdgePath> = (0..names.len()).map(|i| vec![Dir::fwd(i)]).collect();
        MarkedGraph { graph: g.clone(), rose: g, base: 0, marking: id.clone(), marking_inv: id }
    }

    /// Builds a marked graph from the forward marking, computing the homotopy
    /// inverse. Fails unless the marking is a homotopy equivalence.
    pub fn new(graph: Graph, rose: Graph, base: usize, marking: Vec<EdgePath>) -> Result<MarkedGraph> {
        if !rose.is_rose() {
            return invalid("marking source must be a rose");
        }
        if marking.len() != rose.num_edges() {
            return invalid("marking must assign a path to every basis letter");
        }
        for v in 0..graph.num_vertices() {
            if graph.valence(v) < 2 {
                return invalid(format!("vertex {} has valence < 2", graph.vertices[v]));
            }
        }
        let mut mk = Vec::with_capacity(marking.len());
        for p in &marking {
            graph.check_path(p)?;
            if !p.is_empty() && (graph.origin(p[0]) != base || graph.terminus(*p.last().unwrap()) != base) {
                return invalid("marking paths must be closed at the base vertex");
            }
            mk.push(reduce(p));
        }
        let marking_inv = crate::auto::marking_inverse(&graph, &rose, base, &mk)?;
        Ok(MarkedGraph { graph: Arc::new(graph), rose: Arc::new(rose), base, marking: mk, marking_inv })
    }

    pub fn rank(&self) -> usize {
        self.rose.num_edges()
    }

    /// Image in the rose of a path of this graph.
    pub fn to_rose(&self, p: &[Dir]) -> EdgePath {
        let mut out = Vec::new();
        for &d in p {
            let img = &self.marking_inv[d.edge()];
            if d.is_rev() {
                for &x in img.iter().rev() {
                    push_reduced(&mut out, x.inv());
                }
            } else {
                for &x in img {
                    push_reduced(&mut out, x);
                }
            }
        }
        out
    }

    /// Image in this graph of a rose word (a closed path at `base`).
    pub fn from_rose(&self, w: &[Dir]) -> EdgePath {
        let mut out = Vec::new();
        for &d in w {
            let img = &self.marking[d.edge()];
            if d.is_rev() {
                for &x in img.iter().rev() {
                    push_reduced(&mut out, x.inv());
                }
            } else {
                for &x in img {
                    push_reduced(&mut out, x);
                }
            }
        }
        out
    }

    /// The rose endomorphism `x ↦ marking_inv(marking(x))`; inner iff the
    /// stored inverse is correct.
    pub fn round_trip(&self) -> GraphMap {
        let images = (0..self.rank()).map(|i| self.to_rose(&self.marking[i])).collect();
        GraphMap::endo_unchecked(self.rose.clone(), images)
    }

    /// The rose automorphism represented by a self-map `f` of this graph.
    pub fn outer_of(&self, f: &GraphMap) -> Result<GraphMap> {
        if *f.source != *self.graph || *f.target != *self.graph {
            return invalid("map is not a self-map of the marked graph");
        }
        let mut images = Vec::with_capacity(self.rank());
        for p in &self.marking {
            let q = f.map_path(p)?;
            // move back to the base vertex along the tree
            let v = f.vmap[self.base];
            let tp = self.graph.tree_paths(self.base, &vec![true; self.graph.num_edges()]);
            let conn = tp[v].clone().ok_or_else(|| Error::InvalidInput("graph not connected".into()))?;
            let mut loop_ = conn.clone();
            for &d in &q {
                push_reduced(&mut loop_, d);
            }
            for &d in conn.iter().rev() {
                push_reduced(&mut loop_, d.inv());
            }
            images.push(self.to_rose(&loop_));
        }
        Ok(GraphMap::endo_unchecked(self.rose.clone(), images))
    }

    /// The marked graph `G^f`: same graph, marking `f ∘ ρ`. `phi_inv` is the
    /// inverse of the rose automorphism `f` represents (computed if absent).
    pub fn remark(&self, f: &GraphMap, phi_inv: Option<&GraphMap>) -> Result<MarkedGraph> {
        let phi = self.outer_of(f)?;
        let inv = match phi_inv {
            Some(g) => g.clone(),
            None => crate::auto::invert_automorphism(&phi)?,
        };
        let v = f.vmap[self.base];
        let tp = self.graph.tree_paths(v, &vec![true; self.graph.num_edges()]);
        let back = tp[self.base].clone().ok_or_else(|| Error::InvalidInput("graph not connected".into()))?;
        // new marking: x ↦ [tree path base→f(base)]⁻¹ ... conjugated to stay based at `base`
        let mut marking = Vec::with_capacity(self.rank());
        for p in &self.marking {
            let q = f.map_path(p)?;
            let mut l = Vec::new();
            for &d in back.iter().rev() {
                push_reduced(&mut l, d.inv());
            }
            for &d in &q {
                push_reduced(&mut l, d);
            }
            for &d in &back {
                push_reduced(&mut l, d);
            }
            marking.push(l);
        }
        let marking_inv = self.marking_inv.iter().map(|w| inv.map_path(w).expect("rose word")).collect();
        Ok(MarkedGraph { graph: self.graph.clone(), rose: self.rose.clone(), base: self.base, marking, marking_inv })
    }
}

/// A map between graphs: vertex assignment plus a reduced edge-path image
/// for every edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphMap {
    pub source: Arc<Graph>,
    pub target: Arc<Graph>,
    pub vmap: Vec<usize>,
    pub images: Vec<EdgePath>,
}

impl GraphMap {
    pub fn new(source: Arc<Graph>, target: Arc<Graph>, vmap: Vec<usize>, images: Vec<EdgePath>) -> Result<GraphMap> {
        if vmap.len() != source.num_vertices() || images.len() != source.num_edges() {
            return invalid("map must assign every vertex and edge");
        }
        if vmap.iter().any(|&v| v >= target.num_vertices()) {
            return invalid("vertex image out of range");
        }
        let mut imgs = Vec::with_capacity(images.len());
        for (e, img) in images.iter().enumerate() {
            target.check_path(img)?;
            let edge = &source.edges[e];
            let (s, t) = (vmap[edge.tail], vmap[edge.head]);
            let ok = if img.is_empty() {
                s == t
            } else {
                target.origin(img[0]) == s && target.terminus(*img.last().unwrap()) == t
            };
            if !ok {
                return invalid(format!("image of {} does not match the vertex assignment", edge.name));
            }
            imgs.push(reduce(img));
        }
        Ok(GraphMap { source, target, vmap, images: imgs })
    }

    /// Endomorphism of a rose; every word is a closed path so no checks needed.
    pub fn endo_unchecked(rose: Arc<Graph>, images: Vec<EdgePath>) -> GraphMap {
        let images = images.iter().map(|w| reduce(w)).collect();
        GraphMap { source: rose.clone(), target: rose, vmap: vec![0], images }
    }

    pub fn endo(graph: Arc<Graph>, vmap: Vec<usize>, images: Vec<EdgePath>) -> Result<GraphMap> {
        GraphMap::new(graph.clone(), graph, vmap, images)
    }

    pub fn identity(graph: Arc<Graph>) -> GraphMap {
        let n = graph.num_edges();
        GraphMap {
            vmap: (0..graph.num_vertices()).collect(),
            images: (0..n).map(|e| vec![Dir::fwd(e)]).collect(),
            source: graph.clone(),
            target: graph,
        }
    }

    pub fn is_endo(&self) -> bool {
        self.source == self.target || *self.source == *self.target
    }

    fn push_image(&self, out: &mut Vec<Dir>, d: Dir) {
        let img = &self.images[d.edge()];
        if d.is_rev() {
            for &x in img.iter().rev() {
                push_reduced(out, x.inv());
            }
        } else {
            for &x in img {
                push_reduced(out, x);
            }
        }
    }

    /// `f_#`: the tightened image of a path.
    pub fn map_path(&self, p: &[Dir]) -> Result<EdgePath> {
        self.source.check_path(p)?;
        let mut out = Vec::with_capacity(p.len() * 2);
        for &d in p {
            self.push_image(&mut out, d);
        }
        Ok(out)
    }

    pub(crate) fn map_word_unchecked(&self, p: &[Dir]) -> EdgePath {
        let mut out = Vec::with_capacity(p.len() * 2);
        for &d in p {
            self.push_image(&mut out, d);
        }
        out
    }

    pub fn map_circuit(&self, c: &CyclicWord) -> Result<CyclicWord> {
        let img = self.map_path(c.letters())?;
        Ok(CyclicWord::new(&img))
    }

    pub(crate) fn map_circuit_unchecked(&self, c: &CyclicWord) -> CyclicWord {
        CyclicWord::new(&self.map_word_unchecked(c.letters()))
    }

    /// `k`-fold `f_#`, failing once an intermediate path exceeds `cap` letters.
    pub fn iterate_path(&self, p: &[Dir], k: usize, cap: usize) -> Result<EdgePath> {
        if !self.is_endo() && k > 0 {
            return invalid("iteration needs an endomorphism");
        }
        self.source.check_path(p)?;
        let mut cur = reduce(p);
        for i in 0..k {
            cur = self.map_word_unchecked(&cur);
            if cur.len() > cap {
                return Err(Error::BudgetExhausted(format!(
                    "iterate {} reached {} letters (cap {cap})",
                    i + 1,
                    cur.len()
                )));
            }
        }
        Ok(cur)
    }

    pub fn iterate_circuit(&self, c: &CyclicWord, k: usize, cap: usize) -> Result<CyclicWord> {
        if !self.is_endo() && k > 0 {
            return invalid("iteration needs an endomorphism");
        }
        self.source.check_path(c.letters())?;
        let mut cur = c.clone();
        for i in 0..k {
            cur = self.map_circuit_unchecked(&cur);
            if cur.len() > cap {
                return Err(Error::BudgetExhausted(format!(
                    "iterate {} reached {} letters (cap {cap})",
                    i + 1,
                    cur.len()
                )));
            }
        }
        Ok(cur)
    }

    /// `self ∘ g`: edge images are `self_#(g(E))`.
    pub fn compose(&self, g: &GraphMap) -> Result<GraphMap> {
        if *g.target != *self.source {
            return invalid("compose: target of the inner map is not the source of the outer map");
        }
        let images = g.images.iter().map(|img| self.map_word_unchecked(img)).collect();
        let vmap = g.vmap.iter().map(|&v| self.vmap[v]).collect();
        Ok(GraphMap { source: g.source.clone(), target: self.target.clone(), vmap, images })
    }

    pub fn power(&self, k: usize) -> Result<GraphMap> {
        let mut out = GraphMap::identity(self.source.clone());
        for _ in 0..k {
            out = self.compose(&out)?;
        }
        Ok(out)
    }

    pub fn image_of(&self, d: Dir) -> EdgePath {
        let mut out = Vec::new();
        self.push_image(&mut out, d);
        out
    }

    /// True iff every edge of `h` maps to a path inside `h`.
    pub fn is_invariant_subgraph(&self, h: &[bool]) -> bool {
        (0..self.images.len())
            .filter(|&e| h[e])
            .all(|e| self.images[e].iter().all(|d| h[d.edge()]))
    }

    /// `true` iff `f_#(p) = p`; the endpoints of `p` must be fixed.
    pub fn is_nielsen(&self, p: &[Dir]) -> Result<bool> {
        self.source.check_path(p)?;
        if let (Some(first), Some(last)) = (p.first(), p.last()) {
            let (s, t) = (self.source.origin(*first), self.source.terminus(*last));
            if self.vmap[s] != s || self.vmap[t] != t {
                return invalid("endpoints of the path are not fixed");
            }
        }
        Ok(self.map_path(p)? == reduce(p))
    }

    /// True iff `f_#` fixes the circuit class of the closed path `p`.
    pub fn fixes_class(&self, c: &CyclicWord) -> Result<bool> {
        Ok(self.map_circuit(c)? == *c)
    }

    /// Number of letters of `edges` crossed by `p`.
    pub fn count_in(p: &[Dir], edges: &[bool]) -> usize {
        p.iter().filter(|d| edges[d.edge()]).count()
    }
}
