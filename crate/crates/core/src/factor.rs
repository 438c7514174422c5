//! Subgroups as folded core graphs over the rose, and free factor systems
//! built from them.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::word::{cyclically_reduce, CyclicWord, Dir};

const NONE: u32 = u32::MAX;

/// A connected folded graph labelled by rose letters. `trans[v][d]` is the
/// endpoint of the edge leaving `v` with label `d` (indexed by `Dir::index`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoreGraph {
    pub rank_n: usize,
    pub trans: Vec<Vec<u32>>,
}

struct Folder {
    parent: Vec<usize>,
    trans: Vec<HashMap<Dir, usize>>,
    pending: Vec<(usize, usize)>,
}

impl Folder {
    fn new() -> Folder {
        Folder { parent: vec![0], trans: vec![HashMap::new()], pending: Vec::new() }
    }

    fn vertex(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.trans.push(HashMap::new());
        self.parent.len() - 1
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn link(&mut self, u: usize, d: Dir, v: usize) {
        let u = self.find(u);
        let v = self.find(v);
        match self.trans[u].get(&d).copied() {
            Some(w) => self.pending.push((v, w)),
            None => {
                self.trans[u].insert(d, v);
                match self.trans[v].get(&d.inv()).copied() {
                    Some(w) => self.pending.push((u, w)),
                    None => {
                        self.trans[v].insert(d.inv(), u);
                    }
                }
            }
        }
        self.drain();
    }

    fn drain(&mut self) {
        while let Some((a, b)) = self.pending.pop() {
            let (a, b) = (self.find(a), self.find(b));
            if a == b {
                continue;
            }
            self.parent[b] = a;
            let moved: Vec<(Dir, usize)> = self.trans[b].drain().collect();
            for (d, t) in moved {
                let t = self.find(t);
                match self.trans[a].get(&d).copied() {
                    Some(w) => self.pending.push((t, w)),
                    None => {
                        self.trans[a].insert(d, t);
                    }
                }
            }
        }
    }
}

impl CoreGraph {
    /// Stallings fold of the bouquet of `generators`, reduced to its core.
    /// The trivial subgroup gives the empty graph.
    pub fn fold(rank_n: usize, generators: &[Vec<Dir>]) -> Result<CoreGraph> {
        let mut f = Folder::new();
        for g in generators {
            if g.is_empty() {
                return invalid("empty generator");
            }
            if g.iter().any(|d| d.edge() >= rank_n) {
                return invalid("generator letter out of range");
            }
            let mut cur = 0;
            for (i, &d) in g.iter().enumerate() {
                let next = if i + 1 == g.len() { 0 } else { f.vertex() };
                f.link(cur, d, next);
                cur = next;
            }
        }
        let mut trans: Vec<Vec<u32>> = Vec::new();
        let mut id: HashMap<usize, usize> = HashMap::new();
        for v in 0..f.parent.len() {
            if f.find(v) == v {
                id.insert(v, trans.len());
                trans.push(vec![NONE; 2 * rank_n]);
            }
        }
        for v in 0..f.parent.len() {
            if f.find(v) != v {
                continue;
            }
            let entries: Vec<(Dir, usize)> = f.trans[v].iter().map(|(&d, &t)| (d, t)).collect();
            for (d, t) in entries {
                let t = f.find(t);
                trans[id[&v]][d.index()] = id[&t] as u32;
            }
        }
        Ok(CoreGraph { rank_n, trans }.core())
    }

    /// Removes valence-one vertices until none remain.
    fn core(mut self) -> CoreGraph {
        let n = self.trans.len();
        let mut alive = vec![true; n];
        let deg = |t: &Vec<u32>| t.iter().filter(|&&x| x != NONE).count();
        let mut queue: Vec<usize> = (0..n).filter(|&v| deg(&self.trans[v]) <= 1).collect();
        while let Some(v) = queue.pop() {
            if !alive[v] {
                continue;
            }
            alive[v] = false;
            for i in 0..self.trans[v].len() {
                let t = self.trans[v][i];
                if t != NONE {
                    self.trans[t as usize][i ^ 1] = NONE;
                    self.trans[v][i] = NONE;
                    if alive[t as usize] && deg(&self.trans[t as usize]) <= 1 {
                        queue.push(t as usize);
                    }
                }
            }
        }
        let mut id = vec![NONE; n];
        let mut k = 0;
        for v in 0..n {
            if alive[v] {
                id[v] = k;
                k += 1;
            }
        }
        let trans = (0..n)
            .filter(|&v| alive[v])
            .map(|v| self.trans[v].iter().map(|&t| if t == NONE { NONE } else { id[t as usize] }).collect())
            .collect();
        CoreGraph { rank_n: self.rank_n, trans }
    }

    pub fn num_vertices(&self) -> usize {
        self.trans.len()
    }

    pub fn num_edges(&self) -> usize {
        self.trans.iter().flatten().filter(|&&t| t != NONE).count() / 2
    }

    pub fn rank(&self) -> usize {
        if self.trans.is_empty() {
            0
        } else {
            self.num_edges() + 1 - self.num_vertices()
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.trans.is_empty()
    }

    #[inline]
    pub fn step(&self, v: usize, d: Dir) -> Option<usize> {
        let t = self.trans[v][d.index()];
        (t != NONE).then_some(t as usize)
    }

    /// True iff the class of `c` is represented by a loop in this graph.
    pub fn carries(&self, c: &CyclicWord) -> bool {
        if c.is_empty() {
            return true;
        }
        (0..self.num_vertices()).any(|v| self.read(v, c.letters()) == Some(v))
    }

    fn read(&self, mut v: usize, w: &[Dir]) -> Option<usize> {
        for &d in w {
            v = self.step(v, d)?;
        }
        Some(v)
    }

    fn encode_from(&self, start: usize) -> Vec<u32> {
        let n = self.num_vertices();
        let mut id = vec![NONE; n];
        let mut order = vec![start];
        id[start] = 0;
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            for &t in &self.trans[v] {
                if t != NONE && id[t as usize] == NONE {
                    id[t as usize] = order.len() as u32;
                    order.push(t as usize);
                }
            }
            i += 1;
        }
        let mut out = Vec::with_capacity(n * 2 * self.rank_n);
        for &v in &order {
            out.extend(self.trans[v].iter().map(|&t| if t == NONE { NONE } else { id[t as usize] }));
        }
        out
    }

    /// Isomorphism invariant of the labelled graph; equal forms mean
    /// conjugate subgroups.
    pub fn canonical_form(&self) -> Vec<u32> {
        let n = self.num_vertices();
        if n == 0 {
            return Vec::new();
        }
        let natural: Vec<usize> = (0..n).filter(|&v| self.valence(v) >= 3).collect();
        if !natural.is_empty() {
            return natural.into_iter().map(|v| self.encode_from(v)).min().unwrap();
        }
        // a circle: start where it reads its canonical cyclic word; any two
        // such vertices differ by a rotation of the graph
        let (_, w, _) = self.natural_edges().remove(0);
        let canon = CyclicWord::new(&w);
        let i = crate::word::least_rotation(&w);
        let fwd: Vec<Dir> = w[i..].iter().chain(&w[..i]).copied().collect();
        let steps = if fwd == canon.letters() {
            i
        } else {
            let inv = crate::word::inverse(&w);
            (w.len() - crate::word::least_rotation(&inv)) % w.len()
        };
        let start = self.read(0, &w[..steps]).expect("the loop is readable");
        self.encode_from(start)
    }

    /// Components of the fibre product with `other`, each reduced to its core,
    /// trivial ones dropped.
    pub fn pullback(&self, other: &CoreGraph) -> Vec<CoreGraph> {
        let (n1, n2) = (self.num_vertices(), other.num_vertices());
        let idx = |a: usize, b: usize| a * n2 + b;
        let total = n1 * n2;
        let mut comp = vec![usize::MAX; total];
        let mut out = Vec::new();
        for s in 0..total {
            if comp[s] != usize::MAX {
                continue;
            }
            let mut verts = vec![s];
            comp[s] = out.len();
            let mut i = 0;
            while i < verts.len() {
                let (a, b) = (verts[i] / n2, verts[i] % n2);
                for d in 0..2 * self.rank_n {
                    let (ta, tb) = (self.trans[a][d], other.trans[b][d]);
                    if ta != NONE && tb != NONE {
                        let t = idx(ta as usize, tb as usize);
                        if comp[t] == usize::MAX {
                            comp[t] = out.len();
                            verts.push(t);
                        }
                    }
                }
                i += 1;
            }
            let local: HashMap<usize, u32> = verts.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
            let trans = verts
                .iter()
                .map(|&v| {
                    let (a, b) = (v / n2, v % n2);
                    (0..2 * self.rank_n)
                        .map(|d| {
                            let (ta, tb) = (self.trans[a][d], other.trans[b][d]);
                            if ta != NONE && tb != NONE {
                                local[&idx(ta as usize, tb as usize)]
                            } else {
                                NONE
                            }
                        })
                        .collect()
                })
                .collect();
            out.push(CoreGraph { rank_n: self.rank_n, trans });
        }
        out.into_iter().map(CoreGraph::core).filter(|c| !c.is_trivial()).collect()
    }

    /// True iff this subgroup is conjugate into `other`.
    pub fn conjugate_into(&self, other: &CoreGraph) -> bool {
        let me = self.canonical_form();
        self.pullback(other).iter().any(|c| c.canonical_form() == me)
    }

    /// Valence of `v` (loops count twice).
    pub fn valence(&self, v: usize) -> usize {
        self.trans[v].iter().filter(|&&t| t != NONE).count()
    }

    /// Edge paths between natural vertices (valence ≥ 3), as letter words,
    /// with start and end vertices. A circle yields one loop.
    pub fn natural_edges(&self) -> Vec<(usize, Vec<Dir>, usize)> {
        let nat: Vec<bool> = (0..self.num_vertices()).map(|v| self.valence(v) >= 3).collect();
        if self.is_trivial() {
            return Vec::new();
        }
        if !nat.iter().any(|&b| b) {
            // a circle: read it from vertex 0 in the direction of the least label
            let d0 = (0..2 * self.rank_n).find(|&d| self.trans[0][d] != NONE).unwrap();
            let mut w = vec![Dir(d0 as u32)];
            let mut prev = Dir(d0 as u32);
            let mut v = self.trans[0][d0] as usize;
            while v != 0 {
                let d = (0..2 * self.rank_n)
                    .map(|d| Dir(d as u32))
                    .find(|&d| d != prev.inv() && self.step(v, d).is_some())
                    .unwrap();
                w.push(d);
                prev = d;
                v = self.step(v, d).unwrap();
            }
            return vec![(0, w, 0)];
        }
        let mut out = Vec::new();
        let mut used: BTreeSet<(usize, usize)> = BTreeSet::new();
        for v in 0..self.num_vertices() {
            if !nat[v] {
                continue;
            }
            for d0 in 0..2 * self.rank_n {
                if self.trans[v][d0] == NONE || used.contains(&(v, d0)) {
                    continue;
                }
                let mut w = vec![Dir(d0 as u32)];
                let mut prev = Dir(d0 as u32);
                let mut u = self.trans[v][d0] as usize;
                while !nat[u] {
                    let d = (0..2 * self.rank_n)
                        .map(|d| Dir(d as u32))
                        .find(|&d| d != prev.inv() && self.step(u, d).is_some())
                        .unwrap();
                    w.push(d);
                    prev = d;
                    u = self.step(u, d).unwrap();
                }
                used.insert((v, d0));
                used.insert((u, prev.inv().index()));
                out.push((v, w, u));
            }
        }
        out
    }
}

/// A free factor system: conjugacy classes of subgroups given by core graphs,
/// sorted by canonical form and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FreeFactorSystem {
    pub rank_n: usize,
    pub comps: Vec<CoreGraph>,
}

impl FreeFactorSystem {
    pub fn new(rank_n: usize, comps: Vec<CoreGraph>) -> FreeFactorSystem {
        let mut keyed: Vec<(Vec<u32>, CoreGraph)> =
            comps.into_iter().filter(|c| !c.is_trivial()).map(|c| (c.canonical_form(), c)).collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        keyed.dedup_by(|a, b| a.0 == b.0);
        FreeFactorSystem { rank_n, comps: keyed.into_iter().map(|(_, c)| c).collect() }
    }

    /// One component per generator list.
    pub fn from_generators(rank_n: usize, groups: &[Vec<Vec<Dir>>]) -> Result<FreeFactorSystem> {
        let comps = groups.iter().map(|g| CoreGraph::fold(rank_n, g)).collect::<Result<Vec<_>>>()?;
        Ok(FreeFactorSystem::new(rank_n, comps))
    }

    /// The factor generated by a subset of basis letters.
    pub fn letters(rank_n: usize, groups: &[Vec<usize>]) -> FreeFactorSystem {
        let gens: Vec<Vec<Vec<Dir>>> =
            groups.iter().map(|g| g.iter().map(|&l| vec![Dir::fwd(l)]).collect()).collect();
        FreeFactorSystem::from_generators(rank_n, &gens).expect("letter generators are valid")
    }

    pub fn whole(rank_n: usize) -> FreeFactorSystem {
        FreeFactorSystem::letters(rank_n, &[(0..rank_n).collect()])
    }

    pub fn empty(rank_n: usize) -> FreeFactorSystem {
        FreeFactorSystem { rank_n, comps: Vec::new() }
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.comps.iter().map(CoreGraph::rank).collect()
    }

    pub fn is_proper(&self) -> bool {
        !(self.comps.len() == 1 && self.comps[0].rank() == self.rank_n)
    }

    pub fn carries(&self, c: &CyclicWord) -> bool {
        self.comps.iter().any(|a| a.carries(c))
    }

    pub fn canonical_forms(&self) -> Vec<Vec<u32>> {
        self.comps.iter().map(CoreGraph::canonical_form).collect()
    }

    /// Components of all pairwise pullbacks.
    pub fn meet(&self, other: &FreeFactorSystem) -> FreeFactorSystem {
        let mut comps = Vec::new();
        for a in &self.comps {
            for b in &other.comps {
                comps.extend(a.pullback(b));
            }
        }
        FreeFactorSystem::new(self.rank_n, comps)
    }

    /// `self ⊑ other`: every component conjugates into some component.
    pub fn le(&self, other: &FreeFactorSystem) -> bool {
        self.comps.iter().all(|a| other.comps.iter().any(|b| a.conjugate_into(b)))
    }

    /// `(n − Σ rᵢ) + (p − 1)`.
    pub fn co_edge_number(&self) -> Result<usize> {
        if !self.is_proper() {
            return invalid("co-edge number needs a proper free factor system");
        }
        if self.comps.is_empty() {
            return invalid("co-edge number needs at least one component");
        }
        let sum: usize = self.ranks().iter().sum();
        if sum > self.rank_n {
            return invalid("component ranks exceed the ambient rank");
        }
        Ok(self.rank_n - sum + self.comps.len() - 1)
    }

    /// Image of each component under the automorphism `x_i ↦ images[i]`.
    pub fn apply(&self, images: &[Vec<Dir>]) -> Result<FreeFactorSystem> {
        self.apply_into(self.rank_n, images)
    }

    /// Image under the homomorphism `F_r → F_target` given by `images`.
    pub fn apply_into(&self, target: usize, images: &[Vec<Dir>]) -> Result<FreeFactorSystem> {
        let comps = self
            .comps
            .iter()
            .map(|c| {
                let gens: Vec<Vec<Dir>> = c
                    .generators()
                    .iter()
                    .map(|g| {
                        let mut out = Vec::new();
                        for &d in g {
                            let img = &images[d.edge()];
                            if d.is_rev() {
                                for &x in img.iter().rev() {
                                    crate::word::push_reduced(&mut out, x.inv());
                                }
                            } else {
                                for &x in img {
                                    crate::word::push_reduced(&mut out, x);
                                }
                            }
                        }
                        out
                    })
                    .collect();
                CoreGraph::fold(target, &gens)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FreeFactorSystem::new(target, comps))
    }

    /// Classes of natural-edge length `1..=len` carried by the system.
    pub fn candidate_classes(&self, len: usize) -> BTreeSet<CyclicWord> {
        let mut out = BTreeSet::new();
        for c in &self.comps {
            c.closed_natural_loops(len, &mut out);
        }
        out
    }
}

impl CoreGraph {
    /// BFS tree from vertex 0: the tree dart into each vertex, and the
    /// forward non-tree darts in generator order.
    fn spanning(&self) -> (Vec<Option<(usize, usize)>>, Vec<(usize, usize)>) {
        let n = self.num_vertices();
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut order = vec![0];
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            for d in 0..2 * self.rank_n {
                let t = self.trans[v][d];
                if t != NONE && !seen[t as usize] {
                    seen[t as usize] = true;
                    parent[t as usize] = Some((v, d));
                    order.push(t as usize);
                }
            }
            i += 1;
        }
        let is_tree = |v: usize, d: usize| {
            let t = self.trans[v][d] as usize;
            parent[t] == Some((v, d)) || parent[v] == Some((t, d ^ 1))
        };
        let mut cotree = Vec::new();
        for v in 0..n {
            for d in (0..2 * self.rank_n).step_by(2) {
                if self.trans[v][d] != NONE && !is_tree(v, d) {
                    cotree.push((v, d));
                }
            }
        }
        (parent, cotree)
    }

    fn tree_path(parent: &[Option<(usize, usize)>], mut v: usize) -> Vec<Dir> {
        let mut p = Vec::new();
        while let Some((u, d)) = parent[v] {
            p.push(Dir(d as u32));
            v = u;
        }
        p.reverse();
        p
    }

    /// A free basis of π₁ at vertex 0, as reduced words.
    pub fn generators(&self) -> Vec<Vec<Dir>> {
        if self.num_vertices() == 0 {
            return Vec::new();
        }
        let (parent, cotree) = self.spanning();
        cotree
            .iter()
            .map(|&(v, d)| {
                let t = self.trans[v][d] as usize;
                let mut w = Self::tree_path(&parent, v);
                w.push(Dir(d as u32));
                for &x in Self::tree_path(&parent, t).iter().rev() {
                    crate::word::push_reduced(&mut w, x.inv());
                }
                w
            })
            .collect()
    }

    /// A carried class rewritten in the basis returned by `generators`.
    pub fn express(&self, c: &CyclicWord) -> Option<Vec<Dir>> {
        if self.num_vertices() == 0 {
            return None;
        }
        let start = (0..self.num_vertices()).find(|&v| self.read(v, c.letters()) == Some(v))?;
        let (parent, cotree) = self.spanning();
        let index: HashMap<(usize, usize), usize> = cotree.iter().enumerate().map(|(k, &e)| (e, k)).collect();
        let lead = Self::tree_path(&parent, start);
        let mut walk = lead.clone();
        walk.extend_from_slice(c.letters());
        walk.extend(lead.iter().rev().map(|d| d.inv()));
        let mut out = Vec::new();
        let mut v = 0;
        for d in walk {
            let fwd = if d.is_rev() { (self.trans[v][d.index()] as usize, d.index() ^ 1) } else { (v, d.index()) };
            if let Some(&k) = index.get(&fwd) {
                crate::word::push_reduced(&mut out, Dir::new(k, d.is_rev()));
            }
            v = self.step(v, d)?;
        }
        Some(out)
    }

    fn closed_natural_loops(&self, len: usize, out: &mut BTreeSet<CyclicWord>) {
        if len == 0 {
            return;
        }
        let nat = self.natural_edges();
        // oriented natural edges: (start, word, end, id, reversed)
        let mut arcs: Vec<(usize, Vec<Dir>, usize, usize)> = Vec::new();
        for (k, (s, w, t)) in nat.iter().enumerate() {
            arcs.push((*s, w.clone(), *t, 2 * k));
            arcs.push((*t, crate::word::inverse(w), *s, 2 * k + 1));
        }
        let mut stack: Vec<usize> = Vec::new();
        fn rec(
            arcs: &[(usize, Vec<Dir>, usize, usize)],
            stack: &mut Vec<usize>,
            len: usize,
            out: &mut BTreeSet<CyclicWord>,
        ) {
            let first = stack[0];
            let last = *stack.last().unwrap();
            if arcs[last].2 == arcs[first].0 && arcs[last].3 != arcs[first].3 ^ 1 {
                let w: Vec<Dir> = stack.iter().flat_map(|&a| arcs[a].1.iter().copied()).collect();
                let c = cyclically_reduce(&w);
                if c.len() == w.len() {
                    out.insert(CyclicWord::new(&w));
                }
            }
            if stack.len() == len {
                return;
            }
            for a in 0..arcs.len() {
                if arcs[a].0 == arcs[last].2 && arcs[a].3 != arcs[last].3 ^ 1 {
                    stack.push(a);
                    rec(arcs, stack, len, out);
                    stack.pop();
                }
            }
        }
        for a in 0..arcs.len() {
            stack.push(a);
            rec(&arcs, &mut stack, len, out);
            stack.pop();
        }
    }
}
