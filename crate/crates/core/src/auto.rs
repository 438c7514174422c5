//! Automorphisms of the rose: inversion by Nielsen reduction, equality in
//! Out(F_n), and homotopy inverses of markings.

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{EdgePath, Graph, GraphMap};
use crate::word::{concat, cyclic_core, inverse, reduce, CyclicWord, Dir};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum OuterEq {
    /// `g(x) = u f(x) u⁻¹` for every basis letter.
    Equal { conjugator: EdgePath },
    Distinct { reason: String },
    Unknown,
}

impl OuterEq {
    pub fn is_equal(&self) -> bool {
        matches!(self, OuterEq::Equal { .. })
    }
}

fn abelianize(w: &[Dir], n: usize) -> Vec<i64> {
    let mut v = vec![0i64; n];
    for d in w {
        v[d.edge()] += if d.is_rev() { -1 } else { 1 };
    }
    v
}

/// Conjugators `u` with `u a u⁻¹ = b` (as reduced words), parametrized by the
/// centralizer of `a`. Returns `(u0, centralizer generator)` or `None` when
/// `a` and `b` are not conjugate.
fn conjugator_family(a: &[Dir], b: &[Dir]) -> Option<(EdgePath, EdgePath)> {
    let (p, ca) = cyclic_core(a);
    let (q, cb) = cyclic_core(b);
    if ca.len() != cb.len() {
        return None;
    }
    if ca.is_empty() {
        return Some((Vec::new(), Vec::new()));
    }
    let n = ca.len();
    // cb = ca[r..] ca[..r] = ā1 ca a1 with a1 = ca[..r]
    let r = (0..n).find(|&r| ca[r..].iter().chain(ca[..r].iter()).eq(cb.iter()))?;
    let a1 = &ca[..r];
    // b = q cb q̄ = (q ā1 p̄) a (p a1 q̄)
    let u0 = reduce(&concat(&concat(q, &inverse(a1)), &inverse(p)));
    let period = (1..=n).find(|&t| n % t == 0 && (0..n).all(|i| ca[i] == ca[(i + t) % n])).unwrap();
    let root = reduce(&concat(&concat(p, &ca[..period]), &inverse(p)));
    Some((u0, root))
}

fn conj(u: &[Dir], w: &[Dir]) -> EdgePath {
    reduce(&concat(&concat(u, w), &inverse(u)))
}

fn power(w: &[Dir], k: i64) -> EdgePath {
    let base = if k < 0 { inverse(w) } else { w.to_vec() };
    let mut out = Vec::new();
    for _ in 0..k.unsigned_abs() {
        out = reduce(&concat(&out, &base));
    }
    out
}

/// Decides whether two rose endomorphisms agree in Out(F_n). `Distinct` is
/// only returned on a sound certificate; the conjugator search along the
/// centralizer is limited to `|k| ≤ budget`.
pub fn outer_equal(f: &GraphMap, g: &GraphMap, budget: usize) -> OuterEq {
    let n = f.images.len();
    if g.images.len() != n || !f.source.is_rose() || !g.source.is_rose() {
        return OuterEq::Distinct { reason: "maps live on different roses".into() };
    }
    for i in 0..n {
        if abelianize(&f.images[i], n) != abelianize(&g.images[i], n) {
            return OuterEq::Distinct { reason: format!("abelianizations differ on letter {i}") };
        }
    }
    let mut tests: Vec<EdgePath> = (0..n).map(|i| vec![Dir::fwd(i)]).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            tests.push(vec![Dir::fwd(i), Dir::fwd(j)]);
            tests.push(vec![Dir::fwd(i), Dir::rev(j)]);
        }
    }
    for t in &tests {
        let a = f.map_word_unchecked(t);
        let b = g.map_word_unchecked(t);
        if CyclicWord::new(&a) != CyclicWord::new(&b) {
            return OuterEq::Distinct { reason: "conjugacy classes of images differ".into() };
        }
    }
    let Some(i0) = (0..n).find(|&i| !f.images[i].is_empty()) else {
        // every image trivial on both sides
        return OuterEq::Equal { conjugator: Vec::new() };
    };
    let Some((u0, root)) = conjugator_family(&f.images[i0], &g.images[i0]) else {
        return OuterEq::Distinct { reason: format!("image of letter {i0} not conjugate with matching orientation") };
    };
    let works = |u: &[Dir]| (0..n).all(|i| conj(u, &f.images[i]) == g.images[i]);
    if root.is_empty() {
        return if works(&u0) { OuterEq::Equal { conjugator: u0 } } else { OuterEq::Unknown };
    }
    for k in 0..=budget as i64 {
        for s in [k, -k] {
            let u = reduce(&concat(&u0, &power(&root, s)));
            if works(&u) {
                return OuterEq::Equal { conjugator: u };
            }
            if k == 0 {
                break;
            }
        }
    }
    OuterEq::Unknown
}

/// Elementary Nielsen move on slot `i`: `t_i ← t_i t_j^ε` (`right`) or
/// `t_i ← t_j^ε t_i`.
#[derive(Clone, Copy, Debug)]
struct Move {
    i: usize,
    j: usize,
    inv: bool,
    right: bool,
}

fn apply(tuple: &[EdgePath], m: Move) -> EdgePath {
    let tj = if m.inv { inverse(&tuple[m.j]) } else { tuple[m.j].clone() };
    if m.right {
        reduce(&concat(&tuple[m.i], &tj))
    } else {
        reduce(&concat(&tj, &tuple[m.i]))
    }
}

fn moves(n: usize) -> Vec<Move> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                for inv in [false, true] {
                    for right in [true, false] {
                        out.push(Move { i, j, inv, right });
                    }
                }
            }
        }
    }
    out
}

fn total(t: &[EdgePath]) -> usize {
    t.iter().map(Vec::len).sum()
}

fn is_signed_basis(t: &[EdgePath]) -> bool {
    let mut seen = vec![false; t.len()];
    t.iter().all(|w| {
        w.len() == 1 && w[0].edge() < seen.len() && !std::mem::replace(&mut seen[w[0].edge()], true)
    })
}

/// Inverts the automorphism `x_i ↦ images[i]` of F_n, returning the images
/// of the inverse.
pub fn invert_images(images: &[EdgePath]) -> Result<Vec<EdgePath>> {
    let n = images.len();
    let mut t: Vec<EdgePath> = images.iter().map(|w| reduce(w)).collect();
    // track[i] is the word w with f(w) = t[i]
    let mut track: Vec<EdgePath> = (0..n).map(|i| vec![Dir::fwd(i)]).collect();
    let all = moves(n);
    let mut guard = 0usize;
    while !is_signed_basis(&t) {
        guard += 1;
        if guard > 100_000 {
            return Err(Error::BudgetExhausted("Nielsen reduction did not terminate".into()));
        }
        if t.iter().any(Vec::is_empty) {
            return invalid("not an automorphism: a generator maps to the identity");
        }
        let cur = total(&t);
        let best = all
            .iter()
            .map(|&m| (m, apply(&t, m)))
            .filter(|(m, w)| w.len() < t[m.i].len())
            .min_by_key(|(m, w)| (cur - t[m.i].len() + w.len(), m.i, m.j, m.inv, !m.right));
        if let Some((m, w)) = best {
            t[m.i] = w;
            track[m.i] = apply(&track, m);
            continue;
        }
        // stuck: look for a reducing move after length-preserving ones
        match plateau_search(&t, &track, &all)? {
            Some((nt, ntrack)) => {
                t = nt;
                track = ntrack;
            }
            None => return invalid("not an automorphism: Nielsen reduction stopped short of a basis"),
        }
    }
    let mut inv = vec![Vec::new(); n];
    for i in 0..n {
        let d = t[i][0];
        inv[d.edge()] = if d.is_rev() { inverse(&track[i]) } else { track[i].clone() };
    }
    Ok(inv)
}

type State = (Vec<EdgePath>, Vec<EdgePath>);

fn plateau_search(t: &[EdgePath], track: &[EdgePath], all: &[Move]) -> Result<Option<State>> {
    let cur = total(t);
    let mut seen: HashSet<Vec<EdgePath>> = HashSet::new();
    let mut queue: VecDeque<State> = VecDeque::new();
    seen.insert(t.to_vec());
    queue.push_back((t.to_vec(), track.to_vec()));
    while let Some((s, tr)) = queue.pop_front() {
        if seen.len() > 20_000 {
            return Err(Error::BudgetExhausted("Nielsen plateau search".into()));
        }
        for &m in all {
            let w = apply(&s, m);
            let mut ns = s.clone();
            ns[m.i] = w;
            let tot = total(&ns);
            if tot > cur || ns[m.i].is_empty() {
                continue;
            }
            let mut ntr = tr.clone();
            ntr[m.i] = apply(&tr, m);
            if tot < cur || is_signed_basis(&ns) {
                return Ok(Some((ns, ntr)));
            }
            if seen.insert(ns.clone()) {
                queue.push_back((ns, ntr));
            }
        }
    }
    Ok(None)
}

/// The inverse of a rose automorphism, as a map of the same rose.
pub fn invert_automorphism(f: &GraphMap) -> Result<GraphMap> {
    if !f.source.is_rose() || !f.is_endo() {
        return invalid("invert_automorphism needs a self-map of a rose");
    }
    let inv = invert_images(&f.images)?;
    Ok(GraphMap::endo_unchecked(f.source.clone(), inv))
}

/// Homotopy inverse of a marking `x_i ↦ marking[i]`: collapse a spanning tree
/// at `base`, read the marking in the resulting basis of π₁(G, base), and
/// invert.
pub(crate) fn marking_inverse(graph: &Graph, rose: &Graph, base: usize, marking: &[EdgePath]) -> Result<Vec<EdgePath>> {
    let n = rose.num_edges();
    let all = vec![true; graph.num_edges()];
    let tp = graph.tree_paths(base, &all);
    if tp.iter().any(Option::is_none) {
        return invalid("graph is not connected");
    }
    let mut tree = vec![false; graph.num_edges()];
    for p in tp.iter().flatten() {
        if let Some(d) = p.last() {
            tree[d.edge()] = true;
        }
    }
    let cotree: Vec<usize> = (0..graph.num_edges()).filter(|&e| !tree[e]).collect();
    if cotree.len() != n {
        return invalid(format!("graph has rank {} but the marking has {} letters", cotree.len(), n));
    }
    let slot = |e: usize| cotree.iter().position(|&c| c == e);
    let psi: Vec<EdgePath> = marking
        .iter()
        .map(|w| {
            reduce(
                &w.iter()
                    .filter_map(|d| slot(d.edge()).map(|s| Dir::new(s, d.is_rev())))
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    let psi_inv = invert_images(&psi).map_err(|e| match e {
        Error::InvalidInput(m) => Error::InvalidInput(format!("marking is not a homotopy equivalence: {m}")),
        other => other,
    })?;
    Ok((0..graph.num_edges())
        .map(|e| match slot(e) {
            Some(s) => psi_inv[s].clone(),
            None => Vec::new(),
        })
        .collect())
}

/// Elementary automorphism `x_i ↦ x_i x_j^{±1}` of the rose with `n` letters.
pub fn elementary(rose: Arc<Graph>, i: usize, j: usize, inv: bool) -> GraphMap {
    let n = rose.num_edges();
    let mut images: Vec<EdgePath> = (0..n).map(|k| vec![Dir::fwd(k)]).collect();
    images[i].push(Dir::new(j, inv));
    GraphMap::endo_unchecked(rose, images)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rose(n: usize) -> Arc<Graph> {
        let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        Arc::new(Graph::rose(&names))
    }

    #[test]
    fn outer_equal_identities() {
        let r = rose(2);
        let id = GraphMap::identity(r.clone());
        assert!(outer_equal(&id, &id, 8).is_equal());
        // conjugate by x0
        let c = GraphMap::endo_unchecked(
            r.clone(),
            vec![vec![Dir::fwd(0)], vec![Dir::fwd(0), Dir::fwd(1), Dir::rev(0)]],
        );
        match outer_equal(&id, &c, 8) {
            OuterEq::Equal { conjugator } => assert_eq!(conjugator, vec![Dir::fwd(0)]),
            other => panic!("{other:?}"),
        }
        let t = elementary(r, 0, 1, false);
        assert!(matches!(outer_equal(&t, &id, 8), OuterEq::Distinct { .. }));
    }

    #[test]
    fn invert_elementary() {
        let r = rose(2);
        let t = elementary(r.clone(), 0, 1, false);
        let inv = invert_automorphism(&t).unwrap();
        assert_eq!(inv.images[0], vec![Dir::fwd(0), Dir::rev(1)]);
        assert_eq!(inv.images[1], vec![Dir::fwd(1)]);
    }

    #[test]
    fn invert_rejects_non_automorphism() {
        let r = rose(2);
        let f = GraphMap::endo_unchecked(r, vec![vec![Dir::fwd(0), Dir::fwd(0)], vec![Dir::fwd(1)]]);
        assert!(matches!(invert_automorphism(&f), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn invert_long_product() {
        let r = rose(3);
        let mut f = GraphMap::identity(r.clone());
        for (i, j, inv) in [(0, 1, false), (1, 2, true), (2, 0, false), (0, 2, false), (1, 0, true), (0, 1, false)] {
            f = elementary(r.clone(), i, j, inv).compose(&f).unwrap();
        }
        let g = invert_automorphism(&f).unwrap();
        assert!(outer_equal(&f.compose(&g).unwrap(), &GraphMap::identity(r.clone()), 4).is_equal());
        assert!(outer_equal(&g.compose(&f).unwrap(), &GraphMap::identity(r), 4).is_equal());
    }
}
