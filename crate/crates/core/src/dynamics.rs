//! Transition matrices, invariant filtrations, and Perron–Frobenius growth.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::GraphMap;

pub const EG_THRESHOLD: f64 = 1.0 + 1e-9;
const PF_TOL: f64 = 1e-13;
const PF_CAP: usize = 100_000;

/// `m[e][e2]` counts how often the image of `e2` crosses `e`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionMatrix {
    pub m: Vec<Vec<u64>>,
}

impl TransitionMatrix {
    pub fn of(f: &GraphMap) -> TransitionMatrix {
        let n = f.images.len();
        let mut m = vec![vec![0u64; n]; n];
        for (e2, img) in f.images.iter().enumerate() {
            for d in img {
                m[d.edge()][e2] += 1;
            }
        }
        TransitionMatrix { m }
    }

    pub fn size(&self) -> usize {
        self.m.len()
    }

    /// Principal submatrix on `edges`, in the given order.
    pub fn block(&self, edges: &[usize]) -> TransitionMatrix {
        TransitionMatrix { m: edges.iter().map(|&i| edges.iter().map(|&j| self.m[i][j]).collect()).collect() }
    }

    pub fn mul(&self, other: &TransitionMatrix) -> TransitionMatrix {
        let n = self.size();
        let mut m = vec![vec![0u64; n]; n];
        for i in 0..n {
            for k in 0..n {
                if self.m[i][k] != 0 {
                    for j in 0..n {
                        m[i][j] += self.m[i][k] * other.m[k][j];
                    }
                }
            }
        }
        TransitionMatrix { m }
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().flatten().all(|&x| x == 0)
    }
}

/// Spectral radius of a nonnegative matrix, by power iteration on `M + I`
/// with Collatz–Wielandt brackets.
pub fn pf_eigenvalue(block: &TransitionMatrix) -> Result<f64> {
    let n = block.size();
    if n == 0 {
        return Ok(0.0);
    }
    if block.m.iter().any(|r| r.len() != n) {
        return invalid("matrix is not square");
    }
    let a: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| block.m[i][j] as f64 + if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut x = vec![1.0f64; n];
    for _ in 0..PF_CAP {
        let y: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[i][j] * x[j]).sum()).collect();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            if x[i] > 0.0 {
                let r = y[i] / x[i];
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
        if hi - lo <= PF_TOL * hi.max(1.0) {
            return Ok((lo + hi) / 2.0 - 1.0);
        }
        let norm = y.iter().cloned().fold(0.0, f64::max);
        x = y.iter().map(|v| v / norm).collect();
    }
    Err(Error::NumericalTolerance(format!("power iteration did not converge in {PF_CAP} steps")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StratumKind {
    Fixed,
    Zero,
    Neg,
    Eg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stratum {
    pub edges: Vec<usize>,
    pub kind: StratumKind,
    pub pf: f64,
}

/// Strata listed bottom-up; the union of the first `i + 1` is invariant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Filtration {
    pub strata: Vec<Stratum>,
    pub num_edges: usize,
}

impl Filtration {
    pub fn subgraph(&self, i: usize) -> Vec<bool> {
        let mut mask = vec![false; self.num_edges];
        for s in &self.strata[..=i] {
            for &e in &s.edges {
                mask[e] = true;
            }
        }
        mask
    }

    pub fn eg_strata(&self) -> Vec<usize> {
        (0..self.strata.len()).filter(|&i| self.strata[i].kind == StratumKind::Eg).collect()
    }

    pub fn kinds(&self) -> Vec<StratumKind> {
        self.strata.iter().map(|s| s.kind).collect()
    }
}

fn tarjan(adj: &[Vec<usize>]) -> Vec<usize> {
    // iterative Tarjan; returns component id per node
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let (mut next, mut ncomp) = (0, 0);
    for s in 0..n {
        if index[s] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(s, 0)];
        index[s] = next;
        low[s] = next;
        next += 1;
        stack.push(s);
        on[s] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < adj[v].len() {
                let w = adj[v][*pos];
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on[w] = true;
                    call.push((w, 0));
                } else if on[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}

/// The filtration by strongly connected blocks of the edge-dependency
/// digraph, ordered so images of lower strata stay lower. Consecutive
/// FIXED blocks are merged.
pub fn strata(f: &GraphMap) -> Result<Filtration> {
    if !f.is_endo() {
        return invalid("strata needs an endomorphism");
    }
    let n = f.images.len();
    let tm = TransitionMatrix::of(f);
    // e -> e' when the image of e crosses e'
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|e| f.images[e].iter().map(|d| d.edge()).collect::<BTreeSet<_>>().into_iter().collect())
        .collect();
    let comp = tarjan(&adj);
    let nc = comp.iter().copied().max().map_or(0, |m| m + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); nc];
    for e in 0..n {
        members[comp[e]].push(e);
    }
    // block c must come after every block its images touch
    let mut deps: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nc];
    for e in 0..n {
        for &e2 in &adj[e] {
            if comp[e2] != comp[e] {
                deps[comp[e]].insert(comp[e2]);
            }
        }
    }
    let mut placed = vec![false; nc];
    let mut order = Vec::with_capacity(nc);
    while order.len() < nc {
        let next = (0..nc)
            .filter(|&c| !placed[c] && deps[c].iter().all(|&d| placed[d]))
            .min_by_key(|&c| members[c][0])
            .expect("condensation is acyclic");
        placed[next] = true;
        order.push(next);
    }
    let mut out: Vec<Stratum> = Vec::new();
    for c in order {
        let edges = members[c].clone();
        let block = tm.block(&edges);
        let fixed = edges.iter().all(|&e| f.images[e] == vec![crate::word::Dir::fwd(e)]);
        let (kind, pf) = if fixed {
            (StratumKind::Fixed, 1.0)
        } else if block.is_zero() {
            (StratumKind::Zero, 0.0)
        } else {
            let pf = pf_eigenvalue(&block)?;
            (if pf > EG_THRESHOLD { StratumKind::Eg } else { StratumKind::Neg }, pf)
        };
        match out.last_mut() {
            Some(last) if kind == StratumKind::Fixed && last.kind == StratumKind::Fixed => {
                last.edges.extend(edges);
                last.edges.sort_unstable();
            }
            _ => out.push(Stratum { edges, kind, pf }),
        }
    }
    Ok(Filtration { strata: out, num_edges: n })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Least `p ≤ 12` such that `f^p` fixes every edge that `f` permutes up to
/// orientation within a non-EG stratum. `None` if no such `p ≤ 12`.
pub fn rotationless_power(f: &GraphMap) -> Result<Option<usize>> {
    let filt = strata(f)?;
    let mut p = 1usize;
    for s in filt.strata.iter().filter(|s| s.kind != StratumKind::Eg) {
        for &e in &s.edges {
            // follow e under the edge permutation, if the stratum permutes it
            let mut cur = crate::word::Dir::fwd(e);
            let mut len = 0;
            loop {
                let img = f.image_of(cur);
                let Some(&d) = img.iter().find(|d| s.edges.contains(&d.edge())) else { break };
                if img.iter().filter(|d| s.edges.contains(&d.edge())).count() != 1 {
                    break;
                }
                cur = d;
                len += 1;
                if cur == crate::word::Dir::fwd(e) || len > 2 * s.edges.len() {
                    break;
                }
            }
            if cur == crate::word::Dir::fwd(e) && len > 0 {
                p = p / gcd(p, len) * len;
            }
        }
    }
    Ok((p <= 12).then_some(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use std::sync::Arc;

    fn tm(rows: &[&[u64]]) -> TransitionMatrix {
        TransitionMatrix { m: rows.iter().map(|r| r.to_vec()).collect() }
    }

    #[test]
    fn pf_examples() {
        let v = pf_eigenvalue(&tm(&[&[1, 1], &[2, 3]])).unwrap();
        assert!((v - (2.0 + 3f64.sqrt())).abs() < 1e-9);
        assert!((pf_eigenvalue(&tm(&[&[1, 0], &[0, 1]])).unwrap() - 1.0).abs() < 1e-9);
        assert!((pf_eigenvalue(&tm(&[&[0, 1], &[1, 0]])).unwrap() - 1.0).abs() < 1e-9);
        assert!(pf_eigenvalue(&tm(&[&[0]])).unwrap().abs() < 1e-9);
    }

    #[test]
    fn identity_is_one_fixed_stratum() {
        let g = Arc::new(Graph::rose(&["x", "y", "z"]));
        let f = GraphMap::identity(g);
        let filt = strata(&f).unwrap();
        assert_eq!(filt.kinds(), vec![StratumKind::Fixed]);
        assert_eq!(filt.strata[0].edges, vec![0, 1, 2]);
        assert_eq!(rotationless_power(&f).unwrap(), Some(1));
    }

    #[test]
    fn permutation_needs_a_power() {
        let g = Arc::new(Graph::rose(&["x", "y", "z"]));
        let w = |s: &str| g.parse_word(s).unwrap();
        let f = GraphMap::endo_unchecked(g.clone(), vec![w("y"), w("z'"), w("x")]);
        let filt = strata(&f).unwrap();
        assert_eq!(filt.kinds(), vec![StratumKind::Neg]);
        assert_eq!(rotationless_power(&f).unwrap(), Some(6));
        let f6 = f.power(6).unwrap();
        assert_eq!(strata(&f6).unwrap().kinds(), vec![StratumKind::Fixed]);
    }
}
