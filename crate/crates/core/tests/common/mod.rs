#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use fsplit::word::{push_reduced, CyclicWord, Dir};

/// Canonical classes of cyclically reduced words of length `1..=max_len`
/// over `n` letters.
pub fn canonical_words(n: usize, max_len: usize) -> Vec<CyclicWord> {
    let mut out = HashSet::new();
    let mut layer: Vec<Vec<Dir>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for a in 0..2 * n as u32 {
                let d = Dir(a);
                if w.last() == Some(&d.inv()) {
                    continue;
                }
                let mut v = w.clone();
                v.push(d);
                if v[0] != d.inv() {
                    out.insert(CyclicWord::new(&v));
                }
                next.push(v);
            }
        }
        layer = next;
    }
    let mut v: Vec<CyclicWord> = out.into_iter().collect();
    v.sort();
    v
}

fn substitute(images: &[Vec<Dir>], w: &[Dir]) -> Vec<Dir> {
    let mut out = Vec::new();
    for &d in w {
        let img = &images[d.edge()];
        if d.is_rev() {
            img.iter().rev().for_each(|x| push_reduced(&mut out, x.inv()));
        } else {
            img.iter().for_each(|&x| push_reduced(&mut out, x));
        }
    }
    out
}

/// Right and left transvections `x_i ↦ x_i x_j^±`, `x_i ↦ x_j^± x_i`.
pub fn transvections(n: usize) -> Vec<Vec<Vec<Dir>>> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for rev in [false, true] {
                for left in [false, true] {
                    let mut images: Vec<Vec<Dir>> = (0..n).map(|k| vec![Dir::fwd(k)]).collect();
                    images[i] = if left { vec![Dir::new(j, rev), Dir::fwd(i)] } else { vec![Dir::fwd(i), Dir::new(j, rev)] };
                    out.push(images);
                }
            }
        }
    }
    out
}

/// Every type II Whitehead automorphism `(A, a)`: `a ↦ a`, and each other
/// letter `x` becomes `a⁻¹ x` if `x⁻¹ ∈ A`, then `· a` if `x ∈ A`.
pub fn whitehead_automorphisms(n: usize) -> Vec<Vec<Vec<Dir>>> {
    let mut out = Vec::new();
    for a in 0..2 * n as u32 {
        let a = Dir(a);
        let others: Vec<Dir> = (0..2 * n as u32).map(Dir).filter(|d| d.edge() != a.edge()).collect();
        for mask in 0u32..1 << others.len() {
            let in_a = |d: Dir| others.iter().position(|&o| o == d).is_some_and(|i| mask >> i & 1 == 1);
            let images = (0..n)
                .map(|k| {
                    let x = Dir::fwd(k);
                    if k == a.edge() {
                        return vec![x];
                    }
                    let mut w = Vec::new();
                    if in_a(x.inv()) {
                        w.push(a.inv());
                    }
                    w.push(x);
                    if in_a(x) {
                        w.push(a);
                    }
                    w
                })
                .collect();
            out.push(images);
        }
    }
    out
}

pub fn apply(images: &[Vec<Dir>], w: &[Dir]) -> Vec<Dir> {
    substitute(images, w)
}

/// Brute force: by Whitehead's peak reduction, the classes reachable from `c`
/// by Whitehead automorphisms without ever exceeding `|c|` include every
/// minimal-length representative of the orbit. `c` lies in a proper free
/// factor iff one of those misses a letter. Returns that representative and
/// the composite automorphism sending `c` to it.
pub fn in_proper_factor(n: usize, c: &CyclicWord) -> Option<(CyclicWord, Vec<Vec<Dir>>)> {
    let id: Vec<Vec<Dir>> = (0..n).map(|k| vec![Dir::fwd(k)]).collect();
    if c.is_empty() {
        return Some((c.clone(), id));
    }
    let moves = whitehead_automorphisms(n);
    let misses = |w: &CyclicWord| (0..n).any(|x| w.letters().iter().all(|d| d.edge() != x));
    let mut seen = HashSet::from([c.clone()]);
    let mut queue = VecDeque::from([(c.clone(), id)]);
    while let Some((w, phi)) = queue.pop_front() {
        if misses(&w) {
            return Some((w, phi));
        }
        for m in &moves {
            let v = CyclicWord::new(&substitute(m, w.letters()));
            if v.len() <= c.len() && seen.insert(v.clone()) {
                let composed = (0..n).map(|k| substitute(m, &phi[k])).collect();
                queue.push_back((v, composed));
            }
        }
    }
    None
}
