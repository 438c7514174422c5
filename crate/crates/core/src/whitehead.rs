//! Whitehead graphs, Whitehead automorphisms, and the fills test.
//!
//! The Whitehead graph of a set of cyclic words has a vertex per letter
//! `x^±1` and an edge `{x, ȳ}` for every cyclically consecutive pair `x y`.
//! The Whitehead automorphism `(A, a)` fixes `a` and sends any other letter
//! `z` to `ā^[z̄∈A] z a^[z∈A]`; it changes total length by
//! `cap(A, Aᶜ) − deg(a)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::FreeFactorSystem;
use crate::word::{push_reduced, CyclicWord, Dir};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub moves: usize,
    pub letters: usize,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget { moves: 100_000, letters: 10_000 }
    }
}

/// A Whitehead automorphism: `set` is a bitmask over `Dir::index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WhMove {
    pub set: u64,
    pub mult: Dir,
}

impl WhMove {
    pub fn images(&self, n: usize) -> Vec<Vec<Dir>> {
        (0..n)
            .map(|x| {
                let z = Dir::fwd(x);
                if x == self.mult.edge() {
                    return vec![z];
                }
                let mut w = Vec::with_capacity(3);
                if self.set >> z.inv().index() & 1 == 1 {
                    w.push(self.mult.inv());
                }
                w.push(z);
                if self.set >> z.index() & 1 == 1 {
                    w.push(self.mult);
                }
                w
            })
            .collect()
    }

    pub fn inverse(&self) -> WhMove {
        let a = self.mult;
        WhMove { set: (self.set & !(1 << a.index())) | (1 << a.inv().index()), mult: a.inv() }
    }
}

pub fn substitute(images: &[Vec<Dir>], w: &[Dir]) -> Vec<Dir> {
    let mut out = Vec::with_capacity(w.len() * 2);
    for &d in w {
        let img = &images[d.edge()];
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

pub fn apply_move(m: &WhMove, n: usize, words: &[CyclicWord]) -> Vec<CyclicWord> {
    let img = m.images(n);
    words.iter().map(|c| CyclicWord::new(&substitute(&img, c.letters()))).collect()
}

fn total(words: &[CyclicWord]) -> usize {
    words.iter().map(CyclicWord::len).sum()
}

/// Edge multiplicities of the Whitehead graph, indexed by `Dir::index`.
pub fn whitehead_graph(n: usize, words: &[CyclicWord]) -> Vec<Vec<u32>> {
    let mut g = vec![vec![0u32; 2 * n]; 2 * n];
    for c in words {
        let w = c.letters();
        for i in 0..w.len() {
            let (x, y) = (w[i], w[(i + 1) % w.len()].inv());
            g[x.index()][y.index()] += 1;
            g[y.index()][x.index()] += 1;
        }
    }
    g
}

fn components(g: &[Vec<u32>], removed: Option<usize>) -> Vec<Vec<usize>> {
    let v = g.len();
    let mut seen = vec![false; v];
    let mut out = Vec::new();
    for s in 0..v {
        if seen[s] || Some(s) == removed {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            let u = comp[i];
            for t in 0..v {
                if g[u][t] > 0 && !seen[t] && Some(t) != removed {
                    seen[t] = true;
                    comp.push(t);
                }
            }
            i += 1;
        }
        out.push(comp);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimized {
    pub words: Vec<CyclicWord>,
    pub total: usize,
    pub log: Vec<WhMove>,
}

/// Greedy descent over all Whitehead automorphisms, taking at each step the
/// largest decrease, ties broken by `(multiplier, set)`.
pub fn whitehead_minimize(n: usize, words: &[CyclicWord], budget: Budget) -> Result<Minimized> {
    if words.is_empty() {
        return Err(Error::InvalidInput("empty word set".into()));
    }
    if n > 30 {
        return Err(Error::InvalidInput("rank too large for exhaustive Whitehead moves".into()));
    }
    let mut cur: Vec<CyclicWord> = words.to_vec();
    let mut log = Vec::new();
    let mut spent = 0usize;
    loop {
        let t = total(&cur);
        let mut best: Option<(usize, WhMove)> = None;
        for a in 0..2 * n {
            let others: Vec<usize> = (0..2 * n).filter(|&z| z != a && z != a ^ 1).collect();
            for bits in 0u64..(1 << others.len()) {
                let mut set = 1u64 << a;
                for (k, &z) in others.iter().enumerate() {
                    if bits >> k & 1 == 1 {
                        set |= 1 << z;
                    }
                }
                spent += 1;
                if spent > budget.moves {
                    return Err(Error::BudgetExhausted(format!("whitehead_minimize spent {spent} moves")));
                }
                let m = WhMove { set, mult: Dir(a as u32) };
                let d = delta(n, &cur, &m);
                if d < 0 {
                    let nt = (t as i64 + d) as usize;
                    if best.is_none_or(|(bt, bm)| nt < bt || (nt == bt && (m.mult, m.set) < (bm.mult, bm.set))) {
                        best = Some((nt, m));
                    }
                }
            }
        }
        match best {
            Some((_, m)) => {
                cur = apply_move(&m, n, &cur);
                log.push(m);
            }
            None => break,
        }
    }
    cur.sort();
    Ok(Minimized { total: total(&cur), words: cur, log })
}

/// Length change of a move, from the Whitehead graph.
pub fn delta(n: usize, words: &[CyclicWord], m: &WhMove) -> i64 {
    let g = whitehead_graph(n, words);
    let inside = |z: usize| m.set >> z & 1 == 1;
    let mut cap = 0i64;
    for u in 0..2 * n {
        for v in 0..2 * n {
            if u < v && inside(u) != inside(v) {
                cap += g[u][v] as i64;
            }
        }
    }
    let deg: i64 = g[m.mult.index()].iter().map(|&x| x as i64).sum();
    cap - deg
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FillsVerdict {
    /// The reduced words and their Whitehead graph size as a certificate.
    Fills { words: Vec<CyclicWord>, graph_edges: usize, log: Vec<WhMove> },
    ProperFactor { witness: FreeFactorSystem, log: Vec<WhMove> },
    Unknown { reason: String },
}

impl FillsVerdict {
    pub fn is_fills(&self) -> bool {
        matches!(self, FillsVerdict::Fills { .. })
    }

    pub fn is_proper(&self) -> bool {
        matches!(self, FillsVerdict::ProperFactor { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            FillsVerdict::Fills { .. } => "Fills",
            FillsVerdict::ProperFactor { .. } => "ProperFactor",
            FillsVerdict::Unknown { .. } => "Unknown",
        }
    }
}

enum Step {
    Fills,
    Move(WhMove),
    Witness(Vec<Vec<usize>>),
}

/// One step of the cut-vertex descent.
fn inspect(n: usize, words: &[CyclicWord]) -> Step {
    let g = whitehead_graph(n, words);
    let used: Vec<usize> = (0..n).filter(|&x| g[2 * x].iter().any(|&c| c > 0)).collect();
    if used.len() < n {
        return Step::Witness(vec![used]);
    }
    let comps = components(&g, None);
    if comps.len() == 1 {
        for a in 0..2 * n {
            let rest = components(&g, Some(a));
            if rest.len() > 1 {
                let c = rest.iter().find(|c| !c.contains(&(a ^ 1))).expect("one side misses ā");
                let mut set = 1u64 << a;
                for &z in c {
                    set |= 1 << z;
                }
                return Step::Move(WhMove { set, mult: Dir(a as u32) });
            }
        }
        return Step::Fills;
    }
    for c in &comps {
        if let Some(&x) = c.iter().find(|&&x| !c.contains(&(x ^ 1))) {
            let set = c.iter().fold(0u64, |s, &z| s | 1 << z);
            return Step::Move(WhMove { set, mult: Dir(x as u32) });
        }
    }
    // every component is closed under inversion: letters split into groups
    let groups = comps
        .iter()
        .map(|c| {
            let mut g: Vec<usize> = c.iter().filter(|&&z| z % 2 == 0).map(|&z| z / 2).collect();
            g.sort_unstable();
            g
        })
        .collect();
    Step::Witness(groups)
}

/// Decides whether the classes fill `F_n`, or finds a proper free factor
/// system carrying all of them.
pub fn fills(n: usize, words: &[CyclicWord], budget: Budget) -> FillsVerdict {
    let mut cur: Vec<CyclicWord> = words.iter().filter(|c| !c.is_empty()).cloned().collect();
    if cur.is_empty() {
        return FillsVerdict::ProperFactor { witness: FreeFactorSystem::empty(n), log: Vec::new() };
    }
    if n > 30 {
        return FillsVerdict::Unknown { reason: "rank too large".into() };
    }
    if total(&cur) > budget.letters {
        return FillsVerdict::Unknown { reason: format!("input exceeds {} letters", budget.letters) };
    }
    let mut log: Vec<WhMove> = Vec::new();
    loop {
        if log.len() > budget.moves {
            return FillsVerdict::Unknown { reason: "move budget exhausted".into() };
        }
        match inspect(n, &cur) {
            Step::Fills => {
                let g = whitehead_graph(n, &cur);
                let graph_edges = g.iter().flatten().map(|&c| c as usize).sum::<usize>() / 2;
                cur.sort();
                cur.dedup();
                return FillsVerdict::Fills { words: cur, graph_edges, log };
            }
            Step::Move(m) => {
                let before = total(&cur);
                cur = apply_move(&m, n, &cur);
                debug_assert!(total(&cur) < before, "cut-vertex move must shorten");
                if total(&cur) >= before {
                    return FillsVerdict::Unknown { reason: "descent stalled".into() };
                }
                log.push(m);
            }
            Step::Witness(groups) => {
                let mut sys = FreeFactorSystem::letters(n, &groups);
                for m in log.iter().rev() {
                    sys = match sys.apply(&m.inverse().images(n)) {
                        Ok(s) => s,
                        Err(e) => return FillsVerdict::Unknown { reason: e.to_string() },
                    };
                }
                debug_assert!(words.iter().all(|c| c.is_empty() || sys.carries(c)));
                return FillsVerdict::ProperFactor { witness: sys, log };
            }
        }
    }
}

/// The smallest free factor system carrying every class, by recursing into
/// the components of proper-factor witnesses.
pub fn free_factor_support(n: usize, words: &[CyclicWord], budget: Budget) -> Result<FreeFactorSystem> {
    match fills(n, words, budget) {
        FillsVerdict::Fills { .. } => Ok(FreeFactorSystem::whole(n)),
        FillsVerdict::Unknown { reason } => Err(Error::BudgetExhausted(reason)),
        FillsVerdict::ProperFactor { witness, .. } => {
            let mut comps = Vec::new();
            for a in &witness.comps {
                let gens = a.generators();
                let r = gens.len();
                let local: Vec<CyclicWord> = words
                    .iter()
                    .filter(|c| !c.is_empty())
                    .filter_map(|c| a.express(c))
                    .map(|w| CyclicWord::new(&w))
                    .collect();
                if local.is_empty() {
                    continue;
                }
                let inner = free_factor_support(r, &local, budget)?;
                let back = inner.apply_into(n, &gens)?;
                comps.extend(back.comps);
            }
            Ok(FreeFactorSystem::new(n, comps))
        }
    }
}
