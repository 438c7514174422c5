//! Oriented edges, edge paths and cyclic words.
//!
//! An oriented edge is packed into a `u32`: `2 * edge + 1` is the reversal of
//! `2 * edge`. The induced total order on `Dir` is the one used for canonical
//! rotations.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Dir(pub u32);

impl Dir {
    #[inline]
    pub fn fwd(edge: usize) -> Dir {
        Dir((edge as u32) << 1)
    }
    #[inline]
    pub fn rev(edge: usize) -> Dir {
        Dir(((edge as u32) << 1) | 1)
    }
    #[inline]
    pub fn new(edge: usize, reversed: bool) -> Dir {
        Dir(((edge as u32) << 1) | reversed as u32)
    }
    #[inline]
    pub fn inv(self) -> Dir {
        Dir(self.0 ^ 1)
    }
    #[inline]
    pub fn edge(self) -> usize {
        (self.0 >> 1) as usize
    }
    #[inline]
    pub fn is_rev(self) -> bool {
        self.0 & 1 == 1
    }
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.edge(), if self.is_rev() { "'" } else { "" })
    }
}

/// Appends `d` to a reduced word, cancelling against the last letter.
#[inline]
pub fn push_reduced(word: &mut Vec<Dir>, d: Dir) {
    if word.last() == Some(&d.inv()) {
        word.pop();
    } else {
        word.push(d);
    }
}

pub fn reduce(word: &[Dir]) -> Vec<Dir> {
    let mut out = Vec::with_capacity(word.len());
    for &d in word {
        push_reduced(&mut out, d);
    }
    out
}

pub fn is_reduced(word: &[Dir]) -> bool {
    word.windows(2).all(|w| w[0] != w[1].inv())
}

pub fn inverse(word: &[Dir]) -> Vec<Dir> {
    word.iter().rev().map(|d| d.inv()).collect()
}

/// Reduced product of two words.
pub fn concat(a: &[Dir], b: &[Dir]) -> Vec<Dir> {
    let mut out = a.to_vec();
    for &d in b {
        push_reduced(&mut out, d);
    }
    out
}

/// Splits a reduced word as `p · core · p⁻¹` with `core` cyclically reduced.
pub fn cyclic_core(word: &[Dir]) -> (&[Dir], &[Dir]) {
    let w = word;
    let mut i = 0;
    let n = w.len();
    while 2 * i + 1 < n && w[i] == w[n - 1 - i].inv() {
        i += 1;
    }
    (&w[..i], &w[i..n - i])
}

pub fn cyclically_reduce(word: &[Dir]) -> Vec<Dir> {
    let r = reduce(word);
    cyclic_core(&r).1.to_vec()
}

/// Start index of the lexicographically least rotation (Booth's algorithm).
pub fn least_rotation(s: &[Dir]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let at = |i: isize| s[(i as usize) % n];
    let mut f: Vec<isize> = vec![-1; 2 * n];
    let mut k: isize = 0;
    for j in 1..(2 * n) as isize {
        let sj = at(j);
        let mut i = f[(j - k - 1) as usize];
        while i != -1 && sj != at(k + i + 1) {
            if sj < at(k + i + 1) {
                k = j - i - 1;
            }
            i = f[i as usize];
        }
        if sj != at(k + i + 1) {
            if sj < at(k) {
                k = j;
            }
            f[(j - k) as usize] = -1;
        } else {
            f[(j - k) as usize] = i + 1;
        }
    }
    (k as usize) % n
}

fn rotate(s: &[Dir], k: usize) -> Vec<Dir> {
    let mut out = Vec::with_capacity(s.len());
    out.extend_from_slice(&s[k..]);
    out.extend_from_slice(&s[..k]);
    out
}

/// A conjugacy class (unoriented) stored as its canonical cyclic word: the
/// least rotation of the cyclically reduced word or of its inverse.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CyclicWord(Vec<Dir>);

impl CyclicWord {
    /// Canonical form of the class of a (not necessarily reduced) closed word.
    pub fn new(word: &[Dir]) -> CyclicWord {
        let core = cyclically_reduce(word);
        Self::from_cyclically_reduced(core)
    }

    pub(crate) fn from_cyclically_reduced(core: Vec<Dir>) -> CyclicWord {
        if core.is_empty() {
            return CyclicWord(core);
        }
        let a = rotate(&core, least_rotation(&core));
        let inv = inverse(&core);
        let b = rotate(&inv, least_rotation(&inv));
        CyclicWord(if a <= b { a } else { b })
    }

    pub fn trivial() -> CyclicWord {
        CyclicWord(Vec::new())
    }

    pub fn letters(&self) -> &[Dir] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True if the periodic line of this class contains `seg` or its inverse.
    pub fn line_contains(&self, seg: &[Dir]) -> bool {
        if seg.is_empty() {
            return true;
        }
        if self.0.is_empty() {
            return false;
        }
        let reps = seg.len() / self.0.len() + 2;
        let mut hay = Vec::with_capacity(reps * self.0.len());
        for _ in 0..reps {
            hay.extend_from_slice(&self.0);
        }
        let rseg = inverse(seg);
        contains_subword(&hay, seg) || contains_subword(&hay, &rseg)
    }
}

impl fmt::Debug for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}]", self.0)
    }
}

pub fn contains_subword(hay: &[Dir], needle: &[Dir]) -> bool {
    find_subword(hay, needle).is_some()
}

pub fn find_subword(hay: &[Dir], needle: &[Dir]) -> Option<usize> {
    if needle.is_empty() {
        return Some(0);
    }
    if needle.len() > hay.len() {
        return None;
    }
    let first = needle[0];
    (0..=hay.len() - needle.len()).find(|&i| hay[i] == first && &hay[i..i + needle.len()] == needle)
}
