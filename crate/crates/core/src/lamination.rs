//! Finite approximations of attracting laminations by iterated edge images.

use serde::{Deserialize, Serialize};

use crate::dynamics::{Filtration, StratumKind};
use crate::error::{invalid, Error, Result};
use crate::factor::FreeFactorSystem;
use crate::graph::{EdgePath, GraphMap, MarkedGraph};
use crate::whitehead::{fills, free_factor_support, Budget, FillsVerdict};
use crate::word::{CyclicWord, Dir};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttractionParams {
    /// Length of the defining segment.
    pub seg_len: usize,
    pub horizon: usize,
    pub stability: usize,
    pub length_cap: usize,
}

impl Default for AttractionParams {
    fn default() -> AttractionParams {
        AttractionParams { seg_len: 64, horizon: 40, stability: 3, length_cap: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaminationApprox {
    pub stratum: usize,
    pub stratum_edges: Vec<usize>,
    pub seed: Dir,
    /// `segments[k]` is `f^k_#(seed)`.
    pub segments: Vec<EdgePath>,
    /// Central subword of the deepest segment around a seed occurrence.
    pub defining: EdgePath,
}

pub fn leaf_segment(f: &GraphMap, e: usize, k: usize, cap: usize) -> Result<EdgePath> {
    f.iterate_path(&[Dir::fwd(e)], k, cap)
}

impl LaminationApprox {
    /// Iterates the least edge of an EG stratum until the segment is at least
    /// `4 L` long and at least `min_depth` deep, then, while under the length
    /// cap, far enough to cover the depths `stable_fills` compares.
    pub fn build(f: &GraphMap, filt: &Filtration, stratum: usize, params: &AttractionParams, min_depth: usize) -> Result<LaminationApprox> {
        let s = filt.strata.get(stratum).ok_or_else(|| Error::InvalidInput(format!("no stratum {stratum}")))?;
        if s.kind != StratumKind::Eg {
            return invalid(format!("stratum {stratum} is {:?}, not EG", s.kind));
        }
        let seed = Dir::fwd(*s.edges.iter().min().unwrap());
        let mut segments = vec![vec![seed]];
        // index of the longest segment so far
        let mut record = 0;
        loop {
            let last = segments.last().unwrap();
            let needed = segments.len() <= min_depth || last.len() < 4 * params.seg_len;
            let window = first_long(&segments).is_none_or(|k0| segments.len() < k0 + STABLE_WINDOW);
            if !needed && !window {
                break;
            }
            let next = f.map_word_unchecked(last);
            if next.len() > params.length_cap && !needed {
                break;
            }
            if next.len() > params.length_cap {
                return Err(Error::BudgetExhausted(format!(
                    "leaf segment at depth {} exceeds {} letters",
                    segments.len(),
                    params.length_cap
                )));
            }
            if next.len() > segments[record].len() {
                record = segments.len();
            } else if segments.len() - record > s.edges.len() + 1 {
                return Err(Error::NotApplicable("leaf segments stopped growing".into()));
            }
            segments.push(next);
        }
        let defining = central(segments.last().unwrap(), seed, params.seg_len);
        Ok(LaminationApprox { stratum, stratum_edges: s.edges.clone(), seed, segments, defining })
    }

    pub fn depth(&self) -> usize {
        self.segments.len() - 1
    }

    /// The central half of the segment at depth `k`, closed up as a
    /// conjugacy class and read in the rose through the marking. The whole
    /// segment would be the image of an edge, hence primitive on a rose.
    pub fn closure(&self, mg: &MarkedGraph, k: usize) -> CyclicWord {
        let seg = &self.segments[k.min(self.depth())];
        let cut = seg.len() / 4;
        CyclicWord::new(&mg.to_rose(&seg[cut..seg.len() - cut]))
    }

    pub fn stratum_length(&self, p: &[Dir]) -> usize {
        p.iter().filter(|d| self.stratum_edges.contains(&d.edge())).count()
    }
}

fn central(seg: &[Dir], seed: Dir, len: usize) -> EdgePath {
    if seg.len() <= len {
        return seg.to_vec();
    }
    let mid = seg.len() / 2;
    let occ = (0..seg.len())
        .filter(|&i| seg[i].edge() == seed.edge())
        .min_by_key(|&i| (i as i64 - mid as i64).abs())
        .unwrap_or(mid);
    let start = occ.saturating_sub(len / 2).min(seg.len() - len);
    seg[start..start + len].to_vec()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Attraction {
    Attracted(usize),
    NotWithinHorizon,
}

/// `Attracted(i)` when iterates `i..=i+s` of `c` all contain the defining
/// segment.
pub fn weakly_attracted(f: &GraphMap, c: &CyclicWord, lam: &LaminationApprox, params: &AttractionParams) -> Result<Attraction> {
    let mut cur = c.clone();
    let mut run = 0usize;
    for j in 0..=params.horizon + params.stability {
        if cur.line_contains(&lam.defining) {
            run += 1;
            if run > params.stability {
                return Ok(Attraction::Attracted(j - params.stability));
            }
        } else {
            run = 0;
        }
        if j == params.horizon + params.stability {
            break;
        }
        cur = f.map_circuit_unchecked(&cur);
        if cur.len() > params.length_cap {
            return Err(Error::BudgetExhausted(format!("iterate {} exceeds {} letters", j + 1, params.length_cap)));
        }
    }
    Ok(Attraction::NotWithinHorizon)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StableVerdict {
    pub verdict: FillsVerdict,
    /// Depth at which two consecutive depths first agreed.
    pub depth: Option<usize>,
    pub support: Option<FreeFactorSystem>,
}

fn same(a: &FillsVerdict, sa: &Option<FreeFactorSystem>, b: &FillsVerdict, sb: &Option<FreeFactorSystem>) -> bool {
    match (a, b) {
        (FillsVerdict::Fills { .. }, FillsVerdict::Fills { .. }) => true,
        (FillsVerdict::ProperFactor { .. }, FillsVerdict::ProperFactor { .. }) => sa.is_some() && sa == sb,
        _ => false,
    }
}

/// Closures shorter than this are not compared.
pub const MIN_CLOSURE: usize = 16;
/// Number of depths compared, starting at the first long enough closure.
const STABLE_WINDOW: usize = 6;

fn closure_len(seg: &[Dir]) -> usize {
    seg.len() - 2 * (seg.len() / 4)
}

fn first_long(segments: &[EdgePath]) -> Option<usize> {
    segments.iter().position(|s| closure_len(s) >= MIN_CLOSURE)
}

/// Depth to build to before asking whether a lamination fills.
pub const FILLS_MIN_DEPTH: usize = 5;

/// Applies `fills` to closures at successive depths, starting at the first
/// closure of `MIN_CLOSURE` letters, and accepts the first verdict that
/// repeats at the next depth.
pub fn stable_fills(mg: &MarkedGraph, lams: &[&LaminationApprox], budget: Budget) -> StableVerdict {
    let n = mg.rank();
    let start = lams.iter().map(|l| first_long(&l.segments)).collect::<Option<Vec<_>>>().and_then(|v| v.into_iter().max());
    let max = lams.iter().map(|l| l.depth()).min().unwrap_or(0);
    let Some(start) = start.filter(|&k0| !lams.is_empty() && max > k0) else {
        return StableVerdict {
            verdict: FillsVerdict::Unknown { reason: "need two depths with long enough closures".into() },
            depth: None,
            support: None,
        };
    };
    let max = max.min(start + STABLE_WINDOW - 1);
    let mut prev: Option<(FillsVerdict, Option<FreeFactorSystem>)> = None;
    for k in start..=max {
        let classes: Vec<CyclicWord> = lams.iter().map(|l| l.closure(mg, k)).collect();
        let v = fills(n, &classes, budget);
        if let FillsVerdict::Unknown { .. } = v {
            return StableVerdict { verdict: v, depth: None, support: None };
        }
        let sup = if v.is_proper() { free_factor_support(n, &classes, budget).ok() } else { None };
        if let Some((pv, ps)) = &prev {
            if same(pv, ps, &v, &sup) {
                return StableVerdict { verdict: v, depth: Some(k), support: sup };
            }
        }
        prev = Some((v, sup));
    }
    StableVerdict {
        verdict: FillsVerdict::Unknown { reason: format!("no agreement between consecutive depths up to {max}") },
        depth: None,
        support: None,
    }
}

pub fn lamination_fills(mg: &MarkedGraph, lam: &LaminationApprox, budget: Budget) -> StableVerdict {
    stable_fills(mg, &[lam], budget)
}

pub fn laminations_jointly_fill(mg: &MarkedGraph, lams: &[LaminationApprox], budget: Budget) -> StableVerdict {
    let refs: Vec<&LaminationApprox> = lams.iter().collect();
    stable_fills(mg, &refs, budget)
}

/// `log(EL(g_#(σ)) / EL(σ))` for the segment `σ` at `depth`, where `EL`
/// counts letters in the stratum.
pub fn pf_estimate(g: &GraphMap, lam: &LaminationApprox, depth: usize) -> Result<f64> {
    let sigma = &lam.segments[depth.min(lam.depth())];
    let before = lam.stratum_length(sigma);
    if before == 0 {
        return invalid("segment does not cross the stratum");
    }
    let after = lam.stratum_length(&g.map_path(sigma)?);
    Ok((after as f64 / before as f64).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::strata;
    use crate::fixtures::{bdd_no_periodic, filling_reducible};

    #[test]
    fn central_segment_is_centered_on_seed() {
        let seg: Vec<Dir> = (0..100).map(|i| Dir::fwd(if i == 47 { 0 } else { 1 })).collect();
        let c = central(&seg, Dir::fwd(0), 10);
        assert_eq!(c.len(), 10);
        assert_eq!(c[5], Dir::fwd(0));
    }

    #[test]
    fn filling_reducible_lamination() {
        let ex = filling_reducible(3).unwrap();
        let filt = strata(&ex.map).unwrap();
        let eg = filt.eg_strata()[0];
        let lam = LaminationApprox::build(&ex.map, &filt, eg, &AttractionParams::default(), FILLS_MIN_DEPTH).unwrap();
        assert_eq!(ex.graph.graph.dir_name(lam.seed), "A");
        for k in 1..lam.depth() {
            assert!(lam.segments[k + 1].len() > lam.segments[k].len());
        }
        let v = lamination_fills(&ex.graph, &lam, Budget::default());
        assert!(v.verdict.is_fills(), "{v:?}");
        assert!(v.depth.unwrap() <= 6);
    }

    #[test]
    fn two_laminations_fill_only_together() {
        let ex = bdd_no_periodic(3).unwrap();
        let filt = strata(&ex.map).unwrap();
        let lams: Vec<LaminationApprox> = filt
            .eg_strata()
            .into_iter()
            .map(|s| LaminationApprox::build(&ex.map, &filt, s, &AttractionParams::default(), FILLS_MIN_DEPTH).unwrap())
            .collect();
        assert_eq!(lams.len(), 2);
        for l in &lams {
            let v = lamination_fills(&ex.graph, l, Budget::default());
            assert!(v.verdict.is_proper(), "{v:?}");
            assert_eq!(v.support.unwrap().ranks(), vec![5]);
        }
        assert!(laminations_jointly_fill(&ex.graph, &lams, Budget::default()).verdict.is_fills());
    }
}
