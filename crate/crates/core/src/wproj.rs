//! The orbit-phase functions `w` and `W`: where a conjugacy class, or the
//! short classes carried by a free factor system, enter the attracting
//! neighborhood of the repelling lamination.

use std::collections::{BTreeSet, HashMap};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::auto::{invert_automorphism, outer_equal};
use crate::dynamics::strata;
use crate::error::{invalid, Error, Result};
use crate::factor::FreeFactorSystem;
use crate::graph::{EdgePath, GraphMap, MarkedGraph};
use crate::lamination::{lamination_fills, AttractionParams, LaminationApprox, FILLS_MIN_DEPTH};
use crate::splitting::OneEdgeSplitting;
use crate::whitehead::Budget;
use crate::word::CyclicWord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WParams {
    pub attraction: AttractionParams,
    /// Natural-edge length of candidate classes.
    pub ell: usize,
}

impl Default for WParams {
    fn default() -> WParams {
        WParams { attraction: AttractionParams::default(), ell: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum W {
    Defined(i64),
    /// Never settles into `U⁻` within the horizons.
    NotDefined,
}

impl W {
    pub fn value(self) -> Option<i64> {
        match self {
            W::Defined(v) => Some(v),
            W::NotDefined => None,
        }
    }
}

/// Everything `w` depends on. Classes are rose words; `f` lives on `graph`
/// and `phi`, `phi_inv` are the rose automorphisms it represents.
#[derive(Debug)]
pub struct WContext {
    pub graph: MarkedGraph,
    pub f: GraphMap,
    pub phi: GraphMap,
    pub phi_inv: GraphMap,
    pub plus: LaminationApprox,
    pub minus: LaminationApprox,
    pub u_plus: EdgePath,
    pub u_minus: EdgePath,
    pub params: WParams,
    pub m_hat: Option<i64>,
    cache: Mutex<HashMap<CyclicWord, W>>,
}

fn filling_lamination(f: &GraphMap, mg: &MarkedGraph, params: &AttractionParams) -> Result<LaminationApprox> {
    let filt = strata(f)?;
    let eg = filt.eg_strata();
    if eg.is_empty() {
        return invalid("map has no EG stratum");
    }
    for s in eg.into_iter().rev() {
        let lam = LaminationApprox::build(f, &filt, s, params, FILLS_MIN_DEPTH)?;
        if lamination_fills(mg, &lam, Budget::default()).verdict.is_fills() {
            return Ok(lam);
        }
    }
    invalid("no EG lamination is certified to fill")
}

impl WContext {
    /// `phi_inv` is computed when not supplied; a supplied one must invert
    /// the rose automorphism of `f` up to conjugation.
    pub fn build(graph: &MarkedGraph, f: &GraphMap, phi_inv: Option<&GraphMap>, params: WParams) -> Result<WContext> {
        let phi = graph.outer_of(f)?;
        let phi_inv = match phi_inv {
            Some(g) => {
                if !outer_equal(&phi.compose(g)?, &GraphMap::identity(graph.rose.clone()), 16).is_equal() {
                    return invalid("supplied inverse does not invert the map");
                }
                g.clone()
            }
            None => invert_automorphism(&phi)?,
        };
        let plus = filling_lamination(f, graph, &params.attraction)?;
        let rose = MarkedGraph::rose(&graph.rose.edges.iter().map(|e| e.name.as_str()).collect::<Vec<_>>());
        let minus = filling_lamination(&phi_inv, &rose, &params.attraction)?;
        let (u_plus, u_minus) = (plus.defining.clone(), minus.defining.clone());
        for (lam, u) in [(&plus, &u_plus), (&minus, &u_minus)] {
            if !crate::word::contains_subword(lam.segments.last().unwrap(), u) {
                return Err(Error::NumericalTolerance("defining segment missing from its own leaf".into()));
            }
        }
        Ok(WContext {
            graph: graph.clone(),
            f: f.clone(),
            phi,
            phi_inv,
            plus,
            minus,
            u_plus,
            u_minus,
            params,
            m_hat: None,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn rank(&self) -> usize {
        self.phi.images.len()
    }

    /// Whether the line of `c` crosses the defining segment of `U±`.
    pub fn in_u(&self, c: &CyclicWord, side: Side) -> bool {
        match side {
            Side::Minus => c.line_contains(&self.u_minus),
            Side::Plus => CyclicWord::new(&self.graph.from_rose(c.letters())).line_contains(&self.u_plus),
        }
    }

    fn step(&self, c: &CyclicWord, backward: bool) -> Result<CyclicWord> {
        let next = if backward { &self.phi_inv } else { &self.phi }.map_circuit_unchecked(c);
        if next.len() > self.params.attraction.length_cap {
            return Err(Error::BudgetExhausted(format!(
                "orbit reached {} letters (cap {})",
                next.len(),
                self.params.attraction.length_cap
            )));
        }
        Ok(next)
    }

    /// `φ^k(c)` for any integer `k`.
    pub fn iterate(&self, c: &CyclicWord, k: i64) -> Result<CyclicWord> {
        let mut cur = c.clone();
        for _ in 0..k.unsigned_abs() {
            cur = self.step(&cur, k < 0)?;
        }
        Ok(cur)
    }

    /// The least `w` with `φ^{-j}(c) ∈ U⁻` for every `j ≥ w`. Membership
    /// from `w` on is accepted once it holds `s + 1` times in a row.
    pub fn w_of(&self, c: &CyclicWord) -> Result<W> {
        if let Some(&w) = self.cache.lock().unwrap().get(c) {
            return Ok(w);
        }
        let w = self.scan(c)?;
        self.cache.lock().unwrap().insert(c.clone(), w);
        Ok(w)
    }

    fn scan(&self, c: &CyclicWord) -> Result<W> {
        let AttractionParams { horizon, stability, .. } = self.params.attraction;
        let mut cur = c.clone();
        let mut run = 0;
        let mut start = None;
        for j in 0..=horizon + stability {
            if self.in_u(&cur, Side::Minus) {
                run += 1;
                if run > stability {
                    start = Some(j - stability);
                    break;
                }
            } else {
                run = 0;
            }
            let next = self.step(&cur, true)?;
            if next == cur && run == 0 {
                // fixed outside U⁻
                return Ok(W::NotDefined);
            }
            cur = next;
        }
        match start {
            None => Ok(W::NotDefined),
            Some(j) if j > 0 => Ok(W::Defined(j as i64)),
            Some(_) => {
                let mut cur = c.clone();
                for k in 1..=horizon {
                    cur = self.step(&cur, false)?;
                    if !self.in_u(&cur, Side::Minus) {
                        return Ok(W::Defined(1 - k as i64));
                    }
                }
                Ok(W::NotDefined)
            }
        }
    }

    /// First `k ≥ 0` from which `φ^k(c) ∈ U⁺` holds `s + 1` times in a row.
    pub fn forward_entry(&self, c: &CyclicWord) -> Result<Option<usize>> {
        let AttractionParams { horizon, stability, .. } = self.params.attraction;
        let mut cur = c.clone();
        let mut run = 0;
        for k in 0..=horizon + stability {
            if self.in_u(&cur, Side::Plus) {
                run += 1;
                if run > stability {
                    return Ok(Some(k - stability));
                }
            } else {
                run = 0;
            }
            cur = self.step(&cur, false)?;
        }
        Ok(None)
    }
}

/// `W` of a set of classes: the least defined `w`, with the class that
/// attains it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WValue {
    pub value: i64,
    pub witness: CyclicWord,
    pub evaluated: usize,
    pub defined: usize,
    /// Candidates whose orbit hit the length cap.
    pub exhausted: usize,
}

impl WContext {
    pub fn set_m_hat(&mut self, m: i64) {
        self.m_hat = Some(m);
    }

    pub fn w_of_classes<'a>(&self, classes: impl IntoIterator<Item = &'a CyclicWord>) -> Result<WValue> {
        let mut best: Option<(i64, CyclicWord)> = None;
        let (mut evaluated, mut defined, mut exhausted) = (0, 0, 0);
        for c in classes {
            evaluated += 1;
            match self.w_of(c) {
                Ok(W::Defined(v)) => {
                    defined += 1;
                    if best.as_ref().is_none_or(|(b, _)| v < *b) {
                        best = Some((v, c.clone()));
                    }
                }
                Ok(W::NotDefined) => {}
                Err(Error::BudgetExhausted(_)) => exhausted += 1,
                Err(e) => return Err(e),
            }
        }
        match best {
            Some((value, witness)) => Ok(WValue { value, witness, evaluated, defined, exhausted }),
            None => Err(Error::NotApplicable(format!(
                "no candidate has a defined w ({evaluated} evaluated, {exhausted} over the length cap)"
            ))),
        }
    }

    pub fn candidates(&self, ffs: &FreeFactorSystem) -> BTreeSet<CyclicWord> {
        ffs.candidate_classes(self.params.ell)
    }

    /// Least `w` over the short classes carried by `ffs`.
    pub fn w_of_ffs(&self, ffs: &FreeFactorSystem) -> Result<WValue> {
        self.w_of_classes(&self.candidates(ffs))
    }

    pub fn w_of_splitting(&self, s: &OneEdgeSplitting) -> Result<WValue> {
        self.w_of_ffs(&s.system)
    }

    /// `W(φ^k ℱ)` evaluated on `φ^k` of the candidates of `ℱ`.
    pub fn w_transported(&self, ffs: &FreeFactorSystem, k: i64) -> Result<WValue> {
        let moved = self.candidates(ffs).iter().map(|c| self.iterate(c, k)).collect::<Result<Vec<_>>>()?;
        self.w_of_classes(&moved)
    }

    /// The rose automorphism `φ^k`.
    pub fn power_images(&self, k: i64) -> Result<Vec<EdgePath>> {
        let base = if k < 0 { &self.phi_inv } else { &self.phi };
        Ok(base.power(k.unsigned_abs() as usize)?.images)
    }

    /// `M̂` over groups of classes that share a proper free factor: the
    /// spread of defined `w` within a group, and the lag between `-w(c)` and
    /// the forward entry of `c` into `U⁺`.
    pub fn estimate_m(&self, groups: &[Vec<CyclicWord>]) -> Result<i64> {
        let mut m = None::<i64>;
        for g in groups {
            let mut vals = Vec::new();
            for c in g {
                let Ok(W::Defined(w)) = self.w_of(c) else { continue };
                vals.push(w);
                if let Ok(Some(k)) = self.forward_entry(c) {
                    m = Some(m.unwrap_or(0).max(k as i64 + w));
                }
            }
            if let (Some(lo), Some(hi)) = (vals.iter().min(), vals.iter().max()) {
                m = Some(m.unwrap_or(0).max(hi - lo));
            }
        }
        m.ok_or_else(|| Error::NotApplicable("no class in the sample has a defined w".into()))
    }

    /// `estimate_m` over the candidate sets of the given systems.
    pub fn estimate_m_ffs(&self, sample: &[FreeFactorSystem]) -> Result<i64> {
        let groups: Vec<Vec<CyclicWord>> = sample.iter().map(|f| self.candidates(f).into_iter().collect()).collect();
        self.estimate_m(&groups)
    }

    fn m_hat(&self) -> Result<i64> {
        self.m_hat.ok_or_else(|| Error::InvalidInput("M̂ has not been estimated".into()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisplacementRow {
    pub m: i64,
    /// `W(S^{φ^m})` on transported candidates.
    pub w: i64,
    /// Recomputed from the candidates of `φ^{-m} ℱ(S)` itself, where done.
    pub raw: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisplacementTable {
    pub base: WValue,
    pub rows: Vec<DisplacementRow>,
    pub m_hat: i64,
    /// `w(m) + m` is constant across the table.
    pub exact_slope: bool,
    /// Every raw value is within `M̂` of the transported one.
    pub raw_within_m_hat: bool,
}

impl DisplacementTable {
    /// `|m| / (8 M̂)` for the largest `|m|` in the table.
    pub fn distance_lower_bound(&self) -> f64 {
        let m = self.rows.iter().map(|r| r.m.unsigned_abs()).max().unwrap_or(0);
        m as f64 / (8 * self.m_hat.max(1)) as f64
    }
}

/// `m ↦ W(S^{φ^m})` for `|m| ≤ range`, with raw recomputation at `raw_at`.
pub fn displacement_table(ctx: &WContext, s: &OneEdgeSplitting, range: i64, raw_at: &[i64]) -> Result<DisplacementTable> {
    let m_hat = ctx.m_hat()?;
    let base = ctx.w_of_splitting(s)?;
    let mut rows = Vec::new();
    for m in -range..=range {
        // ℱ(S^{φ^m}) = φ^{-m} ℱ(S)
        let w = ctx.w_transported(&s.system, -m)?.value;
        let raw = if raw_at.contains(&m) {
            let moved = s.system.apply(&ctx.power_images(-m)?)?;
            Some(ctx.w_of_ffs(&moved)?.value)
        } else {
            None
        };
        rows.push(DisplacementRow { m, w, raw });
    }
    let exact_slope = rows.iter().all(|r| r.w + r.m == base.value);
    let raw_within_m_hat = rows.iter().all(|r| r.raw.is_none_or(|v| (v - r.w).abs() <= m_hat));
    Ok(DisplacementTable { base, rows, m_hat, exact_slope, raw_within_m_hat })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LipschitzRow {
    pub w1: i64,
    pub w2: i64,
    pub delta: i64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub bound: i64,
    pub rows: Vec<LipschitzRow>,
    pub skipped: usize,
    pub violations: usize,
    /// Largest `|ΔW| / M̂` seen.
    pub max_ratio: f64,
}

/// `|W(S₁) − W(S₂)| ≤ 8 M̂` over pairs of adjacent splittings; pairs where
/// either `W` is undefined are skipped.
pub fn lipschitz_check(ctx: &WContext, pairs: &[(OneEdgeSplitting, OneEdgeSplitting)]) -> Result<LipschitzReport> {
    let m_hat = ctx.m_hat()?;
    let bound = 8 * m_hat;
    let mut rows = Vec::new();
    let mut skipped = 0;
    for (a, b) in pairs {
        match (ctx.w_of_splitting(a), ctx.w_of_splitting(b)) {
            (Ok(x), Ok(y)) => {
                let delta = (x.value - y.value).abs();
                rows.push(LipschitzRow { w1: x.value, w2: y.value, delta, ok: delta <= bound });
            }
            (Err(Error::NotApplicable(_)), _) | (_, Err(Error::NotApplicable(_))) => skipped += 1,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    let violations = rows.iter().filter(|r| !r.ok).count();
    let max_ratio = rows.iter().map(|r| r.delta as f64 / m_hat.max(1) as f64).fold(0.0, f64::max);
    Ok(LipschitzReport { bound, rows, skipped, violations, max_ratio })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivergenceReport {
    /// `(l, W_φ(ψ^l ℱ(T)))`.
    pub psi_table: Vec<(i64, Option<i64>)>,
    /// `(k, W_φ(φ^k ℱ(T)))`, recomputed from the moved system.
    pub phi_table: Vec<(i64, Option<i64>)>,
    pub m_hat: i64,
    /// Least `N` such that the ψ table on `[N, N + window]` spans at most `2 M̂`.
    pub band_start: Option<i64>,
    pub phi_slope_exact: bool,
    pub verdict: Divergence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Divergence {
    Bounded,
    /// The last `window + 1` defined values are strictly monotone. A band of
    /// `2 M̂` alone cannot tell slope one from bounded over a short window.
    Unbounded,
    Unknown,
}

impl DivergenceReport {
    pub fn bounded(&self) -> bool {
        self.verdict == Divergence::Bounded
    }
}

/// Compares `W_φ` along the `ψ`-orbit and the `φ`-orbit of `ℱ(T)`.
pub fn divergence_check(ctx: &WContext, psi: &GraphMap, t: &OneEdgeSplitting, range: i64, window: i64) -> Result<DivergenceReport> {
    let m_hat = ctx.m_hat()?;
    let psi = ctx.graph.outer_of(psi)?;
    let w_at = |ffs: &FreeFactorSystem| match ctx.w_of_ffs(ffs) {
        Ok(v) => Ok(Some(v.value)),
        Err(Error::NotApplicable(_)) => Ok(None),
        Err(e) => Err(e),
    };
    let mut psi_table = Vec::new();
    let mut phi_table = Vec::new();
    let mut sys_psi = t.system.clone();
    let mut sys_phi = t.system.clone();
    for l in 0..=range {
        psi_table.push((l, w_at(&sys_psi)?));
        phi_table.push((l, w_at(&sys_phi)?));
        sys_psi = sys_psi.apply(&psi.images)?;
        sys_phi = sys_phi.apply(&ctx.phi.images)?;
    }
    let phi_slope_exact = phi_table.iter().all(|&(k, v)| match (v, phi_table[0].1) {
        (Some(v), Some(v0)) => v == v0 + k,
        _ => false,
    });
    let band_start = (0..=range - window).find(|&n| {
        let vals: Vec<i64> = psi_table[n as usize..=(n + window) as usize].iter().filter_map(|r| r.1).collect();
        vals.len() as i64 == window + 1 && vals.iter().max().unwrap() - vals.iter().min().unwrap() <= 2 * m_hat
    });
    let defined: Vec<i64> = psi_table.iter().filter_map(|r| r.1).collect();
    let tail = &defined[defined.len().saturating_sub(window as usize + 1)..];
    let drift = tail.len() == window as usize + 1
        && (tail.windows(2).all(|p| p[1] > p[0]) || tail.windows(2).all(|p| p[1] < p[0]));
    let verdict = if drift {
        Divergence::Unbounded
    } else if band_start.is_some() {
        Divergence::Bounded
    } else {
        Divergence::Unknown
    };
    Ok(DivergenceReport { psi_table, phi_table, m_hat, band_start, phi_slope_exact, verdict })
}
