//! The trichotomy: loxodromic, bounded orbits, or a periodic vertex, each
//! with a witness that is checked before the verdict is returned.

use serde::{Deserialize, Serialize};

use crate::dynamics::{rotationless_power, strata, StratumKind};
use crate::error::{invalid, Error, Result};
use crate::fixtures::{Decomposition, Example};
use crate::graph::{Graph, GraphMap, MarkedGraph};
use crate::lamination::{lamination_fills, laminations_jointly_fill, LaminationApprox, FILLS_MIN_DEPTH};
use crate::splitting::{
    adjacent_pairs, pair_relation_check, validate_pair, MarkedGraphPair, OneEdgeSplitting, PairRelation, PairRelationWitness,
};
use crate::whitehead::{Budget, FillsVerdict};
use crate::wproj::{displacement_table, DisplacementTable, WContext, WParams};
use crate::text::Document;
use crate::word::Dir;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rank2Verdict {
    Loxodromic,
    NotLoxodromic,
}

/// Loxodromic iff `|tr M| > 2` for determinant 1. For determinant −1 the
/// test is applied to `M²`, whose trace is `tr² + 2`.
pub fn rank2_classify(m: [[i64; 2]; 2]) -> Result<Rank2Verdict> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let tr = m[0][0] + m[1][1];
    let lox = match det {
        1 => tr.abs() > 2,
        -1 => tr != 0,
        _ => return invalid(format!("determinant {det} is not ±1")),
    };
    Ok(if lox { Rank2Verdict::Loxodromic } else { Rank2Verdict::NotLoxodromic })
}

/// `⟨G, G_{N−1}⟩` for a map whose top stratum is one non-EG edge, together
/// with the relation `f: (G, G_{N−1}) → (G, G_{N−1})^f`. When the top
/// stratum is fixed its last edge is taken on its own.
pub fn periodic_vertex_witness(graph: &MarkedGraph, f: &GraphMap) -> Result<(OneEdgeSplitting, PairRelationWitness)> {
    let filt = strata(f)?;
    let top = filt.strata.last().ok_or_else(|| Error::InvalidInput("map has no edges".into()))?;
    let edge = match top.kind {
        StratumKind::Eg => return Err(Error::NotApplicable("top stratum is EG".into())),
        StratumKind::Fixed => *top.edges.last().unwrap(),
        _ if top.edges.len() == 1 => top.edges[0],
        _ => return Err(Error::NotApplicable(format!("top stratum has {} non-fixed edges", top.edges.len()))),
    };
    let mut h = vec![true; graph.graph.num_edges()];
    h[edge] = false;
    if !f.is_invariant_subgraph(&h) {
        return Err(Error::NotApplicable("complement of the top edge is not invariant".into()));
    }
    let s = OneEdgeSplitting::new(validate_pair(graph, &h)?)?;
    let moved = s.pair.remark(f)?;
    match pair_relation_check(f, &s.pair, &moved, 16)? {
        PairRelation::Holds(w) => Ok((s, w)),
        PairRelation::FailsClause(c, why) => Err(Error::NotApplicable(format!("relation fails clause {c}: {why}"))),
        PairRelation::Unknown(why) => Err(Error::NotApplicable(format!("relation undecided: {why}"))),
    }
}

fn clause<T>(n: u8, msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(format!("decomposition clause {n}: {}", msg.into())))
}

fn vertices_of(g: &Graph, h: &[bool]) -> Vec<bool> {
    let mut out = vec![false; g.num_vertices()];
    for (e, ed) in g.edges.iter().enumerate() {
        if h[e] {
            out[ed.tail] = true;
            out[ed.head] = true;
        }
    }
    out
}

/// Re-verifies the four clauses of the invariant-subgraph decomposition and
/// that `J₃` is the core of `K₁ ∩ J₂`.
pub fn check_decomposition(graph: &MarkedGraph, f: &GraphMap, d: &Decomposition) -> Result<()> {
    let g = &graph.graph;
    let n = g.num_edges();
    if [&d.k1, &d.k2, &d.j2, &d.j3].iter().any(|h| h.len() != n) {
        return invalid("decomposition masks must cover every edge");
    }
    if (0..n).any(|e| !d.k1[e] && !d.k2[e]) {
        return clause(1, "K1 and K2 do not cover G");
    }
    if d.k1.iter().all(|&b| b) || d.k2.iter().all(|&b| b) {
        return clause(1, "K1 and K2 must be proper");
    }
    for (name, h) in [("K1", &d.k1), ("K2", &d.k2)] {
        if !f.is_invariant_subgraph(h) {
            return invalid(format!("{name} is not invariant"));
        }
    }
    if g.core_of(&d.k1) != d.k1 || d.k1.iter().all(|&b| !b) {
        return clause(2, "K1 is not a core subgraph");
    }
    let inside = vertices_of(g, &d.k1);
    let outside = vertices_of(g, &d.k1.iter().map(|b| !b).collect::<Vec<_>>());
    for v in 0..g.num_vertices() {
        if inside[v] && outside[v] && f.vmap[v] != v {
            return clause(2, format!("frontier vertex {} is not fixed", g.vertices[v]));
        }
    }
    for (verts, edges) in g.components(&d.k2) {
        if edges.len() + 1 == verts.len() {
            return clause(3, "K2 has a contractible component");
        }
    }
    if g.core_of(&d.k2) != d.j2 {
        return clause(4, "J2 is not the core of K2");
    }
    if !f.is_invariant_subgraph(&d.j2) {
        return clause(4, "J2 is not invariant");
    }
    let j2_verts = vertices_of(g, &d.j2);
    for e in (0..n).filter(|&e| d.k2[e] && !d.j2[e]) {
        if f.images[e] == [Dir::fwd(e)] {
            continue;
        }
        let ok = [Dir::fwd(e), Dir::rev(e)].into_iter().any(|dir| {
            let img = f.image_of(dir);
            j2_verts[g.terminus(dir)]
                && img.first() == Some(&dir)
                && img.len() > 1
                && img[1..].iter().all(|x| d.j2[x.edge()])
        });
        if !ok {
            return clause(4, format!("edge {} is not of the form E u with u in J2", g.edges[e].name));
        }
    }
    let meet: Vec<bool> = (0..n).map(|e| d.k1[e] && d.j2[e]).collect();
    if g.core_of(&meet) != d.j3 {
        return invalid("J3 is not the core of K1 ∩ J2");
    }
    Ok(())
}

/// `f₁` agrees with `f` on `K₁` and is the identity elsewhere; `f₂` is the
/// identity on `K₁` and agrees with `f` elsewhere.
pub fn split_map(f: &GraphMap, k1: &[bool]) -> Result<(GraphMap, GraphMap)> {
    let g = f.source.clone();
    let inside = vertices_of(&g, k1);
    let part = |on_k1: bool| {
        // frontier vertices are fixed, so either side may claim them
        let vmap = (0..g.num_vertices()).map(|v| if inside[v] == on_k1 { f.vmap[v] } else { v }).collect();
        let images = (0..g.num_edges()).map(|e| if k1[e] == on_k1 { f.images[e].clone() } else { vec![Dir::fwd(e)] }).collect();
        GraphMap::endo(g.clone(), vmap, images)
    };
    let (f1, f2) = (part(true)?, part(false)?);
    if f2.compose(&f1)?.images != f.images {
        return invalid("f2 f1 differs from f");
    }
    Ok((f1, f2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkKind {
    /// `to` is a face of `from`, or equal to it.
    Face,
    /// The pair relation holds from `from` to `to`.
    Equal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLink {
    pub kind: LinkKind,
    pub from: usize,
    pub to: usize,
}

/// Representatives `⟨G,J₃⟩, ⟨G,K₁⟩, ⟨G,K₁⟩^{f₁^k}, ⟨G,J₃⟩^{f₁^k},
/// ⟨G,J₂⟩^{f₁^k}, ⟨G,J₂⟩^{f^k}, ⟨G,J₃⟩^{f^k}`; links 1–2 and 4–5 are
/// equalities, so they name five vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundedChain {
    pub k: usize,
    pub pairs: Vec<MarkedGraphPair>,
    pub links: Vec<ChainLink>,
    /// Face links between distinct pairs.
    pub moves: usize,
}

impl BoundedChain {
    /// The five vertices in text form.
    pub fn serializations(&self) -> Vec<String> {
        [0, 1, 3, 4, 6].iter().map(|&i| Document::from_parts(&self.pairs[i].graph, None, Some(&self.pairs[i].h)).print()).collect()
    }
}

fn is_face(from: &MarkedGraphPair, to: &MarkedGraphPair) -> Result<bool> {
    if from.graph != to.graph {
        return Ok(false);
    }
    if from.h == to.h {
        return Ok(true);
    }
    Ok(from.faces()?.iter().any(|p| p.h == to.h))
}

/// The chain from `⟨G,J₃⟩` to `⟨G,J₃⟩^{f^k}` with every link checked.
pub fn bounded_path_witness(graph: &MarkedGraph, f: &GraphMap, d: &Decomposition, k: usize) -> Result<BoundedChain> {
    check_decomposition(graph, f, d)?;
    let (f1, f2) = split_map(f, &d.k1)?;
    let (f1k, f2k, fk) = (f1.power(k)?, f2.power(k)?, f.power(k)?);
    let base = |h: &[bool]| validate_pair(graph, h);
    let (j3, k1, j2) = (base(&d.j3)?, base(&d.k1)?, base(&d.j2)?);
    let pairs = vec![
        j3.clone(),
        k1.clone(),
        k1.remark(&f1k)?,
        j3.remark(&f1k)?,
        j2.remark(&f1k)?,
        j2.remark(&fk)?,
        j3.remark(&fk)?,
    ];
    let plan = [
        (LinkKind::Face, 0, 1, None),
        (LinkKind::Equal, 1, 2, Some(&f1k)),
        (LinkKind::Face, 3, 2, None),
        (LinkKind::Face, 3, 4, None),
        (LinkKind::Equal, 4, 5, Some(&f2k)),
        (LinkKind::Face, 6, 5, None),
    ];
    let mut links = Vec::new();
    let mut moves = 0;
    for (kind, from, to, map) in plan {
        let (a, b) = (&pairs[from], &pairs[to]);
        match map {
            None => {
                if !is_face(a, b)? {
                    return Err(Error::NotApplicable(format!("pair {to} is not a face of pair {from}")));
                }
                if a.h != b.h {
                    moves += 1;
                }
            }
            Some(h) => match pair_relation_check(h, a, b, 16)? {
                PairRelation::Holds(_) => {}
                other => return Err(Error::NotApplicable(format!("pairs {from} and {to}: {other:?}"))),
            },
        }
        links.push(ChainLink { kind, from, to });
    }
    Ok(BoundedChain { k, pairs, links, moves })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Loxodromic,
    BoundedOrbits,
    PeriodicVertex,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    Displacement { splitting: Vec<String>, table: DisplacementTable },
    Chain { chains: Vec<BoundedChain> },
    /// Joint filling without decomposition data: the verdict rests on the
    /// theorem alone.
    ByTheorem { citation: String },
    InvariantSplitting { splitting: Vec<String>, relation: PairRelationWitness },
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaminationSummary {
    pub stratum: usize,
    pub depth: usize,
    pub verdict: String,
    pub stable_at: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub witness: Witness,
    /// The power of the map that was classified.
    pub power: usize,
    pub laminations: Vec<LaminationSummary>,
    pub joint: Option<String>,
    /// Stage and reason when the verdict is `Unknown`.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyParams {
    /// Replace `f` by `f^p`; the least rotationless `p ≤ 12` when absent.
    pub power: Option<usize>,
    pub w: WParams,
    pub budget: Budget,
    /// Displacement table range.
    pub range: i64,
    pub chain_powers: Vec<usize>,
}

impl Default for ClassifyParams {
    fn default() -> ClassifyParams {
        ClassifyParams { power: None, w: WParams::default(), budget: Budget::default(), range: 5, chain_powers: vec![1, 2, 3] }
    }
}

pub const BOUNDED_CITATION: &str = "the laminations fill jointly and none fills alone, so the action has bounded orbits";

fn unknown(power: usize, laminations: Vec<LaminationSummary>, joint: Option<String>, note: String) -> Classification {
    Classification { verdict: Verdict::Unknown, witness: Witness::None, power, laminations, joint, note: Some(note) }
}

/// One-edge splittings of the frame, each once, in enumeration order.
fn frame_splittings(graph: &MarkedGraph) -> Vec<OneEdgeSplitting> {
    let mut out: Vec<OneEdgeSplitting> = Vec::new();
    for (a, b) in adjacent_pairs(graph, 0) {
        for s in [a, b] {
            if !out.iter().any(|t| t.key() == s.key()) {
                out.push(s);
            }
        }
    }
    out
}

/// A verified displacement table for the first frame splitting with a
/// defined `W`, with `M̂` estimated over all frame splittings.
pub fn loxodromic_witness(graph: &MarkedGraph, f: &GraphMap, params: &ClassifyParams) -> Result<(OneEdgeSplitting, DisplacementTable)> {
    let mut ctx = WContext::build(graph, f, None, params.w)?;
    let splittings = frame_splittings(graph);
    let sample: Vec<_> = splittings.iter().map(|s| s.system.clone()).collect();
    let m = ctx.estimate_m_ffs(&sample)?;
    ctx.set_m_hat(m);
    let s = splittings
        .into_iter()
        .find(|s| ctx.w_of_splitting(s).is_ok())
        .ok_or_else(|| Error::NotApplicable("no frame splitting has a defined W".into()))?;
    let table = displacement_table(&ctx, &s, params.range, &[-2, 2])?;
    if !table.exact_slope || !table.raw_within_m_hat {
        return Err(Error::NotApplicable("displacement table does not verify".into()));
    }
    Ok((s, table))
}

/// Strata, lamination certificates, then the matching witness.
pub fn classify(graph: &MarkedGraph, f: &GraphMap, decomposition: Option<&Decomposition>, params: &ClassifyParams) -> Result<Classification> {
    let p = match params.power {
        Some(p) => p,
        None => match rotationless_power(f)? {
            Some(p) => p,
            None => return Ok(unknown(1, vec![], None, "power: no rotationless power up to 12".into())),
        },
    };
    let fp = f.power(p)?;
    let filt = strata(&fp)?;
    let mut lams = Vec::new();
    let mut summaries = Vec::new();
    let mut fills_alone = false;
    for s in filt.eg_strata() {
        let lam = match LaminationApprox::build(&fp, &filt, s, &params.w.attraction, FILLS_MIN_DEPTH) {
            Ok(l) => l,
            Err(e) => return Ok(unknown(p, summaries, None, format!("lamination of stratum {s}: {e}"))),
        };
        let v = lamination_fills(graph, &lam, params.budget);
        if let FillsVerdict::Unknown { reason } = &v.verdict {
            return Ok(unknown(p, summaries, None, format!("fills for stratum {s}: {reason}")));
        }
        fills_alone |= v.verdict.is_fills();
        summaries.push(LaminationSummary { stratum: s, depth: lam.depth(), verdict: v.verdict.kind().into(), stable_at: v.depth });
        lams.push(lam);
    }
    if fills_alone {
        return Ok(match loxodromic_witness(graph, &fp, params) {
            Ok((s, table)) => Classification {
                verdict: Verdict::Loxodromic,
                witness: Witness::Displacement { splitting: s.pair.h_names(), table },
                power: p,
                laminations: summaries,
                joint: None,
                note: None,
            },
            Err(e) => unknown(p, summaries, None, format!("displacement witness: {e}")),
        });
    }
    let joint = if lams.is_empty() { None } else { Some(laminations_jointly_fill(graph, &lams, params.budget)) };
    let joint_kind = joint.as_ref().map(|j| j.verdict.kind().to_string());
    match joint.map(|j| j.verdict) {
        Some(FillsVerdict::Unknown { reason }) => Ok(unknown(p, summaries, joint_kind, format!("joint fills: {reason}"))),
        Some(FillsVerdict::Fills { .. }) => {
            let witness = match decomposition {
                None => Witness::ByTheorem { citation: BOUNDED_CITATION.into() },
                Some(d) => {
                    let chains = params.chain_powers.iter().map(|&k| bounded_path_witness(graph, &fp, d, k)).collect::<Result<Vec<_>>>();
                    match chains {
                        Ok(chains) => Witness::Chain { chains },
                        Err(e) => return Ok(unknown(p, summaries, joint_kind, format!("bounded chain: {e}"))),
                    }
                }
            };
            Ok(Classification { verdict: Verdict::BoundedOrbits, witness, power: p, laminations: summaries, joint: joint_kind, note: None })
        }
        _ => Ok(match periodic_vertex_witness(graph, &fp) {
            Ok((s, relation)) => Classification {
                verdict: Verdict::PeriodicVertex,
                witness: Witness::InvariantSplitting { splitting: s.pair.h_names(), relation },
                power: p,
                laminations: summaries,
                joint: joint_kind,
                note: None,
            },
            Err(e) => unknown(p, summaries, joint_kind, format!("invariant splitting: {e}")),
        }),
    }
}

pub fn classify_example(ex: &Example, params: &ClassifyParams) -> Result<Classification> {
    classify(&ex.graph, &ex.map, ex.decomposition.as_ref(), params)
}
