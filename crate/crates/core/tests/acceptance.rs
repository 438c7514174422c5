//! Runs every acceptance criterion and prints one line per criterion.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use fsplit::classify::{bounded_path_witness, classify_example, rank2_classify, ClassifyParams, LinkKind, Rank2Verdict, Verdict, Witness};
use fsplit::dynamics::{pf_eigenvalue, strata, StratumKind, TransitionMatrix};
use fsplit::factor::FreeFactorSystem;
use fsplit::fixtures::{bdd_no_periodic, divergence_pair, filling_reducible, linear_example, rank2_battery, Example};
use fsplit::lamination::{lamination_fills, laminations_jointly_fill, pf_estimate, AttractionParams, LaminationApprox, FILLS_MIN_DEPTH};
use fsplit::splitting::{adjacent, adjacent_pairs, pair_relation_check, Adjacency, OneEdgeSplitting};
use fsplit::whitehead::{fills, Budget, FillsVerdict};
use fsplit::word::{CyclicWord, Dir};
use fsplit::wproj::{displacement_table, divergence_check, lipschitz_check, WContext, WParams, W};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: Duration) -> Result<Duration, String> {
    let e = t.elapsed();
    ensure(e < limit, || format!("took {e:.2?}, limit {limit:?}"))?;
    Ok(e)
}

fn lams(ex: &Example) -> Result<Vec<LaminationApprox>, String> {
    let filt = strata(&ex.map).map_err(|e| e.to_string())?;
    filt.eg_strata()
        .into_iter()
        .map(|s| LaminationApprox::build(&ex.map, &filt, s, &AttractionParams::default(), FILLS_MIN_DEPTH).map_err(|e| e.to_string()))
        .collect()
}

fn filling_reducible_reproduced() -> Outcome {
    let t = Instant::now();
    let ex = filling_reducible(3).map_err(|e| e.to_string())?;
    let g = &ex.graph.graph;
    let filt = strata(&ex.map).map_err(|e| e.to_string())?;
    ensure(filt.kinds() == [StratumKind::Fixed, StratumKind::Eg], || format!("strata {:?}", filt.kinds()))?;
    ensure(filt.subgraph(0) == ex.edges(&["X", "Y", "Z"]), || "bottom stratum is not G1".into())?;
    let ab = [g.edge_index("A").unwrap(), g.edge_index("B").unwrap()];
    let mut top = filt.strata[1].edges.clone();
    top.sort();
    ensure(top == ab, || format!("EG stratum {top:?}"))?;
    let block = TransitionMatrix::of(&ex.map).block(&ab);
    ensure(block.m == [[1, 1], [2, 3]], || format!("block {:?}", block.m))?;
    let pf = pf_eigenvalue(&block).map_err(|e| e.to_string())?;
    let err = (pf - (2.0 + 3f64.sqrt())).abs();
    ensure(err <= 1e-9, || format!("pf {pf}, error {err:e}"))?;
    let l = lams(&ex)?;
    let v = lamination_fills(&ex.graph, &l[0], Budget::default());
    let depth = v.depth.unwrap_or(usize::MAX);
    ensure(v.verdict.is_fills() && depth <= 6, || format!("lamination {} at depth {:?}", v.verdict.kind(), v.depth))?;
    let c = classify_example(&ex, &ClassifyParams::default()).map_err(|e| e.to_string())?;
    ensure(c.verdict == Verdict::Loxodromic, || format!("classified {:?}", c.verdict))?;
    let e = within(t, Duration::from_secs(10))?;
    Ok(format!("FIXED+EG, block [[1,1],[2,3]], pf error {err:.1e}, fills at depth {depth}, Loxodromic, {e:.2?}"))
}

fn bounded_orbits_reproduced() -> Outcome {
    let t = Instant::now();
    let ex = bdd_no_periodic(3).map_err(|e| e.to_string())?;
    let l = lams(&ex)?;
    ensure(l.len() == 2, || format!("{} EG strata", l.len()))?;
    for (i, lam) in l.iter().enumerate() {
        let v = lamination_fills(&ex.graph, lam, Budget::default());
        ensure(v.verdict.is_proper(), || format!("lamination {i}: {}", v.verdict.kind()))?;
    }
    let joint = laminations_jointly_fill(&ex.graph, &l, Budget::default());
    ensure(joint.verdict.is_fills(), || format!("jointly {}", joint.verdict.kind()))?;
    let c = classify_example(&ex, &ClassifyParams::default()).map_err(|e| e.to_string())?;
    ensure(c.verdict == Verdict::BoundedOrbits, || format!("classified {:?}", c.verdict))?;
    let d = ex.decomposition.as_ref().ok_or("no decomposition")?;
    let mut moves = Vec::new();
    for k in 1..=3 {
        let chain = bounded_path_witness(&ex.graph, &ex.map, d, k).map_err(|e| format!("k={k}: {e}"))?;
        let fk = ex.map.power(k).map_err(|e| e.to_string())?;
        let (f1, f2) = (ex.extra("f1").unwrap().power(k).unwrap(), ex.extra("f2").unwrap().power(k).unwrap());
        // re-check every arrow
        for link in &chain.links {
            let (a, b) = (&chain.pairs[link.from], &chain.pairs[link.to]);
            let ok = match link.kind {
                LinkKind::Face => a.graph == b.graph && (a.h == b.h || a.faces().map_err(|e| e.to_string())?.iter().any(|p| p.h == b.h)),
                LinkKind::Equal => {
                    let h = if link.from == 1 { &f1 } else { &f2 };
                    pair_relation_check(h, a, b, 16).map_err(|e| e.to_string())?.holds()
                }
            };
            ensure(ok, || format!("k={k}: link {} -> {} fails", link.from, link.to))?;
        }
        let start = &chain.pairs[0];
        ensure(start.h == d.j3, || "chain does not start at <G,J3>".into())?;
        let end = start.remark(&fk).map_err(|e| e.to_string())?;
        ensure(chain.pairs[6] == end, || format!("k={k}: chain does not end at <G,J3>^(f^k)"))?;
        ensure(chain.serializations().len() == 5 && chain.moves <= 4, || format!("k={k}: {} moves", chain.moves))?;
        moves.push(chain.moves);
    }
    let e = within(t, Duration::from_secs(30))?;
    Ok(format!("two ProperFactor laminations, jointly Fills, BoundedOrbits, chain moves {moves:?} for k = 1, 2, 3, {e:.2?}"))
}

fn w_context() -> Result<WContext, String> {
    let ex = filling_reducible(3).map_err(|e| e.to_string())?;
    let mut ctx = WContext::build(&ex.graph, &ex.map, None, WParams::default()).map_err(|e| e.to_string())?;
    let sample: Vec<FreeFactorSystem> = [vec![0, 1, 2, 3], vec![0, 1, 2, 4], vec![3, 4], vec![0, 3, 4]]
        .into_iter()
        .map(|g| FreeFactorSystem::letters(5, &[g]))
        .collect();
    let m = ctx.estimate_m_ffs(&sample).map_err(|e| e.to_string())?;
    ctx.set_m_hat(m);
    Ok(ctx)
}

fn w_laws_exact(ctx: &WContext) -> Outcome {
    let classes = ["A", "B", "A B", "A X", "B Y'", "A Z A", "A B'", "X A Y B"];
    let mut checked = 0;
    for s in classes {
        let c = CyclicWord::new(&ctx.graph.rose.parse_word(s).unwrap());
        let Some(w) = ctx.w_of(&c).map_err(|e| e.to_string())?.value() else { continue };
        for m in -5..=5 {
            let moved = ctx.iterate(&c, m).map_err(|e| e.to_string())?;
            let got = ctx.w_of(&moved).map_err(|e| e.to_string())?;
            ensure(got == W::Defined(w + m), || format!("w({s} moved {m}) = {got:?}, want {}", w + m))?;
            checked += 1;
        }
    }
    ensure(checked > 0, || "no class with defined w".into())?;
    let s = OneEdgeSplitting::from_names(&ctx.graph, &["X", "Y", "Z", "A"]).map_err(|e| e.to_string())?;
    let tab = displacement_table(ctx, &s, 5, &[-2, 2]).map_err(|e| e.to_string())?;
    ensure(tab.rows.len() == 11 && tab.exact_slope, || format!("transport table not exact: {tab:?}"))?;
    ensure(tab.rows.iter().all(|r| r.w == tab.base.value - r.m), || "W(S^(phi^m)) != W(S) - m".into())?;
    ensure(tab.raw_within_m_hat, || format!("raw values off by more than {}", tab.m_hat))?;
    let raw: Vec<String> = tab.rows.iter().filter_map(|r| r.raw.map(|v| format!("m={}: {} vs {}", r.m, v, r.w))).collect();
    Ok(format!("{checked} w translations exact, W slope -1 over m in [-5,5], raw {} within M = {}", raw.join(", "), tab.m_hat))
}

fn lipschitz(ctx: &WContext) -> Outcome {
    let mut pairs = adjacent_pairs(&ctx.graph, 6);
    let remarked = ctx.graph.remark(&ctx.f, None).map_err(|e| e.to_string())?;
    pairs.extend(adjacent_pairs(&remarked, 6));
    for (a, b) in &pairs {
        let adj = adjacent(a, b, 10_000).map_err(|e| e.to_string())?;
        ensure(matches!(adj, Adjacency::Adjacent(_)), || format!("pair not adjacent: {adj:?}"))?;
    }
    let r = lipschitz_check(ctx, &pairs).map_err(|e| e.to_string())?;
    ensure(r.rows.len() >= 20, || format!("only {} pairs with defined W", r.rows.len()))?;
    ensure(r.violations == 0, || format!("{} violations of {}", r.violations, r.bound))?;
    let max = r.rows.iter().map(|x| x.delta).max().unwrap_or(0);
    Ok(format!("{} adjacent pairs with defined W, max |dW| = {max} <= 8M = {}, 0 violations", r.rows.len(), r.bound))
}

fn rank_two() -> Outcome {
    let params = ClassifyParams { range: 4, ..ClassifyParams::default() };
    let battery = rank2_battery().map_err(|e| e.to_string())?;
    ensure(battery.len() >= 10, || format!("battery of {}", battery.len()))?;
    let mut lox = 0;
    for ex in &battery {
        let mtx = ex.matrix.ok_or("battery entry without matrix")?;
        let c = classify_example(ex, &params).map_err(|e| format!("{}: {e}", ex.name))?;
        match rank2_classify(mtx).map_err(|e| e.to_string())? {
            Rank2Verdict::Loxodromic => {
                ensure(c.verdict == Verdict::Loxodromic, || format!("{mtx:?}: {:?}", c.verdict))?;
                let Witness::Displacement { table, .. } = &c.witness else { return Err(format!("{mtx:?}: no table")) };
                let ms: Vec<i64> = table.rows.iter().map(|r| r.m).collect();
                ensure(ms == (-4..=4).collect::<Vec<_>>() && table.exact_slope, || format!("{mtx:?}: table {ms:?}"))?;
                ensure(table.rows.iter().all(|r| r.w == table.base.value - r.m), || format!("{mtx:?}: slope is not -1"))?;
                lox += 1;
            }
            Rank2Verdict::NotLoxodromic => ensure(c.verdict != Verdict::Loxodromic && c.verdict != Verdict::Unknown, || {
                format!("{mtx:?}: {:?}", c.verdict)
            })?,
        }
    }
    Ok(format!("{} matrices agree ({lox} loxodromic with slope -1 on [-4,4])", battery.len()))
}

fn whitehead_oracle() -> Outcome {
    let t = Instant::now();
    let mut total = 0;
    let mut filling = 0;
    for n in 1..=3 {
        for c in common::canonical_words(n, 6) {
            total += 1;
            let brute = common::in_proper_factor(n, &c);
            match fills(n, std::slice::from_ref(&c), Budget::default()) {
                FillsVerdict::Fills { .. } => {
                    ensure(brute.is_none(), || format!("rank {n} {c:?}: Fills, but {brute:?} misses a letter"))?;
                    filling += 1;
                }
                FillsVerdict::ProperFactor { witness, .. } => {
                    let (rep, _) = brute.ok_or_else(|| format!("rank {n} {c:?}: ProperFactor, brute force finds none"))?;
                    ensure(witness.is_proper() && witness.carries(&c), || format!("rank {n} {c:?}: bad witness"))?;
                    let present: Vec<usize> = (0..n).filter(|&x| rep.letters().iter().any(|d| d.edge() == x)).collect();
                    ensure(FreeFactorSystem::letters(n, &[present]).carries(&rep), || format!("{rep:?} not carried by its letters"))?;
                }
                FillsVerdict::Unknown { reason } => return Err(format!("rank {n} {c:?}: Unknown ({reason})")),
            }
        }
    }
    let e = within(t, Duration::from_secs(300))?;
    Ok(format!("{total} classes in rank <= 3 of length <= 6 agree ({filling} fill), {e:.2?}"))
}

fn linear_stabilizer() -> Outcome {
    let ex = linear_example(1, 0).map_err(|e| e.to_string())?;
    let (a, b) = (ex.extra("theta_1_0").unwrap(), ex.extra("theta_0_1").unwrap());
    let ab = a.compose(b).map_err(|e| e.to_string())?;
    let ba = b.compose(a).map_err(|e| e.to_string())?;
    ensure(ab.images == ba.images, || "generators do not commute edgewise".into())?;
    let g = &ex.graph.graph;
    for (name, th) in [("theta_1_0", a), ("theta_0_1", b)] {
        for s in ["X", "Y X Y'", "Z X Z'"] {
            let p = g.parse_word(s).unwrap();
            let fixed = th.is_nielsen(&p).map_err(|e| e.to_string())? && th.fixes_class(&CyclicWord::new(&p)).map_err(|e| e.to_string())?;
            ensure(fixed, || format!("{name} moves [{s}]"))?;
        }
    }
    let l = lams(&ex)?;
    let lam = &l[0];
    for (name, th) in [("theta_1_0", a), ("theta_0_1", b)] {
        for d in 0..=lam.depth() {
            let v = pf_estimate(th, lam, d).map_err(|e| e.to_string())?;
            ensure(v == 0.0, || format!("{name} at depth {d}: {v}"))?;
            let seg = &lam.segments[d];
            let img = th.map_path(seg).map_err(|e| e.to_string())?;
            let band = end_band(seg, &img);
            ensure(band <= 2, || format!("{name} at depth {d}: segment changes beyond {band} letters at its ends"))?;
        }
    }
    Ok(format!("commute; fix [X], [YXY'], [ZXZ']; pf estimate 0 at depths 0..={}", lam.depth()))
}

/// Letters by which `b` differs from `a` at its ends, or `usize::MAX` when
/// the two differ away from the ends.
fn end_band(a: &[Dir], b: &[Dir]) -> usize {
    let pre = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let suf = a.iter().rev().zip(b.iter().rev()).take_while(|(x, y)| x == y).count();
    if pre + suf >= a.len().min(b.len()) {
        a.len().abs_diff(b.len())
    } else {
        usize::MAX
    }
}

fn divergence() -> Outcome {
    let ex = divergence_pair().map_err(|e| e.to_string())?;
    let mut ctx = WContext::build(&ex.graph, &ex.map, None, WParams::default()).map_err(|e| e.to_string())?;
    let sample: Vec<FreeFactorSystem> = [vec![0], vec![1]].into_iter().map(|g| FreeFactorSystem::letters(2, &[g])).collect();
    let m = ctx.estimate_m_ffs(&sample).map_err(|e| e.to_string())?;
    ctx.set_m_hat(m);
    let psi = ex.extra("psi").ok_or("fixture has no psi")?;
    let other = WContext::build(&ex.graph, psi, None, WParams::default()).map_err(|e| e.to_string())?;
    ensure(other.u_plus != ctx.u_plus, || "laminations are not distinct".into())?;
    let t = OneEdgeSplitting::from_names(&ex.graph, &["y"]).map_err(|e| e.to_string())?;
    let r = divergence_check(&ctx, psi, &t, 20, 10).map_err(|e| e.to_string())?;
    let n = r.band_start.ok_or_else(|| format!("no band of width 2M = {} over 11 steps: {:?}", 2 * m, r.psi_table))?;
    ensure(n <= 10, || format!("band starts at {n}"))?;
    let band: Vec<i64> = r.psi_table[n as usize..=n as usize + 10].iter().map(|x| x.1.unwrap()).collect();
    let width = band.iter().max().unwrap() - band.iter().min().unwrap();
    ensure(width <= 2 * m, || format!("width {width}"))?;
    ensure(r.phi_slope_exact, || format!("phi table {:?}", r.phi_table))?;
    Ok(format!("psi table in a band of width {width} <= 2M = {} on [{n}, {}]; phi table slope +1", 2 * m, n + 10))
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |i: usize, name: &str, r: Outcome| {
        match r {
            Ok(detail) => println!("criterion {i} PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {i} FAIL {name}: {why}");
            }
        }
    };
    report(1, "filling reducible example", filling_reducible_reproduced());
    report(2, "bounded orbits example", bounded_orbits_reproduced());
    match w_context() {
        Ok(ctx) => {
            report(3, "exact W laws", w_laws_exact(&ctx));
            report(4, "Lipschitz bound", lipschitz(&ctx));
        }
        Err(e) => {
            report(3, "exact W laws", Err(e.clone()));
            report(4, "Lipschitz bound", Err(e));
        }
    }
    report(5, "rank two trace rule", rank_two());
    report(6, "Whitehead oracle", whitehead_oracle());
    report(7, "linear example stabilizer", linear_stabilizer());
    report(8, "divergence band", divergence());
    if failed == 0 {
        println!("acceptance: 8 of 8 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 8 criteria fail");
        ExitCode::FAILURE
    }
}
