//! `fsplit`: classify outer automorphisms acting on the free splitting
//! complex and print the witnesses.

mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use fsplit::classify::{bounded_path_witness, classify_example, loxodromic_witness, Verdict};
use fsplit::dynamics::strata;
use fsplit::fixtures::{catalog, fixture, Example};
use fsplit::lamination::{lamination_fills, laminations_jointly_fill, LaminationApprox, FILLS_MIN_DEPTH};
use fsplit::splitting::OneEdgeSplitting;
use fsplit::text::Document;
use fsplit::whitehead::fills;
use fsplit::word::CyclicWord;
use fsplit::wproj::{displacement_table, WContext, W};

use config::Config;
use report::Report;

#[derive(Parser)]
#[command(name = "fsplit", version, about = "Outer automorphisms of free groups on the free splitting complex")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Catalog fixture to load.
    #[arg(long)]
    fixture: Option<String>,
    /// Fixture parameter as key=value; repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Marked graph and self-map in text form.
    #[arg(long, conflicts_with = "fixture")]
    input: Option<PathBuf>,
    /// Classify this power of the map.
    #[arg(long)]
    power: Option<usize>,
    /// Length of the defining leaf segments.
    #[arg(long = "seg-len")]
    seg_len: Option<usize>,
    /// Iteration horizon for attraction scans.
    #[arg(long)]
    horizon: Option<usize>,
    /// Whitehead move budget.
    #[arg(long)]
    budget: Option<usize>,
    /// Directory for JSON reports.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Config file of key=value lines.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Loxodromic, bounded orbits or periodic vertex, with a witness.
    Classify(Common),
    /// w of classes, and the displacement table of a splitting.
    W {
        #[command(flatten)]
        common: Common,
        /// Rose word; repeatable.
        #[arg(long = "class")]
        classes: Vec<String>,
        /// Edge names of H for a one-edge splitting, comma separated.
        #[arg(long)]
        splitting: Option<String>,
    },
    /// Leaf segments of each EG lamination.
    Leaf {
        #[command(flatten)]
        common: Common,
        /// Print the segment at this depth.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Fills certificates for laminations or for given rose words.
    Fills {
        #[command(flatten)]
        common: Common,
        /// Rose word; repeatable. Without words the laminations are tested.
        #[arg(long = "word")]
        words: Vec<String>,
    },
    /// Upper bound on the distance from a splitting to its image, by chain.
    Distance {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Writes the chain's vertices, as text documents, to this file.
        #[arg(long)]
        chain: Option<PathBuf>,
    },
    /// Classification plus lamination summaries, for one fixture or all.
    Report(Common),
    /// The fixture catalog.
    Fixtures {
        #[arg(long)]
        list: bool,
        #[arg(long)]
        json: bool,
    },
}

impl Common {
    fn config(&self) -> Result<Config> {
        let mut c = Config::default();
        if let Some(p) = &self.config {
            c.apply_file(p)?;
        }
        c.apply_env(std::env::vars())?;
        if let Some(v) = self.seg_len {
            c.seg_len = v;
        }
        if let Some(v) = self.horizon {
            c.horizon = v;
        }
        if let Some(v) = self.budget {
            c.budget = v;
        }
        if self.power.is_some() {
            c.power = self.power;
        }
        Ok(c)
    }

    fn load(&self) -> Result<Example> {
        match (&self.fixture, &self.input) {
            (Some(name), None) => {
                let params = self
                    .params
                    .iter()
                    .map(|p| p.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())).context("--param needs key=value"))
                    .collect::<Result<Vec<_>>>()?;
                Ok(fixture(name, &params)?)
            }
            (None, Some(path)) => load_input(path),
            _ => bail!("give exactly one of --fixture or --input"),
        }
    }

    fn emit<T: Serialize>(&self, command: &str, source: &str, cfg: &Config, result: T, text: &str) -> Result<()> {
        let report = Report::new(command, source, cfg, result);
        if let Some(dir) = &self.out {
            let path = report.write_to(dir)?;
            eprintln!("wrote {}", path.display());
        }
        if self.json {
            print!("{}", report.to_json()?);
        } else {
            print!("{text}");
        }
        Ok(())
    }
}

fn load_input(path: &PathBuf) -> Result<Example> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc = Document::parse(&text)?;
    let graph = doc.marked_graph()?;
    let map = doc.self_map(graph.graph.clone())?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("input").to_string();
    Ok(Example {
        name,
        graph,
        map,
        extra: Vec::new(),
        decomposition: None,
        expected: None,
        matrix: None,
        notes: vec![format!("loaded from {}", path.display())],
    })
}

fn run_classify(c: &Common) -> Result<()> {
    let cfg = c.config()?;
    let ex = c.load()?;
    let cl = classify_example(&ex, &cfg.params())?;
    let mut text = format!("{}: {:?} (power {})\n", ex.name, cl.verdict, cl.power);
    for l in &cl.laminations {
        text += &format!("  stratum {}: {} at depth {:?}\n", l.stratum, l.verdict, l.stable_at);
    }
    if let Some(j) = &cl.joint {
        text += &format!("  jointly: {j}\n");
    }
    if let Some(n) = &cl.note {
        text += &format!("  note: {n}\n");
    }
    if cl.verdict != Verdict::Unknown {
        text += &format!("  witness: {}\n", serde_json::to_value(&cl.witness)?["kind"].as_str().unwrap_or(""));
    }
    c.emit("classify", &ex.name, &cfg, &cl, &text)
}

#[derive(Serialize)]
struct WRow {
    class: String,
    w: Option<i64>,
}

#[derive(Serialize)]
struct WResult {
    m_hat: i64,
    classes: Vec<WRow>,
    table: Option<fsplit::wproj::DisplacementTable>,
}

fn run_w(c: &Common, classes: &[String], splitting: &Option<String>) -> Result<()> {
    let cfg = c.config()?;
    let ex = c.load()?;
    let params = cfg.params();
    let fp = ex.map.power(params.power.unwrap_or(1))?;
    let mut ctx = WContext::build(&ex.graph, &fp, None, params.w)?;
    let (_, base) = loxodromic_witness(&ex.graph, &fp, &params)?;
    ctx.set_m_hat(base.m_hat);
    let mut rows = Vec::new();
    let mut text = format!("{}: M = {}\n", ex.name, base.m_hat);
    for s in classes {
        let cw = CyclicWord::new(&ex.graph.rose.parse_word(s)?);
        let w = match ctx.w_of(&cw)? {
            W::Defined(v) => Some(v),
            W::NotDefined => None,
        };
        text += &format!("  w({s}) = {}\n", w.map_or("not defined".into(), |v| v.to_string()));
        rows.push(WRow { class: s.clone(), w });
    }
    let table = match splitting {
        None => None,
        Some(h) => {
            let names: Vec<&str> = h.split(',').map(str::trim).collect();
            let s = OneEdgeSplitting::from_names(&ex.graph, &names)?;
            let t = displacement_table(&ctx, &s, params.range, &[-2, 2])?;
            text += &format!("  W(S) = {}, slope -1 exact: {}, raw within M: {}\n", t.base.value, t.exact_slope, t.raw_within_m_hat);
            for r in &t.rows {
                text += &format!("    m = {:>3}: {}\n", r.m, r.w);
            }
            Some(t)
        }
    };
    c.emit("w", &ex.name, &cfg, WResult { m_hat: base.m_hat, classes: rows, table }, &text)
}

#[derive(Serialize)]
struct LeafRow {
    stratum: usize,
    seed: String,
    lengths: Vec<usize>,
    defining: String,
    segment: Option<String>,
}

fn laminations(ex: &Example, cfg: &Config) -> Result<Vec<LaminationApprox>> {
    let p = cfg.params();
    let fp = ex.map.power(p.power.unwrap_or(1))?;
    let filt = strata(&fp)?;
    filt.eg_strata()
        .into_iter()
        .map(|s| LaminationApprox::build(&fp, &filt, s, &p.w.attraction, FILLS_MIN_DEPTH).map_err(Into::into))
        .collect()
}

fn run_leaf(c: &Common, depth: Option<usize>) -> Result<()> {
    let cfg = c.config()?;
    let ex = c.load()?;
    let g = &ex.graph.graph;
    let mut rows = Vec::new();
    let mut text = format!("{}\n", ex.name);
    for lam in laminations(&ex, &cfg)? {
        let lengths: Vec<usize> = lam.segments.iter().map(Vec::len).collect();
        let segment = depth.map(|k| g.word_string(&lam.segments[k.min(lam.depth())]));
        text += &format!("  stratum {} seed {}: lengths {:?}\n  defining {}\n", lam.stratum, g.dir_name(lam.seed), lengths, g.word_string(&lam.defining));
        if let Some(s) = &segment {
            text += &format!("  segment {s}\n");
        }
        rows.push(LeafRow { stratum: lam.stratum, seed: g.dir_name(lam.seed), lengths, defining: g.word_string(&lam.defining), segment });
    }
    c.emit("leaf", &ex.name, &cfg, rows, &text)
}

#[derive(Serialize)]
struct FillsRow {
    subject: String,
    verdict: String,
    depth: Option<usize>,
    support_ranks: Option<Vec<usize>>,
}

fn run_fills(c: &Common, words: &[String]) -> Result<()> {
    let cfg = c.config()?;
    let ex = c.load()?;
    let budget = cfg.params().budget;
    let mut rows = Vec::new();
    if words.is_empty() {
        let lams = laminations(&ex, &cfg)?;
        for lam in &lams {
            let v = lamination_fills(&ex.graph, lam, budget);
            rows.push(FillsRow {
                subject: format!("stratum {}", lam.stratum),
                verdict: v.verdict.kind().into(),
                depth: v.depth,
                support_ranks: v.support.map(|s| s.ranks()),
            });
        }
        if lams.len() > 1 {
            let v = laminations_jointly_fill(&ex.graph, &lams, budget);
            rows.push(FillsRow { subject: "jointly".into(), verdict: v.verdict.kind().into(), depth: v.depth, support_ranks: v.support.map(|s| s.ranks()) });
        }
    } else {
        let classes = words.iter().map(|w| Ok(CyclicWord::new(&ex.graph.rose.parse_word(w)?))).collect::<Result<Vec<_>>>()?;
        let v = fills(ex.graph.rank(), &classes, budget);
        rows.push(FillsRow { subject: words.join(", "), verdict: v.kind().into(), depth: None, support_ranks: None });
    }
    let mut text = format!("{}\n", ex.name);
    for r in &rows {
        text += &format!("  {}: {}\n", r.subject, r.verdict);
    }
    c.emit("fills", &ex.name, &cfg, rows, &text)
}

#[derive(Serialize)]
struct DistanceResult {
    k: usize,
    upper_bound: usize,
    vertices: Vec<String>,
    chain: fsplit::classify::BoundedChain,
}

fn run_distance(c: &Common, k: usize, chain_file: Option<&PathBuf>) -> Result<()> {
    let cfg = c.config()?;
    let ex = c.load()?;
    let d = ex.decomposition.as_ref().context("fixture has no decomposition data")?;
    let chain = bounded_path_witness(&ex.graph, &ex.map, d, k)?;
    let mut text = format!("{}: d(<G,J3>, <G,J3>^(f^{k})) ≤ {}\n", ex.name, chain.moves);
    if let Some(path) = chain_file {
        let body: Vec<String> = chain.serializations().iter().enumerate().map(|(i, d)| format!("# vertex {i}\n{d}")).collect();
        std::fs::write(path, body.join("\n")).with_context(|| format!("writing {}", path.display()))?;
        text += &format!("chain written to {}\n", path.display());
    }
    let result = DistanceResult { k, upper_bound: chain.moves, vertices: chain.serializations(), chain };
    c.emit("distance", &ex.name, &cfg, result, &text)
}

#[derive(Serialize)]
struct FullReport {
    classification: fsplit::classify::Classification,
    leaves: Vec<LeafSummary>,
}

#[derive(Serialize)]
struct LeafSummary {
    stratum: usize,
    depth: usize,
    defining: String,
}

fn run_report(c: &Common) -> Result<()> {
    let names: Vec<String> = match (&c.fixture, &c.input) {
        (None, None) => catalog().into_iter().filter(|e| e.name != "surface_example" && e.name != "rank2").map(|e| e.name.to_string()).collect(),
        _ => vec![String::new()],
    };
    for name in names {
        let mut one = c.clone();
        if !name.is_empty() {
            one.fixture = Some(name);
        }
        let cfg = one.config()?;
        let ex = one.load()?;
        let classification = classify_example(&ex, &cfg.params())?;
        let g = &ex.graph.graph;
        let leaves = laminations(&ex, &cfg)?
            .iter()
            .map(|l| LeafSummary { stratum: l.stratum, depth: l.depth(), defining: g.word_string(&l.defining) })
            .collect();
        let text = format!("{}: {:?}\n", ex.name, classification.verdict);
        one.emit("report", &ex.name, &cfg, FullReport { classification, leaves }, &text)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CatalogRow {
    name: &'static str,
    params: &'static str,
    about: &'static str,
}

fn run_fixtures(json: bool) -> Result<()> {
    let rows: Vec<CatalogRow> = catalog().into_iter().map(|e| CatalogRow { name: e.name, params: e.params, about: e.about }).collect();
    if json {
        let cfg = Config::default();
        print!("{}", Report::new("fixtures", "catalog", &cfg, &rows).to_json()?);
    } else {
        for r in &rows {
            println!("{:<18} {:<24} {}", r.name, r.params, r.about);
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Classify(c) => run_classify(&c),
        Command::W { common, classes, splitting } => run_w(&common, &classes, &splitting),
        Command::Leaf { common, depth } => run_leaf(&common, depth),
        Command::Fills { common, words } => run_fills(&common, &words),
        Command::Distance { common, k, chain } => run_distance(&common, k, chain.as_ref()),
        Command::Report(c) => run_report(&c),
        Command::Fixtures { list: _, json } => run_fixtures(json),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
