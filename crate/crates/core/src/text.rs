//! Line-based text format for graphs, marked graphs, maps and pairs.
//!
//! ```text
//! VERTICES
//! v
//! EDGES
//! A v v
//! MARKING v
//! x A
//! VMAP
//! v v
//! MAP
//! A A A
//! SUBGRAPH
//! A
//! ```
//!
//! Section bodies are one record per line, tokens separated by single
//! spaces, a trailing `'` reverses an edge. `#` starts a comment on parse.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{Edge, EdgePath, Graph, GraphMap, MarkedGraph};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Document {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String, String)>,
    /// Base vertex and `(letter, edge word)` rows.
    pub marking: Option<(String, Vec<(String, Vec<String>)>)>,
    pub vmap: Option<Vec<(String, String)>>,
    pub map: Option<Vec<(String, Vec<String>)>>,
    pub subgraph: Option<Vec<String>>,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Vertices,
    Edges,
    Marking,
    Vmap,
    Map,
    Subgraph,
}

fn perr<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

impl Document {
    pub fn parse(text: &str) -> Result<Document> {
        let mut doc = Document::default();
        let mut sec = Section::None;
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.split('#').next().unwrap_or("");
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.is_empty() {
                continue;
            }
            let head = toks[0];
            let header = match head {
                "VERTICES" => Some(Section::Vertices),
                "EDGES" => Some(Section::Edges),
                "MARKING" => Some(Section::Marking),
                "VMAP" => Some(Section::Vmap),
                "MAP" => Some(Section::Map),
                "SUBGRAPH" => Some(Section::Subgraph),
                _ => None,
            };
            if let Some(s) = header {
                sec = s;
                match s {
                    Section::Marking => {
                        let Some(base) = toks.get(1) else { return perr(ln, "MARKING needs a base vertex") };
                        doc.marking = Some((base.to_string(), Vec::new()));
                    }
                    Section::Vmap => doc.vmap = Some(Vec::new()),
                    Section::Map => doc.map = Some(Vec::new()),
                    Section::Subgraph => doc.subgraph = Some(Vec::new()),
                    _ if toks.len() > 1 => return perr(ln, format!("unexpected tokens after {head}")),
                    _ => {}
                }
                continue;
            }
            let owned = || toks[1..].iter().map(|s| s.to_string()).collect::<Vec<_>>();
            match sec {
                Section::None => return perr(ln, "record outside of a section"),
                Section::Vertices => doc.vertices.extend(toks.iter().map(|s| s.to_string())),
                Section::Edges => {
                    if toks.len() != 3 {
                        return perr(ln, "edge records are `name tail head`");
                    }
                    doc.edges.push((toks[0].into(), toks[1].into(), toks[2].into()));
                }
                Section::Marking => doc.marking.as_mut().unwrap().1.push((head.into(), owned())),
                Section::Vmap => {
                    if toks.len() != 2 {
                        return perr(ln, "vertex map records are `from to`");
                    }
                    doc.vmap.as_mut().unwrap().push((toks[0].into(), toks[1].into()));
                }
                Section::Map => doc.map.as_mut().unwrap().push((head.into(), owned())),
                Section::Subgraph => doc.subgraph.as_mut().unwrap().extend(toks.iter().map(|s| s.to_string())),
            }
        }
        Ok(doc)
    }

    pub fn print(&self) -> String {
        let mut out = String::new();
        let mut row = |parts: &[&str]| {
            out.push_str(&parts.join(" "));
            out.push('\n');
        };
        row(&["VERTICES"]);
        for v in &self.vertices {
            row(&[v]);
        }
        row(&["EDGES"]);
        for (n, t, h) in &self.edges {
            row(&[n, t, h]);
        }
        if let Some((base, rows)) = &self.marking {
            row(&["MARKING", base]);
            for (l, w) in rows {
                let mut p = vec![l.as_str()];
                p.extend(w.iter().map(String::as_str));
                row(&p);
            }
        }
        if let Some(vm) = &self.vmap {
            row(&["VMAP"]);
            for (a, b) in vm {
                row(&[a, b]);
            }
        }
        if let Some(m) = &self.map {
            row(&["MAP"]);
            for (e, w) in m {
                let mut p = vec![e.as_str()];
                p.extend(w.iter().map(String::as_str));
                row(&p);
            }
        }
        if let Some(h) = &self.subgraph {
            row(&["SUBGRAPH"]);
            for e in h {
                row(&[e]);
            }
        }
        out
    }

    pub fn graph(&self) -> Result<Graph> {
        let vid = |name: &str| {
            self.vertices
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| Error::InvalidInput(format!("unknown vertex {name}")))
        };
        let edges = self
            .edges
            .iter()
            .map(|(n, t, h)| Ok(Edge { name: n.clone(), tail: vid(t)?, head: vid(h)? }))
            .collect::<Result<Vec<_>>>()?;
        Graph::new(self.vertices.clone(), edges)
    }

    fn words(g: &Graph, w: &[String]) -> Result<EdgePath> {
        w.iter().map(|t| g.parse_dir(t)).collect()
    }

    pub fn marked_graph(&self) -> Result<MarkedGraph> {
        let g = self.graph()?;
        let Some((base, rows)) = &self.marking else {
            return Err(Error::InvalidInput("missing MARKING section".into()));
        };
        let b = g.vertex_index(base).ok_or_else(|| Error::InvalidInput(format!("unknown base vertex {base}")))?;
        let names: Vec<&str> = rows.iter().map(|(l, _)| l.as_str()).collect();
        let rose = Graph::rose(&names);
        let mk = rows.iter().map(|(_, w)| Self::words(&g, w)).collect::<Result<Vec<_>>>()?;
        MarkedGraph::new(g, rose, b, mk)
    }

    /// The self-map described by VMAP and MAP on `graph`.
    pub fn self_map(&self, graph: Arc<Graph>) -> Result<GraphMap> {
        let Some(rows) = &self.map else {
            return Err(Error::InvalidInput("missing MAP section".into()));
        };
        let mut images = vec![None; graph.num_edges()];
        for (e, w) in rows {
            let id = graph.edge_index(e).ok_or_else(|| Error::InvalidInput(format!("unknown edge {e}")))?;
            images[id] = Some(Self::words(&graph, w)?);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, w)| w.ok_or_else(|| Error::InvalidInput(format!("no image for edge {}", graph.edges[i].name))))
            .collect::<Result<Vec<_>>>()?;
        let vmap = match &self.vmap {
            Some(vm) => {
                let mut out = vec![None; graph.num_vertices()];
                for (a, b) in vm {
                    let ai = graph.vertex_index(a).ok_or_else(|| Error::InvalidInput(format!("unknown vertex {a}")))?;
                    let bi = graph.vertex_index(b).ok_or_else(|| Error::InvalidInput(format!("unknown vertex {b}")))?;
                    out[ai] = Some(bi);
                }
                out.into_iter()
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| Error::InvalidInput("VMAP must assign every vertex".into()))?
            }
            None if graph.is_rose() => vec![0],
            None => return Err(Error::InvalidInput("missing VMAP section".into())),
        };
        GraphMap::endo(graph, vmap, images)
    }

    pub fn subgraph_mask(&self, graph: &Graph) -> Result<Option<Vec<bool>>> {
        let Some(h) = &self.subgraph else { return Ok(None) };
        let mut mask = vec![false; graph.num_edges()];
        for e in h {
            let id = graph.edge_index(e).ok_or_else(|| Error::InvalidInput(format!("unknown edge {e}")))?;
            mask[id] = true;
        }
        Ok(Some(mask))
    }

    /// Canonical document for a marked graph, with optional self-map and
    /// subgraph.
    pub fn from_parts(mg: &MarkedGraph, map: Option<&GraphMap>, sub: Option<&[bool]>) -> Document {
        let g = &mg.graph;
        let name = |w: &[crate::word::Dir]| w.iter().map(|&d| g.dir_name(d)).collect::<Vec<_>>();
        Document {
            vertices: g.vertices.clone(),
            edges: g
                .edges
                .iter()
                .map(|e| (e.name.clone(), g.vertices[e.tail].clone(), g.vertices[e.head].clone()))
                .collect(),
            marking: Some((
                g.vertices[mg.base].clone(),
                mg.rose.edges.iter().zip(&mg.marking).map(|(l, w)| (l.name.clone(), name(w))).collect(),
            )),
            vmap: map.map(|f| {
                f.vmap.iter().enumerate().map(|(a, &b)| (g.vertices[a].clone(), g.vertices[b].clone())).collect()
            }),
            map: map.map(|f| g.edges.iter().zip(&f.images).map(|(e, w)| (e.name.clone(), name(w))).collect()),
            subgraph: sub.map(|h| (0..g.num_edges()).filter(|&e| h[e]).map(|e| g.edges[e].name.clone()).collect()),
        }
    }
}
