//! Textual and JSON game formats.
//!
//! Text format, one directive per line, `#` starts a comment:
//!
//! ```text
//! min  v_Min
//! max  v_Max
//! target smiley
//! edge v_Min v_Max 0
//! ```
//!
//! Vertex ids are assigned in declaration order; edges may reference
//! vertices declared later in the file. The JSON mirror is an object
//! `{"vertices": [{"name", "owner"}], "edges": [{"src", "dst", "w"}]}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{valid_name, GameGraph, Owner};

fn parse_err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

/// Parses the textual game format.
pub fn parse_game(input: &str) -> Result<GameGraph> {
    struct PendingEdge {
        src: String,
        dst: String,
        weight: i64,
        line: usize,
        col: usize,
    }
    let mut vertices: Vec<(String, Owner)> = Vec::new();
    let mut pending: Vec<PendingEdge> = Vec::new();

    for (lineno, raw) in input.lines().enumerate() {
        let lineno = lineno + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        // Token positions are byte offsets + 1, good enough for ASCII input.
        let mut tokens: Vec<(usize, &str)> = Vec::new();
        let mut offset = 0;
        for piece in line.split_whitespace() {
            let at = line[offset..].find(piece).unwrap() + offset;
            tokens.push((at + 1, piece));
            offset = at + piece.len();
        }
        if tokens.is_empty() {
            continue;
        }
        let (dcol, directive) = tokens[0];
        match directive {
            "min" | "max" | "target" => {
                if tokens.len() != 2 {
                    return Err(parse_err(
                        lineno,
                        dcol,
                        format!("'{directive}' expects exactly one vertex name"),
                    ));
                }
                let (ncol, name) = tokens[1];
                if !valid_name(name) {
                    return Err(parse_err(
                        lineno,
                        ncol,
                        format!("vertex name {name:?} is not of the form [A-Za-z0-9_]+"),
                    ));
                }
                let owner = match directive {
                    "min" => Owner::Min,
                    "max" => Owner::Max,
                    _ => Owner::Target,
                };
                vertices.push((name.to_string(), owner));
            }
            "edge" => {
                if tokens.len() != 4 {
                    return Err(parse_err(lineno, dcol, "'edge' expects: edge <src> <dst> <weight>"));
                }
                let (wcol, wtok) = tokens[3];
                let weight: i64 = wtok
                    .parse()
                    .map_err(|_| parse_err(lineno, wcol, format!("invalid integer weight {wtok:?}")))?;
                pending.push(PendingEdge {
                    src: tokens[1].1.to_string(),
                    dst: tokens[2].1.to_string(),
                    weight,
                    line: lineno,
                    col: tokens[1].0,
                });
            }
            other => {
                return Err(parse_err(
                    lineno,
                    dcol,
                    format!("unknown directive {other:?} (expected min, max, target or edge)"),
                ));
            }
        }
    }

    let index: std::collections::HashMap<&str, crate::game::VertexId> = vertices
        .iter()
        .enumerate()
        .map(|(i, (n, _))| (n.as_str(), crate::game::VertexId(i)))
        .collect();
    let lookup = |name: &str, line: usize, col: usize| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| parse_err(line, col, format!("unknown vertex {name:?} in edge")))
    };
    let mut edges = Vec::with_capacity(pending.len());
    for e in &pending {
        let src = lookup(&e.src, e.line, e.col)?;
        let dst = lookup(&e.dst, e.line, e.col)?;
        edges.push((src, dst, e.weight));
    }
    GameGraph::new(vertices, edges)
}

/// Serializes a game to the textual format; `parse_game` of the output
/// reconstructs an equal graph.
pub fn serialize_game(g: &GameGraph) -> String {
    let mut out = String::new();
    for v in g.vertices() {
        let kw = match g.owner(v) {
            Owner::Min => "min",
            Owner::Max => "max",
            Owner::Target => "target",
        };
        out.push_str(&format!("{kw} {}\n", g.name(v)));
    }
    for e in g.edges() {
        out.push_str(&format!("edge {} {} {}\n", g.name(e.src), g.name(e.dst), e.weight));
    }
    out
}

#[derive(Serialize, Deserialize)]
struct JsonVertex {
    name: String,
    owner: Owner,
}

#[derive(Serialize, Deserialize)]
struct JsonEdge {
    src: String,
    dst: String,
    w: i64,
}

#[derive(Serialize, Deserialize)]
struct JsonGame {
    vertices: Vec<JsonVertex>,
    edges: Vec<JsonEdge>,
}

/// Parses the JSON mirror format.
pub fn parse_game_json(input: &str) -> Result<GameGraph> {
    let file: JsonGame = serde_json::from_str(input)
        .map_err(|e| parse_err(e.line(), e.column(), e.to_string()))?;
    let vertices: Vec<(String, Owner)> =
        file.vertices.into_iter().map(|v| (v.name, v.owner)).collect();
    let index: std::collections::HashMap<&str, crate::game::VertexId> = vertices
        .iter()
        .enumerate()
        .map(|(i, (n, _))| (n.as_str(), crate::game::VertexId(i)))
        .collect();
    let lookup = |name: &str| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| Error::InvalidGame(format!("unknown vertex {name:?} in edge")))
    };
    let mut edges = Vec::new();
    for e in &file.edges {
        edges.push((lookup(&e.src)?, lookup(&e.dst)?, e.w));
    }
    GameGraph::new(vertices, edges)
}

/// Serializes a game to the JSON mirror format.
pub fn serialize_game_json(g: &GameGraph) -> String {
    let file = JsonGame {
        vertices: g
            .vertices()
            .map(|v| JsonVertex { name: g.name(v).to_string(), owner: g.owner(v) })
            .collect(),
        edges: g
            .edges()
            .iter()
            .map(|e| JsonEdge {
                src: g.name(e.src).to_string(),
                dst: g.name(e.dst).to_string(),
                w: e.weight,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn roundtrip_text() {
        for g in [fixtures::fig1(), fixtures::fig2(), fixtures::fig3()] {
            assert_eq!(parse_game(&serialize_game(&g)).unwrap(), g);
        }
    }

    #[test]
    fn roundtrip_json() {
        for g in [fixtures::fig1(), fixtures::fig2(), fixtures::fig3()] {
            assert_eq!(parse_game_json(&serialize_game_json(&g)).unwrap(), g);
        }
    }

    #[test]
    fn comments_and_blank_lines() {
        let g = parse_game("# a game\n\nmin a  # the only choice\ntarget t\nedge a t 3\n").unwrap();
        assert_eq!(g.n_vertices(), 2);
        assert_eq!(g.edges().len(), 1);
    }

    #[test]
    fn forward_references_are_fine() {
        let g = parse_game("edge a t 1\nmin a\ntarget t\n").unwrap();
        assert_eq!(g.find("a").unwrap().0, 0);
    }

    #[test]
    fn error_position_unknown_vertex() {
        let err = parse_game("min a\ntarget t\nedge a nope 1\n").unwrap_err();
        match err {
            Error::Parse { line, col, ref msg } => {
                assert_eq!((line, col), (3, 6));
                assert!(msg.contains("nope"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn error_position_bad_weight() {
        let err = parse_game("min a\ntarget t\nedge a t ten\n").unwrap_err();
        match err {
            Error::Parse { line, col, .. } => assert_eq!((line, col), (3, 10)),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn error_unknown_directive() {
        let err = parse_game("vertex a\n").unwrap_err();
        assert!(err.to_string().contains("unknown directive"));
    }

    #[test]
    fn deadlock_reported_by_validation() {
        let err = parse_game("min a\ntarget t\n").unwrap_err();
        assert!(err.to_string().contains("no outgoing edge"));
    }
}
