//! Failure-set assembly from repeated flags and directive files.
//!
//! Directive files hold one directive per line — `fail-edge u,v`,
//! `fail-vertex v`, `insert-edge u,v` — with `#` comments and blank
//! lines ignored. Edge endpoints accept either a comma or whitespace
//! between them, so `fail-edge 1,2` and `fail-edge 1 2` mean the same.

use ftscc_core::{Edge, Error, FailureSet, Result, VertexId};

/// Parses "u,v" (or "u v") into an edge.
pub fn parse_edge(text: &str) -> Result<Edge> {
    let cleaned = text.replace(',', " ");
    let mut it = cleaned.split_whitespace();
    let parse_end = |tok: Option<&str>| -> Result<u32> {
        tok.and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("expected an edge as \"u,v\", got {text:?}"),
            })
    };
    let u = parse_end(it.next())?;
    let v = parse_end(it.next())?;
    if it.next().is_some() {
        return Err(Error::Parse {
            line: 0,
            message: format!("expected an edge as \"u,v\", got {text:?}"),
        });
    }
    Ok(Edge::of(u, v))
}

/// Everything a directive source can request.
#[derive(Debug, Default)]
pub struct FailureSpec {
    pub failures: FailureSet,
    pub insertions: Vec<Edge>,
}

impl FailureSpec {
    /// Collects flags plus an optional directive file. `allow_insertions`
    /// is false for plain queries, where `insert-edge` is an error.
    pub fn collect(
        fail_edges: &[String],
        fail_vertices: &[u32],
        file: Option<&std::path::Path>,
        allow_insertions: bool,
        insert_edges: &[String],
    ) -> Result<Self> {
        let mut spec = FailureSpec::default();
        for text in fail_edges {
            spec.failures.add_edge(parse_edge(text)?);
        }
        for &v in fail_vertices {
            spec.failures.add_vertex(VertexId(v));
        }
        for text in insert_edges {
            spec.insertions.push(parse_edge(text)?);
        }
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)?;
            spec.extend_from_directives(&text, allow_insertions)?;
        }
        spec.insertions.sort();
        spec.insertions.dedup();
        Ok(spec)
    }

    fn extend_from_directives(&mut self, text: &str, allow_insertions: bool) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = i + 1;
            let (directive, rest) = line.split_once(char::is_whitespace).ok_or(Error::Parse {
                line: lineno,
                message: format!("directive {line:?} has no argument"),
            })?;
            match directive {
                "fail-edge" => {
                    let edge = parse_edge(rest).map_err(|_| Error::Parse {
                        line: lineno,
                        message: format!("bad edge in {line:?}"),
                    })?;
                    self.failures.add_edge(edge);
                }
                "fail-vertex" => {
                    let v: u32 = rest.trim().parse().map_err(|_| Error::Parse {
                        line: lineno,
                        message: format!("bad vertex in {line:?}"),
                    })?;
                    self.failures.add_vertex(VertexId(v));
                }
                "insert-edge" if allow_insertions => {
                    self.insertions
                        .push(parse_edge(rest).map_err(|_| Error::Parse {
                            line: lineno,
                            message: format!("bad edge in {line:?}"),
                        })?);
                }
                "insert-edge" => {
                    return Err(Error::Parse {
                        line: lineno,
                        message: "insert-edge directives are only valid for `update`".to_string(),
                    });
                }
                other => {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("unknown directive {other:?}"),
                    });
                }
            }
        }
        Ok(())
    }
}
