//! Plain-text graph format.
//!
//! ```text
//! # comment
//! n m
//! u v [w]
//! ```
//!
//! Vertices are 0-indexed. A missing weight means weight 1.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

use super::{Edge, Graph, Weight};

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| -> Result<u64> {
            s.parse::<u64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("expected a non-negative integer, got `{s}`"),
            })
        };
        match header {
            None => {
                if fields.len() != 2 {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "header must be `n m`".into(),
                    });
                }
                header = Some((num(fields[0])? as usize, num(fields[1])? as usize));
            }
            Some((n, _)) => {
                if !(2..=3).contains(&fields.len()) {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "edge line must be `u v [w]`".into(),
                    });
                }
                let (u, v) = (num(fields[0])? as usize, num(fields[1])? as usize);
                if u >= n || v >= n || u == v {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("invalid edge ({u}, {v}) for n = {n}"),
                    });
                }
                let w = match fields.get(2) {
                    Some(s) => Weight::new(num(s)?).map_err(|e| Error::Parse {
                        line: line_no,
                        message: e.to_string(),
                    })?,
                    None => Weight::ONE,
                };
                edges.push(Edge::new(u, v, w));
            }
        }
    }
    let (n, m) = header.ok_or(Error::Parse {
        line: 0,
        message: "missing `n m` header".into(),
    })?;
    if edges.len() != m {
        return Err(Error::Parse {
            line: 0,
            message: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    Graph::from_edges(n, edges)
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    parse_graph(&std::fs::read_to_string(path)?)
}

/// Serializes edges in `(u, v)` order; weights are omitted for unit-weight
/// graphs.
pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.m());
    let mut edges = g.edges().to_vec();
    edges.sort_by_key(|e| (e.u, e.v));
    let unit = g.is_unit_weight();
    for e in edges {
        if unit {
            let _ = writeln!(out, "{} {}", e.u, e.v);
        } else {
            let _ = writeln!(out, "{} {} {}", e.u, e.v, e.w.raw());
        }
    }
    out
}

pub fn write_graph_to(g: &Graph, path: &Path) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(write_graph(g).as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_default_weight() {
        let g = parse_graph("# triangle\n3 3\n0 1\n1 2 7\n# trailing\n0 2 2\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.weight(0, 1), Some(Weight::ONE));
        assert_eq!(g.weight(2, 1), Some(Weight::new(7).unwrap()));
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_graph("").is_err());
        assert!(parse_graph("3 2\n0 1\n").is_err());
        assert!(parse_graph("3 1\n0 0\n").is_err());
        assert!(parse_graph("3 1\n0 5\n").is_err());
        assert!(parse_graph("3 1\n0 x\n").is_err());
        assert!(parse_graph("3 2\n0 1\n1 0\n").is_err());
    }

    #[test]
    fn write_then_parse() {
        let g = parse_graph("4 3\n0 1 5\n1 2 3\n2 3 9\n").unwrap();
        assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
        let u = parse_graph("3 1\n0 2\n").unwrap();
        assert_eq!(write_graph(&u), "3 1\n0 2\n");
    }
}
