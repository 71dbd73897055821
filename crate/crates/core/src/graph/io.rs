//! Plain-text graph format.
//!
//! ```text
//! # comment
//! n m
//! u v w [mult]
//! ```
//!
//! Node references are 1-based indices; a graph read from text uses those
//! indices as its node ids. The multiplicity column is written only when it
//! differs from 1.

use std::fmt::Write as _;

use super::{Graph, NodeId};
use crate::error::{Error, Result};

pub fn write_graph(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", g.n(), g.simple_m()).unwrap();
    for e in g.edges() {
        write!(out, "{} {} {}", e.u + 1, e.v + 1, e.weight).unwrap();
        if e.mult != 1 {
            write!(out, " {}", e.mult).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn read_graph(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (line, header) = lines.next().ok_or(Error::Parse {
        line: 0,
        reason: "missing `n m` header".into(),
    })?;
    let head = numbers(line, header)?;
    if head.len() != 2 {
        return Err(Error::Parse { line, reason: "header must be `n m`".into() });
    }
    let (n, m) = (head[0] as usize, head[1] as usize);

    let mut edges = Vec::with_capacity(m);
    for (line, body) in lines {
        let f = numbers(line, body)?;
        if !(3..=4).contains(&f.len()) {
            return Err(Error::Parse { line, reason: "edge line must be `u v w [mult]`".into() });
        }
        let (u, v) = (f[0] as usize, f[1] as usize);
        if u == 0 || v == 0 || u > n || v > n {
            return Err(Error::Parse { line, reason: format!("node index out of 1..={n}") });
        }
        let mult = f.get(3).copied().unwrap_or(1);
        let mult = u32::try_from(mult).map_err(|_| Error::Parse { line, reason: "multiplicity too large".into() })?;
        edges.push((u - 1, v - 1, f[2], mult));
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: 0,
            reason: format!("header announces {m} edges, found {}", edges.len()),
        });
    }
    Graph::new((1..=n as u64).map(NodeId).collect(), edges)
}

fn numbers(line: usize, body: &str) -> Result<Vec<u64>> {
    body.split_whitespace()
        .map(|t| {
            t.parse::<u64>().map_err(|_| Error::Parse {
                line,
                reason: format!("not a non-negative integer: `{t}`"),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_multiplicity() {
        let g = read_graph("# a triangle\n3 3\n1 2 5\n2 3 6 4\n# tail\n1 3 7\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.m(), 6);
        assert_eq!(write_graph(&g), "3 3\n1 2 5\n2 3 6 4\n1 3 7\n");
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(read_graph("").is_err());
        assert!(read_graph("2 1\n1 3 1\n").is_err());
        assert!(read_graph("2 2\n1 2 1\n").is_err());
        assert!(read_graph("2 1\n1 x 1\n").is_err());
    }
}
