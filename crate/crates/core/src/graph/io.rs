//! Plain-text edge lists: a `# nodes=N` header, then one `i j` pair per line
//! (0-based, `i < j`).

use std::io::{BufRead, Write};

use super::Graph;
use crate::error::{Error, Result};

pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "# nodes={}", g.n())?;
    for &(a, b) in g.edges() {
        writeln!(out, "{a} {b}")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads the format written by [`write_edge_list`]. Without a header the node
/// count is one past the largest id.
pub fn read_edge_list<R: BufRead>(input: R) -> Result<Graph> {
    let mut declared = None;
    let mut edges = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(comment) = text.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("nodes=") {
                let n = v.trim().parse::<usize>().map_err(|e| Error::Parse {
                    line: lineno,
                    message: format!("bad node count: {e}"),
                })?;
                declared = Some(n);
            }
            continue;
        }
        let mut fields = text.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected two node ids, got {text:?}"),
            });
        };
        let parse = |s: &str| {
            s.parse::<usize>().map_err(|e| Error::Parse {
                line: lineno,
                message: format!("bad node id {s:?}: {e}"),
            })
        };
        let (a, b) = (parse(a)?, parse(b)?);
        if a == b {
            return Err(Error::Parse {
                line: lineno,
                message: format!("self-loop {a} {b}"),
            });
        }
        edges.push((a, b));
    }
    let max_id = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
    let n = match declared {
        Some(n) if n < max_id => {
            return Err(Error::Format(format!(
                "header declares {n} nodes but ids reach {}",
                max_id - 1
            )))
        }
        Some(n) => n,
        None => max_id,
    };
    Graph::from_edges(n, edges)
}
