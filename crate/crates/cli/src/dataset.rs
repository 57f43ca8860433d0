//! Ingestion of user-supplied edge lists.
//!
//! Accepts whitespace- or comma-separated node labels, two per line. Columns
//! after the second (weights, timestamps) are ignored. Lines starting with `#`
//! or `%` are comments, except a `# nodes=N` header, which declares N
//! nodes labelled `0..N`. Duplicate edges collapse and self-loops are
//! dropped and counted. Labels are relabelled to contiguous 0-based ids:
//! numerically sorted when every label is an integer, otherwise in order of
//! first appearance.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use hcls::{Error, Graph, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// Original label of each node id.
    pub labels: Vec<String>,
    pub self_loops: usize,
    pub duplicates: usize,
}

impl LoadedGraph {
    /// True when node `i` was labelled `i` in the file.
    pub fn is_identity(&self) -> bool {
        self.labels.iter().enumerate().all(|(i, l)| l == &i.to_string())
    }

    pub fn write_mapping<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "node,label")?;
        for (i, l) in self.labels.iter().enumerate() {
            writeln!(out, "{i},{l}")?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<LoadedGraph> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    parse_edge_list(BufReader::new(file))
}

pub fn parse_edge_list<R: BufRead>(input: R) -> Result<LoadedGraph> {
    let mut declared: Option<usize> = None;
    let mut pairs: Vec<(String, String)> = Vec::new();
    let mut self_loops = 0;
    let mut saw_content = false;
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        saw_content = true;
        if let Some(comment) = text.strip_prefix('#').or_else(|| text.strip_prefix('%')) {
            if let Some(v) = comment.trim().strip_prefix("nodes=") {
                declared = Some(v.trim().parse().map_err(|e| Error::Parse {
                    line: lineno,
                    message: format!("bad node count: {e}"),
                })?);
            }
            continue;
        }
        let mut fields = text.split(|c: char| c.is_whitespace() || c == ',').filter(|f| !f.is_empty());
        let (Some(a), Some(b)) = (fields.next(), fields.next()) else {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected two node labels, got {text:?}"),
            });
        };
        if a == b {
            self_loops += 1;
            continue;
        }
        pairs.push((a.to_string(), b.to_string()));
    }
    if !saw_content || (pairs.is_empty() && declared.is_none() && self_loops == 0) {
        return Err(Error::Format("edge list is empty".into()));
    }

    let numeric: Option<Vec<(u64, u64)>> = pairs
        .iter()
        .map(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
        .collect();
    let labels: Vec<String> = match (&numeric, declared) {
        (Some(ids), Some(n)) => {
            if let Some(&(a, b)) = ids.iter().find(|&&(a, b)| a.max(b) >= n as u64) {
                return Err(Error::Format(format!(
                    "header declares {n} nodes but edge {a} {b} is out of range"
                )));
            }
            (0..n).map(|i| i.to_string()).collect()
        }
        (Some(ids), None) => {
            let set: BTreeSet<u64> = ids.iter().flat_map(|&(a, b)| [a, b]).collect();
            set.into_iter().map(|v| v.to_string()).collect()
        }
        (None, _) => {
            let mut seen = HashMap::new();
            let mut order = Vec::new();
            for (a, b) in &pairs {
                for l in [a, b] {
                    if !seen.contains_key(l) {
                        seen.insert(l.clone(), order.len());
                        order.push(l.clone());
                    }
                }
            }
            order
        }
    };
    let index: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut duplicates = 0;
    for (a, b) in &pairs {
        // numeric labels such as "007" map through their canonical form
        let id = |l: &String| -> usize {
            match index.get(l.as_str()) {
                Some(&i) => i,
                None => index[l.parse::<u64>().expect("numeric label").to_string().as_str()],
            }
        };
        let (i, j) = (id(a), id(b));
        if !edges.insert((i.min(j), i.max(j))) {
            duplicates += 1;
        }
    }
    let graph = Graph::from_edges(labels.len(), edges)?;
    Ok(LoadedGraph {
        graph,
        labels,
        self_loops,
        duplicates,
    })
}
