use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{BipartiteGraph, Edge, Labels, VertexOrder};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Collapse repeated `(left, right)` lines into one edge.
    pub dedup: bool,
    /// Index vertices in label order (numeric when every label on a side is
    /// an integer) instead of first-appearance order.
    pub sort_labels: bool,
}

/// Ranks labels by value: numerically if all parse as integers, otherwise
/// lexicographically.
fn label_order(labels: &[String]) -> VertexOrder {
    let mut seq: Vec<usize> = (0..labels.len()).collect();
    let numeric: Option<Vec<i128>> = labels.iter().map(|s| s.parse().ok()).collect();
    match numeric {
        Some(v) => seq.sort_by_key(|&k| v[k]),
        None => seq.sort_by(|&a, &b| labels[a].cmp(&labels[b])),
    }
    VertexOrder::from_sequence(&seq).expect("sorted indices form a bijection")
}

#[derive(Default)]
struct Interner {
    index: HashMap<String, usize>,
    names: Vec<String>,
}

impl Interner {
    fn intern(&mut self, s: &str) -> usize {
        if let Some(&k) = self.index.get(s) {
            return k;
        }
        let k = self.names.len();
        self.index.insert(s.to_owned(), k);
        self.names.push(s.to_owned());
        k
    }
}

/// Reads `left<TAB>right` lines. Blank lines are skipped; labels are
/// interned in first-appearance order and kept on the graph.
pub fn load_edge_list<R: Read>(source: R, opts: LoadOptions) -> Result<BipartiteGraph> {
    let reader = BufReader::new(source);
    let mut left = Interner::default();
    let mut right = Interner::default();
    let mut edges = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let (Some(l), Some(r), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!(
                    "expected 2 tab-separated fields, found {}",
                    line.split('\t').count()
                ),
            });
        };
        if l.is_empty() || r.is_empty() {
            return Err(Error::Parse {
                line: lineno + 1,
                message: "empty label".into(),
            });
        }
        edges.push(Edge::new(left.intern(l), right.intern(r)));
    }
    if edges.is_empty() {
        return Err(Error::EmptyInput);
    }
    let g = BipartiteGraph::new(left.names.len(), right.names.len(), edges)?.with_labels(
        Labels {
            left: left.names,
            right: right.names,
        },
    )?;
    let g = if opts.sort_labels {
        let labels = g.labels().expect("labels were just attached");
        let (l, r) = (label_order(&labels.left), label_order(&labels.right));
        g.apply_order(&l, &r)?
    } else {
        g
    };
    Ok(if opts.dedup { g.dedup() } else { g })
}

pub fn read_edge_list_file(path: impl AsRef<Path>, opts: LoadOptions) -> Result<BipartiteGraph> {
    load_edge_list(File::open(path)?, opts)
}

/// Writes edges in stored order using labels when present, else indices.
pub fn write_edge_list<W: Write>(g: &BipartiteGraph, mut out: W) -> Result<()> {
    for e in g.edges() {
        match g.labels() {
            Some(l) => writeln!(out, "{}\t{}", l.left[e.left], l.right[e.right])?,
            None => writeln!(out, "{}\t{}", e.left, e.right)?,
        }
    }
    out.flush()?;
    Ok(())
}

/// Two-column `label<TAB>index` dictionary for one side.
pub fn write_labels<W: Write>(g: &BipartiteGraph, side: super::Side, mut out: W) -> Result<()> {
    let n = match side {
        super::Side::Left => g.n_left(),
        super::Side::Right => g.n_right(),
    };
    for v in 0..n {
        let label = match side {
            super::Side::Left => g.left_label(v),
            super::Side::Right => g.right_label(v),
        };
        writeln!(out, "{label}\t{v}")?;
    }
    out.flush()?;
    Ok(())
}
