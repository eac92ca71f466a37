use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::Graph;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: expected two integer node ids, got {content:?}")]
    MalformedLine { line: usize, content: String },
    #[error("no edges in input")]
    EmptyInput,
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// An undirected simple graph read from an edge list, with the original
/// node ids: vertex `v` was `original_ids[v]` in the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedGraph {
    pub graph: Graph,
    pub original_ids: Vec<u64>,
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
}

/// Reads whitespace-separated `u v` pairs, one per line. Lines starting with
/// `#` and blank lines are skipped. Duplicate and reversed pairs collapse to
/// one edge and self-loops are dropped. Ids are remapped densely in
/// ascending original order.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<ParsedGraph, ParseError> {
    let mut pairs = BTreeSet::new();
    let mut self_loops = 0;
    let mut seen = 0;
    let mut ids = BTreeSet::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let malformed = || ParseError::MalformedLine {
            line: index + 1,
            content: text.to_string(),
        };
        let mut tokens = text.split_whitespace();
        let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(malformed());
        };
        let a: u64 = a.parse().map_err(|_| malformed())?;
        let b: u64 = b.parse().map_err(|_| malformed())?;
        seen += 1;
        if a == b {
            self_loops += 1;
            ids.insert(a);
            continue;
        }
        ids.insert(a);
        ids.insert(b);
        pairs.insert((a.min(b), a.max(b)));
    }
    if pairs.is_empty() {
        return Err(ParseError::EmptyInput);
    }
    if self_loops > 0 {
        log::warn!("dropped {self_loops} self-loops");
    }
    // A node that only had a self-loop has no edges left.
    let used: BTreeSet<u64> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    if used.len() < ids.len() {
        log::warn!("{} nodes only had self-loops and were dropped", ids.len() - used.len());
    }
    let original_ids: Vec<u64> = used.into_iter().collect();
    let label: BTreeMap<u64, usize> = original_ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let edges = pairs.iter().map(|(a, b)| (label[a], label[b])).collect();
    Ok(ParsedGraph {
        graph: Graph::with_edges(original_ids.len(), edges, false),
        original_ids,
        self_loops_dropped: self_loops,
        duplicates_dropped: seen - self_loops - pairs.len(),
    })
}

/// Opens an edge-list file, decompressing it if it starts with the gzip
/// magic bytes.
pub fn read_edge_list(path: &Path) -> Result<ParsedGraph, ParseError> {
    let mut file = File::open(path)?;
    let mut magic = [0u8; 2];
    let got = file.read(&mut magic)?;
    let file = File::open(path)?;
    if got == 2 && magic == [0x1f, 0x8b] {
        parse_edge_list(BufReader::new(MultiGzDecoder::new(file)))
    } else {
        parse_edge_list(BufReader::new(file))
    }
}

/// Writes `graph` as an edge list with a `# Nodes: N Edges: E` header.
/// With `collapse`, parallel edges are written once.
pub fn write_edge_list<W: Write>(graph: &Graph, collapse: bool, mut out: W) -> io::Result<()> {
    let collapsed;
    let graph = if collapse {
        collapsed = graph.collapsed();
        &collapsed
    } else {
        graph
    };
    writeln!(out, "# Nodes: {} Edges: {}", graph.vertex_count(), graph.edge_count())?;
    for &(u, v) in graph.edges() {
        writeln!(out, "{u}\t{v}")?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(s: &str) -> Result<ParsedGraph, ParseError> {
        parse_edge_list(s.as_bytes())
    }

    #[test]
    fn comments_and_dedup() {
        let p = parse("# comment\n0 1\n1 2").unwrap();
        assert_eq!((p.graph.vertex_count(), p.graph.edge_count()), (3, 2));
        let d = parse("0 1\n1 0\n0 1").unwrap();
        assert_eq!((d.graph.vertex_count(), d.graph.edge_count()), (2, 1));
        assert_eq!(d.duplicates_dropped, 2);
    }

    #[test]
    fn remaps_sparse_ids() {
        let p = parse("100\t7\n7 5000\n").unwrap();
        assert_eq!(p.original_ids, vec![7, 100, 5000]);
        assert_eq!(p.graph.edges(), &[(0, 1), (0, 2)]);
    }

    #[test]
    fn self_loops_dropped() {
        let p = parse("1 1\n1 2\n3 3\n").unwrap();
        assert_eq!(p.self_loops_dropped, 2);
        assert_eq!(p.graph.vertex_count(), 2);
    }

    #[test]
    fn errors() {
        match parse("0 1\n0 x\n") {
            Err(ParseError::MalformedLine { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("0 1 2\n"), Err(ParseError::MalformedLine { line: 1, .. })));
        assert!(matches!(parse("# only\n\n"), Err(ParseError::EmptyInput)));
        assert!(matches!(parse("4 4\n"), Err(ParseError::EmptyInput)));
    }

    #[test]
    fn gzip_files() {
        use flate2::write::GzEncoder;
        let dir = std::env::temp_dir().join(format!("npa-parse-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let plain = dir.join("g.txt");
        let packed = dir.join("g.txt.gz");
        std::fs::write(&plain, "0 1\n1 2\n2 0\n").unwrap();
        let mut enc = GzEncoder::new(File::create(&packed).unwrap(), flate2::Compression::default());
        enc.write_all(b"0 1\n1 2\n2 0\n").unwrap();
        enc.finish().unwrap();
        assert_eq!(read_edge_list(&plain).unwrap(), read_edge_list(&packed).unwrap());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    proptest! {
        #[test]
        fn export_round_trip(edges in prop::collection::vec((0u64..40, 0u64..40), 1..120)) {
            let text: String = edges.iter().map(|(a, b)| format!("{a} {b}\n")).collect();
            let Ok(first) = parse(&text) else {
                prop_assume!(false);
                unreachable!()
            };
            let mut buf = Vec::new();
            write_edge_list(&first.graph, false, &mut buf).unwrap();
            let second = parse_edge_list(&buf[..]).unwrap();
            prop_assert_eq!(second.graph.vertex_count(), first.graph.vertex_count());
            prop_assert_eq!(second.graph.edge_count(), first.graph.edge_count());
            let mut da = first.graph.degrees();
            let mut db = second.graph.degrees();
            da.sort_unstable();
            db.sort_unstable();
            prop_assert_eq!(da, db);
        }
    }
}
