//! Text formats: tab-separated node/edge files and a subset of N-Triples.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{Edge, Graph, GraphError, Node, NodeId, Result, Weight};

/// Reads `id<TAB>text` node lines and `src<TAB>dst[<TAB>weight]` edge lines.
/// Lines starting with `#` and blank lines are skipped. Edges without a
/// weight column stay unweighted until step weights are assigned.
pub fn read_edge_list(nodes_path: impl AsRef<Path>, edges_path: impl AsRef<Path>) -> Result<Graph> {
    let nodes = File::open(nodes_path)?;
    let edges = File::open(edges_path)?;
    read_edge_list_from(nodes, edges)
}

pub fn read_edge_list_from(nodes: impl Read, edges: impl Read) -> Result<Graph> {
    let mut slots: Vec<Option<String>> = Vec::new();
    let mut raw: Vec<(usize, u64, String)> = Vec::new();
    for (i, line) in BufReader::new(nodes).lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if skip(&line) {
            continue;
        }
        let (id, text) = match line.split_once('\t') {
            Some((id, text)) => (id, text),
            None => (line.as_str(), ""),
        };
        let id = parse_id(id, lineno)?;
        raw.push((lineno, id, text.to_string()));
    }
    let count = raw.len();
    slots.resize(count, None);
    for (_, id, text) in raw {
        if id as usize >= count {
            return Err(GraphError::SparseIds { id, count });
        }
        let slot = &mut slots[id as usize];
        if slot.is_some() {
            return Err(GraphError::DuplicateNode(id));
        }
        *slot = Some(text);
    }
    let nodes: Vec<Node> = slots
        .into_iter()
        .enumerate()
        .map(|(i, t)| Node {
            id: NodeId::from(i),
            text: t.unwrap_or_default(),
        })
        .collect();

    let mut out = Vec::new();
    for (i, line) in BufReader::new(edges).lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if skip(&line) {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 2 || cols.len() > 3 {
            return Err(GraphError::Malformed {
                line: lineno,
                message: format!("expected 2 or 3 tab-separated columns, got {}", cols.len()),
            });
        }
        let src = parse_id(cols[0], lineno)?;
        let dst = parse_id(cols[1], lineno)?;
        for id in [src, dst] {
            if id as usize >= nodes.len() {
                return Err(GraphError::DanglingEndpoint { line: lineno, id });
            }
        }
        if src == dst {
            return Err(GraphError::SelfLoop { line: lineno, id: src });
        }
        let weight = match cols.get(2) {
            Some(w) => {
                let w: i64 = w.trim().parse().map_err(|_| GraphError::Malformed {
                    line: lineno,
                    message: format!("bad weight {w:?}"),
                })?;
                if w <= 0 {
                    return Err(GraphError::NonPositiveWeight { line: lineno });
                }
                Some(w as Weight)
            }
            None => None,
        };
        out.push(Edge {
            src: NodeId(src as u32),
            dst: NodeId(dst as u32),
            weight,
            label: None,
        });
    }
    Ok(Graph::from_parts(nodes, out))
}

/// Writes the node and edge files read by [`read_edge_list`].
pub fn write_edge_list(graph: &Graph, mut nodes: impl Write, mut edges: impl Write) -> Result<()> {
    for n in graph.nodes() {
        writeln!(nodes, "{}\t{}", n.id, n.text)?;
    }
    for e in graph.edges() {
        match e.weight {
            Some(w) => writeln!(edges, "{}\t{}\t{}", e.src, e.dst, w)?,
            None => writeln!(edges, "{}\t{}", e.src, e.dst)?,
        }
    }
    Ok(())
}

fn skip(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

fn parse_id(s: &str, line: usize) -> Result<u64> {
    s.trim().parse().map_err(|_| GraphError::Malformed {
        line,
        message: format!("bad node id {s:?}"),
    })
}

#[derive(Debug, PartialEq)]
enum Term {
    Iri(String),
    Blank(String),
    Literal(String),
}

/// Loads `<s> <p> <o> .` lines. IRIs and blank nodes become vertices whose
/// text is the IRI local name; literal objects are appended to their
/// subject's text. Predicates label the edges. Weights are left unset.
pub fn read_ntriples(reader: impl Read) -> Result<Graph> {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut texts: Vec<String> = Vec::new();
    let mut edges = Vec::new();

    let mut intern = |key: String, local: String, texts: &mut Vec<String>| -> usize {
        *ids.entry(key).or_insert_with(|| {
            texts.push(local);
            texts.len() - 1
        })
    };

    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if skip(&line) {
            continue;
        }
        let malformed = |message: &str| GraphError::Malformed {
            line: lineno,
            message: message.to_string(),
        };
        let mut rest = line.trim();
        let mut terms = Vec::with_capacity(3);
        for _ in 0..3 {
            let (term, tail) = parse_term(rest).ok_or_else(|| malformed("bad N-Triples term"))?;
            terms.push(term);
            rest = tail.trim_start();
        }
        if rest != "." {
            return Err(malformed("expected terminating '.'"));
        }
        let object = terms.pop().unwrap();
        let predicate = match terms.pop().unwrap() {
            Term::Iri(p) => p,
            _ => return Err(malformed("predicate must be an IRI")),
        };
        let subject = match terms.pop().unwrap() {
            Term::Iri(s) => {
                let local = local_name(&s).to_string();
                intern(s, local, &mut texts)
            }
            Term::Blank(b) => intern(format!("_:{b}"), b, &mut texts),
            Term::Literal(_) => return Err(malformed("subject cannot be a literal")),
        };
        let object = match object {
            Term::Iri(o) => {
                let local = local_name(&o).to_string();
                intern(o, local, &mut texts)
            }
            Term::Blank(b) => intern(format!("_:{b}"), b, &mut texts),
            Term::Literal(text) => {
                let t = &mut texts[subject];
                if !t.is_empty() {
                    t.push(' ');
                }
                t.push_str(&text);
                continue;
            }
        };
        if object == subject {
            continue;
        }
        edges.push(Edge {
            src: NodeId::from(subject),
            dst: NodeId::from(object),
            weight: None,
            label: Some(local_name(&predicate).to_string()),
        });
    }
    let nodes = texts
        .into_iter()
        .enumerate()
        .map(|(i, text)| Node {
            id: NodeId::from(i),
            text,
        })
        .collect();
    Ok(Graph::from_parts(nodes, edges))
}

fn local_name(iri: &str) -> &str {
    let trimmed = iri.trim_end_matches(['/', '#']);
    match trimmed.rfind(['/', '#', ':']) {
        Some(i) => &trimmed[i + 1..],
        None => trimmed,
    }
}

fn parse_term(s: &str) -> Option<(Term, &str)> {
    if let Some(rest) = s.strip_prefix('<') {
        let end = rest.find('>')?;
        return Some((Term::Iri(rest[..end].to_string()), &rest[end + 1..]));
    }
    if let Some(rest) = s.strip_prefix("_:") {
        let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        return Some((Term::Blank(rest[..end].to_string()), &rest[end..]));
    }
    let rest = s.strip_prefix('"')?;
    let mut value = String::new();
    let mut chars = rest.char_indices();
    let end = loop {
        let (i, c) = chars.next()?;
        match c {
            '"' => break i,
            '\\' => {
                let (_, e) = chars.next()?;
                value.push(match e {
                    'n' => '\n',
                    't' => '\t',
                    'r' => '\r',
                    other => other,
                });
            }
            c => value.push(c),
        }
    };
    let mut tail = &rest[end + 1..];
    if let Some(t) = tail.strip_prefix("^^<") {
        tail = &t[t.find('>')? + 1..];
    } else if let Some(t) = tail.strip_prefix('@') {
        let stop = t.find(char::is_whitespace).unwrap_or(t.len());
        tail = &t[stop..];
    }
    Some((Term::Literal(value), tail))
}
