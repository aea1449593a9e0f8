//! Text formats: graph6, a plain edge list, and packing instance files.
//!
//! Edge list: a header line `n m` followed by `m` lines `u v`.
//!
//! Instance file: two graphs in sequence (each either one graph6 line or an
//! edge-list block), then an optional line `perm: p0 p1 ... p(n-1)`.
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::Labelling;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphFormat {
    Graph6,
    Edgelist,
}

impl std::str::FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "graph6" | "g6" => Ok(GraphFormat::Graph6),
            "edgelist" | "edge-list" => Ok(GraphFormat::Edgelist),
            other => Err(Error::Domain(format!("unknown graph format `{other}`"))),
        }
    }
}

const G6_HEADER: &str = ">>graph6<<";

fn push_size(out: &mut String, n: usize) {
    let shifts: &[usize] = if n <= 62 {
        &[0]
    } else if n <= 258_047 {
        out.push('~');
        &[12, 6, 0]
    } else {
        out.push_str("~~");
        &[30, 24, 18, 12, 6, 0]
    };
    for &shift in shifts {
        out.push((((n >> shift) & 63) as u8 + 63) as char);
    }
}

/// graph6 encoding (without trailing newline).
pub fn to_graph6(g: &Graph) -> String {
    let n = g.n();
    let mut out = String::new();
    push_size(&mut out, n);
    let mut acc = 0u8;
    let mut nbits = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | g.has_edge(i, j) as u8;
            nbits += 1;
            if nbits == 6 {
                out.push((acc + 63) as char);
                acc = 0;
                nbits = 0;
            }
        }
    }
    if nbits > 0 {
        out.push(((acc << (6 - nbits)) + 63) as char);
    }
    out
}

/// Decodes one graph6 string; an optional `>>graph6<<` prefix is accepted.
pub fn from_graph6(s: &str) -> Result<Graph> {
    let s = s.trim();
    let s = s.strip_prefix(G6_HEADER).unwrap_or(s);
    let bytes: Vec<u8> = s.bytes().collect();
    if let Some(bad) = bytes.iter().find(|&&b| !(63..=126).contains(&b)) {
        return Err(Error::parse(1, format!("invalid graph6 byte 0x{bad:02x}")));
    }
    let val = |b: u8| (b - 63) as usize;
    let (n, body) = match bytes.as_slice() {
        [] => return Err(Error::parse(1, "empty graph6 string")),
        [126, 126, rest @ ..] => {
            if rest.len() < 6 {
                return Err(Error::parse(1, "truncated graph6 size field"));
            }
            (rest[..6].iter().fold(0, |acc, &b| (acc << 6) | val(b)), &rest[6..])
        }
        [126, rest @ ..] => {
            if rest.len() < 3 {
                return Err(Error::parse(1, "truncated graph6 size field"));
            }
            (rest[..3].iter().fold(0, |acc, &b| (acc << 6) | val(b)), &rest[3..])
        }
        [first, rest @ ..] => (val(*first), rest),
    };
    let bits = n * n.saturating_sub(1) / 2;
    let expected = bits.div_ceil(6);
    if body.len() != expected {
        return Err(Error::parse(
            1,
            format!("graph6 body has {} bytes, expected {expected} for n = {n}", body.len()),
        ));
    }
    let bit = |k: usize| (val(body[k / 6]) >> (5 - k % 6)) & 1 == 1;
    let mut edges = Vec::new();
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if bit(k) {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    Graph::new(n, edges).map_err(|e| Error::parse(1, e.to_string()))
}

/// Edge-list encoding, ending in a newline.
pub fn to_edgelist(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.edge_count());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn from_edgelist(s: &str) -> Result<Graph> {
    let mut lines = content_lines(s);
    let graph = read_edgelist_block(&mut lines)?;
    if let Some((no, _)) = lines.next() {
        return Err(Error::parse(no, "trailing content after edge list"));
    }
    Ok(graph)
}

pub fn encode(g: &Graph, format: GraphFormat) -> String {
    match format {
        GraphFormat::Graph6 => to_graph6(g) + "\n",
        GraphFormat::Edgelist => to_edgelist(g),
    }
}

/// Parses a single graph in either format.
pub fn decode(s: &str) -> Result<Graph> {
    let mut lines = content_lines(s);
    let g = read_graph(&mut lines)?;
    if let Some((no, _)) = lines.next() {
        return Err(Error::parse(no, "trailing content after graph"));
    }
    Ok(g)
}

type Lines<'a> = std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>;

fn content_lines(s: &str) -> Lines<'_> {
    let it: Box<dyn Iterator<Item = (usize, &str)>> = Box::new(
        s.lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#')),
    );
    it.peekable()
}

fn parse_pair(no: usize, line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let mut next = || -> Result<usize> {
        it.next()
            .ok_or_else(|| Error::parse(no, "expected two integers"))?
            .parse()
            .map_err(|e| Error::parse(no, format!("{e}")))
    };
    let pair = (next()?, next()?);
    if it.next().is_some() {
        return Err(Error::parse(no, "expected exactly two integers"));
    }
    Ok(pair)
}

fn read_edgelist_block(lines: &mut Lines<'_>) -> Result<Graph> {
    let (no, header) = lines.next().ok_or_else(|| Error::parse(0, "missing edge-list header"))?;
    let (n, m) = parse_pair(no, header)?;
    let mut edges = Vec::with_capacity(m);
    for k in 0..m {
        let (no, line) = lines
            .next()
            .ok_or_else(|| Error::parse(no + k + 1, format!("expected {m} edges, found {k}")))?;
        edges.push(parse_pair(no, line)?);
    }
    Graph::new(n, edges).map_err(|e| Error::parse(no, e.to_string()))
}

fn looks_like_edgelist_header(line: &str) -> bool {
    let parts: Vec<&str> = line.split_whitespace().collect();
    parts.len() == 2 && parts.iter().all(|p| p.parse::<usize>().is_ok())
}

fn read_graph(lines: &mut Lines<'_>) -> Result<Graph> {
    let &(no, line) = lines.peek().ok_or_else(|| Error::parse(0, "missing graph"))?;
    if looks_like_edgelist_header(line) {
        read_edgelist_block(lines)
    } else {
        lines.next();
        from_graph6(line).map_err(|e| match e {
            Error::Parse { msg, .. } => Error::parse(no, msg),
            other => other,
        })
    }
}

/// Contents of an instance file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceFile {
    pub blue: Graph,
    pub red: Graph,
    pub perm: Option<Labelling>,
}

pub fn parse_perm_line(no: usize, line: &str) -> Result<Labelling> {
    let rest = line
        .strip_prefix("perm:")
        .ok_or_else(|| Error::parse(no, "expected a `perm:` line"))?;
    let perm = rest
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|e| Error::parse(no, format!("{e}"))))
        .collect::<Result<Vec<_>>>()?;
    Labelling::from_perm(perm).map_err(|e| Error::parse(no, e.to_string()))
}

pub fn perm_line(lab: &Labelling) -> String {
    let mut out = String::from("perm:");
    for p in lab.perm() {
        let _ = write!(out, " {p}");
    }
    out
}

pub fn parse_instance(s: &str) -> Result<InstanceFile> {
    let mut lines = content_lines(s);
    let blue = read_graph(&mut lines)?;
    let red = read_graph(&mut lines)?;
    let perm = match lines.next() {
        Some((no, line)) => {
            let lab = parse_perm_line(no, line)?;
            if lab.n() != red.n() {
                return Err(Error::parse(no, format!("perm has {} entries, graphs have {}", lab.n(), red.n())));
            }
            Some(lab)
        }
        None => None,
    };
    if let Some((no, _)) = lines.next() {
        return Err(Error::parse(no, "trailing content after perm line"));
    }
    Ok(InstanceFile { blue, red, perm })
}

pub fn write_instance(blue: &Graph, red: &Graph, perm: Option<&Labelling>, format: GraphFormat) -> String {
    let mut out = encode(blue, format);
    out.push_str(&encode(red, format));
    if let Some(lab) = perm {
        out.push_str(&perm_line(lab));
        out.push('\n');
    }
    out
}

pub fn read_instance_file(path: &Path) -> Result<InstanceFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_instance(&text)
}

/// Reads a file holding a single `perm:` line.
pub fn read_labelling_file(path: &Path) -> Result<Labelling> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = content_lines(&text);
    let (no, line) = lines.next().ok_or_else(|| Error::parse(0, "empty labelling file"))?;
    parse_perm_line(no, line)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn graph6_known_encodings() {
        // Standard examples: K1 = "@", the path P3 with edges 0-1,1-2 = "Bg"
        assert_eq!(to_graph6(&Graph::edgeless(1).unwrap()), "@");
        let p3 = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(to_graph6(&p3), "Bg");
        let k4 = Graph::new(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(to_graph6(&k4), "C~");
        assert_eq!(from_graph6(">>graph6<<C~").unwrap(), k4);
    }

    #[test]
    fn graph6_long_header() {
        let n = 100;
        let g = Graph::new(n, (0..n - 1).map(|i| (i, i + 1))).unwrap();
        let s = to_graph6(&g);
        assert!(s.starts_with('~'));
        // 100 = 0b000000_000001_100100
        assert_eq!(&s[1..4], "?@c");
        assert_eq!(from_graph6(&s).unwrap(), g);
    }

    #[test]
    fn graph6_rejects_garbage() {
        assert!(from_graph6("").is_err());
        assert!(from_graph6("C").is_err());
        assert!(from_graph6("C~~").is_err());
        assert!(from_graph6("C\u{7f}").is_err());
    }

    #[test]
    fn edgelist_format() {
        let g = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(to_edgelist(&g), "4 2\n0 1\n2 3\n");
        assert_eq!(from_edgelist("4 2\n0 1\n2 3\n").unwrap(), g);
        assert!(from_edgelist("4 3\n0 1\n2 3\n").is_err());
        assert!(from_edgelist("4 1\n0 0\n").is_err());
    }

    #[test]
    fn instance_with_perm() {
        let text = "# blue\nC`\n# red\n4 2\n0 2\n1 3\nperm: 1 0 3 2\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.blue.edges().collect::<Vec<_>>(), vec![(0, 1), (2, 3)]);
        assert_eq!(inst.red.edges().collect::<Vec<_>>(), vec![(0, 2), (1, 3)]);
        assert_eq!(inst.perm.unwrap().perm(), &[1, 0, 3, 2]);
        assert!(parse_instance("C`\nC`\nperm: 0 1 2\n").is_err());
        assert!(parse_instance("C`\n").is_err());
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (1usize..80).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n), 0..(3 * n)).prop_map(move |pairs| {
                let mut edges: Vec<(usize, usize)> = pairs
                    .into_iter()
                    .filter(|(u, v)| u != v)
                    .map(|(u, v)| (u.min(v), u.max(v)))
                    .collect();
                edges.sort_unstable();
                edges.dedup();
                Graph::new(n, edges).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn round_trips(g in arb_graph()) {
            prop_assert_eq!(&from_graph6(&to_graph6(&g)).unwrap(), &g);
            prop_assert_eq!(&from_edgelist(&to_edgelist(&g)).unwrap(), &g);
            let lab = Labelling::identity(g.n());
            let text = write_instance(&g, &g, Some(&lab), GraphFormat::Graph6);
            let back = parse_instance(&text).unwrap();
            prop_assert_eq!(back.blue, g.clone());
            prop_assert_eq!(back.perm, Some(lab));
        }
    }
}
