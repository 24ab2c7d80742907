//! The graph6 text encoding for simple undirected graphs.

use crate::graph::{Graph, GraphError};

const BIAS: u8 = 63;

fn encode_size(n: usize, out: &mut String) {
    if n <= 62 {
        out.push((n as u8 + BIAS) as char);
    } else if n <= 258_047 {
        out.push('~');
        for shift in [12, 6, 0] {
            out.push((((n >> shift) & 0x3f) as u8 + BIAS) as char);
        }
    } else {
        out.push_str("~~");
        for shift in [30, 24, 18, 12, 6, 0] {
            out.push((((n >> shift) & 0x3f) as u8 + BIAS) as char);
        }
    }
}

/// Encodes `g` as a graph6 string (no header, no newline).
pub fn format(g: &Graph) -> String {
    let n = g.vertex_count();
    let mut out = String::new();
    encode_size(n, &mut out);
    let mut word = 0u8;
    let mut filled = 0;
    for j in 1..n {
        for i in 0..j {
            word = (word << 1) | g.has_edge(i, j) as u8;
            filled += 1;
            if filled == 6 {
                out.push((word + BIAS) as char);
                word = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push(((word << (6 - filled)) + BIAS) as char);
    }
    out
}

/// Decodes one graph6 line. An optional `>>graph6<<` header is accepted.
pub fn parse(line: &str) -> Result<Graph, GraphError> {
    let line = line.trim();
    let line = line.strip_prefix(">>graph6<<").unwrap_or(line);
    let bytes = line.as_bytes();
    if bytes.iter().any(|&b| !(BIAS..=126).contains(&b)) {
        return Err(GraphError::Parse(format!("invalid graph6 character in {line:?}")));
    }
    let sextet = |i: usize| -> Result<usize, GraphError> {
        bytes
            .get(i)
            .map(|&b| (b - BIAS) as usize)
            .ok_or_else(|| GraphError::Parse("truncated graph6 size field".into()))
    };
    let (n, mut pos) = match bytes.first() {
        None => return Err(GraphError::Parse("empty graph6 string".into())),
        Some(b'~') if bytes.get(1) == Some(&b'~') => {
            let mut n = 0;
            for i in 2..8 {
                n = (n << 6) | sextet(i)?;
            }
            (n, 8)
        }
        Some(b'~') => {
            let mut n = 0;
            for i in 1..4 {
                n = (n << 6) | sextet(i)?;
            }
            (n, 4)
        }
        Some(&b) => ((b - BIAS) as usize, 1),
    };
    let pairs = n * n.saturating_sub(1) / 2;
    let needed = pairs.div_ceil(6);
    if bytes.len() != pos + needed {
        return Err(GraphError::Parse(format!(
            "graph6 body has {} characters, expected {needed}",
            bytes.len() - pos.min(bytes.len())
        )));
    }
    let mut edges = Vec::new();
    let mut bit = 0;
    let mut current = 0usize;
    for j in 1..n {
        for i in 0..j {
            if bit == 0 {
                current = sextet(pos)?;
                pos += 1;
            }
            if (current >> (5 - bit)) & 1 == 1 {
                edges.push((i, j));
            }
            bit = (bit + 1) % 6;
        }
    }
    Graph::new(n, edges)
}
