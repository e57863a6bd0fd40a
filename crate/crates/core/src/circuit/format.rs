//! Line-oriented circuit text format.
//!
//! ```text
//! ac <num_leaves> <num_nodes> <num_outputs>
//! L <leaf>
//! C <value>
//! + <k> <id_1> ... <id_k>
//! * <k> <id_1> ... <id_k>
//! ~ <id>
//! <output_id_1> ... <output_id_n>
//! ```
//!
//! Node ids are zero-based positions in the node list. Constants are written
//! with Rust's shortest round-trip float formatting, so parsing a written
//! circuit reproduces every constant bit for bit. Blank lines and lines
//! starting with `#` are ignored.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Circuit, CircuitError, Node, NodeId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("expected {expected} node lines, found {found}")]
    NodeCount { expected: usize, found: usize },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

pub fn write_circuit(c: &Circuit) -> String {
    let mut out = String::new();
    writeln!(out, "ac {} {} {}", c.num_leaves(), c.len(), c.num_outputs()).unwrap();
    for node in c.nodes() {
        match node {
            Node::Leaf(i) => writeln!(out, "L {i}"),
            Node::Const(v) => writeln!(out, "C {v:?}"),
            Node::Add(cs) | Node::Mul(cs) => {
                let op = if matches!(node, Node::Add(_)) { '+' } else { '*' };
                write!(out, "{op} {}", cs.len()).unwrap();
                for ch in cs {
                    write!(out, " {ch}").unwrap();
                }
                writeln!(out)
            }
            Node::OneMinus(ch) => writeln!(out, "~ {ch}"),
        }
        .unwrap();
    }
    let ids: Vec<String> = c.outputs().iter().map(|o| o.to_string()).collect();
    writeln!(out, "{}", ids.join(" ")).unwrap();
    out
}

fn parse_usize(tok: Option<&str>, line: usize, what: &str) -> Result<usize, FormatError> {
    let tok = tok.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| syntax(line, format!("{what} `{tok}` is not a non-negative integer")))
}

pub fn parse_circuit(text: &str) -> Result<Circuit, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or_else(|| syntax(1, "missing `ac` header"))?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("ac") {
        return Err(syntax(hline, "header must start with `ac`"));
    }
    let num_leaves = parse_usize(toks.next(), hline, "leaf count")?;
    let num_nodes = parse_usize(toks.next(), hline, "node count")?;
    let num_outputs = parse_usize(toks.next(), hline, "output count")?;
    if toks.next().is_some() {
        return Err(syntax(hline, "trailing tokens after header"));
    }

    let mut nodes = Vec::with_capacity(num_nodes);
    for found in 0..num_nodes {
        let (line, text) = lines.next().ok_or(FormatError::NodeCount {
            expected: num_nodes,
            found,
        })?;
        let mut toks = text.split_whitespace();
        let node = match toks.next() {
            Some("L") => Node::Leaf(parse_usize(toks.next(), line, "leaf index")?),
            Some("C") => {
                let tok = toks.next().ok_or_else(|| syntax(line, "missing constant"))?;
                let v: f64 = tok
                    .parse()
                    .map_err(|_| syntax(line, format!("`{tok}` is not a number")))?;
                Node::Const(v)
            }
            Some("~") => Node::OneMinus(parse_usize(toks.next(), line, "child id")?),
            Some(op @ ("+" | "*")) => {
                let k = parse_usize(toks.next(), line, "arity")?;
                let children = (0..k)
                    .map(|_| parse_usize(toks.next(), line, "child id"))
                    .collect::<Result<Vec<NodeId>, _>>()?;
                if op == "+" {
                    Node::Add(children)
                } else {
                    Node::Mul(children)
                }
            }
            Some(other) => return Err(syntax(line, format!("unknown node kind `{other}`"))),
            None => unreachable!("blank lines are filtered"),
        };
        if toks.next().is_some() {
            return Err(syntax(line, "trailing tokens on node line"));
        }
        nodes.push(node);
    }

    let outputs = match lines.next() {
        Some((line, text)) => {
            let ids = text
                .split_whitespace()
                .map(|t| parse_usize(Some(t), line, "output id"))
                .collect::<Result<Vec<_>, _>>()?;
            if ids.len() != num_outputs {
                return Err(syntax(
                    line,
                    format!("header declares {num_outputs} outputs, line lists {}", ids.len()),
                ));
            }
            ids
        }
        None if num_outputs == 0 => Vec::new(),
        None => return Err(syntax(hline, "missing output line")),
    };
    if let Some((line, _)) = lines.next() {
        return Err(syntax(line, "content after the output line"));
    }
    Ok(Circuit::new(num_leaves, nodes, outputs)?)
}
