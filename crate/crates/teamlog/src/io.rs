//! Line-oriented text formats: structures, teams, graphs and DIMACS CNF.
//!
//! Structure files:
//! ```text
//! # comment
//! universe N
//! rel NAME/ARITY
//! <ARITY integers per line>
//! .
//! ```
//!
//! Team files: a `vars v1 v2 ...` header, then one row of values per
//! assignment. Graph files: `N M` then `M` lines `u v` (0-based). CNF files:
//! DIMACS. All output is deterministic byte for byte.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::reductions::{Graph, PropCnf};
use crate::structure::Structure;
use crate::team::{AssignmentSpace, Team};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct FileError {
    pub line: usize,
    pub msg: String,
}

impl FileError {
    fn new(line: usize, msg: impl fmt::Display) -> Self {
        FileError {
            line,
            msg: msg.to_string(),
        }
    }
}

/// Significant lines with their 1-based numbers; comments and blanks dropped.
fn significant_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

pub fn parse_structure_file(text: &str) -> Result<Structure, FileError> {
    let mut lines = significant_lines(text).peekable();
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| FileError::new(1, "expected `universe N`"))?;
    let universe: usize = header
        .strip_prefix("universe")
        .map(str::trim)
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| FileError::new(line_no, "expected `universe N`"))?;
    if universe == 0 {
        return Err(FileError::new(line_no, "universe must be nonempty"));
    }

    let mut relations: Vec<(String, usize, Vec<Vec<usize>>)> = Vec::new();
    while let Some((line_no, line)) = lines.next() {
        let decl = line.strip_prefix("rel ").ok_or_else(|| {
            FileError::new(line_no, format!("expected `rel NAME/ARITY`, got `{line}`"))
        })?;
        let (name, arity) = decl
            .split_once('/')
            .ok_or_else(|| FileError::new(line_no, "expected `rel NAME/ARITY`"))?;
        let name = name.trim().to_string();
        let arity: usize = arity
            .trim()
            .parse()
            .map_err(|_| FileError::new(line_no, "arity must be a positive integer"))?;
        if arity == 0 {
            return Err(FileError::new(line_no, "arity must be at least 1"));
        }
        if relations.iter().any(|(existing, ..)| *existing == name) {
            return Err(FileError::new(
                line_no,
                format!("duplicate relation block `{name}`"),
            ));
        }

        let mut tuples = Vec::new();
        let mut terminated = false;
        for (line_no, line) in lines.by_ref() {
            if line == "." {
                terminated = true;
                break;
            }
            let tuple: Vec<usize> = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>()
                        .map_err(|_| FileError::new(line_no, format!("bad tuple entry `{tok}`")))
                })
                .collect::<Result<_, _>>()?;
            if tuple.len() != arity {
                return Err(FileError::new(
                    line_no,
                    format!(
                        "tuple has {} entries, relation `{name}` has arity {arity}",
                        tuple.len()
                    ),
                ));
            }
            if let Some(&value) = tuple.iter().find(|&&v| v >= universe) {
                return Err(FileError::new(
                    line_no,
                    format!("element {value} out of range for universe of size {universe}"),
                ));
            }
            tuples.push(tuple);
        }
        if !terminated {
            return Err(FileError::new(
                line_no,
                format!("relation block `{name}` is missing its `.` terminator"),
            ));
        }
        relations.push((name, arity, tuples));
    }

    Structure::new(universe, relations).map_err(|e| FileError::new(0, e))
}

/// `Display` on `Structure` already produces this format.
pub fn format_structure(a: &Structure) -> String {
    a.to_string()
}

pub fn parse_team_file(text: &str, a: &Structure) -> Result<Team, FileError> {
    let mut lines = significant_lines(text);
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| FileError::new(1, "expected `vars v1 v2 ...`"))?;
    let vars: Vec<String> = header
        .strip_prefix("vars")
        .ok_or_else(|| FileError::new(line_no, "expected `vars v1 v2 ...`"))?
        .split_whitespace()
        .map(str::to_string)
        .collect();
    let space = AssignmentSpace::new(a.universe_size(), vars.clone())
        .map_err(|e| FileError::new(line_no, e))?;
    // Row columns follow the header order, which may differ from the space's
    // sorted variable order.
    let column_of: Vec<usize> = space
        .vars()
        .iter()
        .map(|v| {
            vars.iter()
                .position(|header_var| header_var == v)
                .expect("space vars come from the header")
        })
        .collect();

    let mut team = Team::empty(Arc::clone(&space));
    for (line_no, line) in lines {
        let row: Vec<usize> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| FileError::new(line_no, format!("bad value `{tok}`")))
            })
            .collect::<Result<_, _>>()?;
        if row.len() != vars.len() {
            return Err(FileError::new(
                line_no,
                format!(
                    "row has {} values, header has {} variables",
                    row.len(),
                    vars.len()
                ),
            ));
        }
        let values: Vec<usize> = column_of.iter().map(|&c| row[c]).collect();
        let index = space
            .index_of(&values)
            .map_err(|e| FileError::new(line_no, e))?;
        if !team.insert(index).map_err(|e| FileError::new(line_no, e))? {
            return Err(FileError::new(line_no, "duplicate assignment row"));
        }
    }
    Ok(team)
}

/// Canonical single-line team form, members in ascending index order:
/// `{[x=0,y=1],[x=1,y=1]}`.
pub fn format_team(team: &Team) -> String {
    team.to_string()
}

/// Parses the canonical team line back over the given variables.
pub fn parse_team_line(text: &str, universe: usize, vars: &[String]) -> Result<Team, FileError> {
    let space = AssignmentSpace::new(universe, vars.to_vec()).map_err(|e| FileError::new(1, e))?;
    let body = text
        .trim()
        .strip_prefix('{')
        .and_then(|rest| rest.strip_suffix('}'))
        .ok_or_else(|| FileError::new(1, "team must be enclosed in braces"))?;
    let mut team = Team::empty(Arc::clone(&space));
    let mut rest = body.trim();
    while !rest.is_empty() {
        let close = rest
            .find(']')
            .ok_or_else(|| FileError::new(1, "unterminated assignment block"))?;
        let block = &rest[..=close];
        let inner = block
            .strip_prefix('[')
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(|| FileError::new(1, format!("malformed assignment `{block}`")))?;
        let mut values = vec![None; space.vars().len()];
        for binding in inner.split(',') {
            let (var, value) = binding
                .split_once('=')
                .ok_or_else(|| FileError::new(1, format!("malformed binding `{binding}`")))?;
            let pos = space
                .position(var.trim())
                .map_err(|_| FileError::new(1, format!("unknown variable `{}`", var.trim())))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| FileError::new(1, format!("bad value `{}`", value.trim())))?;
            values[pos] = Some(value);
        }
        let values: Vec<usize> = values
            .into_iter()
            .collect::<Option<_>>()
            .ok_or_else(|| FileError::new(1, "assignment misses a variable"))?;
        let index = space.index_of(&values).map_err(|e| FileError::new(1, e))?;
        if !team.insert(index).map_err(|e| FileError::new(1, e))? {
            return Err(FileError::new(1, "duplicate assignment in team"));
        }
        rest = rest[close + 1..].trim_start_matches(',').trim();
    }
    Ok(team)
}

pub fn parse_graph_file(text: &str) -> Result<Graph, FileError> {
    let mut lines = significant_lines(text);
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| FileError::new(1, "expected `N M`"))?;
    let mut parts = header.split_whitespace();
    let parse_num = |tok: Option<&str>, line: usize| -> Result<usize, FileError> {
        tok.and_then(|t| t.parse().ok())
            .ok_or_else(|| FileError::new(line, "expected `N M`"))
    };
    let vertices = parse_num(parts.next(), line_no)?;
    let edge_count = parse_num(parts.next(), line_no)?;

    let mut edges = Vec::new();
    for (line_no, line) in lines {
        let mut parts = line.split_whitespace();
        let u = parse_num(parts.next(), line_no)?;
        let v = parse_num(parts.next(), line_no)?;
        if parts.next().is_some() {
            return Err(FileError::new(line_no, "edge line must be `u v`"));
        }
        edges.push((u, v));
    }
    if edges.len() != edge_count {
        return Err(FileError::new(
            0,
            format!("header declares {edge_count} edges, found {}", edges.len()),
        ));
    }
    Graph::new(vertices, edges).map_err(|e| FileError::new(0, e))
}

pub fn format_graph(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.vertices(), g.edges().count());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn parse_dimacs(text: &str) -> Result<PropCnf, FileError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            if header.is_some() {
                return Err(FileError::new(line_no, "duplicate problem line"));
            }
            let mut parts = rest.split_whitespace();
            if parts.next() != Some("cnf") {
                return Err(FileError::new(line_no, "expected `p cnf VARS CLAUSES`"));
            }
            let vars = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| FileError::new(line_no, "bad variable count"))?;
            let count = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| FileError::new(line_no, "bad clause count"))?;
            header = Some((vars, count));
            continue;
        }
        if header.is_none() {
            return Err(FileError::new(line_no, "clause before `p cnf` header"));
        }
        for tok in line.split_whitespace() {
            let literal: i64 = tok
                .parse()
                .map_err(|_| FileError::new(line_no, format!("bad literal `{tok}`")))?;
            if literal == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(literal);
            }
        }
    }
    let (vars, declared) = header.ok_or_else(|| FileError::new(1, "missing `p cnf` header"))?;
    if !current.is_empty() {
        return Err(FileError::new(0, "last clause is not terminated by 0"));
    }
    if clauses.len() != declared {
        return Err(FileError::new(
            0,
            format!(
                "header declares {declared} clauses, found {}",
                clauses.len()
            ),
        ));
    }
    PropCnf::new(vars, clauses).map_err(|e| FileError::new(0, e))
}

pub fn format_dimacs(cnf: &PropCnf) -> String {
    let mut out = format!("p cnf {} {}\n", cnf.num_vars(), cnf.clauses().len());
    for clause in cnf.clauses() {
        for literal in clause {
            out.push_str(&format!("{literal} "));
        }
        out.push_str("0\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SWAP_STRUCTURE: &str = "# the two-element structure\nuniverse 2\nrel R/2\n0 1\n1 0\n.\n";

    #[test]
    fn structure_round_trip() {
        let a = parse_structure_file(SWAP_STRUCTURE).unwrap();
        assert_eq!(a.universe_size(), 2);
        assert!(a.contains_tuple("R", &[0, 1]).unwrap());
        assert!(a.contains_tuple("R", &[1, 0]).unwrap());
        assert_eq!(a.tuples("R").unwrap().len(), 2);
        let printed = format_structure(&a);
        let back = parse_structure_file(&printed).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn structure_errors() {
        assert!(parse_structure_file("universe 0\n").is_err());
        let err = parse_structure_file("universe 2\nrel R/2\n0 1\n").unwrap_err();
        assert!(err.msg.contains("terminator"));
        let err = parse_structure_file("universe 2\nrel R/2\n0 2\n.\n").unwrap_err();
        assert!(err.msg.contains("out of range"));
        let err = parse_structure_file("universe 2\nrel R/1\n0\n.\nrel R/1\n.\n").unwrap_err();
        assert!(err.msg.contains("duplicate"));
    }

    #[test]
    fn team_file_round_trip() {
        let a = parse_structure_file(SWAP_STRUCTURE).unwrap();
        let team = parse_team_file("vars x y\n0 1\n1 1\n", &a).unwrap();
        assert_eq!(format_team(&team), "{[x=0,y=1],[x=1,y=1]}");

        let empty = parse_team_file("vars x y\n", &a).unwrap();
        assert!(empty.is_empty());

        let err = parse_team_file("vars x y\n0 1\n0 1\n", &a).unwrap_err();
        assert!(err.msg.contains("duplicate"));
        let err = parse_team_file("vars x y\n0\n", &a).unwrap_err();
        assert!(err.msg.contains("values"));
        let err = parse_team_file("vars x y\n0 2\n", &a).unwrap_err();
        assert!(err.msg.contains("out of range"));
    }

    #[test]
    fn team_header_order_is_respected() {
        let a = parse_structure_file(SWAP_STRUCTURE).unwrap();
        let team = parse_team_file("vars y x\n1 0\n", &a).unwrap();
        assert_eq!(format_team(&team), "{[x=0,y=1]}");
    }

    #[test]
    fn team_line_round_trip() {
        let a = parse_structure_file(SWAP_STRUCTURE).unwrap();
        let vars = vec!["x".to_string(), "y".to_string()];
        for text in ["{[x=0,y=1],[x=1,y=1]}", "{[x=1,y=1]}", "{}"] {
            let team = parse_team_line(text, a.universe_size(), &vars).unwrap();
            assert_eq!(format_team(&team), text);
        }
    }

    #[test]
    fn graph_round_trip() {
        let g = parse_graph_file("3 2\n0 1\n1 2\n").unwrap();
        assert_eq!(g.vertices(), 3);
        assert_eq!(g.edges().count(), 2);
        let back = parse_graph_file(&format_graph(&g)).unwrap();
        assert_eq!(g, back);
        assert!(parse_graph_file("3 2\n0 1\n").is_err());
        assert!(parse_graph_file("2 1\n0 2\n").is_err());
    }

    #[test]
    fn dimacs_round_trip() {
        let cnf = parse_dimacs("c example\np cnf 3 2\n1 -2 0\n2 3 0\n").unwrap();
        assert_eq!(cnf.num_vars(), 3);
        assert_eq!(cnf.clauses().len(), 2);
        let back = parse_dimacs(&format_dimacs(&cnf)).unwrap();
        assert_eq!(cnf, back);
        assert!(parse_dimacs("p cnf 2 2\n1 0\n").is_err());
        assert!(parse_dimacs("1 0\n").is_err());
        assert!(parse_dimacs("p cnf 2 1\n3 0\n").is_err());
    }
}
