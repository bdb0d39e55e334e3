//! Text formats.
//!
//! Graph files start with a header line `n m w` where `w` is `1` for weighted
//! graphs and `0` otherwise, followed by `m` lines `u v` or `u v num/den`.
//! Station `i` holds the edge on line `i` after the header. Query schedules
//! are one query per line, written as a flat list of vertex pairs.

use std::fmt::Write as _;

use super::{Edge, Graph, WeightedEdge};
use crate::error::{Error, Result};
use crate::weight::Weight;

pub fn write_graph<W: Weight>(g: &Graph<W>) -> String {
    let mut out = String::new();
    writeln!(out, "{} {} {}", g.n(), g.m(), u8::from(g.is_weighted())).unwrap();
    for s in g.stations() {
        let e = g.edge_of(s);
        match g.weight_of(s) {
            Some(w) => writeln!(out, "{} {} {}", e.u(), e.v(), w.to_token()).unwrap(),
            None => writeln!(out, "{} {}", e.u(), e.v()).unwrap(),
        }
    }
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse().map_err(|_| parse_err(line, format!("expected a number, found {tok:?}")))
}

pub fn parse_graph<W: Weight>(text: &str) -> Result<Graph<W>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 3 {
        return Err(parse_err(hline, "header must be `n m weighted`"));
    }
    let n: u32 = parse_num(h[0], hline)?;
    let m: usize = parse_num(h[1], hline)?;
    let weighted = match h[2] {
        "0" => false,
        "1" => true,
        other => return Err(parse_err(hline, format!("weighted flag must be 0 or 1, found {other:?}"))),
    };

    let mut edges = Vec::with_capacity(m);
    let mut weighted_edges = Vec::with_capacity(m);
    for (line, body) in lines {
        let toks: Vec<&str> = body.split_whitespace().collect();
        let expected = if weighted { 3 } else { 2 };
        if toks.len() != expected {
            return Err(parse_err(line, format!("expected {expected} fields")));
        }
        let (u, v): (u32, u32) = (parse_num(toks[0], line)?, parse_num(toks[1], line)?);
        let e = Edge::canonical(u, v).map_err(|err| parse_err(line, err.to_string()))?;
        if weighted {
            let weight = W::parse_token(toks[2]).ok_or_else(|| parse_err(line, format!("bad weight {:?}", toks[2])))?;
            weighted_edges.push(WeightedEdge { edge: e, weight });
        } else {
            edges.push(e);
        }
    }
    let got = if weighted { weighted_edges.len() } else { edges.len() };
    if got != m {
        return Err(parse_err(hline, format!("header announces {m} edges, found {got}")));
    }
    if weighted {
        Graph::weighted(n, weighted_edges)
    } else {
        Graph::new(n, edges)
    }
}

/// One query per line; each query is a space-separated list `u1 v1 u2 v2 ...`.
pub fn write_edge_queries(queries: &[Vec<Edge>]) -> String {
    let mut out = String::new();
    for q in queries {
        let toks: Vec<String> = q.iter().map(|e| format!("{} {}", e.u(), e.v())).collect();
        writeln!(out, "{}", toks.join(" ")).unwrap();
    }
    out
}

pub fn parse_edge_queries(text: &str) -> Result<Vec<Vec<Edge>>> {
    text.lines()
        .enumerate()
        .map(|(i, l)| {
            let nums = l.split_whitespace().map(|t| parse_num::<u32>(t, i + 1)).collect::<Result<Vec<_>>>()?;
            if nums.len() % 2 != 0 {
                return Err(parse_err(i + 1, "odd number of vertices"));
            }
            nums.chunks(2)
                .map(|p| Edge::canonical(p[0], p[1]).map_err(|err| parse_err(i + 1, err.to_string())))
                .collect()
        })
        .collect()
}
