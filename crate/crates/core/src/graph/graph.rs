use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::Rng;

use crate::{Error, Result};

/// Undirected simple graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n_vertices: usize,
    edges: BTreeSet<(usize, usize)>,
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b { (a, b) } else { (b, a) }
}

impl Graph {
    pub fn empty(n_vertices: usize) -> Result<Self> {
        if n_vertices == 0 {
            return Err(Error::invalid("graph needs at least one vertex"));
        }
        Ok(Graph {
            n_vertices,
            edges: BTreeSet::new(),
        })
    }

    pub fn from_edges(n_vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::empty(n_vertices)?;
        for (a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn complete(n_vertices: usize) -> Result<Self> {
        Self::from_edges(
            n_vertices,
            (0..n_vertices).flat_map(|a| (a + 1..n_vertices).map(move |b| (a, b))),
        )
    }

    pub fn path(n_vertices: usize) -> Result<Self> {
        Self::from_edges(n_vertices, (1..n_vertices).map(|b| (b - 1, b)))
    }

    /// Star with center vertex 0.
    pub fn star(n_vertices: usize) -> Result<Self> {
        Self::from_edges(n_vertices, (1..n_vertices).map(|b| (0, b)))
    }

    /// Erdos-Renyi graph with edge probability `p`.
    pub fn random<R: Rng + ?Sized>(n_vertices: usize, p: f64, rng: &mut R) -> Result<Self> {
        let mut g = Self::empty(n_vertices)?;
        for a in 0..n_vertices {
            for b in a + 1..n_vertices {
                if rng.gen_bool(p) {
                    g.edges.insert((a, b));
                }
            }
        }
        Ok(g)
    }

    /// Add an edge; rejects loops, out-of-range vertices and duplicates.
    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        if a == b {
            return Err(Error::invalid(format!("self-loop on vertex {}", a + 1)));
        }
        for v in [a, b] {
            if v >= self.n_vertices {
                return Err(Error::IndexOutOfRange {
                    index: v,
                    len: self.n_vertices,
                });
            }
        }
        if !self.edges.insert(ordered(a, b)) {
            return Err(Error::invalid(format!("duplicate edge {} {}", a + 1, b + 1)));
        }
        Ok(())
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&ordered(a, b))
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n_vertices).filter(|&u| u != v && self.has_edge(u, v)).collect()
    }

    /// Parse the edge-list format:
    ///
    /// ```text
    /// vertices 3
    /// 1 2
    /// 2 3
    /// ```
    ///
    /// Vertices are 1-based. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (ln, header) = lines
            .next()
            .ok_or_else(|| Error::invalid("empty graph file"))?;
        let n = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["vertices", n] => n
                .parse::<usize>()
                .map_err(|_| Error::invalid(format!("line {ln}: bad vertex count '{n}'")))?,
            _ => {
                return Err(Error::invalid(format!(
                    "line {ln}: expected 'vertices <n>', found '{header}'"
                )))
            }
        };
        let mut g = Self::empty(n)?;
        for (ln, line) in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [u, v] = parts.as_slice() else {
                return Err(Error::invalid(format!("line {ln}: expected 'u v', found '{line}'")));
            };
            let parse = |s: &str| -> Result<usize> {
                match s.parse::<usize>() {
                    Ok(x) if x >= 1 && x <= n => Ok(x - 1),
                    _ => Err(Error::invalid(format!("line {ln}: vertex '{s}' not in 1..={n}"))),
                }
            };
            g.add_edge(parse(u)?, parse(v)?)
                .map_err(|e| Error::invalid(format!("line {ln}: {e}")))?;
        }
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("vertices {}\n", self.n_vertices);
        for (a, b) in &self.edges {
            let _ = writeln!(s, "{} {}", a + 1, b + 1);
        }
        s
    }
}
