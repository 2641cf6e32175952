//! Sparse signed graphs.
//!
//! A [`SignedGraph`] keeps the positive and negative subgraphs as two
//! separate CSR structures with sorted, duplicate-free neighbor lists. All
//! statistics needed downstream (edge counts, triangle counts, signed
//! mat-vecs) are computed straight from these lists.

use std::fmt::Write as _;

use thiserror::Error;

/// Sign of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("conflicting signs for edge {0}-{1}")]
    ConflictingSign(usize, usize),
    #[error("node {node} out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Graph {
        line: usize,
        #[source]
        source: GraphError,
    },
    #[error("edge list contains no edges")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Csr {
    fn build(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for &(u, v) in edges {
            offsets[u as usize + 1] += 1;
            offsets[v as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0u32; offsets[n]];
        for &(u, v) in edges {
            targets[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            targets[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        for i in 0..n {
            targets[offsets[i]..offsets[i + 1]].sort_unstable();
        }
        Csr { offsets, targets }
    }

    #[inline]
    fn row(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    fn edge_count(&self) -> u64 {
        (self.targets.len() / 2) as u64
    }
}

/// Immutable symmetric signed adjacency without self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedGraph {
    n: usize,
    pos: Csr,
    neg: Csr,
}

/// Edge and triangle counts of the positive and negative subgraphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GraphMoments {
    pub n_pos: u64,
    pub n_neg: u64,
    pub t_pos: u64,
    pub t_neg: u64,
}

impl SignedGraph {
    /// Builds a graph from undirected signed edges. Each unordered pair may
    /// appear at most once, in either orientation.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, Sign)>,
    {
        if n < 2 {
            return Err(GraphError::TooFewNodes(n));
        }
        let mut all: Vec<(u32, u32, Sign)> = Vec::new();
        for (u, v, s) in edges {
            for node in [u, v] {
                if node >= n {
                    return Err(GraphError::NodeOutOfRange { node, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            all.push((a as u32, b as u32, s));
        }
        all.sort_unstable_by_key(|&(a, b, _)| (a, b));
        for w in all.windows(2) {
            let (a0, b0, s0) = w[0];
            let (a1, b1, s1) = w[1];
            if a0 == a1 && b0 == b1 {
                return Err(if s0 == s1 {
                    GraphError::DuplicateEdge(a0 as usize, b0 as usize)
                } else {
                    GraphError::ConflictingSign(a0 as usize, b0 as usize)
                });
            }
        }
        let (pos, neg): (Vec<_>, Vec<_>) = all.into_iter().partition(|e| e.2 == Sign::Positive);
        let pos: Vec<(u32, u32)> = pos.into_iter().map(|(a, b, _)| (a, b)).collect();
        let neg: Vec<(u32, u32)> = neg.into_iter().map(|(a, b, _)| (a, b)).collect();
        Ok(Self::from_sorted_unique(n, &pos, &neg))
    }

    /// Builds a graph from edge lists already known to be valid: every pair
    /// has `u < v`, no pair appears twice and the two lists are disjoint.
    pub(crate) fn from_sorted_unique(n: usize, pos: &[(u32, u32)], neg: &[(u32, u32)]) -> Self {
        SignedGraph {
            n,
            pos: Csr::build(n, pos),
            neg: Csr::build(n, neg),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pos_neighbors(&self, i: usize) -> &[u32] {
        self.pos.row(i)
    }

    pub fn neg_neighbors(&self, i: usize) -> &[u32] {
        self.neg.row(i)
    }

    pub fn n_pos(&self) -> u64 {
        self.pos.edge_count()
    }

    pub fn n_neg(&self) -> u64 {
        self.neg.edge_count()
    }

    /// Signed entry `A_ij` in {-1, 0, 1}.
    pub fn sign_of(&self, i: usize, j: usize) -> i8 {
        if self.pos.row(i).binary_search(&(j as u32)).is_ok() {
            1
        } else if self.neg.row(i).binary_search(&(j as u32)).is_ok() {
            -1
        } else {
            0
        }
    }

    /// All edges with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize, Sign)> {
        let mut out = Vec::with_capacity((self.n_pos() + self.n_neg()) as usize);
        for u in 0..self.n {
            let mut p = self.pos.row(u).iter().filter(|&&v| v as usize > u).peekable();
            let mut q = self.neg.row(u).iter().filter(|&&v| v as usize > u).peekable();
            loop {
                match (p.peek(), q.peek()) {
                    (Some(&&a), Some(&&b)) if a < b => {
                        out.push((u, a as usize, Sign::Positive));
                        p.next();
                    }
                    (Some(_), Some(&&b)) => {
                        out.push((u, b as usize, Sign::Negative));
                        q.next();
                    }
                    (Some(&&a), None) => {
                        out.push((u, a as usize, Sign::Positive));
                        p.next();
                    }
                    (None, Some(&&b)) => {
                        out.push((u, b as usize, Sign::Negative));
                        q.next();
                    }
                    (None, None) => break,
                }
            }
        }
        out
    }

    /// Serializes as "u v w" lines, 0-based, `u < v`, sorted.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        for (u, v, sign) in self.edges() {
            let _ = writeln!(s, "{} {} {}", u, v, sign.as_i8());
        }
        s
    }

    /// Checks symmetry, absence of self-loops, sign disjointness and sorted
    /// duplicate-free neighbor lists.
    pub fn audit(&self) -> Result<(), String> {
        for (name, csr) in [("positive", &self.pos), ("negative", &self.neg)] {
            if csr.offsets.len() != self.n + 1 {
                return Err(format!("{name}: offsets length mismatch"));
            }
            for i in 0..self.n {
                let row = csr.row(i);
                if row.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(format!("{name}: row {i} not strictly sorted"));
                }
                for &j in row {
                    let j = j as usize;
                    if j >= self.n {
                        return Err(format!("{name}: neighbor {j} of {i} out of range"));
                    }
                    if j == i {
                        return Err(format!("{name}: self-loop on {i}"));
                    }
                    if csr.row(j).binary_search(&(i as u32)).is_err() {
                        return Err(format!("{name}: edge {i}-{j} not symmetric"));
                    }
                }
            }
        }
        for i in 0..self.n {
            if sorted_intersection_count(self.pos.row(i), self.neg.row(i)) > 0 {
                return Err(format!("node {i} has a pair carrying both signs"));
            }
        }
        Ok(())
    }

    /// Edge and triangle counts of both signed subgraphs.
    pub fn moments(&self) -> GraphMoments {
        count_moments(self)
    }

    /// Returns `(A+ v, A- v)`.
    pub fn apply_signed(&self, v: &[f64]) -> Result<(Vec<f64>, Vec<f64>), GraphError> {
        self.check_len(v.len())?;
        let mut ap = vec![0.0; self.n];
        let mut an = vec![0.0; self.n];
        for i in 0..self.n {
            ap[i] = self.pos.row(i).iter().map(|&j| v[j as usize]).sum();
            an[i] = self.neg.row(i).iter().map(|&j| v[j as usize]).sum();
        }
        Ok((ap, an))
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<(), GraphError> {
        if len != self.n {
            return Err(GraphError::DimensionMismatch {
                expected: self.n,
                got: len,
            });
        }
        Ok(())
    }
}

fn sorted_intersection_count(a: &[u32], b: &[u32]) -> u64 {
    let (mut i, mut j, mut c) = (0, 0, 0u64);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

fn triangles(csr: &Csr, n: usize) -> u64 {
    // Each triangle u < v < w is counted once, from its edge (u, v).
    let mut total = 0u64;
    for u in 0..n {
        let nu = csr.row(u);
        for (k, &v) in nu.iter().enumerate() {
            if (v as usize) <= u {
                continue;
            }
            let nv = csr.row(v as usize);
            let start = nv.partition_point(|&w| w <= v);
            total += sorted_intersection_count(&nu[k + 1..], &nv[start..]);
        }
    }
    total
}

/// Edge counts and triangle counts (`tr(A^3)/6`) of the positive and negative
/// subgraphs, via per-edge sorted neighbor intersection.
pub fn count_moments(g: &SignedGraph) -> GraphMoments {
    GraphMoments {
        n_pos: g.n_pos(),
        n_neg: g.n_neg(),
        t_pos: triangles(&g.pos, g.n),
        t_neg: triangles(&g.neg, g.n),
    }
}

/// Parses a whitespace separated "u v w" edge list with `w` in {1, -1}.
///
/// Lines starting with `%` or `#` are comments. Columns after the third
/// (KONECT timestamps) are ignored. With `one_based` every id is shifted
/// down by one.
pub fn parse_edge_list(text: &str, one_based: bool) -> Result<SignedGraph, ParseError> {
    let mut edges = Vec::new();
    let mut lines = Vec::new();
    let mut max_id = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') || line.starts_with('#') {
            continue;
        }
        let mut tok = line.split_whitespace();
        let malformed = |msg: String| ParseError::Malformed { line: line_no, msg };
        let mut id = |name: &str| -> Result<usize, ParseError> {
            let t = tok
                .next()
                .ok_or_else(|| malformed(format!("missing {name}")))?;
            let v: usize = t
                .parse()
                .map_err(|_| malformed(format!("bad node id {t:?}")))?;
            if one_based {
                v.checked_sub(1)
                    .ok_or_else(|| malformed("node id 0 in 1-based input".into()))
            } else {
                Ok(v)
            }
        };
        let u = id("source")?;
        let v = id("target")?;
        let w_tok = tok
            .next()
            .ok_or_else(|| malformed("missing weight".into()))?;
        let sign = match w_tok.parse::<i64>() {
            Ok(1) => Sign::Positive,
            Ok(-1) => Sign::Negative,
            _ => return Err(malformed(format!("weight {w_tok:?} is not 1 or -1"))),
        };
        if u == v {
            return Err(ParseError::Graph {
                line: line_no,
                source: GraphError::SelfLoop(u),
            });
        }
        max_id = max_id.max(u).max(v);
        edges.push((u, v, sign));
        lines.push(line_no);
    }
    if edges.is_empty() {
        return Err(ParseError::Empty);
    }
    SignedGraph::from_edges(max_id + 1, edges.iter().copied()).map_err(|e| {
        // Point at the second occurrence of the offending pair.
        let line = match e {
            GraphError::DuplicateEdge(a, b) | GraphError::ConflictingSign(a, b) => edges
                .iter()
                .zip(&lines)
                .filter(|((u, v, _), _)| (*u.min(v), *u.max(v)) == (a, b))
                .map(|(_, &l)| l)
                .nth(1)
                .unwrap_or(0),
            _ => 0,
        };
        ParseError::Graph { line, source: e }
    })
}
