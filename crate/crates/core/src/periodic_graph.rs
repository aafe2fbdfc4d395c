//! Periodic graphs described by their finite quotient.
//!
//! A periodic graph is an infinite graph with a free action of `Z^d` whose
//! vertex set has finitely many orbits. It is stored as the quotient: the
//! number of vertex orbits `m` and one representative per edge orbit, each
//! carrying the translation between the cells of its two endpoints.
//!
//! Orbit indices are 1-based throughout, matching the text format:
//!
//! ```text
//! # square lattice
//! dim 2
//! vertices 1
//! edge 1 1 1 0
//! edge 1 1 0 1
//! ```

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cap on vertices visited by [`PeriodicGraph::bfs_coordination`].
pub const DEFAULT_VISIT_BUDGET: usize = 10_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("orbit index {0} out of range 1..={1}")]
    OrbitOutOfRange(usize, usize),
    #[error("offset has {got} coordinates, expected {expected}")]
    OffsetArity { expected: usize, got: usize },
    #[error("edge {0} is a self-edge with zero offset")]
    ZeroSelfEdge(EdgeOrbit),
    #[error("duplicate edge orbit {0}")]
    DuplicateEdge(EdgeOrbit),
    #[error("dimension and vertex count must be positive")]
    Degenerate,
    #[error("breadth-first search visited more than {0} vertices")]
    BudgetExceeded(usize),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("expected `{0}`")]
    Expected(&'static str),
    #[error("malformed line: {0}")]
    Malformed(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// One representative of an orbit of edges: `{source, offset . target}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeOrbit {
    pub source: usize,
    pub target: usize,
    pub offset: Vec<i64>,
}

impl EdgeOrbit {
    pub fn new(source: usize, target: usize, offset: Vec<i64>) -> Self {
        EdgeOrbit {
            source,
            target,
            offset,
        }
    }

    /// The same undirected edge seen from the other endpoint.
    pub fn reversed(&self) -> Self {
        EdgeOrbit {
            source: self.target,
            target: self.source,
            offset: self.offset.iter().map(|x| -x).collect(),
        }
    }

    /// `source < target`, or `source == target` with a lexicographically
    /// positive offset.
    pub fn canonical(self) -> Self {
        let flip = match self.source.cmp(&self.target) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => self
                .offset
                .iter()
                .find(|&&x| x != 0)
                .is_some_and(|&x| x < 0),
        };
        if flip {
            self.reversed()
        } else {
            self
        }
    }
}

impl fmt::Display for EdgeOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} -> {} {:?})", self.source, self.target, self.offset)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicGraph {
    dim: usize,
    num_orbits: usize,
    edge_orbits: Vec<EdgeOrbit>,
}

/// A vertex of the infinite cover: the translate `shift . v_orbit`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoverVertex {
    pub orbit: usize,
    pub shift: Vec<i64>,
}

impl CoverVertex {
    pub fn new(orbit: usize, shift: Vec<i64>) -> Self {
        CoverVertex { orbit, shift }
    }

    pub fn origin(orbit: usize, dim: usize) -> Self {
        CoverVertex {
            orbit,
            shift: vec![0; dim],
        }
    }

    pub fn translated(&self, by: &[i64]) -> Self {
        CoverVertex {
            orbit: self.orbit,
            shift: self.shift.iter().zip(by).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Shell sizes `c_0, c_1, ...` around a vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoordinationSequence {
    values: Vec<u64>,
}

impl CoordinationSequence {
    pub fn new(values: Vec<u64>) -> Self {
        CoordinationSequence { values }
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of vertices at distance at most `k`, for each `k`.
    pub fn cumulative_counts(&self) -> Vec<u64> {
        self.values
            .iter()
            .scan(0u64, |acc, &c| {
                *acc += c;
                Some(*acc)
            })
            .collect()
    }
}

impl PeriodicGraph {
    /// Builds a graph, canonicalizing edge orientations. Duplicates
    /// (including orientation-flipped copies) and zero self-edges are errors.
    pub fn new(
        dim: usize,
        num_orbits: usize,
        edges: impl IntoIterator<Item = EdgeOrbit>,
    ) -> Result<Self, GraphError> {
        if dim == 0 || num_orbits == 0 {
            return Err(GraphError::Degenerate);
        }
        let mut seen = BTreeSet::new();
        let mut edge_orbits = Vec::new();
        for e in edges {
            Self::check_edge(dim, num_orbits, &e)?;
            let e = e.canonical();
            if !seen.insert(e.clone()) {
                return Err(GraphError::DuplicateEdge(e));
            }
            edge_orbits.push(e);
        }
        edge_orbits.sort();
        Ok(PeriodicGraph {
            dim,
            num_orbits,
            edge_orbits,
        })
    }

    fn check_edge(dim: usize, m: usize, e: &EdgeOrbit) -> Result<(), GraphError> {
        for o in [e.source, e.target] {
            if o == 0 || o > m {
                return Err(GraphError::OrbitOutOfRange(o, m));
            }
        }
        if e.offset.len() != dim {
            return Err(GraphError::OffsetArity {
                expected: dim,
                got: e.offset.len(),
            });
        }
        if e.source == e.target && e.offset.iter().all(|&x| x == 0) {
            return Err(GraphError::ZeroSelfEdge(e.clone()));
        }
        Ok(())
    }

    /// Parses the line format (`dim`, `vertices`, then `edge` lines).
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut dim = None;
        let mut m = None;
        let mut seen = BTreeSet::new();
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |kind| ParseError { line, kind };
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            let Some((&head, rest)) = tokens.split_first() else {
                continue;
            };
            let ints = |xs: &[&str]| -> Result<Vec<i64>, ParseError> {
                xs.iter()
                    .map(|t| {
                        t.parse::<i64>().map_err(|_| {
                            err(ParseErrorKind::Malformed(format!("`{t}` is not an integer")))
                        })
                    })
                    .collect()
            };
            match (dim, m) {
                (None, _) => {
                    if head != "dim" {
                        return Err(err(ParseErrorKind::Expected("dim <d>")));
                    }
                    let v = ints(rest)?;
                    match v.as_slice() {
                        [d] if *d > 0 => dim = Some(*d as usize),
                        _ => return Err(err(ParseErrorKind::Malformed("dim takes one positive integer".into()))),
                    }
                }
                (Some(_), None) => {
                    if head != "vertices" {
                        return Err(err(ParseErrorKind::Expected("vertices <m>")));
                    }
                    let v = ints(rest)?;
                    match v.as_slice() {
                        [n] if *n > 0 => m = Some(*n as usize),
                        _ => {
                            return Err(err(ParseErrorKind::Malformed(
                                "vertices takes one positive integer".into(),
                            )))
                        }
                    }
                }
                (Some(d), Some(n)) => {
                    if head != "edge" {
                        return Err(err(ParseErrorKind::Malformed(format!("unknown keyword `{head}`"))));
                    }
                    let v = ints(rest)?;
                    if v.len() < 2 {
                        return Err(err(ParseErrorKind::Malformed("edge needs source and target".into())));
                    }
                    if v[0] < 1 || v[1] < 1 {
                        let bad = if v[0] < 1 { v[0] } else { v[1] };
                        return Err(err(ParseErrorKind::Graph(GraphError::OrbitOutOfRange(
                            bad.max(0) as usize,
                            n,
                        ))));
                    }
                    let e = EdgeOrbit::new(v[0] as usize, v[1] as usize, v[2..].to_vec());
                    Self::check_edge(d, n, &e).map_err(|g| err(g.into()))?;
                    let e = e.canonical();
                    if !seen.insert(e.clone()) {
                        return Err(err(GraphError::DuplicateEdge(e).into()));
                    }
                    edges.push(e);
                }
            }
        }
        let last = text.lines().count().max(1);
        let dim = dim.ok_or(ParseError {
            line: last,
            kind: ParseErrorKind::Expected("dim <d>"),
        })?;
        let m = m.ok_or(ParseError {
            line: last,
            kind: ParseErrorKind::Expected("vertices <m>"),
        })?;
        // every edge was validated above
        Ok(PeriodicGraph::new(dim, m, edges).expect("validated edges"))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_orbits(&self) -> usize {
        self.num_orbits
    }

    pub fn edge_orbits(&self) -> &[EdgeOrbit] {
        &self.edge_orbits
    }

    /// Serializes back to the line format.
    pub fn to_text(&self) -> String {
        let mut s = format!("dim {}\nvertices {}\n", self.dim, self.num_orbits);
        for e in &self.edge_orbits {
            s.push_str(&format!("edge {} {}", e.source, e.target));
            for x in &e.offset {
                s.push_str(&format!(" {x}"));
            }
            s.push('\n');
        }
        s
    }

    /// Neighbors of `v` in the infinite cover, sorted and deduplicated.
    ///
    /// Panics if `v.orbit` is not a valid orbit index.
    pub fn cover_neighbors(&self, v: &CoverVertex) -> Vec<CoverVertex> {
        assert!(
            (1..=self.num_orbits).contains(&v.orbit),
            "orbit {} out of range",
            v.orbit
        );
        let mut out = Vec::new();
        for e in &self.edge_orbits {
            if e.source == v.orbit {
                out.push(CoverVertex {
                    orbit: e.target,
                    shift: v.shift.iter().zip(&e.offset).map(|(a, b)| a + b).collect(),
                });
            }
            if e.target == v.orbit {
                out.push(CoverVertex {
                    orbit: e.source,
                    shift: v.shift.iter().zip(&e.offset).map(|(a, b)| a - b).collect(),
                });
            }
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn bfs_coordination(
        &self,
        origin_orbit: usize,
        depth: usize,
    ) -> Result<CoordinationSequence, GraphError> {
        self.bfs_coordination_with_budget(origin_orbit, depth, DEFAULT_VISIT_BUDGET)
    }

    /// Layered breadth-first search from `(origin_orbit, 0)` out to `depth`.
    pub fn bfs_coordination_with_budget(
        &self,
        origin_orbit: usize,
        depth: usize,
        budget: usize,
    ) -> Result<CoordinationSequence, GraphError> {
        if !(1..=self.num_orbits).contains(&origin_orbit) {
            return Err(GraphError::OrbitOutOfRange(origin_orbit, self.num_orbits));
        }
        let start = CoverVertex::origin(origin_orbit, self.dim);
        let mut visited: HashSet<CoverVertex> = HashSet::new();
        visited.insert(start.clone());
        let mut frontier = vec![start];
        let mut values = vec![1u64];
        for _ in 0..depth {
            let mut next = Vec::new();
            for v in &frontier {
                for w in self.cover_neighbors(v) {
                    if !visited.contains(&w) {
                        if visited.len() >= budget {
                            return Err(GraphError::BudgetExceeded(budget));
                        }
                        visited.insert(w.clone());
                        next.push(w);
                    }
                }
            }
            values.push(next.len() as u64);
            frontier = next;
        }
        Ok(CoordinationSequence { values })
    }

    /// Distances from `(origin_orbit, 0)` to every cover vertex within
    /// `depth`, in no particular order.
    pub fn cover_distances(
        &self,
        origin_orbit: usize,
        depth: usize,
    ) -> Result<Vec<(CoverVertex, usize)>, GraphError> {
        if !(1..=self.num_orbits).contains(&origin_orbit) {
            return Err(GraphError::OrbitOutOfRange(origin_orbit, self.num_orbits));
        }
        let start = CoverVertex::origin(origin_orbit, self.dim);
        let mut visited: HashSet<CoverVertex> = HashSet::new();
        visited.insert(start.clone());
        let mut out = vec![(start.clone(), 0)];
        let mut frontier = vec![start];
        for k in 1..=depth {
            let mut next = Vec::new();
            for v in &frontier {
                for w in self.cover_neighbors(v) {
                    if visited.insert(w.clone()) {
                        out.push((w.clone(), k));
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        Ok(out)
    }
}

/// Classic nets used in tests, examples and the acceptance suite.
pub mod nets {
    use super::{EdgeOrbit, PeriodicGraph};

    fn build(dim: usize, m: usize, edges: &[(usize, usize, &[i64])]) -> PeriodicGraph {
        PeriodicGraph::new(
            dim,
            m,
            edges
                .iter()
                .map(|(s, t, x)| EdgeOrbit::new(*s, *t, x.to_vec())),
        )
        .expect("well-formed built-in net")
    }

    /// Two-sided infinite path.
    pub fn chain() -> PeriodicGraph {
        build(1, 1, &[(1, 1, &[1])])
    }

    /// Path with next-nearest-neighbour edges.
    pub fn chain_next_nearest() -> PeriodicGraph {
        build(1, 1, &[(1, 1, &[1]), (1, 1, &[2])])
    }

    /// Two rails joined by rungs.
    pub fn ladder() -> PeriodicGraph {
        build(1, 2, &[(1, 2, &[0]), (1, 1, &[1]), (2, 2, &[1])])
    }

    pub fn square() -> PeriodicGraph {
        build(2, 1, &[(1, 1, &[1, 0]), (1, 1, &[0, 1])])
    }

    pub fn honeycomb() -> PeriodicGraph {
        build(2, 2, &[(1, 2, &[0, 0]), (1, 2, &[1, 0]), (1, 2, &[0, 1])])
    }

    pub fn triangular() -> PeriodicGraph {
        build(2, 1, &[(1, 1, &[1, 0]), (1, 1, &[0, 1]), (1, 1, &[1, -1])])
    }

    /// Square lattice with both diagonals.
    pub fn king() -> PeriodicGraph {
        build(2, 1, &[(1, 1, &[1, 0]), (1, 1, &[0, 1]), (1, 1, &[1, 1]), (1, 1, &[1, -1])])
    }

    pub fn cubic() -> PeriodicGraph {
        build(3, 1, &[(1, 1, &[1, 0, 0]), (1, 1, &[0, 1, 0]), (1, 1, &[0, 0, 1])])
    }

    /// Kagome net. Its coordination automata have 15 distinct transitions,
    /// beyond what the support enumeration handles, so it is kept out of
    /// [`corpus`].
    pub fn kagome() -> PeriodicGraph {
        build(
            2,
            3,
            &[
                (1, 2, &[0, 0]),
                (1, 3, &[0, 0]),
                (2, 3, &[0, 0]),
                (1, 2, &[-1, 0]),
                (1, 3, &[0, -1]),
                (2, 3, &[1, -1]),
            ],
        )
    }

    /// No edges at all; every vertex is isolated.
    pub fn edgeless() -> PeriodicGraph {
        build(2, 1, &[])
    }

    /// `(name, graph)` pairs for the whole built-in corpus.
    pub fn corpus() -> Vec<(&'static str, PeriodicGraph)> {
        vec![
            ("chain", chain()),
            ("chain_next_nearest", chain_next_nearest()),
            ("ladder", ladder()),
            ("square", square()),
            ("honeycomb", honeycomb()),
            ("triangular", triangular()),
            ("king", king()),
            ("cubic", cubic()),
            ("edgeless", edgeless()),
        ]
    }
}
