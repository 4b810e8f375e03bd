//! Finite directed graphs and their paths.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A finite graph with named vertices and edges. Ids are assigned in
/// insertion order, which fixes every ordering the crate produces.
#[derive(Clone, Debug)]
pub struct Graph {
    vertex_names: Vec<String>,
    edge_names: Vec<String>,
    src: Vec<VertexId>,
    rng: Vec<VertexId>,
    out: Vec<Vec<EdgeId>>,
    vertex_lookup: HashMap<String, VertexId>,
    edge_lookup: HashMap<String, EdgeId>,
}

/// A finite path. Vertices are the paths of length zero; `src` is always the
/// source, so equality of paths is equality of this struct.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    src: VertexId,
    rng: VertexId,
    edges: Vec<EdgeId>,
}

/// Restricts [`Graph::paths_up_to`] to paths with a given source and/or range.
#[derive(Clone, Copy, Debug, Default)]
pub struct PathFilter {
    pub source: Option<VertexId>,
    pub range: Option<VertexId>,
}

impl Graph {
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Graph>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        E: IntoIterator<Item = (String, String, String)>,
    {
        let mut g = Graph {
            vertex_names: Vec::new(),
            edge_names: Vec::new(),
            src: Vec::new(),
            rng: Vec::new(),
            out: Vec::new(),
            vertex_lookup: HashMap::new(),
            edge_lookup: HashMap::new(),
        };
        for v in vertices {
            let v = v.into();
            if g.vertex_lookup.contains_key(&v) {
                return Err(Error::Schema(format!("duplicate vertex id {v:?}")));
            }
            let id = VertexId(g.vertex_names.len() as u32);
            g.vertex_lookup.insert(v.clone(), id);
            g.vertex_names.push(v);
            g.out.push(Vec::new());
        }
        for (name, s, r) in edges {
            if g.edge_lookup.contains_key(&name) || g.vertex_lookup.contains_key(&name) {
                return Err(Error::Schema(format!("duplicate or clashing edge id {name:?}")));
            }
            let s = g.vertex(&s)?;
            let r = g.vertex(&r)?;
            let id = EdgeId(g.edge_names.len() as u32);
            g.edge_lookup.insert(name.clone(), id);
            g.edge_names.push(name);
            g.src.push(s);
            g.rng.push(r);
            g.out[s.index()].push(id);
        }
        Ok(g)
    }

    pub fn vertex(&self, name: &str) -> Result<VertexId> {
        self.vertex_lookup
            .get(name)
            .copied()
            .ok_or_else(|| Error::Schema(format!("unknown vertex {name:?}")))
    }

    pub fn edge(&self, name: &str) -> Result<EdgeId> {
        self.edge_lookup
            .get(name)
            .copied()
            .ok_or_else(|| Error::Schema(format!("unknown edge {name:?}")))
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edge_names.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertex_names.len() as u32).map(VertexId)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edge_names.len() as u32).map(EdgeId)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.index()]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edge_names[e.index()]
    }

    pub fn src(&self, e: EdgeId) -> VertexId {
        self.src[e.index()]
    }

    pub fn rng(&self, e: EdgeId) -> VertexId {
        self.rng[e.index()]
    }

    /// Edges with source `v`, in insertion order.
    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out[v.index()]
    }

    /// Vertices emitting a nonzero finite number of edges.
    pub fn regular_vertices(&self) -> Vec<VertexId> {
        self.vertices().filter(|v| !self.out[v.index()].is_empty()).collect()
    }

    pub fn sinks(&self) -> Vec<VertexId> {
        self.vertices().filter(|v| self.out[v.index()].is_empty()).collect()
    }

    pub fn is_regular(&self, v: VertexId) -> bool {
        !self.out[v.index()].is_empty()
    }

    /// All paths of length at most `n` passing the filter, each once, ordered
    /// lexicographically by edge sequence (vertices first, by id).
    pub fn paths_up_to(&self, n: usize, filter: PathFilter) -> Vec<Path> {
        let mut found = Vec::new();
        let starts: Vec<VertexId> = match filter.source {
            Some(v) => vec![v],
            None => self.vertices().collect(),
        };
        let mut frontier: Vec<Path> = starts.iter().map(|&v| Path::vertex(v)).collect();
        for len in 0..=n {
            for p in &frontier {
                if filter.range.map_or(true, |r| r == p.rng) {
                    found.push(p.clone());
                }
            }
            if len == n {
                break;
            }
            let mut next = Vec::new();
            for p in &frontier {
                for &e in self.out_edges(p.rng) {
                    next.push(p.extended(self, e));
                }
            }
            frontier = next;
        }
        found.sort();
        found
    }

    /// The reduced incidence matrix, rows indexed by regular vertices and
    /// columns by all vertices: entry `(v, w)` counts edges from `v` to `w`.
    pub fn reduced_incidence(&self) -> (Vec<VertexId>, Vec<Vec<u64>>) {
        let rows = self.regular_vertices();
        let n = self.num_vertices();
        let matrix = rows
            .iter()
            .map(|&v| {
                let mut row = vec![0u64; n];
                for &e in self.out_edges(v) {
                    row[self.rng(e).index()] += 1;
                }
                row
            })
            .collect();
        (rows, matrix)
    }

    /// Whether there is a path of positive length from `a` to `b`.
    pub fn reachable_nontrivially(&self, a: VertexId, b: VertexId) -> bool {
        let mut seen = vec![false; self.num_vertices()];
        let mut stack: Vec<VertexId> = self.out_edges(a).iter().map(|&e| self.rng(e)).collect();
        while let Some(v) = stack.pop() {
            if v == b {
                return true;
            }
            if !std::mem::replace(&mut seen[v.index()], true) {
                stack.extend(self.out_edges(v).iter().map(|&e| self.rng(e)));
            }
        }
        false
    }

    pub fn format_path(&self, p: &Path) -> String {
        if p.edges.is_empty() {
            self.vertex_name(p.src).to_string()
        } else {
            p.edges.iter().map(|&e| self.edge_name(e)).collect::<Vec<_>>().join(" ")
        }
    }

    /// Parses a path given as edge names, or a single vertex name.
    pub fn parse_path(&self, names: &[String]) -> Result<Path> {
        match names {
            [] if self.num_vertices() == 1 => Ok(Path::vertex(VertexId(0))),
            [] => Err(Error::Schema("empty path needs a vertex name".into())),
            [one] if self.vertex_lookup.contains_key(one) => Ok(Path::vertex(self.vertex(one)?)),
            _ => {
                let edges = names.iter().map(|n| self.edge(n)).collect::<Result<Vec<_>>>()?;
                Path::from_edges(self, edges)
            }
        }
    }

    /// Inverse of [`Graph::parse_path`].
    pub fn path_names(&self, p: &Path) -> Vec<String> {
        if p.edges.is_empty() {
            vec![self.vertex_name(p.src).to_string()]
        } else {
            p.edges.iter().map(|&e| self.edge_name(e).to_string()).collect()
        }
    }
}

impl Path {
    pub fn vertex(v: VertexId) -> Path {
        Path { src: v, rng: v, edges: Vec::new() }
    }

    pub fn edge(g: &Graph, e: EdgeId) -> Path {
        Path { src: g.src(e), rng: g.rng(e), edges: vec![e] }
    }

    pub fn from_edges(g: &Graph, edges: Vec<EdgeId>) -> Result<Path> {
        let first = *edges.first().ok_or_else(|| Error::Schema("empty edge list".into()))?;
        for w in edges.windows(2) {
            if g.rng(w[0]) != g.src(w[1]) {
                return Err(Error::Schema(format!(
                    "edges {} and {} are not composable",
                    g.edge_name(w[0]),
                    g.edge_name(w[1])
                )));
            }
        }
        let last = *edges.last().unwrap();
        Ok(Path { src: g.src(first), rng: g.rng(last), edges })
    }

    pub fn src(&self) -> VertexId {
        self.src
    }

    pub fn rng(&self) -> VertexId {
        self.rng
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_vertex(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn last_edge(&self) -> Option<EdgeId> {
        self.edges.last().copied()
    }

    /// `self · e`; panics if `e` does not start at the range of `self`.
    pub fn extended(&self, g: &Graph, e: EdgeId) -> Path {
        assert_eq!(g.src(e), self.rng, "edge does not extend path");
        let mut edges = self.edges.clone();
        edges.push(e);
        Path { src: self.src, rng: g.rng(e), edges }
    }

    /// Drops the last edge. Vertices are returned unchanged.
    pub fn without_last(&self, g: &Graph) -> Path {
        match self.edges.split_last() {
            None => self.clone(),
            Some((&last, rest)) => Path { src: self.src, rng: g.src(last), edges: rest.to_vec() },
        }
    }

    /// Concatenation, `None` when `r(self) != s(other)`.
    pub fn concat(&self, other: &Path) -> Option<Path> {
        if self.rng != other.src {
            return None;
        }
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Some(Path { src: self.src, rng: other.rng, edges })
    }

    /// If `other = self · rest`, returns `rest`.
    pub fn strip_prefix_of(&self, other: &Path) -> Option<Path> {
        if self.src != other.src || !other.edges.starts_with(&self.edges) {
            return None;
        }
        Some(Path { src: self.rng, rng: other.rng, edges: other.edges[self.edges.len()..].to_vec() })
    }

    /// Assembles a path from parts the caller has already checked.
    pub(crate) fn from_parts(src: VertexId, rng: VertexId, edges: Vec<EdgeId>) -> Path {
        Path { src, rng, edges }
    }
}

impl Ord for Path {
    fn cmp(&self, other: &Self) -> Ordering {
        self.edges.cmp(&other.edges).then(self.src.cmp(&other.src))
    }
}

impl PartialOrd for Path {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}
