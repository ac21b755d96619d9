//! Finite presentations of k-graphs: a k-colored directed multigraph together
//! with one commuting-square table per pair of colors.
//!
//! A [`Skeleton`] is only *structurally* checked (ids resolve, colors are in
//! range). Whether it actually presents a k-graph is decided by
//! [`crate::validate::validate_skeleton`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{KGraphError, Result};

/// Index of a vertex within its skeleton.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Vertex(pub usize);

/// Index of an edge within its skeleton.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Edge(pub usize);

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v#{}", self.0)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e#{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredEdge {
    pub id: String,
    pub color: usize,
    pub range: Vertex,
    pub source: Vertex,
}

/// One commuting square `f·g = g′·f′`, with `f, f′` of the lower color `i`
/// and `g, g′` of the higher color `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SquareEntry {
    /// `(f, g)`: color i then color j.
    pub left: (Edge, Edge),
    /// `(g′, f′)`: color j then color i.
    pub right: (Edge, Edge),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareTable {
    /// `(i, j)` with `i < j`.
    pub colors: (usize, usize),
    /// Sorted by `left`.
    pub entries: Vec<SquareEntry>,
}

#[derive(Clone, Debug)]
pub struct Skeleton {
    k: usize,
    vertices: Vec<String>,
    edges: Vec<ColoredEdge>,
    squares: Vec<SquareTable>,
    vertex_index: HashMap<String, Vertex>,
    edge_index: HashMap<String, Edge>,
}

impl PartialEq for Skeleton {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k
            && self.vertices == other.vertices
            && self.edges == other.edges
            && self.squares == other.squares
    }
}

impl Eq for Skeleton {}

impl Skeleton {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = Vertex> + '_ {
        (0..self.vertices.len()).map(Vertex)
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_id(&self, v: Vertex) -> &str {
        &self.vertices[v.0]
    }

    pub fn vertex(&self, id: &str) -> Option<Vertex> {
        self.vertex_index.get(id).copied()
    }

    pub fn edges(&self) -> &[ColoredEdge] {
        &self.edges
    }

    pub fn edge(&self, e: Edge) -> &ColoredEdge {
        &self.edges[e.0]
    }

    pub fn edge_id(&self, e: Edge) -> &str {
        &self.edges[e.0].id
    }

    pub fn edge_by_id(&self, id: &str) -> Option<Edge> {
        self.edge_index.get(id).copied()
    }

    pub fn color(&self, e: Edge) -> usize {
        self.edges[e.0].color
    }

    /// Square tables, one per color pair `i < j`, in lexicographic order.
    pub fn squares(&self) -> &[SquareTable] {
        &self.squares
    }

    pub fn square_table(&self, i: usize, j: usize) -> Option<&SquareTable> {
        self.squares.iter().find(|t| t.colors == (i, j))
    }

    pub fn edges_of_color(&self, color: usize) -> impl Iterator<Item = Edge> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.color == color)
            .map(|(i, _)| Edge(i))
    }

    /// Human-readable word of edge ids.
    pub fn word_ids(&self, word: &[Edge]) -> Vec<String> {
        word.iter().map(|e| self.edge_id(*e).to_owned()).collect()
    }
}

/// String-keyed builder; all references are resolved by [`SkeletonBuilder::build`].
#[derive(Clone, Debug, Default)]
pub struct SkeletonBuilder {
    k: usize,
    vertices: Vec<String>,
    edges: Vec<(String, usize, String, String)>,
    squares: Vec<((usize, usize), [String; 2], [String; 2])>,
}

impl SkeletonBuilder {
    pub fn new(k: usize) -> Self {
        SkeletonBuilder {
            k,
            ..Default::default()
        }
    }

    pub fn vertex(mut self, id: impl Into<String>) -> Self {
        self.vertices.push(id.into());
        self
    }

    pub fn vertices<S: Into<String>>(mut self, ids: impl IntoIterator<Item = S>) -> Self {
        self.vertices.extend(ids.into_iter().map(Into::into));
        self
    }

    pub fn edge(
        mut self,
        id: impl Into<String>,
        color: usize,
        range: impl Into<String>,
        source: impl Into<String>,
    ) -> Self {
        self.edges.push((id.into(), color, range.into(), source.into()));
        self
    }

    /// Adds the square `f·g = gp·fp` to the table for `pair`.
    pub fn square(mut self, pair: (usize, usize), left: [&str; 2], right: [&str; 2]) -> Self {
        self.squares.push((
            pair,
            [left[0].to_owned(), left[1].to_owned()],
            [right[0].to_owned(), right[1].to_owned()],
        ));
        self
    }

    pub fn build(self) -> Result<Skeleton> {
        let malformed = |location: String, message: String| KGraphError::MalformedSkeleton { location, message };
        if self.k == 0 {
            return Err(malformed("k".into(), "k must be a positive integer".into()));
        }
        if self.vertices.is_empty() {
            return Err(malformed(
                "vertices".into(),
                "vertex list is empty; the standing assumption cannot hold".into(),
            ));
        }

        let mut vertex_index = HashMap::new();
        for (i, id) in self.vertices.iter().enumerate() {
            if vertex_index.insert(id.clone(), Vertex(i)).is_some() {
                return Err(malformed(
                    format!("vertices[{i}]"),
                    format!("duplicate vertex id {id:?}"),
                ));
            }
        }

        let mut edge_index = HashMap::new();
        let mut edges = Vec::with_capacity(self.edges.len());
        for (i, (id, color, range, source)) in self.edges.iter().enumerate() {
            if edge_index.insert(id.clone(), Edge(i)).is_some() {
                return Err(malformed(format!("edges[{i}].id"), format!("duplicate edge id {id:?}")));
            }
            if *color >= self.k {
                return Err(malformed(
                    format!("edges[{i}].color"),
                    format!("color {color} out of range for k = {}", self.k),
                ));
            }
            let resolve = |field: &str, name: &str| {
                vertex_index
                    .get(name)
                    .copied()
                    .ok_or_else(|| malformed(format!("edges[{i}].{field}"), format!("unknown vertex {name:?}")))
            };
            edges.push(ColoredEdge {
                id: id.clone(),
                color: *color,
                range: resolve("range", range)?,
                source: resolve("source", source)?,
            });
        }

        let mut tables: BTreeMap<(usize, usize), Vec<SquareEntry>> = BTreeMap::new();
        for i in 0..self.k {
            for j in i + 1..self.k {
                tables.insert((i, j), Vec::new());
            }
        }
        for (n, (pair, left, right)) in self.squares.iter().enumerate() {
            let (i, j) = *pair;
            if !(i < j && j < self.k) {
                return Err(malformed(
                    format!("squares[{n}].pair"),
                    format!("color pair ({i},{j}) must satisfy i < j < k = {}", self.k),
                ));
            }
            let resolve = |field: &str, name: &str| {
                edge_index
                    .get(name)
                    .copied()
                    .ok_or_else(|| malformed(format!("squares[{n}].{field}"), format!("unknown edge {name:?}")))
            };
            let entry = SquareEntry {
                left: (resolve("left[0]", &left[0])?, resolve("left[1]", &left[1])?),
                right: (resolve("right[0]", &right[0])?, resolve("right[1]", &right[1])?),
            };
            tables.get_mut(&(i, j)).expect("pair table").push(entry);
        }
        let squares = tables
            .into_iter()
            .map(|(colors, mut entries)| {
                entries.sort();
                SquareTable { colors, entries }
            })
            .collect();

        Ok(Skeleton {
            k: self.k,
            vertices: self.vertices,
            edges,
            squares,
            vertex_index,
            edge_index,
        })
    }
}

impl Skeleton {
    /// Rebuilds a builder carrying the same data, e.g. to perturb a fixture.
    pub fn to_builder(&self) -> SkeletonBuilder {
        let mut b = SkeletonBuilder::new(self.k).vertices(self.vertices.iter().cloned());
        for e in &self.edges {
            b = b.edge(
                e.id.clone(),
                e.color,
                self.vertex_id(e.range).to_owned(),
                self.vertex_id(e.source).to_owned(),
            );
        }
        for t in &self.squares {
            for s in &t.entries {
                b = b.square(
                    t.colors,
                    [self.edge_id(s.left.0), self.edge_id(s.left.1)],
                    [self.edge_id(s.right.0), self.edge_id(s.right.1)],
                );
            }
        }
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g3_builder() -> SkeletonBuilder {
        SkeletonBuilder::new(2)
            .vertex("v")
            .edge("b1", 0, "v", "v")
            .edge("b2", 0, "v", "v")
            .edge("r1", 1, "v", "v")
            .edge("r2", 1, "v", "v")
    }

    #[test]
    fn builds_and_indexes() {
        let sk = g3_builder().square((0, 1), ["b1", "r1"], ["r1", "b1"]).build().unwrap();
        assert_eq!(sk.k(), 2);
        assert_eq!(sk.edge_by_id("r2"), Some(Edge(3)));
        assert_eq!(sk.edges_of_color(1).count(), 2);
        assert_eq!(sk.squares().len(), 1);
        assert_eq!(sk.squares()[0].entries.len(), 1);
    }

    #[test]
    fn dangling_square_reference_is_malformed() {
        let err = g3_builder()
            .square((0, 1), ["b1", "r9"], ["r1", "b1"])
            .build()
            .unwrap_err();
        match err {
            KGraphError::MalformedSkeleton { location, .. } => assert_eq!(location, "squares[0].left[1]"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn structural_errors() {
        assert!(SkeletonBuilder::new(1).build().is_err());
        assert!(SkeletonBuilder::new(0).vertex("v").build().is_err());
        assert!(SkeletonBuilder::new(1).vertex("v").vertex("v").build().is_err());
        assert!(SkeletonBuilder::new(1)
            .vertex("v")
            .edge("a", 1, "v", "v")
            .build()
            .is_err());
        assert!(SkeletonBuilder::new(1)
            .vertex("v")
            .edge("a", 0, "v", "w")
            .build()
            .is_err());
        assert!(g3_builder().square((1, 0), ["r1", "b1"], ["b1", "r1"]).build().is_err());
    }

    #[test]
    fn builder_round_trip() {
        let sk = g3_builder().square((0, 1), ["b1", "r1"], ["r1", "b1"]).build().unwrap();
        assert_eq!(sk.to_builder().build().unwrap(), sk);
    }
}
