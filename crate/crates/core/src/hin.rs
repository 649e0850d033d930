//! Typed graph model: schema, vertices, and per-edge-type adjacency.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Dense internal index of a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexTypeId(pub u16);

impl VertexTypeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeTypeId(pub u16);

impl EdgeTypeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexType {
    pub name: String,
}

/// A relation between two vertex types.
///
/// An undirected edge type is its own reverse: an `A`-`P` edge type can be
/// traversed from `A` to `P` and from `P` to `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeType {
    pub name: String,
    pub src: VertexTypeId,
    pub dst: VertexTypeId,
    pub directed: bool,
}

impl EdgeType {
    /// Whether this edge type can be walked from a vertex of type `from` to
    /// one of type `to`.
    pub fn connects(&self, from: VertexTypeId, to: VertexTypeId) -> bool {
        (self.src == from && self.dst == to) || (!self.directed && self.src == to && self.dst == from)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Schema {
    vertex_types: Vec<VertexType>,
    edge_types: Vec<EdgeType>,
    vertex_type_index: HashMap<String, VertexTypeId>,
    edge_type_index: HashMap<String, EdgeTypeId>,
}

impl Schema {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex_type(&mut self, name: &str) -> Result<VertexTypeId> {
        if self.vertex_type_index.contains_key(name) {
            return Err(Error::Duplicate(name.to_owned()));
        }
        let id = VertexTypeId(
            u16::try_from(self.vertex_types.len()).map_err(|_| Error::Config("too many vertex types".into()))?,
        );
        self.vertex_types.push(VertexType { name: name.to_owned() });
        self.vertex_type_index.insert(name.to_owned(), id);
        Ok(id)
    }

    pub fn add_edge_type(&mut self, name: &str, src: &str, dst: &str, directed: bool) -> Result<EdgeTypeId> {
        if self.edge_type_index.contains_key(name) {
            return Err(Error::Duplicate(name.to_owned()));
        }
        let src = self.vertex_type_id(src)?;
        let dst = self.vertex_type_id(dst)?;
        let id = EdgeTypeId(
            u16::try_from(self.edge_types.len()).map_err(|_| Error::Config("too many edge types".into()))?,
        );
        self.edge_types.push(EdgeType {
            name: name.to_owned(),
            src,
            dst,
            directed,
        });
        self.edge_type_index.insert(name.to_owned(), id);
        Ok(id)
    }

    pub fn vertex_type_id(&self, name: &str) -> Result<VertexTypeId> {
        self.vertex_type_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertexType(name.to_owned()))
    }

    pub fn edge_type_id(&self, name: &str) -> Result<EdgeTypeId> {
        self.edge_type_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownEdgeType(name.to_owned()))
    }

    pub fn vertex_type(&self, id: VertexTypeId) -> &VertexType {
        &self.vertex_types[id.index()]
    }

    pub fn edge_type(&self, id: EdgeTypeId) -> &EdgeType {
        &self.edge_types[id.index()]
    }

    pub fn vertex_types(&self) -> &[VertexType] {
        &self.vertex_types
    }

    pub fn edge_types(&self) -> &[EdgeType] {
        &self.edge_types
    }

    /// All edge types walkable from `from` to `to`.
    pub fn edge_types_between(&self, from: VertexTypeId, to: VertexTypeId) -> Vec<EdgeTypeId> {
        self.edge_types
            .iter()
            .enumerate()
            .filter(|(_, et)| et.connects(from, to))
            .map(|(i, _)| EdgeTypeId(i as u16))
            .collect()
    }
}

/// An edge as it was supplied to the builder, before undirected expansion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InputEdge {
    pub src: VertexId,
    pub dst: VertexId,
    pub edge_type: EdgeTypeId,
    pub weight: f64,
}

#[derive(Clone, Debug, Default)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    weights: Vec<f64>,
}

impl Csr {
    fn build(num_vertices: usize, mut entries: Vec<(VertexId, VertexId, f64)>) -> Self {
        // Stable sort keeps insertion order within each source list.
        entries.sort_by_key(|&(src, _, _)| src);
        let mut offsets = vec![0; num_vertices + 1];
        for &(src, _, _) in &entries {
            offsets[src.index() + 1] += 1;
        }
        for i in 0..num_vertices {
            offsets[i + 1] += offsets[i];
        }
        let (targets, weights) = entries.into_iter().map(|(_, dst, w)| (dst, w)).unzip();
        Csr {
            offsets,
            targets,
            weights,
        }
    }

    #[inline]
    fn row(&self, u: VertexId) -> (&[VertexId], &[f64]) {
        let range = self.offsets[u.index()]..self.offsets[u.index() + 1];
        (&self.targets[range.clone()], &self.weights[range])
    }
}

/// Adjacency list of one vertex under one edge type.
#[derive(Clone, Copy, Debug)]
pub struct Neighbors<'a> {
    targets: &'a [VertexId],
    weights: &'a [f64],
}

impl<'a> Neighbors<'a> {
    pub fn targets(&self) -> &'a [VertexId] {
        self.targets
    }

    pub fn weights(&self) -> &'a [f64] {
        self.weights
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, f64)> + 'a {
        self.targets.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Heterogeneous information network. Immutable once built.
#[derive(Clone, Debug)]
pub struct Hin {
    schema: Schema,
    names: Vec<String>,
    name_index: HashMap<String, VertexId>,
    types: Vec<VertexTypeId>,
    by_type: Vec<Vec<VertexId>>,
    adjacency: Vec<Csr>,
    edges: Vec<InputEdge>,
}

impl Hin {
    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    /// Number of edges as supplied, before undirected edges are expanded.
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Number of stored adjacency entries over all edge types.
    pub fn num_adjacency_entries(&self) -> usize {
        self.adjacency.iter().map(|csr| csr.targets.len()).sum()
    }

    pub fn vertex(&self, name: &str) -> Result<VertexId> {
        self.name_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_owned()))
    }

    pub fn vertex_name(&self, u: VertexId) -> &str {
        &self.names[u.index()]
    }

    pub fn vertex_type(&self, u: VertexId) -> VertexTypeId {
        self.types[u.index()]
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VertexId> {
        (0..self.names.len() as u32).map(VertexId)
    }

    pub fn vertices_of_type(&self, t: VertexTypeId) -> &[VertexId] {
        &self.by_type[t.index()]
    }

    pub fn input_edges(&self) -> &[InputEdge] {
        &self.edges
    }

    /// Adjacency of `u` under edge type `r`, in insertion order.
    pub fn neighbors(&self, u: VertexId, r: EdgeTypeId) -> Result<Neighbors<'_>> {
        if u.index() >= self.names.len() {
            return Err(Error::UnknownVertex(format!("#{}", u.0)));
        }
        if r.index() >= self.adjacency.len() {
            return Err(Error::UnknownEdgeType(format!("#{}", r.0)));
        }
        Ok(self.adj(u, r))
    }

    #[inline]
    pub(crate) fn adj(&self, u: VertexId, r: EdgeTypeId) -> Neighbors<'_> {
        let (targets, weights) = self.adjacency[r.index()].row(u);
        Neighbors { targets, weights }
    }
}

/// Incremental construction of a [`Hin`].
#[derive(Clone, Debug)]
pub struct HinBuilder {
    schema: Schema,
    names: Vec<String>,
    name_index: HashMap<String, VertexId>,
    types: Vec<VertexTypeId>,
    edges: Vec<InputEdge>,
}

impl HinBuilder {
    pub fn new(schema: Schema) -> Self {
        HinBuilder {
            schema,
            names: Vec::new(),
            name_index: HashMap::new(),
            types: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn add_vertex(&mut self, name: &str, vertex_type: &str) -> Result<VertexId> {
        let t = self.schema.vertex_type_id(vertex_type)?;
        if self.name_index.contains_key(name) {
            return Err(Error::Duplicate(name.to_owned()));
        }
        let id = VertexId(u32::try_from(self.names.len()).map_err(|_| Error::Config("too many vertices".into()))?);
        self.names.push(name.to_owned());
        self.name_index.insert(name.to_owned(), id);
        self.types.push(t);
        Ok(id)
    }

    /// Adds an edge of type `edge_type` between two declared vertices.
    ///
    /// For undirected edge types either orientation is accepted.
    pub fn add_edge(&mut self, src: &str, dst: &str, edge_type: &str, weight: f64) -> Result<()> {
        let r = self.schema.edge_type_id(edge_type)?;
        let u = self.lookup(src)?;
        let v = self.lookup(dst)?;
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(Error::InvalidWeights(format!("edge weight {weight} must be finite and non-negative")));
        }
        let et = self.schema.edge_type(r);
        let (tu, tv) = (self.types[u.index()], self.types[v.index()]);
        let (u, v) = if tu == et.src && tv == et.dst {
            (u, v)
        } else if !et.directed && tu == et.dst && tv == et.src {
            (v, u)
        } else {
            return Err(Error::TypeMismatch {
                edge_type: et.name.clone(),
                detail: format!(
                    "expects {} {} {}, got `{src}` ({}) -> `{dst}` ({})",
                    self.schema.vertex_type(et.src).name,
                    if et.directed { "->" } else { "--" },
                    self.schema.vertex_type(et.dst).name,
                    self.schema.vertex_type(tu).name,
                    self.schema.vertex_type(tv).name
                ),
            });
        };
        self.edges.push(InputEdge {
            src: u,
            dst: v,
            edge_type: r,
            weight,
        });
        Ok(())
    }

    fn lookup(&self, name: &str) -> Result<VertexId> {
        self.name_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_owned()))
    }

    pub fn build(self) -> Hin {
        let n = self.names.len();
        let mut per_type: Vec<Vec<(VertexId, VertexId, f64)>> = vec![Vec::new(); self.schema.edge_types.len()];
        for e in &self.edges {
            let list = &mut per_type[e.edge_type.index()];
            list.push((e.src, e.dst, e.weight));
            if !self.schema.edge_type(e.edge_type).directed {
                list.push((e.dst, e.src, e.weight));
            }
        }
        let adjacency = per_type.into_iter().map(|entries| Csr::build(n, entries)).collect();

        let mut by_type = vec![Vec::new(); self.schema.vertex_types.len()];
        for (i, t) in self.types.iter().enumerate() {
            by_type[t.index()].push(VertexId(i as u32));
        }

        Hin {
            schema: self.schema,
            names: self.names,
            name_index: self.name_index,
            types: self.types,
            by_type,
            adjacency,
            edges: self.edges,
        }
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn apv_schema() -> Schema {
        let mut s = Schema::new();
        s.add_vertex_type("A").unwrap();
        s.add_vertex_type("P").unwrap();
        s.add_vertex_type("V").unwrap();
        s.add_edge_type("A-P", "A", "P", false).unwrap();
        s.add_edge_type("P-V", "P", "V", false).unwrap();
        s
    }

    /// a1–p1, a2–p1, a2–p2, p1–v1, p2–v1
    pub(crate) fn toy() -> Hin {
        let mut b = HinBuilder::new(apv_schema());
        for (name, t) in [("a1", "A"), ("a2", "A"), ("p1", "P"), ("p2", "P"), ("v1", "V")] {
            b.add_vertex(name, t).unwrap();
        }
        b.add_edge("a1", "p1", "A-P", 1.0).unwrap();
        b.add_edge("a2", "p1", "A-P", 1.0).unwrap();
        b.add_edge("a2", "p2", "A-P", 1.0).unwrap();
        b.add_edge("p1", "v1", "P-V", 1.0).unwrap();
        b.add_edge("p2", "v1", "P-V", 1.0).unwrap();
        b.build()
    }

    fn names(hin: &Hin, n: Neighbors<'_>) -> Vec<String> {
        n.targets().iter().map(|&v| hin.vertex_name(v).to_owned()).collect()
    }

    #[test]
    fn toy_graph_shape() {
        let hin = toy();
        assert_eq!(hin.num_vertices(), 5);
        assert_eq!(hin.num_edges(), 5);
        assert_eq!(hin.num_adjacency_entries(), 10);
    }

    #[test]
    fn toy_neighbors() {
        let hin = toy();
        let ap = hin.schema().edge_type_id("A-P").unwrap();
        let pv = hin.schema().edge_type_id("P-V").unwrap();
        let p1 = hin.vertex("p1").unwrap();
        let v1 = hin.vertex("v1").unwrap();
        assert_eq!(names(&hin, hin.neighbors(p1, ap).unwrap()), ["a1", "a2"]);
        assert_eq!(names(&hin, hin.neighbors(v1, pv).unwrap()), ["p1", "p2"]);
        // stable across calls
        assert_eq!(
            hin.neighbors(p1, ap).unwrap().targets(),
            hin.neighbors(p1, ap).unwrap().targets()
        );
    }

    #[test]
    fn isolated_vertex_has_no_neighbors() {
        let mut b = HinBuilder::new(apv_schema());
        b.add_vertex("a1", "A").unwrap();
        b.add_vertex("p1", "P").unwrap();
        let hin = b.build();
        let ap = hin.schema().edge_type_id("A-P").unwrap();
        assert!(hin.neighbors(hin.vertex("a1").unwrap(), ap).unwrap().is_empty());
        assert!(matches!(hin.neighbors(VertexId(9), ap), Err(Error::UnknownVertex(_))));
    }

    #[test]
    fn reversed_undirected_edge_is_normalized() {
        let mut b = HinBuilder::new(apv_schema());
        b.add_vertex("a1", "A").unwrap();
        b.add_vertex("p1", "P").unwrap();
        b.add_edge("p1", "a1", "A-P", 2.0).unwrap();
        let hin = b.build();
        let e = hin.input_edges()[0];
        assert_eq!(hin.vertex_name(e.src), "a1");
        assert_eq!(e.weight, 2.0);
    }

    #[test]
    fn directed_edges_store_one_direction() {
        let mut s = Schema::new();
        s.add_vertex_type("U").unwrap();
        s.add_edge_type("follows", "U", "U", true).unwrap();
        let mut b = HinBuilder::new(s);
        b.add_vertex("x", "U").unwrap();
        b.add_vertex("y", "U").unwrap();
        b.add_edge("x", "y", "follows", 1.0).unwrap();
        let hin = b.build();
        let r = EdgeTypeId(0);
        assert_eq!(hin.neighbors(hin.vertex("x").unwrap(), r).unwrap().len(), 1);
        assert!(hin.neighbors(hin.vertex("y").unwrap(), r).unwrap().is_empty());
    }

    #[test]
    fn type_mismatch_is_rejected() {
        let mut b = HinBuilder::new(apv_schema());
        b.add_vertex("a1", "A").unwrap();
        b.add_vertex("v1", "V").unwrap();
        let err = b.add_edge("a1", "v1", "A-P", 1.0).unwrap_err();
        assert!(matches!(err, Error::TypeMismatch { .. }), "{err}");
    }

    #[test]
    fn parallel_edges_are_kept() {
        let mut b = HinBuilder::new(apv_schema());
        b.add_vertex("a1", "A").unwrap();
        b.add_vertex("p1", "P").unwrap();
        b.add_edge("a1", "p1", "A-P", 1.0).unwrap();
        b.add_edge("a1", "p1", "A-P", 1.0).unwrap();
        let hin = b.build();
        let ap = hin.schema().edge_type_id("A-P").unwrap();
        assert_eq!(hin.neighbors(hin.vertex("a1").unwrap(), ap).unwrap().len(), 2);
    }
}
