//! Meta-paths, sub-meta-paths and path instances.
//!
//! A meta-path is written as a walk over vertex types, `A-P-V-P-A`. When two
//! vertex types are joined by more than one edge type, the step must name the
//! edge type in brackets: `A-[writes]-P-[cites]-P`. Brackets are always
//! accepted, so `A-[A-P]-P-A` is a valid spelling of `A-P-A`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::hin::{EdgeTypeId, Hin, Schema, VertexId, VertexTypeId};

/// One traversal of an edge type, oriented from `from` to `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub edge_type: EdgeTypeId,
    pub from: VertexTypeId,
    pub to: VertexTypeId,
}

/// A non-empty sequence of compatible steps.
///
/// Equality and hashing are by step sequence, so the same sub-meta-path
/// produced from two different meta-paths compares equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MetaPath {
    steps: Vec<Step>,
}

impl MetaPath {
    pub fn from_steps(steps: Vec<Step>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::MetaPath {
                spec: String::new(),
                reason: "empty meta-path".into(),
            });
        }
        for (i, w) in steps.windows(2).enumerate() {
            if w[0].to != w[1].from {
                return Err(Error::MetaPath {
                    spec: String::new(),
                    reason: format!("step {} ends where step {} does not start", i + 1, i + 2),
                });
            }
        }
        Ok(MetaPath { steps })
    }

    /// Parses a dash-separated vertex-type walk against `schema`.
    pub fn parse(spec: &str, schema: &Schema) -> Result<Self> {
        let fail = |reason: String| Error::MetaPath {
            spec: spec.to_owned(),
            reason,
        };
        let tokens = tokenize(spec).map_err(fail)?;
        if tokens.is_empty() {
            return Err(fail("empty meta-path".into()));
        }

        let mut steps = Vec::new();
        let mut iter = tokens.into_iter().peekable();
        let first = match iter.next() {
            Some(Token::Vertex(v)) => v,
            _ => return Err(fail("must start with a vertex type".into())),
        };
        let mut current = schema.vertex_type_id(first).map_err(|e| fail(e.to_string()))?;

        while let Some(tok) = iter.next() {
            let (explicit, next_name) = match tok {
                Token::Edge(e) => match iter.next() {
                    Some(Token::Vertex(v)) => (Some(e), v),
                    _ => return Err(fail(format!("edge type `{e}` must be followed by a vertex type"))),
                },
                Token::Vertex(v) => (None, v),
            };
            let next = schema.vertex_type_id(next_name).map_err(|e| fail(e.to_string()))?;
            let from_name = &schema.vertex_type(current).name;
            let edge_type = match explicit {
                Some(name) => {
                    let r = schema.edge_type_id(name).map_err(|e| fail(e.to_string()))?;
                    if !schema.edge_type(r).connects(current, next) {
                        return Err(fail(format!("edge type `{name}` does not connect {from_name} to {next_name}")));
                    }
                    r
                }
                None => match schema.edge_types_between(current, next).as_slice() {
                    [] => return Err(fail(format!("no edge type connects {from_name} to {next_name}"))),
                    [r] => *r,
                    many => {
                        let names: Vec<_> = many.iter().map(|&r| schema.edge_type(r).name.as_str()).collect();
                        return Err(fail(format!(
                            "ambiguous step {from_name}-{next_name}: candidates {}; name one as `{from_name}-[edge]-{next_name}`",
                            names.join(", ")
                        )));
                    }
                },
            };
            steps.push(Step {
                edge_type,
                from: current,
                to: next,
            });
            current = next;
        }

        if steps.is_empty() {
            return Err(fail("a meta-path needs at least two vertex types".into()));
        }
        Ok(MetaPath { steps })
    }

    /// Canonical text form: brackets appear only on ambiguous steps.
    pub fn render(&self, schema: &Schema) -> String {
        let mut out = schema.vertex_type(self.steps[0].from).name.clone();
        for step in &self.steps {
            out.push('-');
            if schema.edge_types_between(step.from, step.to).len() != 1 {
                let _ = write!(out, "[{}]-", schema.edge_type(step.edge_type).name);
            }
            out.push_str(&schema.vertex_type(step.to).name);
        }
        out
    }

    /// Number of edges, `L`.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn step(&self, i: usize) -> &Step {
        &self.steps[i]
    }

    /// Vertex type at 1-based position `1..=L+1`.
    pub fn vertex_type_at(&self, position: usize) -> VertexTypeId {
        if position == 1 {
            self.steps[0].from
        } else {
            self.steps[position - 2].to
        }
    }

    /// The slice of steps `start..=end`, 1-based and inclusive.
    pub fn sub_path(&self, start: usize, end: usize) -> Result<MetaPath> {
        if start == 0 || start > end || end > self.steps.len() {
            return Err(Error::SubPathRange {
                start,
                end,
                len: self.steps.len(),
            });
        }
        Ok(MetaPath {
            steps: self.steps[start - 1..end].to_vec(),
        })
    }
}

enum Token<'a> {
    Vertex(&'a str),
    Edge(&'a str),
}

fn tokenize(spec: &str) -> std::result::Result<Vec<Token<'_>>, String> {
    let spec = spec.trim();
    let mut tokens = Vec::new();
    let mut rest = spec;
    while !rest.is_empty() {
        if let Some(after) = rest.strip_prefix('[') {
            let close = after.find(']').ok_or("unterminated `[`")?;
            let name = after[..close].trim();
            if name.is_empty() {
                return Err("empty edge type name".into());
            }
            tokens.push(Token::Edge(name));
            rest = &after[close + 1..];
        } else {
            let end = rest.find('-').unwrap_or(rest.len());
            let name = rest[..end].trim();
            if name.is_empty() {
                return Err("empty vertex type name".into());
            }
            tokens.push(Token::Vertex(name));
            rest = &rest[end..];
        }
        if rest.is_empty() {
            break;
        }
        rest = rest.strip_prefix('-').ok_or("expected `-` between elements")?;
        if rest.is_empty() {
            return Err("trailing `-`".into());
        }
    }
    Ok(tokens)
}

/// A concrete walk `u_1, ..., u_{L+1}` following some meta-path.
///
/// Edge `i` of the instance is `(vertices[i - 1], vertices[i])`. Negative
/// samples share this shape without requiring the edges to exist.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PathInstance {
    pub vertices: Vec<VertexId>,
}

impl PathInstance {
    pub fn new(vertices: Vec<VertexId>) -> Self {
        PathInstance { vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(u_i, v_i, r_i)` triples under `meta_path`.
    pub fn edges<'a>(&'a self, meta_path: &'a MetaPath) -> impl Iterator<Item = (VertexId, VertexId, EdgeTypeId)> + 'a {
        self.vertices
            .windows(2)
            .zip(meta_path.steps())
            .map(|(w, s)| (w[0], w[1], s.edge_type))
    }

    /// Checks length and vertex types against `meta_path`, without edge existence.
    pub fn check_shape(&self, hin: &Hin, meta_path: &MetaPath) -> Result<()> {
        if self.vertices.len() != meta_path.len() + 1 {
            return Err(Error::InvalidInstance(format!(
                "{} vertices for a length-{} meta-path",
                self.vertices.len(),
                meta_path.len()
            )));
        }
        for (pos, &u) in self.vertices.iter().enumerate() {
            if u.index() >= hin.num_vertices() {
                return Err(Error::UnknownVertex(u.to_string()));
            }
            let expected = meta_path.vertex_type_at(pos + 1);
            if hin.vertex_type(u) != expected {
                return Err(Error::InvalidInstance(format!(
                    "vertex `{}` at position {} has type {}, expected {}",
                    hin.vertex_name(u),
                    pos + 1,
                    hin.schema().vertex_type(hin.vertex_type(u)).name,
                    hin.schema().vertex_type(expected).name
                )));
            }
        }
        Ok(())
    }

    /// Full validity: shape plus existence of every edge.
    pub fn validate(&self, hin: &Hin, meta_path: &MetaPath) -> Result<()> {
        self.check_shape(hin, meta_path)?;
        for (i, (u, v, r)) in self.edges(meta_path).enumerate() {
            if !hin.adj(u, r).targets().contains(&v) {
                return Err(Error::InvalidInstance(format!(
                    "edge {} `{}`-`{}` of type {} does not exist",
                    i + 1,
                    hin.vertex_name(u),
                    hin.vertex_name(v),
                    hin.schema().edge_type(r).name
                )));
            }
        }
        Ok(())
    }
}
