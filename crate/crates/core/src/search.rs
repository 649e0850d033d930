//! Cosine similarity and exact top-k search over unit-normalized embeddings.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use crate::error::{Error, Result};
use crate::hin::Hin;
use crate::model::ModelParameters;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroNorm("cosine of a zero vector".into()));
    }
    Ok((dot(a, b) / (na * nb)).clamp(-1.0, 1.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hit {
    pub id: String,
    pub similarity: f64,
}

/// Immutable index of unit vectors. Zero vectors are left out and listed in
/// [`SimilarityIndex::excluded`].
#[derive(Clone, Debug)]
pub struct SimilarityIndex {
    dim: usize,
    ids: Vec<String>,
    types: Vec<Option<String>>,
    vectors: Vec<f64>,
    index: HashMap<String, usize>,
    excluded: Vec<String>,
}

impl SimilarityIndex {
    /// Builds an index from `(id, type, raw vector)` entries.
    pub fn new<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, Option<String>, Vec<f64>)>,
    {
        let mut idx = SimilarityIndex {
            dim,
            ids: Vec::new(),
            types: Vec::new(),
            vectors: Vec::new(),
            index: HashMap::new(),
            excluded: Vec::new(),
        };
        for (id, ty, v) in entries {
            if v.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    actual: v.len(),
                });
            }
            if idx.index.contains_key(&id) || idx.excluded.contains(&id) {
                return Err(Error::Duplicate(id));
            }
            let n = norm(&v);
            if !n.is_finite() {
                return Err(Error::NonFinite(format!("embedding of `{id}`")));
            }
            if n == 0.0 {
                idx.excluded.push(id);
                continue;
            }
            idx.index.insert(id.clone(), idx.ids.len());
            idx.ids.push(id);
            idx.types.push(ty);
            idx.vectors.extend(v.iter().map(|x| x / n));
        }
        Ok(idx)
    }

    /// Index over every vertex of `hin`, tagged with its type name.
    pub fn from_model(hin: &Hin, params: &ModelParameters) -> Result<Self> {
        Self::new(
            params.dim(),
            hin.vertices().map(|u| {
                (
                    hin.vertex_name(u).to_owned(),
                    Some(hin.schema().vertex_type(hin.vertex_type(u)).name.clone()),
                    params.embedding(u),
                )
            }),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn excluded(&self) -> &[String] {
        &self.excluded
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn vertex_type(&self, i: usize) -> Option<&str> {
        self.types[i].as_deref()
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }

    fn require(&self, id: &str) -> Result<usize> {
        self.position(id).ok_or_else(|| {
            if self.excluded.iter().any(|e| e == id) {
                Error::UnknownVertex(format!("{id} (zero embedding, not indexed)"))
            } else {
                Error::UnknownVertex(id.to_owned())
            }
        })
    }

    /// Cosine similarity between two indexed vertices.
    pub fn similarity(&self, a: &str, b: &str) -> Result<f64> {
        let (i, j) = (self.require(a)?, self.require(b)?);
        Ok(self.similarity_at(i, j))
    }

    #[inline]
    pub fn similarity_at(&self, i: usize, j: usize) -> f64 {
        dot(self.vector(i), self.vector(j))
    }

    /// The `k` most similar vertices to `query`, excluding the query itself,
    /// optionally restricted to one vertex type. Ordered by descending
    /// similarity, ties by ascending id.
    pub fn top_k(&self, query: &str, k: usize, type_filter: Option<&str>) -> Result<Vec<Hit>> {
        if k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        let q = self.require(query)?;
        let mut heap: BinaryHeap<Candidate<'_>> = BinaryHeap::with_capacity(k + 1);
        for i in 0..self.ids.len() {
            if i == q || type_filter.is_some_and(|t| self.types[i].as_deref() != Some(t)) {
                continue;
            }
            let cand = Candidate {
                similarity: self.similarity_at(q, i),
                id: &self.ids[i],
            };
            if heap.len() < k {
                heap.push(cand);
            } else if cand < *heap.peek().expect("k >= 1") {
                heap.pop();
                heap.push(cand);
            }
        }
        Ok(heap
            .into_sorted_vec()
            .into_iter()
            .map(|c| Hit {
                id: c.id.to_owned(),
                similarity: c.similarity,
            })
            .collect())
    }
}

/// Ordered so that better results compare smaller: the max-heap top is the
/// current worst hit.
#[derive(Clone, Copy, Debug)]
struct Candidate<'a> {
    similarity: f64,
    id: &'a str,
}

impl Ord for Candidate<'_> {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .similarity
            .total_cmp(&self.similarity)
            .then_with(|| self.id.cmp(other.id))
    }
}

impl PartialOrd for Candidate<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Candidate<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate<'_> {}
