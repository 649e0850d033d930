//! Text persistence of trained parameters.
//!
//! Embeddings: a header line `N d`, then one line per vertex,
//! `vertex_id f_1 ... f_d`, space separated.
//!
//! Bias sidecar: a header line `K d`, then one tab-separated line per
//! sub-meta-path, `key<TAB>mu<TAB>p_1 ... p_d<TAB>q_1 ... q_d`, where `key` is
//! the canonical meta-path text.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::hin::{Hin, Schema};
use crate::model::{KeyId, ModelParameters, ParamRef};
use crate::search::SimilarityIndex;

fn join(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(" ")
}

pub fn write_embeddings<W: Write>(hin: &Hin, params: &ModelParameters, mut out: W) -> io::Result<()> {
    writeln!(out, "{} {}", hin.num_vertices(), params.dim())?;
    for u in hin.vertices() {
        writeln!(out, "{} {}", hin.vertex_name(u), join(&params.embedding(u)))?;
    }
    Ok(())
}

pub fn write_path_params<W: Write>(schema: &Schema, params: &ModelParameters, mut out: W) -> io::Result<()> {
    writeln!(out, "{} {}", params.keys().len(), params.dim())?;
    for (i, key) in params.keys().iter().enumerate() {
        let k = KeyId(i);
        writeln!(
            out,
            "{}\t{}\t{}\t{}",
            key.render(schema),
            params.values(ParamRef::Mu(k))[0],
            join(&params.values(ParamRef::P(k))),
            join(&params.values(ParamRef::Q(k)))
        )?;
    }
    Ok(())
}

/// Vertex vectors read back from an embedding file.
#[derive(Clone, Debug, PartialEq)]
pub struct Embeddings {
    pub dim: usize,
    pub rows: Vec<(String, Vec<f64>)>,
}

fn parse_floats(fields: &[&str], line: usize, what: &'static str) -> Result<Vec<f64>> {
    fields
        .iter()
        .map(|f| {
            f.parse::<f64>()
                .map_err(|_| Error::parse(what, line, format!("invalid number `{f}`")))
        })
        .collect()
}

fn parse_header(line: Option<&str>, what: &'static str) -> Result<(usize, usize)> {
    let header = line.ok_or_else(|| Error::parse(what, 1, "missing header"))?;
    let nums: Vec<usize> = header
        .split_whitespace()
        .map(|f| f.parse())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::parse(what, 1, "header must be two integers"))?;
    match nums.as_slice() {
        [n, d] => Ok((*n, *d)),
        _ => Err(Error::parse(what, 1, "header must be two integers")),
    }
}

pub fn read_embeddings(text: &str) -> Result<Embeddings> {
    const WHAT: &str = "embeddings";
    let mut lines = text.lines();
    let (n, dim) = parse_header(lines.next(), WHAT)?;
    let mut rows = Vec::with_capacity(n);
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != dim + 1 {
            return Err(Error::parse(WHAT, i + 2, format!("expected id and {dim} values")));
        }
        rows.push((fields[0].to_owned(), parse_floats(&fields[1..], i + 2, WHAT)?));
    }
    if rows.len() != n {
        return Err(Error::parse(WHAT, 1, format!("header promises {n} rows, found {}", rows.len())));
    }
    Ok(Embeddings { dim, rows })
}

impl Embeddings {
    /// Index over the rows, with type tags from `type_of` when available.
    pub fn into_index<F>(self, mut type_of: F) -> Result<SimilarityIndex>
    where
        F: FnMut(&str) -> Option<String>,
    {
        let dim = self.dim;
        SimilarityIndex::new(
            dim,
            self.rows.into_iter().map(|(id, v)| {
                let t = type_of(&id);
                (id, t, v)
            }),
        )
    }
}

/// One record of the bias sidecar.
#[derive(Clone, Debug, PartialEq)]
pub struct PathParamRecord {
    pub key: String,
    pub mu: f64,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

pub fn read_path_params(text: &str) -> Result<Vec<PathParamRecord>> {
    const WHAT: &str = "path parameters";
    let mut lines = text.lines();
    let (k, dim) = parse_header(lines.next(), WHAT)?;
    let mut out = Vec::with_capacity(k);
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = i + 2;
        let fields: Vec<&str> = line.split('\t').collect();
        let [key, mu, p, q] = fields.as_slice() else {
            return Err(Error::parse(WHAT, line_no, "expected key, mu, p and q columns"));
        };
        let mu = parse_floats(&[mu], line_no, WHAT)?[0];
        let p = parse_floats(&p.split_whitespace().collect::<Vec<_>>(), line_no, WHAT)?;
        let q = parse_floats(&q.split_whitespace().collect::<Vec<_>>(), line_no, WHAT)?;
        if p.len() != dim || q.len() != dim {
            return Err(Error::parse(WHAT, line_no, format!("expected {dim} values for p and q")));
        }
        out.push(PathParamRecord {
            key: key.to_string(),
            mu,
            p,
            q,
        });
    }
    if out.len() != k {
        return Err(Error::parse(WHAT, 1, format!("header promises {k} records, found {}", out.len())));
    }
    Ok(out)
}
