//! Readers and writers for the tab-separated graph formats.
//!
//! Schema file, one tab-separated declaration per line:
//!
//! ```text
//! vertex  A
//! vertex  P
//! edge    A-P  A  P  undirected
//! ```
//!
//! Vertex-type file: `vertex_id<TAB>type`. Edge file:
//! `src<TAB>dst<TAB>edge_type[<TAB>weight]`, weight defaulting to 1.
//! In all three, blank lines and lines starting with `#` are skipped.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::hin::{Hin, HinBuilder, Schema};

fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            None
        } else {
            Some((i + 1, line.split('\t').map(str::trim).collect()))
        }
    })
}

pub fn parse_schema(text: &str) -> Result<Schema> {
    const SRC: &str = "schema";
    let mut schema = Schema::new();
    let mut edges = Vec::new();
    for (line, fields) in records(text) {
        match fields.as_slice() {
            ["vertex", name] if !name.is_empty() => {
                schema
                    .add_vertex_type(name)
                    .map_err(|e| Error::parse(SRC, line, e.to_string()))?;
            }
            ["edge", name, src, dst, dir] if !name.is_empty() => {
                let directed = match *dir {
                    "directed" => true,
                    "undirected" => false,
                    other => {
                        return Err(Error::parse(
                            SRC,
                            line,
                            format!("expected `directed` or `undirected`, got `{other}`"),
                        ))
                    }
                };
                edges.push((line, *name, *src, *dst, directed));
            }
            _ => {
                return Err(Error::parse(
                    SRC,
                    line,
                    "expected `vertex<TAB>name` or `edge<TAB>name<TAB>src<TAB>dst<TAB>directed|undirected`",
                ))
            }
        }
    }
    // Edge declarations may precede the vertex types they mention.
    for (line, name, src, dst, directed) in edges {
        schema
            .add_edge_type(name, src, dst, directed)
            .map_err(|e| Error::parse(SRC, line, e.to_string()))?;
    }
    Ok(schema)
}

/// `(line, vertex_id, type)` triples of a vertex-type file, unchecked
/// against any schema.
pub fn parse_vertex_types(text: &str) -> Result<Vec<(usize, String, String)>> {
    records(text)
        .map(|(line, fields)| match fields.as_slice() {
            [id, t] if !id.is_empty() && !t.is_empty() => Ok((line, id.to_string(), t.to_string())),
            _ => Err(Error::parse("vertex types", line, "expected `vertex_id<TAB>type`")),
        })
        .collect()
}

/// Builds a graph from the schema, vertex-type and edge texts.
pub fn load_hin(schema_text: &str, vertex_types_text: &str, edges_text: &str) -> Result<Hin> {
    let schema = parse_schema(schema_text)?;
    let mut builder = HinBuilder::new(schema);

    for (line, id, t) in parse_vertex_types(vertex_types_text)? {
        builder
            .add_vertex(&id, &t)
            .map_err(|e| Error::parse("vertex types", line, e.to_string()))?;
    }

    for (line, fields) in records(edges_text) {
        let (src, dst, r, weight) = match fields.as_slice() {
            [src, dst, r] => (*src, *dst, *r, 1.0),
            [src, dst, r, w] => {
                let w: f64 = w
                    .parse()
                    .map_err(|_| Error::parse("edges", line, format!("invalid weight `{w}`")))?;
                (*src, *dst, *r, w)
            }
            _ => {
                return Err(Error::parse(
                    "edges",
                    line,
                    "expected `src<TAB>dst<TAB>edge_type[<TAB>weight]`",
                ))
            }
        };
        builder
            .add_edge(src, dst, r, weight)
            .map_err(|e| Error::parse("edges", line, e.to_string()))?;
    }

    Ok(builder.build())
}

pub fn write_schema<W: Write>(schema: &Schema, mut out: W) -> io::Result<()> {
    for t in schema.vertex_types() {
        writeln!(out, "vertex\t{}", t.name)?;
    }
    for e in schema.edge_types() {
        writeln!(
            out,
            "edge\t{}\t{}\t{}\t{}",
            e.name,
            schema.vertex_type(e.src).name,
            schema.vertex_type(e.dst).name,
            if e.directed { "directed" } else { "undirected" }
        )?;
    }
    Ok(())
}

pub fn write_vertex_types<W: Write>(hin: &Hin, mut out: W) -> io::Result<()> {
    for u in hin.vertices() {
        writeln!(
            out,
            "{}\t{}",
            hin.vertex_name(u),
            hin.schema().vertex_type(hin.vertex_type(u)).name
        )?;
    }
    Ok(())
}

/// Writes the edges as supplied; the weight column is omitted when it is 1.
pub fn write_edges<W: Write>(hin: &Hin, mut out: W) -> io::Result<()> {
    for e in hin.input_edges() {
        let r = &hin.schema().edge_type(e.edge_type).name;
        if e.weight == 1.0 {
            writeln!(out, "{}\t{}\t{}", hin.vertex_name(e.src), hin.vertex_name(e.dst), r)?;
        } else {
            writeln!(
                out,
                "{}\t{}\t{}\t{}",
                hin.vertex_name(e.src),
                hin.vertex_name(e.dst),
                r,
                e.weight
            )?;
        }
    }
    Ok(())
}
