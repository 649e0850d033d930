//! Oracles and fixtures shared by the integration tests. Nothing here calls
//! into the code paths it is used to check.

#![allow(dead_code)]

use std::collections::HashMap;

use metapath_embed::eval::{self, SyntheticSpec};
use metapath_embed::hin::InputEdge;
use metapath_embed::{Hin, HinBuilder, MetaPath, Schema, Step, VertexId};
use rand::seq::IndexedRandom;
use rand::Rng;

/// a1–p1, a2–p1, a2–p2, p1–v1, p2–v1
pub fn toy() -> Hin {
    let mut b = HinBuilder::new(eval::apv_schema());
    for (name, t) in [("a1", "A"), ("a2", "A"), ("p1", "P"), ("p2", "P"), ("v1", "V")] {
        b.add_vertex(name, t).unwrap();
    }
    for (u, v, r) in [
        ("a1", "p1", "A-P"),
        ("a2", "p1", "A-P"),
        ("a2", "p2", "A-P"),
        ("p1", "v1", "P-V"),
        ("p2", "v1", "P-V"),
    ] {
        b.add_edge(u, v, r, 1.0).unwrap();
    }
    b.build()
}

/// Random typed graph: up to `max_vertices` vertices over up to 4 vertex
/// types, a random set of directed/undirected edge types, unit weights.
pub fn random_hin<R: Rng>(rng: &mut R, max_vertices: usize) -> Hin {
    let num_types = rng.random_range(1..=4);
    let mut schema = Schema::new();
    for t in 0..num_types {
        schema.add_vertex_type(&format!("T{t}")).unwrap();
    }
    let mut num_edge_types = 0;
    for a in 0..num_types {
        for b in 0..num_types {
            // each ordered pair gets 0..=2 edge types
            for _ in 0..rng.random_range(0..=2) {
                let directed = rng.random_bool(0.5);
                if !directed && b < a {
                    continue;
                }
                schema
                    .add_edge_type(&format!("r{num_edge_types}"), &format!("T{a}"), &format!("T{b}"), directed)
                    .unwrap();
                num_edge_types += 1;
            }
        }
    }
    if num_edge_types == 0 {
        schema.add_edge_type("r0", "T0", "T0", false).unwrap();
    }

    let mut builder = HinBuilder::new(schema.clone());
    let n = rng.random_range(2..=max_vertices);
    let mut of_type: Vec<Vec<String>> = vec![Vec::new(); num_types];
    for i in 0..n {
        let t = if i < num_types { i } else { rng.random_range(0..num_types) };
        let name = format!("v{i}");
        builder.add_vertex(&name, &format!("T{t}")).unwrap();
        of_type[t].push(name);
    }
    let density = rng.random_range(0.05..0.5);
    for et in schema.edge_types() {
        let (s, d) = (et.src.index(), et.dst.index());
        for u in &of_type[s] {
            for v in &of_type[d] {
                if u != v && rng.random_bool(density) {
                    builder.add_edge(u, v, &et.name, 1.0).unwrap();
                    // occasional parallel edge
                    if rng.random_bool(0.05) {
                        builder.add_edge(u, v, &et.name, 1.0).unwrap();
                    }
                }
            }
        }
    }
    builder.build()
}

/// Random meta-path of length `1..=max_len` over the schema, or `None` when
/// the walk gets stuck.
pub fn random_meta_path<R: Rng>(rng: &mut R, schema: &Schema, max_len: usize) -> Option<MetaPath> {
    let len = rng.random_range(1..=max_len);
    let mut options: Vec<Step> = Vec::new();
    for (i, et) in schema.edge_types().iter().enumerate() {
        let id = metapath_embed::EdgeTypeId(i as u16);
        options.push(Step {
            edge_type: id,
            from: et.src,
            to: et.dst,
        });
        if !et.directed && et.src != et.dst {
            options.push(Step {
                edge_type: id,
                from: et.dst,
                to: et.src,
            });
        }
    }
    let mut steps = vec![*options.choose(rng)?];
    while steps.len() < len {
        let here = steps.last().unwrap().to;
        let next: Vec<Step> = options.iter().copied().filter(|s| s.from == here).collect();
        steps.push(*next.choose(rng)?);
    }
    Some(MetaPath::from_steps(steps).unwrap())
}

/// Every way to traverse `step` out of `u`, read straight off the input edge
/// list. An undirected edge between same-typed vertices can be walked both
/// ways.
fn traversals(hin: &Hin, edges: &[InputEdge], step: &Step, u: VertexId) -> Vec<VertexId> {
    if hin.vertex_type(u) != step.from {
        return Vec::new();
    }
    let et = hin.schema().edge_type(step.edge_type);
    let mut out = Vec::new();
    for e in edges.iter().filter(|e| e.edge_type == step.edge_type) {
        if e.src == u && hin.vertex_type(e.dst) == step.to {
            out.push(e.dst);
        }
        if !et.directed && e.dst == u && hin.vertex_type(e.src) == step.to {
            out.push(e.src);
        }
    }
    out
}

fn count_walks(hin: &Hin, edges: &[InputEdge], steps: &[Step], u: VertexId) -> u64 {
    match steps.split_first() {
        None => 1,
        Some((first, rest)) => traversals(hin, edges, first, u)
            .into_iter()
            .map(|v| count_walks(hin, edges, rest, v))
            .sum(),
    }
}

/// `C(u, i)` by exhaustive enumeration: the number of walks following steps
/// `i..=L` out of `u`; at `i = L+1`, whether `u` can end a type-`r_L` edge.
pub fn enumerate_counts(hin: &Hin, meta_path: &MetaPath) -> Vec<Vec<u64>> {
    let edges = hin.input_edges();
    let len = meta_path.len();
    let steps = meta_path.steps();
    let mut table = vec![vec![0u64; hin.num_vertices()]; len + 1];
    for u in hin.vertices() {
        for v in traversals(hin, edges, &steps[len - 1], u) {
            table[len][v.index()] = 1;
        }
    }
    for i in 0..len {
        for u in hin.vertices() {
            table[i][u.index()] = count_walks(hin, edges, &steps[i..], u);
        }
    }
    table
}

/// All path instances of `meta_path`, as vertex sequences.
pub fn enumerate_instances(hin: &Hin, meta_path: &MetaPath) -> Vec<Vec<VertexId>> {
    fn go(hin: &Hin, edges: &[InputEdge], steps: &[Step], prefix: &mut Vec<VertexId>, out: &mut Vec<Vec<VertexId>>) {
        match steps.split_first() {
            None => out.push(prefix.clone()),
            Some((first, rest)) => {
                let u = *prefix.last().unwrap();
                for v in traversals(hin, edges, first, u) {
                    prefix.push(v);
                    go(hin, edges, rest, prefix, out);
                    prefix.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    for u in hin.vertices() {
        go(hin, hin.input_edges(), meta_path.steps(), &mut vec![u], &mut out);
    }
    out
}

pub fn total_variation<K: std::hash::Hash + Eq>(empirical: &HashMap<K, usize>, draws: usize, exact: &HashMap<K, f64>) -> f64 {
    let mut tv = 0.0;
    for (k, p) in exact {
        let q = *empirical.get(k).unwrap_or(&0) as f64 / draws as f64;
        tv += (p - q).abs();
    }
    for (k, c) in empirical {
        if !exact.contains_key(k) {
            tv += *c as f64 / draws as f64;
        }
    }
    tv / 2.0
}

/// The planted dataset of the end-to-end checks.
pub fn planted(noise: f64, seed: u64) -> SyntheticSpec {
    SyntheticSpec {
        communities: 2,
        authors_per_community: 50,
        venues_per_community: 5,
        papers_per_author: 4,
        noise,
        seed,
    }
}

/// Brute-force AUC straight from the definition: mean over `u` of the
/// fraction of (same-group `v`, other-group `w`) pairs with `sim(u,v) > sim(u,w)`.
pub fn auc_triple_loop<G: PartialEq>(groups: &[G], sim: &dyn Fn(usize, usize) -> f64) -> f64 {
    let n = groups.len();
    let mut sum = 0.0;
    let mut count = 0;
    for u in 0..n {
        let mut hits = 0usize;
        let mut pairs = 0usize;
        for v in 0..n {
            if v == u || groups[v] != groups[u] {
                continue;
            }
            for w in 0..n {
                if w == u || groups[w] == groups[u] {
                    continue;
                }
                pairs += 1;
                if sim(u, v) > sim(u, w) {
                    hits += 1;
                }
            }
        }
        if pairs > 0 {
            sum += hits as f64 / pairs as f64;
            count += 1;
        }
    }
    sum / count as f64
}
