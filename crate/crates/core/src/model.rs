//! Relevance score, path scores and the negative-sampling objective.
//!
//! For a sub-meta-path `M` with global bias `mu`, local bias vectors `p`, `q`
//! and vertex embeddings `x_u`, `x_v`:
//!
//! ```text
//! f(u, v, M) = mu + p·x_u + q·x_v + x_u·x_v
//!            = (mu - p·q) + (x_u + q)·(x_v + p)
//! ```
//!
//! A path instance `u_1, ..., u_{L+1}` is scored either sequentially,
//! `sum_i f(u_i, u_{i+1}, M_{i,i})`, or pairwise,
//! `sum_{i <= j} f(u_i, u_{j+1}, M_{i,j})`. The loss of a score `S` is
//! `-log sigma(S)` for an observed instance and `-log(1 - sigma(S))` for a
//! noise sequence.

use std::collections::HashMap;
use std::ops::Range;

use rand::Rng;

use crate::error::{Error, Result};
use crate::hin::VertexId;
use crate::hogwild::HogwildBuffer;
use crate::metapath::{MetaPath, PathInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Seq,
    Pair,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "seq" => Ok(Mode::Seq),
            "pair" => Ok(Mode::Pair),
            other => Err(Error::Config(format!("unknown mode `{other}`, expected `seq` or `pair`"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Seq => "seq",
            Mode::Pair => "pair",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Label {
    Positive,
    Negative,
}

/// Sub-meta-paths whose parameters `meta_path` needs under `mode`:
/// every `M_{i,i}` for seq, every `M_{i,j}` with `i <= j` for pair.
pub fn required_sub_paths(meta_path: &MetaPath, mode: Mode) -> Vec<MetaPath> {
    let len = meta_path.len();
    let mut keys = Vec::new();
    for s in 1..=len {
        let last = match mode {
            Mode::Seq => s,
            Mode::Pair => len,
        };
        for t in s..=last {
            keys.push(meta_path.sub_path(s, t).expect("in range"));
        }
    }
    keys
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct KeyId(pub usize);

/// Storage offsets of one sub-meta-path's `(mu, p, q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Record {
    mu: usize,
    p: usize,
    q: usize,
}

/// Addresses a parameter block inside [`ModelParameters`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamRef {
    Embedding(VertexId),
    Mu(KeyId),
    P(KeyId),
    Q(KeyId),
}

/// Vertex embeddings plus per-sub-meta-path biases in one shared arena.
///
/// Methods take `&self`; writes go through [`HogwildBuffer`] so several
/// training threads can update the same parameters without locks.
#[derive(Clone, Debug)]
pub struct ModelParameters {
    dim: usize,
    num_vertices: usize,
    symmetric: bool,
    keys: Vec<MetaPath>,
    key_index: HashMap<MetaPath, KeyId>,
    records: Vec<Record>,
    data: HogwildBuffer,
}

impl ModelParameters {
    /// All-zero parameters for `num_vertices` vertices and the given
    /// sub-meta-path keys. Duplicate keys share one record; with `symmetric`
    /// set, `p` and `q` of every record are the same storage.
    pub fn new<I>(num_vertices: usize, dim: usize, keys: I, symmetric: bool) -> Result<Self>
    where
        I: IntoIterator<Item = MetaPath>,
    {
        if dim == 0 {
            return Err(Error::Config("embedding dimension must be positive".into()));
        }
        let mut key_list = Vec::new();
        let mut key_index = HashMap::new();
        let mut records = Vec::new();
        let mut next = num_vertices * dim;
        for key in keys {
            if key_index.contains_key(&key) {
                continue;
            }
            let mu = next;
            let p = mu + 1;
            let q = if symmetric { p } else { p + dim };
            next = q + dim;
            key_index.insert(key.clone(), KeyId(key_list.len()));
            key_list.push(key);
            records.push(Record { mu, p, q });
        }
        Ok(ModelParameters {
            dim,
            num_vertices,
            symmetric,
            keys: key_list,
            key_index,
            records,
            data: HogwildBuffer::zeros(next),
        })
    }

    /// Sets every parameter uniformly in `[-1, 1]`.
    pub fn randomize<R: Rng + ?Sized>(&self, rng: &mut R) {
        for i in 0..self.data.len() {
            self.data.set(i, rng.random_range(-1.0..=1.0));
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn keys(&self) -> &[MetaPath] {
        &self.keys
    }

    pub fn key(&self, sub_path: &MetaPath) -> Option<KeyId> {
        self.key_index.get(sub_path).copied()
    }

    fn require_key(&self, sub_path: &MetaPath) -> Result<KeyId> {
        self.key(sub_path)
            .ok_or_else(|| Error::UnknownSubPath(format!("{:?}", sub_path.steps())))
    }

    fn require_vertex(&self, u: VertexId) -> Result<()> {
        if u.index() < self.num_vertices {
            Ok(())
        } else {
            Err(Error::UnknownVertex(u.to_string()))
        }
    }

    /// Flat index range of a parameter block.
    pub fn range(&self, param: ParamRef) -> Range<usize> {
        match param {
            ParamRef::Embedding(u) => u.index() * self.dim..(u.index() + 1) * self.dim,
            ParamRef::Mu(k) => {
                let mu = self.records[k.0].mu;
                mu..mu + 1
            }
            ParamRef::P(k) => {
                let p = self.records[k.0].p;
                p..p + self.dim
            }
            ParamRef::Q(k) => {
                let q = self.records[k.0].q;
                q..q + self.dim
            }
        }
    }

    /// Total number of scalar parameters.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn value(&self, index: usize) -> f64 {
        self.data.get(index)
    }

    pub fn set_value(&self, index: usize, value: f64) {
        self.data.set(index, value);
    }

    pub fn values(&self, param: ParamRef) -> Vec<f64> {
        let r = self.range(param);
        self.data.to_vec(r.start, r.len())
    }

    pub fn set_values(&self, param: ParamRef, values: &[f64]) {
        let r = self.range(param);
        assert_eq!(r.len(), values.len());
        for (i, &v) in r.zip(values) {
            self.data.set(i, v);
        }
    }

    pub fn embedding(&self, u: VertexId) -> Vec<f64> {
        self.values(ParamRef::Embedding(u))
    }

    /// `f(u, v, M)` for a registered sub-meta-path `M`.
    pub fn score(&self, u: VertexId, v: VertexId, sub_path: &MetaPath) -> Result<f64> {
        self.require_vertex(u)?;
        self.require_vertex(v)?;
        let k = self.require_key(sub_path)?;
        let rec = self.records[k.0];
        let d = self.dim;
        let (ou, ov) = (u.index() * d, v.index() * d);
        let mut f = self.data.get(rec.mu);
        for i in 0..d {
            let xu = self.data.get(ou + i);
            let xv = self.data.get(ov + i);
            f += self.data.get(rec.p + i) * xu + self.data.get(rec.q + i) * xv + xu * xv;
        }
        Ok(f)
    }

    /// Resolves the score terms of `meta_path` under `mode`.
    pub fn plan(&self, meta_path: &MetaPath, mode: Mode) -> Result<ScorePlan> {
        let len = meta_path.len();
        let mut terms = Vec::new();
        for s in 1..=len {
            let last = match mode {
                Mode::Seq => s,
                Mode::Pair => len,
            };
            for t in s..=last {
                let key = self.require_key(&meta_path.sub_path(s, t)?)?;
                terms.push(Term {
                    src: s - 1,
                    dst: t,
                    record: self.records[key.0],
                });
            }
        }
        Ok(ScorePlan {
            meta_path: meta_path.clone(),
            mode,
            terms,
        })
    }

    /// `theta <- theta - lr * grad` for every entry of `grads`.
    ///
    /// Rejects the whole update when any gradient entry is not finite.
    pub fn sgd_apply(&self, grads: &GradientSet, lr: f64) -> Result<()> {
        if !(lr.is_finite() && lr > 0.0) {
            return Err(Error::Config(format!("learning rate must be positive, got {lr}")));
        }
        if let Some(bad) = grads.values.iter().find(|g| !g.is_finite()) {
            return Err(Error::NonFinite(format!("gradient entry {bad}")));
        }
        for block in &grads.blocks {
            let vals = &grads.values[block.start..block.start + block.len];
            for (k, g) in vals.iter().enumerate() {
                self.data.add(block.offset + k, -lr * g);
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
struct Term {
    // index into the instance's vertex list of u_s and of v_t
    src: usize,
    dst: usize,
    record: Record,
}

/// Score terms of one meta-path under one mode, resolved to storage offsets.
#[derive(Clone, Debug)]
pub struct ScorePlan {
    meta_path: MetaPath,
    mode: Mode,
    terms: Vec<Term>,
}

impl ScorePlan {
    pub fn meta_path(&self) -> &MetaPath {
        &self.meta_path
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// `L` for seq, `L(L+1)/2` for pair.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn check(&self, params: &ModelParameters, inst: &PathInstance) -> Result<()> {
        if inst.vertices.len() != self.meta_path.len() + 1 {
            return Err(Error::InvalidInstance(format!(
                "{} vertices for a length-{} meta-path",
                inst.vertices.len(),
                self.meta_path.len()
            )));
        }
        inst.vertices.iter().try_for_each(|&u| params.require_vertex(u))
    }

    pub fn path_score(&self, params: &ModelParameters, inst: &PathInstance) -> Result<f64> {
        self.check(params, inst)?;
        let d = params.dim;
        let data = &params.data;
        let mut total = 0.0;
        for term in &self.terms {
            let ou = inst.vertices[term.src].index() * d;
            let ov = inst.vertices[term.dst].index() * d;
            let rec = term.record;
            let mut f = data.get(rec.mu);
            for i in 0..d {
                let xu = data.get(ou + i);
                let xv = data.get(ov + i);
                f += data.get(rec.p + i) * xu + data.get(rec.q + i) * xv + xu * xv;
            }
            total += f;
        }
        Ok(total)
    }

    /// Loss of `inst` under `label`, with exact gradients written to `grads`.
    pub fn loss_and_gradients(
        &self,
        params: &ModelParameters,
        inst: &PathInstance,
        label: Label,
        grads: &mut GradientSet,
    ) -> Result<f64> {
        self.check(params, inst)?;
        Ok(self.loss_and_gradients_unchecked(params, &inst.vertices, label, grads))
    }

    pub(crate) fn loss_and_gradients_unchecked(
        &self,
        params: &ModelParameters,
        vertices: &[VertexId],
        label: Label,
        grads: &mut GradientSet,
    ) -> f64 {
        let d = params.dim;
        let data = &params.data;
        grads.clear();

        // Snapshot every vector the terms touch; under concurrent training
        // this keeps forward and backward passes consistent.
        let cache = &mut grads.scratch;
        cache.clear();
        cache.resize(self.terms.len() * 4 * d, 0.0);
        let mut score = 0.0;
        for (t, term) in self.terms.iter().enumerate() {
            let block = &mut cache[t * 4 * d..(t + 1) * 4 * d];
            let (xu, rest) = block.split_at_mut(d);
            let (xv, rest) = rest.split_at_mut(d);
            let (p, q) = rest.split_at_mut(d);
            data.read_into(vertices[term.src].index() * d, xu);
            data.read_into(vertices[term.dst].index() * d, xv);
            data.read_into(term.record.p, p);
            data.read_into(term.record.q, q);
            let mut f = data.get(term.record.mu);
            for i in 0..d {
                f += p[i] * xu[i] + q[i] * xv[i] + xu[i] * xv[i];
            }
            score += f;
        }

        let (loss, g) = match label {
            Label::Positive => (softplus(-score), -sigmoid(-score)),
            Label::Negative => (softplus(score), sigmoid(score)),
        };

        let cache = std::mem::take(&mut grads.scratch);
        for (t, term) in self.terms.iter().enumerate() {
            let block = &cache[t * 4 * d..(t + 1) * 4 * d];
            let (xu, rest) = block.split_at(d);
            let (xv, rest) = rest.split_at(d);
            let (p, q) = rest.split_at(d);
            grads.add(term.record.mu, g, &[1.0], None);
            grads.add(term.record.p, g, xu, None);
            grads.add(term.record.q, g, xv, None);
            grads.add(vertices[term.src].index() * d, g, p, Some(xv));
            grads.add(vertices[term.dst].index() * d, g, q, Some(xu));
        }
        grads.scratch = cache;
        loss
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^x)` without overflow or cancellation.
#[inline]
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

#[derive(Clone, Copy, Debug)]
struct Block {
    offset: usize,
    start: usize,
    len: usize,
}

/// Sparse gradient over the parameter arena, keyed by storage offset.
/// Contributions to the same block are summed.
#[derive(Clone, Debug, Default)]
pub struct GradientSet {
    blocks: Vec<Block>,
    values: Vec<f64>,
    scratch: Vec<f64>,
}

impl GradientSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clear(&mut self) {
        self.blocks.clear();
        self.values.clear();
    }

    /// Adds `scale * (a + b)` to the block at `offset`.
    fn add(&mut self, offset: usize, scale: f64, a: &[f64], b: Option<&[f64]>) {
        let start = match self.blocks.iter().find(|blk| blk.offset == offset) {
            Some(blk) => blk.start,
            None => {
                let start = self.values.len();
                self.values.resize(start + a.len(), 0.0);
                self.blocks.push(Block {
                    offset,
                    start,
                    len: a.len(),
                });
                start
            }
        };
        let dst = &mut self.values[start..start + a.len()];
        match b {
            Some(b) => {
                for ((d, x), y) in dst.iter_mut().zip(a).zip(b) {
                    *d += scale * (x + y);
                }
            }
            None => {
                for (d, x) in dst.iter_mut().zip(a) {
                    *d += scale * x;
                }
            }
        }
    }

    /// Gradient entry at flat parameter index `index`; zero when untouched.
    pub fn get(&self, index: usize) -> f64 {
        self.blocks
            .iter()
            .find(|b| (b.offset..b.offset + b.len).contains(&index))
            .map_or(0.0, |b| self.values[b.start + index - b.offset])
    }

    /// `(flat index range, values)` of every touched block.
    pub fn blocks(&self) -> impl Iterator<Item = (Range<usize>, &[f64])> {
        self.blocks
            .iter()
            .map(|b| (b.offset..b.offset + b.len, &self.values[b.start..b.start + b.len]))
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Builds a gradient set from explicit `(flat index, value)` entries.
    pub fn from_entries<I: IntoIterator<Item = (usize, f64)>>(entries: I) -> Self {
        let mut g = GradientSet::new();
        for (i, v) in entries {
            g.add(i, v, &[1.0], None);
        }
        g
    }
}

/// `f(u, v, M)`.
pub fn score(params: &ModelParameters, u: VertexId, v: VertexId, sub_path: &MetaPath) -> Result<f64> {
    params.score(u, v, sub_path)
}

pub fn path_score_seq(params: &ModelParameters, inst: &PathInstance, meta_path: &MetaPath) -> Result<f64> {
    params.plan(meta_path, Mode::Seq)?.path_score(params, inst)
}

pub fn path_score_pair(params: &ModelParameters, inst: &PathInstance, meta_path: &MetaPath) -> Result<f64> {
    params.plan(meta_path, Mode::Pair)?.path_score(params, inst)
}

pub fn loss_and_gradients(
    params: &ModelParameters,
    inst: &PathInstance,
    meta_path: &MetaPath,
    label: Label,
    mode: Mode,
) -> Result<(f64, GradientSet)> {
    let plan = params.plan(meta_path, mode)?;
    let mut grads = GradientSet::new();
    let loss = plan.loss_and_gradients(params, inst, label, &mut grads)?;
    Ok((loss, grads))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hin::tests::toy;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(mode: Mode, symmetric: bool) -> (crate::hin::Hin, MetaPath, ModelParameters) {
        let hin = toy();
        let m = MetaPath::parse("A-P-A", hin.schema()).unwrap();
        let params = ModelParameters::new(hin.num_vertices(), 3, required_sub_paths(&m, mode), symmetric).unwrap();
        (hin, m, params)
    }

    #[test]
    fn required_key_counts() {
        let hin = toy();
        let m = MetaPath::parse("A-P-V-P-A", hin.schema()).unwrap();
        assert_eq!(required_sub_paths(&m, Mode::Seq).len(), 4);
        assert_eq!(required_sub_paths(&m, Mode::Pair).len(), 10);
    }

    #[test]
    fn zero_parameters_score_zero() {
        let (hin, m, params) = setup(Mode::Pair, false);
        let a1 = hin.vertex("a1").unwrap();
        let p1 = hin.vertex("p1").unwrap();
        assert_eq!(params.score(a1, p1, &m.sub_path(1, 1).unwrap()).unwrap(), 0.0);
        let inst = PathInstance::new(vec![a1, p1, a1]);
        assert_eq!(path_score_seq(&params, &inst, &m).unwrap(), 0.0);
        assert_eq!(path_score_pair(&params, &inst, &m).unwrap(), 0.0);
    }

    #[test]
    fn unit_bias_and_aligned_embeddings() {
        let (hin, m, params) = setup(Mode::Seq, false);
        let key = m.sub_path(1, 1).unwrap();
        let k = params.key(&key).unwrap();
        let a1 = hin.vertex("a1").unwrap();
        let p1 = hin.vertex("p1").unwrap();
        params.set_values(ParamRef::Mu(k), &[1.0]);
        params.set_values(ParamRef::Embedding(a1), &[1.0, 0.0, 0.0]);
        params.set_values(ParamRef::Embedding(p1), &[1.0, 0.0, 0.0]);
        assert_eq!(params.score(a1, p1, &key).unwrap(), 2.0);
    }

    #[test]
    fn unknown_inputs() {
        let (hin, m, params) = setup(Mode::Seq, false);
        let a1 = hin.vertex("a1").unwrap();
        assert!(params.score(a1, VertexId(77), &m.sub_path(1, 1).unwrap()).is_err());
        assert!(matches!(params.score(a1, a1, &m), Err(Error::UnknownSubPath(_))));
        // pair plan needs M_{1,2}, which seq mode never registered
        assert!(params.plan(&m, Mode::Pair).is_err());
        let short = PathInstance::new(vec![a1, a1]);
        assert!(path_score_seq(&params, &short, &m).is_err());
    }

    #[test]
    fn pair_terms_by_hand() {
        let (hin, m, params) = setup(Mode::Pair, false);
        params.randomize(&mut ChaCha8Rng::seed_from_u64(3));
        let id = |n| hin.vertex(n).unwrap();
        let inst = PathInstance::new(vec![id("a2"), id("p1"), id("a1")]);
        let f = |u, v, s, t| params.score(id(u), id(v), &m.sub_path(s, t).unwrap()).unwrap();
        let expected = f("a2", "p1", 1, 1) + f("a2", "a1", 1, 2) + f("p1", "a1", 2, 2);
        let got = path_score_pair(&params, &inst, &m).unwrap();
        assert!((got - expected).abs() < 1e-12);
        let seq = path_score_seq(&params, &inst, &m).unwrap();
        assert!((seq - (f("a2", "p1", 1, 1) + f("p1", "a1", 2, 2))).abs() < 1e-12);
    }

    #[test]
    fn zero_parameter_loss_and_bias_gradient() {
        let (hin, m, params) = setup(Mode::Pair, false);
        let id = |n| hin.vertex(n).unwrap();
        let inst = PathInstance::new(vec![id("a1"), id("p1"), id("a2")]);
        let (loss, grads) = loss_and_gradients(&params, &inst, &m, Label::Positive, Mode::Seq).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);
        let k = params.key(&m.sub_path(1, 1).unwrap()).unwrap();
        assert_eq!(grads.get(params.range(ParamRef::Mu(k)).start), -0.5);
        let (loss, grads) = loss_and_gradients(&params, &inst, &m, Label::Negative, Mode::Seq).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(grads.get(params.range(ParamRef::Mu(k)).start), 0.5);
    }

    #[test]
    fn symmetric_parameters() {
        let (hin, m, params) = setup(Mode::Pair, true);
        params.randomize(&mut ChaCha8Rng::seed_from_u64(9));
        let key = m.sub_path(1, 2).unwrap();
        let k = params.key(&key).unwrap();
        assert_eq!(params.range(ParamRef::P(k)), params.range(ParamRef::Q(k)));
        for u in hin.vertices() {
            for v in hin.vertices() {
                assert_eq!(params.score(u, v, &key).unwrap(), params.score(v, u, &key).unwrap());
            }
        }
    }

    #[test]
    fn stable_loss_at_extremes() {
        assert_eq!(softplus(-800.0), 0.0);
        assert_eq!(softplus(800.0), 800.0);
        assert!((softplus(-40.0) - (-40f64).exp()).abs() < 1e-30);
        assert_eq!(sigmoid(-800.0), 0.0);
        assert_eq!(sigmoid(800.0), 1.0);
        assert_eq!(sigmoid(0.0), 0.5);
    }

    #[test]
    fn sgd_apply_contract() {
        let (_, _, params) = setup(Mode::Seq, false);
        params.randomize(&mut ChaCha8Rng::seed_from_u64(4));
        let before: Vec<f64> = (0..params.len()).map(|i| params.value(i)).collect();
        params.sgd_apply(&GradientSet::new(), 0.3).unwrap();
        assert!((0..params.len()).all(|i| params.value(i).to_bits() == before[i].to_bits()));

        let mu = params.range(ParamRef::Mu(KeyId(0))).start;
        params.sgd_apply(&GradientSet::from_entries([(mu, 0.5)]), 1.0).unwrap();
        assert!((params.value(mu) - (before[mu] - 0.5)).abs() < 1e-15);

        assert!(params.sgd_apply(&GradientSet::from_entries([(0, f64::NAN)]), 1.0).is_err());
        assert!(params.sgd_apply(&GradientSet::from_entries([(0, f64::INFINITY), (1, 1.0)]), 1.0).is_err());
        assert_eq!(params.value(1), before[1] - 0.0, "rejected update must not be partially applied");
        assert!(params.sgd_apply(&GradientSet::new(), 0.0).is_err());
    }

    #[test]
    fn sequential_applies_equal_summed_apply_on_disjoint_support() {
        let (_, _, a) = setup(Mode::Seq, false);
        a.randomize(&mut ChaCha8Rng::seed_from_u64(8));
        let b = a.clone();
        let g1 = GradientSet::from_entries([(0, 0.25), (1, -1.5)]);
        let g2 = GradientSet::from_entries([(4, 2.0)]);
        a.sgd_apply(&g1, 0.1).unwrap();
        a.sgd_apply(&g2, 0.1).unwrap();
        b.sgd_apply(&GradientSet::from_entries([(0, 0.25), (1, -1.5), (4, 2.0)]), 0.1).unwrap();
        for i in 0..a.len() {
            assert_eq!(a.value(i).to_bits(), b.value(i).to_bits());
        }
    }

    #[test]
    fn gradients_touch_only_instance_parameters() {
        let (hin, m, params) = setup(Mode::Pair, false);
        params.randomize(&mut ChaCha8Rng::seed_from_u64(5));
        let id = |n| hin.vertex(n).unwrap();
        let inst = PathInstance::new(vec![id("a1"), id("p1"), id("a1")]);
        let (_, grads) = loss_and_gradients(&params, &inst, &m, Label::Positive, Mode::Seq).unwrap();
        let allowed: Vec<Range<usize>> = [
            params.range(ParamRef::Embedding(id("a1"))),
            params.range(ParamRef::Embedding(id("p1"))),
        ]
        .into_iter()
        .chain([1, 2].iter().flat_map(|&s| {
            let k = params.key(&m.sub_path(s, s).unwrap()).unwrap();
            [ParamRef::Mu(k), ParamRef::P(k), ParamRef::Q(k)].map(|r| params.range(r))
        }))
        .collect();
        for (range, _) in grads.blocks() {
            assert!(allowed.contains(&range), "{range:?}");
        }
    }
}
