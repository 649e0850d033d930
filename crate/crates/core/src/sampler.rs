//! Path-instance counting and positive/negative path sampling.
//!
//! `C(u, i)` is the (edge-weighted) number of ways to finish a meta-path
//! from vertex `u` standing at position `i`. It is filled backwards from the
//! terminal column: `C(u, L+1)` is 1 when `u` can end an edge of the last
//! type, and `C(u, i) = sum over type-r_i edges (u, v) of w(u, v) * C(v, i+1)`.
//!
//! Positive instances are drawn one vertex at a time. The start vertex is
//! drawn proportionally to `C(u, 1)^gamma`; each following vertex `v` among
//! the type-`r_i` neighbours of the current one is drawn proportionally to
//! `w(u, v) * C(v, i+1)`. The weights telescope, so every instance starting at
//! `u_1` has probability `1 / C(u_1, 1)` given `u_1`.
//!
//! Negative sequences keep the positive's first vertex and draw every later
//! position independently, proportionally to `C(u, i)^gamma`.

use rand::Rng;

use crate::alias::{self, AliasTable};
use crate::error::{Error, Result};
use crate::hin::{Hin, VertexId};
use crate::metapath::{MetaPath, PathInstance};

/// `C(u, i | M)` for positions `1..=L+1`.
#[derive(Clone, Debug)]
pub struct CountTable {
    meta_path: MetaPath,
    // columns[i - 1][u] = C(u, i)
    columns: Vec<Vec<f64>>,
}

impl CountTable {
    pub fn meta_path(&self) -> &MetaPath {
        &self.meta_path
    }

    /// `C(u, position)`, with `position` in `1..=L+1`.
    pub fn count(&self, u: VertexId, position: usize) -> f64 {
        self.columns[position - 1][u.index()]
    }

    pub fn column(&self, position: usize) -> &[f64] {
        &self.columns[position - 1]
    }

    pub fn positions(&self) -> usize {
        self.columns.len()
    }

    /// Total weight of instances, `sum_u C(u, 1)`.
    pub fn total(&self) -> f64 {
        self.columns[0].iter().sum()
    }

    /// Non-zero entries as `(vertex, position, count)`, position-major.
    pub fn nonzero(&self) -> impl Iterator<Item = (VertexId, usize, f64)> + '_ {
        self.columns.iter().enumerate().flat_map(|(i, col)| {
            col.iter()
                .enumerate()
                .filter(|(_, &c)| c != 0.0)
                .map(move |(u, &c)| (VertexId(u as u32), i + 1, c))
        })
    }
}

/// Work done by [`precompute_counts_instrumented`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CountWork {
    /// Vertex and adjacency-entry visits in the terminal column pass.
    pub boundary_visits: usize,
    /// Vertex and adjacency-entry visits over positions `1..=L`.
    pub recursion_visits: usize,
}

pub fn precompute_counts(hin: &Hin, meta_path: &MetaPath) -> CountTable {
    precompute_counts_instrumented(hin, meta_path).0
}

pub fn precompute_counts_instrumented(hin: &Hin, meta_path: &MetaPath) -> (CountTable, CountWork) {
    let n = hin.num_vertices();
    let len = meta_path.len();
    let mut work = CountWork::default();
    let mut columns = vec![vec![0.0; n]; len + 1];

    let last = meta_path.step(len - 1);
    for &u in hin.vertices_of_type(last.from) {
        work.boundary_visits += 1;
        for &v in hin.adj(u, last.edge_type).targets() {
            work.boundary_visits += 1;
            columns[len][v.index()] = 1.0;
        }
    }

    for i in (0..len).rev() {
        let step = meta_path.step(i);
        let (head, tail) = columns.split_at_mut(i + 1);
        let (current, next) = (&mut head[i], &tail[0]);
        // Only vertices of the step's source type; for undirected relations
        // the adjacency also holds the reverse orientation.
        for &u in hin.vertices_of_type(step.from) {
            work.recursion_visits += 1;
            let nb = hin.adj(u, step.edge_type);
            work.recursion_visits += nb.len();
            current[u.index()] = nb.iter().map(|(v, w)| w * next[v.index()]).sum();
        }
    }

    (
        CountTable {
            meta_path: meta_path.clone(),
            columns,
        },
        work,
    )
}

/// Per-(position, vertex) alias tables over neighbours, in one flat arena.
#[derive(Clone, Debug)]
struct StepTables {
    // offsets[i][u]..offsets[i][u + 1] indexes the arena for position i + 1
    offsets: Vec<Vec<u32>>,
    prob: Vec<f64>,
    alias: Vec<u32>,
    targets: Vec<VertexId>,
}

impl StepTables {
    fn build(hin: &Hin, counts: &CountTable) -> Self {
        let meta_path = counts.meta_path();
        let n = hin.num_vertices();
        let mut offsets = Vec::with_capacity(meta_path.len());
        let (mut prob, mut alias, mut targets) = (Vec::new(), Vec::new(), Vec::new());
        let (mut weights, mut small, mut large) = (Vec::new(), Vec::new(), Vec::new());

        for (i, step) in meta_path.steps().iter().enumerate() {
            let here = counts.column(i + 1);
            let next = counts.column(i + 2);
            let mut off = vec![0u32; n + 1];
            let mut cursor = targets.len() as u32;
            let mut from_vertices = hin.vertices_of_type(step.from).iter().peekable();
            for u in 0..n {
                off[u] = cursor;
                let is_source = from_vertices.next_if(|v| v.index() == u).is_some();
                if !is_source || here[u] <= 0.0 {
                    continue;
                }
                weights.clear();
                for (v, w) in hin.adj(VertexId(u as u32), step.edge_type).iter() {
                    let weight = w * next[v.index()];
                    if weight > 0.0 {
                        weights.push(weight);
                        targets.push(v);
                    }
                }
                let start = prob.len();
                prob.resize(start + weights.len(), 0.0);
                alias.resize(start + weights.len(), 0);
                alias::build_into(&weights, &mut prob[start..], &mut alias[start..], &mut small, &mut large);
                cursor = targets.len() as u32;
            }
            off[n] = cursor;
            offsets.push(off);
        }

        StepTables {
            offsets,
            prob,
            alias,
            targets,
        }
    }

    /// `position` is 0-based here.
    #[inline]
    fn sample<R: Rng + ?Sized>(&self, position: usize, u: VertexId, rng: &mut R) -> Option<VertexId> {
        let off = &self.offsets[position];
        let (lo, hi) = (off[u.index()] as usize, off[u.index() + 1] as usize);
        if lo == hi {
            return None;
        }
        let j = alias::draw(&self.prob[lo..hi], &self.alias[lo..hi], rng);
        Some(self.targets[lo + j])
    }

    fn has_table(&self, position: usize, u: VertexId) -> bool {
        let off = &self.offsets[position];
        off[u.index()] != off[u.index() + 1]
    }

    fn entries(&self) -> usize {
        self.targets.len()
    }
}

/// Everything needed to draw positive and negative instances of one meta-path.
/// Immutable after construction.
#[derive(Clone, Debug)]
pub struct SamplerState {
    counts: CountTable,
    gamma: f64,
    start: AliasTable,
    steps: StepTables,
    // negatives[k] is the table for position k + 2
    negatives: Vec<AliasTable>,
}

impl SamplerState {
    pub fn build(hin: &Hin, counts: CountTable, gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::Config(format!("gamma must be finite and non-negative, got {gamma}")));
        }
        if counts.total() <= 0.0 {
            return Err(Error::NoInstances(counts.meta_path().render(hin.schema())));
        }
        let powered = |col: &[f64]| -> Result<AliasTable> {
            AliasTable::new(
                col.iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0.0)
                    .map(|(u, &c)| (u as u32, c.powf(gamma))),
            )
        };
        let start = powered(counts.column(1))?;
        let negatives = (2..=counts.positions())
            .map(|i| powered(counts.column(i)))
            .collect::<Result<Vec<_>>>()?;
        let steps = StepTables::build(hin, &counts);
        Ok(SamplerState {
            counts,
            gamma,
            start,
            steps,
            negatives,
        })
    }

    pub fn meta_path(&self) -> &MetaPath {
        self.counts.meta_path()
    }

    pub fn counts(&self) -> &CountTable {
        &self.counts
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn start_table(&self) -> &AliasTable {
        &self.start
    }

    /// Negative-sampling table for `position` in `2..=L+1`.
    pub fn negative_table(&self, position: usize) -> &AliasTable {
        &self.negatives[position - 2]
    }

    /// Whether a step table exists for `u` at 1-based `position` in `1..=L`.
    pub fn has_step_table(&self, position: usize, u: VertexId) -> bool {
        self.steps.has_table(position - 1, u)
    }

    /// Total number of alias entries across all step tables.
    pub fn step_entries(&self) -> usize {
        self.steps.entries()
    }

    pub fn sample_positive<R: Rng + ?Sized>(&self, rng: &mut R) -> PathInstance {
        let mut vertices = Vec::with_capacity(self.meta_path().len() + 1);
        self.sample_positive_into(rng, &mut vertices);
        PathInstance::new(vertices)
    }

    /// Writes `u_1..u_{L+1}` of a positive instance into `out`.
    pub fn sample_positive_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<VertexId>) {
        out.clear();
        let mut u = VertexId(self.start.sample(rng));
        out.push(u);
        for i in 0..self.meta_path().len() {
            // C(u, i) > 0 guarantees a successor with C(v, i+1) > 0.
            u = self
                .steps
                .sample(i, u, rng)
                .expect("positive count implies a step table");
            out.push(u);
        }
    }

    pub fn sample_negative<R: Rng + ?Sized>(&self, start: VertexId, rng: &mut R) -> Result<PathInstance> {
        let mut vertices = Vec::with_capacity(self.meta_path().len() + 1);
        self.sample_negative_into(start, rng, &mut vertices)?;
        Ok(PathInstance::new(vertices))
    }

    pub fn sample_negative_into<R: Rng + ?Sized>(
        &self,
        start: VertexId,
        rng: &mut R,
        out: &mut Vec<VertexId>,
    ) -> Result<()> {
        let col = self.counts.column(1);
        if start.index() >= col.len() || col[start.index()] <= 0.0 {
            return Err(Error::InvalidInstance(format!(
                "vertex {start} cannot start an instance of this meta-path"
            )));
        }
        out.clear();
        out.push(start);
        out.extend(self.negatives.iter().map(|t| VertexId(t.sample(rng))));
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hin::tests::toy;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn counts_by_name(hin: &Hin, t: &CountTable, position: usize) -> Vec<(String, f64)> {
        hin.vertices()
            .filter(|&u| t.count(u, position) != 0.0)
            .map(|u| (hin.vertex_name(u).to_owned(), t.count(u, position)))
            .collect()
    }

    #[test]
    fn toy_apa_counts() {
        let hin = toy();
        let m = MetaPath::parse("A-P-A", hin.schema()).unwrap();
        let t = precompute_counts(&hin, &m);
        let s = |v: &[(&str, f64)]| v.iter().map(|(a, b)| (a.to_string(), *b)).collect::<Vec<_>>();
        assert_eq!(counts_by_name(&hin, &t, 3), s(&[("a1", 1.0), ("a2", 1.0)]));
        assert_eq!(counts_by_name(&hin, &t, 2), s(&[("p1", 2.0), ("p2", 1.0)]));
        assert_eq!(counts_by_name(&hin, &t, 1), s(&[("a1", 2.0), ("a2", 3.0)]));
        assert_eq!(t.total(), 5.0);
    }

    #[test]
    fn toy_apvpa_total() {
        let hin = toy();
        let m = MetaPath::parse("A-P-V-P-A", hin.schema()).unwrap();
        let t = precompute_counts(&hin, &m);
        assert_eq!(t.total(), 9.0);
        for u in hin.vertices() {
            assert!([0.0, 1.0].contains(&t.count(u, 5)));
        }
    }

    #[test]
    fn weighted_edges_scale_counts() {
        let mut b = crate::hin::HinBuilder::new(crate::hin::tests::apv_schema());
        for (n, ty) in [("a1", "A"), ("a2", "A"), ("p1", "P")] {
            b.add_vertex(n, ty).unwrap();
        }
        b.add_edge("a1", "p1", "A-P", 2.0).unwrap();
        b.add_edge("a2", "p1", "A-P", 0.5).unwrap();
        let hin = b.build();
        let m = MetaPath::parse("A-P-A", hin.schema()).unwrap();
        let t = precompute_counts(&hin, &m);
        let a1 = hin.vertex("a1").unwrap();
        // a1 -> p1 (2.0) -> {a1 (2.0), a2 (0.5)}: 2.0 * 2.5
        assert_eq!(t.count(a1, 1), 5.0);
    }

    #[test]
    fn start_table_weights() {
        let hin = toy();
        let m = MetaPath::parse("A-P-A", hin.schema()).unwrap();
        let a1 = hin.vertex("a1").unwrap().0;
        let a2 = hin.vertex("a2").unwrap().0;
        for (gamma, expected) in [(1.0, [2.0, 3.0]), (0.0, [1.0, 1.0]), (0.75, [2f64.powf(0.75), 3f64.powf(0.75)])] {
            let s = SamplerState::build(&hin, precompute_counts(&hin, &m), gamma).unwrap();
            let total = expected[0] + expected[1];
            let dist = s.start_table().distribution();
            assert_eq!(dist.len(), 2);
            for (o, p) in dist {
                let want = if o == a1 { expected[0] } else if o == a2 { expected[1] } else { unreachable!() };
                assert!((p - want / total).abs() < 1e-12, "gamma {gamma}");
            }
        }
    }

    #[test]
    fn step_tables_exist_exactly_where_counts_are_positive() {
        let hin = toy();
        let m = MetaPath::parse("A-P-V-P-A", hin.schema()).unwrap();
        let t = precompute_counts(&hin, &m);
        let s = SamplerState::build(&hin, t.clone(), 0.75).unwrap();
        for pos in 1..=m.len() {
            for u in hin.vertices() {
                assert_eq!(s.has_step_table(pos, u), t.count(u, pos) > 0.0, "{u} at {pos}");
            }
        }
        assert_eq!(
            s.start_table().support().len(),
            hin.vertices().filter(|&u| t.count(u, 1) > 0.0).count()
        );
    }

    #[test]
    fn zero_instance_meta_path_is_rejected() {
        let mut b = crate::hin::HinBuilder::new(crate::hin::tests::apv_schema());
        b.add_vertex("a1", "A").unwrap();
        b.add_vertex("p1", "P").unwrap();
        b.add_edge("a1", "p1", "A-P", 1.0).unwrap();
        let hin = b.build();
        let m = MetaPath::parse("A-P-V", hin.schema()).unwrap();
        let t = precompute_counts(&hin, &m);
        assert!(matches!(SamplerState::build(&hin, t, 0.75), Err(Error::NoInstances(_))));
    }

    #[test]
    fn negative_starts_at_anchor() {
        let hin = toy();
        let m = MetaPath::parse("A-P-V-P-A", hin.schema()).unwrap();
        let s = SamplerState::build(&hin, precompute_counts(&hin, &m), 0.75).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a1 = hin.vertex("a1").unwrap();
        for _ in 0..100 {
            let neg = s.sample_negative(a1, &mut rng).unwrap();
            assert_eq!(neg.vertices[0], a1);
            neg.check_shape(&hin, &m).unwrap();
        }
        let p1 = hin.vertex("p1").unwrap();
        assert!(s.sample_negative(p1, &mut rng).is_err());
        assert!(s.sample_negative(VertexId(99), &mut rng).is_err());
    }

    #[test]
    fn positive_samples_are_valid() {
        let hin = toy();
        let m = MetaPath::parse("A-P-V-P-A", hin.schema()).unwrap();
        let s = SamplerState::build(&hin, precompute_counts(&hin, &m), 0.75).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..500 {
            let inst = s.sample_positive(&mut rng);
            inst.validate(&hin, &m).unwrap();
            for (i, &u) in inst.vertices.iter().enumerate() {
                assert!(s.counts().count(u, i + 1) > 0.0);
            }
        }
    }
}
