//! Grouping-based AUC and a planted-community graph generator.

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hin::{Hin, HinBuilder, Schema};
use crate::search::SimilarityIndex;

/// Group labels for a subset of vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grouping {
    labels: Vec<(String, String)>,
}

impl Grouping {
    pub fn new(labels: Vec<(String, String)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (id, _) in &labels {
            if !seen.insert(id.as_str()) {
                return Err(Error::Duplicate(id.clone()));
            }
        }
        let groups: BTreeSet<&str> = labels.iter().map(|(_, g)| g.as_str()).collect();
        if groups.len() < 2 {
            return Err(Error::Grouping(format!("need at least 2 groups, got {}", groups.len())));
        }
        Ok(Grouping { labels })
    }

    /// Parses `vertex_id<TAB>group` lines; `#` lines and blanks are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut labels = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            match line.split('\t').map(str::trim).collect::<Vec<_>>().as_slice() {
                [id, group] if !id.is_empty() && !group.is_empty() => {
                    labels.push((id.to_string(), group.to_string()));
                }
                _ => return Err(Error::parse("labels", i + 1, "expected `vertex_id<TAB>group`")),
            }
        }
        Self::new(labels)
    }

    pub fn labels(&self) -> &[(String, String)] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// AUC of `sim` over `n` labeled items: the mean, over items `u` that have
/// both a same-group and a different-group peer, of the fraction of
/// (same-group `v`, different-group `v'`) pairs with `sim(u, v) > sim(u, v')`.
///
/// `u` is never its own peer; ties count as failures.
pub fn auc_from_similarity<G, F>(groups: &[G], mut sim: F) -> Result<f64>
where
    G: PartialEq,
    F: FnMut(usize, usize) -> f64,
{
    let n = groups.len();
    let mut total = 0.0;
    let mut counted = 0usize;
    let (mut same, mut diff) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for u in 0..n {
        same.clear();
        diff.clear();
        for v in (0..n).filter(|&v| v != u) {
            let s = sim(u, v);
            if groups[v] == groups[u] {
                same.push(s);
            } else {
                diff.push(s);
            }
        }
        if same.is_empty() || diff.is_empty() {
            continue;
        }
        diff.sort_by(f64::total_cmp);
        let wins: usize = same.iter().map(|&s| diff.partition_point(|&d| d < s)).sum();
        total += wins as f64 / (same.len() * diff.len()) as f64;
        counted += 1;
    }
    if counted == 0 {
        return Err(Error::Grouping("no labeled vertex has both a same-group and a different-group peer".into()));
    }
    Ok(total / counted as f64)
}

/// AUC of cosine similarity in `index` against `grouping`, computed over the
/// labeled vertices only.
pub fn auc(index: &SimilarityIndex, grouping: &Grouping) -> Result<f64> {
    let mut positions = Vec::with_capacity(grouping.len());
    let mut group_ids = Vec::with_capacity(grouping.len());
    let mut interned: HashMap<&str, usize> = HashMap::new();
    for (id, g) in grouping.labels() {
        let pos = index.position(id).ok_or_else(|| Error::UnknownVertex(id.clone()))?;
        positions.push(pos);
        let next = interned.len();
        group_ids.push(*interned.entry(g.as_str()).or_insert(next));
    }
    auc_from_similarity(&group_ids, |a, b| index.similarity_at(positions[a], positions[b]))
}

/// Parameters of the planted author/paper/venue graph.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub communities: usize,
    pub authors_per_community: usize,
    pub venues_per_community: usize,
    pub papers_per_author: usize,
    /// Probability that a paper goes to a venue drawn uniformly from all
    /// venues instead of one of its author's community.
    pub noise: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.communities == 0
            || self.authors_per_community == 0
            || self.venues_per_community == 0
            || self.papers_per_author == 0
        {
            return Err(Error::Config("synthetic counts must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return Err(Error::Config(format!("noise must be in [0, 1], got {}", self.noise)));
        }
        Ok(())
    }
}

/// Schema with vertex types `A`, `P`, `V` and undirected edge types `A-P`
/// and `P-V`.
pub fn apv_schema() -> Schema {
    let mut s = Schema::new();
    for t in ["A", "P", "V"] {
        s.add_vertex_type(t).expect("fresh schema");
    }
    s.add_edge_type("A-P", "A", "P", false).expect("declared types");
    s.add_edge_type("P-V", "P", "V", false).expect("declared types");
    s
}

/// Planted communities: every author writes `papers_per_author` single-author
/// papers, each published at a venue of the author's community, or with
/// probability `noise` at a venue drawn from all venues. Authors are labeled
/// by community.
pub fn generate_planted_hin(spec: &SyntheticSpec) -> Result<(Hin, Grouping)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut b = HinBuilder::new(apv_schema());
    let num_venues = spec.communities * spec.venues_per_community;
    let venue = |v: usize| format!("v{v}");
    for v in 0..num_venues {
        b.add_vertex(&venue(v), "V")?;
    }

    let mut labels = Vec::new();
    let mut paper = 0usize;
    for c in 0..spec.communities {
        for i in 0..spec.authors_per_community {
            let author = format!("a{}", c * spec.authors_per_community + i);
            b.add_vertex(&author, "A")?;
            labels.push((author.clone(), format!("c{c}")));
            for _ in 0..spec.papers_per_author {
                let p = format!("p{paper}");
                paper += 1;
                b.add_vertex(&p, "P")?;
                b.add_edge(&author, &p, "A-P", 1.0)?;
                let v = if rng.random::<f64>() < spec.noise {
                    rng.random_range(0..num_venues)
                } else {
                    c * spec.venues_per_community + rng.random_range(0..spec.venues_per_community)
                };
                b.add_edge(&p, &venue(v), "P-V", 1.0)?;
            }
        }
    }
    Ok((b.build(), Grouping::new(labels)?))
}
