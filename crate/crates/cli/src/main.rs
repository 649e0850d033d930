//! `metapath-embed` command-line tool.

mod manifest;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use metapath_embed::embeddings::{read_embeddings, write_embeddings, write_path_params};
use metapath_embed::load::{load_hin, parse_vertex_types, write_edges, write_schema, write_vertex_types};
use metapath_embed::sampler::precompute_counts;
use metapath_embed::trainer::{train, WeightedMetaPath};
use metapath_embed::{eval, Grouping, Hin, MetaPath, Mode, SyntheticSpec, TrainConfig};

use crate::manifest::{InputDigest, RunManifest};

#[derive(Parser, Debug)]
#[command(name = "metapath-embed", version, about = "Meta-path guided embeddings for typed graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train embeddings from a typed graph.
    Train(TrainArgs),
    /// Rank the vertices most similar to a query vertex.
    Search(SearchArgs),
    /// Score embeddings against group labels (AUC).
    Eval(EvalArgs),
    /// Print the per-position path-instance counts of a meta-path.
    Counts(CountsArgs),
    /// Write a planted-community author/paper/venue dataset.
    Synth(SynthArgs),
}

#[derive(Args, Debug)]
struct GraphArgs {
    /// Schema file (`vertex<TAB>T` and `edge<TAB>name<TAB>src<TAB>dst<TAB>directed|undirected` lines).
    #[arg(long)]
    schema: PathBuf,
    /// Vertex-type file (`vertex_id<TAB>type`).
    #[arg(long)]
    vertex_types: PathBuf,
    /// Edge file (`src<TAB>dst<TAB>edge_type[<TAB>weight]`).
    #[arg(long)]
    edges: PathBuf,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Meta-path such as `A-P-V-P-A`, optionally weighted as `A-P-A:0.1`. Repeatable.
    #[arg(long = "meta-path", required = true, value_parser = parse_weighted)]
    meta_paths: Vec<(String, Option<f64>)>,
    #[arg(long)]
    mode: Mode,
    /// Output embedding file; sidecars are written next to it.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = TrainConfig::DEFAULT_DIM)]
    dim: usize,
    /// Negative sequences per positive sample.
    #[arg(long, default_value_t = TrainConfig::DEFAULT_NEGATIVES)]
    neg: usize,
    #[arg(long, default_value_t = TrainConfig::DEFAULT_GAMMA)]
    gamma: f64,
    /// Positive samples to draw in total.
    #[arg(long, default_value_t = TrainConfig::DEFAULT_SAMPLES)]
    samples: u64,
    /// Initial learning rate; decays linearly to 1e-4 of itself.
    #[arg(long, default_value_t = TrainConfig::DEFAULT_LR)]
    lr: f64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Random seed; drawn from system entropy when absent.
    #[arg(long)]
    seed: Option<u64>,
    /// Share one bias vector between both ends of each sub-path.
    #[arg(long)]
    symmetric: bool,
    /// Suppress per-chunk progress lines.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long)]
    embeddings: PathBuf,
    #[arg(long)]
    query: String,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    /// Only return vertices of this type.
    #[arg(long = "type")]
    vertex_type: Option<String>,
    /// Vertex-type file; defaults to `<embeddings>.types.tsv` when present.
    #[arg(long)]
    vertex_types: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    embeddings: PathBuf,
    /// Label file (`vertex_id<TAB>group`).
    #[arg(long)]
    labels: PathBuf,
}

#[derive(Args, Debug)]
struct CountsArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long = "meta-path")]
    meta_path: String,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, default_value_t = 2)]
    communities: usize,
    /// Authors per community.
    #[arg(long, default_value_t = 50)]
    authors: usize,
    /// Venues per community.
    #[arg(long, default_value_t = 5)]
    venues: usize,
    /// Papers per author.
    #[arg(long, default_value_t = 4)]
    papers: usize,
    /// Probability that a paper's venue is drawn from all venues.
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: PathBuf,
}

/// `SPEC[:WEIGHT]`; the suffix counts as a weight only if it parses as a number.
fn parse_weighted(text: &str) -> std::result::Result<(String, Option<f64>), String> {
    if let Some((spec, w)) = text.rsplit_once(':') {
        if let Ok(w) = w.trim().parse::<f64>() {
            if !(w.is_finite() && w > 0.0) {
                return Err(format!("meta-path weight must be positive, got {w}"));
            }
            return Ok((spec.trim().to_owned(), Some(w)));
        }
    }
    Ok((text.trim().to_owned(), None))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Search(a) => cmd_search(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Counts(a) => cmd_counts(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_graph(graph: &GraphArgs) -> Result<(Hin, Vec<InputDigest>)> {
    let texts = [
        ("schema", &graph.schema),
        ("vertex_types", &graph.vertex_types),
        ("edges", &graph.edges),
    ]
    .map(|(role, path)| read(path).map(|text| (role, path, text)));
    let [schema, types, edges] = texts;
    let (schema, types, edges) = (schema?, types?, edges?);
    let hin = load_hin(&schema.2, &types.2, &edges.2).context("loading graph")?;
    let digests = [schema, types, edges]
        .iter()
        .map(|(role, path, text)| InputDigest::of(role, path, text.as_bytes()))
        .collect();
    Ok((hin, digests))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<()> {
    let mut out = create(path)?;
    body(&mut out).and_then(|_| out.flush()).with_context(|| format!("writing {}", path.display()))
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (fs::canonicalize(a), fs::canonicalize(b)) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let started = Instant::now();
    let outputs = [
        a.out.clone(),
        with_suffix(&a.out, ".bias.tsv"),
        with_suffix(&a.out, ".types.tsv"),
        with_suffix(&a.out, ".manifest.json"),
    ];
    for input in [&a.graph.schema, &a.graph.vertex_types, &a.graph.edges] {
        if let Some(o) = outputs.iter().find(|o| same_file(o, input)) {
            bail!("output {} would overwrite an input file", o.display());
        }
    }

    let (hin, inputs) = load_graph(&a.graph)?;
    let load_time = started.elapsed();

    let explicit: f64 = a.meta_paths.iter().map(|(_, w)| w.unwrap_or(1.0)).sum();
    if (explicit - 1.0).abs() > 1e-9 {
        eprintln!("warning: meta-path weights sum to {explicit}; renormalizing to 1");
    }
    let mut meta_paths = Vec::with_capacity(a.meta_paths.len());
    for (spec, w) in &a.meta_paths {
        meta_paths.push(WeightedMetaPath {
            meta_path: MetaPath::parse(spec, hin.schema())?,
            weight: w.unwrap_or(1.0) / explicit,
        });
    }

    let (seed, seed_source) = match a.seed {
        Some(s) => (s, "flag"),
        None => (rand::random::<u64>(), "entropy"),
    };
    let mut cfg = TrainConfig::new(meta_paths, a.mode);
    cfg.dim = a.dim;
    cfg.negatives = a.neg;
    cfg.gamma = a.gamma;
    cfg.total_samples = a.samples;
    cfg.lr_init = a.lr;
    cfg.lr_floor = a.lr * 1e-4;
    cfg.threads = a.threads;
    cfg.seed = seed;
    cfg.symmetric = a.symmetric;
    cfg.progress = !a.quiet;

    let (params, report) = train(&hin, &cfg)?;

    let write_started = Instant::now();
    write_file(&outputs[0], |out| write_embeddings(&hin, &params, out))?;
    write_file(&outputs[1], |out| write_path_params(hin.schema(), &params, out))?;
    write_file(&outputs[2], |out| write_vertex_types(&hin, out))?;
    let write_time = write_started.elapsed();

    let manifest = RunManifest::for_training(&cfg, hin.schema(), seed_source, inputs, &outputs[..3])
        .timing("load_seconds", load_time)
        .timing("train_seconds", report.wall_time)
        .timing("write_seconds", write_time)
        .timing("total_seconds", started.elapsed());
    manifest.write(&outputs[3])?;

    let record = serde_json::json!({
        "samples": report.samples,
        "positive_updates": report.positive_updates,
        "negative_updates": report.negative_updates,
        "wall_time_seconds": report.wall_time.as_secs_f64(),
        "final_lr": report.final_lr,
        "per_worker_samples": report.per_worker_samples,
        "window_losses": report.window_losses,
    });
    println!("{record}");
    Ok(())
}

fn cmd_search(a: SearchArgs) -> Result<()> {
    let embeddings = read_embeddings(&read(&a.embeddings)?).context("parsing embeddings")?;
    let types_path = a.vertex_types.clone().or_else(|| {
        let sidecar = with_suffix(&a.embeddings, ".types.tsv");
        sidecar.exists().then_some(sidecar)
    });
    let types: std::collections::HashMap<String, String> = match &types_path {
        Some(p) => parse_vertex_types(&read(p)?)
            .with_context(|| format!("parsing {}", p.display()))?
            .into_iter()
            .map(|(_, id, t)| (id, t))
            .collect(),
        None if a.vertex_type.is_some() => {
            bail!("--type needs vertex types: pass --vertex-types or place <embeddings>.types.tsv alongside")
        }
        None => Default::default(),
    };
    let index = embeddings.into_index(|id| types.get(id).cloned())?;
    let k = usize::try_from(a.k).unwrap_or(usize::MAX);
    let hits = index.top_k(&a.query, k, a.vertex_type.as_deref())?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for (rank, hit) in hits.iter().enumerate() {
        writeln!(out, "{}\t{}\t{:.6}", rank + 1, hit.id, hit.similarity)?;
    }
    Ok(())
}

fn cmd_eval(a: EvalArgs) -> Result<()> {
    let embeddings = read_embeddings(&read(&a.embeddings)?).context("parsing embeddings")?;
    let grouping = Grouping::parse(&read(&a.labels)?).context("parsing labels")?;
    let index = embeddings.into_index(|_| None)?;
    let auc = eval::auc(&index, &grouping)?;
    println!("AUC={auc:.4}");
    Ok(())
}

fn cmd_counts(a: CountsArgs) -> Result<()> {
    let (hin, _) = load_graph(&a.graph)?;
    let m = MetaPath::parse(&a.meta_path, hin.schema())?;
    let table = precompute_counts(&hin, &m);
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for (u, position, count) in table.nonzero() {
        writeln!(out, "{}\t{}\t{}", hin.vertex_name(u), position, count)?;
    }
    Ok(())
}

fn cmd_synth(a: SynthArgs) -> Result<()> {
    let (seed, seed_source) = match a.seed {
        Some(s) => (s, "flag"),
        None => (rand::random::<u64>(), "entropy"),
    };
    let spec = SyntheticSpec {
        communities: a.communities,
        authors_per_community: a.authors,
        venues_per_community: a.venues,
        papers_per_author: a.papers,
        noise: a.noise,
        seed,
    };
    let (hin, grouping) = eval::generate_planted_hin(&spec)?;
    let dir = &a.out_dir;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let files = [
        dir.join("schema.tsv"),
        dir.join("vertex_types.tsv"),
        dir.join("edges.tsv"),
        dir.join("labels.tsv"),
    ];
    write_file(&files[0], |out| write_schema(hin.schema(), out))?;
    write_file(&files[1], |out| write_vertex_types(&hin, out))?;
    write_file(&files[2], |out| write_edges(&hin, out))?;
    write_file(&files[3], |out| {
        grouping
            .labels()
            .iter()
            .try_for_each(|(id, g)| writeln!(out, "{id}\t{g}"))
    })?;
    RunManifest::for_synth(&spec, seed_source, &files).write(&dir.join("manifest.json"))?;
    eprintln!(
        "wrote {} vertices, {} edges, {} labels to {}",
        hin.num_vertices(),
        hin.num_edges(),
        grouping.len(),
        dir.display()
    );
    Ok(())
}
