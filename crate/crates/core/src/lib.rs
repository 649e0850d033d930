//! Meta-path guided vertex embeddings for heterogeneous information networks.
//!
//! The pipeline:
//!
//! 1. load a typed graph ([`load::load_hin`]) and parse one or more
//!    meta-paths ([`MetaPath::parse`]);
//! 2. count path instances per vertex and position
//!    ([`sampler::precompute_counts`]) and build alias-table samplers
//!    ([`SamplerState`]);
//! 3. train embeddings with negative sampling ([`trainer::train`]);
//! 4. rank vertices by cosine similarity ([`SimilarityIndex::top_k`]) and
//!    score a ranking against known groups ([`eval::auc`]).
//!
//! ```
//! use metapath_embed::{eval, trainer, MetaPath, Mode, SimilarityIndex, TrainConfig};
//!
//! let spec = eval::SyntheticSpec {
//!     communities: 2,
//!     authors_per_community: 10,
//!     venues_per_community: 2,
//!     papers_per_author: 3,
//!     noise: 0.0,
//!     seed: 1,
//! };
//! let (hin, groups) = eval::generate_planted_hin(&spec)?;
//! let apvpa = MetaPath::parse("A-P-V-P-A", hin.schema())?;
//! let mut cfg = TrainConfig::single(apvpa, Mode::Pair);
//! cfg.dim = 8;
//! cfg.total_samples = 5_000;
//! let (params, report) = trainer::train(&hin, &cfg)?;
//! assert_eq!(report.samples, 5_000);
//!
//! let index = SimilarityIndex::from_model(&hin, &params)?;
//! let auc = eval::auc(&index, &groups)?;
//! assert!((0.0..=1.0).contains(&auc));
//! # Ok::<(), metapath_embed::Error>(())
//! ```

pub mod alias;
pub mod embeddings;
pub mod error;
pub mod eval;
pub mod hin;
pub mod hogwild;
pub mod load;
pub mod metapath;
pub mod model;
pub mod sampler;
pub mod search;
pub mod trainer;

pub use alias::AliasTable;
pub use error::{Error, Result};
pub use eval::{Grouping, SyntheticSpec};
pub use hin::{EdgeTypeId, Hin, HinBuilder, Schema, VertexId, VertexTypeId};
pub use metapath::{MetaPath, PathInstance, Step};
pub use model::{GradientSet, Label, Mode, ModelParameters, ParamRef};
pub use sampler::{CountTable, SamplerState};
pub use search::SimilarityIndex;
pub use trainer::{TrainConfig, TrainReport, WeightedMetaPath};

/// Version of this library, as recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/counting.md")]
    mod counting {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/training.md")]
    mod training {}
    #[doc = include_str!("../../../book/src/search.md")]
    mod search {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
