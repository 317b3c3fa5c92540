//! Experiment orchestration: synthesize labeled IQ datasets, render them into
//! the four image representations, train one classifier per representation,
//! and compare the results. Every stage is a pure function of the experiment
//! config, so a fixed config reproduces every artifact byte for byte.

mod compare;
mod config;
mod dataset;
mod eval;
mod manifest;
mod render;
mod train;

pub use compare::{compare_representations, ComparisonReport, RepReport};
pub use config::{parse_snr, ExperimentConfig, TrainConfig, DEFAULT_SEED};
pub use dataset::{generate_dataset, read_iq, split_dataset, write_iq};
pub use eval::{evaluate, ConfusionMatrix};
pub use manifest::{
    load_dataset_manifest, load_image_manifest, DatasetManifest, ImageEntry, ImageManifest,
    ManifestEntry, Split, MANIFEST_VERSION,
};
pub use render::{load_input, render_dataset, render_segment};
pub use train::{train, EpochStats};

/// Tags that derive independent random streams from the experiment seed.
/// Every consumer of randomness hangs off a distinct tag so no two stages
/// ever share a stream.
pub(crate) mod streams {
    pub const TRAINVAL: u64 = 0;
    pub const TEST: u64 = 1;
    pub const NOISE: u64 = 2;
    pub const SPLIT: u64 = 3;
    pub const MODEL: u64 = 4;
    pub const EPOCH: u64 = 5;
    pub const REP_TRAIN: u64 = 6;
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Dsp(#[from] hybridsig_dsp::DspError),
    #[error(transparent)]
    Modem(#[from] hybridsig_modem::ModemError),
    #[error(transparent)]
    Raster(#[from] hybridsig_raster::RasterError),
    #[error(transparent)]
    Nn(#[from] hybridsig_nn::NnError),
}

impl PipelineError {
    fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        PipelineError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, PipelineError>;
