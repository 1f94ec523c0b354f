//! Unsupervised human activity discovery from 3D skeleton streams.
//!
//! The pipeline: parse a skeleton stream, restrict it to the informative
//! joints, select kinetic-energy keyframes, extract displacement /
//! statistical / orientation features, normalize and reduce them with PCA,
//! cut the reduced keyframe stream into overlapping window samples, and
//! cluster the samples with HPGMK (hybrid PSO with Gaussian mutation and
//! k-means refinement) or the plain k-means / PSO baselines. The `eval`
//! module scores discovered clusters against ground-truth labels.

pub mod cluster;
pub mod error;
pub mod eval;
pub mod features;
pub mod fixture;
pub mod formats;
pub mod geom;
pub mod keyframes;
pub mod reduce;
pub mod skeleton;

pub use cluster::{ClusteringResult, HpgmkParams, Particle};
pub use error::{Error, Result};
pub use eval::{ConfusionMatrix, MetricsReport};
pub use features::{FeatureLayout, FrameFeatureVector, Normalizer, SequenceStats};
pub use keyframes::{EnergySeries, KeyframeSet};
pub use reduce::{PcaModel, WindowSample};
pub use skeleton::{JointModel, SkeletonFrame, SkeletonSequence};
