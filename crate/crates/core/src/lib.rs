//! Sharp-threshold toolkit: boolean functions on product spaces, their
//! spectral and decision-tree analysis, Bernoulli percolation, the
//! random-cluster model and Erdős–Rényi threshold experiments.

pub mod boolfn;
pub mod config;
pub mod curve;
pub mod cylinder;
pub mod decisiontree;
pub mod error;
pub mod families;
pub mod graphprops;
pub mod lattice;
pub mod percolation;
pub mod randomcluster;
pub mod rng;
pub mod spectral;
pub mod stats;
pub mod suites;
pub mod threshold;

pub use boolfn::{BooleanFunctionTable, ConfigMeasure, InfluenceVector, ProductMeasure};
pub use config::Configuration;
pub use curve::SweepCurve;
pub use decisiontree::{DecisionTree, RevealmentVector, RunTranscript};
pub use error::{Error, Result};
pub use lattice::{BoxRegion, DualMap, Graph, RectangleRegion};
pub use spectral::{RealTable, SpectralCoefficients};
pub use stats::Estimate;
pub use threshold::{CurveFamily, ThresholdWindow};
pub use percolation::UnionFind;
pub use randomcluster::{ExactMeasure, RandomClusterParams};
pub use suites::{run_suite, SuiteReport, SUITES};
