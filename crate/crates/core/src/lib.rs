//! Hybrid quantum-fuzzy neural networks.
//!
//! Fuzzy membership functions are realized as data re-uploading quantum
//! circuits (exactly simulated), combined by a product rule layer and fused
//! additively with a classical CNN/DNN branch. Gaussian-membership (FDNN),
//! CNN-only and DNN-only baselines share the same plumbing. A density-matrix
//! noise lab measures how membership circuits degrade under amplitude
//! damping and depolarizing channels.
//!
//! All numeric code is generic over [`Real`]; the aliases below fix it to
//! `f64`, which is what the CLI and the checkpoint format use.

pub mod data;
pub mod error;
pub mod fuzzy;
pub mod metrics;
pub mod model;
pub mod nn;
pub mod noiselab;
pub mod qcore;
pub mod qnn;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type PureState = qcore::PureState<f64>;
pub type MixedState = qcore::MixedState<f64>;
pub type KrausChannel = qcore::KrausChannel<f64>;
pub type MembershipCircuit = qnn::MembershipCircuit<f64>;
pub type QuantumFuzzyLayer = fuzzy::QuantumFuzzyLayer<f64>;
pub type GaussianFuzzyLayer = fuzzy::GaussianFuzzyLayer<f64>;
pub type RealTensor = nn::RealTensor<f64>;
pub type Dataset = data::Dataset<f64>;
pub type Model = model::Model<f64>;
pub type Checkpoint = model::Checkpoint<f64>;

pub type PureStateF32 = qcore::PureState<f32>;
pub type MembershipCircuitF32 = qnn::MembershipCircuit<f32>;
pub type ModelF32 = model::Model<f32>;
