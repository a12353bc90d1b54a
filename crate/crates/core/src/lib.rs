//! Stopping policies for the last-success problem when the success
//! probabilities are unknown and only `m` independent sample sequences of
//! the trials are available.
//!
//! The numeric code is generic over [`Scalar`] (`f32` or `f64`); the type
//! aliases at the crate root fix it to `f64`, which is what the tests,
//! acceptance suite and CLI use.
//!
//! ```
//! use lastsuccess::{eval, instances, Policy};
//!
//! let inst = instances::iid_instance::<f64>(10, 0.2).unwrap();
//! let dist = eval::exact_threshold_distribution(&inst, &Policy::Asls).unwrap();
//! let value = eval::policy_win_prob_exact(&inst, &dist).unwrap().estimate;
//! assert!(value >= lastsuccess::bounds::asls_lower_bound(inst.odds_summary().total()));
//! ```

pub mod bounds;
pub mod error;
pub mod eval;
pub mod instances;
pub mod model;
pub mod policies;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use model::{
    draw_realization, draw_samples, last_success_index, odds_summary, Realization, SampleMatrix,
    ThresholdIndex,
};
pub use scalar::Scalar;

pub type Instance = model::Instance<f64>;
pub type OddsSummary = model::OddsSummary<f64>;
pub type ThresholdDistribution = model::ThresholdDistribution<f64>;
pub type EstimationParams = policies::EstimationParams<f64>;
pub type MultiSampleParams = policies::MultiSampleParams<f64>;
pub type Policy = policies::Policy<f64>;
pub type QHatStatistics = eval::QHatStatistics<f64>;
pub type EvalResult = eval::EvalResult<f64>;
pub type DeviationTrace = eval::DeviationTrace<f64>;

pub type InstanceF32 = model::Instance<f32>;
pub type PolicyF32 = policies::Policy<f32>;
pub type EvalResultF32 = eval::EvalResult<f32>;
