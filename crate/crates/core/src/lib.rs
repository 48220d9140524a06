//! Automated design appraisal.
//!
//! Simulates building-level view quality over a mutable 3D city model, turns
//! it into a Visual Capital index, prices it with a hedonic model and
//! measures the direct and neighbourhood price impact of design scenarios.
//!
//! The pipeline, module by module:
//!
//! 1. [`citymodel`] loads terrain, buildings, canopy and landcover and applies
//!    scenario edits (extra floors, massing replacement).
//! 2. [`visibility`] places façade viewpoints and casts a 2600-ray view cone
//!    from each, counting hits per landcover category and distance bin.
//! 3. [`viewmetrics`] aggregates those counts into building-level view metrics.
//! 4. [`vcscore`] maps a metric vector to Visual Capital.
//! 5. [`hedonic`] fits and applies the log-price model.
//! 6. [`scenario`] generates design scenarios and their evaluation plan.
//! 7. [`impact`] computes deltas, relative changes, direct and local effects
//!    and the price impact of each scenario.
//!
//! [`cli`] wires these together for the `ada` binary; the same functions can
//! be called directly from library code.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod citymodel;
pub mod cli;
pub mod demo;
mod error;
pub mod hedonic;
pub mod impact;
pub mod scenario;
pub mod vcscore;
pub mod viewmetrics;
pub mod visibility;

pub use error::{Error, Result};
