//! Convex-hull based evolutionary multiobjective optimization in 3-D ROC space.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] – quickhull, polytope volumes, halfspace clipping and the
//!   dominated-closure construction.
//! * [`rocch`] – ROC spaces, the volume-under-surface (VUS) indicator, per-point
//!   VUS contributions and iso-performance operating-point selection.
//! * [`problems`] – ZEJD/ZED benchmark functions and a synthetic rule-subset
//!   classifier problem.
//! * [`evolve`] – variation operators, hull-based ranking, the steady-state
//!   3DCH-EMOA and the NSGA-II / SMS-EMOA baselines.
//! * [`metrics`] – gini spacing coefficient, exact 3-D hypervolume, summaries.
//! * [`harness`] – seeded repeated experiments, oracles and CSV/JSON reports.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and falls back to plain iteration otherwise.

pub mod evolve;
pub mod geometry;
pub mod harness;
pub mod metrics;
pub mod par;
pub mod problems;
pub mod rocch;

pub use geometry::{Halfspace, ObjectiveVector, Sense};
pub use rocch::RocSpace;
