//! Evolutionary machinery: operators, ranking, survival selection and the
//! three optimizers.

mod algorithms;
mod operators;
mod ranking;
mod reduce;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use algorithms::{run_3dch_emoa, run_nsga2, run_sms_emoa, Algorithm, AlgorithmConfig, RunResult};
pub use operators::{bit_variation, polynomial_mutation, sbx_crossover, single_point_crossover, OperatorParams};
pub use ranking::{
    ch_sort, ch_sort_objectives, crowding_distance, nondominated_sort, LevelAssignment, REDUNDANCY_TOLERANCE,
};
pub use reduce::non_descending_reduce;

pub use crate::problems::{Genotype, GenotypeKind};
use crate::geometry::ObjectiveVector;
use crate::problems::ProblemError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolveError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("objective vector {objectives:?} is not finite")]
    NonFinite { objectives: [f64; 3] },
}

/// An evaluated genotype.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub genotype: Genotype,
    pub objectives: ObjectiveVector,
}
