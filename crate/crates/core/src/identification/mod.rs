//! Weighted-RMSE parameter identification with a particle swarm.

pub mod cost;
pub mod dataset;
pub mod protocol;
pub mod pso;
pub mod synthetic;

pub use cost::{
    identify, identify_aged, identify_fresh, penalty, trajectory_misfit, CostBreakdown, CostWeights,
    IdentificationOutcome, IdentificationProblem, PENALTY_BASE,
};
pub use dataset::{soc_exp_from_coulomb_counting, CycleLabel, ExperimentalDataset, Sample};
pub use protocol::{
    phase_parameters, reference_table, search_vector, Param, ParameterEntry, ParameterVector, ReferenceRow,
    ReferenceTable,
};
pub use pso::{pso_minimize, BoundHandling, PsoConfig, PsoResult, SearchProblem};
