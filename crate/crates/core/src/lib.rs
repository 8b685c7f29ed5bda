//! Survival of two-hole surface-code logical qubits that flee from cosmic-ray
//! phonon fronts.
//!
//! * [`model`]: lattice geometry, the phonon front and the destruction predicate.
//! * [`feasibility`]: the two survival conditions and the minimum code distance.
//! * [`sweep`]: parameter sweeps over the solver.
//! * [`mapping`], [`planner`], [`sim`]: multi-qubit layouts, escape plans and
//!   their cycle-by-cycle execution.
//! * [`reliability`], [`montecarlo`]: the Poisson failure model and its
//!   Monte Carlo check.
//!
//! Sweeps and Monte Carlo trials run on rayon with the default `parallel`
//! feature; [`par::Execution`] selects sequential execution at run time.

// `!(x > 0.0)` style checks are kept on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod feasibility;
pub mod mapping;
pub mod model;
pub mod montecarlo;
pub mod par;
pub mod planner;
pub mod reliability;
pub mod sim;
pub mod sweep;

pub use error::{FleeError, Result};
pub use feasibility::{
    min_code_distance, HalfwayConvention, MinDistance, ScenarioKind, StrikeScenario,
};
pub use mapping::{build_mapping, Mapping};
pub use model::{CreEvent, LatticePoint, LogicalQubit, PhononFront, PhysicalParams, Point};
pub use montecarlo::{monte_carlo_failure, McEstimate, McMode, McOptions};
pub use par::Execution;
pub use planner::{detect, plan_flight, MovePlan};
pub use reliability::{failure_probability, p_few_hits, p_hole_hit_frame, ReliabilityParams};
pub use sim::{simulate, simulate_with, DamageModel, SimOptions, SimOutcome};
pub use sweep::{sweep, SweepParameter, SweepResult, SweepSpec};
