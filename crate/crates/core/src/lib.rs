//! Solvers for partial scheduling: pick `k` of `n` jobs and minimize the
//! makespan, under the usual machine environments and job constraints.
//!
//! * [`antichain_dp`] — unit jobs with precedence and release dates on
//!   identical machines, FPT in `k`.
//! * [`colorcode`] — unrelated machines with release dates and deadlines,
//!   randomized FPT in `k`.
//! * [`polysolvers`] — greedy and Moore-based polynomial cases.
//! * [`oracle`] — exhaustive `n^O(k)` search, exact for every variant.
//! * [`classifier`] — maps an instance to its complexity row and solver.
//! * [`reductions`] — instance generators from hard source problems.

pub mod antichain_dp;
pub mod classifier;
pub mod colorcode;
pub mod corpus;
pub mod fixtures;
pub mod model;
pub mod oracle;
pub mod polysolvers;
pub mod poset;
pub mod reductions;

pub use model::{
    check_schedule, validate_instance, Assignment, EnvKind, FeasibilityVerdict, Instance, Job,
    MachineEnv, ModelError, Schedule, Solution, Time, ValidationReport, VariantFlags,
};
pub use poset::{build_poset, Antichain, PrecedenceGraph};
