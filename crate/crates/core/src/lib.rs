//! Solvers for heterogeneous multi-resource allocation with subset demand
//! requests.
//!
//! A demand asks for one unit of each resource type in a subset, all present
//! at the same place for the same time window. Resources travel between
//! demands on an integer travel metric. The crate provides:
//!
//! * the instance model, validation and generators ([`instance`], [`generate`]),
//! * reachability preprocessing ([`preprocess`]),
//! * an integral min-cost-flow engine and the flow constructions built on it
//!   ([`mcf`], [`schedule`]),
//! * exact solving by branch-and-bound over the served set ([`exact`]),
//! * ratio-certified approximation algorithms ([`approx`]),
//! * the LP relaxation with bicriteria rounding ([`lp`], [`bicriteria`]),
//! * the travel-cost extension ([`costs`]).
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod approx;
pub mod bicriteria;
pub mod budget;
pub mod costs;
pub mod exact;
pub mod generate;
pub mod instance;
pub mod lp;
pub mod mcf;
pub mod preprocess;
pub mod schedule;
pub mod solution;

pub use budget::{Budget, NodeLimit, Unlimited};
pub use instance::{
    Demand, Grid, Instance, Location, OdPair, ResourceTypeSpec, StartStock, TravelMetric,
    Violation,
};
pub use preprocess::{build_od_reachability, build_reachability, ReachabilityData, TypeView};
pub use solution::{Certificate, ObjectiveKind, Solution, SolutionViolation, UnitPath};

/// Index of a demand in [`Instance::demands`].
pub type DemandIdx = usize;
/// Index of a resource type in [`Instance::types`].
pub type TypeIdx = usize;
/// Index of a location in [`Instance::locations`].
pub type LocIdx = usize;
