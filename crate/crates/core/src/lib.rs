//! Plans which failed robot a single supervisor should rescue next.
//!
//! The fleet is modelled as a graph whose robot rewards and travel times
//! change over time. Each planning step freezes that graph into a
//! [`graph::StaticSnapshot`] and solves the resulting profitable tour problem
//! exactly ([`ptp::solve_bnb`]); the supervisor heads for the first robot on
//! the optimal path and the plan is recomputed on the next step.
//!
//! - [`graph`]: graph model, path values, snapshots and the instance format.
//! - [`ptp`]: exact static solvers (branch-and-bound, subset DP).
//! - [`bound`]: exhaustive dynamic solver and the static-vs-dynamic gap bound.
//! - [`sim`]: seeded grid-farm simulator.
//! - [`policy`]: supervisor policies and the trial loop.
//! - [`harness`]: experiment grids, aggregation and CSV output.

pub mod bound;
pub mod graph;
pub mod harness;
pub mod policy;
pub mod ptp;
pub mod sim;
