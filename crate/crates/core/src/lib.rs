//! Achievable rate regions of a two-user downlink NOMA system whose near
//! user (UE 1) runs its SIC decoder on energy harvested from the downlink.
//!
//! The crate computes the boundary `R1 -> max R2` of the rate region under
//! time switching, power splitting and the combined (generalized) receiver,
//! for a constant decoder power and for a rate-dependent decoder power.
//!
//! * [`model`] holds the system description, the link-level rate and energy
//!   expressions, the feasibility checker and the Gaussian-tail machinery.
//! * [`solver_constant`] solves the constant-power problem in closed form
//!   (TS, PS) and by one-dimensional concave maximization (generalized).
//! * [`solver_dynamic`] solves the rate-dependent problem by grid search.
//! * [`oracle`] is an independent brute-force reference, plus the TDMA
//!   baseline and the time-sharing hull.
//! * [`region`] sweeps a scheme over `R1` and assembles a [`RegionBoundary`].
//!
//! All rates are spectral efficiencies in bits/s/Hz with the slot length
//! normalized to one. Powers are in watts.

// `!(x >= 0.0)` style guards deliberately send NaN down the error path.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod model;
pub mod oracle;
pub mod region;
pub mod solver_constant;
pub mod solver_dynamic;

pub use model::{
    Allocation, Binding, DynamicModel, Error, PowerModel, RatePoint, RegionBoundary, Result,
    Scheme, SplitMode, SystemParams,
};
pub use region::{DynamicSearch, SolverOptions};
pub use solver_constant::{BoundaryResult, Status};
pub use solver_dynamic::GridSpec;
