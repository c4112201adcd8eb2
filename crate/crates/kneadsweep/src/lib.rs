//! Cartography of homoclinic bifurcations in ℤ₂-symmetric 3D flows.
//!
//! The crate has two independent halves that cross-validate each other:
//!
//! * A simulation pipeline: fixed-step RK4 integration of separatrix
//!   trajectories ([`integrate`]), conversion to binary symbol sequences and
//!   kneading invariants ([`symbolic`]), embarrassingly parallel biparametric
//!   grid sweeps ([`sweep`]), and image export ([`render`]).
//! * An analytical pipeline: truncated Poincaré return maps near a
//!   saddle-focus, multi-loop orbit codes, bifurcation-interval extraction
//!   and scaling-ratio checks ([`theory`]).
//!
//! [`models`] defines the two concrete systems (a smooth cubic Chua circuit
//! and a cubic normal form), their equilibria, spectra, and the analytic
//! bifurcation-curve formulas used to anchor the sweeps.

pub mod container;
pub mod cubic;
pub mod integrate;
pub mod models;
pub mod render;
pub mod sweep;
pub mod symbolic;
pub mod theory;
