//! Core model for downlink cellular coverage under clustered multi-cell
//! cooperation.
//!
//! Base stations form a planar Poisson point process, clustered by a
//! hexagonal lattice. Cluster-interior BSs share a sub-channel and null
//! their beams toward mobiles served by co-cluster BSs; cluster-edge BSs
//! use the other sub-channel. With per-link power control the outage event
//! for a mobile reduces to the aggregate interference exceeding `1/theta`.
//!
//! The crate provides the geometry and network sampling ([`geometry`],
//! [`netmodel`]), Monte Carlo estimators ([`montecarlo`]) and the
//! closed-form counterparts they are validated against ([`theory`]).
//! Everything is deterministic given the root seed: each trial draws from
//! a counter-seeded stream (see [`rng`]), so results are independent of
//! how trials are scheduled across workers.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod geometry;
pub mod montecarlo;
pub mod netmodel;
pub mod rng;
pub mod stats;
pub mod theory;

pub use error::Error;

pub type Result<T> = core::result::Result<T, Error>;
