//! Quantum-trajectory simulation of computing with detected photons.
//!
//! A register of two-level emitters is monitored through ideal photodetectors.
//! Spontaneous emission (σ₋) and inelastic scattering (σ₊) are routed through
//! polarizing beam splitters to produce unitary flip jumps, and through
//! balanced beam splitters to produce entangling jumps `(σx_j ± iσx_k)/√2`.
//! The crate samples the resulting conditional dynamics exactly, runs the
//! teleportation and graph-state protocols built from these jumps, and checks
//! them against independent oracles: a Lindblad integrator, a stabilizer
//! tableau and closed-form coupon-collector timing.
//!
//! Module map:
//! - [`qstate`]: dense statevector and Pauli-type operator strings
//! - [`channels`]: detection channels, beam-splitter compositions, layouts
//! - [`trajectory`]: event-driven jump sampler and protocol runner
//! - [`protocols`]: teleportation and graph-state scripts and corrections
//! - [`stabilizer`]: bit-packed Clifford tableau
//! - [`verify`]: master-equation and timing oracles
//! - [`cli`]: command-line front end

pub mod channels;
pub mod cli;
pub mod protocols;
pub mod qstate;
pub mod stabilizer;
pub mod trajectory;
pub mod verify;
