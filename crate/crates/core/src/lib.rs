//! Simulation and attack harness for quantum key distribution with screening
//! angles and an analyzing detector.
//!
//! A qubit travels Alice → Bob → Alice → Bob. Alice prepares it at a random
//! angle `θ`, Bob adds a random angle `φ` and a screening angle `α_b`, Alice
//! removes `θ`, encodes her key bit and adds her own screening angle `α_a`,
//! and Bob removes `φ` and measures. Only rounds with `α_a + α_b = π/2`
//! yield key bits. Bob occasionally uses a public analyzing angle for `φ`,
//! which lets Alice's tapped analyzing detector check for foreign photons.
//!
//! The crate is organized as
//!
//! - [`photonics`]: polarization states, rotation, measurement, pulses
//! - [`protocol`]: the honest parties, sifting and hash verification
//! - [`channel`]: the three quantum legs and the public board
//! - [`adversary`]: the eavesdropping strategies
//! - [`analysis`]: metrics, closed-form predictions and reports
//! - [`experiment`]: config-driven runs, also used by the `screenqkd` binary

pub mod adversary;
pub mod analysis;
pub mod channel;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod photonics;
pub mod protocol;
pub mod rng;

pub use error::{Error, Result};
pub use rng::RandomSource;
