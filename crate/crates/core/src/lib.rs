//! Load bounds for hyperelastic bodies in frictionless unilateral contact.
//!
//! The crate evaluates potential and complementary-type energies over
//! parametric families of deformations, checks the contact and second-order
//! admissibility conditions, and computes the admissible range of a uniform
//! dead load for two neo-Hookean slabs under compression, cohesion and
//! combined stretch and bending.

pub mod bounds;
pub mod cli;
pub mod contact;
pub mod energy;
pub mod error;
pub mod kinematics;
pub mod material;
pub mod quadrature;
pub mod tensor3;

pub use error::{Error, Result};
