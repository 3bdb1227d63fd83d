//! Exact commuting integrals for the magnetic geodesic flow on `S^n` with a
//! constant magnetic form, per-instance verification of their algebraic
//! properties, and a structure-preserving integrator for the flow.
//!
//! Everything symbolic lives on the ambient phase space `T*R^{n+1}` with
//! coordinates `X_1..X_{n+1}, P_1..P_{n+1}` (zero-based in code).

pub mod error;
pub mod exactpoly;
pub mod integral_family;
pub mod magnetic_model;
pub mod sampling;
pub mod flow;
pub mod verify;

pub use error::{Error, Result};
