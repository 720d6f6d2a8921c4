//! Symbolic and numerical toolkit for the Heisenberg–Weyl, rotation-extended
//! and centrally extended Galilei Lie algebras.
//!
//! * [`lie`] and [`uea`] work in exact Gaussian-rational arithmetic.
//! * [`rep`], [`composite`], [`spin`] and [`dynamics`] realize the algebras
//!   as complex matrices on truncated oscillator (Fock) bases.

pub mod composite;
pub mod dynamics;
pub mod exact;
pub mod lie;
pub mod linalg;
pub mod rep;
pub mod report;
pub mod spin;
pub mod uea;

pub use composite::CompositeRep;
pub use lie::{AlgebraElement, CatalogId, LieAlgebra};
pub use rep::{GlobalUnits, ParticleRep, RepConfig, Spin};
pub use report::VerificationReport;
pub use uea::PbwPolynomial;
