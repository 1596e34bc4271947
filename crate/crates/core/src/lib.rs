//! Bound states of a hydrogen-like atom confined to a plane with a constant
//! perpendicular magnetic field.
//!
//! The radial equation in Landau units,
//!
//! ```text
//! R'' + R'/x + (E - m - m^2/x^2 - x^2/4 + a/x) R = 0,
//! ```
//!
//! splits into six cases by the sign of `m` and of the shifted energy
//! `E - (m + |m| + 1)`. Each case has a power-series recursion; eigenvalue
//! candidates are the roots of a chosen coefficient viewed as a polynomial in
//! the case's eigenparameter `gamma`. [`oracle`] provides an independent
//! finite-difference spectrum to test those candidates against.

pub mod eigensolve;
pub mod error;
pub mod oracle;
pub mod poly;
pub mod quadrature;
pub mod roots;
pub mod scaling;
pub mod series;
pub mod wavefun;

pub use error::{Error, Result};
pub use scaling::{CaseId, Family, Params, PhysicalConstants, ShiftSign};
pub use series::SeriesFamily;
