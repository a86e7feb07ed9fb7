//! Exact finite-precision algebra of Z/rZ-graded Frobenius-semilinear
//! modules over unramified Witt coefficients: graded slopes, windows,
//! Sym-structures and their sufficient deformations, the Dieudonné
//! connection with Dwork trivialization and descent data, exterior powers
//! of windows, and local-model chart equations.

pub mod coeff_ring;
pub mod connection_dwork;
pub mod deformation;
pub mod error;
pub mod ext_powers;
pub mod graded_semilinear;
pub mod linalg;
pub mod local_model;
pub mod sym_structure;
pub mod windows;

pub use coeff_ring::{MvSeries, Ring, RingParams, Series, SeriesJson, Valuation, Zq};
pub use linalg::Mat;
pub use error::{Error, Result};
