//! Design and simulation toolkit for passive nonreciprocal superconducting
//! devices built on flux-charge coupling through voltage-tunable junctions.
//!
//! Internal computations are in SI units unless a module says otherwise
//! (the [`lindblad`] module works with ħ = 1 and angular frequencies).

pub mod constants;
pub mod coupling;
pub mod design;
pub mod error;
pub mod io;
pub mod junction;
pub mod linalg;
pub mod lindblad;
pub mod network;
pub mod nonlinear;
pub mod roots;
pub mod spline;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
