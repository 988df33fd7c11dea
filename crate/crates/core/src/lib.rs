//! Characteristic-function tomography of a single bosonic mode.
//!
//! States are finite superpositions of squeezed coherent states. From them the
//! crate computes χ, W and Q. It simulates projection-noise-limited χ readout
//! with a SPAM bias, reconstructs Wigner functions by discrete Fourier
//! transform, and fits parametric models to the records. The older
//! displaced-Fock population method is included for comparison.
//!
//! Numerical code is generic over [`Real`] (`f64` or `f32`); the aliases below
//! fix the scalar for the common cases.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod displaced_fock;
pub mod error;
pub mod fit;
pub mod linalg;
pub mod measurement;
pub mod phase_space;
pub mod recon;
pub mod rng;
pub mod scalar;
pub mod states;

pub use error::{Error, Result};
pub use scalar::{Complex, Real};

pub type C64 = Complex<f64>;
pub type State = states::OscillatorState<f64>;
pub type Squeeze = states::SqueezeParam<f64>;
pub type Record = measurement::ReadoutRecord<f64>;
pub type Chi = recon::ChiGrid<f64>;
pub type Wigner = recon::WignerGrid<f64>;
pub type Populations = displaced_fock::PopulationVector<f64>;

pub type C32 = Complex<f32>;
pub type State32 = states::OscillatorState<f32>;
pub type Record32 = measurement::ReadoutRecord<f32>;
pub type Chi32 = recon::ChiGrid<f32>;
