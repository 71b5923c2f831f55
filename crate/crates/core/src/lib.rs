//! Matrix-free generalized sampling: recover boundary-corrected Daubechies
//! wavelet coefficients of a function supported in `[0,1]^d` from finitely many
//! uniform or nonuniform samples of its Fourier transform.
//!
//! The numerical core (wavelet transforms, NUDFT plans, the sampling operator
//! and the iterative solvers) is generic over the real scalar type; the aliases
//! at the bottom of this file fix it to `f64`, which is what the experiment
//! harness and the CLI use.
//!
//! Fourier convention throughout: `f̂(ω) = ⟨f, e_ω⟩ = ∫ f(x) e^{-2πiωx} dx`.

pub mod baselines;
pub mod error;
pub mod experiments;
pub mod harness;
pub mod io;
pub mod nudft;
pub mod operator;
pub mod sampling;
pub mod scalar;
pub mod scaling_fourier;
pub mod solvers;
pub mod wavelet;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use scalar::Real;

/// Complex sample value in double precision.
pub type C64 = Complex<f64>;

pub type WaveletSystem64 = wavelet::WaveletSystem<f64>;
pub type GsOperator64 = operator::GsOperator<f64>;
pub type NudftPlan64 = nudft::NudftPlan<f64>;
pub type NudftPlan2d64 = nudft::NudftPlan2d<f64>;
pub type SolveReport64 = solvers::SolveReport<f64>;
