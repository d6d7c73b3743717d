//! Spectral toolkit for regular and Atkinson-type Sturm-Liouville problems
//! with step-function coefficients.
//!
//! The differential equation `-(p y')' + q y = λ r y` is handled in its
//! first-order form `u' = -s v`, `v' = (λ r - q) u` with `s = 1/p`, so that
//! pieces where `p` is infinite are simply pieces with `s = 0`. Every
//! constant-coefficient piece is crossed with an exact transfer matrix; no
//! ODE discretization error enters the spectra.
//!
//! Besides the eigenvalue solver the crate carries the experiments that
//! compare such spectra against the primes: Weyl growth `λ_n ~ n²π²/C²`
//! versus `p_n ~ n log n`, the order-½ growth of the solution as an entire
//! function of `λ`, the convergent/divergent power-sum pair, a
//! nonlinear-parameter problem with `n log n` growth, and a pattern search
//! for potentials whose nonlinear spectrum approaches the primes.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the
//! `*F64`/`*F32` aliases below name the common instantiations.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod coeff;
pub mod error;
pub mod inverse;
pub mod nonlinear;
pub mod primes;
pub mod scalar;
pub mod shoot;
pub mod spectrum;

pub use error::{Error, Result};
pub use scalar::Real;

pub use coeff::{BoundaryCondition, CoefficientSet, Interval, PiecewiseConstant, SLProblem};
pub use shoot::{AngleResult, State, TransferMatrix};
pub use spectrum::{Eigenvalue, SolverConfig, Spectrum, Truncation, WeylFit};

pub type IntervalF64 = Interval<f64>;
pub type PiecewiseConstantF64 = PiecewiseConstant<f64>;
pub type CoefficientSetF64 = CoefficientSet<f64>;
pub type BoundaryConditionF64 = BoundaryCondition<f64>;
pub type SLProblemF64 = SLProblem<f64>;
pub type StateF64 = State<f64>;
pub type TransferMatrixF64 = TransferMatrix<f64>;
pub type SpectrumF64 = Spectrum<f64>;
pub type EigenvalueF64 = Eigenvalue<f64>;

pub type PiecewiseConstantF32 = PiecewiseConstant<f32>;
pub type SLProblemF32 = SLProblem<f32>;
pub type SpectrumF32 = Spectrum<f32>;

/// Complex scalar used for non-real spectral parameters.
pub type Complex<T> = num_complex::Complex<T>;
pub type NonlinearProblemF64 = nonlinear::NonlinearProblem<f64>;
pub type SearchResultF64 = inverse::SearchResult<f64>;
