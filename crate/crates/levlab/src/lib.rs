//! Weighted approximation and the Levinson dichotomy on Euclidean space and
//! rank-one hyperbolic spaces.
//!
//! The crate is organized around one question: given a log-weight
//! `psi`, does every function small against `e^{psi}` whose transform
//! vanishes on a window have to vanish, or does a nonzero compactly
//! supported witness exist? The answer is governed by the integral
//! `int_1^inf psi(r)/r^2 dr` ([`weights::WeightFunction::classify_levinson`]),
//! and both branches are made computational here:
//!
//! - [`weights`] — admissible weight functions, the weighted sup norm, and
//!   the divergence/convergence classifier.
//! - [`euclid`] — Fourier analysis on R^d, the Radon transform of radial
//!   functions, and psi-weighted projection onto exponential spans.
//! - [`dyadic`] — certified dyadic-cube discretization of measures against
//!   Lipschitz kernels, the engine behind the constructive density step.
//! - [`hyperbolic`] — spherical analysis on real hyperbolic spaces H^d
//!   (d = 2, 3, 4): spherical functions, Plancherel density, spherical
//!   transform, Abel transform, heat smoothing.
//! - [`dichotomy`] — the two branches assembled: density of spherical
//!   spans under a divergent weight, and compactly supported witnesses
//!   under a convergent one.
//! - [`numerics`] — shared quadrature, interpolation and special-function
//!   kernels.

pub mod dichotomy;
pub mod dyadic;
pub mod euclid;
pub mod hyperbolic;
pub mod lsq;
pub mod numerics;
pub mod weights;
