//! Spherical analysis on the real hyperbolic spaces H^d for d = 2, 3, 4.
//!
//! Radial (bi-invariant) functions are identified with functions of the
//! geodesic distance t >= 0; integration against the volume density
//! `J(t) = (2 sinh t)^{d-1}` recovers integration over the space (up to the
//! constant sphere factor, which cancels in every identity used here).
//!
//! Conventions:
//! - spherical function: `phi_lambda(t) = a_d int_0^pi (cosh t - sinh t cos
//!   theta)^{-(i lambda + rho)} sin^{d-2} theta dtheta` with `rho = (d-1)/2`
//!   and `a_d = Gamma(d/2) / (sqrt(pi) Gamma((d-1)/2))`, so `phi_lambda(0) = 1`;
//! - forward transform: `fhat(lambda) = int_0^inf f(t) phi_lambda(t) J(t) dt`;
//! - inversion: `f(t) = (2 pi)^{-1} int_0^inf fhat(lambda) phi_lambda(t)
//!   |c(lambda)|^{-2} dlambda`, with the Plancherel density `|c|^{-2}` in
//!   closed form per dimension;
//! - Abel transform: the even function `A f` on the line with
//!   `F_1(A f) = fhat`, which for d = 3 also has the elementary form
//!   `A f(s) = 2 int_{|s|}^inf f(t) sinh t dt`;
//! - heat kernel: `heat_hat(time, lambda) = exp(-time (lambda^2 + rho^2))`.
//!
//! # Example
//!
//! ```
//! use levlab::hyperbolic::{sft_forward, sft_inverse, BiinvariantFunction, HyperbolicModel};
//! use num_complex::Complex64;
//!
//! let m = HyperbolicModel::new(3)?;
//! // Gaussian-in-distance profile, numerically supported in t <= 4
//! let f = BiinvariantFunction::from_fn(4.0, 321, None, |t| {
//!     Complex64::new((-4.0 * t * t).exp(), 0.0)
//! })?;
//! let fhat = sft_forward(&m, &f, 30.0, 601)?;
//! let back = sft_inverse(&m, &fhat, 4.0, 321)?;
//! let err = (0..321)
//!     .map(|i| (back.eval(f.t(i)) - f.eval(f.t(i))).norm())
//!     .fold(0.0f64, f64::max);
//! assert!(err < 1e-3, "roundtrip error {err}");
//! # Ok::<(), levlab::hyperbolic::HyperbolicError>(())
//! ```

use crate::euclid::EvenProfile;
use crate::numerics::{gauss_legendre, ln_gamma_complex, trapezoid_weights};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

#[derive(Debug, thiserror::Error)]
pub enum HyperbolicError {
    #[error("dimension {0} not supported (need 2, 3 or 4)")]
    UnsupportedDimension(usize),
    #[error("grid is malformed: {0}")]
    MalformedGrid(String),
    #[error("integrand has not decayed at the grid edge (tail {tail:.3e} vs peak {peak:.3e}); extend the grid")]
    Truncation { tail: f64, peak: f64 },
    #[error("csv payload is malformed: {0}")]
    MalformedCsv(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

/// One of the real hyperbolic spaces H^d, d in {2, 3, 4}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperbolicModel {
    dim: usize,
}

impl HyperbolicModel {
    pub fn new(dim: usize) -> Result<Self, HyperbolicError> {
        if !(2..=4).contains(&dim) {
            return Err(HyperbolicError::UnsupportedDimension(dim));
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Half-sum of roots: rho = (d - 1) / 2.
    pub fn rho(&self) -> f64 {
        (self.dim as f64 - 1.0) / 2.0
    }

    /// Radial volume density J(t) = (2 sinh t)^{d-1}.
    pub fn volume_density(&self, t: f64) -> f64 {
        (2.0 * t.sinh()).powi(self.dim as i32 - 1)
    }

    /// Spherical function at spectral parameter `lambda` (complex allowed;
    /// `lambda = i rho` gives the constant 1) and distance `t >= 0`.
    ///
    /// H^3 has the elementary form `sin(lambda t) / (lambda sinh t)`; the
    /// other dimensions go through the integral representation. The two
    /// routes are cross-checked against each other in the test suite.
    pub fn phi_lambda(&self, lambda: Complex64, t: f64) -> Complex64 {
        if t == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        if self.dim == 3 {
            // sin(lambda t)/(lambda t) * t/sinh(t), stable through lambda = 0
            let w = lambda * t;
            let s = if w.norm() < 1e-4 {
                let w2 = w * w;
                Complex64::new(1.0, 0.0) - w2 / 6.0 + w2 * w2 / 120.0
            } else {
                w.sin() / w
            };
            return s * (t / t.sinh());
        }
        self.phi_integral(lambda, t)
    }

    /// The integral representation of the spherical function.
    ///
    /// The raw theta-integral hides its oscillation in a boundary layer of
    /// width ~e^{-t} near theta = 0, so it is evaluated after two
    /// substitutions: `v = ln(cosh t - sinh t cos theta)` makes the phase
    /// exactly linear (`e^{-i lambda v}`, v in [-t, t]), and `v = t sin xi`
    /// removes the endpoint square-root singularities analytically. The
    /// result is a smooth integrand over xi in [-pi/2, pi/2], handled by
    /// composite Gauss-Legendre with the panel count scaled to the phase
    /// range `2 |Re lambda| t`.
    pub fn phi_integral(&self, lambda: Complex64, t: f64) -> Complex64 {
        if t == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        // phi = (a_d / sinh t) int e^{(1 - s) v} sin^{d-3}(theta(v)) dv,
        // s = i lambda + rho, where sin theta = sqrt(q_m q_p) / sinh t with
        // q_m = e^v - e^{-t}, q_p = e^t - e^v.
        let one_minus_s = Complex64::new(1.0 - self.rho(), 0.0) - Complex64::i() * lambda;
        let sh = t.sinh();
        let dim = self.dim;
        let integrand = |xi: f64| -> Complex64 {
            let v = t * xi.sin();
            // cancellation-safe endpoint factors
            let q_m = (-t).exp() * (t * (xi.sin() + 1.0)).exp_m1();
            let q_p = -t.exp() * (t * (xi.sin() - 1.0)).exp_m1();
            let jac = t * xi.cos();
            let amp = match dim {
                2 => jac * sh / (q_m * q_p).sqrt(),
                4 => jac * (q_m * q_p).sqrt() / sh,
                _ => jac,
            };
            (one_minus_s * v).exp() * amp
        };
        let panels = 2 + (lambda.re.abs() * t / 3.0).ceil() as usize;
        let (nodes, weights) = gauss_legendre(24);
        let h = std::f64::consts::PI / panels as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..panels {
            let c = -std::f64::consts::FRAC_PI_2 + (p as f64 + 0.5) * h;
            for (x, w) in nodes.iter().zip(&weights) {
                acc += integrand(c + 0.5 * h * x) * (0.5 * h * w);
            }
        }
        acc * (self.prefactor() / sh)
    }

    fn prefactor(&self) -> f64 {
        // Gamma(d/2) / (sqrt(pi) Gamma((d-1)/2))
        match self.dim {
            2 => 1.0 / std::f64::consts::PI,
            3 => 0.5,
            4 => 2.0 / std::f64::consts::PI,
            _ => unreachable!(),
        }
    }

    /// Plancherel density |c(lambda)|^{-2} in closed form.
    pub fn c_density(&self, lambda: f64) -> f64 {
        let pi = std::f64::consts::PI;
        match self.dim {
            2 => pi * lambda * (pi * lambda).tanh(),
            3 => lambda * lambda,
            4 => pi / 16.0 * lambda * (0.25 + lambda * lambda) * (pi * lambda).tanh(),
            _ => unreachable!(),
        }
    }

    /// The Harish-Chandra c-function from its gamma-quotient formula; used
    /// as an independent route to cross-check `c_density`.
    pub fn c_function_gamma(&self, lambda: f64) -> Complex64 {
        let d = self.dim as f64;
        let rho = self.rho();
        let alpha = (d - 2.0) / 2.0;
        let beta = -0.5;
        let il = Complex64::new(0.0, lambda);
        let ln = Complex64::new(2.0f64.ln(), 0.0) * (rho - il)
            + ln_gamma_complex(Complex64::new(alpha + 1.0, 0.0))
            + ln_gamma_complex(il)
            - ln_gamma_complex((Complex64::new(rho, 0.0) + il) / 2.0)
            - ln_gamma_complex((Complex64::new(alpha - beta + 1.0, 0.0) + il) / 2.0);
        ln.exp()
    }
}

/// A radial function on H^d sampled on a uniform grid of distances from 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiinvariantFunction {
    pub t_max: f64,
    pub values: Vec<Complex64>,
    /// Radius outside which the function is promised to vanish.
    pub support: Option<f64>,
}

impl BiinvariantFunction {
    pub fn new(
        t_max: f64,
        values: Vec<Complex64>,
        support: Option<f64>,
    ) -> Result<Self, HyperbolicError> {
        if values.len() < 4 || !(t_max > 0.0) {
            return Err(HyperbolicError::MalformedGrid(
                "need t_max > 0 and at least 4 samples".into(),
            ));
        }
        if !values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(HyperbolicError::MalformedGrid("non-finite sample".into()));
        }
        Ok(Self { t_max, values, support })
    }

    pub fn from_fn(
        t_max: f64,
        n: usize,
        support: Option<f64>,
        f: impl Fn(f64) -> Complex64,
    ) -> Result<Self, HyperbolicError> {
        let dt = t_max / (n - 1) as f64;
        Self::new(t_max, (0..n).map(|i| f(i as f64 * dt)).collect(), support)
    }

    pub fn dt(&self) -> f64 {
        self.t_max / (self.values.len() - 1) as f64
    }

    pub fn t(&self, i: usize) -> f64 {
        i as f64 * self.dt()
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        if t > self.t_max {
            return Complex64::new(0.0, 0.0);
        }
        crate::numerics::cubic_interp(&self.values, 0.0, self.dt(), t)
    }

    /// CSV columns: t, re, im. An optional comment line may precede the
    /// header; it is the only place a consumer should put run metadata.
    pub fn to_csv(&self, w: &mut impl Write, comment: Option<&str>) -> Result<(), HyperbolicError> {
        if let Some(c) = comment {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "t,re,im")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{:.17e},{:.17e},{:.17e}", self.t(i), v.re, v.im)?;
        }
        Ok(())
    }

    pub fn from_csv(r: impl BufRead) -> Result<Self, HyperbolicError> {
        let (xs, values) = parse_csv_3col(r, "t")?;
        let t_max = *xs.last().unwrap();
        check_uniform_from_zero(&xs)?;
        Self::new(t_max, values, None)
    }
}

/// A spherical transform sampled on a uniform grid of spectral parameters
/// from 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralFunction {
    pub lambda_max: f64,
    pub values: Vec<Complex64>,
}

impl SpectralFunction {
    pub fn new(lambda_max: f64, values: Vec<Complex64>) -> Result<Self, HyperbolicError> {
        if values.len() < 4 || !(lambda_max > 0.0) {
            return Err(HyperbolicError::MalformedGrid(
                "need lambda_max > 0 and at least 4 samples".into(),
            ));
        }
        if !values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(HyperbolicError::MalformedGrid("non-finite sample".into()));
        }
        Ok(Self { lambda_max, values })
    }

    pub fn from_fn(
        lambda_max: f64,
        n: usize,
        f: impl Fn(f64) -> Complex64,
    ) -> Result<Self, HyperbolicError> {
        let dl = lambda_max / (n - 1) as f64;
        Self::new(lambda_max, (0..n).map(|i| f(i as f64 * dl)).collect())
    }

    pub fn dl(&self) -> f64 {
        self.lambda_max / (self.values.len() - 1) as f64
    }

    pub fn lambda(&self, i: usize) -> f64 {
        i as f64 * self.dl()
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, lambda: f64) -> Complex64 {
        if lambda > self.lambda_max {
            return Complex64::new(0.0, 0.0);
        }
        crate::numerics::cubic_interp(&self.values, 0.0, self.dl(), lambda)
    }

    /// CSV columns: lambda, re, im (same comment convention as the radial
    /// side).
    pub fn to_csv(&self, w: &mut impl Write, comment: Option<&str>) -> Result<(), HyperbolicError> {
        if let Some(c) = comment {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "lambda,re,im")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{:.17e},{:.17e},{:.17e}", self.lambda(i), v.re, v.im)?;
        }
        Ok(())
    }

    pub fn from_csv(r: impl BufRead) -> Result<Self, HyperbolicError> {
        let (xs, values) = parse_csv_3col(r, "lambda")?;
        let lambda_max = *xs.last().unwrap();
        check_uniform_from_zero(&xs)?;
        Self::new(lambda_max, values)
    }
}

fn parse_csv_3col(
    r: impl BufRead,
    x_name: &str,
) -> Result<(Vec<f64>, Vec<Complex64>), HyperbolicError> {
    let mut xs = Vec::new();
    let mut values = Vec::new();
    let mut saw_header = false;
    for line in r.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            let expect = format!("{x_name},re,im");
            if line != expect {
                return Err(HyperbolicError::MalformedCsv(format!(
                    "expected header '{expect}', got '{line}'"
                )));
            }
            saw_header = true;
            continue;
        }
        let mut parts = line.split(',');
        let mut next = || -> Result<f64, HyperbolicError> {
            parts
                .next()
                .ok_or_else(|| HyperbolicError::MalformedCsv(format!("short row '{line}'")))?
                .trim()
                .parse::<f64>()
                .map_err(|e| HyperbolicError::MalformedCsv(format!("bad number in '{line}': {e}")))
        };
        let x = next()?;
        let re = next()?;
        let im = next()?;
        xs.push(x);
        values.push(Complex64::new(re, im));
    }
    if xs.is_empty() {
        return Err(HyperbolicError::MalformedCsv("no data rows".into()));
    }
    Ok((xs, values))
}

fn check_uniform_from_zero(xs: &[f64]) -> Result<(), HyperbolicError> {
    if xs[0].abs() > 1e-12 {
        return Err(HyperbolicError::MalformedCsv("grid must start at 0".into()));
    }
    if xs.len() < 2 {
        return Err(HyperbolicError::MalformedCsv("need at least 2 rows".into()));
    }
    let dx = xs[1] - xs[0];
    for w in xs.windows(2) {
        if ((w[1] - w[0]) - dx).abs() > 1e-9 * dx.abs().max(1e-300) {
            return Err(HyperbolicError::MalformedCsv("grid must be uniform".into()));
        }
    }
    Ok(())
}

/// Relative tail size above which a transform refuses to truncate. The
/// value sits above the ~1e-7 quadrature floor of the corrected trapezoid
/// rule but far below any genuinely undecayed tail.
const TAIL_TOL: f64 = 1e-5;

fn tail_check(weighted: &[f64]) -> Result<(), HyperbolicError> {
    let peak = weighted.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(());
    }
    let tail_len = (weighted.len() / 50).max(2);
    let tail = weighted[weighted.len() - tail_len..]
        .iter()
        .cloned()
        .fold(0.0, f64::max);
    if tail > TAIL_TOL * peak {
        return Err(HyperbolicError::Truncation { tail, peak });
    }
    Ok(())
}

/// Euler-Maclaurin endpoint correction for `int_0^{t_max} f phi_lambda J dt`
/// by trapezoid. The integrand vanishes (with derivatives) at t_max but not
/// its odd derivatives at 0; those are known analytically because `f` and
/// `phi_lambda` are even in t with `phi_lambda(0) = 1` and
/// `phi_lambda''(0) = -(lambda^2 + rho^2) / d`:
///
/// `correction = (dt^2/12) g'(0) - (dt^4/720) g'''(0)`, where
/// `g'(0) = f(0) J'(0)` and `g'''(0) = f(0) J'''(0) + 3 (f phi)''(0) J'(0)`.
fn forward_endpoint_correction(
    model: &HyperbolicModel,
    f: &BiinvariantFunction,
    lambda: Complex64,
) -> Complex64 {
    let d = model.dim() as f64;
    // J = (2 sinh t)^{d-1}: odd derivatives at 0 per dimension
    let (j1, j3) = match model.dim() {
        2 => (2.0, 2.0),
        3 => (0.0, 0.0),
        4 => (0.0, 48.0),
        _ => unreachable!(),
    };
    if j1 == 0.0 && j3 == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let dt = f.dt();
    let f0 = f.values[0];
    // one-sided O(dt^2) second derivative of f at 0
    let f2 = (2.0 * f.values[0] - 5.0 * f.values[1] + 4.0 * f.values[2] - f.values[3])
        / (dt * dt);
    let rho = model.rho();
    let phi2 = -(lambda * lambda + rho * rho) / d;
    let g1 = f0 * j1;
    let g3 = f0 * j3 + (f2 + f0 * phi2) * (3.0 * j1);
    g1 * (dt * dt / 12.0) - g3 * (dt * dt * dt * dt / 720.0)
}

/// Forward spherical transform `fhat(lambda) = int_0^{t_max} f phi_lambda J dt`
/// sampled on `[0, lambda_max]` with `n_lambda` points.
pub fn sft_forward(
    model: &HyperbolicModel,
    f: &BiinvariantFunction,
    lambda_max: f64,
    n_lambda: usize,
) -> Result<SpectralFunction, HyperbolicError> {
    let dt = f.dt();
    let weighted: Vec<f64> = f
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| v.norm() * model.volume_density(f.t(i)))
        .collect();
    if f.support.is_none() {
        tail_check(&weighted)?;
    }
    let w = trapezoid_weights(f.values.len(), dt);
    let dl = lambda_max / (n_lambda - 1) as f64;
    let values: Vec<Complex64> = (0..n_lambda)
        .into_par_iter()
        .map(|j| {
            let lambda = Complex64::new(j as f64 * dl, 0.0);
            let mut acc = forward_endpoint_correction(model, f, lambda);
            for (i, (v, wi)) in f.values.iter().zip(&w).enumerate() {
                let t = f.t(i);
                acc += v * model.phi_lambda(lambda, t) * (wi * model.volume_density(t));
            }
            acc
        })
        .collect();
    SpectralFunction::new(lambda_max, values)
}

/// The transform evaluated at a single (possibly complex) spectral
/// parameter; `lambda = i mu` probes exponential growth of the transform.
pub fn sft_at(
    model: &HyperbolicModel,
    f: &BiinvariantFunction,
    lambda: Complex64,
) -> Complex64 {
    let w = trapezoid_weights(f.values.len(), f.dt());
    let mut acc = forward_endpoint_correction(model, f, lambda);
    for (i, (v, wi)) in f.values.iter().zip(&w).enumerate() {
        let t = f.t(i);
        acc += v * model.phi_lambda(lambda, t) * (wi * model.volume_density(t));
    }
    acc
}

/// Inverse spherical transform
/// `f(t) = (2 pi)^{-1} int_0^{lambda_max} fhat phi_lambda |c|^{-2} dlambda`.
pub fn sft_inverse(
    model: &HyperbolicModel,
    fhat: &SpectralFunction,
    t_max: f64,
    n_t: usize,
) -> Result<BiinvariantFunction, HyperbolicError> {
    let dl = fhat.dl();
    let weighted: Vec<f64> = fhat
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| v.norm() * model.c_density(fhat.lambda(i)))
        .collect();
    tail_check(&weighted)?;
    let w = trapezoid_weights(fhat.values.len(), dl);
    let dt = t_max / (n_t - 1) as f64;
    let inv_two_pi = 0.5 / std::f64::consts::PI;
    let values: Vec<Complex64> = (0..n_t)
        .into_par_iter()
        .map(|i| {
            let t = i as f64 * dt;
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, (v, wj)) in fhat.values.iter().zip(&w).enumerate() {
                let lambda = fhat.lambda(j);
                acc += v
                    * model.phi_lambda(Complex64::new(lambda, 0.0), t)
                    * (wj * model.c_density(lambda));
            }
            acc * inv_two_pi
        })
        .collect();
    BiinvariantFunction::new(t_max, values, None)
}

/// Spectral side of the heat kernel at diffusion time `time`.
pub fn heat_hat(
    model: &HyperbolicModel,
    time: f64,
    lambda_max: f64,
    n: usize,
) -> Result<SpectralFunction, HyperbolicError> {
    if !(time > 0.0) {
        return Err(HyperbolicError::MalformedGrid("diffusion time must be positive".into()));
    }
    let rho2 = model.rho() * model.rho();
    SpectralFunction::from_fn(lambda_max, n, |lambda| {
        Complex64::new((-time * (lambda * lambda + rho2)).exp(), 0.0)
    })
}

/// Heat smoothing on the spectral side: multiply by `heat_hat(time, .)`.
pub fn heat_apply(
    model: &HyperbolicModel,
    fhat: &SpectralFunction,
    time: f64,
) -> Result<SpectralFunction, HyperbolicError> {
    if !(time > 0.0) {
        return Err(HyperbolicError::MalformedGrid("diffusion time must be positive".into()));
    }
    let rho2 = model.rho() * model.rho();
    let values = fhat
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let lambda = fhat.lambda(i);
            v * (-time * (lambda * lambda + rho2)).exp()
        })
        .collect();
    SpectralFunction::new(fhat.lambda_max, values)
}

/// Spectral form of bi-invariant convolution: pointwise product. Grids must
/// agree exactly.
pub fn convolve_spectral(
    a: &SpectralFunction,
    b: &SpectralFunction,
) -> Result<SpectralFunction, HyperbolicError> {
    if a.lambda_max != b.lambda_max || a.values.len() != b.values.len() {
        return Err(HyperbolicError::MalformedGrid(
            "spectral grids must match for convolution".into(),
        ));
    }
    SpectralFunction::new(
        a.lambda_max,
        a.values.iter().zip(&b.values).map(|(x, y)| x * y).collect(),
    )
}

/// Abel transform via the spectral identity `F_1(A f) = fhat`:
/// `A f(s) = pi^{-1} int_0^{lambda_max} fhat(lambda) cos(lambda s) dlambda`.
pub fn abel_forward(
    model: &HyperbolicModel,
    f: &BiinvariantFunction,
    s_max: f64,
    n_half: usize,
    lambda_max: f64,
    n_lambda: usize,
) -> Result<EvenProfile, HyperbolicError> {
    let fhat = sft_forward(model, f, lambda_max, n_lambda)?;
    tail_check(&fhat.values.iter().map(|v| v.norm()).collect::<Vec<_>>())?;
    let w = trapezoid_weights(fhat.values.len(), fhat.dl());
    let ds = s_max / (n_half - 1) as f64;
    let inv_pi = 1.0 / std::f64::consts::PI;
    let half: Vec<Complex64> = (0..n_half)
        .map(|i| {
            let s = i as f64 * ds;
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, (v, wj)) in fhat.values.iter().zip(&w).enumerate() {
                acc += v * (wj * (fhat.lambda(j) * s).cos());
            }
            acc * inv_pi
        })
        .collect();
    EvenProfile::from_half(s_max, &half)
        .map_err(|e| HyperbolicError::MalformedGrid(e.to_string()))
}

/// Elementary Abel transform on H^3: `A f(s) = 2 int_{|s|}^{t_max} f sinh t dt`.
/// Kept as an independent oracle for the spectral route.
pub fn abel_forward_direct3(
    f: &BiinvariantFunction,
    s_max: f64,
    n_half: usize,
) -> Result<EvenProfile, HyperbolicError> {
    let (nodes, weights) = gauss_legendre(16);
    let ds = s_max / (n_half - 1) as f64;
    let half: Vec<Complex64> = (0..n_half)
        .map(|i| {
            let s = i as f64 * ds;
            if s >= f.t_max {
                return Complex64::new(0.0, 0.0);
            }
            let panels = 16usize;
            let h = (f.t_max - s) / panels as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for p in 0..panels {
                let c = s + (p as f64 + 0.5) * h;
                for (x, w) in nodes.iter().zip(&weights) {
                    let t = c + 0.5 * h * x;
                    acc += f.eval(t) * (0.5 * h * w * t.sinh());
                }
            }
            acc * 2.0
        })
        .collect();
    EvenProfile::from_half(s_max, &half)
        .map_err(|e| HyperbolicError::MalformedGrid(e.to_string()))
}

/// Inverse Abel transform: recover `f` from the even profile `g = A f` by
/// `fhat = F_1 g` followed by spherical inversion.
pub fn abel_inverse(
    model: &HyperbolicModel,
    g: &EvenProfile,
    lambda_max: f64,
    n_lambda: usize,
    t_max: f64,
    n_t: usize,
) -> Result<BiinvariantFunction, HyperbolicError> {
    let dl = lambda_max / (n_lambda - 1) as f64;
    let fhat = SpectralFunction::new(
        lambda_max,
        (0..n_lambda).map(|j| g.fourier1(j as f64 * dl)).collect(),
    )?;
    sft_inverse(model, &fhat, t_max, n_t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn models() -> Vec<HyperbolicModel> {
        [2, 3, 4].iter().map(|d| HyperbolicModel::new(*d).unwrap()).collect()
    }

    #[test]
    fn dimension_validation() {
        assert!(HyperbolicModel::new(1).is_err());
        assert!(HyperbolicModel::new(5).is_err());
        assert!(HyperbolicModel::new(3).is_ok());
    }

    #[test]
    fn volume_density_below_exponential_envelope() {
        // J(t) = (2 sinh t)^{d-1} <= e^{2 rho t}, with equality as t -> inf
        for m in models() {
            for i in 1..200 {
                let t = i as f64 * 0.05;
                let j = m.volume_density(t);
                assert!(j <= (2.0 * m.rho() * t).exp() * (1.0 + 1e-12));
            }
            let t = 12.0;
            assert!(m.volume_density(t) / (2.0 * m.rho() * t).exp() > 0.99);
        }
    }

    #[test]
    fn phi_normalized_at_origin_and_at_i_rho() {
        for m in models() {
            for lam in [0.0, 0.7, 3.0] {
                let v = m.phi_lambda(Complex64::new(lam, 0.0), 0.0);
                assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-12);
            }
            // phi_{i rho} is identically 1
            for t in [0.3, 1.0, 2.5] {
                let v = m.phi_lambda(Complex64::new(0.0, m.rho()), t);
                assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-9);
                assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn phi_closed_form_h3() {
        // in H^3: phi_lambda(t) = sin(lambda t) / (lambda sinh t)
        let m = HyperbolicModel::new(3).unwrap();
        for lam in [0.5, 1.0, 4.0] {
            for t in [0.2, 1.0, 3.0] {
                let got = m.phi_lambda(Complex64::new(lam, 0.0), t);
                let expect = (lam * t).sin() / (lam * t.sinh());
                assert_abs_diff_eq!(got.re, expect, epsilon = 1e-12);
                assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-12);
                // the integral representation agrees with the closed form
                let integral = m.phi_integral(Complex64::new(lam, 0.0), t);
                assert_abs_diff_eq!(integral.re, expect, epsilon = 1e-9);
                assert_abs_diff_eq!(integral.im, 0.0, epsilon = 1e-9);
            }
        }
        // and for an imaginary spectral parameter
        for mu in [0.5, 1.3] {
            for t in [0.4, 2.0] {
                let lam = Complex64::new(0.0, mu);
                let got = m.phi_lambda(lam, t);
                let integral = m.phi_integral(lam, t);
                assert!((got - integral).norm() < 1e-9 * got.norm());
            }
        }
    }

    #[test]
    fn phi_real_lambda_is_bounded_by_one() {
        for m in models() {
            for lam in [0.3, 2.0, 8.0] {
                for t in [0.1, 1.0, 4.0] {
                    let v = m.phi_lambda(Complex64::new(lam, 0.0), t);
                    assert!(v.norm() <= 1.0 + 1e-10);
                    assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-9); // phi is even in lambda
                }
            }
        }
    }

    #[test]
    fn plancherel_density_matches_gamma_route() {
        for m in models() {
            for lam in [0.2, 1.0, 2.7, 6.0] {
                let via_gamma = m.c_function_gamma(lam).norm().powi(-2);
                let closed = m.c_density(lam);
                assert!(
                    (via_gamma - closed).abs() <= 1e-9 * closed,
                    "d = {}, lambda = {lam}: {via_gamma} vs {closed}",
                    m.dim()
                );
            }
        }
    }

    fn gaussian_radial() -> BiinvariantFunction {
        BiinvariantFunction::from_fn(8.0, 401, None, |t| {
            Complex64::new((-3.0 * t * t).exp(), 0.0)
        })
        .unwrap()
    }

    #[test]
    fn transform_roundtrip_h3() {
        let m = HyperbolicModel::new(3).unwrap();
        let f = gaussian_radial();
        let fhat = sft_forward(&m, &f, 16.0, 321).unwrap();
        let back = sft_inverse(&m, &fhat, 4.0, 81).unwrap();
        for (i, v) in back.values.iter().enumerate() {
            let t = back.t(i);
            let expect = (-3.0 * t * t).exp();
            assert!(
                (v.re - expect).abs() < 2e-6 && v.im.abs() < 1e-9,
                "t = {t}: {v} vs {expect}"
            );
        }
    }

    #[test]
    fn transform_roundtrip_h2_and_h4() {
        for d in [2usize, 4] {
            let m = HyperbolicModel::new(d).unwrap();
            let f = gaussian_radial();
            let fhat = sft_forward(&m, &f, 16.0, 321).unwrap();
            let back = sft_inverse(&m, &fhat, 3.0, 61).unwrap();
            for (i, v) in back.values.iter().enumerate() {
                let t = back.t(i);
                let expect = (-3.0 * t * t).exp();
                assert!(
                    (v.re - expect).abs() < 5e-6 && v.im.abs() < 1e-8,
                    "d = {d}, t = {t}: {v} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn forward_rejects_undecayed_tail() {
        let m = HyperbolicModel::new(2).unwrap();
        // e^{-t} decays, but J e^{-t} does not: truncation must be refused
        let f = BiinvariantFunction::from_fn(6.0, 121, None, |t| {
            Complex64::new((-t).exp(), 0.0)
        })
        .unwrap();
        assert!(matches!(
            sft_forward(&m, &f, 10.0, 51),
            Err(HyperbolicError::Truncation { .. })
        ));
    }

    #[test]
    fn heat_kernel_has_unit_mass() {
        // int h_time J dt = heat_hat at lambda = i rho, which is 1 by the
        // normalization of phi; check it through an actual inversion
        for m in models() {
            let time = 0.3;
            let hhat = heat_hat(&m, time, 10.0, 241).unwrap();
            let h = sft_inverse(&m, &hhat, 9.0, 481).unwrap();
            // Simpson here: the integrand h J has J'(0) != 0 for d = 2, so
            // plain trapezoid would carry a dt^2 endpoint error
            let w = crate::numerics::simpson_weights(h.values.len(), h.dt());
            let mass: f64 = h
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| v.re * m.volume_density(h.t(i)) * w[i])
                .sum();
            assert!(
                (mass - 1.0).abs() < 1e-6,
                "d = {}: heat mass {mass}",
                m.dim()
            );
        }
    }

    #[test]
    fn heat_semigroup_is_spectral_product() {
        let m = HyperbolicModel::new(4).unwrap();
        let a = heat_hat(&m, 0.2, 10.0, 101).unwrap();
        let b = heat_hat(&m, 0.5, 10.0, 101).unwrap();
        let ab = convolve_spectral(&a, &b).unwrap();
        let c = heat_hat(&m, 0.7, 10.0, 101).unwrap();
        for (x, y) in ab.values.iter().zip(&c.values) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn heat_apply_matches_heat_hat() {
        let m = HyperbolicModel::new(2).unwrap();
        let ones = SpectralFunction::from_fn(10.0, 101, |_| Complex64::new(1.0, 0.0)).unwrap();
        let smoothed = heat_apply(&m, &ones, 0.4).unwrap();
        let expect = heat_hat(&m, 0.4, 10.0, 101).unwrap();
        for (x, y) in smoothed.values.iter().zip(&expect.values) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn abel_spectral_route_matches_direct_h3() {
        let m = HyperbolicModel::new(3).unwrap();
        let f = gaussian_radial();
        let spectral = abel_forward(&m, &f, 6.0, 121, 16.0, 321).unwrap();
        let direct = abel_forward_direct3(&f, 6.0, 121).unwrap();
        let sup = direct.sup_abs();
        for (a, b) in spectral.values.iter().zip(&direct.values) {
            assert!((a - b).norm() < 2e-6 * sup, "{a} vs {b}");
        }
    }

    #[test]
    fn abel_roundtrip_h2() {
        let m = HyperbolicModel::new(2).unwrap();
        let f = gaussian_radial();
        let g = abel_forward(&m, &f, 7.0, 281, 16.0, 321).unwrap();
        let back = abel_inverse(&m, &g, 16.0, 321, 3.0, 61).unwrap();
        for (i, v) in back.values.iter().enumerate() {
            let t = back.t(i);
            let expect = (-3.0 * t * t).exp();
            assert!((v.re - expect).abs() < 5e-5, "t = {t}: {} vs {expect}", v.re);
        }
    }

    #[test]
    fn csv_roundtrips() {
        let f = BiinvariantFunction::from_fn(2.0, 9, None, |t| Complex64::new(t, -t * t))
            .unwrap();
        let mut buf = Vec::new();
        f.to_csv(&mut buf, Some("generated for a test")).unwrap();
        let back = BiinvariantFunction::from_csv(&buf[..]).unwrap();
        assert_eq!(f.values, back.values);
        assert_abs_diff_eq!(f.t_max, back.t_max, epsilon = 1e-15);

        let s = SpectralFunction::from_fn(5.0, 11, |l| Complex64::new(l.cos(), l.sin()))
            .unwrap();
        let mut buf = Vec::new();
        s.to_csv(&mut buf, None).unwrap();
        let back = SpectralFunction::from_csv(&buf[..]).unwrap();
        assert_eq!(s.values, back.values);
    }

    #[test]
    fn csv_rejects_garbage() {
        let bad = "t,re,im\n0.0,1.0\n";
        assert!(matches!(
            BiinvariantFunction::from_csv(bad.as_bytes()),
            Err(HyperbolicError::MalformedCsv(_))
        ));
        let bad_header = "x,y,z\n0,0,0\n";
        assert!(matches!(
            SpectralFunction::from_csv(bad_header.as_bytes()),
            Err(HyperbolicError::MalformedCsv(_))
        ));
    }

    #[test]
    fn transform_grows_at_most_exponentially_for_compact_support() {
        // |fhat(i mu)| <= e^{L mu} * ||f||_{L1(J dt)} for supp f in [0, L]
        let m = HyperbolicModel::new(3).unwrap();
        let l = 1.5;
        let f = BiinvariantFunction::from_fn(l, 201, Some(l), |t| {
            let x = t / l;
            Complex64::new(if x < 1.0 { (-1.0 / (1.0 - x * x)).exp() } else { 0.0 }, 0.0)
        })
        .unwrap();
        let w = trapezoid_weights(f.values.len(), f.dt());
        let l1: f64 = f
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| v.norm() * m.volume_density(f.t(i)) * w[i])
            .sum();
        for mu in [0.5, 2.0, 5.0] {
            let v = sft_at(&m, &f, Complex64::new(0.0, mu));
            assert!(
                v.norm() <= (l * mu).exp() * l1 * (1.0 + 1e-9),
                "mu = {mu}: {} vs {}",
                v.norm(),
                (l * mu).exp() * l1
            );
        }
    }
}
