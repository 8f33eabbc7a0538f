//! Euclidean Fourier analysis on R^d: forward/inverse transforms of
//! compactly supported grid functions, the Radon transform of radial
//! functions with its slice-projection inverse, and psi-weighted projection
//! onto spans of exponentials with frequencies in the cube Q(0, L).
//!
//! Conventions: the forward kernel is e^{-i x.xi} with no prefactor; the
//! inverse carries (2 pi)^{-d}.
//!
//! # Example
//!
//! ```
//! use levlab::euclid::{slice_projection_check, RadialProfile};
//! use num_complex::Complex64;
//!
//! // smooth radial bump in R^3, supported in r <= 1
//! let f = RadialProfile::from_fn(3, 1.5, 301, Some(1.0), |r| {
//!     let v = if r < 1.0 { (-1.0 / (1.0 - r * r)).exp() } else { 0.0 };
//!     Complex64::new(v, 0.0)
//! })?;
//! // the central slice of the 3-d transform equals the 1-d transform of
//! // the Radon profile; the residual is the sup gap over [0, 10]
//! assert!(slice_projection_check(&f, 10.0, 41)? < 1e-4);
//! # Ok::<(), levlab::euclid::EuclidError>(())
//! ```

use crate::lsq::{weighted_minimax_fit, FitOutcome};
use crate::numerics::{bessel_j0, cubic_interp, gauss_legendre, sinc, trapezoid_weights as trapezoid_rule};
use crate::weights::{psi_norm, WeightError, WeightFunction};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Relative threshold under which boundary samples count as zero.
pub const SUPPORT_TOL: f64 = 1e-8;

#[derive(Debug, thiserror::Error)]
pub enum EuclidError {
    #[error("grid is malformed: {0}")]
    MalformedGrid(String),
    #[error("support touches the box boundary above tolerance (max boundary sample {max_boundary:.3e} vs sup {sup:.3e})")]
    SupportViolation { max_boundary: f64, sup: f64 },
    #[error("profile is not even within tolerance (max asymmetry {0:.3e})")]
    SymmetryError(f64),
    #[error("reconstruction leaks past the certified support radius {radius} (leak {leak:.3e} vs sup {sup:.3e})")]
    SupportCertification { radius: f64, leak: f64, sup: f64 },
    #[error("span node {0:?} lies outside the open cube Q(0, L)")]
    NodeOutsideCube(Vec<f64>),
    #[error("span has no nodes")]
    EmptySpan,
    #[error(transparent)]
    Weight(#[from] WeightError),
}

/// Axis description of a uniform grid over a box.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GridSpec {
    /// Per-axis closed intervals [lo, hi].
    pub bounds: Vec<[f64; 2]>,
    /// Per-axis sample counts (>= 2).
    pub shape: Vec<usize>,
}

impl GridSpec {
    pub fn new(bounds: Vec<[f64; 2]>, shape: Vec<usize>) -> Result<Self, EuclidError> {
        if bounds.is_empty() || bounds.len() != shape.len() {
            return Err(EuclidError::MalformedGrid(
                "bounds and shape must be nonempty and of equal length".into(),
            ));
        }
        for (b, n) in bounds.iter().zip(&shape) {
            if !(b[0] < b[1]) {
                return Err(EuclidError::MalformedGrid(format!(
                    "degenerate interval [{}, {}]",
                    b[0], b[1]
                )));
            }
            if *n < 2 {
                return Err(EuclidError::MalformedGrid("need >= 2 samples per axis".into()));
            }
        }
        Ok(Self { bounds, shape })
    }

    /// Symmetric cube [-half, half]^dim with n samples per axis.
    pub fn centered_cube(dim: usize, half: f64, n: usize) -> Result<Self, EuclidError> {
        Self::new(vec![[-half, half]; dim], vec![n; dim])
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinates of the samples along one axis.
    pub fn axis_coords(&self, axis: usize) -> Vec<f64> {
        let [lo, hi] = self.bounds[axis];
        let n = self.shape[axis];
        let dx = (hi - lo) / (n - 1) as f64;
        (0..n).map(|i| lo + i as f64 * dx).collect()
    }

    fn axis_step(&self, axis: usize) -> f64 {
        let [lo, hi] = self.bounds[axis];
        (hi - lo) / (self.shape[axis] - 1) as f64
    }
}

/// A complex-valued function sampled on a uniform grid over a box in R^d.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub spec: GridSpec,
    pub values: Vec<Complex64>,
    /// Radius outside which the function is certified (approximately) zero.
    pub support_radius: Option<f64>,
}

/// JSON wire format: {dim, box, shape, values as [re, im] pairs, support_radius?}.
#[derive(Serialize, Deserialize)]
struct GridFunctionWire {
    dim: usize,
    #[serde(rename = "box")]
    bounds: Vec<[f64; 2]>,
    shape: Vec<usize>,
    values: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    support_radius: Option<f64>,
}

impl Serialize for GridFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GridFunctionWire {
            dim: self.spec.dim(),
            bounds: self.spec.bounds.clone(),
            shape: self.spec.shape.clone(),
            values: self.values.iter().map(|v| [v.re, v.im]).collect(),
            support_radius: self.support_radius,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GridFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = GridFunctionWire::deserialize(d)?;
        let spec = GridSpec::new(w.bounds, w.shape).map_err(serde::de::Error::custom)?;
        GridFunction::new(
            spec,
            w.values.iter().map(|p| Complex64::new(p[0], p[1])).collect(),
            w.support_radius,
        )
        .map_err(serde::de::Error::custom)
    }
}

impl GridFunction {
    pub fn new(
        spec: GridSpec,
        values: Vec<Complex64>,
        support_radius: Option<f64>,
    ) -> Result<Self, EuclidError> {
        if values.len() != spec.len() {
            return Err(EuclidError::MalformedGrid(format!(
                "value count {} does not match shape product {}",
                values.len(),
                spec.len()
            )));
        }
        if !values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(EuclidError::MalformedGrid("non-finite sample".into()));
        }
        let g = Self { spec, values, support_radius };
        if let Some(s) = g.support_radius {
            let sup = g.sup_abs();
            if sup > 0.0 {
                let mut leak = 0.0f64;
                for (x, v) in g.iter_points() {
                    let r: f64 = x.iter().map(|c| c * c).sum::<f64>().sqrt();
                    if r > s {
                        leak = leak.max(v.norm());
                    }
                }
                if leak > SUPPORT_TOL * sup {
                    return Err(EuclidError::SupportCertification { radius: s, leak, sup });
                }
            }
        }
        Ok(g)
    }

    /// Sample a closure on the given grid.
    pub fn from_fn(
        spec: GridSpec,
        support_radius: Option<f64>,
        f: impl Fn(&[f64]) -> Complex64,
    ) -> Result<Self, EuclidError> {
        let coords: Vec<Vec<f64>> = (0..spec.dim()).map(|a| spec.axis_coords(a)).collect();
        let mut values = Vec::with_capacity(spec.len());
        let mut idx = vec![0usize; spec.dim()];
        let mut point = vec![0.0f64; spec.dim()];
        loop {
            for (a, &i) in idx.iter().enumerate() {
                point[a] = coords[a][i];
            }
            values.push(f(&point));
            // row-major odometer
            let mut a = spec.dim();
            loop {
                if a == 0 {
                    return GridFunction::new(spec, values, support_radius);
                }
                a -= 1;
                idx[a] += 1;
                if idx[a] < spec.shape[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Iterate over (coordinates, value) pairs in row-major order.
    pub fn iter_points(&self) -> impl Iterator<Item = (Vec<f64>, Complex64)> + '_ {
        let coords: Vec<Vec<f64>> = (0..self.dim()).map(|a| self.spec.axis_coords(a)).collect();
        let shape = self.spec.shape.clone();
        self.values.iter().enumerate().map(move |(flat, v)| {
            let mut rem = flat;
            let mut x = vec![0.0; shape.len()];
            for a in (0..shape.len()).rev() {
                x[a] = coords[a][rem % shape[a]];
                rem /= shape[a];
            }
            (x, *v)
        })
    }

    /// Separable cubic interpolation at an arbitrary point (clamped to the box).
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        assert_eq!(x.len(), self.dim());
        self.eval_rec(x, 0, 0, 1)
    }

    // interpolate axis by axis; `stride`/`offset` walk the row-major layout
    fn eval_rec(&self, x: &[f64], axis: usize, offset: usize, _unused: usize) -> Complex64 {
        // strides: stride of axis a is product of shape[a+1..]
        let d = self.dim();
        if axis == d {
            return self.values[offset];
        }
        let stride: usize = self.spec.shape[axis + 1..].iter().product();
        let n = self.spec.shape[axis];
        let line: Vec<Complex64> = (0..n)
            .map(|i| self.eval_rec(x, axis + 1, offset + i * stride, 1))
            .collect();
        cubic_interp(&line, self.spec.bounds[axis][0], self.spec.axis_step(axis), x[axis])
    }

    /// (radius, magnitude) samples for the psi-norm.
    pub fn psi_samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.iter_points()
            .map(|(x, v)| (x.iter().map(|c| c * c).sum::<f64>().sqrt(), v.norm()))
    }

    /// The psi-weighted sup norm over the grid samples.
    pub fn psi_norm(&self, psi: &WeightFunction) -> Result<f64, WeightError> {
        psi_norm(self.psi_samples(), psi)
    }

    fn check_boundary_decay(&self) -> Result<(), EuclidError> {
        let sup = self.sup_abs();
        if sup == 0.0 {
            return Ok(());
        }
        let mut max_boundary = 0.0f64;
        let shape = &self.spec.shape;
        for (flat, v) in self.values.iter().enumerate() {
            let mut rem = flat;
            let mut on_boundary = false;
            for a in (0..shape.len()).rev() {
                let i = rem % shape[a];
                rem /= shape[a];
                if i == 0 || i == shape[a] - 1 {
                    on_boundary = true;
                }
            }
            if on_boundary {
                max_boundary = max_boundary.max(v.norm());
            }
        }
        if max_boundary > SUPPORT_TOL * sup {
            return Err(EuclidError::SupportViolation { max_boundary, sup });
        }
        Ok(())
    }
}

/// Per-axis trapezoid weights of a grid spec.
fn trapezoid_weights(spec: &GridSpec, axis: usize) -> Vec<f64> {
    let n = spec.shape[axis];
    let dx = spec.axis_step(axis);
    let mut w = vec![dx; n];
    w[0] = 0.5 * dx;
    w[n - 1] = 0.5 * dx;
    w
}

/// Apply the 1-D kernel e^{sign * i * x * xi} with quadrature weights along
/// one axis, replacing that axis by the output coordinates.
fn axis_transform(
    values: &[Complex64],
    shape: &[usize],
    axis: usize,
    in_coords: &[f64],
    in_weights: &[f64],
    out_coords: &[f64],
    sign: f64,
) -> (Vec<Complex64>, Vec<usize>) {
    let n = shape[axis];
    let m = out_coords.len();
    // kernel[j][i] = w_i * exp(sign * i * x_i * xi_j)
    let kernel: Vec<Vec<Complex64>> = out_coords
        .iter()
        .map(|xi| {
            in_coords
                .iter()
                .zip(in_weights)
                .map(|(x, w)| Complex64::from_polar(*w, sign * x * xi))
                .collect()
        })
        .collect();
    let stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut out_shape = shape.to_vec();
    out_shape[axis] = m;
    let mut out = vec![Complex64::new(0.0, 0.0); out_shape.iter().product()];
    let out_stride = stride; // inner stride unchanged
    for o in 0..outer {
        let in_base = o * n * stride;
        let out_base = o * m * stride;
        for s in 0..stride {
            for (j, krow) in kernel.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, k) in krow.iter().enumerate() {
                    acc += k * values[in_base + i * stride + s];
                }
                out[out_base + j * out_stride + s] = acc;
            }
        }
    }
    (out, out_shape)
}

/// Forward Fourier transform F f(xi) = int f(x) e^{-i x.xi} dx by trapezoid
/// quadrature over the support box, sampled on the requested frequency grid.
pub fn fourier_forward(f: &GridFunction, freq: &GridSpec) -> Result<GridFunction, EuclidError> {
    fourier_impl(f, freq, -1.0, 1.0)
}

/// Inverse transform with kernel e^{+i x.xi} and prefactor (2 pi)^{-d}.
pub fn fourier_inverse(big_f: &GridFunction, space: &GridSpec) -> Result<GridFunction, EuclidError> {
    let d = big_f.dim() as i32;
    fourier_impl(big_f, space, 1.0, (2.0 * std::f64::consts::PI).powi(-d))
}

fn fourier_impl(
    f: &GridFunction,
    out_spec: &GridSpec,
    sign: f64,
    prefactor: f64,
) -> Result<GridFunction, EuclidError> {
    if out_spec.dim() != f.dim() {
        return Err(EuclidError::MalformedGrid(
            "output grid dimension mismatch".into(),
        ));
    }
    f.check_boundary_decay()?;
    let mut values = f.values.clone();
    let mut shape = f.spec.shape.clone();
    for axis in 0..f.dim() {
        let in_coords = f.spec.axis_coords(axis);
        let w = trapezoid_weights(&f.spec, axis);
        let out_coords = out_spec.axis_coords(axis);
        let (v, s) = axis_transform(&values, &shape, axis, &in_coords, &w, &out_coords, sign);
        values = v;
        shape = s;
    }
    if prefactor != 1.0 {
        for v in &mut values {
            *v *= prefactor;
        }
    }
    GridFunction::new(out_spec.clone(), values, None)
}

/// A radial function on R^d sampled on a uniform grid of radii from 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialProfile {
    pub dim: usize,
    pub radii: Vec<f64>,
    pub values: Vec<Complex64>,
    pub support: Option<f64>,
}

impl RadialProfile {
    pub fn new(
        dim: usize,
        radii: Vec<f64>,
        values: Vec<Complex64>,
        support: Option<f64>,
    ) -> Result<Self, EuclidError> {
        if radii.len() < 4 || radii.len() != values.len() {
            return Err(EuclidError::MalformedGrid("need >= 4 matching samples".into()));
        }
        if radii[0] != 0.0 {
            return Err(EuclidError::MalformedGrid("radii must start at 0".into()));
        }
        let dr = radii[1] - radii[0];
        for w in radii.windows(2) {
            if !(w[1] > w[0]) || ((w[1] - w[0]) - dr).abs() > 1e-9 * dr {
                return Err(EuclidError::MalformedGrid(
                    "radii must increase uniformly".into(),
                ));
            }
        }
        if !values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(EuclidError::MalformedGrid("non-finite sample".into()));
        }
        Ok(Self { dim, radii, values, support })
    }

    pub fn from_fn(
        dim: usize,
        r_max: f64,
        n: usize,
        support: Option<f64>,
        f: impl Fn(f64) -> Complex64,
    ) -> Result<Self, EuclidError> {
        let dr = r_max / (n - 1) as f64;
        let radii: Vec<f64> = (0..n).map(|i| i as f64 * dr).collect();
        let values = radii.iter().map(|r| f(*r)).collect();
        Self::new(dim, radii, values, support)
    }

    pub fn r_max(&self) -> f64 {
        *self.radii.last().unwrap()
    }

    pub fn dr(&self) -> f64 {
        self.radii[1] - self.radii[0]
    }

    pub fn eval(&self, r: f64) -> Complex64 {
        if r > self.r_max() {
            return Complex64::new(0.0, 0.0);
        }
        cubic_interp(&self.values, 0.0, self.dr(), r)
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Effective support radius: declared bound or the full grid.
    pub fn support_bound(&self) -> f64 {
        self.support.unwrap_or_else(|| self.r_max())
    }
}

/// An even function on a symmetric grid [-R, R] (odd sample count, so the
/// origin is a node and evenness can hold exactly).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvenProfile {
    pub r_max: f64,
    pub values: Vec<Complex64>,
}

impl EvenProfile {
    /// Build from the half grid s >= 0; values are mirrored, so the result
    /// is even bitwise.
    pub fn from_half(r_max: f64, half: &[Complex64]) -> Result<Self, EuclidError> {
        if half.len() < 4 {
            return Err(EuclidError::MalformedGrid("need >= 4 samples".into()));
        }
        let mut values = Vec::with_capacity(2 * half.len() - 1);
        values.extend(half.iter().rev());
        values.extend(half.iter().skip(1));
        Ok(Self { r_max, values })
    }

    pub fn new(r_max: f64, values: Vec<Complex64>) -> Result<Self, EuclidError> {
        if values.len() < 7 || values.len() % 2 == 0 {
            return Err(EuclidError::MalformedGrid(
                "even profile needs an odd sample count >= 7".into(),
            ));
        }
        if !(r_max > 0.0) {
            return Err(EuclidError::MalformedGrid("r_max must be positive".into()));
        }
        Ok(Self { r_max, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn ds(&self) -> f64 {
        2.0 * self.r_max / (self.values.len() - 1) as f64
    }

    pub fn coords(&self) -> Vec<f64> {
        let n = self.values.len();
        (0..n).map(|i| -self.r_max + i as f64 * self.ds()).collect()
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Maximum |g(s) - g(-s)| over the grid.
    pub fn asymmetry(&self) -> f64 {
        let n = self.values.len();
        (0..n / 2)
            .map(|i| (self.values[i] - self.values[n - 1 - i]).norm())
            .fold(0.0, f64::max)
    }

    /// The half grid s >= 0 (origin included).
    pub fn half_values(&self) -> &[Complex64] {
        &self.values[self.values.len() / 2..]
    }

    /// One-dimensional Fourier transform at lambda; for even g this is
    /// 2 int_0^R g(s) cos(lambda s) ds, real when g is real.
    pub fn fourier1(&self, lambda: f64) -> Complex64 {
        let half = self.half_values();
        let ds = self.ds();
        let w = trapezoid_rule(half.len(), ds);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, (v, wi)) in half.iter().zip(&w).enumerate() {
            let s = i as f64 * ds;
            acc += v * (2.0 * wi * (lambda * s).cos());
        }
        acc
    }
}

/// Surface area of the unit sphere S^{d-1} in R^d.
pub fn unit_sphere_area(d: usize) -> f64 {
    assert!(d >= 1);
    let half_d = d as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(half_d) / gamma_real(half_d)
}

fn gamma_real(x: f64) -> f64 {
    crate::numerics::ln_gamma_complex(Complex64::new(x, 0.0)).re.exp()
}

/// The radial Fourier kernel sigma_d(u) = int_{S^{d-1}} e^{i u cos theta} dw,
/// real and even in u. Supported for d in {1, 2, 3}.
pub fn radial_fourier_kernel(d: usize, u: f64) -> f64 {
    match d {
        1 => 2.0 * u.cos(),
        2 => 2.0 * std::f64::consts::PI * bessel_j0(u),
        3 => 4.0 * std::f64::consts::PI * sinc(u),
        _ => panic!("radial Fourier kernel implemented for d <= 3"),
    }
}

/// Radial Fourier transform F f(lambda) = int_0^R f(r) r^{d-1} sigma_d(lambda r) dr
/// computed by Simpson on the profile's own grid.
pub fn radial_fourier(f: &RadialProfile, lambda: f64) -> Complex64 {
    let dr = f.dr();
    let w = trapezoid_rule(f.values.len(), dr);
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, (v, wi)) in f.values.iter().zip(&w).enumerate() {
        let r = f.radii[i];
        acc += v * (wi * r.powi(f.dim as i32 - 1) * radial_fourier_kernel(f.dim, lambda * r));
    }
    acc
}

/// Radon transform of a radial function: s -> int over the hyperplane at
/// distance |s|, reduced to the 1-D integral
/// omega_{d-2} int_0^{u_max} f(sqrt(s^2 + u^2)) u^{d-2} du.
/// Output is even by construction (computed on s >= 0, mirrored).
pub fn radon_radial(f: &RadialProfile) -> Result<EvenProfile, EuclidError> {
    let big_r = f.r_max();
    let n_half = f.values.len();
    let ds = f.dr();
    let d = f.dim;
    let mut half = Vec::with_capacity(n_half);
    if d == 1 {
        // hyperplanes are points
        half.extend(f.values.iter().copied());
    } else {
        let omega = unit_sphere_area(d - 1);
        let (nodes, weights) = gauss_legendre(16);
        for i in 0..n_half {
            let s = i as f64 * ds;
            let u_max = (big_r * big_r - s * s).max(0.0).sqrt();
            if u_max == 0.0 {
                half.push(Complex64::new(0.0, 0.0));
                continue;
            }
            let panels = 12usize;
            let h = u_max / panels as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for p in 0..panels {
                let c = (p as f64 + 0.5) * h;
                for (x, w) in nodes.iter().zip(&weights) {
                    let u = c + 0.5 * h * x;
                    let r = (s * s + u * u).sqrt();
                    acc += f.eval(r) * (0.5 * h * w * u.powi(d as i32 - 2));
                }
            }
            half.push(acc * omega);
        }
    }
    EvenProfile::from_half(big_r, &half)
}

/// Parameters for the slice-projection inverse of the radial Radon
/// transform.
#[derive(Debug, Clone)]
pub struct RadonInverseOptions {
    /// Output grid extends to `grid_factor * l` with `n_out` samples.
    pub grid_factor: f64,
    pub n_out: usize,
    /// Spectral truncation cap.
    pub lambda_max: f64,
    /// Relative leak tolerated outside the certified support.
    pub leak_tol: f64,
}

impl Default for RadonInverseOptions {
    fn default() -> Self {
        Self { grid_factor: 1.25, n_out: 257, lambda_max: 200.0, leak_tol: 1e-6 }
    }
}

/// Inverse of the radial Radon transform via slice projection: set
/// F_d f(lambda w) = F_1 g(lambda) and invert the d-dimensional transform
/// radially. The reconstruction must stay inside the ball of radius `l`.
pub fn radon_inverse_radial(
    g: &EvenProfile,
    d: usize,
    l: f64,
    opts: &RadonInverseOptions,
) -> Result<RadialProfile, EuclidError> {
    let sup = g.sup_abs();
    let asym = g.asymmetry();
    if sup > 0.0 && asym > 1e-8 * sup {
        return Err(EuclidError::SymmetryError(asym));
    }
    // F_1 g on an adaptive lambda grid
    let r_out = opts.grid_factor * l;
    let dl = (std::f64::consts::PI / (10.0 * r_out)).min(0.05);
    let mut big_g: Vec<Complex64> = Vec::new();
    let mut peak = 0.0f64;
    let mut lambda_count = 0usize;
    loop {
        // extend in blocks until the weighted spectrum has decayed
        let block = 64;
        for _ in 0..block {
            let lambda = lambda_count as f64 * dl;
            big_g.push(g.fourier1(lambda));
            lambda_count += 1;
        }
        let tail_max = big_g[big_g.len() - block..]
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let lambda = (big_g.len() - block + j) as f64 * dl;
                v.norm() * lambda.powi(d as i32 - 1)
            })
            .fold(0.0, f64::max);
        peak = peak.max(
            big_g
                .iter()
                .enumerate()
                .map(|(j, v)| v.norm() * (j as f64 * dl).powi(d as i32 - 1))
                .fold(0.0, f64::max),
        );
        let lambda_now = lambda_count as f64 * dl;
        if (peak > 0.0 && tail_max < 1e-9 * peak) || lambda_now >= opts.lambda_max {
            break;
        }
    }
    // radial inverse transform
    let prefactor = (2.0 * std::f64::consts::PI).powi(-(d as i32));
    let w = trapezoid_rule(big_g.len(), dl);
    let n_out = opts.n_out;
    let dr = r_out / (n_out - 1) as f64;
    let mut values = Vec::with_capacity(n_out);
    for i in 0..n_out {
        let r = i as f64 * dr;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, (v, wi)) in big_g.iter().zip(&w).enumerate() {
            let lambda = j as f64 * dl;
            acc += v * (wi * lambda.powi(d as i32 - 1) * radial_fourier_kernel(d, lambda * r));
        }
        values.push(acc * prefactor);
    }
    // certify the support
    let sup_f = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if sup_f > 0.0 {
        let leak = values
            .iter()
            .enumerate()
            .filter(|(i, _)| *i as f64 * dr > l)
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max);
        if leak > opts.leak_tol * sup_f {
            return Err(EuclidError::SupportCertification { radius: l, leak, sup: sup_f });
        }
    }
    let radii: Vec<f64> = (0..n_out).map(|i| i as f64 * dr).collect();
    RadialProfile::new(d, radii, values, Some(l))
}

/// Maximum discrepancy of the slice projection identity
/// F_d f(lambda w) = F_1 (R f)(lambda) over a shared lambda grid.
pub fn slice_projection_check(
    f: &RadialProfile,
    lambda_max: f64,
    n_lambda: usize,
) -> Result<f64, EuclidError> {
    let rf = radon_radial(f)?;
    let mut worst = 0.0f64;
    for i in 0..n_lambda {
        let lambda = lambda_max * i as f64 / (n_lambda - 1) as f64;
        let lhs = radial_fourier(f, lambda);
        let rhs = rf.fourier1(lambda);
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// Frequencies inside the open cube Q(0, L) (per coordinate |v_i| < L/sqrt d),
/// spanning Phi_L(R^d).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpanSpec {
    pub l: f64,
    pub nodes: Vec<Vec<f64>>,
}

impl SpanSpec {
    pub fn new(l: f64, nodes: Vec<Vec<f64>>, dim: usize) -> Result<Self, EuclidError> {
        if nodes.is_empty() {
            return Err(EuclidError::EmptySpan);
        }
        let half_side = l / (dim as f64).sqrt();
        for node in &nodes {
            if node.len() != dim || node.iter().any(|c| c.abs() >= half_side) {
                return Err(EuclidError::NodeOutsideCube(node.clone()));
            }
        }
        Ok(Self { l, nodes })
    }
}

/// Result of projecting a target onto a span of exponentials.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpanProjection {
    pub coefficients: Vec<Complex64>,
    /// Exact grid psi-norm of the residual (the contract).
    pub residual_psi_norm: f64,
    /// Set when the system was rank-deficient and the solve was regularized.
    pub regularized: bool,
}

/// Least-squares projection of `target` onto span{ e^{i lambda_j . x} } in a
/// psi-weighted metric. The solver minimizes a weighted least-squares
/// surrogate (with Lawson reweighting toward the sup objective); the
/// reported residual is always the true grid psi-norm.
pub fn span_project(
    target: &GridFunction,
    span: &SpanSpec,
    psi: &WeightFunction,
) -> Result<SpanProjection, EuclidError> {
    if span.nodes.is_empty() {
        return Err(EuclidError::EmptySpan);
    }
    let points: Vec<(Vec<f64>, Complex64)> = target.iter_points().collect();
    let radii: Vec<f64> = points
        .iter()
        .map(|(x, _)| x.iter().map(|c| c * c).sum::<f64>().sqrt())
        .collect();
    let psi_vals: Vec<f64> = radii.iter().map(|r| psi.eval(*r)).collect();
    let rhs: Vec<Complex64> = points.iter().map(|(_, v)| *v).collect();
    let basis: Vec<Vec<Complex64>> = span
        .nodes
        .iter()
        .map(|node| {
            points
                .iter()
                .map(|(x, _)| {
                    let phase: f64 = node.iter().zip(x).map(|(a, b)| a * b).sum();
                    Complex64::from_polar(1.0, phase)
                })
                .collect()
        })
        .collect();
    let FitOutcome { coefficients, residual_weighted_sup, regularized } =
        weighted_minimax_fit(&basis, &rhs, &psi_vals);
    Ok(SpanProjection {
        coefficients,
        residual_psi_norm: residual_weighted_sup,
        regularized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn gaussian_bump_1d(n: usize) -> GridFunction {
        let spec = GridSpec::centered_cube(1, 4.0, n).unwrap();
        GridFunction::from_fn(spec, None, |x| {
            Complex64::new((-(x[0] * x[0]) / 0.32).exp(), 0.0)
        })
        .unwrap()
    }

    #[test]
    fn forward_transform_matches_analytic_gaussian() {
        // F[e^{-x^2/(2 s^2)}](xi) = s sqrt(2 pi) e^{-s^2 xi^2/2}, s^2 = 0.16
        let f = gaussian_bump_1d(257);
        let freq = GridSpec::centered_cube(1, 10.0, 101).unwrap();
        let big_f = fourier_forward(&f, &freq).unwrap();
        let s2 = 0.16;
        for (x, v) in big_f.iter_points() {
            let expect = (s2 * 2.0 * std::f64::consts::PI).sqrt() * (-s2 * x[0] * x[0] / 2.0).exp();
            assert_abs_diff_eq!(v.re, expect, epsilon = 1e-8);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_transforms_to_zero() {
        let spec = GridSpec::centered_cube(2, 1.0, 17).unwrap();
        let f = GridFunction::from_fn(spec, None, |_| Complex64::new(0.0, 0.0)).unwrap();
        let freq = GridSpec::centered_cube(2, 5.0, 9).unwrap();
        let big_f = fourier_forward(&f, &freq).unwrap();
        assert_eq!(big_f.sup_abs(), 0.0);
        let back = fourier_inverse(&big_f, &f.spec).unwrap();
        assert_eq!(back.sup_abs(), 0.0);
    }

    #[test]
    fn support_violation_detected() {
        let spec = GridSpec::centered_cube(1, 1.0, 33).unwrap();
        let f = GridFunction::from_fn(spec, None, |_| Complex64::new(1.0, 0.0)).unwrap();
        let freq = GridSpec::centered_cube(1, 5.0, 9).unwrap();
        assert!(matches!(
            fourier_forward(&f, &freq),
            Err(EuclidError::SupportViolation { .. })
        ));
    }

    #[test]
    fn real_even_input_gives_real_even_output() {
        let f = gaussian_bump_1d(129);
        let freq = GridSpec::centered_cube(1, 8.0, 65).unwrap();
        let big_f = fourier_forward(&f, &freq).unwrap();
        let n = big_f.values.len();
        for i in 0..n {
            assert_abs_diff_eq!(big_f.values[i].im, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(
                big_f.values[i].re,
                big_f.values[n - 1 - i].re,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn shift_becomes_modulation() {
        let spec = GridSpec::centered_cube(1, 5.0, 301).unwrap();
        let bump = |x: f64| Complex64::new((-(x * x) / 0.25).exp(), 0.0);
        let a = 0.7;
        let f0 = GridFunction::from_fn(spec.clone(), None, |x| bump(x[0])).unwrap();
        let f1 = GridFunction::from_fn(spec, None, |x| bump(x[0] - a)).unwrap();
        let freq = GridSpec::centered_cube(1, 6.0, 41).unwrap();
        let big0 = fourier_forward(&f0, &freq).unwrap();
        let big1 = fourier_forward(&f1, &freq).unwrap();
        for ((xi, v1), (_, v0)) in big1.iter_points().zip(big0.iter_points()) {
            let expect = v0 * Complex64::from_polar(1.0, -a * xi[0]);
            assert!((v1 - expect).norm() < 1e-9);
        }
    }

    #[test]
    fn roundtrip_on_smooth_bump() {
        let f = gaussian_bump_1d(257);
        let freq = GridSpec::centered_cube(1, 24.0, 513).unwrap();
        let big_f = fourier_forward(&f, &freq).unwrap();
        let back = fourier_inverse(&big_f, &f.spec).unwrap();
        let err = f
            .values
            .iter()
            .zip(&back.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "roundtrip error {err}");
    }

    #[test]
    fn linearity_of_forward_transform() {
        let spec = GridSpec::centered_cube(1, 3.0, 101).unwrap();
        let f = GridFunction::from_fn(spec.clone(), None, |x| {
            Complex64::new((-(x[0] * x[0]) * 4.0).exp(), 0.0)
        })
        .unwrap();
        let g = GridFunction::from_fn(spec.clone(), None, |x| {
            Complex64::new(0.0, x[0] * (-(x[0] * x[0]) * 4.0).exp())
        })
        .unwrap();
        let alpha = Complex64::new(1.3, -0.4);
        let combo = GridFunction::new(
            spec,
            f.values
                .iter()
                .zip(&g.values)
                .map(|(a, b)| alpha * a + b)
                .collect(),
            None,
        )
        .unwrap();
        let freq = GridSpec::centered_cube(1, 5.0, 21).unwrap();
        let tf = fourier_forward(&f, &freq).unwrap();
        let tg = fourier_forward(&g, &freq).unwrap();
        let tc = fourier_forward(&combo, &freq).unwrap();
        for i in 0..tc.values.len() {
            let expect = alpha * tf.values[i] + tg.values[i];
            assert!((tc.values[i] - expect).norm() < 1e-12 * (1.0 + expect.norm()));
        }
    }

    #[test]
    fn radon_of_radius_one_bump_vanishes_outside() {
        // smooth bump supported inside r < 1, d = 3
        let f = RadialProfile::from_fn(3, 1.2, 241, Some(1.0), |r| {
            if r < 1.0 {
                Complex64::new((-1.0 / (1.0 - r * r)).exp(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap();
        let g = radon_radial(&f).unwrap();
        let coords = g.coords();
        let sup = g.sup_abs();
        for (s, v) in coords.iter().zip(&g.values) {
            if s.abs() >= 1.0 {
                assert!(v.norm() < 1e-10 * sup, "leak at s = {s}");
            }
        }
        assert_eq!(g.asymmetry(), 0.0); // even bitwise
    }

    #[test]
    fn radon_d1_is_reflection() {
        let f = RadialProfile::from_fn(1, 2.0, 101, None, |r| {
            Complex64::new((-(r * r) * 2.0).exp(), 0.0)
        })
        .unwrap();
        let g = radon_radial(&f).unwrap();
        let coords = g.coords();
        for (s, v) in coords.iter().zip(&g.values) {
            let expect = (-(s * s) * 2.0).exp();
            assert_abs_diff_eq!(v.re, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn radon_inverse_d1_is_identity() {
        let g_fun = |s: f64| Complex64::new((-(s * s) / 0.18).exp(), 0.0);
        let half: Vec<Complex64> = (0..161).map(|i| g_fun(i as f64 * 2.0 / 160.0)).collect();
        let g = EvenProfile::from_half(2.0, &half).unwrap();
        let f = radon_inverse_radial(&g, 1, 2.0, &RadonInverseOptions::default()).unwrap();
        for (r, v) in f.radii.iter().zip(&f.values) {
            if *r <= 2.0 {
                assert!((v - g_fun(*r)).norm() < 1e-6, "at r = {r}");
            }
        }
    }

    #[test]
    fn radon_inverse_rejects_odd_input() {
        let mut values: Vec<Complex64> =
            (0..41).map(|i| Complex64::new((i as f64 - 20.0) / 20.0, 0.0)).collect();
        values[0] = Complex64::new(-1.0, 0.0);
        let g = EvenProfile::new(1.0, values).unwrap();
        assert!(matches!(
            radon_inverse_radial(&g, 3, 1.0, &RadonInverseOptions::default()),
            Err(EuclidError::SymmetryError(_))
        ));
    }

    #[test]
    fn slice_projection_scales_linearly() {
        let f = RadialProfile::from_fn(3, 1.5, 161, None, |r| {
            Complex64::new((-(r * r) / 0.2).exp(), 0.0)
        })
        .unwrap();
        let d0 = slice_projection_check(&f, 15.0, 60).unwrap();
        let scaled = RadialProfile::new(
            3,
            f.radii.clone(),
            f.values.iter().map(|v| v * 3.0).collect(),
            None,
        )
        .unwrap();
        let d1 = slice_projection_check(&scaled, 15.0, 60).unwrap();
        assert_abs_diff_eq!(d1, 3.0 * d0, epsilon = 1e-10 + d0 * 1e-6);
        let zero = RadialProfile::from_fn(3, 1.5, 161, None, |_| Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(slice_projection_check(&zero, 15.0, 60).unwrap(), 0.0);
    }

    #[test]
    fn span_member_has_zero_residual() {
        let spec = GridSpec::centered_cube(1, 3.0, 201).unwrap();
        let lam = 0.8;
        let target =
            GridFunction::from_fn(spec, None, |x| Complex64::from_polar(1.0, lam * x[0])).unwrap();
        let span = SpanSpec::new(2.0, vec![vec![lam], vec![0.3]], 1).unwrap();
        let psi = WeightFunction::power(1.0).unwrap();
        let p = span_project(&target, &span, &psi).unwrap();
        assert!(p.residual_psi_norm < 1e-10, "residual {}", p.residual_psi_norm);
    }

    #[test]
    fn zero_target_gives_zero_coefficients() {
        let spec = GridSpec::centered_cube(1, 2.0, 101).unwrap();
        let target = GridFunction::from_fn(spec, None, |_| Complex64::new(0.0, 0.0)).unwrap();
        let span = SpanSpec::new(1.0, vec![vec![0.2], vec![0.5]], 1).unwrap();
        let psi = WeightFunction::power(1.0).unwrap();
        let p = span_project(&target, &span, &psi).unwrap();
        assert!(p.coefficients.iter().all(|c| c.norm() < 1e-12));
        assert_eq!(p.residual_psi_norm, 0.0);
    }

    #[test]
    fn span_nodes_validated_against_cube() {
        assert!(matches!(
            SpanSpec::new(1.0, vec![vec![0.9, 0.0]], 2),
            Err(EuclidError::NodeOutsideCube(_))
        ));
        assert!(SpanSpec::new(1.0, vec![vec![0.5, 0.5]], 2).is_ok());
        assert!(matches!(SpanSpec::new(1.0, vec![], 2), Err(EuclidError::EmptySpan)));
    }

    #[test]
    fn grid_function_json_roundtrip() {
        let spec = GridSpec::centered_cube(2, 1.0, 5).unwrap();
        let f = GridFunction::from_fn(spec, None, |x| Complex64::new(x[0], x[1])).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"box\""));
        let back: GridFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(f, back);
    }
}
