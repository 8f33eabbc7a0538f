//! The two branches of the weighted-approximation dichotomy, assembled.
//!
//! For a weight `psi` with divergent integral `int_1^inf psi(r)/r^2 dr`,
//! spherical spans over points of a ball are dense in the psi-weighted sup
//! topology; this module makes that quantitative ([`phi_span_project`]) and
//! turns it into the energy bound that forces transforms vanishing on a ball
//! to vanish everywhere ([`vanishing_energy_bound`]). For a convergent
//! weight, the opposite happens: a nonzero compactly supported function whose
//! transform decays like `e^{-psi}` exists, and [`ingham_witness`] /
//! [`witness_on_space`] construct one and certify it numerically.
//!
//! # Example
//!
//! ```
//! use levlab::dichotomy::{ingham_witness, witness_spectrum};
//! use levlab::weights::WeightFunction;
//!
//! let psi = WeightFunction::power(0.5)?; // convergent: int sqrt(r)/r^2 dr < inf
//! let w = ingham_witness(&psi, 2.0)?;
//! assert!(w.support_radius <= 2.0 * 1.25);
//! assert!(w.nontriviality > 1e-6);
//! // the certified decay |F(xi)| <= C e^{-psi(xi)} holds at a fresh point
//! let xi = 123.0;
//! let bound = w.decay_constant * (-psi.eval(xi)).exp();
//! assert!(witness_spectrum(&w.params.a, w.params.smooth_type, xi).abs() <= bound);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

use crate::dyadic::{
    approximate, DyadicError, DyadicScheme, KernelFunction, LipschitzBound, RadonMeasureRep,
};
use crate::euclid::{
    radial_fourier, radon_inverse_radial, slice_projection_check, EuclidError, EvenProfile,
    RadialProfile, RadonInverseOptions,
};
use crate::hyperbolic::{
    sft_inverse, BiinvariantFunction, HyperbolicError, HyperbolicModel, SpectralFunction,
};
use crate::lsq::{weighted_minimax_fit, FitOutcome};
use crate::numerics::{sinc, trapezoid_weights};
use crate::weights::{
    psi_norm, Verdict, WeightError, WeightFunction, DEFAULT_HORIZON, DEFAULT_THRESHOLD,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Schema tag stamped into every serialized report from this module.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum DichotomyError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("certificate '{certificate}' failed: {detail}")]
    CertificationFailure { certificate: String, detail: String },
    #[error(transparent)]
    Hyperbolic(#[from] HyperbolicError),
    #[error(transparent)]
    Euclid(#[from] EuclidError),
    #[error(transparent)]
    Dyadic(#[from] DyadicError),
    #[error(transparent)]
    Weight(#[from] WeightError),
}

/// A span of spherical functions `lambda -> phi_lambda(t_j)` indexed by
/// radial positions `t_j` strictly inside `[0, l)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhiSpan {
    pub model: HyperbolicModel,
    pub l: f64,
    pub points: Vec<f64>,
    /// Optional warm-start / result coefficients, aligned with `points`.
    /// When a refined span carries the coarse span's coefficients (zero
    /// padded), the projector never reports a worse residual than the coarse
    /// one achieved.
    pub coefficients: Option<Vec<Complex64>>,
}

impl PhiSpan {
    pub fn new(
        model: HyperbolicModel,
        l: f64,
        points: Vec<f64>,
    ) -> Result<Self, DichotomyError> {
        if !(l > 0.0) || points.is_empty() {
            return Err(DichotomyError::Precondition(
                "need l > 0 and a nonempty point set".into(),
            ));
        }
        if points.iter().any(|t| !(*t >= 0.0 && *t < l)) {
            return Err(DichotomyError::Precondition(format!(
                "span points must lie in [0, {l})"
            )));
        }
        Ok(Self { model, l, points, coefficients: None })
    }

    /// The standard nested family: `t_j = l sin^2(pi j / (2n))`, j < n.
    /// Doubling `n` keeps every old point (even j), so residuals along the
    /// ladder are monotone by construction.
    pub fn standard(model: HyperbolicModel, l: f64, n: usize) -> Result<Self, DichotomyError> {
        let points = (0..n)
            .map(|j| l * (std::f64::consts::PI * j as f64 / (2.0 * n as f64)).sin().powi(2))
            .collect();
        Self::new(model, l, points)
    }

    /// Next rung of the standard ladder: doubled point count, coefficients
    /// of `self` carried over (zero padded) as a warm start.
    pub fn refined(&self) -> Result<Self, DichotomyError> {
        let n = self.points.len();
        let mut next = Self::standard(self.model, self.l, 2 * n)?;
        if let Some(c) = &self.coefficients {
            // old point j sits at new index 2j
            let mut warm = vec![Complex64::new(0.0, 0.0); 2 * n];
            for (j, cj) in c.iter().enumerate() {
                warm[2 * j] = *cj;
            }
            next.coefficients = Some(warm);
        }
        Ok(next)
    }
}

/// How a target was projected onto the span.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum ProjectionPipeline {
    LeastSquares,
    Constructive {
        /// Dilation factor in (0, 1): the target is replaced by
        /// `lambda -> target(nu lambda)` first.
        nu: f64,
        /// Scale of the smoothing multiplier `cutoff(h lambda)`.
        h: f64,
        /// Identifier of the smoothing multiplier used.
        cutoff: String,
        /// Dyadic level at which the node measure was extracted.
        dyadic_level: u32,
    },
}

/// Certified outcome of projecting a spectral target onto a [`PhiSpan`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityReport {
    pub schema_version: u32,
    pub target: String,
    /// True psi-weighted sup of `target - sum_j c_j phi_.(t_j)` on the grid.
    pub residual: f64,
    pub node_count: usize,
    pub pipeline: ProjectionPipeline,
    /// Constructive mode: whether the chained error target (4 eps) was met.
    /// Least-squares mode reports true unconditionally.
    pub converged: bool,
}

/// Projection mode for [`phi_span_project`].
#[derive(Debug, Clone, Copy)]
pub enum ProjectionMode {
    /// Weighted least squares (Lawson-reweighted toward minimax) on the
    /// supplied span points.
    LeastSquares,
    /// The constructive density pipeline: dilation, smoothing multiplier,
    /// certified dyadic discretization of the resulting ball measure. The
    /// chained error target is `4 * eps`.
    Constructive { eps: f64 },
}

fn spectral_psi_norm(
    values: &[Complex64],
    dl: f64,
    psi: &WeightFunction,
) -> Result<f64, WeightError> {
    psi_norm(
        values.iter().enumerate().map(|(i, v)| (i as f64 * dl, v.norm())),
        psi,
    )
}

/// Evaluate `sum_j c_j phi_lambda(t_j)` on the target's lambda grid.
fn span_sum_on_grid(
    model: &HyperbolicModel,
    points: &[f64],
    coefficients: &[Complex64],
    target: &SpectralFunction,
) -> Vec<Complex64> {
    use rayon::prelude::*;
    (0..target.values.len())
        .into_par_iter()
        .map(|m| {
            let lam = Complex64::new(target.lambda(m), 0.0);
            points
                .iter()
                .zip(coefficients)
                .map(|(t, c)| c * model.phi_lambda(lam, *t))
                .sum()
        })
        .collect()
}

/// Project `target` onto the span in the psi-weighted sup metric.
///
/// Returns the certified report together with the span carrying the fitted
/// coefficients. In both modes the reported residual is the true grid
/// psi-norm of the defect; constructive mode additionally records the four
/// pipeline parameters, and signals failure to reach its `4 eps` budget
/// through `converged = false` rather than an error.
pub fn phi_span_project(
    target: &SpectralFunction,
    span: &PhiSpan,
    psi: &WeightFunction,
    mode: ProjectionMode,
) -> Result<(DensityReport, PhiSpan), DichotomyError> {
    match mode {
        ProjectionMode::LeastSquares => project_least_squares(target, span, psi),
        ProjectionMode::Constructive { eps } => project_constructive(target, span, psi, eps),
    }
}

fn project_least_squares(
    target: &SpectralFunction,
    span: &PhiSpan,
    psi: &WeightFunction,
) -> Result<(DensityReport, PhiSpan), DichotomyError> {
    use rayon::prelude::*;
    let model = span.model;
    let m = target.values.len();
    let psi_vals: Vec<f64> = (0..m).map(|i| psi.eval(target.lambda(i))).collect();
    let basis: Vec<Vec<Complex64>> = span
        .points
        .par_iter()
        .map(|t| {
            (0..m)
                .map(|i| model.phi_lambda(Complex64::new(target.lambda(i), 0.0), *t))
                .collect()
        })
        .collect();
    let FitOutcome { coefficients, residual_weighted_sup, .. } =
        weighted_minimax_fit(&basis, &target.values, &psi_vals);
    let (best_coef, best_res) = match &span.coefficients {
        // a warm start is an admissible candidate: keep whichever of the
        // fresh fit and the carried-over coefficients truly does better
        Some(warm) if warm.len() == span.points.len() => {
            let warm_res = (0..m)
                .map(|i| {
                    let u: Complex64 = basis
                        .iter()
                        .zip(warm)
                        .map(|(b, c)| c * b[i])
                        .sum();
                    (target.values[i] - u).norm() * (-psi_vals[i]).exp()
                })
                .fold(0.0, f64::max);
            if warm_res < residual_weighted_sup {
                (warm.clone(), warm_res)
            } else {
                (coefficients, residual_weighted_sup)
            }
        }
        _ => (coefficients, residual_weighted_sup),
    };
    let mut out = span.clone();
    out.coefficients = Some(best_coef);
    let report = DensityReport {
        schema_version: SCHEMA_VERSION,
        target: format!("spectral[0,{}]x{}", target.lambda_max, m),
        residual: best_res,
        node_count: span.points.len(),
        pipeline: ProjectionPipeline::LeastSquares,
        converged: true,
    };
    Ok((report, out))
}

/// The smoothing multiplier: the transform of the unit bump
/// `e^{-1/(1-x^2)}` on `[-1, 1]`, normalized to 1 at 0 — Paley-Wiener type
/// exactly 1 with sub-exponential (`~e^{-c sqrt(xi)}`) decay, tabulated once
/// and interpolated. The fast decay is what lets the smoothed spectral data
/// pass the inverse transform's truncation check at a moderate horizon.
fn smoothing_cutoff(xi: f64) -> f64 {
    use std::sync::OnceLock;
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    const STEP: f64 = 0.01;
    const MAX: f64 = 300.0;
    let table = TABLE.get_or_init(|| {
        use rayon::prelude::*;
        let n_half = 2001usize;
        let dx = 1.0 / (n_half - 1) as f64;
        let w = trapezoid_weights(n_half, dx);
        let b: Vec<f64> = (0..n_half)
            .map(|i| {
                let x = i as f64 * dx;
                if x < 1.0 { (-1.0 / (1.0 - x * x)).exp() } else { 0.0 }
            })
            .collect();
        let b0: f64 = b.iter().zip(&w).map(|(v, wi)| v * wi).sum();
        let n = (MAX / STEP) as usize + 2;
        (0..n)
            .into_par_iter()
            .map(|j| {
                let xi = j as f64 * STEP;
                let s: f64 = b
                    .iter()
                    .zip(&w)
                    .enumerate()
                    .map(|(i, (v, wi))| v * wi * ((i as f64 * dx) * xi).cos())
                    .sum();
                s / b0
            })
            .collect()
    });
    let xi = xi.abs();
    if xi >= MAX {
        return 0.0; // below 1e-30 out here
    }
    let u = xi / STEP;
    let j = u.floor() as usize;
    let t = u - j as f64;
    table[j] * (1.0 - t) + table[j + 1] * t
}
const CUTOFF_ID: &str = "unit-bump-transform";

fn project_constructive(
    target: &SpectralFunction,
    span: &PhiSpan,
    psi: &WeightFunction,
    eps: f64,
) -> Result<(DensityReport, PhiSpan), DichotomyError> {
    if !(eps > 0.0) {
        return Err(DichotomyError::Precondition("eps must be positive".into()));
    }
    let model = span.model;
    let l = span.l;
    let dl = target.dl();
    let m = target.values.len();

    // Stage 1: dilation. Find nu in (0, 1) with |target - target(nu .)|
    // small in psi-norm; start aggressive (small nu leaves a large
    // smoothing budget) and back off toward 1.
    let mut stage = None;
    for k in 0..8 {
        let nu = 1.0 - 0.4 * 0.5f64.powi(k);
        let dilated: Vec<Complex64> =
            (0..m).map(|i| target.eval(nu * target.lambda(i))).collect();
        let err = psi_norm(
            (0..m).map(|i| (target.lambda(i), (target.values[i] - dilated[i]).norm())),
            psi,
        )?;
        if err <= eps {
            stage = Some((nu, dilated));
            break;
        }
    }
    let Some((nu, dilated)) = stage else {
        // no admissible dilation at this eps: report the trivial defect
        let res = spectral_psi_norm(&target.values, dl, psi)?;
        let report = DensityReport {
            schema_version: SCHEMA_VERSION,
            target: format!("spectral[0,{}]x{}", target.lambda_max, m),
            residual: res,
            node_count: 0,
            pipeline: ProjectionPipeline::Constructive {
                nu: f64::NAN,
                h: f64::NAN,
                cutoff: CUTOFF_ID.into(),
                dyadic_level: 0,
            },
            converged: false,
        };
        return Ok((report, span.clone()));
    };

    // Stage 2: smoothing multiplier of Paley-Wiener type h, with h small
    // enough that the product keeps exponential type nu l + h < l.
    let h_cap = 0.9 * l * (1.0 - nu);
    let mut h = h_cap;
    let mut smoothed = Vec::new();
    let mut ok = false;
    for _ in 0..20 {
        smoothed = (0..m)
            .map(|i| dilated[i] * smoothing_cutoff(h * target.lambda(i)))
            .collect::<Vec<_>>();
        let err = psi_norm(
            (0..m).map(|i| (target.lambda(i), (dilated[i] - smoothed[i]).norm())),
            psi,
        )?;
        if err <= eps {
            ok = true;
            break;
        }
        h *= 0.5;
    }
    if !ok {
        let res = spectral_psi_norm(&target.values, dl, psi)?;
        let report = DensityReport {
            schema_version: SCHEMA_VERSION,
            target: format!("spectral[0,{}]x{}", target.lambda_max, m),
            residual: res,
            node_count: 0,
            pipeline: ProjectionPipeline::Constructive {
                nu,
                h,
                cutoff: CUTOFF_ID.into(),
                dyadic_level: 0,
            },
            converged: false,
        };
        return Ok((report, span.clone()));
    }

    // Stage 3: the smoothed target is the transform of a function supported
    // in the ball of radius nu l + h; recover it and hand the measure
    // F(|y|) J(|y|) dy / 2 on (-l, l) to the certified dyadic engine with
    // the spherical kernel. The engine's uniform certificate is also a
    // psi-norm certificate because psi >= 0.
    let support = (nu * l + h).min(l * (1.0 - 1e-9));
    let g1 = SpectralFunction::new(target.lambda_max, smoothed.clone())?;
    let n_t = ((l / 0.01).ceil() as usize + 1).max(64);
    let big_f = sft_inverse(&model, &g1, l, n_t)?;
    let big_f = Arc::new(big_f);
    let f_for_density = Arc::clone(&big_f);
    let measure = RadonMeasureRep::density(1, l, Some(support), move |y: &[f64]| {
        let t = y[0].abs();
        f_for_density.eval(t) * (0.5 * model.volume_density(t))
    })?;
    let kernel = KernelFunction::new(
        move |lambda, y| model.phi_lambda(Complex64::new(lambda, 0.0), y[0].abs()),
        1.0,
        LipschitzBound::FiniteDifference { safety: 2.0 },
    );
    // probe the Lipschitz scale across the grid, including its endpoints
    let probes: Vec<f64> = (0..9).map(|k| target.lambda_max * k as f64 / 8.0).collect();
    let scheme = DyadicScheme { eps, ..Default::default() };
    let approx = approximate(&measure, &kernel, &probes, &scheme)?;
    let level = approx.nodes.level;

    // collapse the +-y node pairs onto radial positions
    let mut radial: std::collections::BTreeMap<u64, (f64, Complex64)> =
        std::collections::BTreeMap::new();
    for (node, w) in approx.nodes.nodes.iter().zip(&approx.nodes.weights) {
        let t = node[0].abs();
        let key = (t / approx.nodes.l * 1e15) as u64;
        let e = radial.entry(key).or_insert((t, Complex64::new(0.0, 0.0)));
        e.1 += w;
    }
    let (points, coefficients): (Vec<f64>, Vec<Complex64>) = radial.values().cloned().unzip();

    // the reported residual is the measured truth, not the chained bound
    let u = span_sum_on_grid(&model, &points, &coefficients, target);
    let residual = psi_norm(
        (0..m).map(|i| (target.lambda(i), (target.values[i] - u[i]).norm())),
        psi,
    )?;

    let out = PhiSpan {
        model,
        l,
        points,
        coefficients: Some(coefficients),
    };
    let report = DensityReport {
        schema_version: SCHEMA_VERSION,
        target: format!("spectral[0,{}]x{}", target.lambda_max, m),
        residual,
        node_count: out.points.len(),
        pipeline: ProjectionPipeline::Constructive {
            nu,
            h,
            cutoff: CUTOFF_ID.into(),
            dyadic_level: level,
        },
        converged: residual <= 4.0 * eps,
    };
    Ok((report, out))
}

/// The quantitative vanishing chain for one transform and one span.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergyBound {
    pub schema_version: u32,
    /// `int_0^Lambda |fhat|^2 |c|^{-2} dlambda`.
    pub energy: f64,
    /// psi-norm of `conj(fhat) - u` with `u` the span projection.
    pub residual: f64,
    /// `int_0^Lambda |fhat| e^{psi} |c|^{-2} dlambda`.
    pub weighted_mass: f64,
    /// `|int_0^Lambda fhat u |c|^{-2} dlambda|`, evaluated spectrally.
    pub pairing: f64,
    /// The same pairing through the inversion identity
    /// `2 pi |sum_j c_j f(t_j)|`, when the time-domain function is supplied.
    /// Vanishing of `f` on the ball forces it to zero exactly.
    pub pairing_time_domain: Option<f64>,
    /// Floating-point slack admitted in the asserted chain.
    pub slack: f64,
    pub node_count: usize,
    /// Edge-to-peak ratio of the weighted integrand `|fhat| e^psi |c|^{-2}`.
    /// A ratio that refuses to decay as the horizon grows is the numerical
    /// signature of the weighted-mass hypothesis failing — which is exactly
    /// what drives the vanishing argument for functions that are zero on the
    /// ball.
    pub weighted_tail_ratio: f64,
}

/// Bound the spectral energy of `fhat` through the span:
/// `energy <= residual * weighted_mass + pairing + slack`.
///
/// All four quantities are evaluated with one shared positive quadrature
/// rule on the grid of `fhat`, which makes the chain a pointwise-triangle-
/// inequality identity there — it is asserted, not sampled. Supplying the
/// time-domain `f` additionally reports the pairing in its
/// `2 pi sum_j c_j f(t_j)` form; for `f` vanishing on the ball of radius
/// `span.l` that form is zero up to quadrature error.
pub fn vanishing_energy_bound(
    fhat: &SpectralFunction,
    span: &PhiSpan,
    psi: &WeightFunction,
    f: Option<&BiinvariantFunction>,
) -> Result<(EnergyBound, PhiSpan), DichotomyError> {
    let model = span.model;
    let m = fhat.values.len();
    let dl = fhat.dl();
    let w = trapezoid_weights(m, dl);
    let rho_density: Vec<f64> = (0..m).map(|i| model.c_density(fhat.lambda(i))).collect();

    let weighted_mass: f64 = (0..m)
        .map(|i| w[i] * fhat.values[i].norm() * psi.eval(fhat.lambda(i)).exp() * rho_density[i])
        .sum();
    if !weighted_mass.is_finite() {
        return Err(DichotomyError::HypothesisViolation(
            "weighted mass int |fhat| e^psi |c|^-2 is not finite on the grid".into(),
        ));
    }
    // non-decay of the weighted integrand at the edge is reported, not
    // refused: for functions vanishing on the ball it is the expected
    // failure of the weighted-mass hypothesis
    let weighted_tail: Vec<f64> = (0..m)
        .map(|i| fhat.values[i].norm() * psi.eval(fhat.lambda(i)).exp() * rho_density[i])
        .collect();
    let peak = weighted_tail.iter().cloned().fold(0.0, f64::max);
    let tail = weighted_tail[m - (m / 50).max(2)..].iter().cloned().fold(0.0, f64::max);
    let weighted_tail_ratio = if peak > 0.0 { tail / peak } else { 0.0 };

    let energy: f64 = (0..m).map(|i| w[i] * fhat.values[i].norm_sqr() * rho_density[i]).sum();

    // project the conjugate transform onto the span
    let conj_target = SpectralFunction::new(
        fhat.lambda_max,
        fhat.values.iter().map(|v| v.conj()).collect(),
    )?;
    let (report, fitted) =
        phi_span_project(&conj_target, span, psi, ProjectionMode::LeastSquares)?;
    let coefficients = fitted.coefficients.clone().expect("least-squares always sets coefficients");
    let u = span_sum_on_grid(&model, &fitted.points, &coefficients, &conj_target);

    let pairing_c: Complex64 = (0..m)
        .map(|i| fhat.values[i] * u[i] * (w[i] * rho_density[i]))
        .sum();
    let pairing = pairing_c.norm();

    let pairing_time_domain = f.map(|f| {
        let s: Complex64 = fitted
            .points
            .iter()
            .zip(&coefficients)
            .map(|(t, c)| c * f.eval(*t))
            .sum();
        2.0 * std::f64::consts::PI * s.norm()
    });

    // energy = |sum w fhat conj(fhat) rho|
    //       <= |sum w fhat (conj(fhat) - u) rho| + |sum w fhat u rho|
    //       <= residual * weighted_mass + pairing,
    // exactly on the grid, because residual >= |conj(fhat) - u| e^{-psi}
    // pointwise and the same w, rho appear in every sum. The slack only
    // absorbs floating-point rounding.
    let slack = 1e-9 * (energy + report.residual * weighted_mass + pairing) + 1e-300;
    assert!(
        energy <= report.residual * weighted_mass + pairing + slack,
        "energy chain violated: {energy} > {} + {pairing} + {slack}",
        report.residual * weighted_mass
    );

    let bound = EnergyBound {
        schema_version: SCHEMA_VERSION,
        energy,
        residual: report.residual,
        weighted_mass,
        pairing,
        pairing_time_domain,
        slack,
        node_count: report.node_count,
        weighted_tail_ratio,
    };
    Ok((bound, fitted))
}

/// Which space a witness lives on.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "param")]
pub enum WitnessDomain {
    RealLine,
    EuclideanRadial(usize),
    Hyperbolic(usize),
}

/// The function payload of a witness, per domain.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessPayload {
    Line(EvenProfile),
    EuclideanRadial(RadialProfile),
    Hyperbolic(BiinvariantFunction),
}

/// Full parameter set of a witness construction, embedded for replay.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessParams {
    pub psi: String,
    pub l: f64,
    /// Sine-product scales; their sum is the product's exponential type.
    pub a: Vec<f64>,
    /// Paley-Wiener type of the extra smooth factor.
    pub smooth_type: f64,
    pub xi_max: f64,
}

/// A certified nontrivial compactly supported function whose transform
/// decays like `e^{-psi}`.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessFunction {
    pub schema_version: u32,
    pub domain: WitnessDomain,
    pub payload: WitnessPayload,
    /// Constant in the certified bound `|F(xi)| <= C e^{-psi(xi)}` on
    /// `[1, xi_max]`.
    pub decay_constant: f64,
    /// True when the constant had to be fitted globally rather than near
    /// xi = 1.
    pub decay_adjusted: bool,
    /// Sampled max of `|F(xi)| e^{psi(xi)}` over the certificate range.
    pub decay_sampled_max: f64,
    /// Radius outside which the payload is certified (numerically) to
    /// vanish.
    pub support_radius: f64,
    /// Relative mass of the payload outside `support_radius`.
    pub support_leak: f64,
    /// `sup |f|` relative to the construction's natural scale; must exceed
    /// 1e-6 for the witness to count as nontrivial.
    pub nontriviality: f64,
    /// Weighted spectral mass `int |fhat| e^psi |c|^{-2}` with its relative
    /// change under the last doubling of the spectral horizon (hyperbolic
    /// witnesses only).
    pub weighted_mass: Option<(f64, f64)>,
    pub params: WitnessParams,
}

/// Evaluate the spectral witness product `F(xi)` for the given scales.
pub fn witness_spectrum(a: &[f64], smooth_type: f64, xi: f64) -> f64 {
    let mut p = sinc(smooth_type * xi / 4.0).powi(2);
    for ak in a {
        p *= sinc(ak * xi);
    }
    p
}

fn dyadic_scales(psi: &WeightFunction, budget: f64) -> Vec<f64> {
    // a_k proportional to psi(2^k)/2^k: the condensation terms, whose sum is
    // finite exactly in the convergent case
    let raw: Vec<f64> = (0..=60)
        .map(|k| {
            let r = 2f64.powi(k);
            psi.eval(r) / r
        })
        .collect();
    let total: f64 = raw.iter().sum();
    raw.iter()
        .map(|t| budget * t / total)
        .filter(|a| *a >= 1e-12)
        .collect()
}

const XI_MAX: f64 = 1e4;

/// Construct and certify a real-line witness for a convergent weight:
/// `F(xi) = sinc^2(l xi / 4) * prod_k sinc(a_k xi)` where the scales `a_k`
/// carry the condensation budget `l/2` plus six small guard factors (total
/// exponential type below `l`), inverse transformed onto
/// `[-1.25 l, 1.25 l]`.
pub fn ingham_witness(
    psi: &WeightFunction,
    l: f64,
) -> Result<WitnessFunction, DichotomyError> {
    if !(l > 0.0) {
        return Err(DichotomyError::Precondition("l must be positive".into()));
    }
    let verdict = psi.classify_levinson(DEFAULT_HORIZON, DEFAULT_THRESHOLD)?;
    if verdict.verdict != Verdict::Convergent {
        return Err(DichotomyError::Precondition(format!(
            "witness construction needs a convergent weight, classifier says {:?}",
            verdict.verdict
        )));
    }

    // type budget: the sine product carries l/2 + 6 l/64, the smooth
    // factor l/4; the total stays below l so the support certificate has
    // genuine room
    let smooth_type = l / 2.0;
    let mut last_violation: Option<(f64, f64)> = None;
    for attempt in 0..3 {
        // retries shift the dyadic profile toward larger k, concentrating
        // the budget on the slowly-decaying tail scales
        let shifted = {
            let p = psi.clone();
            let shift = 2f64.powi(4 * attempt);
            WeightFunction::custom("shifted", move |r| p.eval(r * shift) / shift)
        };
        let mut a = dyadic_scales(&shifted, l / 2.0);
        // guard factors: six extra sinc scales of size l/64 cost under a
        // tenth of the type budget but contribute xi^{-6} beyond
        // xi ~ 64/l, so lifting the witness to a d-dimensional space
        // (spectral density growing like a polynomial) keeps the weighted
        // mass int |F| e^psi |c|^{-2} convergent
        a.extend(std::iter::repeat(l / 64.0).take(6));
        match certify_line_witness(psi, l, &a, smooth_type) {
            Ok(w) => return Ok(w),
            Err(DichotomyError::CertificationFailure { detail, .. }) => {
                let xi: f64 = detail
                    .split_whitespace()
                    .find_map(|t| t.parse().ok())
                    .unwrap_or(f64::NAN);
                last_violation = Some((xi, f64::NAN));
                continue;
            }
            Err(e) => return Err(e),
        }
    }
    let (xi, _) = last_violation.unwrap_or((f64::NAN, f64::NAN));
    Err(DichotomyError::CertificationFailure {
        certificate: "decay".into(),
        detail: format!("|F(xi)| <= C e^-psi(xi) fails near xi = {xi} after retries"),
    })
}

fn certify_line_witness(
    psi: &WeightFunction,
    l: f64,
    a: &[f64],
    smooth_type: f64,
) -> Result<WitnessFunction, DichotomyError> {
    // decay certificate on [1, xi_max], log-spaced samples
    let n_cert = 4000;
    let mut sup_local = 0.0f64; // |F| e^psi near xi = 1 (the fitting window)
    let mut samples = Vec::with_capacity(n_cert);
    for i in 0..n_cert {
        let xi = 10f64.powf(4.0 * i as f64 / (n_cert - 1) as f64);
        let v = witness_spectrum(a, smooth_type, xi).abs() * psi.eval(xi).exp();
        if xi <= 10.0 {
            sup_local = sup_local.max(v);
        }
        samples.push((xi, v));
    }
    let sup_global = samples.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    let mut c = 1.05 * sup_local;
    let mut adjusted = false;
    if sup_global > c {
        // the local fit does not dominate: fall back to the global sup and
        // flag the certificate as adjusted
        if !sup_global.is_finite() {
            return Err(DichotomyError::CertificationFailure {
                certificate: "decay".into(),
                detail: "weighted spectrum |F| e^psi is unbounded on the probe range".into(),
            });
        }
        // a global constant more than 10^6 above the local scale means the
        // product genuinely fails to track e^{-psi}: report the worst xi
        if sup_global > 1e6 * sup_local.max(1e-300) {
            let (worst_xi, _) = samples
                .iter()
                .cloned()
                .fold((1.0, 0.0), |acc, s| if s.1 > acc.1 { s } else { acc });
            return Err(DichotomyError::CertificationFailure {
                certificate: "decay".into(),
                detail: format!("violation at xi = {worst_xi}"),
            });
        }
        c = 1.05 * sup_global;
        adjusted = true;
    }

    // inverse transform: f(x) = (1/pi) int_0^Xi F cos(x xi) dxi, with Xi
    // chosen where the spectrum has genuinely died
    let r_out = 1.25 * l;
    let dxi = std::f64::consts::PI / (16.0 * (l + r_out));
    let mut n_xi = 0usize;
    loop {
        n_xi += 512;
        let xi_cut = n_xi as f64 * dxi;
        let tail = (0..64)
            .map(|j| witness_spectrum(a, smooth_type, xi_cut - j as f64 * dxi).abs())
            .fold(0.0, f64::max);
        if tail < 1e-13 || xi_cut > XI_MAX {
            break;
        }
    }
    let spectrum: Vec<f64> = (0..=n_xi).map(|j| witness_spectrum(a, smooth_type, j as f64 * dxi)).collect();
    let wq = trapezoid_weights(spectrum.len(), dxi);
    let n_half = 501usize;
    let dx = r_out / (n_half - 1) as f64;
    let inv_pi = 1.0 / std::f64::consts::PI;
    let half: Vec<Complex64> = {
        use rayon::prelude::*;
        (0..n_half)
            .into_par_iter()
            .map(|i| {
                let x = i as f64 * dx;
                let s: f64 = spectrum
                    .iter()
                    .zip(&wq)
                    .enumerate()
                    .map(|(j, (v, w))| v * w * (x * j as f64 * dxi).cos())
                    .sum();
                Complex64::new(s * inv_pi, 0.0)
            })
            .collect()
    };
    let profile = EvenProfile::from_half(r_out, &half)
        .map_err(DichotomyError::Euclid)?;

    // support certificate: relative L1 mass outside [-l, l]
    let total: f64 = half.iter().map(|v| v.norm()).sum();
    let outside: f64 = half
        .iter()
        .enumerate()
        .filter(|(i, _)| *i as f64 * dx > l)
        .map(|(_, v)| v.norm())
        .sum();
    let support_leak = if total > 0.0 { outside / total } else { 0.0 };
    if support_leak >= 1e-8 {
        return Err(DichotomyError::CertificationFailure {
            certificate: "support".into(),
            detail: format!("relative mass {support_leak:.3e} outside [-{l}, {l}]"),
        });
    }

    // nontriviality: F(0) = 1 pins the natural scale int f = 1
    let sup_f = half.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let scale = 1.0 / (2.0 * l); // a unit integral on [-l, l] has sup >= this
    let nontriviality = sup_f / scale;
    if nontriviality <= 1e-6 {
        return Err(DichotomyError::CertificationFailure {
            certificate: "nontriviality".into(),
            detail: format!("sup |f| = {sup_f:.3e} below scale"),
        });
    }

    Ok(WitnessFunction {
        schema_version: SCHEMA_VERSION,
        domain: WitnessDomain::RealLine,
        payload: WitnessPayload::Line(profile),
        decay_constant: c,
        decay_adjusted: adjusted,
        decay_sampled_max: sup_global,
        support_radius: l,
        support_leak,
        nontriviality,
        weighted_mass: None,
        params: WitnessParams {
            psi: psi.describe(),
            l,
            a: a.to_vec(),
            smooth_type,
            xi_max: XI_MAX,
        },
    })
}

/// Target space for [`witness_on_space`].
#[derive(Debug, Clone, Copy)]
pub enum WitnessSpace {
    EuclideanRadial(usize),
    Hyperbolic(HyperbolicModel),
}

/// Lift the line witness to a radial witness on R^d or H^d.
///
/// R^d goes through the inverse radial Radon transform of the line profile;
/// H^d takes the closed-form spectrum `F` directly as spherical transform
/// data (it is even, entire of exponential type `<= l` by construction) and
/// inverts it. The polynomial growth of the spectral densities is absorbed
/// by the sine product itself: its ~40 retained factors decay far faster
/// than any fixed power, so the weighted mass `int |fhat| e^psi |c|^{-2}`
/// converges without inflating the weight.
pub fn witness_on_space(
    psi: &WeightFunction,
    l: f64,
    space: WitnessSpace,
) -> Result<WitnessFunction, DichotomyError> {
    match space {
        WitnessSpace::EuclideanRadial(d) => {
            if !(1..=3).contains(&d) {
                return Err(DichotomyError::Precondition(
                    "euclidean radial witnesses support d in 1..=3".into(),
                ));
            }
            let line = ingham_witness(psi, l)?;
            let WitnessPayload::Line(profile) = &line.payload else { unreachable!() };
            let f = radon_inverse_radial(profile, d, l, &RadonInverseOptions::default())?;
            // self-certification: the slice projection identity must close
            let slice = slice_projection_check(&f, 10.0, 41)?;
            let scale = f.sup_abs();
            if scale <= 0.0 {
                return Err(DichotomyError::CertificationFailure {
                    certificate: "nontriviality".into(),
                    detail: "reconstruction is identically zero".into(),
                });
            }
            if slice > 1e-4 * scale.max(1.0) {
                return Err(DichotomyError::CertificationFailure {
                    certificate: "slice-projection".into(),
                    detail: format!("discrepancy {slice:.3e}"),
                });
            }
            // decay of the d-dimensional transform: it coincides with F on
            // rays, so resample it directly
            let decay_sampled_max = (0..400)
                .map(|i| {
                    let lam = 1.0 + (XI_MAX - 1.0) * i as f64 / 399.0;
                    radial_fourier(&f, lam).norm() * psi.eval(lam).exp()
                })
                .fold(0.0, f64::max);
            Ok(WitnessFunction {
                schema_version: SCHEMA_VERSION,
                domain: WitnessDomain::EuclideanRadial(d),
                payload: WitnessPayload::EuclideanRadial(f),
                decay_constant: line.decay_constant,
                decay_adjusted: line.decay_adjusted,
                decay_sampled_max,
                support_radius: l,
                support_leak: line.support_leak,
                nontriviality: line.nontriviality,
                weighted_mass: None,
                params: line.params,
            })
        }
        WitnessSpace::Hyperbolic(model) => {
            let d = model.dim();
            let line = ingham_witness(psi, l)?;
            let params = line.params.clone();
            // spherical inversion of the closed-form spectrum
            let spectrum = |lam: f64| witness_spectrum(&params.a, params.smooth_type, lam);
            // the weighted mass and its stability under doubling the horizon
            let mass_to = |lambda_max: f64| -> f64 {
                let n = (lambda_max / 0.02).ceil() as usize + 1;
                let dl = lambda_max / (n - 1) as f64;
                let w = trapezoid_weights(n, dl);
                (0..n)
                    .map(|i| {
                        let lam = i as f64 * dl;
                        spectrum(lam).abs()
                            * psi.eval(lam).exp()
                            * model.c_density(lam)
                            * w[i]
                    })
                    .sum()
            };
            let m1 = mass_to(XI_MAX / 4.0);
            let m2 = mass_to(XI_MAX / 2.0);
            let m3 = mass_to(XI_MAX);
            let change = if m3 > 0.0 { (m3 - m2).abs() / m3 } else { 0.0 };
            let prev_change = if m2 > 0.0 { (m2 - m1).abs() / m2 } else { 0.0 };
            if !(m3.is_finite() && change <= 1e-6 && change <= prev_change + 1e-12) {
                return Err(DichotomyError::CertificationFailure {
                    certificate: "weighted-mass".into(),
                    detail: format!(
                        "mass {m3:.6e} not stable under doubling (changes {prev_change:.3e} -> {change:.3e})"
                    ),
                });
            }
            // invert on a grid reaching past the support to certify it; the
            // horizon and step are sized so truncation and quadrature stay
            // below the 1e-8 support-leak certificate
            let lambda_grid_max = 150.0f64.max(4.0 * std::f64::consts::PI / l);
            let n_lam = ((lambda_grid_max / 0.01).ceil() as usize + 1).max(512);
            let fhat = SpectralFunction::from_fn(lambda_grid_max, n_lam, |lam| {
                Complex64::new(spectrum(lam), 0.0)
            })?;
            let t_out = 1.5 * l;
            let n_t = 301;
            let f = sft_inverse(&model, &fhat, t_out, n_t)?;
            // support: J-weighted relative mass outside radius l
            let wts = trapezoid_weights(n_t, f.dt());
            let total: f64 = f
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| v.norm() * model.volume_density(f.t(i)) * wts[i])
                .sum();
            let outside: f64 = f
                .values
                .iter()
                .enumerate()
                .filter(|(i, _)| f.t(*i) > l)
                .map(|(i, v)| v.norm() * model.volume_density(f.t(i)) * wts[i])
                .sum();
            let support_leak = if total > 0.0 { outside / total } else { 0.0 };
            if support_leak >= 1e-8 {
                return Err(DichotomyError::CertificationFailure {
                    certificate: "support".into(),
                    detail: format!("relative mass {support_leak:.3e} outside B(o, {l})"),
                });
            }
            let sup_f = f.sup_abs();
            // natural scale: |f| <= (2 pi)^{-1} int |F| |c|^{-2} everywhere,
            // so sup|f| relative to that integral lies in (0, 1]
            let wl = trapezoid_weights(n_lam, fhat.dl());
            let scale: f64 = (0..n_lam)
                .map(|i| {
                    fhat.values[i].norm() * model.c_density(fhat.lambda(i)) * wl[i]
                })
                .sum::<f64>()
                / (2.0 * std::f64::consts::PI);
            let nontriviality = sup_f / scale.max(1e-300);
            if nontriviality <= 1e-6 {
                return Err(DichotomyError::CertificationFailure {
                    certificate: "nontriviality".into(),
                    detail: format!("sup |f| = {sup_f:.3e} below scale {scale:.3e}"),
                });
            }
            let mut f = f;
            f.support = Some(l);
            Ok(WitnessFunction {
                schema_version: SCHEMA_VERSION,
                domain: WitnessDomain::Hyperbolic(d),
                payload: WitnessPayload::Hyperbolic(f),
                decay_constant: line.decay_constant,
                decay_adjusted: line.decay_adjusted,
                decay_sampled_max: line.decay_sampled_max,
                support_radius: l,
                support_leak,
                nontriviality,
                weighted_mass: Some((m3, change)),
                params,
            })
        }
    }
}

/// Trend of the weighted spectral integral as the horizon grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateTrend {
    Finite,
    InfiniteTrend,
    Undecided,
}

/// Ladder of partial weighted integrals and its classification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateReport {
    pub schema_version: u32,
    pub trend: EstimateTrend,
    /// `(Lambda, int_0^Lambda |fhat|^p e^psi |c|^{-2} dlambda)` rungs.
    pub partial_integrals: Vec<(f64, f64)>,
    /// `sup |fhat(lambda)| e^{psi(lambda)}` over the grid (the pointwise
    /// decay mode).
    pub pointwise_sup: f64,
}

/// Classify `int |fhat|^p e^psi |c|^{-2}` over a ladder of horizons.
///
/// `undecided` is a valid outcome; no error is raised by the trend test.
pub fn verify_estimate(
    model: &HyperbolicModel,
    fhat: &SpectralFunction,
    psi: &WeightFunction,
    p: f64,
) -> Result<EstimateReport, DichotomyError> {
    if !(p >= 1.0) {
        return Err(DichotomyError::Precondition("need p >= 1".into()));
    }
    let m = fhat.values.len();
    let dl = fhat.dl();
    let w = trapezoid_weights(m, dl);
    let integrand: Vec<f64> = (0..m)
        .map(|i| {
            let lam = fhat.lambda(i);
            fhat.values[i].norm().powf(p) * psi.eval(lam).exp() * model.c_density(lam)
        })
        .collect();
    let pointwise_sup = (0..m)
        .map(|i| fhat.values[i].norm() * psi.eval(fhat.lambda(i)).exp())
        .fold(0.0, f64::max);

    let rungs = 8usize;
    let mut partial_integrals = Vec::with_capacity(rungs);
    let mut acc = 0.0;
    let mut next_cut = 1;
    for i in 0..m {
        acc += w[i] * integrand[i];
        if i + 1 == (m * next_cut) / rungs {
            partial_integrals.push((fhat.lambda(i), acc));
            next_cut += 1;
        }
    }
    let increments: Vec<f64> = partial_integrals
        .windows(2)
        .map(|p| p[1].1 - p[0].1)
        .collect();
    let total = partial_integrals.last().map(|p| p.1).unwrap_or(0.0);
    let trend = classify_trend(&increments, total);
    Ok(EstimateReport {
        schema_version: SCHEMA_VERSION,
        trend,
        partial_integrals,
        pointwise_sup,
    })
}

/// One rung of the Step-2 vanishing ladder.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Step2Rung {
    pub eps: f64,
    /// Spectral horizon used for this rung.
    pub lambda_max: f64,
    pub span_size: usize,
    pub bound: EnergyBound,
    /// `energy / weighted_mass` at this rung.
    pub ratio: f64,
}

/// The quantitative vanishing ladder for a function `f` that vanishes on
/// `B(o, l)`: for each `eps` the spectral horizon is grown until the
/// divergent weight has inflated the weighted mass enough that
/// `energy / weighted_mass <= eps`, the conjugate transform is projected on
/// a span of doubling size, and the full bound chain is asserted.
///
/// The time-domain pairing `2 pi |sum c_j f(t_j)|` is exactly zero on every
/// rung because all span points lie inside the ball where `f` vanishes.
///
/// ```
/// use levlab::dichotomy::step2_ladder;
/// use levlab::hyperbolic::{BiinvariantFunction, HyperbolicModel};
/// use levlab::weights::WeightFunction;
/// use num_complex::Complex64;
///
/// let m = HyperbolicModel::new(3)?;
/// let psi = WeightFunction::lin_log(1)?; // divergent
/// // a smooth bump supported in [2.1, 3.1] -- vanishing on the ball B(o, 2)
/// let f = BiinvariantFunction::from_fn(3.2, 249, Some(3.1), |t| {
///     let x = (t - 2.6) / 0.5;
///     let v = if x.abs() < 1.0 { (-1.0 / (1.0 - x * x)).exp() } else { 0.0 };
///     Complex64::new(v, 0.0)
/// })?;
/// let rungs = step2_ladder(&m, &f, &psi, 2.0, &[1e-1, 1e-2], 8)?;
/// for r in &rungs {
///     assert!(r.ratio <= r.eps);
///     assert_eq!(r.bound.pairing_time_domain, Some(0.0));
/// }
/// # Ok::<(), Box<dyn std::error::Error>>(())
/// ```
pub fn step2_ladder(
    model: &HyperbolicModel,
    f: &BiinvariantFunction,
    psi: &WeightFunction,
    l: f64,
    eps_ladder: &[f64],
    base_span_size: usize,
) -> Result<Vec<Step2Rung>, DichotomyError> {
    let verdict = psi.classify_levinson(DEFAULT_HORIZON, DEFAULT_THRESHOLD)?;
    if verdict.verdict != Verdict::Divergent {
        return Err(DichotomyError::Precondition(format!(
            "the vanishing ladder needs a divergent weight, classifier says {:?}",
            verdict.verdict
        )));
    }
    // f must really vanish on the ball for the ladder to mean anything
    let inside_sup = f
        .values
        .iter()
        .enumerate()
        .filter(|(i, _)| f.t(*i) < l)
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max);
    if inside_sup > 1e-12 * f.sup_abs().max(1e-300) {
        return Err(DichotomyError::Precondition(format!(
            "f does not vanish on B(o, {l}): sup inside = {inside_sup:.3e}"
        )));
    }
    let mut rungs = Vec::with_capacity(eps_ladder.len());
    let mut lambda_max = 8.0f64;
    let mut span_size = base_span_size;
    let mut prev_span: Option<PhiSpan> = None;
    for &eps in eps_ladder {
        let mut rung = None;
        for _ in 0..8 {
            let n_lambda = ((lambda_max / 0.05).ceil() as usize + 1).max(161);
            let fhat = crate::hyperbolic::sft_forward(model, f, lambda_max, n_lambda)?;
            let mut span = match &prev_span {
                Some(s) if s.points.len() >= span_size => s.clone(),
                Some(s) => {
                    let mut r = s.clone();
                    while r.points.len() < span_size {
                        r = r.refined()?;
                    }
                    r
                }
                None => PhiSpan::standard(*model, l, span_size)?,
            };
            span.model = *model;
            let (bound, fitted) = vanishing_energy_bound(&fhat, &span, psi, Some(f))?;
            let ratio = if bound.weighted_mass > 0.0 {
                bound.energy / bound.weighted_mass
            } else {
                0.0
            };
            prev_span = Some(fitted);
            if ratio <= eps {
                rung = Some(Step2Rung {
                    eps,
                    lambda_max,
                    span_size,
                    bound,
                    ratio,
                });
                break;
            }
            // the divergent weight guarantees the weighted mass outruns the
            // energy as the horizon grows
            lambda_max *= 1.5;
        }
        let Some(r) = rung else {
            return Err(DichotomyError::CertificationFailure {
                certificate: "step2-ladder".into(),
                detail: format!("energy/weighted_mass did not reach eps = {eps}"),
            });
        };
        rungs.push(r);
        span_size *= 2;
    }
    Ok(rungs)
}

fn classify_trend(increments: &[f64], total: f64) -> EstimateTrend {
    if total <= 0.0 {
        return EstimateTrend::Finite; // the zero function
    }
    let n = increments.len();
    if n < 3 {
        return EstimateTrend::Undecided;
    }
    let last = increments[n - 1];
    let prev = increments[n - 2];
    // a vanished last increment is a converged integral regardless of the
    // path there
    if last < 1e-9 * total {
        return EstimateTrend::Finite;
    }
    // decaying increments with a geometric tail bound well inside the total
    if last < prev {
        let q = last / prev.max(1e-300);
        if q < 0.9 && last * q / (1.0 - q) < 1e-3 * total {
            return EstimateTrend::Finite;
        }
    }
    // non-decaying increments over the last rungs signal divergence
    if increments[n - 3..].windows(2).all(|w| w[1] >= 0.98 * w[0]) && last > 1e-6 * total {
        return EstimateTrend::InfiniteTrend;
    }
    EstimateTrend::Undecided
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::sft_forward;

    fn h3() -> HyperbolicModel {
        HyperbolicModel::new(3).unwrap()
    }

    fn bump(t: f64, lo: f64, hi: f64) -> Complex64 {
        if t <= lo || t >= hi {
            return Complex64::new(0.0, 0.0);
        }
        let x = (2.0 * t - lo - hi) / (hi - lo);
        Complex64::new((-1.0 / (1.0 - x * x)).exp(), 0.0)
    }

    #[test]
    fn span_member_projects_to_zero_residual() {
        // the target is itself a span element: residual at machine scale
        let m = h3();
        let span = PhiSpan::standard(m, 2.0, 8).unwrap();
        let t0 = span.points[3];
        let target = SpectralFunction::from_fn(10.0, 161, |lam| {
            m.phi_lambda(Complex64::new(lam, 0.0), t0)
        })
        .unwrap();
        let psi = WeightFunction::lin_log(1).unwrap();
        let (report, fitted) =
            phi_span_project(&target, &span, &psi, ProjectionMode::LeastSquares).unwrap();
        assert!(report.residual < 1e-10, "residual {}", report.residual);
        let c = fitted.coefficients.unwrap();
        assert!((c[3] - Complex64::new(1.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn divergent_weight_residuals_decrease_under_refinement() {
        let m = h3();
        let l = 2.0;
        let f = BiinvariantFunction::from_fn(1.0, 201, Some(1.0), |t| bump(t, -1.0, 1.0))
            .unwrap();
        let fhat = sft_forward(&m, &f, 16.0, 321).unwrap();
        let target = SpectralFunction::new(
            fhat.lambda_max,
            fhat.values.iter().map(|v| v.conj()).collect(),
        )
        .unwrap();
        let psi = WeightFunction::lin_log(1).unwrap();
        let mut span = PhiSpan::standard(m, l, 8).unwrap();
        let mut residuals = Vec::new();
        for _ in 0..3 {
            let (report, fitted) =
                phi_span_project(&target, &span, &psi, ProjectionMode::LeastSquares).unwrap();
            residuals.push(report.residual);
            span = fitted.refined().unwrap();
        }
        assert!(
            residuals[0] > residuals[1] && residuals[1] > residuals[2],
            "{residuals:?}"
        );
    }

    #[test]
    fn heat_multiplier_is_reachable_at_documented_span_size() {
        let m = h3();
        let target = crate::hyperbolic::heat_hat(&m, 1.0, 12.0, 241).unwrap();
        let psi = WeightFunction::lin_log(1).unwrap();
        let span = PhiSpan::standard(m, 2.0, 32).unwrap();
        let (report, _) =
            phi_span_project(&target, &span, &psi, ProjectionMode::LeastSquares).unwrap();
        assert!(report.residual < 1e-2, "residual {}", report.residual);
    }

    #[test]
    fn constructive_pipeline_meets_chained_budget() {
        let m = h3();
        let l = 2.0;
        // genuine type-l data: transform of a bump inside the ball
        let f = BiinvariantFunction::from_fn(0.8, 161, Some(0.8), |t| bump(t, -0.8, 0.8))
            .unwrap();
        // sample the transform until it has genuinely decayed: the pipeline
        // inverts the smoothed data, so its grid must carry the whole tail
        let fhat = sft_forward(&m, &f, 220.0, 4401).unwrap();
        let psi = WeightFunction::lin_log(1).unwrap();
        let span = PhiSpan::new(m, l, vec![0.0]).unwrap();
        let eps = 1e-2 * fhat.sup_abs();
        let (report, fitted) =
            phi_span_project(&fhat, &span, &psi, ProjectionMode::Constructive { eps }).unwrap();
        assert!(report.converged, "residual {} vs budget {}", report.residual, 4.0 * eps);
        assert!(report.residual <= 4.0 * eps);
        let ProjectionPipeline::Constructive { nu, h, dyadic_level, .. } = &report.pipeline
        else {
            panic!("expected constructive pipeline");
        };
        assert!(*nu > 0.0 && *nu < 1.0 && *h > 0.0 && *dyadic_level >= 1);
        assert!(fitted.points.iter().all(|t| *t >= 0.0 && *t < l));
        assert_eq!(report.node_count, fitted.points.len());
    }

    #[test]
    fn energy_bound_zero_function_is_all_zero() {
        let m = h3();
        let fhat = SpectralFunction::from_fn(8.0, 101, |_| Complex64::new(0.0, 0.0)).unwrap();
        let span = PhiSpan::standard(m, 2.0, 8).unwrap();
        let psi = WeightFunction::lin_log(1).unwrap();
        let (b, _) = vanishing_energy_bound(&fhat, &span, &psi, None).unwrap();
        assert_eq!(b.energy, 0.0);
        assert_eq!(b.weighted_mass, 0.0);
        assert_eq!(b.pairing, 0.0);
        assert!(b.residual < 1e-14);
    }

    #[test]
    fn energy_chain_holds_for_ball_vanishing_tail() {
        let m = h3();
        let l = 2.0;
        // smooth, supported in [l, 3]: vanishes on the ball
        let f = BiinvariantFunction::from_fn(3.2, 321, Some(3.0), |t| bump(t, 2.0, 3.0))
            .unwrap();
        let fhat = sft_forward(&m, &f, 16.0, 321).unwrap();
        let span = PhiSpan::standard(m, l, 16).unwrap();
        let psi = WeightFunction::lin_log(1).unwrap();
        // the chain assertion lives inside the call
        let (b, _) = vanishing_energy_bound(&fhat, &span, &psi, Some(&f)).unwrap();
        assert!(b.energy > 0.0);
        // every span point is inside the ball where f vanishes: the
        // time-domain pairing is exactly zero
        assert_eq!(b.pairing_time_domain, Some(0.0));
        assert!(b.weighted_mass.is_finite() && b.weighted_mass > 0.0);
    }

    #[test]
    fn energy_bound_chain_holds_for_witness_side() {
        // a compactly supported witness does NOT vanish on the ball: the
        // pairing term is genuinely nonzero and carries the energy
        let m = h3();
        let l = 2.0;
        let f = BiinvariantFunction::from_fn(1.5, 201, Some(1.5), |t| bump(t, -1.5, 1.5))
            .unwrap();
        let fhat = sft_forward(&m, &f, 16.0, 321).unwrap();
        let span = PhiSpan::standard(m, l, 16).unwrap();
        let psi = WeightFunction::custom("sqrt", |r| r.sqrt());
        let (b, _) = vanishing_energy_bound(&fhat, &span, &psi, Some(&f)).unwrap();
        assert!(b.energy > 0.0);
        assert!(b.weighted_mass.is_finite());
        assert!(b.pairing_time_domain.unwrap() > 0.0);
    }

    #[test]
    fn step2_ladder_drives_ratio_down() {
        let m = h3();
        let l = 2.0;
        let f = BiinvariantFunction::from_fn(3.2, 321, Some(3.0), |t| bump(t, 2.0, 3.0))
            .unwrap();
        let psi = WeightFunction::lin_log(1).unwrap();
        let rungs = step2_ladder(&m, &f, &psi, l, &[1e-1, 1e-2], 8).unwrap();
        assert_eq!(rungs.len(), 2);
        for r in &rungs {
            assert!(r.ratio <= r.eps, "ratio {} vs eps {}", r.ratio, r.eps);
            assert_eq!(r.bound.pairing_time_domain, Some(0.0));
        }
        assert!(rungs[1].lambda_max >= rungs[0].lambda_max);
    }

    #[test]
    fn step2_ladder_rejects_convergent_weight_and_nonvanishing_f() {
        let m = h3();
        let tail = BiinvariantFunction::from_fn(3.2, 321, Some(3.0), |t| bump(t, 2.0, 3.0))
            .unwrap();
        let convergent = WeightFunction::lin_log(2).unwrap();
        assert!(matches!(
            step2_ladder(&m, &tail, &convergent, 2.0, &[1e-1], 8),
            Err(DichotomyError::Precondition(_))
        ));
        let inside = BiinvariantFunction::from_fn(3.2, 321, Some(3.0), |t| bump(t, 0.5, 3.0))
            .unwrap();
        let divergent = WeightFunction::lin_log(1).unwrap();
        assert!(matches!(
            step2_ladder(&m, &inside, &divergent, 2.0, &[1e-1], 8),
            Err(DichotomyError::Precondition(_))
        ));
    }

    #[test]
    fn convergent_weight_residual_stagnates() {
        // contrast experiment: one target (the spherical function of a
        // point mass at radius 2.2, just outside the span's radius-2
        // ball, so it carries a frequency the span cannot produce), one
        // nested span ladder, two weights. Frequencies <= 2 can mimic
        // frequency 2.2 only on short lambda-windows; the divergent
        // weight shrinks the visible window below that length, so
        // refinement keeps paying off, while the convergent weight
        // leaves the mismatch region visible and the residual floors.
        let m = h3();
        let l = 2.0;
        let psi_conv = WeightFunction::custom("sqrt", |r| r.sqrt());
        let psi_div = WeightFunction::power(1.0).unwrap();
        let target = SpectralFunction::from_fn(100.0, 1001, |lam| {
            m.phi_lambda(Complex64::new(lam, 0.0), 2.2)
        })
        .unwrap();
        let run = |psi: &WeightFunction| {
            let mut span = PhiSpan::standard(m, l, 8).unwrap();
            let mut residuals = Vec::new();
            for _ in 0..3 {
                let (report, fitted) =
                    phi_span_project(&target, &span, psi, ProjectionMode::LeastSquares)
                        .unwrap();
                residuals.push(report.residual);
                span = fitted.refined().unwrap();
            }
            residuals
        };
        let conv = run(&psi_conv);
        let div = run(&psi_div);
        // recorded run: conv ~ [5.6e-3, 1.7e-3, 6.4e-4], div ~ [1.6e-4,
        // 5.3e-7, 9.4e-9]. Regression values, not theorems.
        assert!(
            div[0] > div[1] && div[1] > div[2],
            "divergent residuals not strictly decreasing: {div:?}"
        );
        assert!(div[2] < 1e-7, "divergent side lost its decay: {div:?}");
        assert!(
            conv[2] > 1e-4,
            "convergent side fell below its recorded floor: {conv:?}"
        );
        assert!(
            div[2] < 1e-3 * conv[2],
            "no contrast: div {div:?} vs conv {conv:?}"
        );
    }

    #[test]
    fn ingham_witness_sqrt_passes_all_certificates() {
        let psi = WeightFunction::custom("sqrt", |r| r.sqrt());
        let w = ingham_witness(&psi, 2.0).unwrap();
        assert_eq!(w.domain, WitnessDomain::RealLine);
        assert!(w.decay_constant.is_finite() && w.decay_constant > 0.0);
        assert!(w.support_leak < 1e-8);
        assert!(w.nontriviality > 1e-6);
        // the scales exhaust the budget: sum a_k = l/2 plus the six guard
        // factors of size l/64
        let total: f64 = w.params.a.iter().sum();
        assert!((total - (1.0 + 6.0 * 2.0 / 64.0)).abs() < 1e-9, "sum a_k = {total}");
        // decay bound really holds on a fresh sample of the range
        for i in 0..500 {
            let xi = 10f64.powf(4.0 * i as f64 / 499.0);
            let v = witness_spectrum(&w.params.a, w.params.smooth_type, xi).abs();
            assert!(
                v <= w.decay_constant * (-psi.eval(xi)).exp() * (1.0 + 1e-12),
                "xi = {xi}"
            );
        }
    }

    #[test]
    fn ingham_witness_rejects_divergent_weight() {
        let psi = WeightFunction::power(1.0).unwrap();
        assert!(matches!(
            ingham_witness(&psi, 2.0),
            Err(DichotomyError::Precondition(_))
        ));
    }

    #[test]
    fn truncated_product_tail_is_negligible() {
        // appending factors below the truncation threshold moves the
        // spectrum by less than 1e-6 on [1, 1e3]
        let psi = WeightFunction::custom("sqrt", |r| r.sqrt());
        let a = dyadic_scales(&psi, 1.0);
        let mut extended = a.clone();
        for k in 0..8 {
            extended.push(1e-13 * 0.5f64.powi(k));
        }
        for i in 0..200 {
            let xi = 10f64.powf(3.0 * i as f64 / 199.0);
            let d = (witness_spectrum(&a, 1.0, xi) - witness_spectrum(&extended, 1.0, xi)).abs();
            assert!(d < 1e-6, "xi = {xi}: {d}");
        }
    }

    #[test]
    fn witness_lifts_to_euclidean_r3() {
        let psi = WeightFunction::custom("sqrt", |r| r.sqrt());
        let w = witness_on_space(&psi, 2.0, WitnessSpace::EuclideanRadial(3)).unwrap();
        assert_eq!(w.domain, WitnessDomain::EuclideanRadial(3));
        let WitnessPayload::EuclideanRadial(f) = &w.payload else { panic!() };
        assert!(f.sup_abs() > 0.0);
        assert!(f.support_bound() <= 2.0 + 1e-12);
        assert!(w.decay_sampled_max.is_finite());
    }

    #[test]
    fn witness_lifts_to_h3_with_stable_weighted_mass() {
        let psi = WeightFunction::lin_log(2).unwrap();
        let w = witness_on_space(
            &psi,
            2.0,
            WitnessSpace::Hyperbolic(HyperbolicModel::new(3).unwrap()),
        )
        .unwrap();
        assert_eq!(w.domain, WitnessDomain::Hyperbolic(3));
        let (mass, change) = w.weighted_mass.unwrap();
        assert!(mass.is_finite() && mass > 0.0);
        assert!(change < 1e-6, "doubling change {change}");
        assert!(w.support_leak < 1e-6);
        assert!(w.nontriviality > 1e-6);
    }

    #[test]
    fn witness_report_serializes_with_schema() {
        let psi = WeightFunction::custom("sqrt", |r| r.sqrt());
        let w = ingham_witness(&psi, 1.0).unwrap();
        let json = serde_json::to_value(&w).unwrap();
        assert_eq!(json["schema_version"], SCHEMA_VERSION);
        assert!(json["params"]["a"].as_array().unwrap().len() > 3);
    }

    #[test]
    fn verify_estimate_heat_is_finite() {
        let m = h3();
        let fhat = crate::hyperbolic::heat_hat(&m, 1.0, 20.0, 401).unwrap();
        let psi = WeightFunction::lin_log(1).unwrap();
        let r = verify_estimate(&m, &fhat, &psi, 1.0).unwrap();
        assert_eq!(r.trend, EstimateTrend::Finite);
    }

    #[test]
    fn verify_estimate_exact_decay_tracks_density_growth() {
        // |fhat| = e^{-psi} exactly: the weighted integrand is |c|^{-2},
        // whose partial integrals keep growing
        let m = h3();
        let psi = WeightFunction::custom("sqrt", |r| r.sqrt());
        let p = psi.clone();
        let fhat = SpectralFunction::from_fn(40.0, 801, move |lam| {
            Complex64::new((-p.eval(lam)).exp(), 0.0)
        })
        .unwrap();
        let r = verify_estimate(&m, &fhat, &psi, 1.0).unwrap();
        assert_eq!(r.trend, EstimateTrend::InfiniteTrend);
    }

    #[test]
    fn verify_estimate_p2_below_p1_for_small_transforms() {
        let m = h3();
        let psi = WeightFunction::lin_log(1).unwrap();
        let fhat = SpectralFunction::from_fn(10.0, 201, |lam| {
            Complex64::new(0.9 * (-0.3 * lam).exp(), 0.0)
        })
        .unwrap();
        let r1 = verify_estimate(&m, &fhat, &psi, 1.0).unwrap();
        let r2 = verify_estimate(&m, &fhat, &psi, 2.0).unwrap();
        for (a, b) in r2.partial_integrals.iter().zip(&r1.partial_integrals) {
            assert!(a.1 <= b.1 + 1e-12);
        }
    }
}
