//! Admissible weight functions psi and the Levinson integral
//! I = int_1^inf psi(r)/r^2 dr.
//!
//! A weight is nondecreasing, nonnegative and unbounded. Whether I diverges
//! decides the dichotomy: divergence forces vanishing theorems, convergence
//! admits compactly supported witnesses.
//!
//! # Example
//!
//! ```
//! use levlab::weights::{Verdict, WeightFunction, DEFAULT_HORIZON, DEFAULT_THRESHOLD};
//!
//! let sqrt = WeightFunction::power(0.5)?;   // psi(r) = sqrt(r)
//! let linlog = WeightFunction::lin_log(1)?; // psi(r) = r / log r beyond r = e^2
//! assert_eq!(
//!     sqrt.classify_levinson(DEFAULT_HORIZON, DEFAULT_THRESHOLD)?.verdict,
//!     Verdict::Convergent,
//! );
//! assert_eq!(
//!     linlog.classify_levinson(DEFAULT_HORIZON, DEFAULT_THRESHOLD)?.verdict,
//!     Verdict::Divergent,
//! );
//! # Ok::<(), levlab::weights::WeightError>(())
//! ```

use crate::numerics::integrate_gl;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Errors raised by weight construction and classification.
#[derive(Debug, thiserror::Error)]
pub enum WeightError {
    #[error("tabulated weight is malformed: {0}")]
    MalformedTable(String),
    #[error("invalid weight parameter: {0}")]
    InvalidParameter(String),
    #[error("classification horizon must be >= 2 (got {0})")]
    HorizonTooSmall(f64),
    #[error("empty grid passed to psi_norm")]
    EmptyGrid,
}

/// Builtin symbolic weight families.
#[derive(Clone)]
enum WeightKind {
    /// psi(r) = r^a, 0 < a <= 1.
    Power { a: f64 },
    /// psi(r) = r / (1 + log r)^k for r >= 1 (monotone envelope), linear on [0, 1).
    LinLog { k: u32 },
    /// psi(r) = a + log(1 + r).
    ConstPlusLog { a: f64 },
    /// Monotone piecewise-linear table, clamped outside its sample range.
    Table { rs: Vec<f64>, psis: Vec<f64> },
    /// User closure; classified numerically only.
    Custom {
        name: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

/// A nondecreasing, unbounded weight psi on [0, inf), optionally scaled by a
/// positive constant (the Lemma 2.2 reduction psi/d keeps the same kind).
#[derive(Clone)]
pub struct WeightFunction {
    kind: WeightKind,
    scale: f64,
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeightFunction({})", self.describe())
    }
}

/// Outcome of classifying the Levinson integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Divergent,
    Convergent,
    Undecided,
}

/// How a verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassifyMethod {
    ClosedFormRule,
    DyadicCondensation,
    NumericExtrapolation,
}

/// Verdict plus the numeric evidence backing it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevinsonVerdict {
    pub verdict: Verdict,
    /// Partial integral int_1^R psi(r)/r^2 dr at the largest R probed.
    pub numeric_estimate: f64,
    pub method: ClassifyMethod,
}

impl WeightFunction {
    /// psi(r) = r^a with 0 < a <= 1.
    pub fn power(a: f64) -> Result<Self, WeightError> {
        if !(a > 0.0 && a <= 1.0) {
            return Err(WeightError::InvalidParameter(format!(
                "power exponent must satisfy 0 < a <= 1, got {a}"
            )));
        }
        Ok(Self { kind: WeightKind::Power { a }, scale: 1.0 })
    }

    /// psi(r) = r / (1 + log r)^k, k >= 1, with the monotone envelope on the
    /// initial dip (for k >= 2 the raw expression decreases on [1, e^{k-1}]).
    pub fn lin_log(k: u32) -> Result<Self, WeightError> {
        if k < 1 {
            return Err(WeightError::InvalidParameter(
                "lin-log exponent k must be >= 1".into(),
            ));
        }
        Ok(Self { kind: WeightKind::LinLog { k }, scale: 1.0 })
    }

    /// psi(r) = a + log(1 + r), a >= 0.
    pub fn const_plus_log(a: f64) -> Result<Self, WeightError> {
        if a < 0.0 {
            return Err(WeightError::InvalidParameter(
                "const-plus-log offset must be >= 0".into(),
            ));
        }
        Ok(Self { kind: WeightKind::ConstPlusLog { a }, scale: 1.0 })
    }

    /// Tabulated weight from (r, psi) pairs. The first column must be
    /// strictly increasing and the second nondecreasing and nonnegative.
    /// Evaluation is monotone piecewise-linear, clamped outside the range.
    pub fn table(pairs: &[(f64, f64)]) -> Result<Self, WeightError> {
        if pairs.len() < 2 {
            return Err(WeightError::MalformedTable(
                "need at least two samples".into(),
            ));
        }
        for w in pairs.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(WeightError::MalformedTable(format!(
                    "r column not strictly increasing at r = {}",
                    w[1].0
                )));
            }
            if w[1].1 < w[0].1 {
                return Err(WeightError::MalformedTable(format!(
                    "psi column decreases at r = {}",
                    w[1].0
                )));
            }
        }
        if pairs[0].1 < 0.0 {
            return Err(WeightError::MalformedTable("psi must be >= 0".into()));
        }
        if !pairs.iter().all(|(r, p)| r.is_finite() && p.is_finite()) {
            return Err(WeightError::MalformedTable("non-finite sample".into()));
        }
        Ok(Self {
            kind: WeightKind::Table {
                rs: pairs.iter().map(|p| p.0).collect(),
                psis: pairs.iter().map(|p| p.1).collect(),
            },
            scale: 1.0,
        })
    }

    /// Weight backed by a user closure. The closure is trusted to be
    /// nondecreasing and unbounded; classification is numeric only.
    pub fn custom(name: &str, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            kind: WeightKind::Custom { name: name.to_string(), f: Arc::new(f) },
            scale: 1.0,
        }
    }

    /// Evaluate psi(r) for r >= 0.
    pub fn eval(&self, r: f64) -> f64 {
        let r = r.max(0.0);
        let raw = match &self.kind {
            WeightKind::Power { a } => r.powf(*a),
            WeightKind::LinLog { k } => {
                if r < 1.0 {
                    r
                } else {
                    // monotone envelope of r/(1+log r)^k: the raw curve dips
                    // below 1 on (1, r*) for k >= 2; clamp that stretch at 1
                    let v = r / (1.0 + r.ln()).powi(*k as i32);
                    v.max(1.0)
                }
            }
            WeightKind::ConstPlusLog { a } => a + (1.0 + r).ln(),
            WeightKind::Table { rs, psis } => {
                if r <= rs[0] {
                    psis[0]
                } else if r >= *rs.last().unwrap() {
                    *psis.last().unwrap()
                } else {
                    let i = rs.partition_point(|x| *x <= r) - 1;
                    let t = (r - rs[i]) / (rs[i + 1] - rs[i]);
                    psis[i] + t * (psis[i + 1] - psis[i])
                }
            }
            WeightKind::Custom { f, .. } => f(r),
        };
        self.scale * raw
    }

    /// Pointwise rescale psi -> c * psi (preserves monotonicity and the
    /// divergence class). `psi_scale(psi, d)` in the product reduction is
    /// `scaled(1/d)`.
    pub fn scaled(&self, c: f64) -> Result<Self, WeightError> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(WeightError::InvalidParameter(format!(
                "scale must be positive and finite, got {c}"
            )));
        }
        Ok(Self { kind: self.kind.clone(), scale: self.scale * c })
    }

    /// The Lemma 2.2 reduction psi_0 = psi / d.
    pub fn psi_scale(&self, d: u32) -> Result<Self, WeightError> {
        if d == 0 {
            return Err(WeightError::InvalidParameter("d must be >= 1".into()));
        }
        self.scaled(1.0 / d as f64)
    }

    /// Human-readable descriptor (used by the CLI and reports).
    pub fn describe(&self) -> String {
        let base = match &self.kind {
            WeightKind::Power { a } => format!("power:{a}"),
            WeightKind::LinLog { k } => format!("lin-log:{k}"),
            WeightKind::ConstPlusLog { a } => format!("const-log:{a}"),
            WeightKind::Table { rs, .. } => format!("table[{} samples]", rs.len()),
            WeightKind::Custom { name, .. } => format!("custom:{name}"),
        };
        if (self.scale - 1.0).abs() < 1e-15 {
            base
        } else {
            format!("{}*{}", self.scale, base)
        }
    }

    /// Classify the Levinson integral I = int_1^inf psi/r^2.
    ///
    /// Builtins use closed-form rules. Otherwise the Cauchy condensation sum
    /// `sum psi(2^k)/2^k` is extrapolated up to the horizon: divergent when
    /// the partial sums exceed `threshold`, convergent when the tail
    /// stabilizes geometrically, undecided otherwise.
    pub fn classify_levinson(
        &self,
        horizon: f64,
        threshold: f64,
    ) -> Result<LevinsonVerdict, WeightError> {
        if horizon < 2.0 {
            return Err(WeightError::HorizonTooSmall(horizon));
        }
        if !(threshold > 0.0) {
            return Err(WeightError::InvalidParameter(
                "threshold must be positive".into(),
            ));
        }
        let k_max = horizon.log2().floor().max(1.0) as u32;
        let r_max = 2f64.powi(k_max as i32);
        let numeric_estimate = self.partial_integral(r_max);

        if let Some(verdict) = self.closed_form_verdict() {
            return Ok(LevinsonVerdict {
                verdict,
                numeric_estimate,
                method: ClassifyMethod::ClosedFormRule,
            });
        }

        // Cauchy condensation: psi nondecreasing makes sum psi(2^k)/2^k
        // finite iff I is.
        let terms: Vec<f64> = (0..=k_max)
            .map(|k| {
                let r = 2f64.powi(k as i32);
                self.eval(r) / r
            })
            .collect();
        let mut partial = 0.0;
        for t in &terms {
            partial += t;
            if partial > threshold {
                return Ok(LevinsonVerdict {
                    verdict: Verdict::Divergent,
                    numeric_estimate,
                    method: ClassifyMethod::DyadicCondensation,
                });
            }
        }

        // Tabulated weights are constant beyond their last sample, so the
        // tail behaviour is unknowable: never guess convergence for them.
        if matches!(self.kind, WeightKind::Table { .. }) {
            return Ok(LevinsonVerdict {
                verdict: Verdict::Undecided,
                numeric_estimate,
                method: ClassifyMethod::DyadicCondensation,
            });
        }

        // Tail extrapolation on the condensation terms. Non-decreasing
        // positive terms force divergence; a stable geometric decay ratio
        // q < 1 bounds the tail and certifies convergence.
        let tail = &terms[terms.len().saturating_sub(8)..];
        let mut ratios = Vec::new();
        for w in tail.windows(2) {
            if w[0] > 0.0 {
                ratios.push(w[1] / w[0]);
            }
        }
        if ratios.len() >= 4 {
            let qmin = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
            if qmin >= 0.999 && *tail.last().unwrap() > 0.0 {
                return Ok(LevinsonVerdict {
                    verdict: Verdict::Divergent,
                    numeric_estimate,
                    method: ClassifyMethod::NumericExtrapolation,
                });
            }
            let qmax = ratios.iter().cloned().fold(0.0f64, f64::max);
            if qmax < 0.95 {
                let t_last = *tail.last().unwrap();
                let tail_bound = t_last * qmax / (1.0 - qmax);
                if partial + tail_bound < threshold {
                    return Ok(LevinsonVerdict {
                        verdict: Verdict::Convergent,
                        numeric_estimate,
                        method: ClassifyMethod::NumericExtrapolation,
                    });
                }
            }
        }
        Ok(LevinsonVerdict {
            verdict: Verdict::Undecided,
            numeric_estimate,
            method: ClassifyMethod::NumericExtrapolation,
        })
    }

    /// int_1^R psi(r)/r^2 dr by quadrature in u = log r.
    pub fn partial_integral(&self, r_max: f64) -> f64 {
        if r_max <= 1.0 {
            return 0.0;
        }
        let u_max = r_max.ln();
        let panels = (u_max * 4.0).ceil().max(8.0) as usize;
        integrate_gl(|u| self.eval(u.exp()) * (-u).exp(), 0.0, u_max, panels, 16)
    }

    fn closed_form_verdict(&self) -> Option<Verdict> {
        match &self.kind {
            WeightKind::Power { a } => Some(if *a >= 1.0 {
                Verdict::Divergent
            } else {
                Verdict::Convergent
            }),
            // int dr / (r (1+log r)^k) = int du/(1+u)^k
            WeightKind::LinLog { k } => Some(if *k <= 1 {
                Verdict::Divergent
            } else {
                Verdict::Convergent
            }),
            WeightKind::ConstPlusLog { .. } => Some(Verdict::Convergent),
            _ => None,
        }
    }
}

/// Default classification horizon (in the r variable).
pub const DEFAULT_HORIZON: f64 = 1.8446744073709552e19; // 2^64
/// Default divergence threshold for the condensation sum.
pub const DEFAULT_THRESHOLD: f64 = 1e6;

/// The psi-weighted sup norm over sampled (radius, value) pairs:
/// max |f(x)| e^{-psi(||x||)}.
///
/// ```
/// use levlab::weights::{psi_norm, WeightFunction};
/// let psi = WeightFunction::power(1.0).unwrap();
/// // f == 1 on a grid: the norm 1 is attained at the origin where psi = 0
/// let samples: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 1.0)).collect();
/// assert_eq!(psi_norm(samples.iter().copied(), &psi).unwrap(), 1.0);
/// ```
pub fn psi_norm<I>(samples: I, psi: &WeightFunction) -> Result<f64, WeightError>
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let mut best: Option<f64> = None;
    for (radius, magnitude) in samples {
        let v = magnitude * (-psi.eval(radius)).exp();
        best = Some(best.map_or(v, |b: f64| b.max(v)));
    }
    best.ok_or(WeightError::EmptyGrid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn classify(w: &WeightFunction) -> Verdict {
        w.classify_levinson(DEFAULT_HORIZON, DEFAULT_THRESHOLD)
            .unwrap()
            .verdict
    }

    #[test]
    fn paper_examples_classify_correctly() {
        assert_eq!(classify(&WeightFunction::lin_log(1).unwrap()), Verdict::Divergent);
        assert_eq!(classify(&WeightFunction::lin_log(2).unwrap()), Verdict::Convergent);
        assert_eq!(classify(&WeightFunction::power(1.0).unwrap()), Verdict::Divergent);
        assert_eq!(classify(&WeightFunction::power(0.5).unwrap()), Verdict::Convergent);
    }

    #[test]
    fn custom_weights_classified_numerically() {
        let w = WeightFunction::custom("r", |r| r);
        let v = w.classify_levinson(DEFAULT_HORIZON, DEFAULT_THRESHOLD).unwrap();
        assert_eq!(v.verdict, Verdict::Divergent);
        assert_eq!(v.method, ClassifyMethod::NumericExtrapolation);

        let w = WeightFunction::custom("sqrt", |r| r.sqrt());
        let v = w.classify_levinson(DEFAULT_HORIZON, DEFAULT_THRESHOLD).unwrap();
        assert_eq!(v.verdict, Verdict::Convergent);
        assert_eq!(v.method, ClassifyMethod::NumericExtrapolation);
    }

    #[test]
    fn tables_never_guess_convergence() {
        let pairs: Vec<(f64, f64)> = (0..20).map(|i| (i as f64, (i as f64).sqrt())).collect();
        let w = WeightFunction::table(&pairs).unwrap();
        let v = w.classify_levinson(DEFAULT_HORIZON, DEFAULT_THRESHOLD).unwrap();
        assert_eq!(v.verdict, Verdict::Undecided);
    }

    #[test]
    fn malformed_table_rejected() {
        assert!(WeightFunction::table(&[(0.0, 0.0), (0.0, 1.0)]).is_err());
        assert!(WeightFunction::table(&[(0.0, 1.0), (1.0, 0.5)]).is_err());
    }

    #[test]
    fn horizon_below_two_is_an_error() {
        let w = WeightFunction::power(1.0).unwrap();
        assert!(matches!(
            w.classify_levinson(1.5, 1e6),
            Err(WeightError::HorizonTooSmall(_))
        ));
    }

    #[test]
    fn classification_is_scale_invariant() {
        for base in [
            WeightFunction::power(1.0).unwrap(),
            WeightFunction::power(0.7).unwrap(),
            WeightFunction::lin_log(1).unwrap(),
            WeightFunction::lin_log(2).unwrap(),
        ] {
            let v0 = classify(&base);
            for c in [0.1, 3.0, 250.0] {
                assert_eq!(classify(&base.scaled(c).unwrap()), v0);
            }
        }
    }

    #[test]
    fn weights_are_nondecreasing_and_nonnegative() {
        let ws = [
            WeightFunction::power(0.3).unwrap(),
            WeightFunction::power(1.0).unwrap(),
            WeightFunction::lin_log(1).unwrap(),
            WeightFunction::lin_log(3).unwrap(),
            WeightFunction::const_plus_log(0.5).unwrap(),
        ];
        for w in &ws {
            let mut prev = -1.0;
            for i in 0..2000 {
                let r = i as f64 * 0.05;
                let v = w.eval(r);
                assert!(v >= 0.0, "{} at {r}", w.describe());
                assert!(v >= prev - 1e-12, "{} dips at r = {r}", w.describe());
                prev = v;
            }
        }
    }

    #[test]
    fn lin_log_one_matches_raw_formula() {
        // k = 1 needs no envelope: the raw curve is already monotone
        let w = WeightFunction::lin_log(1).unwrap();
        for r in [1.0, 2.0, 10.0, 1e4] {
            assert_abs_diff_eq!(w.eval(r), r / (1.0 + r.ln()), epsilon = 1e-12);
        }
    }

    #[test]
    fn psi_scale_divides_pointwise() {
        let w = WeightFunction::power(1.0).unwrap();
        let w2 = w.psi_scale(2).unwrap();
        assert_abs_diff_eq!(w2.eval(3.0), 1.5, epsilon = 1e-15);
        let w3 = WeightFunction::lin_log(1).unwrap().psi_scale(3).unwrap();
        assert_abs_diff_eq!(w3.eval(1.0), 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(classify(&w2), classify(&w));
    }

    #[test]
    fn divergent_partial_integrals_grow_without_bound() {
        let w = WeightFunction::lin_log(1).unwrap();
        let a = w.partial_integral(1e3);
        let b = w.partial_integral(1e6);
        let c = w.partial_integral(1e9);
        assert!(a < b && b < c);
        // the true increment is ln((1 + ln 1e9)/(1 + ln 1e6)) ~ 0.38
        assert!(c - b > 0.3); // still growing far out
    }

    #[test]
    fn psi_norm_basics() {
        let psi = WeightFunction::power(1.0).unwrap();
        let zero: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 0.0)).collect();
        assert_eq!(psi_norm(zero.iter().copied(), &psi).unwrap(), 0.0);
        // f(x) = e^{psi(|x|)} -> ratio identically 1
        let ratio: Vec<(f64, f64)> = (0..50)
            .map(|i| {
                let r = i as f64 * 0.1;
                (r, psi.eval(r).exp())
            })
            .collect();
        assert_abs_diff_eq!(psi_norm(ratio.iter().copied(), &psi).unwrap(), 1.0, epsilon = 1e-12);
        assert!(matches!(
            psi_norm(std::iter::empty(), &psi),
            Err(WeightError::EmptyGrid)
        ));
    }

    #[test]
    fn psi_norm_is_a_norm_on_samples() {
        // homogeneity and triangle inequality over sampled magnitudes
        let psi = WeightFunction::power(0.5).unwrap();
        let f: Vec<(f64, f64)> = (0..40).map(|i| (i as f64 * 0.3, (i as f64).sin().abs())).collect();
        let g: Vec<(f64, f64)> = (0..40).map(|i| (i as f64 * 0.3, (i as f64 * 0.7).cos().abs())).collect();
        let nf = psi_norm(f.iter().copied(), &psi).unwrap();
        let ng = psi_norm(g.iter().copied(), &psi).unwrap();
        let scaled: Vec<(f64, f64)> = f.iter().map(|(r, v)| (*r, 2.5 * v)).collect();
        assert_abs_diff_eq!(psi_norm(scaled.iter().copied(), &psi).unwrap(), 2.5 * nf, epsilon = 1e-12);
        let sum: Vec<(f64, f64)> = f.iter().zip(&g).map(|((r, a), (_, b))| (*r, a + b)).collect();
        assert!(psi_norm(sum.iter().copied(), &psi).unwrap() <= nf + ng + 1e-12);
    }
}
