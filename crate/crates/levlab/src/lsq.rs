//! Weighted complex least-squares with Lawson reweighting toward a weighted
//! sup-norm (minimax) objective.
//!
//! Given basis vectors b_j, a target y, and pointwise weights psi_m, we want
//! coefficients c minimizing sup_m |y_m - sum_j c_j b_{j,m}| e^{-psi_m}.
//! A plain L^2 solve with weights e^{-2 psi} is a good surrogate; Lawson
//! iterations re-weight it toward the sup objective. The reported residual
//! is always the true weighted sup over the grid.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Result of a weighted fit.
pub struct FitOutcome {
    pub coefficients: Vec<Complex64>,
    /// sup_m |residual_m| e^{-psi_m}, evaluated exactly on the grid.
    pub residual_weighted_sup: f64,
    /// True if the SVD solve truncated small singular values.
    pub regularized: bool,
}

const LAWSON_ITERS: usize = 15;
const SVD_RELATIVE_CUTOFF: f64 = 1e-12;

/// Solve the weighted problem described in the module docs.
///
/// `basis[j][m]` is the j-th basis vector sampled at grid point m; `psi[m]`
/// is the weight exponent at that point.
pub fn weighted_minimax_fit(
    basis: &[Vec<Complex64>],
    target: &[Complex64],
    psi: &[f64],
) -> FitOutcome {
    let n = basis.len();
    let m = target.len();
    assert!(n > 0 && m > 0 && psi.len() == m);
    assert!(basis.iter().all(|b| b.len() == m));
    let a = DMatrix::from_fn(m, n, |r, c| basis[c][r]);
    let y = DVector::from_fn(m, |r, _| target[r]);
    let env: Vec<f64> = psi.iter().map(|p| (-p).exp()).collect();

    let weighted_sup = |coef: &DVector<Complex64>| -> f64 {
        let r = &y - &a * coef;
        r.iter()
            .zip(&env)
            .map(|(v, e)| v.norm() * e)
            .fold(0.0, f64::max)
    };

    // Lawson weights start at the squared envelope (plain weighted L^2).
    let mut lawson: Vec<f64> = env.iter().map(|e| e * e).collect();
    let mut best: Option<(DVector<Complex64>, f64)> = None;
    let mut regularized = false;
    for _ in 0..LAWSON_ITERS {
        let sqrt_w: Vec<f64> = lawson.iter().map(|w| w.sqrt()).collect();
        let aw = DMatrix::from_fn(m, n, |r, c| a[(r, c)] * sqrt_w[r]);
        let yw = DVector::from_fn(m, |r, _| y[r] * sqrt_w[r]);
        let svd = aw.svd(true, true);
        let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let cutoff = SVD_RELATIVE_CUTOFF * sigma_max.max(f64::MIN_POSITIVE);
        if svd.singular_values.iter().any(|s| *s <= cutoff) {
            regularized = true;
        }
        let coef = match svd.solve(&yw, cutoff) {
            Ok(c) => c,
            Err(_) => break,
        };
        let score = weighted_sup(&coef);
        let improved = best.as_ref().map_or(true, |(_, s)| score < *s);
        // residual-magnitude reweighting pushes the L^2 solve toward minimax
        let r = &y - &a * &coef;
        let mut total = 0.0;
        for (w, (rv, e)) in lawson.iter_mut().zip(r.iter().zip(&env)) {
            *w *= (rv.norm() * e).max(1e-300);
            total += *w;
        }
        if total > 0.0 {
            for w in &mut lawson {
                *w /= total;
            }
        }
        if improved {
            best = Some((coef, score));
        }
    }
    let (coef, score) = best.unwrap_or_else(|| {
        let zero = DVector::from_element(n, Complex64::new(0.0, 0.0));
        let s = weighted_sup(&zero);
        (zero, s)
    });
    FitOutcome {
        coefficients: coef.iter().copied().collect(),
        residual_weighted_sup: score,
        regularized,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_member_recovers_coefficients() {
        let m = 60;
        let xs: Vec<f64> = (0..m).map(|i| i as f64 / 10.0).collect();
        let b0: Vec<Complex64> = xs.iter().map(|x| Complex64::from_polar(1.0, 0.7 * x)).collect();
        let b1: Vec<Complex64> = xs.iter().map(|x| Complex64::from_polar(1.0, -0.2 * x)).collect();
        let c0 = Complex64::new(2.0, 1.0);
        let c1 = Complex64::new(-0.5, 0.3);
        let y: Vec<Complex64> = b0.iter().zip(&b1).map(|(a, b)| c0 * a + c1 * b).collect();
        let psi: Vec<f64> = xs.clone();
        let out = weighted_minimax_fit(&[b0, b1], &y, &psi);
        assert!((out.coefficients[0] - c0).norm() < 1e-9);
        assert!((out.coefficients[1] - c1).norm() < 1e-9);
        assert!(out.residual_weighted_sup < 1e-10);
    }

    #[test]
    fn duplicate_basis_is_regularized_not_fatal() {
        let m = 40;
        let b: Vec<Complex64> = (0..m)
            .map(|i| Complex64::from_polar(1.0, 0.3 * i as f64))
            .collect();
        let y: Vec<Complex64> = b.iter().map(|v| v * 3.0).collect();
        let psi = vec![0.0; m];
        let out = weighted_minimax_fit(&[b.clone(), b], &y, &psi);
        assert!(out.regularized);
        assert!(out.residual_weighted_sup < 1e-9);
    }

    #[test]
    fn lawson_never_reports_worse_than_plain_l2() {
        // the reported residual is the best over iterations, so it is at
        // most the first (plain weighted L^2) iterate's sup residual
        let m = 80;
        let xs: Vec<f64> = (0..m).map(|i| i as f64 * 0.05).collect();
        let b0: Vec<Complex64> = xs.iter().map(|x| Complex64::new(x.cos(), 0.0)).collect();
        let y: Vec<Complex64> = xs.iter().map(|x| Complex64::new((2.0 * x).cos(), 0.0)).collect();
        let psi: Vec<f64> = xs.iter().map(|x| x.sqrt()).collect();
        let env: Vec<f64> = psi.iter().map(|p| (-p).exp()).collect();
        let out = weighted_minimax_fit(&[b0.clone()], &y, &psi);
        // brute-force the single-coefficient weighted L^2 optimum
        let num: Complex64 = b0
            .iter()
            .zip(&y)
            .zip(&env)
            .map(|((b, yv), e)| b.conj() * yv * (e * e))
            .sum();
        let den: f64 = b0.iter().zip(&env).map(|(b, e)| b.norm_sqr() * e * e).sum();
        let c = num / den;
        let l2_sup = b0
            .iter()
            .zip(&y)
            .zip(&env)
            .map(|((b, yv), e)| (yv - c * b).norm() * e)
            .fold(0.0, f64::max);
        assert!(out.residual_weighted_sup <= l2_sup + 1e-12);
    }
}
