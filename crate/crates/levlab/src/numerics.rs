//! Shared numerical kernels: Gauss-Legendre rules, composite quadrature,
//! local polynomial interpolation, Halton points and a complex log-gamma.

use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Computed by Newton iteration on the Legendre recurrence and cached
/// per order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    static CACHE: OnceLock<Mutex<HashMap<usize, (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().unwrap().get(&n) {
        return rule.clone();
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and P_n'(x) by recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    cache
        .lock()
        .unwrap()
        .insert(n, (nodes.clone(), weights.clone()));
    (nodes, weights)
}

/// Composite Gauss-Legendre integration of `f` over [a, b] with `panels`
/// equal panels of the given order.
pub fn integrate_gl<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let c = lo + 0.5 * h;
        let mut s = 0.0;
        for (x, w) in nodes.iter().zip(&weights) {
            s += w * f(c + 0.5 * h * x);
        }
        total += 0.5 * h * s;
    }
    total
}

/// Complex-valued variant of [`integrate_gl`].
pub fn integrate_gl_complex<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    panels: usize,
    order: usize,
) -> Complex64 {
    let (nodes, weights) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let c = lo + 0.5 * h;
        let mut s = Complex64::new(0.0, 0.0);
        for (x, w) in nodes.iter().zip(&weights) {
            s += f(c + 0.5 * h * x) * *w;
        }
        total += s * (0.5 * h);
    }
    total
}

/// Composite Simpson weights for a uniform grid of `n` samples spaced `dx`.
///
/// For even `n` the last interval falls back to the trapezoid rule.
pub fn simpson_weights(n: usize, dx: f64) -> Vec<f64> {
    assert!(n >= 2);
    let mut w = vec![0.0; n];
    if n == 2 {
        w[0] = 0.5 * dx;
        w[1] = 0.5 * dx;
        return w;
    }
    let m = if n % 2 == 1 { n } else { n - 1 };
    // Simpson over the odd-length prefix
    w[0] += dx / 3.0;
    w[m - 1] += dx / 3.0;
    for (i, wi) in w.iter_mut().enumerate().take(m - 1).skip(1) {
        *wi += if i % 2 == 1 { 4.0 * dx / 3.0 } else { 2.0 * dx / 3.0 };
    }
    if n % 2 == 0 {
        w[n - 2] += 0.5 * dx;
        w[n - 1] += 0.5 * dx;
    }
    w
}

/// Uniform trapezoid weights. For integrands that vanish (with all
/// derivatives) at both ends, the trapezoid rule converges spectrally by
/// Euler-Maclaurin and beats Simpson, whose weight modulation leaves an
/// O(dx^4) floor on oscillatory integrands.
pub fn trapezoid_weights(n: usize, dx: f64) -> Vec<f64> {
    assert!(n >= 2);
    let mut w = vec![dx; n];
    w[0] = 0.5 * dx;
    w[n - 1] = 0.5 * dx;
    w
}

/// Simpson integral of complex samples on a uniform grid.
pub fn simpson_complex(values: &[Complex64], dx: f64) -> Complex64 {
    let w = simpson_weights(values.len(), dx);
    values
        .iter()
        .zip(&w)
        .map(|(v, wi)| v * *wi)
        .sum()
}

/// Simpson integral of real samples on a uniform grid.
pub fn simpson_real(values: &[f64], dx: f64) -> f64 {
    let w = simpson_weights(values.len(), dx);
    values.iter().zip(&w).map(|(v, wi)| v * wi).sum()
}

/// Local 4-point Lagrange (cubic) interpolation on a uniform grid starting
/// at `x0` with spacing `dx`. Out-of-range queries clamp to the end values.
pub fn cubic_interp(values: &[Complex64], x0: f64, dx: f64, x: f64) -> Complex64 {
    let n = values.len();
    assert!(n >= 2);
    let t = (x - x0) / dx;
    if t <= 0.0 {
        return values[0];
    }
    if t >= (n - 1) as f64 {
        return values[n - 1];
    }
    if n < 4 {
        // linear fallback
        let i = t.floor() as usize;
        let f = t - i as f64;
        return values[i] * (1.0 - f) + values[i + 1] * f;
    }
    let i = (t.floor() as usize).clamp(1, n - 3);
    let s = t - i as f64; // in [-? .. ], relative to node i
    let (ym1, y0, y1, y2) = (values[i - 1], values[i], values[i + 1], values[i + 2]);
    // Lagrange basis on nodes -1, 0, 1, 2
    let lm1 = -s * (s - 1.0) * (s - 2.0) / 6.0;
    let l0 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    let l1 = -(s + 1.0) * s * (s - 2.0) / 2.0;
    let l2 = (s + 1.0) * s * (s - 1.0) / 6.0;
    ym1 * lm1 + y0 * l0 + y1 * l1 + y2 * l2
}

/// Real-valued variant of [`cubic_interp`].
pub fn cubic_interp_real(values: &[f64], x0: f64, dx: f64, x: f64) -> f64 {
    let n = values.len();
    assert!(n >= 2);
    let t = (x - x0) / dx;
    if t <= 0.0 {
        return values[0];
    }
    if t >= (n - 1) as f64 {
        return values[n - 1];
    }
    if n < 4 {
        let i = t.floor() as usize;
        let f = t - i as f64;
        return values[i] * (1.0 - f) + values[i + 1] * f;
    }
    let i = (t.floor() as usize).clamp(1, n - 3);
    let s = t - i as f64;
    let (ym1, y0, y1, y2) = (values[i - 1], values[i], values[i + 1], values[i + 2]);
    let lm1 = -s * (s - 1.0) * (s - 2.0) / 6.0;
    let l0 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    let l1 = -(s + 1.0) * s * (s - 2.0) / 2.0;
    let l2 = (s + 1.0) * s * (s - 1.0) / 6.0;
    ym1 * lm1 + y0 * l0 + y1 * l1 + y2 * l2
}

/// The `index`-th element of the van der Corput sequence in the given base.
pub fn van_der_corput(mut index: u64, base: u64) -> f64 {
    let mut result = 0.0;
    let mut f = 1.0 / base as f64;
    while index > 0 {
        result += f * (index % base) as f64;
        index /= base;
        f /= base as f64;
    }
    result
}

const HALTON_BASES: [u64; 6] = [2, 3, 5, 7, 11, 13];

/// Deterministic low-discrepancy points in the ball of radius `r` around
/// the origin of R^dim (Halton points in the bounding cube, filtered).
pub fn halton_ball(dim: usize, r: f64, count: usize) -> Vec<Vec<f64>> {
    assert!(dim <= HALTON_BASES.len());
    let mut out = Vec::with_capacity(count);
    let mut index = 1u64;
    while out.len() < count {
        let p: Vec<f64> = (0..dim)
            .map(|j| (2.0 * van_der_corput(index, HALTON_BASES[j]) - 1.0) * r)
            .collect();
        if p.iter().map(|x| x * x).sum::<f64>() < r * r {
            out.push(p);
        }
        index += 1;
    }
    out
}

/// Log-gamma for complex argument via the Lanczos approximation (g = 7).
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if z.re < 0.5 {
        // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        let pi = std::f64::consts::PI;
        let lnpi = Complex64::new(pi.ln(), 0.0);
        return lnpi - (Complex64::new(pi, 0.0) * z).sin().ln() - ln_gamma_complex(Complex64::new(1.0, 0.0) - z);
    }
    let zm1 = z - 1.0;
    let mut x = Complex64::new(COEF[0], 0.0);
    for (i, c) in COEF.iter().enumerate().skip(1) {
        x += Complex64::new(*c, 0.0) / (zm1 + i as f64);
    }
    let t = zm1 + G + 0.5;
    let half_ln_two_pi = 0.5 * (2.0 * std::f64::consts::PI).ln();
    Complex64::new(half_ln_two_pi, 0.0) + (zm1 + 0.5) * t.ln() - t + x.ln()
}

/// Bessel J0 by composite Gauss-Legendre on the angular representation
/// J0(x) = (1/pi) * int_0^pi cos(x sin t) dt. Panel count scales with |x|.
pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    let panels = 2 + (ax / 4.0).ceil() as usize;
    let v = integrate_gl(|t| (ax * t.sin()).cos(), 0.0, std::f64::consts::PI, panels, 24);
    v / std::f64::consts::PI
}

/// sin(x)/x with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gl_integrates_polynomials_exactly() {
        // order n is exact through degree 2n-1
        let v = integrate_gl(|x| x.powi(7) + 3.0 * x * x, 0.0, 2.0, 1, 4);
        assert_abs_diff_eq!(v, 256.0 / 8.0 + 8.0, epsilon = 1e-12);
    }

    #[test]
    fn simpson_matches_smooth_integral() {
        let n = 401;
        let dx = 1.0 / (n - 1) as f64;
        let vals: Vec<f64> = (0..n).map(|i| (i as f64 * dx).exp()).collect();
        assert_abs_diff_eq!(simpson_real(&vals, dx), std::f64::consts::E - 1.0, epsilon = 1e-10);
    }

    #[test]
    fn cubic_interp_reproduces_cubics() {
        let vals: Vec<f64> = (0..10).map(|i| {
            let x = i as f64 * 0.5;
            x * x * x - 2.0 * x + 1.0
        }).collect();
        let x = 1.73;
        assert_abs_diff_eq!(
            cubic_interp_real(&vals, 0.0, 0.5, x),
            x * x * x - 2.0 * x + 1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn lanczos_gamma_known_values() {
        // Gamma(5) = 24
        let v = ln_gamma_complex(Complex64::new(5.0, 0.0));
        assert_abs_diff_eq!(v.re, 24.0f64.ln(), epsilon = 1e-12);
        // |Gamma(i)|^2 = pi / sinh(pi)
        let g = ln_gamma_complex(Complex64::new(0.0, 1.0));
        let expect = (std::f64::consts::PI / std::f64::consts::PI.sinh()).ln();
        assert_abs_diff_eq!(2.0 * g.re, expect, epsilon = 1e-12);
    }

    #[test]
    fn j0_reference_values() {
        // Abramowitz & Stegun 9.4
        assert_abs_diff_eq!(bessel_j0(0.0), 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(bessel_j0(1.0), 0.765_197_686_557_966_6, epsilon = 1e-11);
        assert_abs_diff_eq!(bessel_j0(5.0), -0.177_596_771_314_338_3, epsilon = 1e-11);
        assert_abs_diff_eq!(bessel_j0(40.0), 0.007_366_890_584_237_29, epsilon = 1e-10);
    }

    #[test]
    fn halton_points_stay_in_ball() {
        for p in halton_ball(3, 2.0, 200) {
            assert!(p.iter().map(|x| x * x).sum::<f64>() < 4.0);
        }
    }
}
