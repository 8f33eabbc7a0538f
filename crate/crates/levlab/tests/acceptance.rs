//! Acceptance gate: one test per criterion, each printing a single
//! PASS/FAIL line (run with `--nocapture` to see them live).

use num_complex::Complex64;

use levlab::dichotomy::{
    ingham_witness, step2_ladder, witness_on_space, witness_spectrum, WitnessPayload,
    WitnessSpace,
};
use levlab::dyadic::{
    approximate, DyadicApproximation, DyadicScheme, KernelFunction, RadonMeasureRep,
};
use levlab::euclid::{
    fourier_forward, fourier_inverse, radial_fourier, radon_inverse_radial, radon_radial,
    slice_projection_check, GridFunction, GridSpec, RadialProfile, RadonInverseOptions,
};
use levlab::hyperbolic::{
    abel_forward, heat_hat, sft_at, sft_forward, sft_inverse, BiinvariantFunction,
    HyperbolicModel,
};
use levlab::numerics::{simpson_weights, trapezoid_weights};
use levlab::weights::{Verdict, WeightFunction, DEFAULT_HORIZON, DEFAULT_THRESHOLD};

fn gate(n: u32, what: &str, body: impl FnOnce() -> Result<(), String>) {
    match body() {
        Ok(()) => println!("acceptance {n:2} ({what}): PASS"),
        Err(detail) => {
            println!("acceptance {n:2} ({what}): FAIL — {detail}");
            panic!("criterion {n} ({what}) failed: {detail}");
        }
    }
}

fn ensure(cond: bool, detail: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(detail())
    }
}

/// The smooth bump `exp(-1/(1-x^2))` rescaled to `[lo, hi]`.
fn bump(t: f64, lo: f64, hi: f64) -> f64 {
    let x = (2.0 * t - lo - hi) / (hi - lo);
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

fn classify(psi: &WeightFunction) -> Verdict {
    psi.classify_levinson(DEFAULT_HORIZON, DEFAULT_THRESHOLD)
        .expect("classifier runs")
        .verdict
}

#[test]
fn criterion_01_levinson_classifier() {
    gate(1, "Levinson classifier", || {
        ensure(
            classify(&WeightFunction::lin_log(1).unwrap()) == Verdict::Divergent,
            || "r/(1+log r) must be divergent".into(),
        )?;
        ensure(
            classify(&WeightFunction::lin_log(2).unwrap()) == Verdict::Convergent,
            || "r/(1+log r)^2 must be convergent".into(),
        )?;
        for a in [0.25, 0.5, 0.75, 0.9, 1.0] {
            let got = classify(&WeightFunction::power(a).unwrap());
            let want = if a == 1.0 { Verdict::Divergent } else { Verdict::Convergent };
            ensure(got == want, || format!("r^{a}: got {got:?}, want {want:?}"))?;
        }
        Ok(())
    });
}

#[test]
fn criterion_02_fourier_roundtrip_and_parseval() {
    gate(2, "euclidean Fourier round trips", || {
        for d in 1..=3usize {
            let n_space = [193, 97, 49][d - 1];
            let spec = GridSpec::centered_cube(d, 4.5, n_space).unwrap();
            let f = GridFunction::from_fn(spec.clone(), None, |x| {
                let r2: f64 = x.iter().map(|c| c * c).sum();
                Complex64::new((-r2).exp(), 0.0)
            })
            .unwrap();
            let freq = GridSpec::centered_cube(d, 12.0, n_space).unwrap();
            let big_f = fourier_forward(&f, &freq).unwrap();
            let back = fourier_inverse(&big_f, &spec).unwrap();
            let err = f
                .values
                .iter()
                .zip(&back.values)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            ensure(err < 1e-6, || format!("d = {d}: roundtrip sup error {err:.3e}"))?;

            // Parseval: int |f|^2 dx = (2 pi)^{-d} int |fhat|^2 dxi; both
            // integrands vanish at the grid edges, so plain Riemann sums
            // converge spectrally
            let dx = 9.0 / (n_space - 1) as f64;
            let dxi = 24.0 / (n_space - 1) as f64;
            let lhs: f64 =
                f.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx.powi(d as i32);
            let rhs: f64 = big_f.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
                * dxi.powi(d as i32)
                * (2.0 * std::f64::consts::PI).powi(-(d as i32));
            let rel = (lhs - rhs).abs() / lhs;
            ensure(rel < 1e-4, || format!("d = {d}: Parseval off by {rel:.3e} relative"))?;
        }
        Ok(())
    });
}

#[test]
fn criterion_03_slice_projection() {
    gate(3, "slice projection identity", || {
        let disc_at = |n: usize| -> f64 {
            let f = RadialProfile::from_fn(3, 1.5, n, Some(1.5), |r| {
                Complex64::new(bump(r, -1.5, 1.5), 0.0)
            })
            .unwrap();
            slice_projection_check(&f, 10.0, 41).unwrap()
        };
        let coarse = disc_at(129);
        let fine = disc_at(257);
        ensure(fine < 1e-6, || format!("discrepancy {fine:.3e} at n = 257"))?;
        // the quadratures converge at high order, so doubling the grid at
        // least halves the discrepancy (observed: far better than half)
        let ratio = fine / coarse;
        ensure(
            ratio <= 0.65,
            || format!("refinement ratio {ratio:.3} (coarse {coarse:.3e}, fine {fine:.3e})"),
        )
    });
}

#[test]
fn criterion_04_radon_bijection() {
    gate(4, "radial Radon bijection", || {
        let n = 257;
        let f = RadialProfile::from_fn(3, 1.5, n, Some(1.2), |r| {
            Complex64::new(bump(r, -1.2, 1.2), 0.0)
        })
        .unwrap();
        let g = radon_radial(&f).unwrap();
        let opts = RadonInverseOptions { lambda_max: 600.0, ..RadonInverseOptions::default() };
        let back = radon_inverse_radial(&g, 3, 1.5, &opts).unwrap();
        let err = f
            .radii
            .iter()
            .map(|&r| (f.eval(r) - back.eval(r)).norm())
            .fold(0.0, f64::max);
        ensure(err < 1e-4, || format!("inversion sup error {err:.3e}"))?;
        // support radius preserved within one grid cell, measured from
        // the values at a shared threshold (the smooth bump itself dips
        // under any fixed threshold before its nominal edge)
        let measured = |p: &RadialProfile| -> f64 {
            let sup = p.sup_abs();
            p.radii
                .iter()
                .zip(&p.values)
                .filter(|(_, v)| v.norm() > 1e-4 * sup)
                .map(|(r, _)| *r)
                .fold(0.0, f64::max)
        };
        let cell = back.dr().max(f.dr());
        let (s_in, s_out) = (measured(&f), measured(&back));
        ensure(
            (s_out - s_in).abs() <= cell + 1e-12,
            || format!("support {s_out:.4} vs input {s_in:.4} (cell {cell:.4})"),
        )
    });
}

/// Reference value of `F(lambda) = int e^{i lambda y_1} dmu(y)` for the
/// radial density below: reduce to a 1-D integral of the marginal.
fn plane_wave_reference(support: f64, lambda: f64) -> Complex64 {
    let n = 1601;
    let w_out = simpson_weights(n, 2.0 * support / (n - 1) as f64);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let y0 = -support + 2.0 * support * i as f64 / (n - 1) as f64;
        // marginal g(y0) = int bump(|y|) dy1
        let half = (support * support - y0 * y0).max(0.0).sqrt();
        let m = 401;
        let w_in = simpson_weights(m, 2.0 * half / (m - 1) as f64);
        let mut g = 0.0;
        for j in 0..m {
            let y1 = -half + 2.0 * half * j as f64 / (m - 1) as f64;
            let r = (y0 * y0 + y1 * y1).sqrt();
            g += bump(r, -support, support) * w_in[j];
        }
        acc += Complex64::from_polar(1.0, lambda * y0) * (g * w_out[i]);
    }
    acc
}

#[test]
fn criterion_05_dyadic_certificates() {
    gate(5, "dyadic discretization certificates", || {
        let support = 0.6;
        let tau = 5.0;
        let measure = RadonMeasureRep::density(2, 1.0, Some(support), move |y| {
            let r = (y[0] * y[0] + y[1] * y[1]).sqrt();
            Complex64::new(bump(r, -support, support), 0.0)
        })
        .unwrap();
        let kernel = KernelFunction::plane_wave();
        let probes: Vec<f64> = (0..41).map(|i| -tau + 2.0 * tau * i as f64 / 40.0).collect();

        // sweep the tolerance down and keep the first approximation seen
        // at each level
        let mut by_level: std::collections::BTreeMap<u32, DyadicApproximation> =
            std::collections::BTreeMap::new();
        let mut eps = 1.0;
        while eps > 1e-4 {
            let approx = approximate(
                &measure,
                &kernel,
                &probes,
                &DyadicScheme { eps, ..DyadicScheme::default() },
            )
            .unwrap();
            let level = approx.nodes.level;
            by_level.entry(level).or_insert(approx);
            if level > 6 {
                break;
            }
            eps /= 2.0;
        }

        let mut prev_component: Option<f64> = None;
        for n in [4u32, 5, 6] {
            let approx = by_level
                .get(&n)
                .ok_or_else(|| format!("tolerance sweep never produced level {n}"))?;
            // empirical error <= certified bound at every probe
            for lam in &probes {
                let reference = plane_wave_reference(support, *lam);
                let got = approx.evaluate(&kernel, *lam);
                // the reference integral itself carries ~1e-8 quadrature
                // error, which the certificate does not have to cover
                let cert = approx.certified_bound(&kernel, *lam) + 5e-8;
                ensure(
                    (reference - got).norm() <= cert,
                    || {
                        format!(
                            "level {n}, lambda {lam}: |F - h| = {:.3e} > certificate {:.3e}",
                            (reference - got).norm(),
                            cert
                        )
                    },
                )?;
            }
            // the 2^{-n} component halves per level (within 0.4..0.6)
            let m = kernel.lipschitz_at(tau, 2, 1.0);
            let component =
                m * 2f64.sqrt() * 2f64.powi(-(n as i32)) * approx.l1_mass;
            if let Some(prev) = prev_component {
                let ratio = component / prev;
                ensure(
                    (0.4..=0.6).contains(&ratio),
                    || format!("level {n}: component ratio {ratio:.3}"),
                )?;
            }
            prev_component = Some(component);

            // a priori sup bound on 10^3 probes including |lambda| = 100 tau
            let sup = approx.sup_bound(&kernel);
            for i in 0..1000 {
                let lam = -100.0 * tau + 200.0 * tau * i as f64 / 999.0;
                let lam = if i == 999 { 100.0 * tau } else { lam };
                let v = approx.evaluate(&kernel, lam).norm();
                ensure(
                    v <= sup * (1.0 + 1e-12),
                    || format!("level {n}, lambda {lam}: |h| = {v:.6e} > bound {sup:.6e}"),
                )?;
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_06_spherical_function_oracle() {
    gate(6, "spherical function oracle", || {
        let m = HyperbolicModel::new(3).unwrap();
        // quadrature route vs closed form sin(lambda t)/(lambda sinh t)
        let mut worst = 0.0f64;
        for i in 0..=40 {
            let lam = 20.0 * i as f64 / 40.0;
            for j in 1..=20 {
                let t = 5.0 * j as f64 / 20.0;
                let quad = m.phi_integral(Complex64::new(lam, 0.0), t);
                let closed = if lam == 0.0 {
                    t / t.sinh()
                } else {
                    (lam * t).sin() / (lam * t.sinh())
                };
                worst = worst.max((quad - Complex64::new(closed, 0.0)).norm());
            }
        }
        ensure(worst < 1e-9, || format!("quadrature vs closed form: {worst:.3e}"))?;

        // bounds |phi_lambda| <= phi_0 <= 1 and 0 < phi_{i mu} <= e^{mu t} phi_0
        for j in 1..=20 {
            let t = 5.0 * j as f64 / 20.0;
            let phi0 = m.phi_lambda(Complex64::new(0.0, 0.0), t).re;
            ensure(phi0 > 0.0 && phi0 <= 1.0, || format!("phi_0({t}) = {phi0}"))?;
            for i in 0..=40 {
                let lam = 20.0 * i as f64 / 40.0;
                let v = m.phi_lambda(Complex64::new(lam, 0.0), t).norm();
                ensure(
                    v <= phi0 * (1.0 + 1e-12),
                    || format!("|phi_{lam}({t})| = {v} > phi_0 = {phi0}"),
                )?;
            }
            for k in 1..=8 {
                let mu = 2.0 * k as f64 / 8.0;
                let v = m.phi_lambda(Complex64::new(0.0, mu), t);
                ensure(
                    v.im.abs() < 1e-12 && v.re > 0.0 && v.re <= (mu * t).exp() * phi0 * (1.0 + 1e-12),
                    || format!("phi_i{mu}({t}) = {v}"),
                )?;
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_07_inversion_plancherel_heat() {
    gate(7, "spherical inversion, Plancherel, heat", || {
        for d in [2usize, 3] {
            let m = HyperbolicModel::new(d).unwrap();
            let f = BiinvariantFunction::from_fn(4.0, 321, None, |t| {
                Complex64::new((-3.0 * t * t).exp(), 0.0)
            })
            .unwrap();
            let fhat = sft_forward(&m, &f, 16.0, 321).unwrap();
            let back = sft_inverse(&m, &fhat, 4.0, 321).unwrap();
            let err = f
                .values
                .iter()
                .zip(&back.values)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            ensure(err < 1e-4, || format!("H{d}: roundtrip sup {err:.3e}"))?;

            // Plancherel: int |f|^2 J dt = (2 pi)^{-1} int |fhat|^2 |c|^{-2}
            let wt = trapezoid_weights(f.values.len(), f.dt());
            let lhs: f64 = f
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| v.norm_sqr() * m.volume_density(f.t(i)) * wt[i])
                .sum();
            let wl = trapezoid_weights(fhat.values.len(), fhat.dl());
            let rhs: f64 = fhat
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| v.norm_sqr() * m.c_density(fhat.lambda(i)) * wl[i])
                .sum::<f64>()
                / (2.0 * std::f64::consts::PI);
            let rel = (lhs - rhs).abs() / lhs;
            ensure(rel < 1e-3, || format!("H{d}: Plancherel off {rel:.3e} relative"))?;

            // heat semigroup is an exact spectral product
            let h1 = heat_hat(&m, 0.2, 10.0, 241).unwrap();
            let h2 = heat_hat(&m, 0.3, 10.0, 241).unwrap();
            let h3 = heat_hat(&m, 0.5, 10.0, 241).unwrap();
            let worst = (0..241)
                .map(|i| (h1.values[i] * h2.values[i] - h3.values[i]).norm())
                .fold(0.0, f64::max);
            ensure(worst < 1e-15, || format!("H{d}: semigroup defect {worst:.3e}"))?;

            // unit mass of the heat kernel
            let hhat = heat_hat(&m, 0.3, 10.0, 241).unwrap();
            let h = sft_inverse(&m, &hhat, 9.0, 481).unwrap();
            let w = simpson_weights(h.values.len(), h.dt());
            let mass: f64 = h
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| v.re * m.volume_density(h.t(i)) * w[i])
                .sum();
            ensure((mass - 1.0).abs() < 1e-3, || format!("H{d}: heat mass {mass}"))?;
        }
        Ok(())
    });
}

#[test]
fn criterion_08_abel_consistency() {
    gate(8, "Abel transform consistency", || {
        let m = HyperbolicModel::new(3).unwrap();
        let f = BiinvariantFunction::from_fn(4.0, 321, None, |t| {
            Complex64::new((-3.0 * t * t).exp(), 0.0)
        })
        .unwrap();
        // F_1(A f) = fhat
        let g = abel_forward(&m, &f, 7.0, 281, 16.0, 321).unwrap();
        let mut worst = 0.0f64;
        for i in 0..=32 {
            let lam = 8.0 * i as f64 / 32.0;
            let lhs = g.fourier1(lam);
            let rhs = sft_at(&m, &f, Complex64::new(lam, 0.0));
            worst = worst.max((lhs - rhs).norm());
        }
        ensure(worst < 1e-6, || format!("F_1 o Abel vs transform: {worst:.3e}"))?;

        // Abel round trip
        let back = levlab::hyperbolic::abel_inverse(&m, &g, 16.0, 321, 4.0, 321).unwrap();
        let err = f
            .values
            .iter()
            .zip(&back.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        ensure(err < 1e-4, || format!("Abel roundtrip sup {err:.3e}"))?;

        // Paley-Wiener support direction on the Abel (euclidean) side: a
        // function supported in [0, L] and hugging the right endpoint has
        // |ghat(i mu)| = |int_0^L g e^{mu s} ds| <= C e^{L mu} with the
        // fitted C(mu) = |ghat(i mu)| e^{-L mu} stable in mu
        let l_supp = 2.0;
        let n = 1601;
        let w = simpson_weights(n, l_supp / (n - 1) as f64);
        let mut cs = Vec::new();
        for k in 0..=8 {
            let mu = 2.0 * k as f64 / 8.0;
            let v: f64 = (0..n)
                .map(|i| {
                    let s = l_supp * i as f64 / (n - 1) as f64;
                    bump(s, l_supp - 0.08, l_supp) * (mu * s).exp() * w[i]
                })
                .sum();
            cs.push(v.abs() * (-l_supp * mu).exp());
        }
        let mean: f64 = cs.iter().sum::<f64>() / cs.len() as f64;
        for (k, c) in cs.iter().enumerate() {
            ensure(
                (c - mean).abs() <= 0.1 * mean,
                || format!("C(mu_{k}) = {c:.6e} deviates from mean {mean:.6e}"),
            )?;
        }
        Ok(())
    });
}

#[test]
fn criterion_09_divergent_ladder() {
    gate(9, "divergent-side vanishing ladder", || {
        let m = HyperbolicModel::new(3).unwrap();
        let psi = WeightFunction::lin_log(1).unwrap();
        let l = 2.0;
        let lo = 1.05 * l;
        let hi = lo + 1.0;
        let f = BiinvariantFunction::from_fn(hi, 249, Some(hi), |t| {
            Complex64::new(bump(t, lo, hi), 0.0)
        })
        .unwrap();
        let ladder = [1e-1, 1e-2, 1e-3];
        let start = std::time::Instant::now();
        // the bound chain energy <= residual * weighted_mass + pairing +
        // slack is asserted inside on every rung
        let rungs = step2_ladder(&m, &f, &psi, l, &ladder, 8)
            .map_err(|e| format!("ladder failed: {e}"))?;
        let elapsed = start.elapsed();
        ensure(rungs.len() == 3, || format!("{} rungs", rungs.len()))?;
        for (r, eps) in rungs.iter().zip(ladder) {
            ensure(
                r.ratio <= eps,
                || format!("eps {eps:.0e}: energy/mass = {:.3e}", r.ratio),
            )?;
            ensure(
                r.bound.pairing_time_domain == Some(0.0),
                || "time-domain pairing must vanish exactly".into(),
            )?;
        }
        ensure(
            elapsed.as_secs() < 600,
            || format!("ladder took {elapsed:?}, budget is 10 min"),
        )
    });
}

#[test]
fn criterion_10_convergent_witnesses() {
    gate(10, "convergent-side witnesses", || {
        let l = 2.0;
        let weights: Vec<(&str, WeightFunction)> = vec![
            ("lin-log-2", WeightFunction::lin_log(2).unwrap()),
            ("sqrt", WeightFunction::power(0.5).unwrap()),
        ];
        for (name, psi) in &weights {
            // real line
            let line = ingham_witness(psi, l).map_err(|e| format!("{name} line: {e}"))?;
            ensure(line.support_leak < 1e-8, || {
                format!("{name} line: support leak {:.3e}", line.support_leak)
            })?;
            // decay certificate holds on fresh samples of [1, 1e4]
            for i in 0..500 {
                let xi = 10f64.powf(4.0 * i as f64 / 499.0);
                let v = witness_spectrum(&line.params.a, line.params.smooth_type, xi).abs();
                ensure(
                    v <= line.decay_constant * (-psi.eval(xi)).exp() * (1.0 + 1e-12),
                    || format!("{name} line: decay fails at xi = {xi}"),
                )?;
            }

            // R^3 radial
            let r3 = witness_on_space(psi, l, WitnessSpace::EuclideanRadial(3))
                .map_err(|e| format!("{name} r3: {e}"))?;
            let WitnessPayload::EuclideanRadial(profile) = &r3.payload else {
                return Err(format!("{name} r3: wrong payload"));
            };
            // support mass outside the ball, relative
            let wts = trapezoid_weights(profile.values.len(), profile.dr());
            let total: f64 = profile
                .radii
                .iter()
                .zip(&profile.values)
                .zip(&wts)
                .map(|((r, v), w)| v.norm() * r * r * w)
                .sum();
            let outside: f64 = profile
                .radii
                .iter()
                .zip(&profile.values)
                .zip(&wts)
                .filter(|((r, _), _)| **r > l)
                .map(|((r, v), w)| v.norm() * r * r * w)
                .sum();
            ensure(outside <= 1e-8 * total, || {
                format!("{name} r3: leak {:.3e}", outside / total)
            })?;
            // the d-dimensional transform coincides with the certified
            // line spectrum F on rays (slice projection); tie the payload
            // to F on the grid-resolvable range, the line decay
            // certificate on [1, 1e4] then covers the lift
            let f0 = radial_fourier(profile, 0.0).norm();
            for i in 0..=80 {
                let lam = 40.0 * i as f64 / 80.0;
                let lifted = radial_fourier(profile, lam).norm();
                let spectrum = witness_spectrum(&r3.params.a, r3.params.smooth_type, lam).abs();
                ensure(
                    (lifted - spectrum).abs() <= 1e-5 * f0,
                    || {
                        format!(
                            "{name} r3: transform {lifted:.6e} vs spectrum {spectrum:.6e} at lambda = {lam}"
                        )
                    },
                )?;
            }

            // H^3
            let m = HyperbolicModel::new(3).unwrap();
            let h3 = witness_on_space(psi, l, WitnessSpace::Hyperbolic(m))
                .map_err(|e| format!("{name} h3: {e}"))?;
            ensure(h3.support_leak < 1e-8, || {
                format!("{name} h3: support leak {:.3e}", h3.support_leak)
            })?;
            let (mass, change) =
                h3.weighted_mass.ok_or_else(|| format!("{name} h3: no mass"))?;
            ensure(mass.is_finite() && change < 1e-6, || {
                format!("{name} h3: mass {mass:.3e}, doubling change {change:.3e}")
            })?;
            ensure(h3.nontriviality > 1e-6, || {
                format!("{name} h3: nontriviality {:.3e}", h3.nontriviality)
            })?;
        }
        Ok(())
    });
}

#[test]
fn criterion_11_determinism() {
    gate(11, "deterministic reports", || {
        let psi = WeightFunction::lin_log(2).unwrap();
        let m = HyperbolicModel::new(3).unwrap();

        // witness construction twice, serialized: must agree bit for bit
        let a = witness_on_space(&psi, 2.0, WitnessSpace::Hyperbolic(m)).unwrap();
        let b = witness_on_space(&psi, 2.0, WitnessSpace::Hyperbolic(m)).unwrap();
        let ja = serde_json::to_string(&a).unwrap();
        let jb = serde_json::to_string(&b).unwrap();
        ensure(ja == jb, || "witness reports differ between reruns".into())?;

        // ladder rungs twice
        let div = WeightFunction::lin_log(1).unwrap();
        let f = BiinvariantFunction::from_fn(3.1, 249, Some(3.1), |t| {
            Complex64::new(bump(t, 2.1, 3.1), 0.0)
        })
        .unwrap();
        let r1 = step2_ladder(&m, &f, &div, 2.0, &[1e-1], 8).unwrap();
        let r2 = step2_ladder(&m, &f, &div, 2.0, &[1e-1], 8).unwrap();
        ensure(
            serde_json::to_string(&r1).unwrap() == serde_json::to_string(&r2).unwrap(),
            || "ladder reports differ between reruns".into(),
        )
    });
}
