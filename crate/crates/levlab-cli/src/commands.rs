//! The five commands. Each returns the process exit code; `Err` is mapped
//! to exit 1 by `main`.

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use levlab::dichotomy::{
    ingham_witness, step2_ladder, witness_on_space, witness_spectrum, DichotomyError,
    WitnessFunction, WitnessPayload, WitnessSpace,
};
use levlab::dyadic::{approximate, DyadicScheme, KernelFunction, RadonMeasureRep};
use levlab::euclid::{
    fourier_forward, fourier_inverse, radon_inverse_radial, radon_radial,
    slice_projection_check, GridFunction, GridSpec, RadialProfile, RadonInverseOptions,
};
use levlab::hyperbolic::{
    abel_forward, abel_inverse, sft_forward, sft_inverse, BiinvariantFunction, HyperbolicModel,
};
use levlab::weights::{Verdict, WeightFunction, DEFAULT_HORIZON, DEFAULT_THRESHOLD};

use crate::config::{parse_psi, RunConfig};
use crate::report::Reporter;

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_UNDECIDED: u8 = 2;
pub const EXIT_TOLERANCE: u8 = 3;

/// The smooth bump `exp(-1/(1-x^2))` rescaled to `[lo, hi]`, zero outside.
fn bump(t: f64, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let x = (2.0 * t - lo - hi) / (hi - lo);
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

fn hyperbolic_model(space: &str) -> Result<HyperbolicModel> {
    let d = match space {
        "h2" => 2,
        "h3" => 3,
        "h4" => 4,
        other => bail!("expected a hyperbolic space h2/h3/h4, got `{other}`"),
    };
    Ok(HyperbolicModel::new(d)?)
}

fn euclidean_dim(space: &str) -> Result<usize> {
    match space {
        "r1" => Ok(1),
        "r2" => Ok(2),
        "r3" => Ok(3),
        other => bail!("expected a euclidean space r1/r2/r3, got `{other}`"),
    }
}

fn require<'a, T>(v: &'a Option<T>, what: &str) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| anyhow!("missing required parameter `{what}`"))
}

// ---------------------------------------------------------------- classify

pub fn cmd_classify(cfg: &RunConfig, rep: &Reporter) -> Result<u8> {
    let selector = require(&cfg.psi, "psi")?;
    let psi = parse_psi(selector)?;
    let verdict = psi.classify_levinson(DEFAULT_HORIZON, DEFAULT_THRESHOLD)?;
    rep.write_json(
        "classify.json",
        json!({
            "command": "classify",
            "psi": psi.describe(),
            "verdict": verdict.verdict,
            "numeric_estimate": verdict.numeric_estimate,
            "method": verdict.method,
        }),
    )?;
    println!(
        "psi = {}: {:?} (partial integral {:.6e})",
        psi.describe(),
        verdict.verdict,
        verdict.numeric_estimate
    );
    Ok(match verdict.verdict {
        Verdict::Divergent | Verdict::Convergent => EXIT_OK,
        Verdict::Undecided => EXIT_UNDECIDED,
    })
}

// --------------------------------------------------------------- transform

pub fn cmd_transform(cfg: &RunConfig, rep: &Reporter) -> Result<u8> {
    let op = require(&cfg.op, "op")?.as_str();
    let space = cfg.space.as_deref().unwrap_or("h3");
    let (lo, hi) = cfg.bump.unwrap_or((0.5, 1.5));
    let residual = match op {
        "sft-roundtrip" => sft_roundtrip(space, lo, hi, rep)?,
        "abel-roundtrip" => abel_roundtrip(space, lo, hi, rep)?,
        "fourier-roundtrip" => fourier_roundtrip(space, rep)?,
        "slice-check" => slice_check(space, lo, hi, rep)?,
        "radon-roundtrip" => radon_roundtrip(space, lo, hi, rep)?,
        other => bail!(
            "unknown op `{other}`; expected sft-roundtrip, abel-roundtrip, fourier-roundtrip, slice-check, or radon-roundtrip"
        ),
    };
    let pass = residual <= cfg.tol;
    rep.write_json(
        "residual.json",
        json!({
            "command": "transform",
            "op": op,
            "space": space,
            "residual": residual,
            "tol": cfg.tol,
            "pass": pass,
        }),
    )?;
    println!("{op} on {space}: residual {residual:.6e} (tol {:.1e})", cfg.tol);
    Ok(if pass { EXIT_OK } else { EXIT_TOLERANCE })
}

/// Bump supported on `[lo, hi]`, sampled on `[0, hi]`; zero when `hi <= lo`.
fn hyperbolic_bump(lo: f64, hi: f64) -> Result<BiinvariantFunction> {
    // fine enough in t to resolve phi_lambda oscillations up to the
    // spectral horizons used below
    let t_max = hi.max(1.0);
    let n = ((t_max * 1600.0).round() as usize).max(1601) + 1;
    Ok(BiinvariantFunction::from_fn(t_max, n, Some(t_max), move |t| {
        Complex64::new(bump(t, lo, hi), 0.0)
    })?)
}

fn sup_diff(a: &BiinvariantFunction, b: &BiinvariantFunction) -> f64 {
    a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn sft_roundtrip(space: &str, lo: f64, hi: f64, rep: &Reporter) -> Result<f64> {
    let m = hyperbolic_model(space)?;
    let f = hyperbolic_bump(lo, hi)?;
    let lambda_max = 600.0;
    let fhat = sft_forward(&m, &f, lambda_max, (lambda_max * 20.0) as usize + 1)?;
    let back = sft_inverse(&m, &fhat, f.t_max, f.values.len())?;
    let mut w = rep.csv_writer("input.csv")?;
    f.to_csv(&mut w, None)?;
    let mut w = rep.csv_writer("spectrum.csv")?;
    fhat.to_csv(&mut w, None)?;
    let mut w = rep.csv_writer("output.csv")?;
    back.to_csv(&mut w, None)?;
    Ok(sup_diff(&f, &back))
}

fn abel_roundtrip(space: &str, lo: f64, hi: f64, rep: &Reporter) -> Result<f64> {
    let m = hyperbolic_model(space)?;
    let f = hyperbolic_bump(lo, hi)?;
    let lambda_max = 600.0;
    let n_lambda = (lambda_max * 20.0) as usize + 1;
    let g = abel_forward(&m, &f, f.t_max + 1.0, 4 * f.values.len(), lambda_max, n_lambda)?;
    let back = abel_inverse(&m, &g, lambda_max, n_lambda, f.t_max, f.values.len())?;
    let rows: Vec<Vec<f64>> = g
        .coords()
        .iter()
        .zip(&g.values)
        .map(|(s, v)| vec![*s, v.re, v.im])
        .collect();
    rep.write_csv("abel.csv", "s,re,im", &rows)?;
    let mut w = rep.csv_writer("input.csv")?;
    f.to_csv(&mut w, None)?;
    let mut w = rep.csv_writer("output.csv")?;
    back.to_csv(&mut w, None)?;
    Ok(sup_diff(&f, &back))
}

fn fourier_roundtrip(space: &str, rep: &Reporter) -> Result<f64> {
    let d = euclidean_dim(space)?;
    let n_space = [193, 97, 49][d - 1];
    let n_freq = [193, 97, 49][d - 1];
    let spec = GridSpec::centered_cube(d, 4.5, n_space)?;
    let f = GridFunction::from_fn(spec.clone(), None, |x| {
        let r2: f64 = x.iter().map(|c| c * c).sum();
        Complex64::new((-r2).exp(), 0.0)
    })?;
    let freq = GridSpec::centered_cube(d, 12.0, n_freq)?;
    let big_f = fourier_forward(&f, &freq)?;
    let back = fourier_inverse(&big_f, &spec)?;
    let err = f
        .values
        .iter()
        .zip(&back.values)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let rows: Vec<Vec<f64>> = f
        .iter_points()
        .zip(back.values.iter())
        .map(|((x, v), b)| {
            let mut row = x;
            row.extend([v.re, b.re, (v - b).norm()]);
            row
        })
        .collect();
    let coords: Vec<String> = (0..d).map(|i| format!("x{i}")).collect();
    rep.write_csv(
        "roundtrip.csv",
        &format!("{},input,output,abs_error", coords.join(",")),
        &rows,
    )?;
    Ok(err)
}

fn radial_bump(d: usize, lo: f64, hi: f64) -> Result<RadialProfile> {
    let r_max = hi.max(1.0);
    let n = 257;
    Ok(RadialProfile::from_fn(d, r_max, n, Some(r_max), move |r| {
        Complex64::new(bump(r, lo, hi), 0.0)
    })?)
}

fn slice_check(space: &str, lo: f64, hi: f64, rep: &Reporter) -> Result<f64> {
    let d = if space.starts_with('r') { euclidean_dim(space)? } else { 3 };
    let f = radial_bump(d, lo, hi)?;
    let n_lambda = 41;
    let discrepancy = slice_projection_check(&f, 10.0, n_lambda)?;
    let rows: Vec<Vec<f64>> = (0..n_lambda)
        .map(|i| {
            let lambda = 10.0 * i as f64 / (n_lambda - 1) as f64;
            let lhs = levlab::euclid::radial_fourier(&f, lambda);
            vec![lambda, lhs.re, lhs.im]
        })
        .collect();
    rep.write_csv("slice.csv", "lambda,re,im", &rows)?;
    Ok(discrepancy)
}

fn radon_roundtrip(space: &str, lo: f64, hi: f64, rep: &Reporter) -> Result<f64> {
    let d = if space.starts_with('r') { euclidean_dim(space)? } else { 3 };
    let f = radial_bump(d, lo, hi)?;
    let l = f.r_max();
    let g = radon_radial(&f)?;
    let opts = RadonInverseOptions { lambda_max: 600.0, ..RadonInverseOptions::default() };
    let back = radon_inverse_radial(&g, d, l, &opts)?;
    let err = f
        .radii
        .iter()
        .map(|&r| (f.eval(r) - back.eval(r)).norm())
        .fold(0.0, f64::max);
    let rows: Vec<Vec<f64>> = f
        .radii
        .iter()
        .map(|&r| vec![r, f.eval(r).re, back.eval(r).re])
        .collect();
    rep.write_csv("radon.csv", "r,input,reconstruction", &rows)?;
    Ok(err)
}

// --------------------------------------------------------------- dichotomy

pub fn cmd_dichotomy(cfg: &RunConfig, rep: &Reporter) -> Result<u8> {
    let selector = require(&cfg.psi, "psi")?;
    let psi = parse_psi(selector)?;
    let l = cfg.l.unwrap_or(2.0);
    let verdict = psi.classify_levinson(DEFAULT_HORIZON, DEFAULT_THRESHOLD)?;
    rep.write_json(
        "verdict.json",
        json!({
            "command": "dichotomy",
            "psi": psi.describe(),
            "verdict": verdict.verdict,
            "numeric_estimate": verdict.numeric_estimate,
        }),
    )?;
    match verdict.verdict {
        Verdict::Undecided => {
            println!("psi = {} undecided; no experiment run", psi.describe());
            Ok(EXIT_UNDECIDED)
        }
        Verdict::Divergent => dichotomy_divergent(cfg, rep, &psi, l),
        Verdict::Convergent => dichotomy_convergent(cfg, rep, &psi, l),
    }
}

fn dichotomy_divergent(
    cfg: &RunConfig,
    rep: &Reporter,
    psi: &WeightFunction,
    l: f64,
) -> Result<u8> {
    let m = HyperbolicModel::new(3)?;
    let ladder = cfg
        .eps_ladder
        .clone()
        .unwrap_or_else(|| vec![1e-1, 1e-2, 1e-3]);
    let base_span = cfg.span.unwrap_or(8);
    // a bump just outside the ball: vanishes on [0, l], smooth, compact
    let lo = 1.05 * l;
    let hi = lo + 1.0;
    let n = ((hi * 80.0).round() as usize) + 1;
    let f = BiinvariantFunction::from_fn(hi, n, Some(hi), |t| {
        Complex64::new(bump(t, lo, hi), 0.0)
    })?;

    let result = step2_ladder(&m, &f, psi, l, &ladder, base_span);
    let (rungs, failure) = match result {
        Ok(r) => (r, None),
        Err(DichotomyError::CertificationFailure { certificate, detail }) => {
            (Vec::new(), Some(format!("{certificate}: {detail}")))
        }
        Err(e) => return Err(e.into()),
    };

    rep.write_json(
        "report.json",
        json!({
            "command": "dichotomy",
            "branch": "divergent",
            "psi": psi.describe(),
            "l": l,
            "eps_ladder": ladder,
            "rungs": rungs,
            "failure": failure,
        }),
    )?;

    if !rungs.is_empty() {
        // plot data: |fhat| e^psi over the last rung's horizon
        let lambda_max = rungs.last().unwrap().lambda_max;
        let n_lambda = (lambda_max / 0.05) as usize + 1;
        let fhat = sft_forward(&m, &f, lambda_max, n_lambda)?;
        let rows: Vec<Vec<f64>> = (0..fhat.values.len())
            .map(|i| {
                let lam = fhat.lambda(i);
                let a = fhat.values[i].norm();
                vec![lam, a, a * psi.eval(lam).exp()]
            })
            .collect();
        rep.write_csv("weighted_transform.csv", "lambda,abs_fhat,abs_fhat_epsi", &rows)?;
        let rows: Vec<Vec<f64>> = rungs
            .iter()
            .map(|r| {
                vec![
                    r.span_size as f64,
                    r.eps,
                    r.lambda_max,
                    r.bound.residual,
                    r.ratio,
                    r.bound.energy,
                    r.bound.weighted_mass,
                ]
            })
            .collect();
        rep.write_csv(
            "residual_vs_span.csv",
            "span_size,eps,lambda_max,residual,energy_over_mass,energy,weighted_mass",
            &rows,
        )?;
        for r in &rungs {
            println!(
                "eps {:.1e}: span {}, horizon {:.1}, energy/mass {:.3e}, residual {:.3e}",
                r.eps, r.span_size, r.lambda_max, r.ratio, r.bound.residual
            );
        }
    }
    match failure {
        None => Ok(EXIT_OK),
        Some(msg) => {
            eprintln!("ladder failed: {msg}");
            Ok(EXIT_ERROR)
        }
    }
}

fn dichotomy_convergent(
    cfg: &RunConfig,
    rep: &Reporter,
    psi: &WeightFunction,
    l: f64,
) -> Result<u8> {
    let _ = cfg;
    let m = HyperbolicModel::new(3)?;
    match witness_on_space(psi, l, WitnessSpace::Hyperbolic(m)) {
        Ok(witness) => {
            write_witness_files(rep, &witness, psi)?;
            println!(
                "witness certified: decay C = {:.4e}, support leak {:.2e}, nontriviality {:.3e}",
                witness.decay_constant, witness.support_leak, witness.nontriviality
            );
            Ok(EXIT_OK)
        }
        Err(DichotomyError::CertificationFailure { certificate, detail }) => {
            rep.write_json(
                "report.json",
                json!({
                    "command": "dichotomy",
                    "branch": "convergent",
                    "psi": psi.describe(),
                    "l": l,
                    "failure": { "certificate": certificate, "detail": detail },
                }),
            )?;
            eprintln!("witness certification failed ({certificate}): {detail}");
            Ok(EXIT_ERROR)
        }
        Err(e) => Err(e.into()),
    }
}

// ----------------------------------------------------------------- witness

pub fn cmd_witness(cfg: &RunConfig, rep: &Reporter) -> Result<u8> {
    let selector = require(&cfg.psi, "psi")?;
    let psi = parse_psi(selector)?;
    let l = cfg.l.unwrap_or(2.0);
    let domain = cfg.domain.as_deref().unwrap_or("line");
    let built = match domain {
        "line" => ingham_witness(&psi, l),
        "r1" | "r2" | "r3" => {
            witness_on_space(&psi, l, WitnessSpace::EuclideanRadial(euclidean_dim(domain)?))
        }
        "h2" | "h3" | "h4" => {
            witness_on_space(&psi, l, WitnessSpace::Hyperbolic(hyperbolic_model(domain)?))
        }
        other => bail!("unknown domain `{other}`; expected line, r1..r3, or h2..h4"),
    };
    match built {
        Ok(witness) => {
            write_witness_files(rep, &witness, &psi)?;
            println!(
                "witness on {domain}: decay C = {:.4e}, support leak {:.2e}, nontriviality {:.3e}",
                witness.decay_constant, witness.support_leak, witness.nontriviality
            );
            Ok(EXIT_OK)
        }
        Err(DichotomyError::CertificationFailure { certificate, detail }) => {
            rep.write_json(
                "report.json",
                json!({
                    "command": "witness",
                    "psi": psi.describe(),
                    "l": l,
                    "domain": domain,
                    "failure": { "certificate": certificate, "detail": detail },
                }),
            )?;
            eprintln!("witness certification failed ({certificate}): {detail}");
            Ok(EXIT_ERROR)
        }
        Err(e) => Err(e.into()),
    }
}

fn write_witness_files(
    rep: &Reporter,
    witness: &WitnessFunction,
    psi: &WeightFunction,
) -> Result<()> {
    rep.write_json(
        "witness.json",
        serde_json::to_value(witness).context("serializing witness")?,
    )?;
    match &witness.payload {
        WitnessPayload::Line(profile) => {
            let rows: Vec<Vec<f64>> = profile
                .coords()
                .iter()
                .zip(&profile.values)
                .map(|(s, v)| vec![*s, v.re])
                .collect();
            rep.write_csv("profile.csv", "s,value", &rows)?;
        }
        WitnessPayload::EuclideanRadial(profile) => {
            let rows: Vec<Vec<f64>> = profile
                .radii
                .iter()
                .zip(&profile.values)
                .map(|(r, v)| vec![*r, v.re, v.im])
                .collect();
            rep.write_csv("profile.csv", "r,re,im", &rows)?;
        }
        WitnessPayload::Hyperbolic(f) => {
            let mut w = rep.csv_writer("profile.csv")?;
            f.to_csv(&mut w, None)?;
        }
    }
    // decay plot: |F| against its certificate C e^{-psi} on [1, xi_max]
    let n = 400;
    let p = &witness.params;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let xi = 10f64.powf(p.xi_max.log10() * i as f64 / (n - 1) as f64);
            let val = witness_spectrum(&p.a, p.smooth_type, xi).abs();
            vec![xi, val, witness.decay_constant * (-psi.eval(xi)).exp()]
        })
        .collect();
    rep.write_csv("decay.csv", "xi,abs_spectrum,certified_bound", &rows)?;
    Ok(())
}

// ------------------------------------------------------------------ approx

pub fn cmd_approx(cfg: &RunConfig, rep: &Reporter, seed: u64) -> Result<u8> {
    // demo: a smooth radial density on the unit disk against the
    // plane-wave kernel, discretized with a certified dyadic scheme
    let l = cfg.l.unwrap_or(1.0);
    let support = 0.6 * l;
    let measure = RadonMeasureRep::density(2, l, Some(support), move |y| {
        let r = (y[0] * y[0] + y[1] * y[1]).sqrt();
        Complex64::new(bump(r, -support, support), 0.0)
    })?;
    let kernel = KernelFunction::plane_wave();
    let n_probes = cfg.probes.unwrap_or(200);
    let lambda_probe_max = 10.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambdas: Vec<f64> = (0..n_probes)
        .map(|_| rng.gen_range(0.0..lambda_probe_max))
        .collect();
    // keep the demo's node count (and nodes.csv) modest: level 8-ish
    let scheme = DyadicScheme { eps: cfg.tol.max(2e-2), ..DyadicScheme::default() };
    let approx = approximate(&measure, &kernel, &lambdas, &scheme)?;

    // the a-priori sup bound must hold at every probe
    let sup_bound = approx.sup_bound(&kernel);
    let mut worst_value = 0.0f64;
    let mut worst_cert = 0.0f64;
    for lam in &lambdas {
        worst_value = worst_value.max(approx.evaluate(&kernel, *lam).norm());
        worst_cert = worst_cert.max(approx.certified_bound(&kernel, *lam));
    }
    let sup_ok = worst_value <= sup_bound * (1.0 + 1e-12);
    rep.write_json(
        "approx.json",
        json!({
            "command": "approx",
            "dim": 2,
            "l": l,
            "level": approx.nodes.level,
            "node_count": approx.nodes.nodes.len(),
            "l1_mass": approx.l1_mass,
            "uncovered_mass": approx.uncovered_mass,
            "certified_bound_max": worst_cert,
            "eps": scheme.eps,
            "probe_count": n_probes,
            "probe_lambda_max": lambda_probe_max,
            "sup_bound": sup_bound,
            "sup_observed": worst_value,
            "sup_ok": sup_ok,
        }),
    )?;
    let rows: Vec<Vec<f64>> = approx
        .nodes
        .nodes
        .iter()
        .zip(&approx.nodes.weights)
        .map(|(x, w)| vec![x[0], x[1], w.re, w.im])
        .collect();
    rep.write_csv("nodes.csv", "x,y,w_re,w_im", &rows)?;
    println!(
        "dyadic level {} with {} nodes: certified error {:.3e} (target {:.1e})",
        approx.nodes.level,
        approx.nodes.nodes.len(),
        worst_cert,
        scheme.eps
    );
    Ok(if sup_ok { EXIT_OK } else { EXIT_ERROR })
}
