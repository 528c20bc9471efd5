//! Empirical checks of the solution operators: ∂̄-residuals through charts,
//! Hölder ratios, L² ratios and the homogeneity of the surface measure.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::charts::Chart;
use crate::form::ZeroOneForm;
use crate::linalg;
use crate::measure::{self, dist_sigma, form_norm_on_sigma, rng_for, MonteCarloEstimate};
use crate::quadrature::QuadratureParams;
use crate::solver::{self, SolveResult};
use crate::variety::{act, orbit_radius, Variety};
use crate::{Error, Result, C64};

/// Evaluates a solution `g` at a point of Σ.
pub type SolverFn<'a> = dyn Fn(&[C64]) -> Result<SolveResult> + Sync + 'a;

/// Change of a finite-difference derivative under step halving, relative to
/// `1 + sup‖λ‖`, above which a sample counts as noise dominated.
pub const NOISE_TOL: f64 = 1e-3;

const CHART_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualSample {
    pub s: C64,
    pub x: Vec<C64>,
    pub point: Vec<C64>,
    /// `|∂(g∘Π)/∂s̄ − F₀| / (1 + sup)`.
    pub residual_s: f64,
    /// `|∂(g∘Π)/∂x̄_j − F_j| / (1 + sup)`.
    pub residual_x: Vec<f64>,
    pub residual: f64,
    pub noisy: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub anchor: Vec<C64>,
    pub fd_step: f64,
    pub samples: Vec<ResidualSample>,
    pub max: f64,
    pub median: f64,
    pub noisy: usize,
}

pub(crate) fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn random_in_ball(rng: &mut ChaCha8Rng, center: &[C64], radius: f64) -> Vec<C64> {
    let m = center.len();
    if m == 0 || radius == 0.0 {
        return center.to_vec();
    }
    let mut dir = measure::gaussian_point(rng, m);
    let nrm = linalg::norm(&dir);
    let r = radius * rng.random::<f64>().powf(1.0 / (2 * m) as f64);
    dir.iter_mut().for_each(|c| *c *= r / nrm);
    center.iter().zip(&dir).map(|(a, b)| a + b).collect()
}

/// Wirtinger derivative `∂G/∂t̄ ≈ [(G(t+h) − G(t−h)) + i(G(t+ih) − G(t−ih))]/(4h)`.
fn wirtinger_dbar(g: &dyn Fn(C64) -> Result<C64>, h: f64) -> Result<C64> {
    let i = C64::new(0.0, 1.0);
    let re = g(C64::new(h, 0.0))? - g(C64::new(-h, 0.0))?;
    let im = g(C64::new(0.0, h))? - g(C64::new(0.0, -h))?;
    Ok((re + i * im) / (4.0 * h))
}

/// ∂̄-residuals of `g∘Π` against `Π*λ` at random points of the chart anchored at `anchor`.
pub fn dbar_residual(
    variety: &Variety,
    form: &ZeroOneForm,
    solver: &SolverFn<'_>,
    anchor: &[C64],
    n_samples: usize,
    fd_step: f64,
    seed: u64,
) -> Result<ResidualReport> {
    if !form.dbar_closed() {
        return Err(Error::InvalidParameter {
            name: "form",
            reason: "the residual check requires a ∂̄-closed form".into(),
        });
    }
    if !(fd_step > 0.0) {
        return Err(Error::InvalidParameter {
            name: "fd_step",
            reason: format!("must be positive, got {fd_step}"),
        });
    }
    let chart = Chart::build(variety, anchor, CHART_TOL)?;
    let beta = variety.weights().as_slice();
    let x0 = chart.x_anchor();
    let mut rng = rng_for(seed, 0);
    let mut points = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let x = random_in_ball(&mut rng, &x0, 0.5 * chart.domain_radius());
        let y = chart.slice_point(&x)?;
        let reach = orbit_radius(beta, &y, form.support_radius());
        let modulus = reach * rng.random_range(0.05..1.1);
        let s = C64::from_polar(modulus, rng.random_range(0.0..std::f64::consts::TAU));
        points.push((s, x));
    }
    let norm = 1.0 + form.sup_bound();
    let samples: Vec<ResidualSample> = points
        .into_par_iter()
        .map(|(s, x)| -> Result<ResidualSample> {
            let pulled = chart.pullback_form(form, s, &x)?;
            let eval = |s: C64, x: &[C64]| -> Result<C64> { Ok(solver(&chart.eval(s, x)?)?.value) };
            let hs = fd_step * s.norm().max(1.0);
            let ds = |h: f64| wirtinger_dbar(&|d| eval(s + d, &x), h);
            let (ds1, ds2) = (ds(hs)?, ds(0.5 * hs)?);
            let residual_s = (ds1 - pulled.f0).norm() / norm;
            let mut noisy = (ds1 - ds2).norm() / norm > NOISE_TOL;
            let mut residual_x = Vec::with_capacity(x.len());
            for j in 0..x.len() {
                let hx = fd_step * x[j].norm().max(1.0);
                let dx = |h: f64| {
                    wirtinger_dbar(
                        &|d| {
                            let mut xp = x.clone();
                            xp[j] += d;
                            eval(s, &xp)
                        },
                        h,
                    )
                };
                let (d1, d2) = (dx(hx)?, dx(0.5 * hx)?);
                residual_x.push((d1 - pulled.fj[j]).norm() / norm);
                noisy |= (d1 - d2).norm() / norm > NOISE_TOL;
            }
            let residual = residual_x.iter().copied().fold(residual_s, f64::max);
            Ok(ResidualSample {
                point: chart.eval(s, &x)?,
                s,
                x,
                residual_s,
                residual_x,
                residual,
                noisy,
            })
        })
        .collect::<Result<_>>()?;
    let noisy = samples.iter().filter(|s| s.noisy).count();
    if 2 * noisy > samples.len() {
        return Err(Error::StepTooSmall {
            noisy,
            total: samples.len(),
        });
    }
    let values: Vec<f64> = samples.iter().map(|s| s.residual).collect();
    Ok(ResidualReport {
        anchor: anchor.to_vec(),
        fd_step,
        max: values.iter().copied().fold(0.0, f64::max),
        median: median(&values),
        samples,
        noisy,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairKind {
    SameLine,
    SameSlice,
    General,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolderPair {
    pub kind: PairKind,
    pub scale: f64,
    pub z: Vec<C64>,
    pub w: Vec<C64>,
    pub dist_upper: f64,
    pub dist_chord: f64,
    pub difference: f64,
    pub ratio_upper: f64,
    pub ratio_chord: f64,
    pub near_singular: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThetaConstant {
    pub theta: f64,
    pub constant_upper: f64,
    pub constant_chord: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KindConstant {
    pub kind: PairKind,
    pub constant_chord: f64,
    pub pairs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolderReport {
    pub theta: f64,
    pub radius: f64,
    pub pairs: Vec<HolderPair>,
    /// Largest `|g(z) − g(w)| / ‖z − w‖^θ`.
    pub empirical_constant: f64,
    /// Largest `|g(z) − g(w)| / dist_upper^θ`.
    pub empirical_constant_upper: f64,
    /// Sampled `sup |λ|_Σ` over `Σ ∩ B_R`.
    pub sup_estimate: f64,
    /// `empirical_constant / sup_estimate`.
    pub normalized_constant: f64,
    pub per_kind: Vec<KindConstant>,
    pub sweep: Vec<ThetaConstant>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HolderOptions {
    pub theta: f64,
    pub radius: f64,
    pub n_pairs: usize,
    /// Each base pair `(z, w)` is also evaluated as `(t z, t w)` for every `t`.
    pub scales: Vec<f64>,
    pub seed: u64,
    pub path_steps: usize,
    pub anchors: usize,
    pub sweep: Vec<f64>,
}

impl Default for HolderOptions {
    fn default() -> Self {
        Self {
            theta: 0.5,
            radius: 2.0,
            n_pairs: 30,
            scales: vec![1.0, 0.1, 0.01],
            seed: 0,
            path_steps: 16,
            anchors: 5,
            sweep: vec![0.25, 0.5, 0.75, 0.9],
        }
    }
}

fn base_pairs(variety: &Variety, opts: &HolderOptions) -> Result<Vec<(PairKind, Vec<C64>, Vec<C64>)>> {
    let n = variety.ambient_dim() as f64;
    let link = measure::sample_link(variety, opts.anchors.max(2), opts.seed)?;
    let charts = link
        .points
        .iter()
        .map(|p| Chart::build(variety, p, CHART_TOL))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = rng_for(opts.seed, u64::MAX);
    let r = opts.radius;
    let modulus = |rng: &mut ChaCha8Rng, reach: f64| {
        C64::from_polar(reach * rng.random_range(0.02..0.98), rng.random_range(0.0..std::f64::consts::TAU))
    };
    let mut pairs = Vec::with_capacity(opts.n_pairs);
    for i in 0..opts.n_pairs {
        let chart = &charts[i % charts.len()];
        let x0 = chart.x_anchor();
        let ball = 0.5 * chart.domain_radius();
        let mut kind = match i % 3 {
            0 => PairKind::SameLine,
            1 => PairKind::SameSlice,
            _ => PairKind::General,
        };
        if kind == PairKind::SameSlice && chart.slice_dim() == 0 {
            kind = PairKind::SameLine;
        }
        let (z, w) = match kind {
            PairKind::SameLine => {
                let x = random_in_ball(&mut rng, &x0, ball);
                let y = chart.eval(C64::new(1.0, 0.0), &x)?;
                let reach = r / linalg::norm(&y);
                let (s1, s2) = (modulus(&mut rng, reach), modulus(&mut rng, reach));
                (chart.eval(s1, &x)?, chart.eval(s2, &x)?)
            }
            PairKind::SameSlice => {
                let x1 = random_in_ball(&mut rng, &x0, ball);
                let x2 = random_in_ball(&mut rng, &x0, ball);
                let y1 = chart.eval(C64::new(1.0, 0.0), &x1)?;
                let y2 = chart.eval(C64::new(1.0, 0.0), &x2)?;
                let reach = r / linalg::norm(&y1).max(linalg::norm(&y2));
                let s = modulus(&mut rng, reach);
                (chart.eval(s, &x1)?, chart.eval(s, &x2)?)
            }
            PairKind::General => {
                let other = &link.points[(i / 3 + 1) % link.points.len()];
                let reach = r / n.sqrt();
                let (s1, s2) = (modulus(&mut rng, reach), modulus(&mut rng, reach));
                (
                    act(s1, variety.weights(), chart.anchor()),
                    act(s2, variety.weights(), other),
                )
            }
        };
        pairs.push((kind, z, w));
    }
    Ok(pairs)
}

fn sup_estimate(variety: &Variety, form: &ZeroOneForm, radius: f64, seed: u64) -> Result<f64> {
    let link = measure::sample_link(variety, 64, seed ^ 0x5u64)?;
    let n = variety.ambient_dim() as f64;
    let mut best = 0.0_f64;
    for p in &link.points {
        for k in 1..=64 {
            let t = radius / n.sqrt() * k as f64 / 64.0;
            let z: Vec<C64> = p.iter().map(|c| c * t).collect();
            best = best.max(form_norm_on_sigma(variety, form, &z));
        }
    }
    Ok(best)
}

/// Hölder ratios `|g(z) − g(w)| / d(z, w)^θ` on a cone, bracketed by the
/// chordal distance (lower bound for `dist_Σ`) and the path bound of
/// [`measure::dist_sigma`].
pub fn holder_report(
    variety: &Variety,
    form: &ZeroOneForm,
    solver: &SolverFn<'_>,
    opts: &HolderOptions,
) -> Result<HolderReport> {
    if !variety.is_cone() {
        return Err(Error::NotACone);
    }
    if !(opts.theta > 0.0 && opts.theta < 1.0) {
        return Err(Error::InvalidParameter {
            name: "theta",
            reason: format!("must lie in (0, 1), got {}", opts.theta),
        });
    }
    if opts.n_pairs == 0 || opts.scales.is_empty() {
        return Err(Error::InvalidParameter {
            name: "n_pairs",
            reason: "need at least one pair and one scale".into(),
        });
    }
    let base = base_pairs(variety, opts)?;
    let mut jobs = Vec::new();
    for &t in &opts.scales {
        for (kind, z, w) in &base {
            let scale = C64::new(t, 0.0);
            jobs.push((*kind, t, act(scale, variety.weights(), z), act(scale, variety.weights(), w)));
        }
    }
    let theta = opts.theta;
    let pairs: Vec<HolderPair> = jobs
        .into_par_iter()
        .map(|(kind, scale, z, w)| -> Result<Option<HolderPair>> {
            let dist_chord = linalg::distance(&z, &w);
            if dist_chord <= 1e-14 * linalg::norm(&z).max(1.0) {
                return Ok(None);
            }
            let path = dist_sigma(variety, &z, &w, opts.path_steps)?;
            let difference = (solver(&z)?.value - solver(&w)?.value).norm();
            Ok(Some(HolderPair {
                kind,
                scale,
                dist_upper: path.length,
                dist_chord,
                difference,
                ratio_upper: difference / path.length.powf(theta),
                ratio_chord: difference / dist_chord.powf(theta),
                near_singular: path.near_singular,
                z,
                w,
            }))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let constant = |th: f64, upper: bool| {
        pairs
            .iter()
            .map(|p| p.difference / (if upper { p.dist_upper } else { p.dist_chord }).powf(th))
            .fold(0.0, f64::max)
    };
    let empirical_constant = constant(theta, false);
    let sup = sup_estimate(variety, form, opts.radius, opts.seed)?;
    let per_kind = [PairKind::SameLine, PairKind::SameSlice, PairKind::General]
        .into_iter()
        .map(|kind| {
            let sel: Vec<&HolderPair> = pairs.iter().filter(|p| p.kind == kind).collect();
            KindConstant {
                kind,
                constant_chord: sel.iter().map(|p| p.ratio_chord).fold(0.0, f64::max),
                pairs: sel.len(),
            }
        })
        .collect();
    let sweep = opts
        .sweep
        .iter()
        .map(|&th| ThetaConstant {
            theta: th,
            constant_upper: constant(th, true),
            constant_chord: constant(th, false),
        })
        .collect();
    Ok(HolderReport {
        theta,
        radius: opts.radius,
        empirical_constant,
        empirical_constant_upper: constant(theta, true),
        sup_estimate: sup,
        normalized_constant: if sup > 0.0 { empirical_constant / sup } else { f64::NAN },
        per_kind,
        sweep,
        pairs,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct L2Report {
    pub radius: f64,
    pub solution_norm: MonteCarloEstimate,
    pub form_norm: MonteCarloEstimate,
    /// `‖g‖ / ‖λ‖`, NaN when `λ` vanishes on the sampled region.
    pub ratio: f64,
    pub ratio_std_error: f64,
    pub degenerate: bool,
}

/// `‖g‖_{L²(Σ∩B_R)} / ‖λ‖_{L²(Σ∩B_R)}` for the L² solution on a cone.
pub fn l2_report(
    variety: &Variety,
    form: &ZeroOneForm,
    radius: f64,
    n_samples: usize,
    seed: u64,
    params: &QuadratureParams,
) -> Result<L2Report> {
    if !variety.is_cone() {
        return Err(Error::NotACone);
    }
    variety.require_pure_dim()?;
    let form_norm = measure::l2_norm_form(variety, form, radius, n_samples, seed)?;
    let solution_norm = measure::l2_norm_function(
        variety,
        |z| {
            let zn = linalg::norm(z);
            if zn < 1e-12 * radius {
                return Ok(C64::new(0.0, 0.0));
            }
            let scale = radius.max(zn);
            // Points on the ray of a root are projected back to Σ to absorb root-finding error.
            let p = if variety.membership_residual(z) > solver::MEMBERSHIP_TOL {
                variety.project_to_variety(z, 1e-13 * scale, 50)?
            } else {
                z.to_vec()
            };
            solver::solve_l2(variety, form, &p, params).map(|r| r.value)
        },
        radius,
        n_samples,
        seed,
    )?;
    let degenerate = form_norm.value == 0.0;
    let (ratio, ratio_std_error) = if degenerate {
        (f64::NAN, f64::NAN)
    } else {
        let ratio = solution_norm.value / form_norm.value;
        let rel_g = if solution_norm.value > 0.0 {
            solution_norm.std_error / solution_norm.value
        } else {
            0.0
        };
        let rel_f = form_norm.std_error / form_norm.value;
        (ratio, ratio * (rel_g * rel_g + rel_f * rel_f).sqrt())
    };
    Ok(L2Report {
        radius,
        solution_norm,
        form_norm,
        ratio,
        ratio_std_error,
        degenerate,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingIntegrand {
    /// `‖z‖²`, expected exponent `2d + 2`.
    Moment,
    /// `1`, expected exponent `2d`.
    Plain,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub radius: f64,
    pub value: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingReport {
    pub integrand: ScalingIntegrand,
    pub rows: Vec<ScalingRow>,
    pub exponent: f64,
    pub exponent_std_error: f64,
    pub expected: f64,
}

/// Least-squares slope of `log ∫_{Σ∩B_ρ} F` against `log ρ`.
pub fn measure_scaling_check(
    variety: &Variety,
    radii: &[f64],
    n_samples: usize,
    seed: u64,
    integrand: ScalingIntegrand,
) -> Result<ScalingReport> {
    let d = variety.require_pure_dim()? as f64;
    if radii.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "radii",
            reason: "need at least two radii".into(),
        });
    }
    let rows = radii
        .iter()
        .enumerate()
        .map(|(i, &rho)| {
            let stream_seed = seed.wrapping_add((i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let e = match integrand {
                ScalingIntegrand::Moment => {
                    measure::surface_integral(variety, |z| Ok(linalg::norm(z).powi(2)), rho, n_samples, stream_seed)?
                }
                ScalingIntegrand::Plain => measure::surface_integral(variety, |_| Ok(1.0), rho, n_samples, stream_seed)?,
            };
            Ok(ScalingRow {
                radius: rho,
                value: e.value,
                std_error: e.std_error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if rows.iter().any(|r| !(r.value > 0.0)) {
        return Err(Error::InsufficientSamples {
            succeeded: rows.iter().filter(|r| r.value > 0.0).count(),
            attempted: rows.len(),
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.radius.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.value.ln()).collect();
    let sig: Vec<f64> = rows.iter().map(|r| r.std_error / r.value).collect();
    let k = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / k;
    let ym = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum::<f64>() / sxx;
    let var: f64 = xs.iter().zip(&sig).map(|(x, s)| ((x - xm) / sxx).powi(2) * s * s).sum();
    let expected = match integrand {
        ScalingIntegrand::Moment => 2.0 * d + 2.0,
        ScalingIntegrand::Plain => 2.0 * d,
    };
    Ok(ScalingReport {
        integrand,
        rows,
        exponent: slope,
        exponent_std_error: var.sqrt(),
        expected,
    })
}
