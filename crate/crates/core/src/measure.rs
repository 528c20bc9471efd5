//! Sampling and integration on Σ: link samples, Monte Carlo surface integrals
//! over `Σ ∩ B_ρ`, intrinsic L² norms and an upper bound for the intrinsic
//! distance.
//!
//! Surface integrals on cone hypersurfaces use the complex Crofton formula.
//! For a complex line `L = {y + t u}` with `u` uniform on the unit sphere and
//! `y` uniform in the ball of radius `ρ` in `u^⊥`,
//!
//! `∫_{Σ∩B_ρ} F dV = n · vol(B_ρ ⊂ ℂ^{n−1}) · E[Σ_{t : y + tu ∈ Σ ∩ B_ρ} F(y + tu)]`,
//!
//! because the projection along `u` has Jacobian `|⟨u, ν⟩|²` on Σ and
//! `E|⟨u, ν⟩|² = 1/n`. The radius of `y` is stratified into equal-volume shells.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::form::ZeroOneForm;
use crate::linalg;
use crate::variety::{act, orbit_radius, SparsePolynomial, Variety};
use crate::{Error, Result, C64};

const STRATA: usize = 16;
const CHUNK: usize = 1024;
const LINK_ATTEMPTS: usize = 10;
const PROJECTION_TOL: f64 = 1e-12;
const PROJECTION_ITER: usize = 100;

pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn gaussian_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinkSample {
    pub points: Vec<Vec<C64>>,
    pub seeds_used: usize,
}

/// Points of the link `K = Σ ∩ {‖z‖ = √n}`: random ambient points are
/// projected onto Σ and moved along their orbit to norm `√n`.
pub fn sample_link(variety: &Variety, count: usize, seed: u64) -> Result<LinkSample> {
    let d = variety.require_pure_dim()?;
    let n = variety.ambient_dim();
    let target = (n as f64).sqrt();
    let beta = variety.weights().as_slice();
    let draws: Vec<(Option<Vec<C64>>, usize)> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i as u64);
            for attempt in 0..LINK_ATTEMPTS {
                let mut z0 = gaussian_point(&mut rng, n);
                let s = target / linalg::norm(&z0);
                z0.iter_mut().for_each(|c| *c *= s);
                let Ok(z) = variety.project_to_variety(&z0, PROJECTION_TOL, PROJECTION_ITER) else {
                    continue;
                };
                if linalg::norm(&z) < 1e-6 {
                    continue;
                }
                let t = orbit_radius(beta, &z, target);
                let p = act(C64::new(t, 0.0), variety.weights(), &z);
                if variety.contains(&p, 1e-10) && variety.jacobian_is_full_rank(&p, d) {
                    return (Some(p), attempt + 1);
                }
            }
            (None, LINK_ATTEMPTS)
        })
        .collect();
    let seeds_used: usize = draws.iter().map(|d| d.1).sum();
    let succeeded = draws.iter().filter(|d| d.0.is_some()).count();
    let failures = seeds_used - succeeded;
    if succeeded < count || failures as f64 > 0.9 * seeds_used as f64 {
        return Err(Error::InsufficientSamples {
            succeeded,
            attempted: seeds_used,
        });
    }
    Ok(LinkSample {
        points: draws.into_iter().filter_map(|d| d.0).collect(),
        seeds_used,
    })
}

/// Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

#[derive(Clone, Copy, Debug, Default)]
struct Welford {
    count: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(&mut self, other: &Welford) {
        if other.count == 0 {
            return;
        }
        let total = self.count + other.count;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / total as f64;
        self.m2 += other.m2 + delta * delta * self.count as f64 * other.count as f64 / total as f64;
        self.count = total;
    }
}

/// Roots of `Σ c_k t^k` by the Aberth–Ehrlich iteration with Newton polishing.
pub fn polynomial_roots(coeffs: &[C64]) -> Vec<C64> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].norm() <= 1e-14 * scale {
        deg -= 1;
    }
    if deg == 0 {
        return Vec::new();
    }
    let a: Vec<C64> = coeffs[..=deg].iter().map(|c| c / coeffs[deg]).collect();
    let eval = |t: C64| -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for c in a.iter().rev() {
            dp = dp * t + p;
            p = p * t + c;
        }
        (p, dp)
    };
    if deg == 1 {
        return vec![-a[0]];
    }
    let r0 = {
        let g = a[0].norm().powf(1.0 / deg as f64);
        if g > 0.0 {
            g
        } else {
            1.0
        }
    };
    let mut z: Vec<C64> = (0..deg)
        .map(|k| C64::from_polar(r0, 2.0 * std::f64::consts::PI * k as f64 / deg as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0_f64;
        for i in 0..deg {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let sum: C64 = (0..deg).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let w = ratio / (C64::new(1.0, 0.0) - ratio * sum);
            if w.re.is_finite() && w.im.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / z[i].norm().max(1.0));
            }
        }
        if moved <= 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..2 {
            let (p, dp) = eval(*zi);
            if dp.norm() > 0.0 {
                let step = p / dp;
                if step.re.is_finite() && step.im.is_finite() {
                    *zi -= step;
                }
            }
        }
    }
    z
}

fn line_polynomial(q: &SparsePolynomial, y: &[C64], u: &[C64], degree: usize, tau: f64) -> Vec<C64> {
    let count = degree + 1;
    let mut p = vec![C64::new(0.0, 0.0); count];
    let values: Vec<C64> = (0..count)
        .map(|j| {
            let t = C64::from_polar(tau, 2.0 * std::f64::consts::PI * j as f64 / count as f64);
            let pt: Vec<C64> = y.iter().zip(u).map(|(a, b)| a + b * t).collect();
            q.eval(&pt)
        })
        .collect();
    for (k, pk) in p.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for (j, v) in values.iter().enumerate() {
            acc += v * C64::from_polar(1.0, -2.0 * std::f64::consts::PI * (j * k) as f64 / count as f64);
        }
        *pk = acc / count as f64 / tau.powi(k as i32);
    }
    p
}

fn ball_volume(complex_dim: usize, rho: f64) -> f64 {
    let mut v = 1.0;
    for k in 1..=complex_dim {
        v *= std::f64::consts::PI * rho * rho / k as f64;
    }
    v
}

fn require_cone_hypersurface(variety: &Variety) -> Result<&SparsePolynomial> {
    if !variety.is_cone() {
        return Err(Error::NotACone);
    }
    let d = variety.require_pure_dim()?;
    if variety.polynomials().len() != 1 || d + 1 != variety.ambient_dim() {
        return Err(Error::Unsupported(
            "Monte Carlo surface integration is implemented for cone hypersurfaces (one defining polynomial, pure_dim = n − 1)"
                .into(),
        ));
    }
    Ok(&variety.polynomials()[0])
}

/// Estimates `∫_{Σ∩B_ρ} F dV_Σ` on a cone hypersurface.
pub fn surface_integral<F>(variety: &Variety, integrand: F, rho: f64, n_samples: usize, seed: u64) -> Result<MonteCarloEstimate>
where
    F: Fn(&[C64]) -> Result<f64> + Sync,
{
    let q = require_cone_hypersurface(variety)?;
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidParameter {
            name: "rho",
            reason: format!("must be positive, got {rho}"),
        });
    }
    if n_samples < 2 * STRATA {
        return Err(Error::InvalidParameter {
            name: "n_samples",
            reason: format!("need at least {} samples", 2 * STRATA),
        });
    }
    let n = variety.ambient_dim();
    let degree = q.total_degree() as usize;
    let weight = n as f64 * ball_volume(n - 1, rho);
    let chunks = n_samples.div_ceil(CHUNK);
    let partial: Vec<Result<[Welford; STRATA]>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = rng_for(seed, chunk as u64);
            let mut acc = [Welford::default(); STRATA];
            let end = ((chunk + 1) * CHUNK).min(n_samples);
            for i in chunk * CHUNK..end {
                let stratum = i % STRATA;
                let mut u = gaussian_point(&mut rng, n);
                let un = linalg::norm(&u);
                u.iter_mut().for_each(|c| *c /= un);
                let mut g = gaussian_point(&mut rng, n);
                let proj = linalg::inner(&g, &u);
                for (gk, uk) in g.iter_mut().zip(&u) {
                    *gk -= proj * uk;
                }
                let gn = linalg::norm(&g);
                let shell: f64 = (stratum as f64 + rng.random::<f64>()) / STRATA as f64;
                let r = rho * shell.powf(1.0 / (2.0 * (n - 1) as f64));
                let y: Vec<C64> = g.iter().map(|c| c * (r / gn)).collect();
                let coeffs = line_polynomial(q, &y, &u, degree, rho.max(1e-300));
                let mut total = 0.0;
                for t in polynomial_roots(&coeffs) {
                    let p: Vec<C64> = y.iter().zip(&u).map(|(a, b)| a + b * t).collect();
                    if linalg::norm(&p) <= rho {
                        total += integrand(&p)?;
                    }
                }
                acc[stratum].push(weight * total);
            }
            Ok(acc)
        })
        .collect();
    let mut strata = [Welford::default(); STRATA];
    for p in partial {
        let p = p?;
        for (s, o) in strata.iter_mut().zip(&p) {
            s.merge(o);
        }
    }
    let mut value = 0.0;
    let mut var = 0.0;
    for s in &strata {
        value += s.mean / STRATA as f64;
        if s.count > 1 {
            var += s.m2 / (s.count - 1) as f64 / s.count as f64 / (STRATA * STRATA) as f64;
        }
    }
    Ok(MonteCarloEstimate {
        value,
        std_error: var.sqrt(),
        samples: n_samples,
    })
}

fn sqrt_estimate(e: MonteCarloEstimate) -> MonteCarloEstimate {
    let value = e.value.max(0.0).sqrt();
    let std_error = if value > 0.0 { e.std_error / (2.0 * value) } else { 0.0 };
    MonteCarloEstimate {
        value,
        std_error,
        samples: e.samples,
    }
}

/// `‖h‖_{L²(Σ∩B_ρ)}`.
pub fn l2_norm_function<H>(variety: &Variety, h: H, rho: f64, n_samples: usize, seed: u64) -> Result<MonteCarloEstimate>
where
    H: Fn(&[C64]) -> Result<C64> + Sync,
{
    let e = surface_integral(variety, |z| h(z).map(|v| v.norm_sqr()), rho, n_samples, seed)?;
    Ok(sqrt_estimate(e))
}

/// Pointwise norm `|λ|_Σ(z)`: the Euclidean norm of the orthogonal projection
/// of `(f_k(z))` onto the complex tangent space of Σ at `z`.
pub fn form_norm_on_sigma(variety: &Variety, form: &ZeroOneForm, z: &[C64]) -> f64 {
    let f = form.eval(z);
    if f.iter().all(|c| c.norm() == 0.0) {
        return 0.0;
    }
    let basis = linalg::null_space(&variety.jacobian(z), variety.rank_tol());
    basis
        .iter()
        .map(|e| linalg::inner(&f, e).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `‖λ‖_{L²_{0,1}(Σ∩B_ρ)}` with the pointwise norm of [`form_norm_on_sigma`].
pub fn l2_norm_form(variety: &Variety, form: &ZeroOneForm, rho: f64, n_samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    let e = surface_integral(
        variety,
        |z| Ok(form_norm_on_sigma(variety, form, z).powi(2)),
        rho,
        n_samples,
        seed,
    )?;
    Ok(sqrt_estimate(e))
}

/// Piecewise-linear path on Σ whose length bounds `dist_Σ` from above.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathApprox {
    pub waypoints: Vec<Vec<C64>>,
    pub length: f64,
    /// Some waypoint came within `1e-3 · max(‖z‖, ‖w‖)` of the origin.
    pub near_singular: bool,
}

fn path_length(points: &[Vec<C64>]) -> f64 {
    points.windows(2).map(|p| linalg::distance(&p[0], &p[1])).sum()
}

fn projected_segment(variety: &Variety, a: &[C64], b: &[C64], steps: usize) -> Result<Vec<Vec<C64>>> {
    let mut pts = Vec::with_capacity(steps + 1);
    pts.push(a.to_vec());
    for i in 1..steps {
        let t = i as f64 / steps as f64;
        let node: Vec<C64> = a.iter().zip(b).map(|(x, y)| x * (1.0 - t) + y * t).collect();
        let p = variety
            .project_to_variety(&node, PROJECTION_TOL, PROJECTION_ITER)
            .map_err(|_| Error::ProjectionFailure { node: i })?;
        pts.push(p);
    }
    pts.push(b.to_vec());
    Ok(pts)
}

fn orbit_segment(variety: &Variety, a: &[C64], target_norm: f64, steps: usize) -> Vec<Vec<C64>> {
    let t1 = orbit_radius(variety.weights().as_slice(), a, target_norm);
    (0..=steps)
        .map(|i| {
            let t = 1.0 + (t1 - 1.0) * i as f64 / steps as f64;
            act(C64::new(t, 0.0), variety.weights(), a)
        })
        .collect()
}

fn lex_greater(a: &[C64], b: &[C64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        match x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)) {
            std::cmp::Ordering::Greater => return true,
            std::cmp::Ordering::Less => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    false
}

/// Upper bound for the intrinsic distance between two points of Σ: the
/// shortest of the projected straight path and the two radial-then-projected
/// routes.
pub fn dist_sigma(variety: &Variety, z: &[C64], w: &[C64], steps: usize) -> Result<PathApprox> {
    variety.check_dim(z)?;
    variety.check_dim(w)?;
    let steps = steps.max(1);
    let swap = lex_greater(z, w);
    let (a, b) = if swap { (w, z) } else { (z, w) };
    if a == b {
        return Ok(PathApprox {
            waypoints: vec![a.to_vec()],
            length: 0.0,
            near_singular: false,
        });
    }
    let (na, nb) = (linalg::norm(a), linalg::norm(b));
    let mut candidates: Vec<Result<Vec<Vec<C64>>>> = vec![projected_segment(variety, a, b, steps)];
    if na > 0.0 {
        let mut leg = orbit_segment(variety, a, nb, steps);
        let corner = leg.last().cloned().unwrap_or_else(|| a.to_vec());
        candidates.push(projected_segment(variety, &corner, b, steps).map(|rest| {
            leg.extend(rest.into_iter().skip(1));
            leg
        }));
    }
    if nb > 0.0 {
        let mut leg = orbit_segment(variety, b, na, steps);
        let corner = leg.last().cloned().unwrap_or_else(|| b.to_vec());
        candidates.push(projected_segment(variety, a, &corner, steps).map(|mut first| {
            leg.reverse();
            first.extend(leg.into_iter().skip(1));
            first
        }));
    }
    let mut best: Option<Vec<Vec<C64>>> = None;
    let mut first_err = None;
    for c in candidates {
        match c {
            Ok(path) => {
                if best.as_ref().is_none_or(|b| path_length(&path) < path_length(b)) {
                    best = Some(path);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    let Some(mut waypoints) = best else {
        return Err(first_err.unwrap_or(Error::ProjectionFailure { node: 0 }));
    };
    let length = path_length(&waypoints);
    let floor = 1e-3 * na.max(nb);
    let near_singular = waypoints.iter().any(|p| linalg::norm(p) < floor);
    if swap {
        waypoints.reverse();
    }
    Ok(PathApprox {
        waypoints,
        length,
        near_singular,
    })
}
