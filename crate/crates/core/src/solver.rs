//! Integral solution operators for `∂̄g = λ` on weighted homogeneous varieties.
//!
//! * [`solve`]: `g(z) = Σ_k (β_k/2πi) ∫ f_k(w^β * z) conj(w)^{β_k−1} conj(z_k)/(w − 1) dw∧dw̄`.
//! * [`solve_scaled`]: `g(s^β * z)` through the integral in `u = ws`, singular at `u = s`.
//! * [`solve_l2`]: on cones of pure dimension `d`,
//!   `g(z) = Σ_k (1/2πi) ∫ f_k(wz) w^{d−1} conj(z_k)/(w − 1) dw∧dw̄`.
//! * [`weighted_cauchy_pompeiu`]: `(1/2πi) s^{−m} ∫ u^m F(u)/(u − s) du∧dū`.
//!
//! The factor `conj(w^{β_k})/w̄` of the textbook kernel is reduced to
//! `conj(w)^{β_k−1}` before integration, so `w = 1` (respectively `u = s`)
//! is the only singular point.

use std::f64::consts::PI;

use serde::Serialize;

use crate::form::{theta_into, zeros, ZeroOneForm};
use crate::linalg;
use crate::quadrature::{cauchy_transform_estimate, integrate_plane, PlanarIntegrand, QuadratureParams};
use crate::variety::{act_into, orbit_radius, Variety, Weights};
use crate::{Error, Result, C64};

/// Membership tolerance applied to evaluation points.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolveResult {
    pub value: C64,
    pub quadrature_error: f64,
    pub truncation_radius_used: f64,
}

impl SolveResult {
    fn zero() -> Self {
        Self {
            value: C64::new(0.0, 0.0),
            quadrature_error: 0.0,
            truncation_radius_used: 0.0,
        }
    }
}

fn check_point(variety: &Variety, form: &ZeroOneForm, z: &[C64]) -> Result<()> {
    variety.check_dim(z)?;
    if form.ambient_dim() != variety.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: variety.ambient_dim(),
            got: form.ambient_dim(),
        });
    }
    let residual = variety.membership_residual(z);
    if residual > MEMBERSHIP_TOL {
        return Err(Error::NotOnVariety { residual });
    }
    Ok(())
}

fn two_pi_i() -> C64 {
    C64::new(0.0, 2.0 * PI)
}

/// Shared kernel of [`solve`] and [`solve_scaled`]: integrates
/// `Σ_k (β_k/2πi) f_k(u^β * z) conj(u)^{β_k−1} conj(z_k)/(u − a)`.
fn weighted_kernel_integral(
    weights: &Weights,
    form: &ZeroOneForm,
    z: &[C64],
    a: C64,
    params: &QuadratureParams,
) -> Result<SolveResult> {
    let beta = weights.as_slice();
    let n = z.len();
    let radius = orbit_radius(beta, z, form.support_radius());
    let coeff: Vec<C64> = beta
        .iter()
        .zip(z)
        .map(|(&b, zk)| zk.conj() * b as f64 / two_pi_i())
        .collect();
    let kernel = |u: C64, out: &mut [C64]| {
        let mut p = zeros(n);
        let mut f = zeros(n);
        act_into(u, beta, z, &mut p);
        form.eval_into(&p, &mut f);
        let inv = (u - a).inv();
        let uc = u.conj();
        for k in 0..n {
            out[k] = if f[k] == C64::new(0.0, 0.0) {
                f[k]
            } else {
                f[k] * coeff[k] * uc.powu(beta[k] - 1) * inv
            };
        }
    };
    let integrand = PlanarIntegrand::vector(n, radius, kernel)
        .with_singular_point(a)
        .with_breakpoints(form.orbit_breakpoints(beta, z));
    let r = integrate_plane(&integrand, params)?;
    Ok(SolveResult {
        value: r.value(),
        quadrature_error: r.error_estimate,
        truncation_radius_used: radius,
    })
}

/// `g(z)` for a point `z` of Σ.
pub fn solve(variety: &Variety, form: &ZeroOneForm, z: &[C64], params: &QuadratureParams) -> Result<SolveResult> {
    check_point(variety, form, z)?;
    if linalg::norm(z) == 0.0 {
        return Ok(SolveResult::zero());
    }
    weighted_kernel_integral(variety.weights(), form, z, C64::new(1.0, 0.0), params)
}

/// `g(s^β * z)` computed by the integral in the scaled variable `u = ws`.
pub fn solve_scaled(
    variety: &Variety,
    form: &ZeroOneForm,
    z: &[C64],
    s: C64,
    params: &QuadratureParams,
) -> Result<SolveResult> {
    check_point(variety, form, z)?;
    if s.norm() == 0.0 || linalg::norm(z) == 0.0 {
        return Ok(SolveResult::zero());
    }
    weighted_kernel_integral(variety.weights(), form, z, s, params)
}

/// The L² solution on a cone of pure dimension `d`.
pub fn solve_l2(variety: &Variety, form: &ZeroOneForm, z: &[C64], params: &QuadratureParams) -> Result<SolveResult> {
    if !variety.is_cone() {
        return Err(Error::NotACone);
    }
    let d = variety.require_pure_dim()? as u32;
    check_point(variety, form, z)?;
    let zn = linalg::norm(z);
    if zn == 0.0 {
        return Ok(SolveResult::zero());
    }
    let n = z.len();
    let radius = form.support_radius() / zn;
    let coeff: Vec<C64> = z.iter().map(|zk| zk.conj() / two_pi_i()).collect();
    let one = C64::new(1.0, 0.0);
    let kernel = |w: C64, out: &mut [C64]| {
        let mut p = zeros(n);
        let mut f = zeros(n);
        for (pk, zk) in p.iter_mut().zip(z) {
            *pk = w * zk;
        }
        form.eval_into(&p, &mut f);
        let factor = w.powu(d - 1) / (w - one);
        for k in 0..n {
            out[k] = f[k] * coeff[k] * factor;
        }
    };
    let ones = vec![1u32; n];
    let integrand = PlanarIntegrand::vector(n, radius, kernel)
        .with_singular_point(one)
        .with_breakpoints(form.orbit_breakpoints(&ones, z));
    let r = integrate_plane(&integrand, params)?;
    Ok(SolveResult {
        value: r.value(),
        quadrature_error: r.error_estimate,
        truncation_radius_used: radius,
    })
}

/// `(1/2πi) s^{−m} ∫ u^m F(u)/(u − s) du∧dū` for `F` supported in `|u| ≤ support_radius`.
pub fn weighted_cauchy_pompeiu(
    f: impl Fn(C64) -> C64 + Sync,
    m: u32,
    s: C64,
    support_radius: f64,
    params: &QuadratureParams,
) -> Result<C64> {
    if m == 0 {
        return cauchy_transform_estimate(f, support_radius, s, params).map(|r| r.value());
    }
    if s.norm() == 0.0 {
        return Err(Error::ZeroScaleWithWeight);
    }
    let inner = cauchy_transform_estimate(move |u| u.powu(m) * f(u), support_radius, s, params)?;
    Ok(inner.value() / s.powu(m))
}

/// `Θ(z) = (z_k^{β_k})`.
pub fn theta_map(weights: &Weights, z: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); z.len()];
    theta_into(weights.as_slice(), z, &mut out);
    out
}

/// `Θ*λ` on the cone `{Q ∘ Θ = 0}`.
pub fn theta_pullback_form(form: &ZeroOneForm, weights: &Weights) -> Result<ZeroOneForm> {
    form.theta_pullback(weights)
}

/// Solution on a weighted variety `X` and the same solution recomputed on
/// the associated cone.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaTransfer {
    /// Cone point `z` with `Θ(z) = x`.
    pub cone_point: Vec<C64>,
    /// Point `x = Θ(z)` of `X`.
    pub point: Vec<C64>,
    /// `h(x)` computed on `X`.
    pub direct: SolveResult,
    /// `g(z)` computed on the cone with the pulled-back form.
    pub via_cone: SolveResult,
    /// `|h(Θ(z)) − g(z)| / (1 + |g(z)|)`.
    pub discrepancy: f64,
}

/// Computes `h(Θ(z))` on `x_variety` and `g(z)` on its Θ-cone for a cone point `z`.
pub fn theta_transfer_at(
    x_variety: &Variety,
    form: &ZeroOneForm,
    z: &[C64],
    params: &QuadratureParams,
) -> Result<ThetaTransfer> {
    let cone = x_variety.theta_cone()?;
    let pulled = form.theta_pullback(x_variety.weights())?;
    let x = theta_map(x_variety.weights(), z);
    let direct = solve(x_variety, form, &x, params)?;
    let via_cone = solve(&cone, &pulled, z, params)?;
    let discrepancy = (direct.value - via_cone.value).norm() / (1.0 + via_cone.value.norm());
    Ok(ThetaTransfer {
        cone_point: z.to_vec(),
        point: x,
        direct,
        via_cone,
        discrepancy,
    })
}

/// `h(x)` on a weighted variety, cross-checked on the Θ-cone at the principal
/// root `z_k = x_k^{1/β_k}`.
pub fn solve_weighted_via_cone(
    x_variety: &Variety,
    form: &ZeroOneForm,
    x: &[C64],
    params: &QuadratureParams,
) -> Result<ThetaTransfer> {
    check_point(x_variety, form, x)?;
    let z: Vec<C64> = x
        .iter()
        .zip(x_variety.weights().as_slice())
        .map(|(xk, &b)| if b == 1 { *xk } else { xk.powf(1.0 / b as f64) })
        .collect();
    theta_transfer_at(x_variety, form, &z, params)
}
