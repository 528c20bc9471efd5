//! Compactly supported (0,1)-forms `λ = Σ f_k dz̄_k` on ℂⁿ, evaluated on Σ.

use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::linalg::norm;
use crate::variety::{orbit_radius, SparsePolynomial, Weights};
use crate::{Error, Result, C64};

pub(crate) type Buf = SmallVec<[C64; 8]>;

pub(crate) fn zeros(n: usize) -> Buf {
    SmallVec::from_elem(C64::new(0.0, 0.0), n)
}

/// Coefficient functions of a (0,1)-form. Implementations must be reentrant.
pub trait Coefficients: Send + Sync {
    fn ambient_dim(&self) -> usize;

    /// Writes `(f_1(z), …, f_n(z))` into `out`.
    fn eval(&self, z: &[C64], out: &mut [C64]);

    /// Radii `r` such that the coefficients may fail to be smooth across `‖z‖ = r`.
    fn norm_breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Radii `t` such that `w ↦ f(w^β * z)` may fail to be smooth across `|w| = t`.
    fn orbit_breakpoints(&self, weights: &[u32], z: &[C64]) -> Vec<f64> {
        self.norm_breakpoints()
            .into_iter()
            .map(|r| orbit_radius(weights, z, r))
            .collect()
    }

    /// A function `p` with `∂̄p = λ` when one is known in closed form.
    fn potential(&self, _z: &[C64]) -> Option<C64> {
        None
    }
}

/// A (0,1)-form with support in the open ball of radius `support_radius`.
///
/// Coefficients are forced to zero outside the ball regardless of the
/// underlying [`Coefficients`].
#[derive(Clone)]
pub struct ZeroOneForm {
    coefficients: Arc<dyn Coefficients>,
    support_radius: f64,
    sup_bound: f64,
    dbar_closed: bool,
    label: String,
}

impl fmt::Debug for ZeroOneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ZeroOneForm")
            .field("label", &self.label)
            .field("ambient_dim", &self.ambient_dim())
            .field("support_radius", &self.support_radius)
            .field("sup_bound", &self.sup_bound)
            .field("dbar_closed", &self.dbar_closed)
            .finish()
    }
}

impl ZeroOneForm {
    pub fn new(
        coefficients: Arc<dyn Coefficients>,
        support_radius: f64,
        sup_bound: f64,
        dbar_closed: bool,
        label: impl Into<String>,
    ) -> Result<Self> {
        if !(support_radius > 0.0) || !support_radius.is_finite() {
            return Err(Error::InvalidParameter {
                name: "support_radius",
                reason: format!("must be positive and finite, got {support_radius}"),
            });
        }
        if !(sup_bound >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "sup_bound",
                reason: format!("must be nonnegative, got {sup_bound}"),
            });
        }
        Ok(Self {
            coefficients,
            support_radius,
            sup_bound,
            dbar_closed,
            label: label.into(),
        })
    }

    /// Wraps a closure `z ↦ (f_k(z))` as a form.
    pub fn from_fn(
        ambient_dim: usize,
        support_radius: f64,
        sup_bound: f64,
        dbar_closed: bool,
        label: impl Into<String>,
        f: impl Fn(&[C64], &mut [C64]) + Send + Sync + 'static,
    ) -> Result<Self> {
        let coefficients = Arc::new(FnCoefficients {
            n: ambient_dim,
            f: Box::new(f),
        });
        Self::new(coefficients, support_radius, sup_bound, dbar_closed, label)
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            coefficients: Arc::new(Zero { n: ambient_dim }),
            support_radius: 1.0,
            sup_bound: 0.0,
            dbar_closed: true,
            label: "zero".into(),
        }
    }

    /// `λ = ∂̄(h·χ)` with `χ(z) = smoothstep` of `‖z‖²` between `r0²` (χ = 1)
    /// and `R²` (χ = 0). Exactly ∂̄-closed with potential `hχ`.
    pub fn bump_dbar(h: SparsePolynomial, r0: f64, support_radius: f64) -> Result<Self> {
        if !(r0 > 0.0 && r0 < support_radius) {
            return Err(Error::InvalidParameter {
                name: "r0",
                reason: format!("need 0 < r0 < R, got r0 = {r0}, R = {support_radius}"),
            });
        }
        let sup = h.modulus_bound(support_radius) * 1.5 * support_radius
            / (support_radius * support_radius - r0 * r0);
        let coefficients = Arc::new(BumpDbar {
            h,
            r0,
            r1: support_radius,
        });
        Self::new(coefficients, support_radius, sup, true, "bump-dbar")
    }

    /// `f_k = c_k · exp(1 − 1/(1 − ‖z‖²/R²))`, smooth but not ∂̄-closed in general.
    pub fn raw_bump(c: Vec<C64>, support_radius: f64) -> Result<Self> {
        let sup = norm(&c);
        let coefficients = Arc::new(RawBump {
            c,
            r: support_radius,
        });
        Self::new(coefficients, support_radius, sup, false, "raw-bump")
    }

    pub fn ambient_dim(&self) -> usize {
        self.coefficients.ambient_dim()
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn dbar_closed(&self) -> bool {
        self.dbar_closed
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn eval_into(&self, z: &[C64], out: &mut [C64]) {
        if norm(z) >= self.support_radius {
            out.iter_mut().for_each(|o| *o = C64::new(0.0, 0.0));
        } else {
            self.coefficients.eval(z, out);
        }
    }

    pub fn eval(&self, z: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.ambient_dim()];
        self.eval_into(z, &mut out);
        out
    }

    /// Closed-form `p` with `∂̄p = λ`, if the construction provides one.
    pub fn potential(&self, z: &[C64]) -> Option<C64> {
        if norm(z) >= self.support_radius {
            return self.coefficients.potential(z).map(|_| C64::new(0.0, 0.0));
        }
        self.coefficients.potential(z)
    }

    /// Radii `t` at which `w ↦ λ(w^β * z)` may be non-smooth, including the
    /// support boundary.
    pub fn orbit_breakpoints(&self, weights: &[u32], z: &[C64]) -> Vec<f64> {
        let mut b = self.coefficients.orbit_breakpoints(weights, z);
        b.push(orbit_radius(weights, z, self.support_radius));
        b
    }

    /// `c · λ`.
    pub fn scaled(&self, c: C64) -> Self {
        Self {
            coefficients: Arc::new(Scaled {
                inner: self.coefficients.clone(),
                c,
            }),
            support_radius: self.support_radius,
            sup_bound: self.sup_bound * c.norm(),
            dbar_closed: self.dbar_closed,
            label: format!("{}*({})", c, self.label),
        }
    }

    /// `λ + μ`.
    pub fn sum(&self, other: &ZeroOneForm) -> Result<Self> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                got: other.ambient_dim(),
            });
        }
        Ok(Self {
            coefficients: Arc::new(Sum {
                a: self.clone(),
                b: other.clone(),
            }),
            support_radius: self.support_radius.max(other.support_radius),
            sup_bound: self.sup_bound + other.sup_bound,
            dbar_closed: self.dbar_closed && other.dbar_closed,
            label: format!("({})+({})", self.label, other.label),
        })
    }

    /// Pullback `Θ*λ` under `Θ(z) = (z_k^{β_k})`: coefficient `k` is
    /// `f_k(Θ(z)) · β_k · conj(z_k)^{β_k−1}`.
    pub fn theta_pullback(&self, weights: &Weights) -> Result<Self> {
        if weights.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                got: weights.len(),
            });
        }
        let r = self.support_radius;
        let n = weights.len() as f64;
        let beta = weights.as_slice();
        let radius = n.sqrt()
            * beta
                .iter()
                .map(|&b| r.powf(1.0 / b as f64))
                .fold(0.0, f64::max);
        let factor = beta
            .iter()
            .map(|&b| b as f64 * r.powf(1.0 - 1.0 / b as f64))
            .fold(0.0, f64::max);
        Ok(Self {
            coefficients: Arc::new(ThetaPullback {
                inner: self.clone(),
                weights: beta.to_vec(),
            }),
            support_radius: radius,
            sup_bound: self.sup_bound * factor,
            dbar_closed: self.dbar_closed,
            label: format!("theta*({})", self.label),
        })
    }
}

pub(crate) fn theta_into(weights: &[u32], z: &[C64], out: &mut [C64]) {
    for ((o, &b), &zk) in out.iter_mut().zip(weights).zip(z) {
        *o = zk.powu(b);
    }
}

struct Zero {
    n: usize,
}

impl Coefficients for Zero {
    fn ambient_dim(&self) -> usize {
        self.n
    }
    fn eval(&self, _z: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|o| *o = C64::new(0.0, 0.0));
    }
    fn potential(&self, _z: &[C64]) -> Option<C64> {
        Some(C64::new(0.0, 0.0))
    }
}

struct FnCoefficients {
    n: usize,
    f: Box<dyn Fn(&[C64], &mut [C64]) + Send + Sync>,
}

impl Coefficients for FnCoefficients {
    fn ambient_dim(&self) -> usize {
        self.n
    }
    fn eval(&self, z: &[C64], out: &mut [C64]) {
        (self.f)(z, out)
    }
}

struct BumpDbar {
    h: SparsePolynomial,
    r0: f64,
    r1: f64,
}

impl BumpDbar {
    fn tau(&self, t: f64) -> f64 {
        ((t - self.r0 * self.r0) / (self.r1 * self.r1 - self.r0 * self.r0)).clamp(0.0, 1.0)
    }

    fn chi(&self, t: f64) -> f64 {
        let tau = self.tau(t);
        1.0 - tau * tau * (3.0 - 2.0 * tau)
    }

    fn chi_prime(&self, t: f64) -> f64 {
        let tau = self.tau(t);
        -6.0 * tau * (1.0 - tau) / (self.r1 * self.r1 - self.r0 * self.r0)
    }
}

impl Coefficients for BumpDbar {
    fn ambient_dim(&self) -> usize {
        self.h.ambient_dim()
    }

    fn eval(&self, z: &[C64], out: &mut [C64]) {
        let t: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        let d = self.chi_prime(t);
        if d == 0.0 {
            out.iter_mut().for_each(|o| *o = C64::new(0.0, 0.0));
            return;
        }
        let hd = self.h.eval(z) * d;
        for (o, zk) in out.iter_mut().zip(z) {
            *o = hd * zk;
        }
    }

    fn norm_breakpoints(&self) -> Vec<f64> {
        vec![self.r0, self.r1]
    }

    fn potential(&self, z: &[C64]) -> Option<C64> {
        let t: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        Some(self.h.eval(z) * self.chi(t))
    }
}

struct RawBump {
    c: Vec<C64>,
    r: f64,
}

impl Coefficients for RawBump {
    fn ambient_dim(&self) -> usize {
        self.c.len()
    }

    fn eval(&self, z: &[C64], out: &mut [C64]) {
        let t: f64 = z.iter().map(|c| c.norm_sqr()).sum::<f64>() / (self.r * self.r);
        let b = if t < 1.0 { (1.0 - 1.0 / (1.0 - t)).exp() } else { 0.0 };
        for (o, c) in out.iter_mut().zip(&self.c) {
            *o = c * b;
        }
    }
}

struct Scaled {
    inner: Arc<dyn Coefficients>,
    c: C64,
}

impl Coefficients for Scaled {
    fn ambient_dim(&self) -> usize {
        self.inner.ambient_dim()
    }
    fn eval(&self, z: &[C64], out: &mut [C64]) {
        self.inner.eval(z, out);
        out.iter_mut().for_each(|o| *o *= self.c);
    }
    fn norm_breakpoints(&self) -> Vec<f64> {
        self.inner.norm_breakpoints()
    }
    fn orbit_breakpoints(&self, weights: &[u32], z: &[C64]) -> Vec<f64> {
        self.inner.orbit_breakpoints(weights, z)
    }
    fn potential(&self, z: &[C64]) -> Option<C64> {
        self.inner.potential(z).map(|p| p * self.c)
    }
}

struct Sum {
    a: ZeroOneForm,
    b: ZeroOneForm,
}

impl Coefficients for Sum {
    fn ambient_dim(&self) -> usize {
        self.a.ambient_dim()
    }
    fn eval(&self, z: &[C64], out: &mut [C64]) {
        let mut tmp = zeros(out.len());
        self.a.eval_into(z, out);
        self.b.eval_into(z, &mut tmp);
        for (o, t) in out.iter_mut().zip(&tmp) {
            *o += t;
        }
    }
    fn orbit_breakpoints(&self, weights: &[u32], z: &[C64]) -> Vec<f64> {
        let mut v = self.a.orbit_breakpoints(weights, z);
        v.extend(self.b.orbit_breakpoints(weights, z));
        v
    }
    fn potential(&self, z: &[C64]) -> Option<C64> {
        Some(self.a.potential(z)? + self.b.potential(z)?)
    }
}

struct ThetaPullback {
    inner: ZeroOneForm,
    weights: Vec<u32>,
}

impl Coefficients for ThetaPullback {
    fn ambient_dim(&self) -> usize {
        self.weights.len()
    }

    fn eval(&self, z: &[C64], out: &mut [C64]) {
        let mut x = zeros(z.len());
        theta_into(&self.weights, z, &mut x);
        self.inner.eval_into(&x, out);
        for ((o, &b), zk) in out.iter_mut().zip(&self.weights).zip(z) {
            if b > 1 {
                *o *= zk.conj().powu(b - 1) * b as f64;
            }
        }
    }

    fn orbit_breakpoints(&self, weights: &[u32], z: &[C64]) -> Vec<f64> {
        // Θ(w^β * z) = w^{γβ} * Θ(z)
        let composed: Vec<u32> = weights.iter().zip(&self.weights).map(|(a, b)| a * b).collect();
        let mut x = zeros(z.len());
        theta_into(&self.weights, z, &mut x);
        self.inner.orbit_breakpoints(&composed, &x)
    }

    fn potential(&self, z: &[C64]) -> Option<C64> {
        let mut x = zeros(z.len());
        theta_into(&self.weights, z, &mut x);
        self.inner.potential(&x)
    }
}
