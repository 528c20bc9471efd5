//! Planar integrals `∫_ℂ K(w) dw∧dw̄` of compactly supported kernels with
//! integrable point singularities of Cauchy type `1/(w − a)`.
//!
//! Orientation convention used everywhere in the crate: `dw∧dw̄ = −2i dA(w)`.
//!
//! The disk `|w| ≤ W` is split into origin-centred annuli at the integrand's
//! declared breakpoint radii, so that every annulus sees a smooth integrand.
//! Around each singular point `a` a polynomial partition of unity
//! `ψ_a(w) = (1 − |w − a|²/ρ²)^8` isolates the singularity: `ψ_a K` is
//! integrated in polar coordinates centred at `a` (where `K · r` is bounded and
//! smooth), `(1 − Σψ_a) K` in origin-centred polar coordinates. Because
//! `1 − ψ_a` vanishes to second order at `a`, the remainder is smooth there.
//! The innermost disk `|w − a| < ε` is excluded and its contribution is
//! estimated and reported through the error estimate.
//!
//! Each polar rectangle is integrated with a tensor Gauss–Legendre rule and
//! refined adaptively: a panel is compared with its two halves in `r` and in
//! `θ`, the larger discrepancy is its error estimate and decides the split
//! direction. Panels with the largest estimates are refined first.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

const PSI_POWER: i32 = 8;
const EXCLUSION_RING_POINTS: usize = 64;

/// Fixed per-panel rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum BaseRule {
    /// Tensor Gauss–Legendre rule with the given number of nodes per direction.
    GaussLegendre(usize),
}

impl Default for BaseRule {
    fn default() -> Self {
        BaseRule::GaussLegendre(8)
    }
}

impl fmt::Display for BaseRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseRule::GaussLegendre(n) => write!(f, "gauss-legendre-{n}"),
        }
    }
}

impl TryFrom<String> for BaseRule {
    type Error = String;
    fn try_from(s: String) -> std::result::Result<Self, String> {
        let order = s
            .strip_prefix("gauss-legendre-")
            .and_then(|n| n.parse::<usize>().ok())
            .ok_or_else(|| format!("unknown base rule `{s}` (expected gauss-legendre-<n>)"))?;
        if !(2..=32).contains(&order) {
            return Err(format!("Gauss–Legendre order must lie in 2..=32, got {order}"));
        }
        Ok(BaseRule::GaussLegendre(order))
    }
}

impl From<BaseRule> for String {
    fn from(r: BaseRule) -> String {
        r.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureParams {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_refinement_depth: usize,
    /// Radius of the excluded disk around each singular point; `None` means
    /// `1e-5 · truncation_radius`.
    pub singular_exclusion: Option<f64>,
    pub base_rule: BaseRule,
    /// Upper bound on the number of leaf panels before giving up.
    pub max_panels: usize,
}

impl Default for QuadratureParams {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_refinement_depth: 40,
            singular_exclusion: None,
            base_rule: BaseRule::default(),
            max_panels: 20_000,
        }
    }
}

impl QuadratureParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: &str| {
            Err(Error::InvalidParameter {
                name,
                reason: reason.to_string(),
            })
        };
        if !(self.rel_tol > 0.0) {
            return bad("rel_tol", "must be positive");
        }
        if !(self.abs_tol > 0.0) {
            return bad("abs_tol", "must be positive");
        }
        if self.max_refinement_depth < 1 {
            return bad("max_refinement_depth", "must be at least 1");
        }
        if let Some(eps) = self.singular_exclusion {
            if !(eps >= 0.0) || !eps.is_finite() {
                return bad("singular_exclusion", "must be a finite nonnegative radius");
            }
        }
        if self.max_panels < 16 {
            return bad("max_panels", "must be at least 16");
        }
        Ok(())
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

type Kernel<'a> = dyn Fn(C64, &mut [C64]) + Sync + 'a;

/// A compactly supported, possibly vector-valued planar integrand.
///
/// `evaluate` must be safe to call concurrently and return finite values away
/// from `singular_points`. The integrand is treated as zero outside
/// `|w| ≤ truncation_radius`. `breakpoints` lists radii of origin-centred
/// circles across which the integrand may fail to be smooth.
pub struct PlanarIntegrand<'a> {
    components: usize,
    evaluate: Box<Kernel<'a>>,
    singular_points: Vec<C64>,
    truncation_radius: f64,
    breakpoints: Vec<f64>,
}

impl<'a> PlanarIntegrand<'a> {
    pub fn scalar(truncation_radius: f64, f: impl Fn(C64) -> C64 + Sync + 'a) -> Self {
        Self::vector(1, truncation_radius, move |w, out| out[0] = f(w))
    }

    pub fn vector(
        components: usize,
        truncation_radius: f64,
        f: impl Fn(C64, &mut [C64]) + Sync + 'a,
    ) -> Self {
        Self {
            components,
            evaluate: Box::new(f),
            singular_points: Vec::new(),
            truncation_radius,
            breakpoints: Vec::new(),
        }
    }

    pub fn with_singular_point(mut self, a: C64) -> Self {
        self.singular_points.push(a);
        self
    }

    pub fn with_breakpoints(mut self, radii: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(radii);
        self
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn truncation_radius(&self) -> f64 {
        self.truncation_radius
    }
}

/// Result of [`integrate_plane`]: the values of `∫ K_j dw∧dw̄` per component.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneIntegral {
    pub components: Vec<C64>,
    /// Refinement error estimate plus the excluded-disk estimate.
    pub error_estimate: f64,
    /// Part of `error_estimate` owed to the excluded disks around singular points.
    pub exclusion_estimate: f64,
    pub panels: usize,
    pub evaluations: usize,
}

impl PlaneIntegral {
    /// Sum over components of `∫ K_j dw∧dw̄`.
    pub fn value(&self) -> C64 {
        self.components.iter().sum()
    }

    /// The same integral against the area element, `∫ K dA = value / (−2i)`.
    pub fn area_value(&self) -> C64 {
        self.value() / C64::new(0.0, -2.0)
    }
}

#[derive(Clone, Copy, Debug)]
enum Frame {
    Origin,
    Singular { center: C64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Dir {
    R,
    T,
}

#[derive(Clone, Copy, Debug)]
struct Rect {
    region: usize,
    r0: f64,
    r1: f64,
    t0: f64,
    t1: f64,
    depth: usize,
}

impl Rect {
    fn halves(&self, dir: Dir) -> (Rect, Rect) {
        let mut a = *self;
        let mut b = *self;
        a.depth += 1;
        b.depth += 1;
        match dir {
            Dir::R => {
                let m = 0.5 * (self.r0 + self.r1);
                a.r1 = m;
                b.r0 = m;
            }
            Dir::T => {
                let m = 0.5 * (self.t0 + self.t1);
                a.t1 = m;
                b.t0 = m;
            }
        }
        (a, b)
    }
}

struct Leaf {
    rect: Rect,
    refined: Vec<C64>,
    error: f64,
    split: Dir,
    children: (Vec<C64>, Vec<C64>),
}

struct HeapItem {
    error: f64,
    index: usize,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.index.cmp(&self.index))
    }
}

struct SingularDisk {
    center: C64,
    rho: f64,
}

struct Engine<'i, 'a> {
    integrand: &'i PlanarIntegrand<'a>,
    frames: Vec<Frame>,
    disks: Vec<SingularDisk>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    evaluations: usize,
    buf: Vec<C64>,
}

impl Engine<'_, '_> {
    fn psi(&self, w: C64, disk: &SingularDisk) -> f64 {
        let t = (w - disk.center).norm_sqr() / (disk.rho * disk.rho);
        if t >= 1.0 {
            0.0
        } else {
            (1.0 - t).powi(PSI_POWER)
        }
    }

    fn kernel(&mut self, w: C64, out: &mut [C64]) {
        self.evaluations += 1;
        if w.norm() > self.integrand.truncation_radius {
            out.iter_mut().for_each(|o| *o = C64::new(0.0, 0.0));
            return;
        }
        (self.integrand.evaluate)(w, out);
    }

    /// Adds `weight · (frame factor) · K(w)` at the point with polar
    /// coordinates `(r, θ)` in `region`.
    fn accumulate(&mut self, region: usize, r: f64, e: C64, weight: f64, acc: &mut [C64]) {
        let (w, factor) = match self.frames[region] {
            Frame::Origin => {
                let w = e * r;
                let cover: f64 = self.disks.iter().map(|d| self.psi(w, d)).sum();
                (w, (1.0 - cover) * r)
            }
            Frame::Singular { center } => {
                let w = center + e * r;
                let disk = &self.disks[region - 1];
                (w, self.psi(w, disk) * r)
            }
        };
        if factor == 0.0 {
            return;
        }
        let mut buf = std::mem::take(&mut self.buf);
        self.kernel(w, &mut buf);
        let s = weight * factor;
        for (a, v) in acc.iter_mut().zip(&buf) {
            *a += v * s;
        }
        self.buf = buf;
    }

    fn rule(&mut self, rect: &Rect) -> Vec<C64> {
        let q = self.nodes.len();
        let (rm, rh) = (0.5 * (rect.r0 + rect.r1), 0.5 * (rect.r1 - rect.r0));
        let (tm, th) = (0.5 * (rect.t0 + rect.t1), 0.5 * (rect.t1 - rect.t0));
        let mut acc = vec![C64::new(0.0, 0.0); self.integrand.components];
        let phases: Vec<C64> = (0..q)
            .map(|j| C64::from_polar(1.0, tm + th * self.nodes[j]))
            .collect();
        for i in 0..q {
            let r = rm + rh * self.nodes[i];
            for j in 0..q {
                let w = self.weights[i] * self.weights[j] * rh * th;
                self.accumulate(rect.region, r, phases[j], w, &mut acc);
            }
        }
        acc
    }

    fn assess(&mut self, rect: Rect, base: Vec<C64>) -> Leaf {
        let (rl, rr) = rect.halves(Dir::R);
        let (tl, tr) = rect.halves(Dir::T);
        let vrl = self.rule(&rl);
        let vrr = self.rule(&rr);
        let vtl = self.rule(&tl);
        let vtr = self.rule(&tr);
        let disc = |a: &[C64], b: &[C64]| -> f64 {
            base.iter()
                .zip(a.iter().zip(b))
                .map(|(q, (x, y))| (x + y - q).norm())
                .sum()
        };
        let er = disc(&vrl, &vrr);
        let et = disc(&vtl, &vtr);
        let (split, children, error) = if er >= et {
            (Dir::R, (vrl, vrr), er)
        } else {
            (Dir::T, (vtl, vtr), et)
        };
        let refined = children.0.iter().zip(&children.1).map(|(a, b)| a + b).collect();
        Leaf {
            rect,
            refined,
            error,
            split,
            children,
        }
    }
}

fn sanitize_breakpoints(raw: &[f64], w_max: f64) -> Vec<f64> {
    let mut b: Vec<f64> = raw
        .iter()
        .copied()
        .filter(|r| r.is_finite() && *r > 0.0 && *r < w_max * (1.0 - 1e-12))
        .collect();
    b.sort_by(f64::total_cmp);
    b.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * w_max);
    b
}

/// Computes `∫_{|w| ≤ W} K(w) dw∧dw̄` for a planar integrand.
pub fn integrate_plane(integrand: &PlanarIntegrand<'_>, params: &QuadratureParams) -> Result<PlaneIntegral> {
    params.validate()?;
    let ncomp = integrand.components;
    let w_max = integrand.truncation_radius;
    if !(w_max >= 0.0) || !w_max.is_finite() {
        return Err(Error::InvalidParameter {
            name: "truncation_radius",
            reason: format!("must be finite and nonnegative, got {w_max}"),
        });
    }
    if w_max == 0.0 || ncomp == 0 {
        return Ok(PlaneIntegral {
            components: vec![C64::new(0.0, 0.0); ncomp],
            error_estimate: 0.0,
            exclusion_estimate: 0.0,
            panels: 0,
            evaluations: 0,
        });
    }
    let eps = params.singular_exclusion.unwrap_or(1e-5 * w_max);
    let breaks = sanitize_breakpoints(&integrand.breakpoints, w_max);

    let inside: Vec<C64> = integrand
        .singular_points
        .iter()
        .copied()
        .filter(|a| a.norm() <= w_max)
        .collect();
    let mut disks = Vec::with_capacity(inside.len());
    for (i, &a) in inside.iter().enumerate() {
        let sep = inside
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &b)| (a - b).norm())
            .fold(f64::INFINITY, f64::min);
        if sep <= 4.0 * eps {
            return Err(Error::SingularOverlap { min_separation: sep });
        }
        let kink = breaks
            .iter()
            .chain(std::iter::once(&w_max))
            .map(|b| (a.norm() - b).abs())
            .fold(f64::INFINITY, f64::min);
        let cap = (0.5 * sep).min(w_max);
        let floor = cap.min((8.0 * eps).max(1e-6 * w_max));
        let rho = (0.5 * kink).min(cap).max(floor);
        if rho <= 2.0 * eps {
            return Err(Error::InvalidParameter {
                name: "singular_exclusion",
                reason: format!("exclusion radius {eps:.3e} too large for the partition radius {rho:.3e}"),
            });
        }
        disks.push(SingularDisk { center: a, rho });
    }

    let mut frames = vec![Frame::Origin];
    frames.extend(disks.iter().map(|d| Frame::Singular { center: d.center }));
    let BaseRule::GaussLegendre(order) = params.base_rule;
    let (nodes, weights) = gauss_legendre(order);
    let mut engine = Engine {
        integrand,
        frames,
        disks,
        nodes,
        weights,
        evaluations: 0,
        buf: vec![C64::new(0.0, 0.0); ncomp],
    };

    let mut rects = Vec::new();
    let mut radii = vec![0.0];
    radii.extend(breaks.iter().copied());
    radii.push(w_max);
    const INITIAL_ANGULAR: usize = 4;
    for pair in radii.windows(2) {
        for k in 0..INITIAL_ANGULAR {
            rects.push(Rect {
                region: 0,
                r0: pair[0],
                r1: pair[1],
                t0: 2.0 * PI * k as f64 / INITIAL_ANGULAR as f64,
                t1: 2.0 * PI * (k + 1) as f64 / INITIAL_ANGULAR as f64,
                depth: 0,
            });
        }
    }
    let mut exclusion = 0.0;
    for (i, disk) in engine.disks.iter().enumerate() {
        for k in 0..INITIAL_ANGULAR {
            rects.push(Rect {
                region: i + 1,
                r0: eps,
                r1: disk.rho,
                t0: 2.0 * PI * k as f64 / INITIAL_ANGULAR as f64,
                t1: 2.0 * PI * (k + 1) as f64 / INITIAL_ANGULAR as f64,
                depth: 0,
            });
        }
    }
    if eps > 0.0 {
        for region in 1..engine.frames.len() {
            // ring average ∫ ψK(a + εe^{iθ}) ε dθ bounds the excluded mass by ε·|A(ε)|
            let mut ring = vec![C64::new(0.0, 0.0); ncomp];
            let h = 2.0 * PI / EXCLUSION_RING_POINTS as f64;
            for j in 0..EXCLUSION_RING_POINTS {
                let e = C64::from_polar(1.0, h * j as f64);
                engine.accumulate(region, eps, e, h, &mut ring);
            }
            exclusion += eps * ring.iter().map(|c| c.norm()).sum::<f64>();
        }
    }

    let mut leaves: Vec<Leaf> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut total = vec![C64::new(0.0, 0.0); ncomp];
    let mut total_err = 0.0;
    for rect in rects {
        let base = engine.rule(&rect);
        let leaf = engine.assess(rect, base);
        for (t, v) in total.iter_mut().zip(&leaf.refined) {
            *t += v;
        }
        total_err += leaf.error;
        heap.push(HeapItem {
            error: leaf.error,
            index: leaves.len(),
        });
        leaves.push(leaf);
    }
    let mut active = leaves.len();
    let mut frozen_err = 0.0;
    let mut iterations = 0usize;
    loop {
        iterations += 1;
        if iterations % 64 == 0 {
            // resynchronise the running sums
            total = vec![C64::new(0.0, 0.0); ncomp];
            total_err = frozen_err;
            for item in heap.iter() {
                let leaf = &leaves[item.index];
                total_err += leaf.error;
            }
            for leaf in leaves.iter().filter(|l| !l.refined.is_empty()) {
                for (t, v) in total.iter_mut().zip(&leaf.refined) {
                    *t += v;
                }
            }
        }
        let scale: f64 = total.iter().map(|c| c.norm()).sum();
        let tol = params.abs_tol.max(params.rel_tol * scale);
        if total_err <= tol {
            break;
        }
        let Some(item) = heap.pop() else {
            return Err(Error::NoConvergence(format!(
                "refinement depth {} exhausted with error estimate {:.3e} > tolerance {:.3e}",
                params.max_refinement_depth, total_err, tol
            )));
        };
        let idx = item.index;
        if leaves[idx].rect.depth >= params.max_refinement_depth {
            frozen_err += leaves[idx].error;
            continue;
        }
        if active >= params.max_panels {
            return Err(Error::NoConvergence(format!(
                "panel budget {} exhausted with error estimate {:.3e} > tolerance {:.3e}",
                params.max_panels, total_err, tol
            )));
        }
        let rect = leaves[idx].rect;
        let parent = std::mem::replace(
            &mut leaves[idx],
            Leaf {
                rect,
                refined: Vec::new(),
                error: 0.0,
                split: Dir::R,
                children: (Vec::new(), Vec::new()),
            },
        );
        for (t, v) in total.iter_mut().zip(&parent.refined) {
            *t -= v;
        }
        total_err -= parent.error;
        let (ra, rb) = parent.rect.halves(parent.split);
        let (va, vb) = parent.children;
        for (rect, base) in [(ra, va), (rb, vb)] {
            let leaf = engine.assess(rect, base);
            for (t, v) in total.iter_mut().zip(&leaf.refined) {
                *t += v;
            }
            total_err += leaf.error;
            heap.push(HeapItem {
                error: leaf.error,
                index: leaves.len(),
            });
            leaves.push(leaf);
        }
        active += 1;
    }

    let mut components = vec![C64::new(0.0, 0.0); ncomp];
    let mut err = 0.0;
    for leaf in leaves.iter().filter(|l| !l.refined.is_empty()) {
        for (t, v) in components.iter_mut().zip(&leaf.refined) {
            *t += v;
        }
        err += leaf.error;
    }
    if components.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::NoConvergence("integrand produced non-finite values".into()));
    }
    // dw∧dw̄ = −2i dA
    let orientation = C64::new(0.0, -2.0);
    for c in components.iter_mut() {
        *c *= orientation;
    }
    Ok(PlaneIntegral {
        components,
        error_estimate: 2.0 * (err + exclusion),
        exclusion_estimate: 2.0 * exclusion,
        panels: active,
        evaluations: engine.evaluations,
    })
}

/// Solid Cauchy transform `(1/2πi) ∫ f(u)/(u − z) du∧dū` of a function
/// supported in `|u| ≤ support_radius`.
pub fn cauchy_transform(
    f: impl Fn(C64) -> C64 + Sync,
    support_radius: f64,
    z: C64,
    params: &QuadratureParams,
) -> Result<C64> {
    cauchy_transform_estimate(f, support_radius, z, params).map(|r| r.value())
}

/// [`cauchy_transform`] returning the full quadrature diagnostics.
pub fn cauchy_transform_estimate(
    f: impl Fn(C64) -> C64 + Sync,
    support_radius: f64,
    z: C64,
    params: &QuadratureParams,
) -> Result<PlaneIntegral> {
    let factor = C64::new(0.0, 2.0 * PI).inv();
    let integrand =
        PlanarIntegrand::scalar(support_radius, move |u| f(u) * factor / (u - z)).with_singular_point(z);
    integrate_plane(&integrand, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [2usize, 5, 8, 13] {
            let (x, w) = gauss_legendre(n);
            for p in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn disk_area() {
        let k = PlanarIntegrand::scalar(1.0, |_| c(1.0, 0.0));
        let r = integrate_plane(&k, &QuadratureParams::default()).unwrap();
        assert!((r.area_value() - c(PI, 0.0)).norm() < 1e-12);
        assert!((r.value() - c(0.0, -2.0 * PI)).norm() < 1e-12);
    }

    #[test]
    fn cauchy_kernel_centred_at_origin_vanishes() {
        let k = PlanarIntegrand::scalar(1.0, |w| w.inv()).with_singular_point(c(0.0, 0.0));
        let r = integrate_plane(&k, &QuadratureParams::default()).unwrap();
        assert!(r.value().norm() < 1e-10);
    }

    #[test]
    fn solid_cauchy_transform_of_disk_at_one_half() {
        // −(1/π) ∫_{|u|<1} dA/(u − 1/2) = conj(1/2)
        let k = PlanarIntegrand::scalar(1.0, |u| (u - c(0.5, 0.0)).inv() * (-1.0 / PI))
            .with_singular_point(c(0.5, 0.0));
        let r = integrate_plane(&k, &QuadratureParams::default()).unwrap();
        assert!((r.area_value() - c(0.5, 0.0)).norm() < 1e-9, "{:?}", r.area_value());
    }

    #[test]
    fn cauchy_transform_examples() {
        let p = QuadratureParams::default();
        let indicator = |u: C64| if u.norm() < 1.0 { c(1.0, 0.0) } else { c(0.0, 0.0) };
        assert_eq!(cauchy_transform(|_| c(0.0, 0.0), 1.0, c(0.2, 0.1), &p).unwrap(), c(0.0, 0.0));
        assert!(cauchy_transform(indicator, 1.0, c(0.0, 0.0), &p).unwrap().norm() < 1e-10);
        let z = c(0.3, 0.4);
        let v = cauchy_transform(indicator, 1.0, z, &p).unwrap();
        assert!((v - z.conj()).norm() < 1e-9 * z.norm(), "{v}");
    }

    #[test]
    fn overlapping_singular_points_are_rejected() {
        let p = QuadratureParams {
            singular_exclusion: Some(0.01),
            ..Default::default()
        };
        let k = PlanarIntegrand::scalar(1.0, |_| c(1.0, 0.0))
            .with_singular_point(c(0.1, 0.0))
            .with_singular_point(c(0.13, 0.0));
        assert!(matches!(integrate_plane(&k, &p), Err(Error::SingularOverlap { .. })));
    }

    #[test]
    fn two_singular_points() {
        // −(1/π)∫_{|u|<1} [1/(u−a) + 1/(u−b)] dA = conj(a) + conj(b)
        let a = c(0.4, 0.1);
        let b = c(-0.3, -0.5);
        let k = PlanarIntegrand::scalar(1.0, move |u| ((u - a).inv() + (u - b).inv()) * (-1.0 / PI))
            .with_singular_point(a)
            .with_singular_point(b);
        let r = integrate_plane(&k, &QuadratureParams::default()).unwrap();
        assert!((r.area_value() - (a.conj() + b.conj())).norm() < 1e-9);
    }

    #[test]
    fn depth_exhaustion_is_reported() {
        let p = QuadratureParams {
            max_refinement_depth: 1,
            rel_tol: 1e-14,
            abs_tol: 1e-300,
            ..Default::default()
        };
        // discontinuous across a circle not declared as a breakpoint
        let k = PlanarIntegrand::scalar(1.0, |w| if w.norm() < 0.37 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        assert!(matches!(integrate_plane(&k, &p), Err(Error::NoConvergence(_))));
    }

    #[test]
    fn invalid_params_rejected() {
        let p = QuadratureParams {
            rel_tol: 0.0,
            ..Default::default()
        };
        let k = PlanarIntegrand::scalar(1.0, |_| c(1.0, 0.0));
        assert!(matches!(integrate_plane(&k, &p), Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn base_rule_string_round_trip() {
        let r = BaseRule::try_from("gauss-legendre-12".to_string()).unwrap();
        assert_eq!(r, BaseRule::GaussLegendre(12));
        assert_eq!(String::from(r), "gauss-legendre-12");
        assert!(BaseRule::try_from("simpson".to_string()).is_err());
    }
}
