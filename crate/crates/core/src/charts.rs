//! Generalized-cone parametrizations `Π(s, x) = s^β * π(x)` of a weighted
//! homogeneous variety around a regular anchor point `ξ`.
//!
//! The slice `Y = {y ∈ Σ : y_p = ξ_p}` through the anchor is parametrized by
//! the implicit function theorem: `m = d − 1` free coordinates `x` are chosen
//! among the non-pivot coordinates and the remaining `n − d` dependent ones
//! are recovered by Newton continuation from the anchor.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::form::ZeroOneForm;
use crate::linalg::{self, CMatrix};
use crate::variety::{act, Variety};
use crate::{Error, Result, C64};

const NEWTON_MAX_ITER: usize = 30;
const CONTINUATION_STEP: f64 = 0.1;
const PROBE_RAYS: usize = 16;
const PROBE_MAX: f64 = 1.0;
const CONDITION_DROP: f64 = 0.25;
const PROBE_SEED: u64 = 0x5eed_c4a7;

/// Generalized cone around a regular anchor.
#[derive(Clone, Debug)]
pub struct Chart {
    variety: Variety,
    anchor: Vec<C64>,
    pivot: usize,
    free: Vec<usize>,
    dependent: Vec<usize>,
    anchor_condition: f64,
    domain_radius: f64,
}

/// Pullback `Π*λ = F₀ ds̄ + Σ_j F_j dx̄_j` at one chart point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PulledBackForm {
    pub f0: C64,
    pub fj: Vec<C64>,
}

impl Chart {
    /// Builds the chart anchored at `xi`. `tol` is the membership tolerance
    /// used to accept the anchor.
    pub fn build(variety: &Variety, xi: &[C64], tol: f64) -> Result<Chart> {
        variety.check_dim(xi)?;
        let d = variety.require_pure_dim()?;
        if !variety.is_regular(xi, tol)? {
            return Err(Error::SingularAnchor);
        }
        let n = variety.ambient_dim();
        let (pivot, largest) = xi
            .iter()
            .enumerate()
            .map(|(k, c)| (k, c.norm()))
            .fold((0, -1.0), |acc, (k, m)| if m > acc.1 { (k, m) } else { acc });
        if largest < 1.0 {
            return Err(Error::PivotTooSmall { largest });
        }

        let jac = variety.jacobian(xi);
        let others: Vec<usize> = (0..n).filter(|&k| k != pivot).collect();
        let codim = n - d;
        // pivoted Gram–Schmidt on the slice Jacobian columns
        let mut cols: Vec<Vec<C64>> = others.iter().map(|&k| jac.column(k).iter().copied().collect()).collect();
        let scale = cols.iter().map(|c| linalg::norm(c)).fold(0.0, f64::max);
        let mut chosen = Vec::with_capacity(codim);
        let mut remaining: Vec<usize> = (0..others.len()).collect();
        for _ in 0..codim {
            let (pos, best) = remaining
                .iter()
                .enumerate()
                .map(|(pos, &i)| (pos, linalg::norm(&cols[i])))
                .fold((usize::MAX, 0.0), |acc, (p, v)| if v > acc.1 { (p, v) } else { acc });
            if pos == usize::MAX || best <= 1e-10 * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::ImplicitFunctionFailure);
            }
            let i = remaining.remove(pos);
            let q: Vec<C64> = cols[i].iter().map(|c| c / best).collect();
            for &j in &remaining {
                let proj = linalg::inner(&cols[j], &q);
                for (c, qv) in cols[j].iter_mut().zip(&q) {
                    *c -= proj * qv;
                }
            }
            chosen.push(others[i]);
        }
        let mut dependent = chosen;
        dependent.sort_unstable();
        let free: Vec<usize> = others.into_iter().filter(|k| !dependent.contains(k)).collect();

        let mut chart = Chart {
            variety: variety.clone(),
            anchor: xi.to_vec(),
            pivot,
            free,
            dependent,
            anchor_condition: 0.0,
            domain_radius: 0.0,
        };
        chart.anchor_condition = chart.dependent_condition(xi);
        if !(chart.anchor_condition > 0.0) {
            return Err(Error::ImplicitFunctionFailure);
        }
        chart.domain_radius = chart.probe_domain_radius();
        Ok(chart)
    }

    pub fn variety(&self) -> &Variety {
        &self.variety
    }

    pub fn anchor(&self) -> &[C64] {
        &self.anchor
    }

    pub fn pivot(&self) -> usize {
        self.pivot
    }

    pub fn free_coordinates(&self) -> &[usize] {
        &self.free
    }

    pub fn dependent_coordinates(&self) -> &[usize] {
        &self.dependent
    }

    pub fn slice_dim(&self) -> usize {
        self.free.len()
    }

    pub fn domain_radius(&self) -> f64 {
        self.domain_radius
    }

    pub fn x_anchor(&self) -> Vec<C64> {
        self.free.iter().map(|&k| self.anchor[k]).collect()
    }

    fn dependent_block(&self, y: &[C64]) -> (CMatrix, CMatrix) {
        let jac = self.variety.jacobian(y);
        let rows = jac.nrows();
        let dep = CMatrix::from_fn(rows, self.dependent.len(), |r, c| jac[(r, self.dependent[c])]);
        let free = CMatrix::from_fn(rows, self.free.len(), |r, c| jac[(r, self.free[c])]);
        (dep, free)
    }

    fn dependent_condition(&self, y: &[C64]) -> f64 {
        let (dep, _) = self.dependent_block(y);
        if self.dependent.is_empty() {
            return 1.0;
        }
        let sv = dep.singular_values();
        let k = self.dependent.len();
        let mut s: Vec<f64> = sv.iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s.get(k - 1).copied().unwrap_or(0.0)
    }

    fn newton(&self, y: &mut [C64]) -> Result<()> {
        let scale = linalg::norm(y).max(1.0);
        for _ in 0..NEWTON_MAX_ITER {
            let r = self.variety.residuals(y);
            let rn = linalg::norm(&r);
            if !rn.is_finite() {
                return Err(Error::NewtonDivergence);
            }
            let (dep, _) = self.dependent_block(y);
            let step = linalg::pinv_solve(&dep, &r, 1e-12);
            let sn = linalg::norm(&step);
            if sn > 10.0 * scale {
                return Err(Error::NewtonDivergence);
            }
            for (&k, st) in self.dependent.iter().zip(&step) {
                y[k] -= st;
            }
            if sn <= 1e-15 * scale {
                break;
            }
        }
        let residual = self.variety.membership_residual(y);
        if residual <= 1e-12 {
            Ok(())
        } else {
            Err(Error::NewtonDivergence)
        }
    }

    /// Slice point `π(x)` as a full vector with `y_pivot = ξ_pivot`, computed by
    /// predictor–corrector continuation from the anchor. No domain check.
    fn slice_unchecked(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.free.len() {
            return Err(Error::DimensionMismatch {
                expected: self.free.len(),
                got: x.len(),
            });
        }
        let x0 = self.x_anchor();
        let dist = linalg::distance(x, &x0);
        let mut y = self.anchor.clone();
        if dist == 0.0 {
            return Ok(y);
        }
        let steps = (dist / CONTINUATION_STEP).ceil().max(1.0) as usize;
        let mut prev = x0.clone();
        for i in 1..=steps {
            let t = i as f64 / steps as f64;
            let target: Vec<C64> = x0.iter().zip(x).map(|(a, b)| a + (b - a) * t).collect();
            let dx: Vec<C64> = target.iter().zip(&prev).map(|(a, b)| a - b).collect();
            let ddep = self.dependent_derivative(&y);
            for (r, &k) in self.dependent.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (c, dxc) in dx.iter().enumerate() {
                    acc += ddep[(r, c)] * dxc;
                }
                y[k] += acc;
            }
            for (&k, v) in self.free.iter().zip(&target) {
                y[k] = *v;
            }
            self.newton(&mut y)?;
            prev = target;
        }
        Ok(y)
    }

    /// `∂y_dep/∂x = −J_dep⁺ J_free` at a slice point.
    fn dependent_derivative(&self, y: &[C64]) -> CMatrix {
        let (dep, free) = self.dependent_block(y);
        let mut out = CMatrix::zeros(self.dependent.len(), self.free.len());
        for c in 0..self.free.len() {
            let rhs: Vec<C64> = free.column(c).iter().copied().collect();
            let col = linalg::pinv_solve(&dep, &rhs, 1e-12);
            for (r, v) in col.into_iter().enumerate() {
                out[(r, c)] = -v;
            }
        }
        out
    }

    fn probe_domain_radius(&self) -> f64 {
        let m = self.free.len();
        if m == 0 {
            return 0.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
        let x0 = self.x_anchor();
        let mut radius = PROBE_MAX;
        for _ in 0..PROBE_RAYS {
            let mut dir: Vec<C64> = (0..m)
                .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            let nrm = linalg::norm(&dir);
            dir.iter_mut().for_each(|c| *c /= nrm);
            let mut t = 0.02;
            while t <= radius {
                let x: Vec<C64> = x0.iter().zip(&dir).map(|(a, d)| a + d * t).collect();
                let ok = match self.slice_unchecked(&x) {
                    Ok(y) => {
                        self.dependent_condition(&y) >= CONDITION_DROP * self.anchor_condition
                            && self
                                .variety
                                .pure_dim()
                                .is_some_and(|d| self.variety.jacobian_is_full_rank(&y, d))
                    }
                    Err(_) => false,
                };
                if !ok {
                    radius = radius.min(t);
                    break;
                }
                t *= 1.25;
            }
        }
        0.5 * radius
    }

    fn check_domain(&self, x: &[C64]) -> Result<()> {
        if x.len() != self.free.len() {
            return Err(Error::DimensionMismatch {
                expected: self.free.len(),
                got: x.len(),
            });
        }
        let distance = linalg::distance(x, &self.x_anchor());
        if distance > self.domain_radius {
            return Err(Error::OutsideChartDomain {
                distance,
                radius: self.domain_radius,
            });
        }
        Ok(())
    }

    /// Slice point `π(x)`, a point of Σ with pivot entry `ξ_pivot`.
    pub fn slice_point(&self, x: &[C64]) -> Result<Vec<C64>> {
        self.check_domain(x)?;
        self.slice_unchecked(x)
    }

    /// `π(x)` together with `∂π/∂x` as an `n × m` matrix.
    pub fn slice_jacobian(&self, x: &[C64]) -> Result<(Vec<C64>, CMatrix)> {
        let y = self.slice_point(x)?;
        let ddep = self.dependent_derivative(&y);
        let n = self.variety.ambient_dim();
        let mut jac = CMatrix::zeros(n, self.free.len());
        for (c, &k) in self.free.iter().enumerate() {
            jac[(k, c)] = C64::new(1.0, 0.0);
        }
        for (r, &k) in self.dependent.iter().enumerate() {
            for c in 0..self.free.len() {
                jac[(k, c)] = ddep[(r, c)];
            }
        }
        Ok((y, jac))
    }

    /// `Π(s, x) = s^β * π(x)`.
    pub fn eval(&self, s: C64, x: &[C64]) -> Result<Vec<C64>> {
        let y = self.slice_point(x)?;
        Ok(act(s, self.variety.weights(), &y))
    }

    /// Local inverse of [`Chart::eval`] for `z ≠ 0`.
    pub fn invert(&self, z: &[C64]) -> Result<(C64, Vec<C64>)> {
        self.variety.check_dim(z)?;
        let bp = self.variety.weights().as_slice()[self.pivot];
        let ratio = z[self.pivot] / self.anchor[self.pivot];
        if ratio.norm() == 0.0 {
            return Err(Error::NotInChart);
        }
        let root = ratio.powf(1.0 / bp as f64);
        let mut best: Option<(f64, C64, Vec<C64>)> = None;
        for j in 0..bp {
            let s = root * C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / bp as f64);
            let y = act(s.inv(), self.variety.weights(), z);
            let x: Vec<C64> = self.free.iter().map(|&k| y[k]).collect();
            let Ok(pi) = self.slice_point(&x) else {
                continue;
            };
            let scale = linalg::norm(&y).max(1.0);
            if linalg::distance(&pi, &y) > 1e-8 * scale {
                continue;
            }
            let dist = linalg::distance(&x, &self.x_anchor());
            if best.as_ref().is_none_or(|b| dist < b.0) {
                best = Some((dist, s, x));
            }
        }
        best.map(|(_, s, x)| (s, x)).ok_or(Error::NotInChart)
    }

    /// Pullback of `λ` through `Π` at `(s, x)`.
    pub fn pullback_form(&self, form: &ZeroOneForm, s: C64, x: &[C64]) -> Result<PulledBackForm> {
        let (y, dy) = self.slice_jacobian(x)?;
        let beta = self.variety.weights().as_slice();
        let z = act(s, self.variety.weights(), &y);
        let f = form.eval(&z);
        let mut f0 = C64::new(0.0, 0.0);
        for k in 0..y.len() {
            f0 += f[k] * beta[k] as f64 * (s.powu(beta[k] - 1) * y[k]).conj();
        }
        let fj = (0..self.free.len())
            .map(|j| {
                (0..y.len())
                    .filter(|&k| k != self.pivot)
                    .map(|k| f[k] * (s.powu(beta[k]) * dy[(k, j)]).conj())
                    .sum()
            })
            .collect();
        Ok(PulledBackForm { f0, fj })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::variety::SparsePolynomial;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn quadric_chart() -> Chart {
        let v = fixtures::quadric_cone();
        Chart::build(&v, &[c(1.0, 0.0); 3], 1e-10).unwrap()
    }

    fn random_chart_points(chart: &Chart, count: usize, seed: u64) -> Vec<(C64, Vec<C64>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x0 = chart.x_anchor();
        (0..count)
            .map(|_| {
                let s = C64::from_polar(rng.random_range(0.1..2.0), rng.random_range(0.0..6.28));
                let r = chart.domain_radius() * rng.random_range(0.0..1.0);
                let x = x0
                    .iter()
                    .map(|a| a + C64::from_polar(r, rng.random_range(0.0..6.28)))
                    .collect();
                (s, x)
            })
            .collect()
    }

    #[test]
    fn line_chart_has_empty_slice() {
        let v = fixtures::line2();
        let chart = Chart::build(&v, &[c(1.0, 0.0), c(0.0, 0.0)], 1e-10).unwrap();
        assert_eq!(chart.pivot(), 0);
        assert_eq!(chart.slice_dim(), 0);
        assert_eq!(chart.eval(c(0.3, 0.2), &[]).unwrap(), vec![c(0.3, 0.2), c(0.0, 0.0)]);
        let f = ZeroOneForm::raw_bump(vec![c(1.0, 0.0), c(0.5, 0.0)], 2.0).unwrap();
        let p = chart.pullback_form(&f, c(0.4, 0.0), &[]).unwrap();
        assert!((p.f0 - f.eval(&[c(0.4, 0.0), c(0.0, 0.0)])[0]).norm() < 1e-15);
        assert!(p.fj.is_empty());
    }

    #[test]
    fn singular_and_small_anchors_rejected() {
        let v = fixtures::quadric_cone();
        assert!(matches!(Chart::build(&v, &[c(0.0, 0.0); 3], 1e-10), Err(Error::SingularAnchor)));
        let small = [c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)];
        assert!(matches!(Chart::build(&v, &small, 1e-10), Err(Error::PivotTooSmall { .. })));
    }

    #[test]
    fn quadric_chart_points_lie_on_regular_part() {
        let chart = quadric_chart();
        let v = chart.variety().clone();
        assert!(chart.domain_radius() > 0.0);
        assert!(linalg::distance(&chart.eval(c(1.0, 0.0), &chart.x_anchor()).unwrap(), chart.anchor()) < 1e-14);
        assert_eq!(chart.eval(c(0.0, 0.0), &chart.x_anchor()).unwrap(), vec![c(0.0, 0.0); 3]);
        for (s, x) in random_chart_points(&chart, 50, 1) {
            let z = chart.eval(s, &x).unwrap();
            assert!(v.contains(&z, 1e-10));
            assert!(v.is_regular(&z, 1e-10).unwrap());
        }
    }

    #[test]
    fn cone_slice_scaling_is_exact() {
        let chart = quadric_chart();
        for (s, x) in random_chart_points(&chart, 20, 2) {
            let a = chart.eval(s, &x).unwrap();
            let b: Vec<C64> = chart.eval(c(1.0, 0.0), &x).unwrap().iter().map(|v| v * s).collect();
            assert!(linalg::distance(&a, &b) < 1e-14);
        }
    }

    #[test]
    fn invert_round_trip() {
        let chart = quadric_chart();
        for (s, x) in random_chart_points(&chart, 50, 3) {
            let z = chart.eval(s, &x).unwrap();
            let (s2, x2) = chart.invert(&z).unwrap();
            assert!((s2 - s).norm() < 1e-8 * s.norm().max(1.0));
            assert!(linalg::distance(&x2, &x) < 1e-8);
        }
        let (s, x) = chart.invert(chart.anchor()).unwrap();
        assert!((s - c(1.0, 0.0)).norm() < 1e-14);
        assert!(linalg::distance(&x, &chart.x_anchor()) < 1e-14);
    }

    #[test]
    fn weighted_invert_picks_matching_root() {
        let v = fixtures::cusp();
        // on the link of the cusp: (t³, t²) scaled
        let t = c(1.2, 0.3);
        let xi = [t.powu(3), t.powu(2)];
        let chart = Chart::build(&v, &xi, 1e-10).unwrap();
        let s = c(0.6, -0.4);
        let z = chart.eval(s, &[]).unwrap();
        let (s2, _) = chart.invert(&z).unwrap();
        let z2 = chart.eval(s2, &[]).unwrap();
        assert!(linalg::distance(&z, &z2) < 1e-12);
    }

    #[test]
    fn outside_domain_reported() {
        let chart = quadric_chart();
        let far: Vec<C64> = chart.x_anchor().iter().map(|a| a + 10.0).collect();
        assert!(matches!(chart.eval(c(1.0, 0.0), &far), Err(Error::OutsideChartDomain { .. })));
    }

    #[test]
    fn pullback_matches_finite_difference() {
        let chart = quadric_chart();
        let h = SparsePolynomial::new(3, [(vec![1, 0, 0], c(1.0, 0.0))]).unwrap();
        let form = ZeroOneForm::bump_dbar(h, 0.5, 2.0).unwrap();
        let weights = chart.variety().weights().clone();
        let step = 1e-6;
        for (s, x) in random_chart_points(&chart, 10, 4) {
            let s = s * 0.5;
            let p = chart.pullback_form(&form, s, &x).unwrap();
            let z = chart.eval(s, &x).unwrap();
            let f = form.eval(&z);
            // dz̄_k applied to ∂/∂s̄ of Π is conj(∂Π_k/∂s)
            let dz_ds: Vec<C64> = (0..3)
                .map(|k| (chart.eval(s + step, &x).unwrap()[k] - chart.eval(s - step, &x).unwrap()[k]) / (2.0 * step))
                .collect();
            let f0: C64 = (0..3).map(|k| f[k] * dz_ds[k].conj()).sum();
            assert!((f0 - p.f0).norm() < 1e-5);
            let xp: Vec<C64> = x.iter().map(|v| v + step).collect();
            let xm: Vec<C64> = x.iter().map(|v| v - step).collect();
            let zp = act(s, &weights, &chart.slice_point(&xp).unwrap());
            let zm = act(s, &weights, &chart.slice_point(&xm).unwrap());
            let f1: C64 = (0..3).map(|k| f[k] * ((zp[k] - zm[k]) / (2.0 * step)).conj()).sum();
            assert!((f1 - p.fj[0]).norm() < 1e-5);
        }
    }
}
