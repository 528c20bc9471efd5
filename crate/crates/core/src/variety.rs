//! Weighted homogeneous polynomials and the varieties they cut out.
//!
//! A polynomial `Q` is weighted homogeneous of degree `d` for the weight
//! vector `β` when `Q(s^β * z) = s^d Q(z)`, where
//! `s^β * z = (s^{β₁} z₁, …, s^{βₙ} zₙ)`. A variety is the common zero locus
//! of finitely many such polynomials sharing the same `β`; it is a cone when
//! every weight equals one.

use serde::{Deserialize, Serialize};

use crate::linalg::{self, CMatrix};
use crate::{Error, Result, C64};

/// Default relative threshold below which singular values of the defining
/// Jacobian count as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Weights(Vec<u32>);

impl Weights {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::InvalidWeights(format!(
                "ambient dimension must be at least 2, got {}",
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|&b| b == 0) {
            return Err(Error::InvalidWeights(format!("entry {pos} is zero")));
        }
        Ok(Self(entries))
    }

    pub fn ones(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_cone(&self) -> bool {
        self.0.iter().all(|&b| b == 1)
    }

    pub fn min(&self) -> u32 {
        self.0.iter().copied().min().unwrap_or(1)
    }

    pub fn max(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(1)
    }
}

impl TryFrom<Vec<u32>> for Weights {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Weights> for Vec<u32> {
    fn from(w: Weights) -> Self {
        w.0
    }
}

/// The weighted scaling action `s^β * z`.
pub fn act(s: C64, weights: &Weights, z: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); z.len()];
    act_into(s, weights.as_slice(), z, &mut out);
    out
}

pub(crate) fn act_into(s: C64, weights: &[u32], z: &[C64], out: &mut [C64]) {
    for ((o, &zk), &b) in out.iter_mut().zip(z).zip(weights) {
        *o = s.powu(b) * zk;
    }
}

/// Smallest `t ≥ 0` with `‖t^β * z‖ ≥ r`, i.e. `Σ_k t^{2β_k} |z_k|² ≥ r²`.
///
/// The left-hand side is monotone in `t`, so bisection is exact up to
/// floating-point resolution. Returns 0 for `z = 0`.
pub fn orbit_radius(weights: &[u32], z: &[C64], r: f64) -> f64 {
    let mags: Vec<f64> = z.iter().map(|c| c.norm_sqr()).collect();
    if mags.iter().all(|&m| m == 0.0) || r <= 0.0 {
        return 0.0;
    }
    let target = r * r;
    let f = |t: f64| -> f64 {
        mags.iter()
            .zip(weights)
            .map(|(&m, &b)| m * t.powi(2 * b as i32))
            .sum::<f64>()
    };
    if weights.iter().all(|&b| b == 1) {
        return r / mags.iter().sum::<f64>().sqrt();
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while f(hi) < target {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub exponents: Vec<u32>,
    pub coeff: C64,
}

/// A polynomial on ℂⁿ stored as a list of monomials with distinct exponents
/// and nonzero coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SparsePolynomial {
    n: usize,
    terms: Vec<Term>,
}

impl SparsePolynomial {
    /// Builds a polynomial, merging repeated exponents and dropping zero
    /// coefficients.
    pub fn new(n: usize, terms: impl IntoIterator<Item = (Vec<u32>, C64)>) -> Result<Self> {
        let mut merged: Vec<Term> = Vec::new();
        for (exponents, coeff) in terms {
            if exponents.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: exponents.len(),
                });
            }
            match merged.iter_mut().find(|t| t.exponents == exponents) {
                Some(t) => t.coeff += coeff,
                None => merged.push(Term { exponents, coeff }),
            }
        }
        merged.retain(|t| t.coeff != C64::new(0.0, 0.0));
        Ok(Self { n, terms: merged })
    }

    /// Convenience constructor from real coefficients.
    pub fn from_real(n: usize, terms: &[(&[u32], f64)]) -> Result<Self> {
        Self::new(
            n,
            terms
                .iter()
                .map(|(e, c)| (e.to_vec(), C64::new(*c, 0.0))),
        )
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.exponents.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    fn max_exponents(&self) -> Vec<u32> {
        let mut m = vec![0u32; self.n];
        for t in &self.terms {
            for (mk, &e) in m.iter_mut().zip(&t.exponents) {
                *mk = (*mk).max(e);
            }
        }
        m
    }

    fn power_table(&self, z: &[C64]) -> Vec<Vec<C64>> {
        self.max_exponents()
            .iter()
            .zip(z)
            .map(|(&e, &zk)| {
                let mut p = Vec::with_capacity(e as usize + 1);
                let mut acc = C64::new(1.0, 0.0);
                p.push(acc);
                for _ in 0..e {
                    acc *= zk;
                    p.push(acc);
                }
                p
            })
            .collect()
    }

    pub fn eval(&self, z: &[C64]) -> C64 {
        debug_assert_eq!(z.len(), self.n);
        let pw = self.power_table(z);
        self.terms
            .iter()
            .map(|t| {
                t.exponents
                    .iter()
                    .enumerate()
                    .fold(t.coeff, |acc, (k, &e)| acc * pw[k][e as usize])
            })
            .sum()
    }

    /// Holomorphic gradient `(∂Q/∂z_1, …, ∂Q/∂z_n)`.
    pub fn gradient(&self, z: &[C64]) -> Vec<C64> {
        let pw = self.power_table(z);
        let mut g = vec![C64::new(0.0, 0.0); self.n];
        for t in &self.terms {
            for (j, gj) in g.iter_mut().enumerate() {
                let ej = t.exponents[j];
                if ej == 0 {
                    continue;
                }
                let mut v = t.coeff * ej as f64;
                for (k, &e) in t.exponents.iter().enumerate() {
                    let e = if k == j { e - 1 } else { e };
                    v *= pw[k][e as usize];
                }
                *gj += v;
            }
        }
        g
    }

    /// `Q ∘ Θ` where `Θ(z) = (z_1^{β_1}, …, z_n^{β_n})`.
    pub fn compose_theta(&self, weights: &Weights) -> Self {
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    exponents: t
                        .exponents
                        .iter()
                        .zip(weights.as_slice())
                        .map(|(&e, &b)| e * b)
                        .collect(),
                    coeff: t.coeff,
                })
                .collect(),
        }
    }

    /// Sum of `|c_α| r^{|α|}`, an upper bound for `|Q|` on the ball of radius `r`.
    pub fn modulus_bound(&self, r: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff.norm() * r.powi(t.exponents.iter().sum::<u32>() as i32))
            .sum()
    }
}

/// Weighted degree of `poly`; every monomial must have the same value of
/// `Σ_k β_k α_k`.
pub fn weighted_degree(poly: &SparsePolynomial, weights: &Weights) -> Result<u32> {
    if poly.ambient_dim() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            got: poly.ambient_dim(),
        });
    }
    let mut degree = None;
    for t in poly.terms() {
        let d: u32 = t
            .exponents
            .iter()
            .zip(weights.as_slice())
            .map(|(&a, &b)| a * b)
            .sum();
        match degree {
            None => degree = Some(d),
            Some(expected) if expected != d => {
                return Err(Error::NonHomogeneous {
                    monomial: t.exponents.clone(),
                    expected,
                    found: d,
                })
            }
            _ => {}
        }
    }
    degree.ok_or(Error::ZeroPolynomial)
}

/// Zero locus of weighted homogeneous polynomials sharing one weight vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Variety {
    weights: Weights,
    polynomials: Vec<SparsePolynomial>,
    degrees: Vec<u32>,
    pure_dim: Option<usize>,
    rank_tol: f64,
}

impl Variety {
    pub fn new(
        weights: Weights,
        polynomials: Vec<SparsePolynomial>,
        pure_dim: Option<usize>,
    ) -> Result<Self> {
        let n = weights.len();
        if polynomials.is_empty() {
            return Err(Error::InvalidParameter {
                name: "polynomials",
                reason: "at least one defining polynomial is required".into(),
            });
        }
        let degrees = polynomials
            .iter()
            .map(|p| weighted_degree(p, &weights))
            .collect::<Result<Vec<_>>>()?;
        if degrees.iter().any(|&d| d == 0) {
            return Err(Error::InvalidParameter {
                name: "polynomials",
                reason: "constant polynomials do not define a weighted homogeneous variety".into(),
            });
        }
        if let Some(d) = pure_dim {
            if d == 0 || d >= n {
                return Err(Error::InvalidParameter {
                    name: "pure_dim",
                    reason: format!("must lie in 1..{n}, got {d}"),
                });
            }
        }
        Ok(Self {
            weights,
            polynomials,
            degrees,
            pure_dim,
            rank_tol: DEFAULT_RANK_TOL,
        })
    }

    pub fn with_rank_tol(mut self, rank_tol: f64) -> Self {
        self.rank_tol = rank_tol;
        self
    }

    pub fn ambient_dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn polynomials(&self) -> &[SparsePolynomial] {
        &self.polynomials
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn pure_dim(&self) -> Option<usize> {
        self.pure_dim
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    pub fn is_cone(&self) -> bool {
        self.weights.is_cone()
    }

    pub fn require_pure_dim(&self) -> Result<usize> {
        self.pure_dim.ok_or(Error::MissingPureDim)
    }

    pub(crate) fn check_dim(&self, z: &[C64]) -> Result<()> {
        if z.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                got: z.len(),
            });
        }
        Ok(())
    }

    pub fn residuals(&self, z: &[C64]) -> Vec<C64> {
        self.polynomials.iter().map(|q| q.eval(z)).collect()
    }

    /// `max_k |Q_k(z)| / scale_k(z)` with `scale_k(z) = max(1, ‖z‖^{d_k / min β})`.
    pub fn membership_residual(&self, z: &[C64]) -> f64 {
        let r = linalg::norm(z);
        let bmin = self.weights.min() as f64;
        self.polynomials
            .iter()
            .zip(&self.degrees)
            .map(|(q, &d)| {
                let scale = r.powf(d as f64 / bmin).max(1.0);
                q.eval(z).norm() / scale
            })
            .fold(0.0, f64::max)
    }

    pub fn contains(&self, z: &[C64], tol: f64) -> bool {
        z.len() == self.ambient_dim() && self.membership_residual(z) <= tol
    }

    /// Jacobian `[∂Q_k/∂z_j]` with one row per defining polynomial.
    pub fn jacobian(&self, z: &[C64]) -> CMatrix {
        let n = self.ambient_dim();
        let mut m = CMatrix::zeros(self.polynomials.len(), n);
        for (k, q) in self.polynomials.iter().enumerate() {
            for (j, g) in q.gradient(z).into_iter().enumerate() {
                m[(k, j)] = g;
            }
        }
        m
    }

    /// Whether `z` is a regular point: the Jacobian has numerical rank `n − d`.
    pub fn is_regular(&self, z: &[C64], tol: f64) -> Result<bool> {
        self.check_dim(z)?;
        let d = self.require_pure_dim()?;
        let residual = self.membership_residual(z);
        if residual > tol {
            return Err(Error::NotOnVariety { residual });
        }
        Ok(self.jacobian_is_full_rank(z, d))
    }

    pub(crate) fn jacobian_is_full_rank(&self, z: &[C64], d: usize) -> bool {
        linalg::numerical_rank(&self.jacobian(z), self.rank_tol) == self.ambient_dim() - d
    }

    /// Damped Gauss–Newton projection of `z0` onto the variety.
    ///
    /// A starting point already on the variety is returned unchanged (this
    /// includes the origin). A nonzero result that fails [`Variety::is_regular`]
    /// is reported as [`Error::ConvergedToSingular`].
    pub fn project_to_variety(&self, z0: &[C64], tol: f64, max_iter: usize) -> Result<Vec<C64>> {
        self.check_dim(z0)?;
        if self.contains(z0, tol) {
            return Ok(z0.to_vec());
        }
        let z = self.project_unchecked(z0, tol, max_iter)?;
        if let Some(d) = self.pure_dim {
            if !self.jacobian_is_full_rank(&z, d) {
                return Err(Error::ConvergedToSingular);
            }
        }
        Ok(z)
    }

    /// Gauss–Newton iteration without the regularity check on the result.
    pub(crate) fn project_unchecked(&self, z0: &[C64], tol: f64, max_iter: usize) -> Result<Vec<C64>> {
        let mut z = z0.to_vec();
        let objective = |z: &[C64]| -> f64 { self.residuals(z).iter().map(|r| r.norm_sqr()).sum() };
        let mut f = objective(&z);
        for _ in 0..max_iter {
            if self.contains(&z, tol) {
                return Ok(z);
            }
            let r = self.residuals(&z);
            let step = linalg::pinv_solve(&self.jacobian(&z), &r, self.rank_tol);
            let mut alpha = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let trial: Vec<C64> = z.iter().zip(&step).map(|(a, b)| a - b * alpha).collect();
                let ft = objective(&trial);
                if ft < f {
                    z = trial;
                    f = ft;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if self.contains(&z, tol) {
            Ok(z)
        } else {
            Err(Error::NoConvergence(format!(
                "Gauss–Newton projection stalled with residual {:.3e}",
                self.membership_residual(&z)
            )))
        }
    }

    /// The cone `{Q_k ∘ Θ = 0}` associated with a weighted homogeneous variety.
    pub fn theta_cone(&self) -> Result<Variety> {
        let n = self.ambient_dim();
        let polys = self
            .polynomials
            .iter()
            .map(|q| q.compose_theta(&self.weights))
            .collect();
        Variety::new(Weights::ones(n)?, polys, self.pure_dim).map(|v| v.with_rank_tol(self.rank_tol))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn quadric_cone() -> Variety {
        let q = SparsePolynomial::from_real(3, &[(&[1, 1, 0], 1.0), (&[0, 0, 2], -1.0)]).unwrap();
        Variety::new(Weights::ones(3).unwrap(), vec![q], Some(2)).unwrap()
    }

    #[test]
    fn weighted_degree_examples() {
        let cusp = SparsePolynomial::from_real(2, &[(&[2, 0], 1.0), (&[0, 3], -1.0)]).unwrap();
        assert_eq!(weighted_degree(&cusp, &Weights::new(vec![3, 2]).unwrap()), Ok(6));

        let quad = SparsePolynomial::from_real(3, &[(&[1, 1, 0], 1.0), (&[0, 0, 2], -1.0)]).unwrap();
        assert_eq!(weighted_degree(&quad, &Weights::ones(3).unwrap()), Ok(2));

        let bad = SparsePolynomial::from_real(2, &[(&[1, 0], 1.0), (&[0, 2], 1.0)]).unwrap();
        assert!(matches!(
            weighted_degree(&bad, &Weights::ones(2).unwrap()),
            Err(Error::NonHomogeneous { .. })
        ));

        let zero = SparsePolynomial::new(2, Vec::new()).unwrap();
        assert_eq!(weighted_degree(&zero, &Weights::ones(2).unwrap()), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn polynomial_merges_and_drops_zeros() {
        let p = SparsePolynomial::from_real(2, &[(&[1, 0], 1.0), (&[1, 0], -1.0), (&[0, 1], 2.0)]).unwrap();
        assert_eq!(p.terms().len(), 1);
        assert_eq!(p.terms()[0].exponents, vec![0, 1]);
    }

    #[test]
    fn weights_validation() {
        assert!(Weights::new(vec![1]).is_err());
        assert!(Weights::new(vec![1, 0]).is_err());
        assert!(Weights::new(vec![3, 2]).is_ok());
    }

    #[test]
    fn act_examples() {
        let w = Weights::new(vec![3, 2]).unwrap();
        let z = [c(1.0, 0.0), c(1.0, 0.0)];
        assert_eq!(act(c(2.0, 0.0), &w, &z), vec![c(8.0, 0.0), c(4.0, 0.0)]);
        assert_eq!(act(c(0.0, 0.0), &w, &z), vec![c(0.0, 0.0); 2]);
        let z = [c(0.3, -1.0), c(2.0, 0.5)];
        assert_eq!(act(c(1.0, 0.0), &w, &z), z.to_vec());
    }

    #[test]
    fn contains_examples() {
        let v = quadric_cone();
        assert!(v.contains(&[c(0.0, 0.0); 3], 1e-12));
        assert!(v.contains(&[c(1.0, 0.0); 3], 1e-12));
        assert!(!v.contains(&[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)], 1e-9));
    }

    #[test]
    fn regularity_examples() {
        let v = quadric_cone();
        assert_eq!(v.is_regular(&[c(1.0, 0.0); 3], 1e-10), Ok(true));
        assert_eq!(v.is_regular(&[c(0.0, 0.0); 3], 1e-10), Ok(false));
        assert!(matches!(
            v.is_regular(&[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)], 1e-10),
            Err(Error::NotOnVariety { .. })
        ));

        let line = Variety::new(
            Weights::ones(2).unwrap(),
            vec![SparsePolynomial::from_real(2, &[(&[0, 1], 1.0)]).unwrap()],
            Some(1),
        )
        .unwrap();
        assert_eq!(line.is_regular(&[c(1.0, 0.0), c(0.0, 0.0)], 1e-12), Ok(true));
    }

    #[test]
    fn regular_point_gradient_has_rank_one_by_direct_svd() {
        let v = quadric_cone();
        let z = [c(1.0, 0.0); 3];
        let g = v.polynomials()[0].gradient(&z);
        assert_eq!(g, vec![c(1.0, 0.0), c(1.0, 0.0), c(-2.0, 0.0)]);
        let sv = v.jacobian(&z).singular_values();
        assert!((sv[0] - 6.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn projection_examples() {
        let v = quadric_cone();
        let on = vec![c(1.0, 0.0); 3];
        assert_eq!(v.project_to_variety(&on, 1e-12, 50).unwrap(), on);
        assert_eq!(
            v.project_to_variety(&[c(0.0, 0.0); 3], 1e-12, 50).unwrap(),
            vec![c(0.0, 0.0); 3]
        );

        let eps = 1e-3;
        let z0 = vec![c(1.0, 0.0), c(1.0, 0.0), c(1.0 + eps, 0.0)];
        let z = v.project_to_variety(&z0, 1e-14, 50).unwrap();
        assert!(v.polynomials()[0].eval(&z).norm() <= 1e-12);
        let moved = linalg::distance(&z, &z0);
        // the residual of z0 is 2ε + ε², gradient norm √6: the minimal move is ≈ 2ε/√6
        assert!(moved < 2.0 * eps && moved > 0.5 * eps, "moved {moved}");
    }

    #[test]
    fn theta_cone_of_cusp() {
        let cusp = Variety::new(
            Weights::new(vec![3, 2]).unwrap(),
            vec![SparsePolynomial::from_real(2, &[(&[2, 0], 1.0), (&[0, 3], -1.0)]).unwrap()],
            Some(1),
        )
        .unwrap();
        let cone = cusp.theta_cone().unwrap();
        assert!(cone.is_cone());
        assert_eq!(cone.degrees(), &[6]);
        let expected = SparsePolynomial::from_real(2, &[(&[6, 0], 1.0), (&[0, 6], -1.0)]).unwrap();
        assert_eq!(cone.polynomials()[0], expected);
    }

    #[test]
    fn orbit_radius_matches_definition() {
        let w = [3u32, 2];
        let z = [c(0.5, 0.1), c(-0.2, 0.7)];
        let t = orbit_radius(&w, &z, 1.7);
        let val: f64 = z.iter().zip(&w).map(|(zk, &b)| zk.norm_sqr() * t.powi(2 * b as i32)).sum();
        assert!((val.sqrt() - 1.7).abs() < 1e-12);
        assert_eq!(orbit_radius(&w, &[c(0.0, 0.0); 2], 1.0), 0.0);
    }

    fn arb_c() -> impl Strategy<Value = C64> {
        (-1.5f64..1.5, -1.5f64..1.5).prop_map(|(a, b)| C64::new(a, b))
    }

    proptest! {
        #[test]
        fn action_is_a_group_action(s in arb_c(), t in arb_c(), z in proptest::collection::vec(arb_c(), 2)) {
            let w = Weights::new(vec![3, 2]).unwrap();
            let lhs = act(s, &w, &act(t, &w, &z));
            let rhs = act(s * t, &w, &z);
            let scale = 1.0 + linalg::norm(&rhs);
            prop_assert!(linalg::distance(&lhs, &rhs) <= 1e-13 * scale);
        }

        #[test]
        fn homogeneity_identity_on_projected_points(
            s in arb_c(),
            seed in proptest::collection::vec(arb_c(), 3),
        ) {
            let v = quadric_cone();
            let start: Vec<C64> = seed.iter().map(|c| c + C64::new(0.1, 0.0)).collect();
            if let Ok(z) = v.project_to_variety(&start, 1e-13, 100) {
                let q = &v.polynomials()[0];
                let lhs = q.eval(&act(s, v.weights(), &z));
                let rhs = s.powu(2) * q.eval(&z);
                let bound = 1e-10 * (1.0 + s.norm().powi(2)) * (1.0 + linalg::norm(&z).powi(2));
                prop_assert!((lhs - rhs).norm() <= bound);
                prop_assert!(v.contains(&act(s, v.weights(), &z), 1e-10));
            }
        }

        #[test]
        fn regularity_is_scale_invariant_on_cones(
            s in arb_c(),
            seed in proptest::collection::vec(arb_c(), 3),
        ) {
            prop_assume!(s.norm() > 1e-3);
            let v = quadric_cone();
            if let Ok(z) = v.project_to_variety(&seed, 1e-13, 100) {
                let sz = act(s, v.weights(), &z);
                prop_assert_eq!(v.is_regular(&z, 1e-9).unwrap(), v.is_regular(&sz, 1e-9).unwrap());
            }
        }
    }
}
