//! Small dense complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::DMatrix;

use crate::C64;

pub type CMatrix = DMatrix<C64>;

pub fn norm(z: &[C64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Hermitian inner product `Σ a_k conj(b_k)`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// Singular value decomposition of a (possibly wide) matrix, with the right
/// singular vectors completed to a full basis of ℂ^cols.
///
/// Returns singular values sorted in decreasing order (padded with zeros up to
/// `cols`) together with the matching rows of `Vᴴ` and columns of `U`.
pub struct FullSvd {
    pub singular_values: Vec<f64>,
    /// Columns are left singular vectors; only the first `rows.min(cols)` are meaningful.
    pub u: CMatrix,
    /// Rows are conjugated right singular vectors.
    pub v_t: CMatrix,
}

pub fn full_svd(m: &CMatrix) -> FullSvd {
    let (rows, cols) = m.shape();
    let size = rows.max(cols);
    let mut padded = CMatrix::zeros(size, cols.max(1));
    padded.view_mut((0, 0), (rows, cols)).copy_from(m);
    let svd = padded.svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let sv = svd.singular_values;

    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].partial_cmp(&sv[a]).unwrap_or(std::cmp::Ordering::Equal));

    let mut singular_values = Vec::with_capacity(cols);
    let mut u_sorted = CMatrix::zeros(size, order.len());
    let mut v_sorted = CMatrix::zeros(order.len(), cols);
    for (dst, &src) in order.iter().enumerate() {
        singular_values.push(sv[src]);
        u_sorted.set_column(dst, &u.column(src));
        v_sorted.set_row(dst, &v_t.row(src));
    }
    FullSvd {
        singular_values,
        u: u_sorted.rows(0, rows).into_owned(),
        v_t: v_sorted,
    }
}

/// Number of singular values above `rel_tol · σ_max`. A zero matrix has rank 0.
pub fn numerical_rank(m: &CMatrix, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Minimum-norm least-squares solution of `m x = b` using the Moore–Penrose
/// pseudo-inverse with singular values below `rel_tol · σ_max` discarded.
pub fn pinv_solve(m: &CMatrix, b: &[C64], rel_tol: f64) -> Vec<C64> {
    let (rows, cols) = m.shape();
    debug_assert_eq!(rows, b.len());
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    let mut x = vec![C64::new(0.0, 0.0); cols];
    if smax == 0.0 {
        return x;
    }
    for (i, &s) in sv.iter().enumerate() {
        if s <= rel_tol * smax {
            continue;
        }
        // coefficient = (u_iᴴ b) / s
        let mut c = C64::new(0.0, 0.0);
        for r in 0..rows {
            c += u[(r, i)].conj() * b[r];
        }
        c /= s;
        for (k, xk) in x.iter_mut().enumerate() {
            *xk += c * v_t[(i, k)].conj();
        }
    }
    x
}

/// Orthonormal basis of the kernel of `m` (as a list of vectors in ℂ^cols),
/// treating singular values below `rel_tol · σ_max` as zero.
pub fn null_space(m: &CMatrix, rel_tol: f64) -> Vec<Vec<C64>> {
    let cols = m.ncols();
    let svd = full_svd(m);
    let smax = svd.singular_values.first().copied().unwrap_or(0.0);
    (0..cols)
        .filter(|&i| {
            let s = svd.singular_values.get(i).copied().unwrap_or(0.0);
            smax == 0.0 || s <= rel_tol * smax
        })
        .map(|i| (0..cols).map(|k| svd.v_t[(i, k)].conj()).collect())
        .collect()
}
