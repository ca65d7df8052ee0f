//! Dense complex linear algebra shared by every module.
//!
//! All rank decisions use singular values relative to the largest one, with a
//! single threshold [`RANK_TOL`].

use faer::{c64, Mat, MatRef};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Relative singular-value threshold for rank, kernel and intersection decisions.
pub const RANK_TOL: f64 = 1e-10;

/// Relative threshold below which [`orthonormal_basis`] rejects its input.
pub const BASIS_TOL: f64 = 1e-12;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest entry modulus, zero for empty matrices.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Standard complex Gaussian matrix: real and imaginary parts are independent
/// `N(0, 1/2)`. Entries are drawn in row-major order, real part first.
pub fn random_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        data.push(c(re * scale, im * scale));
    }
    CMatrix::from_row_slice(rows, cols, &data)
}

pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut s = to_faer(a).singular_values().expect("svd converges on finite input");
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

fn to_faer(a: &CMatrix) -> Mat<c64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn from_faer(m: MatRef<'_, c64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn rank_from_sv(sv: &[f64], rel_tol: f64) -> usize {
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Numerical rank at the shared relative tolerance.
pub fn rank(a: &CMatrix) -> usize {
    rank_with_tol(a, RANK_TOL)
}

pub fn rank_with_tol(a: &CMatrix, rel_tol: f64) -> usize {
    rank_from_sv(&singular_values(a), rel_tol)
}

/// Singular value decomposition with a complete set of left singular vectors
/// (`rows x rows`) and right singular vectors (`cols x cols`). Singular values
/// are sorted non-increasing and padded with zeros to `max(rows, cols)`.
pub struct FullSvd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

pub fn full_svd(a: &CMatrix) -> FullSvd {
    let (rows, cols) = a.shape();
    let n = rows.max(cols);
    if rows == 0 || cols == 0 {
        return FullSvd {
            u: CMatrix::identity(rows, rows),
            singular_values: vec![0.0; n],
            v: CMatrix::identity(cols, cols),
        };
    }
    let svd = to_faer(a).svd().expect("svd converges on finite input");
    let s = svd.S().column_vector();
    let mut order: Vec<usize> = (0..rows.min(cols)).collect();
    order.sort_by(|&x, &y| s[y].re.total_cmp(&s[x].re));
    let mut singular_values: Vec<f64> = order.iter().map(|&k| s[k].re).collect();
    singular_values.resize(n, 0.0);
    let permute = |m: CMatrix| {
        let mut out = m.clone();
        for (k, &src) in order.iter().enumerate() {
            out.set_column(k, &m.column(src));
        }
        out
    };
    FullSvd { u: permute(from_faer(svd.U())), singular_values, v: permute(from_faer(svd.V())) }
}

/// Orthonormal basis of the column space of a full-column-rank matrix.
pub fn orthonormal_basis(a: &CMatrix) -> Result<CMatrix> {
    let (rows, cols) = a.shape();
    if cols == 0 {
        return Ok(CMatrix::zeros(rows, 0));
    }
    if rows < cols {
        return Err(Error::RankDeficient { rank: rows, cols });
    }
    let svd = full_svd(a);
    let r = rank_from_sv(&svd.singular_values, BASIS_TOL);
    if r < cols {
        return Err(Error::RankDeficient { rank: r, cols });
    }
    Ok(svd.u.columns(0, cols).into_owned())
}

/// Orthonormal basis of the column space at the shared rank tolerance; the
/// result may have fewer columns than `a`.
pub fn range_basis(a: &CMatrix) -> CMatrix {
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return CMatrix::zeros(rows, 0);
    }
    let svd = full_svd(a);
    let r = rank_from_sv(&svd.singular_values, RANK_TOL).min(rows);
    svd.u.columns(0, r).into_owned()
}

/// Orthonormal basis of the null space, one column per zero singular value
/// (relative threshold [`RANK_TOL`]).
pub fn kernel_basis(a: &CMatrix) -> CMatrix {
    let (rows, cols) = a.shape();
    if cols == 0 {
        return CMatrix::zeros(0, 0);
    }
    if rows == 0 {
        return CMatrix::identity(cols, cols);
    }
    let svd = full_svd(a);
    let r = rank_from_sv(&svd.singular_values[..rows.min(cols)], RANK_TOL);
    svd.v.columns(r, cols - r).into_owned()
}

/// `count` orthonormal vectors spanning the directions least excited by the
/// columns of `a`: the trailing left singular vectors. When the column space
/// has dimension at most `rows - count` this is a subspace of its orthogonal
/// complement.
pub fn least_left_singular(a: &CMatrix, count: usize) -> CMatrix {
    let rows = a.nrows();
    assert!(count <= rows, "asked for {count} directions in C^{rows}");
    if a.ncols() == 0 {
        return CMatrix::identity(rows, count);
    }
    let svd = full_svd(a);
    svd.u.columns(rows - count, count).into_owned()
}

/// Complex eigendecomposition of a square matrix.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<Complex64>,
    /// Unit-norm eigenvectors, column `k` paired with `values[k]`.
    pub vectors: CMatrix,
}

pub fn eig(a: &CMatrix) -> Result<Eigen> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::ShapeMismatch(format!("eig needs a square matrix, got {}x{}", n, a.ncols())));
    }
    if n == 0 {
        return Ok(Eigen { values: vec![], vectors: CMatrix::zeros(0, 0) });
    }
    let evd = to_faer(a).eigen().map_err(|_| Error::ConvergenceFailure)?;
    let s = evd.S().column_vector();
    let values: Vec<Complex64> = (0..n).map(|k| s[k]).collect();
    let mut vectors = from_faer(evd.U());
    for mut col in vectors.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= c(norm, 0.0);
        }
    }
    Ok(Eigen { values, vectors })
}

/// Inverse of a square matrix, `None` when numerically singular (condition
/// number beyond `1 / RANK_TOL`).
pub fn inverse(a: &CMatrix) -> Option<CMatrix> {
    if a.nrows() != a.ncols() {
        return None;
    }
    let sv = singular_values(a);
    if rank_from_sv(&sv, RANK_TOL) < a.nrows() {
        return None;
    }
    a.clone().try_inverse()
}

/// Largest principal angle (radians) between the column spaces of two
/// matrices with the same shape.
pub fn principal_angle(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!(
            "subspace distance between {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let qa = orthonormal_basis(a)?;
    let qb = orthonormal_basis(b)?;
    if qa.ncols() == 0 {
        return Ok(0.0);
    }
    let sin_a = singular_values(&(&qa - &qb * (qb.adjoint() * &qa))).first().copied().unwrap_or(0.0);
    let sin_b = singular_values(&(&qb - &qa * (qa.adjoint() * &qb))).first().copied().unwrap_or(0.0);
    let sin = 0.5 * (sin_a + sin_b);
    let cos = singular_values(&(qa.adjoint() * &qb)).last().copied().unwrap_or(1.0);
    Ok(sin.min(1.0).atan2(cos.min(1.0)))
}
