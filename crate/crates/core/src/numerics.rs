//! Dense complex-matrix utilities with an explicit rank/tolerance policy.
//!
//! Every rank decision in the crate goes through the same SVD-relative
//! cutoff: singular values below `tol_rel * sigma_max` are treated as zero.
//! Hermitian inputs are symmetrized before eigendecomposition to suppress
//! round-off asymmetry.

use crate::error::Error;
use crate::Result;
use faer::Side;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

fn to_faer(a: &CMatrix) -> faer::Mat<C64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn from_faer(a: faer::MatRef<'_, C64>) -> CMatrix {
    CMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Full SVD (U, sigma descending, V) computed by faer; nalgebra's complex
/// SVD can silently lose accuracy, so every decomposition here routes
/// through faer.
fn svd_full(a: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let svd = to_faer(a).svd().expect("svd convergence");
    let u = from_faer(svd.U());
    let v = from_faer(svd.V());
    let s: Vec<f64> = svd.S().column_vector().iter().map(|x| x.re).collect();
    (u, s, v)
}

/// Default relative rank cutoff: singular values below `DEFAULT_TOL * sigma_max`
/// are treated as zero.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Solves with condition estimate above this raise [`Error::IllConditioned`].
pub const COND_LIMIT: f64 = 1e12;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Largest singular value; 0 for empty matrices.
pub fn op_norm(a: &CMatrix) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    let sv = to_faer(a).singular_values().expect("svd convergence");
    sv.first().copied().unwrap_or(0.0)
}

/// Hermitian part (A + A^H) / 2.
pub fn herm_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * cr(0.5)
}

/// Imaginary part in the operator sense: (A - A^H) / (2i); Hermitian.
pub fn imag_part(a: &CMatrix) -> CMatrix {
    (a - a.adjoint()) * (C64::new(0.0, -0.5))
}

/// Deviation from Hermitian symmetry in operator norm.
pub fn herm_residual(a: &CMatrix) -> f64 {
    op_norm(&(a - a.adjoint()))
}

/// A subspace of C^n carried by an orthonormal column basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: CMatrix,
}

impl Subspace {
    /// Wraps a matrix whose columns are already orthonormal.
    pub fn from_orthonormal(basis: CMatrix) -> Self {
        debug_assert!(
            basis.ncols() == 0
                || op_norm(&(basis.adjoint() * &basis - identity(basis.ncols()))) < 1e-8,
            "basis columns must be orthonormal"
        );
        Subspace {
            ambient_dim: basis.nrows(),
            basis,
        }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: CMatrix::zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: identity(ambient_dim),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> CMatrix {
        if self.dim() == 0 {
            return CMatrix::zeros(self.ambient_dim, self.ambient_dim);
        }
        &self.basis * self.basis.adjoint()
    }

    /// Orthogonal complement within the ambient space.
    pub fn complement(&self) -> Subspace {
        let residual = identity(self.ambient_dim) - self.projector();
        orthonormal_column_basis(&residual, DEFAULT_TOL)
    }

    /// `true` if v lies in the subspace up to `tol * ||v||`.
    pub fn contains(&self, v: &CVector, tol: f64) -> bool {
        let nv = v.norm();
        if nv == 0.0 {
            return true;
        }
        let proj = self.projector() * v;
        (v - proj).norm() <= tol * nv
    }

    /// Sine of the largest principal angle when dimensions agree, 1 otherwise.
    ///
    /// Computed as max of ||(I - P_U) V|| over both orders, which resolves
    /// angles down to machine precision (arccos of singular values saturates
    /// near 1e-8).
    pub fn distance(&self, other: &Subspace) -> f64 {
        if self.ambient_dim != other.ambient_dim || self.dim() != other.dim() {
            return 1.0;
        }
        if self.dim() == 0 {
            return 0.0;
        }
        let a = op_norm(&(other.basis() - self.projector() * other.basis()));
        let b = op_norm(&(self.basis() - other.projector() * self.basis()));
        a.max(b)
    }
}

/// Absolute floor below which singular values count as rounding noise even
/// relative to sigma_max; keeps numerically-zero matrices at rank zero.
pub const RANK_FLOOR: f64 = 1e-13;

/// Orthonormal basis of the numerical column space of `a`.
///
/// Singular values above `tol_rel * sigma_max` (and above the absolute noise
/// floor) are retained; a numerically zero matrix yields the
/// zero-dimensional subspace.
pub fn orthonormal_column_basis(a: &CMatrix, tol_rel: f64) -> Subspace {
    let n = a.nrows();
    if a.ncols() == 0 || n == 0 {
        return Subspace::zero(n);
    }
    let (u, sv, _) = svd_full(a);
    let smax = sv.first().copied().unwrap_or(0.0);
    let rank = if smax == 0.0 {
        0
    } else {
        sv.iter()
            .filter(|&&s| s > tol_rel * smax && s > RANK_FLOOR)
            .count()
    };
    Subspace {
        ambient_dim: n,
        basis: u.columns(0, rank).into_owned(),
    }
}

/// Orthonormal basis of the numerical null space of `a`.
pub fn nullspace(a: &CMatrix, tol_rel: f64) -> CMatrix {
    let ncols = a.ncols();
    if ncols == 0 {
        return CMatrix::zeros(0, 0);
    }
    if a.nrows() == 0 {
        return identity(ncols);
    }
    let (_, sv, v) = svd_full(a);
    let smax = sv.first().copied().unwrap_or(0.0);
    let rank = if smax == 0.0 {
        0
    } else {
        sv.iter()
            .filter(|&&s| s > tol_rel * smax && s > RANK_FLOOR)
            .count()
    };
    // The full V has ncols columns; those beyond the rank span the kernel.
    v.columns(rank, ncols - rank).into_owned()
}

/// Moore-Penrose pseudo-inverse with SVD-relative rank cutoff.
pub fn pinv(a: &CMatrix, tol_rel: f64) -> CMatrix {
    if a.nrows() == 0 || a.ncols() == 0 {
        return CMatrix::zeros(a.ncols(), a.nrows());
    }
    let (u, sv, v) = svd_full(a);
    let smax = sv.first().copied().unwrap_or(0.0);
    let mut sigma_pinv = CMatrix::zeros(a.ncols(), a.nrows());
    for (i, &s) in sv.iter().enumerate() {
        if smax > 0.0 && s > tol_rel * smax && s > RANK_FLOOR {
            sigma_pinv[(i, i)] = cr(1.0 / s);
        }
    }
    v * sigma_pinv * u.adjoint()
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
///
/// The input is symmetrized first; no Hermiticity check is performed.
pub fn eigh(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.nrows();
    if n == 0 {
        return (vec![], CMatrix::zeros(0, 0));
    }
    let sym = herm_part(h);
    let eig = to_faer(&sym)
        .self_adjoint_eigen(Side::Lower)
        .expect("eigendecomposition convergence");
    // faer returns eigenvalues already in nondecreasing order.
    let values: Vec<f64> = eig.S().column_vector().iter().map(|x| x.re).collect();
    let vectors = from_faer(eig.U());
    (values, vectors)
}

/// Smallest eigenvalue of the Hermitian part; +inf for empty matrices.
pub fn min_eig_hermitian(h: &CMatrix) -> f64 {
    let (values, _) = eigh(h);
    values.first().copied().unwrap_or(f64::INFINITY)
}

/// Largest eigenvalue of the Hermitian part; -inf for empty matrices.
pub fn max_eig_hermitian(h: &CMatrix) -> f64 {
    let (values, _) = eigh(h);
    values.last().copied().unwrap_or(f64::NEG_INFINITY)
}

/// Hermitian PSD square root; eigenvalues in [-tol_abs, 0) are clamped to 0.
pub fn sqrt_psd(h: &CMatrix, tol_rel: f64) -> Result<CMatrix> {
    let scale = op_norm(h).max(1.0);
    let asym = herm_residual(h);
    if asym > tol_rel.max(1e-9) * scale {
        return Err(Error::NotHermitian(asym));
    }
    let (values, vectors) = eigh(h);
    if let Some(&min) = values.first() {
        if min < -tol_rel.max(1e-9) * scale {
            return Err(Error::NotPsd(min));
        }
    }
    let n = h.nrows();
    let mut d = CMatrix::zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        d[(i, i)] = cr(v.max(0.0).sqrt());
    }
    Ok(&vectors * d * vectors.adjoint())
}

/// Equality of subspaces: same dimension and largest principal angle
/// (measured through its sine) below `tol`.
pub fn subspace_equal(u: &Subspace, v: &Subspace, tol: f64) -> Result<bool> {
    if u.ambient_dim() != v.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "ambient {} vs {}",
            u.ambient_dim(),
            v.ambient_dim()
        )));
    }
    if u.dim() != v.dim() {
        return Ok(false);
    }
    Ok(u.distance(v) < tol)
}

/// Solves A X = B through the SVD with a condition guard.
///
/// Unlike [`pinv`], no singular values are truncated: a rank-deficient or
/// badly conditioned A is an error, never a silent least-squares answer.
pub fn solve_guarded(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.nrows() != a.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "solve expects a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.nrows() != b.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "solve: lhs has {} rows, rhs has {}",
            a.nrows(),
            b.nrows()
        )));
    }
    if a.nrows() == 0 {
        return Ok(CMatrix::zeros(0, b.ncols()));
    }
    let (u, sv, v) = svd_full(a);
    let smax = sv.first().copied().unwrap_or(0.0);
    let smin = sv.last().copied().unwrap_or(0.0);
    if smin <= 0.0 || smax / smin > COND_LIMIT {
        return Err(Error::IllConditioned(if smin > 0.0 {
            smax / smin
        } else {
            f64::INFINITY
        }));
    }
    let mut sigma_inv = CMatrix::zeros(a.ncols(), a.nrows());
    for (i, &s) in sv.iter().enumerate() {
        sigma_inv[(i, i)] = cr(1.0 / s);
    }
    Ok(v * sigma_inv * (u.adjoint() * b))
}

/// Inverse through [`solve_guarded`].
pub fn inv_guarded(a: &CMatrix) -> Result<CMatrix> {
    solve_guarded(a, &identity(a.nrows()))
}

/// Stacks [A; B] vertically.
pub fn vstack(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.ncols(), "vstack: column mismatch");
    let mut out = CMatrix::zeros(a.nrows() + b.nrows(), a.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((a.nrows(), 0), (b.nrows(), b.ncols()))
        .copy_from(b);
    out
}

/// Stacks [A, B] horizontally.
pub fn hstack(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.nrows(), b.nrows(), "hstack: row mismatch");
    let mut out = CMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((0, a.ncols()), (b.nrows(), b.ncols()))
        .copy_from(b);
    out
}

/// Assembles the 2x2 block matrix [[A, B], [C, D]].
pub fn block2x2(a: &CMatrix, b: &CMatrix, c: &CMatrix, d: &CMatrix) -> CMatrix {
    vstack(&hstack(a, b), &hstack(c, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
        CMatrix::from_row_slice(
            rows,
            cols,
            &data.iter().map(|&x| cr(x)).collect::<Vec<_>>(),
        )
    }

    #[test]
    fn basis_of_identity_is_full() {
        let s = orthonormal_column_basis(&identity(3), 1e-10);
        assert_eq!(s.dim(), 3);
        assert_eq!(s.ambient_dim(), 3);
    }

    #[test]
    fn basis_of_zero_is_trivial() {
        let s = orthonormal_column_basis(&CMatrix::zeros(3, 3), 1e-10);
        assert_eq!(s.dim(), 0);
    }

    #[test]
    fn basis_of_rank_one_matrix() {
        // Hand SVD of [[1,1],[1,1]]: sigma = (2, 0), left vector (1,1)/sqrt(2).
        let a = mat(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let s = orthonormal_column_basis(&a, 1e-10);
        assert_eq!(s.dim(), 1);
        let expected = mat(2, 1, &[1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()]);
        let expected = Subspace::from_orthonormal(expected);
        assert!(s.distance(&expected) < 1e-12);
    }

    #[test]
    fn pinv_identity_and_diagonal() {
        assert!(op_norm(&(pinv(&identity(3), 1e-10) - identity(3))) < 1e-14);
        let d = mat(2, 2, &[2.0, 0.0, 0.0, 0.0]);
        let expected = mat(2, 2, &[0.5, 0.0, 0.0, 0.0]);
        assert!(op_norm(&(pinv(&d, 1e-10) - expected)) < 1e-14);
    }

    #[test]
    fn pinv_satisfies_penrose_identities() {
        let mut rng = crate::seeded::rng(11);
        let a = crate::seeded::random_complex_matrix(&mut rng, 4, 3);
        let p = pinv(&a, 1e-10);
        let na = op_norm(&a).max(1.0);
        assert!(op_norm(&(&a * &p * &a - &a)) < 1e-10 * na);
        assert!(op_norm(&(&p * &a * &p - &p)) < 1e-10 * na);
        assert!(herm_residual(&(&a * &p)) < 1e-10 * na);
        assert!(herm_residual(&(&p * &a)) < 1e-10 * na);
    }

    #[test]
    fn pinv_is_an_involution() {
        let mut rng = crate::seeded::rng(5);
        for _ in 0..20 {
            let a = crate::seeded::random_complex_matrix(&mut rng, 3, 5);
            let back = pinv(&pinv(&a, 1e-10), 1e-10);
            assert!(op_norm(&(back - &a)) < 1e-9 * op_norm(&a).max(1.0));
        }
    }

    #[test]
    fn sqrt_psd_identity_and_diagonal() {
        let s = sqrt_psd(&identity(2), 1e-10).unwrap();
        assert!(op_norm(&(s - identity(2))) < 1e-13);
        let h = mat(2, 2, &[4.0, 0.0, 0.0, 9.0]);
        let expected = mat(2, 2, &[2.0, 0.0, 0.0, 3.0]);
        assert!(op_norm(&(sqrt_psd(&h, 1e-10).unwrap() - expected)) < 1e-13);
    }

    #[test]
    fn sqrt_psd_squares_back() {
        let mut rng = crate::seeded::rng(2);
        for _ in 0..20 {
            let g = crate::seeded::random_complex_matrix(&mut rng, 4, 4);
            let h = g.adjoint() * &g;
            let s = sqrt_psd(&h, 1e-10).unwrap();
            assert!(op_norm(&(&s * &s - &h)) < 1e-11 * op_norm(&h).max(1.0));
        }
    }

    #[test]
    fn sqrt_psd_rejects_indefinite() {
        let h = mat(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
        assert!(matches!(sqrt_psd(&h, 1e-10), Err(Error::NotPsd(_))));
    }

    #[test]
    fn subspace_equal_is_sign_and_scale_invariant() {
        let e1 = orthonormal_column_basis(&mat(2, 1, &[1.0, 0.0]), 1e-10);
        let neg_e1 = orthonormal_column_basis(&mat(2, 1, &[-1.0, 0.0]), 1e-10);
        let e2 = orthonormal_column_basis(&mat(2, 1, &[0.0, 1.0]), 1e-10);
        let diag = orthonormal_column_basis(&mat(2, 1, &[1.0, 1.0]), 1e-10);
        let diag2 = orthonormal_column_basis(&mat(2, 1, &[2.0, 2.0]), 1e-10);
        assert!(subspace_equal(&e1, &neg_e1, 1e-10).unwrap());
        assert!(!subspace_equal(&e1, &e2, 1e-10).unwrap());
        assert!(subspace_equal(&diag, &diag2, 1e-10).unwrap());
    }

    #[test]
    fn subspace_equal_rejects_ambient_mismatch() {
        let u = Subspace::full(2);
        let v = Subspace::full(3);
        assert!(matches!(
            subspace_equal(&u, &v, 1e-10),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn min_eig_hermitian_values() {
        assert!((min_eig_hermitian(&identity(2)) - 1.0).abs() < 1e-14);
        let d = mat(2, 2, &[-2.0, 0.0, 0.0, 5.0]);
        assert!((min_eig_hermitian(&d) + 2.0).abs() < 1e-14);
        let mut rng = crate::seeded::rng(3);
        let g = crate::seeded::random_complex_matrix(&mut rng, 5, 5);
        assert!(min_eig_hermitian(&(g.adjoint() * &g)) >= -1e-12);
    }

    #[test]
    fn nullspace_of_wide_and_tall() {
        let a = mat(1, 3, &[1.0, 0.0, 0.0]);
        let n = nullspace(&a, 1e-10);
        assert_eq!(n.ncols(), 2);
        assert!(op_norm(&(&a * &n)) < 1e-12);
        let b = mat(3, 1, &[1.0, 2.0, 3.0]);
        assert_eq!(nullspace(&b, 1e-10).ncols(), 0);
    }

    #[test]
    fn solve_guarded_flags_singular() {
        let a = mat(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            solve_guarded(&a, &identity(2)),
            Err(Error::IllConditioned(_))
        ));
    }

    #[test]
    fn complement_splits_the_space() {
        let u = orthonormal_column_basis(&mat(3, 1, &[1.0, 1.0, 0.0]), 1e-10);
        let w = u.complement();
        assert_eq!(w.dim(), 2);
        assert!(op_norm(&(u.projector() + w.projector() - identity(3))) < 1e-12);
    }
}
