//! Contraction toolkit: defect operators, the C_H(alpha) classes, the block
//! parametrization of 2x2 contractions, and the coupled selfadjoint system
//! (F', F'', Sigma_pm, W) with its boundary limits.

use crate::error::Error;
use crate::numerics::{
    block2x2, cr, herm_residual, identity, op_norm, orthonormal_column_basis, pinv, solve_guarded,
    sqrt_psd, CMatrix, C64, DEFAULT_TOL,
};
use crate::Result;

/// Defect operator D_T = (I - T^H T)^{1/2}; errors if T is not a contraction.
pub fn defect(t: &CMatrix) -> Result<CMatrix> {
    let norm = op_norm(t);
    if norm > 1.0 + 1e-10 {
        return Err(Error::NotContraction(norm));
    }
    let h = identity(t.ncols()) - t.adjoint() * t;
    sqrt_psd(&h, DEFAULT_TOL)
}

/// Orthogonal projector onto the defect space, the range of D_T.
pub fn defect_projector(t: &CMatrix) -> Result<CMatrix> {
    let d = defect(t)?;
    let basis = orthonormal_column_basis(&d, 1e-8);
    Ok(basis.projector())
}

/// Membership in C_H(alpha): ||T sin(alpha) +- i cos(alpha) I|| <= 1.
/// At alpha = 0 the class degenerates to Hermitian contractions.
pub fn class_angle_check(t: &CMatrix, alpha: f64) -> bool {
    assert!(
        (0.0..std::f64::consts::FRAC_PI_2).contains(&alpha),
        "alpha must lie in [0, pi/2)"
    );
    let tol = 1e-10;
    if alpha == 0.0 {
        return herm_residual(t) < tol && op_norm(t) <= 1.0 + tol;
    }
    let rot = identity(t.nrows()) * C64::new(0.0, alpha.cos());
    let scaled = t * cr(alpha.sin());
    op_norm(&(&scaled + &rot)) <= 1.0 + tol && op_norm(&(&scaled - &rot)) <= 1.0 + tol
}

/// Smallest alpha with T in C_H(alpha), by bisection to resolution 1e-8;
/// +infinity if no alpha below pi/2 admits T.
pub fn min_class_angle(t: &CMatrix) -> Result<f64> {
    let norm = op_norm(t);
    if norm > 1.0 + 1e-10 {
        return Err(Error::NotContraction(norm));
    }
    let top = std::f64::consts::FRAC_PI_2 - 1e-9;
    if !class_angle_check(t, top) {
        return Ok(f64::INFINITY);
    }
    if class_angle_check(t, 0.0) {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0f64, top);
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if class_angle_check(t, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// A 2x2 block contraction T = [[D, C],[B, F]] together with the parameters
/// (D, N, G, L) that generate it: B = N D_D, C = D_{D*} G,
/// F = -N D^H G + D_{N*} L D_G.
#[derive(Clone, Debug)]
pub struct BlockContraction {
    pub d: CMatrix,
    pub n_param: CMatrix,
    pub g: CMatrix,
    pub l_param: CMatrix,
    pub t: CMatrix,
}

fn check_contraction(a: &CMatrix, what: &str) -> Result<()> {
    let norm = op_norm(a);
    if norm > 1.0 + 1e-10 {
        return Err(Error::NotContraction(norm));
    }
    let _ = what;
    Ok(())
}

/// Assembles T = [[D, C],[B, F]] from the four contraction parameters.
/// N is restricted to the defect space of D and L to 𝔇_G -> 𝔇_{N*} by
/// projection, matching the uniqueness convention of the parametrization.
pub fn build_block_contraction(
    d: &CMatrix,
    n_param: &CMatrix,
    g: &CMatrix,
    l_param: &CMatrix,
) -> Result<BlockContraction> {
    if n_param.ncols() != d.ncols() {
        return Err(Error::ShapeMismatch("N must act on the column space of D".into()));
    }
    if g.nrows() != d.nrows() {
        return Err(Error::ShapeMismatch("G must map into the row space of D".into()));
    }
    if l_param.nrows() != n_param.nrows() || l_param.ncols() != g.ncols() {
        return Err(Error::ShapeMismatch("L must map 𝔇_G into 𝔇_{N*}".into()));
    }
    check_contraction(d, "D")?;
    check_contraction(n_param, "N")?;
    check_contraction(g, "G")?;
    check_contraction(l_param, "L")?;

    let dd = defect(d)?;
    let dds = defect(&d.adjoint())?;
    let n = n_param * defect_projector(d)?;
    let dnstar = defect(&n.adjoint())?;
    let dg = defect(g)?;
    let p_nstar = orthonormal_column_basis(&dnstar, 1e-8).projector();
    let p_g = orthonormal_column_basis(&dg, 1e-8).projector();
    let l = p_nstar * l_param * p_g;

    let b = &n * &dd;
    let c = &dds * g;
    let f = -(&n * d.adjoint() * g) + &dnstar * &l * &dg;
    let t = block2x2(d, &c, &b, &f);
    let norm = op_norm(&t);
    if norm > 1.0 + 1e-10 {
        return Err(Error::NotContraction(norm));
    }
    Ok(BlockContraction {
        d: d.clone_owned(),
        n_param: n,
        g: g.clone_owned(),
        l_param: l,
        t,
    })
}

/// Recovers the parameters (D, N, G, L) of a block contraction from T and the
/// row/column split; components killed by the defect pseudo-inverses are set
/// to zero, matching the uniqueness convention.
pub fn decompose_block_contraction(
    t: &CMatrix,
    row_split: usize,
    col_split: usize,
) -> Result<BlockContraction> {
    check_contraction(t, "T")?;
    let (rows, cols) = (t.nrows(), t.ncols());
    if row_split > rows || col_split > cols {
        return Err(Error::ShapeMismatch("split exceeds matrix size".into()));
    }
    let d = t.view((0, 0), (row_split, col_split)).into_owned();
    let c = t
        .view((0, col_split), (row_split, cols - col_split))
        .into_owned();
    let b = t
        .view((row_split, 0), (rows - row_split, col_split))
        .into_owned();
    let f = t
        .view((row_split, col_split), (rows - row_split, cols - col_split))
        .into_owned();

    let dd = defect(&d)?;
    let dds = defect(&d.adjoint())?;
    let n = &b * pinv(&dd, 1e-8);
    let g = pinv(&dds, 1e-8) * &c;
    let dnstar = defect(&n.adjoint())?;
    let dg = defect(&g)?;
    let l = pinv(&dnstar, 1e-8) * (&f + &n * d.adjoint() * &g) * pinv(&dg, 1e-8);
    build_block_contraction(&d, &n, &g, &l)
}

/// Selfadjoint block contraction T = [[D, D_D N*],[N D_D, F]] built from a
/// Hermitian contraction D, a contraction N on 𝔇_D, and a Hermitian
/// contraction X on 𝔇_{N*}, together with the coupled pair
/// F' = F + N(I+D)N*, F'' = F - N(I-D)N* satisfying F' - F'' = 2NN*.
#[derive(Clone, Debug)]
pub struct SelfadjointBlockSystem {
    pub d: CMatrix,
    pub n: CMatrix,
    pub x: CMatrix,
    pub t: CMatrix,
    pub f: CMatrix,
    pub f_prime: CMatrix,
    pub f_double: CMatrix,
}

pub fn selfadjoint_block(
    d: &CMatrix,
    n_param: &CMatrix,
    x: &CMatrix,
) -> Result<SelfadjointBlockSystem> {
    let asym = herm_residual(d);
    if asym > 1e-9 {
        return Err(Error::NotHermitian(asym));
    }
    let asym = herm_residual(x);
    if asym > 1e-9 {
        return Err(Error::NotHermitian(asym));
    }
    if n_param.ncols() != d.ncols() {
        return Err(Error::ShapeMismatch("N must act on the defect space of D".into()));
    }
    if x.nrows() != n_param.nrows() {
        return Err(Error::ShapeMismatch("X must act on the defect space of N*".into()));
    }
    check_contraction(d, "D")?;
    check_contraction(n_param, "N")?;
    check_contraction(x, "X")?;

    // D Hermitian: 𝔇_D = 𝔇_{D*} and D_D commutes with functions of D.
    let dd = defect(d)?;
    let n = n_param * defect_projector(d)?;
    let dnstar = defect(&n.adjoint())?;
    let p_nstar = orthonormal_column_basis(&dnstar, 1e-8).projector();
    let x_eff = &p_nstar * x * &p_nstar;

    let f = -(&n * d * n.adjoint()) + &dnstar * &x_eff * &dnstar;
    let m = d.nrows();
    let f_prime = &f + &n * (identity(m) + d) * n.adjoint();
    let f_double = &f - &n * (identity(m) - d) * n.adjoint();
    let t = block2x2(d, &(&dd * n.adjoint()), &(&n * &dd), &f);

    let norm = op_norm(&t);
    if norm > 1.0 + 1e-10 {
        return Err(Error::NotContraction(norm));
    }
    let coupling = op_norm(&(&f_prime - &f_double - n.clone() * n.adjoint() * cr(2.0)));
    if coupling > 1e-10 {
        return Err(Error::CouplingMismatch(coupling));
    }
    for h in [&f_prime, &f_double] {
        let norm = op_norm(h);
        if norm > 1.0 + 1e-9 {
            return Err(Error::NotContraction(norm));
        }
    }
    Ok(SelfadjointBlockSystem {
        d: d.clone_owned(),
        n,
        x: x_eff,
        t,
        f,
        f_prime,
        f_double,
    })
}

fn on_cut(z: C64) -> bool {
    z.im.abs() < 1e-12 && z.re.abs() >= 1.0 - 1e-12
}

impl SelfadjointBlockSystem {
    pub fn dim_m(&self) -> usize {
        self.d.nrows()
    }

    pub fn dim_k(&self) -> usize {
        self.n.nrows()
    }

    /// Sigma_pm(z) = z (I +- D)^{1/2} N* (I - zF)^{-1} N (I +- D)^{1/2},
    /// verified against the resolvent identities
    /// (I - Sigma_+)^{-1} = I + z(I+D)^{1/2} N*(I - zF')^{-1} N (I+D)^{1/2}
    /// and the F'' twin with the signs flipped.
    pub fn sigma_pm(&self, z: C64) -> Result<(CMatrix, CMatrix)> {
        if on_cut(z) {
            return Err(Error::BadPoint(z));
        }
        let m = self.dim_m();
        let k = self.dim_k();
        let s_plus = sqrt_psd(&(identity(m) + &self.d), DEFAULT_TOL)?;
        let s_minus = sqrt_psd(&(identity(m) - &self.d), DEFAULT_TOL)?;
        let res_f = solve_guarded(&(identity(k) - &self.f * z), &identity(k))?;
        let sigma_plus = &s_plus * self.n.adjoint() * &res_f * &self.n * &s_plus * z;
        let sigma_minus = &s_minus * self.n.adjoint() * &res_f * &self.n * &s_minus * z;

        let res_fp = solve_guarded(&(identity(k) - &self.f_prime * z), &identity(k))?;
        let res_fpp = solve_guarded(&(identity(k) - &self.f_double * z), &identity(k))?;
        let lhs_plus = solve_guarded(&(identity(m) - &sigma_plus), &identity(m))?;
        let rhs_plus =
            identity(m) + &s_plus * self.n.adjoint() * &res_fp * &self.n * &s_plus * z;
        let lhs_minus = solve_guarded(&(identity(m) + &sigma_minus), &identity(m))?;
        let rhs_minus =
            identity(m) - &s_minus * self.n.adjoint() * &res_fpp * &self.n * &s_minus * z;
        let residual = op_norm(&(&lhs_plus - &rhs_plus)).max(op_norm(&(&lhs_minus - &rhs_minus)));
        if residual > 1e-9 {
            return Err(Error::IdentityResidualExceeded(residual));
        }
        Ok((sigma_plus, sigma_minus))
    }

    /// W(z) = I + zDN*(I - z(F'+F'')/2)^{-1}N, verified to invert
    /// I - zDN*(I - zF)^{-1}N.
    pub fn w_function(&self, z: C64) -> Result<CMatrix> {
        if on_cut(z) {
            return Err(Error::BadPoint(z));
        }
        let m = self.dim_m();
        let k = self.dim_k();
        let mid = (&self.f_prime + &self.f_double) * cr(0.5);
        let res_mid = solve_guarded(&(identity(k) - &mid * z), &identity(k))?;
        let w = identity(m) + &self.d * self.n.adjoint() * &res_mid * &self.n * z;
        let res_f = solve_guarded(&(identity(k) - &self.f * z), &identity(k))?;
        let w_inv = identity(m) - &self.d * self.n.adjoint() * &res_f * &self.n * z;
        let residual = op_norm(&(&w * &w_inv - identity(m)));
        if residual > 1e-9 {
            return Err(Error::IdentityResidualExceeded(residual));
        }
        Ok(w)
    }

    /// B(x) = F + x C*(I - xD)^{-1} C for real x in (-1, 1).
    pub fn b_of(&self, x: f64) -> Result<CMatrix> {
        let m = self.dim_m();
        let dd = defect(&self.d)?;
        let res = solve_guarded(&(identity(m) - &self.d * cr(x)), &identity(m))?;
        Ok(&self.f + &self.n * &dd * res * &dd * self.n.adjoint() * cr(x))
    }

    /// Boundary limits B(1) and B(-1) along the dyadic approach
    /// x = +-(1 - 2^{-k}); the error is linear in 2^{-k}, so the Richardson
    /// pair 2B_{k+1} - B_k is used for convergence detection. The limits must
    /// equal F' and F'' within 1e-6.
    pub fn boundary_limits(&self) -> Result<(CMatrix, CMatrix)> {
        let mut out = Vec::with_capacity(2);
        for sign in [1.0f64, -1.0] {
            let mut prev_r: Option<CMatrix> = None;
            let mut prev_b = self.b_of(sign * (1.0 - 2f64.powi(-6)))?;
            let mut limit = None;
            for k in 7..=20 {
                let b = self.b_of(sign * (1.0 - 2f64.powi(-k)))?;
                let r = &b * cr(2.0) - &prev_b;
                if let Some(pr) = &prev_r {
                    if op_norm(&(&r - pr)) < 1e-8 {
                        limit = Some(r.clone());
                        break;
                    }
                }
                prev_r = Some(r);
                prev_b = b;
            }
            let limit = match limit {
                Some(l) => l,
                None => {
                    let last = prev_r.expect("at least one Richardson value");
                    return Err(Error::NoConvergence(op_norm(&last)));
                }
            };
            let target = if sign > 0.0 { &self.f_prime } else { &self.f_double };
            let residual = op_norm(&(&limit - target));
            if residual > 1e-6 {
                return Err(Error::NoConvergence(residual));
            }
            out.push(limit);
        }
        let b_minus = out.pop().expect("two limits");
        let b_plus = out.pop().expect("two limits");
        Ok((b_plus, b_minus))
    }
}
