//! Stieltjes and inverse Stieltjes families of linear relations: fractional
//! transforms to and from the cut-plane class, the explicit resolvent
//! constructions Q0/R0, sector and kernel verification, closed sectorial
//! forms, and the boundary limits at 0- and -infinity.

use crate::error::Error;
use crate::grid::on_positive_ray;
use crate::linrel::{LinearRelation, NumericalRangeSample};
use crate::numerics::{
    c, cr, herm_part, hstack, identity, max_eig_hermitian, min_eig_hermitian, op_norm,
    orthonormal_column_basis, pinv, solve_guarded, sqrt_psd, subspace_equal, CMatrix, CVector,
    Subspace, C64, DEFAULT_TOL,
};
use crate::rs::RsFunction;
use crate::Result;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    Stieltjes,
    InverseStieltjes,
}

/// Generating triple (A_hat, V, Z): a nonnegative selfadjoint relation in K,
/// a contraction V: M -> K, and an operator Z on M whose domain may be a
/// proper subspace of M.
#[derive(Clone, Debug)]
pub struct StieltjesConstruction {
    pub a_hat: LinearRelation,
    pub v: CMatrix,
    pub z: CMatrix,
    pub dom_z: Option<Subspace>,
}

impl StieltjesConstruction {
    pub fn validate(&self) -> Result<()> {
        if !self.a_hat.is_selfadjoint(1e-8) || !self.a_hat.is_nonnegative(1e-8) {
            return Err(Error::NotNonnegativeSelfadjoint);
        }
        let norm = op_norm(&self.v);
        if norm > 1.0 + 1e-10 {
            return Err(Error::NotContraction(norm));
        }
        if self.v.ncols() != self.z.nrows() || self.z.nrows() != self.z.ncols() {
            return Err(Error::ShapeMismatch("V and Z must share the input space".into()));
        }
        if let Some(u) = &self.dom_z {
            if u.ambient_dim() != self.z.ncols() {
                return Err(Error::DimensionMismatch("dom Z ambient".into()));
            }
        }
        Ok(())
    }

    pub fn dim_m(&self) -> usize {
        self.z.nrows()
    }
}

/// The map lambda -> z between the cut plane of the families and the cut
/// plane of the bounded class.
pub fn lambda_to_z(lambda: C64) -> C64 {
    (cr(1.0) + lambda) / (cr(1.0) - lambda)
}

pub fn z_to_lambda(z: C64) -> C64 {
    (z - cr(1.0)) / (z + cr(1.0))
}

fn check_lambda(lambda: C64) -> Result<()> {
    if on_positive_ray(lambda, 1e-12) {
        return Err(Error::BadPoint(lambda));
    }
    Ok(())
}

/// Fractional transform from a bounded class function to a family value:
/// Stieltjes graph span {(I-Om)h, (I+Om)h}, inverse Stieltjes graph
/// span {(I+Om)h, (Om-I)h}, evaluated at z = (1+lambda)/(1-lambda).
pub fn from_rs(omega: &RsFunction, kind: FamilyKind, lambda: C64) -> Result<LinearRelation> {
    check_lambda(lambda)?;
    let om = omega.eval(lambda_to_z(lambda))?;
    let m = om.nrows();
    let (top, bottom) = match kind {
        FamilyKind::Stieltjes => (identity(m) - &om, identity(m) + &om),
        FamilyKind::InverseStieltjes => (identity(m) + &om, &om - identity(m)),
    };
    LinearRelation::from_graph_columns(&top, &bottom)
}

/// A Stieltjes or inverse Stieltjes family with an evaluable origin.
#[derive(Clone, Debug)]
pub enum FamilyOrigin {
    Rs(RsFunction),
    Construction(StieltjesConstruction),
    /// Q(lambda) = -H/lambda for a PSD Hermitian H (Stieltjes kind only).
    NegHOverLambda(CMatrix),
}

#[derive(Clone, Debug)]
pub struct FamilyHandle {
    pub kind: FamilyKind,
    pub origin: FamilyOrigin,
}

impl FamilyHandle {
    pub fn from_rs_origin(kind: FamilyKind, omega: RsFunction) -> Self {
        FamilyHandle {
            kind,
            origin: FamilyOrigin::Rs(omega),
        }
    }

    pub fn from_construction(kind: FamilyKind, cons: StieltjesConstruction) -> Result<Self> {
        cons.validate()?;
        Ok(FamilyHandle {
            kind,
            origin: FamilyOrigin::Construction(cons),
        })
    }

    pub fn neg_h_over_lambda(h: CMatrix) -> Result<Self> {
        let rel = LinearRelation::from_operator(&h);
        if !rel.is_nonnegative(1e-9) {
            return Err(Error::NotNonnegativeSelfadjoint);
        }
        Ok(FamilyHandle {
            kind: FamilyKind::Stieltjes,
            origin: FamilyOrigin::NegHOverLambda(h),
        })
    }

    pub fn dim(&self) -> usize {
        match &self.origin {
            FamilyOrigin::Rs(f) => f.dim(),
            FamilyOrigin::Construction(cons) => match &cons.dom_z {
                Some(u) => u.dim(),
                None => cons.dim_m(),
            },
            FamilyOrigin::NegHOverLambda(h) => h.nrows(),
        }
    }

    /// Value at lambda as a linear relation.
    pub fn eval(&self, lambda: C64) -> Result<LinearRelation> {
        check_lambda(lambda)?;
        match &self.origin {
            FamilyOrigin::Rs(f) => from_rs(f, self.kind, lambda),
            FamilyOrigin::Construction(cons) => Ok(form_family(cons, self.kind, lambda)?.1),
            FamilyOrigin::NegHOverLambda(h) => {
                Ok(LinearRelation::from_operator(&(h * (-lambda.inv()))))
            }
        }
    }

    /// Value at lambda as a matrix, when the value is a bounded operator; for
    /// a construction with restricted dom Z this is the compressed form
    /// matrix in the dom-Z coordinates.
    pub fn eval_bounded(&self, lambda: C64) -> Result<CMatrix> {
        check_lambda(lambda)?;
        match &self.origin {
            FamilyOrigin::Rs(f) => {
                let om = f.eval(lambda_to_z(lambda))?;
                let m = om.nrows();
                match self.kind {
                    FamilyKind::Stieltjes => {
                        Ok((identity(m) + &om) * solve_guarded(&(identity(m) - &om), &identity(m))?)
                    }
                    FamilyKind::InverseStieltjes => {
                        Ok((&om - identity(m)) * solve_guarded(&(identity(m) + &om), &identity(m))?)
                    }
                }
            }
            FamilyOrigin::Construction(cons) => Ok(form_family(cons, self.kind, lambda)?.0),
            FamilyOrigin::NegHOverLambda(h) => Ok(h * (-lambda.inv())),
        }
    }
}

/// Extraction of the bounded class function from a family:
/// {f, f'} in Q(lambda) maps to {f + f', f' - f} in Omega(z) with
/// lambda = (z-1)/(z+1); for the inverse kind -R is transformed.
pub fn to_rs(family: &FamilyHandle, z: C64) -> Result<CMatrix> {
    if (z + cr(1.0)).norm() < 1e-12 {
        return Err(Error::BadPoint(z));
    }
    let rel = family.eval(z_to_lambda(z))?;
    let (top, bottom) = (rel.top(), rel.bottom());
    // Stieltjes pairs {f, f'} map to {f + f', f' - f}; inverse pairs are fed
    // through -R, where {g, g'} maps to {g + g', g - g'}.
    let (graph_top, graph_bottom) = match family.kind {
        FamilyKind::Stieltjes => (&top + &bottom, &bottom - &top),
        FamilyKind::InverseStieltjes => (&top - &bottom, &top + &bottom),
    };
    LinearRelation::from_graph_columns(&graph_top, &graph_bottom)?.to_operator(1e-8)
}

/// Q0(lambda) = I + (1+lambda) V*(A_hat - lambda)^{-1} V, with the exact
/// anchor Q0(-1) = I.
pub fn q0(cons: &StieltjesConstruction, lambda: C64) -> Result<CMatrix> {
    check_lambda(lambda)?;
    let m = cons.dim_m();
    if (lambda + cr(1.0)).norm() < 1e-12 {
        return Ok(identity(m));
    }
    let res = cons.a_hat.resolvent(lambda)?;
    Ok(identity(m) + cons.v.adjoint() * res * &cons.v * (cr(1.0) + lambda))
}

/// R0(lambda) = -Q0(1/lambda), with the exact anchor R0(-1) = -I.
pub fn r0(cons: &StieltjesConstruction, lambda: C64) -> Result<CMatrix> {
    check_lambda(lambda)?;
    if lambda.norm() < 1e-12 {
        return Err(Error::BadPoint(lambda));
    }
    Ok(-q0(cons, lambda.inv())?)
}

/// Closed form -I + (1+lambda) V*(A_hat - lambda + (1+lambda)VV*)^{-1} V for
/// -Q0(lambda)^{-1}, verified against direct inversion of Q0.
pub fn neg_inv_q0(cons: &StieltjesConstruction, lambda: C64) -> Result<CMatrix> {
    check_lambda(lambda)?;
    let m = cons.dim_m();
    let shift = &cons.v * cons.v.adjoint() * (cr(1.0) + lambda) - identity(cons.v.nrows()) * lambda;
    let shifted = cons.a_hat.operator_shift(&shift);
    let res = shifted.resolvent(cr(0.0))?;
    let closed = cons.v.adjoint() * res * &cons.v * (cr(1.0) + lambda) - identity(m);
    let direct = -solve_guarded(&q0(cons, lambda)?, &identity(m))?;
    let residual = op_norm(&(&closed - &direct));
    if residual > 1e-9 {
        return Err(Error::IdentityResidualExceeded(residual));
    }
    Ok(closed)
}

/// Operator-part expansion of Q0:
/// I - V* P_o V + V*(I + A_o)(A_o - lambda)^{-1} P_o V, where A_o is the
/// operator part of A_hat and P_o projects onto its carrier; verified
/// against the resolvent form.
pub fn q0_operator_part_form(cons: &StieltjesConstruction, lambda: C64) -> Result<CMatrix> {
    check_lambda(lambda)?;
    let m = cons.dim_m();
    let dec = cons.a_hat.operator_part()?;
    let w = &dec.carrier;
    let a_o = &dec.operator_part;
    let wdim = a_o.nrows();
    let p_o = w * w.adjoint();
    let inner = (identity(wdim) + a_o)
        * solve_guarded(&(a_o - identity(wdim) * lambda), &identity(wdim))?;
    let lifted = w * inner * w.adjoint();
    let value = identity(m) - cons.v.adjoint() * &p_o * &cons.v
        + cons.v.adjoint() * lifted * &cons.v;
    let direct = q0(cons, lambda)?;
    let residual = op_norm(&(&value - &direct));
    if residual > 1e-9 {
        return Err(Error::IdentityResidualExceeded(residual));
    }
    Ok(value)
}

/// Operator-part expansion of the inverse Stieltjes function built from
/// A_hat^{-1}:
/// -I + (1+lambda) V* Pperp V + V* A_o(I+A_o)((A_o-lambda)^{-1} - (I+A_o)^{-1}) P0_o V,
/// verified against -I - (1+lambda)V*(lambda A_hat^{-1} - I)^{-1}V.
pub fn r0_operator_part_form(cons: &StieltjesConstruction, lambda: C64) -> Result<CMatrix> {
    check_lambda(lambda)?;
    let m = cons.dim_m();
    let k = cons.v.nrows();
    let dec = cons.a_hat.operator_part()?;
    let w = &dec.carrier;
    let a_o = &dec.operator_part;
    let wdim = a_o.nrows();
    let p_perp = identity(k) - w * w.adjoint();
    // Projection onto ran A_o, lifted to the ambient space.
    let ran = orthonormal_column_basis(a_o, 1e-10);
    let p0_in = ran.basis() * ran.basis().adjoint();
    let inner = a_o
        * (identity(wdim) + a_o)
        * (solve_guarded(&(a_o - identity(wdim) * lambda), &identity(wdim))?
            - solve_guarded(&(identity(wdim) + a_o), &identity(wdim))?)
        * &p0_in;
    let lifted = w * inner * w.adjoint();
    let value = cons.v.adjoint() * &p_perp * &cons.v * (cr(1.0) + lambda) - identity(m)
        + cons.v.adjoint() * lifted * &cons.v;

    // Direct form through the relation lambda * A_hat^{-1}.
    let scaled = cons.a_hat.inverse().scalar_mul(lambda);
    let res = scaled.resolvent(cr(1.0))?;
    let direct = -identity(m) - cons.v.adjoint() * res * &cons.v * (cr(1.0) + lambda);
    let residual = op_norm(&(&value - &direct));
    if residual > 1e-9 {
        return Err(Error::IdentityResidualExceeded(residual));
    }
    Ok(value)
}

/// The bounded class function generating Q0 through the fractional transform:
/// a coupled pair with N = (I + A_hat)^{-1/2} V, F' = C(A_hat),
/// F'' = C(A_hat) - 2NN*.
pub fn rs_function_for_construction(cons: &StieltjesConstruction) -> Result<RsFunction> {
    let t_hat = cons.a_hat.cayley().to_operator(1e-8)?;
    let k = t_hat.nrows();
    // (A_hat + I)^{-1} = (C(A_hat) + I)/2, so its PSD square root exists.
    let s = sqrt_psd(&((identity(k) + &t_hat) * cr(0.5)), DEFAULT_TOL)?;
    let n = &s * &cons.v;
    let f_double = &t_hat - &n * n.adjoint() * cr(2.0);
    Ok(RsFunction::Coupled {
        n,
        f_prime: t_hat,
        f_double,
    })
}

/// Form matrix and relation of Z* M0(lambda) Z over dom Z, where M0 is Q0 or
/// R0 per kind. With restricted dom Z the adjoint Z* is multivalued with
/// mul Z* = (dom Z)^perp, which becomes the multivalued part of the relation.
pub fn form_family(
    cons: &StieltjesConstruction,
    kind: FamilyKind,
    lambda: C64,
) -> Result<(CMatrix, LinearRelation)> {
    let m0 = match kind {
        FamilyKind::Stieltjes => q0(cons, lambda)?,
        FamilyKind::InverseStieltjes => r0(cons, lambda)?,
    };
    let m = cons.dim_m();
    match &cons.dom_z {
        None => {
            let fm = cons.z.adjoint() * &m0 * &cons.z;
            let rel = LinearRelation::from_operator(&fm);
            Ok((fm, rel))
        }
        Some(u) => {
            let ub = u.basis();
            let zu = &cons.z * ub;
            let fm = zu.adjoint() * &m0 * &zu;
            let proj = u.projector();
            let perp = u.complement();
            let top = hstack(
                &ub.clone_owned(),
                &CMatrix::zeros(m, perp.dim()),
            );
            let bottom = hstack(
                &(&proj * cons.z.adjoint() * &m0 * &zu),
                &perp.basis().clone_owned(),
            );
            let rel = LinearRelation::from_graph_columns(&top, &bottom)?;
            Ok((fm, rel))
        }
    }
}

/// Rotation phi_lambda and containing semi-angle for the value of a family
/// at lambda: exp(i phi) M(lambda) is maximal sectorial with vertex 0 and
/// the stated semi-angle.
pub fn rotation_and_semi_angle(kind: FamilyKind, lambda: C64) -> (f64, f64) {
    let pi = std::f64::consts::PI;
    let a = lambda.arg().abs();
    let base = match kind {
        FamilyKind::Stieltjes => 0.0,
        FamilyKind::InverseStieltjes => pi,
    };
    if lambda.re < -1e-12 {
        (base, pi - a)
    } else if lambda.re.abs() <= 1e-12 {
        (base, pi / 2.0)
    } else {
        let spread = (pi - a) / 2.0;
        let phi = match kind {
            FamilyKind::Stieltjes => -lambda.im.signum() * (pi - a) / 2.0,
            FamilyKind::InverseStieltjes => -lambda.im.signum() * (pi + a) / 2.0,
        };
        (phi, spread)
    }
}

/// Sampled verification of the sector inequalities at one lambda.
#[derive(Clone, Debug)]
pub struct SectorReport {
    pub lambda: C64,
    pub rotation: f64,
    pub semi_angle: f64,
    pub samples: NumericalRangeSample,
    /// Minimum over samples of all value-level inequalities; passing reports
    /// have this >= -tol.
    pub worst_violation: f64,
    /// Minimum over samples of semi_angle - |arg(exp(i rotation) value)|.
    pub sector_margin: f64,
}

pub fn sector_check(
    family: &FamilyHandle,
    lambda: C64,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<SectorReport> {
    let rel = family.eval(lambda)?;
    let nr = rel.numerical_range(samples, rng)?;
    let (rotation, semi_angle) = rotation_and_semi_angle(family.kind, lambda);
    let mut worst = f64::INFINITY;
    let mut margin = f64::INFINITY;
    let real_negative = lambda.im.abs() < 1e-12;
    let rot = C64::from_polar(1.0, rotation);
    for &v in &nr.values {
        match family.kind {
            FamilyKind::Stieltjes => {
                if real_negative {
                    worst = worst.min(v.re).min(-v.im.abs());
                } else {
                    let ineq = v.re + lambda.re / lambda.im.abs() * v.im.abs();
                    let nevanlinna = v.im * lambda.im.signum();
                    let scaled = (lambda * v).im * lambda.im.signum();
                    worst = worst.min(ineq).min(nevanlinna).min(scaled);
                }
            }
            FamilyKind::InverseStieltjes => {
                if real_negative {
                    worst = worst.min(-v.re).min(-v.im.abs());
                } else {
                    let neg = -v;
                    let ineq = neg.re + lambda.re / lambda.im.abs() * neg.im.abs();
                    let nevanlinna = v.im * lambda.im.signum();
                    let scaled = (v / lambda).im * lambda.im.signum();
                    worst = worst.min(ineq).min(nevanlinna).min(scaled);
                }
            }
        }
        let rotated = rot * v;
        if rotated.norm() > 1e-10 {
            margin = margin.min(semi_angle - rotated.arg().abs());
        }
    }
    Ok(SectorReport {
        lambda,
        rotation,
        semi_angle,
        samples: nr,
        worst_violation: worst,
        sector_margin: margin,
    })
}

/// Closed sectorial form extracted from the Cayley transform T of a maximal
/// sectorial relation: domain ran(I + Re T)^{1/2} and
/// A[u, v] = -(u, v) + 2((I + iG)^{-1} S+ u, S+ v) with S = (I + Re T)^{1/2}.
#[derive(Clone, Debug)]
pub struct ClosedFormRepresentation {
    pub domain_basis: Subspace,
    pub g_operator: CMatrix,
    form_matrix: CMatrix,
}

impl ClosedFormRepresentation {
    /// A[u, v] for u, v in the form domain.
    pub fn evaluate(&self, u: &CVector, v: &CVector) -> C64 {
        (v.adjoint() * &self.form_matrix * u)[(0, 0)]
    }
}

pub fn closed_form_from_cayley(a: &LinearRelation) -> Result<ClosedFormRepresentation> {
    let t = a
        .cayley()
        .to_operator(1e-8)
        .map_err(|_| Error::NotSectorial("Cayley transform is multivalued".into()))?;
    let alpha = crate::contractions::min_class_angle(&t)
        .map_err(|_| Error::NotSectorial("Cayley transform is not a contraction".into()))?;
    if !alpha.is_finite() {
        return Err(Error::NotSectorial(
            "Cayley transform escapes every contraction class".into(),
        ));
    }
    let m = t.nrows();
    let t_r = herm_part(&t);
    let t_i = crate::numerics::imag_part(&t);
    // Rank and inverse square root of I + Re T from one eigendecomposition;
    // taking pinv of the square root would amplify rounding noise.
    let (vals, vecs) = crate::numerics::eigh(&(identity(m) + &t_r));
    let vmax = vals.last().copied().unwrap_or(0.0).max(0.0);
    let kept: Vec<usize> = (0..m).filter(|&i| vals[i] > 1e-8 * vmax.max(1.0)).collect();
    let mut basis = CMatrix::zeros(m, kept.len());
    let mut s_pinv = CMatrix::zeros(m, m);
    for (col, &i) in kept.iter().enumerate() {
        basis.set_column(col, &vecs.column(i));
        let v = vecs.column(i).into_owned();
        s_pinv += &v * v.adjoint() * cr(1.0 / vals[i].sqrt());
    }
    let domain = Subspace::from_orthonormal(basis);
    let proj = domain.projector();
    let g = &proj * &s_pinv * &t_i * &s_pinv * &proj;
    let core = solve_guarded(&(identity(m) + &g * c(0.0, 1.0)), &identity(m))?;
    let form_matrix = &s_pinv * core * &s_pinv * cr(2.0) - &proj;
    Ok(ClosedFormRepresentation {
        domain_basis: domain,
        g_operator: g,
        form_matrix,
    })
}

/// Kernel positivity report over a lambda-grid.
#[derive(Clone, Debug)]
pub struct KernelReport {
    /// Signed margin: min eigenvalue for the Stieltjes kind, negated max
    /// eigenvalue for the inverse kind; passing reports have this >= -tol.
    pub margin: f64,
    pub pass: bool,
}

fn derivative(family: &FamilyHandle, lambda: C64) -> Result<CMatrix> {
    // Central differences along the real direction with one Richardson step.
    let d_at = |h: f64| -> Result<CMatrix> {
        Ok((family.eval_bounded(lambda + cr(h))? - family.eval_bounded(lambda - cr(h))?)
            * cr(0.5 / h))
    };
    let d1 = d_at(1e-4)?;
    let d2 = d_at(5e-5)?;
    Ok((d2 * cr(4.0) - d1) * cr(1.0 / 3.0))
}

/// Block kernel [K(lambda_i, lambda_j)] with
/// K(lambda, mu) = M(lambda) + M(mu)^H +- c (M(lambda) - M(mu)^H),
/// c = (lambda + conj(mu))/(lambda - conj(mu)) (sign + for Stieltjes, - for
/// the inverse kind); conjugate-coincident pairs use the derivative form
/// 2M(lambda) +- 2 lambda M'(lambda). PSD for Stieltjes, NSD for inverse.
pub fn kernel_check(family: &FamilyHandle, grid: &[C64], tol: f64) -> Result<KernelReport> {
    let n = grid.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if (grid[i] - grid[j]).norm() < 1e-8 {
                return Err(Error::GridDegenerate(format!(
                    "grid points {} and {} coincide",
                    grid[i], grid[j]
                )));
            }
        }
    }
    let values: Vec<CMatrix> = grid
        .iter()
        .map(|&l| family.eval_bounded(l))
        .collect::<Result<_>>()?;
    let m = values[0].nrows();
    let sign = match family.kind {
        FamilyKind::Stieltjes => cr(1.0),
        FamilyKind::InverseStieltjes => cr(-1.0),
    };
    let mut block = CMatrix::zeros(n * m, n * m);
    for i in 0..n {
        for j in 0..n {
            let (li, lj) = (grid[i], grid[j]);
            let entry = if (li - lj.conj()).norm() < 1e-8 {
                let d = derivative(family, li)?;
                (&values[i] + d * li * sign) * cr(2.0)
            } else {
                let cfac = (li + lj.conj()) / (li - lj.conj());
                &values[i] + values[j].adjoint()
                    + (&values[i] - values[j].adjoint()) * cfac * sign
            };
            block.view_mut((i * m, j * m), (m, m)).copy_from(&entry);
        }
    }
    let h = herm_part(&block);
    let margin = match family.kind {
        FamilyKind::Stieltjes => min_eig_hermitian(&h),
        FamilyKind::InverseStieltjes => -max_eig_hermitian(&h),
    };
    Ok(KernelReport {
        margin,
        pass: margin >= -tol,
    })
}

/// Uniform lower bound c(lambda) with |(M(lambda) f, f)| >= c ||f||^2,
/// obtained as the smallest eigenvalue of Re(exp(i phi_lambda) M(lambda)).
pub fn lower_bound_constant(family: &FamilyHandle, lambda: C64, tol: f64) -> Result<f64> {
    let value = family.eval_bounded(lambda)?;
    let (phi, _) = rotation_and_semi_angle(family.kind, lambda);
    let rotated = value * C64::from_polar(1.0, phi);
    let cmin = min_eig_hermitian(&herm_part(&rotated));
    if cmin <= tol {
        return Err(Error::BoundViolated(cmin));
    }
    Ok(cmin)
}

fn omega_near_boundary(family: &FamilyHandle, z: C64) -> Result<CMatrix> {
    match &family.origin {
        FamilyOrigin::Rs(f) => f.eval(z),
        _ => to_rs(family, z),
    }
}

fn omega_boundary_limit(family: &FamilyHandle, sign: f64) -> Result<CMatrix> {
    if let FamilyOrigin::NegHOverLambda(h) = &family.origin {
        // Omega(z(lambda)) = (H + lambda)(H - lambda)^{-1}: exact limits.
        let m = h.nrows();
        return if sign > 0.0 {
            let p = orthonormal_column_basis(h, 1e-10).projector();
            Ok(p * cr(2.0) - identity(m))
        } else {
            Ok(-identity(m))
        };
    }
    // Dyadic approach z = sign (1 - 2^{-k}); the error is linear in 2^{-k},
    // so the Richardson pair 2 Om_{k+1} - Om_k detects convergence.
    let mut prev_om = omega_near_boundary(family, cr(sign * (1.0 - 2f64.powi(-6))))?;
    let mut prev_r: Option<CMatrix> = None;
    for k in 7..=26 {
        let om = omega_near_boundary(family, cr(sign * (1.0 - 2f64.powi(-k))))?;
        let r = &om * cr(2.0) - &prev_om;
        if let Some(pr) = &prev_r {
            if op_norm(&(&r - pr)) < 1e-8 {
                return Ok(r);
            }
        }
        prev_r = Some(r);
        prev_om = om;
    }
    Err(Error::NoConvergence(op_norm(
        &(prev_r.expect("richardson value")),
    )))
}

/// Boundary limits (M(-0), M(-infinity)) as relations, through the boundary
/// values of the generating class function at z = 1 and z = -1.
pub fn resolvent_limits(family: &FamilyHandle) -> Result<(LinearRelation, LinearRelation)> {
    let mut out = Vec::with_capacity(2);
    for sign in [1.0f64, -1.0] {
        let om = omega_boundary_limit(family, sign)?;
        let m = om.nrows();
        let (top, bottom) = match family.kind {
            FamilyKind::Stieltjes => (identity(m) - &om, identity(m) + &om),
            FamilyKind::InverseStieltjes => (identity(m) + &om, &om - identity(m)),
        };
        out.push(LinearRelation::from_graph_columns(&top, &bottom)?);
    }
    let at_minus_inf = out.pop().expect("two limits");
    let at_zero = out.pop().expect("two limits");
    Ok((at_zero, at_minus_inf))
}

/// Form order a <= b for nonnegative selfadjoint relations, through the
/// anti-monotone resolvents at -1: a <= b iff (b+I)^{-1} <= (a+I)^{-1}.
pub fn form_order_le(a: &LinearRelation, b: &LinearRelation, tol: f64) -> Result<bool> {
    let ra = a.resolvent(cr(-1.0))?;
    let rb = b.resolvent(cr(-1.0))?;
    Ok(min_eig_hermitian(&herm_part(&(ra - rb))) >= -tol)
}

#[derive(Clone, Debug, PartialEq)]
pub enum LimitClass {
    Converged(f64),
    Divergent,
}

#[derive(Clone, Debug)]
pub struct MonotoneLimitsReport {
    pub lower: Vec<LimitClass>,
    pub upper: Vec<LimitClass>,
}

/// Endpoint behavior of x -> L(x)^{[-1]}[f] for a non-decreasing family of
/// PSD matrices on (a, b): at each endpoint the value either converges (for
/// f in the range of the limit) or grows beyond every bound.
pub fn monotone_form_limits<L: Fn(f64) -> CMatrix>(
    l: L,
    a: f64,
    b: f64,
    vectors: &[CVector],
) -> Result<MonotoneLimitsReport> {
    // Hypothesis checks on interior samples: PSD, monotone, constant range.
    let probes: Vec<f64> = (1..=9).map(|i| a + (b - a) * i as f64 / 10.0).collect();
    let sampled: Vec<CMatrix> = probes.iter().map(|&x| l(x)).collect();
    let ranges: Vec<Subspace> = sampled
        .iter()
        .map(|m| orthonormal_column_basis(m, 1e-8))
        .collect();
    for (i, m) in sampled.iter().enumerate() {
        if min_eig_hermitian(&herm_part(m)) < -1e-9 {
            return Err(Error::HypothesisViolated(format!(
                "L({}) is not PSD",
                probes[i]
            )));
        }
        if i > 0 {
            let diff = herm_part(&(m - &sampled[i - 1]));
            if min_eig_hermitian(&diff) < -1e-9 {
                return Err(Error::HypothesisViolated(format!(
                    "L not non-decreasing between {} and {}",
                    probes[i - 1],
                    probes[i]
                )));
            }
            if !subspace_equal(&ranges[i], &ranges[0], 1e-6).unwrap_or(false) {
                return Err(Error::HypothesisViolated(format!(
                    "range of L({}) differs from the interior range",
                    probes[i]
                )));
            }
        }
    }

    let classify = |endpoint: f64, toward: f64| -> Result<Vec<LimitClass>> {
        let mut out = Vec::with_capacity(vectors.len());
        for f in vectors {
            let value_at = |x: f64| -> f64 {
                let m = l(x);
                (f.adjoint() * pinv(&m, 1e-10) * f)[(0, 0)].re
            };
            let mut prev = value_at(endpoint + (toward - endpoint) * 2f64.powi(-3));
            let mut prev_r: Option<f64> = None;
            let mut class = None;
            for k in 4..=40 {
                let v = value_at(endpoint + (toward - endpoint) * 2f64.powi(-k));
                if v > 1e6 {
                    class = Some(LimitClass::Divergent);
                    break;
                }
                let r = 2.0 * v - prev;
                if let Some(pr) = prev_r {
                    if (r - pr).abs() < 1e-6 * pr.abs().max(1.0) {
                        class = Some(LimitClass::Converged(r));
                        break;
                    }
                }
                prev_r = Some(r);
                prev = v;
            }
            match class {
                Some(cl) => out.push(cl),
                None => return Err(Error::NoConvergence(prev)),
            }
        }
        Ok(out)
    };
    Ok(MonotoneLimitsReport {
        lower: classify(a, b)?,
        upper: classify(b, a)?,
    })
}

/// Report on the lambda-transform equivalences: the value, its reciprocal
/// argument, its negated inverse, and the scaled family all satisfy their
/// respective pointwise kind inequalities.
#[derive(Clone, Debug)]
pub struct TransformReport {
    pub worst: f64,
    pub pass: bool,
}

fn kind_margin(kind: FamilyKind, lambda: C64, v: C64) -> f64 {
    if lambda.im.abs() < 1e-12 {
        let sign = match kind {
            FamilyKind::Stieltjes => 1.0,
            FamilyKind::InverseStieltjes => -1.0,
        };
        return (sign * v.re).min(-v.im.abs());
    }
    match kind {
        FamilyKind::Stieltjes => {
            let ineq = v.re + lambda.re / lambda.im.abs() * v.im.abs();
            ineq.min((lambda * v).im * lambda.im.signum())
        }
        FamilyKind::InverseStieltjes => {
            let ineq = -v.re + lambda.re / lambda.im.abs() * v.im.abs();
            ineq.min((v / lambda).im * lambda.im.signum())
        }
    }
}

pub fn transform_equivalences(
    family: &FamilyHandle,
    lambda_samples: &[C64],
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<TransformReport> {
    let mut worst = f64::INFINITY;
    let own = family.kind;
    let flipped = match own {
        FamilyKind::Stieltjes => FamilyKind::InverseStieltjes,
        FamilyKind::InverseStieltjes => FamilyKind::Stieltjes,
    };
    for &lambda in lambda_samples {
        if on_positive_ray(lambda, 1e-6) || on_positive_ray(lambda.inv(), 1e-6) {
            continue;
        }
        let rel = family.eval(lambda)?;
        for v in rel.numerical_range(samples, rng)?.values {
            worst = worst.min(kind_margin(own, lambda, v));
        }
        // -M(lambda)^{-1} has the flipped kind at the same point.
        let neg_inv = rel.inverse().neg();
        for v in neg_inv.numerical_range(samples, rng)?.values {
            worst = worst.min(kind_margin(flipped, lambda, v));
        }
        // -M(1/lambda) has the flipped kind.
        let recip = family.eval(lambda.inv())?.neg();
        for v in recip.numerical_range(samples, rng)?.values {
            worst = worst.min(kind_margin(flipped, lambda, v));
        }
    }
    Ok(TransformReport {
        worst,
        pass: worst >= -1e-10,
    })
}

/// Form-domain constancy and holomorphy evidence over a lambda-grid.
#[derive(Clone, Debug)]
pub struct FormDomainReport {
    pub all_equal: bool,
    pub worst_cr_residual: f64,
}

pub fn form_domain_constancy(family: &FamilyHandle, grid: &[C64]) -> Result<FormDomainReport> {
    let mut domains: Vec<Subspace> = Vec::with_capacity(grid.len());
    for &lambda in grid {
        let om = omega_near_boundary(family, lambda_to_z(lambda))?;
        let h = identity(om.nrows()) - herm_part(&om);
        domains.push(orthonormal_column_basis(&h, 1e-8));
    }
    let mut all_equal = true;
    for d in &domains[1..] {
        if !subspace_equal(d, &domains[0], 1e-6).unwrap_or(false) {
            all_equal = false;
        }
    }
    // Holomorphy of lambda -> (M(lambda) e_j, e_i) by comparing the real- and
    // imaginary-direction difference quotients.
    let mut worst = 0.0f64;
    let dim = family.dim();
    let probes: Vec<(usize, usize)> = if dim >= 2 {
        vec![(0, 0), (1, 0), (1, 1)]
    } else {
        vec![(0, 0)]
    };
    for &lambda in grid {
        let h = 1e-4 * lambda.norm().max(1.0);
        let vals = [
            family.eval_bounded(lambda + cr(h))?,
            family.eval_bounded(lambda - cr(h))?,
            family.eval_bounded(lambda + c(0.0, h))?,
            family.eval_bounded(lambda - c(0.0, h))?,
        ];
        for &(i, j) in &probes {
            let d_re = (vals[0][(i, j)] - vals[1][(i, j)]) / cr(2.0 * h);
            let d_im = (vals[2][(i, j)] - vals[3][(i, j)]) / c(0.0, 2.0 * h);
            worst = worst.max((d_re - d_im).norm());
        }
    }
    Ok(FormDomainReport {
        all_equal,
        worst_cr_residual: worst,
    })
}
