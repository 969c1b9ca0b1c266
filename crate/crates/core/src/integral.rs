//! Atomic integral representations of bounded Stieltjes and inverse
//! Stieltjes functions built from a generating triple: the spectral measure
//! of the operator part, the extracted representation data, and evaluation.

use crate::error::Error;
use crate::families::{FamilyKind, StieltjesConstruction};
use crate::grid::on_positive_ray;
use crate::linrel::LinearRelation;
use crate::numerics::{
    cr, eigh, herm_part, identity, max_eig_hermitian, min_eig_hermitian, op_norm,
    CMatrix, C64,
};
use crate::Result;

/// Resolution of identity of the operator part of a nonnegative selfadjoint
/// relation, lifted to the ambient space. The projectors sum to the carrier
/// projector; nodes with spacing below 1e-9 are merged.
#[derive(Clone, Debug)]
pub struct SpectralMeasure {
    pub nodes: Vec<f64>,
    pub projectors: Vec<CMatrix>,
    /// Projector onto the carrier (ambient minus the multivalued part).
    pub carrier_projector: CMatrix,
    /// Projector onto the range of the operator part, lifted.
    pub range_projector: CMatrix,
}

pub fn spectral_measure(a_hat: &LinearRelation) -> Result<SpectralMeasure> {
    if !a_hat.is_selfadjoint(1e-8) || !a_hat.is_nonnegative(1e-8) {
        return Err(Error::NotNonnegativeSelfadjoint);
    }
    let k = a_hat.space_dim();
    let dec = a_hat.operator_part()?;
    let w = &dec.carrier;
    let a_o = herm_part(&dec.operator_part);
    let carrier_projector = w * w.adjoint();
    if a_o.nrows() == 0 {
        return Ok(SpectralMeasure {
            nodes: Vec::new(),
            projectors: Vec::new(),
            carrier_projector,
            range_projector: CMatrix::zeros(k, k),
        });
    }
    let (values, vectors) = eigh(&a_o);
    let mut nodes: Vec<f64> = Vec::new();
    let mut projectors: Vec<CMatrix> = Vec::new();
    let mut i = 0;
    while i < values.len() {
        let mut j = i + 1;
        while j < values.len() && values[j] - values[i] < 1e-9 {
            j += 1;
        }
        let cluster = vectors.columns(i, j - i);
        let lifted = w * cluster * cluster.adjoint() * w.adjoint();
        let mean = values.iter().take(j).skip(i).sum::<f64>() / (j - i) as f64;
        nodes.push(mean.max(0.0));
        projectors.push(lifted);
        i = j;
    }
    let range_projector = nodes
        .iter()
        .zip(&projectors)
        .filter(|(t, _)| **t > 1e-9)
        .fold(CMatrix::zeros(k, k), |acc, (_, p)| acc + p);
    Ok(SpectralMeasure {
        nodes,
        projectors,
        carrier_projector,
        range_projector,
    })
}

/// Atomic representation Gamma + sum_i dSigma_i/(t_i - lambda) (Stieltjes) or
/// Gamma + lambda Pi + sum_i (1/(t_i - lambda) - 1/t_i) dSigma_i (inverse).
#[derive(Clone, Debug)]
pub struct IntegralRepresentation {
    pub kind: FamilyKind,
    pub gamma: CMatrix,
    pub pi: Option<CMatrix>,
    pub atoms: Vec<(f64, CMatrix)>,
}

fn require_unrestricted(cons: &StieltjesConstruction) -> Result<()> {
    cons.validate()?;
    if cons.dom_z.is_some() {
        return Err(Error::HypothesisViolated(
            "integral extraction needs an everywhere-defined Z".into(),
        ));
    }
    Ok(())
}

fn check_psd(m: &CMatrix, what: &str) -> Result<()> {
    let min = min_eig_hermitian(&herm_part(m));
    if min < -1e-10 {
        return Err(Error::SignViolation(format!("{what} has eigenvalue {min}")));
    }
    Ok(())
}

/// Representation of Z* Q0(lambda) Z: Gamma = Z*(I - V* P_o V)Z and atoms
/// dSigma_i = (1 + t_i) Z* V* E_i V Z over the spectral nodes.
pub fn stieltjes_rep(cons: &StieltjesConstruction) -> Result<IntegralRepresentation> {
    require_unrestricted(cons)?;
    let measure = spectral_measure(&cons.a_hat)?;
    let m = cons.dim_m();
    let gamma = cons.z.adjoint()
        * (identity(m) - cons.v.adjoint() * &measure.carrier_projector * &cons.v)
        * &cons.z;
    check_psd(&gamma, "Gamma")?;
    let mut atoms = Vec::new();
    for (t, e) in measure.nodes.iter().zip(&measure.projectors) {
        let weight = cons.z.adjoint() * cons.v.adjoint() * e * &cons.v * &cons.z * cr(1.0 + t);
        if op_norm(&weight) < 1e-12 {
            continue;
        }
        check_psd(&weight, "atom weight")?;
        atoms.push((*t, weight));
    }
    Ok(IntegralRepresentation {
        kind: FamilyKind::Stieltjes,
        gamma: herm_part(&gamma),
        pi: None,
        atoms,
    })
}

/// Representation of Y* R(lambda) Y for the inverse Stieltjes function built
/// from the inverse relation: Gamma = Y*(-I + V*(Pperp_o + P0_o)V)Y,
/// Pi = Y* V* Pperp_o V Y, atoms dSigma_i = t_i(1 + t_i) Y* V* E_i V Y over
/// the strictly positive nodes.
pub fn inverse_stieltjes_rep(cons: &StieltjesConstruction) -> Result<IntegralRepresentation> {
    require_unrestricted(cons)?;
    let measure = spectral_measure(&cons.a_hat)?;
    let k = cons.v.nrows();
    let y = &cons.z;
    let p_perp = identity(k) - &measure.carrier_projector;
    let gamma = y.adjoint()
        * (cons.v.adjoint() * (&p_perp + &measure.range_projector) * &cons.v - identity(cons.dim_m()))
        * y;
    let max = max_eig_hermitian(&herm_part(&gamma));
    if max > 1e-10 {
        return Err(Error::SignViolation(format!("Gamma has eigenvalue {max}")));
    }
    let pi = y.adjoint() * cons.v.adjoint() * &p_perp * &cons.v * y;
    check_psd(&pi, "Pi")?;
    let mut atoms = Vec::new();
    for (t, e) in measure.nodes.iter().zip(&measure.projectors) {
        if *t <= 1e-9 {
            continue;
        }
        let weight = y.adjoint() * cons.v.adjoint() * e * &cons.v * y * cr(t * (1.0 + t));
        if op_norm(&weight) < 1e-12 {
            continue;
        }
        check_psd(&weight, "atom weight")?;
        atoms.push((*t, weight));
    }
    Ok(IntegralRepresentation {
        kind: FamilyKind::InverseStieltjes,
        gamma: herm_part(&gamma),
        pi: Some(herm_part(&pi)),
        atoms,
    })
}

pub fn evaluate_rep(rep: &IntegralRepresentation, lambda: C64) -> Result<CMatrix> {
    for (t, _) in &rep.atoms {
        if (lambda - cr(*t)).norm() < 1e-10 {
            return Err(Error::PoleHit(*t));
        }
    }
    if on_positive_ray(lambda, 1e-12) {
        return Err(Error::BadPoint(lambda));
    }
    let mut value = rep.gamma.clone_owned();
    if rep.kind == FamilyKind::InverseStieltjes {
        if let Some(pi) = &rep.pi {
            value += pi * lambda;
        }
    }
    for (t, w) in &rep.atoms {
        let factor = match rep.kind {
            FamilyKind::Stieltjes => (cr(*t) - lambda).inv(),
            FamilyKind::InverseStieltjes => (cr(*t) - lambda).inv() - cr(1.0 / t),
        };
        value += w * factor;
    }
    Ok(value)
}

/// Moment sums entering the finiteness conditions of the representation:
/// per basis vector f, sum_i (dSigma_i f, f)/(t_i + 1) for the Stieltjes kind
/// and sum_i (dSigma_i f, f)/(t_i (t_i + 1)) for the inverse kind.
pub fn moment_sums(rep: &IntegralRepresentation) -> Vec<f64> {
    let m = rep.gamma.nrows();
    (0..m)
        .map(|j| {
            rep.atoms
                .iter()
                .map(|(t, w)| {
                    let diag = w[(j, j)].re;
                    match rep.kind {
                        FamilyKind::Stieltjes => diag / (t + 1.0),
                        FamilyKind::InverseStieltjes => diag / (t * (t + 1.0)),
                    }
                })
                .sum()
        })
        .collect()
}
