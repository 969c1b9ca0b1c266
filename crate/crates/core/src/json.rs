//! JSON wire formats: complex scalars as {"re","im"}, matrices as row-major
//! nested arrays, plus typed envelopes for subspaces, relations, systems,
//! constructions, families, and integral representations.

use crate::error::Error;
use crate::families::{FamilyHandle, FamilyKind, FamilyOrigin, StieltjesConstruction};
use crate::integral::IntegralRepresentation;
use crate::linrel::LinearRelation;
use crate::numerics::{orthonormal_column_basis, CMatrix, Subspace, C64};
use crate::rs::{PassiveSelfadjointSystem, RsFunction};
use crate::Result;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct JsonComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for JsonComplex {
    fn from(z: C64) -> Self {
        JsonComplex { re: z.re, im: z.im }
    }
}

impl From<JsonComplex> for C64 {
    fn from(z: JsonComplex) -> Self {
        C64::new(z.re, z.im)
    }
}

pub type JsonMatrix = Vec<Vec<JsonComplex>>;

pub fn matrix_to_json(m: &CMatrix) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].into()).collect())
        .collect()
}

pub fn matrix_from_json(rows: &JsonMatrix) -> Result<CMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Parse("ragged matrix rows".into()));
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| rows[i][j].into()))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonSubspace {
    pub ambient_dim: usize,
    pub basis: JsonMatrix,
}

pub fn subspace_to_json(s: &Subspace) -> JsonSubspace {
    JsonSubspace {
        ambient_dim: s.ambient_dim(),
        basis: matrix_to_json(s.basis()),
    }
}

pub fn subspace_from_json(j: &JsonSubspace) -> Result<Subspace> {
    let basis = matrix_from_json(&j.basis)?;
    if basis.nrows() != j.ambient_dim && !(j.ambient_dim > 0 && basis.ncols() == 0) {
        return Err(Error::Parse("subspace basis rows disagree with ambient_dim".into()));
    }
    if basis.ncols() == 0 {
        return Ok(Subspace::zero(j.ambient_dim));
    }
    // Re-orthonormalize so numerically perturbed input stays a valid basis.
    Ok(orthonormal_column_basis(&basis, 1e-12))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonRelation {
    pub space_dim: usize,
    pub graph: JsonSubspace,
}

pub fn relation_to_json(r: &LinearRelation) -> JsonRelation {
    JsonRelation {
        space_dim: r.space_dim(),
        graph: subspace_to_json(r.graph()),
    }
}

pub fn relation_from_json(j: &JsonRelation) -> Result<LinearRelation> {
    let graph = subspace_from_json(&j.graph)?;
    LinearRelation::from_graph_subspace(j.space_dim, graph)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonSystem {
    pub dim_m: usize,
    pub dim_k: usize,
    #[serde(rename = "T")]
    pub t: JsonMatrix,
}

pub fn system_to_json(s: &PassiveSelfadjointSystem) -> JsonSystem {
    JsonSystem {
        dim_m: s.dim_m(),
        dim_k: s.dim_k(),
        t: matrix_to_json(s.system_operator()),
    }
}

pub fn system_from_json(j: &JsonSystem) -> Result<PassiveSelfadjointSystem> {
    let t = matrix_from_json(&j.t)?;
    if t.nrows() != j.dim_m + j.dim_k {
        return Err(Error::Parse("system operator size disagrees with dims".into()));
    }
    PassiveSelfadjointSystem::new(t, j.dim_m, 1e-9)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonConstruction {
    #[serde(rename = "A_hat")]
    pub a_hat: JsonRelation,
    #[serde(rename = "V")]
    pub v: JsonMatrix,
    #[serde(rename = "Z")]
    pub z: JsonMatrix,
    #[serde(rename = "dom_Z")]
    pub dom_z: Option<JsonSubspace>,
}

pub fn construction_to_json(c: &StieltjesConstruction) -> JsonConstruction {
    JsonConstruction {
        a_hat: relation_to_json(&c.a_hat),
        v: matrix_to_json(&c.v),
        z: matrix_to_json(&c.z),
        dom_z: c.dom_z.as_ref().map(subspace_to_json),
    }
}

pub fn construction_from_json(j: &JsonConstruction) -> Result<StieltjesConstruction> {
    let cons = StieltjesConstruction {
        a_hat: relation_from_json(&j.a_hat)?,
        v: matrix_from_json(&j.v)?,
        z: matrix_from_json(&j.z)?,
        dom_z: j.dom_z.as_ref().map(subspace_from_json).transpose()?,
    };
    cons.validate()?;
    Ok(cons)
}

fn kind_to_str(kind: FamilyKind) -> &'static str {
    match kind {
        FamilyKind::Stieltjes => "stieltjes",
        FamilyKind::InverseStieltjes => "inverse_stieltjes",
    }
}

fn kind_from_str(s: &str) -> Result<FamilyKind> {
    match s {
        "stieltjes" => Ok(FamilyKind::Stieltjes),
        "inverse_stieltjes" => Ok(FamilyKind::InverseStieltjes),
        other => Err(Error::Parse(format!("unknown family kind '{other}'"))),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JsonFamilyOrigin {
    System(JsonSystem),
    Construction(JsonConstruction),
    NegHOverLambda { h: JsonMatrix },
    Constant { value: JsonMatrix },
    ScalarMultiple { coeff: JsonComplex, dim: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonFamily {
    pub kind: String,
    pub origin: JsonFamilyOrigin,
}

pub fn family_to_json(f: &FamilyHandle) -> Result<JsonFamily> {
    let origin = match &f.origin {
        FamilyOrigin::Rs(RsFunction::System(s)) => JsonFamilyOrigin::System(system_to_json(s)),
        FamilyOrigin::Rs(RsFunction::Constant(m)) => JsonFamilyOrigin::Constant {
            value: matrix_to_json(m),
        },
        FamilyOrigin::Rs(RsFunction::ScalarMultiple { coeff, dim }) => {
            JsonFamilyOrigin::ScalarMultiple {
                coeff: (*coeff).into(),
                dim: *dim,
            }
        }
        FamilyOrigin::Rs(RsFunction::Coupled { .. }) => {
            return Err(Error::Parse(
                "coupled-pair origins have no wire format".into(),
            ))
        }
        FamilyOrigin::Construction(c) => JsonFamilyOrigin::Construction(construction_to_json(c)),
        FamilyOrigin::NegHOverLambda(h) => JsonFamilyOrigin::NegHOverLambda {
            h: matrix_to_json(h),
        },
    };
    Ok(JsonFamily {
        kind: kind_to_str(f.kind).to_string(),
        origin,
    })
}

pub fn family_from_json(j: &JsonFamily) -> Result<FamilyHandle> {
    let kind = kind_from_str(&j.kind)?;
    match &j.origin {
        JsonFamilyOrigin::System(s) => Ok(FamilyHandle::from_rs_origin(
            kind,
            RsFunction::System(system_from_json(s)?),
        )),
        JsonFamilyOrigin::Construction(c) => {
            FamilyHandle::from_construction(kind, construction_from_json(c)?)
        }
        JsonFamilyOrigin::NegHOverLambda { h } => {
            if kind != FamilyKind::Stieltjes {
                return Err(Error::Parse(
                    "-H/lambda instances are Stieltjes kind".into(),
                ));
            }
            FamilyHandle::neg_h_over_lambda(matrix_from_json(h)?)
        }
        JsonFamilyOrigin::Constant { value } => Ok(FamilyHandle::from_rs_origin(
            kind,
            RsFunction::Constant(matrix_from_json(value)?),
        )),
        JsonFamilyOrigin::ScalarMultiple { coeff, dim } => Ok(FamilyHandle::from_rs_origin(
            kind,
            RsFunction::ScalarMultiple {
                coeff: (*coeff).into(),
                dim: *dim,
            },
        )),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonAtom {
    pub t: f64,
    pub weight: JsonMatrix,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonRepresentation {
    pub kind: String,
    pub gamma: JsonMatrix,
    pub pi: Option<JsonMatrix>,
    pub atoms: Vec<JsonAtom>,
}

pub fn representation_to_json(r: &IntegralRepresentation) -> JsonRepresentation {
    JsonRepresentation {
        kind: kind_to_str(r.kind).to_string(),
        gamma: matrix_to_json(&r.gamma),
        pi: r.pi.as_ref().map(matrix_to_json),
        atoms: r
            .atoms
            .iter()
            .map(|(t, w)| JsonAtom {
                t: *t,
                weight: matrix_to_json(w),
            })
            .collect(),
    }
}

pub fn representation_from_json(j: &JsonRepresentation) -> Result<IntegralRepresentation> {
    Ok(IntegralRepresentation {
        kind: kind_from_str(&j.kind)?,
        gamma: matrix_from_json(&j.gamma)?,
        pi: j.pi.as_ref().map(matrix_from_json).transpose()?,
        atoms: j
            .atoms
            .iter()
            .map(|a| Ok((a.t, matrix_from_json(&a.weight)?)))
            .collect::<Result<_>>()?,
    })
}
