//! Linear relations as graph subspaces of M ⊕ M.
//!
//! A relation is stored by an orthonormal basis of its graph; equality is
//! always subspace equality, never entry-wise matrix equality, because a
//! relation has no canonical matrix. Multivalued parts are first-class:
//! resolvents and the Cayley transform act directly on graphs, so {0} x M and
//! mixed relations need no special casing.

use crate::error::Error;
use crate::numerics::{
    cr, herm_part, identity, max_eig_hermitian, min_eig_hermitian, nullspace, op_norm,
    orthonormal_column_basis, pinv, subspace_equal, vstack, CMatrix, CVector, Subspace, C64,
    DEFAULT_TOL,
};
use crate::seeded;
use crate::Result;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct LinearRelation {
    space_dim: usize,
    graph: Subspace,
}

/// The lattice of subspaces derived from a relation.
pub struct RelationParts {
    pub dom: Subspace,
    pub ran: Subspace,
    pub ker: Subspace,
    pub mul: Subspace,
}

/// Splitting of a decomposable relation into operator part and multivalued part.
///
/// `operator_part` acts in the coordinates of `carrier`, an orthonormal basis
/// of M ⊖ mul; the graph is reassembled as Gr(A_s) ⊕ ({0} x mul).
pub struct OperatorPartDecomposition {
    pub mul_basis: Subspace,
    pub carrier: CMatrix,
    pub operator_part: CMatrix,
    pub dom_basis: Subspace,
}

/// Sampled numerical range values (f', f) / ||f||^2 over graph pairs.
#[derive(Clone, Debug)]
pub struct NumericalRangeSample {
    pub values: Vec<C64>,
}

impl LinearRelation {
    /// Graph of a square matrix: span of the columns of [I; A].
    pub fn from_operator(a: &CMatrix) -> Self {
        assert_eq!(a.nrows(), a.ncols(), "operator must be square");
        let n = a.nrows();
        let graph = orthonormal_column_basis(&vstack(&identity(n), a), DEFAULT_TOL);
        LinearRelation {
            space_dim: n,
            graph,
        }
    }

    /// Span of the pairs {top e_i, bottom e_i}, orthonormalized.
    pub fn from_graph_columns(top: &CMatrix, bottom: &CMatrix) -> Result<Self> {
        if top.nrows() != bottom.nrows() {
            return Err(Error::ShapeMismatch(format!(
                "graph components act on different spaces: {} vs {}",
                top.nrows(),
                bottom.nrows()
            )));
        }
        if top.ncols() != bottom.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "graph spans have {} vs {} generators",
                top.ncols(),
                bottom.ncols()
            )));
        }
        let graph = orthonormal_column_basis(&vstack(top, bottom), DEFAULT_TOL);
        Ok(LinearRelation {
            space_dim: top.nrows(),
            graph,
        })
    }

    /// Wraps an existing subspace of M ⊕ M.
    pub fn from_graph_subspace(space_dim: usize, graph: Subspace) -> Result<Self> {
        if graph.ambient_dim() != 2 * space_dim {
            return Err(Error::DimensionMismatch(format!(
                "graph ambient {} does not match 2*{}",
                graph.ambient_dim(),
                space_dim
            )));
        }
        Ok(LinearRelation { space_dim, graph })
    }

    /// Operator part on a subspace direct-sum a purely multivalued part:
    /// span{(w_i, W S w_i)} ∪ {(0, m_j)} for W = carrier basis, S its matrix.
    pub fn from_operator_part(
        carrier: &CMatrix,
        s: &CMatrix,
        mul_basis: &CMatrix,
    ) -> Result<Self> {
        let n = carrier.nrows();
        if mul_basis.nrows() != n {
            return Err(Error::ShapeMismatch("carrier vs mul ambient".into()));
        }
        if s.nrows() != carrier.ncols() || s.ncols() != carrier.ncols() {
            return Err(Error::ShapeMismatch("operator part vs carrier".into()));
        }
        let zeros_top = CMatrix::zeros(n, mul_basis.ncols());
        let top = crate::numerics::hstack(&carrier.clone_owned(), &zeros_top);
        let bottom = crate::numerics::hstack(&(carrier * s), &mul_basis.clone_owned());
        Self::from_graph_columns(&top, &bottom)
    }

    /// The purely multivalued relation {0} x M.
    pub fn pure_multivalued(n: usize) -> Self {
        LinearRelation::from_graph_columns(&CMatrix::zeros(n, n), &identity(n))
            .expect("matching shapes")
    }

    pub fn zero_operator(n: usize) -> Self {
        LinearRelation::from_operator(&CMatrix::zeros(n, n))
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    pub fn graph(&self) -> &Subspace {
        &self.graph
    }

    pub fn graph_dim(&self) -> usize {
        self.graph.dim()
    }

    /// First-component block of the graph basis.
    pub fn top(&self) -> CMatrix {
        self.graph
            .basis()
            .view((0, 0), (self.space_dim, self.graph.dim()))
            .into_owned()
    }

    /// Second-component block of the graph basis.
    pub fn bottom(&self) -> CMatrix {
        self.graph
            .basis()
            .view((self.space_dim, 0), (self.space_dim, self.graph.dim()))
            .into_owned()
    }

    pub fn parts(&self) -> RelationParts {
        let top = self.top();
        let bottom = self.bottom();
        let dom = orthonormal_column_basis(&top, DEFAULT_TOL);
        let ran = orthonormal_column_basis(&bottom, DEFAULT_TOL);
        let ker = orthonormal_column_basis(&(&top * nullspace(&bottom, DEFAULT_TOL)), DEFAULT_TOL);
        let mul = orthonormal_column_basis(&(&bottom * nullspace(&top, DEFAULT_TOL)), DEFAULT_TOL);
        RelationParts { dom, ran, ker, mul }
    }

    /// Adjoint relation: {g, g'} with (f', g) = (f, g') for all {f, f'}; the
    /// orthogonal complement of the flipped-negated graph.
    pub fn adjoint(&self) -> LinearRelation {
        let flipped = vstack(&self.bottom(), &(-self.top()));
        let graph = orthonormal_column_basis(&flipped, DEFAULT_TOL).complement();
        LinearRelation {
            space_dim: self.space_dim,
            graph,
        }
    }

    /// Component swap {f', f}.
    pub fn inverse(&self) -> LinearRelation {
        LinearRelation::from_graph_columns(&self.bottom(), &self.top()).expect("same shapes")
    }

    /// {f, -f'}.
    pub fn neg(&self) -> LinearRelation {
        LinearRelation::from_graph_columns(&self.top(), &(-self.bottom())).expect("same shapes")
    }

    /// R - lambda: {f, f' - lambda f}.
    pub fn scalar_shift(&self, lambda: C64) -> LinearRelation {
        let bottom = self.bottom() - self.top() * lambda;
        LinearRelation::from_graph_columns(&self.top(), &bottom).expect("same shapes")
    }

    /// R + B for a matrix B: {f, f' + B f}.
    pub fn operator_shift(&self, b: &CMatrix) -> LinearRelation {
        let bottom = self.bottom() + b * self.top();
        LinearRelation::from_graph_columns(&self.top(), &bottom).expect("same shapes")
    }

    /// lambda R: {f, lambda f'}. Note the graph dimension can drop at lambda = 0.
    pub fn scalar_mul(&self, lambda: C64) -> LinearRelation {
        LinearRelation::from_graph_columns(&self.top(), &(self.bottom() * lambda))
            .expect("same shapes")
    }

    /// Resolvent matrix (R - lambda)^{-1}, solved through the graph subspace.
    ///
    /// Requires ran(R - lambda) = M and ker(R - lambda) = {0}; the result B
    /// satisfies {B g, g + lambda B g} ∈ graph(R) for all g, and that
    /// membership residual is verified before returning.
    pub fn resolvent(&self, lambda: C64) -> Result<CMatrix> {
        self.resolvent_with_tol(lambda, 1e-8)
    }

    pub fn resolvent_with_tol(&self, lambda: C64, tol: f64) -> Result<CMatrix> {
        let n = self.space_dim;
        let top = self.top();
        let shifted_bottom = self.bottom() - &top * lambda;
        let ran = orthonormal_column_basis(&shifted_bottom, DEFAULT_TOL);
        if ran.dim() != n {
            return Err(Error::NotInResolventSet(lambda));
        }
        let ker = orthonormal_column_basis(
            &(&top * nullspace(&shifted_bottom, DEFAULT_TOL)),
            DEFAULT_TOL,
        );
        if ker.dim() != 0 {
            return Err(Error::NotInResolventSet(lambda));
        }
        let b = &top * pinv(&shifted_bottom, DEFAULT_TOL);
        // Graph membership residual of the columns {B e_i, e_i + lambda B e_i}.
        let stacked = vstack(&b, &(identity(n) + &b * lambda));
        let proj = self.graph.projector();
        let residual = op_norm(&(&stacked - proj * &stacked));
        let scale = op_norm(&stacked).max(1.0);
        if residual > tol * scale {
            return Err(Error::IllConditioned(residual / scale));
        }
        Ok(b)
    }

    /// Extracts the relation as an everywhere-defined single-valued operator.
    pub fn to_operator(&self, tol: f64) -> Result<CMatrix> {
        let top = self.top();
        let bottom = self.bottom();
        if orthonormal_column_basis(&top, DEFAULT_TOL).dim() != self.space_dim {
            return Err(Error::NotAnOperator(1.0));
        }
        let mul = orthonormal_column_basis(&(&bottom * nullspace(&top, DEFAULT_TOL)), DEFAULT_TOL);
        if mul.dim() != 0 {
            return Err(Error::NotAnOperator(mul.dim() as f64));
        }
        let a = &bottom * pinv(&top, DEFAULT_TOL);
        let stacked = vstack(&identity(self.space_dim), &a);
        let proj = self.graph.projector();
        let residual = op_norm(&(&stacked - proj * &stacked));
        if residual > tol * op_norm(&stacked).max(1.0) {
            return Err(Error::NotAnOperator(residual));
        }
        Ok(a)
    }

    pub fn is_selfadjoint(&self, tol: f64) -> bool {
        subspace_equal(&self.graph, &self.adjoint().graph, tol).unwrap_or(false)
    }

    /// Selfadjoint with Re(f', f) >= -tol on the span of graph pairs.
    pub fn is_nonnegative(&self, tol: f64) -> bool {
        if !self.is_selfadjoint(tol) {
            return false;
        }
        let gram = self.top().adjoint() * self.bottom();
        min_eig_hermitian(&herm_part(&gram)) >= -tol
    }

    pub fn is_nonpositive(&self, tol: f64) -> bool {
        if !self.is_selfadjoint(tol) {
            return false;
        }
        let gram = self.top().adjoint() * self.bottom();
        max_eig_hermitian(&herm_part(&gram)) <= tol
    }

    /// Cayley transform C(A) = -I + 2(A + I)^{-1} as the graph transform
    /// {f, f'} -> {f + f', f - f'}; an involution.
    pub fn cayley(&self) -> LinearRelation {
        let top = self.top() + self.bottom();
        let bottom = self.top() - self.bottom();
        LinearRelation::from_graph_columns(&top, &bottom).expect("same shapes")
    }

    /// Residual of (A - lambda)^{-1} = (1-lambda)^{-1}(T + I)(I - mu T)^{-1}
    /// with T = C(A), mu = (1+lambda)/(1-lambda), checked in both arrangements.
    pub fn verify_resolvent_connection(&self, lambda: C64) -> Result<f64> {
        if (lambda - cr(1.0)).norm() < 1e-8 || (lambda + cr(1.0)).norm() < 1e-8 {
            return Err(Error::BadPoint(lambda));
        }
        let lhs = self.resolvent(lambda)?;
        let t = self.cayley().to_operator(1e-8)?;
        let n = self.space_dim;
        let mu = (cr(1.0) + lambda) / (cr(1.0) - lambda);
        let inner = identity(n) - &t * mu;
        let rhs =
            (&t + identity(n)) * crate::numerics::solve_guarded(&inner, &identity(n))? / (cr(1.0) - lambda);
        let r1 = op_norm(&(&lhs - &rhs));
        let r2 = op_norm(&(&lhs * &inner * (cr(1.0) - lambda) - (&t + identity(n))));
        Ok(r1.max(r2))
    }

    /// Values (f', f) / ||f||^2 over seeded random graph pairs plus the graph
    /// basis pairs; pairs with ||f|| below tolerance are skipped.
    pub fn numerical_range(
        &self,
        samples: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<NumericalRangeSample> {
        let d = self.graph.dim();
        let parts = self.parts();
        if parts.dom.dim() == 0 {
            return Err(Error::EmptyDomain);
        }
        let top = self.top();
        let bottom = self.bottom();
        let mut values = Vec::new();
        let push = |coeff: &CVector, values: &mut Vec<C64>| {
            let f = &top * coeff;
            let fp = &bottom * coeff;
            let norm2 = f.norm_squared();
            if norm2 > 1e-16 {
                values.push(f.dotc(&fp) / cr(norm2));
            }
        };
        for i in 0..d {
            let mut e = CVector::zeros(d);
            e[i] = cr(1.0);
            push(&e, &mut values);
        }
        for _ in 0..samples {
            let coeff = seeded::random_unit_vector(rng, d);
            push(&coeff, &mut values);
        }
        Ok(NumericalRangeSample { values })
    }

    /// Operator part of a decomposable relation (dom ⟂ mul).
    pub fn operator_part(&self) -> Result<OperatorPartDecomposition> {
        let parts = self.parts();
        let overlap = op_norm(&(parts.dom.projector() * parts.mul.projector()));
        if overlap > 1e-8 {
            return Err(Error::NotDecomposable(overlap));
        }
        let carrier_sub = parts.mul.complement();
        let w = carrier_sub.basis().clone();
        let top_w = w.adjoint() * self.top();
        let bottom_w = w.adjoint() * self.bottom();
        // A_s in W-coordinates; zero on the orthocomplement of dom within W.
        let a_s = &bottom_w * pinv(&top_w, DEFAULT_TOL);
        Ok(OperatorPartDecomposition {
            mul_basis: parts.mul,
            carrier: w,
            operator_part: a_s,
            dom_basis: parts.dom,
        })
    }

    pub fn distance(&self, other: &LinearRelation) -> f64 {
        self.graph.distance(&other.graph)
    }
}

impl OperatorPartDecomposition {
    /// Rebuilds the relation Gr(A_s) ⊕ ({0} x mul).
    pub fn reassemble(&self) -> Result<LinearRelation> {
        LinearRelation::from_operator_part(
            &self.carrier,
            &self.operator_part,
            self.mul_basis.basis(),
        )
    }
}
