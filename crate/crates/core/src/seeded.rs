//! Deterministic seeded generators for test instances.
//!
//! All randomness flows through a ChaCha8 stream keyed by a caller-supplied
//! seed; uniform doubles are derived from raw 64-bit draws and Gaussians via
//! Box-Muller, so identical seeds give bit-identical instances across runs
//! and platforms.

use crate::families::StieltjesConstruction;
use crate::linrel::LinearRelation;
use crate::numerics::{
    c, cr, herm_part, op_norm, orthonormal_column_basis, CMatrix, CVector, DEFAULT_TOL,
};
use crate::rs::PassiveSelfadjointSystem;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in [0, 1) from the top 53 bits of a raw draw.
pub fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal via Box-Muller.
pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = loop {
        let u = uniform(rng);
        if u > 0.0 {
            break u;
        }
    };
    let u2 = uniform(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn random_complex_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c(gaussian(rng), gaussian(rng)))
}

pub fn random_unit_vector(rng: &mut ChaCha8Rng, n: usize) -> CVector {
    loop {
        let v = CVector::from_fn(n, |_, _| c(gaussian(rng), gaussian(rng)));
        let norm = v.norm();
        if norm > 1e-6 {
            return v / cr(norm);
        }
    }
}

/// Random contraction with operator norm uniformly drawn from [0.2, max_norm].
pub fn random_contraction(rng: &mut ChaCha8Rng, rows: usize, cols: usize, max_norm: f64) -> CMatrix {
    let a = random_complex_matrix(rng, rows, cols);
    let norm = op_norm(&a);
    if norm == 0.0 {
        return a;
    }
    let target = 0.2 + (max_norm - 0.2) * uniform(rng);
    a * cr(target / norm)
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    herm_part(&random_complex_matrix(rng, n, n))
}

pub fn random_hermitian_contraction(rng: &mut ChaCha8Rng, n: usize, max_norm: f64) -> CMatrix {
    let h = random_hermitian(rng, n);
    let norm = op_norm(&h);
    if norm == 0.0 {
        return h;
    }
    let target = 0.2 + (max_norm - 0.2) * uniform(rng);
    h * cr(target / norm)
}

pub fn random_psd(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let g = random_complex_matrix(rng, n, n);
    g.adjoint() * g
}

/// Random orthonormal basis of a dim-dimensional subspace of C^n.
pub fn random_subspace_basis(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> CMatrix {
    let g = random_complex_matrix(rng, n, dim);
    orthonormal_column_basis(&g, DEFAULT_TOL).basis().clone()
}

/// Random Hermitian contraction system operator split as M (dim m) + state K (dim k).
pub fn random_passive_system(rng: &mut ChaCha8Rng, m: usize, k: usize) -> PassiveSelfadjointSystem {
    let t = random_hermitian_contraction(rng, m + k, 0.98);
    PassiveSelfadjointSystem::new(t, m, DEFAULT_TOL).expect("seeded system is valid")
}

/// Random nonnegative selfadjoint relation: PSD operator part on a random
/// subspace, direct sum with a multivalued part with probability `p_mul`.
pub fn random_nonneg_selfadjoint_relation(
    rng: &mut ChaCha8Rng,
    n: usize,
    p_mul: f64,
) -> LinearRelation {
    let mul_dim = if n >= 2 && uniform(rng) < p_mul {
        1 + (rng.next_u64() as usize) % (n / 2)
    } else {
        0
    };
    let mul_basis = random_subspace_basis(rng, n, mul_dim);
    let w = orthonormal_column_basis(
        &(crate::numerics::identity(n) - &mul_basis * mul_basis.adjoint()),
        DEFAULT_TOL,
    );
    let wdim = w.dim();
    let s = random_psd(rng, wdim);
    LinearRelation::from_operator_part(w.basis(), &s, &mul_basis)
        .expect("seeded relation assembly")
}

/// Random general relation as the span of a random graph subspace.
pub fn random_relation(rng: &mut ChaCha8Rng, n: usize) -> LinearRelation {
    let dim = 1 + (rng.next_u64() as usize) % (2 * n - 1);
    let g = random_complex_matrix(rng, 2 * n, dim);
    LinearRelation::from_graph_subspace(n, orthonormal_column_basis(&g, DEFAULT_TOL))
        .expect("seeded graph")
}

/// Random construction (A_hat, V, Z) with optional restricted dom Z.
pub fn random_construction(
    rng: &mut ChaCha8Rng,
    m: usize,
    k: usize,
    p_mul: f64,
    restricted_dom: bool,
) -> StieltjesConstruction {
    let a_hat = random_nonneg_selfadjoint_relation(rng, k, p_mul);
    let v = random_contraction(rng, k, m, 0.95);
    let z = random_complex_matrix(rng, m, m);
    let dom_z = if restricted_dom && m >= 2 {
        let dim = 1 + (rng.next_u64() as usize) % (m - 1);
        Some(orthonormal_column_basis(
            &random_complex_matrix(rng, m, dim),
            DEFAULT_TOL,
        ))
    } else {
        None
    };
    StieltjesConstruction {
        a_hat,
        v,
        z: z * cr(0.5),
        dom_z,
    }
}
