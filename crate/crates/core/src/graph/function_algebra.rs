use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::graph::GraphAlgebra;
use crate::linalg::{column_space, max_principal_sine, reject, spectral_norm, SUBSPACE_THRESHOLD};
use crate::tolerance::Tolerance;

/// Threshold on `‖E_h Q‖₂` for an orthonormal `Q` to count as meeting `E_hV`.
pub const PROJECTION_THRESHOLD: f64 = 1e-6;

/// An element of the standard module `ℝ^X` with the entrywise product.
#[derive(Clone, Debug, PartialEq)]
pub struct StandardVector(pub DVector<f64>);

impl StandardVector {
    /// The characteristic vector `ŷ`.
    pub fn basis(n: usize, y: usize) -> Self {
        let mut v = DVector::zeros(n);
        v[y] = 1.0;
        Self(v)
    }

    /// The all-ones vector, the identity for `∘`.
    pub fn ones(n: usize) -> Self {
        Self(DVector::from_element(n, 1.0))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn circ(&self, other: &Self) -> Self {
        Self(self.0.component_mul(&other.0))
    }

    /// `E v`.
    pub fn project(&self, e: &DMatrix<f64>) -> Self {
        Self(e * &self.0)
    }
}

/// `u ⋆ v = E_j(u ∘ v)`.
pub fn norton_product(alg: &GraphAlgebra, j: usize, u: &StandardVector, v: &StandardVector) -> StandardVector {
    u.circ(v).project(&alg.e[j])
}

/// `(u ⋆ v) ⋆ w - u ⋆ (v ⋆ w)`.
pub fn associator(
    alg: &GraphAlgebra,
    j: usize,
    u: &StandardVector,
    v: &StandardVector,
    w: &StandardVector,
) -> StandardVector {
    let left = norton_product(alg, j, &norton_product(alg, j, u, v), w);
    let right = norton_product(alg, j, u, &norton_product(alg, j, v, w));
    StandardVector(left.0 - right.0)
}

/// Orthonormal basis of `E_jV`.
pub fn eigenspace(alg: &GraphAlgebra, j: usize) -> DMatrix<f64> {
    column_space(&alg.e[j])
}

/// Orthonormal basis of `span{u ∘ v}` over the columns of two matrices.
fn circ_span(left: &DMatrix<f64>, right: &DMatrix<f64>) -> DMatrix<f64> {
    let n = left.nrows();
    let mut cols = Vec::with_capacity(left.ncols() * right.ncols());
    for a in left.column_iter() {
        for b in right.column_iter() {
            cols.push(a.component_mul(&b));
        }
    }
    if cols.is_empty() {
        return DMatrix::zeros(n, 0);
    }
    column_space(&DMatrix::from_columns(&cols))
}

fn concat(parts: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let n = parts[0].nrows();
    let cols: Vec<DVector<f64>> = parts
        .iter()
        .flat_map(|m| m.column_iter().map(|c| c.into_owned()))
        .collect();
    if cols.is_empty() {
        return DMatrix::zeros(n, 0);
    }
    DMatrix::from_columns(&cols)
}

/// The positions `h` with `E_hV` inside `E_iV ∘ E_jV`.
#[derive(Clone, Debug, PartialEq)]
pub struct HadamardSpan {
    pub indices: Vec<usize>,
    /// `‖E_h Q‖₂` for an orthonormal basis `Q` of the span.
    pub projections: Vec<f64>,
    pub rank: usize,
    /// `‖Q - Σ_{h ∈ indices} E_h Q‖₂`, zero when the span is a sum of
    /// eigenspaces.
    pub leftover: f64,
}

pub fn hadamard_span_check(alg: &GraphAlgebra, i: usize, j: usize) -> HadamardSpan {
    let span = circ_span(&eigenspace(alg, i), &eigenspace(alg, j));
    let projections: Vec<f64> = alg.e.iter().map(|e| spectral_norm(&(e * &span))).collect();
    let indices: Vec<usize> = (0..projections.len())
        .filter(|&h| projections[h] > PROJECTION_THRESHOLD)
        .collect();
    let mut covered = span.clone();
    for &h in &indices {
        covered -= &alg.e[h] * &span;
    }
    HadamardSpan {
        indices,
        projections,
        rank: span.ncols(),
        leftover: spectral_norm(&covered),
    }
}

/// Whether the vectors `E_j ŷ` are pairwise distinct.
pub fn is_nondegenerate(alg: &GraphAlgebra, j: usize, tol: &Tolerance) -> bool {
    let e = &alg.e[j];
    let n = alg.n;
    let scale = e.diagonal().amax();
    (0..n).all(|y| {
        (y + 1..n).all(|z| {
            let d2 = e[(y, y)] + e[(z, z)] - 2.0 * e[(y, z)];
            !tol.is_zero(d2.max(0.0), scale)
        })
    })
}

/// Comparison at one level of the filtration.
#[derive(Clone, Debug, PartialEq)]
pub struct FiltrationLevel {
    pub level: usize,
    /// `dim Σ_{ℓ<=i} (E_1V)^{∘ℓ}`.
    pub product_dim: usize,
    /// `dim Σ_{ℓ<=i} E_ℓV`.
    pub target_dim: usize,
    pub sine: f64,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiltrationReport {
    pub ordering: Vec<usize>,
    pub levels: Vec<FiltrationLevel>,
    pub nondegenerate: bool,
    /// `max_i ‖(E_1V ∘ E_iV) ⊖ (E_{i-1}V + E_iV + E_{i+1}V)‖₂`.
    pub three_term_residual: f64,
    pub three_term: bool,
    /// Every filtration level matches.
    pub qpoly: bool,
    /// Nondegeneracy together with the three-term containment.
    pub nondegenerate_three_term: bool,
}

/// Compares `Σ_{ℓ<=i} E_ℓV` with `Σ_{ℓ<=i} (E_1V)^{∘ℓ}` at every level under
/// `ordering`, and separately tests nondegeneracy with the three-term
/// containment `E_1V ∘ E_iV ⊆ E_{i-1}V + E_iV + E_{i+1}V`.
pub fn filtration_qpoly_check(alg: &GraphAlgebra, ordering: &[usize], tol: &Tolerance) -> Result<FiltrationReport> {
    let re = alg.reordered(ordering)?;
    let d = re.diameter();
    let n = re.n;
    let bases: Vec<DMatrix<f64>> = (0..=d).map(|j| eigenspace(&re, j)).collect();
    let b1 = &bases[1];

    let mut levels = Vec::with_capacity(d + 1);
    let mut layer = DMatrix::from_element(n, 1, 1.0 / (n as f64).sqrt());
    let mut products = layer.clone();
    for i in 0..=d {
        if i > 0 {
            layer = circ_span(&layer, b1);
            products = column_space(&concat(&[&products, &layer]));
        }
        let parts: Vec<&DMatrix<f64>> = bases[..=i].iter().collect();
        let target = column_space(&concat(&parts));
        let sine = max_principal_sine(&target, &products).max(max_principal_sine(&products, &target));
        levels.push(FiltrationLevel {
            level: i,
            product_dim: products.ncols(),
            target_dim: target.ncols(),
            sine,
            equal: products.ncols() == target.ncols() && sine < SUBSPACE_THRESHOLD,
        });
    }

    let mut three_term_residual = 0.0_f64;
    for i in 0..=d {
        let span = circ_span(b1, &bases[i]);
        let lo = i.saturating_sub(1);
        let hi = (i + 1).min(d);
        let parts: Vec<&DMatrix<f64>> = bases[lo..=hi].iter().collect();
        let target = column_space(&concat(&parts));
        three_term_residual = three_term_residual.max(spectral_norm(&reject(&target, &span)));
    }
    let three_term = three_term_residual < PROJECTION_THRESHOLD;
    let nondegenerate = is_nondegenerate(&re, 1, tol);
    let qpoly = levels.iter().all(|l| l.equal);
    Ok(FiltrationReport {
        ordering: ordering.to_vec(),
        levels,
        nondegenerate,
        three_term_residual,
        three_term,
        qpoly,
        nondegenerate_three_term: nondegenerate && three_term,
    })
}
