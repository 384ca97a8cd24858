use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::duality::{aw_parameters, dual_structure, AWParams, TDParams};
use crate::error::Result;
use crate::graph::{GraphAlgebra, Subconstituent};
use crate::linalg::{
    column_space, krylov_closure, max_abs, rank_with_floor, reject, RANK_THRESHOLD, SUBSPACE_THRESHOLD,
};
use crate::residual::ResidualReport;
use crate::tmodules::decompose::restricted_commutant;
use crate::tmodules::primary::primary_module;
use crate::tolerance::Tolerance;

/// Outcome of testing the four tridiagonal-pair conditions on a module.
#[derive(Clone, Debug)]
pub struct TridiagonalPairRecord {
    pub dim: usize,
    pub endpoint: usize,
    pub dual_endpoint: usize,
    pub diameter: usize,
    pub dual_diameter: usize,
    /// `dim E_{τ+i} W`, the eigenspace ladder of `A`.
    pub eigen_dims: Vec<usize>,
    /// `dim E*_{ρ+i} W`, the eigenspace ladder of `A*`.
    pub dual_eigen_dims: Vec<usize>,
    pub irreducible: bool,
    /// Every eigenspace in both ladders is one-dimensional.
    pub leonard: bool,
    pub residuals: ResidualReport,
}

impl TridiagonalPairRecord {
    pub fn is_tridiagonal_pair(&self) -> bool {
        self.residuals.all_pass()
    }
}

fn ladder(q: &DMatrix<f64>, projectors: &[DMatrix<f64>]) -> (usize, Vec<DMatrix<f64>>) {
    let spaces: Vec<DMatrix<f64>> = projectors.iter().map(|p| column_space(&(q.transpose() * p * q))).collect();
    let dims: Vec<usize> = projectors
        .iter()
        .map(|p| rank_with_floor(&(p * q), SUBSPACE_THRESHOLD))
        .collect();
    let first = dims.iter().position(|&x| x > 0).unwrap_or(0);
    let last = dims.iter().rposition(|&x| x > 0).unwrap_or(0);
    (first, spaces[first..=last].to_vec())
}

fn hstack(parts: &[&DMatrix<f64>], rows: usize) -> DMatrix<f64> {
    let cols: Vec<DVector<f64>> = parts
        .iter()
        .flat_map(|m| m.column_iter().map(|c| c.into_owned()))
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(rows, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Max over `i` of the part of `X V_i` outside `V_{i-1} + V_i + V_{i+1}`.
fn flow_residual(x: &DMatrix<f64>, spaces: &[DMatrix<f64>]) -> f64 {
    let c = x.nrows();
    (0..spaces.len())
        .map(|i| {
            let lo = i.saturating_sub(1);
            let hi = (i + 1).min(spaces.len() - 1);
            let parts: Vec<&DMatrix<f64>> = spaces[lo..=hi].iter().collect();
            let nb = column_space(&hstack(&parts, c));
            max_abs(&reject(&nb, &(x * &spaces[i])))
        })
        .fold(0.0, f64::max)
}

/// Checks that `A` and `A*` act on the span of the orthonormal columns of
/// `basis` as a tridiagonal pair.
pub fn verify_tridiagonal_pair(
    alg: &GraphAlgebra,
    sub: &Subconstituent,
    basis: &DMatrix<f64>,
    seed: u64,
    tol: &Tolerance,
) -> TridiagonalPairRecord {
    let d = alg.diameter();
    let a = alg.adjacency();
    let astar = sub.dual_adjacency();
    let q = basis;
    let dim = q.ncols();
    let ar = q.transpose() * a * q;
    let asr = q.transpose() * &astar * q;
    let ascale = alg.spectral.k;
    let sscale = astar.diagonal().amax().max(1.0);
    let mut r = ResidualReport::new(tol);
    r.push_matrix("basis orthonormal", &(q.transpose() * q - DMatrix::identity(dim, dim)), 1.0);
    r.push_matrix("(i) A W ⊆ W", &reject(q, &(a * q)), ascale);
    r.push_matrix("(i) A* W ⊆ W", &reject(q, &(&astar * q)), sscale);
    r.push_matrix("(i) A|W symmetric", &(&ar - ar.transpose()), ascale);
    r.push_matrix("(i) A*|W symmetric", &(&asr - asr.transpose()), sscale);

    let estar: Vec<DMatrix<f64>> = (0..=d).map(|i| sub.estar_matrix(i)).collect();
    let (endpoint, dual_spaces) = ladder(q, &estar);
    let (dual_endpoint, spaces) = ladder(q, &alg.e);
    let eigen_dims: Vec<usize> = spaces.iter().map(DMatrix::ncols).collect();
    let dual_eigen_dims: Vec<usize> = dual_spaces.iter().map(DMatrix::ncols).collect();
    let covered: usize = eigen_dims.iter().sum();
    let dual_covered: usize = dual_eigen_dims.iter().sum();
    r.push_flag("(ii) eigenspaces of A span W", covered == dim);
    r.push_flag("(iii) eigenspaces of A* span W", dual_covered == dim);
    let fr = flow_residual(&asr, &spaces);
    r.push_values("(ii) A* V_i ⊆ V_{i-1} + V_i + V_{i+1}", fr, fr, sscale);
    let fr = flow_residual(&ar, &dual_spaces);
    r.push_values("(iii) A V*_i ⊆ V*_{i-1} + V*_i + V*_{i+1}", fr, fr, ascale);
    r.push_flag("(ii) d = δ", spaces.len() == dual_spaces.len());

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = DMatrix::from_fn(dim, 1, |_, _| rng.gen_range(-1.0..1.0));
    let krylov = krylov_closure(&[&ar, &asr], &start, RANK_THRESHOLD).ncols();
    let commutant_dim = restricted_commutant(q, a, &astar).ncols();
    let irreducible = krylov == dim && commutant_dim == 1;
    r.push_flag(format!("(iv) irreducible: Krylov rank {krylov} of {dim}, commutant dimension {commutant_dim}"), irreducible);

    let leonard = eigen_dims.iter().chain(&dual_eigen_dims).all(|&x| x == 1);
    TridiagonalPairRecord {
        dim,
        endpoint,
        dual_endpoint,
        diameter: dual_spaces.len().saturating_sub(1),
        dual_diameter: spaces.len().saturating_sub(1),
        eigen_dims,
        dual_eigen_dims,
        irreducible,
        leonard,
        residuals: r,
    }
}

/// Scalars and residuals of the tridiagonal and Askey–Wilson relations.
#[derive(Clone, Debug)]
pub struct RelationsReport {
    pub td: TDParams,
    pub aw: AWParams,
    pub residuals: ResidualReport,
}

/// `X² Y - β X Y X + Y X² - γ(X Y + Y X) - ϱ Y`.
fn td_bracket(x: &DMatrix<f64>, y: &DMatrix<f64>, beta: f64, gamma: f64, rho: f64) -> (DMatrix<f64>, f64) {
    let xy = x * y;
    let yx = y * x;
    let terms = [x * &xy, &xy * x * beta, &yx * x, (&xy + &yx) * gamma, y * rho];
    let scale = terms.iter().map(|t| max_abs(&(x * t)).max(max_abs(&(t * x)))).fold(0.0, f64::max);
    (&terms[0] - &terms[1] + &terms[2] - &terms[3] - &terms[4], scale)
}

/// Relative residual of `[X, X²Y - βXYX + YX² - γ(XY + YX) - ϱY] = 0`.
pub fn td_relation_residual(x: &DMatrix<f64>, y: &DMatrix<f64>, beta: f64, gamma: f64, rho: f64) -> f64 {
    let (inner, scale) = td_bracket(x, y, beta, gamma, rho);
    let comm = x * &inner - &inner * x;
    max_abs(&comm) / scale.max(f64::MIN_POSITIVE)
}

/// Checks both tridiagonal relations on the standard module and both
/// Askey–Wilson relations on the primary module.
pub fn verify_relations(alg: &GraphAlgebra, sub: &Subconstituent, tol: &Tolerance) -> Result<RelationsReport> {
    let qp = alg.structure()?;
    let ds = dual_structure(&alg.array, &alg.natural, &qp, tol)?;
    let td = ds.td;
    let aw = aw_parameters(&alg.array, &qp, &td, tol)?;
    let a = alg.adjacency();
    let astar = sub.dual_adjacency();
    let mut r = ResidualReport::new(tol);
    r.push_values("β = β*", (td.beta - td.beta_star).abs(), (td.beta - td.beta_star).abs(), td.beta.abs().max(1.0));

    let t1 = td_relation_residual(a, &astar, td.beta, td.gamma, td.rho);
    r.push_values("[A, A²A* - βAA*A + A*A² - γ(AA* + A*A) - ϱA*] = 0", t1, t1, 1.0);
    let t2 = td_relation_residual(&astar, a, td.beta, td.gamma_star, td.rho_star);
    r.push_values("[A*, A*²A - βA*AA* + AA*² - γ*(A*A + AA*) - ϱ*A] = 0", t2, t2, 1.0);

    let pm = primary_module(alg, sub, tol)?;
    let q = pm.orthonormal_basis();
    let ar = q.transpose() * a * &q;
    let asr = q.transpose() * &astar * &q;
    let id = DMatrix::identity(ar.nrows(), ar.nrows());
    let (lhs, s1) = td_bracket(&ar, &asr, td.beta, td.gamma, td.rho);
    let rhs = &ar * &ar * td.gamma_star + &ar * aw.omega + &id * aw.eta;
    r.push_matrix(
        "A²A* - βAA*A + A*A² - γ(AA* + A*A) - ϱA* = γ*A² + ωA + ηI",
        &(lhs - &rhs),
        s1.max(max_abs(&rhs)),
    );
    let (lhs, s2) = td_bracket(&asr, &ar, td.beta, td.gamma_star, td.rho_star);
    let rhs = &asr * &asr * td.gamma + &asr * aw.omega + &id * aw.eta_star;
    r.push_matrix(
        "A*²A - βA*AA* + AA*² - γ*(A*A + AA*) - ϱ*A = γA*² + ωA* + η*I",
        &(lhs - &rhs),
        s2.max(max_abs(&rhs)),
    );
    Ok(RelationsReport { td, aw, residuals: r })
}
