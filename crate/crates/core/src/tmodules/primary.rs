use nalgebra::{DMatrix, DVector};

use crate::array::intersection_numbers;
use crate::error::Result;
use crate::graph::{GraphAlgebra, Subconstituent};
use crate::linalg::max_abs;
use crate::residual::ResidualReport;
use crate::tolerance::Tolerance;

/// The primary module with its bases `1_i = A_i x̂` and `1*_i = n E_i x̂`.
#[derive(Clone, Debug)]
pub struct PrimaryModule {
    /// Columns `1_0, ..., 1_D`.
    pub basis1: DMatrix<f64>,
    /// Columns `1*_0, ..., 1*_D`.
    pub basis1star: DMatrix<f64>,
    /// Matrix of `A` on `{1_i}`, column `j` holding the coordinates of `A 1_j`.
    pub a_on_1: DMatrix<f64>,
    pub astar_on_1: DMatrix<f64>,
    pub a_on_1star: DMatrix<f64>,
    pub astar_on_1star: DMatrix<f64>,
    pub residuals: ResidualReport,
}

impl PrimaryModule {
    pub fn dim(&self) -> usize {
        self.basis1.ncols()
    }

    /// Orthonormal basis `1_i / √k_i`.
    pub fn orthonormal_basis(&self) -> DMatrix<f64> {
        let mut q = self.basis1.clone();
        for mut c in q.column_iter_mut() {
            let norm = c.norm();
            c /= norm;
        }
        q
    }
}

fn check(r: &mut ResidualReport, name: String, lhs: &DMatrix<f64>, rhs: &DMatrix<f64>) {
    let scale = max_abs(lhs).max(max_abs(rhs));
    r.push_matrix(name, &(lhs - rhs), scale);
}

fn check_vec(r: &mut ResidualReport, name: String, lhs: &DVector<f64>, rhs: &DVector<f64>) {
    let scale = lhs.amax().max(rhs.amax());
    r.push_values(name, (lhs - rhs).amax(), (lhs - rhs).norm(), scale);
}

/// Builds both bases, the four matrix representations, and checks the
/// actions of `E*_i, A*_i, E_i, A_i` on each basis vector.
pub fn primary_module(alg: &GraphAlgebra, sub: &Subconstituent, tol: &Tolerance) -> Result<PrimaryModule> {
    let d = alg.diameter();
    let n = alg.n;
    let nf = n as f64;
    let x = sub.x;
    let sp = &alg.spectral;
    let (k, m, u, theta) = (&sp.valencies, &sp.m, &sp.u, &sp.theta);
    let structure = alg.structure()?;
    let q = &structure.krein;
    let p = intersection_numbers(&alg.array);

    let basis1 = DMatrix::from_fn(n, d + 1, |y, i| sub.estar[i][y]);
    let basis1star = DMatrix::from_fn(n, d + 1, |y, i| nf * alg.e[i][(y, x)]);
    let a = &alg.a[1];
    let astar = sub.dual_adjacency();

    let coords1 = |v: &DMatrix<f64>| {
        let mut c = basis1.transpose() * v;
        for (i, mut row) in c.row_iter_mut().enumerate() {
            row /= k[i];
        }
        c
    };
    let coords1star = |v: &DMatrix<f64>| {
        let mut c = basis1star.transpose() * v;
        for (i, mut row) in c.row_iter_mut().enumerate() {
            row /= nf * m[i];
        }
        c
    };
    let a_on_1 = coords1(&(a * &basis1));
    let astar_on_1 = coords1(&(&astar * &basis1));
    let a_on_1star = coords1star(&(a * &basis1star));
    let astar_on_1star = coords1star(&(&astar * &basis1star));

    let mut r = ResidualReport::new(tol);
    let gram1 = basis1.transpose() * &basis1;
    check(&mut r, "<1_i, 1_j> = δ k_i".into(), &gram1, &DMatrix::from_diagonal(&DVector::from_column_slice(k)));
    let gram1s = basis1star.transpose() * &basis1star;
    let want = DMatrix::from_diagonal(&DVector::from_iterator(d + 1, m.iter().map(|mi| nf * mi)));
    check(&mut r, "<1*_i, 1*_j> = δ n m_i".into(), &gram1s, &want);
    let cross = basis1.transpose() * &basis1star;
    let want = DMatrix::from_fn(d + 1, d + 1, |i, j| k[i] * m[j] * u[i][j]);
    check(&mut r, "<1_i, 1*_j> = k_i m_j u_i(θ_j)".into(), &cross, &want);

    let to_star = DMatrix::from_fn(d + 1, d + 1, |i, j| k[j] * u[j][i] / nf);
    check(&mut r, "1_j = n⁻¹ k_j Σ u_j(θ_i) 1*_i".into(), &basis1, &(&basis1star * to_star));
    let to_one = DMatrix::from_fn(d + 1, d + 1, |i, j| m[j] * u[i][j]);
    check(&mut r, "1*_j = m_j Σ u_i(θ_j) 1_i".into(), &basis1star, &(&basis1 * to_one));

    let tri = DMatrix::from_fn(d + 1, d + 1, |i, j| p.get_f64(i, 1, j));
    let tri_star = DMatrix::from_fn(d + 1, d + 1, |i, j| q.get(i, 1, j));
    let ts = DMatrix::from_diagonal(&DVector::from_column_slice(&structure.theta_star));
    let th = DMatrix::from_diagonal(&DVector::from_column_slice(theta));
    check(&mut r, "A on {1_i} is the intersection matrix".into(), &(a * &basis1), &(&basis1 * &tri));
    check(&mut r, "A* on {1_i} is diag(θ*)".into(), &(&astar * &basis1), &(&basis1 * &ts));
    check(&mut r, "A on {1*_i} is diag(θ)".into(), &(a * &basis1star), &(&basis1star * &th));
    check(&mut r, "A* on {1*_i} is the dual intersection matrix".into(), &(&astar * &basis1star), &(&basis1star * &tri_star));

    let ones = DVector::from_element(n, 1.0);
    check_vec(&mut r, "1*_0 = 1".into(), &basis1star.column(0).into_owned(), &ones);
    let mut xhat = DVector::zeros(n);
    xhat[x] = 1.0;
    check_vec(&mut r, "1_0 = x̂".into(), &basis1.column(0).into_owned(), &xhat);

    let one = |j: usize| basis1.column(j).into_owned();
    let star = |j: usize| basis1star.column(j).into_owned();
    for i in 0..=d {
        let es = &sub.estar[i];
        let st = &sub.astar[i];
        for j in 0..=d {
            let tag = format!("(i={i}, j={j})");
            let delta = if i == j { 1.0 } else { 0.0 };
            check_vec(&mut r, format!("E*_i 1_j = δ 1_j {tag}"), &es.component_mul(&one(j)), &(one(j) * delta));
            check_vec(&mut r, format!("A*_i 1_j = m_i u_j(θ_i) 1_j {tag}"), &st.component_mul(&one(j)), &(one(j) * (m[i] * u[j][i])));
            let sum = (0..=d).fold(DVector::zeros(n), |acc, h| acc + one(h) * u[h][i]);
            check_vec(&mut r, format!("E_i 1_j = n⁻¹ m_i k_j u_j(θ_i) Σ u_h(θ_i) 1_h {tag}"), &(&alg.e[i] * one(j)), &(sum * (m[i] * k[j] * u[j][i] / nf)));
            let sum = (0..=d).fold(DVector::zeros(n), |acc, h| acc + one(h) * p.get_f64(h, i, j));
            check_vec(&mut r, format!("A_i 1_j = Σ p^h_ij 1_h {tag}"), &(&alg.a[i] * one(j)), &sum);

            check_vec(&mut r, format!("E_i 1*_j = δ 1*_j {tag}"), &(&alg.e[i] * star(j)), &(star(j) * delta));
            check_vec(&mut r, format!("A_i 1*_j = k_i u_i(θ_j) 1*_j {tag}"), &(&alg.a[i] * star(j)), &(star(j) * (k[i] * u[i][j])));
            let sum = (0..=d).fold(DVector::zeros(n), |acc, h| acc + star(h) * u[i][h]);
            check_vec(&mut r, format!("E*_i 1*_j = n⁻¹ k_i m_j u_i(θ_j) Σ u_i(θ_h) 1*_h {tag}"), &es.component_mul(&star(j)), &(sum * (k[i] * m[j] * u[i][j] / nf)));
            let sum = (0..=d).fold(DVector::zeros(n), |acc, h| acc + star(h) * q.get(h, i, j));
            check_vec(&mut r, format!("A*_i 1*_j = Σ q^h_ij 1*_h {tag}"), &st.component_mul(&star(j)), &sum);
        }
    }

    Ok(PrimaryModule {
        basis1,
        basis1star,
        a_on_1,
        astar_on_1,
        a_on_1star,
        astar_on_1star,
        residuals: r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Family;
    use crate::tmodules::test_support::{cube, graph_fixture};

    #[test]
    fn cube_representations() {
        let (_, alg, sub) = cube();
        let pm = primary_module(&alg, &sub, &Tolerance::default()).unwrap();
        assert!(pm.residuals.all_pass(), "{:?}", pm.residuals.failures().collect::<Vec<_>>());
        let tri = DMatrix::from_row_slice(4, 4, &[
            0.0, 3.0, 0.0, 0.0,
            1.0, 0.0, 2.0, 0.0,
            0.0, 2.0, 0.0, 1.0,
            0.0, 0.0, 3.0, 0.0,
        ]);
        assert!((&pm.a_on_1 - tri).amax() < 1e-12);
        let ds = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0, -1.0, -3.0]));
        assert!((&pm.astar_on_1 - &ds).amax() < 1e-12);
        assert!((&pm.a_on_1star - &ds).amax() < 1e-12);
    }

    #[test]
    fn johnson_actions() {
        let (_, alg, sub) = graph_fixture(Family::Johnson { n: 8, k: 3 }, 11);
        let pm = primary_module(&alg, &sub, &Tolerance::default()).unwrap();
        assert!(pm.residuals.all_pass(), "{:?}", pm.residuals.failures().collect::<Vec<_>>());
        let q = pm.orthonormal_basis();
        assert!((q.transpose() * &q - DMatrix::identity(4, 4)).amax() < 1e-12);
    }
}
