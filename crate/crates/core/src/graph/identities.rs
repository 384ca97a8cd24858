use nalgebra::DMatrix;

use crate::array::intersection_numbers;
use crate::error::Result;
use crate::graph::{GraphAlgebra, Subconstituent};
use crate::linalg::max_abs;
use crate::residual::ResidualReport;
use crate::tolerance::Tolerance;

fn check(r: &mut ResidualReport, name: String, lhs: &DMatrix<f64>, rhs: &DMatrix<f64>) {
    let scale = max_abs(lhs).max(max_abs(rhs));
    r.push_matrix(name, &(lhs - rhs), scale);
}

/// Evaluates the reduction rules, the `e_0` identities and the triple-product
/// criteria for the algebra at base vertex `sub.x`.
pub fn verify_identities(alg: &GraphAlgebra, sub: &Subconstituent, tol: &Tolerance) -> Result<ResidualReport> {
    let d = alg.diameter();
    let n = alg.n as f64;
    let inv = 1.0 / n;
    let sp = &alg.spectral;
    let k = &sp.valencies;
    let m = &sp.m;
    let u = &sp.u;
    let p = intersection_numbers(&alg.array);
    let q = alg.krein()?;
    let a = &alg.a;
    let e = &alg.e;
    let es: Vec<DMatrix<f64>> = (0..=d).map(|i| sub.estar_matrix(i)).collect();
    let st: Vec<DMatrix<f64>> = (0..=d).map(|i| sub.astar_matrix(i)).collect();
    let (e0, es0) = (&e[0], &es[0]);
    let zero = DMatrix::<f64>::zeros(alg.n, alg.n);
    let delta = |i: usize, j: usize, x: &DMatrix<f64>| if i == j { x.clone() } else { zero.clone() };
    let mut r = ResidualReport::new(tol);

    check(&mut r, "n E*_0 E_0 E*_0 = E*_0".into(), &(es0 * e0 * es0 * n), es0);
    check(&mut r, "n E_0 E*_0 E_0 = E_0".into(), &(e0 * es0 * e0 * n), e0);

    for i in 0..=d {
        check(&mut r, format!("E_0 E*_0 A_{i} = E_0 E*_{i}"), &(e0 * es0 * &a[i]), &(e0 * &es[i]));
        check(&mut r, format!("E*_0 E_0 E*_{i} = n⁻¹ E*_0 A_{i}"), &(es0 * e0 * &es[i]), &(es0 * &a[i] * inv));
        check(&mut r, format!("A_{i} E*_0 E_0 = E*_{i} E_0"), &(&a[i] * es0 * e0), &(&es[i] * e0));
        check(&mut r, format!("E*_{i} E_0 E*_0 = n⁻¹ A_{i} E*_0"), &(&es[i] * e0 * es0), &(&a[i] * es0 * inv));
        check(&mut r, format!("E*_0 E_0 A*_{i} = E*_0 E_{i}"), &(es0 * e0 * &st[i]), &(es0 * &e[i]));
        check(&mut r, format!("E_0 E*_0 E_{i} = n⁻¹ E_0 A*_{i}"), &(e0 * es0 * &e[i]), &(e0 * &st[i] * inv));
        check(&mut r, format!("A*_{i} E_0 E*_0 = E_{i} E*_0"), &(&st[i] * e0 * es0), &(&e[i] * es0));
        check(&mut r, format!("E_{i} E*_0 E_0 = n⁻¹ A*_{i} E_0"), &(&e[i] * es0 * e0), &(&st[i] * e0 * inv));
        check(&mut r, format!("E_0 E*_{i} E_0 = n⁻¹ k_{i} E_0"), &(e0 * &es[i] * e0), &(e0 * (k[i] * inv)));
        check(&mut r, format!("E*_0 E_{i} E*_0 = n⁻¹ m_{i} E*_0"), &(es0 * &e[i] * es0), &(es0 * (m[i] * inv)));
    }

    for i in 0..=d {
        for j in 0..=d {
            let p_sum = |left: bool| {
                (0..=d).fold(zero.clone(), |acc, h| {
                    let t = if left { e0 * &es[h] } else { &es[h] * e0 };
                    acc + t * p.get_f64(h, i, j)
                })
            };
            let q_sum = |left: bool| {
                (0..=d).fold(zero.clone(), |acc, h| {
                    let t = if left { es0 * &e[h] } else { &e[h] * es0 };
                    acc + t * q.get(h, i, j)
                })
            };
            let tag = format!("(i={i}, j={j})");

            check(&mut r, format!("E_0 A*_i E_j = δ E_0 A*_i {tag}"), &(e0 * &st[i] * &e[j]), &delta(i, j, &(e0 * &st[i])));
            check(&mut r, format!("E_0 E*_i E_j = n⁻¹ k_i u_i(θ_j) E_0 A*_j {tag}"), &(e0 * &es[i] * &e[j]), &(e0 * &st[j] * (inv * k[i] * u[i][j])));
            check(&mut r, format!("E_0 A*_i A_j = k_j u_j(θ_i) E_0 A*_i {tag}"), &(e0 * &st[i] * &a[j]), &(e0 * &st[i] * (k[j] * u[j][i])));
            check(&mut r, format!("E_0 E*_i A_j = Σ p^h_ij E_0 E*_h {tag}"), &(e0 * &es[i] * &a[j]), &p_sum(true));

            check(&mut r, format!("E*_0 A_i E*_j = δ E*_0 A_i {tag}"), &(es0 * &a[i] * &es[j]), &delta(i, j, &(es0 * &a[i])));
            check(&mut r, format!("E*_0 E_i E*_j = n⁻¹ m_i u_j(θ_i) E*_0 A_j {tag}"), &(es0 * &e[i] * &es[j]), &(es0 * &a[j] * (inv * m[i] * u[j][i])));
            check(&mut r, format!("E*_0 A_i A*_j = m_j u_i(θ_j) E*_0 A_i {tag}"), &(es0 * &a[i] * &st[j]), &(es0 * &a[i] * (m[j] * u[i][j])));
            check(&mut r, format!("E*_0 E_i A*_j = Σ q^h_ij E*_0 E_h {tag}"), &(es0 * &e[i] * &st[j]), &q_sum(true));

            check(&mut r, format!("E_j A*_i E_0 = δ A*_i E_0 {tag}"), &(&e[j] * &st[i] * e0), &delta(i, j, &(&st[i] * e0)));
            check(&mut r, format!("E_j E*_i E_0 = n⁻¹ k_i u_i(θ_j) A*_j E_0 {tag}"), &(&e[j] * &es[i] * e0), &(&st[j] * e0 * (inv * k[i] * u[i][j])));
            check(&mut r, format!("A_j A*_i E_0 = k_j u_j(θ_i) A*_i E_0 {tag}"), &(&a[j] * &st[i] * e0), &(&st[i] * e0 * (k[j] * u[j][i])));
            check(&mut r, format!("A_j E*_i E_0 = Σ p^h_ij E*_h E_0 {tag}"), &(&a[j] * &es[i] * e0), &p_sum(false));

            check(&mut r, format!("E*_j A_i E*_0 = δ A_i E*_0 {tag}"), &(&es[j] * &a[i] * es0), &delta(i, j, &(&a[i] * es0)));
            check(&mut r, format!("E*_j E_i E*_0 = n⁻¹ m_i u_j(θ_i) A_j E*_0 {tag}"), &(&es[j] * &e[i] * es0), &(&a[j] * es0 * (inv * m[i] * u[j][i])));
            check(&mut r, format!("A*_j A_i E*_0 = m_j u_i(θ_j) A_i E*_0 {tag}"), &(&st[j] * &a[i] * es0), &(&a[i] * es0 * (m[j] * u[i][j])));
            check(&mut r, format!("A*_j E_i E*_0 = Σ q^h_ij E_h E*_0 {tag}"), &(&st[j] * &e[i] * es0), &q_sum(false));

            check(&mut r, format!("A_i E*_0 A_j = n E*_i E_0 E*_j {tag}"), &(&a[i] * es0 * &a[j]), &(&es[i] * e0 * &es[j] * n));
            check(&mut r, format!("E_i E*_0 A_j = A*_i E_0 E*_j {tag}"), &(&e[i] * es0 * &a[j]), &(&st[i] * e0 * &es[j]));
            check(&mut r, format!("A_i E*_0 E_j = E*_i E_0 A*_j {tag}"), &(&a[i] * es0 * &e[j]), &(&es[i] * e0 * &st[j]));
            check(&mut r, format!("E_i E*_0 E_j = n⁻¹ A*_i E_0 A*_j {tag}"), &(&e[i] * es0 * &e[j]), &(&st[i] * e0 * &st[j] * inv));
        }
    }

    let e0c = &sub.e0;
    check(&mut r, "e0 E*-form = E-form".into(), e0c, &sub.e0_dual_form);
    check(&mut r, "e0² = e0".into(), &(e0c * e0c), e0c);
    check(&mut r, "E_0 e0 = E_0".into(), &(e0 * e0c), e0);
    check(&mut r, "E*_0 e0 = E*_0".into(), &(es0 * e0c), es0);
    check(&mut r, "e0 A = A e0".into(), &(e0c * &a[1]), &(&a[1] * e0c));
    check(&mut r, "e0 A* = A* e0".into(), &(e0c * &st[1]), &(&st[1] * e0c));

    for h in 0..=d {
        for i in 0..=d {
            for j in 0..=d {
                let tag = format!("(h={h}, i={i}, j={j})");
                let primal = (&es[h] * &a[i] * &es[j]).norm_squared();
                let phij = p.get_f64(h, i, j);
                r.push_scalar(format!("‖E*_h A_i E*_j‖² = k_h p^h_ij {tag}"), primal - k[h] * phij, k[h] * phij);
                let primal_zero = tol.is_zero(primal.sqrt(), 1.0);
                r.push_flag(format!("E*_h A_i E*_j = 0 ⇔ p^h_ij = 0 {tag}"), primal_zero == (phij == 0.0));

                let dual = (&e[h] * &st[i] * &e[j]).norm_squared();
                let qhij = q.get(h, i, j);
                r.push_scalar(format!("‖E_h A*_i E_j‖² = m_h q^h_ij {tag}"), dual - m[h] * qhij, m[h] * qhij.abs());
                let dual_zero = tol.is_zero(dual.sqrt(), 1.0);
                r.push_flag(format!("E_h A*_i E_j = 0 ⇔ q^h_ij = 0 {tag}"), dual_zero == q.is_zero(h, i, j, tol));
            }
        }
    }
    Ok(r)
}
