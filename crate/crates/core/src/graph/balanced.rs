use nalgebra::DVector;

use crate::array::intersection_numbers;
use crate::graph::function_algebra::is_nondegenerate;
use crate::graph::{Graph, GraphAlgebra};
use crate::residual::ResidualReport;
use crate::tolerance::Tolerance;

/// A vertex pair and cell where the balanced-set identity fails.
#[derive(Clone, Debug, PartialEq)]
pub struct BalancedWitness {
    pub y: usize,
    pub z: usize,
    pub h: usize,
    pub i: usize,
    pub j: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BalancedSetReport {
    /// Position of the idempotent in the algebra's ordering.
    pub idempotent: usize,
    /// `θ*_i = m u_i(θ)` for that idempotent.
    pub theta_star: Vec<f64>,
    /// False when the idempotent is degenerate and the check does not apply.
    pub applicable: bool,
    /// Max over `(y, z, i, j)` of the full identity residual.
    pub max_residual: f64,
    pub witness: Option<BalancedWitness>,
    /// Max distance of `Σ_{Γ(y)∩Γ_2(z)} Eŵ - Σ_{Γ_2(y)∩Γ(z)} Eŵ` from
    /// `span(Eŷ - Eẑ)`.
    pub weak_residual: f64,
    pub weak_witness: Option<(usize, usize, f64)>,
    pub residuals: ResidualReport,
}

impl BalancedSetReport {
    pub fn holds(&self) -> bool {
        self.applicable && self.witness.is_none() && self.weak_witness.is_none()
    }
}

/// Evaluates
/// `Σ_{w∈Γ_i(y)∩Γ_j(z)} Eŵ - Σ_{w∈Γ_j(y)∩Γ_i(z)} Eŵ
///  - p^h_ij (θ*_i - θ*_j)/(θ*_0 - θ*_h) (Eŷ - Eẑ)`
/// over all distinct `y, z` and all `i, j`, where `E` sits at position
/// `idempotent` of the algebra's ordering.
pub fn balanced_set_check(g: &Graph, alg: &GraphAlgebra, idempotent: usize, tol: &Tolerance) -> BalancedSetReport {
    let d = alg.diameter();
    let n = alg.n;
    let s = d + 1;
    let e = &alg.e[idempotent];
    let m = alg.spectral.m[idempotent];
    let theta_star: Vec<f64> = (0..=d).map(|i| m * alg.spectral.u[i][idempotent]).collect();
    let mut report = BalancedSetReport {
        idempotent,
        theta_star: theta_star.clone(),
        applicable: false,
        max_residual: 0.0,
        witness: None,
        weak_residual: 0.0,
        weak_witness: None,
        residuals: ResidualReport::new(tol),
    };
    if !is_nondegenerate(alg, idempotent, tol) {
        report.residuals.push_flag("E nondegenerate", false);
        return report;
    }
    report.applicable = true;
    report.residuals.push_flag("E nondegenerate", true);

    let p = intersection_numbers(&alg.array);
    let cols: Vec<DVector<f64>> = (0..n).map(|w| e.column(w).into_owned()).collect();
    let mut cells = vec![DVector::<f64>::zeros(n); s * s];
    for y in 0..n {
        for z in y + 1..n {
            let h = g.distance(y, z);
            cells.iter_mut().for_each(|c| c.fill(0.0));
            for w in 0..n {
                cells[g.distance(y, w) * s + g.distance(z, w)] += &cols[w];
            }
            let diff = &cols[y] - &cols[z];
            let denom = theta_star[0] - theta_star[h];
            for i in 0..=d {
                for j in 0..=d {
                    let lhs = &cells[i * s + j] - &cells[j * s + i];
                    let coef = p.get_f64(h, i, j) * (theta_star[i] - theta_star[j]) / denom;
                    let r = (&lhs - &diff * coef).amax();
                    report.max_residual = report.max_residual.max(r);
                    let scale = cells[i * s + j].amax().max(cells[j * s + i].amax());
                    if report.witness.is_none() && !tol.is_zero(r, scale) {
                        report.witness = Some(BalancedWitness { y, z, h, i, j, residual: r });
                    }
                }
            }
            if d >= 2 {
                let v = &cells[s + 2] - &cells[2 * s + 1];
                let t = v.dot(&diff) / diff.norm_squared();
                let r = (&v - &diff * t).amax();
                report.weak_residual = report.weak_residual.max(r);
                if report.weak_witness.is_none() && !tol.is_zero(r, v.amax()) {
                    report.weak_witness = Some((y, z, r));
                }
            }
        }
    }
    let full_ok = report.witness.is_none();
    let weak_ok = report.weak_witness.is_none();
    report.residuals.push_values("balanced set identity", report.max_residual, report.max_residual, 0.0);
    report.residuals.entries.last_mut().unwrap().passed = full_ok;
    report.residuals.push_values("weak balanced set condition", report.weak_residual, report.weak_residual, 0.0);
    report.residuals.entries.last_mut().unwrap().passed = weak_ok;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duality::qpoly_orderings_direct;
    use crate::graph::test_support::fixture;
    use crate::graph::Family;

    #[test]
    fn cube_first_idempotent() {
        let (g, alg, _) = fixture(Family::Hypercube { d: 3 }, 0);
        let r = balanced_set_check(&g, &alg, 1, &Tolerance::default());
        assert!(r.applicable && r.holds(), "{r:?}");
        assert!(r.max_residual < 1e-9);
    }

    #[test]
    fn equal_indices_vanish_exactly() {
        let (g, alg, _) = fixture(Family::Hypercube { d: 3 }, 0);
        let e = &alg.e[1];
        for (y, z) in [(0, 1), (0, 3), (2, 7)] {
            for i in 0..=3 {
                let mut a = DVector::zeros(8);
                let mut b = DVector::zeros(8);
                for w in 0..8 {
                    if g.distance(y, w) == i && g.distance(z, w) == i {
                        a += e.column(w);
                        b += e.column(w);
                    }
                }
                assert_eq!((a - b).amax(), 0.0);
            }
        }
    }

    #[test]
    fn degenerate_idempotent_not_applicable() {
        let (g, alg, _) = fixture(Family::Hypercube { d: 3 }, 0);
        let r = balanced_set_check(&g, &alg, 2, &Tolerance::default());
        assert!(!r.applicable && !r.holds());
    }

    #[test]
    fn johnson_non_qpoly_idempotent_has_witness() {
        let tol = Tolerance::default();
        let (g, alg, _) = fixture(Family::Johnson { n: 8, k: 3 }, 0);
        let generators: Vec<usize> = qpoly_orderings_direct(&alg.array, &alg.natural, &tol)
            .unwrap()
            .iter()
            .map(|q| q.generator())
            .collect();
        let mut tested = 0;
        for j in (1..=3).filter(|j| !generators.contains(j)) {
            let r = balanced_set_check(&g, &alg, j, &tol);
            if r.applicable {
                let w = r.witness.clone().expect("identity must fail");
                assert_eq!(g.distance(w.y, w.z), w.h);
                tested += 1;
            }
        }
        assert!(tested > 0);
        for &j in &generators {
            assert!(balanced_set_check(&g, &alg, j, &tol).holds());
        }
    }
}
