use crate::array::IntersectionArray;
use crate::duality::qpoly::QPolyStructure;
use crate::duality::recurrence::TDParams;
use crate::error::{Error, Result};
use crate::tolerance::{max_abs, Tolerance};

/// Askey–Wilson scalars with the spread of their values across `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct AWParams {
    pub omega: f64,
    pub eta: f64,
    pub eta_star: f64,
    /// Max deviation of `ω` computed at each admissible `i`, both forms.
    pub omega_residual: f64,
    pub eta_residual: f64,
    pub eta_star_residual: f64,
}

impl AWParams {
    pub fn max_residual(&self) -> f64 {
        self.omega_residual
            .max(self.eta_residual)
            .max(self.eta_star_residual)
    }
}

struct Extended<'a> {
    seq: &'a [f64],
    lo: f64,
    hi: f64,
}

impl Extended<'_> {
    fn at(&self, i: isize) -> f64 {
        if i < 0 {
            self.lo
        } else if i as usize >= self.seq.len() {
            self.hi
        } else {
            self.seq[i as usize]
        }
    }
}

pub fn aw_parameters(
    ia: &IntersectionArray,
    qp: &QPolyStructure,
    td: &TDParams,
    tol: &Tolerance,
) -> Result<AWParams> {
    let d = ia.diameter();
    let a = ia.a_f64();
    let a_star = &qp.dual.a;
    let th = Extended {
        seq: &qp.theta,
        lo: td.theta_minus1,
        hi: td.theta_dplus1,
    };
    let ts = Extended {
        seq: &qp.theta_star,
        lo: td.theta_star_minus1,
        hi: td.theta_star_dplus1,
    };
    let coef = |xs: &[f64], i: isize| if i < 0 { 0.0 } else { xs[i as usize] };

    let omega_i = |i: isize| {
        coef(a_star, i) * (th.at(i) - th.at(i + 1))
            + coef(a_star, i - 1) * (th.at(i - 1) - th.at(i - 2))
            - td.gamma_star * (th.at(i - 1) + th.at(i))
    };
    let omega_dual_i = |i: isize| {
        coef(&a, i) * (ts.at(i) - ts.at(i + 1))
            + coef(&a, i - 1) * (ts.at(i - 1) - ts.at(i - 2))
            - td.gamma * (ts.at(i - 1) + ts.at(i))
    };
    let omega = omega_i(1);
    let omega_residual = (1..=d as isize)
        .map(|i| (omega_i(i) - omega).abs().max((omega_dual_i(i) - omega).abs()))
        .fold(0.0, f64::max);

    let eta_i = |i: isize| {
        let t = th.at(i);
        coef(a_star, i) * (t - th.at(i - 1)) * (t - th.at(i + 1)) - omega * t - td.gamma_star * t * t
    };
    let eta_star_i = |i: isize| {
        let t = ts.at(i);
        coef(&a, i) * (t - ts.at(i - 1)) * (t - ts.at(i + 1)) - omega * t - td.gamma * t * t
    };
    let eta = eta_i(0);
    let eta_star = eta_star_i(0);
    let eta_residual = (0..=d as isize)
        .map(|i| (eta_i(i) - eta).abs())
        .fold(0.0, f64::max);
    let eta_star_residual = (0..=d as isize)
        .map(|i| (eta_star_i(i) - eta_star).abs())
        .fold(0.0, f64::max);

    let s = max_abs(&qp.theta).max(max_abs(&qp.theta_star)).max(1.0);
    let c = max_abs(&a).max(max_abs(a_star)).max(1.0);
    let scale = s * s * s * c;
    let params = AWParams {
        omega,
        eta,
        eta_star,
        omega_residual,
        eta_residual,
        eta_star_residual,
    };
    if !tol.is_zero(params.max_residual(), scale) {
        return Err(Error::Inconsistent(format!(
            "Askey–Wilson scalars vary with i: residuals ω {omega_residual:e}, η {eta_residual:e}, η* {eta_star_residual:e}"
        )));
    }
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::parse_array;
    use crate::duality::qpoly::{dual_structure, qpoly_orderings_direct};
    use crate::spectral::spectral_data;

    fn aw(text: &str) -> Vec<AWParams> {
        let tol = Tolerance::default();
        let ia = parse_array(text).unwrap();
        let sp = spectral_data(&ia, &tol).unwrap();
        qpoly_orderings_direct(&ia, &sp, &tol)
            .unwrap()
            .iter()
            .map(|qp| {
                let ds = dual_structure(&ia, &sp, qp, &tol).unwrap();
                aw_parameters(&ia, qp, &ds.td, &tol).unwrap()
            })
            .collect()
    }

    #[test]
    fn cube_scalars_vanish() {
        let p = &aw("3,2,1;1,2,3")[0];
        assert!(p.omega.abs() < 1e-12 && p.eta.abs() < 1e-12 && p.eta_star.abs() < 1e-12);
    }

    #[test]
    fn johnson_scalars_consistent_across_i() {
        let ps = aw("15,8,3;1,4,9");
        assert!(!ps.is_empty());
        for p in ps {
            assert!(p.max_residual() < 1e-8, "{p:?}");
        }
    }

    #[test]
    fn eta_at_zero_has_no_dual_intersection_term() {
        let tol = Tolerance::default();
        let ia = parse_array("6,4,2;1,2,3").unwrap();
        let sp = spectral_data(&ia, &tol).unwrap();
        let qp = &qpoly_orderings_direct(&ia, &sp, &tol).unwrap()[0];
        let ds = dual_structure(&ia, &sp, qp, &tol).unwrap();
        let p = aw_parameters(&ia, qp, &ds.td, &tol).unwrap();
        let t0 = qp.theta[0];
        assert!((p.eta - (-p.omega * t0 - ds.td.gamma_star * t0 * t0)).abs() < 1e-12);
    }
}
