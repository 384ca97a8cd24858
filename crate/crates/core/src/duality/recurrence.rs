use crate::error::{Error, Result};
use crate::tolerance::{max_abs, Tolerance};

/// Classification of a real sequence `θ_0..θ_D` by the three-term
/// recurrence calculus.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceClass {
    pub recurrent: bool,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub rho: Option<f64>,
    /// `θ_{-1}` and `θ_{D+1}` from extending the `(β, γ)` recurrence.
    pub extended: Option<(f64, f64)>,
    /// Max residual of `(2-β)θ_i² - 2γθ_i - ϱ = (θ_i - θ_{i-1})(θ_i - θ_{i+1})`.
    pub handy_residual: Option<f64>,
    /// Why classification stopped early, if it did.
    pub reason: Option<String>,
}

impl RecurrenceClass {
    fn stop(recurrent: bool, beta: Option<f64>, gamma: Option<f64>, reason: String) -> Self {
        Self {
            recurrent,
            beta,
            gamma,
            rho: None,
            extended: None,
            handy_residual: None,
            reason: Some(reason),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.rho.is_some()
    }
}

/// `θ_{i-1} - β θ_i + θ_{i+1}` for `1 <= i <= D-1`.
fn gammas(seq: &[f64], beta: f64) -> Vec<f64> {
    (1..seq.len() - 1)
        .map(|i| seq[i - 1] - beta * seq[i] + seq[i + 1])
        .collect()
}

/// `ϱ_i = θ_{i-1}² - β θ_{i-1} θ_i + θ_i² - γ(θ_{i-1} + θ_i)`.
fn rho_at(seq: &[f64], i: usize, beta: f64, gamma: f64) -> f64 {
    let (x, y) = (seq[i - 1], seq[i]);
    x * x - beta * x * y + y * y - gamma * (x + y)
}

pub fn recurrence_classify(seq: &[f64], tol: &Tolerance) -> RecurrenceClass {
    let d = seq.len() - 1;
    let scale = max_abs(seq).max(1.0);

    if d < 3 {
        return RecurrenceClass::stop(false, None, None, "sequence shorter than four terms".into());
    }
    for i in 2..d {
        if tol.is_zero(seq[i - 1] - seq[i], scale) {
            return RecurrenceClass::stop(
                false,
                None,
                None,
                format!("θ_{} = θ_{}", i - 1, i),
            );
        }
    }
    let quotients: Vec<f64> = (2..d)
        .map(|i| (seq[i - 2] - seq[i + 1]) / (seq[i - 1] - seq[i]))
        .collect();
    let q0 = quotients[0];
    if let Some((off, q)) = quotients
        .iter()
        .enumerate()
        .find(|(_, q)| !tol.eq(**q, q0, q0))
    {
        return RecurrenceClass::stop(
            false,
            None,
            None,
            format!("quotient {q} at i = {} differs from {q0} at i = 2", off + 2),
        );
    }
    let beta = q0 - 1.0;

    let g = gammas(seq, beta);
    let gamma = g[0];
    let gscale = scale * (2.0 + beta.abs());
    if let Some((off, x)) = g.iter().enumerate().find(|(_, x)| !tol.eq(**x, gamma, gscale)) {
        return RecurrenceClass::stop(
            true,
            Some(beta),
            None,
            format!("γ_{} = {x} differs from γ_1 = {gamma}", off + 1),
        );
    }

    let rho = rho_at(seq, 1, beta, gamma);
    let rscale = scale * scale * (2.0 + beta.abs()) + 2.0 * gamma.abs() * scale;
    for i in 2..=d {
        let r = rho_at(seq, i, beta, gamma);
        if !tol.eq(r, rho, rscale) {
            return RecurrenceClass::stop(
                true,
                Some(beta),
                Some(gamma),
                format!("ϱ_{i} = {r} differs from ϱ_1 = {rho}"),
            );
        }
    }

    let lo = gamma + beta * seq[0] - seq[1];
    let hi = gamma + beta * seq[d] - seq[d - 1];
    let at = |i: isize| -> f64 {
        if i < 0 {
            lo
        } else if i as usize > d {
            hi
        } else {
            seq[i as usize]
        }
    };
    let handy = (0..=d as isize)
        .map(|i| {
            let t = at(i);
            let lhs = (2.0 - beta) * t * t - 2.0 * gamma * t - rho;
            let rhs = (t - at(i - 1)) * (t - at(i + 1));
            (lhs - rhs).abs()
        })
        .fold(0.0, f64::max);

    RecurrenceClass {
        recurrent: true,
        beta: Some(beta),
        gamma: Some(gamma),
        rho: Some(rho),
        extended: Some((lo, hi)),
        handy_residual: Some(handy),
        reason: None,
    }
}

/// Tridiagonal-relation scalars of a Q-polynomial structure.
#[derive(Clone, Debug, PartialEq)]
pub struct TDParams {
    pub beta: f64,
    /// `β` recovered from the dual sequence.
    pub beta_star: f64,
    pub gamma: f64,
    pub gamma_star: f64,
    pub rho: f64,
    pub rho_star: f64,
    pub theta_minus1: f64,
    pub theta_dplus1: f64,
    pub theta_star_minus1: f64,
    pub theta_star_dplus1: f64,
    /// Max over `i` of `|P(θ_{i-1}, θ_i)|` and `|P*(θ*_{i-1}, θ*_i)|`.
    pub residual: f64,
}

impl TDParams {
    /// `P(λ, μ) = λ² - βλμ + μ² - γ(λ + μ) - ϱ`.
    pub fn p(&self, lambda: f64, mu: f64) -> f64 {
        lambda * lambda - self.beta * lambda * mu + mu * mu - self.gamma * (lambda + mu) - self.rho
    }

    /// `P*(λ, μ) = λ² - βλμ + μ² - γ*(λ + μ) - ϱ*`.
    pub fn p_star(&self, lambda: f64, mu: f64) -> f64 {
        lambda * lambda - self.beta * lambda * mu + mu * mu
            - self.gamma_star * (lambda + mu)
            - self.rho_star
    }
}

pub fn td_parameters(theta: &[f64], theta_star: &[f64], tol: &Tolerance) -> Result<TDParams> {
    let primal = recurrence_classify(theta, tol);
    let dual = recurrence_classify(theta_star, tol);
    let complete = |c: &RecurrenceClass, what: &str| -> Result<()> {
        if c.is_complete() {
            Ok(())
        } else {
            Err(Error::NotRecurrent(format!(
                "{what}: {}",
                c.reason.clone().unwrap_or_default()
            )))
        }
    };
    let (beta, beta_star) = match (primal.beta, dual.beta) {
        (Some(b), Some(bs)) => (b, bs),
        _ => {
            complete(&primal, "θ")?;
            complete(&dual, "θ*")?;
            unreachable!()
        }
    };
    if !tol.eq(beta, beta_star, beta) {
        return Err(Error::Inconsistent(format!(
            "β = {beta} from θ but β = {beta_star} from θ*"
        )));
    }
    complete(&primal, "θ")?;
    complete(&dual, "θ*")?;
    let (tm, tp) = primal.extended.unwrap();
    let (sm, spl) = dual.extended.unwrap();
    let mut td = TDParams {
        beta,
        beta_star,
        gamma: primal.gamma.unwrap(),
        gamma_star: dual.gamma.unwrap(),
        rho: primal.rho.unwrap(),
        rho_star: dual.rho.unwrap(),
        theta_minus1: tm,
        theta_dplus1: tp,
        theta_star_minus1: sm,
        theta_star_dplus1: spl,
        residual: 0.0,
    };
    let d = theta.len() - 1;
    td.residual = (1..=d)
        .map(|i| {
            td.p(theta[i - 1], theta[i])
                .abs()
                .max(td.p_star(theta_star[i - 1], theta_star[i]).abs())
        })
        .fold(0.0, f64::max);
    Ok(td)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn arithmetic_progression() {
        let c = recurrence_classify(&[3.0, 1.0, -1.0, -3.0], &Tolerance::default());
        assert!(c.recurrent);
        assert!((c.beta.unwrap() - 2.0).abs() < 1e-14);
        assert!(c.gamma.unwrap().abs() < 1e-14);
        assert!((c.rho.unwrap() - 4.0).abs() < 1e-14);
        assert!(c.handy_residual.unwrap() < 1e-12);
        assert_eq!(c.extended, Some((5.0, -5.0)));
    }

    #[test]
    fn constant_sequence_is_not_recurrent() {
        let c = recurrence_classify(&[2.0; 4], &Tolerance::default());
        assert!(!c.recurrent);
        assert!(c.beta.is_none());
    }

    #[test]
    fn geometric_sequences() {
        for q in [2.0, -3.0, 0.5, 1.7] {
            let seq: Vec<f64> = (0..5).map(|i| f64::powi(q, i)).collect();
            let c = recurrence_classify(&seq, &Tolerance::default());
            assert!((c.beta.unwrap() - (q + 1.0 / q)).abs() < 1e-10, "{q}");
            assert!(c.gamma.unwrap().abs() < 1e-9, "{q}");
        }
    }

    #[test]
    fn non_constant_quotient_rejected() {
        let c = recurrence_classify(&[0.0, 1.0, 3.0, 4.0, 10.0], &Tolerance::default());
        assert!(!c.recurrent);
    }

    #[test]
    fn cube_and_h42_td_parameters() {
        let tol = Tolerance::default();
        let cube = td_parameters(&[3.0, 1.0, -1.0, -3.0], &[3.0, 1.0, -1.0, -3.0], &tol).unwrap();
        let got = [cube.beta, cube.gamma, cube.gamma_star, cube.rho, cube.rho_star];
        for (a, b) in got.iter().zip([2.0, 0.0, 0.0, 4.0, 4.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let h = [4.0, 2.0, 0.0, -2.0, -4.0];
        let t = td_parameters(&h, &h, &tol).unwrap();
        assert!((t.beta - 2.0).abs() < 1e-12 && t.gamma.abs() < 1e-12);
        assert!((t.rho - 4.0).abs() < 1e-12);
        assert!(t.residual < 1e-12);
    }

    #[test]
    fn swapped_cube_ordering_is_inconsistent() {
        let err = td_parameters(
            &[3.0, -1.0, 1.0, -3.0],
            &[3.0, 1.0, -1.0, -3.0],
            &Tolerance::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Inconsistent(_)), "{err:?}");
    }

    proptest! {
        #[test]
        fn round_trip_from_seed_values(
            beta in -1.9f64..4.0,
            gamma in -5.0f64..5.0,
            t0 in -10.0f64..10.0,
            t1 in -10.0f64..10.0,
            len in 4usize..8,
        ) {
            let mut seq = vec![t0, t1];
            while seq.len() < len {
                let i = seq.len() - 1;
                seq.push(gamma + beta * seq[i] - seq[i - 1]);
            }
            let min_gap = (1..seq.len()).map(|i| (seq[i] - seq[i - 1]).abs()).fold(f64::INFINITY, f64::min);
            prop_assume!(min_gap > 0.1);
            prop_assume!(seq.iter().all(|x| x.abs() < 1e2));
            let c = recurrence_classify(&seq, &Tolerance::default());
            prop_assert!(c.recurrent);
            prop_assert!((c.beta.unwrap() - beta).abs() < 1e-10);
            prop_assert!((c.gamma.unwrap() - gamma).abs() < 1e-10);
            prop_assert!(c.handy_residual.unwrap() < 1e-6);
        }
    }
}
