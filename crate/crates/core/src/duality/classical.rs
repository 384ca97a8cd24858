use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::array::{rational, to_f64, IntersectionArray, Rational};
use crate::duality::pascasio::{pascasio_check, PascasioResult};
use crate::duality::qpoly::{qpoly_orderings_direct, structure_for_ordering, QPolyStructure};
use crate::error::{Error, Result};
use crate::spectral::SpectralData;
use crate::tolerance::{max_abs, Tolerance};

/// Classical parameters `(D, b, α, σ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalParams {
    pub d: usize,
    pub b: i64,
    pub alpha: Rational,
    pub sigma: Rational,
}

impl ClassicalParams {
    /// `[i; 1]_b = 1 + b + ... + b^{i-1}`.
    pub fn bracket(&self, i: usize) -> Rational {
        let b = BigInt::from(self.b);
        let mut s = BigInt::zero();
        let mut p = BigInt::one();
        for _ in 0..i {
            s += &p;
            p *= &b;
        }
        Rational::from_integer(s)
    }

    /// `c_i = [i](1 + α[i-1])`.
    pub fn c(&self, i: usize) -> Rational {
        if i == 0 {
            return Rational::zero();
        }
        self.bracket(i) * (Rational::one() + &self.alpha * self.bracket(i - 1))
    }

    /// `b_i = ([D] - [i])(σ - α[i])`.
    pub fn b(&self, i: usize) -> Rational {
        (self.bracket(self.d) - self.bracket(i)) * (&self.sigma - &self.alpha * self.bracket(i))
    }

    pub fn reproduces(&self, ia: &IntersectionArray) -> bool {
        (0..=self.d).all(|i| &self.b(i) == ia.b(i) && &self.c(i) == ia.c(i))
    }
}

/// Every classical-parameter representation of the array.
///
/// Eliminating `α` from `c_2 = (1+b)(1+α)` and `c_3 = (1+b+b²)(1+α(1+b))`
/// leaves `b³ - (c_2-1)b² - (c_2-1)b - (c_2-c_3) = 0`. Integer roots lie
/// within the Cauchy bound, so every integer in range is tested exactly.
pub fn classical_parameters(ia: &IntersectionArray) -> Vec<ClassicalParams> {
    let d = ia.diameter();
    let c2 = ia.c(2);
    let c3 = ia.c(3);
    let one = Rational::one();
    let coeffs = [-(c2 - &one), -(c2 - &one), -(c2 - c3)];
    let bound = coeffs
        .iter()
        .map(|x| x.abs().ceil().to_integer())
        .max()
        .and_then(|m| m.to_i64())
        .unwrap_or(0)
        .saturating_add(1)
        .min(1 << 20);
    let poly = |b: &Rational| {
        b * b * b + &coeffs[0] * b * b + &coeffs[1] * b + &coeffs[2]
    };

    let mut candidates: Vec<i64> = (-bound..=bound).filter(|&b| b != 0 && b != -1).collect();
    if !candidates.contains(&1) {
        candidates.push(1);
    }
    let mut out = Vec::new();
    for b in candidates {
        let br = rational(b);
        if b != 1 && !poly(&br).is_zero() {
            continue;
        }
        let alpha = c2 / (&one + &br) - &one;
        let mut cp = ClassicalParams {
            d,
            b,
            alpha,
            sigma: Rational::zero(),
        };
        let top = cp.bracket(d);
        if top.is_zero() {
            continue;
        }
        cp.sigma = ia.k() / top;
        if cp.reproduces(ia) && !out.contains(&cp) {
            out.push(cp);
        }
    }
    out
}

/// The Q-polynomial structure guaranteed by classical parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalQPoly {
    /// `θ = b_1/b - 1`.
    pub theta: f64,
    /// Natural index of `θ` in the spectrum.
    pub index: usize,
    /// `θ*_0, ..., θ*_D` with `θ*_0 = m` for the idempotent of `θ`.
    pub theta_star: Vec<f64>,
    pub pascasio: PascasioResult,
    /// `θ_i = b_i/b^i - [i]` in order.
    pub eigenvalue_order: Vec<f64>,
    pub structure: QPolyStructure,
    /// Whether the direct detector reports the same ordering.
    pub direct_agrees: bool,
}

pub fn classical_qpoly(
    ia: &IntersectionArray,
    cp: &ClassicalParams,
    sp: &SpectralData,
    tol: &Tolerance,
) -> Result<ClassicalQPoly> {
    let d = ia.diameter();
    let b = to_f64(&rational(cp.b));
    let k = ia.k_f64();
    let theta = to_f64(ia.b(1)) / b - 1.0;
    let scale = max_abs(&sp.theta);
    if tol.eq(theta, k, scale) {
        return Err(Error::Inconsistent(format!("θ = b_1/b - 1 equals k = {k}")));
    }
    let index = (1..=d)
        .find(|&j| tol.eq(sp.theta[j], theta, scale))
        .ok_or_else(|| Error::Inconsistent(format!("θ = {theta} is not an eigenvalue")))?;

    let m = sp.m[index];
    let theta_star: Vec<f64> = (0..=d)
        .map(|i| {
            let ratio = 1.0 + (theta / k - 1.0) * to_f64(&cp.bracket(i)) * b.powi(1 - i as i32);
            m * ratio
        })
        .collect();
    let pascasio = pascasio_check(ia, &theta_star, tol);
    if !pascasio.is_qp {
        return Err(Error::Inconsistent(format!(
            "dual sequence from classical parameters rejected: {}",
            pascasio.failure.clone().unwrap_or_default()
        )));
    }

    let eigenvalue_order: Vec<f64> = (0..=d)
        .map(|i| to_f64(ia.b(i)) / b.powi(i as i32) - to_f64(&cp.bracket(i)))
        .collect();
    let mut perm = Vec::with_capacity(d + 1);
    for (i, t) in eigenvalue_order.iter().enumerate() {
        match (0..=d).find(|j| !perm.contains(j) && tol.eq(sp.theta[*j], *t, scale)) {
            Some(j) => perm.push(j),
            None => return Err(Error::ReconstructionMismatch { index: i, value: *t }),
        }
    }
    if perm[1] != index {
        return Err(Error::Inconsistent(format!(
            "θ_1 = {} in the eigenvalue order differs from θ = {theta}",
            eigenvalue_order[1]
        )));
    }
    let structure = structure_for_ordering(ia, sp, &perm)?;
    for i in 0..=d {
        if !tol.eq(structure.theta_star[i], theta_star[i], max_abs(&theta_star)) {
            return Err(Error::Inconsistent(format!(
                "θ*_{i} from classical parameters differs from m u_i(θ)"
            )));
        }
    }
    let direct_agrees = qpoly_orderings_direct(ia, sp, tol)?
        .iter()
        .any(|q| q.perm == perm);
    Ok(ClassicalQPoly {
        theta,
        index,
        theta_star,
        pascasio,
        eigenvalue_order,
        structure,
        direct_agrees,
    })
}
