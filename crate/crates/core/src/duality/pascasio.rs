use nalgebra::{Matrix3, Vector3};

use crate::array::IntersectionArray;
use crate::duality::qpoly::{dual_eigenvalue_sequence, reconstruct_eigenvalue_order};
use crate::error::Result;
use crate::spectral::SpectralData;
use crate::tolerance::{max_abs, Tolerance};

/// Scalars witnessing the three conditions of the dual-eigenvalue test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PascasioScalars {
    pub beta: f64,
    pub gamma_star: f64,
    pub gamma: f64,
    pub omega: f64,
    pub eta_star: f64,
    pub theta_star_minus1: f64,
    pub theta_star_dplus1: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PascasioResult {
    pub is_qp: bool,
    /// Condition that failed, `"i"`, `"ii"` or `"iii"`, with detail.
    pub failure: Option<String>,
    pub scalars: Option<PascasioScalars>,
}

impl PascasioResult {
    fn reject(condition: &str, detail: String) -> Self {
        Self {
            is_qp: false,
            failure: Some(format!("({condition}) {detail}")),
            scalars: None,
        }
    }
}

/// Residual of `a_i(θ*_i - θ*_{i-1})(θ*_i - θ*_{i+1}) - (γθ*_i² + ωθ*_i + η*)`
/// given a closure for the extended sequence.
fn fit_target(a: &[f64], ext: &dyn Fn(isize) -> f64, i: usize) -> f64 {
    let t = ext(i as isize);
    a[i] * (t - ext(i as isize - 1)) * (t - ext(i as isize + 1))
}

/// Solves `γx² + ωx + η* = y` through three points with distinct `x`.
fn solve_quadratic(pts: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    let m = Matrix3::from_fn(|r, c| pts[r].0.powi(2 - c as i32));
    let rhs = Vector3::new(pts[0].1, pts[1].1, pts[2].1);
    m.lu().solve(&rhs).map(|s| (s[0], s[1], s[2]))
}

fn distinct_points(ts: &[f64], candidates: impl Iterator<Item = usize>, tol: &Tolerance, scale: f64) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for i in candidates {
        if chosen.iter().all(|&j| !tol.eq(ts[i], ts[j], scale)) {
            chosen.push(i);
            if chosen.len() == 3 {
                break;
            }
        }
    }
    chosen
}

/// Decides whether `θ*_0..θ*_D` comes from a Q-polynomial idempotent.
pub fn pascasio_check(ia: &IntersectionArray, theta_star: &[f64], tol: &Tolerance) -> PascasioResult {
    let d = ia.diameter();
    let ts = theta_star;
    let scale = max_abs(ts);
    let a = ia.a_f64();

    for i in 1..=d {
        if tol.eq(ts[i], ts[0], scale) {
            return PascasioResult::reject("i", format!("θ*_{i} = θ*_0"));
        }
    }

    let pivot = (2..d).find(|&i| !tol.eq(ts[i - 1], ts[i], scale));
    let (beta, gamma_star) = match pivot {
        Some(i) => {
            let beta = (ts[i - 2] - ts[i - 1] + ts[i] - ts[i + 1]) / (ts[i - 1] - ts[i]);
            (beta, ts[i - 1] - beta * ts[i] + ts[i + 1])
        }
        None => match sweep_beta(ts, &a, tol, scale) {
            Some(pair) => pair,
            None => {
                return PascasioResult::reject(
                    "ii",
                    "β underdetermined and no value closes condition (iii)".into(),
                )
            }
        },
    };
    let bscale = scale * (2.0 + beta.abs());
    for i in 1..d {
        let g = ts[i - 1] - beta * ts[i] + ts[i + 1];
        if !tol.eq(g, gamma_star, bscale) {
            return PascasioResult::reject(
                "ii",
                format!("θ*_{} - βθ*_{i} + θ*_{} = {g} differs from γ* = {gamma_star}", i - 1, i + 1),
            );
        }
    }

    let lo = gamma_star + beta * ts[0] - ts[1];
    let hi = gamma_star + beta * ts[d] - ts[d - 1];
    let ext = move |i: isize| -> f64 {
        if i < 0 {
            lo
        } else if i as usize > d {
            hi
        } else {
            ts[i as usize]
        }
    };
    let chosen = distinct_points(ts, 0..=d, tol, scale);
    if chosen.len() < 3 {
        return PascasioResult::reject("iii", "fewer than three distinct θ*".into());
    }
    let pts: Vec<(f64, f64)> = chosen.iter().map(|&i| (ts[i], fit_target(&a, &ext, i))).collect();
    let Some((gamma, omega, eta_star)) = solve_quadratic(&pts) else {
        return PascasioResult::reject("iii", "singular fit".into());
    };
    let yscale = (0..=d)
        .map(|i| fit_target(&a, &ext, i).abs())
        .fold(scale * scale, f64::max);
    for i in 0..=d {
        let y = fit_target(&a, &ext, i);
        let fit = gamma * ts[i] * ts[i] + omega * ts[i] + eta_star;
        if !tol.eq(y, fit, yscale) {
            return PascasioResult::reject(
                "iii",
                format!("residual {} at i = {i}", y - fit),
            );
        }
    }

    PascasioResult {
        is_qp: true,
        failure: None,
        scalars: Some(PascasioScalars {
            beta,
            gamma_star,
            gamma,
            omega,
            eta_star,
            theta_star_minus1: lo,
            theta_star_dplus1: hi,
        }),
    }
}

/// With `θ*_1 = ... = θ*_{D-1}` the recurrence leaves `β` free. The `i = 0`
/// term of (iii) vanishes since `a_0 = 0`, so `β` enters only through
/// `θ*_{D+1}` at `i = D`; fit on `0..D-1` and solve that equation for `β`.
fn sweep_beta(ts: &[f64], a: &[f64], tol: &Tolerance, scale: f64) -> Option<(f64, f64)> {
    let d = ts.len() - 1;
    let chosen = distinct_points(ts, 0..d, tol, scale);
    if chosen.len() < 3 {
        return None;
    }
    let inner = |i: isize| ts[i.clamp(0, d as isize) as usize];
    let pts: Vec<(f64, f64)> = chosen.iter().map(|&i| (ts[i], fit_target(a, &inner, i))).collect();
    let (g, w, e) = solve_quadratic(&pts)?;
    let target = g * ts[d] * ts[d] + w * ts[d] + e;
    let slope = a[d] * (ts[d] - ts[d - 1]);
    if tol.is_zero(slope, scale) {
        return None;
    }
    // target = slope (θ*_D - θ*_{D+1}) with θ*_{D+1} = γ* + βθ*_D - θ*_{D-1}
    // and γ* = θ*_0 - βθ*_1 + θ*_2.
    let next = ts[d] - target / slope;
    let denom = ts[d] - ts[1];
    if tol.is_zero(denom, scale) {
        return None;
    }
    let beta = (next + ts[d - 1] - ts[0] - ts[2]) / denom;
    Some((beta, ts[0] - beta * ts[1] + ts[2]))
}

/// The orderings accepted through the dual-eigenvalue test, each paired
/// with the generating idempotent's natural index.
pub fn pascasio_orderings(
    ia: &IntersectionArray,
    sp: &SpectralData,
    tol: &Tolerance,
) -> Result<Vec<(usize, Vec<usize>)>> {
    let mut out = Vec::new();
    for j in 1..=ia.diameter() {
        let ts = dual_eigenvalue_sequence(sp, j);
        let res = pascasio_check(ia, &ts, tol);
        if let Some(s) = res.scalars {
            if let Ok(order) = reconstruct_eigenvalue_order(ia, sp, &ts, s.beta, s.gamma, tol) {
                out.push((j, order.perm));
            }
        }
    }
    Ok(out)
}
