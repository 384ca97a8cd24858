//! Eigenvalues, multiplicities and cosine sequences of an intersection array.

use nalgebra::DMatrix;

use crate::array::IntersectionArray;
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigenvalues;
use crate::tolerance::{max_abs, Tolerance};

/// Real tridiagonal recurrence data `c_i, a_i, b_i` for `0 <= i <= D`, with
/// `c_0 = 0` and `b_D = 0`. Used for both primal and dual arrays.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceArray {
    pub b: Vec<f64>,
    pub a: Vec<f64>,
    pub c: Vec<f64>,
}

impl RecurrenceArray {
    pub fn from_array(ia: &IntersectionArray) -> Self {
        Self {
            b: ia.b_f64(),
            a: ia.a_f64(),
            c: ia.c_f64(),
        }
    }

    pub fn diameter(&self) -> usize {
        self.b.len() - 1
    }

    /// `b_0`, the row sum of the recurrence.
    pub fn k(&self) -> f64 {
        self.b[0]
    }

    /// `(b_0 ··· b_{i-1}) / (c_1 ··· c_i)`.
    pub fn valencies(&self) -> Vec<f64> {
        let mut k = vec![1.0];
        for i in 1..=self.diameter() {
            k.push(k[i - 1] * self.b[i - 1] / self.c[i]);
        }
        k
    }
}

/// Output of the forward cosine recurrence at a trial value `θ`.
#[derive(Clone, Debug, PartialEq)]
pub struct CosineSequence {
    pub theta: f64,
    pub sigma: Vec<f64>,
    /// `c_D σ_{D-1} + a_D σ_D - θ σ_D`.
    pub terminal_residual: f64,
}

impl CosineSequence {
    /// Whether `θ` is recognized as an eigenvalue.
    pub fn is_eigenvalue(&self, tol: &Tolerance) -> bool {
        tol.is_zero(self.terminal_residual, self.theta)
    }
}

pub fn cosine_sequence_of(arr: &RecurrenceArray, theta: f64) -> CosineSequence {
    let d = arr.diameter();
    let mut sigma = vec![1.0, theta / arr.k()];
    for i in 1..d {
        let next = ((theta - arr.a[i]) * sigma[i] - arr.c[i] * sigma[i - 1]) / arr.b[i];
        sigma.push(next);
    }
    let terminal_residual = arr.c[d] * sigma[d - 1] + (arr.a[d] - theta) * sigma[d];
    CosineSequence {
        theta,
        sigma,
        terminal_residual,
    }
}

pub fn cosine_sequence(ia: &IntersectionArray, theta: f64) -> CosineSequence {
    cosine_sequence_of(&RecurrenceArray::from_array(ia), theta)
}

/// Eigenvalues of the tridiagonal recurrence, `θ_0 = k` first and the rest
/// strictly decreasing.
pub fn eigenvalues_of(arr: &RecurrenceArray, tol: &Tolerance) -> Result<Vec<f64>> {
    let d = arr.diameter();
    let mut t = DMatrix::<f64>::zeros(d + 1, d + 1);
    for i in 0..=d {
        t[(i, i)] = arr.a[i];
        if i < d {
            let off = (arr.b[i] * arr.c[i + 1]).sqrt();
            t[(i, i + 1)] = off;
            t[(i + 1, i)] = off;
        }
    }
    let mut theta = symmetric_eigenvalues(&t);
    theta.sort_by(|x, y| y.total_cmp(x));

    let k = arr.k();
    if (theta[0] - k).abs() > 1e-6 * k.abs().max(1.0) {
        return Err(Error::Numerical(format!(
            "largest eigenvalue {} differs from k = {k}",
            theta[0]
        )));
    }
    theta[0] = k;
    let scale = max_abs(&theta);
    for i in 0..d {
        let gap = theta[i] - theta[i + 1];
        if gap <= tol.bound(scale) {
            return Err(Error::EigenvaluesNotSeparated { i, j: i + 1, gap });
        }
    }
    Ok(theta)
}

pub fn eigenvalues(ia: &IntersectionArray, tol: &Tolerance) -> Result<Vec<f64>> {
    eigenvalues_of(&RecurrenceArray::from_array(ia), tol)
}

/// Eigenvalues with multiplicities and the cosine table `u_i(θ_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralData {
    pub theta: Vec<f64>,
    pub m: Vec<f64>,
    /// `u[i][j] = u_i(θ_j)`.
    pub u: Vec<Vec<f64>>,
    pub valencies: Vec<f64>,
    pub n: f64,
    pub k: f64,
    /// `terminal[j]` is the recognition residual of `θ_j`.
    pub terminal: Vec<f64>,
}

impl SpectralData {
    pub fn diameter(&self) -> usize {
        self.theta.len() - 1
    }

    /// `v_i(θ_j) = k_i u_i(θ_j)`.
    pub fn v(&self, i: usize, j: usize) -> f64 {
        self.valencies[i] * self.u[i][j]
    }

    /// Multiplicities within `1e-6` of an integer.
    pub fn integral_multiplicities(&self) -> Vec<bool> {
        self.m.iter().map(|m| (m - m.round()).abs() <= 1e-6).collect()
    }

    /// Reorders eigenvalues: position `p` receives the eigenvalue at
    /// natural index `perm[p]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let d = self.diameter();
        Self {
            theta: perm.iter().map(|&j| self.theta[j]).collect(),
            m: perm.iter().map(|&j| self.m[j]).collect(),
            u: (0..=d)
                .map(|i| perm.iter().map(|&j| self.u[i][j]).collect())
                .collect(),
            valencies: self.valencies.clone(),
            n: self.n,
            k: self.k,
            terminal: perm.iter().map(|&j| self.terminal[j]).collect(),
        }
    }
}

/// `m_j = n / Σ_ℓ u_ℓ(θ_j)² k_ℓ`.
pub fn multiplicities(ia: &IntersectionArray, theta: &[f64]) -> Result<Vec<f64>> {
    let arr = RecurrenceArray::from_array(ia);
    let kv = ia.valencies_f64();
    let n = ia.order_f64();
    theta
        .iter()
        .map(|&t| {
            let s = cosine_sequence_of(&arr, t);
            let denom: f64 = s.sigma.iter().zip(&kv).map(|(u, k)| u * u * k).sum();
            if denom <= f64::EPSILON * n {
                Err(Error::Numerical(format!(
                    "vanishing norm sum for θ = {t}"
                )))
            } else {
                Ok(n / denom)
            }
        })
        .collect()
}

pub fn spectral_data(ia: &IntersectionArray, tol: &Tolerance) -> Result<SpectralData> {
    let arr = RecurrenceArray::from_array(ia);
    let theta = eigenvalues_of(&arr, tol)?;
    let m = multiplicities(ia, &theta)?;
    let d = ia.diameter();
    let seqs: Vec<CosineSequence> = theta.iter().map(|&t| cosine_sequence_of(&arr, t)).collect();
    let u = (0..=d)
        .map(|i| seqs.iter().map(|s| s.sigma[i]).collect())
        .collect();
    Ok(SpectralData {
        terminal: seqs.iter().map(|s| s.terminal_residual).collect(),
        theta,
        m,
        u,
        valencies: ia.valencies_f64(),
        n: ia.order_f64(),
        k: ia.k_f64(),
    })
}

/// Maximum absolute residuals of the four orthogonality relations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrthogonalityReport {
    /// `Σ_ℓ u_ℓ(θ_i) u_ℓ(θ_j) k_ℓ = δ_ij n / m_i`.
    pub u_over_distance: f64,
    /// `Σ_ℓ u_i(θ_ℓ) u_j(θ_ℓ) m_ℓ = δ_ij n / k_i`.
    pub u_over_eigenvalue: f64,
    /// `Σ_ℓ v_ℓ(θ_i) v_ℓ(θ_j) / k_ℓ = δ_ij n / m_i`.
    pub v_over_distance: f64,
    /// `Σ_ℓ v_i(θ_ℓ) v_j(θ_ℓ) m_ℓ = δ_ij k_i n`.
    pub v_over_eigenvalue: f64,
}

impl OrthogonalityReport {
    pub fn max(&self) -> f64 {
        self.u_over_distance
            .max(self.u_over_eigenvalue)
            .max(self.v_over_distance)
            .max(self.v_over_eigenvalue)
    }
}

pub fn verify_orthogonality(sp: &SpectralData) -> OrthogonalityReport {
    let d = sp.diameter();
    let n = sp.n;
    let k = &sp.valencies;
    let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let mut rep = OrthogonalityReport {
        u_over_distance: 0.0,
        u_over_eigenvalue: 0.0,
        v_over_distance: 0.0,
        v_over_eigenvalue: 0.0,
    };
    for i in 0..=d {
        for j in 0..=d {
            let mut s1 = 0.0;
            let mut s2 = 0.0;
            let mut s3 = 0.0;
            let mut s4 = 0.0;
            for l in 0..=d {
                s1 += sp.u[l][i] * sp.u[l][j] * k[l];
                s2 += sp.u[i][l] * sp.u[j][l] * sp.m[l];
                s3 += sp.v(l, i) * sp.v(l, j) / k[l];
                s4 += sp.v(i, l) * sp.v(j, l) * sp.m[l];
            }
            let r1 = (s1 - delta(i, j) * n / sp.m[i]).abs();
            let r2 = (s2 - delta(i, j) * n / k[i]).abs();
            let r3 = (s3 - delta(i, j) * n / sp.m[i]).abs();
            let r4 = (s4 - delta(i, j) * n * k[i]).abs();
            rep.u_over_distance = rep.u_over_distance.max(r1);
            rep.u_over_eigenvalue = rep.u_over_eigenvalue.max(r2);
            rep.v_over_distance = rep.v_over_distance.max(r3);
            rep.v_over_eigenvalue = rep.v_over_eigenvalue.max(r4);
        }
    }
    rep
}

/// `p^h_{ij}` from the spectrum: `n^{-1} k_i k_j Σ_ℓ u_i u_j u_h(θ_ℓ) m_ℓ`.
/// Indexed `[h][i][j]`.
pub fn spectral_intersection_numbers(sp: &SpectralData) -> Vec<Vec<Vec<f64>>> {
    let d = sp.diameter();
    let k = &sp.valencies;
    (0..=d)
        .map(|h| {
            (0..=d)
                .map(|i| {
                    (0..=d)
                        .map(|j| {
                            let s: f64 = (0..=d)
                                .map(|l| sp.u[i][l] * sp.u[j][l] * sp.u[h][l] * sp.m[l])
                                .sum();
                            k[i] * k[j] * s / sp.n
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::{intersection_numbers, parse_array};

    const BUILTIN: [&str; 6] = [
        "3,2,1;1,2,3",
        "4,3,2,1;1,2,3,4",
        "2,1,1;1,1,1",
        "6,4,2;1,2,3",
        "15,8,3;1,4,9",
        "5,4,3,2,1;1,2,3,4,5",
    ];

    fn sp(text: &str) -> SpectralData {
        spectral_data(&parse_array(text).unwrap(), &Tolerance::default()).unwrap()
    }

    fn cube_adjacency() -> DMatrix<f64> {
        DMatrix::from_fn(8, 8, |x, y| {
            if (x ^ y).count_ones() == 1 {
                1.0
            } else {
                0.0
            }
        })
    }

    #[test]
    fn cube_eigenvalues_match_dense_adjacency_spectrum() {
        let mut dense = symmetric_eigenvalues(&cube_adjacency());
        dense.sort_by(|a, b| b.total_cmp(a));
        dense.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        let theta = sp("3,2,1;1,2,3").theta;
        assert_eq!(theta.len(), dense.len());
        for (a, b) in theta.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-10, "{theta:?} vs {dense:?}");
        }
    }

    #[test]
    fn heptagon_eigenvalues_are_circulant() {
        let theta = sp("2,1,1;1,1,1").theta;
        for (j, t) in theta.iter().enumerate() {
            let want = 2.0 * (2.0 * std::f64::consts::PI * j as f64 / 7.0).cos();
            assert!((t - want).abs() < 1e-10);
        }
    }

    #[test]
    fn cube_cosines_at_one() {
        let s = cosine_sequence(&parse_array("3,2,1;1,2,3").unwrap(), 1.0);
        let want = [1.0, 1.0 / 3.0, -1.0 / 3.0, -1.0];
        for (a, b) in s.sigma.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(s.is_eigenvalue(&Tolerance::default()));
        let off = cosine_sequence(&parse_array("3,2,1;1,2,3").unwrap(), 0.5);
        assert!(!off.is_eigenvalue(&Tolerance::default()));
    }

    #[test]
    fn cosines_at_k_are_all_ones() {
        for text in BUILTIN {
            let ia = parse_array(text).unwrap();
            let s = cosine_sequence(&ia, ia.k_f64());
            assert!(s.sigma.iter().all(|x| (x - 1.0).abs() < 1e-12), "{text}");
        }
    }

    #[test]
    fn cube_multiplicities_match_projector_traces() {
        let a = cube_adjacency();
        let eig = symmetric_eigenvalues(&a);
        let theta = sp("3,2,1;1,2,3");
        for (j, t) in theta.theta.iter().enumerate() {
            let tr = eig.iter().filter(|e| (*e - t).abs() < 1e-9).count();
            assert!((theta.m[j] - tr as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn spectral_invariants_on_builtins() {
        for text in BUILTIN {
            let s = sp(text);
            assert_eq!(s.theta[0], s.k);
            assert!((s.m[0] - 1.0).abs() < 1e-10);
            assert!((s.m.iter().sum::<f64>() - s.n).abs() < 1e-8);
            assert!(s.integral_multiplicities().iter().all(|&b| b), "{text}");
            for i in 0..=s.diameter() {
                for j in 0..=s.diameter() {
                    assert!(s.u[i][j].abs() <= 1.0 + 1e-9);
                }
                assert!((s.u[i][0] - 1.0).abs() < 1e-12);
            }
            for j in 0..=s.diameter() {
                assert!((s.u[1][j] - s.theta[j] / s.k).abs() < 1e-14);
                assert!(s.terminal[j].abs() < 1e-8, "{text} {j}");
            }
            assert!(verify_orthogonality(&s).max() < 1e-8, "{text}");
        }
        assert!(verify_orthogonality(&sp("3,2,1;1,2,3")).max() < 1e-10);
    }

    #[test]
    fn spectral_intersection_numbers_match_exact_table() {
        for text in BUILTIN {
            let ia = parse_array(text).unwrap();
            let p = intersection_numbers(&ia);
            let q = spectral_intersection_numbers(&sp(text));
            let d = ia.diameter();
            for h in 0..=d {
                for i in 0..=d {
                    for j in 0..=d {
                        assert!((p.get_f64(h, i, j) - q[h][i][j]).abs() < 1e-8, "{text}");
                    }
                }
            }
        }
    }

    #[test]
    fn permutation_moves_columns() {
        let s = sp("3,2,1;1,2,3");
        let t = s.permuted(&[0, 2, 1, 3]);
        assert_eq!(t.theta[1], s.theta[2]);
        assert_eq!(t.u[2][1], s.u[2][2]);
        assert_eq!(t.m[2], s.m[1]);
    }
}
