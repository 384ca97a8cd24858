use nalgebra::{DMatrix, DVector};

use crate::array::IntersectionArray;
use crate::duality::{check_ordering, krein_parameters, structure_for_ordering, KreinTable, QPolyStructure};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{diag, diag_left, diag_right};
use crate::residual::ResidualReport;
use crate::spectral::{spectral_data, SpectralData};
use crate::tolerance::{max_abs, Tolerance};

/// Default cap on the vertex count for dense algebra matrices.
pub const DEFAULT_MAX_VERTICES: usize = 4096;

/// Distance matrices and primitive idempotents of a distance-regular graph.
#[derive(Clone, Debug)]
pub struct GraphAlgebra {
    pub n: usize,
    pub array: IntersectionArray,
    /// Spectrum in the natural (descending) order.
    pub natural: SpectralData,
    /// Position `p` holds the idempotent at natural index `ordering[p]`.
    pub ordering: Vec<usize>,
    /// Spectrum in the stated ordering.
    pub spectral: SpectralData,
    pub a: Vec<DMatrix<f64>>,
    pub e: Vec<DMatrix<f64>>,
    pub j: DMatrix<f64>,
    pub residuals: ResidualReport,
    pub tolerance: Tolerance,
}

impl GraphAlgebra {
    pub fn diameter(&self) -> usize {
        self.a.len() - 1
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.a[1]
    }

    /// The same algebra with idempotents relabeled so that position `p`
    /// holds the idempotent at natural index `perm[p]`.
    pub fn reordered(&self, perm: &[usize]) -> Result<Self> {
        check_ordering(perm, self.diameter())?;
        let mut out = self.clone();
        out.e = perm
            .iter()
            .map(|&j| {
                let pos = self.ordering.iter().position(|&o| o == j).expect("ordering is a permutation");
                self.e[pos].clone()
            })
            .collect();
        out.ordering = perm.to_vec();
        out.spectral = self.natural.permuted(perm);
        Ok(out)
    }

    /// Krein parameters under the current ordering.
    pub fn krein(&self) -> Result<KreinTable> {
        krein_parameters(&self.array, &self.natural, &self.ordering)
    }

    /// Dual data induced by the current ordering.
    pub fn structure(&self) -> Result<QPolyStructure> {
        structure_for_ordering(&self.array, &self.natural, &self.ordering)
    }
}

/// Builds `A_i` from the distance table and `E_j = n⁻¹ m_j Σ_i u_i(θ_j) A_i`.
pub fn bose_mesner(g: &Graph, ia: &IntersectionArray, tol: &Tolerance) -> Result<GraphAlgebra> {
    bose_mesner_with_cap(g, ia, tol, DEFAULT_MAX_VERTICES)
}

pub fn bose_mesner_with_cap(
    g: &Graph,
    ia: &IntersectionArray,
    tol: &Tolerance,
    cap: usize,
) -> Result<GraphAlgebra> {
    let n = g.n();
    if n > cap {
        return Err(Error::TooLarge { n, cap });
    }
    if ia.order_f64() != n as f64 || ia.diameter() != g.diameter() {
        return Err(Error::Graph(format!(
            "graph with {n} vertices and diameter {} does not match array {ia}",
            g.diameter()
        )));
    }
    let d = ia.diameter();
    let sp = spectral_data(ia, tol)?;
    let a: Vec<DMatrix<f64>> = (0..=d).map(|i| g.distance_matrix(i)).collect();
    let e: Vec<DMatrix<f64>> = (0..=d)
        .map(|j| {
            let mut ej = DMatrix::zeros(n, n);
            for (i, ai) in a.iter().enumerate() {
                ej += ai * (sp.m[j] * sp.u[i][j] / n as f64);
            }
            ej
        })
        .collect();
    let j = DMatrix::from_element(n, n, 1.0);
    let identity = DMatrix::<f64>::identity(n, n);

    let mut r = ResidualReport::new(tol);
    let sum_a = a.iter().fold(DMatrix::zeros(n, n), |s, x| s + x);
    r.push_matrix("sum A_i = J", &(sum_a - &j), 1.0);
    r.push_matrix("A_0 = I", &(&a[0] - &identity), 1.0);
    let sum_e = e.iter().fold(DMatrix::zeros(n, n), |s, x| s + x);
    r.push_matrix("sum E_i = I", &(sum_e - &identity), 1.0);
    for p in 0..=d {
        for q in p..=d {
            let prod = &e[p] * &e[q];
            let target = if p == q { e[p].clone() } else { DMatrix::zeros(n, n) };
            r.push_matrix(format!("E_{p} E_{q} = δ E_{p}"), &(prod - target), 1.0);
        }
    }
    r.push_matrix("E_0 = J/n", &(&e[0] - &j / n as f64), 1.0);
    let scale = max_abs(&sp.theta);
    for p in 0..=d {
        r.push_matrix(format!("A E_{p} = θ_{p} E_{p}"), &(&a[1] * &e[p] - &e[p] * sp.theta[p]), scale);
        for i in 0..=d {
            let v = sp.v(i, p);
            r.push_matrix(format!("A_{i} E_{p} = v_{i}(θ_{p}) E_{p}"), &(&a[i] * &e[p] - &e[p] * v), sp.valencies[i]);
        }
    }

    Ok(GraphAlgebra {
        n,
        array: ia.clone(),
        ordering: (0..=d).collect(),
        spectral: sp.clone(),
        natural: sp,
        a,
        e,
        j,
        residuals: r,
        tolerance: *tol,
    })
}

/// Dual idempotents, dual distance matrices and the central idempotent `e_0`
/// with respect to a base vertex.
#[derive(Clone, Debug)]
pub struct Subconstituent {
    pub x: usize,
    /// Diagonal of `E*_i`.
    pub estar: Vec<DVector<f64>>,
    /// Diagonal of `A*_i`, `(A*_i)_{yy} = n (E_i)_{xy}`.
    pub astar: Vec<DVector<f64>>,
    /// `n Σ_i k_i⁻¹ E*_i E_0 E*_i`.
    pub e0: DMatrix<f64>,
    /// `n Σ_j m_j⁻¹ E_j E*_0 E_j`.
    pub e0_dual_form: DMatrix<f64>,
    /// Distance from `x` of each vertex.
    pub shell_of: Vec<usize>,
    pub residuals: ResidualReport,
}

impl Subconstituent {
    pub fn diameter(&self) -> usize {
        self.estar.len() - 1
    }

    pub fn estar_matrix(&self, i: usize) -> DMatrix<f64> {
        diag(&self.estar[i])
    }

    pub fn astar_matrix(&self, i: usize) -> DMatrix<f64> {
        diag(&self.astar[i])
    }

    /// The dual adjacency matrix `A* = A*_1`.
    pub fn dual_adjacency(&self) -> DMatrix<f64> {
        self.astar_matrix(1)
    }

    /// `θ*_i`, the value of `A*_1` on the shell at distance `i`.
    pub fn theta_star(&self) -> Vec<f64> {
        (0..=self.diameter())
            .map(|i| {
                let y = self.shell_of.iter().position(|&s| s == i).expect("every shell is nonempty");
                self.astar[1][y]
            })
            .collect()
    }

    /// The vector `1_i`, the characteristic vector of `Γ_i(x)`.
    pub fn shell_vector(&self, i: usize) -> DVector<f64> {
        self.estar[i].clone()
    }
}

pub fn subconstituent(g: &Graph, alg: &GraphAlgebra, x: usize, tol: &Tolerance) -> Result<Subconstituent> {
    let n = alg.n;
    if x >= n {
        return Err(Error::Graph(format!("base vertex {x} is outside 0..{n}")));
    }
    let d = alg.diameter();
    let shell_of: Vec<usize> = (0..n).map(|y| g.distance(x, y)).collect();
    let estar: Vec<DVector<f64>> = (0..=d)
        .map(|i| DVector::from_fn(n, |y, _| if shell_of[y] == i { 1.0 } else { 0.0 }))
        .collect();
    let astar: Vec<DVector<f64>> = (0..=d)
        .map(|i| DVector::from_fn(n, |y, _| n as f64 * alg.e[i][(x, y)]))
        .collect();
    let k = &alg.spectral.valencies;
    let m = &alg.spectral.m;
    let nf = n as f64;

    let mut e0 = DMatrix::zeros(n, n);
    for i in 0..=d {
        e0 += diag_left(&estar[i], &diag_right(&alg.e[0], &estar[i])) * (nf / k[i]);
    }
    let mut e0_dual_form = DMatrix::zeros(n, n);
    for j in 0..=d {
        let col = alg.e[j].column(x);
        e0_dual_form += (col * col.transpose()) * (nf / m[j]);
    }

    let mut r = ResidualReport::new(tol);
    let identity = DVector::from_element(n, 1.0);
    let sum_estar = estar.iter().fold(DVector::zeros(n), |s, v| s + v);
    r.push_values("sum E*_i = I", (sum_estar - &identity).amax(), 0.0, 1.0);
    let mut exact = true;
    for i in 0..=d {
        for j in 0..=d {
            let prod = estar[i].component_mul(&estar[j]);
            let target = if i == j { estar[i].clone() } else { DVector::zeros(n) };
            exact &= prod == target;
        }
    }
    r.push_flag("E*_i E*_j = δ E*_i", exact);
    r.push_values("A*_0 = I", (&astar[0] - &identity).amax(), 0.0, 1.0);
    let sum_astar = astar.iter().fold(DVector::zeros(n), |s, v| s + v);
    r.push_values("sum A*_i = n E*_0", (sum_astar - &estar[0] * nf).amax(), 0.0, nf);
    for i in 0..=d {
        let tr = estar[i].sum();
        r.push_scalar(format!("tr E*_{i} = k_{i}"), tr - k[i], k[i]);
    }
    r.push_matrix("e0 E*-form = E-form", &(&e0 - &e0_dual_form), 1.0);

    Ok(Subconstituent {
        x,
        estar,
        astar,
        e0,
        e0_dual_form,
        shell_of,
        residuals: r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_family, check_drg, Family};

    pub(crate) fn setup(f: Family) -> (Graph, GraphAlgebra) {
        let g = build_family(f).unwrap();
        let ia = check_drg(&g).array().unwrap().unwrap();
        let alg = bose_mesner(&g, &ia, &Tolerance::default()).unwrap();
        (g, alg)
    }

    #[test]
    fn cube_traces() {
        let (_, alg) = setup(Family::Hypercube { d: 3 });
        let tr: Vec<f64> = alg.e.iter().map(|e| e.trace()).collect();
        for (t, want) in tr.iter().zip([1.0, 3.0, 3.0, 1.0]) {
            assert!((t - want).abs() < 1e-12);
        }
        assert!(alg.residuals.all_pass(), "{:?}", alg.residuals.failures().collect::<Vec<_>>());
    }

    #[test]
    fn projector_residuals_on_builtins() {
        for f in [
            Family::Hypercube { d: 3 },
            Family::Hypercube { d: 4 },
            Family::Hypercube { d: 5 },
            Family::Hamming { d: 3, q: 3 },
            Family::Johnson { n: 8, k: 3 },
            Family::Cycle { n: 7 },
        ] {
            let (_, alg) = setup(f);
            for e in alg.residuals.entries.iter().filter(|e| e.name.starts_with("E_") || e.name.starts_with("sum")) {
                assert!(e.max_abs < 1e-9, "{f:?} {e:?}");
            }
            assert!(alg.residuals.all_pass(), "{f:?}");
        }
    }

    #[test]
    fn cube_dual_adjacency() {
        let (g, alg) = setup(Family::Hypercube { d: 3 });
        for x in [0, 5] {
            let sub = subconstituent(&g, &alg, x, &Tolerance::default()).unwrap();
            for y in 0..8 {
                let want = [3.0, 1.0, -1.0, -3.0][g.distance(x, y)];
                assert!((sub.astar[1][y] - want).abs() < 1e-12);
            }
            assert!(sub.residuals.all_pass());
        }
    }

    #[test]
    fn shells_and_traces() {
        let (g, alg) = setup(Family::Johnson { n: 8, k: 3 });
        let sub = subconstituent(&g, &alg, 3, &Tolerance::default()).unwrap();
        let ones = DVector::from_element(alg.n, 1.0);
        for i in 0..=3 {
            let v = sub.estar[i].component_mul(&ones);
            let want = DVector::from_fn(alg.n, |y, _| if g.distance(3, y) == i { 1.0 } else { 0.0 });
            assert_eq!(v, want);
            assert_eq!(sub.estar[i].sum(), alg.spectral.valencies[i]);
        }
        assert!(sub.residuals.all_pass(), "{:?}", sub.residuals);
    }

    #[test]
    fn reorder_round_trip() {
        let (_, alg) = setup(Family::Hypercube { d: 3 });
        let swapped = alg.reordered(&[0, 2, 1, 3]).unwrap();
        assert_eq!(swapped.e[1], alg.e[2]);
        assert_eq!(swapped.spectral.theta[1], alg.spectral.theta[2]);
        let back = swapped.reordered(&[0, 1, 2, 3]).unwrap();
        assert_eq!(back.e, alg.e);
        assert!(alg.reordered(&[1, 0, 2, 3]).is_err());
    }
}
