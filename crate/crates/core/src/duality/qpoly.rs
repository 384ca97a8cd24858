use crate::array::IntersectionArray;
use crate::duality::krein::{krein_parameters, KreinTable};
use crate::duality::recurrence::{td_parameters, TDParams};
use crate::error::{Error, Result};
use crate::spectral::{cosine_sequence_of, RecurrenceArray, SpectralData};
use crate::tolerance::{max_abs, Tolerance};

/// An ordering of the eigenvalues together with the dual data it induces.
#[derive(Clone, Debug, PartialEq)]
pub struct QPolyStructure {
    /// Position `p` holds the eigenvalue at natural index `perm[p]`.
    pub perm: Vec<usize>,
    pub theta: Vec<f64>,
    pub m: Vec<f64>,
    /// `θ*_i = m_1 u_i(θ_1)`.
    pub theta_star: Vec<f64>,
    /// `c*_i = q^i_{1,i-1}`, `a*_i = q^i_{1,i}`, `b*_i = q^i_{1,i+1}`.
    pub dual: RecurrenceArray,
    pub krein: KreinTable,
}

impl QPolyStructure {
    /// Natural index of the idempotent placed at position 1.
    pub fn generator(&self) -> usize {
        self.perm[1]
    }
}

/// Builds the dual data attached to an arbitrary ordering, without testing
/// whether the ordering is Q-polynomial.
pub fn structure_for_ordering(
    ia: &IntersectionArray,
    sp: &SpectralData,
    perm: &[usize],
) -> Result<QPolyStructure> {
    let krein = krein_parameters(ia, sp, perm)?;
    let s = sp.permuted(perm);
    let d = ia.diameter();
    let theta_star = (0..=d).map(|i| s.m[1] * s.u[i][1]).collect();
    let dual = RecurrenceArray {
        b: (0..=d)
            .map(|i| if i < d { krein.get(i, 1, i + 1) } else { 0.0 })
            .collect(),
        a: (0..=d).map(|i| krein.get(i, 1, i)).collect(),
        c: (0..=d)
            .map(|i| if i > 0 { krein.get(i, 1, i - 1) } else { 0.0 })
            .collect(),
    };
    Ok(QPolyStructure {
        perm: perm.to_vec(),
        theta: s.theta,
        m: s.m,
        theta_star,
        dual,
        krein,
    })
}

/// Tests both clauses of the Q-polynomial vanishing pattern: `q^h_{ij}` is
/// zero when one index exceeds the sum of the other two and nonzero when
/// one index equals that sum.
pub fn satisfies_qpoly_pattern(krein: &KreinTable, tol: &Tolerance) -> bool {
    let d = krein.diameter();
    for h in 0..=d {
        for i in 0..=d {
            for j in 0..=d {
                let mut v = [h, i, j];
                v.sort_unstable();
                let zero = krein.is_zero(h, i, j, tol);
                if v[2] > v[0] + v[1] && !zero {
                    return false;
                }
                if v[2] == v[0] + v[1] && zero {
                    return false;
                }
            }
        }
    }
    true
}

/// Walks the graph `Δ_E` on `{0..D}` with `i ~ h` iff `q^E_{i,h} ≠ 0`, and
/// returns the vertex order if it is a path starting at 0.
fn delta_path(natural: &KreinTable, e: usize, tol: &Tolerance) -> Option<Vec<usize>> {
    let d = natural.diameter();
    let adjacent = |i: usize, h: usize| i != h && !natural.is_zero(e, i, h, tol);
    let degree = |i: usize| (0..=d).filter(|&h| adjacent(i, h)).count();
    if degree(0) != 1 {
        return None;
    }
    let mut path = vec![0];
    let mut seen = vec![false; d + 1];
    seen[0] = true;
    while path.len() <= d {
        let cur = *path.last().unwrap();
        if path.len() > 1 && degree(cur) != 2 {
            return None;
        }
        let next: Vec<usize> = (0..=d).filter(|&h| adjacent(cur, h) && !seen[h]).collect();
        if next.len() != 1 {
            return None;
        }
        seen[next[0]] = true;
        path.push(next[0]);
    }
    if degree(path[d]) != 1 {
        return None;
    }
    Some(path)
}

/// Q-polynomial orderings found by reading the Krein table directly.
///
/// One structure is emitted per nontrivial idempotent whose graph `Δ_E` is
/// a path from 0 and whose reordered table has the full vanishing pattern.
pub fn qpoly_orderings_direct(
    ia: &IntersectionArray,
    sp: &SpectralData,
    tol: &Tolerance,
) -> Result<Vec<QPolyStructure>> {
    let d = ia.diameter();
    let natural_order: Vec<usize> = (0..=d).collect();
    let natural = krein_parameters(ia, sp, &natural_order)?;
    let mut out = Vec::new();
    for e in 1..=d {
        let Some(path) = delta_path(&natural, e, tol) else {
            continue;
        };
        if path[1] != e {
            continue;
        }
        let qp = structure_for_ordering(ia, sp, &path)?;
        if satisfies_qpoly_pattern(&qp.krein, tol) {
            out.push(qp);
        }
    }
    Ok(out)
}

/// Dual cosines and the checks they satisfy for a Q-polynomial structure.
#[derive(Clone, Debug, PartialEq)]
pub struct DualStructure {
    /// `u_star[j][i] = u*_j(θ*_i)`.
    pub u_star: Vec<Vec<f64>>,
    pub td: TDParams,
    /// `max |u_i(θ_j) - u*_j(θ*_i)|`.
    pub aw_duality_residual: f64,
    /// Residuals of both dual orthogonality relations.
    pub dual_orthogonality_residual: f64,
    /// `max |m_i - (b*_0···b*_{i-1})/(c*_1···c*_i)|`.
    pub multiplicity_residual: f64,
    /// `max |c*_i + a*_i + b*_i - m_1|`, together with `|c*_1 - 1|` and `|a*_0|`.
    pub dual_array_residual: f64,
    /// `max |u*_i(θ*_0) - 1|`.
    pub normalization_residual: f64,
    pub theta_star_distinct: bool,
}

impl DualStructure {
    pub fn max_residual(&self) -> f64 {
        self.aw_duality_residual
            .max(self.dual_orthogonality_residual)
            .max(self.multiplicity_residual)
            .max(self.dual_array_residual)
            .max(self.normalization_residual)
    }

    pub fn passes(&self, tol: &Tolerance, scale: f64) -> bool {
        self.theta_star_distinct && tol.is_zero(self.max_residual(), scale)
    }
}

pub fn dual_structure(
    ia: &IntersectionArray,
    sp: &SpectralData,
    qp: &QPolyStructure,
    tol: &Tolerance,
) -> Result<DualStructure> {
    let d = ia.diameter();
    let s = sp.permuted(&qp.perm);
    let ts = &qp.theta_star;
    let scale = max_abs(ts);
    let mut theta_star_distinct = true;
    for i in 0..=d {
        for j in 0..i {
            if tol.is_zero(ts[i] - ts[j], scale) {
                theta_star_distinct = false;
            }
        }
    }

    let seqs: Vec<Vec<f64>> = ts
        .iter()
        .map(|&t| cosine_sequence_of(&qp.dual, t).sigma)
        .collect();
    let u_star: Vec<Vec<f64>> = (0..=d)
        .map(|j| (0..=d).map(|i| seqs[i][j]).collect())
        .collect();

    let mut aw = 0.0_f64;
    for i in 0..=d {
        for j in 0..=d {
            aw = aw.max((s.u[i][j] - u_star[j][i]).abs());
        }
    }

    let k = &s.valencies;
    let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let mut orth = 0.0_f64;
    for i in 0..=d {
        for j in 0..=d {
            let a: f64 = (0..=d).map(|l| u_star[i][l] * u_star[j][l] * k[l]).sum();
            let b: f64 = (0..=d).map(|l| u_star[l][i] * u_star[l][j] * s.m[l]).sum();
            orth = orth
                .max((a - delta(i, j) * s.n / s.m[i]).abs())
                .max((b - delta(i, j) * s.n / k[i]).abs());
        }
    }

    let dual_m = qp.dual.valencies();
    let multiplicity_residual = (0..=d)
        .map(|i| (dual_m[i] - s.m[i]).abs())
        .fold(0.0, f64::max);
    let m1 = s.m[1];
    let dual_array_residual = (0..=d)
        .map(|i| (qp.dual.c[i] + qp.dual.a[i] + qp.dual.b[i] - m1).abs())
        .fold((qp.dual.c[1] - 1.0).abs().max(qp.dual.a[0].abs()), f64::max);
    let normalization_residual = (0..=d)
        .map(|i| (u_star[i][0] - 1.0).abs())
        .fold(0.0, f64::max);

    let td = td_parameters(&qp.theta, ts, tol)?;
    Ok(DualStructure {
        u_star,
        td,
        aw_duality_residual: aw,
        dual_orthogonality_residual: orth,
        multiplicity_residual,
        dual_array_residual,
        normalization_residual,
        theta_star_distinct,
    })
}

/// Eigenvalue sequence regenerated from `θ*` and `(β, γ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenvalueOrder {
    pub theta: Vec<f64>,
    pub perm: Vec<usize>,
}

/// `θ_0 = k`, `θ_1 = k θ*_1 / θ*_0`, `θ_{i+1} = γ + β θ_i - θ_{i-1}`, each
/// term matched against the computed spectrum.
pub fn reconstruct_eigenvalue_order(
    ia: &IntersectionArray,
    sp: &SpectralData,
    theta_star: &[f64],
    beta: f64,
    gamma: f64,
    tol: &Tolerance,
) -> Result<EigenvalueOrder> {
    let d = ia.diameter();
    let k = ia.k_f64();
    let mut theta = vec![k, k * theta_star[1] / theta_star[0]];
    for i in 1..d {
        theta.push(gamma + beta * theta[i] - theta[i - 1]);
    }
    let scale = max_abs(&sp.theta);
    let mut perm = Vec::with_capacity(d + 1);
    for (i, t) in theta.iter().enumerate() {
        let found = (0..=d)
            .filter(|j| !perm.contains(j))
            .find(|&j| tol.eq(sp.theta[j], *t, scale));
        match found {
            Some(j) => perm.push(j),
            None => return Err(Error::ReconstructionMismatch { index: i, value: *t }),
        }
    }
    Ok(EigenvalueOrder { theta, perm })
}

/// `θ*_i = m_j u_i(θ_j)` for the idempotent at natural index `j`.
pub fn dual_eigenvalue_sequence(sp: &SpectralData, j: usize) -> Vec<f64> {
    (0..=sp.diameter()).map(|i| sp.m[j] * sp.u[i][j]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::{intersection_numbers, parse_array};
    use crate::spectral::spectral_data;

    fn setup(text: &str) -> (IntersectionArray, SpectralData) {
        let ia = parse_array(text).unwrap();
        let sp = spectral_data(&ia, &Tolerance::default()).unwrap();
        (ia, sp)
    }

    fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
        if items.len() <= 1 {
            return vec![items.to_vec()];
        }
        let mut out = Vec::new();
        for (i, &x) in items.iter().enumerate() {
            let mut rest = items.to_vec();
            rest.remove(i);
            for mut p in permutations(&rest) {
                p.insert(0, x);
                out.push(p);
            }
        }
        out
    }

    /// Scans every ordering fixing 0 against the vanishing pattern.
    fn brute_force_orderings(ia: &IntersectionArray, sp: &SpectralData) -> Vec<Vec<usize>> {
        let d = ia.diameter();
        let rest: Vec<usize> = (1..=d).collect();
        permutations(&rest)
            .into_iter()
            .map(|mut p| {
                p.insert(0, 0);
                p
            })
            .filter(|p| {
                let t = krein_parameters(ia, sp, p).unwrap();
                (0..=d).all(|h| {
                    (0..=d).all(|i| {
                        (0..=d).all(|j| {
                            let mut v = [h, i, j];
                            v.sort_unstable();
                            let x = t.get(h, i, j).abs();
                            if v[2] > v[0] + v[1] {
                                x < 1e-8
                            } else if v[2] == v[0] + v[1] {
                                x > 1e-8
                            } else {
                                true
                            }
                        })
                    })
                })
            })
            .collect()
    }

    #[test]
    fn direct_detector_matches_brute_force_scan() {
        for text in ["3,2,1;1,2,3", "2,1,1;1,1,1", "6,4,2;1,2,3", "15,8,3;1,4,9", "4,3,2,1;1,2,3,4"] {
            let (ia, sp) = setup(text);
            let mut got: Vec<Vec<usize>> = qpoly_orderings_direct(&ia, &sp, &Tolerance::default())
                .unwrap()
                .into_iter()
                .map(|q| q.perm)
                .collect();
            let mut want = brute_force_orderings(&ia, &sp);
            got.sort();
            want.sort();
            assert_eq!(got, want, "{text}");
            assert!(!got.is_empty(), "{text}");
        }
    }

    #[test]
    fn cube_has_one_qpoly_ordering() {
        let (ia, sp) = setup("3,2,1;1,2,3");
        let qps = qpoly_orderings_direct(&ia, &sp, &Tolerance::default()).unwrap();
        assert_eq!(qps.len(), 1);
        assert_eq!(qps[0].perm, vec![0, 1, 2, 3]);
        for (a, b) in qps[0].theta_star.iter().zip([3.0, 1.0, -1.0, -3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn cube_dual_array_is_primal_array() {
        let (ia, sp) = setup("3,2,1;1,2,3");
        let tol = Tolerance::default();
        let qp = &qpoly_orderings_direct(&ia, &sp, &tol).unwrap()[0];
        let primal = RecurrenceArray::from_array(&ia);
        for i in 0..=3 {
            assert!((qp.dual.b[i] - primal.b[i]).abs() < 1e-12);
            assert!((qp.dual.a[i] - primal.a[i]).abs() < 1e-12);
            assert!((qp.dual.c[i] - primal.c[i]).abs() < 1e-12);
        }
        let ds = dual_structure(&ia, &sp, qp, &tol).unwrap();
        assert!(ds.max_residual() < 1e-12, "{ds:?}");
        let p = intersection_numbers(&ia);
        for h in 0..=3 {
            for i in 0..=3 {
                for j in 0..=3 {
                    assert!((qp.krein.get(h, i, j) - p.get_f64(h, i, j)).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn dual_structure_invariants_on_builtins() {
        let tol = Tolerance::default();
        for text in ["2,1,1;1,1,1", "6,4,2;1,2,3", "15,8,3;1,4,9", "5,4,3,2,1;1,2,3,4,5"] {
            let (ia, sp) = setup(text);
            for qp in qpoly_orderings_direct(&ia, &sp, &tol).unwrap() {
                let ds = dual_structure(&ia, &sp, &qp, &tol).unwrap();
                assert!(ds.aw_duality_residual < 1e-8, "{text}");
                assert!(ds.max_residual() < 1e-8, "{text}: {ds:?}");
                assert!(ds.theta_star_distinct);
                assert!((ds.td.beta - ds.td.beta_star).abs() < 1e-8);
                assert!(qp.dual.c[1] == 1.0 || (qp.dual.c[1] - 1.0).abs() < 1e-10);
                for i in 0..=ia.diameter() {
                    assert!((qp.theta_star[i] - qp.m[1] * sp.u[i][qp.perm[1]]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn trivial_idempotent_never_generates() {
        let (ia, sp) = setup("3,2,1;1,2,3");
        for qp in qpoly_orderings_direct(&ia, &sp, &Tolerance::default()).unwrap() {
            assert_ne!(qp.generator(), 0);
        }
    }

    #[test]
    fn reconstruction_cube_and_h33() {
        let tol = Tolerance::default();
        let (ia, sp) = setup("3,2,1;1,2,3");
        let r = reconstruct_eigenvalue_order(&ia, &sp, &[3.0, 1.0, -1.0, -3.0], 2.0, 0.0, &tol).unwrap();
        assert_eq!(r.perm, vec![0, 1, 2, 3]);
        for (a, b) in r.theta.iter().zip([3.0, 1.0, -1.0, -3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let err = reconstruct_eigenvalue_order(&ia, &sp, &[3.0, 1.0, -1.0, -3.0], 2.0, 0.3, &tol);
        assert!(matches!(err, Err(Error::ReconstructionMismatch { .. })));

        let (ia, sp) = setup("6,4,2;1,2,3");
        let ts = dual_eigenvalue_sequence(&sp, 1);
        let td = crate::duality::recurrence::recurrence_classify(&ts, &tol);
        let r = reconstruct_eigenvalue_order(&ia, &sp, &ts, td.beta.unwrap(), 0.0, &tol).unwrap();
        for (a, b) in r.theta.iter().zip([6.0, 3.0, 0.0, -3.0]) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
