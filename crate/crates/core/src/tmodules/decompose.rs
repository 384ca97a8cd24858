use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::duality::satisfies_qpoly_pattern;
use crate::error::{Error, Result};
use crate::graph::{GraphAlgebra, Subconstituent};
use crate::linalg::{
    column_space, krylov_closure, max_abs, max_principal_sine, null_space, rank_with_floor, reject, symmetric_eigen,
    RANK_THRESHOLD, SUBSPACE_THRESHOLD,
};
use crate::residual::ResidualReport;
use crate::tmodules::primary::primary_module;
use crate::tolerance::Tolerance;

/// Relative gap below which eigenvalues of a commutant element are grouped.
const EIGEN_GROUP_GAP: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecomposeOptions {
    pub seed: u64,
    pub max_iterations: usize,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            max_iterations: 10_000,
        }
    }
}

/// Endpoint, dual endpoint, diameter and shell dimensions of a module.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModuleInvariants {
    pub endpoint: usize,
    pub dual_endpoint: usize,
    pub diameter: usize,
    pub shell_dims: Vec<usize>,
}

/// An irreducible module given by an orthonormal basis.
#[derive(Clone, Debug)]
pub struct TModule {
    pub basis: DMatrix<f64>,
    pub endpoint: usize,
    pub dual_endpoint: usize,
    pub diameter: usize,
    pub dual_diameter: usize,
    /// `dim E*_i W`.
    pub shell_dims: Vec<usize>,
    /// `dim E_i W`.
    pub dual_shell_dims: Vec<usize>,
    pub thin: bool,
}

fn window(dims: &[usize]) -> (usize, usize, bool) {
    let first = dims.iter().position(|&x| x > 0).unwrap_or(0);
    let last = dims.iter().rposition(|&x| x > 0).unwrap_or(0);
    let contiguous = dims[first..=last].iter().all(|&x| x > 0);
    (first, last - first, contiguous)
}

impl TModule {
    pub fn from_basis(basis: DMatrix<f64>, alg: &GraphAlgebra, sub: &Subconstituent) -> Self {
        let d = alg.diameter();
        let shell_dims: Vec<usize> = (0..=d)
            .map(|i| rank_with_floor(&crate::linalg::diag_left(&sub.estar[i], &basis), SUBSPACE_THRESHOLD))
            .collect();
        let dual_shell_dims: Vec<usize> = (0..=d)
            .map(|i| rank_with_floor(&(&alg.e[i] * &basis), SUBSPACE_THRESHOLD))
            .collect();
        let (endpoint, diameter, _) = window(&shell_dims);
        let (dual_endpoint, dual_diameter, _) = window(&dual_shell_dims);
        let thin = shell_dims.iter().all(|&x| x <= 1);
        Self {
            basis,
            endpoint,
            dual_endpoint,
            diameter,
            dual_diameter,
            shell_dims,
            dual_shell_dims,
            thin,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn invariants(&self) -> ModuleInvariants {
        ModuleInvariants {
            endpoint: self.endpoint,
            dual_endpoint: self.dual_endpoint,
            diameter: self.diameter,
            shell_dims: self.shell_dims.clone(),
        }
    }

    /// Both shell-dimension lists are nonzero exactly on a contiguous window.
    pub fn windows_contiguous(&self) -> bool {
        window(&self.shell_dims).2 && window(&self.dual_shell_dims).2
    }
}

/// Modules sharing one invariant tuple. Equal tuples do not prove the
/// modules isomorphic, so the grouping is labelled invariant-equivalent.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleGroup {
    pub invariants: ModuleInvariants,
    pub dim: usize,
    pub count: usize,
}

#[derive(Clone, Debug)]
pub struct TModuleDecomposition {
    pub modules: Vec<TModule>,
    pub groups: Vec<ModuleGroup>,
    pub grouping: &'static str,
    pub seed: u64,
    pub commutant_dim: usize,
    /// Index of the module with endpoint 0.
    pub primary: Option<usize>,
    pub residuals: ResidualReport,
}

impl TModuleDecomposition {
    pub fn total_dim(&self) -> usize {
        self.modules.iter().map(TModule::dim).sum()
    }
}

/// Basis of `{S : S G = G S for every G}` as column-major vectors.
pub(crate) fn commutant(gens: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let c = gens[0].nrows();
    let mut eqs = DMatrix::zeros(gens.len() * c * c, c * c);
    for (g_idx, g) in gens.iter().enumerate() {
        let base = g_idx * c * c;
        for row in 0..c {
            for col in 0..c {
                let eq = base + row + col * c;
                for t in 0..c {
                    // (G X)[row, col] = Σ_t G[row, t] X[t, col]
                    eqs[(eq, t + col * c)] += g[(row, t)];
                    // (X G)[row, col] = Σ_t X[row, t] G[t, col]
                    eqs[(eq, row + t * c)] -= g[(t, col)];
                }
            }
        }
    }
    null_space(&eqs, RANK_THRESHOLD)
}

/// The commutant of the subconstituent algebra on the whole standard
/// module. Elements commute with every `E*_i`, so they are block diagonal
/// over the shells and only `X_h A_{hi} = A_{hi} X_i` remains.
fn full_commutant(alg: &GraphAlgebra, sub: &Subconstituent) -> (Vec<Vec<usize>>, Vec<usize>, DMatrix<f64>) {
    let d = alg.diameter();
    let shells: Vec<Vec<usize>> = (0..=d)
        .map(|i| (0..alg.n).filter(|&y| sub.shell_of[y] == i).collect())
        .collect();
    let mut offsets = Vec::with_capacity(d + 2);
    let mut total = 0;
    for s in &shells {
        offsets.push(total);
        total += s.len() * s.len();
    }
    offsets.push(total);
    let a = alg.adjacency();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    for h in 0..=d {
        for i in h.saturating_sub(1)..=(h + 1).min(d) {
            let (sh, si) = (&shells[h], &shells[i]);
            let (kh, ki) = (sh.len(), si.len());
            let block = DMatrix::from_fn(kh, ki, |r, c| a[(sh[r], si[c])]);
            if block.iter().all(|&x| x == 0.0) {
                continue;
            }
            for r in 0..kh {
                for c in 0..ki {
                    let mut eq = Vec::new();
                    for t in 0..kh {
                        if block[(t, c)] != 0.0 {
                            eq.push((offsets[h] + r + t * kh, block[(t, c)]));
                        }
                    }
                    for t in 0..ki {
                        if block[(r, t)] != 0.0 {
                            eq.push((offsets[i] + t + c * ki, -block[(r, t)]));
                        }
                    }
                    rows.push(eq);
                }
            }
        }
    }
    let mut eqs = DMatrix::zeros(rows.len(), total);
    for (r, eq) in rows.iter().enumerate() {
        for &(c, v) in eq {
            eqs[(r, c)] += v;
        }
    }
    (shells, offsets, null_space(&eqs, RANK_THRESHOLD))
}

/// Groups ascending eigenvalues whose consecutive gaps are small.
fn eigen_groups(vals: &[f64]) -> Vec<Vec<usize>> {
    let scale = vals.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in vals.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if v - vals[*g.last().unwrap()] <= EIGEN_GROUP_GAP * scale => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
}

fn columns(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), idx.len(), |r, c| m[(r, idx[c])])
}

fn random_symmetric(basis: &DMatrix<f64>, c: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let coef = DVector::from_fn(basis.ncols(), |_, _| rng.gen_range(-1.0..1.0));
    let v = basis * coef;
    let x = DMatrix::from_column_slice(c, c, v.as_slice());
    (&x + x.transpose()) * 0.5
}

/// Dimension of the commutant of `{A, A*}` restricted to the span of `q`.
pub(crate) fn restricted_commutant(q: &DMatrix<f64>, a: &DMatrix<f64>, astar: &DMatrix<f64>) -> DMatrix<f64> {
    let ar = q.transpose() * a * q;
    let asr = q.transpose() * astar * q;
    commutant(&[&ar, &asr])
}

/// Splits the standard module into irreducible modules.
///
/// A random symmetric element of the commutant separates the isotypic
/// pieces; within each eigenspace a cyclic module generated from the lowest
/// shell is split off and certified irreducible by a one-dimensional
/// restricted commutant.
pub fn decompose(
    alg: &GraphAlgebra,
    sub: &Subconstituent,
    opts: &DecomposeOptions,
    tol: &Tolerance,
) -> Result<TModuleDecomposition> {
    let structure = alg.structure()?;
    if !satisfies_qpoly_pattern(&structure.krein, tol) {
        return Err(Error::Decomposition(format!(
            "ordering {:?} is not Q-polynomial, so A* = A*_1 is not a dual adjacency matrix",
            alg.ordering
        )));
    }
    let n = alg.n;
    let d = alg.diameter();
    let a = alg.adjacency();
    let astar = sub.dual_adjacency();
    let estar: Vec<DMatrix<f64>> = (0..=d).map(|i| sub.estar_matrix(i)).collect();
    let mut gens: Vec<&DMatrix<f64>> = vec![a, &astar];
    gens.extend(estar.iter());
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let (shells, offsets, basis) = full_commutant(alg, sub);
    let commutant_dim = basis.ncols();
    let coef = DVector::from_fn(commutant_dim, |_, _| rng.gen_range(-1.0..1.0));
    let flat = &basis * coef;
    let mut s = DMatrix::zeros(n, n);
    for (h, sh) in shells.iter().enumerate() {
        let kh = sh.len();
        for r in 0..kh {
            for c in 0..kh {
                s[(sh[r], sh[c])] = flat[offsets[h] + r + c * kh];
            }
        }
    }
    let s = (&s + s.transpose()) * 0.5;
    let (vals, vecs) = symmetric_eigen(&s);
    let mut pending: Vec<DMatrix<f64>> = eigen_groups(&vals).iter().map(|g| columns(&vecs, g)).collect();

    let mut found: Vec<DMatrix<f64>> = Vec::new();
    let mut iterations = 0;
    while let Some(mut cand) = pending.pop() {
        while cand.ncols() > 0 {
            iterations += 1;
            if iterations > opts.max_iterations {
                return Err(Error::Decomposition(format!(
                    "refinement did not converge within {} iterations",
                    opts.max_iterations
                )));
            }
            let low = (0..=d)
                .find(|&i| rank_with_floor(&crate::linalg::diag_left(&sub.estar[i], &cand), SUBSPACE_THRESHOLD) > 0)
                .expect("a nonzero subspace meets some shell");
            let seed_vecs = column_space(&crate::linalg::diag_left(&sub.estar[low], &cand));
            let start = seed_vecs.columns(0, 1).into_owned();
            let w = krylov_closure(&gens, &start, RANK_THRESHOLD);
            let rest = reject(&w, &cand);
            let complement = if rest.ncols() == 0 || max_abs(&rest) <= SUBSPACE_THRESHOLD {
                DMatrix::zeros(n, 0)
            } else {
                column_space(&rest)
            };
            if complement.ncols() + w.ncols() != cand.ncols() {
                return Err(Error::Decomposition(format!(
                    "cyclic module of dimension {} does not fit in a candidate of dimension {}",
                    w.ncols(),
                    cand.ncols()
                )));
            }
            let comm = restricted_commutant(&w, a, &astar);
            if comm.ncols() == 1 {
                found.push(w);
            } else {
                let rs = random_symmetric(&comm, w.ncols(), &mut rng);
                let (rv, rvecs) = symmetric_eigen(&rs);
                let groups = eigen_groups(&rv);
                if groups.len() < 2 {
                    return Err(Error::Decomposition(format!(
                        "restricted commutant of dimension {} has no splitting element",
                        comm.ncols()
                    )));
                }
                for g in groups {
                    pending.push(&w * columns(&rvecs, &g));
                }
            }
            cand = complement;
        }
    }

    let mut modules: Vec<TModule> = found.into_iter().map(|b| TModule::from_basis(b, alg, sub)).collect();
    modules.sort_by_key(TModule::invariants);
    let mut groups: Vec<ModuleGroup> = Vec::new();
    for m in &modules {
        match groups.last_mut() {
            Some(g) if g.invariants == m.invariants() => g.count += 1,
            _ => groups.push(ModuleGroup {
                invariants: m.invariants(),
                dim: m.dim(),
                count: 1,
            }),
        }
    }

    let mut r = ResidualReport::new(tol);
    let total: usize = modules.iter().map(TModule::dim).sum();
    r.push_flag(format!("sum of dimensions {total} = n"), total == n);
    let all_cols: Vec<DVector<f64>> = modules
        .iter()
        .flat_map(|m| m.basis.column_iter().map(|c| c.into_owned()))
        .collect();
    let all = DMatrix::from_columns(&all_cols);
    r.push_matrix("module bases are orthonormal", &(all.transpose() * &all - DMatrix::identity(total, total)), 1.0);
    let scale = alg.spectral.k;
    let theta_star_scale = astar.diagonal().amax();
    for (idx, m) in modules.iter().enumerate() {
        let q = &m.basis;
        r.push_matrix(format!("module {idx}: A W ⊆ W"), &reject(q, &(a * q)), scale);
        r.push_matrix(format!("module {idx}: A* W ⊆ W"), &reject(q, &(&astar * q)), theta_star_scale);
        r.push_flag(format!("module {idx}: shell windows contiguous"), m.windows_contiguous());
        r.push_flag(format!("module {idx}: d = δ"), m.diameter == m.dual_diameter);
    }
    for i in 0..=d {
        let sum: usize = modules.iter().map(|m| m.shell_dims[i]).sum();
        r.push_flag(format!("Σ dim E*_{i}W = k_{i}"), sum as f64 == alg.spectral.valencies[i]);
        let sum: usize = modules.iter().map(|m| m.dual_shell_dims[i]).sum();
        r.push_flag(format!("Σ dim E_{i}W = m_{i}"), (sum as f64 - alg.spectral.m[i]).abs() < 0.5);
    }
    let with_zero: Vec<usize> = (0..modules.len()).filter(|&i| modules[i].endpoint == 0).collect();
    r.push_flag("exactly one module has endpoint 0", with_zero.len() == 1);
    let primary = with_zero.first().copied();
    if let Some(p) = primary {
        let pm = primary_module(alg, sub, tol)?;
        let sine = max_principal_sine(&pm.orthonormal_basis(), &modules[p].basis);
        r.push_values("endpoint-0 module equals the primary module", sine, sine, 0.0);
        if let Some(e) = r.entries.last_mut() {
            e.passed = sine < SUBSPACE_THRESHOLD;
        }
        let mut xhat = DMatrix::zeros(n, 1);
        xhat[(sub.x, 0)] = 1.0;
        let holders = modules
            .iter()
            .filter(|m| (m.basis.transpose() * &xhat).norm() > 1.0 - SUBSPACE_THRESHOLD)
            .count();
        r.push_flag("exactly one module contains x̂", holders == 1);
    }

    Ok(TModuleDecomposition {
        modules,
        groups,
        grouping: "invariant-equivalent",
        seed: opts.seed,
        commutant_dim,
        primary,
        residuals: r,
    })
}
