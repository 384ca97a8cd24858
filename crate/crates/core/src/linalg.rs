//! Dense linear-algebra helpers shared by the graph and module code.

use nalgebra::{DMatrix, DVector};

/// Largest principal-angle sine at which two subspaces count as equal.
pub const SUBSPACE_THRESHOLD: f64 = 1e-7;

/// Relative singular-value threshold for rank decisions.
pub const RANK_THRESHOLD: f64 = 1e-8;

fn to_faer(m: &DMatrix<f64>) -> faer::Mat<f64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
}

fn from_faer(m: faer::MatRef<'_, f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
}

/// Full singular value decomposition `m = U Σ Vᵀ`.
pub struct Svd {
    pub u: DMatrix<f64>,
    /// The `min(rows, cols)` singular values, nonincreasing.
    pub s: Vec<f64>,
    pub v: DMatrix<f64>,
}

pub fn svd(m: &DMatrix<f64>) -> Svd {
    let dec = to_faer(m).svd().expect("SVD converged");
    let diag = dec.S().column_vector();
    Svd {
        u: from_faer(dec.U()),
        s: (0..diag.nrows()).map(|i| diag[i]).collect(),
        v: from_faer(dec.V()),
    }
}

pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    to_faer(m).singular_values().expect("SVD converged")
}

/// Eigenvalues in increasing order with orthonormal eigenvectors as columns,
/// for a symmetric matrix.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let dec = to_faer(m)
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("eigendecomposition converged");
    let vals = dec.S().column_vector();
    let mut order: Vec<usize> = (0..vals.nrows()).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let vecs = from_faer(dec.U());
    let sorted = DMatrix::from_fn(vecs.nrows(), order.len(), |r, c| vecs[(r, order[c])]);
    (order.iter().map(|&i| vals[i]).collect(), sorted)
}

pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut vals = to_faer(m)
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .expect("eigendecomposition converged");
    vals.sort_by(f64::total_cmp);
    vals
}

/// Orthonormal basis of the column space of `m`, keeping singular values
/// above `RANK_THRESHOLD * σ_max`.
pub fn column_space(m: &DMatrix<f64>) -> DMatrix<f64> {
    column_space_with(m, RANK_THRESHOLD)
}

pub fn column_space_with(m: &DMatrix<f64>, rel: f64) -> DMatrix<f64> {
    let rows = m.nrows();
    if m.ncols() == 0 || rows == 0 {
        return DMatrix::zeros(rows, 0);
    }
    let dec = svd(m);
    let smax = dec.s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return DMatrix::zeros(rows, 0);
    }
    let keep = dec.s.iter().take_while(|&&s| s > rel * smax).count();
    dec.u.columns(0, keep).into_owned()
}

pub fn rank(m: &DMatrix<f64>) -> usize {
    column_space(m).ncols()
}

/// Rank with an absolute floor: singular values at or below `floor` never
/// count, whatever the relative threshold says.
pub fn rank_with_floor(m: &DMatrix<f64>, floor: f64) -> usize {
    let sv = singular_values(m);
    let smax = sv.iter().copied().fold(0.0, f64::max);
    sv.iter()
        .filter(|&&s| s > RANK_THRESHOLD * smax && s > floor)
        .count()
}

/// Orthonormal basis of the null space of `m`.
pub fn null_space(m: &DMatrix<f64>, rel: f64) -> DMatrix<f64> {
    let cols = m.ncols();
    if m.nrows() == 0 {
        return DMatrix::identity(cols, cols);
    }
    let dec = svd(m);
    let smax = dec.s.first().copied().unwrap_or(0.0);
    let nonzero = dec.s.iter().take_while(|&&s| smax > 0.0 && s > rel * smax).count();
    dec.v.columns(nonzero, cols - nonzero).into_owned()
}

/// `(I - QQᵀ) v` for an orthonormal `Q`.
pub fn reject(q: &DMatrix<f64>, v: &DMatrix<f64>) -> DMatrix<f64> {
    if q.ncols() == 0 {
        return v.clone();
    }
    v - q * (q.transpose() * v)
}

/// Sine of the largest principal angle between two subspaces given by
/// orthonormal bases, or 1 if the dimensions differ.
pub fn max_principal_sine(q1: &DMatrix<f64>, q2: &DMatrix<f64>) -> f64 {
    if q1.ncols() != q2.ncols() {
        return 1.0;
    }
    if q1.ncols() == 0 {
        return 0.0;
    }
    let r = reject(q1, q2);
    spectral_norm(&r)
}

pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0.0;
    }
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |a, x| a.max(x.abs()))
}

/// `diag(d) · m`.
pub fn diag_left(d: &DVector<f64>, m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for (r, mut row) in out.row_iter_mut().enumerate() {
        row *= d[r];
    }
    out
}

/// `m · diag(d)`.
pub fn diag_right(m: &DMatrix<f64>, d: &DVector<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for (c, mut col) in out.column_iter_mut().enumerate() {
        col *= d[c];
    }
    out
}

pub fn diag(d: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_diagonal(d)
}

/// Smallest subspace containing the columns of `start` and closed under
/// every generator, as an orthonormal basis.
pub fn krylov_closure(gens: &[&DMatrix<f64>], start: &DMatrix<f64>, rel: f64) -> DMatrix<f64> {
    let n = start.nrows();
    let scale = gens
        .iter()
        .map(|g| max_abs(g))
        .fold(1.0_f64, f64::max);
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut queue: Vec<DVector<f64>> = Vec::new();
    let push = |v: DVector<f64>, basis: &mut Vec<DVector<f64>>, queue: &mut Vec<DVector<f64>>, floor: f64| {
        let mut w = v;
        for _ in 0..2 {
            for b in basis.iter() {
                let c = b.dot(&w);
                w -= b * c;
            }
        }
        let norm = w.norm();
        if norm > floor && basis.len() < n {
            let u = w / norm;
            basis.push(u.clone());
            queue.push(u);
        }
    };
    for c in 0..start.ncols() {
        let v = start.column(c).into_owned();
        let floor = rel * v.norm().max(f64::MIN_POSITIVE);
        push(v, &mut basis, &mut queue, floor);
    }
    while let Some(v) = queue.pop() {
        for g in gens {
            push(*g * &v, &mut basis, &mut queue, rel * scale);
        }
    }
    DMatrix::from_columns(&basis).resize(n, basis.len(), 0.0)
}

/// Column `c` of `m` as a vector.
pub fn column(m: &DMatrix<f64>, c: usize) -> DVector<f64> {
    m.column(c).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_constant_matrices() {
        for n in [3usize, 5, 7, 8, 13] {
            let j = DMatrix::from_element(n, n, 1.0 / n as f64);
            let q = column_space(&j);
            assert_eq!(q.ncols(), 1);
            let ones = DMatrix::from_element(n, 1, 1.0 / (n as f64).sqrt());
            assert!(max_principal_sine(&q, &ones) < 1e-12, "{n}");
            assert!((spectral_norm(&j) - 1.0).abs() < 1e-12);
            assert_eq!(null_space(&j, RANK_THRESHOLD).ncols(), n - 1);
        }
    }

    #[test]
    fn svd_reconstructs() {
        let m = DMatrix::from_fn(4, 6, |r, c| ((r * 7 + c * 3) % 5) as f64 - 2.0);
        let dec = svd(&m);
        let k = dec.s.len();
        let rec = dec.u.columns(0, k) * DMatrix::from_diagonal(&DVector::from_vec(dec.s.clone())) * dec.v.columns(0, k).transpose();
        assert!((rec - &m).amax() < 1e-12);
        let ns = null_space(&m, RANK_THRESHOLD);
        assert_eq!(ns.ncols(), 6 - rank(&m));
        assert!((&m * &ns).amax() < 1e-12);
    }

    #[test]
    fn eigen_sorted_and_orthonormal() {
        let m = DMatrix::from_fn(5, 5, |r, c| 1.0 / (1.0 + r as f64 + c as f64));
        let (vals, vecs) = symmetric_eigen(&m);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        assert!((vecs.transpose() * &vecs - DMatrix::identity(5, 5)).amax() < 1e-12);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vals));
        assert!((&vecs * d * vecs.transpose() - &m).amax() < 1e-12);
    }

    #[test]
    fn krylov_of_cycle_shift() {
        let n = 6;
        let p = DMatrix::from_fn(n, n, |r, c| if (c + 1) % n == r { 1.0 } else { 0.0 });
        let start = DMatrix::from_fn(n, 1, |r, _| if r == 0 { 1.0 } else { 0.0 });
        assert_eq!(krylov_closure(&[&p], &start, RANK_THRESHOLD).ncols(), n);
        let ones = DMatrix::from_element(n, 1, 1.0);
        assert_eq!(krylov_closure(&[&p], &ones, RANK_THRESHOLD).ncols(), 1);
    }
}
