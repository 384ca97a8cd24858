use crate::array::IntersectionArray;
use crate::error::{Error, Result};
use crate::spectral::SpectralData;
use crate::tolerance::Tolerance;

/// Krein parameters `q^h_{ij}` under a stated ordering of the eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct KreinTable {
    d: usize,
    q: Vec<f64>,
    /// Position `p` holds the eigenvalue at natural index `ordering[p]`.
    pub ordering: Vec<usize>,
    /// Multiplicities in the stated ordering.
    pub m: Vec<f64>,
    pub invariants: KreinInvariants,
}

/// Maximum residuals of the identities every Krein table satisfies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KreinInvariants {
    /// `q^h_{ij} = q^h_{ji}`.
    pub symmetry: f64,
    /// `q^h_{0j} = δ_hj`.
    pub trivial_row: f64,
    /// `q^0_{ij} = δ_ij m_i`.
    pub trivial_upper: f64,
    /// `Σ_i q^h_{ij} = m_j`.
    pub row_sums: f64,
    /// `m_h q^h_{ij} = m_i q^i_{jh}`.
    pub balance: f64,
    pub min_entry: f64,
}

impl KreinInvariants {
    pub fn max_residual(&self) -> f64 {
        self.symmetry
            .max(self.trivial_row)
            .max(self.trivial_upper)
            .max(self.row_sums)
            .max(self.balance)
    }
}

impl KreinTable {
    pub fn diameter(&self) -> usize {
        self.d
    }

    /// `q^h_{ij}`.
    pub fn get(&self, h: usize, i: usize, j: usize) -> f64 {
        let s = self.d + 1;
        self.q[(h * s + i) * s + j]
    }

    /// The zero test `|q^h_{ij}| <= ε max(1, m_h)`.
    pub fn is_zero(&self, h: usize, i: usize, j: usize, tol: &Tolerance) -> bool {
        tol.is_zero(self.get(h, i, j), self.m[h])
    }

    /// First entry below `-ε max(1, m_h)`, if any.
    pub fn krein_violation(&self, tol: &Tolerance) -> Option<(usize, usize, usize, f64)> {
        let d = self.d;
        for h in 0..=d {
            for i in 0..=d {
                for j in 0..=d {
                    let x = self.get(h, i, j);
                    if x < -tol.bound(self.m[h]) {
                        return Some((h, i, j, x));
                    }
                }
            }
        }
        None
    }

    pub fn krein_condition(&self, tol: &Tolerance) -> bool {
        self.krein_violation(tol).is_none()
    }

    /// Entries as `[h][i][j]`.
    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        let d = self.d;
        (0..=d)
            .map(|h| {
                (0..=d)
                    .map(|i| (0..=d).map(|j| self.get(h, i, j)).collect())
                    .collect()
            })
            .collect()
    }
}

pub(crate) fn check_ordering(ordering: &[usize], d: usize) -> Result<()> {
    let mut seen = vec![false; d + 1];
    if ordering.len() != d + 1 || ordering[0] != 0 {
        return Err(Error::BadOrdering(d));
    }
    for &j in ordering {
        if j > d || seen[j] {
            return Err(Error::BadOrdering(d));
        }
        seen[j] = true;
    }
    Ok(())
}

/// `q^h_{ij} = n^{-1} m_i m_j Σ_ℓ u_ℓ(θ_i) u_ℓ(θ_j) u_ℓ(θ_h) k_ℓ` under
/// `ordering`.
pub fn krein_parameters(
    ia: &IntersectionArray,
    sp: &SpectralData,
    ordering: &[usize],
) -> Result<KreinTable> {
    let d = ia.diameter();
    check_ordering(ordering, d)?;
    let s = sp.permuted(ordering);
    let k = &s.valencies;
    let size = d + 1;
    let mut q = vec![0.0; size * size * size];
    for h in 0..=d {
        for i in 0..=d {
            for j in 0..=d {
                let sum: f64 = (0..=d)
                    .map(|l| s.u[l][i] * s.u[l][j] * s.u[l][h] * k[l])
                    .sum();
                q[(h * size + i) * size + j] = s.m[i] * s.m[j] * sum / s.n;
            }
        }
    }
    let mut table = KreinTable {
        d,
        q,
        ordering: ordering.to_vec(),
        m: s.m.clone(),
        invariants: KreinInvariants {
            symmetry: 0.0,
            trivial_row: 0.0,
            trivial_upper: 0.0,
            row_sums: 0.0,
            balance: 0.0,
            min_entry: f64::INFINITY,
        },
    };
    table.invariants = invariants(&table);
    Ok(table)
}

fn invariants(t: &KreinTable) -> KreinInvariants {
    let d = t.d;
    let m = &t.m;
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut inv = KreinInvariants {
        symmetry: 0.0,
        trivial_row: 0.0,
        trivial_upper: 0.0,
        row_sums: 0.0,
        balance: 0.0,
        min_entry: f64::INFINITY,
    };
    for h in 0..=d {
        for i in 0..=d {
            for j in 0..=d {
                let x = t.get(h, i, j);
                inv.min_entry = inv.min_entry.min(x);
                inv.symmetry = inv.symmetry.max((x - t.get(h, j, i)).abs());
                inv.balance = inv
                    .balance
                    .max((m[h] * x - m[i] * t.get(i, j, h)).abs())
                    .max((m[h] * x - m[j] * t.get(j, h, i)).abs());
            }
            inv.trivial_row = inv.trivial_row.max((t.get(h, 0, i) - delta(h, i)).abs());
            inv.trivial_upper = inv
                .trivial_upper
                .max((t.get(0, h, i) - delta(h, i) * m[h]).abs());
            let sum: f64 = (0..=d).map(|l| t.get(h, l, i)).sum();
            inv.row_sums = inv.row_sums.max((sum - m[i]).abs());
        }
    }
    inv
}
