use crate::array::{rational, IntersectionArray};
use crate::error::Result;
use crate::graph::Graph;

/// Brute-force counts `|Γ_i(y) ∩ Γ_j(z)|`, one value per `(h, i, j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionCounts {
    d: usize,
    counts: Vec<usize>,
}

impl IntersectionCounts {
    pub fn diameter(&self) -> usize {
        self.d
    }

    pub fn get(&self, h: usize, i: usize, j: usize) -> usize {
        let s = self.d + 1;
        self.counts[(h * s + i) * s + j]
    }
}

/// A pair `(y, z)` whose counts differ from those of the first pair
/// `(y0, z0)` found at the same distance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DrgWitness {
    pub y: usize,
    pub z: usize,
    pub reference: (usize, usize),
    pub h: usize,
    pub i: usize,
    pub j: usize,
    pub count: usize,
    pub reference_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DrgCheck {
    Regular {
        b: Vec<usize>,
        c: Vec<usize>,
        counts: IntersectionCounts,
    },
    Violation(DrgWitness),
}

impl DrgCheck {
    pub fn is_regular(&self) -> bool {
        matches!(self, DrgCheck::Regular { .. })
    }

    /// The intersection array, which exists when the graph is distance-regular
    /// with diameter at least 3.
    pub fn array(&self) -> Option<Result<IntersectionArray>> {
        match self {
            DrgCheck::Regular { b, c, .. } => {
                let b = b.iter().map(|&x| rational(x as i64)).collect();
                let c = c.iter().map(|&x| rational(x as i64)).collect();
                Some(IntersectionArray::new(b, c))
            }
            DrgCheck::Violation(_) => None,
        }
    }

    pub fn witness(&self) -> Option<&DrgWitness> {
        match self {
            DrgCheck::Violation(w) => Some(w),
            DrgCheck::Regular { .. } => None,
        }
    }
}

/// Counts `|Γ_i(y) ∩ Γ_j(z)|` for every ordered pair and reports either the
/// common values or the first pair that disagrees.
/// Reference pair and its cell counts for one distance.
type Reference = ((usize, usize), Vec<usize>);

pub fn check_drg(g: &Graph) -> DrgCheck {
    let n = g.n();
    let d = g.diameter();
    let s = d + 1;
    let mut table: Vec<Option<Reference>> = vec![None; s];
    let mut cell = vec![0usize; s * s];
    for y in 0..n {
        for z in 0..n {
            cell.iter_mut().for_each(|c| *c = 0);
            for w in 0..n {
                cell[g.distance(y, w) * s + g.distance(z, w)] += 1;
            }
            let h = g.distance(y, z);
            match &table[h] {
                None => table[h] = Some(((y, z), cell.clone())),
                Some((reference, first)) => {
                    if let Some(pos) = (0..s * s).find(|&p| first[p] != cell[p]) {
                        return DrgCheck::Violation(DrgWitness {
                            y,
                            z,
                            reference: *reference,
                            h,
                            i: pos / s,
                            j: pos % s,
                            count: cell[pos],
                            reference_count: first[pos],
                        });
                    }
                }
            }
        }
    }
    let mut counts = Vec::with_capacity(s * s * s);
    for entry in &table {
        counts.extend_from_slice(&entry.as_ref().expect("every distance is realized").1);
    }
    let counts = IntersectionCounts { d, counts };
    let b = (0..d).map(|i| counts.get(i, 1, i + 1)).collect();
    let c = (1..=d).map(|i| counts.get(i, 1, i - 1)).collect();
    DrgCheck::Regular { b, c, counts }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::{intersection_numbers, parse_array, to_f64};
    use crate::graph::{build_family, Family};

    fn array_text(check: &DrgCheck) -> String {
        check.array().unwrap().unwrap().to_string()
    }

    #[test]
    fn hypercube_four() {
        let g = build_family(Family::Hypercube { d: 4 }).unwrap();
        let check = check_drg(&g);
        assert_eq!(array_text(&check), parse_array("4,3,2,1;1,2,3,4").unwrap().to_string());
    }

    #[test]
    fn heptagon() {
        let g = build_family(Family::Cycle { n: 7 }).unwrap();
        assert_eq!(array_text(&check_drg(&g)), parse_array("2,1,1;1,1,1").unwrap().to_string());
    }

    #[test]
    fn cube_minus_edge_has_witness() {
        let g = build_family(Family::Hypercube { d: 3 }).unwrap();
        let edges: Vec<_> = g.edges().into_iter().skip(1).collect();
        let broken = Graph::from_edges(8, &edges).unwrap();
        let w = check_drg(&broken).witness().cloned().expect("violation");
        assert_ne!(w.count, w.reference_count);
        assert_eq!(broken.distance(w.y, w.z), w.h);
        assert_eq!(broken.distance(w.reference.0, w.reference.1), w.h);
    }

    #[test]
    fn counts_match_exact_table() {
        for f in [
            Family::Hypercube { d: 3 },
            Family::Hamming { d: 3, q: 3 },
            Family::Johnson { n: 8, k: 3 },
            Family::Cycle { n: 7 },
        ] {
            let g = build_family(f).unwrap();
            let check = check_drg(&g);
            let ia = check.array().unwrap().unwrap();
            let p = intersection_numbers(&ia);
            let DrgCheck::Regular { counts, .. } = &check else { unreachable!() };
            let d = ia.diameter();
            for h in 0..=d {
                for i in 0..=d {
                    for j in 0..=d {
                        assert_eq!(counts.get(h, i, j) as f64, to_f64(p.get(h, i, j)), "{f:?}");
                    }
                }
            }
        }
    }
}
