//! Concrete graphs: construction, distance-regularity, the Bose–Mesner and
//! subconstituent matrices, and the identities they satisfy.

mod algebra;
mod balanced;
mod drg;
mod function_algebra;
mod identities;

pub use algebra::{bose_mesner, bose_mesner_with_cap, subconstituent, GraphAlgebra, Subconstituent, DEFAULT_MAX_VERTICES};
pub use balanced::{balanced_set_check, BalancedSetReport, BalancedWitness};
pub use drg::{check_drg, DrgCheck, DrgWitness, IntersectionCounts};
pub use function_algebra::{
    associator, filtration_qpoly_check, hadamard_span_check, is_nondegenerate, norton_product,
    FiltrationLevel, FiltrationReport, HadamardSpan, StandardVector,
};
pub use identities::verify_identities;

use std::collections::VecDeque;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest vertex count for which a distance table is built.
pub const MAX_GRAPH_VERTICES: usize = 8192;

/// A finite, simple, connected graph with its distance table.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
    dist: Vec<u16>,
    diameter: usize,
}

impl Graph {
    /// Builds a graph from undirected edges, rejecting loops, repeated
    /// edges, out-of-range ids and disconnected inputs.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Graph("graph has no vertices".into()));
        }
        if n > MAX_GRAPH_VERTICES {
            return Err(Error::TooLarge { n, cap: MAX_GRAPH_VERTICES });
        }
        let mut adj = vec![Vec::new(); n];
        for (idx, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::Graph(format!("edge {idx} ({u}, {v}) has a vertex outside 0..{n}")));
            }
            if u == v {
                return Err(Error::Graph(format!("edge {idx} is a loop at {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::Graph(format!("edge ({u}, {}) appears twice", w[0])));
            }
        }
        let mut dist = vec![u16::MAX; n * n];
        let mut queue = VecDeque::new();
        let mut diameter = 0;
        for s in 0..n {
            let row = &mut dist[s * n..(s + 1) * n];
            row[s] = 0;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                let du = row[u];
                for &w in &adj[u] {
                    if row[w] == u16::MAX {
                        row[w] = du + 1;
                        queue.push_back(w);
                    }
                }
            }
            if let Some(t) = row.iter().position(|&d| d == u16::MAX) {
                return Err(Error::Graph(format!("graph is disconnected: no path from {s} to {t}")));
            }
            diameter = diameter.max(*row.iter().max().unwrap() as usize);
        }
        Ok(Self { n, adj, dist, diameter })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diameter(&self) -> usize {
        self.diameter
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn distance(&self, y: usize, z: usize) -> usize {
        self.dist[y * self.n + z] as usize
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    /// `Γ_i(x)` in increasing order.
    pub fn shell(&self, x: usize, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&y| self.distance(x, y) == i).collect()
    }

    /// The 0/1 distance-`i` matrix.
    pub fn distance_matrix(&self, i: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |y, z| if self.distance(y, z) == i { 1.0 } else { 0.0 })
    }

    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        self.distance_matrix(1)
    }
}

/// Parses the edge-list format: a header `n m` followed by `m` lines `u v`.
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let parse_pair = |lineno: usize, line: &str| -> Result<(usize, usize)> {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                position: lineno,
                message: format!("expected two integers, found {:?}", line),
            });
        }
        let num = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::Parse {
                position: lineno,
                message: format!("{s:?} is not a nonnegative integer"),
            })
        };
        Ok((num(fields[0])?, num(fields[1])?))
    };
    let (lineno, header) = lines.next().ok_or_else(|| Error::Parse {
        position: 1,
        message: "missing header line \"n m\"".into(),
    })?;
    let (n, m) = parse_pair(lineno, header)?;
    let mut edges = Vec::with_capacity(m);
    for (lineno, line) in lines {
        if edges.len() == m {
            return Err(Error::Parse {
                position: lineno,
                message: format!("more than the {m} edges announced in the header"),
            });
        }
        edges.push(parse_pair(lineno, line)?);
    }
    if edges.len() != m {
        return Err(Error::Parse {
            position: text.lines().count().max(1),
            message: format!("header announces {m} edges but {} were given", edges.len()),
        });
    }
    Graph::from_edges(n, &edges)
}

/// Built-in graph families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Hypercube { d: usize },
    Hamming { d: usize, q: usize },
    Johnson { n: usize, k: usize },
    Cycle { n: usize },
}

impl Family {
    /// The family with Johnson parameters normalized to `k <= n/2` and the
    /// hypercube written as `H(D, 2)`.
    pub fn normalized(self) -> Self {
        match self {
            Family::Hypercube { d } => Family::Hamming { d, q: 2 },
            Family::Johnson { n, k } if k <= n => Family::Johnson { n, k: k.min(n - k) },
            f => f,
        }
    }

    pub fn name(&self) -> String {
        match *self {
            Family::Hypercube { d } => format!("hypercube({d})"),
            Family::Hamming { d, q } => format!("hamming({d},{q})"),
            Family::Johnson { n, k } => format!("johnson({n},{k})"),
            Family::Cycle { n } => format!("cycle({n})"),
        }
    }
}

pub fn build_family(family: Family) -> Result<Graph> {
    let g = match family.normalized() {
        Family::Hamming { d, q } => hamming(d, q)?,
        Family::Johnson { n, k } => johnson(n, k)?,
        Family::Cycle { n } => {
            if n < 3 {
                return Err(Error::Graph(format!("cycle needs at least 3 vertices, got {n}")));
            }
            let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            Graph::from_edges(n, &edges)?
        }
        Family::Hypercube { .. } => unreachable!(),
    };
    if g.diameter() < 3 {
        return Err(Error::DiameterTooSmall(g.diameter()));
    }
    Ok(g)
}

fn hamming(d: usize, q: usize) -> Result<Graph> {
    if d == 0 || q < 2 {
        return Err(Error::Graph(format!("hamming needs D >= 1 and q >= 2, got D = {d}, q = {q}")));
    }
    let n = (q as u128).checked_pow(d as u32).filter(|&n| n <= MAX_GRAPH_VERTICES as u128);
    let Some(n) = n.map(|n| n as usize) else {
        return Err(Error::TooLarge { n: usize::MAX, cap: MAX_GRAPH_VERTICES });
    };
    let mut edges = Vec::new();
    for v in 0..n {
        let mut place = 1;
        for _ in 0..d {
            let digit = (v / place) % q;
            for other in digit + 1..q {
                edges.push((v, v + (other - digit) * place));
            }
            place *= q;
        }
    }
    Graph::from_edges(n, &edges)
}

fn johnson(n: usize, k: usize) -> Result<Graph> {
    if k == 0 || k > n || n > 63 {
        return Err(Error::Graph(format!("johnson needs 1 <= k <= n <= 63, got n = {n}, k = {k}")));
    }
    let subsets: Vec<u64> = (0u64..1 << n).filter(|s| s.count_ones() as usize == k).take(MAX_GRAPH_VERTICES + 1).collect();
    if subsets.len() > MAX_GRAPH_VERTICES {
        return Err(Error::TooLarge { n: subsets.len(), cap: MAX_GRAPH_VERTICES });
    }
    let mut edges = Vec::new();
    for (i, a) in subsets.iter().enumerate() {
        for (j, b) in subsets.iter().enumerate().skip(i + 1) {
            if (a & b).count_ones() as usize == k - 1 {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(subsets.len(), &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hypercube_three() {
        let g = build_family(Family::Hypercube { d: 3 }).unwrap();
        assert_eq!((g.n(), g.edge_count(), g.diameter()), (8, 12, 3));
        assert_eq!(g, build_family(Family::Hamming { d: 3, q: 2 }).unwrap());
    }

    #[test]
    fn johnson_eight_three() {
        let g = build_family(Family::Johnson { n: 8, k: 3 }).unwrap();
        assert_eq!(g.n(), 56);
        assert!((0..g.n()).all(|v| g.degree(v) == 15));
        assert_eq!(g.diameter(), 3);
        assert_eq!(g, build_family(Family::Johnson { n: 8, k: 5 }).unwrap());
    }

    #[test]
    fn small_diameter_rejected() {
        assert!(matches!(build_family(Family::Cycle { n: 4 }), Err(Error::DiameterTooSmall(2))));
        assert!(matches!(build_family(Family::Johnson { n: 5, k: 2 }), Err(Error::DiameterTooSmall(2))));
        assert!(build_family(Family::Cycle { n: 7 }).is_ok());
    }

    #[test]
    fn hamming_three_three() {
        let g = build_family(Family::Hamming { d: 3, q: 3 }).unwrap();
        assert_eq!((g.n(), g.diameter()), (27, 3));
        assert!((0..27).all(|v| g.degree(v) == 6));
    }

    #[test]
    fn edge_list_errors() {
        assert!(parse_edge_list("3 2\n0 1\n1 2\n").is_ok());
        assert!(matches!(parse_edge_list("3 2\n0 1\n0 1\n"), Err(Error::Graph(_))));
        assert!(matches!(parse_edge_list("3 1\n0 0\n"), Err(Error::Graph(_))));
        assert!(matches!(parse_edge_list("4 2\n0 1\n2 3\n"), Err(Error::Graph(_))));
        assert!(matches!(parse_edge_list("3 2\n0 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_edge_list("3 2\n0 x\n1 2\n"), Err(Error::Parse { position: 2, .. })));
        assert!(matches!(parse_edge_list("3 1\n0 5\n"), Err(Error::Graph(_))));
        assert!(matches!(parse_edge_list(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn distances_symmetric_with_zero_diagonal() {
        let g = build_family(Family::Cycle { n: 9 }).unwrap();
        for y in 0..9 {
            assert_eq!(g.distance(y, y), 0);
            for z in 0..9 {
                assert_eq!(g.distance(y, z), g.distance(z, y));
            }
        }
        assert_eq!(g.diameter(), 4);
    }

    #[test]
    fn edges_round_trip() {
        let g = build_family(Family::Hypercube { d: 4 }).unwrap();
        let again = Graph::from_edges(g.n(), &g.edges()).unwrap();
        assert_eq!(g, again);
    }
}
