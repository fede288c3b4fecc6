//! Dense weighted graphs and the hypercube family constructors.
//!
//! Vertices are indexed `0..m`. For graphs on `2^n` vertices, vertex `i` is
//! identified with the bit string of `i`, so hypercube adjacency is "differs
//! in exactly one bit" and the antipode of `i` is `!i & (2^n - 1)`.

use std::collections::{BTreeMap, VecDeque};
use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Default upper bound on the number of vertices of any constructed graph.
pub const DEFAULT_SIZE_CAP: usize = 1 << 14;

static SIZE_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_SIZE_CAP);

/// Current vertex cap applied by every constructor.
pub fn size_cap() -> usize {
    SIZE_CAP.load(Ordering::Relaxed)
}

/// Override the vertex cap. Intended to be called once at startup.
pub fn set_size_cap(cap: usize) {
    SIZE_CAP.store(cap.max(1), Ordering::Relaxed);
}

pub(crate) fn check_size(requested: usize) -> Result<()> {
    let cap = size_cap();
    if requested > cap {
        return Err(Error::SizeCap { requested, cap });
    }
    Ok(())
}

/// `2^n`, or a size-cap error if it would not fit.
pub(crate) fn cube_order(n: usize) -> Result<usize> {
    if n >= usize::BITS as usize - 1 {
        return Err(Error::SizeCap {
            requested: usize::MAX,
            cap: size_cap(),
        });
    }
    let m = 1usize << n;
    check_size(m)?;
    Ok(m)
}

/// A simple undirected graph with nonnegative edge weights, stored as its
/// dense adjacency matrix. The adjacency matrix doubles as the Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adj: DMatrix<f64>,
    labels: Option<BTreeMap<usize, String>>,
}

impl Graph {
    /// Wrap an adjacency matrix after checking it is square, symmetric,
    /// loop-free, finite and nonnegative.
    pub fn from_adjacency(adj: DMatrix<f64>) -> Result<Self> {
        let m = adj.nrows();
        if m == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        if adj.ncols() != m {
            return Err(Error::InvalidGraph(format!(
                "adjacency is {}x{}, not square",
                m,
                adj.ncols()
            )));
        }
        check_size(m)?;
        for j in 0..m {
            if adj[(j, j)] != 0.0 {
                return Err(Error::InvalidGraph(format!("loop at vertex {j}")));
            }
            for k in (j + 1)..m {
                let w = adj[(j, k)];
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::InvalidGraph(format!(
                        "weight {w} on ({j}, {k}) is not a nonnegative finite number"
                    )));
                }
                if w != adj[(k, j)] {
                    return Err(Error::InvalidGraph(format!(
                        "asymmetric weights on ({j}, {k}): {w} vs {}",
                        adj[(k, j)]
                    )));
                }
            }
        }
        Ok(Self { adj, labels: None })
    }

    /// Build a graph on `m` vertices from `(j, k, w)` triples with `j < k`.
    /// Duplicated pairs, loops and nonpositive weights are rejected.
    pub fn from_edges(m: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        check_size(m)?;
        let mut adj = DMatrix::zeros(m, m);
        for &(j, k, w) in edges {
            if j >= m || k >= m {
                return Err(Error::InvalidGraph(format!(
                    "edge ({j}, {k}) references a vertex outside 0..{m}"
                )));
            }
            if j == k {
                return Err(Error::InvalidGraph(format!("loop at vertex {j}")));
            }
            if j > k {
                return Err(Error::InvalidGraph(format!(
                    "edge ({j}, {k}) must be listed with i < j"
                )));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidGraph(format!(
                    "edge ({j}, {k}) has non-positive weight {w}"
                )));
            }
            if adj[(j, k)] != 0.0 {
                return Err(Error::InvalidGraph(format!("duplicate edge ({j}, {k})")));
            }
            adj[(j, k)] = w;
            adj[(k, j)] = w;
        }
        Ok(Self { adj, labels: None })
    }

    pub fn with_labels(mut self, labels: BTreeMap<usize, String>) -> Result<Self> {
        if let Some((&v, _)) = labels.iter().find(|(&v, _)| v >= self.order()) {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                order: self.order(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&BTreeMap<usize, String>> {
        self.labels.as_ref()
    }

    /// Number of vertices.
    pub fn order(&self) -> usize {
        self.adj.nrows()
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adj
    }

    pub fn into_adjacency(self) -> DMatrix<f64> {
        self.adj
    }

    pub fn weight(&self, j: usize, k: usize) -> f64 {
        self.adj[(j, k)]
    }

    pub fn is_adjacent(&self, j: usize, k: usize) -> bool {
        self.adj[(j, k)] != 0.0
    }

    /// True when every weight is 0 or 1.
    pub fn is_unweighted(&self) -> bool {
        self.adj.iter().all(|&w| w == 0.0 || w == 1.0)
    }

    /// Number of neighbours of `v` (edges with nonzero weight).
    pub fn degree(&self, v: usize) -> usize {
        self.adj.row(v).iter().filter(|&&w| w != 0.0).count()
    }

    /// Sum of the weights at `v`.
    pub fn weighted_degree(&self, v: usize) -> f64 {
        self.adj.row(v).sum()
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj
            .row(v)
            .iter()
            .enumerate()
            .filter(|(_, &w)| w != 0.0)
            .map(|(k, _)| k)
            .collect::<Vec<_>>()
            .into_iter()
    }

    /// Edges as `(j, k, w)` with `j < k`, in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let m = self.order();
        let mut out = Vec::new();
        for j in 0..m {
            for k in (j + 1)..m {
                let w = self.adj[(j, k)];
                if w != 0.0 {
                    out.push((j, k, w));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    /// Largest absolute entry of the adjacency matrix.
    pub fn max_weight(&self) -> f64 {
        self.adj.amax()
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.order() {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                order: self.order(),
            });
        }
        Ok(())
    }

    /// `log2` of the vertex count, when it is a power of two.
    pub fn cube_dimension(&self) -> Option<usize> {
        let m = self.order();
        m.is_power_of_two().then(|| m.trailing_zeros() as usize)
    }
}

/// Connection set of a cubelike graph: distinct nonzero vectors of `Z_2^n`,
/// each stored as the integer whose bits are its coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionSet {
    n: usize,
    elements: Vec<usize>,
}

impl ConnectionSet {
    pub fn new(n: usize, elements: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConnectionSet("dimension must be positive".into()));
        }
        if n >= usize::BITS as usize - 1 {
            return Err(Error::InvalidConnectionSet(format!("dimension {n} too large")));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &c in &elements {
            if c == 0 {
                return Err(Error::InvalidConnectionSet("contains the zero vector".into()));
            }
            if c >> n != 0 {
                return Err(Error::InvalidConnectionSet(format!(
                    "element {c:#b} has more than {n} bits"
                )));
            }
            if !seen.insert(c) {
                return Err(Error::InvalidConnectionSet(format!("duplicate element {c:#b}")));
            }
        }
        Ok(Self { n, elements })
    }

    /// The standard basis `{e_1, ..., e_n}`.
    pub fn standard_basis(n: usize) -> Result<Self> {
        Self::new(n, (0..n).map(|b| 1usize << b).collect())
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Dimension of the span of the elements over GF(2).
    pub fn rank(&self) -> usize {
        gf2_rank(&self.elements)
    }

    /// True when the elements span `Z_2^n`.
    pub fn spans(&self) -> bool {
        self.rank() == self.n
    }
}

/// Rank over GF(2) of a list of bit vectors packed into integers.
pub fn gf2_rank(vectors: &[usize]) -> usize {
    // xor basis indexed by leading bit
    let mut basis = [0usize; usize::BITS as usize];
    let mut rank = 0;
    for &v in vectors {
        let mut x = v;
        while x != 0 {
            let top = (usize::BITS - 1 - x.leading_zeros()) as usize;
            if basis[top] == 0 {
                basis[top] = x;
                rank += 1;
                break;
            }
            x ^= basis[top];
        }
    }
    rank
}

/// The n-cube `Q_n` on `2^n` vertices in binary order.
pub fn hypercube(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidArgument("hypercube dimension must be at least 1".into()));
    }
    cubelike(&ConnectionSet::standard_basis(n)?)
}

/// Cayley graph of `Z_2^n`: `x ~ y` iff `x XOR y` lies in the connection set.
pub fn cubelike(c: &ConnectionSet) -> Result<Graph> {
    let m = cube_order(c.dimension())?;
    let mut adj = DMatrix::zeros(m, m);
    for x in 0..m {
        for &e in c.elements() {
            adj[(x, x ^ e)] = 1.0;
        }
    }
    Graph::from_adjacency(adj)
}

/// Cartesian product `G1 □ G2` with adjacency `A1 ⊗ I + I ⊗ A2`; vertex
/// `(j1, j2)` maps to index `j1 * m2 + j2`.
pub fn cartesian_product(g1: &Graph, g2: &Graph) -> Result<Graph> {
    let (m1, m2) = (g1.order(), g2.order());
    let m = m1
        .checked_mul(m2)
        .ok_or(Error::SizeCap { requested: usize::MAX, cap: size_cap() })?;
    check_size(m)?;
    let eye1 = DMatrix::<f64>::identity(m1, m1);
    let eye2 = DMatrix::<f64>::identity(m2, m2);
    let adj = g1.adjacency().kronecker(&eye2) + eye1.kronecker(g2.adjacency());
    Graph::from_adjacency(adj)
}

/// Weighted sum `Σ c_r A(G_r)` with `c_r ∈ [0, 1]` summing to one.
pub fn convex_combination(terms: &[(f64, &Graph)]) -> Result<Graph> {
    let (_, first) = terms
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty convex combination".into()))?;
    let m = first.order();
    let mut total = 0.0;
    let mut adj = DMatrix::zeros(m, m);
    for &(c, g) in terms {
        if g.order() != m {
            return Err(Error::SizeMismatch(m, g.order()));
        }
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::InvalidArgument(format!("coefficient {c} outside [0, 1]")));
        }
        total += c;
        adj += g.adjacency() * c;
    }
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("coefficients sum to {total}, not 1")));
    }
    Graph::from_adjacency(adj)
}

/// True iff the graph whose edges are the nonzero weights is connected.
pub fn is_connected(g: &Graph) -> bool {
    let m = g.order();
    let mut seen = vec![false; m];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut reached = 1;
    while let Some(v) = queue.pop_front() {
        for u in 0..m {
            if !seen[u] && g.is_adjacent(v, u) {
                seen[u] = true;
                reached += 1;
                queue.push_back(u);
            }
        }
    }
    reached == m
}

/// Hamming weight of a vertex label.
pub fn hamming_weight(v: usize) -> u32 {
    v.count_ones()
}

/// Antipodal vertex of `v` in the n-cube: all `n` bits flipped.
pub fn complement(v: usize, n: usize) -> usize {
    !v & ((1usize << n) - 1)
}
