//! Godsil-McKay switching and the switched / partially switched / blended
//! hypercube constructions built from it.
//!
//! A partition `π = (C_1, ..., C_k, D)` admits switching when
//!
//! * (a) any two vertices of `C_i` have the same number of neighbours in
//!   `C_j`, for all `i, j` (including `i = j`), and
//! * (b) every `v ∈ D` has `0`, `n_i / 2` or `n_i` neighbours in `C_i`.
//!
//! Switching complements the adjacency between `v` and `C_i` whenever `v`
//! has exactly `n_i / 2` neighbours there. The result is cospectral to the
//! input.
//!
//! The switched 4-cube used throughout is the switch of `Q_4` on the distance
//! partition from `0000`: `C_1 = {0000}`, `C_2` the weight-2 vertices, `C_3`
//! the weight-3 vertices, `C_4 = {1111}`, and `D` the weight-1 vertices.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{cartesian_product, cube_order, hamming_weight, hypercube, Graph};
use nalgebra::DMatrix;

/// Cells `C_1..C_k` plus the residual set `D`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub cells: Vec<Vec<usize>>,
    pub residual: Vec<usize>,
}

impl Partition {
    /// Check that the cells and residual are disjoint, nonempty (residual
    /// excepted) and cover `0..m` exactly.
    pub fn validate(&self, m: usize) -> Result<()> {
        let mut owner = vec![false; m];
        let all = self.cells.iter().flatten().chain(self.residual.iter());
        for &v in all {
            if v >= m {
                return Err(Error::InvalidPartition(format!("vertex {v} outside 0..{m}")));
            }
            if owner[v] {
                return Err(Error::InvalidPartition(format!("vertex {v} listed twice")));
            }
            owner[v] = true;
        }
        if let Some(v) = owner.iter().position(|&seen| !seen) {
            return Err(Error::InvalidPartition(format!("vertex {v} not covered")));
        }
        if let Some(i) = self.cells.iter().position(Vec::is_empty) {
            return Err(Error::InvalidPartition(format!("cell {i} is empty")));
        }
        Ok(())
    }
}

/// A single failed switching condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Condition (a): `vertex ∈ C_i` has `count` neighbours in `C_j` while
    /// the first vertex of `C_i` has `expected`.
    CellRegularity {
        cell: usize,
        other: usize,
        vertex: usize,
        count: usize,
        expected: usize,
    },
    /// Condition (b): residual `vertex` has `count` neighbours in `C_i`,
    /// which is none of `0`, `n_i / 2`, `n_i`.
    ResidualCount {
        cell: usize,
        vertex: usize,
        count: usize,
        cell_size: usize,
    },
}

/// Outcome of checking a partition against the switching conditions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

fn neighbours_in(g: &Graph, v: usize, cell: &[usize]) -> usize {
    cell.iter().filter(|&&u| g.is_adjacent(v, u)).count()
}

/// Check conditions (a) and (b) for every cell pair and residual vertex.
pub fn validate_gm_partition(g: &Graph, p: &Partition) -> Result<PartitionReport> {
    if !g.is_unweighted() {
        return Err(Error::WeightedGraph);
    }
    p.validate(g.order())?;
    let mut violations = Vec::new();
    for (i, ci) in p.cells.iter().enumerate() {
        for (j, cj) in p.cells.iter().enumerate() {
            let expected = neighbours_in(g, ci[0], cj);
            for &v in &ci[1..] {
                let count = neighbours_in(g, v, cj);
                if count != expected {
                    violations.push(Violation::CellRegularity {
                        cell: i,
                        other: j,
                        vertex: v,
                        count,
                        expected,
                    });
                }
            }
        }
    }
    for &v in &p.residual {
        for (i, ci) in p.cells.iter().enumerate() {
            let count = neighbours_in(g, v, ci);
            let size = ci.len();
            let half = size % 2 == 0 && count * 2 == size;
            if count != 0 && count != size && !half {
                violations.push(Violation::ResidualCount {
                    cell: i,
                    vertex: v,
                    count,
                    cell_size: size,
                });
            }
        }
    }
    Ok(PartitionReport {
        ok: violations.is_empty(),
        violations,
    })
}

/// Apply Godsil-McKay switching. Fails with the validation report when the
/// partition does not satisfy the switching conditions.
pub fn gm_switch(g: &Graph, p: &Partition) -> Result<Graph> {
    let report = validate_gm_partition(g, p)?;
    if !report.ok {
        return Err(Error::SwitchingConditions(Box::new(report)));
    }
    let mut adj = g.adjacency().clone();
    for &v in &p.residual {
        for cell in &p.cells {
            if cell.len() % 2 == 0 && neighbours_in(g, v, cell) * 2 == cell.len() {
                for &u in cell {
                    let w = 1.0 - adj[(v, u)];
                    adj[(v, u)] = w;
                    adj[(u, v)] = w;
                }
            }
        }
    }
    Graph::from_adjacency(adj)
}

/// Distance partition of `Q_4` from vertex `0000`, with the weight-1
/// vertices as the residual set.
pub fn canonical_q4_partition() -> Partition {
    let by_weight = |w: u32| (0..16).filter(|&v| hamming_weight(v) == w).collect::<Vec<_>>();
    Partition {
        cells: vec![by_weight(0), by_weight(2), by_weight(3), by_weight(4)],
        residual: by_weight(1),
    }
}

/// The switched 4-cube: `Q_4` switched on [`canonical_q4_partition`].
pub fn switched_q4() -> Graph {
    gm_switch(&hypercube(4).expect("Q4 fits any cap"), &canonical_q4_partition())
        .expect("canonical partition satisfies the switching conditions")
}

/// `Q_{n-4} □ Q̃_4`; for `n = 4` this is the switched 4-cube itself.
pub fn switched_hypercube(n: usize) -> Result<Graph> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "switched hypercube needs n >= 4, got {n}"
        )));
    }
    cube_order(n)?;
    let q4s = switched_q4();
    if n == 4 {
        return Ok(q4s);
    }
    cartesian_product(&hypercube(n - 4)?, &q4s)
}

/// One 16-vertex diagonal block: `p·A(Q_4) + (1 − p)·A(Q̃_4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Block {
    Plain,
    Switched,
    Blend(f64),
}

impl Block {
    /// Weight `p` on the plain 4-cube.
    pub fn weight(self) -> f64 {
        match self {
            Block::Plain => 1.0,
            Block::Switched => 0.0,
            Block::Blend(p) => p,
        }
    }

    /// `1.0` → Plain, `0.0` → Switched, anything else in `[0, 1]` → Blend.
    pub fn from_weight(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidBlockSpec(format!("blend weight {p} outside [0, 1]")));
        }
        Ok(if p == 1.0 {
            Block::Plain
        } else if p == 0.0 {
            Block::Switched
        } else {
            Block::Blend(p)
        })
    }
}

/// Layout of a (partially switched, possibly blended) n-cube as `2^{n-4}`
/// diagonal 16-blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpec {
    n: usize,
    blocks: Vec<Block>,
}

impl BlockSpec {
    pub fn new(n: usize, blocks: Vec<Block>) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidBlockSpec(format!("n must be at least 4, got {n}")));
        }
        cube_order(n)?;
        let expected = 1usize << (n - 4);
        if blocks.len() != expected {
            return Err(Error::InvalidBlockSpec(format!(
                "n = {n} needs {expected} blocks, got {}",
                blocks.len()
            )));
        }
        for b in &blocks {
            Block::from_weight(b.weight())?;
        }
        Ok(Self { n, blocks })
    }

    pub fn from_weights(n: usize, weights: &[f64]) -> Result<Self> {
        let blocks = weights
            .iter()
            .map(|&p| Block::from_weight(p))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, blocks)
    }

    pub fn uniform(n: usize, block: Block) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidBlockSpec(format!("n must be at least 4, got {n}")));
        }
        cube_order(n)?;
        Self::new(n, vec![block; 1 << (n - 4)])
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn weights(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.weight()).collect()
    }

    /// Every block is Plain or Switched and both kinds occur.
    pub fn is_proper_partial(&self) -> bool {
        let plain = self.blocks.iter().any(|b| matches!(b, Block::Plain));
        let switched = self.blocks.iter().any(|b| matches!(b, Block::Switched));
        plain && switched && self.blocks.iter().all(|b| !matches!(b, Block::Blend(_)))
    }

    /// All `2^{2^{n-4}}` Plain/Switched patterns, in binary order with
    /// block 0 as the most significant digit (1 = Plain).
    pub fn all_patterns(n: usize) -> Result<Vec<Self>> {
        if n < 4 {
            return Err(Error::InvalidBlockSpec(format!("n must be at least 4, got {n}")));
        }
        let count = 1usize << (n - 4);
        if count > 16 {
            return Err(Error::InvalidBlockSpec(format!(
                "refusing to enumerate 2^{count} patterns"
            )));
        }
        (0..1usize << count)
            .map(|bits| {
                let blocks = (0..count)
                    .map(|j| {
                        if bits >> (count - 1 - j) & 1 == 1 {
                            Block::Plain
                        } else {
                            Block::Switched
                        }
                    })
                    .collect();
                Self::new(n, blocks)
            })
            .collect()
    }
}

/// `blockdiag(M_1, ..., M_{2^{n-4}}) + A(Q_{n-4}) ⊗ I_16`.
pub fn build_block_cube(spec: &BlockSpec) -> Result<Graph> {
    let n = spec.dimension();
    let m = cube_order(n)?;
    let q4 = hypercube(4)?;
    let q4s = switched_q4();
    let mut adj = if n > 4 {
        hypercube(n - 4)?
            .adjacency()
            .kronecker(&DMatrix::<f64>::identity(16, 16))
    } else {
        DMatrix::zeros(16, 16)
    };
    debug_assert_eq!(adj.nrows(), m);
    for (j, block) in spec.blocks().iter().enumerate() {
        let p = block.weight();
        let local = q4.adjacency() * p + q4s.adjacency() * (1.0 - p);
        adj.view_mut((16 * j, 16 * j), (16, 16)).copy_from(&local);
    }
    Graph::from_adjacency(adj)
}

/// The pair `(C + αE, C − αE)` with `C` the midpoint of `A(Q_4)` and
/// `A(Q̃_4)` and `E = A(Q̃_4) − A(Q_4)`. Both are nonnegative for
/// `0 ≤ α ≤ 1/2`.
pub fn midpoint_perturbations(alpha: f64) -> Result<(Graph, Graph)> {
    if !(0.0..=0.5).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} outside [0, 1/2]")));
    }
    let a1 = hypercube(4)?.into_adjacency();
    let a2 = switched_q4().into_adjacency();
    let mid = (&a1 + &a2) * 0.5;
    let diff = &a2 - &a1;
    Ok((
        Graph::from_adjacency(&mid + &diff * alpha)?,
        Graph::from_adjacency(&mid - &diff * alpha)?,
    ))
}

/// Largest graph handed to [`switching_partitions`].
pub const PARTITION_SEARCH_MAX_VERTICES: usize = 8;

/// Every partition of a small unweighted graph that satisfies the switching
/// conditions and actually changes the graph (some residual vertex sees
/// exactly half of an even cell).
///
/// Cells are enumerated as set partitions in restricted-growth order, with
/// at most one block designated as the residual set, so each partition
/// appears once up to the order of its cells.
pub fn switching_partitions(g: &Graph) -> Result<Vec<Partition>> {
    let m = g.order();
    if m > PARTITION_SEARCH_MAX_VERTICES {
        return Err(Error::InvalidArgument(format!(
            "partition search is limited to {PARTITION_SEARCH_MAX_VERTICES} vertices, got {m}"
        )));
    }
    if !g.is_unweighted() {
        return Err(Error::WeightedGraph);
    }
    let growth = restricted_growth_strings(m);
    let found: Vec<Vec<Partition>> = growth
        .par_iter()
        .map(|labels| {
            let blocks = labels.iter().copied().max().map_or(0, |b| b + 1);
            let mut groups = vec![Vec::new(); blocks];
            for (v, &b) in labels.iter().enumerate() {
                groups[b].push(v);
            }
            let mut out = Vec::new();
            // residual choice: none, or one of the blocks
            for residual in std::iter::once(None).chain((0..blocks).map(Some)) {
                let p = Partition {
                    cells: groups
                        .iter()
                        .enumerate()
                        .filter(|(b, _)| Some(*b) != residual)
                        .map(|(_, c)| c.clone())
                        .collect(),
                    residual: residual.map(|b| groups[b].clone()).unwrap_or_default(),
                };
                if switches_something(g, &p)
                    && validate_gm_partition(g, &p).map(|r| r.ok).unwrap_or(false)
                {
                    out.push(p);
                }
            }
            out
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}

fn switches_something(g: &Graph, p: &Partition) -> bool {
    p.residual.iter().any(|&v| {
        p.cells
            .iter()
            .any(|c| c.len() % 2 == 0 && neighbours_in(g, v, c) * 2 == c.len())
    })
}

fn restricted_growth_strings(m: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, max: usize, m: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == m {
            out.push(prefix.clone());
            return;
        }
        for b in 0..=max + 1 {
            prefix.push(b);
            extend(prefix, max.max(b), m, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if m == 0 {
        return out;
    }
    let mut prefix = vec![0];
    extend(&mut prefix, 0, m, &mut out);
    out
}
