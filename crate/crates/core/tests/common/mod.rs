//! Independent oracles shared by the integration and acceptance tests.
//!
//! Nothing here calls into the library's eigensolver or propagator code:
//! eigenvalues come from a cyclic Jacobi sweep, matrix exponentials from a
//! scaled Taylor series, and cubelike spectra from character sums.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use pstlab_core::graph::{self, ConnectionSet, Graph};
use rand::Rng;

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations,
/// sorted decreasing.
pub fn jacobi_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut m = a.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| m[(p, q)] * m[(p, q)])
            .sum();
        if off.sqrt() < 1e-14 * (1.0 + m.norm()) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut out: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    out.sort_by(|x, y| y.total_cmp(x));
    out
}

/// `e^{itA}` by scaling and squaring a truncated Taylor series.
pub fn expm_taylor(a: &DMatrix<f64>, t: f64) -> DMatrix<Complex64> {
    let n = a.nrows();
    let norm = a.abs().column_sum().max() * t.abs();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = t / f64::from(2u32.pow(squarings));
    let x = a.map(|v| Complex64::new(0.0, v * scale));
    let eye = DMatrix::<Complex64>::identity(n, n);
    let mut term = eye.clone();
    let mut sum = eye;
    for k in 1..=30 {
        term = &term * &x / Complex64::new(f64::from(k), 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Fidelity `|U[j][k]|²` from the Taylor oracle.
pub fn oracle_fidelity(a: &DMatrix<f64>, j: usize, k: usize, t: f64) -> f64 {
    expm_taylor(a, t)[(j, k)].norm_sqr()
}

/// Spectrum of `Q_n`: `n − 2i` with multiplicity `C(n, i)`.
pub fn hypercube_spectrum(n: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..=n {
        let mult = binomial(n, i);
        out.extend(std::iter::repeat(n as f64 - 2.0 * i as f64).take(mult));
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Eigenvalues of a cubelike graph as character sums
/// `Σ_{c ∈ C} (−1)^{c·x}`, sorted decreasing.
pub fn character_spectrum(c: &ConnectionSet) -> Vec<f64> {
    let mut out: Vec<f64> = (0..1usize << c.dimension())
        .map(|x| {
            c.elements()
                .iter()
                .map(|&e| if (e & x).count_ones() % 2 == 0 { 1.0 } else { -1.0 })
                .sum()
        })
        .collect();
    out.sort_by(|x, y| y.total_cmp(x));
    out
}

pub fn random_connection_set<R: Rng>(rng: &mut R, n: usize) -> ConnectionSet {
    loop {
        let elements: Vec<usize> = (1..1usize << n).filter(|_| rng.gen_bool(0.35)).collect();
        if !elements.is_empty() {
            return ConnectionSet::new(n, elements).unwrap();
        }
    }
}

/// Random simple graph, optionally with weights drawn from `(0.1, 2)`.
pub fn random_graph<R: Rng>(rng: &mut R, m: usize, density: f64, weighted: bool) -> Graph {
    let mut edges = Vec::new();
    for j in 0..m {
        for k in (j + 1)..m {
            if rng.gen_bool(density) {
                let w = if weighted { rng.gen_range(0.1..2.0) } else { 1.0 };
                edges.push((j, k, w));
            }
        }
    }
    Graph::from_edges(m, &edges).unwrap()
}

/// Connected proper spanning subgraph of `g` with at least one edge removed.
pub fn random_connected_edge_subgraph<R: Rng>(rng: &mut R, g: &Graph) -> Graph {
    loop {
        let edges = g.edges();
        let drop = rng.gen_range(1..=4);
        let mut keep = edges.clone();
        for _ in 0..drop {
            let i = rng.gen_range(0..keep.len());
            keep.swap_remove(i);
        }
        let sub = Graph::from_edges(g.order(), &keep).unwrap();
        if graph::is_connected(&sub) {
            return sub;
        }
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn complex_row_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, row: usize) -> f64 {
    (0..a.ncols())
        .map(|c| (a[(row, c)] - b[(row, c)]).norm())
        .fold(0.0, f64::max)
}
