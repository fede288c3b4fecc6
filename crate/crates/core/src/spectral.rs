//! Dense symmetric eigendecomposition and the spectral predicates built on
//! it: cospectrality, standard-Hadamard diagonalizability, minimal
//! polynomials, eigenvalue supports and the integer-spectrum obstruction to
//! perfect state transfer.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{cube_order, Graph};

/// Default tolerance for merging numerically equal eigenvalues.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;
/// Default threshold on `‖E_r|u⟩‖` for eigenvalue-support membership.
pub const DEFAULT_PROJ_TOL: f64 = 1e-8;
/// Default absolute tolerance for classifying an eigenvalue as an integer.
pub const DEFAULT_INT_TOL: f64 = 1e-6;

/// `A = Σ_r λ_r E_r` with distinct eigenvalues in decreasing order and an
/// orthonormal eigenbasis for each eigenspace.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    multiplicities: Vec<usize>,
    bases: Vec<DMatrix<f64>>,
    cluster_tol: f64,
}

impl SpectralDecomposition {
    /// Distinct eigenvalues `λ_1 > ... > λ_s`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn cluster_tol(&self) -> f64 {
        self.cluster_tol
    }

    /// Number of distinct eigenvalues.
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn order(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// Orthonormal basis of the `r`-th eigenspace, one column per vector.
    pub fn eigenbasis(&self, r: usize) -> &DMatrix<f64> {
        &self.bases[r]
    }

    /// Orthogonal projector `E_r` onto the `r`-th eigenspace.
    pub fn projector(&self, r: usize) -> DMatrix<f64> {
        let w = &self.bases[r];
        w * w.transpose()
    }

    /// All eigenvalues with multiplicity, sorted decreasing.
    pub fn spectrum(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(&l, &k)| std::iter::repeat(l).take(k))
            .collect()
    }

    /// Full eigenvector matrix (columns grouped by eigenspace) and the
    /// matching eigenvalue for each column.
    pub fn eigenvectors(&self) -> (DMatrix<f64>, Vec<f64>) {
        let m = self.order();
        let mut v = DMatrix::zeros(m, m);
        let mut col = 0;
        for w in &self.bases {
            v.view_mut((0, col), (m, w.ncols())).copy_from(w);
            col += w.ncols();
        }
        (v, self.spectrum())
    }

    /// `Σ_r f(λ_r) E_r`.
    pub fn apply_function(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let (v, lambdas) = self.eigenvectors();
        let mut scaled = v.clone();
        for (mut column, &l) in scaled.column_iter_mut().zip(&lambdas) {
            column *= f(l);
        }
        scaled * v.transpose()
    }

    /// `Σ_r λ_r E_r`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.apply_function(|l| l)
    }

    /// `‖E_r|u⟩‖` for every eigenspace. Equal to the norm of row `u` of the
    /// eigenspace basis, so it does not depend on the choice of basis.
    pub fn projection_norms(&self, u: usize) -> Vec<f64> {
        self.bases.iter().map(|w| w.row(u).norm()).collect()
    }

    /// Distinct eigenvalues whose projector does not annihilate `|u⟩`.
    pub fn support(&self, u: usize, proj_tol: f64) -> Vec<f64> {
        self.projection_norms(u)
            .into_iter()
            .zip(&self.eigenvalues)
            .filter(|(norm, _)| *norm > proj_tol)
            .map(|(_, &l)| l)
            .collect()
    }

    /// Worst-case deviations of the projector identities:
    /// `(max_{r≠t} ‖E_r E_t‖, max_r ‖E_r² − E_r‖, ‖Σ E_r − I‖)`, max norms.
    pub fn projector_residuals(&self) -> (f64, f64, f64) {
        let m = self.order();
        let projectors: Vec<_> = (0..self.len()).map(|r| self.projector(r)).collect();
        let mut cross: f64 = 0.0;
        let mut idem: f64 = 0.0;
        let mut sum = DMatrix::<f64>::zeros(m, m);
        for (r, er) in projectors.iter().enumerate() {
            idem = idem.max((er * er - er).amax());
            for et in &projectors[r + 1..] {
                cross = cross.max((er * et).amax());
            }
            sum += er;
        }
        let complete = (sum - DMatrix::<f64>::identity(m, m)).amax();
        (cross, idem, complete)
    }

    /// Check reconstruction and orthonormality against `a`.
    pub fn verify(&self, a: &DMatrix<f64>) -> Result<()> {
        let m = self.order();
        if m != a.nrows() {
            return Err(Error::Numerical(format!(
                "multiplicities sum to {m}, expected {}",
                a.nrows()
            )));
        }
        let recon = (a - self.reconstruct()).amax();
        let bound = 10.0 * self.cluster_tol * a.amax().max(1.0);
        if recon > bound {
            return Err(Error::Numerical(format!(
                "reconstruction error {recon:e} exceeds {bound:e}"
            )));
        }
        let (v, _) = self.eigenvectors();
        let ortho = (v.transpose() * &v - DMatrix::<f64>::identity(m, m)).amax();
        if ortho > 10.0 * self.cluster_tol {
            return Err(Error::Numerical(format!(
                "eigenbasis orthonormality error {ortho:e}"
            )));
        }
        Ok(())
    }

    pub fn report(&self) -> SpectralReport {
        SpectralReport {
            eigenvalues: self.eigenvalues.clone(),
            multiplicities: self.multiplicities.clone(),
            cluster_tol: self.cluster_tol,
        }
    }
}

/// Serializable summary of a decomposition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub cluster_tol: f64,
}

fn symmetric_eigen(a: &DMatrix<f64>) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    let max_iter = 1000 * a.nrows().max(1);
    SymmetricEigen::try_new(a.clone(), f64::EPSILON, max_iter)
        .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))
}

/// Eigendecomposition of the adjacency matrix, with eigenvalues within
/// `cluster_tol · max(1, |λ|)` of a cluster's running mean merged into it.
pub fn eigendecompose(g: &Graph, cluster_tol: f64) -> Result<SpectralDecomposition> {
    decompose_matrix(g.adjacency(), cluster_tol)
}

/// As [`eigendecompose`], for any real symmetric matrix.
pub fn decompose_matrix(a: &DMatrix<f64>, cluster_tol: f64) -> Result<SpectralDecomposition> {
    if !(cluster_tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "cluster tolerance must be positive, got {cluster_tol}"
        )));
    }
    let m = a.nrows();
    let eig = symmetric_eigen(a)?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut sums: Vec<f64> = Vec::new();
    for &i in &order {
        let l = eig.eigenvalues[i];
        if let (Some(group), Some(sum)) = (groups.last_mut(), sums.last_mut()) {
            let mean = *sum / group.len() as f64;
            if (l - mean).abs() <= cluster_tol * mean.abs().max(1.0) {
                group.push(i);
                *sum += l;
                continue;
            }
        }
        groups.push(vec![i]);
        sums.push(l);
    }

    let eigenvalues = groups
        .iter()
        .zip(&sums)
        .map(|(g, s)| s / g.len() as f64)
        .collect();
    let multiplicities = groups.iter().map(Vec::len).collect();
    let bases = groups
        .iter()
        .map(|g| {
            let cols: Vec<_> = g.iter().map(|&i| eig.eigenvectors.column(i)).collect();
            DMatrix::from_columns(&cols)
        })
        .collect();
    let decomposition = SpectralDecomposition {
        eigenvalues,
        multiplicities,
        bases,
        cluster_tol,
    };
    decomposition.verify(a)?;
    Ok(decomposition)
}

/// Eigenvalues with multiplicity, sorted decreasing.
pub fn sorted_spectrum(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    let mut values: Vec<f64> = symmetric_eigen(a)?.eigenvalues.iter().copied().collect();
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}

/// Whether the two sorted spectra agree entrywise within `tol · max(1, |λ|)`.
pub fn are_cospectral(g1: &Graph, g2: &Graph, tol: f64) -> Result<bool> {
    if g1.order() != g2.order() {
        return Err(Error::SizeMismatch(g1.order(), g2.order()));
    }
    let s1 = sorted_spectrum(g1.adjacency())?;
    let s2 = sorted_spectrum(g2.adjacency())?;
    Ok(spectra_match(&s1, &s2, tol))
}

pub(crate) fn spectra_match(s1: &[f64], s2: &[f64], tol: f64) -> bool {
    s1.len() == s2.len()
        && s1
            .iter()
            .zip(s2)
            .all(|(a, b)| (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0))
}

/// Sylvester-Hadamard matrix `H_1^{⊗n}` with `H_1 = [[1, 1], [1, −1]]`.
pub fn standard_hadamard(n: usize) -> Result<DMatrix<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("Hadamard order must be at least 1".into()));
    }
    cube_order(n)?;
    let h1 = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0]);
    let mut h = h1.clone();
    for _ in 1..n {
        h = h.kronecker(&h1);
    }
    Ok(h)
}

/// True iff `H_n^T A H_n / 2^n` is diagonal to within
/// `tol · max(1, ‖A‖_max)`.
pub fn is_standard_hadamard_diagonalizable(g: &Graph, tol: f64) -> Result<bool> {
    let m = g.order();
    let n = g.cube_dimension().ok_or(Error::NotPowerOfTwo(m))?;
    if n == 0 {
        return Ok(true);
    }
    let h = standard_hadamard(n)?;
    let d = h.transpose() * g.adjacency() * &h / m as f64;
    let bound = tol * g.max_weight().max(1.0);
    for j in 0..m {
        for k in 0..m {
            if j != k && d[(j, k)].abs() > bound {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Polynomial with real coefficients stored lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    /// Monic `Π (x − r)`.
    pub fn from_roots(roots: &[f64]) -> Self {
        let mut coeffs = vec![1.0];
        for &r in roots {
            let mut next = vec![0.0; coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= r * c;
            }
            coeffs = next;
        }
        Self { coeffs }
    }

    /// Coefficients, constant term first.
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// `p(A)` by Horner's rule.
    pub fn eval_matrix(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        let m = a.nrows();
        let eye = DMatrix::<f64>::identity(m, m);
        self.coeffs
            .iter()
            .rev()
            .fold(DMatrix::zeros(m, m), |acc, &c| acc * a + &eye * c)
    }

    /// Snap coefficients within `tol` of an integer onto it.
    pub fn round_near_integers(mut self, tol: f64) -> Self {
        for c in &mut self.coeffs {
            let r = c.round();
            if (*c - r).abs() <= tol {
                *c = r + 0.0;
            }
        }
        self
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 {
                continue;
            }
            let sign = if c < 0.0 { "-" } else { "+" };
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            let show_mag = k == 0 || mag != 1.0;
            if show_mag {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Monic `Π_r (x − λ_r)` over the distinct eigenvalues, with coefficients
/// within `1e-6` of an integer rounded to it.
pub fn minimal_polynomial(g: &Graph, cluster_tol: f64) -> Result<Polynomial> {
    let d = eigendecompose(g, cluster_tol)?;
    Ok(Polynomial::from_roots(d.eigenvalues()).round_near_integers(1e-6))
}

/// Distinct eigenvalues `λ_r` with `‖E_r|u⟩‖ > proj_tol`, decreasing.
pub fn eigenvalue_support(g: &Graph, u: usize, proj_tol: f64) -> Result<Vec<f64>> {
    g.check_vertex(u)?;
    Ok(eigendecompose(g, DEFAULT_CLUSTER_TOL)?.support(u, proj_tol))
}

/// Result of the integer-support obstruction test for a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PstObstruction {
    /// The vertex is in no perfect-state-transfer pair at any time.
    Obstructed,
    /// The test is inconclusive; this is not evidence of state transfer.
    NoObstructionFound,
}

/// Apply the periodicity obstruction to an eigenvalue support: two distinct
/// (numerically) integer eigenvalues together with one that is clearly not
/// an integer rule out periodicity, hence state transfer. Eigenvalues
/// between `int_tol` and `100 · int_tol` of an integer are treated as
/// undecided.
pub fn support_obstruction(support: &[f64], int_tol: f64) -> PstObstruction {
    let mut integers: Vec<i64> = support
        .iter()
        .filter(|l| (*l - l.round()).abs() <= int_tol)
        .map(|l| l.round() as i64)
        .collect();
    integers.sort_unstable();
    integers.dedup();
    let irrational = support
        .iter()
        .any(|l| (l - l.round()).abs() > 100.0 * int_tol);
    if integers.len() >= 2 && irrational {
        PstObstruction::Obstructed
    } else {
        PstObstruction::NoObstructionFound
    }
}

pub fn pst_obstruction_check(g: &Graph, u: usize, int_tol: f64) -> Result<PstObstruction> {
    let support = eigenvalue_support(g, u, DEFAULT_PROJ_TOL)?;
    Ok(support_obstruction(&support, int_tol))
}
