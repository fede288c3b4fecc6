//! Continuous-time quantum walks: `U(t) = e^{itA}` from the spectral
//! decomposition, transfer fidelities, fidelity traces and piecewise-constant
//! (time-switched) Hamiltonians.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral::{eigendecompose, SpectralDecomposition, DEFAULT_CLUSTER_TOL};

/// Bound on `‖U U* − I‖_max` enforced on every propagator.
pub const UNITARITY_TOL: f64 = 1e-9;

/// Fidelity samples are allowed to exceed one by this much.
pub const FIDELITY_SLACK: f64 = 1e-9;

/// Cached eigenbasis of one Hamiltonian, for repeated evaluation of
/// `e^{itA}` at different times.
#[derive(Debug, Clone)]
pub struct Evolution {
    vectors: DMatrix<f64>,
    eigenvalues: Vec<f64>,
}

impl Evolution {
    pub fn new(g: &Graph) -> Result<Self> {
        Ok(Self::from_decomposition(&eigendecompose(g, DEFAULT_CLUSTER_TOL)?))
    }

    pub fn from_decomposition(d: &SpectralDecomposition) -> Self {
        let (vectors, eigenvalues) = d.eigenvectors();
        Self { vectors, eigenvalues }
    }

    pub fn order(&self) -> usize {
        self.vectors.nrows()
    }

    /// `⟨j| e^{itA} |k⟩`.
    pub fn amplitude(&self, j: usize, k: usize, t: f64) -> Complex64 {
        self.vectors
            .row(j)
            .iter()
            .zip(self.vectors.row(k).iter())
            .zip(&self.eigenvalues)
            .map(|((a, b), &l)| Complex64::from_polar(a * b, l * t))
            .sum()
    }

    /// `|⟨j| e^{itA} |k⟩|²`.
    pub fn fidelity(&self, j: usize, k: usize, t: f64) -> f64 {
        self.amplitude(j, k, t).norm_sqr()
    }

    /// `e^{itA} = Σ_r e^{itλ_r} E_r`, checked for unitarity.
    pub fn propagator(&self, t: f64) -> Result<DMatrix<Complex64>> {
        let v = self.vectors.map(|x| Complex64::new(x, 0.0));
        let mut scaled = v.clone();
        for (mut column, &l) in scaled.column_iter_mut().zip(&self.eigenvalues) {
            column *= Complex64::from_polar(1.0, l * t);
        }
        let u = scaled * v.transpose();
        check_unitary(&u)?;
        Ok(u)
    }
}

/// `‖U U* − I‖_max`.
pub fn unitarity_defect(u: &DMatrix<Complex64>) -> f64 {
    let m = u.nrows();
    let prod = u * u.adjoint();
    let mut worst: f64 = 0.0;
    for j in 0..m {
        for k in 0..m {
            let target = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((prod[(j, k)] - target).norm());
        }
    }
    worst
}

fn check_unitary(u: &DMatrix<Complex64>) -> Result<()> {
    let defect = unitarity_defect(u);
    if defect > UNITARITY_TOL {
        return Err(Error::Numerical(format!("propagator unitarity defect {defect:e}")));
    }
    Ok(())
}

/// `U(t) = e^{itA(G)}`.
pub fn propagator(g: &Graph, t: f64) -> Result<DMatrix<Complex64>> {
    Evolution::new(g)?.propagator(t)
}

/// `p_{j,k}(t) = |⟨j| e^{itA} |k⟩|²`.
pub fn fidelity(g: &Graph, j: usize, k: usize, t: f64) -> Result<f64> {
    g.check_vertex(j)?;
    g.check_vertex(k)?;
    Ok(Evolution::new(g)?.fidelity(j, k, t))
}

/// One piece of a piecewise-constant Hamiltonian.
#[derive(Debug, Clone)]
pub struct Segment {
    pub graph: Graph,
    pub duration: f64,
}

/// Graphs applied in order, each for its duration; segment 0 acts first.
#[derive(Debug, Clone)]
pub struct EvolutionSchedule {
    segments: Vec<Segment>,
}

impl EvolutionSchedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| Error::InvalidSchedule("schedule has no segments".into()))?;
        let m = first.graph.order();
        for (i, s) in segments.iter().enumerate() {
            if s.graph.order() != m {
                return Err(Error::InvalidSchedule(format!(
                    "segment {i} has {} vertices, segment 0 has {m}",
                    s.graph.order()
                )));
            }
            if !(s.duration.is_finite() && s.duration >= 0.0) {
                return Err(Error::InvalidSchedule(format!(
                    "segment {i} has invalid duration {}",
                    s.duration
                )));
            }
        }
        Ok(Self { segments })
    }

    /// Convenience constructor from `(graph, duration)` pairs.
    pub fn from_pairs(pairs: Vec<(Graph, f64)>) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .map(|(graph, duration)| Segment { graph, duration })
                .collect(),
        )
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn order(&self) -> usize {
        self.segments[0].graph.order()
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Hamiltonian active at readout.
    pub fn final_graph(&self) -> &Graph {
        &self.segments[self.segments.len() - 1].graph
    }

    /// Same schedule with the last segment stretched or shrunk so the total
    /// duration is `total`.
    pub fn with_total_duration(&self, total: f64) -> Result<Self> {
        let mut segments = self.segments.clone();
        let head: f64 = segments[..segments.len() - 1].iter().map(|s| s.duration).sum();
        let last = segments.last_mut().expect("nonempty");
        last.duration = total - head;
        Self::new(segments)
    }
}

/// `U = e^{iΔt_r A_r} ⋯ e^{iΔt_1 A_1}`: the state `|ψ⟩` evolves to `U|ψ⟩`,
/// so the amplitude for moving from `j` to `k` is `U[k][j]`.
pub fn schedule_propagator(s: &EvolutionSchedule) -> Result<DMatrix<Complex64>> {
    let m = s.order();
    let mut u = DMatrix::<Complex64>::identity(m, m);
    for seg in s.segments() {
        u = propagator(&seg.graph, seg.duration)? * u;
    }
    check_unitary(&u)?;
    Ok(u)
}

/// Probability of moving from `source` to `target` under the schedule.
pub fn schedule_fidelity(s: &EvolutionSchedule, source: usize, target: usize) -> Result<f64> {
    s.segments[0].graph.check_vertex(source)?;
    s.segments[0].graph.check_vertex(target)?;
    Ok(schedule_propagator(s)?[(target, source)].norm_sqr())
}

/// Sampled `p_{j,k}(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityTrace {
    pub source: usize,
    pub target: usize,
    pub samples: Vec<(f64, f64)>,
}

impl FidelityTrace {
    /// CSV with header `t,fidelity` and 15 significant digits per value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,fidelity\n");
        for &(t, p) in &self.samples {
            out.push_str(&format_significant(t, 15));
            out.push(',');
            out.push_str(&format_significant(p, 15));
            out.push('\n');
        }
        out
    }

    /// Sample with the largest fidelity.
    pub fn peak(&self) -> Option<(f64, f64)> {
        self.samples
            .iter()
            .copied()
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// Fixed-point rendering of `x` with `digits` significant digits.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        let zero = if x == 0.0 { 0.0 } else { x };
        return format!("{:.*}", digits.saturating_sub(1), zero);
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).clamp(0, 40) as usize;
    let s = format!("{x:.decimals$}");
    // -0.000… would otherwise differ from 0.000…
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

/// `p_{j,k}` at each requested time, reusing one decomposition.
pub fn fidelity_trace(g: &Graph, j: usize, k: usize, times: &[f64]) -> Result<FidelityTrace> {
    g.check_vertex(j)?;
    g.check_vertex(k)?;
    if times.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("trace times must be strictly increasing".into()));
    }
    let evo = Evolution::new(g)?;
    let samples = times.iter().map(|&t| (t, evo.fidelity(j, k, t))).collect();
    Ok(FidelityTrace { source: j, target: k, samples })
}
