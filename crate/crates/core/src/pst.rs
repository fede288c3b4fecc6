//! Perfect state transfer detection, the protected vertex set of partially
//! switched cubes, readout-time sensitivity and family-wide censuses.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{schedule_propagator, Evolution, EvolutionSchedule};
use crate::graph::{complement, hypercube, Graph};
use crate::switching::{build_block_cube, switched_hypercube, BlockSpec};

/// Default detection threshold: pairs need `p ≥ 1 − DEFAULT_PST_TOL`.
pub const DEFAULT_PST_TOL: f64 = 1e-6;

/// Fidelity a readout time must reach before the analytic derivative
/// formula is applied.
pub const DERIVATIVE_PST_TOL: f64 = 1e-6;

/// Vertex pairs with perfect state transfer at one time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PstReport {
    #[serde(rename = "t")]
    pub time: f64,
    #[serde(rename = "tol")]
    pub tolerance: f64,
    /// `(j, k, p)` with `j < k`, sorted.
    pub pairs: Vec<(usize, usize, f64)>,
    pub unpaired: Vec<usize>,
}

impl PstReport {
    /// Sorted vertices that appear in some pair.
    pub fn paired_vertices(&self) -> Vec<usize> {
        let mut v: Vec<_> = self.pairs.iter().flat_map(|&(j, k, _)| [j, k]).collect();
        v.sort_unstable();
        v
    }

    pub fn pair_set(&self) -> BTreeSet<(usize, usize)> {
        self.pairs.iter().map(|&(j, k, _)| (j, k)).collect()
    }

    pub fn min_fidelity(&self) -> Option<f64> {
        self.pairs.iter().map(|p| p.2).min_by(f64::total_cmp)
    }

    pub fn contains_pair(&self, j: usize, k: usize) -> bool {
        let (a, b) = if j < k { (j, k) } else { (k, j) };
        self.pairs.iter().any(|&(x, y, _)| x == a && y == b)
    }
}

/// Build a report from a transfer-probability function `p(source, target)`.
/// An unordered pair is reported when either direction reaches `1 − tol`.
fn collect_pairs(
    m: usize,
    time: f64,
    tol: f64,
    prob: impl Fn(usize, usize) -> f64 + Sync,
) -> Result<PstReport> {
    if !(tol > 0.0 && tol < 0.5) {
        return Err(Error::InvalidArgument(format!("PST tolerance {tol} must lie in (0, 1/2)")));
    }
    let pairs: Vec<(usize, usize, f64)> = (0..m)
        .into_par_iter()
        .flat_map_iter(|j| {
            let prob = &prob;
            ((j + 1)..m).filter_map(move |k| {
                let p = prob(j, k).max(prob(k, j));
                (p >= 1.0 - tol).then_some((j, k, p))
            })
        })
        .collect();
    let mut seen = vec![false; m];
    for &(j, k, _) in &pairs {
        for v in [j, k] {
            if seen[v] {
                return Err(Error::Numerical(format!(
                    "vertex {v} appears in more than one PST pair"
                )));
            }
            seen[v] = true;
        }
    }
    let unpaired = (0..m).filter(|&v| !seen[v]).collect();
    Ok(PstReport {
        time,
        tolerance: tol,
        pairs,
        unpaired,
    })
}

/// All vertex pairs with `p_{j,k}(t) ≥ 1 − tol`.
pub fn find_pst_pairs(g: &Graph, t: f64, tol: f64) -> Result<PstReport> {
    let u = Evolution::new(g)?.propagator(t)?;
    pairs_in_propagator(&u, t, tol)
}

/// As [`find_pst_pairs`] for an explicit propagator, where moving from `j`
/// to `k` has amplitude `U[k][j]`.
pub fn pairs_in_propagator(u: &DMatrix<Complex64>, t: f64, tol: f64) -> Result<PstReport> {
    collect_pairs(u.nrows(), t, tol, |j, k| u[(k, j)].norm_sqr())
}

/// PST pairs of a time-switched system read out at its total duration.
pub fn find_schedule_pst_pairs(s: &EvolutionSchedule, tol: f64) -> Result<PstReport> {
    let u = schedule_propagator(s)?;
    pairs_in_propagator(&u, s.total_duration(), tol)
}

fn require_block_dimension(n: usize) -> Result<()> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "protected set needs n >= 4, got {n}"
        )));
    }
    crate::graph::cube_order(n)?;
    Ok(())
}

/// Vertices whose low four bits are `0000` or `1111`: local index 0 or 15
/// inside every 16-block. `2^{n-3}` vertices.
pub fn protected_set(n: usize) -> Result<Vec<usize>> {
    require_block_dimension(n)?;
    Ok((0..1usize << n).filter(|v| v & 0xF == 0 || v & 0xF == 0xF).collect())
}

/// `(v, complement(v))` for every protected `v`, with the smaller vertex
/// first.
pub fn expected_s_pairs(n: usize) -> Result<Vec<(usize, usize)>> {
    Ok(protected_set(n)?
        .into_iter()
        .map(|v| (v, complement(v, n)))
        .filter(|&(v, w)| v < w)
        .collect())
}

/// `⟨s|H^ℓ|s⟩` for `ℓ = 0..=k`.
fn return_moments(h: &DMatrix<f64>, s: usize, k: u32) -> Vec<f64> {
    let m = h.nrows();
    let mut v = DVector::<f64>::zeros(m);
    v[s] = 1.0;
    let mut out = Vec::with_capacity(k as usize + 1);
    for _ in 0..=k {
        out.push(v[s]);
        v = h * v;
    }
    out
}

fn binomial(k: u32, l: u32) -> f64 {
    (0..l).fold(1.0, |acc, i| acc * f64::from(k - i) / f64::from(i + 1))
}

/// `d^k p/dt^k` at a PST time for a transfer ending at `s`, given the
/// Hamiltonian active at readout:
/// zero for odd `k`, otherwise
/// `(−1)^{(k mod 4)/2} Σ_ℓ (−1)^ℓ C(k, ℓ) ⟨s|H^ℓ|s⟩ ⟨s|H^{k−ℓ}|s⟩`.
pub fn derivative_at_pst(h: &DMatrix<f64>, s: usize, k: u32) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    let mu = return_moments(h, s, k);
    let sum: f64 = (0..=k)
        .map(|l| {
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(k, l) * mu[l as usize] * mu[(k - l) as usize]
        })
        .sum();
    if (k % 4) / 2 == 1 {
        -sum
    } else {
        sum
    }
}

fn best_transfer_into(prob: impl Fn(usize) -> f64, m: usize, s: usize) -> f64 {
    (0..m).filter(|&j| j != s).map(prob).fold(0.0, f64::max)
}

/// Analytic readout-time derivative of the fidelity into `s` at `t0`.
/// Fails unless some vertex reaches `s` with fidelity `≥ 1 − 1e-6` at `t0`.
pub fn fidelity_derivative_analytic(g: &Graph, s: usize, t0: f64, k: u32) -> Result<f64> {
    g.check_vertex(s)?;
    if k == 0 {
        return Err(Error::InvalidArgument("derivative order must be at least 1".into()));
    }
    let evo = Evolution::new(g)?;
    let best = best_transfer_into(|j| evo.fidelity(j, s, t0), g.order(), s);
    if best < 1.0 - DERIVATIVE_PST_TOL {
        return Err(Error::NoPst { vertex: s, time: t0, best });
    }
    Ok(derivative_at_pst(g.adjacency(), s, k))
}

/// Analytic derivative for a schedule, differentiating in the duration of
/// the final segment.
pub fn schedule_derivative_analytic(sched: &EvolutionSchedule, s: usize, k: u32) -> Result<f64> {
    sched.final_graph().check_vertex(s)?;
    if k == 0 {
        return Err(Error::InvalidArgument("derivative order must be at least 1".into()));
    }
    let u = schedule_propagator(sched)?;
    let best = best_transfer_into(|j| u[(s, j)].norm_sqr(), sched.order(), s);
    let t0 = sched.total_duration();
    if best < 1.0 - DERIVATIVE_PST_TOL {
        return Err(Error::NoPst { vertex: s, time: t0, best });
    }
    Ok(derivative_at_pst(sched.final_graph().adjacency(), s, k))
}

/// Something whose transfer probability can be evaluated at a readout time.
#[derive(Debug, Clone, Copy)]
pub enum Dynamics<'a> {
    Graph(&'a Graph),
    /// Readout time moves the end of the final segment.
    Schedule(&'a EvolutionSchedule),
}

impl Dynamics<'_> {
    fn order(&self) -> usize {
        match self {
            Dynamics::Graph(g) => g.order(),
            Dynamics::Schedule(s) => s.order(),
        }
    }

    /// Build a `t ↦ p_{j→k}(t)` closure.
    fn fidelity_fn(&self, j: usize, k: usize) -> Result<Box<dyn Fn(f64) -> Result<f64> + '_>> {
        let m = self.order();
        for v in [j, k] {
            if v >= m {
                return Err(Error::VertexOutOfRange { vertex: v, order: m });
            }
        }
        Ok(match *self {
            Dynamics::Graph(g) => {
                let evo = Evolution::new(g)?;
                Box::new(move |t| Ok(evo.fidelity(j, k, t)))
            }
            Dynamics::Schedule(s) => Box::new(move |t| {
                let u = schedule_propagator(&s.with_total_duration(t)?)?;
                Ok(u[(k, j)].norm_sqr())
            }),
        })
    }
}

/// Central finite difference of `p_{j→k}` at `t0` with step `h`
/// (`order` 1 or 2).
pub fn fidelity_derivative_numeric(
    dynamics: Dynamics<'_>,
    j: usize,
    k: usize,
    t0: f64,
    order: u32,
    h: f64,
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step {h} must be positive")));
    }
    let p = dynamics.fidelity_fn(j, k)?;
    match order {
        1 => Ok((p(t0 + h)? - p(t0 - h)?) / (2.0 * h)),
        2 => Ok((p(t0 + h)? - 2.0 * p(t0)? + p(t0 - h)?) / (h * h)),
        _ => Err(Error::InvalidArgument(format!(
            "numeric derivative supports orders 1 and 2, got {order}"
        ))),
    }
}

/// Derivatives of the fidelity from `source` to `target` at `t0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeReport {
    pub source: usize,
    pub target: usize,
    pub t0: f64,
    /// Keyed by order, rendered as strings in JSON.
    pub analytic: std::collections::BTreeMap<String, f64>,
    pub numeric: std::collections::BTreeMap<String, f64>,
    pub step: f64,
}

/// Analytic values for each order in `orders`, and finite-difference values
/// for orders 1 and 2.
pub fn derivative_report(
    dynamics: Dynamics<'_>,
    source: usize,
    target: usize,
    t0: f64,
    orders: &[u32],
    h: f64,
) -> Result<DerivativeReport> {
    let mut analytic = std::collections::BTreeMap::new();
    let mut numeric = std::collections::BTreeMap::new();
    for &k in orders {
        let value = match dynamics {
            Dynamics::Graph(g) => fidelity_derivative_analytic(g, target, t0, k)?,
            Dynamics::Schedule(s) => {
                if (s.total_duration() - t0).abs() > 1e-12 {
                    return Err(Error::InvalidArgument(
                        "schedule derivatives are taken at the schedule's total duration".into(),
                    ));
                }
                schedule_derivative_analytic(s, target, k)?
            }
        };
        analytic.insert(k.to_string(), value);
        if k <= 2 {
            numeric.insert(
                k.to_string(),
                fidelity_derivative_numeric(dynamics, source, target, t0, k, h)?,
            );
        }
    }
    Ok(DerivativeReport { source, target, t0, analytic, numeric, step: h })
}

/// Which graphs a census covers.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Hypercube,
    Switched,
    /// Every Plain/Switched block pattern.
    PartialAll,
    /// Block weights `p_j` (one per 16-block).
    Blend(Vec<f64>),
}

/// Census result for one graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusEntry {
    pub label: String,
    pub blocks: Vec<f64>,
    pub pair_count: usize,
    pub paired_vertices: Vec<usize>,
    pub all_pairs_complementary: bool,
    /// Whether every protected-set pair was detected.
    pub contains_protected_pairs: bool,
    /// For proper partial patterns: whether the paired vertices differ from
    /// the protected set. Recorded only; never treated as a failure.
    pub differs_from_protected: Option<bool>,
    pub min_fidelity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusReport {
    pub n: usize,
    pub t: f64,
    pub tol: f64,
    pub entries: Vec<CensusEntry>,
}

/// PST pair counts at `π/2` over a family of n-cube variants.
pub fn pst_census(family: &Family, n: usize, tol: f64) -> Result<CensusReport> {
    let t = FRAC_PI_2;
    let instances: Vec<(String, Vec<f64>, Graph, bool)> = match family {
        Family::Hypercube => vec![("hypercube".into(), vec![], hypercube(n)?, false)],
        Family::Switched => vec![("switched".into(), vec![], switched_hypercube(n)?, false)],
        Family::PartialAll => BlockSpec::all_patterns(n)?
            .into_iter()
            .map(|spec| {
                let label = spec
                    .weights()
                    .iter()
                    .map(|&p| if p == 1.0 { '1' } else { '0' })
                    .collect::<String>();
                let proper = spec.is_proper_partial();
                Ok((format!("partial:{label}"), spec.weights(), build_block_cube(&spec)?, proper))
            })
            .collect::<Result<_>>()?,
        Family::Blend(weights) => {
            let spec = BlockSpec::from_weights(n, weights)?;
            vec![("blend".into(), spec.weights(), build_block_cube(&spec)?, false)]
        }
    };
    let protected = if n >= 4 { protected_set(n)? } else { vec![] };
    let expected = if n >= 4 { expected_s_pairs(n)? } else { vec![] };
    let entries = instances
        .into_par_iter()
        .map(|(label, blocks, g, proper)| {
            let report = find_pst_pairs(&g, t, tol)?;
            let paired = report.paired_vertices();
            Ok(CensusEntry {
                label,
                blocks,
                pair_count: report.pairs.len(),
                all_pairs_complementary: report.pairs.iter().all(|&(j, k, _)| k == complement(j, n)),
                contains_protected_pairs: expected.iter().all(|&(j, k)| report.contains_pair(j, k)),
                differs_from_protected: proper.then(|| paired != protected),
                min_fidelity: report.min_fidelity(),
                paired_vertices: paired,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CensusReport { n, t, tol, entries })
}
