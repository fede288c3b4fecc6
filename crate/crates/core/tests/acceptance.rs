//! Acceptance suite: one check per published criterion, each printed as a
//! PASS/FAIL line. Runs without the libtest harness so every line is shown.

mod common;

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6};
use std::panic::{catch_unwind, AssertUnwindSafe};

use common::*;
use nalgebra::DVector;
use pstlab_core::evolution::{unitarity_defect, Evolution, EvolutionSchedule};
use pstlab_core::graph::{
    complement, convex_combination, cubelike, hamming_weight, hypercube, is_connected, Graph,
};
use pstlab_core::pst::{
    expected_s_pairs, fidelity_derivative_analytic, fidelity_derivative_numeric,
    find_pst_pairs, find_schedule_pst_pairs, protected_set, schedule_derivative_analytic,
    Dynamics, PstReport,
};
use pstlab_core::spectral::{
    are_cospectral, eigendecompose, is_standard_hadamard_diagonalizable, minimal_polynomial,
    sorted_spectrum, support_obstruction, PstObstruction, DEFAULT_CLUSTER_TOL,
    DEFAULT_PROJ_TOL,
};
use pstlab_core::switching::{
    build_block_cube, canonical_q4_partition, gm_switch, midpoint_perturbations,
    switched_hypercube, switched_q4, switching_partitions, Block, BlockSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Detection tolerance used throughout.
const PST_TOL: f64 = 1e-6;
/// Required fidelity margin for detected pairs.
const FIDELITY_MARGIN: f64 = 1e-9;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn complement_pairs(n: usize) -> BTreeSet<(usize, usize)> {
    (0..1usize << n)
        .map(|v| (v, complement(v, n)))
        .filter(|(a, b)| a < b)
        .collect()
}

fn check_s_pairs(report: &PstReport, n: usize, what: &str) -> Result<(), String> {
    for (j, k) in expected_s_pairs(n).unwrap() {
        let hit = report.pairs.iter().find(|&&(a, b, _)| a == j && b == k);
        match hit {
            Some(&(_, _, p)) => ensure!(
                p >= 1.0 - FIDELITY_MARGIN,
                "{what}: pair ({j},{k}) fidelity {p}"
            ),
            None => return Err(format!("{what}: S-pair ({j},{k}) not detected")),
        }
    }
    Ok(())
}

fn partial(n: usize, blocks: Vec<Block>) -> Graph {
    build_block_cube(&BlockSpec::new(n, blocks).unwrap()).unwrap()
}

fn c1_hypercube_pst() -> Outcome {
    for n in 2..=7 {
        let r = find_pst_pairs(&hypercube(n).unwrap(), FRAC_PI_2, PST_TOL).unwrap();
        ensure!(r.pairs.len() == 1 << (n - 1), "Q_{n}: {} pairs", r.pairs.len());
        ensure!(r.pair_set() == complement_pairs(n), "Q_{n}: pairs are not the complements");
        let min = r.min_fidelity().unwrap();
        ensure!(min >= 1.0 - FIDELITY_MARGIN, "Q_{n}: min fidelity {min}");
    }
    Ok("Q_2..Q_7 pair every vertex with its complement".into())
}

fn c2_switched_pst() -> Outcome {
    for n in 4..=6 {
        let r = find_pst_pairs(&switched_hypercube(n).unwrap(), FRAC_PI_2, PST_TOL).unwrap();
        ensure!(r.pairs.len() == 1 << (n - 2), "switched Q_{n}: {} pairs", r.pairs.len());
        let full = find_pst_pairs(&hypercube(n).unwrap(), FRAC_PI_2, PST_TOL).unwrap();
        ensure!(2 * r.pairs.len() == full.pairs.len(), "not half of Q_{n}");
        let min = r.min_fidelity().unwrap();
        ensure!(min >= 1.0 - FIDELITY_MARGIN, "switched Q_{n}: min fidelity {min}");
        if n == 4 {
            let want: BTreeSet<_> = [(0, 15), (3, 12), (5, 10), (6, 9)].into_iter().collect();
            ensure!(r.pair_set() == want, "switched Q_4 pairs {:?}", r.pair_set());
            for &(j, _, _) in &r.pairs[1..] {
                ensure!(hamming_weight(j) == 2, "pair at vertex {j} is not weight 2");
            }
        }
    }
    Ok("switched Q_4/Q_5/Q_6: 4/8/16 complement pairs".into())
}

fn c3_cospectrality() -> Outcome {
    for n in 4..=6 {
        ensure!(
            are_cospectral(&hypercube(n).unwrap(), &switched_hypercube(n).unwrap(), 1e-8).unwrap(),
            "Q_{n} and switched Q_{n} not cospectral"
        );
    }
    use Block::{Plain as P, Switched as S};
    let a65 = partial(6, vec![P, P, S, S]);
    let a66 = partial(6, vec![P, S, S, P]);
    ensure!(!are_cospectral(&a65, &a66, 1e-8).unwrap(), "A_(6,5) and A_(6,6) cospectral");
    Ok("Q_n ~ switched Q_n (n = 4..6); A_(6,5) !~ A_(6,6)".into())
}

fn c4_hadamard() -> Outcome {
    for n in 1..=6 {
        ensure!(
            is_standard_hadamard_diagonalizable(&hypercube(n).unwrap(), 1e-8).unwrap(),
            "Q_{n} not diagonalized"
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut cubelike_count = 0;
    while cubelike_count < 50 {
        let n = rng.gen_range(2..=5);
        let c = random_connection_set(&mut rng, n);
        if !c.spans() {
            continue;
        }
        let g = cubelike(&c).unwrap();
        ensure!(is_connected(&g), "spanning connection set gave a disconnected graph");
        ensure!(
            is_standard_hadamard_diagonalizable(&g, 1e-8).unwrap(),
            "cubelike graph {:?} not diagonalized",
            c.elements()
        );
        cubelike_count += 1;
    }
    ensure!(
        !is_standard_hadamard_diagonalizable(&switched_q4(), 1e-8).unwrap(),
        "switched Q_4 diagonalized"
    );
    let q4 = hypercube(4).unwrap();
    for i in 0..20 {
        let sub = random_connected_edge_subgraph(&mut rng, &q4);
        ensure!(sub.edge_count() < q4.edge_count() && is_connected(&sub), "bad subgraph {i}");
        ensure!(
            !is_standard_hadamard_diagonalizable(&sub, 1e-8).unwrap(),
            "connected proper subgraph {i} of Q_4 diagonalized"
        );
    }
    Ok("Q_1..Q_6 and 50 cubelike: yes; switched Q_4 and 20 subgraphs: no".into())
}

fn c5_minimal_polynomial() -> Outcome {
    let want = [0.0, 64.0, 0.0, -20.0, 0.0, 1.0];
    for (name, g) in [("A_(4,1)", hypercube(4).unwrap()), ("A_(4,2)", switched_q4())] {
        let p = minimal_polynomial(&g, DEFAULT_CLUSTER_TOL).unwrap();
        ensure!(p.coefficients() == want, "{name}: {p}");
        let residual = p.eval_matrix(g.adjacency()).amax();
        ensure!(residual <= 1e-6 * 4f64.powi(5), "{name}: p(A) residual {residual}");
    }
    Ok("both give x^5 - 20x^3 + 64x exactly".into())
}

fn c6_partial_cubes() -> Outcome {
    let times = [0.3, FRAC_PI_4, FRAC_PI_2, 1.7];
    let mut proper = 0;
    for n in 5..=6 {
        let reference = Evolution::new(&hypercube(n).unwrap()).unwrap();
        let ref_u: Vec<_> = times.iter().map(|&t| reference.propagator(t).unwrap()).collect();
        let protected = protected_set(n).unwrap();
        for spec in BlockSpec::all_patterns(n).unwrap() {
            proper += usize::from(spec.is_proper_partial());
            let g = build_block_cube(&spec).unwrap();
            let r = find_pst_pairs(&g, FRAC_PI_2, PST_TOL).unwrap();
            check_s_pairs(&r, n, &format!("pattern {:?}", spec.weights()))?;
            let evo = Evolution::new(&g).unwrap();
            for (&t, want) in times.iter().zip(&ref_u) {
                let u = evo.propagator(t).unwrap();
                for &l in &protected {
                    let d = complex_row_diff(&u, want, l);
                    ensure!(d <= 1e-9, "pattern {:?}, t = {t}, row {l}: {d:e}", spec.weights());
                }
            }
        }
    }
    ensure!(proper == 2 + 14, "{proper} proper patterns");
    Ok("all 4 + 16 patterns keep S-pairs and S-rows of Q_n".into())
}

fn c7_example() -> Outcome {
    let g = partial(5, vec![Block::Plain, Block::Switched]);
    let r = find_pst_pairs(&g, FRAC_PI_2, PST_TOL).unwrap();
    ensure!(r.paired_vertices() == vec![0, 15, 16, 31], "PST set {:?}", r.paired_vertices());

    let a = g.adjacency();
    let ones = DVector::<f64>::from_element(32, 1.0);
    ensure!((a * &ones - &ones * 5.0).amax() < 1e-12, "all-ones is not a 5-eigenvector");
    let split = DVector::<f64>::from_fn(32, |i, _| if i < 16 { 1.0 } else { -1.0 });
    ensure!((a * &split - &split * 3.0).amax() < 1e-12, "[1; -1] is not a 3-eigenvector");

    let d = eigendecompose(&g, DEFAULT_CLUSTER_TOL).unwrap();
    let five = d.eigenvalues().iter().position(|l| (l - 5.0).abs() < 1e-9);
    ensure!(five.map(|r| d.multiplicities()[r]) == Some(1), "5 is not simple");

    let protected = protected_set(5).unwrap();
    for u in 0..32 {
        let support = d.support(u, DEFAULT_PROJ_TOL);
        let has = |x: f64| support.iter().any(|l| (l - x).abs() < 1e-8);
        ensure!(has(5.0) && has(3.0), "vertex {u}: support {support:?}");
        if !protected.contains(&u) {
            ensure!(
                support.iter().any(|l| (2.7..=2.8).contains(l)),
                "vertex {u}: no eigenvalue in [2.7, 2.8]"
            );
            ensure!(
                support_obstruction(&support, 1e-6) == PstObstruction::Obstructed,
                "vertex {u} not obstructed"
            );
        }
    }

    let irrational: Vec<f64> = d
        .eigenvalues()
        .iter()
        .copied()
        .filter(|l| (l - l.round()).abs() > 1e-6)
        .collect();
    ensure!(irrational.len() == 6, "{} non-integer eigenvalues", irrational.len());
    let poly = |x: f64| -x.powi(6) + 11.0 * x.powi(4) - 27.0 * x.powi(2) + 1.0;
    for &l in &irrational {
        ensure!(poly(l).abs() <= 1e-8, "residual {} at {l}", poly(l));
    }
    Ok(format!("PST set {{0,15,16,31}}; 28 vertices obstructed; irrational roots {irrational:.4?}"))
}

fn c8_blends_and_combinations() -> Outcome {
    let levels = [0.0, 0.3, 0.7, 1.0];
    let mut count = 0;
    for &p0 in &levels {
        for &p1 in &levels {
            let g = build_block_cube(&BlockSpec::from_weights(5, &[p0, p1]).unwrap()).unwrap();
            let r = find_pst_pairs(&g, FRAC_PI_2, PST_TOL).unwrap();
            check_s_pairs(&r, 5, &format!("blend ({p0}, {p1})"))?;
            count += 1;
        }
    }
    let q5 = hypercube(5).unwrap();
    let s5 = switched_hypercube(5).unwrap();
    let a53 = partial(5, vec![Block::Plain, Block::Switched]);
    for c in [[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], [0.5, 0.25, 0.25]] {
        let g = convex_combination(&[(c[0], &q5), (c[1], &s5), (c[2], &a53)]).unwrap();
        let r = find_pst_pairs(&g, FRAC_PI_2, PST_TOL).unwrap();
        check_s_pairs(&r, 5, &format!("convex {c:?}"))?;
    }
    Ok(format!("{count} blends and 2 convex combinations keep all S-pairs"))
}

fn c9_midpoint_perturbations() -> Outcome {
    let mut notes = Vec::new();
    let q4_spectrum = hypercube_spectrum(4);
    for alpha in [0.1, 0.25, 0.5] {
        let (plus, minus) = midpoint_perturbations(alpha).unwrap();
        ensure!(are_cospectral(&plus, &minus, 1e-8).unwrap(), "alpha {alpha}: not cospectral");
        let spec = sorted_spectrum(plus.adjacency()).unwrap();
        let mult = |x: f64| spec.iter().filter(|l| (*l - x).abs() <= 1e-8).count();
        let r = (2.0 + 8.0 * alpha * alpha).sqrt();
        for x in [4.0, -4.0, 2.0, -2.0, r, -r] {
            ensure!(mult(x) >= 1, "alpha {alpha}: eigenvalue {x} missing");
        }
        ensure!(mult(0.0) >= 6, "alpha {alpha}: 0 has multiplicity {}", mult(0.0));
        if alpha == 0.5 {
            ensure!(max_abs_diff(&spec, &q4_spectrum) <= 1e-8, "alpha 1/2 differs from Q_4");
        }
        notes.push(format!(
            "a={alpha}: +-{r:.6} x{}/{}, 0 x{}",
            mult(r),
            mult(-r),
            mult(0.0)
        ));
    }
    Ok(notes.join("; "))
}

fn c10_time_switched() -> Outcome {
    let q5 = hypercube(5).unwrap();
    let s5 = switched_hypercube(5).unwrap();
    let a53 = partial(5, vec![Block::Plain, Block::Switched]);
    let two = EvolutionSchedule::from_pairs(vec![(q5.clone(), FRAC_PI_4), (s5.clone(), FRAC_PI_4)])
        .unwrap();
    let three = EvolutionSchedule::from_pairs(vec![
        (q5, FRAC_PI_6),
        (a53, FRAC_PI_6),
        (s5.clone(), FRAC_PI_6),
    ])
    .unwrap();
    let r2 = find_schedule_pst_pairs(&two, PST_TOL).unwrap();
    let r3 = find_schedule_pst_pairs(&three, PST_TOL).unwrap();
    check_s_pairs(&r2, 5, "two-segment schedule")?;
    check_s_pairs(&r3, 5, "three-segment schedule")?;
    let switched = find_pst_pairs(&s5, FRAC_PI_2, PST_TOL).unwrap();
    ensure!(
        r2.pair_set() == switched.pair_set(),
        "S-pairs hold in both schedules, but the two-segment pair set {:?} differs from the \
         switched cube's {:?}",
        r2.pair_set(),
        switched.pair_set()
    );
    Ok("both schedules keep S-pairs; two-segment pair set equals switched Q_5's".into())
}

fn c11_sensitivity() -> Outcome {
    use Block::{Plain as P, Switched as S};
    let mut checked = 0;
    for n in 4..=6 {
        let mut variants: Vec<(String, Graph)> = vec![
            ("hypercube".into(), hypercube(n).unwrap()),
            ("switched".into(), switched_hypercube(n).unwrap()),
        ];
        if n > 4 {
            let mut blocks = vec![P; 1 << (n - 4)];
            blocks[1..].iter_mut().step_by(2).for_each(|b| *b = S);
            variants.push(("partial".into(), partial(n, blocks)));
        }
        let weights: Vec<f64> = (0..1usize << (n - 4))
            .map(|j| if j % 2 == 0 { 0.3 } else { 0.7 })
            .collect();
        variants.push((
            "blend".into(),
            build_block_cube(&BlockSpec::from_weights(n, &weights).unwrap()).unwrap(),
        ));
        let schedule = EvolutionSchedule::from_pairs(vec![
            (hypercube(n).unwrap(), FRAC_PI_4),
            (switched_hypercube(n).unwrap(), FRAC_PI_4),
        ])
        .unwrap();

        let target_value = -2.0 * n as f64;
        for (j, k) in expected_s_pairs(n).unwrap() {
            let mut values = Vec::new();
            for (name, g) in &variants {
                let d1 = fidelity_derivative_analytic(g, k, FRAC_PI_2, 1).unwrap();
                ensure!(d1 == 0.0, "{name} n={n}: first derivative {d1}");
                let d2 = fidelity_derivative_analytic(g, k, FRAC_PI_2, 2).unwrap();
                ensure!((d2 - target_value).abs() <= 1e-9, "{name} n={n}: d2 = {d2}");
                let fd2 =
                    fidelity_derivative_numeric(Dynamics::Graph(g), j, k, FRAC_PI_2, 2, 1e-3)
                        .unwrap();
                ensure!(
                    (fd2 - d2).abs() <= 0.005 * d2.abs(),
                    "{name} n={n} ({j},{k}): numeric {fd2} vs analytic {d2}"
                );
                let fd1 =
                    fidelity_derivative_numeric(Dynamics::Graph(g), j, k, FRAC_PI_2, 1, 1e-3)
                        .unwrap();
                ensure!(fd1.abs() <= 1e-4, "{name} n={n}: numeric first derivative {fd1}");
                values.push(d2);
                checked += 1;
            }
            let sd2 = schedule_derivative_analytic(&schedule, k, 2).unwrap();
            let sfd2 = fidelity_derivative_numeric(
                Dynamics::Schedule(&schedule),
                j,
                k,
                FRAC_PI_2,
                2,
                1e-3,
            )
            .unwrap();
            ensure!(schedule_derivative_analytic(&schedule, k, 1).unwrap() == 0.0, "schedule d1");
            ensure!(
                (sfd2 - sd2).abs() <= 0.005 * sd2.abs(),
                "schedule n={n}: numeric {sfd2} vs analytic {sd2}"
            );
            values.push(sd2);
            let spread = values.iter().fold(0.0f64, |acc, v| acc.max((v - values[0]).abs()));
            ensure!(spread <= 1e-9, "n={n} pair ({j},{k}): variants disagree by {spread}");
        }
    }
    Ok(format!("{checked} graph/pair cases plus schedules: p' = 0, p'' = -2n"))
}

fn c12_property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for i in 0..100 {
        let m = rng.gen_range(2..=64);
        let weighted = rng.gen_bool(0.5);
        let density = rng.gen_range(0.1..0.7);
        let g = random_graph(&mut rng, m, density, weighted);
        let d = eigendecompose(&g, DEFAULT_CLUSTER_TOL).unwrap();
        let (cross, idem, complete) = d.projector_residuals();
        ensure!(
            cross <= 1e-8 && idem <= 1e-8 && complete <= 1e-8,
            "graph {i} (m={m}): projector residuals {cross:e} {idem:e} {complete:e}"
        );
        let evo = Evolution::from_decomposition(&d);
        let (t1, t2) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
        let u1 = evo.propagator(t1).unwrap();
        let u2 = evo.propagator(t2).unwrap();
        let u12 = evo.propagator(t1 + t2).unwrap();
        ensure!(unitarity_defect(&u12) <= 1e-9, "graph {i}: not unitary");
        let semi = (&u2 * &u1 - &u12).camax();
        ensure!(semi <= 1e-9, "graph {i}: semigroup defect {semi:e}");
    }

    let mut corpus = vec![
        hypercube(3).unwrap(),
        hypercube(2).unwrap(),
        Graph::from_edges(8, &(0..8).map(|i| (i.min((i + 1) % 8), i.max((i + 1) % 8), 1.0)).collect::<Vec<_>>())
            .unwrap(),
        Graph::from_edges(
            8,
            &(0..4).flat_map(|i| (4..8).map(move |j| (i, j, 1.0))).collect::<Vec<_>>(),
        )
        .unwrap(),
    ];
    for m in 5..=8 {
        for _ in 0..3 {
            corpus.push(random_graph(&mut rng, m, 0.5, false));
        }
    }
    let mut switched = 0;
    for g in &corpus {
        for p in switching_partitions(g).unwrap() {
            let s = gm_switch(g, &p).unwrap();
            ensure!(are_cospectral(g, &s, 1e-8).unwrap(), "switch not cospectral: {p:?}");
            ensure!(&gm_switch(&s, &p).unwrap() == g, "switch not an involution: {p:?}");
            switched += 1;
        }
    }
    let q4 = hypercube(4).unwrap();
    let s4 = gm_switch(&q4, &canonical_q4_partition()).unwrap();
    ensure!(are_cospectral(&q4, &s4, 1e-8).unwrap(), "canonical Q_4 switch not cospectral");
    ensure!(gm_switch(&s4, &canonical_q4_partition()).unwrap() == q4, "canonical not involutive");
    Ok(format!(
        "100 random graphs; {switched} switching partitions on {} small graphs + Q_4",
        corpus.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("1 hypercube PST pairs", c1_hypercube_pst),
        ("2 switched cube pairs", c2_switched_pst),
        ("3 cospectrality", c3_cospectrality),
        ("4 Hadamard diagonalizability", c4_hadamard),
        ("5 minimal polynomial", c5_minimal_polynomial),
        ("6 partially switched cubes", c6_partial_cubes),
        ("7 A_(5,3) PST set and supports", c7_example),
        ("8 blends and convex combinations", c8_blends_and_combinations),
        ("9 C +- aE spectra", c9_midpoint_perturbations),
        ("10 time-switched schedules", c10_time_switched),
        ("11 readout sensitivity", c11_sensitivity),
        ("12 property suites", c12_property_suites),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
