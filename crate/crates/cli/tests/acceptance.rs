//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use harmonic_ports::hodge::{BoundaryCondition, Hodge, VectorField};
use harmonic_ports::mesh::{betti_numbers, gen_mesh, Shape};
use harmonic_ports::metric::{Cochain, MetricStructure};
use harmonic_ports::sim::{self, InitialState, MidpointStepper, SimulationConfig};
use harmonic_ports::stokesdirac::{integrability_check, StokesDiracSystem};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const HMF_RTOL: f64 = 1e-8;
const GREEN_RTOL: f64 = 1e-12;
const CLOSED_BALANCE_RTOL: f64 = 1e-12;
const BOUNDED_BALANCE_RTOL: f64 = 1e-10;
const SPLIT_RTOL: f64 = 1e-8;
const HARMONIC_FLOW_RTOL: f64 = 1e-10;
const DISK_HARMONIC_RTOL: f64 = 1e-10;
const ENERGY_DRIFT_RTOL: f64 = 1e-10;
const HARMONIC_DRIFT_ATOL: f64 = 1e-8;
const REVERSAL_RTOL: f64 = 1e-8;
/// Stacked least-squares residual below which the oracle calls a case solvable.
const ORACLE_SOLVABLE_RTOL: f64 = 1e-8;

const MESHES: [(Shape, usize); 6] = [
    (Shape::Sphere, 2),
    (Shape::Torus, 4),
    (Shape::Disk, 3),
    (Shape::Annulus, 2),
    (Shape::Ball, 2),
    (Shape::SolidTorus, 1),
];

fn hodge(shape: Shape, r: usize) -> Hodge {
    Hodge::new(MetricStructure::new(gen_mesh(shape, r).unwrap()).unwrap())
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn check(id: usize, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let passed = out.passed && elapsed <= budget;
    println!(
        "criterion {id:>2} {}: {name}; {} [{:.2}s / {}s]",
        if passed { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    passed
}

fn criterion_1() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (shape, r, expect) in [(Shape::Sphere, 2, [0, 1]), (Shape::Torus, 4, [2, 1])] {
        let h = hodge(shape, r);
        let betti = betti_numbers(h.metric().complex()).unwrap();
        let dims = [1, 2].map(|k| h.harmonic_basis(k, BoundaryCondition::Neumann).unwrap().dim());
        ok &= dims == expect && dims == [betti[1], betti[2]];
        detail.push(format!("{shape} H1_N,H2_N = {dims:?}"));
    }
    let h = hodge(Shape::SolidTorus, 1);
    let betti = betti_numbers(h.metric().complex()).unwrap();
    let vf = VectorField::PerVertex(vec![[0.0, 0.0, 1.0]; h.metric().complex().num_simplices(0)]);
    let knots = h.decompose_vector_field_3d(&vf).unwrap().dim_harmonic_knots;
    ok &= knots == 1 && betti[1] == 1;
    detail.push(format!("solid_torus knots = {knots}"));
    Outcome {
        passed: ok,
        detail: detail.join(", "),
    }
}

fn criterion_2() -> Outcome {
    let mut mismatches = Vec::new();
    let mut checked = 0;
    for (shape, r) in MESHES {
        let h = hodge(shape, r);
        let betti = betti_numbers(h.metric().complex()).unwrap();
        let n = h.dimension();
        for k in 0..=n {
            let dn = h.harmonic_basis(k, BoundaryCondition::Neumann).unwrap().dim();
            let dd = h.harmonic_basis(k, BoundaryCondition::Dirichlet).unwrap().dim();
            checked += 2;
            if dn != betti[k] || dd != betti[n - k] {
                mismatches.push(format!(
                    "{shape} k={k}: N {dn} vs {}, D {dd} vs {}",
                    betti[k],
                    betti[n - k]
                ));
            }
        }
    }
    Outcome {
        passed: mismatches.is_empty(),
        detail: format!("{checked} dimension equalities, mismatches {mismatches:?}"),
    }
}

fn criterion_3() -> Outcome {
    let mut worst = [0.0f64; 3];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (shape, r) in MESHES {
        let h = hodge(shape, r);
        let m = h.metric();
        for k in 0..=h.dimension() {
            for _ in 0..100 {
                let c = Cochain::random(m.complex(), k, &mut rng);
                let d = h.hodge_morrey_friedrichs(&c).unwrap();
                let scale = d.norms.input;
                worst[0] = worst[0].max(d.reconstruction_residual);
                worst[1] = worst[1].max(d.orthogonality_defect());
                for (i, part) in d.components().into_iter().enumerate() {
                    let again = h.hodge_morrey_friedrichs(part).unwrap();
                    let defect: f64 = again
                        .components()
                        .iter()
                        .enumerate()
                        .map(|(j, x)| m.norm(&(*x - &if i == j { part.clone() } else { part.scaled(0.0) })))
                        .sum();
                    worst[2] = worst[2].max(defect / scale);
                }
            }
        }
    }
    Outcome {
        passed: worst.iter().all(|&w| w <= HMF_RTOL),
        detail: format!(
            "reconstruction {:.1e}, orthogonality {:.1e}, idempotence {:.1e} (tol {HMF_RTOL:.0e})",
            worst[0], worst[1], worst[2]
        ),
    }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut failures = 0;
    let mut total = 0;
    for (shape, r) in MESHES {
        let m = MetricStructure::new(gen_mesh(shape, r).unwrap()).unwrap();
        let n = m.dimension();
        for _ in 0..100 {
            let c = Cochain::random(m.complex(), n - 1, &mut rng);
            let s = m.stokes_check(&c).unwrap();
            total += 1;
            if s.lhs_coefficients != s.rhs_coefficients || s.lhs.to_bits() != s.rhs.to_bits() {
                failures += 1;
            }
        }
    }
    Outcome {
        passed: failures == 0,
        detail: format!("{total} cochains, {failures} with nonzero residual"),
    }
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut alg, mut cons) = (0.0f64, 0.0f64);
    for (shape, r) in MESHES {
        let m = MetricStructure::new(gen_mesh(shape, r).unwrap()).unwrap();
        for k in 0..m.dimension() {
            let on_boundary = m.boundary().on_boundary(k).to_vec();
            for _ in 0..20 {
                let a = Cochain::random(m.complex(), k, &mut rng);
                let b = Cochain::random(m.complex(), k + 1, &mut rng);
                let da = m.exterior_derivative(&a).unwrap();
                let scale = m.norm(&da) * m.norm(&b) + m.norm(&a) * m.norm(&m.codifferential(&b).unwrap());
                alg = alg.max(m.green_defect(&a, &b).unwrap().abs() / scale);
                let vals: Vec<f64> = a
                    .as_slice()
                    .iter()
                    .zip(&on_boundary)
                    .map(|(&x, &bd)| if bd { 0.0 } else { x })
                    .collect();
                let a0 = Cochain::new(m.complex(), k, vals).unwrap();
                let scale = m.norm(&m.exterior_derivative(&a0).unwrap()) * m.norm(&b)
                    + m.norm(&a0) * m.norm(&m.constrained_codifferential(&b).unwrap());
                if scale > 0.0 {
                    cons = cons.max(m.green_defect_constrained(&a0, &b).unwrap().abs() / scale);
                }
            }
        }
    }
    Outcome {
        passed: alg <= GREEN_RTOL && cons <= GREEN_RTOL,
        detail: format!("algebraic {alg:.1e}, constrained zero-trace {cons:.1e} (tol {GREEN_RTOL:.0e})"),
    }
}

fn degree_pairs(n: usize) -> Vec<(usize, usize)> {
    (1..=n).map(|p| (p, n + 1 - p)).collect()
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut closed, mut bounded) = (0.0f64, 0.0f64);
    for (shape, r) in MESHES {
        let h = hodge(shape, r);
        let is_closed = h.metric().boundary().is_empty();
        for (p, q) in degree_pairs(h.dimension()) {
            for _ in 0..50 {
                let sys = StokesDiracSystem::random(&h, p, q, &mut rng).unwrap();
                let res = sys.power_balance().unwrap().balance_residual;
                if is_closed {
                    closed = closed.max(res);
                } else {
                    bounded = bounded.max(res);
                }
            }
        }
    }
    Outcome {
        passed: closed <= CLOSED_BALANCE_RTOL && bounded <= BOUNDED_BALANCE_RTOL,
        detail: format!(
            "closed {closed:.1e} (tol {CLOSED_BALANCE_RTOL:.0e}), bounded {bounded:.1e} (tol {BOUNDED_BALANCE_RTOL:.0e})"
        ),
    }
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let h = hodge(Shape::Annulus, 2);
    let c = h.metric().complex();
    let lambda = h.harmonic_basis(1, BoundaryCondition::Dirichlet).unwrap().basis[0].clone();
    let (mut min_harm, mut split, mut flow) = (f64::INFINITY, 0.0f64, 0.0f64);
    for i in 0..10 {
        let amp = 1.0 + i as f64;
        let a = &lambda.scaled(amp) + &Cochain::random(c, 1, &mut rng).scaled(0.1);
        let b = Cochain::random(c, 0, &mut rng);
        let sys = StokesDiracSystem::new(&h, 1, 2, a, b).unwrap();
        let r = sys.extended_power_balance().unwrap();
        min_harm = min_harm.min(r.harmonic_boundary_part.abs() / r.scale);
        split = split.max(r.split_residual);
        flow = flow.max(sys.harmonic_flow_identity().unwrap().max_relative());
    }
    let d = hodge(Shape::Disk, 3);
    let mut disk = 0.0f64;
    for _ in 0..10 {
        let sys = StokesDiracSystem::random(&d, 1, 2, &mut rng).unwrap();
        let r = sys.extended_power_balance().unwrap();
        disk = disk.max(r.harmonic_boundary_part.abs() / r.scale.max(f64::MIN_POSITIVE));
    }
    Outcome {
        passed: min_harm > 1e-6 && split <= SPLIT_RTOL && flow <= HARMONIC_FLOW_RTOL && disk <= DISK_HARMONIC_RTOL,
        detail: format!(
            "annulus min |harmonic|/scale {min_harm:.1e}, split {split:.1e}, identities {flow:.1e}; disk harmonic {disk:.1e}"
        ),
    }
}

/// Brute-force solvability of `d e = f`, `t e = ψ` by dense least squares on `[D; T]`.
fn oracle_solvable(m: &MetricStructure, f: &Cochain, psi: &Cochain) -> bool {
    let k = f.degree();
    let d = m.derivative_matrix(k - 1);
    let inc = m.boundary().inclusion(k - 1);
    let rows = d.nrows() + inc.len();
    let mut a = DMatrix::zeros(rows, d.ncols());
    a.rows_mut(0, d.nrows()).copy_from(&d);
    for (j, &(p, s)) in inc.iter().enumerate() {
        a[(d.nrows() + j, p)] = s as f64;
    }
    let rhs = DVector::from_iterator(rows, f.as_slice().iter().chain(psi.as_slice()).copied());
    let x = a.clone().svd(true, true).solve(&rhs, 1e-12).unwrap();
    (&a * x - &rhs).amax() <= ORACLE_SOLVABLE_RTOL * rhs.amax().max(1.0)
}

fn integrability_cases(h: &Hodge, rng: &mut ChaCha8Rng) -> Vec<(Cochain, Cochain, &'static str)> {
    let m = h.metric();
    let c = m.complex();
    let bc = m.boundary().complex();
    let n = h.dimension();
    let mut cases = Vec::new();
    for i in 0..20 {
        let k = 1 + i % n;
        let g = Cochain::random(c, k - 1, rng);
        let f = m.exterior_derivative(&g).unwrap();
        let psi = if bc.is_empty() {
            Cochain::zeros(bc, k - 1)
        } else {
            m.tangential_trace(&g).unwrap()
        };
        match i {
            0..=9 => cases.push((f, psi, "exact")),
            10..=14 => {
                let f = Cochain::random(c, k, rng);
                let psi = Cochain::random(bc, k - 1, rng);
                cases.push((f, psi, "random"));
            }
            _ => {
                let lambda = h
                    .harmonic_basis(k, BoundaryCondition::Dirichlet)
                    .unwrap()
                    .basis
                    .first()
                    .cloned();
                let bump = |x: &Cochain, rng: &mut ChaCha8Rng| {
                    let mut v = x.as_slice().to_vec();
                    let j = rng.random_range(0..v.len());
                    v[j] += 1.0;
                    Cochain::new(c, x.degree(), v).unwrap()
                };
                match (lambda, k < n) {
                    (Some(l), _) if i % 2 == 1 => cases.push((&f + &l, psi, "unsolvable: harmonic")),
                    (_, true) => cases.push((bump(&f, rng), psi, "unsolvable: not closed")),
                    (Some(l), false) => cases.push((&f + &l.scaled(0.5), psi, "unsolvable: harmonic")),
                    (None, false) => {
                        if bc.is_empty() {
                            unreachable!("closed meshes carry a top-degree harmonic field")
                        }
                        let mut v = psi.as_slice().to_vec();
                        v[0] += 1.0;
                        cases.push((f, Cochain::new(bc, k - 1, v).unwrap(), "unsolvable: boundary"));
                    }
                }
            }
        }
    }
    cases
}

fn criterion_8() -> Outcome {
    let candidates = [
        (Shape::Sphere, 1),
        (Shape::Sphere, 2),
        (Shape::Torus, 3),
        (Shape::Torus, 4),
        (Shape::Disk, 2),
        (Shape::Disk, 3),
        (Shape::Annulus, 1),
        (Shape::Annulus, 2),
        (Shape::Ball, 1),
        (Shape::Ball, 2),
        (Shape::SolidTorus, 1),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut meshes, mut cases, mut unsolvable, mut disagreements) = (0, 0, 0, Vec::new());
    for (shape, r) in candidates {
        let h = hodge(shape, r);
        if h.metric().complex().counts().iter().sum::<usize>() > 500 {
            continue;
        }
        meshes += 1;
        for (f, psi, kind) in integrability_cases(&h, &mut rng) {
            cases += 1;
            let oracle = oracle_solvable(h.metric(), &f, &psi);
            let verdict = integrability_check(&h, &f, &psi).unwrap().solvable;
            if kind.starts_with("unsolvable") {
                unsolvable += 1;
                if oracle {
                    disagreements.push(format!("{shape}{r}: constructed case is solvable ({kind})"));
                }
            }
            if oracle != verdict {
                disagreements.push(format!(
                    "{shape}{r} deg {}: {kind} oracle {oracle} verdict {verdict}",
                    f.degree()
                ));
            }
        }
    }
    Outcome {
        passed: disagreements.is_empty() && unsolvable == 5 * meshes,
        detail: format!(
            "{meshes} meshes, {cases} cases ({unsolvable} constructed unsolvable), disagreements {disagreements:?}"
        ),
    }
}

fn criterion_9() -> Outcome {
    let h = hodge(Shape::Torus, 4);
    let sys = sim::initial_system(&h, 1, 2, &InitialState::Random { seed: 9 }).unwrap();
    let config = SimulationConfig {
        dt: 0.01,
        steps: 1000,
        ..Default::default()
    };
    let trace = sim::run(&sys, &config).unwrap();
    let energy = trace.max_relative_energy_drift();
    let harmonic = trace.max_harmonic_drift();
    let nonzero = trace.rows[0].harm_p.iter().any(|x| x.abs() > 1e-3);

    let fwd = MidpointStepper::new(&h, 1, 2, config.dt).unwrap();
    let bwd = MidpointStepper::new(&h, 1, 2, -config.dt).unwrap();
    let mut cur = sys.clone();
    for _ in 0..config.steps {
        cur = fwd.step(&cur).unwrap();
    }
    let moved = (cur.alpha_p() - sys.alpha_p()).values().norm();
    for _ in 0..config.steps {
        cur = bwd.step(&cur).unwrap();
    }
    let z0 = sys.alpha_p().values().norm_squared() + sys.e_q().values().norm_squared();
    let dz = (cur.alpha_p() - sys.alpha_p()).values().norm_squared() + (cur.e_q() - sys.e_q()).values().norm_squared();
    let reversal = (dz / z0).sqrt();
    Outcome {
        passed: energy <= ENERGY_DRIFT_RTOL
            && harmonic <= HARMONIC_DRIFT_ATOL
            && reversal <= REVERSAL_RTOL
            && nonzero
            && moved > 1e-3,
        detail: format!(
            "energy drift {energy:.1e}, harmonic drift {harmonic:.1e}, reversal {reversal:.1e}, state moved {moved:.2}"
        ),
    }
}

fn criterion_10() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_harmonic-ports");
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::TempDir::new().unwrap();
        let mut files = Vec::new();
        for (shape, r) in MESHES {
            let mesh = format!("{shape}{r}.json");
            let run = |args: &[&str]| Command::new(exe).current_dir(dir.path()).args(args).output().unwrap();
            let gen = run(&[
                "gen",
                "--shape",
                shape.name(),
                "--resolution",
                &r.to_string(),
                "--out",
                &mesh,
                "--seed",
                "0",
            ]);
            let analyze = run(&["analyze", &mesh, "--seed", "0"]);
            files.push((
                gen.status.code(),
                gen.stdout,
                std::fs::read(dir.path().join(&mesh)).unwrap(),
                analyze.status.code(),
                analyze.stdout,
            ));
        }
        outputs.push(files);
    }
    let identical = outputs[0] == outputs[1];
    let all_ok = outputs[0].iter().all(|(g, _, _, a, _)| *g == Some(0) && *a == Some(0));
    Outcome {
        passed: identical && all_ok,
        detail: format!(
            "{} meshes, byte-identical {identical}, exit codes ok {all_ok}",
            MESHES.len()
        ),
    }
}

fn main() -> ExitCode {
    type Criterion = (usize, &'static str, u64, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        (1, "topological dimensions", 30, criterion_1),
        (2, "Hodge isomorphism on all shapes and degrees", 120, criterion_2),
        (3, "HMF reconstruction, orthogonality, idempotence", 600, criterion_3),
        (4, "exact discrete Stokes identity", 600, criterion_4),
        (5, "Green adjointness", 600, criterion_5),
        (6, "power balance", 600, criterion_6),
        (7, "extended power balance and harmonic flows", 600, criterion_7),
        (8, "integrability against brute-force oracle", 600, criterion_8),
        (9, "simulation invariants", 60, criterion_9),
        (10, "gen + analyze determinism", 600, criterion_10),
    ];
    let mut failed = 0;
    for (id, name, budget, f) in criteria {
        if !check(id, name, Duration::from_secs(budget), f) {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
