use std::path::{Path, PathBuf};

use harmonic_ports::hodge::Hodge;
use harmonic_ports::mesh::{
    betti_numbers, betti_numbers_float, euler_characteristic, gen_mesh, read_mesh, validate_manifold, write_mesh, Shape,
};
use harmonic_ports::metric::{CochainFile, MetricStructure};
use harmonic_ports::sim::{self, InitialState, SimulationConfig};
use harmonic_ports::stokesdirac::{
    integrability_check, StateFile, StokesDiracSystem, BOUNDED_BALANCE_RTOL, CLOSED_BALANCE_RTOL, HARMONIC_FLOW_RTOL,
    SPLIT_RTOL,
};
use harmonic_ports::{Error, SimplicialComplex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_NUMERICAL: u8 = 2;
pub const EXIT_IO: u8 = 3;

/// HMF reconstruction and orthogonality tolerance.
const DECOMPOSE_RTOL: f64 = 1e-8;
/// Closed-mesh simulation tolerances.
const ENERGY_DRIFT_RTOL: f64 = 1e-10;
const HARMONIC_DRIFT_ATOL: f64 = 1e-8;
/// Bounded-mesh per-step balance tolerance.
const STEP_BALANCE_RTOL: f64 = 1e-8;

pub const TOL_SCALE_VAR: &str = "HARMONIC_PORTS_TOL_SCALE";

#[derive(Debug)]
pub struct CommandResult {
    pub code: u8,
    /// JSON report for stdout, when not written to a file.
    pub stdout: Option<String>,
    pub summary: Vec<String>,
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_)
        | Error::Json(_)
        | Error::InvalidConfig(_)
        | Error::UnsupportedResolution { .. }
        | Error::DegreeOutOfRange { .. }
        | Error::DegreeMismatch { .. }
        | Error::ComplexMismatch
        | Error::LengthMismatch { .. }
        | Error::InvalidDegrees { .. }
        | Error::WrongDimension { .. } => EXIT_IO,
        Error::DuplicateSimplex(_)
        | Error::DanglingVertexIndex { .. }
        | Error::NonOrientable(_)
        | Error::InvalidMesh(_)
        | Error::NotWellCentered
        | Error::NotInHarmonicComplement(_) => EXIT_VALIDATION,
        _ => EXIT_NUMERICAL,
    }
}

fn failure(command: &str, seed: u64, e: &Error) -> CommandResult {
    let code = exit_code(e);
    let report = json!({ "command": command, "seed": seed, "error": e.to_string(), "exit_code": code });
    CommandResult {
        code,
        stdout: Some(pretty(&report)),
        summary: vec![format!("{command}: {e}")],
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("report serialization cannot fail")
}

/// Writes the report to `out` or returns it for stdout.
fn emit(
    command: &str,
    seed: u64,
    report: Value,
    out: Option<&Path>,
    code: u8,
    mut summary: Vec<String>,
) -> CommandResult {
    let text = pretty(&report);
    match out {
        None => CommandResult {
            code,
            stdout: Some(text),
            summary,
        },
        Some(path) => match std::fs::write(path, text + "\n") {
            Ok(()) => {
                summary.push(format!("report written to {}", path.display()));
                CommandResult {
                    code,
                    stdout: None,
                    summary,
                }
            }
            Err(e) => failure(command, seed, &Error::from(e)),
        },
    }
}

pub fn tol_scale() -> Result<f64, CommandResult> {
    match std::env::var(TOL_SCALE_VAR) {
        Err(_) => Ok(1.0),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
            _ => Err(CommandResult {
                code: EXIT_IO,
                stdout: None,
                summary: vec![format!("{TOL_SCALE_VAR} must be a positive number, got '{s}'")],
            }),
        },
    }
}

fn load_complex(path: &Path) -> Result<SimplicialComplex, Error> {
    read_mesh(path)?.to_complex()
}

fn load_hodge(path: &Path) -> Result<Hodge, Error> {
    Ok(Hodge::new(MetricStructure::new(load_complex(path)?)?))
}

pub fn gen(shape: &str, resolution: usize, out: &Path, seed: u64) -> CommandResult {
    let run = || -> Result<(Value, Vec<String>), Error> {
        let shape: Shape = shape.parse()?;
        let c = gen_mesh(shape, resolution)?;
        write_mesh(out, &c)?;
        let chi = euler_characteristic(&c);
        let report = json!({
            "command": "gen",
            "seed": seed,
            "shape": shape.name(),
            "resolution": resolution,
            "dimension": c.dimension(),
            "counts": c.counts(),
            "euler_characteristic": chi,
            "out": out.display().to_string(),
        });
        let summary = vec![format!(
            "{shape} r={resolution}: counts {:?}, χ = {chi}, written to {}",
            c.counts(),
            out.display()
        )];
        Ok((report, summary))
    };
    match run() {
        Ok((report, summary)) => emit("gen", seed, report, None, EXIT_OK, summary),
        Err(e) => failure("gen", seed, &e),
    }
}

pub fn analyze(mesh: &Path, out: Option<&Path>, seed: u64) -> CommandResult {
    let file = match read_mesh(mesh) {
        Ok(f) => f,
        Err(e) => return failure("analyze", seed, &e),
    };
    let c = match file.to_complex_lenient() {
        Ok(c) => c,
        Err(e) => return failure("analyze", seed, &e),
    };
    let validation = validate_manifold(&c);
    if !validation.is_valid() {
        let report = json!({
            "command": "analyze",
            "seed": seed,
            "valid": false,
            "findings": validation.findings,
        });
        let summary = vec![format!(
            "mesh failed validation with {} findings",
            validation.findings.len()
        )];
        return emit("analyze", seed, report, out, EXIT_VALIDATION, summary);
    }
    let run = || -> Result<(Value, bool), Error> {
        let c = file.to_complex()?;
        let (betti, exact) = match betti_numbers(&c) {
            Ok(b) => (b, true),
            Err(_) => (betti_numbers_float(&c), false),
        };
        let counts = c.counts();
        let chi = euler_characteristic(&c);
        let hodge = Hodge::new(MetricStructure::new(c)?);
        let boundary_components = hodge.metric().boundary().connected_components();
        let rows = hodge.cohomology_report()?;
        let consistent = rows.iter().all(|r| r.consistent);
        let report = json!({
            "command": "analyze",
            "seed": seed,
            "valid": true,
            "dimension": hodge.dimension(),
            "counts": counts,
            "euler_characteristic": chi,
            "boundary_components": boundary_components,
            "betti": betti,
            "betti_exact": exact,
            "harmonic_table": rows,
            "consistent": consistent,
        });
        Ok((report, consistent))
    };
    match run() {
        Ok((report, consistent)) => {
            let summary = vec![format!(
                "betti {}, harmonic dimensions {}",
                report["betti"],
                if consistent { "consistent" } else { "INCONSISTENT" }
            )];
            let code = if consistent { EXIT_OK } else { EXIT_VALIDATION };
            emit("analyze", seed, report, out, code, summary)
        }
        Err(e) => failure("analyze", seed, &e),
    }
}

pub fn decompose(mesh: &Path, cochain: &Path, out: Option<&Path>, seed: u64, tol_scale: f64) -> CommandResult {
    let run = || -> Result<(Value, bool), Error> {
        let hodge = load_hodge(mesh)?;
        let c = CochainFile::read(cochain)?.to_cochain(hodge.metric().complex())?;
        let d = hodge.hodge_morrey_friedrichs(&c)?;
        let tol = DECOMPOSE_RTOL * tol_scale;
        let orthogonality = d.orthogonality_defect();
        let passed = d.reconstruction_residual <= tol && orthogonality <= tol;
        let report = json!({
            "command": "decompose",
            "seed": seed,
            "degree": d.degree,
            "norms": d.norms,
            "reconstruction_residual": d.reconstruction_residual,
            "orthogonality_defect": orthogonality,
            "gram": d.gram,
            "tolerance": tol,
            "passed": passed,
        });
        Ok((report, passed))
    };
    match run() {
        Ok((report, passed)) => {
            let summary = vec![format!(
                "norms {}, residual {}",
                report["norms"], report["reconstruction_residual"]
            )];
            emit(
                "decompose",
                seed,
                report,
                out,
                if passed { EXIT_OK } else { EXIT_VALIDATION },
                summary,
            )
        }
        Err(e) => failure("decompose", seed, &e),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn sd_verify(
    mesh: &Path,
    p: usize,
    q: usize,
    state: Option<&Path>,
    random_states: usize,
    seed: u64,
    out: Option<&Path>,
    tol_scale: f64,
) -> CommandResult {
    let run = || -> Result<(Value, bool), Error> {
        let hodge = load_hodge(mesh)?;
        let systems = match state {
            Some(path) => {
                let f = StateFile::read(path)?;
                if (f.p, f.q) != (p, q) {
                    return Err(Error::InvalidConfig(format!(
                        "state has degrees ({}, {}), expected ({p}, {q})",
                        f.p, f.q
                    )));
                }
                vec![f.to_system(&hodge)?]
            }
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..random_states)
                    .map(|_| StokesDiracSystem::random(&hodge, p, q, &mut rng))
                    .collect::<Result<_, _>>()?
            }
        };
        let closed = hodge.metric().boundary().is_empty();
        let balance_tol = tol_scale
            * if closed {
                CLOSED_BALANCE_RTOL
            } else {
                BOUNDED_BALANCE_RTOL
            };
        let mut all_passed = true;
        let mut entries = Vec::new();
        for sys in &systems {
            let bal = sys.extended_power_balance()?;
            let flows = sys.harmonic_flow_identity()?;
            let f = sys.flows(&sys.efforts())?;
            let psi = hodge.metric().tangential_trace(sys.e_q())?.scaled(sys.sign());
            let verdict = integrability_check(&hodge, &f.f_p, &psi)?;
            let passed = bal.balance_residual <= balance_tol
                && bal.split_residual <= SPLIT_RTOL * tol_scale
                && flows.max_relative() <= HARMONIC_FLOW_RTOL * tol_scale
                && verdict.solvable;
            all_passed &= passed;
            entries.push(json!({
                "power_balance": bal,
                "harmonic_flow": flows,
                "flow_integrable": verdict.solvable,
                "passed": passed,
            }));
        }
        let report = json!({
            "command": "sd-verify",
            "seed": seed,
            "p": p,
            "q": q,
            "closed": closed,
            "tolerances": {
                "balance": balance_tol,
                "split": SPLIT_RTOL * tol_scale,
                "harmonic_flow": HARMONIC_FLOW_RTOL * tol_scale,
            },
            "states": entries,
            "passed": all_passed,
        });
        Ok((report, all_passed))
    };
    match run() {
        Ok((report, passed)) => {
            let n = report["states"].as_array().map_or(0, Vec::len);
            let summary = vec![format!(
                "{n} states, {}",
                if passed {
                    "all identities hold"
                } else {
                    "TOLERANCE BREACH"
                }
            )];
            emit(
                "sd-verify",
                seed,
                report,
                out,
                if passed { EXIT_OK } else { EXIT_VALIDATION },
                summary,
            )
        }
        Err(e) => failure("sd-verify", seed, &e),
    }
}

/// `random`, `zero`, `harmonic:DEGREE:INDEX:AMPLITUDE` or `bump:VERTEX:WIDTH`.
pub fn parse_init(s: &str, seed: u64) -> Result<Option<InitialState>, Error> {
    let bad = || Error::InvalidConfig(format!("unrecognized --init '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["random"] => Ok(Some(InitialState::Random { seed })),
        ["zero"] => Ok(None),
        ["harmonic", d, i, a] => Ok(Some(InitialState::HarmonicSeeded {
            degree: d.parse().map_err(|_| bad())?,
            index: i.parse().map_err(|_| bad())?,
            amplitude: a.parse().map_err(|_| bad())?,
        })),
        ["bump", v, w] => Ok(Some(InitialState::GaussianBump {
            center: v.parse().map_err(|_| bad())?,
            width: w.parse().map_err(|_| bad())?,
        })),
        _ => Err(bad()),
    }
}

pub fn snapshot_dir(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".snapshots");
    PathBuf::from(s)
}

#[allow(clippy::too_many_arguments)]
pub fn simulate(
    mesh: &Path,
    p: usize,
    q: usize,
    dt: f64,
    steps: usize,
    init: &str,
    seed: u64,
    stride: usize,
    out: &Path,
    tol_scale: f64,
) -> CommandResult {
    let run = || -> Result<(Value, bool), Error> {
        let init_state = parse_init(init, seed)?;
        let hodge = load_hodge(mesh)?;
        let config = SimulationConfig {
            dt,
            steps,
            stride,
            init: init_state.clone().unwrap_or(InitialState::Random { seed }),
            ..Default::default()
        };
        config.validate()?;
        let sys = match &init_state {
            Some(s) => sim::initial_system(&hodge, p, q, s)?,
            None => StokesDiracSystem::zero(&hodge, p, q)?,
        };
        let trace = sim::run(&sys, &config)?;
        trace.write_csv(out)?;
        if stride > 0 {
            trace.write_snapshots(snapshot_dir(out))?;
        }
        let closed = hodge.metric().boundary().is_empty();
        let energy = trace.max_relative_energy_drift();
        let harmonic = trace.max_harmonic_drift();
        let step_balance = trace.max_dhdt_residual();
        let passed = if closed {
            energy <= ENERGY_DRIFT_RTOL * tol_scale && harmonic <= HARMONIC_DRIFT_ATOL * tol_scale
        } else {
            step_balance <= STEP_BALANCE_RTOL * tol_scale
        };
        let last = trace.rows.last().expect("trace has steps + 1 rows");
        let report = json!({
            "command": "simulate",
            "seed": seed,
            "p": p,
            "q": q,
            "dt": dt,
            "steps": steps,
            "init": init,
            "closed": closed,
            "spectral_radius": trace.spectral_radius,
            "dt_spectral_radius": trace.dt_spectral_radius,
            "initial_energy": trace.rows[0].h,
            "final_energy": last.h,
            "max_relative_energy_drift": energy,
            "max_harmonic_drift": harmonic,
            "max_step_balance_residual": step_balance,
            "snapshots": trace.snapshots.len(),
            "trace": out.display().to_string(),
            "passed": passed,
        });
        Ok((report, passed))
    };
    match run() {
        Ok((report, passed)) => {
            let summary = vec![format!(
                "H drift {}, harmonic drift {}, trace {}",
                report["max_relative_energy_drift"],
                report["max_harmonic_drift"],
                out.display()
            )];
            emit(
                "simulate",
                seed,
                report,
                None,
                if passed { EXIT_OK } else { EXIT_VALIDATION },
                summary,
            )
        }
        Err(e) => failure("simulate", seed, &e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_specs() {
        assert_eq!(parse_init("random", 4).unwrap(), Some(InitialState::Random { seed: 4 }));
        assert_eq!(parse_init("zero", 0).unwrap(), None);
        assert_eq!(
            parse_init("bump:3:0.5", 0).unwrap(),
            Some(InitialState::GaussianBump { center: 3, width: 0.5 })
        );
        assert!(parse_init("harmonic:1:x:1", 0).is_err());
    }

    #[test]
    fn error_classes() {
        assert_eq!(exit_code(&Error::Io("x".into())), EXIT_IO);
        assert_eq!(exit_code(&Error::NonOrientable(vec![0, 1])), EXIT_VALIDATION);
        assert_eq!(exit_code(&Error::FactorizationFailure("x".into())), EXIT_NUMERICAL);
    }
}
