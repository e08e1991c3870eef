//! `harmonic-ports`: generate meshes, inspect their cohomology, decompose
//! cochains, verify Stokes-Dirac power balances and run simulations.
//!
//! Exit codes: 0 success, 1 validation or identity failure, 2 numerical
//! failure, 3 I/O or usage error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CommandResult, EXIT_IO};

#[derive(Parser, Debug)]
#[command(name = "harmonic-ports", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a mesh and write it as JSON.
    Gen {
        /// sphere, torus, disk, annulus, ball or solid_torus.
        #[arg(long)]
        shape: String,
        #[arg(long, default_value_t = 2)]
        resolution: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Validate a mesh and tabulate Betti numbers against harmonic dimensions.
    Analyze {
        mesh: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Hodge-Morrey-Friedrichs decomposition of a cochain.
    Decompose {
        mesh: PathBuf,
        cochain: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check power balances and harmonic flow identities.
    SdVerify {
        mesh: PathBuf,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        /// State JSON with `p`, `q`, `alpha_p` and `e_q`.
        #[arg(long, conflicts_with = "random_states")]
        state: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        random_states: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate with the implicit midpoint rule and write a CSV trace.
    Simulate {
        mesh: PathBuf,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// `random`, `zero`, `harmonic:DEGREE:INDEX:AMPLITUDE` or `bump:VERTEX:WIDTH`.
        #[arg(long, default_value = "random")]
        init: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Snapshot every N steps into `<out>.snapshots/`; 0 disables.
        #[arg(long, default_value_t = 0)]
        stride: usize,
        #[arg(long, default_value = "trace.csv")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let tol_scale = match commands::tol_scale() {
        Ok(s) => s,
        Err(r) => return finish(r),
    };
    let result = match cli.command {
        Command::Gen {
            shape,
            resolution,
            out,
            seed,
        } => commands::gen(&shape, resolution, &out, seed),
        Command::Analyze { mesh, out, seed } => commands::analyze(&mesh, out.as_deref(), seed),
        Command::Decompose {
            mesh,
            cochain,
            out,
            seed,
        } => commands::decompose(&mesh, &cochain, out.as_deref(), seed, tol_scale),
        Command::SdVerify {
            mesh,
            p,
            q,
            state,
            random_states,
            seed,
            out,
        } => commands::sd_verify(
            &mesh,
            p,
            q,
            state.as_deref(),
            random_states,
            seed,
            out.as_deref(),
            tol_scale,
        ),
        Command::Simulate {
            mesh,
            p,
            q,
            dt,
            steps,
            init,
            seed,
            stride,
            out,
        } => commands::simulate(&mesh, p, q, dt, steps, &init, seed, stride, &out, tol_scale),
    };
    finish(result)
}

fn finish(r: CommandResult) -> ExitCode {
    for line in &r.summary {
        eprintln!("{line}");
    }
    if let Some(report) = &r.stdout {
        println!("{report}");
    }
    ExitCode::from(r.code)
}
