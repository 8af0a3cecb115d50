use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sepdisc::constructions::{
    basis_for_targets, basis_from_unitary, family_sep_not_locc, indistinguishable_subspace, tetra_unitary,
    verify_p0_p1_p2, FamilyParams, SubspaceKind, TetraPoint,
};
use sepdisc::discrimination::{decide, subspace_verdict, DiscriminationInstance, SubspaceVerdict};
use sepdisc::states::magic_state;
use sepdisc::tol::{install, Tolerances, TOL_ENV_VAR};

mod report;
mod state_file;
mod sweep;
mod verify;

use report::{exit_code, VerdictReport};
use state_file::StateFile;

/// Exit status for unreadable or invalid input.
const INPUT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "sepdisc", version, about = "Perfect discrimination of orthogonal pure states by separable operations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the states in a file can be perfectly discriminated.
    /// Exit status: 0 distinguishable, 1 indistinguishable, 2 undecided, 3 bad input.
    Decide {
        /// State file (JSON); `-` reads standard input.
        input: PathBuf,
        /// Ignore the file's `phi` and infer it from the states.
        #[arg(long)]
        ignore_phi: bool,
    },
    /// Print a state file for one of the built-in constructions.
    Construct {
        #[command(subcommand)]
        what: Construct,
    },
    /// Tetrahedron grid sweep written as CSV.
    Sweep {
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Run the seeded property suites.
    Verify {
        #[arg(value_enum)]
        suite: verify::Suite,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Random bases per sampled property.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(Subcommand)]
enum Construct {
    /// Two-qubit family that is separable- but not LOCC-distinguishable.
    Family { alpha: f64, beta: f64, gamma: f64 },
    /// Basis of an entangled complement with prescribed concurrences.
    Targets { c1: f64, c2: f64, c3: f64 },
    /// Basis of the maximally entangled complement with concurrences (x1, x2, x3).
    Tetra { x1: f64, x2: f64, x3: f64 },
    /// Complement of a span admitting no separable perfect discrimination.
    Subspace {
        #[arg(value_enum)]
        kind: SubspaceArg,
    },
    /// LOCC-distinguishable basis of the complement of the file's `phi`.
    LoccBasis { input: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum SubspaceArg {
    Dim7,
    Dim6,
}

fn read_input(path: &Path) -> Result<Vec<u8>, String> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        std::io::Read::read_to_end(&mut std::io::stdin(), &mut buf).map_err(|e| format!("stdin: {e}"))?;
        Ok(buf)
    } else {
        std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))
    }
}

fn load(path: &Path) -> Result<(Vec<u8>, state_file::Loaded), String> {
    let bytes = read_input(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| format!("{}: not UTF-8: {e}", path.display()))?;
    let loaded = state_file::parse(text).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((bytes, loaded))
}

fn cmd_decide(input: &Path, ignore_phi: bool) -> Result<u8, String> {
    let (bytes, loaded) = load(input)?;
    let phi = if ignore_phi { None } else { loaded.phi };
    let inst = DiscriminationInstance::pure(loaded.states, phi).map_err(|e| e.to_string())?;
    let v = decide(&inst).map_err(|e| e.to_string())?;
    let report = VerdictReport::new(&v, &loaded.names, &inst.densities(), &bytes);
    println!("{}", report.to_json());
    Ok(exit_code(v.status))
}

fn cmd_construct(what: &Construct) -> Result<u8, String> {
    let file = match what {
        Construct::Family { alpha, beta, gamma } => {
            let p = FamilyParams::new(*alpha, *beta, *gamma).map_err(|e| e.to_string())?;
            let (phi, basis) = family_sep_not_locc(&p).map_err(|e| e.to_string())?;
            StateFile::numbered("psi", &basis, Some(&phi))
        }
        Construct::Targets { c1, c2, c3 } => {
            let (phi, basis) = basis_for_targets([*c1, *c2, *c3]).map_err(|e| e.to_string())?;
            StateFile::numbered("psi", &basis, Some(&phi))
        }
        Construct::Tetra { x1, x2, x3 } => {
            let p = TetraPoint::new(*x1, *x2, *x3).map_err(|e| e.to_string())?;
            let basis = tetra_unitary(&p).and_then(|u| basis_from_unitary(&u)).map_err(|e| e.to_string())?;
            StateFile::numbered("psi", &basis, Some(&magic_state(0)))
        }
        Construct::Subspace { kind } => {
            let kind = match kind {
                SubspaceArg::Dim7 => SubspaceKind::Bipartite3x3Dim7,
                SubspaceArg::Dim6 => SubspaceKind::Tripartite222Dim6,
            };
            let spec = indistinguishable_subspace(kind);
            let report = verify_p0_p1_p2(&spec);
            for (label, p) in [("P0", &report.p0), ("P1", &report.p1), ("P2", &report.p2)] {
                eprintln!("{label} {}: {}", if p.passed { "pass" } else { "FAIL" }, p.detail);
            }
            StateFile::numbered("s", &spec.complement, None)
        }
        Construct::LoccBasis { input } => {
            let (_, loaded) = load(input)?;
            let phi = loaded.phi.ok_or_else(|| format!("{}: no phi given", input.display()))?;
            match subspace_verdict(&phi).map_err(|e| e.to_string())? {
                SubspaceVerdict::HasLoccBasis(basis) => StateFile::numbered("psi", &basis, Some(&phi)),
                SubspaceVerdict::NoDistinguishableBasis => {
                    eprintln!("no basis of the complement is distinguishable by separable operations");
                    return Ok(1);
                }
                SubspaceVerdict::Undecided(why) => {
                    eprintln!("undecided: {why}");
                    return Ok(2);
                }
            }
        }
    };
    println!("{}", file.to_json());
    Ok(0)
}

fn cmd_sweep(step: f64, output: &Path) -> Result<u8, String> {
    let rows = sweep::sweep(step)?;
    sweep::write_csv(&rows, output)?;
    let face = rows.iter().filter(|r| r.decide_status == "distinguishable").count();
    let worst = rows.iter().map(|r| r.max_error).fold(0.0, f64::max);
    eprintln!("{} rows ({face} distinguishable), max concurrence error {worst:.3e}", rows.len());
    Ok(0)
}

fn cmd_verify(suite: verify::Suite, seed: u64, samples: usize) -> u8 {
    let checks = verify::run(suite, &verify::Options { seed, samples });
    for c in &checks {
        println!("{}", c.line());
    }
    let failed = checks.iter().filter(|c| !c.ok()).count();
    println!("{} of {} properties passed (seed {seed})", checks.len() - failed, checks.len());
    u8::from(failed > 0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Tolerances::from_env() {
        Ok(t) => {
            if std::env::var_os(TOL_ENV_VAR).is_some() {
                let _ = install(t);
            }
        }
        Err(raw) => {
            eprintln!("error: {TOL_ENV_VAR} must be a positive number, got {raw:?}");
            return ExitCode::from(INPUT_ERROR);
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { INPUT_ERROR } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Decide { input, ignore_phi } => cmd_decide(input, *ignore_phi),
        Command::Construct { what } => cmd_construct(what),
        Command::Sweep { step, output } => cmd_sweep(*step, output),
        Command::Verify { suite, seed, samples } => Ok(cmd_verify(*suite, *seed, *samples)),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}
