//! Command-line surface over the synthesis pipeline.
//!
//! Subcommands: validate, synthesize, circuit, simulate, verify, families.
//! Exit codes: 0 ok, 2 validation fail, 3 input error, 4 covariance or
//! constituent error, 5 internal numerical failure.

use std::collections::HashMap;
use std::io::Write;
use std::process::ExitCode;

use covneu::circuits::{
    build_cyclic_circuit, build_dihedral_circuit, build_wh_circuit, parse_text, write_qasm,
    write_text, Circuit, Gate, WhVector,
};
use covneu::error::Error;
use covneu::families::Family;
use covneu::groups::Representation;
use covneu::json::{
    family_from_name, family_group_rep, parse_complex, DecompositionJson, GroupJson, MatrixJson,
    PovmJson, SynthesisJson,
};
use covneu::linalg::ComplexMatrix;
use covneu::povm::{validate, RankOnePovm};
use covneu::synth::{pad_to_qubits, synthesize, verify, Options};
use covneu::{repdec, Tolerances};

const USAGE: &str = "\
covneu: compile group-covariant rank-one POVMs into orthogonal measurements

USAGE:
    covneu validate <povm.json>
    covneu synthesize <povm.json> (--group <group.json> | --family <name>)
                      [--out <result.json>] [--dump-decomposition <dec.json>]
                      [--trials N] [--seed S] [--decompose-seed S] [--general]
    covneu circuit --family cyclic --n N [--d D] [--out <file>] [--qasm]
    covneu circuit --family dihedral --m M --alpha C --beta C [--out <file>]
    covneu circuit --family wh --m M --alpha C [--out <file>]
    covneu circuit --from-synthesis <result.json> [--out <file>]
    covneu simulate <circuit.txt> (--basis K [--dim D] | --state <state.json>)
                    [--shots N] [--seed S]
    covneu verify <result.json>
    covneu families

Complex flags use the literal form re+imi, e.g. 0.5+0i or 0.7-0.2i.
The COVNEU_TOL environment variable rescales every tolerance so that its
value becomes the unitarity tolerance (default 1e-9).
";

/// Print a line to stdout, exiting quietly when the consumer closed the
/// pipe (e.g. `covneu simulate ... | head`).
fn out_line(line: std::fmt::Arguments<'_>) {
    let mut stdout = std::io::stdout().lock();
    if writeln!(stdout, "{line}").is_err() {
        std::process::exit(0);
    }
}

macro_rules! outln {
    ($($arg:tt)*) => { out_line(format_args!($($arg)*)) };
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parse(_)
        | Error::Io(_)
        | Error::Json(_)
        | Error::DimensionMismatch { .. }
        | Error::UnsupportedParameter(_)
        | Error::NotNormalized { .. }
        | Error::NotSquare { .. }
        | Error::NonUnitaryGenerator { .. }
        | Error::WireOutOfRange { .. } => 3,
        Error::NotCovariant { .. }
        | Error::NotAConstituent { .. }
        | Error::HypothesisViolated { .. }
        | Error::NotCompletable { .. } => 4,
        _ => 5,
    }
}

fn tolerances() -> Result<Tolerances, Error> {
    match std::env::var("COVNEU_TOL") {
        Ok(value) => {
            let eps: f64 = value
                .parse()
                .map_err(|_| Error::Parse(format!("COVNEU_TOL='{value}' is not a number")))?;
            if eps <= 0.0 {
                return Err(Error::Parse("COVNEU_TOL must be positive".into()));
            }
            Ok(Tolerances::scaled(eps / 1e-9))
        }
        Err(_) => Ok(Tolerances::default()),
    }
}

/// Minimal flag parser: positionals plus `--key value` pairs (and bare
/// `--key` switches listed in `switches`). Flags outside `allowed` are
/// rejected.
struct Args {
    positional: Vec<String>,
    flags: HashMap<String, String>,
}

fn parse_args(args: &[String], allowed: &[&str], switches: &[&str]) -> Result<Args, Error> {
    let mut positional = Vec::new();
    let mut flags = HashMap::new();
    let mut i = 0;
    while i < args.len() {
        let a = &args[i];
        if let Some(key) = a.strip_prefix("--") {
            if !allowed.contains(&key) && !switches.contains(&key) {
                return Err(Error::Parse(format!("unknown flag --{key}")));
            }
            if switches.contains(&key) {
                flags.insert(key.to_string(), String::from("true"));
                i += 1;
            } else {
                let value = args
                    .get(i + 1)
                    .ok_or_else(|| Error::Parse(format!("flag --{key} needs a value")))?;
                flags.insert(key.to_string(), value.clone());
                i += 2;
            }
        } else {
            positional.push(a.clone());
            i += 1;
        }
    }
    Ok(Args { positional, flags })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &str) -> Result<T, Error> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn write_out(path: Option<&String>, content: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn cmd_validate(args: &Args, tol: &Tolerances) -> Result<u8, Error> {
    let path = args
        .positional
        .first()
        .ok_or_else(|| Error::Parse("validate needs a POVM file".into()))?;
    let json: PovmJson = read_json(path)?;
    let povm = json.build(tol)?;
    let report = validate(&povm, tol);
    outln!(
        "outcomes: {}  dimension: {}  completeness deviation: {:.3e}",
        povm.len(),
        povm.dim(),
        report.completeness_deviation
    );
    if !report.duplicate_pairs.is_empty() {
        outln!("duplicate operator pairs: {:?}", report.duplicate_pairs);
    }
    if report.passes {
        outln!("PASS");
        Ok(0)
    } else {
        outln!("FAIL");
        Ok(2)
    }
}

fn resolve_family(name: &str, povm: &RankOnePovm) -> Result<Family, Error> {
    // Family parameters are implied by the POVM shape.
    match name {
        "cyclic" => Ok(Family::Cyclic {
            n: povm.len(),
            d: povm.dim(),
        }),
        "dihedral" => Ok(Family::Dihedral { m: povm.len() / 2 }),
        "weyl-heisenberg" | "wh" => Ok(Family::WeylHeisenberg { m: povm.dim() }),
        other => family_from_name(other, 0, povm.dim()),
    }
}

fn cmd_synthesize(args: &Args, tol: &Tolerances) -> Result<u8, Error> {
    let path = args
        .positional
        .first()
        .ok_or_else(|| Error::Parse("synthesize needs a POVM file".into()))?;
    let povm_json: PovmJson = read_json(path)?;
    let povm = povm_json.build(tol)?;

    let (phi, family): (Representation, Option<Family>) =
        match (args.flags.get("group"), args.flags.get("family")) {
            (Some(group_path), None) => {
                let group_json: GroupJson = read_json(group_path)?;
                let (_, rep) = group_json.build(povm.dim(), tol)?;
                (rep, None)
            }
            (None, Some(name)) => {
                let family = resolve_family(name, &povm)?;
                let (_, rep) = family_group_rep(family, tol)?;
                (rep, Some(family))
            }
            _ => {
                return Err(Error::Parse(
                    "synthesize needs exactly one of --group or --family".into(),
                ))
            }
        };

    let mut options = Options {
        family: if args.flags.contains_key("general") {
            None
        } else {
            family
        },
        ..Options::default()
    };
    if let Some(t) = args.flags.get("trials") {
        options.verify_trials = t
            .parse()
            .map_err(|_| Error::Parse(format!("bad --trials '{t}'")))?;
    }
    if let Some(s) = args.flags.get("seed") {
        options.verify_seed = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad --seed '{s}'")))?;
    }
    if let Some(s) = args.flags.get("decompose-seed") {
        options.decompose_seed = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad --decompose-seed '{s}'")))?;
    }

    if let Some(dump_path) = args.flags.get("dump-decomposition") {
        let mon = covneu::povm::derive_monomial(&phi, &povm, tol)?.to_representation();
        let (dec_phi, dec_mon) = match options.family {
            Some(f) => {
                let fb = repdec::family_bases(f)?;
                (
                    repdec::from_base_change(
                        &phi,
                        fb.u.clone(),
                        &fb.left_degrees,
                        options.decompose_seed,
                        tol,
                    )?,
                    repdec::from_base_change(
                        &mon,
                        fb.w.clone(),
                        &fb.right_degrees,
                        options.decompose_seed,
                        tol,
                    )?,
                )
            }
            None => (
                repdec::decompose(&phi, options.decompose_seed, tol)?,
                repdec::decompose(&mon, options.decompose_seed, tol)?,
            ),
        };
        let dump = serde_json::json!({
            "phi": DecompositionJson::from_decomposition(&dec_phi),
            "phi_mon": DecompositionJson::from_decomposition(&dec_mon),
        });
        std::fs::write(dump_path, serde_json::to_string_pretty(&dump)?)?;
    }

    let result = synthesize(&povm, &phi, &options, tol)?;
    outln!(
        "synthesized {}x{} transform; verification max deviation {:.3e} over {} states",
        result.tilde_m.rows(),
        result.tilde_m.cols(),
        result.verification.max_deviation,
        result.verification.trials
    );
    let json = SynthesisJson::from_result(&result, &povm);
    let text = serde_json::to_string_pretty(&json)?;
    write_out(args.flags.get("out"), &(text + "\n"))?;
    Ok(0)
}

fn cmd_circuit(args: &Args, tol: &Tolerances) -> Result<u8, Error> {
    let circuit: Circuit =
        if let Some(result_path) = args.flags.get("from-synthesis") {
            let json: SynthesisJson = read_json(result_path)?;
            let tilde_m = json.tilde_m.to_matrix()?;
            let (padded, qubits) = pad_to_qubits(&tilde_m.adjoint());
            let mut c = Circuit::new(qubits);
            c.push(Gate::Controlled {
                controls: vec![],
                control_values: vec![],
                targets: (0..qubits).collect(),
                op: padded,
            });
            c
        } else {
            let name = args
                .flags
                .get("family")
                .ok_or_else(|| Error::Parse("circuit needs --family or --from-synthesis".into()))?;
            match name.as_str() {
                "cyclic" => {
                    let n: usize = args
                        .flags
                        .get("n")
                        .ok_or_else(|| Error::Parse("cyclic circuit needs --n".into()))?
                        .parse()
                        .map_err(|_| Error::Parse("bad --n".into()))?;
                    let d: usize = match args.flags.get("d") {
                        Some(s) => s.parse().map_err(|_| Error::Parse("bad --d".into()))?,
                        None => n,
                    };
                    build_cyclic_circuit(n, d)?
                }
                "dihedral" => {
                    let m: usize = args
                        .flags
                        .get("m")
                        .ok_or_else(|| Error::Parse("dihedral circuit needs --m".into()))?
                        .parse()
                        .map_err(|_| Error::Parse("bad --m".into()))?;
                    let alpha =
                        parse_complex(args.flags.get("alpha").ok_or_else(|| {
                            Error::Parse("dihedral circuit needs --alpha".into())
                        })?)?;
                    let beta =
                        parse_complex(args.flags.get("beta").ok_or_else(|| {
                            Error::Parse("dihedral circuit needs --beta".into())
                        })?)?;
                    build_dihedral_circuit(m, alpha, beta)?
                }
                "wh" | "weyl-heisenberg" => {
                    let m: usize = args
                        .flags
                        .get("m")
                        .ok_or_else(|| Error::Parse("wh circuit needs --m".into()))?
                        .parse()
                        .map_err(|_| Error::Parse("bad --m".into()))?;
                    let alpha = parse_complex(
                        args.flags
                            .get("alpha")
                            .ok_or_else(|| Error::Parse("wh circuit needs --alpha".into()))?,
                    )?;
                    build_wh_circuit(m, &WhVector::AlphaProfile(alpha))?
                }
                other => {
                    return Err(Error::UnsupportedParameter(format!(
                        "unknown circuit family '{other}'"
                    )))
                }
            }
        };
    let _ = tol;
    let text = if args.flags.contains_key("qasm") {
        write_qasm(&circuit)
    } else {
        write_text(&circuit)?
    };
    write_out(args.flags.get("out"), &text)?;
    Ok(0)
}

fn cmd_simulate(args: &Args, tol: &Tolerances) -> Result<u8, Error> {
    let path = args
        .positional
        .first()
        .ok_or_else(|| Error::Parse("simulate needs a circuit file".into()))?;
    let text = std::fs::read_to_string(path)?;
    let circuit = parse_text(&text)?;

    let rho: ComplexMatrix = match (args.flags.get("basis"), args.flags.get("state")) {
        (Some(k), None) => {
            let k: usize = k.parse().map_err(|_| Error::Parse("bad --basis".into()))?;
            let dim: usize = match args.flags.get("dim") {
                Some(s) => s.parse().map_err(|_| Error::Parse("bad --dim".into()))?,
                None => circuit.dimension(),
            };
            if k >= dim {
                return Err(Error::Parse(format!("basis index {k} out of range {dim}")));
            }
            let mut rho = ComplexMatrix::zeros(dim, dim);
            rho[(k, k)] = covneu::linalg::ONE;
            rho
        }
        (None, Some(state_path)) => {
            let json: MatrixJson = read_json(state_path)?;
            let m = json.to_matrix()?;
            if m.cols() == 1 {
                // A column state vector: form the pure density matrix.
                let v = m.col(0);
                ComplexMatrix::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
            } else {
                m
            }
        }
        _ => {
            return Err(Error::Parse(
                "simulate needs exactly one of --basis or --state".into(),
            ))
        }
    };
    let _ = tol;

    let shots: usize = match args.flags.get("shots") {
        Some(s) => s.parse().map_err(|_| Error::Parse("bad --shots".into()))?,
        None => 0,
    };
    if shots == 0 {
        let probs = circuit.outcome_probabilities(&rho)?;
        outln!("outcome probability");
        for (k, p) in probs.iter().enumerate() {
            outln!("{k} {p:.12}");
        }
    } else {
        let seed: u64 = match args.flags.get("seed") {
            Some(s) => s.parse().map_err(|_| Error::Parse("bad --seed".into()))?,
            None => covneu::DEFAULT_VERIFY_SEED,
        };
        let counts = circuit.sample(&rho, shots, seed)?;
        outln!("outcome count frequency");
        for (k, &c) in counts.iter().enumerate() {
            if c > 0 {
                outln!("{k} {c} {:.6}", c as f64 / shots as f64);
            }
        }
    }
    Ok(0)
}

fn cmd_verify(args: &Args, tol: &Tolerances) -> Result<u8, Error> {
    let path = args
        .positional
        .first()
        .ok_or_else(|| Error::Parse("verify needs a synthesis result file".into()))?;
    let json: SynthesisJson = read_json(path)?;
    let tilde_m = json.tilde_m.to_matrix()?;
    let povm = json.povm.build(tol)?;
    let stored = json.verification_report();
    let fresh = verify(&tilde_m, &povm, stored.trials, stored.seed, tol)?;
    outln!(
        "stored deviation {:.3e}, recomputed {:.3e}",
        stored.max_deviation,
        fresh.max_deviation
    );
    if (stored.max_deviation - fresh.max_deviation).abs() <= 1e-12 {
        outln!("PASS");
        Ok(0)
    } else {
        outln!("FAIL");
        Ok(2)
    }
}

fn cmd_families() -> Result<u8, Error> {
    outln!("cyclic           n outcomes on C^d, any n >= d (circuits need n = 2^k)");
    outln!("dihedral         2m outcomes on C^2, m = 2^k >= 4");
    outln!("weyl-heisenberg  m^2 outcomes on C^m, m = 2^k >= 4 (alias: wh)");
    Ok(0)
}

fn run() -> Result<u8, Error> {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let Some(command) = argv.first() else {
        eprint!("{USAGE}");
        return Ok(3);
    };
    let rest = &argv[1..];
    let tol = tolerances()?;
    match command.as_str() {
        "validate" => cmd_validate(&parse_args(rest, &[], &[])?, &tol),
        "synthesize" => cmd_synthesize(
            &parse_args(
                rest,
                &[
                    "group",
                    "family",
                    "out",
                    "dump-decomposition",
                    "trials",
                    "seed",
                    "decompose-seed",
                ],
                &["general"],
            )?,
            &tol,
        ),
        "circuit" => cmd_circuit(
            &parse_args(
                rest,
                &[
                    "family",
                    "from-synthesis",
                    "out",
                    "n",
                    "d",
                    "m",
                    "alpha",
                    "beta",
                ],
                &["qasm"],
            )?,
            &tol,
        ),
        "simulate" => cmd_simulate(
            &parse_args(rest, &["basis", "dim", "state", "shots", "seed"], &[])?,
            &tol,
        ),
        "verify" => cmd_verify(&parse_args(rest, &[], &[])?, &tol),
        "families" => cmd_families(),
        "help" | "--help" | "-h" => {
            print!("{USAGE}");
            Ok(0)
        }
        other => {
            eprintln!("unknown command '{other}'");
            eprint!("{USAGE}");
            Ok(3)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
