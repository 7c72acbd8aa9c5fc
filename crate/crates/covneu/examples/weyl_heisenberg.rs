//! The Weyl-Heisenberg family: an approximate joint measurement of position
//! and crystal momentum on a cyclic chain of m sites. Outcome j·m + l says
//! "position shifted by j, momentum shifted by l".
//!
//! Run with: cargo run --example weyl_heisenberg

use covneu::circuits::{build_a_wh, build_wh_circuit, WhVector};
use covneu::families::{wh_group_rep, wh_povm, wh_symmetric_vector, Family};
use covneu::linalg::ComplexMatrix;
use covneu::povm::orbit_povm;
use covneu::synth::{synthesize, Options};
use covneu::Tolerances;
use num_complex::Complex64;

fn main() -> Result<(), covneu::Error> {
    let tol = Tolerances::default();
    let m = 4usize;
    let alpha = Complex64::new(0.5, 0.0);

    let (group, phi) = wh_group_rep(m, &tol)?;
    println!("Weyl-Heisenberg group of order {} on C^{m}", group.order());

    // The POVM is the orbit of a localized wave packet, identified modulo
    // global phase: m² = 16 operators.
    let v = wh_symmetric_vector(m, alpha)?;
    let orbit = orbit_povm(&phi, &v, true, &tol)?;
    println!(
        "orbit of the wave packet has {} operators",
        orbit.povm.len()
    );

    let povm = wh_povm(m, &v, &tol)?;
    let options = Options {
        family: Some(Family::WeylHeisenberg { m }),
        ..Options::default()
    };
    let result = synthesize(&povm, &phi, &options, &tol)?;
    println!(
        "dense synthesis verified to {:.2e}",
        result.verification.max_deviation
    );

    // Structured circuit: A† from B-gates and the index permutation, the
    // controlled clock powers, and two QFTs.
    let (a, a_circuit) = build_a_wh(alpha, m)?;
    println!(
        "structured A implements its first row to {:.2e}",
        a_circuit.expand()?.max_abs_diff(&a.adjoint())
    );
    let circuit = build_wh_circuit(m, &WhVector::AlphaProfile(alpha))?;
    println!(
        "full circuit on {} qubits, {} elementary gates",
        circuit.num_qubits(),
        circuit.elementary_gate_count()
    );

    // Measure the wave packet itself: outcomes concentrate at (j, l) = (0, 0).
    let unit: Vec<Complex64> = v
        .iter()
        .map(|z| z * Complex64::new((m as f64).sqrt(), 0.0))
        .collect();
    let rho = ComplexMatrix::from_fn(m, m, |i, j| unit[i] * unit[j].conj());
    let counts = circuit.sample(&rho, 100_000, 42)?;
    println!("\n100000 shots, outcomes (position shift j, momentum shift l):");
    for j in 0..m {
        let row: Vec<String> = (0..m)
            .map(|l| format!("{:>6}", counts[j * m + l]))
            .collect();
        println!("  j={j}: {}", row.join(" "));
    }
    println!("the (0, 0) cell dominates: the packet sits where it started");
    Ok(())
}
