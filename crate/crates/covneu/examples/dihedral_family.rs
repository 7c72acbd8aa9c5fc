//! The dihedral family: a two-parameter qubit POVM with 2m outcomes whose
//! measurement circuit is one two-level gate, a fan of CNOTs and a QFT.
//!
//! Run with: cargo run --example dihedral_family

use covneu::circuits::build_dihedral_circuit;
use covneu::families::{dihedral_group_rep, dihedral_povm, Family};
use covneu::povm::{derive_monomial, probabilities};
use covneu::rng::SeededRng;
use covneu::synth::{synthesize, Options};
use covneu::Tolerances;
use num_complex::Complex64;

fn main() -> Result<(), covneu::Error> {
    let tol = Tolerances::default();
    let m = 8usize;
    let alpha = Complex64::new((0.3 / m as f64).sqrt(), 0.0);
    let beta = Complex64::new(0.0, (0.7 / m as f64).sqrt());

    let (group, phi) = dihedral_group_rep(m, &tol)?;
    let povm = dihedral_povm(m, alpha, beta, &tol)?;
    println!(
        "dihedral group of order {}, POVM with {} outcomes on C^2",
        group.order(),
        povm.len()
    );

    // The symmetry acts on the columns monomially.
    let mon = derive_monomial(&phi, &povm, &tol)?;
    let r = group.generator_element(0).unwrap();
    println!("rotation permutes the columns as {:?}", mon.permutation(r));

    let options = Options {
        family: Some(Family::Dihedral { m }),
        ..Options::default()
    };
    let result = synthesize(&povm, &phi, &options, &tol)?;
    println!(
        "dense synthesis: probability preservation {:.2e}",
        result.verification.max_deviation
    );

    let circuit = build_dihedral_circuit(m, alpha, beta)?;
    println!(
        "circuit on {} qubits: {} gates (A†, {} CX, QFT)",
        circuit.num_qubits(),
        circuit.gates().len(),
        m.trailing_zeros()
    );

    // Circuit and dense synthesis measure the same POVM.
    let mut rng = SeededRng::new(1);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let rho = rng.test_state(2);
        let p_oracle = probabilities(&povm, &rho, &tol)?;
        let p_circuit = circuit.outcome_probabilities(&rho)?;
        for (a, b) in p_oracle.iter().zip(&p_circuit) {
            worst = worst.max((a - b).abs());
        }
    }
    println!("circuit vs oracle on 20 random states: max deviation {worst:.2e}");
    Ok(())
}
