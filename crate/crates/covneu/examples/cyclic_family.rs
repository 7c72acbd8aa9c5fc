//! The cyclic family at n = 8, d = 3: the synthesized measurement transform
//! is exactly the inverse eight-point DFT, which lowers to the textbook
//! QFT† circuit on three qubits.
//!
//! Run with: cargo run --example cyclic_family

use covneu::circuits::{build_cyclic_circuit, write_text};
use covneu::families::{cyclic_group_rep, cyclic_povm, Family};
use covneu::linalg::fourier;
use covneu::synth::{synthesize, Options};
use covneu::Tolerances;

fn main() -> Result<(), covneu::Error> {
    let tol = Tolerances::default();
    let (n, d) = (8usize, 3usize);

    let povm = cyclic_povm(n, d)?;
    let (_, phi) = cyclic_group_rep(n, d, &tol)?;
    let options = Options {
        family: Some(Family::Cyclic { n, d }),
        ..Options::default()
    };
    let result = synthesize(&povm, &phi, &options, &tol)?;
    println!(
        "tilde-M† equals F8†: max deviation {:.2e}",
        result.tilde_m.adjoint().max_abs_diff(&fourier(n).adjoint())
    );

    let circuit = build_cyclic_circuit(n, d)?;
    println!(
        "QFT† circuit on {} qubits with {} gates, expansion deviation {:.2e}:\n",
        circuit.num_qubits(),
        circuit.gates().len(),
        circuit.expand()?.max_abs_diff(&fourier(n).adjoint())
    );
    print!("{}", write_text(&circuit)?);
    Ok(())
}
