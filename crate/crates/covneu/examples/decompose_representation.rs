//! Decomposing representations into irreducible blocks and inspecting
//! intertwining spaces: the block structure drives the whole synthesis.
//!
//! Run with: cargo run --example decompose_representation

use covneu::families::dihedral_group_rep;
use covneu::groups::regular_representation;
use covneu::intertwine::{intertwiner_basis, structure_check};
use covneu::repdec::{decompose, multiplicities_of};
use covneu::{Tolerances, DEFAULT_DECOMPOSE_SEED};

fn main() -> Result<(), covneu::Error> {
    let tol = Tolerances::default();

    // The regular representation of the order-16 dihedral group.
    let (group, _) = dihedral_group_rep(8, &tol)?;
    let reg = regular_representation(&group);
    let dec = decompose(&reg, DEFAULT_DECOMPOSE_SEED, &tol)?;
    println!(
        "regular representation of a group with {} elements:",
        group.order()
    );
    println!("  blocks (offset, degree, label):");
    for b in &dec.blocks {
        println!("    ({:>2}, {}, {})", b.offset, b.degree, b.label);
    }
    let mults = multiplicities_of(&dec, &reg)?;
    println!("  multiplicities by label: {mults:?}");
    println!("  (each irreducible appears as often as its degree)");

    // Intertwining space of the regular representation with itself: the
    // dimension is Σ m_i², the order of the group.
    let basis = intertwiner_basis(&reg, &reg, &tol)?;
    println!(
        "\nInt(regular, regular) has dimension {} = Σ multiplicity²",
        basis.dim()
    );
    let report = structure_check(&basis, &reg, &dec, &reg, &dec, 7, &tol)?;
    println!(
        "structure check: per-label coefficient sizes {:?}, worst deviation {:.2e}",
        report.per_label, report.max_deviation
    );
    Ok(())
}
