//! Projective symmetries become ordinary through a central extension: the
//! qubit clock/shift pair extends Z2 x Z2 to the order-8 group, and the
//! four-dimensional clock/shift pair extends Z4 x Z4 to order 64. The
//! synthesis routes projective inputs through this construction.
//!
//! Run with: cargo run --example central_extension

use covneu::families::{pauli_povm, sigma_x, sigma_z};
use covneu::groups::{central_extension, generate_group, ProjectiveRep};
use covneu::linalg::{clock, cyclic_shift, ComplexMatrix, ONE};
use covneu::synth::{synthesize_projective, Options};
use covneu::Tolerances;
use num_complex::Complex64;
use std::sync::Arc;

fn main() -> Result<(), covneu::Error> {
    let tol = Tolerances::default();

    // Z2 x Z2 with images I, σ_z, σ_x, σ_zσ_x.
    let a = ComplexMatrix::diagonal(&[ONE, -ONE]);
    let b = ComplexMatrix::diagonal(&[-ONE, ONE]);
    let labels = Arc::new(generate_group(&[a, b], 8, false, &tol)?);
    let images = vec![
        ComplexMatrix::identity(2),
        sigma_z(),
        sigma_x(),
        sigma_z().mul(&sigma_x()),
    ];
    let proj = ProjectiveRep::from_images(labels, images, &tol)?;
    let ext = central_extension(&proj, 64, &tol)?;
    println!(
        "qubit clock/shift: |G^| = {}, ordinary to {:.2e}",
        ext.group.order(),
        ext.rep.homomorphism_deviation()
    );

    // The POVM covariant under this projective action synthesizes through
    // the extension automatically.
    let alpha = Complex64::new(0.6 / 2.0f64.sqrt(), 0.0);
    let beta = Complex64::new(0.8 / 2.0f64.sqrt(), 0.0);
    let povm = pauli_povm(alpha, beta, &tol)?;
    let result = synthesize_projective(&povm, &proj, &Options::default(), &tol)?;
    println!(
        "synthesis through the extension verified to {:.2e}",
        result.verification.max_deviation
    );

    // Z4 x Z4 with images S^a T^b: the factor system closes into the fourth
    // roots of unity and the extension has 4^3 = 64 elements.
    let i = Complex64::new(0.0, 1.0);
    let a4 = ComplexMatrix::diagonal(&[ONE, i]);
    let b4 = ComplexMatrix::diagonal(&[i, ONE]);
    let labels4 = Arc::new(generate_group(&[a4, b4], 32, false, &tol)?);
    let s = cyclic_shift(4);
    let t = clock(4);
    let images4: Vec<ComplexMatrix> = (0..labels4.order())
        .map(|idx| {
            let mut acc = ComplexMatrix::identity(4);
            for &gi in labels4.word(idx) {
                acc = acc.mul(if gi == 0 { &s } else { &t });
            }
            acc
        })
        .collect();
    let proj4 = ProjectiveRep::from_images(Arc::clone(&labels4), images4, &tol)?;
    let ext4 = central_extension(&proj4, 64, &tol)?;
    println!(
        "4-dim clock/shift: |G^| = {}, ordinary to {:.2e}",
        ext4.group.order(),
        ext4.rep.homomorphism_deviation()
    );
    Ok(())
}
