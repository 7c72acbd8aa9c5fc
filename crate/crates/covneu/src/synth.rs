//! End-to-end synthesis: from a covariant POVM and its symmetry
//! representation to the measurement transform `tilde-M`, with the plain
//! (symmetry-ignoring) dilation as an oracle, qubit padding, and
//! verification of probability preservation on sampled states.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::families::Family;
use crate::groups::{central_extension, ProjectiveRep, Representation};
use crate::intertwine::{build_phi_prime, complete_intertwiner};
use crate::linalg::{complete_to_unitary, direct_sum, ComplexMatrix};
use crate::povm::{defining_matrix, derive_monomial, probabilities, RankOnePovm};
use crate::repdec;
use crate::rng::SeededRng;
use crate::{Tolerances, DEFAULT_DECOMPOSE_SEED, DEFAULT_VERIFY_SEED};

/// Knobs of the synthesis. All default choices are recorded in the result.
#[derive(Debug, Clone)]
pub struct Options {
    /// Use the closed-form base changes of a built-in family instead of the
    /// general numerical decomposition.
    pub family: Option<Family>,
    /// The free unitary mixing the added rows; identity when absent.
    pub v: Option<ComplexMatrix>,
    pub verify_trials: usize,
    pub verify_seed: u64,
    pub decompose_seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            family: None,
            v: None,
            verify_trials: 100,
            verify_seed: DEFAULT_VERIFY_SEED,
            decompose_seed: DEFAULT_DECOMPOSE_SEED,
        }
    }
}

/// Record of every free choice that went into a synthesis run.
#[derive(Debug, Clone)]
pub struct ChoicesRecord {
    pub family: Option<String>,
    pub v_is_identity: bool,
    pub completion: &'static str,
    pub column_order: &'static str,
    pub decompose_seed: u64,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub trials: usize,
    pub seed: u64,
    pub max_deviation: f64,
}

/// Output of the synthesis: the dilation unitary, the surplus
/// representation, the block permutation, the recorded choices, and the
/// probability-preservation report.
#[derive(Debug, Clone)]
pub struct SynthesisResult {
    pub tilde_m: ComplexMatrix,
    pub phi_prime: Representation,
    pub tau: Vec<usize>,
    pub choices: ChoicesRecord,
    pub verification: VerificationReport,
}

/// Plain dilation ignoring symmetry: complete the defining matrix to a
/// unitary with the deterministic orthonormal completion. Serves as the
/// non-symmetric oracle.
pub fn neumark_plain(m: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    complete_to_unitary(m, tol.povm.max(tol.unitary), tol.rank)
}

/// Embed an `n x n` unitary into the next power-of-two dimension as
/// `U ⊕ I`; returns the padded matrix and the qubit count.
pub fn pad_to_qubits(u: &ComplexMatrix) -> (ComplexMatrix, usize) {
    let n = u.rows();
    let mut q = 0usize;
    while (1usize << q) < n {
        q += 1;
    }
    let full = 1usize << q;
    if full == n {
        (u.clone(), q)
    } else {
        (direct_sum(u, &ComplexMatrix::identity(full - n)), q)
    }
}

/// Probability preservation check: draws seeded mixed test states and
/// compares the POVM distribution against the dilated measurement
/// `p̃_k = <Ψ̃_k| (ρ ⊕ 0) |Ψ̃_k>` with `Ψ̃_k` the columns of `tilde-M`.
pub fn verify(
    tilde_m: &ComplexMatrix,
    povm: &RankOnePovm,
    trials: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    let d = povm.dim();
    let n = povm.len();
    if tilde_m.rows() != n || tilde_m.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: tilde_m.rows(),
        });
    }
    let mut rng = SeededRng::new(seed);
    let mut max_deviation = 0.0f64;
    for _ in 0..trials {
        let rho = rng.test_state(d);
        let p = probabilities(povm, &rho, tol)?;
        let rho_padded = direct_sum(&rho, &ComplexMatrix::zeros(n - d, n - d));
        for (k, &pk) in p.iter().enumerate() {
            let col = tilde_m.col(k);
            let rv = rho_padded.mul_vec(&col);
            let ptilde: Complex64 = col.iter().zip(&rv).map(|(a, b)| a.conj() * b).sum();
            max_deviation = max_deviation.max((pk - ptilde.re).abs().max(ptilde.im.abs()));
        }
    }
    Ok(VerificationReport {
        trials,
        seed,
        max_deviation,
    })
}

/// Run the full symmetry-preserving synthesis.
///
/// Steps: derive the monomial representation on the POVM columns, decompose
/// both representations (closed family forms or the general path), build
/// the surplus representation φ', complete `C = U M W†` to a unitary in the
/// intertwining space, and assemble
/// `tilde-M = (U† ⊕ V†) tilde-C W`. The result satisfies
///
/// * `tilde-M` unitary with the defining matrix as its upper `d` rows, and
/// * `(φ ⊕ φ')(g) tilde-M = tilde-M φ_mon(g)` for every group element,
///
/// and is verified to preserve outcome probabilities on sampled states.
pub fn synthesize(
    povm: &RankOnePovm,
    phi: &Representation,
    options: &Options,
    tol: &Tolerances,
) -> Result<SynthesisResult> {
    let d = povm.dim();
    let n = povm.len();
    let m = defining_matrix(povm);
    let mon = derive_monomial(phi, povm, tol)?.to_representation();
    let seed = options.decompose_seed;

    let (dec_phi, dec_mon) = match options.family {
        Some(family) => {
            let fb = repdec::family_bases(family)?;
            if fb.u.rows() != d || fb.w.rows() != n {
                return Err(Error::UnsupportedParameter(format!(
                    "family {} expects a {}x{} problem, POVM has d={d}, n={n}",
                    family.name(),
                    fb.u.rows(),
                    fb.w.rows()
                )));
            }
            let dec_phi = repdec::from_base_change(phi, fb.u.clone(), &fb.left_degrees, seed, tol)?;
            let dec_mon =
                repdec::from_base_change(&mon, fb.w.clone(), &fb.right_degrees, seed, tol)?;
            (dec_phi, dec_mon)
        }
        None => {
            let dec_phi = repdec::decompose(phi, seed, tol)?;
            let dec_mon = repdec::decompose(&mon, seed, tol)?;
            (dec_phi, dec_mon)
        }
    };
    let dec_phi = repdec::align(&dec_phi, phi, &dec_mon, &mon, seed, tol)?;
    let pp = build_phi_prime(&dec_phi, &dec_mon, &mon)?;

    let c = dec_phi
        .base_change
        .mul(&m)
        .mul(&dec_mon.base_change.adjoint());
    let tilde_c = complete_intertwiner(&c, &pp.left_blocks, &dec_mon.blocks, tol)?;

    let v = match &options.v {
        Some(v) => {
            if v.rows() != n - d || v.cols() != n - d {
                return Err(Error::DimensionMismatch {
                    expected: n - d,
                    got: v.rows(),
                });
            }
            if crate::linalg::unitary_deviation(v)? > tol.unitary {
                return Err(Error::Numerical("V is not unitary".into()));
            }
            v.clone()
        }
        None => ComplexMatrix::identity(n - d),
    };
    let v_is_identity = options.v.is_none();

    let u_plus_v = direct_sum(&dec_phi.base_change.adjoint(), &v.adjoint());
    let mut tilde_m = u_plus_v.mul(&tilde_c).mul(&dec_mon.base_change);

    // φ' in the basis the symmetry equation sees: V† φ' V.
    let phi_prime = if v_is_identity {
        pp.rep.clone()
    } else {
        pp.rep.conjugated(&v.adjoint())
    };

    // Postconditions.
    let dev = crate::linalg::unitary_deviation(&tilde_m)?;
    if dev > tol.unitary.max(1e-8) {
        return Err(Error::Numerical(format!(
            "synthesized transform is not unitary (deviation {dev:.3e})"
        )));
    }
    let upper = tilde_m.block(0, 0, d, n);
    let upper_dev = upper.max_abs_diff(&m);
    if upper_dev > 1e-9 {
        return Err(Error::Numerical(format!(
            "upper rows deviate from the defining matrix by {upper_dev:.3e}"
        )));
    }
    // Snap the upper rows onto the defining matrix exactly.
    tilde_m.set_block(0, 0, &m);

    for g in 0..phi.group().order() {
        let lhs = direct_sum(phi.image(g), phi_prime.image(g)).mul(&tilde_m);
        let rhs = tilde_m.mul(mon.image(g));
        let dev = lhs.max_abs_diff(&rhs);
        if dev > tol.dec {
            return Err(Error::Numerical(format!(
                "symmetry equation fails at element {g} (deviation {dev:.3e})"
            )));
        }
    }

    let verification = verify(
        &tilde_m,
        povm,
        options.verify_trials,
        options.verify_seed,
        tol,
    )?;
    Ok(SynthesisResult {
        tilde_m,
        phi_prime,
        tau: pp.tau,
        choices: ChoicesRecord {
            family: options.family.map(|f| f.name().to_string()),
            v_is_identity,
            completion: "deterministic-orthonormal",
            column_order: "as-given",
            decompose_seed: seed,
        },
        verification,
    })
}

/// Synthesis entry for projective symmetry: routes through the central
/// extension first. The POVM operators are unchanged because the added
/// scalars act trivially under conjugation.
pub fn synthesize_projective(
    povm: &RankOnePovm,
    proj: &ProjectiveRep,
    options: &Options,
    tol: &Tolerances,
) -> Result<SynthesisResult> {
    let ext = central_extension(proj, 64, tol)?;
    synthesize(povm, &ext.rep, options, tol)
}
