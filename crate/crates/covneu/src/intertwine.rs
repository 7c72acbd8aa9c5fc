//! Intertwining spaces between representations: orthonormal bases via group
//! averaging, verification of their block-permuted structure, construction
//! of the surplus representation φ', and completion of the coefficient
//! matrix C to a unitary inside the intertwining space.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::groups::Representation;
use crate::linalg::{complete_to_unitary, hermitian_eigen, rank, ComplexMatrix, ZERO};
use crate::repdec::{self, Block, Decomposition};
use crate::Tolerances;

/// An orthonormal (Frobenius) basis of `Int(φ, ψ) = {M : φ(g)M = Mψ(g)}`.
#[derive(Debug, Clone)]
pub struct IntertwinerBasis {
    pub left_degree: usize,
    pub right_degree: usize,
    pub basis: Vec<ComplexMatrix>,
}

impl IntertwinerBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Compute an orthonormal basis of the intertwining space by averaging all
/// matrix-unit seeds over the group. The averaging map is an orthogonal
/// projector on matrix space; the basis is read off its unit eigenvectors.
pub fn intertwiner_basis(
    phi: &Representation,
    psi: &Representation,
    tol: &Tolerances,
) -> Result<IntertwinerBasis> {
    if phi.group().order() != psi.group().order() {
        return Err(Error::DimensionMismatch {
            expected: phi.group().order(),
            got: psi.group().order(),
        });
    }
    let dl = phi.degree();
    let dr = psi.degree();
    let dim = dl * dr;
    let order = phi.group().order();
    // K[(a,b),(i,j)] = (1/|G|) Σ_g φ(g)_{ai} conj(ψ(g)_{bj}), acting on
    // vec(X) with X index (i, j) -> i*dr + j.
    let mut k = ComplexMatrix::zeros(dim, dim);
    for g in 0..order {
        let f = phi.image(g);
        let s = psi.image(g);
        for a in 0..dl {
            for i in 0..dl {
                let fai = f[(a, i)];
                if fai == ZERO {
                    continue;
                }
                for b in 0..dr {
                    for j in 0..dr {
                        k[(a * dr + b, i * dr + j)] += fai * s[(b, j)].conj();
                    }
                }
            }
        }
    }
    k = k.scale(Complex64::new(1.0 / order as f64, 0.0));
    let (vals, vecs) = hermitian_eigen(&k)?;
    let mut basis = Vec::new();
    for (idx, &lambda) in vals.iter().enumerate() {
        if lambda > 0.5 {
            if (lambda - 1.0).abs() > 1e-6 {
                return Err(Error::Numerical(format!(
                    "averaging projector has eigenvalue {lambda:.6}, expected 0 or 1"
                )));
            }
            let m = ComplexMatrix::from_fn(dl, dr, |i, j| vecs[(i * dr + j, idx)]);
            basis.push(m);
        }
    }
    // Sanity: every basis element intertwines.
    for m in &basis {
        for g in 0..order {
            let dev = phi.image(g).mul(m).max_abs_diff(&m.mul(psi.image(g)));
            if dev > tol.dec {
                return Err(Error::Numerical(format!(
                    "projected basis element fails to intertwine (deviation {dev:.3e})"
                )));
            }
        }
    }
    Ok(IntertwinerBasis {
        left_degree: dl,
        right_degree: dr,
        basis,
    })
}

/// Per-irrep findings of a structure check: multiplicities on both sides and
/// the worst deviation from the block-permuted `λ ⊗ I` form.
#[derive(Debug, Clone)]
pub struct StructureReport {
    /// label -> (multiplicity in the left rep, multiplicity in the right rep)
    pub per_label: BTreeMap<usize, (usize, usize)>,
    pub dim: usize,
    pub max_deviation: f64,
}

/// Verify that every basis element, conjugated by the two base changes, is
/// block permuted with one coefficient block `C^{m_i x n_i} ⊗ I_deg` per
/// irreducible class, and that the dimension matches `Σ m_i n_i`.
pub fn structure_check(
    basis: &IntertwinerBasis,
    phi: &Representation,
    dec_phi: &Decomposition,
    psi: &Representation,
    dec_psi: &Decomposition,
    seed: u64,
    tol: &Tolerances,
) -> Result<StructureReport> {
    // Express the left blocks in the right decomposition's label space so
    // equal labels mean entrywise-equal images.
    let dec_phi = repdec::align(dec_phi, phi, dec_psi, psi, seed, tol)?;

    let mut per_label: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for b in &dec_phi.blocks {
        per_label.entry(b.label).or_insert((0, 0)).0 += 1;
    }
    for b in &dec_psi.blocks {
        per_label.entry(b.label).or_insert((0, 0)).1 += 1;
    }
    let expected_dim: usize = per_label.values().map(|&(m, n)| m * n).sum();
    if expected_dim != basis.dim() {
        return Err(Error::StructureViolation {
            deviation: (expected_dim as f64 - basis.dim() as f64).abs(),
        });
    }

    let mut max_deviation = 0.0f64;
    for t in &basis.basis {
        let conj = dec_phi
            .base_change
            .mul(t)
            .mul(&dec_psi.base_change.adjoint());
        for bl in &dec_phi.blocks {
            for br in &dec_psi.blocks {
                let sub = conj.block(bl.offset, br.offset, bl.degree, br.degree);
                if bl.label != br.label {
                    let dev = sub.max_abs(); // must vanish (Schur)
                    max_deviation = max_deviation.max(dev);
                    if dev > tol.dec {
                        return Err(Error::StructureViolation { deviation: dev });
                    }
                } else {
                    let lambda = sub.trace() / Complex64::new(bl.degree as f64, 0.0);
                    let dev = sub.max_abs_diff(&ComplexMatrix::identity(bl.degree).scale(lambda));
                    max_deviation = max_deviation.max(dev);
                    if dev > tol.dec {
                        return Err(Error::StructureViolation { deviation: dev });
                    }
                }
            }
        }
    }
    Ok(StructureReport {
        per_label,
        dim: basis.dim(),
        max_deviation,
    })
}

/// The surplus representation φ' and the block permutation τ produced by
/// comparing a decomposed φ with a decomposed φ_mon.
#[derive(Debug, Clone)]
pub struct PhiPrime {
    /// Direct sum of the surplus blocks of `W φ_mon W†`, images equal (not
    /// merely equivalent) to the corresponding canonical blocks.
    pub rep: Representation,
    /// Maps positions in the block list of `(UφU†) ⊕ φ'` to block positions
    /// of `W φ_mon W†`.
    pub tau: Vec<usize>,
    /// The blocks of `(UφU†) ⊕ φ'` with offsets in `0..n`: first the blocks
    /// of φ, then the surplus blocks in right-hand order.
    pub left_blocks: Vec<Block>,
}

/// Construct φ' such that `(UφU†) ⊕ φ'` equals `W φ_mon W†` up to the block
/// permutation τ. Requires the two decompositions to share labels (run
/// [`repdec::align`] on the φ side first). Fails with `NotAConstituent` when
/// some irreducible of φ occurs more often than in φ_mon.
pub fn build_phi_prime(
    dec_phi: &Decomposition,
    dec_mon: &Decomposition,
    mon: &Representation,
) -> Result<PhiPrime> {
    let d = dec_phi.degree();
    let n = dec_mon.degree();

    let mut left_counts: BTreeMap<usize, usize> = BTreeMap::new();
    for b in &dec_phi.blocks {
        *left_counts.entry(b.label).or_insert(0) += 1;
    }
    let mut right_counts: BTreeMap<usize, usize> = BTreeMap::new();
    for b in &dec_mon.blocks {
        *right_counts.entry(b.label).or_insert(0) += 1;
    }
    for (&label, &m_i) in &left_counts {
        let n_i = right_counts.get(&label).copied().unwrap_or(0);
        if m_i > n_i {
            return Err(Error::NotAConstituent {
                label,
                left: m_i,
                right: n_i,
            });
        }
    }

    // Surplus right-hand blocks: for each label, every copy beyond the
    // multiplicity in φ, in right-hand order.
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    let mut surplus: Vec<Block> = Vec::new();
    let mut tau_first: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut surplus_positions: Vec<usize> = Vec::new();
    for (pos, b) in dec_mon.blocks.iter().enumerate() {
        let count = seen.entry(b.label).or_insert(0);
        let m_i = left_counts.get(&b.label).copied().unwrap_or(0);
        if *count < m_i {
            tau_first.entry(b.label).or_default().push(pos);
        } else {
            surplus.push(*b);
            surplus_positions.push(pos);
        }
        *count += 1;
    }

    // τ: φ blocks take the first right-hand copies of their label in order;
    // surplus blocks map to their own positions.
    let mut taken: BTreeMap<usize, usize> = BTreeMap::new();
    let mut tau = Vec::with_capacity(dec_mon.blocks.len());
    for b in &dec_phi.blocks {
        let idx = taken.entry(b.label).or_insert(0);
        tau.push(tau_first[&b.label][*idx]);
        *idx += 1;
    }
    tau.extend(&surplus_positions);

    // φ' images: direct sum of the surplus canonical images.
    let order = mon.group().order();
    let surplus_degree: usize = surplus.iter().map(|b| b.degree).sum();
    debug_assert_eq!(surplus_degree, n - d);
    let mut images = Vec::with_capacity(order);
    for g in 0..order {
        let mut img = ComplexMatrix::zeros(surplus_degree, surplus_degree);
        let mut off = 0;
        for b in &surplus {
            let block_img = dec_mon.block_image(mon, b, g);
            img.set_block(off, off, &block_img);
            off += b.degree;
        }
        images.push(img);
    }
    let rep = Representation::new(std::sync::Arc::clone(mon.group()), images)?;

    // Blocks of (UφU†) ⊕ φ' with running offsets.
    let mut left_blocks = dec_phi.blocks.clone();
    let mut off = d;
    for b in &surplus {
        left_blocks.push(Block {
            offset: off,
            degree: b.degree,
            label: b.label,
        });
        off += b.degree;
    }
    Ok(PhiPrime {
        rep,
        tau,
        left_blocks,
    })
}

/// Complete the coefficient matrix `C = U M W†` (upper `d` rows of the
/// sought intertwiner) to an `n x n` unitary inside the intertwining space.
///
/// Per irreducible class the rows contributed by `C` form a coefficient
/// block with orthonormal rows; that block is completed to a unitary with
/// the deterministic orthonormal completion and re-tensored with the
/// identity of the block degree.
pub fn complete_intertwiner(
    c: &ComplexMatrix,
    left_blocks: &[Block],
    right_blocks: &[Block],
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    let d = c.rows();
    let n = c.cols();
    if left_blocks.iter().map(|b| b.degree).sum::<usize>() != n
        || right_blocks.iter().map(|b| b.degree).sum::<usize>() != n
    {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: left_blocks.iter().map(|b| b.degree).sum(),
        });
    }

    let labels: Vec<usize> = {
        let mut ls: Vec<usize> = left_blocks.iter().map(|b| b.label).collect();
        ls.sort_unstable();
        ls.dedup();
        ls
    };

    // Cross-label sub-blocks of C must vanish.
    for bl in left_blocks.iter().filter(|b| b.offset < d) {
        for br in right_blocks {
            if bl.label != br.label {
                let sub = c.block(bl.offset, br.offset, bl.degree, br.degree);
                let dev = sub.max_abs();
                if dev > tol.dec {
                    return Err(Error::NotInIntertwiningSpace { deviation: dev });
                }
            }
        }
    }

    let mut tilde_c = ComplexMatrix::zeros(n, n);
    for &label in &labels {
        let rows: Vec<&Block> = left_blocks.iter().filter(|b| b.label == label).collect();
        let cols: Vec<&Block> = right_blocks.iter().filter(|b| b.label == label).collect();
        let deg = rows[0].degree;
        let n_i = cols.len();
        let m_i = rows.iter().filter(|b| b.offset < d).count();
        // The C rows of this label must be its first copies in left order.
        for (a, b) in rows.iter().enumerate() {
            if (a < m_i) != (b.offset < d) {
                return Err(Error::Numerical(
                    "left block order mixes φ and surplus copies".into(),
                ));
            }
        }

        // Extract the m_i x n_i coefficient block from C.
        let mut coeff = ComplexMatrix::zeros(m_i, n_i);
        for (a, bl) in rows.iter().take(m_i).enumerate() {
            for (b, br) in cols.iter().enumerate() {
                let sub = c.block(bl.offset, br.offset, deg, deg);
                let lambda = sub.trace() / Complex64::new(deg as f64, 0.0);
                let dev = sub.max_abs_diff(&ComplexMatrix::identity(deg).scale(lambda));
                if dev > tol.dec {
                    return Err(Error::NotInIntertwiningSpace { deviation: dev });
                }
                coeff[(a, b)] = lambda;
            }
        }
        let unitary = complete_to_unitary(&coeff, tol.unitary, tol.rank)?;
        for (a, bl) in rows.iter().enumerate() {
            for (b, br) in cols.iter().enumerate() {
                let lambda = unitary[(a, b)];
                if lambda == ZERO {
                    continue;
                }
                for t in 0..deg {
                    tilde_c[(bl.offset + t, br.offset + t)] = lambda;
                }
            }
        }
    }

    let dev = crate::linalg::unitary_deviation(&tilde_c)?;
    if dev > tol.unitary.max(1e-8) {
        return Err(Error::Numerical(format!(
            "completed intertwiner is not unitary (deviation {dev:.3e})"
        )));
    }
    let upper = tilde_c.block(0, 0, d, n);
    let dev = upper.max_abs_diff(c);
    if dev > tol.dec {
        return Err(Error::NotInIntertwiningSpace { deviation: dev });
    }
    Ok(tilde_c)
}

/// Check the constituent criterion: if `ψ1(g) M = M ψ2(g)` for all g and
/// `rank(M) = deg(ψ1)`, then ψ1 is a constituent of ψ2, i.e. every
/// multiplicity on the left is bounded by the right.
pub fn constituent_check(
    psi1: &Representation,
    psi2: &Representation,
    m: &ComplexMatrix,
    seed: u64,
    tol: &Tolerances,
) -> Result<bool> {
    if m.rows() != psi1.degree() || m.cols() != psi2.degree() {
        return Err(Error::DimensionMismatch {
            expected: psi1.degree(),
            got: m.rows(),
        });
    }
    for g in 0..psi1.group().order() {
        let dev = psi1.image(g).mul(m).max_abs_diff(&m.mul(psi2.image(g)));
        if dev > tol.dec {
            return Err(Error::HypothesisViolated {
                reason: format!("intertwining relation fails at element {g} by {dev:.3e}"),
            });
        }
    }
    let r = rank(m, tol.rank)?;
    if r != psi1.degree() {
        return Err(Error::HypothesisViolated {
            reason: format!("rank(M) = {r}, expected full rank {}", psi1.degree()),
        });
    }
    let dec2 = repdec::decompose(psi2, seed, tol)?;
    let dec1 = repdec::decompose(psi1, seed, tol)?;
    let dec1 = repdec::align(&dec1, psi1, &dec2, psi2, seed, tol)?;
    let m1 = dec1.multiplicity_map();
    let m2 = dec2.multiplicity_map();
    for (&label, &count) in &m1 {
        let bound = m2.get(&label).copied().unwrap_or(0);
        if count > bound {
            return Err(Error::Numerical(format!(
                "constituent conclusion violated numerically: label {label} has {count} > {bound}"
            )));
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{cyclic_group_rep, cyclic_povm, pauli_qubit_example};
    use crate::linalg::{is_unitary, root_of_unity, ONE};
    use crate::povm::{defining_matrix, derive_monomial};
    use crate::{Tolerances, DEFAULT_DECOMPOSE_SEED};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn seed() -> u64 {
        DEFAULT_DECOMPOSE_SEED
    }

    #[test]
    fn schur_dimension_counts() {
        // Int(φ, φ) of an irreducible rep is spanned by multiples of I.
        let (_, phi, _) = pauli_qubit_example(0.35, &tol()).unwrap();
        let basis = intertwiner_basis(&phi, &phi, &tol()).unwrap();
        assert_eq!(basis.dim(), 1);
        let b = &basis.basis[0];
        let lambda = b.trace() / Complex64::new(2.0, 0.0);
        assert!(b.approx_eq(&ComplexMatrix::identity(2).scale(lambda), 1e-9));
    }

    #[test]
    fn intertwiner_of_phi_with_two_copies_has_dimension_two() {
        let (_, phi, _) = pauli_qubit_example(0.35, &tol()).unwrap();
        let double = phi.direct_sum(&phi);
        let basis = intertwiner_basis(&phi, &double, &tol()).unwrap();
        assert_eq!(basis.dim(), 2);
        // Frobenius-orthonormal.
        for (i, a) in basis.basis.iter().enumerate() {
            for (j, b) in basis.basis.iter().enumerate() {
                let ip = a.frobenius_inner(b);
                let want = if i == j { ONE } else { ZERO };
                assert!((ip - want).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn inequivalent_irreducibles_have_zero_intertwiner() {
        // Two inequivalent characters of Z_4.
        let (group, _) = cyclic_group_rep(4, 2, &tol()).unwrap();
        let chi1: Vec<ComplexMatrix> = (0..4)
            .map(|g| {
                let k = group.word(g).len();
                ComplexMatrix::diagonal(&[root_of_unity(4, k % 4)])
            })
            .collect();
        let chi2: Vec<ComplexMatrix> = (0..4)
            .map(|g| {
                let k = group.word(g).len();
                ComplexMatrix::diagonal(&[root_of_unity(4, 2 * k % 4)])
            })
            .collect();
        let rep1 = Representation::new(std::sync::Arc::clone(&group), chi1).unwrap();
        let rep2 = Representation::new(std::sync::Arc::clone(&group), chi2).unwrap();
        assert!(rep1.is_homomorphism(1e-12));
        let basis = intertwiner_basis(&rep1, &rep2, &tol()).unwrap();
        assert_eq!(basis.dim(), 0);
    }

    #[test]
    fn structure_of_the_two_copy_intertwiner() {
        let (_, phi, _) = pauli_qubit_example(0.35, &tol()).unwrap();
        let double = phi.direct_sum(&phi);
        let basis = intertwiner_basis(&phi, &double, &tol()).unwrap();
        let dec_l = repdec::decompose(&phi, seed(), &tol()).unwrap();
        let dec_r = repdec::decompose(&double, seed(), &tol()).unwrap();
        let report =
            structure_check(&basis, &phi, &dec_l, &double, &dec_r, seed(), &tol()).unwrap();
        assert_eq!(report.dim, 2);
        let sizes: Vec<(usize, usize)> = report.per_label.values().copied().collect();
        assert_eq!(sizes, vec![(1, 2)]);
    }

    #[test]
    fn cyclic_intertwiner_is_diagonal_in_the_fourier_basis() {
        // The completed intertwining space for the cyclic family is the full
        // diagonal: dimension n, every element diagonal.
        let n = 4;
        let (_, phi) = cyclic_group_rep(n, 2, &tol()).unwrap();
        let povm = cyclic_povm(n, 2).unwrap();
        let mon = derive_monomial(&phi, &povm, &tol())
            .unwrap()
            .to_representation();
        let f = crate::linalg::fourier(n);
        let decomposed_mon = mon.conjugated(&f);
        let basis = intertwiner_basis(&decomposed_mon, &decomposed_mon, &tol()).unwrap();
        assert_eq!(basis.dim(), n);
        for b in &basis.basis {
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        assert!(b[(i, j)].norm() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn phi_prime_for_the_cyclic_family_is_the_tail_of_the_spectrum() {
        let (group, phi) = cyclic_group_rep(8, 3, &tol()).unwrap();
        let povm = cyclic_povm(8, 3).unwrap();
        let mon = derive_monomial(&phi, &povm, &tol())
            .unwrap()
            .to_representation();
        let fb = repdec::family_bases(crate::families::Family::Cyclic { n: 8, d: 3 }).unwrap();
        let dec_mon =
            repdec::from_base_change(&mon, fb.w.clone(), &fb.right_degrees, seed(), &tol())
                .unwrap();
        let dec_phi =
            repdec::from_base_change(&phi, fb.u.clone(), &fb.left_degrees, seed(), &tol()).unwrap();
        let dec_phi = repdec::align(&dec_phi, &phi, &dec_mon, &mon, seed(), &tol()).unwrap();
        let pp = build_phi_prime(&dec_phi, &dec_mon, &mon).unwrap();
        assert_eq!(pp.rep.degree(), 5);
        // φ'(1) = diag(ω^3, ..., ω^7).
        let g1 = group.generator_element(0).unwrap();
        let img = pp.rep.image(g1);
        for (t, e) in (3..8).enumerate() {
            assert!((img[(t, t)] - root_of_unity(8, e)).norm() < 1e-9);
        }
        // τ is the identity: blocks line up in order.
        assert_eq!(pp.tau, (0..8).collect::<Vec<_>>());
        assert!(pp.rep.is_homomorphism(1e-9));
    }

    #[test]
    fn phi_prime_for_wh_is_m_minus_one_copies_of_the_natural_rep() {
        let m = 4;
        let (_, phi) = crate::families::wh_group_rep(m, &tol()).unwrap();
        let v = crate::families::wh_symmetric_vector(m, Complex64::new(0.5, 0.1)).unwrap();
        let povm = crate::families::wh_povm(m, &v, &tol()).unwrap();
        let mon = derive_monomial(&phi, &povm, &tol())
            .unwrap()
            .to_representation();
        let fb = repdec::family_bases(crate::families::Family::WeylHeisenberg { m }).unwrap();
        let dec_mon =
            repdec::from_base_change(&mon, fb.w.clone(), &fb.right_degrees, seed(), &tol())
                .unwrap();
        let dec_phi =
            repdec::from_base_change(&phi, fb.u.clone(), &fb.left_degrees, seed(), &tol()).unwrap();
        let dec_phi = repdec::align(&dec_phi, &phi, &dec_mon, &mon, seed(), &tol()).unwrap();
        let pp = build_phi_prime(&dec_phi, &dec_mon, &mon).unwrap();
        assert_eq!(pp.rep.degree(), (m - 1) * m);
        for g in 0..phi.group().order() {
            let want = crate::linalg::kron(&ComplexMatrix::identity(m - 1), phi.image(g));
            assert!(pp.rep.image(g).approx_eq(&want, 1e-9));
        }
    }

    #[test]
    fn orthogonal_measurement_has_empty_phi_prime_and_identity_tau() {
        // n = d: the POVM is already an orthogonal measurement.
        let n = 4;
        let (_, phi) = cyclic_group_rep(n, n, &tol()).unwrap();
        let povm = cyclic_povm(n, n).unwrap();
        let mon = derive_monomial(&phi, &povm, &tol())
            .unwrap()
            .to_representation();
        let fb = repdec::family_bases(crate::families::Family::Cyclic { n, d: n }).unwrap();
        let dec_mon =
            repdec::from_base_change(&mon, fb.w.clone(), &fb.right_degrees, seed(), &tol())
                .unwrap();
        let dec_phi =
            repdec::from_base_change(&phi, fb.u.clone(), &fb.left_degrees, seed(), &tol()).unwrap();
        let dec_phi = repdec::align(&dec_phi, &phi, &dec_mon, &mon, seed(), &tol()).unwrap();
        let pp = build_phi_prime(&dec_phi, &dec_mon, &mon).unwrap();
        assert_eq!(pp.rep.degree(), 0);
        assert_eq!(pp.tau, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn not_a_constituent_is_flagged() {
        // φ ⊕ φ cannot be a constituent of φ (multiplicity 2 > 1).
        let (_, phi, _) = pauli_qubit_example(0.35, &tol()).unwrap();
        let double = phi.direct_sum(&phi);
        let dec_small = repdec::decompose(&phi, seed(), &tol()).unwrap();
        let dec_big = repdec::decompose(&double, seed(), &tol()).unwrap();
        let dec_big_aligned =
            repdec::align(&dec_big, &double, &dec_small, &phi, seed(), &tol()).unwrap();
        let err = build_phi_prime(&dec_big_aligned, &dec_small, &phi).unwrap_err();
        assert!(matches!(err, Error::NotAConstituent { .. }));
    }

    #[test]
    fn a_lying_block_table_is_a_structure_violation() {
        // Relabeling the two equivalent blocks as inequivalent makes the
        // Schur count disagree with the basis dimension.
        let (_, phi, _) = pauli_qubit_example(0.35, &tol()).unwrap();
        let double = phi.direct_sum(&phi);
        let basis = intertwiner_basis(&phi, &double, &tol()).unwrap();
        let dec_l = repdec::decompose(&phi, seed(), &tol()).unwrap();
        let mut dec_r = repdec::decompose(&double, seed(), &tol()).unwrap();
        dec_r.blocks[1].label = dec_r.blocks[0].label + 1;
        let err =
            structure_check(&basis, &phi, &dec_l, &double, &dec_r, seed(), &tol()).unwrap_err();
        assert!(matches!(err, Error::StructureViolation { .. }));
    }

    #[test]
    fn completion_of_the_two_level_coefficient_block() {
        // C = sqrt(2) (α β) ⊗ I2 inside Int(φ⊕φ, φ⊕φ); the completed second
        // coefficient row must span (conj β, -conj α).
        let alpha = Complex64::new(0.6 / 2.0f64.sqrt(), 0.0);
        let beta = Complex64::new(0.8 / 2.0f64.sqrt(), 0.0);
        let s2 = Complex64::new(2.0f64.sqrt(), 0.0);
        let row = [alpha * s2, beta * s2];
        let mut c = ComplexMatrix::zeros(2, 4);
        for t in 0..2 {
            c[(t, t)] = row[0];
            c[(t, 2 + t)] = row[1];
        }
        let left = vec![
            Block {
                offset: 0,
                degree: 2,
                label: 0,
            },
            Block {
                offset: 2,
                degree: 2,
                label: 0,
            },
        ];
        let right = left.clone();
        let tilde_c = complete_intertwiner(&c, &left, &right, &tol()).unwrap();
        assert!(is_unitary(&tilde_c, 1e-9).unwrap());
        assert!(tilde_c.block(0, 0, 2, 4).approx_eq(&c, 1e-12));
        // Second coefficient row spans (conj β, -conj α).
        let r2 = [tilde_c[(2, 0)], tilde_c[(2, 2)]];
        let target = [beta.conj() * s2, -alpha.conj() * s2];
        let ip = r2[0].conj() * target[0] + r2[1].conj() * target[1];
        let nr: f64 = r2.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let nt: f64 = target.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((ip.norm() - nr * nt).abs() < 1e-9);
    }

    #[test]
    fn completion_rejects_nonorthonormal_and_off_space_inputs() {
        let left = vec![
            Block {
                offset: 0,
                degree: 1,
                label: 0,
            },
            Block {
                offset: 1,
                degree: 1,
                label: 1,
            },
        ];
        let right = left.clone();
        // Row of norm != 1.
        let mut c = ComplexMatrix::zeros(1, 2);
        c[(0, 0)] = Complex64::new(0.5, 0.0);
        assert!(matches!(
            complete_intertwiner(&c, &left, &right, &tol()),
            Err(Error::RowsNotOrthonormal { .. })
        ));
        // Nonzero entry in a cross-label block.
        let mut c = ComplexMatrix::zeros(1, 2);
        c[(0, 0)] = Complex64::new(1.0, 0.0);
        c[(0, 1)] = Complex64::new(0.3, 0.0);
        assert!(matches!(
            complete_intertwiner(&c, &left, &right, &tol()),
            Err(Error::NotInIntertwiningSpace { .. })
        ));
    }

    #[test]
    fn constituent_check_on_the_defining_matrix() {
        let (_, phi, povm) = pauli_qubit_example(0.35, &tol()).unwrap();
        let mon = derive_monomial(&phi, &povm, &tol())
            .unwrap()
            .to_representation();
        let m = defining_matrix(&povm);
        assert!(constituent_check(&phi, &mon, &m, seed(), &tol()).unwrap());
    }

    #[test]
    fn constituent_check_identity_case() {
        let (_, phi, _) = pauli_qubit_example(0.35, &tol()).unwrap();
        let id = ComplexMatrix::identity(2);
        assert!(constituent_check(&phi, &phi, &id, seed(), &tol()).unwrap());
    }

    #[test]
    fn rank_deficient_intertwiner_violates_the_hypothesis() {
        let (_, phi, _) = pauli_qubit_example(0.35, &tol()).unwrap();
        let double = phi.direct_sum(&phi);
        let zero = ComplexMatrix::zeros(2, 4);
        assert!(matches!(
            constituent_check(&phi, &double, &zero, seed(), &tol()),
            Err(Error::HypothesisViolated { .. })
        ));
        // A non-intertwining matrix also violates the hypothesis: [I | A]
        // intertwines only when A commutes with every image.
        let mut skew = ComplexMatrix::zeros(2, 4);
        skew[(0, 0)] = ONE;
        skew[(1, 1)] = ONE;
        skew[(0, 2)] = Complex64::new(0.5, 0.0);
        assert!(matches!(
            constituent_check(&phi, &double, &skew, seed(), &tol()),
            Err(Error::HypothesisViolated { .. })
        ));
    }

    #[test]
    fn random_full_rank_intertwiner_passes_the_constituent_check() {
        let (_, phi, _) = pauli_qubit_example(0.35, &tol()).unwrap();
        let double = phi.direct_sum(&phi);
        let basis = intertwiner_basis(&phi, &double, &tol()).unwrap();
        let m = basis.basis[0]
            .scale(Complex64::new(0.8, 0.1))
            .add(&basis.basis[1].scale(Complex64::new(-0.2, 0.5)));
        assert_eq!(rank(&m, tol().rank).unwrap(), 2);
        assert!(constituent_check(&phi, &double, &m, seed(), &tol()).unwrap());
    }
}
