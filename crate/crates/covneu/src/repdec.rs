//! Decomposition of representations into irreducible blocks with equivalent
//! blocks made entrywise equal, multiplicity counting, and the closed-form
//! base changes for the three built-in families.
//!
//! The general method averages a seeded random Hermitian matrix over the
//! group to land in the commutant, splits the space along its eigenvalue
//! clusters, and recurses until every block is irreducible. Equivalent
//! blocks are then conjugated onto the first-encountered representative so
//! tests and downstream block bookkeeping are deterministic.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::families::{self, Family};
use crate::groups::Representation;
use crate::linalg::{
    self, direct_sum_all, fourier, hermitian_eigen, kron, permutation_matrix, ComplexMatrix, C64,
};
use crate::rng::SeededRng;
use crate::Tolerances;

pub const MAX_RETRIES: usize = 8;

/// One irreducible block of a decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub offset: usize,
    pub degree: usize,
    /// Equivalence class; blocks with equal label have entrywise-equal
    /// images.
    pub label: usize,
}

/// A base change together with the block layout it produces.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub base_change: ComplexMatrix,
    pub blocks: Vec<Block>,
    pub images_checked: bool,
}

impl Decomposition {
    pub fn degree(&self) -> usize {
        self.base_change.rows()
    }

    /// `U ρ(g) U†`.
    pub fn conjugated_image(&self, rep: &Representation, g: usize) -> ComplexMatrix {
        rep.image(g).conjugated_by(&self.base_change)
    }

    /// The image of one block for one group element.
    pub fn block_image(&self, rep: &Representation, block: &Block, g: usize) -> ComplexMatrix {
        let rows = self
            .base_change
            .block(block.offset, 0, block.degree, self.degree());
        rep.image(g).conjugated_by(&rows)
    }

    /// Index of the first (canonical) block carrying `label`.
    pub fn canonical_block(&self, label: usize) -> Option<&Block> {
        self.blocks.iter().find(|b| b.label == label)
    }

    /// Images of the canonical block of `label` for every group element.
    pub fn canonical_images(&self, rep: &Representation, label: usize) -> Vec<ComplexMatrix> {
        let block = self.canonical_block(label).expect("label exists");
        (0..rep.group().order())
            .map(|g| self.block_image(rep, block, g))
            .collect()
    }

    /// Number of blocks carrying each label.
    pub fn multiplicity_map(&self) -> BTreeMap<usize, usize> {
        let mut map = BTreeMap::new();
        for b in &self.blocks {
            *map.entry(b.label).or_insert(0) += 1;
        }
        map
    }

    /// Character of the canonical block of `label`.
    pub fn block_character(&self, rep: &Representation, label: usize) -> Vec<C64> {
        self.canonical_images(rep, label)
            .iter()
            .map(|m| m.trace())
            .collect()
    }
}

fn average_conjugation(rep: &Representation, x: &ComplexMatrix) -> ComplexMatrix {
    let d = rep.degree();
    let mut acc = ComplexMatrix::zeros(d, d);
    for g in 0..rep.group().order() {
        acc = acc.add(&x.conjugated_by(rep.image(g)));
    }
    acc.scale(Complex64::new(1.0 / rep.group().order() as f64, 0.0))
}

/// Split eigenvalues into clusters separated by a relative gap.
fn cluster_ranges(vals: &[f64], rel_gap: f64) -> Vec<(usize, usize)> {
    let n = vals.len();
    if n == 0 {
        return vec![];
    }
    let spread = vals[n - 1] - vals[0];
    if spread <= 1e-10 * vals.iter().fold(1.0f64, |a, &b| a.max(b.abs())) {
        return vec![(0, n)];
    }
    let mut ranges = Vec::new();
    let mut start = 0;
    for i in 0..n - 1 {
        if vals[i + 1] - vals[i] > rel_gap * spread {
            ranges.push((start, i + 1));
            start = i + 1;
        }
    }
    ranges.push((start, n));
    ranges
}

/// Recursive invariant-subspace splitting. Returns a unitary `U` and block
/// degrees such that `U ρ U†` is block diagonal with irreducible blocks.
fn split_recursive(
    rep: &Representation,
    rng: &mut SeededRng,
    tol: &Tolerances,
) -> Result<(ComplexMatrix, Vec<usize>)> {
    let d = rep.degree();
    if d == 0 {
        return Ok((ComplexMatrix::identity(0), vec![]));
    }
    if rep.is_irreducible(0.01) {
        return Ok((ComplexMatrix::identity(d), vec![d]));
    }
    let order = rep.group().order();
    let mut last_reason = String::from("no usable eigenvalue split");
    for _attempt in 0..MAX_RETRIES {
        let x = rng.hermitian(d);
        let t = average_conjugation(rep, &x);
        let (vals, vecs) = hermitian_eigen(&t)?;
        let ranges = cluster_ranges(&vals, tol.cluster);
        if ranges.len() < 2 {
            last_reason = "commutant average degenerated to a scalar".into();
            continue;
        }
        // The eigenbasis must actually block-diagonalize the action.
        let vecs_dag = vecs.adjoint();
        let mut invariant = true;
        'outer: for g in 0..order {
            let conj = vecs_dag.mul(rep.image(g)).mul(&vecs);
            for &(s1, e1) in &ranges {
                for &(s2, e2) in &ranges {
                    if s1 == s2 {
                        continue;
                    }
                    for i in s1..e1 {
                        for j in s2..e2 {
                            if conj[(i, j)].norm() > tol.dec {
                                invariant = false;
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        if !invariant {
            last_reason = "eigenvalue clusters were not invariant".into();
            continue;
        }
        let mut u_blocks = Vec::new();
        let mut degrees = Vec::new();
        for &(s, e) in &ranges {
            let v = vecs.block(0, s, d, e - s);
            let restricted = rep.restricted(&v);
            let (u_sub, degs) = split_recursive(&restricted, rng, tol)?;
            u_blocks.push(u_sub);
            degrees.extend(degs);
        }
        let u = direct_sum_all(&u_blocks).mul(&vecs_dag);
        return Ok((u, degrees));
    }
    Err(Error::DecompositionFailed {
        retries: MAX_RETRIES,
        reason: last_reason,
    })
}

/// Compute a unitary `R` with `R source(g) R† = target(g)` for equivalent
/// irreducible image lists, via group averaging of a random seed.
fn intertwiner_unitary(
    target: &[ComplexMatrix],
    source: &[ComplexMatrix],
    rng: &mut SeededRng,
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    let deg = target[0].rows();
    let order = target.len();
    for _attempt in 0..MAX_RETRIES {
        let x = ComplexMatrix::from_fn(deg, deg, |_, _| rng.complex_normal());
        let mut s = ComplexMatrix::zeros(deg, deg);
        for g in 0..order {
            s = s.add(&target[g].mul(&x).mul(&source[g].adjoint()));
        }
        s = s.scale(Complex64::new(1.0 / order as f64, 0.0));
        let c = s.mul(&s.adjoint()).trace().re / deg as f64;
        if c < 1e-8 {
            continue;
        }
        let r = s.scale(Complex64::new(1.0 / c.sqrt(), 0.0));
        if linalg::unitary_deviation(&r)? > 1e-7 {
            continue;
        }
        let ok = (0..order).all(|g| r.mul(&source[g]).max_abs_diff(&target[g].mul(&r)) <= tol.dec);
        if ok {
            return Ok(r);
        }
    }
    Err(Error::Numerical(
        "failed to construct a unitary intertwiner between equivalent blocks".into(),
    ))
}

fn characters_equivalent(a: &[C64], b: &[C64]) -> bool {
    let order = a.len() as f64;
    let ip: C64 = a.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
    (ip / Complex64::new(order, 0.0) - Complex64::new(1.0, 0.0)).norm() < 0.01
}

/// Assign labels to the blocks of `u ρ u†` (layout given by `degrees`) and
/// conjugate equivalent blocks onto the first representative so that
/// equal-label blocks are entrywise equal. Verifies the final invariants.
fn label_and_equalize(
    rep: &Representation,
    mut u: ComplexMatrix,
    degrees: &[usize],
    rng: &mut SeededRng,
    tol: &Tolerances,
) -> Result<Decomposition> {
    let d = rep.degree();
    let order = rep.group().order();
    if degrees.iter().sum::<usize>() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: degrees.iter().sum(),
        });
    }
    if linalg::unitary_deviation(&u)? > tol.unitary.max(1e-8) {
        return Err(Error::Numerical("base change is not unitary".into()));
    }

    let mut offsets = Vec::with_capacity(degrees.len());
    let mut acc = 0;
    for &deg in degrees {
        offsets.push(acc);
        acc += deg;
    }

    let block_images = |u: &ComplexMatrix, offset: usize, deg: usize| -> Vec<ComplexMatrix> {
        let rows = u.block(offset, 0, deg, d);
        (0..order)
            .map(|g| rep.image(g).conjugated_by(&rows))
            .collect()
    };

    let mut canonical: Vec<(Vec<ComplexMatrix>, Vec<C64>)> = Vec::new();
    let mut blocks = Vec::with_capacity(degrees.len());
    for (b, (&offset, &deg)) in offsets.iter().zip(degrees).enumerate() {
        let imgs = block_images(&u, offset, deg);
        let chi: Vec<C64> = imgs.iter().map(|m| m.trace()).collect();
        let selfcheck: f64 = chi.iter().map(|z| z.norm_sqr()).sum::<f64>() / order as f64;
        if (selfcheck - 1.0).abs() > 0.01 {
            return Err(Error::DecompositionFailed {
                retries: 0,
                reason: format!("block {b} is not irreducible (commutant dim {selfcheck:.3})"),
            });
        }
        let mut label = None;
        for (cand, (can_imgs, can_chi)) in canonical.iter().enumerate() {
            if can_imgs[0].rows() != deg {
                continue;
            }
            let equal = imgs
                .iter()
                .zip(can_imgs)
                .all(|(a, c)| a.max_abs_diff(c) <= tol.dec);
            if equal {
                label = Some(cand);
                break;
            }
            if characters_equivalent(can_chi, &chi) {
                let r = intertwiner_unitary(can_imgs, &imgs, rng, tol)?;
                // Fold the intertwiner into the base change for this block.
                let rows = u.block(offset, 0, deg, d);
                u.set_block(offset, 0, &r.mul(&rows));
                label = Some(cand);
                break;
            }
        }
        let label = match label {
            Some(l) => l,
            None => {
                canonical.push((imgs, chi));
                canonical.len() - 1
            }
        };
        blocks.push(Block {
            offset,
            degree: deg,
            label,
        });
    }

    let dec = Decomposition {
        base_change: u,
        blocks,
        images_checked: false,
    };
    verify_decomposition(&dec, rep, tol)
}

/// Check block diagonality and equal-label equality for every element.
fn verify_decomposition(
    dec: &Decomposition,
    rep: &Representation,
    tol: &Tolerances,
) -> Result<Decomposition> {
    let order = rep.group().order();
    let mut canonical: BTreeMap<usize, Vec<ComplexMatrix>> = BTreeMap::new();
    for g in 0..order {
        let conj = dec.conjugated_image(rep, g);
        for b1 in &dec.blocks {
            for b2 in &dec.blocks {
                if b1.offset == b2.offset {
                    continue;
                }
                for i in b1.offset..b1.offset + b1.degree {
                    for j in b2.offset..b2.offset + b2.degree {
                        if conj[(i, j)].norm() > tol.dec {
                            return Err(Error::DecompositionFailed {
                                retries: 0,
                                reason: format!(
                                    "off-block entry {:.3e} at element {g}",
                                    conj[(i, j)].norm()
                                ),
                            });
                        }
                    }
                }
            }
        }
        for b in &dec.blocks {
            let sub = conj.block(b.offset, b.offset, b.degree, b.degree);
            match canonical.get(&b.label) {
                Some(imgs) if imgs.len() > g => {
                    let dev = sub.max_abs_diff(&imgs[g]);
                    if dev > tol.dec {
                        return Err(Error::DecompositionFailed {
                            retries: 0,
                            reason: format!(
                                "equal-label blocks differ by {dev:.3e} at element {g}"
                            ),
                        });
                    }
                }
                _ => {
                    canonical.entry(b.label).or_default().push(sub);
                }
            }
        }
    }
    Ok(Decomposition {
        base_change: dec.base_change.clone(),
        blocks: dec.blocks.clone(),
        images_checked: true,
    })
}

/// Decompose an ordinary unitary representation into irreducibles with
/// equivalent blocks made equal. Deterministic for a fixed seed.
pub fn decompose(rep: &Representation, seed: u64, tol: &Tolerances) -> Result<Decomposition> {
    let mut rng = SeededRng::new(seed);
    let (u, degrees) = split_recursive(rep, &mut rng, tol)?;
    label_and_equalize(rep, u, &degrees, &mut rng, tol)
}

/// Build a decomposition from a known base change and block layout (the
/// family path). The blocks must come out irreducible; equivalent ones are
/// equalized exactly like in the general path.
pub fn from_base_change(
    rep: &Representation,
    u: ComplexMatrix,
    degrees: &[usize],
    seed: u64,
    tol: &Tolerances,
) -> Result<Decomposition> {
    let mut rng = SeededRng::new(seed);
    label_and_equalize(rep, u, degrees, &mut rng, tol)
}

/// Re-express `dec`'s blocks in the label space of `target`: equivalent
/// blocks are conjugated so they equal the target's canonical images, and
/// labels are renumbered to match. Labels with no counterpart in the target
/// get fresh labels above the target's range.
pub fn align(
    dec: &Decomposition,
    rep: &Representation,
    target_dec: &Decomposition,
    target_rep: &Representation,
    seed: u64,
    tol: &Tolerances,
) -> Result<Decomposition> {
    let mut rng = SeededRng::new(seed);
    let mut u = dec.base_change.clone();
    let order = rep.group().order();
    if order != target_rep.group().order() {
        return Err(Error::DimensionMismatch {
            expected: target_rep.group().order(),
            got: order,
        });
    }

    let target_labels: Vec<usize> = target_dec.multiplicity_map().keys().copied().collect();
    let target_canon: BTreeMap<usize, (Vec<ComplexMatrix>, Vec<C64>)> = target_labels
        .iter()
        .map(|&l| {
            let imgs = target_dec.canonical_images(target_rep, l);
            let chi = imgs.iter().map(|m| m.trace()).collect();
            (l, (imgs, chi))
        })
        .collect();
    let mut next_fresh = target_labels.iter().copied().max().map_or(0, |m| m + 1);

    let own_labels: Vec<usize> = dec.multiplicity_map().keys().copied().collect();
    let mut relabel: BTreeMap<usize, usize> = BTreeMap::new();
    let mut conjugators: BTreeMap<usize, Option<ComplexMatrix>> = BTreeMap::new();
    for &l in &own_labels {
        let imgs = dec.canonical_images(rep, l);
        let chi: Vec<C64> = imgs.iter().map(|m| m.trace()).collect();
        let mut matched = None;
        for (&tl, (t_imgs, t_chi)) in &target_canon {
            if t_imgs[0].rows() != imgs[0].rows() {
                continue;
            }
            let equal = imgs
                .iter()
                .zip(t_imgs)
                .all(|(a, c)| a.max_abs_diff(c) <= tol.dec);
            if equal {
                matched = Some((tl, None));
                break;
            }
            if characters_equivalent(t_chi, &chi) {
                let r = intertwiner_unitary(t_imgs, &imgs, &mut rng, tol)?;
                matched = Some((tl, Some(r)));
                break;
            }
        }
        match matched {
            Some((tl, r)) => {
                relabel.insert(l, tl);
                conjugators.insert(l, r);
            }
            None => {
                relabel.insert(l, next_fresh);
                conjugators.insert(l, None);
                next_fresh += 1;
            }
        }
    }

    let mut blocks = Vec::with_capacity(dec.blocks.len());
    for b in &dec.blocks {
        if let Some(Some(r)) = conjugators.get(&b.label) {
            let rows = u.block(b.offset, 0, b.degree, dec.degree());
            u.set_block(b.offset, 0, &r.mul(&rows));
        }
        blocks.push(Block {
            offset: b.offset,
            degree: b.degree,
            label: relabel[&b.label],
        });
    }
    let aligned = Decomposition {
        base_change: u,
        blocks,
        images_checked: false,
    };
    verify_decomposition(&aligned, rep, tol)
}

/// Multiplicities per label, cross-checked against character inner products.
pub fn multiplicities(
    rep: &Representation,
    seed: u64,
    tol: &Tolerances,
) -> Result<BTreeMap<usize, usize>> {
    let dec = decompose(rep, seed, tol)?;
    multiplicities_of(&dec, rep)
}

/// Multiplicities of an existing decomposition, cross-checked by characters.
pub fn multiplicities_of(
    dec: &Decomposition,
    rep: &Representation,
) -> Result<BTreeMap<usize, usize>> {
    let counts = dec.multiplicity_map();
    let order = rep.group().order() as f64;
    let chi_rho = rep.character();
    for (&label, &count) in &counts {
        let chi_i = dec.block_character(rep, label);
        let ip: C64 = chi_rho
            .iter()
            .zip(&chi_i)
            .map(|(a, b)| a * b.conj())
            .sum::<C64>()
            / Complex64::new(order, 0.0);
        if (ip.re - count as f64).abs() > 0.01 || ip.im.abs() > 0.01 {
            return Err(Error::CharacterMismatch { value: ip.re });
        }
    }
    Ok(counts)
}

/// Closed-form base changes for a family, plus the block layouts they
/// produce and the recorded surplus block degrees.
#[derive(Debug, Clone)]
pub struct FamilyBases {
    pub u: ComplexMatrix,
    pub w: ComplexMatrix,
    /// Degrees of the blocks of `U φ U†`, in order.
    pub left_degrees: Vec<usize>,
    /// Degrees of the blocks of `W φ_mon W†`, in order.
    pub right_degrees: Vec<usize>,
    /// Degrees of the surplus blocks that make up φ'.
    pub phi_prime_degrees: Vec<usize>,
}

/// The family base changes: `U = I, W = F_n` (cyclic),
/// `W = Q(I₂ ⊗ F_m†)` (dihedral), `W = Z†(F_m† ⊗ F_m)` (Weyl-Heisenberg).
pub fn family_bases(family: Family) -> Result<FamilyBases> {
    match family {
        Family::Cyclic { n, d } => {
            if d < 1 || n < d {
                return Err(Error::UnsupportedParameter(format!(
                    "cyclic family needs d <= n, got n={n}, d={d}"
                )));
            }
            Ok(FamilyBases {
                u: ComplexMatrix::identity(d),
                w: fourier(n),
                left_degrees: vec![1; d],
                right_degrees: vec![1; n],
                phi_prime_degrees: vec![1; n - d],
            })
        }
        Family::Dihedral { m } => {
            if !families::is_power_of_two(m) || m < 4 {
                return Err(Error::UnsupportedParameter(format!(
                    "dihedral family needs m = 2^k >= 4, got m={m}"
                )));
            }
            let q = permutation_matrix(&families::dihedral_q_permutation(m))?;
            let w = q.mul(&kron(&ComplexMatrix::identity(2), &fourier(m).adjoint()));
            Ok(FamilyBases {
                u: ComplexMatrix::identity(2),
                w,
                left_degrees: vec![2],
                right_degrees: vec![2; m],
                phi_prime_degrees: vec![2; m - 1],
            })
        }
        Family::WeylHeisenberg { m } => {
            if !families::is_power_of_two(m) || m < 4 {
                return Err(Error::UnsupportedParameter(format!(
                    "Weyl-Heisenberg family needs m = 2^k >= 4, got m={m}"
                )));
            }
            let z = families::wh_z_matrix(m);
            let w = z.adjoint().mul(&kron(&fourier(m).adjoint(), &fourier(m)));
            Ok(FamilyBases {
                u: ComplexMatrix::identity(m),
                w,
                left_degrees: vec![m],
                right_degrees: vec![m; m],
                phi_prime_degrees: vec![m; m - 1],
            })
        }
    }
}
