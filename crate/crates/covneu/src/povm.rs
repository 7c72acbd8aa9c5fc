//! Rank-one POVMs: validation, outcome probabilities, group orbits,
//! covariance detection and the monomial representation acting on the
//! columns of the defining matrix.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::groups::{MatrixGroup, Representation};
use crate::linalg::{hermitian_eigen, ComplexMatrix, C64, ZERO};
use crate::Tolerances;

/// A rank-one POVM: `n` unnormalized vectors on C^d whose outer products sum
/// to the identity.
#[derive(Debug, Clone)]
pub struct RankOnePovm {
    dim: usize,
    vectors: Vec<Vec<C64>>,
}

impl RankOnePovm {
    pub fn new(dim: usize, vectors: Vec<Vec<C64>>) -> Result<RankOnePovm> {
        for v in &vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
        }
        Ok(RankOnePovm { dim, vectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, k: usize) -> &[C64] {
        &self.vectors[k]
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    /// The POVM operator `A_k = |Ψ_k><Ψ_k|`.
    pub fn operator(&self, k: usize) -> ComplexMatrix {
        outer(&self.vectors[k])
    }
}

fn outer(v: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
}

fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Validation outcome: completeness deviation and duplicate operators.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    /// `max |Σ_k A_k - I|` over entries.
    pub completeness_deviation: f64,
    /// Pairs of indices whose operators coincide within the duplicate
    /// threshold.
    pub duplicate_pairs: Vec<(usize, usize)>,
    pub passes: bool,
}

/// Check completeness and pairwise distinctness of the POVM operators.
pub fn validate(povm: &RankOnePovm, tol: &Tolerances) -> ValidationReport {
    let d = povm.dim();
    let mut sum = ComplexMatrix::zeros(d, d);
    for k in 0..povm.len() {
        sum = sum.add(&povm.operator(k));
    }
    let completeness_deviation = sum.max_abs_diff(&ComplexMatrix::identity(d));

    let ops: Vec<ComplexMatrix> = (0..povm.len()).map(|k| povm.operator(k)).collect();
    let mut duplicate_pairs = Vec::new();
    for k in 0..ops.len() {
        for l in (k + 1)..ops.len() {
            if ops[k].frobenius_distance(&ops[l]) < tol.duplicate {
                duplicate_pairs.push((k, l));
            }
        }
    }
    let finite = povm
        .vectors()
        .iter()
        .all(|v| v.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
    let passes = finite && completeness_deviation <= tol.povm && duplicate_pairs.is_empty();
    ValidationReport {
        completeness_deviation,
        duplicate_pairs,
        passes,
    }
}

/// The `d x n` matrix whose columns are the POVM vectors.
pub fn defining_matrix(povm: &RankOnePovm) -> ComplexMatrix {
    ComplexMatrix::from_fn(povm.dim(), povm.len(), |i, k| povm.vector(k)[i])
}

/// Outcome probabilities `p_k = <Ψ_k| ρ |Ψ_k>` for a density matrix.
pub fn probabilities(
    povm: &RankOnePovm,
    rho: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    let d = povm.dim();
    if rho.rows() != d || rho.cols() != d {
        return Err(Error::InvalidState {
            reason: format!(
                "expected a {d}x{d} density matrix, got {}x{}",
                rho.rows(),
                rho.cols()
            ),
        });
    }
    let herm_dev = rho.max_abs_diff(&rho.adjoint());
    if herm_dev > tol.povm.max(1e-10) {
        return Err(Error::InvalidState {
            reason: format!("not Hermitian (deviation {herm_dev:.3e})"),
        });
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > tol.povm.max(1e-9) || tr.im.abs() > tol.povm.max(1e-9) {
        return Err(Error::InvalidState {
            reason: format!("trace is {:.6}+{:.6}i, expected 1", tr.re, tr.im),
        });
    }
    let (eigs, _) = hermitian_eigen(rho)?;
    if eigs.first().copied().unwrap_or(0.0) < -tol.povm.max(1e-9) {
        return Err(Error::InvalidState {
            reason: format!("negative eigenvalue {:.3e}", eigs[0]),
        });
    }
    Ok((0..povm.len())
        .map(|k| {
            let v = povm.vector(k);
            let rv = rho.mul_vec(v);
            inner(v, &rv).re
        })
        .collect())
}

/// A group orbit turned into a POVM, with bookkeeping about which group
/// element produced each vector.
#[derive(Debug, Clone)]
pub struct OrbitPovm {
    pub povm: RankOnePovm,
    /// Group element index that produced each POVM vector (first seen wins
    /// when the phase quotient merges elements).
    pub representatives: Vec<usize>,
    pub report: ValidationReport,
}

/// Build the group-generated POVM `{ φ(g)|Ψ> }` in group element order.
///
/// With `phase_quotient` set, vectors equal up to a global phase are merged
/// onto the first-seen representative. The orbit is rescaled so completeness
/// holds; if the accumulated outer products are not a multiple of the
/// identity (a reducible action) this fails with `NotCompletable`.
pub fn orbit_povm(
    phi: &Representation,
    psi0: &[C64],
    phase_quotient: bool,
    tol: &Tolerances,
) -> Result<OrbitPovm> {
    let d = phi.degree();
    if psi0.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: psi0.len(),
        });
    }
    if psi0.iter().map(|z| z.norm_sqr()).sum::<f64>() < 1e-24 {
        return Err(Error::NotNormalized {
            reason: "initial vector is zero".into(),
        });
    }
    let mut vectors: Vec<Vec<C64>> = Vec::new();
    let mut representatives = Vec::new();
    let mut operators: Vec<ComplexMatrix> = Vec::new();
    for g in 0..phi.group().order() {
        let w = phi.image(g).mul_vec(psi0);
        if phase_quotient {
            let op = outer(&w);
            if operators
                .iter()
                .any(|o| o.frobenius_distance(&op) < tol.duplicate)
            {
                continue;
            }
            operators.push(op);
        }
        vectors.push(w);
        representatives.push(g);
    }

    let mut sum = ComplexMatrix::zeros(d, d);
    for v in &vectors {
        sum = sum.add(&outer(v));
    }
    let c = sum.trace().re / d as f64;
    let deviation = sum.max_abs_diff(&ComplexMatrix::identity(d).scale(Complex64::new(c, 0.0)));
    if c <= 0.0 || deviation > tol.povm.max(1e-9) * c.max(1.0) {
        return Err(Error::NotCompletable { deviation });
    }
    let scale = Complex64::new(1.0 / c.sqrt(), 0.0);
    let vectors: Vec<Vec<C64>> = vectors
        .into_iter()
        .map(|v| v.into_iter().map(|z| z * scale).collect())
        .collect();
    let povm = RankOnePovm::new(d, vectors)?;
    let report = validate(&povm, tol);
    Ok(OrbitPovm {
        povm,
        representatives,
        report,
    })
}

/// True iff conjugation by every `φ(g)` permutes the POVM operator set.
pub fn covariance_check(phi: &Representation, povm: &RankOnePovm, tol: &Tolerances) -> bool {
    match_permutations(phi, povm, tol).is_ok()
}

fn match_permutations(
    phi: &Representation,
    povm: &RankOnePovm,
    tol: &Tolerances,
) -> Result<Vec<Vec<usize>>> {
    if phi.degree() != povm.dim() {
        return Err(Error::DimensionMismatch {
            expected: povm.dim(),
            got: phi.degree(),
        });
    }
    let ops: Vec<ComplexMatrix> = (0..povm.len()).map(|k| povm.operator(k)).collect();
    let mut perms = Vec::with_capacity(phi.group().order());
    for g in 0..phi.group().order() {
        let u = phi.image(g);
        let mut perm = vec![usize::MAX; povm.len()];
        let mut hit = vec![false; povm.len()];
        for k in 0..povm.len() {
            let conj = ops[k].conjugated_by(u);
            let found = ops
                .iter()
                .position(|o| o.frobenius_distance(&conj) < tol.duplicate);
            match found {
                Some(l) if !hit[l] => {
                    perm[k] = l;
                    hit[l] = true;
                }
                _ => {
                    return Err(Error::NotCovariant {
                        element: g,
                        operator: k,
                    })
                }
            }
        }
        perms.push(perm);
    }
    Ok(perms)
}

/// The monomial representation acting on the POVM columns: a permutation
/// `π(g)` plus a unit phase per element and column, satisfying
/// `φ(g)|Ψ_k> = e^{iφ(g,k)} |Ψ_{π(g)k}>`.
#[derive(Debug, Clone)]
pub struct MonomialRep {
    group: Arc<MatrixGroup>,
    perm: Vec<Vec<usize>>,
    phases: Vec<Vec<C64>>,
}

impl MonomialRep {
    pub fn group(&self) -> &Arc<MatrixGroup> {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.perm[0].len()
    }

    pub fn permutation(&self, g: usize) -> &[usize] {
        &self.perm[g]
    }

    pub fn phase(&self, g: usize, k: usize) -> C64 {
        self.phases[g][k]
    }

    /// The monomial matrix for one group element: entry `e^{iφ(g,k)}` at
    /// `(π(g)k, k)`.
    pub fn image(&self, g: usize) -> ComplexMatrix {
        let n = self.degree();
        let mut m = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            m[(self.perm[g][k], k)] = self.phases[g][k];
        }
        m
    }

    pub fn to_representation(&self) -> Representation {
        let images = (0..self.group.order()).map(|g| self.image(g)).collect();
        Representation::new(Arc::clone(&self.group), images)
            .expect("monomial images match the group order")
    }
}

/// Derive the monomial representation of `φ` on the columns of the defining
/// matrix. Fails with `NotCovariant` when some conjugated operator is not in
/// the POVM.
pub fn derive_monomial(
    phi: &Representation,
    povm: &RankOnePovm,
    tol: &Tolerances,
) -> Result<MonomialRep> {
    if phi.degree() != povm.dim() {
        return Err(Error::DimensionMismatch {
            expected: povm.dim(),
            got: phi.degree(),
        });
    }
    let n = povm.len();
    let ops: Vec<ComplexMatrix> = (0..n).map(|k| povm.operator(k)).collect();
    let norms: Vec<f64> = (0..n)
        .map(|k| povm.vector(k).iter().map(|z| z.norm_sqr()).sum())
        .collect();
    let mut perm = Vec::with_capacity(phi.group().order());
    let mut phases = Vec::with_capacity(phi.group().order());
    for g in 0..phi.group().order() {
        let u = phi.image(g);
        let mut perm_g = vec![usize::MAX; n];
        let mut phases_g = vec![ZERO; n];
        let mut hit = vec![false; n];
        for k in 0..n {
            let w = u.mul_vec(povm.vector(k));
            let wop = outer(&w);
            let l = ops
                .iter()
                .position(|o| o.frobenius_distance(&wop) < tol.duplicate)
                .ok_or(Error::NotCovariant {
                    element: g,
                    operator: k,
                })?;
            if hit[l] {
                return Err(Error::NotCovariant {
                    element: g,
                    operator: k,
                });
            }
            hit[l] = true;
            let ov = inner(povm.vector(l), &w);
            if ov.norm() < 1e-12 {
                return Err(Error::NotCovariant {
                    element: g,
                    operator: k,
                });
            }
            let phase = ov / ov.norm();
            // The matched vector must agree entrywise after the phase.
            let dev: f64 = w
                .iter()
                .zip(povm.vector(l))
                .map(|(a, b)| (a - phase * b).norm())
                .fold(0.0, f64::max);
            if dev > tol.group.max(1e-9) * norms[l].sqrt().max(1.0) {
                return Err(Error::NotCovariant {
                    element: g,
                    operator: k,
                });
            }
            perm_g[k] = l;
            phases_g[k] = phase;
        }
        perm.push(perm_g);
        phases.push(phases_g);
    }
    let mon = MonomialRep {
        group: Arc::clone(phi.group()),
        perm,
        phases,
    };
    // Defining symmetry: φ(g) M = M φ_mon(g).
    let m = defining_matrix(povm);
    for g in 0..phi.group().order() {
        let lhs = phi.image(g).mul(&m);
        let rhs = m.mul(&mon.image(g));
        let dev = lhs.max_abs_diff(&rhs);
        if dev > tol.group.max(1e-9) * 10.0 {
            return Err(Error::Numerical(format!(
                "monomial symmetry violated at element {g} (deviation {dev:.3e})"
            )));
        }
    }
    Ok(mon)
}
