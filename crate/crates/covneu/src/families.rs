//! The three built-in POVM families (cyclic, dihedral, Weyl-Heisenberg):
//! symmetry groups, representations, defining matrices, and the worked
//! qubit example with Pauli covariance.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::groups::{generate_group, MatrixGroup, Representation};
use crate::linalg::{clock, cyclic_shift, root_of_unity, ComplexMatrix, C64, ONE};
use crate::povm::RankOnePovm;
use crate::Tolerances;

/// Built-in family selector, used by the synthesis options and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Cyclic { n: usize, d: usize },
    Dihedral { m: usize },
    WeylHeisenberg { m: usize },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Cyclic { .. } => "cyclic",
            Family::Dihedral { .. } => "dihedral",
            Family::WeylHeisenberg { .. } => "weyl-heisenberg",
        }
    }
}

pub fn is_power_of_two(n: usize) -> bool {
    n >= 1 && n & (n - 1) == 0
}

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)],
        vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
    ])
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]])
}

/// Z_n acting on C^d through `φ(1) = diag(1, ω, ..., ω^{d-1})` with
/// `ω = exp(2πi/n)`.
pub fn cyclic_group_rep(
    n: usize,
    d: usize,
    tol: &Tolerances,
) -> Result<(Arc<MatrixGroup>, Representation)> {
    if d < 1 || n < d || (n > 1 && d < 2) {
        return Err(Error::UnsupportedParameter(format!(
            "cyclic family needs 2 <= d <= n, got n={n}, d={d}"
        )));
    }
    let entries: Vec<C64> = (0..d).map(|j| root_of_unity(n, j)).collect();
    let gen = ComplexMatrix::diagonal(&entries);
    let group = Arc::new(generate_group(&[gen], n + 1, false, tol)?);
    if group.order() != n {
        return Err(Error::UnsupportedParameter(format!(
            "cyclic generator has order {}, expected {n}",
            group.order()
        )));
    }
    let phi = Representation::natural(Arc::clone(&group));
    Ok((group, phi))
}

/// The group-generated cyclic POVM with uniform initial vector: defining
/// matrix `M[j][k] = ω^{jk}/√n`.
pub fn cyclic_povm(n: usize, d: usize) -> Result<RankOnePovm> {
    if d < 1 || n < d {
        return Err(Error::UnsupportedParameter(format!(
            "cyclic family needs d <= n, got n={n}, d={d}"
        )));
    }
    let s = 1.0 / (n as f64).sqrt();
    let vectors: Vec<Vec<C64>> = (0..n)
        .map(|k| (0..d).map(|j| root_of_unity(n, (j * k) % n) * s).collect())
        .collect();
    RankOnePovm::new(d, vectors)
}

/// The dihedral group D_{2m} on C^2: rotation `diag(ω, ω^{-1})` and
/// reflection `σ_x`, for `ω = exp(2πi/m)`.
pub fn dihedral_group_rep(
    m: usize,
    tol: &Tolerances,
) -> Result<(Arc<MatrixGroup>, Representation)> {
    if !is_power_of_two(m) || m < 4 {
        return Err(Error::UnsupportedParameter(format!(
            "dihedral family needs m = 2^k >= 4, got m={m}"
        )));
    }
    let r = ComplexMatrix::diagonal(&[root_of_unity(m, 1), root_of_unity(m, m - 1)]);
    let group = Arc::new(generate_group(&[r, sigma_x()], 2 * m + 1, false, tol)?);
    if group.order() != 2 * m {
        return Err(Error::Numerical(format!(
            "dihedral group closure has order {}, expected {}",
            group.order(),
            2 * m
        )));
    }
    let phi = Representation::natural(Arc::clone(&group));
    Ok((group, phi))
}

/// The dihedral POVM on C^2 with `n = 2m` outcomes: columns
/// `(α, βω^j)` for `j < m` followed by `(β, αω^j)`. Requires
/// `|α|² + |β|² = 1/m`.
pub fn dihedral_povm(m: usize, alpha: C64, beta: C64, tol: &Tolerances) -> Result<RankOnePovm> {
    if !is_power_of_two(m) || m < 4 {
        return Err(Error::UnsupportedParameter(format!(
            "dihedral family needs m = 2^k >= 4, got m={m}"
        )));
    }
    let weight = alpha.norm_sqr() + beta.norm_sqr();
    if (weight - 1.0 / m as f64).abs() > tol.povm.max(1e-9) {
        return Err(Error::NotNormalized {
            reason: format!("|alpha|^2 + |beta|^2 = {weight:.6}, expected 1/{m}"),
        });
    }
    let mut vectors = Vec::with_capacity(2 * m);
    for j in 0..m {
        vectors.push(vec![alpha, beta * root_of_unity(m, j)]);
    }
    for j in 0..m {
        vectors.push(vec![beta, alpha * root_of_unity(m, j)]);
    }
    RankOnePovm::new(2, vectors)
}

/// The Weyl-Heisenberg group `G_m = <S_m, T_m>` of order m³ in its natural
/// (irreducible) representation on C^m.
pub fn wh_group_rep(m: usize, tol: &Tolerances) -> Result<(Arc<MatrixGroup>, Representation)> {
    if !is_power_of_two(m) || m < 4 {
        return Err(Error::UnsupportedParameter(format!(
            "Weyl-Heisenberg family needs m = 2^k >= 4, got m={m}"
        )));
    }
    let group = Arc::new(generate_group(
        &[cyclic_shift(m), clock(m)],
        m * m * m + 1,
        false,
        tol,
    )?);
    if group.order() != m * m * m {
        return Err(Error::Numerical(format!(
            "Weyl-Heisenberg closure has order {}, expected {}",
            group.order(),
            m * m * m
        )));
    }
    let phi = Representation::natural(Arc::clone(&group));
    Ok((group, phi))
}

/// The Weyl-Heisenberg POVM with `n = m²` outcomes. Column `(j, l)` (at
/// index `j·m + l`) is `ω^{jl} S^j T^l |ψ>`, i.e. entry `i` equals
/// `ω^{l·i} v[(i - j) mod m]`. Requires `Σ|v_i|² = 1/m`.
pub fn wh_povm(m: usize, v: &[C64], tol: &Tolerances) -> Result<RankOnePovm> {
    if !is_power_of_two(m) || m < 4 {
        return Err(Error::UnsupportedParameter(format!(
            "Weyl-Heisenberg family needs m = 2^k >= 4, got m={m}"
        )));
    }
    if v.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: v.len(),
        });
    }
    let nsq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if (nsq - 1.0 / m as f64).abs() > tol.povm.max(1e-9) {
        return Err(Error::NotNormalized {
            reason: format!("sum of |v_i|^2 is {nsq:.6}, expected 1/{m}"),
        });
    }
    let mut vectors = Vec::with_capacity(m * m);
    for j in 0..m {
        for l in 0..m {
            let col: Vec<C64> = (0..m)
                .map(|i| root_of_unity(m, (l * i) % m) * v[(i + m - j) % m])
                .collect();
            vectors.push(col);
        }
    }
    RankOnePovm::new(m, vectors)
}

/// The symmetric initial vector
/// `(1, α, ..., α^{m/2-1}, α^{m/2-1}, ..., α, 1)/√κ` with
/// `κ = 2m(1 + |α|² + ... + |α|^{m-2})`.
pub fn wh_symmetric_vector(m: usize, alpha: C64) -> Result<Vec<C64>> {
    if !is_power_of_two(m) || m < 4 {
        return Err(Error::UnsupportedParameter(format!(
            "Weyl-Heisenberg family needs m = 2^k >= 4, got m={m}"
        )));
    }
    let a2 = alpha.norm_sqr();
    let mut geom = 0.0;
    let mut pow = 1.0;
    for _ in 0..(m / 2) {
        geom += pow;
        pow *= a2;
    }
    let kappa = 2.0 * m as f64 * geom;
    let scale = Complex64::new(1.0 / kappa.sqrt(), 0.0);
    let v: Vec<C64> = (0..m)
        .map(|i| {
            let e = if i < m / 2 { i } else { m - 1 - i };
            alpha.powu(e as u32) * scale
        })
        .collect();
    Ok(v)
}

/// Qubit example with Pauli covariance: the four-outcome POVM with defining
/// matrix `[[α, α, β, β], [β, -β, α, -α]]`, `|α|² + |β|² = 1/2`.
pub fn pauli_povm(alpha: C64, beta: C64, tol: &Tolerances) -> Result<RankOnePovm> {
    let weight = alpha.norm_sqr() + beta.norm_sqr();
    if (weight - 0.5).abs() > tol.povm.max(1e-9) {
        return Err(Error::NotNormalized {
            reason: format!("|alpha|^2 + |beta|^2 = {weight:.6}, expected 1/2"),
        });
    }
    RankOnePovm::new(
        2,
        vec![
            vec![alpha, beta],
            vec![alpha, -beta],
            vec![beta, alpha],
            vec![beta, -alpha],
        ],
    )
}

/// The matrix group `<σ_z, σ_x>` of order 8 with its natural action on C².
pub fn pauli_group_rep(tol: &Tolerances) -> Result<(Arc<MatrixGroup>, Representation)> {
    let group = Arc::new(generate_group(&[sigma_z(), sigma_x()], 16, false, tol)?);
    let phi = Representation::natural(Arc::clone(&group));
    Ok((group, phi))
}

/// Group, representation and POVM for the Pauli-covariant qubit example,
/// with `α = cos(θ)/√2` and `β = sin(θ)/√2`.
pub fn pauli_qubit_example(
    theta: f64,
    tol: &Tolerances,
) -> Result<(Arc<MatrixGroup>, Representation, RankOnePovm)> {
    let alpha = Complex64::new(theta.cos() / 2.0f64.sqrt(), 0.0);
    let beta = Complex64::new(theta.sin() / 2.0f64.sqrt(), 0.0);
    let (group, phi) = pauli_group_rep(tol)?;
    let povm = pauli_povm(alpha, beta, tol)?;
    Ok((group, phi, povm))
}

/// The three-outcome qubit POVM from the opening worked example, columns in
/// displayed order `(1,1), (1,ω²), (1,ω)` over √3.
pub fn p2_displayed() -> RankOnePovm {
    let s = 1.0 / 3.0f64.sqrt();
    let sc = Complex64::new(s, 0.0);
    RankOnePovm::new(
        2,
        vec![
            vec![sc, sc],
            vec![sc, s * root_of_unity(3, 2)],
            vec![sc, s * root_of_unity(3, 1)],
        ],
    )
    .expect("fixed dimensions")
}

/// Complement permutation on k+1 qubits: fixes `|x, 0>` and maps
/// `|x, 1> -> |x̄, 1>` where x is the top k wires and the control is the
/// least significant wire. Returned as a basis permutation on 0..2m.
pub fn dihedral_q_permutation(m: usize) -> Vec<usize> {
    let n = 2 * m;
    (0..n)
        .map(|i| {
            if i % 2 == 0 {
                i
            } else {
                let x = i / 2;
                2 * (m - 1 - x) + 1
            }
        })
        .collect()
}

/// The index map of `J_{m/2}`: even arguments `2i -> i`, odd arguments
/// `2i-1 -> -i (mod m)`.
pub fn wh_j_index_map(m: usize) -> Vec<usize> {
    (0..m)
        .map(|x| {
            if x % 2 == 0 {
                x / 2
            } else {
                (m - x.div_ceil(2)) % m
            }
        })
        .collect()
}

/// The permutation matrix realizing `J_{m/2}` in the convention that makes
/// `J† (B_{m/4} ⊗ ... ⊗ B_0) J` reproduce the displayed m = 4 middle factor:
/// entry 1 at `(i, jmap(i))`.
pub fn wh_j_matrix(m: usize) -> ComplexMatrix {
    let jmap = wh_j_index_map(m);
    let mut out = ComplexMatrix::zeros(m, m);
    for (i, &ji) in jmap.iter().enumerate() {
        out[(i, ji)] = ONE;
    }
    out
}

/// The diagonal `Z = I_m ⊕ T_m^{m-1} ⊕ ... ⊕ T_m` used to align the
/// Weyl-Heisenberg monomial representation, as an n x n matrix (n = m²):
/// block `j` carries `T^{-j}`.
pub fn wh_z_matrix(m: usize) -> ComplexMatrix {
    let n = m * m;
    let mut z = ComplexMatrix::zeros(n, n);
    for j in 0..m {
        for i in 0..m {
            z[(j * m + i, j * m + i)] = root_of_unity(m, ((m - j) % m) * i % m);
        }
    }
    z
}
