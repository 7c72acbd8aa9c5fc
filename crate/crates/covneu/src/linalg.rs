//! Dense complex linear algebra: the carrier type for every state, operator
//! and representation in the crate, plus the handful of primitives the
//! synthesis needs (Kronecker and direct sums, unitarity checks, orthonormal
//! row completion, the DFT matrix, permutation matrices and a Hermitian
//! eigensolver).

use num_complex::Complex64;
use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = Complex64::new(0.0, 0.0);
pub const ONE: C64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix, row-major. Immutable in spirit: every operation
/// returns a fresh matrix, so values can be shared freely across threads.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Build from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        assert!(!rows.is_empty(), "empty matrix");
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Convenience constructor from real entries.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let complex: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in entries.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Column vector as an n x 1 matrix.
    pub fn column_vector(v: &[C64]) -> Self {
        Self::from_fn(v.len(), 1, |i, _| v[i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> Vec<C64> {
        (0..self.cols).map(|j| self[(i, j)]).collect()
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn mul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols, other.rows,
            "matmul dimension mismatch {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let lhs = k * other.cols;
                let dst = i * other.cols;
                for j in 0..other.cols {
                    out.data[dst + j] += a * other.data[lhs + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        let mut out = vec![ZERO; self.rows];
        for i in 0..self.rows {
            let base = i * self.cols;
            let mut acc = ZERO;
            for j in 0..self.cols {
                acc += self.data[base + j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, s: C64) -> ComplexMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn frobenius_distance(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Frobenius inner product `<self, other> = tr(self† other)`.
    pub fn frobenius_inner(&self, other: &ComplexMatrix) -> C64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn approx_eq(&self, other: &ComplexMatrix, tol: f64) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.max_abs_diff(other) <= tol
    }

    /// Copy of the `rows x cols` block with upper-left corner `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> ComplexMatrix {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols);
        ComplexMatrix::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &ComplexMatrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    pub fn all_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    /// `B A B†`.
    pub fn conjugated_by(&self, b: &ComplexMatrix) -> ComplexMatrix {
        b.mul(self).mul(&b.adjoint())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product with standard block layout.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for ia in 0..a.rows() {
        for ja in 0..a.cols() {
            let v = a[(ia, ja)];
            if v == ZERO {
                continue;
            }
            for ib in 0..b.rows() {
                for jb in 0..b.cols() {
                    out[(ia * b.rows() + ib, ja * b.cols() + jb)] = v * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// Block-diagonal stacking `A ⊕ B`.
pub fn direct_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() + b.rows(), a.cols() + b.cols());
    out.set_block(0, 0, a);
    out.set_block(a.rows(), a.cols(), b);
    out
}

pub fn direct_sum_all(blocks: &[ComplexMatrix]) -> ComplexMatrix {
    assert!(!blocks.is_empty());
    let mut acc = blocks[0].clone();
    for b in &blocks[1..] {
        acc = direct_sum(&acc, b);
    }
    acc
}

/// Max-abs deviation of `A A† - I`; the matrix is unitary when this is small.
pub fn unitary_deviation(a: &ComplexMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let gram = a.mul(&a.adjoint());
    Ok(gram.max_abs_diff(&ComplexMatrix::identity(a.rows())))
}

pub fn is_unitary(a: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(unitary_deviation(a)? <= tol)
}

/// DFT matrix `F_n = (ω^{jk})/√n` with `ω = exp(2πi/n)`.
pub fn fourier(n: usize) -> ComplexMatrix {
    assert!(n >= 1);
    let scale = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, n, |j, k| root_of_unity(n, (j * k) % n) * scale)
}

/// `exp(2πi e / n)` with the exponent reduced mod n first.
pub fn root_of_unity(n: usize, e: usize) -> C64 {
    let angle = std::f64::consts::TAU * (e % n) as f64 / n as f64;
    Complex64::new(angle.cos(), angle.sin())
}

/// Permutation matrix `Σ_i |perm(i)><i|`.
pub fn permutation_matrix(perm: &[usize]) -> Result<ComplexMatrix> {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::Parse(format!(
                "permutation {:?} is not a bijection on 0..{}",
                perm, n
            )));
        }
        seen[p] = true;
    }
    let mut m = ComplexMatrix::zeros(n, n);
    for (i, &p) in perm.iter().enumerate() {
        m[(p, i)] = ONE;
    }
    Ok(m)
}

/// Cyclic shift `S_m = Σ |i+1 mod m><i|`.
pub fn cyclic_shift(m: usize) -> ComplexMatrix {
    let perm: Vec<usize> = (0..m).map(|i| (i + 1) % m).collect();
    permutation_matrix(&perm).expect("cycle is a bijection")
}

/// Clock matrix `T_m = diag(1, ω, ..., ω^{m-1})`.
pub fn clock(m: usize) -> ComplexMatrix {
    let entries: Vec<C64> = (0..m).map(|i| root_of_unity(m, i)).collect();
    ComplexMatrix::diagonal(&entries)
}

fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Extend a `d x n` matrix with orthonormal rows to an `n x n` unitary whose
/// first `d` rows are the input, bit for bit. The completion orthonormalizes
/// the standard basis vectors against the row space in ascending index order,
/// skipping those with residual norm below `tol_rank`.
pub fn complete_to_unitary(
    c: &ComplexMatrix,
    tol_orth: f64,
    tol_rank: f64,
) -> Result<ComplexMatrix> {
    let d = c.rows();
    let n = c.cols();
    if d > n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: d,
        });
    }
    if d > 0 {
        let gram = c.mul(&c.adjoint());
        let dev = gram.max_abs_diff(&ComplexMatrix::identity(d));
        if dev > tol_orth {
            return Err(Error::RowsNotOrthonormal { deviation: dev });
        }
    }
    let mut rows: Vec<Vec<C64>> = (0..d).map(|i| c.row(i)).collect();
    for idx in 0..n {
        if rows.len() == n {
            break;
        }
        let mut v = vec![ZERO; n];
        v[idx] = ONE;
        // Two Gram-Schmidt passes for numerical safety.
        for _ in 0..2 {
            for r in &rows {
                let coeff = inner(r, &v);
                for (vi, ri) in v.iter_mut().zip(r) {
                    *vi -= coeff * ri;
                }
            }
        }
        let nv = norm(&v);
        if nv < tol_rank {
            continue;
        }
        for vi in v.iter_mut() {
            *vi /= Complex64::new(nv, 0.0);
        }
        rows.push(v);
    }
    if rows.len() != n {
        return Err(Error::Numerical(format!(
            "orthonormal completion found only {} of {} rows",
            rows.len(),
            n
        )));
    }
    Ok(ComplexMatrix::from_rows(&rows))
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matrix whose columns are
/// the corresponding eigenvectors, with each eigenvector's largest entry
/// rotated to be real positive so results are deterministic.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let mut m = a.clone();
    // Symmetrize to discard tiny anti-Hermitian noise in the input.
    for i in 0..n {
        m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm().max(1.0);
    let tol = 1e-14 * scale;

    for _sweep in 0..80 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[(i, j)].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag <= tol / (n as f64) {
                    continue;
                }
                let phase = apq / mag;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let theta = 0.5 * (2.0 * mag).atan2(app - aqq);
                let (s, c) = theta.sin_cos();
                let e_s = phase * s; // e^{iφ} sinθ
                                     // Column update: A <- A U with U_pp=c, U_pq=-e^{iφ}s,
                                     // U_qp=e^{-iφ}s, U_qq=c.
                for i in 0..n {
                    let aip = m[(i, p)];
                    let aiq = m[(i, q)];
                    m[(i, p)] = c * aip + e_s.conj() * aiq;
                    m[(i, q)] = -e_s * aip + c * aiq;
                }
                // Row update: A <- U† A.
                for j in 0..n {
                    let apj = m[(p, j)];
                    let aqj = m[(q, j)];
                    m[(p, j)] = c * apj + e_s * aqj;
                    m[(q, j)] = -e_s.conj() * apj + c * aqj;
                }
                // Eigenvector accumulation: V <- V U.
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = c * vip + e_s.conj() * viq;
                    v[(i, q)] = -e_s * vip + c * viq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let vals: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&x, &y| vals[x].partial_cmp(&vals[y]).unwrap().then(x.cmp(&y)));

    let mut eigvals = Vec::with_capacity(n);
    let mut eigvecs = ComplexMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        eigvals.push(vals[old_col]);
        let mut column: Vec<C64> = (0..n).map(|i| v[(i, old_col)]).collect();
        // Deterministic phase: rotate the largest entry to be real positive.
        let mut best = 0usize;
        for i in 1..n {
            if column[i].norm() > column[best].norm() + 1e-12 {
                best = i;
            }
        }
        let mag = column[best].norm();
        if mag > 1e-12 {
            let ph = column[best] / mag;
            for z in column.iter_mut() {
                *z /= ph;
            }
        }
        for i in 0..n {
            eigvecs[(i, new_col)] = column[i];
        }
    }
    Ok((eigvals, eigvecs))
}

/// Rank of a (rectangular) matrix via the spectrum of `A A†`, counting
/// eigenvalues above `tol²·scale`.
pub fn rank(a: &ComplexMatrix, tol: f64) -> Result<usize> {
    let gram = if a.rows() <= a.cols() {
        a.mul(&a.adjoint())
    } else {
        a.adjoint().mul(a)
    };
    let scale = gram.max_abs().max(1.0);
    let (vals, _) = hermitian_eigen(&gram)?;
    Ok(vals.iter().filter(|&&x| x > tol * tol * scale).count())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        Complex64::new(re, im)
    }

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])
    }

    #[test]
    fn kron_identity_factor_gives_block_diagonal() {
        let got = kron(&ComplexMatrix::identity(2), &sigma_x());
        let want = direct_sum(&sigma_x(), &sigma_x());
        assert_eq!(got.max_abs_diff(&want), 0.0);
    }

    #[test]
    fn kron_with_scalar_identity_is_noop() {
        let a = ComplexMatrix::from_rows(&[vec![c(1.0, 2.0), c(0.5, -0.25)]]);
        let got = kron(&a, &ComplexMatrix::identity(1));
        assert_eq!(got.max_abs_diff(&a), 0.0);
    }

    #[test]
    fn kron_reproduces_interleaved_two_level_block() {
        // sqrt(2) [[a, b], [conj(b), -conj(a)]] ⊗ I2 spreads the entries onto
        // even/odd sublattices.
        let a = c(0.3, 0.1);
        let b = c(0.2, -0.4);
        let s = c(std::f64::consts::SQRT_2, 0.0);
        let top = ComplexMatrix::from_rows(&[vec![a, b], vec![b.conj(), -a.conj()]]).scale(s);
        let got = kron(&top, &ComplexMatrix::identity(2));
        assert_eq!(got.rows(), 4);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let want = if k == l { top[(i, j)] } else { ZERO };
                        assert_eq!(got[(2 * i + k, 2 * j + l)], want);
                    }
                }
            }
        }
    }

    #[test]
    fn direct_sum_pads_states() {
        let rho = ComplexMatrix::from_real_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]);
        let padded = direct_sum(&rho, &ComplexMatrix::zeros(1, 1));
        assert_eq!(padded.rows(), 3);
        assert_eq!(padded[(0, 1)], c(0.5, 0.0));
        assert_eq!(padded[(2, 2)], ZERO);

        let one = ComplexMatrix::identity(1);
        assert!(direct_sum(&one, &one).approx_eq(&ComplexMatrix::identity(2), 0.0));
        let i5 = direct_sum(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3));
        assert!(i5.approx_eq(&ComplexMatrix::identity(5), 0.0));
    }

    #[test]
    fn kron_and_direct_sum_are_associative_on_integer_matrices() {
        let a = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let b = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let d = ComplexMatrix::from_real_rows(&[vec![2.0]]);
        let left = kron(&kron(&a, &b), &d);
        let right = kron(&a, &kron(&b, &d));
        assert_eq!(left.max_abs_diff(&right), 0.0);
        let left = direct_sum(&direct_sum(&a, &b), &d);
        let right = direct_sum(&a, &direct_sum(&b, &d));
        assert_eq!(left.max_abs_diff(&right), 0.0);
    }

    #[test]
    fn unitarity_checks() {
        assert!(is_unitary(&fourier(4), 1e-9).unwrap());
        assert!(!is_unitary(&ComplexMatrix::identity(2).scale(c(2.0, 0.0)), 1e-9).unwrap());
        assert!(is_unitary(&fourier(2), 1e-12).unwrap());
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            is_unitary(&rect, 1e-9),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn displayed_dilation_of_the_two_level_block_is_unitary() {
        // alpha = beta = 1/2 in [[a,a,b,b],[b,-b,a,-a],[cb,cb,-ca,-ca],[-ca,ca,cb,-cb]].
        let a = c(0.5, 0.0);
        let b = c(0.5, 0.0);
        let m = ComplexMatrix::from_rows(&[
            vec![a, a, b, b],
            vec![b, -b, a, -a],
            vec![b.conj(), b.conj(), -a.conj(), -a.conj()],
            vec![-a.conj(), a.conj(), b.conj(), -b.conj()],
        ]);
        assert!(is_unitary(&m, 1e-9).unwrap());
    }

    #[test]
    fn fourier_matches_hand_values() {
        let f2 = fourier(2);
        let s = 1.0 / 2.0f64.sqrt();
        assert!(f2.approx_eq(
            &ComplexMatrix::from_real_rows(&[vec![s, s], vec![s, -s]]),
            1e-15
        ));
        // fourier(4) entry (1,3) = ω^3 / 2 = -i/2.
        let f4 = fourier(4);
        assert!((f4[(1, 3)] - c(0.0, -0.5)).norm() < 1e-15);
        for n in [1usize, 2, 3, 4, 8] {
            let f = fourier(n);
            assert!(f
                .mul(&f.adjoint())
                .approx_eq(&ComplexMatrix::identity(n), 1e-12));
        }
    }

    #[test]
    fn fourier_diagonalizes_the_cyclic_shift() {
        for n in [2usize, 3, 4, 8] {
            let f = fourier(n);
            let got = cyclic_shift(n).conjugated_by(&f);
            let want = clock(n);
            assert!(got.approx_eq(&want, 1e-12), "n = {n}");
        }
    }

    #[test]
    fn permutation_matrices() {
        let id: Vec<usize> = (0..5).collect();
        assert!(permutation_matrix(&id)
            .unwrap()
            .approx_eq(&ComplexMatrix::identity(5), 0.0));
        let s4 = cyclic_shift(4);
        for i in 0..4 {
            let mut e = vec![ZERO; 4];
            e[i] = ONE;
            let shifted = s4.mul_vec(&e);
            assert_eq!(shifted[(i + 1) % 4], ONE);
        }
        assert!(permutation_matrix(&[0, 0, 1]).is_err());
        assert!(permutation_matrix(&[0, 3]).is_err());
        // J for m = 4: 0->0, 1->3, 2->1, 3->2.
        let j = permutation_matrix(&[0, 3, 1, 2]).unwrap();
        assert_eq!(j[(3, 1)], ONE);
        assert_eq!(j[(1, 2)], ONE);
        assert!(is_unitary(&j, 0.0).unwrap());
    }

    #[test]
    fn completion_of_a_single_row() {
        let cmat = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0]]);
        let u = complete_to_unitary(&cmat, 1e-9, 1e-8).unwrap();
        assert!(u.approx_eq(&ComplexMatrix::identity(2), 0.0));
    }

    #[test]
    fn completion_of_the_p2_defining_matrix_spans_the_expected_row() {
        let w = root_of_unity(3, 1);
        let w2 = root_of_unity(3, 2);
        let s = 1.0 / 3.0f64.sqrt();
        let m = ComplexMatrix::from_rows(&[
            vec![c(s, 0.0), c(s, 0.0), c(s, 0.0)],
            vec![c(s, 0.0), s * w2, s * w],
        ]);
        let u = complete_to_unitary(&m, 1e-9, 1e-8).unwrap();
        assert!(is_unitary(&u, 1e-9).unwrap());
        // First two rows are reproduced bit-exactly.
        for i in 0..2 {
            for j in 0..3 {
                assert_eq!(u[(i, j)], m[(i, j)]);
            }
        }
        // The third row spans the same line as (1, ω, ω²)/√3.
        let target = [c(s, 0.0), s * w, s * w2];
        let got = u.row(2);
        let overlap = inner(&got, &target).norm();
        assert!((overlap - 1.0).abs() < 1e-10, "overlap = {overlap}");
    }

    #[test]
    fn completion_of_a_square_unitary_is_identity_on_it() {
        let f = fourier(4);
        let u = complete_to_unitary(&f, 1e-9, 1e-8).unwrap();
        assert_eq!(u.max_abs_diff(&f), 0.0);
    }

    #[test]
    fn completion_rejects_non_orthonormal_rows() {
        let bad = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0, 0.0]]);
        assert!(matches!(
            complete_to_unitary(&bad, 1e-9, 1e-8),
            Err(Error::RowsNotOrthonormal { .. })
        ));
    }

    #[test]
    fn hermitian_eigen_recovers_pauli_z() {
        let sz = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]);
        let (vals, vecs) = hermitian_eigen(&sz).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-12 && (vals[1] - 1.0).abs() < 1e-12);
        assert!(is_unitary(&vecs, 1e-10).unwrap());
    }

    #[test]
    fn hermitian_eigen_reconstructs_random_matrices() {
        let mut rng = crate::rng::SeededRng::new(7);
        for n in [2usize, 5, 16] {
            let a = rng.hermitian(n);
            let (vals, vecs) = hermitian_eigen(&a).unwrap();
            let lambda =
                ComplexMatrix::diagonal(&vals.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>());
            let rebuilt = vecs.mul(&lambda).mul(&vecs.adjoint());
            assert!(rebuilt.approx_eq(&a, 1e-10), "n = {n}");
            assert!(is_unitary(&vecs, 1e-10).unwrap());
            for i in 1..n {
                assert!(vals[i] >= vals[i - 1] - 1e-12);
            }
        }
    }

    #[test]
    fn rank_counts_singular_directions() {
        let mut a = ComplexMatrix::zeros(2, 4);
        a[(0, 0)] = ONE;
        a[(1, 0)] = ONE;
        assert_eq!(rank(&a, 1e-8).unwrap(), 1);
        assert_eq!(rank(&fourier(4), 1e-8).unwrap(), 4);
    }
}
