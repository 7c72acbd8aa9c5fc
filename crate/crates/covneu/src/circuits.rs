//! Gate-level circuit IR, dense expansion, statevector simulation with shot
//! sampling, and the three family circuit builders.
//!
//! Wire 0 is the most significant qubit; a basis state reads as the binary
//! string of its wires from top to bottom. Gates apply left to right.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::families::{self, is_power_of_two};
use crate::linalg::{
    clock, complete_to_unitary, direct_sum, fourier, hermitian_eigen, kron, permutation_matrix,
    root_of_unity, ComplexMatrix, C64, ONE, ZERO,
};
use crate::rng::SeededRng;

/// One circuit element.
#[derive(Debug, Clone)]
pub enum Gate {
    /// Arbitrary 2x2 unitary on one wire.
    SingleQubit { wire: usize, matrix: ComplexMatrix },
    /// A unitary on `targets` (first listed = most significant), applied
    /// when every control wire carries its control value. With no controls
    /// this is a plain multi-wire unitary.
    Controlled {
        controls: Vec<usize>,
        control_values: Vec<bool>,
        targets: Vec<usize>,
        op: ComplexMatrix,
    },
    /// Basis permutation of the full space: `|i> -> |perm[i]>`.
    Permutation { perm: Vec<usize> },
    /// Diagonal phases on a wire set (first listed = most significant).
    Diagonal { wires: Vec<usize>, phases: Vec<C64> },
    /// QFT macro on the contiguous wire range `lo..=hi`, bit reversal
    /// resolved internally so the expansion equals the DFT matrix exactly.
    Qft { lo: usize, hi: usize, inverse: bool },
}

#[derive(Debug, Clone)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

fn hadamard() -> ComplexMatrix {
    let s = 1.0 / 2.0f64.sqrt();
    ComplexMatrix::from_real_rows(&[vec![s, s], vec![s, -s]])
}

fn phase_gate(theta: f64) -> ComplexMatrix {
    ComplexMatrix::diagonal(&[ONE, Complex64::from_polar(1.0, theta)])
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Circuit {
        Circuit {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dimension(&self) -> usize {
        1usize << self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn h(&mut self, wire: usize) {
        self.push(Gate::SingleQubit {
            wire,
            matrix: hadamard(),
        });
    }

    pub fn phase(&mut self, wire: usize, theta: f64) {
        self.push(Gate::SingleQubit {
            wire,
            matrix: phase_gate(theta),
        });
    }

    pub fn single(&mut self, wire: usize, matrix: ComplexMatrix) {
        self.push(Gate::SingleQubit { wire, matrix });
    }

    pub fn cx(&mut self, control: usize, target: usize) {
        self.push(Gate::Controlled {
            controls: vec![control],
            control_values: vec![true],
            targets: vec![target],
            op: families::sigma_x(),
        });
    }

    pub fn cphase(&mut self, control: usize, target: usize, theta: f64) {
        self.push(Gate::Controlled {
            controls: vec![control],
            control_values: vec![true],
            targets: vec![target],
            op: phase_gate(theta),
        });
    }

    pub fn swap(&mut self, a: usize, b: usize) {
        let q = self.num_qubits;
        let perm: Vec<usize> = (0..1usize << q)
            .map(|i| {
                let ba = (i >> (q - 1 - a)) & 1;
                let bb = (i >> (q - 1 - b)) & 1;
                let mut j = i & !(1 << (q - 1 - a)) & !(1 << (q - 1 - b));
                j |= bb << (q - 1 - a);
                j |= ba << (q - 1 - b);
                j
            })
            .collect();
        self.push(Gate::Permutation { perm });
    }

    pub fn qft(&mut self, lo: usize, hi: usize, inverse: bool) {
        self.push(Gate::Qft { lo, hi, inverse });
    }

    fn check_wire(&self, wire: usize) -> Result<()> {
        if wire >= self.num_qubits {
            Err(Error::WireOutOfRange {
                wire,
                qubits: self.num_qubits,
            })
        } else {
            Ok(())
        }
    }

    fn validate_gate(&self, gate: &Gate) -> Result<()> {
        match gate {
            Gate::SingleQubit { wire, matrix } => {
                self.check_wire(*wire)?;
                if matrix.rows() != 2 || matrix.cols() != 2 {
                    return Err(Error::DimensionMismatch {
                        expected: 2,
                        got: matrix.rows(),
                    });
                }
                Ok(())
            }
            Gate::Controlled {
                controls,
                control_values,
                targets,
                op,
            } => {
                if controls.len() != control_values.len() {
                    return Err(Error::Parse("control/value length mismatch".into()));
                }
                for &w in controls.iter().chain(targets) {
                    self.check_wire(w)?;
                }
                let mut all: Vec<usize> = controls.iter().chain(targets).copied().collect();
                all.sort_unstable();
                all.dedup();
                if all.len() != controls.len() + targets.len() {
                    return Err(Error::Parse("controls and targets overlap".into()));
                }
                let dim = 1usize << targets.len();
                if op.rows() != dim || op.cols() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: op.rows(),
                    });
                }
                Ok(())
            }
            Gate::Permutation { perm } => {
                if perm.len() != self.dimension() {
                    return Err(Error::DimensionMismatch {
                        expected: self.dimension(),
                        got: perm.len(),
                    });
                }
                let mut seen = vec![false; perm.len()];
                for &p in perm {
                    if p >= perm.len() || seen[p] {
                        return Err(Error::Parse("permutation is not a bijection".into()));
                    }
                    seen[p] = true;
                }
                Ok(())
            }
            Gate::Diagonal { wires, phases } => {
                for &w in wires {
                    self.check_wire(w)?;
                }
                if phases.len() != 1usize << wires.len() {
                    return Err(Error::DimensionMismatch {
                        expected: 1usize << wires.len(),
                        got: phases.len(),
                    });
                }
                for p in phases {
                    if (p.norm() - 1.0).abs() > 1e-9 {
                        return Err(Error::Parse("diagonal phase is not unimodular".into()));
                    }
                }
                Ok(())
            }
            Gate::Qft { lo, hi, .. } => {
                self.check_wire(*lo)?;
                self.check_wire(*hi)?;
                if lo > hi {
                    return Err(Error::Parse("QFT range is empty".into()));
                }
                Ok(())
            }
        }
    }

    /// Dense expansion of one gate into the full space.
    fn gate_matrix(&self, gate: &Gate) -> Result<ComplexMatrix> {
        self.validate_gate(gate)?;
        let q = self.num_qubits;
        Ok(match gate {
            Gate::SingleQubit { wire, matrix } => {
                let left = ComplexMatrix::identity(1 << wire);
                let right = ComplexMatrix::identity(1 << (q - 1 - wire));
                kron(&kron(&left, matrix), &right)
            }
            Gate::Controlled {
                controls,
                control_values,
                targets,
                op,
            } => {
                let dim = self.dimension();
                let t = targets.len();
                let mut out = ComplexMatrix::zeros(dim, dim);
                for col in 0..dim {
                    let active = controls
                        .iter()
                        .zip(control_values)
                        .all(|(&c, &v)| ((col >> (q - 1 - c)) & 1 == 1) == v);
                    if !active {
                        out[(col, col)] = ONE;
                        continue;
                    }
                    let mut tin = 0usize;
                    for (pos, &w) in targets.iter().enumerate() {
                        tin |= ((col >> (q - 1 - w)) & 1) << (t - 1 - pos);
                    }
                    for tout in 0..(1usize << t) {
                        let amp = op[(tout, tin)];
                        if amp == ZERO {
                            continue;
                        }
                        let mut row = col;
                        for (pos, &w) in targets.iter().enumerate() {
                            let bit = (tout >> (t - 1 - pos)) & 1;
                            row = (row & !(1 << (q - 1 - w))) | (bit << (q - 1 - w));
                        }
                        out[(row, col)] = amp;
                    }
                }
                out
            }
            Gate::Permutation { perm } => permutation_matrix(perm)?,
            Gate::Diagonal { wires, phases } => {
                let dim = self.dimension();
                let mut out = ComplexMatrix::zeros(dim, dim);
                for b in 0..dim {
                    let mut idx = 0usize;
                    for (pos, &w) in wires.iter().enumerate() {
                        idx |= ((b >> (q - 1 - w)) & 1) << (wires.len() - 1 - pos);
                    }
                    out[(b, b)] = phases[idx];
                }
                out
            }
            Gate::Qft { lo, hi, inverse } => {
                let k = hi - lo + 1;
                let f = fourier(1 << k);
                let f = if *inverse { f.adjoint() } else { f };
                let left = ComplexMatrix::identity(1 << lo);
                let right = ComplexMatrix::identity(1 << (q - 1 - hi));
                kron(&kron(&left, &f), &right)
            }
        })
    }

    /// Product of the gate expansions in application order.
    pub fn expand(&self) -> Result<ComplexMatrix> {
        let mut total = ComplexMatrix::identity(self.dimension());
        for gate in &self.gates {
            total = self.gate_matrix(gate)?.mul(&total);
        }
        Ok(total)
    }

    /// Apply the circuit to a state vector gate by gate, without forming
    /// dense matrices.
    pub fn simulate(&self, state: &[C64]) -> Result<Vec<C64>> {
        if state.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: state.len(),
            });
        }
        let mut amps = state.to_vec();
        for gate in &self.gates {
            self.apply_gate(gate, &mut amps)?;
        }
        Ok(amps)
    }

    fn apply_gate(&self, gate: &Gate, amps: &mut Vec<C64>) -> Result<()> {
        self.validate_gate(gate)?;
        let q = self.num_qubits;
        match gate {
            Gate::SingleQubit { wire, matrix } => {
                let stride = 1usize << (q - 1 - wire);
                for base in 0..amps.len() {
                    if base & stride != 0 {
                        continue;
                    }
                    let a0 = amps[base];
                    let a1 = amps[base | stride];
                    amps[base] = matrix[(0, 0)] * a0 + matrix[(0, 1)] * a1;
                    amps[base | stride] = matrix[(1, 0)] * a0 + matrix[(1, 1)] * a1;
                }
            }
            Gate::Controlled {
                controls,
                control_values,
                targets,
                op,
            } => {
                let t = targets.len();
                let tdim = 1usize << t;
                let strides: Vec<usize> = targets.iter().map(|&w| 1usize << (q - 1 - w)).collect();
                for base in 0..amps.len() {
                    // Visit each target-subspace orbit once, at its all-zero
                    // representative, and only when the controls fire.
                    if strides.iter().any(|&s| base & s != 0) {
                        continue;
                    }
                    let active = controls
                        .iter()
                        .zip(control_values)
                        .all(|(&c, &v)| ((base >> (q - 1 - c)) & 1 == 1) == v);
                    if !active {
                        continue;
                    }
                    let idx_of = |tbits: usize| -> usize {
                        let mut i = base;
                        for (pos, &s) in strides.iter().enumerate() {
                            if (tbits >> (t - 1 - pos)) & 1 == 1 {
                                i |= s;
                            }
                        }
                        i
                    };
                    let old: Vec<C64> = (0..tdim).map(|tb| amps[idx_of(tb)]).collect();
                    for tout in 0..tdim {
                        let mut acc = ZERO;
                        for (tin, &a) in old.iter().enumerate() {
                            acc += op[(tout, tin)] * a;
                        }
                        amps[idx_of(tout)] = acc;
                    }
                }
            }
            Gate::Permutation { perm } => {
                let mut next = vec![ZERO; amps.len()];
                for (i, &p) in perm.iter().enumerate() {
                    next[p] = amps[i];
                }
                *amps = next;
            }
            Gate::Diagonal { wires, phases } => {
                for (b, amp) in amps.iter_mut().enumerate() {
                    let mut idx = 0usize;
                    for (pos, &w) in wires.iter().enumerate() {
                        idx |= ((b >> (q - 1 - w)) & 1) << (wires.len() - 1 - pos);
                    }
                    *amp *= phases[idx];
                }
            }
            Gate::Qft { lo, hi, inverse } => {
                for g in qft_gate_list(self.num_qubits, *lo, *hi, *inverse) {
                    self.apply_gate(&g, amps)?;
                }
            }
        }
        Ok(())
    }

    /// Exact outcome distribution for a density matrix embedded as `ρ ⊕ 0`.
    pub fn outcome_probabilities(&self, rho: &ComplexMatrix) -> Result<Vec<f64>> {
        let d = rho.rows();
        let dim = self.dimension();
        if !rho.is_square() || d > dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: d,
            });
        }
        let (vals, vecs) = hermitian_eigen(rho)?;
        let mut probs = vec![0.0f64; dim];
        for (idx, &w) in vals.iter().enumerate() {
            if w < 1e-15 {
                continue;
            }
            let mut state = vec![ZERO; dim];
            for i in 0..d {
                state[i] = vecs[(i, idx)];
            }
            let out = self.simulate(&state)?;
            for (p, amp) in probs.iter_mut().zip(&out) {
                *p += w * amp.norm_sqr();
            }
        }
        Ok(probs)
    }

    /// Sample computational-basis outcomes after applying the circuit to
    /// `ρ ⊕ 0`. Deterministic for a fixed seed.
    pub fn sample(&self, rho: &ComplexMatrix, shots: usize, seed: u64) -> Result<Vec<usize>> {
        let probs = self.outcome_probabilities(rho)?;
        let total: f64 = probs.iter().sum();
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in &probs {
            acc += p.max(0.0) / total;
            cumulative.push(acc);
        }
        let mut rng = SeededRng::new(seed);
        let mut counts = vec![0usize; probs.len()];
        for _ in 0..shots {
            let u = rng.uniform();
            let k = cumulative.partition_point(|&c| c <= u);
            counts[k.min(probs.len() - 1)] += 1;
        }
        Ok(counts)
    }

    /// Number of elementary gates after lowering macros: a QFT on k wires
    /// costs `k(k+1)/2 + floor(k/2)`, a controlled diagonal its non-trivial
    /// single-qubit phase factors, everything else 1.
    pub fn elementary_gate_count(&self) -> usize {
        self.gates
            .iter()
            .map(|g| match g {
                Gate::SingleQubit { .. } => 1,
                Gate::Permutation { .. } => 1,
                Gate::Qft { lo, hi, .. } => {
                    let k = hi - lo + 1;
                    k * (k + 1) / 2 + k / 2
                }
                Gate::Diagonal { wires, phases } => diagonal_cost(wires.len(), phases),
                Gate::Controlled { targets, op, .. } => {
                    if targets.len() == 1 {
                        1
                    } else if is_diagonal(op) {
                        let phases: Vec<C64> = (0..op.rows()).map(|i| op[(i, i)]).collect();
                        diagonal_cost(targets.len(), &phases)
                    } else {
                        // Dense multi-wire block: account for its generic
                        // two-level decomposition scale.
                        let dim = 1usize << targets.len();
                        dim * dim
                    }
                }
            })
            .sum()
    }
}

fn is_diagonal(m: &ComplexMatrix) -> bool {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if i != j && m[(i, j)].norm() > 1e-12 {
                return false;
            }
        }
    }
    true
}

/// Cost of a diagonal on t wires: the number of non-identity single-qubit
/// phase factors when the diagonal is a Kronecker product of phase gates,
/// else all 2^t - 1 relative phases.
fn diagonal_cost(t: usize, phases: &[C64]) -> usize {
    if (phases[0] - ONE).norm() < 1e-9 {
        let factors: Vec<C64> = (0..t).map(|pos| phases[1usize << (t - 1 - pos)]).collect();
        let mut ok = true;
        'check: for (x, &p) in phases.iter().enumerate() {
            let mut prod = ONE;
            for (pos, &f) in factors.iter().enumerate() {
                if (x >> (t - 1 - pos)) & 1 == 1 {
                    prod *= f;
                }
            }
            if (prod - p).norm() > 1e-9 {
                ok = false;
                break 'check;
            }
        }
        if ok {
            return factors
                .iter()
                .filter(|f| (**f - ONE).norm() > 1e-12)
                .count()
                .max(1);
        }
    }
    (1usize << t) - 1
}

/// The standard QFT gate list on wires `lo..=hi`: Hadamards, controlled
/// phases and the bit-reversal swaps. The expansion equals `fourier(2^k)`
/// (or its adjoint).
pub fn qft_gate_list(num_qubits: usize, lo: usize, hi: usize, inverse: bool) -> Vec<Gate> {
    let k = hi - lo + 1;
    let mut gates: Vec<Gate> = Vec::new();
    for i in 0..k {
        gates.push(Gate::SingleQubit {
            wire: lo + i,
            matrix: hadamard(),
        });
        for j in (i + 1)..k {
            let theta = TAU / (1u64 << (j - i + 1)) as f64;
            gates.push(Gate::Controlled {
                controls: vec![lo + j],
                control_values: vec![true],
                targets: vec![lo + i],
                op: phase_gate(theta),
            });
        }
    }
    for i in 0..k / 2 {
        gates.push(swap_gate(num_qubits, lo + i, lo + k - 1 - i));
    }
    if inverse {
        gates.reverse();
        for g in gates.iter_mut() {
            if let Gate::Controlled { op, .. } = g {
                *op = op.adjoint();
            }
        }
    }
    gates
}

fn swap_gate(num_qubits: usize, a: usize, b: usize) -> Gate {
    let q = num_qubits;
    let perm: Vec<usize> = (0..1usize << q)
        .map(|i| {
            let ba = (i >> (q - 1 - a)) & 1;
            let bb = (i >> (q - 1 - b)) & 1;
            let mut j = i & !(1 << (q - 1 - a)) & !(1 << (q - 1 - b));
            j |= bb << (q - 1 - a);
            j |= ba << (q - 1 - b);
            j
        })
        .collect();
    Gate::Permutation { perm }
}

/// The inverse-QFT circuit measuring the cyclic-family POVM on `n = 2^k`
/// outcomes: explicit Hadamards, controlled phases and swaps whose product
/// is `F_n†`.
pub fn build_cyclic_circuit(n: usize, d: usize) -> Result<Circuit> {
    if !is_power_of_two(n) || n < 2 {
        return Err(Error::UnsupportedParameter(format!(
            "cyclic circuit needs n = 2^k >= 2, got n={n}"
        )));
    }
    if d > n {
        return Err(Error::UnsupportedParameter(format!(
            "cyclic circuit needs d <= n, got d={d}"
        )));
    }
    let k = n.trailing_zeros() as usize;
    let mut c = Circuit::new(k);
    for gate in qft_gate_list(k, 0, k - 1, true) {
        c.push(gate);
    }
    Ok(c)
}

/// The dihedral-family measurement circuit on `1 + k` qubits
/// (`m = 2^k >= 4`): the two-level block `A†` on the top qubit, the
/// complement permutation as a bottom-controlled CX fan, and the QFT on the
/// lower `k` wires.
pub fn build_dihedral_circuit(m: usize, alpha: C64, beta: C64) -> Result<Circuit> {
    if !is_power_of_two(m) || m < 4 {
        return Err(Error::UnsupportedParameter(format!(
            "dihedral circuit needs m = 2^k >= 4, got m={m}"
        )));
    }
    let weight = alpha.norm_sqr() + beta.norm_sqr();
    if (weight - 1.0 / m as f64).abs() > 1e-9 {
        return Err(Error::NotNormalized {
            reason: format!("|alpha|^2 + |beta|^2 = {weight:.6}, expected 1/{m}"),
        });
    }
    let k = m.trailing_zeros() as usize;
    let mut c = Circuit::new(k + 1);
    let sqrt_m = Complex64::new((m as f64).sqrt(), 0.0);
    let a = ComplexMatrix::from_rows(&[
        vec![alpha * sqrt_m, beta * sqrt_m],
        vec![beta.conj() * sqrt_m, -alpha.conj() * sqrt_m],
    ]);
    c.single(0, a.adjoint());
    for w in 0..k {
        c.cx(k, w);
    }
    c.qft(1, k, false);
    Ok(c)
}

/// Initial-vector choice for the Weyl-Heisenberg circuit.
#[derive(Debug, Clone)]
pub enum WhVector {
    /// Any vector with `Σ|v_i|² = 1/m`; the first register's block becomes
    /// one dense gate.
    Explicit(Vec<C64>),
    /// The symmetric profile `(1, α, ..., α, 1)/√κ`, giving the fully
    /// elementary gate realization.
    AlphaProfile(C64),
}

/// The Weyl-Heisenberg measurement circuit on `2k` qubits: `A†` on the
/// first register, the diagonal Z as controlled clock powers, then the QFT
/// on register one and the inverse QFT on register two.
pub fn build_wh_circuit(m: usize, psi: &WhVector) -> Result<Circuit> {
    if !is_power_of_two(m) || m < 4 {
        return Err(Error::UnsupportedParameter(format!(
            "Weyl-Heisenberg circuit needs m = 2^k >= 4, got m={m}"
        )));
    }
    let k = m.trailing_zeros() as usize;
    let mut c = Circuit::new(2 * k);

    match psi {
        WhVector::AlphaProfile(alpha) => {
            let (_, a_circuit) = build_a_wh(*alpha, m)?;
            for gate in a_circuit.gates() {
                c.push(lift_gate(gate, &a_circuit, &c)?);
            }
        }
        WhVector::Explicit(v) => {
            if v.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: v.len(),
                });
            }
            let nsq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            if (nsq - 1.0 / m as f64).abs() > 1e-9 {
                return Err(Error::NotNormalized {
                    reason: format!("sum |v_i|^2 = {nsq:.6}, expected 1/{m}"),
                });
            }
            let a = wh_a_from_vector(m, v)?;
            c.push(Gate::Controlled {
                controls: vec![],
                control_values: vec![],
                targets: (0..k).collect(),
                op: a.adjoint(),
            });
        }
    }

    // Z stage: controlled T^{-2^i} with the control on the register-one
    // wire of bit significance 2^i, so the composite over register value j
    // applies T^{-j}.
    for i in 0..k {
        let power = (m - ((1usize << i) % m)) % m; // -2^i mod m
        let t_power: Vec<C64> = (0..m).map(|x| root_of_unity(m, power * x % m)).collect();
        c.push(Gate::Controlled {
            controls: vec![k - 1 - i],
            control_values: vec![true],
            targets: (k..2 * k).collect(),
            op: ComplexMatrix::diagonal(&t_power),
        });
    }

    c.qft(0, k - 1, false);
    c.qft(k, 2 * k - 1, true);
    Ok(c)
}

/// Re-home a gate built on a k-qubit circuit into a larger circuit whose
/// first k wires coincide.
fn lift_gate(gate: &Gate, from: &Circuit, to: &Circuit) -> Result<Gate> {
    Ok(match gate {
        Gate::Permutation { perm } => {
            let extra = to.num_qubits() - from.num_qubits();
            let tail = 1usize << extra;
            let mut lifted = vec![0usize; perm.len() * tail];
            for (i, &p) in perm.iter().enumerate() {
                for b in 0..tail {
                    lifted[i * tail + b] = p * tail + b;
                }
            }
            Gate::Permutation { perm: lifted }
        }
        other => other.clone(),
    })
}

/// The unitary `A` whose first row is `(√m v) F_m†`, completed
/// deterministically.
fn wh_a_from_vector(m: usize, v: &[C64]) -> Result<ComplexMatrix> {
    let sqrt_m = Complex64::new((m as f64).sqrt(), 0.0);
    let f_dag = fourier(m).adjoint();
    let mut row = ComplexMatrix::zeros(1, m);
    for b in 0..m {
        for (a, &va) in v.iter().enumerate() {
            row[(0, b)] += va * sqrt_m * f_dag[(a, b)];
        }
    }
    complete_to_unitary(&row, 1e-9, 1e-8)
}

/// The structured unitary `A = J† (B_{m/4} ⊗ ... ⊗ B_1 ⊗ B_0) J F_m†` for
/// the symmetric initial vector, together with a circuit implementing `A†`
/// on `k = log2(m)` qubits.
pub fn build_a_wh(alpha: C64, m: usize) -> Result<(ComplexMatrix, Circuit)> {
    if !is_power_of_two(m) || m < 4 {
        return Err(Error::UnsupportedParameter(format!(
            "A construction needs m = 2^k >= 4, got m={m}"
        )));
    }
    let k = m.trailing_zeros() as usize;

    let b_gate = |j: usize| -> ComplexMatrix {
        let aj = alpha.powu(j as u32);
        let norm = 1.0 / (1.0 + alpha.norm_sqr().powi(j as i32)).sqrt();
        ComplexMatrix::from_rows(&[
            vec![Complex64::new(norm, 0.0), aj * norm],
            vec![aj.conj() * norm, Complex64::new(-norm, 0.0)],
        ])
    };
    // Factors B_{m/4}, ..., B_2, B_1, B_0 from the top wire down.
    let factor_index = |w: usize| -> usize {
        if w == k - 1 {
            0
        } else {
            1usize << (k - 2 - w)
        }
    };
    let mut middle = b_gate(factor_index(0));
    for w in 1..k {
        middle = kron(&middle, &b_gate(factor_index(w)));
    }

    let jmat = families::wh_j_matrix(m);
    let a = jmat
        .adjoint()
        .mul(&middle)
        .mul(&jmat)
        .mul(&fourier(m).adjoint());

    // Circuit for A† = F_m J† (B† ⊗ ... ⊗ B†) J: the matrix J sends
    // |y> -> |jmap^{-1}(y)>.
    let jmap = families::wh_j_index_map(m);
    let mut jinv = vec![0usize; m];
    for (i, &ji) in jmap.iter().enumerate() {
        jinv[ji] = i;
    }
    let mut c = Circuit::new(k);
    c.push(Gate::Permutation { perm: jinv });
    for w in 0..k {
        c.single(w, b_gate(factor_index(w)).adjoint());
    }
    c.push(Gate::Permutation { perm: jmap });
    c.qft(0, k - 1, false);
    Ok((a, c))
}

/// The diagonal `Z = Σ_j |j><j| ⊗ T^{-j}` as a dense matrix, for tests and
/// verification.
pub fn wh_z_dense(m: usize) -> ComplexMatrix {
    let t = clock(m);
    let mut blocks: Vec<ComplexMatrix> = Vec::with_capacity(m);
    for j in 0..m {
        let mut tj = ComplexMatrix::identity(m);
        for _ in 0..(m - j) % m {
            tj = tj.mul(&t);
        }
        blocks.push(tj);
    }
    let mut acc = blocks[0].clone();
    for b in &blocks[1..] {
        acc = direct_sum(&acc, b);
    }
    acc
}

// ---------------------------------------------------------------------------
// Text format. One gate per line after a `qubits N` header:
//
//   H w | P w theta | U2 w a b c d e f g h | CX c t | CPHASE c t theta
//   CDIAG c t1 .. tk th1 .. th_{2^k} | PERM p0 p1 ... | QFT lo hi [inv]
//   DIAG t1 .. tk : th1 .. th_{2^k} | UN t1 .. tk : re im re im ...
//
// CDIAG/DIAG phases are angles in radians. DIAG and UN extend the core set:
// DIAG carries an uncontrolled diagonal, UN a dense unitary on a wire
// subset (synthesized measurements of non-power-of-two dimension need it).
// ---------------------------------------------------------------------------

fn fmt_f(x: f64) -> String {
    format!("{:.17e}", x)
}

/// Serialize a circuit to the native text format.
pub fn write_text(c: &Circuit) -> Result<String> {
    let mut out = format!("qubits {}\n", c.num_qubits());
    for gate in c.gates() {
        match gate {
            Gate::SingleQubit { wire, matrix } => {
                if matrix.approx_eq(&hadamard(), 1e-12) {
                    out.push_str(&format!("H {wire}\n"));
                } else if (matrix[(0, 0)] - ONE).norm() < 1e-12
                    && matrix[(0, 1)].norm() < 1e-12
                    && matrix[(1, 0)].norm() < 1e-12
                    && (matrix[(1, 1)].norm() - 1.0).abs() < 1e-12
                {
                    out.push_str(&format!("P {wire} {}\n", fmt_f(matrix[(1, 1)].arg())));
                } else {
                    let mut line = format!("U2 {wire}");
                    for i in 0..2 {
                        for j in 0..2 {
                            line.push_str(&format!(
                                " {} {}",
                                fmt_f(matrix[(i, j)].re),
                                fmt_f(matrix[(i, j)].im)
                            ));
                        }
                    }
                    out.push_str(&line);
                    out.push('\n');
                }
            }
            Gate::Controlled {
                controls,
                control_values,
                targets,
                op,
            } => {
                if controls.is_empty() {
                    if is_diagonal(op) {
                        let mut line = String::from("DIAG");
                        for t in targets {
                            line.push_str(&format!(" {t}"));
                        }
                        line.push_str(" :");
                        for i in 0..op.rows() {
                            line.push_str(&format!(" {}", fmt_f(op[(i, i)].arg())));
                        }
                        out.push_str(&line);
                        out.push('\n');
                    } else {
                        let mut line = String::from("UN");
                        for t in targets {
                            line.push_str(&format!(" {t}"));
                        }
                        line.push_str(" :");
                        for i in 0..op.rows() {
                            for j in 0..op.cols() {
                                line.push_str(&format!(
                                    " {} {}",
                                    fmt_f(op[(i, j)].re),
                                    fmt_f(op[(i, j)].im)
                                ));
                            }
                        }
                        out.push_str(&line);
                        out.push('\n');
                    }
                } else if controls.len() == 1 && control_values[0] {
                    let ctrl = controls[0];
                    if targets.len() == 1 && op.approx_eq(&families::sigma_x(), 1e-12) {
                        out.push_str(&format!("CX {ctrl} {}\n", targets[0]));
                    } else if targets.len() == 1
                        && is_diagonal(op)
                        && (op[(0, 0)] - ONE).norm() < 1e-12
                    {
                        out.push_str(&format!(
                            "CPHASE {ctrl} {} {}\n",
                            targets[0],
                            fmt_f(op[(1, 1)].arg())
                        ));
                    } else if is_diagonal(op) {
                        let mut line = format!("CDIAG {ctrl}");
                        for t in targets {
                            line.push_str(&format!(" {t}"));
                        }
                        for i in 0..op.rows() {
                            line.push_str(&format!(" {}", fmt_f(op[(i, i)].arg())));
                        }
                        out.push_str(&line);
                        out.push('\n');
                    } else {
                        return Err(Error::Parse(
                            "controlled dense gates have no text form".into(),
                        ));
                    }
                } else {
                    return Err(Error::Parse("multi-control gates have no text form".into()));
                }
            }
            Gate::Permutation { perm } => {
                let mut line = String::from("PERM");
                for p in perm {
                    line.push_str(&format!(" {p}"));
                }
                out.push_str(&line);
                out.push('\n');
            }
            Gate::Diagonal { wires, phases } => {
                let mut line = String::from("DIAG");
                for w in wires {
                    line.push_str(&format!(" {w}"));
                }
                line.push_str(" :");
                for p in phases {
                    line.push_str(&format!(" {}", fmt_f(p.arg())));
                }
                out.push_str(&line);
                out.push('\n');
            }
            Gate::Qft { lo, hi, inverse } => {
                if *inverse {
                    out.push_str(&format!("QFT {lo} {hi} inv\n"));
                } else {
                    out.push_str(&format!("QFT {lo} {hi}\n"));
                }
            }
        }
    }
    Ok(out)
}

fn parse_usize(tok: &str) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| Error::Parse(format!("expected an integer, got '{tok}'")))
}

fn parse_f64(tok: &str) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| Error::Parse(format!("expected a number, got '{tok}'")))
}

/// Parse the native text format.
pub fn parse_text(text: &str) -> Result<Circuit> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty circuit file".into()))?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("qubits") {
        return Err(Error::Parse("first line must be 'qubits N'".into()));
    }
    let q = parse_usize(
        toks.next()
            .ok_or_else(|| Error::Parse("missing qubit count".into()))?,
    )?;
    let mut circuit = Circuit::new(q);

    for line in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "H" => {
                if toks.len() != 2 {
                    return Err(Error::Parse(format!("bad H line: '{line}'")));
                }
                circuit.h(parse_usize(toks[1])?);
            }
            "P" => {
                if toks.len() != 3 {
                    return Err(Error::Parse(format!("bad P line: '{line}'")));
                }
                circuit.phase(parse_usize(toks[1])?, parse_f64(toks[2])?);
            }
            "U2" => {
                if toks.len() != 10 {
                    return Err(Error::Parse(format!("bad U2 line: '{line}'")));
                }
                let w = parse_usize(toks[1])?;
                let vals: Vec<f64> = toks[2..]
                    .iter()
                    .map(|t| parse_f64(t))
                    .collect::<Result<_>>()?;
                let m = ComplexMatrix::from_rows(&[
                    vec![
                        Complex64::new(vals[0], vals[1]),
                        Complex64::new(vals[2], vals[3]),
                    ],
                    vec![
                        Complex64::new(vals[4], vals[5]),
                        Complex64::new(vals[6], vals[7]),
                    ],
                ]);
                circuit.single(w, m);
            }
            "CX" => {
                if toks.len() != 3 {
                    return Err(Error::Parse(format!("bad CX line: '{line}'")));
                }
                circuit.cx(parse_usize(toks[1])?, parse_usize(toks[2])?);
            }
            "CPHASE" => {
                if toks.len() != 4 {
                    return Err(Error::Parse(format!("bad CPHASE line: '{line}'")));
                }
                circuit.cphase(
                    parse_usize(toks[1])?,
                    parse_usize(toks[2])?,
                    parse_f64(toks[3])?,
                );
            }
            "CDIAG" => {
                // Token count after the control: k + 2^k determines k >= 1.
                let rest = toks.len() - 2;
                let mut k = 1usize;
                loop {
                    if k + (1usize << k) == rest {
                        break;
                    }
                    if k + (1usize << k) > rest {
                        return Err(Error::Parse(format!("bad CDIAG arity: '{line}'")));
                    }
                    k += 1;
                }
                let ctrl = parse_usize(toks[1])?;
                let targets: Vec<usize> = toks[2..2 + k]
                    .iter()
                    .map(|t| parse_usize(t))
                    .collect::<Result<_>>()?;
                let phases: Vec<C64> = toks[2 + k..]
                    .iter()
                    .map(|t| parse_f64(t).map(|th| Complex64::from_polar(1.0, th)))
                    .collect::<Result<_>>()?;
                circuit.push(Gate::Controlled {
                    controls: vec![ctrl],
                    control_values: vec![true],
                    targets,
                    op: ComplexMatrix::diagonal(&phases),
                });
            }
            "PERM" => {
                let perm: Vec<usize> = toks[1..]
                    .iter()
                    .map(|t| parse_usize(t))
                    .collect::<Result<_>>()?;
                circuit.push(Gate::Permutation { perm });
            }
            "QFT" => {
                if toks.len() != 3 && toks.len() != 4 {
                    return Err(Error::Parse(format!("bad QFT line: '{line}'")));
                }
                let inverse = toks.len() == 4 && toks[3] == "inv";
                circuit.qft(parse_usize(toks[1])?, parse_usize(toks[2])?, inverse);
            }
            "DIAG" => {
                let sep = toks
                    .iter()
                    .position(|&t| t == ":")
                    .ok_or_else(|| Error::Parse(format!("DIAG needs ':' separator: '{line}'")))?;
                let wires: Vec<usize> = toks[1..sep]
                    .iter()
                    .map(|t| parse_usize(t))
                    .collect::<Result<_>>()?;
                let phases: Vec<C64> = toks[sep + 1..]
                    .iter()
                    .map(|t| parse_f64(t).map(|th| Complex64::from_polar(1.0, th)))
                    .collect::<Result<_>>()?;
                circuit.push(Gate::Diagonal { wires, phases });
            }
            "UN" => {
                let sep = toks
                    .iter()
                    .position(|&t| t == ":")
                    .ok_or_else(|| Error::Parse(format!("UN needs ':' separator: '{line}'")))?;
                let targets: Vec<usize> = toks[1..sep]
                    .iter()
                    .map(|t| parse_usize(t))
                    .collect::<Result<_>>()?;
                let dim = 1usize << targets.len();
                let vals: Vec<f64> = toks[sep + 1..]
                    .iter()
                    .map(|t| parse_f64(t))
                    .collect::<Result<_>>()?;
                if vals.len() != 2 * dim * dim {
                    return Err(Error::Parse(format!(
                        "UN expects {} reals, got {}",
                        2 * dim * dim,
                        vals.len()
                    )));
                }
                let op = ComplexMatrix::from_fn(dim, dim, |i, j| {
                    let base = 2 * (i * dim + j);
                    Complex64::new(vals[base], vals[base + 1])
                });
                circuit.push(Gate::Controlled {
                    controls: vec![],
                    control_values: vec![],
                    targets,
                    op,
                });
            }
            other => return Err(Error::Parse(format!("unknown gate '{other}'"))),
        }
    }
    Ok(circuit)
}

/// Best-effort OpenQASM 2.0 export for interchange; the native text format
/// is normative. Gates without a QASM counterpart become comments.
pub fn write_qasm(c: &Circuit) -> String {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    out.push_str(&format!("qreg q[{}];\n", c.num_qubits()));
    for gate in c.gates() {
        match gate {
            Gate::SingleQubit { wire, matrix } => {
                if matrix.approx_eq(&hadamard(), 1e-12) {
                    out.push_str(&format!("h q[{wire}];\n"));
                } else if is_diagonal(matrix) && (matrix[(0, 0)] - ONE).norm() < 1e-12 {
                    out.push_str(&format!("u1({}) q[{wire}];\n", matrix[(1, 1)].arg()));
                } else {
                    // ZYZ angles for a generic 2x2 unitary.
                    let det = matrix[(0, 0)] * matrix[(1, 1)] - matrix[(0, 1)] * matrix[(1, 0)];
                    let phase = det.arg() / 2.0;
                    let su = matrix.scale(Complex64::from_polar(1.0, -phase));
                    let theta = 2.0 * su[(1, 0)].norm().atan2(su[(0, 0)].norm());
                    let lam_plus_phi = 2.0 * su[(1, 1)].arg();
                    let lam_minus_phi = -2.0 * su[(0, 1)].arg() - std::f64::consts::PI;
                    let lam = (lam_plus_phi + lam_minus_phi) / 2.0;
                    let phi = (lam_plus_phi - lam_minus_phi) / 2.0;
                    out.push_str(&format!("u3({theta},{phi},{lam}) q[{wire}];\n"));
                }
            }
            Gate::Controlled {
                controls,
                targets,
                op,
                ..
            } => {
                if controls.len() == 1 && targets.len() == 1 {
                    if op.approx_eq(&families::sigma_x(), 1e-12) {
                        out.push_str(&format!("cx q[{}],q[{}];\n", controls[0], targets[0]));
                        continue;
                    }
                    if is_diagonal(op) && (op[(0, 0)] - ONE).norm() < 1e-12 {
                        out.push_str(&format!(
                            "cu1({}) q[{}],q[{}];\n",
                            op[(1, 1)].arg(),
                            controls[0],
                            targets[0]
                        ));
                        continue;
                    }
                }
                out.push_str("// controlled block without a qelib1 counterpart\n");
            }
            Gate::Permutation { perm } => {
                // Emit swaps when the permutation is one; otherwise comment.
                let swaps = as_wire_swap(perm, c.num_qubits());
                match swaps {
                    Some((a, b)) => out.push_str(&format!("swap q[{a}],q[{b}];\n")),
                    None => out.push_str("// basis permutation without a qelib1 counterpart\n"),
                }
            }
            Gate::Diagonal { .. } => {
                out.push_str("// diagonal block without a qelib1 counterpart\n");
            }
            Gate::Qft { lo, hi, inverse } => {
                for g in qft_gate_list(c.num_qubits(), *lo, *hi, *inverse) {
                    let mut sub = Circuit::new(c.num_qubits());
                    sub.push(g);
                    let text = write_qasm(&sub);
                    for line in text.lines().skip(3) {
                        out.push_str(line);
                        out.push('\n');
                    }
                }
            }
        }
    }
    out
}

/// Detect whether a basis permutation is exactly a swap of two wires.
fn as_wire_swap(perm: &[usize], q: usize) -> Option<(usize, usize)> {
    for a in 0..q {
        for b in (a + 1)..q {
            let matches = perm.iter().enumerate().all(|(i, &p)| {
                let ba = (i >> (q - 1 - a)) & 1;
                let bb = (i >> (q - 1 - b)) & 1;
                let mut j = i & !(1 << (q - 1 - a)) & !(1 << (q - 1 - b));
                j |= bb << (q - 1 - a);
                j |= ba << (q - 1 - b);
                j == p
            });
            if matches {
                return Some((a, b));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{wh_povm, wh_symmetric_vector, wh_z_matrix};
    use crate::linalg::is_unitary;
    use crate::povm::defining_matrix;
    use crate::Tolerances;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn a_single_hadamard_is_the_two_point_fourier_transform() {
        let mut c = Circuit::new(1);
        c.h(0);
        assert!(c.expand().unwrap().approx_eq(&fourier(2), 1e-12));
    }

    #[test]
    fn sample_frequencies_obey_the_binomial_bound() {
        // For 1e5 shots, |freq_k - p_k| <= 4 sqrt(p_k (1 - p_k) / shots) + 1e-3
        // with a fixed seed. Exercised on an eight-outcome family circuit.
        let m = 4usize;
        let alpha = Complex64::new((0.3f64 / m as f64).sqrt(), 0.0);
        let beta = Complex64::new(0.0, (0.7f64 / m as f64).sqrt());
        let c = build_dihedral_circuit(m, alpha, beta).unwrap();
        let mut rng = crate::rng::SeededRng::new(5);
        let rho = rng.test_state(2);
        let p = c.outcome_probabilities(&rho).unwrap();
        let shots = 100_000usize;
        let counts = c.sample(&rho, shots, 9).unwrap();
        for (k, &count) in counts.iter().enumerate() {
            let freq = count as f64 / shots as f64;
            let bound = 4.0 * (p[k] * (1.0 - p[k]) / shots as f64).sqrt() + 1e-3;
            assert!(
                (freq - p[k]).abs() <= bound,
                "outcome {k}: |{freq} - {}| > {bound}",
                p[k]
            );
        }
    }

    #[test]
    fn qft_macro_expands_to_the_dft_matrix() {
        for k in 1..=3usize {
            let mut c = Circuit::new(k);
            c.qft(0, k - 1, false);
            let got = c.expand().unwrap();
            assert!(got.approx_eq(&fourier(1 << k), 1e-10), "k = {k}");
            let mut ci = Circuit::new(k);
            ci.qft(0, k - 1, true);
            assert!(ci
                .expand()
                .unwrap()
                .approx_eq(&fourier(1 << k).adjoint(), 1e-10));
        }
        // Embedded in a larger register.
        let mut c = Circuit::new(3);
        c.qft(1, 2, false);
        let want = kron(&ComplexMatrix::identity(2), &fourier(4));
        assert!(c.expand().unwrap().approx_eq(&want, 1e-10));
    }

    #[test]
    fn identity_circuit_returns_the_input_state() {
        let c = Circuit::new(2);
        let state = vec![ONE, ZERO, ZERO, ZERO];
        assert_eq!(c.simulate(&state).unwrap(), state);
    }

    #[test]
    fn qft_on_zero_state_gives_the_uniform_superposition() {
        let mut c = Circuit::new(3);
        c.qft(0, 2, false);
        let mut state = vec![ZERO; 8];
        state[0] = ONE;
        let out = c.simulate(&state).unwrap();
        let want = Complex64::new(1.0 / 8.0f64.sqrt(), 0.0);
        for amp in out {
            assert!((amp - want).norm() < 1e-12);
        }
    }

    #[test]
    fn simulate_agrees_with_the_dense_expansion() {
        // A circuit exercising every gate kind.
        let mut c = Circuit::new(3);
        c.h(0);
        c.phase(2, 0.7);
        c.cx(0, 2);
        c.cphase(1, 2, -1.1);
        c.push(Gate::Controlled {
            controls: vec![0],
            control_values: vec![true],
            targets: vec![1, 2],
            op: ComplexMatrix::diagonal(&[
                ONE,
                Complex64::from_polar(1.0, 0.3),
                Complex64::from_polar(1.0, 0.9),
                Complex64::from_polar(1.0, -0.4),
            ]),
        });
        c.push(Gate::Diagonal {
            wires: vec![0, 1],
            phases: vec![
                ONE,
                Complex64::from_polar(1.0, 1.2),
                Complex64::from_polar(1.0, 0.1),
                Complex64::from_polar(1.0, 2.0),
            ],
        });
        c.swap(0, 2);
        c.qft(0, 2, true);
        let dense = c.expand().unwrap();
        assert!(is_unitary(&dense, 1e-9).unwrap());
        let mut rng = crate::rng::SeededRng::new(11);
        for _ in 0..20 {
            let state = rng.unit_vector(8);
            let fast = c.simulate(&state).unwrap();
            let slow = dense.mul_vec(&state);
            let dev: f64 = fast
                .iter()
                .zip(&slow)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(dev <= 1e-10, "deviation {dev}");
        }
    }

    #[test]
    fn cyclic_circuit_is_the_inverse_fourier_transform() {
        let mut c2 = build_cyclic_circuit(2, 2).unwrap();
        assert_eq!(c2.gates().len(), 1);
        assert!(c2.expand().unwrap().approx_eq(&fourier(2).adjoint(), 1e-10));
        let c8 = build_cyclic_circuit(8, 3).unwrap();
        assert!(c8.expand().unwrap().approx_eq(&fourier(8).adjoint(), 1e-10));
        assert_eq!(c8.gates().len(), 7); // 3 H + 3 CPHASE + 1 swap
        assert_eq!(c8.elementary_gate_count(), 7);
        let c32 = build_cyclic_circuit(32, 2).unwrap();
        assert_eq!(c32.gates().len(), 17); // k(k+1)/2 + floor(k/2) for k = 5
        let _ = c2.gates.pop();
        assert!(build_cyclic_circuit(3, 2).is_err());
    }

    #[test]
    fn dihedral_circuit_matches_the_closed_form() {
        for m in [4usize, 8] {
            let k = m.trailing_zeros() as usize;
            let alpha = Complex64::new((0.4 / m as f64).sqrt(), 0.0);
            let beta = Complex64::new(0.0, (0.6 / m as f64).sqrt());
            let c = build_dihedral_circuit(m, alpha, beta).unwrap();
            // Structure: one top-qubit gate, k controlled-X, one QFT block.
            assert_eq!(c.gates().len(), k + 2);
            assert!(matches!(c.gates()[0], Gate::SingleQubit { wire: 0, .. }));
            for w in 0..k {
                match &c.gates()[1 + w] {
                    Gate::Controlled {
                        controls,
                        targets,
                        op,
                        ..
                    } => {
                        assert_eq!(controls, &vec![k]);
                        assert_eq!(targets, &vec![w]);
                        assert!(op.approx_eq(&families::sigma_x(), 0.0));
                    }
                    other => panic!("expected CX, got {other:?}"),
                }
            }
            assert!(matches!(c.gates()[k + 1], Gate::Qft { inverse: false, .. }));

            // Expansion equals (I2 ⊗ F_m) Q (A† ⊗ I_m).
            let sqrt_m = Complex64::new((m as f64).sqrt(), 0.0);
            let a = ComplexMatrix::from_rows(&[
                vec![alpha * sqrt_m, beta * sqrt_m],
                vec![beta.conj() * sqrt_m, -alpha.conj() * sqrt_m],
            ]);
            let q = permutation_matrix(&families::dihedral_q_permutation(m)).unwrap();
            let want = kron(&ComplexMatrix::identity(2), &fourier(m))
                .mul(&q)
                .mul(&kron(&a.adjoint(), &ComplexMatrix::identity(m)));
            assert!(c.expand().unwrap().approx_eq(&want, 1e-9), "m = {m}");
        }
    }

    #[test]
    fn dihedral_circuit_measures_the_family_povm() {
        // The inverse-adjoint of the expansion must contain M as upper rows.
        let m = 4;
        let alpha = Complex64::new((1.0 / 8.0f64).sqrt(), 0.0);
        let beta = Complex64::new(0.1, (1.0f64 / 8.0 - 0.01).sqrt());
        let c = build_dihedral_circuit(m, alpha, beta).unwrap();
        let e = c.expand().unwrap();
        let tilde_m = e.adjoint();
        let povm = crate::families::dihedral_povm(m, alpha, beta, &tol()).unwrap();
        let want = defining_matrix(&povm);
        assert!(tilde_m.block(0, 0, 2, 2 * m).approx_eq(&want, 1e-9));
    }

    #[test]
    fn wh_z_stage_equals_the_direct_sum_of_clock_powers() {
        for m in [4usize, 8] {
            let k = m.trailing_zeros() as usize;
            let v = wh_symmetric_vector(m, Complex64::new(0.5, 0.0)).unwrap();
            let full = build_wh_circuit(m, &WhVector::Explicit(v)).unwrap();
            // Pick out the Z stage: the k controlled-diagonal gates.
            let mut z_stage = Circuit::new(2 * k);
            for gate in full.gates() {
                if let Gate::Controlled {
                    controls, targets, ..
                } = gate
                {
                    if controls.len() == 1 && targets.len() == k {
                        z_stage.push(gate.clone());
                    }
                }
            }
            assert_eq!(z_stage.gates().len(), k);
            let want = wh_z_matrix(m);
            assert!(z_stage.expand().unwrap().approx_eq(&want, 1e-9), "m = {m}");
            assert!(wh_z_dense(m).approx_eq(&want, 1e-12));
        }
    }

    #[test]
    fn wh_circuit_expansion_matches_the_dense_closed_form() {
        let m = 4;
        let alpha = Complex64::new(0.5, 0.0);
        let (a, _) = build_a_wh(alpha, m).unwrap();
        let c = build_wh_circuit(m, &WhVector::AlphaProfile(alpha)).unwrap();
        let f = fourier(m);
        let want = kron(&f, &f.adjoint())
            .mul(&wh_z_dense(m))
            .mul(&kron(&a.adjoint(), &ComplexMatrix::identity(m)));
        assert!(c.expand().unwrap().approx_eq(&want, 1e-9));
    }

    #[test]
    fn wh_circuit_measures_the_family_povm() {
        let m = 4;
        let alpha = Complex64::new(0.5, 0.2);
        let v = wh_symmetric_vector(m, alpha).unwrap();
        let povm = wh_povm(m, &v, &tol()).unwrap();
        let mdef = defining_matrix(&povm);
        for psi in [WhVector::AlphaProfile(alpha), WhVector::Explicit(v.clone())] {
            let c = build_wh_circuit(m, &psi).unwrap();
            let e = c.expand().unwrap();
            assert!(is_unitary(&e, 1e-9).unwrap());
            let tilde_m = e.adjoint();
            assert!(
                tilde_m.block(0, 0, m, m * m).approx_eq(&mdef, 1e-9),
                "upper rows differ for {psi:?}"
            );
        }
    }

    #[test]
    fn b0_is_the_hadamard() {
        let (_, _) = build_a_wh(Complex64::new(0.7, 0.0), 4).unwrap();
        // B_0 = (1/sqrt 2) [[1, 1], [1, -1]] regardless of alpha.
        let alpha = Complex64::new(0.7, 0.0);
        let norm = 1.0 / (1.0 + 1.0f64).sqrt();
        let b0 = ComplexMatrix::from_rows(&[
            vec![Complex64::new(norm, 0.0), alpha.powu(0) * norm],
            vec![alpha.powu(0).conj() * norm, Complex64::new(-norm, 0.0)],
        ]);
        assert!(b0.approx_eq(&hadamard(), 1e-12));
    }

    #[test]
    fn a_wh_middle_factor_matches_the_m4_display() {
        let alpha = Complex64::new(0.3, 0.4);
        let m = 4;
        let jmat = families::wh_j_matrix(m);
        let b1 = {
            let norm = 1.0 / (1.0 + alpha.norm_sqr()).sqrt();
            ComplexMatrix::from_rows(&[
                vec![Complex64::new(norm, 0.0), alpha * norm],
                vec![alpha.conj() * norm, Complex64::new(-norm, 0.0)],
            ])
        };
        let middle = jmat.adjoint().mul(&kron(&b1, &hadamard())).mul(&jmat);
        let s = 1.0 / (2.0 + 2.0 * alpha.norm_sqr()).sqrt();
        let sc = Complex64::new(s, 0.0);
        let want = ComplexMatrix::from_rows(&[
            vec![sc, alpha * s, alpha * s, sc],
            vec![alpha.conj() * s, -sc, -sc, alpha.conj() * s],
            vec![alpha.conj() * s, -sc, sc, -alpha.conj() * s],
            vec![sc, alpha * s, -alpha * s, -sc],
        ]);
        assert!(middle.approx_eq(&want, 1e-12));
    }

    #[test]
    fn a_wh_first_row_is_the_transformed_symmetric_vector() {
        for (m, alpha) in [
            (4usize, Complex64::new(0.7, 0.0)),
            (8, Complex64::new(0.7, 0.0)),
            (8, Complex64::new(0.4, 0.3)),
        ] {
            let (a, circuit) = build_a_wh(alpha, m).unwrap();
            assert!(is_unitary(&a, 1e-9).unwrap());
            let v = wh_symmetric_vector(m, alpha).unwrap();
            let sqrt_m = Complex64::new((m as f64).sqrt(), 0.0);
            let f_dag = fourier(m).adjoint();
            let mut want = vec![ZERO; m];
            for b in 0..m {
                for (i, &vi) in v.iter().enumerate() {
                    want[b] += vi * sqrt_m * f_dag[(i, b)];
                }
            }
            for b in 0..m {
                assert!((a[(0, b)] - want[b]).norm() < 1e-9, "m={m}, col {b}");
            }
            // The companion circuit implements A†.
            assert!(circuit.expand().unwrap().approx_eq(&a.adjoint(), 1e-9));
        }
    }

    #[test]
    fn wh_gate_counts_scale_quadratically() {
        let mut counts = Vec::new();
        for k in 2..=6usize {
            let m = 1usize << k;
            let c = build_wh_circuit(m, &WhVector::AlphaProfile(Complex64::new(0.6, 0.0))).unwrap();
            let count = c.elementary_gate_count();
            assert!(
                count <= 3 * k * k + 10 * k + 20,
                "k = {k}: count {count} exceeds the bound"
            );
            counts.push((k, count));
        }
        // The count grows, and the quadratic coefficient stays bounded.
        for w in counts.windows(2) {
            assert!(w[1].1 > w[0].1);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_converges() {
        let mut c = Circuit::new(1);
        c.h(0);
        let rho = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        let counts = c.sample(&rho, 100_000, 7).unwrap();
        let again = c.sample(&rho, 100_000, 7).unwrap();
        assert_eq!(counts, again);
        let f0 = counts[0] as f64 / 100_000.0;
        assert!((f0 - 0.5).abs() < 0.01);
        // A basis state of an orthogonal measurement: all shots on one
        // outcome.
        let ident = Circuit::new(1);
        let counts = ident.sample(&rho, 1000, 3).unwrap();
        assert_eq!(counts[0], 1000);
        assert_eq!(counts[1], 0);
    }

    #[test]
    fn text_round_trip_preserves_the_expansion() {
        let mut c = Circuit::new(3);
        c.h(0);
        c.phase(1, 0.37);
        c.single(
            2,
            ComplexMatrix::from_rows(&[
                vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)],
                vec![Complex64::new(0.0, 0.8), Complex64::new(0.6, 0.0)],
            ]),
        );
        c.cx(0, 1);
        c.cphase(0, 2, -0.9);
        c.push(Gate::Controlled {
            controls: vec![0],
            control_values: vec![true],
            targets: vec![1, 2],
            op: ComplexMatrix::diagonal(&[
                ONE,
                Complex64::from_polar(1.0, 0.5),
                Complex64::from_polar(1.0, 1.5),
                Complex64::from_polar(1.0, -2.5),
            ]),
        });
        c.swap(0, 2);
        c.qft(0, 1, true);
        c.push(Gate::Diagonal {
            wires: vec![2],
            phases: vec![ONE, Complex64::from_polar(1.0, 0.25)],
        });
        c.push(Gate::Controlled {
            controls: vec![],
            control_values: vec![],
            targets: vec![0, 1],
            op: fourier(4),
        });
        let text = write_text(&c).unwrap();
        let parsed = parse_text(&text).unwrap();
        assert_eq!(parsed.num_qubits(), 3);
        let a = c.expand().unwrap();
        let b = parsed.expand().unwrap();
        assert!(a.approx_eq(&b, 1e-12));
    }

    #[test]
    fn parse_rejects_malformed_input() {
        assert!(parse_text("").is_err());
        assert!(parse_text("qubits").is_err());
        assert!(parse_text("qubits 2\nH two").is_err());
        assert!(parse_text("qubits 2\nWAT 0").is_err());
        assert!(parse_text("qubits 2\nCDIAG 0 1").is_err());
        // Out-of-range wires surface on expansion.
        let c = parse_text("qubits 1\nH 3").unwrap();
        assert!(matches!(c.expand(), Err(Error::WireOutOfRange { .. })));
    }

    #[test]
    fn qasm_export_covers_the_standard_gates() {
        let mut c = Circuit::new(2);
        c.h(0);
        c.cphase(0, 1, 0.5);
        c.cx(0, 1);
        c.swap(0, 1);
        let qasm = write_qasm(&c);
        assert!(qasm.contains("OPENQASM 2.0"));
        assert!(qasm.contains("h q[0];"));
        assert!(qasm.contains("cu1(0.5) q[0],q[1];"));
        assert!(qasm.contains("cx q[0],q[1];"));
        assert!(qasm.contains("swap q[0],q[1];"));
    }
}
