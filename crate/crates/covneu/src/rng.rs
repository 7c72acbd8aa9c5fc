//! Seeded randomness helpers. Every stochastic step in the crate goes through
//! a [`SeededRng`] so that runs are reproducible bit for bit.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::linalg::ComplexMatrix;

pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        // 53 random mantissa bits.
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller.
    pub fn normal(&mut self) -> f64 {
        let mut u1 = self.uniform();
        if u1 < 1e-300 {
            u1 = 1e-300;
        }
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn complex_normal(&mut self) -> Complex64 {
        Complex64::new(self.normal(), self.normal())
    }

    /// Random Hermitian matrix with entries of order one.
    pub fn hermitian(&mut self, n: usize) -> ComplexMatrix {
        let mut a = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = Complex64::new(self.normal(), 0.0);
            for j in (i + 1)..n {
                let z = 0.5 * self.complex_normal();
                a[(i, j)] = z;
                a[(j, i)] = z.conj();
            }
        }
        a
    }

    /// Haar-distributed unit vector in C^n.
    pub fn unit_vector(&mut self, n: usize) -> Vec<Complex64> {
        loop {
            let v: Vec<Complex64> = (0..n).map(|_| self.complex_normal()).collect();
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-12 {
                return v.into_iter().map(|z| z / norm).collect();
            }
        }
    }

    /// Mixed test state `0.9 |psi><psi| + 0.1 I/d` with Haar-random `psi`.
    pub fn test_state(&mut self, d: usize) -> ComplexMatrix {
        let psi = self.unit_vector(d);
        let mut rho = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                rho[(i, j)] = 0.9 * psi[i] * psi[j].conj();
            }
            rho[(i, i)] += Complex64::new(0.1 / d as f64, 0.0);
        }
        rho
    }
}
