//! Synthesis of group-covariant rank-one POVMs into orthogonal (von Neumann)
//! measurements on an enlarged space, and lowering of three group families
//! (cyclic, dihedral, Weyl-Heisenberg) to gate-level quantum circuits.
//!
//! The pipeline, end to end:
//!
//! 1. describe a POVM by its defining matrix `M` (columns = POVM vectors),
//! 2. detect or supply a symmetry group acting on the POVM operators,
//! 3. derive the monomial representation acting on the columns of `M`,
//! 4. decompose both representations into irreducibles,
//! 5. complete `C = U M W†` to a unitary inside the intertwining space,
//! 6. assemble the measurement transform `tilde-M = (U† ⊕ V†) tilde-C W`,
//! 7. for the three built-in families, emit an equivalent quantum circuit,
//! 8. verify everything against a brute-force probability oracle.
//!
//! Entry points: [`povm::RankOnePovm`], [`synth::synthesize`],
//! [`circuits::Circuit`], and the family builders in [`families`] and
//! [`circuits`]. Runnable demos live in the crate's `examples/` directory;
//! the `covneu` binary exposes the same pipeline as a small CLI.

pub mod circuits;
pub mod error;
pub mod families;
pub mod groups;
pub mod intertwine;
pub mod json;
pub mod linalg;
pub mod povm;
pub mod repdec;
pub mod rng;
pub mod synth;

pub use error::Error;
pub use linalg::{ComplexMatrix, C64};

/// Numerical tolerances used across the pipeline. All values are defaults
/// and can be overridden (the CLI reads `COVNEU_TOL` to rescale them).
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Max-abs deviation of `M M† - I` below which a matrix counts as unitary.
    pub unitary: f64,
    /// Residual norm below which a candidate basis vector is dropped during
    /// orthonormal completion, and the rank cutoff for singular values.
    pub rank: f64,
    /// Entrywise tolerance for group closure, homomorphism and phase checks.
    pub group: f64,
    /// Tolerance for POVM completeness and probability bookkeeping.
    pub povm: f64,
    /// Tolerance for decomposition block structure and intertwining relations.
    pub dec: f64,
    /// Frobenius distance below which two POVM operators count as duplicates.
    pub duplicate: f64,
    /// Relative eigenvalue gap for clustering in the decomposition.
    pub cluster: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            unitary: 1e-9,
            rank: 1e-8,
            group: 1e-8,
            povm: 1e-9,
            dec: 1e-7,
            duplicate: 1e-7,
            cluster: 1e-6,
        }
    }
}

impl Tolerances {
    /// Uniformly rescale every tolerance by `factor` relative to the defaults.
    pub fn scaled(factor: f64) -> Self {
        let d = Tolerances::default();
        Tolerances {
            unitary: d.unitary * factor,
            rank: d.rank * factor,
            group: d.group * factor,
            povm: d.povm * factor,
            dec: d.dec * factor,
            duplicate: d.duplicate * factor,
            cluster: d.cluster * factor,
        }
    }
}

/// Default seed for verification sampling.
pub const DEFAULT_VERIFY_SEED: u64 = 42;
/// Default seed for the randomized averaging in the decomposition.
pub const DEFAULT_DECOMPOSE_SEED: u64 = 0xC0FFEE;
