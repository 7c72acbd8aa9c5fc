//! Finite matrix groups, ordinary and projective representations, and the
//! central-extension construction that turns a projective representation
//! into an ordinary one.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{unitary_deviation, ComplexMatrix, C64, ONE};
use crate::Tolerances;

/// A finite group realized as a closed set of unitary matrices.
///
/// Element 0 is always the identity. When `phase_quotient` is set, matrices
/// are identified modulo a global phase; every stored element is then in
/// canonical phase (first nonzero entry in row-major order real positive).
#[derive(Debug, Clone)]
pub struct MatrixGroup {
    dim: usize,
    elements: Vec<ComplexMatrix>,
    generator_words: Vec<Vec<usize>>,
    phase_quotient: bool,
    mul_table: Vec<usize>,
    inv_table: Vec<usize>,
}

const HASH_QUANTUM: f64 = 1e6;

fn quantized_key(m: &ComplexMatrix) -> Vec<(i64, i64)> {
    m.entries()
        .iter()
        .map(|z| {
            // The i64 cast folds -0.0 and +0.0 into the same bucket.
            (
                (z.re * HASH_QUANTUM).round() as i64,
                (z.im * HASH_QUANTUM).round() as i64,
            )
        })
        .collect()
}

/// Rotate a matrix so its first nonzero entry (row-major scan) is real
/// positive. Identifies matrices that differ by a global phase.
pub fn canonicalize_phase(m: &ComplexMatrix) -> ComplexMatrix {
    for &z in m.entries() {
        if z.norm() > 1e-9 {
            let phase = z / z.norm();
            return m.scale(phase.conj());
        }
    }
    m.clone()
}

struct ElementIndex {
    buckets: HashMap<Vec<(i64, i64)>, Vec<usize>>,
}

impl ElementIndex {
    fn new() -> Self {
        ElementIndex {
            buckets: HashMap::new(),
        }
    }

    fn insert(&mut self, m: &ComplexMatrix, idx: usize) {
        self.buckets.entry(quantized_key(m)).or_default().push(idx);
    }

    fn find(&self, m: &ComplexMatrix, elements: &[ComplexMatrix], tol: f64) -> Option<usize> {
        if let Some(bucket) = self.buckets.get(&quantized_key(m)) {
            for &idx in bucket {
                if elements[idx].max_abs_diff(m) <= tol {
                    return Some(idx);
                }
            }
        }
        // Quantization can split near-boundary entries into a neighboring
        // bucket; fall back to a scan so lookups stay correct.
        elements.iter().position(|e| e.max_abs_diff(m) <= tol)
    }
}

impl MatrixGroup {
    /// Breadth-first closure of the generating set. Element order is
    /// deterministic: identity first, then new elements as they are first
    /// reached, expanding each element by the generators in index order.
    pub fn generate(
        generators: &[ComplexMatrix],
        max_order: usize,
        phase_quotient: bool,
        tol: &Tolerances,
    ) -> Result<MatrixGroup> {
        if generators.is_empty() {
            return Err(Error::UnsupportedParameter(
                "at least one generator is required".into(),
            ));
        }
        let dim = generators[0].rows();
        for (i, g) in generators.iter().enumerate() {
            if g.rows() != dim || g.cols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: g.rows(),
                });
            }
            let dev = unitary_deviation(g)?;
            if dev > tol.unitary {
                return Err(Error::NonUnitaryGenerator {
                    index: i,
                    deviation: dev,
                });
            }
        }
        let canon = |m: &ComplexMatrix| -> ComplexMatrix {
            if phase_quotient {
                canonicalize_phase(m)
            } else {
                m.clone()
            }
        };
        let gens: Vec<ComplexMatrix> = generators.iter().map(&canon).collect();

        let mut elements = vec![canon(&ComplexMatrix::identity(dim))];
        let mut words: Vec<Vec<usize>> = vec![vec![]];
        let mut index = ElementIndex::new();
        index.insert(&elements[0], 0);

        let mut cursor = 0;
        while cursor < elements.len() {
            for (gi, g) in gens.iter().enumerate() {
                let prod = canon(&elements[cursor].mul(g));
                if index.find(&prod, &elements, tol.group).is_none() {
                    if elements.len() >= max_order {
                        return Err(Error::OrderExceeded { max_order });
                    }
                    let mut w = words[cursor].clone();
                    w.push(gi);
                    index.insert(&prod, elements.len());
                    elements.push(prod);
                    words.push(w);
                }
            }
            cursor += 1;
        }

        let order = elements.len();
        let mut mul_table = vec![0usize; order * order];
        for a in 0..order {
            for b in 0..order {
                let prod = canon(&elements[a].mul(&elements[b]));
                let idx = index.find(&prod, &elements, tol.group).ok_or_else(|| {
                    Error::Numerical("group closure failed under products".into())
                })?;
                mul_table[a * order + b] = idx;
            }
        }
        let mut inv_table = vec![0usize; order];
        for a in 0..order {
            let inv = canon(&elements[a].adjoint());
            inv_table[a] = index
                .find(&inv, &elements, tol.group)
                .ok_or_else(|| Error::Numerical("group not closed under inverses".into()))?;
        }

        Ok(MatrixGroup {
            dim,
            elements,
            generator_words: words,
            phase_quotient,
            mul_table,
            inv_table,
        })
    }

    /// Build a group from a complete, abstractly known element list. The
    /// caller supplies the multiplication table; used by the central
    /// extension where products are known exactly.
    fn from_parts(
        dim: usize,
        elements: Vec<ComplexMatrix>,
        generator_words: Vec<Vec<usize>>,
        mul_table: Vec<usize>,
    ) -> Result<MatrixGroup> {
        let order = elements.len();
        let mut inv_table = vec![usize::MAX; order];
        for a in 0..order {
            for b in 0..order {
                if mul_table[a * order + b] == 0 {
                    inv_table[a] = b;
                    break;
                }
            }
            if inv_table[a] == usize::MAX {
                return Err(Error::Numerical("element without inverse".into()));
            }
        }
        Ok(MatrixGroup {
            dim,
            elements,
            generator_words,
            phase_quotient: false,
            mul_table,
            inv_table,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn phase_quotient(&self) -> bool {
        self.phase_quotient
    }

    pub fn element(&self, idx: usize) -> &ComplexMatrix {
        &self.elements[idx]
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn word(&self, idx: usize) -> &[usize] {
        &self.generator_words[idx]
    }

    pub fn multiply(&self, a: usize, b: usize) -> usize {
        self.mul_table[a * self.order() + b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inv_table[a]
    }

    /// Index of the element whose generator word is exactly `[gi]`, i.e. the
    /// image of generator `gi` in the element list.
    pub fn generator_element(&self, gi: usize) -> Option<usize> {
        self.generator_words
            .iter()
            .position(|w| w.as_slice() == [gi])
    }

    /// Find an element by matrix, modulo phase when the group is a phase
    /// quotient.
    pub fn find(&self, m: &ComplexMatrix, tol: f64) -> Option<usize> {
        let target = if self.phase_quotient {
            canonicalize_phase(m)
        } else {
            m.clone()
        };
        self.elements
            .iter()
            .position(|e| e.max_abs_diff(&target) <= tol)
    }

    /// Multiplicative order of a single element.
    pub fn element_order(&self, idx: usize) -> usize {
        let mut acc = idx;
        let mut n = 1;
        while acc != 0 {
            acc = self.multiply(acc, idx);
            n += 1;
        }
        n
    }
}

/// An ordinary unitary representation: one image per group element.
#[derive(Debug, Clone)]
pub struct Representation {
    group: Arc<MatrixGroup>,
    images: Vec<ComplexMatrix>,
    degree: usize,
}

impl Representation {
    pub fn new(group: Arc<MatrixGroup>, images: Vec<ComplexMatrix>) -> Result<Representation> {
        if images.len() != group.order() {
            return Err(Error::DimensionMismatch {
                expected: group.order(),
                got: images.len(),
            });
        }
        let degree = images[0].rows();
        for img in &images {
            if img.rows() != degree || img.cols() != degree {
                return Err(Error::DimensionMismatch {
                    expected: degree,
                    got: img.rows(),
                });
            }
        }
        Ok(Representation {
            group,
            images,
            degree,
        })
    }

    /// The natural representation `g -> g` of a matrix group on its own
    /// space.
    pub fn natural(group: Arc<MatrixGroup>) -> Representation {
        let images = group.elements().to_vec();
        let degree = group.dim();
        Representation {
            group,
            images,
            degree,
        }
    }

    pub fn group(&self) -> &Arc<MatrixGroup> {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn image(&self, idx: usize) -> &ComplexMatrix {
        &self.images[idx]
    }

    pub fn images(&self) -> &[ComplexMatrix] {
        &self.images
    }

    /// Max deviation from the homomorphism property over all element pairs.
    pub fn homomorphism_deviation(&self) -> f64 {
        let n = self.group.order();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                let prod = self.images[a].mul(&self.images[b]);
                let dev = prod.max_abs_diff(&self.images[self.group.multiply(a, b)]);
                worst = worst.max(dev);
            }
        }
        worst
    }

    pub fn is_homomorphism(&self, tol: f64) -> bool {
        self.homomorphism_deviation() <= tol
    }

    pub fn character(&self) -> Vec<C64> {
        self.images.iter().map(|m| m.trace()).collect()
    }

    /// `U ρ(g) U†` for every element.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Representation {
        let images = self.images.iter().map(|m| m.conjugated_by(u)).collect();
        Representation {
            group: Arc::clone(&self.group),
            images,
            degree: u.rows(),
        }
    }

    /// Restriction to a subspace given by an isometry whose columns span it:
    /// `g -> V† ρ(g) V`.
    pub fn restricted(&self, v: &ComplexMatrix) -> Representation {
        let vd = v.adjoint();
        let images: Vec<ComplexMatrix> = self.images.iter().map(|m| vd.mul(m).mul(v)).collect();
        Representation {
            group: Arc::clone(&self.group),
            images,
            degree: v.cols(),
        }
    }

    /// Blockwise direct sum of two representations of the same group.
    pub fn direct_sum(&self, other: &Representation) -> Representation {
        assert!(Arc::ptr_eq(&self.group, &other.group));
        let images: Vec<ComplexMatrix> = self
            .images
            .iter()
            .zip(&other.images)
            .map(|(a, b)| crate::linalg::direct_sum(a, b))
            .collect();
        Representation {
            group: Arc::clone(&self.group),
            images,
            degree: self.degree + other.degree,
        }
    }

    /// Scalar product of characters `(1/|G|) Σ_g χ1(g) conj(χ2(g))`.
    pub fn character_inner(&self, other: &Representation) -> C64 {
        let n = self.group.order() as f64;
        self.character()
            .iter()
            .zip(other.character())
            .map(|(a, b)| a * b.conj())
            .sum::<C64>()
            / Complex64::new(n, 0.0)
    }

    /// Dimension of the commutant, `(1/|G|) Σ_g |χ(g)|²`. This equals the
    /// trace of the averaging projector over all matrix-unit seeds, so a
    /// value of 1 certifies irreducibility.
    pub fn commutant_dimension(&self) -> f64 {
        let n = self.group.order() as f64;
        self.character().iter().map(|z| z.norm_sqr()).sum::<f64>() / n
    }

    pub fn is_irreducible(&self, tol: f64) -> bool {
        (self.commutant_dimension() - 1.0).abs() <= tol
    }
}

/// Generate a matrix group by breadth-first closure.
pub fn generate_group(
    generators: &[ComplexMatrix],
    max_order: usize,
    phase_quotient: bool,
    tol: &Tolerances,
) -> Result<MatrixGroup> {
    MatrixGroup::generate(generators, max_order, phase_quotient, tol)
}

/// The degree-|G| permutation representation from left multiplication in the
/// stored element order.
pub fn regular_representation(group: &Arc<MatrixGroup>) -> Representation {
    let n = group.order();
    let images: Vec<ComplexMatrix> = (0..n)
        .map(|g| {
            let mut m = ComplexMatrix::zeros(n, n);
            for h in 0..n {
                m[(group.multiply(g, h), h)] = ONE;
            }
            m
        })
        .collect();
    Representation {
        group: Arc::clone(group),
        images,
        degree: n,
    }
}

/// A projective representation together with its factor system
/// `φ(g)φ(h) = γ_{g,h} φ(gh)`.
#[derive(Debug, Clone)]
pub struct ProjectiveRep {
    group: Arc<MatrixGroup>,
    images: Vec<ComplexMatrix>,
    factor_system: Vec<C64>,
}

fn first_nonzero(m: &ComplexMatrix) -> Option<(usize, usize)> {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if m[(i, j)].norm() > 1e-9 {
                return Some((i, j));
            }
        }
    }
    None
}

impl ProjectiveRep {
    /// Recover the factor system from raw images: `γ_{g,h}` is the ratio of
    /// `φ(g)φ(h)` to `φ(gh)` at the first nonzero entry of `φ(gh)`, verified
    /// entrywise afterwards.
    pub fn from_images(
        group: Arc<MatrixGroup>,
        images: Vec<ComplexMatrix>,
        tol: &Tolerances,
    ) -> Result<ProjectiveRep> {
        if images.len() != group.order() {
            return Err(Error::DimensionMismatch {
                expected: group.order(),
                got: images.len(),
            });
        }
        let n = group.order();
        let mut factor_system = vec![ONE; n * n];
        for g in 0..n {
            for h in 0..n {
                let prod = images[g].mul(&images[h]);
                let target = &images[group.multiply(g, h)];
                let (i, j) = first_nonzero(target).ok_or_else(|| {
                    Error::Numerical("projective image is the zero matrix".into())
                })?;
                let gamma = prod[(i, j)] / target[(i, j)];
                if (gamma.norm() - 1.0).abs() > tol.group {
                    return Err(Error::Numerical(format!(
                        "factor system entry has modulus {:.6}, expected 1",
                        gamma.norm()
                    )));
                }
                let dev = prod.max_abs_diff(&target.scale(gamma));
                if dev > tol.group {
                    return Err(Error::Numerical(format!(
                        "images do not form a projective representation (deviation {dev:.3e})"
                    )));
                }
                factor_system[g * n + h] = gamma;
            }
        }
        Ok(ProjectiveRep {
            group,
            images,
            factor_system,
        })
    }

    pub fn group(&self) -> &Arc<MatrixGroup> {
        &self.group
    }

    pub fn image(&self, idx: usize) -> &ComplexMatrix {
        &self.images[idx]
    }

    pub fn factor(&self, g: usize, h: usize) -> C64 {
        self.factor_system[g * self.group.order() + h]
    }
}

/// Result of the central extension: the extended group `Ĝ` of pairs
/// `(g, h)`, the ordinary representation `φ̃((g,h)) = h φ(g)`, and the index
/// of `(g, 1)` for each original element.
pub struct CentralExtension {
    pub group: Arc<MatrixGroup>,
    pub rep: Representation,
    pub lift: Vec<usize>,
}

/// Schur's central extension: absorbs the factor system of a projective
/// representation into a larger group on which `φ̃` is an ordinary
/// representation with `φ̃((g,1)) = φ(g)`.
pub fn central_extension(
    p: &ProjectiveRep,
    phase_bound: usize,
    tol: &Tolerances,
) -> Result<CentralExtension> {
    let g_order = p.group.order();

    // Close the phases generated by the factor system.
    let mut phases: Vec<C64> = vec![ONE];
    let find_phase = |phases: &[C64], z: C64| -> Option<usize> {
        phases.iter().position(|&p| (p - z).norm() <= tol.group)
    };
    let mut grew = true;
    while grew {
        grew = false;
        let snapshot = phases.clone();
        for &a in &snapshot {
            for g in 0..g_order {
                for h in 0..g_order {
                    let z = a * p.factor(g, h);
                    if find_phase(&phases, z).is_none() {
                        if phases.len() >= phase_bound {
                            return Err(Error::InfinitePhaseGroup { bound: phase_bound });
                        }
                        phases.push(z);
                        grew = true;
                    }
                }
            }
        }
    }
    let h_order = phases.len();

    // Pair (g, h) at index g * h_order + h; identity is (e, 1) at index 0.
    let order = g_order * h_order;
    let mut elements = Vec::with_capacity(order);
    for g in 0..g_order {
        for &phase in &phases {
            elements.push(p.images[g].scale(phase));
        }
    }
    let mut mul_table = vec![0usize; order * order];
    for g1 in 0..g_order {
        for h1 in 0..h_order {
            for g2 in 0..g_order {
                for h2 in 0..h_order {
                    let g12 = p.group.multiply(g1, g2);
                    let z = p.factor(g1, g2) * phases[h1] * phases[h2];
                    let h12 = find_phase(&phases, z)
                        .ok_or_else(|| Error::Numerical("phase group not closed".into()))?;
                    mul_table[(g1 * h_order + h1) * order + (g2 * h_order + h2)] =
                        g12 * h_order + h12;
                }
            }
        }
    }

    // Generator words by BFS over the abstract product, using the lifts of
    // the base group's generators followed by the pure phases.
    let mut gens: Vec<usize> = Vec::new();
    for gi in 0.. {
        match p.group.generator_element(gi) {
            Some(idx) => gens.push(idx * h_order),
            None => break,
        }
    }
    for h in 1..h_order {
        gens.push(h); // (e, phase)
    }
    let mut words: Vec<Option<Vec<usize>>> = vec![None; order];
    words[0] = Some(vec![]);
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(cur) = queue.pop_front() {
        for (gi, &gen) in gens.iter().enumerate() {
            let nxt = mul_table[cur * order + gen];
            if words[nxt].is_none() {
                let mut w = words[cur].clone().unwrap();
                w.push(gi);
                words[nxt] = Some(w);
                queue.push_back(nxt);
            }
        }
    }
    let words: Vec<Vec<usize>> = words
        .into_iter()
        .map(|w| w.ok_or_else(|| Error::Numerical("extension not generated".into())))
        .collect::<Result<_>>()?;

    let dim = p.images[0].rows();
    let group = Arc::new(MatrixGroup::from_parts(
        dim,
        elements.clone(),
        words,
        mul_table,
    )?);
    let rep = Representation::new(Arc::clone(&group), elements)?;
    let lift = (0..g_order).map(|g| g * h_order).collect();
    Ok(CentralExtension { group, rep, lift })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{clock, cyclic_shift, root_of_unity};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])
    }

    fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]])
    }

    #[test]
    fn weyl_heisenberg_m4_has_64_elements() {
        let g = generate_group(&[cyclic_shift(4), clock(4)], 1024, false, &tol()).unwrap();
        assert_eq!(g.order(), 64);
        assert_eq!(g.element(0).max_abs_diff(&ComplexMatrix::identity(4)), 0.0);
    }

    #[test]
    fn weyl_heisenberg_m4_phase_quotient_has_16_classes() {
        let g = generate_group(&[cyclic_shift(4), clock(4)], 1024, true, &tol()).unwrap();
        assert_eq!(g.order(), 16);
    }

    #[test]
    fn cyclic_diagonal_generator_gives_order_three() {
        let gen = ComplexMatrix::diagonal(&[ONE, root_of_unity(3, 1)]);
        let g = generate_group(&[gen], 64, false, &tol()).unwrap();
        assert_eq!(g.order(), 3);
    }

    #[test]
    fn order_bound_is_enforced() {
        let r = generate_group(&[cyclic_shift(4), clock(4)], 10, false, &tol());
        assert!(matches!(r, Err(Error::OrderExceeded { .. })));
    }

    #[test]
    fn non_unitary_generator_is_rejected() {
        let bad = ComplexMatrix::identity(2).scale(Complex64::new(2.0, 0.0));
        let r = generate_group(&[bad], 16, false, &tol());
        assert!(matches!(r, Err(Error::NonUnitaryGenerator { .. })));
    }

    #[test]
    fn element_orders_divide_group_order() {
        let g = generate_group(&[sigma_z(), sigma_x()], 64, false, &tol()).unwrap();
        assert_eq!(g.order(), 8);
        for idx in 0..g.order() {
            assert_eq!(g.order() % g.element_order(idx), 0);
        }
    }

    #[test]
    fn regular_representation_character_is_order_at_identity_zero_elsewhere() {
        let g = Arc::new(generate_group(&[sigma_z(), sigma_x()], 64, false, &tol()).unwrap());
        let reg = regular_representation(&g);
        assert_eq!(reg.degree(), 8);
        assert!(reg.is_homomorphism(1e-12));
        let chi = reg.character();
        assert!((chi[0].re - 8.0).abs() < 1e-12);
        for z in &chi[1..] {
            assert!(z.norm() < 1e-12);
        }
    }

    #[test]
    fn regular_representation_of_z3_is_a_three_cycle() {
        let gen = ComplexMatrix::diagonal(&[ONE, root_of_unity(3, 1), root_of_unity(3, 2)]);
        let g = Arc::new(generate_group(&[gen], 16, false, &tol()).unwrap());
        let reg = regular_representation(&g);
        // The image of the generator is a permutation matrix with a single
        // 3-cycle and no fixed points.
        let img = reg.image(g.generator_element(0).unwrap());
        for j in 0..3 {
            assert!(img[(j, j)].norm() < 1e-12);
        }
        assert!(reg.is_homomorphism(1e-12));
    }

    #[test]
    fn trivial_group_regular_representation() {
        let g = Arc::new(generate_group(&[ComplexMatrix::identity(1)], 4, false, &tol()).unwrap());
        let reg = regular_representation(&g);
        assert_eq!(reg.degree(), 1);
        assert_eq!(reg.image(0)[(0, 0)], ONE);
    }

    fn z2z2_label_group() -> Arc<MatrixGroup> {
        // (a, b) -> diag((-1)^a, (-1)^b): a faithful abelian realization.
        let a = ComplexMatrix::diagonal(&[ONE, -ONE]);
        let b = ComplexMatrix::diagonal(&[-ONE, ONE]);
        Arc::new(generate_group(&[a, b], 8, false, &tol()).unwrap())
    }

    fn pauli_projective() -> ProjectiveRep {
        let g = z2z2_label_group();
        // Element order from BFS: e, (0,1), (1,0), (1,1).
        let images = vec![
            ComplexMatrix::identity(2),
            sigma_z(),
            sigma_x(),
            sigma_z().mul(&sigma_x()),
        ];
        ProjectiveRep::from_images(g, images, &tol()).unwrap()
    }

    #[test]
    fn pauli_central_extension_is_dihedral_of_order_eight() {
        let p = pauli_projective();
        let ext = central_extension(&p, 64, &tol()).unwrap();
        assert_eq!(ext.group.order(), 8);
        assert!(ext.rep.is_homomorphism(1e-12));
        // φ̃((g,1)) = φ(g).
        for g in 0..4 {
            assert!(ext.rep.image(ext.lift[g]).approx_eq(p.image(g), 0.0));
        }
        // Non-abelian with exactly two elements of order four: D8, not Q8.
        let orders: Vec<usize> = (0..8).map(|i| ext.group.element_order(i)).collect();
        assert_eq!(orders.iter().filter(|&&o| o == 4).count(), 2);
        assert_eq!(orders.iter().filter(|&&o| o == 2).count(), 5);
    }

    #[test]
    fn trivial_factor_system_reproduces_the_group() {
        let g = z2z2_label_group();
        let images: Vec<ComplexMatrix> = g.elements().to_vec();
        let p = ProjectiveRep::from_images(Arc::clone(&g), images, &tol()).unwrap();
        let ext = central_extension(&p, 64, &tol()).unwrap();
        assert_eq!(ext.group.order(), 4);
        for g_idx in 0..4 {
            assert!(ext
                .rep
                .image(ext.lift[g_idx])
                .approx_eq(p.image(g_idx), 0.0));
        }
    }

    fn z4z4_label_group() -> Arc<MatrixGroup> {
        let i = Complex64::new(0.0, 1.0);
        let a = ComplexMatrix::diagonal(&[ONE, i]);
        let b = ComplexMatrix::diagonal(&[i, ONE]);
        Arc::new(generate_group(&[a, b], 32, false, &tol()).unwrap())
    }

    #[test]
    fn clock_shift_extension_has_order_m_cubed() {
        let g = z4z4_label_group();
        assert_eq!(g.order(), 16);
        // φ(a, b) = S^a T^b indexed by the label group's own words.
        let s = cyclic_shift(4);
        let t = clock(4);
        let images: Vec<ComplexMatrix> = (0..16)
            .map(|idx| {
                let mut acc = ComplexMatrix::identity(4);
                for &gi in g.word(idx) {
                    acc = acc.mul(if gi == 0 { &s } else { &t });
                }
                acc
            })
            .collect();
        let p = ProjectiveRep::from_images(Arc::clone(&g), images, &tol()).unwrap();
        let ext = central_extension(&p, 64, &tol()).unwrap();
        assert_eq!(ext.group.order(), 64);
        assert!(ext.rep.is_homomorphism(1e-10));
    }

    #[test]
    fn infinite_phase_group_is_detected() {
        // An irrational relative phase never closes.
        let g = z2z2_label_group();
        let theta = Complex64::from_polar(1.0, 1.0);
        let images = vec![
            ComplexMatrix::identity(2),
            sigma_z(),
            sigma_x().scale(theta),
            sigma_z().mul(&sigma_x()),
        ];
        let p = ProjectiveRep::from_images(g, images, &tol()).unwrap();
        assert!(matches!(
            central_extension(&p, 64, &tol()),
            Err(Error::InfinitePhaseGroup { .. })
        ));
    }
}
