//! Finitely presented abelian groups and their homomorphisms.

use super::{invariant_factors, smith_normal_form, ColumnEchelon, IntMatrix, Lattice};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::sync::{Arc, OnceLock};

/// Abelian group given by generators and a relation matrix whose columns are
/// relators. Isomorphic to the direct sum of Z/d_i over its invariant
/// factors, with Z/0 = Z.
pub struct PresentedAbelianGroup {
    generators: usize,
    relations: IntMatrix,
    normal: OnceLock<NormalForm>,
}

struct NormalForm {
    /// one entry per generator; d_i >= 0, divisibility chain, 0 = free
    factors: Vec<BigInt>,
    u: IntMatrix,
    u_inv: IntMatrix,
}

impl PresentedAbelianGroup {
    pub fn new(generators: usize, relations: IntMatrix) -> Self {
        assert_eq!(relations.rows(), generators, "relation rows = generators");
        PresentedAbelianGroup { generators, relations, normal: OnceLock::new() }
    }

    pub fn free(rank: usize) -> Self {
        Self::new(rank, IntMatrix::zero(rank, 0))
    }

    pub fn trivial() -> Self {
        Self::free(0)
    }

    /// Group with the given cyclic factors (0 for a free factor).
    pub fn from_factors(factors: &[i64]) -> Self {
        let n = factors.len();
        let rel = IntMatrix::from_triples(
            n,
            n,
            factors
                .iter()
                .enumerate()
                .filter(|(_, d)| **d != 0)
                .map(|(i, d)| (i, i, BigInt::from(*d))),
        );
        Self::new(n, rel)
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    fn normal_form(&self) -> &NormalForm {
        self.normal.get_or_init(|| {
            let snf = smith_normal_form(&self.relations);
            let mut factors = snf.diagonal();
            factors.resize(self.generators, BigInt::zero());
            NormalForm { factors, u: snf.u, u_inv: snf.u_inv }
        })
    }

    /// Invariant factors with the trivial ones dropped: torsion factors in
    /// ascending divisibility order, then one 0 per free summand.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let nf = self.normal_form();
        let mut torsion: Vec<BigInt> =
            nf.factors.iter().filter(|d| !d.is_zero() && !d.is_one()).cloned().collect();
        torsion.sort();
        let free = nf.factors.iter().filter(|d| d.is_zero()).count();
        torsion.extend(std::iter::repeat(BigInt::zero()).take(free));
        torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors().is_empty()
    }

    pub fn free_rank(&self) -> usize {
        self.normal_form().factors.iter().filter(|d| d.is_zero()).count()
    }

    /// Number of elements, when finite.
    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank() > 0 {
            return None;
        }
        Some(
            self.invariant_factors()
                .iter()
                .fold(BigInt::one(), |acc, d| acc * d),
        )
    }

    /// Canonical form of an element given in generator coordinates: entries
    /// along the diagonalized basis, reduced into [0, d_i) on torsion
    /// coordinates and zeroed on killed ones.
    pub fn reduce(&self, element: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(element.len(), self.generators, "coordinate length");
        let nf = self.normal_form();
        let mut c = nf.u.apply(element);
        for (x, d) in c.iter_mut().zip(&nf.factors) {
            if d.is_one() {
                *x = BigInt::zero();
            } else if !d.is_zero() {
                *x = x.mod_floor(d);
            }
        }
        c
    }

    pub fn is_zero_class(&self, element: &[BigInt]) -> bool {
        self.reduce(element).iter().all(|x| x.is_zero())
    }

    pub fn classes_equal(&self, a: &[BigInt], b: &[BigInt]) -> bool {
        self.reduce(a) == self.reduce(b)
    }

    /// Generator coordinates of the element with the given canonical form.
    pub fn lift(&self, canonical: &[BigInt]) -> Vec<BigInt> {
        let nf = self.normal_form();
        nf.u_inv.apply(canonical)
    }

    /// All classes of the torsion part, as generator-coordinate vectors.
    /// Panics if a free summand is present.
    pub fn enumerate_torsion(&self) -> Vec<Vec<BigInt>> {
        let nf = self.normal_form();
        assert_eq!(self.free_rank(), 0, "enumeration needs a finite group");
        let mut reps: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); self.generators]];
        for (i, d) in nf.factors.iter().enumerate() {
            if d.is_one() {
                continue;
            }
            let mut next = Vec::new();
            let bound: u64 = d.to_string().parse().expect("desk-scale torsion");
            for rep in &reps {
                for k in 0..bound {
                    let mut r = rep.clone();
                    r[i] = BigInt::from(k);
                    next.push(r);
                }
            }
            reps = next;
        }
        reps.into_iter().map(|c| self.lift(&c)).collect()
    }

    pub fn relation_lattice(&self) -> Lattice {
        Lattice::from_generators(&self.relations)
    }

    /// Presentation of the subgroup generated by the given columns, plus the
    /// inclusion matrix (which is just `gens` itself).
    pub fn subgroup(&self, gens: &IntMatrix) -> PresentedAbelianGroup {
        assert_eq!(gens.rows(), self.generators);
        let rels = solvability_lattice(gens, &self.relations);
        PresentedAbelianGroup::new(gens.cols(), rels)
    }
}

impl std::fmt::Debug for PresentedAbelianGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .invariant_factors()
            .iter()
            .map(|d| if d.is_zero() { "Z".to_string() } else { format!("Z/{}", d) })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Columns generating {x : M x lies in the column lattice of R}.
pub(crate) fn solvability_lattice(m: &IntMatrix, r: &IntMatrix) -> IntMatrix {
    assert_eq!(m.rows(), r.rows());
    let stacked = m.hstack(&r.neg());
    let ech = ColumnEchelon::with_transform(&stacked);
    let kernel = ech.kernel_basis();
    // project kernel columns onto the M block
    IntMatrix::from_triples(
        m.cols(),
        kernel.cols(),
        kernel
            .triples()
            .filter(|(row, _, _)| *row < m.cols())
            .map(|(row, col, v)| (row, col, v.clone())),
    )
}

/// Homomorphism of presented abelian groups, as a matrix on generators.
#[derive(Clone)]
pub struct AbHom {
    pub source: Arc<PresentedAbelianGroup>,
    pub target: Arc<PresentedAbelianGroup>,
    pub matrix: IntMatrix,
}

impl AbHom {
    /// Checks well-definedness: the matrix must map source relations into
    /// the target relation lattice.
    pub fn new(
        source: Arc<PresentedAbelianGroup>,
        target: Arc<PresentedAbelianGroup>,
        matrix: IntMatrix,
    ) -> Result<Self> {
        if matrix.cols() != source.generators() || matrix.rows() != target.generators() {
            return Err(Error::DimensionMismatch(format!(
                "hom matrix {}x{} between groups with {} and {} generators",
                matrix.rows(),
                matrix.cols(),
                source.generators(),
                target.generators()
            )));
        }
        let target_rels = target.relation_lattice();
        for j in 0..source.relations().cols() {
            let rel = source.relations().column(j);
            let image = matrix.apply(&rel);
            if !target_rels.contains(&image) {
                return Err(Error::InvalidInput(
                    "homomorphism does not respect source relations".into(),
                ));
            }
        }
        Ok(AbHom { source, target, matrix })
    }

    pub fn identity(group: Arc<PresentedAbelianGroup>) -> Self {
        let n = group.generators();
        AbHom { source: group.clone(), target: group, matrix: IntMatrix::identity(n) }
    }

    pub fn compose(&self, inner: &AbHom) -> Result<AbHom> {
        if inner.target.generators() != self.source.generators() {
            return Err(Error::DimensionMismatch("composition mismatch".into()));
        }
        AbHom::new(
            inner.source.clone(),
            self.target.clone(),
            self.matrix.mul(&inner.matrix),
        )
    }

    pub fn apply(&self, element: &[BigInt]) -> Vec<BigInt> {
        self.matrix.apply(element)
    }

    pub fn is_zero_map(&self) -> bool {
        (0..self.source.generators()).all(|j| {
            self.target.is_zero_class(&self.matrix.column(j))
        })
    }

    /// Generators of {x : f(x) = 0 in the target}, as columns in source
    /// generator coordinates.
    pub fn kernel_generators(&self) -> IntMatrix {
        let kernel = solvability_lattice(&self.matrix, self.target.relations());
        // classes killed by the source relations are also in the kernel
        kernel.hstack(self.source.relations())
    }

    /// Generators of the image subgroup, as columns in target coordinates
    /// (source relations contribute nothing new).
    pub fn image_generators(&self) -> IntMatrix {
        self.matrix.clone()
    }

    pub fn is_surjective(&self) -> bool {
        let span = self.matrix.hstack(self.target.relations());
        Lattice::from_generators(&span).is_full_unimodular()
    }

    pub fn is_injective(&self) -> bool {
        let kernel = solvability_lattice(&self.matrix, self.target.relations());
        let src_rels = self.source.relation_lattice();
        (0..kernel.cols()).all(|j| src_rels.contains(&kernel.column(j)))
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// Exactness at the middle of source --self--> middle --next--> target:
    /// ker(next) = im(self) as subgroups of the middle group.
    pub fn exact_at(&self, next: &AbHom) -> bool {
        let im = self.matrix.hstack(next.source.relations());
        let ker = next.kernel_generators();
        Lattice::from_generators(&im).equals_generated_by(&ker)
    }

    /// A deterministic preimage of the given class, if one exists.
    pub fn preimage(&self, element: &[BigInt]) -> Option<Vec<BigInt>> {
        // solve matrix * x + target_relations * y = element
        let stacked = self.matrix.hstack(self.target.relations());
        let ech = ColumnEchelon::with_transform(&stacked);
        let sol = ech.solve(element)?;
        Some(sol[..self.source.generators()].to_vec())
    }
}

impl std::fmt::Debug for AbHom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "AbHom {:?} -> {:?} via {:?}",
            self.source.as_ref(),
            self.target.as_ref(),
            self.matrix
        )
    }
}

/// Invariant factors of a direct sum of presented groups.
pub fn direct_sum_factors(groups: &[&PresentedAbelianGroup]) -> Vec<BigInt> {
    let total: usize = groups.iter().map(|g| g.generators()).sum();
    let mut triples: Vec<(usize, usize, BigInt)> = Vec::new();
    let mut row_off = 0;
    let mut col_off = 0;
    for g in groups {
        for (r, c, v) in g.relations().triples() {
            triples.push((row_off + r, col_off + c, v.clone()));
        }
        row_off += g.generators();
        col_off += g.relations().cols();
    }
    let block = IntMatrix::from_triples(total, col_off, triples);
    let mut factors = invariant_factors(&block);
    factors.resize(total, BigInt::zero());
    let mut torsion: Vec<BigInt> =
        factors.iter().filter(|d| !d.is_zero() && !d.is_one()).cloned().collect();
    torsion.sort();
    let rank_used = factors.iter().filter(|d| !d.is_zero()).count();
    torsion.extend(std::iter::repeat(BigInt::zero()).take(total - rank_used));
    torsion
}

#[cfg(test)]
mod tests {
    use super::super::big;
    use super::*;

    #[test]
    fn cyclic_presentation() {
        let g = PresentedAbelianGroup::from_factors(&[4]);
        assert_eq!(g.invariant_factors(), vec![big(4)]);
        assert_eq!(g.order(), Some(big(4)));
        assert!(g.is_zero_class(&[big(8)]));
        assert!(!g.is_zero_class(&[big(6)]));
        assert!(g.classes_equal(&[big(1)], &[big(-3)]));
    }

    #[test]
    fn cokernel_of_multiplication() {
        // Z --(2)--> Z presents Z/2
        let g = PresentedAbelianGroup::new(1, IntMatrix::from_dense(&[vec![2]]));
        assert_eq!(g.invariant_factors(), vec![big(2)]);
        assert_eq!(g.enumerate_torsion().len(), 2);
    }

    #[test]
    fn hom_well_definedness() {
        let z4 = Arc::new(PresentedAbelianGroup::from_factors(&[4]));
        let z2 = Arc::new(PresentedAbelianGroup::from_factors(&[2]));
        // reduction Z/4 -> Z/2 is fine
        assert!(AbHom::new(z4.clone(), z2.clone(), IntMatrix::identity(1)).is_ok());
        // the other direction x -> x is not well defined
        assert!(AbHom::new(z2.clone(), z4.clone(), IntMatrix::identity(1)).is_err());
        // but multiplication by 2 is
        let dbl = AbHom::new(z2, z4, IntMatrix::from_dense(&[vec![2]])).unwrap();
        assert!(dbl.is_injective());
        assert!(!dbl.is_surjective());
    }

    #[test]
    fn direct_sum_of_torsion() {
        let a = PresentedAbelianGroup::from_factors(&[2]);
        let b = PresentedAbelianGroup::from_factors(&[3]);
        // Z/2 + Z/3 = Z/6
        assert_eq!(direct_sum_factors(&[&a, &b]), vec![big(6)]);
    }

    #[test]
    fn enumerate_and_reduce_roundtrip() {
        let g = PresentedAbelianGroup::new(
            2,
            IntMatrix::from_dense(&[vec![2, 0], vec![0, 3]]),
        );
        let reps = g.enumerate_torsion();
        assert_eq!(reps.len(), 6);
        for rep in &reps {
            let c = g.reduce(rep);
            let back = g.lift(&c);
            assert!(g.classes_equal(rep, &back));
        }
    }
}
