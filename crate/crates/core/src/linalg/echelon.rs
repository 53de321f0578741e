//! Sparse column-echelon (Hermite-style) elimination.
//!
//! One routine backs image membership, integral solving, kernel bases and
//! lattice comparisons. Column operations are unimodular, so pivot columns
//! span the image lattice exactly and zero columns of the transform span the
//! kernel lattice exactly (and that kernel is saturated).

use super::IntMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;

type SparseCol = BTreeMap<u32, BigInt>;

fn col_axpy(target: &mut SparseCol, q: &BigInt, source: &SparseCol) {
    // target -= q * source
    if q.is_zero() {
        return;
    }
    for (r, v) in source {
        let entry = target.entry(*r).or_insert_with(BigInt::zero);
        *entry -= q * v;
        if entry.is_zero() {
            target.remove(r);
        }
    }
}

fn negate_col(col: &mut SparseCol) {
    for v in col.values_mut() {
        *v = -&*v;
    }
}

/// Column echelon form of an integer matrix.
pub struct ColumnEchelon {
    rows: usize,
    source_cols: usize,
    /// Pivot columns in increasing pivot-row order; pivot value positive and
    /// the topmost nonzero of each column is its pivot row.
    pivots: Vec<(usize, SparseCol)>,
    /// Expression of each pivot column in source columns, when tracked.
    pivot_transforms: Option<Vec<SparseCol>>,
    /// Kernel lattice basis expressed in source columns, when tracked.
    kernel: Option<Vec<SparseCol>>,
}

impl ColumnEchelon {
    pub fn new(m: &IntMatrix) -> Self {
        Self::build(m, false)
    }

    pub fn with_transform(m: &IntMatrix) -> Self {
        Self::build(m, true)
    }

    fn build(m: &IntMatrix, track: bool) -> Self {
        // column-major working storage
        let mut cols: Vec<SparseCol> = vec![BTreeMap::new(); m.cols()];
        for (r, c, v) in m.triples() {
            cols[c].insert(r as u32, v.clone());
        }
        let mut transforms: Vec<SparseCol> = if track {
            (0..m.cols())
                .map(|j| {
                    let mut t = BTreeMap::new();
                    t.insert(j as u32, BigInt::from(1));
                    t
                })
                .collect()
        } else {
            Vec::new()
        };

        let mut active: Vec<usize> = (0..m.cols()).collect();
        let mut pivots: Vec<(usize, SparseCol)> = Vec::new();
        let mut pivot_transforms: Vec<SparseCol> = Vec::new();

        loop {
            // topmost row that still has a nonzero among active columns
            let row = active
                .iter()
                .filter_map(|&j| cols[j].keys().next().copied())
                .min();
            let Some(row) = row else { break };
            // columns hitting this row
            loop {
                let mut hits: Vec<usize> = active
                    .iter()
                    .copied()
                    .filter(|&j| cols[j].get(&row).is_some())
                    .collect();
                if hits.is_empty() {
                    break;
                }
                if hits.len() == 1 {
                    let j = hits[0];
                    active.retain(|&k| k != j);
                    let mut col = std::mem::take(&mut cols[j]);
                    let mut tr = if track {
                        std::mem::take(&mut transforms[j])
                    } else {
                        BTreeMap::new()
                    };
                    if col[&row].is_negative() {
                        negate_col(&mut col);
                        negate_col(&mut tr);
                    }
                    pivots.push((row as usize, col));
                    if track {
                        pivot_transforms.push(tr);
                    }
                    break;
                }
                // reduce every other hit by the one with smallest |entry|
                hits.sort_by(|&a, &b| {
                    let va = cols[a].get(&row).unwrap().abs();
                    let vb = cols[b].get(&row).unwrap().abs();
                    va.cmp(&vb).then(a.cmp(&b))
                });
                let acc = hits[0];
                let acc_val = cols[acc].get(&row).unwrap().clone();
                for &j in &hits[1..] {
                    let val = cols[j].get(&row).unwrap().clone();
                    // truncating quotient keeps |remainder| < |acc_val|
                    let q = &val / &acc_val;
                    if !q.is_zero() {
                        let acc_col = std::mem::take(&mut cols[acc]);
                        col_axpy(&mut cols[j], &q, &acc_col);
                        cols[acc] = acc_col;
                        if track {
                            let acc_tr = std::mem::take(&mut transforms[acc]);
                            col_axpy(&mut transforms[j], &q, &acc_tr);
                            transforms[acc] = acc_tr;
                        }
                    }
                }
            }
        }

        let kernel = if track {
            Some(
                active
                    .iter()
                    .filter(|&&j| cols[j].is_empty())
                    .map(|&j| transforms[j].clone())
                    .collect(),
            )
        } else {
            None
        };

        // pivot rows come out in increasing order by construction
        ColumnEchelon {
            rows: m.rows(),
            source_cols: m.cols(),
            pivots,
            pivot_transforms: if track { Some(pivot_transforms) } else { None },
            kernel,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduce v against the echelon columns. Returns the pivot-coefficients
    /// when v lies in the column lattice.
    fn reduce(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(v.len(), self.rows, "vector length mismatch");
        let mut work: SparseCol = v
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| (i as u32, x.clone()))
            .collect();
        let mut coeffs = vec![BigInt::zero(); self.pivots.len()];
        for (idx, (prow, pcol)) in self.pivots.iter().enumerate() {
            if let Some(val) = work.get(&(*prow as u32)) {
                let pval = pcol.get(&(*prow as u32)).unwrap();
                let (q, r) = val.div_rem(pval);
                if !r.is_zero() {
                    return None;
                }
                col_axpy(&mut work, &q, pcol);
                coeffs[idx] = q;
            }
        }
        if work.is_empty() {
            Some(coeffs)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.reduce(v).is_some()
    }

    /// Solve M x = v in source-column coordinates. Requires transform
    /// tracking.
    pub fn solve(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let coeffs = self.reduce(v)?;
        let transforms = self
            .pivot_transforms
            .as_ref()
            .expect("solve requires with_transform");
        let mut x = vec![BigInt::zero(); self.source_cols];
        for (q, tr) in coeffs.iter().zip(transforms) {
            if q.is_zero() {
                continue;
            }
            for (j, w) in tr {
                x[*j as usize] += q * w;
            }
        }
        Some(x)
    }

    /// Basis of the integer kernel lattice, as matrix columns. Requires
    /// transform tracking. The kernel of an integer matrix is saturated, so
    /// this basis spans a direct summand.
    pub fn kernel_basis(&self) -> IntMatrix {
        let kernel = self.kernel.as_ref().expect("kernel requires with_transform");
        let cols: Vec<Vec<BigInt>> = kernel
            .iter()
            .map(|col| {
                let mut v = vec![BigInt::zero(); self.source_cols];
                for (j, w) in col {
                    v[*j as usize] = w.clone();
                }
                v
            })
            .collect();
        IntMatrix::from_columns(self.source_cols, &cols)
    }

    /// Image lattice basis (the pivot columns), as matrix columns.
    pub fn image_basis(&self) -> IntMatrix {
        let cols: Vec<Vec<BigInt>> = self
            .pivots
            .iter()
            .map(|(_, col)| {
                let mut v = vec![BigInt::zero(); self.rows];
                for (r, w) in col {
                    v[*r as usize] = w.clone();
                }
                v
            })
            .collect();
        IntMatrix::from_columns(self.rows, &cols)
    }
}

/// An integer lattice in ZZ^n given by a generating set, with membership
/// queries against its echelon basis.
pub struct Lattice {
    ambient: usize,
    echelon: ColumnEchelon,
}

impl Lattice {
    pub fn from_generators(m: &IntMatrix) -> Self {
        Lattice { ambient: m.rows(), echelon: ColumnEchelon::new(m) }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.echelon.contains(v)
    }

    pub fn contains_all(&self, m: &IntMatrix) -> bool {
        assert_eq!(m.rows(), self.ambient);
        (0..m.cols()).all(|j| self.contains(&m.column(j)))
    }

    /// Lattice equality of two generating sets, by mutual membership.
    pub fn equals_generated_by(&self, other: &IntMatrix) -> bool {
        let other_lat = Lattice::from_generators(other);
        self.contains_all(other) && other_lat.contains_all(&self.echelon.image_basis())
    }

    /// True when the lattice is all of ZZ^n.
    pub fn is_full_unimodular(&self) -> bool {
        self.rank() == self.ambient
            && (0..self.ambient).all(|i| {
                let mut e = vec![BigInt::zero(); self.ambient];
                e[i] = BigInt::from(1);
                self.contains(&e)
            })
    }
}

#[cfg(test)]
mod tests {
    use super::super::big;
    use super::*;

    #[test]
    fn kernel_of_simple_matrix() {
        // kernel of [1 1 1] is rank 2, saturated
        let m = IntMatrix::from_dense(&[vec![1, 1, 1]]);
        let ech = ColumnEchelon::with_transform(&m);
        let k = ech.kernel_basis();
        assert_eq!(k.cols(), 2);
        for j in 0..2 {
            let col = k.column(j);
            assert!(m.apply(&col).iter().all(|v| v.is_zero()));
        }
    }

    #[test]
    fn solve_recovers_combinations() {
        let m = IntMatrix::from_dense(&[vec![2, 4], vec![6, 8]]);
        let target = m.apply(&[big(3), big(-2)]);
        let ech = ColumnEchelon::with_transform(&m);
        let x = ech.solve(&target).expect("solvable");
        assert_eq!(m.apply(&x), target);
    }

    #[test]
    fn lattice_equality_detects_index() {
        let a = IntMatrix::from_dense(&[vec![1, 0], vec![0, 2]]);
        let b = IntMatrix::from_dense(&[vec![1, 1], vec![0, 2]]);
        let c = IntMatrix::from_dense(&[vec![1, 0], vec![0, 4]]);
        assert!(Lattice::from_generators(&a).equals_generated_by(&b));
        assert!(!Lattice::from_generators(&a).equals_generated_by(&c));
    }

    #[test]
    fn rank_of_rank_deficient() {
        let m = IntMatrix::from_dense(&[vec![1, 2, 3], vec![2, 4, 6], vec![0, 0, 1]]);
        assert_eq!(ColumnEchelon::new(&m).rank(), 2);
    }
}
