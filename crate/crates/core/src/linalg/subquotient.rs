//! Homology of a two-step complex: ker(d_out) / im(d_in), with maps in and
//! out of the quotient (project a cycle to its class, lift a class to a
//! cycle).

use super::{
    invariant_factors, rank, ColumnEchelon, IntMatrix, PresentedAbelianGroup,
};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// ker(d_out)/im(d_in) with coordinates: ambient -> kernel basis -> classes.
pub struct Subquotient {
    ambient: usize,
    kernel: IntMatrix,
    kernel_solver: ColumnEchelon,
    group: PresentedAbelianGroup,
}

impl Subquotient {
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn group(&self) -> &PresentedAbelianGroup {
        &self.group
    }

    /// Kernel-basis coordinates of a cycle; errors if the vector is not in
    /// the kernel of d_out.
    pub fn cycle_coordinates(&self, cycle: &[BigInt]) -> Result<Vec<BigInt>> {
        self.kernel_solver.solve(cycle).ok_or_else(|| {
            Error::InvalidInput("vector is not a cycle of the complex".into())
        })
    }

    /// Canonical class form of a cycle.
    pub fn project(&self, cycle: &[BigInt]) -> Result<Vec<BigInt>> {
        Ok(self.group.reduce(&self.cycle_coordinates(cycle)?))
    }

    pub fn is_zero_class(&self, cycle: &[BigInt]) -> Result<bool> {
        Ok(self.project(cycle)?.iter().all(|x| x.is_zero()))
    }

    pub fn classes_equal(&self, a: &[BigInt], b: &[BigInt]) -> Result<bool> {
        Ok(self.project(a)? == self.project(b)?)
    }

    /// A cycle representing the class with the given canonical form.
    pub fn lift(&self, canonical: &[BigInt]) -> Vec<BigInt> {
        let coords = self.group.lift(canonical);
        self.kernel.apply(&coords)
    }

    /// Cycle representatives of every torsion class (the whole group when it
    /// is finite).
    pub fn enumerate_torsion_cycles(&self) -> Vec<Vec<BigInt>> {
        self.group
            .enumerate_torsion()
            .into_iter()
            .map(|coords| self.kernel.apply(&coords))
            .collect()
    }

    /// Cycles representing a generating set of the group.
    pub fn generator_cycles(&self) -> Vec<Vec<BigInt>> {
        (0..self.group.generators())
            .map(|j| self.kernel.column(j))
            .collect()
    }
}

pub struct Homology {
    pub subquotient: Subquotient,
}

/// Exact homology ker(d_out)/im(d_in). Checks d_out * d_in = 0.
pub fn homology_at(d_in: &IntMatrix, d_out: &IntMatrix) -> Result<Homology> {
    if d_in.rows() != d_out.cols() {
        return Err(Error::DimensionMismatch(format!(
            "d_in maps into rank {}, d_out maps out of rank {}",
            d_in.rows(),
            d_out.cols()
        )));
    }
    if !d_out.mul(d_in).is_zero_matrix() {
        return Err(Error::CompositionNotZero);
    }
    let ambient = d_in.rows();
    let ech = ColumnEchelon::with_transform(d_out);
    let kernel = ech.kernel_basis();
    let kernel_solver = ColumnEchelon::with_transform(&kernel);
    // express im(d_in) in kernel coordinates; solutions exist and are unique
    // because the kernel basis spans a saturated sublattice
    let mut rel_cols: Vec<Vec<BigInt>> = Vec::new();
    for j in 0..d_in.cols() {
        let col = d_in.column(j);
        let coords = kernel_solver.solve(&col).ok_or(Error::CompositionNotZero)?;
        rel_cols.push(coords);
    }
    let relations = IntMatrix::from_columns(kernel.cols(), &rel_cols);
    let group = PresentedAbelianGroup::new(kernel.cols(), relations);
    Ok(Homology {
        subquotient: Subquotient { ambient, kernel, kernel_solver, group },
    })
}

/// Invariant factors of ker(d_out)/im(d_in) without building the quotient:
/// the kernel of an integer matrix is a saturated sublattice, so the torsion
/// is read off the invariant factors of d_in alone, and the free rank from a
/// rank count. Suited to large sparse cochain matrices.
pub fn homology_invariant_factors(d_in: &IntMatrix, d_out: &IntMatrix) -> Result<Vec<BigInt>> {
    if d_in.rows() != d_out.cols() {
        return Err(Error::DimensionMismatch(
            "chain ranks disagree between d_in and d_out".into(),
        ));
    }
    let kernel_rank = d_out.cols() - rank(d_out);
    let inv = invariant_factors(d_in);
    let image_rank = inv.iter().filter(|d| !d.is_zero()).count();
    let mut torsion: Vec<BigInt> =
        inv.into_iter().filter(|d| !d.is_zero() && !d.abs().eq(&BigInt::from(1))).collect();
    torsion.sort();
    torsion.extend(std::iter::repeat(BigInt::zero()).take(kernel_rank - image_rank));
    Ok(torsion)
}

/// Dense linear algebra mod p for coefficient complexes reduced mod a prime;
/// carries the same project/lift interface as the integral subquotient.
pub struct FpSubquotient {
    p: u64,
    ambient: usize,
    /// columns: basis of ker(d_out) mod p
    kernel: Vec<Vec<u64>>,
    /// echelon form of im(d_in) in kernel coordinates, with pivot columns
    image_echelon: Vec<Vec<u64>>,
    image_pivots: Vec<usize>,
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // p is prime and small; Fermat
    let mut result: u64 = 1;
    let mut base = a % p;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    result
}

fn reduce_mod(v: &BigInt, p: u64) -> u64 {
    let m = v.mod_floor_u64(p);
    m
}

trait ModFloorU64 {
    fn mod_floor_u64(&self, p: u64) -> u64;
}

impl ModFloorU64 for BigInt {
    fn mod_floor_u64(&self, p: u64) -> u64 {
        use num_integer::Integer;
        let m = self.mod_floor(&BigInt::from(p));
        let digits = m.to_u64_digits().1;
        digits.first().copied().unwrap_or(0)
    }
}

impl FpSubquotient {
    pub fn new(d_in: &IntMatrix, d_out: &IntMatrix, p: u64) -> Result<Self> {
        if d_in.rows() != d_out.cols() {
            return Err(Error::DimensionMismatch(
                "chain ranks disagree between d_in and d_out".into(),
            ));
        }
        let ambient = d_in.rows();
        let out_dense = to_fp_dense(d_out, p);
        let kernel = fp_kernel(&out_dense, d_out.rows(), ambient, p);
        // express image columns in kernel coordinates by solving
        let mut img_cols: Vec<Vec<u64>> = Vec::new();
        let kernel_mat = transpose_cols(&kernel, ambient);
        for j in 0..d_in.cols() {
            let col: Vec<u64> = d_in.column(j).iter().map(|v| reduce_mod(v, p)).collect();
            let coords = fp_solve(&kernel_mat, &col, p)
                .ok_or(Error::CompositionNotZero)?;
            img_cols.push(coords);
        }
        let (image_echelon, image_pivots) = fp_column_echelon(img_cols, kernel.len(), p);
        Ok(FpSubquotient { p, ambient, kernel, image_echelon, image_pivots })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.kernel.len() - self.image_echelon.len()
    }

    pub fn group(&self) -> PresentedAbelianGroup {
        PresentedAbelianGroup::from_factors(&vec![self.p as i64; self.dim()])
    }

    /// Canonical form: kernel coordinates reduced against the image echelon.
    pub fn project(&self, cycle: &[BigInt]) -> Result<Vec<u64>> {
        let col: Vec<u64> = cycle.iter().map(|v| reduce_mod(v, self.p)).collect();
        let kernel_mat = transpose_cols(&self.kernel, self.ambient);
        let mut coords = fp_solve(&kernel_mat, &col, self.p)
            .ok_or_else(|| Error::InvalidInput("not a cycle mod p".into()))?;
        for (col, &pivot) in self.image_echelon.iter().zip(&self.image_pivots) {
            let factor = coords[pivot] % self.p;
            if factor != 0 {
                let inv = inv_mod(col[pivot], self.p);
                let scale = factor * inv % self.p;
                for (x, y) in coords.iter_mut().zip(col) {
                    *x = (*x + self.p * self.p - scale * y % (self.p * self.p)) % self.p;
                }
            }
        }
        Ok(coords)
    }

    pub fn is_zero_class(&self, cycle: &[BigInt]) -> Result<bool> {
        Ok(self.project(cycle)?.iter().all(|x| *x == 0))
    }

    pub fn classes_equal(&self, a: &[BigInt], b: &[BigInt]) -> Result<bool> {
        Ok(self.project(a)? == self.project(b)?)
    }

    /// Cycle representatives of every class (p^dim of them).
    pub fn enumerate_cycles(&self) -> Vec<Vec<BigInt>> {
        let free_positions: Vec<usize> = (0..self.kernel.len())
            .filter(|i| !self.image_pivots.contains(i))
            .collect();
        let mut reps: Vec<Vec<u64>> = vec![vec![0; self.kernel.len()]];
        for &pos in &free_positions {
            let mut next = Vec::new();
            for rep in &reps {
                for k in 0..self.p {
                    let mut r = rep.clone();
                    r[pos] = k;
                    next.push(r);
                }
            }
            reps = next;
        }
        reps.into_iter()
            .map(|coords| {
                let mut cycle = vec![BigInt::zero(); self.ambient];
                for (c, col) in coords.iter().zip(&self.kernel) {
                    if *c != 0 {
                        for (i, v) in col.iter().enumerate() {
                            cycle[i] += BigInt::from(c * v);
                        }
                    }
                }
                cycle
            })
            .collect()
    }

    pub fn generator_cycles(&self) -> Vec<Vec<BigInt>> {
        (0..self.kernel.len())
            .filter(|i| !self.image_pivots.contains(i))
            .map(|i| {
                self.kernel[i]
                    .iter()
                    .map(|v| BigInt::from(*v))
                    .collect()
            })
            .collect()
    }
}

fn to_fp_dense(m: &IntMatrix, p: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![0u64; m.cols()]; m.rows()];
    for (r, c, v) in m.triples() {
        out[r][c] = reduce_mod(v, p);
    }
    out
}

/// Kernel basis (as column vectors of length `cols`) of a dense matrix mod p.
fn fp_kernel(m: &[Vec<u64>], rows: usize, cols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut a: Vec<Vec<u64>> = m.to_vec();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut pivot_row = 0;
    for col in 0..cols {
        let mut sel = None;
        for r in pivot_row..rows {
            if a[r][col] % p != 0 {
                sel = Some(r);
                break;
            }
        }
        let Some(sel) = sel else { continue };
        a.swap(pivot_row, sel);
        let inv = inv_mod(a[pivot_row][col], p);
        for x in a[pivot_row].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..rows {
            if r != pivot_row && a[r][col] % p != 0 {
                let f = a[r][col];
                for c in 0..cols {
                    a[r][c] = (a[r][c] + p * p - f * a[pivot_row][c] % (p * p)) % p;
                }
            }
        }
        pivot_of_col[col] = Some(pivot_row);
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }
    let mut basis = Vec::new();
    for col in 0..cols {
        if pivot_of_col[col].is_some() {
            continue;
        }
        let mut v = vec![0u64; cols];
        v[col] = 1;
        for c in 0..cols {
            if let Some(pr) = pivot_of_col[c] {
                // value of pivot variable c: -a[pr][col]
                v[c] = (p - a[pr][col] % p) % p;
            }
        }
        basis.push(v);
    }
    basis
}

/// Dense matrix whose columns are the given vectors.
fn transpose_cols(cols: &[Vec<u64>], rows: usize) -> Vec<Vec<u64>> {
    let mut m = vec![vec![0u64; cols.len()]; rows];
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            m[i][j] = *v;
        }
    }
    m
}

/// Solve M x = v mod p for dense M; None when inconsistent.
fn fp_solve(m: &[Vec<u64>], v: &[u64], p: u64) -> Option<Vec<u64>> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut a: Vec<Vec<u64>> = m
        .iter()
        .zip(v)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(*b % p);
            r
        })
        .collect();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut pivot_row = 0;
    for col in 0..cols {
        let mut sel = None;
        for r in pivot_row..rows {
            if a[r][col] % p != 0 {
                sel = Some(r);
                break;
            }
        }
        let Some(sel) = sel else { continue };
        a.swap(pivot_row, sel);
        let inv = inv_mod(a[pivot_row][col], p);
        for x in a[pivot_row].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..rows {
            if r != pivot_row && a[r][col] % p != 0 {
                let f = a[r][col];
                for c in 0..=cols {
                    a[r][c] = (a[r][c] + p * p - f * a[pivot_row][c] % (p * p)) % p;
                }
            }
        }
        pivot_of_col[col] = Some(pivot_row);
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }
    // inconsistency check
    for r in 0..rows {
        if a[r][..cols].iter().all(|x| *x % p == 0) && a[r][cols] % p != 0 {
            return None;
        }
    }
    let mut x = vec![0u64; cols];
    for c in 0..cols {
        if let Some(pr) = pivot_of_col[c] {
            x[c] = a[pr][cols] % p;
        }
    }
    Some(x)
}

/// Column echelon mod p; returns (echelon columns, pivot rows).
fn fp_column_echelon(cols: Vec<Vec<u64>>, dim: usize, p: u64) -> (Vec<Vec<u64>>, Vec<usize>) {
    let mut echelon: Vec<Vec<u64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for mut col in cols {
        // reduce against existing pivots
        for (e, &piv) in echelon.iter().zip(&pivots) {
            let f = col[piv] % p;
            if f != 0 {
                let inv = inv_mod(e[piv], p);
                let scale = f * inv % p;
                for (x, y) in col.iter_mut().zip(e) {
                    *x = (*x + p * p - scale * y % (p * p)) % p;
                }
            }
        }
        if let Some(piv) = (0..dim).find(|&i| col[i] % p != 0) {
            echelon.push(col);
            pivots.push(piv);
        }
    }
    (echelon, pivots)
}

#[cfg(test)]
mod tests {
    use super::super::big;
    use super::*;

    #[test]
    fn zero_maps_give_free_group() {
        let d_in = IntMatrix::zero(1, 0);
        let d_out = IntMatrix::zero(0, 1);
        let h = homology_at(&d_in, &d_out).unwrap();
        assert_eq!(h.subquotient.group().invariant_factors(), vec![big(0)]);
    }

    #[test]
    fn cokernel_of_two() {
        // Z --x2--> Z --0--> 0
        let d_in = IntMatrix::from_dense(&[vec![2]]);
        let d_out = IntMatrix::zero(0, 1);
        let h = homology_at(&d_in, &d_out).unwrap();
        assert_eq!(h.subquotient.group().invariant_factors(), vec![big(2)]);
        assert_eq!(
            homology_invariant_factors(&d_in, &d_out).unwrap(),
            vec![big(2)]
        );
    }

    #[test]
    fn injective_outgoing_map_kills_homology() {
        let d_in = IntMatrix::zero(1, 0);
        let d_out = IntMatrix::from_dense(&[vec![2]]);
        let h = homology_at(&d_in, &d_out).unwrap();
        assert!(h.subquotient.group().is_trivial());
    }

    #[test]
    fn composition_must_vanish() {
        let d_in = IntMatrix::from_dense(&[vec![1]]);
        let d_out = IntMatrix::from_dense(&[vec![1]]);
        assert!(matches!(
            homology_at(&d_in, &d_out),
            Err(Error::CompositionNotZero)
        ));
    }

    #[test]
    fn project_and_lift_are_inverse_on_classes() {
        // ker(0)/im(2Z + 3Z-ish): ambient Z^2, d_in = diag(2,3)
        let d_in = IntMatrix::from_dense(&[vec![2, 0], vec![0, 3]]);
        let d_out = IntMatrix::zero(0, 2);
        let h = homology_at(&d_in, &d_out).unwrap();
        let sq = &h.subquotient;
        for cycle in sq.enumerate_torsion_cycles() {
            let c = sq.project(&cycle).unwrap();
            let lifted = sq.lift(&c);
            assert!(sq.classes_equal(&cycle, &lifted).unwrap());
        }
    }

    #[test]
    fn fp_subquotient_dims() {
        // over F_2: d_in = [2] = 0, d_out = 0 -> dim 1
        let d_in = IntMatrix::from_dense(&[vec![2]]);
        let d_out = IntMatrix::zero(0, 1);
        let f = FpSubquotient::new(&d_in, &d_out, 2).unwrap();
        assert_eq!(f.dim(), 1);
        assert_eq!(f.enumerate_cycles().len(), 2);
    }
}
