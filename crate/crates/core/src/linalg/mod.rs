//! Deterministic exact linear algebra over the integers.
//!
//! Everything downstream (cohomology groups, Ext, spectral-sequence pages)
//! reduces to Smith/Hermite normal forms, integer kernels and image
//! membership computed here. Arithmetic is arbitrary precision throughout;
//! machine words overflow even at desk scale once elimination starts.

mod echelon;
mod presented;
mod snf;
mod subquotient;

pub use echelon::{ColumnEchelon, Lattice};
pub use presented::{direct_sum_factors, AbHom, PresentedAbelianGroup};
pub(crate) use presented::solvability_lattice;
pub use snf::{invariant_factors, rank, smith_normal_form, Snf};
pub use subquotient::{
    homology_at, homology_invariant_factors, FpSubquotient, Homology, Subquotient,
};

use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Sparse integer matrix stored as (row, col, value) triples.
///
/// Invariants: triples are sorted by (row, col), carry no duplicates and no
/// zero values.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(u32, u32, BigInt)>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n as u32).map(|i| (i, i, BigInt::one())).collect();
        IntMatrix { rows: n, cols: n, entries }
    }

    /// Build from unsorted triples; duplicates are summed, zeros dropped.
    pub fn from_triples(
        rows: usize,
        cols: usize,
        triples: impl IntoIterator<Item = (usize, usize, BigInt)>,
    ) -> Self {
        let mut entries: Vec<(u32, u32, BigInt)> = Vec::new();
        for (r, c, v) in triples {
            assert!(r < rows && c < cols, "triple out of bounds");
            entries.push((r as u32, c as u32, v));
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(u32, u32, BigInt)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            if let Some(last) = merged.last_mut() {
                if last.0 == r && last.1 == c {
                    last.2 += v;
                    continue;
                }
            }
            merged.push((r, c, v));
        }
        merged.retain(|(_, _, v)| !v.is_zero());
        IntMatrix { rows, cols, entries: merged }
    }

    pub fn from_dense(data: &[Vec<i64>]) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        let triples = data.iter().enumerate().flat_map(|(r, row)| {
            assert_eq!(row.len(), cols, "ragged dense input");
            row.iter()
                .enumerate()
                .filter(|(_, v)| **v != 0)
                .map(move |(c, v)| (r, c, BigInt::from(*v)))
                .collect::<Vec<_>>()
        });
        Self::from_triples(rows, cols, triples)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> BigInt) -> Self {
        let mut triples = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let v = f(r, c);
                if !v.is_zero() {
                    triples.push((r, c, v));
                }
            }
        }
        Self::from_triples(rows, cols, triples)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, cols: &[Vec<BigInt>]) -> Self {
        let triples = cols.iter().enumerate().flat_map(|(j, col)| {
            assert_eq!(col.len(), rows, "column length mismatch");
            col.iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(move |(i, v)| (i, j, v.clone()))
                .collect::<Vec<_>>()
        });
        Self::from_triples(rows, cols.len(), triples)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.entries.iter().map(|(r, c, v)| (*r as usize, *c as usize, v))
    }

    pub fn get(&self, r: usize, c: usize) -> BigInt {
        match self.entries.binary_search_by_key(&(r as u32, c as u32), |&(rr, cc, _)| (rr, cc)) {
            Ok(idx) => self.entries[idx].2.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    pub fn transpose(&self) -> Self {
        let triples = self.triples().map(|(r, c, v)| (c, r, v.clone()));
        Self::from_triples(self.cols, self.rows, triples)
    }

    pub fn neg(&self) -> Self {
        let entries = self.entries.iter().map(|(r, c, v)| (*r, *c, -v)).collect();
        IntMatrix { rows: self.rows, cols: self.cols, entries }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let triples = self
            .triples()
            .map(|(r, c, v)| (r, c, v.clone()))
            .chain(other.triples().map(|(r, c, v)| (r, c, v.clone())));
        Self::from_triples(self.rows, self.cols, triples)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero(self.rows, self.cols);
        }
        let entries = self.entries.iter().map(|(r, c, v)| (*r, *c, v * k)).collect();
        IntMatrix { rows: self.rows, cols: self.cols, entries }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        // row-major adjacency of `other` for the accumulation
        let mut rhs_rows: Vec<Vec<(u32, &BigInt)>> = vec![Vec::new(); other.rows];
        for (r, c, v) in &other.entries {
            rhs_rows[*r as usize].push((*c, v));
        }
        let mut triples: Vec<(usize, usize, BigInt)> = Vec::new();
        let mut acc: std::collections::BTreeMap<u32, BigInt> = std::collections::BTreeMap::new();
        let mut i = 0;
        while i < self.entries.len() {
            let row = self.entries[i].0;
            acc.clear();
            while i < self.entries.len() && self.entries[i].0 == row {
                let (_, k, v) = &self.entries[i];
                for (c, w) in &rhs_rows[*k as usize] {
                    let slot = acc.entry(*c).or_insert_with(BigInt::zero);
                    *slot += v * *w;
                }
                i += 1;
            }
            for (c, v) in acc.iter() {
                if !v.is_zero() {
                    triples.push((row as usize, *c as usize, v.clone()));
                }
            }
        }
        Self::from_triples(self.rows, other.cols, triples)
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let mut out = vec![BigInt::zero(); self.rows];
        for (r, c, w) in &self.entries {
            if !v[*c as usize].is_zero() {
                out[*r as usize] += w * &v[*c as usize];
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.rows];
        for (r, c, v) in &self.entries {
            if *c as usize == j {
                out[*r as usize] = v.clone();
            }
        }
        out
    }

    /// Kronecker product with index convention (i, j) -> i * other.rows + j.
    pub fn kronecker(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut triples = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, v1) in self.triples() {
            for (r2, c2, v2) in other.triples() {
                triples.push((r1 * other.rows + r2, c1 * other.cols + c2, v1 * v2));
            }
        }
        Self::from_triples(rows, cols, triples)
    }

    /// Stack vertically: self on top of other.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let triples = self
            .triples()
            .map(|(r, c, v)| (r, c, v.clone()))
            .chain(other.triples().map(|(r, c, v)| (r + self.rows, c, v.clone())));
        Self::from_triples(self.rows + other.rows, self.cols, triples)
    }

    /// Stack horizontally: self to the left of other.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let triples = self
            .triples()
            .map(|(r, c, v)| (r, c, v.clone()))
            .chain(other.triples().map(|(r, c, v)| (r, c + self.cols, v.clone())));
        Self::from_triples(self.rows, self.cols + other.cols, triples)
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut out = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (r, c, v) in &self.entries {
            out[*r as usize][*c as usize] = v.clone();
        }
        out
    }

    pub fn fill_ratio(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        self.entries.len() as f64 / (self.rows as f64 * self.cols as f64)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && self.entries.len() == self.rows
            && self.entries.iter().enumerate().all(|(i, (r, c, v))| {
                *r as usize == i && *c as usize == i && v.is_one()
            })
    }

    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(self.rows.to_le_bytes());
        h.update(self.cols.to_le_bytes());
        for (r, c, v) in &self.entries {
            h.update(r.to_le_bytes());
            h.update(c.to_le_bytes());
            h.update(v.to_signed_bytes_le());
            h.update([0xfe]);
        }
        hex_string(&h.finalize())
    }

    pub(crate) fn check_dims_for_apply(&self, v_len: usize) -> Result<()> {
        if v_len != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} columns, vector has length {}",
                self.cols, v_len
            )));
        }
        Ok(())
    }
}

impl std::fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        if self.rows <= 16 && self.cols <= 16 {
            for row in self.to_dense() {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                writeln!(f, "  [{}]", cells.join(", "))?;
            }
        } else {
            writeln!(f, "  nnz = {}", self.nnz())?;
        }
        write!(f, "]")
    }
}

pub(crate) fn hex_string(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{:02x}", b));
    }
    s
}

/// Image membership: a vector x with M x = v, when v lies in the integer
/// column span of M.
pub fn membership(m: &IntMatrix, v: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if v.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} rows, vector has length {}",
            m.rows(),
            v.len()
        )));
    }
    let ech = ColumnEchelon::with_transform(m);
    Ok(ech.solve(v))
}

pub(crate) fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

pub(crate) fn vec_is_zero(v: &[BigInt]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub(crate) fn vec_add(a: &mut [BigInt], b: &[BigInt]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

pub(crate) fn vec_sub(a: &mut [BigInt], b: &[BigInt]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x -= y;
    }
}

pub(crate) fn vec_neg(a: &[BigInt]) -> Vec<BigInt> {
    a.iter().map(|x| -x).collect()
}

pub(crate) fn vec_abs_max(a: &[BigInt]) -> BigInt {
    a.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triples_stay_sorted_and_deduplicated() {
        let m = IntMatrix::from_triples(
            3,
            3,
            vec![
                (2, 1, big(4)),
                (0, 0, big(1)),
                (2, 1, big(-4)),
                (1, 2, big(7)),
            ],
        );
        let collected: Vec<_> = m.triples().map(|(r, c, v)| (r, c, v.clone())).collect();
        assert_eq!(collected, vec![(0, 0, big(1)), (1, 2, big(7))]);
    }

    #[test]
    fn mul_matches_dense() {
        let a = IntMatrix::from_dense(&[vec![1, 2], vec![3, -4], vec![0, 5]]);
        let b = IntMatrix::from_dense(&[vec![2, 0, 1], vec![-1, 1, 3]]);
        let c = a.mul(&b);
        assert_eq!(
            c.to_dense(),
            IntMatrix::from_dense(&[vec![0, 2, 7], vec![10, -4, -9], vec![-5, 5, 15]]).to_dense()
        );
    }

    #[test]
    fn kronecker_convention() {
        let a = IntMatrix::from_dense(&[vec![1, 2], vec![0, 3]]);
        let b = IntMatrix::from_dense(&[vec![0, 1], vec![1, 0]]);
        let k = a.kronecker(&b);
        // block (0,1) is 2 * b
        assert_eq!(k.get(0, 3), big(2));
        assert_eq!(k.get(1, 2), big(2));
        assert_eq!(k.get(2, 2), big(0));
        assert_eq!(k.get(3, 2), big(3));
    }

    #[test]
    fn membership_identity_and_parity() {
        let id = IntMatrix::identity(3);
        let v = vec![big(4), big(-1), big(0)];
        assert_eq!(membership(&id, &v).unwrap(), Some(v.clone()));

        let two = IntMatrix::from_dense(&[vec![2]]);
        assert_eq!(membership(&two, &[big(3)]).unwrap(), None);
        assert_eq!(membership(&two, &[big(-6)]).unwrap(), Some(vec![big(-3)]));
    }

    #[test]
    fn membership_on_first_column() {
        let m = IntMatrix::from_dense(&[vec![2, 4], vec![6, 8]]);
        let x = membership(&m, &[big(2), big(6)]).unwrap().expect("in span");
        assert_eq!(m.apply(&x), vec![big(2), big(6)]);
    }
}
