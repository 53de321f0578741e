//! Smith normal form.
//!
//! `smith_normal_form` tracks the unimodular transforms and works on a dense
//! grid; it is meant for the moderate sizes where transforms are actually
//! consumed (presented groups, class extraction). `invariant_factors` and
//! `rank` run a sparse elimination without transforms and scale to the large
//! cochain matrices. Pivot selection: smallest nonzero absolute value, ties
//! broken by (row, col) order.

use super::IntMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeSet, HashMap};

/// U * M * V = D with U, V unimodular and D = diag(d1 | d2 | ...), di >= 0.
pub struct Snf {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.d.rows().min(self.d.cols());
        (0..n).map(|i| self.d.get(i, i)).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

struct DenseWork {
    rows: usize,
    cols: usize,
    m: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    u_inv: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
    v_inv: Vec<Vec<BigInt>>,
}

impl DenseWork {
    fn new(src: &IntMatrix) -> Self {
        let (rows, cols) = (src.rows(), src.cols());
        let ident = |n: usize| -> Vec<Vec<BigInt>> {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                        .collect()
                })
                .collect()
        };
        DenseWork {
            rows,
            cols,
            m: src.to_dense(),
            u: ident(rows),
            u_inv: ident(rows),
            v: ident(cols),
            v_inv: ident(cols),
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        self.m.swap(a, b);
        self.u.swap(a, b);
        for row in self.u_inv.iter_mut() {
            row.swap(a, b);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for row in self.m.iter_mut() {
            row.swap(a, b);
        }
        for row in self.v.iter_mut() {
            row.swap(a, b);
        }
        self.v_inv.swap(a, b);
    }

    fn negate_row(&mut self, r: usize) {
        for x in self.m[r].iter_mut() {
            *x = -&*x;
        }
        for x in self.u[r].iter_mut() {
            *x = -&*x;
        }
        for row in self.u_inv.iter_mut() {
            row[r] = -&row[r];
        }
    }

    /// row_i -= q * row_t
    fn row_axpy(&mut self, i: usize, q: &BigInt, t: usize) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let delta = q * &self.m[t][j];
            self.m[i][j] -= delta;
        }
        for j in 0..self.rows {
            let delta = q * &self.u[t][j];
            self.u[i][j] -= delta;
        }
        // the inverse operation acts on u_inv by columns: col_t += q * col_i
        for row in self.u_inv.iter_mut() {
            let delta = q * &row[i];
            row[t] += delta;
        }
    }

    /// col_j -= q * col_t
    fn col_axpy(&mut self, j: usize, q: &BigInt, t: usize) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let delta = q * &self.m[i][t];
            self.m[i][j] -= delta;
        }
        for row in self.v.iter_mut() {
            let delta = q * &row[t];
            row[j] -= delta;
        }
        for i in 0..self.cols {
            let delta = q * &self.v_inv[j][i];
            self.v_inv[t][i] += delta;
        }
    }

    fn find_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(BigInt, usize, usize)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                if self.m[i][j].is_zero() {
                    continue;
                }
                let a = self.m[i][j].abs();
                match &best {
                    Some((b, _, _)) if *b <= a => {}
                    _ => best = Some((a, i, j)),
                }
            }
        }
        best.map(|(_, i, j)| (i, j))
    }
}

pub fn smith_normal_form(src: &IntMatrix) -> Snf {
    let mut w = DenseWork::new(src);
    let steps = w.rows.min(w.cols);
    let mut t = 0;
    while t < steps {
        let Some((pi, pj)) = w.find_pivot(t) else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        if w.m[t][t].is_negative() {
            w.negate_row(t);
        }
        // clear column t, then row t; restart if a remainder survives
        let mut dirty = false;
        for i in t + 1..w.rows {
            if !w.m[i][t].is_zero() {
                let q = &w.m[i][t] / &w.m[t][t];
                w.row_axpy(i, &q, t);
                if !w.m[i][t].is_zero() {
                    dirty = true;
                }
            }
        }
        if dirty {
            continue;
        }
        for j in t + 1..w.cols {
            if !w.m[t][j].is_zero() {
                let q = &w.m[t][j] / &w.m[t][t];
                w.col_axpy(j, &q, t);
                if !w.m[t][j].is_zero() {
                    dirty = true;
                }
            }
        }
        if dirty {
            continue;
        }
        // divisibility sweep: d_t must divide the remaining submatrix
        let mut offender = None;
        'scan: for i in t + 1..w.rows {
            for j in t + 1..w.cols {
                if !(&w.m[i][j] % &w.m[t][t]).is_zero() {
                    offender = Some(i);
                    break 'scan;
                }
            }
        }
        if let Some(i) = offender {
            let minus_one = -BigInt::one();
            w.row_axpy(t, &minus_one, i);
            continue;
        }
        t += 1;
    }
    Snf {
        u: dense_to_matrix(&w.u),
        d: dense_to_matrix(&w.m),
        v: dense_to_matrix(&w.v),
        u_inv: dense_to_matrix(&w.u_inv),
        v_inv: dense_to_matrix(&w.v_inv),
    }
}

fn dense_to_matrix(d: &[Vec<BigInt>]) -> IntMatrix {
    let rows = d.len();
    let cols = d.first().map_or(0, |r| r.len());
    IntMatrix::from_triples(
        rows,
        cols,
        d.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(move |(j, v)| (i, j, v.clone()))
                .collect::<Vec<_>>()
        }),
    )
}

/// Sparse working form for transform-free elimination.
struct SparseWork {
    rows: Vec<HashMap<u32, BigInt>>,
    col_rows: Vec<BTreeSet<u32>>,
    /// (row, col) of entries with value +-1, for cheap pivot selection
    units: BTreeSet<(u32, u32)>,
    active_rows: BTreeSet<u32>,
}

impl SparseWork {
    fn new(m: &IntMatrix) -> Self {
        let mut w = SparseWork {
            rows: vec![HashMap::new(); m.rows()],
            col_rows: vec![BTreeSet::new(); m.cols()],
            units: BTreeSet::new(),
            active_rows: (0..m.rows() as u32).collect(),
        };
        for (r, c, v) in m.triples() {
            w.set(r as u32, c as u32, v.clone());
        }
        w
    }

    fn set(&mut self, r: u32, c: u32, v: BigInt) {
        if v.is_zero() {
            if self.rows[r as usize].remove(&c).is_some() {
                self.col_rows[c as usize].remove(&r);
                self.units.remove(&(r, c));
            }
            return;
        }
        let unit = v.abs().is_one();
        self.rows[r as usize].insert(c, v);
        self.col_rows[c as usize].insert(r);
        if unit {
            self.units.insert((r, c));
        } else {
            self.units.remove(&(r, c));
        }
    }

    fn get(&self, r: u32, c: u32) -> Option<&BigInt> {
        self.rows[r as usize].get(&c)
    }

    /// row_i -= q * row_t
    fn row_axpy(&mut self, i: u32, q: &BigInt, t: u32) {
        if q.is_zero() {
            return;
        }
        let src: Vec<(u32, BigInt)> =
            self.rows[t as usize].iter().map(|(c, v)| (*c, v.clone())).collect();
        for (c, v) in src {
            let cur = self.get(i, c).cloned().unwrap_or_else(BigInt::zero);
            self.set(i, c, cur - q * &v);
        }
    }

    /// col_j -= q * col_t
    fn col_axpy(&mut self, j: u32, q: &BigInt, t: u32) {
        if q.is_zero() {
            return;
        }
        let rows_in_t: Vec<u32> = self.col_rows[t as usize].iter().copied().collect();
        for r in rows_in_t {
            let v = self.get(r, t).cloned().unwrap_or_else(BigInt::zero);
            let cur = self.get(r, j).cloned().unwrap_or_else(BigInt::zero);
            self.set(r, j, cur - q * &v);
        }
    }

    fn scale_row(&mut self, r: u32, k: &BigInt) {
        let cols: Vec<(u32, BigInt)> =
            self.rows[r as usize].iter().map(|(c, x)| (*c, x.clone())).collect();
        for (c, x) in cols {
            self.set(r, c, &x * k);
        }
    }

    fn strip_row_content(&mut self, r: u32) {
        let g = self.rows[r as usize]
            .values()
            .fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if g > BigInt::one() {
            let cols: Vec<(u32, BigInt)> =
                self.rows[r as usize].iter().map(|(c, x)| (*c, x.clone())).collect();
            for (c, x) in cols {
                self.set(r, c, &x / &g);
            }
        }
    }

    fn find_pivot(&self) -> Option<(u32, u32)> {
        if let Some(&(r, c)) = self.units.iter().next() {
            return Some((r, c));
        }
        let mut best: Option<(BigInt, u32, u32)> = None;
        for &r in &self.active_rows {
            for (c, v) in &self.rows[r as usize] {
                let a = v.abs();
                match &best {
                    Some((b, br, bc)) if (b.clone(), *br, *bc) <= (a.clone(), r, *c) => {}
                    _ => best = Some((a, r, *c)),
                }
            }
        }
        best.map(|(_, r, c)| (r, c))
    }

    /// Remove row r and column c from the active matrix, with full index
    /// cleanup (the row may still hold entries in other columns).
    fn retire(&mut self, r: u32, c: u32) {
        let row_cols: Vec<u32> = self.rows[r as usize].keys().copied().collect();
        for cc in row_cols {
            self.col_rows[cc as usize].remove(&r);
            self.units.remove(&(r, cc));
        }
        self.rows[r as usize].clear();
        let col_rows: Vec<u32> = self.col_rows[c as usize].iter().copied().collect();
        for rr in col_rows {
            self.rows[rr as usize].remove(&c);
            self.units.remove(&(rr, c));
        }
        self.col_rows[c as usize].clear();
        self.active_rows.remove(&r);
    }
}

/// Invariant factors d1 | d2 | ... of an integer matrix (the diagonal of its
/// Smith form), length min(rows, cols), zeros for the rank defect.
pub fn invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    let mut w = SparseWork::new(m);
    let mut diag: Vec<BigInt> = Vec::new();
    while let Some((mut pr, mut pc)) = w.find_pivot() {
        // the classical pivot dance: clear column, clear row, shrink the
        // pivot whenever a remainder survives. |pivot| strictly decreases on
        // every retry, so this terminates.
        loop {
            let pval = w.get(pr, pc).expect("pivot present").clone();
            let col_hits: Vec<u32> = w.col_rows[pc as usize]
                .iter()
                .copied()
                .filter(|&r| r != pr)
                .collect();
            for r in &col_hits {
                let v = w.get(*r, pc).unwrap().clone();
                let q = &v / &pval;
                w.row_axpy(*r, &q, pr);
            }
            if let Some(&r2) = w.col_rows[pc as usize].iter().find(|&&r| r != pr) {
                // remainder smaller than |pval| survives at (r2, pc)
                pr = r2;
                continue;
            }
            let row_hits: Vec<u32> = w.rows[pr as usize]
                .keys()
                .copied()
                .filter(|&c| c != pc)
                .collect();
            for c in &row_hits {
                let v = w.get(pr, *c).unwrap().clone();
                let q = &v / &pval;
                w.col_axpy(*c, &q, pc);
            }
            if let Some(&c2) = w.rows[pr as usize].keys().find(|&&c| c != pc) {
                pc = c2;
                continue;
            }
            break;
        }
        diag.push(w.get(pr, pc).unwrap().abs());
        w.retire(pr, pc);
    }
    normalize_diagonal(diag, m.rows().min(m.cols()))
}

/// Sort a diagonal multiset into a proper divisibility chain and pad with
/// zeros; diag(a, b) and diag(gcd, lcm) present the same group.
fn normalize_diagonal(mut diag: Vec<BigInt>, len: usize) -> Vec<BigInt> {
    diag.retain(|d| !d.is_zero());
    let n = diag.len();
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in i + 1..n {
                if !(&diag[j] % &diag[i]).is_zero() {
                    let g = diag[i].gcd(&diag[j]);
                    let l = (&diag[i] * &diag[j]) / &g;
                    diag[i] = g;
                    diag[j] = l;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    diag.sort();
    while diag.len() < len {
        diag.push(BigInt::zero());
    }
    diag
}

/// Rank over the rationals, via sparse fraction-free row elimination with
/// content stripping (which cannot change the rank).
pub fn rank(m: &IntMatrix) -> usize {
    let mut w = SparseWork::new(m);
    let mut rank = 0;
    while let Some((pr, pc)) = w.find_pivot() {
        let pval = w.get(pr, pc).unwrap().clone();
        let col_hits: Vec<u32> = w.col_rows[pc as usize]
            .iter()
            .copied()
            .filter(|&r| r != pr)
            .collect();
        for r in col_hits {
            let v = w.get(r, pc).unwrap().clone();
            if pval.abs().is_one() {
                let q = &v / &pval;
                w.row_axpy(r, &q, pr);
            } else {
                // row_r <- pval * row_r - v * row_pr
                w.scale_row(r, &pval);
                w.row_axpy(r, &v, pr);
                w.strip_row_content(r);
            }
        }
        rank += 1;
        w.retire(pr, pc);
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::super::big;
    use super::*;

    fn check_snf(m: &IntMatrix) {
        let snf = smith_normal_form(m);
        assert_eq!(snf.u.mul(m).mul(&snf.v), snf.d, "U M V = D");
        assert!(snf.u.mul(&snf.u_inv).is_identity(), "u_inv");
        assert!(snf.v.mul(&snf.v_inv).is_identity(), "v_inv");
        let d = snf.diagonal();
        for i in 1..d.len() {
            if !d[i - 1].is_zero() {
                assert!((&d[i] % &d[i - 1]).is_zero(), "divisibility chain");
            } else {
                assert!(d[i].is_zero(), "zeros trail the chain");
            }
        }
        for (r, c, _) in snf.d.triples() {
            assert_eq!(r, c, "D is diagonal");
        }
    }

    #[test]
    fn identity_and_zero() {
        check_snf(&IntMatrix::identity(2));
        let z = IntMatrix::zero(1, 1);
        let snf = smith_normal_form(&z);
        assert_eq!(snf.d.get(0, 0), big(0));
    }

    #[test]
    fn two_by_two_example() {
        let m = IntMatrix::from_dense(&[vec![2, 4], vec![6, 8]]);
        check_snf(&m);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.diagonal(), vec![big(2), big(4)]);
        assert_eq!(invariant_factors(&m), vec![big(2), big(4)]);
    }

    #[test]
    fn sparse_and_dense_factors_agree() {
        let cases = vec![
            IntMatrix::from_dense(&[
                vec![-6, 111, -36, 6],
                vec![5, -672, 210, 74],
                vec![0, -255, 81, 24],
                vec![-7, 255, -81, -10],
            ]),
            IntMatrix::from_dense(&[vec![0, 0], vec![0, 0]]),
            IntMatrix::from_dense(&[vec![2, 0], vec![0, 3]]),
            IntMatrix::from_dense(&[vec![4, 6], vec![6, 4]]),
            IntMatrix::from_dense(&[vec![6, 10], vec![15, 4]]),
        ];
        for m in cases {
            check_snf(&m);
            let dense = normalize_diagonal(
                smith_normal_form(&m).diagonal(),
                m.rows().min(m.cols()),
            );
            assert_eq!(invariant_factors(&m), dense);
        }
    }

    #[test]
    fn rank_agrees_with_snf() {
        let m = IntMatrix::from_dense(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]);
        assert_eq!(rank(&m), 2);
        assert_eq!(smith_normal_form(&m).rank(), 2);
    }
}
