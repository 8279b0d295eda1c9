//! Integer matrices and Smith normal form.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A dense matrix over the integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Panics if the rows have different lengths.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix");
            data.extend(r.iter().cloned().map(Into::into));
        }
        IntegerMatrix { rows: rows.len(), cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntegerMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntegerMatrix {
        let mut out = IntegerMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Fraction-free Bareiss elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "square matrix required");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

/// `U · M · V = D` with `D` diagonal, its diagonal a divisibility chain of
/// non-negative entries, and `U`, `V` unimodular.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub d: IntegerMatrix,
    pub u: IntegerMatrix,
    pub u_inv: IntegerMatrix,
    pub v: IntegerMatrix,
    pub v_inv: IntegerMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|x| !x.is_zero()).count()
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d.get(i, i).clone()).collect()
    }
}

struct Tracking {
    u: Vec<Vec<BigInt>>,
    u_inv: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
    v_inv: Vec<Vec<BigInt>>,
}

fn identity_rows(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

fn axpy(target: &mut [BigInt], q: &BigInt, src: &[BigInt]) {
    // target -= q * src
    for (t, s) in target.iter_mut().zip(src) {
        if !s.is_zero() {
            *t -= q * s;
        }
    }
}

struct Dense<'a> {
    a: Vec<Vec<BigInt>>,
    track: Option<&'a mut Tracking>,
}

impl Dense<'_> {
    fn rows(&self) -> usize {
        self.a.len()
    }

    fn cols(&self) -> usize {
        self.a.first().map_or(0, |r| r.len())
    }

    // row_i -= q row_t
    fn row_sub(&mut self, i: usize, t: usize, q: &BigInt) {
        let (src, dst) = pair(&mut self.a, t, i);
        axpy(dst, q, src);
        if let Some(tr) = self.track.as_deref_mut() {
            let (src, dst) = pair(&mut tr.u, t, i);
            axpy(dst, q, src);
            // U⁻¹: column t += q column i
            for row in tr.u_inv.iter_mut() {
                let add = q * &row[i];
                row[t] += add;
            }
        }
    }

    // col_j -= q col_t
    fn col_sub(&mut self, j: usize, t: usize, q: &BigInt) {
        for row in self.a.iter_mut() {
            let sub = q * &row[t];
            row[j] -= sub;
        }
        if let Some(tr) = self.track.as_deref_mut() {
            for row in tr.v.iter_mut() {
                let sub = q * &row[t];
                row[j] -= sub;
            }
            // V⁻¹: row t += q row j
            let (src, dst) = pair(&mut tr.v_inv, j, t);
            axpy(dst, &-q, src);
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        if let Some(tr) = self.track.as_deref_mut() {
            tr.u.swap(i, j);
            for row in tr.u_inv.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in self.a.iter_mut() {
            row.swap(i, j);
        }
        if let Some(tr) = self.track.as_deref_mut() {
            for row in tr.v.iter_mut() {
                row.swap(i, j);
            }
            tr.v_inv.swap(i, j);
        }
    }

    fn negate_row(&mut self, t: usize) {
        for x in self.a[t].iter_mut() {
            *x = -&*x;
        }
        if let Some(tr) = self.track.as_deref_mut() {
            for x in tr.u[t].iter_mut() {
                *x = -&*x;
            }
            for row in tr.u_inv.iter_mut() {
                row[t] = -&row[t];
            }
        }
    }

    fn reduce(&mut self) {
        let (r, c) = (self.rows(), self.cols());
        for t in 0..r.min(c) {
            // smallest nonzero entry of the remaining block
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let x = &self.a[i][j];
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.magnitude() < self.a[bi][bj].magnitude()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((i, j)) = best else { return };
            self.swap_rows(t, i);
            self.swap_cols(t, j);
            loop {
                let p = self.a[t][t].clone();
                let mut clean = true;
                for i in t + 1..r {
                    if !self.a[i][t].is_zero() {
                        let q = self.a[i][t].div_floor(&p);
                        self.row_sub(i, t, &q);
                        clean &= self.a[i][t].is_zero();
                    }
                }
                for j in t + 1..c {
                    if !self.a[t][j].is_zero() {
                        let q = self.a[t][j].div_floor(&p);
                        self.col_sub(j, t, &q);
                        clean &= self.a[t][j].is_zero();
                    }
                }
                if !clean {
                    let mut best = (t, t);
                    for i in t + 1..r {
                        let x = &self.a[i][t];
                        if !x.is_zero() && x.magnitude() < self.a[best.0][best.1].magnitude() {
                            best = (i, t);
                        }
                    }
                    for j in t + 1..c {
                        let x = &self.a[t][j];
                        if !x.is_zero() && x.magnitude() < self.a[best.0][best.1].magnitude() {
                            best = (t, j);
                        }
                    }
                    self.swap_rows(t, best.0);
                    self.swap_cols(t, best.1);
                    continue;
                }
                let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !self.a[i][j].is_multiple_of(&p)));
                match bad {
                    Some(i) => {
                        self.row_sub(t, i, &BigInt::from(-1));
                    }
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.negate_row(t);
            }
        }
    }
}

fn pair<T>(v: &mut [T], src: usize, dst: usize) -> (&T, &mut T) {
    assert_ne!(src, dst);
    if src < dst {
        let (a, b) = v.split_at_mut(dst);
        (&a[src], &mut b[0])
    } else {
        let (a, b) = v.split_at_mut(src);
        (&b[0], &mut a[dst])
    }
}

pub fn smith_normal_form(m: &IntegerMatrix) -> SmithForm {
    let mut tracking = Tracking {
        u: identity_rows(m.rows),
        u_inv: identity_rows(m.rows),
        v: identity_rows(m.cols),
        v_inv: identity_rows(m.cols),
    };
    let mut dense = Dense { a: m.to_rows(), track: Some(&mut tracking) };
    dense.reduce();
    let a = dense.a;
    let from = |rows: Vec<Vec<BigInt>>, r: usize, c: usize| IntegerMatrix {
        rows: r,
        cols: c,
        data: rows.into_iter().flatten().collect(),
    };
    SmithForm {
        d: from(a, m.rows, m.cols),
        u: from(tracking.u, m.rows, m.rows),
        u_inv: from(tracking.u_inv, m.rows, m.rows),
        v: from(tracking.v, m.cols, m.cols),
        v_inv: from(tracking.v_inv, m.cols, m.cols),
    }
}

/// A sparse integer matrix given by rows of `(column, value)` pairs.
#[derive(Clone, Debug, Default)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: vec![Vec::new(); rows] }
    }

    /// Adds `value` at `(i, j)`, merging with an existing entry.
    pub fn add(&mut self, i: usize, j: usize, value: i64) {
        let row = &mut self.entries[i];
        match row.iter_mut().find(|(c, _)| *c == j) {
            Some(e) => e.1 += value,
            None => row.push((j, value)),
        }
    }

    pub fn to_dense(&self) -> IntegerMatrix {
        let mut m = IntegerMatrix::zeros(self.rows, self.cols);
        for (i, row) in self.entries.iter().enumerate() {
            for &(j, v) in row {
                let x = m.get(i, j) + v;
                m.set(i, j, x);
            }
        }
        m
    }
}

/// Nonzero invariant factors (a divisibility chain, all positive). Unit
/// pivots are eliminated sparsely in machine integers first; whatever is left
/// goes through the dense reduction.
pub fn elementary_divisors(m: &SparseMatrix) -> Vec<BigUint> {
    let mut rows: Vec<BTreeMap<usize, i64>> = m
        .entries
        .iter()
        .map(|r| {
            let mut row = BTreeMap::new();
            for &(j, v) in r {
                *row.entry(j).or_insert(0) += v;
            }
            row.retain(|_, v| *v != 0);
            row
        })
        .collect();
    let mut col_rows: Vec<BTreeMap<usize, ()>> = vec![BTreeMap::new(); m.cols];
    for (i, r) in rows.iter().enumerate() {
        for &j in r.keys() {
            col_rows[j].insert(i, ());
        }
    }
    let mut alive = vec![true; rows.len()];
    let mut units = 0usize;
    let mut overflow = false;
    'rounds: loop {
        let mut order: Vec<usize> = (0..rows.len()).filter(|&i| alive[i] && !rows[i].is_empty()).collect();
        order.sort_by_key(|&i| rows[i].len());
        let mut progressed = false;
        for i in order {
            if !alive[i] {
                continue;
            }
            let pivot = rows[i]
                .iter()
                .filter(|(_, v)| v.abs() == 1)
                .min_by_key(|(j, _)| col_rows[**j].len())
                .map(|(&j, &v)| (j, v));
            let Some((j, pv)) = pivot else { continue };
            let pivot_row = core::mem::take(&mut rows[i]);
            alive[i] = false;
            for &k in pivot_row.keys() {
                col_rows[k].remove(&i);
            }
            let others: Vec<usize> = col_rows[j].keys().copied().collect();
            for r in others {
                let a = rows[r][&j];
                // row_r -= (a / pv) * pivot_row, committed only if nothing overflows
                let q = a * pv;
                let mut updates = Vec::with_capacity(pivot_row.len());
                for (&k, &pk) in &pivot_row {
                    let cur = rows[r].get(&k).copied().unwrap_or(0);
                    match q.checked_mul(pk).and_then(|x| cur.checked_sub(x)) {
                        Some(new) => updates.push((k, cur, new)),
                        None => {
                            overflow = true;
                            break;
                        }
                    }
                }
                if overflow {
                    for &k in pivot_row.keys() {
                        col_rows[k].insert(i, ());
                    }
                    rows[i] = pivot_row;
                    alive[i] = true;
                    break 'rounds;
                }
                for (k, cur, new) in updates {
                    if new == 0 {
                        rows[r].remove(&k);
                        col_rows[k].remove(&r);
                    } else {
                        if cur == 0 {
                            col_rows[k].insert(r, ());
                        }
                        rows[r].insert(k, new);
                    }
                }
            }
            units += 1;
            progressed = true;
        }
        if !progressed {
            break;
        }
    }
    // dense remainder on the surviving nonempty rows and their columns
    let live: Vec<usize> = (0..rows.len()).filter(|&i| alive[i] && !rows[i].is_empty()).collect();
    let mut cols: Vec<usize> = live.iter().flat_map(|&i| rows[i].keys().copied()).collect();
    cols.sort_unstable();
    cols.dedup();
    let mut out: Vec<BigUint> = vec![BigUint::one(); units];
    if !live.is_empty() {
        let col_pos: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(p, &j)| (j, p)).collect();
        let a: Vec<Vec<BigInt>> = live
            .iter()
            .map(|&i| {
                let mut row = vec![BigInt::zero(); cols.len()];
                for (&j, &v) in &rows[i] {
                    row[col_pos[&j]] = BigInt::from(v);
                }
                row
            })
            .collect();
        let mut dense = Dense { a, track: None };
        dense.reduce();
        let k = dense.rows().min(dense.cols());
        for t in 0..k {
            let x = &dense.a[t][t];
            if x.is_zero() {
                break;
            }
            out.push(x.magnitude().clone());
        }
    }
    out
}

/// Rank of a sparse integer matrix.
pub fn rank(m: &SparseMatrix) -> usize {
    elementary_divisors(m).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &IntegerMatrix) {
        let s = smith_normal_form(m);
        assert_eq!(s.u.mul(m).mul(&s.v), s.d);
        assert!(s.d.is_diagonal());
        assert_eq!(s.u.mul(&s.u_inv), IntegerMatrix::identity(m.rows()));
        assert_eq!(s.v.mul(&s.v_inv), IntegerMatrix::identity(m.cols()));
        let diag = s.diagonal();
        for w in diag.windows(2) {
            assert!(!w[0].is_negative());
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
    }

    #[test]
    fn examples() {
        let id = IntegerMatrix::identity(3);
        assert_eq!(smith_normal_form(&id).d, id);
        let z = IntegerMatrix::zeros(2, 3);
        assert_eq!(smith_normal_form(&z).d, z);
        let m = IntegerMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(smith_normal_form(&m).d, IntegerMatrix::from_rows(&[vec![1, 0], vec![0, 6]]));
        check(&m);
        check(&IntegerMatrix::from_rows(&[vec![4, 6, 8], vec![6, 9, 12], vec![2, -5, 7]]));
        check(&IntegerMatrix::zeros(0, 2));
    }

    #[test]
    fn determinant() {
        let m = IntegerMatrix::from_rows(&[vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]]);
        assert_eq!(m.determinant(), BigInt::from(18));
        let m = IntegerMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(m.determinant(), BigInt::from(-1));
    }

    #[test]
    fn sparse_agrees_with_dense() {
        let mut s = SparseMatrix::new(3, 3);
        for (i, j, v) in [(0, 0, 2), (1, 1, 3), (2, 0, 1), (2, 2, 5), (0, 2, 4)] {
            s.add(i, j, v);
        }
        let dense: Vec<BigUint> = smith_normal_form(&s.to_dense())
            .diagonal()
            .into_iter()
            .filter(|x| !x.is_zero())
            .map(|x| x.magnitude().clone())
            .collect();
        assert_eq!(elementary_divisors(&s), dense);
    }
}
