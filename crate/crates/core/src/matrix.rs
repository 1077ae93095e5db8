//! Exact dense matrices over the rationals and the integers.
//!
//! Everything in this module is exact: no floating point anywhere. Sizes in
//! this crate stay tiny (at most a few dozen rows), so the implementations
//! favour clarity over asymptotics. Normal forms follow one pinned
//! convention so lattices can be compared by plain matrix equality:
//! row-operation Hermite form, lower triangular, positive pivots, entries
//! below each pivot reduced into `[0, pivot)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rat = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix does not have full column rank")]
    RankDeficient,
    #[error("cannot parse rational from {0:?}")]
    BadRational(String),
}

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parse `"p/q"` or `"p"` with optional sign.
pub fn parse_rat(s: &str) -> Result<Rat, MatrixError> {
    let bad = || MatrixError::BadRational(s.to_string());
    let t = s.trim();
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => {
            let n: BigInt = t.parse().map_err(|_| bad())?;
            Ok(Rat::from_integer(n))
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl std::fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RatMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vec<Rat> {
        self.row(i).to_vec()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|k| &self[(i, k)] * &other[(k, j)]).sum()
        })
    }

    pub fn mul_row_vec(&self, v: &[Rat]) -> Vec<Rat> {
        // v (as a row) times self.
        assert_eq!(v.len(), self.rows);
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| &v[i] * &self[(i, j)]).sum())
            .collect()
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] * c)
    }

    pub fn stack(blocks: &[&RatMatrix]) -> Self {
        let cols = blocks[0].cols;
        assert!(blocks.iter().all(|b| b.cols == cols));
        let mut rows = Vec::new();
        for b in blocks {
            for i in 0..b.rows {
                rows.push(b.row_vec(i));
            }
        }
        Self::from_rows(rows)
    }

    /// Determinant by fraction-full Gaussian elimination.
    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rat::one();
        for col in 0..n {
            let pivot = match (col..n).find(|&i| !m[(i, col)].is_zero()) {
                Some(p) => p,
                None => return Rat::zero(),
            };
            if pivot != col {
                m.swap_rows(pivot, col);
                det = -det;
            }
            let p = m[(col, col)].clone();
            det *= &p;
            for i in col + 1..n {
                if m[(i, col)].is_zero() {
                    continue;
                }
                let factor = &m[(i, col)] / &p;
                for j in col..n {
                    let sub = &factor * &m[(col, j)];
                    m[(i, j)] -= sub;
                }
            }
        }
        det
    }

    pub fn try_inverse(&self) -> Result<Self, MatrixError> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot =
                (col..n).find(|&i| !m[(i, col)].is_zero()).ok_or(MatrixError::Singular)?;
            m.swap_rows(pivot, col);
            inv.swap_rows(pivot, col);
            let p = m[(col, col)].clone();
            for j in 0..n {
                m[(col, j)] /= &p;
                inv[(col, j)] /= &p;
            }
            for i in 0..n {
                if i == col || m[(i, col)].is_zero() {
                    continue;
                }
                let factor = m[(i, col)].clone();
                for j in 0..n {
                    let a = &factor * &m[(col, j)];
                    m[(i, j)] -= a;
                    let b = &factor * &inv[(col, j)];
                    inv[(i, j)] -= b;
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Least `d > 0` with `d * self` integral.
    pub fn denominator(&self) -> BigInt {
        let mut d = BigInt::one();
        for x in &self.data {
            d = d.lcm(x.denom());
        }
        d
    }

    pub fn to_integer_scaled(&self) -> (IntMatrix, BigInt) {
        let d = self.denominator();
        let m = IntMatrix::from_fn(self.rows, self.cols, |i, j| {
            let x = &self[(i, j)] * Rat::from_integer(d.clone());
            debug_assert!(x.is_integer());
            x.to_integer()
        });
        (m, d)
    }

    pub fn to_f64(&self, mut conv: impl FnMut(&Rat) -> f64) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).iter().map(&mut conv).collect()).collect()
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl std::fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows_i64(rows: Vec<Vec<i64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c));
        IntMatrix { rows: r, cols: c, data: rows.into_iter().flatten().map(BigInt::from).collect() }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rational(&self) -> RatMatrix {
        RatMatrix::from_fn(self.rows, self.cols, |i, j| Rat::from_integer(self[(i, j)].clone()))
    }

    pub fn det(&self) -> BigInt {
        let d = self.to_rational().det();
        debug_assert!(d.is_integer());
        d.to_integer()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn add_multiple_of_row(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let add = factor * &self[(source, j)];
            self[(target, j)] += add;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self[(i, j)].clone();
            self[(i, j)] = v;
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn add_multiple_of_col(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let add = factor * &self[(i, source)];
            self[(i, target)] += add;
        }
    }


    /// Hermite normal form by unimodular row operations.
    ///
    /// Returns `(h, u)` with `h = u * self`, `u` unimodular. Pivots are
    /// placed bottom-up, one per column right-to-left, so a full-column-rank
    /// input ends with the lattice basis in the last `ncols` rows, lower
    /// triangular, pivots positive, entries below each pivot in `[0, pivot)`.
    pub fn hnf(&self) -> (IntMatrix, IntMatrix) {
        let mut h = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut next_pivot = self.rows as isize - 1;
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        for col in (0..self.cols).rev() {
            if next_pivot < 0 {
                break;
            }
            let last_active = next_pivot as usize;
            // Euclidean elimination: leave at most one nonzero in this
            // column among the active rows.
            loop {
                let mut nonzero: Vec<usize> =
                    (0..=last_active).filter(|&i| !h[(i, col)].is_zero()).collect();
                if nonzero.len() <= 1 {
                    break;
                }
                nonzero.sort_by(|&a, &b| h[(a, col)].abs().cmp(&h[(b, col)].abs()));
                let pivot = nonzero[0];
                let p = h[(pivot, col)].clone();
                for &i in &nonzero[1..] {
                    let q = -(&h[(i, col)] / &p);
                    h.add_multiple_of_row(i, pivot, &q);
                    u.add_multiple_of_row(i, pivot, &q);
                }
            }
            let found = (0..=last_active).find(|&i| !h[(i, col)].is_zero());
            if let Some(i) = found {
                h.swap_rows(i, last_active);
                u.swap_rows(i, last_active);
                if h[(last_active, col)].is_negative() {
                    h.negate_row(last_active);
                    u.negate_row(last_active);
                }
                pivots.push((last_active, col));
                next_pivot -= 1;
            }
        }
        // Reduce entries below each pivot into [0, pivot).
        for &(prow, pcol) in &pivots {
            let p = h[(prow, pcol)].clone();
            for i in prow + 1..self.rows {
                let q = -h[(i, pcol)].div_floor(&p);
                h.add_multiple_of_row(i, prow, &q);
                u.add_multiple_of_row(i, prow, &q);
            }
        }
        (h, u)
    }

    /// Smith normal form: returns `(s, u, v)` with `s = u * self * v`,
    /// `u`, `v` unimodular and `s` diagonal with `s[i] | s[i+1]`.
    pub fn snf(&self) -> (IntMatrix, IntMatrix, IntMatrix) {
        let mut s = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut v = IntMatrix::identity(self.cols);
        let n = self.rows.min(self.cols);
        for t in 0..n {
            loop {
                // Move a minimal-magnitude nonzero entry to (t, t).
                let mut best: Option<(usize, usize)> = None;
                for i in t..self.rows {
                    for j in t..self.cols {
                        if s[(i, j)].is_zero() {
                            continue;
                        }
                        match best {
                            None => best = Some((i, j)),
                            Some((bi, bj)) => {
                                if s[(i, j)].abs() < s[(bi, bj)].abs() {
                                    best = Some((i, j));
                                }
                            }
                        }
                    }
                }
                let (bi, bj) = match best {
                    None => break,
                    Some(p) => p,
                };
                s.swap_rows(bi, t);
                u.swap_rows(bi, t);
                s.swap_cols(bj, t);
                v.swap_cols(bj, t);
                let p = s[(t, t)].clone();
                let mut dirty = false;
                for i in t + 1..self.rows {
                    if !s[(i, t)].is_zero() {
                        let q = -(&s[(i, t)] / &p);
                        s.add_multiple_of_row(i, t, &q);
                        u.add_multiple_of_row(i, t, &q);
                        if !s[(i, t)].is_zero() {
                            dirty = true;
                        }
                    }
                }
                for j in t + 1..self.cols {
                    if !s[(t, j)].is_zero() {
                        let q = -(&s[(t, j)] / &p);
                        s.add_multiple_of_col(j, t, &q);
                        v.add_multiple_of_col(j, t, &q);
                        if !s[(t, j)].is_zero() {
                            dirty = true;
                        }
                    }
                }
                if dirty {
                    continue;
                }
                // Row and column are clear; enforce divisibility of the
                // remaining block by the pivot.
                let mut fixed = true;
                'scan: for i in t + 1..self.rows {
                    for j in t + 1..self.cols {
                        if !(&s[(i, j)] % &p).is_zero() {
                            s.add_multiple_of_row(t, i, &BigInt::one());
                            u.add_multiple_of_row(t, i, &BigInt::one());
                            fixed = false;
                            break 'scan;
                        }
                    }
                }
                if fixed {
                    break;
                }
            }
            if s[(t, t)].is_negative() {
                s.negate_row(t);
                u.negate_row(t);
            }
        }
        (s, u, v)
    }

    /// Diagonal of the Smith form, nonzero entries only.
    pub fn elementary_divisors(&self) -> Vec<BigInt> {
        let (s, _, _) = self.snf();
        (0..self.rows.min(self.cols))
            .map(|i| s[(i, i)].clone())
            .filter(|d| !d.is_zero())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn im(rows: Vec<Vec<i64>>) -> IntMatrix {
        IntMatrix::from_rows_i64(rows)
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rat("3/4").unwrap(), rat_frac(3, 4));
        assert_eq!(parse_rat("-7").unwrap(), rat(-7));
        assert_eq!(parse_rat(" 1 / 2 ").unwrap(), rat_frac(1, 2));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn det_and_inverse() {
        let m = RatMatrix::from_rows(vec![
            vec![rat(2), rat(1)],
            vec![rat(1), rat(1)],
        ]);
        assert_eq!(m.det(), rat(1));
        let inv = m.try_inverse().unwrap();
        assert_eq!(m.mul(&inv), RatMatrix::identity(2));
    }

    #[test]
    fn singular_inverse_fails() {
        let m = RatMatrix::from_rows(vec![
            vec![rat(1), rat(2)],
            vec![rat(2), rat(4)],
        ]);
        assert_eq!(m.try_inverse(), Err(MatrixError::Singular));
        assert_eq!(m.det(), rat(0));
    }

    #[test]
    fn hnf_of_unimodular_is_identity() {
        let m = im(vec![vec![2, 3], vec![1, 2]]); // det 1
        let (h, u) = m.hnf();
        assert_eq!(h, IntMatrix::identity(2));
        assert_eq!(u.det().abs(), BigInt::one());
    }

    #[test]
    fn hnf_shape_and_transform() {
        let m = im(vec![vec![4, 6], vec![2, 2]]);
        let (h, u) = m.hnf();
        assert_eq!(u.to_rational().mul(&m.to_rational()), h.to_rational());
        assert_eq!(u.det().abs(), BigInt::one());
        // Lower triangular with positive pivots.
        assert!(h[(0, 1)].is_zero());
        assert!(h[(0, 0)] > BigInt::zero());
        assert!(h[(1, 1)] > BigInt::zero());
    }

    #[test]
    fn snf_diag_2_6_stays() {
        let m = im(vec![vec![2, 0], vec![0, 6]]);
        let (s, _, _) = m.snf();
        assert_eq!(s, im(vec![vec![2, 0], vec![0, 6]]));
    }

    #[test]
    fn snf_diag_2_3_becomes_1_6() {
        let m = im(vec![vec![2, 0], vec![0, 3]]);
        let (s, u, v) = m.snf();
        assert_eq!(s, im(vec![vec![1, 0], vec![0, 6]]));
        let prod = u.to_rational().mul(&m.to_rational()).mul(&v.to_rational());
        assert_eq!(prod, s.to_rational());
    }

    proptest! {
        #[test]
        fn hnf_invariant_under_unimodular_left_multiply(
            a in -5i64..=5, b in -5i64..=5, c in -5i64..=5,
            m00 in -9i64..=9, m01 in -9i64..=9, m10 in -9i64..=9, m11 in -9i64..=9,
        ) {
            let m = im(vec![vec![m00, m01], vec![m10, m11]]);
            prop_assume!(!m.det().is_zero());
            // Unimodular factor from elementary generators.
            let g = im(vec![vec![1, a], vec![0, 1]]);
            let g2 = im(vec![vec![1, 0], vec![b, 1]]);
            let g3 = if c % 2 == 0 { im(vec![vec![0, 1], vec![1, 0]]) } else { IntMatrix::identity(2) };
            let gm = IntMatrix::from_fn(2, 2, |i, j| {
                let r = g.to_rational().mul(&g2.to_rational()).mul(&g3.to_rational()).mul(&m.to_rational());
                r[(i, j)].to_integer()
            });
            prop_assert_eq!(m.hnf().0, gm.hnf().0);
        }

        #[test]
        fn snf_transforms_are_unimodular(
            m00 in -9i64..=9, m01 in -9i64..=9, m10 in -9i64..=9, m11 in -9i64..=9,
        ) {
            let m = im(vec![vec![m00, m01], vec![m10, m11]]);
            let (s, u, v) = m.snf();
            prop_assert_eq!(u.det().abs(), BigInt::one());
            prop_assert_eq!(v.det().abs(), BigInt::one());
            let prod = u.to_rational().mul(&m.to_rational()).mul(&v.to_rational());
            prop_assert_eq!(prod, s.to_rational());
            // Divisibility chain.
            let divs: Vec<_> = (0..2).map(|i| s[(i, i)].clone()).collect();
            if !divs[0].is_zero() && !divs[1].is_zero() {
                prop_assert!((&divs[1] % &divs[0]).is_zero());
            }
        }
    }
}
