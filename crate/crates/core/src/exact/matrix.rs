use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_traits::{One, Zero};

use super::{display_rational, to_f64, Rational};
use crate::error::{Error, Result};

/// Dense row-major matrix of rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let n = rows.len();
        Ok(Self {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn column(values: Vec<Rational>) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            data: values,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col_values(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = Rational::zero();
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if !a.is_zero() {
                    acc += a * &rhs[(k, j)];
                }
            }
            acc
        }))
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|i| ((i + 1)..self.cols).all(|j| self[(i, j)].is_zero()))
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self[(i, j)].is_zero()))
    }

    pub fn diagonal(&self) -> Vec<Rational> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].clone())
            .collect()
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "inverse of a non-square matrix".into(),
            ));
        }
        solve_linear(self, &Self::identity(self.rows))
    }

    /// Exact determinant by elimination.
    pub fn determinant(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "determinant of a non-square matrix".into(),
            ));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a[(r, col)].is_zero()) else {
                return Ok(Rational::zero());
            };
            if pivot != col {
                a.swap_rows(pivot, col);
                det = -det;
            }
            let p = a[(col, col)].clone();
            det *= &p;
            for r in (col + 1)..n {
                let factor = &a[(r, col)] / &p;
                if factor.is_zero() {
                    continue;
                }
                for c in col..n {
                    let delta = &factor * &a[(col, c)];
                    a[(r, c)] -= delta;
                }
            }
        }
        Ok(det)
    }

    /// Determinants of the leading `k×k` blocks, `k = 1..=n`.
    pub fn leading_principal_minors(&self) -> Result<Vec<Rational>> {
        (1..=self.rows.min(self.cols))
            .map(|k| Self::from_fn(k, k, |i, j| self[(i, j)].clone()).determinant())
            .collect()
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(to_f64).collect())
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &RatMatrix {
    type Output = RatMatrix;

    /// Panics on incompatible shapes; see [`RatMatrix::checked_mul`].
    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        self.checked_mul(rhs).expect("incompatible matrix shapes")
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(display_rational).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Solves `a · x = rhs` exactly by Gauss-Jordan elimination. Any nonzero
/// entry is an acceptable pivot over the rationals.
pub fn solve_linear(a: &RatMatrix, rhs: &RatMatrix) -> Result<RatMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(
            "coefficient matrix is not square".into(),
        ));
    }
    if rhs.rows != a.rows {
        return Err(Error::DimensionMismatch(format!(
            "{} equations but right-hand side has {} rows",
            a.rows, rhs.rows
        )));
    }
    let n = a.rows;
    let mut m = a.clone();
    let mut x = rhs.clone();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !m[(r, col)].is_zero())
            .ok_or(Error::Singular)?;
        m.swap_rows(pivot, col);
        x.swap_rows(pivot, col);

        let inv = m[(col, col)].recip();
        for c in col..n {
            m[(col, c)] *= &inv;
        }
        for c in 0..x.cols {
            x[(col, c)] *= &inv;
        }
        for r in 0..n {
            if r == col || m[(r, col)].is_zero() {
                continue;
            }
            let factor = m[(r, col)].clone();
            for c in col..n {
                let delta = &factor * &m[(col, c)];
                m[(r, c)] -= delta;
            }
            for c in 0..x.cols {
                let delta = &factor * &x[(col, c)];
                x[(r, c)] -= delta;
            }
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn identity_solve() {
        let b = RatMatrix::column(vec![int(1), rat(-2, 3), int(7)]);
        assert_eq!(solve_linear(&RatMatrix::identity(3), &b).unwrap(), b);
    }

    #[test]
    fn hilbert_two_by_two() {
        let a = RatMatrix::from_rows(vec![vec![int(1), rat(1, 2)], vec![rat(1, 2), rat(1, 3)]])
            .unwrap();
        let x = solve_linear(&a, &RatMatrix::column(vec![int(1), int(0)])).unwrap();
        assert_eq!(x, RatMatrix::column(vec![int(4), int(-6)]));
    }

    #[test]
    fn singular_is_reported() {
        let a = RatMatrix::from_rows(vec![vec![int(1), int(1)], vec![int(1), int(1)]]).unwrap();
        let b = RatMatrix::column(vec![int(1), int(0)]);
        assert_eq!(solve_linear(&a, &b), Err(Error::Singular));
        assert_eq!(a.determinant().unwrap(), int(0));
    }

    #[test]
    fn zero_pivot_needs_row_swap() {
        let a = RatMatrix::from_rows(vec![vec![int(0), int(1)], vec![int(1), int(0)]]).unwrap();
        let b = RatMatrix::column(vec![int(3), int(5)]);
        assert_eq!(
            solve_linear(&a, &b).unwrap(),
            RatMatrix::column(vec![int(5), int(3)])
        );
        assert_eq!(a.determinant().unwrap(), int(-1));
    }

    #[test]
    fn shape_errors() {
        let a = RatMatrix::zeros(2, 3);
        assert!(matches!(
            solve_linear(&a, &RatMatrix::zeros(2, 1)),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(RatMatrix::from_rows(vec![vec![int(1)], vec![]]).is_err());
    }

    fn arb_matrix(n: usize) -> impl Strategy<Value = RatMatrix> {
        proptest::collection::vec((-9i64..10, 1i64..5), n * n).prop_map(move |v| {
            let mut it = v.into_iter();
            RatMatrix::from_fn(n, n, |_, _| {
                let (p, q) = it.next().unwrap();
                rat(p, q)
            })
        })
    }

    proptest! {
        #[test]
        fn solve_recovers_solution(
            (a, x) in (1usize..=8).prop_flat_map(|n| (arb_matrix(n), arb_matrix(n)))
        ) {
            // Columns of x double as several right-hand sides.
            let b = &a * &x;
            match solve_linear(&a, &b) {
                Ok(sol) => prop_assert_eq!(sol, x),
                Err(Error::Singular) => prop_assert_eq!(a.determinant().unwrap(), int(0)),
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }
    }
}
