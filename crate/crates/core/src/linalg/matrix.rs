use std::fmt;

use crate::arith::{Field, Ring};

use super::LinalgError;

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<R> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

impl<R: Ring> Matrix<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![R::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = R::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::Shape("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<R>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(n: usize, cols: &[Vec<R>]) -> Self {
        let mut m = Self::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                m.set(i, j, c[i].clone());
            }
        }
        m
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

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[R] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<R> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<R>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn data(&self) -> &[R] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Matrix<S> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<S: Ring, E>(&self, f: impl Fn(&R) -> Result<S, E>) -> Result<Matrix<S>, E> {
        let data = self.data.iter().map(f).collect::<Result<Vec<_>, E>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * rhs.cols + j;
                    out.data[idx] = out.data[idx].plus(&a.times(b));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[R]) -> Result<Vec<R>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::Shape(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).fold(R::zero(), |acc, (a, b)| {
                    if a.is_zero() || b.is_zero() {
                        acc
                    } else {
                        acc.plus(&a.times(b))
                    }
                })
            })
            .collect())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, LinalgError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(LinalgError::Shape("sum of differently shaped matrices".into()));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.plus(b)).collect(),
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, LinalgError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(LinalgError::Shape("difference of differently shaped matrices".into()));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.minus(b)).collect(),
        })
    }

    pub fn scale(&self, k: &R) -> Self {
        self.map(|x| x.times(k))
    }

    /// Determinant by cofactor expansion along the sparsest row; valid over any ring.
    pub fn det_expand(&self) -> Result<R, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::Shape("determinant of a non-square matrix".into()));
        }
        let idx: Vec<usize> = (0..self.cols).collect();
        Ok(self.minor_det(&(0..self.rows).collect::<Vec<_>>(), &idx))
    }

    /// Determinant of the submatrix on the given rows and columns.
    pub fn minor_det(&self, rows: &[usize], cols: &[usize]) -> R {
        match rows.len() {
            0 => R::one(),
            1 => self.get(rows[0], cols[0]).clone(),
            2 => {
                let (a, b) = (self.get(rows[0], cols[0]), self.get(rows[0], cols[1]));
                let (c, d) = (self.get(rows[1], cols[0]), self.get(rows[1], cols[1]));
                a.times(d).minus(&b.times(c))
            }
            _ => {
                let r = *rows
                    .iter()
                    .max_by_key(|&&r| cols.iter().filter(|&&c| self.get(r, c).is_zero()).count())
                    .unwrap();
                let pos = rows.iter().position(|&x| x == r).unwrap();
                let rest_rows: Vec<usize> = rows.iter().copied().filter(|&x| x != r).collect();
                let mut acc = R::zero();
                for (k, &c) in cols.iter().enumerate() {
                    let a = self.get(r, c);
                    if a.is_zero() {
                        continue;
                    }
                    let rest_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                    let term = a.times(&self.minor_det(&rest_rows, &rest_cols));
                    acc = if (pos + k) % 2 == 0 { acc.plus(&term) } else { acc.minus(&term) };
                }
                acc
            }
        }
    }
}

/// Reduced row echelon form with its pivot columns.
pub struct Rref<F> {
    pub matrix: Matrix<F>,
    pub pivots: Vec<usize>,
}

impl<F: Field> Rref<F> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

impl<F: Field> Matrix<F> {
    /// Unique reduced row echelon form; pivots are the first nonzero entry per column.
    pub fn rref(&self) -> Rref<F> {
        let mut rows: Vec<Vec<F>> = self.row_vecs();
        let pivots = rref_rows(&mut rows, self.cols);
        let mut data = Vec::with_capacity(self.rows * self.cols);
        for r in rows {
            data.extend(r);
        }
        Rref { matrix: Matrix { rows: self.rows, cols: self.cols, data }, pivots }
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.row_vecs();
        rref_rows(&mut rows, self.cols).len()
    }

    pub fn inverse(&self) -> Result<Self, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::Shape("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut rows: Vec<Vec<F>> = (0..n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
                r
            })
            .collect();
        let piv = rref_rows(&mut rows, n);
        if piv.len() < n || piv.iter().enumerate().any(|(i, &p)| p != i) {
            return Err(LinalgError::Singular);
        }
        Ok(Matrix { rows: n, cols: n, data: rows.into_iter().flat_map(|r| r[n..].to_vec()).collect() })
    }

    pub fn det(&self) -> Result<F, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::Shape("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.row_vecs();
        let mut det = F::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
                return Ok(F::zero());
            };
            if p != c {
                a.swap(p, c);
                det = det.negate();
            }
            let pv = a[c][c].clone();
            det = det.times(&pv);
            let inv = pv.inverse().expect("nonzero pivot");
            for r in c + 1..n {
                if a[r][c].is_zero() {
                    continue;
                }
                let f = a[r][c].times(&inv);
                for k in c..n {
                    let t = f.times(&a[c][k]);
                    a[r][k] = a[r][k].minus(&t);
                }
            }
        }
        Ok(det)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Some solution of `self * x = b`, or `None` when inconsistent.
    pub fn solve(&self, b: &[F]) -> Result<Option<Vec<F>>, LinalgError> {
        if b.len() != self.rows {
            return Err(LinalgError::Shape("right-hand side length".into()));
        }
        let n = self.cols;
        let mut rows: Vec<Vec<F>> = (0..self.rows)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.push(b[i].clone());
                r
            })
            .collect();
        let piv = rref_rows(&mut rows, n + 1);
        if piv.last() == Some(&n) {
            return Ok(None);
        }
        let mut x = vec![F::zero(); n];
        for (r, &p) in piv.iter().enumerate() {
            x[p] = rows[r][n].clone();
        }
        Ok(Some(x))
    }
}

/// In-place rref of `rows` over the first `ncols` columns; returns pivot columns.
pub(crate) fn rref_rows<F: Field>(rows: &mut [Vec<F>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inverse().expect("nonzero pivot");
        if !inv.is_one() {
            for x in rows[r].iter_mut() {
                if !x.is_zero() {
                    *x = x.times(&inv);
                }
            }
        }
        let (before, rest) = rows.split_at_mut(r);
        let (pivot_row, after) = rest.split_first_mut().unwrap();
        for other in before.iter_mut().chain(after.iter_mut()) {
            if other[c].is_zero() {
                continue;
            }
            let f = other[c].clone();
            for (k, pv) in pivot_row.iter().enumerate().skip(c) {
                if !pv.is_zero() {
                    other[k] = other[k].minus(&f.times(pv));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

impl<R: fmt::Debug> fmt::Display for Matrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> =
                self.data[i * self.cols..(i + 1) * self.cols].iter().map(|x| format!("{x:?}")).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<R: fmt::Debug> fmt::Debug for Matrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}x{}\n{}", self.rows, self.cols, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{MultiPoly, Rational};

    fn qm(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Rational::from_int(x)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn rref_examples() {
        let id = Matrix::<Rational>::identity(3);
        let r = id.rref();
        assert_eq!(r.matrix, id);
        assert_eq!(r.pivots, vec![0, 1, 2]);
        let z = Matrix::<Rational>::zeros(2, 3);
        assert_eq!(z.rref().rank(), 0);
        let m = qm(&[&[1, 2], &[2, 4]]);
        let r = m.rref();
        assert_eq!(r.matrix, qm(&[&[1, 2], &[0, 0]]));
        assert_eq!(r.rank(), 1);
    }

    #[test]
    fn inverse_and_det() {
        let m = qm(&[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(2));
        assert_eq!(m.det().unwrap(), Rational::one());
        assert!(qm(&[&[1, 2], &[2, 4]]).inverse().is_err());
        let m3 = qm(&[&[1, 2, 3], &[0, 1, 4], &[5, 6, 0]]);
        assert_eq!(m3.det().unwrap(), m3.det_expand().unwrap());
    }

    #[test]
    fn solve_consistent_and_not() {
        let m = qm(&[&[1, 1], &[1, -1]]);
        let x = m.solve(&[Rational::from_int(3), Rational::from_int(1)]).unwrap().unwrap();
        assert_eq!(x, vec![Rational::from_int(2), Rational::from_int(1)]);
        let s = qm(&[&[1, 1], &[2, 2]]);
        assert!(s.solve(&[Rational::one(), Rational::one()]).unwrap().is_none());
    }

    #[test]
    fn polynomial_determinant() {
        let v = crate::arith::var_list(&["x", "y"]);
        let x = MultiPoly::var(&v, "x").unwrap();
        let y = MultiPoly::var(&v, "y").unwrap();
        let m = Matrix::from_rows(vec![vec![x.clone(), y.clone()], vec![MultiPoly::zero(), x.clone()]]).unwrap();
        assert_eq!(m.det_expand().unwrap(), x.mul(&x));
    }
}
