use std::fmt;

use crate::arith::Field;

use super::matrix::{rref_rows, Matrix};
use super::LinalgError;

/// Subspace of `F^n` stored by its canonical rref basis.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace<F> {
    ambient: usize,
    basis: Vec<Vec<F>>,
}

impl<F: Field> Subspace<F> {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        let basis = (0..ambient).map(|i| unit(ambient, i)).collect();
        Subspace { ambient, basis }
    }

    /// Span of the given vectors.
    pub fn span(ambient: usize, vectors: impl IntoIterator<Item = Vec<F>>) -> Result<Self, LinalgError> {
        let mut rows: Vec<Vec<F>> = Vec::new();
        for v in vectors {
            if v.len() != ambient {
                return Err(LinalgError::Shape(format!(
                    "vector of length {} in ambient dimension {ambient}",
                    v.len()
                )));
            }
            rows.push(v);
        }
        let r = rref_rows(&mut rows, ambient).len();
        rows.truncate(r);
        Ok(Subspace { ambient, basis: rows })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<F>] {
        &self.basis
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|v| v.iter().position(|x| !x.is_zero()).expect("nonzero basis vector"))
            .collect()
    }

    /// Reduction of `v` against the basis; zero iff `v` lies in the subspace.
    pub fn reduce(&self, v: &[F]) -> Vec<F> {
        let mut out = v.to_vec();
        for (b, p) in self.basis.iter().zip(self.pivots()) {
            if out[p].is_zero() {
                continue;
            }
            let f = out[p].clone();
            for (k, x) in b.iter().enumerate() {
                if !x.is_zero() {
                    out[k] = out[k].minus(&f.times(x));
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[F]) -> bool {
        v.len() == self.ambient && self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Coordinates of `v` in the canonical basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[F]) -> Option<Vec<F>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots().into_iter().map(|p| v[p].clone()).collect())
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|b| other.contains(b))
    }

    pub fn sum(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_ambient(other)?;
        Self::span(self.ambient, self.basis.iter().chain(&other.basis).cloned())
    }

    /// Intersection via the kernel of `[A^T | -B^T]`.
    pub fn intersect(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_ambient(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.ambient));
        }
        let (da, db) = (self.dim(), other.dim());
        let mut m = Matrix::<F>::zeros(self.ambient, da + db);
        for (j, b) in self.basis.iter().enumerate() {
            for (i, x) in b.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        for (j, b) in other.basis.iter().enumerate() {
            for (i, x) in b.iter().enumerate() {
                m.set(i, da + j, x.negate());
            }
        }
        let ker = nullspace(&m);
        let vecs = ker.basis.iter().map(|coef| {
            let mut v = vec![F::zero(); self.ambient];
            for (j, c) in coef[..da].iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (i, x) in self.basis[j].iter().enumerate() {
                    v[i] = v[i].plus(&c.times(x));
                }
            }
            v
        });
        Self::span(self.ambient, vecs.collect::<Vec<_>>())
    }

    fn check_ambient(&self, other: &Self) -> Result<(), LinalgError> {
        if self.ambient != other.ambient {
            return Err(LinalgError::Shape(format!(
                "ambient dimensions {} and {} differ",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }

    /// Image under a linear map given by a matrix acting on column vectors.
    pub fn image(&self, m: &Matrix<F>) -> Result<Self, LinalgError> {
        let imgs = self.basis.iter().map(|b| m.mul_vec(b)).collect::<Result<Vec<_>, _>>()?;
        Self::span(m.rows(), imgs)
    }
}

fn unit<F: Field>(n: usize, i: usize) -> Vec<F> {
    (0..n).map(|k| if k == i { F::one() } else { F::zero() }).collect()
}

/// Kernel `{v : m v = 0}` as a canonical subspace.
pub fn nullspace<F: Field>(m: &Matrix<F>) -> Subspace<F> {
    let n = m.cols();
    let mut rows = m.row_vecs();
    let pivots = rref_rows(&mut rows, n);
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let vecs: Vec<Vec<F>> = (0..n)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![F::zero(); n];
            v[free] = F::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = rows[r][free].negate();
            }
            v
        })
        .collect();
    Subspace::span(n, vecs).expect("consistent lengths")
}

/// Vectors completing a basis of `small` to one of `big`, chosen greedily
/// from the canonical basis of `big` in pivot order.
pub fn quotient_reps<F: Field>(big: &Subspace<F>, small: &Subspace<F>) -> Result<Vec<Vec<F>>, LinalgError> {
    if !small.is_subspace_of(big) {
        return Err(LinalgError::NotContained);
    }
    let mut acc = small.clone();
    let mut reps = Vec::new();
    for b in big.basis() {
        if !acc.contains(b) {
            reps.push(b.clone());
            acc = acc.sum(&Subspace::span(big.ambient(), [b.clone()])?)?;
        }
        if acc.dim() == big.dim() {
            break;
        }
    }
    Ok(reps)
}

impl<F: fmt::Debug> fmt::Debug for Subspace<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}): [", self.basis.len(), self.ambient)?;
        for (k, b) in self.basis.iter().enumerate() {
            let s: Vec<String> = b.iter().map(|x| format!("{x:?}")).collect();
            write!(f, "{}({})", if k > 0 { ", " } else { "" }, s.join(","))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Rational;

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| Rational::from_int(x)).collect()
    }

    #[test]
    fn nullspace_examples() {
        assert!(nullspace(&Matrix::<Rational>::identity(3)).is_zero());
        assert_eq!(nullspace(&Matrix::<Rational>::zeros(2, 3)).dim(), 3);
        let m = Matrix::from_rows(vec![v(&[1, 2, 3])]).unwrap();
        let k = nullspace(&m);
        assert_eq!(k.dim(), 2);
        for b in k.basis() {
            assert!(m.mul_vec(b).unwrap().iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn quotient_examples() {
        let big = Subspace::<Rational>::full(2);
        let small = Subspace::span(2, [v(&[1, 0])]).unwrap();
        assert_eq!(quotient_reps(&big, &small).unwrap(), vec![v(&[0, 1])]);
        assert!(quotient_reps(&big, &big).unwrap().is_empty());
        assert!(matches!(quotient_reps(&small, &big), Err(LinalgError::NotContained)));
    }

    #[test]
    fn intersect_examples() {
        let a = Subspace::span(3, [v(&[1, 0, 0]), v(&[0, 1, 0])]).unwrap();
        let b = Subspace::span(3, [v(&[0, 1, 0]), v(&[0, 0, 1])]).unwrap();
        assert_eq!(a.intersect(&b).unwrap(), Subspace::span(3, [v(&[0, 1, 0])]).unwrap());
        assert_eq!(a.intersect(&a).unwrap(), a);
        let l1 = Subspace::span(2, [v(&[1, 1])]).unwrap();
        let l2 = Subspace::span(2, [v(&[1, -1])]).unwrap();
        assert!(l1.intersect(&l2).unwrap().is_zero());
        assert!(a.intersect(&Subspace::zero(4)).is_err());
    }

    #[test]
    fn canonical_equality() {
        let a = Subspace::span(3, [v(&[1, 1, 0]), v(&[1, -1, 0])]).unwrap();
        let b = Subspace::span(3, [v(&[2, 0, 0]), v(&[0, 3, 0])]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.coordinates(&v(&[4, 5, 0])), Some(v(&[4, 5])));
        assert_eq!(a.coordinates(&v(&[0, 0, 1])), None);
    }
}
