//! Second cohomology with trivial coefficients and central extensions.
//!
//! A bilinear form on an `n`-dimensional algebra is an `n x n` matrix whose
//! `(i, j)` entry is the coefficient of `Delta_ij`, i.e. the value on
//! `(e_i, e_j)`. Forms are flattened row-major (`Delta_11 < Delta_12 < ...`)
//! when treated as vectors.

use crate::algebra::{Algebra, Side};
use crate::arith::{Field, Ring};
use crate::linalg::{nullspace, quotient_reps, LinalgError, Matrix, Subspace};

pub type BilinearForm<F> = Matrix<F>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CohomologyError {
    #[error("form {index} is not a cocycle")]
    NotCocycle { index: usize },
    #[error("form {index} has shape {rows}x{cols}, expected {n}x{n}")]
    Shape { index: usize, rows: usize, cols: usize, n: usize },
    #[error("an extension needs at least one cocycle")]
    Empty,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub fn form_to_vec<R: Ring>(f: &BilinearForm<R>) -> Vec<R> {
    f.data().to_vec()
}

pub fn vec_to_form<R: Ring>(n: usize, v: &[R]) -> BilinearForm<R> {
    Matrix::from_flat(n, n, v.to_vec()).expect("n*n entries")
}

/// `Delta_ij`, zero-based.
pub fn delta<R: Ring>(n: usize, i: usize, j: usize) -> BilinearForm<R> {
    let mut m = Matrix::zeros(n, n);
    m.set(i, j, R::one());
    m
}

/// Rows of the linear system cutting out `Z^2` inside the `n^2` form space.
fn cocycle_constraints<F: Field>(a: &Algebra<F>) -> Vec<Vec<F>> {
    let n = a.dim();
    let mut rows = Vec::new();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                // theta(xy, z) - theta(xz, y)
                let mut r = vec![F::zero(); n * n];
                for k in 0..n {
                    let c1 = a.get(x, y, k);
                    if !c1.is_zero() {
                        r[k * n + z] = r[k * n + z].plus(c1);
                    }
                    let c2 = a.get(x, z, k);
                    if !c2.is_zero() {
                        r[k * n + y] = r[k * n + y].minus(c2);
                    }
                }
                if r.iter().any(|v| !v.is_zero()) {
                    rows.push(r);
                }
                // theta(x, yz) - theta(y, xz)
                let mut r = vec![F::zero(); n * n];
                for k in 0..n {
                    let c1 = a.get(y, z, k);
                    if !c1.is_zero() {
                        r[x * n + k] = r[x * n + k].plus(c1);
                    }
                    let c2 = a.get(x, z, k);
                    if !c2.is_zero() {
                        r[y * n + k] = r[y * n + k].minus(c2);
                    }
                }
                if r.iter().any(|v| !v.is_zero()) {
                    rows.push(r);
                }
            }
        }
    }
    rows
}

fn kernel_of_rows<F: Field>(width: usize, rows: Vec<Vec<F>>) -> Subspace<F> {
    if rows.is_empty() {
        return Subspace::full(width);
    }
    nullspace(&Matrix::from_rows(rows).expect("rectangular"))
}

pub fn cocycle_space<F: Field>(a: &Algebra<F>) -> Subspace<F> {
    let n = a.dim();
    kernel_of_rows(n * n, cocycle_constraints(a))
}

/// `B^2`: spanned by `(x, y) -> f_k(xy)` for the dual basis `f_k`.
pub fn coboundary_space<F: Field>(a: &Algebra<F>) -> Subspace<F> {
    let n = a.dim();
    let vs = (0..n).map(|k| {
        let mut v = vec![F::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                v[i * n + j] = a.get(i, j, k).clone();
            }
        }
        v
    });
    Subspace::span(n * n, vs.collect::<Vec<_>>()).expect("lengths")
}

/// Symmetric cocycles.
pub fn commutative_cocycle_space<F: Field>(a: &Algebra<F>) -> Subspace<F> {
    let n = a.dim();
    let mut rows = cocycle_constraints(a);
    for i in 0..n {
        for j in i + 1..n {
            let mut r = vec![F::zero(); n * n];
            r[i * n + j] = F::one();
            r[j * n + i] = F::one().negate();
            rows.push(r);
        }
    }
    kernel_of_rows(n * n, rows)
}

/// `Z^2`, `B^2` and coset representatives for `H^2` and its commutative part.
#[derive(Debug, Clone)]
pub struct CohomologySpace<F> {
    pub n: usize,
    pub z2: Subspace<F>,
    pub b2: Subspace<F>,
    pub sym_z2: Subspace<F>,
    pub h2_reps: Vec<BilinearForm<F>>,
    pub h2_com_reps: Vec<BilinearForm<F>>,
}

impl<F: Field> CohomologySpace<F> {
    pub fn dim_h2(&self) -> usize {
        self.h2_reps.len()
    }

    pub fn dim_h2_com(&self) -> usize {
        self.h2_com_reps.len()
    }

    /// Dimension of the span of the classes of `forms` in `H^2`.
    pub fn class_rank(&self, forms: &[BilinearForm<F>]) -> usize {
        let s = Subspace::span(self.n * self.n, forms.iter().map(form_to_vec)).expect("lengths");
        s.sum(&self.b2).expect("ambient").dim() - self.b2.dim()
    }

    pub fn is_cocycle(&self, f: &BilinearForm<F>) -> bool {
        self.z2.contains(&form_to_vec(f))
    }
}

pub fn h2<F: Field>(a: &Algebra<F>) -> CohomologySpace<F> {
    let n = a.dim();
    let z2 = cocycle_space(a);
    let b2 = coboundary_space(a);
    let reps = quotient_reps(&z2, &b2).expect("coboundaries are cocycles for bicommutative algebras");
    let sym_z2 = commutative_cocycle_space(a);
    let mut acc = b2.clone();
    let mut com = Vec::new();
    for v in sym_z2.basis() {
        if !acc.contains(v) {
            acc = acc.sum(&Subspace::span(n * n, [v.clone()]).expect("lengths")).expect("ambient");
            com.push(vec_to_form(n, v));
        }
    }
    CohomologySpace {
        n,
        h2_reps: reps.iter().map(|v| vec_to_form(n, v)).collect(),
        h2_com_reps: com,
        z2,
        b2,
        sym_z2,
    }
}

/// `{x : theta(x, .) = 0 and theta(., x) = 0}`.
pub fn cocycle_annihilator<F: Field>(theta: &BilinearForm<F>) -> Subspace<F> {
    let n = theta.rows();
    let mut rows = Vec::with_capacity(2 * n);
    for j in 0..n {
        rows.push(theta.column(j));
    }
    for i in 0..n {
        rows.push(theta.row(i).to_vec());
    }
    kernel_of_rows(n, rows.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect())
}

/// Base algebra together with the cocycles `theta_1, ..., theta_s`.
#[derive(Clone)]
pub struct ExtensionSpec<F> {
    pub base: Algebra<F>,
    pub cocycles: Vec<BilinearForm<F>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SplitReason<F> {
    /// The classes `[theta_i]` are linearly dependent in `H^2`.
    DependentClasses { rank: usize, s: usize },
    /// A nonzero vector of `Ann(theta) ∩ Ann(A)`.
    AnnihilatorWitness(Vec<F>),
}

impl<F: Field> ExtensionSpec<F> {
    pub fn new(base: Algebra<F>, cocycles: Vec<BilinearForm<F>>) -> Result<Self, CohomologyError> {
        if cocycles.is_empty() {
            return Err(CohomologyError::Empty);
        }
        let n = base.dim();
        for (index, c) in cocycles.iter().enumerate() {
            if c.rows() != n || c.cols() != n {
                return Err(CohomologyError::Shape { index, rows: c.rows(), cols: c.cols(), n });
            }
        }
        Ok(ExtensionSpec { base, cocycles })
    }

    pub fn s(&self) -> usize {
        self.cocycles.len()
    }

    pub fn validate(&self) -> Result<(), CohomologyError> {
        let z2 = cocycle_space(&self.base);
        for (index, c) in self.cocycles.iter().enumerate() {
            if !z2.contains(&form_to_vec(c)) {
                return Err(CohomologyError::NotCocycle { index });
            }
        }
        Ok(())
    }

    /// `Ann(theta) = ∩ Ann(theta_i)`.
    pub fn theta_annihilator(&self) -> Subspace<F> {
        let n = self.base.dim();
        let mut acc = Subspace::full(n);
        for c in &self.cocycles {
            acc = acc.intersect(&cocycle_annihilator(c)).expect("ambient");
        }
        acc
    }

    /// `T_s` condition: `Ann(theta) ∩ Ann(A) = 0`; `Ok(Some(w))` gives a witness.
    pub fn ts_check(&self) -> Result<Option<Vec<F>>, CohomologyError> {
        self.validate()?;
        let inter = self.theta_annihilator().intersect(&self.base.annihilator(Side::TwoSided))?;
        Ok(inter.basis().first().cloned())
    }

    /// Independence of classes in `H^2` and the `T_s` condition.
    pub fn nonsplit_check(&self) -> Result<Result<(), SplitReason<F>>, CohomologyError> {
        self.validate()?;
        let n = self.base.dim();
        let b2 = coboundary_space(&self.base);
        let span = Subspace::span(n * n, self.cocycles.iter().map(form_to_vec)).expect("lengths");
        let rank = span.sum(&b2)?.dim() - b2.dim();
        if rank < self.s() {
            return Ok(Err(SplitReason::DependentClasses { rank, s: self.s() }));
        }
        Ok(match self.ts_check()? {
            None => Ok(()),
            Some(w) => Err(SplitReason::AnnihilatorWitness(w)),
        })
    }

    /// `A_theta = A ⊕ V` with `e_i e_j` gaining `theta_t(e_i, e_j) e_{n+t}`.
    pub fn central_extension(&self) -> Result<Algebra<F>, CohomologyError> {
        self.validate()?;
        Ok(self.extension_unchecked())
    }

    /// The extension product without checking the cocycle condition.
    pub fn extension_unchecked(&self) -> Algebra<F> {
        let n = self.base.dim();
        let m = n + self.s();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let c = self.base.get(i, j, k);
                    if !c.is_zero() {
                        entries.push((i, j, k, c.clone()));
                    }
                }
                for (t, th) in self.cocycles.iter().enumerate() {
                    let c = th.get(i, j);
                    if !c.is_zero() {
                        entries.push((i, j, n + t, c.clone()));
                    }
                }
            }
        }
        Algebra::from_entries(m, entries).expect("indices in range")
    }

    /// Compares `Ann(A_theta)` with `(Ann(theta) ∩ Ann(A)) ⊕ V`.
    pub fn annihilator_law(&self) -> Result<Result<(), (Subspace<F>, Subspace<F>)>, CohomologyError> {
        let ext = self.central_extension()?;
        let n = self.base.dim();
        let m = ext.dim();
        let lhs = ext.annihilator(Side::TwoSided);
        let inner = self.theta_annihilator().intersect(&self.base.annihilator(Side::TwoSided))?;
        let mut vs: Vec<Vec<F>> = inner
            .basis()
            .iter()
            .map(|b| {
                let mut v = b.clone();
                v.resize(m, F::zero());
                v
            })
            .collect();
        for t in n..m {
            vs.push((0..m).map(|k| if k == t { F::one() } else { F::zero() }).collect());
        }
        let rhs = Subspace::span(m, vs)?;
        Ok(if lhs == rhs { Ok(()) } else { Err((lhs, rhs)) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn alg(dim: usize, prods: &[(usize, usize, usize)]) -> Algebra<Rational> {
        Algebra::from_entries(dim, prods.iter().map(|&(i, j, k)| (i - 1, j - 1, k - 1, q(1)))).unwrap()
    }

    /// Sum of one-based `Delta_ij`.
    fn form(n: usize, ds: &[(usize, usize)]) -> BilinearForm<Rational> {
        let mut m = Matrix::<Rational>::zeros(n, n);
        for &(i, j) in ds {
            let v = m.get(i - 1, j - 1).clone() + q(1);
            m.set(i - 1, j - 1, v);
        }
        m
    }

    #[test]
    fn zero_algebra_spaces() {
        let z = Algebra::<Rational>::zero(3);
        assert_eq!(cocycle_space(&z).dim(), 9);
        assert!(coboundary_space(&z).is_zero());
        let h = h2(&z);
        assert_eq!(h.dim_h2(), 9);
        assert_eq!(h.dim_h2_com(), 6);
    }

    #[test]
    fn one_generator_square() {
        // e1 e1 = e2 in dimension 3
        let b = alg(3, &[(1, 1, 2)]);
        assert_eq!(cocycle_space(&b).dim(), 6);
        assert_eq!(coboundary_space(&b).dim(), 1);
        let h = h2(&b);
        assert_eq!((h.dim_h2(), h.dim_h2_com()), (5, 3));
    }

    #[test]
    fn cocycle_annihilator_examples() {
        let ann = cocycle_annihilator(&form(3, &[(1, 1)]));
        assert_eq!(ann.dim(), 2);
        assert!(ann.contains(&[q(0), q(1), q(0)]) && ann.contains(&[q(0), q(0), q(1)]));
        assert_eq!(cocycle_annihilator(&Matrix::<Rational>::zeros(3, 3)).dim(), 3);
        assert!(cocycle_annihilator(&form(4, &[(1, 4), (4, 1), (3, 3), (2, 1)])).is_zero());
    }

    #[test]
    fn first_extension_example() {
        let n01 = alg(4, &[(1, 1, 2)]);
        let theta = form(4, &[(1, 4), (4, 1), (3, 3), (2, 1)]);
        let spec = ExtensionSpec::new(n01, vec![theta]).unwrap();
        assert_eq!(spec.ts_check().unwrap(), None);
        assert_eq!(spec.nonsplit_check().unwrap(), Ok(()));
        let ext = spec.central_extension().unwrap();
        let expected = alg(5, &[(1, 1, 2), (1, 4, 5), (4, 1, 5), (3, 3, 5), (2, 1, 5)]);
        assert_eq!(ext.tensor(), expected.tensor());
        assert!(ext.is_bicommutative());
        assert_eq!(spec.annihilator_law().unwrap(), Ok(()));
        assert_eq!(ext.annihilator(Side::TwoSided).dim(), 1);
    }

    #[test]
    fn two_cocycle_extension_example() {
        let b = alg(3, &[(1, 2, 3)]);
        let spec = ExtensionSpec::new(b, vec![form(3, &[(1, 3)]), form(3, &[(3, 2)])]).unwrap();
        assert_eq!(spec.nonsplit_check().unwrap(), Ok(()));
        let ext = spec.central_extension().unwrap();
        assert_eq!(ext.tensor(), alg(5, &[(1, 2, 3), (1, 3, 4), (3, 2, 5)]).tensor());
    }

    #[test]
    fn split_detection() {
        let n01 = alg(4, &[(1, 1, 2)]);
        let zero = ExtensionSpec::new(n01.clone(), vec![Matrix::<Rational>::zeros(4, 4)]).unwrap();
        assert!(matches!(zero.nonsplit_check().unwrap(), Err(SplitReason::DependentClasses { .. })));
        assert!(zero.ts_check().unwrap().is_some());
        assert_eq!(zero.annihilator_law().unwrap(), Ok(()));
        // Delta_11 is the coboundary of the functional dual to e2
        let cob = ExtensionSpec::new(n01.clone(), vec![form(4, &[(1, 1)])]).unwrap();
        assert!(matches!(cob.nonsplit_check().unwrap(), Err(SplitReason::DependentClasses { rank: 0, s: 1 })));
        let t1 = form(4, &[(1, 4), (4, 1), (3, 3), (2, 1)]);
        let t2 = t1.add(&form(4, &[(1, 1)])).unwrap();
        let dep = ExtensionSpec::new(n01, vec![t1, t2]).unwrap();
        assert!(matches!(dep.nonsplit_check().unwrap(), Err(SplitReason::DependentClasses { rank: 1, s: 2 })));
    }

    #[test]
    fn non_cocycle_rejected() {
        let b = alg(3, &[(1, 1, 2)]);
        let spec = ExtensionSpec::new(b, vec![form(3, &[(2, 2)])]).unwrap();
        assert_eq!(spec.validate(), Err(CohomologyError::NotCocycle { index: 0 }));
        assert!(spec.central_extension().is_err());
        assert!(!spec.extension_unchecked().is_bicommutative());
    }
}
