//! Algebras given by structure constants.

mod fingerprint;

use std::collections::BTreeMap;
use std::fmt;

use crate::arith::{ArithError, Field, MultiPoly, Rational, Ring};
use crate::linalg::{LinalgError, Matrix, Subspace};

pub use fingerprint::{fingerprint, Fingerprint};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("vector of length {got} for an algebra of dimension {dim}")]
    Length { got: usize, dim: usize },
    #[error("basis index {0} out of range")]
    Index(usize),
    #[error("algebra is parametric in {0:?}; instantiate it first")]
    Parametric(Vec<String>),
    #[error("parameter {name} = {value} is excluded")]
    Excluded { name: String, value: String },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Declared parameter of a parametric family, with its excluded values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamDecl {
    pub name: String,
    pub excluded: Vec<Rational>,
}

/// Finite-dimensional algebra: `e_i e_j = sum_k c[i][j][k] e_k`.
#[derive(Clone, PartialEq)]
pub struct Algebra<R> {
    name: Option<String>,
    dim: usize,
    params: Vec<ParamDecl>,
    c: Vec<R>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdentitySpec {
    /// `(xy)z = (xz)y`
    RightCommutative,
    /// `x(yz) = y(xz)`
    LeftCommutative,
    /// `xy = yx`
    Commutative,
    /// `(xy)z = x(yz) = 0`
    TwoStep,
}

impl IdentitySpec {
    pub const ALL: [IdentitySpec; 4] = [
        IdentitySpec::RightCommutative,
        IdentitySpec::LeftCommutative,
        IdentitySpec::Commutative,
        IdentitySpec::TwoStep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentitySpec::RightCommutative => "right",
            IdentitySpec::LeftCommutative => "left",
            IdentitySpec::Commutative => "commutative",
            IdentitySpec::TwoStep => "twostep",
        }
    }
}

/// A basis triple (or pair, for commutativity) where an identity fails.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation<R> {
    pub basis: Vec<usize>,
    pub residual: Vec<R>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    TwoSided,
}

impl<R: Ring> Algebra<R> {
    pub fn zero(dim: usize) -> Self {
        Algebra { name: None, dim, params: Vec::new(), c: vec![R::zero(); dim * dim * dim] }
    }

    /// Builds an algebra from `(i, j, k, value)` entries, zero-based.
    pub fn from_entries(dim: usize, entries: impl IntoIterator<Item = (usize, usize, usize, R)>) -> Result<Self, AlgebraError> {
        let mut a = Self::zero(dim);
        for (i, j, k, v) in entries {
            for x in [i, j, k] {
                if x >= dim {
                    return Err(AlgebraError::Index(x));
                }
            }
            a.set(i, j, k, v);
        }
        Ok(a)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_params(mut self, params: Vec<ParamDecl>) -> Self {
        self.params = params;
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> &[ParamDecl] {
        &self.params
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &R {
        &self.c[self.idx(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: R) {
        let ix = self.idx(i, j, k);
        self.c[ix] = v;
    }

    /// Coordinates of `e_i e_j`.
    pub fn product(&self, i: usize, j: usize) -> &[R] {
        let s = self.idx(i, j, 0);
        &self.c[s..s + self.dim]
    }

    pub fn tensor(&self) -> &[R] {
        &self.c
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Algebra<S> {
        Algebra { name: self.name.clone(), dim: self.dim, params: self.params.clone(), c: self.c.iter().map(f).collect() }
    }

    pub fn try_map<S: Ring, E>(&self, f: impl Fn(&R) -> Result<S, E>) -> Result<Algebra<S>, E> {
        let c = self.c.iter().map(f).collect::<Result<Vec<_>, E>>()?;
        Ok(Algebra { name: self.name.clone(), dim: self.dim, params: self.params.clone(), c })
    }

    pub fn multiply(&self, u: &[R], v: &[R]) -> Result<Vec<R>, AlgebraError> {
        for w in [u, v] {
            if w.len() != self.dim {
                return Err(AlgebraError::Length { got: w.len(), dim: self.dim });
            }
        }
        let n = self.dim;
        let mut out = vec![R::zero(); n];
        for i in 0..n {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if v[j].is_zero() {
                    continue;
                }
                let s = u[i].times(&v[j]);
                for (k, c) in self.product(i, j).iter().enumerate() {
                    if !c.is_zero() {
                        out[k] = out[k].plus(&s.times(c));
                    }
                }
            }
        }
        Ok(out)
    }

    fn basis_times(&self, i: usize, v: &[R]) -> Vec<R> {
        let mut out = vec![R::zero(); self.dim];
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (k, c) in self.product(i, j).iter().enumerate() {
                if !c.is_zero() {
                    out[k] = out[k].plus(&x.times(c));
                }
            }
        }
        out
    }

    fn times_basis(&self, v: &[R], j: usize) -> Vec<R> {
        let mut out = vec![R::zero(); self.dim];
        for (i, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (k, c) in self.product(i, j).iter().enumerate() {
                if !c.is_zero() {
                    out[k] = out[k].plus(&x.times(c));
                }
            }
        }
        out
    }

    /// Checks an identity on all basis tuples; multilinearity makes this complete.
    pub fn check_identity(&self, spec: IdentitySpec) -> Result<(), Vec<Violation<R>>> {
        let n = self.dim;
        let mut bad = Vec::new();
        let sub = |x: &[R], y: &[R]| -> Vec<R> { x.iter().zip(y).map(|(a, b)| a.minus(b)).collect() };
        match spec {
            IdentitySpec::Commutative => {
                for i in 0..n {
                    for j in i + 1..n {
                        let r = sub(self.product(i, j), self.product(j, i));
                        if r.iter().any(|x| !x.is_zero()) {
                            bad.push(Violation { basis: vec![i, j], residual: r });
                        }
                    }
                }
            }
            _ => {
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..n {
                            let residual = match spec {
                                IdentitySpec::RightCommutative => {
                                    let l = self.times_basis(self.product(a, b), c);
                                    let r = self.times_basis(self.product(a, c), b);
                                    sub(&l, &r)
                                }
                                IdentitySpec::LeftCommutative => {
                                    let l = self.basis_times(a, self.product(b, c));
                                    let r = self.basis_times(b, self.product(a, c));
                                    sub(&l, &r)
                                }
                                IdentitySpec::TwoStep => {
                                    let l = self.times_basis(self.product(a, b), c);
                                    if l.iter().any(|x| !x.is_zero()) {
                                        l
                                    } else {
                                        self.basis_times(a, self.product(b, c))
                                    }
                                }
                                IdentitySpec::Commutative => unreachable!(),
                            };
                            if residual.iter().any(|x| !x.is_zero()) {
                                bad.push(Violation { basis: vec![a, b, c], residual });
                            }
                        }
                    }
                }
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(bad)
        }
    }

    pub fn is_bicommutative(&self) -> bool {
        self.check_identity(IdentitySpec::RightCommutative).is_ok()
            && self.check_identity(IdentitySpec::LeftCommutative).is_ok()
    }

    pub fn is_commutative(&self) -> bool {
        self.check_identity(IdentitySpec::Commutative).is_ok()
    }

    /// Structure constants as an `n^2 x n` matrix, row `(i, j)` holding `e_i e_j`.
    pub fn product_matrix(&self) -> Matrix<R> {
        let n = self.dim;
        Matrix::from_flat(n * n, n, self.c.clone()).expect("tensor shape")
    }
}

impl Algebra<MultiPoly> {
    /// Names of parameters occurring in the structure constants.
    pub fn free_vars(&self) -> Vec<String> {
        let mut set = std::collections::BTreeSet::new();
        for c in &self.c {
            set.extend(c.used_vars());
        }
        set.into_iter().collect()
    }

    /// Substitutes every parameter, refusing excluded values.
    pub fn instantiate(&self, bindings: &BTreeMap<String, Rational>) -> Result<Algebra<Rational>, AlgebraError> {
        for p in &self.params {
            if let Some(v) = bindings.get(&p.name) {
                if p.excluded.contains(v) {
                    return Err(AlgebraError::Excluded { name: p.name.clone(), value: v.to_string() });
                }
            }
        }
        let out = self.try_map(|c| c.substitute(bindings).as_constant().ok_or(()));
        match out {
            Ok(a) => Ok(Algebra { params: Vec::new(), ..a }),
            Err(()) => {
                let free: Vec<String> = self.free_vars().into_iter().filter(|v| !bindings.contains_key(v)).collect();
                Err(AlgebraError::Parametric(free))
            }
        }
    }

    /// The rational algebra when no parameter occurs.
    pub fn to_rational(&self) -> Result<Algebra<Rational>, AlgebraError> {
        self.instantiate(&BTreeMap::new())
    }
}

impl Algebra<Rational> {
    pub fn to_poly(&self) -> Algebra<MultiPoly> {
        self.map(|c| MultiPoly::constant(c.clone()))
    }

    pub fn reduce_mod<F: Field>(&self) -> Result<Algebra<F>, ArithError> {
        self.try_map(F::from_rational)
    }
}

impl<F: Field> Algebra<F> {
    fn span(&self, vs: impl IntoIterator<Item = Vec<F>>) -> Subspace<F> {
        Subspace::span(self.dim, vs).expect("vector lengths match dimension")
    }

    /// `U V = span{u v}` over basis vectors of `u` and `v`.
    pub fn product_space(&self, u: &Subspace<F>, v: &Subspace<F>) -> Subspace<F> {
        let mut vs = Vec::new();
        for x in u.basis() {
            for y in v.basis() {
                vs.push(self.multiply(x, y).expect("dimension"));
            }
        }
        self.span(vs)
    }

    /// `A^1, A^2, ...` with `A^k = sum_{i+j=k} A^i A^j`, ending at the first zero
    /// power or at the first repeated power.
    pub fn power_chain(&self) -> Vec<Subspace<F>> {
        let mut chain = vec![Subspace::full(self.dim)];
        loop {
            let k = chain.len() + 1;
            let mut acc = Subspace::zero(self.dim);
            for i in 1..k {
                let p = self.product_space(&chain[i - 1], &chain[k - i - 1]);
                acc = acc.sum(&p).expect("same ambient");
            }
            let stop = acc.is_zero() || acc == *chain.last().unwrap();
            chain.push(acc);
            if stop {
                return chain;
            }
        }
    }

    /// Least `k` with `A^k = 0`.
    pub fn nilpotency_index(&self) -> Option<usize> {
        let chain = self.power_chain();
        chain.last().unwrap().is_zero().then_some(chain.len())
    }

    pub fn square(&self) -> Subspace<F> {
        let full = Subspace::full(self.dim);
        self.product_space(&full, &full)
    }

    pub fn annihilator(&self, side: Side) -> Subspace<F> {
        let n = self.dim;
        // x in left ann iff x e_j = 0 for all j: sum_i x_i c[i][j][k] = 0
        let mut rows: Vec<Vec<F>> = Vec::new();
        if matches!(side, Side::Left | Side::TwoSided) {
            for j in 0..n {
                for k in 0..n {
                    rows.push((0..n).map(|i| self.get(i, j, k).clone()).collect());
                }
            }
        }
        if matches!(side, Side::Right | Side::TwoSided) {
            for i in 0..n {
                for k in 0..n {
                    rows.push((0..n).map(|j| self.get(i, j, k).clone()).collect());
                }
            }
        }
        rows.retain(|r| r.iter().any(|x| !x.is_zero()));
        if rows.is_empty() {
            return Subspace::full(n);
        }
        let m = Matrix::from_rows(rows).expect("rectangular");
        crate::linalg::nullspace(&m)
    }

    /// `Ann(A)` not inside `A^2`.
    pub fn has_annihilator_component(&self) -> bool {
        let sq = self.square();
        !self.annihilator(Side::TwoSided).is_subspace_of(&sq)
    }

    /// Structure constants in the basis `f_j = sum_i m[i][j] e_i`.
    pub fn change_basis(&self, m: &Matrix<F>) -> Result<Algebra<F>, AlgebraError> {
        let n = self.dim;
        if m.rows() != n || m.cols() != n {
            return Err(LinalgError::Shape(format!("{}x{} basis change for dimension {n}", m.rows(), m.cols())).into());
        }
        let inv = m.inverse()?;
        let cols: Vec<Vec<F>> = (0..n).map(|j| m.column(j)).collect();
        let mut out = Algebra::zero(n);
        out.name = self.name.clone();
        for a in 0..n {
            for b in 0..n {
                let p = self.multiply(&cols[a], &cols[b])?;
                let q = inv.mul_vec(&p)?;
                for (k, v) in q.into_iter().enumerate() {
                    out.set(a, b, k, v);
                }
            }
        }
        Ok(out)
    }
}

impl<R: Ring> fmt::Display for Algebra<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dim;
        let mut first = true;
        for i in 0..n {
            for j in 0..n {
                let terms: Vec<String> = self
                    .product(i, j)
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| if c.is_one() { format!("e{}", k + 1) } else { format!("({c})e{}", k + 1) })
                    .collect();
                if terms.is_empty() {
                    continue;
                }
                if !first {
                    write!(f, ", ")?;
                }
                first = false;
                write!(f, "e{}e{} = {}", i + 1, j + 1, terms.join(" + "))?;
            }
        }
        if first {
            write!(f, "(zero product)")?;
        }
        Ok(())
    }
}

impl<R: Ring> fmt::Debug for Algebra<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Algebra[{} dim {}]: {}", self.name.as_deref().unwrap_or("?"), self.dim, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    /// Entries as one-based `(i, j, k)` with coefficient 1.
    fn alg(dim: usize, prods: &[(usize, usize, usize)]) -> Algebra<Rational> {
        Algebra::from_entries(dim, prods.iter().map(|&(i, j, k)| (i - 1, j - 1, k - 1, q(1)))).unwrap()
    }

    fn e(n: usize, i: usize) -> Vec<Rational> {
        (0..n).map(|k| if k + 1 == i { q(1) } else { q(0) }).collect()
    }

    #[test]
    fn multiply_examples() {
        let n01 = alg(4, &[(1, 1, 2)]);
        assert_eq!(n01.multiply(&e(4, 1), &e(4, 1)).unwrap(), e(4, 2));
        assert_eq!(n01.multiply(&e(4, 2), &e(4, 1)).unwrap(), vec![q(0); 4]);
        assert!(n01.multiply(&e(3, 1), &e(4, 1)).is_err());
    }

    #[test]
    fn right_commutativity_counterexample() {
        let a = alg(4, &[(1, 2, 3), (3, 1, 4)]);
        let v = a.check_identity(IdentitySpec::RightCommutative).unwrap_err();
        assert!(v.iter().any(|x| x.basis == vec![0, 1, 0] && x.residual == e(4, 4)));
    }

    #[test]
    fn b4_01_is_bicommutative_three_step() {
        let b = alg(4, &[(1, 1, 2), (2, 1, 3)]);
        assert!(b.is_bicommutative());
        assert!(b.check_identity(IdentitySpec::TwoStep).is_err());
        assert_eq!(b.nilpotency_index(), Some(4));
        let ann = b.annihilator(Side::TwoSided);
        assert_eq!(ann, Subspace::span(4, [e(4, 3), e(4, 4)]).unwrap());
    }

    #[test]
    fn power_chain_examples() {
        let n01 = alg(4, &[(1, 1, 2)]);
        assert_eq!(n01.nilpotency_index(), Some(3));
        assert_eq!(n01.annihilator(Side::TwoSided).dim(), 3);
        assert_eq!(Algebra::<Rational>::zero(3).nilpotency_index(), Some(2));
        assert_eq!(Algebra::<Rational>::zero(3).annihilator(Side::TwoSided).dim(), 3);
        // e1 e1 = e1 never becomes nilpotent
        let idem = alg(1, &[(1, 1, 1)]);
        assert_eq!(idem.nilpotency_index(), None);
    }

    #[test]
    fn change_basis_scaling() {
        let n01 = alg(4, &[(1, 1, 2)]);
        let mut m = Matrix::<Rational>::identity(4);
        m.set(0, 0, q(2));
        let b = n01.change_basis(&m).unwrap();
        assert_eq!(b.get(0, 0, 1), &q(4));
        m.set(1, 1, q(4));
        assert_eq!(n01.change_basis(&m).unwrap().tensor(), n01.tensor());
        assert!(n01.change_basis(&Matrix::zeros(4, 4)).is_err());
    }

    #[test]
    fn instantiate_refuses_excluded() {
        let v = crate::arith::var_list(&["alpha"]);
        let alpha = MultiPoly::var(&v, "alpha").unwrap();
        let a = Algebra::from_entries(3, [(1, 1, 2, alpha)])
            .unwrap()
            .with_params(vec![ParamDecl { name: "alpha".into(), excluded: vec![q(1)] }]);
        let mut b = BTreeMap::new();
        b.insert("alpha".to_string(), q(1));
        assert!(matches!(a.instantiate(&b), Err(AlgebraError::Excluded { .. })));
        b.insert("alpha".to_string(), q(5));
        assert_eq!(a.instantiate(&b).unwrap().get(1, 1, 2), &q(5));
        assert!(matches!(a.instantiate(&BTreeMap::new()), Err(AlgebraError::Parametric(_))));
    }
}
