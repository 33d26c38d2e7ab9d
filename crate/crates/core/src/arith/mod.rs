//! Exact scalars: rationals, prime fields and multivariate polynomials.

mod fp;
mod poly;
mod rational;

use std::fmt;

pub use fp::{is_prime, mod_p_reduce, Fp, FpElem, SUPPORTED_PRIMES};
pub use poly::{var_list, MultiPoly, VarList};
pub use rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{value} is not reducible modulo {p}")]
    NonReducible { value: String, p: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {0} is not supported for finite-field work")]
    UnsupportedPrime(u64),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("operation needs a field, not a polynomial ring")]
    NotAField,
}

/// Commutative ring of scalars used for structure constants and matrices.
///
/// Method names avoid the `std::ops` names so generic code stays unambiguous.
pub trait Ring: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negate(&self) -> Self;
    /// Image of a rational under the canonical map, when defined.
    fn from_rational(r: &Rational) -> Result<Self, ArithError>;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from_int(n)).expect("integers map into every ring here")
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

pub trait Field: Ring + Eq + std::hash::Hash {
    fn inverse(&self) -> Option<Self>;
    /// A square root in the field, if one exists.
    fn square_root(&self) -> Option<Self>;

    fn divide(&self, rhs: &Self) -> Option<Self> {
        rhs.inverse().map(|r| self.times(&r))
    }
}

/// A field with finitely many elements that can be listed.
pub trait FiniteField: Field + Copy + Ord {
    fn order() -> u64;
    fn elements() -> Vec<Self>;
    fn index(&self) -> u64;
}

impl Ring for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negate(&self) -> Self {
        -self
    }
    fn from_rational(r: &Rational) -> Result<Self, ArithError> {
        Ok(r.clone())
    }
    fn from_int(n: i64) -> Self {
        Rational::from_int(n)
    }
    fn is_one(&self) -> bool {
        Rational::is_one(self)
    }
}

impl Field for Rational {
    fn inverse(&self) -> Option<Self> {
        self.recip().ok()
    }
    fn square_root(&self) -> Option<Self> {
        self.sqrt()
    }
}

impl<const P: u64> Ring for Fp<P> {
    fn zero() -> Self {
        Fp::new(0)
    }
    fn one() -> Self {
        Fp::new(1)
    }
    fn is_zero(&self) -> bool {
        self.value() == 0
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.add(*rhs)
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.sub(*rhs)
    }
    fn times(&self, rhs: &Self) -> Self {
        self.mul(*rhs)
    }
    fn negate(&self) -> Self {
        self.neg()
    }
    fn from_rational(r: &Rational) -> Result<Self, ArithError> {
        Fp::from_rational(r)
    }
    fn from_int(n: i64) -> Self {
        Fp::new(n)
    }
}

impl<const P: u64> Field for Fp<P> {
    fn inverse(&self) -> Option<Self> {
        self.inv()
    }
    fn square_root(&self) -> Option<Self> {
        self.sqrt()
    }
}

impl<const P: u64> FiniteField for Fp<P> {
    fn order() -> u64 {
        P
    }
    fn elements() -> Vec<Self> {
        Fp::<P>::elements().collect()
    }
    fn index(&self) -> u64 {
        self.value()
    }
}

impl Ring for MultiPoly {
    fn zero() -> Self {
        MultiPoly::zero()
    }
    fn one() -> Self {
        MultiPoly::constant(Rational::one())
    }
    fn is_zero(&self) -> bool {
        MultiPoly::is_zero(self)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }
    fn times(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn negate(&self) -> Self {
        self.neg()
    }
    fn from_rational(r: &Rational) -> Result<Self, ArithError> {
        Ok(MultiPoly::constant(r.clone()))
    }
}
