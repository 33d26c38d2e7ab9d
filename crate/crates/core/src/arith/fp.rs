use std::fmt;

use super::rational::big_mod_u64;
use super::{ArithError, Rational};

/// Element of the prime field `F_P`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fp<const P: u64>(u64);

impl<const P: u64> Fp<P> {
    pub const MODULUS: u64 = P;

    pub fn new(v: i64) -> Self {
        Fp(v.rem_euclid(P as i64) as u64)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self.0;
        let mut acc = 1 % P;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % P;
            }
            base = base * base % P;
            e >>= 1;
        }
        Fp(acc)
    }

    pub fn inv(self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(self.pow(P - 2))
        }
    }

    /// Reduction of a rational whose denominator is prime to `P`.
    pub fn from_rational(r: &Rational) -> Result<Self, ArithError> {
        let v = mod_p_reduce(r, P)?;
        Ok(Fp(v.value))
    }

    /// Smallest square root in `[0, P)`, if one exists.
    pub fn sqrt(self) -> Option<Self> {
        (0..P).map(Fp).find(|r| r.0 * r.0 % P == self.0)
    }

    /// All field elements in increasing order.
    pub fn elements() -> impl Iterator<Item = Self> {
        (0..P).map(Fp)
    }

    pub fn add(self, o: Self) -> Self {
        Fp((self.0 + o.0) % P)
    }
    pub fn sub(self, o: Self) -> Self {
        Fp((self.0 + P - o.0) % P)
    }
    pub fn mul(self, o: Self) -> Self {
        Fp(self.0 * o.0 % P)
    }
    pub fn neg(self) -> Self {
        Fp((P - self.0) % P)
    }
}

impl<const P: u64> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> fmt::Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A prime-field element with its modulus carried at runtime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FpElem {
    pub value: u64,
    pub modulus: u64,
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// `numerator * denominator^{-1} mod p`.
pub fn mod_p_reduce(r: &Rational, p: u64) -> Result<FpElem, ArithError> {
    if !is_prime(p) {
        return Err(ArithError::NotPrime(p));
    }
    let d = big_mod_u64(&r.denom(), p);
    if d == 0 {
        return Err(ArithError::NonReducible { value: r.to_string(), p });
    }
    let n = big_mod_u64(&r.numer(), p);
    let dinv = Fp::<0>::inv_mod(d, p);
    Ok(FpElem { value: (n as u128 * dinv as u128 % p as u128) as u64, modulus: p })
}

impl Fp<0> {
    fn inv_mod(a: u64, p: u64) -> u64 {
        let (mut t, mut new_t) = (0i128, 1i128);
        let (mut r, mut new_r) = (p as i128, a as i128);
        while new_r != 0 {
            let q = r / new_r;
            (t, new_t) = (new_t, t - q * new_t);
            (r, new_r) = (new_r, r - q * new_r);
        }
        t.rem_euclid(p as i128) as u64
    }
}

/// Primes for which finite-field routines are compiled.
pub const SUPPORTED_PRIMES: &[u64] = &[
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Runs a block with `$P` bound to a compile-time prime equal to `$p`.
///
/// Evaluates to `Err(ArithError::UnsupportedPrime)` for primes outside
/// [`SUPPORTED_PRIMES`]; otherwise to `Ok(block value)`.
#[macro_export]
macro_rules! with_prime {
    ($p:expr, $P:ident => $body:expr) => {{
        match $p {
            2 => { const $P: u64 = 2; Ok($body) }
            3 => { const $P: u64 = 3; Ok($body) }
            5 => { const $P: u64 = 5; Ok($body) }
            7 => { const $P: u64 = 7; Ok($body) }
            11 => { const $P: u64 = 11; Ok($body) }
            13 => { const $P: u64 = 13; Ok($body) }
            17 => { const $P: u64 = 17; Ok($body) }
            19 => { const $P: u64 = 19; Ok($body) }
            23 => { const $P: u64 = 23; Ok($body) }
            29 => { const $P: u64 = 29; Ok($body) }
            31 => { const $P: u64 = 31; Ok($body) }
            37 => { const $P: u64 = 37; Ok($body) }
            41 => { const $P: u64 = 41; Ok($body) }
            43 => { const $P: u64 = 43; Ok($body) }
            47 => { const $P: u64 = 47; Ok($body) }
            53 => { const $P: u64 = 53; Ok($body) }
            59 => { const $P: u64 = 59; Ok($body) }
            61 => { const $P: u64 = 61; Ok($body) }
            67 => { const $P: u64 = 67; Ok($body) }
            71 => { const $P: u64 = 71; Ok($body) }
            73 => { const $P: u64 = 73; Ok($body) }
            79 => { const $P: u64 = 79; Ok($body) }
            83 => { const $P: u64 = 83; Ok($body) }
            89 => { const $P: u64 = 89; Ok($body) }
            97 => { const $P: u64 = 97; Ok($body) }
            other => Err($crate::arith::ArithError::UnsupportedPrime(other)),
        }
    }};
}
