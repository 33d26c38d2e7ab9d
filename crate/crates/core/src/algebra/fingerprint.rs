use std::fmt;

use crate::arith::Field;
use crate::cohomology::h2;

use super::{Algebra, Side};

/// Isomorphism invariants; equal fingerprints are necessary for isomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint {
    pub dim: usize,
    pub dim_a2: usize,
    pub dim_a3: usize,
    pub dim_a4: usize,
    /// Zero when the algebra is not nilpotent.
    pub nilindex: usize,
    pub dim_ann: usize,
    pub dim_left_ann: usize,
    pub dim_right_ann: usize,
    pub dim_z2: usize,
    pub dim_b2: usize,
    pub dim_h2: usize,
    pub dim_h2_com: usize,
    pub commutative: bool,
}

impl Fingerprint {
    pub fn as_vec(&self) -> Vec<usize> {
        vec![
            self.dim,
            self.dim_a2,
            self.dim_a3,
            self.dim_a4,
            self.nilindex,
            self.dim_ann,
            self.dim_left_ann,
            self.dim_right_ann,
            self.dim_z2,
            self.dim_b2,
            self.dim_h2,
            self.dim_h2_com,
            self.commutative as usize,
        ]
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.as_vec();
        let mut parts: Vec<String> = v[..12].iter().map(|x| x.to_string()).collect();
        parts.push(self.commutative.to_string());
        write!(f, "({})", parts.join(","))
    }
}

pub fn fingerprint<F: Field>(a: &Algebra<F>) -> Fingerprint {
    let chain = a.power_chain();
    let dim_pow = |k: usize| chain.get(k - 1).map_or(0, |s| s.dim());
    let nilindex = if chain.last().unwrap().is_zero() { chain.len() } else { 0 };
    // a stabilized chain repeats its last power
    let pow = |k: usize| if k <= chain.len() { dim_pow(k) } else if nilindex > 0 { 0 } else { dim_pow(chain.len()) };
    let h = h2(a);
    Fingerprint {
        dim: a.dim(),
        dim_a2: pow(2),
        dim_a3: pow(3),
        dim_a4: pow(4),
        nilindex,
        dim_ann: a.annihilator(Side::TwoSided).dim(),
        dim_left_ann: a.annihilator(Side::Left).dim(),
        dim_right_ann: a.annihilator(Side::Right).dim(),
        dim_z2: h.z2.dim(),
        dim_b2: h.b2.dim(),
        dim_h2: h.dim_h2(),
        dim_h2_com: h.dim_h2_com(),
        commutative: a.is_commutative(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Rational;

    #[test]
    fn zero_algebra_dim5() {
        let f = fingerprint(&Algebra::<Rational>::zero(5));
        assert_eq!(f.as_vec(), vec![5, 0, 0, 0, 2, 5, 5, 5, 25, 0, 25, 15, 1]);
        assert!(f.commutative);
    }

    #[test]
    fn first_two_step_algebra() {
        let a = Algebra::from_entries(4, [(0, 0, 1, Rational::one())]).unwrap();
        let f = fingerprint(&a);
        assert_eq!((f.dim, f.dim_a2, f.dim_a3, f.dim_a4, f.nilindex), (4, 1, 0, 0, 3));
        assert_eq!((f.dim_ann, f.dim_h2, f.dim_h2_com), (3, 10, 6));
        assert!(f.commutative);
    }
}
