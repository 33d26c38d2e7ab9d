use std::collections::BTreeMap;
use std::sync::OnceLock;

use proptest::prelude::*;

use bicomm::algebra::{fingerprint, Algebra};
use bicomm::arith::{var_list, Field, Fp, MultiPoly, Rational, Ring};
use bicomm::catalog::Catalog;
use bicomm::cohomology::{cocycle_space, vec_to_form, ExtensionSpec};
use bicomm::harness::instance::base_at;
use bicomm::linalg::{nullspace, Matrix, Subspace};
use bicomm::symmetry::{iso_search_fp, IsoSearch};

fn catalog() -> &'static Catalog {
    static CAT: OnceLock<Catalog> = OnceLock::new();
    CAT.get_or_init(|| Catalog::embedded().expect("embedded catalog"))
}

/// Every catalog entry at its first admissible sample.
fn bases() -> &'static Vec<(String, Algebra<Rational>)> {
    static BASES: OnceLock<Vec<(String, Algebra<Rational>)>> = OnceLock::new();
    BASES.get_or_init(|| {
        catalog()
            .entries
            .iter()
            .filter_map(|e| {
                let v = e.sample_bindings().into_iter().next()?;
                Some((e.name.clone(), base_at::<Rational>(e, &v).ok()?))
            })
            .collect()
    })
}

fn rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=9).prop_map(|(n, d)| Rational::new(n, d).expect("nonzero denominator"))
}

fn int_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix<Rational>> {
    prop::collection::vec(-3i64..=3, rows * cols)
        .prop_map(move |v| Matrix::from_flat(rows, cols, v.into_iter().map(Rational::from_int).collect()).expect("shape"))
}

fn invertible(n: usize) -> impl Strategy<Value = Matrix<Rational>> {
    int_matrix(n, n).prop_filter("singular", |m| m.is_invertible())
}

/// Polynomial in `x, y` with exponents below 3 from a coefficient list.
fn poly(coeffs: &[i64]) -> MultiPoly {
    let vars = var_list(&["x", "y"]);
    let x = MultiPoly::var(&vars, "x").unwrap();
    let y = MultiPoly::var(&vars, "y").unwrap();
    let mut p = MultiPoly::zero_in(&vars);
    for (k, c) in coeffs.iter().enumerate() {
        let term = x.pow((k % 3) as u32).mul(&y.pow((k / 3) as u32)).scale(&Rational::from_int(*c));
        p = p.add(&term);
    }
    p
}

proptest! {
    #[test]
    fn rational_field_laws(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !a.is_zero() {
            prop_assert!((&a * &a.recip().unwrap()).is_one());
        }
    }

    #[test]
    fn prime_field_inverse_and_fermat(x in 1i64..13, y in 1i64..13) {
        let (a, b) = (Fp::<13>::new(x), Fp::<13>::new(y));
        prop_assert_eq!(a.pow(12), Fp::<13>::new(1));
        prop_assert_eq!(a.mul(b).inv().unwrap(), a.inv().unwrap().mul(b.inv().unwrap()));
        prop_assert_eq!(a.times(&b).divide(&b).unwrap(), a);
    }

    #[test]
    fn polynomial_ring_laws(p in prop::collection::vec(-4i64..=4, 9), q in prop::collection::vec(-4i64..=4, 9),
                            r in prop::collection::vec(-4i64..=4, 9), x in rational(), y in rational()) {
        let (p, q, r) = (poly(&p), poly(&q), poly(&r));
        prop_assert_eq!(p.add(&q).mul(&r), p.mul(&r).add(&q.mul(&r)));
        prop_assert!(p.sub(&p).is_zero());
        let at: BTreeMap<String, Rational> = [("x".to_string(), x), ("y".to_string(), y)].into();
        prop_assert_eq!(p.mul(&q).eval(&at).unwrap(), &p.eval(&at).unwrap() * &q.eval(&at).unwrap());
    }

    #[test]
    fn rank_nullity(m in int_matrix(4, 6)) {
        prop_assert_eq!(m.rank() + nullspace(&m).dim(), 6);
        for v in nullspace(&m).basis() {
            prop_assert!(m.mul_vec(v).unwrap().iter().all(Rational::is_zero));
        }
    }

    #[test]
    fn inverse_is_two_sided(m in invertible(4)) {
        let inv = m.inverse().unwrap();
        prop_assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(4));
        prop_assert_eq!(inv.mul(&m).unwrap(), Matrix::identity(4));
    }

    #[test]
    fn subspace_dimension_formula(u in int_matrix(3, 5), w in int_matrix(2, 5)) {
        let su = Subspace::span(5, u.row_vecs()).unwrap();
        let sw = Subspace::span(5, w.row_vecs()).unwrap();
        let sum = su.sum(&sw).unwrap();
        let meet = su.intersect(&sw).unwrap();
        prop_assert_eq!(sum.dim() + meet.dim(), su.dim() + sw.dim());
        prop_assert!(meet.is_subspace_of(&su) && meet.is_subspace_of(&sw));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fingerprint_survives_basis_change(k in 0usize..64, m in invertible(4)) {
        let (name, a) = &bases()[k % bases().len()];
        let m = if a.dim() == 4 { m } else { Matrix::identity(a.dim()) };
        let b = a.change_basis(&m).unwrap();
        prop_assert_eq!(fingerprint(&b), fingerprint(a), "{}", name);
        prop_assert_eq!(b.is_bicommutative(), a.is_bicommutative());
    }

    #[test]
    fn extension_by_cocycle_is_bicommutative(k in 0usize..64, coeffs in prop::collection::vec(-3i64..=3, 12)) {
        let (name, a) = &bases()[k % bases().len()];
        let n = a.dim();
        let z2 = cocycle_space(a);
        let mut v = vec![Rational::zero(); n * n];
        for (b, c) in z2.basis().iter().zip(coeffs.iter().cycle()) {
            for (x, y) in v.iter_mut().zip(b) {
                *x = &*x + &(y * &Rational::from_int(*c));
            }
        }
        let spec = ExtensionSpec::new(a.clone(), vec![vec_to_form(n, &v)]).unwrap();
        let ext = spec.central_extension().unwrap();
        prop_assert!(ext.is_bicommutative(), "{}", name);
        prop_assert!(spec.annihilator_law().unwrap().is_ok(), "{}", name);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn iso_search_recovers_basis_change(k in 0usize..64, m in invertible(4)) {
        let (name, a) = &bases()[k % bases().len()];
        prop_assume!(a.dim() == 4);
        let Ok(a5) = a.reduce_mod::<Fp<5>>() else { return Ok(()) };
        let Ok(m5) = m.try_map(<Fp<5> as Ring>::from_rational) else { return Ok(()) };
        prop_assume!(m5.is_invertible());
        let b5 = a5.change_basis(&m5).unwrap();
        match iso_search_fp(&a5, &b5, u64::MAX).unwrap() {
            IsoSearch::Found(phi) => {
                let back = b5.change_basis(&phi).unwrap();
                prop_assert_eq!(back.tensor(), a5.tensor(), "{}", name);
            }
            IsoSearch::NotFound { .. } => prop_assert!(false, "{} not found", name),
        }
    }
}
