//! Parameter sampling and evaluation of catalog data over a chosen field.

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::Algebra;
use crate::arith::{Field, Rational};
use crate::catalog::{cyclic_samples, eval_form, CatalogEntry, Constraint, Expr, RepresentativeSpec};
use crate::linalg::Matrix;

use super::HarnessError;

pub type Values = BTreeMap<String, Rational>;

/// Field over which a representative is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ground {
    Rationals,
    Prime(u64),
}

impl fmt::Display for Ground {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ground::Rationals => write!(f, "Q"),
            Ground::Prime(p) => write!(f, "F{p}"),
        }
    }
}

pub fn grounds(rep: &RepresentativeSpec) -> Vec<Ground> {
    if rep.modp.is_empty() {
        vec![Ground::Rationals]
    } else {
        rep.modp.iter().map(|&p| Ground::Prime(p)).collect()
    }
}

/// True when no listed base exclusion is hit by `values`.
pub fn respects_exclusions(entry: &CatalogEntry, values: &Values) -> bool {
    entry.params().iter().all(|p| values.get(&p.name).is_none_or(|v| !p.excluded.contains(v)))
}

pub fn constraints_hold(cs: &[Constraint], values: &Values) -> bool {
    cs.iter().all(|c| c.holds(values).unwrap_or(false))
}

/// Full assignments (bound and free parameters) at which a counted
/// representative is checked: explicit samples, or cyclic samples kept by
/// the base exclusions and the representative's constraints.
pub fn rep_samples(entry: &CatalogEntry, rep: &RepresentativeSpec) -> Result<Vec<Values>, HarnessError> {
    let bound = rep.bound_values()?;
    let merge = |free: &Values| -> Values {
        let mut v = bound.clone();
        v.extend(free.iter().map(|(k, x)| (k.clone(), x.clone())));
        v
    };
    if let Some(s) = &rep.samples {
        return Ok(s.iter().map(merge).collect());
    }
    let free = rep.free_params();
    Ok(cyclic_samples(&free, |b| {
        let v = merge(b);
        respects_exclusions(entry, &v) && rep.constraints_hold(&v)
    })
    .iter()
    .map(merge)
    .collect())
}

/// Required number of samples for a family of the given arity.
pub fn min_samples(arity: usize) -> usize {
    if arity == 0 {
        1
    } else {
        2
    }
}

pub fn field_values<F: Field>(values: &Values) -> Result<BTreeMap<String, F>, HarnessError> {
    values.iter().map(|(k, v)| Ok((k.clone(), F::from_rational(v)?))).collect()
}

/// The base algebra at `values`; exclusions are not enforced here.
pub fn base_at<F: Field>(entry: &CatalogEntry, values: &Values) -> Result<Algebra<F>, HarnessError> {
    let q = entry.base.try_map(|c| {
        c.substitute(values).as_constant().ok_or_else(|| HarnessError::Config(format!("{}: unbound parameter in {c}", entry.name)))
    })?;
    Ok(q.reduce_mod::<F>()?)
}

/// Form-valued expressions against the entry's `N<k>` dictionary.
pub fn forms_at<F: Field>(entry: &CatalogEntry, exprs: &[Expr], values: &Values) -> Result<Vec<Matrix<F>>, HarnessError> {
    let fv: BTreeMap<String, F> = field_values(values)?;
    let look = |n: &str| fv.get(n).cloned();
    exprs.iter().map(|e| Ok(eval_form(e, entry.dim(), &entry.nablas, &look)?)).collect()
}

/// `B60{2,3}` style label listing the free parameter values.
pub fn label(name: &str, free: &[String], values: &Values) -> String {
    if free.is_empty() {
        return name.to_string();
    }
    let vs: Vec<String> = free.iter().map(|k| values.get(k).map_or("?".into(), |v| v.to_string())).collect();
    format!("{name}{{{}}}", vs.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Catalog;

    #[test]
    fn samples_follow_constraints_and_exclusions() {
        let cat = Catalog::embedded().unwrap();
        let (e, r) = cat.representative("B60").unwrap();
        let s = rep_samples(e, r).unwrap();
        assert!(s.len() >= 2);
        for v in &s {
            assert!(!v["beta"].is_zero());
            assert_ne!(v["alpha"], Rational::one());
        }
        let (e, r) = cat.representative("B63").unwrap();
        let s = rep_samples(e, r).unwrap();
        assert!(s.iter().all(|v| v["alpha"].is_zero()));
    }

    #[test]
    fn evaluation_over_rationals() {
        let cat = Catalog::embedded().unwrap();
        let (e, r) = cat.representative("B01").unwrap();
        let a = base_at::<Rational>(e, &Values::new()).unwrap();
        assert!(a.is_bicommutative());
        let th = forms_at::<Rational>(e, &r.cocycles, &Values::new()).unwrap();
        assert_eq!(th.len(), 1);
        assert!(!th[0].is_zero());
    }
}
