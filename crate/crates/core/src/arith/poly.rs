use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use super::{ArithError, Rational};

/// Ordered variable names shared by polynomials built in one context.
pub type VarList = Arc<Vec<String>>;

/// Sparse multivariate polynomial with rational coefficients.
///
/// Terms map exponent vectors (one entry per variable, in `vars` order) to
/// nonzero coefficients. Polynomials over different variable lists are
/// aligned to the union list on demand.
#[derive(Clone)]
pub struct MultiPoly {
    vars: VarList,
    terms: BTreeMap<Vec<u32>, Rational>,
}

pub fn var_list<S: AsRef<str>>(names: &[S]) -> VarList {
    Arc::new(names.iter().map(|s| s.as_ref().to_string()).collect())
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly { vars: Arc::new(Vec::new()), terms: BTreeMap::new() }
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        MultiPoly { vars: Arc::new(Vec::new()), terms }
    }

    pub fn zero_in(vars: &VarList) -> Self {
        MultiPoly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant_in(vars: &VarList, c: Rational) -> Self {
        let mut p = Self::zero_in(vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; vars.len()], c);
        }
        p
    }

    /// The polynomial consisting of one variable of `vars`.
    pub fn var(vars: &VarList, name: &str) -> Result<Self, ArithError> {
        let idx = vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| ArithError::UnknownVariable(name.to_string()))?;
        let mut e = vec![0; vars.len()];
        e[idx] = 1;
        let mut p = Self::zero_in(vars);
        p.terms.insert(e, Rational::one());
        Ok(p)
    }

    /// Canonical polynomial from raw terms: equal exponents summed, zeros dropped.
    pub fn normalize(
        vars: &VarList,
        raw: impl IntoIterator<Item = (Vec<u32>, Rational)>,
    ) -> Result<Self, ArithError> {
        let mut terms: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (e, c) in raw {
            if e.len() != vars.len() {
                return Err(ArithError::Malformed(format!(
                    "exponent vector of length {} for {} variables",
                    e.len(),
                    vars.len()
                )));
            }
            let slot = terms.entry(e).or_insert_with(Rational::zero);
            *slot = &*slot + &c;
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(MultiPoly { vars: vars.clone(), terms })
    }

    pub fn vars(&self) -> &VarList {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The value if the polynomial has no nonconstant terms.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Names of variables occurring with positive degree.
    pub fn used_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for e in self.terms.keys() {
            for (i, &x) in e.iter().enumerate() {
                if x > 0 {
                    out.insert(self.vars[i].clone());
                }
            }
        }
        out
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Re-expresses the polynomial over `target`, which must contain every used variable.
    pub fn lift_to(&self, target: &VarList) -> Result<Self, ArithError> {
        if Arc::ptr_eq(&self.vars, target) || *self.vars == **target {
            return Ok(MultiPoly { vars: target.clone(), terms: self.terms.clone() });
        }
        let mut map = Vec::with_capacity(self.vars.len());
        for v in self.vars.iter() {
            map.push(target.iter().position(|t| t == v));
        }
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut ne = vec![0; target.len()];
            for (i, &x) in e.iter().enumerate() {
                if x > 0 {
                    match map[i] {
                        Some(j) => ne[j] = x,
                        None => return Err(ArithError::UnknownVariable(self.vars[i].clone())),
                    }
                }
            }
            terms.insert(ne, c.clone());
        }
        Ok(MultiPoly { vars: target.clone(), terms })
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        if Arc::ptr_eq(&self.vars, &other.vars) || *self.vars == *other.vars {
            return (self.clone(), MultiPoly { vars: self.vars.clone(), terms: other.terms.clone() });
        }
        if other.vars.iter().all(|v| self.vars.contains(v)) {
            return (self.clone(), other.lift_to(&self.vars).expect("subset"));
        }
        if self.vars.iter().all(|v| other.vars.contains(v)) {
            return (self.lift_to(&other.vars).expect("subset"), other.clone());
        }
        let mut union: Vec<String> = self.vars.to_vec();
        for v in other.vars.iter() {
            if !union.contains(v) {
                union.push(v.clone());
            }
        }
        let union = Arc::new(union);
        (self.lift_to(&union).expect("union"), other.lift_to(&union).expect("union"))
    }

    pub fn add(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let (mut a, b) = self.aligned(other);
        for (e, c) in b.terms {
            match a.terms.get_mut(&e) {
                Some(slot) => {
                    *slot = &*slot + &c;
                    if slot.is_zero() {
                        a.terms.remove(&e);
                    }
                }
                None => {
                    a.terms.insert(e, c);
                }
            }
        }
        a
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return MultiPoly::zero_in(&self.vars);
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            let (a, _) = self.aligned(other);
            return MultiPoly::zero_in(&a.vars);
        }
        let (a, b) = self.aligned(other);
        let mut terms: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (e1, c1) in &a.terms {
            for (e2, c2) in &b.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
                let c = c1 * c2;
                match terms.get_mut(&e) {
                    Some(slot) => *slot = &*slot + &c,
                    None => {
                        terms.insert(e, c);
                    }
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        MultiPoly { vars: a.vars, terms }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = MultiPoly::constant_in(&self.vars, Rational::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Replaces bound variables by values; unbound variables stay symbolic.
    pub fn substitute(&self, bindings: &BTreeMap<String, Rational>) -> Self {
        let bound: Vec<Option<&Rational>> = self.vars.iter().map(|v| bindings.get(v)).collect();
        let mut terms: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut coeff = c.clone();
            let mut ne = e.clone();
            for (i, &x) in e.iter().enumerate() {
                if x > 0 {
                    if let Some(v) = bound[i] {
                        coeff = &coeff * &v.pow(x as i32).expect("nonnegative power");
                        ne[i] = 0;
                    }
                }
            }
            let slot = terms.entry(ne).or_insert_with(Rational::zero);
            *slot = &*slot + &coeff;
        }
        terms.retain(|_, c| !c.is_zero());
        MultiPoly { vars: self.vars.clone(), terms }
    }

    /// Full evaluation; errors on the first unbound variable that occurs.
    pub fn eval(&self, bindings: &BTreeMap<String, Rational>) -> Result<Rational, ArithError> {
        let s = self.substitute(bindings);
        s.as_constant().ok_or_else(|| {
            let free = s.used_vars().into_iter().next().unwrap_or_default();
            ArithError::UnknownVariable(free)
        })
    }

    /// Evaluation through a ring homomorphism `Rational -> T` at values given per variable.
    pub fn eval_with<T: Clone>(
        &self,
        values: &[Option<T>],
        conv: &impl Fn(&Rational) -> Result<T, ArithError>,
        zero: T,
        one: T,
        add: &impl Fn(&T, &T) -> T,
        mul: &impl Fn(&T, &T) -> T,
    ) -> Result<T, ArithError> {
        let mut acc = zero;
        for (e, c) in &self.terms {
            let mut t = conv(c)?;
            for (i, &x) in e.iter().enumerate() {
                if x > 0 {
                    let v = values
                        .get(i)
                        .and_then(|v| v.clone())
                        .ok_or_else(|| ArithError::UnknownVariable(self.vars[i].clone()))?;
                    let mut pw = one.clone();
                    for _ in 0..x {
                        pw = mul(&pw, &v);
                    }
                    t = mul(&t, &pw);
                }
            }
            acc = add(&acc, &t);
        }
        Ok(acc)
    }
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.vars, &other.vars) || *self.vars == *other.vars {
            return self.terms == other.terms;
        }
        self.sub(other).is_zero()
    }
}

impl Eq for MultiPoly {}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest total degree first, then reverse-lex for a readable order
        let mut items: Vec<(&Vec<u32>, &Rational)> = self.terms.iter().collect();
        items.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        for (k, (e, c)) in items.into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let monomial: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| {
                    if x == 1 {
                        self.vars[i].clone()
                    } else {
                        format!("{}^{}", self.vars[i], x)
                    }
                })
                .collect();
            if monomial.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", monomial.join("*"))?;
            } else if mag.is_integer() {
                write!(f, "{}*{}", mag, monomial.join("*"))?;
            } else {
                write!(f, "({})*{}", mag, monomial.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn normalize_cancels_and_sums() {
        let v = var_list(&["x"]);
        let p = MultiPoly::normalize(&v, [(vec![2], q(1)), (vec![2], q(-1))]).unwrap();
        assert!(p.is_zero());
        let v = var_list(&["x", "y"]);
        let p = MultiPoly::normalize(&v, [(vec![1, 0], q(2)), (vec![0, 1], q(3))]).unwrap();
        assert_eq!(p.to_string(), "2*x + 3*y");
        assert!(MultiPoly::normalize(&v, [(vec![1], q(1))]).is_err());
    }

    #[test]
    fn product_of_sum_and_difference() {
        let v = var_list(&["x", "y"]);
        let x = MultiPoly::var(&v, "x").unwrap();
        let y = MultiPoly::var(&v, "y").unwrap();
        let p = x.add(&y).mul(&x.sub(&y));
        let expected =
            MultiPoly::normalize(&v, [(vec![2, 0], q(1)), (vec![0, 2], q(-1))]).unwrap();
        assert_eq!(p, expected);
    }

    #[test]
    fn substitution_examples() {
        let v = var_list(&["alpha", "x"]);
        let a = MultiPoly::var(&v, "alpha").unwrap();
        let x = MultiPoly::var(&v, "x").unwrap();
        let p = a.mul(&x.pow(3));
        let mut b = BTreeMap::new();
        b.insert("alpha".to_string(), q(2));
        b.insert("x".to_string(), q(3));
        assert_eq!(p.eval(&b).unwrap(), q(54));
        let mut b = BTreeMap::new();
        b.insert("x".to_string(), q(1));
        assert_eq!(p.substitute(&b), a);
    }

    #[test]
    fn mixed_variable_lists_align() {
        let x = MultiPoly::var(&var_list(&["x"]), "x").unwrap();
        let y = MultiPoly::var(&var_list(&["y"]), "y").unwrap();
        let s = x.add(&y);
        assert_eq!(s.vars().len(), 2);
        assert_eq!(s.sub(&y), x);
        assert_eq!(MultiPoly::constant(q(3)).add(&x).sub(&x), MultiPoly::constant(q(3)));
    }

    #[test]
    fn unknown_variable_is_an_error() {
        assert!(MultiPoly::var(&var_list(&["x"]), "z").is_err());
        let x = MultiPoly::var(&var_list(&["x"]), "x").unwrap();
        assert!(x.eval(&BTreeMap::new()).is_err());
    }
}
