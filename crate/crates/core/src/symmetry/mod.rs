//! Automorphisms: certification of parametric families, the action on
//! cocycles, symbolic verification of action formulas, and exhaustive
//! enumeration and isomorphism search over prime fields.

mod action;
mod search;

use std::collections::{BTreeMap, HashSet};

use crate::algebra::Algebra;
use crate::arith::{var_list, ArithError, Field, FiniteField, MultiPoly, Rational, Ring, VarList};
use crate::catalog::Expr;
use crate::cohomology::BilinearForm;
use crate::linalg::{LinalgError, Matrix};

pub use action::{verify_action_formulas, ActionFormulaSet, ActionOutcome};
pub use search::{aut_enumerate_fp, aut_for_each_fp, estimate_work, iso_search_fp, lift_small, AutCount, IsoSearch, WORK_GUARD};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SymmetryError {
    #[error("undeclared variable {0}")]
    UndeclaredVariable(String),
    #[error("invertibility polynomial is identically zero")]
    Singular,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("estimated work {estimate:.3e} exceeds the guard {guard:.0e}")]
    WorkGuard { estimate: f64, guard: f64 },
    #[error("action leaves the span of the N-forms and B2: {0}")]
    Stability(String),
    #[error("algebra is parametric in {0:?}")]
    Parametric(Vec<String>),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Columns are images of basis vectors: `m(e_j) = sum_i m[i][j] e_i`.
fn column<R: Ring>(m: &Matrix<R>, j: usize) -> Vec<R> {
    m.column(j)
}

/// `m(e_i) m(e_j) - m(e_i e_j)` for every pair, as vectors.
fn hom_residuals<R: Ring>(src: &Algebra<R>, dst: &Algebra<R>, m: &Matrix<R>) -> Vec<((usize, usize), Vec<R>)> {
    let n = src.dim();
    let cols: Vec<Vec<R>> = (0..n).map(|j| column(m, j)).collect();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let lhs = dst.multiply(&cols[i], &cols[j]).expect("dimension");
            let rhs = m.mul_vec(src.product(i, j)).expect("dimension");
            let r: Vec<R> = lhs.iter().zip(&rhs).map(|(a, b)| a.minus(b)).collect();
            out.push(((i, j), r));
        }
    }
    out
}

/// True iff `m` is invertible and `m(e_i) m(e_j) = m(e_i e_j)` for all `i, j`.
pub fn is_automorphism<F: Field>(a: &Algebra<F>, m: &Matrix<F>) -> bool {
    is_isomorphism(a, a, m)
}

/// True iff `m: A -> B` is an invertible algebra homomorphism.
pub fn is_isomorphism<F: Field>(a: &Algebra<F>, b: &Algebra<F>, m: &Matrix<F>) -> bool {
    let n = a.dim();
    if b.dim() != n || m.rows() != n || m.cols() != n || !m.is_invertible() {
        return false;
    }
    hom_residuals(a, b, m).iter().all(|(_, r)| r.iter().all(|x| x.is_zero()))
}

/// `m^T theta m`, the matrix of `(x, y) -> theta(m x, m y)`.
pub fn act_cocycle<R: Ring>(m: &Matrix<R>, theta: &BilinearForm<R>) -> Result<BilinearForm<R>, LinalgError> {
    m.transpose().mul(theta)?.mul(m)
}

/// Square matrix of polynomials with its variables and invertibility polynomial.
#[derive(Debug, Clone)]
pub struct ParametricMatrixFamily {
    name: String,
    matrix: Matrix<MultiPoly>,
    vars: VarList,
    unit: MultiPoly,
}

impl ParametricMatrixFamily {
    /// `vars` declares every variable the entries may use; the determinant
    /// serves as invertibility polynomial.
    pub fn new(name: impl Into<String>, matrix: Matrix<MultiPoly>, vars: VarList) -> Result<Self, SymmetryError> {
        if !matrix.is_square() {
            return Err(SymmetryError::Shape(format!("{}x{} family", matrix.rows(), matrix.cols())));
        }
        for e in matrix.data() {
            for v in e.used_vars() {
                if !vars.contains(&v) {
                    return Err(SymmetryError::UndeclaredVariable(v));
                }
            }
        }
        let matrix = matrix.try_map(|e| e.lift_to(&vars))?;
        let unit = matrix.det_expand()?;
        if unit.is_zero() {
            return Err(SymmetryError::Singular);
        }
        Ok(ParametricMatrixFamily { name: name.into(), matrix, vars, unit })
    }

    /// Builds a family from transcribed entries; variables are `params`
    /// followed by the remaining identifiers in reading order.
    pub fn from_exprs(name: impl Into<String>, entries: &[Vec<Expr>], params: &[String]) -> Result<Self, SymmetryError> {
        let mut names: Vec<String> = params.to_vec();
        for row in entries {
            for e in row {
                for id in e.idents() {
                    if !names.contains(&id) {
                        names.push(id);
                    }
                }
            }
        }
        let vars = var_list(&names);
        let rows = entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| e.to_poly(&vars).map_err(|e| SymmetryError::UndeclaredVariable(e.to_string())))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(name, Matrix::from_rows(rows)?, vars)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix<MultiPoly> {
        &self.matrix
    }

    pub fn vars(&self) -> &VarList {
        &self.vars
    }

    pub fn unit(&self) -> &MultiPoly {
        &self.unit
    }

    /// Variables actually occurring in the entries.
    pub fn used_vars(&self) -> Vec<String> {
        let mut used = std::collections::BTreeSet::new();
        for e in self.matrix.data() {
            used.extend(e.used_vars());
        }
        self.vars.iter().filter(|v| used.contains(*v)).cloned().collect()
    }

    /// The matrix at field values for every used variable.
    pub fn instantiate<F: Field>(&self, values: &BTreeMap<String, F>) -> Result<Matrix<F>, SymmetryError> {
        let vals: Vec<Option<F>> = self.vars.iter().map(|v| values.get(v).cloned()).collect();
        Ok(self.matrix.try_map(|e| eval_poly(e, &vals))?)
    }
}

/// Evaluates `p` at per-variable values aligned with `p.vars()`.
pub fn eval_poly<F: Field>(p: &MultiPoly, values: &[Option<F>]) -> Result<F, ArithError> {
    p.eval_with(values, &|r: &Rational| F::from_rational(r), F::zero(), F::one(), &|a: &F, b: &F| a.plus(b), &|a: &F, b: &F| a.times(b))
}

/// Certifies that every member of `fam` is an endomorphism of `a`; on failure
/// returns the first basis pair whose product equation does not vanish.
pub fn certify_parametric_aut(a: &Algebra<MultiPoly>, fam: &ParametricMatrixFamily) -> Result<Result<(), (usize, usize)>, SymmetryError> {
    if a.dim() != fam.dim() {
        return Err(SymmetryError::Shape(format!("family of size {} for dimension {}", fam.dim(), a.dim())));
    }
    let mut names: Vec<String> = fam.vars().to_vec();
    for v in a.free_vars() {
        if !names.contains(&v) {
            names.push(v);
        }
    }
    let vars = var_list(&names);
    let a = a.try_map(|c| c.lift_to(&vars))?;
    let m = fam.matrix().try_map(|c| c.lift_to(&vars))?;
    Ok(match hom_residuals(&a, &a, &m).into_iter().find(|(_, r)| r.iter().any(|x| !x.is_zero())) {
        Some((pair, _)) => Err(pair),
        None => Ok(()),
    })
}

/// All invertible members of `fam` over `F`, with `fixed` variables held at
/// the given values and the others ranging over the field.
pub fn family_census_fp<F: FiniteField>(
    fam: &ParametricMatrixFamily,
    fixed: &BTreeMap<String, F>,
    guard: f64,
) -> Result<HashSet<Vec<F>>, SymmetryError> {
    let free: Vec<String> = fam.used_vars().into_iter().filter(|v| !fixed.contains_key(v)).collect();
    let q = F::order() as f64;
    let estimate = q.powi(free.len() as i32);
    if estimate > guard {
        return Err(SymmetryError::WorkGuard { estimate, guard });
    }
    let elems = F::elements();
    let idx: Vec<usize> = free.iter().map(|v| fam.vars().iter().position(|x| x == v).unwrap()).collect();
    let mut vals: Vec<Option<F>> = fam.vars().iter().map(|v| fixed.get(v).copied()).collect();
    let mut out = HashSet::new();
    let mut counter = vec![0usize; free.len()];
    loop {
        for (c, &i) in counter.iter().zip(&idx) {
            vals[i] = Some(elems[*c]);
        }
        let m = fam.matrix().try_map(|e| eval_poly(e, &vals))?;
        if m.is_invertible() {
            out.insert(m.data().to_vec());
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == counter.len() {
                return Ok(out);
            }
            counter[k] += 1;
            if counter[k] < elems.len() {
                break;
            }
            counter[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Fp;
    use crate::catalog::parse_expr;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn n01() -> Algebra<Rational> {
        Algebra::from_entries(4, [(0, 0, 1, q(1))]).unwrap()
    }

    fn diag(xs: &[i64]) -> Matrix<Rational> {
        let mut m = Matrix::zeros(xs.len(), xs.len());
        for (i, &x) in xs.iter().enumerate() {
            m.set(i, i, q(x));
        }
        m
    }

    fn exprs(rows: &[&str]) -> Vec<Vec<Expr>> {
        rows.iter().map(|r| r.split(',').map(|c| parse_expr(c.trim()).unwrap()).collect()).collect()
    }

    // x in position (1,1), x^2 on e2; the rest of the shape is free where allowed
    const N01_PHI: [&str; 4] = ["x, 0, 0, 0", "q, x^2, r, u", "w, 0, t, k", "z, 0, y, l"];

    #[test]
    fn automorphism_examples() {
        let a = n01();
        assert!(is_automorphism(&a, &Matrix::identity(4)));
        assert!(is_automorphism(&a, &diag(&[1, 1, 2, 3])));
        let mut swap = Matrix::zeros(4, 4);
        for (i, j) in [(0, 1), (1, 0), (2, 2), (3, 3)] {
            swap.set(i, j, q(1));
        }
        assert!(!is_automorphism(&a, &swap));
        assert!(!is_automorphism(&a, &diag(&[1, 1, 0, 1])));
    }

    #[test]
    fn action_examples() {
        let mut theta = Matrix::<Rational>::zeros(2, 2);
        theta.set(0, 1, q(1));
        theta.set(1, 1, q(-3));
        assert_eq!(act_cocycle(&Matrix::identity(2), &theta).unwrap(), theta);
        assert_eq!(act_cocycle(&Matrix::identity(2).scale(&q(2)), &theta).unwrap(), theta.scale(&q(4)));
        let m1 = Matrix::from_rows(vec![vec![q(1), q(2)], vec![q(0), q(1)]]).unwrap();
        let m2 = Matrix::from_rows(vec![vec![q(3), q(0)], vec![q(1), q(1)]]).unwrap();
        let lhs = act_cocycle(&m1.mul(&m2).unwrap(), &theta).unwrap();
        let rhs = act_cocycle(&m2, &act_cocycle(&m1, &theta).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn certify_shape_and_perturbation() {
        let a = n01().to_poly();
        let fam = ParametricMatrixFamily::from_exprs("phi", &exprs(&N01_PHI), &[]).unwrap();
        assert_eq!(certify_parametric_aut(&a, &fam).unwrap(), Ok(()));
        let mut bad = N01_PHI;
        bad[0] = "x, x, 0, 0";
        let fam = ParametricMatrixFamily::from_exprs("phi", &exprs(&bad), &[]).unwrap();
        assert_eq!(certify_parametric_aut(&a, &fam).unwrap(), Err((0, 0)));
        let zero = exprs(&["0, 0", "0, x"]);
        assert!(matches!(ParametricMatrixFamily::from_exprs("z", &zero, &[]), Err(SymmetryError::Singular)));
    }

    #[test]
    fn census_of_n01_shape_over_f2() {
        let fam = ParametricMatrixFamily::from_exprs("phi", &exprs(&N01_PHI), &[]).unwrap();
        let set = family_census_fp::<Fp<2>>(&fam, &BTreeMap::new(), 1e6).unwrap();
        assert_eq!(set.len(), 192);
        let inst = fam
            .instantiate::<Rational>(&[("x", 2), ("q", 0), ("r", 0), ("u", 0), ("w", 0), ("t", 1), ("k", 0), ("z", 0), ("y", 0), ("l", 1)]
                .iter()
                .map(|(k, v)| (k.to_string(), q(*v)))
                .collect())
            .unwrap();
        assert_eq!(inst, diag(&[2, 4, 1, 1]));
    }
}
