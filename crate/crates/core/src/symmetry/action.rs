use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::Algebra;
use crate::arith::{var_list, MultiPoly, Rational, VarList};
use crate::cohomology::{form_to_vec, BilinearForm};
use crate::linalg::{Matrix, Subspace};

use super::{act_cocycle, ParametricMatrixFamily, SymmetryError};

/// Expected action on `sum a_k N_k`: one polynomial `a_k*` per form.
#[derive(Debug, Clone)]
pub struct ActionFormulaSet {
    /// The `N_k` forms, possibly depending on algebra parameters.
    pub nablas: Vec<BilinearForm<MultiPoly>>,
    /// Names of the coefficient variables `a_k`, one per form.
    pub coeff_vars: Vec<String>,
    /// Expected `a_k*`, one per form.
    pub expected: Vec<MultiPoly>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActionOutcome {
    Pass,
    /// One-based indices of the forms whose coefficient disagrees.
    Mismatch(Vec<usize>),
}

const SEED: u64 = 0x5eed_ac71;

/// Checks `phi^T (sum a_k N_k) phi = sum a_k* N_k` modulo `B^2` as an identity
/// of polynomials in the algebra parameters, family variables and `a_k`.
///
/// Membership of the difference `D` in the column span of the structure
/// matrix `C` (whose columns span `B^2`) is decided without division: with an
/// `r x r` block `M = C[R, S]` of generic full rank, `D` lies in the span iff
/// every bordered determinant `det [[M, D_R], [C_rho, D_rho]]` vanishes.
pub fn verify_action_formulas(
    a: &Algebra<MultiPoly>,
    fam: &ParametricMatrixFamily,
    fs: &ActionFormulaSet,
) -> Result<ActionOutcome, SymmetryError> {
    let n = a.dim();
    let k = fs.nablas.len();
    if fam.dim() != n || fs.expected.len() != k || fs.coeff_vars.len() != k {
        return Err(SymmetryError::Shape(format!(
            "dimension {n}, family {}, {k} forms, {} formulas, {} coefficients",
            fam.dim(),
            fs.expected.len(),
            fs.coeff_vars.len()
        )));
    }
    if fs.nablas.iter().any(|f| f.rows() != n || f.cols() != n) {
        return Err(SymmetryError::Shape("form size differs from the algebra dimension".into()));
    }

    // one variable list for everything
    let mut names: Vec<String> = a.free_vars();
    let mut add = |v: &str| {
        if !names.iter().any(|x| x == v) {
            names.push(v.to_string());
        }
    };
    fam.vars().iter().for_each(|v| add(v));
    fs.coeff_vars.iter().for_each(|v| add(v));
    let declared = names.clone();
    for p in fs.expected.iter().chain(fs.nablas.iter().flat_map(|f| f.data())) {
        if let Some(v) = p.used_vars().into_iter().find(|v| !declared.contains(v)) {
            return Err(SymmetryError::UndeclaredVariable(v));
        }
    }
    let vars = var_list(&names);
    let lift = |p: &MultiPoly| p.lift_to(&vars);
    let a = a.try_map(lift)?;
    let phi = fam.matrix().try_map(lift)?;
    let nablas: Vec<Matrix<MultiPoly>> = fs.nablas.iter().map(|f| f.try_map(lift)).collect::<Result<_, _>>()?;
    let expected: Vec<MultiPoly> = fs.expected.iter().map(lift).collect::<Result<_, _>>()?;
    let coeffs: Vec<MultiPoly> = fs.coeff_vars.iter().map(|v| MultiPoly::var(&vars, v)).collect::<Result<_, _>>()?;

    let mut theta = Matrix::zeros(n, n);
    let mut target = Matrix::zeros(n, n);
    for i in 0..k {
        theta = theta.add(&nablas[i].scale(&coeffs[i]))?;
        target = target.add(&nablas[i].scale(&expected[i]))?;
    }
    let acted = act_cocycle(&phi, &theta)?;
    let diff = form_to_vec(&acted.sub(&target)?);

    let c = a.product_matrix();
    if in_column_span(&c, &diff, &vars)? {
        return Ok(ActionOutcome::Pass);
    }
    diagnose(&vars, &a, &acted, &nablas, &expected)
}

/// Whether `d` lies in the column span of `c` over the field of rational
/// functions in `vars`.
fn in_column_span(c: &Matrix<MultiPoly>, d: &[MultiPoly], vars: &VarList) -> Result<bool, SymmetryError> {
    let rows = c.rows();
    if d.iter().all(|x| x.is_zero()) {
        return Ok(true);
    }
    // generic pivots from a random specialization
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let point = random_point(vars, &mut rng);
    let cq = c.try_map(|e| e.eval(&point))?;
    let col_piv = cq.rref().pivots;
    let cs = Matrix::from_columns(rows, &col_piv.iter().map(|&j| cq.column(j)).collect::<Vec<_>>());
    let row_piv = cs.transpose().rref().pivots;
    let r = col_piv.len();
    // bordered matrix [C_S | d]
    let mut g = Matrix::zeros(rows, r + 1);
    for i in 0..rows {
        for (jj, &j) in col_piv.iter().enumerate() {
            g.set(i, jj, c.get(i, j).clone());
        }
        g.set(i, r, d[i].clone());
    }
    let cols: Vec<usize> = (0..=r).collect();
    for rho in 0..rows {
        if row_piv.contains(&rho) {
            continue;
        }
        let mut rs = row_piv.clone();
        rs.push(rho);
        if !g.minor_det(&rs, &cols).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn random_point(vars: &VarList, rng: &mut ChaCha8Rng) -> BTreeMap<String, Rational> {
    vars.iter()
        .map(|v| {
            let mut x = 0;
            while x == 0 {
                x = rng.gen_range(-40i64..=40);
            }
            (v.clone(), Rational::from_int(x))
        })
        .collect()
}

/// Locates the disagreeing coefficients at random points, solving for the
/// acted form in the basis of the `N_k` followed by a basis of `B^2`.
fn diagnose(
    vars: &VarList,
    a: &Algebra<MultiPoly>,
    acted: &Matrix<MultiPoly>,
    nablas: &[Matrix<MultiPoly>],
    expected: &[MultiPoly],
) -> Result<ActionOutcome, SymmetryError> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    let mut bad = Vec::new();
    for _ in 0..4 {
        let point = random_point(vars, &mut rng);
        let ev = |p: &MultiPoly| p.eval(&point);
        let aq = a.try_map(ev)?;
        let c = aq.product_matrix();
        let b2 = Subspace::span(c.rows(), (0..c.cols()).map(|j| c.column(j)))?;
        let mut cols: Vec<Vec<Rational>> = nablas.iter().map(|f| f.try_map(ev).map(|m| form_to_vec(&m))).collect::<Result<_, _>>()?;
        cols.extend(b2.basis().iter().cloned());
        let m = Matrix::from_columns(c.rows(), &cols);
        let rhs = form_to_vec(&acted.try_map(ev)?);
        let Some(sol) = m.solve(&rhs)? else {
            return Err(SymmetryError::Stability(format!("image not in span at {point:?}")));
        };
        if m.rank() < cols.len() {
            return Err(SymmetryError::Stability("the N-forms are dependent modulo B2".into()));
        }
        for (i, e) in expected.iter().enumerate() {
            if sol[i] != e.eval(&point)? && !bad.contains(&(i + 1)) {
                bad.push(i + 1);
            }
        }
        if !bad.is_empty() {
            break;
        }
    }
    bad.sort_unstable();
    Ok(ActionOutcome::Mismatch(bad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{parse_cocycle, parse_expr};

    const PHI: [&str; 4] = ["x, 0, 0, 0", "q, x^2, r, u", "w, 0, t, k", "z, 0, y, l"];
    const NABLAS: [&str; 10] = [
        "D(1,2)+D(2,1)",
        "D(1,3)+D(3,1)",
        "D(1,4)+D(4,1)",
        "D(3,3)",
        "D(3,4)+D(4,3)",
        "D(4,4)",
        "D(2,1)",
        "D(3,1)",
        "D(4,1)",
        "D(4,3)",
    ];
    const FORMULAS: [&str; 10] = [
        "x^3 a1",
        "r x a1 + y (x a3 + w a5 + z a6) + t (x a2 + w a4 + z (a5 + a10))",
        "u x a1 + l (x a3 + w a5 + z a6) + k (x a2 + w a4 + z (a5 + a10))",
        "t^2 a4 + y (2 t a5 + y a6 + t a10)",
        "k t a4 + (l t + k y) a5 + y (l a6 + k a10)",
        "k^2 a4 + l (2 k a5 + l a6 + k a10)",
        "x^3 a7",
        "r x a7 + t x a8 + x y a9 + w y a10 - t z a10",
        "u x a7 + k x a8 + l x a9 + l w a10 - k z a10",
        "(l t - k y) a10",
    ];

    fn setup(formulas: &[&str]) -> (Algebra<MultiPoly>, ParametricMatrixFamily, ActionFormulaSet) {
        let a = Algebra::from_entries(4, [(0, 0, 1, Rational::one())]).unwrap().to_poly();
        let entries: Vec<Vec<_>> = PHI.iter().map(|r| r.split(',').map(|c| parse_expr(c.trim()).unwrap()).collect()).collect();
        let fam = ParametricMatrixFamily::from_exprs("phi", &entries, &[]).unwrap();
        let coeff_vars: Vec<String> = (1..=10).map(|i| format!("a{i}")).collect();
        let mut names: Vec<String> = fam.vars().to_vec();
        names.extend(coeff_vars.iter().cloned());
        let vars = var_list(&names);
        let none = |_: &str| None::<MultiPoly>;
        let nablas = NABLAS.iter().map(|s| parse_cocycle(s, 4, &[], &none).unwrap().remove(0)).collect();
        let expected = formulas.iter().map(|s| parse_expr(s).unwrap().to_poly(&vars).unwrap()).collect();
        (a, fam, ActionFormulaSet { nablas, coeff_vars, expected })
    }

    #[test]
    fn first_two_step_formulas_hold() {
        let (a, fam, fs) = setup(&FORMULAS);
        assert_eq!(verify_action_formulas(&a, &fam, &fs).unwrap(), ActionOutcome::Pass);
    }

    #[test]
    fn perturbed_formula_is_located() {
        let mut f = FORMULAS;
        f[0] = "x^2 a1";
        let (a, fam, fs) = setup(&f);
        assert_eq!(verify_action_formulas(&a, &fam, &fs).unwrap(), ActionOutcome::Mismatch(vec![1]));
    }

    #[test]
    fn missing_form_is_a_stability_error() {
        let (a, fam, mut fs) = setup(&FORMULAS);
        // D(3,3) alone is not stable: its image picks up D(3,4)+D(4,3) terms
        fs.nablas = vec![fs.nablas[3].clone()];
        fs.coeff_vars = vec!["a4".into()];
        let vars = var_list(&["t", "a4"]);
        fs.expected = vec![parse_expr("t^2 a4").unwrap().to_poly(&vars).unwrap()];
        assert!(matches!(verify_action_formulas(&a, &fam, &fs), Err(SymmetryError::Stability(_))));
    }
}
