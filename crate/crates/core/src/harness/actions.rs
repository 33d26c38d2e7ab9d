use rayon::prelude::*;

use crate::arith::{var_list, MultiPoly};
use crate::catalog::{Catalog, CatalogEntry, FormulaSet, MatrixFamilySpec};
use crate::symmetry::{certify_parametric_aut, verify_action_formulas, ActionFormulaSet, ActionOutcome, ParametricMatrixFamily, SymmetryError};

use super::{HarnessError, Item, Report, Status};

/// Certifies every automorphism family and checks its action formulas as
/// polynomial identities modulo `B^2`.
pub fn verify_actions(cat: &Catalog) -> Report {
    let mut r = Report::new("actions");
    let jobs: Vec<(&CatalogEntry, &MatrixFamilySpec)> =
        cat.entries.iter().flat_map(|e| e.families.iter().map(move |f| (e, f))).collect();
    let items: Vec<Item> = jobs.par_iter().map(|(e, f)| check_family(e, f)).collect();
    r.extend(items);
    r.note("entries", cat.entries.iter().filter(|e| !e.families.is_empty()).count());
    r.finish()
}

fn check_family(e: &CatalogEntry, spec: &MatrixFamilySpec) -> Item {
    let name = format!("{}/{}", e.name, spec.name);
    let fam = match ParametricMatrixFamily::from_exprs(&spec.name, &spec.entries, &e.param_names()) {
        Ok(f) => f,
        Err(err) => return Item::new(name, Status::Fail(format!("family: {err}"))),
    };
    match certify_parametric_aut(&e.base, &fam) {
        Ok(Ok(())) => {}
        Ok(Err((i, j))) => {
            return Item::new(name, Status::Fail(format!("not an endomorphism at e{}*e{}", i + 1, j + 1)));
        }
        Err(err) => return Item::new(name, Status::Fail(err.to_string())),
    }
    let sets: Vec<&FormulaSet> = e.formulas.iter().filter(|f| f.family == spec.name).collect();
    if sets.is_empty() {
        return Item::new(name, Status::Pass).with("certified", true).with("formulas", 0);
    }
    let mut count = 0;
    for fs in sets {
        count += fs.formulas.len();
        match check_formulas(e, &fam, fs) {
            Ok(ActionOutcome::Pass) => {}
            Ok(ActionOutcome::Mismatch(bad)) => {
                let ks: Vec<String> = bad.iter().map(|k| format!("a{k}*")).collect();
                return Item::new(name, Status::Fail(format!("formula mismatch: {}", ks.join(", "))));
            }
            Err(HarnessError::Symmetry(SymmetryError::Stability(m))) => {
                return Item::new(name, Status::Fail(format!("stability: {m}")));
            }
            Err(err) => return Item::new(name, Status::Fail(err.to_string())),
        }
    }
    Item::new(name, Status::Pass).with("certified", true).with("formulas", count)
}

fn check_formulas(e: &CatalogEntry, fam: &ParametricMatrixFamily, fs: &FormulaSet) -> Result<ActionOutcome, HarnessError> {
    let k = e.nablas.len();
    let coeff_vars: Vec<String> = (1..=k).map(|i| format!("a{i}")).collect();
    let mut names: Vec<String> = e.param_names();
    for v in fam.vars().iter().chain(coeff_vars.iter()) {
        if !names.contains(v) {
            names.push(v.clone());
        }
    }
    let vars = var_list(&names);
    let look = |n: &str| MultiPoly::var(&vars, n).ok();
    let nablas = e.nabla_forms::<MultiPoly>(&look)?;
    let expected = (1..=k)
        .map(|i| {
            let (_, ex) = fs
                .formulas
                .iter()
                .find(|(j, _)| *j == i)
                .ok_or_else(|| HarnessError::Config(format!("{}: no formula for a{i}*", e.name)))?;
            Ok(ex.to_poly(&vars)?)
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    Ok(verify_action_formulas(&e.base, fam, &ActionFormulaSet { nablas, coeff_vars, expected })?)
}
