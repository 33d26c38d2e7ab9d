use rayon::prelude::*;

use crate::arith::Rational;
use crate::catalog::{parse_expr, Catalog, CatalogEntry, Expr};
use crate::cohomology::{form_to_vec, h2};

use super::instance::{base_at, forms_at, label, min_samples, Values};
use super::{HarnessError, Item, Report, Status};

/// Recomputes `H^2` for every base algebra and compares with `expect.txt`.
pub fn verify_h2_tables(cat: &Catalog) -> Report {
    let mut r = Report::new("tables");
    let items: Vec<Vec<Item>> = cat.entries.par_iter().map(check_entry).collect();
    r.extend(items.into_iter().flatten());
    r.finish()
}

fn check_entry(e: &CatalogEntry) -> Vec<Item> {
    let samples = e.sample_bindings();
    let names = e.param_names();
    if samples.len() < min_samples(names.len()) {
        return vec![Item::new(e.name.clone(), Status::Fail(format!("only {} admissible samples", samples.len())))];
    }
    samples
        .iter()
        .map(|v| {
            let name = label(&e.name, &names, v);
            match check_sample(e, v) {
                Ok((fails, details)) => {
                    let status = if fails.is_empty() { Status::Pass } else { Status::Fail(fails.join("; ")) };
                    let mut it = Item::new(name, status);
                    it.details = details;
                    it
                }
                Err(err) => Item::new(name, Status::Fail(err.to_string())),
            }
        })
        .collect()
}

fn parse_gens(gens: &[String]) -> Result<Vec<Expr>, HarnessError> {
    gens.iter()
        .map(|g| parse_expr(g).map_err(|err| HarnessError::Config(format!("generator {g}: {err}"))))
        .collect()
}

type Outcome = (Vec<String>, Vec<(String, String)>);

fn check_sample(e: &CatalogEntry, v: &Values) -> Result<Outcome, HarnessError> {
    let a = base_at::<Rational>(e, v)?;
    let coh = h2(&a);
    let x = &e.expect;
    let mut fails = Vec::new();
    let mut details = vec![
        ("h2_bicom".to_string(), coh.dim_h2().to_string()),
        ("h2_com".to_string(), coh.dim_h2_com().to_string()),
    ];
    if !a.is_bicommutative() {
        fails.push("base is not bicommutative".to_string());
    }
    let mut cmp = |what: &str, got: usize, want: Option<usize>| {
        if let Some(w) = want {
            if got != w {
                fails.push(format!("{what} {got}, expected {w}"));
            }
        }
    };
    cmp("dim H2", coh.dim_h2(), x.h2_bicom);
    cmp("dim H2_com", coh.dim_h2_com(), x.h2_com);
    let nil = a.nilpotency_index().unwrap_or(0);
    details.push(("nilindex".into(), nil.to_string()));
    cmp("nilindex", nil, x.nilindex);

    let gens = forms_at::<Rational>(e, &parse_gens(&x.h2_gens)?, v)?;
    if !gens.is_empty() {
        if let Some(i) = gens.iter().position(|g| !coh.is_cocycle(g)) {
            fails.push(format!("generator {} is not a cocycle", x.h2_gens[i]));
        }
        let rank = coh.class_rank(&gens);
        if rank != coh.dim_h2() || gens.len() != rank {
            fails.push(format!("{} generators span {rank} classes of {}", gens.len(), coh.dim_h2()));
        }
    }
    let cgens = forms_at::<Rational>(e, &parse_gens(&x.h2_com_gens)?, v)?;
    if !cgens.is_empty() {
        if let Some(i) = cgens.iter().position(|g| !coh.sym_z2.contains(&form_to_vec(g))) {
            fails.push(format!("commutative generator {} is not a symmetric cocycle", x.h2_com_gens[i]));
        }
        let rank = coh.class_rank(&cgens);
        if rank != coh.dim_h2_com() || cgens.len() != rank {
            fails.push(format!("{} commutative generators span {rank} classes of {}", cgens.len(), coh.dim_h2_com()));
        }
    }
    Ok((fails, details))
}
