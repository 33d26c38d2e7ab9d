use std::path::Path;

use rayon::prelude::*;

use crate::algebra::{fingerprint, Algebra, Fingerprint, ParamDecl};
use crate::arith::{var_list, Field, Fp, MultiPoly, Rational};
use crate::catalog::{cyclic_samples, eval_form, serialize_algebra, serialize_rational, Catalog, CatalogEntry, Expr, RepresentativeSpec};
use crate::cohomology::{BilinearForm, ExtensionSpec, SplitReason};
use crate::with_prime;

use super::instance::{base_at, constraints_hold, forms_at, grounds, label, min_samples, rep_samples, respects_exclusions, Ground, Values};
use super::{HarnessError, Item, Report, Status};

/// Result of checking one extension `A_theta`.
#[derive(Debug, Clone)]
pub struct ExtensionCheck {
    pub failures: Vec<String>,
    pub details: Vec<(String, String)>,
    pub fingerprint: Fingerprint,
}

/// Whether some `theta_i(x, y)` or `theta_i(y, x)` is nonzero with `x` in `A^2`.
fn hits_square<F: Field>(a: &Algebra<F>, thetas: &[BilinearForm<F>]) -> bool {
    let sq = a.square();
    thetas.iter().any(|t| {
        sq.basis().iter().any(|x| {
            let right = t.mul_vec(x).expect("dimension");
            let left = t.transpose().mul_vec(x).expect("dimension");
            right.iter().chain(&left).any(|c| !c.is_zero())
        })
    })
}

/// Every structural check on `A_theta`, with the expected dimension.
pub fn check_extension<F: Field>(base: Algebra<F>, thetas: Vec<BilinearForm<F>>, dim: usize) -> Result<(ExtensionCheck, Algebra<F>), HarnessError> {
    let mut failures = Vec::new();
    let base_nil = base.nilpotency_index().unwrap_or(0);
    let hits = hits_square(&base, &thetas);
    let spec = ExtensionSpec::new(base, thetas)?;
    if spec.validate().is_err() {
        let ext = spec.extension_unchecked();
        let fp = fingerprint(&ext);
        return Ok((
            ExtensionCheck { failures: vec!["a cocycle fails the cocycle identities".into()], details: Vec::new(), fingerprint: fp },
            ext,
        ));
    }
    let ext = spec.central_extension()?;
    if ext.dim() != dim {
        failures.push(format!("dimension {}, expected {dim}", ext.dim()));
    }
    if !ext.is_bicommutative() {
        failures.push("extension is not bicommutative".into());
    }
    let nil = ext.nilpotency_index();
    match nil {
        None => failures.push("extension is not nilpotent".into()),
        Some(k) if (base_nil >= 4 || hits) && k < 4 => failures.push("extension is 2-step".into()),
        _ => {}
    }
    match spec.nonsplit_check()? {
        Ok(()) => {}
        Err(SplitReason::DependentClasses { rank, s }) => failures.push(format!("classes span {rank} of {s}")),
        Err(SplitReason::AnnihilatorWitness(w)) => failures.push(format!("T_s fails: Ann(theta) ∩ Ann(A) contains {w:?}")),
    }
    if ext.has_annihilator_component() {
        failures.push("extension has an annihilator component".into());
    }
    if let Err((lhs, rhs)) = spec.annihilator_law()? {
        failures.push(format!("Ann(A_theta) has dimension {}, law predicts {}", lhs.dim(), rhs.dim()));
    }
    let fp = fingerprint(&ext);
    let details = vec![
        ("nilindex".to_string(), nil.unwrap_or(0).to_string()),
        ("non2step_required".to_string(), (base_nil >= 4 || hits).to_string()),
        ("fingerprint".to_string(), fp.to_string()),
    ];
    Ok((ExtensionCheck { failures, details, fingerprint: fp }, ext))
}

/// The extension of `entry` by `cocycles` at `values` over the chosen field.
pub fn extension_at<F: Field>(
    entry: &CatalogEntry,
    cocycles: &[Expr],
    values: &Values,
) -> Result<(ExtensionCheck, Algebra<F>), HarnessError> {
    let base = base_at::<F>(entry, values)?;
    let thetas = forms_at::<F>(entry, cocycles, values)?;
    let dim = entry.dim() + thetas.len();
    check_extension(base, thetas, dim)
}

/// Fingerprint-level summary over any supported ground field.
pub fn extension_on(ground: Ground, entry: &CatalogEntry, cocycles: &[Expr], values: &Values) -> Result<ExtensionCheck, HarnessError> {
    match ground {
        Ground::Rationals => Ok(extension_at::<Rational>(entry, cocycles, values)?.0),
        Ground::Prime(p) => with_prime!(p, P => extension_at::<Fp<P>>(entry, cocycles, values).map(|x| x.0))?,
    }
}

/// The extension with free parameters kept symbolic, when its coefficients
/// are linear in them.
fn parametric_text(entry: &CatalogEntry, rep: &RepresentativeSpec, file: &str) -> Option<String> {
    let bound = rep.bound_values().ok()?;
    let free = rep.free_params();
    let vars = var_list(&free);
    let look = |n: &str| -> Option<MultiPoly> {
        match bound.get(n) {
            Some(v) => Some(MultiPoly::constant_in(&vars, v.clone())),
            None => MultiPoly::var(&vars, n).ok(),
        }
    };
    let base = entry.base.try_map(|c| c.substitute(&bound).lift_to(&vars)).ok()?;
    let thetas: Vec<BilinearForm<MultiPoly>> =
        rep.cocycles.iter().map(|e| eval_form(e, entry.dim(), &entry.nablas, &look)).collect::<Result<_, _>>().ok()?;
    let n = entry.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let c = base.get(i, j, k);
                if !c.is_zero() {
                    out.push((i, j, k, c.clone()));
                }
            }
            for (t, th) in thetas.iter().enumerate() {
                if !th.get(i, j).is_zero() {
                    out.push((i, j, n + t, th.get(i, j).clone()));
                }
            }
        }
    }
    let decls = free
        .iter()
        .map(|p| ParamDecl {
            name: p.clone(),
            excluded: entry.params().iter().find(|d| &d.name == p).map_or(Vec::new(), |d| d.excluded.clone()),
        })
        .collect();
    let ext = Algebra::from_entries(n + thetas.len(), out).ok()?.with_params(decls);
    let body = serialize_algebra(&ext, file).ok()?;
    let mut s = String::new();
    for c in &rep.constraints {
        s.push_str(&format!("# where {}\n", c.text));
    }
    s.push_str(&body);
    Some(s)
}

fn file_name(rep: &str) -> String {
    match rep.strip_prefix('B') {
        Some(num) => format!("B_{num}"),
        None => rep.to_string(),
    }
}

fn item_from(name: String, res: Result<ExtensionCheck, HarnessError>, ground: Ground) -> (Item, Option<Fingerprint>) {
    match res {
        Ok(c) => {
            let status = if c.failures.is_empty() { Status::Pass } else { Status::Fail(c.failures.join("; ")) };
            let mut it = Item::new(name, status);
            it.details = c.details;
            if ground != Ground::Rationals {
                it.details.push(("field".into(), ground.to_string()));
            }
            (it, Some(c.fingerprint))
        }
        Err(e) => (Item::new(name, Status::Fail(e.to_string())), None),
    }
}

fn check_counted(entry: &CatalogEntry, rep: &RepresentativeSpec, out: Option<&Path>) -> Vec<Item> {
    let samples = match rep_samples(entry, rep) {
        Ok(s) => s,
        Err(e) => return vec![Item::new(rep.name.clone(), Status::Fail(e.to_string()))],
    };
    if samples.len() < min_samples(rep.arity()) {
        return vec![Item::new(rep.name.clone(), Status::Fail(format!("only {} admissible samples", samples.len())))];
    }
    let free = rep.free_params();
    let mut items = Vec::new();
    for ground in grounds(rep) {
        for v in &samples {
            let mut name = label(&rep.name, &free, v);
            if ground != Ground::Rationals {
                name = format!("{name}@{ground}");
            }
            let (it, _) = item_from(name, extension_on(ground, entry, &rep.cocycles, v), ground);
            items.push(it.with("source", &entry.name));
        }
    }
    if let Some(dir) = out {
        let file = file_name(&rep.name);
        let text = parametric_text(entry, rep, &file).or_else(|| {
            let v = samples.first()?;
            let (_, ext) = extension_at::<Rational>(entry, &rep.cocycles, v).ok()?;
            Some(format!("# sampled at {}\n{}", label(&rep.name, &free, v), serialize_rational(&ext, &file)))
        });
        if let Some(text) = text {
            if let Err(e) = std::fs::write(dir.join(format!("{file}.alg")), text) {
                items.push(Item::new(format!("{}/emit", rep.name), Status::Fail(e.to_string())));
            }
        } else {
            items.push(Item::new(format!("{}/emit", rep.name), Status::Skip("no rational form to emit".into())));
        }
    }
    items
}

/// A `ref` line: the extension restated in another section must match the
/// target representative at the bound values; exclusions are not enforced.
fn check_reference(cat: &Catalog, entry: &CatalogEntry, rep: &RepresentativeSpec) -> Vec<Item> {
    let head = format!("ref {}@{}", rep.name, entry.name);
    let Some((tentry, target)) = cat.representative(&rep.name) else {
        return vec![Item::new(head, Status::Fail("unknown target".into()))];
    };
    let bound = match (target.bound_values(), rep.bound_values()) {
        (Ok(a), Ok(b)) => a.into_iter().chain(b).collect::<Values>(),
        (Err(e), _) | (_, Err(e)) => return vec![Item::new(head, Status::Fail(e.to_string()))],
    };
    let mut free: Vec<String> = target.free_params().into_iter().filter(|p| !bound.contains_key(p)).collect();
    for p in entry.param_names() {
        if !free.contains(&p) && !bound.contains_key(&p) {
            free.push(p);
        }
    }
    let merge = |b: &Values| -> Values {
        let mut v = bound.clone();
        v.extend(b.iter().map(|(k, x)| (k.clone(), x.clone())));
        v
    };
    let samples: Vec<Values> =
        cyclic_samples(&free, |b| respects_exclusions(entry, &merge(b)) && constraints_hold(&rep.constraints, &merge(b)))
            .iter()
            .map(merge)
            .collect();
    let mut items = Vec::new();
    for v in &samples {
        let name = label(&head, &free, v);
        let (mut it, fp) = item_from(name, extension_on(Ground::Rationals, entry, &rep.cocycles, v), Ground::Rationals);
        let target_fp = extension_on(Ground::Rationals, tentry, &target.cocycles, v);
        match (fp, target_fp) {
            (Some(a), Ok(t)) if a != t.fingerprint => {
                it.status = Status::Fail(format!("fingerprint {a} differs from target {}", t.fingerprint));
            }
            (_, Err(e)) => it.status = Status::Fail(format!("target: {e}")),
            _ => {}
        }
        items.push(it.with("target", &tentry.name));
    }
    if samples.is_empty() {
        items.push(Item::new(head, Status::Fail("no admissible samples".into())));
    }
    items
}

/// The zero cocycle on the first catalog entry must be flagged split.
pub fn theta_zero_control(cat: &Catalog) -> Item {
    let name = "control/theta0";
    let Some(e) = cat.entries.first() else {
        return Item::new(name, Status::Fail("empty catalog".into()));
    };
    let v: Values = e.sample_bindings().into_iter().next().unwrap_or_default();
    let run = || -> Result<bool, HarnessError> {
        let base = base_at::<Rational>(e, &v)?;
        let spec = ExtensionSpec::new(base, vec![BilinearForm::zeros(e.dim(), e.dim())])?;
        Ok(spec.nonsplit_check()?.is_err())
    };
    match run() {
        Ok(true) => Item::new(name, Status::Pass).with("base", &e.name),
        Ok(false) => Item::new(name, Status::Fail("zero cocycle accepted as non-split".into())),
        Err(err) => Item::new(name, Status::Fail(err.to_string())),
    }
}

/// Builds and checks every representative; writes `B_<i>.alg` files to
/// `out` when given.
pub fn regenerate_extensions(cat: &Catalog, out: Option<&Path>) -> Report {
    let mut r = Report::new("extensions");
    if let Some(dir) = out {
        if let Err(e) = std::fs::create_dir_all(dir) {
            r.push(Item::new("emit", Status::Fail(e.to_string())));
        }
    }
    let jobs: Vec<(&CatalogEntry, &RepresentativeSpec)> = cat.all_reps().collect();
    let items: Vec<Vec<Item>> = jobs
        .par_iter()
        .map(|(e, rep)| if rep.reference { check_reference(cat, e, rep) } else { check_counted(e, rep, out) })
        .collect();
    r.extend(items.into_iter().flatten());
    r.push(theta_zero_control(cat));
    let counted = jobs.iter().filter(|(_, r)| !r.reference).count();
    r.note("representatives", counted);
    r.note("references", jobs.len() - counted);
    r.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_representative_regenerates() {
        let cat = Catalog::embedded().unwrap();
        let (e, r) = cat.representative("B01").unwrap();
        let (c, ext) = extension_at::<Rational>(e, &r.cocycles, &Values::new()).unwrap();
        assert!(c.failures.is_empty(), "{:?}", c.failures);
        assert_eq!(ext.dim(), 5);
        assert_eq!(ext.nilpotency_index(), Some(4));
    }

    #[test]
    fn control_is_split() {
        let cat = Catalog::embedded().unwrap();
        assert_eq!(theta_zero_control(&cat).status, Status::Pass);
    }
}
