use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{fingerprint, Algebra};
use crate::arith::{FiniteField, Fp, Rational};
use crate::catalog::{parse_algebra, serialize_algebra, Catalog, CatalogEntry};
use crate::cohomology::{coboundary_space, cocycle_space, form_to_vec, BilinearForm, ExtensionSpec};
use crate::linalg::Matrix;
use crate::symmetry::{aut_enumerate_fp, family_census_fp, ParametricMatrixFamily, WORK_GUARD};
use crate::with_prime;

use super::instance::base_at;
use super::{HarnessError, Item, Report, Status};

const SEED: u64 = 0xb1c0_4411;

/// Each entry at its first sample binding.
fn instances(cat: &Catalog) -> Vec<(String, Algebra<Rational>)> {
    cat.entries
        .iter()
        .filter_map(|e| {
            let v = e.sample_bindings().into_iter().next()?;
            Some((e.name.clone(), base_at::<Rational>(e, &v).ok()?))
        })
        .collect()
}

fn random_invertible(n: usize, rng: &mut ChaCha8Rng) -> Matrix<Rational> {
    loop {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, Rational::from_int(rng.gen_range(-3i64..=3)));
            }
        }
        if m.is_invertible() {
            return m;
        }
    }
}

fn item(name: impl Into<String>, fails: Vec<String>) -> Item {
    if fails.is_empty() {
        Item::new(name, Status::Pass)
    } else {
        Item::new(name, Status::Fail(fails.join("; ")))
    }
}

/// `B^2 ⊆ Z^2` on every catalog algebra and on `trials` random basis changes.
pub fn prop_coboundaries_are_cocycles(cat: &Catalog, trials: usize) -> Report {
    let mut r = Report::new("prop_b2_in_z2");
    let inst = instances(cat);
    let check = |a: &Algebra<Rational>| coboundary_space(a).is_subspace_of(&cocycle_space(a));
    for (n, a) in &inst {
        r.push(item(n.clone(), if check(a) { vec![] } else { vec!["B2 not inside Z2".into()] }));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut bad = Vec::new();
    for t in 0..trials {
        let (n, a) = &inst[t % inst.len()];
        let m = random_invertible(a.dim(), &mut rng);
        match a.change_basis(&m) {
            Ok(b) if check(&b) => {}
            Ok(_) => bad.push(format!("{n} trial {t}")),
            Err(e) => bad.push(format!("{n} trial {t}: {e}")),
        }
    }
    r.push(item("random_basis_changes", bad).with("trials", trials));
    r.finish()
}

/// Extensions by random non-cocycles break an identity in every trial.
pub fn prop_noncocycle_breaks_identity(cat: &Catalog, trials: usize) -> Report {
    let mut r = Report::new("prop_noncocycle");
    let inst = instances(cat);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 2);
    let mut broken = 0;
    let mut bad = Vec::new();
    for t in 0..trials {
        let (n, a) = &inst[t % inst.len()];
        let d = a.dim();
        let z2 = cocycle_space(a);
        let theta = loop {
            let mut f = BilinearForm::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    f.set(i, j, Rational::from_int(rng.gen_range(-2i64..=2)));
                }
            }
            if !z2.contains(&form_to_vec(&f)) {
                break f;
            }
        };
        match ExtensionSpec::new(a.clone(), vec![theta]) {
            Ok(spec) if !spec.extension_unchecked().is_bicommutative() => broken += 1,
            Ok(_) => bad.push(format!("{n} trial {t}")),
            Err(e) => bad.push(e.to_string()),
        }
    }
    r.push(item("noncocycle", bad).with("broken", format!("{broken}/{trials}")));
    r.finish()
}

/// Fingerprints survive `per_entry` random basis changes of each catalog algebra.
pub fn prop_fingerprint_invariance(cat: &Catalog, per_entry: usize) -> Report {
    let mut r = Report::new("prop_fingerprint");
    let inst = instances(cat);
    let items: Vec<Item> = inst
        .par_iter()
        .enumerate()
        .map(|(k, (n, a))| {
            let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ (k as u64 + 3));
            let fp = fingerprint(a);
            let mut bad = Vec::new();
            for t in 0..per_entry {
                let m = random_invertible(a.dim(), &mut rng);
                match a.change_basis(&m) {
                    Ok(b) if fingerprint(&b) == fp => {}
                    Ok(b) => bad.push(format!("trial {t}: {} vs {fp}", fingerprint(&b))),
                    Err(e) => bad.push(e.to_string()),
                }
            }
            item(n.clone(), bad).with("trials", per_entry)
        })
        .collect();
    r.extend(items);
    r.finish()
}

/// `parse(serialize(a)) = a` and a second serialization is identical.
pub fn prop_parse_serialize(cat: &Catalog) -> Report {
    let mut r = Report::new("prop_roundtrip");
    for e in &cat.entries {
        let res = (|| -> Result<Vec<String>, String> {
            let s = serialize_algebra(&e.base, &e.name)?;
            let b = parse_algebra(&s).map_err(|x| x.to_string())?;
            let mut fails = Vec::new();
            if b.tensor() != e.base.tensor() || b.params() != e.base.params() || b.dim() != e.base.dim() {
                fails.push("parsed algebra differs".into());
            }
            if serialize_algebra(&b, &e.name)? != s {
                fails.push("serialization is not stable".into());
            }
            Ok(fails)
        })();
        r.push(match res {
            Ok(f) => item(e.name.clone(), f),
            Err(m) => Item::new(e.name.clone(), Status::Fail(m)),
        });
    }
    r.finish()
}

/// `dim B^2 = dim A^2` on every catalog algebra and every regenerated
/// extension at its first sample.
pub fn prop_dim_b2_equals_dim_a2(cat: &Catalog) -> Report {
    let mut r = Report::new("prop_b2_a2");
    let check = |name: String, a: &Algebra<Rational>| {
        let (b, s) = (coboundary_space(a).dim(), a.square().dim());
        item(name, if b == s { vec![] } else { vec![format!("dim B2 {b}, dim A2 {s}")] })
    };
    for (n, a) in instances(cat) {
        r.push(check(n, &a));
    }
    let reps: Vec<_> = cat.all_reps().filter(|(_, rep)| !rep.reference && rep.modp.is_empty()).collect();
    let items: Vec<Option<Item>> = reps
        .par_iter()
        .map(|(e, rep)| {
            let v = super::instance::rep_samples(e, rep).ok()?.into_iter().next()?;
            let (_, ext) = super::extensions::extension_at::<Rational>(e, &rep.cocycles, &v).ok()?;
            Some(check(rep.name.clone(), &ext))
        })
        .collect();
    r.extend(items.into_iter().flatten());
    r.finish()
}

fn census_at<F: FiniteField>(e: &CatalogEntry) -> Result<(u64, usize), HarnessError> {
    let a = base_at::<F>(e, &Default::default())?;
    let count = aut_enumerate_fp(&a, WORK_GUARD)?.count;
    let mut all: HashSet<Vec<F>> = HashSet::new();
    for spec in &e.families {
        let fam = ParametricMatrixFamily::from_exprs(&spec.name, &spec.entries, &e.param_names())?;
        all.extend(family_census_fp::<F>(&fam, &Default::default(), WORK_GUARD)?);
    }
    Ok((count, all.len()))
}

/// Exhaustive automorphism counts agree with the censuses of the
/// transcribed automorphism families.
pub fn census_agreement(cat: &Catalog) -> Report {
    let mut r = Report::new("census");
    let jobs: Vec<(&CatalogEntry, u64)> =
        cat.entries.iter().flat_map(|e| e.expect.census_primes.iter().map(move |&p| (e, p))).collect();
    let items: Vec<Item> = jobs
        .par_iter()
        .map(|(e, p)| {
            let name = format!("{}@F{p}", e.name);
            let res = with_prime!(*p, P => census_at::<Fp<P>>(e)).map_err(HarnessError::from).and_then(|x| x);
            match res {
                Ok((count, census)) => {
                    let mut fails = Vec::new();
                    if count as usize != census {
                        fails.push(format!("|Aut| = {count}, family census {census}"));
                    }
                    if let Some(&want) = e.expect.aut_counts.get(p) {
                        if want != count {
                            fails.push(format!("|Aut| = {count}, expected {want}"));
                        }
                    }
                    item(name, fails).with("aut", count).with("census", census)
                }
                Err(err) => Item::new(name, Status::Fail(err.to_string())),
            }
        })
        .collect();
    r.extend(items);
    r.finish()
}
