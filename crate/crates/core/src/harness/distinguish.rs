use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::algebra::{fingerprint, Algebra, Fingerprint};
use crate::arith::Rational;
use crate::catalog::Catalog;
use crate::cohomology::{BilinearForm, ExtensionSpec};

use super::extensions::{extension_at, extension_on};
use super::instance::{base_at, grounds, label, rep_samples, Ground};
use super::notes::{iso_at_prime, IsoVerdict};
use super::{natural_cmp, Item, Report, Status};

/// Largest collision class searched pairwise for isomorphisms.
const SEARCH_CLASS_LIMIT: usize = 6;
const SEARCH_PRIME: u64 = 7;
const SEARCH_BUDGET: u64 = 200_000;

/// A fingerprinted instance; the rational algebra is kept for searches.
type Sample = (Fingerprint, Option<Algebra<Rational>>);

/// Fingerprints every counted representative at its first sample and
/// groups them; equal fingerprints are reported, not failed.
pub fn distinguish_all(cat: &Catalog, search: bool) -> Report {
    let mut r = Report::new("distinguish");
    let jobs: Vec<_> = cat.all_reps().filter(|(_, rep)| !rep.reference).collect();
    let rows: Vec<(Item, Option<Sample>)> = jobs
        .par_iter()
        .map(|(e, rep)| {
            let v = match rep_samples(e, rep).map(|s| s.into_iter().next()) {
                Ok(Some(v)) => v,
                Ok(None) => return (Item::new(rep.name.clone(), Status::Fail("no admissible sample".into())), None),
                Err(err) => return (Item::new(rep.name.clone(), Status::Fail(err.to_string())), None),
            };
            let name = label(&rep.name, &rep.free_params(), &v);
            let ground = grounds(rep)[0];
            let res = match ground {
                Ground::Rationals => extension_at::<Rational>(e, &rep.cocycles, &v).map(|(c, a)| (c.fingerprint, Some(a))),
                g => extension_on(g, e, &rep.cocycles, &v).map(|c| (c.fingerprint, None)),
            };
            match res {
                Ok((fp, alg)) => (Item::new(name, Status::Pass).with("fingerprint", fp), Some((fp, alg))),
                Err(err) => (Item::new(name, Status::Fail(err.to_string())), None),
            }
        })
        .collect();

    let mut classes: BTreeMap<Fingerprint, Vec<(String, Option<Algebra<Rational>>)>> = BTreeMap::new();
    for (it, fp) in rows {
        if let Some((fp, alg)) = fp {
            classes.entry(fp).or_default().push((it.name.clone(), alg));
        }
        r.push(it);
    }
    let mut collisions = 0;
    let mut found = Vec::new();
    for (k, (fp, members)) in classes.iter_mut().enumerate() {
        members.sort_by(|a, b| natural_cmp(&a.0, &b.0));
        if members.len() < 2 {
            continue;
        }
        collisions += 1;
        let names: Vec<&str> = members.iter().map(|(n, _)| n.as_str()).collect();
        r.note(format!("class{k}"), format!("{fp} {}", names.join(",")));
        if search && members.len() <= SEARCH_CLASS_LIMIT {
            for i in 0..members.len() {
                for j in i + 1..members.len() {
                    if let (Some(a), Some(b)) = (&members[i].1, &members[j].1) {
                        if let Ok(IsoVerdict::Found) = iso_at_prime(a, b, SEARCH_PRIME, SEARCH_BUDGET) {
                            found.push(format!("{}~{}", members[i].0, members[j].0));
                        }
                    }
                }
            }
        }
    }
    r.note("classes", classes.len());
    r.note("collision_classes", collisions);
    if search {
        r.note(format!("isomorphic_mod{SEARCH_PRIME}"), found.join(" "));
    }
    r.push(split_control(cat));
    r.finish()
}

/// The first representative against its base plus a trivial summand.
fn split_control(cat: &Catalog) -> Item {
    let name = "control/split";
    let Some((e, rep)) = cat.all_reps().find(|(_, r)| !r.reference && r.modp.is_empty()) else {
        return Item::new(name, Status::Skip("no representative".into()));
    };
    let run = || -> Result<(Fingerprint, Fingerprint), super::HarnessError> {
        let v = rep_samples(e, rep)?.into_iter().next().unwrap_or_default();
        let (c, _) = extension_at::<Rational>(e, &rep.cocycles, &v)?;
        let base = base_at::<Rational>(e, &v)?;
        let zero = vec![BilinearForm::zeros(e.dim(), e.dim()); rep.s()];
        let split = ExtensionSpec::new(base, zero)?.extension_unchecked();
        Ok((c.fingerprint, fingerprint(&split)))
    };
    match run() {
        Ok((a, b)) if a != b => Item::new(name, Status::Pass).with("representative", &rep.name),
        Ok(_) => Item::new(name, Status::Fail(format!("{} shares its fingerprint with a split extension", rep.name))),
        Err(err) => Item::new(name, Status::Fail(err.to_string())),
    }
}
