use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::algebra::Algebra;
use crate::arith::{Fp, Rational, SUPPORTED_PRIMES};
use crate::catalog::{cyclic_samples, parse_expr, Catalog, CatalogEntry, Expr, IsoNote, NoteSide, RepresentativeSpec};
use crate::symmetry::{iso_search_fp, IsoSearch};
use crate::with_prime;

use super::extensions::extension_at;
use super::instance::{constraints_hold, Values};
use super::{HarnessError, Item, Report, Status};

/// Default node budget per isomorphism search.
pub const NOTE_BUDGET: u64 = 400_000;
/// Primes tried per note, smallest first.
const NOTE_PRIMES: usize = 2;
/// Bound on candidate assignments for unspecified right-hand parameters.
const CANDIDATE_LIMIT: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsoVerdict {
    Found,
    Absent,
    Exhausted,
}

/// Isomorphism search between rational algebras reduced modulo `p`.
pub fn iso_at_prime(a: &Algebra<Rational>, b: &Algebra<Rational>, p: u64, budget: u64) -> Result<IsoVerdict, HarnessError> {
    with_prime!(p, P => {
        let x = a.reduce_mod::<Fp<P>>()?;
        let y = b.reduce_mod::<Fp<P>>()?;
        Ok::<_, HarnessError>(match iso_search_fp(&x, &y, budget)? {
            IsoSearch::Found(_) => IsoVerdict::Found,
            IsoSearch::NotFound { exhausted: true, .. } => IsoVerdict::Exhausted,
            IsoSearch::NotFound { .. } => IsoVerdict::Absent,
        })
    })?
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NoteStatus {
    /// An explicit isomorphism was found over `F_p`.
    Certified { prime: u64 },
    FingerprintConsistent,
    Failed(String),
}

impl NoteStatus {
    pub fn word(&self) -> &'static str {
        match self {
            NoteStatus::Certified { .. } => "certified",
            NoteStatus::FingerprintConsistent => "fingerprint-consistent",
            NoteStatus::Failed(_) => "failed",
        }
    }
}

/// Sample label, verdict and details for one instance of a note.
pub type NoteRow = (String, NoteStatus, Vec<(String, String)>);

struct Side<'a> {
    entry: &'a CatalogEntry,
    rep: &'a RepresentativeSpec,
    args: Vec<Expr>,
}

fn side<'a>(cat: &'a Catalog, s: &NoteSide, prefix: &str) -> Result<Side<'a>, HarnessError> {
    let (entry, rep) = cat
        .representative(&s.name)
        .ok_or_else(|| HarnessError::Config(format!("unknown representative {}", s.name)))?;
    let mut args = s.args.clone();
    for p in rep.free_params().iter().skip(args.len()) {
        args.push(parse_expr(&format!("{prefix}{p}")).map_err(|e| HarnessError::Config(e.to_string()))?);
    }
    Ok(Side { entry, rep, args })
}

fn idents(args: &[Expr]) -> Vec<String> {
    let mut out: Vec<String> = args.iter().flat_map(|a| a.idents()).filter(|i| i != "I").collect();
    out.sort();
    out.dedup();
    out
}

/// Representative parameter values from the side's arguments at `v`.
fn side_values(s: &Side<'_>, v: &Values) -> Result<Values, HarnessError> {
    let mut out = s.rep.bound_values()?;
    for (p, a) in s.rep.free_params().iter().zip(&s.args) {
        out.insert(p.clone(), a.eval_scalar::<Rational>(v)?);
    }
    Ok(out)
}

fn candidate_pool(seed: &[Rational]) -> Vec<Rational> {
    let mut pool: Vec<Rational> = [0, 1, -1, 2, -2].iter().map(|&x| Rational::from_int(x)).collect();
    pool.push(Rational::new(1, 2).expect("nonzero"));
    pool.push(Rational::new(-1, 2).expect("nonzero"));
    for x in seed {
        pool.push(x.clone());
        pool.push(-x);
        pool.push(x * x);
        pool.push(-(x * x));
        if let Ok(r) = x.recip() {
            pool.push(r.clone());
            pool.push(-r);
        }
        if let Some(r) = x.sqrt() {
            pool.push(r.clone());
            pool.push(-r);
        }
        if let Some(r) = (-x).sqrt() {
            pool.push(r.clone());
            pool.push(-r);
        }
    }
    let mut out: Vec<Rational> = Vec::new();
    for x in pool {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

fn assignments(unknowns: &[String], pool: &[Rational]) -> Vec<Values> {
    let mut out = vec![Values::new()];
    for u in unknowns {
        let mut next = Vec::new();
        for a in &out {
            for x in pool {
                if next.len() >= CANDIDATE_LIMIT {
                    break;
                }
                let mut b = a.clone();
                b.insert(u.clone(), x.clone());
                next.push(b);
            }
        }
        out = next;
    }
    out
}

/// Primes from 5 upwards at which both algebras reduce.
fn usable_primes(a: &Algebra<Rational>, b: &Algebra<Rational>) -> Vec<u64> {
    SUPPORTED_PRIMES
        .iter()
        .copied()
        .filter(|&p| p >= 5)
        .filter(|&p| with_prime!(p, P => a.reduce_mod::<Fp<P>>().is_ok() && b.reduce_mod::<Fp<P>>().is_ok()).unwrap_or(false))
        .take(NOTE_PRIMES)
        .collect()
}

/// Checks one note at every admissible sample of its variables. Both sides
/// must agree on the fingerprint and on having an annihilator component.
pub fn verify_note(cat: &Catalog, note: &IsoNote, budget: u64) -> Vec<NoteRow> {
    let head = format!("line{}", note.line);
    let run = || -> Result<Vec<NoteRow>, HarnessError> {
        let left = side(cat, &note.left, "l_")?;
        let right = side(cat, &note.right, "r_")?;
        let vars = idents(&left.args);
        let unknowns: Vec<String> = idents(&right.args).into_iter().filter(|u| !vars.contains(u)).collect();
        let samples = cyclic_samples(&vars, |v| {
            constraints_hold(&note.where_, v) && side_values(&left, v).is_ok()
        });
        let mut out = Vec::new();
        for v in samples {
            let tag = {
                let vs: Vec<String> = vars.iter().map(|k| format!("{k}={}", v[k])).collect();
                if vs.is_empty() { head.clone() } else { format!("{head}{{{}}}", vs.join(",")) }
            };
            let lv = side_values(&left, &v)?;
            let (lc, la) = extension_at::<Rational>(left.entry, &left.rep.cocycles, &lv)?;
            let split = la.has_annihilator_component();
            let seed: Vec<Rational> = v.values().chain(lv.values()).cloned().collect();
            let pool = candidate_pool(&seed);
            let mut matches: Vec<(Values, Algebra<Rational>)> = Vec::new();
            for u in assignments(&unknowns, &pool) {
                let mut all = v.clone();
                all.extend(u.clone());
                let Ok(rv) = side_values(&right, &all) else { continue };
                let Ok((rc, ra)) = extension_at::<Rational>(right.entry, &right.rep.cocycles, &rv) else { continue };
                if rc.fingerprint == lc.fingerprint && ra.has_annihilator_component() == split {
                    matches.push((u, ra));
                }
            }
            let mut details = vec![("fingerprint".to_string(), lc.fingerprint.to_string()), ("split".to_string(), split.to_string())];
            if matches.is_empty() {
                let what = if split { "split" } else { "non-split" };
                out.push((tag, NoteStatus::Failed(format!("no right-hand instance matches fingerprint {} ({what})", lc.fingerprint)), details));
                continue;
            }
            let mut status = NoteStatus::FingerprintConsistent;
            'search: for (u, ra) in matches.iter().take(4) {
                for p in usable_primes(&la, ra) {
                    if let Ok(IsoVerdict::Found) = iso_at_prime(&la, ra, p, budget) {
                        status = NoteStatus::Certified { prime: p };
                        for (k, x) in u {
                            details.push((k.clone(), x.to_string()));
                        }
                        break 'search;
                    }
                }
            }
            if status == NoteStatus::FingerprintConsistent {
                if let Some((u, _)) = matches.first() {
                    for (k, x) in u {
                        details.push((k.clone(), x.to_string()));
                    }
                }
            }
            out.push((tag, status, details));
        }
        if out.is_empty() {
            return Err(HarnessError::Config("no admissible sample".into()));
        }
        Ok(out)
    };
    match run() {
        Ok(v) => v,
        Err(e) => vec![(head, NoteStatus::Failed(e.to_string()), Vec::new())],
    }
}

fn to_item(note: &IsoNote, (tag, st, details): NoteRow) -> Item {
    let status = match &st {
        NoteStatus::Failed(r) => Status::Fail(r.clone()),
        _ => Status::Pass,
    };
    let mut it = Item::new(tag, status).with("note", &note.text).with("status", st.word());
    if let NoteStatus::Certified { prime } = st {
        it = it.with("prime", prime);
    }
    it.details.extend(details);
    it
}

/// A copy of `note` whose right side names a representative with a
/// different number of cocycles, so no instance can match.
pub fn perturbed_note(cat: &Catalog, note: &IsoNote) -> Option<IsoNote> {
    let (_, l) = cat.representative(&note.left.name)?;
    let (_, r) = cat.all_reps().find(|(_, r)| !r.reference && r.s() != l.s() && r.arity() == 0)?;
    let mut bad = note.clone();
    bad.right = NoteSide { name: r.name.clone(), args: Vec::new() };
    bad.text = format!("{} (perturbed to {})", note.text, r.name);
    Some(bad)
}

/// Checks every note with `budget` search nodes per attempt; a perturbed
/// copy of the first note must fail.
pub fn verify_iso_notes(cat: &Catalog, budget: u64) -> Report {
    let mut r = Report::new("isonotes");
    let rows: Vec<Vec<Item>> = cat
        .notes
        .par_iter()
        .map(|n| verify_note(cat, n, budget).into_iter().map(|x| to_item(n, x)).collect())
        .collect();
    let items: Vec<Item> = rows.into_iter().flatten().collect();
    let mut by_status: BTreeMap<&str, usize> = BTreeMap::new();
    for it in &items {
        *by_status.entry(match it.detail("status") {
            Some("certified") => "certified",
            Some("fingerprint-consistent") => "fingerprint-consistent",
            _ => "failed",
        })
        .or_default() += 1;
    }
    r.extend(items);
    if let Some(bad) = cat.notes.first().and_then(|n| perturbed_note(cat, n)) {
        let failed = verify_note(cat, &bad, budget).iter().all(|(_, s, _)| matches!(s, NoteStatus::Failed(_)));
        r.push(if failed {
            Item::new("control/perturbed", Status::Pass).with("note", &bad.text)
        } else {
            Item::new("control/perturbed", Status::Fail("perturbed note was accepted".into())).with("note", &bad.text)
        });
    }
    for (k, v) in by_status {
        r.note(k, v);
    }
    r.finish()
}
