//! Acceptance suite: one verdict line per criterion.
//!
//! Criteria whose failures are documented findings about the source
//! classification are expected to fail with exactly those failures; the
//! process exits nonzero only on a failure outside that list or a missed
//! runtime bound.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use bicomm::arith::Rational;
use bicomm::catalog::Catalog;
use bicomm::cohomology::h2;
use bicomm::harness::{self, instance, Report, THEOREM_A_TALLY};

/// `(entry, dim H^2, dim H^2_com)` as stated in the base-algebra tables.
const H2_TABLE: &[(&str, usize, Option<usize>)] = &[
    ("N01", 10, Some(6)),
    ("N02", 6, Some(3)),
    ("N03", 8, None),
    ("N04", 8, None),
    ("N04_0", 10, None),
    ("N05", 8, None),
    ("N06", 8, None),
    ("N07", 6, None),
    ("N08", 6, None),
    ("N08_1", 7, None),
    ("N09", 8, None),
    ("N10", 8, None),
    ("N11", 8, None),
    ("N12", 6, None),
    ("N13", 6, None),
    ("N14", 6, None),
    ("N14_0", 7, None),
    ("N15", 8, None),
    ("B4_01", 5, None),
    ("B4_02", 5, None),
    ("B4_04", 4, None),
    ("B4_05", 4, None),
    ("B4_06", 5, None),
    ("B4_07", 4, None),
    ("B4_08", 5, None),
    ("B4_09", 5, None),
    ("B4_10", 4, None),
    ("B4_11", 5, None),
    ("B4_12", 4, None),
    ("B4_13", 4, None),
    ("B4_14", 4, None),
    ("B4_15", 4, None),
    ("B4_16", 5, None),
    ("B4_17", 5, None),
    ("B4_18", 5, None),
    ("B4_19", 5, None),
    ("B3s_01", 5, None),
    ("B3s_02", 3, None),
    ("B3s_03", 3, None),
    ("B3s_04", 3, None),
    ("B3s_04_0", 5, None),
];

/// Action formulas that disagree with the transcribed automorphism families.
const KNOWN_ACTION_FAILURES: &[&str] = &["N13/phi1", "N13/phi2"];
/// Representatives whose extension violates `T_s`.
const KNOWN_EXTENSION_FAILURES: &[&str] = &["B65", "B66", "B67", "B68", "B69", "B84"];
/// Tally of the transcribed representative lists by arity 0, 1, 2, 3, 4+.
const KNOWN_TALLY: [usize; 5] = [106, 78, 20, 2, 1];
/// Note instances whose two sides have different fingerprints.
const KNOWN_NOTE_FAILURES: &[&str] = &["line10", "line11", "line14{alpha=2}", "line21{alpha=3,beta=-1,gamma=5}"];
/// The small-height note that should be certified over a prime field.
const SMALL_HEIGHT_NOTE: &str = "line11";

struct Verdict {
    pass: bool,
    /// Failures are exactly the documented ones, or a subset of them.
    known: bool,
    summary: String,
}

impl Verdict {
    fn pass(summary: String) -> Self {
        Verdict { pass: true, known: true, summary }
    }

    fn fail(known: bool, summary: String) -> Self {
        Verdict { pass: false, known, summary }
    }
}

fn failing(reports: &[&Report]) -> Vec<String> {
    reports.iter().flat_map(|r| r.failures().map(|i| format!("{}:{}", r.suite, i.name))).collect()
}

fn base_name(item: &str) -> &str {
    item.split('{').next().unwrap_or(item)
}

fn criterion1(cat: &Catalog) -> Verdict {
    let mut bad = Vec::new();
    let mut checked = 0;
    for &(name, bicom, com) in H2_TABLE {
        let Ok(e) = cat.entry(name) else {
            bad.push(format!("{name} missing"));
            continue;
        };
        for v in e.sample_bindings() {
            let a = match instance::base_at::<Rational>(e, &v) {
                Ok(a) => a,
                Err(err) => {
                    bad.push(format!("{name}: {err}"));
                    continue;
                }
            };
            let coh = h2(&a);
            checked += 1;
            if coh.dim_h2() != bicom {
                bad.push(format!("{} H2 {} vs {bicom}", instance::label(name, &e.param_names(), &v), coh.dim_h2()));
            }
            if let Some(c) = com {
                if coh.dim_h2_com() != c {
                    bad.push(format!("{name} H2_com {} vs {c}", coh.dim_h2_com()));
                }
            }
        }
    }
    let listed: BTreeSet<&str> = H2_TABLE.iter().map(|r| r.0).collect();
    bad.extend(cat.entries.iter().filter(|e| !listed.contains(e.name.as_str())).map(|e| format!("{} not in table", e.name)));
    let tables = harness::verify_h2_tables(cat);
    bad.extend(failing(&[&tables]));
    let summary = format!("{checked} instances against the stated table, {} catalog checks", tables.items.len());
    if bad.is_empty() {
        Verdict::pass(summary)
    } else {
        Verdict::fail(false, format!("{summary}; {}", bad.join("; ")))
    }
}

fn criterion2(cat: &Catalog) -> Verdict {
    let r = harness::verify_actions(cat);
    let fails: Vec<&str> = r.failures().map(|i| i.name.as_str()).collect();
    let summary = format!("{} formula blocks, {} mismatched", r.items.len(), fails.len());
    if fails.is_empty() {
        return Verdict::pass(summary);
    }
    let known = fails.iter().all(|f| KNOWN_ACTION_FAILURES.contains(f));
    Verdict::fail(known, format!("{summary}: {}", fails.join(", ")))
}

fn criterion3(cat: &Catalog) -> Verdict {
    let r = harness::regenerate_extensions(cat, None);
    let control = harness::theta_zero_control(cat);
    let fails: Vec<&str> = r.failures().map(|i| i.name.as_str()).collect();
    let mut summary = format!("{} instances, {} failing", r.items.len(), fails.len());
    let control_ok = control.status == harness::Status::Pass;
    if !control_ok {
        summary.push_str("; theta = 0 control not flagged");
    }
    if fails.is_empty() && control_ok {
        return Verdict::pass(summary);
    }
    let known = control_ok && fails.iter().all(|f| KNOWN_EXTENSION_FAILURES.contains(&base_name(f)));
    let names: BTreeSet<&str> = fails.iter().map(|f| base_name(f)).collect();
    Verdict::fail(known, format!("{summary}: {}", names.into_iter().collect::<Vec<_>>().join(", ")))
}

fn criterion4(cat: &Catalog) -> Verdict {
    let t = harness::tally(cat);
    let r = harness::count_theorem_a(cat);
    let sections: Vec<&str> = r.failures().filter(|i| i.name.starts_with("section/")).map(|i| i.name.as_str()).collect();
    let summary = format!(
        "tally {}/{}/{}/{} (+{} with four parameters), stated {}/{}/{}/{}",
        t[0], t[1], t[2], t[3], t[4], THEOREM_A_TALLY[0], THEOREM_A_TALLY[1], THEOREM_A_TALLY[2], THEOREM_A_TALLY[3]
    );
    if t[..4] == THEOREM_A_TALLY && t[4] == 0 && sections.is_empty() {
        return Verdict::pass(summary);
    }
    let known = t == KNOWN_TALLY && sections.is_empty();
    let detail = if sections.is_empty() { "all stated section subtotals agree".to_string() } else { sections.join(", ") };
    Verdict::fail(known, format!("{summary}; {detail}"))
}

fn criterion5(cat: &Catalog) -> Verdict {
    let reports = [
        harness::prop_coboundaries_are_cocycles(cat, 100),
        harness::prop_noncocycle_breaks_identity(cat, 100),
        harness::prop_fingerprint_invariance(cat, 100),
        harness::prop_parse_serialize(cat),
        harness::prop_dim_b2_equals_dim_a2(cat),
    ];
    let broken = reports[1].items.first().and_then(|i| i.detail("broken")).unwrap_or("?").to_string();
    let refs: Vec<&Report> = reports.iter().collect();
    let fails = failing(&refs);
    let checks: usize = reports.iter().map(|r| r.items.len()).sum();
    let summary = format!("{checks} checks over five suites, noncocycle broken {broken}");
    if fails.is_empty() {
        Verdict::pass(summary)
    } else {
        Verdict::fail(false, format!("{summary}: {}", fails.join(", ")))
    }
}

fn criterion6(cat: &Catalog) -> Verdict {
    let r = harness::census_agreement(cat);
    let mut bad: Vec<String> = failing(&[&r]);
    for name in ["N01@F2", "B3s_01@F2", "B3s_01@F3", "N12@F2", "N12@F3"] {
        if r.item(name).is_none() {
            bad.push(format!("{name} not run"));
        }
    }
    let n01 = r.item("N01@F2").and_then(|i| i.detail("aut")).unwrap_or("?");
    if n01 != "192" {
        bad.push(format!("|Aut(N01)| over F2 is {n01}"));
    }
    let pairs: Vec<String> = r.items.iter().map(|i| format!("{}={}", i.name, i.detail("aut").unwrap_or("?"))).collect();
    let summary = format!("|Aut| {}", pairs.join(" "));
    if bad.is_empty() {
        Verdict::pass(summary)
    } else {
        Verdict::fail(false, format!("{summary}; {}", bad.join("; ")))
    }
}

fn criterion7(cat: &Catalog) -> Verdict {
    let r = harness::verify_iso_notes(cat, harness::NOTE_BUDGET);
    let fails: Vec<&str> = r.failures().map(|i| i.name.as_str()).collect();
    let note = |k: &str| r.summary.iter().find(|(n, _)| n == k).map_or("0", |(_, v)| v.as_str()).to_string();
    let small = r
        .items
        .iter()
        .filter(|i| base_name(&i.name) == SMALL_HEIGHT_NOTE)
        .all(|i| i.detail("status") == Some("certified"));
    let summary = format!(
        "{} certified, {} fingerprint-consistent, {} failed; small-height note {}",
        note("certified"),
        note("fingerprint-consistent"),
        note("failed"),
        if small { "certified" } else { "not certified" }
    );
    if fails.is_empty() {
        return Verdict::pass(summary);
    }
    let known = fails.iter().all(|f| KNOWN_NOTE_FAILURES.contains(f));
    Verdict::fail(known, format!("{summary}: {}", fails.join(", ")))
}

fn main() {
    let cat = match Catalog::load_default() {
        Ok(c) => c,
        Err(e) => {
            println!("catalog failed to load: {e}");
            std::process::exit(2);
        }
    };
    type Check = fn(&Catalog) -> Verdict;
    let criteria: [(&str, Option<u64>, Check); 7] = [
        ("H2 dimension regression", Some(5), criterion1),
        ("action-formula verification", Some(30), criterion2),
        ("extension regeneration", Some(120), criterion3),
        ("representative counts", None, criterion4),
        ("property suites", Some(60), criterion5),
        ("finite-field oracle agreement", Some(30), criterion6),
        ("isomorphism notes", None, criterion7),
    ];
    let mut unexpected = 0;
    for (k, (title, limit, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let v = check(&cat);
        let took = t.elapsed();
        let slow = limit.is_some_and(|s| took > Duration::from_secs(s));
        let pass = v.pass && !slow;
        let bound = limit.map_or(String::new(), |s| format!(" of {s}s"));
        let tag = match (pass, v.known && !slow) {
            (true, _) => "PASS",
            (false, true) => "FAIL (documented)",
            (false, false) => "FAIL",
        };
        let over = if slow { "; runtime bound exceeded" } else { "" };
        println!("criterion {}: {tag}: {title}: {}{over} [{:.1}s{bound}]", k + 1, v.summary, took.as_secs_f64());
        if !pass && !(v.known && !slow) {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        println!("{unexpected} criteria failed outside the documented findings");
        std::process::exit(1);
    }
}
