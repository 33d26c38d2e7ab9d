use std::collections::BTreeMap;

use crate::catalog::Catalog;

use super::{Item, Report, Status};

/// Counted representatives by number of free parameters; the last slot
/// collects four or more.
pub type ArityTally = [usize; 5];

/// Stated numbers of 0-, 1-, 2- and 3-parameter classes.
pub const THEOREM_A_TALLY: [usize; 4] = [107, 77, 20, 3];

fn bucket(arity: usize) -> usize {
    arity.min(4)
}

fn fmt_tally(t: &ArityTally) -> String {
    t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("/")
}

/// Tallies counted representatives by arity and compares with the stated
/// totals, with per-section subtotals and stated-versus-listed counts.
pub fn count_theorem_a(cat: &Catalog) -> Report {
    let mut r = Report::new("counts");
    let mut total: ArityTally = [0; 5];
    let mut sections: BTreeMap<&str, (ArityTally, Vec<String>)> = BTreeMap::new();
    for (e, rep) in cat.all_reps().filter(|(_, rep)| !rep.reference) {
        let b = bucket(rep.arity());
        total[b] += 1;
        let s = sections.entry(&e.name).or_default();
        s.0[b] += 1;
        if b == 4 {
            s.1.push(rep.name.clone());
        }
    }
    for (k, &want) in THEOREM_A_TALLY.iter().enumerate() {
        let got = total[k];
        let status = if got == want { Status::Pass } else { Status::Fail(format!("listed {got}, stated {want}")) };
        r.push(Item::new(format!("arity{k}"), status).with("listed", got).with("stated", want));
    }
    if total[4] > 0 {
        let names: Vec<String> = sections.values().flat_map(|(_, n)| n.clone()).collect();
        r.push(
            Item::new("arity4+", Status::Fail(format!("{} families with four or more parameters", total[4])))
                .with("listed", total[4])
                .with("stated", 0)
                .with("names", names.join(",")),
        );
    }
    for e in &cat.entries {
        let Some((t, _)) = sections.get(e.name.as_str()) else { continue };
        let listed: usize = t.iter().sum();
        let mut it = match e.expect.stated_new {
            Some(s) if s != listed => Item::new(format!("section/{}", e.name), Status::Fail(format!("listed {listed}, stated {s}"))),
            Some(_) => Item::new(format!("section/{}", e.name), Status::Pass),
            None => Item::new(format!("section/{}", e.name), Status::Skip("no stated count".into())),
        };
        it = it.with("tally", fmt_tally(t)).with("listed", listed);
        if let Some(s) = e.expect.stated_new {
            it = it.with("stated", s);
        }
        r.push(it);
    }
    r.note("tally", fmt_tally(&total));
    r.note("stated", THEOREM_A_TALLY.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("/"));
    r.note("representatives", total.iter().sum::<usize>());
    r.finish()
}

/// Arity tally of the counted representatives.
pub fn tally(cat: &Catalog) -> ArityTally {
    let mut t = [0; 5];
    for (_, rep) in cat.all_reps().filter(|(_, rep)| !rep.reference) {
        t[bucket(rep.arity())] += 1;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_covers_every_counted_representative() {
        let cat = Catalog::embedded().unwrap();
        let t = tally(&cat);
        assert_eq!(t.iter().sum::<usize>(), 207);
        let r = count_theorem_a(&cat);
        assert!(r.item("arity0").is_some());
        assert!(r.items.iter().any(|i| i.name == "section/N01"));
    }
}
