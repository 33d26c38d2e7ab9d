use std::collections::BTreeMap;

use crate::arith::Rational;

use super::dsl::parse_algebra;
use super::expr::{parse_expr, Expr};
use super::{CatalogEntry, CatalogError};

/// Parametric matrix family as transcribed: entries are polynomial expressions.
#[derive(Debug, Clone)]
pub struct MatrixFamilySpec {
    pub name: String,
    pub entries: Vec<Vec<Expr>>,
}

/// Expected action coefficients `a<k>* = poly` for one family.
#[derive(Debug, Clone)]
pub struct FormulaSet {
    pub family: String,
    /// `(k, expr)` with `k` the one-based index into the `N` dictionary.
    pub formulas: Vec<(usize, Expr)>,
}

/// `lhs != rhs` where both sides are tuples of equal length; holds when
/// some component differs.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub lhs: Vec<Expr>,
    pub rhs: Vec<Expr>,
    pub text: String,
}

impl Constraint {
    pub fn holds(&self, values: &BTreeMap<String, Rational>) -> Result<bool, super::EvalError> {
        for (l, r) in self.lhs.iter().zip(&self.rhs) {
            if l.eval_scalar(values)? != r.eval_scalar(values)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// One orbit representative line of `reps.txt`.
///
/// ```text
/// B60 {alpha, beta} : N3 + beta N4 where beta != 0
/// B88 {alpha = -1/2, beta} : beta N3 + N5 + N6
/// B11 {lambda} : (-1 + sqrt(1 - 4 lambda))/2 N1 + N6 samples lambda = -2 ; lambda = -6
/// B85 {} : N2 + (1/2 + I) N5 modp 13, 17
/// ref B78 {alpha = 0} : N1 ; N3
/// ```
///
/// Every base parameter appears in the braces, free or bound. A `ref` line
/// restates an earlier representative at the bound values (its braces bind
/// the target's parameters) and is checked but not counted.
#[derive(Debug, Clone)]
pub struct RepresentativeSpec {
    pub name: String,
    pub reference: bool,
    pub binds: Vec<(String, Option<Expr>)>,
    pub cocycles: Vec<Expr>,
    pub spec_text: String,
    pub constraints: Vec<Constraint>,
    pub samples: Option<Vec<BTreeMap<String, Rational>>>,
    /// Non-empty for entries checked only over these prime fields.
    pub modp: Vec<u64>,
    pub note: Option<String>,
    pub line: usize,
}

impl RepresentativeSpec {
    pub fn free_params(&self) -> Vec<String> {
        self.binds.iter().filter(|(_, v)| v.is_none()).map(|(k, _)| k.clone()).collect()
    }

    pub fn arity(&self) -> usize {
        self.free_params().len()
    }

    pub fn s(&self) -> usize {
        self.cocycles.len()
    }

    /// Fixed parameter values evaluated (they may not depend on free ones).
    pub fn bound_values(&self) -> Result<BTreeMap<String, Rational>, super::EvalError> {
        let empty = BTreeMap::new();
        self.binds
            .iter()
            .filter_map(|(k, v)| v.as_ref().map(|e| Ok((k.clone(), e.eval_scalar::<Rational>(&empty)?))))
            .collect()
    }

    pub fn constraints_hold(&self, values: &BTreeMap<String, Rational>) -> bool {
        self.constraints.iter().all(|c| c.holds(values).unwrap_or(false))
    }
}

/// One side of an isomorphism note: a representative with positional
/// arguments, fewer than its arity meaning the rest are unspecified.
#[derive(Debug, Clone)]
pub struct NoteSide {
    pub name: String,
    pub args: Vec<Expr>,
}

/// `B60 {1, 0} ~ B93` style coincidence note.
#[derive(Debug, Clone)]
pub struct IsoNote {
    pub left: NoteSide,
    pub right: NoteSide,
    pub where_: Vec<Constraint>,
    pub text: String,
    pub line: usize,
}

/// Keys of `expect.txt`.
#[derive(Debug, Clone, Default)]
pub struct Expectations {
    pub title: Option<String>,
    pub h2_bicom: Option<usize>,
    pub h2_com: Option<usize>,
    pub nilindex: Option<usize>,
    pub h2_gens: Vec<String>,
    pub h2_com_gens: Vec<String>,
    /// Number of cocycles per representative.
    pub s: usize,
    pub samples: Option<Vec<BTreeMap<String, Rational>>>,
    /// Primes at which the automorphism count is compared with the family census.
    pub census_primes: Vec<u64>,
    pub aut_counts: BTreeMap<u64, u64>,
    /// Count of new algebras stated in the prose, when it is stated.
    pub stated_new: Option<usize>,
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

/// Splits at `sep` outside parentheses.
pub(crate) fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

struct Ctx<'a> {
    entry: &'a str,
    file: &'a str,
}

impl Ctx<'_> {
    fn err(&self, line: usize, msg: impl Into<String>) -> CatalogError {
        CatalogError::Format { entry: self.entry.into(), file: self.file.into(), line, msg: msg.into() }
    }

    fn expr(&self, line: usize, s: &str) -> Result<Expr, CatalogError> {
        parse_expr(s.trim()).map_err(|e| self.err(line, e.to_string()))
    }

    fn rational(&self, line: usize, s: &str) -> Result<Rational, CatalogError> {
        let e = self.expr(line, s)?;
        e.eval_scalar::<Rational>(&BTreeMap::new()).map_err(|e| self.err(line, e.to_string()))
    }

    fn bindings(&self, line: usize, s: &str) -> Result<Vec<BTreeMap<String, Rational>>, CatalogError> {
        split_top(s, ';')
            .into_iter()
            .map(|b| {
                split_top(b, ',')
                    .into_iter()
                    .map(|kv| {
                        let (k, v) = kv.split_once('=').ok_or_else(|| self.err(line, format!("expected name = value in {kv:?}")))?;
                        Ok((k.trim().to_string(), self.rational(line, v)?))
                    })
                    .collect()
            })
            .collect()
    }

    fn constraints(&self, line: usize, s: &str) -> Result<Vec<Constraint>, CatalogError> {
        split_top(s, ',')
            .into_iter()
            .map(|c| {
                let (l, r) = c.split_once("!=").ok_or_else(|| self.err(line, format!("expected '!=' in {c:?}")))?;
                let side = |t: &str| -> Result<Vec<Expr>, CatalogError> {
                    let t = t.trim();
                    if let Some(inner) = t.strip_prefix('(').and_then(|x| x.strip_suffix(')')) {
                        let parts = split_top(inner, ',');
                        if parts.len() > 1 {
                            return parts.into_iter().map(|p| self.expr(line, p)).collect();
                        }
                    }
                    Ok(vec![self.expr(line, t)?])
                };
                let (lhs, rhs) = (side(l)?, side(r)?);
                if lhs.len() != rhs.len() {
                    return Err(self.err(line, format!("tuple lengths differ in {c:?}")));
                }
                Ok(Constraint { lhs, rhs, text: c.trim().to_string() })
            })
            .collect()
    }
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_') && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_nablas(ctx: &Ctx<'_>, text: &str) -> Result<Vec<(String, Expr)>, CatalogError> {
    let mut out: Vec<(String, Expr)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ctx.err(ln + 1, "expected N<k> = <forms>"))?;
        let k = k.trim();
        let idx: usize = k
            .strip_prefix('N')
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| ctx.err(ln + 1, format!("invalid name {k:?}")))?;
        if idx != out.len() + 1 {
            return Err(ctx.err(ln + 1, format!("expected N{}, found {k}", out.len() + 1)));
        }
        out.push((k.to_string(), ctx.expr(ln + 1, v)?));
    }
    Ok(out)
}

fn blocks<'a>(ctx: &Ctx<'_>, text: &'a str) -> Result<Vec<(String, Vec<(usize, &'a str)>)>, CatalogError> {
    let mut out: Vec<(String, Vec<(usize, &'a str)>)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        if let Some(h) = line.strip_prefix('[').and_then(|x| x.strip_suffix(']')) {
            let h = h.trim();
            if !is_ident(h) {
                return Err(ctx.err(ln + 1, format!("invalid block name {h:?}")));
            }
            out.push((h.to_string(), Vec::new()));
            continue;
        }
        if out.is_empty() {
            out.push(("phi".to_string(), Vec::new()));
        }
        out.last_mut().unwrap().1.push((ln + 1, line));
    }
    Ok(out)
}

fn parse_families(ctx: &Ctx<'_>, text: &str, n: usize) -> Result<Vec<MatrixFamilySpec>, CatalogError> {
    let mut out = Vec::new();
    for (name, lines) in blocks(ctx, text)? {
        if lines.len() != n {
            let at = lines.first().map_or(1, |l| l.0);
            return Err(ctx.err(at, format!("family {name} has {} rows, expected {n}", lines.len())));
        }
        let mut rows = Vec::new();
        for (ln, l) in lines {
            let cells = split_top(l, ',');
            if cells.len() != n {
                return Err(ctx.err(ln, format!("row has {} entries, expected {n}", cells.len())));
            }
            rows.push(cells.into_iter().map(|c| ctx.expr(ln, c)).collect::<Result<Vec<_>, _>>()?);
        }
        out.push(MatrixFamilySpec { name, entries: rows });
    }
    Ok(out)
}

fn parse_formulas(ctx: &Ctx<'_>, text: &str) -> Result<Vec<FormulaSet>, CatalogError> {
    let mut out = Vec::new();
    for (family, lines) in blocks(ctx, text)? {
        let mut formulas = Vec::new();
        for (ln, l) in lines {
            let (k, v) = l.split_once('=').ok_or_else(|| ctx.err(ln, "expected a<k>* = <polynomial>"))?;
            let idx: usize = k
                .trim()
                .strip_prefix('a')
                .and_then(|x| x.strip_suffix('*'))
                .and_then(|x| x.trim().parse().ok())
                .ok_or_else(|| ctx.err(ln, format!("invalid coefficient name {:?}", k.trim())))?;
            formulas.push((idx, ctx.expr(ln, v)?));
        }
        out.push(FormulaSet { family, formulas });
    }
    Ok(out)
}

const CLAUSES: [&str; 4] = ["where", "samples", "modp", "note"];

/// Splits `text` at whole-word clause keywords; `note` swallows the rest.
fn split_clauses(text: &str) -> (String, Vec<(&'static str, String)>) {
    let words: Vec<(usize, &str)> = text
        .split_whitespace()
        .map(|w| (w.as_ptr() as usize - text.as_ptr() as usize, w))
        .collect();
    let mut cuts: Vec<(usize, &'static str)> = Vec::new();
    for (off, w) in &words {
        if let Some(k) = CLAUSES.iter().find(|k| *k == w) {
            cuts.push((*off, k));
            if *k == "note" {
                break;
            }
        }
    }
    let head_end = cuts.first().map_or(text.len(), |c| c.0);
    let mut clauses = Vec::new();
    for (i, (off, k)) in cuts.iter().enumerate() {
        let end = cuts.get(i + 1).map_or(text.len(), |c| c.0);
        clauses.push((*k, text[off + k.len()..end].trim().to_string()));
    }
    (text[..head_end].trim().to_string(), clauses)
}

fn parse_reps(ctx: &Ctx<'_>, text: &str, base_params: &[String], s: usize) -> Result<Vec<RepresentativeSpec>, CatalogError> {
    let mut out = Vec::new();
    for (ln0, raw) in text.lines().enumerate() {
        let ln = ln0 + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let (reference, line) = match line.strip_prefix("ref ") {
            Some(rest) => (true, rest.trim()),
            None => (false, line),
        };
        let open = line.find('{').ok_or_else(|| ctx.err(ln, "expected '{' after the name"))?;
        let close = line.find('}').ok_or_else(|| ctx.err(ln, "expected '}'"))?;
        let name = line[..open].trim().to_string();
        if !name.starts_with('B') || name[1..].parse::<u32>().is_err() {
            return Err(ctx.err(ln, format!("invalid representative name {name:?}")));
        }
        let mut binds = Vec::new();
        for b in split_top(&line[open + 1..close], ',') {
            let b = b.trim();
            if b.is_empty() {
                continue;
            }
            match b.split_once('=') {
                Some((k, v)) => binds.push((k.trim().to_string(), Some(ctx.expr(ln, v)?))),
                None => binds.push((b.to_string(), None)),
            }
        }
        for (k, _) in &binds {
            if !is_ident(k) {
                return Err(ctx.err(ln, format!("invalid parameter {k:?}")));
            }
        }
        if !reference {
            for p in base_params {
                if !binds.iter().any(|(k, _)| k == p) {
                    return Err(ctx.err(ln, format!("base parameter {p} must be listed")));
                }
            }
        }
        let rest = line[close + 1..].trim();
        let rest = rest.strip_prefix(':').ok_or_else(|| ctx.err(ln, "expected ':' after the parameters"))?;
        let (spec, clauses) = split_clauses(rest);
        let cocycles = split_top(&spec, ';').into_iter().map(|c| ctx.expr(ln, c)).collect::<Result<Vec<_>, _>>()?;
        if cocycles.len() != s {
            return Err(ctx.err(ln, format!("{} cocycles, expected {s}", cocycles.len())));
        }
        let mut rep = RepresentativeSpec {
            name,
            reference,
            binds,
            cocycles,
            spec_text: spec.clone(),
            constraints: Vec::new(),
            samples: None,
            modp: Vec::new(),
            note: None,
            line: ln,
        };
        for (k, v) in clauses {
            match k {
                "where" => rep.constraints.extend(ctx.constraints(ln, &v)?),
                "samples" => rep.samples = Some(ctx.bindings(ln, &v)?),
                "modp" => {
                    for p in v.split(',') {
                        rep.modp.push(p.trim().parse().map_err(|_| ctx.err(ln, format!("invalid prime {p:?}")))?);
                    }
                }
                _ => rep.note = Some(v),
            }
        }
        out.push(rep);
    }
    Ok(out)
}

fn parse_expect(ctx: &Ctx<'_>, text: &str) -> Result<Expectations, CatalogError> {
    let mut e = Expectations { s: 1, ..Default::default() };
    for (ln0, raw) in text.lines().enumerate() {
        let ln = ln0 + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ctx.err(ln, "expected key = value"))?;
        let (k, v) = (k.trim(), v.trim());
        let num = |v: &str| -> Result<usize, CatalogError> { v.parse().map_err(|_| ctx.err(ln, format!("invalid number {v:?}"))) };
        let list = |v: &str| -> Vec<String> { split_top(v, ';').into_iter().map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect() };
        match k {
            "title" => e.title = Some(v.to_string()),
            "h2_bicom" => e.h2_bicom = Some(num(v)?),
            "h2_com" => e.h2_com = Some(num(v)?),
            "nilindex" => e.nilindex = Some(num(v)?),
            "h2_gens" => e.h2_gens = list(v),
            "h2_com_gens" => e.h2_com_gens = list(v),
            "s" => e.s = num(v)?,
            "new_algebras" => e.stated_new = Some(num(v)?),
            "samples" => e.samples = Some(ctx.bindings(ln, v)?),
            "census_primes" => {
                for p in v.split(',') {
                    e.census_primes.push(num(p.trim())? as u64);
                }
            }
            _ if k.starts_with("aut_count_p") => {
                let p = num(&k["aut_count_p".len()..])? as u64;
                e.aut_counts.insert(p, num(v)? as u64);
            }
            _ => return Err(ctx.err(ln, format!("unknown key {k:?}"))),
        }
    }
    if e.s == 0 || e.s > 2 {
        return Err(ctx.err(1, "s must be 1 or 2"));
    }
    Ok(e)
}

pub(super) fn load_entry(name: &str, files: &BTreeMap<String, String>) -> Result<CatalogEntry, CatalogError> {
    let get = |f: &str| files.get(f).map(String::as_str).unwrap_or("");
    let source_text = files
        .get("base.alg")
        .ok_or_else(|| CatalogError::Invalid { entry: name.into(), msg: "missing base.alg".into() })?
        .clone();
    let base = parse_algebra(&source_text).map_err(|source| CatalogError::Parse {
        entry: name.into(),
        file: "base.alg".into(),
        source,
    })?;
    if base.name() != Some(name) {
        return Err(CatalogError::Invalid {
            entry: name.into(),
            msg: format!("header names {:?}", base.name().unwrap_or("")),
        });
    }
    let c = |file| Ctx { entry: name, file };
    let nablas = parse_nablas(&c("nablas.txt"), get("nablas.txt"))?;
    let families = parse_families(&c("aut.mat"), get("aut.mat"), base.dim())?;
    let formulas = parse_formulas(&c("formulas.txt"), get("formulas.txt"))?;
    let expect = parse_expect(&c("expect.txt"), get("expect.txt"))?;
    let params: Vec<String> = base.params().iter().map(|p| p.name.clone()).collect();
    let reps = parse_reps(&c("reps.txt"), get("reps.txt"), &params, expect.s)?;
    for fs in &formulas {
        if !families.iter().any(|f| f.name == fs.family) {
            return Err(CatalogError::Invalid { entry: name.into(), msg: format!("formulas for unknown family {}", fs.family) });
        }
        for (k, _) in &fs.formulas {
            if *k == 0 || *k > nablas.len() {
                return Err(CatalogError::Invalid { entry: name.into(), msg: format!("formula a{k}* has no N{k}") });
            }
        }
    }
    for r in &reps {
        for c in &r.cocycles {
            for id in c.idents() {
                if id.starts_with('N') && id[1..].parse::<usize>().is_ok() && !nablas.iter().any(|(k, _)| *k == id) {
                    return Err(CatalogError::Invalid { entry: name.into(), msg: format!("{}: undeclared symbol {id}", r.name) });
                }
            }
        }
    }
    Ok(CatalogEntry { name: name.into(), source_text, base, nablas, families, formulas, reps, expect })
}

pub(super) fn parse_notes(text: &str) -> Result<Vec<IsoNote>, CatalogError> {
    let ctx = Ctx { entry: "catalog", file: "notes.txt" };
    let side = |ln: usize, s: &str| -> Result<NoteSide, CatalogError> {
        let s = s.trim();
        let (name, args) = match s.find('{') {
            Some(i) => {
                let inner = s[i + 1..].strip_suffix('}').ok_or_else(|| ctx.err(ln, "expected '}'"))?;
                let args = split_top(inner, ',')
                    .into_iter()
                    .filter(|a| !a.trim().is_empty())
                    .map(|a| ctx.expr(ln, a))
                    .collect::<Result<Vec<_>, _>>()?;
                (s[..i].trim(), args)
            }
            None => (s, Vec::new()),
        };
        Ok(NoteSide { name: name.to_string(), args })
    };
    let mut out = Vec::new();
    for (ln0, raw) in text.lines().enumerate() {
        let ln = ln0 + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let (head, clauses) = split_clauses(line);
        let (l, r) = head.split_once('~').ok_or_else(|| ctx.err(ln, "expected '<rep> ~ <rep>'"))?;
        let mut where_ = Vec::new();
        for (k, v) in clauses {
            match k {
                "where" => where_.extend(ctx.constraints(ln, &v)?),
                "note" => {}
                _ => return Err(ctx.err(ln, format!("clause {k} not allowed in notes"))),
            }
        }
        out.push(IsoNote { left: side(ln, l)?, right: side(ln, r)?, where_, text: line.to_string(), line: ln });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Ctx<'static> {
        Ctx { entry: "T", file: "reps.txt" }
    }

    #[test]
    fn representative_lines() {
        let text = "B60 {alpha, beta} : N3 + beta N4 where beta != 0\n\
                    B88 {alpha = -1/2, beta} : beta N3 + N5\n\
                    B11 {alpha, lambda} : (-1 + sqrt(1 - 4 lambda))/2 N1 samples alpha = 2, lambda = -2 ; alpha = 3, lambda = -6\n\
                    B85 {alpha = 1} : (1/2 + I) N5 modp 13, 17 note orbit symmetric\n\
                    ref B78 {x = 0} : N1\n";
        let reps = parse_reps(&ctx(), text, &["alpha".to_string()], 1).unwrap();
        assert_eq!(reps.len(), 5);
        assert_eq!(reps[0].free_params(), vec!["alpha", "beta"]);
        assert_eq!(reps[0].constraints.len(), 1);
        assert_eq!(reps[1].arity(), 1);
        assert_eq!(reps[1].bound_values().unwrap()["alpha"], Rational::new(-1, 2).unwrap());
        assert_eq!(reps[2].samples.as_ref().unwrap().len(), 2);
        assert_eq!(reps[3].modp, vec![13, 17]);
        assert_eq!(reps[3].note.as_deref(), Some("orbit symmetric"));
        assert!(reps[4].reference);
        assert!(parse_reps(&ctx(), "B1 {} : N1\n", &["alpha".to_string()], 1).is_err());
        assert!(parse_reps(&ctx(), "B1 {alpha} : N1 ; N2\n", &["alpha".to_string()], 1).is_err());
    }

    #[test]
    fn tuple_constraints() {
        let cs = ctx().constraints(1, "(b, g) != (0, 0), a != 1").unwrap();
        assert_eq!(cs.len(), 2);
        let mut v = BTreeMap::new();
        v.insert("a".to_string(), Rational::from_int(2));
        v.insert("b".to_string(), Rational::zero());
        v.insert("g".to_string(), Rational::zero());
        assert!(!cs[0].holds(&v).unwrap());
        assert!(cs[1].holds(&v).unwrap());
        v.insert("g".to_string(), Rational::one());
        assert!(cs[0].holds(&v).unwrap());
    }

    #[test]
    fn notes_and_blocks() {
        let notes = parse_notes("B60 {1, 0} ~ B93\nB16 {a, b} ~ B16 {b, a} where a != b\n").unwrap();
        assert_eq!(notes.len(), 2);
        assert_eq!(notes[0].left.args.len(), 2);
        assert!(notes[0].right.args.is_empty());
        assert_eq!(notes[1].where_.len(), 1);
        let fs = parse_formulas(&ctx(), "[phi1]\na1* = x^3 a1\n[phi2]\na1* = -x a1\n").unwrap();
        assert_eq!(fs.len(), 2);
        assert_eq!(fs[1].family, "phi2");
        let fam = parse_families(&ctx(), "x, 0\ny, x^2\n", 2).unwrap();
        assert_eq!(fam[0].name, "phi");
        assert!(parse_families(&ctx(), "x, 0\n", 2).is_err());
    }
}
