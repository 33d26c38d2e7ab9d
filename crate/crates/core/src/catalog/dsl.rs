//! The `.alg` text format.
//!
//! ```text
//! # comment
//! algebra N08 dim 4
//! param alpha != 1
//! e1*e1 = e3
//! e1*e2 = e4
//! e2*e1 = alpha e4
//! e2*e2 = e3 - 1/2 e4
//! ```
//!
//! Unlisted products are zero. Coefficients are a rational, a parameter, or a
//! rational followed by a parameter; signs separate terms.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::algebra::{Algebra, ParamDecl};
use crate::arith::{var_list, MultiPoly, Rational, Ring};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    ParseError { line, col, msg: msg.into() }
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn basis_index(s: &str) -> Option<usize> {
    let rest = s.strip_prefix('e')?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

/// Byte-offset word scanner over one line.
struct Words<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Words<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text.as_bytes()[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn col(&self) -> usize {
        self.text[..self.pos].chars().count() + 1
    }

    fn next_word(&mut self) -> Option<(usize, &'a str)> {
        self.skip_ws();
        if self.pos >= self.text.len() {
            return None;
        }
        let col = self.col();
        let start = self.pos;
        while self.pos < self.text.len() && !self.text.as_bytes()[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        Some((col, &self.text[start..self.pos]))
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit() || b == b'/' || b == b'-') {
        return None;
    }
    s.parse().ok()
}

/// A parsed algebra whose coefficients are polynomials in its declared parameters.
pub fn parse_algebra(text: &str) -> Result<Algebra<MultiPoly>, ParseError> {
    let mut header: Option<(String, usize)> = None;
    let mut params: Vec<ParamDecl> = Vec::new();
    let mut products: Vec<(usize, usize, usize, Vec<(usize, Rational, Option<String>)>)> = Vec::new();
    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();

    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let mut w = Words { text: line, pos: 0 };
        let (col0, first) = w.next_word().expect("nonblank line");
        if first == "algebra" {
            if header.is_some() {
                return Err(perr(line_no, col0, "second algebra header"));
            }
            let (c, name) = w.next_word().ok_or_else(|| perr(line_no, w.col(), "expected algebra name"))?;
            if !is_ident(name) {
                return Err(perr(line_no, c, format!("invalid algebra name {name:?}")));
            }
            match w.next_word() {
                Some((_, "dim")) => {}
                Some((c, other)) => return Err(perr(line_no, c, format!("expected 'dim', found {other:?}"))),
                None => return Err(perr(line_no, w.col(), "expected 'dim'")),
            }
            let (c, d) = w.next_word().ok_or_else(|| perr(line_no, w.col(), "expected dimension"))?;
            let dim: usize = d.parse().map_err(|_| perr(line_no, c, format!("invalid dimension {d:?}")))?;
            if dim == 0 {
                return Err(perr(line_no, c, "dimension must be positive"));
            }
            if let Some((c, extra)) = w.next_word() {
                return Err(perr(line_no, c, format!("unexpected {extra:?}")));
            }
            header = Some((name.to_string(), dim));
            continue;
        }
        let Some((_, dim)) = header.as_ref().map(|(n, d)| (n.clone(), *d)) else {
            return Err(perr(line_no, col0, "expected 'algebra <name> dim <n>' header first"));
        };
        if first == "param" {
            if !products.is_empty() {
                return Err(perr(line_no, col0, "param declarations must precede products"));
            }
            let (c, name) = w.next_word().ok_or_else(|| perr(line_no, w.col(), "expected parameter name"))?;
            if !is_ident(name) || basis_index(name).is_some() {
                return Err(perr(line_no, c, format!("invalid parameter name {name:?}")));
            }
            if params.iter().any(|p| p.name == name) {
                return Err(perr(line_no, c, format!("duplicate parameter {name}")));
            }
            let mut excluded = Vec::new();
            while let Some((c, tok)) = w.next_word() {
                if tok != "!=" {
                    return Err(perr(line_no, c, format!("expected '!=', found {tok:?}")));
                }
                let (c, v) = w.next_word().ok_or_else(|| perr(line_no, w.col(), "expected a rational after '!='"))?;
                for part in v.split(',').filter(|s| !s.is_empty()) {
                    let r = parse_rational(part).ok_or_else(|| perr(line_no, c, format!("invalid rational {part:?}")))?;
                    excluded.push(r);
                }
            }
            params.push(ParamDecl { name: name.to_string(), excluded });
            continue;
        }
        // product line: e<i>*e<j> = terms
        let (i, j) = {
            let (a, b) = first
                .split_once('*')
                .ok_or_else(|| perr(line_no, col0, format!("expected 'e<i>*e<j>', found {first:?}")))?;
            let i = basis_index(a).ok_or_else(|| perr(line_no, col0, format!("invalid basis element {a:?}")))?;
            let jcol = col0 + a.chars().count() + 1;
            let j = basis_index(b).ok_or_else(|| perr(line_no, jcol, format!("invalid basis element {b:?}")))?;
            for (idx, c) in [(i, col0), (j, jcol)] {
                if idx == 0 || idx > dim {
                    return Err(perr(line_no, c, format!("basis index {idx} outside 1..{dim}")));
                }
            }
            (i, j)
        };
        if !seen.insert((i, j)) {
            return Err(perr(line_no, col0, format!("duplicate product e{i}*e{j}")));
        }
        match w.next_word() {
            Some((_, "=")) => {}
            Some((c, t)) => return Err(perr(line_no, c, format!("expected '=', found {t:?}"))),
            None => return Err(perr(line_no, w.col(), "expected '='")),
        }
        let terms = parse_terms(&mut w, line_no, dim, &params)?;
        products.push((i - 1, j - 1, line_no, terms));
    }

    let (name, dim) = header.ok_or_else(|| perr(text.lines().count().max(1), 1, "missing 'algebra' header"))?;
    let names: Vec<&str> = params.iter().map(|p| p.name.as_str()).collect();
    let vars = var_list(&names);
    let mut a = Algebra::<MultiPoly>::zero(dim);
    for (i, j, _, terms) in products {
        for (k, c, p) in terms {
            let mut coeff = MultiPoly::constant_in(&vars, c);
            if let Some(p) = p {
                coeff = coeff.mul(&MultiPoly::var(&vars, &p).expect("declared parameter"));
            }
            let cur = a.get(i, j, k - 1).clone();
            a.set(i, j, k - 1, cur.plus(&coeff));
        }
    }
    // keep every coefficient on the declared variable list
    let a = a.map(|c| c.lift_to(&vars).expect("declared parameters"));
    Ok(a.with_name(name).with_params(params))
}

fn parse_terms(
    w: &mut Words<'_>,
    line_no: usize,
    dim: usize,
    params: &[ParamDecl],
) -> Result<Vec<(usize, Rational, Option<String>)>, ParseError> {
    let mut out = Vec::new();
    let mut sign = Rational::one();
    let mut expect_sign = false;
    let mut coeff: Option<Rational> = None;
    let mut param: Option<String> = None;
    let mut pending = false;
    loop {
        w.skip_ws();
        if w.pos >= w.text.len() {
            break;
        }
        let col = w.col();
        let rest = &w.text[w.pos..];
        let c0 = rest.as_bytes()[0];
        if c0 == b'+' || c0 == b'-' {
            if pending || (!expect_sign && !out.is_empty()) {
                return Err(perr(line_no, col, "unexpected sign"));
            }
            if !expect_sign && c0 == b'+' {
                return Err(perr(line_no, col, "unexpected '+'"));
            }
            sign = if c0 == b'-' { -Rational::one() } else { Rational::one() };
            expect_sign = false;
            w.pos += 1;
            continue;
        }
        if expect_sign {
            return Err(perr(line_no, col, "expected '+' or '-' between terms"));
        }
        if c0.is_ascii_digit() {
            if coeff.is_some() || param.is_some() {
                return Err(perr(line_no, col, "unexpected number"));
            }
            let len = rest.bytes().take_while(|b| b.is_ascii_digit() || *b == b'/').count();
            let tok = &rest[..len];
            let r = parse_rational(tok).ok_or_else(|| perr(line_no, col, format!("invalid rational {tok:?}")))?;
            if r.is_zero() {
                return Err(perr(line_no, col, "zero coefficient"));
            }
            coeff = Some(r);
            pending = true;
            w.pos += len;
            continue;
        }
        if c0.is_ascii_alphabetic() || c0 == b'_' {
            let len = rest.bytes().take_while(|b| b.is_ascii_alphanumeric() || *b == b'_').count();
            let tok = &rest[..len];
            w.pos += len;
            if let Some(k) = basis_index(tok) {
                if k == 0 || k > dim {
                    return Err(perr(line_no, col, format!("basis index {k} outside 1..{dim}")));
                }
                let c = coeff.take().unwrap_or_else(Rational::one);
                out.push((k, &sign * &c, param.take()));
                sign = Rational::one();
                pending = false;
                expect_sign = true;
                continue;
            }
            if param.is_some() {
                return Err(perr(line_no, col, "at most one parameter per term"));
            }
            if !params.iter().any(|p| p.name == tok) {
                return Err(perr(line_no, col, format!("undeclared parameter {tok:?}")));
            }
            param = Some(tok.to_string());
            pending = true;
            continue;
        }
        return Err(perr(line_no, col, format!("unexpected character {:?}", rest.chars().next().unwrap())));
    }
    if pending || (!out.is_empty() && !expect_sign) {
        return Err(perr(line_no, w.col(), "term without basis element"));
    }
    if out.is_empty() {
        return Err(perr(line_no, w.col(), "empty product; omit zero products"));
    }
    Ok(out)
}

/// Canonical text: header, parameters, then nonzero products in lex order.
///
/// Fails when a coefficient is not a sum of rational multiples of `1` and of
/// single parameters.
pub fn serialize_algebra(a: &Algebra<MultiPoly>, name: &str) -> Result<String, String> {
    let mut s = String::new();
    writeln!(s, "algebra {name} dim {}", a.dim()).unwrap();
    for p in a.params() {
        write!(s, "param {}", p.name).unwrap();
        for e in &p.excluded {
            write!(s, " != {e}").unwrap();
        }
        s.push('\n');
    }
    let n = a.dim();
    for i in 0..n {
        for j in 0..n {
            let mut terms: Vec<(Rational, Option<String>, usize)> = Vec::new();
            for k in 0..n {
                let c = a.get(i, j, k);
                let mut parts: Vec<(Vec<u32>, Rational)> = c.terms().iter().map(|(e, r)| (e.clone(), r.clone())).collect();
                // constants first, then parameters in declaration order
                parts.sort_by(|x, y| x.0.iter().sum::<u32>().cmp(&y.0.iter().sum::<u32>()).then(y.0.cmp(&x.0)));
                for (e, r) in parts {
                    let deg: u32 = e.iter().sum();
                    let p = match deg {
                        0 => None,
                        1 => Some(c.vars()[e.iter().position(|&x| x == 1).unwrap()].clone()),
                        _ => return Err(format!("coefficient {c} of e{}*e{} is not linear", i + 1, j + 1)),
                    };
                    terms.push((r, p, k + 1));
                }
            }
            if terms.is_empty() {
                continue;
            }
            write!(s, "e{}*e{} =", i + 1, j + 1).unwrap();
            for (t, (r, p, k)) in terms.iter().enumerate() {
                let neg = r.is_negative();
                let mag = r.abs();
                match (t, neg) {
                    (0, false) => s.push(' '),
                    (0, true) => s.push_str(" -"),
                    (_, false) => s.push_str(" + "),
                    (_, true) => s.push_str(" - "),
                }
                if !mag.is_one() {
                    write!(s, "{mag} ").unwrap();
                }
                if let Some(p) = p {
                    write!(s, "{p} ").unwrap();
                }
                write!(s, "e{k}").unwrap();
            }
            s.push('\n');
        }
    }
    Ok(s)
}

/// Canonical text of a rational algebra.
pub fn serialize_rational(a: &Algebra<Rational>, name: &str) -> String {
    serialize_algebra(&a.to_poly(), name).expect("constant coefficients are linear")
}

#[cfg(test)]
mod tests {
    use super::*;

    const N08: &str = "# two-step\nalgebra N08 dim 4\nparam alpha != 1\ne1*e1 = e3\ne1*e2 = e4\ne2*e1 = alpha e4\ne2*e2 = e3 - 1/2 e4  # tail\n";

    #[test]
    fn parses_parameters_and_comments() {
        let a = parse_algebra(N08).unwrap();
        assert_eq!(a.dim(), 4);
        assert_eq!(a.name(), Some("N08"));
        assert_eq!(a.params()[0].excluded, vec![Rational::one()]);
        assert_eq!(a.get(1, 0, 3).to_string(), "alpha");
        assert_eq!(a.get(1, 1, 3).to_string(), "-1/2");
    }

    #[test]
    fn round_trip_is_canonical() {
        let a = parse_algebra(N08).unwrap();
        let s = serialize_algebra(&a, "N08").unwrap();
        assert_eq!(
            s,
            "algebra N08 dim 4\nparam alpha != 1\ne1*e1 = e3\ne1*e2 = e4\ne2*e1 = alpha e4\ne2*e2 = e3 - 1/2 e4\n"
        );
        let b = parse_algebra(&s).unwrap();
        assert_eq!(serialize_algebra(&b, "N08").unwrap(), s);
    }

    #[test]
    fn coefficient_forms() {
        let t = "algebra X dim 3\nparam a\ne1*e1 = -2 a e2 + 3e3 - a e3\ne2*e2 = -e3\n";
        let a = parse_algebra(t).unwrap();
        assert_eq!(a.get(0, 0, 1).to_string(), "-2*a");
        assert_eq!(a.get(0, 0, 2).to_string(), "-a + 3");
        assert_eq!(a.get(1, 1, 2).to_string(), "-1");
    }

    #[test]
    fn errors_report_position() {
        let e = parse_algebra("algebra X dim 2\ne1*e3 = e1\n").unwrap_err();
        assert_eq!((e.line, e.col), (2, 4));
        let e = parse_algebra("algebra X dim 2\ne1*e1 = e2\ne1*e1 = e1\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.msg.contains("duplicate"));
        let e = parse_algebra("algebra X dim 2\ne1*e1 = e2 e1\n").unwrap_err();
        assert_eq!((e.line, e.col), (2, 12));
        let e = parse_algebra("algebra X dim 2\ne1*e1 = beta e2\n").unwrap_err();
        assert!(e.msg.contains("undeclared"));
        assert!(parse_algebra("e1*e1 = e2\n").is_err());
        assert!(parse_algebra("algebra X dim 2\ne1*e1 = 2\n").is_err());
        assert!(parse_algebra("algebra X dim 2\ne1*e1 =\n").is_err());
        assert!(parse_algebra("algebra X dim 2\ne1*e1 = e2 +\n").is_err());
        assert!(parse_algebra("").is_err());
    }
}
