//! Scalar and cocycle expressions used by catalog files.
//!
//! Grammar (juxtaposition binds like `*`):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/' | <juxtaposition>) unary)*
//! unary := ('-' | '+') unary | power
//! power := atom ('^' ['-'] integer)?
//! atom  := integer | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! `D(i,j)` is the form `Delta_ij`, `N<k>` names a dictionary form, `I` is a
//! square root of -1 and `sqrt(x)` an exact square root.

use std::collections::BTreeMap;
use std::fmt;

use crate::arith::{Field, MultiPoly, Rational, Ring, VarList};
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{msg} at column {col} in {src:?}")]
pub struct ExprError {
    pub msg: String,
    pub col: usize,
    pub src: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("division by a non-constant polynomial")]
    PolynomialDivision,
    #[error("no square root of {0} in this field")]
    NoSquareRoot(String),
    #[error("{0}")]
    Type(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Rational),
    Var(String),
    Call(String, Vec<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

/// Names parsed as calls when followed by `(`; other names juxtapose.
const FUNCTIONS: [&str; 2] = ["sqrt", "D"];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Sym(char),
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let s = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Num(chars[s..i].iter().collect()), s + 1));
        } else if c.is_alphabetic() || c == '_' {
            let s = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[s..i].iter().collect()), s + 1));
        } else if "+-*/^(),".contains(c) {
            out.push((Tok::Sym(c), i + 1));
            i += 1;
        } else {
            return Err(ExprError { msg: format!("unexpected character {c:?}"), col: i + 1, src: src.into() });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> ExprError {
        let col = self.toks.get(self.pos).map_or(self.src.chars().count() + 1, |t| t.1);
        ExprError { msg: msg.into(), col, src: self.src.into() }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else if matches!(self.peek(), Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Sym('('))) {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            let paren = !neg && self.eat('(');
            let neg = neg || (paren && self.eat('-'));
            let e = match self.peek().cloned() {
                Some(Tok::Num(s)) => {
                    self.pos += 1;
                    s.parse::<i32>().map_err(|_| self.err("exponent too large"))?
                }
                _ => return Err(self.err("expected integer exponent")),
            };
            if paren && !self.eat(')') {
                return Err(self.err("expected ')'"));
            }
            return Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                self.pos += 1;
                let r: Rational = s.parse().map_err(|_| self.err("bad number"))?;
                Ok(Expr::Num(r))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if FUNCTIONS.contains(&name.as_str()) && self.eat('(') {
                    let mut args = vec![self.expr()?];
                    while self.eat(',') {
                        args.push(self.expr()?);
                    }
                    if !self.eat(')') {
                        return Err(self.err("expected ')'"));
                    }
                    Ok(Expr::Call(name, args))
                } else {
                    Ok(Expr::Var(name))
                }
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            _ => Err(self.err("expected a number, name or '('")),
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Expr, ExprError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0, src };
    if p.toks.is_empty() {
        return Err(p.err("empty expression"));
    }
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

/// Scalars that expressions can be evaluated into.
pub trait Scalar: Ring {
    fn checked_div(&self, rhs: &Self) -> Result<Self, EvalError>;
    fn checked_sqrt(&self) -> Result<Self, EvalError>;
}

impl<F: Field> Scalar for F {
    fn checked_div(&self, rhs: &Self) -> Result<Self, EvalError> {
        self.divide(rhs).ok_or(EvalError::DivisionByZero)
    }
    fn checked_sqrt(&self) -> Result<Self, EvalError> {
        self.square_root().ok_or_else(|| EvalError::NoSquareRoot(self.to_string()))
    }
}

impl Scalar for MultiPoly {
    fn checked_div(&self, rhs: &Self) -> Result<Self, EvalError> {
        let c = rhs.as_constant().ok_or(EvalError::PolynomialDivision)?;
        let inv = c.recip().map_err(|_| EvalError::DivisionByZero)?;
        Ok(self.scale(&inv))
    }
    fn checked_sqrt(&self) -> Result<Self, EvalError> {
        let c = self.as_constant().ok_or_else(|| EvalError::NoSquareRoot(self.to_string()))?;
        c.sqrt().map(MultiPoly::constant).ok_or_else(|| EvalError::NoSquareRoot(c.to_string()))
    }
}

/// Result of evaluating a possibly form-valued expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Value<S> {
    Scalar(S),
    Form(Matrix<S>),
}

/// Symbol resolution for evaluation.
pub struct Env<'a, S> {
    pub scalars: &'a dyn Fn(&str) -> Option<S>,
    /// Forms named by identifiers (the `N<k>` dictionary); `None` disables forms.
    pub forms: Option<(usize, &'a dyn Fn(&str) -> Option<Matrix<S>>)>,
}

fn scale_form<S: Scalar>(m: &Matrix<S>, k: &S) -> Matrix<S> {
    m.map(|x| x.times(k))
}

impl Expr {
    pub fn eval<S: Scalar>(&self, env: &Env<'_, S>) -> Result<Value<S>, EvalError> {
        use Value::*;
        Ok(match self {
            Expr::Num(r) => Scalar(S::from_rational(r).map_err(|e| EvalError::Type(e.to_string()))?),
            Expr::Var(name) => {
                if let Some(v) = (env.scalars)(name) {
                    Scalar(v)
                } else if let Some(f) = env.forms.and_then(|(_, look)| look(name)) {
                    Form(f)
                } else if name == "I" {
                    Scalar(S::one().negate().checked_sqrt()?)
                } else {
                    return Err(EvalError::UnknownSymbol(name.clone()));
                }
            }
            Expr::Call(f, args) => match (f.as_str(), args.as_slice()) {
                ("sqrt", [x]) => match x.eval(env)? {
                    Scalar(v) => Scalar(v.checked_sqrt()?),
                    Form(_) => return Err(EvalError::Type("sqrt of a form".into())),
                },
                ("D", [i, j]) => {
                    let Some((n, _)) = env.forms else {
                        return Err(EvalError::Type("forms are not allowed here".into()));
                    };
                    let idx = |e: &Expr| -> Result<usize, EvalError> {
                        match e {
                            Expr::Num(r) if r.is_integer() && !r.is_negative() => {
                                let (v, _) = r.to_i64_pair().unwrap();
                                if v >= 1 && (v as usize) <= n {
                                    Ok(v as usize - 1)
                                } else {
                                    Err(EvalError::Type(format!("index {v} out of range 1..{n}")))
                                }
                            }
                            _ => Err(EvalError::Type("D(i,j) needs integer indices".into())),
                        }
                    };
                    let mut m = Matrix::zeros(n, n);
                    m.set(idx(i)?, idx(j)?, S::one());
                    Form(m)
                }
                _ => return Err(EvalError::UnknownSymbol(format!("{f}/{}", args.len()))),
            },
            Expr::Neg(a) => match a.eval(env)? {
                Scalar(v) => Scalar(v.negate()),
                Form(m) => Form(m.map(|x| x.negate())),
            },
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let sub = matches!(self, Expr::Sub(..));
                match (a.eval(env)?, b.eval(env)?) {
                    (Scalar(x), Scalar(y)) => Scalar(if sub { x.minus(&y) } else { x.plus(&y) }),
                    (Form(x), Form(y)) => Form(if sub { x.sub(&y) } else { x.add(&y) }.map_err(|e| EvalError::Type(e.to_string()))?),
                    _ => return Err(EvalError::Type("sum of a scalar and a form".into())),
                }
            }
            Expr::Mul(a, b) => match (a.eval(env)?, b.eval(env)?) {
                (Scalar(x), Scalar(y)) => Scalar(x.times(&y)),
                (Scalar(k), Form(m)) | (Form(m), Scalar(k)) => Form(scale_form(&m, &k)),
                (Form(_), Form(_)) => return Err(EvalError::Type("product of two forms".into())),
            },
            Expr::Div(a, b) => match (a.eval(env)?, b.eval(env)?) {
                (Scalar(x), Scalar(y)) => Scalar(x.checked_div(&y)?),
                (Form(m), Scalar(k)) => {
                    let inv = S::one().checked_div(&k)?;
                    Form(scale_form(&m, &inv))
                }
                _ => return Err(EvalError::Type("division by a form".into())),
            },
            Expr::Pow(a, e) => match a.eval(env)? {
                Scalar(x) => {
                    let base = if *e < 0 { S::one().checked_div(&x)? } else { x };
                    let mut acc = S::one();
                    for _ in 0..e.unsigned_abs() {
                        acc = acc.times(&base);
                    }
                    Scalar(acc)
                }
                Form(_) => return Err(EvalError::Type("power of a form".into())),
            },
        })
    }

    /// Evaluates to a scalar using a name-to-value map.
    pub fn eval_scalar<S: Scalar>(&self, values: &BTreeMap<String, S>) -> Result<S, EvalError> {
        let look = |n: &str| values.get(n).cloned();
        match self.eval(&Env { scalars: &look, forms: None })? {
            Value::Scalar(s) => Ok(s),
            Value::Form(_) => Err(EvalError::Type("expected a scalar".into())),
        }
    }

    /// Polynomial over `vars`; every identifier must be one of them.
    pub fn to_poly(&self, vars: &VarList) -> Result<MultiPoly, EvalError> {
        let look = |n: &str| MultiPoly::var(vars, n).ok();
        match self.eval(&Env { scalars: &look, forms: None })? {
            Value::Scalar(p) => Ok(p.lift_to(vars).map_err(|e| EvalError::Type(e.to_string()))?),
            Value::Form(_) => Err(EvalError::Type("expected a polynomial".into())),
        }
    }

    /// Identifiers occurring outside call heads.
    pub fn idents(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_idents(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_idents(&self, out: &mut Vec<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => out.push(v.clone()),
            Expr::Call(_, args) => args.iter().for_each(|a| a.collect_idents(out)),
            Expr::Neg(a) | Expr::Pow(a, _) => a.collect_idents(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_idents(out);
                b.collect_idents(out);
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(r) => write!(f, "{r}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Call(h, args) => {
                let a: Vec<String> = args.iter().map(|x| x.to_string()).collect();
                write!(f, "{h}({})", a.join(","))
            }
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Div(a, b) => write!(f, "({a})/({b})"),
            Expr::Pow(a, e) => write!(f, "({a})^{e}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{var_list, Fp};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn eval_q(src: &str, binds: &[(&str, Rational)]) -> Result<Rational, EvalError> {
        let m: BTreeMap<String, Rational> = binds.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        parse_expr(src).unwrap().eval_scalar(&m)
    }

    #[test]
    fn precedence_and_juxtaposition() {
        assert_eq!(eval_q("1 + 2*3", &[]).unwrap(), q(7, 1));
        assert_eq!(eval_q("-2^2", &[]).unwrap(), q(-4, 1));
        assert_eq!(eval_q("1/2 x", &[("x", q(4, 1))]).unwrap(), q(2, 1));
        assert_eq!(eval_q("2x^2 y", &[("x", q(3, 1)), ("y", q(-1, 1))]).unwrap(), q(-18, 1));
        assert_eq!(eval_q("(1-4 l)/2", &[("l", q(-2, 1))]).unwrap(), q(9, 2));
        assert_eq!(eval_q("a^(-1)", &[("a", q(2, 1))]).unwrap(), q(1, 2));
        assert_eq!(eval_q("2 a^2/(a-1)^2", &[("a", q(3, 1))]).unwrap(), q(9, 2));
        assert_eq!(eval_q("y (x + 1)", &[("x", q(2, 1)), ("y", q(5, 1))]).unwrap(), q(15, 1));
    }

    #[test]
    fn sqrt_and_imaginary_unit() {
        assert_eq!(eval_q("(-1 + sqrt(1 - 4 l))/2", &[("l", q(-2, 1))]).unwrap(), q(1, 1));
        assert!(matches!(eval_q("sqrt(2)", &[]), Err(EvalError::NoSquareRoot(_))));
        assert!(eval_q("I", &[]).is_err());
        let e = parse_expr("1/2 + I").unwrap();
        let v: Fp<13> = e.eval_scalar(&BTreeMap::new()).unwrap();
        let i = v.sub(Fp::<13>::new(7)); // 1/2 = 7 mod 13
        assert_eq!(i.mul(i), Fp::new(-1));
    }

    #[test]
    fn errors_carry_columns() {
        let e = parse_expr("1 + * 2").unwrap_err();
        assert_eq!(e.col, 5);
        assert!(parse_expr("").is_err());
        assert!(parse_expr("(1").is_err());
        assert!(parse_expr("2 $").is_err());
        assert_eq!(eval_q("1/(x-1)", &[("x", q(1, 1))]), Err(EvalError::DivisionByZero));
    }

    #[test]
    fn polynomial_conversion() {
        let v = var_list(&["x", "a1"]);
        let p = parse_expr("x^3 a1 - 1/2 x").unwrap().to_poly(&v).unwrap();
        assert_eq!(p.to_string(), "x^3*a1 - (1/2)*x");
        assert_eq!(parse_expr("1/x").unwrap().to_poly(&v), Err(EvalError::PolynomialDivision));
        assert!(parse_expr("zz").unwrap().to_poly(&v).is_err());
    }

    #[test]
    fn form_values() {
        let n = 3;
        let dict = |name: &str| -> Option<Matrix<Rational>> {
            (name == "N1").then(|| {
                let mut m = Matrix::zeros(3, 3);
                m.set(0, 1, Rational::one());
                m.set(1, 0, Rational::one());
                m
            })
        };
        let scal = |_: &str| None;
        let env = Env { scalars: &scal, forms: Some((n, &dict)) };
        let v = parse_expr("2 N1 - D(1,2) + 1/2 D(3,3)").unwrap().eval(&env).unwrap();
        let Value::Form(m) = v else { panic!() };
        assert_eq!(m.get(0, 1), &q(1, 1));
        assert_eq!(m.get(1, 0), &q(2, 1));
        assert_eq!(m.get(2, 2), &q(1, 2));
        assert!(parse_expr("N1 N1").unwrap().eval(&env).is_err());
        assert!(parse_expr("D(4,1)").unwrap().eval(&env).is_err());
        assert!(matches!(parse_expr("N99").unwrap().eval(&env), Err(EvalError::UnknownSymbol(_))));
    }
}
