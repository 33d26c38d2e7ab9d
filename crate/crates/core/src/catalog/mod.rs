//! Catalog data: base algebras, cocycle dictionaries, automorphism families,
//! action formulas, orbit representatives and isomorphism notes.
//!
//! One directory per base algebra (or case of a parametric base) holding
//! `base.alg`, `nablas.txt`, `aut.mat`, `formulas.txt`, `reps.txt` and
//! `expect.txt`; `notes.txt` at the root lists isomorphism notes.

pub mod dsl;
pub mod expr;
mod files;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::algebra::{Algebra, AlgebraError, ParamDecl};
use crate::arith::{MultiPoly, Rational};
use crate::linalg::Matrix;

pub use dsl::{parse_algebra, serialize_algebra, serialize_rational, ParseError};
pub use expr::{parse_expr, Env, EvalError, Expr, ExprError, Scalar, Value};
pub use files::{Constraint, Expectations, FormulaSet, IsoNote, MatrixFamilySpec, NoteSide, RepresentativeSpec};

/// Values tried for free parameters, in cyclic order.
pub const SAMPLE_VALUES: [i64; 4] = [2, 3, -1, 5];

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("{entry}/{file}: {source}")]
    Parse { entry: String, file: String, source: ParseError },
    #[error("{entry}/{file}: line {line}: {msg}")]
    Format { entry: String, file: String, line: usize, msg: String },
    #[error("{entry}: {msg}")]
    Invalid { entry: String, msg: String },
    #[error("unknown catalog entry {0}")]
    UnknownEntry(String),
    #[error("io error on {path}: {msg}")]
    Io { path: PathBuf, msg: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Bilinear forms parsed from a cocycle spec; `;` separates the forms of a tuple.
pub fn parse_cocycle<S: Scalar>(
    text: &str,
    n: usize,
    nablas: &[(String, Expr)],
    scalars: &dyn Fn(&str) -> Option<S>,
) -> Result<Vec<Matrix<S>>, CatalogError> {
    let mut out = Vec::new();
    for part in text.split(';') {
        let e = parse_expr(part.trim()).map_err(|e| CatalogError::Invalid { entry: "cocycle".into(), msg: e.to_string() })?;
        out.push(eval_form(&e, n, nablas, scalars)?);
    }
    Ok(out)
}

/// Evaluates a form-valued expression against a `N<k>` dictionary.
pub fn eval_form<S: Scalar>(
    e: &Expr,
    n: usize,
    nablas: &[(String, Expr)],
    scalars: &dyn Fn(&str) -> Option<S>,
) -> Result<Matrix<S>, EvalError> {
    let none = |_: &str| None;
    let base_env: Env<'_, S> = Env { scalars, forms: Some((n, &none)) };
    let dict = |name: &str| -> Option<Matrix<S>> {
        let (_, ex) = nablas.iter().find(|(k, _)| k == name)?;
        match ex.eval(&base_env) {
            Ok(Value::Form(m)) => Some(m),
            _ => None,
        }
    };
    // surface evaluation errors of dictionary entries instead of "unknown symbol"
    for id in e.idents() {
        if let Some((_, ex)) = nablas.iter().find(|(k, _)| *k == id) {
            if let Value::Scalar(_) = ex.eval(&base_env)? {
                return Err(EvalError::Type(format!("{id} is not a form")));
            }
        }
    }
    let env = Env { scalars, forms: Some((n, &dict)) };
    match e.eval(&env)? {
        Value::Form(m) => Ok(m),
        Value::Scalar(s) if s.is_zero() => Ok(Matrix::zeros(n, n)),
        Value::Scalar(_) => Err(EvalError::Type("expected a bilinear form".into())),
    }
}

/// One catalog directory.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub source_text: String,
    pub base: Algebra<MultiPoly>,
    pub nablas: Vec<(String, Expr)>,
    pub families: Vec<MatrixFamilySpec>,
    pub formulas: Vec<FormulaSet>,
    pub reps: Vec<RepresentativeSpec>,
    pub expect: Expectations,
}

impl CatalogEntry {
    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn params(&self) -> &[ParamDecl] {
        self.base.params()
    }

    pub fn param_names(&self) -> Vec<String> {
        self.params().iter().map(|p| p.name.clone()).collect()
    }

    /// Rational algebra at `bindings`; refuses excluded parameter values.
    pub fn instantiate(&self, bindings: &BTreeMap<String, Rational>) -> Result<Algebra<Rational>, CatalogError> {
        Ok(self.base.instantiate(bindings)?)
    }

    /// Base parameter samples: the declared override, or cyclic shifts of
    /// [`SAMPLE_VALUES`] avoiding excluded values.
    pub fn sample_bindings(&self) -> Vec<BTreeMap<String, Rational>> {
        if let Some(s) = &self.expect.samples {
            return s.clone();
        }
        let names = self.param_names();
        cyclic_samples(&names, |b| {
            self.params().iter().all(|p| p.excluded.iter().all(|x| b.get(&p.name) != Some(x)))
        })
    }

    /// The `N<k>` forms evaluated with the given scalar bindings.
    pub fn nabla_forms<S: Scalar>(&self, scalars: &dyn Fn(&str) -> Option<S>) -> Result<Vec<Matrix<S>>, EvalError> {
        self.nablas
            .iter()
            .map(|(_, e)| eval_form(e, self.dim(), &[], scalars))
            .collect()
    }

    pub fn family(&self, name: &str) -> Option<&MatrixFamilySpec> {
        self.families.iter().find(|f| f.name == name)
    }
}

/// Cyclic shifts of [`SAMPLE_VALUES`] over `names` kept by `keep`; a single
/// empty binding when `names` is empty.
pub fn cyclic_samples(
    names: &[String],
    keep: impl Fn(&BTreeMap<String, Rational>) -> bool,
) -> Vec<BTreeMap<String, Rational>> {
    if names.is_empty() {
        return vec![BTreeMap::new()];
    }
    let l = SAMPLE_VALUES.len();
    (0..l)
        .map(|s| {
            names
                .iter()
                .enumerate()
                .map(|(j, n)| (n.clone(), Rational::from_int(SAMPLE_VALUES[(s + j) % l])))
                .collect::<BTreeMap<_, _>>()
        })
        .filter(|b| keep(b))
        .collect()
}

/// The loaded catalog.
#[derive(Debug, Clone)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
    pub notes: Vec<IsoNote>,
    pub origin: String,
}

/// Environment variable overriding the embedded catalog.
pub const CATALOG_ENV: &str = "BICOMM_CATALOG";

mod embedded {
    include!(concat!(env!("OUT_DIR"), "/embedded_catalog.rs"));
}

impl Catalog {
    /// The catalog compiled into the library.
    pub fn embedded() -> Result<Self, CatalogError> {
        let dirs = embedded::CATALOG
            .iter()
            .map(|(d, files)| (d.to_string(), files.iter().map(|(f, t)| (f.to_string(), t.to_string())).collect()))
            .collect();
        Self::from_files(dirs, embedded::NOTES, "embedded".into())
    }

    /// Reads a catalog directory laid out like the embedded one.
    pub fn from_dir(path: &Path) -> Result<Self, CatalogError> {
        let io = |p: &Path, e: std::io::Error| CatalogError::Io { path: p.to_path_buf(), msg: e.to_string() };
        let mut dirs: Vec<(String, BTreeMap<String, String>)> = Vec::new();
        let mut names: Vec<PathBuf> = std::fs::read_dir(path)
            .map_err(|e| io(path, e))?
            .filter_map(|d| d.ok().map(|d| d.path()))
            .filter(|p| p.is_dir())
            .collect();
        names.sort();
        for d in names {
            let mut files = BTreeMap::new();
            for f in std::fs::read_dir(&d).map_err(|e| io(&d, e))? {
                let f = f.map_err(|e| io(&d, e))?.path();
                if f.is_file() {
                    let text = std::fs::read_to_string(&f).map_err(|e| io(&f, e))?;
                    files.insert(f.file_name().unwrap().to_string_lossy().into_owned(), text);
                }
            }
            dirs.push((d.file_name().unwrap().to_string_lossy().into_owned(), files));
        }
        let notes_path = path.join("notes.txt");
        let notes = if notes_path.exists() {
            std::fs::read_to_string(&notes_path).map_err(|e| io(&notes_path, e))?
        } else {
            String::new()
        };
        Self::from_files(dirs, &notes, path.display().to_string())
    }

    /// `BICOMM_CATALOG` if set, otherwise the embedded catalog.
    pub fn load_default() -> Result<Self, CatalogError> {
        match std::env::var_os(CATALOG_ENV) {
            Some(p) if !p.is_empty() => Self::from_dir(Path::new(&p)),
            _ => Self::embedded(),
        }
    }

    fn from_files(
        dirs: Vec<(String, BTreeMap<String, String>)>,
        notes: &str,
        origin: String,
    ) -> Result<Self, CatalogError> {
        let mut entries = Vec::new();
        for (name, files) in dirs {
            entries.push(files::load_entry(&name, &files)?);
        }
        entries.sort_by(|a, b| a.name.cmp(&b.name));
        for w in entries.windows(2) {
            if w[0].name == w[1].name {
                return Err(CatalogError::Invalid { entry: w[0].name.clone(), msg: "duplicate entry".into() });
            }
        }
        let notes = files::parse_notes(notes)?;
        let cat = Catalog { entries, notes, origin };
        cat.check_references()?;
        Ok(cat)
    }

    pub fn entry(&self, name: &str) -> Result<&CatalogEntry, CatalogError> {
        self.entries.iter().find(|e| e.name == name).ok_or_else(|| CatalogError::UnknownEntry(name.into()))
    }

    /// The counted (non-reference) representative named `bname`, with its entry.
    pub fn representative(&self, bname: &str) -> Option<(&CatalogEntry, &RepresentativeSpec)> {
        self.entries
            .iter()
            .flat_map(|e| e.reps.iter().map(move |r| (e, r)))
            .find(|(_, r)| !r.reference && r.name == bname)
    }

    pub fn all_reps(&self) -> impl Iterator<Item = (&CatalogEntry, &RepresentativeSpec)> {
        self.entries.iter().flat_map(|e| e.reps.iter().map(move |r| (e, r)))
    }

    fn check_references(&self) -> Result<(), CatalogError> {
        let mut seen: BTreeMap<&str, &str> = BTreeMap::new();
        for (e, r) in self.all_reps() {
            if r.reference {
                let (_, target) = self.representative(&r.name).ok_or_else(|| CatalogError::Invalid {
                    entry: e.name.clone(),
                    msg: format!("reference to unknown representative {}", r.name),
                })?;
                let free = target.free_params();
                for (k, _) in &r.binds {
                    if !free.contains(k) {
                        return Err(CatalogError::Invalid {
                            entry: e.name.clone(),
                            msg: format!("reference {} binds {k}, not a parameter of the target", r.name),
                        });
                    }
                }
            } else if let Some(prev) = seen.insert(&r.name, &e.name) {
                return Err(CatalogError::Invalid {
                    entry: e.name.clone(),
                    msg: format!("{} already defined in {prev}", r.name),
                });
            }
        }
        for n in &self.notes {
            for side in [&n.left, &n.right] {
                let (_, r) = self.representative(&side.name).ok_or_else(|| CatalogError::Invalid {
                    entry: "notes.txt".into(),
                    msg: format!("line {}: unknown representative {}", n.line, side.name),
                })?;
                if side.args.len() > r.free_params().len() {
                    return Err(CatalogError::Invalid {
                        entry: "notes.txt".into(),
                        msg: format!("line {}: {} takes {} parameters", n.line, side.name, r.free_params().len()),
                    });
                }
            }
        }
        Ok(())
    }
}
