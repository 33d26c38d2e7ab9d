use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use bicomm::algebra::{fingerprint, Algebra, IdentitySpec};
use bicomm::arith::{Fp, MultiPoly, Rational};
use bicomm::catalog::{parse_algebra, parse_cocycle, serialize_rational, Catalog};
use bicomm::cohomology::{h2, ExtensionSpec};
use bicomm::harness::{self, Report};
use bicomm::symmetry::{aut_enumerate_fp, iso_search_fp, IsoSearch, WORK_GUARD};
use bicomm::with_prime;

#[derive(Parser)]
#[command(name = "bicomm", version, about = "Cohomology, central extensions and isomorphism tools for bicommutative algebras")]
struct Cli {
    /// Emit only key=value lines.
    #[arg(long, global = true)]
    porcelain: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Identity {
    Right,
    Left,
    Both,
    Commutative,
    Twostep,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Tables,
    Actions,
    Extensions,
    Counts,
    Isonotes,
    Distinguish,
    Properties,
    Census,
    All,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check identities of an algebra file.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        identity: Identity,
    },
    /// Second cohomology: dimensions and class representatives.
    H2 {
        file: PathBuf,
        /// Report only the commutative part.
        #[arg(long)]
        commutative: bool,
        /// Parameter values, e.g. `alpha=2,beta=-1/2`.
        #[arg(long)]
        bind: Option<String>,
    },
    /// Central extension by one or more cocycles.
    Extend {
        file: PathBuf,
        /// Form such as `D(1,2) + 2 D(3,3)`; repeat for several cocycles.
        #[arg(long = "cocycle", required = true)]
        cocycles: Vec<String>,
        #[arg(long)]
        bind: Option<String>,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Isomorphism invariants of an algebra.
    Fingerprint {
        file: PathBuf,
        #[arg(long)]
        bind: Option<String>,
    },
    /// Compare the invariants of two algebras.
    Distinguish { a: PathBuf, b: PathBuf },
    /// Count automorphisms over a prime field.
    AutCount {
        file: PathBuf,
        #[arg(long)]
        prime: u64,
    },
    /// Search for an isomorphism over prime fields.
    Isosearch {
        a: PathBuf,
        b: PathBuf,
        #[arg(long = "prime", required = true)]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 2_000_000)]
        budget: u64,
    },
    /// Build a catalog representative at given parameter values.
    Rep {
        name: String,
        #[arg(long)]
        bind: Option<String>,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Run verification suites over the catalog.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Catalog directory instead of the built-in catalog.
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Directory for regenerated algebra files.
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Run isomorphism searches inside fingerprint collision classes.
        #[arg(long)]
        search: bool,
        /// Search nodes per isomorphism attempt in the notes suite.
        #[arg(long, default_value_t = harness::NOTE_BUDGET)]
        budget: u64,
    },
}

/// Failure that maps to exit status 2.
#[derive(Debug)]
struct ConfigError(anyhow::Error);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| anyhow!(ConfigError(e)))
}

struct Out {
    porcelain: bool,
}

impl Out {
    fn kv(&self, k: &str, v: impl std::fmt::Display) {
        println!("{k}={v}");
    }

    fn text(&self, s: impl std::fmt::Display) {
        if !self.porcelain {
            println!("{s}");
        }
    }

    fn report(&self, r: &Report) {
        if self.porcelain {
            print!("{}", r.porcelain());
        } else {
            print!("{}", r.human());
        }
    }
}

fn load(path: &Path) -> Result<Algebra<MultiPoly>> {
    config((|| {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        parse_algebra(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
    })())
}

fn parse_bind(spec: Option<&str>) -> Result<BTreeMap<String, Rational>> {
    let mut out = BTreeMap::new();
    for part in spec.unwrap_or("").split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| anyhow!("binding {part:?} lacks '='"))?;
        let v: Rational = v.trim().parse().map_err(|_| anyhow!("bad value in {part:?}"))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

fn rational(a: &Algebra<MultiPoly>, bind: Option<&str>) -> Result<Algebra<Rational>> {
    config((|| Ok(a.instantiate(&parse_bind(bind)?)?))())
}

fn load_catalog(dir: Option<&Path>) -> Result<Catalog> {
    config(match dir {
        Some(d) => Catalog::from_dir(d).map_err(anyhow::Error::from),
        None => Catalog::load_default().map_err(anyhow::Error::from),
    })
}

fn run(cli: Cli) -> Result<i32> {
    let out = Out { porcelain: cli.porcelain };
    match cli.cmd {
        Cmd::Check { file, identity } => {
            let a = load(&file)?;
            let specs: Vec<IdentitySpec> = match identity {
                Identity::Right => vec![IdentitySpec::RightCommutative],
                Identity::Left => vec![IdentitySpec::LeftCommutative],
                Identity::Both => vec![IdentitySpec::RightCommutative, IdentitySpec::LeftCommutative],
                Identity::Commutative => vec![IdentitySpec::Commutative],
                Identity::Twostep => vec![IdentitySpec::TwoStep],
            };
            let mut ok = true;
            for s in specs {
                match a.check_identity(s) {
                    Ok(()) => out.kv(s.name(), "holds"),
                    Err(v) => {
                        ok = false;
                        out.kv(s.name(), "fails");
                        let idx: Vec<String> = v[0].basis.iter().map(|i| format!("e{}", i + 1)).collect();
                        out.kv(&format!("{}.witness", s.name()), idx.join(","));
                    }
                }
            }
            Ok(if ok { 0 } else { 1 })
        }
        Cmd::H2 { file, commutative, bind } => {
            let a = rational(&load(&file)?, bind.as_deref())?;
            let c = h2(&a);
            out.kv("dim_z2", c.z2.dim());
            out.kv("dim_b2", c.b2.dim());
            if !commutative {
                out.kv("dim_h2", c.dim_h2());
            }
            out.kv("dim_h2_com", c.dim_h2_com());
            let reps = if commutative { &c.h2_com_reps } else { &c.h2_reps };
            for (k, f) in reps.iter().enumerate() {
                let mut terms = Vec::new();
                for i in 0..f.rows() {
                    for j in 0..f.cols() {
                        let x = f.get(i, j);
                        if !x.is_zero() {
                            terms.push(if x.is_one() { format!("D({},{})", i + 1, j + 1) } else { format!("{x} D({},{})", i + 1, j + 1) });
                        }
                    }
                }
                out.kv(&format!("class{}", k + 1), terms.join(" + "));
            }
            Ok(0)
        }
        Cmd::Extend { file, cocycles, bind, out: path } => {
            let poly = load(&file)?;
            let a = rational(&poly, bind.as_deref())?;
            let n = a.dim();
            let none = |_: &str| None::<Rational>;
            let mut forms = Vec::new();
            for c in &cocycles {
                forms.extend(config(parse_cocycle::<Rational>(c, n, &[], &none).map_err(anyhow::Error::from))?);
            }
            let spec = ExtensionSpec::new(a, forms)?;
            if let Err(e) = spec.validate() {
                out.kv("cocycle", "fails");
                out.text(e);
                return Ok(1);
            }
            let ext = spec.central_extension()?;
            let split = spec.nonsplit_check()?.is_err();
            let name = poly.name().map_or("ext".to_string(), |s| format!("{s}_ext"));
            std::fs::write(&path, serialize_rational(&ext, &name)).with_context(|| format!("writing {}", path.display()))?;
            out.kv("dim", ext.dim());
            out.kv("bicommutative", ext.is_bicommutative());
            out.kv("split", split);
            out.kv("fingerprint", fingerprint(&ext));
            Ok(0)
        }
        Cmd::Fingerprint { file, bind } => {
            let a = rational(&load(&file)?, bind.as_deref())?;
            let fp = fingerprint(&a);
            out.kv("fingerprint", fp);
            out.kv("nilindex", fp.nilindex);
            out.kv("dim_ann", fp.dim_ann);
            out.kv("dim_h2", fp.dim_h2);
            Ok(0)
        }
        Cmd::Distinguish { a, b } => {
            let (x, y) = (rational(&load(&a)?, None)?, rational(&load(&b)?, None)?);
            let (fx, fy) = (fingerprint(&x), fingerprint(&y));
            out.kv("a", fx);
            out.kv("b", fy);
            out.kv("distinct", fx != fy);
            Ok(0)
        }
        Cmd::AutCount { file, prime } => {
            let a = rational(&load(&file)?, None)?;
            let count = config(with_prime!(prime, P => {
                let x = a.reduce_mod::<Fp<P>>()?;
                Ok::<_, anyhow::Error>(aut_enumerate_fp(&x, WORK_GUARD)?.count)
            }).map_err(anyhow::Error::from))??;
            out.kv("prime", prime);
            out.kv("aut", count);
            Ok(0)
        }
        Cmd::Isosearch { a, b, primes, budget } => {
            let (x, y) = (rational(&load(&a)?, None)?, rational(&load(&b)?, None)?);
            let mut found = false;
            for p in primes {
                let res = config(with_prime!(p, P => {
                    let u = x.reduce_mod::<Fp<P>>()?;
                    let v = y.reduce_mod::<Fp<P>>()?;
                    Ok::<_, anyhow::Error>(match iso_search_fp(&u, &v, budget)? {
                        IsoSearch::Found(m) => format!("found {:?}", m.row_vecs().iter().map(|r| r.iter().map(|e| e.value()).collect::<Vec<_>>()).collect::<Vec<_>>()),
                        IsoSearch::NotFound { exhausted: true, nodes } => format!("budget exhausted after {nodes} nodes"),
                        IsoSearch::NotFound { .. } => "none".to_string(),
                    })
                }).map_err(anyhow::Error::from))??;
                found |= res.starts_with("found");
                out.kv(&format!("F{p}"), res);
            }
            Ok(if found { 0 } else { 1 })
        }
        Cmd::Rep { name, bind, out: path, catalog } => {
            let cat = load_catalog(catalog.as_deref())?;
            let (entry, rep) = config(cat.representative(&name).ok_or_else(|| anyhow!("unknown representative {name}")))?;
            let mut values = config(rep.bound_values().map_err(anyhow::Error::from))?;
            values.extend(config(parse_bind(bind.as_deref()))?);
            let missing: Vec<String> = rep.free_params().into_iter().filter(|p| !values.contains_key(p)).collect();
            if !missing.is_empty() {
                return config(Err(anyhow!("missing values for {}", missing.join(", "))));
            }
            let (check, ext) = harness::extension_at::<Rational>(entry, &rep.cocycles, &values)?;
            out.kv("source", &entry.name);
            out.kv("fingerprint", check.fingerprint);
            for f in &check.failures {
                out.kv("failure", f);
            }
            out.text(&ext);
            if let Some(p) = path {
                std::fs::write(&p, serialize_rational(&ext, &name)).with_context(|| format!("writing {}", p.display()))?;
            }
            Ok(if check.failures.is_empty() { 0 } else { 1 })
        }
        Cmd::Verify { suite, catalog, emit, search, budget } => {
            let cat = load_catalog(catalog.as_deref())?;
            let want = |s: Suite| suite == s || suite == Suite::All;
            let mut reports = Vec::new();
            if want(Suite::Tables) {
                reports.push(harness::verify_h2_tables(&cat));
            }
            if want(Suite::Actions) {
                reports.push(harness::verify_actions(&cat));
            }
            if want(Suite::Extensions) {
                reports.push(harness::regenerate_extensions(&cat, emit.as_deref()));
            }
            if want(Suite::Counts) {
                reports.push(harness::count_theorem_a(&cat));
            }
            if want(Suite::Distinguish) {
                reports.push(harness::distinguish_all(&cat, search));
            }
            if want(Suite::Isonotes) {
                reports.push(harness::verify_iso_notes(&cat, budget));
            }
            if want(Suite::Properties) {
                reports.push(harness::prop_coboundaries_are_cocycles(&cat, 100));
                reports.push(harness::prop_noncocycle_breaks_identity(&cat, 100));
                reports.push(harness::prop_fingerprint_invariance(&cat, 100));
                reports.push(harness::prop_parse_serialize(&cat));
                reports.push(harness::prop_dim_b2_equals_dim_a2(&cat));
            }
            if want(Suite::Census) {
                reports.push(harness::census_agreement(&cat));
            }
            for r in &reports {
                out.report(r);
            }
            Ok(harness::combined_exit_code(&reports))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

