use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;

use crate::algebra::{Algebra, Side};
use crate::arith::{Field, FiniteField, Rational};
use crate::linalg::{Matrix, Subspace};

use super::{is_isomorphism, SymmetryError};

/// Default bound on estimated backtracking work.
pub const WORK_GUARD: f64 = 1e8;

/// Bound on the number of vectors scanned while building candidate lists.
const CANDIDATE_GUARD: f64 = 2e7;

/// Number of automorphisms kept as a sample.
const SAMPLE_SIZE: usize = 4;

#[derive(Debug, Clone)]
pub struct AutCount<F> {
    pub count: u64,
    /// The first few automorphisms in search order.
    pub sample: Vec<Matrix<F>>,
    pub estimate: f64,
}

#[derive(Debug, Clone)]
pub enum IsoSearch<F> {
    /// An isomorphism, re-checked independently.
    Found(Matrix<F>),
    /// No isomorphism met; `exhausted` means the node budget ran out first.
    NotFound { exhausted: bool, nodes: u64 },
}

/// Subspaces every isomorphism maps onto their counterparts: the powers
/// `A^k` (k >= 2) followed by the three annihilators.
fn characteristic<F: Field>(a: &Algebra<F>) -> Vec<Subspace<F>> {
    let mut v: Vec<Subspace<F>> = a.power_chain().into_iter().skip(1).collect();
    v.push(a.annihilator(Side::TwoSided));
    v.push(a.annihilator(Side::Left));
    v.push(a.annihilator(Side::Right));
    v
}

fn unit<F: Field>(n: usize, i: usize) -> Vec<F> {
    (0..n).map(|k| if k == i { F::one() } else { F::zero() }).collect()
}

/// Invariants of a vector preserved by isomorphisms: memberships of `v` and
/// `v^2` in the characteristic subspaces and the ranks of `L_v`, `R_v`.
fn signature<F: Field>(a: &Algebra<F>, chars: &[Subspace<F>], v: &[F]) -> Vec<usize> {
    let n = a.dim();
    let mut sig: Vec<usize> = chars.iter().map(|w| w.contains(v) as usize).collect();
    let mut l = Matrix::zeros(n, n);
    let mut r = Matrix::zeros(n, n);
    for j in 0..n {
        let e = unit::<F>(n, j);
        for (k, x) in a.multiply(v, &e).expect("dimension").into_iter().enumerate() {
            l.set(k, j, x);
        }
        for (k, x) in a.multiply(&e, v).expect("dimension").into_iter().enumerate() {
            r.set(k, j, x);
        }
    }
    sig.push(l.rank());
    sig.push(r.rank());
    let v2 = a.multiply(v, v).expect("dimension");
    sig.extend(chars.iter().map(|w| w.contains(&v2) as usize));
    sig.push(v2.iter().all(|x| x.is_zero()) as usize);
    sig
}

/// All vectors of a subspace over a finite field.
fn vectors<F: FiniteField>(s: &Subspace<F>) -> Vec<Vec<F>> {
    let elems = F::elements();
    let d = s.dim();
    let mut out = Vec::new();
    let mut counter = vec![0usize; d];
    loop {
        let mut v = vec![F::zero(); s.ambient()];
        for (c, b) in counter.iter().zip(s.basis()) {
            let k = elems[*c];
            if !k.is_zero() {
                for (x, y) in v.iter_mut().zip(b) {
                    *x = x.plus(&k.times(y));
                }
            }
        }
        out.push(v);
        let mut i = 0;
        loop {
            if i == d {
                return out;
            }
            counter[i] += 1;
            if counter[i] < elems.len() {
                break;
            }
            counter[i] = 0;
            i += 1;
        }
    }
}

/// Incremental echelon basis used to keep chosen columns independent.
#[derive(Clone)]
struct Echelon<F> {
    rows: Vec<(usize, Vec<F>)>,
}

impl<F: Field> Echelon<F> {
    fn new() -> Self {
        Echelon { rows: Vec::new() }
    }

    fn insert(&mut self, v: &[F]) -> bool {
        let mut w = v.to_vec();
        for (p, r) in &self.rows {
            if !w[*p].is_zero() {
                let f = w[*p].clone();
                for (x, y) in w.iter_mut().zip(r) {
                    *x = x.minus(&f.times(y));
                }
            }
        }
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = w[p].inverse().expect("nonzero");
        for x in w.iter_mut() {
            *x = x.times(&inv);
        }
        self.rows.push((p, w));
        true
    }
}

struct Search<'a, F> {
    src: &'a Algebra<F>,
    dst: &'a Algebra<F>,
    n: usize,
    spaces: Vec<Subspace<F>>,
    sigs: Vec<Vec<usize>>,
    dst_chars: Vec<Subspace<F>>,
    cands: Vec<Vec<Vec<F>>>,
}

type Cols<F> = Vec<Option<Vec<F>>>;

impl<'a, F: FiniteField> Search<'a, F> {
    /// `None` when the characteristic data of `src` and `dst` already differ.
    fn new(src: &'a Algebra<F>, dst: &'a Algebra<F>) -> Result<Option<Self>, SymmetryError> {
        let n = src.dim();
        if dst.dim() != n {
            return Ok(None);
        }
        let sc = characteristic(src);
        let dc = characteristic(dst);
        if sc.len() != dc.len() || sc.iter().zip(&dc).any(|(a, b)| a.dim() != b.dim()) {
            return Ok(None);
        }
        let q = F::order() as f64;
        let mut spaces = Vec::with_capacity(n);
        let mut sigs = Vec::with_capacity(n);
        let mut scan = 0.0;
        for i in 0..n {
            let e = unit::<F>(n, i);
            let mut s = Subspace::full(n);
            for (w, w2) in sc.iter().zip(&dc) {
                if w.contains(&e) {
                    s = s.intersect(w2)?;
                }
            }
            scan += q.powi(s.dim() as i32);
            spaces.push(s);
            sigs.push(signature(src, &sc, &e));
        }
        if scan > CANDIDATE_GUARD {
            return Err(SymmetryError::WorkGuard { estimate: scan, guard: CANDIDATE_GUARD });
        }
        let cands = spaces
            .iter()
            .zip(&sigs)
            .map(|(s, sig)| {
                vectors(s)
                    .into_iter()
                    .filter(|v| v.iter().any(|x| !x.is_zero()) && signature(dst, &dc, v) == *sig)
                    .collect()
            })
            .collect();
        Ok(Some(Search { src, dst, n, spaces, sigs, dst_chars: dc, cands }))
    }

    /// Product of candidate counts over the columns that are not forced.
    fn estimate(&self) -> f64 {
        let mut assigned = vec![false; self.n];
        let mut est = 1.0;
        while let Some(i) = assigned.iter().position(|x| !x) {
            est *= self.cands[i].len().max(1) as f64;
            assigned[i] = true;
            loop {
                let mut changed = false;
                for a in 0..self.n {
                    for b in 0..self.n {
                        if !(assigned[a] && assigned[b]) {
                            continue;
                        }
                        let open: Vec<usize> = (0..self.n)
                            .filter(|&k| !self.src.get(a, b, k).is_zero() && !assigned[k])
                            .collect();
                        if open.len() == 1 {
                            assigned[open[0]] = true;
                            changed = true;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
        }
        est
    }

    fn admissible(&self, k: usize, v: &[F]) -> bool {
        self.spaces[k].contains(v) && signature(self.dst, &self.dst_chars, v) == self.sigs[k]
    }

    /// Forces columns determined by products of assigned ones and checks every
    /// fully assigned product equation.
    fn propagate(&self, cols: &mut Cols<F>, ech: &mut Echelon<F>) -> bool {
        loop {
            let mut changed = false;
            for a in 0..self.n {
                for b in 0..self.n {
                    let (Some(ca), Some(cb)) = (&cols[a], &cols[b]) else { continue };
                    let mut rhs = self.dst.multiply(ca, cb).expect("dimension");
                    let mut open = None;
                    let mut n_open = 0;
                    for k in 0..self.n {
                        let c = self.src.get(a, b, k);
                        if c.is_zero() {
                            continue;
                        }
                        match &cols[k] {
                            Some(col) => {
                                for (x, y) in rhs.iter_mut().zip(col) {
                                    *x = x.minus(&c.times(y));
                                }
                            }
                            None => {
                                n_open += 1;
                                open = Some((k, *c));
                            }
                        }
                    }
                    match (n_open, open) {
                        (0, _) => {
                            if rhs.iter().any(|x| !x.is_zero()) {
                                return false;
                            }
                        }
                        (1, Some((k, c))) => {
                            let inv = c.inverse().expect("nonzero");
                            let v: Vec<F> = rhs.iter().map(|x| x.times(&inv)).collect();
                            if !self.admissible(k, &v) || !ech.insert(&v) {
                                return false;
                            }
                            cols[k] = Some(v);
                            changed = true;
                        }
                        _ => {}
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn matrix(&self, cols: &Cols<F>) -> Matrix<F> {
        let cs: Vec<Vec<F>> = cols.iter().map(|c| c.clone().expect("complete")).collect();
        Matrix::from_columns(self.n, &cs)
    }

    /// Depth-first search from a partial assignment; every candidate tried
    /// costs one node. `visit` returns false to stop. Returns false when stopped.
    fn dfs(&self, cols: Cols<F>, ech: Echelon<F>, nodes: &AtomicU64, budget: u64, visit: &mut dyn FnMut(Matrix<F>) -> bool) -> bool {
        let Some(i) = cols.iter().position(|c| c.is_none()) else {
            return visit(self.matrix(&cols));
        };
        for v in &self.cands[i] {
            if nodes.fetch_add(1, Ordering::Relaxed) >= budget {
                return false;
            }
            let mut e2 = ech.clone();
            if !e2.insert(v) {
                continue;
            }
            let mut c2 = cols.clone();
            c2[i] = Some(v.clone());
            if self.propagate(&mut c2, &mut e2) && !self.dfs(c2, e2, nodes, budget, visit) {
                return false;
            }
        }
        true
    }

    /// Subtrees below each candidate for the first column, in order.
    fn roots(&self) -> Vec<(Cols<F>, Echelon<F>)> {
        let mut out = Vec::new();
        for v in &self.cands[0] {
            let mut ech = Echelon::new();
            ech.insert(v);
            let mut cols: Cols<F> = vec![None; self.n];
            cols[0] = Some(v.clone());
            if self.propagate(&mut cols, &mut ech) {
                out.push((cols, ech));
            }
        }
        out
    }
}

/// Estimated number of backtracking leaves for enumerating `Aut(a)`.
pub fn estimate_work<F: FiniteField>(a: &Algebra<F>) -> Result<f64, SymmetryError> {
    Ok(Search::new(a, a)?.map_or(0.0, |s| s.estimate()))
}

/// Exact `|Aut(a)|` over the prime field `F`, refusing when the estimated
/// work exceeds `guard`.
pub fn aut_enumerate_fp<F: FiniteField>(a: &Algebra<F>, guard: f64) -> Result<AutCount<F>, SymmetryError> {
    let s = Search::new(a, a)?.expect("an algebra matches itself");
    let estimate = s.estimate();
    if estimate > guard {
        return Err(SymmetryError::WorkGuard { estimate, guard });
    }
    if a.dim() == 0 {
        return Ok(AutCount { count: 1, sample: vec![], estimate });
    }
    let parts: Vec<(u64, Vec<Matrix<F>>)> = s
        .roots()
        .into_par_iter()
        .map(|(cols, ech)| {
            let nodes = AtomicU64::new(0);
            let mut count = 0u64;
            let mut sample = Vec::new();
            s.dfs(cols, ech, &nodes, u64::MAX, &mut |m| {
                count += 1;
                if sample.len() < SAMPLE_SIZE {
                    sample.push(m);
                }
                true
            });
            (count, sample)
        })
        .collect();
    let count = parts.iter().map(|p| p.0).sum();
    let sample = parts.into_iter().flat_map(|p| p.1).take(SAMPLE_SIZE).collect();
    Ok(AutCount { count, sample, estimate })
}

/// Visits every automorphism in search order.
pub fn aut_for_each_fp<F: FiniteField>(a: &Algebra<F>, guard: f64, mut visit: impl FnMut(&Matrix<F>)) -> Result<(), SymmetryError> {
    let s = Search::new(a, a)?.expect("an algebra matches itself");
    let estimate = s.estimate();
    if estimate > guard {
        return Err(SymmetryError::WorkGuard { estimate, guard });
    }
    let nodes = AtomicU64::new(0);
    for (cols, ech) in s.roots() {
        s.dfs(cols, ech, &nodes, u64::MAX, &mut |m| {
            visit(&m);
            true
        });
    }
    Ok(())
}

/// Searches for an isomorphism `a -> b` over `F`, visiting at most `budget`
/// nodes. Certificates are re-checked before being returned.
pub fn iso_search_fp<F: FiniteField>(a: &Algebra<F>, b: &Algebra<F>, budget: u64) -> Result<IsoSearch<F>, SymmetryError> {
    let Some(s) = Search::new(a, b)? else {
        return Ok(IsoSearch::NotFound { exhausted: false, nodes: 0 });
    };
    if a.dim() == 0 {
        return Ok(IsoSearch::Found(Matrix::zeros(0, 0)));
    }
    let nodes = AtomicU64::new(0);
    let stopped = AtomicBool::new(false);
    let found = s.roots().into_par_iter().find_map_first(|(cols, ech)| {
        let mut hit = None;
        let completed = s.dfs(cols, ech, &nodes, budget, &mut |m| {
            hit = Some(m);
            false
        });
        if !completed && hit.is_none() {
            stopped.store(true, Ordering::Relaxed);
        }
        hit
    });
    match found {
        Some(m) => {
            if !is_isomorphism(a, b, &m) {
                return Err(SymmetryError::Shape("search produced an invalid certificate".into()));
            }
            Ok(IsoSearch::Found(m))
        }
        None => Ok(IsoSearch::NotFound { exhausted: stopped.load(Ordering::Relaxed), nodes: nodes.load(Ordering::Relaxed) }),
    }
}

/// Lifts entries in `{-2, ..., 2}` mod p to rationals.
pub fn lift_small<F: FiniteField>(m: &Matrix<F>) -> Option<Matrix<Rational>> {
    let p = F::order();
    m.try_map(|x| {
        let v = x.index();
        if v <= 2 {
            Ok(Rational::from_int(v as i64))
        } else if p - v <= 2 {
            Ok(Rational::from_int(-((p - v) as i64)))
        } else {
            Err(())
        }
    })
    .ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Fp;
    use crate::symmetry::is_automorphism;

    fn alg<const P: u64>(n: usize, entries: &[(usize, usize, usize, i64)]) -> Algebra<Fp<P>> {
        Algebra::from_entries(n, entries.iter().map(|&(i, j, k, c)| (i, j, k, Fp::new(c)))).unwrap()
    }

    #[test]
    fn general_linear_group_orders() {
        let z = alg::<2>(2, &[]);
        assert_eq!(aut_enumerate_fp(&z, WORK_GUARD).unwrap().count, 6);
        let z = alg::<3>(2, &[]);
        assert_eq!(aut_enumerate_fp(&z, WORK_GUARD).unwrap().count, 48);
    }

    #[test]
    fn first_two_step_algebra_over_f2() {
        let a = alg::<2>(4, &[(0, 0, 1, 1)]);
        let r = aut_enumerate_fp(&a, WORK_GUARD).unwrap();
        assert_eq!(r.count, 192);
        assert!(r.sample.iter().all(|m| is_automorphism(&a, m)));
        let mut seen = 0;
        aut_for_each_fp(&a, WORK_GUARD, |m| {
            assert!(is_automorphism(&a, m));
            seen += 1;
        })
        .unwrap();
        assert_eq!(seen, 192);
    }

    #[test]
    fn guard_refuses_large_work() {
        let z = alg::<7>(4, &[]);
        assert!(matches!(aut_enumerate_fp(&z, 1e3), Err(SymmetryError::WorkGuard { .. })));
    }

    #[test]
    fn count_is_basis_independent() {
        let a = alg::<3>(3, &[(0, 0, 1, 1), (0, 1, 2, 1)]);
        let m = Matrix::from_rows(vec![
            vec![Fp::new(1), Fp::new(1), Fp::new(0)],
            vec![Fp::new(0), Fp::new(1), Fp::new(1)],
            vec![Fp::new(1), Fp::new(0), Fp::new(1)],
        ])
        .unwrap();
        let b = a.change_basis(&m).unwrap();
        let ca = aut_enumerate_fp(&a, WORK_GUARD).unwrap().count;
        assert_eq!(ca, aut_enumerate_fp(&b, WORK_GUARD).unwrap().count);
        match iso_search_fp(&a, &b, 1_000_000).unwrap() {
            IsoSearch::Found(m) => assert!(is_isomorphism(&a, &b, &m)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_isomorphic_pair_is_not_found() {
        let a = alg::<5>(4, &[(0, 0, 1, 1)]);
        let b = alg::<5>(4, &[(0, 0, 2, 1), (1, 1, 2, 1)]);
        assert!(matches!(iso_search_fp(&a, &b, 1_000_000).unwrap(), IsoSearch::NotFound { exhausted: false, .. }));
        match iso_search_fp(&a, &a, 1000).unwrap() {
            IsoSearch::Found(m) => assert!(is_automorphism(&a, &m)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lifting_small_entries() {
        let m = Matrix::from_rows(vec![vec![Fp::<7>::new(6), Fp::new(2)], vec![Fp::new(0), Fp::new(5)]]).unwrap();
        let l = lift_small(&m).unwrap();
        assert_eq!(l.get(0, 0), &Rational::from_int(-1));
        assert_eq!(l.get(1, 1), &Rational::from_int(-2));
        let m = Matrix::from_rows(vec![vec![Fp::<7>::new(3)]]).unwrap();
        assert!(lift_small(&m).is_none());
    }
}
