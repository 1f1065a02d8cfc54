//! Projections from points of a set, and fitting low-degree forms to the
//! images.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{Elem, Field};
use crate::projgeom::{Matrix, PointSet, ProjPoint};
use crate::quadforms::{conditions, FormSubspace, QuadraticForm};

/// Center subsets are enumerated exhaustively up to this many.
pub const EXHAUSTIVE_CAP: u64 = 100_000;
/// Otherwise this many are sampled.
pub const SAMPLE_SIZE: usize = 1_000;
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Clone, Debug, Serialize)]
pub struct Projection {
    /// Indices into the source set.
    pub centers: Vec<usize>,
    /// `k x (k - m)`: the image of a row vector `x` is `x * map`.
    #[serde(skip)]
    pub map: Matrix,
    pub image: PointSet,
    /// For each image point, the source indices mapping to it.
    pub preimages: Vec<Vec<usize>>,
}

impl Projection {
    /// Groups of two or more source points with the same image.
    pub fn collisions(&self) -> Vec<&[usize]> {
        self.preimages.iter().filter(|p| p.len() > 1).map(|p| &p[..]).collect()
    }
}

/// Project `s` from the points with indices `centers`.
pub fn project_from(s: &PointSet, centers: &[usize]) -> Result<Projection> {
    let f = s.field();
    let k = s.k();
    let m = centers.len();
    let mut rows: Vec<Vec<Elem>> = centers.iter().map(|&i| s.points()[i].coords().to_vec()).collect();
    if Matrix::from_rows(&rows, k).rank(f) < m {
        return Err(Error::DependentCenters);
    }
    for (i, p) in s.iter().enumerate() {
        if centers.contains(&i) {
            continue;
        }
        let mut with = rows.clone();
        with.push(p.coords().to_vec());
        if Matrix::from_rows(&with, k).rank(f) == m {
            return Err(Error::PointInCenterSpan(i));
        }
    }
    // complete to a basis with standard vectors
    for i in 0..k {
        if rows.len() == k {
            break;
        }
        let mut e = vec![Elem::ZERO; k];
        e[i] = Elem::ONE;
        rows.push(e);
        if Matrix::from_rows(&rows, k).rank(f) < rows.len() {
            rows.pop();
        }
    }
    let basis = Matrix::from_rows(&rows, k);
    let inv = inverse(&basis, f).ok_or(Error::Singular)?;
    let mut map = Matrix::zeros(k, k - m);
    for r in 0..k {
        for c in 0..k - m {
            map.set(r, c, inv.get(r, m + c));
        }
    }
    let mut image = PointSet::new(f, k - m);
    let mut preimages: Vec<Vec<usize>> = Vec::new();
    for (i, p) in s.iter().enumerate() {
        if centers.contains(&i) {
            continue;
        }
        let v = map.transpose().mul_vec(p.coords(), f);
        let q = ProjPoint::new(v, f)?;
        match image.position(&q) {
            Some(pos) => preimages[pos].push(i),
            None => {
                image.insert(q)?;
                preimages.push(vec![i]);
            }
        }
    }
    Ok(Projection { centers: centers.to_vec(), map, image, preimages })
}

fn inverse(m: &Matrix, f: &Field) -> Option<Matrix> {
    let n = m.rows();
    let mut aug = Matrix::zeros(n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            aug.set(r, c, m.get(r, c));
        }
        aug.set(r, n + r, Elem::ONE);
    }
    let piv = aug.rref(f);
    if piv.len() < n || piv[n - 1] >= n {
        return None;
    }
    let mut out = Matrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            out.set(r, c, aug.get(r, n + c));
        }
    }
    Some(out)
}

/// Exponent vectors of the degree-`d` monomials in `n` variables, in
/// descending lexicographic order.
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn go(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == n - 1 {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e);
            go(n, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        go(n, d, &mut Vec::new(), &mut out);
    }
    out
}

fn eval_monomial(x: &[Elem], e: &[u32], f: &Field) -> Elem {
    x.iter().zip(e).fold(Elem::ONE, |acc, (&v, &p)| f.mul(acc, f.pow(v, p as u64)))
}

/// The degree-`d` forms vanishing on a point set.
#[derive(Clone, Debug, Serialize)]
pub struct FittedSpace {
    pub n: usize,
    pub degree: u32,
    #[serde(skip)]
    pub monomials: Vec<Vec<u32>>,
    #[serde(skip)]
    pub basis: Matrix,
}

impl FittedSpace {
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn eval(&self, form: usize, x: &[Elem], f: &Field) -> Elem {
        self.monomials
            .iter()
            .zip(self.basis.row(form))
            .fold(Elem::ZERO, |acc, (e, &c)| f.add(acc, f.mul(c, eval_monomial(x, e, f))))
    }
}

/// Nullspace of the `|S| x C(n+d-1, d)` evaluation matrix.
pub fn fit_degree_d(s: &PointSet, d: u32) -> FittedSpace {
    let f = s.field();
    let mons = monomials_of_degree(s.k(), d);
    let rows: Vec<Vec<Elem>> = s.iter().map(|p| mons.iter().map(|e| eval_monomial(p.coords(), e, f)).collect()).collect();
    let basis = if rows.is_empty() { Matrix::identity(mons.len()) } else { Matrix::from_rows(&rows, mons.len()).nullspace(f) };
    FittedSpace { n: s.k(), degree: d, monomials: mons, basis }
}

/// `b(x, y) = f(x + y) - f(x) - f(y)`.
pub fn polarisation(q: &QuadraticForm, x: &[Elem], y: &[Elem]) -> Elem {
    let f = q.field();
    let sum: Vec<Elem> = x.iter().zip(y).map(|(&a, &b)| f.add(a, b)).collect();
    f.sub(f.sub(q.eval(&sum), q.eval(x)), q.eval(y))
}

/// `g_x(X) = b_1(X, x) f_2(X) - f_1(X) b_2(X, x)`.
pub fn cubic_g(f1: &QuadraticForm, f2: &QuadraticForm, x: &[Elem], at: &[Elem]) -> Elem {
    let f = f1.field();
    f.sub(f.mul(polarisation(f1, at, x), f2.eval(at)), f.mul(f1.eval(at), polarisation(f2, at, x)))
}

#[derive(Clone, Debug, Serialize)]
pub struct SubsetSelection {
    pub total: u64,
    pub sampled: bool,
    pub seed: u64,
    pub cap: u64,
}

fn binomial(n: u64, r: u64) -> u64 {
    if r > n {
        return 0;
    }
    (0..r).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// The `r`-subsets of `0..n` to check, in lexicographic order.
pub fn center_subsets(n: usize, r: usize, exhaustive: bool, seed: u64) -> (Vec<Vec<usize>>, SubsetSelection) {
    let total = binomial(n as u64, r as u64);
    let all = (exhaustive && total <= EXHAUSTIVE_CAP) || total <= SAMPLE_SIZE as u64;
    let mut out = Vec::new();
    if all {
        let mut idx: Vec<usize> = (0..r).collect();
        if r > n {
            return (out, SubsetSelection { total, sampled: false, seed, cap: EXHAUSTIVE_CAP });
        }
        loop {
            out.push(idx.clone());
            let mut i = r;
            while i > 0 && idx[i - 1] == n - r + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for t in i..r {
                idx[t] = idx[t - 1] + 1;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen = std::collections::BTreeSet::new();
        while seen.len() < SAMPLE_SIZE {
            let mut v = sample(&mut rng, n, r).into_vec();
            v.sort_unstable();
            seen.insert(v);
        }
        out = seen.into_iter().collect();
    }
    (out, SubsetSelection { total, sampled: !all, seed, cap: EXHAUSTIVE_CAP })
}

#[derive(Clone, Debug, Serialize)]
pub struct SubsetResult {
    pub centers: Vec<usize>,
    /// `None` if the subset could not be used as centers.
    pub fit_dim: Option<usize>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cubic: Option<CubicStage>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CubicStage {
    /// Smallest cubic-fit dimension over the further projection points.
    pub min_fit_dim: usize,
    pub pass: bool,
    /// Result of the `g_x` line test; `None` when not run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_lines: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FitReport {
    pub mode: &'static str,
    pub k: usize,
    pub n: usize,
    pub conditions: usize,
    /// `dim U` of the source space, when one was supplied.
    pub source_dim: Option<usize>,
    pub hypothesis_holds: Option<bool>,
    pub selection: SubsetSelection,
    pub checked: usize,
    pub passed: usize,
    pub skipped: usize,
    pub all_pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cubic_all_pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cubic_note: Option<String>,
    pub subsets: Vec<SubsetResult>,
}

#[derive(Clone, Debug)]
pub struct FitOptions {
    pub exhaustive: bool,
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { exhaustive: true, seed: DEFAULT_SEED }
    }
}

fn usable(s: &PointSet, centers: &[usize]) -> std::result::Result<Projection, String> {
    project_from(s, centers).map_err(|e| e.to_string())
}

/// Projection from every `(k-3)`-subset must lie on a conic.
pub fn castelnuovo_check(s: &PointSet, source: Option<&FormSubspace>, opts: &FitOptions) -> Result<FitReport> {
    let k = s.k();
    if k < 3 {
        return Err(Error::InvalidParameter(format!("need k >= 3, got {k}")));
    }
    let threshold = (k - 1) * (k - 2) / 2;
    let (subsets, selection) = center_subsets(s.len(), k - 3, opts.exhaustive, opts.seed);
    let results: Vec<SubsetResult> = subsets
        .into_par_iter()
        .map(|c| match usable(s, &c) {
            Ok(p) => {
                let dim = fit_degree_d(&p.image, 2).dim();
                SubsetResult { centers: c, fit_dim: Some(dim), pass: dim >= 1, skipped: None, cubic: None }
            }
            Err(e) => SubsetResult { centers: c, fit_dim: None, pass: false, skipped: Some(e), cubic: None },
        })
        .collect();
    Ok(summarise("castelnuovo", s, source, threshold, selection, results, None, None))
}

#[allow(clippy::too_many_arguments)]
fn summarise(
    mode: &'static str,
    s: &PointSet,
    source: Option<&FormSubspace>,
    threshold: usize,
    selection: SubsetSelection,
    subsets: Vec<SubsetResult>,
    cubic_all_pass: Option<bool>,
    cubic_note: Option<String>,
) -> FitReport {
    let checked = subsets.iter().filter(|r| r.skipped.is_none()).count();
    let passed = subsets.iter().filter(|r| r.pass).count();
    FitReport {
        mode,
        k: s.k(),
        n: s.len(),
        conditions: conditions(s),
        source_dim: source.map(|u| u.dim()),
        hypothesis_holds: source.map(|u| u.dim() >= threshold),
        selection,
        checked,
        passed,
        skipped: subsets.len() - checked,
        all_pass: checked > 0 && passed == checked,
        cubic_all_pass,
        cubic_note,
        subsets,
    }
}

/// Projection from every `(k-4)`-subset into `PG(3, q)` must lie on two
/// independent quadrics. Each image is further projected from each of its
/// points into the plane and fitted with cubics; in odd characteristic,
/// when two quadrics exist, the cubic `g_x` is also checked on the lines
/// through `x`.
pub fn conjecture_check(s: &PointSet, source: Option<&FormSubspace>, opts: &FitOptions) -> Result<FitReport> {
    let k = s.k();
    if k < 4 {
        return Err(Error::InvalidParameter(format!("need k >= 4, got {k}")));
    }
    let f = s.field().clone();
    let odd = f.characteristic() != 2;
    let threshold = (k - 1) * (k - 2) / 2 - 1;
    let (subsets, selection) = center_subsets(s.len(), k - 4, opts.exhaustive, opts.seed);
    let results: Vec<SubsetResult> = subsets
        .into_par_iter()
        .map(|c| {
            let p = match usable(s, &c) {
                Ok(p) => p,
                Err(e) => return SubsetResult { centers: c, fit_dim: None, pass: false, skipped: Some(e), cubic: None },
            };
            let quad = fit_degree_d(&p.image, 2);
            let dim = quad.dim();
            let mut min_cubic = usize::MAX;
            for x in 0..p.image.len() {
                if let Ok(pp) = project_from(&p.image, &[x]) {
                    min_cubic = min_cubic.min(fit_degree_d(&pp.image, 3).dim());
                }
            }
            let g_lines = (odd && dim >= 2).then(|| g_line_test(&quad, &p.image, &f));
            let cubic = CubicStage { min_fit_dim: min_cubic, pass: min_cubic >= 1 && min_cubic != usize::MAX, g_lines };
            SubsetResult { centers: c, fit_dim: Some(dim), pass: dim >= 2, skipped: None, cubic: Some(cubic) }
        })
        .collect();
    let cubic_all_pass = results.iter().filter_map(|r| r.cubic.as_ref()).all(|c| c.pass && c.g_lines != Some(false));
    let note = (!odd).then(|| "characteristic 2: polarisation is alternating, g_x line test skipped".to_string());
    Ok(summarise("conjecture", s, source, threshold, selection, results, Some(cubic_all_pass), note))
}

/// With `f_1, f_2` the first two fitted quadrics, `g_x` vanishes on every
/// point of every line joining `x` to another image point, for each `x`.
fn g_line_test(quad: &FittedSpace, image: &PointSet, f: &Field) -> bool {
    let to_form = |r: usize| {
        let terms: Vec<(usize, usize, Elem)> = quad
            .monomials
            .iter()
            .zip(quad.basis.row(r))
            .map(|(e, &c)| {
                let vars: Vec<usize> = e.iter().enumerate().flat_map(|(i, &p)| std::iter::repeat(i).take(p as usize)).collect();
                (vars[0], vars[1], c)
            })
            .collect();
        QuadraticForm::from_terms(f, quad.n, &terms)
    };
    let (f1, f2) = (to_form(0), to_form(1));
    let pts = image.points();
    pts.iter().all(|x| {
        pts.iter().filter(|y| y != &x).all(|y| {
            f.elements().all(|lambda| {
                let at: Vec<Elem> = x.coords().iter().zip(y.coords()).map(|(&a, &b)| f.add(f.mul(lambda, a), b)).collect();
                cubic_g(&f1, &f2, x.coords(), &at).is_zero()
            }) && cubic_g(&f1, &f2, x.coords(), x.coords()).is_zero()
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{nrc_points, NrcParams};

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials_of_degree(3, 2).len(), 6);
        assert_eq!(monomials_of_degree(4, 2).len(), 10);
        assert_eq!(monomials_of_degree(3, 3).len(), 10);
    }

    #[test]
    fn projection_of_nrc() {
        let f = Field::new(11, 1).unwrap();
        let s = nrc_points(&NrcParams::standard(&f, 5).unwrap(), &f).unwrap();
        let p = project_from(&s, &[0, 1]).unwrap();
        assert_eq!(p.image.len(), 10);
        assert_eq!(p.image.k(), 3);
        assert!(p.collisions().is_empty());
        assert!(fit_degree_d(&p.image, 2).dim() >= 1);
        let id = project_from(&s, &[]).unwrap();
        assert!(id.image.same_points(&s));
        assert_eq!(project_from(&s, &[0, 0]).unwrap_err(), Error::DependentCenters);
    }

    #[test]
    fn conic_through_five_points() {
        let f = Field::new(13, 1).unwrap();
        let pts: Vec<Vec<Elem>> = (0..5).map(|t| vec![Elem::ONE, f.from_int(t), f.from_int(t * t)]).collect();
        let s = PointSet::from_vectors(&f, 3, pts).unwrap();
        assert_eq!(fit_degree_d(&s, 2).dim(), 1);
    }

    #[test]
    fn subset_selection() {
        let (all, sel) = center_subsets(6, 3, true, 1);
        assert_eq!(all.len(), 20);
        assert!(!sel.sampled);
        let (some, sel) = center_subsets(40, 5, false, 1);
        assert_eq!(some.len(), SAMPLE_SIZE);
        assert!(sel.sampled);
        assert_eq!(some, center_subsets(40, 5, false, 1).0);
    }
}
