//! Arc / track / contains-line classification and code parameters.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{Elem, Field};
use crate::projgeom::{check_budget, normalize_in_place, point_count, span_dim, Matrix, PointSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Arc,
    Track,
    ContainsLine,
    Other,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Arc => "arc",
            Verdict::Track => "track",
            Verdict::ContainsLine => "contains-line",
            Verdict::Other => "other",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// pick the cheaper of the two below
    Auto,
    /// count incidences on every hyperplane of the space
    HyperplaneScan,
    /// for each independent (k-2)-subset, bucket the remaining points by
    /// the hyperplane of the pencil through it they lie on
    Pencils,
}

/// Largest hyperplane section and a hyperplane realising it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HyperplaneMax {
    pub count: usize,
    /// normalised dual vector; the first such in enumeration order
    pub witness: Vec<Elem>,
    pub strategy: Strategy,
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub max_hyperplane_count: usize,
    pub hyperplane_witness: Vec<Elem>,
    /// two points spanning a line contained in the set
    pub line_witness: Option<[Vec<Elem>; 2]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MdsClass {
    #[serde(rename = "MDS")]
    Mds,
    #[serde(rename = "AMDS")]
    Amds,
    #[serde(rename = "neither")]
    Neither,
}

impl std::fmt::Display for MdsClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MdsClass::Mds => "MDS",
            MdsClass::Amds => "AMDS",
            MdsClass::Neither => "neither",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub mds_class: MdsClass,
}

/// Order used to pick witnesses: leading position, then coordinates.
fn scan_key(h: &[Elem]) -> (usize, &[Elem]) {
    (h.iter().position(|c| !c.is_zero()).unwrap_or(h.len()), h)
}

fn better(a: &(usize, Vec<Elem>), b: &(usize, Vec<Elem>)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && scan_key(&a.1) < scan_key(&b.1))
}

fn pick(a: (usize, Vec<Elem>), b: (usize, Vec<Elem>)) -> (usize, Vec<Elem>) {
    if better(&b, &a) {
        b
    } else {
        a
    }
}

fn binom(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    (0..r).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

fn hyperplane_scan(s: &PointSet) -> Result<(usize, Vec<Elem>)> {
    let k = s.k();
    let f = s.field();
    check_budget(point_count(k, f.q()))?;
    let vs: Vec<&[Elem]> = s.iter().map(|p| p.coords()).collect();
    let best = (0..k)
        .into_par_iter()
        .flat_map_iter(|lead| {
            // split the big charts once more on the next coordinate
            let q = f.q();
            let parts: Vec<(usize, Option<u32>)> =
                if lead + 1 < k { (0..q).map(|c| (lead, Some(c))).collect() } else { vec![(lead, None)] };
            parts.into_iter()
        })
        .map(|(lead, second)| {
            let mut best: Option<(usize, Vec<Elem>)> = None;
            let mut h = vec![Elem::ZERO; k];
            h[lead] = Elem::ONE;
            let fixed = match second {
                Some(c) => {
                    h[lead + 1] = Elem(c);
                    lead + 2
                }
                None => lead + 1,
            };
            loop {
                let count = vs.iter().filter(|v| f.dot(v, &h).is_zero()).count();
                let cand = (count, h.clone());
                best = Some(match best {
                    None => cand,
                    Some(b) => pick(b, cand),
                });
                // odometer over the free tail, last coordinate fastest
                let mut i = k;
                loop {
                    if i == fixed {
                        return best;
                    }
                    i -= 1;
                    h[i] = Elem(h[i].0 + 1);
                    if h[i].0 < f.q() {
                        break;
                    }
                    h[i] = Elem::ZERO;
                }
            }
        })
        .flatten()
        .reduce_with(pick)
        .expect("space has hyperplanes");
    Ok(best)
}

/// Incrementally reduced basis of the chosen points.
#[derive(Clone)]
struct Echelon {
    rows: Vec<Vec<Elem>>,
    pivots: Vec<usize>,
}

impl Echelon {
    fn new() -> Echelon {
        Echelon { rows: Vec::new(), pivots: Vec::new() }
    }

    /// Add `v` if it is independent of the current rows.
    fn push(&mut self, v: &[Elem], f: &Field) -> bool {
        let mut r = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = r[p];
            if !c.is_zero() {
                for (x, &y) in r.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
        let Some(p) = r.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        let inv = f.inv(r[p]).unwrap();
        for x in r.iter_mut() {
            *x = f.mul(*x, inv);
        }
        self.rows.push(r);
        self.pivots.push(p);
        true
    }

    fn pop(&mut self) {
        self.rows.pop();
        self.pivots.pop();
    }
}

struct PencilScan<'a> {
    f: &'a Field,
    k: usize,
    vs: Vec<&'a [Elem]>,
    /// stop as soon as a section of at least this size is found
    stop_at: usize,
}

impl PencilScan<'_> {
    fn leaf(&self, chosen: &[usize]) -> (usize, Vec<Elem>) {
        let f = self.f;
        let k = self.k;
        let rows: Vec<&[Elem]> = chosen.iter().map(|&i| self.vs[i]).collect();
        let ann = Matrix::from_rows(&rows, k).nullspace(f);
        debug_assert_eq!(ann.rows(), 2);
        let (h1, h2) = (ann.row(0), ann.row(1));
        let mut flat = 0;
        let mut buckets: Vec<(Vec<Elem>, usize)> = Vec::new();
        for v in &self.vs {
            let (a, b) = (f.dot(v, h1), f.dot(v, h2));
            if a.is_zero() && b.is_zero() {
                flat += 1;
                continue;
            }
            // v lies on b*h1 - a*h2
            let mut h: Vec<Elem> = h1.iter().zip(h2).map(|(&x, &y)| f.sub(f.mul(b, x), f.mul(a, y))).collect();
            normalize_in_place(&mut h, f).unwrap();
            match buckets.iter_mut().find(|(g, _)| *g == h) {
                Some((_, c)) => *c += 1,
                None => buckets.push((h, 1)),
            }
        }
        if buckets.is_empty() {
            // every hyperplane of the pencil meets the set in the flat only
            return pencil_members(h1, h2, f).into_iter().map(|h| (flat, h)).reduce(pick).unwrap();
        }
        let mut best: Option<(usize, Vec<Elem>)> = None;
        for (h, c) in buckets {
            let cand = (flat + c, h);
            best = Some(match best {
                None => cand,
                Some(b) => pick(b, cand),
            });
        }
        best.unwrap()
    }

    fn rec(&self, start: usize, chosen: &mut Vec<usize>, ech: &mut Echelon, acc: &mut Option<(usize, Vec<Elem>)>) {
        if let Some((c, _)) = acc {
            if *c >= self.stop_at {
                return;
            }
        }
        if chosen.len() == self.k - 2 {
            let cand = self.leaf(chosen);
            *acc = Some(match acc.take() {
                None => cand,
                Some(b) => pick(b, cand),
            });
            return;
        }
        let need = self.k - 2 - chosen.len();
        for i in start..self.vs.len() {
            if self.vs.len() - i < need {
                break;
            }
            if ech.push(self.vs[i], self.f) {
                chosen.push(i);
                self.rec(i + 1, chosen, ech, acc);
                chosen.pop();
                ech.pop();
            }
        }
    }
}

/// All `q+1` hyperplanes `a*h1 + b*h2`, normalised.
fn pencil_members(h1: &[Elem], h2: &[Elem], f: &Field) -> Vec<Vec<Elem>> {
    let mut out = Vec::new();
    let mut h = h2.to_vec();
    normalize_in_place(&mut h, f).unwrap();
    out.push(h);
    for t in f.elements() {
        let mut h: Vec<Elem> = h1.iter().zip(h2).map(|(&x, &y)| f.add(x, f.mul(t, y))).collect();
        normalize_in_place(&mut h, f).unwrap();
        out.push(h);
    }
    out
}

fn pencil_scan(s: &PointSet, stop_at: usize) -> (usize, Vec<Elem>) {
    let k = s.k();
    let scan = PencilScan { f: s.field(), k, vs: s.iter().map(|p| p.coords()).collect(), stop_at };
    if k == 2 {
        let mut acc = None;
        scan.rec(0, &mut Vec::new(), &mut Echelon::new(), &mut acc);
        return acc.unwrap();
    }
    let n = scan.vs.len();
    (0..n)
        .into_par_iter()
        .filter_map(|first| {
            let mut ech = Echelon::new();
            ech.push(scan.vs[first], scan.f);
            let mut acc = None;
            scan.rec(first + 1, &mut vec![first], &mut ech, &mut acc);
            acc
        })
        .reduce_with(pick)
        .expect("spanning set has an independent (k-2)-subset")
}

/// Rough operation counts for the two strategies.
fn costs(s: &PointSet) -> (u128, u128) {
    let k = s.k();
    let n = s.len();
    let a = point_count(k, s.field().q()).saturating_mul(n as u128);
    let b = binom(n, k.saturating_sub(2)).saturating_mul((n * k) as u128);
    (a, b)
}

/// Maximum number of points of `s` on a hyperplane.
pub fn max_hyperplane_intersection(s: &PointSet, strategy: Strategy) -> Result<HyperplaneMax> {
    max_hyperplane_bounded(s, strategy, usize::MAX)
}

fn max_hyperplane_bounded(s: &PointSet, strategy: Strategy, stop_at: usize) -> Result<HyperplaneMax> {
    let k = s.k();
    let f = s.field();
    if s.is_empty() || span_dim(s) < k {
        // the whole set lies in a hyperplane
        let ann = s.matrix().nullspace(f);
        let mut h = ann.row(ann.rows() - 1).to_vec();
        normalize_in_place(&mut h, f)?;
        return Ok(HyperplaneMax { count: s.len(), witness: h, strategy: Strategy::Auto });
    }
    let strategy = match strategy {
        Strategy::Auto => {
            let (a, b) = costs(s);
            let a_ok = check_budget(point_count(k, f.q())).is_ok();
            if a_ok && a < b {
                Strategy::HyperplaneScan
            } else {
                Strategy::Pencils
            }
        }
        other => other,
    };
    let (count, witness) = match strategy {
        Strategy::HyperplaneScan => hyperplane_scan(s)?,
        _ => pencil_scan(s, stop_at),
    };
    Ok(HyperplaneMax { count, witness, strategy })
}

/// Is every set of `k` points of `s` independent?
pub fn is_arc(s: &PointSet) -> bool {
    let k = s.k();
    if span_dim(s) < k.min(s.len()) {
        return false;
    }
    if s.len() < k {
        return true;
    }
    max_hyperplane_bounded(s, Strategy::Pencils, k).map(|m| m.count <= k - 1).unwrap_or(false)
}

/// Is some full line of the space contained in `s`?
pub fn contains_line(s: &PointSet) -> Option<[Vec<Elem>; 2]> {
    let f = s.field();
    let pts = s.points();
    let n = pts.len();
    if n < f.q() as usize + 1 {
        return None;
    }
    for a in 0..n {
        for b in a + 1..n {
            let (x, y) = (pts[a].coords(), pts[b].coords());
            let all = f
                .nonzero_elements()
                .all(|t| s.contains_vector(&x.iter().zip(y).map(|(&u, &v)| f.add(u, f.mul(t, v))).collect::<Vec<_>>()));
            if all {
                return Some([x.to_vec(), y.to_vec()]);
            }
        }
    }
    None
}

/// Arc / track / contains-line / other. The set must span the space.
pub fn classify(s: &PointSet) -> Result<Classification> {
    classify_with(s, Strategy::Auto)
}

pub fn classify_with(s: &PointSet, strategy: Strategy) -> Result<Classification> {
    let k = s.k();
    let rank = span_dim(s);
    if rank < k {
        return Err(Error::Degenerate { rank, k });
    }
    let m = max_hyperplane_intersection(s, strategy)?;
    let line = contains_line(s);
    let verdict = if line.is_some() {
        Verdict::ContainsLine
    } else if m.count < k {
        Verdict::Arc
    } else if m.count == k {
        Verdict::Track
    } else {
        Verdict::Other
    };
    Ok(Classification { verdict, max_hyperplane_count: m.count, hyperplane_witness: m.witness, line_witness: line })
}

pub fn code_params_from_max(n: usize, k: usize, max: usize) -> CodeParams {
    let d = n - max;
    let mds_class = if d + k == n + 1 {
        MdsClass::Mds
    } else if d + k == n {
        MdsClass::Amds
    } else {
        MdsClass::Neither
    };
    CodeParams { n, k, d, mds_class }
}

/// `[n, k, d]` of the code whose generator matrix has the points as columns.
pub fn code_params(s: &PointSet) -> Result<CodeParams> {
    let k = s.k();
    let rank = span_dim(s);
    if rank < k {
        return Err(Error::Degenerate { rank, k });
    }
    let m = max_hyperplane_intersection(s, Strategy::Auto)?;
    Ok(code_params_from_max(s.len(), k, m.count))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame_plus_ones(f: &Field, k: usize) -> PointSet {
        let mut s = PointSet::standard_frame(f, k);
        s.insert_vector(vec![Elem::ONE; k]).unwrap();
        s
    }

    #[test]
    fn frame_is_arc() {
        let f = Field::new(7, 1).unwrap();
        let s = frame_plus_ones(&f, 5);
        for st in [Strategy::HyperplaneScan, Strategy::Pencils] {
            assert_eq!(max_hyperplane_intersection(&s, st).unwrap().count, 4);
        }
        assert!(is_arc(&s));
        let c = classify(&s).unwrap();
        assert_eq!(c.verdict, Verdict::Arc);
        let cp = code_params(&s).unwrap();
        assert_eq!((cp.n, cp.k, cp.d, cp.mds_class), (6, 5, 2, MdsClass::Mds));
    }

    #[test]
    fn degenerate_and_line() {
        let f = Field::new(5, 1).unwrap();
        let s = PointSet::standard_frame(&f, 3);
        let mut t = PointSet::new(&f, 3);
        t.insert_vector(vec![Elem(1), Elem(0), Elem(0)]).unwrap();
        t.insert_vector(vec![Elem(0), Elem(1), Elem(0)]).unwrap();
        assert_eq!(classify(&t).unwrap_err(), Error::Degenerate { rank: 2, k: 3 });
        let mut line = PointSet::new(&f, 3);
        for t in f.elements() {
            line.insert_vector(vec![Elem(1), t, Elem(0)]).unwrap();
        }
        line.insert_vector(vec![Elem(0), Elem(1), Elem(0)]).unwrap();
        line.insert_vector(vec![Elem(0), Elem(0), Elem(1)]).unwrap();
        let c = classify(&line).unwrap();
        assert_eq!(c.verdict, Verdict::ContainsLine);
        assert!(contains_line(&s).is_none());
    }
}
