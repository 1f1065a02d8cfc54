//! Embeddings of a plane elliptic curve `y^2 = x^3 + ax + b` into `PG(k-1, q)`
//! and the quadratic forms vanishing on the image.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{Elem, Field, Poly};
use crate::projgeom::{Matrix, PointSet, ProjPoint};
use crate::quadforms::{monomial_index, monomials, vanishing_space, FormSubspace, QuadraticForm};

#[derive(Clone, Debug, Serialize)]
pub struct EllipticParams {
    pub a: Elem,
    pub b: Elem,
    pub k: usize,
}

impl EllipticParams {
    pub fn validate(&self, f: &Field) -> Result<()> {
        if self.k < 4 {
            return Err(Error::InvalidParameter(format!("elliptic embedding needs k >= 4, got {}", self.k)));
        }
        if f.characteristic() < 5 {
            return Err(Error::InvalidParameter(format!(
                "Weierstrass form y^2 = x^3 + ax + b needs characteristic >= 5, got {}",
                f.characteristic()
            )));
        }
        if discriminant_part(self, f).is_zero() {
            return Err(Error::InvalidParameter("singular curve: 4a^3 + 27b^2 = 0".into()));
        }
        Ok(())
    }
}

fn discriminant_part(p: &EllipticParams, f: &Field) -> Elem {
    let a3 = f.pow(p.a, 3);
    f.add(f.mul(f.from_int(4), a3), f.mul(f.from_int(27), f.mul(p.b, p.b)))
}

/// `1728 * 4a^3 / (4a^3 + 27b^2)`.
pub fn j_invariant(p: &EllipticParams, f: &Field) -> Result<Elem> {
    p.validate(f)?;
    let num = f.mul(f.from_int(1728 * 4), f.pow(p.a, 3));
    f.div(num, discriminant_part(p, f))
}

/// Exponents `(m, n)` with `phi_i = x^m y^n`, for 1-based `i`.
pub fn phi_exponents(i: usize) -> (u32, u32) {
    assert!(i >= 1);
    if i == 1 {
        return (0, 0);
    }
    let j = (i / 3) as u32;
    match i % 3 {
        0 => (0, j),
        1 => (2, j - 1),
        _ => (1, j),
    }
}

/// Human-readable monomial list, e.g. `["1", "x", "y", "x^2", ...]`.
pub fn phi_names(k: usize) -> Vec<String> {
    (1..=k)
        .map(|i| {
            let (m, n) = phi_exponents(i);
            let part = |v: &str, e: u32| match e {
                0 => String::new(),
                1 => v.to_string(),
                _ => format!("{v}^{e}"),
            };
            let s = format!("{}{}", part("x", m), part("y", n));
            if s.is_empty() { "1".into() } else { s }
        })
        .collect()
}

/// Affine points `(x, y)` of the curve, ordered by `x` then `y`.
pub fn affine_points(p: &EllipticParams, f: &Field) -> Vec<(Elem, Elem)> {
    let mut out = Vec::new();
    for x in f.elements() {
        let rhs = f.add(f.add(f.pow(x, 3), f.mul(p.a, x)), p.b);
        for y in f.elements() {
            if f.mul(y, y) == rhs {
                out.push((x, y));
            }
        }
    }
    out
}

pub fn elliptic_points(p: &EllipticParams, f: &Field) -> Result<PointSet> {
    p.validate(f)?;
    let k = p.k;
    let mut s = PointSet::new(f, k);
    for (x, y) in affine_points(p, f) {
        let v = (1..=k)
            .map(|i| {
                let (m, n) = phi_exponents(i);
                f.mul(f.pow(x, m as u64), f.pow(y, n as u64))
            })
            .collect();
        s.insert_vector(v)?;
    }
    s.insert(ProjPoint::basis(k, k - 1))?;
    Ok(s)
}

/// Images of the monomials `X_i X_j` in the coordinate ring
/// `F[x, y] / (y^2 - x^3 - ax - b)`, one column each, over the basis
/// `x^m, x^m y` (row `2m + parity`).
fn function_matrix(p: &EllipticParams, f: &Field) -> Matrix {
    let r = Poly::new(vec![p.b, p.a, Elem::ZERO, Elem::ONE]);
    let mons = monomials(p.k);
    let mut images: Vec<(Poly, usize)> = Vec::with_capacity(mons.len());
    for &(i, j) in &mons {
        let (m1, n1) = phi_exponents(i + 1);
        let (m2, n2) = phi_exponents(j + 1);
        let (m, n) = (m1 + m2, n1 + n2);
        let mut poly = Poly::new([vec![Elem::ZERO; m as usize], vec![Elem::ONE]].concat());
        for _ in 0..n / 2 {
            poly = poly.mul(&r, f);
        }
        images.push((poly, (n % 2) as usize));
    }
    let width = images.iter().map(|(p, _)| p.coeffs().len()).max().unwrap_or(1);
    let mut m = Matrix::zeros(2 * width, mons.len());
    for (col, (poly, parity)) in images.iter().enumerate() {
        for (d, &c) in poly.coeffs().iter().enumerate() {
            m.set(2 * d + parity, col, c);
        }
    }
    m
}

/// Degree-2 forms in `phi_1..phi_k` that vanish identically on the curve,
/// computed in the coordinate ring. Independent of the number of rational
/// points.
pub fn symbolic_vanishing_space(p: &EllipticParams, f: &Field) -> Result<FormSubspace> {
    p.validate(f)?;
    FormSubspace::from_matrix(f, p.k, &function_matrix(p, f).nullspace(f))
}

/// Pole order of `X_i X_j` at infinity (`x` counts 2, `y` counts 3).
fn weight(i: usize, j: usize) -> u32 {
    let (m1, n1) = phi_exponents(i + 1);
    let (m2, n2) = phi_exponents(j + 1);
    2 * (m1 + m2) + 3 * (n1 + n2)
}

const MAX_EXTRA_TERMS: usize = 4;

/// Sparsest vanishing form with coefficient 1 at `lead`, built from
/// monomials of weight at most that of `lead`; ties go to the form closest
/// to `g` in Hamming distance.
fn sparsest_correction(g: &QuadraticForm, lead: usize, fm: &Matrix, f: &Field) -> Option<QuadraticForm> {
    let mons = monomials(g.k());
    let wl = weight(mons[lead].0, mons[lead].1);
    let cands: Vec<usize> = (0..mons.len()).filter(|&c| c != lead && weight(mons[c].0, mons[c].1) <= wl).collect();
    let rhs: Vec<Elem> = (0..fm.rows()).map(|r| f.neg(fm.get(r, lead))).collect();
    let distance = |q: &QuadraticForm| q.coeffs().iter().zip(g.coeffs()).filter(|(a, b)| a != b).count();
    for size in 1..=MAX_EXTRA_TERMS {
        let mut best: Option<(usize, QuadraticForm)> = None;
        let mut idx: Vec<usize> = (0..size).collect();
        if size > cands.len() {
            break;
        }
        loop {
            let cols: Vec<usize> = idx.iter().map(|&i| cands[i]).collect();
            let sub = Matrix::from_vec(
                fm.rows(),
                size,
                (0..fm.rows()).flat_map(|r| cols.iter().map(move |&c| fm.get(r, c))).collect(),
            );
            if let Some(x) = sub.solve(&rhs, f) {
                if x.iter().all(|c| !c.is_zero()) {
                    let mut coeffs = vec![Elem::ZERO; mons.len()];
                    coeffs[lead] = Elem::ONE;
                    for (&c, &v) in cols.iter().zip(&x) {
                        coeffs[c] = v;
                    }
                    let q = QuadraticForm::new(f, g.k(), coeffs).ok()?;
                    let d = distance(&q);
                    if best.as_ref().map_or(true, |(bd, _)| d < *bd) {
                        best = Some((d, q));
                    }
                }
            }
            // next combination
            let mut i = size;
            while i > 0 && idx[i - 1] == cands.len() - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for t in i..size {
                idx[t] = idx[t - 1] + 1;
            }
        }
        if let Some((_, q)) = best {
            return Some(q);
        }
    }
    None
}

/// A generator of the published recursion with 1-based variable pairs.
#[derive(Clone, Debug)]
struct LiteralGen {
    stage: usize,
    index: usize,
    /// `(coefficient, i, j)`; the first term is the leading one.
    terms: Vec<(Elem, i64, i64)>,
}

fn literal_generators(p: &EllipticParams, f: &Field) -> Vec<LiteralGen> {
    let (a, b) = (p.a, p.b);
    let one = Elem::ONE;
    let m1 = f.neg(one);
    let mut out = vec![
        LiteralGen { stage: 4, index: 1, terms: vec![(one, 2, 2), (m1, 1, 4)] },
        LiteralGen { stage: 4, index: 2, terms: vec![(one, 3, 3), (m1, 2, 4), (a, 2, 4), (b, 1, 1)] },
    ];
    if p.k >= 5 {
        out.extend([
            LiteralGen { stage: 5, index: 1, terms: vec![(one, 1, 5), (m1, 2, 3)] },
            LiteralGen { stage: 5, index: 2, terms: vec![(one, 2, 5), (m1, 3, 4)] },
            LiteralGen { stage: 5, index: 3, terms: vec![(one, 3, 5), (m1, 4, 4), (a, 2, 2), (b, 1, 2)] },
        ]);
    }
    for k in 6..=p.k {
        let kk = k as i64;
        for i in 1..=(k - 2) {
            let ii = i as i64;
            let lead = (one, kk, ii);
            let terms = match (k % 3, i % 3) {
                (0, 0) => vec![lead, (m1, kk - 1, ii + 1), (a, kk - 1, ii - 3), (b, kk - 3, ii - 3)],
                (0, 1) => vec![lead, (m1, kk - 1, ii + 1)],
                (0, _) => vec![lead, (m1, kk - 2, ii + 3)],
                (1, 0) => vec![lead, (m1, kk - 1, ii + 1)],
                (1, 1) => vec![lead, (m1, kk - 1, ii + 1), (a, kk - 3, ii - 3), (b, kk - 2, ii - 4)],
                (1, _) => vec![lead, (m1, kk - 1, ii + 1), (a, kk - 1, ii - 1), (b, kk - 1, ii - 2)],
                (_, 0) => vec![lead, (m1, kk - 1, ii + 1), (a, kk - 3, ii - 1), (b, kk - 3, ii - 3)],
                (_, 1) => vec![lead, (m1, kk - 1, ii + 1)],
                (_, _) => vec![lead, (m1, kk - 1, ii + 2)],
            };
            out.push(LiteralGen { stage: k, index: i, terms });
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum GeneratorStatus {
    Valid,
    Corrected { form: String },
    Uncorrectable,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorReport {
    pub stage: usize,
    pub index: usize,
    pub literal: String,
    /// Terms whose variable index fell outside `1..=k`.
    pub dropped_terms: Vec<String>,
    #[serde(flatten)]
    pub status: GeneratorStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct EllipticForms {
    /// The vanishing space of the embedded curve; authoritative.
    pub oracle: FormSubspace,
    /// Span of the published generators after corrections.
    pub recursion: FormSubspace,
    /// Vanishing space of the rational points alone; contains `oracle`, with
    /// equality once there are more than `2k` points.
    pub point_space_dim: usize,
    pub generators: Vec<GeneratorReport>,
}

impl EllipticForms {
    pub fn corrections(&self) -> impl Iterator<Item = &GeneratorReport> {
        self.generators.iter().filter(|g| !matches!(g.status, GeneratorStatus::Valid))
    }
}

fn term_string(c: Elem, i: i64, j: i64, f: &Field) -> String {
    format!("{}*X{i}*X{j}", f.format(c))
}

/// `g - NF_W(g - s)` where `W` is the part of `oracle` with zero coefficient
/// at `lead` and `s` is any oracle form with coefficient 1 there. The
/// echelon basis of `W` prefers pivots on the support of `g`.
fn correct(g: &QuadraticForm, lead: usize, oracle: &FormSubspace, f: &Field) -> Option<QuadraticForm> {
    let basis = oracle.forms();
    let pos = basis.iter().position(|b| !b.coeffs()[lead].is_zero())?;
    let s = basis[pos].scale(f.inv(basis[pos].coeffs()[lead]).ok()?);
    let w: Vec<Vec<Elem>> = basis
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != pos)
        .map(|(_, b)| b.sub(&s.scale(b.coeffs()[lead])).coeffs().to_vec())
        .collect();
    let n = g.coeffs().len();
    let mut order: Vec<usize> = (0..n).filter(|&c| !g.coeffs()[c].is_zero()).collect();
    order.extend((0..n).filter(|&c| g.coeffs()[c].is_zero()));
    let permuted: Vec<Vec<Elem>> = w.iter().map(|r| order.iter().map(|&c| r[c]).collect()).collect();
    let mut wm = Matrix::from_rows(&permuted, n);
    let pivots = wm.rref(f);
    let mut v: Vec<Elem> = order.iter().map(|&c| f.sub(g.coeffs()[c], s.coeffs()[c])).collect();
    for (r, &pc) in pivots.iter().enumerate() {
        let c = v[pc];
        if !c.is_zero() {
            for (x, &y) in v.iter_mut().zip(wm.row(r)) {
                *x = f.sub(*x, f.mul(c, y));
            }
        }
    }
    let mut nf = vec![Elem::ZERO; n];
    for (pi, &c) in order.iter().enumerate() {
        nf[c] = v[pi];
    }
    Some(g.sub(&QuadraticForm::new(f, g.k(), nf).ok()?))
}

/// Builds the published generator recursion and checks it against the
/// symbolic oracle, correcting generators that do not vanish on the curve.
pub fn elliptic_forms(p: &EllipticParams, f: &Field) -> Result<EllipticForms> {
    let r = elliptic_forms_unchecked(p, f)?;
    if r.recursion.dim() != r.oracle.dim() || !r.oracle.contains_subspace(&r.recursion) {
        return Err(Error::DimensionMismatch(format!(
            "corrected recursion spans {} dimensions, vanishing space has {}",
            r.recursion.dim(),
            r.oracle.dim()
        )));
    }
    Ok(r)
}

/// As [`elliptic_forms`] without the final span comparison.
pub fn elliptic_forms_unchecked(p: &EllipticParams, f: &Field) -> Result<EllipticForms> {
    p.validate(f)?;
    let k = p.k;
    let oracle = symbolic_vanishing_space(p, f)?;
    let points = elliptic_points(p, f)?;
    let point_space_dim = vanishing_space(&points).dim();
    let mut reports = Vec::new();
    let mut accepted = Vec::new();
    let gens = literal_generators(p, f);
    // each stage is checked in its own ambient space, then embedded
    for m in 4..=k {
        let pm = EllipticParams { k: m, ..p.clone() };
        let oracle_m = symbolic_vanishing_space(&pm, f)?;
        let fm = function_matrix(&pm, f);
        for gen in gens.iter().filter(|g| g.stage == m) {
            let literal = gen.terms.iter().map(|&(c, i, j)| term_string(c, i, j, f)).collect::<Vec<_>>().join(" + ");
            let in_range = |t: &(Elem, i64, i64)| (1..=m as i64).contains(&t.1) && (1..=m as i64).contains(&t.2);
            let dropped_terms =
                gen.terms.iter().filter(|t| !in_range(t)).map(|&(c, i, j)| term_string(c, i, j, f)).collect();
            let kept: Vec<(usize, usize, Elem)> =
                gen.terms.iter().filter(|t| in_range(t)).map(|&(c, i, j)| ((i - 1) as usize, (j - 1) as usize, c)).collect();
            let g = QuadraticForm::from_terms(f, m, &kept);
            let (status, form) = if oracle_m.contains(&g) && !g.is_zero() {
                (GeneratorStatus::Valid, Some(g))
            } else {
                let (_, i, j) = gen.terms[0];
                let lead = monomial_index((i - 1) as usize, (j - 1) as usize, m);
                match sparsest_correction(&g, lead, &fm, f).or_else(|| correct(&g, lead, &oracle_m, f)) {
                    Some(c) if oracle_m.contains(&c) => (GeneratorStatus::Corrected { form: c.to_string() }, Some(c)),
                    _ => (GeneratorStatus::Uncorrectable, None),
                }
            };
            if let Some(g) = form {
                accepted.push(embed(&g, k));
            }
            reports.push(GeneratorReport { stage: gen.stage, index: gen.index, literal, dropped_terms, status });
        }
    }
    let recursion = FormSubspace::span(f, k, &accepted)?;
    Ok(EllipticForms { oracle, recursion, point_space_dim, generators: reports })
}

/// The same form in `k >= g.k()` variables.
fn embed(g: &QuadraticForm, k: usize) -> QuadraticForm {
    let terms: Vec<(usize, usize, Elem)> = monomials(g.k()).into_iter().zip(g.coeffs()).map(|((i, j), &c)| (i, j, c)).collect();
    QuadraticForm::from_terms(g.field(), k, &terms)
}

/// `C(k-1, 2) - 1`.
pub fn expected_dim(k: usize) -> usize {
    (k - 1) * (k - 2) / 2 - 1
}
