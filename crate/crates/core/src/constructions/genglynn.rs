//! `q^t + 1` points of `PG(2^t + t - 2, q^t)` built from the subset monomials
//! `prod_{i in T} x^{q^i}` and `t - 1` extra Frobenius-twisted coordinates.
//!
//! Coordinates: the `2^t` subsets of `{0..t-1}` sorted by size and then by
//! bitmask value, followed by the extra coordinates in increasing order of
//! their index in `I`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::classify::{max_hyperplane_intersection, HyperplaneMax, Strategy};
use crate::error::{Error, Result};
use crate::gf::{Elem, Field};
use crate::projgeom::{Matrix, PointSet, ProjPoint};
use crate::quadforms::{vanishing_space, FormSubspace, QuadraticForm};

/// `I = {q-1} ∪ {q^d - q^{d-1} + 1 : d = 2..t-1}`.
pub fn index_set(t: usize, q: u64) -> Vec<u64> {
    let mut out = vec![q - 1];
    for d in 2..t as u32 {
        out.push(q.pow(d) - q.pow(d - 1) + 1);
    }
    out
}

/// Subset bitmasks in coordinate order.
pub fn subset_order(t: usize) -> Vec<u32> {
    let mut v: Vec<u32> = (0..1u32 << t).collect();
    v.sort_by_key(|&m| (m.count_ones(), m));
    v
}

/// `sum_{i in T} q^i`.
pub fn subset_exponent(mask: u32, q: u64) -> u64 {
    (0..32).filter(|i| mask >> i & 1 == 1).map(|i| q.pow(i)).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct GenGlynnParams {
    pub t: usize,
    pub q: u32,
    /// `alphas[n][j]` for the `n`-th element of `I`, `j = 0..t-1`.
    pub alphas: Vec<Vec<Elem>>,
}

/// The big field `F_{q^t}`.
pub fn big_field(t: usize, q: u32) -> Result<Field> {
    if t < 2 {
        return Err(Error::InvalidParameter(format!("need t >= 2, got {t}")));
    }
    Field::of_order((q as u64).pow(t as u32))
}

/// `P[r][c] = alpha_{(c - r) mod t}^{q^r}`.
pub fn p_matrix(alpha: &[Elem], q: u32, f: &Field) -> Matrix {
    let t = alpha.len();
    let mut m = Matrix::zeros(t, t);
    for r in 0..t {
        for c in 0..t {
            m.set(r, c, f.pow(alpha[(c + t - r) % t], (q as u64).pow(r as u32)));
        }
    }
    m
}

impl GenGlynnParams {
    /// For each index, the first `(1, a_1, .., a_{t-1})` with nonsingular `P`,
    /// each `a_j` running through `eps, eps^2, .., eps^{q^t-1} = 1, 0` with
    /// `a_{t-1}` fastest.
    pub fn standard(t: usize, q: u32) -> Result<(Field, GenGlynnParams)> {
        let f = big_field(t, q)?;
        let mut values: Vec<Elem> = (1..f.q() as i64).map(|m| f.eps_pow(m)).collect();
        values.push(Elem::ZERO);
        let mut alphas = Vec::new();
        for n in 0..t - 1 {
            let mut digits = vec![0usize; t - 1];
            let found = loop {
                let mut a = vec![Elem::ONE];
                a.extend(digits.iter().map(|&d| values[d]));
                if !p_matrix(&a, q, &f).det(&f).is_zero() {
                    break Some(a);
                }
                let mut pos = t - 1;
                while pos > 0 && digits[pos - 1] == values.len() - 1 {
                    digits[pos - 1] = 0;
                    pos -= 1;
                }
                if pos == 0 {
                    break None;
                }
                digits[pos - 1] += 1;
            };
            alphas.push(found.ok_or(Error::PSingular(index_set(t, q as u64)[n]))?);
        }
        Ok((f, GenGlynnParams { t, q, alphas }))
    }

    pub fn validate(&self, f: &Field) -> Result<()> {
        let t = self.t;
        if t < 2 || (self.q as u64).pow(t as u32) != f.q() as u64 {
            return Err(Error::InvalidParameter(format!("field must have order q^t = {}^{}", self.q, t)));
        }
        if self.alphas.len() != t - 1 || self.alphas.iter().any(|a| a.len() != t) {
            return Err(Error::InvalidParameter(format!("need {} rows of {t} alphas", t - 1)));
        }
        for (n, a) in self.alphas.iter().enumerate() {
            if p_matrix(a, self.q, f).det(f).is_zero() {
                return Err(Error::PSingular(index_set(t, self.q as u64)[n]));
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        (1 << self.t) + self.t - 1
    }
}

/// Points of `V_t`: subset coordinates only.
pub fn v_t_points(t: usize, q: u32, f: &Field) -> Result<PointSet> {
    let order = subset_order(t);
    let mut s = PointSet::new(f, order.len());
    for x in f.elements() {
        s.insert_vector(order.iter().map(|&m| f.pow(x, subset_exponent(m, q as u64))).collect())?;
    }
    s.insert(ProjPoint::basis(order.len(), order.len() - 1))?;
    Ok(s)
}

pub fn gen_glynn_points(p: &GenGlynnParams, f: &Field) -> Result<PointSet> {
    p.validate(f)?;
    let q = p.q as u64;
    let order = subset_order(p.t);
    let idx = index_set(p.t, q);
    let mut s = PointSet::new(f, p.k());
    for x in f.elements() {
        let mut v: Vec<Elem> = order.iter().map(|&m| f.pow(x, subset_exponent(m, q))).collect();
        for (n, &i) in idx.iter().enumerate() {
            let val = (0..p.t).fold(Elem::ZERO, |acc, j| f.add(acc, f.mul(p.alphas[n][j], f.pow(x, i * q.pow(j as u32)))));
            v.push(val);
        }
        s.insert_vector(v)?;
    }
    s.insert(ProjPoint::basis(p.k(), order.len() - 1))?;
    Ok(s)
}

/// `x_A x_B - x_C x_D` for disjoint pairs with the same union, as
/// coordinate positions.
pub fn subset_quadric_pairs(t: usize) -> Vec<((usize, usize), (usize, usize))> {
    let order = subset_order(t);
    let pos: BTreeMap<u32, usize> = order.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let mut splits: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
    for &a in &order {
        for &b in &order {
            if a & b == 0 && a <= b {
                splits.entry(a | b).or_default().push((pos[&a], pos[&b]));
            }
        }
    }
    let mut out = Vec::new();
    for pairs in splits.values() {
        for x in 0..pairs.len() {
            for y in x + 1..pairs.len() {
                out.push((pairs[x], pairs[y]));
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtraQuadric {
    /// Element of `I` owning the extra coordinate.
    pub index: u64,
    /// Subset `T` as a bitmask.
    pub subset: u32,
    pub form: String,
    pub vanishes: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GenGlynn {
    pub params: GenGlynnParams,
    pub k: usize,
    pub points: PointSet,
    /// Span of the subset quadrics and the verified extra quadrics.
    pub forms: FormSubspace,
    pub subset_quadrics: usize,
    pub subset_rank: usize,
    pub extra: Vec<ExtraQuadric>,
    /// `(index, subset)` pairs with no two-subset reading; see [`extra_quadric`].
    pub skipped_extra: Vec<(u64, u32)>,
    pub vanishing_dim: usize,
    pub bound: u64,
    pub max_hyperplane: Option<HyperplaneMax>,
}

impl GenGlynn {
    pub fn within_bound(&self) -> Option<bool> {
        self.max_hyperplane.as_ref().map(|h| h.count as u64 <= self.bound)
    }
}

/// Base-`q` reading of an exponent `E` in `1..q^t-1` with every digit at most
/// 2 as `x_A x_B`, where `A` holds the nonzero digits and `B` the digits 2.
fn split_exponent(e: u64, t: usize, q: u64) -> Option<(u32, u32)> {
    let (mut a, mut b, mut r) = (0u32, 0u32, e);
    for i in 0..t {
        match r % q {
            0 => {}
            1 => a |= 1 << i,
            2 => {
                a |= 1 << i;
                b |= 1 << i;
            }
            _ => return None,
        }
        r /= q;
    }
    Some((a, b))
}

/// `x_i x_T - sum_j alpha_ij x_{A_j} x_{B_j}` with `x^{i q^j + e(T)} = x_{A_j} x_{B_j}`.
/// `None` when an exponent with nonzero coefficient reduces to `0 mod q^t-1`
/// (the product is then wrong at `x = 0` or at infinity) or has a digit above 2.
pub fn extra_quadric(p: &GenGlynnParams, n: usize, mask: u32, f: &Field) -> Option<QuadraticForm> {
    let q = p.q as u64;
    let modulus = q.pow(p.t as u32) - 1;
    let order = subset_order(p.t);
    let pos = |m: u32| order.iter().position(|&x| x == m).unwrap();
    let i = index_set(p.t, q)[n];
    let mut terms = vec![(order.len() + n, pos(mask), Elem::ONE)];
    for j in 0..p.t {
        let c = p.alphas[n][j];
        if c.is_zero() {
            continue;
        }
        let e = (i * q.pow(j as u32) + subset_exponent(mask, q)) % modulus;
        if e == 0 {
            return None;
        }
        let (a, b) = split_exponent(e, p.t, q)?;
        terms.push((pos(a), pos(b), f.neg(c)));
    }
    Some(QuadraticForm::from_terms(f, p.k(), &terms))
}

/// Points, quadrics and (optionally) the hyperplane bound check.
pub fn gen_glynn(p: &GenGlynnParams, f: &Field, check_bound: bool) -> Result<GenGlynn> {
    p.validate(f)?;
    let k = p.k();
    let points = gen_glynn_points(p, f)?;
    let vanish = |g: &QuadraticForm| points.iter().all(|x| g.eval(x.coords()).is_zero());
    let pairs = subset_quadric_pairs(p.t);
    let mut forms: Vec<QuadraticForm> = pairs
        .iter()
        .map(|&((a, b), (c, d))| QuadraticForm::from_terms(f, k, &[(a, b, Elem::ONE), (c, d, f.neg(Elem::ONE))]))
        .collect();
    for g in &forms {
        if !vanish(g) {
            return Err(Error::InvalidParameter(format!("subset quadric {g} does not vanish")));
        }
    }
    let subset_rank = FormSubspace::span(f, k, &forms)?.dim();
    let mut extra = Vec::new();
    let mut skipped_extra = Vec::new();
    if p.q == 3 {
        let idx = index_set(p.t, 3);
        for n in 0..p.t - 1 {
            for &mask in &subset_order(p.t) {
                match extra_quadric(p, n, mask, f) {
                    Some(g) => {
                        let ok = vanish(&g);
                        extra.push(ExtraQuadric { index: idx[n], subset: mask, form: g.to_string(), vanishes: ok });
                        if ok {
                            forms.push(g);
                        }
                    }
                    None => skipped_extra.push((idx[n], mask)),
                }
            }
        }
    }
    let span = FormSubspace::span(f, k, &forms)?;
    let q = p.q as u64;
    let bound = (q.pow(p.t as u32) - 1) / (q - 1);
    let max_hyperplane = if check_bound { Some(max_hyperplane_intersection(&points, Strategy::Auto)?) } else { None };
    Ok(GenGlynn {
        params: p.clone(),
        k,
        vanishing_dim: vanishing_space(&points).dim(),
        points,
        forms: span,
        subset_quadrics: pairs.len(),
        subset_rank,
        extra,
        skipped_extra,
        bound,
        max_hyperplane,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_and_index_set() {
        assert_eq!(subset_order(2), [0, 1, 2, 3]);
        assert_eq!(subset_order(3), [0, 1, 2, 4, 3, 5, 6, 7]);
        assert_eq!(index_set(2, 3), [2]);
        assert_eq!(index_set(4, 3), [2, 7, 19]);
        assert_eq!(subset_quadric_pairs(2).len(), 1);
    }

    #[test]
    fn t2_q3_matches_listed_points() {
        let (f, p) = GenGlynnParams::standard(2, 3).unwrap();
        let alpha = p.alphas[0][1];
        assert_eq!(f.pow(alpha, 4), f.neg(Elem::ONE));
        assert_eq!(p_matrix(&p.alphas[0], 3, &f).det(&f), f.from_int(2));
        let pts = gen_glynn_points(&p, &f).unwrap();
        assert_eq!(pts.len(), 10);
        // (1, x, x^3, x^4, x^2 + alpha x^6) in the subset-first layout
        for x in f.elements() {
            let v = vec![Elem::ONE, x, f.pow(x, 3), f.pow(x, 4), f.add(f.pow(x, 2), f.mul(alpha, f.pow(x, 6)))];
            assert!(pts.contains_vector(&v));
        }
        let g = gen_glynn(&p, &f, true).unwrap();
        assert_eq!(g.max_hyperplane.as_ref().unwrap().count, 4);
        assert!(g.extra.iter().all(|e| e.vanishes));
        assert!(vanishing_space(&pts).contains_subspace(&g.forms));
    }

    #[test]
    fn singular_p_rejected() {
        let f = big_field(2, 3).unwrap();
        let p = GenGlynnParams { t: 2, q: 3, alphas: vec![vec![Elem::ONE, Elem::ONE]] };
        assert_eq!(p.validate(&f).unwrap_err(), Error::PSingular(2));
    }
}
