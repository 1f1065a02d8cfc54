//! Quadratic forms on `F_q^k`, their vanishing subspaces and reducibility.

mod text;

use std::collections::HashSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gf::{Elem, Field};
use crate::projgeom::{in_row_space, Matrix, PointSet, ProjPoint};

pub use text::{format_monomial_terms, parse_terms, Term};

/// Number of quadratic monomials in `k` variables, `C(k+1, 2)`.
#[inline]
pub fn num_monomials(k: usize) -> usize {
    k * (k + 1) / 2
}

/// Position of `X_i X_j` (0-based, `i <= j`) in the fixed order
/// `(0,0),(0,1),...,(0,k-1),(1,1),...`.
#[inline]
pub fn monomial_index(i: usize, j: usize, k: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * k - i * i.saturating_sub(1) / 2 + (j - i)
}

/// All monomials `(i, j)` with `i <= j`, in index order.
pub fn monomials(k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(num_monomials(k));
    for i in 0..k {
        for j in i..k {
            out.push((i, j));
        }
    }
    out
}

/// The row `(x_i x_j)_{i<=j}`: evaluating a form at `x` is the dot product of
/// its coefficients with this vector.
pub fn monomial_vector(x: &[Elem], f: &Field) -> Vec<Elem> {
    let k = x.len();
    let mut out = Vec::with_capacity(num_monomials(k));
    for i in 0..k {
        for j in i..k {
            out.push(f.mul(x[i], x[j]));
        }
    }
    out
}

/// A quadratic form `sum_{i<=j} a_ij X_i X_j`.
#[derive(Clone, PartialEq, Eq)]
pub struct QuadraticForm {
    field: Field,
    k: usize,
    coeffs: Vec<Elem>,
}

impl fmt::Debug for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadraticForm({})", self)
    }
}

impl fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<Term> = monomials(self.k)
            .into_iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|((i, j), &c)| {
                let mut exps = vec![0u32; self.k];
                exps[i] += 1;
                exps[j] += 1;
                Term { coeff: c, exps }
            })
            .collect();
        f.write_str(&format_monomial_terms(&terms, &self.field))
    }
}

impl Serialize for QuadraticForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl QuadraticForm {
    pub fn new(field: &Field, k: usize, coeffs: Vec<Elem>) -> Result<QuadraticForm> {
        if coeffs.len() != num_monomials(k) {
            return Err(Error::AmbientMismatch { expected: num_monomials(k), found: coeffs.len() });
        }
        Ok(QuadraticForm { field: field.clone(), k, coeffs })
    }

    pub fn zero(field: &Field, k: usize) -> QuadraticForm {
        QuadraticForm { field: field.clone(), k, coeffs: vec![Elem::ZERO; num_monomials(k)] }
    }

    /// Build from `(i, j, coefficient)` triples with 0-based variable indices;
    /// repeated monomials accumulate.
    pub fn from_terms(field: &Field, k: usize, terms: &[(usize, usize, Elem)]) -> QuadraticForm {
        let mut q = QuadraticForm::zero(field, k);
        for &(i, j, c) in terms {
            let idx = monomial_index(i, j, k);
            q.coeffs[idx] = field.add(q.coeffs[idx], c);
        }
        q
    }

    /// Product of two linear forms.
    pub fn product(field: &Field, l1: &[Elem], l2: &[Elem]) -> QuadraticForm {
        let k = l1.len();
        let mut terms = Vec::new();
        for i in 0..k {
            for j in 0..k {
                terms.push((i, j, field.mul(l1[i], l2[j])));
            }
        }
        QuadraticForm::from_terms(field, k, &terms)
    }

    pub fn parse(text: &str, field: &Field, k: usize) -> Result<QuadraticForm> {
        let terms = parse_terms(text, field, k)?;
        let mut q = QuadraticForm::zero(field, k);
        for t in terms {
            if t.exps.iter().sum::<u32>() != 2 {
                return Err(Error::Parse(format!("term of degree {} in quadratic form `{text}`", t.exps.iter().sum::<u32>())));
            }
            let vars: Vec<usize> = t.exps.iter().enumerate().flat_map(|(i, &e)| std::iter::repeat(i).take(e as usize)).collect();
            let idx = monomial_index(vars[0], vars[1], k);
            q.coeffs[idx] = field.add(q.coeffs[idx], t.coeff);
        }
        Ok(q)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }
    pub fn coeff(&self, i: usize, j: usize) -> Elem {
        self.coeffs[monomial_index(i, j, self.k)]
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Evaluate at a coordinate vector.
    pub fn eval(&self, x: &[Elem]) -> Elem {
        let f = &self.field;
        let mut acc = Elem::ZERO;
        let mut idx = 0;
        for i in 0..self.k {
            if x[i].is_zero() {
                idx += self.k - i;
                continue;
            }
            let mut inner = Elem::ZERO;
            for j in i..self.k {
                inner = f.add(inner, f.mul(self.coeffs[idx], x[j]));
                idx += 1;
            }
            acc = f.add(acc, f.mul(x[i], inner));
        }
        acc
    }

    pub fn eval_point(&self, p: &ProjPoint) -> Result<Elem> {
        if p.k() != self.k {
            return Err(Error::AmbientMismatch { expected: self.k, found: p.k() });
        }
        Ok(self.eval(p.coords()))
    }

    pub fn scale(&self, c: Elem) -> QuadraticForm {
        let coeffs = self.coeffs.iter().map(|&a| self.field.mul(a, c)).collect();
        QuadraticForm { field: self.field.clone(), k: self.k, coeffs }
    }

    pub fn add(&self, other: &QuadraticForm) -> QuadraticForm {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| self.field.add(a, b)).collect();
        QuadraticForm { field: self.field.clone(), k: self.k, coeffs }
    }

    pub fn sub(&self, other: &QuadraticForm) -> QuadraticForm {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| self.field.sub(a, b)).collect();
        QuadraticForm { field: self.field.clone(), k: self.k, coeffs }
    }

    /// Substitute `X_i -> X_{perm[i]}`.
    pub fn permute_vars(&self, perm: &[usize]) -> QuadraticForm {
        let mut terms = Vec::new();
        for (idx, (i, j)) in monomials(self.k).into_iter().enumerate() {
            if !self.coeffs[idx].is_zero() {
                terms.push((perm[i], perm[j], self.coeffs[idx]));
            }
        }
        QuadraticForm::from_terms(&self.field, self.k, &terms)
    }

    /// Symmetric Gram matrix `G` with `x^T G x = 2 f(x)`.
    pub fn gram_matrix(&self) -> Matrix {
        let f = &self.field;
        let mut g = Matrix::zeros(self.k, self.k);
        for (idx, (i, j)) in monomials(self.k).into_iter().enumerate() {
            let a = self.coeffs[idx];
            if i == j {
                g.set(i, i, f.add(a, a));
            } else {
                g.set(i, j, a);
                g.set(j, i, a);
            }
        }
        g
    }

    /// Matrix of the polar form `f(x+y) - f(x) - f(y)`.
    pub fn polar_matrix(&self) -> Matrix {
        self.gram_matrix()
    }
}

/// A reducible form of `u`, if any, found by scanning `u` projectively.
pub fn find_reducible(u: &FormSubspace) -> Result<Option<QuadraticForm>> {
    let f = u.field();
    let basis = u.forms();
    if basis.is_empty() {
        return Ok(None);
    }
    for c in crate::projgeom::enumerate_points(basis.len(), f)? {
        let mut g = QuadraticForm::zero(f, u.k());
        for (&ci, b) in c.iter().zip(&basis) {
            if !ci.is_zero() {
                g = g.add(&b.scale(ci));
            }
        }
        if is_reducible(&g)? {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

/// Is `f` a product of two linear forms over the algebraic closure?
///
/// Odd characteristic: the Gram matrix has rank at most 2. Characteristic 2:
/// the polar matrix is alternating; rank 0 means `f` is a square, rank 2
/// means `f` splits iff it vanishes on the radical, higher rank means `f` is
/// irreducible.
pub fn is_reducible(q: &QuadraticForm) -> Result<bool> {
    if q.is_zero() {
        return Err(Error::ZeroForm);
    }
    let f = q.field();
    let b = q.polar_matrix();
    let rank = b.rank(f);
    if f.characteristic() != 2 {
        return Ok(rank <= 2);
    }
    match rank {
        0 => Ok(true),
        2 => {
            let radical = b.nullspace(f);
            Ok((0..radical.rows()).all(|r| q.eval(radical.row(r)).is_zero()))
        }
        _ => Ok(false),
    }
}

/// A subspace of quadratic forms, stored as a canonical echelon basis of
/// coefficient vectors.
#[derive(Clone, PartialEq, Eq)]
pub struct FormSubspace {
    field: Field,
    k: usize,
    basis: Matrix,
    pivots: Vec<usize>,
}

impl fmt::Debug for FormSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FormSubspace")
            .field("q", &self.field.q())
            .field("k", &self.k)
            .field("forms", &self.forms().iter().map(|q| q.to_string()).collect::<Vec<_>>())
            .finish()
    }
}

impl Serialize for FormSubspace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let forms: Vec<String> = self.forms().iter().map(|q| q.to_string()).collect();
        forms.serialize(s)
    }
}

impl FormSubspace {
    /// Span of the given coefficient rows (`C(k+1,2)` columns).
    pub fn from_matrix(field: &Field, k: usize, m: &Matrix) -> Result<FormSubspace> {
        if m.cols() != num_monomials(k) {
            return Err(Error::AmbientMismatch { expected: num_monomials(k), found: m.cols() });
        }
        let basis = m.row_space_basis(field);
        let pivots = (0..basis.rows()).map(|r| basis.row(r).iter().position(|c| !c.is_zero()).unwrap()).collect();
        Ok(FormSubspace { field: field.clone(), k, basis, pivots })
    }

    pub fn span(field: &Field, k: usize, forms: &[QuadraticForm]) -> Result<FormSubspace> {
        for q in forms {
            if q.k() != k {
                return Err(Error::AmbientMismatch { expected: k, found: q.k() });
            }
        }
        let rows: Vec<&[Elem]> = forms.iter().map(|q| q.coeffs()).collect();
        FormSubspace::from_matrix(field, k, &Matrix::from_rows(&rows, num_monomials(k)))
    }

    pub fn zero(field: &Field, k: usize) -> FormSubspace {
        FormSubspace::from_matrix(field, k, &Matrix::zeros(0, num_monomials(k))).unwrap()
    }

    pub fn full(field: &Field, k: usize) -> FormSubspace {
        FormSubspace::from_matrix(field, k, &Matrix::identity(num_monomials(k))).unwrap()
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }
    pub fn basis_matrix(&self) -> &Matrix {
        &self.basis
    }

    pub fn forms(&self) -> Vec<QuadraticForm> {
        (0..self.basis.rows())
            .map(|r| QuadraticForm { field: self.field.clone(), k: self.k, coeffs: self.basis.row(r).to_vec() })
            .collect()
    }

    pub fn contains(&self, q: &QuadraticForm) -> bool {
        q.k() == self.k && in_row_space(&self.basis, &self.pivots, q.coeffs(), &self.field)
    }

    pub fn contains_subspace(&self, other: &FormSubspace) -> bool {
        other.forms().iter().all(|q| self.contains(q))
    }

    /// Do all basis forms vanish at `x`?
    pub fn annihilates(&self, x: &[Elem]) -> bool {
        let mv = monomial_vector(x, &self.field);
        (0..self.basis.rows()).all(|r| self.field.dot(self.basis.row(r), &mv).is_zero())
    }

    /// Image under `X_i -> X_{perm[i]}`.
    pub fn permute_vars(&self, perm: &[usize]) -> FormSubspace {
        let forms: Vec<QuadraticForm> = self.forms().iter().map(|q| q.permute_vars(perm)).collect();
        FormSubspace::span(&self.field, self.k, &forms).unwrap()
    }

    /// Is the subspace mapped to itself by `X_i -> X_{perm[i]}`?
    pub fn fixed_by(&self, perm: &[usize]) -> bool {
        self.forms().iter().all(|q| self.contains(&q.permute_vars(perm)))
    }

    /// Intersection with another subspace of the same ambient.
    pub fn intersect(&self, other: &FormSubspace) -> FormSubspace {
        // Solve a*B1 = b*B2 for (a, b); the intersection is spanned by a*B1.
        let n = num_monomials(self.k);
        let (d1, d2) = (self.dim(), other.dim());
        let mut m = Matrix::zeros(n, d1 + d2);
        for c in 0..n {
            for r in 0..d1 {
                m.set(c, r, self.basis.get(r, c));
            }
            for r in 0..d2 {
                m.set(c, d1 + r, self.field.neg(other.basis.get(r, c)));
            }
        }
        let ns = m.nullspace(&self.field);
        let rows: Vec<Vec<Elem>> = (0..ns.rows())
            .map(|r| {
                let a = &ns.row(r)[..d1];
                (0..n)
                    .map(|c| (0..d1).fold(Elem::ZERO, |acc, i| self.field.add(acc, self.field.mul(a[i], self.basis.get(i, c)))))
                    .collect()
            })
            .collect();
        FormSubspace::from_matrix(&self.field, self.k, &Matrix::from_rows(&rows, n)).unwrap()
    }

    /// File form: `#` header lines with `q`, `k`, `dim`, then one form per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("# q={}\n# k={}\n# dim={}\n", self.field.q(), self.k, self.dim());
        if !self.field.is_prime_field() {
            let m: Vec<String> = self.field.modulus().iter().map(|c| c.to_string()).collect();
            out.push_str(&format!("# modulus={}\n", m.join(",")));
        }
        for q in self.forms() {
            out.push_str(&q.to_string());
            out.push('\n');
        }
        out
    }

    /// Parse the file form; the field is taken from the `q` header unless given.
    pub fn from_text(text: &str, field: Option<&Field>) -> Result<FormSubspace> {
        let mut q: Option<u64> = None;
        let mut k: Option<usize> = None;
        let mut modulus: Option<Vec<u32>> = None;
        let mut body = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(h) = line.strip_prefix('#') {
                for tok in h.split_whitespace() {
                    match tok.split_once('=') {
                        Some(("q", v)) => q = v.parse().ok(),
                        Some(("k", v)) => k = v.parse().ok(),
                        Some(("modulus", v)) => modulus = v.split(',').map(|c| c.parse().ok()).collect(),
                        _ => {}
                    }
                }
                continue;
            }
            body.push(line);
        }
        let field = match field {
            Some(f) => f.clone(),
            None => {
                let q = q.ok_or_else(|| Error::Parse("missing `# q=` header".into()))?;
                match modulus {
                    Some(m) => {
                        let (p, _) = crate::gf::prime_power(q).ok_or(Error::NotPrimePower(q))?;
                        Field::with_modulus(p, &m)?
                    }
                    None => Field::of_order(q)?,
                }
            }
        };
        let k = k.ok_or_else(|| Error::Parse("missing `# k=` header".into()))?;
        let forms = body.iter().map(|l| QuadraticForm::parse(l, &field, k)).collect::<Result<Vec<_>>>()?;
        FormSubspace::span(&field, k, &forms)
    }
}

/// Evaluation matrix: one row of monomial values per point.
pub fn evaluation_matrix(s: &PointSet) -> Matrix {
    let rows: Vec<Vec<Elem>> = s.iter().map(|p| monomial_vector(p.coords(), s.field())).collect();
    Matrix::from_rows(&rows, num_monomials(s.k()))
}

/// The subspace of all quadratic forms vanishing on every point of `s`.
pub fn vanishing_space(s: &PointSet) -> FormSubspace {
    let ns = evaluation_matrix(s).nullspace(s.field());
    FormSubspace::from_matrix(s.field(), s.k(), &ns).unwrap()
}

/// Number of independent linear conditions `s` imposes on quadratic forms.
pub fn conditions(s: &PointSet) -> usize {
    evaluation_matrix(s).rank(s.field())
}

/// Dual vector of the hyperplane spanned by `k-1` independent vectors.
fn hyperplane_through(vs: &[&[Elem]], k: usize, f: &Field) -> Vec<Elem> {
    let ns = Matrix::from_rows(vs, k).nullspace(f);
    debug_assert_eq!(ns.rows(), 1);
    ns.row(0).to_vec()
}

fn coverable(vectors: &[&[Elem]], k: usize, f: &Field) -> bool {
    let n = vectors.len();
    let full = Matrix::from_rows(vectors, k);
    if full.rank(f) < k || n <= 2 * (k - 1) {
        return true;
    }
    // A covering pair can always be chosen with the hyperplane through the
    // first point spanned by k-1 points of the set.
    let mut seen: HashSet<Vec<Elem>> = HashSet::new();
    let mut chosen: Vec<usize> = vec![0];
    fn rec(
        vectors: &[&[Elem]],
        k: usize,
        f: &Field,
        start: usize,
        chosen: &mut Vec<usize>,
        seen: &mut HashSet<Vec<Elem>>,
    ) -> bool {
        if chosen.len() == k - 1 {
            let basis: Vec<&[Elem]> = chosen.iter().map(|&i| vectors[i]).collect();
            let h = hyperplane_through(&basis, k, f);
            if !seen.insert(h.clone()) {
                return false;
            }
            let rest: Vec<&[Elem]> = vectors.iter().copied().filter(|v| !f.dot(v, &h).is_zero()).collect();
            return rest.is_empty() || Matrix::from_rows(&rest, k).rank(f) < k;
        }
        for i in start..vectors.len() {
            chosen.push(i);
            let basis: Vec<&[Elem]> = chosen.iter().map(|&j| vectors[j]).collect();
            if Matrix::from_rows(&basis, k).rank(f) == chosen.len() && rec(vectors, k, f, i + 1, chosen, seen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    rec(vectors, k, f, 1, &mut chosen, &mut seen)
}

/// Do two hyperplanes exist whose union contains `s`?
pub fn covered_by_two_hyperplanes(s: &PointSet) -> bool {
    let k = s.k();
    let f = s.field();
    let vectors: Vec<&[Elem]> = s.iter().map(|p| p.coords()).collect();
    if vectors.len() <= 2 * (k - 1) {
        return true;
    }
    // A subset that cannot be covered settles the question cheaply.
    let prefix = &vectors[..2 * k - 1];
    if Matrix::from_rows(prefix, k).rank(f) == k && !coverable(prefix, k, f) {
        return false;
    }
    coverable(&vectors, k, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_indices_are_dense() {
        for k in 2..8 {
            for (idx, (i, j)) in monomials(k).into_iter().enumerate() {
                assert_eq!(monomial_index(i, j, k), idx);
                assert_eq!(monomial_index(j, i, k), idx);
            }
        }
    }

    #[test]
    fn eval_examples() {
        let f = Field::new(7, 1).unwrap();
        let x1x2 = QuadraticForm::parse("X1*X2", &f, 4).unwrap();
        assert_eq!(x1x2.eval(&[Elem(1), Elem(1), Elem(0), Elem(0)]), Elem(1));
        let hyp = QuadraticForm::parse("X1*X3 + X2*X4", &f, 4).unwrap();
        assert_eq!(hyp.eval(&[Elem(1), Elem(0), Elem(0), Elem(0)]), Elem(0));
        let q = QuadraticForm::parse("X2^2 - X1*X4", &f, 4).unwrap();
        for x in f.elements() {
            let v = [Elem(1), x, Elem(3), f.mul(x, x)];
            assert!(q.eval(&v).is_zero());
        }
    }

    #[test]
    fn reducibility_examples() {
        let f5 = Field::new(5, 1).unwrap();
        assert!(is_reducible(&QuadraticForm::parse("X1*X2", &f5, 2).unwrap()).unwrap());
        assert!(!is_reducible(&QuadraticForm::parse("X1*X3 + X2*X4", &f5, 4).unwrap()).unwrap());
        let s = QuadraticForm::parse("X1^2 + X2^2", &f5, 2).unwrap();
        assert!(is_reducible(&s).unwrap());
        let prod = QuadraticForm::product(&f5, &[Elem(1), Elem(2)], &[Elem(1), Elem(3)]);
        assert_eq!(prod, s);
        assert_eq!(is_reducible(&QuadraticForm::zero(&f5, 3)).unwrap_err(), Error::ZeroForm);
        let f4 = Field::new(2, 2).unwrap();
        assert!(!is_reducible(&QuadraticForm::parse("X1*X2 + X3^2", &f4, 3).unwrap()).unwrap());
        assert!(is_reducible(&QuadraticForm::parse("X1^2 + X2^2 + z*X3^2", &f4, 3).unwrap()).unwrap());
    }

    #[test]
    fn frame_vanishing_space() {
        let f = Field::new(11, 1).unwrap();
        for k in 3..7 {
            let s = PointSet::standard_frame(&f, k);
            let u = vanishing_space(&s);
            assert_eq!(u.dim(), k * (k - 1) / 2);
            assert_eq!(conditions(&s), k);
            for q in u.forms() {
                for i in 0..k {
                    assert!(q.coeff(i, i).is_zero());
                }
            }
        }
        assert_eq!(conditions(&PointSet::new(&f, 4)), 0);
    }

    #[test]
    fn form_subspace_text_roundtrip() {
        let f = Field::new(3, 2).unwrap();
        let forms = vec![
            QuadraticForm::parse("X2^2 - X1*X4", &f, 4).unwrap(),
            QuadraticForm::parse("z^3*X1*X2 + X3*X4", &f, 4).unwrap(),
        ];
        let u = FormSubspace::span(&f, 4, &forms).unwrap();
        let back = FormSubspace::from_text(&u.to_text(), None).unwrap();
        assert_eq!(back, u);
        assert!(u.contains(&forms[1]));
        assert!(u.intersect(&FormSubspace::span(&f, 4, &forms[..1]).unwrap()).dim() == 1);
    }

    #[test]
    fn covering_small_sets() {
        let f = Field::new(7, 1).unwrap();
        let mut s = PointSet::standard_frame(&f, 4);
        s.insert_vector(vec![Elem(1), Elem(1), Elem(0), Elem(0)]).unwrap();
        s.insert_vector(vec![Elem(0), Elem(0), Elem(1), Elem(1)]).unwrap();
        assert!(covered_by_two_hyperplanes(&s));
        // seven points of a normal rational curve in PG(3,7): an arc
        let nrc = PointSet::from_vectors(
            &f,
            4,
            (0..7u32).map(|t| {
                let t = Elem(t);
                vec![Elem(1), t, f.mul(t, t), f.pow(t, 3)]
            }),
        )
        .unwrap();
        assert!(!covered_by_two_hyperplanes(&nrc));
    }
}
