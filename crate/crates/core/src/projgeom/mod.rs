//! Points, point sets and exact linear algebra in `PG(k-1, q)`.

mod matrix;

use std::collections::HashMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gf::{Elem, Field};

pub use matrix::{in_row_space, Matrix};

/// Default cap on the number of points a full enumeration may visit.
pub const DEFAULT_ENUM_BUDGET: u64 = 200_000_000;

/// Environment variable overriding [`DEFAULT_ENUM_BUDGET`].
pub const BUDGET_ENV: &str = "QUADVAR_ENUM_BUDGET";

pub fn enumeration_budget() -> u64 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_ENUM_BUDGET)
}

/// `(q^k - 1)/(q - 1)`.
pub fn point_count(k: usize, q: u32) -> u128 {
    let q = q as u128;
    (0..k).fold(0u128, |acc, _| acc.saturating_mul(q).saturating_add(1))
}

pub fn check_budget(needed: u128) -> Result<()> {
    let budget = enumeration_budget();
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// A projective point, normalised so that its first nonzero coordinate is 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    coords: Vec<Elem>,
}

impl ProjPoint {
    pub fn new(coords: Vec<Elem>, f: &Field) -> Result<ProjPoint> {
        let mut coords = coords;
        normalize_in_place(&mut coords, f)?;
        Ok(ProjPoint { coords })
    }

    /// Wrap coordinates that are already normalised.
    pub fn from_normalized(coords: Vec<Elem>) -> ProjPoint {
        debug_assert!(coords.iter().find(|c| !c.is_zero()) == Some(&Elem::ONE));
        ProjPoint { coords }
    }

    /// Basis point `e_i` (0-based).
    pub fn basis(k: usize, i: usize) -> ProjPoint {
        let mut coords = vec![Elem::ZERO; k];
        coords[i] = Elem::ONE;
        ProjPoint { coords }
    }

    #[inline]
    pub fn coords(&self) -> &[Elem] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Elem> {
        self.coords
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.coords.len()
    }

    pub fn format(&self, f: &Field) -> String {
        let parts: Vec<String> = self.coords.iter().map(|&c| f.format(c)).collect();
        format!("({})", parts.join(","))
    }

    pub fn parse(s: &str, f: &Field) -> Result<ProjPoint> {
        let s = s.trim();
        let inner = s
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("point must be parenthesised: `{s}`")))?;
        let coords = inner.split(',').map(|t| f.parse(t)).collect::<Result<Vec<_>>>()?;
        if coords.len() < 2 {
            return Err(Error::Parse(format!("point needs at least two coordinates: `{s}`")));
        }
        ProjPoint::new(coords, f)
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let codes: Vec<u32> = self.coords.iter().map(|c| c.0).collect();
        write!(f, "P{codes:?}")
    }
}

impl Serialize for ProjPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords.serialize(s)
    }
}

/// Scale `v` so its first nonzero entry is 1.
pub fn normalize_in_place(v: &mut [Elem], f: &Field) -> Result<()> {
    let lead = v.iter().copied().find(|c| !c.is_zero()).ok_or(Error::ZeroVector)?;
    if lead != Elem::ONE {
        let inv = f.inv(lead)?;
        for c in v.iter_mut() {
            *c = f.mul(*c, inv);
        }
    }
    Ok(())
}

/// Duplicate-free ordered set of points of `PG(k-1, q)` with a membership index.
#[derive(Clone)]
pub struct PointSet {
    field: Field,
    k: usize,
    points: Vec<ProjPoint>,
    index: HashMap<ProjPoint, usize>,
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PointSet")
            .field("q", &self.field.q())
            .field("k", &self.k)
            .field("points", &self.points)
            .finish()
    }
}

impl PartialEq for PointSet {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.k == other.k && self.points == other.points
    }
}

impl PointSet {
    pub fn new(field: &Field, k: usize) -> PointSet {
        assert!(k >= 2, "projective space needs k >= 2");
        PointSet { field: field.clone(), k, points: Vec::new(), index: HashMap::new() }
    }

    /// Build from raw coordinate vectors, normalising and dropping duplicates.
    pub fn from_vectors<I>(field: &Field, k: usize, vectors: I) -> Result<PointSet>
    where
        I: IntoIterator<Item = Vec<Elem>>,
    {
        let mut s = PointSet::new(field, k);
        for v in vectors {
            s.insert_vector(v)?;
        }
        Ok(s)
    }

    pub fn from_points<I: IntoIterator<Item = ProjPoint>>(field: &Field, k: usize, pts: I) -> Result<PointSet> {
        let mut s = PointSet::new(field, k);
        for p in pts {
            s.insert(p)?;
        }
        Ok(s)
    }

    /// The basis points `e_1, ..., e_k`.
    pub fn standard_frame(field: &Field, k: usize) -> PointSet {
        let mut s = PointSet::new(field, k);
        for i in 0..k {
            s.insert(ProjPoint::basis(k, i)).unwrap();
        }
        s
    }

    /// Insert a point; returns `Ok(false)` if already present.
    pub fn insert(&mut self, p: ProjPoint) -> Result<bool> {
        if p.k() != self.k {
            return Err(Error::AmbientMismatch { expected: self.k, found: p.k() });
        }
        if self.index.contains_key(&p) {
            return Ok(false);
        }
        self.index.insert(p.clone(), self.points.len());
        self.points.push(p);
        Ok(true)
    }

    pub fn insert_vector(&mut self, v: Vec<Elem>) -> Result<bool> {
        if v.len() != self.k {
            return Err(Error::AmbientMismatch { expected: self.k, found: v.len() });
        }
        let p = ProjPoint::new(v, &self.field)?;
        self.insert(p)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }
    pub fn iter(&self) -> std::slice::Iter<'_, ProjPoint> {
        self.points.iter()
    }
    pub fn contains(&self, p: &ProjPoint) -> bool {
        self.index.contains_key(p)
    }
    pub fn position(&self, p: &ProjPoint) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Does the set contain the point spanned by `v` (any nonzero scaling)?
    pub fn contains_vector(&self, v: &[Elem]) -> bool {
        ProjPoint::new(v.to_vec(), &self.field).map(|p| self.contains(&p)).unwrap_or(false)
    }

    /// Matrix whose rows are the point coordinates.
    pub fn matrix(&self) -> Matrix {
        Matrix::from_rows(&self.points.iter().map(|p| p.coords()).collect::<Vec<_>>(), self.k)
    }

    /// Same points, sorted by coordinate codes.
    pub fn sorted(&self) -> PointSet {
        let mut pts = self.points.clone();
        pts.sort();
        PointSet::from_points(&self.field, self.k, pts).unwrap()
    }

    /// Set equality ignoring order.
    pub fn same_points(&self, other: &PointSet) -> bool {
        self.k == other.k
            && self.field == other.field
            && self.len() == other.len()
            && self.points.iter().all(|p| other.contains(p))
    }

    /// Text file form: `#` header lines carrying `q` and `k`, then one point
    /// per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("# q={}\n# k={}\n", self.field.q(), self.k);
        if !self.field.is_prime_field() {
            let m: Vec<String> = self.field.modulus().iter().map(|c| c.to_string()).collect();
            out.push_str(&format!("# modulus={}\n", m.join(",")));
        }
        for p in &self.points {
            out.push_str(&p.format(&self.field));
            out.push('\n');
        }
        out
    }

    /// Parse the text file form. The field comes from the `q` header (and
    /// optional `modulus` header) unless `field` is supplied.
    pub fn from_text(text: &str, field: Option<&Field>) -> Result<PointSet> {
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
                    if let Some((key, val)) = tok.split_once('=') {
                        let bad = || Error::Parse(format!("bad header value `{tok}`"));
                        match key {
                            "q" => q = Some(val.parse().map_err(|_| bad())?),
                            "k" => k = Some(val.parse().map_err(|_| bad())?),
                            "modulus" => {
                                modulus = Some(
                                    val.split(',').map(|c| c.parse().map_err(|_| bad())).collect::<Result<_>>()?,
                                )
                            }
                            _ => {}
                        }
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
        let points = body.iter().map(|l| ProjPoint::parse(l, &field)).collect::<Result<Vec<_>>>()?;
        let k = match k {
            Some(k) => k,
            None => points.first().map(|p| p.k()).ok_or_else(|| Error::Parse("missing `# k=` header".into()))?,
        };
        PointSet::from_points(&field, k, points)
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a ProjPoint;
    type IntoIter = std::slice::Iter<'a, ProjPoint>;
    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

impl Serialize for PointSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let text: Vec<String> = self.points.iter().map(|p| p.format(&self.field)).collect();
        text.serialize(s)
    }
}

/// Rank of the span of the points.
pub fn span_dim(s: &PointSet) -> usize {
    s.matrix().rank(s.field())
}

/// Rank of a list of coordinate vectors.
pub fn rank_of<R: AsRef<[Elem]>>(vs: &[R], k: usize, f: &Field) -> usize {
    Matrix::from_rows(vs, k).rank(f)
}

/// Iterator over the normalised points of `PG(k-1, q)` whose leading 1 sits
/// in one of the positions `lead_from..lead_to`.
#[derive(Clone)]
pub struct PointIter {
    k: usize,
    q: u32,
    lead: usize,
    lead_to: usize,
    digits: Vec<u32>,
    done: bool,
}

impl PointIter {
    fn new(k: usize, q: u32, lead_from: usize, lead_to: usize) -> PointIter {
        PointIter {
            k,
            q,
            lead: lead_from,
            lead_to,
            digits: vec![0; k.saturating_sub(lead_from + 1)],
            done: lead_from >= lead_to,
        }
    }
}

impl Iterator for PointIter {
    type Item = Vec<Elem>;

    fn next(&mut self) -> Option<Vec<Elem>> {
        if self.done {
            return None;
        }
        let mut v = vec![Elem::ZERO; self.k];
        v[self.lead] = Elem::ONE;
        for (i, &d) in self.digits.iter().enumerate() {
            v[self.lead + 1 + i] = Elem(d);
        }
        // advance the odometer, last coordinate fastest
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.lead += 1;
                if self.lead >= self.lead_to {
                    self.done = true;
                } else {
                    self.digits = vec![0; self.k - self.lead - 1];
                }
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < self.q {
                break;
            }
            self.digits[i] = 0;
        }
        Some(v)
    }
}

/// All points of `PG(k-1, q)`, leading-1 position ascending, then the
/// remaining coordinates lexicographically by code.
pub fn enumerate_points(k: usize, f: &Field) -> Result<PointIter> {
    check_budget(point_count(k, f.q()))?;
    Ok(PointIter::new(k, f.q(), 0, k))
}

/// Points whose first nonzero coordinate is at `lead`; these blocks partition
/// the space and can be scanned independently.
pub fn points_with_lead(k: usize, f: &Field, lead: usize) -> PointIter {
    PointIter::new(k, f.q(), lead, lead + 1)
}

/// Every hyperplane once, as a normalised dual vector.
pub fn hyperplanes(k: usize, f: &Field) -> Result<PointIter> {
    enumerate_points(k, f)
}

/// Number of points of `s` on the hyperplane with dual vector `h`.
pub fn hyperplane_count(s: &PointSet, h: &[Elem]) -> usize {
    let f = s.field();
    s.iter().filter(|p| f.dot(p.coords(), h).is_zero()).count()
}
