//! Exact arithmetic in `F_q` for prime powers `q`.
//!
//! Elements are stored as integer codes: the residue polynomial
//! `c_0 + c_1 X + ... + c_{e-1} X^{e-1}` is encoded as `sum c_i p^i`, so prime
//! field elements are their own least non-negative representative. Fields of
//! order up to `2^16` carry log/antilog and Zech tables; larger fields fall
//! back to direct polynomial arithmetic on the digit vectors.

mod conway;
mod element;
mod poly;

pub use conway::{conway_polynomial, tabled_fields};
pub use element::{ArithOp, FieldElement};
pub use poly::{FactorDegree, Poly};

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest order for which log/antilog/Zech tables are built.
pub const TABLE_LIMIT: u32 = 1 << 16;

const NONE: u32 = u32::MAX;

/// An element of some `F_q`, as its integer code. Meaningless without the
/// [`Field`] it came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn code(self) -> u32 {
        self.0
    }
}

struct Tables {
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
}

struct FieldData {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    eps: Elem,
    tables: Option<Tables>,
}

/// Descriptor of a finite field; cheap to clone and shareable across threads.
#[derive(Clone)]
pub struct Field(Arc<FieldData>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.e == other.0.e && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}", self.q())?;
        if self.degree() > 1 {
            write!(f, ", modulus {:?}", self.0.modulus)?;
        }
        write!(f, ")")
    }
}

/// Serializable summary of a field: order, characteristic and the exact
/// modulus fixing the primitive element.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FieldInfo {
    pub q: u32,
    pub p: u32,
    pub e: u32,
    pub modulus: Vec<u32>,
    pub epsilon: String,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Least positive primitive root modulo the prime `p`.
pub fn least_primitive_root(p: u32) -> u32 {
    if p == 2 {
        return 1;
    }
    let n = (p - 1) as u64;
    let fac = prime_factors(n);
    (2..p)
        .find(|&g| fac.iter().all(|&f| pow_mod(g as u64, n / f, p as u64) != 1))
        .expect("every prime has a primitive root")
}

/// Split `q = p^e`.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let f = prime_factors(q);
    if f.len() != 1 {
        return None;
    }
    let p = f[0];
    let mut e = 0;
    let mut r = q;
    while r > 1 {
        r /= p;
        e += 1;
    }
    Some((p as u32, e))
}

impl Field {
    /// `GF(p^e)` using the embedded Conway polynomial when `e > 1`.
    pub fn new(p: u32, e: u32) -> Result<Field> {
        if e == 0 {
            return Err(Error::InvalidDegree(e));
        }
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if e == 1 {
            return Self::build(p, 1, vec![0, 1], None);
        }
        let modulus = conway_polynomial(p, e).ok_or(Error::UnknownConway { p, e })?;
        Self::build(p, e, modulus.to_vec(), None)
    }

    /// Field of order `q` (a prime power).
    pub fn of_order(q: u64) -> Result<Field> {
        let (p, e) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        Field::new(p, e)
    }

    /// `GF(p^e)` from a user-supplied monic modulus (constant term first).
    /// The residue class of `X` must be primitive.
    pub fn with_modulus(p: u32, modulus: &[u32]) -> Result<Field> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        let e = modulus.len().saturating_sub(1) as u32;
        if e == 0 || modulus[e as usize] != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidParameter("modulus must be monic with coefficients below p".into()));
        }
        if e == 1 {
            return Field::new(p, 1);
        }
        let prime = Field::new(p, 1)?;
        let m = Poly::new(modulus.iter().map(|&c| Elem(c)).collect());
        let degrees = m.factor_degrees(&prime);
        if degrees.len() != 1 || degrees[0].degree != e as usize || degrees[0].multiplicity != 1 {
            return Err(Error::ReducibleModulus(e));
        }
        Self::build(p, e, modulus.to_vec(), Some(()))
    }

    fn build(p: u32, e: u32, modulus: Vec<u32>, check_primitive: Option<()>) -> Result<Field> {
        let q64 = (p as u64).pow(e);
        if q64 > (1u64 << 31) {
            return Err(Error::OrderTooLarge(q64));
        }
        let q = q64 as u32;
        let eps = if e == 1 { Elem(least_primitive_root(p)) } else { Elem(p) };
        let mut data = FieldData { p, e, q, modulus, eps, tables: None };
        if q <= TABLE_LIMIT && q > 2 {
            let mut exp = Vec::with_capacity((q - 1) as usize);
            let mut log = vec![NONE; q as usize];
            let mut x = 1u32;
            for i in 0..q - 1 {
                if log[x as usize] != NONE {
                    // eps has order i < q - 1
                    return Err(Error::NotPrimitive);
                }
                log[x as usize] = i;
                exp.push(x);
                x = data.mul_direct(x, eps.0);
            }
            if x != 1 {
                return Err(Error::NotPrimitive);
            }
            let zech = exp
                .iter()
                .map(|&v| {
                    let s = data.add_direct(1, v);
                    if s == 0 { NONE } else { log[s as usize] }
                })
                .collect();
            data.tables = Some(Tables { exp, log, zech });
        } else if check_primitive.is_some() {
            let n = (q - 1) as u64;
            for f in prime_factors(n) {
                if data.pow_direct(eps.0, n / f) == 1 {
                    return Err(Error::NotPrimitive);
                }
            }
        }
        Ok(Field(Arc::new(data)))
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.0.p
    }
    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.0.p
    }
    #[inline]
    pub fn degree(&self) -> u32 {
        self.0.e
    }
    #[inline]
    pub fn q(&self) -> u32 {
        self.0.q
    }
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }
    pub fn is_prime_field(&self) -> bool {
        self.0.e == 1
    }
    pub fn has_tables(&self) -> bool {
        self.0.tables.is_some()
    }

    pub fn info(&self) -> FieldInfo {
        FieldInfo {
            q: self.q(),
            p: self.p(),
            e: self.degree(),
            modulus: self.0.modulus.clone(),
            epsilon: self.format(self.eps()),
        }
    }

    #[inline]
    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }
    #[inline]
    pub fn one(&self) -> Elem {
        Elem::ONE
    }
    /// The designated primitive element.
    #[inline]
    pub fn eps(&self) -> Elem {
        self.0.eps
    }

    /// Element with code `c`, if in range.
    pub fn elem(&self, c: u32) -> Option<Elem> {
        (c < self.q()).then_some(Elem(c))
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.p() as i64) as u32)
    }

    /// All elements in code order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.q()).map(Elem)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (1..self.q()).map(Elem)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let d = &*self.0;
        if d.e == 1 {
            let s = a.0 as u64 + b.0 as u64;
            let p = d.p as u64;
            return Elem(if s >= p { (s - p) as u32 } else { s as u32 });
        }
        if d.p == 2 {
            return Elem(a.0 ^ b.0);
        }
        match &d.tables {
            Some(t) => {
                if a.0 == 0 {
                    return b;
                }
                if b.0 == 0 {
                    return a;
                }
                let n = d.q - 1;
                let la = t.log[a.0 as usize];
                let lb = t.log[b.0 as usize];
                let diff = if lb >= la { lb - la } else { lb + n - la };
                let z = t.zech[diff as usize];
                if z == NONE {
                    Elem::ZERO
                } else {
                    let s = la + z;
                    Elem(t.exp[(if s >= n { s - n } else { s }) as usize])
                }
            }
            None => Elem(d.add_direct(a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        let d = &*self.0;
        if a.0 == 0 || d.p == 2 {
            return a;
        }
        if d.e == 1 {
            return Elem(d.p - a.0);
        }
        Elem(d.neg_direct(a.0))
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        let d = &*self.0;
        match &d.tables {
            Some(t) => {
                let n = d.q - 1;
                let s = t.log[a.0 as usize] + t.log[b.0 as usize];
                Elem(t.exp[(if s >= n { s - n } else { s }) as usize])
            }
            None if d.e == 1 => Elem((a.0 as u64 * b.0 as u64 % d.p as u64) as u32),
            None => Elem(d.mul_direct(a.0, b.0)),
        }
    }

    /// Multiplication by direct polynomial arithmetic, bypassing the tables.
    pub fn mul_direct(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.0.mul_direct(a.0, b.0))
    }

    /// Addition by digit-wise arithmetic, bypassing the Zech table.
    pub fn add_direct(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.0.add_direct(a.0, b.0))
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let d = &*self.0;
        Ok(match &d.tables {
            Some(t) => {
                let l = t.log[a.0 as usize];
                Elem(t.exp[if l == 0 { 0 } else { (d.q - 1 - l) as usize }])
            }
            None => self.pow(a, (d.q - 2) as u64),
        })
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, mut n: u64) -> Elem {
        if let (Some(t), false) = (&self.0.tables, a.0 == 0) {
            let m = (self.q() - 1) as u64;
            let l = t.log[a.0 as usize] as u64;
            return Elem(t.exp[((l * (n % m)) % m) as usize]);
        }
        let mut r = Elem::ONE;
        let mut b = a;
        while n > 0 {
            if n & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            n >>= 1;
        }
        r
    }

    /// `eps^i`, with `i` reduced modulo `q - 1`.
    pub fn eps_pow(&self, i: i64) -> Elem {
        let n = (self.q() - 1) as i64;
        let i = i.rem_euclid(n) as usize;
        match &self.0.tables {
            Some(t) => Elem(t.exp[i]),
            None => self.pow(self.eps(), i as u64),
        }
    }

    /// Discrete logarithm to base `eps`; `None` for zero.
    pub fn log(&self, a: Elem) -> Option<u32> {
        if a.0 == 0 {
            return None;
        }
        match &self.0.tables {
            Some(t) => Some(t.log[a.0 as usize]),
            None => {
                // only reachable for q = 2 or q > 2^16
                let mut x = Elem::ONE;
                for i in 0..self.q() - 1 {
                    if x == a {
                        return Some(i);
                    }
                    x = self.mul(x, self.eps());
                }
                None
            }
        }
    }

    /// `a^(p^j)`.
    pub fn frobenius(&self, a: Elem, j: u32) -> Elem {
        let j = j % self.degree();
        self.pow(a, (self.p() as u64).pow(j))
    }

    pub fn is_square(&self, a: Elem) -> bool {
        if a.0 == 0 || self.p() == 2 {
            return true;
        }
        self.pow(a, ((self.q() - 1) / 2) as u64) == Elem::ONE
    }

    /// Some square root of `a`, if one exists.
    pub fn sqrt(&self, a: Elem) -> Option<Elem> {
        if a.0 == 0 {
            return Some(a);
        }
        if self.p() == 2 {
            return Some(self.pow(a, (self.q() / 2) as u64));
        }
        let l = self.log(a)?;
        (l % 2 == 0).then(|| self.eps_pow((l / 2) as i64))
    }

    /// Dot product of two equal-length vectors.
    #[inline]
    pub fn dot(&self, a: &[Elem], b: &[Elem]) -> Elem {
        a.iter().zip(b).fold(Elem::ZERO, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }

    /// Textual element format: integers for prime fields, `0`, `1` or `z^i`
    /// otherwise.
    pub fn format(&self, a: Elem) -> String {
        if self.is_prime_field() || a.0 <= 1 {
            return a.0.to_string();
        }
        format!("z^{}", self.log(a).unwrap())
    }

    /// Parse the textual element format. Prime fields also accept negative
    /// integers; extension fields accept `z` as `z^1` and `-lit`.
    pub fn parse(&self, s: &str) -> Result<Elem> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('-') {
            return Ok(self.neg(self.parse(rest)?));
        }
        if let Some(rest) = s.strip_prefix("z") {
            let i: i64 = if rest.is_empty() {
                1
            } else {
                rest.strip_prefix('^')
                    .ok_or_else(|| Error::Parse(format!("bad element literal `{s}`")))?
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent in `{s}`")))?
            };
            return Ok(self.eps_pow(i));
        }
        let n: i64 = s.parse().map_err(|_| Error::Parse(format!("bad element literal `{s}`")))?;
        if self.is_prime_field() {
            Ok(self.from_int(n))
        } else if n == 0 || n == 1 {
            Ok(Elem(n as u32))
        } else {
            Err(Error::Parse(format!("extension field literal must be 0, 1 or z^i, got `{s}`")))
        }
    }
}

impl FieldData {
    fn digits(&self, mut c: u32) -> Vec<u32> {
        let mut v = vec![0; self.e as usize];
        for d in v.iter_mut() {
            *d = c % self.p;
            c /= self.p;
        }
        v
    }

    fn undigits(&self, v: &[u32]) -> u32 {
        v.iter().rev().fold(0u32, |acc, &d| acc * self.p + d)
    }

    fn add_direct(&self, a: u32, b: u32) -> u32 {
        if self.e == 1 {
            return ((a as u64 + b as u64) % self.p as u64) as u32;
        }
        let da = self.digits(a);
        let db = self.digits(b);
        let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        self.undigits(&s)
    }

    fn neg_direct(&self, a: u32) -> u32 {
        let s: Vec<u32> = self.digits(a).iter().map(|&x| (self.p - x) % self.p).collect();
        self.undigits(&s)
    }

    fn mul_direct(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        if self.e == 1 {
            return (a as u64 * b as u64 % p) as u32;
        }
        let e = self.e as usize;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u64; 2 * e - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        // reduce by the monic modulus, top degree down
        for deg in (e..prod.len()).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            for (i, &m) in self.modulus.iter().enumerate().take(e) {
                let idx = deg - e + i;
                prod[idx] = (prod[idx] + (p - c) * m as u64) % p;
            }
            prod[deg] = 0;
        }
        let r: Vec<u32> = prod[..e].iter().map(|&x| x as u32).collect();
        self.undigits(&r)
    }

    fn pow_direct(&self, a: u32, mut n: u64) -> u32 {
        let mut r = 1u32;
        let mut b = a;
        while n > 0 {
            if n & 1 == 1 {
                r = self.mul_direct(r, b);
            }
            b = self.mul_direct(b, b);
            n >>= 1;
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_basics() {
        let f = Field::new(7, 1).unwrap();
        assert_eq!(f.eps(), Elem(3));
        assert_eq!(f.mul(Elem(3), Elem(5)), Elem(1));
        assert_eq!(f.eps_pow(0), Elem::ONE);
        let f11 = Field::new(11, 1).unwrap();
        assert_eq!(f11.eps_pow(10), Elem::ONE);
        assert_eq!(f11.eps(), Elem(2));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(Field::new(2, 0).unwrap_err(), Error::InvalidDegree(0));
        assert_eq!(Field::new(4, 1).unwrap_err(), Error::NotPrime(4));
        assert_eq!(Field::new(17, 5).unwrap_err(), Error::UnknownConway { p: 17, e: 5 });
        assert!(Field::of_order(12).is_err());
    }

    #[test]
    fn f9_epsilon_order() {
        let f = Field::new(3, 2).unwrap();
        let eps = f.eps();
        assert_eq!(f.pow(eps, 8), Elem::ONE);
        assert_eq!(f.eps_pow(4), f.neg(Elem::ONE));
        // exhaustive order check
        let mut x = Elem::ONE;
        for i in 1..8 {
            x = f.mul(x, eps);
            assert_ne!(x, Elem::ONE, "eps^{i} = 1");
        }
        assert_eq!(f.mul(eps, f.eps_pow(7)), Elem::ONE);
        assert_eq!(f.inv(Elem::ZERO), Err(Error::DivisionByZero));
        assert_eq!(f.frobenius(eps, 1), f.eps_pow(3));
    }

    #[test]
    fn text_format_roundtrip() {
        let f = Field::new(3, 2).unwrap();
        for a in f.elements() {
            assert_eq!(f.parse(&f.format(a)).unwrap(), a);
        }
        assert_eq!(f.parse("z").unwrap(), f.eps());
        assert!(f.parse("2").is_err());
        let p = Field::new(13, 1).unwrap();
        assert_eq!(p.parse("-1").unwrap(), Elem(12));
        assert_eq!(p.format(Elem(12)), "12");
    }

    #[test]
    fn user_modulus() {
        // X^2 + X + 2 is primitive over F_3 but is not the Conway polynomial
        let f = Field::with_modulus(3, &[2, 1, 1]).unwrap();
        assert_eq!(f.q(), 9);
        // X^2 + 1 is irreducible but X has order 4
        assert_eq!(Field::with_modulus(3, &[1, 0, 1]).unwrap_err(), Error::NotPrimitive);
        // X^2 - 1 is reducible
        assert_eq!(Field::with_modulus(3, &[2, 0, 1]).unwrap_err(), Error::ReducibleModulus(2));
    }

    #[test]
    fn large_prime_field_without_tables() {
        let f = Field::new(65537, 1).unwrap();
        assert!(!f.has_tables());
        let a = Elem(12345);
        let ai = f.inv(a).unwrap();
        assert_eq!(f.mul(a, ai), Elem::ONE);
        assert_eq!(f.eps(), Elem(3));
    }
}
