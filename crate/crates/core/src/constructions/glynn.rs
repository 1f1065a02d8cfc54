//! The five-form family whose variety is Glynn's track in characteristic 3
//! and a normal rational curve otherwise.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{Elem, Field};
use crate::projgeom::{Matrix, PointSet, ProjPoint};
use crate::quadforms::{FormSubspace, QuadraticForm};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GlynnParams {
    pub e: Elem,
    pub c: Option<Elem>,
    pub d: Option<Elem>,
}

impl GlynnParams {
    pub fn from_e(e: Elem) -> GlynnParams {
        GlynnParams { e, c: None, d: None }
    }

    /// Characteristic-3 parameters for a given `d`: `e = -d`, `c = -d - 1`.
    pub fn char3(d: Elem, f: &Field) -> Result<GlynnParams> {
        if f.characteristic() != 3 {
            return Err(Error::InvalidParameter("this branch needs characteristic 3".into()));
        }
        let g = GlynnParams { e: f.neg(d), c: Some(f.sub(f.neg(d), Elem::ONE)), d: Some(d) };
        g.validate(f)?;
        Ok(g)
    }

    pub fn validate(&self, f: &Field) -> Result<()> {
        if f.mul(self.e, self.e) == Elem::ONE {
            return Err(Error::InvalidParameter(format!("e^2 = 1 for e = {}", f.format(self.e))));
        }
        Ok(())
    }

    /// The side conditions `cd != 0`, `c^2 != d^2`, `c^2 != 1`, `d^2 != 1`.
    pub fn generic(&self, f: &Field) -> bool {
        match (self.c, self.d) {
            (Some(c), Some(d)) => {
                let (c2, d2) = (f.mul(c, c), f.mul(d, d));
                !c.is_zero() && !d.is_zero() && c2 != d2 && c2 != Elem::ONE && d2 != Elem::ONE
            }
            _ => false,
        }
    }
}

/// Terms `sum plus - e * sum minus` over 1-based index pairs.
fn plus_minus(f: &Field, e: Elem, plus: [(usize, usize); 3], minus: [(usize, usize); 3]) -> QuadraticForm {
    let me = f.neg(e);
    let mut terms: Vec<(usize, usize, Elem)> = plus.iter().map(|&(i, j)| (i - 1, j - 1, Elem::ONE)).collect();
    terms.extend(minus.iter().map(|&(i, j)| (i - 1, j - 1, me)));
    QuadraticForm::from_terms(f, 5, &terms)
}

/// The five generators, in their published order.
pub fn glynn_generators(g: &GlynnParams, f: &Field) -> Result<Vec<QuadraticForm>> {
    g.validate(f)?;
    let e = g.e;
    Ok(vec![
        plus_minus(f, e, [(2, 5), (5, 4), (2, 3)], [(4, 3), (2, 4), (3, 5)]),
        plus_minus(f, e, [(2, 4), (5, 4), (2, 1)], [(4, 1), (2, 5), (1, 5)]),
        plus_minus(f, e, [(3, 5), (1, 5), (2, 3)], [(2, 5), (1, 3), (1, 2)]),
        plus_minus(f, e, [(1, 3), (3, 4), (1, 5)], [(3, 5), (1, 4), (5, 4)]),
        plus_minus(f, e, [(1, 4), (1, 2), (4, 3)], [(1, 3), (2, 4), (3, 2)]),
    ])
}

pub fn glynn_forms(g: &GlynnParams, f: &Field) -> Result<FormSubspace> {
    FormSubspace::span(f, 5, &glynn_generators(g, f)?)
}

/// The three conditions for `(c, d, 1, 1, d)` to lie on every generator.
pub fn point_conditions(c: Elem, d: Elem, e: Elem, f: &Field) -> [Elem; 3] {
    let one = Elem::ONE;
    let two = f.from_int(2);
    let cd = f.mul(c, d);
    [
        f.sub(f.add(f.mul(d, d), f.mul(two, d)), f.mul(e, f.add(one, f.mul(two, d)))),
        f.sub(f.add(f.mul(two, d), cd), f.mul(e, f.add(f.add(c, f.mul(d, d)), cd))),
        f.sub(f.add(f.add(c, one), cd), f.mul(e, f.add(f.mul(two, d), c))),
    ]
}

/// All admissible parameter sets over `f`: in characteristic 3 one per
/// `d` with `d^2 != 1`; otherwise one per root of `d^2 + 3d + 1`.
pub fn glynn_solve(f: &Field) -> Result<Vec<GlynnParams>> {
    let mut out = Vec::new();
    if f.characteristic() == 3 {
        for d in f.elements() {
            if f.mul(d, d) != Elem::ONE {
                out.push(GlynnParams::char3(d, f)?);
            }
        }
        return Ok(out);
    }
    let (one, two, three) = (Elem::ONE, f.from_int(2), f.from_int(3));
    for d in f.elements() {
        if !f.add(f.add(f.mul(d, d), f.mul(three, d)), one).is_zero() {
            continue;
        }
        let Ok(e) = f.div(f.add(f.mul(d, d), f.mul(two, d)), f.add(one, f.mul(two, d))) else { continue };
        let Ok(c) = f.div(f.sub(f.mul(two, f.mul(d, e)), one), f.sub(f.add(one, d), e)) else { continue };
        let g = GlynnParams { e, c: Some(c), d: Some(d) };
        if g.validate(f).is_ok() && point_conditions(c, d, e, f).iter().all(|x| x.is_zero()) {
            out.push(g);
        }
    }
    if out.is_empty() {
        return Err(Error::NoSolution(format!(
            "no admissible (c, d, e) over F_{}: d^2 + 3d + 1 has no root giving e^2 != 1",
            f.q()
        )));
    }
    Ok(out)
}

/// `(c,d,1,1,d)` and its images under the 5-cycle.
pub fn orbit_points(g: &GlynnParams, f: &Field) -> Result<Vec<ProjPoint>> {
    let (Some(c), Some(d)) = (g.c, g.d) else {
        return Err(Error::InvalidParameter("c and d are required for the orbit points".into()));
    };
    let one = Elem::ONE;
    let rows = [[c, d, one, one, d], [d, c, d, one, one], [one, d, c, d, one], [one, one, d, c, d], [d, one, one, d, c]];
    rows.iter().map(|r| ProjPoint::new(r.to_vec(), f)).collect()
}

/// The points the construction is known to contain: the basis vectors, the
/// orbit of `(c,d,1,1,d)`, and `(1,1,1,1,1)` in characteristic 3.
pub fn listed_points(g: &GlynnParams, f: &Field) -> Result<PointSet> {
    let mut s = PointSet::standard_frame(f, 5);
    if f.characteristic() == 3 {
        s.insert_vector(vec![Elem::ONE; 5])?;
    }
    for p in orbit_points(g, f)? {
        s.insert(p)?;
    }
    Ok(s)
}

/// Names of the six forms `q_45, q_34, q_23, q_24, q_25, q_35`.
pub const Q_NAMES: [&str; 6] = ["q45", "q34", "q23", "q24", "q25", "q35"];

pub fn q_forms(e: Elem, f: &Field) -> Vec<QuadraticForm> {
    let one = Elem::ONE;
    let fe = f.add(one, e);
    let mfe = f.neg(fe);
    let ge = f.add(f.from_int(2), e);
    let t = |terms: &[(usize, usize, Elem)]| {
        let z: Vec<_> = terms.iter().map(|&(i, j, c)| (i - 1, j - 1, c)).collect();
        QuadraticForm::from_terms(f, 5, &z)
    };
    vec![
        t(&[(1, 2, one), (1, 3, mfe), (2, 3, one)]),
        t(&[(1, 2, one), (1, 5, one), (2, 5, mfe)]),
        t(&[(1, 4, mfe), (1, 5, one), (4, 5, one)]),
        t(&[(1, 3, one), (1, 5, ge), (3, 5, one)]),
        t(&[(1, 3, one), (1, 4, one), (3, 4, ge)]),
        t(&[(1, 2, ge), (1, 4, one), (2, 4, one)]),
    ]
}

/// The published coefficients expressing each generator in the `q` basis.
/// The factor written `(q+1)` is read as the field element `q + 1 = 1`.
fn claimed_combinations(e: Elem, f: &Field) -> [[Elem; 6]; 5] {
    let (z, one) = (Elem::ZERO, Elem::ONE);
    let m1 = f.neg(one);
    let me = f.neg(e);
    let e1 = f.add(e, one);
    let e2 = f.add(e, f.from_int(2));
    let qp1 = f.add(f.from_int(f.q() as i64), one);
    [
        [one, f.neg(e2), one, m1, f.add(f.mul(f.from_int(2), e), one), me],
        [z, e1, z, one, z, one],
        [one, f.neg(e1), z, one, z, z],
        [z, z, me, me, qp1, z],
        [me, z, z, z, e1, me],
    ]
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum IdentityStatus {
    Exact,
    /// The combination equals a nonzero multiple of the generator.
    UpToScalar { factor: String },
    /// The claim fails; these coefficients do express the generator.
    Corrected { coefficients: Vec<String> },
    NotInSpan,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub generator: usize,
    pub claimed: Vec<String>,
    #[serde(flatten)]
    pub status: IdentityStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateReport {
    pub e: String,
    pub q_forms: Vec<String>,
    pub q_rank: usize,
    pub identities: Vec<IdentityCheck>,
}

impl CertificateReport {
    pub fn all_exact(&self) -> bool {
        self.identities.iter().all(|i| matches!(i.status, IdentityStatus::Exact))
    }
}

/// Checks every claimed identity by coefficient comparison and solves for
/// the true coefficients where a claim fails.
pub fn glynn_certificates(g: &GlynnParams, f: &Field) -> Result<CertificateReport> {
    if f.characteristic() == 3 {
        return Err(Error::InvalidParameter("certificates apply outside characteristic 3".into()));
    }
    let gens = glynn_generators(g, f)?;
    let qs = q_forms(g.e, f);
    let qm = Matrix::from_rows(&qs.iter().map(|q| q.coeffs().to_vec()).collect::<Vec<_>>(), 15);
    let qt = qm.transpose();
    let fmt = |v: &[Elem]| v.iter().map(|&c| f.format(c)).collect::<Vec<_>>();
    let mut identities = Vec::new();
    for (idx, (gen, claim)) in gens.iter().zip(claimed_combinations(g.e, f)).enumerate() {
        let combo = qt.mul_vec(&claim, f);
        let status = if combo == gen.coeffs() {
            IdentityStatus::Exact
        } else if let Some(lambda) = scalar_multiple(&combo, gen.coeffs(), f) {
            IdentityStatus::UpToScalar { factor: f.format(lambda) }
        } else {
            match qt.solve(gen.coeffs(), f) {
                Some(sol) => IdentityStatus::Corrected { coefficients: fmt(&sol) },
                None => IdentityStatus::NotInSpan,
            }
        };
        identities.push(IdentityCheck { generator: idx + 1, claimed: fmt(&claim), status });
    }
    Ok(CertificateReport {
        e: f.format(g.e),
        q_forms: qs.iter().map(|q| q.to_string()).collect(),
        q_rank: qm.rank(f),
        identities,
    })
}

/// `lambda` with `a = lambda * b`, `lambda != 0`, when one exists.
fn scalar_multiple(a: &[Elem], b: &[Elem], f: &Field) -> Option<Elem> {
    let i = b.iter().position(|c| !c.is_zero())?;
    let lambda = f.div(a[i], b[i]).ok()?;
    if lambda.is_zero() {
        return None;
    }
    a.iter().zip(b).all(|(&x, &y)| x == f.mul(lambda, y)).then_some(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variety::solve_pruned;

    #[test]
    fn char3_solutions_contain_listed_points() {
        let f = Field::new(3, 2).unwrap();
        let sols = glynn_solve(&f).unwrap();
        assert_eq!(sols.len(), 7);
        for g in &sols {
            let u = glynn_forms(g, &f).unwrap();
            assert_eq!(u.dim(), 5);
            let (c, d) = (g.c.unwrap(), g.d.unwrap());
            assert!(point_conditions(c, d, g.e, &f).iter().all(|x| x.is_zero()));
            for p in &listed_points(g, &f).unwrap() {
                assert!(u.annihilates(p.coords()));
            }
        }
    }

    #[test]
    fn char5_has_no_solution() {
        assert!(matches!(glynn_solve(&Field::new(5, 1).unwrap()), Err(Error::NoSolution(_))));
        assert!(matches!(glynn_solve(&Field::new(7, 1).unwrap()), Err(Error::NoSolution(_))));
    }

    #[test]
    fn q11_branch_gives_twelve_points() {
        let f = Field::new(11, 1).unwrap();
        let sols = glynn_solve(&f).unwrap();
        assert!(!sols.is_empty());
        for g in &sols {
            let v = solve_pruned(&glynn_forms(g, &f).unwrap());
            assert_eq!(v.len(), 12);
            let qs = q_forms(g.e, &f);
            for p in &v.points {
                assert!(qs.iter().all(|q| q.eval(p.coords()).is_zero()));
            }
        }
    }

    #[test]
    fn certificates_over_f11() {
        let f = Field::new(11, 1).unwrap();
        for g in glynn_solve(&f).unwrap() {
            let r = glynn_certificates(&g, &f).unwrap();
            assert_eq!(r.q_rank, 6);
            let exact: Vec<bool> = r.identities.iter().map(|i| matches!(i.status, IdentityStatus::Exact)).collect();
            assert_eq!(exact, [false, false, true, false, true]);
            let gens = glynn_generators(&g, &f).unwrap();
            let qs = q_forms(g.e, &f);
            for (gen, id) in gens.iter().zip(&r.identities) {
                let IdentityStatus::Corrected { coefficients } = &id.status else { continue };
                let combo = coefficients.iter().zip(&qs).fold(QuadraticForm::zero(&f, 5), |acc, (c, q)| {
                    acc.add(&q.scale(f.parse(c).unwrap()))
                });
                assert_eq!(&combo, gen);
            }
            // the fourth coefficient is e + 1
            let IdentityStatus::Corrected { coefficients } = &r.identities[3].status else { panic!() };
            assert_eq!(f.parse(&coefficients[4]).unwrap(), f.add(g.e, Elem::ONE));
        }
    }
}
