//! Normal rational curve: the `q+1` points and the `C(k-1,2)` forms through them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{Elem, Field};
use crate::projgeom::PointSet;
use crate::quadforms::{FormSubspace, QuadraticForm};

#[derive(Clone, Debug, Serialize)]
pub struct NrcParams {
    pub k: usize,
    pub alphas: Vec<Elem>,
}

impl NrcParams {
    /// `alpha_i` = the first `k` element codes `0, 1, .., k-1`.
    pub fn standard(f: &Field, k: usize) -> Result<NrcParams> {
        let p = NrcParams { k, alphas: (0..k as u32).map(Elem).collect() };
        p.validate(f)?;
        Ok(p)
    }

    pub fn validate(&self, f: &Field) -> Result<()> {
        let k = self.k;
        if k < 2 || self.alphas.len() != k {
            return Err(Error::InvalidParameter(format!("need k >= 2 and exactly k alphas, got k={k}")));
        }
        let needed = (2 * k - 2) as u32;
        if f.q() < needed || (self.alphas.iter().any(|a| a.0 >= f.q())) {
            return Err(Error::FieldTooSmall { q: f.q(), needed });
        }
        for i in 0..k {
            for j in i + 1..k {
                if self.alphas[i] == self.alphas[j] {
                    return Err(Error::AlphasNotDistinct);
                }
            }
        }
        Ok(())
    }
}

/// `(alpha_i - alpha_j) X_i X_j + (alpha_1 - alpha_i) X_1 X_i + (alpha_j - alpha_1) X_1 X_j`
/// for `2 <= i < j <= k`.
pub fn nrc_forms(p: &NrcParams, f: &Field) -> Result<FormSubspace> {
    p.validate(f)?;
    let k = p.k;
    let a = &p.alphas;
    let mut forms = Vec::new();
    for i in 1..k {
        for j in i + 1..k {
            forms.push(QuadraticForm::from_terms(
                f,
                k,
                &[(i, j, f.sub(a[i], a[j])), (0, i, f.sub(a[0], a[i])), (0, j, f.sub(a[j], a[0]))],
            ));
        }
    }
    FormSubspace::span(f, k, &forms)
}

/// `(1/(t - alpha_1), .., 1/(t - alpha_k))` for `t` outside the alphas, then
/// `e_1, .., e_k` and `(1, .., 1)`.
pub fn nrc_points(p: &NrcParams, f: &Field) -> Result<PointSet> {
    p.validate(f)?;
    let k = p.k;
    let mut s = PointSet::new(f, k);
    for t in f.elements() {
        if p.alphas.contains(&t) {
            continue;
        }
        let v = p.alphas.iter().map(|&a| f.inv(f.sub(t, a))).collect::<Result<Vec<_>>>()?;
        s.insert_vector(v)?;
    }
    for i in 0..k {
        s.insert(crate::projgeom::ProjPoint::basis(k, i))?;
    }
    s.insert_vector(vec![Elem::ONE; k])?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variety::solve_pruned;

    #[test]
    fn nrc_k5_q11() {
        let f = Field::new(11, 1).unwrap();
        let p = NrcParams::standard(&f, 5).unwrap();
        let u = nrc_forms(&p, &f).unwrap();
        assert_eq!(u.dim(), 6);
        let pts = nrc_points(&p, &f).unwrap();
        assert_eq!(pts.len(), 12);
        assert!(solve_pruned(&u).points.same_points(&pts));
    }

    #[test]
    fn parameter_errors() {
        let f = Field::new(7, 1).unwrap();
        assert_eq!(NrcParams::standard(&f, 5).unwrap_err(), Error::FieldTooSmall { q: 7, needed: 8 });
        let bad = NrcParams { k: 3, alphas: vec![Elem(1), Elem(2), Elem(1)] };
        assert_eq!(nrc_forms(&bad, &f).unwrap_err(), Error::AlphasNotDistinct);
        let f8 = Field::new(2, 3).unwrap();
        assert_eq!(nrc_points(&NrcParams::standard(&f8, 5).unwrap(), &f8).unwrap().len(), 9);
    }
}
