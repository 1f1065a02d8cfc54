//! Text form of homogeneous polynomials: `X2^2 - X1*X4`, `z^3*X1*X2 + 2*X3^2`.

use crate::error::{Error, Result};
use crate::gf::{Elem, Field};

/// One monomial `coeff * prod X_i^{exps[i]}` (0-based variable indices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: Elem,
    pub exps: Vec<u32>,
}

/// Split at top-level `+`/`-`, keeping the sign with each term. A sign
/// directly after `^` belongs to an exponent.
fn split_terms(text: &str) -> Vec<(bool, String)> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut negative = false;
    let mut prev: Option<char> = None;
    for ch in text.chars() {
        if (ch == '+' || ch == '-') && prev != Some('^') {
            if !cur.trim().is_empty() {
                out.push((negative, cur.trim().to_string()));
                negative = false;
            }
            cur.clear();
            if ch == '-' {
                negative = !negative;
            }
        } else {
            cur.push(ch);
        }
        if !ch.is_whitespace() {
            prev = Some(ch);
        }
    }
    if !cur.trim().is_empty() {
        out.push((negative, cur.trim().to_string()));
    }
    out
}

/// Parse a polynomial in `X1..Xk`. Terms may repeat; they are not merged.
pub fn parse_terms(text: &str, f: &Field, k: usize) -> Result<Vec<Term>> {
    let mut terms = Vec::new();
    for (negative, body) in split_terms(text) {
        let mut coeff = Elem::ONE;
        let mut exps = vec![0u32; k];
        for factor in body.split('*') {
            let factor = factor.trim();
            if factor.is_empty() {
                return Err(Error::Parse(format!("empty factor in `{text}`")));
            }
            if let Some(rest) = factor.strip_prefix('X').or_else(|| factor.strip_prefix('x')) {
                let (var, pow) = match rest.split_once('^') {
                    Some((v, p)) => (v, p.trim()),
                    None => (rest, "1"),
                };
                let var: usize = var.trim().parse().map_err(|_| Error::Parse(format!("bad variable `{factor}`")))?;
                let pow: u32 = pow.parse().map_err(|_| Error::Parse(format!("bad exponent `{factor}`")))?;
                if var == 0 || var > k {
                    return Err(Error::Parse(format!("variable `{factor}` outside X1..X{k}")));
                }
                exps[var - 1] += pow;
            } else {
                coeff = f.mul(coeff, f.parse(factor)?);
            }
        }
        if negative {
            coeff = f.neg(coeff);
        }
        if !coeff.is_zero() {
            terms.push(Term { coeff, exps });
        }
    }
    Ok(terms)
}

/// Render terms as text; the empty polynomial renders as `0`.
pub fn format_monomial_terms(terms: &[Term], f: &Field) -> String {
    let mut out = String::new();
    for t in terms {
        let mono: Vec<String> = t
            .exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { format!("X{}", i + 1) } else { format!("X{}^{}", i + 1, e) })
            .collect();
        let mono = mono.join("*");
        let neg = f.neg(t.coeff);
        // print prime-field coefficients in the balanced range
        let (negative, c) = if f.is_prime_field() && t.coeff.0 > f.q() / 2 {
            (true, neg)
        } else if t.coeff != Elem::ONE && neg == Elem::ONE {
            (true, neg)
        } else {
            (false, t.coeff)
        };
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        if c == Elem::ONE && !mono.is_empty() {
            out.push_str(&mono);
        } else if mono.is_empty() {
            out.push_str(&f.format(c));
        } else {
            out.push_str(&format!("{}*{}", f.format(c), mono));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        let f = Field::new(7, 1).unwrap();
        let t = parse_terms("X2^2 - X1*X4 + 3*X3*X1", &f, 4).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t[1].coeff, Elem(6));
        assert_eq!(format_monomial_terms(&t, &f), "X2^2 - X1*X4 + 3*X1*X3");
        let f9 = Field::new(3, 2).unwrap();
        let t = parse_terms("z^-1*X1^2 - z^3*X2*X3", &f9, 3).unwrap();
        assert_eq!(t[0].coeff, f9.eps_pow(7));
        assert_eq!(t[1].coeff, f9.eps_pow(7));
        assert!(parse_terms("X5*X1", &f, 4).is_err());
        assert_eq!(format_monomial_terms(&[], &f), "0");
    }
}
