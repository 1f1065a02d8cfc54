//! Conway polynomials for the small extension fields used by the tables.
//!
//! Coefficients are listed from the constant term upwards; every entry is
//! monic. With these moduli the residue class of `X` is the same primitive
//! element GAP calls `Z(q)`.

const TABLE: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (2, 6, &[1, 1, 0, 1, 1, 0, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (3, 4, &[2, 0, 0, 2, 1]),
    (5, 2, &[2, 4, 1]),
    (5, 3, &[3, 3, 0, 1]),
    (7, 2, &[3, 6, 1]),
    (11, 2, &[2, 7, 1]),
    (13, 2, &[2, 12, 1]),
];

/// Embedded Conway polynomial for `GF(p^e)`, if tabled.
pub fn conway_polynomial(p: u32, e: u32) -> Option<&'static [u32]> {
    TABLE
        .iter()
        .find(|(tp, te, _)| *tp == p && *te == e)
        .map(|(_, _, c)| *c)
}

/// All `(p, e)` pairs with an embedded polynomial.
pub fn tabled_fields() -> impl Iterator<Item = (u32, u32)> {
    TABLE.iter().map(|(p, e, _)| (*p, *e))
}
