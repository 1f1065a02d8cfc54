//! Coordinate permutation groups, invariant lines and circulant matrices.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{Elem, Field, Poly};
use crate::projgeom::{check_budget, enumerate_points, normalize_in_place, point_count, Matrix, PointSet, ProjPoint};

/// A permutation of `{0, .., k-1}` stored as its image list.
pub type Perm = Vec<usize>;

fn compose(a: &[usize], b: &[usize]) -> Perm {
    // apply b first, then a
    b.iter().map(|&i| a[i]).collect()
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&i| i < p.len() && !std::mem::replace(&mut seen[i], true))
}

/// Cycle notation with 1-based points, e.g. `(1,2,3,4,5)` or `(3,4)(2,5)`.
pub fn format_perm(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for s in 0..p.len() {
        if seen[s] || p[s] == s {
            continue;
        }
        let mut cyc = Vec::new();
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            cyc.push((i + 1).to_string());
            i = p[i];
        }
        out.push_str(&format!("({})", cyc.join(",")));
    }
    if out.is_empty() {
        out.push_str("()");
    }
    out
}

/// Parse cycle notation on `k` points. Cycles without commas are read digit
/// by digit, so `(34)(25)(1)` works for `k <= 9`.
pub fn parse_perm(s: &str, k: usize) -> Result<Perm> {
    let mut p: Perm = (0..k).collect();
    let s = s.trim();
    let mut rest = s;
    while !rest.is_empty() {
        let open = rest.find('(').ok_or_else(|| Error::Parse(format!("bad cycle notation `{s}`")))?;
        if !rest[..open].trim().is_empty() {
            return Err(Error::Parse(format!("bad cycle notation `{s}`")));
        }
        let close = rest.find(')').ok_or_else(|| Error::Parse(format!("unclosed cycle in `{s}`")))?;
        let body = rest[open + 1..close].trim();
        let pts: Vec<&str> = if body.contains(',') {
            body.split(',').map(str::trim).collect()
        } else if body.contains(' ') {
            body.split_whitespace().collect()
        } else {
            (0..body.len()).map(|i| &body[i..i + 1]).collect()
        };
        let pts: Vec<usize> = pts
            .iter()
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().map_err(|_| Error::Parse(format!("bad point `{t}` in `{s}`"))))
            .collect::<Result<_>>()?;
        for &x in &pts {
            if x == 0 || x > k {
                return Err(Error::Parse(format!("point {x} outside 1..{k} in `{s}`")));
            }
        }
        let mut cycle: Perm = (0..k).collect();
        for w in 0..pts.len() {
            cycle[pts[w] - 1] = pts[(w + 1) % pts.len()] - 1;
        }
        if !is_permutation(&cycle) {
            return Err(Error::Parse(format!("repeated point in cycle of `{s}`")));
        }
        // products act left to right, as in GAP
        p = compose(&cycle, &p);
        rest = rest[close + 1..].trim_start();
    }
    Ok(p)
}

/// A permutation group on coordinates, with its elements expanded.
#[derive(Clone)]
pub struct PermGroup {
    k: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators.iter().map(|g| format_perm(g)).collect();
        write!(f, "PermGroup(k={}, order={}, <{}>)", self.k, self.elements.len(), gens.join(", "))
    }
}

impl PermGroup {
    pub fn new(k: usize, generators: Vec<Perm>) -> Result<PermGroup> {
        for g in &generators {
            if g.len() != k || !is_permutation(g) {
                return Err(Error::InvalidParameter(format!("not a permutation of {k} points: {g:?}")));
            }
        }
        let id: Perm = (0..k).collect();
        let mut seen: HashSet<Perm> = HashSet::from([id.clone()]);
        let mut elements = vec![id.clone()];
        let mut queue = VecDeque::from([id]);
        while let Some(e) = queue.pop_front() {
            for g in &generators {
                let n = compose(g, &e);
                if seen.insert(n.clone()) {
                    elements.push(n.clone());
                    queue.push_back(n);
                }
            }
        }
        Ok(PermGroup { k, generators, elements })
    }

    /// `<sigma>` with `sigma = (1,2,...,k)`.
    pub fn cyclic(k: usize) -> PermGroup {
        PermGroup::new(k, vec![shift(k)]).unwrap()
    }

    /// `<sigma, rho>` with `rho: i -> 2 - i (mod k)` in 1-based labels, the
    /// reflection fixing coordinate 1.
    pub fn dihedral(k: usize) -> PermGroup {
        PermGroup::new(k, vec![shift(k), reflection(k)]).unwrap()
    }

    pub fn trivial(k: usize) -> PermGroup {
        PermGroup::new(k, vec![]).unwrap()
    }

    /// `cyclic:k`, `dihedral:k`, or `k:` followed by `;`-separated
    /// generators in cycle notation.
    pub fn parse(spec: &str) -> Result<PermGroup> {
        let spec = spec.trim();
        let (kind, arg) = spec.split_once(':').ok_or_else(|| Error::Parse(format!("bad group `{spec}`")))?;
        match kind.trim() {
            "cyclic" | "dihedral" | "trivial" => {
                let k: usize = arg.trim().parse().map_err(|_| Error::Parse(format!("bad degree in `{spec}`")))?;
                if k < 2 {
                    return Err(Error::InvalidParameter("group degree must be at least 2".into()));
                }
                Ok(match kind.trim() {
                    "cyclic" => PermGroup::cyclic(k),
                    "dihedral" => PermGroup::dihedral(k),
                    _ => PermGroup::trivial(k),
                })
            }
            k => {
                let k: usize = k.parse().map_err(|_| Error::Parse(format!("bad group `{spec}`")))?;
                let gens = arg.split(';').filter(|g| !g.trim().is_empty()).map(|g| parse_perm(g, k)).collect::<Result<_>>()?;
                PermGroup::new(k, gens)
            }
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }
    pub fn order(&self) -> usize {
        self.elements.len()
    }
    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }
    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }
}

/// `sigma = (1,2,...,k)`: coordinate `i` moves to `i+1`.
pub fn shift(k: usize) -> Perm {
    (0..k).map(|i| (i + 1) % k).collect()
}

/// `i -> -i (mod k)` on 0-based labels.
pub fn reflection(k: usize) -> Perm {
    (0..k).map(|i| (k - i) % k).collect()
}

/// Permutation matrix action: coordinate `i` of `x` moves to position `g(i)`.
pub fn apply(g: &[usize], x: &[Elem]) -> Vec<Elem> {
    let mut out = vec![Elem::ZERO; x.len()];
    for (i, &gi) in g.iter().enumerate() {
        out[gi] = x[i];
    }
    out
}

/// Orbit of a point, in order of first appearance over the group elements.
pub fn orbit(g: &PermGroup, x: &ProjPoint, f: &Field) -> PointSet {
    let mut s = PointSet::new(f, g.k());
    for e in g.elements() {
        s.insert(ProjPoint::new(apply(e, x.coords()), f).unwrap()).unwrap();
    }
    s
}

fn perm_matrix_minus_identity(g: &[usize], f: &Field) -> Matrix {
    let k = g.len();
    let mut m = Matrix::zeros(k, k);
    for i in 0..k {
        // (P v)_{g(i)} = v_i
        m.set(g[i], i, f.add(m.get(g[i], i), Elem::ONE));
        m.set(i, i, f.sub(m.get(i, i), Elem::ONE));
    }
    m
}

/// Dimension of the space of vectors fixed by every generator.
pub fn fixed_subspace_dim(g: &PermGroup, f: &Field) -> usize {
    let k = g.k();
    let mut rows: Vec<Vec<Elem>> = Vec::new();
    for gen in g.generators() {
        rows.extend(perm_matrix_minus_identity(gen, f).row_vecs());
    }
    k - Matrix::from_rows(&rows, k).rank(f)
}

/// Is the span of `basis` mapped into itself by every generator?
pub fn subspace_invariant(g: &PermGroup, basis: &[Vec<Elem>], f: &Field) -> bool {
    let k = g.k();
    let r = Matrix::from_rows(basis, k).rank(f);
    g.generators().iter().all(|gen| {
        let mut rows = basis.to_vec();
        rows.extend(basis.iter().map(|v| apply(gen, v)));
        Matrix::from_rows(&rows, k).rank(f) == r
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineSearch {
    /// invariant planes of a k-cycle from the divisors of `X^k - 1`
    CyclicModule,
    /// scan of all point orbits
    OrbitScan,
}

#[derive(Clone, Debug, Serialize)]
pub struct LineFixReport {
    pub fixes_no_line: bool,
    /// two spanning vectors of an invariant line, if one exists
    pub witness: Option<[Vec<Elem>; 2]>,
    pub method: LineSearch,
    pub fixed_subspace_dim: usize,
}

/// Coordinates visited by a k-cycle starting at 0.
fn cycle_order(g: &[usize]) -> Option<Vec<usize>> {
    let k = g.len();
    let mut order = vec![0];
    let mut i = g[0];
    while i != 0 {
        order.push(i);
        i = g[i];
    }
    (order.len() == k).then_some(order)
}

/// Monic quadratic divisors of `X^k - 1` built from its factorisation.
pub fn quadratic_divisors(k: usize, f: &Field) -> Vec<Poly> {
    let factors = Poly::x_pow_minus_one(k, f).factor(f);
    let mut out = Vec::new();
    let linear: Vec<&(Poly, usize)> = factors.iter().filter(|(p, _)| p.degree() == Some(1)).collect();
    for (p, m) in &factors {
        if p.degree() == Some(2) {
            out.push(p.clone());
        }
        if p.degree() == Some(1) && *m >= 2 {
            out.push(p.mul(p, f));
        }
    }
    for a in 0..linear.len() {
        for b in a + 1..linear.len() {
            out.push(linear[a].0.mul(&linear[b].0, f));
        }
    }
    out.sort_by(|a, b| a.coeffs().cmp(b.coeffs()));
    out
}

/// Kernel of `h(sigma)` for a k-cycle `sigma`, in original coordinates.
fn cyclic_kernel(h: &Poly, order: &[usize], f: &Field) -> Vec<Vec<Elem>> {
    let k = order.len();
    // in cycle coordinates sigma is the shift S e_t = e_{t+1}
    let mut m = Matrix::zeros(k, k);
    for (d, &c) in h.coeffs().iter().enumerate() {
        for t in 0..k {
            let r = (t + d) % k;
            m.set(r, t, f.add(m.get(r, t), c));
        }
    }
    let ns = m.nullspace(f);
    ns.row_vecs()
        .into_iter()
        .map(|v| {
            let mut w = vec![Elem::ZERO; k];
            for (t, &c) in order.iter().enumerate() {
                w[c] = v[t];
            }
            w
        })
        .collect()
}

/// Decide whether `g` leaves some line of `PG(k-1, q)` invariant.
pub fn fixes_no_line(g: &PermGroup, f: &Field) -> Result<LineFixReport> {
    let k = g.k();
    let fixed_dim = fixed_subspace_dim(g, f);
    let cyc = g.generators().iter().find_map(|gen| cycle_order(gen));
    if let Some(order) = cyc {
        for h in quadratic_divisors(k, f) {
            let basis = cyclic_kernel(&h, &order, f);
            debug_assert_eq!(basis.len(), 2);
            if subspace_invariant(g, &basis, f) {
                return Ok(LineFixReport {
                    fixes_no_line: false,
                    witness: Some([basis[0].clone(), basis[1].clone()]),
                    method: LineSearch::CyclicModule,
                    fixed_subspace_dim: fixed_dim,
                });
            }
        }
        return Ok(LineFixReport {
            fixes_no_line: true,
            witness: None,
            method: LineSearch::CyclicModule,
            fixed_subspace_dim: fixed_dim,
        });
    }
    let witness = orbit_scan(g, f)?;
    Ok(LineFixReport { fixes_no_line: witness.is_none(), witness, method: LineSearch::OrbitScan, fixed_subspace_dim: fixed_dim })
}

/// A line is invariant iff some orbit spans a plane, or at least two points
/// are fixed projectively (every point on an invariant line with no
/// plane-spanning orbit is fixed).
fn orbit_scan(g: &PermGroup, f: &Field) -> Result<Option<[Vec<Elem>; 2]>> {
    let k = g.k();
    check_budget(point_count(k, f.q()))?;
    let mut fixed: Vec<Vec<Elem>> = Vec::new();
    for x in enumerate_points(k, f)? {
        let mut span = vec![x.clone()];
        let mut rank = 1;
        for e in g.elements() {
            let y = apply(e, &x);
            span.push(y);
            rank = Matrix::from_rows(&span, k).rank(f);
            if rank > 2 {
                break;
            }
            if rank == 1 {
                span.pop();
            }
        }
        match rank {
            1 => {
                fixed.push(x);
                if fixed.len() == 2 {
                    return Ok(Some([fixed[0].clone(), fixed[1].clone()]));
                }
            }
            2 => return Ok(Some([span[0].clone(), span[1].clone()])),
            _ => {}
        }
    }
    Ok(None)
}

/// Brute-force line invariance: every line of the space, each visited once
/// as a reduced echelon pair, checked directly. Meant for validating
/// [`fixes_no_line`] on small cases.
pub fn invariant_lines_exhaustive(g: &PermGroup, f: &Field) -> Result<Vec<[Vec<Elem>; 2]>> {
    let k = g.k();
    check_budget(point_count(k, f.q()).saturating_mul(point_count(k - 1, f.q())))?;
    let q = f.q();
    let mut out = Vec::new();
    for p1 in 0..k {
        for p2 in p1 + 1..k {
            // free slots: row 1 after p1 except p2, row 2 after p2
            let free1: Vec<usize> = (p1 + 1..k).filter(|&c| c != p2).collect();
            let free2: Vec<usize> = (p2 + 1..k).collect();
            let slots = free1.len() + free2.len();
            let mut digits = vec![0u32; slots];
            loop {
                let mut r1 = vec![Elem::ZERO; k];
                let mut r2 = vec![Elem::ZERO; k];
                r1[p1] = Elem::ONE;
                r2[p2] = Elem::ONE;
                for (i, &c) in free1.iter().enumerate() {
                    r1[c] = Elem(digits[i]);
                }
                for (i, &c) in free2.iter().enumerate() {
                    r2[c] = Elem(digits[free1.len() + i]);
                }
                let basis = [r1, r2];
                if subspace_invariant(g, &basis, f) {
                    out.push(basis);
                }
                let mut i = 0;
                while i < slots {
                    digits[i] += 1;
                    if digits[i] < q {
                        break;
                    }
                    digits[i] = 0;
                    i += 1;
                }
                if i == slots {
                    break;
                }
            }
        }
    }
    Ok(out)
}

/// A `k x k` circulant: row `r` is the first row shifted right `r` times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circulant {
    row: Vec<Elem>,
}

impl Circulant {
    pub fn new(row: Vec<Elem>) -> Result<Circulant> {
        if row.len() < 2 {
            return Err(Error::InvalidParameter("circulant needs k >= 2".into()));
        }
        Ok(Circulant { row })
    }

    pub fn row(&self) -> &[Elem] {
        &self.row
    }
    pub fn k(&self) -> usize {
        self.row.len()
    }

    /// `M[r][c] = x[(c - r) mod k]`.
    pub fn matrix(&self) -> Matrix {
        let k = self.k();
        let mut m = Matrix::zeros(k, k);
        for r in 0..k {
            for c in 0..k {
                m.set(r, c, self.row[(c + k - r) % k]);
            }
        }
        m
    }

    /// `x_1 + x_2 X + ... + x_k X^{k-1}`.
    pub fn polynomial(&self) -> Poly {
        Poly::new(self.row.clone())
    }
}

/// `k - deg gcd(x(X), X^k - 1)`.
pub fn circulant_rank(c: &Circulant, f: &Field) -> usize {
    let g = c.polynomial().gcd(&Poly::x_pow_minus_one(c.k(), f), f).unwrap();
    let rank = c.k() - g.degree().unwrap();
    debug_assert_eq!(rank, c.matrix().rank(f));
    rank
}

/// The same formula with `1 - X^{k-1}` in place of `X^k - 1`; kept for
/// comparison, it does not give the rank in general.
pub fn circulant_rank_with_one_minus_x_pow(c: &Circulant, f: &Field) -> usize {
    let k = c.k();
    let mut m = vec![Elem::ZERO; k];
    m[0] = Elem::ONE;
    m[k - 1] = f.neg(Elem::ONE);
    let g = c.polynomial().gcd(&Poly::new(m), f).unwrap();
    k.saturating_sub(g.degree().unwrap())
}

/// Inverse circulant. A nonzero `y` with `sum_i x_i y_{i+j} = 0` for
/// `j = 1..k-1` gives `M * N^T = (x.y) I` for `N = circ(y)`, so the inverse
/// has first row `(y_1, y_k, ..., y_2) / (x.y)`.
pub fn circulant_inverse(c: &Circulant, f: &Field) -> Result<Circulant> {
    let k = c.k();
    if circulant_rank(c, f) < k {
        return Err(Error::Singular);
    }
    let y = correlation_solution(c, f)?;
    let s = f.inv(f.dot(&c.row, &y))?;
    let mut row = vec![Elem::ZERO; k];
    for i in 0..k {
        row[i] = f.mul(y[(k - i) % k], s);
    }
    Ok(Circulant { row })
}

/// The normalised solution `y` of `sum_i x_i y_{i+j} = 0`, `j = 1..k-1`.
pub fn correlation_solution(c: &Circulant, f: &Field) -> Result<Vec<Elem>> {
    let k = c.k();
    let mut m = Matrix::zeros(k - 1, k);
    for j in 1..k {
        for i in 0..k {
            let col = (i + j) % k;
            m.set(j - 1, col, f.add(m.get(j - 1, col), c.row[i]));
        }
    }
    let ns = m.nullspace(f);
    if ns.rows() != 1 {
        return Err(Error::Singular);
    }
    let mut y = ns.row(0).to_vec();
    normalize_in_place(&mut y, f)?;
    Ok(y)
}
