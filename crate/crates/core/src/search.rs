//! Search over symmetric circulant seeds: the frame `e_1..e_k` together with
//! the cyclic shifts of a palindromic row `(1, a, b, .., b, a)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{classify, is_arc, Verdict};
use crate::error::{Error, Result};
use crate::fitting::{conjecture_check, FitOptions};
use crate::gf::{Elem, Field};
use crate::projgeom::{PointSet, ProjPoint};
use crate::quadforms::{vanishing_space, FormSubspace};
use crate::symmetry::{apply, circulant_inverse, fixes_no_line, orbit, reflection, shift, Circulant, PermGroup};
use crate::variety::solve_pruned;

/// `(1, s_1, .., s_h, s_h, .., s_1)` for odd `k = 2h + 1`.
pub fn palindrome(k: usize, half: &[Elem]) -> Result<Vec<Elem>> {
    if k % 2 == 0 || half.len() != k / 2 {
        return Err(Error::InvalidParameter(format!("need odd k and {} seed entries, got k={k}, {}", k / 2, half.len())));
    }
    let mut row = vec![Elem::ONE];
    row.extend_from_slice(half);
    row.extend(half.iter().rev());
    Ok(row)
}

/// `{e_1, .., e_k}` followed by the distinct shifts of the palindromic row.
pub fn seed_to_candidate(k: usize, f: &Field, half: &[Elem]) -> std::result::Result<PointSet, String> {
    let row = palindrome(k, half).map_err(|e| e.to_string())?;
    let mut s = PointSet::standard_frame(f, k);
    let sigma = shift(k);
    let mut orbit = PointSet::new(f, k);
    let mut v = row;
    for _ in 0..k {
        v = apply(&sigma, &v);
        orbit.insert(ProjPoint::new(v.clone(), f).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    }
    if orbit.len() < k {
        return Err(format!("degenerate orbit of {} points", orbit.len()));
    }
    for p in orbit.iter() {
        if !s.insert(p.clone()).map_err(|e| e.to_string())? {
            return Err("orbit meets the frame".into());
        }
    }
    if !is_arc(&s) {
        return Err("not an arc".into());
    }
    Ok(s)
}

/// Half of the palindromic first row of `M^{-1}`, scaled to lead with 1.
pub fn inverse_seed(k: usize, f: &Field, half: &[Elem]) -> Result<Vec<Elem>> {
    let inv = circulant_inverse(&Circulant::new(palindrome(k, half)?)?, f)?;
    let lead = inv.row()[0];
    if lead.is_zero() {
        return Err(Error::InvalidParameter("inverse circulant has zero leading entry".into()));
    }
    let s = f.inv(lead)?;
    Ok(inv.row()[1..=k / 2].iter().map(|&x| f.mul(x, s)).collect())
}

/// Seed of the candidate after the coordinate permutation `i -> m i (mod k)`
/// for a unit `m`; maps the frame to itself.
pub fn multiplier_seed(k: usize, half: &[Elem], m: usize) -> Result<Vec<Elem>> {
    let row = palindrome(k, half)?;
    let mut out = vec![Elem::ZERO; k];
    for (i, &x) in row.iter().enumerate() {
        out[(m * i) % k] = x;
    }
    Ok(out[1..=k / 2].to_vec())
}

/// Seeds projectively equivalent to `half` through inversion and the
/// multipliers, `half` first.
pub fn equivalent_seeds(k: usize, f: &Field, half: &[Elem]) -> Result<Vec<Vec<Elem>>> {
    let mut bases = vec![half.to_vec()];
    if let Ok(inv) = inverse_seed(k, f, half) {
        bases.push(inv);
    }
    let mut out: Vec<Vec<Elem>> = Vec::new();
    for b in &bases {
        for m in (1..k).filter(|&m| gcd(m, k) == 1) {
            let s = multiplier_seed(k, b, m)?;
            if !out.contains(&s) {
                out.push(s);
            }
        }
    }
    Ok(out)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// `log_eps` of each entry; `None` for zero.
pub fn exponents(f: &Field, v: &[Elem]) -> Vec<Option<u32>> {
    v.iter().map(|&x| f.log(x)).collect()
}

fn exp_key(e: &[Option<u32>]) -> Vec<u32> {
    e.iter().map(|x| x.unwrap_or(u32::MAX)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchRow {
    pub q: u32,
    pub k: usize,
    pub seed_exp: Vec<Option<u32>>,
    pub inverse_exp: Option<Vec<Option<u32>>>,
    pub self_paired: bool,
    pub dim_u: usize,
    pub size_v: usize,
    pub verdict: Verdict,
    pub max_hyperplane: usize,
    /// Sizes of the dihedral orbits partitioning `V(U)`, descending.
    pub orbit_sizes: Vec<usize>,
    /// `dim U = C(k-1, 2)`, as for a normal rational curve.
    pub nrc_dim: bool,
    pub dihedral_invariant: bool,
    pub fixes_no_line: bool,
    /// Two-quadric projection test over all `(k-4)`-subsets of `V(U)`.
    pub conjecture: Option<bool>,
    /// Cubic test after one further projection.
    pub cubic: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Minimum `|V(U)|`; `None` means `q + 1`.
    pub threshold: Option<usize>,
    pub conjecture: bool,
    pub fit: FitOptions,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { threshold: None, conjecture: true, fit: FitOptions::default() }
    }
}

/// Builds the row for an accepted candidate, or the reason it was dropped.
pub fn process_candidate(
    k: usize,
    f: &Field,
    half: &[Elem],
    a: &PointSet,
    opts: &SearchOptions,
    group_fixes_no_line: bool,
) -> std::result::Result<SearchRow, String> {
    let u = vanishing_space(a);
    let c2 = (k - 1) * (k - 2) / 2;
    if u.dim() + 1 < c2 {
        return Err(format!("dim U = {} below {}", u.dim(), c2 - 1));
    }
    let v = solve_pruned(&u);
    let threshold = opts.threshold.unwrap_or(f.q() as usize + 1);
    if v.len() < threshold {
        return Err(format!("|V(U)| = {} below {threshold}", v.len()));
    }
    let cl = classify(&v.points).map_err(|e| e.to_string())?;
    let inverse = inverse_seed(k, f, half).ok();
    let (conjecture, cubic) = if opts.conjecture && k >= 5 {
        match conjecture_check(&v.points, Some(&u), &opts.fit) {
            Ok(r) => (Some(r.all_pass), r.cubic_all_pass),
            Err(_) => (None, None),
        }
    } else {
        (None, None)
    };
    Ok(SearchRow {
        q: f.q(),
        k,
        seed_exp: exponents(f, half),
        self_paired: inverse.as_deref() == Some(half),
        inverse_exp: inverse.map(|i| exponents(f, &i)),
        dim_u: u.dim(),
        size_v: v.len(),
        verdict: cl.verdict,
        max_hyperplane: cl.max_hyperplane_count,
        orbit_sizes: orbit_sizes(&v.points),
        nrc_dim: u.dim() == c2,
        dihedral_invariant: dihedral_invariant(&u),
        fixes_no_line: group_fixes_no_line,
        conjecture,
        cubic,
    })
}

fn orbit_sizes(s: &PointSet) -> Vec<usize> {
    let g = PermGroup::dihedral(s.k());
    let mut seen = PointSet::new(s.field(), s.k());
    let mut sizes = Vec::new();
    for p in s.iter() {
        if seen.contains(p) {
            continue;
        }
        let o = orbit(&g, p, s.field());
        sizes.push(o.len());
        for x in o.iter() {
            seen.insert(x.clone()).unwrap();
        }
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

fn dihedral_invariant(u: &FormSubspace) -> bool {
    let k = u.k();
    u.fixed_by(&shift(k)) && u.fixed_by(&reflection(k))
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SearchStats {
    pub seeds: usize,
    pub candidates: usize,
    pub above_threshold: usize,
    pub rows: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub rows: Vec<SearchRow>,
    pub stats: SearchStats,
}

/// Every seed with nonzero entries, split by the exponent of `a` across
/// workers. Of each class of [`equivalent_seeds`] only the seed with the
/// smallest exponents is kept, its inverse recorded in `inverse_exp`.
pub fn search_grid(k: usize, f: &Field, opts: &SearchOptions) -> Result<SearchResult> {
    if k != 5 && k != 7 {
        return Err(Error::InvalidParameter(format!("search supports k = 5 or 7, got {k}")));
    }
    let h = k / 2;
    let n = f.q() - 1;
    let no_line = fixes_no_line(&PermGroup::dihedral(k), f)?.fixes_no_line;
    let per_a: Vec<(usize, usize, Vec<SearchRow>)> = (0..n)
        .into_par_iter()
        .map(|a| {
            let (mut seeds, mut cands, mut rows) = (0, 0, Vec::new());
            let mut rest = vec![0u32; h - 1];
            loop {
                seeds += 1;
                let half: Vec<Elem> =
                    std::iter::once(a).chain(rest.iter().copied()).map(|e| f.eps_pow(e as i64)).collect();
                if let Ok(cand) = seed_to_candidate(k, f, &half) {
                    cands += 1;
                    if let Ok(row) = process_candidate(k, f, &half, &cand, opts, no_line) {
                        rows.push(row);
                    }
                }
                let mut i = rest.len();
                loop {
                    if i == 0 {
                        return (seeds, cands, rows);
                    }
                    i -= 1;
                    rest[i] += 1;
                    if rest[i] < n {
                        break;
                    }
                    rest[i] = 0;
                }
            }
        })
        .collect();
    let mut stats = SearchStats::default();
    let mut all = Vec::new();
    for (s, c, r) in per_a {
        stats.seeds += s;
        stats.candidates += c;
        all.extend(r);
    }
    stats.above_threshold = all.len();
    let keys: std::collections::BTreeSet<Vec<u32>> = all.iter().map(|r| exp_key(&r.seed_exp)).collect();
    let rows: Vec<SearchRow> = all
        .into_iter()
        .filter(|r| {
            let own = exp_key(&r.seed_exp);
            let half: Vec<Elem> = r.seed_exp.iter().map(|e| e.map_or(Elem::ZERO, |i| f.eps_pow(i as i64))).collect();
            equivalent_seeds(k, f, &half)
                .map(|eq| eq.iter().map(|s| exp_key(&exponents(f, s))).all(|key| key >= own || !keys.contains(&key)))
                .unwrap_or(true)
        })
        .collect();
    stats.rows = rows.len();
    Ok(SearchResult { rows, stats })
}

/// Exponent list as `e^i` / `0`.
pub fn format_exponents(e: &[Option<u32>]) -> String {
    e.iter().map(|x| x.map_or("0".to_string(), |i| format!("e^{i}"))).collect::<Vec<_>>().join(",")
}

/// An expected table row: `(q, seed, inverse, dim U, |V(U)|, verdict)`.
#[derive(Clone, Copy, Debug)]
pub struct ExpectedRow {
    pub q: u32,
    pub seed: &'static [u32],
    pub inverse: &'static [u32],
    pub dim_u: usize,
    pub size_v: usize,
    pub verdict: Verdict,
}

const fn row(q: u32, seed: &'static [u32], inverse: &'static [u32], dim_u: usize, size_v: usize, arc: bool) -> ExpectedRow {
    ExpectedRow { q, seed, inverse, dim_u, size_v, verdict: if arc { Verdict::Arc } else { Verdict::Track } }
}

pub const EXPECTED_K5: &[ExpectedRow] = &[
    row(9, &[1, 6], &[3, 2], 5, 11, false),
    row(9, &[5, 7], &[5, 7], 6, 10, true),
    row(11, &[3, 4], &[3, 4], 6, 12, true),
    row(13, &[3, 8], &[8, 3], 5, 15, false),
    row(13, &[4, 9], &[7, 5], 5, 15, false),
    row(19, &[12, 17], &[12, 17], 6, 20, true),
    row(29, &[7, 9], &[7, 9], 6, 30, true),
    row(29, &[8, 17], &[17, 8], 5, 35, false),
    row(29, &[9, 19], &[20, 11], 5, 35, false),
    row(31, &[1, 25], &[21, 4], 5, 35, false),
    row(31, &[3, 5], &[11, 23], 5, 35, false),
    row(31, &[5, 28], &[5, 28], 6, 32, true),
    row(31, &[5, 29], &[9, 20], 5, 35, false),
    row(31, &[7, 19], &[12, 22], 5, 35, false),
    row(31, &[8, 18], &[27, 25], 5, 35, false),
    row(31, &[9, 26], &[10, 21], 5, 35, false),
    row(41, &[7, 25], &[7, 25], 6, 42, true),
    row(47, &[3, 22], &[20, 41], 5, 55, false),
    row(47, &[5, 26], &[27, 29], 5, 55, false),
    row(47, &[17, 19], &[43, 24], 5, 55, false),
    row(49, &[9, 43], &[42, 30], 5, 55, false),
    row(49, &[10, 19], &[22, 37], 5, 55, false),
    row(49, &[11, 26], &[30, 36], 5, 55, false),
    row(49, &[12, 18], &[38, 29], 5, 55, false),
    row(49, &[13, 15], &[18, 6], 5, 55, false),
    row(49, &[13, 43], &[13, 43], 6, 50, true),
];

pub const EXPECTED_K7: &[ExpectedRow] = &[
    row(13, &[2, 10, 3], &[2, 10, 3], 15, 14, true),
    row(23, &[1, 8, 2], &[6, 21, 9], 14, 21, false),
    row(23, &[1, 13, 16], &[9, 15, 17], 14, 21, false),
    row(23, &[5, 13, 7], &[21, 14, 20], 14, 21, false),
    row(25, &[1, 19, 11], &[11, 13, 8], 14, 21, false),
    row(25, &[1, 17, 19], &[3, 9, 2], 14, 21, false),
    row(25, &[7, 8, 17], &[1, 15, 22], 14, 21, false),
    row(25, &[7, 5, 23], &[16, 7, 17], 14, 21, false),
    row(25, &[13, 11, 16], &[14, 6, 3], 14, 21, false),
    row(27, &[11, 21, 7], &[11, 21, 7], 15, 28, true),
    row(29, &[17, 18, 24], &[17, 18, 24], 15, 30, true),
    row(41, &[1, 3, 34], &[1, 3, 34], 15, 42, true),
    row(43, &[1, 30, 8], &[1, 30, 8], 15, 44, true),
    row(43, &[1, 32, 27], &[20, 15, 34], 14, 49, false),
    row(43, &[7, 19, 25], &[15, 41, 10], 14, 49, false),
    row(43, &[8, 22, 27], &[35, 23, 17], 14, 49, false),
    row(47, &[2, 15, 7], &[12, 3, 38], 14, 49, false),
    row(47, &[4, 6, 31], &[17, 25, 36], 14, 49, false),
    row(47, &[5, 7, 25], &[29, 16, 41], 14, 49, false),
    row(47, &[5, 13, 19], &[15, 42, 40], 14, 49, false),
    row(47, &[5, 17, 30], &[30, 22, 37], 14, 49, false),
    row(47, &[8, 34, 43], &[15, 36, 12], 14, 49, false),
    row(47, &[9, 16, 24], &[39, 21, 41], 14, 49, false),
    row(47, &[10, 29, 21], &[41, 33, 27], 14, 49, false),
    row(47, &[10, 34, 31], &[44, 31, 39], 14, 49, false),
    row(49, &[2, 43, 39], &[44, 18, 16], 14, 49, false),
    row(49, &[4, 30, 32], &[6, 25, 23], 14, 49, false),
    row(49, &[5, 9, 46], &[23, 25, 42], 14, 49, false),
];

pub fn expected_rows(k: usize, q: u32) -> Vec<ExpectedRow> {
    let table = if k == 5 { EXPECTED_K5 } else { EXPECTED_K7 };
    table.iter().filter(|r| r.q == q).copied().collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct TableDiff {
    pub k: usize,
    pub q: u32,
    pub matched: usize,
    pub expected: usize,
    /// Expected rows absent from the output, formatted.
    pub missing: Vec<String>,
    /// Emitted rows not in the table, or differing in some column.
    pub unexpected: Vec<String>,
}

impl TableDiff {
    pub fn ok(&self) -> bool {
        self.missing.is_empty() && self.unexpected.is_empty()
    }
}

fn same_exponents(got: &[Option<u32>], want: &[u32]) -> bool {
    got.len() == want.len() && got.iter().zip(want).all(|(g, w)| *g == Some(*w))
}

fn matches(r: &SearchRow, e: &ExpectedRow) -> bool {
    same_exponents(&r.seed_exp, e.seed)
        && r.inverse_exp.as_deref().is_some_and(|i| same_exponents(i, e.inverse))
        && r.dim_u == e.dim_u
        && r.size_v == e.size_v
        && r.verdict == e.verdict
}

pub fn describe_row(r: &SearchRow) -> String {
    format!(
        "q={} ({}) <-> ({}) dimU={} |V|={} {}",
        r.q,
        format_exponents(&r.seed_exp),
        r.inverse_exp.as_deref().map_or("-".into(), format_exponents),
        r.dim_u,
        r.size_v,
        r.verdict
    )
}

fn describe_expected(e: &ExpectedRow) -> String {
    let fmt = |v: &[u32]| v.iter().map(|i| format!("e^{i}")).collect::<Vec<_>>().join(",");
    format!("q={} ({}) <-> ({}) dimU={} |V|={} {}", e.q, fmt(e.seed), fmt(e.inverse), e.dim_u, e.size_v, e.verdict)
}

pub fn compare_with_table(k: usize, q: u32, rows: &[SearchRow]) -> TableDiff {
    let expected = expected_rows(k, q);
    let missing: Vec<String> =
        expected.iter().filter(|e| !rows.iter().any(|r| matches(r, e))).map(describe_expected).collect();
    let unexpected: Vec<String> =
        rows.iter().filter(|r| !expected.iter().any(|e| matches(r, e))).map(describe_row).collect();
    TableDiff { k, q, matched: expected.len() - missing.len(), expected: expected.len(), missing, unexpected }
}

/// CSV header for `k`.
pub fn csv_header(k: usize) -> Vec<String> {
    let names = ["a", "b", "c"];
    let mut h = vec!["q".to_string()];
    h.extend(names[..k / 2].iter().map(|n| format!("{n}_exp")));
    h.extend(names[..k / 2].iter().map(|n| format!("{n}'_exp")));
    h.extend(["dimU", "sizeV", "verdict", "conjecture"].map(String::from));
    h
}

pub fn csv_record(r: &SearchRow) -> Vec<String> {
    let e = |x: &Option<u32>| x.map_or("0".into(), |i| i.to_string());
    let mut rec = vec![r.q.to_string()];
    rec.extend(r.seed_exp.iter().map(e));
    match &r.inverse_exp {
        Some(inv) => rec.extend(inv.iter().map(e)),
        None => rec.extend(std::iter::repeat("-".to_string()).take(r.seed_exp.len())),
    }
    rec.push(r.dim_u.to_string());
    rec.push(r.size_v.to_string());
    rec.push(r.verdict.to_string());
    rec.push(match r.conjecture {
        Some(true) => "pass".into(),
        Some(false) => "fail".into(),
        None => "-".into(),
    });
    rec
}
