//! Common zero loci `V(U)` of subspaces of quadratic forms.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::gf::{Elem, Field};
use crate::projgeom::{check_budget, enumerate_points, point_count, PointSet, ProjPoint};
use crate::quadforms::{monomials, FormSubspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMethod {
    Naive,
    Pruned,
}

/// The points of `PG(k-1, q)` on which every form of `source` vanishes,
/// sorted by coordinate codes.
#[derive(Clone, Debug)]
pub struct Variety {
    pub source: FormSubspace,
    pub points: PointSet,
    pub method: SolveMethod,
}

impl Variety {
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn member(v: &Variety, x: &ProjPoint) -> bool {
    v.points.contains(x)
}

fn sorted_set(field: &Field, k: usize, mut pts: Vec<Vec<Elem>>) -> PointSet {
    pts.sort();
    PointSet::from_points(field, k, pts.into_iter().map(ProjPoint::from_normalized)).unwrap()
}

/// Filter every point of the space through the basis forms.
pub fn solve_naive(u: &FormSubspace) -> Result<Variety> {
    let f = u.field();
    let k = u.k();
    let forms = u.forms();
    let pts: Vec<Vec<Elem>> = enumerate_points(k, f)?.filter(|x| forms.iter().all(|q| q.eval(x).is_zero())).collect();
    Ok(Variety { source: u.clone(), points: sorted_set(f, k, pts), method: SolveMethod::Naive })
}

/// Basis form as a list of nonzero terms.
struct SparseForm {
    terms: Vec<(usize, usize, Elem)>,
}

impl SparseForm {
    #[inline]
    fn eval(&self, x: &[Elem], f: &Field) -> Elem {
        self.terms.iter().fold(Elem::ZERO, |acc, &(i, j, c)| f.add(acc, f.mul(c, f.mul(x[i], x[j]))))
    }
}

/// Search plan for the chart where coordinate `lead` is 1 and earlier ones 0.
struct ChartPlan {
    lead: usize,
    order: Vec<usize>,
    /// forms to check once `order[..=d]` is assigned, indexed by `d`
    checks: Vec<Vec<usize>>,
    /// a form is nonzero on the whole chart
    empty: bool,
}

fn plan_chart(forms: &[SparseForm], k: usize, lead: usize, f: &Field) -> ChartPlan {
    // restrict to the chart: terms touching earlier coordinates vanish
    let supports: Vec<Vec<usize>> = forms
        .iter()
        .map(|q| {
            let mut s: Vec<usize> = q
                .terms
                .iter()
                .filter(|&&(i, j, _)| i >= lead && j >= lead)
                .flat_map(|&(i, j, _)| [i, j])
                .filter(|&v| v != lead)
                .collect();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    let live: Vec<bool> = forms.iter().map(|q| q.terms.iter().any(|&(i, j, _)| i >= lead && j >= lead)).collect();
    let mut assigned = vec![false; k];
    let mut order = Vec::new();
    let mut remaining: Vec<usize> = (lead + 1..k).collect();
    while !remaining.is_empty() {
        let best = *remaining
            .iter()
            .max_by_key(|&&v| {
                let done = supports
                    .iter()
                    .zip(&live)
                    .filter(|(s, &l)| l && s.iter().all(|&w| assigned[w] || w == v))
                    .count();
                (done, std::cmp::Reverse(v))
            })
            .unwrap();
        assigned[best] = true;
        order.push(best);
        remaining.retain(|&v| v != best);
    }
    let mut checks = vec![Vec::new(); order.len().max(1)];
    let mut empty = false;
    let mut x = vec![Elem::ZERO; k];
    x[lead] = Elem::ONE;
    for (fi, s) in supports.iter().enumerate() {
        if !live[fi] {
            continue;
        }
        if s.is_empty() {
            // only the X_lead^2 term survives
            if !forms[fi].eval(&x, f).is_zero() {
                empty = true;
            }
            continue;
        }
        let depth = s.iter().map(|v| order.iter().position(|w| w == v).unwrap()).max().unwrap();
        checks[depth].push(fi);
    }
    ChartPlan { lead, order, checks, empty }
}

fn dfs(
    plan: &ChartPlan,
    forms: &[SparseForm],
    f: &Field,
    depth: usize,
    x: &mut Vec<Elem>,
    out: &mut Vec<Vec<Elem>>,
) {
    if depth == plan.order.len() {
        out.push(x.clone());
        return;
    }
    let var = plan.order[depth];
    for c in 0..f.q() {
        x[var] = Elem(c);
        if plan.checks[depth].iter().all(|&fi| forms[fi].eval(x, f).is_zero()) {
            dfs(plan, forms, f, depth + 1, x, out);
        }
    }
    x[var] = Elem::ZERO;
}

/// Chart-by-chart depth-first search, checking each form as soon as its
/// support is assigned. Returns the same points as [`solve_naive`].
pub fn solve_pruned(u: &FormSubspace) -> Variety {
    let f = u.field();
    let k = u.k();
    let mons = monomials(k);
    let forms: Vec<SparseForm> = u
        .forms()
        .iter()
        .map(|q| SparseForm {
            terms: q
                .coeffs()
                .iter()
                .zip(&mons)
                .filter(|(c, _)| !c.is_zero())
                .map(|(&c, &(i, j))| (i, j, c))
                .collect(),
        })
        .collect();
    let plans: Vec<ChartPlan> = (0..k).map(|lead| plan_chart(&forms, k, lead, f)).collect();
    // work units: (chart, value of the first free variable)
    let mut units: Vec<(usize, Option<u32>)> = Vec::new();
    for p in &plans {
        if p.empty {
            continue;
        }
        if p.order.is_empty() {
            units.push((p.lead, None));
        } else {
            units.extend((0..f.q()).map(|c| (p.lead, Some(c))));
        }
    }
    let pts: Vec<Vec<Elem>> = units
        .par_iter()
        .flat_map_iter(|&(lead, first)| {
            let plan = &plans[lead];
            let mut x = vec![Elem::ZERO; k];
            x[lead] = Elem::ONE;
            let mut out = Vec::new();
            match first {
                None => out.push(x),
                Some(c) => {
                    x[plan.order[0]] = Elem(c);
                    if plan.checks[0].iter().all(|&fi| forms[fi].eval(&x, f).is_zero()) {
                        dfs(plan, &forms, f, 1, &mut x, &mut out);
                    }
                }
            }
            out
        })
        .collect();
    Variety { source: u.clone(), points: sorted_set(f, k, pts), method: SolveMethod::Pruned }
}

/// Naive filtering when the space is small enough, pruned search otherwise.
pub fn solve(u: &FormSubspace) -> Variety {
    if check_budget(point_count(u.k(), u.field().q())).is_ok() && point_count(u.k(), u.field().q()) <= 10_000 {
        if let Ok(v) = solve_naive(u) {
            return v;
        }
    }
    solve_pruned(u)
}
