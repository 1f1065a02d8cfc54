use quadvar::classify::{classify, is_arc, Verdict};
use quadvar::constructions::elliptic::{expected_dim, symbolic_vanishing_space};
use quadvar::constructions::genglynn::v_t_points;
use quadvar::constructions::glynn::orbit_points;
use quadvar::constructions::*;
use quadvar::gf::{Elem, Field};
use quadvar::projgeom::ProjPoint;
use quadvar::quadforms::vanishing_space;
use quadvar::variety::solve_pruned;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn v_t_is_frobenius_invariant() {
    for (t, q) in [(2usize, 3u32), (2, 4), (2, 5), (3, 2), (3, 3)] {
        let f = genglynn::big_field(t, q).unwrap();
        let s = v_t_points(t, q, &f).unwrap();
        assert_eq!(s.len(), f.q() as usize + 1);
        for p in s.iter() {
            let img: Vec<Elem> = p.coords().iter().map(|&x| f.pow(x, q as u64)).collect();
            assert!(s.contains(&ProjPoint::new(img, &f).unwrap()), "t={t} q={q}");
        }
    }
}

#[test]
fn random_nrc_is_an_arc_cut_out_by_its_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for q in [7u64, 8, 9, 11, 13] {
        let f = Field::of_order(q).unwrap();
        for k in 3..=((q as usize + 2) / 2).min(6) {
            let mut els: Vec<Elem> = f.elements().collect();
            els.shuffle(&mut rng);
            let p = NrcParams { k, alphas: els[..k].to_vec() };
            let pts = nrc_points(&p, &f).unwrap();
            assert_eq!(pts.len(), q as usize + 1);
            assert!(is_arc(&pts));
            let u = nrc_forms(&p, &f).unwrap();
            assert_eq!(u.dim(), (k - 1) * (k - 2) / 2);
            assert!(solve_pruned(&u).points.same_points(&pts), "q={q} k={k}");
        }
    }
}

#[test]
fn elliptic_recursion_inside_oracle() {
    for q in [11u64, 13] {
        let f = Field::of_order(q).unwrap();
        for (a, b) in [(1, 1), (2, 3), (1, 5)] {
            let k = 4;
            let p = EllipticParams { a: f.from_int(a), b: f.from_int(b), k };
            if p.validate(&f).is_err() {
                continue;
            }
            for k in 4..=7 {
                let p = EllipticParams { k, ..p.clone() };
                let r = elliptic_forms(&p, &f).unwrap();
                assert!(r.oracle.contains_subspace(&r.recursion));
                assert_eq!(r.recursion.dim(), expected_dim(k));
                assert_eq!(symbolic_vanishing_space(&p, &f).unwrap(), r.oracle);
                let pts = elliptic_points(&p, &f).unwrap();
                let u = vanishing_space(&pts);
                assert!(u.contains_subspace(&r.oracle));
            }
        }
    }
}

#[test]
fn char3_orbit_lies_on_the_variety() {
    let f = Field::of_order(9).unwrap();
    for g in glynn_solve(&f).unwrap().into_iter().filter(|g| g.generic(&f)) {
        let v = solve_pruned(&glynn_forms(&g, &f).unwrap());
        let orbit = orbit_points(&g, &f).unwrap();
        let distinct: std::collections::BTreeSet<_> = orbit.iter().cloned().collect();
        assert_eq!(distinct.len(), 5);
        assert!(orbit.iter().all(|x| v.points.contains(x)));
    }
}

#[test]
fn nrc_branch_outside_char3() {
    for q in [11u64, 19, 29, 31] {
        let f = Field::of_order(q).unwrap();
        let Ok(sols) = glynn_solve(&f) else { continue };
        for g in sols {
            let v = solve_pruned(&glynn_forms(&g, &f).unwrap());
            assert_eq!(v.len(), q as usize + 1, "q={q}");
            assert_eq!(classify(&v.points).unwrap().verdict, Verdict::Arc);
        }
    }
}
