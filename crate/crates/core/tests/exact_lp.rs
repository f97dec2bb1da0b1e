use proptest::prelude::*;
use ptsp_core::lp::{
    fourier_motzkin, includes, is_redundant, min_row_lhs, solve_lp, FmOptions, LinSys, LpStatus, Sense,
};
use ptsp_core::Rat;

fn r(v: i64) -> Rat {
    Rat::from_int(v)
}

/// Maximum of `c·z` over `{z : A z <= b}` in two variables by checking every pairwise
/// intersection of constraint lines; `None` when no vertex is feasible.
fn vertex_max(rows: &[(i64, i64, i64)], c: (i64, i64)) -> Option<Rat> {
    let mut best: Option<Rat> = None;
    for (k, &(a1, b1, r1)) in rows.iter().enumerate() {
        for &(a2, b2, r2) in &rows[k + 1..] {
            let det = a1 * b2 - a2 * b1;
            if det == 0 {
                continue;
            }
            let x = Rat::new(r1 * b2 - r2 * b1, det);
            let y = Rat::new(a1 * r2 - a2 * r1, det);
            if rows.iter().all(|&(a, b, rr)| r(a) * &x + r(b) * &y <= r(rr)) {
                let v = r(c.0) * &x + r(c.1) * &y;
                if best.as_ref().is_none_or(|b| v > *b) {
                    best = Some(v);
                }
            }
        }
    }
    best
}

fn system(rows: &[(i64, i64, i64)]) -> LinSys {
    let mut s = LinSys::with_vars(["x", "y"]).unwrap();
    for (k, &(a, b, rr)) in rows.iter().enumerate() {
        s.add_le(format!("r{k}"), [(0, r(a)), (1, r(b))], r(rr)).unwrap();
    }
    s
}

#[test]
fn textbook_optimum_with_certificate() {
    let rows = [(1, 2, 4), (3, 1, 6), (-1, 0, 0), (0, -1, 0)];
    let s = system(&rows);
    let obj = [(0, r(1)), (1, r(1))];
    let res = solve_lp(&s, &obj, Sense::Max).unwrap();
    assert_eq!(res.status, LpStatus::Optimal);
    assert_eq!(res.value, Some(Rat::new(14, 5)));
    assert_eq!(res.point.clone().unwrap(), vec![Rat::new(8, 5), Rat::new(6, 5)]);
    assert!(res.verify(&s, &obj, Sense::Max));
}

#[test]
fn infeasible_and_unbounded_are_certified() {
    let s = system(&[(1, 0, 1), (-1, 0, -2)]);
    let res = solve_lp(&s, &[(0, r(1))], Sense::Max).unwrap();
    assert_eq!(res.status, LpStatus::Infeasible);
    assert!(res.verify(&s, &[(0, r(1))], Sense::Max));
    let s = system(&[(-1, 0, 0), (0, -1, 0)]);
    let res = solve_lp(&s, &[(0, r(1)), (1, r(1))], Sense::Max).unwrap();
    assert_eq!(res.status, LpStatus::Unbounded);
    assert!(res.verify(&s, &[(0, r(1)), (1, r(1))], Sense::Max));
}

#[test]
fn projection_of_a_triangle() {
    // { (x, y) : x, y >= 0, x + y <= 1 } projected onto x is [0, 1].
    let s = system(&[(-1, 0, 0), (0, -1, 0), (1, 1, 1)]);
    let p = fourier_motzkin(&s, &["y"], FmOptions::default()).unwrap();
    let mut interval = LinSys::with_vars(["x", "y"]).unwrap();
    interval.add_le("lo", [(0, r(-1))], r(0)).unwrap();
    interval.add_le("hi", [(0, r(1))], r(1)).unwrap();
    let on = vec!["x".to_string()];
    assert!(includes(&p, &interval, &on).unwrap().holds());
    assert!(includes(&interval, &p, &on).unwrap().holds());
    // includes() projects the extended side itself
    assert!(includes(&interval, &s, &on).unwrap().holds());
}

#[test]
fn redundancy_and_strictness() {
    let mut s = system(&[(-1, 0, 0), (0, -1, 0), (1, 1, 1)]);
    s.add_le("loose", [(0, r(1))], r(2)).unwrap();
    assert!(is_redundant(&s, "loose").unwrap().is_redundant());
    assert!(!is_redundant(&s, "r2").unwrap().is_redundant());
    let row = s.row("r2").unwrap().coeffs.clone();
    assert_eq!(min_row_lhs(&s, &row).unwrap(), Some(r(0)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn simplex_matches_vertex_enumeration(
        extra in prop::collection::vec((-5i64..=5, -5i64..=5, -3i64..=8), 1..5),
        c in (-4i64..=4, -4i64..=4),
    ) {
        // A bounding box keeps the optimum finite.
        let mut rows = vec![(1, 0, 6), (-1, 0, 6), (0, 1, 6), (0, -1, 6)];
        rows.extend(extra.into_iter().filter(|&(a, b, _)| (a, b) != (0, 0)));
        let s = system(&rows);
        let obj = [(0, r(c.0)), (1, r(c.1))];
        let res = solve_lp(&s, &obj, Sense::Max).unwrap();
        prop_assert!(res.verify(&s, &obj, Sense::Max));
        match vertex_max(&rows, c) {
            Some(v) => prop_assert_eq!(res.value, Some(v)),
            None => prop_assert_eq!(res.status, LpStatus::Infeasible),
        }
    }
}
