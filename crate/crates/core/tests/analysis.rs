use ptsp_core::analysis::{
    compare_pair, facet_census, facet_interior_d, lp_bound, lp_bound_table, run_suite, solve_atsp, PropositionReport,
    Relation, Strategy, SuiteOptions,
};
use ptsp_core::formulations::{BuildOptions, FamilyId, FormulationId};
use ptsp_core::instance::{GenMode, Instance};
use ptsp_core::params::{d_tail, BVec, Family, Param};
use ptsp_core::{ArcSpace, Cycle, Rat};

fn closures() -> Vec<FormulationId> {
    [FamilyId::ClScf, FamilyId::ClDl, FamilyId::ClDlOnVmtz, FamilyId::ClMtz]
        .into_iter()
        .map(|f| FormulationId::fixed(f).unwrap())
        .collect()
}

/// Optimum by trying every permutation of the nodes after node 1.
fn brute_force(inst: &Instance) -> Rat {
    fn go(inst: &Instance, path: &mut Vec<usize>, best: &mut Option<Rat>) {
        let n = inst.n();
        if path.len() == n {
            let c = inst.tour_cost(path);
            if best.as_ref().is_none_or(|b| c < *b) {
                *best = Some(c);
            }
            return;
        }
        for v in 2..=n {
            if !path.contains(&v) {
                path.push(v);
                go(inst, path, best);
                path.pop();
            }
        }
    }
    let mut best = None;
    go(inst, &mut vec![1], &mut best);
    best.unwrap()
}

#[test]
fn sum_costs_at_four() {
    let inst = Instance::from_fn("sum", 4, |i, j| Rat::from(i + j)).unwrap();
    let opts = BuildOptions::pruned();
    let best = brute_force(&inst);
    assert_eq!(
        solve_atsp(&inst, &closures()[0], Strategy::Enumerate, &opts)
            .unwrap()
            .value,
        best
    );
    for id in closures() {
        assert_eq!(
            solve_atsp(&inst, &id, Strategy::BranchAndBound, &opts).unwrap().value,
            best
        );
    }
}

#[test]
fn symmetric_costs_invariant_under_reversal() {
    let base = Instance::generate(6, 8, GenMode::Uniform).unwrap();
    let inst = Instance::from_fn("sym", 6, |i, j| base.cost(i.min(j), i.max(j)).clone()).unwrap();
    let r = solve_atsp(&inst, &closures()[0], Strategy::BranchAndBound, &BuildOptions::pruned()).unwrap();
    let mut rev = r.tour.clone();
    rev[1..].reverse();
    assert_eq!(inst.tour_cost(&rev), r.value);
    assert_eq!(r.value, brute_force(&inst));
}

#[test]
fn zero_costs_give_zero_bounds() {
    let inst = Instance::from_fn("zero", 5, |_, _| Rat::zero()).unwrap();
    for id in closures() {
        assert_eq!(lp_bound(&inst, &id, &BuildOptions::pruned()).unwrap(), Rat::zero());
    }
}

#[test]
fn closure_bounds_coincide_at_four() {
    let inst = Instance::generate(4, 7, GenMode::Uniform).unwrap();
    let t = lp_bound_table(&inst, &closures(), &BuildOptions::pruned()).unwrap();
    assert!(t.monotone());
    assert!(t.rows.windows(2).all(|w| w[0].value == w[1].value), "{}", t.to_text());
}

#[test]
fn tighter_bounds_need_no_more_nodes() {
    let opts = BuildOptions::pruned();
    let ids = closures();
    let (mut scf, mut mtz) = (0, 0);
    for seed in 0..10 {
        let inst = Instance::generate(6, 100 + seed, GenMode::Uniform).unwrap();
        scf += solve_atsp(&inst, &ids[0], Strategy::BranchAndBound, &opts)
            .unwrap()
            .nodes;
        mtz += solve_atsp(&inst, &ids[3], Strategy::BranchAndBound, &opts)
            .unwrap()
            .nodes;
    }
    println!("branch-and-bound nodes over 10 instances: Cl-SCF {scf}, Cl-MTZ {mtz}");
    assert!(scf <= mtz);
}

#[test]
fn scf_vertex_facets_are_the_sets_containing_k() {
    let sp = ArcSpace::new(5).unwrap();
    let k = 3;
    let c = facet_census(Family::Scf, &Param::B(BVec::unit(&sp, k)), &sp).unwrap();
    let mut got: Vec<String> = c.facets().map(|r| r.tag.clone()).collect();
    got.sort();
    let mut want: Vec<String> = sp
        .all_subsets()
        .unwrap()
        .into_iter()
        .filter(|s| s.contains(k) && s.len() < 4)
        .map(|s| format!("cut{s}"))
        .collect();
    want.sort();
    assert_eq!(got, want);
}

#[test]
fn census_at_four() {
    let sp = ArcSpace::new(4).unwrap();
    let d = d_tail(&sp, 2);
    let mtz = facet_census(Family::Mtz, &Param::D(d.clone()), &sp).unwrap();
    for r in mtz.rows.iter().filter(|r| r.tag.matches(',').count() == 1) {
        let c: Vec<usize> = r
            .tag
            .trim_start_matches("circuit(")
            .trim_end_matches(')')
            .split(',')
            .map(|v| v.parse().unwrap())
            .collect();
        let sum = d.cycle_sum(&Cycle::new(c).unwrap());
        assert_eq!(r.facet, sum.is_positive(), "{}", r.tag);
    }
    let dl = facet_census(Family::Dl, &Param::D(d), &sp).unwrap();
    assert!(dl.rows.iter().filter(|r| r.tag.starts_with("pair")).all(|r| r.facet));
    assert_eq!(dl.mismatches().count(), 0);
}

#[test]
fn facet_parameters_are_incomparable() {
    let sp = ArcSpace::new(5).unwrap();
    let p = |c: Vec<usize>| {
        let d = facet_interior_d(&sp, &Cycle::new(c).unwrap());
        FormulationId::parametric(FamilyId::DMtz, Param::D(d), false).unwrap()
    };
    let cmp = compare_pair(&p(vec![2, 3]), &p(vec![3, 4, 5]), &sp, &BuildOptions::pruned()).unwrap();
    assert_eq!(cmp.relation, Relation::Incomparable);
    assert!(cmp.rechecked && cmp.first_only.is_some() && cmp.second_only.is_some());
}

#[test]
fn dl_closure_strictly_inside_its_vmtz_version() {
    let sp = ArcSpace::new(5).unwrap();
    let ids = closures();
    let cmp = compare_pair(&ids[1], &ids[2], &sp, &BuildOptions::pruned()).unwrap();
    assert_eq!(cmp.relation, Relation::FirstInSecond);
    assert!(cmp.rechecked);
}

#[test]
fn suite_at_four_verifies_and_reports_round_trip() {
    let reps = run_suite(&SuiteOptions::new(4, 1)).unwrap();
    for r in &reps {
        assert!(r.verified(), "{}", r.to_text());
        let back = PropositionReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back.id, r.id);
        assert_eq!(back.checks, r.checks);
        assert!(back.recheck().unwrap(), "{}", r.id);
    }
    assert!(reps
        .iter()
        .any(|r| r.notes.iter().any(|s| s == "chain collapses to equality")));
}
