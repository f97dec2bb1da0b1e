use proptest::prelude::*;
use ptsp_core::formulations::{BuildOptions, FamilyId, FormulationId};
use ptsp_core::graph::cover_is_tour;
use ptsp_core::params::{canonical_vertices, sample_interior_b, sample_interior_d, Family, Param};
use ptsp_core::point::XPoint;
use ptsp_core::{ArcSpace, LinSys};

fn family_rows(sys: &LinSys) -> usize {
    sys.rows()
        .iter()
        .filter(|r| !(r.tag.starts_with("AP-") || r.tag.starts_with("lb(") || r.tag.starts_with("ub(")))
        .count()
}

fn all_ids(space: &ArcSpace, seed: u64) -> Vec<FormulationId> {
    let d = Param::D(sample_interior_d(space, seed).unwrap());
    let b = Param::B(sample_interior_b(space, seed));
    let mut ids = Vec::new();
    for f in FamilyId::ALL {
        match f {
            FamilyId::DMtz | FamilyId::DDl => {
                ids.push(FormulationId::parametric(f, d.clone(), false).unwrap());
                ids.push(FormulationId::parametric(f, d.clone(), true).unwrap());
            }
            FamilyId::BScf => {
                ids.push(FormulationId::parametric(f, b.clone(), false).unwrap());
                ids.push(FormulationId::parametric(f, b.clone(), true).unwrap());
            }
            _ => ids.push(FormulationId::fixed(f).unwrap()),
        }
    }
    ids
}

#[test]
fn row_counts_match_enumeration() {
    let sp = ArcSpace::new(5).unwrap();
    let d = sample_interior_d(&sp, 1).unwrap();
    let opts = BuildOptions::default();
    let id = |f, p| FormulationId::parametric(f, p, false).unwrap();
    let cycles = sp.all_cycles().unwrap();
    let long = cycles.iter().filter(|c| c.len() >= 3).count();
    let pairs = 4 * 3 / 2;
    assert_eq!(
        family_rows(&id(FamilyId::DMtz, Param::D(d.clone())).build(&sp, &opts).unwrap()),
        cycles.len()
    );
    assert_eq!(
        family_rows(&id(FamilyId::DDl, Param::D(d)).build(&sp, &opts).unwrap()),
        long + pairs
    );
    let b = Param::B(sample_interior_b(&sp, 1));
    assert_eq!(family_rows(&id(FamilyId::BScf, b).build(&sp, &opts).unwrap()), 11);
}

#[test]
fn pruning_drops_long_cycles_and_full_subset() {
    let sp = ArcSpace::new(5).unwrap();
    let d = Param::D(sample_interior_d(&sp, 2).unwrap());
    let f = FormulationId::parametric(FamilyId::DMtz, d, false).unwrap();
    let full = f.build(&sp, &BuildOptions::default()).unwrap();
    let pruned = f.build(&sp, &BuildOptions::pruned()).unwrap();
    let with_four = sp.all_cycles().unwrap().iter().filter(|c| c.len() == 4).count();
    assert_eq!(family_rows(&full) - family_rows(&pruned), with_four);
}

#[test]
fn ids_round_trip_through_json_and_names() {
    let sp = ArcSpace::new(5).unwrap();
    for id in all_ids(&sp, 3) {
        assert_eq!(FormulationId::from_json(&id.to_json(), &sp).unwrap(), id);
        assert_eq!(id.family().name().parse::<FamilyId>().unwrap(), id.family());
    }
    assert!("nonsense".parse::<FamilyId>().is_err());
    assert!(FormulationId::fixed(FamilyId::DMtz).is_err());
}

#[test]
fn linsys_json_round_trip() {
    let sp = ArcSpace::new(4).unwrap();
    let sys = FormulationId::fixed(FamilyId::ClDl)
        .unwrap()
        .build(&sp, &BuildOptions::default())
        .unwrap();
    assert_eq!(LinSys::from_json(&sys.to_json()).unwrap(), sys);
}

#[test]
fn closures_reject_every_subtour_cover() {
    let sp = ArcSpace::new(5).unwrap();
    let opts = BuildOptions::pruned();
    for f in [
        FamilyId::ClMtz,
        FamilyId::ClDl,
        FamilyId::ClScf,
        FamilyId::ClDlOnVmtz,
        FamilyId::DfjClique,
    ] {
        let sys = FormulationId::fixed(f).unwrap().build(&sp, &opts).unwrap();
        for c in sp.cycle_covers().unwrap() {
            assert_eq!(
                sys.contains(XPoint::cover(&sp, &c).values()),
                cover_is_tour(&c),
                "{f} {c:?}"
            );
        }
    }
}

#[test]
fn negative_parameters_rejected() {
    let sp = ArcSpace::new(4).unwrap();
    let mut d = sample_interior_d(&sp, 1).unwrap();
    d.set(2, 3, ptsp_core::Rat::new(-1, 5));
    let f = FormulationId::parametric(FamilyId::DMtz, Param::D(d), false).unwrap();
    assert!(f.build(&sp, &BuildOptions::default()).is_err());
}

#[test]
fn vertex_formulations_build() {
    let sp = ArcSpace::new(5).unwrap();
    for fam in [Family::Mtz, Family::Dl, Family::Scf] {
        for p in canonical_vertices(fam, &sp) {
            let f = match fam {
                Family::Mtz => FamilyId::DMtz,
                Family::Dl => FamilyId::DDl,
                Family::Scf => FamilyId::BScf,
            };
            let sys = FormulationId::parametric(f, p, false)
                .unwrap()
                .build(&sp, &BuildOptions::pruned())
                .unwrap();
            assert!(sys.num_rows() > 0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn every_tour_satisfies_every_x_space_formulation(seed in 0u64..1000, pick in 0usize..24) {
        let sp = ArcSpace::new(5).unwrap();
        let tour = &sp.tours(9).unwrap()[pick];
        let x = XPoint::tour(&sp, tour);
        for id in all_ids(&sp, seed) {
            let sys = id.build(&sp, &BuildOptions::default()).unwrap();
            if sys.num_vars() == sp.num_arcs() {
                prop_assert!(sys.contains(x.values()), "{} rejects {:?}: {:?}", id, tour, sys.first_violation(x.values()).map(|r| r.tag.clone()));
            }
        }
    }
}
