use ptsp_core::instance::{GenMode, Instance};
use ptsp_core::{Error, Rat};

const SAMPLE: &str = "ATSP sample 4\n* 1 2 3\n4 * 7/2 6\n7 8 * 9\n10 11 12 *\n";

#[test]
fn parses_rationals_and_round_trips() {
    let inst = Instance::parse(SAMPLE).unwrap();
    assert_eq!(inst.n(), 4);
    assert_eq!(inst.costs.len(), 12);
    assert_eq!(*inst.cost(2, 3), Rat::new(7, 2));
    assert_eq!(inst.to_text(), SAMPLE);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.atsp");
    inst.write(&p).unwrap();
    assert_eq!(std::fs::read_to_string(&p).unwrap(), SAMPLE);
    assert_eq!(Instance::read(&p).unwrap(), inst);
}

#[test]
fn diagonal_entry_is_a_parse_error() {
    let bad = SAMPLE.replace("* 1 2 3", "0 1 2 3");
    match Instance::parse(&bad) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn three_nodes_is_a_domain_error() {
    let e = Instance::parse("ATSP t 3\n* 1 2\n1 * 2\n1 2 *\n").unwrap_err();
    assert!(matches!(e, Error::Domain(_)));
    assert!(e.to_string().contains("n >= 4"));
    assert!(matches!(
        Instance::generate(3, 1, GenMode::Uniform),
        Err(Error::Domain(_))
    ));
}

#[test]
fn generation_is_deterministic() {
    let a = Instance::generate(5, 42, GenMode::Uniform).unwrap();
    let b = Instance::generate(5, 42, GenMode::Uniform).unwrap();
    assert_eq!(a, b);
    assert!(a.costs.iter().all(|c| *c >= Rat::one() && *c <= Rat::from_int(100)));
    assert_ne!(a, Instance::generate(5, 43, GenMode::Uniform).unwrap());
}

#[test]
fn euclidean_mode_is_asymmetric() {
    let inst = Instance::generate(6, 5, GenMode::EuclideanAsym).unwrap();
    let sp = inst.space;
    assert!(sp.arcs().any(|(i, j)| inst.cost(i, j) != inst.cost(j, i)));
}

#[test]
fn tour_cost_matches_objective() {
    let inst = Instance::parse(SAMPLE).unwrap();
    let t = [1, 3, 2, 4];
    let x = ptsp_core::point::XPoint::tour(&inst.space, &t);
    assert_eq!(inst.eval(&x), inst.tour_cost(&t));
    assert_eq!(
        inst.tour_cost(&t),
        Rat::from_int(2) + Rat::from_int(8) + Rat::from_int(6) + Rat::from_int(10)
    );
}
