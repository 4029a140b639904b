use gknot::fixtures;
use gknot::involute::{mir, rev, sym};
use gknot::topo::checked;
use gknot::*;

#[test]
fn fixtures_are_valid() {
    for (name, d) in fixtures::all() {
        let r = validate(&d);
        assert!(r.is_valid(), "{name}: {:?}", r.errors);
        assert!(topo::dart_census(&d), "{name}");
    }
}

#[test]
fn region_counts() {
    assert_eq!(regions(&fixtures::unknot()).unwrap().n(), 2);
    assert_eq!(regions(&fixtures::hopf()).unwrap().n(), 4);
    assert_eq!(regions(&fixtures::trefoil()).unwrap().n(), 5);
    assert_eq!(regions(&fixtures::seg1()).unwrap().n(), 1);
    assert_eq!(regions(&fixtures::nest2()).unwrap().n(), 3);
}

#[test]
fn unknot_regions_and_isolated_pole() {
    let mut d = fixtures::unknot();
    d.poles.push(Pole { id: "P".into(), slots: vec![] });
    d.placements.push(Placement {
        component: 1,
        witness: Witness::Arc(ArcSide::new("a", Side::L)),
        outer: None,
    });
    let r = regions(&d).unwrap();
    assert_eq!(r.n(), 2);
    let left = r.region_of(0, Side::L);
    assert_eq!(r.pole_regions[0], vec![left]);
    assert_eq!(r.names[left], "a:L");
    assert_eq!(r.region_poles[r.region_of(0, Side::R)], Vec::<usize>::new());
}

#[test]
fn strand_through_violation() {
    let mut d = fixtures::hopf();
    d.crossings[0].slots.swap(0, 1);
    let r = validate(&d);
    assert!(r.errors.iter().any(|e| e.contains("strand-through violation")), "{:?}", r.errors);
}

#[test]
fn toroidal_map_rejected() {
    // One crossing, two one-arc loops interleaved in the rotation: a map with
    // a single face, which lives on the torus.
    let d = Diagram {
        arcs: vec!["x".into(), "y".into()],
        crossings: vec![Crossing {
            id: "c".into(),
            slots: [Dart::head("x"), Dart::head("y"), Dart::tail("x"), Dart::tail("y")],
            over: Over::Even,
        }],
        constituents: vec![
            Constituent { id: "l1".into(), kind: Kind::Loop, trace: vec![("x".into(), Dir::Fwd)], from: None, to: None },
            Constituent { id: "l2".into(), kind: Kind::Loop, trace: vec![("y".into(), Dir::Fwd)], from: None, to: None },
        ],
        placements: vec![Placement { component: 0, witness: Witness::Root, outer: None }],
        ..Default::default()
    };
    let t = Topo::build(&d);
    let errs = t.unwrap_err();
    assert!(errs.iter().any(|e| e.contains("non-spherical embedding") && e.contains("= 0")), "{errs:?}");
}

#[test]
fn unknown_endpoint_pole_is_semantic_error() {
    let mut d = fixtures::seg1();
    d.constituents[0].to = Some("Z".into());
    let text = serialize_gkd(&d);
    let parsed = parse_gkd(&text).unwrap();
    assert!(!validate(&parsed).is_valid());
}

#[test]
fn gkd_round_trip() {
    for (name, d) in fixtures::all() {
        let back = parse_gkd(&serialize_gkd(&d)).unwrap();
        assert_eq!(back, d, "{name}");
    }
}

#[test]
fn involutions_are_involutions() {
    for (name, d) in fixtures::all() {
        assert_eq!(mir(&mir(&d)), d, "{name}");
        assert_eq!(sym(&sym(&d).unwrap()).unwrap(), d, "{name}");
        assert_eq!(rev(&rev(&d).unwrap()).unwrap(), d, "{name}");
        let rot = involute(&d, Involution::Rot).unwrap();
        assert_eq!(involute(&rot, Involution::Rot).unwrap(), d, "{name}");
        for op in [Involution::Mir, Involution::Sym, Involution::Rot, Involution::Rev] {
            assert!(validate(&involute(&d, op).unwrap()).is_valid(), "{name} {op:?}");
        }
    }
}

#[test]
fn signs_under_involutions() {
    for d in [fixtures::hopf(), fixtures::trefoil(), fixtures::half(), fixtures::kink_pos()] {
        let t = checked(&d).unwrap();
        let base: Vec<i64> = (0..t.n_crossings()).map(|c| t.sign(c)).collect();
        let get = |e: &Diagram| {
            let t = checked(e).unwrap();
            (0..t.n_crossings()).map(|c| t.sign(c)).collect::<Vec<_>>()
        };
        let neg: Vec<i64> = base.iter().map(|s| -s).collect();
        assert_eq!(get(&mir(&d)), neg);
        assert_eq!(get(&sym(&d).unwrap()), neg);
        assert_eq!(get(&involute(&d, Involution::Rot).unwrap()), base);
        assert_eq!(get(&rev(&d).unwrap()), base);
    }
    let t = checked(&fixtures::hopf()).unwrap();
    assert_eq!((t.sign(0), t.sign(1)), (1, 1));
}

#[test]
fn rev_needs_orientation() {
    let mut d = fixtures::unknot();
    d.flags.oriented = false;
    assert_eq!(rev(&d), Err(Error::Unoriented));
}

#[test]
fn regions_are_deterministic() {
    let a = regions(&fixtures::trefoil()).unwrap();
    let b = regions(&fixtures::trefoil()).unwrap();
    assert_eq!(a.names, b.names);
    assert_eq!(a.arc_regions, b.arc_regions);
}
