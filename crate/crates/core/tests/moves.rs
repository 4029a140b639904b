use gknot::gen::{random_diagram, Family, GenParams};
use gknot::moves::{apply_move, canonical, enumerate_moves, isomorphic, perturb, simplify, MoveSite};
use gknot::{fixtures, oracle, topo, Diagram, Poly, Var};

fn writhe(d: &Diagram) -> i64 {
    oracle::signs(d).iter().sum()
}

/// `(-A^3)^{-w} <D>`, invariant under all three moves.
fn normalized_classical(d: &Diagram) -> Poly {
    let w = writhe(d);
    let f = Poly::var_pow(Var::Kauffman, -3 * w);
    let f = if w % 2 == 0 { f } else { f.neg() };
    oracle::classical_bracket(d).mul(&f)
}

#[test]
fn every_move_keeps_diagrams_valid() {
    let p = GenParams {
        max_crossings: 5,
        ..GenParams::default()
    };
    for seed in 0..25 {
        let d = random_diagram(Family::General, &p, seed);
        for site in enumerate_moves(&d).unwrap() {
            let e = apply_move(&d, &site).unwrap();
            assert!(topo::validate(&e).is_valid(), "seed {seed} {site:?}");
            assert_eq!(e.crossings.len() as i64, d.crossings.len() as i64 + site.delta());
            let ids: Vec<_> = e.constituents.iter().map(|c| (&c.id, c.kind, &c.from, &c.to)).collect();
            let ids0: Vec<_> = d.constituents.iter().map(|c| (&c.id, c.kind, &c.from, &c.to)).collect();
            assert_eq!(ids, ids0);
            let poles: Vec<_> = e.poles.iter().map(|p| (&p.id, p.slots.len())).collect();
            let poles0: Vec<_> = d.poles.iter().map(|p| (&p.id, p.slots.len())).collect();
            assert_eq!(poles, poles0);
        }
    }
}

#[test]
fn classical_bracket_oracle_is_move_invariant() {
    let p = GenParams {
        max_crossings: 6,
        ..GenParams::default()
    };
    for seed in 0..40 {
        let d = random_diagram(Family::Classical, &p, seed);
        let before = normalized_classical(&d);
        for s in 0..4 {
            let (e, script) = perturb(&d, 5, 1000 * seed + s).unwrap();
            assert_eq!(normalized_classical(&e), before, "seed {seed}/{s}: {script:?}");
        }
    }
}

#[test]
fn r3_moves_keep_the_bracket() {
    let p = GenParams::default();
    let mut seen = 0;
    for seed in 0..60 {
        let d = random_diagram(Family::Classical, &p, seed);
        let before = normalized_classical(&d);
        for site in enumerate_moves(&d).unwrap() {
            if let MoveSite::R3 { .. } = site {
                seen += 1;
                let e = apply_move(&d, &site).unwrap();
                assert_eq!(normalized_classical(&e), before, "seed {seed} {site:?}");
                // R3 is its own inverse on the new triangle.
                let back = enumerate_moves(&e)
                    .unwrap()
                    .into_iter()
                    .filter(|s| matches!(s, MoveSite::R3 { .. }))
                    .any(|s| isomorphic(&apply_move(&e, &s).unwrap(), &d).unwrap());
                assert!(back, "seed {seed} {site:?}");
            }
        }
    }
    assert!(seen > 10, "only {seen} triangle sites");
}

#[test]
fn knotoid_oracles_are_move_invariant() {
    let p = GenParams::default();
    for seed in 0..40 {
        let d = random_diagram(Family::Knotoid, &p, seed);
        let (f, s) = (oracle::affine_index(&d), oracle::strengthened_index(&d));
        let (e, _) = perturb(&d, 6, seed).unwrap();
        assert_eq!(oracle::affine_index(&e), f, "seed {seed}");
        assert_eq!(oracle::strengthened_index(&e), s, "seed {seed}");
    }
}

#[test]
fn perturb_is_deterministic_and_zero_is_identity() {
    let d = random_diagram(Family::General, &GenParams::default(), 3);
    assert_eq!(perturb(&d, 0, 9).unwrap().0, d);
    assert_eq!(perturb(&d, 6, 9).unwrap(), perturb(&d, 6, 9).unwrap());
}

#[test]
fn move_scripts_round_trip_through_json() {
    let d = random_diagram(Family::General, &GenParams::default(), 11);
    let (e, script) = perturb(&d, 6, 5).unwrap();
    let json = serde_json::to_string(&script).unwrap();
    let back: Vec<MoveSite> = serde_json::from_str(&json).unwrap();
    assert_eq!(back, script);
    assert_eq!(gknot::moves::apply_script(&d, &back).unwrap(), e);
}

#[test]
fn stale_sites_are_rejected() {
    let site = MoveSite::R1Minus {
        crossing: "nope".into(),
        lobe: "a1".into(),
    };
    assert!(apply_move(&fixtures::unknot(), &site).is_err());
}

#[test]
fn simplify_examples() {
    let unknot = fixtures::unknot();
    assert!(isomorphic(&simplify(&fixtures::kink_pos(), 1).unwrap(), &unknot).unwrap());
    let r2 = enumerate_moves(&unknot).unwrap();
    assert!(matches!(r2[0], MoveSite::R1Plus { .. }));
    // Double the unknot by an R2 move against a second arc created by R1.
    let kinked = apply_move(&unknot, &r2[0]).unwrap();
    let doubled = enumerate_moves(&kinked)
        .unwrap()
        .into_iter()
        .find(|s| matches!(s, MoveSite::R2Plus { .. }))
        .map(|s| apply_move(&kinked, &s).unwrap())
        .unwrap();
    assert_eq!(doubled.crossings.len(), 3);
    let s = simplify(&doubled, 2).unwrap();
    assert!(s.crossings.len() <= 1);
    for seed in 0..10 {
        let d = random_diagram(Family::General, &GenParams::default(), seed);
        assert!(simplify(&d, 2).unwrap().crossings.len() <= d.crossings.len());
    }
}

#[test]
fn canonical_form_ignores_ids() {
    let d = fixtures::trefoil();
    let mut e = d.clone();
    for c in e.crossings.iter_mut() {
        c.id = format!("z{}", c.id);
    }
    assert_eq!(canonical(&d).unwrap(), canonical(&e).unwrap());
    let mut m = d.clone();
    m.crossings[0].over = m.crossings[0].over.flip();
    assert_ne!(canonical(&d).unwrap(), canonical(&m).unwrap());
}
