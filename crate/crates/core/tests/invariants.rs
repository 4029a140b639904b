use std::collections::BTreeMap;
use std::path::Path;

use gknot::bracket::{self, normalized_bracket, recover_published, reduce_bracket, Reductions, Target};
use gknot::curves::{linking_number, lk_matrix, DEFAULT_STATE_CAP};
use gknot::gen::{random_diagram, Family, GenParams};
use gknot::harness::{self, Plan};
use gknot::height::{diagram_height, height_report, height_spectrum};
use gknot::index::{self, change_base_point, IndexContext};
use gknot::involute::{mir, rev};
use gknot::moves::perturb;
use gknot::topo::checked;
use gknot::*;
use proptest::prelude::*;

const CAP: u64 = DEFAULT_STATE_CAP;

fn general(seed: u64) -> Diagram {
    random_diagram(Family::General, &GenParams::default(), seed)
}

fn signs(d: &Diagram) -> Vec<i64> {
    let t = checked(d).unwrap();
    (0..t.n_crossings()).map(|c| t.sign(c)).collect()
}

fn gv(n: &str) -> Poly {
    Poly::var(Var::generic(n))
}

/// Adds a valency-zero pole `Z` on the given side of `arc`.
fn with_point_at_infinity(d: &Diagram, arc: &str, side: Side) -> Diagram {
    let mut e = d.clone();
    let n = checked(d).unwrap().n_comp;
    e.poles.push(Pole {
        id: "Z".into(),
        slots: vec![],
    });
    e.placements.push(Placement {
        component: n,
        witness: Witness::Arc(ArcSide::new(arc, side)),
        outer: None,
    });
    e
}

#[test]
fn fixture_files_match_builders() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    for (name, d) in fixtures::all() {
        let text = std::fs::read_to_string(dir.join(format!("{name}.gkd"))).unwrap();
        assert_eq!(text, serialize_gkd(&d), "{name}");
        assert_eq!(parse_gkd(&text).unwrap(), d, "{name}");
    }
}

#[test]
fn hopf_and_half_linking() {
    let h = fixtures::hopf();
    assert_eq!(signs(&h), vec![1, 1]);
    let (ids, m) = lk_matrix(&h).unwrap();
    assert_eq!(m[0][1], 2, "{ids:?}");
    let half = fixtures::half();
    let ids: Vec<String> = half.constituents.iter().map(|c| c.id.clone()).collect();
    assert_eq!(linking_number(&half, &ids[0], &ids[1]).unwrap(), 1);
    assert!(linking_number(&half, &ids[0], &ids[0]).is_err());
}

#[test]
fn kinks_normalize_to_the_unknot() {
    let u = normalized_bracket(&fixtures::unknot(), CAP).unwrap();
    assert_eq!(u.to_string(), "-A^2 - A^-2");
    assert_eq!(normalized_bracket(&fixtures::kink_pos(), CAP).unwrap(), u);
    assert_eq!(normalized_bracket(&fixtures::kink_neg(), CAP).unwrap(), u);
}

#[test]
fn trefoil_matches_skein_oracle() {
    let d = fixtures::trefoil();
    let modes = Reductions {
        drop_pole_labels: true,
        drop_orientation: true,
        ..Default::default()
    };
    let r = reduce_bracket(&d, modes, CAP).unwrap();
    assert_eq!(r.raw, oracle::classical_bracket(&d).mul(&bracket::delta()));
    assert!(index::generalized_index(&d).unwrap().is_zero());
}

#[test]
fn trivial_knotoid_recovers_one() {
    let d = fixtures::seg1();
    assert_eq!(recover_published(&d, Target::TuraevSpherical, CAP).unwrap(), Poly::one());
    assert!(recover_published(&d, Target::TuraevPlanar, CAP).is_err());
    assert!(recover_published(&fixtures::hopf(), Target::TuraevSpherical, CAP).is_err());
}

#[test]
fn small_harness_run_is_clean() {
    let plan = Plan::small(5, 8);
    for c in harness::knotoid_oracles(&plan)
        .into_iter()
        .chain(harness::bracket_internals(&plan))
        .chain(harness::height_consistency(&plan))
    {
        assert!(c.passed(), "{c}");
    }
}

#[test]
fn nested_heights_and_spectrum() {
    assert_eq!(diagram_height(&fixtures::nest2(), "P", "Q").unwrap(), 2);
    assert!(matches!(diagram_height(&fixtures::nest2(), "P", "P"), Err(Error::SamePole(_))));
    assert!(matches!(diagram_height(&fixtures::nest2(), "P", "nope"), Err(Error::UnknownPole(_))));
    let r = height_report(&fixtures::nest2(), "P", "Q", CAP).unwrap();
    assert_eq!(r.diagram_height, 2);
    assert!(r.bounds.iter().all(|(_, b)| *b <= num_rational::Rational64::from_integer(2)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mirror_negates_and_reverse_keeps_signs(seed in any::<u64>()) {
        let d = general(seed);
        let s = signs(&d);
        prop_assert_eq!(signs(&mir(&d)), s.iter().map(|x| -x).collect::<Vec<_>>());
        prop_assert_eq!(signs(&rev(&d).unwrap()), s);
    }

    #[test]
    fn lk_is_symmetric_and_mirror_negates(seed in any::<u64>()) {
        let d = general(seed);
        let (_, m) = lk_matrix(&d).unwrap();
        let (_, mm) = lk_matrix(&mir(&d)).unwrap();
        for i in 0..m.len() {
            prop_assert_eq!(m[i][i], 0);
            for j in 0..m.len() {
                prop_assert_eq!(m[i][j], m[j][i]);
                prop_assert_eq!(mm[i][j], -m[i][j]);
            }
        }
    }

    #[test]
    fn base_point_change_matches_direct(seed in any::<u64>()) {
        let d = general(seed);
        let ctx = IndexContext::new(&d).unwrap();
        let poles: Vec<String> = d.poles.iter().map(|p| p.id.clone()).collect();
        for p in &poles {
            let gp = ctx.base_pointed(p).unwrap();
            for q in &poles {
                prop_assert_eq!(change_base_point(&gp, q, &poles), ctx.base_pointed(q).unwrap());
            }
        }
    }

    #[test]
    fn invariants_survive_perturbation(seed in any::<u64>(), n in 1usize..=6) {
        let d = general(seed);
        let (e, _) = perturb(&d, n, seed ^ 0x5eed).unwrap();
        prop_assert_eq!(harness::snapshot(&d, CAP).unwrap(), harness::snapshot(&e, CAP).unwrap());
    }

    #[test]
    fn staked_links_have_vanishing_index(seed in any::<u64>()) {
        let d = random_diagram(Family::Staked, &GenParams::default(), seed);
        let ctx = IndexContext::new(&d).unwrap();
        prop_assert!(ctx.generalized().unwrap().is_zero());
        for p in &d.poles {
            prop_assert!(ctx.base_pointed(&p.id).unwrap().is_zero());
        }
    }

    #[test]
    fn spectrum_is_symmetric_with_triangle_inequality(seed in any::<u64>()) {
        let d = general(seed);
        if !d.flags.pole_labeled || d.poles.len() < 2 {
            return Ok(());
        }
        let (ids, m) = height_spectrum(&d).unwrap();
        for i in 0..m.len() {
            for j in 0..m.len() {
                prop_assert_eq!(m[i][j], m[j][i]);
                // Shortcuts cannot pass through a pole, so the triangle
                // inequality only holds through poles lying in one region.
                if d.poles.iter().find(|p| p.id == ids[j]).unwrap().slots.len() > 1 {
                    continue;
                }
                for k in 0..m.len() {
                    prop_assert!(m[i][k] <= m[i][j] + m[j][k]);
                }
            }
        }
    }

    #[test]
    fn planar_recovery_forgets_to_spherical(seed in any::<u64>(), right in any::<bool>()) {
        let d = random_diagram(Family::Knotoid, &GenParams { max_crossings: 5, ..Default::default() }, seed);
        let arc = d.arcs[(seed % d.arcs.len() as u64) as usize].clone();
        let p = with_point_at_infinity(&d, &arc, if right { Side::R } else { Side::L });
        let planar = recover_published(&p, Target::TuraevPlanar, CAP).unwrap();
        let spherical = recover_published(&d, Target::TuraevSpherical, CAP).unwrap();
        let mut forget = BTreeMap::new();
        forget.insert(Var::generic("B"), bracket::delta());
        prop_assert_eq!(planar.substitute(&forget).unwrap(), spherical);

        let kutluay = recover_published(&p, Target::Kutluay, CAP).unwrap();
        let mut to_turaev = BTreeMap::new();
        to_turaev.insert(Var::generic("l"), gv("u"));
        to_turaev.insert(Var::generic("h"), gv("u").pow(-1).unwrap());
        prop_assert_eq!(kutluay.substitute(&to_turaev).unwrap(), planar);
    }
}
