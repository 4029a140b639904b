//! Seeded random diagrams for test harnesses.
//!
//! A crossing-free skeleton (poles, single-arc segments, free loops and
//! isolated poles, placed into random faces) is built first; crossings come
//! from random insertion moves, after which over/under data is randomized and
//! some arcs have their stored direction reversed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagram::*;
use crate::moves::{apply_move, MoveSite};
use crate::topo::{checked, Topo};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Any mix of segments, loops and isolated poles.
    General,
    /// One segment between poles `L` and `H`.
    Knotoid,
    /// Loops only, no poles.
    Classical,
    /// Loops plus valency-zero poles.
    Staked,
}

#[derive(Clone, Copy, Debug)]
pub struct GenParams {
    pub max_crossings: usize,
    pub max_poles: usize,
    pub max_constituents: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            max_crossings: 8,
            max_poles: 4,
            max_constituents: 3,
        }
    }
}

const POLE_NAMES: [&str; 6] = ["P", "Q", "R", "S", "T", "U"];

struct Skeleton {
    poles: Vec<String>,
    /// `(from, to)` pole indices.
    segments: Vec<(usize, usize)>,
    loops: usize,
}

fn skeleton(family: Family, p: &GenParams, rng: &mut ChaCha8Rng) -> Skeleton {
    match family {
        Family::Knotoid => Skeleton {
            poles: vec!["L".into(), "H".into()],
            segments: vec![(0, 1)],
            loops: 0,
        },
        Family::Classical => Skeleton {
            poles: vec![],
            segments: vec![],
            loops: rng.gen_range(1..=p.max_constituents.max(1)),
        },
        Family::Staked => Skeleton {
            poles: POLE_NAMES[..rng.gen_range(1..=p.max_poles.clamp(1, 6))]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            segments: vec![],
            loops: rng.gen_range(1..=p.max_constituents.max(1)),
        },
        Family::General => {
            let np = rng.gen_range(1..=p.max_poles.clamp(1, 6));
            let nc = rng.gen_range(1..=p.max_constituents.max(1));
            let mut segments = Vec::new();
            let mut loops = 0;
            for _ in 0..nc {
                if np >= 2 && rng.gen_bool(0.6) {
                    let a = rng.gen_range(0..np);
                    let mut b = rng.gen_range(0..np - 1);
                    if b >= a {
                        b += 1;
                    }
                    segments.push((a, b));
                } else {
                    loops += 1;
                }
            }
            Skeleton {
                poles: POLE_NAMES[..np].iter().map(|s| s.to_string()).collect(),
                segments,
                loops,
            }
        }
    }
}

/// Crossing-free diagram for a skeleton, with random pole rotations and
/// placements. Retries rotations until every component is spherical.
fn embed(sk: &Skeleton, rng: &mut ChaCha8Rng) -> Diagram {
    let mut d = Diagram::default();
    let mut n_arc = 0;
    let mut slots: Vec<Vec<Dart>> = vec![Vec::new(); sk.poles.len()];
    for (i, &(a, b)) in sk.segments.iter().enumerate() {
        n_arc += 1;
        let arc = format!("a{n_arc}");
        slots[a].push(Dart::tail(&arc));
        slots[b].push(Dart::head(&arc));
        d.arcs.push(arc.clone());
        d.constituents.push(Constituent {
            id: format!("e{}", i + 1),
            kind: Kind::Segment,
            trace: vec![(arc, Dir::Fwd)],
            from: Some(sk.poles[a].clone()),
            to: Some(sk.poles[b].clone()),
        });
    }
    for j in 0..sk.loops {
        n_arc += 1;
        let arc = format!("a{n_arc}");
        d.arcs.push(arc.clone());
        d.constituents.push(Constituent {
            id: format!("e{}", sk.segments.len() + j + 1),
            kind: Kind::Loop,
            trace: vec![(arc, Dir::Fwd)],
            from: None,
            to: None,
        });
    }
    let t = loop {
        for s in slots.iter_mut() {
            s.shuffle(rng);
        }
        d.poles = sk
            .poles
            .iter()
            .zip(&slots)
            .map(|(id, s)| Pole {
                id: id.clone(),
                slots: s.clone(),
            })
            .collect();
        if let Ok(t) = Topo::build_opts(&d, false) {
            break t;
        }
    };
    d.placements = random_placements(&t, rng);
    d
}

fn random_placements(t: &Topo, rng: &mut ChaCha8Rng) -> Vec<Placement> {
    let mut out = Vec::new();
    if t.n_comp == 0 {
        return out;
    }
    out.push(Placement {
        component: 0,
        witness: Witness::Root,
        outer: None,
    });
    let comp_arcs = |c: usize| -> Vec<usize> { (0..t.n_arcs()).filter(|&a| t.comp_of_arc[a] == c).collect() };
    let side = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.5) { Side::L } else { Side::R };
    let mut hosts: Vec<usize> = Vec::new();
    if t.comp_first_arc[0].is_some() {
        hosts.extend(comp_arcs(0));
    }
    for c in 1..t.n_comp {
        if hosts.is_empty() {
            out.push(Placement {
                component: c,
                witness: Witness::Sphere,
                outer: None,
            });
            continue;
        }
        let h = hosts[rng.gen_range(0..hosts.len())];
        let witness = Witness::Arc(ArcSide::new(t.arc_ids[h].clone(), side(rng)));
        let mine = comp_arcs(c);
        let outer = if mine.is_empty() || rng.gen_bool(0.5) {
            None
        } else {
            let a = mine[rng.gen_range(0..mine.len())];
            Some(ArcSide::new(t.arc_ids[a].clone(), side(rng)))
        };
        out.push(Placement {
            component: c,
            witness,
            outer,
        });
        hosts.extend(mine);
    }
    out
}

/// Adds crossings with random insertion and triangle moves.
fn add_crossings(mut d: Diagram, target: usize, max: usize, rng: &mut ChaCha8Rng) -> Diagram {
    let mut guard = 0;
    while d.crossings.len() < target && guard < 4 * max + 8 {
        guard += 1;
        let sites: Vec<MoveSite> = crate::moves::enumerate_moves(&d)
            .expect("valid")
            .into_iter()
            .filter(|s| s.delta() >= 0 && d.crossings.len() as i64 + s.delta() <= max as i64)
            .filter(|s| !matches!(s, MoveSite::R2Plus { far: true, .. }))
            .collect();
        let r2: Vec<&MoveSite> = sites.iter().filter(|s| matches!(s, MoveSite::R2Plus { .. })).collect();
        let others: Vec<&MoveSite> = sites.iter().filter(|s| !matches!(s, MoveSite::R2Plus { .. })).collect();
        let pick = if !r2.is_empty() && (others.is_empty() || rng.gen_bool(0.7)) {
            r2[rng.gen_range(0..r2.len())]
        } else if !others.is_empty() {
            others[rng.gen_range(0..others.len())]
        } else {
            break;
        };
        d = apply_move(&d, pick).expect("enumerated move applies");
    }
    d
}

/// Flips the stored direction of an arc without changing the diagram.
pub fn reverse_arc(d: &mut Diagram, arc: &str) {
    let t = checked(d).expect("valid");
    let ai = t.arc_index[arc];
    let comp = t.comp_of_arc[ai];
    let first = t.comp_first_arc[comp];
    for c in d.crossings.iter_mut() {
        for s in c.slots.iter_mut() {
            if s.arc == arc {
                s.end = s.end.flip();
            }
        }
    }
    for p in d.poles.iter_mut() {
        for s in p.slots.iter_mut() {
            if s.arc == arc {
                s.end = s.end.flip();
            }
        }
    }
    for c in d.constituents.iter_mut() {
        for step in c.trace.iter_mut() {
            if step.0 == arc {
                step.1 = step.1.flip();
            }
        }
    }
    for p in d.placements.iter_mut() {
        if let Witness::Arc(w) = &mut p.witness {
            if w.arc == arc {
                w.side = w.side.flip();
            }
        }
        if p.component == comp && p.outer.is_none() && first == Some(ai) {
            p.outer = Some(ArcSide::new(arc, Side::L));
        } else if let Some(o) = &mut p.outer {
            if o.arc == arc {
                o.side = o.side.flip();
            }
        }
    }
}

pub fn random_diagram(family: Family, params: &GenParams, seed: u64) -> Diagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sk = skeleton(family, params, &mut rng);
    let d = embed(&sk, &mut rng);
    let target = rng.gen_range(0..=params.max_crossings);
    let mut d = add_crossings(d, target, params.max_crossings, &mut rng);
    for c in d.crossings.iter_mut() {
        if rng.gen_bool(0.5) {
            c.over = c.over.flip();
        }
    }
    let arcs = d.arcs.clone();
    for a in arcs {
        if rng.gen_bool(0.25) {
            reverse_arc(&mut d, &a);
        }
    }
    debug_assert!(checked(&d).is_ok());
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_diagrams_are_valid() {
        let p = GenParams::default();
        for fam in [Family::General, Family::Knotoid, Family::Classical, Family::Staked] {
            for seed in 0..30 {
                let d = random_diagram(fam, &p, seed);
                assert!(checked(&d).is_ok(), "{fam:?} {seed}");
                assert!(d.crossings.len() <= p.max_crossings);
                assert_eq!(d, random_diagram(fam, &p, seed));
            }
        }
    }
}
