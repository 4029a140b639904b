//! Named reference diagrams.

use crate::diagram::*;

fn x(id: &str, slots: [(&str, End); 4], over: Over) -> Crossing {
    Crossing {
        id: id.into(),
        slots: slots.map(|(a, e)| Dart::new(a, e)),
        over,
    }
}

fn pole(id: &str, slots: &[(&str, End)]) -> Pole {
    Pole {
        id: id.into(),
        slots: slots.iter().map(|(a, e)| Dart::new(*a, *e)).collect(),
    }
}

fn fwd(arcs: &[&str]) -> Vec<(String, Dir)> {
    arcs.iter().map(|a| (a.to_string(), Dir::Fwd)).collect()
}

fn lp(id: &str, arcs: &[&str]) -> Constituent {
    Constituent {
        id: id.into(),
        kind: Kind::Loop,
        trace: fwd(arcs),
        from: None,
        to: None,
    }
}

fn seg(id: &str, arcs: &[&str], from: &str, to: &str) -> Constituent {
    Constituent {
        id: id.into(),
        kind: Kind::Segment,
        trace: fwd(arcs),
        from: Some(from.into()),
        to: Some(to.into()),
    }
}

fn root(component: usize) -> Placement {
    Placement {
        component,
        witness: Witness::Root,
        outer: None,
    }
}

fn inside(component: usize, arc: &str, side: Side) -> Placement {
    Placement {
        component,
        witness: Witness::Arc(ArcSide::new(arc, side)),
        outer: None,
    }
}

fn arcs(ids: &[&str]) -> Vec<String> {
    ids.iter().map(|s| s.to_string()).collect()
}

use End::{Head as H, Tail as T};

/// One crossing-free loop.
pub fn unknot() -> Diagram {
    Diagram {
        arcs: arcs(&["a"]),
        constituents: vec![lp("e", &["a"])],
        placements: vec![root(0)],
        ..Default::default()
    }
}

/// One crossing-free segment from `P` to `Q`.
pub fn seg1() -> Diagram {
    Diagram {
        poles: vec![pole("P", &[("a", T)]), pole("Q", &[("a", H)])],
        arcs: arcs(&["a"]),
        constituents: vec![seg("e", &["a"], "P", "Q")],
        placements: vec![root(0)],
        ..Default::default()
    }
}

/// Two-crossing Hopf link with both crossings positive.
pub fn hopf() -> Diagram {
    Diagram {
        arcs: arcs(&["a", "a2", "b", "b2"]),
        crossings: vec![
            x("c1", [("a2", T), ("b", H), ("a", H), ("b2", T)], Over::Odd),
            x("c2", [("b", T), ("a2", H), ("b2", H), ("a", T)], Over::Odd),
        ],
        constituents: vec![lp("e1", &["a", "a2"]), lp("e2", &["b", "b2"])],
        placements: vec![root(0)],
        ..Default::default()
    }
}

/// Positive trefoil, PD code X[1,5,2,4] X[3,1,4,6] X[5,3,6,2].
pub fn trefoil() -> Diagram {
    Diagram {
        arcs: arcs(&["x1", "x2", "x3", "x4", "x5", "x6"]),
        crossings: vec![
            x("X1", [("x1", H), ("x5", T), ("x2", T), ("x4", H)], Over::Odd),
            x("X2", [("x3", H), ("x1", T), ("x4", T), ("x6", H)], Over::Odd),
            x("X3", [("x5", H), ("x3", T), ("x6", T), ("x2", H)], Over::Odd),
        ],
        constituents: vec![lp("e", &["x1", "x2", "x3", "x4", "x5", "x6"])],
        placements: vec![root(0)],
        ..Default::default()
    }
}

/// Two segments crossing once, positively.
pub fn half() -> Diagram {
    Diagram {
        poles: vec![
            pole("P1", &[("u1", T)]),
            pole("P2", &[("u2", H)]),
            pole("P3", &[("v1", T)]),
            pole("P4", &[("v2", H)]),
        ],
        arcs: arcs(&["u1", "u2", "v1", "v2"]),
        crossings: vec![x("c", [("u1", H), ("v1", H), ("u2", T), ("v2", T)], Over::Even)],
        constituents: vec![seg("e1", &["u1", "u2"], "P1", "P2"), seg("e2", &["v1", "v2"], "P3", "P4")],
        placements: vec![root(0)],
        ..Default::default()
    }
}

fn kink(over: Over) -> Diagram {
    Diagram {
        arcs: arcs(&["x", "y"]),
        crossings: vec![x("c", [("y", H), ("y", T), ("x", T), ("x", H)], over)],
        constituents: vec![lp("e", &["x", "y"])],
        placements: vec![root(0)],
        ..Default::default()
    }
}

/// Unknot with one positive kink.
pub fn kink_pos() -> Diagram {
    kink(Over::Odd)
}

/// Unknot with one negative kink.
pub fn kink_neg() -> Diagram {
    kink(Over::Even)
}

/// Poles `P`, `Q` beside a single loop, both outside it.
pub fn nest0() -> Diagram {
    Diagram {
        poles: vec![pole("P", &[]), pole("Q", &[])],
        arcs: arcs(&["a1"]),
        constituents: vec![lp("l1", &["a1"])],
        placements: vec![root(0), inside(1, "a1", Side::R), inside(2, "a1", Side::R)],
        flags: Flags::default(),
        ..Default::default()
    }
}

/// `P` inside a loop, `Q` outside.
pub fn nest1() -> Diagram {
    Diagram {
        placements: vec![root(0), inside(1, "a1", Side::L), inside(2, "a1", Side::R)],
        ..nest0()
    }
}

/// `P` inside two nested loops, `Q` outside both.
pub fn nest2() -> Diagram {
    Diagram {
        poles: vec![pole("P", &[]), pole("Q", &[])],
        arcs: arcs(&["a1", "a2"]),
        constituents: vec![lp("l1", &["a1"]), lp("l2", &["a2"])],
        placements: vec![
            root(0),
            inside(1, "a1", Side::L),
            inside(2, "a2", Side::L),
            inside(3, "a1", Side::R),
        ],
        ..Default::default()
    }
}

/// All named fixtures with their file stems.
pub fn all() -> Vec<(&'static str, Diagram)> {
    vec![
        ("fix-unknot", unknot()),
        ("fix-seg1", seg1()),
        ("fix-hopf", hopf()),
        ("fix-trefoil", trefoil()),
        ("fix-half", half()),
        ("fix-kink-pos", kink_pos()),
        ("fix-kink-neg", kink_neg()),
        ("fix-nest0", nest0()),
        ("fix-nest1", nest1()),
        ("fix-nest2", nest2()),
    ]
}
