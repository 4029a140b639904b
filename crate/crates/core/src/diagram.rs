//! Combinatorial-map representation of diagrams on the sphere.
//!
//! Slots of crossings and poles are listed counterclockwise. Slot `k` of a
//! crossing sits at angle `90k` degrees; the strand entering at slot `k`
//! leaves through slot `k + 2`.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum End {
    Tail,
    Head,
}

impl End {
    pub fn flip(self) -> End {
        match self {
            End::Tail => End::Head,
            End::Head => End::Tail,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            End::Tail => "tail",
            End::Head => "head",
        }
    }
}

/// One end of an arc.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dart {
    pub arc: String,
    pub end: End,
}

impl Dart {
    pub fn new(arc: impl Into<String>, end: End) -> Dart {
        Dart {
            arc: arc.into(),
            end,
        }
    }

    pub fn tail(arc: impl Into<String>) -> Dart {
        Dart::new(arc, End::Tail)
    }

    pub fn head(arc: impl Into<String>) -> Dart {
        Dart::new(arc, End::Head)
    }
}

impl fmt::Display for Dart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.arc, self.end.as_str())
    }
}

/// Which opposite slot pair carries the over-strand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Over {
    /// Slots 0 and 2.
    Even,
    /// Slots 1 and 3.
    Odd,
}

impl Over {
    pub fn flip(self) -> Over {
        match self {
            Over::Even => Over::Odd,
            Over::Odd => Over::Even,
        }
    }

    pub fn is_over(self, slot: usize) -> bool {
        (slot % 2 == 0) == (self == Over::Even)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Over::Even => "02",
            Over::Odd => "13",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Crossing {
    pub id: String,
    pub slots: [Dart; 4],
    pub over: Over,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pole {
    pub id: String,
    pub slots: Vec<Dart>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Segment,
    Loop,
}

/// Direction in which a trace step runs along an arc: `Fwd` is tail to head.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    Fwd,
    Bwd,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::Fwd => Dir::Bwd,
            Dir::Bwd => Dir::Fwd,
        }
    }

    pub fn is_fwd(self) -> bool {
        self == Dir::Fwd
    }

    /// End of the arc where a step in this direction starts.
    pub fn entry(self) -> End {
        match self {
            Dir::Fwd => End::Tail,
            Dir::Bwd => End::Head,
        }
    }

    pub fn exit(self) -> End {
        self.entry().flip()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constituent {
    pub id: String,
    pub kind: Kind,
    pub trace: Vec<(String, Dir)>,
    pub from: Option<String>,
    pub to: Option<String>,
}

/// Side of an arc relative to its tail-to-head direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::L => Side::R,
            Side::R => Side::L,
        }
    }

    pub fn idx(self) -> usize {
        match self {
            Side::L => 0,
            Side::R => 1,
        }
    }

    pub fn from_idx(i: usize) -> Side {
        if i == 0 {
            Side::L
        } else {
            Side::R
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::L => "L",
            Side::R => "R",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArcSide {
    pub arc: String,
    pub side: Side,
}

impl ArcSide {
    pub fn new(arc: impl Into<String>, side: Side) -> ArcSide {
        ArcSide {
            arc: arc.into(),
            side,
        }
    }
}

impl fmt::Display for ArcSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.arc, self.side.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Witness {
    Root,
    Sphere,
    Arc(ArcSide),
}

/// Places one connected component into a face of the components placed
/// before it. `outer` picks the face of the placed component that opens onto
/// the host; when absent it is the right side of the component's first arc.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Placement {
    pub component: usize,
    pub witness: Witness,
    pub outer: Option<ArcSide>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Flags {
    pub oriented: bool,
    pub pole_labeled: bool,
    pub constituent_labeled: bool,
}

impl Default for Flags {
    fn default() -> Self {
        Flags {
            oriented: true,
            pole_labeled: true,
            constituent_labeled: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Diagram {
    pub poles: Vec<Pole>,
    pub arcs: Vec<String>,
    pub crossings: Vec<Crossing>,
    pub constituents: Vec<Constituent>,
    pub placements: Vec<Placement>,
    pub flags: Flags,
}

impl Diagram {
    pub fn pole(&self, id: &str) -> Option<&Pole> {
        self.poles.iter().find(|p| p.id == id)
    }

    pub fn crossing(&self, id: &str) -> Option<&Crossing> {
        self.crossings.iter().find(|c| c.id == id)
    }

    pub fn constituent(&self, id: &str) -> Option<&Constituent> {
        self.constituents.iter().find(|c| c.id == id)
    }

    pub fn pole_ids(&self) -> Vec<String> {
        self.poles.iter().map(|p| p.id.clone()).collect()
    }

    pub fn segments(&self) -> impl Iterator<Item = &Constituent> {
        self.constituents.iter().filter(|c| c.kind == Kind::Segment)
    }

    pub fn loops(&self) -> impl Iterator<Item = &Constituent> {
        self.constituents.iter().filter(|c| c.kind == Kind::Loop)
    }

    pub fn is_classical_link(&self) -> bool {
        self.poles.is_empty() && self.constituents.iter().all(|c| c.kind == Kind::Loop)
    }

    /// Loops only, with at least one pole and every pole of valency zero.
    pub fn is_staked_link(&self) -> bool {
        !self.poles.is_empty()
            && self.poles.iter().all(|p| p.slots.is_empty())
            && self.constituents.iter().all(|c| c.kind == Kind::Loop)
    }

    pub fn is_knotoid(&self) -> bool {
        self.poles.len() == 2
            && self.constituents.len() == 1
            && self.constituents[0].kind == Kind::Segment
            && self.constituents[0].from != self.constituents[0].to
    }
}
