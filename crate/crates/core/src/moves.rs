//! Reidemeister moves away from poles, random walks and bounded
//! simplification.
//!
//! Moves are applied to a mutable net in which every arc runs along its
//! constituent. Each arc side carries a region token (the global region it
//! bounded before the move, or a fresh token for newly created regions), and
//! placements are rebuilt from the tokens afterwards.

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagram::*;
use crate::error::{Error, Result};
use crate::regions::RegionMap;
use crate::topo::{checked, end_idx, Attach, Topo};

/// Crossing count above which `perturb` stops choosing insertions.
pub const PERTURB_CROSSING_CAP: usize = 12;

/// Width of the beam kept per level by [`simplify`].
pub const SIMPLIFY_BEAM: usize = 64;

/// A place where a move applies. Sides of `R1+` are taken relative to the
/// direction of travel along the constituent; `R2+` sides are arc sides.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum MoveSite {
    #[serde(rename = "R1+")]
    R1Plus { arc: String, side: Side, over_first: bool },
    #[serde(rename = "R1-")]
    /// Removes the monogon bounded by arc `lobe` at `crossing`.
    R1Minus { crossing: String, lobe: String },
    #[serde(rename = "R2+")]
    R2Plus {
        a: String,
        side_a: Side,
        b: String,
        side_b: Side,
        a_over: bool,
        /// When the finger splits a face, components floating in it move
        /// to the piece across the finger instead of the piece beside `a`.
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        far: bool,
    },
    #[serde(rename = "R2-")]
    R2Minus { crossings: [String; 2], arcs: [String; 2] },
    #[serde(rename = "R3")]
    R3 { crossings: [String; 3], arcs: [String; 3] },
}

impl MoveSite {
    /// Change in crossing count.
    pub fn delta(&self) -> i64 {
        match self {
            MoveSite::R1Plus { .. } => 1,
            MoveSite::R1Minus { .. } => -1,
            MoveSite::R2Plus { .. } => 2,
            MoveSite::R2Minus { .. } => -2,
            MoveSite::R3 { .. } => 0,
        }
    }
}

// ---------------------------------------------------------------------------
// Face helpers on the validated diagram.

fn half_arc(h: usize) -> usize {
    h / 2
}

/// Vertex and slot a half-edge departs from.
fn depart(t: &Topo, h: usize) -> Attach {
    let a = h / 2;
    t.ends[a][h % 2]
}

/// Whether the global region of a face holds nothing but the face itself.
fn globally_empty(t: &Topo, rm: &RegionMap, f: usize) -> bool {
    let r = rm.face_region[f];
    rm.region_sides[r].len() == t.faces[f].len() && rm.region_poles[r].is_empty()
}

/// Whether other components float in the global region of face `f`.
fn hosts_others(t: &Topo, rm: &RegionMap, f: usize) -> bool {
    let r = rm.face_region[f];
    let own = t.face_comp[f];
    rm.region_sides[r].iter().any(|&(a, _)| t.comp_of_arc[a] != own)
        || rm.region_poles[r].iter().any(|&p| t.comp_of_pole[p] != own)
}

fn crossing_of(at: Attach) -> Option<(usize, usize)> {
    match at {
        Attach::Crossing(c, k) => Some((c, k)),
        _ => None,
    }
}

/// Corners `(crossing, departing slot)` of a face whose vertices are all
/// crossings, in traversal order.
fn face_corners(t: &Topo, f: usize) -> Option<Vec<(usize, usize)>> {
    t.faces[f].iter().map(|&h| crossing_of(depart(t, h))).collect()
}

fn over_at(t: &Topo, c: usize, k: usize) -> bool {
    t.is_over(c, k % 4)
}

/// Lobe arcs of the empty monogons at crossing `c`, in arc order.
fn r1_lobes(t: &Topo, rm: &RegionMap, c: usize) -> Vec<usize> {
    let mut v: Vec<usize> = t
        .faces
        .iter()
        .enumerate()
        .filter(|(_, hs)| hs.len() == 1)
        .map(|(f, hs)| (f, half_arc(hs[0])))
        .filter(|&(f, a)| {
            !t.is_free_arc(a) && crossing_of(t.ends[a][0]).map(|x| x.0) == Some(c) && globally_empty(t, rm, f)
        })
        .map(|(_, a)| a)
        .collect();
    v.sort();
    v
}

/// Strand-aligned side of an arc: sides flip for arcs traversed backwards.
fn net_side(t: &Topo, a: usize, s: Side) -> Side {
    if t.arc_dir[a].is_fwd() {
        s
    } else {
        s.flip()
    }
}

pub fn enumerate_moves(d: &Diagram) -> Result<Vec<MoveSite>> {
    let t = checked(d)?;
    let rm = RegionMap::build(d, &t)?;
    Ok(enumerate_with(&t, &rm))
}

fn enumerate_with(t: &Topo, rm: &RegionMap) -> Vec<MoveSite> {
    let mut out = Vec::new();
    let n = t.n_arcs();
    for a in 0..n {
        for side in [Side::L, Side::R] {
            for over_first in [true, false] {
                out.push(MoveSite::R1Plus {
                    arc: t.arc_ids[a].clone(),
                    side,
                    over_first,
                });
            }
        }
    }
    for c in 0..t.n_crossings() {
        for a in r1_lobes(t, rm, c) {
            out.push(MoveSite::R1Minus {
                crossing: t_crossing_id(t, c),
                lobe: t.arc_ids[a].clone(),
            });
        }
    }
    for a in 0..n {
        for b in 0..n {
            for sa in [Side::L, Side::R] {
                for sb in [Side::L, Side::R] {
                    if rm.region_of(a, sa) != rm.region_of(b, sb) {
                        continue;
                    }
                    if a == b && t.face(a, sa) != t.face(a, sb) {
                        continue;
                    }
                    let f = t.face(a, sa);
                    let split = f == t.face(b, sb) && hosts_others(t, rm, f);
                    for far in [false, true] {
                        if far && !split {
                            continue;
                        }
                        for a_over in [true, false] {
                            out.push(MoveSite::R2Plus {
                                a: t.arc_ids[a].clone(),
                                side_a: sa,
                                b: t.arc_ids[b].clone(),
                                side_b: sb,
                                a_over,
                                far,
                            });
                        }
                    }
                }
            }
        }
    }
    for (f, hs) in t.faces.iter().enumerate() {
        match hs.len() {
            2 => {
                if let Some(site) = r2_minus_site(t, rm, f) {
                    out.push(site);
                }
            }
            3 => {
                if let Some(site) = r3_site(t, rm, f) {
                    out.push(site);
                }
            }
            _ => {}
        }
    }
    out
}

fn t_crossing_id(t: &Topo, c: usize) -> String {
    // The index is built from the crossing list, so invert it.
    t.crossing_index
        .iter()
        .find(|(_, &i)| i == c)
        .map(|(k, _)| k.clone())
        .expect("crossing index")
}

fn r2_minus_site(t: &Topo, rm: &RegionMap, f: usize) -> Option<MoveSite> {
    let hs = &t.faces[f];
    let corners = face_corners(t, f)?;
    let (x, y) = (half_arc(hs[0]), half_arc(hs[1]));
    let (c1, c2) = (corners[0].0, corners[1].0);
    if x == y || c1 == c2 || !globally_empty(t, rm, f) {
        return None;
    }
    // x departs c1 at corners[0].1 and arrives at c2 in the slot after
    // corners[1].1; the same strand must be over at both.
    let x_over_c1 = over_at(t, c1, corners[0].1);
    let x_over_c2 = over_at(t, c2, corners[1].1 + 1);
    if x_over_c1 != x_over_c2 {
        return None;
    }
    let mut cs = [t_crossing_id(t, c1), t_crossing_id(t, c2)];
    let mut arcs = [t.arc_ids[x].clone(), t.arc_ids[y].clone()];
    cs.sort();
    arcs.sort();
    Some(MoveSite::R2Minus { crossings: cs, arcs })
}

fn r3_site(t: &Topo, rm: &RegionMap, f: usize) -> Option<MoveSite> {
    let hs = &t.faces[f];
    let v = face_corners(t, f)?;
    let arcs: BTreeSet<usize> = hs.iter().map(|&h| half_arc(h)).collect();
    let cs: BTreeSet<usize> = v.iter().map(|x| x.0).collect();
    if arcs.len() != 3 || cs.len() != 3 || !globally_empty(t, rm, f) {
        return None;
    }
    let (o1, o2, o3) = r3_pattern(t, &v);
    if (o1 && o3 && !o2) || (!o1 && !o3 && o2) {
        return None;
    }
    let mut c = [t_crossing_id(t, v[0].0), t_crossing_id(t, v[1].0), t_crossing_id(t, v[2].0)];
    let mut a: Vec<String> = arcs.iter().map(|&x| t.arc_ids[x].clone()).collect();
    c.sort();
    a.sort();
    Some(MoveSite::R3 {
        crossings: c,
        arcs: [a[0].clone(), a[1].clone(), a[2].clone()],
    })
}

/// `(S03 over S14, S03 over S25, S14 over S25)` for a triangle with corners
/// `(V_j, k_j)`, `k_j` pointing at `V_{j+1}`.
fn r3_pattern(t: &Topo, v: &[(usize, usize)]) -> (bool, bool, bool) {
    (
        over_at(t, v[0].0, v[0].1),
        over_at(t, v[1].0, v[1].1 + 1),
        over_at(t, v[2].0, v[2].1),
    )
}

// ---------------------------------------------------------------------------
// Mutable net.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum At {
    X(usize, usize),
    P(usize, usize),
    Free,
}

#[derive(Clone, Debug)]
struct NArc {
    id: String,
    ends: [At; 2],
    side: [usize; 2],
    alive: bool,
}

#[derive(Clone, Debug)]
struct NCross {
    id: String,
    slots: [(usize, End); 4],
    over_even: bool,
    alive: bool,
}

#[derive(Clone, Debug)]
struct NPole {
    id: String,
    slots: Vec<(usize, End)>,
    token: usize,
}

#[derive(Clone, Debug)]
struct NCon {
    id: String,
    kind: Kind,
    trace: Vec<usize>,
    from: Option<String>,
    to: Option<String>,
}

struct Net {
    arcs: Vec<NArc>,
    xs: Vec<NCross>,
    poles: Vec<NPole>,
    cons: Vec<NCon>,
    flags: Flags,
    tokens: usize,
    unions: Vec<(usize, usize)>,
    /// A split region keeps its token on the face containing this side.
    /// Region token, arc, side and far flag choosing the host piece of a split face.
    anchor: Option<(usize, usize, Side, bool)>,
    used_arc_ids: HashSet<String>,
    used_x_ids: HashSet<String>,
}

fn conv(at: Attach) -> At {
    match at {
        Attach::Crossing(c, k) => At::X(c, k),
        Attach::Pole(p, k) => At::P(p, k),
        Attach::Free => At::Free,
    }
}

fn fresh(prefix: &str, used: &mut HashSet<String>) -> String {
    let mut n = 1;
    loop {
        let id = format!("{prefix}{n}");
        if used.insert(id.clone()) {
            return id;
        }
        n += 1;
    }
}

impl Net {
    fn new(d: &Diagram, t: &Topo, rm: &RegionMap) -> Net {
        let flip: Vec<bool> = (0..t.n_arcs()).map(|a| !t.arc_dir[a].is_fwd()).collect();
        let fe = |a: usize, e: End| if flip[a] { e.flip() } else { e };
        let arcs = (0..t.n_arcs())
            .map(|a| {
                let mut ends = [conv(t.ends[a][0]), conv(t.ends[a][1])];
                let mut side = rm.arc_regions[a];
                if flip[a] {
                    ends.swap(0, 1);
                    side.swap(0, 1);
                }
                NArc {
                    id: t.arc_ids[a].clone(),
                    ends,
                    side,
                    alive: true,
                }
            })
            .collect();
        let xs = d
            .crossings
            .iter()
            .enumerate()
            .map(|(c, x)| NCross {
                id: x.id.clone(),
                slots: t.xslots[c].map(|(a, e)| (a, fe(a, e))),
                over_even: t.over_even[c],
                alive: true,
            })
            .collect();
        let poles = d
            .poles
            .iter()
            .enumerate()
            .map(|(p, pole)| NPole {
                id: pole.id.clone(),
                slots: t.pslots[p].iter().map(|&(a, e)| (a, fe(a, e))).collect(),
                token: rm.pole_regions[p].first().copied().unwrap_or(0),
            })
            .collect();
        let cons = d
            .constituents
            .iter()
            .enumerate()
            .map(|(ci, c)| NCon {
                id: c.id.clone(),
                kind: c.kind,
                trace: t.traces[ci].iter().map(|x| x.0).collect(),
                from: c.from.clone(),
                to: c.to.clone(),
            })
            .collect();
        Net {
            arcs,
            xs,
            poles,
            cons,
            flags: d.flags,
            tokens: rm.n(),
            unions: Vec::new(),
            anchor: None,
            used_arc_ids: d.arcs.iter().cloned().collect(),
            used_x_ids: d.crossings.iter().map(|c| c.id.clone()).collect(),
        }
    }

    fn token(&mut self) -> usize {
        self.tokens += 1;
        self.tokens - 1
    }

    fn new_arc(&mut self, side: [usize; 2]) -> usize {
        let id = fresh("a", &mut self.used_arc_ids);
        self.arcs.push(NArc {
            id,
            ends: [At::Free, At::Free],
            side,
            alive: true,
        });
        self.arcs.len() - 1
    }

    fn new_cross(&mut self, over_even: bool) -> usize {
        let id = fresh("c", &mut self.used_x_ids);
        self.xs.push(NCross {
            id,
            slots: [(usize::MAX, End::Tail); 4],
            over_even,
            alive: true,
        });
        self.xs.len() - 1
    }

    fn set(&mut self, arc: usize, end: End, at: At) {
        self.arcs[arc].ends[end_idx(end)] = at;
        match at {
            At::X(c, k) => self.xs[c].slots[k] = (arc, end),
            At::P(p, k) => self.poles[p].slots[k] = (arc, end),
            At::Free => {}
        }
    }

    fn is_free(&self, a: usize) -> bool {
        self.arcs[a].ends[0] == At::Free
    }

    fn locate(&self, a: usize) -> (usize, usize) {
        for (ci, c) in self.cons.iter().enumerate() {
            if let Some(i) = c.trace.iter().position(|&x| x == a) {
                return (ci, i);
            }
        }
        panic!("arc {a} is in no trace")
    }

    fn splice(&mut self, a: usize, with: &[usize]) {
        let (ci, i) = self.locate(a);
        self.cons[ci].trace.splice(i..=i, with.iter().copied());
    }

    fn drop_from_trace(&mut self, a: usize) {
        let (ci, i) = self.locate(a);
        self.cons[ci].trace.remove(i);
    }

    fn kill_arc(&mut self, a: usize) {
        self.drop_from_trace(a);
        self.arcs[a].alive = false;
    }

    fn r1_plus(&mut self, a: usize, side: Side, over_first: bool) {
        let c = self.new_cross(over_first);
        let s2 = if side == Side::L { 3 } else { 1 };
        let tok = self.arcs[a].side;
        let lobe = self.token();
        let mut lobe_side = [tok[side.idx()]; 2];
        lobe_side[side.idx()] = lobe;
        let a2 = self.new_arc(lobe_side);
        self.set(a2, End::Tail, At::X(c, 2));
        self.set(a2, End::Head, At::X(c, s2));
        if self.is_free(a) {
            self.set(a, End::Tail, At::X(c, (s2 + 2) % 4));
            self.set(a, End::Head, At::X(c, 0));
            self.splice(a, &[a, a2]);
        } else {
            let head = self.arcs[a].ends[1];
            let a3 = self.new_arc(tok);
            self.set(a, End::Head, At::X(c, 0));
            self.set(a3, End::Tail, At::X(c, (s2 + 2) % 4));
            self.set(a3, End::Head, head);
            self.splice(a, &[a, a2, a3]);
        }
    }

    /// Merges `n` into `p`, where `p`'s head and `n`'s tail sat at removed
    /// crossings. Returns the surviving arc.
    fn join(&mut self, p: usize, n: usize) {
        if p == n {
            self.arcs[p].ends = [At::Free, At::Free];
            return;
        }
        let head = self.arcs[n].ends[1];
        for i in 0..2 {
            self.unions.push((self.arcs[p].side[i], self.arcs[n].side[i]));
        }
        self.kill_arc(n);
        self.set(p, End::Head, head);
    }

    fn r1_minus(&mut self, x: usize) {
        let At::X(c, tx) = self.arcs[x].ends[0] else { unreachable!() };
        let At::X(_, hx) = self.arcs[x].ends[1] else { unreachable!() };
        let a1 = self.xs[c].slots[(tx + 2) % 4].0;
        let a3 = self.xs[c].slots[(hx + 2) % 4].0;
        self.kill_arc(x);
        self.xs[c].alive = false;
        self.join(a1, a3);
    }

    fn r2_minus(&mut self, x: usize, y: usize) {
        let mut pairs = Vec::new();
        for z in [x, y] {
            let At::X(ct, kt) = self.arcs[z].ends[0] else { unreachable!() };
            let At::X(ch, kh) = self.arcs[z].ends[1] else { unreachable!() };
            pairs.push((self.xs[ct].slots[(kt + 2) % 4].0, self.xs[ch].slots[(kh + 2) % 4].0));
            self.xs[ct].alive = false;
            self.xs[ch].alive = false;
        }
        self.kill_arc(x);
        self.kill_arc(y);
        let mut rename: HashMap<usize, usize> = HashMap::new();
        let resolve = |r: &HashMap<usize, usize>, mut a: usize| {
            while let Some(&b) = r.get(&a) {
                a = b;
            }
            a
        };
        for (p, n) in pairs {
            let (p, n) = (resolve(&rename, p), resolve(&rename, n));
            self.join(p, n);
            if p != n {
                rename.insert(n, p);
            }
        }
    }

    /// Splits `a` into `a, a2, a3` through two crossing slot pairs.
    fn split3(&mut self, a: usize, a2: usize, first: (At, At), second: (At, At)) -> usize {
        self.set(a2, End::Tail, first.1);
        self.set(a2, End::Head, second.0);
        if self.is_free(a) {
            self.set(a, End::Tail, second.1);
            self.set(a, End::Head, first.0);
            self.splice(a, &[a, a2]);
            a
        } else {
            let head = self.arcs[a].ends[1];
            let a3 = self.new_arc(self.arcs[a].side);
            self.set(a, End::Head, first.0);
            self.set(a3, End::Tail, second.1);
            self.set(a3, End::Head, head);
            self.splice(a, &[a, a2, a3]);
            a3
        }
    }

    fn r2_plus(&mut self, a: usize, sa: Side, b: usize, sb: Side, a_over: bool, far: bool) {
        let (ta, tb) = (self.arcs[a].side, self.arcs[b].side);
        let region = ta[sa.idx()];
        let bigon = self.token();
        let cl = self.new_cross(a_over);
        let cr = self.new_cross(!a_over);
        let mut a2s = [bigon; 2];
        a2s[sa.idx()] = tb[sb.flip().idx()];
        let mut b2s = [bigon; 2];
        b2s[sb.idx()] = ta[sa.flip().idx()];
        let a2 = self.new_arc(a2s);
        let b2 = self.new_arc(b2s);
        let x = |c, k| At::X(c, k);
        // With the shared region between them, `a` runs along +x below it
        // iff its left side faces the region; `b` runs along +x above it iff
        // its right side does.
        let (fa, sa2) = if sa == Side::L {
            ((x(cl, 2), x(cl, 0)), (x(cr, 1), x(cr, 3)))
        } else {
            ((x(cr, 3), x(cr, 1)), (x(cl, 0), x(cl, 2)))
        };
        let (fb, sb2) = if sb == Side::R {
            ((x(cl, 1), x(cl, 3)), (x(cr, 2), x(cr, 0)))
        } else {
            ((x(cr, 0), x(cr, 2)), (x(cl, 3), x(cl, 1)))
        };
        let a3 = self.split3(a, a2, fa, sa2);
        // Against itself, the second strand lies further along the arc.
        let b = if b == a { a3 } else { b };
        self.split3(b, b2, fb, sb2);
        self.anchor = Some((region, a3, sa, far));
    }

    /// Triangle move with corners `(V_j, k_j)`, where slot `k_j` of `V_j`
    /// leads to `V_{j+1}` and corners run counterclockwise around the face.
    fn r3(&mut self, v: [(usize, usize); 3]) {
        let dart = |n: &Net, j: usize, off: usize| n.xs[v[j].0].slots[(v[j].1 + off) % 4];
        let e: Vec<(usize, End)> = [(0, 2), (0, 3), (1, 2), (1, 3), (2, 2), (2, 3)]
            .iter()
            .map(|&(j, o)| dart(self, j, o))
            .collect();
        let (i03, i25, i14) = (dart(self, 0, 0).0, dart(self, 1, 0).0, dart(self, 2, 0).0);
        let ov = |n: &Net, j: usize, off: usize| n.xs[v[j].0].over_even == ((v[j].1 + off) % 2 == 0);
        let (o1, o2, o3) = (ov(self, 0, 0), ov(self, 1, 1), ov(self, 2, 0));
        let incoming = |d: (usize, End)| d.1 == End::Head;
        let (in03, in14, in25) = (incoming(e[0]), incoming(e[1]), incoming(e[2]));
        // Token of the corner sector just clockwise of a dart's slot.
        let corner = |n: &Net, d: (usize, End)| n.arcs[d.0].side[if d.1 == End::Head { 0 } else { 1 }];
        let (o45, o23, o01) = (corner(self, e[5]), corner(self, e[3]), corner(self, e[1]));
        let tri = self.token();
        let sides = |outer: usize, outer_left: bool| if outer_left { [outer, tri] } else { [tri, outer] };
        self.arcs[i03].side = sides(o45, in03);
        self.arcs[i14].side = sides(o23, !in14);
        self.arcs[i25].side = sides(o01, in25);
        let (x1, x2, x3) = (v[0].0, v[1].0, v[2].0);
        self.xs[x1].over_even = o1;
        self.xs[x2].over_even = o2;
        self.xs[x3].over_even = o3;
        let ext = [
            (e[0], At::X(x2, 0)),
            (e[1], At::X(x3, 0)),
            (e[2], At::X(x3, 1)),
            (e[3], At::X(x1, 2)),
            (e[4], At::X(x1, 3)),
            (e[5], At::X(x2, 3)),
        ];
        for ((a, end), at) in ext {
            self.set(a, end, at);
        }
        let internal = [
            (i03, in03, At::X(x2, 2), At::X(x1, 0)),
            (i14, in14, At::X(x3, 2), At::X(x1, 1)),
            (i25, in25, At::X(x3, 3), At::X(x2, 1)),
        ];
        for (a, fwd, from, to) in internal {
            let (tl, hd) = if fwd { (from, to) } else { (to, from) };
            self.set(a, End::Tail, tl);
            self.set(a, End::Head, hd);
        }
    }

    fn to_diagram(&self) -> Result<Diagram> {
        let live: Vec<usize> = (0..self.arcs.len()).filter(|&a| self.arcs[a].alive).collect();
        let name = |a: usize| self.arcs[a].id.clone();
        let dart = |(a, e): (usize, End)| Dart::new(name(a), e);
        let mut d = Diagram {
            poles: self
                .poles
                .iter()
                .map(|p| Pole {
                    id: p.id.clone(),
                    slots: p.slots.iter().map(|&s| dart(s)).collect(),
                })
                .collect(),
            arcs: live.iter().map(|&a| name(a)).collect(),
            crossings: self
                .xs
                .iter()
                .filter(|c| c.alive)
                .map(|c| Crossing {
                    id: c.id.clone(),
                    slots: c.slots.map(dart),
                    over: if c.over_even { Over::Even } else { Over::Odd },
                })
                .collect(),
            constituents: self
                .cons
                .iter()
                .map(|c| Constituent {
                    id: c.id.clone(),
                    kind: c.kind,
                    trace: c.trace.iter().map(|&a| (name(a), Dir::Fwd)).collect(),
                    from: c.from.clone(),
                    to: c.to.clone(),
                })
                .collect(),
            placements: Vec::new(),
            flags: self.flags,
        };
        let t = Topo::build_opts(&d, false).map_err(Error::Validation)?;
        d.placements = self.placements(&t, &live)?;
        Ok(d)
    }

    /// Rebuilds placements from region tokens.
    fn placements(&self, t: &Topo, live: &[usize]) -> Result<Vec<Placement>> {
        let mut uf: Vec<usize> = (0..self.tokens).collect();
        fn find(uf: &mut [usize], mut x: usize) -> usize {
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        fn union(uf: &mut [usize], a: usize, b: usize) {
            let (ra, rb) = (find(uf, a), find(uf, b));
            if ra != rb {
                uf[ra] = rb;
            }
        }
        for &(a, b) in &self.unions {
            union(&mut uf, a, b);
        }
        let tok = |h: usize| self.arcs[live[h / 2]].side[h % 2];
        for hs in &t.faces {
            for w in hs.windows(2) {
                union(&mut uf, tok(w[0]), tok(w[1]));
            }
        }
        let face_class: Vec<usize> = t.faces.iter().map(|hs| find(&mut uf, tok(hs[0]))).collect();

        // Designated face per (class, component).
        let mut by_class: HashMap<usize, HashMap<usize, Vec<usize>>> = HashMap::new();
        for (f, &k) in face_class.iter().enumerate() {
            by_class.entry(k).or_default().entry(t.face_comp[f]).or_default().push(f);
        }
        let anchor_face = self.anchor.map(|(tk, a, s, far)| {
            let ai = live.iter().position(|&x| x == a).expect("anchor arc is live");
            (find(&mut uf, tk), t.face(ai, s), far)
        });
        // members[class] = list of (component, node) where node is a face or
        // an isolated pole (encoded past the faces).
        let nf = t.faces.len();
        let mut members: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
        for (&k, comps) in &by_class {
            for (&comp, fs) in comps {
                let f = if fs.len() == 1 {
                    fs[0]
                } else {
                    match anchor_face {
                        Some((ak, af, false)) if ak == k && fs.contains(&af) => af,
                        Some((ak, af, true)) if ak == k && fs.len() == 2 && fs.contains(&af) => {
                            fs[usize::from(fs[0] == af)]
                        }
                        _ => return Err(Error::Validation(vec!["ambiguous region after move".into()])),
                    }
                };
                members.entry(k).or_default().push((comp, f));
            }
        }
        for comp in 0..t.n_comp {
            if let Some(p) = t.comp_pole[comp] {
                let k = find(&mut uf, self.poles[p].token);
                members.entry(k).or_default().push((comp, nf + p));
            }
        }
        let mut classes: Vec<usize> = members.keys().copied().collect();
        classes.sort();
        for k in &classes {
            members.get_mut(k).unwrap().sort();
        }

        let side_name = |h: usize| ArcSide::new(self.arcs[live[h / 2]].id.clone(), Side::from_idx(h % 2));
        let face_min = |f: usize| t.faces[f].iter().map(|&h| side_name(h)).min().unwrap();

        let mut out = Vec::new();
        let mut placed = vec![false; t.n_comp];
        let has_arcs = t.n_comp > 0 && t.comp_first_arc[0].is_some();
        if t.n_comp == 0 {
            return Ok(out);
        }
        out.push(Placement {
            component: 0,
            witness: Witness::Root,
            outer: None,
        });
        placed[0] = true;
        if !has_arcs {
            for c in 1..t.n_comp {
                out.push(Placement {
                    component: c,
                    witness: Witness::Sphere,
                    outer: None,
                });
            }
            return Ok(out);
        }
        loop {
            let mut progress = false;
            for c in 0..t.n_comp {
                if placed[c] {
                    continue;
                }
                let mut found = None;
                'classes: for k in &classes {
                    let m = &members[k];
                    let Some(&(_, mine)) = m.iter().find(|x| x.0 == c) else { continue };
                    for &(hc, host) in m {
                        if placed[hc] && host < nf {
                            found = Some((host, mine));
                            break 'classes;
                        }
                    }
                }
                if let Some((host, mine)) = found {
                    let outer = if mine >= nf {
                        None
                    } else {
                        let first = t.comp_first_arc[c].unwrap();
                        if t.face(first, Side::R) == mine {
                            None
                        } else {
                            Some(face_min(mine))
                        }
                    };
                    out.push(Placement {
                        component: c,
                        witness: Witness::Arc(face_min(host)),
                        outer,
                    });
                    placed[c] = true;
                    progress = true;
                }
            }
            if !progress {
                break;
            }
        }
        if placed.iter().any(|p| !p) {
            return Err(Error::Validation(vec!["component left unplaced after move".into()]));
        }
        Ok(out)
    }
}

fn find_arc(t: &Topo, id: &str) -> Result<usize> {
    t.arc_index.get(id).copied().ok_or_else(|| Error::StaleMove(format!("unknown arc {id}")))
}

fn find_crossing(t: &Topo, id: &str) -> Result<usize> {
    t.crossing_index
        .get(id)
        .copied()
        .ok_or_else(|| Error::StaleMove(format!("unknown crossing {id}")))
}

/// Applies a move known to be in the enumeration.
fn apply_unchecked(d: &Diagram, t: &Topo, rm: &RegionMap, site: &MoveSite) -> Result<Diagram> {
    let mut net = Net::new(d, t, rm);
    match site {
        MoveSite::R1Plus { arc, side, over_first } => {
            net.r1_plus(find_arc(t, arc)?, *side, *over_first);
        }
        MoveSite::R1Minus { crossing, lobe } => {
            let c = find_crossing(t, crossing)?;
            let x = find_arc(t, lobe)?;
            if !r1_lobes(t, rm, c).contains(&x) {
                return Err(Error::StaleMove(format!("no empty kink {lobe} at {crossing}")));
            }
            net.r1_minus(x);
        }
        MoveSite::R2Plus {
            a,
            side_a,
            b,
            side_b,
            a_over,
            far,
        } => {
            let (ai, bi) = (find_arc(t, a)?, find_arc(t, b)?);
            net.r2_plus(ai, net_side(t, ai, *side_a), bi, net_side(t, bi, *side_b), *a_over, *far);
        }
        MoveSite::R2Minus { arcs, .. } => {
            net.r2_minus(find_arc(t, &arcs[0])?, find_arc(t, &arcs[1])?);
        }
        MoveSite::R3 { .. } => {
            let f = (0..t.faces.len())
                .find(|&f| t.faces[f].len() == 3 && r3_site(t, rm, f).as_ref() == Some(site))
                .ok_or_else(|| Error::StaleMove("no such triangle".into()))?;
            let v = face_corners(t, f).unwrap();
            net.r3([v[0], v[1], v[2]]);
        }
    }
    let out = net.to_diagram()?;
    checked(&out)?;
    Ok(out)
}

pub fn apply_move(d: &Diagram, site: &MoveSite) -> Result<Diagram> {
    let t = checked(d)?;
    let rm = RegionMap::build(d, &t)?;
    if !enumerate_with(&t, &rm).contains(site) {
        return Err(Error::StaleMove(serde_json::to_string(site).unwrap_or_default()));
    }
    apply_unchecked(d, &t, &rm, site)
}

/// Applies `n` uniformly chosen moves; insertions are skipped once the
/// crossing count would exceed `cap`. Returns the result and the script.
pub fn perturb_capped(d: &Diagram, n: usize, seed: u64, cap: usize) -> Result<(Diagram, Vec<MoveSite>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = d.clone();
    let mut script = Vec::new();
    for _ in 0..n {
        let t = checked(&cur)?;
        let rm = RegionMap::build(&cur, &t)?;
        let nx = t.n_crossings() as i64;
        let sites: Vec<MoveSite> = enumerate_with(&t, &rm)
            .into_iter()
            .filter(|s| nx + s.delta() <= cap as i64)
            .collect();
        if sites.is_empty() {
            break;
        }
        let site = sites[rng.gen_range(0..sites.len())].clone();
        cur = apply_unchecked(&cur, &t, &rm, &site)?;
        script.push(site);
    }
    Ok((cur, script))
}

pub fn perturb(d: &Diagram, n: usize, seed: u64) -> Result<(Diagram, Vec<MoveSite>)> {
    perturb_capped(d, n, seed, PERTURB_CROSSING_CAP)
}

/// Replays a move script.
pub fn apply_script(d: &Diagram, script: &[MoveSite]) -> Result<Diagram> {
    let mut cur = d.clone();
    for s in script {
        cur = apply_move(&cur, s)?;
    }
    Ok(cur)
}

/// Beam search over crossing-non-increasing moves, `depth` levels deep.
/// Returns the fewest-crossing diagram seen (the input on ties).
pub fn simplify(d: &Diagram, depth: usize) -> Result<Diagram> {
    let mut best = d.clone();
    let mut best_n = d.crossings.len();
    let mut seen: HashSet<Canon> = HashSet::new();
    seen.insert(canonical(d)?);
    let mut frontier = vec![d.clone()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for f in &frontier {
            let t = checked(f)?;
            let rm = RegionMap::build(f, &t)?;
            for site in enumerate_with(&t, &rm) {
                if site.delta() > 0 {
                    continue;
                }
                let g = apply_unchecked(f, &t, &rm, &site)?;
                if !seen.insert(canonical(&g)?) {
                    continue;
                }
                if g.crossings.len() < best_n {
                    best_n = g.crossings.len();
                    best = g.clone();
                }
                next.push(g);
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_by_key(|g| g.crossings.len());
        next.truncate(SIMPLIFY_BEAM);
        frontier = next;
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Canonical form.

/// Id-free encoding of a diagram; equal iff the diagrams agree up to renaming
/// arcs and crossings, arc orientation and rotation of loop traces.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Canon {
    crossings: Vec<([(u32, u8); 4], bool)>,
    poles: Vec<(String, Vec<(u32, u8)>)>,
    constituents: Vec<(String, bool, Option<String>, Option<String>, Vec<u32>)>,
    regions: Vec<Vec<(u32, u8)>>,
    isolated: Vec<(String, usize)>,
    flags: (bool, bool, bool),
}

struct CanonCtx<'a> {
    d: &'a Diagram,
    t: Topo,
    rm: RegionMap,
    /// Constituent indices sorted by id.
    order: Vec<usize>,
}

impl CanonCtx<'_> {
    fn norm_end(&self, a: usize, e: End) -> u8 {
        let e = if self.t.arc_dir[a].is_fwd() { e } else { e.flip() };
        end_idx(e) as u8
    }

    fn norm_side(&self, a: usize, s: Side) -> u8 {
        net_side(&self.t, a, s).idx() as u8
    }

    fn head_crossing(&self, a: usize) -> Option<usize> {
        let e = self.t.arc_dir[a].exit();
        crossing_of(self.t.attach(a, e)).map(|x| x.0)
    }

    fn tail_crossing(&self, a: usize) -> Option<usize> {
        let e = self.t.arc_dir[a].entry();
        crossing_of(self.t.attach(a, e)).map(|x| x.0)
    }

    fn search(&self, i: usize, labels: &mut Labels, best: &mut Option<Canon>) {
        if i == self.order.len() {
            let enc = self.encode(labels);
            if best.as_ref().map_or(true, |b| enc < *b) {
                *best = Some(enc);
            }
            return;
        }
        let ci = self.order[i];
        let trace: Vec<usize> = self.t.traces[ci].iter().map(|x| x.0).collect();
        let starts: Vec<usize> = if self.d.constituents[ci].kind == Kind::Segment {
            vec![0]
        } else {
            let anchored = (0..trace.len())
                .filter_map(|r| self.tail_crossing(trace[r]).and_then(|c| labels.x[c]).map(|l| (l, r)))
                .min();
            match anchored {
                Some((_, r)) => vec![r],
                None => (0..trace.len()).collect(),
            }
        };
        for r in starts {
            let saved = labels.clone();
            for k in 0..trace.len() {
                let a = trace[(r + k) % trace.len()];
                labels.arc[a] = Some(labels.next_arc);
                labels.next_arc += 1;
                if let Some(c) = self.head_crossing(a) {
                    if labels.x[c].is_none() {
                        labels.x[c] = Some(labels.next_x);
                        labels.next_x += 1;
                    }
                }
            }
            self.search(i + 1, labels, best);
            *labels = saved;
        }
    }

    fn encode(&self, l: &Labels) -> Canon {
        let al = |a: usize| l.arc[a].unwrap();
        let t = &self.t;
        let mut xs: Vec<(u32, [(u32, u8); 4], bool)> = (0..t.n_crossings())
            .map(|c| {
                let darts: Vec<(u32, u8)> = t.xslots[c].iter().map(|&(a, e)| (al(a), self.norm_end(a, e))).collect();
                let r = (0..4).min_by_key(|&k| darts[k]).unwrap();
                let rot = [darts[r], darts[(r + 1) % 4], darts[(r + 2) % 4], darts[(r + 3) % 4]];
                (l.x[c].unwrap(), rot, t.over_even[c] ^ (r % 2 == 1))
            })
            .collect();
        xs.sort();
        let poles = self
            .d
            .poles
            .iter()
            .enumerate()
            .map(|(p, pole)| {
                let mut s: Vec<(u32, u8)> = t.pslots[p].iter().map(|&(a, e)| (al(a), self.norm_end(a, e))).collect();
                if let Some(r) = (0..s.len()).min_by_key(|&k| s[k]) {
                    s.rotate_left(r);
                }
                (pole.id.clone(), s)
            })
            .collect();
        let constituents = self
            .order
            .iter()
            .map(|&ci| {
                let c = &self.d.constituents[ci];
                let mut tr: Vec<u32> = t.traces[ci].iter().map(|x| al(x.0)).collect();
                tr.sort();
                (c.id.clone(), c.kind == Kind::Loop, c.from.clone(), c.to.clone(), tr)
            })
            .collect();
        let mut regions: Vec<Vec<(u32, u8)>> = self
            .rm
            .region_sides
            .iter()
            .map(|ss| {
                let mut v: Vec<(u32, u8)> = ss.iter().map(|&(a, s)| (al(a), self.norm_side(a, s))).collect();
                v.sort();
                v
            })
            .collect();
        regions.sort();
        // Isolated poles are recorded with the index of their region in the
        // sorted list.
        let mut isolated = Vec::new();
        for (p, pole) in self.d.poles.iter().enumerate() {
            if t.pslots[p].is_empty() {
                let r = self.rm.pole_regions[p][0];
                let mut key: Vec<(u32, u8)> = self.rm.region_sides[r]
                    .iter()
                    .map(|&(a, s)| (al(a), self.norm_side(a, s)))
                    .collect();
                key.sort();
                let idx = if key.is_empty() {
                    // A region without boundary: name it by its first pole.
                    usize::MAX - self.rm.region_poles[r][0]
                } else {
                    regions.iter().position(|x| *x == key).unwrap()
                };
                isolated.push((pole.id.clone(), idx));
            }
        }
        Canon {
            crossings: xs.into_iter().map(|(_, d, o)| (d, o)).collect(),
            poles,
            constituents,
            regions,
            isolated,
            flags: (self.d.flags.oriented, self.d.flags.pole_labeled, self.d.flags.constituent_labeled),
        }
    }
}

#[derive(Clone)]
struct Labels {
    arc: Vec<Option<u32>>,
    x: Vec<Option<u32>>,
    next_arc: u32,
    next_x: u32,
}

pub fn canonical(d: &Diagram) -> Result<Canon> {
    let t = checked(d)?;
    let rm = RegionMap::build(d, &t)?;
    let mut order: Vec<usize> = (0..d.constituents.len()).collect();
    order.sort_by(|&a, &b| d.constituents[a].id.cmp(&d.constituents[b].id));
    let ctx = CanonCtx { d, t, rm, order };
    let mut labels = Labels {
        arc: vec![None; ctx.t.n_arcs()],
        x: vec![None; ctx.t.n_crossings()],
        next_arc: 0,
        next_x: 0,
    };
    let mut best = None;
    ctx.search(0, &mut labels, &mut best);
    Ok(best.expect("at least one labelling"))
}

/// Structural isomorphism up to internal ids.
pub fn isomorphic(a: &Diagram, b: &Diagram) -> Result<bool> {
    Ok(canonical(a)? == canonical(b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn unknot_insertions() {
        // Four kinks, and the loop pushed across itself inside either face.
        let s = enumerate_moves(&fixtures::unknot()).unwrap();
        assert_eq!(s.iter().filter(|m| matches!(m, MoveSite::R1Plus { .. })).count(), 4);
        assert_eq!(s.iter().filter(|m| matches!(m, MoveSite::R2Plus { a, b, .. } if a == b)).count(), 4);
        assert_eq!(s.len(), 8);
    }

    #[test]
    fn kink_deletes_either_lobe() {
        // A figure eight on the sphere has two empty monogons.
        let s = enumerate_moves(&fixtures::kink_pos()).unwrap();
        assert_eq!(s.iter().filter(|m| matches!(m, MoveSite::R1Minus { .. })).count(), 2);
    }

    #[test]
    fn r1_round_trip() {
        for d in [fixtures::unknot(), fixtures::seg1(), fixtures::hopf(), fixtures::half()] {
            for site in enumerate_moves(&d).unwrap() {
                if !matches!(site, MoveSite::R1Plus { .. }) {
                    continue;
                }
                let e = apply_move(&d, &site).unwrap();
                assert_eq!(e.crossings.len(), d.crossings.len() + 1);
                let back: Vec<Diagram> = enumerate_moves(&e)
                    .unwrap()
                    .into_iter()
                    .filter(|s| matches!(s, MoveSite::R1Minus { .. }))
                    .map(|s| apply_move(&e, &s).unwrap())
                    .collect();
                assert!(
                    back.iter().any(|b| isomorphic(b, &d).unwrap()),
                    "no inverse for {site:?}"
                );
            }
        }
    }

    #[test]
    fn r2_round_trip() {
        for d in [fixtures::hopf(), fixtures::half(), fixtures::nest2(), fixtures::trefoil()] {
            for site in enumerate_moves(&d).unwrap() {
                if !matches!(site, MoveSite::R2Plus { .. }) {
                    continue;
                }
                let e = apply_move(&d, &site).unwrap();
                let back: Vec<Diagram> = enumerate_moves(&e)
                    .unwrap()
                    .into_iter()
                    .filter(|s| matches!(s, MoveSite::R2Minus { .. }))
                    .map(|s| apply_move(&e, &s).unwrap())
                    .collect();
                assert!(back.iter().any(|b| isomorphic(b, &d).unwrap()), "no inverse for {site:?}");
            }
        }
    }
}
