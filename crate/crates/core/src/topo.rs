//! Indexed view of a diagram: validation, component detection and face
//! tracing.
//!
//! Half-edge `2a` runs along arc `a` from tail to head and has the arc's left
//! side on its left; half-edge `2a + 1` runs backwards with the right side on
//! its left. Faces are the orbits of `next`.

use std::collections::{HashMap, HashSet};

use crate::diagram::*;
use crate::error::{Error, Result};

/// Where an arc end is attached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Attach {
    Crossing(usize, usize),
    Pole(usize, usize),
    Free,
}

#[derive(Clone, Debug)]
pub struct Topo {
    pub arc_ids: Vec<String>,
    pub arc_index: HashMap<String, usize>,
    pub pole_index: HashMap<String, usize>,
    pub crossing_index: HashMap<String, usize>,
    pub con_index: HashMap<String, usize>,
    /// `[tail, head]` attachment of every arc.
    pub ends: Vec<[Attach; 2]>,
    pub xslots: Vec<[(usize, End); 4]>,
    pub over_even: Vec<bool>,
    pub pslots: Vec<Vec<(usize, End)>>,
    pub arc_con: Vec<usize>,
    pub arc_dir: Vec<Dir>,
    pub traces: Vec<Vec<(usize, Dir)>>,
    /// `(from, to)` pole indices of segments.
    pub seg_ends: Vec<Option<(usize, usize)>>,
    pub comp_of_arc: Vec<usize>,
    pub comp_of_pole: Vec<usize>,
    pub n_comp: usize,
    /// First arc (in `arcs` order) of each component, `None` for an isolated pole.
    pub comp_first_arc: Vec<Option<usize>>,
    pub comp_pole: Vec<Option<usize>>,
    pub half_face: Vec<usize>,
    pub faces: Vec<Vec<usize>>,
    pub face_comp: Vec<usize>,
}

pub fn end_idx(e: End) -> usize {
    match e {
        End::Tail => 0,
        End::Head => 1,
    }
}

/// Half-edge leaving a vertex through a dart.
pub fn departing(arc: usize, end: End) -> usize {
    2 * arc + end_idx(end)
}

const RESERVED: &[char] = &[',', '[', ']', '{', '}', '(', ')', ';', '*', '^', ' ', '+', '-', ':'];

fn check_id(kind: &str, id: &str, errs: &mut Vec<String>) {
    if id.is_empty() {
        errs.push(format!("empty {kind} id"));
    } else if let Some(ch) = id.chars().find(|c| RESERVED.contains(c) || c.is_whitespace()) {
        errs.push(format!("{kind} id {id:?} contains reserved character {ch:?}"));
    }
}

fn index_of(kind: &str, ids: impl Iterator<Item = String>, errs: &mut Vec<String>) -> HashMap<String, usize> {
    let mut m = HashMap::new();
    for (i, id) in ids.enumerate() {
        check_id(kind, &id, errs);
        if m.insert(id.clone(), i).is_some() {
            errs.push(format!("duplicate {kind} id {id:?}"));
        }
    }
    m
}

impl Topo {
    pub fn n_arcs(&self) -> usize {
        self.arc_ids.len()
    }

    pub fn n_poles(&self) -> usize {
        self.pslots.len()
    }

    pub fn n_crossings(&self) -> usize {
        self.xslots.len()
    }

    pub fn attach(&self, arc: usize, end: End) -> Attach {
        self.ends[arc][end_idx(end)]
    }

    pub fn is_free_arc(&self, arc: usize) -> bool {
        self.ends[arc][0] == Attach::Free
    }

    pub fn next(&self, h: usize) -> usize {
        let a = h / 2;
        let arriving = if h % 2 == 0 { End::Head } else { End::Tail };
        let (b, e) = match self.attach(a, arriving) {
            Attach::Crossing(c, k) => self.xslots[c][(k + 3) % 4],
            Attach::Pole(p, k) => {
                let v = self.pslots[p].len();
                self.pslots[p][(k + v - 1) % v]
            }
            Attach::Free => return h,
        };
        departing(b, e)
    }

    /// Face on the given side of an arc.
    pub fn face(&self, arc: usize, side: Side) -> usize {
        self.half_face[2 * arc + side.idx()]
    }

    /// Builds the indexed view, collecting every violated invariant.
    pub fn build(d: &Diagram) -> std::result::Result<Topo, Vec<String>> {
        Self::build_opts(d, true)
    }

    /// Like [`Topo::build`], optionally skipping the placement checks (used
    /// while placements are being reconstructed).
    pub fn build_opts(d: &Diagram, check_placements: bool) -> std::result::Result<Topo, Vec<String>> {
        let mut errs = Vec::new();
        let arc_index = index_of("arc", d.arcs.iter().cloned(), &mut errs);
        let pole_index = index_of("pole", d.poles.iter().map(|p| p.id.clone()), &mut errs);
        let crossing_index = index_of("crossing", d.crossings.iter().map(|c| c.id.clone()), &mut errs);
        let con_index = index_of("constituent", d.constituents.iter().map(|c| c.id.clone()), &mut errs);
        let n = d.arcs.len();

        let mut ends = vec![[None::<Attach>; 2]; n];
        let mut put = |dart: &Dart, at: Attach, errs: &mut Vec<String>| -> Option<(usize, End)> {
            match arc_index.get(&dart.arc) {
                None => {
                    errs.push(format!("unknown arc {:?} in slot", dart.arc));
                    None
                }
                Some(&a) => {
                    let slot = &mut ends[a][end_idx(dart.end)];
                    if slot.is_some() {
                        errs.push(format!("dart {dart} occupies more than one slot"));
                    }
                    *slot = Some(at);
                    Some((a, dart.end))
                }
            }
        };
        let mut xslots = Vec::new();
        for (ci, c) in d.crossings.iter().enumerate() {
            let mut s = [(0, End::Tail); 4];
            for (k, dart) in c.slots.iter().enumerate() {
                if let Some(v) = put(dart, Attach::Crossing(ci, k), &mut errs) {
                    s[k] = v;
                }
            }
            xslots.push(s);
        }
        let mut pslots = Vec::new();
        for (pi, p) in d.poles.iter().enumerate() {
            let mut s = Vec::new();
            for (k, dart) in p.slots.iter().enumerate() {
                if let Some(v) = put(dart, Attach::Pole(pi, k), &mut errs) {
                    s.push(v);
                }
            }
            pslots.push(s);
        }
        let mut fin_ends = Vec::with_capacity(n);
        for (a, e) in ends.iter().enumerate() {
            match (e[0], e[1]) {
                (Some(t), Some(h)) => fin_ends.push([t, h]),
                (None, None) => fin_ends.push([Attach::Free, Attach::Free]),
                _ => {
                    errs.push(format!("arc {:?} has exactly one attached dart", d.arcs[a]));
                    fin_ends.push([Attach::Free, Attach::Free]);
                }
            }
        }
        if !errs.is_empty() {
            return Err(errs);
        }

        // Constituent traces.
        let mut arc_con = vec![usize::MAX; n];
        let mut arc_dir = vec![Dir::Fwd; n];
        let mut traces = Vec::new();
        let mut seg_ends = Vec::new();
        for (ci, c) in d.constituents.iter().enumerate() {
            let mut tr = Vec::new();
            for (a, dir) in &c.trace {
                match arc_index.get(a) {
                    None => errs.push(format!("constituent {}: unknown arc {a:?}", c.id)),
                    Some(&ai) => {
                        if arc_con[ai] != usize::MAX {
                            errs.push(format!("arc {a:?} appears in more than one trace step"));
                        }
                        arc_con[ai] = ci;
                        arc_dir[ai] = *dir;
                        tr.push((ai, *dir));
                    }
                }
            }
            if c.trace.is_empty() {
                errs.push(format!("constituent {} has an empty trace", c.id));
            }
            let ep = match c.kind {
                Kind::Loop => {
                    if c.from.is_some() || c.to.is_some() {
                        errs.push(format!("loop {} must not have endpoints", c.id));
                    }
                    None
                }
                Kind::Segment => {
                    let f = c.from.as_ref().and_then(|p| pole_index.get(p));
                    let t = c.to.as_ref().and_then(|p| pole_index.get(p));
                    match (f, t) {
                        (Some(&f), Some(&t)) => Some((f, t)),
                        _ => {
                            errs.push(format!(
                                "segment {} has a missing or unknown endpoint pole ({:?} -> {:?})",
                                c.id, c.from, c.to
                            ));
                            None
                        }
                    }
                }
            };
            traces.push(tr);
            seg_ends.push(ep);
        }
        for (a, &c) in arc_con.iter().enumerate() {
            if c == usize::MAX {
                errs.push(format!("arc {:?} belongs to no constituent", d.arcs[a]));
            }
        }
        if !errs.is_empty() {
            return Err(errs);
        }

        // Strand continuity and endpoint attachment.
        let mut strands = vec![[false; 2]; d.crossings.len()];
        for (ci, c) in d.constituents.iter().enumerate() {
            let tr = &traces[ci];
            let m = tr.len();
            let exit_of = |i: usize| fin_ends[tr[i].0][end_idx(tr[i].1.exit())];
            let entry_of = |i: usize| fin_ends[tr[i].0][end_idx(tr[i].1.entry())];
            let free_count = tr.iter().filter(|(a, _)| fin_ends[*a][0] == Attach::Free).count();
            if free_count > 0 {
                if !(c.kind == Kind::Loop && m == 1) {
                    errs.push(format!("constituent {}: unattached arc outside a one-arc loop", c.id));
                }
                continue;
            }
            let links = if c.kind == Kind::Loop { m } else { m - 1 };
            for i in 0..links {
                let j = (i + 1) % m;
                match (exit_of(i), entry_of(j)) {
                    (Attach::Crossing(x, k), Attach::Crossing(y, l)) if x == y && l == (k + 2) % 4 => {
                        strands[x][k % 2] = true;
                    }
                    (Attach::Crossing(x, _), _) => errs.push(format!(
                        "strand-through violation at crossing {} (constituent {})",
                        d.crossings[x].id, c.id
                    )),
                    _ => errs.push(format!(
                        "constituent {}: consecutive arcs {:?} and {:?} do not meet at a crossing",
                        c.id, d.arcs[tr[i].0], d.arcs[tr[j].0]
                    )),
                }
            }
            if let (Kind::Segment, Some((f, t))) = (c.kind, seg_ends[ci]) {
                match entry_of(0) {
                    Attach::Pole(p, _) if p == f => {}
                    _ => errs.push(format!("segment {}: first dart is not at pole {}", c.id, d.poles[f].id)),
                }
                match exit_of(m - 1) {
                    Attach::Pole(p, _) if p == t => {}
                    _ => errs.push(format!("segment {}: last dart is not at pole {}", c.id, d.poles[t].id)),
                }
            } else if c.kind == Kind::Loop {
                for i in 0..m {
                    if matches!(exit_of(i), Attach::Pole(..)) || matches!(entry_of(i), Attach::Pole(..)) {
                        errs.push(format!("loop {} touches a pole", c.id));
                        break;
                    }
                }
            }
        }
        for (x, s) in strands.iter().enumerate() {
            if !(s[0] && s[1]) {
                errs.push(format!("strand-through violation at crossing {}", d.crossings[x].id));
            }
        }
        if !errs.is_empty() {
            return Err(errs);
        }

        // Components.
        let mut uf: Vec<usize> = (0..n).collect();
        fn find(uf: &mut [usize], mut x: usize) -> usize {
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        let groups = xslots
            .iter()
            .map(|s| s.iter().map(|(a, _)| *a).collect::<Vec<_>>())
            .chain(pslots.iter().map(|s| s.iter().map(|(a, _)| *a).collect::<Vec<_>>()));
        for g in groups {
            for w in g.windows(2) {
                let (ra, rb) = (find(&mut uf, w[0]), find(&mut uf, w[1]));
                uf[ra] = rb;
            }
        }
        let mut comp_of_arc = vec![0; n];
        let mut root_comp: HashMap<usize, usize> = HashMap::new();
        let mut comp_first_arc = Vec::new();
        let mut comp_pole = Vec::new();
        for a in 0..n {
            let r = find(&mut uf, a);
            let next = root_comp.len();
            let c = *root_comp.entry(r).or_insert_with(|| {
                comp_first_arc.push(Some(a));
                comp_pole.push(None);
                next
            });
            comp_of_arc[a] = c;
        }
        let mut comp_of_pole = vec![0; d.poles.len()];
        for (pi, s) in pslots.iter().enumerate() {
            if let Some((a, _)) = s.first() {
                comp_of_pole[pi] = comp_of_arc[*a];
            } else {
                comp_of_pole[pi] = comp_first_arc.len();
                comp_first_arc.push(None);
                comp_pole.push(Some(pi));
            }
        }
        let n_comp = comp_first_arc.len();

        let mut topo = Topo {
            arc_ids: d.arcs.clone(),
            arc_index,
            pole_index,
            crossing_index,
            con_index,
            ends: fin_ends,
            xslots,
            over_even: d.crossings.iter().map(|c| c.over == Over::Even).collect(),
            pslots,
            arc_con,
            arc_dir,
            traces,
            seg_ends,
            comp_of_arc,
            comp_of_pole,
            n_comp,
            comp_first_arc,
            comp_pole,
            half_face: vec![usize::MAX; 2 * n],
            faces: Vec::new(),
            face_comp: Vec::new(),
        };

        // Faces.
        for h0 in 0..2 * n {
            if topo.half_face[h0] != usize::MAX {
                continue;
            }
            let f = topo.faces.len();
            let mut cyc = Vec::new();
            let mut h = h0;
            loop {
                topo.half_face[h] = f;
                cyc.push(h);
                h = topo.next(h);
                if h == h0 {
                    break;
                }
            }
            topo.faces.push(cyc);
            topo.face_comp.push(topo.comp_of_arc[h0 / 2]);
        }

        // Euler characteristic per component.
        let mut v = vec![0i64; n_comp];
        let mut e = vec![0i64; n_comp];
        let mut f = vec![0i64; n_comp];
        for (x, s) in topo.xslots.iter().enumerate() {
            let _ = x;
            v[topo.comp_of_arc[s[0].0]] += 1;
        }
        for (pi, s) in topo.pslots.iter().enumerate() {
            if !s.is_empty() {
                v[topo.comp_of_pole[pi]] += 1;
            }
        }
        for a in 0..n {
            e[topo.comp_of_arc[a]] += 1;
            if topo.is_free_arc(a) {
                v[topo.comp_of_arc[a]] += 1;
            }
        }
        for &c in &topo.face_comp {
            f[c] += 1;
        }
        for c in 0..n_comp {
            if topo.comp_first_arc[c].is_some() && v[c] - e[c] + f[c] != 2 {
                errs.push(format!(
                    "non-spherical embedding: component {c} has V - E + F = {}",
                    v[c] - e[c] + f[c]
                ));
            }
        }

        if !check_placements {
            return if errs.is_empty() { Ok(topo) } else { Err(errs) };
        }

        // Placement forest.
        let mut placed = vec![false; n_comp];
        let mut any_arcs = false;
        for (i, p) in d.placements.iter().enumerate() {
            if p.component >= n_comp {
                errs.push(format!("placement #{i}: no component {}", p.component));
                continue;
            }
            if placed[p.component] {
                errs.push(format!("component {} placed twice", p.component));
                continue;
            }
            match &p.witness {
                Witness::Root if i == 0 => {}
                Witness::Root => errs.push(format!("placement #{i}: only the first placement may be root")),
                Witness::Sphere if !any_arcs => {}
                Witness::Sphere => errs.push(format!(
                    "placement #{i}: sphere witness used after arcs were placed"
                )),
                Witness::Arc(w) => match topo.arc_index.get(&w.arc) {
                    Some(&a) if placed[topo.comp_of_arc[a]] => {}
                    _ => errs.push(format!(
                        "unresolved placement: component {} witness {w} is not a placed arc",
                        p.component
                    )),
                },
            }
            if i == 0 && matches!(p.witness, Witness::Arc(_)) {
                errs.push("the first placement must be root or sphere".into());
            }
            if let Some(o) = &p.outer {
                match topo.arc_index.get(&o.arc) {
                    Some(&a) if topo.comp_of_arc[a] == p.component => {}
                    _ => errs.push(format!(
                        "placement of component {}: outer side {o} is not an arc of the component",
                        p.component
                    )),
                }
            }
            placed[p.component] = true;
            any_arcs |= topo.comp_first_arc[p.component].is_some();
        }
        for (c, ok) in placed.iter().enumerate() {
            if !ok {
                errs.push(format!("unresolved placement: component {c} has no placement"));
            }
        }
        if errs.is_empty() {
            Ok(topo)
        } else {
            Err(errs)
        }
    }

    /// Dart sitting at the far end of the strand through `(c, k)`.
    pub fn opposite(&self, c: usize, k: usize) -> (usize, End) {
        self.xslots[c][(k + 2) % 4]
    }

    pub fn is_over(&self, c: usize, k: usize) -> bool {
        (k % 2 == 0) == self.over_even[c]
    }

    /// Slot of `c` holding an incoming strand end for a curve that runs
    /// along arc `a` in direction `dir` and arrives at `c`.
    pub fn arrival(&self, a: usize, dir: Dir) -> Attach {
        self.attach(a, dir.exit())
    }

    /// Incoming slot of the strand through `(c, k)` for the base orientation.
    pub fn incoming_slot(&self, c: usize, k: usize) -> usize {
        let (a, e) = self.xslots[c][k];
        let dir = self.arc_dir[a];
        if e == dir.exit() {
            k
        } else {
            (k + 2) % 4
        }
    }

    /// Crossing sign for the base orientation.
    pub fn sign(&self, c: usize) -> i64 {
        let ko = if self.over_even[c] { 0 } else { 1 };
        let in_o = self.incoming_slot(c, ko);
        let in_u = self.incoming_slot(c, ko + 1);
        if (in_u + 4 - in_o) % 4 == 1 {
            1
        } else {
            -1
        }
    }

    /// Constituents of the over- and under-strands.
    pub fn over_under(&self, c: usize) -> (usize, usize) {
        let ko = if self.over_even[c] { 0 } else { 1 };
        (self.arc_con[self.xslots[c][ko].0], self.arc_con[self.xslots[c][ko + 1].0])
    }

    pub fn pole_ids(&self) -> Vec<String> {
        let mut v = vec![String::new(); self.pole_index.len()];
        for (k, &i) in &self.pole_index {
            v[i] = k.clone();
        }
        v
    }
}

/// Result of validation: empty iff the diagram is legal.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub errors: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }
}

pub fn validate(d: &Diagram) -> ValidationReport {
    match Topo::build(d) {
        Ok(_) => ValidationReport::default(),
        Err(errors) => ValidationReport { errors },
    }
}

/// Builds the indexed view or fails with the full report.
pub fn checked(d: &Diagram) -> Result<Topo> {
    Topo::build(d).map_err(Error::Validation)
}

/// Sanity helper for tests: every arc appears once among traces and each of
/// its attached darts sits in exactly one slot.
pub fn dart_census(d: &Diagram) -> bool {
    let mut seen = HashSet::new();
    for c in &d.crossings {
        for s in &c.slots {
            if !seen.insert(s.clone()) {
                return false;
            }
        }
    }
    for p in &d.poles {
        for s in &p.slots {
            if !seen.insert(s.clone()) {
                return false;
            }
        }
    }
    let mut arcs = HashSet::new();
    for c in &d.constituents {
        for (a, _) in &c.trace {
            if !arcs.insert(a.clone()) {
                return false;
            }
        }
    }
    arcs.len() == d.arcs.len()
}
