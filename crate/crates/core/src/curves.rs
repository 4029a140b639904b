//! Curve-level combinatorics: signs, smoothings, states, intersection
//! numbers, shortcuts and alignment.

use std::collections::VecDeque;

use crate::diagram::*;
use crate::error::{Error, Result};
use crate::regions::RegionMap;
use crate::topo::{Attach, Topo};

/// Default cap on the number of states of a state sum.
pub const DEFAULT_STATE_CAP: u64 = 1 << 20;

/// How the four slots of a crossing are joined up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pairing {
    /// Unresolved: `k` continues to `k + 2`.
    Straight,
    /// `(0,1)` and `(2,3)`.
    Even,
    /// `(1,2)` and `(3,0)`.
    Odd,
}

impl Pairing {
    #[inline]
    pub fn partner(self, k: usize) -> usize {
        match self {
            Pairing::Straight => (k + 2) & 3,
            Pairing::Even => k ^ 1,
            Pairing::Odd => 3 - k,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Smoothing {
    Oriented,
    A,
    B,
}

/// Pairing realising an A or B smoothing. Rotating the over-strand
/// counterclockwise sweeps the two A-regions; the A-smoothing merges them.
pub fn ab_pairing(over_even: bool, kind: Smoothing) -> Pairing {
    match (over_even, kind) {
        (true, Smoothing::A) | (false, Smoothing::B) => Pairing::Odd,
        (true, Smoothing::B) | (false, Smoothing::A) => Pairing::Even,
        (_, Smoothing::Oriented) => unreachable!(),
    }
}

/// Pairing of the oriented smoothing: the incoming over-strand continues
/// along the outgoing under-strand and vice versa.
pub fn oriented_pairing(t: &Topo, c: usize) -> Pairing {
    let ko = if t.over_even[c] { 0 } else { 1 };
    let in_o = t.incoming_slot(c, ko);
    let in_u = t.incoming_slot(c, ko + 1);
    if Pairing::Even.partner(in_o) == (in_u + 2) % 4 {
        Pairing::Even
    } else {
        Pairing::Odd
    }
}

/// A curve traced along base arcs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curve {
    pub steps: Vec<(usize, Dir)>,
    pub closed: bool,
    /// `(from, to)` poles of a segment.
    pub ends: Option<(usize, usize)>,
    /// `(crossing, incoming slot)` for each straight pass through a crossing.
    pub passages: Vec<(usize, usize)>,
}

impl Curve {
    pub fn is_loop(&self) -> bool {
        self.closed
    }

    /// Direction in which the curve runs along each arc, if it does.
    pub fn dir_on(&self, n_arcs: usize) -> Vec<Option<Dir>> {
        let mut v = vec![None; n_arcs];
        for &(a, d) in &self.steps {
            v[a] = Some(d);
        }
        v
    }

    pub fn reversed(&self) -> Curve {
        let mut steps: Vec<(usize, Dir)> = self.steps.iter().rev().map(|&(a, d)| (a, d.flip())).collect();
        let mut passages: Vec<(usize, usize)> = self.passages.iter().rev().map(|&(c, k)| (c, (k + 2) % 4)).collect();
        if self.closed {
            // Keep the first arc first.
            steps.rotate_right(1);
            passages.rotate_right(0);
        }
        Curve {
            steps,
            closed: self.closed,
            ends: self.ends.map(|(f, t)| (t, f)),
            passages,
        }
    }

    pub fn first_dart(&self) -> (usize, End) {
        let (a, d) = self.steps[0];
        (a, d.entry())
    }

    pub fn last_dart(&self) -> (usize, End) {
        let (a, d) = self.steps[self.steps.len() - 1];
        (a, d.exit())
    }
}

/// Traces one curve starting on `arc` in direction `dir` under the given
/// crossing pairings.
pub fn trace_from(t: &Topo, pairing: &[Pairing], arc: usize, dir: Dir) -> Curve {
    let mut steps = Vec::new();
    let mut passages = Vec::new();
    let start_pole = match t.attach(arc, dir.entry()) {
        Attach::Pole(p, _) => Some(p),
        _ => None,
    };
    let (mut a, mut d) = (arc, dir);
    loop {
        steps.push((a, d));
        match t.attach(a, d.exit()) {
            Attach::Free => {
                return Curve {
                    steps,
                    closed: true,
                    ends: None,
                    passages,
                }
            }
            Attach::Pole(p, _) => {
                return Curve {
                    steps,
                    closed: false,
                    ends: Some((start_pole.expect("segment traced from its interior"), p)),
                    passages,
                }
            }
            Attach::Crossing(c, k) => {
                let k2 = pairing[c].partner(k);
                if k2 == (k + 2) % 4 {
                    passages.push((c, k));
                }
                let (b, e) = t.xslots[c][k2];
                a = b;
                d = if e == End::Tail { Dir::Fwd } else { Dir::Bwd };
                if start_pole.is_none() && a == arc && d == dir {
                    return Curve {
                        steps,
                        closed: true,
                        ends: None,
                        passages,
                    };
                }
            }
        }
    }
}

/// All curves of a (partial) resolution. When `follow_orientation` is set the
/// curves are traced along the base orientation, which the oriented smoothing
/// preserves.
pub fn trace_all(t: &Topo, pairing: &[Pairing], follow_orientation: bool) -> (Vec<Curve>, Vec<usize>) {
    let n = t.n_arcs();
    let mut arc_curve = vec![usize::MAX; n];
    let mut curves = Vec::new();
    for slots in &t.pslots {
        for &(a, e) in slots {
            if arc_curve[a] != usize::MAX {
                continue;
            }
            if follow_orientation && e != t.arc_dir[a].entry() {
                continue;
            }
            let dir = if e == End::Tail { Dir::Fwd } else { Dir::Bwd };
            let c = trace_from(t, pairing, a, dir);
            for &(x, _) in &c.steps {
                arc_curve[x] = curves.len();
            }
            curves.push(c);
        }
    }
    for a in 0..n {
        if arc_curve[a] == usize::MAX {
            let c = trace_from(t, pairing, a, t.arc_dir[a]);
            for &(x, _) in &c.steps {
                arc_curve[x] = curves.len();
            }
            curves.push(c);
        }
    }
    (curves, arc_curve)
}

/// Curves of the base diagram, one per constituent, in constituent order.
pub fn base_curves(t: &Topo) -> Vec<Curve> {
    let straight = vec![Pairing::Straight; t.n_crossings()];
    t.traces
        .iter()
        .map(|tr| {
            let (a, d) = tr[0];
            trace_from(t, &straight, a, d)
        })
        .collect()
}

/// A diagram with some crossings resolved.
#[derive(Clone, Debug)]
pub struct SmoothedDiagram {
    pub resolved: Vec<Option<Smoothing>>,
    pub pairing: Vec<Pairing>,
    pub curves: Vec<Curve>,
    pub arc_curve: Vec<usize>,
}

impl SmoothedDiagram {
    pub fn new(t: &Topo) -> SmoothedDiagram {
        let pairing = vec![Pairing::Straight; t.n_crossings()];
        let (curves, arc_curve) = trace_all(t, &pairing, true);
        SmoothedDiagram {
            resolved: vec![None; t.n_crossings()],
            pairing,
            curves,
            arc_curve,
        }
    }

    pub fn resolve(&mut self, t: &Topo, c: usize, kind: Smoothing) -> Result<()> {
        if self.resolved[c].is_some() {
            return Err(Error::DoubleResolution(crossing_name(t, c)));
        }
        self.resolved[c] = Some(kind);
        self.pairing[c] = match kind {
            Smoothing::Oriented => oriented_pairing(t, c),
            k => ab_pairing(t.over_even[c], k),
        };
        let follow = self.resolved.iter().all(|r| !matches!(r, Some(Smoothing::A) | Some(Smoothing::B)));
        let (curves, arc_curve) = trace_all(t, &self.pairing, follow);
        self.curves = curves;
        self.arc_curve = arc_curve;
        Ok(())
    }

    pub fn segment_count(&self) -> usize {
        self.curves.iter().filter(|c| !c.closed).count()
    }
}

fn crossing_name(t: &Topo, c: usize) -> String {
    t.crossing_index
        .iter()
        .find(|(_, &i)| i == c)
        .map(|(k, _)| k.clone())
        .unwrap_or_else(|| c.to_string())
}

pub fn crossing_sign(t: &Topo, oriented: bool, c: usize) -> Result<i64> {
    if !oriented {
        return Err(Error::Unoriented);
    }
    Ok(t.sign(c))
}

/// Result of smoothing one crossing along the orientation.
#[derive(Clone, Debug)]
pub struct OrientedSmoothing {
    pub smoothed: SmoothedDiagram,
    /// Curve containing the incoming over-strand.
    pub alpha: usize,
    /// Curve containing the incoming under-strand.
    pub beta: usize,
}

pub fn oriented_smoothing(t: &Topo, c: usize) -> OrientedSmoothing {
    let mut s = SmoothedDiagram::new(t);
    s.resolve(t, c, Smoothing::Oriented).expect("fresh diagram");
    let ko = if t.over_even[c] { 0 } else { 1 };
    let in_o = t.incoming_slot(c, ko);
    let in_u = t.incoming_slot(c, ko + 1);
    let alpha = s.arc_curve[t.xslots[c][in_o].0];
    let beta = s.arc_curve[t.xslots[c][in_u].0];
    OrientedSmoothing {
        smoothed: s,
        alpha,
        beta,
    }
}

pub fn ab_smoothing(t: &Topo, c: usize, kind: Smoothing) -> SmoothedDiagram {
    let mut s = SmoothedDiagram::new(t);
    s.resolve(t, c, kind).expect("fresh diagram");
    s
}

/// A full A/B resolution.
#[derive(Clone, Debug)]
pub struct State {
    /// Bit `c` set means crossing `c` is B-smoothed.
    pub bits: u64,
    pub sigma: i64,
    pub pairing: Vec<Pairing>,
    pub curves: Vec<Curve>,
    pub arc_curve: Vec<usize>,
}

pub fn check_state_cap(n_crossings: usize, cap: u64) -> Result<()> {
    let states: u128 = 1u128 << n_crossings.min(127);
    if n_crossings >= 64 || states > cap as u128 {
        return Err(Error::StateExplosion { states, cap });
    }
    Ok(())
}

pub fn state_pairing(t: &Topo, bits: u64) -> Vec<Pairing> {
    (0..t.n_crossings())
        .map(|c| {
            let kind = if bits >> c & 1 == 1 { Smoothing::B } else { Smoothing::A };
            ab_pairing(t.over_even[c], kind)
        })
        .collect()
}

pub fn state(t: &Topo, bits: u64) -> State {
    let n = t.n_crossings();
    let pairing = state_pairing(t, bits);
    let (curves, arc_curve) = trace_all(t, &pairing, false);
    let b = bits.count_ones() as i64;
    State {
        bits,
        sigma: n as i64 - 2 * b,
        pairing,
        curves,
        arc_curve,
    }
}

pub fn enumerate_states(t: &Topo, cap: u64) -> Result<impl Iterator<Item = State> + '_> {
    check_state_cap(t.n_crossings(), cap)?;
    Ok((0..1u64 << t.n_crossings()).map(move |bits| state(t, bits)))
}

/// Ordered strand-pair intersection count `alpha . beta`.
pub fn intersection(n_crossings: usize, alpha: &Curve, beta: &Curve) -> i64 {
    let mut at: Vec<[Option<usize>; 2]> = vec![[None, None]; n_crossings];
    for &(c, k) in &alpha.passages {
        let e = &mut at[c];
        if e[0].is_none() {
            e[0] = Some(k);
        } else {
            e[1] = Some(k);
        }
    }
    let mut sum = 0;
    for &(c, kb) in &beta.passages {
        for ka in at[c].iter().flatten() {
            match (ka + 4 - kb) % 4 {
                1 => sum += 1,
                3 => sum -= 1,
                _ => {}
            }
        }
    }
    sum
}

pub fn algebraic_intersection(oriented: bool, n_crossings: usize, alpha: &Curve, beta: &Curve) -> Result<i64> {
    if !oriented {
        return Err(Error::Unoriented);
    }
    Ok(intersection(n_crossings, alpha, beta))
}

/// Doubled linking number of two constituents.
pub fn linking_number2(t: &Topo, oriented: bool, a: usize, b: usize) -> Result<i64> {
    if !oriented {
        return Err(Error::Unoriented);
    }
    if a == b {
        return Err(Error::SelfLinking);
    }
    let mut s = 0;
    for c in 0..t.n_crossings() {
        let (o, u) = t.over_under(c);
        if (o == a && u == b) || (o == b && u == a) {
            s += t.sign(c);
        }
    }
    Ok(s)
}

/// Doubled linking number of constituents `a` and `b` by id.
pub fn linking_number(d: &Diagram, a: &str, b: &str) -> Result<i64> {
    let t = crate::topo::checked(d)?;
    let idx = |id: &str| {
        d.constituents
            .iter()
            .position(|c| c.id == id)
            .ok_or_else(|| Error::UnknownConstituent(id.to_string()))
    };
    linking_number2(&t, d.flags.oriented, idx(a)?, idx(b)?)
}

/// Constituent ids and the symmetric matrix of doubled linking numbers
/// (diagonal 0).
pub fn lk_matrix(d: &Diagram) -> Result<(Vec<String>, Vec<Vec<i64>>)> {
    let t = crate::topo::checked(d)?;
    let n = d.constituents.len();
    let mut m = vec![vec![0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = linking_number2(&t, d.flags.oriented, i, j)?;
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    Ok((d.constituents.iter().map(|c| c.id.clone()).collect(), m))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cross {
    LeftToRight,
    RightToLeft,
}

/// A path in the region graph between two poles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shortcut {
    pub from: usize,
    pub to: usize,
    /// Arcs crossed, with direction relative to the arc's tail-to-head direction.
    pub steps: Vec<(usize, Cross)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BfsOrder {
    Forward,
    Reverse,
}

/// Region-graph adjacency: for each region, `(arc, crossing direction, target)`.
pub fn region_graph(rm: &RegionMap) -> Vec<Vec<(usize, Cross, usize)>> {
    let mut adj = vec![Vec::new(); rm.n()];
    for (a, rs) in rm.arc_regions.iter().enumerate() {
        let [l, r] = *rs;
        if l != r {
            adj[l].push((a, Cross::LeftToRight, r));
            adj[r].push((a, Cross::RightToLeft, l));
        }
    }
    adj
}

/// Breadth-first tree from the regions of pole `p`. Returns, per region, the
/// parent link `(previous region, arc, direction)` and the distance.
pub fn bfs_tree(
    rm: &RegionMap,
    adj: &[Vec<(usize, Cross, usize)>],
    sources: &[usize],
    order: BfsOrder,
) -> (Vec<Option<(usize, usize, Cross)>>, Vec<usize>) {
    let n = rm.n();
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![None; n];
    let mut q = VecDeque::new();
    let mut srcs = sources.to_vec();
    srcs.sort();
    if order == BfsOrder::Reverse {
        srcs.reverse();
    }
    for s in srcs {
        if dist[s] == usize::MAX {
            dist[s] = 0;
            q.push_back(s);
        }
    }
    while let Some(r) = q.pop_front() {
        let edges: Box<dyn Iterator<Item = &(usize, Cross, usize)>> = match order {
            BfsOrder::Forward => Box::new(adj[r].iter()),
            BfsOrder::Reverse => Box::new(adj[r].iter().rev()),
        };
        for &(a, dir, s) in edges {
            if dist[s] == usize::MAX {
                dist[s] = dist[r] + 1;
                parent[s] = Some((r, a, dir));
                q.push_back(s);
            }
        }
    }
    (parent, dist)
}

/// Shortcuts from pole `p` to every pole (empty for `p` itself).
pub fn shortcuts_from(t: &Topo, rm: &RegionMap, p: usize, order: BfsOrder) -> Vec<Shortcut> {
    let adj = region_graph(rm);
    let (parent, dist) = bfs_tree(rm, &adj, &rm.pole_regions[p], order);
    (0..t.n_poles())
        .map(|q| {
            if q == p {
                return Shortcut {
                    from: p,
                    to: q,
                    steps: Vec::new(),
                };
            }
            let mut targets = rm.pole_regions[q].clone();
            if order == BfsOrder::Reverse {
                targets.reverse();
            }
            let end = targets
                .into_iter()
                .min_by_key(|&r| dist[r])
                .expect("pole without region");
            let mut steps = Vec::new();
            let mut r = end;
            while let Some((prev, a, dir)) = parent[r] {
                steps.push((a, dir));
                r = prev;
            }
            steps.reverse();
            Shortcut { from: p, to: q, steps }
        })
        .collect()
}

pub fn shortcut(t: &Topo, rm: &RegionMap, p: usize, q: usize) -> Result<Shortcut> {
    if p == q {
        return Err(Error::SamePole(t.pole_ids()[p].clone()));
    }
    Ok(shortcuts_from(t, rm, p, BfsOrder::Forward).swap_remove(q))
}

/// `gamma . curve`: a left-to-right step over an arc the curve runs along
/// forwards counts -1.
pub fn shortcut_intersection(sc: &Shortcut, dir_on: &[Option<Dir>]) -> i64 {
    sc.steps
        .iter()
        .map(|&(a, cross)| match (dir_on[a], cross) {
            (None, _) => 0,
            (Some(Dir::Fwd), Cross::LeftToRight) | (Some(Dir::Bwd), Cross::RightToLeft) => -1,
            _ => 1,
        })
        .sum()
}

/// Orients a state segment to agree with a base segment near both of its
/// endpoints, or reports that the two are not aligned.
pub fn aligned(state_seg: &Curve, base_seg: &Curve) -> Result<Option<Curve>> {
    if state_seg.closed || base_seg.closed {
        return Err(Error::NotASegment("loop operand".into()));
    }
    let (f, l) = (base_seg.first_dart(), base_seg.last_dart());
    if state_seg.first_dart() == f && state_seg.last_dart() == l {
        return Ok(Some(state_seg.clone()));
    }
    let r = state_seg.reversed();
    if r.first_dart() == f && r.last_dart() == l {
        return Ok(Some(r));
    }
    Ok(None)
}

/// `mu_{e_s,e}(P,Q) = e_s . alpha - e . alpha` along the shortcut `alpha` from
/// `P` to `Q`; `e_s` must already be oriented by [`aligned`].
pub fn mu(n_arcs: usize, e_s: &Curve, e: &Curve, alpha: &Shortcut) -> Result<i64> {
    if e_s.closed || e.closed || e_s.first_dart() != e.first_dart() || e_s.last_dart() != e.last_dart() {
        return Err(Error::AlignmentRequired);
    }
    Ok(-shortcut_intersection(alpha, &e_s.dir_on(n_arcs)) + shortcut_intersection(alpha, &e.dir_on(n_arcs)))
}
