//! Generalized, base-pointed and pole-centric index polynomials.

use std::collections::BTreeSet;

use crate::curves::{base_curves, intersection, oriented_smoothing, shortcut_intersection, shortcuts_from, BfsOrder, Curve};
use crate::diagram::*;
use crate::error::{Error, Result};
use crate::laurent::{Mono, Poly, Sub, Var};
use crate::regions::RegionMap;
use crate::topo::{checked, Topo};

/// Ingredients of `g(c)` and `h_P(c)` for one crossing.
#[derive(Clone, Debug)]
pub struct CrossingIndexData {
    pub crossing: usize,
    pub sign: i64,
    pub over: usize,
    pub under: usize,
    pub alpha: Curve,
    pub beta: Curve,
    pub same: bool,
    /// `alpha_c . e` for every constituent `e`.
    pub alpha_dot: Vec<i64>,
    /// `beta_c . e` for every constituent `e`.
    pub beta_dot: Vec<i64>,
}

/// Precomputed index data of an oriented diagram.
pub struct IndexContext<'a> {
    pub d: &'a Diagram,
    pub t: Topo,
    pub rm: RegionMap,
    pub data: Vec<CrossingIndexData>,
    pub con_ids: Vec<String>,
    pub pole_ids: Vec<String>,
    pub order: BfsOrder,
}

impl<'a> IndexContext<'a> {
    pub fn new(d: &'a Diagram) -> Result<Self> {
        Self::with_order(d, BfsOrder::Forward)
    }

    pub fn with_order(d: &'a Diagram, order: BfsOrder) -> Result<Self> {
        Self::with_options(d, order, PushOff::Left)
    }

    pub fn with_options(d: &'a Diagram, order: BfsOrder, side: PushOff) -> Result<Self> {
        if !d.flags.oriented {
            return Err(Error::Unoriented);
        }
        let t = checked(d)?;
        let rm = RegionMap::build(d, &t)?;
        let base = base_curves(&t);
        let nx = t.n_crossings();
        let data = (0..nx)
            .map(|c| {
                let os = oriented_smoothing(&t, c);
                let alpha = os.smoothed.curves[os.alpha].clone();
                let beta = os.smoothed.curves[os.beta].clone();
                let (over, under) = t.over_under(c);
                let sign = t.sign(c);
                let same = os.alpha == os.beta;
                let dots = |curve: &Curve, alpha_pass: bool, beta_pass: bool| -> Vec<i64> {
                    base.iter()
                        .enumerate()
                        .map(|(e, base_e)| {
                            let mut x = intersection(nx, curve, base_e);
                            if alpha_pass {
                                x += pushoff_correction(side, Pass::Alpha, sign, over, under, e);
                            }
                            if beta_pass {
                                x += pushoff_correction(side, Pass::Beta, sign, over, under, e);
                            }
                            x
                        })
                        .collect()
                };
                CrossingIndexData {
                    crossing: c,
                    sign,
                    over,
                    under,
                    alpha_dot: dots(&alpha, true, same),
                    beta_dot: dots(&beta, same, true),
                    same,
                    alpha,
                    beta,
                }
            })
            .collect();
        Ok(IndexContext {
            d,
            con_ids: d.constituents.iter().map(|c| c.id.clone()).collect(),
            pole_ids: t.pole_ids(),
            t,
            rm,
            data,
            order,
        })
    }

    fn r(&self, c: &CrossingIndexData) -> Poly {
        Poly::var(Var::R(Sub::id(&self.con_ids[c.over]), Sub::id(&self.con_ids[c.under])))
    }

    fn t_mono(&self, dots: &[i64], f: fn(Sub) -> Var) -> Mono {
        Mono::from_pairs(dots.iter().enumerate().map(|(e, &x)| (f(Sub::id(&self.con_ids[e])), x)))
    }

    fn g(&self, c: &CrossingIndexData) -> Poly {
        let tp = Poly::term(1, self.t_mono(&c.alpha_dot, Var::T)).sub(&Poly::one());
        let sp = Poly::term(1, self.t_mono(&c.beta_dot, Var::S)).sub(&Poly::one());
        self.r(c).mul(&tp).mul(&sp)
    }

    /// Shortcut monomial `prod_Q v_Q^{gamma_Q . curve}`.
    fn pole_mono(&self, shortcuts: &[crate::curves::Shortcut], curve: &Curve, f: fn(String) -> Var) -> Mono {
        let dir_on = curve.dir_on(self.t.n_arcs());
        Mono::from_pairs(
            shortcuts
                .iter()
                .enumerate()
                .map(|(q, sc)| (f(self.pole_ids[q].clone()), shortcut_intersection(sc, &dir_on))),
        )
    }

    pub fn generalized(&self) -> Result<Poly> {
        if !self.d.flags.constituent_labeled {
            return Err(Error::Unlabeled("constituent"));
        }
        let mut out = Poly::zero();
        for c in &self.data {
            out.add_assign(&self.g(c).scale(c.sign));
        }
        Ok(out)
    }

    fn pole(&self, p: &str) -> Result<usize> {
        if !self.d.flags.pole_labeled {
            return Err(Error::Unlabeled("pole"));
        }
        if !self.d.flags.constituent_labeled {
            return Err(Error::Unlabeled("constituent"));
        }
        self.t.pole_index.get(p).copied().ok_or_else(|| Error::UnknownPole(p.to_string()))
    }

    pub fn base_pointed(&self, p: &str) -> Result<Poly> {
        let p = self.pole(p)?;
        let sc = shortcuts_from(&self.t, &self.rm, p, self.order);
        let mut out = Poly::zero();
        for c in &self.data {
            let mut h = Mono::one();
            if c.alpha.closed {
                h = h.mul(&self.pole_mono(&sc, &c.alpha, Var::A));
            }
            if c.beta.closed {
                h = h.mul(&self.pole_mono(&sc, &c.beta, Var::B));
            }
            out.add_assign(&self.g(c).mul_mono(&h).scale(c.sign));
        }
        Ok(out)
    }

    pub fn pole_centric(&self, p: &str) -> Result<Poly> {
        let p = self.pole(p)?;
        let sc = shortcuts_from(&self.t, &self.rm, p, self.order);
        let mut out = Poly::zero();
        for c in &self.data {
            let g = Poly::term(
                1,
                self.t_mono(&c.alpha_dot, Var::T).mul(&self.t_mono(&c.beta_dot, Var::S)),
            )
            .mul(&self.r(c));
            let ha = if c.alpha.closed {
                Poly::term(1, self.pole_mono(&sc, &c.alpha, Var::A))
            } else {
                Poly::zero()
            }
            .sub(&Poly::one());
            let hb = if c.beta.closed {
                Poly::term(1, self.pole_mono(&sc, &c.beta, Var::B))
            } else {
                Poly::zero()
            }
            .sub(&Poly::one());
            out.add_assign(&g.mul(&ha).mul(&hb).scale(c.sign));
        }
        Ok(out)
    }
}

/// The two turns made by the oriented smoothing at a crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pass {
    /// Incoming over-strand to outgoing under-strand (lies on `alpha_c`).
    Alpha,
    /// Incoming under-strand to outgoing over-strand (lies on `beta_c`).
    Beta,
}

/// Side on which a smoothed curve is pushed off a constituent it runs along.
///
/// Both choices give invariants. They differ only at crossings between two
/// different segments whose smoothing leaves two segments, and reflecting the
/// sphere exchanges them.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PushOff {
    #[default]
    Left,
    Right,
}

impl PushOff {
    pub fn flip(self) -> PushOff {
        match self {
            PushOff::Left => PushOff::Right,
            PushOff::Right => PushOff::Left,
        }
    }
}

/// Push-off term contributed by one turn of the smoothing at `c`.
///
/// Where a smoothed curve runs along a strand of `e` it is counted as a
/// parallel copy pushed to one side of `e`. The only places such a copy can
/// leave `e` are the two turns at the smoothed crossing (poles are excluded),
/// so the ordered-pair count plus these terms is the push-off count.
/// Without them the sum over crossings is not invariant under R2 between
/// different constituents, and loops on the sphere need not meet `e` zero times.
pub fn pushoff_correction(side: PushOff, pass: Pass, sign: i64, over: usize, under: usize, e: usize) -> i64 {
    if over == under || (e != over && e != under) {
        return 0;
    }
    let toward = if e == over { 1 } else { -1 };
    match (side, pass) {
        (PushOff::Left, Pass::Alpha) if sign < 0 => -toward,
        (PushOff::Left, Pass::Beta) if sign > 0 => toward,
        (PushOff::Right, Pass::Alpha) if sign > 0 => toward,
        (PushOff::Right, Pass::Beta) if sign < 0 => -toward,
        _ => 0,
    }
}

pub fn generalized_index(d: &Diagram) -> Result<Poly> {
    IndexContext::new(d)?.generalized()
}

pub fn base_pointed_index(d: &Diagram, p: &str) -> Result<Poly> {
    IndexContext::new(d)?.base_pointed(p)
}

pub fn pole_centric_index(d: &Diagram, p: &str) -> Result<Poly> {
    IndexContext::new(d)?.pole_centric(p)
}

/// Moves the base pole of a base-pointed (or pole-centric) polynomial.
pub fn change_base_point(p: &Poly, new_base: &str, poles: &[String]) -> Poly {
    let a_new = Var::A(new_base.to_string());
    let b_new = Var::B(new_base.to_string());
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        let (ea, eb) = (m.exp(&a_new), m.exp(&b_new));
        let shift = Mono::from_pairs(
            poles
                .iter()
                .flat_map(|q| [(Var::A(q.clone()), -ea), (Var::B(q.clone()), -eb)]),
        );
        out.add_term(m.mul(&shift), c);
    }
    out
}

/// Which involution identity to apply to the right-hand side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdentityKind {
    Mir,
    Sym,
    Rot,
}

/// Right-hand side of the involution identity: the polynomial of the
/// original diagram after the matching variable substitution and sign.
pub fn involution_rhs(p: &Poly, kind: IdentityKind) -> Poly {
    let rbar = |v: &Var| match v {
        Var::R(x, y) => Var::R(y.clone(), x.clone()),
        w => w.clone(),
    };
    match kind {
        IdentityKind::Mir => p
            .rename_signed(|v| {
                (
                    match v {
                        Var::T(e) => Var::S(e.clone()),
                        Var::S(e) => Var::T(e.clone()),
                        Var::A(q) => Var::B(q.clone()),
                        Var::B(q) => Var::A(q.clone()),
                        w => rbar(w),
                    },
                    1,
                )
            })
            .neg(),
        IdentityKind::Sym => p
            .rename_signed(|v| match v {
                Var::T(_) | Var::S(_) | Var::A(_) | Var::B(_) => (v.clone(), -1),
                w => (w.clone(), 1),
            })
            .neg(),
        IdentityKind::Rot => p.rename_signed(|v| match v {
            Var::T(e) => (Var::S(e.clone()), -1),
            Var::S(e) => (Var::T(e.clone()), -1),
            Var::A(q) => (Var::B(q.clone()), -1),
            Var::B(q) => (Var::A(q.clone()), -1),
            w => (rbar(w), 1),
        }),
    }
}

/// Which polynomial an identity report is about.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexKind {
    BasePointed,
    PoleCentric,
}

/// Outcome of one involution identity check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub index: IndexKind,
    pub identity: IdentityKind,
    /// Left push-off on both sides.
    pub holds: bool,
    /// Right-hand side computed with the push-off side the involution
    /// actually produces (flipped for `sym` and `rot`).
    pub holds_mirrored: bool,
}

/// Checks the mir, sym and rot identities for both polynomial flavours.
pub fn involution_identities(d: &Diagram, p: &str) -> Result<Vec<IdentityCheck>> {
    let ctx = IndexContext::new(d)?;
    let flipped = IndexContext::with_options(d, BfsOrder::Forward, PushOff::Right)?;
    let mut out = Vec::new();
    for (kind, op) in [
        (IdentityKind::Mir, crate::involute::Involution::Mir),
        (IdentityKind::Sym, crate::involute::Involution::Sym),
        (IdentityKind::Rot, crate::involute::Involution::Rot),
    ] {
        let img = crate::involute::involute(d, op)?;
        let ictx = IndexContext::new(&img)?;
        let other = if kind == IdentityKind::Mir { &ctx } else { &flipped };
        for index in [IndexKind::BasePointed, IndexKind::PoleCentric] {
            let eval = |c: &IndexContext| match index {
                IndexKind::BasePointed => c.base_pointed(p),
                IndexKind::PoleCentric => c.pole_centric(p),
            };
            let lhs = eval(&ictx)?;
            out.push(IdentityCheck {
                index,
                identity: kind,
                holds: lhs == involution_rhs(&eval(&ctx)?, kind),
                holds_mirrored: lhs == involution_rhs(&eval(other)?, kind),
            });
        }
    }
    Ok(out)
}

/// `sum_e deg_{a_Q,b_Q}([r_{e,e}] p)`, an empty coefficient counting 0.
pub fn height_bound_index(p: &Poly, q: &str, constituents: &[String]) -> i64 {
    let s: BTreeSet<Var> = [Var::A(q.to_string()), Var::B(q.to_string())].into();
    constituents
        .iter()
        .map(|e| {
            p.coefficient_of(&Var::R(Sub::id(e), Sub::id(e)))
                .deg_subset(&s)
                .unwrap_or(0)
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relabel {
    /// `r -> 1`, `t_e -> t`, `s_e -> s`.
    Unlabeled,
    /// Segment subscripts become endpoint pairs, loop subscripts `L`.
    PoleLabeled,
}

pub fn unlabeled_reduction(p: &Poly, d: &Diagram, mode: Relabel) -> Poly {
    match mode {
        Relabel::Unlabeled => p.reindex(|v| match v {
            Var::R(..) => None,
            Var::T(_) => Some(Var::generic("t")),
            Var::S(_) => Some(Var::generic("s")),
            w => Some(w.clone()),
        }),
        Relabel::PoleLabeled => {
            let sub = |s: &Sub| -> Sub { relabel_sub(d, s) };
            p.reindex(|v| {
                Some(match v {
                    Var::R(x, y) => Var::R(sub(x), sub(y)),
                    Var::T(e) => Var::T(sub(e)),
                    Var::S(e) => Var::S(sub(e)),
                    w => w.clone(),
                })
            })
        }
    }
}

/// Endpoint-pair subscript of a segment, loop symbol for a loop.
pub fn relabel_sub(d: &Diagram, s: &Sub) -> Sub {
    match s {
        Sub::Id(e) => match d.constituent(e) {
            Some(c) if c.kind == Kind::Segment => {
                Sub::Ends(c.from.clone().unwrap_or_default(), c.to.clone().unwrap_or_default())
            }
            Some(_) => Sub::Loop,
            None => s.clone(),
        },
        other => other.clone(),
    }
}

fn knotoid_shape(d: &Diagram) -> Result<(&str, &str, &str)> {
    let mut segs = d.segments();
    match (segs.next(), segs.next(), d.loops().next()) {
        (Some(c), None, None) => Ok((
            c.id.as_str(),
            c.from.as_deref().unwrap_or_default(),
            c.to.as_deref().unwrap_or_default(),
        )),
        _ => Err(Error::Shape("expected a single segment and no loops".into())),
    }
}

/// `F^aff(t) = -G(1, 0, t)` for a knotoid diagram: minus the `s^0`
/// coefficient of the two-variable reduction.
pub fn affine_from_index(d: &Diagram) -> Result<Poly> {
    knotoid_shape(d)?;
    let g = unlabeled_reduction(&generalized_index(d)?, d, Relabel::Unlabeled);
    Ok(g.coefficient_at(&Var::generic("s"), 0).neg())
}

/// `F^ind(s, t) = -G~_L` at `r = s = t = 1`, `a_H = s^-1`, `b_H = t^-1`,
/// with `L` the tail pole and `H` the head pole.
pub fn strengthened_from_index(d: &Diagram) -> Result<Poly> {
    let (e, tail, head) = knotoid_shape(d)?;
    let gt = pole_centric_index(d, tail)?;
    let one = |v: Var| (v, Poly::one());
    let map = [
        one(Var::R(Sub::id(e), Sub::id(e))),
        one(Var::T(Sub::id(e))),
        one(Var::S(Sub::id(e))),
        one(Var::A(tail.to_string())),
        one(Var::B(tail.to_string())),
        (Var::A(head.to_string()), Poly::var_pow(Var::generic("s"), -1)),
        (Var::B(head.to_string()), Poly::var_pow(Var::generic("t"), -1)),
    ]
    .into_iter()
    .collect();
    Ok(gt.substitute(&map)?.neg())
}
