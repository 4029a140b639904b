//! Seeded property and oracle checks shared by `selftest` and the
//! acceptance run. Every check counts cases and failures and keeps the first
//! failure for the report.

use std::collections::BTreeMap;
use std::fmt;

use crate::bracket::{self, normalized_bracket, reduce_bracket, skein_check, with_trivial_loop, BracketContext, Reductions};
use crate::curves::{lk_matrix, BfsOrder};
use crate::diagram::Diagram;
use crate::error::Result;
use crate::fixtures;
use crate::gen::{random_diagram, Family, GenParams};
use crate::height::{diagram_height, HeightBounds};
use crate::index::{self, IdentityKind, IndexContext};
use crate::laurent::{Mono, Poly, Sub, Var};
use crate::moves::{apply_move, enumerate_moves, isomorphic, perturb};
use crate::oracle;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            cases: 0,
            failures: 0,
            first_failure: None,
        }
    }

    pub fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }

    /// Records an error from the computation itself as a failure.
    pub fn record_result(&mut self, r: Result<bool>, what: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.record(ok, what),
            Err(e) => self.record(false, || format!("{}: {e}", what())),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{tag} {} ({} cases, {} failures)", self.name, self.cases, self.failures)?;
        if let Some(x) = &self.first_failure {
            write!(f, "; first: {x}")?;
        }
        Ok(())
    }
}

/// Corpus sizes for one run.
#[derive(Clone, Copy, Debug)]
pub struct Plan {
    pub seed: u64,
    pub diagrams: usize,
    /// Perturbation walks per diagram in the invariance suite.
    pub walks: usize,
    /// Longest walk.
    pub walk_len: usize,
    pub state_cap: u64,
}

impl Plan {
    pub fn small(seed: u64, diagrams: usize) -> Plan {
        Plan {
            seed,
            diagrams,
            walks: 3,
            walk_len: 6,
            state_cap: crate::curves::DEFAULT_STATE_CAP,
        }
    }

    fn seed(&self, i: usize) -> u64 {
        self.seed.wrapping_mul(1_000_003).wrapping_add(i as u64)
    }
}

/// Mostly general diagrams, with every fourth one from a special family.
fn mixed_family(i: usize) -> Family {
    match i % 12 {
        3 => Family::Knotoid,
        7 => Family::Staked,
        11 => Family::Classical,
        _ => Family::General,
    }
}

/// Every invariant the suite compares, in a fixed order.
#[derive(Debug, PartialEq, Eq)]
pub struct Snapshot {
    lk: Vec<Vec<i64>>,
    index: Vec<Poly>,
    bracket: Poly,
}

pub fn snapshot(d: &Diagram, cap: u64) -> Result<Snapshot> {
    let ctx = IndexContext::new(d)?;
    let mut index = vec![ctx.generalized()?];
    for p in &d.poles {
        index.push(ctx.base_pointed(&p.id)?);
        index.push(ctx.pole_centric(&p.id)?);
    }
    Ok(Snapshot {
        lk: lk_matrix(d)?.1,
        index,
        bracket: normalized_bracket(d, cap)?,
    })
}

/// Invariants are unchanged along random move sequences.
pub fn invariance(plan: &Plan) -> Check {
    let mut ck = Check::new("invariance of lk, G, G_P, G~_P and the normalized bracket under moves");
    let params = GenParams::default();
    for i in 0..plan.diagrams {
        let seed = plan.seed(i);
        let d = random_diagram(mixed_family(i), &params, seed);
        let before = match snapshot(&d, plan.state_cap) {
            Ok(s) => s,
            Err(e) => {
                ck.record(false, || format!("seed {seed}: {e}"));
                continue;
            }
        };
        for w in 0..plan.walks {
            let len = 1 + w % plan.walk_len.max(1);
            let ws = seed.wrapping_mul(31).wrapping_add(w as u64);
            ck.record_result(
                perturb(&d, len, ws).and_then(|(e, _)| Ok(snapshot(&e, plan.state_cap)? == before)),
                || format!("diagram seed {seed}, walk seed {ws}, length {len}"),
            );
        }
    }
    ck
}

fn generic(v: &str, k: i64) -> Mono {
    Mono::var(Var::generic(v), k)
}

/// `r (F(t s^-1) - F(t) - F(s^-1))` in the labelled variables of `e`.
fn index_from_affine(f: &Poly, e: &str) -> Poly {
    let (t, s) = (Var::T(Sub::id(e)), Var::S(Sub::id(e)));
    let mut out = Poly::zero();
    for (m, c) in f.terms() {
        let k = m.exp(&Var::generic("t"));
        let ts = Mono::from_pairs([(t.clone(), k), (s.clone(), -k)]);
        let term = Poly::term(1, ts)
            .sub(&Poly::term(1, Mono::var(t.clone(), k)))
            .sub(&Poly::term(1, Mono::var(s.clone(), -k)));
        out.add_assign(&term.scale(c.clone()));
    }
    out.mul(&Poly::var(Var::R(Sub::id(e), Sub::id(e))))
}

fn invert_t(f: &Poly) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in f.terms() {
        out.add_term(generic("t", -m.exp(&Var::generic("t"))), c);
    }
    out
}

/// Knotoid diagrams against the Gauss-sequence oracles.
pub fn knotoid_oracles(plan: &Plan) -> Vec<Check> {
    let mut a = Check::new("knotoid: alpha_c.e = w(c) = -beta_c.e");
    let mut b = Check::new("knotoid: F^aff(t) = F^aff(t^-1)");
    let mut c = Check::new("knotoid: G = r(F^aff(t/s) - F^aff(t) - F^aff(1/s))");
    let mut dd = Check::new("knotoid: -G~_L(s^-1, t^-1) at r=s=t=1 equals F^ind");
    let params = GenParams::default();
    for i in 0..plan.diagrams {
        let seed = plan.seed(i);
        let d = random_diagram(Family::Knotoid, &params, seed);
        let what = || format!("knotoid seed {seed}");
        let ctx = match IndexContext::new(&d) {
            Ok(x) => x,
            Err(e) => {
                a.record(false, || format!("seed {seed}: {e}"));
                continue;
            }
        };
        let ks = oracle::knotoid_crossings(&d);
        for x in &ctx.data {
            let w = ks[x.crossing].w;
            a.record(x.alpha_dot[0] == w && x.beta_dot[0] == -w, || {
                format!("seed {seed}, crossing {}", d.crossings[x.crossing].id)
            });
        }
        let f_oracle = oracle::affine_index(&d);
        b.record_result(
            index::affine_from_index(&d).map(|f| f == invert_t(&f) && f == f_oracle),
            what,
        );
        let e = d.constituents[0].id.clone();
        c.record_result(
            ctx.generalized().map(|g| g == index_from_affine(&f_oracle, &e)),
            what,
        );
        dd.record_result(
            index::strengthened_from_index(&d).map(|f| f == oracle::strengthened_index(&d)),
            what,
        );
    }
    vec![a, b, c, dd]
}

/// Named classical fixtures followed by random classical links.
pub fn classical_corpus(plan: &Plan) -> Vec<(String, Diagram)> {
    let mut v: Vec<(String, Diagram)> = fixtures::all()
        .into_iter()
        .map(|(n, d)| (n.to_string(), d))
        .filter(|(_, d)| d.is_classical_link())
        .collect();
    let params = GenParams::default();
    for i in 0..plan.diagrams {
        let seed = plan.seed(i);
        v.push((format!("classical seed {seed}"), random_diagram(Family::Classical, &params, seed)));
    }
    v
}

/// Reductions (ii)+(iii) against the skein-recursion oracle.
pub fn classical_bracket(plan: &Plan) -> Check {
    let mut ck = Check::new("classical links: reduced bracket = delta * skein bracket");
    let modes = Reductions {
        drop_pole_labels: true,
        drop_orientation: true,
        ..Default::default()
    };
    for (name, d) in classical_corpus(plan) {
        let want = oracle::classical_bracket(&d).mul(&bracket::delta());
        ck.record_result(reduce_bracket(&d, modes, plan.state_cap).map(|r| r.raw == want), || name.clone());
    }
    ck
}

/// Base-point change, involution identities and vanishing on classical and
/// staked links. The last check reports the involution identities with the
/// push-off side exchanged on the right-hand side.
pub fn index_identities(plan: &Plan) -> Vec<Check> {
    let mut base = Check::new("index: base-point change = direct recomputation");
    let mut ids: BTreeMap<&str, Check> = BTreeMap::new();
    for k in ["mir", "sym", "rot"] {
        ids.insert(k, Check::new(format!("index: involution identity {k}")));
    }
    let mut mirrored = Check::new("index: sym/rot identities with mirrored push-off side");
    let mut classical = Check::new("index: G = 0 on classical links");
    let mut staked = Check::new("index: G_P = 0 on staked links");
    let params = GenParams::default();
    for i in 0..plan.diagrams {
        let seed = plan.seed(i);
        let d = random_diagram(Family::General, &params, seed);
        let ctx = match IndexContext::new(&d) {
            Ok(x) => x,
            Err(e) => {
                base.record(false, || format!("seed {seed}: {e}"));
                continue;
            }
        };
        let poles = ctx.pole_ids.clone();
        for p in &poles {
            let (gp, gt) = (ctx.base_pointed(p), ctx.pole_centric(p));
            for q in &poles {
                base.record_result(
                    (|| {
                        Ok(index::change_base_point(gp.as_ref().map_err(Clone::clone)?, q, &poles)
                            == ctx.base_pointed(q)?
                            && index::change_base_point(gt.as_ref().map_err(Clone::clone)?, q, &poles)
                                == ctx.pole_centric(q)?)
                    })(),
                    || format!("seed {seed}, {p} -> {q}"),
                );
            }
            match index::involution_identities(&d, p) {
                Ok(checks) => {
                    for x in checks {
                        let k = match x.identity {
                            IdentityKind::Mir => "mir",
                            IdentityKind::Sym => "sym",
                            IdentityKind::Rot => "rot",
                        };
                        let what = || format!("seed {seed}, pole {p}, {:?}", x.index);
                        ids.get_mut(k).unwrap().record(x.holds, what);
                        if k != "mir" {
                            mirrored.record(x.holds_mirrored, what);
                        }
                    }
                }
                Err(e) => ids.get_mut("mir").unwrap().record(false, || format!("seed {seed}: {e}")),
            }
        }
        let c = random_diagram(Family::Classical, &params, seed);
        classical.record_result(index::generalized_index(&c).map(|g| g.is_zero()), || {
            format!("classical seed {seed}")
        });
        let s = random_diagram(Family::Staked, &params, seed);
        for p in &s.poles {
            staked.record_result(index::base_pointed_index(&s, &p.id).map(|g| g.is_zero()), || {
                format!("staked seed {seed}, pole {}", p.id)
            });
        }
    }
    for (name, d) in fixtures::all() {
        if d.is_classical_link() {
            classical.record_result(index::generalized_index(&d).map(|g| g.is_zero()), || name.to_string());
        }
    }
    let mut out = vec![base];
    out.extend(ids.into_values());
    out.extend([classical, staked, mirrored]);
    out
}

/// State bit patterns to inspect: all of them for small diagrams, a seeded
/// spread otherwise.
fn sample_states(n_crossings: usize, seed: u64) -> Vec<u64> {
    if n_crossings <= 6 {
        return (0..1u64 << n_crossings).collect();
    }
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..64).map(|_| rng.gen::<u64>() & ((1u64 << n_crossings) - 1)).collect()
}

/// Skein and disjoint-union relations and per-state structure of the
/// bracket.
pub fn bracket_internals(plan: &Plan) -> Vec<Check> {
    let mut skein = Check::new("bracket: skein relation at every crossing");
    let mut union = Check::new("bracket: disjoint trivial loop multiplies by delta");
    let mut loops = Check::new("bracket: n0 + sum nU = loop count per state");
    let mut e0 = Check::new("bracket: E_s exponent at the base pole e_0 is 0");
    let mut tri = Check::new("bracket: mu(P,P) = 0 and mu(P,Q) + mu(Q,R) = mu(P,R)");
    let params = GenParams::default();
    for i in 0..plan.diagrams {
        let seed = plan.seed(i);
        let d = random_diagram(mixed_family(i), &params, seed);
        for c in &d.crossings {
            skein.record_result(skein_check(&d, &c.id, plan.state_cap).map(|r| r.holds), || {
                format!("seed {seed}, crossing {}", c.id)
            });
        }
        union.record_result(
            (|| {
                let z = with_trivial_loop(&d);
                Ok(bracket::generalized_bracket(&z, plan.state_cap)?
                    == bracket::generalized_bracket(&d, plan.state_cap)?.mul(&bracket::delta()))
            })(),
            || format!("seed {seed}"),
        );
        let ctx = match BracketContext::new(&d) {
            Ok(x) => x,
            Err(e) => {
                loops.record(false, || format!("seed {seed}: {e}"));
                continue;
            }
        };
        let np = ctx.pole_ids.len();
        for bits in sample_states(d.crossings.len(), seed) {
            let f = match ctx.state_factors(bits) {
                Ok(f) => f,
                Err(e) => {
                    loops.record(false, || format!("seed {seed}, state {bits}: {e}"));
                    continue;
                }
            };
            loops.record(f.n0 + f.n_u.values().sum::<usize>() == f.loops, || {
                format!("seed {seed}, state {bits}")
            });
            for a in &f.aligned {
                let z = ctx.e0_of(&a.base).unwrap_or(0);
                e0.record(a.mu[z] == 0, || format!("seed {seed}, state {bits}, segment {}", a.base));
                // The triangle on the first three poles keeps the cost linear.
                let m = |p: usize, q: usize| ctx.mu_between(bits, &a.base, p, q);
                for p in 0..np.min(3) {
                    tri.record_result(m(p, p).map(|x| x == 0), || format!("seed {seed}, state {bits}, mu(P,P)"));
                    for q in 0..np.min(3) {
                        for r in 0..np.min(3) {
                            tri.record_result(
                                (|| Ok(m(p, q)? + m(q, r)? == m(p, r)?))(),
                                || format!("seed {seed}, state {bits}, poles {p} {q} {r}"),
                            );
                        }
                    }
                }
            }
        }
    }
    vec![skein, union, loops, e0, tri]
}

/// Lower bounds against diagram heights, and their invariance.
pub fn height_consistency(plan: &Plan) -> Vec<Check> {
    let mut below = Check::new("height: every lower bound <= diagram height");
    let mut stable = Check::new("height: lower bounds unchanged under moves");
    let mut nest = Check::new("height: nested-loop fixtures have heights 0, 1, 2");
    let params = GenParams::default();
    for i in 0..plan.diagrams {
        let seed = plan.seed(i);
        let d = random_diagram(Family::General, &params, seed);
        let poles: Vec<String> = d.poles.iter().map(|p| p.id.clone()).collect();
        let perturbed = perturb(&d, plan.walk_len, seed);
        let mut run = || -> Result<()> {
            let hb = HeightBounds::new(&d, plan.state_cap)?;
            let (e, _) = perturbed.clone()?;
            let hb2 = HeightBounds::new(&e, plan.state_cap)?;
            for p in &poles {
                for q in &poles {
                    if p == q {
                        continue;
                    }
                    let r = hb.report(p, q)?;
                    let h = num_rational::Rational64::from_integer(r.diagram_height as i64);
                    for (k, v) in &r.bounds {
                        below.record(*v <= h, || format!("seed {seed}, {p} {q}, {k} = {v} > {h}"));
                    }
                    stable.record(hb2.bounds(p, q)? == r.bounds, || format!("seed {seed}, {p} {q}"));
                }
            }
            Ok(())
        };
        if let Err(e) = run() {
            below.record(false, || format!("seed {seed}: {e}"));
        }
    }
    for (d, want) in [(fixtures::nest0(), 0), (fixtures::nest1(), 1), (fixtures::nest2(), 2)] {
        nest.record_result(diagram_height(&d, "P", "Q").map(|h| h == want), || {
            format!("expected height {want}")
        });
    }
    vec![below, stable, nest]
}

/// GKD round trips, move/inverse round trips and seeded determinism.
pub fn round_trips(plan: &Plan) -> Vec<Check> {
    let mut gkd = Check::new("determinism: GKD parse/serialize round trip");
    let mut inverse = Check::new("determinism: every move has an inverse up to isomorphism");
    let mut seeded = Check::new("determinism: perturb is a function of its seed");
    let params = GenParams::default();
    let small = GenParams {
        max_crossings: 4,
        ..params
    };
    for i in 0..plan.diagrams {
        let seed = plan.seed(i);
        let d = random_diagram(mixed_family(i), &params, seed);
        let text = crate::serialize_gkd(&d);
        gkd.record_result(
            crate::parse_gkd(&text).map(|e| e == d && crate::serialize_gkd(&e) == text),
            || format!("seed {seed}"),
        );
        seeded.record_result(
            (|| Ok(perturb(&d, plan.walk_len, seed)? == perturb(&d, plan.walk_len, seed)?))(),
            || format!("seed {seed}"),
        );
        let s = random_diagram(mixed_family(i), &small, seed);
        let sites = match enumerate_moves(&s) {
            Ok(x) => x,
            Err(e) => {
                inverse.record(false, || format!("seed {seed}: {e}"));
                continue;
            }
        };
        for site in sites {
            inverse.record_result(
                (|| {
                    let e = apply_move(&s, &site)?;
                    for back in enumerate_moves(&e)? {
                        if back.delta() == -site.delta() && isomorphic(&apply_move(&e, &back)?, &s)? {
                            return Ok(true);
                        }
                    }
                    Ok(false)
                })(),
                || format!("seed {seed}, {site:?}"),
            );
        }
    }
    for (name, d) in fixtures::all() {
        let text = crate::serialize_gkd(&d);
        gkd.record_result(crate::parse_gkd(&text).map(|e| e == d), || name.to_string());
    }
    vec![gkd, inverse, seeded]
}

/// Shortcut intersections do not depend on the BFS tie-break.
pub fn shortcut_independence(plan: &Plan) -> Check {
    let mut ck = Check::new("curves: shortcut intersections independent of the chosen shortcut");
    let params = GenParams::default();
    for i in 0..plan.diagrams {
        let seed = plan.seed(i);
        let d = random_diagram(Family::General, &params, seed);
        ck.record_result(
            (|| {
                let f = IndexContext::with_order(&d, BfsOrder::Forward)?;
                let r = IndexContext::with_order(&d, BfsOrder::Reverse)?;
                for p in &f.pole_ids {
                    if f.base_pointed(p)? != r.base_pointed(p)? || f.pole_centric(p)? != r.pole_centric(p)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            })(),
            || format!("seed {seed}"),
        );
    }
    ck
}

/// Everything `selftest` runs, in report order.
pub fn run_all(plan: &Plan) -> Vec<Check> {
    let mut v = vec![invariance(plan)];
    v.extend(knotoid_oracles(plan));
    v.push(classical_bracket(plan));
    v.extend(index_identities(plan));
    v.extend(bracket_internals(plan));
    v.extend(height_consistency(plan));
    v.extend(round_trips(plan));
    v.push(shortcut_independence(plan));
    v
}
