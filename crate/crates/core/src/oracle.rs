//! Reference implementations used to cross-check the main algorithms.
//!
//! They work directly on the string-keyed diagram through Gauss sequences and
//! PD-style edge labels, sharing no code with the slot and face machinery.

use std::collections::{BTreeMap, HashMap};

use crate::diagram::*;
use crate::laurent::{Poly, Var};

type Slot = (usize, usize);

fn slot_table(d: &Diagram) -> HashMap<(String, End), Slot> {
    let mut m = HashMap::new();
    for (ci, c) in d.crossings.iter().enumerate() {
        for (k, s) in c.slots.iter().enumerate() {
            m.insert((s.arc.clone(), s.end), (ci, k));
        }
    }
    m
}

/// One pass of a constituent through a crossing.
#[derive(Clone, Copy, Debug)]
pub struct Passage {
    pub crossing: usize,
    /// Slot the strand enters through.
    pub in_slot: usize,
    pub over: bool,
}

/// Gauss sequence of a constituent: its crossing passages in trace order.
pub fn gauss(d: &Diagram, con: &Constituent) -> Vec<Passage> {
    let tab = slot_table(d);
    let n = con.trace.len();
    let links = if con.kind == Kind::Loop { n } else { n.saturating_sub(1) };
    let mut out = Vec::new();
    for i in 0..links {
        let (arc, dir) = &con.trace[i];
        let exit = if *dir == Dir::Fwd { End::Head } else { End::Tail };
        if let Some(&(c, k)) = tab.get(&(arc.clone(), exit)) {
            let over = match d.crossings[c].over {
                Over::Even => k % 2 == 0,
                Over::Odd => k % 2 == 1,
            };
            out.push(Passage {
                crossing: c,
                in_slot: k,
                over,
            });
        }
    }
    out
}

/// Crossing signs from the Gauss sequences of all constituents.
pub fn signs(d: &Diagram) -> Vec<i64> {
    let mut over_in = vec![None; d.crossings.len()];
    let mut under_in = vec![None; d.crossings.len()];
    for con in &d.constituents {
        for p in gauss(d, con) {
            if p.over {
                over_in[p.crossing] = Some(p.in_slot);
            } else {
                under_in[p.crossing] = Some(p.in_slot);
            }
        }
    }
    (0..d.crossings.len())
        .map(|c| {
            let (o, u) = (over_in[c].unwrap(), under_in[c].unwrap());
            // Counterclockwise quarter turn from the over- to the under-direction.
            if (u + 4 - o) % 4 == 1 {
                1
            } else {
                -1
            }
        })
        .collect()
}

/// Per-crossing data of a knotoid diagram, from its Gauss sequence.
#[derive(Clone, Debug)]
pub struct KnotoidCrossing {
    pub sign: i64,
    pub early_under: bool,
    /// Intersection of the closed-off loop with the remaining segment.
    pub ind: i64,
    /// `ind` if early-under, `-ind` otherwise.
    pub w: i64,
}

/// Affine-index data for a diagram with a single segment constituent.
pub fn knotoid_crossings(d: &Diagram) -> Vec<KnotoidCrossing> {
    let seg = d.segments().next().expect("knotoid needs a segment");
    let g = gauss(d, seg);
    let sg = signs(d);
    let mut first = HashMap::new();
    let mut second = HashMap::new();
    for (i, p) in g.iter().enumerate() {
        if first.contains_key(&p.crossing) {
            second.insert(p.crossing, i);
        } else {
            first.insert(p.crossing, i);
        }
    }
    (0..d.crossings.len())
        .map(|c| {
            let (i, j) = (first[&c], second[&c]);
            let inside = |k: usize| k > i && k < j;
            let mut ind = 0;
            for dd in 0..d.crossings.len() {
                let (a, b) = (first[&dd], second[&dd]);
                if inside(a) == inside(b) {
                    continue;
                }
                let loop_pass = if inside(a) { a } else { b };
                ind += if g[loop_pass].over { -sg[dd] } else { sg[dd] };
            }
            let early_under = !g[i].over;
            KnotoidCrossing {
                sign: sg[c],
                early_under,
                ind,
                w: if early_under { ind } else { -ind },
            }
        })
        .collect()
}

fn mono(v: &str, e: i64) -> Poly {
    Poly::var_pow(Var::generic(v), e)
}

/// `sum_c sgn(c) (t^{w(c)} - 1)`.
pub fn affine_index(d: &Diagram) -> Poly {
    let mut p = Poly::zero();
    for k in knotoid_crossings(d) {
        p.add_assign(&mono("t", k.w).sub(&Poly::one()).scale(k.sign));
    }
    p
}

/// Early-under crossings contribute in `s`, early-over ones in `t`.
pub fn strengthened_index(d: &Diagram) -> Poly {
    let mut p = Poly::zero();
    for k in knotoid_crossings(d) {
        let v = if k.early_under { "s" } else { "t" };
        p.add_assign(&mono(v, k.ind).sub(&Poly::one()).scale(k.sign));
    }
    p
}

/// Classical Kauffman bracket with the unknot normalized to 1, by memoized
/// skein recursion on edge-labelled crossings. Only for diagrams whose
/// constituents are all loops.
pub fn classical_bracket(d: &Diagram) -> Poly {
    // Edge labels: one per arc; the two arc ends carry the same label.
    let ids: HashMap<&str, u32> = d.arcs.iter().enumerate().map(|(i, a)| (a.as_str(), i as u32)).collect();
    let mut pd: Vec<[u32; 4]> = Vec::new();
    for c in &d.crossings {
        let mut e: [u32; 4] = [0; 4];
        for k in 0..4 {
            e[k] = ids[c.slots[k].arc.as_str()];
        }
        // Rotate so that the over-strand uses positions 0 and 2.
        if c.over == Over::Odd {
            e.rotate_left(1);
        }
        pd.push(e);
    }
    let attached: std::collections::HashSet<u32> = pd.iter().flatten().copied().collect();
    let free = d.arcs.len() as u32 - attached.len() as u32;
    let mut memo = BTreeMap::new();
    let h = skein(canonical(&pd), &mut memo);
    // h counts loops created by smoothings; free loops contribute delta each.
    let total = h.mul(&delta().pow(free as i64).unwrap());
    divide_by_delta(&total)
}

fn delta() -> Poly {
    Poly::var_pow(Var::Kauffman, 2).add(&Poly::var_pow(Var::Kauffman, -2)).neg()
}

fn canonical(pd: &[[u32; 4]]) -> Vec<[u32; 4]> {
    let mut map = HashMap::new();
    pd.iter()
        .map(|x| {
            x.map(|e| {
                let n = map.len() as u32;
                *map.entry(e).or_insert(n)
            })
        })
        .collect()
}

/// Sum over full smoothings of `A^sigma delta^loops`.
fn skein(pd: Vec<[u32; 4]>, memo: &mut BTreeMap<Vec<[u32; 4]>, Poly>) -> Poly {
    if pd.is_empty() {
        return Poly::one();
    }
    if let Some(p) = memo.get(&pd) {
        return p.clone();
    }
    let last = pd[pd.len() - 1];
    let rest = &pd[..pd.len() - 1];
    let a = Poly::var(Var::Kauffman);
    let ainv = Poly::var_pow(Var::Kauffman, -1);
    let mut out = Poly::zero();
    // A joins slots (1,2) and (3,0); B joins (0,1) and (2,3).
    for (pairs, coef) in [([(1, 2), (3, 0)], &a), ([(0, 1), (2, 3)], &ainv)] {
        let mut rem: Vec<[u32; 4]> = rest.to_vec();
        let mut loops = 0;
        let mut pending: Vec<(u32, u32)> = pairs.iter().map(|&(i, j)| (last[i], last[j])).collect();
        while let Some((x, y)) = pending.pop() {
            if x == y {
                loops += 1;
                continue;
            }
            // Rename y to x everywhere, including in pending joins.
            for c in rem.iter_mut() {
                for e in c.iter_mut() {
                    if *e == y {
                        *e = x;
                    }
                }
            }
            for p in pending.iter_mut() {
                if p.0 == y {
                    p.0 = x;
                }
                if p.1 == y {
                    p.1 = x;
                }
            }
        }
        let sub = skein(canonical(&rem), memo);
        out.add_assign(&sub.mul(coef).mul(&delta().pow(loops).unwrap()));
    }
    memo.insert(pd, out.clone());
    out
}

/// Exact division by `-A^2 - A^-2`; panics if not divisible.
fn divide_by_delta(p: &Poly) -> Poly {
    // Work with the univariate coefficient list in A.
    let mut coeffs: BTreeMap<i64, num_bigint::BigInt> = BTreeMap::new();
    for (m, c) in p.terms() {
        coeffs.insert(m.exp(&Var::Kauffman), c.clone());
    }
    let mut q = Poly::zero();
    // delta = -A^-2 (1 + A^4); divide from the top degree down.
    while let Some((&top, c)) = coeffs.iter().next_back() {
        let c = c.clone();
        // top term of delta is -A^2.
        let qe = top - 2;
        let qc = -c;
        q.add_term(crate::laurent::Mono::var(Var::Kauffman, qe), &qc);
        for (de, dc) in [(2i64, -1i64), (-2, -1)] {
            let e = qe + de;
            let v = coeffs.entry(e).or_default();
            *v -= &qc * dc;
            if v == &num_bigint::BigInt::from(0) {
                coeffs.remove(&e);
            }
        }
        assert!(coeffs.keys().all(|&e| e < top), "division by delta did not terminate");
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn classical_values() {
        assert_eq!(classical_bracket(&fixtures::unknot()), Poly::one());
        // Hopf link with positive crossings: -A^4 - A^-4.
        assert_eq!(classical_bracket(&fixtures::hopf()).to_string(), "-A^4 - A^-4");
        assert_eq!(classical_bracket(&fixtures::kink_pos()).to_string(), "-A^3");
        assert_eq!(classical_bracket(&fixtures::kink_neg()).to_string(), "-A^-3");
        // Trefoil: A^-7 - A^-3 - A^5 for the positive one.
        assert_eq!(classical_bracket(&fixtures::trefoil()).to_string(), "-A^5 - A^-3 + A^-7");
    }

    #[test]
    fn signs_of_fixtures() {
        assert_eq!(signs(&fixtures::hopf()), vec![1, 1]);
        assert_eq!(signs(&fixtures::trefoil()), vec![1, 1, 1]);
        assert_eq!(signs(&fixtures::kink_pos()), vec![1]);
        assert_eq!(signs(&fixtures::kink_neg()), vec![-1]);
        assert_eq!(signs(&fixtures::half()), vec![1]);
    }
}
