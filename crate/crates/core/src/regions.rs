//! Global regions of the complement: per-component faces fused along the
//! placement forest.

use std::collections::BTreeMap;

use crate::diagram::*;
use crate::error::{Error, Result};
use crate::topo::{departing, Topo};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RegionKey {
    Side(String, Side),
    Pole(String),
}

#[derive(Clone, Debug)]
pub struct RegionMap {
    pub keys: Vec<RegionKey>,
    pub names: Vec<String>,
    pub face_region: Vec<usize>,
    /// `[left, right]` region of each arc.
    pub arc_regions: Vec<[usize; 2]>,
    /// Regions incident to each pole, sorted.
    pub pole_regions: Vec<Vec<usize>>,
    /// Poles incident to each region, sorted by pole index.
    pub region_poles: Vec<Vec<usize>>,
    /// Boundary sides of each region.
    pub region_sides: Vec<Vec<(usize, Side)>>,
}

struct Uf(Vec<usize>);

impl Uf {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }
}

impl RegionMap {
    pub fn n(&self) -> usize {
        self.keys.len()
    }

    pub fn build(d: &Diagram, t: &Topo) -> Result<RegionMap> {
        let nf = t.faces.len();
        let iso: Vec<usize> = (0..t.n_comp).filter_map(|c| t.comp_pole[c]).collect();
        let pole_node: BTreeMap<usize, usize> = iso.iter().enumerate().map(|(i, &p)| (p, nf + i)).collect();
        let mut uf = Uf((0..nf + iso.len()).collect());

        let outer_node = |p: &Placement| -> Result<usize> {
            let c = p.component;
            match (t.comp_first_arc.get(c).copied().flatten(), t.comp_pole.get(c).copied().flatten()) {
                (Some(first), _) => Ok(match &p.outer {
                    Some(o) => {
                        let a = *t
                            .arc_index
                            .get(&o.arc)
                            .ok_or_else(|| Error::UnresolvedPlacement(o.to_string()))?;
                        t.face(a, o.side)
                    }
                    None => t.face(first, Side::R),
                }),
                (None, Some(pole)) => Ok(pole_node[&pole]),
                _ => Err(Error::UnresolvedPlacement(format!("component {c}"))),
            }
        };

        let mut free: Option<usize> = None;
        for p in &d.placements {
            let o = outer_node(p)?;
            match &p.witness {
                Witness::Root | Witness::Sphere => {
                    if let Some(f) = free {
                        uf.union(o, f);
                    }
                    free = Some(o);
                }
                Witness::Arc(w) => {
                    let a = *t
                        .arc_index
                        .get(&w.arc)
                        .ok_or_else(|| Error::UnresolvedPlacement(w.to_string()))?;
                    uf.union(o, t.face(a, w.side));
                }
            }
        }

        // Canonical keys per class.
        let mut best: BTreeMap<usize, RegionKey> = BTreeMap::new();
        let mut offer = |root: usize, key: RegionKey| {
            best.entry(root)
                .and_modify(|k| {
                    if key < *k {
                        *k = key.clone()
                    }
                })
                .or_insert(key);
        };
        for a in 0..t.n_arcs() {
            for s in [Side::L, Side::R] {
                let r = uf.find(t.face(a, s));
                offer(r, RegionKey::Side(t.arc_ids[a].clone(), s));
            }
        }
        let pole_ids = t.pole_ids();
        for (&p, &node) in &pole_node {
            let r = uf.find(node);
            // Pole keys sort after side keys, so a region with boundary keeps its side name.
            offer(r, RegionKey::Pole(pole_ids[p].clone()));
        }
        let mut order: Vec<(RegionKey, usize)> = best.into_iter().map(|(r, k)| (k, r)).collect();
        order.sort();
        let root_region: BTreeMap<usize, usize> = order.iter().enumerate().map(|(i, (_, r))| (*r, i)).collect();
        let keys: Vec<RegionKey> = order.into_iter().map(|(k, _)| k).collect();
        let names = keys
            .iter()
            .map(|k| match k {
                RegionKey::Side(a, s) => format!("{a}:{}", s.as_str()),
                RegionKey::Pole(p) => p.clone(),
            })
            .collect();

        let face_region: Vec<usize> = (0..nf).map(|f| root_region[&uf.find(f)]).collect();
        let arc_regions: Vec<[usize; 2]> = (0..t.n_arcs())
            .map(|a| [face_region[t.face(a, Side::L)], face_region[t.face(a, Side::R)]])
            .collect();
        let nr = keys.len();
        let mut pole_regions = vec![Vec::new(); t.n_poles()];
        for (p, slots) in t.pslots.iter().enumerate() {
            let mut v: Vec<usize> = if slots.is_empty() {
                vec![root_region[&uf.find(pole_node[&p])]]
            } else {
                slots.iter().map(|&(a, e)| face_region[t.half_face[departing(a, e)]]).collect()
            };
            v.sort();
            v.dedup();
            pole_regions[p] = v;
        }
        let mut region_poles = vec![Vec::new(); nr];
        for (p, rs) in pole_regions.iter().enumerate() {
            for &r in rs {
                region_poles[r].push(p);
            }
        }
        let mut region_sides = vec![Vec::new(); nr];
        for (a, rs) in arc_regions.iter().enumerate() {
            region_sides[rs[0]].push((a, Side::L));
            region_sides[rs[1]].push((a, Side::R));
        }
        Ok(RegionMap {
            keys,
            names,
            face_region,
            arc_regions,
            pole_regions,
            region_poles,
            region_sides,
        })
    }

    pub fn region_of(&self, arc: usize, side: Side) -> usize {
        self.arc_regions[arc][side.idx()]
    }
}

pub fn regions(d: &Diagram) -> Result<RegionMap> {
    let t = crate::topo::checked(d)?;
    RegionMap::build(d, &t)
}
