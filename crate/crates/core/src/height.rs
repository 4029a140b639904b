//! Diagram heights between poles and the polynomial lower bounds on them.

use num_rational::Rational64;
use serde::Serialize;

use crate::bracket::{bracket_bounds, normalized_bracket};
use crate::curves::{bfs_tree, region_graph, BfsOrder};
use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::index::{height_bound_index, IndexContext};
use crate::regions::RegionMap;
use crate::topo::checked;

fn pole_index(d: &Diagram, p: &str) -> Result<usize> {
    d.poles
        .iter()
        .position(|x| x.id == p)
        .ok_or_else(|| Error::UnknownPole(p.to_string()))
}

/// Fewest arc crossings of a shortcut from `a` to `b`.
pub fn diagram_height(d: &Diagram, a: &str, b: &str) -> Result<usize> {
    if a == b {
        return Err(Error::SamePole(a.to_string()));
    }
    let t = checked(d)?;
    let rm = RegionMap::build(d, &t)?;
    let (ia, ib) = (t.pole_index[&d.poles[pole_index(d, a)?].id], t.pole_index[&d.poles[pole_index(d, b)?].id]);
    Ok(heights_from(&rm, ia)[ib])
}

fn heights_from(rm: &RegionMap, p: usize) -> Vec<usize> {
    let adj = region_graph(rm);
    let (_, dist) = bfs_tree(rm, &adj, &rm.pole_regions[p], BfsOrder::Forward);
    rm.pole_regions
        .iter()
        .map(|rs| rs.iter().map(|&r| dist[r]).min().unwrap_or(usize::MAX))
        .collect()
}

/// Pole ids with the symmetric matrix of diagram heights (diagonal 0).
pub fn height_spectrum(d: &Diagram) -> Result<(Vec<String>, Vec<Vec<usize>>)> {
    if !d.flags.pole_labeled {
        return Err(Error::Unlabeled("pole"));
    }
    let t = checked(d)?;
    let rm = RegionMap::build(d, &t)?;
    let ids = t.pole_ids();
    let m = (0..ids.len())
        .map(|p| {
            let mut row = heights_from(&rm, p);
            row[p] = 0;
            row
        })
        .collect();
    Ok((ids, m))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeightReport {
    pub from: String,
    pub to: String,
    pub diagram_height: usize,
    /// `(label, bound)` for every implemented lower bound.
    #[serde(serialize_with = "ser_bounds")]
    pub bounds: Vec<(String, Rational64)>,
    #[serde(serialize_with = "ser_ratio")]
    pub best_lower: Rational64,
    /// The best lower bound meets the diagram height, so the height of the
    /// knotoid between these poles is known.
    pub tight: bool,
}

fn ratio_str(r: &Rational64) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn ser_ratio<S: serde::Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&ratio_str(r))
}

fn ser_bounds<S: serde::Serializer>(v: &[(String, Rational64)], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = s.serialize_map(Some(v.len()))?;
    for (k, r) in v {
        m.serialize_entry(k, &ratio_str(r))?;
    }
    m.end()
}

impl std::fmt::Display for HeightReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "pair {} {}", self.from, self.to)?;
        writeln!(f, "diagram height {}", self.diagram_height)?;
        for (k, r) in &self.bounds {
            writeln!(f, "bound {k} {}", ratio_str(r))?;
        }
        writeln!(f, "best lower {}", ratio_str(&self.best_lower))?;
        write!(f, "tight {}", self.tight)
    }
}

/// Polynomial bounds for every ordered pole pair, computed from one bracket
/// and one index context.
pub struct HeightBounds<'a> {
    d: &'a Diagram,
    norm: crate::laurent::Poly,
    index: IndexContext<'a>,
}

impl<'a> HeightBounds<'a> {
    pub fn new(d: &'a Diagram, cap: u64) -> Result<Self> {
        Ok(HeightBounds {
            d,
            norm: normalized_bracket(d, cap)?,
            index: IndexContext::new(d)?,
        })
    }

    pub fn bounds(&self, a: &str, b: &str) -> Result<Vec<(String, Rational64)>> {
        let cons: Vec<String> = self.d.constituents.iter().map(|c| c.id.clone()).collect();
        let gp = self.index.base_pointed(a)?;
        let gt = self.index.pole_centric(a)?;
        let br = bracket_bounds(&self.norm, self.d, a, b);
        Ok(vec![
            ("index".into(), Rational64::from_integer(height_bound_index(&gp, b, &cons))),
            ("index-pole-centric".into(), Rational64::from_integer(height_bound_index(&gt, b, &cons))),
            ("bracket-a".into(), br.a),
            ("bracket-b".into(), br.b),
            ("bracket-c".into(), br.c),
        ])
    }

    pub fn report(&self, a: &str, b: &str) -> Result<HeightReport> {
        let h = diagram_height(self.d, a, b)?;
        let bounds = self.bounds(a, b)?;
        let best = bounds.iter().map(|(_, r)| *r).max().unwrap_or_default();
        Ok(HeightReport {
            from: a.to_string(),
            to: b.to_string(),
            diagram_height: h,
            bounds,
            best_lower: best,
            tight: best == Rational64::from_integer(h as i64),
        })
    }
}

pub fn height_report(d: &Diagram, a: &str, b: &str, cap: u64) -> Result<HeightReport> {
    pole_index(d, a)?;
    pole_index(d, b)?;
    HeightBounds::new(d, cap)?.report(a, b)
}

/// A pole pair whose diagram height dropped after simplification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightDrop {
    pub from: String,
    pub to: String,
    pub before: usize,
    pub after: usize,
}

/// Simplifies `d` and lists pole pairs whose diagram height dropped in the
/// fewer-crossing diagram. A minimal-crossing diagram realizes every height,
/// so a drop means `d` was not minimal at that pair; nothing here certifies
/// minimality.
pub fn spot_check(d: &Diagram, depth: usize) -> Result<(Diagram, Vec<HeightDrop>)> {
    let s = crate::moves::simplify(d, depth)?;
    let (ids, before) = height_spectrum(d)?;
    let (_, after) = height_spectrum(&s)?;
    let mut drops = Vec::new();
    for i in 0..ids.len() {
        for j in i + 1..ids.len() {
            if after[i][j] < before[i][j] {
                drops.push(HeightDrop {
                    from: ids[i].clone(),
                    to: ids[j].clone(),
                    before: before[i][j],
                    after: after[i][j],
                });
            }
        }
    }
    Ok((s, drops))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn nested_loops() {
        assert_eq!(diagram_height(&fixtures::seg1(), "P", "Q").unwrap(), 0);
        assert_eq!(diagram_height(&fixtures::nest1(), "P", "Q").unwrap(), 1);
        assert_eq!(diagram_height(&fixtures::nest2(), "P", "Q").unwrap(), 2);
        assert_eq!(diagram_height(&fixtures::nest0(), "P", "Q").unwrap(), 0);
        assert!(diagram_height(&fixtures::seg1(), "P", "P").is_err());
    }

    #[test]
    fn spectrum_is_symmetric() {
        let (ids, m) = height_spectrum(&fixtures::nest2()).unwrap();
        assert_eq!(ids.len(), m.len());
        for i in 0..m.len() {
            assert_eq!(m[i][i], 0);
            for j in 0..m.len() {
                assert_eq!(m[i][j], m[j][i]);
            }
        }
    }

    #[test]
    fn crossing_free_report() {
        let r = height_report(&fixtures::nest1(), "P", "Q", 1 << 20).unwrap();
        assert_eq!(r.diagram_height, 1);
        assert!(r.best_lower <= Rational64::from_integer(1));
    }
}
