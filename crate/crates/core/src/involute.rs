//! The four basic involutions.

use std::str::FromStr;

use crate::diagram::*;
use crate::error::{Error, Result};
use crate::topo::checked;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Involution {
    /// Toggle over/under at every crossing.
    Mir,
    /// Reflect the sphere.
    Sym,
    /// `mir` after `sym`.
    Rot,
    /// Reverse every constituent.
    Rev,
}

impl FromStr for Involution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mir" => Ok(Involution::Mir),
            "sym" => Ok(Involution::Sym),
            "rot" => Ok(Involution::Rot),
            "rev" => Ok(Involution::Rev),
            _ => Err(Error::Parse(format!("unknown involution {s:?} (expected mir, sym, rot or rev)"))),
        }
    }
}

pub fn involute(d: &Diagram, op: Involution) -> Result<Diagram> {
    match op {
        Involution::Mir => Ok(mir(d)),
        Involution::Sym => sym(d),
        Involution::Rot => Ok(mir(&sym(d)?)),
        Involution::Rev => rev(d),
    }
}

pub fn mir(d: &Diagram) -> Diagram {
    let mut out = d.clone();
    for c in &mut out.crossings {
        c.over = c.over.flip();
    }
    out
}

pub fn sym(d: &Diagram) -> Result<Diagram> {
    let t = checked(d)?;
    let mut out = d.clone();
    for c in &mut out.crossings {
        c.slots.swap(1, 3);
    }
    for p in &mut out.poles {
        if p.slots.len() > 1 {
            p.slots[1..].reverse();
        }
    }
    for p in &mut out.placements {
        if let Witness::Arc(w) = &mut p.witness {
            w.side = w.side.flip();
        }
        if let Some(first) = t.comp_first_arc[p.component] {
            let first = &t.arc_ids[first];
            let current = p.outer.clone().unwrap_or_else(|| ArcSide::new(first.clone(), Side::R));
            let flipped = ArcSide::new(current.arc, current.side.flip());
            p.outer = if flipped.arc == *first && flipped.side == Side::R {
                None
            } else {
                Some(flipped)
            };
        }
    }
    Ok(out)
}

pub fn rev(d: &Diagram) -> Result<Diagram> {
    if !d.flags.oriented {
        return Err(Error::Unoriented);
    }
    let mut out = d.clone();
    for c in &mut out.constituents {
        c.trace.reverse();
        for s in &mut c.trace {
            s.1 = s.1.flip();
        }
        std::mem::swap(&mut c.from, &mut c.to);
    }
    Ok(out)
}
