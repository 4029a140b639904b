//! The GKD interchange format: UTF-8 JSON.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::diagram::*;
use crate::error::{Error, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDiagram {
    poles: Option<Vec<RawPole>>,
    arcs: Option<Vec<String>>,
    crossings: Option<Vec<RawCrossing>>,
    constituents: Option<Vec<RawConstituent>>,
    placements: Option<Vec<RawPlacement>>,
    flags: Option<RawFlags>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPole {
    id: Option<String>,
    slots: Option<Vec<(String, String)>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCrossing {
    id: Option<String>,
    slots: Option<Vec<(String, String)>>,
    over: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstituent {
    id: Option<String>,
    kind: Option<String>,
    trace: Option<Vec<(String, String)>>,
    from: Option<String>,
    to: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlacement {
    component: Option<usize>,
    witness: Option<Value>,
    outer: Option<RawArcSide>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawArcSide {
    arc: String,
    side: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFlags {
    oriented: Option<bool>,
    pole_labeled: Option<bool>,
    constituent_labeled: Option<bool>,
}

fn perr(msg: String) -> Error {
    Error::Parse(msg)
}

fn dart(raw: &(String, String), ctx: &str) -> Result<Dart> {
    let end = match raw.1.as_str() {
        "tail" => End::Tail,
        "head" => End::Head,
        other => return Err(perr(format!("{ctx}: dart end must be \"tail\" or \"head\", got {other:?}"))),
    };
    Ok(Dart::new(raw.0.clone(), end))
}

fn side(s: &str, ctx: &str) -> Result<Side> {
    match s {
        "L" => Ok(Side::L),
        "R" => Ok(Side::R),
        other => Err(perr(format!("{ctx}: side must be \"L\" or \"R\", got {other:?}"))),
    }
}

fn arc_side(raw: &RawArcSide, ctx: &str) -> Result<ArcSide> {
    Ok(ArcSide::new(raw.arc.clone(), side(&raw.side, ctx)?))
}

pub fn parse_gkd(text: &str) -> Result<Diagram> {
    let raw: RawDiagram = serde_json::from_str(text).map_err(|e| perr(e.to_string()))?;

    let mut poles = Vec::new();
    for (i, p) in raw.poles.unwrap_or_default().into_iter().enumerate() {
        let id = p.id.ok_or_else(|| perr(format!("pole #{i}: missing `id`")))?;
        let ctx = format!("pole {id}");
        let slots = p
            .slots
            .ok_or_else(|| perr(format!("{ctx}: missing `slots`")))?
            .iter()
            .map(|d| dart(d, &ctx))
            .collect::<Result<Vec<_>>>()?;
        poles.push(Pole { id, slots });
    }

    let arcs = raw.arcs.ok_or_else(|| perr("missing `arcs`".into()))?;

    let mut crossings = Vec::new();
    for (i, c) in raw.crossings.unwrap_or_default().into_iter().enumerate() {
        let id = c.id.ok_or_else(|| perr(format!("crossing #{i}: missing `id`")))?;
        let ctx = format!("crossing {id}");
        let slots = c.slots.ok_or_else(|| perr(format!("{ctx}: missing `slots`")))?;
        if slots.len() != 4 {
            return Err(perr(format!("{ctx}: expected 4 slots, got {}", slots.len())));
        }
        let s: Vec<Dart> = slots.iter().map(|d| dart(d, &ctx)).collect::<Result<_>>()?;
        let over = match c.over.as_deref() {
            Some("02") => Over::Even,
            Some("13") => Over::Odd,
            Some(o) => return Err(perr(format!("{ctx}: `over` must be \"02\" or \"13\", got {o:?}"))),
            None => return Err(perr(format!("{ctx}: missing `over`"))),
        };
        let [a, b, c2, d]: [Dart; 4] = s.try_into().unwrap();
        crossings.push(Crossing {
            id,
            slots: [a, b, c2, d],
            over,
        });
    }

    let mut constituents = Vec::new();
    for (i, c) in raw.constituents.unwrap_or_default().into_iter().enumerate() {
        let id = c.id.ok_or_else(|| perr(format!("constituent #{i}: missing `id`")))?;
        let ctx = format!("constituent {id}");
        let kind = match c.kind.as_deref() {
            Some("segment") => Kind::Segment,
            Some("loop") => Kind::Loop,
            Some(k) => return Err(perr(format!("{ctx}: unknown kind {k:?}"))),
            None => return Err(perr(format!("{ctx}: missing `kind`"))),
        };
        let trace = c
            .trace
            .ok_or_else(|| perr(format!("{ctx}: missing `trace`")))?
            .into_iter()
            .map(|(a, d)| match d.as_str() {
                "+" => Ok((a, Dir::Fwd)),
                "-" => Ok((a, Dir::Bwd)),
                o => Err(perr(format!("{ctx}: trace direction must be \"+\" or \"-\", got {o:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        constituents.push(Constituent {
            id,
            kind,
            trace,
            from: c.from,
            to: c.to,
        });
    }

    let mut placements = Vec::new();
    for (i, p) in raw.placements.unwrap_or_default().into_iter().enumerate() {
        let ctx = format!("placement #{i}");
        let component = p
            .component
            .ok_or_else(|| perr(format!("{ctx}: missing `component`")))?;
        let witness = match p.witness {
            None => return Err(perr(format!("{ctx}: missing `witness`"))),
            Some(Value::String(s)) if s == "root" => Witness::Root,
            Some(Value::String(s)) if s == "sphere" => Witness::Sphere,
            Some(v @ Value::Object(_)) => {
                let r: RawArcSide = serde_json::from_value(v)
                    .map_err(|e| perr(format!("{ctx}: bad witness: {e}")))?;
                Witness::Arc(arc_side(&r, &ctx)?)
            }
            Some(v) => return Err(perr(format!("{ctx}: bad witness {v}"))),
        };
        let outer = match &p.outer {
            Some(r) => Some(arc_side(r, &ctx)?),
            None => None,
        };
        placements.push(Placement {
            component,
            witness,
            outer,
        });
    }

    let flags = match raw.flags {
        None => Flags::default(),
        Some(f) => Flags {
            oriented: f.oriented.unwrap_or(true),
            pole_labeled: f.pole_labeled.unwrap_or(true),
            constituent_labeled: f.constituent_labeled.unwrap_or(true),
        },
    };

    Ok(Diagram {
        poles,
        arcs,
        crossings,
        constituents,
        placements,
        flags,
    })
}

#[derive(Serialize)]
struct OutPole<'a> {
    id: &'a str,
    slots: Vec<(&'a str, &'static str)>,
}

#[derive(Serialize)]
struct OutCrossing<'a> {
    id: &'a str,
    slots: Vec<(&'a str, &'static str)>,
    over: &'static str,
}

#[derive(Serialize)]
struct OutConstituent<'a> {
    id: &'a str,
    kind: &'static str,
    trace: Vec<(&'a str, &'static str)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    from: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    to: Option<&'a str>,
}

#[derive(Serialize)]
struct OutPlacement {
    component: usize,
    witness: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    outer: Option<RawArcSide>,
}

#[derive(Serialize)]
struct OutFlags {
    oriented: bool,
    pole_labeled: bool,
    constituent_labeled: bool,
}

#[derive(Serialize)]
struct OutDiagram<'a> {
    poles: Vec<OutPole<'a>>,
    arcs: &'a [String],
    crossings: Vec<OutCrossing<'a>>,
    constituents: Vec<OutConstituent<'a>>,
    placements: Vec<OutPlacement>,
    flags: OutFlags,
}

fn out_dart(d: &Dart) -> (&str, &'static str) {
    (d.arc.as_str(), d.end.as_str())
}

fn out_arc_side(a: &ArcSide) -> RawArcSide {
    RawArcSide {
        arc: a.arc.clone(),
        side: a.side.as_str().to_string(),
    }
}

pub fn serialize_gkd(d: &Diagram) -> String {
    let out = OutDiagram {
        poles: d
            .poles
            .iter()
            .map(|p| OutPole {
                id: &p.id,
                slots: p.slots.iter().map(out_dart).collect(),
            })
            .collect(),
        arcs: &d.arcs,
        crossings: d
            .crossings
            .iter()
            .map(|c| OutCrossing {
                id: &c.id,
                slots: c.slots.iter().map(out_dart).collect(),
                over: c.over.as_str(),
            })
            .collect(),
        constituents: d
            .constituents
            .iter()
            .map(|c| OutConstituent {
                id: &c.id,
                kind: match c.kind {
                    Kind::Segment => "segment",
                    Kind::Loop => "loop",
                },
                trace: c
                    .trace
                    .iter()
                    .map(|(a, dir)| (a.as_str(), if dir.is_fwd() { "+" } else { "-" }))
                    .collect(),
                from: c.from.as_deref(),
                to: c.to.as_deref(),
            })
            .collect(),
        placements: d
            .placements
            .iter()
            .map(|p| OutPlacement {
                component: p.component,
                witness: match &p.witness {
                    Witness::Root => Value::String("root".into()),
                    Witness::Sphere => Value::String("sphere".into()),
                    Witness::Arc(a) => serde_json::to_value(out_arc_side(a)).unwrap(),
                },
                outer: p.outer.as_ref().map(out_arc_side),
            })
            .collect(),
        flags: OutFlags {
            oriented: d.flags.oriented,
            pole_labeled: d.flags.pole_labeled,
            constituent_labeled: d.flags.constituent_labeled,
        },
    };
    let mut s = serde_json::to_string_pretty(&out).unwrap();
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_over_names_crossing() {
        let text = r#"{"arcs":["a"],"crossings":[{"id":"cx","slots":[["a","head"],["a","tail"],["b","head"],["b","tail"]]}]}"#;
        let err = parse_gkd(text).unwrap_err().to_string();
        assert!(err.contains("crossing cx") && err.contains("over"), "{err}");
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_gkd("{\n \"arcs\": [\"a\",\n}").unwrap_err().to_string();
        assert!(err.contains("line"), "{err}");
    }
}
