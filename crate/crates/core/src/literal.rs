//! Text literals for base sets and rectangles.
//!
//! ```text
//! cyl 0:1 1:0 | 3:1        union of clauses (coordinate:bit conjunctions)
//! cyl *                    the whole space;  `cyl` alone is the empty set
//! arc 0/1 1/2; 2/3 5/6     union of half-open arcs
//! maj 3                    majority over the window {0..6};  `maj 3@5` shifts it by 5
//! rect head=[cyl 0:1;maj 2] tail=half(cyl 0:1)
//! rect head=[] tail=schedule(2)      `schedule(2@-1)` for a shifted schedule tail
//! ```
//!
//! Printing is canonical and always re-parses to an equal value.

use crate::arith::{fmt_rational, parse_rational};
use crate::base::{ArcUnion, BaseSet, Cylinder, MajoritySet};
use crate::error::{Error, Result};

pub fn format_base_set(set: &BaseSet) -> String {
    match set {
        BaseSet::Cylinder(c) => {
            if c.is_empty() {
                return "cyl".into();
            }
            if c.is_full() {
                return "cyl *".into();
            }
            let clauses: Vec<String> = c
                .clauses()
                .iter()
                .map(|&cl| {
                    c.support()
                        .iter()
                        .enumerate()
                        .map(|(j, coord)| format!("{coord}:{}", (cl >> j) & 1))
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect();
            format!("cyl {}", clauses.join(" | "))
        }
        BaseSet::Arcs(a) => {
            if a.is_empty() {
                return "arc".into();
            }
            let arcs: Vec<String> = a
                .arcs()
                .iter()
                .map(|(x, y)| format!("{} {}", fmt_rational(x), fmt_rational(y)))
                .collect();
            format!("arc {}", arcs.join("; "))
        }
        BaseSet::Majority(m) => {
            if m.offset == 0 {
                format!("maj {}", m.n)
            } else {
                format!("maj {}@{}", m.n, m.offset)
            }
        }
    }
}

pub fn parse_base_set(text: &str) -> Result<BaseSet> {
    let trimmed = text.trim_start();
    let base = text.len() - trimmed.len();
    let trimmed = trimmed.trim_end();
    let (kw, rest) = match trimmed.find(char::is_whitespace) {
        Some(i) => (&trimmed[..i], &trimmed[i..]),
        None => (trimmed, ""),
    };
    let rest_pos = base + kw.len();
    match kw {
        "cyl" => parse_cylinder(rest, rest_pos),
        "arc" => parse_arcs(rest, rest_pos),
        "maj" => parse_majority(rest.trim(), rest_pos),
        "" => Err(Error::parse(base, "empty set literal")),
        other => Err(Error::parse(
            base,
            format!("unknown set kind '{other}' (expected cyl, arc or maj)"),
        )),
    }
}

fn parse_cylinder(rest: &str, pos: usize) -> Result<BaseSet> {
    if rest.trim().is_empty() {
        return Ok(BaseSet::Cylinder(Cylinder::empty()));
    }
    let mut clauses = Vec::new();
    let mut offset = pos;
    for part in rest.split('|') {
        let mut clause = Vec::new();
        let body = part.trim();
        if body == "*" {
            clauses.push(clause);
            offset += part.len() + 1;
            continue;
        }
        if body.is_empty() {
            return Err(Error::parse(offset, "empty clause"));
        }
        for lit in body.split_whitespace() {
            let (c, b) = lit
                .split_once(':')
                .ok_or_else(|| Error::parse(offset, format!("literal '{lit}' is not coord:bit")))?;
            let coord: i64 = c
                .parse()
                .map_err(|_| Error::parse(offset, format!("bad coordinate '{c}'")))?;
            let bit = match b {
                "0" => false,
                "1" => true,
                _ => return Err(Error::parse(offset, format!("bit must be 0 or 1, got '{b}'"))),
            };
            clause.push((coord, bit));
        }
        clauses.push(clause);
        offset += part.len() + 1;
    }
    Ok(BaseSet::Cylinder(Cylinder::from_clauses(&clauses)?))
}

fn parse_arcs(rest: &str, pos: usize) -> Result<BaseSet> {
    if rest.trim().is_empty() {
        return Ok(BaseSet::Arcs(ArcUnion::empty()));
    }
    let mut arcs = Vec::new();
    let mut offset = pos;
    for part in rest.split(';') {
        let ends: Vec<&str> = part.split_whitespace().collect();
        if ends.len() != 2 {
            return Err(Error::parse(
                offset,
                format!("arc needs two endpoints, got '{}'", part.trim()),
            ));
        }
        let a = parse_rational(ends[0]).map_err(|_| Error::parse(offset, format!("bad endpoint '{}'", ends[0])))?;
        let b = parse_rational(ends[1]).map_err(|_| Error::parse(offset, format!("bad endpoint '{}'", ends[1])))?;
        arcs.push((a, b));
        offset += part.len() + 1;
    }
    ArcUnion::new(arcs)
        .map(BaseSet::Arcs)
        .map_err(|e| Error::parse(pos, e.to_string()))
}

fn parse_majority(rest: &str, pos: usize) -> Result<BaseSet> {
    let (n, off) = match rest.split_once('@') {
        Some((n, o)) => (n, Some(o)),
        None => (rest, None),
    };
    let n: u64 = n
        .trim()
        .parse()
        .map_err(|_| Error::parse(pos, format!("bad majority size '{n}'")))?;
    let offset: i64 = match off {
        Some(o) => o
            .trim()
            .parse()
            .map_err(|_| Error::parse(pos, format!("bad majority offset '{o}'")))?,
        None => 0,
    };
    let mut m = MajoritySet::new(n).map_err(|e| Error::parse(pos, e.to_string()))?;
    m.offset = offset;
    Ok(BaseSet::Majority(m))
}

/// Tail part of a rectangle literal before it is bound to a schedule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TailLiteral {
    Half(BaseSet),
    Schedule { m: u64, shift: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RectLiteral {
    pub head: Vec<BaseSet>,
    pub tail: TailLiteral,
}

const KINDS: [&str; 3] = ["cyl", "arc", "maj"];

pub fn parse_rect(text: &str) -> Result<RectLiteral> {
    let t = text.trim();
    let body = t
        .strip_prefix("rect")
        .ok_or_else(|| Error::parse(0, "rectangle literal must start with 'rect'"))?;
    let head_start = body
        .find("head=[")
        .ok_or_else(|| Error::parse(4, "missing head=[...]"))?;
    let after = &body[head_start + 6..];
    let close = after
        .find(']')
        .ok_or_else(|| Error::parse(4 + head_start, "unterminated head list"))?;
    let head_text = &after[..close];
    let head_pos = 4 + head_start + 6;

    // Split on ';' but glue back fragments that continue an arc list.
    let mut pieces: Vec<(usize, String)> = Vec::new();
    let mut offset = 0;
    for frag in head_text.split(';') {
        let starts_kind = KINDS.iter().any(|k| {
            let f = frag.trim_start();
            f == *k || f.starts_with(&format!("{k} "))
        });
        match pieces.last_mut() {
            Some((_, prev)) if !starts_kind && !frag.trim().is_empty() => {
                prev.push(';');
                prev.push_str(frag);
            }
            _ => pieces.push((head_pos + offset, frag.to_string())),
        }
        offset += frag.len() + 1;
    }
    let mut head = Vec::new();
    for (pos, p) in pieces {
        if p.trim().is_empty() {
            if head_text.trim().is_empty() {
                continue;
            }
            return Err(Error::parse(pos, "empty head factor"));
        }
        head.push(parse_base_set(&p).map_err(|e| shift_pos(e, pos))?);
    }

    let tail_text = after[close + 1..].trim();
    let tail_pos = head_pos + close + 1;
    let tail_body = tail_text
        .strip_prefix("tail=")
        .ok_or_else(|| Error::parse(tail_pos, "missing tail=half(...) or tail=schedule(m)"))?;
    let tail = if let Some(inner) = tail_body.strip_prefix("half(") {
        let inner = inner
            .strip_suffix(')')
            .ok_or_else(|| Error::parse(tail_pos, "unterminated half(...)"))?;
        TailLiteral::Half(parse_base_set(inner).map_err(|e| shift_pos(e, tail_pos + 10))?)
    } else if let Some(inner) = tail_body.strip_prefix("schedule(") {
        let inner = inner
            .strip_suffix(')')
            .ok_or_else(|| Error::parse(tail_pos, "unterminated schedule(...)"))?;
        let (m, shift) = match inner.split_once('@') {
            Some((m, s)) => (
                m,
                s.trim()
                    .parse()
                    .map_err(|_| Error::parse(tail_pos, "bad schedule shift"))?,
            ),
            None => (inner, 0),
        };
        let m: u64 = m
            .trim()
            .parse()
            .map_err(|_| Error::parse(tail_pos, format!("bad schedule index '{m}'")))?;
        if m == 0 {
            return Err(Error::parse(tail_pos, "schedule index m must be >= 1"));
        }
        TailLiteral::Schedule { m, shift }
    } else {
        return Err(Error::parse(tail_pos, format!("unknown tail '{tail_body}'")));
    };
    Ok(RectLiteral { head, tail })
}

fn shift_pos(e: Error, by: usize) -> Error {
    match e {
        Error::Parse { pos, msg } => Error::Parse { pos: pos + by, msg },
        other => other,
    }
}

pub fn format_rect_parts(head: &[BaseSet], tail: &TailLiteral) -> String {
    let head: Vec<String> = head.iter().map(format_base_set).collect();
    let tail = match tail {
        TailLiteral::Half(t) => format!("half({})", format_base_set(t)),
        TailLiteral::Schedule { m, shift: 0 } => format!("schedule({m})"),
        TailLiteral::Schedule { m, shift } => format!("schedule({m}@{shift})"),
    };
    format!("rect head=[{}] tail={}", head.join(";"), tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    #[test]
    fn parses_the_documented_forms() {
        let c = parse_base_set("cyl 0:1 1:0 | 3:1").unwrap();
        assert_eq!(c.nu(), rat(1, 4) + rat(1, 2) - rat(1, 8));
        let a = parse_base_set("arc 0/1 1/2; 2/3 5/6").unwrap();
        assert_eq!(a.nu(), rat(2, 3));
        assert_eq!(parse_base_set("maj 4").unwrap(), BaseSet::majority(4).unwrap());
        assert_eq!(parse_base_set("cyl").unwrap().nu(), int(0));
        assert_eq!(parse_base_set("cyl *").unwrap().nu(), int(1));
        assert_eq!(parse_base_set("arc").unwrap().nu(), int(0));
    }

    #[test]
    fn reports_positions() {
        match parse_base_set("cyl 0:1 | 2:7") {
            Err(Error::Parse { pos, msg }) => {
                assert!(msg.contains("bit"), "{msg}");
                assert!(pos >= 3);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_base_set("box 1"), Err(Error::Parse { pos: 0, .. })));
        assert!(parse_base_set("arc 1/2").is_err());
        assert!(parse_base_set("maj 0").is_err());
    }

    #[test]
    fn rect_literals() {
        let r = parse_rect("rect head=[arc 0/1 1/2; 2/3 5/6;arc 0/1 1/2] tail=half(arc 1/4 3/4)").unwrap();
        assert_eq!(r.head.len(), 2);
        assert_eq!(r.head[0].nu(), rat(2, 3));
        assert_eq!(r.tail, TailLiteral::Half(BaseSet::arc(rat(1, 4), rat(3, 4)).unwrap()));
        let s = parse_rect("rect head=[] tail=schedule(3@-2)").unwrap();
        assert!(s.head.is_empty());
        assert_eq!(s.tail, TailLiteral::Schedule { m: 3, shift: -2 });
        assert!(parse_rect("rect head=[cyl 0:1] tail=quarter(cyl)").is_err());
        assert!(parse_rect("head=[] tail=half(cyl 0:1)").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn any_set() -> impl Strategy<Value = BaseSet> {
            prop_oneof![
                proptest::collection::vec(proptest::collection::vec((-4i64..=4, any::<bool>()), 0..4), 0..4)
                    .prop_map(|c| BaseSet::Cylinder(Cylinder::from_clauses(&c).unwrap())),
                proptest::collection::vec((0i64..10, 1i64..5), 0..4).prop_map(|v| {
                    BaseSet::Arcs(
                        ArcUnion::new(
                            v.into_iter()
                                .map(|(a, l)| (rat(a, 10), rat((a + l).min(10), 10)))
                                .collect(),
                        )
                        .unwrap(),
                    )
                }),
                (1u64..30, -5i64..5).prop_map(|(n, o)| BaseSet::Majority(MajoritySet { n, offset: o })),
            ]
        }

        proptest! {
            #[test]
            fn printed_sets_reparse(s in any_set()) {
                let text = format_base_set(&s);
                prop_assert_eq!(parse_base_set(&text).unwrap(), s);
            }

            #[test]
            fn printed_rects_reparse(head in proptest::collection::vec(any_set(), 0..4), t in any_set()) {
                let tail = TailLiteral::Half(t);
                let text = format_rect_parts(&head, &tail);
                let back = parse_rect(&text).unwrap();
                prop_assert_eq!(back, RectLiteral { head, tail });
            }
        }
    }
}
