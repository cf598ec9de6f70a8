//! Point-string grammar shared by every command.
//!
//! ```text
//! tree   := "T" p "(h=" int ";" [ level ":" digit { "," level ":" digit } ] ")"
//! plane  := "P(" float "," float ")"
//! horo   := component "|" component
//! ```
//!
//! Tree levels must be strictly ascending, at or above the height, with
//! nonzero digits below `p`. Errors carry the byte offset of the problem.

use crate::component::ComponentPoint;
use crate::error::{GeomError, Result};
use crate::plane::PlanePoint;
use crate::tree::TreeVertex;

struct Cursor<'a> {
    input: &'a str,
    base: usize,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(input: &'a str, base: usize) -> Self {
        Cursor { input, base, pos: 0 }
    }

    fn err(&self, full: &str, message: impl Into<String>) -> GeomError {
        GeomError::MalformedPoint {
            input: full.to_string(),
            offset: self.base + self.pos,
            message: message.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.input[self.pos..]
    }

    fn expect(&mut self, full: &str, lit: &str) -> Result<()> {
        if self.rest().starts_with(lit) {
            self.pos += lit.len();
            Ok(())
        } else {
            Err(self.err(full, format!("expected `{lit}`")))
        }
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !f(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.input[start..self.pos]
    }

    fn int(&mut self, full: &str) -> Result<i64> {
        let at = self.pos;
        let neg = if self.peek() == Some('-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let digits = self.take_while(|c| c.is_ascii_digit());
        if digits.is_empty() {
            self.pos = at;
            return Err(self.err(full, "expected integer"));
        }
        let v: i64 = digits.parse().map_err(|_| {
            let mut c = Cursor::new(self.input, self.base);
            c.pos = at;
            c.err(full, "integer out of range")
        })?;
        Ok(if neg { -v } else { v })
    }
}

pub fn parse_tree_point(s: &str) -> Result<(u32, TreeVertex)> {
    parse_tree_at(s, s, 0)
}

fn parse_tree_at(full: &str, s: &str, base: usize) -> Result<(u32, TreeVertex)> {
    let mut c = Cursor::new(s, base);
    c.expect(full, "T")?;
    let p_at = c.pos;
    let p = c.int(full)?;
    if p < 2 || p > u32::MAX as i64 {
        c.pos = p_at;
        return Err(c.err(full, "branching p must be >= 2"));
    }
    let p = p as u32;
    c.expect(full, "(h=")?;
    let height = c.int(full)?;
    c.expect(full, ";")?;
    let mut digits = Vec::new();
    let mut last: Option<i64> = None;
    while c.peek() != Some(')') {
        if !digits.is_empty() {
            c.expect(full, ",")?;
        }
        let level_at = c.pos;
        let level = c.int(full)?;
        if level < height {
            c.pos = level_at;
            return Err(c.err(full, "digit level below vertex height"));
        }
        if last.is_some_and(|l| level <= l) {
            c.pos = level_at;
            return Err(c.err(full, "levels must be strictly ascending"));
        }
        c.expect(full, ":")?;
        let digit_at = c.pos;
        let d = c.int(full)?;
        if d <= 0 || d >= p as i64 {
            c.pos = digit_at;
            return Err(c.err(full, format!("digit must be in 1..{p} (zeros are omitted)")));
        }
        digits.push((level, d as u32));
        last = Some(level);
        if c.peek().is_none() {
            return Err(c.err(full, "unterminated digit list"));
        }
    }
    c.expect(full, ")")?;
    if !c.rest().is_empty() {
        return Err(c.err(full, "trailing characters"));
    }
    Ok((p, TreeVertex::new(height, digits)?))
}

pub fn parse_plane_point(s: &str) -> Result<PlanePoint> {
    parse_plane_at(s, s, 0)
}

fn parse_plane_at(full: &str, s: &str, base: usize) -> Result<PlanePoint> {
    let mut c = Cursor::new(s, base);
    c.expect(full, "P(")?;
    let num = |c: &mut Cursor| -> Result<f64> {
        let at = c.pos;
        let text = c.take_while(|ch| ch.is_ascii_digit() || matches!(ch, '-' | '+' | '.' | 'e' | 'E'));
        text.parse::<f64>().map_err(|_| {
            c.pos = at;
            c.err(full, "expected number")
        })
    };
    let x = num(&mut c)?;
    c.expect(full, ",")?;
    let z_at = c.pos;
    let z = num(&mut c)?;
    c.expect(full, ")")?;
    if !c.rest().is_empty() {
        return Err(c.err(full, "trailing characters"));
    }
    PlanePoint::new(x, z).map_err(|e| {
        c.pos = z_at;
        c.err(full, e.to_string())
    })
}

pub fn parse_component(s: &str) -> Result<ComponentPoint> {
    parse_component_at(s, s, 0)
}

fn parse_component_at(full: &str, s: &str, base: usize) -> Result<ComponentPoint> {
    match s.chars().next() {
        Some('T') => {
            let (p, vertex) = parse_tree_at(full, s, base)?;
            Ok(ComponentPoint::Tree { p, vertex })
        }
        Some('P') => Ok(ComponentPoint::Plane(parse_plane_at(full, s, base)?)),
        _ => Err(GeomError::MalformedPoint {
            input: full.to_string(),
            offset: base,
            message: "expected `T` (tree) or `P` (plane)".into(),
        }),
    }
}

/// Splits `left|right` and parses both halves.
pub fn parse_horo(s: &str) -> Result<(ComponentPoint, ComponentPoint)> {
    let bar = s.find('|').ok_or_else(|| GeomError::MalformedPoint {
        input: s.to_string(),
        offset: s.len(),
        message: "expected `|` between the two components".into(),
    })?;
    let left = parse_component_at(s, &s[..bar], 0)?;
    let right = parse_component_at(s, &s[bar + 1..], bar + 1)?;
    Ok((left, right))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::component::ComponentKind;

    fn offset_of(e: GeomError) -> usize {
        match e {
            GeomError::MalformedPoint { offset, .. } => offset,
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn tree_round_trip() {
        for s in ["T2(h=0;)", "T2(h=0;0:1)", "T3(h=-3;-2:2,1:1)", "T5(h=4;7:4)"] {
            let (p, v) = parse_tree_point(s).unwrap();
            assert_eq!(v.serialize(p), s);
        }
    }

    #[test]
    fn tree_rejections_carry_offsets() {
        assert_eq!(offset_of(parse_tree_point("T2(h=0;0:2)").unwrap_err()), 9);
        assert_eq!(offset_of(parse_tree_point("T2(h=0;0:0)").unwrap_err()), 9);
        assert_eq!(offset_of(parse_tree_point("T2(h=0;1:1,0:1)").unwrap_err()), 11);
        assert_eq!(offset_of(parse_tree_point("T2(h=3;1:1)").unwrap_err()), 7);
        assert_eq!(offset_of(parse_tree_point("T1(h=0;)").unwrap_err()), 1);
        assert_eq!(offset_of(parse_tree_point("T2(h=0;)x").unwrap_err()), 8);
        assert_eq!(offset_of(parse_tree_point("X2(h=0;)").unwrap_err()), 0);
    }

    #[test]
    fn plane_points() {
        assert_eq!(
            parse_plane_point("P(7.2,-1.5)").unwrap(),
            PlanePoint { x: 7.2, z: -1.5 }
        );
        assert_eq!(parse_plane_point("P(1e3,0)").unwrap(), PlanePoint { x: 1000.0, z: 0.0 });
        assert_eq!(offset_of(parse_plane_point("P(1,)").unwrap_err()), 4);
        assert_eq!(offset_of(parse_plane_point("P(1,800)").unwrap_err()), 4);
    }

    #[test]
    fn horo_offsets_are_global() {
        let (l, r) = parse_horo("T2(h=0;0:1)|T2(h=0;)").unwrap();
        assert_eq!(l.kind(), ComponentKind::Tree(2));
        assert_eq!(r.kind(), ComponentKind::Tree(2));
        assert_eq!(offset_of(parse_horo("T2(h=0;)|T2(h=0;0:5)").unwrap_err()), 18);
        assert_eq!(offset_of(parse_horo("T2(h=0;)").unwrap_err()), 8);
        let (l, _) = parse_horo("P(0,2)|T2(h=-2;-2:1)").unwrap();
        assert_eq!(l.kind(), ComponentKind::Plane);
    }
}
