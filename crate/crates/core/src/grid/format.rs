//! Line-oriented text format for regions:
//! `level=<k> kind=<open|closed> cofinite=<0|1> cells=(x1,y1);(x2,y2);...`, plus the
//! shorthands `X` (or `whole`) for the plane and `empty` (or `∅`) for the empty set.

use super::cellset::{CellSet, Pos};
use super::region::{GridRegion, Kind};
use crate::error::{Error, Result};

pub fn format_region(r: &GridRegion) -> String {
    let cells = r.cells();
    let kind = match r.kind() {
        Kind::Open => "open",
        Kind::Closed => "closed",
    };
    let list: Vec<String> = cells
        .members()
        .iter()
        .map(|(x, y)| format!("({x},{y})"))
        .collect();
    format!(
        "level={} kind={} cofinite={} cells={}",
        cells.level(),
        kind,
        u8::from(cells.is_cofinite()),
        list.join(";")
    )
}

fn field<'a>(tok: Option<&'a str>, key: &str, loc: &str) -> Result<&'a str> {
    let tok = tok.ok_or_else(|| Error::parse(loc, format!("missing `{key}=`")))?;
    tok.strip_prefix(key)
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| Error::parse(loc, format!("expected `{key}=`, found `{tok}`")))
}

fn parse_cell(s: &str, loc: &str) -> Result<Pos> {
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::parse(loc, format!("malformed cell `{s}`")))?;
    let (x, y) = inner
        .split_once(',')
        .ok_or_else(|| Error::parse(loc, format!("malformed cell `{s}`")))?;
    let x = x.trim().parse().map_err(|_| Error::parse(loc, format!("bad x in `{s}`")))?;
    let y = y.trim().parse().map_err(|_| Error::parse(loc, format!("bad y in `{s}`")))?;
    Ok((x, y))
}

/// Parse one region line. `loc` names the source for error messages.
pub fn parse_region(line: &str, loc: &str) -> Result<GridRegion> {
    match line.trim() {
        "X" | "whole" => return Ok(GridRegion::whole()),
        "empty" | "∅" => return Ok(GridRegion::empty()),
        _ => {}
    }
    let mut it = line.split_whitespace();
    let level: u32 = field(it.next(), "level", loc)?
        .parse()
        .map_err(|_| Error::parse(loc, "bad level"))?;
    if level > 30 {
        return Err(Error::parse(loc, "level too large"));
    }
    let kind = match field(it.next(), "kind", loc)? {
        "open" => Kind::Open,
        "closed" => Kind::Closed,
        other => return Err(Error::parse(loc, format!("unknown kind `{other}`"))),
    };
    let cofinite = match field(it.next(), "cofinite", loc)? {
        "0" => false,
        "1" => true,
        other => return Err(Error::parse(loc, format!("bad cofinite flag `{other}`"))),
    };
    let cells = field(it.next(), "cells", loc)?;
    if let Some(extra) = it.next() {
        return Err(Error::parse(loc, format!("unexpected token `{extra}`")));
    }
    let mut members = Vec::new();
    for part in cells.split(';').filter(|p| !p.trim().is_empty()) {
        members.push(parse_cell(part, loc)?);
    }
    let mut sorted = members.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::parse(loc, "duplicate cell"));
    }
    Ok(GridRegion::new(CellSet::from_sorted(level, sorted, cofinite), kind))
}

/// Parse every non-empty, non-comment line of a region file.
pub fn parse_regions(text: &str, source: &str) -> Result<Vec<GridRegion>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| parse_region(l, &format!("{source}:{}", i + 1)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_output_and_parse() {
        let r = GridRegion::closed(CellSet::finite(1, [(2, 0), (-1, 3)]));
        let s = format_region(&r);
        assert_eq!(s, "level=1 kind=closed cofinite=0 cells=(-1,3);(2,0)");
        assert_eq!(parse_region(&s, "t").unwrap(), r);
        let x = GridRegion::whole();
        assert_eq!(parse_region(&format_region(&x), "t").unwrap(), x);
    }

    #[test]
    fn rejects_duplicates_and_junk() {
        assert!(parse_region("level=0 kind=open cofinite=0 cells=(0,0);(0,0)", "t").is_err());
        assert!(parse_region("level=0 kind=ajar cofinite=0 cells=", "t").is_err());
        assert!(parse_region("level=0 kind=open cofinite=2 cells=", "t").is_err());
        assert!(parse_region("kind=open level=0 cofinite=0 cells=", "t").is_err());
    }
}
