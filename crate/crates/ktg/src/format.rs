//! Line-oriented text formats for skeletons, diagrams, linear
//! combinations, series, free group maps and operation pipelines.
//!
//! Blank lines and anything after `#` are ignored. Parse errors carry the
//! 1-based line number of the offending record.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use ktg_core::coeff::fmt_rational;
use ktg_core::diagram::Slot;
use ktg_core::graph_ops::SweepSpec;
use ktg_core::skeleton::{named, strands};
use ktg_core::{ChordDiagram, EdgeEnd, EdgeId, FreeGroupMap, LinComb, Rational, Skeleton, Vertex, VertexId};

use crate::error::{CliError, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Parse { line, msg: msg.into() }
}

/// Non-empty records with their line numbers, comments stripped.
pub fn records(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn number<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse().map_err(|_| parse_err(line, format!("expected {what}, found {tok:?}")))
}

pub fn parse_rational(line: usize, tok: &str) -> Result<Rational> {
    let tok = tok.trim();
    let tok = tok.strip_prefix('+').unwrap_or(tok);
    tok.parse().map_err(|_| parse_err(line, format!("bad rational {tok:?}")))
}

fn is_skeleton_record(l: &str) -> bool {
    matches!(l.split_whitespace().next(), Some("vertex" | "edge" | "circle"))
}

/// Accumulates `vertex`, `edge` and `circle` records. Half-edge ids are
/// free integers, bound to edge ends by the `edge` records.
#[derive(Default)]
struct SkeletonRecords {
    vertices: Vec<(usize, VertexId, String, Vec<u64>)>,
    halves: BTreeMap<u64, (usize, EdgeEnd)>,
    circles: Vec<EdgeId>,
    first_line: usize,
}

impl SkeletonRecords {
    fn push(&mut self, line: usize, l: &str) -> Result<()> {
        if self.first_line == 0 {
            self.first_line = line;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks[0] {
            "vertex" => {
                if toks.len() < 3 {
                    return Err(parse_err(line, "expected `vertex <id> <kind> <half-edges>`"));
                }
                let id = VertexId(number(line, toks[1], "a vertex id")?);
                let hs = toks[3..].iter().map(|t| number(line, t, "a half-edge id")).collect::<Result<Vec<u64>>>()?;
                self.vertices.push((line, id, toks[2].to_string(), hs));
            }
            "edge" => {
                let [_, id, t, h] = toks[..] else {
                    return Err(parse_err(line, "expected `edge <id> <tail-half-edge> <head-half-edge>`"));
                };
                let e = EdgeId(number(line, id, "an edge id")?);
                for (tok, end) in [(t, EdgeEnd::tail(e)), (h, EdgeEnd::head(e))] {
                    let hid: u64 = number(line, tok, "a half-edge id")?;
                    if self.halves.insert(hid, (line, end)).is_some() {
                        return Err(parse_err(line, format!("half-edge {hid} bound twice")));
                    }
                }
            }
            "circle" => {
                let [_, id] = toks[..] else { return Err(parse_err(line, "expected `circle <id>`")) };
                self.circles.push(EdgeId(number(line, id, "an edge id")?));
            }
            other => return Err(parse_err(line, format!("unknown skeleton record {other:?}"))),
        }
        Ok(())
    }

    fn build(self) -> Result<Skeleton> {
        let mut vs = Vec::new();
        for (line, id, kind, hs) in self.vertices {
            let end = |h: &u64| {
                self.halves.get(h).map(|(_, e)| *e).ok_or_else(|| parse_err(line, format!("half-edge {h} has no edge")))
            };
            let ends = hs.iter().map(end).collect::<Result<Vec<EdgeEnd>>>()?;
            let v = match (kind.as_str(), ends.as_slice()) {
                ("trivalent", &[a, b, c]) => Vertex::Trivalent([a, b, c]),
                ("dot", &[a, b]) => Vertex::Dot([a, b]),
                ("antidot", &[a, b]) => Vertex::Antidot([a, b]),
                ("boundary", &[a]) => Vertex::Boundary(a),
                _ => return Err(parse_err(line, format!("bad {kind} vertex with {} half-edges", ends.len()))),
            };
            vs.push((id, v));
        }
        Skeleton::new(vs, self.circles).map_err(|e| parse_err(self.first_line, e.to_string()))
    }
}

/// Parses a skeleton given entirely by records.
pub fn parse_skeleton(text: &str) -> Result<Skeleton> {
    let mut recs = SkeletonRecords::default();
    for (line, l) in records(text) {
        recs.push(line, l)?;
    }
    if recs.first_line == 0 {
        return Err(parse_err(0, "empty skeleton"));
    }
    recs.build()
}

/// Writes skeleton records with half-edges `2e` (tail) and `2e+1` (head).
pub fn write_skeleton(s: &Skeleton) -> String {
    let half = |x: &EdgeEnd| 2 * x.edge.0 as u64 + u64::from(!x.is_outgoing());
    let mut out = String::new();
    for (id, v) in s.vertices() {
        let kind = match v {
            Vertex::Trivalent(_) => "trivalent",
            Vertex::Dot(_) => "dot",
            Vertex::Antidot(_) => "antidot",
            Vertex::Boundary(_) => "boundary",
        };
        let hs: Vec<String> = v.ends().iter().map(|x| half(x).to_string()).collect();
        let _ = writeln!(out, "vertex {} {kind} {}", id.0, hs.join(" "));
    }
    for (e, _) in s.edges() {
        if s.is_circle(e) {
            let _ = writeln!(out, "circle {}", e.0);
        } else {
            let _ = writeln!(out, "edge {} {} {}", e.0, 2 * e.0 as u64, 2 * e.0 as u64 + 1);
        }
    }
    out
}

/// Resolves a built-in name or a skeleton file.
pub fn resolve_skeleton(spec: &str, base: Option<&Path>) -> Result<Skeleton> {
    if let Some(s) = named(spec) {
        return Ok(s);
    }
    let mut path = PathBuf::from(spec);
    if path.is_relative() {
        if let Some(b) = base {
            path = b.join(path);
        }
    }
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Input(format!("skeleton {spec:?}: {e}")))?;
    parse_skeleton(&text)
}

/// Name of a built-in skeleton equal to `s`, if any.
pub fn builtin_name(s: &Skeleton) -> Option<String> {
    let fixed = ["circle", "theta", "dumbbell", "tetrahedron", "theta-crossed", "theta-dotted", "dumbbell-crossed"];
    if let Some(n) = fixed.iter().find(|n| named(n).as_ref() == Some(s)) {
        return Some(n.to_string());
    }
    (1..=16).find(|&n| strands(n) == *s).map(|n| format!("strands({n})"))
}

fn slot(line: usize, tok: &str) -> Result<Slot> {
    let (e, p) = tok.split_once(':').ok_or_else(|| parse_err(line, format!("expected <edge>:<pos>, found {tok:?}")))?;
    Ok((EdgeId(number(line, e, "an edge id")?), number(line, p, "a position")?))
}

/// Parses chords `e:p e:p` separated by commas; empty input is the empty
/// diagram.
pub fn parse_inline_diagram(line: usize, s: &Skeleton, text: &str) -> Result<ChordDiagram> {
    let mut chords = Vec::new();
    for c in text.split(',').map(str::trim).filter(|c| !c.is_empty()) {
        let c = c.strip_prefix("chord").unwrap_or(c);
        let toks: Vec<&str> = c.split_whitespace().collect();
        let [a, b] = toks[..] else { return Err(parse_err(line, format!("a chord needs two slots: {c:?}"))) };
        chords.push((slot(line, a)?, slot(line, b)?));
    }
    ChordDiagram::from_chords(s, &chords).map_err(|e| parse_err(line, e.to_string()))
}

pub fn write_inline_diagram(d: &ChordDiagram) -> String {
    let chords: Vec<String> = d.chords().iter().map(|((e, p), (f, q))| format!("{}:{p} {}:{q}", e.0, f.0)).collect();
    chords.join(", ")
}

/// Header of a combination: `skeleton <name-or-file>` or inline records.
fn header_skeleton(
    it: &mut std::iter::Peekable<impl Iterator<Item = (usize, impl AsRef<str>)>>,
    base: Option<&Path>,
) -> Result<Skeleton> {
    if let Some((line, l)) = it.peek() {
        let line = *line;
        if let Some(rest) = l.as_ref().strip_prefix("skeleton ") {
            let s = resolve_skeleton(rest.trim(), base).map_err(|e| match e {
                CliError::Parse { msg, .. } => parse_err(line, msg),
                e => parse_err(line, e.to_string()),
            })?;
            it.next();
            return Ok(s);
        }
    }
    let mut recs = SkeletonRecords::default();
    while let Some((line, l)) = it.peek() {
        if !is_skeleton_record(l.as_ref()) {
            break;
        }
        recs.push(*line, l.as_ref())?;
        it.next();
    }
    if recs.first_line == 0 {
        let line = it.peek().map_or(0, |(l, _)| *l);
        return Err(parse_err(line, "expected a `skeleton` header or skeleton records"));
    }
    recs.build()
}

fn term(line: usize, s: &Skeleton, l: &str) -> Result<(ChordDiagram, Rational)> {
    let (c, d) = l.split_once('|').ok_or_else(|| parse_err(line, "expected `<rational> | <chords>`"))?;
    Ok((parse_inline_diagram(line, s, d)?, parse_rational(line, c)?))
}

/// Parses a combination: a skeleton header, then `<rational> | <chords>`
/// lines. A file of bare `chord` lines is read as a single diagram.
pub fn parse_lincomb(text: &str, base: Option<&Path>) -> Result<LinComb> {
    let mut it = records(text).peekable();
    let s = Arc::new(header_skeleton(&mut it, base)?);
    let rest: Vec<(usize, &str)> = it.collect();
    if !rest.is_empty() && rest.iter().all(|(_, l)| l.starts_with("chord ")) {
        let joined: Vec<&str> = rest.iter().map(|(_, l)| *l).collect();
        let d = parse_inline_diagram(rest[0].0, &s, &joined.join(","))?;
        return Ok(LinComb::from_diagram(s, d));
    }
    let mut v = LinComb::zero(s.clone());
    for (line, l) in rest {
        let (d, c) = term(line, &s, l)?;
        v.add_term(d, c);
    }
    Ok(v)
}

fn write_terms(out: &mut String, v: &LinComb) {
    for (d, c) in v.terms() {
        let chords = write_inline_diagram(d);
        let _ = writeln!(out, "{} |{}{chords}", fmt_rational(c), if chords.is_empty() { "" } else { " " });
    }
}

pub fn write_skeleton_header(s: &Skeleton) -> String {
    match builtin_name(s) {
        Some(n) => format!("skeleton {n}\n"),
        None => write_skeleton(s),
    }
}

pub fn write_lincomb(v: &LinComb) -> String {
    let mut out = write_skeleton_header(v.skeleton());
    write_terms(&mut out, v);
    out
}

/// A truncated series on `n` strands as read from a file.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesText {
    pub strands: usize,
    pub max_degree: usize,
    pub value: LinComb,
}

/// Parses `strands <n> maxdeg <D>`, then `degree <d>` blocks of terms.
pub fn parse_series(text: &str) -> Result<SeriesText> {
    let mut it = records(text);
    let (line, head) = it.next().ok_or_else(|| parse_err(0, "empty series file"))?;
    let toks: Vec<&str> = head.split_whitespace().collect();
    let ["strands", n, "maxdeg", d] = toks[..] else {
        return Err(parse_err(line, "expected `strands <n> maxdeg <D>`"));
    };
    let (n, max_degree): (usize, usize) = (number(line, n, "a strand count")?, number(line, d, "a degree")?);
    let s = Arc::new(strands(n));
    let mut v = LinComb::zero(s.clone());
    let mut current: Option<usize> = None;
    for (line, l) in it {
        if let Some(d) = l.strip_prefix("degree ") {
            let d: usize = number(line, d.trim(), "a degree")?;
            if d > max_degree {
                return Err(parse_err(line, format!("degree {d} exceeds maxdeg {max_degree}")));
            }
            current = Some(d);
            continue;
        }
        let want = current.ok_or_else(|| parse_err(line, "term before any `degree` line"))?;
        let (d, c) = term(line, &s, l)?;
        if d.degree() != want {
            return Err(parse_err(line, format!("diagram of degree {} in the degree {want} block", d.degree())));
        }
        v.add_term(d, c);
    }
    Ok(SeriesText { strands: n, max_degree, value: v })
}

pub fn write_series(parts: &[LinComb], strands: usize) -> String {
    let mut out = format!("strands {strands} maxdeg {}\n", parts.len().saturating_sub(1));
    for (d, p) in parts.iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let _ = writeln!(out, "degree {d}");
        write_terms(&mut out, p);
    }
    out
}

/// Parses a free group map: optional `target <n>` header, then one word
/// per line (`1` for the empty word). Without a header the target rank is
/// the largest generator index used.
pub fn parse_map(text: &str) -> Result<FreeGroupMap> {
    let mut target = None;
    let mut words: Vec<(usize, &str)> = Vec::new();
    for (line, l) in records(text) {
        if let Some(n) = l.strip_prefix("target ") {
            target = Some(number::<usize>(line, n.trim(), "a rank")?);
        } else {
            words.push((line, l));
        }
    }
    let rank = match target {
        Some(n) => n,
        None => {
            let mut max = 0;
            for &(line, w) in &words {
                let m = FreeGroupMap::parse(usize::MAX >> 1, &[w]).map_err(|e| parse_err(line, e.to_string()))?;
                max = max.max(m.words()[0].iter().map(|l| l.generator).max().unwrap_or(0));
            }
            max
        }
    };
    for &(line, w) in &words {
        FreeGroupMap::parse(rank, &[w]).map_err(|e| parse_err(line, e.to_string()))?;
    }
    let lines: Vec<&str> = words.iter().map(|(_, w)| *w).collect();
    FreeGroupMap::parse(rank, &lines).map_err(|e| parse_err(0, e.to_string()))
}

/// One stage of an operation pipeline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stage {
    Switch(EdgeId),
    Delete(EdgeId),
    Unzip(EdgeId),
    DottedUnzip(EdgeId),
    Cancel(VertexId, VertexId),
    /// Tree edges, strands (negative for reversed), optional root.
    Sweep { tree: Vec<EdgeId>, strands: Vec<(EdgeId, bool)>, root: Option<VertexId> },
    Reduce,
}

impl Stage {
    pub fn sweep_spec(&self) -> Option<SweepSpec> {
        match self {
            Stage::Sweep { tree, strands, root } => {
                Some(SweepSpec { tree: tree.iter().copied().collect(), strands: strands.clone(), root: *root })
            }
            _ => None,
        }
    }
}

fn edge_list(line: usize, v: &str) -> Result<Vec<(EdgeId, bool)>> {
    v.split(',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            let (t, fwd) = match t.strip_prefix('-') {
                Some(r) => (r, false),
                None => (t, true),
            };
            Ok((EdgeId(number(line, t, "an edge id")?), fwd))
        })
        .collect()
}

/// Parses `op switch e=3 | op unzip e=5 | reduce`. Stages may also be
/// given one per line.
pub fn parse_pipeline(text: &str) -> Result<Vec<Stage>> {
    let mut stages = Vec::new();
    for (line, l) in records(text) {
        for st in l.split('|').map(str::trim).filter(|s| !s.is_empty()) {
            let toks: Vec<&str> = st.split_whitespace().collect();
            if toks == ["reduce"] {
                stages.push(Stage::Reduce);
                continue;
            }
            if toks.len() < 2 || toks[0] != "op" {
                return Err(parse_err(line, format!("expected `op <name> key=value...` or `reduce`, found {st:?}")));
            }
            let mut args = BTreeMap::new();
            for kv in &toks[2..] {
                let (k, v) = kv.split_once('=').ok_or_else(|| parse_err(line, format!("expected key=value, found {kv:?}")))?;
                args.insert(k, v);
            }
            let get = |k: &str| args.get(k).copied().ok_or_else(|| parse_err(line, format!("`{}` needs {k}=", toks[1])));
            let edge = |k: &str| -> Result<EdgeId> { Ok(EdgeId(number(line, get(k)?, "an edge id")?)) };
            let vertex = |k: &str| -> Result<VertexId> { Ok(VertexId(number(line, get(k)?, "a vertex id")?)) };
            stages.push(match toks[1] {
                "switch" => Stage::Switch(edge("e")?),
                "delete" => Stage::Delete(edge("e")?),
                "unzip" => Stage::Unzip(edge("e")?),
                "dotted-unzip" => Stage::DottedUnzip(edge("e")?),
                "cancel" => Stage::Cancel(vertex("dot")?, vertex("antidot")?),
                "sweep" => Stage::Sweep {
                    tree: edge_list(line, get("tree")?)?.into_iter().map(|(e, _)| e).collect(),
                    strands: edge_list(line, get("strands")?)?,
                    root: args.get("root").map(|r| number(line, r, "a vertex id").map(VertexId)).transpose()?,
                },
                other => return Err(parse_err(line, format!("unknown operation {other:?}"))),
            });
        }
    }
    Ok(stages)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ktg_core::skeleton::{dumbbell, tetrahedron, theta_dotted};

    #[test]
    fn skeleton_round_trip() {
        for s in [tetrahedron(), dumbbell(), theta_dotted(), strands(3)] {
            assert_eq!(parse_skeleton(&write_skeleton(&s)).unwrap(), s);
        }
    }

    #[test]
    fn lincomb_round_trip() {
        let text = "skeleton theta\n1/2 | 0:0 1:0\n-3 | 0:0 0:1, 2:0 2:1\n2 |\n";
        let v = parse_lincomb(text, None).unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(parse_lincomb(&write_lincomb(&v), None).unwrap(), v);
    }

    #[test]
    fn chord_lines_form_one_diagram() {
        let v = parse_lincomb("skeleton strands(2)\nchord 1:0 2:0\nchord 1:1 2:1\n", None).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v.degrees().into_iter().collect::<Vec<_>>(), [2]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_lincomb("skeleton theta\n\n1 | 0:0 9:0\n", None).unwrap_err();
        assert!(matches!(e, CliError::Parse { line: 3, .. }), "{e}");
        let e = parse_series("strands 2 maxdeg 1\n1 | 1:0 2:0\n").unwrap_err();
        assert!(matches!(e, CliError::Parse { line: 2, .. }));
        let e = parse_pipeline("op switch e=1\nop fold e=2").unwrap_err();
        assert!(matches!(e, CliError::Parse { line: 2, .. }));
    }

    #[test]
    fn series_and_maps() {
        let s = parse_series("strands 2 maxdeg 2\ndegree 0\n1 |\ndegree 1\n1/2 | 1:0 2:0\n").unwrap();
        assert_eq!((s.strands, s.max_degree, s.value.len()), (2, 2, 2));
        let m = parse_map("x3'\nx3' x1\nx2' x1\n").unwrap();
        assert_eq!((m.source_rank(), m.target_rank()), (3, 3));
        assert_eq!(parse_map("target 4\n1\nx2").unwrap().target_rank(), 4);
    }

    #[test]
    fn pipelines() {
        let p = parse_pipeline("op switch e=3 | op unzip e=5 | reduce").unwrap();
        assert_eq!(p, [Stage::Switch(EdgeId(3)), Stage::Unzip(EdgeId(5)), Stage::Reduce]);
        let p = parse_pipeline("op sweep tree=4 strands=1,-3 root=0").unwrap();
        assert_eq!(p[0].sweep_spec().unwrap().strands, [(EdgeId(1), true), (EdgeId(3), false)]);
    }
}
