//! Crease-pattern input (a subset of the FOLD format) and the face
//! decomposition of the paper.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::geom::{
    self, format_rat, is_simple, locate_unchecked, parse_rat, segment_intersection, signed_area,
    Intersection, Location, Point, Rat, Segment,
};

pub type FaceId = usize;
pub type CreaseId = usize;

/// FOLD edge assignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Assignment {
    Mountain,
    Valley,
    Unassigned,
    Boundary,
}

impl Assignment {
    pub fn letter(self) -> &'static str {
        match self {
            Assignment::Mountain => "M",
            Assignment::Valley => "V",
            Assignment::Unassigned => "U",
            Assignment::Boundary => "B",
        }
    }

    pub fn label(self) -> Option<Label> {
        match self {
            Assignment::Mountain => Some(Label::Mountain),
            Assignment::Valley => Some(Label::Valley),
            Assignment::Unassigned => Some(Label::Unassigned),
            Assignment::Boundary => None,
        }
    }
}

/// Label of a crease.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "M")]
    Mountain,
    #[serde(rename = "V")]
    Valley,
    #[serde(rename = "U")]
    Unassigned,
}

impl Label {
    pub fn flipped(self) -> Label {
        match self {
            Label::Mountain => Label::Valley,
            Label::Valley => Label::Mountain,
            Label::Unassigned => Label::Unassigned,
        }
    }

    pub fn assignment(self) -> Assignment {
        match self {
            Label::Mountain => Assignment::Mountain,
            Label::Valley => Assignment::Valley,
            Label::Unassigned => Assignment::Unassigned,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.assignment().letter())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputEdge {
    pub vertices: [usize; 2],
    pub assignment: Assignment,
}

/// Structurally valid but geometrically unchecked input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CreaseInput {
    pub vertices: Vec<Point>,
    pub edges: Vec<InputEdge>,
    pub faces: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("top-level value must be a JSON object")]
    NotAnObject,
    #[error("missing key `{0}`")]
    MissingKey(&'static str),
    #[error("`{key}`[{index}]: {message}")]
    BadEntry { key: &'static str, index: usize, message: String },
    #[error("unknown assignment `{value}` at `edges_assignment`[{index}]")]
    UnknownAssignment { index: usize, value: String },
    #[error("flat (unfolded) assignment `F` at `edges_assignment`[{index}] is not supported")]
    FlatAssignment { index: usize },
    #[error("`{key}`[{index}] refers to vertex {value}, but there are only {count} vertices")]
    IndexOutOfRange { key: &'static str, index: usize, value: usize, count: usize },
    #[error("`edges_assignment` has {assignments} entries but `edges_vertices` has {edges}")]
    LengthMismatch { edges: usize, assignments: usize },
    #[error("edge {index} repeats the vertex pair of edge {first}")]
    RepeatedEdge { index: usize, first: usize },
    #[error("edge {index} is a loop at vertex {vertex}")]
    LoopEdge { index: usize, vertex: usize },
}

fn entry_err(key: &'static str, index: usize, message: impl Into<String>) -> ParseError {
    ParseError::BadEntry { key, index, message: message.into() }
}

fn parse_coord(v: &Value, index: usize) -> Result<Rat, ParseError> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(entry_err("vertices_coords", index, "coordinate must be a number or string")),
    };
    parse_rat(&text).map_err(|e| entry_err("vertices_coords", index, e.to_string()))
}

fn parse_index(v: &Value, key: &'static str, index: usize) -> Result<usize, ParseError> {
    v.as_u64()
        .map(|i| i as usize)
        .ok_or_else(|| entry_err(key, index, "vertex index must be a nonnegative integer"))
}

fn array<'a>(obj: &'a Map<String, Value>, key: &'static str) -> Result<&'a Vec<Value>, ParseError> {
    match obj.get(key) {
        None => Err(ParseError::MissingKey(key)),
        Some(Value::Array(a)) => Ok(a),
        Some(_) => Err(ParseError::BadEntry { key, index: 0, message: "expected an array".into() }),
    }
}

/// Parses FOLD-subset JSON bytes.
pub fn parse(bytes: &[u8]) -> Result<CreaseInput, ParseError> {
    let value: Value = serde_json::from_slice(bytes).map_err(|e| ParseError::Json(e.to_string()))?;
    let obj = value.as_object().ok_or(ParseError::NotAnObject)?;

    let mut vertices = Vec::new();
    for (i, v) in array(obj, "vertices_coords")?.iter().enumerate() {
        let pair = v.as_array().ok_or_else(|| entry_err("vertices_coords", i, "expected [x, y]"))?;
        if pair.len() != 2 {
            return Err(entry_err("vertices_coords", i, "expected exactly two coordinates"));
        }
        vertices.push(Point::new(parse_coord(&pair[0], i)?, parse_coord(&pair[1], i)?));
    }
    let n = vertices.len();

    let raw_edges = array(obj, "edges_vertices")?;
    let raw_assign = array(obj, "edges_assignment")?;
    if raw_edges.len() != raw_assign.len() {
        return Err(ParseError::LengthMismatch { edges: raw_edges.len(), assignments: raw_assign.len() });
    }

    let mut edges = Vec::with_capacity(raw_edges.len());
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    for (i, (ev, ea)) in raw_edges.iter().zip(raw_assign).enumerate() {
        let pair = ev.as_array().ok_or_else(|| entry_err("edges_vertices", i, "expected [i, j]"))?;
        if pair.len() != 2 {
            return Err(entry_err("edges_vertices", i, "expected exactly two vertex indices"));
        }
        let a = parse_index(&pair[0], "edges_vertices", i)?;
        let b = parse_index(&pair[1], "edges_vertices", i)?;
        for value in [a, b] {
            if value >= n {
                return Err(ParseError::IndexOutOfRange { key: "edges_vertices", index: i, value, count: n });
            }
        }
        if a == b {
            return Err(ParseError::LoopEdge { index: i, vertex: a });
        }
        if let Some(&first) = seen.get(&(a.min(b), a.max(b))) {
            return Err(ParseError::RepeatedEdge { index: i, first });
        }
        seen.insert((a.min(b), a.max(b)), i);

        let letter = ea.as_str().ok_or_else(|| entry_err("edges_assignment", i, "expected a string"))?;
        let assignment = match letter {
            "M" | "m" => Assignment::Mountain,
            "V" | "v" => Assignment::Valley,
            "U" | "u" => Assignment::Unassigned,
            "B" | "b" => Assignment::Boundary,
            "F" | "f" => return Err(ParseError::FlatAssignment { index: i }),
            other => return Err(ParseError::UnknownAssignment { index: i, value: other.to_string() }),
        };
        edges.push(InputEdge { vertices: [a, b], assignment });
    }

    let faces = match obj.get("faces_vertices") {
        None | Some(Value::Null) => None,
        Some(Value::Array(raw)) => {
            let mut faces = Vec::with_capacity(raw.len());
            for (i, f) in raw.iter().enumerate() {
                let ring = f.as_array().ok_or_else(|| entry_err("faces_vertices", i, "expected an array"))?;
                let mut face = Vec::with_capacity(ring.len());
                for v in ring {
                    let value = parse_index(v, "faces_vertices", i)?;
                    if value >= n {
                        return Err(ParseError::IndexOutOfRange { key: "faces_vertices", index: i, value, count: n });
                    }
                    face.push(value);
                }
                faces.push(face);
            }
            Some(faces)
        }
        Some(_) => return Err(entry_err("faces_vertices", 0, "expected an array")),
    };

    Ok(CreaseInput { vertices, edges, faces })
}

fn coord_value(r: &Rat) -> Value {
    if r.is_integer() {
        serde_json::from_str(&r.numer().to_string()).unwrap_or(Value::Null)
    } else {
        Value::String(format_rat(r))
    }
}

impl CreaseInput {
    /// Serializes back to FOLD-subset JSON. Integers are written as numbers,
    /// other rationals as exact `"p/q"` strings.
    pub fn to_fold_json(&self) -> String {
        let mut fields: Vec<(&str, Value)> = vec![
            ("file_spec", Value::from(1.1)),
            ("file_creator", Value::from("foldcheck")),
            (
                "vertices_coords",
                Value::Array(
                    self.vertices.iter().map(|p| Value::Array(vec![coord_value(&p.x), coord_value(&p.y)])).collect(),
                ),
            ),
            (
                "edges_vertices",
                Value::Array(
                    self.edges.iter().map(|e| Value::from(vec![e.vertices[0] as u64, e.vertices[1] as u64])).collect(),
                ),
            ),
            (
                "edges_assignment",
                Value::Array(self.edges.iter().map(|e| Value::from(e.assignment.letter())).collect()),
            ),
        ];
        if let Some(faces) = &self.faces {
            fields.push((
                "faces_vertices",
                Value::Array(faces.iter().map(|f| Value::from(f.iter().map(|&v| v as u64).collect::<Vec<_>>())).collect()),
            ));
        }
        // One key per line, each list compact.
        let lines: Vec<String> = fields.iter().map(|(k, v)| format!("  \"{k}\": {v}")).collect();
        format!("{{\n{}\n}}", lines.join(",\n"))
    }

    /// Builds an input from a paper ring and crease segments, splitting the
    /// boundary at crease endpoints that land on it. Creases must already meet
    /// only at endpoints.
    pub fn from_segments(paper: &[Point], creases: &[(Segment, Label)]) -> CreaseInput {
        let mut index: BTreeMap<Point, usize> = BTreeMap::new();
        let mut vertices = Vec::new();
        let mut id = |p: &Point, vertices: &mut Vec<Point>| {
            *index.entry(p.clone()).or_insert_with(|| {
                vertices.push(p.clone());
                vertices.len() - 1
            })
        };
        for p in paper {
            id(p, &mut vertices);
        }
        let mut edges = Vec::new();
        for (s, label) in creases {
            let a = id(&s.a, &mut vertices);
            let b = id(&s.b, &mut vertices);
            edges.push(InputEdge { vertices: [a, b], assignment: label.assignment() });
        }
        let n = paper.len();
        let mut boundary = Vec::new();
        for i in 0..n {
            let a = &paper[i];
            let b = &paper[(i + 1) % n];
            let d = b - a;
            let mut on: Vec<(Rat, usize)> = vertices
                .iter()
                .enumerate()
                .filter(|(_, p)| geom::on_segment(p, a, b))
                .map(|(k, p)| ((p - a).dot(&d), k))
                .collect();
            on.sort();
            for w in on.windows(2) {
                boundary.push(InputEdge { vertices: [w[0].1, w[1].1], assignment: Assignment::Boundary });
            }
        }
        boundary.extend(edges);
        CreaseInput { vertices, edges: boundary, faces: None }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("vertices {0} and {1} have identical coordinates")]
    DuplicateVertex(usize, usize),
    #[error("vertex {0} is not an endpoint of any edge")]
    IsolatedVertex(usize),
    #[error("there are no boundary (B) edges")]
    NoBoundary,
    #[error("boundary edges do not form a single simple cycle: {0}")]
    BadBoundary(String),
    #[error("crease edge {edge} is not inside the paper")]
    CreaseOutsidePaper { edge: usize },
    #[error("creases cross: edges {0} and {1} intersect away from a shared vertex")]
    CreasesCross(usize, usize),
    #[error("edges {0} and {1} overlap")]
    EdgesOverlap(usize, usize),
    #[error("vertex {vertex} lies in the interior of edge {edge}")]
    VertexOnEdge { vertex: usize, edge: usize },
    #[error("dangling crease: interior vertex {0} has only one incident crease")]
    DanglingCrease(usize),
    #[error("paper is disconnected: the edge graph has {0} components")]
    Disconnected(usize),
    #[error("crease edge {edge} has the same face on both sides")]
    CreaseInsideFace { edge: usize },
    #[error("face through vertex {vertex} is not a simple polygon")]
    NonSimpleFace { vertex: usize },
    #[error("supplied faces_vertices do not match the computed faces")]
    FaceMismatch,
    #[error("internal consistency: {0}")]
    Internal(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    Boundary,
    Crease(CreaseId),
}

#[derive(Clone, Debug)]
pub struct PatternEdge {
    pub vertices: [usize; 2],
    pub kind: EdgeKind,
    pub segment: Segment,
}

#[derive(Clone, Debug)]
pub struct Crease {
    pub id: CreaseId,
    /// Index into [`CreasePattern::edges`] and the input edge list.
    pub edge: usize,
    pub segment: Segment,
    pub label: Label,
    /// Faces to the left and right of the directed input edge.
    pub faces: [FaceId; 2],
}

#[derive(Clone, Debug)]
pub struct Face {
    pub id: FaceId,
    /// Counterclockwise vertex ring starting at the lexicographically least vertex.
    pub vertices: Vec<usize>,
    pub polygon: Vec<Point>,
    /// `edges[i]` joins `vertices[i]` and `vertices[i + 1]`.
    pub edges: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct CreasePattern {
    pub vertices: Vec<Point>,
    /// Counterclockwise paper boundary.
    pub paper: Vec<Point>,
    pub edges: Vec<PatternEdge>,
    pub creases: Vec<Crease>,
    pub faces: Vec<Face>,
}

impl CreasePattern {
    pub fn paper_area(&self) -> Rat {
        signed_area(&self.paper)
    }

    pub fn crease_between(&self, f: FaceId, g: FaceId) -> impl Iterator<Item = &Crease> {
        self.creases.iter().filter(move |c| c.faces == [f, g] || c.faces == [g, f])
    }

    pub fn other_face(&self, crease: CreaseId, face: FaceId) -> FaceId {
        let [a, b] = self.creases[crease].faces;
        if a == face {
            b
        } else {
            a
        }
    }
}

/// Counterclockwise angular comparison of direction vectors.
pub(crate) fn angle_cmp(a: &Point, b: &Point) -> Ordering {
    let half = |p: &Point| {
        if p.y.is_positive() || (p.y.is_zero() && p.x.is_positive()) {
            0
        } else {
            1
        }
    };
    half(a).cmp(&half(b)).then_with(|| Rat::zero().cmp(&a.cross(b)))
}

/// Half-edge face tracing on a connected straight-line plane graph.
/// Returns every face cycle as half-edge lists; half-edge `2e` runs
/// `edges[e][0] -> edges[e][1]`, `2e + 1` the reverse. Bounded faces come
/// out counterclockwise, the outer face clockwise.
pub(crate) fn trace_faces(points: &[Point], edges: &[[usize; 2]]) -> Vec<Vec<usize>> {
    let origin = |h: usize| edges[h / 2][h % 2];
    let target = |h: usize| edges[h / 2][1 - h % 2];
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
    for h in 0..edges.len() * 2 {
        outgoing[origin(h)].push(h);
    }
    let mut rank = vec![0usize; edges.len() * 2];
    for (v, out) in outgoing.iter_mut().enumerate() {
        out.sort_by(|&a, &b| angle_cmp(&(&points[target(a)] - &points[v]), &(&points[target(b)] - &points[v])));
        for (i, &h) in out.iter().enumerate() {
            rank[h] = i;
        }
    }
    let next = |h: usize| {
        let v = target(h);
        let twin = h ^ 1;
        let out = &outgoing[v];
        out[(rank[twin] + out.len() - 1) % out.len()]
    };
    let mut seen = vec![false; edges.len() * 2];
    let mut cycles = Vec::new();
    for start in 0..edges.len() * 2 {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut h = start;
        while !seen[h] {
            seen[h] = true;
            cycle.push(h);
            h = next(h);
        }
        cycles.push(cycle);
    }
    cycles
}

fn components(n: usize, edges: &[[usize; 2]]) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &[a, b] in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    (0..n).filter(|&x| find(&mut parent, x) == x).count()
}

fn boundary_ring(input: &CreaseInput) -> Result<Vec<usize>, PatternError> {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut count = 0;
    for e in input.edges.iter().filter(|e| e.assignment == Assignment::Boundary) {
        adj.entry(e.vertices[0]).or_default().push(e.vertices[1]);
        adj.entry(e.vertices[1]).or_default().push(e.vertices[0]);
        count += 1;
    }
    if count == 0 {
        return Err(PatternError::NoBoundary);
    }
    if let Some((v, nbrs)) = adj.iter().find(|(_, n)| n.len() != 2) {
        return Err(PatternError::BadBoundary(format!("vertex {v} has {} boundary edges", nbrs.len())));
    }
    let start = *adj.keys().next().expect("nonempty");
    let mut ring = vec![start];
    let mut prev = start;
    let mut cur = adj[&start][0];
    while cur != start {
        ring.push(cur);
        let nbrs = &adj[&cur];
        let next = if nbrs[0] == prev { nbrs[1] } else { nbrs[0] };
        prev = cur;
        cur = next;
    }
    if ring.len() != count {
        return Err(PatternError::BadBoundary("boundary edges form more than one cycle".into()));
    }
    let mut pts: Vec<Point> = ring.iter().map(|&v| input.vertices[v].clone()).collect();
    if !is_simple(&pts) {
        return Err(PatternError::BadBoundary("boundary polygon self-intersects".into()));
    }
    if signed_area(&pts).is_negative() {
        ring.reverse();
        pts.reverse();
    }
    Ok(ring)
}

/// Normalizes a vertex cycle for orientation-free comparison.
fn normalize_cycle(cycle: &[usize]) -> Vec<usize> {
    let n = cycle.len();
    let best = |c: &[usize]| -> Vec<usize> {
        let start = (0..n).min_by_key(|&i| c[i]).unwrap_or(0);
        (0..n).map(|k| c[(start + k) % n]).collect()
    };
    let fwd = best(cycle);
    let rev: Vec<usize> = cycle.iter().rev().copied().collect();
    fwd.min(best(&rev))
}

/// Validates the input and computes its faces.
pub fn build_pattern(input: &CreaseInput) -> Result<CreasePattern, PatternError> {
    let pts = &input.vertices;
    let n = pts.len();

    let mut by_point: BTreeMap<&Point, usize> = BTreeMap::new();
    for (i, p) in pts.iter().enumerate() {
        if let Some(&j) = by_point.get(p) {
            return Err(PatternError::DuplicateVertex(j, i));
        }
        by_point.insert(p, i);
    }
    let mut degree = vec![0usize; n];
    for e in &input.edges {
        degree[e.vertices[0]] += 1;
        degree[e.vertices[1]] += 1;
    }
    if let Some(v) = degree.iter().position(|&d| d == 0) {
        return Err(PatternError::IsolatedVertex(v));
    }

    let ring = boundary_ring(input)?;
    let paper: Vec<Point> = ring.iter().map(|&v| pts[v].clone()).collect();
    let on_boundary: BTreeSet<usize> = ring.iter().copied().collect();

    let segments: Vec<Segment> = input
        .edges
        .iter()
        .map(|e| Segment { a: pts[e.vertices[0]].clone(), b: pts[e.vertices[1]].clone() })
        .collect();

    for (i, e) in input.edges.iter().enumerate() {
        if e.assignment != Assignment::Boundary
            && locate_unchecked(&segments[i].midpoint(), &paper) != Location::Inside
        {
            return Err(PatternError::CreaseOutsidePaper { edge: i });
        }
    }

    for (v, p) in pts.iter().enumerate() {
        for (i, e) in input.edges.iter().enumerate() {
            if !e.vertices.contains(&v) && segments[i].contains(p) {
                return Err(PatternError::VertexOnEdge { vertex: v, edge: i });
            }
        }
    }

    for i in 0..segments.len() {
        for j in i + 1..segments.len() {
            match segment_intersection(&segments[i], &segments[j]) {
                Intersection::Empty => {}
                Intersection::Overlap(_) => return Err(PatternError::EdgesOverlap(i, j)),
                Intersection::Point(p) => {
                    let shared = input.edges[i]
                        .vertices
                        .iter()
                        .any(|&v| input.edges[j].vertices.contains(&v) && pts[v] == p);
                    if !shared {
                        return Err(PatternError::CreasesCross(i, j));
                    }
                }
            }
        }
    }

    for v in 0..n {
        if degree[v] == 1 && !on_boundary.contains(&v) {
            return Err(PatternError::DanglingCrease(v));
        }
    }
    // Crease vertices off the boundary must also be inside the paper.
    for v in 0..n {
        if !on_boundary.contains(&v) && locate_unchecked(&pts[v], &paper) != Location::Inside {
            let edge = input.edges.iter().position(|e| e.vertices.contains(&v)).unwrap_or(0);
            return Err(PatternError::CreaseOutsidePaper { edge });
        }
    }

    let raw_edges: Vec<[usize; 2]> = input.edges.iter().map(|e| e.vertices).collect();
    let comps = components(n, &raw_edges);
    if comps != 1 {
        return Err(PatternError::Disconnected(comps));
    }

    let cycles = trace_faces(pts, &raw_edges);
    let origin = |h: usize| raw_edges[h / 2][h % 2];
    let mut face_of_half = vec![usize::MAX; raw_edges.len() * 2];
    let mut bounded: Vec<Vec<usize>> = Vec::new();
    let mut outer = 0;
    for cycle in &cycles {
        let ring_pts: Vec<Point> = cycle.iter().map(|&h| pts[origin(h)].clone()).collect();
        if signed_area(&ring_pts).is_positive() {
            bounded.push(cycle.clone());
        } else {
            outer += 1;
        }
    }
    if outer != 1 {
        return Err(PatternError::Internal(format!("{outer} unbounded face cycles")));
    }
    // Euler: V - E + F = 2, counting the outer face.
    if n as i64 - raw_edges.len() as i64 + bounded.len() as i64 + 1 != 2 {
        return Err(PatternError::Internal("Euler characteristic mismatch".into()));
    }

    let sort_key = |cycle: &Vec<usize>| {
        let mut key: Vec<Point> = cycle.iter().map(|&h| pts[origin(h)].clone()).collect();
        key.sort();
        key
    };
    bounded.sort_by_cached_key(sort_key);

    let mut faces = Vec::with_capacity(bounded.len());
    for (fid, cycle) in bounded.iter().enumerate() {
        let start = (0..cycle.len()).min_by(|&a, &b| pts[origin(cycle[a])].cmp(&pts[origin(cycle[b])])).unwrap_or(0);
        let halves: Vec<usize> = (0..cycle.len()).map(|k| cycle[(start + k) % cycle.len()]).collect();
        let vertices: Vec<usize> = halves.iter().map(|&h| origin(h)).collect();
        let mut distinct = BTreeSet::new();
        for &v in &vertices {
            if !distinct.insert(v) {
                return Err(PatternError::NonSimpleFace { vertex: v });
            }
        }
        for &h in &halves {
            face_of_half[h] = fid;
        }
        faces.push(Face {
            id: fid,
            polygon: vertices.iter().map(|&v| pts[v].clone()).collect(),
            vertices,
            edges: halves.iter().map(|&h| h / 2).collect(),
        });
    }

    let area: Rat = faces.iter().map(|f| signed_area(&f.polygon)).sum();
    if area != signed_area(&paper) {
        return Err(PatternError::Internal("face areas do not sum to the paper area".into()));
    }

    let mut edges = Vec::with_capacity(input.edges.len());
    let mut creases = Vec::new();
    for (i, e) in input.edges.iter().enumerate() {
        let kind = match e.assignment.label() {
            None => {
                let inner = [face_of_half[2 * i], face_of_half[2 * i + 1]];
                if inner.iter().filter(|&&f| f != usize::MAX).count() != 1 {
                    return Err(PatternError::BadBoundary(format!("boundary edge {i} is not on the paper boundary")));
                }
                EdgeKind::Boundary
            }
            Some(label) => {
                let (l, r) = (face_of_half[2 * i], face_of_half[2 * i + 1]);
                if l == usize::MAX || r == usize::MAX {
                    return Err(PatternError::CreaseOutsidePaper { edge: i });
                }
                if l == r {
                    return Err(PatternError::CreaseInsideFace { edge: i });
                }
                let id = creases.len();
                creases.push(Crease { id, edge: i, segment: segments[i].clone(), label, faces: [l, r] });
                EdgeKind::Crease(id)
            }
        };
        edges.push(PatternEdge { vertices: e.vertices, kind, segment: segments[i].clone() });
    }

    if let Some(supplied) = &input.faces {
        let mut want: Vec<Vec<usize>> = supplied.iter().map(|f| normalize_cycle(f)).collect();
        let mut have: Vec<Vec<usize>> = faces.iter().map(|f| normalize_cycle(&f.vertices)).collect();
        want.sort();
        have.sort();
        if want != have {
            return Err(PatternError::FaceMismatch);
        }
    }

    Ok(CreasePattern { vertices: pts.clone(), paper, edges, creases, faces })
}
