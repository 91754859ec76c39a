//! Overlay of the folded face images: cells with their layers and ply,
//! arrangement edges classified layer by layer, and the cell adjacency graph.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Signed;
use serde::Serialize;
use thiserror::Error;

use crate::geom::{
    format_rat, locate_unchecked, ratio, ray_hit, segment_intersection, signed_area, Intersection,
    Location, Point, Rat, Segment,
};
use crate::local_fold::LocalFlatFolding;
use crate::pattern::{trace_faces, CreaseId, EdgeKind, FaceId, Label};

pub type CellId = usize;
pub type ArrEdgeId = usize;

/// The unbounded cell always has this id.
pub const OUTER_CELL: CellId = 0;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArrangementError {
    #[error("arrangement consistency failure: {0}")]
    Internal(String),
}

fn internal(msg: impl Into<String>) -> ArrangementError {
    ArrangementError::Internal(msg.into())
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub id: CellId,
    /// Counterclockwise boundary; `None` for the outer cell.
    pub boundary: Option<Vec<Point>>,
    /// Face ids covering the cell, ascending.
    pub layers: Vec<FaceId>,
    /// A point strictly inside the cell and off every arrangement edge.
    pub sample: Option<Point>,
}

impl Cell {
    pub fn ply(&self) -> usize {
        self.layers.len()
    }

    pub fn local_index(&self, face: FaceId) -> Option<usize> {
        self.layers.binary_search(&face).ok()
    }

    pub fn area(&self) -> Rat {
        self.boundary.as_deref().map(signed_area).unwrap_or_else(|| ratio(0, 1))
    }
}

/// What a single layer does at an arrangement edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeRole {
    /// Continues uncreased into the other cell (same face id there).
    Span,
    /// Folds at this edge onto `partner`, a layer of the same cell.
    CreasePair { partner: FaceId, crease: CreaseId, label: Label },
    /// Ends at an image of the paper boundary.
    BoundaryEnd,
}

#[derive(Clone, Debug)]
pub struct ArrEdge {
    pub id: ArrEdgeId,
    /// Directed so that `cell_a` lies to its left.
    pub segment: Segment,
    pub cell_a: CellId,
    pub cell_b: CellId,
    /// Aligned with `cells[cell_a].layers`.
    pub roles_a: Vec<EdgeRole>,
    /// Aligned with `cells[cell_b].layers`.
    pub roles_b: Vec<EdgeRole>,
}

impl ArrEdge {
    pub fn roles(&self, cell: CellId) -> &[EdgeRole] {
        if cell == self.cell_a {
            &self.roles_a
        } else {
            &self.roles_b
        }
    }

    pub fn other(&self, cell: CellId) -> CellId {
        if cell == self.cell_a {
            self.cell_b
        } else {
            self.cell_a
        }
    }
}

#[derive(Clone, Debug)]
pub struct Arrangement {
    pub cells: Vec<Cell>,
    pub edges: Vec<ArrEdge>,
    /// Orientation sign of every face's isometry.
    pub face_signs: Vec<i8>,
    pub crease_images: Vec<(CreaseId, Segment, Label)>,
}

impl Arrangement {
    pub fn ply(&self) -> usize {
        self.cells.iter().map(Cell::ply).max().unwrap_or(0)
    }

    pub fn face_count(&self) -> usize {
        self.face_signs.len()
    }

    /// Same arrangement with every crease label replaced by `relabel(label)`.
    pub fn relabeled(&self, relabel: impl Fn(Label) -> Label) -> Arrangement {
        let mut out = self.clone();
        let fix = |roles: &mut Vec<EdgeRole>| {
            for r in roles.iter_mut() {
                if let EdgeRole::CreasePair { label, .. } = r {
                    *label = relabel(*label);
                }
            }
        };
        for e in &mut out.edges {
            fix(&mut e.roles_a);
            fix(&mut e.roles_b);
        }
        for c in &mut out.crease_images {
            c.2 = relabel(c.2);
        }
        out
    }
}

struct ImageEdge {
    face: FaceId,
    pattern_edge: usize,
    carrier: usize,
}

/// Overlays the face images of `lff` and classifies every arrangement edge.
pub fn build(lff: &LocalFlatFolding) -> Result<Arrangement, ArrangementError> {
    let cp = &lff.pattern;

    // Distinct image segments ("carriers") and which face edges lie on them.
    let mut carrier_index: BTreeMap<Segment, usize> = BTreeMap::new();
    let mut carriers: Vec<Segment> = Vec::new();
    let mut image_edges = Vec::new();
    for face in &cp.faces {
        let img = &lff.images[face.id];
        for (i, &pattern_edge) in face.edges.iter().enumerate() {
            let s = Segment { a: img[i].clone(), b: img[(i + 1) % img.len()].clone() }.canonical();
            let carrier = *carrier_index.entry(s.clone()).or_insert_with(|| {
                carriers.push(s);
                carriers.len() - 1
            });
            image_edges.push(ImageEdge { face: face.id, pattern_edge, carrier });
        }
    }

    // Split carriers at every mutual intersection.
    let mut on_carrier: Vec<BTreeSet<Point>> =
        carriers.iter().map(|s| [s.a.clone(), s.b.clone()].into_iter().collect()).collect();
    for i in 0..carriers.len() {
        for j in i + 1..carriers.len() {
            match segment_intersection(&carriers[i], &carriers[j]) {
                Intersection::Empty => {}
                Intersection::Point(p) => {
                    on_carrier[i].insert(p.clone());
                    on_carrier[j].insert(p);
                }
                Intersection::Overlap(s) => {
                    for p in [s.a, s.b] {
                        on_carrier[i].insert(p.clone());
                        on_carrier[j].insert(p);
                    }
                }
            }
        }
    }

    let mut point_ids: BTreeMap<Point, usize> = BTreeMap::new();
    for set in &on_carrier {
        for p in set {
            point_ids.insert(p.clone(), 0);
        }
    }
    for (i, v) in point_ids.values_mut().enumerate() {
        *v = i;
    }
    let points: Vec<Point> = point_ids.keys().cloned().collect();

    // Canonical carriers run from the smaller point to the larger, and the
    // points on them sort the same way along the segment.
    let mut atomic_index: BTreeMap<[usize; 2], usize> = BTreeMap::new();
    let mut carrier_atoms: Vec<Vec<usize>> = Vec::with_capacity(carriers.len());
    for set in &on_carrier {
        let ids: Vec<usize> = set.iter().map(|p| point_ids[p]).collect();
        let atoms = ids
            .windows(2)
            .map(|w| {
                let n = atomic_index.len();
                *atomic_index.entry([w[0], w[1]]).or_insert(n)
            })
            .collect();
        carrier_atoms.push(atoms);
    }
    let mut atomic: Vec<[usize; 2]> = vec![[0, 0]; atomic_index.len()];
    for (k, &i) in &atomic_index {
        atomic[i] = *k;
    }
    // Renumber atomic edges in sorted endpoint order for determinism.
    let order: Vec<usize> = {
        let mut o: Vec<usize> = (0..atomic.len()).collect();
        o.sort_by_key(|&i| atomic[i]);
        o
    };
    let mut renumber = vec![0; atomic.len()];
    for (new, &old) in order.iter().enumerate() {
        renumber[old] = new;
    }
    let atomic: Vec<[usize; 2]> = order.iter().map(|&i| atomic[i]).collect();
    for atoms in &mut carrier_atoms {
        for a in atoms.iter_mut() {
            *a = renumber[*a];
        }
    }

    let mut on_atom: Vec<Vec<(FaceId, usize)>> = vec![Vec::new(); atomic.len()];
    for ie in &image_edges {
        for &a in &carrier_atoms[ie.carrier] {
            on_atom[a].push((ie.face, ie.pattern_edge));
        }
    }

    // Cells.
    let cycles = trace_faces(&points, &atomic);
    let origin = |h: usize| atomic[h / 2][h % 2];
    let mut outer_cycles = 0;
    let mut bounded: Vec<(Vec<Point>, Vec<usize>)> = Vec::new();
    let mut outer_halves = Vec::new();
    for cycle in cycles {
        let ring: Vec<Point> = cycle.iter().map(|&h| points[origin(h)].clone()).collect();
        if signed_area(&ring).is_positive() {
            bounded.push((ring, cycle));
        } else {
            outer_cycles += 1;
            outer_halves = cycle;
        }
    }
    if outer_cycles != 1 {
        return Err(internal(format!("expected one unbounded cycle, found {outer_cycles}")));
    }
    bounded.sort_by_cached_key(|(ring, _)| {
        let mut k = ring.clone();
        k.sort();
        k
    });

    let mut cell_of_half = vec![OUTER_CELL; atomic.len() * 2];
    for &h in &outer_halves {
        cell_of_half[h] = OUTER_CELL;
    }
    let atom_segments: Vec<Segment> =
        atomic.iter().map(|&[u, v]| Segment { a: points[u].clone(), b: points[v].clone() }).collect();

    let mut cells = vec![Cell { id: OUTER_CELL, boundary: None, layers: Vec::new(), sample: None }];
    for (ring, cycle) in bounded {
        let id = cells.len();
        for &h in &cycle {
            cell_of_half[h] = id;
        }
        let sample = interior_sample(&points[origin(cycle[0])], &points[origin(cycle[1 % cycle.len()])], &atom_segments)
            .ok_or_else(|| internal(format!("no interior sample for cell {id}")))?;
        let mut layers = Vec::new();
        for (f, img) in lff.images.iter().enumerate() {
            match locate_unchecked(&sample, img) {
                Location::Inside => layers.push(f),
                Location::Outside => {}
                Location::Boundary => return Err(internal(format!("sample of cell {id} lies on face image {f}"))),
            }
        }
        // Start the ring at its least vertex.
        let start = (0..ring.len()).min_by(|&a, &b| ring[a].cmp(&ring[b])).unwrap_or(0);
        let boundary = (0..ring.len()).map(|k| ring[(start + k) % ring.len()].clone()).collect();
        cells.push(Cell { id, boundary: Some(boundary), layers, sample: Some(sample) });
    }

    let face_signs: Vec<i8> = lff.phi.iter().map(|p| p.sign()).collect();
    let mut edges = Vec::with_capacity(atomic.len());
    for (id, &[u, v]) in atomic.iter().enumerate() {
        let cell_a = cell_of_half[2 * id];
        let cell_b = cell_of_half[2 * id + 1];
        if cell_a == cell_b {
            return Err(internal(format!("arrangement edge {id} has cell {cell_a} on both sides")));
        }
        edges.push(ArrEdge {
            id,
            segment: Segment { a: points[u].clone(), b: points[v].clone() },
            cell_a,
            cell_b,
            roles_a: Vec::new(),
            roles_b: Vec::new(),
        });
    }

    let mut arr = Arrangement {
        cells,
        edges,
        face_signs,
        crease_images: crate::local_fold::crease_images(lff)
            .into_iter()
            .map(|c| (c.crease, c.segment, c.label))
            .collect(),
    };
    classify_edges(&mut arr, lff, &on_atom)?;
    Ok(arr)
}

/// A point strictly inside the cell to the left of `a -> b`: step off the
/// edge midpoint along the left normal, halfway to the nearest other edge.
fn interior_sample(a: &Point, b: &Point, segments: &[Segment]) -> Option<Point> {
    let m = a.midpoint(b);
    let d = b - a;
    let normal = Point::new(-d.y.clone(), d.x.clone());
    let t = segments.iter().filter_map(|s| ray_hit(&m, &normal, s)).min()?;
    Some(&m + &normal.scale(&(t * ratio(1, 2))))
}

/// Assigns a role to every layer on both sides of every arrangement edge.
/// `on_atom[e]` lists the (face, pattern edge) pairs whose images contain
/// arrangement edge `e`.
pub fn classify_edges(
    arr: &mut Arrangement,
    lff: &LocalFlatFolding,
    on_atom: &[Vec<(FaceId, usize)>],
) -> Result<(), ArrangementError> {
    let cp = &lff.pattern;
    for e in 0..arr.edges.len() {
        let (ca, cb) = (arr.edges[e].cell_a, arr.edges[e].cell_b);
        for &(face, _) in &on_atom[e] {
            let in_a = arr.cells[ca].local_index(face).is_some();
            let in_b = arr.cells[cb].local_index(face).is_some();
            if in_a == in_b {
                return Err(internal(format!("face {face} has an edge on arrangement edge {e} but covers both or neither side")));
            }
        }
        let mut sides = Vec::with_capacity(2);
        for (cell, other) in [(ca, cb), (cb, ca)] {
            let mut roles = Vec::with_capacity(arr.cells[cell].ply());
            for &f in &arr.cells[cell].layers {
                let here: Vec<usize> = on_atom[e].iter().filter(|(g, _)| *g == f).map(|&(_, pe)| pe).collect();
                let spans = arr.cells[other].local_index(f).is_some();
                let role = match (spans, here.as_slice()) {
                    (true, []) => EdgeRole::Span,
                    (false, [pe]) => match cp.edges[*pe].kind {
                        EdgeKind::Boundary => EdgeRole::BoundaryEnd,
                        EdgeKind::Crease(c) => {
                            let partner = cp.other_face(c, f);
                            let paired = arr.cells[cell].local_index(partner).is_some()
                                && on_atom[e].contains(&(partner, *pe));
                            if !paired {
                                return Err(internal(format!("crease {c} of face {f} on edge {e} has no partner layer")));
                            }
                            if arr.face_signs[f] == arr.face_signs[partner] {
                                return Err(internal(format!("crease {c} joins faces of equal orientation")));
                            }
                            EdgeRole::CreasePair { partner, crease: c, label: cp.creases[c].label }
                        }
                    },
                    _ => {
                        return Err(internal(format!("layer {f} of cell {cell} matches no single role on edge {e}")));
                    }
                };
                roles.push(role);
            }
            sides.push(roles);
        }
        let roles_b = sides.pop().expect("two sides");
        let roles_a = sides.pop().expect("two sides");
        arr.edges[e].roles_a = roles_a;
        arr.edges[e].roles_b = roles_b;
    }
    Ok(())
}

/// Dual graph of the arrangement, outer cell included.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellGraph {
    pub cell_count: usize,
    /// Unordered neighbor pairs `(low, high)` with the arrangement edges between them.
    pub edges: BTreeMap<(CellId, CellId), Vec<ArrEdgeId>>,
}

impl CellGraph {
    pub fn neighbors(&self) -> Vec<BTreeSet<CellId>> {
        let mut adj = vec![BTreeSet::new(); self.cell_count];
        for &(a, b) in self.edges.keys() {
            adj[a].insert(b);
            adj[b].insert(a);
        }
        adj
    }

    pub fn arr_edges_between(&self, a: CellId, b: CellId) -> &[ArrEdgeId] {
        self.edges.get(&(a.min(b), a.max(b))).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn is_complete_k2(&self) -> bool {
        self.cell_count == 2 && self.edges.len() == 1
    }
}

pub fn cell_graph(arr: &Arrangement) -> CellGraph {
    let mut edges: BTreeMap<(CellId, CellId), Vec<ArrEdgeId>> = BTreeMap::new();
    for e in &arr.edges {
        let key = (e.cell_a.min(e.cell_b), e.cell_a.max(e.cell_b));
        edges.entry(key).or_default().push(e.id);
    }
    CellGraph { cell_count: arr.cells.len(), edges }
}

#[derive(Serialize)]
struct CellDump {
    id: CellId,
    ply: usize,
    layers: Vec<FaceId>,
    boundary: Option<Vec<[String; 2]>>,
}

#[derive(Serialize)]
struct RoleDump {
    face: FaceId,
    role: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    partner: Option<FaceId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    crease: Option<CreaseId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<Label>,
}

#[derive(Serialize)]
struct EdgeDump {
    id: ArrEdgeId,
    from: [String; 2],
    to: [String; 2],
    cell_a: CellId,
    cell_b: CellId,
    roles_a: Vec<RoleDump>,
    roles_b: Vec<RoleDump>,
}

#[derive(Serialize)]
struct ArrangementDump {
    ply: usize,
    faces: usize,
    cells: Vec<CellDump>,
    edges: Vec<EdgeDump>,
}

fn point_strings(p: &Point) -> [String; 2] {
    [format_rat(&p.x), format_rat(&p.y)]
}

/// JSON dump of cells and classified edges; coordinates as exact strings.
pub fn to_json(arr: &Arrangement) -> String {
    let roles = |cell: CellId, rs: &[EdgeRole]| -> Vec<RoleDump> {
        arr.cells[cell]
            .layers
            .iter()
            .zip(rs)
            .map(|(&face, r)| match r {
                EdgeRole::Span => RoleDump { face, role: "span", partner: None, crease: None, label: None },
                EdgeRole::BoundaryEnd => RoleDump { face, role: "boundary", partner: None, crease: None, label: None },
                EdgeRole::CreasePair { partner, crease, label } => RoleDump {
                    face,
                    role: "crease",
                    partner: Some(*partner),
                    crease: Some(*crease),
                    label: Some(*label),
                },
            })
            .collect()
    };
    let dump = ArrangementDump {
        ply: arr.ply(),
        faces: arr.face_count(),
        cells: arr
            .cells
            .iter()
            .map(|c| CellDump {
                id: c.id,
                ply: c.ply(),
                layers: c.layers.clone(),
                boundary: c.boundary.as_ref().map(|b| b.iter().map(point_strings).collect()),
            })
            .collect(),
        edges: arr
            .edges
            .iter()
            .map(|e| EdgeDump {
                id: e.id,
                from: point_strings(&e.segment.a),
                to: point_strings(&e.segment.b),
                cell_a: e.cell_a,
                cell_b: e.cell_b,
                roles_a: roles(e.cell_a, &e.roles_a),
                roles_b: roles(e.cell_b, &e.roles_b),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&dump).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::rat;
    use crate::local_fold::reconstruct;
    use crate::pattern::{build_pattern, CreaseInput};

    fn p(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    fn strip(len: i64, creases: &[(i64, Label)]) -> LocalFlatFolding {
        let paper = vec![p(0, 0), p(len, 0), p(len, 1), p(0, 1)];
        let cs: Vec<_> = creases.iter().map(|&(x, l)| (Segment::new(p(x, 0), p(x, 1)).unwrap(), l)).collect();
        reconstruct(&build_pattern(&CreaseInput::from_segments(&paper, &cs)).unwrap()).unwrap()
    }

    fn edge_on<'a>(arr: &'a Arrangement, a: Point, b: Point) -> &'a ArrEdge {
        let s = Segment { a, b };
        arr.edges.iter().find(|e| e.segment.same_points(&s)).expect("edge exists")
    }

    fn role_of(arr: &Arrangement, e: &ArrEdge, cell: CellId, face: FaceId) -> EdgeRole {
        e.roles(cell)[arr.cells[cell].local_index(face).unwrap()].clone()
    }

    #[test]
    fn instance_a_cells() {
        let arr = build(&strip(2, &[(1, Label::Valley)])).unwrap();
        assert_eq!(arr.cells.len(), 2);
        assert_eq!(arr.cells[0].ply(), 0);
        assert!(arr.cells[0].boundary.is_none());
        assert_eq!(arr.cells[1].layers, vec![0, 1]);
        assert_eq!(arr.cells[1].boundary.as_ref().unwrap(), &vec![p(0, 0), p(1, 0), p(1, 1), p(0, 1)]);
        assert_eq!(arr.ply(), 2);
    }

    #[test]
    fn instance_a_edge_roles() {
        let arr = build(&strip(2, &[(1, Label::Valley)])).unwrap();
        let crease_edge = edge_on(&arr, p(1, 0), p(1, 1));
        assert_eq!(role_of(&arr, crease_edge, 1, 0), EdgeRole::CreasePair { partner: 1, crease: 0, label: Label::Valley });
        assert_eq!(role_of(&arr, crease_edge, 1, 1), EdgeRole::CreasePair { partner: 0, crease: 0, label: Label::Valley });
        assert!(crease_edge.roles(OUTER_CELL).is_empty());

        let left = edge_on(&arr, p(0, 0), p(0, 1));
        assert_eq!(role_of(&arr, left, 1, 0), EdgeRole::BoundaryEnd);
        assert_eq!(role_of(&arr, left, 1, 1), EdgeRole::BoundaryEnd);
    }

    #[test]
    fn crimp_cells_and_roles() {
        let arr = build(&strip(3, &[(1, Label::Valley), (2, Label::Mountain)])).unwrap();
        assert_eq!(arr.cells.len(), 2);
        assert_eq!(arr.cells[1].layers, vec![0, 1, 2]);
        let right = edge_on(&arr, p(1, 0), p(1, 1));
        assert_eq!(role_of(&arr, right, 1, 0), EdgeRole::CreasePair { partner: 1, crease: 0, label: Label::Valley });
        assert_eq!(role_of(&arr, right, 1, 2), EdgeRole::BoundaryEnd);
        let left = edge_on(&arr, p(0, 0), p(0, 1));
        assert_eq!(role_of(&arr, left, 1, 1), EdgeRole::CreasePair { partner: 2, crease: 1, label: Label::Mountain });
        assert_eq!(role_of(&arr, left, 1, 0), EdgeRole::BoundaryEnd);
    }

    #[test]
    fn k2_graphs() {
        for lff in [strip(2, &[(1, Label::Valley)]), strip(1, &[]), strip(3, &[(1, Label::Valley), (2, Label::Mountain)])] {
            let g = cell_graph(&build(&lff).unwrap());
            assert!(g.is_complete_k2());
            assert_eq!(g.arr_edges_between(0, 1).len(), 4);
        }
    }

    #[test]
    fn partial_overlap_gives_span_edges() {
        // Fold [0,3]x[0,1] at x=2: face [2,3] lands on [1,2].
        let arr = build(&strip(3, &[(2, Label::Valley)])).unwrap();
        assert_eq!(arr.cells.len(), 3);
        let plies: Vec<usize> = arr.cells.iter().map(Cell::ply).collect();
        assert_eq!(plies, vec![0, 1, 2]);
        let mid = edge_on(&arr, p(1, 0), p(1, 1));
        assert_eq!(role_of(&arr, mid, 1, 0), EdgeRole::Span);
        assert_eq!(role_of(&arr, mid, 2, 0), EdgeRole::Span);
        assert_eq!(role_of(&arr, mid, 2, 1), EdgeRole::BoundaryEnd);
        let weighted: Rat = arr.cells.iter().map(|c| c.area() * rat(c.ply() as i64)).sum();
        assert_eq!(weighted, rat(3));
    }

    #[test]
    fn json_dump_lists_cells_and_edges() {
        let arr = build(&strip(2, &[(1, Label::Valley)])).unwrap();
        let v: serde_json::Value = serde_json::from_str(&to_json(&arr)).unwrap();
        assert_eq!(v["cells"].as_array().unwrap().len(), 2);
        assert_eq!(v["edges"].as_array().unwrap().len(), 4);
        assert_eq!(v["ply"], 2);
    }
}
