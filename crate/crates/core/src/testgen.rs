//! Seeded generators for test and benchmark crease patterns.

use std::collections::BTreeSet;

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geom::{compose, on_segment, orient, rat, ratio, reflect_line, Isometry, Point, Rat, Segment};
use crate::local_fold;
use crate::pattern::{build_pattern, Assignment, CreaseInput, Label};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kind {
    /// Strip `[0, n+1] x [0, 1]` with `n` parallel creases labeled V, M, V, ...
    Accordion { n: usize },
    /// `rows x cols` unit grid, labeled as folded by rows first, then columns.
    MapGrid { rows: usize, cols: usize },
    /// Creases from the center of `[0,2]^2` separated by the given sector
    /// angles in degrees (multiples of 45, summing to 360). Labels are taken
    /// from `labels` or drawn from the seed.
    SingleVertex { angles: Vec<u32>, labels: Option<Vec<Label>> },
    /// A vertex of the given even degree with seeded rational directions,
    /// the last one placed so the reflections close up.
    RandomVertex { degree: usize, labels: Option<Vec<Label>> },
    /// `k` successive folds of the unit square through all layers.
    SimpleFold { k: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenSpec {
    pub seed: u64,
    pub kind: Kind,
    /// Number of crease edges whose label is flipped after generation.
    pub flips: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    InvalidSpec(String),
    #[error("no valid pattern found for seed {0}")]
    Exhausted(u64),
}

fn bad(msg: impl Into<String>) -> GenError {
    GenError::InvalidSpec(msg.into())
}

fn p(x: i64, y: i64) -> Point {
    Point::from_ints(x, y)
}

fn seg(a: Point, b: Point) -> Segment {
    Segment::new(a, b).expect("generator segments are non-degenerate")
}

fn rect(w: i64, h: i64) -> Vec<Point> {
    vec![p(0, 0), p(w, 0), p(w, h), p(0, h)]
}

pub fn generate(spec: &GenSpec) -> Result<CreaseInput, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut input = match &spec.kind {
        Kind::Accordion { n } => accordion(*n)?,
        Kind::MapGrid { rows, cols } => map_grid(*rows, *cols)?,
        Kind::SingleVertex { angles, labels } => single_vertex(angles, labels.as_deref(), &mut rng)?,
        Kind::RandomVertex { degree, labels } => random_vertex(*degree, labels.as_deref(), &mut rng, spec.seed)?,
        Kind::SimpleFold { k } => simple_fold_sequence(*k, &mut rng, spec.seed)?,
    };
    flip_labels(&mut input, spec.flips, &mut rng);
    Ok(input)
}

fn flip_labels(input: &mut CreaseInput, flips: usize, rng: &mut ChaCha8Rng) {
    let creases: Vec<usize> = input
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| matches!(e.assignment, Assignment::Mountain | Assignment::Valley))
        .map(|(i, _)| i)
        .collect();
    for _ in 0..flips.min(creases.len()) {
        let i = creases[rng.random_range(0..creases.len())];
        let e = &mut input.edges[i];
        e.assignment = match e.assignment {
            Assignment::Mountain => Assignment::Valley,
            _ => Assignment::Mountain,
        };
    }
}

fn alternating(i: usize) -> Label {
    if i % 2 == 1 {
        Label::Valley
    } else {
        Label::Mountain
    }
}

pub fn accordion(n: usize) -> Result<CreaseInput, GenError> {
    if n == 0 {
        return Err(bad("accordion needs at least one crease"));
    }
    let len = n as i64 + 1;
    let creases: Vec<_> = (1..=n).map(|i| (seg(p(i as i64, 0), p(i as i64, 1)), alternating(i))).collect();
    Ok(CreaseInput::from_segments(&rect(len, 1), &creases))
}

pub fn map_grid(rows: usize, cols: usize) -> Result<CreaseInput, GenError> {
    if rows == 0 || cols == 0 || rows * cols < 2 {
        return Err(bad("map grid needs at least two cells"));
    }
    let (r, c) = (rows as i64, cols as i64);
    let mut creases = Vec::new();
    // Row folds first; row j then lies face down when j is odd, which flips
    // the labels it receives from the column folds.
    for j in 1..r {
        for i in 0..c {
            creases.push((seg(p(i, j), p(i + 1, j)), alternating(j as usize)));
        }
    }
    for i in 1..c {
        for j in 0..r {
            let label = alternating(i as usize);
            let label = if j % 2 == 1 { label.flipped() } else { label };
            creases.push((seg(p(i, j), p(i, j + 1)), label));
        }
    }
    Ok(CreaseInput::from_segments(&rect(c, r), &creases))
}

fn random_labels(n: usize, rng: &mut ChaCha8Rng) -> Vec<Label> {
    (0..n).map(|_| if rng.random_bool(0.5) { Label::Mountain } else { Label::Valley }).collect()
}

/// Segment from the center of `[0,2]^2` to the boundary in direction `d`.
fn ray_to_square(d: &Point) -> Segment {
    let m = if d.x.abs() > d.y.abs() { d.x.abs() } else { d.y.abs() };
    let c = p(1, 1);
    let end = Point::new(&c.x + &d.x / &m, &c.y + &d.y / &m);
    seg(c, end)
}

fn vertex_input(dirs: &[Point], labels: &[Label]) -> CreaseInput {
    let creases: Vec<_> = dirs.iter().zip(labels).map(|(d, l)| (ray_to_square(d), *l)).collect();
    CreaseInput::from_segments(&rect(2, 2), &creases)
}

pub fn single_vertex(angles: &[u32], labels: Option<&[Label]>, rng: &mut ChaCha8Rng) -> Result<CreaseInput, GenError> {
    if angles.len() < 2 {
        return Err(bad("a vertex needs at least two creases"));
    }
    if angles.iter().any(|a| *a == 0 || a % 45 != 0) || angles.iter().sum::<u32>() != 360 {
        return Err(bad("sector angles must be positive multiples of 45 summing to 360"));
    }
    let table = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];
    let mut theta = 0;
    let dirs: Vec<Point> = angles
        .iter()
        .map(|a| {
            let (x, y) = table[(theta / 45) as usize];
            theta += a;
            p(x, y)
        })
        .collect();
    let labels = match labels {
        Some(l) if l.len() == dirs.len() => l.to_vec(),
        Some(_) => return Err(bad("one label per crease")),
        None => random_labels(dirs.len(), rng),
    };
    Ok(vertex_input(&dirs, &labels))
}

fn angle(d: &Point) -> f64 {
    crate::geom::to_f64(&d.y).atan2(crate::geom::to_f64(&d.x)).rem_euclid(std::f64::consts::TAU)
}

/// Axis direction of an orientation-reversing linear map `[[a, b], [b, -a]]`.
fn reflection_axis(iso: &Isometry) -> Point {
    let a = &iso.linear[0][0];
    let b = &iso.linear[1][0];
    let one = rat(1);
    if a != &-one.clone() {
        Point::new(&one + a, b.clone())
    } else {
        Point::new(b.clone(), &one - a)
    }
}

pub fn random_vertex(
    degree: usize,
    labels: Option<&[Label]>,
    rng: &mut ChaCha8Rng,
    seed: u64,
) -> Result<CreaseInput, GenError> {
    if degree < 2 || degree % 2 == 1 {
        return Err(bad("vertex degree must be even and at least 2"));
    }
    let labels = match labels {
        Some(l) if l.len() == degree => l.to_vec(),
        Some(_) => return Err(bad("one label per crease")),
        None => random_labels(degree, rng),
    };
    let pool: Vec<Point> = (-3i64..=3)
        .flat_map(|x| (-3i64..=3).map(move |y| (x, y)))
        .filter(|&(x, y)| (x, y) != (0, 0) && num_integer::gcd(x, y) == 1)
        .map(|(x, y)| p(x, y))
        .collect();
    let center = p(1, 1);
    for _ in 0..500 {
        let mut chosen: Vec<Point> = Vec::new();
        while chosen.len() < degree - 1 {
            let d = pool[rng.random_range(0..pool.len())].clone();
            if !chosen.contains(&d) {
                chosen.push(d);
            }
        }
        chosen.sort_by(|a, b| angle(a).total_cmp(&angle(b)));
        let product = chosen.iter().fold(Isometry::identity(), |acc, d| {
            compose(&acc, &reflect_line(&center, &(&center + d)).expect("nonzero direction"))
        });
        let axis = reflection_axis(&product);
        let (first, last) = (angle(&chosen[0]), angle(&chosen[degree - 2]));
        for cand in [axis.clone(), -&axis] {
            let a = angle(&cand);
            if a > last + 1e-9 || a < first - 1e-9 {
                let mut dirs = chosen.clone();
                dirs.push(cand);
                dirs.sort_by(|a, b| angle(a).total_cmp(&angle(b)));
                let input = vertex_input(&dirs, &labels);
                if build_pattern(&input).is_ok_and(|cp| local_fold::reconstruct(&cp).is_ok()) {
                    return Ok(input);
                }
            }
        }
    }
    Err(GenError::Exhausted(seed))
}

#[derive(Clone, Debug)]
struct Piece {
    poly: Vec<Point>,
    phi: Isometry,
}

const FOLD_DIRS: [(i64, i64); 8] = [(1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (2, 1), (2, -1), (1, -2)];

/// Splits `piece` along the image-space line through `q` with direction `d`.
/// Returns (staying part, moving part, crease segment in paper coordinates).
fn split_piece(piece: &Piece, q: &Point, d: &Point) -> (Option<Vec<Point>>, Option<Vec<Point>>, Option<Segment>) {
    let s: Vec<Rat> = piece.poly.iter().map(|v| d.cross(&(&piece.phi.apply(v) - q))).collect();
    let zero = rat(0);
    if s.iter().all(|x| x > &zero) {
        return (None, Some(piece.poly.clone()), None);
    }
    if s.iter().all(|x| x < &zero) {
        return (Some(piece.poly.clone()), None, None);
    }
    let n = piece.poly.len();
    let (mut stay, mut moving, mut cut) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..n {
        let j = (i + 1) % n;
        let (vi, vj) = (&piece.poly[i], &piece.poly[j]);
        if s[i] > zero {
            moving.push(vi.clone());
        } else {
            stay.push(vi.clone());
        }
        if (s[i] > zero) != (s[j] > zero) {
            let t = &s[i] / (&s[i] - &s[j]);
            let x = vi + &(vj - vi).scale(&t);
            moving.push(x.clone());
            stay.push(x.clone());
            cut.push(x);
        }
    }
    (Some(stay), Some(moving), Some(seg(cut[0].clone(), cut[1].clone())))
}

pub fn simple_fold_sequence(k: usize, rng: &mut ChaCha8Rng, seed: u64) -> Result<CreaseInput, GenError> {
    if k == 0 {
        return Err(bad("at least one fold"));
    }
    let paper = rect(1, 1);
    let mut pieces = vec![Piece { poly: paper.clone(), phi: Isometry::identity() }];
    let mut creases: Vec<(Segment, Label)> = Vec::new();

    for _ in 0..k {
        let mut done = false;
        for _ in 0..1000 {
            let images: Vec<Point> = pieces.iter().flat_map(|pc| pc.poly.iter().map(|v| pc.phi.apply(v))).collect();
            let lo_x = images.iter().map(|v| v.x.clone()).min().expect("nonempty");
            let hi_x = images.iter().map(|v| v.x.clone()).max().expect("nonempty");
            let lo_y = images.iter().map(|v| v.y.clone()).min().expect("nonempty");
            let hi_y = images.iter().map(|v| v.y.clone()).max().expect("nonempty");
            let fx = ratio(rng.random_range(1..16), 16);
            let fy = ratio(rng.random_range(1..16), 16);
            let q = Point::new(&lo_x + &(&hi_x - &lo_x) * &fx, &lo_y + &(&hi_y - &lo_y) * &fy);
            let (dx, dy) = FOLD_DIRS[rng.random_range(0..FOLD_DIRS.len())];
            let d = p(dx, dy);
            let q2 = &q + &d;
            // Lines through an image vertex would crease along existing folds.
            if images.iter().any(|v| orient(&q, &q2, v).is_eq()) {
                continue;
            }
            let any_left = images.iter().any(|v| orient(&q, &q2, v).is_gt());
            let any_right = images.iter().any(|v| orient(&q, &q2, v).is_lt());
            if !(any_left && any_right) {
                continue;
            }
            let over = rng.random_bool(0.5);
            let reflection = reflect_line(&q, &q2).expect("nonzero direction");
            let mut next = Vec::new();
            for pc in &pieces {
                let (stay, moving, cut) = split_piece(pc, &q, &d);
                if let Some(c) = cut {
                    let label = if (pc.phi.sign() > 0) == over { Label::Valley } else { Label::Mountain };
                    creases.push((c, label));
                }
                if let Some(poly) = stay {
                    next.push(Piece { poly, phi: pc.phi.clone() });
                }
                if let Some(poly) = moving {
                    next.push(Piece { poly, phi: compose(&reflection, &pc.phi) });
                }
            }
            pieces = next;
            done = true;
            break;
        }
        if !done {
            return Err(GenError::Exhausted(seed));
        }
    }

    // Atomic edges: every piece edge split at every piece vertex on it.
    let all_vertices: BTreeSet<Point> = pieces.iter().flat_map(|pc| pc.poly.iter().cloned()).collect();
    let mut atoms: BTreeSet<Segment> = BTreeSet::new();
    for pc in &pieces {
        let n = pc.poly.len();
        for i in 0..n {
            let (a, b) = (&pc.poly[i], &pc.poly[(i + 1) % n]);
            let d = b - a;
            let mut on: Vec<(Rat, Point)> = all_vertices
                .iter()
                .filter(|v| on_segment(v, a, b))
                .map(|v| ((v - a).dot(&d), v.clone()))
                .collect();
            on.sort();
            for w in on.windows(2) {
                atoms.insert(seg(w[0].1.clone(), w[1].1.clone()).canonical());
            }
        }
    }
    let on_boundary = |s: &Segment| {
        (0..paper.len()).any(|i| {
            let (a, b) = (&paper[i], &paper[(i + 1) % paper.len()]);
            on_segment(&s.a, a, b) && on_segment(&s.b, a, b)
        })
    };
    let mut out = Vec::new();
    for s in atoms.into_iter().filter(|s| !on_boundary(s)) {
        let label = creases
            .iter()
            .find(|(c, _)| c.contains(&s.a) && c.contains(&s.b))
            .map(|(_, l)| *l)
            .ok_or(GenError::Exhausted(seed))?;
        out.push((s, label));
    }
    Ok(CreaseInput::from_segments(&paper, &out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: Kind, seed: u64) -> GenSpec {
        GenSpec { seed, kind, flips: 0 }
    }

    #[test]
    fn accordion_three() {
        let input = generate(&spec(Kind::Accordion { n: 3 }, 0)).unwrap();
        let cp = build_pattern(&input).unwrap();
        let labels: Vec<Label> = cp.creases.iter().map(|c| c.label).collect();
        assert_eq!(labels, vec![Label::Valley, Label::Mountain, Label::Valley]);
        assert_eq!(cp.faces.len(), 4);
    }

    #[test]
    fn single_vertex_from_angles() {
        let mmmv = [Label::Mountain, Label::Mountain, Label::Mountain, Label::Valley];
        let input = generate(&spec(Kind::SingleVertex { angles: vec![90; 4], labels: Some(mmmv.to_vec()) }, 0)).unwrap();
        let cp = build_pattern(&input).unwrap();
        assert_eq!(cp.creases.len(), 4);
        assert_eq!(cp.faces.len(), 4);
        assert!(local_fold::reconstruct(&cp).is_ok());
        assert!(generate(&spec(Kind::SingleVertex { angles: vec![90, 90, 90], labels: None }, 0)).is_err());
        assert!(generate(&spec(Kind::SingleVertex { angles: vec![100, 80, 90, 90], labels: None }, 0)).is_err());
    }

    #[test]
    fn random_vertices_are_locally_flat() {
        for seed in 0..20 {
            for degree in [4, 6] {
                let input = generate(&spec(Kind::RandomVertex { degree, labels: None }, seed)).unwrap();
                let cp = build_pattern(&input).unwrap();
                assert_eq!(cp.creases.len(), degree);
                assert!(local_fold::reconstruct(&cp).is_ok());
            }
        }
    }

    #[test]
    fn simple_folds_are_locally_flat() {
        for seed in 0..30 {
            for k in 1..=3 {
                let input = generate(&spec(Kind::SimpleFold { k }, seed)).unwrap();
                let cp = build_pattern(&input).unwrap_or_else(|e| panic!("seed {seed} k {k}: {e}"));
                assert!(!cp.creases.is_empty());
                assert!(local_fold::reconstruct(&cp).is_ok(), "seed {seed} k {k}");
            }
        }
    }

    #[test]
    fn generation_is_pure() {
        let s = GenSpec { seed: 42, kind: Kind::SimpleFold { k: 3 }, flips: 2 };
        assert_eq!(generate(&s).unwrap().to_fold_json(), generate(&s).unwrap().to_fold_json());
    }

    #[test]
    fn map_grid_shape() {
        let cp = build_pattern(&generate(&spec(Kind::MapGrid { rows: 2, cols: 3 }, 0)).unwrap()).unwrap();
        assert_eq!(cp.faces.len(), 6);
        assert_eq!(cp.creases.len(), 7);
        assert!(local_fold::reconstruct(&cp).is_ok());
    }

    #[test]
    fn flips_change_labels() {
        let base = generate(&spec(Kind::Accordion { n: 5 }, 3)).unwrap();
        let flipped = generate(&GenSpec { seed: 3, kind: Kind::Accordion { n: 5 }, flips: 1 }).unwrap();
        let differ = base.edges.iter().zip(&flipped.edges).filter(|(a, b)| a.assignment != b.assignment).count();
        assert_eq!(differ, 1);
    }
}
