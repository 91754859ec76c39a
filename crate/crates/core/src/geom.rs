//! Exact rational plane geometry.
//!
//! Everything here works over [`Rat`] (arbitrary precision rationals), so
//! every predicate is exact and no decision ever depends on rounding.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational number, always kept in lowest terms with a positive
/// denominator.
pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeomError {
    #[error("degenerate line: both points coincide")]
    DegenerateLine,
    #[error("polygon is not simple")]
    NonSimplePolygon,
    #[error("invalid rational literal `{0}`")]
    BadNumber(String),
}

/// Parses `12`, `-0.125`, `1e-3` or `3/7` into an exact rational.
pub fn parse_rat(text: &str) -> Result<Rat, GeomError> {
    let bad = || GeomError::BadNumber(text.to_string());
    let s = text.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rat::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("0{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Rat::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        Rat::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        value = -value;
    }
    Ok(value)
}

/// Formats a rational as `n` or `n/d`; round-trips through [`parse_rat`].
pub fn format_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: Rat,
    pub y: Rat,
}

impl Point {
    pub fn new(x: Rat, y: Rat) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(rat(x), rat(y))
    }

    pub fn cross(&self, other: &Point) -> Rat {
        &self.x * &other.y - &self.y * &other.x
    }

    pub fn dot(&self, other: &Point) -> Rat {
        &self.x * &other.x + &self.y * &other.y
    }

    pub fn norm2(&self) -> Rat {
        self.dot(self)
    }

    pub fn midpoint(&self, other: &Point) -> Point {
        let half = ratio(1, 2);
        Point::new((&self.x + &other.x) * &half, (&self.y + &other.y) * &half)
    }

    pub fn scale(&self, k: &Rat) -> Point {
        Point::new(&self.x * k, &self.y * k)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", format_rat(&self.x), format_rat(&self.y))
    }
}

impl Add for &Point {
    type Output = Point;
    fn add(self, o: &Point) -> Point {
        Point::new(&self.x + &o.x, &self.y + &o.y)
    }
}

impl Sub for &Point {
    type Output = Point;
    fn sub(self, o: &Point) -> Point {
        Point::new(&self.x - &o.x, &self.y - &o.y)
    }
}

impl Neg for &Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-&self.x, -&self.y)
    }
}

/// Sign of the turn `a -> b -> c`: positive for counterclockwise.
pub fn orient(a: &Point, b: &Point, c: &Point) -> Ordering {
    (b - a).cross(&(c - a)).cmp(&Rat::zero())
}

/// Whether `p` lies on the closed segment `a b` (assumes nothing about
/// collinearity).
pub fn on_segment(p: &Point, a: &Point, b: &Point) -> bool {
    orient(a, b, p) == Ordering::Equal
        && p.x >= a.x.clone().min(b.x.clone())
        && p.x <= a.x.clone().max(b.x.clone())
        && p.y >= a.y.clone().min(b.y.clone())
        && p.y <= a.y.clone().max(b.y.clone())
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl fmt::Debug for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}-{:?}", self.a, self.b)
    }
}

impl Segment {
    /// Returns `None` when the endpoints coincide.
    pub fn new(a: Point, b: Point) -> Option<Self> {
        (a != b).then_some(Segment { a, b })
    }

    /// Same segment with endpoints in lexicographic order.
    pub fn canonical(&self) -> Segment {
        if self.a <= self.b {
            self.clone()
        } else {
            Segment { a: self.b.clone(), b: self.a.clone() }
        }
    }

    pub fn same_points(&self, other: &Segment) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn midpoint(&self) -> Point {
        self.a.midpoint(&self.b)
    }

    pub fn direction(&self) -> Point {
        &self.b - &self.a
    }

    pub fn contains(&self, p: &Point) -> bool {
        on_segment(p, &self.a, &self.b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Intersection {
    Empty,
    Point(Point),
    /// Collinear overlap of positive length, endpoints in lexicographic order.
    Overlap(Segment),
}

pub fn segment_intersection(s: &Segment, t: &Segment) -> Intersection {
    let d1 = orient(&s.a, &s.b, &t.a);
    let d2 = orient(&s.a, &s.b, &t.b);
    let d3 = orient(&t.a, &t.b, &s.a);
    let d4 = orient(&t.a, &t.b, &s.b);

    if d1 == Ordering::Equal && d2 == Ordering::Equal {
        // Collinear: overlap of the two parameter ranges.
        let s = s.canonical();
        let t = t.canonical();
        let lo = s.a.clone().max(t.a.clone());
        let hi = s.b.clone().min(t.b.clone());
        return match lo.cmp(&hi) {
            Ordering::Less => Intersection::Overlap(Segment { a: lo, b: hi }),
            Ordering::Equal => Intersection::Point(lo),
            Ordering::Greater => Intersection::Empty,
        };
    }

    if d1 != Ordering::Equal && d1 == d2 || d3 != Ordering::Equal && d3 == d4 {
        return Intersection::Empty;
    }

    // Proper crossing or touching at one point.
    let r = s.direction();
    let q = t.direction();
    let denom = r.cross(&q);
    if denom.is_zero() {
        // Parallel but not collinear can't reach here; collinear handled above.
        return Intersection::Empty;
    }
    let u = (&t.a - &s.a).cross(&q) / denom;
    Intersection::Point(&s.a + &r.scale(&u))
}

/// Intersection of the open ray `origin + t * dir` (t > 0) with a segment,
/// returning the smallest such `t` at which the ray touches it.
pub fn ray_hit(origin: &Point, dir: &Point, seg: &Segment) -> Option<Rat> {
    let q = seg.direction();
    let denom = dir.cross(&q);
    let w = &seg.a - origin;
    if denom.is_zero() {
        if w.cross(dir).is_zero() {
            // Collinear with the ray: nearest endpoint ahead of the origin.
            let dd = dir.norm2();
            [&seg.a, &seg.b]
                .into_iter()
                .map(|p| (p - origin).dot(dir) / &dd)
                .filter(|t| t.is_positive())
                .min()
        } else {
            None
        }
    } else {
        let t = w.cross(&q) / &denom;
        let u = w.cross(dir) / &denom;
        (t.is_positive() && !u.is_negative() && u <= Rat::one()).then_some(t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

/// Twice the signed area (shoelace); positive for counterclockwise rings.
pub fn signed_area2(ring: &[Point]) -> Rat {
    let n = ring.len();
    (0..n).map(|i| ring[i].cross(&ring[(i + 1) % n])).sum()
}

pub fn signed_area(ring: &[Point]) -> Rat {
    signed_area2(ring) * ratio(1, 2)
}

/// Exact simplicity test: at least three vertices, nonzero area, and no two
/// edges meet except consecutive ones at their shared vertex.
pub fn is_simple(ring: &[Point]) -> bool {
    let n = ring.len();
    if n < 3 || signed_area2(ring).is_zero() {
        return false;
    }
    let edge = |i: usize| Segment { a: ring[i].clone(), b: ring[(i + 1) % n].clone() };
    for i in 0..n {
        if ring[i] == ring[(i + 1) % n] {
            return false;
        }
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            match segment_intersection(&edge(i), &edge(j)) {
                Intersection::Empty => {}
                Intersection::Overlap(_) => return false,
                Intersection::Point(p) => {
                    if !adjacent {
                        return false;
                    }
                    let shared = if j == i + 1 { &ring[j] } else { &ring[i] };
                    if &p != shared {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Ray-crossing classification without the simplicity check; the ring may
/// be given in either orientation.
pub fn locate_unchecked(p: &Point, ring: &[Point]) -> Location {
    let n = ring.len();
    let mut inside = false;
    for i in 0..n {
        let a = &ring[i];
        let b = &ring[(i + 1) % n];
        if on_segment(p, a, b) {
            return Location::Boundary;
        }
        // Half-open rule on y avoids double counting at vertices.
        if (a.y > p.y) != (b.y > p.y) {
            let lhs = (&b.x - &a.x) * (&p.y - &a.y);
            let rhs = (&p.x - &a.x) * (&b.y - &a.y);
            let crosses = if b.y > a.y { lhs > rhs } else { lhs < rhs };
            if crosses {
                inside = !inside;
            }
        }
    }
    if inside {
        Location::Inside
    } else {
        Location::Outside
    }
}

pub fn point_in_polygon(p: &Point, ring: &[Point]) -> Result<Location, GeomError> {
    if !is_simple(ring) {
        return Err(GeomError::NonSimplePolygon);
    }
    Ok(locate_unchecked(p, ring))
}

/// An exact planar isometry `p -> linear * p + translation`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Isometry {
    /// Row-major 2x2 orthogonal matrix.
    pub linear: [[Rat; 2]; 2],
    pub translation: [Rat; 2],
}

impl fmt::Debug for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.linear;
        let t = &self.translation;
        write!(
            f,
            "[[{}, {}], [{}, {}]] + ({}, {})",
            format_rat(&m[0][0]),
            format_rat(&m[0][1]),
            format_rat(&m[1][0]),
            format_rat(&m[1][1]),
            format_rat(&t[0]),
            format_rat(&t[1])
        )
    }
}

impl Isometry {
    pub fn identity() -> Self {
        Isometry {
            linear: [[rat(1), rat(0)], [rat(0), rat(1)]],
            translation: [rat(0), rat(0)],
        }
    }

    pub fn translation(dx: Rat, dy: Rat) -> Self {
        Isometry { translation: [dx, dy], ..Isometry::identity() }
    }

    pub fn determinant(&self) -> Rat {
        let m = &self.linear;
        &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
    }

    /// +1 for orientation-preserving maps, -1 for reflections.
    pub fn sign(&self) -> i8 {
        if self.determinant().is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn is_orthogonal(&self) -> bool {
        let m = &self.linear;
        let c0 = &m[0][0] * &m[0][0] + &m[1][0] * &m[1][0];
        let c1 = &m[0][1] * &m[0][1] + &m[1][1] * &m[1][1];
        let c01 = &m[0][0] * &m[0][1] + &m[1][0] * &m[1][1];
        c0.is_one() && c1.is_one() && c01.is_zero()
    }

    pub fn apply(&self, p: &Point) -> Point {
        let m = &self.linear;
        Point::new(
            &m[0][0] * &p.x + &m[0][1] * &p.y + &self.translation[0],
            &m[1][0] * &p.x + &m[1][1] * &p.y + &self.translation[1],
        )
    }

    pub fn apply_segment(&self, s: &Segment) -> Segment {
        Segment { a: self.apply(&s.a), b: self.apply(&s.b) }
    }

    /// Inverse map; orthogonal so the inverse linear part is the transpose.
    pub fn inverse(&self) -> Isometry {
        let m = &self.linear;
        let linear = [[m[0][0].clone(), m[1][0].clone()], [m[0][1].clone(), m[1][1].clone()]];
        let t = &self.translation;
        let translation = [
            -(&linear[0][0] * &t[0] + &linear[0][1] * &t[1]),
            -(&linear[1][0] * &t[0] + &linear[1][1] * &t[1]),
        ];
        Isometry { linear, translation }
    }
}

/// `compose(f, g)(p) == f(g(p))`.
pub fn compose(f: &Isometry, g: &Isometry) -> Isometry {
    let a = &f.linear;
    let b = &g.linear;
    let mul = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
    let linear = [[mul(0, 0), mul(0, 1)], [mul(1, 0), mul(1, 1)]];
    let t = &g.translation;
    let translation = [
        &a[0][0] * &t[0] + &a[0][1] * &t[1] + &f.translation[0],
        &a[1][0] * &t[0] + &a[1][1] * &t[1] + &f.translation[1],
    ];
    Isometry { linear, translation }
}

impl Mul for &Isometry {
    type Output = Isometry;
    fn mul(self, rhs: &Isometry) -> Isometry {
        compose(self, rhs)
    }
}

/// Reflection across the line through `p1` and `p2`.
pub fn reflect_line(p1: &Point, p2: &Point) -> Result<Isometry, GeomError> {
    if p1 == p2 {
        return Err(GeomError::DegenerateLine);
    }
    let d = p2 - p1;
    let n2 = d.norm2();
    let xx = &d.x * &d.x;
    let yy = &d.y * &d.y;
    let xy2 = &d.x * &d.y * rat(2);
    let a = (&xx - &yy) / &n2;
    let b = xy2 / &n2;
    let linear = [[a.clone(), b.clone()], [b, -a]];
    let mut iso = Isometry { linear, translation: [rat(0), rat(0)] };
    let image = iso.apply(p1);
    iso.translation = [&p1.x - &image.x, &p1.y - &image.y];
    Ok(iso)
}

/// Side of the directed line `a -> b` on which `p` lies.
pub fn side_of_line(a: &Point, b: &Point, p: &Point) -> Ordering {
    orient(a, b, p)
}
