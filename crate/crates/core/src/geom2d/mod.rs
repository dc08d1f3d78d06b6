//! Exact rational planar geometry.
//!
//! Points, half-planes, convex bodies (bounded polygons and strips),
//! lattice-point queries and ray/boundary intersection. Every predicate is
//! an exact sign test on rational arithmetic; there are no tolerances.

mod rat;

pub use rat::{
    dec12, dec_sig, parse_rat, rat, rat_ceil, rat_floor, rat_i, rat_is_integer, rat_to_f64,
    strict_ceil, strict_floor, Rat,
};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

use crate::{Error, Result};

/// A point (or direction vector) in the rational plane.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Point2 {
    pub x: Rat,
    pub y: Rat,
}

impl fmt::Debug for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Point2 {
    pub fn new(x: Rat, y: Rat) -> Self {
        Point2 { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point2::new(rat_i(x), rat_i(y))
    }

    pub fn from_pairs(x: (i64, i64), y: (i64, i64)) -> Self {
        Point2::new(rat(x.0, x.1), rat(y.0, y.1))
    }

    pub fn add(&self, o: &Point2) -> Point2 {
        Point2::new(&self.x + &o.x, &self.y + &o.y)
    }

    pub fn sub(&self, o: &Point2) -> Point2 {
        Point2::new(&self.x - &o.x, &self.y - &o.y)
    }

    pub fn scale(&self, c: &Rat) -> Point2 {
        Point2::new(&self.x * c, &self.y * c)
    }

    pub fn dot(&self, o: &Point2) -> Rat {
        &self.x * &o.x + &self.y * &o.y
    }

    /// z-component of the cross product self x o.
    pub fn cross(&self, o: &Point2) -> Rat {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_lattice(&self) -> bool {
        rat_is_integer(&self.x) && rat_is_integer(&self.y)
    }

    /// Coordinates swapped; reflection about the line x1 = x2.
    pub fn swapped(&self) -> Point2 {
        Point2::new(self.y.clone(), self.x.clone())
    }

    pub fn lex_cmp(&self, o: &Point2) -> Ordering {
        self.x.cmp(&o.x).then_with(|| self.y.cmp(&o.y))
    }
}

/// Closed half-plane `a . x <= b` with outward normal `a`.
#[derive(Clone, Debug)]
pub struct HalfPlane {
    pub normal: Point2,
    pub rhs: Rat,
}

impl HalfPlane {
    pub fn new(normal: Point2, rhs: Rat) -> Result<Self> {
        if normal.is_zero() {
            return Err(Error::InvalidParam("half-plane normal must be nonzero".into()));
        }
        Ok(HalfPlane { normal, rhs })
    }

    /// Slack b - a.x; positive strictly inside, zero on the boundary line.
    pub fn slack(&self, p: &Point2) -> Rat {
        &self.rhs - self.normal.dot(p)
    }
}

/// Bounded convex polygon with 3 or 4 vertices in counter-clockwise order,
/// strictly convex (no collinear triple).
#[derive(Clone, Debug)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

impl ConvexPolygon {
    /// Accepts vertices in either cyclic orientation and normalizes to CCW.
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        if !(3..=4).contains(&vertices.len()) {
            return Err(Error::InvalidPolygon(format!(
                "expected 3 or 4 vertices, got {}",
                vertices.len()
            )));
        }
        let mut vs = vertices;
        let area2 = signed_area2(&vs);
        if area2.is_zero() {
            return Err(Error::InvalidPolygon("zero-area polygon".into()));
        }
        if area2.is_negative() {
            vs.reverse();
        }
        let n = vs.len();
        for i in 0..n {
            let a = &vs[i];
            let b = &vs[(i + 1) % n];
            let c = &vs[(i + 2) % n];
            let turn = b.sub(a).cross(&c.sub(b));
            if turn.is_zero() {
                return Err(Error::InvalidPolygon("collinear vertex triple".into()));
            }
            if turn.is_negative() {
                return Err(Error::InvalidPolygon("vertex sequence is not convex".into()));
            }
        }
        Ok(ConvexPolygon { vertices: vs })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    /// Directed edges (p, q), q following p in CCW order.
    pub fn edges(&self) -> impl Iterator<Item = (&Point2, &Point2)> {
        let n = self.vertices.len();
        (0..n).map(move |i| (&self.vertices[i], &self.vertices[(i + 1) % n]))
    }

    /// Outward half-planes, one per edge, in edge order.
    pub fn halfplanes(&self) -> Vec<HalfPlane> {
        self.edges()
            .map(|(p, q)| {
                let e = q.sub(p);
                // outward normal for CCW orientation
                let normal = Point2::new(e.y.clone(), -e.x.clone());
                let rhs = normal.dot(p);
                HalfPlane { normal, rhs }
            })
            .collect()
    }

    pub fn bbox(&self) -> (Rat, Rat, Rat, Rat) {
        let mut min_x = self.vertices[0].x.clone();
        let mut max_x = min_x.clone();
        let mut min_y = self.vertices[0].y.clone();
        let mut max_y = min_y.clone();
        for p in &self.vertices {
            if p.x < min_x {
                min_x = p.x.clone();
            }
            if p.x > max_x {
                max_x = p.x.clone();
            }
            if p.y < min_y {
                min_y = p.y.clone();
            }
            if p.y > max_y {
                max_y = p.y.clone();
            }
        }
        (min_x, max_x, min_y, max_y)
    }
}

fn signed_area2(vs: &[Point2]) -> Rat {
    let n = vs.len();
    let mut acc = rat_i(0);
    for i in 0..n {
        acc += vs[i].cross(&vs[(i + 1) % n]);
    }
    acc
}

/// The set `lo <= normal . x <= hi` between two parallel boundary lines.
/// The two implied half-planes carry exactly opposite normals.
#[derive(Clone, Debug)]
pub struct Strip {
    pub normal: Point2,
    pub lo: Rat,
    pub hi: Rat,
}

impl Strip {
    pub fn new(normal: Point2, lo: Rat, hi: Rat) -> Result<Self> {
        if normal.is_zero() {
            return Err(Error::InvalidParam("strip normal must be nonzero".into()));
        }
        if lo >= hi {
            return Err(Error::InvalidParam("strip requires lo < hi".into()));
        }
        Ok(Strip { normal, lo, hi })
    }

    pub fn halfplanes(&self) -> [HalfPlane; 2] {
        [
            HalfPlane {
                normal: self.normal.clone(),
                rhs: self.hi.clone(),
            },
            HalfPlane {
                normal: Point2::new(-self.normal.x.clone(), -self.normal.y.clone()),
                rhs: -self.lo.clone(),
            },
        ]
    }
}

/// A full-dimensional convex body: bounded polygon or strip.
#[derive(Clone, Debug)]
pub enum ConvexBody2 {
    Polygon(ConvexPolygon),
    Strip(Strip),
}

impl ConvexBody2 {
    pub fn polygon(vertices: Vec<Point2>) -> Result<Self> {
        Ok(ConvexBody2::Polygon(ConvexPolygon::new(vertices)?))
    }

    pub fn strip(normal: Point2, lo: Rat, hi: Rat) -> Result<Self> {
        Ok(ConvexBody2::Strip(Strip::new(normal, lo, hi)?))
    }

    pub fn halfplanes(&self) -> Vec<HalfPlane> {
        match self {
            ConvexBody2::Polygon(p) => p.halfplanes(),
            ConvexBody2::Strip(s) => s.halfplanes().to_vec(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, ConvexBody2::Polygon(_))
    }

    pub fn contains_interior(&self, p: &Point2) -> bool {
        self.halfplanes().iter().all(|h| h.slack(p).is_positive())
    }

    pub fn on_boundary(&self, p: &Point2) -> bool {
        let mut tight = false;
        for h in self.halfplanes() {
            let s = h.slack(p);
            if s.is_negative() {
                return false;
            }
            if s.is_zero() {
                tight = true;
            }
        }
        tight
    }

    pub fn contains_closed(&self, p: &Point2) -> bool {
        self.halfplanes().iter().all(|h| !h.slack(p).is_negative())
    }
}

/// Which part of the body a lattice query ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosureMode {
    Interior,
    Boundary,
    Closed,
}

/// Intersection point of two lines, each given by a pair of distinct points.
/// Returns `None` for parallel (including coincident) lines.
pub fn line_intersect(l1: (&Point2, &Point2), l2: (&Point2, &Point2)) -> Result<Option<Point2>> {
    let d1 = l1.1.sub(l1.0);
    let d2 = l2.1.sub(l2.0);
    if d1.is_zero() || d2.is_zero() {
        return Err(Error::DegenerateLine);
    }
    let det = d1.cross(&d2);
    if det.is_zero() {
        return Ok(None);
    }
    // l1.0 + t*d1 with t = cross(l2.0 - l1.0, d2) / det
    let t = l2.0.sub(l1.0).cross(&d2) / &det;
    Ok(Some(l1.0.add(&d1.scale(&t))))
}

/// Exact lattice-point enumeration over a bounded body, sorted
/// lexicographically. Strips are rejected: enumerate their boundary lines
/// through [`lattice_points_on_segment`] instead.
pub fn lattice_points_in(body: &ConvexBody2, mode: ClosureMode) -> Result<Vec<Point2>> {
    let poly = match body {
        ConvexBody2::Polygon(p) => p,
        ConvexBody2::Strip(_) => return Err(Error::UnboundedBody),
    };
    let (min_x, max_x, min_y, max_y) = poly.bbox();
    let halfplanes = poly.halfplanes();
    let mut out = Vec::new();
    let mut x = rat_ceil(&min_x);
    let x_end = rat_floor(&max_x);
    let y_start = rat_ceil(&min_y);
    let y_end = rat_floor(&max_y);
    while x <= x_end {
        let mut y = y_start.clone();
        while y <= y_end {
            let p = Point2::new(Rat::from_integer(x.clone()), Rat::from_integer(y.clone()));
            let mut inside = true;
            let mut tight = false;
            for h in &halfplanes {
                let s = h.slack(&p);
                if s.is_negative() {
                    inside = false;
                    break;
                }
                if s.is_zero() {
                    tight = true;
                }
            }
            let keep = match mode {
                ClosureMode::Interior => inside && !tight,
                ClosureMode::Boundary => inside && tight,
                ClosureMode::Closed => inside,
            };
            if keep {
                out.push(p);
            }
            y += 1;
        }
        x += 1;
    }
    out.sort_by(|a, b| a.lex_cmp(b));
    Ok(out)
}

/// Lattice points on the closed segment [p, q], optionally without the
/// endpoints. O(1) plus one step per point found: the points form an
/// arithmetic progression along the primitive direction of the segment.
pub fn lattice_points_on_segment(p: &Point2, q: &Point2, include_endpoints: bool) -> Vec<Point2> {
    let mut pts = Vec::new();
    let count = lattice_count_on_open_segment(p, q);
    if count > 0 {
        let (start, step) = open_segment_progression(p, q).expect("count > 0 implies progression");
        let mut cur = start;
        for _ in 0..count {
            pts.push(cur.clone());
            cur = cur.add(&step);
        }
    }
    if include_endpoints {
        if p.is_lattice() {
            pts.push(p.clone());
        }
        if q.is_lattice() && q != p {
            pts.push(q.clone());
        }
    }
    pts.sort_by(|a, b| a.lex_cmp(b));
    pts
}

/// Number of lattice points strictly between p and q, computed without
/// enumeration of the bounding box.
pub fn lattice_count_on_open_segment(p: &Point2, q: &Point2) -> u64 {
    match open_segment_lattice_range(p, q) {
        Some((k_lo, k_hi)) => {
            if k_hi >= k_lo {
                let n = k_hi - k_lo + 1u32;
                n.to_string().parse().unwrap_or(u64::MAX)
            } else {
                0
            }
        }
        None => 0,
    }
}

/// First lattice point on the open segment and the primitive step vector,
/// in the direction from p to q.
fn open_segment_progression(p: &Point2, q: &Point2) -> Option<(Point2, Point2)> {
    let (k_lo, _) = open_segment_lattice_range(p, q)?;
    let (x0, step) = segment_line_basis(p, q)?;
    Some((x0.add(&step.scale(&Rat::from_integer(k_lo))), step))
}

/// Range of progression indices k for which x0 + k*step lies strictly
/// inside the segment; None when the line carries no lattice points.
fn open_segment_lattice_range(p: &Point2, q: &Point2) -> Option<(BigInt, BigInt)> {
    let (x0, step) = segment_line_basis(p, q)?;
    // Project on the dominant coordinate of step to bound k.
    let (lo_t, hi_t, x0_t, step_t) = if !step.x.is_zero() {
        (p.x.clone(), q.x.clone(), x0.x.clone(), step.x.clone())
    } else {
        (p.y.clone(), q.y.clone(), x0.y.clone(), step.y.clone())
    };
    // strict inequalities: lo < x0_t + k*step_t < hi along the direction
    let (lo, hi) = if lo_t < hi_t { (lo_t, hi_t) } else { (hi_t.clone(), lo_t) };
    let a = (&lo - &x0_t) / &step_t;
    let b = (&hi - &x0_t) / &step_t;
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    Some((strict_ceil(&a), strict_floor(&b)))
}

/// A lattice point on the line through p, q (if any) and the primitive
/// integer step spanning all lattice points of that line.
fn segment_line_basis(p: &Point2, q: &Point2) -> Option<(Point2, Point2)> {
    use num_integer::Integer;
    let d = q.sub(p);
    // normal (a, b) with a*x + b*y = c; clear denominators to integers
    let a = d.y.clone();
    let b = -d.x.clone();
    let c = &a * &p.x + &b * &p.y;
    let scale = Rat::from_integer(lcm3(a.denom(), b.denom(), c.denom()));
    let ai = (&a * &scale).to_integer();
    let bi = (&b * &scale).to_integer();
    let ci_r = &c * &scale;
    let g = ai.gcd(&bi);
    if g.is_zero() {
        return None;
    }
    let ai = &ai / &g;
    let bi = &bi / &g;
    let ci_r = ci_r / Rat::from_integer(g);
    if !rat_is_integer(&ci_r) {
        return None; // primitive normal with fractional offset: no lattice points
    }
    let ci = ci_r.to_integer();
    // solve ai*x + bi*y = ci via extended gcd (gcd(ai, bi) = 1)
    let ext = ai.extended_gcd(&bi);
    debug_assert!(ext.gcd == BigInt::from(1) || ext.gcd == BigInt::from(-1));
    let (sx, sy) = (&ext.x * &ci / &ext.gcd, &ext.y * &ci / &ext.gcd);
    let x0 = Point2::new(Rat::from_integer(sx), Rat::from_integer(sy));
    // lattice direction along the line: (-bi, ai), oriented like q - p
    let mut step = Point2::new(Rat::from_integer(-bi.clone()), Rat::from_integer(ai.clone()));
    if step.dot(&d).is_negative() {
        step = Point2::new(-step.x, -step.y);
    }
    Some((x0, step))
}

fn lcm3(a: &BigInt, b: &BigInt, c: &BigInt) -> BigInt {
    use num_integer::Integer;
    a.lcm(b).lcm(c)
}

/// True when the open interior of the polygon contains a lattice point.
/// Walks integer columns; O(width) with O(1) work per column.
pub fn polygon_interior_has_lattice_point(poly: &ConvexPolygon) -> bool {
    let (min_x, max_x, _, _) = poly.bbox();
    let halfplanes = poly.halfplanes();
    let mut x = rat_ceil(&min_x);
    let x_end = rat_floor(&max_x);
    while x <= x_end {
        let xr = Rat::from_integer(x.clone());
        // interior y-range for this column: a_x*x + a_y*y < b for all edges
        let mut lo: Option<Rat> = None; // y > lo
        let mut hi: Option<Rat> = None; // y < hi
        let mut column_empty = false;
        for h in &halfplanes {
            let residual = &h.rhs - &h.normal.x * &xr;
            if h.normal.y.is_zero() {
                if !residual.is_positive() {
                    column_empty = true; // vertical edge excludes this column
                    break;
                }
            } else {
                let bound = &residual / &h.normal.y;
                if h.normal.y.is_positive() {
                    hi = Some(match hi {
                        Some(cur) if cur <= bound => cur,
                        _ => bound,
                    });
                } else {
                    lo = Some(match lo {
                        Some(cur) if cur >= bound => cur,
                        _ => bound,
                    });
                }
            }
        }
        if !column_empty {
            if let (Some(lo), Some(hi)) = (lo, hi) {
                if lo < hi && strict_ceil(&lo) <= strict_floor(&hi) {
                    return true;
                }
            }
        }
        x += 1;
    }
    false
}

/// Scale lambda > 0 at which the ray f + lambda*r first leaves the body,
/// or None when r is a recession direction (strip parallel). `f` must be
/// strictly interior and `r` nonzero.
pub fn ray_boundary_scale(body: &ConvexBody2, f: &Point2, r: &Point2) -> Result<Option<Rat>> {
    if r.is_zero() {
        return Err(Error::ZeroRay);
    }
    if !body.contains_interior(f) {
        return Err(Error::NotInterior);
    }
    let mut best: Option<Rat> = None;
    for h in body.halfplanes() {
        let advance = h.normal.dot(r);
        if advance.is_positive() {
            let t = h.slack(f) / advance;
            best = Some(match best {
                Some(cur) if cur <= t => cur,
                _ => t,
            });
        }
    }
    match body {
        ConvexBody2::Polygon(_) => Ok(Some(best.expect("bounded body has an exit"))),
        ConvexBody2::Strip(_) => Ok(best),
    }
}

/// Coordinates (lambda_a, lambda_b) of p - f in the (r_a, r_b) basis.
pub fn coords_in_ray_basis(
    p: &Point2,
    f: &Point2,
    r_a: &Point2,
    r_b: &Point2,
) -> Result<(Rat, Rat)> {
    let det = r_a.cross(r_b);
    if det.is_zero() {
        return Err(Error::SingularBasis);
    }
    let d = p.sub(f);
    let la = d.cross(r_b) / &det;
    let lb = r_a.cross(&d) / &det;
    Ok((la, lb))
}
