//! Maximal lattice-free sets in the plane: maximality checking,
//! classification, and the parametrized families the bound proofs use.
//!
//! A full-dimensional convex set is maximal lattice-free exactly when its
//! interior misses the lattice while every facet carries a lattice point
//! in its relative interior. In the plane this leaves splits, triangles
//! and quadrilaterals; triangles split further into types 1/2/3 by vertex
//! integrality and boundary lattice-point counts.

use serde::{Deserialize, Serialize};

use crate::geom2d::{
    lattice_count_on_open_segment, polygon_interior_has_lattice_point, rat_i, rat_is_integer,
    ConvexBody2, ConvexPolygon, Point2, Rat, Strip,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Split,
    Triangle1,
    Triangle2,
    Triangle3,
    Quadrilateral,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Classification::Split => "split",
            Classification::Triangle1 => "triangle type-1",
            Classification::Triangle2 => "triangle type-2",
            Classification::Triangle3 => "triangle type-3",
            Classification::Quadrilateral => "quadrilateral",
        };
        f.write_str(s)
    }
}

/// A body that passed the maximality check, together with its class.
#[derive(Clone, Debug)]
pub struct LatticeFreeSet {
    body: ConvexBody2,
    classification: Classification,
}

impl LatticeFreeSet {
    pub fn new(body: ConvexBody2) -> Result<Self> {
        let classification = classify(&body)?;
        Ok(LatticeFreeSet {
            body,
            classification,
        })
    }

    pub fn body(&self) -> &ConvexBody2 {
        &self.body
    }

    pub fn classification(&self) -> Classification {
        self.classification
    }
}

/// Maximality test: lattice-free interior plus a lattice point in the
/// relative interior of every edge. Strips must be integral unit-width
/// splits `c <= a x1 + b x2 <= c + 1` with coprime integer normal;
/// anything else is rejected rather than normalized.
pub fn is_maximal_lattice_free(body: &ConvexBody2) -> bool {
    match body {
        ConvexBody2::Polygon(poly) => {
            if polygon_interior_has_lattice_point(poly) {
                return false;
            }
            poly.edges()
                .all(|(p, q)| lattice_count_on_open_segment(p, q) >= 1)
        }
        ConvexBody2::Strip(strip) => split_is_valid(strip),
    }
}

fn split_is_valid(strip: &Strip) -> bool {
    use num_integer::Integer;
    if !rat_is_integer(&strip.normal.x)
        || !rat_is_integer(&strip.normal.y)
        || !rat_is_integer(&strip.lo)
    {
        return false;
    }
    if &strip.hi - &strip.lo != rat_i(1) {
        return false;
    }
    let a = strip.normal.x.to_integer();
    let b = strip.normal.y.to_integer();
    a.gcd(&b) == 1.into()
}

/// Classification per vertex integrality and boundary lattice counts.
/// Requires a maximal lattice-free body.
pub fn classify(body: &ConvexBody2) -> Result<Classification> {
    if !is_maximal_lattice_free(body) {
        return Err(Error::NotMaximalLatticeFree);
    }
    let poly = match body {
        ConvexBody2::Strip(_) => return Ok(Classification::Split),
        ConvexBody2::Polygon(p) => p,
    };
    if poly.vertices().len() == 4 {
        return Ok(Classification::Quadrilateral);
    }
    let integral_vertices = poly.vertices().iter().filter(|v| v.is_lattice()).count();
    let edge_counts: Vec<u64> = poly
        .edges()
        .map(|(p, q)| lattice_count_on_open_segment(p, q))
        .collect();
    let boundary_total: u64 = edge_counts.iter().sum::<u64>() + integral_vertices as u64;
    if integral_vertices == 3 && edge_counts.iter().all(|&c| c == 1) {
        Ok(Classification::Triangle1)
    } else if boundary_total == 3 {
        Ok(Classification::Triangle3)
    } else {
        Ok(Classification::Triangle2)
    }
}

/// Coordinate swap (reflection about x1 = x2). Maximality and class are
/// preserved; the polygon is re-normalized to CCW order.
pub fn reflect_about_diagonal(set: &LatticeFreeSet) -> LatticeFreeSet {
    let body = match set.body() {
        ConvexBody2::Polygon(p) => {
            let vs = p.vertices().iter().map(Point2::swapped).collect();
            ConvexBody2::Polygon(ConvexPolygon::new(vs).expect("reflection preserves convexity"))
        }
        ConvexBody2::Strip(s) => ConvexBody2::Strip(Strip {
            normal: s.normal.swapped(),
            lo: s.lo.clone(),
            hi: s.hi.clone(),
        }),
    };
    LatticeFreeSet {
        body,
        classification: set.classification(),
    }
}

/// Slopes (-u, -v, w) of the three edges of a type-3 candidate through
/// (1,0), (0,0) and (0,1) respectively.
#[derive(Clone, Debug)]
pub struct SlopeParams {
    pub u: Rat,
    pub v: Rat,
    pub w: Rat,
}

impl SlopeParams {
    pub fn new(u: Rat, v: Rat, w: Rat) -> Result<Self> {
        if u <= rat_i(1) {
            return Err(Error::InvalidParam("slope parameter u must exceed 1".into()));
        }
        if v <= rat_i(0) || v >= rat_i(1) {
            return Err(Error::InvalidParam("slope parameter v must lie in (0,1)".into()));
        }
        if w <= rat_i(0) {
            return Err(Error::InvalidParam("slope parameter w must be positive".into()));
        }
        Ok(SlopeParams { u, v, w })
    }
}

/// Triangle of the three-line family, with the lattice-freeness verdict.
#[derive(Clone, Debug)]
pub struct FamilyFTriangle {
    pub params: SlopeParams,
    /// Intersection of edges through (1,0) and (0,0).
    pub vertex_ab: Point2,
    /// Intersection of edges through (1,0) and (0,1).
    pub vertex_gd: Point2,
    /// Intersection of edges through (0,0) and (0,1).
    pub vertex_ez: Point2,
    pub body: ConvexPolygon,
    pub lattice_free: bool,
}

impl FamilyFTriangle {
    pub fn into_set(self) -> Option<LatticeFreeSet> {
        if self.lattice_free {
            Some(LatticeFreeSet {
                body: ConvexBody2::Polygon(self.body),
                classification: Classification::Triangle3,
            })
        } else {
            None
        }
    }
}

/// Builds the family triangle for (u, v, w):
///   edge 1 through (1,0) with slope -u,
///   edge 2 through (0,0) with slope -v,
///   edge 3 through (0,1) with slope  w.
///
/// Vertices come out as
///   (u/(u-v), -uv/(u-v)), ((u-1)/(u+w), u(w+1)/(u+w)), (-1/(v+w), v/(v+w)).
pub fn family_f_triangle(params: &SlopeParams) -> Result<FamilyFTriangle> {
    let (u, v, w) = (&params.u, &params.v, &params.w);
    let one = rat_i(1);

    let vertex_ab = Point2::new(u / (u - v), -(u * v) / (u - v));
    let vertex_gd = Point2::new((u - &one) / (u + w), (u * (w + &one)) / (u + w));
    let vertex_ez = Point2::new(-(v + w).recip(), v / (v + w));

    // cross-check against direct line intersections
    let e1 = (Point2::from_ints(1, 0), Point2::new(rat_i(0), u.clone()));
    let e2 = (Point2::from_ints(0, 0), Point2::new(rat_i(1), -v.clone()));
    let e3 = (Point2::from_ints(0, 1), Point2::new(rat_i(1), w + &one));
    let i_ab = crate::geom2d::line_intersect((&e1.0, &e1.1), (&e2.0, &e2.1))?
        .ok_or_else(|| Error::InvalidParam("edges 1 and 2 are parallel".into()))?;
    let i_gd = crate::geom2d::line_intersect((&e1.0, &e1.1), (&e3.0, &e3.1))?
        .ok_or_else(|| Error::InvalidParam("edges 1 and 3 are parallel".into()))?;
    let i_ez = crate::geom2d::line_intersect((&e2.0, &e2.1), (&e3.0, &e3.1))?
        .ok_or_else(|| Error::InvalidParam("edges 2 and 3 are parallel".into()))?;
    debug_assert_eq!(i_ab, vertex_ab);
    debug_assert_eq!(i_gd, vertex_gd);
    debug_assert_eq!(i_ez, vertex_ez);
    let _ = (i_ab, i_gd, i_ez);

    let body = ConvexPolygon::new(vec![vertex_ab.clone(), vertex_gd.clone(), vertex_ez.clone()])?;
    let lattice_free = is_maximal_lattice_free(&ConvexBody2::Polygon(body.clone()));
    Ok(FamilyFTriangle {
        params: params.clone(),
        vertex_ab,
        vertex_gd,
        vertex_ez,
        body,
        lattice_free,
    })
}

/// Symmetric quadrilateral with (0,0), (1,0), (0,1), (1,1) one per edge,
/// rationally parametrized on the conic a^2 = b(1-b) by
/// a = t/(1+t^2), b = 1/(1+t^2).
#[derive(Clone, Debug)]
pub struct SubclassGQuad {
    pub t: Rat,
    pub a: Rat,
    pub b: Rat,
    pub vertices: [Point2; 4],
    pub f: Point2,
}

impl SubclassGQuad {
    pub fn body(&self) -> ConvexBody2 {
        ConvexBody2::Polygon(
            ConvexPolygon::new(self.vertices.to_vec()).expect("vertices are in convex position"),
        )
    }

    pub fn set(&self) -> LatticeFreeSet {
        LatticeFreeSet {
            body: self.body(),
            classification: Classification::Quadrilateral,
        }
    }

    /// Corner rays from f to the four vertices.
    pub fn rays(&self) -> Vec<Point2> {
        self.vertices.iter().map(|v| v.sub(&self.f)).collect()
    }
}

pub fn subclass_g_quad(t: &Rat) -> Result<SubclassGQuad> {
    if !num_traits::Signed::is_positive(t) {
        return Err(Error::InvalidParam("parameter t must be positive".into()));
    }
    let one = rat_i(1);
    let denom = &one + t * t;
    let a = t / &denom;
    let b = denom.recip();
    debug_assert_eq!(&a * &a, &b * (&one - &b));

    let vertices = [
        Point2::new(&one + &a, &one - &b),
        Point2::new(&one - &b, -a.clone()),
        Point2::new(-a.clone(), b.clone()),
        Point2::new(b.clone(), &one + &a),
    ];
    let f = Point2::from_pairs((1, 2), (1, 2));
    let quad = SubclassGQuad {
        t: t.clone(),
        a,
        b,
        vertices,
        f,
    };
    let body = quad.body();
    if !is_maximal_lattice_free(&body) {
        return Err(Error::NotMaximalLatticeFree);
    }
    Ok(quad)
}

// --- JSON schema ------------------------------------------------------
//
// {"kind": "triangle" | "quadrilateral", "vertices": [[[xn,xd],[yn,yd]], ...]}
// {"kind": "split", "split": {"a": int, "b": int, "c": int}}
//
// Rationals are exact numerator/denominator pairs; each component may be a
// JSON integer or a decimal string for values outside i64.

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub(crate) enum IntOrStr {
    Int(i64),
    Str(String),
}

pub(crate) type RatDto = [IntOrStr; 2];

pub(crate) fn rat_to_dto(r: &Rat) -> RatDto {
    let enc = |v: &num_bigint::BigInt| -> IntOrStr {
        match i64::try_from(v.clone()) {
            Ok(i) => IntOrStr::Int(i),
            Err(_) => IntOrStr::Str(v.to_string()),
        }
    };
    [enc(r.numer()), enc(r.denom())]
}

pub(crate) fn rat_from_dto(d: &RatDto) -> Result<Rat> {
    let dec = |part: &IntOrStr| -> Result<num_bigint::BigInt> {
        match part {
            IntOrStr::Int(i) => Ok((*i).into()),
            IntOrStr::Str(s) => s
                .parse()
                .map_err(|_| Error::Parse(format!("bad integer {s:?}"))),
        }
    };
    let num = dec(&d[0])?;
    let den = dec(&d[1])?;
    if den == 0.into() {
        return Err(Error::Parse("zero denominator".into()));
    }
    Ok(Rat::new(num, den))
}

pub(crate) fn point_to_dto(p: &Point2) -> [RatDto; 2] {
    [rat_to_dto(&p.x), rat_to_dto(&p.y)]
}

pub(crate) fn point_from_dto(d: &[RatDto; 2]) -> Result<Point2> {
    Ok(Point2::new(rat_from_dto(&d[0])?, rat_from_dto(&d[1])?))
}

#[derive(Serialize, Deserialize)]
struct SetDto {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    vertices: Option<Vec<[RatDto; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    split: Option<SplitDto>,
}

#[derive(Serialize, Deserialize)]
struct SplitDto {
    a: i64,
    b: i64,
    c: i64,
}

pub fn set_to_json(set: &LatticeFreeSet) -> serde_json::Value {
    let dto = match set.body() {
        ConvexBody2::Polygon(p) => SetDto {
            kind: if p.vertices().len() == 3 {
                "triangle".into()
            } else {
                "quadrilateral".into()
            },
            vertices: Some(p.vertices().iter().map(point_to_dto).collect()),
            split: None,
        },
        ConvexBody2::Strip(s) => SetDto {
            kind: "split".into(),
            vertices: None,
            split: Some(SplitDto {
                a: i64::try_from(s.normal.x.to_integer()).unwrap_or_default(),
                b: i64::try_from(s.normal.y.to_integer()).unwrap_or_default(),
                c: i64::try_from(s.lo.to_integer()).unwrap_or_default(),
            }),
        },
    };
    serde_json::to_value(dto).expect("DTO serializes")
}

/// Parses a body from the JSON schema. The maximality check runs as part
/// of construction; use [`body_from_json`] to parse without it.
pub fn set_from_json(text: &str) -> Result<LatticeFreeSet> {
    LatticeFreeSet::new(body_from_json(text)?)
}

pub fn body_from_json(text: &str) -> Result<ConvexBody2> {
    let dto: SetDto =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad set JSON: {e}")))?;
    match dto.kind.as_str() {
        "triangle" | "quadrilateral" => {
            let verts = dto
                .vertices
                .ok_or_else(|| Error::Parse("missing vertices".into()))?;
            let expected = if dto.kind == "triangle" { 3 } else { 4 };
            if verts.len() != expected {
                return Err(Error::Parse(format!(
                    "{} needs {expected} vertices, got {}",
                    dto.kind,
                    verts.len()
                )));
            }
            let pts = verts
                .iter()
                .map(point_from_dto)
                .collect::<Result<Vec<_>>>()?;
            ConvexBody2::polygon(pts)
        }
        "split" => {
            let s = dto.split.ok_or_else(|| Error::Parse("missing split".into()))?;
            ConvexBody2::strip(
                Point2::from_ints(s.a, s.b),
                rat_i(s.c),
                rat_i(s.c) + rat_i(1),
            )
        }
        other => Err(Error::Parse(format!("unknown kind {other:?}"))),
    }
}
