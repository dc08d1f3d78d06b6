//! Triangle-closure lower-bound machinery on the symmetric quadrilateral
//! subclass.
//!
//! For the quadrilateral with parameter t (so a = t/(1+t^2), b = 1/(1+t^2))
//! the point (m, m, m, m) lies in the triangle closure while violating the
//! quadrilateral cut by the factor q = 1/(4m); q peaks at 9/8 for t = 2.
//! The checks here compute the quantities exactly, maximize q over a grid,
//! and verify closure membership against generated maximal lattice-free
//! triangles.

use num_traits::{Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::gauge::psi;
use crate::geom2d::{rat, rat_i, ConvexBody2, Point2, Rat};
use crate::latticefree::{
    family_f_triangle, is_maximal_lattice_free, reflect_about_diagonal, subclass_g_quad,
    LatticeFreeSet, SlopeParams,
};
use crate::sweep::{zoom_window, Linspace};
use crate::{Error, Result};

/// All derived quantities for one subclass member.
#[derive(Clone, Debug)]
pub struct SubclassGQuantities {
    pub t: Rat,
    pub a: Rat,
    pub b: Rat,
    pub lambda1: Rat,
    pub lambda2: Rat,
    pub threshold1: Rat,
    pub threshold2: Rat,
    pub pprime_x: Rat,
    pub m: Rat,
    pub q: Rat,
}

/// Exact quantities: basis coordinates of the four lattice points, the
/// two gauge thresholds, the membership point scale m and the scaling q.
/// For t >= 1 (b <= 1/2) every denominator is provably positive; some
/// t < 1 hit a degenerate denominator and report an error.
pub fn g_quantities(t: &Rat) -> Result<SubclassGQuantities> {
    if !num_traits::Signed::is_positive(t) {
        return Err(Error::InvalidParam("parameter t must be positive".into()));
    }
    let one = rat_i(1);
    let half = rat(1, 2);
    let denom = &one + t * t;
    let a = t / &denom;
    let b = denom.recip();

    let det = (&half + &a) * (&half + &a) + (&b - &half) * (&b - &half);
    let lambda1 = &half * (&one + &a - &b) / &det;
    let lambda2 = &half * (&a + &b) / &det;
    let threshold1 = (&half + &a) / &half;

    let two_b = rat_i(2) * &b;
    let ppden = (&two_b - &one) * (&two_b - &one) + (rat_i(2) * &a + &one) * (&a + &b);
    let pprime_x = (&a + &b) * (&two_b - &one) / &ppden;
    let thr2_den = &half - &pprime_x;
    if thr2_den.is_zero() {
        return Err(Error::InvalidParam(
            "degenerate parameter: threshold denominator vanishes".into(),
        ));
    }
    let threshold2 = (&half + &a) / &thr2_den;

    let m_den = rat_i(2) + (&lambda1 - &lambda2) * (&threshold1 + &threshold2);
    if m_den.is_zero() {
        return Err(Error::InvalidParam(
            "degenerate parameter: membership denominator vanishes".into(),
        ));
    }
    let m = &lambda1 / &m_den;
    let q = &m_den / (rat_i(4) * &lambda1);

    // q is 1/(4m) by construction, and must match the closed form
    debug_assert_eq!(&q * rat_i(4) * &m, one);
    debug_assert_eq!(q, q_closed_form(t)?);

    Ok(SubclassGQuantities {
        t: t.clone(),
        a,
        b,
        lambda1,
        lambda2,
        threshold1,
        threshold2,
        pprime_x,
        m,
        q,
    })
}

/// q = ((2a+1)^2 + (2b-1)^2)(a - 3b + 2) / (4 (a - b + 1)^2), with the
/// conic relation making a exact. Total for t > 0.
pub fn q_closed_form(t: &Rat) -> Result<Rat> {
    if !num_traits::Signed::is_positive(t) {
        return Err(Error::InvalidParam("parameter t must be positive".into()));
    }
    let one = rat_i(1);
    let denom = &one + t * t;
    let a = t / &denom;
    let b = denom.recip();
    let two = rat_i(2);
    let p = (&two * &a + &one) * (&two * &a + &one) + (&two * &b - &one) * (&two * &b - &one);
    let num = p * (&a - rat_i(3) * &b + &two);
    let d = &a - &b + &one;
    Ok(num / (rat_i(4) * &d * &d))
}

/// One grid row of the q sweep.
#[derive(Clone, Debug)]
pub struct QSweepRow {
    pub t: Rat,
    pub q: Rat,
    /// None when the quantity chain hits a degenerate denominator.
    pub quantities: Option<SubclassGQuantities>,
}

#[derive(Clone, Debug)]
pub struct QMaximum {
    pub t_star: Rat,
    pub q_star: Rat,
    pub rows: Vec<QSweepRow>,
}

/// Maximizes the closed-form q over the grid with local refinement. Ties
/// keep the earliest grid point, so results are reproducible.
pub fn maximize_q(grid: &Linspace, refine_rounds: usize) -> Result<QMaximum> {
    let base = grid.values();
    if base.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut rows = Vec::with_capacity(base.len());
    let mut best: Option<(Rat, Rat)> = None;
    let scan = |ts: &[Rat], rows: &mut Vec<QSweepRow>, best: &mut Option<(Rat, Rat)>| {
        for t in ts {
            if !num_traits::Signed::is_positive(t) {
                continue;
            }
            let q = q_closed_form(t).expect("positive t");
            rows.push(QSweepRow {
                t: t.clone(),
                q: q.clone(),
                quantities: g_quantities(t).ok(),
            });
            if best.as_ref().map_or(true, |(_, bq)| &q > bq) {
                *best = Some((t.clone(), q));
            }
        }
    };
    scan(&base, &mut rows, &mut best);

    for round in 1..=refine_rounds {
        let Some((t_star, _)) = best.clone() else { break };
        let hw = grid.step() / rat_i(10).pow(round as i32 - 1);
        let window = zoom_window(&t_star, &hw, &grid.lo, &grid.hi, 21);
        scan(&window, &mut rows, &mut best);
    }
    let (t_star, q_star) = best.ok_or(Error::EmptyGrid)?;
    Ok(QMaximum {
        t_star,
        q_star,
        rows,
    })
}

/// Generator families for closure-membership samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleFamily {
    /// Unimodular images of the triangle (0,0),(2,0),(0,2).
    UnimodularType1,
    /// Triangles with a lattice-separating axis-parallel edge.
    SeparatingEdge,
    /// Three-slope family triangles (type 3).
    FamilyF,
}

impl std::fmt::Display for SampleFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SampleFamily::UnimodularType1 => "type1-unimodular",
            SampleFamily::SeparatingEdge => "separating-edge",
            SampleFamily::FamilyF => "family-f",
        })
    }
}

#[derive(Clone, Debug)]
pub struct TriangleSample {
    pub id: usize,
    pub family: SampleFamily,
    pub descriptor: String,
    pub set: LatticeFreeSet,
}

#[derive(Clone, Debug)]
pub struct SampleBatch {
    pub samples: Vec<TriangleSample>,
    /// Indices that exhausted their retry budget (expected to stay zero).
    pub failures: usize,
}

const RETRY_BUDGET: usize = 64;

/// Deterministic sample generation: sample i draws from its own stream,
/// so batches are reproducible for a given (n, seed) and independent of
/// thread count. Index 0 is always the canonical triangle.
pub fn triangle_samples(n: usize, seed: u64) -> Result<SampleBatch> {
    if n == 0 {
        return Err(Error::InvalidParam("sample count must be at least 1".into()));
    }
    let results: Vec<Option<TriangleSample>> = (0..n)
        .into_par_iter()
        .map(|i| generate_sample(i, seed))
        .collect();
    let mut samples = Vec::with_capacity(n);
    let mut failures = 0;
    for r in results {
        match r {
            Some(s) => samples.push(s),
            None => failures += 1,
        }
    }
    Ok(SampleBatch { samples, failures })
}

fn generate_sample(index: usize, seed: u64) -> Option<TriangleSample> {
    let mut rng =
        ChaCha8Rng::seed_from_u64(seed.wrapping_add((index as u64).wrapping_mul(0x9E3779B97F4A7C15)));
    let family = match index % 3 {
        0 => SampleFamily::UnimodularType1,
        1 => SampleFamily::SeparatingEdge,
        _ => SampleFamily::FamilyF,
    };
    for _ in 0..RETRY_BUDGET {
        let attempt = match family {
            SampleFamily::UnimodularType1 => unimodular_type1(index, &mut rng),
            SampleFamily::SeparatingEdge => separating_edge_triangle(&mut rng),
            SampleFamily::FamilyF => family_f_sample(&mut rng),
        };
        if let Some((set, descriptor)) = attempt {
            let f = Point2::from_pairs((1, 2), (1, 2));
            if set.body().contains_interior(&f) && is_maximal_lattice_free(set.body()) {
                return Some(TriangleSample {
                    id: index,
                    family,
                    descriptor,
                    set,
                });
            }
        }
    }
    None
}

fn unimodular_type1(index: usize, rng: &mut ChaCha8Rng) -> Option<(LatticeFreeSet, String)> {
    let canonical = [
        Point2::from_ints(0, 0),
        Point2::from_ints(2, 0),
        Point2::from_ints(0, 2),
    ];
    let (m, shear_count) = if index == 0 {
        ([[1i64, 0], [0, 1]], 0)
    } else {
        let mut m = [[1i64, 0], [0, 1]];
        let k = rng.random_range(1..=3);
        for _ in 0..k {
            let s: i64 = if rng.random_bool(0.5) { 1 } else { -1 };
            if rng.random_bool(0.5) {
                // row shear: [[1, s], [0, 1]] * m
                m = [[m[0][0] + s * m[1][0], m[0][1] + s * m[1][1]], m[1]];
            } else {
                m = [m[0], [m[1][0] + s * m[0][0], m[1][1] + s * m[0][1]]];
            }
        }
        if m.iter().flatten().any(|e| e.abs() > 8) {
            return None;
        }
        (m, k)
    };
    // pick the half-integer target whose image shift is integral
    let targets = [(1i64, 1i64), (2, 1), (1, 2)]; // numerators over 2
    let (tx, ty) = targets.into_iter().find(|&(tx, ty)| {
        (1 - (m[0][0] * tx + m[0][1] * ty)) % 2 == 0 && (1 - (m[1][0] * tx + m[1][1] * ty)) % 2 == 0
    })?;
    let zx = (1 - (m[0][0] * tx + m[0][1] * ty)) / 2;
    let zy = (1 - (m[1][0] * tx + m[1][1] * ty)) / 2;
    let apply = |p: &Point2| {
        Point2::new(
            rat_i(m[0][0]) * &p.x + rat_i(m[0][1]) * &p.y + rat_i(zx),
            rat_i(m[1][0]) * &p.x + rat_i(m[1][1]) * &p.y + rat_i(zy),
        )
    };
    let body = ConvexBody2::polygon(canonical.iter().map(apply).collect()).ok()?;
    let set = LatticeFreeSet::new(body).ok()?;
    let descriptor = format!(
        "U=[[{},{}],[{},{}]] z=({zx},{zy}) shears={shear_count}",
        m[0][0], m[0][1], m[1][0], m[1][1]
    );
    Some((set, descriptor))
}

/// Triangle bounded by an axis line holding two lattice points and two
/// slanted edges through the other two, rotated by a random quarter turn
/// about (1/2, 1/2).
fn separating_edge_triangle(rng: &mut ChaCha8Rng) -> Option<(LatticeFreeSet, String)> {
    let qv: i64 = rng.random_range(5..=40);
    let pv: i64 = rng.random_range(1..qv);
    let v = rat(pv, qv);
    let qw: i64 = rng.random_range(2..=20);
    let pw: i64 = rng.random_range(1..=6 * qw);
    let w = rat(pw, qw);
    let one = rat_i(1);
    let apex = Point2::new(-(&v + &w).recip(), &v / (&v + &w));
    let verts = vec![
        apex,
        Point2::new(one.clone(), -v.clone()),
        Point2::new(one.clone(), &w + &one),
    ];
    let k = rng.random_range(0..4u8);
    let rotated: Vec<Point2> = verts
        .into_iter()
        .map(|p| rotate_quarter_turns(&p, k))
        .collect();
    let body = ConvexBody2::polygon(rotated).ok()?;
    let set = LatticeFreeSet::new(body).ok()?;
    Some((set, format!("v={v} w={w} rot={k}")))
}

/// k quarter turns about (1/2, 1/2): (x, y) -> (y, 1 - x).
fn rotate_quarter_turns(p: &Point2, k: u8) -> Point2 {
    let mut q = p.clone();
    for _ in 0..k {
        q = Point2::new(q.y.clone(), rat_i(1) - &q.x);
    }
    q
}

fn family_f_sample(rng: &mut ChaCha8Rng) -> Option<(LatticeFreeSet, String)> {
    let qu: i64 = rng.random_range(4..=24);
    let pu: i64 = rng.random_range(1..=3 * qu);
    let u = rat_i(1) + rat(pu, qu);
    let qv: i64 = rng.random_range(5..=40);
    let pv: i64 = rng.random_range(1..qv);
    let v = rat(pv, qv);
    let qw: i64 = rng.random_range(4..=20);
    let pw: i64 = rng.random_range(1..=4 * qw);
    let w = rat(pw, qw);
    let params = SlopeParams::new(u.clone(), v.clone(), w.clone()).ok()?;
    let tri = family_f_triangle(&params).ok()?;
    let set = tri.into_set()?;
    let (set, reflected) = if rng.random_bool(0.5) {
        (reflect_about_diagonal(&set), true)
    } else {
        (set, false)
    };
    Some((set, format!("u={u} v={v} w={w} reflected={reflected}")))
}

/// One membership row: the cut activity of (m,...,m) against sample B.
#[derive(Clone, Debug)]
pub struct MembershipRow {
    pub sample_id: usize,
    pub family: SampleFamily,
    /// sum_i psi_B(r_i) * m
    pub total: Rat,
    /// total - 1; nonnegative exactly when the point satisfies B's cut.
    pub slack: Rat,
}

#[derive(Clone, Debug, Default)]
pub struct ClosureMembershipReport {
    pub rows: Vec<MembershipRow>,
    pub min_slack: Option<Rat>,
    pub skipped: usize,
}

/// For each sample B computes sum_i psi_B(r_i) * m exactly, where the r_i
/// are the corner rays of the subclass quadrilateral at t. Samples whose
/// interior misses f are skipped and counted.
pub fn closure_membership_check(
    t: &Rat,
    samples: &[TriangleSample],
) -> Result<ClosureMembershipReport> {
    let quantities = g_quantities(t)?;
    let quad = subclass_g_quad(t)?;
    let rays = quad.rays();
    let f = quad.f.clone();
    let one = rat_i(1);

    let evaluated: Vec<Option<MembershipRow>> = samples
        .par_iter()
        .map(|sample| {
            if !sample.set.body().contains_interior(&f) {
                return None;
            }
            let mut total = rat_i(0);
            for r in &rays {
                let p = psi(&sample.set, &f, r).ok()?;
                total += p;
            }
            total *= &quantities.m;
            let slack = &total - &one;
            Some(MembershipRow {
                sample_id: sample.id,
                family: sample.family,
                total,
                slack,
            })
        })
        .collect();

    let mut report = ClosureMembershipReport::default();
    for row in evaluated {
        match row {
            Some(r) => {
                if report
                    .min_slack
                    .as_ref()
                    .map_or(true, |cur| &r.slack < cur)
                {
                    report.min_slack = Some(r.slack.clone());
                }
                report.rows.push(r);
            }
            None => report.skipped += 1,
        }
    }
    Ok(report)
}

/// Exact audit record of the basis-combination inequalities for one
/// sample triangle.
#[derive(Clone, Debug)]
pub struct CaseAudit {
    pub psi: [Rat; 4],
    pub lambda1: Rat,
    pub lambda2: Rat,
    pub threshold1: Rat,
    pub threshold2: Rat,
    /// lambda2 psi1 + lambda1 psi2 (from (1,0) outside the interior).
    pub ref1: Rat,
    /// lambda2 psi3 + lambda1 psi4 (from (0,1) outside the interior).
    pub ref2: Rat,
    /// lambda1 psi3 + lambda2 psi2 ((0,0) side alignment).
    pub ref5: Rat,
    /// lambda1 psi4 + lambda2 psi3 ((0,1) side alignment).
    pub ref6: Rat,
    /// Sample has a vertical edge on x1 = 1 covering [0, 1].
    pub separating_edge_x1: bool,
    /// psi1 equals threshold1 exactly (exit on x1 = 1).
    pub ref4_tight: bool,
}

pub fn case_inequality_audit(t: &Rat, set: &LatticeFreeSet) -> Result<CaseAudit> {
    let quantities = g_quantities(t)?;
    let quad = subclass_g_quad(t)?;
    let rays = quad.rays();
    let f = &quad.f;
    if !set.body().contains_interior(f) {
        return Err(Error::NotInterior);
    }
    let psi_vals: Vec<Rat> = rays
        .iter()
        .map(|r| psi(set, f, r))
        .collect::<Result<Vec<_>>>()?;
    let psi: [Rat; 4] = psi_vals.try_into().expect("four rays");
    let l1 = &quantities.lambda1;
    let l2 = &quantities.lambda2;
    let ref1 = l2 * &psi[0] + l1 * &psi[1];
    let ref2 = l2 * &psi[2] + l1 * &psi[3];
    let ref5 = l1 * &psi[2] + l2 * &psi[1];
    let ref6 = l1 * &psi[3] + l2 * &psi[2];
    let separating_edge_x1 = has_separating_edge_x1(set);
    let ref4_tight = psi[0] == quantities.threshold1;
    Ok(CaseAudit {
        psi,
        lambda1: quantities.lambda1.clone(),
        lambda2: quantities.lambda2.clone(),
        threshold1: quantities.threshold1.clone(),
        threshold2: quantities.threshold2.clone(),
        ref1,
        ref2,
        ref5,
        ref6,
        separating_edge_x1,
        ref4_tight,
    })
}

fn has_separating_edge_x1(set: &LatticeFreeSet) -> bool {
    let one = rat_i(1);
    match set.body() {
        ConvexBody2::Polygon(p) => p.edges().any(|(a, b)| {
            a.x == one && b.x == one && {
                let (lo, hi) = if a.y <= b.y {
                    (&a.y, &b.y)
                } else {
                    (&b.y, &a.y)
                };
                lo <= &rat_i(0) && hi >= &one
            }
        }),
        ConvexBody2::Strip(_) => false,
    }
}

/// Constructed family for the alignment audit: the triangle with apex on
/// the third corner ray at scale mu, bounded by the lines from the apex
/// through (0,0) and (0,1) and by x1 = 1. Valid for apex strictly left of
/// the y-axis with height in (0, 1); the apex at scale 1/threshold2 is
/// the exact tightness witness.
pub fn separating_apex_triangle(t: &Rat, mu: &Rat) -> Result<LatticeFreeSet> {
    let quad = subclass_g_quad(t)?;
    let r3 = quad.vertices[2].sub(&quad.f);
    let apex = quad.f.add(&r3.scale(mu));
    if !num_traits::Signed::is_negative(&apex.x) {
        return Err(Error::InvalidParam(
            "apex must lie strictly left of the y-axis".into(),
        ));
    }
    let one = rat_i(1);
    if !(apex.y > rat_i(0) && apex.y < one) {
        return Err(Error::InvalidParam("apex height must lie in (0, 1)".into()));
    }
    let y_lo = &apex.y / &apex.x; // line through the origin at x1 = 1
    let y_hi = &one + (&apex.y - &one) / &apex.x; // line through (0,1) at x1 = 1
    let body = ConvexBody2::polygon(vec![
        apex,
        Point2::new(one.clone(), y_lo),
        Point2::new(one.clone(), y_hi),
    ])?;
    LatticeFreeSet::new(body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom2d::coords_in_ray_basis;

    #[test]
    fn quantities_published_instance() {
        let g = g_quantities(&rat_i(2)).unwrap();
        assert_eq!(g.a, rat(2, 5));
        assert_eq!(g.b, rat(1, 5));
        assert_eq!(g.lambda1, rat(2, 3));
        assert_eq!(g.lambda2, rat(1, 3));
        assert_eq!(g.threshold1, rat(9, 5));
        assert_eq!(g.threshold2, rat(6, 5));
        assert_eq!(g.pprime_x, rat(-1, 4));
        assert_eq!(g.m, rat(2, 9));
        assert_eq!(g.q, rat(9, 8));
    }

    #[test]
    fn quantities_diamond() {
        let g = g_quantities(&rat_i(1)).unwrap();
        assert_eq!(g.lambda1, rat(1, 2));
        assert_eq!(g.lambda2, rat(1, 2));
        assert_eq!(g.m, rat(1, 4));
        assert_eq!(g.q, rat_i(1));
    }

    #[test]
    fn lambda_matches_basis_coordinates() {
        // (lambda1, lambda2) are the coordinates of (1,1) in basis (r1, r4)
        let quad = subclass_g_quad(&rat_i(2)).unwrap();
        let g = g_quantities(&rat_i(2)).unwrap();
        let rays = quad.rays();
        let (l1, l2) = coords_in_ray_basis(&Point2::from_ints(1, 1), &quad.f, &rays[0], &rays[3])
            .unwrap();
        assert_eq!((l1, l2), (g.lambda1.clone(), g.lambda2.clone()));
        // and of (1,0) in (r2, r1), (0,0) in (r3, r2), (0,1) in (r4, r3)
        for (point, ia, ib) in [
            (Point2::from_ints(1, 0), 1, 0),
            (Point2::from_ints(0, 0), 2, 1),
            (Point2::from_ints(0, 1), 3, 2),
        ] {
            let (x, y) = coords_in_ray_basis(&point, &quad.f, &rays[ia], &rays[ib]).unwrap();
            assert_eq!((x, y), (g.lambda1.clone(), g.lambda2.clone()));
        }
        // reconstruction: f + lambda1 r1 + lambda2 r4 = (1,1)
        let back = quad
            .f
            .add(&rays[0].scale(&g.lambda1))
            .add(&rays[3].scale(&g.lambda2));
        assert_eq!(back, Point2::from_ints(1, 1));
    }

    #[test]
    fn q_closed_form_examples() {
        assert_eq!(q_closed_form(&rat_i(2)).unwrap(), rat(9, 8));
        assert_eq!(q_closed_form(&rat_i(1)).unwrap(), rat_i(1));
        // strictly below the maximum away from t = 2
        for t in [rat_i(1), rat(3, 2), rat_i(3), rat_i(5)] {
            assert!(q_closed_form(&t).unwrap() < rat(9, 8));
        }
        assert_eq!(q_closed_form(&rat(3, 2)).unwrap(), rat(10, 9));
        // above 1 in a neighborhood of t = 2
        assert!(q_closed_form(&rat(9, 5)).unwrap() > rat_i(1));
        assert!(q_closed_form(&rat(11, 5)).unwrap() > rat_i(1));
        assert!(q_closed_form(&rat_i(0)).is_err());
    }

    #[test]
    fn q_assembled_equals_closed_form() {
        for n in [1i64, 2, 3, 5, 7, 11, 15, 29] {
            for d in [1i64, 2, 3, 7] {
                let t = rat(n, d);
                if t < rat_i(1) {
                    // the assembled route can degenerate below t = 1
                    if let Ok(g) = g_quantities(&t) {
                        assert_eq!(g.q, q_closed_form(&t).unwrap());
                    }
                } else {
                    assert_eq!(g_quantities(&t).unwrap().q, q_closed_form(&t).unwrap());
                }
            }
        }
    }

    #[test]
    fn q_times_4m_is_one() {
        for t in [rat_i(1), rat(7, 5), rat_i(2), rat(17, 3)] {
            let g = g_quantities(&t).unwrap();
            assert_eq!(&g.q * rat_i(4) * &g.m, rat_i(1));
        }
    }

    #[test]
    fn lambda_order() {
        // lambda1 = lambda2 exactly at t = 1 (b = 1/2); strictly above for t > 1
        let eq = g_quantities(&rat_i(1)).unwrap();
        assert_eq!(eq.lambda1, eq.lambda2);
        for t in [rat(6, 5), rat_i(2), rat_i(9)] {
            let g = g_quantities(&t).unwrap();
            assert!(g.lambda1 > g.lambda2);
            assert!(g.lambda2 > rat_i(0));
        }
    }

    #[test]
    fn maximize_q_small_grid() {
        let grid = Linspace::new(rat(1, 2), rat_i(4), 8); // includes t = 2
        let max = maximize_q(&grid, 2).unwrap();
        assert_eq!(max.t_star, rat_i(2));
        assert_eq!(max.q_star, rat(9, 8));
        assert!(maximize_q(&Linspace::new(rat_i(1), rat_i(1), 0), 0).is_err());
    }

    #[test]
    fn samples_deterministic_and_valid() {
        let a = triangle_samples(30, 7).unwrap();
        let b = triangle_samples(30, 7).unwrap();
        assert_eq!(a.failures, 0);
        assert_eq!(a.samples.len(), 30);
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert_eq!(x.descriptor, y.descriptor);
            assert_eq!(x.family, y.family);
        }
        let f = Point2::from_pairs((1, 2), (1, 2));
        for s in &a.samples {
            assert!(is_maximal_lattice_free(s.set.body()));
            assert!(s.set.body().contains_interior(&f));
        }
        // index 0 is the canonical triangle for any seed
        let c = triangle_samples(1, 999).unwrap();
        match c.samples[0].set.body() {
            ConvexBody2::Polygon(p) => {
                assert!(p.vertices().contains(&Point2::from_ints(0, 0)));
                assert!(p.vertices().contains(&Point2::from_ints(2, 0)));
                assert!(p.vertices().contains(&Point2::from_ints(0, 2)));
            }
            _ => panic!("expected polygon"),
        }
    }

    #[test]
    fn membership_canonical_triangle() {
        let batch = triangle_samples(1, 1).unwrap();
        let report = closure_membership_check(&rat_i(2), &batch.samples).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.rows[0].total, rat(6, 5));
        assert_eq!(report.rows[0].slack, rat(1, 5));
        assert_eq!(report.skipped, 0);
    }

    #[test]
    fn audit_canonical_triangle() {
        let batch = triangle_samples(1, 1).unwrap();
        let audit = case_inequality_audit(&rat_i(2), &batch.samples[0].set).unwrap();
        assert_eq!(
            audit.psi,
            [rat(6, 5), rat(9, 5), rat(9, 5), rat(3, 5)]
        );
        assert_eq!(audit.ref1, rat(8, 5));
        assert_eq!(audit.ref2, rat_i(1));
        assert!(audit.ref1 >= rat_i(1));
        assert!(audit.ref2 >= rat_i(1));
        assert!(!audit.separating_edge_x1);
    }

    #[test]
    fn apex_witness_is_exactly_tight() {
        // apex at P' (mu = 1/threshold2): the sample where (m,m,m,m) sits
        // exactly on the cut
        let g = g_quantities(&rat_i(2)).unwrap();
        let mu = g.threshold2.recip();
        assert_eq!(mu, rat(5, 6));
        let set = separating_apex_triangle(&rat_i(2), &mu).unwrap();
        let audit = case_inequality_audit(&rat_i(2), &set).unwrap();
        let total: Rat = audit.psi.iter().sum();
        assert_eq!(&total * &g.m, rat_i(1)); // slack exactly zero
        assert_eq!(audit.psi[2], g.threshold2);
        assert!(audit.separating_edge_x1);
        assert!(audit.ref4_tight);
        assert_eq!(audit.ref5, rat_i(1));
        assert_eq!(audit.ref6, rat_i(1));
    }

    #[test]
    fn apex_family_case2_alignment() {
        // beyond P' (case 2): the separating edge pins psi1 to threshold1
        // and both alignment combinations are exactly 1
        for mu in [rat(8, 9), rat_i(1), rat(6, 5), rat(3, 2)] {
            let set = separating_apex_triangle(&rat_i(2), &mu).unwrap();
            let audit = case_inequality_audit(&rat_i(2), &set).unwrap();
            assert!(audit.psi[2] <= audit.threshold2);
            assert!(audit.ref4_tight, "mu = {mu}");
            assert_eq!(audit.ref5, rat_i(1), "mu = {mu}");
            assert_eq!(audit.ref6, rat_i(1), "mu = {mu}");
            // membership follows: sum psi * m >= 1
            let g = g_quantities(&rat_i(2)).unwrap();
            let total: Rat = audit.psi.iter().sum();
            assert!(&total * &g.m >= rat_i(1));
        }
    }

    #[test]
    fn apex_family_case1_thresholds() {
        // before P' (case 1): psi3 at or above threshold2, combinations >= 1
        for mu in [rat(2, 3), rat(7, 10), rat(4, 5)] {
            let set = separating_apex_triangle(&rat_i(2), &mu).unwrap();
            let audit = case_inequality_audit(&rat_i(2), &set).unwrap();
            assert!(audit.psi[2] >= audit.threshold2, "mu = {mu}");
            assert!(audit.ref1 >= rat_i(1), "mu = {mu}");
            assert!(audit.ref2 >= rat_i(1), "mu = {mu}");
        }
    }

    #[test]
    fn membership_rotation_symmetry() {
        // rotating a sample a quarter turn about f permutes the psi values
        let batch = triangle_samples(12, 3).unwrap();
        let quad = subclass_g_quad(&rat_i(2)).unwrap();
        let rays = quad.rays();
        for s in &batch.samples {
            let rotated = match s.set.body() {
                ConvexBody2::Polygon(p) => {
                    let vs = p
                        .vertices()
                        .iter()
                        .map(|v| rotate_quarter_turns(v, 1))
                        .collect();
                    LatticeFreeSet::new(ConvexBody2::polygon(vs).unwrap()).unwrap()
                }
                _ => continue,
            };
            let original: Vec<Rat> = rays
                .iter()
                .map(|r| psi(&s.set, &quad.f, r).unwrap())
                .collect();
            let image: Vec<Rat> = rays
                .iter()
                .map(|r| psi(&rotated, &quad.f, r).unwrap())
                .collect();
            // rotation maps ray i to ray i+1, so the value lists cycle
            for i in 0..4 {
                assert_eq!(original[i], image[(i + 1) % 4]);
            }
        }
    }
}
