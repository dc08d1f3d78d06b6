//! Gauge functions of maximal lattice-free sets and the cuts they induce.
//!
//! For a set B with f in its interior, psi(r) is the reciprocal of the
//! scale at which the ray f + lambda r leaves B, and 0 for recession
//! directions. Evaluating psi on the instance rays yields the cut
//! `sum psi(r_j) s_j >= 1`.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::geom2d::{rat_i, rat_is_integer, ray_boundary_scale, Point2, Rat};
use crate::latticefree::{point_from_dto, point_to_dto, rat_from_dto, rat_to_dto, RatDto};
use crate::latticefree::LatticeFreeSet;
use crate::{Error, Result};

/// Fractional point and ray list defining R_f(r_1, ..., r_k).
#[derive(Clone, Debug)]
pub struct RcpInstance {
    pub f: Point2,
    pub rays: Vec<Point2>,
}

impl RcpInstance {
    pub fn new(f: Point2, rays: Vec<Point2>) -> Result<Self> {
        if rat_is_integer(&f.x) && rat_is_integer(&f.y) {
            return Err(Error::InvalidParam(
                "f must have a non-integral coordinate".into(),
            ));
        }
        if rays.is_empty() {
            return Err(Error::InvalidParam("instance needs at least one ray".into()));
        }
        if rays.iter().any(Point2::is_zero) {
            return Err(Error::ZeroRay);
        }
        Ok(RcpInstance { f, rays })
    }
}

/// Cut coefficient vector with implicit right-hand side 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutInequality {
    pub coeffs: Vec<Rat>,
}

impl CutInequality {
    pub fn rhs(&self) -> Rat {
        rat_i(1)
    }
}

/// Gauge value psi_B(r) for f strictly interior to the set.
pub fn psi(set: &LatticeFreeSet, f: &Point2, r: &Point2) -> Result<Rat> {
    match ray_boundary_scale(set.body(), f, r)? {
        Some(lambda) => Ok(lambda.recip()),
        None => Ok(rat_i(0)),
    }
}

/// The intersection cut of `set` for the given instance.
pub fn cut(set: &LatticeFreeSet, instance: &RcpInstance) -> Result<CutInequality> {
    let coeffs = instance
        .rays
        .iter()
        .map(|r| psi(set, &instance.f, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(CutInequality { coeffs })
}

/// Convex-combination witness for one dropped ray.
#[derive(Clone, Debug)]
pub struct DroppedRayCombo {
    pub dropped: usize,
    pub corner_a: usize,
    pub corner_b: usize,
    /// r_dropped = lambda * r_a + (1 - lambda) * r_b, exactly.
    pub lambda: Rat,
}

#[derive(Clone, Debug, Default)]
pub struct ReductionCertificate {
    pub combos: Vec<DroppedRayCombo>,
}

/// Restricts the instance to the corner rays, verifying exactly that every
/// dropped ray is a convex combination of two corner rays. The certificate
/// lists one witness per dropped ray (first corner pair in index order).
pub fn corner_ray_reduce(
    instance: &RcpInstance,
    corner_indices: &[usize],
) -> Result<(RcpInstance, ReductionCertificate)> {
    let k = instance.rays.len();
    let mut corners: Vec<usize> = corner_indices.to_vec();
    corners.sort_unstable();
    corners.dedup();
    if corners.iter().any(|&i| i >= k) {
        return Err(Error::InvalidParam("corner index out of range".into()));
    }
    if corners.is_empty() {
        return Err(Error::InvalidParam("corner set must be nonempty".into()));
    }

    let mut cert = ReductionCertificate::default();
    for j in 0..k {
        if corners.binary_search(&j).is_ok() {
            continue;
        }
        let combo = find_convex_combo(&instance.rays, &corners, j)?;
        cert.combos.push(combo);
    }
    let reduced = RcpInstance::new(
        instance.f.clone(),
        corners.iter().map(|&i| instance.rays[i].clone()).collect(),
    )?;
    Ok((reduced, cert))
}

fn find_convex_combo(rays: &[Point2], corners: &[usize], j: usize) -> Result<DroppedRayCombo> {
    let one = rat_i(1);
    let target = &rays[j];
    for (pi, &a) in corners.iter().enumerate() {
        for &b in &corners[pi + 1..] {
            let ra = &rays[a];
            let rb = &rays[b];
            let det = ra.cross(rb);
            if !det.is_zero() {
                let mu_a = target.cross(rb) / &det;
                let mu_b = ra.cross(target) / &det;
                if mu_a >= rat_i(0) && mu_b >= rat_i(0) && &mu_a + &mu_b == one {
                    return Ok(DroppedRayCombo {
                        dropped: j,
                        corner_a: a,
                        corner_b: b,
                        lambda: mu_a,
                    });
                }
            } else {
                // parallel corner pair: target must sit on the segment
                let d = rb.sub(ra);
                if d.is_zero() {
                    if target == ra {
                        return Ok(DroppedRayCombo {
                            dropped: j,
                            corner_a: a,
                            corner_b: b,
                            lambda: one.clone(),
                        });
                    }
                    continue;
                }
                let delta = target.sub(rb);
                if delta.cross(&d).is_zero() {
                    let lam = if !d.x.is_zero() {
                        &delta.x / &d.x
                    } else {
                        &delta.y / &d.y
                    };
                    if lam >= rat_i(0)
                        && lam <= one
                        && *target == rb.add(&d.scale(&lam))
                    {
                        return Ok(DroppedRayCombo {
                            dropped: j,
                            corner_a: a,
                            corner_b: b,
                            lambda: lam,
                        });
                    }
                }
            }
        }
    }
    Err(Error::ReductionInvalid(j))
}

// --- JSON -------------------------------------------------------------
//
// {"f": [[num,den],[num,den]], "rays": [[[num,den],[num,den]], ...]}

#[derive(Serialize, Deserialize)]
struct InstanceDto {
    f: [RatDto; 2],
    rays: Vec<[RatDto; 2]>,
}

pub fn instance_to_json(instance: &RcpInstance) -> serde_json::Value {
    let dto = InstanceDto {
        f: point_to_dto(&instance.f),
        rays: instance.rays.iter().map(point_to_dto).collect(),
    };
    serde_json::to_value(dto).expect("DTO serializes")
}

pub fn instance_from_json(text: &str) -> Result<RcpInstance> {
    let dto: InstanceDto =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad instance JSON: {e}")))?;
    let f = point_from_dto(&dto.f)?;
    let rays = dto
        .rays
        .iter()
        .map(point_from_dto)
        .collect::<Result<Vec<_>>>()?;
    RcpInstance::new(f, rays)
}

#[derive(Serialize, Deserialize)]
struct CutDto {
    coeffs: Vec<RatDto>,
    rhs: RatDto,
}

pub fn cut_to_json(cut: &CutInequality) -> serde_json::Value {
    let dto = CutDto {
        coeffs: cut.coeffs.iter().map(rat_to_dto).collect(),
        rhs: rat_to_dto(&cut.rhs()),
    };
    serde_json::to_value(dto).expect("DTO serializes")
}

pub fn cut_from_json(text: &str) -> Result<CutInequality> {
    let dto: CutDto =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad cut JSON: {e}")))?;
    Ok(CutInequality {
        coeffs: dto
            .coeffs
            .iter()
            .map(rat_from_dto)
            .collect::<Result<Vec<_>>>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom2d::{rat, ConvexBody2};
    use crate::latticefree::{subclass_g_quad, LatticeFreeSet};

    fn half() -> Point2 {
        Point2::from_pairs((1, 2), (1, 2))
    }

    fn unit_split_set() -> LatticeFreeSet {
        LatticeFreeSet::new(
            ConvexBody2::strip(Point2::from_ints(0, 1), rat_i(0), rat_i(1)).unwrap(),
        )
        .unwrap()
    }

    fn canonical_type1_set() -> LatticeFreeSet {
        LatticeFreeSet::new(
            ConvexBody2::polygon(vec![
                Point2::from_ints(0, 0),
                Point2::from_ints(2, 0),
                Point2::from_ints(0, 2),
            ])
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn psi_split_examples() {
        let s = unit_split_set();
        assert_eq!(psi(&s, &half(), &Point2::from_ints(0, 1)).unwrap(), rat_i(2));
        assert_eq!(psi(&s, &half(), &Point2::from_ints(1, 0)).unwrap(), rat_i(0));
    }

    #[test]
    fn psi_corner_ray_is_one() {
        let q = subclass_g_quad(&rat_i(2)).unwrap();
        let set = q.set();
        let r = Point2::from_pairs((9, 10), (3, 10));
        assert_eq!(psi(&set, &q.f, &r).unwrap(), rat_i(1));
        // every boundary vertex x gives psi(x - f) = 1
        for v in &q.vertices {
            assert_eq!(psi(&set, &q.f, &v.sub(&q.f)).unwrap(), rat_i(1));
        }
    }

    #[test]
    fn cut_examples() {
        let q = subclass_g_quad(&rat_i(2)).unwrap();
        let inst = RcpInstance::new(q.f.clone(), q.rays()).unwrap();

        // the quadrilateral against its own corner rays: all ones
        let self_cut = cut(&q.set(), &inst).unwrap();
        assert_eq!(self_cut.coeffs, vec![rat_i(1); 4]);

        // the canonical type-1 triangle against the same rays
        let t1 = canonical_type1_set();
        let c = cut(&t1, &inst).unwrap();
        assert_eq!(c.coeffs, vec![rat(6, 5), rat(9, 5), rat(9, 5), rat(3, 5)]);

        // independent route: each coefficient's exit point is on the boundary
        for (coeff, r) in c.coeffs.iter().zip(&inst.rays) {
            let exit = inst.f.add(&r.scale(&coeff.recip()));
            assert!(t1.body().on_boundary(&exit));
        }

        // split cut with a recession ray
        let s = unit_split_set();
        let inst2 = RcpInstance::new(
            half(),
            vec![Point2::from_ints(0, 1), Point2::from_ints(1, 0)],
        )
        .unwrap();
        assert_eq!(cut(&s, &inst2).unwrap().coeffs, vec![rat_i(2), rat_i(0)]);
    }

    #[test]
    fn cut_scaling_homogeneity() {
        let t1 = canonical_type1_set();
        let r = Point2::from_pairs((9, 10), (3, 10));
        let doubled = r.scale(&rat_i(2));
        let p1 = psi(&t1, &half(), &r).unwrap();
        let p2 = psi(&t1, &half(), &doubled).unwrap();
        assert_eq!(p2, p1 * rat_i(2));
    }

    #[test]
    fn reduce_midpoint() {
        let r1 = Point2::from_ints(1, 0);
        let r2 = Point2::from_ints(0, 1);
        let mid = r1.add(&r2).scale(&rat(1, 2));
        let inst = RcpInstance::new(half(), vec![r1.clone(), r2.clone(), mid]).unwrap();
        let (reduced, cert) = corner_ray_reduce(&inst, &[0, 1]).unwrap();
        assert_eq!(reduced.rays, vec![r1, r2]);
        assert_eq!(cert.combos.len(), 1);
        assert_eq!(cert.combos[0].dropped, 2);
        assert_eq!(cert.combos[0].lambda, rat(1, 2));
    }

    #[test]
    fn reduce_identity_and_failure() {
        let inst = RcpInstance::new(
            half(),
            vec![Point2::from_ints(1, 0), Point2::from_ints(0, 1)],
        )
        .unwrap();
        let (same, cert) = corner_ray_reduce(&inst, &[0, 1]).unwrap();
        assert_eq!(same.rays.len(), 2);
        assert!(cert.combos.is_empty());

        // a ray outside the corner cone cannot be reduced
        let bad = RcpInstance::new(
            half(),
            vec![
                Point2::from_ints(1, 0),
                Point2::from_ints(0, 1),
                Point2::from_ints(-1, -1),
            ],
        )
        .unwrap();
        assert!(matches!(
            corner_ray_reduce(&bad, &[0, 1]),
            Err(Error::ReductionInvalid(2))
        ));

        // nonnegative combination that is not convex (coefficients sum to 2)
        let stretched = RcpInstance::new(
            half(),
            vec![
                Point2::from_ints(1, 0),
                Point2::from_ints(0, 1),
                Point2::from_ints(1, 1),
            ],
        )
        .unwrap();
        assert!(matches!(
            corner_ray_reduce(&stretched, &[0, 1]),
            Err(Error::ReductionInvalid(2))
        ));
    }

    #[test]
    fn instance_validation() {
        assert!(RcpInstance::new(Point2::from_ints(1, 1), vec![Point2::from_ints(1, 0)]).is_err());
        assert!(RcpInstance::new(half(), vec![]).is_err());
        assert!(RcpInstance::new(half(), vec![Point2::from_ints(0, 0)]).is_err());
    }

    #[test]
    fn json_round_trips() {
        let q = subclass_g_quad(&rat_i(2)).unwrap();
        let inst = RcpInstance::new(q.f.clone(), q.rays()).unwrap();
        let text = serde_json::to_string(&instance_to_json(&inst)).unwrap();
        let back = instance_from_json(&text).unwrap();
        assert_eq!(back.f, inst.f);
        assert_eq!(back.rays, inst.rays);

        let c = cut(&q.set(), &inst).unwrap();
        let text = serde_json::to_string(&cut_to_json(&c)).unwrap();
        assert_eq!(cut_from_json(&text).unwrap(), c);
    }
}
