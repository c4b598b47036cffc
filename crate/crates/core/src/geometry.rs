//! Point-process sampling and planar circle-intersection kernels.
//!
//! The load analysis reduces to Poisson probabilities of point counts in
//! regions built from two and three circles that share a common point (an AP
//! lies on every circle whose radius is a user-to-AP distance). This module
//! provides those area kernels plus uniform disk (binomial) and Poisson
//! point-process samplers.
//!
//! Angle conventions for the kernels:
//!
//! * [`aoi2`]`(r_o, d_x, v_x)` — circle 1 is centered at a reference point
//!   `o` with radius `r_o`; the second circle's center `x` sits at distance
//!   `d_x` from `o`; `v_x` is the angle at `o` between the common point and
//!   `x`. The second radius follows from the law of cosines.
//! * [`aoi3`]`(r_o, r_x, r_y, v_x, v_y)` — all three circles pass through a
//!   common point; the arguments are the three radii (= center distances
//!   from the common point) and the angles at the common point between the
//!   first center direction and the other two.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    /// Coincident centers or a zero-length chord direction: the half-angle
    /// is undefined.
    #[error("degenerate-configuration: {0}")]
    DegenerateConfiguration(&'static str),
    /// Inputs that cannot describe circles through a common point.
    #[error("invalid-configuration: {0}")]
    InvalidConfiguration(&'static str),
}

/// A point in the plane, coordinates in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub fn new(x: f64, y: f64) -> Self {
        debug_assert!(x.is_finite() && y.is_finite());
        Self { x, y }
    }

    pub const ORIGIN: Point2D = Point2D { x: 0.0, y: 0.0 };

    pub fn distance_sq(&self, other: &Point2D) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn distance(&self, other: &Point2D) -> f64 {
        self.distance_sq(other).sqrt()
    }
}

/// A disk-shaped deployment region.
#[derive(Debug, Clone, Copy)]
pub struct DiskRegion {
    pub center: Point2D,
    pub radius: f64,
}

impl DiskRegion {
    pub fn new(center: Point2D, radius: f64) -> Self {
        assert!(radius > 0.0, "disk radius must be positive");
        Self { center, radius }
    }

    pub fn centered(radius: f64) -> Self {
        Self::new(Point2D::ORIGIN, radius)
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    pub fn contains(&self, p: &Point2D) -> bool {
        self.center.distance_sq(p) <= self.radius * self.radius * (1.0 + 1e-12)
    }
}

/// Which spatial model produced a realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeploymentModel {
    /// Fixed numbers of APs and users, uniform on the region.
    Bpp { aps: usize, users: usize },
    /// Independent homogeneous Poisson processes, intensities in points/m^2.
    Ppp { lambda_r: f64, lambda_u: f64 },
}

/// One sampled network: AP and user positions inside a disk.
#[derive(Debug, Clone)]
pub struct NetworkRealization {
    pub aps: Vec<Point2D>,
    pub users: Vec<Point2D>,
    pub region: DiskRegion,
    pub model: DeploymentModel,
}

impl NetworkRealization {
    pub fn sample_bpp_network(
        n_aps: usize,
        n_users: usize,
        region: DiskRegion,
        rng: &mut impl Rng,
    ) -> Self {
        Self {
            aps: sample_bpp(n_aps, &region, rng),
            users: sample_bpp(n_users, &region, rng),
            region,
            model: DeploymentModel::Bpp {
                aps: n_aps,
                users: n_users,
            },
        }
    }

    pub fn sample_ppp_network(
        lambda_r: f64,
        lambda_u: f64,
        region: DiskRegion,
        rng: &mut impl Rng,
    ) -> Self {
        Self {
            aps: sample_ppp(lambda_r, &region, rng),
            users: sample_ppp(lambda_u, &region, rng),
            region,
            model: DeploymentModel::Ppp { lambda_r, lambda_u },
        }
    }
}

/// Draw `count` i.i.d. uniform points on the disk.
///
/// Radius uses the square-root inverse transform, so the result is exactly
/// uniform with no rejection loop.
pub fn sample_bpp(count: usize, region: &DiskRegion, rng: &mut impl Rng) -> Vec<Point2D> {
    (0..count)
        .map(|_| {
            let r = region.radius * rng.gen::<f64>().sqrt();
            let theta = rng.gen::<f64>() * 2.0 * PI;
            Point2D::new(
                region.center.x + r * theta.cos(),
                region.center.y + r * theta.sin(),
            )
        })
        .collect()
}

/// Draw a homogeneous Poisson point process of the given intensity
/// (points/m^2) on the disk: Poisson count, then uniform placement.
pub fn sample_ppp(density: f64, region: &DiskRegion, rng: &mut impl Rng) -> Vec<Point2D> {
    debug_assert!(density >= 0.0);
    let mean = density * region.area();
    if mean <= 0.0 {
        return Vec::new();
    }
    let count = Poisson::new(mean).expect("positive mean").sample(rng) as usize;
    sample_bpp(count, region, rng)
}

/// Normalize an angle to [0, pi] using periodicity and reflection symmetry.
fn fold_angle(v: f64) -> f64 {
    let mut v = v.rem_euclid(2.0 * PI);
    if v > PI {
        v = 2.0 * PI - v;
    }
    v
}

fn clamp_unit(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}

/// Half-angle subtended at the second point of a triangle with two sides
/// `r1`, `r2` from a common vertex and angle `v` between them:
/// arccos((r2 - r1 cos v) / sqrt(r1^2 + r2^2 - 2 r1 r2 cos v)).
///
/// Geometrically: with `A` at distance `r1` and `B` at distance `r2` from a
/// vertex `O`, and angle `v` = ∠AOB, this is the angle at `B` between `B→A`
/// and `B→O`. It is the second chord half-angle in [`aoi2`].
pub fn half_angle_u(r1: f64, r2: f64, v: f64) -> Result<f64, GeometryError> {
    if r1 == 0.0 && r2 == 0.0 {
        return Err(GeometryError::DegenerateConfiguration(
            "both lengths zero in half-angle",
        ));
    }
    let c = v.cos();
    let den_sq = r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * c;
    let scale = (r1 + r2) * (r1 + r2);
    if !(den_sq > scale * 1e-24) {
        return Err(GeometryError::DegenerateConfiguration(
            "zero chord denominator in half-angle",
        ));
    }
    Ok(clamp_unit((r2 - r1 * c) / den_sq.sqrt()).acos())
}

/// Circular segment area for half-angle `theta` in [0, pi].
#[inline]
fn segment(r: f64, theta: f64) -> f64 {
    r * r * (theta - 0.5 * (2.0 * theta).sin())
}

/// Area of intersection of two circles that share a common point.
///
/// Circle 1 is centered at `o` with radius `r_o`; the second center lies at
/// distance `d_x` from `o` and the angle at `o` between the common point and
/// the second center is `v_x` (any real angle; the area is symmetric under
/// `v_x -> 2 pi - v_x`). The second radius is `sqrt(r_o^2 + d_x^2 -
/// 2 r_o d_x cos v_x)`. Coincident centers (`d_x = 0`) give full overlap.
pub fn aoi2(r_o: f64, d_x: f64, v_x: f64) -> f64 {
    debug_assert!(r_o > 0.0, "first radius must be positive");
    debug_assert!(d_x >= 0.0, "center distance must be nonnegative");
    let v = fold_angle(v_x);
    if d_x == 0.0 {
        return PI * r_o * r_o;
    }
    let r_x_sq = r_o * r_o + d_x * d_x - 2.0 * r_o * d_x * v.cos();
    let r_x = r_x_sq.max(0.0).sqrt();
    if r_x <= (r_o + d_x) * 1e-12 {
        // Second circle collapses to a point (common point at the center line).
        return 0.0;
    }
    let u = half_angle_u(r_o, d_x, v).expect("nonzero chord: r_x > 0");
    segment(r_o, v) + segment(r_x, u)
}

/// Area of intersection of two circles given radii and center distance.
///
/// Independent algebraic route to the same quantity as [`aoi2`]; also used
/// directly where a configuration is known by radii and separation.
pub fn circle_overlap_area(r1: f64, r2: f64, d: f64) -> f64 {
    debug_assert!(r1 >= 0.0 && r2 >= 0.0 && d >= 0.0);
    if r1 == 0.0 || r2 == 0.0 {
        return 0.0;
    }
    if d >= r1 + r2 {
        return 0.0;
    }
    if d <= (r1 - r2).abs() {
        let r = r1.min(r2);
        return PI * r * r;
    }
    let t1 = clamp_unit((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).acos();
    let t2 = clamp_unit((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).acos();
    segment(r1, t1) + segment(r2, t2)
}

/// Overlap of two circles that pass through a common point, parameterized by
/// the two radii and the angle `psi` between the center directions as seen
/// from the common point.
pub fn overlap_from_common_point(r1: f64, r2: f64, psi: f64) -> f64 {
    let d_sq = r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * psi.cos();
    circle_overlap_area(r1, r2, d_sq.max(0.0).sqrt())
}

/// Angle at a common AP point between the directions to two user-centered
/// circles.
///
/// Configuration: reference point `o` at the origin, the AP at distance
/// `r_o` from `o`, and two users at polar positions (`d_x`, `v_x`) and
/// (`d_y`, `v_y`) with angles measured at `o` from the AP direction. Each
/// user's circle passes through the AP. The returned angle is the one to
/// pass to [`overlap_from_common_point`] together with the two user-to-AP
/// radii to get the pairwise overlap of the user circles.
///
/// The two per-user angles add when the users lie in opposite half-planes
/// with respect to the `o`-AP axis and subtract otherwise.
pub fn pair_angle_uxy(
    r_o: f64,
    d_x: f64,
    d_y: f64,
    v_x: f64,
    v_y: f64,
) -> Result<f64, GeometryError> {
    // Angle at the AP between AP->o and AP->user, for each user.
    let a_x = half_angle_u(d_x, r_o, v_x)?;
    let a_y = half_angle_u(d_y, r_o, v_y)?;
    let vx = v_x.rem_euclid(2.0 * PI);
    let vy = v_y.rem_euclid(2.0 * PI);
    let mixed = (vx < PI && vy > PI) || (vx > PI && vy < PI);
    Ok(if mixed { a_x + a_y } else { (a_x - a_y).abs() })
}

/// Derived radius of the second circle in the [`aoi2`] parameterization.
pub fn derived_radius(r_o: f64, d_x: f64, v_x: f64) -> f64 {
    (r_o * r_o + d_x * d_x - 2.0 * r_o * d_x * v_x.cos())
        .max(0.0)
        .sqrt()
}

// --- three-circle intersection ----------------------------------------------

const AOI3_REL_TOL: f64 = 1e-9;

#[derive(Clone, Copy)]
struct Circle {
    c: Point2D,
    r: f64,
}

/// Area of intersection of three circles through a common point.
///
/// The circles are specified by their radii (equal to the center distances
/// from the common point) and the angles `v_x`, `v_y` at the common point
/// between the first center direction and the other two. Depending on the
/// configuration the intersection is a point (area 0), a lens, or a circular
/// triangle; all cases are resolved from the pairwise intersection
/// coordinates rather than by formula case analysis.
pub fn aoi3(r_o: f64, r_x: f64, r_y: f64, v_x: f64, v_y: f64) -> Result<f64, GeometryError> {
    for &r in &[r_o, r_x, r_y] {
        if !(r > 0.0) || !r.is_finite() {
            return Err(GeometryError::InvalidConfiguration(
                "radii must be positive and finite",
            ));
        }
    }
    if !v_x.is_finite() || !v_y.is_finite() {
        return Err(GeometryError::InvalidConfiguration("angles must be finite"));
    }
    let circles = [
        Circle {
            c: Point2D::new(r_o, 0.0),
            r: r_o,
        },
        Circle {
            c: Point2D::new(r_x * v_x.cos(), r_x * v_x.sin()),
            r: r_x,
        },
        Circle {
            c: Point2D::new(r_y * v_y.cos(), r_y * v_y.sin()),
            r: r_y,
        },
    ];
    Ok(disks_intersection_area(&circles))
}

/// Intersection points of two circles, if any. Tangency collapses to a
/// single point (returned twice).
fn circle_pair_points(a: &Circle, b: &Circle) -> Option<(Point2D, Point2D)> {
    let d = a.c.distance(&b.c);
    let scale = a.r.max(b.r).max(d);
    if d <= scale * 1e-14 {
        return None; // concentric
    }
    if d > a.r + b.r || d < (a.r - b.r).abs() {
        // Allow a whisker of tolerance before declaring no intersection.
        if d > (a.r + b.r) * (1.0 + AOI3_REL_TOL) || d < (a.r - b.r).abs() * (1.0 - AOI3_REL_TOL) - scale * 1e-12 {
            return None;
        }
    }
    let along = (d * d + a.r * a.r - b.r * b.r) / (2.0 * d);
    let h_sq = a.r * a.r - along * along;
    let h = h_sq.max(0.0).sqrt();
    let ux = (b.c.x - a.c.x) / d;
    let uy = (b.c.y - a.c.y) / d;
    let base = Point2D::new(a.c.x + along * ux, a.c.y + along * uy);
    Some((
        Point2D::new(base.x - h * uy, base.y + h * ux),
        Point2D::new(base.x + h * uy, base.y - h * ux),
    ))
}

fn inside(c: &Circle, p: &Point2D, tol: f64) -> bool {
    c.c.distance(p) <= c.r + tol
}

/// Area of the intersection of a small set of disks (convex region bounded
/// by arcs). Vertices are the pairwise circle intersections that lie in all
/// disks; each boundary edge contributes a chord plus a circular segment.
fn disks_intersection_area(circles: &[Circle]) -> f64 {
    let n = circles.len();
    let scale = circles.iter().map(|c| c.r).fold(0.0f64, f64::max);
    let tol = scale * AOI3_REL_TOL;

    // Candidate vertices with the set of circles each lies on.
    let mut verts: Vec<(Point2D, u32)> = Vec::with_capacity(8);
    for i in 0..n {
        for j in (i + 1)..n {
            let Some((p1, p2)) = circle_pair_points(&circles[i], &circles[j]) else {
                continue;
            };
            'pts: for p in [p1, p2] {
                if !circles.iter().all(|c| inside(c, &p, tol)) {
                    continue;
                }
                let mask = on_circle_mask(circles, &p, tol);
                for (q, m) in verts.iter_mut() {
                    if q.distance(&p) <= 2.0 * tol {
                        *m |= mask;
                        continue 'pts;
                    }
                }
                verts.push((p, mask));
            }
        }
    }

    if verts.len() < 2 {
        // Point-contact or containment: if some disk lies inside all others
        // the intersection is that disk, otherwise the area is zero.
        let mut best: Option<f64> = None;
        for i in 0..n {
            let contained = (0..n).all(|j| {
                j == i || circles[i].c.distance(&circles[j].c) + circles[i].r <= circles[j].r + tol
            });
            if contained {
                best = Some(best.map_or(circles[i].r, |r: f64| r.min(circles[i].r)));
            }
        }
        return best.map_or(0.0, |r| PI * r * r);
    }

    // Sort vertices counterclockwise around their centroid.
    let cx = verts.iter().map(|(p, _)| p.x).sum::<f64>() / verts.len() as f64;
    let cy = verts.iter().map(|(p, _)| p.y).sum::<f64>() / verts.len() as f64;
    verts.sort_by(|a, b| {
        let ta = (a.0.y - cy).atan2(a.0.x - cx);
        let tb = (b.0.y - cy).atan2(b.0.x - cx);
        ta.total_cmp(&tb)
    });

    // Chord polygon area (shoelace) plus one outward segment per edge.
    let m = verts.len();
    let mut area = 0.0;
    for k in 0..m {
        let (pa, _) = verts[k];
        let (pb, _) = verts[(k + 1) % m];
        area += 0.5 * (pa.x * pb.y - pb.x * pa.y);
    }
    // A lens (two vertices) traverses the same chord twice; the outward-bulge
    // test picks a different side, hence a different circle, per direction.
    for k in 0..m {
        let (pa, mask_a) = verts[k];
        let (pb, mask_b) = verts[(k + 1) % m];
        area += edge_segment_area(circles, &pa, &pb, mask_a & mask_b, tol);
    }
    area.max(0.0)
}

fn on_circle_mask(circles: &[Circle], p: &Point2D, tol: f64) -> u32 {
    let mut mask = 0u32;
    for (idx, c) in circles.iter().enumerate() {
        if (c.c.distance(p) - c.r).abs() <= tol {
            mask |= 1 << idx;
        }
    }
    mask
}

/// Segment area bulging outward (to the right of the directed chord a->b in
/// a counterclockwise traversal) for the circle arc bounding that edge.
fn edge_segment_area(
    circles: &[Circle],
    pa: &Point2D,
    pb: &Point2D,
    shared_mask: u32,
    tol: f64,
) -> f64 {
    let mut best: Option<f64> = None;
    for (idx, c) in circles.iter().enumerate() {
        if shared_mask & (1 << idx) == 0 {
            continue;
        }
        let ang_a = (pa.y - c.c.y).atan2(pa.x - c.c.x);
        let ang_b = (pb.y - c.c.y).atan2(pb.x - c.c.x);
        for ccw_from_a in [true, false] {
            let delta = if ccw_from_a {
                (ang_b - ang_a).rem_euclid(2.0 * PI)
            } else {
                (ang_a - ang_b).rem_euclid(2.0 * PI)
            };
            if delta <= 0.0 {
                continue;
            }
            let mid_ang = if ccw_from_a {
                ang_a + 0.5 * delta
            } else {
                ang_a - 0.5 * delta
            };
            let mid = Point2D::new(c.c.x + c.r * mid_ang.cos(), c.c.y + c.r * mid_ang.sin());
            // Must be on the boundary of the intersection...
            if !circles.iter().all(|cc| inside(cc, &mid, tol)) {
                continue;
            }
            // ...and bulge outward: right of the directed chord (or on it).
            let cross = (pb.x - pa.x) * (mid.y - pa.y) - (pb.y - pa.y) * (mid.x - pa.x);
            if cross > tol * (pa.distance(pb) + 1.0) {
                continue;
            }
            let seg = 0.5 * c.r * c.r * (delta - delta.sin());
            best = Some(best.map_or(seg, |b: f64| b.min(seg)));
        }
    }
    best.unwrap_or(0.0)
}
