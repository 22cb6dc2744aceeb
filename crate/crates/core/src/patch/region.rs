use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::SphericalAngles;

/// Points closer than this (in radians) to the boundary count as inside.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// Shape of a patch before the complement flag is applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionKind {
    /// Spherical cap of angular `radius` (radians) around a unit `center`.
    Cap { center: [f64; 3], radius: f64 },
    /// `theta_min ≤ θ ≤ theta_max`, `phi_min ≤ φ ≤ phi_max` (radians, colatitude/longitude).
    LatLonBox {
        theta_min: f64,
        theta_max: f64,
        phi_min: f64,
        phi_max: f64,
    },
    /// Spherical polygon with great-circle edges; vertices counterclockwise seen from outside.
    Polygon { vertices: Vec<[f64; 3]> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Inside,
    Boundary,
    Outside,
}

/// A validated patch `U ⊂ 𝕊` with nonempty interior and nonempty complement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchRegion {
    kind: RegionKind,
    complement: bool,
}

/// Validates a region description.
pub fn make_region(kind: RegionKind, complement: bool) -> Result<PatchRegion> {
    match &kind {
        RegionKind::Cap { center, radius } => {
            let c = Vector3::from(*center);
            if !(c.norm() > 0.0) || !c.iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidRegion("cap center must be a nonzero vector".into()));
            }
            if !(*radius > 0.0 && *radius < PI) {
                return Err(Error::InvalidRegion(format!(
                    "cap radius must lie in (0, π), got {radius}; the region or its complement would be empty"
                )));
            }
        }
        RegionKind::LatLonBox {
            theta_min,
            theta_max,
            phi_min,
            phi_max,
        } => {
            if !(0.0 <= *theta_min && theta_min < theta_max && *theta_max <= PI) {
                return Err(Error::InvalidRegion(format!(
                    "box needs 0 ≤ θ_min < θ_max ≤ π, got [{theta_min}, {theta_max}]"
                )));
            }
            let width = phi_max - phi_min;
            if !(width > 0.0 && width <= 2.0 * PI) {
                return Err(Error::InvalidRegion(format!(
                    "box longitude width must lie in (0, 2π], got {width}"
                )));
            }
            if *theta_min == 0.0 && *theta_max == PI && width >= 2.0 * PI {
                return Err(Error::InvalidRegion("box covers the whole sphere; complement is empty".into()));
            }
        }
        RegionKind::Polygon { vertices } => validate_polygon(vertices)?,
    }
    let kind = match kind {
        RegionKind::Cap { center, radius } => {
            let c = Vector3::from(center).normalize();
            RegionKind::Cap {
                center: [c.x, c.y, c.z],
                radius,
            }
        }
        RegionKind::Polygon { vertices } => RegionKind::Polygon {
            vertices: vertices
                .iter()
                .map(|v| {
                    let u = Vector3::from(*v).normalize();
                    [u.x, u.y, u.z]
                })
                .collect(),
        },
        other => other,
    };
    Ok(PatchRegion { kind, complement })
}

impl PatchRegion {
    pub fn cap(center: Vector3<f64>, radius: f64) -> Result<Self> {
        make_region(
            RegionKind::Cap {
                center: [center.x, center.y, center.z],
                radius,
            },
            false,
        )
    }

    /// Cap around the north pole with radius given in degrees.
    pub fn north_cap_deg(radius_deg: f64) -> Result<Self> {
        Self::cap(Vector3::z(), radius_deg.to_radians())
    }

    pub fn kind(&self) -> &RegionKind {
        &self.kind
    }

    pub fn is_complement(&self) -> bool {
        self.complement
    }

    /// The closure of the complementary region.
    pub fn complement(&self) -> Self {
        Self {
            kind: self.kind.clone(),
            complement: !self.complement,
        }
    }

    /// Membership with boundary points assigned to the region.
    pub fn contains(&self, x: &Vector3<f64>) -> bool {
        match self.classify(x) {
            Side::Boundary => true,
            Side::Inside => !self.complement,
            Side::Outside => self.complement,
        }
    }

    /// Closed-form spherical area (polygons via signed spherical excess).
    pub fn area(&self) -> f64 {
        let base = match &self.kind {
            RegionKind::Cap { radius, .. } => 2.0 * PI * (1.0 - radius.cos()),
            RegionKind::LatLonBox {
                theta_min,
                theta_max,
                phi_min,
                phi_max,
            } => (phi_max - phi_min) * (theta_min.cos() - theta_max.cos()),
            RegionKind::Polygon { vertices } => polygon_area(&to_vecs(vertices)),
        };
        if self.complement {
            4.0 * PI - base
        } else {
            base
        }
    }

    /// Angular distance from `x` to the region (zero inside).
    pub fn distance_outside(&self, x: &Vector3<f64>) -> f64 {
        if self.contains(x) {
            return 0.0;
        }
        let x = x / x.norm();
        match &self.kind {
            RegionKind::Cap { center, radius } => {
                let a = angle(&x, &Vector3::from(*center));
                (a - radius).abs()
            }
            RegionKind::LatLonBox {
                theta_min,
                theta_max,
                phi_min,
                phi_max,
            } => box_boundary_distance(&x, *theta_min, *theta_max, *phi_min, *phi_max),
            RegionKind::Polygon { vertices } => {
                let v = to_vecs(vertices);
                edges(&v).map(|(a, b)| arc_distance(&x, a, b)).fold(f64::INFINITY, f64::min)
            }
        }
    }

    fn classify(&self, x: &Vector3<f64>) -> Side {
        let x = x / x.norm();
        let tol = BOUNDARY_TOLERANCE;
        match &self.kind {
            RegionKind::Cap { center, radius } => {
                let s = angle(&x, &Vector3::from(*center)) - radius;
                if s.abs() <= tol {
                    Side::Boundary
                } else if s < 0.0 {
                    Side::Inside
                } else {
                    Side::Outside
                }
            }
            RegionKind::LatLonBox {
                theta_min,
                theta_max,
                phi_min,
                phi_max,
            } => {
                let ang = SphericalAngles::from_point(&x);
                let theta = ang.theta();
                let width = phi_max - phi_min;
                let rel = (ang.phi() - phi_min).rem_euclid(2.0 * PI);
                let in_theta = theta >= theta_min - tol && theta <= theta_max + tol;
                let in_phi = width >= 2.0 * PI || rel <= width + tol || rel >= 2.0 * PI - tol;
                if !(in_theta && in_phi) {
                    return Side::Outside;
                }
                let d = box_boundary_distance(&x, *theta_min, *theta_max, *phi_min, *phi_max);
                if d <= tol {
                    Side::Boundary
                } else {
                    Side::Inside
                }
            }
            RegionKind::Polygon { vertices } => {
                let v = to_vecs(vertices);
                let d = edges(&v).map(|(a, b)| arc_distance(&x, a, b)).fold(f64::INFINITY, f64::min);
                if d <= tol {
                    return Side::Boundary;
                }
                if winding_angle(&x, &v).abs() > PI {
                    Side::Inside
                } else {
                    Side::Outside
                }
            }
        }
    }
}

fn to_vecs(v: &[[f64; 3]]) -> Vec<Vector3<f64>> {
    v.iter().map(|p| Vector3::from(*p)).collect()
}

fn edges(v: &[Vector3<f64>]) -> impl Iterator<Item = (&Vector3<f64>, &Vector3<f64>)> {
    v.iter().zip(v.iter().cycle().skip(1))
}

pub(crate) fn angle(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Angular distance from `x` to the great-circle arc from `a` to `b` (shorter arc).
fn arc_distance(x: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    let n = a.cross(b);
    let nn = n.norm();
    if nn == 0.0 {
        return angle(x, a);
    }
    let n = n / nn;
    let p = x - n * x.dot(&n);
    if p.norm() > 0.0 && a.cross(&p).dot(&n) >= 0.0 && p.cross(b).dot(&n) >= 0.0 {
        x.dot(&n).abs().min(1.0).asin()
    } else {
        angle(x, a).min(angle(x, b))
    }
}

fn box_boundary_distance(x: &Vector3<f64>, t0: f64, t1: f64, p0: f64, p1: f64) -> f64 {
    let ang = SphericalAngles::from_point(x);
    let theta = ang.theta();
    let width = p1 - p0;
    let rel = (ang.phi() - p0).rem_euclid(2.0 * PI);
    let in_phi = width >= 2.0 * PI || rel <= width;
    let point = |t: f64, p: f64| Vector3::new(t.sin() * p.cos(), t.sin() * p.sin(), t.cos());
    let mut d = f64::INFINITY;
    // a parallel at a pole is a single interior point, not an edge
    for t in [t0, t1] {
        if t == 0.0 || t == PI {
            continue;
        }
        if in_phi {
            d = d.min((theta - t).abs());
        } else {
            d = d.min(angle(x, &point(t, p0))).min(angle(x, &point(t, p1)));
        }
    }
    // meridians
    if width < 2.0 * PI {
        for p in [p0, p1] {
            d = d.min(meridian_distance(x, theta, ang.phi(), t0, t1, p));
        }
    }
    d
}

fn meridian_distance(x: &Vector3<f64>, theta: f64, phi: f64, t0: f64, t1: f64, p: f64) -> f64 {
    // great circle through the poles at longitude p
    let n = Vector3::new(-p.sin(), p.cos(), 0.0);
    let dphi = (phi - p).rem_euclid(2.0 * PI);
    let same_side = !(PI / 2.0..3.0 * PI / 2.0).contains(&dphi);
    if same_side && theta >= t0 && theta <= t1 {
        return x.dot(&n).abs().min(1.0).asin();
    }
    let point = |t: f64| Vector3::new(t.sin() * p.cos(), t.sin() * p.sin(), t.cos());
    let a = point(t0);
    let b = point(t1);
    // the arc may pass closest at an interior point on the same side
    let mut best = angle(x, &a).min(angle(x, &b));
    if same_side {
        let t = theta.clamp(t0, t1);
        best = best.min(angle(x, &point(t)));
    }
    best
}

/// Sum of signed turning angles of the vertices as seen from `x`; ±2π inside, 0 outside.
fn winding_angle(x: &Vector3<f64>, v: &[Vector3<f64>]) -> f64 {
    let proj: Vec<Vector3<f64>> = v.iter().map(|p| p - x * x.dot(p)).collect();
    edges(&proj)
        .map(|(a, b)| {
            let s = x.dot(&a.cross(b));
            let c = a.dot(b);
            s.atan2(c)
        })
        .sum()
}

fn polygon_area(v: &[Vector3<f64>]) -> f64 {
    let a = &v[0];
    let mut total = 0.0;
    for i in 1..v.len() - 1 {
        let (b, c) = (&v[i], &v[i + 1]);
        let num = a.dot(&b.cross(c));
        let den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
        total += 2.0 * num.atan2(den);
    }
    total.abs()
}

fn validate_polygon(vertices: &[[f64; 3]]) -> Result<()> {
    if vertices.len() < 3 {
        return Err(Error::InvalidRegion("polygon needs at least 3 vertices".into()));
    }
    let v: Vec<Vector3<f64>> = vertices
        .iter()
        .map(|p| {
            let u = Vector3::from(*p);
            if u.norm() > 0.0 && u.iter().all(|c| c.is_finite()) {
                Ok(u.normalize())
            } else {
                Err(Error::InvalidRegion("polygon vertex must be a nonzero vector".into()))
            }
        })
        .collect::<Result<_>>()?;
    for (a, b) in edges(&v) {
        if angle(a, b) < 1e-10 {
            return Err(Error::InvalidRegion("polygon has repeated consecutive vertices".into()));
        }
        if angle(a, &-b) < 1e-10 {
            return Err(Error::InvalidRegion("polygon edge joins antipodal vertices".into()));
        }
    }
    let n = v.len();
    let max_det = (0..n)
        .map(|i| v[i].dot(&v[(i + 1) % n].cross(&v[(i + 2) % n])).abs())
        .fold(0.0, f64::max);
    if max_det < 1e-10 {
        return Err(Error::InvalidRegion("polygon vertices lie on one great circle".into()));
    }
    for i in 0..n {
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if arcs_intersect(&v[i], &v[(i + 1) % n], &v[j], &v[(j + 1) % n]) {
                return Err(Error::InvalidRegion(format!(
                    "polygon edges {i} and {j} intersect"
                )));
            }
        }
    }
    if polygon_area(&v) < 1e-12 {
        return Err(Error::InvalidRegion("polygon has zero area".into()));
    }
    Ok(())
}

fn arcs_intersect(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>, d: &Vector3<f64>) -> bool {
    let n1 = a.cross(b);
    let n2 = c.cross(d);
    let t = n1.cross(&n2);
    if t.norm() < 1e-14 {
        return false;
    }
    let t = t.normalize();
    let on_arc = |p: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>| {
        (angle(a, p) + angle(p, b) - angle(a, b)).abs() < 1e-12
    };
    [t, -t].iter().any(|p| on_arc(p, a, b) && on_arc(p, c, d))
}
