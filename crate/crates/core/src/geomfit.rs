//! Prismatic (line) and revolute (circle) models of a hand path.
//!
//! Both fits start from the principal axes of the centered point cloud. The
//! circle is fitted in the best-fit plane with the algebraic (Kåsa) method,
//! which is closed-form but biased toward smaller radii on short, noisy arcs.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::{vec3, Vec3};

/// Prismatic wins unless the circle's normalized residual is at least this
/// fraction lower than the line's.
pub const PRISMATIC_MARGIN: f64 = 0.05;

/// Relative eigenvalue below which the cloud counts as lower-dimensional.
const FLAT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    /// Centroid of the points.
    pub origin: Vec3,
    /// Unit direction, oriented along the traversal from first to last point.
    pub direction: Vec3,
    /// Extent of the projections onto `direction`, meters.
    pub range: f64,
    /// Root-mean-square perpendicular distance, meters.
    pub rms_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleFit {
    pub center: Vec3,
    pub radius: f64,
    /// Unit plane normal, oriented so the traversal is a positive rotation.
    pub axis: Vec3,
    /// Accumulated unsigned sweep from first to last point, radians.
    pub swept_angle: f64,
    /// Root-mean-square 3-D distance to the circle, meters.
    pub rms_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Joint {
    Prismatic(LineFit),
    Revolute(CircleFit),
}

/// Selected joint model together with both candidate residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArticulationModel {
    pub joint: Joint,
    pub line_rms_residual: f64,
    /// `None` when the points are collinear.
    pub circle_rms_residual: Option<f64>,
    /// Largest pairwise distance between points, used to normalize residuals.
    pub extent: f64,
}

impl ArticulationModel {
    pub fn rms_residual(&self) -> f64 {
        match &self.joint {
            Joint::Prismatic(l) => l.rms_residual,
            Joint::Revolute(c) => c.rms_residual,
        }
    }

    pub fn is_prismatic(&self) -> bool {
        matches!(self.joint, Joint::Prismatic(_))
    }
}

struct Principal {
    centroid: Vec3,
    /// Eigenvectors sorted by decreasing variance.
    axes: [Vec3; 3],
    variances: [f64; 3],
}

fn principal_axes(points: &[Vec3]) -> Principal {
    let n = points.len() as f64;
    let mut centroid = [0.0; 3];
    for p in points {
        centroid = vec3::add(centroid, *p);
    }
    centroid = vec3::scale(centroid, 1.0 / n);

    let mut cov = Matrix3::<f64>::zeros();
    for p in points {
        let d = Vector3::from(vec3::sub(*p, centroid));
        cov += d * d.transpose();
    }
    cov /= n;

    let eig = cov.symmetric_eigen();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let col = |k: usize| {
        let c = eig.eigenvectors.column(order[k]);
        let v = [c[0], c[1], c[2]];
        vec3::scale(v, 1.0 / vec3::norm(v))
    };
    Principal {
        centroid,
        axes: [col(0), col(1), col(2)],
        variances: [
            eig.eigenvalues[order[0]].max(0.0),
            eig.eigenvalues[order[1]].max(0.0),
            eig.eigenvalues[order[2]].max(0.0),
        ],
    }
}

fn coincident(points: &[Vec3], pca: &Principal) -> bool {
    let spread = points
        .iter()
        .map(|p| vec3::norm(vec3::sub(*p, pca.centroid)))
        .fold(0.0, f64::max);
    let scale = 1.0 + vec3::norm(pca.centroid);
    spread <= 1e-14 * scale
}

/// Total-least-squares line through the points.
pub fn fit_line(points: &[Vec3]) -> Result<LineFit> {
    if points.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: points.len(),
        });
    }
    let pca = principal_axes(points);
    if coincident(points, &pca) {
        return Err(Error::DegenerateGeometry("all points coincide"));
    }
    let mut direction = pca.axes[0];
    let travel = vec3::sub(points[points.len() - 1], points[0]);
    let along = vec3::dot(travel, direction);
    let flip = if along != 0.0 {
        along < 0.0
    } else {
        // closed path: fall back to a fixed convention
        let k = (0..3)
            .max_by(|&a, &b| direction[a].abs().total_cmp(&direction[b].abs()))
            .unwrap_or(0);
        direction[k] < 0.0
    };
    if flip {
        direction = vec3::scale(direction, -1.0);
    }

    let (mut lo, mut hi, mut sq) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for p in points {
        let d = vec3::sub(*p, pca.centroid);
        let s = vec3::dot(d, direction);
        lo = lo.min(s);
        hi = hi.max(s);
        let perp = vec3::sub(d, vec3::scale(direction, s));
        sq += vec3::dot(perp, perp);
    }
    Ok(LineFit {
        origin: pca.centroid,
        direction,
        range: hi - lo,
        rms_residual: libm::sqrt(sq / points.len() as f64),
    })
}

/// Plane fit, then algebraic circle fit inside the plane.
pub fn fit_circle(points: &[Vec3]) -> Result<CircleFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: points.len(),
        });
    }
    let pca = principal_axes(points);
    if coincident(points, &pca) || pca.variances[1] <= FLAT_TOL * pca.variances[0] {
        return Err(Error::DegenerateGeometry("points are collinear"));
    }
    let [e0, e1, _] = pca.axes;
    let normal = vec3::cross(e0, e1);
    let scale = libm::sqrt(pca.variances[0] + pca.variances[1]);

    // in-plane coordinates, centered and scaled to unit spread
    let uv: Vec<(f64, f64)> = points
        .iter()
        .map(|p| {
            let d = vec3::sub(*p, pca.centroid);
            (vec3::dot(d, e0) / scale, vec3::dot(d, e1) / scale)
        })
        .collect();

    // u^2 + v^2 = A u + B v + C, center (A/2, B/2), r^2 = C + (A^2 + B^2)/4
    let n = uv.len();
    let design = DMatrix::from_fn(n, 3, |r, c| match c {
        0 => uv[r].0,
        1 => uv[r].1,
        _ => 1.0,
    });
    let rhs = DVector::from_fn(n, |r, _| uv[r].0 * uv[r].0 + uv[r].1 * uv[r].1);
    let qr = design.qr();
    let sol = qr
        .r()
        .solve_upper_triangular(&(qr.q().transpose() * &rhs))
        .ok_or(Error::DegenerateGeometry("circle system is singular"))?;
    let (a, b) = (0.5 * sol[0], 0.5 * sol[1]);
    let r2 = sol[2] + a * a + b * b;
    if !(r2.is_finite() && r2 > 0.0) {
        return Err(Error::DegenerateGeometry("circle fit has no real radius"));
    }
    let radius = scale * libm::sqrt(r2);
    let center = vec3::add(
        pca.centroid,
        vec3::add(vec3::scale(e0, scale * a), vec3::scale(e1, scale * b)),
    );

    let mut sweep = 0.0;
    let mut prev = libm::atan2(uv[0].1 - b, uv[0].0 - a);
    for &(u, v) in &uv[1..] {
        let ang = libm::atan2(v - b, u - a);
        let mut step = ang - prev;
        if step > PI {
            step -= 2.0 * PI;
        } else if step <= -PI {
            step += 2.0 * PI;
        }
        sweep += step;
        prev = ang;
    }
    let axis = if sweep < 0.0 { vec3::scale(normal, -1.0) } else { normal };

    let rms_residual = circle_rms(points, center, axis, radius);
    Ok(CircleFit {
        center,
        radius,
        axis,
        swept_angle: sweep.abs(),
        rms_residual,
    })
}

/// Root-mean-square 3-D distance from points to a circle.
pub fn circle_rms(points: &[Vec3], center: Vec3, axis: Vec3, radius: f64) -> f64 {
    let sq: f64 = points
        .iter()
        .map(|p| {
            let d = vec3::sub(*p, center);
            let h = vec3::dot(d, axis);
            let rho = vec3::norm(vec3::sub(d, vec3::scale(axis, h)));
            h * h + (rho - radius) * (rho - radius)
        })
        .sum();
    libm::sqrt(sq / points.len() as f64)
}

fn max_pairwise_distance(points: &[Vec3]) -> f64 {
    let mut best = 0.0f64;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.max(vec3::norm(vec3::sub(*p, *q)));
        }
    }
    best
}

/// Fits both joint models and keeps the one with the lower residual
/// normalized by the path extent; near-ties go to the prismatic model.
pub fn classify_articulation(points: &[Vec3]) -> Result<ArticulationModel> {
    if points.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: points.len(),
        });
    }
    let line = fit_line(points)?;
    let circle = match fit_circle(points) {
        Ok(c) => Some(c),
        Err(Error::DegenerateGeometry(_)) => None,
        Err(e) => return Err(e),
    };
    let extent = max_pairwise_distance(points);
    let line_norm = line.rms_residual / extent;
    let joint = match circle {
        Some(c) if c.rms_residual / extent < (1.0 - PRISMATIC_MARGIN) * line_norm => Joint::Revolute(c),
        _ => Joint::Prismatic(line),
    };
    Ok(ArticulationModel {
        joint,
        line_rms_residual: line.rms_residual,
        circle_rms_residual: circle.map(|c| c.rms_residual),
        extent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn arc(center: Vec3, radius: f64, from: f64, to: f64, n: usize) -> Vec<Vec3> {
        (0..n)
            .map(|k| {
                let a = from + (to - from) * k as f64 / (n - 1) as f64;
                [center[0] + radius * libm::cos(a), center[1] + radius * libm::sin(a), center[2]]
            })
            .collect()
    }

    #[test]
    fn line_along_z() {
        let pts: Vec<Vec3> = (0..10).map(|k| [0.0, 0.0, 0.1 * k as f64]).collect();
        let l = fit_line(&pts).unwrap();
        assert!(vec3::norm(vec3::sub(l.direction, [0.0, 0.0, 1.0])) < 1e-12);
        assert!(l.rms_residual < 1e-12);
        assert!((l.range - 0.9).abs() < 1e-12);

        let rev: Vec<Vec3> = pts.iter().rev().copied().collect();
        let r = fit_line(&rev).unwrap();
        assert!(vec3::norm(vec3::sub(r.direction, [0.0, 0.0, -1.0])) < 1e-12);
        assert!((r.range - l.range).abs() < 1e-12);
    }

    #[test]
    fn coincident_points_degenerate() {
        let pts = vec![[1.0, 2.0, 3.0]; 5];
        assert!(matches!(fit_line(&pts), Err(Error::DegenerateGeometry(_))));
        assert!(matches!(fit_circle(&pts), Err(Error::DegenerateGeometry(_))));
        assert!(matches!(fit_line(&pts[..1]), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn collinear_circle_degenerate() {
        let pts: Vec<Vec3> = (0..10).map(|k| [k as f64, 2.0 * k as f64, 0.0]).collect();
        assert!(matches!(fit_circle(&pts), Err(Error::DegenerateGeometry(_))));
    }

    #[test]
    fn exact_quarter_circle() {
        let pts = arc([0.1, -0.2, 0.5], 0.3, 0.0, PI / 2.0, 20);
        let c = fit_circle(&pts).unwrap();
        assert!((c.radius - 0.3).abs() < 1e-9);
        assert!((c.swept_angle - PI / 2.0).abs() < 1e-6);
        assert!(c.rms_residual < 1e-9);
        assert!(vec3::norm(vec3::sub(c.center, [0.1, -0.2, 0.5])) < 1e-9);
        // counterclockwise in xy is a positive rotation about +z
        assert!(vec3::norm(vec3::sub(c.axis, [0.0, 0.0, 1.0])) < 1e-9);
    }

    #[test]
    fn semicircle_and_beyond() {
        let c = fit_circle(&arc([0.0; 3], 1.0, 0.0, PI, 41)).unwrap();
        assert!((c.swept_angle - PI).abs() < 1e-3);
        let c = fit_circle(&arc([0.0; 3], 1.0, 0.0, 1.5 * PI, 61)).unwrap();
        assert!((c.swept_angle - 1.5 * PI).abs() < 1e-6);
        // clockwise traversal flips the axis, not the sweep
        let cw: Vec<Vec3> = arc([0.0; 3], 1.0, 0.0, PI, 41).into_iter().rev().collect();
        let c = fit_circle(&cw).unwrap();
        assert!((c.swept_angle - PI).abs() < 1e-3);
        assert!(vec3::norm(vec3::sub(c.axis, [0.0, 0.0, -1.0])) < 1e-9);
    }

    #[test]
    fn classify_straight_and_arc() {
        let straight: Vec<Vec3> = (0..30).map(|k| [0.01 * k as f64, 0.0, 0.4]).collect();
        let m = classify_articulation(&straight).unwrap();
        assert!(m.is_prismatic());
        assert_eq!(m.circle_rms_residual, None);

        let door = arc([0.0, 0.0, 0.8], 0.45, 0.0, 1.2, 40);
        let m = classify_articulation(&door).unwrap();
        assert!(matches!(m.joint, Joint::Revolute(_)));
        assert!(m.line_rms_residual > 0.01);
    }
}
