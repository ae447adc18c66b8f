use super::GEOM_TOL;
use crate::{Vec2, Vec3};

/// Prolate spheroid of points whose summed distance to the two foci exceeds
/// the focal distance by at most `delta`.
///
/// With `d = ‖focus_r − focus_t‖`: semi-major axis `a = (d + Δ)/2`, focal
/// half-distance `c = d/2`, semi-minor axis `b = √(a² − c²)`. `Δ = 0`
/// collapses it onto the focal segment, coincident foci give a sphere of
/// radius `Δ/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipsoid {
    pub focus_t: Vec3,
    pub focus_r: Vec3,
    pub delta: f64,
    pub center: Vec3,
    /// Focal distance `d`.
    pub focal_distance: f64,
    pub semi_major: f64,
    pub focal_half: f64,
    pub semi_minor: f64,
    /// Unit major-axis direction, `+x` when the foci coincide.
    pub axis: Vec3,
}

impl Ellipsoid {
    pub fn new(focus_t: Vec3, focus_r: Vec3, delta: f64) -> Self {
        assert!(delta >= 0.0, "excess path length must be non-negative");
        let diff = focus_r - focus_t;
        let d = diff.norm();
        let axis = if d > 0.0 { diff / d } else { Vec3::x() };
        // b = ½·√(Δ(2d + Δ)) avoids cancellation in √(a² − c²)
        let semi_minor = 0.5 * (delta * (2.0 * d + delta)).sqrt();
        Ellipsoid {
            focus_t,
            focus_r,
            delta,
            center: 0.5 * (focus_t + focus_r),
            focal_distance: d,
            semi_major: 0.5 * (d + delta),
            focal_half: 0.5 * d,
            semi_minor,
            axis,
        }
    }

    /// Inclusive membership test with the [`GEOM_TOL`] boundary allowance.
    pub fn contains(&self, p: &Vec3) -> bool {
        (p - self.focus_t).norm() + (p - self.focus_r).norm()
            <= self.focal_distance + self.delta + GEOM_TOL
    }

    /// `(4/3)·π·a·b²`.
    pub fn volume(&self) -> f64 {
        4.0 / 3.0 * std::f64::consts::PI * self.semi_major * self.semi_minor * self.semi_minor
    }

    /// Half-extents of the tight axis-aligned bounding box.
    pub fn half_extents(&self) -> Vec3 {
        let (a2, b2) = (self.semi_major.powi(2), self.semi_minor.powi(2));
        self.axis
            .map(|k| (a2 * k * k + b2 * (1.0 - k * k)).max(0.0).sqrt())
    }
}

/// Length of the vertical line through `u` that lies both inside the
/// ellipsoid and within `[z_low, z_high]`.
///
/// In the principal frame the membership condition along the line reduces
/// to `a²‖q‖² − c²(q·axis)² − a²b² ≤ 0` with `q` the offset from the
/// center, a quadratic in `z`.
pub fn vertical_overlap_thickness(e: &Ellipsoid, u: Vec2, z_low: f64, z_high: f64) -> f64 {
    if e.semi_minor <= 0.0 || z_high <= z_low {
        return 0.0;
    }
    let (a2, c2, b2) = (
        e.semi_major * e.semi_major,
        e.focal_half * e.focal_half,
        e.semi_minor * e.semi_minor,
    );
    let px = u.x - e.center.x;
    let py = u.y - e.center.y;
    // vertical coordinate is measured from the center: q = (px, py, w)
    let s0 = px * e.axis.x + py * e.axis.y;
    let az = e.axis.z;
    let qa = a2 - c2 * az * az;
    let qb = -2.0 * c2 * s0 * az;
    let qc = a2 * (px * px + py * py) - c2 * s0 * s0 - a2 * b2;
    if qa <= 0.0 {
        return 0.0;
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return 0.0;
    }
    let root = disc.sqrt();
    // numerically stable pair of roots
    let q = -0.5 * (qb + qb.signum() * root);
    let (w1, w2) = if q != 0.0 {
        let r1 = q / qa;
        let r2 = qc / q;
        (r1.min(r2), r1.max(r2))
    } else {
        let half = root / (2.0 * qa);
        (-half, half)
    };
    let lo = (e.center.z + w1).max(z_low);
    let hi = (e.center.z + w2).min(z_high);
    (hi - lo).max(0.0)
}
