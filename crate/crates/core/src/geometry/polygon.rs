use super::{cross2, GEOM_TOL};
use crate::{Error, Result, Vec2};

/// Signed shoelace area; positive for counter-clockwise vertex order.
pub fn polygon_area(polygon: &[Vec2]) -> Result<f64> {
    if polygon.len() < 3 {
        return Err(Error::DegenerateGeometry(format!(
            "polygon has {} vertices, need at least 3",
            polygon.len()
        )));
    }
    let n = polygon.len();
    let twice: f64 = (0..n)
        .map(|i| cross2(polygon[i], polygon[(i + 1) % n]))
        .sum();
    Ok(0.5 * twice)
}

/// Counter-clockwise convex hull (monotone chain). Collinear boundary points
/// are dropped.
pub fn convex_hull_2d(points: &[Vec2]) -> Result<Vec<Vec2>> {
    let mut pts: Vec<Vec2> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return Err(Error::DegenerateGeometry(
            "fewer than 3 distinct points for a hull".into(),
        ));
    }

    let turn = |o: Vec2, a: Vec2, b: Vec2| cross2(a - o, b - o);
    let mut lower: Vec<Vec2> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Vec2> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(Error::DegenerateGeometry("all points are collinear".into()));
    }
    Ok(lower)
}

/// True when the CCW polygon has no reflex vertex.
pub fn is_convex(polygon: &[Vec2]) -> bool {
    let n = polygon.len();
    n >= 3
        && (0..n).all(|i| {
            let a = polygon[i];
            let b = polygon[(i + 1) % n];
            let c = polygon[(i + 2) % n];
            cross2(b - a, c - b) >= 0.0
        })
}

fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 {
        ((p - a).dot(&ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (a + ab * t - p).norm()
}

/// Point-in-polygon for simple polygons of either orientation. Points within
/// [`GEOM_TOL`] of the boundary count as inside.
pub fn point_in_polygon(u: Vec2, polygon: &[Vec2]) -> bool {
    let n = polygon.len();
    if n < 3 {
        return false;
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (polygon[j], polygon[i]);
        if point_segment_distance(u, a, b) <= GEOM_TOL {
            return true;
        }
        if (b.y > u.y) != (a.y > u.y) {
            let x_cross = b.x + (u.y - b.y) * (a.x - b.x) / (a.y - b.y);
            if u.x < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Parameter intervals `[t0, t1]` of the segment `a + t (b - a)`,
/// `t ∈ [0, 1]`, that lie strictly inside a simple polygon. Boundary
/// contact shorter than [`GEOM_TOL`] is not reported.
pub fn segment_polygon_intervals(a: Vec2, b: Vec2, polygon: &[Vec2]) -> Vec<(f64, f64)> {
    let d = b - a;
    let len = d.norm();
    let n = polygon.len();
    let mut cuts = vec![0.0, 1.0];
    for i in 0..n {
        let p = polygon[i];
        let e = polygon[(i + 1) % n] - p;
        let denom = cross2(d, e);
        if denom.abs() < 1e-300 {
            continue;
        }
        let w = p - a;
        let t = cross2(w, e) / denom;
        let s = cross2(w, d) / denom;
        if (0.0..=1.0).contains(&t) && (-1e-12..=1.0 + 1e-12).contains(&s) {
            cuts.push(t);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut out: Vec<(f64, f64)> = Vec::new();
    for w in cuts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if (t1 - t0) * len <= GEOM_TOL {
            continue;
        }
        let mid = a + d * (0.5 * (t0 + t1));
        if strictly_inside(mid, polygon) {
            match out.last_mut() {
                Some(last) if (t0 - last.1).abs() < 1e-15 => last.1 = t1,
                _ => out.push((t0, t1)),
            }
        }
    }
    out
}

fn strictly_inside(u: Vec2, polygon: &[Vec2]) -> bool {
    let n = polygon.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (polygon[j], polygon[i]);
        if point_segment_distance(u, a, b) <= GEOM_TOL {
            return false;
        }
        if (b.y > u.y) != (a.y > u.y) {
            let x_cross = b.x + (u.y - b.y) * (a.x - b.x) / (a.y - b.y);
            if u.x < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Axis-aligned box in the horizontal plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb2 {
    pub min: Vec2,
    pub max: Vec2,
}

impl Aabb2 {
    pub fn from_points(points: &[Vec2]) -> Self {
        let mut min = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            min = min.inf(p);
            max = max.sup(p);
        }
        Aabb2 { min, max }
    }

    pub fn overlaps(&self, other: &Aabb2) -> bool {
        self.min.x <= other.max.x
            && other.min.x <= self.max.x
            && self.min.y <= other.max.y
            && other.min.y <= self.max.y
    }

    /// Box spanned by the segment `a`–`b`.
    pub fn of_segment(a: Vec2, b: Vec2) -> Self {
        Aabb2 {
            min: a.inf(&b),
            max: a.sup(&b),
        }
    }

    /// The four corners in counter-clockwise order.
    pub fn corners(&self) -> Vec<Vec2> {
        vec![
            self.min,
            Vec2::new(self.max.x, self.min.y),
            self.max,
            Vec2::new(self.min.x, self.max.y),
        ]
    }
}
