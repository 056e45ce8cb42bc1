//! Planar convex hulls.

/// Counter-clockwise hull by Andrew's monotone chain, starting at the
/// lowest-x point. Points closer than `tol·scale` are merged and turns with
/// cross product below `tol·scale²` count as collinear, `scale` being
/// `1 + max |coordinate|`.
pub fn convex_hull_2d(points: &[[f64; 2]], tol: f64) -> Vec<[f64; 2]> {
    let scale = 1.0 + points.iter().map(|p| p[0].abs().max(p[1].abs())).fold(0.0, f64::max);
    let near = tol * scale;
    let mut pts: Vec<[f64; 2]> = Vec::new();
    for p in points {
        if !pts.iter().any(|q| (p[0] - q[0]).hypot(p[1] - q[1]) <= near) {
            pts.push(*p);
        }
    }
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    if pts.len() < 3 {
        return pts;
    }
    let tol = tol * scale * scale;
    let cross =
        |o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= tol {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= tol {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Shoelace area, positive for counter-clockwise order.
pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    let mut a = 0.0;
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        a += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * a
}
