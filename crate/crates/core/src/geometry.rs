//! Diameter of a planar point set: octagon prefilter, monotone-chain hull, rotating calipers.

type P = (f64, f64);

#[inline]
fn cross(o: P, a: P, b: P) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

#[inline]
fn dist2(a: P, b: P) -> f64 {
    let (dx, dy) = (a.0 - b.0, a.1 - b.1);
    dx * dx + dy * dy
}

/// Largest distance between two points of `pts`. Reorders `pts`.
pub fn diameter(pts: &mut Vec<P>) -> f64 {
    if pts.len() <= 8 {
        let mut best = 0.0f64;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                best = best.max(dist2(pts[i], pts[j]));
            }
        }
        return best.sqrt();
    }
    prefilter(pts);
    let hull = convex_hull(pts);
    calipers(&hull).sqrt()
}

/// Keeps only points that can be an endpoint of a diameter: those whose
/// distance to the farthest corner of the bounding box, and then of the
/// bounding octagon, reaches the largest width along the axes and diagonals
/// (a lower bound on the diameter).
fn prefilter(pts: &mut Vec<P>) {
    let (x0, y0) = pts[0];
    let (mut xl, mut xh, mut yl, mut yh) = (x0, x0, y0, y0);
    let (mut sl, mut sh, mut dl, mut dh) = (x0 + y0, x0 + y0, x0 - y0, x0 - y0);
    for &(x, y) in pts.iter() {
        let (s, d) = (x + y, x - y);
        xl = if x < xl { x } else { xl };
        xh = if x > xh { x } else { xh };
        yl = if y < yl { y } else { yl };
        yh = if y > yh { y } else { yh };
        sl = if s < sl { s } else { sl };
        sh = if s > sh { s } else { sh };
        dl = if d < dl { d } else { dl };
        dh = if d > dh { d } else { dh };
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let lower = (xh - xl).max(yh - yl).max((sh - sl) * r).max((dh - dl) * r);
    if !(lower > 0.0) {
        return;
    }
    // Support values along (1,0), (1,1)/r2, (0,1), (-1,1)/r2, ... counter-clockwise.
    let dirs: [P; 8] = [(1.0, 0.0), (r, r), (0.0, 1.0), (-r, r), (-1.0, 0.0), (-r, -r), (0.0, -1.0), (r, -r)];
    let support = [xh, sh * r, yh, -dl * r, -xl, -sl * r, -yl, dh * r];
    let corners: [P; 8] = std::array::from_fn(|k| {
        let (a, b) = (dirs[k], dirs[(k + 1) % 8]);
        let det = a.0 * b.1 - a.1 * b.0;
        let (ha, hb) = (support[k], support[(k + 1) % 8]);
        ((ha * b.1 - hb * a.1) / det, (a.0 * hb - b.0 * ha) / det)
    });
    let cut = lower * lower * (1.0 - 1e-9);
    pts.retain(|&(x, y)| {
        let fx = (x - xl).max(xh - x);
        let fy = (y - yl).max(yh - y);
        fx * fx + fy * fy >= cut && corners.iter().any(|&c| dist2((x, y), c) >= cut)
    });
}

fn convex_hull(pts: &mut [P]) -> Vec<P> {
    pts.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut hull: Vec<P> = Vec::with_capacity(pts.len() + 1);
    for &p in pts.iter() {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Squared diameter of a convex polygon given counter-clockwise.
fn calipers(hull: &[P]) -> f64 {
    let n = hull.len();
    match n {
        0 | 1 => return 0.0,
        2 => return dist2(hull[0], hull[1]),
        _ => {}
    }
    let mut best = 0.0f64;
    let mut j = 1;
    for i in 0..n {
        let a = hull[i];
        let b = hull[(i + 1) % n];
        while cross(a, b, hull[(j + 1) % n]).abs() > cross(a, b, hull[j]).abs() {
            j = (j + 1) % n;
        }
        best = best.max(dist2(a, hull[j])).max(dist2(b, hull[j]));
    }
    best
}
