//! Orientation and in-sphere tests for d = 2, 3 on top of Shewchuk's adaptive predicates.
//!
//! Sign conventions: a simplex `[v0, .., vd]` is *positive* when `orient` returns a
//! positive value; for a positive simplex `insphere(.., q) > 0` means `q` is strictly
//! inside its circumsphere.

use robust::{Coord, Coord3D};

#[inline]
fn c2(p: &[f64]) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

#[inline]
fn c3(p: &[f64]) -> Coord3D<f64> {
    Coord3D {
        x: p[0],
        y: p[1],
        z: p[2],
    }
}

/// Orientation of `d + 1` points in dimension `d` (2 or 3).
#[inline]
pub fn orient(pts: &[&[f64]]) -> f64 {
    match pts.len() {
        3 => robust::orient2d(c2(pts[0]), c2(pts[1]), c2(pts[2])),
        4 => robust::orient3d(c3(pts[0]), c3(pts[1]), c3(pts[2]), c3(pts[3])),
        k => panic!("orient: unsupported point count {k}"),
    }
}

#[inline]
pub fn orient2d(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    robust::orient2d(c2(a), c2(b), c2(c))
}

#[inline]
pub fn orient3d(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> f64 {
    robust::orient3d(c3(a), c3(b), c3(c), c3(d))
}

/// Positive iff `q` is strictly inside the circumsphere of the positive simplex `pts`.
#[inline]
pub fn insphere(pts: &[&[f64]], q: &[f64]) -> f64 {
    match pts.len() {
        3 => robust::incircle(c2(pts[0]), c2(pts[1]), c2(pts[2]), c2(q)),
        4 => robust::insphere(c3(pts[0]), c3(pts[1]), c3(pts[2]), c3(pts[3]), c3(q)),
        k => panic!("insphere: unsupported point count {k}"),
    }
}

/// For `q` lying on the affine hull of the facet `pts` (d points in dimension d),
/// is `q` strictly inside the facet's own (d-1)-dimensional circumsphere?
pub fn inside_facet_circumsphere(pts: &[&[f64]], q: &[f64]) -> bool {
    match pts.len() {
        2 => {
            // segment: strictly between the endpoints
            let (a, b) = (pts[0], pts[1]);
            let dot: f64 = (0..a.len()).map(|k| (q[k] - a[k]) * (q[k] - b[k])).sum();
            dot < 0.0
        }
        3 => {
            // triangle in 3-space: project along the dominant normal axis, which is exact
            let (a, b, c) = (pts[0], pts[1], pts[2]);
            let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
            let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
            let nrm = [
                (u[1] * v[2] - u[2] * v[1]).abs(),
                (u[2] * v[0] - u[0] * v[2]).abs(),
                (u[0] * v[1] - u[1] * v[0]).abs(),
            ];
            let drop = if nrm[0] >= nrm[1] && nrm[0] >= nrm[2] {
                0
            } else if nrm[1] >= nrm[2] {
                1
            } else {
                2
            };
            let keep: Vec<usize> = (0..3).filter(|&k| k != drop).collect();
            let pr = |p: &[f64]| [p[keep[0]], p[keep[1]]];
            let (pa, pb, pc, pq) = (pr(a), pr(b), pr(c), pr(q));
            let o = orient2d(&pa, &pb, &pc);
            let s = robust::incircle(c2(&pa), c2(&pb), c2(&pc), c2(&pq));
            if o > 0.0 {
                s > 0.0
            } else {
                s < 0.0
            }
        }
        k => panic!("inside_facet_circumsphere: unsupported facet size {k}"),
    }
}

/// Floating-point circumcenter and squared radius of a full-dimensional simplex.
pub fn circumsphere(pts: &[&[f64]]) -> ([f64; 3], f64) {
    match pts.len() {
        3 => {
            let (a, b, c) = (pts[0], pts[1], pts[2]);
            let (bx, by) = (b[0] - a[0], b[1] - a[1]);
            let (cx, cy) = (c[0] - a[0], c[1] - a[1]);
            let d = 2.0 * (bx * cy - by * cx);
            let b2 = bx * bx + by * by;
            let cc = cx * cx + cy * cy;
            let ux = (cy * b2 - by * cc) / d;
            let uy = (bx * cc - cx * b2) / d;
            ([a[0] + ux, a[1] + uy, 0.0], ux * ux + uy * uy)
        }
        4 => {
            let a = pts[0];
            let e = |p: &[f64]| [p[0] - a[0], p[1] - a[1], p[2] - a[2]];
            let (b, c, d) = (e(pts[1]), e(pts[2]), e(pts[3]));
            let n2 = |v: [f64; 3]| v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
            let cross = |u: [f64; 3], v: [f64; 3]| {
                [
                    u[1] * v[2] - u[2] * v[1],
                    u[2] * v[0] - u[0] * v[2],
                    u[0] * v[1] - u[1] * v[0],
                ]
            };
            let cd = cross(c, d);
            let db = cross(d, b);
            let bc = cross(b, c);
            let det = 2.0 * (b[0] * cd[0] + b[1] * cd[1] + b[2] * cd[2]);
            let (nb, nc, nd) = (n2(b), n2(c), n2(d));
            let u = [
                (nb * cd[0] + nc * db[0] + nd * bc[0]) / det,
                (nb * cd[1] + nc * db[1] + nd * bc[1]) / det,
                (nb * cd[2] + nc * db[2] + nd * bc[2]) / det,
            ];
            ([a[0] + u[0], a[1] + u[1], a[2] + u[2]], n2(u))
        }
        k => panic!("circumsphere: unsupported point count {k}"),
    }
}
