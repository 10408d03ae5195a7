use super::Aabb;
use crate::Vec3;

const PARALLEL_EPS: f64 = 1e-12;

pub fn point_segment_distance(p: Vec3, a: Vec3, b: Vec3) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 <= PARALLEL_EPS {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Shortest distance between segments `p1q1` and `p2q2`.
pub fn segment_segment_distance(p1: Vec3, q1: Vec3, p2: Vec3, q2: Vec3) -> f64 {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);

    let (s, t) = if a <= PARALLEL_EPS && e <= PARALLEL_EPS {
        (0.0, 0.0)
    } else if a <= PARALLEL_EPS {
        (0.0, (f / e).clamp(0.0, 1.0))
    } else {
        let c = d1.dot(&r);
        if e <= PARALLEL_EPS {
            ((-c / a).clamp(0.0, 1.0), 0.0)
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s = if denom > PARALLEL_EPS * a * e {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t = (b * s + f) / e;
            if t < 0.0 {
                t = 0.0;
                s = (-c / a).clamp(0.0, 1.0);
            } else if t > 1.0 {
                t = 1.0;
                s = ((b - c) / a).clamp(0.0, 1.0);
            }
            (s, t)
        }
    };
    ((p1 + d1 * s) - (p2 + d2 * t)).norm()
}

fn is_degenerate(a: Vec3, b: Vec3, c: Vec3) -> bool {
    let n = (b - a).cross(&(c - a)).norm_squared();
    let scale = (b - a)
        .norm_squared()
        .max((c - a).norm_squared())
        .max((c - b).norm_squared());
    n <= 1e-18 * scale * scale
}

/// Closest point on triangle `abc` to `p`.
pub fn point_triangle_closest(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> Vec3 {
    if is_degenerate(a, b, c) {
        // Collapse to the closest of the three edges.
        let candidates = [(a, b), (b, c), (c, a)];
        let mut best = a;
        let mut best_d = f64::INFINITY;
        for (u, v) in candidates {
            let uv = v - u;
            let len2 = uv.norm_squared();
            let q = if len2 <= PARALLEL_EPS {
                u
            } else {
                u + uv * ((p - u).dot(&uv) / len2).clamp(0.0, 1.0)
            };
            let d = (p - q).norm_squared();
            if d < best_d {
                best_d = d;
                best = q;
            }
        }
        return best;
    }

    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

pub fn point_triangle_distance(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> f64 {
    (p - point_triangle_closest(p, a, b, c)).norm()
}

/// Shortest distance between segment `pq` and triangle `abc` (zero when the
/// segment pierces the triangle).
pub fn segment_triangle_distance(p: Vec3, q: Vec3, a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let mut best = point_triangle_distance(p, a, b, c).min(point_triangle_distance(q, a, b, c));
    if best == 0.0 {
        return 0.0;
    }
    if !is_degenerate(a, b, c) {
        let n = (b - a).cross(&(c - a));
        let dp = n.dot(&(p - a));
        let dq = n.dot(&(q - a));
        if (dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0) {
            let x = p + (q - p) * (dp / (dp - dq));
            best = best.min(point_triangle_distance(x, a, b, c));
        }
    }
    for (u, v) in [(a, b), (b, c), (c, a)] {
        best = best.min(segment_segment_distance(p, q, u, v));
    }
    best
}

/// Shortest distance between segment `pq` and a solid axis-aligned box.
pub fn segment_box_distance(p: Vec3, q: Vec3, bx: &Aabb) -> f64 {
    if segment_hits_box(p, q, bx) {
        return 0.0;
    }
    let mut best = bx.distance_to_point(&p).min(bx.distance_to_point(&q));
    let (lo, hi) = (bx.min, bx.max);
    let corner = |i: usize| {
        Vec3::new(
            if i & 1 == 0 { lo.x } else { hi.x },
            if i & 2 == 0 { lo.y } else { hi.y },
            if i & 4 == 0 { lo.z } else { hi.z },
        )
    };
    for i in 0..8usize {
        for bit in [1usize, 2, 4] {
            if i & bit == 0 {
                best = best.min(segment_segment_distance(p, q, corner(i), corner(i | bit)));
            }
        }
    }
    best
}

fn segment_hits_box(p: Vec3, q: Vec3, bx: &Aabb) -> bool {
    let d = q - p;
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for i in 0..3 {
        if d[i].abs() <= PARALLEL_EPS {
            if p[i] < bx.min[i] || p[i] > bx.max[i] {
                return false;
            }
        } else {
            let inv = 1.0 / d[i];
            let mut ta = (bx.min[i] - p[i]) * inv;
            let mut tb = (bx.max[i] - p[i]) * inv;
            if ta > tb {
                std::mem::swap(&mut ta, &mut tb);
            }
            t0 = t0.max(ta);
            t1 = t1.min(tb);
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}
