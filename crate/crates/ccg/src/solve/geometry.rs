use std::f64::consts::PI;

use nalgebra::DVector;

/// Counter-clockwise vertex list.
pub type Polygon = Vec<[f64; 2]>;

pub(crate) fn polygon_directions(k: usize) -> Vec<DVector<f64>> {
    (0..k)
        .map(|j| {
            let a = 2.0 * PI * j as f64 / k as f64;
            DVector::from_vec(vec![a.cos(), a.sin()])
        })
        .collect()
}

/// Convex polygon `{x : dᵢᵀx ≤ hᵢ}` by successive clipping of a box large
/// enough to hold it.
pub(crate) fn clip_halfplanes(dirs: &[DVector<f64>], values: &[f64]) -> Polygon {
    let m = 4.0 * values.iter().fold(0.0f64, |acc, v| acc.max(v.abs())) + 1.0;
    let mut poly: Polygon = vec![[-m, -m], [m, -m], [m, m], [-m, m]];
    for (d, &h) in dirs.iter().zip(values) {
        poly = clip(&poly, [d[0], d[1]], h);
        if poly.is_empty() {
            break;
        }
    }
    poly
}

fn clip(poly: &Polygon, d: [f64; 2], h: f64) -> Polygon {
    let side = |p: &[f64; 2]| d[0] * p[0] + d[1] * p[1] - h;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let cur = poly[i];
        let nxt = poly[(i + 1) % poly.len()];
        let (sc, sn) = (side(&cur), side(&nxt));
        if sc <= 0.0 {
            out.push(cur);
        }
        if (sc < 0.0 && sn > 0.0) || (sc > 0.0 && sn < 0.0) {
            let t = sc / (sc - sn);
            out.push([cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])]);
        }
    }
    out
}

/// Shoelace area (positive for counter-clockwise order).
pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
}
