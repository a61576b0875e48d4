//! Canonical-box covers of vicinities.

use crate::points::Params;

/// Closed axis-parallel box `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AaBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AaBox {
    pub fn contains(&self, q: &[f64]) -> bool {
        q.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&x, (&a, &b))| x >= a && x <= b)
    }
}

/// Volume of the axis-parallel bounding box of `p` and `q`.
pub fn box_volume(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).product()
}

/// Is `q` in the vicinity of `p`, i.e. is their bounding box volume at most `phi`?
pub fn in_vicinity(p: &[f64], q: &[f64], phi: f64) -> bool {
    box_volume(p, q) <= phi
}

/// The exponent `tau >= 0` with `2^d phi <= 2^-tau <= 2^(d+1) phi` (0 when `2^d phi > 1`).
pub fn vicinity_tau(d: usize, phi: f64) -> u32 {
    let t = (-(phi * (1u64 << d) as f64).log2()).floor();
    if t <= 0.0 {
        0
    } else {
        t as u32
    }
}

fn compositions(total: u32, parts: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if parts == 1 {
        cur.push(total);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for a in 0..=total {
        cur.push(a);
        compositions(total - a, parts - 1, cur, out);
        cur.pop();
    }
}

/// Boxes anchored at `p`, one family per orthant, with side lengths `2^-a_i`
/// where the exponents `a_i >= 0` sum to `tau`. Their union covers the
/// vicinity of `p`. Boxes are clipped to the unit cube.
pub fn vicinity_boxes(p: &[f64], params: &Params) -> Vec<AaBox> {
    let d = p.len();
    let tau = vicinity_tau(d, params.phi);
    let mut shapes = Vec::new();
    compositions(tau, d, &mut Vec::new(), &mut shapes);
    let mut out = Vec::with_capacity(shapes.len() << d);
    for orthant in 0..(1usize << d) {
        for a in &shapes {
            let mut lo = vec![0.0; d];
            let mut hi = vec![0.0; d];
            for k in 0..d {
                let side = 0.5f64.powi(a[k] as i32);
                // widen by a hair so ties at the far face stay inside despite rounding
                let slack = 1e-12;
                if orthant >> k & 1 == 0 {
                    lo[k] = p[k];
                    hi[k] = (p[k] + side + slack).min(1.0);
                } else {
                    lo[k] = (p[k] - side - slack).max(0.0);
                    hi[k] = p[k];
                }
            }
            out.push(AaBox { lo, hi });
        }
    }
    out
}
