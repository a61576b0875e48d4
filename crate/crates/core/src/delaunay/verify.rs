//! Empty-circumsphere verification of a complex against the full point set.

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::cones::grid_side;
use crate::error::Result;
use crate::grid::UniformGrid;
use crate::points::{dist, seeded_rng, PointSet};
use crate::predicates::{circumsphere, insphere, orient};

use super::complex::{Simplex, SimplicialComplex};

const REL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive,
    /// Check this many top simplices drawn with the given seed.
    Sampled { count: usize, seed: u64 },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checked: usize,
    /// Top simplices whose open circumball holds a point of the set.
    pub violations: usize,
    /// Interior facets whose two incident simplices fail the local in-sphere test.
    pub nonlocal_facets: usize,
    /// Largest `(R - |c - q|) / R` over offending points.
    pub max_penetration: f64,
    /// Top simplices too flat for a trustworthy floating-point circumsphere.
    pub flagged: usize,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn positive<'a>(points: &'a PointSet, s: &Simplex) -> Vec<&'a [f64]> {
    let mut p: Vec<&[f64]> = s.vertices().iter().map(|&i| points.point(i as usize)).collect();
    if orient(&p) < 0.0 {
        p.swap(0, 1);
    }
    p
}

pub fn verify_delaunay(c: &SimplicialComplex, points: &PointSet, mode: VerifyMode) -> Result<VerifyReport> {
    let tops = c.top_simplices();
    let mut report = VerifyReport::default();
    if tops.is_empty() {
        return Ok(report);
    }
    let picked: Vec<Simplex> = match mode {
        VerifyMode::Exhaustive => tops.clone(),
        VerifyMode::Sampled { count, seed } => {
            let mut rng = seeded_rng(seed);
            (0..count)
                .map(|_| tops[(rand_core::RngCore::next_u64(&mut rng) % tops.len() as u64) as usize])
                .collect()
        }
    };
    let grid = UniformGrid::new(points, grid_side(points.len(), points.dim()))?;
    for s in &picked {
        report.checked += 1;
        let p = positive(points, s);
        let (center, r2) = circumsphere(&p);
        let r = r2.sqrt();
        let scale: f64 = p.iter().skip(1).map(|q| dist(p[0], q)).fold(0.0, f64::max);
        let o = orient(&p);
        if !r.is_finite() || o.abs() <= 1e-12 * scale.powi(points.dim() as i32) {
            report.flagged += 1;
            continue;
        }
        let c = &center[..points.dim()];
        let mut bad = false;
        grid.for_each_in_ball(points, c, r, |q, dq| {
            if s.contains(q) || dq >= r * (1.0 - REL_TOL) {
                return;
            }
            bad = true;
            report.max_penetration = report.max_penetration.max((r - dq) / r);
        });
        if bad {
            report.violations += 1;
        }
    }
    // local test across interior facets
    let mut facets: FxHashMap<Simplex, Vec<u32>> = FxHashMap::default();
    for s in &tops {
        for f in s.faces().filter(|f| f.dim() + 1 == s.dim()) {
            let apex = *s.vertices().iter().find(|v| !f.contains(**v)).unwrap();
            facets.entry(f).or_default().push(apex);
        }
    }
    for (f, apexes) in &facets {
        if apexes.len() != 2 {
            continue;
        }
        let mut v = f.vertices().to_vec();
        v.push(apexes[0]);
        let p = positive(points, &Simplex::new(&v));
        if insphere(&p, points.point(apexes[1] as usize)) > 0.0 {
            report.nonlocal_facets += 1;
        }
    }
    Ok(report)
}
