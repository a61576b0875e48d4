//! Point sets in the unit cube, the two metrics used throughout, and seeded sampling.
//!
//! Sampling uses ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`), a counter-based
//! generator whose stream is specified independently of platform and word size. Each
//! coordinate is `(next_u64() >> 11) * 2^-53`, i.e. a uniform multiple of `2^-53` in
//! `[0, 1)`. Coordinates are generated point by point, axis by axis, so a point set
//! with the same `(n, d, seed)` is bit-identical everywhere.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{param, Result};

/// Smallest supported ambient dimension.
pub const MIN_DIM: usize = 2;
/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 8;

/// An ordered set of points in `[0,1)^d`, stored row-major.
///
/// Indices `0..n` are the stable identifiers used by every downstream structure.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
    seed: u64,
}

impl PointSet {
    /// Builds a point set from row-major coordinates, validating the unit-cube invariant.
    pub fn from_coords(dim: usize, coords: Vec<f64>, seed: u64) -> Result<Self> {
        check_dim(dim)?;
        if !coords.len().is_multiple_of(dim) {
            return param(format!(
                "coordinate count {} is not a multiple of d={dim}",
                coords.len()
            ));
        }
        if let Some((k, &x)) = coords
            .iter()
            .enumerate()
            .find(|(_, &x)| !(0.0..1.0).contains(&x))
        {
            return param(format!(
                "coordinate {x} of point {} is outside [0,1)",
                k / dim
            ));
        }
        Ok(Self { dim, coords, seed })
    }

    /// Builds a point set from rows; the seed is recorded as 0 (externally supplied data).
    pub fn from_rows<R: AsRef<[f64]>>(dim: usize, rows: &[R]) -> Result<Self> {
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return param(format!("row {i} has {} coordinates, expected {dim}", row.len()));
            }
            coords.extend_from_slice(row);
        }
        Self::from_coords(dim, coords, 0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// The sub-set formed by `indices`, in that order. Provenance seed is kept.
    pub fn subset(&self, indices: &[u32]) -> PointSet {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i as usize));
        }
        PointSet {
            dim: self.dim,
            coords,
            seed: self.seed,
        }
    }

    /// Replaces one coordinate, keeping the unit-cube invariant.
    pub fn set_coord(&mut self, i: usize, axis: usize, value: f64) -> Result<()> {
        if i >= self.len() || axis >= self.dim {
            return param(format!("no coordinate ({i}, {axis})"));
        }
        if !(0.0..1.0).contains(&value) {
            return param(format!("coordinate {value} is outside [0,1)"));
        }
        self.coords[i * self.dim + axis] = value;
        Ok(())
    }
}

fn check_dim(d: usize) -> Result<()> {
    if !(MIN_DIM..=MAX_DIM).contains(&d) {
        return param(format!("dimension d={d} outside {MIN_DIM}..={MAX_DIM}"));
    }
    Ok(())
}

/// Uniform double in `[0,1)` from the top 53 bits of a 64-bit draw.
#[inline]
pub fn unit_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// The generator used for every seeded draw in the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` points drawn i.i.d. uniformly from `[0,1)^d`.
pub fn sample_points(n: usize, d: usize, seed: u64) -> Result<PointSet> {
    if n == 0 {
        return param("n must be at least 1");
    }
    check_dim(d)?;
    let mut rng = seeded_rng(seed);
    let coords = (0..n * d).map(|_| unit_f64(&mut rng)).collect();
    Ok(PointSet {
        dim: d,
        coords,
        seed,
    })
}

#[inline]
pub(crate) fn dist2(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum()
}

#[inline]
pub(crate) fn dist(p: &[f64], q: &[f64]) -> f64 {
    dist2(p, q).sqrt()
}

/// Euclidean distance.
pub fn euclid_dist(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return param(format!("dimension mismatch: {} vs {}", p.len(), q.len()));
    }
    Ok(dist(p, q))
}

#[inline]
pub(crate) fn torus_dist2(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| {
            let t = (a - b).abs();
            let t = t.min(1.0 - t);
            t * t
        })
        .sum()
}

/// Distance on the flat torus `[0,1)^d`: each axis difference wraps around.
pub fn toroidal_dist(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return param(format!("dimension mismatch: {} vs {}", p.len(), q.len()));
    }
    Ok(torus_dist2(p, q).sqrt())
}

/// The fixed scale quantities every construction is tuned by.
///
/// `phi = c_d ln(n) / n` is the volume of a region that a random sample of size `n`
/// hits with high probability; `delta = phi^(1/d)` is the matching length scale.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Params {
    pub n: usize,
    pub d: usize,
    pub c_d: f64,
    pub phi: f64,
    pub delta: f64,
}

/// Default `c_d`: 10 in the plane, 32 in space, `2^(d+2)` beyond.
///
/// Chosen so that, with cones of half-angle `pi/12`, an empty cone within
/// `delta` at a fortress point is a well below one-in-a-million event for the
/// sizes the test suite runs.
pub fn default_c_d(d: usize) -> f64 {
    match d {
        2 => 10.0,
        3 => 32.0,
        _ => (1u64 << (d + 2)) as f64,
    }
}

impl Params {
    pub fn new(n: usize, d: usize, c_d: f64) -> Result<Self> {
        derive_params(n, d, c_d)
    }

    pub fn with_default_c(n: usize, d: usize) -> Result<Self> {
        derive_params(n, d, default_c_d(d))
    }

    /// Is `p` in the fortress `[delta, 1 - delta]^d`?
    pub fn in_fortress(&self, p: &[f64]) -> bool {
        p.iter().all(|&x| x >= self.delta && x <= 1.0 - self.delta)
    }
}

pub fn derive_params(n: usize, d: usize, c_d: f64) -> Result<Params> {
    check_dim(d)?;
    if n < 16 {
        return param(format!("n={n} is below the minimum of 16"));
    }
    if !(c_d > 0.0 && c_d.is_finite()) {
        return param(format!("c_d={c_d} must be positive"));
    }
    let phi = c_d * (n as f64).ln() / n as f64;
    if phi > 1.0 {
        return param(format!("n too small for c_d: phi={phi} > 1"));
    }
    Ok(Params {
        n,
        d,
        c_d,
        phi,
        delta: phi.powf(1.0 / d as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_rejects_bad_sizes() {
        assert!(sample_points(0, 2, 1).is_err());
        assert!(sample_points(5, 1, 1).is_err());
        assert!(sample_points(5, 9, 1).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_points(5, 2, 42).unwrap();
        let b = sample_points(5, 2, 42).unwrap();
        assert_eq!(a.coords(), b.coords());
        assert_ne!(a.coords(), sample_points(5, 2, 43).unwrap().coords());
        assert_eq!(a.seed(), 42);
    }

    #[test]
    fn sampling_mean_is_one_half() {
        let p = sample_points(1_000_000, 2, 1).unwrap();
        for axis in 0..2 {
            let mean = p.iter().map(|x| x[axis]).sum::<f64>() / p.len() as f64;
            assert!((mean - 0.5).abs() < 0.002, "axis {axis} mean {mean}");
        }
    }

    #[test]
    fn metric_examples() {
        assert!((euclid_dist(&[0.0, 0.0], &[0.6, 0.8]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(euclid_dist(&[0.3, 0.2], &[0.3, 0.2]).unwrap(), 0.0);
        assert!((euclid_dist(&[0.0, 0.0], &[1.0, 1.0]).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((toroidal_dist(&[0.9, 0.0], &[0.0, 0.0]).unwrap() - 0.1).abs() < 1e-12);
        assert_eq!(toroidal_dist(&[0.4, 0.7], &[0.4, 0.7]).unwrap(), 0.0);
        let t = toroidal_dist(&[0.9, 0.9], &[0.1, 0.1]).unwrap();
        assert!((t - 0.282_842_7).abs() < 1e-7);
        assert!(euclid_dist(&[0.0, 0.0], &[0.0, 0.0, 0.0]).is_err());
        assert!(toroidal_dist(&[0.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn params_examples() {
        let p = derive_params(22026, 2, 1.0).unwrap();
        assert!((p.phi - 4.540e-4).abs() < 1e-6);
        assert!((p.delta - 0.02131).abs() < 1e-5);
        assert!(derive_params(16, 2, 100.0).is_err());
        let p = derive_params(10_000, 3, 8.0).unwrap();
        assert!((p.phi - 7.3683e-3).abs() < 1e-7);
        assert!((p.delta - 0.19459).abs() < 1e-5);
        assert!((p.delta.powi(3) - p.phi).abs() < 1e-15);
        assert!(derive_params(15, 2, 1.0).is_err());
        assert!(derive_params(100, 2, 0.0).is_err());
    }

    #[test]
    fn point_set_validation() {
        assert!(PointSet::from_rows(2, &[[0.5, 1.0]]).is_err());
        assert!(PointSet::from_rows(2, &[[0.5, -0.1]]).is_err());
        let p = PointSet::from_rows(2, &[[0.5, 0.25], [0.0, 0.0]]).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.seed(), 0);
        assert_eq!(p.subset(&[1]).point(0), &[0.0, 0.0]);
    }
}
