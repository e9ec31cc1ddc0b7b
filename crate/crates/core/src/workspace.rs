//! Monte Carlo dexterous-workspace estimation and scatter-to-voxel
//! discretization.
//!
//! Sampling is counter-addressed: the draw for sample i depends only on
//! `(seed, i)`, so the scatter field is bit-identical no matter how many
//! rayon workers execute it. Voxelization bins sample positions into cubes
//! of side `r` anchored at the scatter lower bound; colliding samples keep
//! the maximum normalized dexterity seen in the voxel.

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::dexterity::{dexterity, normalize_dexterity, DexterityConfig};
use crate::error::{Error, Result};
use crate::grid::VoxelGrid;
use crate::kinematics::{forward_kinematics, sample_joint_config, JointVector, ManipulatorModel, Pose};
use crate::rng::{domain, SampleStream};

/// One Monte Carlo draw. The full end-effector pose is retained for export;
/// everything downstream consumes only the position.
#[derive(Clone, Debug, PartialEq)]
pub struct DexSample {
    pub q: JointVector,
    pub pose: Pose,
    pub dex_raw: f64,
    pub dex_norm: f64,
}

impl DexSample {
    pub fn position(&self) -> Vector3<f64> {
        self.pose.position
    }
}

/// Sampled workspace with tight axis-aligned position bounds and the
/// normalization constant recorded for run metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatterField {
    pub samples: Vec<DexSample>,
    pub bounds_lower: Vector3<f64>,
    pub bounds_upper: Vector3<f64>,
    /// Maximum raw dexterity of the originating sample set; dex_norm values
    /// are dex_raw divided by this.
    pub dex_raw_max: f64,
}

fn position_bounds(samples: &[DexSample]) -> (Vector3<f64>, Vector3<f64>) {
    let mut lo = Vector3::repeat(f64::INFINITY);
    let mut hi = Vector3::repeat(f64::NEG_INFINITY);
    for s in samples {
        let p = s.position();
        for axis in 0..3 {
            lo[axis] = lo[axis].min(p[axis]);
            hi[axis] = hi[axis].max(p[axis]);
        }
    }
    (lo, hi)
}

/// Draw `n_samples` random configurations, evaluate pose and dexterity for
/// each, and normalize dexterity over the set.
pub fn sample_workspace(
    model: &ManipulatorModel,
    n_samples: usize,
    seed: u64,
    cfg: &DexterityConfig,
) -> Result<ScatterField> {
    if n_samples == 0 {
        return Err(Error::InvalidInput("n_samples must be at least 1".into()));
    }
    cfg.validate()?;

    let evaluated: Vec<(JointVector, Pose, f64)> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut stream = SampleStream::new(seed, domain::ROBOT, i);
            let q = sample_joint_config(model, &mut stream);
            let pose = forward_kinematics(model, &q);
            dexterity(model, &q, cfg).map(|dex| (q, pose, dex))
        })
        .collect::<Result<_>>()?;

    let raw: Vec<f64> = evaluated.iter().map(|(_, _, dex)| *dex).collect();
    let normed = normalize_dexterity(&raw)?;
    let dex_raw_max = raw.iter().fold(0.0f64, |m, &v| m.max(v));

    let samples: Vec<DexSample> = evaluated
        .into_iter()
        .zip(normed)
        .map(|((q, pose, dex_raw), dex_norm)| DexSample {
            q,
            pose,
            dex_raw,
            dex_norm,
        })
        .collect();

    let (bounds_lower, bounds_upper) = position_bounds(&samples);
    Ok(ScatterField {
        samples,
        bounds_lower,
        bounds_upper,
        dex_raw_max,
    })
}

/// Keep samples with `dex_norm >= tau` (inclusive) and recompute the bounds.
/// Survivors are not renormalized.
pub fn threshold_filter(field: &ScatterField, tau: f64) -> Result<ScatterField> {
    let samples: Vec<DexSample> = field
        .samples
        .iter()
        .filter(|s| s.dex_norm >= tau)
        .cloned()
        .collect();
    if samples.is_empty() {
        return Err(Error::DegenerateWorkspace(format!(
            "threshold {tau} removed every sample"
        )));
    }
    let (bounds_lower, bounds_upper) = position_bounds(&samples);
    Ok(ScatterField {
        samples,
        bounds_lower,
        bounds_upper,
        dex_raw_max: field.dex_raw_max,
    })
}

/// Number of voxels needed along one axis to cover `[lo, hi]` at resolution
/// `r`, placing a point exactly at `hi` in its own last cell when the span is
/// an exact multiple of `r`.
fn axis_cells(lo: f64, hi: f64, r: f64) -> usize {
    ((hi - lo) / r).floor() as usize + 1
}

/// Discretize a scatter field into a voxel grid. Sample (x, y, z) lands in
/// cell `floor((x - lo_x) / r)` per axis; a cell keeps the maximum dex_norm
/// of its samples, untouched cells stay 0.
pub fn voxelize(field: &ScatterField, r: f64) -> Result<VoxelGrid> {
    if !(r > 0.0) {
        return Err(Error::InvalidInput(format!(
            "voxel resolution must be positive, got {r}"
        )));
    }
    if field.samples.is_empty() {
        return Err(Error::InvalidInput("cannot voxelize an empty field".into()));
    }
    let lo = field.bounds_lower;
    let hi = field.bounds_upper;
    let dims = [
        axis_cells(lo.x, hi.x, r),
        axis_cells(lo.y, hi.y, r),
        axis_cells(lo.z, hi.z, r),
    ];
    let origin = lo + Vector3::repeat(r / 2.0);
    let mut grid = VoxelGrid::zeros(origin, r, dims)?;
    for s in &field.samples {
        let p = s.position();
        let mut idx = [0usize; 3];
        for axis in 0..3 {
            let cell = ((p[axis] - lo[axis]) / r).floor();
            debug_assert!(cell >= 0.0 && cell < dims[axis] as f64);
            idx[axis] = (cell as usize).min(dims[axis] - 1);
        }
        grid.max_in(idx[0], idx[1], idx[2], s.dex_norm);
    }
    Ok(grid)
}

/// The minimum positive pairwise distance of the sample positions, found
/// with a uniform spatial hash instead of the quadratic scan. Coincident
/// samples are ignored; an error is returned when every pair coincides.
pub fn auto_resolution(field: &ScatterField) -> Result<f64> {
    let pts: Vec<Vector3<f64>> = field.samples.iter().map(|s| s.position()).collect();
    if pts.len() < 2 {
        return Err(Error::InvalidInput(
            "auto resolution needs at least two samples".into(),
        ));
    }
    let lo = field.bounds_lower;
    let hi = field.bounds_upper;
    let diag = (hi - lo).norm();
    if diag == 0.0 {
        return Err(Error::DegenerateWorkspace(
            "all samples coincide; the nearest-pair resolution is zero".into(),
        ));
    }
    // Start near the expected nearest-neighbour spacing and grow until a
    // positive pair is found; a pair closer than the cell size always lies
    // in the same or an adjacent cell, so each pass is exact for distances
    // below its cell size.
    let mut cell = (diag / (pts.len() as f64).cbrt()).max(diag * 1e-9);
    for _ in 0..64 {
        if let Some(best) = min_positive_distance_with_cell(&pts, &lo, cell) {
            return Ok(best);
        }
        cell *= 2.0;
    }
    Err(Error::DegenerateWorkspace(
        "no positive pairwise distance found".into(),
    ))
}

fn min_positive_distance_with_cell(
    pts: &[Vector3<f64>],
    lo: &Vector3<f64>,
    cell: f64,
) -> Option<f64> {
    use std::collections::HashMap;
    let mut buckets: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    let key = |p: &Vector3<f64>| {
        (
            ((p.x - lo.x) / cell).floor() as i64,
            ((p.y - lo.y) / cell).floor() as i64,
            ((p.z - lo.z) / cell).floor() as i64,
        )
    };
    for (n, p) in pts.iter().enumerate() {
        buckets.entry(key(p)).or_default().push(n);
    }
    let mut best = f64::INFINITY;
    for (n, p) in pts.iter().enumerate() {
        let (ci, cj, ck) = key(p);
        for di in -1..=1 {
            for dj in -1..=1 {
                for dk in -1..=1 {
                    if let Some(ids) = buckets.get(&(ci + di, cj + dj, ck + dk)) {
                        for &m in ids {
                            if m <= n {
                                continue;
                            }
                            let d = (pts[m] - p).norm();
                            if d > 0.0 && d < best {
                                best = d;
                            }
                        }
                    }
                }
            }
        }
    }
    // Only trust the scan when the found distance is within reach of the
    // neighbourhood search.
    (best <= cell).then_some(best)
}
