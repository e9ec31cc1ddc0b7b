//! Axis-aligned voxel grid holding a scalar field in `[0, 1]`.
//!
//! `origin` is the world-space center of the voxel at index (0, 0, 0); voxel
//! (i, j, k) covers the half-open cube centered at `origin + r * (i, j, k)`.
//! Values are stored densely in k-fastest order, matching the on-disk
//! layout.

use nalgebra::Vector3;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct VoxelGrid {
    origin: Vector3<f64>,
    resolution: f64,
    dims: [usize; 3],
    values: Vec<f64>,
}

impl VoxelGrid {
    pub fn zeros(origin: Vector3<f64>, resolution: f64, dims: [usize; 3]) -> Result<Self> {
        if !(resolution > 0.0) {
            return Err(Error::InvalidInput(format!(
                "voxel resolution must be positive, got {resolution}"
            )));
        }
        if dims.iter().any(|&n| n == 0) {
            return Err(Error::InvalidInput(format!(
                "grid dims must be at least 1 per axis, got {dims:?}"
            )));
        }
        let len = dims[0]
            .checked_mul(dims[1])
            .and_then(|v| v.checked_mul(dims[2]))
            .filter(|&v| v <= 1 << 28)
            .ok_or_else(|| {
                Error::InvalidInput(format!("grid dims {dims:?} exceed the supported size"))
            })?;
        Ok(VoxelGrid {
            origin,
            resolution,
            dims,
            values: vec![0.0; len],
        })
    }

    pub fn from_values(
        origin: Vector3<f64>,
        resolution: f64,
        dims: [usize; 3],
        values: Vec<f64>,
    ) -> Result<Self> {
        let mut grid = VoxelGrid::zeros(origin, resolution, dims)?;
        if values.len() != grid.values.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} values for dims {dims:?}, got {}",
                grid.values.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidInput(
                "voxel values must lie in [0, 1]".into(),
            ));
        }
        grid.values = values;
        Ok(grid)
    }

    pub fn origin(&self) -> Vector3<f64> {
        self.origin
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Flat storage, k-fastest: index = (i * ny + j) * nz + k.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn flat_index(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i < self.dims[0] && j < self.dims[1] && k < self.dims[2]);
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.flat_index(i, j, k)]
    }

    /// Signed-index lookup reading 0 outside the lattice.
    #[inline]
    pub fn value_or_zero(&self, i: i64, j: i64, k: i64) -> f64 {
        if i < 0
            || j < 0
            || k < 0
            || i >= self.dims[0] as i64
            || j >= self.dims[1] as i64
            || k >= self.dims[2] as i64
        {
            0.0
        } else {
            self.value(i as usize, j as usize, k as usize)
        }
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        debug_assert!((0.0..=1.0).contains(&v));
        let idx = self.flat_index(i, j, k);
        self.values[idx] = v;
    }

    /// Keep the larger of the stored and the incoming value.
    pub fn max_in(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let idx = self.flat_index(i, j, k);
        if v > self.values[idx] {
            self.values[idx] = v;
        }
    }

    pub fn voxel_center(&self, i: usize, j: usize, k: usize) -> Vector3<f64> {
        self.origin
            + self.resolution * Vector3::new(i as f64, j as f64, k as f64)
    }

    /// Voxel index containing a world point, or None when outside the lattice.
    pub fn world_to_index(&self, p: &Vector3<f64>) -> Option<[usize; 3]> {
        let mut idx = [0usize; 3];
        for axis in 0..3 {
            let t = ((p[axis] - self.origin[axis]) / self.resolution + 0.5).floor();
            if t < 0.0 || t >= self.dims[axis] as f64 {
                return None;
            }
            idx[axis] = t as usize;
        }
        Some(idx)
    }

    /// Number of voxels at or above the threshold; a zero threshold counts
    /// strictly positive voxels.
    pub fn occupied_count(&self, tau: f64) -> usize {
        if tau == 0.0 {
            self.values.iter().filter(|&&v| v > 0.0).count()
        } else {
            self.values.iter().filter(|&&v| v >= tau).count()
        }
    }

    /// Occupied volume in cubic meters at threshold `tau`.
    pub fn volume(&self, tau: f64) -> f64 {
        self.occupied_count(tau) as f64 * self.resolution.powi(3)
    }

    /// Same lattice: identical origin, resolution, and dims. Grids combined
    /// voxel-by-voxel must satisfy this exactly.
    pub fn same_lattice(&self, other: &VoxelGrid) -> bool {
        self.origin == other.origin
            && self.resolution == other.resolution
            && self.dims == other.dims
    }

    /// Re-embed this grid on an enlarged lattice whose voxel (0,0,0) sits at
    /// integer offset `shift` (in voxels) below this grid's first voxel.
    /// Cells outside the source stay zero. The lattices stay aligned because
    /// the new origin differs by an exact multiple of the resolution.
    pub fn embed(&self, shift: [i64; 3], dims: [usize; 3]) -> Result<VoxelGrid> {
        for axis in 0..3 {
            if (self.dims[axis] as i64) + shift[axis] > dims[axis] as i64 || shift[axis] < 0 {
                return Err(Error::InvalidInput(format!(
                    "embedding with shift {shift:?} does not fit dims {dims:?}"
                )));
            }
        }
        let origin = self.origin
            - self.resolution
                * Vector3::new(shift[0] as f64, shift[1] as f64, shift[2] as f64);
        let mut out = VoxelGrid::zeros(origin, self.resolution, dims)?;
        for i in 0..self.dims[0] {
            for j in 0..self.dims[1] {
                for k in 0..self.dims[2] {
                    out.set(
                        i + shift[0] as usize,
                        j + shift[1] as usize,
                        k + shift[2] as usize,
                        self.value(i, j, k),
                    );
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_with(values: &[(usize, usize, usize, f64)], dims: [usize; 3]) -> VoxelGrid {
        let mut g = VoxelGrid::zeros(Vector3::zeros(), 0.01, dims).unwrap();
        for &(i, j, k, v) in values {
            g.set(i, j, k, v);
        }
        g
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(VoxelGrid::zeros(Vector3::zeros(), 0.0, [1, 1, 1]).is_err());
        assert!(VoxelGrid::zeros(Vector3::zeros(), 0.01, [0, 1, 1]).is_err());
        assert!(VoxelGrid::from_values(Vector3::zeros(), 0.01, [1, 1, 1], vec![1.5]).is_err());
    }

    #[test]
    fn volume_counts_voxels_times_cell_volume() {
        let g = grid_with(
            &(0..10).map(|i| (i, 0, 0, 1.0)).collect::<Vec<_>>(),
            [10, 2, 2],
        );
        assert!((g.volume(0.0) - 10.0 * 1e-6).abs() < 1e-18);
        assert_eq!(VoxelGrid::zeros(Vector3::zeros(), 0.01, [3, 3, 3]).unwrap().volume(0.0), 0.0);
    }

    #[test]
    fn volume_monotone_nonincreasing_in_tau() {
        let g = grid_with(&[(0, 0, 0, 0.2), (1, 0, 0, 0.5), (1, 1, 0, 0.9)], [2, 2, 2]);
        let mut last = f64::INFINITY;
        for step in 0..=10 {
            let v = g.volume(step as f64 / 10.0);
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn world_round_trip() {
        let g = VoxelGrid::zeros(Vector3::new(0.5, -0.2, 0.0), 0.02, [4, 5, 6]).unwrap();
        for i in 0..4 {
            for j in 0..5 {
                for k in 0..6 {
                    let c = g.voxel_center(i, j, k);
                    assert_eq!(g.world_to_index(&c), Some([i, j, k]));
                }
            }
        }
        assert_eq!(g.world_to_index(&Vector3::new(5.0, 0.0, 0.0)), None);
    }

    #[test]
    fn embed_preserves_values_and_alignment() {
        let g = grid_with(&[(0, 0, 0, 0.7), (1, 1, 1, 0.3)], [2, 2, 2]);
        let e = g.embed([1, 2, 0], [4, 5, 2]).unwrap();
        assert_eq!(e.value(1, 2, 0), 0.7);
        assert_eq!(e.value(2, 3, 1), 0.3);
        assert_eq!(e.occupied_count(0.0), 2);
        assert_eq!(e.voxel_center(1, 2, 0), g.voxel_center(0, 0, 0));
    }
}
