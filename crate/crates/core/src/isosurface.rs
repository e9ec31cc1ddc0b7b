//! Marching-cubes isosurface extraction from a voxel grid.
//!
//! The scalar field lives at voxel centers, so a grid with dims (nx, ny, nz)
//! yields (nx-1)(ny-1)(nz-1) marching cells. Vertices on shared cell edges
//! are deduplicated through a lattice-edge key, which is what makes closed
//! surfaces watertight (every mesh edge bounded by exactly two triangles).
//! Vertex coordinates are in world space (meters).

use std::collections::HashMap;

use nalgebra::Vector3;

use crate::grid::VoxelGrid;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<Vector3<f64>>,
    pub triangles: Vec<[usize; 3]>,
}

impl TriangleMesh {
    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Sum of triangle areas.
    pub fn area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = *t;
                let u = self.vertices[b] - self.vertices[a];
                let v = self.vertices[c] - self.vertices[a];
                0.5 * u.cross(&v).norm()
            })
            .sum()
    }

    /// Counts of (boundary, non-manifold) undirected edges. A watertight
    /// mesh has zero of both: every edge appears in exactly two triangles.
    pub fn edge_defects(&self) -> (usize, usize) {
        let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                let key = (a.min(b), a.max(b));
                *counts.entry(key).or_insert(0) += 1;
            }
        }
        let boundary = counts.values().filter(|&&c| c == 1).count();
        let nonmanifold = counts.values().filter(|&&c| c > 2).count();
        (boundary, nonmanifold)
    }

    pub fn is_watertight(&self) -> bool {
        !self.is_empty() && self.edge_defects() == (0, 0)
    }
}

/// Cube corner offsets in (i, j, k) lattice steps.
const CORNER_OFFSETS: [[usize; 3]; 8] = [
    [0, 0, 0],
    [1, 0, 0],
    [1, 1, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 0, 1],
    [1, 1, 1],
    [0, 1, 1],
];

/// The two corners joined by each of the 12 cube edges.
const EDGE_CORNERS: [[usize; 2]; 12] = [
    [0, 1],
    [1, 2],
    [2, 3],
    [3, 0],
    [4, 5],
    [5, 6],
    [6, 7],
    [7, 4],
    [0, 4],
    [1, 5],
    [2, 6],
    [3, 7],
];

/// Extract the level set of the grid's scalar field at `isovalue`.
///
/// Empty when no cell straddles the isovalue (in particular for grids
/// thinner than 2 voxels on any axis).
pub fn extract_isosurface(grid: &VoxelGrid, isovalue: f64) -> TriangleMesh {
    let [nx, ny, nz] = grid.dims();
    let mut mesh = TriangleMesh::default();
    if nx < 2 || ny < 2 || nz < 2 {
        return mesh;
    }

    // Lattice-point pair -> deduplicated mesh vertex.
    let mut edge_vertices: HashMap<(usize, usize), usize> = HashMap::new();
    let point_id = |p: [usize; 3]| (p[0] * ny + p[1]) * nz + p[2];

    for i in 0..nx - 1 {
        for j in 0..ny - 1 {
            for k in 0..nz - 1 {
                let corners: [[usize; 3]; 8] = std::array::from_fn(|c| {
                    std::array::from_fn(|ax| [i, j, k][ax] + CORNER_OFFSETS[c][ax])
                });
                let values: [f64; 8] = std::array::from_fn(|c| {
                    grid.value(corners[c][0], corners[c][1], corners[c][2])
                });

                let mut cube_index = 0usize;
                for (c, &v) in values.iter().enumerate() {
                    if v < isovalue {
                        cube_index |= 1 << c;
                    }
                }
                if cube_index == 0 || cube_index == 255 {
                    continue;
                }

                let row = &TRIANGLE_TABLE[cube_index];
                let mut tri = [0usize; 3];
                for (n, &edge) in row.iter().take_while(|&&e| e >= 0).enumerate() {
                    let [ca, cb] = EDGE_CORNERS[edge as usize];
                    let (pa, pb) = (corners[ca], corners[cb]);
                    let (ida, idb) = (point_id(pa), point_id(pb));
                    let key = (ida.min(idb), ida.max(idb));
                    let vid = *edge_vertices.entry(key).or_insert_with(|| {
                        // Interpolate in canonical (sorted-key) order so both
                        // adjacent cells compute bit-identical coordinates.
                        let (lo_pt, hi_pt) = if ida <= idb { (pa, pb) } else { (pb, pa) };
                        let v_lo = grid.value(lo_pt[0], lo_pt[1], lo_pt[2]);
                        let v_hi = grid.value(hi_pt[0], hi_pt[1], hi_pt[2]);
                        let t = if v_hi == v_lo {
                            0.5
                        } else {
                            ((isovalue - v_lo) / (v_hi - v_lo)).clamp(0.0, 1.0)
                        };
                        let a = grid.voxel_center(lo_pt[0], lo_pt[1], lo_pt[2]);
                        let b = grid.voxel_center(hi_pt[0], hi_pt[1], hi_pt[2]);
                        mesh.vertices.push(a + t * (b - a));
                        mesh.vertices.len() - 1
                    });
                    tri[n % 3] = vid;
                    if n % 3 == 2 {
                        mesh.triangles.push(tri);
                    }
                }
            }
        }
    }
    mesh
}

/// Standard marching-cubes triangulation table: for each of the 256 corner
/// sign patterns, the cube edges forming up to five triangles, -1 terminated.
#[rustfmt::skip]
const TRIANGLE_TABLE: [[i8; 16]; 256] = [
TRI_TABLE_BODY
];
