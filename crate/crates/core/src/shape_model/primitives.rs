//! Procedural closed meshes used as fixtures and as the base of the
//! bundled low-resolution asteroid model.

use alloc::vec::Vec;

use nalgebra::Vector3;

use super::TriangleMesh;
use crate::math::{cos, sin};

/// Axis-aligned cube of edge length `side` centered on the origin.
pub fn cube(side: f64) -> TriangleMesh {
    let h = side / 2.0;
    let vertices = (0..8)
        .map(|i| {
            Vector3::new(
                if i & 1 == 0 { -h } else { h },
                if i & 2 == 0 { -h } else { h },
                if i & 4 == 0 { -h } else { h },
            )
        })
        .collect();
    // two triangles per side, counterclockwise seen from outside
    let faces = alloc::vec![
        [0, 2, 3], [0, 3, 1], // -z
        [4, 5, 7], [4, 7, 6], // +z
        [0, 1, 5], [0, 5, 4], // -y
        [2, 6, 7], [2, 7, 3], // +y
        [0, 4, 6], [0, 6, 2], // -x
        [1, 3, 7], [1, 7, 5], // +x
    ];
    TriangleMesh::new(vertices, faces).expect("cube connectivity is valid")
}

/// Regular tetrahedron with vertices on the unit sphere.
pub fn tetrahedron() -> TriangleMesh {
    let s = 1.0 / crate::math::sqrt(3.0);
    let vertices = alloc::vec![
        Vector3::new(s, s, s),
        Vector3::new(s, -s, -s),
        Vector3::new(-s, s, -s),
        Vector3::new(-s, -s, s),
    ];
    let faces = alloc::vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]];
    TriangleMesh::new(vertices, faces).expect("tetrahedron connectivity is valid")
}

/// Latitude/longitude sphere with `longitudes` segments and `bands` latitude
/// bands (`bands >= 2`). Face count is `2 * longitudes * (bands - 1)`.
///
/// # Panics
///
/// If `longitudes < 3` or `bands < 2`.
pub fn uv_sphere(radius: f64, longitudes: usize, bands: usize) -> TriangleMesh {
    assert!(longitudes >= 3 && bands >= 2);
    let pi = core::f64::consts::PI;
    let mut vertices = Vec::with_capacity(2 + longitudes * (bands - 1));
    vertices.push(Vector3::new(0.0, 0.0, radius));
    for ring in 1..bands {
        let polar = pi * ring as f64 / bands as f64;
        for k in 0..longitudes {
            let azimuth = 2.0 * pi * k as f64 / longitudes as f64;
            vertices.push(
                Vector3::new(
                    sin(polar) * cos(azimuth),
                    sin(polar) * sin(azimuth),
                    cos(polar),
                ) * radius,
            );
        }
    }
    let south = vertices.len();
    vertices.push(Vector3::new(0.0, 0.0, -radius));

    let ring_index = |ring: usize, k: usize| 1 + (ring - 1) * longitudes + k % longitudes;
    let mut faces = Vec::with_capacity(2 * longitudes * (bands - 1));
    for k in 0..longitudes {
        faces.push([0, ring_index(1, k), ring_index(1, k + 1)]);
    }
    for ring in 1..bands - 1 {
        for k in 0..longitudes {
            let (a, b) = (ring_index(ring, k), ring_index(ring, k + 1));
            let (c, d) = (ring_index(ring + 1, k), ring_index(ring + 1, k + 1));
            faces.push([a, c, d]);
            faces.push([a, d, b]);
        }
    }
    for k in 0..longitudes {
        faces.push([south, ring_index(bands - 1, k + 1), ring_index(bands - 1, k)]);
    }
    TriangleMesh::new(vertices, faces).expect("uv sphere connectivity is valid")
}

/// Elongated, necked 64-face body with Itokawa's approximate extents
/// (535 x 294 x 209 m), centered on its center of volume.
///
/// The shape is a 8 x 5 [`uv_sphere`] stretched per axis, with the two
/// short axes pinched near `x = +0.2` of the half length.
pub fn itokawa_like() -> TriangleMesh {
    let (a, b, c) = (267.5, 147.0, 104.5);
    uv_sphere(1.0, 8, 5)
        .map_vertices(|v| {
            let d = (v.x - 0.2) / 0.3;
            let neck = 1.0 - 0.3 * crate::math::exp(-d * d);
            Vector3::new(a * v.x, b * v.y * neck, c * v.z * neck)
        })
        .centered()
}
