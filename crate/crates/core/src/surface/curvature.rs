use nalgebra::Vector3;

use super::SurfaceMesh;

/// Discrete mean curvature over the interior vertices.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HStats {
    pub mean: f64,
    pub stddev: f64,
    /// Vertices included in the statistics.
    pub count: usize,
    /// Triangles skipped for having area below [`DEGENERATE_AREA`].
    pub degenerate_triangles: usize,
}

impl HStats {
    /// `stddev / |mean|`
    pub fn relative_spread(&self) -> f64 {
        self.stddev / self.mean.abs()
    }
}

pub const DEGENERATE_AREA: f64 = 1e-14;

/// Rings skipped at each radial end.
pub const BOUNDARY_RINGS: usize = 2;

fn cot(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.dot(b) / a.cross(b).norm()
}

/// Mean-curvature normal `Δx` (cotangent Laplacian over the mixed Voronoi
/// area) at every vertex; vertices without any valid triangle get `None`.
fn laplacian(mesh: &SurfaceMesh) -> (Vec<Option<Vector3<f64>>>, usize) {
    let n = mesh.vertices.len();
    let mut lap = vec![Vector3::zeros(); n];
    let mut area = vec![0.0; n];
    let mut degenerate = 0;
    for f in &mesh.faces {
        for tri in [[f[0], f[1], f[2]], [f[0], f[2], f[3]]] {
            let p = tri.map(|i| mesh.vertices[i]);
            let a = 0.5 * (p[1] - p[0]).cross(&(p[2] - p[0])).norm();
            if a.is_nan() || a < DEGENERATE_AREA {
                degenerate += 1;
                continue;
            }
            for k in 0..3 {
                let (i, j, o) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
                let (pi, pj, po) = (mesh.vertices[i], mesh.vertices[j], mesh.vertices[o]);
                // the angle at o faces edge ij
                let w = 0.5 * cot(&(pi - po), &(pj - po));
                lap[i] += (pj - pi) * w;
                lap[j] += (pi - pj) * w;
            }
            // mixed Voronoi area
            for k in 0..3 {
                let (i, j, o) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
                let (pi, pj, po) = (mesh.vertices[i], mesh.vertices[j], mesh.vertices[o]);
                let obtuse_at = |q: Vector3<f64>, r: Vector3<f64>, s: Vector3<f64>| (r - q).dot(&(s - q)) < 0.0;
                if obtuse_at(pi, pj, po) {
                    area[i] += a / 2.0;
                } else if obtuse_at(pj, po, pi) || obtuse_at(po, pi, pj) {
                    area[i] += a / 4.0;
                } else {
                    area[i] += 0.125
                        * ((pj - pi).norm_squared() * cot(&(pi - po), &(pj - po))
                            + (po - pi).norm_squared() * cot(&(pi - pj), &(po - pj)));
                }
            }
        }
    }
    let out = lap
        .into_iter()
        .zip(area)
        .map(|(l, a)| if a > 0.0 { Some(l / a) } else { None })
        .collect();
    (out, degenerate)
}

/// Per-vertex mean curvature `H = ½‖Δx‖`, signed so that `Δx = −2H n`
/// (a sphere with outward normals has `H > 0`).
pub fn vertex_mean_curvature(mesh: &SurfaceMesh) -> (Vec<Option<f64>>, usize) {
    let (lap, degenerate) = laplacian(mesh);
    let h = lap
        .into_iter()
        .zip(&mesh.normals)
        .map(|(l, n)| {
            l.map(|l| {
                let s = if l.dot(n) > 0.0 { -1.0 } else { 1.0 };
                0.5 * l.norm() * s
            })
        })
        .collect();
    (h, degenerate)
}

/// Statistics of the discrete mean curvature, skipping the two outermost
/// rings at each radial end.
pub fn mean_curvature_stats(mesh: &SurfaceMesh) -> HStats {
    let (h, degenerate) = vertex_mean_curvature(mesh);
    let na = mesh.n_angular;
    let lo = BOUNDARY_RINGS;
    let hi = mesh.n_radial.saturating_sub(BOUNDARY_RINGS);
    let vals: Vec<f64> = (lo..hi)
        .flat_map(|i| (0..na).map(move |k| i * na + k))
        .filter_map(|v| h[v])
        .filter(|x| x.is_finite())
        .collect();
    let count = vals.len();
    if count == 0 {
        return HStats {
            mean: f64::NAN,
            stddev: f64::NAN,
            count,
            degenerate_triangles: degenerate,
        };
    }
    let mean = vals.iter().sum::<f64>() / count as f64;
    let var = vals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / count as f64;
    HStats {
        mean,
        stddev: var.sqrt(),
        count,
        degenerate_triangles: degenerate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn round_cylinder() {
        let (nr, na) = (64, 64);
        let mesh = SurfaceMesh::from_grid_fn(nr, na, |i, k| {
            let th = 2.0 * PI * k as f64 / na as f64;
            Vector3::new(th.cos(), th.sin(), 4.0 * i as f64 / (nr - 1) as f64)
        });
        let s = mean_curvature_stats(&mesh);
        assert!((s.mean.abs() - 0.5).abs() <= 0.01, "{s:?}");
        assert!(s.relative_spread() < 1e-6);
    }

    #[test]
    fn unit_sphere_outward() {
        let (nr, na) = (64, 64);
        let mesh = SurfaceMesh::from_grid_fn(nr, na, |i, k| {
            let ph = 0.2 + (PI - 0.4) * i as f64 / (nr - 1) as f64;
            let th = 2.0 * PI * k as f64 / na as f64;
            Vector3::new(ph.sin() * th.cos(), ph.sin() * th.sin(), ph.cos())
        });
        // orient normals outward
        let mut mesh = mesh;
        let flip = mesh.vertices.iter().zip(&mesh.normals).map(|(p, n)| p.dot(n)).sum::<f64>() < 0.0;
        if flip {
            mesh.normals.iter_mut().for_each(|n| *n = -*n);
        }
        let s = mean_curvature_stats(&mesh);
        assert!((s.mean - 1.0).abs() <= 0.02, "{s:?}");
    }

    #[test]
    fn degenerate_triangles_are_counted() {
        let mesh = SurfaceMesh::from_grid_fn(6, 8, |_, _| Vector3::zeros());
        let s = mean_curvature_stats(&mesh);
        assert_eq!(s.degenerate_triangles, 2 * 5 * 8);
        assert_eq!(s.count, 0);
    }
}
