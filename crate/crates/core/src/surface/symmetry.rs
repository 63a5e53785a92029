use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64 as C64;

use super::SurfaceMesh;
use crate::loop_core::Mat2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetryReport {
    /// Unit normal of the fitted plane `n·x = offset`.
    pub normal: Vector3<f64>,
    pub offset: f64,
    /// Largest `|ρ(x(u, θ)) − x(u, −θ)|` over the bounding-box diagonal.
    pub max_deviation: f64,
    /// Largest `|ρ(ρ(x)) − x|` over the bounding-box diagonal.
    pub involution_residual: f64,
}

/// Reflection `x ↦ x − 2(n·x − c)n`.
pub fn reflect(x: &Vector3<f64>, normal: &Vector3<f64>, offset: f64) -> Vector3<f64> {
    x - normal * (2.0 * (normal.dot(x) - offset))
}

pub fn reflect_mesh(mesh: &SurfaceMesh, normal: &Vector3<f64>, offset: f64) -> SurfaceMesh {
    let vertices = mesh.vertices.iter().map(|x| reflect(x, normal, offset)).collect();
    let normals = mesh
        .normals
        .iter()
        .map(|v| v - normal * (2.0 * normal.dot(v)))
        .collect();
    let mut out = SurfaceMesh::from_grid(mesh.n_radial, mesh.n_angular, vertices, Some(normals));
    out.seam_residual = mesh.seam_residual;
    out.iwasawa = mesh.iwasawa;
    out.sym_defect = mesh.sym_defect;
    out
}

fn eigen(m: Matrix3<f64>) -> (Vector3<f64>, Matrix3<f64>) {
    let e = SymmetricEigen::new(m);
    (e.eigenvalues, e.eigenvectors)
}

/// Fits the plane mapping vertex `(i, k)` to `(i, −k)`: its normal is the
/// dominant direction of the pair differences, its offset the mean height
/// of the pair midpoints. When all differences vanish the plane of least
/// midpoint spread is used.
pub fn reflection_symmetry_check(mesh: &SurfaceMesh) -> SymmetryReport {
    let na = mesh.n_angular;
    let pairs: Vec<(usize, usize)> = (0..mesh.n_radial)
        .flat_map(|i| (0..na).map(move |k| (i * na + k, i * na + (na - k) % na)))
        .collect();
    let mut dd = Matrix3::zeros();
    let mut mids = Vec::with_capacity(pairs.len());
    for &(a, b) in &pairs {
        let (xa, xb) = (mesh.vertices[a], mesh.vertices[b]);
        let d = xa - xb;
        dd += d * d.transpose();
        mids.push((xa + xb) * 0.5);
    }
    let (vals, vecs) = eigen(dd);
    let top = vals.imax();
    let normal = if vals[top] > 0.0 {
        vecs.column(top).into_owned()
    } else {
        let c = mids.iter().sum::<Vector3<f64>>() / mids.len() as f64;
        let cov = mids
            .iter()
            .map(|m| (m - c) * (m - c).transpose())
            .sum::<Matrix3<f64>>();
        let (v, e) = eigen(cov);
        e.column(v.imin()).into_owned()
    };
    let offset = mids.iter().map(|m| normal.dot(m)).sum::<f64>() / mids.len() as f64;
    let diag = mesh.bbox_diagonal();
    let mut max_dev = 0.0_f64;
    let mut invol = 0.0_f64;
    for &(a, b) in &pairs {
        let ra = reflect(&mesh.vertices[a], &normal, offset);
        max_dev = max_dev.max((ra - mesh.vertices[b]).norm());
        invol = invol.max((reflect(&ra, &normal, offset) - mesh.vertices[a]).norm());
    }
    SymmetryReport {
        normal,
        offset,
        max_deviation: max_dev / diag,
        involution_residual: invol / diag,
    }
}

/// Frame-level reflection factor `R(λ) = conj(Φ₀(1/λ̄)) G⁻¹ Φ₀(λ)⁻¹` with
/// `G = diag(1/λ, λ)`.
pub fn reflection_r<F>(phi0: F, lambda: C64) -> Option<Mat2>
where
    F: Fn(C64) -> Mat2,
{
    let g_inv = Mat2::diag(lambda, 1.0 / lambda);
    let mirrored = phi0(1.0 / lambda.conj()).conj();
    Some(mirrored * g_inv * phi0(lambda).inverse()?)
}
