//! From unitary frames to meshes in ℝ³: the Sym formula, mesh assembly on
//! an annulus, discrete mean curvature, reflection symmetry and radial
//! profile diagnostics.

mod curvature;
mod profile;
mod sym;
mod symmetry;

pub use curvature::{
    mean_curvature_stats, vertex_mean_curvature, HStats, BOUNDARY_RINGS, DEGENERATE_AREA,
};
pub use profile::{end_comparison, radial_profile, ProfileError, RadialProfile};
pub use sym::{sym_bobenko, SymPoint, SYM_DEFECT_LIMIT};
pub use symmetry::{reflect_mesh, reflection_r, reflection_symmetry_check, SymmetryReport};

use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::exec;
use crate::flow::{self, FlowConfig, FlowError, PathSpec};
use crate::iwasawa::{iwasawa_factor, IwasawaConfig, IwasawaError, IwasawaResiduals};
use crate::loop_core::{LambdaGrid, LoopError, Mat2};
use crate::potential::{
    CylinderParams, CylinderPotential, DelaunayPotential, DelaunayResidue, Potential,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("frame integration failed at node ({row}, {col}): {source}")]
    Flow {
        row: usize,
        col: usize,
        #[source]
        source: FlowError,
    },
    #[error("Iwasawa factorization failed at node ({row}, {col}), z = {z}: {source}")]
    Iwasawa {
        row: usize,
        col: usize,
        z: C64,
        #[source]
        source: IwasawaError,
    },
    #[error("Sym output not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("singular frame at λ = 1")]
    SingularFrame,
    #[error("Sym formula failed at node ({row}, {col}): {source}")]
    Sym {
        row: usize,
        col: usize,
        #[source]
        source: Box<SurfaceError>,
    },
    #[error(transparent)]
    Loop(#[from] LoopError),
}

/// Annulus `ρ_min ≤ |z| ≤ ρ_max` sampled at `z = exp(u_i + iθ_k)`, with `u`
/// uniform in log radius and `θ_k = 2πk / n_angular`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainGrid {
    pub rho_min: f64,
    pub rho_max: f64,
    pub n_radial: usize,
    pub n_angular: usize,
}

impl DomainGrid {
    pub fn new(
        rho_min: f64,
        rho_max: f64,
        n_radial: usize,
        n_angular: usize,
    ) -> Result<Self, SurfaceError> {
        if !(rho_min > 0.0 && rho_max > rho_min && rho_max.is_finite()) {
            return Err(SurfaceError::InvalidDomain(format!(
                "need 0 < rho_min < rho_max, got [{rho_min}, {rho_max}]"
            )));
        }
        if n_radial < 2 {
            return Err(SurfaceError::InvalidDomain(format!(
                "n_radial must be at least 2, got {n_radial}"
            )));
        }
        if n_angular < 8 {
            return Err(SurfaceError::InvalidDomain(format!(
                "n_angular must be at least 8, got {n_angular}"
            )));
        }
        Ok(DomainGrid {
            rho_min,
            rho_max,
            n_radial,
            n_angular,
        })
    }

    pub fn u(&self, i: usize) -> f64 {
        let (a, b) = (self.rho_min.ln(), self.rho_max.ln());
        a + (b - a) * i as f64 / (self.n_radial - 1) as f64
    }

    /// `θ_k` for `k = 0..=n_angular` (the last one is the seam copy at 2π).
    pub fn theta(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.n_angular as f64
    }

    pub fn w(&self, i: usize, k: usize) -> C64 {
        C64::new(self.u(i), self.theta(k))
    }

    pub fn z(&self, i: usize, k: usize) -> C64 {
        self.w(i, k).exp()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineConfig {
    pub flow: FlowConfig,
    pub iwasawa: IwasawaConfig,
    /// Vertices are `x + c·n` with `x` the Sym point and `n = Fσ₃F⁻¹`.
    /// `0` keeps the bare Sym formula.
    pub normal_shift: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            flow: FlowConfig::default(),
            iwasawa: IwasawaConfig::default(),
            normal_shift: 0.0,
        }
    }
}

impl PipelineConfig {
    pub fn with_degree(degree: usize) -> Self {
        PipelineConfig {
            iwasawa: IwasawaConfig::with_degree(degree),
            ..Default::default()
        }
    }
}

/// Grid-structured surface. Vertex `(i, k)` sits at `i * n_angular + k`;
/// the seam column `θ = 2π` is welded onto `θ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceMesh {
    pub n_radial: usize,
    pub n_angular: usize,
    pub vertices: Vec<Vector3<f64>>,
    /// Quads `(i,k), (i,k+1), (i+1,k+1), (i+1,k)`.
    pub faces: Vec<[usize; 4]>,
    pub normals: Vec<Vector3<f64>>,
    pub h_stats: HStats,
    /// `max_i |x(i, 0) − x(i, 2π)|` over the bounding-box diagonal.
    pub seam_residual: f64,
    /// Worst factorization residuals over all nodes.
    pub iwasawa: IwasawaResiduals,
    /// Worst Hermitian defect of the Sym output.
    pub sym_defect: f64,
}

impl SurfaceMesh {
    /// Assembles a welded grid mesh. Without `normals`, area-weighted face
    /// normals are used.
    pub fn from_grid(
        n_radial: usize,
        n_angular: usize,
        vertices: Vec<Vector3<f64>>,
        normals: Option<Vec<Vector3<f64>>>,
    ) -> Self {
        assert_eq!(vertices.len(), n_radial * n_angular);
        let faces = grid_faces(n_radial, n_angular);
        let normals = normals.unwrap_or_else(|| face_normals(&vertices, &faces));
        let mut mesh = SurfaceMesh {
            n_radial,
            n_angular,
            vertices,
            faces,
            normals,
            h_stats: HStats::default(),
            seam_residual: 0.0,
            iwasawa: IwasawaResiduals::default(),
            sym_defect: 0.0,
        };
        mesh.h_stats = mean_curvature_stats(&mesh);
        mesh
    }

    /// Samples an analytic parametrization `f(i, k)`.
    pub fn from_grid_fn<F>(n_radial: usize, n_angular: usize, f: F) -> Self
    where
        F: Fn(usize, usize) -> Vector3<f64>,
    {
        let vertices = (0..n_radial)
            .flat_map(|i| (0..n_angular).map(move |k| (i, k)))
            .map(|(i, k)| f(i, k))
            .collect();
        Self::from_grid(n_radial, n_angular, vertices, None)
    }

    pub fn vertex(&self, i: usize, k: usize) -> Vector3<f64> {
        self.vertices[i * self.n_angular + k % self.n_angular]
    }

    pub fn bbox_diagonal(&self) -> f64 {
        bbox_diagonal(&self.vertices)
    }

    pub fn is_finite(&self) -> bool {
        self.vertices.iter().all(|v| v.iter().all(|x| x.is_finite()))
    }
}

fn grid_faces(nr: usize, na: usize) -> Vec<[usize; 4]> {
    let mut faces = Vec::with_capacity(nr.saturating_sub(1) * na);
    for i in 0..nr.saturating_sub(1) {
        for k in 0..na {
            let k1 = (k + 1) % na;
            faces.push([i * na + k, i * na + k1, (i + 1) * na + k1, (i + 1) * na + k]);
        }
    }
    faces
}

fn face_normals(vertices: &[Vector3<f64>], faces: &[[usize; 4]]) -> Vec<Vector3<f64>> {
    let mut n = vec![Vector3::zeros(); vertices.len()];
    for f in faces {
        let p = f.map(|i| vertices[i]);
        // twice the vector area of the quad
        let a = (p[2] - p[0]).cross(&(p[3] - p[1]));
        for &i in f {
            n[i] += a;
        }
    }
    n.into_iter()
        .map(|v| {
            let l = v.norm();
            if l > 0.0 {
                v / l
            } else {
                v
            }
        })
        .collect()
}

pub(crate) fn bbox_diagonal(points: &[Vector3<f64>]) -> f64 {
    let mut lo = Vector3::repeat(f64::INFINITY);
    let mut hi = Vector3::repeat(f64::NEG_INFINITY);
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (hi - lo).norm()
}

/// λ-sampled frames `Φ(z_{ik})` for `k = 0..=n_angular`, stored row-major
/// as `out[i * (n_angular + 1) + k]`.
///
/// One angular sweep along `|z| = 1` from `z₀ = 1`, then radial rays from
/// each circle point outward and inward through the grid radii.
pub fn frames_on_grid(
    xi: &dyn Potential,
    phi0: &[Mat2],
    dom: &DomainGrid,
    grid: &LambdaGrid,
    cfg: &FlowConfig,
) -> Result<Vec<Vec<Mat2>>, SurfaceError> {
    let lambdas = grid.points();
    let m = lambdas.len();
    let cols = dom.n_angular + 1;
    let ring: Vec<C64> = (0..cols).map(|k| C64::new(0.0, dom.theta(k))).collect();
    let sweep = PathSpec::polyline(&ring).map_err(|source| SurfaceError::Flow {
        row: 0,
        col: 0,
        source,
    })?;
    let circle = flow::integrate_frame(xi, &sweep, phi0, &lambdas, cfg)
        .map_err(|source| SurfaceError::Flow {
            row: 0,
            col: 0,
            source,
        })?
        .frames;

    // radial order: rows with u ≥ 0 outward, rows with u < 0 inward
    let outward: Vec<usize> = (0..dom.n_radial).filter(|&i| dom.u(i) >= 0.0).collect();
    let inward: Vec<usize> = (0..dom.n_radial).rev().filter(|&i| dom.u(i) < 0.0).collect();
    let poles = xi.poles();

    let rays = exec::map_range(cfg.parallelism, cols * m, |idx| {
        let (k, j) = (idx / m, idx % m);
        let start = circle[k][j];
        let mut out = vec![Mat2::zero(); dom.n_radial];
        for rows in [&outward, &inward] {
            if rows.is_empty() {
                continue;
            }
            let mut ws = vec![C64::new(0.0, dom.theta(k))];
            ws.extend(rows.iter().map(|&i| dom.w(i, k)));
            let fail = |source| SurfaceError::Flow {
                row: rows[0],
                col: k,
                source,
            };
            let path = PathSpec::polyline(&ws).map_err(fail)?;
            path.check_poles(&poles, cfg.pole_clearance).map_err(fail)?;
            let (fs, _) = flow::integrate_single(xi, &path, start, lambdas[j], &cfg.ode)
                .map_err(|source| SurfaceError::Flow {
                    row: rows[0],
                    col: k,
                    source,
                })?;
            for (&i, f) in rows.iter().zip(&fs[1..]) {
                out[i] = *f;
            }
        }
        Ok::<_, SurfaceError>(out)
    });

    let mut nodes = vec![Vec::with_capacity(m); dom.n_radial * cols];
    for (idx, r) in rays.into_iter().enumerate() {
        let k = idx / m;
        for (i, f) in r?.into_iter().enumerate() {
            nodes[i * cols + k].push(f);
        }
    }
    Ok(nodes)
}

/// Full pipeline for a potential `ξ` with initial frames `Φ₀(λ)` at `z₀ = 1`.
pub fn build_mesh(
    xi: &dyn Potential,
    phi0: &[Mat2],
    dom: &DomainGrid,
    grid: &LambdaGrid,
    cfg: &PipelineConfig,
) -> Result<SurfaceMesh, SurfaceError> {
    let nodes = frames_on_grid(xi, phi0, dom, grid, &cfg.flow)?;
    let cols = dom.n_angular + 1;
    let points = exec::map_range(cfg.flow.parallelism, nodes.len(), |idx| {
        let (i, k) = (idx / cols, idx % cols);
        let pair = iwasawa_factor(grid, &nodes[idx], &cfg.iwasawa).map_err(|source| {
            SurfaceError::Iwasawa {
                row: i,
                col: k,
                z: dom.z(i, k),
                source,
            }
        })?;
        let p = sym_bobenko(grid, &pair.f).map_err(|e| SurfaceError::Sym {
            row: i,
            col: k,
            source: Box::new(e),
        })?;
        Ok::<_, SurfaceError>((p, pair.residuals))
    });

    let na = dom.n_angular;
    let mut all = Vec::with_capacity(points.len());
    let mut iwasawa = IwasawaResiduals::default();
    let mut sym_defect = 0.0_f64;
    for r in points {
        let (p, res) = r?;
        iwasawa = iwasawa.max(&res);
        sym_defect = sym_defect.max(p.hermitian_defect);
        all.push(p);
    }
    let pos = |p: &SymPoint| p.position + p.normal * cfg.normal_shift;
    let mut vertices = Vec::with_capacity(dom.n_radial * na);
    let mut normals = Vec::with_capacity(dom.n_radial * na);
    for i in 0..dom.n_radial {
        for k in 0..na {
            let p = &all[i * cols + k];
            vertices.push(pos(p));
            normals.push(p.normal);
        }
    }
    let diag = bbox_diagonal(&vertices);
    let seam = (0..dom.n_radial)
        .map(|i| (pos(&all[i * cols]) - pos(&all[i * cols + na])).norm())
        .fold(0.0_f64, f64::max);
    let mut mesh = SurfaceMesh::from_grid(dom.n_radial, na, vertices, Some(normals));
    mesh.seam_residual = seam / diag;
    mesh.iwasawa = iwasawa;
    mesh.sym_defect = sym_defect;
    Ok(mesh)
}

/// CMC cylinder mesh for the Bessel-type potential with parameter `r`,
/// started from the unitarizing initial frames.
pub fn build_surface(
    p: &CylinderParams,
    dom: &DomainGrid,
    grid: &LambdaGrid,
    cfg: &PipelineConfig,
) -> Result<SurfaceMesh, SurfaceError> {
    let lambdas = grid.points();
    let phi0 = flow::cylinder_initial_frames(p, &lambdas, &cfg.flow).map_err(|source| {
        SurfaceError::Flow {
            row: 0,
            col: 0,
            source,
        }
    })?;
    build_mesh(&CylinderPotential::new(*p), &phi0, dom, grid, cfg)
}

/// Delaunay surface from the pure residue potential `A dz/z`, `Φ₀ = I`.
pub fn delaunay_reference(
    res: &DelaunayResidue,
    dom: &DomainGrid,
    grid: &LambdaGrid,
    cfg: &PipelineConfig,
) -> Result<SurfaceMesh, SurfaceError> {
    let phi0 = vec![Mat2::identity(); grid.len()];
    build_mesh(&DelaunayPotential::new(*res), &phi0, dom, grid, cfg)
}
