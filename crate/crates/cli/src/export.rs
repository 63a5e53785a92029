//! ASCII OBJ and PLY writers. Numbers use the shortest round-trip form, so
//! identical meshes give identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use dpw_cmc::surface::SurfaceMesh;

use crate::config::MeshFormat;
use crate::CliError;

pub fn to_obj(mesh: &SurfaceMesh) -> String {
    let mut s = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(s, "v {} {} {}", v.x, v.y, v.z);
    }
    for f in &mesh.faces {
        let _ = writeln!(s, "f {} {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1, f[3] + 1);
    }
    s
}

pub fn to_ply(mesh: &SurfaceMesh) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "ply\nformat ascii 1.0\nelement vertex {}\nproperty double x\nproperty double y\nproperty double z\n\
         property double nx\nproperty double ny\nproperty double nz\n\
         element face {}\nproperty list uchar int vertex_indices\nend_header\n",
        mesh.vertices.len(),
        mesh.faces.len()
    );
    for (v, n) in mesh.vertices.iter().zip(&mesh.normals) {
        let _ = writeln!(s, "{} {} {} {} {} {}", v.x, v.y, v.z, n.x, n.y, n.z);
    }
    for f in &mesh.faces {
        let _ = writeln!(s, "4 {} {} {} {}", f[0], f[1], f[2], f[3]);
    }
    s
}

pub fn export_mesh(mesh: &SurfaceMesh, format: MeshFormat, path: &Path) -> Result<(), CliError> {
    let text = match format {
        MeshFormat::Obj => to_obj(mesh),
        MeshFormat::Ply => to_ply(mesh),
    };
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector3;

    fn grid(nr: usize, na: usize) -> SurfaceMesh {
        SurfaceMesh::from_grid_fn(nr, na, |i, k| {
            let t = k as f64 / na as f64 * std::f64::consts::TAU;
            Vector3::new(t.cos(), t.sin(), i as f64)
        })
    }

    #[test]
    fn single_quad() {
        let m = SurfaceMesh {
            faces: vec![[0, 1, 2, 3]],
            ..SurfaceMesh::from_grid(1, 4, vec![Vector3::zeros(); 4], Some(vec![Vector3::z(); 4]))
        };
        let obj = to_obj(&m);
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 4);
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).collect::<Vec<_>>(), ["f 1 2 3 4"]);
    }

    #[test]
    fn welded_grid_counts() {
        let m = grid(5, 8);
        let obj = to_obj(&m);
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 40);
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 32);
        let ply = to_ply(&m);
        assert!(ply.contains("element vertex 40\n") && ply.contains("element face 32\n"));
        assert_eq!(ply.lines().count(), 12 + 40 + 32);
    }

    #[test]
    fn output_is_byte_stable() {
        assert_eq!(to_obj(&grid(6, 8)), to_obj(&grid(6, 8)));
        assert_eq!(to_ply(&grid(6, 8)), to_ply(&grid(6, 8)));
    }
}
