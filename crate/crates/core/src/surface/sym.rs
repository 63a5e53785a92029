use nalgebra::Vector3;

use super::SurfaceError;
use crate::loop_core::{LambdaGrid, Mat2};

/// Immersion point and frame data at one domain node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymPoint {
    pub position: Vector3<f64>,
    /// `F σ₃ F⁻¹` at `λ = 1` in Pauli coordinates.
    pub normal: Vector3<f64>,
    /// Distance of `(∂λF)F⁻¹` from the Hermitian trace-free matrices.
    pub hermitian_defect: f64,
}

/// Largest accepted Hermitian defect before a frame family is flagged.
pub const SYM_DEFECT_LIMIT: f64 = 1e-5;

/// `f = (∂λF) F⁻¹` at `λ = 1`, with `∂λF` from the Fourier coefficients of
/// the samples, mapped to ℝ³ by `f = Σ xᵢ σᵢ`.
pub fn sym_bobenko(grid: &LambdaGrid, f: &[Mat2]) -> Result<SymPoint, SurfaceError> {
    let d = grid.derivative_at_one(f)?;
    let f1 = f[0];
    let inv = f1.inverse().ok_or(SurfaceError::SingularFrame)?;
    let x = d * inv;
    let hermitian_defect = x.hermitian_defect();
    if hermitian_defect.is_nan() || hermitian_defect > SYM_DEFECT_LIMIT {
        return Err(SurfaceError::NotHermitian(hermitian_defect));
    }
    let n = f1 * Mat2::pauli()[2] * inv;
    Ok(SymPoint {
        position: Vector3::from(x.pauli_coordinates()),
        normal: Vector3::from(n.pauli_coordinates()),
        hermitian_defect,
    })
}
