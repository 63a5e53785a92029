use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use thiserror::Error;

use super::SurfaceMesh;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("axis fit failed: ring centroids do not spread along a line")]
    AxisFit,
    #[error("profile too short ({0} rings)")]
    TooShort(usize),
}

/// Meridian data of a tube-like mesh about its fitted axis, one entry per
/// ring `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    pub axis_point: Vector3<f64>,
    pub axis_dir: Vector3<f64>,
    /// Axial coordinate of each ring centroid.
    pub axial: Vec<f64>,
    /// Mean vertex distance from the axis per ring.
    pub radius: Vec<f64>,
    /// `radius · sign(d axial / d i)`: flips sign where the meridian runs
    /// backwards along the axis.
    pub signed_radius: Vec<f64>,
    /// Arclength of the meridian `(axial, radius)` from ring 0.
    pub arclength: Vec<f64>,
    /// Spread `stddev / mean` of all vertex distances from the axis.
    pub radius_rel_std: f64,
}

impl RadialProfile {
    pub fn has_sign_change(&self) -> bool {
        self.signed_radius.windows(2).any(|w| w[0] * w[1] < 0.0)
    }

    /// Period of `radius` in ring units, from the first autocorrelation
    /// maximum after the first zero crossing.
    pub fn period_rings(&self) -> Option<f64> {
        autocorrelation_period(&self.radius)
    }

    /// Period in arclength, after resampling `radius` uniformly in arclength.
    pub fn period_arclength(&self) -> Option<f64> {
        let total = *self.arclength.last()?;
        let n = 4 * self.radius.len();
        let ds = total / (n - 1) as f64;
        let r: Vec<f64> = (0..n).map(|j| self.radius_at(j as f64 * ds)).collect();
        autocorrelation_period(&r).map(|p| p * ds)
    }

    /// Radius at arclength `s` (linear interpolation, clamped).
    pub fn radius_at(&self, s: f64) -> f64 {
        let a = &self.arclength;
        let j = a.partition_point(|&x| x < s);
        if j == 0 {
            return self.radius[0];
        }
        if j >= a.len() {
            return self.radius[a.len() - 1];
        }
        let t = (s - a[j - 1]) / (a[j] - a[j - 1]).max(f64::MIN_POSITIVE);
        self.radius[j - 1] + t * (self.radius[j] - self.radius[j - 1])
    }
}

fn autocorrelation_period(x: &[f64]) -> Option<f64> {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let d: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let c0: f64 = d.iter().map(|v| v * v).sum();
    if c0 <= 1e-24 * n as f64 {
        return None;
    }
    let ac: Vec<f64> = (0..n / 2 + 1)
        .map(|lag| {
            let s: f64 = (0..n - lag).map(|j| d[j] * d[j + lag]).sum();
            s / (n - lag) as f64 * n as f64 / c0
        })
        .collect();
    let first_neg = ac.iter().position(|&v| v < 0.0)?;
    let lag = (first_neg + 1..ac.len() - 1)
        .find(|&l| ac[l] >= ac[l - 1] && ac[l] >= ac[l + 1] && ac[l] > 0.3)?;
    // parabolic refinement
    let (a, b, c) = (ac[lag - 1], ac[lag], ac[lag + 1]);
    let den = a - 2.0 * b + c;
    let shift = if den.abs() > 1e-300 { 0.5 * (a - c) / den } else { 0.0 };
    Some(lag as f64 + shift)
}

/// Fits the axis through the ring centroids (principal direction) and
/// measures every ring about it.
pub fn radial_profile(mesh: &SurfaceMesh) -> Result<RadialProfile, ProfileError> {
    let (nr, na) = (mesh.n_radial, mesh.n_angular);
    if nr < 3 {
        return Err(ProfileError::TooShort(nr));
    }
    let centroids: Vec<Vector3<f64>> = (0..nr)
        .map(|i| (0..na).map(|k| mesh.vertex(i, k)).sum::<Vector3<f64>>() / na as f64)
        .collect();
    let c = centroids.iter().sum::<Vector3<f64>>() / nr as f64;
    let cov = centroids
        .iter()
        .map(|p| (p - c) * (p - c).transpose())
        .sum::<Matrix3<f64>>();
    let e = SymmetricEigen::new(cov);
    let top = e.eigenvalues.imax();
    if e.eigenvalues[top].is_nan() || e.eigenvalues[top] <= 1e-20 {
        return Err(ProfileError::AxisFit);
    }
    let mut dir: Vector3<f64> = e.eigenvectors.column(top).into_owned();
    // orient along increasing ring index
    if dir.dot(&(centroids[nr - 1] - centroids[0])) < 0.0 {
        dir = -dir;
    }
    let dist = |x: &Vector3<f64>| {
        let v = x - c;
        (v - dir * dir.dot(&v)).norm()
    };
    let axial: Vec<f64> = centroids.iter().map(|p| dir.dot(&(p - c))).collect();
    let radius: Vec<f64> = (0..nr)
        .map(|i| (0..na).map(|k| dist(&mesh.vertex(i, k))).sum::<f64>() / na as f64)
        .collect();
    let signed_radius = (0..nr)
        .map(|i| {
            let (a, b) = if i + 1 < nr { (i, i + 1) } else { (i - 1, i) };
            radius[i] * (axial[b] - axial[a]).signum()
        })
        .collect();
    let mut arclength = vec![0.0];
    for i in 1..nr {
        let step = ((axial[i] - axial[i - 1]).powi(2) + (radius[i] - radius[i - 1]).powi(2)).sqrt();
        arclength.push(arclength[i - 1] + step);
    }
    let all: Vec<f64> = mesh.vertices.iter().map(dist).collect();
    let mean = all.iter().sum::<f64>() / all.len() as f64;
    let var = all.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / all.len() as f64;
    Ok(RadialProfile {
        axis_point: c,
        axis_dir: dir,
        axial,
        radius,
        signed_radius,
        arclength,
        radius_rel_std: var.sqrt() / mean,
    })
}

/// Relative sup-deviation between the meridian radii of `cylinder` and
/// `reference` near ring 0 (the `z → 0` end), over `n_periods` periods of
/// the reference, after the best arclength shift of the reference.
pub fn end_comparison(
    cylinder: &SurfaceMesh,
    reference: &SurfaceMesh,
    n_periods: usize,
) -> Result<f64, ProfileError> {
    let a = radial_profile(cylinder)?;
    let b = radial_profile(reference)?;
    let len_a = *a.arclength.last().unwrap_or(&0.0);
    let len_b = *b.arclength.last().unwrap_or(&0.0);
    let period = b.period_arclength();
    let window = period.map_or(len_a, |p| (n_periods.max(1) as f64 * p).min(len_a));
    let max_shift = period.unwrap_or(0.0).min((len_b - window).max(0.0));
    let scale = b.radius.iter().sum::<f64>() / b.radius.len() as f64;
    let samples = 200;
    let shifts = if max_shift > 0.0 { 200 } else { 0 };
    let mut best = f64::INFINITY;
    for t in 0..=shifts {
        let delta = if shifts == 0 { 0.0 } else { max_shift * t as f64 / shifts as f64 };
        let dev = (0..=samples)
            .map(|j| {
                let s = window * j as f64 / samples as f64;
                (a.radius_at(s) - b.radius_at(s + delta)).abs()
            })
            .fold(0.0_f64, f64::max);
        best = best.min(dev);
    }
    Ok(best / scale)
}
