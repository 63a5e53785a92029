//! Integration of `dΦ = Φξ` in the logarithmic coordinate `w = log z`,
//! monodromies around the puncture and the closing conditions.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::exec::{self, Parallelism};
use crate::loop_core::{LambdaGrid, LoopError, Mat2};
use crate::ode::{self, OdeConfig, OdeError, OdeStats};
use crate::potential::{
    cylinder_alpha, mu_eigenvalue, CylinderParams, CylinderPotential, DelaunayResidue, Pole,
    Potential, PotentialError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("path passes within {distance:.3e} of the pole at {pole}")]
    PathHitsPole { pole: C64, distance: f64 },
    #[error("path segments are not contiguous at segment {0}")]
    Discontinuous(usize),
    #[error("empty path")]
    EmptyPath,
    #[error("integration failed near z = {z} (λ = {lambda}): {source}")]
    Integration {
        z: C64,
        lambda: C64,
        #[source]
        source: OdeError,
    },
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Loop(#[from] LoopError),
    #[error("initial frame count {got} does not match {expected} λ samples")]
    InitialFrames { expected: usize, got: usize },
    #[error("singular initial frame at λ = {0}")]
    SingularInitial(C64),
}

/// Straight segment `w₀ → w₁` in `w = log z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub w0: C64,
    pub w1: C64,
}

impl Segment {
    pub fn w_at(&self, s: f64) -> C64 {
        self.w0 + (self.w1 - self.w0) * s
    }

    pub fn z_at(&self, s: f64) -> C64 {
        self.w_at(s).exp()
    }
}

/// Piecewise-straight path on the universal cover of ℂ*, given in `w = log z`.
/// A full counterclockwise circle is the segment `w → w + 2πi`.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSpec {
    segments: Vec<Segment>,
}

impl PathSpec {
    pub fn new(segments: Vec<Segment>) -> Result<Self, FlowError> {
        if segments.is_empty() {
            return Err(FlowError::EmptyPath);
        }
        for (i, pair) in segments.windows(2).enumerate() {
            if (pair[0].w1 - pair[1].w0).norm() > 1e-12 {
                return Err(FlowError::Discontinuous(i + 1));
            }
        }
        Ok(PathSpec { segments })
    }

    /// Polyline through the given `w` values.
    pub fn polyline(ws: &[C64]) -> Result<Self, FlowError> {
        PathSpec::new(
            ws.windows(2)
                .map(|p| Segment { w0: p[0], w1: p[1] })
                .collect(),
        )
    }

    /// Straight in `w` between the principal logarithms of `z0` and `z1`.
    pub fn between(z0: C64, z1: C64) -> Self {
        PathSpec {
            segments: vec![Segment {
                w0: z0.ln(),
                w1: z1.ln(),
            }],
        }
    }

    /// `turns` circles around the origin starting at `z0`
    /// (counterclockwise for positive `turns`).
    pub fn loop_around_origin(z0: C64, turns: f64) -> Self {
        let w0 = z0.ln();
        PathSpec {
            segments: vec![Segment {
                w0,
                w1: w0 + C64::new(0.0, 2.0 * PI * turns),
            }],
        }
    }

    /// Radial ray from `z0` to modulus `rho`.
    pub fn radial(z0: C64, rho: f64) -> Self {
        let w0 = z0.ln();
        PathSpec {
            segments: vec![Segment {
                w0,
                w1: C64::new(rho.ln(), w0.im),
            }],
        }
    }

    pub fn concat(&self, other: &PathSpec) -> Result<PathSpec, FlowError> {
        let mut segs = self.segments.clone();
        segs.extend_from_slice(&other.segments);
        PathSpec::new(segs)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn start_w(&self) -> C64 {
        self.segments[0].w0
    }

    pub fn end_w(&self) -> C64 {
        self.segments[self.segments.len() - 1].w1
    }

    /// Rejects paths that come within `min_dist` of a pole. The origin is
    /// never on the path since `z = e^w ≠ 0`, but it still must keep the
    /// distance (very small `|z|` is as bad as a pole numerically).
    pub fn check_poles(&self, poles: &[Pole], min_dist: f64) -> Result<(), FlowError> {
        const SAMPLES: usize = 256;
        for p in poles {
            for seg in &self.segments {
                let dist = |s: f64| (seg.z_at(s) - p.z).norm();
                let step = 1.0 / SAMPLES as f64;
                let best = (0..=SAMPLES)
                    .min_by(|&i, &j| dist(i as f64 * step).total_cmp(&dist(j as f64 * step)))
                    .unwrap_or(0);
                // refine around the closest sample by ternary search
                let (mut lo, mut hi) = (
                    (best as f64 - 1.0).max(0.0) * step,
                    (best as f64 + 1.0).min(SAMPLES as f64) * step,
                );
                for _ in 0..80 {
                    let m1 = lo + (hi - lo) / 3.0;
                    let m2 = hi - (hi - lo) / 3.0;
                    if dist(m1) < dist(m2) {
                        hi = m2;
                    } else {
                        lo = m1;
                    }
                }
                let d = dist(0.5 * (lo + hi)).min(dist(best as f64 * step));
                if d < min_dist {
                    return Err(FlowError::PathHitsPole {
                        pole: p.z,
                        distance: d,
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowConfig {
    pub ode: OdeConfig,
    pub parallelism: Parallelism,
    /// Minimum distance the path keeps from the poles.
    pub pole_clearance: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            ode: OdeConfig::default(),
            parallelism: Parallelism::default(),
            pole_clearance: 1e-6,
        }
    }
}

/// Frame values at the path start and at every segment end, per λ sample.
#[derive(Clone, Debug)]
pub struct FrameSolution {
    pub basepoint: C64,
    pub lambdas: Vec<C64>,
    /// `w` at each checkpoint (start, then each segment end).
    pub ws: Vec<C64>,
    /// `frames[c][j]`: frame at checkpoint `c` for λ sample `j`.
    pub frames: Vec<Vec<Mat2>>,
    /// Largest `|det Φ − det Φ₀|` along the checkpoints.
    pub det_drift: f64,
    pub stats: OdeStats,
}

impl FrameSolution {
    pub fn last(&self) -> &[Mat2] {
        &self.frames[self.frames.len() - 1]
    }
}

/// Integrates `dΦ/ds = Φ ξ(e^w, λ) e^w w′(s)` along each segment for one λ.
/// Returns the frame at the start and at every segment end.
pub fn integrate_single(
    xi: &dyn Potential,
    path: &PathSpec,
    phi0: Mat2,
    lambda: C64,
    ode_cfg: &OdeConfig,
) -> Result<(Vec<Mat2>, OdeStats), FlowError> {
    let mut out = Vec::with_capacity(path.segments.len() + 1);
    out.push(phi0);
    let mut phi = phi0;
    let mut stats = OdeStats::default();
    let mut h = None;
    for seg in &path.segments {
        let dw = seg.w1 - seg.w0;
        let mut failure: Option<PotentialError> = None;
        let rhs = |s: f64, p: &Mat2| {
            let z = seg.z_at(s);
            match xi.eval(z, lambda) {
                Ok(x) => *p * x * (z * dw),
                Err(e) => {
                    failure.get_or_insert(e);
                    Mat2::zero()
                }
            }
        };
        let res = ode::integrate(rhs, 0.0, 1.0, phi, h, ode_cfg);
        if let Some(e) = failure {
            return Err(e.into());
        }
        let (next, h_last, st) = res.map_err(|source| {
            let t = match &source {
                OdeError::StepUnderflow { t, .. }
                | OdeError::TooManySteps { t, .. }
                | OdeError::NonFinite { t } => *t,
            };
            FlowError::Integration {
                z: seg.z_at(t),
                lambda,
                source,
            }
        })?;
        stats.accepted += st.accepted;
        stats.rejected += st.rejected;
        h = Some(h_last);
        phi = next;
        out.push(phi);
    }
    Ok((out, stats))
}

/// Solves `dΦ = Φξ`, `Φ(z₀) = Φ₀(λ)` along `path` for every λ sample
/// (independently, possibly in parallel).
pub fn integrate_frame(
    xi: &dyn Potential,
    path: &PathSpec,
    phi0: &[Mat2],
    lambdas: &[C64],
    cfg: &FlowConfig,
) -> Result<FrameSolution, FlowError> {
    if phi0.len() != lambdas.len() {
        return Err(FlowError::InitialFrames {
            expected: lambdas.len(),
            got: phi0.len(),
        });
    }
    path.check_poles(&xi.poles(), cfg.pole_clearance)?;
    let per_lambda = exec::map_range(cfg.parallelism, lambdas.len(), |j| {
        integrate_single(xi, path, phi0[j], lambdas[j], &cfg.ode)
    });
    let n_check = path.segments.len() + 1;
    let mut frames = vec![Vec::with_capacity(lambdas.len()); n_check];
    let mut stats = OdeStats::default();
    let mut det_drift = 0.0_f64;
    for (j, r) in per_lambda.into_iter().enumerate() {
        let (fs, st) = r?;
        stats.accepted += st.accepted;
        stats.rejected += st.rejected;
        let d0 = phi0[j].det();
        for (c, f) in fs.into_iter().enumerate() {
            det_drift = det_drift.max((f.det() - d0).norm());
            frames[c].push(f);
        }
    }
    let mut ws = vec![path.start_w()];
    ws.extend(path.segments.iter().map(|s| s.w1));
    Ok(FrameSolution {
        basepoint: path.start_w().exp(),
        lambdas: lambdas.to_vec(),
        ws,
        frames,
        det_drift,
        stats,
    })
}

/// Monodromy `M = Φ(τz₀) Φ(z₀)⁻¹` around the origin from `z₀ = 1` with
/// initial frames `Φ₀(λ)`.
pub fn monodromy_with_initial(
    xi: &dyn Potential,
    phi0: &[Mat2],
    lambdas: &[C64],
    cfg: &FlowConfig,
) -> Result<Vec<Mat2>, FlowError> {
    let path = PathSpec::loop_around_origin(C64::new(1.0, 0.0), 1.0);
    let sol = integrate_frame(xi, &path, phi0, lambdas, cfg)?;
    sol.last()
        .iter()
        .zip(phi0)
        .zip(lambdas)
        .map(|((end, p0), &l)| {
            p0.inverse()
                .map(|inv| *end * inv)
                .ok_or(FlowError::SingularInitial(l))
        })
        .collect()
}

/// Monodromy with `z₀ = 1` and `Φ₀ = I`.
pub fn monodromy(
    xi: &dyn Potential,
    lambdas: &[C64],
    cfg: &FlowConfig,
) -> Result<Vec<Mat2>, FlowError> {
    monodromy_with_initial(xi, &vec![Mat2::identity(); lambdas.len()], lambdas, cfg)
}

/// Residuals of the three closing conditions (and optionally the trace law).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonodromyReport {
    /// `max_λ ‖M M* − I‖∞`
    pub unitarity_error: f64,
    /// `min(‖M(1) − I‖∞, ‖M(1) + I‖∞)`
    pub identity_error: f64,
    /// `+1` if `M(1)` is closer to `I`, `−1` if closer to `−I`.
    pub identity_sign: i32,
    /// `‖∂λM(1)‖∞`
    pub derivative_error: f64,
    pub trace_law_error: Option<f64>,
}

/// Closing-condition residuals of a monodromy sampled on `grid`
/// (sample 0 is `λ = 1`).
pub fn closing_report(grid: &LambdaGrid, m: &[Mat2]) -> Result<MonodromyReport, LoopError> {
    let unitarity_error = m.iter().fold(0.0_f64, |acc, x| acc.max(x.unitarity_defect()));
    let plus = (m[0] - Mat2::identity()).norm_inf();
    let minus = (m[0] + Mat2::identity()).norm_inf();
    let derivative_error = grid.derivative_at_one(m)?.norm_inf();
    Ok(MonodromyReport {
        unitarity_error,
        identity_error: plus.min(minus),
        identity_sign: if plus <= minus { 1 } else { -1 },
        derivative_error,
        trace_law_error: None,
    })
}

/// `exp(2πi A(λ)) = cos(2πμ) I + i sin(2πμ)/μ · A(λ)` for trace-free `A`
/// with eigenvalues `±μ`; the `μ → 0` limit is `I + 2πi A`.
pub fn exp_delaunay_monodromy(res: &DelaunayResidue, lambda: C64) -> Mat2 {
    let a = res.matrix(lambda);
    let mu = mu_eigenvalue(res, lambda);
    let x = 2.0 * PI * mu;
    let (cos, sin_over_mu) = if x.norm() < 1e-4 {
        let x2 = x * x;
        (
            1.0 - x2 / 2.0 + x2 * x2 / 24.0,
            2.0 * PI * (1.0 - x2 / 6.0 + x2 * x2 / 120.0),
        )
    } else {
        (x.cos(), x.sin() / mu)
    };
    Mat2::identity() * cos + a * (C64::i() * sin_over_mu)
}

/// Sign relating `tr M_c` to `2cos(2πμ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceSign {
    /// `tr M_c = −2cos(2πμ)`: the gauge `diag(z^{1/2}, z^{−1/2})` changes
    /// sign once around the origin, so the gauged monodromy is `−M_c`.
    Flipped,
    /// `tr M_c = 2cos(2πμ)`, the law without the sign change.
    Plain,
}

/// `max_λ |tr M(λ) ∓ 2cos(2πμ(λ))|`.
pub fn trace_law_error(res: &DelaunayResidue, lambdas: &[C64], m: &[Mat2], sign: TraceSign) -> f64 {
    let s = match sign {
        TraceSign::Flipped => -1.0,
        TraceSign::Plain => 1.0,
    };
    lambdas.iter().zip(m).fold(0.0_f64, |acc, (&l, x)| {
        let law = 2.0 * (2.0 * PI * mu_eigenvalue(res, l)).cos();
        acc.max((x.trace() - law * s).norm())
    })
}

/// Integrates the monodromy of `ξ_c` and checks `tr M_c = −2cos(2πμ)`.
pub fn trace_law_check(
    xi_c: &dyn Potential,
    res: &DelaunayResidue,
    grid: &LambdaGrid,
    cfg: &FlowConfig,
) -> Result<f64, FlowError> {
    let lambdas = grid.points();
    let m = monodromy(xi_c, &lambdas, cfg)?;
    Ok(trace_law_error(res, &lambdas, &m, TraceSign::Flipped))
}

/// `k > 0` with `diag(k, 1/k) M diag(1/k, k) ∈ SU₂`, read off the entries:
/// `k⁴ = −M₂₁ / conj(M₁₂)`. `None` if the ratio is not real positive.
pub fn numeric_unitarizer(m: &Mat2) -> Option<f64> {
    let (m12, m21) = (m.get(0, 1), m.get(1, 0));
    if m12.norm() < 1e-12 && m21.norm() < 1e-12 {
        return Some(1.0);
    }
    let k4 = -m21 / m12.conj();
    if !k4.is_finite() || k4.re <= 0.0 || k4.im.abs() > 1e-6 * k4.re {
        return None;
    }
    Some(k4.re.powf(0.25))
}

/// Closed form of the unitarizer for the cylinder potential at λ on the
/// unit circle, from the Frobenius solutions `f± = z^{1/2±α} S±(z)` of
/// `y″ = (−1 + (4α²−1)/(4z²)) y`:
/// `k⁴ = −(f₊′/f₊)(f₋′/f₋)` at `z = 1`.
///
/// `None` near the resonances `α ∈ ℤ` or when a solution vanishes at `z = 1`.
pub fn cylinder_unitarizer(r: f64, lambda: C64) -> Option<f64> {
    const TERMS: usize = 40;
    let alpha = cylinder_alpha(r, lambda);
    let mut k4 = C64::new(-1.0, 0.0);
    for a in [alpha, -alpha] {
        let mut poch = C64::new(1.0, 0.0);
        let mut fact = 1.0;
        let mut quarter = 1.0;
        let mut s = C64::new(0.0, 0.0);
        let mut ds = C64::new(0.0, 0.0);
        for m in 0..TERMS {
            if m > 0 {
                let f = a + m as f64;
                if f.norm() < 1e-6 {
                    return None;
                }
                poch *= f;
                fact *= m as f64;
                quarter *= 0.25;
            }
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let term = sign * quarter / (fact * poch);
            s += term;
            ds += term * (2.0 * m as f64);
        }
        if s.norm() < 1e-10 {
            return None;
        }
        k4 *= 0.5 + a + ds / s;
    }
    if !k4.is_finite() || k4.re <= 0.0 || k4.im.abs() > 1e-8 * k4.re {
        return None;
    }
    Some(k4.re.powf(0.25))
}

/// Initial frames `Φ₀(λ) = diag(k, 1/k)` that make the cylinder monodromy
/// (from `z₀ = 1`) special unitary on the circle while keeping `M(1) = I`.
/// Falls back to the numeric unitarizer near resonances.
pub fn cylinder_initial_frames(
    p: &CylinderParams,
    lambdas: &[C64],
    cfg: &FlowConfig,
) -> Result<Vec<Mat2>, FlowError> {
    let xi = CylinderPotential::new(*p);
    let mut ks: Vec<Option<f64>> = lambdas.iter().map(|&l| cylinder_unitarizer(p.r(), l)).collect();
    let missing: Vec<usize> = (0..ks.len()).filter(|&j| ks[j].is_none()).collect();
    if !missing.is_empty() {
        let ls: Vec<C64> = missing.iter().map(|&j| lambdas[j]).collect();
        let m = monodromy(&xi, &ls, cfg)?;
        for (&j, mj) in missing.iter().zip(&m) {
            ks[j] = Some(numeric_unitarizer(mj).unwrap_or(1.0));
        }
    }
    Ok(ks
        .into_iter()
        .map(|k| {
            let k = C64::from(k.unwrap_or(1.0));
            Mat2::diag(k, 1.0 / k)
        })
        .collect())
}
