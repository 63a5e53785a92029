//! Adaptive Dormand–Prince 5(4) integrator for small complex linear systems.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::loop_core::Mat2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at t = {t:.6} (h = {h:.3e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("exceeded {max_steps} steps at t = {t:.6}")]
    TooManySteps { t: f64, max_steps: usize },
    #[error("non-finite state at t = {t:.6}")]
    NonFinite { t: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Smallest step allowed, relative to the integration span.
    pub h_min: f64,
}

impl Default for OdeConfig {
    fn default() -> Self {
        OdeConfig {
            rtol: 1e-10,
            atol: 1e-10,
            max_steps: 200_000,
            h_min: 1e-13,
        }
    }
}

impl OdeConfig {
    pub fn with_tol(tol: f64) -> Self {
        OdeConfig {
            rtol: tol,
            atol: tol,
            ..OdeConfig::default()
        }
    }
}

/// State vectors the integrator can advance.
pub trait OdeState: Copy {
    /// `self + s·other`
    fn add_scaled(&self, other: &Self, s: f64) -> Self;
    fn scaled(&self, s: f64) -> Self;
    /// Weighted max-norm of `err` scaled by `atol + rtol·max(|y0|, |y1|)`.
    fn err_norm(err: &Self, y0: &Self, y1: &Self, atol: f64, rtol: f64) -> f64;
    fn finite(&self) -> bool;
}

impl OdeState for Mat2 {
    fn add_scaled(&self, other: &Self, s: f64) -> Self {
        *self + *other * s
    }

    fn scaled(&self, s: f64) -> Self {
        *self * s
    }

    fn err_norm(err: &Self, y0: &Self, y1: &Self, atol: f64, rtol: f64) -> f64 {
        let mut worst = 0.0_f64;
        for r in 0..2 {
            for c in 0..2 {
                let sc = atol + rtol * y0.0[r][c].norm().max(y1.0[r][c].norm());
                worst = worst.max(err.0[r][c].norm() / sc);
            }
        }
        worst
    }

    fn finite(&self) -> bool {
        self.is_finite()
    }
}

impl<const N: usize> OdeState for [C64; N] {
    fn add_scaled(&self, other: &Self, s: f64) -> Self {
        let mut out = *self;
        for (o, x) in out.iter_mut().zip(other) {
            *o += *x * s;
        }
        out
    }

    fn scaled(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    fn err_norm(err: &Self, y0: &Self, y1: &Self, atol: f64, rtol: f64) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..N {
            let sc = atol + rtol * y0[i].norm().max(y1[i].norm());
            worst = worst.max(err[i].norm() / sc);
        }
        worst
    }

    fn finite(&self) -> bool {
        self.iter().all(|z| z.is_finite())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

// Dormand–Prince tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b − b̂ (error weights)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `y' = f(t, y)` from `t0` to `t1`.
///
/// `h0` is an initial step guess (pass `None` to pick one automatically).
/// Returns the final state, the last accepted step size and step counts.
pub fn integrate<S, F>(
    mut f: F,
    t0: f64,
    t1: f64,
    y0: S,
    h0: Option<f64>,
    cfg: &OdeConfig,
) -> Result<(S, f64, OdeStats), OdeError>
where
    S: OdeState,
    F: FnMut(f64, &S) -> S,
{
    let span = t1 - t0;
    let mut stats = OdeStats::default();
    if span == 0.0 {
        return Ok((y0, 0.0, stats));
    }
    let dir = span.signum();
    let len = span.abs();
    let h_min = cfg.h_min * len;
    let mut h = h0.map(f64::abs).unwrap_or(0.01 * len).min(len).max(h_min);
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);

    while dir * (t1 - t) > 0.0 {
        if stats.accepted + stats.rejected >= cfg.max_steps {
            return Err(OdeError::TooManySteps {
                t,
                max_steps: cfg.max_steps,
            });
        }
        let remaining = (t1 - t).abs();
        let last = h >= remaining;
        let hs = if last { remaining } else { h } * dir;

        let k2 = f(t + C2 * hs, &y.add_scaled(&k1, A21 * hs));
        let y3 = y.add_scaled(&k1, A31 * hs).add_scaled(&k2, A32 * hs);
        let k3 = f(t + C3 * hs, &y3);
        let y4 = y
            .add_scaled(&k1, A41 * hs)
            .add_scaled(&k2, A42 * hs)
            .add_scaled(&k3, A43 * hs);
        let k4 = f(t + C4 * hs, &y4);
        let y5 = y
            .add_scaled(&k1, A51 * hs)
            .add_scaled(&k2, A52 * hs)
            .add_scaled(&k3, A53 * hs)
            .add_scaled(&k4, A54 * hs);
        let k5 = f(t + C5 * hs, &y5);
        let y6 = y
            .add_scaled(&k1, A61 * hs)
            .add_scaled(&k2, A62 * hs)
            .add_scaled(&k3, A63 * hs)
            .add_scaled(&k4, A64 * hs)
            .add_scaled(&k5, A65 * hs);
        let k6 = f(t + hs, &y6);
        let y_new = y
            .add_scaled(&k1, B1 * hs)
            .add_scaled(&k3, B3 * hs)
            .add_scaled(&k4, B4 * hs)
            .add_scaled(&k5, B5 * hs)
            .add_scaled(&k6, B6 * hs);
        let k7 = f(t + hs, &y_new);
        let err = k1
            .scaled(E1 * hs)
            .add_scaled(&k3, E3 * hs)
            .add_scaled(&k4, E4 * hs)
            .add_scaled(&k5, E5 * hs)
            .add_scaled(&k6, E6 * hs)
            .add_scaled(&k7, E7 * hs);
        let en = S::err_norm(&err, &y, &y_new, cfg.atol, cfg.rtol);

        if !y_new.finite() || !en.is_finite() {
            return Err(OdeError::NonFinite { t });
        }
        let factor = if en == 0.0 {
            5.0
        } else {
            (0.9 * en.powf(-0.2)).clamp(0.2, 5.0)
        };
        if en <= 1.0 {
            stats.accepted += 1;
            t = if last { t1 } else { t + hs };
            y = y_new;
            k1 = k7;
            if !last {
                h = (h * factor).max(h_min);
            }
        } else {
            stats.rejected += 1;
            let h_next = h * factor.min(1.0);
            if h_next < h_min {
                return Err(OdeError::StepUnderflow { t, h: h_next });
            }
            h = h_next;
        }
    }
    Ok((y, h, stats))
}
