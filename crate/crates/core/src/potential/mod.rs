//! Holomorphic potentials `ξ(z, λ) dz` and the gauge action on them.
//!
//! A [`Potential`] returns the `dz`-coefficient of the 1-form as a trace-free
//! 2×2 matrix. The concrete potentials are the Bessel potential, the cylinder
//! potential built from it, and the pure Delaunay residue `A dz/z`.

mod gauge;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::loop_core::{LaurentLoop, Mat2};

pub use gauge::{
    gauge_derivative_defect, BranchCut, ConstantGauge, CylinderResidueGauge, Gauge,
    HalfPowerLambdaGauge, IdentityGauge, LowerShearGauge, ProductGauge, SqrtZGauge,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error("evaluation at pole z = {z}")]
    Pole { z: C64 },
    #[error("gauge is singular at z = {z}, λ = {lambda}")]
    SingularGauge { z: C64, lambda: C64 },
    #[error("point z = {z}, λ = {lambda} lies on the gauge branch cut")]
    BranchCut { z: C64, lambda: C64 },
    #[error("r = {0} is outside the legal range (-inf, 1) \\ {{0}}")]
    InvalidCylinder(f64),
    #[error("Delaunay residue needs a + b = 1/2, got a + b = {0}")]
    InvalidResidue(f64),
}

/// Isolated singularity of a potential.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pole {
    pub z: C64,
    pub order: u32,
}

/// Meromorphic sl₂(ℂ)-valued potential, evaluated as the coefficient of `dz`.
pub trait Potential: Send + Sync {
    fn eval(&self, z: C64, lambda: C64) -> Result<Mat2, PotentialError>;
    fn poles(&self) -> Vec<Pole>;
    fn label(&self) -> String;
}

impl<P: Potential + ?Sized> Potential for Arc<P> {
    fn eval(&self, z: C64, lambda: C64) -> Result<Mat2, PotentialError> {
        (**self).eval(z, lambda)
    }
    fn poles(&self) -> Vec<Pole> {
        (**self).poles()
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

const POLE_EPS: f64 = 1e-300;

fn check_origin(z: C64) -> Result<(), PotentialError> {
    if z.norm() <= POLE_EPS {
        Err(PotentialError::Pole { z })
    } else {
        Ok(())
    }
}

/// `t(λ) = −¼ λ⁻¹ (λ − 1)²`; on the unit circle `t = (1 − cos θ)/2 ∈ [0, 1]`.
pub fn t_of_lambda(lambda: C64) -> C64 {
    let d = lambda - 1.0;
    -0.25 * d * d / lambda
}

/// `Q_t(z, λ) = −r t/(4z²) − 1`.
pub fn q_t(r: f64, z: C64, lambda: C64) -> C64 {
    -r * t_of_lambda(lambda) / (4.0 * z * z) - 1.0
}

/// `α(λ) = ½ √(1 − r t(λ))`, principal branch.
pub fn cylinder_alpha(r: f64, lambda: C64) -> C64 {
    0.5 * (1.0 - r * t_of_lambda(lambda)).sqrt()
}

/// Validated cylinder parameter `r ∈ (−∞, 1) \ {0}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CylinderParams {
    r: f64,
}

impl CylinderParams {
    pub fn new(r: f64) -> Result<Self, PotentialError> {
        if !r.is_finite() || r >= 1.0 || r == 0.0 {
            return Err(PotentialError::InvalidCylinder(r));
        }
        Ok(CylinderParams { r })
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

/// Off-diagonal Delaunay residue `A = [[c, aλ⁻¹+b], [aλ+b, −c]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DelaunayResidue {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl DelaunayResidue {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, PotentialError> {
        let s = a + b;
        if !(a.is_finite() && b.is_finite() && c.is_finite()) || (s - 0.5).abs() > 1e-14 {
            return Err(PotentialError::InvalidResidue(s));
        }
        Ok(DelaunayResidue { a, b, c })
    }

    pub fn from_cylinder(p: &CylinderParams) -> Self {
        let (a, b) = delaunay_ab(p);
        DelaunayResidue { a, b, c: 0.0 }
    }

    /// `A(λ)`.
    pub fn matrix(&self, lambda: C64) -> Mat2 {
        let c = C64::from(self.c);
        Mat2::new(c, self.a / lambda + self.b, self.a * lambda + self.b, -c)
    }

    /// `A` as a Laurent loop in λ (exponents −1, 0, 1).
    pub fn laurent(&self) -> LaurentLoop {
        LaurentLoop::new(
            -1,
            vec![
                Mat2::from_real(0.0, self.a, 0.0, 0.0),
                Mat2::from_real(self.c, self.b, self.b, -self.c),
                Mat2::from_real(0.0, 0.0, self.a, 0.0),
            ],
        )
    }

    /// `a·b > 0` gives an unduloid, `a·b < 0` a nodoid, `a = b` a round cylinder.
    pub fn kind(&self) -> DelaunayKind {
        let ab = self.a * self.b;
        if self.a == self.b {
            DelaunayKind::Cylinder
        } else if ab > 0.0 {
            DelaunayKind::Unduloid
        } else if ab < 0.0 {
            DelaunayKind::Nodoid
        } else {
            DelaunayKind::Sphere
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DelaunayKind {
    Cylinder,
    Unduloid,
    Nodoid,
    /// `a·b = 0`, the degenerate chain of spheres.
    Sphere,
}

impl fmt::Display for DelaunayKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DelaunayKind::Cylinder => "cylinder",
            DelaunayKind::Unduloid => "unduloid",
            DelaunayKind::Nodoid => "nodoid",
            DelaunayKind::Sphere => "sphere",
        };
        f.write_str(s)
    }
}

/// Residue weights `a = ¼(1 + √(1−r))`, `b = ¼(1 − √(1−r))`.
///
/// `b` is computed as `¼ r/(1 + √(1−r))`, which keeps `sign(b) = sign(r)`
/// exact for tiny `|r|`.
pub fn delaunay_ab(p: &CylinderParams) -> (f64, f64) {
    let s = (1.0 - p.r).sqrt();
    (0.25 * (1.0 + s), 0.25 * p.r / (1.0 + s))
}

/// Eigenvalue `μ` of `A(λ)`: `μ² = a² + b² + ab(λ + λ⁻¹) + c²`.
///
/// Principal root (`Re μ ≥ 0`), with `Im μ ≥ 0` when `μ` is purely imaginary.
pub fn mu_eigenvalue(res: &DelaunayResidue, lambda: C64) -> C64 {
    let (a, b, c) = (res.a, res.b, res.c);
    let mu2 = a * a + b * b + c * c + a * b * (lambda + 1.0 / lambda);
    let mu = mu2.sqrt();
    if mu.re == 0.0 && mu.im < 0.0 {
        -mu
    } else {
        mu
    }
}

/// Max over the grid of `|μ²(λ) − ¼(1 − r t(λ))|` with `(a, b) = delaunay_ab(r)`.
pub fn verify_mu_alpha_identity(p: &CylinderParams, points: &[C64]) -> f64 {
    let res = DelaunayResidue::from_cylinder(p);
    points.iter().fold(0.0_f64, |acc, &l| {
        let mu = mu_eigenvalue(&res, l);
        let rhs = 0.25 * (1.0 - p.r * t_of_lambda(l));
        acc.max((mu * mu - rhs).norm())
    })
}

/// The zero potential.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroPotential;

impl Potential for ZeroPotential {
    fn eval(&self, _z: C64, _lambda: C64) -> Result<Mat2, PotentialError> {
        Ok(Mat2::zero())
    }
    fn poles(&self) -> Vec<Pole> {
        Vec::new()
    }
    fn label(&self) -> String {
        "zero".into()
    }
}

/// Order of a Bessel potential: fixed, or the cylinder value
/// `½√(1 − r t(λ))` shifted by `offset` (nonzero only for negative controls).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BesselOrder {
    Constant(C64),
    Cylinder { r: f64, offset: C64 },
}

impl BesselOrder {
    pub fn at(&self, lambda: C64) -> C64 {
        match *self {
            BesselOrder::Constant(a) => a,
            BesselOrder::Cylinder { r, offset } => cylinder_alpha(r, lambda) + offset,
        }
    }
}

/// `[[0, 1/z], [−z + α²/z, 0]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselPotential {
    pub order: BesselOrder,
}

impl BesselPotential {
    pub fn new(alpha: C64) -> Self {
        BesselPotential {
            order: BesselOrder::Constant(alpha),
        }
    }

    pub fn for_cylinder(p: &CylinderParams) -> Self {
        BesselPotential {
            order: BesselOrder::Cylinder {
                r: p.r,
                offset: C64::new(0.0, 0.0),
            },
        }
    }
}

impl Potential for BesselPotential {
    fn eval(&self, z: C64, lambda: C64) -> Result<Mat2, PotentialError> {
        check_origin(z)?;
        let alpha = self.order.at(lambda);
        Ok(Mat2::off_diag(1.0 / z, -z + alpha * alpha / z))
    }
    fn poles(&self) -> Vec<Pole> {
        vec![Pole {
            z: C64::new(0.0, 0.0),
            order: 1,
        }]
    }
    fn label(&self) -> String {
        match self.order {
            BesselOrder::Constant(a) => format!("bessel(alpha={a})"),
            BesselOrder::Cylinder { r, offset } => format!("bessel(r={r}, offset={offset})"),
        }
    }
}

/// Cylinder potential `[[0, λ⁻¹], [λ Q_t, 0]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CylinderPotential {
    pub params: CylinderParams,
}

impl CylinderPotential {
    pub fn new(params: CylinderParams) -> Self {
        CylinderPotential { params }
    }

    /// The exact λ-dependence at fixed `z`: the lower-left entry is
    /// `λQ_t = r/(16z²) − (1 + r/(8z²))λ + r/(16z²) λ²`.
    pub fn laurent_at(&self, z: C64) -> Result<LaurentLoop, PotentialError> {
        check_origin(z)?;
        let s = self.params.r / (16.0 * z * z);
        let zero = C64::new(0.0, 0.0);
        Ok(LaurentLoop::new(
            -1,
            vec![
                Mat2::from_real(0.0, 1.0, 0.0, 0.0),
                Mat2::off_diag(zero, s),
                Mat2::off_diag(zero, -1.0 - 2.0 * s),
                Mat2::off_diag(zero, s),
            ],
        ))
    }
}

impl Potential for CylinderPotential {
    fn eval(&self, z: C64, lambda: C64) -> Result<Mat2, PotentialError> {
        check_origin(z)?;
        let s = self.params.r / (16.0 * z * z);
        let d = lambda - 1.0;
        Ok(Mat2::off_diag(1.0 / lambda, s * d * d - lambda))
    }
    fn poles(&self) -> Vec<Pole> {
        vec![Pole {
            z: C64::new(0.0, 0.0),
            order: 2,
        }]
    }
    fn label(&self) -> String {
        format!("cylinder(r={})", self.params.r)
    }
}

/// Pure Delaunay potential `A(λ) dz/z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DelaunayPotential {
    pub residue: DelaunayResidue,
}

impl DelaunayPotential {
    pub fn new(residue: DelaunayResidue) -> Self {
        DelaunayPotential { residue }
    }
}

impl Potential for DelaunayPotential {
    fn eval(&self, z: C64, lambda: C64) -> Result<Mat2, PotentialError> {
        check_origin(z)?;
        Ok(self.residue.matrix(lambda) * (1.0 / z))
    }
    fn poles(&self) -> Vec<Pole> {
        vec![Pole {
            z: C64::new(0.0, 0.0),
            order: 1,
        }]
    }
    fn label(&self) -> String {
        let r = &self.residue;
        format!("delaunay(a={}, b={}, c={})", r.a, r.b, r.c)
    }
}

type EvalFn = dyn Fn(C64, C64) -> Result<Mat2, PotentialError> + Send + Sync;

/// Potential given by an arbitrary closure.
#[derive(Clone)]
pub struct FnPotential {
    f: Arc<EvalFn>,
    poles: Vec<Pole>,
    label: String,
}

impl FnPotential {
    pub fn new<F>(label: impl Into<String>, poles: Vec<Pole>, f: F) -> Self
    where
        F: Fn(C64, C64) -> Result<Mat2, PotentialError> + Send + Sync + 'static,
    {
        FnPotential {
            f: Arc::new(f),
            poles,
            label: label.into(),
        }
    }
}

impl Potential for FnPotential {
    fn eval(&self, z: C64, lambda: C64) -> Result<Mat2, PotentialError> {
        for p in &self.poles {
            if (z - p.z).norm() <= POLE_EPS {
                return Err(PotentialError::Pole { z });
            }
        }
        (self.f)(z, lambda)
    }
    fn poles(&self) -> Vec<Pole> {
        self.poles.clone()
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

/// `ξ.g = g⁻¹ξg + g⁻¹ g′`.
#[derive(Clone)]
pub struct GaugedPotential {
    base: Arc<dyn Potential>,
    gauge: Arc<dyn Gauge>,
}

impl GaugedPotential {
    pub fn gauge(&self) -> &dyn Gauge {
        self.gauge.as_ref()
    }
}

/// Applies a gauge: the result evaluates `g⁻¹ξg + g⁻¹(dg/dz)` pointwise.
pub fn gauge_transform(xi: Arc<dyn Potential>, g: Arc<dyn Gauge>) -> GaugedPotential {
    GaugedPotential { base: xi, gauge: g }
}

impl Potential for GaugedPotential {
    fn eval(&self, z: C64, lambda: C64) -> Result<Mat2, PotentialError> {
        let xi = self.base.eval(z, lambda)?;
        let g = self.gauge.eval(z, lambda)?;
        let dg = self.gauge.derivative(z, lambda)?;
        let gi = g
            .inverse()
            .ok_or(PotentialError::SingularGauge { z, lambda })?;
        Ok(gi * xi * g + gi * dg)
    }
    fn poles(&self) -> Vec<Pole> {
        self.base.poles()
    }
    fn label(&self) -> String {
        format!("{}.{}", self.base.label(), self.gauge.label())
    }
}

/// Residuals of the two reflection relations
/// `ξ(z, 1/λ) = conj ξ(z̄, 1/λ̄)` and `G⁻¹ ξ(z, λ) G = conj ξ(z̄, 1/λ̄)`,
/// `G = diag(1/λ, λ)`, maximised over the samples (max entry modulus).
pub fn verify_symmetry_relations(
    xi: &dyn Potential,
    samples: &[(C64, C64)],
) -> Result<f64, PotentialError> {
    let mut worst = 0.0_f64;
    for &(z, lambda) in samples {
        let inv_bar = 1.0 / lambda.conj();
        let rhs = xi.eval(z.conj(), inv_bar)?.conj();
        let lhs1 = xi.eval(z, 1.0 / lambda)?;
        let g = Mat2::diag(1.0 / lambda, lambda);
        let gi = Mat2::diag(lambda, 1.0 / lambda);
        let lhs2 = gi * xi.eval(z, lambda)? * g;
        worst = worst.max((lhs1 - rhs).max_abs()).max((lhs2 - rhs).max_abs());
    }
    Ok(worst)
}

/// The Bessel potential gauged by `diag(z^{−1/2}, z^{1/2})` and then by
/// `[[1, 0], [1/(2z), 1]]`.
pub fn bessel_reduced(alpha: BesselOrder) -> GaugedPotential {
    let g: Arc<dyn Gauge> = Arc::new(ProductGauge::new(vec![
        Arc::new(SqrtZGauge::bessel()),
        Arc::new(LowerShearGauge),
    ]));
    gauge_transform(Arc::new(BesselPotential { order: alpha }), g)
}

/// Max over the samples of the residual of the reduced Bessel potential
/// against `[[0, 1], [−1 + (4α² − 1)/(4z²), 0]]`.
pub fn gauge_reduction_residual(
    alpha: BesselOrder,
    samples: &[(C64, C64)],
) -> Result<f64, PotentialError> {
    let xi = bessel_reduced(alpha);
    let mut worst = 0.0_f64;
    for &(z, lambda) in samples {
        let a = alpha.at(lambda);
        let expect = Mat2::off_diag(C64::new(1.0, 0.0), -1.0 + (4.0 * a * a - 1.0) / (4.0 * z * z));
        worst = worst.max((xi.eval(z, lambda)? - expect).max_abs());
    }
    Ok(worst)
}

/// Max over the samples of the residual between the cylinder potential and
/// the Bessel potential of order `½√(1 − rt) + offset` gauged by the
/// reduction and then by `diag(λ^{1/2}, λ^{−1/2})`. Zero offset gives the
/// identity; a nonzero one is a negative control.
pub fn gauge_chain_residual(
    p: &CylinderParams,
    offset: C64,
    samples: &[(C64, C64)],
) -> Result<f64, PotentialError> {
    let g: Arc<dyn Gauge> = Arc::new(ProductGauge::new(vec![
        Arc::new(SqrtZGauge::bessel()),
        Arc::new(LowerShearGauge),
        Arc::new(HalfPowerLambdaGauge),
    ]));
    let order = BesselOrder::Cylinder { r: p.r, offset };
    let chain = gauge_transform(Arc::new(BesselPotential { order }), g);
    let cyl = CylinderPotential::new(*p);
    let mut worst = 0.0_f64;
    for &(z, lambda) in samples {
        worst = worst.max((chain.eval(z, lambda)? - cyl.eval(z, lambda)?).max_abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn one() -> C64 {
        c(1.0, 0.0)
    }

    #[test]
    fn gauge_chain_reaches_cylinder() {
        let samples: Vec<(C64, C64)> = [(0.7, 0.4), (2.0, -1.1), (0.3, 2.5)]
            .iter()
            .flat_map(|&(x, y)| {
                [0.3, 1.9, -2.8].map(|t| (c(x, y), C64::from_polar(1.0, t)))
            })
            .collect();
        for r in [1.0 / 3.0, -0.25, -3.0] {
            let p = CylinderParams::new(r).unwrap();
            assert!(gauge_chain_residual(&p, c(0.0, 0.0), &samples).unwrap() < 1e-12);
            assert!(gauge_chain_residual(&p, c(0.1, 0.0), &samples).unwrap() > 1e-3);
            let order = BesselOrder::Cylinder { r, offset: c(0.0, 0.0) };
            assert!(gauge_reduction_residual(order, &samples).unwrap() < 1e-12);
        }
        // a wrong order is caught
        let bad = BesselOrder::Cylinder { r: 0.5, offset: c(0.01, 0.0) };
        let xi = bessel_reduced(bad);
        let want = |z: C64, l: C64| {
            let a = cylinder_alpha(0.5, l);
            -1.0 + (4.0 * a * a - 1.0) / (4.0 * z * z)
        };
        let (z, l) = samples[0];
        assert!((xi.eval(z, l).unwrap().get(1, 0) - want(z, l)).norm() > 1e-3);
        // branch cuts are reported, not crossed
        assert!(gauge_reduction_residual(bad, &[(c(-1.0, 0.0), one())]).is_err());
    }

    #[test]
    fn bessel_examples() {
        let b0 = BesselPotential::new(c(0.0, 0.0));
        assert_eq!(b0.eval(one(), one()).unwrap(), Mat2::from_real(0.0, 1.0, -1.0, 0.0));
        let bh = BesselPotential::new(c(0.5, 0.0));
        assert!((bh.eval(one(), one()).unwrap() - Mat2::from_real(0.0, 1.0, -0.75, 0.0)).max_abs() < 1e-15);
        let bg = BesselPotential::new(c(0.3, 0.1));
        assert_eq!(bg.eval(c(2.0, 0.0), c(0.0, 1.0)).unwrap().get(0, 1), c(0.5, 0.0));
        assert_eq!(bg.eval(c(0.0, 0.0), one()), Err(PotentialError::Pole { z: c(0.0, 0.0) }));
    }

    #[test]
    fn cylinder_examples() {
        let p = CylinderParams::new(1.0 / 3.0).unwrap();
        let xi = CylinderPotential::new(p);
        for z in [one(), c(0.3, 2.0), c(-4.0, 0.1)] {
            assert!((q_t(0.7, z, one()) + 1.0).norm() < 1e-15);
        }
        assert!((t_of_lambda(-one()) - 1.0).norm() < 1e-15);
        let m = xi.eval(one(), -one()).unwrap();
        assert!((m.get(1, 0) - 13.0 / 12.0).norm() < 1e-15);
        assert!((m.get(0, 1) + 1.0).norm() < 1e-15);
        assert!(xi.eval(c(0.0, 0.0), one()).is_err());
        assert_eq!(xi.poles()[0].order, 2);
    }

    #[test]
    fn cylinder_laurent_form_matches_eval() {
        let xi = CylinderPotential::new(CylinderParams::new(-0.25).unwrap());
        let z = c(0.7, -0.4);
        let x = xi.laurent_at(z).unwrap();
        for k in 0..7 {
            let l = C64::from_polar(1.0, 0.9 * k as f64);
            assert!((x.eval(l).unwrap() - xi.eval(z, l).unwrap()).max_abs() < 1e-14);
        }
    }

    #[test]
    fn cylinder_params_range() {
        assert!(CylinderParams::new(0.0).is_err());
        assert!(CylinderParams::new(1.0).is_err());
        assert!(CylinderParams::new(f64::NAN).is_err());
        assert!(CylinderParams::new(-1e6).is_ok());
        let msg = CylinderParams::new(2.0).unwrap_err().to_string();
        assert!(msg.contains("(-inf, 1)"), "{msg}");
    }

    #[test]
    fn delaunay_examples() {
        let res = DelaunayResidue::new(0.375, 0.125, 0.0).unwrap();
        let xi = DelaunayPotential::new(res);
        assert!((xi.eval(one(), one()).unwrap() - Mat2::from_real(0.0, 0.5, 0.5, 0.0)).max_abs() < 1e-15);
        assert!((xi.eval(one(), -one()).unwrap() - Mat2::from_real(0.0, -0.25, -0.25, 0.0)).max_abs() < 1e-15);
        let l = c(0.6, 0.8);
        let v1 = xi.eval(one(), l).unwrap();
        let v2 = xi.eval(c(2.0, 0.0), l).unwrap();
        assert!((v1 * 0.5 - v2).max_abs() < 1e-15);
        assert!(DelaunayResidue::new(0.3, 0.3, 0.0).is_err());
    }

    #[test]
    fn delaunay_ab_examples() {
        let (a, b) = delaunay_ab(&CylinderParams::new(0.75).unwrap());
        assert!((a - 0.375).abs() < 1e-15 && (b - 0.125).abs() < 1e-15);
        let (a, b) = delaunay_ab(&CylinderParams::new(-3.0).unwrap());
        assert!((a - 0.75).abs() < 1e-15 && (b + 0.25).abs() < 1e-15);
        let (a, b) = delaunay_ab(&CylinderParams::new(1e-300).unwrap());
        assert!(b > 0.0 && a > b);
    }

    #[test]
    fn mu_examples() {
        let res = DelaunayResidue::new(0.375, 0.125, 0.0).unwrap();
        assert!((mu_eigenvalue(&res, one()) - 0.5).norm() < 1e-15);
        assert!((mu_eigenvalue(&res, -one()) - 0.25).norm() < 1e-15);
        let mu = mu_eigenvalue(&res, C64::i());
        assert!((mu * mu - 5.0 / 32.0).norm() < 1e-15);
        // nodoid residue: μ² < 0 somewhere is impossible on S¹, but off the
        // circle the branch rule still applies
        let nod = DelaunayResidue::new(0.75, -0.25, 0.0).unwrap();
        let mu = mu_eigenvalue(&nod, c(-20.0, 0.0));
        assert!(mu.re >= 0.0);
        assert!(mu.re > 0.0 || mu.im >= 0.0);
    }

    #[test]
    fn mu_alpha_identity() {
        let pts: Vec<C64> = (0..64).map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / 64.0)).collect();
        for r in [0.75, -3.0, 1.0 / 3.0, -0.25, 0.5_f64.sqrt(), -1.0 / PI] {
            let p = CylinderParams::new(r).unwrap();
            assert!(verify_mu_alpha_identity(&p, &pts) <= 1e-12, "r = {r}");
        }
        let p = CylinderParams::new(-3.0).unwrap();
        assert!(verify_mu_alpha_identity(&p, &[-one()]) < 1e-15);
    }

    #[test]
    fn symmetry_relations_of_cylinder() {
        let xi = CylinderPotential::new(CylinderParams::new(1.0 / 3.0).unwrap());
        let l = C64::from_polar(1.0, PI / 3.0);
        assert!(verify_symmetry_relations(&xi, &[(c(1.0, 1.0), l)]).unwrap() <= 1e-12);
        assert_eq!(verify_symmetry_relations(&xi, &[(c(2.0, 0.0), one())]).unwrap(), 0.0);
        let broken = FnPotential::new("broken", xi.poles(), move |z, l| {
            let m = xi.eval(z, l)?;
            Ok(Mat2::off_diag(m.get(0, 1), m.get(1, 0) * C64::i()))
        });
        assert!(verify_symmetry_relations(&broken, &[(c(1.0, 1.0), l)]).unwrap() > 0.1);
    }
}
