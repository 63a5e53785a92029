use std::sync::Arc;

use num_complex::Complex64 as C64;

use super::PotentialError;
use crate::loop_core::Mat2;

/// Ray removed from the domain of a branched gauge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchCut {
    /// `z ∈ (−∞, 0]`
    NegativeRealZ,
    /// `λ ∈ (−∞, 0]`
    NegativeRealLambda,
}

impl BranchCut {
    pub fn contains(&self, z: C64, lambda: C64) -> bool {
        let w = match self {
            BranchCut::NegativeRealZ => z,
            BranchCut::NegativeRealLambda => lambda,
        };
        w.im == 0.0 && w.re <= 0.0
    }
}

/// Holomorphic gauge `g(z, λ)` with its `z`-derivative.
pub trait Gauge: Send + Sync {
    fn eval(&self, z: C64, lambda: C64) -> Result<Mat2, PotentialError>;
    fn derivative(&self, z: C64, lambda: C64) -> Result<Mat2, PotentialError>;
    fn branch_cuts(&self) -> Vec<BranchCut> {
        Vec::new()
    }
    /// Sign picked up under `z ↦ e^{2πi} z`.
    fn multivalued_sign(&self) -> i32 {
        1
    }
    fn label(&self) -> String;
}

fn check_cuts(g: &dyn Gauge, z: C64, lambda: C64) -> Result<(), PotentialError> {
    if g.branch_cuts().iter().any(|c| c.contains(z, lambda)) {
        return Err(PotentialError::BranchCut { z, lambda });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, Default)]
pub struct IdentityGauge;

impl Gauge for IdentityGauge {
    fn eval(&self, _z: C64, _l: C64) -> Result<Mat2, PotentialError> {
        Ok(Mat2::identity())
    }
    fn derivative(&self, _z: C64, _l: C64) -> Result<Mat2, PotentialError> {
        Ok(Mat2::zero())
    }
    fn label(&self) -> String {
        "id".into()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ConstantGauge(pub Mat2);

impl Gauge for ConstantGauge {
    fn eval(&self, _z: C64, _l: C64) -> Result<Mat2, PotentialError> {
        Ok(self.0)
    }
    fn derivative(&self, _z: C64, _l: C64) -> Result<Mat2, PotentialError> {
        Ok(Mat2::zero())
    }
    fn label(&self) -> String {
        format!("const{:?}", self.0)
    }
}

/// `diag(z^{s/2}, z^{−s/2})` with `s = ±1`, principal branch.
///
/// `s = −1` is the first Bessel reduction step, `s = +1` the first step
/// towards the Delaunay residue.
#[derive(Clone, Copy, Debug)]
pub struct SqrtZGauge {
    sign: f64,
}

impl SqrtZGauge {
    /// `diag(z^{−1/2}, z^{1/2})`
    pub fn bessel() -> Self {
        SqrtZGauge { sign: -1.0 }
    }

    /// `diag(z^{1/2}, z^{−1/2})`
    pub fn residue() -> Self {
        SqrtZGauge { sign: 1.0 }
    }
}

impl Gauge for SqrtZGauge {
    fn eval(&self, z: C64, lambda: C64) -> Result<Mat2, PotentialError> {
        check_cuts(self, z, lambda)?;
        let h = z.sqrt();
        let (p, q) = if self.sign > 0.0 { (h, 1.0 / h) } else { (1.0 / h, h) };
        Ok(Mat2::diag(p, q))
    }
    fn derivative(&self, z: C64, lambda: C64) -> Result<Mat2, PotentialError> {
        let g = self.eval(z, lambda)?;
        // d/dz z^{±1/2} = ±½ z^{±1/2}/z
        let k = 0.5 * self.sign / z;
        Ok(Mat2::diag(g.get(0, 0) * k, -g.get(1, 1) * k))
    }
    fn branch_cuts(&self) -> Vec<BranchCut> {
        vec![BranchCut::NegativeRealZ]
    }
    fn multivalued_sign(&self) -> i32 {
        -1
    }
    fn label(&self) -> String {
        if self.sign > 0.0 {
            "diag(z^1/2, z^-1/2)".into()
        } else {
            "diag(z^-1/2, z^1/2)".into()
        }
    }
}

/// `[[1, 0], [1/(2z), 1]]`, the second Bessel reduction step.
#[derive(Clone, Copy, Debug, Default)]
pub struct LowerShearGauge;

impl Gauge for LowerShearGauge {
    fn eval(&self, z: C64, _l: C64) -> Result<Mat2, PotentialError> {
        let one = C64::new(1.0, 0.0);
        Ok(Mat2::new(one, C64::new(0.0, 0.0), 0.5 / z, one))
    }
    fn derivative(&self, z: C64, _l: C64) -> Result<Mat2, PotentialError> {
        let zero = C64::new(0.0, 0.0);
        Ok(Mat2::new(zero, zero, -0.5 / (z * z), zero))
    }
    fn label(&self) -> String {
        "[[1,0],[1/2z,1]]".into()
    }
}

/// `Λ = diag(λ^{1/2}, λ^{−1/2})`, principal branch in λ.
#[derive(Clone, Copy, Debug, Default)]
pub struct HalfPowerLambdaGauge;

impl Gauge for HalfPowerLambdaGauge {
    fn eval(&self, z: C64, lambda: C64) -> Result<Mat2, PotentialError> {
        check_cuts(self, z, lambda)?;
        let h = lambda.sqrt();
        Ok(Mat2::diag(h, 1.0 / h))
    }
    fn derivative(&self, z: C64, lambda: C64) -> Result<Mat2, PotentialError> {
        check_cuts(self, z, lambda)?;
        Ok(Mat2::zero())
    }
    fn branch_cuts(&self) -> Vec<BranchCut> {
        vec![BranchCut::NegativeRealLambda]
    }
    fn label(&self) -> String {
        "diag(l^1/2, l^-1/2)".into()
    }
}

/// `[[1, 0], [−λ/2, a + bλ]]`: after `diag(z^{1/2}, z^{−1/2})` this takes the
/// cylinder potential to `A dz/z + O(z) dz` with the residue `A` of `(a, b)`.
#[derive(Clone, Copy, Debug)]
pub struct CylinderResidueGauge {
    pub a: f64,
    pub b: f64,
}

impl Gauge for CylinderResidueGauge {
    fn eval(&self, _z: C64, lambda: C64) -> Result<Mat2, PotentialError> {
        let one = C64::new(1.0, 0.0);
        Ok(Mat2::new(
            one,
            C64::new(0.0, 0.0),
            -0.5 * lambda,
            self.a + self.b * lambda,
        ))
    }
    fn derivative(&self, _z: C64, _l: C64) -> Result<Mat2, PotentialError> {
        Ok(Mat2::zero())
    }
    fn label(&self) -> String {
        format!("[[1,0],[-l/2,{}+{}l]]", self.a, self.b)
    }
}

/// Product `g₁ g₂ ⋯ gₙ`; gauging by it equals gauging by `g₁`, then `g₂`, ….
#[derive(Clone)]
pub struct ProductGauge {
    factors: Vec<Arc<dyn Gauge>>,
}

impl ProductGauge {
    pub fn new(factors: Vec<Arc<dyn Gauge>>) -> Self {
        ProductGauge { factors }
    }
}

impl Gauge for ProductGauge {
    fn eval(&self, z: C64, lambda: C64) -> Result<Mat2, PotentialError> {
        let mut acc = Mat2::identity();
        for g in &self.factors {
            acc *= g.eval(z, lambda)?;
        }
        Ok(acc)
    }
    fn derivative(&self, z: C64, lambda: C64) -> Result<Mat2, PotentialError> {
        // (g₁⋯gₖ)' = (g₁⋯gₖ₋₁)' gₖ + (g₁⋯gₖ₋₁) gₖ'
        let mut val = Mat2::identity();
        let mut der = Mat2::zero();
        for g in &self.factors {
            let gv = g.eval(z, lambda)?;
            let gd = g.derivative(z, lambda)?;
            der = der * gv + val * gd;
            val *= gv;
        }
        Ok(der)
    }
    fn branch_cuts(&self) -> Vec<BranchCut> {
        let mut cuts: Vec<BranchCut> = self.factors.iter().flat_map(|g| g.branch_cuts()).collect();
        cuts.dedup();
        cuts
    }
    fn multivalued_sign(&self) -> i32 {
        self.factors.iter().map(|g| g.multivalued_sign()).product()
    }
    fn label(&self) -> String {
        self.factors
            .iter()
            .map(|g| g.label())
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Max-entry gap between `g′` and a fourth-order central difference of `g`
/// with step `h` along real `z`.
pub fn gauge_derivative_defect(
    g: &dyn Gauge,
    z: C64,
    lambda: C64,
    h: f64,
) -> Result<f64, PotentialError> {
    let f = |dz: f64| g.eval(z + dz, lambda);
    let fd = (f(-2.0 * h)? - f(2.0 * h)? + (f(h)? - f(-h)?) * 8.0) * (1.0 / (12.0 * h));
    Ok((fd - g.derivative(z, lambda)?).max_abs())
}

#[cfg(test)]
mod tests {
    use super::super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn arc<G: Gauge + 'static>(g: G) -> Arc<dyn Gauge> {
        Arc::new(g)
    }

    #[test]
    fn identity_and_constant_gauges() {
        let xi: Arc<dyn Potential> = Arc::new(BesselPotential::new(c(0.3, 0.1)));
        let (z, l) = (c(1.2, 0.4), c(0.0, 1.0));
        let same = gauge_transform(xi.clone(), arc(IdentityGauge));
        assert_eq!(same.eval(z, l).unwrap(), xi.eval(z, l).unwrap());
        let g0 = Mat2::new(c(1.0, 1.0), c(2.0, 0.0), c(0.0, -1.0), c(0.5, 0.0));
        let conj = gauge_transform(xi.clone(), arc(ConstantGauge(g0)));
        let expect = g0.inverse().unwrap() * xi.eval(z, l).unwrap() * g0;
        assert!((conj.eval(z, l).unwrap() - expect).max_abs() < 1e-14);
    }

    #[test]
    fn bessel_reduction_at_two() {
        let alpha = c(0.3, 0.1);
        let xi: Arc<dyn Potential> = Arc::new(BesselPotential::new(alpha));
        let g = arc(ProductGauge::new(vec![arc(SqrtZGauge::bessel()), arc(LowerShearGauge)]));
        let out = gauge_transform(xi, g);
        let expect = Mat2::off_diag(c(1.0, 0.0), -1.0 + (4.0 * alpha * alpha - 1.0) / 16.0);
        for l in [c(1.0, 0.0), c(0.0, 1.0), c(-0.6, 0.8)] {
            assert!((out.eval(c(2.0, 0.0), l).unwrap() - expect).max_abs() < 1e-14);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let gs: Vec<Arc<dyn Gauge>> = vec![
            arc(SqrtZGauge::bessel()),
            arc(SqrtZGauge::residue()),
            arc(LowerShearGauge),
            arc(HalfPowerLambdaGauge),
            arc(CylinderResidueGauge { a: 0.375, b: 0.125 }),
            arc(ProductGauge::new(vec![arc(SqrtZGauge::residue()), arc(LowerShearGauge)])),
        ];
        for g in gs {
            for z in [c(1.0, 0.0), c(0.4, 1.3), c(2.5, -0.7)] {
                let d = gauge_derivative_defect(g.as_ref(), z, c(0.6, 0.8), 1e-3).unwrap();
                assert!(d < 1e-8, "{}: {d}", g.label());
            }
        }
    }

    #[test]
    fn branch_cuts_and_signs() {
        let g = SqrtZGauge::bessel();
        assert!(g.eval(c(-1.0, 0.0), c(1.0, 0.0)).is_err());
        assert_eq!(g.multivalued_sign(), -1);
        let p = ProductGauge::new(vec![arc(SqrtZGauge::bessel()), arc(HalfPowerLambdaGauge)]);
        assert_eq!(p.multivalued_sign(), -1);
        assert_eq!(p.branch_cuts().len(), 2);
        assert!(p.eval(c(1.0, 0.0), c(-1.0, 0.0)).is_err());
    }

    #[test]
    fn residue_gauge_leading_term() {
        // z·(ξ_c.g) → A as z → 0
        let p = CylinderParams::new(1.0 / 3.0).unwrap();
        let res = DelaunayResidue::from_cylinder(&p);
        let xi: Arc<dyn Potential> = Arc::new(CylinderPotential::new(p));
        let g = arc(ProductGauge::new(vec![
            arc(SqrtZGauge::residue()),
            arc(CylinderResidueGauge { a: res.a, b: res.b }),
        ]));
        let out = gauge_transform(xi, g);
        let l = c(0.6, 0.8);
        for z in [c(1e-2, 1e-3), c(1e-3, -1e-4)] {
            let lead = out.eval(z, l).unwrap() * z;
            assert!((lead - res.matrix(l)).max_abs() < 10.0 * z.norm_sqr());
        }
    }

    #[test]
    fn gauge_action_composes() {
        let xi: Arc<dyn Potential> = Arc::new(CylinderPotential::new(CylinderParams::new(-0.25).unwrap()));
        let g = arc(SqrtZGauge::bessel());
        let h = arc(LowerShearGauge);
        let twice = gauge_transform(Arc::new(gauge_transform(xi.clone(), g.clone())), h.clone());
        let once = gauge_transform(xi, arc(ProductGauge::new(vec![g, h])));
        let (z, l) = (c(0.8, 0.9), c(0.0, -1.0));
        assert!((twice.eval(z, l).unwrap() - once.eval(z, l).unwrap()).max_abs() < 1e-12);
    }
}
