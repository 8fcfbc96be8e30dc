//! Weighted `L^p` norms against the reference measure.
//!
//! The measure has density `|x|^(2a+1) dx` divided by the total-mass
//! constant `2^(a+1) Gamma(a+1)`, so `‖gaussian(s)‖_{p,a}` has the closed
//! form `(s^2/p)^((a+1)/p)` used as an oracle in the tests.
//!
//! Integrals are split at a small positive `delta`: on `[0, delta]` a
//! Gauss-Jacobi panel carries the `t^(2a+1)` weight exactly, and on
//! `[delta, R]` (where the weight is smooth) an adaptive Gauss-Legendre
//! integrator certifies the tolerance. Both halves fold the two signs of the
//! axis into one radial integrand.

use crate::functions::TestFunction;
use crate::quadrature::{
    integrate_adaptive, integrate_power_endpoint, QuadratureSpec,
};
use crate::special::DunklParameter;
use crate::{Error, Result};

/// A computed norm together with a quadrature-plus-truncation error bound.
#[derive(Debug, Clone, Copy)]
pub struct NormValue {
    pub value: f64,
    pub error_bound: f64,
}

fn power_fn(p: f64) -> impl Fn(f64) -> f64 {
    move |v: f64| {
        if p == 2.0 {
            v * v
        } else if p == 1.0 {
            v.abs()
        } else {
            v.abs().powf(p)
        }
    }
}

/// `L^p` norm of a catalog function; the truncation radius comes from its
/// decay descriptor. Polynomials (other than zero) are rejected as
/// non-integrable.
pub fn lp_norm(
    param: &DunklParameter,
    f: &TestFunction,
    p: f64,
    spec: &QuadratureSpec,
) -> Result<NormValue> {
    if f.is_zero() {
        return Ok(NormValue {
            value: 0.0,
            error_bound: 0.0,
        });
    }
    let radius = f.decay().truncation_radius(spec).ok_or_else(|| {
        Error::NotIntegrable(format!("{f} has no integrable decay against the weight"))
    })?;
    lp_norm_within(param, |t| f.value(t), radius, p, spec)
}

/// `L^p` norm of an arbitrary function given an explicit truncation radius;
/// used for translated functions and Taylor remainders whose decay is that
/// of the underlying catalog function shifted by the translation amount.
pub fn lp_norm_within(
    param: &DunklParameter,
    g: impl Fn(f64) -> f64,
    radius: f64,
    p: f64,
    spec: &QuadratureSpec,
) -> Result<NormValue> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "norm exponent must satisfy 1 <= p < infinity, got {p}"
        )));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "truncation radius must be positive, got {radius}"
        )));
    }
    spec.validate()?;
    let w = param.weight_exponent();
    let pw = power_fn(p);
    let mut radial = |t: f64| pw(g(t)) + pw(g(-t));
    let delta = radius * 2f64.powi(-8);
    let coarse = integrate_power_endpoint(&mut radial, delta, w, spec.panel_nodes)?;
    let fine = integrate_power_endpoint(&mut radial, delta, w, 2 * spec.panel_nodes)?;
    let zero_err = (fine - coarse).abs();
    let outer = integrate_adaptive(
        &mut |t: f64| radial(t) * t.powf(w),
        delta,
        radius,
        spec,
    )?;
    let total = (fine + outer.value).max(0.0);
    let err = zero_err + outer.error;
    let mn = param.measure_norm();
    let value = (total / mn).powf(1.0 / p);
    let error_bound = ((total + err) / mn).powf(1.0 / p) - value;
    Ok(NormValue { value, error_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn param(alpha: f64) -> DunklParameter {
        DunklParameter::new(alpha).unwrap()
    }

    fn gaussian_norm_closed_form(alpha: f64, sigma: f64, p: f64) -> f64 {
        (sigma * sigma / p).powf((alpha + 1.0) / p)
    }

    #[test]
    fn zero_function_has_zero_norm() {
        let sp = QuadratureSpec::default();
        let z = TestFunction::parse("poly(0)").unwrap();
        let n = lp_norm(&param(0.5), &z, 2.0, &sp).unwrap();
        assert_eq!(n.value, 0.0);
    }

    #[test]
    fn polynomials_are_rejected() {
        let sp = QuadratureSpec::default();
        let q = TestFunction::parse("poly(1,1)").unwrap();
        assert!(matches!(
            lp_norm(&param(0.5), &q, 2.0, &sp),
            Err(Error::NotIntegrable(_))
        ));
    }

    #[test]
    fn gaussian_norms_match_closed_form() {
        let sp = QuadratureSpec::default();
        for &alpha in &[-0.4, 0.0, 0.5, 1.5] {
            let pr = param(alpha);
            for &sigma in &[0.7, 1.0, 1.6] {
                let f = TestFunction::gaussian(sigma);
                for &p in &[1.0, 2.0, 3.5] {
                    let got = lp_norm(&pr, &f, p, &sp).unwrap();
                    let want = gaussian_norm_closed_form(alpha, sigma, p);
                    assert_relative_eq!(got.value, want, max_relative = 1e-9);
                    assert!(got.error_bound < 1e-8 * (1.0 + want));
                }
            }
        }
    }

    #[test]
    fn classical_oracle_gaussian_norm() {
        // At a = -1/2 the measure is Lebesgue-flat in the radial variable:
        // the closed form still applies with a + 1 = 1/2.
        let sp = QuadratureSpec::default();
        let pr = DunklParameter::classical_oracle();
        let f = TestFunction::gaussian(1.0);
        let got = lp_norm(&pr, &f, 2.0, &sp).unwrap();
        assert_relative_eq!(
            got.value,
            gaussian_norm_closed_form(-0.5, 1.0, 2.0),
            max_relative = 1e-9
        );
    }

    #[test]
    fn norm_is_stable_under_resolution_doubling() {
        // e^{-x^2} is the gaussian with sigma = 1/sqrt(2).
        let f = TestFunction::gaussian(std::f64::consts::FRAC_1_SQRT_2);
        let pr = param(0.0);
        let base_spec = QuadratureSpec::default();
        let mut dense = base_spec;
        dense.panel_nodes *= 2;
        dense.gaussian_sigmas *= 2.0;
        let base = lp_norm(&pr, &f, 2.0, &base_spec).unwrap();
        let fine = lp_norm(&pr, &f, 2.0, &dense).unwrap();
        assert_relative_eq!(base.value, fine.value, max_relative = 1e-8);
    }

    #[test]
    fn norm_is_absolutely_homogeneous() {
        let sp = QuadratureSpec::default();
        let pr = param(0.8);
        let f = TestFunction::hermite_like(2, 1.1);
        let base = lp_norm(&pr, &f, 2.0, &sp).unwrap().value;
        for &c in &[-3.0, 0.25, 7.0] {
            let scaled = lp_norm(&pr, &f.scale(c), 2.0, &sp).unwrap().value;
            assert_relative_eq!(scaled, c.abs() * base, max_relative = 1e-9);
        }
    }

    #[test]
    fn triangle_inequality_on_shared_family() {
        let sp = QuadratureSpec::default();
        let pr = param(0.3);
        let f = TestFunction::hermite_like(3, 0.9);
        let g = TestFunction::gaussian(0.9).scale(2.0);
        let sum = f.try_add(&g).unwrap();
        for &p in &[1.0, 2.0, 4.0] {
            let nf = lp_norm(&pr, &f, p, &sp).unwrap().value;
            let ng = lp_norm(&pr, &g, p, &sp).unwrap().value;
            let ns = lp_norm(&pr, &sum, p, &sp).unwrap().value;
            assert!(ns <= nf + ng + 1e-9, "p={p}: {ns} > {nf} + {ng}");
        }
    }

    #[test]
    fn bump_norm_self_converges() {
        let f = TestFunction::bump(1.5);
        let pr = param(0.5);
        let base_spec = QuadratureSpec::default();
        let mut dense = base_spec;
        dense.panel_nodes = 40;
        dense.abs_tol = 1e-13;
        dense.rel_tol = 1e-12;
        dense.max_depth = 16;
        let a = lp_norm(&pr, &f, 2.0, &base_spec).unwrap();
        let b = lp_norm(&pr, &f, 2.0, &dense).unwrap();
        assert_relative_eq!(a.value, b.value, max_relative = 1e-9);
    }

    #[test]
    fn kinked_integrand_is_still_certified() {
        // p = 1 puts |f| kinks at the roots of the Hermite factor.
        let f = TestFunction::hermite_like(3, 1.0);
        let pr = param(0.2);
        let base = lp_norm(&pr, &f, 1.0, &QuadratureSpec::default()).unwrap();
        let mut dense = QuadratureSpec::default();
        dense.panel_nodes = 48;
        dense.max_depth = 18;
        let fine = lp_norm(&pr, &f, 1.0, &dense).unwrap();
        assert_relative_eq!(base.value, fine.value, max_relative = 1e-7);
    }

    #[test]
    fn rejects_bad_exponents_and_radii() {
        let sp = QuadratureSpec::default();
        let pr = param(0.5);
        assert!(lp_norm_within(&pr, |t| t.exp(), 1.0, 0.5, &sp).is_err());
        assert!(lp_norm_within(&pr, |t| t.exp(), -1.0, 2.0, &sp).is_err());
        assert!(lp_norm_within(&pr, |t| t.exp(), 1.0, f64::INFINITY, &sp).is_err());
    }
}
