//! The generalized translation `tau_x`.
//!
//! On polynomials the terminating Taylor formula is exact:
//! `tau_x f(a) = sum_p b_p(x) (L^p f)(a)` with the sum ending at `deg f`.
//! On general functions the translation is realized by the product-formula
//! measure: with `u = cos(theta)` and `w = sqrt(x^2 + y^2 + 2xy u)`,
//!
//! ```text
//! tau_x f(y) = c int_{-1}^{1} [ f(w) (1 + (x+y)/w) + f(-w) (1 - (x+y)/w) ]
//!              * (1/2) (1-u)^(a-1/2) (1+u)^(a+1/2) du
//! ```
//!
//! normalized so that `tau_x 1 = 1`. A Gauss-Jacobi rule for the exact
//! boundary weight makes the quadrature exact on polynomial inputs (up to
//! rounding) for every admissible `a`, including the near-classical range
//! where the weight is strongly singular at `u = 1`. In classical oracle
//! mode (`a = -1/2`) the measure degenerates to a point mass and the
//! translation is the ordinary shift `f(x + y)`.

use std::sync::Arc;

use crate::functions::{dunkl_apply, NumericC1, TestFunction};
use crate::norms::{lp_norm, lp_norm_within};
use crate::poly::Polynomial;
use crate::quadrature::{jacobi_rule, NeumaierSum, QuadRule, QuadratureSpec};
use crate::special::{taylor_coeff, DunklParameter};
use crate::{Error, Result};

/// Node count and tolerance for the angular product-formula quadrature.
#[derive(Debug, Clone, Copy)]
pub struct TranslationSpec {
    /// Gauss-Jacobi nodes for the angular integral; at least 8.
    pub angular_nodes: usize,
    /// Advisory tolerance attached to reported error estimates.
    pub tolerance: f64,
}

impl Default for TranslationSpec {
    fn default() -> Self {
        Self {
            angular_nodes: 48,
            tolerance: 1e-9,
        }
    }
}

impl TranslationSpec {
    pub fn validate(&self) -> Result<()> {
        if self.angular_nodes < 8 {
            return Err(Error::InvalidParameter(format!(
                "angular_nodes must be at least 8, got {}",
                self.angular_nodes
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter(
                "translation tolerance must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// A translation with its angular rule prebuilt, so that evaluation inside
/// quadrature loops is infallible.
#[derive(Debug, Clone)]
pub struct TranslationOperator {
    param: DunklParameter,
    rule: Option<Arc<QuadRule>>,
    mass: f64,
}

impl TranslationOperator {
    pub fn new(param: &DunklParameter, spec: &TranslationSpec) -> Result<Self> {
        spec.validate()?;
        if param.is_classical() {
            return Ok(Self {
                param: *param,
                rule: None,
                mass: 1.0,
            });
        }
        let a = param.alpha() - 0.5;
        let b = param.alpha() + 0.5;
        let rule = jacobi_rule(spec.angular_nodes, a, b)?;
        let mass = rule.mass();
        Ok(Self {
            param: *param,
            rule: Some(rule),
            mass,
        })
    }

    pub fn param(&self) -> &DunklParameter {
        &self.param
    }

    /// `tau_x f(y)`.
    pub fn apply(&self, f: impl Fn(f64) -> f64, x: f64, y: f64) -> f64 {
        let rule = match &self.rule {
            None => return f(x + y),
            Some(rule) => rule,
        };
        let r = x + y;
        let mut acc = NeumaierSum::new();
        for (&u, &om) in rule.nodes.iter().zip(&rule.weights) {
            let w2 = x * x + y * y + 2.0 * x * y * u;
            let w = w2.max(0.0).sqrt();
            // w = 0 only when x = y = 0 (nodes are interior), where the
            // bracket's limit is 2 f(0).
            let bracket = if w == 0.0 {
                2.0 * f(0.0)
            } else {
                f(w) * (1.0 + r / w) + f(-w) * (1.0 - r / w)
            };
            acc.add(om * 0.5 * bracket);
        }
        acc.value() / self.mass
    }
}

/// One-shot numeric translation of a closure.
pub fn translate_with(
    param: &DunklParameter,
    f: impl Fn(f64) -> f64,
    x: f64,
    y: f64,
    spec: &TranslationSpec,
) -> Result<f64> {
    Ok(TranslationOperator::new(param, spec)?.apply(f, x, y))
}

/// Numeric translation of a catalog function.
pub fn translate_numeric(
    param: &DunklParameter,
    f: &TestFunction,
    x: f64,
    y: f64,
    spec: &TranslationSpec,
) -> Result<f64> {
    translate_with(param, |t| f.value(t), x, y, spec)
}

/// Translation value together with a node-doubling error estimate.
pub fn translate_checked(
    param: &DunklParameter,
    f: impl Fn(f64) -> f64,
    x: f64,
    y: f64,
    spec: &TranslationSpec,
) -> Result<(f64, f64)> {
    let coarse = TranslationOperator::new(param, spec)?.apply(&f, x, y);
    let mut doubled = *spec;
    doubled.angular_nodes *= 2;
    let fine = TranslationOperator::new(param, &doubled)?.apply(&f, x, y);
    Ok((fine, (fine - coarse).abs()))
}

/// Exact translation of a polynomial: the Taylor sum terminates because the
/// operator lowers degree by one each step.
pub fn translate_poly(param: &DunklParameter, f: &Polynomial, x: f64) -> Polynomial {
    let mut acc = Polynomial::zero();
    let mut derivative = f.clone();
    let mut order = 0u32;
    loop {
        acc.add_scaled(&derivative, taylor_coeff(param, order, x));
        if derivative.is_zero() {
            break;
        }
        derivative = derivative.dunkl(param);
        order += 1;
    }
    acc
}

/// `‖tau_x f‖_{p,a} / ‖f‖_{p,a}` (0 when `f` vanishes). The translated
/// function inherits the decay of `f` pushed out by `|x|`.
pub fn contraction_ratio(
    param: &DunklParameter,
    f: &TestFunction,
    x: f64,
    p: f64,
    tspec: &TranslationSpec,
    qspec: &QuadratureSpec,
) -> Result<f64> {
    let denom = lp_norm(param, f, p, qspec)?;
    if denom.value == 0.0 {
        return Ok(0.0);
    }
    let radius = f
        .decay()
        .truncation_radius(qspec)
        .ok_or_else(|| Error::NotIntegrable(format!("{f} is not integrable")))?
        + x.abs();
    let op = TranslationOperator::new(param, tspec)?;
    let numer = lp_norm_within(param, |a| op.apply(|t| f.value(t), x, a), radius, p, qspec)?;
    Ok(numer.value / denom.value)
}

/// Max over the grid of `|L(tau_x f)(y) - tau_x(L f)(y)|`, the two sides of
/// the operator-translation commutation identity. The left side
/// differentiates the translated function numerically; the right side uses
/// the closed-form operator derivative of `f`.
pub fn commutation_residual(
    param: &DunklParameter,
    f: &TestFunction,
    x: f64,
    grid: &[f64],
    spec: &TranslationSpec,
) -> Result<f64> {
    let op = TranslationOperator::new(param, spec)?;
    let lf = f.dunkl_derivative(param);
    let translated = NumericC1::new(|yy: f64| op.apply(|t| f.value(t), x, yy));
    let mut worst = 0.0f64;
    for &y in grid {
        let lhs = dunkl_apply(param, &translated, y);
        let rhs = op.apply(|t| lf.value(t), x, y);
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Exact-path commutation residual on polynomials; both sides are computed
/// symbolically, so this is rounding noise only.
pub fn poly_commutation_residual(
    param: &DunklParameter,
    f: &Polynomial,
    x: f64,
    grid: &[f64],
) -> f64 {
    let lhs = translate_poly(param, f, x).dunkl(param);
    let rhs = translate_poly(param, &f.dunkl(param), x);
    grid.iter()
        .map(|&y| (lhs.eval(y) - rhs.eval(y)).abs())
        .fold(0.0, f64::max)
}
