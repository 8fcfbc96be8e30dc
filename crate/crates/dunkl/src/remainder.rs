//! Taylor remainders `R_k`, iterated kernel integrals `I_k`, and the
//! constructive decomposition feeding the K-functional upper bound.
//!
//! Two independent routes compute the same remainder:
//!
//! * recursive: `R_k(x,f)(a) = tau_x f(a) - sum_{p<k} b_p(x) (L^p f)(a)`;
//! * direct: `R_k(x,f)(a) = int_{-|x|}^{|x|} theta_{k-1}(x,y)
//!   tau_y(L^k f)(a) A(y) dy`.
//!
//! On polynomials the recursive route is summed from the tail
//! (`sum_{p>=k} b_p(x) L^p f`), which is exact: the Taylor expansion
//! terminates. The iterated integrals satisfy `L^k I_k(x,f) = R_k(x,f)`
//! with `L` acting in the free variable; on polynomials that identity is
//! reproduced coefficient-exactly by the shift `I_k = sum_p b_{p+k} L^p f`,
//! and numerically the pushed form `I_k(x, L^k f)` avoids k-fold numeric
//! differentiation altogether.

use crate::functions::TestFunction;
use crate::norms::{lp_norm_within, NormValue};
use crate::poly::Polynomial;
use crate::quadrature::{jacobi_rule, legendre_rule, NeumaierSum, QuadratureSpec};
use crate::special::{taylor_coeff, DunklParameter};
use crate::theta::{theta_build, ThetaKernel};
use crate::translation::{TranslationOperator, TranslationSpec};
use crate::{Error, Result};

/// Geometrically graded panel layout for integrals against the kernel pair:
/// `depth` halvings toward 0 with `nodes` Gauss-Legendre points per panel.
/// The integrands are bounded but not smooth at 0, so grading (not raw node
/// count) controls the error.
#[derive(Debug, Clone, Copy)]
pub struct PanelScheme {
    pub depth: usize,
    pub nodes: usize,
}

impl Default for PanelScheme {
    fn default() -> Self {
        Self {
            depth: 50,
            nodes: 12,
        }
    }
}

/// `int_{-X}^{X} theta(x,y) h(y) A(y) dy` folded onto `(0, X]`:
/// `int_0^X [u(t)(h(t)+h(-t)) + v(t)(h(t)-h(-t))] t^w dt`.
pub fn theta_pair_integral(
    kernel: &ThetaKernel,
    weight_exp: f64,
    h: &mut dyn FnMut(f64) -> f64,
    scheme: &PanelScheme,
) -> f64 {
    let bigx = kernel.x_anchor().abs();
    let rule = legendre_rule(scheme.nodes);
    let mut acc = NeumaierSum::new();
    let mut hi = bigx;
    for level in 0..=scheme.depth {
        let lo = if level == scheme.depth {
            0.0
        } else {
            hi * 0.5
        };
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        for (&u, &gw) in rule.nodes.iter().zip(&rule.weights) {
            let t = mid + half * u;
            let plus = h(t);
            let minus = h(-t);
            let val = kernel.u.eval_radial(t) * (plus + minus)
                + kernel.v.eval_radial(t) * (plus - minus);
            acc.add(gw * half * val * t.powf(weight_exp));
        }
        hi = lo;
    }
    acc.value()
}

/// The recursive-route remainder as a reusable function of the free
/// variable, with the translation rule and operator derivatives prebuilt.
pub struct RemainderFn {
    op: TranslationOperator,
    f: TestFunction,
    x: f64,
    taylor: Vec<(f64, TestFunction)>,
}

impl RemainderFn {
    pub fn new(
        param: &DunklParameter,
        f: &TestFunction,
        k: usize,
        x: f64,
        tspec: &TranslationSpec,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter(
                "remainder order k must be at least 1".into(),
            ));
        }
        let op = TranslationOperator::new(param, tspec)?;
        let mut taylor = Vec::with_capacity(k);
        let mut derivative = f.clone();
        for p in 0..k {
            taylor.push((taylor_coeff(param, p as u32, x), derivative.clone()));
            derivative = derivative.dunkl_derivative(param);
        }
        Ok(Self {
            op,
            f: f.clone(),
            x,
            taylor,
        })
    }

    pub fn eval(&self, a: f64) -> f64 {
        let mut acc = NeumaierSum::new();
        acc.add(self.op.apply(|t| self.f.value(t), self.x, a));
        for (coeff, derivative) in &self.taylor {
            acc.add(-coeff * derivative.value(a));
        }
        acc.value()
    }
}

/// Which of the two independent remainder computations to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RemainderRoute {
    /// Kernel integral of the translated k-th operator derivative.
    Direct,
    /// Translation minus the partial Taylor sum.
    Recursive,
}

/// A fully specified remainder evaluation `R_k(x, f)(a)`.
#[derive(Debug, Clone)]
pub struct RemainderRequest {
    pub f: TestFunction,
    pub k: usize,
    pub x: f64,
    pub a: f64,
    pub route: RemainderRoute,
}

impl RemainderRequest {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter(
                "remainder order k must be at least 1".into(),
            ));
        }
        if self.x == 0.0 || !self.x.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "remainder anchor must be nonzero and finite, got {}",
                self.x
            )));
        }
        Ok(())
    }
}

/// Dispatch a remainder request to its route.
pub fn remainder(
    param: &DunklParameter,
    req: &RemainderRequest,
    tspec: &TranslationSpec,
    scheme: &PanelScheme,
) -> Result<f64> {
    req.validate()?;
    match req.route {
        RemainderRoute::Direct => {
            remainder_direct(param, &req.f, req.k, req.x, req.a, tspec, scheme)
        }
        RemainderRoute::Recursive => {
            remainder_recursive(param, &req.f, req.k, req.x, req.a, tspec)
        }
    }
}

/// `R_k(x,f)(a)` by the Taylor-defect route.
pub fn remainder_recursive(
    param: &DunklParameter,
    f: &TestFunction,
    k: usize,
    x: f64,
    a: f64,
    tspec: &TranslationSpec,
) -> Result<f64> {
    Ok(RemainderFn::new(param, f, k, x, tspec)?.eval(a))
}

/// Exact polynomial remainder: the terminating Taylor sum makes
/// `R_k = sum_{p=k}^{deg} b_p(x) L^p f`, summed directly from the tail so
/// no cancellation with the translated polynomial occurs.
pub fn remainder_recursive_poly(
    param: &DunklParameter,
    f: &Polynomial,
    k: usize,
    x: f64,
) -> Polynomial {
    let mut derivative = f.clone();
    for _ in 0..k {
        derivative = derivative.dunkl(param);
    }
    let mut acc = Polynomial::zero();
    let mut order = k as u32;
    while !derivative.is_zero() {
        acc.add_scaled(&derivative, taylor_coeff(param, order, x));
        derivative = derivative.dunkl(param);
        order += 1;
    }
    acc
}

/// `R_k(x,f)(a)` by the kernel-integral route.
pub fn remainder_direct(
    param: &DunklParameter,
    f: &TestFunction,
    k: usize,
    x: f64,
    a: f64,
    tspec: &TranslationSpec,
    scheme: &PanelScheme,
) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "remainder order k must be at least 1".into(),
        ));
    }
    let lkf = f.dunkl_power_fn(param, k);
    if lkf.is_zero() {
        return Ok(0.0);
    }
    let kernel = theta_build(param, k - 1, x)?;
    let op = TranslationOperator::new(param, tspec)?;
    let w = param.weight_exponent();
    Ok(theta_pair_integral(
        &kernel,
        w,
        &mut |y| op.apply(|t| lkf.value(t), y, a),
        scheme,
    ))
}

/// Direct-route value together with a panel-doubling error estimate.
pub fn remainder_direct_checked(
    param: &DunklParameter,
    f: &TestFunction,
    k: usize,
    x: f64,
    a: f64,
    tspec: &TranslationSpec,
    scheme: &PanelScheme,
) -> Result<(f64, f64)> {
    let coarse = remainder_direct(param, f, k, x, a, tspec, scheme)?;
    let dense = PanelScheme {
        depth: scheme.depth + 4,
        nodes: scheme.nodes * 2,
    };
    let fine = remainder_direct(param, f, k, x, a, tspec, &dense)?;
    Ok((fine, (fine - coarse).abs()))
}

/// Exact iterated integral on polynomials: `I_k = sum_p b_{p+k}(x) L^p f`
/// as a polynomial in the free variable.
pub fn iterated_poly(param: &DunklParameter, f: &Polynomial, k: usize, x: f64) -> Polynomial {
    let mut acc = Polynomial::zero();
    let mut derivative = f.clone();
    let mut p = 0u32;
    loop {
        acc.add_scaled(&derivative, taylor_coeff(param, p + k as u32, x));
        if derivative.is_zero() {
            break;
        }
        derivative = derivative.dunkl(param);
        p += 1;
    }
    acc
}

/// Per-level panel budgets for the nested numeric route; level 1 is the
/// innermost (translation) integral.
const NESTED_SCHEMES: [PanelScheme; 3] = [
    PanelScheme {
        depth: 40,
        nodes: 10,
    },
    PanelScheme {
        depth: 26,
        nodes: 8,
    },
    PanelScheme {
        depth: 18,
        nodes: 6,
    },
];

fn iterated_nest(
    param: &DunklParameter,
    op: &TranslationOperator,
    f: &TestFunction,
    level: usize,
    x: f64,
    a: f64,
) -> f64 {
    let kernel = theta_build(param, 0, x).expect("nested anchors are interior, hence nonzero");
    let w = param.weight_exponent();
    let scheme = &NESTED_SCHEMES[level - 1];
    if level == 1 {
        theta_pair_integral(
            &kernel,
            w,
            &mut |y| op.apply(|t| f.value(t), y, a),
            scheme,
        )
    } else {
        theta_pair_integral(
            &kernel,
            w,
            &mut |y| iterated_nest(param, op, f, level - 1, y, a),
            scheme,
        )
    }
}

/// Numeric iterated integral `I_k(x,f)(a)`, nesting depth capped at 3
/// (cost grows geometrically with depth; deeper orders are available
/// exactly through [`iterated_poly`]).
pub fn iterated_numeric(
    param: &DunklParameter,
    f: &TestFunction,
    k: usize,
    x: f64,
    a: f64,
    tspec: &TranslationSpec,
) -> Result<f64> {
    if k == 0 || k > NESTED_SCHEMES.len() {
        return Err(Error::InvalidParameter(format!(
            "numeric iterated route supports 1 <= k <= {}, got {k}",
            NESTED_SCHEMES.len()
        )));
    }
    if x == 0.0 {
        return Err(Error::InvalidParameter(
            "iterated integral anchor must be nonzero".into(),
        ));
    }
    let op = TranslationOperator::new(param, tspec)?;
    Ok(iterated_nest(param, &op, f, k, x, a))
}

/// `I_k(x, f)(a)` by the best available route: exact coefficient algebra for
/// polynomials, nested kernel quadrature (capped at `k <= 3`) otherwise.
pub fn iterated_value(
    param: &DunklParameter,
    f: &TestFunction,
    k: usize,
    x: f64,
    a: f64,
    tspec: &TranslationSpec,
) -> Result<f64> {
    match f {
        TestFunction::Poly(p) => Ok(iterated_poly(param, p, k, x).eval(a)),
        _ => iterated_numeric(param, f, k, x, a, tspec),
    }
}

/// `‖R_k(x,f)‖_{p,a}`; the remainder inherits the decay of `f` widened by
/// the translation amount `|x|`.
pub fn remainder_norm(
    param: &DunklParameter,
    f: &TestFunction,
    k: usize,
    x: f64,
    p: f64,
    tspec: &TranslationSpec,
    qspec: &QuadratureSpec,
) -> Result<NormValue> {
    if f.dunkl_power_fn(param, k).is_zero() {
        return Ok(NormValue {
            value: 0.0,
            error_bound: 0.0,
        });
    }
    let radius = f
        .decay()
        .truncation_radius(qspec)
        .ok_or_else(|| Error::NotIntegrable(format!("{f} is not integrable")))?
        + x.abs();
    let rem = RemainderFn::new(param, f, k, x, tspec)?;
    lp_norm_within(param, |a| rem.eval(a), radius, p, qspec)
}

/// Nodes used for the two fixed rules inside the decomposition integral.
const DECOMP_NODES: usize = 24;

/// The two norms of the constructive decomposition at anchor `x > 0`:
///
/// * `n1 = ‖R_k(x,f)‖_{p,a} / b_k(x)`, the order-k piece;
/// * `n0 = ‖ (1/b_k(x)) int theta_0(x,y) R_k(y,f)(.) A(y) dy ‖_{p,a}`,
///   the order-(k-1) piece.
///
/// Both come from closed expressions, never from differentiating the
/// decomposition numerically. Returns `(n0, n1)`.
pub fn k_decomposition(
    param: &DunklParameter,
    f: &TestFunction,
    k: usize,
    x: f64,
    p: f64,
    tspec: &TranslationSpec,
    qspec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    if !(x > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "decomposition anchor must be positive, got {x}"
        )));
    }
    if f.dunkl_power_fn(param, k).is_zero() {
        return Ok((0.0, 0.0));
    }
    let bk = taylor_coeff(param, k as u32, x);
    let n1 = remainder_norm(param, f, k, x, p, tspec, qspec)?.value / bk;

    // theta_0 against the remainder in its anchor: the even part u_0 is the
    // constant sgn(x)/(2 x^w) under a t^w weight, the odd part contributes
    // the constant density 1/2 after A(y) cancels |y|^{-w}.
    let w = param.weight_exponent();
    let u0 = 1.0 / (2.0 * x.powf(w));
    let rule_a = jacobi_rule(DECOMP_NODES, 0.0, w)?;
    let rule_b = legendre_rule(DECOMP_NODES);
    // Remainder functions at the fixed quadrature nodes, both signs.
    let mut nodes_a = Vec::with_capacity(DECOMP_NODES);
    for &u in &rule_a.nodes {
        let t = x * (1.0 + u) / 2.0;
        nodes_a.push((
            RemainderFn::new(param, f, k, t, tspec)?,
            RemainderFn::new(param, f, k, -t, tspec)?,
        ));
    }
    let mut nodes_b = Vec::with_capacity(DECOMP_NODES);
    for &u in &rule_b.nodes {
        let t = x * (1.0 + u) / 2.0;
        nodes_b.push((
            RemainderFn::new(param, f, k, t, tspec)?,
            RemainderFn::new(param, f, k, -t, tspec)?,
        ));
    }
    let scale_a = (x / 2.0).powf(w + 1.0);
    let scale_b = x / 2.0;
    let radius = f
        .decay()
        .truncation_radius(qspec)
        .ok_or_else(|| Error::NotIntegrable(format!("{f} is not integrable")))?
        + x.abs();
    let inner = |a: f64| {
        let mut acc = NeumaierSum::new();
        for ((plus, minus), &gw) in nodes_a.iter().zip(&rule_a.weights) {
            acc.add(gw * scale_a * u0 * (plus.eval(a) + minus.eval(a)));
        }
        for ((plus, minus), &gw) in nodes_b.iter().zip(&rule_b.weights) {
            acc.add(gw * scale_b * 0.5 * (plus.eval(a) - minus.eval(a)));
        }
        acc.value()
    };
    let n0 = lp_norm_within(param, inner, radius, p, qspec)?.value / bk;
    Ok((n0, n1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn param(alpha: f64) -> DunklParameter {
        DunklParameter::new(alpha).unwrap()
    }

    fn tspec() -> TranslationSpec {
        TranslationSpec::default()
    }

    #[test]
    fn low_degree_polynomials_vanish() {
        let pr = param(1.2);
        let cubic = Polynomial::new(vec![1.0, -2.0, 0.5, 3.0]);
        let rem = remainder_recursive_poly(&pr, &cubic, 4, 1.7);
        assert!(rem.is_zero());
        let as_fn = TestFunction::Poly(cubic);
        let direct = remainder_direct(&pr, &as_fn, 4, 1.7, 0.3, &tspec(), &PanelScheme::default())
            .unwrap();
        assert_eq!(direct, 0.0);
    }

    #[test]
    fn square_function_first_remainder() {
        // R_1(x, y^2)(0) = tau_x(y^2)(0) - 0 = x^2.
        let pr = param(0.5);
        let sq = TestFunction::Poly(Polynomial::monomial(2, 1.0));
        let direct =
            remainder_direct(&pr, &sq, 1, 1.0, 0.0, &tspec(), &PanelScheme::default()).unwrap();
        assert_relative_eq!(direct, 1.0, max_relative = 1e-9);
        let rec = remainder_recursive(&pr, &sq, 1, 1.0, 0.0, &tspec()).unwrap();
        assert_relative_eq!(rec, 1.0, max_relative = 1e-9);
        let exact = remainder_recursive_poly(&pr, &Polynomial::monomial(2, 1.0), 1, 1.0);
        assert_relative_eq!(exact.eval(0.0), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn identity_function_first_remainder_is_x() {
        let pr = param(0.7);
        let id = TestFunction::Poly(Polynomial::monomial(1, 1.0));
        let x = 0.65;
        let rec = remainder_recursive(&pr, &id, 1, x, 0.0, &tspec()).unwrap();
        assert_relative_eq!(rec, x, max_relative = 1e-10);
    }

    #[test]
    fn consecutive_orders_differ_by_one_taylor_term() {
        let pr = param(0.5);
        let f = TestFunction::gaussian(1.0);
        let (x, a) = (0.8, 0.2);
        for k in 2..=4usize {
            let rk = remainder_recursive(&pr, &f, k, x, a, &tspec()).unwrap();
            let rk1 = remainder_recursive(&pr, &f, k - 1, x, a, &tspec()).unwrap();
            let term = taylor_coeff(&pr, k as u32 - 1, x)
                * f.dunkl_power_fn(&pr, k - 1).value(a);
            assert_relative_eq!(rk, rk1 - term, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn frozen_gaussian_remainders() {
        // Independently computed with 50-digit arithmetic:
        // alpha = 0.5, f = gaussian(1), x = 0.8, a = 0.2.
        let pr = param(0.5);
        let f = TestFunction::gaussian(1.0);
        let r1 = remainder_recursive(&pr, &f, 1, 0.8, 0.2, &tspec()).unwrap();
        assert_relative_eq!(r1, -0.30344592739667908825, max_relative = 1e-9);
        let r2 = remainder_recursive(&pr, &f, 2, 0.8, 0.2, &tspec()).unwrap();
        assert_relative_eq!(r2, -0.25116866482031880546, max_relative = 1e-9);
    }

    #[test]
    fn routes_agree_on_smooth_functions() {
        let pr = param(0.5);
        let f = TestFunction::gaussian(1.0);
        let (value, err) =
            remainder_direct_checked(&pr, &f, 2, 0.5, 0.3, &tspec(), &PanelScheme::default())
                .unwrap();
        let rec = remainder_recursive(&pr, &f, 2, 0.5, 0.3, &tspec()).unwrap();
        assert!(err < 1e-9, "direct-route self-estimate {err}");
        assert_relative_eq!(value, rec, max_relative = 1e-7, epsilon = 1e-10);
    }

    #[test]
    fn kernel_reduction_by_one_order() {
        // R_k(x,f)(a) = int theta_0(x,y) R_{k-1}(y, Lf)(a) A(y) dy.
        let pr = param(0.5);
        let f = TestFunction::gaussian(1.0);
        let (x, a, k) = (0.8, 0.2, 2usize);
        let lhs = remainder_recursive(&pr, &f, k, x, a, &tspec()).unwrap();
        let lf = f.dunkl_derivative(&pr);
        let kernel = theta_build(&pr, 0, x).unwrap();
        let w = pr.weight_exponent();
        let mut fns = std::collections::HashMap::new();
        let mut h = |y: f64| -> f64 {
            let key = y.to_bits();
            let entry = fns
                .entry(key)
                .or_insert_with(|| RemainderFn::new(&pr, &lf, k - 1, y, &tspec()).unwrap());
            entry.eval(a)
        };
        let rhs = theta_pair_integral(&kernel, w, &mut h, &PanelScheme::default());
        assert_relative_eq!(lhs, rhs, max_relative = 1e-7, epsilon = 1e-9);
    }

    #[test]
    fn iterated_polynomial_shift_and_base_case() {
        let pr = param(0.3);
        // I_1(x, 1) = b_1(x).
        let one = Polynomial::constant(1.0);
        let i1 = iterated_poly(&pr, &one, 1, 1.4);
        assert_relative_eq!(
            i1.eval(0.0),
            taylor_coeff(&pr, 1, 1.4),
            max_relative = 1e-14
        );
        // L^k I_k(x, f) = R_k(x, f) exactly on polynomials, k <= 5.
        let f = Polynomial::new(vec![0.5, -1.0, 2.0, 0.25, -0.75, 1.5, 0.3]);
        for k in 1..=5usize {
            let mut lhs = iterated_poly(&pr, &f, k, 0.9);
            for _ in 0..k {
                lhs = lhs.dunkl(&pr);
            }
            let rhs = remainder_recursive_poly(&pr, &f, k, 0.9);
            let scale = 1.0 + rhs.coeff_scale();
            for &a in &[-1.5, 0.0, 0.7, 2.0] {
                assert!(
                    (lhs.eval(a) - rhs.eval(a)).abs() < 1e-12 * scale,
                    "k={k} a={a}: {} vs {}",
                    lhs.eval(a),
                    rhs.eval(a)
                );
            }
        }
    }

    #[test]
    fn iterated_numeric_matches_exact_on_polynomials() {
        let pr = param(0.5);
        let q = Polynomial::new(vec![1.0, -0.5, 0.75]);
        let f = TestFunction::Poly(q.clone());
        let exact = iterated_poly(&pr, &q, 1, 0.8);
        let numeric = iterated_numeric(&pr, &f, 1, 0.8, 0.3, &tspec()).unwrap();
        assert_relative_eq!(numeric, exact.eval(0.3), max_relative = 1e-8);
    }

    #[test]
    fn pushed_identity_matches_remainder_numerically() {
        // I_k(x, L^k f) plays the role of L^k I_k(x, f); k = 2 on the
        // gaussian is the expensive nested case.
        let pr = param(0.5);
        let f = TestFunction::gaussian(1.0);
        let l2f = f.dunkl_power_fn(&pr, 2);
        let lhs = iterated_numeric(&pr, &l2f, 2, 0.8, 0.2, &tspec()).unwrap();
        let rhs = remainder_recursive(&pr, &f, 2, 0.8, 0.2, &tspec()).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-6, epsilon = 1e-8);
    }

    #[test]
    fn iterated_depth_is_capped() {
        let pr = param(0.5);
        let f = TestFunction::gaussian(1.0);
        assert!(iterated_numeric(&pr, &f, 4, 0.8, 0.2, &tspec()).is_err());
        assert!(iterated_numeric(&pr, &f, 0, 0.8, 0.2, &tspec()).is_err());
    }

    #[test]
    fn remainder_is_continuous_in_the_anchor() {
        let pr = param(0.5);
        let f = TestFunction::gaussian(1.0);
        let mut prev = None;
        for i in 0..=20 {
            let x = 0.2 + 0.05 * i as f64;
            let v = remainder_recursive(&pr, &f, 2, x, 0.4, &tspec()).unwrap();
            if let Some(p) = prev {
                assert!((v - p as f64).abs() < 0.05, "jump at x={x}");
            }
            prev = Some(v);
        }
    }

    #[test]
    fn remainder_norm_growth_is_controlled() {
        // ‖R_k(x,f)‖ <= c |x|^{k-1} ‖L^{k-1} f‖ with a sane empirical c.
        let pr = param(0.5);
        let f = TestFunction::gaussian(1.0);
        let qspec = QuadratureSpec::default();
        for k in 1..=2usize {
            let lkm1 = f.dunkl_power_fn(&pr, k - 1);
            let denom_norm = crate::norms::lp_norm(&pr, &lkm1, 2.0, &qspec).unwrap().value;
            // Same estimate one order down: ‖R_k(x,f)‖ <= c' |x|^k ‖L^k f‖.
            let lk = f.dunkl_power_fn(&pr, k);
            let denom_k = crate::norms::lp_norm(&pr, &lk, 2.0, &qspec).unwrap().value;
            let mut sup: f64 = 0.0;
            let mut sup_k: f64 = 0.0;
            for &x in &[0.05, 0.2, 0.7, 1.3, 2.0] {
                let n = remainder_norm(&pr, &f, k, x, 2.0, &tspec(), &qspec)
                    .unwrap()
                    .value;
                sup = sup.max(n / (x.powi(k as i32 - 1) * denom_norm));
                sup_k = sup_k.max(n / (x.powi(k as i32) * denom_k));
            }
            assert!(sup.is_finite() && sup < 50.0, "k={k} ratio {sup}");
            assert!(sup_k.is_finite() && sup_k < 50.0, "k={k} same-order ratio {sup_k}");
        }
    }

    #[test]
    fn request_dispatch_matches_route_functions() {
        let pr = param(0.5);
        let f = TestFunction::gaussian(1.0);
        let scheme = PanelScheme::default();
        let mut req = RemainderRequest {
            f: f.clone(),
            k: 2,
            x: 0.8,
            a: 0.2,
            route: RemainderRoute::Recursive,
        };
        let rec = remainder(&pr, &req, &tspec(), &scheme).unwrap();
        assert_abs_diff_eq!(
            rec,
            remainder_recursive(&pr, &f, 2, 0.8, 0.2, &tspec()).unwrap(),
            epsilon = 0.0
        );
        req.route = RemainderRoute::Direct;
        let dir = remainder(&pr, &req, &tspec(), &scheme).unwrap();
        assert_abs_diff_eq!(dir, rec, epsilon = 1e-7);
        // Malformed requests are rejected before any work happens.
        req.k = 0;
        assert!(remainder(&pr, &req, &tspec(), &scheme).is_err());
        req.k = 2;
        req.x = 0.0;
        assert!(remainder(&pr, &req, &tspec(), &scheme).is_err());
    }

    #[test]
    fn iterated_value_picks_the_right_route() {
        let pr = param(0.5);
        let tsp = tspec();
        let poly = TestFunction::Poly(Polynomial::new(vec![1.0, -0.5, 0.25, 0.125]));
        let via_dispatch = iterated_value(&pr, &poly, 2, 0.9, 0.3, &tsp).unwrap();
        if let TestFunction::Poly(p) = &poly {
            let exact = iterated_poly(&pr, p, 2, 0.9).eval(0.3);
            assert_abs_diff_eq!(via_dispatch, exact, epsilon = 0.0);
        }
        let g = TestFunction::gaussian(1.0);
        let numeric = iterated_value(&pr, &g, 1, 0.8, 0.2, &tsp).unwrap();
        assert_abs_diff_eq!(
            numeric,
            iterated_numeric(&pr, &g, 1, 0.8, 0.2, &tsp).unwrap(),
            epsilon = 0.0
        );
    }

    #[test]
    fn decomposition_pieces() {
        let pr = param(0.5);
        let qspec = QuadratureSpec::default();
        // Low-degree polynomial: identically zero remainder.
        let line = TestFunction::Poly(Polynomial::monomial(1, 1.0));
        let (n0, n1) = k_decomposition(&pr, &line, 2, 0.5, 2.0, &tspec(), &qspec).unwrap();
        assert_eq!((n0, n1), (0.0, 0.0));
        // Gaussian: both pieces finite and positive.
        let f = TestFunction::gaussian(1.0);
        let (n0, n1) = k_decomposition(&pr, &f, 1, 0.5, 2.0, &tspec(), &qspec).unwrap();
        assert!(n0 > 0.0 && n0.is_finite(), "n0 = {n0}");
        assert!(n1 > 0.0 && n1.is_finite(), "n1 = {n1}");
        assert!(k_decomposition(&pr, &f, 1, -0.5, 2.0, &tspec(), &qspec).is_err());
    }
}
