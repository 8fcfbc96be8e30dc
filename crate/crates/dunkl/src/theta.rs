//! Exact construction of the Taylor-remainder kernels `u_k`, `v_k`,
//! `theta_k = u_k + v_k`.
//!
//! With `w = 2 alpha + 1`, `X = |x|` and `A(y) = |y|^w`, the radial profiles
//! on `0 < t <= X` are built by the recursion
//!
//! ```text
//! u_0 = sgn(x) / (2 X^w)                 (constant, even in y)
//! v_0(t) = t^{-w} / 2                    (odd: value sgn(y) v_0(|y|))
//! u_k(t) = int_t^X v_{k-1}(z) dz
//! v_k(t) = t^{-w} int_t^X u_{k-1}(z) z^w dz
//! ```
//!
//! Every step stays inside the algebra of finite sums `c t^e (ln t)^m`, so
//! the kernels, their moments against the Taylor coefficients `b_p`, and
//! their region-wise integrals are all evaluated from closed forms. Only the
//! absolute-value integral needs numerics, and there only for locating sign
//! changes; each sign-constant region is then integrated exactly.

use serde::Serialize;

use crate::special::{taylor_coeff, DunklParameter};
use crate::{Error, Result};

/// Tolerance for identifying exponents, in particular the `e = -1` branch of
/// integration that produces logarithms. Exponents arising here are short
/// combinations of integers and `2 alpha + 1`, so their spacing is either 0
/// or far above this threshold.
pub const EXPONENT_TOL: f64 = 1e-12;

/// One term `t -> coeff * t^exponent * (ln t)^log_power` on `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLogTerm {
    pub coeff: f64,
    pub exponent: f64,
    pub log_power: u32,
}

/// How a radial profile extends to negative arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    /// `S(y) = S(|y|)`.
    Even,
    /// `S(y) = sgn(y) S(|y|)`.
    SgnOdd,
}

/// A merged, sorted sum of power-log terms anchored at a fixed outer
/// argument `x`; finite on `0 < t <= |x|`. Serializes as its term rows plus
/// parity and anchor, for inspection in reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermSum {
    terms: Vec<PowerLogTerm>,
    parity: Parity,
    x_anchor: f64,
}

impl TermSum {
    /// Sorts by `(exponent, log_power)` and merges duplicates; terms whose
    /// exponents differ by at most [`EXPONENT_TOL`] count as equal.
    pub fn new(mut terms: Vec<PowerLogTerm>, parity: Parity, x_anchor: f64) -> Self {
        terms.retain(|t| t.coeff != 0.0);
        terms.sort_by(|a, b| {
            a.exponent
                .partial_cmp(&b.exponent)
                .unwrap()
                .then(a.log_power.cmp(&b.log_power))
        });
        let mut merged: Vec<PowerLogTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last)
                    if (last.exponent - t.exponent).abs() <= EXPONENT_TOL
                        && last.log_power == t.log_power =>
                {
                    last.coeff += t.coeff;
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff != 0.0);
        Self {
            terms: merged,
            parity,
            x_anchor,
        }
    }

    pub fn terms(&self) -> &[PowerLogTerm] {
        &self.terms
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn x_anchor(&self) -> f64 {
        self.x_anchor
    }

    /// Radial value at `t > 0`, before any parity sign.
    pub fn eval_radial(&self, t: f64) -> f64 {
        debug_assert!(t > 0.0);
        let lnt = t.ln();
        let mut acc = crate::quadrature::NeumaierSum::new();
        for term in &self.terms {
            acc.add(term.coeff * t.powf(term.exponent) * lnt.powi(term.log_power as i32));
        }
        acc.value()
    }

    /// Value at a signed argument with the parity rule applied.
    /// Requires `y != 0` and `|y| <= |x_anchor|` (within a relative slack).
    pub fn eval(&self, y: f64) -> Result<f64> {
        let t = y.abs();
        if t == 0.0 || t > self.x_anchor.abs() * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "evaluation point {y} outside kernel range (0, {}]",
                self.x_anchor.abs()
            )));
        }
        let v = self.eval_radial(t);
        Ok(match self.parity {
            Parity::Even => v,
            Parity::SgnOdd => y.signum() * v,
        })
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(
            self.terms
                .iter()
                .map(|t| PowerLogTerm {
                    coeff: c * t.coeff,
                    ..*t
                })
                .collect(),
            self.parity,
            self.x_anchor,
        )
    }

    /// Sum of two profiles over the same anchor; the stated parity wins.
    pub fn add(&self, other: &Self, parity: Parity) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self::new(terms, parity, self.x_anchor)
    }

    /// Multiplies by `t^delta`.
    pub fn mul_power(&self, delta: f64) -> Self {
        Self::new(
            self.terms
                .iter()
                .map(|t| PowerLogTerm {
                    exponent: t.exponent + delta,
                    ..*t
                })
                .collect(),
            self.parity,
            self.x_anchor,
        )
    }

    /// Exact termwise antiderivative. The `e = -1` terms integrate to
    /// `(ln t)^{m+1} / (m+1)`; all others use the by-parts closed form
    /// `int t^e (ln t)^m dt = t^{e+1} sum_j (-1)^j m!/(m-j)! (ln t)^{m-j} / (e+1)^{j+1}`.
    pub fn antiderivative(&self) -> Self {
        let mut out = Vec::new();
        for term in &self.terms {
            if (term.exponent + 1.0).abs() <= EXPONENT_TOL {
                out.push(PowerLogTerm {
                    coeff: term.coeff / f64::from(term.log_power + 1),
                    exponent: 0.0,
                    log_power: term.log_power + 1,
                });
            } else {
                let e1 = term.exponent + 1.0;
                let m = term.log_power;
                let mut factor = 1.0 / e1;
                for j in 0..=m {
                    out.push(PowerLogTerm {
                        coeff: term.coeff * factor,
                        exponent: e1,
                        log_power: m - j,
                    });
                    if j < m {
                        factor *= -f64::from(m - j) / e1;
                    }
                }
            }
        }
        Self::new(out, self.parity, self.x_anchor)
    }

    /// Limit of the profile as `t -> 0+`; errors when any term diverges.
    pub fn limit_at_zero(&self) -> Result<f64> {
        let mut acc = 0.0;
        for term in &self.terms {
            if term.exponent > EXPONENT_TOL {
                continue;
            }
            if term.exponent.abs() <= EXPONENT_TOL && term.log_power == 0 {
                acc += term.coeff;
                continue;
            }
            return Err(Error::DivergentTerm {
                coeff: term.coeff,
                exponent: term.exponent,
                log_power: term.log_power,
            });
        }
        Ok(acc)
    }

    /// The function `t -> int_t^upper S(z) dz`, exactly, as a new TermSum
    /// (the constant part enters as an `e = 0, m = 0` term).
    pub fn integral_from(&self, upper: f64) -> Self {
        let anti = self.antiderivative();
        let at_upper = anti.eval_radial(upper);
        let mut terms: Vec<PowerLogTerm> = anti
            .terms
            .iter()
            .map(|t| PowerLogTerm {
                coeff: -t.coeff,
                ..*t
            })
            .collect();
        terms.push(PowerLogTerm {
            coeff: at_upper,
            exponent: 0.0,
            log_power: 0,
        });
        Self::new(terms, self.parity, self.x_anchor)
    }

    /// `int_a^b S(z) dz` for `0 < a <= b`, exactly.
    pub fn integral_value(&self, a: f64, b: f64) -> f64 {
        let anti = self.antiderivative();
        anti.eval_radial(b) - anti.eval_radial(a)
    }

    /// `int_0^b S(z) dz`, exactly; errors if the integral diverges at 0.
    pub fn integral_from_zero(&self, b: f64) -> Result<f64> {
        let anti = self.antiderivative();
        Ok(anti.eval_radial(b) - anti.limit_at_zero()?)
    }
}

/// Parity-separated kernel pair at one recursion level and anchor `x`:
/// the full kernel value is `u(|y|) + sgn(y) v(|y|)`.
#[derive(Debug, Clone)]
pub struct ThetaKernel {
    pub u: TermSum,
    pub v: TermSum,
    level: usize,
}

impl ThetaKernel {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn x_anchor(&self) -> f64 {
        self.u.x_anchor()
    }

    /// Kernel value at signed `y` with `0 < |y| <= |x|`.
    pub fn eval(&self, y: f64) -> Result<f64> {
        Ok(self.u.eval(y)? + self.v.eval(y)?)
    }

    /// Radial combination `u(t) + sign * v(t)`: the kernel restricted to the
    /// positive (`sign = +1`) or negative (`sign = -1`) half-line.
    pub fn signed_profile(&self, positive: bool) -> TermSum {
        let s = if positive { 1.0 } else { -1.0 };
        self.u.add(&self.v.scale(s), Parity::Even)
    }
}

/// Builds `(u_level, v_level)` for the given anchor `x != 0`.
pub fn theta_build(param: &DunklParameter, level: usize, x: f64) -> Result<ThetaKernel> {
    if x == 0.0 || !x.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "kernel anchor must be finite and nonzero, got {x}"
        )));
    }
    let w = param.weight_exponent();
    let bigx = x.abs();
    let mut u = TermSum::new(
        vec![PowerLogTerm {
            coeff: x.signum() / (2.0 * bigx.powf(w)),
            exponent: 0.0,
            log_power: 0,
        }],
        Parity::Even,
        x,
    );
    let mut v = TermSum::new(
        vec![PowerLogTerm {
            coeff: 0.5,
            exponent: -w,
            log_power: 0,
        }],
        Parity::SgnOdd,
        x,
    );
    for _ in 0..level {
        let next_u = {
            let mut s = v.integral_from(bigx);
            s.parity = Parity::Even;
            s
        };
        let next_v = {
            let mut s = u.mul_power(w).integral_from(bigx).mul_power(-w);
            s.parity = Parity::SgnOdd;
            s
        };
        u = next_u;
        v = next_v;
    }
    Ok(ThetaKernel { u, v, level })
}

/// Upper bound `b_k(|x|) + |x| b_{k-1}(|x|)` for the absolute kernel
/// integral of level `k - 1`.
pub fn theta_abs_bound(param: &DunklParameter, k: usize, x: f64) -> f64 {
    let bigx = x.abs();
    taylor_coeff(param, k as u32, bigx) + bigx * taylor_coeff(param, k as u32 - 1, bigx)
}

/// Locates the zeros of a radial profile on `(0, bigx]` by a log-spaced sign
/// scan followed by bisection; returns ascending region boundaries
/// `0 = a_0 < a_1 < ... < a_r = bigx` with constant sign inside each region.
fn sign_boundaries(s: &TermSum, bigx: f64) -> Vec<f64> {
    let mut bounds = vec![0.0];
    if s.terms().is_empty() {
        bounds.push(bigx);
        return bounds;
    }
    let n = 2048;
    let lo = bigx * 1e-10;
    let ratio = (bigx / lo).powf(1.0 / n as f64);
    let mut prev_t = lo;
    let mut prev_sign = s.eval_radial(prev_t) >= 0.0;
    let mut t = lo;
    for _ in 0..n {
        t *= ratio;
        let t_clamped = t.min(bigx);
        let sign = s.eval_radial(t_clamped) >= 0.0;
        if sign != prev_sign {
            let (mut a, mut b) = (prev_t, t_clamped);
            for _ in 0..100 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if (s.eval_radial(mid) >= 0.0) == prev_sign {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            bounds.push(0.5 * (a + b));
        }
        prev_t = t_clamped;
        prev_sign = sign;
    }
    bounds.push(bigx);
    bounds
}

/// `int_{-|x|}^{|x|} |theta_{k-1}(x, y)| A(y) dy`, evaluated exactly on each
/// sign-constant region of the two half-line profiles. Requires `k >= 1`.
pub fn theta_abs_integral(param: &DunklParameter, k: usize, x: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "absolute kernel integral needs k >= 1".into(),
        ));
    }
    let kernel = theta_build(param, k - 1, x)?;
    let w = param.weight_exponent();
    let bigx = x.abs();
    let mut total = 0.0;
    for positive in [true, false] {
        let profile = kernel.signed_profile(positive).mul_power(w);
        let bounds = sign_boundaries(&kernel.signed_profile(positive), bigx);
        for pair in bounds.windows(2) {
            let piece = if pair[0] == 0.0 {
                profile.integral_from_zero(pair[1])?
            } else {
                profile.integral_value(pair[0], pair[1])
            };
            total += piece.abs();
        }
    }
    Ok(total)
}

/// `int_{-|x|}^{|x|} theta_0(x, y) b_p(y) A(y) dy`, exactly. Equals
/// `b_{p+1}(x)`; the test suite asserts that identity.
pub fn theta_moment(param: &DunklParameter, p: u32, x: f64) -> Result<f64> {
    let kernel = theta_build(param, 0, x)?;
    let w = param.weight_exponent();
    let bigx = x.abs();
    let cp = taylor_coeff(param, p, 1.0);
    // Parity kills one half of the kernel: b_p A y^p pairs with the even
    // part u for even p and with the odd part v for odd p.
    let half = if p % 2 == 0 { &kernel.u } else { &kernel.v };
    let integrand = half.mul_power(f64::from(p) + w);
    Ok(2.0 * cp * integrand.integral_from_zero(bigx)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_fixed;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn param(alpha: f64) -> DunklParameter {
        DunklParameter::new(alpha).unwrap()
    }

    fn term(coeff: f64, exponent: f64, log_power: u32) -> PowerLogTerm {
        PowerLogTerm {
            coeff,
            exponent,
            log_power,
        }
    }

    #[test]
    fn integral_of_constant_profile() {
        // int_t^2 dz = 2 - t.
        let s = TermSum::new(vec![term(1.0, 0.0, 0)], Parity::Even, 2.0);
        let f = s.integral_from(2.0);
        assert_eq!(f.terms().len(), 2);
        assert_relative_eq!(f.eval_radial(0.7), 2.0 - 0.7, epsilon = 1e-15);
        assert_eq!(f.terms()[0], term(2.0, 0.0, 0));
        assert_eq!(f.terms()[1], term(-1.0, 1.0, 0));
    }

    #[test]
    fn integral_of_reciprocal_takes_log_branch() {
        // int_t^e dz/z = 1 - ln t.
        let s = TermSum::new(vec![term(1.0, -1.0, 0)], Parity::Even, 3.0);
        let f = s.integral_from(std::f64::consts::E);
        assert_relative_eq!(f.eval_radial(0.4), 1.0 - 0.4f64.ln(), epsilon = 1e-14);
        assert!(f
            .terms()
            .iter()
            .any(|t| t.log_power == 1 && (t.coeff + 1.0).abs() < 1e-15));
    }

    #[test]
    fn integral_of_log_over_t_matches_quadrature() {
        // int_t^1 ln(z)/z dz = -(ln t)^2 / 2.
        let s = TermSum::new(vec![term(1.0, -1.0, 1)], Parity::Even, 1.0);
        let f = s.integral_from(1.0);
        let at = f.eval_radial(0.3);
        assert_relative_eq!(at, -0.3f64.ln().powi(2) / 2.0, epsilon = 1e-14);
        let numeric = integrate_fixed(&mut |z: f64| z.ln() / z, 0.3, 1.0, 60);
        assert_relative_eq!(at, numeric, epsilon = 1e-12);
    }

    #[test]
    fn by_parts_closed_form_against_quadrature() {
        // int_{0.2}^{1.7} z^e (ln z)^m dz for a non-integer exponent.
        let s = TermSum::new(vec![term(1.3, 0.6, 2)], Parity::Even, 2.0);
        let exact = s.integral_value(0.2, 1.7);
        let numeric = integrate_fixed(&mut |z: f64| 1.3 * z.powf(0.6) * z.ln().powi(2), 0.2, 1.7, 80);
        assert_relative_eq!(exact, numeric, max_relative = 1e-12);
    }

    #[test]
    fn level_zero_matches_direct_substitution() {
        // alpha = 0.5, x = 1, y = 0.5: 1/2 + (1/2) 0.5^{-2} = 2.5.
        let p = param(0.5);
        let k = theta_build(&p, 0, 1.0).unwrap();
        assert_relative_eq!(k.eval(0.5).unwrap(), 2.5, epsilon = 1e-14);
        // Parity: even u, sgn-odd v.
        assert_relative_eq!(k.u.eval(-0.5).unwrap(), k.u.eval(0.5).unwrap(), epsilon = 1e-15);
        assert_relative_eq!(
            k.v.eval(-0.5).unwrap(),
            -k.v.eval(0.5).unwrap(),
            epsilon = 1e-15
        );
        assert!(k.eval(1.5).is_err());
        assert!(k.eval(0.0).is_err());
    }

    #[test]
    fn level_one_log_case_at_alpha_zero() {
        // w = 1: u_1(t) = (ln X - ln t) / 2.
        let p = param(0.0);
        let x = 1.7;
        let k = theta_build(&p, 1, x).unwrap();
        let t = 0.45;
        assert_relative_eq!(
            k.u.eval_radial(t),
            (x.ln() - t.ln()) / 2.0,
            epsilon = 1e-14
        );
        assert!(k
            .u
            .terms()
            .iter()
            .any(|q| q.log_power == 1 && (q.coeff + 0.5).abs() < 1e-15));
    }

    #[test]
    fn hand_computed_ladder_at_alpha_half() {
        // alpha = 0.5 (w = 2), x = 1, t = 0.5. Exact fractions:
        // u_1 = 1/2, v_1 = 7/12, u_2 = 5/48, v_2 = 1/6.
        let p = param(0.5);
        let k1 = theta_build(&p, 1, 1.0).unwrap();
        assert_relative_eq!(k1.u.eval_radial(0.5), 0.5, epsilon = 1e-14);
        assert_relative_eq!(k1.v.eval_radial(0.5), 7.0 / 12.0, epsilon = 1e-14);
        assert_relative_eq!(k1.eval(0.5).unwrap(), 13.0 / 12.0, epsilon = 1e-14);
        let k2 = theta_build(&p, 2, 1.0).unwrap();
        assert_relative_eq!(k2.u.eval_radial(0.5), 5.0 / 48.0, epsilon = 1e-14);
        assert_relative_eq!(k2.v.eval_radial(0.5), 1.0 / 6.0, epsilon = 1e-14);
    }

    /// Brute-force recursion by nested fixed Gauss panels; accurate away
    /// from t = 0 because the integrands are smooth on [t, X].
    fn oracle_u(w: f64, u0: f64, k: usize, bigx: f64, t: f64) -> f64 {
        if k == 0 {
            return u0;
        }
        integrate_fixed(&mut |z| oracle_v(w, u0, k - 1, bigx, z), t, bigx, 48)
    }

    fn oracle_v(w: f64, u0: f64, k: usize, bigx: f64, t: f64) -> f64 {
        if k == 0 {
            return t.powf(-w) / 2.0;
        }
        t.powf(-w)
            * integrate_fixed(
                &mut |z| oracle_u(w, u0, k - 1, bigx, z) * z.powf(w),
                t,
                bigx,
                48,
            )
    }

    #[test]
    fn symbolic_matches_nested_quadrature() {
        for &alpha in &[-0.4, 0.5] {
            let p = param(alpha);
            let w = p.weight_exponent();
            let x: f64 = 1.3;
            let u0 = 1.0 / (2.0 * x.powf(w));
            for level in 0..=3usize {
                let k = theta_build(&p, level, x).unwrap();
                for &t in &[0.5, 0.9, 1.2] {
                    assert_relative_eq!(
                        k.u.eval_radial(t),
                        oracle_u(w, u0, level, x, t),
                        max_relative = 1e-9,
                        epsilon = 1e-12
                    );
                    assert_relative_eq!(
                        k.v.eval_radial(t),
                        oracle_v(w, u0, level, x, t),
                        max_relative = 1e-9,
                        epsilon = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn construction_closes_for_deep_levels() {
        for &alpha in &[-0.25, 0.0, 0.5, 1.5] {
            let p = param(alpha);
            let k = theta_build(&p, 6, 2.0).unwrap();
            assert!(k.eval(0.7).unwrap().is_finite());
        }
    }

    #[test]
    fn homogeneity_in_the_anchor() {
        // theta_level(s x, s y) = s^(level - w) theta_level(x, y).
        let p = param(0.3);
        let w = p.weight_exponent();
        let (x, y, s) = (1.1, 0.6, 2.0);
        for level in 0..=3usize {
            let base = theta_build(&p, level, x).unwrap().eval(y).unwrap();
            let scaled = theta_build(&p, level, s * x).unwrap().eval(s * y).unwrap();
            assert_relative_eq!(
                scaled,
                s.powf(level as f64 - w) * base,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn moment_identity_reproduces_taylor_coefficients() {
        for &alpha in &[-0.4, 0.0, 0.5, 1.5] {
            let p = param(alpha);
            for &x in &[0.1, 1.0, 3.0, -2.0] {
                for q in 0..=5u32 {
                    let lhs = theta_moment(&p, q, x).unwrap();
                    let rhs = taylor_coeff(&p, q + 1, x);
                    assert!(
                        (lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs()),
                        "alpha={alpha} x={x} p={q}: {lhs} vs {rhs}"
                    );
                }
            }
        }
    }

    #[test]
    fn moment_sign_follows_anchor() {
        let p = param(0.5);
        assert!(theta_moment(&p, 2, -1.5).unwrap() < 0.0);
        assert!(theta_moment(&p, 2, 1.5).unwrap() > 0.0);
    }

    #[test]
    fn absolute_integral_respects_bound() {
        for &alpha in &[-0.4, 0.0, 0.5, 1.5] {
            let p = param(alpha);
            for &x in &[0.1, 1.0, 3.0, -2.0] {
                for k in 1..=4usize {
                    let value = theta_abs_integral(&p, k, x).unwrap();
                    let bound = theta_abs_bound(&p, k, x);
                    assert!(
                        value <= bound + 1e-8,
                        "alpha={alpha} x={x} k={k}: {value} > {bound}"
                    );
                    assert!(value > 0.0);
                }
            }
        }
    }

    #[test]
    fn absolute_integral_matches_numeric_oracle() {
        // k = 2, alpha = 0.5, x = 1: compare against direct quadrature of
        // |u + v| t^w + |u - v| t^w with a dense fixed panel per region.
        let p = param(0.5);
        let w = p.weight_exponent();
        let k = theta_build(&p, 1, 1.0).unwrap();
        let mut numeric = 0.0;
        for positive in [true, false] {
            let prof = k.signed_profile(positive);
            // 400 graded panels resolve both the kink and the origin.
            let mut edges: Vec<f64> = (0..=400)
                .map(|i| 1.0 * (i as f64 / 400.0).powi(3))
                .collect();
            edges.dedup();
            for pair in edges.windows(2) {
                if pair[0] == pair[1] {
                    continue;
                }
                numeric += integrate_fixed(
                    &mut |t: f64| prof.eval_radial(t).abs() * t.powf(w),
                    pair[0].max(1e-300),
                    pair[1],
                    24,
                );
            }
        }
        let exact = theta_abs_integral(&p, 2, 1.0).unwrap();
        assert_relative_eq!(exact, numeric, max_relative = 1e-8);
    }

    #[test]
    fn absolute_integral_scales_by_two_to_the_k() {
        let p = param(0.35);
        for k in 1..=3usize {
            let base = theta_abs_integral(&p, k, 0.9).unwrap();
            let doubled = theta_abs_integral(&p, k, 1.8).unwrap();
            assert_relative_eq!(doubled, 2f64.powi(k as i32) * base, max_relative = 1e-10);
        }
    }

    #[test]
    fn divergent_profiles_are_rejected_at_zero() {
        let s = TermSum::new(vec![term(1.0, -1.5, 0)], Parity::Even, 1.0);
        assert!(matches!(
            s.integral_from_zero(1.0),
            Err(Error::DivergentTerm { .. })
        ));
        // Exponents in (-1, 0) stay integrable: int_0^1 t^{-1/2} dt = 2.
        let integrable = TermSum::new(vec![term(1.0, -0.5, 0)], Parity::Even, 1.0);
        assert_relative_eq!(integrable.integral_from_zero(1.0).unwrap(), 2.0, epsilon = 1e-14);
        let logs = TermSum::new(vec![term(1.0, 0.0, 1)], Parity::Even, 1.0);
        assert!(logs.limit_at_zero().is_err());
        let fine = TermSum::new(vec![term(2.0, 0.0, 0), term(1.0, 0.5, 2)], Parity::Even, 1.0);
        assert_relative_eq!(fine.limit_at_zero().unwrap(), 2.0, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn merge_leaves_no_duplicate_keys(
            coeffs in proptest::collection::vec(-5.0f64..5.0, 1..8),
            exps in proptest::collection::vec(-2i32..3, 1..8),
            logs in proptest::collection::vec(0u32..3, 1..8),
        ) {
            let n = coeffs.len().min(exps.len()).min(logs.len());
            let terms: Vec<PowerLogTerm> = (0..n)
                .map(|i| term(coeffs[i], exps[i] as f64, logs[i]))
                .collect();
            let s = TermSum::new(terms, Parity::Even, 1.0);
            for pair in s.terms().windows(2) {
                let same = (pair[0].exponent - pair[1].exponent).abs() <= EXPONENT_TOL
                    && pair[0].log_power == pair[1].log_power;
                prop_assert!(!same);
            }
        }

        #[test]
        fn integral_from_is_consistent_with_values(
            t in 0.1f64..0.9,
            c in -3.0f64..3.0,
            e in -1.5f64..1.5,
        ) {
            let s = TermSum::new(vec![term(c, e, 1)], Parity::Even, 1.0);
            let f = s.integral_from(1.0);
            let direct = s.integral_value(t, 1.0);
            prop_assert!((f.eval_radial(t) - direct).abs() < 1e-10 * (1.0 + direct.abs()));
        }

        #[test]
        fn kernel_homogeneity_random_scale(
            s in 0.5f64..3.0,
            yfrac in 0.1f64..0.95,
            alpha in -0.45f64..1.5,
        ) {
            let p = param(alpha);
            let w = p.weight_exponent();
            let x = 1.2;
            let y = yfrac * x;
            let k1 = theta_build(&p, 2, x).unwrap().eval(y).unwrap();
            let k2 = theta_build(&p, 2, s * x).unwrap().eval(s * y).unwrap();
            prop_assert!((k2 - s.powf(2.0 - w) * k1).abs() < 1e-9 * (1.0 + k1.abs()));
        }
    }
}
