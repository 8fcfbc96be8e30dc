//! Test-function families closed under the reflection-differential operator.
//!
//! Every family stores an exact symbolic core (a polynomial factor), so the
//! operator maps each family into itself with no numeric differentiation:
//!
//! * `GaussHermite {p, sigma}`: `p(x) exp(-x^2 / (2 sigma^2))`
//! * `Bump {N, d, R}`: `N(x) exp(1 - R^2/t - d ln t)` with `t = R^2 - x^2`,
//!   zero outside `[-R, R]` (all derivatives vanish at the boundary)
//! * `Poly`: plain polynomials (smooth but not integrable against the weight)
//!
//! The catalog names accepted by [`TestFunction::parse`] are `gaussian(s)`,
//! `bump(R)`, `poly(c0,...,cn)` and `hermite-like(n,s)`.

use std::fmt;

use crate::poly::Polynomial;
use crate::quadrature::QuadratureSpec;
use crate::special::DunklParameter;
use crate::{Error, Result};

/// Minimal differentiable-function interface used by the operator and by
/// translation commutation checks.
pub trait C1Function {
    fn value(&self, x: f64) -> f64;
    fn derivative(&self, x: f64) -> f64;
}

/// Decay descriptor used to truncate integrals over the real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// Identically zero outside `[-radius, radius]`.
    CompactSupport { radius: f64 },
    /// Bounded by `C exp(-x^2 / (2 sigma^2))` times a polynomial.
    GaussianRate { sigma: f64 },
    /// Polynomial envelope of the given degree; not integrable.
    PolynomialEnvelope { degree: usize },
}

impl Decay {
    /// Finite truncation radius for weighted integrals, or `None` when the
    /// function has no integrable decay. Gaussian tails are cut at
    /// `gaussian_sigmas` standard deviations plus a guard that absorbs the
    /// polynomial growth of the measure weight.
    pub fn truncation_radius(&self, spec: &QuadratureSpec) -> Option<f64> {
        match *self {
            Decay::CompactSupport { radius } => Some(radius),
            Decay::GaussianRate { sigma } => Some(spec.gaussian_sigmas * sigma + spec.radius_guard),
            Decay::PolynomialEnvelope { .. } => None,
        }
    }
}

/// A smooth test function with closed-form operator derivatives of all orders.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    /// `poly(x) * exp(-x^2 / (2 sigma^2))`.
    GaussHermite { poly: Polynomial, sigma: f64 },
    /// `numer(x) * exp(1 - R^2/t - denom_pow * ln t)`, `t = R^2 - x^2`.
    Bump {
        numer: Polynomial,
        denom_pow: u32,
        radius: f64,
    },
    /// A bare polynomial.
    Poly(Polynomial),
}

/// `exp(1 - R^2/t - pow * ln t)` evaluated in one fused exponent so the
/// `0 * inf` products of the naive factored form never arise; `t > 0`.
fn bump_exp(radius: f64, pow: u32, t: f64) -> f64 {
    (1.0 - radius * radius / t - f64::from(pow) * t.ln()).exp()
}

fn shift_up(p: &Polynomial) -> Polynomial {
    Polynomial::monomial(1, 1.0).mul(p)
}

/// Physicists' Hermite polynomial `H_n` by the three-term recurrence.
fn hermite_poly(n: usize) -> Polynomial {
    let mut prev = Polynomial::constant(1.0);
    if n == 0 {
        return prev;
    }
    let mut cur = Polynomial::monomial(1, 2.0);
    for k in 1..n {
        let mut next = shift_up(&cur).scale(2.0);
        next.add_scaled(&prev, -2.0 * k as f64);
        prev = cur;
        cur = next;
    }
    cur
}

/// `p(s x)`.
fn scale_argument(p: &Polynomial, s: f64) -> Polynomial {
    let mut pw = 1.0;
    let coeffs = p
        .coeffs()
        .iter()
        .map(|&c| {
            let out = c * pw;
            pw *= s;
            out
        })
        .collect();
    Polynomial::new(coeffs)
}

impl TestFunction {
    pub fn gaussian(sigma: f64) -> Self {
        TestFunction::GaussHermite {
            poly: Polynomial::constant(1.0),
            sigma,
        }
    }

    pub fn bump(radius: f64) -> Self {
        TestFunction::Bump {
            numer: Polynomial::constant(1.0),
            denom_pow: 0,
            radius,
        }
    }

    pub fn hermite_like(n: usize, sigma: f64) -> Self {
        TestFunction::GaussHermite {
            poly: scale_argument(&hermite_poly(n), 1.0 / sigma),
            sigma,
        }
    }

    /// Parses a catalog name: `gaussian(s)`, `bump(R)`, `poly(c0,...,cn)`,
    /// `hermite-like(n,s)`.
    pub fn parse(name: &str) -> Result<Self> {
        let s = name.trim();
        let open = s
            .find('(')
            .ok_or_else(|| Error::Parse(format!("missing '(' in function name '{s}'")))?;
        if !s.ends_with(')') {
            return Err(Error::Parse(format!("missing ')' in function name '{s}'")));
        }
        let head = s[..open].trim();
        let args: Vec<&str> = s[open + 1..s.len() - 1]
            .split(',')
            .map(str::trim)
            .collect();
        let float = |a: &str| -> Result<f64> {
            a.parse::<f64>()
                .map_err(|_| Error::Parse(format!("expected a number, got '{a}'")))
        };
        match head {
            "gaussian" => {
                if args.len() != 1 {
                    return Err(Error::Parse("gaussian takes one parameter".into()));
                }
                let sigma = float(args[0])?;
                if !(sigma > 0.0) {
                    return Err(Error::Parse("gaussian rate must be positive".into()));
                }
                Ok(Self::gaussian(sigma))
            }
            "bump" => {
                if args.len() != 1 {
                    return Err(Error::Parse("bump takes one parameter".into()));
                }
                let radius = float(args[0])?;
                if !(radius > 0.0) {
                    return Err(Error::Parse("bump radius must be positive".into()));
                }
                Ok(Self::bump(radius))
            }
            "poly" => {
                let coeffs = args
                    .iter()
                    .map(|a| float(a))
                    .collect::<Result<Vec<f64>>>()?;
                Ok(TestFunction::Poly(Polynomial::new(coeffs)))
            }
            "hermite-like" => {
                if args.len() != 2 {
                    return Err(Error::Parse("hermite-like takes two parameters".into()));
                }
                let n = args[0]
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("expected an order, got '{}'", args[0])))?;
                let sigma = float(args[1])?;
                if !(sigma > 0.0) {
                    return Err(Error::Parse("hermite-like rate must be positive".into()));
                }
                Ok(Self::hermite_like(n, sigma))
            }
            other => Err(Error::Parse(format!("unknown catalog function '{other}'"))),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            TestFunction::GaussHermite { poly, sigma } => {
                poly.eval(x) * (-x * x / (2.0 * sigma * sigma)).exp()
            }
            TestFunction::Bump {
                numer,
                denom_pow,
                radius,
            } => {
                let t = radius * radius - x * x;
                if t <= 0.0 {
                    return 0.0;
                }
                numer.eval(x) * bump_exp(*radius, *denom_pow, t)
            }
            TestFunction::Poly(p) => p.eval(x),
        }
    }

    /// Classical derivative, in closed form for every family.
    pub fn derivative_at(&self, x: f64) -> f64 {
        match self {
            TestFunction::GaussHermite { poly, sigma } => {
                let s2 = sigma * sigma;
                (poly.derivative().eval(x) - x * poly.eval(x) / s2)
                    * (-x * x / (2.0 * s2)).exp()
            }
            TestFunction::Bump {
                numer,
                denom_pow,
                radius,
            } => {
                let t = radius * radius - x * x;
                if t <= 0.0 {
                    return 0.0;
                }
                let d = f64::from(*denom_pow);
                // (N' t^2 + 2x N (d t - R^2)) exp(...) / t^{d+2}, fused.
                let m = numer.derivative().eval(x) * t * t
                    + 2.0 * x * numer.eval(x) * (d * t - radius * radius);
                m * bump_exp(*radius, denom_pow + 2, t)
            }
            TestFunction::Poly(p) => p.derivative().eval(x),
        }
    }

    /// The operator applied once, staying inside the family.
    pub fn dunkl_derivative(&self, param: &DunklParameter) -> Self {
        let refl = param.reflection_coeff();
        match self {
            TestFunction::GaussHermite { poly, sigma } => {
                let mut next = poly.derivative();
                next.add_scaled(&shift_up(poly), -1.0 / (sigma * sigma));
                next.add_scaled(&poly.odd_part_div_x(), refl);
                TestFunction::GaussHermite {
                    poly: next,
                    sigma: *sigma,
                }
            }
            TestFunction::Bump {
                numer,
                denom_pow,
                radius,
            } => {
                let r2 = radius * radius;
                let t = Polynomial::new(vec![r2, 0.0, -1.0]);
                let t2 = t.mul(&t);
                let xn = shift_up(numer);
                let mut m = numer.derivative().mul(&t2);
                m.add_scaled(&xn.mul(&t), 2.0 * f64::from(*denom_pow));
                m.add_scaled(&xn, -2.0 * r2);
                m.add_scaled(&numer.odd_part_div_x().mul(&t2), refl);
                TestFunction::Bump {
                    numer: m,
                    denom_pow: denom_pow + 2,
                    radius: *radius,
                }
            }
            TestFunction::Poly(p) => TestFunction::Poly(p.dunkl(param)),
        }
    }

    /// The operator applied `k` times; `k = 0` is the identity.
    pub fn dunkl_power_fn(&self, param: &DunklParameter, k: usize) -> Self {
        let mut out = self.clone();
        for _ in 0..k {
            out = out.dunkl_derivative(param);
        }
        out
    }

    pub fn decay(&self) -> Decay {
        match self {
            TestFunction::GaussHermite { sigma, .. } => Decay::GaussianRate { sigma: *sigma },
            TestFunction::Bump { radius, .. } => Decay::CompactSupport { radius: *radius },
            TestFunction::Poly(p) => Decay::PolynomialEnvelope { degree: p.degree() },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            TestFunction::GaussHermite { poly, .. } => poly.is_zero(),
            TestFunction::Bump { numer, .. } => numer.is_zero(),
            TestFunction::Poly(p) => p.is_zero(),
        }
    }

    /// Pointwise sum, when both halves live in the same family with the same
    /// shape parameters.
    pub fn try_add(&self, other: &Self) -> Option<Self> {
        match (self, other) {
            (
                TestFunction::GaussHermite { poly: a, sigma: s1 },
                TestFunction::GaussHermite { poly: b, sigma: s2 },
            ) if s1 == s2 => Some(TestFunction::GaussHermite {
                poly: a.add(b),
                sigma: *s1,
            }),
            (
                TestFunction::Bump {
                    numer: a,
                    denom_pow: d1,
                    radius: r1,
                },
                TestFunction::Bump {
                    numer: b,
                    denom_pow: d2,
                    radius: r2,
                },
            ) if d1 == d2 && r1 == r2 => Some(TestFunction::Bump {
                numer: a.add(b),
                denom_pow: *d1,
                radius: *r1,
            }),
            (TestFunction::Poly(a), TestFunction::Poly(b)) => {
                Some(TestFunction::Poly(a.add(b)))
            }
            _ => None,
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        match self {
            TestFunction::GaussHermite { poly, sigma } => TestFunction::GaussHermite {
                poly: poly.scale(c),
                sigma: *sigma,
            },
            TestFunction::Bump {
                numer,
                denom_pow,
                radius,
            } => TestFunction::Bump {
                numer: numer.scale(c),
                denom_pow: *denom_pow,
                radius: *radius,
            },
            TestFunction::Poly(p) => TestFunction::Poly(p.scale(c)),
        }
    }
}

impl C1Function for TestFunction {
    fn value(&self, x: f64) -> f64 {
        TestFunction::value(self, x)
    }

    fn derivative(&self, x: f64) -> f64 {
        self.derivative_at(x)
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |c: &[f64]| {
            c.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            TestFunction::GaussHermite { poly, sigma } => {
                if poly.coeffs() == [1.0] {
                    write!(f, "gaussian({sigma})")
                } else {
                    write!(f, "poly-gauss([{}]; sigma={sigma})", join(poly.coeffs()))
                }
            }
            TestFunction::Bump {
                numer,
                denom_pow,
                radius,
            } => {
                if numer.coeffs() == [1.0] && *denom_pow == 0 {
                    write!(f, "bump({radius})")
                } else {
                    write!(
                        f,
                        "poly-bump([{}]; pow={denom_pow}; radius={radius})",
                        join(numer.coeffs())
                    )
                }
            }
            TestFunction::Poly(p) => write!(f, "poly({})", join(p.coeffs())),
        }
    }
}

/// `Lambda f(x) = f'(x) + (2 alpha + 1) (f(x) - f(-x)) / (2x)`; at `x = 0`
/// the analytic limit `(2 alpha + 2) f'(0)` replaces the 0/0 raw formula.
pub fn dunkl_apply(param: &DunklParameter, f: &dyn C1Function, x: f64) -> f64 {
    if x == 0.0 {
        return (2.0 * param.alpha() + 2.0) * f.derivative(0.0);
    }
    f.derivative(x) + param.reflection_coeff() * (f.value(x) - f.value(-x)) / (2.0 * x)
}

/// `Lambda^k f(x)` through the closed-form family derivatives.
pub fn dunkl_power(param: &DunklParameter, f: &TestFunction, k: usize, x: f64) -> f64 {
    f.dunkl_power_fn(param, k).value(x)
}

/// Central difference with one Richardson extrapolation step and the
/// standard cube-root-of-epsilon step size.
pub fn numeric_derivative(f: &dyn Fn(f64) -> f64, x: f64) -> Result<f64> {
    let h = f64::EPSILON.cbrt() * x.abs().max(1.0);
    numeric_derivative_with_step(f, x, h)
}

pub fn numeric_derivative_with_step(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> Result<f64> {
    if x + h == x || x - h == x {
        return Err(Error::StepUnderflow(h));
    }
    let coarse = (f(x + h) - f(x - h)) / (2.0 * h);
    let half = 0.5 * h;
    let fine = (f(x + half) - f(x - half)) / (2.0 * half);
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Adapter giving closures a numeric-fallback derivative.
pub struct NumericC1<F: Fn(f64) -> f64> {
    f: F,
}

impl<F: Fn(f64) -> f64> NumericC1<F> {
    pub fn new(f: F) -> Self {
        Self { f }
    }
}

impl<F: Fn(f64) -> f64> C1Function for NumericC1<F> {
    fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    fn derivative(&self, x: f64) -> f64 {
        // The default step is eps^(1/3) * max(1, |x|), which never rounds to
        // zero against a finite x.
        numeric_derivative(&self.f, x).expect("default step cannot underflow")
    }
}
