//! Gaussian quadrature rules and adaptive panel integration.
//!
//! Rules are generated from the three-term recurrence of the orthonormal
//! polynomials for the target weight: nodes by bisection inside interlacing
//! brackets (each ladder step `n-1 -> n` brackets every root of degree `n`
//! between consecutive roots of degree `n-1`), weights by the Christoffel
//! formula `w_i = 1 / sum_{k<n} p_k(x_i)^2`. This covers Gauss-Legendre and
//! Gauss-Jacobi with one code path and no tabulated magic constants.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;

use crate::special::ln_gamma;
use crate::{Error, Result};

/// Nodes (ascending, inside `(-1, 1)`) and positive weights of an n-point rule.
///
/// For a Jacobi rule the weights integrate against `(1-u)^a (1+u)^b du`
/// on `[-1, 1]`; the weight function itself is *not* evaluated by the caller.
#[derive(Debug, Clone)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    /// Total mass `sum w_i` (equals the integral of the weight function).
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Recurrence coefficients of the monic orthogonal polynomials:
/// `pi_{k+1} = (x - center[k]) pi_k - norm_sq[k] pi_{k-1}`, with
/// `norm_sq[0]` equal to the weight's total mass.
struct Recurrence {
    center: Vec<f64>,
    norm_sq: Vec<f64>,
}

fn jacobi_recurrence(n: usize, a: f64, b: f64) -> Recurrence {
    let mut center = Vec::with_capacity(n + 1);
    let mut norm_sq = Vec::with_capacity(n + 1);
    let mass = (std::f64::consts::LN_2 * (a + b + 1.0) + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
        - ln_gamma(a + b + 2.0))
        .exp();
    norm_sq.push(mass);
    center.push((b - a) / (a + b + 2.0));
    for k in 1..=n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let c = if a == b {
            0.0
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        };
        center.push(c);
        let beta = if k == 1 {
            // The generic expression has a removable 0/0 at a + b = -1.
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b))
        } else {
            4.0 * kf * (kf + a) * (kf + b) * (kf + a + b) / (s * s * (s + 1.0) * (s - 1.0))
        };
        norm_sq.push(beta);
    }
    Recurrence { center, norm_sq }
}

/// Evaluates the orthonormal polynomials `p_0..p_n` at `x`; returns `p_n(x)`
/// and optionally accumulates `sum_{k<n} p_k(x)^2` into `christoffel`.
fn eval_orthonormal(rec: &Recurrence, n: usize, x: f64, christoffel: Option<&mut f64>) -> f64 {
    let mut prev = 0.0;
    let mut cur = 1.0 / rec.norm_sq[0].sqrt();
    let mut sum = cur * cur;
    for k in 0..n {
        let next = ((x - rec.center[k]) * cur - rec.norm_sq[k].sqrt() * prev)
            / rec.norm_sq[k + 1].sqrt();
        prev = cur;
        cur = next;
        if k + 1 < n {
            sum += cur * cur;
        }
    }
    if let Some(acc) = christoffel {
        *acc = sum;
    }
    cur
}

fn build_rule(n: usize, a: f64, b: f64) -> Result<QuadRule> {
    if n == 0 {
        return Err(Error::InvalidParameter("quadrature rule needs n >= 1".into()));
    }
    if !(a > -1.0) || !(b > -1.0) {
        return Err(Error::InvalidParameter(format!(
            "Jacobi exponents must exceed -1, got ({a}, {b})"
        )));
    }
    let rec = jacobi_recurrence(n, a, b);
    // Interlacing ladder: roots of degree m separate the roots of degree m+1.
    let mut roots = vec![rec.center[0]];
    for m in 2..=n {
        let mut brackets = Vec::with_capacity(m + 1);
        brackets.push(-1.0);
        brackets.extend_from_slice(&roots);
        brackets.push(1.0);
        let mut next = Vec::with_capacity(m);
        for cell in brackets.windows(2) {
            let (mut lo, mut hi) = (cell[0], cell[1]);
            let flo = eval_orthonormal(&rec, m, lo, None);
            for _ in 0..110 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fmid = eval_orthonormal(&rec, m, mid, None);
                if (fmid >= 0.0) == (flo >= 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            next.push(0.5 * (lo + hi));
        }
        roots = next;
    }
    let mut weights = Vec::with_capacity(n);
    for &r in &roots {
        let mut chris = 0.0;
        eval_orthonormal(&rec, n, r, Some(&mut chris));
        weights.push(1.0 / chris);
    }
    Ok(QuadRule {
        nodes: roots,
        weights,
    })
}

type RuleKey = (usize, u64, u64);
static RULE_CACHE: Lazy<Mutex<HashMap<RuleKey, Arc<QuadRule>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// n-point Gauss-Jacobi rule for the weight `(1-u)^a (1+u)^b` on `[-1, 1]`.
/// Rules are cached per `(n, a, b)`.
pub fn jacobi_rule(n: usize, a: f64, b: f64) -> Result<Arc<QuadRule>> {
    let key = (n, a.to_bits(), b.to_bits());
    if let Some(rule) = RULE_CACHE.lock().unwrap().get(&key) {
        return Ok(rule.clone());
    }
    let rule = Arc::new(build_rule(n, a, b)?);
    RULE_CACHE
        .lock()
        .unwrap()
        .entry(key)
        .or_insert_with(|| rule.clone());
    Ok(rule)
}

/// n-point Gauss-Legendre rule on `[-1, 1]`.
pub fn legendre_rule(n: usize) -> Arc<QuadRule> {
    jacobi_rule(n, 0.0, 0.0).expect("Legendre parameters are always valid")
}

/// Fixed Gauss-Legendre integration of `f` over `[lo, hi]`.
pub fn integrate_fixed(f: &mut dyn FnMut(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let rule = legendre_rule(n);
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut acc = NeumaierSum::new();
    for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
        acc.add(w * f(mid + half * u));
    }
    half * acc.value()
}

/// `int_0^delta g(x) x^pow dx` with the endpoint power handled exactly by a
/// Gauss-Jacobi rule (exponent `pow > -1`); `g` should be smooth on `[0, delta]`.
pub fn integrate_power_endpoint(
    g: &mut dyn FnMut(f64) -> f64,
    delta: f64,
    pow: f64,
    n: usize,
) -> Result<f64> {
    let rule = jacobi_rule(n, 0.0, pow)?;
    // x = delta (1+u)/2 maps the weight (1+u)^pow onto x^pow.
    let scale = (delta / 2.0).powf(pow + 1.0);
    let mut acc = NeumaierSum::new();
    for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
        acc.add(w * g(delta * (1.0 + u) / 2.0));
    }
    Ok(scale * acc.value())
}

/// Tolerances and budgets for the adaptive panel integrator, plus the
/// truncation policy that maps decay descriptors to finite radii.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    /// Nodes per panel (the error estimate doubles this); at least 4.
    pub panel_nodes: usize,
    /// Absolute tolerance for the whole integral.
    pub abs_tol: f64,
    /// Relative tolerance for the whole integral.
    pub rel_tol: f64,
    /// Maximum bisection depth per panel.
    pub max_depth: usize,
    /// Truncation radius for a gaussian factor: this many standard deviations.
    pub gaussian_sigmas: f64,
    /// Additive guard added to truncation radii to absorb weight growth.
    pub radius_guard: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            panel_nodes: 16,
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_depth: 12,
            gaussian_sigmas: 8.0,
            radius_guard: 1.0,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.panel_nodes < 4 {
            return Err(Error::InvalidParameter(format!(
                "panel_nodes must be at least 4, got {}",
                self.panel_nodes
            )));
        }
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter(
                "quadrature tolerances must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Value and certified-ish error estimate from the adaptive integrator.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

/// Adaptive Gauss-Legendre integration of `f` over `[lo, hi]`: each panel is
/// accepted when doubling the node count moves the result by less than the
/// panel's share of the tolerance, otherwise bisected up to `max_depth`.
pub fn integrate_adaptive(
    f: &mut dyn FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<Integral> {
    spec.validate()?;
    if !(lo < hi) {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
        });
    }
    let total_len = hi - lo;
    // First pass estimate for the relative-tolerance scale.
    let rough = integrate_fixed(f, lo, hi, 2 * spec.panel_nodes).abs();
    let tol = spec.abs_tol.max(spec.rel_tol * rough);
    let mut stack = vec![(lo, hi, 0usize)];
    let mut value = NeumaierSum::new();
    let mut error = 0.0f64;
    while let Some((a, b, depth)) = stack.pop() {
        let coarse = integrate_fixed(f, a, b, spec.panel_nodes);
        let fine = integrate_fixed(f, a, b, 2 * spec.panel_nodes);
        let err = (fine - coarse).abs();
        let share = tol * ((b - a) / total_len).max(f64::MIN_POSITIVE);
        if err <= share || depth >= spec.max_depth {
            value.add(fine);
            error += err;
        } else {
            let mid = 0.5 * (a + b);
            stack.push((a, mid, depth + 1));
            stack.push((mid, b, depth + 1));
        }
    }
    let achieved = error;
    let requested = spec.abs_tol.max(spec.rel_tol * value.value().abs());
    if achieved > requested.max(1e-300) * 4.0 {
        return Err(Error::QuadratureTolerance {
            requested,
            achieved,
        });
    }
    Ok(Integral {
        value: value.value(),
        error,
    })
}

/// Compensated (Neumaier) accumulator for dot products with cancellation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
