//! Dense univariate polynomials with exact operator actions.
//!
//! The reflection-differential operator maps polynomials to polynomials, so
//! this representation lets identity tests run without any quadrature noise:
//! on the monomial basis the operator sends `x^n` to `n x^{n-1}` for even `n`
//! and `(n + 2 alpha + 1) x^{n-1}` for odd `n`.

use crate::quadrature::NeumaierSum;
use crate::special::DunklParameter;

/// Polynomial `c_0 + c_1 x + ... + c_n x^n` (coefficients ascending).
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(degree: usize, coeff: f64) -> Self {
        let mut coeffs = vec![0.0; degree + 1];
        coeffs[degree] = coeff;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Horner evaluation with a compensated final reduction: the polynomial is
    /// split into even and odd parts summed separately, which keeps parity
    /// identities (reflection, odd-part extraction) bit-consistent.
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = NeumaierSum::new();
        let mut pw = 1.0;
        for &c in &self.coeffs {
            acc.add(c * pw);
            pw *= x;
        }
        acc.value()
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        Self::new(coeffs)
    }

    /// `p(-x)`.
    pub fn reflect(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { c } else { -c })
            .collect();
        Self::new(coeffs)
    }

    /// `(p(x) - p(-x)) / (2x)`: drops even coefficients and shifts odd ones
    /// down one degree. Always a polynomial, no division by x is performed.
    pub fn odd_part_div_x(&self) -> Self {
        let mut coeffs = vec![0.0; self.coeffs.len().saturating_sub(1).max(1)];
        for (k, &c) in self.coeffs.iter().enumerate() {
            if k % 2 == 1 {
                coeffs[k - 1] = c;
            }
        }
        Self::new(coeffs)
    }

    /// Action of the reflection-differential operator for parameter `alpha`:
    /// `p'(x) + (2 alpha + 1) (p(x) - p(-x)) / (2x)`.
    pub fn dunkl(&self, param: &DunklParameter) -> Self {
        let mut out = self.derivative();
        let odd = self.odd_part_div_x();
        out.add_scaled(&odd, param.reflection_coeff());
        out
    }

    pub fn add_scaled(&mut self, other: &Self, scale: f64) {
        if other.coeffs.len() > self.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), 0.0);
        }
        for (k, &c) in other.coeffs.iter().enumerate() {
            self.coeffs[k] += scale * c;
        }
        let trimmed = Self::new(std::mem::take(&mut self.coeffs));
        self.coeffs = trimmed.coeffs;
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, 1.0);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, -1.0);
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut coeffs = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::new(coeffs)
    }

    /// Largest absolute coefficient, a cheap conditioning scale for residuals.
    pub fn coeff_scale(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, &c| m.max(c.abs()))
    }
}
