//! Modulus of smoothness, K-functional upper bounds, and Besov-type
//! seminorms built from the remainder machinery.
//!
//! The modulus is `w^k(x) = sup_{|y| <= x} ‖R_k(y,f)‖_{p,a}`, approximated
//! from a shared sample profile (dyadic log bands, the query points
//! themselves, and one refinement pass near the observed maximizer) and
//! made nondecreasing by construction through a prefix maximum.
//!
//! The K-functional upper bound at `x` is the best constructive split
//! available: the trivial bound `‖L^{k-1} f‖` against every anchored
//! decomposition `n0 + x * n1` from [`crate::remainder::k_decomposition`].

use serde::Serialize;

use crate::functions::TestFunction;
use crate::norms::lp_norm;
use crate::quadrature::QuadratureSpec;
use crate::remainder::{k_decomposition, remainder_norm};
use crate::special::DunklParameter;
use crate::translation::TranslationSpec;
use crate::{Error, Result};

/// Secondary integrability exponent of a Besov index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum QExponent {
    Finite(f64),
    Infinity,
}

/// Smoothness/integrability triple plus the remainder order `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BesovIndex {
    pub beta: f64,
    pub p: f64,
    pub q: QExponent,
    pub k: usize,
}

impl BesovIndex {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "smoothness exponent must lie in (0, 1), got {}",
                self.beta
            )));
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "primary exponent must satisfy 1 <= p < infinity, got {}",
                self.p
            )));
        }
        if let QExponent::Finite(q) = self.q {
            if !(q >= 1.0 && q.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "secondary exponent must satisfy q >= 1, got {q}"
                )));
            }
        }
        if self.k == 0 {
            return Err(Error::InvalidParameter(
                "remainder order k must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Sample-layout knobs for the modulus profile.
#[derive(Debug, Clone, Copy)]
pub struct ModulusSampling {
    /// Log-spaced samples per octave of the covered range.
    pub band_points: usize,
    /// Extra linear samples per gap between adjacent query points (only
    /// when the gap is wider than the band resolution).
    pub gap_points: usize,
    /// Samples added around the observed maximizer in the refinement pass.
    pub refine_points: usize,
    /// Octaves sampled below the smallest query point.
    pub extra_bands: usize,
}

impl Default for ModulusSampling {
    fn default() -> Self {
        Self {
            band_points: 16,
            gap_points: 8,
            refine_points: 4,
            extra_bands: 2,
        }
    }
}

/// Precomputed modulus samples: magnitudes, raw norms, and their prefix
/// maximum. Shared by the seminorm and the equivalence report so the
/// expensive remainder norms are paid once per `(f, k, p)`.
#[derive(Debug, Clone)]
pub struct ModulusProfile {
    ys: Vec<f64>,
    norms: Vec<f64>,
    prefix: Vec<f64>,
}

impl ModulusProfile {
    /// Largest sampled magnitude; queries beyond it saturate.
    pub fn cover_radius(&self) -> f64 {
        *self.ys.last().unwrap_or(&0.0)
    }

    /// Raw `(magnitude, ‖R_k‖)` samples in ascending magnitude order.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.ys.iter().zip(&self.norms).map(|(&y, &n)| (y, n))
    }

    /// `w^k(x)`: prefix maximum over all sampled magnitudes `<= x`.
    pub fn modulus_at(&self, x: f64) -> f64 {
        let bound = x * (1.0 + 1e-12);
        match self.ys.partition_point(|&y| y <= bound) {
            0 => 0.0,
            idx => self.prefix[idx - 1],
        }
    }
}

fn sup_norm_both_signs(
    param: &DunklParameter,
    f: &TestFunction,
    k: usize,
    y: f64,
    p: f64,
    tspec: &TranslationSpec,
    qspec: &QuadratureSpec,
) -> Result<f64> {
    let plus = remainder_norm(param, f, k, y, p, tspec, qspec)?.value;
    let minus = remainder_norm(param, f, k, -y, p, tspec, qspec)?.value;
    Ok(plus.max(minus))
}

/// Build the sample profile covering all `queries` (positive, any order).
pub fn modulus_profile(
    param: &DunklParameter,
    f: &TestFunction,
    k: usize,
    p: f64,
    queries: &[f64],
    sampling: &ModulusSampling,
    tspec: &TranslationSpec,
    qspec: &QuadratureSpec,
) -> Result<ModulusProfile> {
    if queries.is_empty() {
        return Err(Error::InvalidParameter(
            "modulus profile needs at least one query point".into(),
        ));
    }
    if queries.iter().any(|&q| !(q > 0.0) || !q.is_finite()) {
        return Err(Error::InvalidParameter(
            "modulus query points must be positive and finite".into(),
        ));
    }
    if sampling.band_points == 0 {
        return Err(Error::InvalidParameter(
            "band_points must be positive".into(),
        ));
    }
    let mut sorted = queries.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (x_min, x_max) = (sorted[0], *sorted.last().unwrap());

    let mut ys: Vec<f64> = Vec::new();
    // Global log grid from x_max down past x_min by the extra octaves.
    let octaves = (x_max / x_min).log2().ceil().max(0.0) as usize + sampling.extra_bands;
    let total = octaves * sampling.band_points;
    for i in 0..=total {
        ys.push(x_max * 2f64.powf(-(i as f64) / sampling.band_points as f64));
    }
    // The queries themselves: the supremum is often attained on the sphere
    // |y| = x, so every query must be an exact sample magnitude.
    ys.extend_from_slice(&sorted);
    // Linear fill of wide gaps between adjacent queries.
    let band_step = 2f64.powf(1.0 / sampling.band_points as f64);
    for pair in sorted.windows(2) {
        if pair[1] / pair[0] > band_step && sampling.gap_points > 0 {
            let step = (pair[1] - pair[0]) / (sampling.gap_points + 1) as f64;
            for j in 1..=sampling.gap_points {
                ys.push(pair[0] + step * j as f64);
            }
        }
    }
    ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ys.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());

    let mut norms = Vec::with_capacity(ys.len());
    for &y in &ys {
        norms.push(sup_norm_both_signs(param, f, k, y, p, tspec, qspec)?);
    }

    // One refinement pass around the raw maximizer.
    if sampling.refine_points > 0 && !norms.is_empty() {
        let arg = norms
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let lo = if arg == 0 { ys[0] * 0.5 } else { ys[arg - 1] };
        let hi = if arg + 1 == ys.len() {
            ys[arg]
        } else {
            ys[arg + 1]
        };
        let mut extra = Vec::new();
        for j in 1..=sampling.refine_points {
            let frac = j as f64 / (sampling.refine_points + 1) as f64;
            let y = lo * (hi / lo).powf(frac);
            if ys
                .iter()
                .all(|&existing| (existing - y).abs() > 1e-12 * y.abs())
            {
                extra.push((y, sup_norm_both_signs(param, f, k, y, p, tspec, qspec)?));
            }
        }
        for (y, n) in extra {
            let pos = ys.partition_point(|&existing| existing < y);
            ys.insert(pos, y);
            norms.insert(pos, n);
        }
    }

    let mut prefix = Vec::with_capacity(norms.len());
    let mut running: f64 = 0.0;
    for &n in &norms {
        running = running.max(n);
        prefix.push(running);
    }
    Ok(ModulusProfile { ys, norms, prefix })
}

/// Single-query modulus `w^k(x)`.
pub fn modulus(
    param: &DunklParameter,
    f: &TestFunction,
    k: usize,
    x: f64,
    p: f64,
    sampling: &ModulusSampling,
    tspec: &TranslationSpec,
    qspec: &QuadratureSpec,
) -> Result<f64> {
    let profile = modulus_profile(param, f, k, p, &[x], sampling, tspec, qspec)?;
    Ok(profile.modulus_at(x))
}

/// Which split produced a K-functional upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum KSource {
    /// `f = f + 0`: the trivial bound `‖L^{k-1} f‖`.
    Trivial,
    /// Anchored decomposition `n0 + x * n1` built at this anchor.
    Anchor(f64),
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct KUpperBound {
    pub value: f64,
    pub source: KSource,
}

fn best_upper(trivial: f64, x: f64, anchors: &[(f64, (f64, f64))]) -> KUpperBound {
    let mut best = KUpperBound {
        value: trivial,
        source: KSource::Trivial,
    };
    for &(anchor, (n0, n1)) in anchors {
        let candidate = n0 + x * n1;
        if candidate < best.value {
            best = KUpperBound {
                value: candidate,
                source: KSource::Anchor(anchor),
            };
        }
    }
    best
}

/// K-functional upper bound at a single point, sweeping the matched anchor
/// and its dyadic neighbors against the trivial split.
pub fn k_functional_upper(
    param: &DunklParameter,
    f: &TestFunction,
    k: usize,
    x: f64,
    p: f64,
    tspec: &TranslationSpec,
    qspec: &QuadratureSpec,
) -> Result<KUpperBound> {
    if !(x > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "K-functional argument must be positive, got {x}"
        )));
    }
    let lower = f.dunkl_power_fn(param, k - 1);
    let trivial = if lower.is_zero() {
        0.0
    } else {
        lp_norm(param, &lower, p, qspec)?.value
    };
    let mut anchors = Vec::new();
    for &anchor in &[0.5 * x, x, 2.0 * x] {
        anchors.push((
            anchor,
            k_decomposition(param, f, k, anchor, p, tspec, qspec)?,
        ));
    }
    Ok(best_upper(trivial, x, &anchors))
}

/// Window integral of the seminorm plus the modeled tails.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SeminormReport {
    /// Full seminorm including both tail models, `(truncated + small_tail
    /// + large_tail)^{1/q}` for finite `q`.
    pub value: f64,
    /// q-th power of the windowed part (the supremum itself when q is
    /// infinite).
    pub truncated: f64,
    /// Closed-form `x -> 0` tail assuming `w(x) ~ w(x_min) (x/x_min)^k`.
    pub small_tail: f64,
    /// Closed-form `x -> inf` tail assuming `w(x) ~ w(x_max)
    /// (x/x_max)^{k-1}`.
    pub large_tail: f64,
}

/// Seminorm from a prebuilt profile; the profile must cover `window.1`.
pub fn besov_seminorm_with(
    profile: &ModulusProfile,
    index: &BesovIndex,
    window: (f64, f64),
    samples_per_decade: usize,
) -> Result<SeminormReport> {
    index.validate()?;
    let (x_min, x_max) = window;
    if !(x_min > 0.0 && x_max > x_min && x_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "seminorm window must satisfy 0 < x_min < x_max, got ({x_min}, {x_max})"
        )));
    }
    if x_max > profile.cover_radius() * (1.0 + 1e-9) {
        return Err(Error::InvalidParameter(format!(
            "profile covers |y| <= {}, window extends to {x_max}",
            profile.cover_radius()
        )));
    }
    if samples_per_decade == 0 {
        return Err(Error::InvalidParameter(
            "samples_per_decade must be positive".into(),
        ));
    }
    let decades = (x_max / x_min).log10();
    let n = ((decades * samples_per_decade as f64).ceil() as usize).max(2);
    let kk = index.k as f64;
    let integrand = |x: f64| profile.modulus_at(x) / x.powf(index.beta + kk - 1.0);

    match index.q {
        QExponent::Infinity => {
            let mut sup: f64 = 0.0;
            for i in 0..=n {
                let x = x_min * (x_max / x_min).powf(i as f64 / n as f64);
                sup = sup.max(integrand(x));
            }
            Ok(SeminormReport {
                value: sup,
                truncated: sup,
                small_tail: 0.0,
                large_tail: 0.0,
            })
        }
        QExponent::Finite(q) => {
            // Trapezoid in s = ln x of integrand^q.
            let step = (x_max / x_min).ln() / n as f64;
            let mut acc = 0.0;
            let mut prev = integrand(x_min).powf(q);
            for i in 1..=n {
                let x = x_min * (x_max / x_min).powf(i as f64 / n as f64);
                let cur = integrand(x).powf(q);
                acc += 0.5 * (prev + cur) * step;
                prev = cur;
            }
            // Tail models: w(x) ~ C_s x^k below the window gives
            // integrand^q = (C_s x^{1-beta})^q with a convergent integral;
            // w(x) ~ C_l x^{k-1} above gives (C_l x^{-beta})^q.
            let c_small = profile.modulus_at(x_min) / x_min.powf(kk);
            let small_exp = (1.0 - index.beta) * q;
            let small_tail = c_small.powf(q) * x_min.powf(small_exp) / small_exp;
            let c_large = profile.modulus_at(x_max) / x_max.powf(kk - 1.0);
            let large_exp = index.beta * q;
            let large_tail = c_large.powf(q) * x_max.powf(-large_exp) / large_exp;
            let total = acc + small_tail + large_tail;
            Ok(SeminormReport {
                value: total.powf(1.0 / q),
                truncated: acc,
                small_tail,
                large_tail,
            })
        }
    }
}

/// Besov-type seminorm over `window`, building its own modulus profile.
pub fn besov_seminorm(
    param: &DunklParameter,
    f: &TestFunction,
    index: &BesovIndex,
    window: (f64, f64),
    samples_per_decade: usize,
    sampling: &ModulusSampling,
    tspec: &TranslationSpec,
    qspec: &QuadratureSpec,
) -> Result<SeminormReport> {
    index.validate()?;
    let decades = (window.1 / window.0).log10();
    let n = ((decades * samples_per_decade as f64).ceil() as usize).max(2);
    let mut queries = Vec::with_capacity(n + 1);
    for i in 0..=n {
        queries.push(window.0 * (window.1 / window.0).powf(i as f64 / n as f64));
    }
    let profile = modulus_profile(
        param, f, index.k, index.p, &queries, sampling, tspec, qspec,
    )?;
    besov_seminorm_with(&profile, index, window, samples_per_decade)
}

/// Pointwise comparison of the modulus against `x^{k-1} K_upper(x)`.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub x_grid: Vec<f64>,
    pub omega: Vec<f64>,
    pub k_upper: Vec<f64>,
    /// `omega / (x^{k-1} k_upper)` where both are positive, 0 elsewhere.
    pub ratio: Vec<f64>,
    pub c_low: f64,
    pub c_high: f64,
    /// True when no grid point produced a usable ratio (e.g. the zero
    /// function or a polynomial annihilated by `L^k`).
    pub degenerate: bool,
    /// Admissible spread `c_high / c_low` the report was checked against.
    pub spread_limit: f64,
    pub spread_ok: bool,
}

/// Build the two-sided comparison over a positive grid. Anchors for the
/// K-functional sweep are the grid points themselves; each contributes an
/// affine upper bound `n0_j + x * n1_j` evaluated at every grid point.
pub fn equivalence_report(
    param: &DunklParameter,
    f: &TestFunction,
    index: &BesovIndex,
    x_grid: &[f64],
    spread_limit: f64,
    sampling: &ModulusSampling,
    tspec: &TranslationSpec,
    qspec: &QuadratureSpec,
) -> Result<EquivalenceReport> {
    index.validate()?;
    if x_grid.is_empty() {
        return Err(Error::InvalidParameter(
            "equivalence grid must be nonempty".into(),
        ));
    }
    if x_grid.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::InvalidParameter(
            "equivalence grid points must be positive and finite".into(),
        ));
    }
    if !(spread_limit >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "admissible spread must be at least 1, got {spread_limit}"
        )));
    }
    let k = index.k;
    if f.dunkl_power_fn(param, k).is_zero() {
        // R_k vanishes identically: the modulus is zero everywhere and no
        // ratio is defined, so the report is all zeros and flagged.
        let zeros = vec![0.0; x_grid.len()];
        return Ok(EquivalenceReport {
            x_grid: x_grid.to_vec(),
            omega: zeros.clone(),
            k_upper: zeros.clone(),
            ratio: zeros,
            c_low: 0.0,
            c_high: 0.0,
            degenerate: true,
            spread_limit,
            spread_ok: false,
        });
    }

    let profile = modulus_profile(param, f, k, index.p, x_grid, sampling, tspec, qspec)?;
    let lower = f.dunkl_power_fn(param, k - 1);
    let trivial = if lower.is_zero() {
        0.0
    } else {
        lp_norm(param, &lower, index.p, qspec)?.value
    };
    let mut anchors = Vec::with_capacity(x_grid.len());
    for &anchor in x_grid {
        anchors.push((
            anchor,
            k_decomposition(param, f, k, anchor, index.p, tspec, qspec)?,
        ));
    }

    let mut omega = Vec::with_capacity(x_grid.len());
    let mut k_upper = Vec::with_capacity(x_grid.len());
    let mut ratio = Vec::with_capacity(x_grid.len());
    let mut c_low = f64::INFINITY;
    let mut c_high: f64 = 0.0;
    for &x in x_grid {
        let w = profile.modulus_at(x);
        let upper = best_upper(trivial, x, &anchors).value;
        omega.push(w);
        k_upper.push(upper);
        if w > 0.0 && upper > 0.0 {
            let r = w / (x.powi(k as i32 - 1) * upper);
            ratio.push(r);
            c_low = c_low.min(r);
            c_high = c_high.max(r);
        } else {
            ratio.push(0.0);
        }
    }
    let degenerate = !c_high.is_finite() || c_high == 0.0;
    if degenerate {
        c_low = 0.0;
        c_high = 0.0;
    }
    let spread_ok = !degenerate && c_low > 0.0 && c_high / c_low <= spread_limit;
    Ok(EquivalenceReport {
        x_grid: x_grid.to_vec(),
        omega,
        k_upper,
        ratio,
        c_low,
        c_high,
        degenerate,
        spread_limit,
        spread_ok,
    })
}
