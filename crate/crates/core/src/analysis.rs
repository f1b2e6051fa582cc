//! Data-side tooling: log-log slope regression, inflection detection,
//! power-law exponent fits, d ln/dt estimation, and nonlinear least-squares
//! fitting of the ion-yield curve.
//!
//! All fitting is done in log space; the data of interest span decades and the
//! published plots are log-log.

use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

/// An ordered data series with unit tags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    points: Vec<(f64, f64)>,
    pub x_unit: String,
    pub y_unit: String,
    pub label: String,
}

impl Series {
    /// Builds a series from points already sorted by strictly increasing x.
    pub fn new(
        points: Vec<(f64, f64)>,
        x_unit: impl Into<String>,
        y_unit: impl Into<String>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Domain(format!(
                "a series needs at least 2 points, got {}",
                points.len()
            )));
        }
        for (i, &(x, y)) in points.iter().enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::Domain(format!(
                    "non-finite point ({x}, {y}) at index {i}"
                )));
            }
        }
        for (i, w) in points.windows(2).enumerate() {
            if w[1].0 <= w[0].0 {
                return Err(Error::Domain(format!(
                    "x must be strictly increasing: x[{}] = {} >= x[{}] = {}",
                    i,
                    w[0].0,
                    i + 1,
                    w[1].0
                )));
            }
        }
        Ok(Series {
            points,
            x_unit: x_unit.into(),
            y_unit: y_unit.into(),
            label: label.into(),
        })
    }

    /// Builds a series from unsorted points, sorting by x and rejecting
    /// duplicate abscissas.
    pub fn from_unsorted(
        mut points: Vec<(f64, f64)>,
        x_unit: impl Into<String>,
        y_unit: impl Into<String>,
        label: impl Into<String>,
    ) -> Result<Self> {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (i, w) in points.windows(2).enumerate() {
            if w[1].0 == w[0].0 {
                return Err(Error::Domain(format!(
                    "duplicate x value {} at sorted index {}",
                    w[0].0,
                    i + 1
                )));
            }
        }
        Series::new(points, x_unit, y_unit, label)
    }

    pub fn from_xy(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Domain(format!(
                "x and y lengths differ: {} vs {}",
                xs.len(),
                ys.len()
            )));
        }
        Series::new(
            xs.iter().copied().zip(ys.iter().copied()).collect(),
            "",
            "",
            "",
        )
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn ys(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }
}

/// Result of a nonlinear or log-linear fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub parameter_names: Vec<String>,
    pub values: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub residual_norm: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl FitResult {
    /// JSON document with the wire schema: `params`, `stderr`,
    /// `residual_norm`, `converged`, `iterations`. Key order is stable
    /// (maps serialize sorted).
    pub fn to_json(&self) -> serde_json::Value {
        let params: serde_json::Map<String, serde_json::Value> = self
            .parameter_names
            .iter()
            .zip(&self.values)
            .map(|(n, v)| (n.clone(), serde_json::json!(v)))
            .collect();
        let stderr: serde_json::Map<String, serde_json::Value> = self
            .parameter_names
            .iter()
            .zip(&self.standard_errors)
            .map(|(n, v)| (n.clone(), serde_json::json!(v)))
            .collect();
        serde_json::json!({
            "params": params,
            "stderr": stderr,
            "residual_norm": self.residual_norm,
            "converged": self.converged,
            "iterations": self.iterations,
        })
    }
}

/// Slope/intercept/quality of an ordinary least-squares line on (ln x, ln y).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

fn positive_log_points(
    s: &Series,
    window: Option<(f64, f64)>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    let mut offending = Vec::new();
    for (i, &(x, y)) in s.points().iter().enumerate() {
        if let Some((lo, hi)) = window {
            if x < lo || x > hi {
                continue;
            }
        }
        if x <= 0.0 || y <= 0.0 {
            offending.push(i);
            continue;
        }
        lx.push(x.ln());
        ly.push(y.ln());
    }
    if !offending.is_empty() {
        let shown: Vec<String> = offending.iter().take(8).map(|i| i.to_string()).collect();
        return Err(Error::Domain(format!(
            "log-log analysis needs positive data; offending indices: {}{}",
            shown.join(", "),
            if offending.len() > 8 { ", ..." } else { "" }
        )));
    }
    Ok((lx, ly))
}

/// Ordinary least squares of ln y on ln x, optionally restricted to an
/// inclusive x window.
pub fn loglog_slope(s: &Series, window: Option<(f64, f64)>) -> Result<LogLogFit> {
    let (lx, ly) = positive_log_points(s, window)?;
    let n = lx.len();
    if n < 3 {
        return Err(Error::Domain(format!(
            "log-log regression needs at least 3 points in the window, got {n}"
        )));
    }
    let nf = n as f64;
    let mx = lx.iter().sum::<f64>() / nf;
    let my = ly.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for i in 0..n {
        let dx = lx[i] - mx;
        let dy = ly[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::Domain(
            "degenerate x-range: all abscissas equal".to_string(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LogLogFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Locates the knee of a log-log curve as the extremum of the discrete second
/// derivative of ln y versus ln x (three-point central differences on the
/// possibly non-uniform grid).
///
/// Returns `None` when the curvature is numerically zero everywhere (an exact
/// power law). Needs at least 7 positive points.
pub fn inflection_point(s: &Series) -> Result<Option<f64>> {
    if s.len() < 7 {
        return Err(Error::Domain(format!(
            "inflection detection needs at least 7 points, got {}",
            s.len()
        )));
    }
    let (lx, ly) = positive_log_points(s, None)?;
    if lx.len() < 7 {
        return Err(Error::Domain(format!(
            "inflection detection needs at least 7 positive points, got {}",
            lx.len()
        )));
    }
    let n = lx.len();
    let mut best_idx = 0usize;
    let mut best_mag = -1.0;
    for i in 1..n - 1 {
        let h1 = lx[i] - lx[i - 1];
        let h2 = lx[i + 1] - lx[i];
        let d2 = 2.0 * ((ly[i + 1] - ly[i]) / h2 - (ly[i] - ly[i - 1]) / h1) / (h1 + h2);
        if d2.abs() > best_mag {
            best_mag = d2.abs();
            best_idx = i;
        }
    }
    // Curvature indistinguishable from rounding noise means no knee.
    let ly_scale = ly.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if best_mag <= 1e-8 * (1.0 + ly_scale) {
        return Ok(None);
    }
    Ok(Some(lx[best_idx].exp()))
}

/// Discrete d ln y/dx: central differences at interior points, one-sided at
/// the ends. For a series (t, N_e(t)) this is the observable d ln N_e/dt.
pub fn log_derivative_time(s: &Series) -> Result<Series> {
    let pts = s.points();
    for (i, &(x, y)) in pts.iter().enumerate() {
        if x <= 0.0 || y <= 0.0 {
            return Err(Error::Domain(format!(
                "log derivative needs positive data, offending index {i}: ({x}, {y})"
            )));
        }
    }
    let n = pts.len();
    let ly: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let d = if i == 0 {
            (ly[1] - ly[0]) / (pts[1].0 - pts[0].0)
        } else if i == n - 1 {
            (ly[n - 1] - ly[n - 2]) / (pts[n - 1].0 - pts[n - 2].0)
        } else {
            (ly[i + 1] - ly[i - 1]) / (pts[i + 1].0 - pts[i - 1].0)
        };
        out.push((pts[i].0, d));
    }
    Series::new(out, s.x_unit.clone(), "", "d ln y / dx")
}

/// Fits y = A·x^k by least squares on (ln x, ln y) and reports the exponent
/// and amplitude with standard errors.
pub fn fit_power_law(s: &Series) -> Result<FitResult> {
    let (lx, ly) = positive_log_points(s, None)?;
    let n = lx.len();
    if n < 3 {
        return Err(Error::Domain(format!(
            "power-law fit needs at least 3 positive points, got {n}"
        )));
    }
    let fit = loglog_slope(s, None)?;
    let nf = n as f64;
    let mx = lx.iter().sum::<f64>() / nf;
    let sxx: f64 = lx.iter().map(|v| (v - mx) * (v - mx)).sum();
    let ss_res: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(&x, &y)| {
            let r = y - (fit.intercept + fit.slope * x);
            r * r
        })
        .sum();
    let dof = (n - 2).max(1) as f64;
    let sigma2 = ss_res / dof;
    let stderr_slope = (sigma2 / sxx).sqrt();
    let stderr_intercept = (sigma2 * (1.0 / nf + mx * mx / sxx)).sqrt();
    let amplitude = fit.intercept.exp();
    Ok(FitResult {
        parameter_names: vec!["amplitude".to_string(), "exponent".to_string()],
        values: vec![amplitude, fit.slope],
        // Delta method for the amplitude: stderr(A) = A·stderr(ln A).
        standard_errors: vec![amplitude * stderr_intercept, stderr_slope],
        residual_norm: ss_res.sqrt(),
        converged: true,
        iterations: 1,
    })
}

/// x/(e^x − 1), the logarithmic sensitivity of the yield-curve pulse factor.
fn planck_ratio(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else if x > 36.0 {
        x * (-x).exp()
    } else {
        x / x.exp_m1()
    }
}

/// ln of the yield-curve shape I·(1 − e^(−I_m/I)) at ln-parameters.
fn yield_log_model(ln_product: f64, ln_im: f64, intensity: f64) -> f64 {
    let x = ln_im.exp() / intensity;
    ln_product + intensity.ln() + (-(-x).exp_m1()).ln()
}

struct LmOutcome {
    ln_product: f64,
    ln_im: f64,
    cost: f64,
    iterations: usize,
    converged: bool,
}

/// Levenberg-Marquardt on θ = (ln A·N², ln I_m) against log-space residuals.
fn lm_yield_fit(lx: &[f64], ly: &[f64], theta0: [f64; 2]) -> LmOutcome {
    let n = lx.len();
    let residuals = |p: f64, im: f64| -> Vec<f64> {
        (0..n)
            .map(|i| yield_log_model(p, im, lx[i].exp()) - ly[i])
            .collect()
    };
    let cost_of = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();

    let (mut p, mut im) = (theta0[0], theta0[1]);
    let mut r = residuals(p, im);
    let mut cost = cost_of(&r);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < 200 {
        iterations += 1;
        // Analytic Jacobian: ∂r/∂lnP = 1, ∂r/∂lnIm = x/(e^x − 1).
        let mut a = 0.0; // J1·J1
        let mut b = 0.0; // J1·J2
        let mut c = 0.0; // J2·J2
        let mut g1 = 0.0; // J1·r
        let mut g2 = 0.0; // J2·r
        for i in 0..n {
            let x = im.exp() / lx[i].exp();
            let j2 = planck_ratio(x);
            a += 1.0;
            b += j2;
            c += j2 * j2;
            g1 += r[i];
            g2 += j2 * r[i];
        }

        let mut accepted = false;
        for _ in 0..25 {
            let ad = a * (1.0 + lambda);
            let cd = c * (1.0 + lambda);
            let det = ad * cd - b * b;
            if det.abs() < 1e-300 {
                break;
            }
            let dp = (-g1 * cd + g2 * b) / det;
            let dim = (-g2 * ad + g1 * b) / det;
            let dp = dp.clamp(-5.0, 5.0);
            let dim = dim.clamp(-5.0, 5.0);
            let trial_r = residuals(p + dp, im + dim);
            let trial_cost = cost_of(&trial_r);
            if trial_cost.is_finite() && trial_cost < cost {
                let step = dp.abs().max(dim.abs());
                let improvement = (cost - trial_cost) / cost.max(1e-300);
                p += dp;
                im += dim;
                r = trial_r;
                cost = trial_cost;
                lambda = (lambda * 0.3).max(1e-12);
                accepted = true;
                if step < 1e-12 || improvement < 1e-14 {
                    converged = true;
                }
                break;
            }
            lambda *= 3.0;
        }
        if !accepted {
            // No downhill step at any damping: stationary point.
            converged = true;
        }
        if converged {
            break;
        }
    }
    LmOutcome {
        ln_product: p,
        ln_im: im,
        cost,
        iterations,
        converged,
    }
}

/// Fits the ion-yield curve y = (A·N²)·I·(1 − e^(−I_m/I)) to a series of
/// (I, N_i) points by log-space Levenberg-Marquardt with multi-start
/// initialization (3×3 grid around data-driven seeds).
///
/// A and N enter only through the product A·N², reported as `a_n2`. Supplying
/// `known_n` additionally separates out `a` = A·N²/N².
pub fn fit_ion_yield(s: &Series, known_n: Option<f64>) -> Result<FitResult> {
    if s.len() < 8 {
        return Err(Error::Domain(format!(
            "ion-yield fit needs at least 8 points, got {}",
            s.len()
        )));
    }
    let (lx, ly) = positive_log_points(s, None)?;
    let span = (lx[lx.len() - 1] - lx[0]) / std::f64::consts::LN_10;
    if span < 1.5 {
        return Err(Error::Domain(format!(
            "ion-yield fit needs data spanning at least 1.5 decades in I, got {span:.2}"
        )));
    }
    if let Some(n) = known_n {
        if !(n > 0.0) {
            return Err(Error::Domain(format!(
                "known photon count must be positive, got {n}"
            )));
        }
    }

    // Seed I_m at the detected knee, falling back to the grid centre.
    let im_seed = match inflection_point(s)? {
        Some(x) => x,
        None => ((lx[0] + lx[lx.len() - 1]) / 2.0).exp(),
    };
    // Seed the product from the lowest decade, where the curve is ~P·I.
    let low_cut = lx[0] + std::f64::consts::LN_10;
    let mut acc = 0.0;
    let mut count = 0usize;
    for i in 0..lx.len() {
        if lx[i] <= low_cut {
            acc += ly[i] - lx[i];
            count += 1;
        }
    }
    let product_seed = acc / count as f64;

    let mut best: Option<LmOutcome> = None;
    for &fp in &[0.3f64, 1.0, 3.0] {
        for &fm in &[0.3f64, 1.0, 3.0] {
            let outcome = lm_yield_fit(
                &lx,
                &ly,
                [product_seed + fp.ln(), im_seed.ln() + fm.ln()],
            );
            let better = match &best {
                None => true,
                Some(b) => {
                    (outcome.converged && !b.converged)
                        || (outcome.converged == b.converged && outcome.cost < b.cost)
                }
            };
            if better {
                best = Some(outcome);
            }
        }
    }
    let best = best.expect("at least one start evaluated");

    // Covariance from the undamped normal matrix at the optimum.
    let n = lx.len();
    let product = best.ln_product.exp();
    let im = best.ln_im.exp();
    let (mut a, mut b2, mut c) = (0.0f64, 0.0f64, 0.0f64);
    for &lxi in lx.iter() {
        let j2 = planck_ratio(im / lxi.exp());
        a += 1.0;
        b2 += j2;
        c += j2 * j2;
    }
    let dof = (n - 2).max(1) as f64;
    let sigma2 = best.cost / dof;
    let det = a * c - b2 * b2;
    let (se_ln_p, se_ln_im) = if det > 0.0 {
        ((sigma2 * c / det).sqrt(), (sigma2 * a / det).sqrt())
    } else {
        (f64::NAN, f64::NAN)
    };

    let mut names = vec!["a_n2".to_string(), "i_m".to_string()];
    let mut values = vec![product, im];
    let mut errors = vec![product * se_ln_p, im * se_ln_im];
    if let Some(n_known) = known_n {
        names.push("a".to_string());
        values.push(product / (n_known * n_known));
        errors.push(product * se_ln_p / (n_known * n_known));
    }
    Ok(FitResult {
        parameter_names: names,
        values,
        standard_errors: errors,
        residual_norm: best.cost.sqrt(),
        converged: best.converged,
        iterations: best.iterations,
    })
}

/// Applies multiplicative log-normal noise y ← y·exp(σ·z), z ~ N(0, 1), with
/// an explicit seed. The stream is ChaCha8, so identical seeds give identical
/// series on every platform.
pub fn apply_lognormal_noise(s: &Series, sigma: f64, seed: u64) -> Result<Series> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::Domain(format!(
            "noise sigma must be nonnegative, got {sigma}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let points = s
        .points()
        .iter()
        .map(|&(x, y)| {
            let z: f64 = normal.sample(&mut rng);
            (x, y * (sigma * z).exp())
        })
        .collect();
    Series::new(points, s.x_unit.clone(), s.y_unit.clone(), s.label.clone())
}
