//! Frobenius series for the biconfluent Heun equation
//!
//! ```text
//! H'' + [(|l|+1)/x - λ - 2x] H' + [λ²/4 - |l| - l - 2 - (λ(1+|l|) - 2β̄)/(2x)] H = 0
//! ```
//!
//! expanded about the regular singular point `x = 0` as `H = Σ f_k x^k`
//! with `f₀ = 1`. The radial factor is `R = e^{-λx/2} e^{-x²/2} x^{|l|/2} H`.

use serde::{Deserialize, Serialize};

use crate::error::{QesError, Result};

/// Default truncation order of the series.
pub const DEFAULT_ORDER: usize = 64;
/// Relative size of the last retained terms for a series to count as converged.
pub const CONVERGENCE_TOL: f64 = 1e-15;
/// Relative coefficient size below which a coefficient counts as zero.
pub const POLYNOMIAL_TOL: f64 = 1e-12;

/// Parameters of `H_B(a, b, c, d; x)` together with the raw `(l, λ, β̄)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeunParams {
    pub l: i64,
    pub lambda_dim: f64,
    pub betabar: f64,
}

impl HeunParams {
    pub fn new(l: i64, lambda_dim: f64, betabar: f64) -> Self {
        Self { l, lambda_dim, betabar }
    }

    /// `a = |l|`.
    pub fn a(&self) -> u32 {
        self.l.unsigned_abs() as u32
    }

    /// `b = λ`.
    pub fn b(&self) -> f64 {
        self.lambda_dim
    }

    /// `c = λ²/4 - l`.
    pub fn c(&self) -> f64 {
        self.lambda_dim * self.lambda_dim / 4.0 - self.l as f64
    }

    /// `d = -2β̄`.
    pub fn d(&self) -> f64 {
        -2.0 * self.betabar
    }

    /// `λ²/4 - |l| - l - 2`; the series can terminate at degree `n` only
    /// when this equals `2n`.
    pub fn termination_gap(&self) -> f64 {
        self.lambda_dim * self.lambda_dim / 4.0 - self.a() as f64 - self.l as f64 - 2.0
    }
}

/// Weights of one recurrence step, shared with the symbolic propagation in
/// `quantize`:
///
/// ```text
/// f_{k+2} = ([a0 + a1·β̄] f_{k+1} - g f_k) / den
/// ```
#[derive(Debug, Clone, Copy)]
pub(crate) struct StepWeights {
    pub a0: f64,
    pub a1: f64,
    pub g: f64,
    pub den: f64,
}

pub(crate) fn step_weights(lambda: f64, l: i64, k: usize) -> StepWeights {
    let al = l.unsigned_abs() as f64;
    let kf = k as f64;
    StepWeights {
        a0: lambda * (2.0 * kf + al + 3.0),
        a1: -2.0,
        g: 2.0 * (lambda * lambda / 4.0 - al - l as f64 - 2.0 - 2.0 * kf),
        den: 2.0 * (kf + 2.0) * (kf + 2.0 + al),
    }
}

/// `f₁ = (c0 + c1·β̄) f₀`.
pub(crate) fn first_weights(lambda: f64, l: i64) -> (f64, f64) {
    (lambda / 2.0, -1.0 / (1.0 + l.unsigned_abs() as f64))
}

/// The Frobenius coefficients `f₀ … f_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesCoefficients {
    pub f: Vec<f64>,
    /// Generating parameters, when the sequence came from the recurrence.
    pub params: Option<HeunParams>,
}

impl SeriesCoefficients {
    /// An explicit polynomial, not tied to any recurrence.
    pub fn polynomial(f: Vec<f64>) -> Self {
        Self { f, params: None }
    }

    pub fn order(&self) -> usize {
        self.f.len() - 1
    }

    /// Coefficients to order `order`, extending through the recurrence if
    /// the parameters are known.
    fn extended(&self, order: usize) -> Vec<f64> {
        match &self.params {
            Some(p) if order > self.order() => series_coefficients(p, order).f,
            _ => self.f.clone(),
        }
    }
}

pub fn series_coefficients(params: &HeunParams, order: usize) -> SeriesCoefficients {
    let lambda = params.lambda_dim;
    let bb = params.betabar;
    let mut f = Vec::with_capacity(order + 1);
    f.push(1.0);
    if order >= 1 {
        let (c0, c1) = first_weights(lambda, params.l);
        f.push(c0 + c1 * bb);
    }
    for k in 0..order.saturating_sub(1) {
        let w = step_weights(lambda, params.l, k);
        let next = ((w.a0 + w.a1 * bb) * f[k + 1] - w.g * f[k]) / w.den;
        f.push(next);
    }
    SeriesCoefficients { f, params: Some(*params) }
}

/// How a series value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convergence {
    /// Terminating polynomial; the sum is exact.
    Exact,
    /// Last three retained terms are negligible.
    Converged,
    /// Truncation error may be significant; see the tail estimate.
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    /// `|f_N x^N|` for the last retained term.
    pub tail: f64,
    pub status: Convergence,
}

/// Degree of the terminating polynomial, if the sequence terminates.
///
/// With known parameters, degree `n` also requires `λ²/4 - |l| - l - 2 = 2n`
/// and the next two coefficients to be negligible; a rapidly decaying but
/// infinite series is therefore not mistaken for a polynomial.
pub fn polynomial_degree(coeffs: &SeriesCoefficients, tol: f64) -> Option<usize> {
    let max = coeffs.f.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if max == 0.0 {
        return None;
    }
    let last = coeffs.f.iter().rposition(|c| c.abs() > tol * max)?;
    match &coeffs.params {
        None => Some(last),
        Some(p) => {
            let gap = p.termination_gap();
            if (gap - 2.0 * last as f64).abs() > 1e-8 * (1.0 + gap.abs()) {
                return None;
            }
            let ext = coeffs.extended(last + 4);
            let max = ext.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            ext[last + 1..].iter().all(|c| c.abs() <= tol * max).then_some(last)
        }
    }
}

fn effective_terms(coeffs: &SeriesCoefficients) -> (&[f64], bool) {
    match polynomial_degree(coeffs, POLYNOMIAL_TOL) {
        Some(d) if coeffs.params.is_some() => (&coeffs.f[..=d.min(coeffs.order())], true),
        Some(_) => (&coeffs.f[..], true),
        None => (&coeffs.f[..], false),
    }
}

/// `H(x) = Σ f_k x^k`.
pub fn evaluate_h(coeffs: &SeriesCoefficients, x: f64) -> Result<SeriesValue> {
    if !(x >= 0.0) {
        return Err(QesError::domain(format!("series evaluated at negative x = {x}")));
    }
    if x == 0.0 {
        return Ok(SeriesValue { value: coeffs.f[0], tail: 0.0, status: Convergence::Exact });
    }
    let (terms, exact) = effective_terms(coeffs);
    let mut sum = 0.0;
    let mut pow = 1.0;
    let mut last_terms = [f64::INFINITY; 3];
    for (k, c) in terms.iter().enumerate() {
        let t = c * pow;
        sum += t;
        last_terms[k % 3] = t.abs();
        pow *= x;
    }
    let tail = last_terms[(terms.len() - 1) % 3];
    let status = if exact {
        Convergence::Exact
    } else if terms.len() >= 3 && last_terms.iter().all(|t| *t < CONVERGENCE_TOL * sum.abs()) {
        Convergence::Converged
    } else {
        Convergence::Truncated
    };
    Ok(SeriesValue { value: sum, tail, status })
}

/// `R(x) = e^{-λx/2} e^{-x²/2} x^{|l|/2} H(x)`.
pub fn evaluate_r(coeffs: &SeriesCoefficients, x: f64, lambda_dim: f64, l: i64) -> Result<SeriesValue> {
    let h = evaluate_h(coeffs, x)?;
    let prefactor = (-lambda_dim * x / 2.0 - x * x / 2.0).exp() * x.powf(l.unsigned_abs() as f64 / 2.0);
    Ok(SeriesValue { value: prefactor * h.value, tail: prefactor * h.tail, status: h.status })
}

/// `(H, H', H'')` from term-by-term differentiation.
fn series_with_derivatives(terms: &[f64], x: f64) -> (f64, f64, f64) {
    let (mut h, mut dh, mut d2h) = (0.0, 0.0, 0.0);
    for (k, c) in terms.iter().enumerate().rev() {
        let kf = k as f64;
        h = h * x + c;
        if k >= 1 {
            dh = dh * x + kf * c;
        }
        if k >= 2 {
            d2h = d2h * x + kf * (kf - 1.0) * c;
        }
    }
    (h, dh, d2h)
}

/// Largest absolute residual of the Heun equation over `x_grid`.
pub fn ode_residual(coeffs: &SeriesCoefficients, params: &HeunParams, x_grid: &[f64]) -> Result<f64> {
    if let Some(bad) = x_grid.iter().find(|x| !(**x > 0.0)) {
        return Err(QesError::domain(format!(
            "residual grid must be strictly positive (x = 0 is singular), got {bad}"
        )));
    }
    let (terms, _) = effective_terms(coeffs);
    let al = params.a() as f64;
    let lam = params.lambda_dim;
    let constant = params.termination_gap();
    let pole = (lam * (1.0 + al) - 2.0 * params.betabar) / 2.0;
    Ok(x_grid
        .iter()
        .map(|&x| {
            let (h, dh, d2h) = series_with_derivatives(terms, x);
            (d2h + ((al + 1.0) / x - lam - 2.0 * x) * dh + (constant - pole / x) * h).abs()
        })
        .fold(0.0, f64::max))
}
