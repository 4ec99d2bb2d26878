//! Quantization of the terminating Heun series.
//!
//! A degree-`n` polynomial solution needs both
//!
//! 1. `λ²/4 - |l| - l - 2 = 2n`, which fixes the cyclotron frequency (and so
//!    the magnetic field) for a given rotation rate, and
//! 2. `f_{n+1}(β̄) = 0`, a degree-`n+1` polynomial equation for the spectral
//!    parameter.
//!
//! The first-degree closed forms live in [`closed_form`] and are only used as
//! cross-checks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QesError, Result};
use crate::exec::Execution;
use crate::heun::{first_weights, series_coefficients, step_weights, HeunParams};
use crate::model::{energy_from_beta, MapConvention};
use crate::poly::Polynomial;

/// Tolerance of the first termination condition.
pub const FREQUENCY_CONDITION_TOL: f64 = 1e-10;

/// Label of a root of the termination polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// Smaller root of the `n = 1` quadratic.
    Minus,
    /// Larger root of the `n = 1` quadratic.
    Plus,
    /// Index in ascending order, for `n ≠ 1`.
    Root(usize),
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Branch::Minus => f.write_str("-"),
            Branch::Plus => f.write_str("+"),
            Branch::Root(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizedLevel {
    pub n: u32,
    pub l: i64,
    pub k: f64,
    pub omega_nl: f64,
    pub b0_nl: f64,
    pub lambda_dim: f64,
    pub betabar_root: f64,
    pub beta_root: f64,
    /// Position of the root in ascending order.
    pub root_index: usize,
    pub branch: Branch,
    /// Positive real zeros of the Heun polynomial.
    pub nodes: usize,
    pub energy: f64,
    /// `f₀ … f_n` of the Heun polynomial.
    pub heun_coeffs: Vec<f64>,
}

/// All levels of one `(n, l, k)` with any complex roots of the
/// termination polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSet {
    pub n: u32,
    pub l: i64,
    pub k: f64,
    pub levels: Vec<QuantizedLevel>,
    /// Complex `β̄` roots, excluded as non-physical.
    pub complex_betabar: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quantizer {
    pub convention: MapConvention,
    /// Admit the constant (`n = 0`) solution.
    pub allow_ground_mode: bool,
}

impl Quantizer {
    pub fn new(convention: MapConvention) -> Self {
        Self { convention, allow_ground_mode: false }
    }

    pub fn with_ground_mode(mut self, allow: bool) -> Self {
        self.allow_ground_mode = allow;
        self
    }

    fn check_mode(&self, n: u32, omega_rot: f64) -> Result<()> {
        let min = if self.allow_ground_mode { 0 } else { 1 };
        if n < min {
            return Err(QesError::InvalidRadialMode { n, min });
        }
        if omega_rot == 0.0 {
            return Err(QesError::NoBoundStates { n });
        }
        if !(omega_rot > 0.0) {
            return Err(QesError::domain(format!("rotation rate must be positive, got {omega_rot}")));
        }
        Ok(())
    }

    /// Cyclotron frequency with `λ²/4 - |l| - l - 2 = 2n`.
    pub fn frequency_condition(&self, n: u32, l: i64, omega_rot: f64, m: f64) -> Result<f64> {
        self.check_mode(n, omega_rot)?;
        if !(m > 0.0) {
            return Err(QesError::domain(format!("mass must be positive, got {m}")));
        }
        let target = termination_target(n, l);
        let omega = self.convention.omega_for_lambda_sq_quarter(target, omega_rot, m);
        self.check_gap(n, l, omega, omega_rot, m)?;
        Ok(omega)
    }

    fn check_gap(&self, n: u32, l: i64, omega: f64, omega_rot: f64, m: f64) -> Result<f64> {
        if !(omega > 0.0) {
            return Err(QesError::domain(format!("cyclotron frequency must be positive, got {omega}")));
        }
        let lambda = self.convention.lambda(omega_rot, m, omega);
        let gap = HeunParams::new(l, lambda, 0.0).termination_gap();
        let expected = 2.0 * n as f64;
        if (gap - expected).abs() > FREQUENCY_CONDITION_TOL * (1.0 + expected) {
            return Err(QesError::Inconsistent { found: gap, expected });
        }
        Ok(lambda)
    }

    /// `B₀ = (m/αμ) ω_{n,l}`.
    pub fn magnetic_field_quantized(&self, n: u32, l: i64, omega_rot: f64, m: f64, alpha: f64, mu: f64) -> Result<f64> {
        let omega = self.frequency_condition(n, l, omega_rot, m)?;
        if !(alpha * mu > 0.0) {
            return Err(QesError::domain(format!("α·μ must be positive, got {}", alpha * mu)));
        }
        Ok(m / (alpha * mu) * omega)
    }

    /// `f_{n+1}` as a polynomial in `β̄`, propagated exactly through the
    /// recurrence.
    pub fn beta_polynomial(&self, n: u32, l: i64, omega_nl: f64, omega_rot: f64, m: f64) -> Result<Polynomial> {
        self.check_mode(n, omega_rot)?;
        let lambda = self.check_gap(n, l, omega_nl, omega_rot, m)?;
        Ok(termination_polynomial(lambda, l, n as usize + 1))
    }

    #[allow(clippy::too_many_arguments)]
    pub fn solve_levels(
        &self,
        n: u32,
        l: i64,
        k: f64,
        omega_rot: f64,
        m: f64,
        alpha: f64,
        mu: f64,
    ) -> Result<LevelSet> {
        let omega = self.frequency_condition(n, l, omega_rot, m)?;
        let b0 = self.magnetic_field_quantized(n, l, omega_rot, m, alpha, mu)?;
        let lambda = self.convention.lambda(omega_rot, m, omega);
        let poly = self.beta_polynomial(n, l, omega, omega_rot, m)?;
        let roots = poly.roots()?;
        if roots.real.is_empty() {
            return Err(QesError::NoRealRoots { complex: roots.complex });
        }
        let scale = self.convention.beta_scale(m, omega);
        let levels = roots
            .real
            .iter()
            .enumerate()
            .map(|(i, &bb)| {
                let heun = series_coefficients(&HeunParams::new(l, lambda, bb), n as usize);
                let nodes = node_count(&heun.f)?;
                let beta = scale * bb;
                Ok(QuantizedLevel {
                    n,
                    l,
                    k,
                    omega_nl: omega,
                    b0_nl: b0,
                    lambda_dim: lambda,
                    betabar_root: bb,
                    beta_root: beta,
                    root_index: i,
                    branch: branch_label(n, i, roots.real.len()),
                    nodes,
                    energy: energy_from_beta(beta, m, omega_rot, l, k)?,
                    heun_coeffs: heun.f,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LevelSet { n, l, k, levels, complex_betabar: roots.complex })
    }

    /// Solves every `(n, l, k)` combination; the result is ordered by
    /// `(n, l, k)` in input order regardless of `exec`.
    #[allow(clippy::too_many_arguments)]
    pub fn solve_sweep(
        &self,
        ns: &[u32],
        ls: &[i64],
        ks: &[f64],
        omega_rot: f64,
        m: f64,
        alpha: f64,
        mu: f64,
        exec: Execution,
    ) -> Result<Vec<LevelSet>> {
        let items: Vec<(u32, i64, f64)> =
            ns.iter().flat_map(|&n| ls.iter().flat_map(move |&l| ks.iter().map(move |&k| (n, l, k)))).collect();
        exec.map(&items, |&(n, l, k)| self.solve_levels(n, l, k, omega_rot, m, alpha, mu)).into_iter().collect()
    }
}

fn branch_label(n: u32, index: usize, count: usize) -> Branch {
    match (n, count, index) {
        (1, 2, 0) => Branch::Minus,
        (1, 2, 1) => Branch::Plus,
        _ => Branch::Root(index),
    }
}

/// `2n + |l| + l + 2`, the value `λ²/4` must take.
pub fn termination_target(n: u32, l: i64) -> f64 {
    2.0 * n as f64 + l.unsigned_abs() as f64 + l as f64 + 2.0
}

/// `f_order(β̄)` for fixed `λ`.
fn termination_polynomial(lambda: f64, l: i64, order: usize) -> Polynomial {
    let (c0, c1) = first_weights(lambda, l);
    let mut prev = Polynomial::constant(1.0);
    let mut cur = Polynomial::linear(c0, c1);
    if order == 0 {
        return prev;
    }
    for k in 0..order - 1 {
        let w = step_weights(lambda, l, k);
        let next = Polynomial::linear(w.a0, w.a1).mul(&cur).add(&prev.scale(-w.g)).scale(1.0 / w.den);
        prev = cur;
        cur = next;
    }
    cur
}

/// Distinct strictly positive real roots of `Σ f_k x^k`.
pub fn node_count(coeffs: &[f64]) -> Result<usize> {
    Polynomial::new(coeffs.to_vec()).count_positive_roots()
}

pub fn frequency_condition(n: u32, l: i64, omega_rot: f64, m: f64) -> Result<f64> {
    Quantizer::default().frequency_condition(n, l, omega_rot, m)
}

pub fn magnetic_field_quantized(n: u32, l: i64, omega_rot: f64, m: f64, alpha: f64, mu: f64) -> Result<f64> {
    Quantizer::default().magnetic_field_quantized(n, l, omega_rot, m, alpha, mu)
}

pub fn beta_polynomial(n: u32, l: i64, omega_nl: f64, omega_rot: f64, m: f64) -> Result<Polynomial> {
    Quantizer::default().beta_polynomial(n, l, omega_nl, omega_rot, m)
}

pub fn solve_levels(n: u32, l: i64, k: f64, omega_rot: f64, m: f64, alpha: f64, mu: f64) -> Result<LevelSet> {
    Quantizer::default().solve_levels(n, l, k, omega_rot, m, alpha, mu)
}

/// First-degree (`n = 1`) closed forms for each convention.
pub mod closed_form {
    use crate::model::MapConvention;

    /// `|l| + l + 4`.
    fn s(l: i64) -> f64 {
        l.unsigned_abs() as f64 + l as f64 + 4.0
    }

    pub fn omega_1l(conv: MapConvention, l: i64, omega_rot: f64, m: f64) -> f64 {
        match conv {
            MapConvention::Nominal => (omega_rot * omega_rot / (2.0 * m.powi(3) * s(l))).cbrt(),
            MapConvention::Consistent => omega_rot * omega_rot / (8.0 * m * s(l)),
        }
    }

    pub fn b0_1l(conv: MapConvention, l: i64, omega_rot: f64, m: f64, alpha: f64, mu: f64) -> f64 {
        m / (alpha * mu) * omega_1l(conv, l, omega_rot, m)
    }

    /// `(c1, c0)` of the monic quadratic `β² + c1 β + c0 = 0` at frequency `omega`.
    pub fn beta_quadratic(conv: MapConvention, l: i64, omega: f64, omega_rot: f64, m: f64) -> (f64, f64) {
        let al = l.unsigned_abs() as f64;
        match conv {
            MapConvention::Nominal => {
                let r = omega_rot / (m * omega);
                (-2.0 * r * (2.0 + al), r * r * (3.0 + al) * (1.0 + al) - 4.0 * m * omega * (1.0 + al))
            }
            MapConvention::Consistent => (
                -2.0 * omega_rot * (2.0 + al),
                omega_rot * omega_rot * (3.0 + al) * (1.0 + al) - 16.0 * m * omega * (1.0 + al),
            ),
        }
    }

    /// `(E₋, E₊)`.
    pub fn energies(conv: MapConvention, l: i64, k: f64, omega_rot: f64, m: f64) -> (f64, f64) {
        let al = l.unsigned_abs() as f64;
        let root = (1.0 + 2.0 * (1.0 + al) / s(l)).sqrt();
        let prefactor = match conv {
            MapConvention::Nominal => {
                omega_rot / (2.0 * m * m) * (2.0 * m.powi(3) * s(l) / (omega_rot * omega_rot)).cbrt()
            }
            MapConvention::Consistent => omega_rot / (2.0 * m),
        };
        let base = omega_rot * l as f64 + k * k / (2.0 * m);
        (base + prefactor * (2.0 + al - root), base + prefactor * (2.0 + al + root))
    }
}
