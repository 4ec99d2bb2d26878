//! Physical parameters, derived scales and potential evaluators.
//!
//! Natural units (ħ = c = 1) throughout. The particle sits in a uniform
//! field `-B0 ẑ` and a radial field `E = μ r³ r̂`, observed from a frame
//! rotating at `Ω` about `ẑ`. After separating `ψ = e^{ilφ + ikz} R(r)` the
//! radial problem is
//!
//! ```text
//! R'' + R'/r - l²/r² R - V_eff(r) R + β R = 0,
//! V_eff(r) = 2mωl r² + mωΩ r⁴ + m²ω² r⁶,   β = 2m(E - Ωl) - k².
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{QesError, Result};

/// Laboratory inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Bare particle mass.
    pub mbar: f64,
    /// Dielectric polarizability.
    pub alpha: f64,
    /// Charge-density scale of the radial field `E = μ r³`.
    pub mu: f64,
    /// Magnitude of the magnetic field (the field points along `-ẑ`).
    pub b0: f64,
    /// Rotation rate of the frame.
    pub omega_rot: f64,
    /// Axial wavenumber.
    pub k: f64,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.mbar > 0.0) {
            return Err(QesError::domain(format!("bare mass must be positive, got {}", self.mbar)));
        }
        if !(self.alpha > 0.0) {
            return Err(QesError::domain(format!("polarizability must be positive, got {}", self.alpha)));
        }
        if !(self.mu > 0.0) {
            return Err(QesError::domain(format!("charge-density scale must be positive, got {}", self.mu)));
        }
        if !(self.b0 >= 0.0) {
            return Err(QesError::domain(format!("magnetic field magnitude must be non-negative, got {}", self.b0)));
        }
        if !self.omega_rot.is_finite() || !self.k.is_finite() {
            return Err(QesError::domain("rotation rate and wavenumber must be finite"));
        }
        Ok(())
    }

    pub fn effective_mass(&self) -> Result<f64> {
        effective_mass(self.mbar, self.alpha, self.b0)
    }

    pub fn cyclotron_frequency(&self) -> Result<f64> {
        let m = self.effective_mass()?;
        cyclotron_frequency(self.alpha, self.mu, self.b0, m)
    }
}

/// How the physical `(Ω, m, ω, β)` are mapped onto the dimensionless
/// Heun parameters `(λ, β̄)` for the variable `x = √(mω/2) r²`.
///
/// `Nominal` uses `λ = (Ω/mω)·√(2/mω)` and `β̄ = β/√(2mω)`. Those values
/// give the standard closed forms but do not transform the radial
/// equation above into the Heun form; the finite-difference oracle does
/// not see its levels. `Consistent` uses `λ = Ω/√(2mω)` and
/// `β̄ = β/(2√(2mω))`, which is what substituting `x` into the radial
/// equation actually yields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapConvention {
    #[default]
    Nominal,
    Consistent,
}

impl MapConvention {
    pub fn name(self) -> &'static str {
        match self {
            MapConvention::Nominal => "nominal",
            MapConvention::Consistent => "consistent",
        }
    }

    /// Dimensionless `λ` for rotation `omega_rot` at `(m, ω)`.
    pub fn lambda(self, omega_rot: f64, m: f64, omega: f64) -> f64 {
        let mw = m * omega;
        match self {
            MapConvention::Nominal => (omega_rot / mw) * (2.0 / mw).sqrt(),
            MapConvention::Consistent => omega_rot / (2.0 * mw).sqrt(),
        }
    }

    /// Factor `s` with `β = s·β̄`.
    pub fn beta_scale(self, m: f64, omega: f64) -> f64 {
        let q = (2.0 * m * omega).sqrt();
        match self {
            MapConvention::Nominal => q,
            MapConvention::Consistent => 2.0 * q,
        }
    }

    /// Inverse of [`MapConvention::lambda`] in `ω`: the cyclotron frequency
    /// at which rotation `omega_rot` produces `λ²/4 = lambda_sq_quarter`.
    pub fn omega_for_lambda_sq_quarter(self, lambda_sq_quarter: f64, omega_rot: f64, m: f64) -> f64 {
        let w2 = omega_rot * omega_rot;
        match self {
            // λ²/4 = Ω²/(2 m³ ω³)
            MapConvention::Nominal => (w2 / (2.0 * m.powi(3) * lambda_sq_quarter)).cbrt(),
            // λ²/4 = Ω²/(8 m ω)
            MapConvention::Consistent => w2 / (8.0 * m * lambda_sq_quarter),
        }
    }
}

impl std::fmt::Display for MapConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MapConvention {
    type Err = QesError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nominal" => Ok(MapConvention::Nominal),
            "consistent" => Ok(MapConvention::Consistent),
            other => Err(QesError::domain(format!("unknown map convention '{other}' (expected nominal|consistent)"))),
        }
    }
}

/// Scales derived from the physical inputs for one spectral parameter `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedScales {
    pub m: f64,
    pub omega: f64,
    pub lambda_dim: f64,
    pub beta: f64,
    pub betabar: f64,
}

impl DerivedScales {
    pub fn new(convention: MapConvention, m: f64, omega: f64, omega_rot: f64, beta: f64) -> Result<Self> {
        let (lambda_dim, betabar) = dimensionless_scales_with(convention, omega_rot, m, omega, beta)?;
        Ok(Self { m, omega, lambda_dim, beta, betabar })
    }

    pub fn x_of_r(&self, r: f64) -> f64 {
        (self.m * self.omega / 2.0).sqrt() * r * r
    }

    pub fn r_of_x(&self, x: f64) -> f64 {
        (x / (self.m * self.omega / 2.0).sqrt()).sqrt()
    }
}

/// Quantum numbers of a radial mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumNumbers {
    pub n: u32,
    pub l: i64,
    pub k: f64,
}

/// Coefficients of `ϖ r² + q r⁴ + η r⁶`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialCoeffs {
    pub varpi: f64,
    /// The `r⁴` coefficient. Unrelated to the dimensionless `λ`.
    pub quartic_coeff: f64,
    pub eta: f64,
}

impl PotentialCoeffs {
    pub fn new(varpi: f64, quartic_coeff: f64, eta: f64) -> Self {
        Self { varpi, quartic_coeff, eta }
    }

    /// Coefficients of the rotating-frame effective potential.
    pub fn rotating(m: f64, omega: f64, omega_rot: f64, l: i64) -> Self {
        Self { varpi: 2.0 * m * omega * l as f64, quartic_coeff: m * omega * omega_rot, eta: m * m * omega * omega }
    }

    pub fn eval(&self, r: f64) -> f64 {
        doubly_anharmonic(r, self)
    }

    /// Whether the highest non-vanishing power has a positive coefficient.
    pub fn is_confining(&self) -> bool {
        if self.eta != 0.0 {
            self.eta > 0.0
        } else if self.quartic_coeff != 0.0 {
            self.quartic_coeff > 0.0
        } else {
            self.varpi > 0.0
        }
    }
}

pub fn effective_mass(mbar: f64, alpha: f64, b0: f64) -> Result<f64> {
    if !(mbar > 0.0) {
        return Err(QesError::domain(format!("bare mass must be positive, got {mbar}")));
    }
    if !(alpha >= 0.0) {
        return Err(QesError::domain(format!("polarizability must be non-negative, got {alpha}")));
    }
    Ok(mbar + alpha * b0 * b0)
}

/// `ω = αμB₀/m`.
pub fn cyclotron_frequency(alpha: f64, mu: f64, b0: f64, m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(QesError::domain(format!("mass must be positive, got {m}")));
    }
    Ok(alpha * mu * b0 / m)
}

/// `(λ, β̄)` under the default convention.
pub fn dimensionless_scales(omega_rot: f64, m: f64, omega: f64, beta: f64) -> Result<(f64, f64)> {
    dimensionless_scales_with(MapConvention::Nominal, omega_rot, m, omega, beta)
}

pub fn dimensionless_scales_with(
    convention: MapConvention,
    omega_rot: f64,
    m: f64,
    omega: f64,
    beta: f64,
) -> Result<(f64, f64)> {
    if !(m > 0.0) {
        return Err(QesError::domain(format!("mass must be positive, got {m}")));
    }
    if !(omega > 0.0) {
        return Err(QesError::domain(format!(
            "cyclotron frequency must be positive for the dimensionless map, got {omega}"
        )));
    }
    let lambda = convention.lambda(omega_rot, m, omega);
    let betabar = beta / convention.beta_scale(m, omega);
    Ok((lambda, betabar))
}

pub fn x_of_r(r: f64, m: f64, omega: f64) -> Result<f64> {
    let mw = checked_mw(m, omega)?;
    Ok((mw / 2.0).sqrt() * r * r)
}

pub fn r_of_x(x: f64, m: f64, omega: f64) -> Result<f64> {
    let mw = checked_mw(m, omega)?;
    Ok((x / (mw / 2.0).sqrt()).sqrt())
}

fn checked_mw(m: f64, omega: f64) -> Result<f64> {
    let mw = m * omega;
    if !(mw > 0.0) {
        return Err(QesError::domain(format!("m·ω must be positive, got {mw}")));
    }
    Ok(mw)
}

/// `2mωl r² + mωΩ r⁴ + m²ω² r⁶`.
pub fn effective_potential(r: f64, m: f64, omega: f64, omega_rot: f64, l: i64) -> f64 {
    let r2 = r * r;
    let mw = m * omega;
    r2 * (2.0 * mw * l as f64 + r2 * (mw * omega_rot + r2 * mw * mw))
}

pub fn doubly_anharmonic(r: f64, coeffs: &PotentialCoeffs) -> f64 {
    let r2 = r * r;
    r2 * (coeffs.varpi + r2 * (coeffs.quartic_coeff + r2 * coeffs.eta))
}

/// `E = β/(2m) + Ωl + k²/(2m)`.
pub fn energy_from_beta(beta: f64, m: f64, omega_rot: f64, l: i64, k: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(QesError::domain(format!("mass must be positive, got {m}")));
    }
    Ok(beta / (2.0 * m) + omega_rot * l as f64 + k * k / (2.0 * m))
}

/// `β = 2m(E - Ωl) - k²`.
pub fn beta_from_energy(energy: f64, m: f64, omega_rot: f64, l: i64, k: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(QesError::domain(format!("mass must be positive, got {m}")));
    }
    Ok(2.0 * m * (energy - omega_rot * l as f64) - k * k)
}
