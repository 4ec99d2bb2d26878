//! Dense real polynomials in ascending-power storage.
//!
//! Root finding goes through the companion matrix and then Newton with a
//! bisection fallback on each real candidate. Positive-root counting uses a
//! Sturm chain, which never looks at the companion eigenvalues.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QesError, Result};

/// `Σ c_k x^k`, `coeffs[k] = c_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

/// Roots split by realness. Real roots are sorted ascending and refined.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub real: Vec<f64>,
    pub complex: Vec<Complex64>,
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

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `a + b x`.
    pub fn linear(a: f64, b: f64) -> Self {
        Self::new(vec![a, b])
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

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(0.0);
        }
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Self, i: usize| p.coeffs.get(i).copied().unwrap_or(0.0);
        Self::new((0..len).map(|i| get(self, i) + get(other, i)).collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Monic version (leading coefficient 1).
    pub fn monic(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(QesError::DegeneratePolynomial);
        }
        Ok(self.scale(1.0 / self.leading()))
    }

    /// Drops leading coefficients below `rel_tol · max|c|`.
    fn trimmed(&self, rel_tol: f64) -> Self {
        let max = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let mut coeffs = self.coeffs.clone();
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.abs() <= rel_tol * max) {
            coeffs.pop();
        }
        Self::new(coeffs)
    }

    fn normalized(&self) -> Self {
        let max = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if max == 0.0 {
            self.clone()
        } else {
            self.scale(1.0 / max)
        }
    }

    /// Remainder of `self / divisor`.
    fn rem(&self, divisor: &Self) -> Self {
        let mut r = self.coeffs.clone();
        let d = &divisor.coeffs;
        let dl = divisor.leading();
        while r.len() >= d.len() && r.len() > 1 {
            let q = r.last().unwrap() / dl;
            let shift = r.len() - d.len();
            for (i, &dc) in d.iter().enumerate() {
                r[shift + i] -= q * dc;
            }
            r.pop();
        }
        Self::new(r)
    }

    /// All roots: companion eigenvalues, with real candidates polished.
    pub fn roots(&self) -> Result<RootSet> {
        let p = self.trimmed(0.0);
        if p.is_zero() {
            return Err(QesError::DegeneratePolynomial);
        }
        let deg = p.degree();
        if deg == 0 {
            return Ok(RootSet { real: vec![], complex: vec![] });
        }
        let monic = p.monic()?;
        let c = monic.coeffs();
        let mut companion = DMatrix::<f64>::zeros(deg, deg);
        for i in 1..deg {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..deg {
            companion[(i, deg - 1)] = -c[i];
        }
        let eig = companion.complex_eigenvalues();

        let mut real = Vec::new();
        let mut complex = Vec::new();
        for z in eig.iter() {
            let scale = 1.0 + z.norm();
            if z.im.abs() <= 1e-7 * scale {
                match monic.polish_real(z.re) {
                    Some(x) => real.push(x),
                    None => complex.push(*z),
                }
            } else {
                complex.push(*z);
            }
        }
        real.sort_by(|a, b| a.partial_cmp(b).unwrap());
        complex.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        Ok(RootSet { real, complex })
    }

    /// Newton from `x0`, falling back to bisection on a sign-change bracket.
    fn polish_real(&self, x0: f64) -> Option<f64> {
        let dp = self.derivative();
        let mut x = x0;
        for _ in 0..100 {
            let f = self.eval(x);
            let df = dp.eval(x);
            if f == 0.0 {
                return Some(x);
            }
            if df == 0.0 {
                break;
            }
            let step = f / df;
            x -= step;
            if step.abs() <= 1e-15 * x.abs().max(1e-300) {
                break;
            }
        }
        if !x.is_finite() || (x - x0).abs() > 1e-3 * (1.0 + x0.abs()) {
            let h = 1e-6 * (1.0 + x0.abs());
            let (mut a, mut b) = (x0 - h, x0 + h);
            let (mut fa, fb) = (self.eval(a), self.eval(b));
            if fa.signum() == fb.signum() {
                return self.near_zero(x0).then_some(x0);
            }
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                let fm = self.eval(mid);
                if fm.signum() == fa.signum() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
                if b - a <= 2.0 * f64::EPSILON * mid.abs().max(1e-300) {
                    break;
                }
            }
            x = 0.5 * (a + b);
        }
        self.near_zero(x).then_some(x)
    }

    /// `|p(x)|` small relative to the term magnitudes at `x`.
    fn near_zero(&self, x: f64) -> bool {
        let mag = self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x.abs() + c.abs());
        self.eval(x).abs() <= 1e-9 * mag
    }

    /// Number of distinct real roots in `(0, ∞)` by a Sturm chain.
    pub fn count_positive_roots(&self) -> Result<usize> {
        if self.is_zero() {
            return Err(QesError::DegeneratePolynomial);
        }
        let p0 = self.trimmed(1e-14).normalized();
        if p0.degree() == 0 {
            return Ok(0);
        }
        let mut chain = vec![p0.clone(), p0.derivative().normalized()];
        loop {
            let n = chain.len();
            let r = chain[n - 2].rem(&chain[n - 1]).scale(-1.0);
            let r = r.trimmed(1e-11);
            let rel = r.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            if r.is_zero() || rel <= 1e-11 {
                break;
            }
            chain.push(r.normalized());
            if chain.last().unwrap().degree() == 0 {
                break;
            }
        }
        let sign_at_zero_plus =
            |p: &Polynomial| -> f64 { p.coeffs.iter().find(|c| **c != 0.0).copied().unwrap_or(0.0).signum() };
        let sign_at_inf = |p: &Polynomial| p.leading().signum();
        let changes = |signs: Vec<f64>| {
            let s: Vec<f64> = signs.into_iter().filter(|s| *s != 0.0).collect();
            s.windows(2).filter(|w| w[0] != w[1]).count()
        };
        let at_zero = changes(chain.iter().map(sign_at_zero_plus).collect());
        let at_inf = changes(chain.iter().map(sign_at_inf).collect());
        Ok(at_zero.saturating_sub(at_inf))
    }
}
