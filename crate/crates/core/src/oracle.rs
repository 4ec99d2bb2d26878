//! Finite-difference eigensolver for the radial equation
//!
//! ```text
//! -(1/r)(r R')' + l²/r² R + V(r) R = β R,   R(r_max) = 0.
//! ```
//!
//! The operator is discretized in flux form on cell centres
//! `r_i = (i - ½) h`, `h = r_max / N`. The flux through `r = 0` vanishes, so
//! no boundary value is imposed at the origin and the `l = 0` sector
//! converges at `O(h²)` like every other. Scaling the unknowns by `√r_i`
//! (the discrete `u = √r R`) makes the matrix symmetric tridiagonal.
//! Eigenvalues come from Sturm-count bisection, eigenvectors from inverse
//! iteration. None of this touches the Heun machinery.

use serde::{Deserialize, Serialize};

use crate::error::{QesError, Result};
use crate::exec::Execution;
use crate::model::{effective_potential, PotentialCoeffs};

pub const DEFAULT_POINTS: usize = 8192;
pub const MIN_POINTS: usize = 100;
/// Absolute bisection tolerance on `β`.
pub const BISECTION_TOL: f64 = 1e-12;
/// Required ratio of `V(r_max)` to the largest returned eigenvalue.
pub const CONFINEMENT_FACTOR: f64 = 50.0;
/// Eigenvector samples below this fraction of the peak are ignored when
/// counting sign changes.
const NODE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub r_max: f64,
    pub n_pts: usize,
    /// Richardson-extrapolate eigenvalues over `(h, h/2)`.
    pub refine: bool,
}

impl RadialGrid {
    pub fn new(r_max: f64, n_pts: usize, refine: bool) -> Result<Self> {
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(QesError::Grid(format!("r_max must be positive, got {r_max}")));
        }
        if n_pts < MIN_POINTS {
            return Err(QesError::Grid(format!("need at least {MIN_POINTS} points, got {n_pts}")));
        }
        Ok(Self { r_max, n_pts, refine })
    }

    /// `r_max = 10/(mω)^{1/4}` clamped to `[6, 20]`, 8192 points, refined.
    pub fn default_for(m: f64, omega: f64) -> Self {
        Self { r_max: default_r_max(m * omega), n_pts: DEFAULT_POINTS, refine: true }
    }

    /// Defaults for a generic potential, taking `√η` (or the lower powers
    /// when `η = 0`) as the `mω` scale.
    pub fn default_for_potential(coeffs: &PotentialCoeffs) -> Self {
        let scale = if coeffs.eta > 0.0 {
            coeffs.eta.sqrt()
        } else if coeffs.quartic_coeff > 0.0 {
            coeffs.quartic_coeff.sqrt()
        } else {
            coeffs.varpi.abs().sqrt()
        };
        Self { r_max: default_r_max(scale), n_pts: DEFAULT_POINTS, refine: true }
    }

    pub fn spacing(&self) -> f64 {
        self.r_max / self.n_pts as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.spacing();
        (1..=self.n_pts).map(|i| (i as f64 - 0.5) * h).collect()
    }

    fn doubled(&self) -> Self {
        Self { n_pts: 2 * self.n_pts, ..*self }
    }
}

fn default_r_max(mw: f64) -> f64 {
    if mw > 0.0 {
        (10.0 / mw.powf(0.25)).clamp(6.0, 20.0)
    } else {
        20.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigSolution {
    /// Ascending eigenvalues (Richardson-extrapolated when refined).
    pub betas: Vec<f64>,
    /// Eigenvalues on the base grid before extrapolation.
    pub raw_betas: Vec<f64>,
    /// Radial nodes of the base grid.
    pub radii: Vec<f64>,
    /// `R(r_i)` per level, unit-normalized with respect to the `r dr`
    /// measure, positive near the origin.
    pub vectors: Vec<Vec<f64>>,
    pub node_counts: Vec<usize>,
    pub grid: RadialGrid,
}

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    /// Discretized radial operator for `potential` on `grid`.
    pub fn radial<V: Fn(f64) -> f64>(potential: V, l: i64, grid: &RadialGrid) -> Self {
        let n = grid.n_pts;
        let h = grid.spacing();
        let h2 = h * h;
        let l2 = (l * l) as f64;
        let r = grid.nodes();
        let diag = r
            .iter()
            .map(|&ri| {
                let outer = ri + 0.5 * h;
                let inner = ri - 0.5 * h;
                (outer + inner) / (h2 * ri) + l2 / (ri * ri) + potential(ri)
            })
            .collect();
        let off = (0..n - 1).map(|i| -(r[i] + 0.5 * h) / (h2 * (r[i] * r[i + 1]).sqrt())).collect();
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `x` (negative LDLᵀ pivots).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            let guarded = if q == 0.0 { f64::MIN_POSITIVE.sqrt() } else { q };
            q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / guarded;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// The `index`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, index: usize, tol: f64) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= tol || mid == lo || mid == hi {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Eigenvector for an eigenvalue estimate by inverse iteration.
    pub fn eigenvector(&self, eigenvalue: f64) -> Vec<f64> {
        let n = self.diag.len();
        let scale = self.diag.iter().fold(1.0f64, |m, d| m.max(d.abs()));
        let shift = eigenvalue + 1e-13 * scale.min(1e6);
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
        for _ in 0..4 {
            v = solve_shifted(self, shift, &v);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
        }
        v
    }
}

/// Solves `(T - σ I) x = b` by Gaussian elimination with partial pivoting.
fn solve_shifted(t: &Tridiagonal, sigma: f64, b: &[f64]) -> Vec<f64> {
    let n = t.diag.len();
    // Row i holds (a[i], c[i], e[i]) at columns (i, i+1, i+2) after elimination.
    let mut a: Vec<f64> = t.diag.iter().map(|d| d - sigma).collect();
    let mut c: Vec<f64> = (0..n).map(|i| if i + 1 < n { t.off[i] } else { 0.0 }).collect();
    let mut e = vec![0.0; n];
    let mut sub: Vec<f64> = t.off.clone();
    let mut rhs = b.to_vec();
    let tiny = f64::EPSILON * t.diag.iter().fold(1.0f64, |m, d| m.max(d.abs()));

    for i in 0..n.saturating_sub(1) {
        if sub[i].abs() > a[i].abs() {
            // Swap rows i and i+1.
            let (ai, ci, ei, ri) = (a[i], c[i], e[i], rhs[i]);
            a[i] = sub[i];
            c[i] = a[i + 1];
            e[i] = c[i + 1];
            rhs[i] = rhs[i + 1];
            sub[i] = ai;
            a[i + 1] = ci;
            c[i + 1] = ei;
            rhs[i + 1] = ri;
        }
        if a[i] == 0.0 {
            a[i] = tiny;
        }
        let factor = sub[i] / a[i];
        a[i + 1] -= factor * c[i];
        if i + 2 < n {
            c[i + 1] -= factor * e[i];
        }
        rhs[i + 1] -= factor * rhs[i];
    }
    if a[n - 1] == 0.0 {
        a[n - 1] = tiny;
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        if i + 1 < n {
            s -= c[i] * x[i + 1];
        }
        if i + 2 < n {
            s -= e[i] * x[i + 2];
        }
        x[i] = s / a[i];
    }
    x
}

/// Sign changes, ignoring samples below `NODE_FLOOR` of the peak.
pub fn sign_changes(v: &[f64]) -> usize {
    let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let floor = NODE_FLOOR * peak;
    let mut last = 0.0f64;
    let mut changes = 0;
    for &x in v.iter().filter(|x| x.abs() > floor) {
        if last != 0.0 && x.signum() != last {
            changes += 1;
        }
        last = x.signum();
    }
    changes
}

fn lowest_eigenvalues(t: &Tridiagonal, levels: usize, exec: Execution) -> Vec<f64> {
    let idx: Vec<usize> = (0..levels).collect();
    exec.map(&idx, |&k| t.eigenvalue(k, BISECTION_TOL))
}

/// Shared driver for any radial potential.
pub fn solve_potential<V>(
    potential: V,
    l: i64,
    grid: &RadialGrid,
    levels: usize,
    exec: Execution,
) -> Result<EigSolution>
where
    V: Fn(f64) -> f64 + Sync,
{
    if levels == 0 || levels > grid.n_pts {
        return Err(QesError::domain(format!("level count must be in 1..={}, got {levels}", grid.n_pts)));
    }
    let t = Tridiagonal::radial(&potential, l, grid);
    let raw = lowest_eigenvalues(&t, levels, exec);

    let v_max = potential(grid.r_max);
    let top = raw.last().copied().unwrap_or(0.0);
    let required = CONFINEMENT_FACTOR * top.max(0.0);
    if !(v_max > 0.0) || v_max < required {
        let mut suggested = grid.r_max;
        for _ in 0..200 {
            if potential(suggested) >= required && potential(suggested) > 0.0 {
                break;
            }
            suggested *= 1.1;
        }
        return Err(QesError::Unconfined { r_max: grid.r_max, v_max, required, suggested_r_max: suggested });
    }

    let betas = if grid.refine {
        let fine = Tridiagonal::radial(&potential, l, &grid.doubled());
        let fine_vals = lowest_eigenvalues(&fine, levels, exec);
        raw.iter().zip(&fine_vals).map(|(c, f)| (4.0 * f - c) / 3.0).collect()
    } else {
        raw.clone()
    };

    let radii = grid.nodes();
    let h = grid.spacing();
    let vectors: Vec<Vec<f64>> = exec.map(&raw, |&b| {
        let u = t.eigenvector(b);
        // Undo the √r scaling and fix the sign at the origin.
        let mut rv: Vec<f64> = u.iter().zip(&radii).map(|(ui, ri)| ui / ri.sqrt()).collect();
        let norm = rv.iter().zip(&radii).map(|(x, r)| x * x * r * h).sum::<f64>().sqrt();
        let sign = rv.iter().find(|x| x.abs() > NODE_FLOOR * norm).map_or(1.0, |x| x.signum());
        rv.iter_mut().for_each(|x| *x *= sign / norm);
        rv
    });
    let node_counts = vectors.iter().map(|v| sign_changes(v)).collect();

    Ok(EigSolution { betas, raw_betas: raw, radii, vectors, node_counts, grid: *grid })
}

/// Lowest `levels` values of `β` for the rotating-frame potential.
pub fn radial_eigensolve(
    m: f64,
    omega: f64,
    omega_rot: f64,
    l: i64,
    grid: &RadialGrid,
    levels: usize,
) -> Result<EigSolution> {
    radial_eigensolve_with(Execution::default(), m, omega, omega_rot, l, grid, levels)
}

pub fn radial_eigensolve_with(
    exec: Execution,
    m: f64,
    omega: f64,
    omega_rot: f64,
    l: i64,
    grid: &RadialGrid,
    levels: usize,
) -> Result<EigSolution> {
    if !(m > 0.0) {
        return Err(QesError::domain(format!("mass must be positive, got {m}")));
    }
    if !(omega > 0.0) {
        return Err(QesError::domain(format!("cyclotron frequency must be positive, got {omega}")));
    }
    solve_potential(|r| effective_potential(r, m, omega, omega_rot, l), l, grid, levels, exec)
}

/// Same solve for `ϖ r² + q r⁴ + η r⁶`.
pub fn generic_eigensolve(coeffs: &PotentialCoeffs, l: i64, grid: &RadialGrid, levels: usize) -> Result<EigSolution> {
    generic_eigensolve_with(Execution::default(), coeffs, l, grid, levels)
}

pub fn generic_eigensolve_with(
    exec: Execution,
    coeffs: &PotentialCoeffs,
    l: i64,
    grid: &RadialGrid,
    levels: usize,
) -> Result<EigSolution> {
    if !coeffs.is_confining() {
        return Err(QesError::domain(format!(
            "potential with coefficients (ϖ={}, quartic={}, η={}) is not confining",
            coeffs.varpi, coeffs.quartic_coeff, coeffs.eta
        )));
    }
    let c = *coeffs;
    solve_potential(move |r| c.eval(r), l, grid, levels, exec)
}
